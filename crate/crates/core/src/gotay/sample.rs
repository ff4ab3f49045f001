//! Exact rational points on constraint sets.
//!
//! Strategies, applied in this order at every attempt:
//! 1. parametric hints `var = expr(s1, …)` fix some coordinates;
//! 2. every other coordinate is random;
//! 3. each remaining constraint is solved for a variable it contains
//!    linearly (successive-linear), or quadratically when the discriminant
//!    is a rational square; a point found this way is then moved along a
//!    random line through it, which meets the quadric again at a rational
//!    point;
//! 4. solvable constraints fill in their isolated variables last.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::ideal::ConstraintSet;
use crate::error::{Error, Result};
use crate::sample::Sampler;
use crate::symexpr::{rat, Poly, Rational, Vars};

/// Attempts per requested point before giving up.
const ATTEMPTS_PER_POINT: usize = 60;
/// Tries at finding a rational root of a quadratic.
const QUADRATIC_TRIES: usize = 400;
/// Number of hint parameters `s1..s9`.
const HINT_PARAMS: usize = 9;

fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

struct Plan {
    reduced: Vec<Poly>,
    subs: Vec<(usize, Poly)>,
    hints: Vec<(usize, Poly)>,
    hint_vars: Vars,
}

fn plan(set: &ConstraintSet) -> Result<Plan> {
    let chart = &set.chart;
    let subs = set.substitutions();
    let mut reduced = Vec::new();
    for (c, s) in set.constraints.iter().zip(&set.solvable) {
        if s.is_none() {
            let r = c.substitute_many(&subs);
            if !r.is_zero() {
                reduced.push(r);
            }
        }
    }
    let extra: Vec<String> = (1..=HINT_PARAMS).map(|i| format!("s{i}")).collect();
    let hint_vars = chart.vars().extended(&extra);
    let mut hints = Vec::new();
    for h in &set.hints {
        let v = chart.index(&h.var)?;
        let e = crate::symexpr::parse(&h.expr, &hint_vars)?;
        hints.push((v, e));
    }
    Ok(Plan {
        reduced,
        subs,
        hints,
        hint_vars,
    })
}

/// `n` points on the constraint set, deterministic in `seed`.
pub fn sample_points(set: &ConstraintSet, n: usize, seed: u64) -> Result<Vec<Vec<Rational>>> {
    let plan = plan(set)?;
    let mut rng = Sampler::new(seed);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < n {
        if attempts >= n.max(1) * ATTEMPTS_PER_POINT {
            return Err(Error::NoSample(format!(
                "found {} of {} points on {} after {} attempts",
                out.len(),
                n,
                set,
                attempts
            )));
        }
        attempts += 1;
        if let Some(p) = attempt(set, &plan, &mut rng)? {
            out.push(p);
        }
    }
    Ok(out)
}

fn attempt(set: &ConstraintSet, plan: &Plan, rng: &mut Sampler) -> Result<Option<Vec<Rational>>> {
    let chart = &set.chart;
    let mut pt = rng.point(chart);
    let mut locked = vec![false; chart.len()];
    for i in chart.parameters() {
        locked[i] = true;
    }
    if !plan.hints.is_empty() {
        let mut ext = pt.clone();
        for _ in 0..HINT_PARAMS {
            ext.push(rng.rational());
        }
        debug_assert_eq!(ext.len(), plan.hint_vars.len());
        for (v, e) in &plan.hints {
            pt[*v] = match e.eval(&ext) {
                Ok(x) => x,
                Err(Error::DivisionByZero(_)) => return Ok(None),
                Err(err) => return Err(err),
            };
            locked[*v] = true;
        }
    }
    for (v, _) in &plan.subs {
        locked[*v] = true;
    }
    for (k, c) in plan.reduced.iter().enumerate() {
        let value = match c.eval(&pt) {
            Ok(x) => x,
            Err(Error::DivisionByZero(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        if value.is_zero() {
            continue;
        }
        let earlier = &plan.reduced[..k];
        let free: Vec<usize> = c
            .support()
            .into_iter()
            .filter(|&v| !locked[v] && !earlier.iter().any(|e| e.involves(v)))
            .collect();
        if let Some(v) = solve_linear(c, &free, &mut pt)? {
            locked[v] = true;
            continue;
        }
        match solve_quadratic(c, &free, &mut pt, rng)? {
            Some(used) => {
                for v in used {
                    locked[v] = true;
                }
            }
            None => return Ok(None),
        }
    }
    for (v, g) in &plan.subs {
        pt[*v] = match g.eval(&pt) {
            Ok(x) => x,
            Err(Error::DivisionByZero(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
    }
    for c in &set.constraints {
        match c.eval(&pt) {
            Ok(x) if x.is_zero() => {}
            Ok(_) | Err(Error::DivisionByZero(_)) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    Ok(Some(pt))
}

/// Evaluate every variable except `v`, giving a univariate polynomial.
fn univariate(c: &Poly, v: usize, pt: &[Rational]) -> Result<Vec<Rational>> {
    let (lo, hi) = c.exponent_range(v);
    if lo < 0 {
        return Ok(Vec::new());
    }
    (0..=hi)
        .map(|e| c.coefficient_of_power(v, e).eval(pt))
        .collect()
}

fn solve_linear(c: &Poly, free: &[usize], pt: &mut [Rational]) -> Result<Option<usize>> {
    for &v in free {
        if c.exponent_range(v).1 != 1 {
            continue;
        }
        let u = match univariate(c, v, pt) {
            Ok(u) => u,
            Err(Error::DivisionByZero(_)) => continue,
            Err(e) => return Err(e),
        };
        if u.len() == 2 && !u[1].is_zero() {
            pt[v] = -&u[0] / &u[1];
            return Ok(Some(v));
        }
    }
    Ok(None)
}

/// Root search on a quadratic variable, then a random secant through the
/// root. Returns the variables that were moved.
fn solve_quadratic(
    c: &Poly,
    free: &[usize],
    pt: &mut [Rational],
    rng: &mut Sampler,
) -> Result<Option<Vec<usize>>> {
    let quad: Vec<usize> = free
        .iter()
        .copied()
        .filter(|&v| c.exponent_range(v).1 == 2)
        .collect();
    if quad.is_empty() {
        return Ok(None);
    }
    let mask: Vec<bool> = (0..pt.len()).map(|i| free.contains(&i)).collect();
    let secant_ok = c.degree_in(&mask) <= 2;
    for t in 0..QUADRATIC_TRIES {
        let v = quad[t % quad.len()];
        if t > 0 {
            for &w in free {
                if w != v {
                    pt[w] = Rational::from_integer(BigInt::from(rng.int(-3, 3)));
                }
            }
        }
        let u = match univariate(c, v, pt) {
            Ok(u) => u,
            Err(Error::DivisionByZero(_)) => continue,
            Err(e) => return Err(e),
        };
        if u.len() != 3 || u[2].is_zero() {
            continue;
        }
        let disc = &u[1] * &u[1] - rat(4) * &u[0] * &u[2];
        let Some(s) = rational_sqrt(&disc) else {
            continue;
        };
        let s = if rng.chance(0.5) { s } else { -s };
        pt[v] = (-&u[1] + s) / (rat(2) * &u[2]);
        if secant_ok {
            secant(c, free, pt, rng)?;
        }
        return Ok(Some(free.to_vec()));
    }
    Ok(None)
}

/// Second intersection of a random line through a point of the quadric.
fn secant(c: &Poly, free: &[usize], pt: &mut [Rational], rng: &mut Sampler) -> Result<()> {
    let dir: Vec<Rational> = free.iter().map(|_| rng.rational()).collect();
    let at = |t: &Rational, pt: &[Rational]| -> Result<Rational> {
        let mut q = pt.to_vec();
        for (k, &w) in free.iter().enumerate() {
            q[w] = &q[w] + t * &dir[k];
        }
        c.eval(&q)
    };
    let one = Rational::one();
    let plus = at(&one, pt)?;
    let minus = at(&-one.clone(), pt)?;
    let a = (&plus + &minus) / rat(2);
    let b = (&plus - &minus) / rat(2);
    if a.is_zero() {
        return Ok(());
    }
    let t = -b / a;
    for (k, &w) in free.iter().enumerate() {
        pt[w] = &pt[w] + &t * &dir[k];
    }
    Ok(())
}
