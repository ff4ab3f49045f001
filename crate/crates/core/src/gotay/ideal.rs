//! Constraint sets and reduction modulo their ideal.
//!
//! A constraint `a·v + g` with `a` a unit and `v` absent from `g` is
//! solvable: it is eliminated by division linear in `v`. What remains is
//! attacked by a bounded cofactor search, an exact linear system over the
//! coefficients of candidate cofactors. Every certificate is recomposed
//! over the original constraints and checked before it is returned.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;

use crate::cartan::{Chart, DiffForm, VectorField};
use crate::error::{Error, Result};
use crate::linred::solve;
use crate::presymp::PresympSystem;
use crate::symexpr::{Monomial, Poly, Rational};

/// Parametric sampling hint: `var = expr(s1, …, sk)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleHint {
    pub var: String,
    /// Expression text over the chart variables plus `s1..sk`.
    pub expr: String,
}

/// Finite list of polynomial constraints on a chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSet {
    pub chart: Chart,
    pub constraints: Vec<Poly>,
    /// Variable isolated by each constraint, if solvable.
    pub solvable: Vec<Option<usize>>,
    pub hints: Vec<SampleHint>,
    /// Variables counted as units (model parameters). Defaults to every
    /// chart parameter.
    units: Vec<bool>,
}

impl ConstraintSet {
    /// Normalizes each constraint to leading coefficient 1 and drops zeros.
    pub fn new(chart: &Chart, constraints: Vec<Poly>) -> Result<ConstraintSet> {
        ConstraintSet::with_units(chart, constraints, chart.param_mask().to_vec())
    }

    pub fn with_units(
        chart: &Chart,
        constraints: Vec<Poly>,
        units: Vec<bool>,
    ) -> Result<ConstraintSet> {
        ConstraintSet::build(chart, constraints, units, true)
    }

    /// Keeps the constraints as given (no rescaling); zeros and repeats are
    /// still dropped.
    pub fn unnormalized(chart: &Chart, constraints: Vec<Poly>) -> Result<ConstraintSet> {
        ConstraintSet::build(chart, constraints, chart.param_mask().to_vec(), false)
    }

    fn build(
        chart: &Chart,
        constraints: Vec<Poly>,
        units: Vec<bool>,
        monic: bool,
    ) -> Result<ConstraintSet> {
        let mut cs = Vec::new();
        for c in constraints {
            let c = c.embed(chart.vars())?;
            if c.is_zero() {
                continue;
            }
            let c = if monic { c.monic() } else { c };
            if !cs.contains(&c) {
                cs.push(c);
            }
        }
        let mut set = ConstraintSet {
            chart: chart.clone(),
            constraints: cs,
            solvable: Vec::new(),
            hints: Vec::new(),
            units,
        };
        set.solvable = set.detect_solvable();
        Ok(set)
    }

    pub fn empty(chart: &Chart) -> ConstraintSet {
        ConstraintSet::new(chart, Vec::new()).expect("empty set")
    }

    pub fn with_hints(mut self, hints: Vec<SampleHint>) -> ConstraintSet {
        self.hints = hints;
        self
    }

    pub fn units(&self) -> &[bool] {
        &self.units
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Add constraints, keeping hints and units.
    pub fn extended(&self, more: Vec<Poly>) -> Result<ConstraintSet> {
        let mut all = self.constraints.clone();
        all.extend(more);
        Ok(
            ConstraintSet::with_units(&self.chart, all, self.units.clone())?
                .with_hints(self.hints.clone()),
        )
    }

    /// Rewrite on another chart (e.g. one with extra parameters).
    pub fn embed(&self, chart: &Chart, units: Vec<bool>) -> Result<ConstraintSet> {
        let cs = self
            .constraints
            .iter()
            .map(|c| c.embed(chart.vars()))
            .collect::<Result<Vec<_>>>()?;
        Ok(ConstraintSet::with_units(chart, cs, units)?.with_hints(self.hints.clone()))
    }

    fn detect_solvable(&self) -> Vec<Option<usize>> {
        let mut chosen: Vec<Option<usize>> = vec![None; self.constraints.len()];
        let mut solved: BTreeSet<usize> = BTreeSet::new();
        let mut rests: Vec<Poly> = Vec::new();
        for (k, c) in self.constraints.iter().enumerate() {
            for v in self.chart.dynamic() {
                if solved.contains(&v) || rests.iter().any(|g| g.involves(v)) {
                    continue;
                }
                let Some((a, g)) = c.linear_split(v) else {
                    continue;
                };
                if a.is_zero() || !a.is_unit(&self.units) {
                    continue;
                }
                if solved.iter().any(|&s| g.involves(s)) {
                    continue;
                }
                if self
                    .constraints
                    .iter()
                    .enumerate()
                    .any(|(j, o)| j < k && chosen[j].is_none() && o.involves(v))
                {
                    continue;
                }
                chosen[k] = Some(v);
                solved.insert(v);
                rests.push(g);
                break;
            }
        }
        chosen
    }

    pub fn all_solvable(&self) -> bool {
        self.solvable.iter().all(|s| s.is_some())
    }

    /// `v := −g/a` for each solvable constraint.
    pub fn substitutions(&self) -> Vec<(usize, Poly)> {
        self.constraints
            .iter()
            .zip(&self.solvable)
            .filter_map(|(c, s)| {
                s.map(|v| {
                    let (a, g) = c.linear_split(v).unwrap();
                    let inv = a.unit_inverse().unwrap();
                    (v, -(&g * &inv))
                })
            })
            .collect()
    }

    /// Names of the solved variables.
    pub fn solved_names(&self) -> Vec<String> {
        self.solvable
            .iter()
            .flatten()
            .map(|&v| self.chart.name_of(v).to_string())
            .collect()
    }

    /// Dimension count assuming independent constraints.
    pub fn expected_dim(&self) -> usize {
        self.chart.dim().saturating_sub(self.constraints.len())
    }
}

impl fmt::Display for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.constraints.iter().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Result of reducing a polynomial modulo a constraint set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    /// What is left after eliminating solvable constraints; zero when a
    /// certificate exists.
    pub remainder: Poly,
    /// Cofactors `p_i` with `p = Σ p_i ζ_i`, verified exactly.
    pub certificate: Option<Vec<Poly>>,
}

impl Reduction {
    pub fn certified(&self) -> bool {
        self.certificate.is_some()
    }
}

/// Divide by `a·v + g` (with `a` a unit, `g` free of `v`) as polynomials in
/// `v`; the remainder is free of `v`.
fn divide_linear(p: &Poly, v: usize, a: &Poly, g: &Poly) -> (Poly, Poly) {
    let vars = p.vars().clone();
    let ainv = a.unit_inverse().expect("unit");
    let zeta = &(a * &Poly::var(&vars, v)) + g;
    let mut q = Poly::zero(&vars);
    let mut r = p.clone();
    loop {
        let (_, hi) = r.exponent_range(v);
        if hi == 0 {
            break;
        }
        let lead = r.coefficient_of_power(v, hi);
        let mut m = Monomial::one(vars.len());
        m.0[v] = hi - 1;
        let t = (&lead * &ainv).shift(&m);
        r = &r - &(&t * &zeta);
        q = &q + &t;
    }
    (q, r)
}

/// Steps after which `normal_form` gives up and returns what it has.
const DIVISION_STEPS: usize = 20000;

/// Remainder of multivariate division by `gens` in graded-lex order, with
/// unit variables invertible. The result differs from `p` by an element of
/// the ideal; it is a normal form only when `gens` is a Gröbner basis.
pub fn normal_form(p: &Poly, gens: &[Poly], units: &[bool]) -> Poly {
    let vars = p.vars().clone();
    let leads: Vec<(Monomial, Rational)> = gens
        .iter()
        .filter_map(|g| g.leading().map(|(m, c)| (m.clone(), c.clone())))
        .collect();
    let divides = |lm: &Monomial, m: &Monomial| {
        lm.0.iter()
            .zip(&m.0)
            .zip(units)
            .all(|((&a, &b), &u)| u || a <= b)
    };
    let mut r = p.clone();
    let mut out = Poly::zero(&vars);
    for _ in 0..DIVISION_STEPS {
        let Some((m, c)) = r.leading().map(|(m, c)| (m.clone(), c.clone())) else {
            return out;
        };
        match leads.iter().position(|(lm, _)| divides(lm, &m)) {
            Some(j) => {
                let t = Poly::monomial(&vars, m.mul(&leads[j].0.inverse()), &c / &leads[j].1);
                r = &r - &(&t * &gens[j]);
            }
            None => {
                let t = Poly::monomial(&vars, m, c);
                r = &r - &t;
                out = &out + &t;
            }
        }
    }
    &out + &r
}

/// Default cofactor degree bound.
pub fn default_bound(p: &Poly, set: &ConstraintSet) -> i64 {
    let dm = set.chart.dynamic_mask();
    let min_c = set
        .constraints
        .iter()
        .map(|c| c.degree_in(&dm))
        .min()
        .unwrap_or(0);
    (p.degree_in(&dm) - min_c).max(0)
}

/// Reduce with the default degree bound.
pub fn ideal_reduce_default(p: &Poly, set: &ConstraintSet) -> Result<Reduction> {
    ideal_reduce(p, set, default_bound(p, set))
}

/// Reduce `p` modulo the constraints, searching cofactors of degree at most
/// `bound` in the dynamical variables.
pub fn ideal_reduce(p: &Poly, set: &ConstraintSet, bound: i64) -> Result<Reduction> {
    let vars = set.chart.vars().clone();
    let p = p.embed(&vars)?;
    let n = set.constraints.len();
    let zero = Poly::zero(&vars);
    let mut cof = vec![zero.clone(); n];
    let mut r = p.clone();
    // Eliminate solvable constraints, remembering how each reduced
    // non-solvable constraint is expressed through the originals.
    let mut splits: Vec<(usize, usize, Poly, Poly)> = Vec::new();
    for (k, s) in set.solvable.iter().enumerate() {
        if let Some(v) = *s {
            let (a, g) = set.constraints[k].linear_split(v).unwrap();
            splits.push((k, v, a, g));
        }
    }
    for (k, v, a, g) in &splits {
        let (q, rem) = divide_linear(&r, *v, a, g);
        cof[*k] = &cof[*k] + &q;
        r = rem;
    }
    let others: Vec<usize> = (0..n).filter(|&k| set.solvable[k].is_none()).collect();
    if r.is_zero() {
        return finish(&p, set, cof, r);
    }
    if others.is_empty() {
        return Ok(Reduction {
            remainder: r,
            certificate: None,
        });
    }
    // Reduced forms of the remaining constraints: ζ'_j = ζ_j − Σ_k q_jk ζ_k.
    let mut reduced: Vec<(Poly, Vec<Poly>)> = Vec::new();
    for &j in &others {
        let mut rj = set.constraints[j].clone();
        let mut qj = vec![zero.clone(); n];
        for (k, v, a, g) in &splits {
            let (q, rem) = divide_linear(&rj, *v, a, g);
            qj[*k] = &qj[*k] + &q;
            rj = rem;
        }
        reduced.push((rj, qj));
    }
    let gens: Vec<Poly> = reduced.iter().map(|(g, _)| g.clone()).collect();
    match cofactor_search(&r, &gens, set, bound) {
        Some(ps) => {
            for (idx, pj) in ps.iter().enumerate() {
                let j = others[idx];
                cof[j] = &cof[j] + pj;
                for (k, qjk) in reduced[idx].1.iter().enumerate() {
                    if !qjk.is_zero() {
                        cof[k] = &cof[k] - &(pj * qjk);
                    }
                }
            }
            finish(&p, set, cof, zero)
        }
        None => Ok(Reduction {
            remainder: r,
            certificate: None,
        }),
    }
}

fn finish(p: &Poly, set: &ConstraintSet, cof: Vec<Poly>, remainder: Poly) -> Result<Reduction> {
    let mut acc = Poly::zero(p.vars());
    for (c, z) in cof.iter().zip(&set.constraints) {
        acc = &acc + &(c * z);
    }
    if &acc != p {
        return Ok(Reduction {
            remainder: if remainder.is_zero() {
                p - &acc
            } else {
                remainder
            },
            certificate: None,
        });
    }
    Ok(Reduction {
        remainder,
        certificate: Some(cof),
    })
}

/// Largest number of unknowns the cofactor search will set up.
const MAX_UNKNOWNS: usize = 6000;

fn cofactor_search(r: &Poly, gens: &[Poly], set: &ConstraintSet, bound: i64) -> Option<Vec<Poly>> {
    let columns: Vec<Vec<Poly>> = gens.iter().map(|g| vec![g.clone()]).collect();
    solve_combination(&[r.clone()], &columns, &set.chart.dynamic_mask(), bound)
}

/// Polynomials `c_i`, of degree at most `bound` in the masked variables,
/// with `Σ_i c_i columns[i][j] = rhs[j]` for every `j`. Other variables get
/// the exponent ranges the data allows (negative ones included).
pub fn solve_combination(
    rhs: &[Poly],
    columns: &[Vec<Poly>],
    dyn_mask: &[bool],
    bound: i64,
) -> Option<Vec<Poly>> {
    let vars = rhs.first()?.vars().clone();
    let nv = vars.len();
    let mut involved = BTreeSet::new();
    for q in rhs.iter().chain(columns.iter().flatten()) {
        for i in q.support() {
            involved.insert(i);
        }
    }
    let dyn_vars: Vec<usize> = involved.iter().copied().filter(|&i| dyn_mask[i]).collect();
    let par_vars: Vec<usize> = involved.iter().copied().filter(|&i| !dyn_mask[i]).collect();
    let dyn_monos = monomials_up_to(&dyn_vars, nv, bound.max(0) as usize);
    let range = |ps: &[&Poly], t: usize| -> Option<(i32, i32)> {
        let mut lo = None::<i32>;
        let mut hi = None::<i32>;
        for p in ps.iter().filter(|p| !p.is_zero()) {
            let (l, h) = p.exponent_range(t);
            lo = Some(lo.map_or(l, |x| x.min(l)));
            hi = Some(hi.map_or(h, |x| x.max(h)));
        }
        lo.zip(hi)
    };
    let rhs_refs: Vec<&Poly> = rhs.iter().collect();
    let mut basis: Vec<Vec<Monomial>> = Vec::new();
    for col in columns {
        let col_refs: Vec<&Poly> = col.iter().collect();
        if col.iter().all(|c| c.is_zero()) {
            basis.push(Vec::new());
            continue;
        }
        let mut ranges = Vec::new();
        for &t in &par_vars {
            let (rl, rh) = range(&rhs_refs, t).unwrap_or((0, 0));
            let (gl, gh) = range(&col_refs, t).unwrap_or((0, 0));
            ranges.push((t, rl - gh, rh - gl));
        }
        let mut monos = Vec::new();
        for pm in param_monomials(&ranges, nv) {
            for dmn in &dyn_monos {
                monos.push(pm.mul(dmn));
            }
        }
        basis.push(monos);
    }
    let unknowns: usize = basis.iter().map(|b| b.len()).sum();
    if unknowns == 0 || unknowns > MAX_UNKNOWNS {
        return None;
    }
    let mut rows: BTreeMap<(usize, Monomial), Vec<(usize, Rational)>> = BTreeMap::new();
    let mut col = 0;
    for (gs, monos) in columns.iter().zip(&basis) {
        for m in monos {
            for (j, g) in gs.iter().enumerate() {
                for (gm, gc) in g.terms() {
                    rows.entry((j, m.mul(gm)))
                        .or_default()
                        .push((col, gc.clone()));
                }
            }
            col += 1;
        }
    }
    for (j, r) in rhs.iter().enumerate() {
        for (m, _) in r.terms() {
            rows.entry((j, m.clone())).or_default();
        }
    }
    let mut mat = Vec::with_capacity(rows.len());
    let mut b = Vec::with_capacity(rows.len());
    for ((j, m), entries) in &rows {
        let mut row = vec![Rational::zero(); unknowns];
        for (c, v) in entries {
            row[*c] += v;
        }
        mat.push(row);
        b.push(rhs[*j].coeff(m));
    }
    let x = solve(&mat, &b)?;
    let mut out = Vec::new();
    let mut col = 0;
    for monos in &basis {
        let mut pj = Poly::zero(&vars);
        for m in monos {
            if !x[col].is_zero() {
                pj = &pj + &Poly::monomial(&vars, m.clone(), x[col].clone());
            }
            col += 1;
        }
        out.push(pj);
    }
    // Exact recheck.
    for (j, r) in rhs.iter().enumerate() {
        let mut acc = Poly::zero(&vars);
        for (c, gs) in out.iter().zip(columns) {
            acc = &acc + &(c * &gs[j]);
        }
        if &acc != r {
            return None;
        }
    }
    Some(out)
}

fn monomials_up_to(vars: &[usize], n: usize, deg: usize) -> Vec<Monomial> {
    let mut out = vec![Monomial::one(n)];
    let mut frontier = vec![Monomial::one(n)];
    for _ in 0..deg {
        let mut next = Vec::new();
        for m in &frontier {
            let last =
                m.0.iter()
                    .enumerate()
                    .rev()
                    .find(|(i, &e)| e > 0 && vars.contains(i))
                    .map(|(i, _)| i);
            for &v in vars {
                if let Some(l) = last {
                    if v < l {
                        continue;
                    }
                }
                let mut m2 = m.clone();
                m2.0[v] += 1;
                next.push(m2);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn param_monomials(ranges: &[(usize, i32, i32)], n: usize) -> Vec<Monomial> {
    let mut out = vec![Monomial::one(n)];
    for &(t, lo, hi) in ranges {
        let mut next = Vec::new();
        for m in &out {
            for e in lo.min(0)..=hi.max(0) {
                let mut m2 = m.clone();
                m2.0[t] = e;
                next.push(m2);
            }
        }
        out = next;
    }
    out
}

/// How a vanishing claim was established.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Vanishing {
    /// Exact cofactor certificate.
    Certified,
    /// Zero at every one of this many on-constraint sample points.
    Sampled(usize),
    /// Nonzero at a sample point.
    Fails {
        point: Vec<Rational>,
        value: Rational,
    },
    /// Neither certified nor sampleable.
    Unknown(String),
}

impl Vanishing {
    pub fn holds(&self) -> bool {
        matches!(self, Vanishing::Certified | Vanishing::Sampled(_))
    }

    pub fn label(&self) -> String {
        match self {
            Vanishing::Certified => "certified".into(),
            Vanishing::Sampled(n) => format!("vanishes at all {n} samples"),
            Vanishing::Fails { value, .. } => format!("fails (value {value})"),
            Vanishing::Unknown(s) => format!("unknown ({s})"),
        }
    }
}

/// Number of sample points used when certification fails.
pub const FALLBACK_SAMPLES: usize = 64;

/// Does `p` vanish on the constraint set: certificate first, then samples.
pub fn vanishes_on(p: &Poly, set: &ConstraintSet, seed: u64) -> Result<Vanishing> {
    let red = ideal_reduce_default(p, set)?;
    if red.certified() {
        return Ok(Vanishing::Certified);
    }
    let pts = match super::sample::sample_points(set, FALLBACK_SAMPLES, seed) {
        Ok(p) => p,
        Err(e) => return Ok(Vanishing::Unknown(e.to_string())),
    };
    let p = p.embed(set.chart.vars())?;
    for pt in &pts {
        let v = p.eval(pt)?;
        if !v.is_zero() {
            return Ok(Vanishing::Fails {
                point: pt.clone(),
                value: v,
            });
        }
    }
    Ok(Vanishing::Sampled(pts.len()))
}

/// Pull a polynomial back to the slice chart cut out by solvable constraints.
pub fn pullback_poly(p: &Poly, set: &ConstraintSet) -> Result<Poly> {
    let (target, subs) = slice_data(set)?;
    p.embed(set.chart.vars())?
        .substitute_many(&subs)
        .embed(target.vars())
}

/// Pull a form back to the slice chart.
pub fn pullback_form(w: &DiffForm, set: &ConstraintSet) -> Result<DiffForm> {
    let (target, subs) = slice_data(set)?;
    let w = if w.chart() == &set.chart {
        w.clone()
    } else {
        w.embed(&set.chart)?
    };
    w.pullback_graph(&subs, &target)
}

/// Pull a system back to the slice chart.
pub fn pullback_system(sys: &PresympSystem, set: &ConstraintSet) -> Result<PresympSystem> {
    let omega = pullback_form(&sys.omega, set)?;
    let h = pullback_poly(&sys.hamiltonian, set)?;
    PresympSystem::new(omega.chart().clone(), omega, h)
}

/// Restrict a field tangent to the slice: drop solved components after
/// substitution. Errors if the dropped components do not vanish on the slice.
pub fn restrict_field(x: &VectorField, set: &ConstraintSet) -> Result<VectorField> {
    let (target, subs) = slice_data(set)?;
    let x = if x.chart() == &set.chart {
        x.clone()
    } else {
        x.embed(&set.chart)?
    };
    let solved: Vec<usize> = subs.iter().map(|(v, _)| *v).collect();
    for (k, (v, _)) in subs.iter().enumerate() {
        let c = &set.constraints[set.solvable.iter().position(|s| *s == Some(*v)).unwrap()];
        let along = x.apply(c).substitute_many(&subs);
        if !along.is_zero() {
            return Err(Error::TangencyNotCertified(format!(
                "field is not tangent to the slice along {} (component {k})",
                set.chart.name_of(*v)
            )));
        }
    }
    let mut out = VectorField::zero(&target);
    for (&i, c) in x.components() {
        if solved.contains(&i) {
            continue;
        }
        let j = target.index(set.chart.name_of(i))?;
        out.set(j, c.substitute_many(&subs).embed(target.vars())?);
    }
    Ok(out)
}

/// Slice chart and substitutions; refuses unsolvable constraints.
pub fn slice_data(set: &ConstraintSet) -> Result<(Chart, Vec<(usize, Poly)>)> {
    if let Some(k) = set.solvable.iter().position(|s| s.is_none()) {
        return Err(Error::UnsolvableConstraint(set.constraints[k].to_string()));
    }
    let subs = set.substitutions();
    let drop: Vec<usize> = subs.iter().map(|(v, _)| *v).collect();
    let target = set
        .chart
        .without(&format!("{}|slice", set.chart.name), &drop);
    Ok((target, subs))
}
