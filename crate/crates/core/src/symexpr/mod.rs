//! Exact multivariate polynomials over the rationals.
//!
//! A [`Poly`] lives over an ordered variable list ([`Vars`]). Terms are kept
//! in a `BTreeMap` keyed by [`Monomial`], whose ordering is graded
//! lexicographic with ties broken by declaration order. Exponents are signed
//! so that model parameters can appear with negative powers (`1/m2`); the
//! text parser only produces them through division by a monomial.

mod parse;
mod print;

pub use parse::{parse, parse_combination, BasisKind, ParseError, Term};

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number; the only coefficient type in the crate.
pub type Rational = num_rational::BigRational;

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `n/d`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Ordered list of variable names shared by polynomials of one chart.
#[derive(Clone, Debug)]
pub struct Vars(Arc<Vec<String>>);

impl Vars {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Vars {
        Vars(Arc::new(
            names.iter().map(|s| s.as_ref().to_string()).collect(),
        ))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0[i]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    /// A new list with `extra` appended.
    pub fn extended<S: AsRef<str>>(&self, extra: &[S]) -> Vars {
        let mut v: Vec<String> = self.0.as_ref().clone();
        v.extend(extra.iter().map(|s| s.as_ref().to_string()));
        Vars(Arc::new(v))
    }
}

impl PartialEq for Vars {
    fn eq(&self, other: &Vars) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Vars {}

/// Exponent vector ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<i32>);

impl Monomial {
    pub fn one(n: usize) -> Monomial {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Monomial {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn inverse(&self) -> Monomial {
        Monomial(self.0.iter().map(|e| -e).collect())
    }

    /// Degree counted only over the variables where `mask` is true.
    pub fn degree_in(&self, mask: &[bool]) -> i64 {
        self.0
            .iter()
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|(&e, _)| e as i64)
            .sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Monomial) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Monomial) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multivariate polynomial with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    vars: Vars,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(vars: &Vars) -> Poly {
        Poly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Vars, c: Rational) -> Poly {
        let mut p = Poly::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(vars.len()), c);
        }
        p
    }

    pub fn one(vars: &Vars) -> Poly {
        Poly::constant(vars, Rational::one())
    }

    pub fn var(vars: &Vars, i: usize) -> Poly {
        Poly::monomial(vars, Monomial::var(vars.len(), i), Rational::one())
    }

    /// The variable called `name`; panics if the name is not in `vars`.
    pub fn named(vars: &Vars, name: &str) -> Poly {
        let i = vars
            .index(name)
            .unwrap_or_else(|| panic!("unknown variable {name}"));
        Poly::var(vars, i)
    }

    pub fn monomial(vars: &Vars, m: Monomial, c: Rational) -> Poly {
        assert_eq!(
            m.0.len(),
            vars.len(),
            "monomial length does not match chart"
        );
        let mut p = Poly::zero(vars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(vars: &Vars, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Poly {
        let mut p = Poly::zero(vars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    /// Value of a constant polynomial, `None` otherwise.
    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_constant() {
            Some(self.coeff(&Monomial::one(self.vars.len())))
        } else {
            None
        }
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one(self.vars.len()))
    }

    /// Leading (largest) term.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Total degree; `-1` for zero.
    pub fn degree(&self) -> i64 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(-1)
    }

    /// Total degree over the masked variables; `-1` for zero.
    pub fn degree_in(&self, mask: &[bool]) -> i64 {
        self.terms
            .keys()
            .map(|m| m.degree_in(mask))
            .max()
            .unwrap_or(-1)
    }

    /// Lowest total degree over the masked variables; `-1` for zero.
    pub fn min_degree_in(&self, mask: &[bool]) -> i64 {
        self.terms
            .keys()
            .map(|m| m.degree_in(mask))
            .min()
            .unwrap_or(-1)
    }

    /// Exponent of variable `i` in every term is ≤ `max` and ≥ `min` over the poly.
    pub fn exponent_range(&self, i: usize) -> (i32, i32) {
        let mut lo = 0;
        let mut hi = 0;
        for m in self.terms.keys() {
            lo = lo.min(m.0[i]);
            hi = hi.max(m.0[i]);
        }
        (lo, hi)
    }

    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.0[i] != 0)
    }

    /// Indices of variables that occur in some term.
    pub fn support(&self) -> Vec<usize> {
        (0..self.vars.len()).filter(|&i| self.involves(i)).collect()
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_chart(&self, other: &Poly) -> Result<()> {
        if self.vars == other.vars {
            Ok(())
        } else {
            Err(Error::ChartMismatch(format!(
                "[{}] vs [{}]",
                self.vars.names().join(","),
                other.vars.names().join(",")
            )))
        }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.check_chart(other)?;
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.check_chart(other)?;
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), -c.clone());
        }
        Ok(r)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_chart(other)?;
        let mut r = Poly::zero(&self.vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                r.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(r)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.vars);
        }
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Multiply by a single monomial.
    pub fn shift(&self, m: &Monomial) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.mul(m), v.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut result = Poly::one(&self.vars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Formal partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Poly {
        let mut r = Poly::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e != 0 {
                let mut m2 = m.clone();
                m2.0[i] -= 1;
                r.add_term(m2, c * rat(e as i64));
            }
        }
        r
    }

    /// Derivative by variable name.
    pub fn derivative_by(&self, name: &str) -> Result<Poly> {
        let i = self
            .vars
            .index(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(self.derivative(i))
    }

    /// Exact value at a point given for every variable, in chart order.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.vars.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vars.len(),
                got: point.len(),
            });
        }
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let x = &point[i];
                if e < 0 && x.is_zero() {
                    return Err(Error::DivisionByZero(self.vars.name(i).to_string()));
                }
                v *= pow_rat(x, e);
            }
            total += v;
        }
        Ok(total)
    }

    /// Exact value under a name → value assignment.
    pub fn evaluate(&self, point: &BTreeMap<String, Rational>) -> Result<Rational> {
        let mut values = Vec::with_capacity(self.vars.len());
        for (i, name) in self.vars.names().iter().enumerate() {
            match point.get(name) {
                Some(v) => values.push(v.clone()),
                None if !self.involves(i) => values.push(Rational::zero()),
                None => return Err(Error::MissingBinding(name.clone())),
            }
        }
        self.eval(&values)
    }

    /// Substitute `value` for variable `i`. The variable must occur with
    /// non-negative exponents only.
    pub fn substitute(&self, i: usize, value: &Poly) -> Poly {
        assert_eq!(self.vars, value.vars, "substitute: chart mismatch");
        let mut powers: Vec<Poly> = vec![Poly::one(&self.vars)];
        let mut r = Poly::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            assert!(
                e >= 0,
                "cannot substitute into a negative power of {}",
                self.vars.name(i)
            );
            while powers.len() <= e as usize {
                let next = powers.last().unwrap() * value;
                powers.push(next);
            }
            let mut rest = m.clone();
            rest.0[i] = 0;
            let part = powers[e as usize].shift(&rest).scale(c);
            for (m2, c2) in part.terms {
                r.add_term(m2, c2);
            }
        }
        r
    }

    /// Substitute several variables simultaneously.
    pub fn substitute_many(&self, subs: &[(usize, Poly)]) -> Poly {
        if subs.is_empty() {
            return self.clone();
        }
        let mut r = Poly::zero(&self.vars);
        let mut cache: BTreeMap<(usize, i32), Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut rest = m.clone();
            let mut acc = Poly::constant(&self.vars, c.clone());
            for (i, v) in subs {
                let e = m.0[*i];
                if e == 0 {
                    continue;
                }
                assert!(e > 0, "cannot substitute into a negative power");
                rest.0[*i] = 0;
                let p = cache
                    .entry((*i, e))
                    .or_insert_with(|| v.pow(e as u32))
                    .clone();
                acc = &acc * &p;
            }
            for (m2, c2) in acc.shift(&rest).terms {
                r.add_term(m2, c2);
            }
        }
        r
    }

    /// Rewrite over another variable list, matching by name.
    pub fn embed(&self, target: &Vars) -> Result<Poly> {
        if &self.vars == target {
            return Ok(self.clone());
        }
        let map: Vec<Option<usize>> = self.vars.names().iter().map(|n| target.index(n)).collect();
        let mut r = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0; target.len()];
            for (i, &x) in m.0.iter().enumerate() {
                if x != 0 {
                    match map[i] {
                        Some(j) => e[j] = x,
                        None => return Err(Error::UnknownVariable(self.vars.name(i).to_string())),
                    }
                }
            }
            r.add_term(Monomial(e), c.clone());
        }
        Ok(r)
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    /// Split as `a * x_i + b` when the variable occurs at most linearly.
    pub fn linear_split(&self, i: usize) -> Option<(Poly, Poly)> {
        let mut a = Poly::zero(&self.vars);
        let mut b = Poly::zero(&self.vars);
        for (m, c) in &self.terms {
            match m.0[i] {
                0 => b.add_term(m.clone(), c.clone()),
                1 => {
                    let mut m2 = m.clone();
                    m2.0[i] = 0;
                    a.add_term(m2, c.clone());
                }
                _ => return None,
            }
        }
        Some((a, b))
    }

    /// Coefficient of `x_i^k` viewing the poly as univariate in `x_i`.
    pub fn coefficient_of_power(&self, i: usize, k: i32) -> Poly {
        let mut r = Poly::zero(&self.vars);
        for (m, c) in &self.terms {
            if m.0[i] == k {
                let mut m2 = m.clone();
                m2.0[i] = 0;
                r.add_term(m2, c.clone());
            }
        }
        r
    }

    /// Exponentwise minimum of negative exponents: the monomial that clears
    /// all denominators when multiplied in.
    pub fn denominator_monomial(&self) -> Monomial {
        let mut e = vec![0; self.vars.len()];
        for m in self.terms.keys() {
            for (i, &x) in m.0.iter().enumerate() {
                if x < 0 {
                    e[i] = e[i].max(-x);
                }
            }
        }
        Monomial(e)
    }

    pub fn has_negative_exponents(&self) -> bool {
        self.terms.keys().any(|m| m.0.iter().any(|&e| e < 0))
    }

    /// Is this a single nonzero term in the masked variables only.
    pub fn is_unit(&self, unit_vars: &[bool]) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .keys()
                .all(|m| m.0.iter().zip(unit_vars).all(|(&e, &u)| e == 0 || u))
    }

    /// Inverse of a unit.
    pub fn unit_inverse(&self) -> Option<Poly> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        Some(Poly::monomial(&self.vars, m.inverse(), c.recip()))
    }

    /// Integer content makes every coefficient integral with gcd 1 and the
    /// leading coefficient positive; returns the scaled poly.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut l = BigInt::one();
        for c in self.terms.values() {
            l = num_integer::Integer::lcm(&l, c.denom());
        }
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            let n = c.numer() * (&l / c.denom());
            g = num_integer::Integer::gcd(&g, &n);
        }
        let mut s = Rational::new(l, g);
        if self.leading().unwrap().1.is_negative() {
            s = -s;
        }
        self.scale(&s)
    }

    pub fn max_abs_coefficient_bits(&self) -> u64 {
        self.terms
            .values()
            .map(|c| c.numer().bits().max(c.denom().bits()))
            .max()
            .unwrap_or(0)
    }
}

fn pow_rat(x: &Rational, e: i32) -> Rational {
    let r = num_traits::pow(x.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        r.recip()
    } else {
        r
    }
}

/// Convert a small rational to `f64` for diagnostics only.
pub fn approx(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl std::ops::$tr<&Poly> for &Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                self.$f(rhs).expect("polynomials over different charts")
            }
        }
        impl std::ops::$tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$f(&rhs).expect("polynomials over different charts")
            }
        }
        impl std::ops::$tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$f(rhs).expect("polynomials over different charts")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

impl std::ops::Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::poly_to_string(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Vars {
        Vars::new(&["x", "y"])
    }

    #[test]
    fn grlex_order_prefers_degree_then_earlier_variable() {
        let a = Monomial(vec![2, 0]);
        let b = Monomial(vec![1, 1]);
        let c = Monomial(vec![0, 3]);
        assert!(a > b);
        assert!(c > a);
    }

    #[test]
    fn derivative_of_x2y() {
        let v = xy();
        let p = parse("x^2*y", &v).unwrap();
        assert_eq!(p.derivative(0), parse("2*x*y", &v).unwrap());
    }

    #[test]
    fn difference_of_squares() {
        let v = xy();
        let x = Poly::var(&v, 0);
        let one = Poly::one(&v);
        let p = &(&x + &one) * &(&x - &one);
        let expected = Poly::from_terms(
            &v,
            [
                (Monomial(vec![2, 0]), rat(1)),
                (Monomial(vec![0, 0]), rat(-1)),
            ],
        );
        assert_eq!(p, expected);
    }

    #[test]
    fn evaluate_x2_plus_y() {
        let v = xy();
        let p = parse("x^2 + y", &v).unwrap();
        let mut pt = BTreeMap::new();
        pt.insert("x".to_string(), rat(2));
        pt.insert("y".to_string(), rat(3));
        assert_eq!(p.evaluate(&pt).unwrap(), rat(7));
        pt.remove("y");
        assert!(matches!(p.evaluate(&pt), Err(Error::MissingBinding(_))));
    }

    #[test]
    fn substitution_matches_expansion() {
        let v = xy();
        let p = parse("x^2*y + x", &v).unwrap();
        let s = parse("y + 1", &v).unwrap();
        let r = p.substitute(0, &s);
        assert_eq!(r, parse("(y+1)^2*y + y + 1", &v).unwrap());
        assert_eq!(p.substitute_many(&[(0, s)]), r);
    }

    #[test]
    fn laurent_units_invert() {
        let v = Vars::new(&["m", "x"]);
        let m = parse("2*m", &v).unwrap();
        assert!(m.is_unit(&[true, false]));
        assert!(!parse("x", &v).unwrap().is_unit(&[true, false]));
        let inv = m.unit_inverse().unwrap();
        assert_eq!(&m * &inv, Poly::one(&v));
    }

    #[test]
    fn embed_by_name() {
        let v = xy();
        let w = Vars::new(&["y", "z", "x"]);
        let p = parse("x*y^2 + 3", &v).unwrap();
        let q = p.embed(&w).unwrap();
        assert_eq!(q, parse("x*y^2 + 3", &w).unwrap());
        let r = q.embed(&Vars::new(&["y"]));
        assert!(r.is_err());
    }

    #[test]
    fn chart_mismatch_is_an_error() {
        let a = Poly::var(&xy(), 0);
        let b = Poly::var(&Vars::new(&["x", "z"]), 0);
        assert!(matches!(a.try_add(&b), Err(Error::ChartMismatch(_))));
    }

    #[test]
    fn primitive_normalizes_content() {
        let v = xy();
        let p = parse("-2/3*x + 4/9*y", &v).unwrap();
        assert_eq!(p.primitive(), parse("3*x - 2*y", &v).unwrap());
    }
}
