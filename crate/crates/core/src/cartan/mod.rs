//! Exterior calculus on a single coordinate chart.
//!
//! Forms are indexed by strictly increasing tuples of chart positions.
//! Parameter variables never appear in an index tuple: `d` treats them as
//! constants, while the coefficient polynomials may depend on them.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::symexpr::{parse_combination, rat, BasisKind, Poly, Rational, Vars};

/// Coordinate chart: ordered variables, some of which are parameters.
#[derive(Clone, Debug)]
pub struct Chart {
    pub name: String,
    vars: Vars,
    params: Vec<bool>,
}

impl PartialEq for Chart {
    fn eq(&self, other: &Chart) -> bool {
        self.vars == other.vars && self.params == other.params
    }
}

impl Eq for Chart {}

impl Chart {
    /// A chart over `vars` where the names listed in `params` are constants.
    pub fn new<S: AsRef<str>, T: AsRef<str>>(
        name: &str,
        vars: &[S],
        params: &[T],
    ) -> Result<Chart> {
        let names: Vec<String> = vars.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::Model(format!("duplicate variable '{n}'")));
            }
        }
        let mut mask = vec![false; names.len()];
        for p in params {
            match names.iter().position(|n| n == p.as_ref()) {
                Some(i) => mask[i] = true,
                None => return Err(Error::UnknownVariable(p.as_ref().to_string())),
            }
        }
        Ok(Chart {
            name: name.to_string(),
            vars: Vars::new(&names),
            params: mask,
        })
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn name_of(&self, i: usize) -> &str {
        self.vars.name(i)
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.vars
            .index(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn is_param(&self, i: usize) -> bool {
        self.params[i]
    }

    pub fn param_mask(&self) -> &[bool] {
        &self.params
    }

    /// Mask of dynamical (non-parameter) variables.
    pub fn dynamic_mask(&self) -> Vec<bool> {
        self.params.iter().map(|p| !p).collect()
    }

    /// Positions of dynamical variables in chart order.
    pub fn dynamic(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.params[i]).collect()
    }

    pub fn parameters(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.params[i]).collect()
    }

    pub fn dim(&self) -> usize {
        self.params.iter().filter(|p| !**p).count()
    }

    /// Names of the dynamical variables.
    pub fn dynamic_names(&self) -> Vec<String> {
        self.dynamic()
            .iter()
            .map(|&i| self.name_of(i).to_string())
            .collect()
    }

    pub fn parameter_names(&self) -> Vec<String> {
        self.parameters()
            .iter()
            .map(|&i| self.name_of(i).to_string())
            .collect()
    }

    /// The same chart with extra variables appended.
    pub fn extended<S: AsRef<str>>(
        &self,
        name: &str,
        dynamic: &[S],
        params: &[S],
    ) -> Result<Chart> {
        let mut vars: Vec<String> = self.vars.names().to_vec();
        vars.extend(dynamic.iter().map(|s| s.as_ref().to_string()));
        vars.extend(params.iter().map(|s| s.as_ref().to_string()));
        let mut p: Vec<String> = self.parameter_names();
        p.extend(params.iter().map(|s| s.as_ref().to_string()));
        Chart::new(name, &vars, &p)
    }

    /// The chart with the given variables removed.
    pub fn without(&self, name: &str, drop: &[usize]) -> Chart {
        let keep: Vec<usize> = (0..self.len()).filter(|i| !drop.contains(i)).collect();
        let vars: Vec<String> = keep.iter().map(|&i| self.name_of(i).to_string()).collect();
        let params: Vec<String> = keep
            .iter()
            .filter(|&&i| self.params[i])
            .map(|&i| self.name_of(i).to_string())
            .collect();
        Chart::new(name, &vars, &params).expect("subchart of a valid chart")
    }

    pub fn poly(&self, text: &str) -> Result<Poly> {
        Ok(crate::symexpr::parse(text, &self.vars)?)
    }

    pub fn zero(&self) -> Poly {
        Poly::zero(&self.vars)
    }

    pub fn constant(&self, c: Rational) -> Poly {
        Poly::constant(&self.vars, c)
    }

    pub fn var(&self, i: usize) -> Poly {
        Poly::var(&self.vars, i)
    }

    /// Is `p` free of dynamical variables (parameters allowed).
    pub fn is_parametric_constant(&self, p: &Poly) -> bool {
        p.terms().all(|(m, _)| {
            m.0.iter()
                .enumerate()
                .all(|(i, &e)| e == 0 || self.params[i])
        })
    }

    fn check(&self, other: &Chart) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ChartMismatch(format!(
                "chart '{}' vs chart '{}'",
                self.name, other.name
            )))
        }
    }

    fn check_basis(&self, i: usize) -> Result<()> {
        if self.params[i] {
            Err(Error::Model(format!(
                "'{}' is a parameter and has no differential",
                self.name_of(i)
            )))
        } else {
            Ok(())
        }
    }
}

/// Differential k-form with polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffForm {
    chart: Chart,
    degree: usize,
    comps: BTreeMap<Vec<usize>, Poly>,
}

/// Sort `idx` in place, returning the permutation sign or `None` on a repeat.
fn sort_with_sign(idx: &mut [usize]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

impl DiffForm {
    pub fn zero(chart: &Chart, degree: usize) -> DiffForm {
        DiffForm {
            chart: chart.clone(),
            degree,
            comps: BTreeMap::new(),
        }
    }

    /// A 0-form.
    pub fn function(chart: &Chart, f: Poly) -> DiffForm {
        let mut w = DiffForm::zero(chart, 0);
        w.add(vec![], f);
        w
    }

    /// The coordinate differential `dx_i`.
    pub fn dx(chart: &Chart, i: usize) -> DiffForm {
        let mut w = DiffForm::zero(chart, 1);
        w.add(vec![i], chart.constant(Rational::one()));
        w
    }

    /// Build from (index list, coefficient) pairs in any order.
    pub fn from_components(
        chart: &Chart,
        degree: usize,
        comps: Vec<(Vec<usize>, Poly)>,
    ) -> Result<DiffForm> {
        if degree > chart.dim() {
            return Err(Error::InvalidDegree(format!(
                "degree {degree} exceeds dimension {}",
                chart.dim()
            )));
        }
        let mut w = DiffForm::zero(chart, degree);
        for (mut idx, c) in comps {
            if idx.len() != degree {
                return Err(Error::InvalidDegree(format!(
                    "component of length {} in a {degree}-form",
                    idx.len()
                )));
            }
            for &i in &idx {
                if i >= chart.len() {
                    return Err(Error::DimensionMismatch {
                        expected: chart.len(),
                        got: i + 1,
                    });
                }
                chart.check_basis(i)?;
            }
            let c = c.embed(chart.vars())?;
            if let Some(s) = sort_with_sign(&mut idx) {
                w.add(idx, c.scale(&rat(s)));
            }
        }
        Ok(w)
    }

    /// Parse text such as `2*m2 dx2^du2 + dx2^dy2`.
    pub fn parse(chart: &Chart, text: &str) -> Result<DiffForm> {
        let terms = parse_combination(text, chart.vars(), BasisKind::Differential)?;
        let degree = terms.first().map(|t| t.basis.len()).unwrap_or(0);
        if terms.is_empty() {
            return Err(Error::Model(
                "a form expression needs at least one basis term to fix its degree".into(),
            ));
        }
        DiffForm::from_components(
            chart,
            degree,
            terms.into_iter().map(|t| (t.basis, t.coeff)).collect(),
        )
    }

    /// Parse with an explicit degree, so that `0` is accepted.
    pub fn parse_with_degree(chart: &Chart, degree: usize, text: &str) -> Result<DiffForm> {
        let terms = parse_combination(text, chart.vars(), BasisKind::Differential)?;
        DiffForm::from_components(
            chart,
            degree,
            terms.into_iter().map(|t| (t.basis, t.coeff)).collect(),
        )
    }

    fn add(&mut self, idx: Vec<usize>, c: Poly) {
        if c.is_zero() {
            return;
        }
        match self.comps.get_mut(&idx) {
            Some(v) => {
                let s = &*v + &c;
                if s.is_zero() {
                    self.comps.remove(&idx);
                } else {
                    *v = s;
                }
            }
            None => {
                self.comps.insert(idx, c);
            }
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly)> {
        self.comps.iter()
    }

    pub fn component(&self, idx: &[usize]) -> Poly {
        self.comps
            .get(idx)
            .cloned()
            .unwrap_or_else(|| self.chart.zero())
    }

    /// The coefficient of a 0-form.
    pub fn as_function(&self) -> Poly {
        self.component(&[])
    }

    pub fn scale_poly(&self, f: &Poly) -> DiffForm {
        let mut w = DiffForm::zero(&self.chart, self.degree);
        for (k, c) in &self.comps {
            w.add(k.clone(), c * f);
        }
        w
    }

    pub fn try_add(&self, other: &DiffForm) -> Result<DiffForm> {
        self.chart.check(&other.chart)?;
        if self.degree != other.degree {
            return Err(Error::InvalidDegree(format!(
                "adding a {}-form to a {}-form",
                self.degree, other.degree
            )));
        }
        let mut w = self.clone();
        for (k, c) in &other.comps {
            w.add(k.clone(), c.clone());
        }
        Ok(w)
    }

    pub fn try_sub(&self, other: &DiffForm) -> Result<DiffForm> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> DiffForm {
        self.scale_poly(&self.chart.constant(-Rational::one()))
    }

    /// Do all coefficients avoid the dynamical variables.
    pub fn is_constant_coefficient(&self) -> bool {
        self.comps
            .values()
            .all(|c| self.chart.is_parametric_constant(c))
    }

    /// Apply `f` to every coefficient.
    pub fn map_coefficients(&self, f: impl Fn(&Poly) -> Poly) -> DiffForm {
        let mut w = DiffForm::zero(&self.chart, self.degree);
        for (k, c) in &self.comps {
            w.add(k.clone(), f(c));
        }
        w
    }

    /// Rewrite on a chart that contains every variable this form uses.
    pub fn embed(&self, target: &Chart) -> Result<DiffForm> {
        let mut w = DiffForm::zero(target, self.degree);
        for (k, c) in &self.comps {
            let mut idx = Vec::with_capacity(k.len());
            for &i in k {
                let j = target.index(self.chart.name_of(i))?;
                target.check_basis(j)?;
                idx.push(j);
            }
            let s = sort_with_sign(&mut idx).expect("distinct indices");
            w.add(idx, c.embed(target.vars())?.scale(&rat(s)));
        }
        Ok(w)
    }

    /// Pull back along the graph `x_v = g_v` for each pair, then drop the
    /// substituted variables. The values must not involve any substituted
    /// variable.
    pub fn pullback_graph(&self, subs: &[(usize, Poly)], target: &Chart) -> Result<DiffForm> {
        let diffs: BTreeMap<usize, DiffForm> = subs
            .iter()
            .map(|(v, g)| {
                (
                    *v,
                    exterior_derivative(&DiffForm::function(&self.chart, g.clone())),
                )
            })
            .collect();
        let mut acc = DiffForm::zero(&self.chart, self.degree);
        for (k, c) in &self.comps {
            let mut term = DiffForm::function(&self.chart, c.substitute_many(subs));
            for &i in k {
                let factor = match diffs.get(&i) {
                    Some(dg) => dg.clone(),
                    None => DiffForm::dx(&self.chart, i),
                };
                term = wedge(&term, &factor)?;
            }
            acc = acc.try_add(&term)?;
        }
        acc.embed(target)
    }
}

impl fmt::Display for DiffForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return f.write_str("0");
        }
        if self.degree == 0 {
            return write!(f, "{}", self.as_function());
        }
        let mut first = true;
        for (k, c) in &self.comps {
            let basis: Vec<String> = k
                .iter()
                .map(|&i| format!("d{}", self.chart.name_of(i)))
                .collect();
            write_term(f, first, c, &basis.join("^"))?;
            first = false;
        }
        Ok(())
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, first: bool, c: &Poly, basis: &str) -> fmt::Result {
    let (neg, text) = c.coefficient_text();
    if first {
        if neg {
            f.write_str("-")?;
        }
    } else if neg {
        f.write_str(" - ")?;
    } else {
        f.write_str(" + ")?;
    }
    match text {
        Some(t) => write!(f, "{t} {basis}"),
        None => f.write_str(basis),
    }
}

/// Vector field with polynomial components along dynamical variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    chart: Chart,
    comps: BTreeMap<usize, Poly>,
}

impl VectorField {
    pub fn zero(chart: &Chart) -> VectorField {
        VectorField {
            chart: chart.clone(),
            comps: BTreeMap::new(),
        }
    }

    /// The coordinate field `∂/∂x_i`.
    pub fn coordinate(chart: &Chart, i: usize) -> VectorField {
        let mut v = VectorField::zero(chart);
        v.set(i, chart.constant(Rational::one()));
        v
    }

    pub fn from_components(chart: &Chart, comps: Vec<(usize, Poly)>) -> Result<VectorField> {
        let mut v = VectorField::zero(chart);
        for (i, c) in comps {
            if i >= chart.len() {
                return Err(Error::DimensionMismatch {
                    expected: chart.len(),
                    got: i + 1,
                });
            }
            chart.check_basis(i)?;
            let c = c.embed(chart.vars())?;
            let cur = v.component(i);
            v.set(i, &cur + &c);
        }
        Ok(v)
    }

    /// Parse text such as `-y2 d/dx2 + x2 d/dy2`.
    pub fn parse(chart: &Chart, text: &str) -> Result<VectorField> {
        let terms = parse_combination(text, chart.vars(), BasisKind::Derivation)?;
        VectorField::from_components(
            chart,
            terms.into_iter().map(|t| (t.basis[0], t.coeff)).collect(),
        )
    }

    /// Constant field with the given components along the dynamical variables.
    pub fn from_dynamic_vector(chart: &Chart, v: &[Rational]) -> VectorField {
        let dynv = chart.dynamic();
        assert_eq!(
            dynv.len(),
            v.len(),
            "vector length does not match chart dimension"
        );
        let mut f = VectorField::zero(chart);
        for (k, &i) in dynv.iter().enumerate() {
            f.set(i, chart.constant(v[k].clone()));
        }
        f
    }

    pub fn set(&mut self, i: usize, c: Poly) {
        if c.is_zero() {
            self.comps.remove(&i);
        } else {
            self.comps.insert(i, c);
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn component(&self, i: usize) -> Poly {
        self.comps
            .get(&i)
            .cloned()
            .unwrap_or_else(|| self.chart.zero())
    }

    pub fn components(&self) -> impl Iterator<Item = (&usize, &Poly)> {
        self.comps.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Directional derivative `X(f)`.
    pub fn apply(&self, f: &Poly) -> Poly {
        let mut r = self.chart.zero();
        for (&i, c) in &self.comps {
            let df = f.derivative(i);
            if !df.is_zero() {
                r = &r + &(c * &df);
            }
        }
        r
    }

    pub fn try_add(&self, other: &VectorField) -> Result<VectorField> {
        self.chart.check(&other.chart)?;
        let mut v = self.clone();
        for (&i, c) in &other.comps {
            let s = &v.component(i) + c;
            v.set(i, s);
        }
        Ok(v)
    }

    pub fn try_sub(&self, other: &VectorField) -> Result<VectorField> {
        self.try_add(&other.scale_poly(&self.chart.constant(-Rational::one())))
    }

    pub fn scale_poly(&self, f: &Poly) -> VectorField {
        let mut v = VectorField::zero(&self.chart);
        for (&i, c) in &self.comps {
            v.set(i, c * f);
        }
        v
    }

    pub fn map_components(&self, f: impl Fn(&Poly) -> Poly) -> VectorField {
        let mut v = VectorField::zero(&self.chart);
        for (&i, c) in &self.comps {
            v.set(i, f(c));
        }
        v
    }

    /// Rewrite on another chart by variable names.
    pub fn embed(&self, target: &Chart) -> Result<VectorField> {
        let mut v = VectorField::zero(target);
        for (&i, c) in &self.comps {
            let j = target.index(self.chart.name_of(i))?;
            target.check_basis(j)?;
            v.set(j, c.embed(target.vars())?);
        }
        Ok(v)
    }

    /// Components evaluated at a point, listed along the dynamical variables.
    pub fn at(&self, point: &[Rational]) -> Result<Vec<Rational>> {
        self.chart
            .dynamic()
            .iter()
            .map(|&i| match self.comps.get(&i) {
                Some(c) => c.eval(point),
                None => Ok(Rational::zero()),
            })
            .collect()
    }

    pub fn is_constant_coefficient(&self) -> bool {
        self.comps
            .values()
            .all(|c| self.chart.is_parametric_constant(c))
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (&i, c) in &self.comps {
            write_term(f, first, c, &format!("d/d{}", self.chart.name_of(i)))?;
            first = false;
        }
        Ok(())
    }
}

/// Exterior derivative.
pub fn exterior_derivative(w: &DiffForm) -> DiffForm {
    let chart = &w.chart;
    let mut out = DiffForm::zero(chart, w.degree + 1);
    for (idx, c) in &w.comps {
        for j in chart.dynamic() {
            if idx.contains(&j) {
                continue;
            }
            let dc = c.derivative(j);
            if dc.is_zero() {
                continue;
            }
            let before = idx.iter().filter(|&&i| i < j).count();
            let mut new = idx.clone();
            new.insert(before, j);
            let s = if before % 2 == 0 { 1 } else { -1 };
            out.add(new, dc.scale(&rat(s)));
        }
    }
    out
}

/// Interior product in the first slot.
pub fn interior(x: &VectorField, w: &DiffForm) -> Result<DiffForm> {
    x.chart.check(&w.chart)?;
    if w.degree == 0 {
        return Err(Error::InvalidDegree("interior product of a 0-form".into()));
    }
    let mut out = DiffForm::zero(&w.chart, w.degree - 1);
    for (idx, c) in &w.comps {
        for (p, &i) in idx.iter().enumerate() {
            if let Some(xi) = x.comps.get(&i) {
                let mut rest = idx.clone();
                rest.remove(p);
                let s = if p % 2 == 0 { 1 } else { -1 };
                out.add(rest, (xi * c).scale(&rat(s)));
            }
        }
    }
    Ok(out)
}

/// Wedge product.
pub fn wedge(a: &DiffForm, b: &DiffForm) -> Result<DiffForm> {
    a.chart.check(&b.chart)?;
    let degree = a.degree + b.degree;
    if degree > a.chart.dim() {
        return Err(Error::InvalidDegree(format!(
            "wedge of degree {degree} on a {}-dimensional chart",
            a.chart.dim()
        )));
    }
    let mut out = DiffForm::zero(&a.chart, degree);
    for (i1, c1) in &a.comps {
        for (i2, c2) in &b.comps {
            let mut idx: Vec<usize> = i1.iter().chain(i2.iter()).copied().collect();
            if let Some(s) = sort_with_sign(&mut idx) {
                out.add(idx, (c1 * c2).scale(&rat(s)));
            }
        }
    }
    Ok(out)
}

/// Lie derivative via `L_X = i_X d + d i_X`; on functions it is `X(f)`.
pub fn lie_derivative(x: &VectorField, w: &DiffForm) -> Result<DiffForm> {
    x.chart.check(&w.chart)?;
    if w.degree == 0 {
        return Ok(DiffForm::function(&w.chart, x.apply(&w.as_function())));
    }
    let a = interior(x, &exterior_derivative(w))?;
    let b = exterior_derivative(&interior(x, w)?);
    a.try_add(&b)
}

/// Lie bracket `[X, Y]^i = X(Y^i) - Y(X^i)`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField> {
    x.chart.check(&y.chart)?;
    let mut out = VectorField::zero(&x.chart);
    for i in x.chart.dynamic() {
        let c = &x.apply(&y.component(i)) - &y.apply(&x.component(i));
        out.set(i, c);
    }
    Ok(out)
}

/// First nonzero component of `d w`, for diagnostics.
pub fn closedness_defect(w: &DiffForm) -> Option<(String, String)> {
    let dw = exterior_derivative(w);
    dw.comps.iter().next().map(|(k, c)| {
        let name: Vec<String> = k
            .iter()
            .map(|&i| format!("d{}", w.chart.name_of(i)))
            .collect();
        (name.join("^"), c.to_string())
    })
}

/// Primitive of a closed 1-form by the radial homotopy formula, normalized
/// to vanish where every dynamical variable is zero.
pub fn integrate_closed_one_form(a: &DiffForm) -> Result<Poly> {
    if a.degree != 1 {
        return Err(Error::InvalidDegree(format!(
            "expected a 1-form, got degree {}",
            a.degree
        )));
    }
    if let Some((component, value)) = closedness_defect(a) {
        return Err(Error::NotClosed { component, value });
    }
    let chart = &a.chart;
    let dynm = chart.dynamic_mask();
    let mut f = chart.zero();
    for (idx, c) in &a.comps {
        let i = idx[0];
        let xi = chart.var(i);
        for (m, coef) in c.terms() {
            let k = m.degree_in(&dynm);
            let term = Poly::monomial(chart.vars(), m.clone(), coef / rat(k + 1));
            f = &f + &(&term * &xi);
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart(vars: &[&str], params: &[&str]) -> Chart {
        Chart::new("t", vars, params).unwrap()
    }

    #[test]
    fn d_of_x_dy() {
        let c = chart(&["x", "y"], &[]);
        let w = DiffForm::parse(&c, "x dy").unwrap();
        assert_eq!(
            exterior_derivative(&w),
            DiffForm::parse(&c, "dx^dy").unwrap()
        );
        assert!(exterior_derivative(&exterior_derivative(&w)).is_zero());
    }

    #[test]
    fn contraction_in_first_slot() {
        let c = chart(&["x", "y"], &[]);
        let w = DiffForm::parse(&c, "dx^dy").unwrap();
        let dx = VectorField::coordinate(&c, 0);
        assert_eq!(
            interior(&dx, &w).unwrap(),
            DiffForm::parse(&c, "dy").unwrap()
        );
        let dy = VectorField::coordinate(&c, 1);
        assert_eq!(
            interior(&dy, &w).unwrap(),
            DiffForm::parse(&c, "-dx").unwrap()
        );
        let f = DiffForm::function(&c, c.var(0));
        assert!(interior(&dx, &f).is_err());
    }

    #[test]
    fn wedge_expansion() {
        let c = chart(&["q", "p", "t"], &[]);
        let h = DiffForm::function(&c, c.poly("q^2 + p^2").unwrap());
        let dh = exterior_derivative(&h);
        let dt = DiffForm::dx(&c, 2);
        let w = wedge(&dh, &dt).unwrap();
        assert_eq!(w, DiffForm::parse(&c, "2*q dq^dt + 2*p dp^dt").unwrap());
        let dx = DiffForm::dx(&c, 0);
        assert!(wedge(&dx, &dx).unwrap().is_zero());
        let qp = DiffForm::parse(&c, "dq^dp").unwrap();
        assert_eq!(
            wedge(&qp, &dt).unwrap(),
            DiffForm::parse(&c, "dq^dp^dt").unwrap()
        );
    }

    #[test]
    fn bracket_component_formula() {
        let c = chart(&["x", "y"], &[]);
        let x = VectorField::parse(&c, "x d/dy").unwrap();
        let y = VectorField::parse(&c, "y d/dx").unwrap();
        assert_eq!(
            lie_bracket(&x, &y).unwrap(),
            VectorField::parse(&c, "x d/dx - y d/dy").unwrap()
        );
        let a = VectorField::coordinate(&c, 0);
        let b = VectorField::coordinate(&c, 1);
        assert!(lie_bracket(&a, &b).unwrap().is_zero());
    }

    #[test]
    fn radial_integration() {
        let c = chart(&["x", "y", "m"], &["m"]);
        let a = DiffForm::parse(&c, "2*x dx + 2*y dy").unwrap();
        assert_eq!(
            integrate_closed_one_form(&a).unwrap(),
            c.poly("x^2 + y^2").unwrap()
        );
        let b = DiffForm::parse(&c, "m*y dx + m*x dy").unwrap();
        assert_eq!(
            integrate_closed_one_form(&b).unwrap(),
            c.poly("m*x*y").unwrap()
        );
        let bad = DiffForm::parse(&c, "y dx").unwrap();
        match integrate_closed_one_form(&bad) {
            Err(Error::NotClosed { component, .. }) => assert_eq!(component, "dx^dy"),
            other => panic!("expected NotClosed, got {other:?}"),
        }
    }

    #[test]
    fn parameters_have_no_differential() {
        let c = chart(&["x", "m"], &["m"]);
        assert!(DiffForm::parse(&c, "dm").is_err());
        let w = DiffForm::parse(&c, "m*x dx").unwrap();
        assert!(exterior_derivative(&w).is_zero());
    }

    #[test]
    fn printing_round_trips() {
        let c = chart(&["x", "y", "z", "m"], &["m"]);
        let w = DiffForm::parse(&c, "-dx^dy + 2*m dy^dz - (x + y) dx^dz").unwrap();
        let s = w.to_string();
        assert_eq!(DiffForm::parse(&c, &s).unwrap(), w);
        let v = VectorField::parse(&c, "-y d/dx + (x+m) d/dy").unwrap();
        assert_eq!(VectorField::parse(&c, &v.to_string()).unwrap(), v);
    }

    #[test]
    fn graph_pullback_substitutes_differentials() {
        let c = chart(&["x", "y", "z"], &[]);
        let target = c.without("s", &[2]);
        let w = DiffForm::parse(&c, "dx^dz + z dx^dy").unwrap();
        let g = c.poly("x*y").unwrap();
        let pb = w.pullback_graph(&[(2, g)], &target).unwrap();
        assert_eq!(pb, DiffForm::parse(&target, "(x + x*y) dx^dy").unwrap());
    }
}
