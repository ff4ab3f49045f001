//! Exact linear algebra of degenerate forms on `Q^n`.
//!
//! [`LinForm`] is an alternating k-form stored by increasing index tuples.
//! [`Subspace`] keeps its basis in reduced row echelon form so that two
//! subspaces are equal exactly when their bases are.

pub mod elim;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::cartan::DiffForm;
use crate::error::{Error, Result};
use crate::symexpr::Rational;

pub use elim::{
    null_space, rank, ring_solve, ring_solve_relaxed, rref, solve, RelaxedSolve, RingSolve, Rref,
};

/// Alternating k-form on `Q^dim`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinForm {
    dim: usize,
    degree: usize,
    comps: BTreeMap<Vec<usize>, Rational>,
}

/// Sign of sorting `idx`, or `None` when an index repeats.
fn sort_sign(idx: &mut [usize]) -> Option<i32> {
    let mut s = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            s = -s;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(s)
    }
}

impl LinForm {
    pub fn zero(dim: usize, degree: usize) -> LinForm {
        LinForm {
            dim,
            degree,
            comps: BTreeMap::new(),
        }
    }

    /// Build from components in any index order; repeated indices vanish.
    pub fn from_components(
        dim: usize,
        degree: usize,
        comps: Vec<(Vec<usize>, Rational)>,
    ) -> Result<LinForm> {
        let mut f = LinForm::zero(dim, degree);
        for (mut idx, c) in comps {
            if idx.len() != degree || idx.iter().any(|&i| i >= dim) {
                return Err(Error::InvalidDegree(format!(
                    "bad index tuple {idx:?} for a {degree}-form on Q^{dim}"
                )));
            }
            if let Some(s) = sort_sign(&mut idx) {
                f.add(idx, if s > 0 { c } else { -c });
            }
        }
        Ok(f)
    }

    /// 2-form from an antisymmetric matrix.
    pub fn from_matrix(a: &[Vec<Rational>]) -> Result<LinForm> {
        let n = a.len();
        let mut f = LinForm::zero(n, 2);
        for i in 0..n {
            if a[i].len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: a[i].len(),
                });
            }
            if !a[i][i].is_zero() {
                return Err(Error::InvalidDegree("matrix is not antisymmetric".into()));
            }
            for j in (i + 1)..n {
                if a[i][j] != -a[j][i].clone() {
                    return Err(Error::InvalidDegree("matrix is not antisymmetric".into()));
                }
                f.add(vec![i, j], a[i][j].clone());
            }
        }
        Ok(f)
    }

    fn add(&mut self, idx: Vec<usize>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.comps.entry(idx.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.comps.remove(&idx);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Rational)> {
        self.comps.iter()
    }

    /// Value on a sorted tuple of basis vectors.
    pub fn component(&self, idx: &[usize]) -> Rational {
        self.comps.get(idx).cloned().unwrap_or_else(Rational::zero)
    }

    /// Full antisymmetric matrix of a 2-form.
    pub fn matrix(&self) -> Vec<Vec<Rational>> {
        assert_eq!(self.degree, 2, "matrix of a non-2-form");
        let mut a = vec![vec![Rational::zero(); self.dim]; self.dim];
        for (k, c) in &self.comps {
            a[k[0]][k[1]] = c.clone();
            a[k[1]][k[0]] = -c.clone();
        }
        a
    }

    /// Contraction `i(v)α` in the first slot.
    pub fn contract(&self, v: &[Rational]) -> LinForm {
        assert_eq!(v.len(), self.dim);
        assert!(self.degree > 0, "contraction of a scalar");
        let mut out = LinForm::zero(self.dim, self.degree - 1);
        for (idx, c) in &self.comps {
            for (p, &i) in idx.iter().enumerate() {
                if v[i].is_zero() {
                    continue;
                }
                let mut rest = idx.clone();
                rest.remove(p);
                let t = &v[i] * c;
                out.add(rest, if p % 2 == 0 { t } else { -t });
            }
        }
        out
    }

    /// `α(v_1, …, v_k)`.
    pub fn evaluate(&self, vs: &[Vec<Rational>]) -> Rational {
        assert_eq!(vs.len(), self.degree);
        let mut f = self.clone();
        for v in vs {
            f = f.contract(v);
        }
        f.component(&[])
    }

    /// Matrix of the map `v ↦ i(v)α`: rows indexed by (k−1)-tuples.
    pub fn contraction_matrix(&self) -> Vec<Vec<Rational>> {
        let mut rows: BTreeMap<Vec<usize>, Vec<Rational>> = BTreeMap::new();
        for (idx, c) in &self.comps {
            for (p, &i) in idx.iter().enumerate() {
                let mut rest = idx.clone();
                rest.remove(p);
                let row = rows
                    .entry(rest)
                    .or_insert_with(|| vec![Rational::zero(); self.dim]);
                if p % 2 == 0 {
                    row[i] += c;
                } else {
                    row[i] -= c;
                }
            }
        }
        rows.into_values().collect()
    }

    /// Rank of a 2-form.
    pub fn rank(&self) -> usize {
        self.dim - kernel(self).dim()
    }
}

impl fmt::Display for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree == 2 {
            for row in self.matrix() {
                let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
                writeln!(f, "[{}]", cells.join(" "))?;
            }
            return Ok(());
        }
        let parts: Vec<String> = self
            .comps
            .iter()
            .map(|(k, c)| {
                let b: Vec<String> = k.iter().map(|i| format!("e{}", i + 1)).collect();
                format!("{c} {}", b.join("^"))
            })
            .collect();
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// Linear subspace of `Q^n` with an RREF basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<Rational>>,
}

impl Subspace {
    pub fn zero(n: usize) -> Subspace {
        Subspace {
            ambient_dim: n,
            basis: Vec::new(),
        }
    }

    pub fn full(n: usize) -> Subspace {
        let basis = (0..n).map(|i| unit(n, i)).collect();
        Subspace {
            ambient_dim: n,
            basis,
        }
    }

    /// Span of arbitrary vectors.
    pub fn span(n: usize, vectors: &[Vec<Rational>]) -> Subspace {
        for v in vectors {
            assert_eq!(v.len(), n, "vector length does not match ambient dimension");
        }
        let r = rref(vectors, n);
        Subspace {
            ambient_dim: n,
            basis: r.rows,
        }
    }

    /// Span of coordinate vectors.
    pub fn coordinate(n: usize, idx: &[usize]) -> Subspace {
        let vs: Vec<Vec<Rational>> = idx.iter().map(|&i| unit(n, i)).collect();
        Subspace::span(n, &vs)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        let mut vs = self.basis.clone();
        vs.push(v.to_vec());
        rank(&vs, self.ambient_dim) == self.dim()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient_dim, &vs)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        let n = self.ambient_dim;
        let a = self.dim();
        let b = other.dim();
        if a == 0 || b == 0 {
            return Subspace::zero(n);
        }
        let mut rows = vec![vec![Rational::zero(); a + b]; n];
        for (j, v) in self.basis.iter().enumerate() {
            for i in 0..n {
                rows[i][j] = v[i].clone();
            }
        }
        for (j, v) in other.basis.iter().enumerate() {
            for i in 0..n {
                rows[i][a + j] = -v[i].clone();
            }
        }
        let ns = null_space(&rows, a + b);
        let vs: Vec<Vec<Rational>> = ns
            .iter()
            .map(|c| {
                let mut v = vec![Rational::zero(); n];
                for (j, bv) in self.basis.iter().enumerate() {
                    for i in 0..n {
                        v[i] += &c[j] * &bv[i];
                    }
                }
                v
            })
            .collect();
        Subspace::span(n, &vs)
    }

    /// Vectors of `self` completing a basis of `sub` (which must lie inside
    /// `self`) to a basis of `self`, chosen greedily from the RREF basis.
    pub fn complement_of(&self, sub: &Subspace) -> Vec<Vec<Rational>> {
        let mut acc = sub.basis.clone();
        let mut out = Vec::new();
        for v in &self.basis {
            let mut trial = acc.clone();
            trial.push(v.clone());
            if rank(&trial, self.ambient_dim) > acc.len() {
                acc = trial;
                out.push(v.clone());
            }
        }
        out
    }

    /// Coordinates of `v` in this basis; `None` when `v` is outside.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        let n = self.ambient_dim;
        let rows: Vec<Vec<Rational>> = (0..n)
            .map(|i| self.basis.iter().map(|b| b[i].clone()).collect())
            .collect();
        if self.basis.is_empty() {
            return if v.iter().all(|x| x.is_zero()) {
                Some(Vec::new())
            } else {
                None
            };
        }
        solve(&rows, v)
    }

    /// Image of a subspace given in basis coordinates of `self`.
    pub fn lift(&self, coords: &[Vec<Rational>]) -> Subspace {
        let vs: Vec<Vec<Rational>> = coords
            .iter()
            .map(|c| combine(&self.basis, c, self.ambient_dim))
            .collect();
        Subspace::span(self.ambient_dim, &vs)
    }
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

fn combine(basis: &[Vec<Rational>], c: &[Rational], n: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    for (b, x) in basis.iter().zip(c) {
        if x.is_zero() {
            continue;
        }
        for i in 0..n {
            v[i] += x * &b[i];
        }
    }
    v
}

/// `ker α = {v : i(v)α = 0}`.
pub fn kernel(alpha: &LinForm) -> Subspace {
    if alpha.degree == 0 {
        return Subspace::full(alpha.dim);
    }
    let m = alpha.contraction_matrix();
    Subspace::span(alpha.dim, &null_space(&m, alpha.dim))
}

/// `S^⊥ = {u : i(u)i(v)α = 0 for all v ∈ S}`.
pub fn perp(alpha: &LinForm, s: &Subspace) -> Result<Subspace> {
    if s.ambient_dim != alpha.dim {
        return Err(Error::DimensionMismatch {
            expected: alpha.dim,
            got: s.ambient_dim,
        });
    }
    if alpha.degree < 2 {
        return Err(Error::InvalidDegree(
            "perp needs a form of degree at least 2".into(),
        ));
    }
    let mut rows = Vec::new();
    for v in &s.basis {
        rows.extend(alpha.contract(v).contraction_matrix());
    }
    Ok(Subspace::span(alpha.dim, &null_space(&rows, alpha.dim)))
}

/// `j*α` on `N`, in the coordinates of `N`'s basis.
pub fn restrict(alpha: &LinForm, n: &Subspace) -> Result<LinForm> {
    if n.ambient_dim != alpha.dim {
        return Err(Error::DimensionMismatch {
            expected: alpha.dim,
            got: n.ambient_dim,
        });
    }
    Ok(pull_back(alpha, &n.basis))
}

/// Pull back along the linear map whose columns are `vectors`.
pub fn pull_back(alpha: &LinForm, vectors: &[Vec<Rational>]) -> LinForm {
    let m = vectors.len();
    let mut out = LinForm::zero(m, alpha.degree);
    if alpha.degree > m {
        return out;
    }
    for idx in increasing_tuples(m, alpha.degree) {
        let vs: Vec<Vec<Rational>> = idx.iter().map(|&i| vectors[i].clone()).collect();
        let c = alpha.evaluate(&vs);
        out.add(idx, c);
    }
    out
}

/// All strictly increasing k-tuples from `0..n`.
pub fn increasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Everything the linear reduction computes.
#[derive(Clone, Debug)]
pub struct LinearReduction {
    /// `N = S^⊥`.
    pub n: Subspace,
    /// `α_N` in the coordinates of `N`'s basis.
    pub alpha_n: LinForm,
    /// `ker α_N`, in ambient coordinates.
    pub kernel_of_alpha_n: Subspace,
    pub n_cap_s: Subspace,
    /// Representatives of `N/(N∩S)`, ambient coordinates.
    pub intermediate_basis: Vec<Vec<Rational>>,
    /// `α_1` on `N/(N∩S)`, with `α_N = π_1* α_1`.
    pub alpha1: LinForm,
    /// Representatives of `N/ker α_N`, ambient coordinates.
    pub quotient_basis: Vec<Vec<Rational>>,
    pub quotient_dim: usize,
    /// Reduced form on `N/ker α_N`; always nondegenerate.
    pub reduced_form: LinForm,
    /// `ker α_N = N∩S`: the intermediate form `α_1` is already nondegenerate.
    pub is_symplectic: bool,
    /// For 2-forms: whether `ker α_N = ker α + N∩S` held.
    pub kernel_decomposition_verified: Option<bool>,
}

/// Linear reduction of `α` by `S`.
pub fn linear_reduce(alpha: &LinForm, s: &Subspace) -> Result<LinearReduction> {
    if alpha.degree < 2 {
        return Err(Error::InvalidDegree(
            "linear reduction needs degree at least 2".into(),
        ));
    }
    let n = perp(alpha, s)?;
    let alpha_n = restrict(alpha, &n)?;
    let ker_n_local = kernel(&alpha_n);
    let kernel_of_alpha_n = n.lift(ker_n_local.basis());
    let n_cap_s = n.intersect(s);
    let intermediate_basis = n.complement_of(&n_cap_s);
    let alpha1 = pull_back(alpha, &intermediate_basis);
    let quotient_basis = n.complement_of(&kernel_of_alpha_n);
    let reduced_form = pull_back(alpha, &quotient_basis);
    let is_symplectic = kernel_of_alpha_n == n_cap_s;
    let kernel_decomposition_verified = if alpha.degree == 2 {
        Some(kernel_of_alpha_n == kernel(alpha).sum(&n_cap_s))
    } else {
        None
    };
    Ok(LinearReduction {
        quotient_dim: quotient_basis.len(),
        n,
        alpha_n,
        kernel_of_alpha_n,
        n_cap_s,
        intermediate_basis,
        alpha1,
        quotient_basis,
        reduced_form,
        is_symplectic,
        kernel_decomposition_verified,
    })
}

/// Evaluate a form field at a point (values for every chart variable, in
/// chart order). Indices refer to positions among the dynamical variables.
pub fn pointwise(w: &DiffForm, point: &[Rational]) -> Result<LinForm> {
    let chart = w.chart();
    if point.len() != chart.len() {
        return Err(Error::DimensionMismatch {
            expected: chart.len(),
            got: point.len(),
        });
    }
    let dynv = chart.dynamic();
    let pos: BTreeMap<usize, usize> = dynv.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let mut out = LinForm::zero(dynv.len(), w.degree());
    for (idx, c) in w.components() {
        let v = c.eval(point)?;
        out.add(idx.iter().map(|i| pos[i]).collect(), v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::Chart;
    use crate::symexpr::rat;

    fn sympl4() -> LinForm {
        LinForm::from_components(4, 2, vec![(vec![0, 2], rat(1)), (vec![1, 3], rat(1))]).unwrap()
    }

    fn vecs(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| rat(x)).collect())
            .collect()
    }

    #[test]
    fn kernel_of_zero_and_symplectic() {
        assert_eq!(kernel(&LinForm::zero(3, 2)).dim(), 3);
        assert_eq!(kernel(&sympl4()).dim(), 0);
    }

    #[test]
    fn perp_of_e1() {
        let s = Subspace::coordinate(4, &[0]);
        let n = perp(&sympl4(), &s).unwrap();
        assert_eq!(n, Subspace::coordinate(4, &[0, 1, 3]));
        assert_eq!(
            perp(&sympl4(), &Subspace::zero(4)).unwrap(),
            Subspace::full(4)
        );
    }

    #[test]
    fn restrict_to_perp() {
        let n = Subspace::coordinate(4, &[0, 1, 3]);
        let r = restrict(&sympl4(), &n).unwrap();
        let nonzero: Vec<_> = r.components().collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(nonzero[0], (&vec![1, 2], &rat(1)));
    }

    #[test]
    fn reduce_symplectic_by_line() {
        let s = Subspace::coordinate(4, &[0]);
        let red = linear_reduce(&sympl4(), &s).unwrap();
        assert_eq!(red.kernel_of_alpha_n, s);
        assert_eq!(red.n_cap_s, s);
        assert_eq!(red.quotient_dim, 2);
        assert!(red.is_symplectic);
        assert_eq!(kernel(&red.reduced_form).dim(), 0);
        assert_eq!(red.kernel_decomposition_verified, Some(true));
    }

    #[test]
    fn reduce_zero_form() {
        let red = linear_reduce(&LinForm::zero(3, 2), &Subspace::coordinate(3, &[1])).unwrap();
        assert_eq!(red.n.dim(), 3);
        assert_eq!(red.quotient_dim, 0);
    }

    #[test]
    fn degree_three_against_brute_force() {
        let alpha = LinForm::from_components(4, 3, vec![(vec![0, 1, 2], rat(1))]).unwrap();
        let s = Subspace::coordinate(4, &[3]);
        let red = linear_reduce(&alpha, &s).unwrap();
        // i(u)i(e4)α = 0 for every u since e4 never appears.
        assert_eq!(red.n, Subspace::full(4));
        assert_eq!(red.kernel_of_alpha_n, Subspace::coordinate(4, &[3]));
        assert_eq!(red.quotient_dim, 3);
        let r = &red.reduced_form;
        for i in 0..3 {
            let mut e = vec![rat(0); 3];
            e[i] = rat(1);
            assert!(!r.contract(&e).is_zero());
        }
    }

    #[test]
    fn intersection_and_sum() {
        let a = Subspace::span(3, &vecs(&[&[1, 1, 0], &[0, 0, 1]]));
        let b = Subspace::span(3, &vecs(&[&[1, 0, 0], &[0, 1, 0]]));
        let i = a.intersect(&b);
        assert_eq!(i, Subspace::span(3, &vecs(&[&[1, 1, 0]])));
        assert_eq!(a.sum(&b), Subspace::full(3));
    }

    #[test]
    fn pointwise_of_dh_dt() {
        let c = Chart::new("c", &["q", "t"], &[] as &[&str]).unwrap();
        let w = DiffForm::parse(&c, "2*q dq^dt").unwrap();
        let a = pointwise(&w, &[rat(1), rat(5)]).unwrap();
        assert_eq!(a.matrix(), vecs(&[&[0, 2], &[-2, 0]]));
    }
}
