//! Oracles shared by the integration tests. Everything here is written
//! against plain coefficient lists so that it does not go through the
//! library's own elimination or exterior calculus.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use presym::cartan::{Chart, DiffForm, VectorField};
use presym::sample::Sampler;
use presym::symexpr::{rat, Poly, Rational};

pub type Vector = Vec<Rational>;

// ---- linear algebra -------------------------------------------------------

/// Row echelon form by plain Gauss–Jordan; returns (rows, pivot columns).
pub fn echelon(rows: &[Vector], ncols: usize) -> (Vec<Vector>, Vec<usize>) {
    let mut m: Vec<Vector> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..ncols {
                    let v = &m[r][j] * &f;
                    m[i][j] = &m[i][j] - &v;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[Vector], ncols: usize) -> usize {
    echelon(rows, ncols).1.len()
}

/// Basis of `{x : rows · x = 0}`.
pub fn null_space(rows: &[Vector], ncols: usize) -> Vec<Vector> {
    let (m, pivots) = echelon(rows, ncols);
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::zero(); ncols];
        v[free] = Rational::one();
        for (row, &p) in m.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        out.push(v);
    }
    out
}

pub fn same_span(a: &[Vector], b: &[Vector], n: usize) -> bool {
    let mut both = a.to_vec();
    both.extend(b.iter().cloned());
    let r = rank(&both, n);
    rank(a, n) == r && rank(b, n) == r
}

pub fn combine(basis: &[Vector], coeffs: &[Rational], n: usize) -> Vector {
    let mut v = vec![Rational::zero(); n];
    for (b, c) in basis.iter().zip(coeffs) {
        for i in 0..n {
            v[i] = &v[i] + &(&b[i] * c);
        }
    }
    v
}

pub fn bilinear(a: &[Vector], x: &[Rational], y: &[Rational]) -> Rational {
    let mut s = Rational::zero();
    for i in 0..x.len() {
        for j in 0..y.len() {
            s = s + &x[i] * &a[i][j] * &y[j];
        }
    }
    s
}

/// Sign of the permutation sorting `idx`, with the sorted tuple; `None` on
/// a repeated index.
pub fn sort_sign(idx: &[usize]) -> Option<(i32, Vec<usize>)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((sign, v))
}

/// Alternating form given by its strictly increasing components.
#[derive(Clone, Debug)]
pub struct Alt {
    pub n: usize,
    pub k: usize,
    pub comps: BTreeMap<Vec<usize>, Rational>,
}

impl Alt {
    pub fn get(&self, idx: &[usize]) -> Rational {
        match sort_sign(idx) {
            None => Rational::zero(),
            Some((s, key)) => self
                .comps
                .get(&key)
                .map(|c| c * rat(s as i64))
                .unwrap_or_else(Rational::zero),
        }
    }

    /// Multilinear evaluation by summing over all index tuples.
    pub fn eval(&self, vs: &[Vector]) -> Rational {
        let mut total = Rational::zero();
        let mut idx = vec![0usize; self.k];
        loop {
            let c = self.get(&idx);
            if !c.is_zero() {
                let mut t = c;
                for (slot, &i) in idx.iter().enumerate() {
                    t = t * &vs[slot][i];
                }
                total = total + t;
            }
            let mut p = 0;
            loop {
                if p == self.k {
                    return total;
                }
                idx[p] += 1;
                if idx[p] < self.n {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
        }
    }

    /// Matrix of `v ↦ i(v)α`: one column per basis vector, one row per
    /// increasing `(k-1)`-tuple.
    pub fn contraction_columns(&self) -> Vec<Vector> {
        let tuples = increasing(self.n, self.k - 1);
        (0..self.n)
            .map(|i| {
                tuples
                    .iter()
                    .map(|t| {
                        let mut idx = vec![i];
                        idx.extend(t);
                        self.get(&idx)
                    })
                    .collect()
            })
            .collect()
    }
}

pub fn increasing(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in increasing(n, k - 1) {
        let start = rest.last().map(|&l| l + 1).unwrap_or(0);
        for i in start..n {
            let mut t = rest.clone();
            t.push(i);
            out.push(t);
        }
    }
    out
}

pub fn random_alt(rng: &mut Sampler, n: usize, k: usize, density: f64) -> Alt {
    let mut comps = BTreeMap::new();
    for t in increasing(n, k) {
        if rng.chance(density) {
            let c = rat(rng.int(-4, 4));
            if !c.is_zero() {
                comps.insert(t, c);
            }
        }
    }
    Alt { n, k, comps }
}

/// Antisymmetric matrix, sometimes deliberately degenerate.
pub fn random_two_form(rng: &mut Sampler, n: usize) -> Vec<Vector> {
    if rng.chance(0.4) && n >= 2 {
        // Sum of m decomposable terms, 2m ≤ n: rank at most 2m.
        let m = 1 + rng.index((n / 2).max(1));
        let m = m.min(n / 2);
        let b: Vec<Vector> = (0..2 * m)
            .map(|_| (0..n).map(|_| rat(rng.int(-2, 2))).collect())
            .collect();
        let mut a = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Rational::zero();
                for r in 0..m {
                    s = s + &b[2 * r][i] * &b[2 * r + 1][j] - &b[2 * r + 1][i] * &b[2 * r][j];
                }
                a[i][j] = s;
            }
        }
        return a;
    }
    let mut a = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.chance(0.6) {
                let c = rat(rng.int(-3, 3));
                a[j][i] = -c.clone();
                a[i][j] = c;
            }
        }
    }
    a
}

pub fn random_subspace(rng: &mut Sampler, n: usize) -> Vec<Vector> {
    let s = rng.index(n + 1);
    (0..s)
        .map(|_| {
            if rng.chance(0.3) {
                let mut e = vec![Rational::zero(); n];
                e[rng.index(n)] = Rational::one();
                e
            } else {
                (0..n).map(|_| rat(rng.int(-2, 2))).collect()
            }
        })
        .collect()
}

/// The degree-2 decomposition computed from scratch:
/// `(ker α_N, ker α + N∩S, N, N∩S)`, each as a spanning list.
pub struct TwoFormOracle {
    pub ker_alpha_n: Vec<Vector>,
    pub ker_plus_cap: Vec<Vector>,
    pub n: Vec<Vector>,
    pub cap: Vec<Vector>,
}

pub fn two_form_oracle(a: &[Vector], s: &[Vector]) -> TwoFormOracle {
    let dim = a.len();
    // α(v, s_j) = Σ_i v_i (A s_j)_i
    let rows: Vec<Vector> = s
        .iter()
        .map(|sj| {
            (0..dim)
                .map(|i| (0..dim).map(|j| &a[i][j] * &sj[j]).sum())
                .collect()
        })
        .collect();
    let n = null_space(&rows, dim);
    let ker_alpha = null_space(a, dim);
    // N∩S: combinations of s that are in N.
    let m: Vec<Vector> = rows
        .iter()
        .map(|r| {
            s.iter()
                .map(|sl| (0..dim).map(|i| &r[i] * &sl[i]).sum())
                .collect()
        })
        .collect();
    let cap: Vec<Vector> = null_space(&m, s.len())
        .iter()
        .map(|c| combine(s, c, dim))
        .collect();
    // ker α_N: c with α(N c, N e_j) = 0 for every j.
    let gram: Vec<Vector> = (0..n.len())
        .map(|j| n.iter().map(|ni| bilinear(a, ni, &n[j])).collect())
        .collect();
    let ker_alpha_n: Vec<Vector> = null_space(&gram, n.len())
        .iter()
        .map(|c| combine(&n, c, dim))
        .collect();
    let mut ker_plus_cap = ker_alpha;
    ker_plus_cap.extend(cap.iter().cloned());
    TwoFormOracle {
        ker_alpha_n,
        ker_plus_cap,
        n,
        cap,
    }
}

// ---- polynomials and forms ------------------------------------------------

pub fn random_poly(rng: &mut Sampler, chart: &Chart, max_terms: usize, max_deg: usize) -> Poly {
    let n = chart.len();
    let mut p = chart.zero();
    for _ in 0..1 + rng.index(max_terms) {
        let mut t = chart.constant(rng.nonzero_rational());
        for _ in 0..rng.index(max_deg + 1) {
            t = &t * &chart.var(rng.index(n));
        }
        p = &p + &t;
    }
    p
}

pub fn random_form(rng: &mut Sampler, chart: &Chart, k: usize) -> DiffForm {
    let mut comps = Vec::new();
    for t in increasing(chart.len(), k) {
        if rng.chance(0.5) {
            comps.push((t, random_poly(rng, chart, 3, 2)));
        }
    }
    DiffForm::from_components(chart, k, comps).unwrap()
}

pub fn random_field(rng: &mut Sampler, chart: &Chart) -> VectorField {
    let mut comps = Vec::new();
    for i in 0..chart.len() {
        if rng.chance(0.7) {
            comps.push((i, random_poly(rng, chart, 3, 2)));
        }
    }
    VectorField::from_components(chart, comps).unwrap()
}

pub fn chart(n: usize) -> Chart {
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    Chart::new("R", &names, &[] as &[&str]).unwrap()
}

/// `X(f) = Σ X^m ∂_m f`.
fn apply(x: &VectorField, f: &Poly, n: usize) -> Poly {
    let mut out = Poly::zero(f.vars());
    for m in 0..n {
        out = &out + &(&x.component(m) * &f.derivative(m));
    }
    out
}

/// Lie derivative from the Leibniz rule
/// `L_X(w_I dx^I) = X(w_I) dx^I + w_I Σ_j dx^{i_1}∧…∧d(X^{i_j})∧…∧dx^{i_k}`,
/// returned as increasing components.
pub fn leibniz_lie(x: &VectorField, w: &DiffForm) -> BTreeMap<Vec<usize>, Poly> {
    let n = w.chart().len();
    let mut out: BTreeMap<Vec<usize>, Poly> = BTreeMap::new();
    let mut add = |idx: Vec<usize>, c: Poly| {
        if let Some((s, key)) = sort_sign(&idx) {
            let c = if s < 0 { -&c } else { c };
            let e = out.entry(key).or_insert_with(|| Poly::zero(c.vars()));
            *e = &*e + &c;
        }
    };
    for (idx, wi) in w.components() {
        add(idx.clone(), apply(x, wi, n));
        for slot in 0..idx.len() {
            let xi = x.component(idx[slot]);
            for m in 0..n {
                let dxm = xi.derivative(m);
                if dxm.is_zero() {
                    continue;
                }
                let mut j = idx.clone();
                j[slot] = m;
                add(j, wi * &dxm);
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

pub fn components(w: &DiffForm) -> BTreeMap<Vec<usize>, Poly> {
    w.components()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (k.clone(), c.clone()))
        .collect()
}

/// A nondegenerate closed 2-form with polynomial coefficients on `R^{2m}`:
/// a constant symplectic matrix pulled back by the shear `p ↦ p + ∇g(q)`-like
/// map `y_{m+i} = x_{m+i} + g_i(x_0..x_m)`, whose Jacobian is unipotent.
pub fn random_symplectic(rng: &mut Sampler, m: usize) -> (Chart, DiffForm) {
    use presym::cartan::{exterior_derivative, wedge};
    let n = 2 * m;
    let c = chart(n);
    let a = loop {
        let a = random_two_form(rng, n);
        if rank(&a, n) == n {
            break a;
        }
    };
    let qchart_vars: Vec<usize> = (0..m).collect();
    let mut y: Vec<Poly> = (0..n).map(|i| c.var(i)).collect();
    if rng.chance(0.7) {
        for i in 0..m {
            let mut g = c.zero();
            for _ in 0..2 {
                let mut t = c.constant(rat(rng.int(-2, 2)));
                for _ in 0..1 + rng.index(2) {
                    t = &t * &c.var(qchart_vars[rng.index(m)]);
                }
                g = &g + &t;
            }
            y[m + i] = &y[m + i] + &g;
        }
    }
    let dy: Vec<DiffForm> = y
        .iter()
        .map(|f| exterior_derivative(&DiffForm::function(&c, f.clone())))
        .collect();
    let mut w = DiffForm::zero(&c, 2);
    for i in 0..n {
        for j in (i + 1)..n {
            if !a[i][j].is_zero() {
                w = w
                    .try_add(
                        &wedge(&dy[i], &dy[j])
                            .unwrap()
                            .scale_poly(&c.constant(a[i][j].clone())),
                    )
                    .unwrap();
            }
        }
    }
    (c, w)
}
