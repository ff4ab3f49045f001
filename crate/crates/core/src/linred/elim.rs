//! Exact elimination.
//!
//! Rational matrices are reduced fraction-free: each row is scaled to
//! integers, Bareiss elimination runs on `BigInt`, and the echelon form is
//! normalized to reduced row echelon form at the end. Pivots are chosen as
//! the first nonzero entry in declared column order.
//!
//! Polynomial matrices are reduced over the ring only through unit pivots
//! (nonzero monomials in the declared unit variables), so every row
//! operation is a polynomial identity.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::symexpr::{Poly, Rational};

/// Reduced row echelon form of a rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    /// Nonzero rows only, each with a leading 1.
    pub rows: Vec<Vec<Rational>>,
    /// Pivot column of each row.
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Basis of the right null space, one vector per free column.
    pub fn null_space(&self) -> Vec<Vec<Rational>> {
        let mut out = Vec::new();
        for f in 0..self.ncols {
            if self.pivots.contains(&f) {
                continue;
            }
            let mut v = vec![Rational::zero(); self.ncols];
            v[f] = Rational::one();
            for (r, &p) in self.pivots.iter().enumerate() {
                v[p] = -self.rows[r][f].clone();
            }
            out.push(v);
        }
        out
    }
}

fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let mut l = BigInt::one();
    for c in row {
        l = l.lcm(c.denom());
    }
    row.iter().map(|c| c.numer() * (&l / c.denom())).collect()
}

/// Fraction-free reduction to RREF.
pub fn rref(matrix: &[Vec<Rational>], ncols: usize) -> Rref {
    let mut a: Vec<Vec<BigInt>> = matrix
        .iter()
        .map(|r| {
            assert_eq!(r.len(), ncols, "ragged matrix");
            integer_row(r)
        })
        .collect();
    let nrows = a.len();
    let mut pivots = Vec::new();
    let mut k = 0;
    let mut prev = BigInt::one();
    for col in 0..ncols {
        if k == nrows {
            break;
        }
        let Some(p) = (k..nrows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(k, p);
        for i in (k + 1)..nrows {
            let f = a[i][col].clone();
            for j in (col + 1)..ncols {
                let v = &a[k][col] * &a[i][j] - &f * &a[k][j];
                debug_assert!((&v % &prev).is_zero());
                a[i][j] = v / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[k][col].clone();
        pivots.push(col);
        k += 1;
    }
    let mut rows: Vec<Vec<Rational>> = a
        .into_iter()
        .take(k)
        .map(|r| r.into_iter().map(Rational::from_integer).collect())
        .collect();
    for (r, &p) in pivots.iter().enumerate().rev() {
        let inv = rows[r][p].recip();
        for c in rows[r].iter_mut() {
            *c *= &inv;
        }
        for r2 in 0..r {
            let f = rows[r2][p].clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..ncols {
                let d = &f * &rows[r][j];
                rows[r2][j] -= d;
            }
        }
    }
    Rref {
        rows,
        pivots,
        ncols,
    }
}

/// Right null space of a rational matrix.
pub fn null_space(matrix: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    rref(matrix, ncols).null_space()
}

/// Rank of a rational matrix.
pub fn rank(matrix: &[Vec<Rational>], ncols: usize) -> usize {
    rref(matrix, ncols).rank()
}

/// Solve `A x = b` exactly; `None` when inconsistent. Free variables are 0.
pub fn solve(matrix: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let ncols = matrix.first().map(|r| r.len()).unwrap_or(0);
    let aug: Vec<Vec<Rational>> = matrix
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let red = rref(&aug, ncols + 1);
    if red.pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols];
    for (r, &p) in red.pivots.iter().enumerate() {
        x[p] = red.rows[r][ncols].clone();
    }
    Some(x)
}

/// Outcome of a polynomial elimination.
#[derive(Clone, Debug)]
pub enum RingSolve {
    /// `particular[j]` solves each right-hand side; `null_space` spans the
    /// homogeneous solutions.
    Solved {
        particular: Vec<Vec<Poly>>,
        null_space: Vec<Vec<Poly>>,
    },
    /// Right-hand side `index` is not in the image.
    Inconsistent { index: usize },
    /// Column `column` has nonzero entries but none of them is a unit.
    NonUnitPivot { column: usize },
}

/// Reduced augmented matrix after unit-pivot elimination.
struct RingElim {
    a: Vec<Vec<Poly>>,
    pivots: Vec<(usize, usize)>,
    pending: Vec<usize>,
    rank: usize,
}

fn ring_eliminate(
    matrix: &[Vec<Poly>],
    ncols: usize,
    rhs: &[Vec<Poly>],
    units: &[bool],
) -> RingElim {
    let nrows = matrix.len();
    let mut a: Vec<Vec<Poly>> = (0..nrows)
        .map(|i| {
            let mut r = matrix[i].clone();
            for b in rhs {
                r.push(b[i].clone());
            }
            r
        })
        .collect();
    let width = ncols + rhs.len();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut pending: Vec<usize> = (0..ncols).collect();
    let mut k = 0;
    loop {
        let mut progressed = false;
        let mut still = Vec::new();
        for &col in &pending {
            if k == nrows {
                still.push(col);
                continue;
            }
            let unit = (k..nrows).find(|&i| !a[i][col].is_zero() && a[i][col].is_unit(units));
            match unit {
                Some(p) => {
                    a.swap(k, p);
                    let inv = a[k][col].unit_inverse().unwrap();
                    for j in 0..width {
                        if !a[k][j].is_zero() {
                            a[k][j] = &a[k][j] * &inv;
                        }
                    }
                    for i in 0..nrows {
                        if i == k || a[i][col].is_zero() {
                            continue;
                        }
                        let f = a[i][col].clone();
                        for j in 0..width {
                            if !a[k][j].is_zero() {
                                a[i][j] = &a[i][j] - &(&f * &a[k][j]);
                            }
                        }
                    }
                    pivots.push((k, col));
                    k += 1;
                    progressed = true;
                }
                None => still.push(col),
            }
        }
        pending = still;
        if !progressed || pending.is_empty() {
            break;
        }
    }
    RingElim {
        a,
        pivots,
        pending,
        rank: k,
    }
}

/// Solution of a possibly inconsistent polynomial system.
#[derive(Clone, Debug)]
pub struct RelaxedSolve {
    /// Solves the pivot rows of each right-hand side.
    pub particular: Vec<Vec<Poly>>,
    pub null_space: Vec<Vec<Poly>>,
    /// Nonzero leftover entries of each right-hand side; the system is
    /// solvable exactly where they vanish.
    pub residuals: Vec<Vec<Poly>>,
}

impl RingElim {
    fn assemble(
        &self,
        ncols: usize,
        nrhs: usize,
        vars: &crate::symexpr::Vars,
    ) -> (Vec<Vec<Poly>>, Vec<Vec<Poly>>) {
        let zero = Poly::zero(vars);
        let pivot_cols: Vec<usize> = self.pivots.iter().map(|&(_, c)| c).collect();
        let particular = (0..nrhs)
            .map(|j| {
                let mut x = vec![zero.clone(); ncols];
                for &(r, c) in &self.pivots {
                    x[c] = self.a[r][ncols + j].clone();
                }
                x
            })
            .collect();
        let mut null_space = Vec::new();
        for f in 0..ncols {
            if pivot_cols.contains(&f) {
                continue;
            }
            let mut v = vec![zero.clone(); ncols];
            v[f] = Poly::one(vars);
            for &(r, c) in &self.pivots {
                v[c] = -&self.a[r][f];
            }
            null_space.push(v);
        }
        (particular, null_space)
    }

    fn non_unit_column(&self) -> Option<usize> {
        self.pending
            .iter()
            .copied()
            .find(|&col| (self.rank..self.a.len()).any(|i| !self.a[i][col].is_zero()))
    }
}

fn vars_of(matrix: &[Vec<Poly>], rhs: &[Vec<Poly>]) -> Option<crate::symexpr::Vars> {
    matrix
        .first()
        .and_then(|r| r.first())
        .or_else(|| rhs.first().and_then(|b| b.first()))
        .map(|p| p.vars().clone())
}

/// Solve `A x = b_j` for polynomial `A` and several right-hand sides.
pub fn ring_solve(
    matrix: &[Vec<Poly>],
    ncols: usize,
    rhs: &[Vec<Poly>],
    units: &[bool],
) -> RingSolve {
    let nrhs = rhs.len();
    let el = ring_eliminate(matrix, ncols, rhs, units);
    if let Some(column) = el.non_unit_column() {
        return RingSolve::NonUnitPivot { column };
    }
    for j in 0..nrhs {
        if (el.rank..el.a.len()).any(|i| !el.a[i][ncols + j].is_zero()) {
            return RingSolve::Inconsistent { index: j };
        }
    }
    let Some(vars) = vars_of(matrix, rhs) else {
        return RingSolve::Solved {
            particular: vec![Vec::new(); nrhs],
            null_space: Vec::new(),
        };
    };
    let (particular, null_space) = el.assemble(ncols, nrhs, &vars);
    RingSolve::Solved {
        particular,
        null_space,
    }
}

/// Like [`ring_solve`] but returns the compatibility conditions instead of
/// failing on an inconsistent right-hand side. `Err(column)` on a column
/// without a unit pivot.
pub fn ring_solve_relaxed(
    matrix: &[Vec<Poly>],
    ncols: usize,
    rhs: &[Vec<Poly>],
    units: &[bool],
) -> std::result::Result<RelaxedSolve, usize> {
    let nrhs = rhs.len();
    let el = ring_eliminate(matrix, ncols, rhs, units);
    if let Some(column) = el.non_unit_column() {
        return Err(column);
    }
    let Some(vars) = vars_of(matrix, rhs) else {
        return Ok(RelaxedSolve {
            particular: vec![Vec::new(); nrhs],
            null_space: Vec::new(),
            residuals: vec![Vec::new(); nrhs],
        });
    };
    let (particular, null_space) = el.assemble(ncols, nrhs, &vars);
    let residuals = (0..nrhs)
        .map(|j| {
            (el.rank..el.a.len())
                .map(|i| el.a[i][ncols + j].clone())
                .filter(|p| !p.is_zero())
                .collect()
        })
        .collect();
    Ok(RelaxedSolve {
        particular,
        null_space,
        residuals,
    })
}
