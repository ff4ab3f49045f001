//! Three ways to the reduced space, compared by their dimensions and ranks.
//!
//! (A) complete reduction of `J⁻¹(μ)` by `ker Ω_μ`;
//! (B) quotient by `ker Ω` first, then symplectic reduction by the
//!     projected generators;
//! (C) coisotropic embedding into a symplectic space, then symplectic
//!     reduction by the extended momentum.
//!
//! B and C run on charts when the kernel is constant and there is no
//! constraint submanifold; otherwise they run on the tangent space at the
//! base point of A, where the same constructions are linear.

use std::fmt;

use num_traits::Zero;

use super::extend::coisotropic_extend;
use super::reduce::{reduce, BasePoint, ReducedSpace};
use super::{ActionSpec, MomentumMap};
use crate::error::{Error, Result};
use crate::gotay::{gauge_reduce, ConstraintSet};
use crate::linred::{
    kernel, linear_reduce, pointwise, pull_back, restrict, solve, LinForm, Subspace,
};
use crate::presymp::PresympSystem;
use crate::symexpr::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Route {
    Complete,
    GaugeThenSymplectic,
    Coisotropic,
}

impl Route {
    pub const ALL: [Route; 3] = [
        Route::Complete,
        Route::GaugeThenSymplectic,
        Route::Coisotropic,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Route::Complete => "complete",
            Route::GaugeThenSymplectic => "gauge-then-symplectic",
            Route::Coisotropic => "coisotropic",
        }
    }

    pub fn parse(s: &str) -> Option<Route> {
        Route::ALL.into_iter().find(|r| r.label() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RouteMode {
    Chart,
    Pointwise,
}

impl RouteMode {
    pub fn label(self) -> &'static str {
        match self {
            RouteMode::Chart => "chart",
            RouteMode::Pointwise => "pointwise",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RouteResult {
    pub route: Route,
    pub mode: RouteMode,
    /// Dimension of the space the final symplectic reduction starts from.
    pub space_dim: usize,
    pub level_dim: usize,
    pub isotropy_dim: usize,
    pub quotient_dim: usize,
    pub reduced_rank: usize,
    pub symplectic: bool,
    /// Why the chart mode was not used.
    pub note: Option<String>,
}

#[derive(Clone, Debug)]
pub struct RouteReport {
    pub complete: ReducedSpace,
    pub results: Vec<RouteResult>,
}

impl RouteReport {
    /// Same quotient dimension and reduced rank on every route.
    pub fn agree(&self) -> bool {
        let first = &self.results[0];
        self.results
            .iter()
            .all(|r| r.quotient_dim == first.quotient_dim && r.reduced_rank == first.reduced_rank)
    }

    /// The hypothesis under which the routes must agree.
    pub fn expected_to_agree(&self) -> bool {
        self.complete.kernel_generated.certified() && self.complete.kernel_in_span
    }
}

impl fmt::Display for RouteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<22} {:<9} space {:>2}  level {:>2}  isotropy {:>2}  quotient {:>2}  rank {:>2}  symplectic {}",
            self.route.label(),
            self.mode.label(),
            self.space_dim,
            self.level_dim,
            self.isotropy_dim,
            self.quotient_dim,
            self.reduced_rank,
            self.symplectic
        )
    }
}

fn from_reduced(
    route: Route,
    mode: RouteMode,
    r: &ReducedSpace,
    note: Option<String>,
) -> RouteResult {
    RouteResult {
        route,
        mode,
        space_dim: r.ambient_tangent.dim(),
        level_dim: r.level_dim(),
        isotropy_dim: r.isotropy_tangent.dim(),
        quotient_dim: r.quotient_dim,
        reduced_rank: r.reduced_rank,
        symplectic: r.symplectic,
        note,
    }
}

/// Run the requested routes at one base point (chosen by A).
pub fn route_equivalence(
    sys: &PresympSystem,
    mm: &MomentumMap,
    mu: &[Rational],
    base: &BasePoint,
    m_set: &ConstraintSet,
    routes: &[Route],
    seed: u64,
) -> Result<RouteReport> {
    let complete = reduce(sys, mm, mu, base, m_set, seed)?;
    let mut results = Vec::new();
    for &route in routes {
        results.push(match route {
            Route::Complete => from_reduced(route, RouteMode::Chart, &complete, None),
            Route::GaugeThenSymplectic => gauge_route(sys, mm, mu, m_set, &complete, seed)?,
            Route::Coisotropic => coisotropic_route(sys, mm, mu, m_set, &complete, seed)?,
        });
    }
    Ok(RouteReport { complete, results })
}

fn chart_blocker(m_set: &ConstraintSet) -> Option<String> {
    if m_set.is_empty() {
        None
    } else {
        Some(format!("the system lives on the constraint set {m_set}"))
    }
}

fn gauge_route(
    sys: &PresympSystem,
    mm: &MomentumMap,
    mu: &[Rational],
    m_set: &ConstraintSet,
    a: &ReducedSpace,
    seed: u64,
) -> Result<RouteResult> {
    let attempt = match chart_blocker(m_set) {
        Some(n) => Err(n),
        None => gauge_reduce(sys).map_err(|e| e.to_string()),
    };
    let g = match attempt {
        Ok(g) => g,
        Err(note) => return pointwise_gauge_route(sys, mm, a, note),
    };
    let target = &g.system.chart;
    let mut named = Vec::new();
    let mut hs = Vec::new();
    let mut mu_bar = Vec::new();
    for (k, (name, xi)) in mm
        .action
        .names
        .iter()
        .zip(&mm.action.generators)
        .enumerate()
    {
        let p = g.project_field(xi)?;
        if p.is_zero() {
            continue;
        }
        named.push((name.clone(), p));
        hs.push(g.project_function(&mm.hamiltonians[k])?);
        mu_bar.push(mu[k].clone());
    }
    let action = ActionSpec::new(target, named)?;
    let mm_bar = MomentumMap::from_hamiltonians(&g.system, action, hs)?;
    let x = g.project_point(&a.base_point)?;
    let r = reduce(
        &g.system,
        &mm_bar,
        &mu_bar,
        &BasePoint::Given(x),
        &ConstraintSet::empty(target),
        seed,
    )?;
    Ok(from_reduced(
        Route::GaugeThenSymplectic,
        RouteMode::Chart,
        &r,
        None,
    ))
}

fn coisotropic_route(
    sys: &PresympSystem,
    mm: &MomentumMap,
    mu: &[Rational],
    m_set: &ConstraintSet,
    a: &ReducedSpace,
    seed: u64,
) -> Result<RouteResult> {
    let attempt = match chart_blocker(m_set) {
        Some(n) => Err(n),
        None => coisotropic_extend(sys, seed).map_err(|e| e.to_string()),
    };
    let ext = match attempt {
        Ok(e) => e,
        Err(note) => return pointwise_coisotropic_route(sys, mm, a, note),
    };
    let mm_hat = ext.extend_momentum(mm)?;
    let x = ext.lift_point(&a.base_point);
    let amb = &ext.ambient.chart;
    let r = reduce(
        &ext.ambient,
        &mm_hat,
        mu,
        &BasePoint::Given(x),
        &ConstraintSet::empty(amb),
        seed,
    )?;
    Ok(from_reduced(Route::Coisotropic, RouteMode::Chart, &r, None))
}

/// `T_x M`, `Ω` on it, generator coordinates, and a basis `C ∪ K` with `K`
/// the kernel.
struct Local {
    alpha: LinForm,
    gens: Vec<Vec<Rational>>,
    complement: Vec<Vec<Rational>>,
    kernel: Vec<Vec<Rational>>,
}

fn local(sys: &PresympSystem, mm: &MomentumMap, a: &ReducedSpace) -> Result<Local> {
    let tm = &a.ambient_tangent;
    let alpha = restrict(&pointwise(&sys.omega, &a.base_point)?, tm)?;
    let gens = mm
        .action
        .generators
        .iter()
        .map(|g| {
            tm.coordinates(&g.at(&a.base_point)?).ok_or_else(|| {
                Error::TangencyNotCertified("generator leaves the constraint set".into())
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let k = kernel(&alpha);
    let complement = Subspace::full(alpha.dim()).complement_of(&k);
    Ok(Local {
        kernel: k.basis().to_vec(),
        alpha,
        gens,
        complement,
    })
}

/// Coordinates of `v` in the basis `C ∪ K`.
fn split(l: &Local, v: &[Rational]) -> Result<Vec<Rational>> {
    let basis: Vec<&Vec<Rational>> = l.complement.iter().chain(&l.kernel).collect();
    let n = l.alpha.dim();
    let m: Vec<Vec<Rational>> = (0..n)
        .map(|i| basis.iter().map(|b| b[i].clone()).collect())
        .collect();
    if n == 0 {
        return Ok(Vec::new());
    }
    solve(&m, v).ok_or_else(|| Error::DimensionMismatch {
        expected: n,
        got: basis.len(),
    })
}

fn result(route: Route, alpha: &LinForm, s: &Subspace, note: String) -> Result<RouteResult> {
    let lr = linear_reduce(alpha, s)?;
    Ok(RouteResult {
        route,
        mode: RouteMode::Pointwise,
        space_dim: alpha.dim(),
        level_dim: lr.n.dim(),
        isotropy_dim: lr.n_cap_s.dim(),
        quotient_dim: lr.intermediate_basis.len(),
        reduced_rank: lr.quotient_dim,
        symplectic: lr.is_symplectic,
        note: Some(note),
    })
}

/// `T_x M / ker Ω_x` with the projected generators.
fn pointwise_gauge_route(
    sys: &PresympSystem,
    mm: &MomentumMap,
    a: &ReducedSpace,
    note: String,
) -> Result<RouteResult> {
    let l = local(sys, mm, a)?;
    let c = l.complement.len();
    let omega_bar = pull_back(&l.alpha, &l.complement);
    let mut projected = Vec::new();
    for g in &l.gens {
        projected.push(split(&l, g)?[..c].to_vec());
    }
    result(
        Route::GaugeThenSymplectic,
        &omega_bar,
        &Subspace::span(c, &projected),
        note,
    )
}

/// `T_x M ⊕ K*` with `Ω ⊕` the pairing between `K*` and the kernel
/// coordinates of the basis `C ∪ K`.
fn pointwise_coisotropic_route(
    sys: &PresympSystem,
    mm: &MomentumMap,
    a: &ReducedSpace,
    note: String,
) -> Result<RouteResult> {
    let l = local(sys, mm, a)?;
    let m = l.alpha.dim();
    let k = l.kernel.len();
    let c = l.complement.len();
    let n = m + k;
    let mut mat = vec![vec![Rational::zero(); n]; n];
    let am = l.alpha.matrix();
    for i in 0..m {
        for j in 0..m {
            mat[i][j] = am[i][j].clone();
        }
    }
    // λ_j(e_i): kernel coordinate j of the i-th unit vector.
    for i in 0..m {
        let mut e = vec![Rational::zero(); m];
        e[i] = Rational::from_integer(1.into());
        let coords = split(&l, &e)?;
        for j in 0..k {
            let v = coords[c + j].clone();
            mat[i][m + j] = v.clone();
            mat[m + j][i] = -v;
        }
    }
    let bold = LinForm::from_matrix(&mat)?;
    let gens: Vec<Vec<Rational>> = l
        .gens
        .iter()
        .map(|g| {
            let mut v = g.clone();
            v.extend((0..k).map(|_| Rational::zero()));
            v
        })
        .collect();
    result(Route::Coisotropic, &bold, &Subspace::span(n, &gens), note)
}
