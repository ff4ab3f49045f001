//! Gauge fields and the quotient by them.

use num_traits::Zero;

use super::ideal::ConstraintSet;
use super::jacobian_rank;
use super::sample::sample_points;
use crate::cartan::{Chart, DiffForm, VectorField};
use crate::error::{Error, Result};
use crate::linred::{kernel, null_space, pointwise, restrict, rref, Subspace};
use crate::presymp::{kernel_distribution, PresympSystem};
use crate::symexpr::{Poly, Rational};

/// Global basis of `ker Ω`.
pub fn gauge_fields(sys: &PresympSystem) -> Result<Vec<VectorField>> {
    kernel_distribution(sys)
}

/// Sampled check of candidate gauge fields on a constraint set that is not
/// a graph: at each point, `K = T ∩ T^Ω` with `T` the Jacobian null space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointwiseGauge {
    pub samples: usize,
    /// `dim K`, when the same at every sample.
    pub kernel_dim: Option<usize>,
    /// Per candidate: inside `K` at every sample.
    pub members: Vec<bool>,
    /// Candidates span `K` at every sample.
    pub spans: bool,
    /// Dimension of the constraint set (Jacobian corank), when constant.
    pub set_dim: Option<usize>,
}

pub fn pointwise_gauge(
    sys: &PresympSystem,
    set: &ConstraintSet,
    candidates: &[VectorField],
    n: usize,
    seed: u64,
) -> Result<PointwiseGauge> {
    let pts = sample_points(set, n, seed)?;
    let dynv = sys.chart.dynamic();
    let nd = dynv.len();
    let mut dims = Vec::new();
    let mut set_dims = Vec::new();
    let mut members = vec![true; candidates.len()];
    let mut spans = true;
    for pt in &pts {
        let jac: Vec<Vec<Rational>> = set
            .constraints
            .iter()
            .map(|c| {
                dynv.iter()
                    .map(|&i| c.derivative(i).eval(pt))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let t = if jac.is_empty() {
            Subspace::full(nd)
        } else {
            Subspace::span(nd, &null_space(&jac, nd))
        };
        set_dims.push(nd - jacobian_rank(&sys.chart, &set.constraints, pt)?);
        let w = pointwise(&sys.omega, pt)?;
        let k_local = kernel(&restrict(&w, &t)?);
        let k = t.lift(k_local.basis());
        dims.push(k.dim());
        let mut vs = Vec::new();
        for (m, c) in members.iter_mut().zip(candidates) {
            let v = c.at(pt)?;
            if !k.contains(&v) {
                *m = false;
            }
            vs.push(v);
        }
        if Subspace::span(nd, &vs) != k {
            spans = false;
        }
    }
    let constant = |xs: &[usize]| xs.first().copied().filter(|d| xs.iter().all(|x| x == d));
    Ok(PointwiseGauge {
        samples: pts.len(),
        kernel_dim: constant(&dims),
        members,
        spans,
        set_dim: constant(&set_dims),
    })
}

/// Quotient of a system by its (constant) kernel.
#[derive(Clone, Debug)]
pub struct GaugeReduction {
    pub system: PresympSystem,
    /// Coordinates replaced by kernel directions.
    pub dropped: Vec<String>,
    /// `w_i = x_i − Σ x_p K^i` for each kept coordinate touched by a
    /// non-coordinate kernel vector; empty for coordinate kernels.
    pub linear_change: Vec<(String, Poly)>,
    /// Kernel vectors in RREF, one per dropped coordinate.
    kernel_rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
    source: Chart,
    /// `π*ω̄ = Ω` checked exactly.
    pub projection_verified: bool,
}

/// Quotient by `ker Ω` when it is spanned by constant-coefficient fields.
pub fn gauge_reduce(sys: &PresympSystem) -> Result<GaugeReduction> {
    let chart = &sys.chart;
    let ker = kernel_distribution(sys)?;
    let dynv = chart.dynamic();
    let nd = dynv.len();
    let mut rows = Vec::new();
    for z in &ker {
        if !z.is_constant_coefficient() {
            return Err(Error::NonCoordinateKernel(format!(
                "kernel field {z} has non-constant coefficients"
            )));
        }
        if !z.apply(&sys.hamiltonian).is_zero() {
            return Err(Error::Incompatible(format!(
                "H is not invariant under the kernel field {z}"
            )));
        }
        let mut row = Vec::with_capacity(nd);
        for &i in &dynv {
            let c = z.component(i);
            row.push(c.constant_value().ok_or_else(|| {
                Error::NonCoordinateKernel(format!("component {c} of {z} depends on parameters"))
            })?);
        }
        rows.push(row);
    }
    let red = rref(&rows, nd);
    let pivots: Vec<usize> = red.pivots.iter().map(|&p| dynv[p]).collect();
    let source = chart.clone();
    let target = chart.without(&format!("{}/ker", chart.name), &pivots);
    let section: Vec<(usize, Poly)> = pivots.iter().map(|&p| (p, chart.zero())).collect();
    let omega_bar = sys.omega.pullback_graph(&section, &target)?;
    let h_bar = sys
        .hamiltonian
        .substitute_many(&section)
        .embed(target.vars())?;
    let mut linear_change = Vec::new();
    // π: w_i = x_i − Σ_a x_{p_a} K_a^i
    let mut proj: Vec<(usize, Poly)> = Vec::new();
    for (k, &i) in dynv.iter().enumerate() {
        if pivots.contains(&i) {
            continue;
        }
        let mut g = chart.var(i);
        for (r, row) in red.rows.iter().enumerate() {
            if !row[k].is_zero() {
                g = &g - &chart.var(pivots[r]).scale(&row[k]);
            }
        }
        if g != chart.var(i) {
            linear_change.push((chart.name_of(i).to_string(), g.clone()));
        }
        proj.push((i, g));
    }
    let lifted = omega_bar.embed(chart)?.pullback_graph(&proj, chart)?;
    let projection_verified = lifted == sys.omega;
    if !projection_verified {
        return Err(Error::NonCoordinateKernel(
            "the form does not descend along the kernel".into(),
        ));
    }
    let system = PresympSystem::new(target, omega_bar, h_bar)?;
    Ok(GaugeReduction {
        system,
        dropped: pivots
            .iter()
            .map(|&p| chart.name_of(p).to_string())
            .collect(),
        linear_change,
        kernel_rows: red.rows,
        pivots,
        source,
        projection_verified,
    })
}

impl GaugeReduction {
    /// Push a projectable field down: `dw_i(ξ)` along the section.
    pub fn project_field(&self, xi: &VectorField) -> Result<VectorField> {
        let chart = &self.source;
        let xi = if xi.chart() == chart {
            xi.clone()
        } else {
            xi.embed(chart)?
        };
        let dynv = chart.dynamic();
        let section: Vec<(usize, Poly)> = self.pivots.iter().map(|&p| (p, chart.zero())).collect();
        let target = &self.system.chart;
        let mut out = VectorField::zero(target);
        for (k, &i) in dynv.iter().enumerate() {
            if self.pivots.contains(&i) {
                continue;
            }
            let mut c = xi.component(i);
            for (r, row) in self.kernel_rows.iter().enumerate() {
                if !row[k].is_zero() {
                    c = &c - &xi.component(self.pivots[r]).scale(&row[k]);
                }
            }
            let c = c.substitute_many(&section).embed(target.vars())?;
            out.set(target.index(chart.name_of(i))?, c);
        }
        Ok(out)
    }

    /// Restrict an invariant function along the section.
    pub fn project_function(&self, f: &Poly) -> Result<Poly> {
        let chart = &self.source;
        let section: Vec<(usize, Poly)> = self.pivots.iter().map(|&p| (p, chart.zero())).collect();
        f.embed(chart.vars())?
            .substitute_many(&section)
            .embed(self.system.chart.vars())
    }

    /// Image of a point of the source chart.
    pub fn project_point(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        let chart = &self.source;
        let dynv = chart.dynamic();
        let target = &self.system.chart;
        let mut out = vec![Rational::zero(); target.len()];
        for i in 0..chart.len() {
            if self.pivots.contains(&i) {
                continue;
            }
            let mut v = x[i].clone();
            if let Some(k) = dynv.iter().position(|&d| d == i) {
                for (r, row) in self.kernel_rows.iter().enumerate() {
                    v -= &row[k] * &x[self.pivots[r]];
                }
            }
            out[target.index(chart.name_of(i))?] = v;
        }
        Ok(out)
    }

    /// Pull a form on the quotient back to the source chart.
    pub fn lift_form(&self, w: &DiffForm) -> Result<DiffForm> {
        let chart = &self.source;
        let dynv = chart.dynamic();
        let mut proj = Vec::new();
        for (k, &i) in dynv.iter().enumerate() {
            if self.pivots.contains(&i) {
                continue;
            }
            let mut g = chart.var(i);
            for (r, row) in self.kernel_rows.iter().enumerate() {
                if !row[k].is_zero() {
                    g = &g - &chart.var(self.pivots[r]).scale(&row[k]);
                }
            }
            proj.push((i, g));
        }
        w.embed(chart)?.pullback_graph(&proj, chart)
    }
}
