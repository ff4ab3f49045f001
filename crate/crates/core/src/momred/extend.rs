//! Constructions that enlarge the phase space: the coisotropic embedding of
//! a constant-kernel system, the time-extended form, and momentum maps
//! extended off a constraint submanifold.

use num_traits::Zero;

use super::{check_locally_hamiltonian, ActionSpec, MomentumMap};
use crate::cartan::{
    exterior_derivative, integrate_closed_one_form, interior, wedge, Chart, DiffForm, VectorField,
};
use crate::error::{Error, Result};
use crate::gotay::{ideal_reduce_default, vanishes_on, ConstraintSet, Vanishing};
use crate::linred::{perp, pointwise, rref, Subspace};
use crate::presymp::{kernel_distribution, PresympSystem};
use crate::sample::Sampler;
use crate::symexpr::{Poly, Rational};

/// Points used for the coisotropy check.
pub const COISOTROPY_SAMPLES: usize = 64;

/// `(M, Ω)` inside a symplectic manifold as the zero section `p = 0`.
#[derive(Clone, Debug)]
pub struct CoisotropicExtension {
    pub ambient: PresympSystem,
    /// `z_j`, one per kernel direction.
    pub kernel_coords: Vec<String>,
    /// `p_j`, dual to `z_j`.
    pub momenta: Vec<String>,
    /// Kernel vectors in echelon form, over the dynamical variables of the
    /// source; the pivot of row `j` is `z_j`.
    pub kernel_rows: Vec<Vec<Rational>>,
    /// `Ω` and `H` are recovered along `p = 0`.
    pub pullback_verified: bool,
    pub coisotropic_samples: usize,
    pub coisotropic: bool,
    source: Chart,
}

fn fresh(chart: &Chart, base: &str) -> String {
    let mut n = base.to_string();
    while chart.vars().index(&n).is_some() {
        n.insert(0, 'p');
    }
    n
}

pub fn coisotropic_extend(sys: &PresympSystem, seed: u64) -> Result<CoisotropicExtension> {
    let chart = &sys.chart;
    let dynv = chart.dynamic();
    let nd = dynv.len();
    let ker = kernel_distribution(sys)?;
    let mut rows = Vec::new();
    for z in &ker {
        let mut row = Vec::with_capacity(nd);
        for &i in &dynv {
            let c = z.component(i);
            row.push(c.constant_value().ok_or_else(|| {
                Error::NonConstantKernel(format!("kernel field {z} has non-constant component {c}"))
            })?);
        }
        rows.push(row);
    }
    let red = rref(&rows, nd);
    let kernel_coords: Vec<String> = red
        .pivots
        .iter()
        .map(|&p| chart.name_of(dynv[p]).to_string())
        .collect();
    let momenta: Vec<String> = kernel_coords
        .iter()
        .map(|z| fresh(chart, &format!("p_{z}")))
        .collect();
    let amb = chart.extended(&format!("{}+p", chart.name), &momenta, &[])?;
    let mut omega = sys.omega.embed(&amb)?;
    for (z, p) in kernel_coords.iter().zip(&momenta) {
        let dz = DiffForm::dx(&amb, amb.index(z)?);
        let dp = DiffForm::dx(&amb, amb.index(p)?);
        omega = omega.try_add(&wedge(&dz, &dp)?)?;
    }
    let h = sys.hamiltonian.embed(amb.vars())?;
    let ambient = PresympSystem::new(amb.clone(), omega, h)?;
    if !kernel_distribution(&ambient)?.is_empty() {
        return Err(Error::NonCoordinateKernel(
            "the extended form is degenerate".into(),
        ));
    }
    let zero: Vec<(usize, Poly)> = momenta
        .iter()
        .map(|p| (amb.index(p).unwrap(), amb.zero()))
        .collect();
    let back = ambient.omega.pullback_graph(&zero, chart)?;
    let h_back = ambient
        .hamiltonian
        .substitute_many(&zero)
        .embed(chart.vars())?;
    let pullback_verified = back == sys.omega && h_back == sys.hamiltonian;

    // (T M)^⊥ ⊆ T M along p = 0.
    let and = amb.dynamic();
    let tm_idx: Vec<usize> = and
        .iter()
        .enumerate()
        .filter(|(_, &i)| !momenta.iter().any(|p| p == amb.name_of(i)))
        .map(|(k, _)| k)
        .collect();
    let tm = Subspace::coordinate(and.len(), &tm_idx);
    let mut rng = Sampler::new(seed);
    let mut coisotropic = true;
    for _ in 0..COISOTROPY_SAMPLES {
        let mut pt = rng.point(&amb);
        for (i, _) in &zero {
            pt[*i] = Rational::zero();
        }
        let w = pointwise(&ambient.omega, &pt)?;
        if !perp(&w, &tm)?.is_subspace_of(&tm) {
            coisotropic = false;
            break;
        }
    }
    Ok(CoisotropicExtension {
        ambient,
        kernel_coords,
        momenta,
        kernel_rows: red.rows,
        pullback_verified,
        coisotropic_samples: COISOTROPY_SAMPLES,
        coisotropic,
        source: chart.clone(),
    })
}

impl CoisotropicExtension {
    /// Momentum map on the ambient space with `J_bold ∘ j0 = J`:
    /// `f̂ = f + Σ_j ξ^{z_j} p_j`, checked exactly.
    pub fn extend_momentum(&self, mm: &MomentumMap) -> Result<MomentumMap> {
        let amb = &self.ambient.chart;
        let action = mm.action.embed(amb)?;
        let mut hs = Vec::new();
        for (g, f) in action.generators.iter().zip(&mm.hamiltonians) {
            let mut fh = f.embed(amb.vars())?;
            for (z, p) in self.kernel_coords.iter().zip(&self.momenta) {
                let c = g.component(amb.index(z)?);
                fh = &fh + &(&c * &amb.var(amb.index(p)?));
            }
            hs.push(fh);
        }
        check_locally_hamiltonian(&self.ambient, &action)?;
        let mut out = MomentumMap::from_hamiltonians(&self.ambient, action, hs)?;
        out.source = mm.source;
        Ok(out)
    }

    /// A point of the source with `p = 0` appended.
    pub fn lift_point(&self, x: &[Rational]) -> Vec<Rational> {
        let mut v = x.to_vec();
        v.extend(self.momenta.iter().map(|_| Rational::zero()));
        v
    }

    pub fn source(&self) -> &Chart {
        &self.source
    }
}

/// `(P × R, Ω_h = ω_P + dh∧dt, 0)` and the normalized kernel field.
#[derive(Clone, Debug)]
pub struct TimeExtended {
    pub system: PresympSystem,
    pub time: String,
    pub kernel: Vec<VectorField>,
    /// Kernel field with `i(X)dt = 1`.
    pub companion: Option<VectorField>,
}

/// `h` may be written over the chart of `omega_p` or over the extended one.
pub fn build_time_extended(omega_p: &DiffForm, h: &Poly, time: &str) -> Result<TimeExtended> {
    let base = omega_p.chart();
    if base.vars().index(time).is_some() {
        return Err(Error::TimeVariableExists(time.to_string()));
    }
    let chart = base.extended(&format!("{}xR", base.name), &[time], &[])?;
    let t = chart.index(time)?;
    let h = h.embed(chart.vars())?;
    let dh = exterior_derivative(&DiffForm::function(&chart, h));
    let omega = omega_p
        .embed(&chart)?
        .try_add(&wedge(&dh, &DiffForm::dx(&chart, t))?)?;
    let system = PresympSystem::new(chart.clone(), omega, chart.zero())?;
    let kernel = kernel_distribution(&system)?;
    let units = chart.param_mask().to_vec();
    let companion = kernel.iter().find_map(|z| {
        let c = z.component(t);
        if c.is_zero() || !c.is_unit(&units) {
            return None;
        }
        let inv = c.unit_inverse()?;
        Some(z.scale_poly(&inv))
    });
    Ok(TimeExtended {
        system,
        time: time.to_string(),
        kernel,
        companion,
    })
}

/// Where an extended Hamiltonian came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtensionSource {
    /// Locally Hamiltonian on the ambient space.
    Ambient,
    /// A constraint of the final set with the generator as its field.
    Constraint(Poly),
    /// Neither; the hypothesis fails for this generator.
    Missing,
}

#[derive(Clone, Debug)]
pub struct MomentumExtension {
    pub hamiltonians: Vec<Option<Poly>>,
    pub sources: Vec<ExtensionSource>,
    /// Generators tangent to the final set, per generator.
    pub tangency: Vec<Vanishing>,
    /// `f^P − f` on the final set, per generator.
    pub restriction: Vec<Vanishing>,
    /// Ambient level constraints in the ideal of the reduced level set.
    pub level_in_final: Vec<(Poly, Vanishing)>,
    /// Final constraints and reduced level constraints in the ambient ideal.
    pub final_in_level: Vec<(Poly, Vanishing)>,
}

impl MomentumExtension {
    pub fn hypothesis(&self) -> bool {
        self.sources.iter().all(|s| *s != ExtensionSource::Missing)
            && self.tangency.iter().all(|v| v.holds())
    }

    /// `J_P⁻¹(μ) = J⁻¹(μ)` with both inclusions certified.
    pub fn levels_equal(&self) -> bool {
        self.hypothesis()
            && self.restriction.iter().all(|v| *v == Vanishing::Certified)
            && self
                .level_in_final
                .iter()
                .chain(&self.final_in_level)
                .all(|(_, v)| *v == Vanishing::Certified)
    }
}

fn membership(p: &Poly, set: &ConstraintSet, seed: u64) -> Result<Vanishing> {
    if p.is_zero() {
        return Ok(Vanishing::Certified);
    }
    if set.is_empty() {
        return Ok(Vanishing::Fails {
            point: Vec::new(),
            value: p.constant_term(),
        });
    }
    if ideal_reduce_default(p, set)?.certified() {
        return Ok(Vanishing::Certified);
    }
    match vanishes_on(p, set, seed) {
        Ok(v) => Ok(v),
        Err(Error::NoSample(m)) => Ok(Vanishing::Unknown(m)),
        Err(e) => Err(e),
    }
}

/// Extend the momentum of an action tangent to the final constraint set
/// `final_set` of a non-compatible system on `P`. `on_final` holds the
/// Hamiltonians of the action on the final set (written on the ambient
/// chart).
pub fn extend_momentum_noncompatible(
    ambient: &PresympSystem,
    final_set: &ConstraintSet,
    action: &ActionSpec,
    on_final: &[Poly],
    mu: &[Rational],
    seed: u64,
) -> Result<MomentumExtension> {
    let chart = &ambient.chart;
    let action = if action.chart == *chart {
        action.clone()
    } else {
        action.embed(chart)?
    };
    if on_final.len() != action.len() {
        return Err(Error::MuArity {
            expected: action.len(),
            got: on_final.len(),
        });
    }
    if mu.len() != action.len() {
        return Err(Error::MuArity {
            expected: action.len(),
            got: mu.len(),
        });
    }
    let mut hamiltonians = Vec::new();
    let mut sources = Vec::new();
    let mut tangency = Vec::new();
    let mut restriction = Vec::new();
    for (k, g) in action.generators.iter().enumerate() {
        let a = interior(g, &ambient.omega)?;
        let (f, src) = if exterior_derivative(&a).is_zero() {
            let f = match &action.theta {
                Some(theta) => -&interior(g, theta)?.as_function(),
                None => integrate_closed_one_form(&a)?,
            };
            (Some(f), ExtensionSource::Ambient)
        } else {
            let hit = final_set.constraints.iter().find_map(|c| {
                // Constraints are stored monic; allow a constant rescaling.
                let dc = exterior_derivative(&DiffForm::function(chart, c.clone()));
                scale_between(&dc, &a).map(|s| c.scale(&s))
            });
            match hit {
                Some(eta) => (Some(eta.clone()), ExtensionSource::Constraint(eta)),
                None => (None, ExtensionSource::Missing),
            }
        };
        let mut worst = Vanishing::Certified;
        for c in &final_set.constraints {
            let v = membership(&g.apply(c), final_set, seed)?;
            if !v.holds() {
                worst = v;
                break;
            }
            if worst == Vanishing::Certified {
                worst = v;
            }
        }
        tangency.push(worst);
        let r = match &f {
            Some(f) => {
                let diff = f - &on_final[k].embed(chart.vars())?;
                membership(&diff, final_set, seed)?
            }
            None => Vanishing::Unknown("no ambient Hamiltonian".into()),
        };
        restriction.push(r);
        hamiltonians.push(f);
        sources.push(src);
    }
    let mut level_in_final = Vec::new();
    let mut final_in_level = Vec::new();
    if hamiltonians.iter().all(|f| f.is_some()) {
        let reduced: Vec<Poly> = on_final
            .iter()
            .zip(mu)
            .map(|(f, m)| Ok(&f.embed(chart.vars())? - &chart.constant(m.clone())))
            .collect::<Result<_>>()?;
        let target = final_set.extended(reduced.clone())?;
        let amb_level: Vec<Poly> = hamiltonians
            .iter()
            .zip(mu)
            .map(|(f, m)| f.as_ref().unwrap() - &chart.constant(m.clone()))
            .collect();
        let amb_set = ConstraintSet::new(chart, amb_level.clone())?;
        for z in &amb_level {
            level_in_final.push((z.clone(), membership(z, &target, seed)?));
        }
        for c in final_set.constraints.iter().chain(&reduced) {
            final_in_level.push((c.clone(), membership(c, &amb_set, seed)?));
        }
    }
    Ok(MomentumExtension {
        hamiltonians,
        sources,
        tangency,
        restriction,
        level_in_final,
        final_in_level,
    })
}

/// `s` with `a = s·b`, for a nonzero constant `s`.
fn scale_between(a: &DiffForm, b: &DiffForm) -> Option<Rational> {
    let (idx, ca) = a.components().next()?;
    let cb = b.component(idx);
    let (m, x) = ca.leading()?;
    let y = cb.coeff(m);
    if y.is_zero() {
        return None;
    }
    let s = &y / x;
    if &a.map_coefficients(|c| c.scale(&s)) == b {
        Some(s)
    } else {
        None
    }
}
