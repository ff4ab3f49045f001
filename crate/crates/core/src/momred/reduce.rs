//! Complete reduction at a point of a momentum level set.

use num_traits::Zero;

use super::{level_set, LevelSet, MomentumMap};
use crate::cartan::{Chart, VectorField};
use crate::error::{Error, Result};
use crate::gotay::ideal::solve_combination;
use crate::gotay::{
    gauge_reduce, ideal_reduce_default, pullback_system, sample_points, vanishes_on, ConstraintSet,
    Vanishing,
};
use crate::linred::{kernel, linear_reduce, null_space, pointwise, restrict, LinForm, Subspace};
use crate::presymp::{
    hamiltonian_vector_field, kernel_distribution, PresympSystem, SolutionFamily,
};
use crate::sample::Sampler;
use crate::symexpr::{Poly, Rational};

/// Extra points sampled to find the generic ranks.
const REGULARITY_SAMPLES: usize = 8;
/// Degree bound for the kernel-in-span certificate.
const KERNEL_COMBINATION_DEGREE: i64 = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasePoint {
    /// First sampled point of the level set.
    Auto,
    Given(Vec<Rational>),
}

/// Kernel fields written as polynomial combinations of the generators.
#[derive(Clone, Debug)]
pub struct KernelGenerated {
    /// `false` when `ker Ω` has no global polynomial basis.
    pub global_kernel: bool,
    pub kernel: Vec<VectorField>,
    /// Per kernel field, the coefficients found.
    pub coefficients: Vec<Option<Vec<Poly>>>,
}

impl KernelGenerated {
    pub fn certified(&self) -> bool {
        self.global_kernel && self.coefficients.iter().all(|c| c.is_some())
    }
}

pub fn kernel_generated(sys: &PresympSystem, mm: &MomentumMap) -> Result<KernelGenerated> {
    let kernel = match kernel_distribution(sys) {
        Ok(k) => k,
        Err(Error::NonConstantKernel(_)) => {
            return Ok(KernelGenerated {
                global_kernel: false,
                kernel: Vec::new(),
                coefficients: Vec::new(),
            })
        }
        Err(e) => return Err(e),
    };
    let dynv = sys.chart.dynamic();
    let columns: Vec<Vec<Poly>> = mm
        .action
        .generators
        .iter()
        .map(|g| dynv.iter().map(|&i| g.component(i)).collect())
        .collect();
    let mask = sys.chart.dynamic_mask();
    let coefficients = kernel
        .iter()
        .map(|z| {
            let rhs: Vec<Poly> = dynv.iter().map(|&i| z.component(i)).collect();
            if columns.is_empty() {
                None
            } else {
                solve_combination(&rhs, &columns, &mask, KERNEL_COMBINATION_DEGREE)
            }
        })
        .collect();
    Ok(KernelGenerated {
        global_kernel: true,
        kernel,
        coefficients,
    })
}

/// Reduced space by `ker Ω_μ`, with its pointwise linear data.
#[derive(Clone, Debug)]
pub struct ExplicitQuotient {
    pub system: PresympSystem,
    /// Solutions of `i(X̂)Ω̂ = dĤ`, when `Ĥ` is Hamiltonian.
    pub dynamics: Option<SolutionFamily>,
}

#[derive(Clone, Debug)]
pub struct ReducedSpace {
    pub chart: Chart,
    pub level: LevelSet,
    /// Level constraints together with the constraints of the submanifold.
    pub constraints: ConstraintSet,
    pub mu: Vec<Rational>,
    pub base_point: Vec<Rational>,
    /// `T_x M` (the whole space when there are no constraints).
    pub ambient_tangent: Subspace,
    /// `g̃_x^⊥` inside `T_x M`.
    pub tangent: Subspace,
    pub ker_level_form: Subspace,
    /// `ker Ω_x` on `T_x M`.
    pub ker_omega: Subspace,
    /// `g̃_μ` at the point.
    pub isotropy_tangent: Subspace,
    pub rank_omega: usize,
    pub quotient_dim: usize,
    pub reduced_rank: usize,
    pub symplectic: bool,
    /// `ker Ω_μ = g̃_μ + ker Ω` at the point.
    pub kernel_decomposition: bool,
    /// Rank of the constraint Jacobian was the same at every sample.
    pub regular: bool,
    pub kernel_generated: KernelGenerated,
    /// `ker Ω_x ⊆ g̃_x` at the point.
    pub kernel_in_span: bool,
    pub explicit_chart: Option<ExplicitQuotient>,
}

impl ReducedSpace {
    pub fn level_dim(&self) -> usize {
        self.tangent.dim()
    }

    pub fn verdict(&self) -> &'static str {
        if self.kernel_generated.certified() && self.kernel_in_span {
            "symplectic guaranteed"
        } else {
            "presymplectic, dichotomy reported pointwise"
        }
    }

    /// Subspace as fields on the chart.
    pub fn fields(&self, s: &Subspace) -> Vec<VectorField> {
        s.basis()
            .iter()
            .map(|v| VectorField::from_dynamic_vector(&self.chart, v))
            .collect()
    }
}

fn jacobian(chart: &Chart, cs: &[Poly], pt: &[Rational]) -> Result<Vec<Vec<Rational>>> {
    let dynv = chart.dynamic();
    cs.iter()
        .map(|c| dynv.iter().map(|&i| c.derivative(i).eval(pt)).collect())
        .collect()
}

fn null_of(chart: &Chart, cs: &[Poly], pt: &[Rational]) -> Result<Subspace> {
    let n = chart.dynamic().len();
    let j = jacobian(chart, cs, pt)?;
    Ok(if j.is_empty() {
        Subspace::full(n)
    } else {
        Subspace::span(n, &null_space(&j, n))
    })
}

struct PointData {
    tm: Subspace,
    alpha: LinForm,
    gens: Vec<Vec<Rational>>,
    jac_rank: usize,
}

fn point_data(
    sys: &PresympSystem,
    mm: &MomentumMap,
    m_set: &ConstraintSet,
    all: &[Poly],
    pt: &[Rational],
) -> Result<PointData> {
    let chart = &sys.chart;
    let n = chart.dynamic().len();
    let tm = null_of(chart, &m_set.constraints, pt)?;
    let w = pointwise(&sys.omega, pt)?;
    let alpha = restrict(&w, &tm)?;
    let mut gens = Vec::new();
    for (name, g) in mm.action.names.iter().zip(&mm.action.generators) {
        let v = g.at(pt)?;
        let c = tm.coordinates(&v).ok_or_else(|| {
            Error::TangencyNotCertified(format!(
                "generator {name} is not tangent to the constraint set at the point"
            ))
        })?;
        gens.push(c);
    }
    let jac_rank = n - null_of(chart, all, pt)?.dim();
    Ok(PointData {
        tm,
        alpha,
        gens,
        jac_rank,
    })
}

/// `ker(Ω|TM) ⊆ g̃_x` at sampled points of the constraint set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelSpan {
    pub checked: usize,
    /// Largest kernel dimension seen.
    pub kernel_dim: usize,
    pub failing_point: Option<Vec<Rational>>,
}

impl KernelSpan {
    pub fn holds(&self) -> bool {
        self.checked > 0 && self.failing_point.is_none()
    }
}

pub fn kernel_in_span_on(
    sys: &PresympSystem,
    mm: &MomentumMap,
    m_set: &ConstraintSet,
    samples: usize,
    seed: u64,
) -> Result<KernelSpan> {
    let pts = if m_set.is_empty() {
        let mut rng = Sampler::new(seed);
        (0..samples).map(|_| rng.point(&sys.chart)).collect()
    } else {
        sample_points(m_set, samples, seed)?
    };
    let mut out = KernelSpan {
        checked: 0,
        kernel_dim: 0,
        failing_point: None,
    };
    for p in pts {
        let d = point_data(sys, mm, m_set, &m_set.constraints, &p)?;
        let k = kernel(&d.alpha);
        out.kernel_dim = out.kernel_dim.max(k.dim());
        out.checked += 1;
        if !k.is_subspace_of(&Subspace::span(d.tm.dim(), &d.gens)) {
            out.failing_point = Some(p);
            break;
        }
    }
    Ok(out)
}

/// Complete reduction of `J⁻¹(μ)` (inside the constraint set `m_set`) at a
/// base point.
pub fn reduce(
    sys: &PresympSystem,
    mm: &MomentumMap,
    mu: &[Rational],
    base: &BasePoint,
    m_set: &ConstraintSet,
    seed: u64,
) -> Result<ReducedSpace> {
    let chart = &sys.chart;
    let level = level_set(mm, mu)?;
    let combined = m_set.extended(level.polys())?;
    let mut all: Vec<Poly> = m_set.constraints.clone();
    all.extend(level.polys());
    let x = match base {
        BasePoint::Auto => sample_points(&combined, 1, seed)?.remove(0),
        BasePoint::Given(p) => {
            if p.len() != chart.len() {
                return Err(Error::DimensionMismatch {
                    expected: chart.len(),
                    got: p.len(),
                });
            }
            for c in &all {
                let v = c.eval(p)?;
                if !v.is_zero() {
                    return Err(Error::OffLevel(format!("{c} = {v} at the base point")));
                }
            }
            p.clone()
        }
    };
    // The momentum differentials must be as independent here as at a
    // generic point of the chart.
    let lp = level.polys();
    let generic = {
        let mut rng = Sampler::new(seed ^ 0x9e37);
        let pt = rng.point(chart);
        crate::linred::rank(&jacobian(chart, &lp, &pt)?, chart.dynamic().len())
    };
    let at_x = crate::linred::rank(&jacobian(chart, &lp, &x)?, chart.dynamic().len());
    if at_x < generic {
        return Err(Error::NotWeaklyRegular(format!(
            "the momentum differentials have rank {at_x} at the base point and {generic} generically"
        )));
    }
    let here = point_data(sys, mm, m_set, &all, &x)?;
    let s = Subspace::span(here.tm.dim(), &here.gens);
    let lr = linear_reduce(&here.alpha, &s)?;

    // Generic ranks from other points of the same set.
    let others = sample_points(&combined, REGULARITY_SAMPLES, seed.wrapping_add(1))?;
    let mut jac_ranks = vec![here.jac_rank];
    let mut max_alpha = here.alpha.rank();
    let mut max_level = lr.alpha_n.rank();
    for p in &others {
        let d = point_data(sys, mm, m_set, &all, p)?;
        jac_ranks.push(d.jac_rank);
        max_alpha = max_alpha.max(d.alpha.rank());
        let sp = Subspace::span(d.tm.dim(), &d.gens);
        let lp = linear_reduce(&d.alpha, &sp)?;
        max_level = max_level.max(lp.alpha_n.rank());
    }
    let top = *jac_ranks.iter().max().unwrap();
    if here.jac_rank < top {
        return Err(Error::NotWeaklyRegular(format!(
            "constraint Jacobian has rank {} at the base point and {} elsewhere",
            here.jac_rank, top
        )));
    }
    if here.alpha.rank() < max_alpha || lr.alpha_n.rank() < max_level {
        return Err(Error::RankDrop(format!(
            "rank {} (level {}) at the base point, {} (level {}) at other points",
            here.alpha.rank(),
            lr.alpha_n.rank(),
            max_alpha,
            max_level
        )));
    }
    let regular = jac_ranks.iter().all(|&r| r == top);

    let tangent = here.tm.lift(lr.n.basis());
    let tangent_jac = null_of(chart, &all, &x)?;
    if tangent != tangent_jac {
        return Err(Error::NotWeaklyRegular(format!(
            "kernel of the constraint differential has dim {}, the orthogonal of the orbit has dim {}",
            tangent_jac.dim(),
            tangent.dim()
        )));
    }
    let ker_level_form = here.tm.lift(lr.kernel_of_alpha_n.basis());
    let isotropy_tangent = here.tm.lift(lr.n_cap_s.basis());
    let ker_local = kernel(&here.alpha);
    let ker_omega = here.tm.lift(ker_local.basis());
    let kernel_in_span = ker_local.is_subspace_of(&s);
    let a2 = kernel_generated(sys, mm)?;
    let explicit_chart = explicit(sys, &combined);
    Ok(ReducedSpace {
        chart: chart.clone(),
        level,
        constraints: combined,
        mu: mu.to_vec(),
        base_point: x,
        ambient_tangent: here.tm.clone(),
        tangent,
        ker_level_form,
        ker_omega,
        isotropy_tangent,
        rank_omega: here.alpha.rank(),
        quotient_dim: lr.intermediate_basis.len(),
        reduced_rank: lr.quotient_dim,
        symplectic: lr.is_symplectic,
        kernel_decomposition: lr.kernel_decomposition_verified == Some(true),
        regular,
        kernel_generated: a2,
        kernel_in_span,
        explicit_chart,
    })
}

/// Quotient chart when the level set is a graph and its kernel is constant.
fn explicit(sys: &PresympSystem, combined: &ConstraintSet) -> Option<ExplicitQuotient> {
    if !combined.all_solvable() {
        return None;
    }
    let slice = pullback_system(sys, combined).ok()?;
    let g = gauge_reduce(&slice).ok()?;
    let dynamics = hamiltonian_vector_field(&g.system, &g.system.hamiltonian)
        .ok()
        .flatten();
    Some(ExplicitQuotient {
        system: g.system,
        dynamics,
    })
}

/// Dynamics restricted to a level set, with its tangency certificates.
#[derive(Clone, Debug)]
pub struct LevelDynamics {
    pub family: SolutionFamily,
    /// `X(ζ)` for the particular solution, per level constraint.
    pub tangency: Vec<(Poly, Vanishing)>,
    /// `Z(ζ)` for every difference field `Z` and level constraint.
    pub kernel_invariance: Vec<Vanishing>,
}

/// Tangency of the dynamics to `J⁻¹(μ)`. Uses `family` when given (the
/// output of stabilization), otherwise solves `i(X)Ω = dH`.
pub fn dynamics_on_level(
    sys: &PresympSystem,
    mm: &MomentumMap,
    mu: &[Rational],
    family: Option<&SolutionFamily>,
    m_set: &ConstraintSet,
    seed: u64,
) -> Result<LevelDynamics> {
    let family = match family {
        Some(f) => f.clone(),
        None => hamiltonian_vector_field(sys, &sys.hamiltonian)?
            .ok_or_else(|| Error::Incompatible("dH is not in the image of Ω".into()))?,
    };
    let level = level_set(mm, mu)?;
    let combined = m_set.extended(level.polys())?;
    let check = |p: Poly| -> Result<Vanishing> {
        if p.is_zero() {
            return Ok(Vanishing::Certified);
        }
        let r = ideal_reduce_default(&p, &combined)?;
        if r.certified() {
            return Ok(Vanishing::Certified);
        }
        vanishes_on(&p, &combined, seed)
    };
    let mut tangency = Vec::new();
    let mut kernel_invariance = Vec::new();
    for z in level.polys() {
        let v = check(family.particular.apply(&z))?;
        if !v.holds() {
            return Err(Error::TangencyNotCertified(format!(
                "X({z}): {}",
                v.label()
            )));
        }
        tangency.push((z.clone(), v));
        for k in &family.kernel_basis {
            let v = check(k.apply(&z))?;
            if !v.holds() {
                return Err(Error::TangencyNotCertified(format!(
                    "kernel field {k} moves {z}: {}",
                    v.label()
                )));
            }
            kernel_invariance.push(v);
        }
    }
    Ok(LevelDynamics {
        family,
        tangency,
        kernel_invariance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::DiffForm;
    use crate::momred::{build_momentum, ActionSpec};
    use crate::symexpr::rat;

    fn oscillators() -> (PresympSystem, MomentumMap) {
        let c = Chart::new("R4", &["q1", "p1", "q2", "p2"], &[] as &[&str]).unwrap();
        let w = DiffForm::parse(&c, "dq1^dp1 + dq2^dp2").unwrap();
        let h = c.poly("1/2*(q1^2 + p1^2 + q2^2 + p2^2)").unwrap();
        let sys = PresympSystem::new(c.clone(), w, h).unwrap();
        let g = VectorField::parse(&c, "p1 d/dq1 - q1 d/dp1 + p2 d/dq2 - q2 d/dp2").unwrap();
        let a = ActionSpec::new(&c, vec![("u1".into(), g)]).unwrap();
        (sys.clone(), build_momentum(&sys, &a).unwrap())
    }

    #[test]
    fn circle_action_on_r4() {
        let (sys, mm) = oscillators();
        let m = ConstraintSet::empty(&sys.chart);
        let r = reduce(&sys, &mm, &[rat(2)], &BasePoint::Auto, &m, 0).unwrap();
        assert_eq!(r.level_dim(), 3);
        assert_eq!(r.isotropy_tangent.dim(), 1);
        assert_eq!(r.quotient_dim, 2);
        assert_eq!(r.reduced_rank, 2);
        assert!(r.symplectic && r.kernel_decomposition && r.regular);
        assert!(r.explicit_chart.is_none());
        let d = dynamics_on_level(&sys, &mm, &[rat(2)], None, &m, 0).unwrap();
        assert!(d.tangency.iter().all(|(_, v)| *v == Vanishing::Certified));
    }

    #[test]
    fn off_level_and_singular_points() {
        let (sys, mm) = oscillators();
        let m = ConstraintSet::empty(&sys.chart);
        let bad = BasePoint::Given(vec![rat(1), rat(0), rat(0), rat(0)]);
        assert!(matches!(
            reduce(&sys, &mm, &[rat(2)], &bad, &m, 0),
            Err(Error::OffLevel(_))
        ));
        let origin = BasePoint::Given(vec![rat(0); 4]);
        let r = reduce(&sys, &mm, &[rat(0)], &origin, &m, 0);
        assert!(
            matches!(r, Err(Error::NoSample(_) | Error::NotWeaklyRegular(_))),
            "{r:?}"
        );
    }

    #[test]
    fn translation_gives_an_explicit_quotient() {
        let c = Chart::new("R4", &["q1", "p1", "q2", "p2"], &[] as &[&str]).unwrap();
        let w = DiffForm::parse(&c, "dq1^dp1 + dq2^dp2").unwrap();
        let sys = PresympSystem::new(c.clone(), w, c.poly("p1^2 + q2*p2").unwrap()).unwrap();
        let a = ActionSpec::new(
            &c,
            vec![("t".into(), VectorField::parse(&c, "d/dq1").unwrap())],
        )
        .unwrap();
        let mm = build_momentum(&sys, &a).unwrap();
        let r = reduce(
            &sys,
            &mm,
            &[rat(3)],
            &BasePoint::Auto,
            &ConstraintSet::empty(&c),
            0,
        )
        .unwrap();
        assert_eq!((r.quotient_dim, r.reduced_rank), (2, 2));
        let e = r.explicit_chart.unwrap();
        assert_eq!(
            e.system.chart.dynamic_names(),
            vec!["q2".to_string(), "p2".to_string()]
        );
        assert!(e.dynamics.is_some());
    }

    #[test]
    fn kernel_combination_is_certified() {
        let c = Chart::new("R3", &["q", "p", "z"], &[] as &[&str]).unwrap();
        let sys =
            PresympSystem::new(c.clone(), DiffForm::parse(&c, "dq^dp").unwrap(), c.zero()).unwrap();
        let a = ActionSpec::new(
            &c,
            vec![(
                "g".into(),
                VectorField::parse(&c, "(1 + q^2) d/dz").unwrap(),
            )],
        )
        .unwrap();
        let mm = build_momentum(&sys, &a).unwrap();
        // ∂z = (1 + q²)⁻¹ g is not polynomial.
        assert!(!kernel_generated(&sys, &mm).unwrap().certified());
        let a = ActionSpec::new(
            &c,
            vec![("g".into(), VectorField::parse(&c, "2 d/dz").unwrap())],
        )
        .unwrap();
        let mm = build_momentum(&sys, &a).unwrap();
        let a2 = kernel_generated(&sys, &mm).unwrap();
        assert!(a2.certified());
        assert_eq!(
            a2.coefficients[0].as_ref().unwrap()[0],
            c.poly("1/2").unwrap()
        );
    }
}
