//! Infinitesimal actions, momentum maps and reduction by them.
//!
//! Sign conventions: `i(ξ̃)Ω = df_ξ`, `{f1, f2} = i(X2)i(X1)Ω`, and
//! structure constants are read off the fundamental fields,
//! `[ξ̃_i, ξ̃_j] = Σ_k c^k_ij ξ̃_k`. Then `i([ξ̃_i, ξ̃_j])Ω = d{f_j, f_i}`,
//! so the Poissonian defect of a pair is `{f_j, f_i} − Σ_k c^k_ij f_k`,
//! always a constant.

mod extend;
mod reduce;
mod routes;

use std::fmt;

use num_traits::Zero;

use crate::cartan::{
    exterior_derivative, integrate_closed_one_form, interior, lie_bracket, Chart, DiffForm,
    VectorField,
};
use crate::error::{Error, Result};
use crate::gotay::ideal::solve_combination;
use crate::gotay::ConstraintSet;
use crate::presymp::PresympSystem;
use crate::symexpr::{Poly, Rational};

pub use extend::{
    build_time_extended, coisotropic_extend, extend_momentum_noncompatible, CoisotropicExtension,
    ExtensionSource, MomentumExtension, TimeExtended,
};
pub use reduce::{
    dynamics_on_level, kernel_generated, kernel_in_span_on, reduce, BasePoint, ExplicitQuotient,
    KernelGenerated, KernelSpan, LevelDynamics, ReducedSpace,
};
pub use routes::{route_equivalence, Route, RouteMode, RouteReport, RouteResult};

/// `c[i][j][k]` with `[ξ̃_i, ξ̃_j] = Σ_k c[i][j][k] ξ̃_k`.
pub type StructureConstants = Vec<Vec<Vec<Rational>>>;

/// Named generators of an infinitesimal action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSpec {
    pub chart: Chart,
    pub names: Vec<String>,
    pub generators: Vec<VectorField>,
    pub structure: Option<StructureConstants>,
    /// Primitive `Θ` with `dΘ = Ω` for exact actions.
    pub theta: Option<DiffForm>,
    /// Generators declared to lie in `ker Ω`.
    pub kernel_decl: Vec<String>,
}

impl ActionSpec {
    pub fn new(chart: &Chart, named: Vec<(String, VectorField)>) -> Result<ActionSpec> {
        let mut names = Vec::new();
        let mut generators = Vec::new();
        for (n, g) in named {
            let g = if g.chart() == chart {
                g
            } else {
                g.embed(chart)?
            };
            if names.contains(&n) {
                return Err(Error::Model(format!("generator '{n}' declared twice")));
            }
            names.push(n);
            generators.push(g);
        }
        Ok(ActionSpec {
            chart: chart.clone(),
            names,
            generators,
            structure: None,
            theta: None,
            kernel_decl: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn with_theta(mut self, theta: DiffForm) -> ActionSpec {
        self.theta = Some(theta);
        self
    }

    /// Declared constants, checked against the brackets.
    pub fn with_structure(mut self, c: StructureConstants) -> Result<ActionSpec> {
        self.check_structure(&c)?;
        self.structure = Some(c);
        Ok(self)
    }

    pub fn check_structure(&self, c: &StructureConstants) -> Result<()> {
        let n = self.len();
        if c.len() != n
            || c.iter()
                .any(|r| r.len() != n || r.iter().any(|k| k.len() != n))
        {
            return Err(Error::StructureConstants(format!(
                "expected a {n}x{n}x{n} array"
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let b = lie_bracket(&self.generators[i], &self.generators[j])?;
                let mut rhs = VectorField::zero(&self.chart);
                for (k, g) in self.generators.iter().enumerate() {
                    if !c[i][j][k].is_zero() {
                        rhs = rhs.try_add(&g.map_components(|p| p.scale(&c[i][j][k])))?;
                    }
                }
                if b != rhs {
                    return Err(Error::StructureConstants(format!(
                        "[{}, {}] = {} but the constants give {}",
                        self.names[i], self.names[j], b, rhs
                    )));
                }
            }
        }
        Ok(())
    }

    /// Constants from the brackets, or an error if some bracket leaves the
    /// span of the generators.
    pub fn compute_structure(&self) -> Result<StructureConstants> {
        let n = self.len();
        let dynv = self.chart.dynamic();
        let all = vec![true; self.chart.len()];
        let columns: Vec<Vec<Poly>> = self
            .generators
            .iter()
            .map(|g| dynv.iter().map(|&i| g.component(i)).collect())
            .collect();
        let mut c = vec![vec![vec![Rational::zero(); n]; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let b = lie_bracket(&self.generators[i], &self.generators[j])?;
                if b.is_zero() {
                    continue;
                }
                let rhs: Vec<Poly> = dynv.iter().map(|&k| b.component(k)).collect();
                let coeffs = solve_combination(&rhs, &columns, &all, 0).ok_or_else(|| {
                    Error::StructureConstants(format!(
                        "[{}, {}] = {} is not a constant combination of the generators",
                        self.names[i], self.names[j], b
                    ))
                })?;
                for (k, p) in coeffs.iter().enumerate() {
                    let v = p.constant_value().unwrap_or_else(Rational::zero);
                    c[j][i][k] = -v.clone();
                    c[i][j][k] = v;
                }
            }
        }
        Ok(c)
    }

    pub fn structure_or_compute(&self) -> Result<StructureConstants> {
        match &self.structure {
            Some(c) => Ok(c.clone()),
            None => self.compute_structure(),
        }
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// The same action on another chart containing this one.
    pub fn embed(&self, chart: &Chart) -> Result<ActionSpec> {
        let generators = self
            .generators
            .iter()
            .map(|g| g.embed(chart))
            .collect::<Result<Vec<_>>>()?;
        let theta = self.theta.as_ref().map(|t| t.embed(chart)).transpose()?;
        Ok(ActionSpec {
            chart: chart.clone(),
            generators,
            theta,
            ..self.clone()
        })
    }
}

/// `d(i(ξ̃)Ω) = 0` for every generator.
pub fn check_locally_hamiltonian(sys: &PresympSystem, action: &ActionSpec) -> Result<()> {
    for (name, g) in action.names.iter().zip(&action.generators) {
        let a = interior(g, &sys.omega)?;
        if !exterior_derivative(&a).is_zero() {
            return Err(Error::NotLocallyHamiltonian(name.clone()));
        }
    }
    Ok(())
}

/// How the Hamiltonians of the generators bracket.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Poissonian {
    /// `{f_j, f_i} = f_{[ξ_i, ξ_j]}` exactly.
    Strict,
    /// Some pairs are off by the listed constants.
    Weak(Vec<((usize, usize), Rational)>),
    /// A non-constant defect; impossible for a closed form, kept as a check.
    Fails { pair: (usize, usize), defect: Poly },
}

impl Poissonian {
    pub fn label(&self) -> &'static str {
        match self {
            Poissonian::Strict => "strict",
            Poissonian::Weak(_) => "weak",
            Poissonian::Fails { .. } => "fails",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentumSource {
    /// `f = −i(ξ̃)Θ`.
    Primitive,
    /// Radial integration of `i(ξ̃)Ω`.
    Integrated,
    /// Supplied and checked.
    Given,
}

#[derive(Clone, Debug)]
pub struct MomentumMap {
    pub action: ActionSpec,
    pub structure: StructureConstants,
    pub hamiltonians: Vec<Poly>,
    /// `i(ξ̃)Ω = 0`; those Hamiltonians are normalized to 0.
    pub in_kernel: Vec<bool>,
    pub poissonian: Poissonian,
    pub source: MomentumSource,
}

impl MomentumMap {
    /// Check `i(ξ̃_i)Ω = df_i` for supplied Hamiltonians.
    pub fn from_hamiltonians(
        sys: &PresympSystem,
        action: ActionSpec,
        hamiltonians: Vec<Poly>,
    ) -> Result<MomentumMap> {
        finish(sys, action, hamiltonians, MomentumSource::Given)
    }

    pub fn len(&self) -> usize {
        self.hamiltonians.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hamiltonians.is_empty()
    }
}

fn finish(
    sys: &PresympSystem,
    action: ActionSpec,
    hamiltonians: Vec<Poly>,
    source: MomentumSource,
) -> Result<MomentumMap> {
    let chart = &sys.chart;
    let mut in_kernel = Vec::new();
    let mut hs = Vec::new();
    for ((name, g), f) in action
        .names
        .iter()
        .zip(&action.generators)
        .zip(hamiltonians)
    {
        let f = f.embed(chart.vars())?;
        let a = interior(g, &sys.omega)?;
        let df = exterior_derivative(&DiffForm::function(chart, f.clone()));
        if a != df {
            return Err(Error::NotHamiltonian(format!("{f} for generator {name}")));
        }
        let k = a.is_zero();
        in_kernel.push(k);
        hs.push(if k && source != MomentumSource::Given {
            chart.zero()
        } else {
            f
        });
    }
    let structure = action.structure_or_compute()?;
    let poissonian = poissonian(sys, &action, &structure, &hs)?;
    Ok(MomentumMap {
        action,
        structure,
        hamiltonians: hs,
        in_kernel,
        poissonian,
        source,
    })
}

fn poissonian(
    sys: &PresympSystem,
    action: &ActionSpec,
    c: &StructureConstants,
    f: &[Poly],
) -> Result<Poissonian> {
    let g = &action.generators;
    let mut weak = Vec::new();
    for i in 0..g.len() {
        for j in (i + 1)..g.len() {
            // {f_j, f_i} = i(ξ_i) i(ξ_j) Ω
            let bracket = interior(&g[i], &interior(&g[j], &sys.omega)?)?.as_function();
            let mut defect = bracket;
            for (k, fk) in f.iter().enumerate() {
                defect = &defect - &fk.scale(&c[i][j][k]);
            }
            if defect.is_zero() {
                continue;
            }
            match defect.constant_value() {
                Some(v) => weak.push(((i, j), v)),
                None => {
                    return Ok(Poissonian::Fails {
                        pair: (i, j),
                        defect,
                    })
                }
            }
        }
    }
    Ok(if weak.is_empty() {
        Poissonian::Strict
    } else {
        Poissonian::Weak(weak)
    })
}

/// Hamiltonians of every generator, from `Θ` when given.
pub fn build_momentum(sys: &PresympSystem, action: &ActionSpec) -> Result<MomentumMap> {
    let action = if action.chart == sys.chart {
        action.clone()
    } else {
        action.embed(&sys.chart)?
    };
    check_locally_hamiltonian(sys, &action)?;
    let mut hs = Vec::new();
    let source = if let Some(theta) = &action.theta {
        let d = exterior_derivative(theta).try_sub(&sys.omega)?;
        if !d.is_zero() {
            return Err(Error::NotPrimitive(format!("dΘ − Ω = {d}")));
        }
        for g in &action.generators {
            hs.push(-&interior(g, theta)?.as_function());
        }
        MomentumSource::Primitive
    } else {
        for g in &action.generators {
            hs.push(integrate_closed_one_form(&interior(g, &sys.omega)?)?);
        }
        MomentumSource::Integrated
    };
    finish(sys, action, hs, source)
}

/// `{f_i − μ_i}` over the generators outside `ker Ω`.
#[derive(Clone, Debug)]
pub struct LevelSet {
    pub mu: Vec<Rational>,
    /// `(generator index, ζ)`, unnormalized.
    pub constraints: Vec<(usize, Poly)>,
    pub set: ConstraintSet,
}

impl LevelSet {
    pub fn polys(&self) -> Vec<Poly> {
        self.constraints.iter().map(|(_, z)| z.clone()).collect()
    }
}

impl fmt::Display for LevelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs: Vec<String> = self
            .constraints
            .iter()
            .map(|(_, z)| z.to_string())
            .collect();
        write!(f, "{{{}}}", cs.join(", "))
    }
}

pub fn level_set(mm: &MomentumMap, mu: &[Rational]) -> Result<LevelSet> {
    if mu.len() != mm.len() {
        return Err(Error::MuArity {
            expected: mm.len(),
            got: mu.len(),
        });
    }
    let chart = &mm.action.chart;
    let mut constraints = Vec::new();
    for (i, (f, m)) in mm.hamiltonians.iter().zip(mu).enumerate() {
        if mm.in_kernel[i] {
            if !m.is_zero() {
                return Err(Error::NotWeaklyRegular(format!(
                    "mu_{} = {} but generator {} lies in ker Ω, where the momentum is the constant 0",
                    i + 1,
                    m,
                    mm.action.names[i]
                )));
            }
            continue;
        }
        let z = f - &chart.constant(m.clone());
        if !z.is_zero() {
            constraints.push((i, z));
        }
    }
    let set =
        ConstraintSet::unnormalized(chart, constraints.iter().map(|(_, z)| z.clone()).collect())?;
    Ok(LevelSet {
        mu: mu.to_vec(),
        constraints,
        set,
    })
}

/// Outcome of checking `dζ_k = i(ξ̃_k)Ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PfaffVerdict {
    pub checked: usize,
    /// Position in the level set of the first failing constraint.
    pub offending: Option<usize>,
    pub defect: Option<String>,
}

impl PfaffVerdict {
    pub fn passed(&self) -> bool {
        self.offending.is_none()
    }
}

pub fn pfaff_check(
    sys: &PresympSystem,
    mm: &MomentumMap,
    level: &LevelSet,
) -> Result<PfaffVerdict> {
    let chart = &sys.chart;
    for (k, (g, z)) in level.constraints.iter().enumerate() {
        let dz = exterior_derivative(&DiffForm::function(chart, z.embed(chart.vars())?));
        let a = interior(&mm.action.generators[*g], &sys.omega)?;
        let d = dz.try_sub(&a)?;
        if !d.is_zero() {
            return Ok(PfaffVerdict {
                checked: k + 1,
                offending: Some(k),
                defect: Some(d.to_string()),
            });
        }
    }
    Ok(PfaffVerdict {
        checked: level.constraints.len(),
        offending: None,
        defect: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::rat;

    fn plane() -> (PresympSystem, ActionSpec) {
        let c = Chart::new("R4", &["q1", "p1", "q2", "p2"], &[] as &[&str]).unwrap();
        let w = DiffForm::parse(&c, "dq1^dp1 + dq2^dp2").unwrap();
        let sys = PresympSystem::new(c.clone(), w, c.zero()).unwrap();
        let rot = VectorField::parse(&c, "p1 d/dq1 - q1 d/dp1").unwrap();
        let tr = VectorField::parse(&c, "d/dq2").unwrap();
        let a = ActionSpec::new(&c, vec![("rot".into(), rot), ("tr".into(), tr)]).unwrap();
        (sys, a)
    }

    #[test]
    fn integrated_hamiltonians_satisfy_the_identity() {
        let (sys, a) = plane();
        let mm = build_momentum(&sys, &a).unwrap();
        // i(p1 ∂q1 − q1 ∂p1)(dq1∧dp1) = p1 dp1 + q1 dq1
        assert_eq!(
            mm.hamiltonians[0],
            sys.chart.poly("1/2*q1^2 + 1/2*p1^2").unwrap()
        );
        assert_eq!(mm.hamiltonians[1], sys.chart.poly("p2").unwrap());
        assert_eq!(mm.poissonian, Poissonian::Strict);
        assert_eq!(mm.source, MomentumSource::Integrated);
    }

    #[test]
    fn heisenberg_pair_is_weak() {
        let c = Chart::new("R2", &["q", "p"], &[] as &[&str]).unwrap();
        let sys =
            PresympSystem::new(c.clone(), DiffForm::parse(&c, "dq^dp").unwrap(), c.zero()).unwrap();
        let a = ActionSpec::new(
            &c,
            vec![
                ("a".into(), VectorField::parse(&c, "d/dq").unwrap()),
                ("b".into(), VectorField::parse(&c, "d/dp").unwrap()),
            ],
        )
        .unwrap();
        let mm = build_momentum(&sys, &a).unwrap();
        match mm.poissonian {
            Poissonian::Weak(v) => assert_eq!(v, vec![((0, 1), rat(-1))]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn structure_constants_of_rotations() {
        let c = Chart::new("R3", &["x", "y", "z"], &[] as &[&str]).unwrap();
        let g = |s: &str| VectorField::parse(&c, s).unwrap();
        let a = ActionSpec::new(
            &c,
            vec![
                ("l1".into(), g("y d/dz - z d/dy")),
                ("l2".into(), g("z d/dx - x d/dz")),
                ("l3".into(), g("x d/dy - y d/dx")),
            ],
        )
        .unwrap();
        let s = a.compute_structure().unwrap();
        a.check_structure(&s).unwrap();
        let mut bad = s.clone();
        bad[0][1][2] = -&bad[0][1][2];
        assert!(matches!(
            a.clone().with_structure(bad),
            Err(Error::StructureConstants(_))
        ));
    }

    #[test]
    fn theta_must_be_a_primitive() {
        let (sys, a) = plane();
        let theta = DiffForm::parse(&sys.chart, "p1 dq1").unwrap();
        assert!(matches!(
            build_momentum(&sys, &a.clone().with_theta(theta)),
            Err(Error::NotPrimitive(_))
        ));
        let theta = DiffForm::parse(&sys.chart, "1/2*q1 dp1 - 1/2*p1 dq1 - p2 dq2").unwrap();
        let mm = build_momentum(&sys, &a.with_theta(theta)).unwrap();
        assert_eq!(mm.hamiltonians[1], sys.chart.poly("p2").unwrap());
    }

    #[test]
    fn non_hamiltonian_generator_is_refused() {
        let (sys, _) = plane();
        let g = VectorField::parse(&sys.chart, "q1 d/dq1").unwrap();
        let a = ActionSpec::new(&sys.chart, vec![("dil".into(), g)]).unwrap();
        assert!(
            matches!(build_momentum(&sys, &a), Err(Error::NotLocallyHamiltonian(n)) if n == "dil")
        );
    }

    #[test]
    fn kernel_generator_needs_zero_mu() {
        let c = Chart::new("R3", &["q", "p", "z"], &[] as &[&str]).unwrap();
        let sys =
            PresympSystem::new(c.clone(), DiffForm::parse(&c, "dq^dp").unwrap(), c.zero()).unwrap();
        let a = ActionSpec::new(
            &c,
            vec![
                ("tq".into(), VectorField::parse(&c, "d/dq").unwrap()),
                ("tz".into(), VectorField::parse(&c, "d/dz").unwrap()),
            ],
        )
        .unwrap();
        let mm = build_momentum(&sys, &a).unwrap();
        assert_eq!(mm.in_kernel, vec![false, true]);
        assert!(matches!(
            level_set(&mm, &[rat(1)]),
            Err(Error::MuArity {
                expected: 2,
                got: 1
            })
        ));
        assert!(matches!(
            level_set(&mm, &[rat(1), rat(1)]),
            Err(Error::NotWeaklyRegular(_))
        ));
        let ls = level_set(&mm, &[rat(1), rat(0)]).unwrap();
        assert_eq!(ls.polys(), vec![c.poly("p - 1").unwrap()]);
        assert!(pfaff_check(&sys, &mm, &ls).unwrap().passed());
    }

    #[test]
    fn corrupted_level_constraint_is_located() {
        let (sys, a) = plane();
        let mm = build_momentum(&sys, &a).unwrap();
        let mut ls = level_set(&mm, &[rat(1), rat(2)]).unwrap();
        ls.constraints[1].1 = &ls.constraints[1].1 + &sys.chart.poly("q1").unwrap();
        let v = pfaff_check(&sys, &mm, &ls).unwrap();
        assert_eq!(v.offending, Some(1));
    }
}
