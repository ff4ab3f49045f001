//! Constraint stabilization for presymplectic systems.
//!
//! The equation `i(X)Ω = dH` is solved once, globally: a particular field
//! plus a kernel family with one symbol `k_<var>` per kernel generator.
//! Compatibility conditions of the equation are the first constraints.
//! Each pass then asks for tangency of the family to every constraint
//! (and for the second-order condition when requested). A residue that
//! still contains a family symbol with a unit coefficient fixes that
//! symbol; a residue free of symbols becomes a new constraint; anything
//! else is a bifurcation. The process stops when a pass adds nothing.

pub mod gauge;
pub mod ideal;
pub mod sample;

use std::fmt;

use crate::cartan::{exterior_derivative, interior, Chart, DiffForm, VectorField};
use crate::error::{Error, Result};
use crate::linred::{rank, ring_solve_relaxed};
use crate::presymp::{PresympSystem, SolutionFamily};
use crate::symexpr::{Poly, Rational};

pub use gauge::{gauge_fields, gauge_reduce, pointwise_gauge, GaugeReduction, PointwiseGauge};
pub use ideal::{
    ideal_reduce, ideal_reduce_default, normal_form, pullback_form, pullback_poly, pullback_system,
    restrict_field, slice_data, vanishes_on, ConstraintSet, Reduction, SampleHint, Vanishing,
};
pub use sample::sample_points;

/// Default bound on the number of generations.
pub const GENERATION_CAP: usize = 16;

/// Samples used to measure dimensions and regularity.
const DIM_SAMPLES: usize = 8;

#[derive(Clone, Debug)]
pub struct StabilizeOptions {
    /// `(position, velocity)` pairs for the second-order condition.
    pub sode: Option<Vec<(String, String)>>,
    pub cap: usize,
    pub seed: u64,
    /// Sampling hints for the constraint sets that appear.
    pub hints: Vec<SampleHint>,
    /// `(variable, symbol)`: name of the family symbol for the kernel
    /// direction labelled by `variable`. Unlisted ones get `k_<variable>`.
    pub family_names: Vec<(String, String)>,
}

impl Default for StabilizeOptions {
    fn default() -> Self {
        StabilizeOptions {
            sode: None,
            cap: GENERATION_CAP,
            seed: 0,
            hints: Vec::new(),
            family_names: Vec::new(),
        }
    }
}

/// `param := value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixing {
    pub param: String,
    pub value: Poly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generation {
    pub constraints: Vec<Poly>,
    /// Symbols fixed while making the family tangent to everything up to
    /// and including this generation.
    pub fixings: Vec<Fixing>,
    /// Dimension of the set cut out by all generations so far.
    pub dim: usize,
}

#[derive(Clone, Debug)]
pub struct StabilizationReport {
    pub chart: Chart,
    pub generations: Vec<Generation>,
    pub final_set: ConstraintSet,
    /// Family on the ambient chart, valid on the final set.
    pub family: SolutionFamily,
    pub sode: bool,
    /// Tangency of the final family to each constraint.
    pub tangency: Vec<(Poly, Vanishing)>,
    /// `i(X)Ω − dH` restricted to the final set, per component.
    pub equation: Vanishing,
    pub dim: usize,
    /// `jacobian` when dimensions come from sampled Jacobian ranks,
    /// `count` when no sample point was found.
    pub dim_method: &'static str,
    /// Constant Jacobian rank over the samples, when sampled.
    pub regular: Option<bool>,
}

impl StabilizationReport {
    pub fn free_parameters(&self) -> &[String] {
        &self.family.free_parameter_names
    }
}

impl fmt::Display for StabilizationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "chart {} (dim {})", self.chart.name, self.chart.dim())?;
        writeln!(f, "sode: {}", if self.sode { "on" } else { "off" })?;
        for (g, gen) in self.generations.iter().enumerate() {
            let cs: Vec<String> = gen.constraints.iter().map(|c| c.to_string()).collect();
            writeln!(f, "generation {g}: {{{}}} dim {}", cs.join(", "), gen.dim)?;
            for fx in &gen.fixings {
                writeln!(f, "  fix {} = {}", fx.param, fx.value)?;
            }
        }
        writeln!(f, "final dim {} ({})", self.dim, self.dim_method)?;
        writeln!(f, "X = {}", self.family.particular)?;
        for (name, z) in self
            .family
            .free_parameter_names
            .iter()
            .zip(&self.family.kernel_basis)
        {
            writeln!(f, "  + {name} * ({z})")?;
        }
        writeln!(
            f,
            "free parameters: {}",
            self.family.free_parameter_names.len()
        )?;
        for (c, v) in &self.tangency {
            writeln!(f, "tangency X({c}): {}", v.label())?;
        }
        write!(f, "equation on final set: {}", self.equation.label())
    }
}

/// Rank of the Jacobian of `cs` over the dynamical variables at `pt`.
pub fn jacobian_rank(chart: &Chart, cs: &[Poly], pt: &[Rational]) -> Result<usize> {
    let dynv = chart.dynamic();
    let mut m = Vec::new();
    for c in cs {
        let row = dynv
            .iter()
            .map(|&i| c.derivative(i).eval(pt))
            .collect::<Result<Vec<_>>>()?;
        m.push(row);
    }
    Ok(rank(&m, dynv.len()))
}

fn family_name(chart: &Chart, var: &str) -> String {
    let mut name = format!("k_{var}");
    while chart.vars().index(&name).is_some() {
        name.insert(0, 'k');
    }
    name
}

/// Run the stabilization algorithm.
pub fn stabilize(sys: &PresympSystem, opts: &StabilizeOptions) -> Result<StabilizationReport> {
    let chart = &sys.chart;
    let dh = exterior_derivative(&DiffForm::function(chart, sys.hamiltonian.clone()));
    let relaxed = relaxed_solve(sys, &dh)?;
    let (xp, kernel, labels, primary) = relaxed;

    let knames: Vec<String> = labels
        .iter()
        .map(|l| match opts.family_names.iter().find(|(v, _)| v == l) {
            Some((_, n)) => n.clone(),
            None => family_name(chart, l),
        })
        .collect();
    let ext = chart.extended(&format!("{}+family", chart.name), &[] as &[String], &knames)?;
    let mut units = chart.param_mask().to_vec();
    units.extend(knames.iter().map(|_| false));
    let kidx: Vec<usize> = knames.iter().map(|n| ext.index(n).unwrap()).collect();

    let mut x = xp.embed(&ext)?;
    for (z, &k) in kernel.iter().zip(&kidx) {
        x = x.try_add(&z.embed(&ext)?.scale_poly(&ext.var(k)))?;
    }

    let sode_pairs: Vec<(usize, Poly)> = match &opts.sode {
        None => Vec::new(),
        Some(pairs) => pairs
            .iter()
            .map(|(q, v)| Ok((ext.index(q)?, ext.var(ext.index(v)?))))
            .collect::<Result<Vec<_>>>()?,
    };

    let mut free: Vec<usize> = kidx.clone();
    let mut active: Vec<Poly> = Vec::new();
    let mut generations: Vec<Generation> = Vec::new();
    let mut incoming: Vec<Poly> = primary
        .iter()
        .map(|p| p.embed(ext.vars()))
        .collect::<Result<Vec<_>>>()?;

    loop {
        if generations.len() >= opts.cap {
            return Err(Error::GenerationCap(opts.cap));
        }
        let fresh = dedupe_new(&active, incoming);
        if let Some(r) = fresh.iter().find(|r| r.is_unit(&units)) {
            return Err(Error::UnsolvableConstraint(format!(
                "the system demands {r} = 0"
            )));
        }
        if !generations.is_empty() && fresh.is_empty() {
            break;
        }
        active.extend(fresh.iter().cloned());
        generations.push(Generation {
            constraints: fresh,
            fixings: Vec::new(),
            dim: 0,
        });
        let set = ConstraintSet::with_units(&ext, active.clone(), units.clone())?
            .with_hints(opts.hints.clone());
        let residues_free: Vec<Poly>;
        loop {
            let mut residues = Vec::new();
            for (q, v) in &sode_pairs {
                residues.push(&x.component(*q) - v);
            }
            for c in &set.constraints {
                residues.push(x.apply(c));
            }
            let mut reduced = Vec::new();
            for r in residues {
                if let Some(r) = residue_left(&r, &set)? {
                    reduced.push(r);
                }
            }
            match pick_fixing(&reduced, &free, &units, &ext)? {
                Some((k, value)) => {
                    free.retain(|&f| f != k);
                    x = x.map_components(|c| c.substitute(k, &value));
                    generations.last_mut().unwrap().fixings.push(Fixing {
                        param: ext.name_of(k).to_string(),
                        value,
                    });
                }
                None => {
                    residues_free = reduced;
                    break;
                }
            }
        }
        incoming = residues_free;
        if incoming.is_empty() {
            break;
        }
    }

    // Family on the ambient chart.
    let mut particular = x.map_components(|c| {
        free.iter()
            .fold(c.clone(), |acc, &k| acc.substitute(k, &ext.zero()))
    });
    particular = particular.embed(chart)?;
    let mut basis = Vec::new();
    let mut names = Vec::new();
    for &k in &free {
        let z = x.map_components(|c| c.derivative(k));
        basis.push(z.embed(chart)?);
        names.push(ext.name_of(k).to_string());
    }
    let family = SolutionFamily {
        particular,
        kernel_basis: basis,
        free_parameter_names: names,
    };

    for g in generations.iter_mut() {
        g.constraints = g
            .constraints
            .iter()
            .map(|c| c.embed(chart.vars()))
            .collect::<Result<_>>()?;
        for fx in g.fixings.iter_mut() {
            fx.value = fx
                .value
                .embed(chart.vars())
                .or_else(|_| Ok::<Poly, Error>(fx.value.clone()))?;
        }
    }
    let all: Vec<Poly> = generations
        .iter()
        .flat_map(|g| g.constraints.clone())
        .collect();
    let final_set = ConstraintSet::new(chart, all)?.with_hints(opts.hints.clone());

    // Certificates on the extended chart, where free symbols stay symbolic.
    let set_ext = ConstraintSet::with_units(&ext, active.clone(), units.clone())?
        .with_hints(opts.hints.clone());
    let mut tangency = Vec::new();
    for c in &set_ext.constraints {
        let v = vanishes_on(&x.apply(c), &set_ext, opts.seed)?;
        tangency.push((c.embed(chart.vars())?, v));
    }
    let eq = interior(&x, &sys.omega.embed(&ext)?)?.try_sub(&dh.embed(&ext)?)?;
    let mut equation = Vanishing::Certified;
    for (_, c) in eq.components() {
        let v = vanishes_on(c, &set_ext, opts.seed)?;
        equation = weaker(equation, v);
    }

    let (dim_method, regular) = measure_dims(chart, &mut generations, &final_set, opts.seed)?;
    let dim = generations.last().map(|g| g.dim).unwrap_or(chart.dim());
    Ok(StabilizationReport {
        chart: chart.clone(),
        generations,
        final_set,
        family,
        sode: opts.sode.is_some(),
        tangency,
        equation,
        dim,
        dim_method,
        regular,
    })
}

fn weaker(a: Vanishing, b: Vanishing) -> Vanishing {
    match (&a, &b) {
        (Vanishing::Fails { .. }, _) | (Vanishing::Unknown(_), _) => a,
        (_, Vanishing::Fails { .. }) | (_, Vanishing::Unknown(_)) => b,
        (Vanishing::Sampled(_), _) => a,
        _ => b,
    }
}

fn measure_dims(
    chart: &Chart,
    gens: &mut [Generation],
    set: &ConstraintSet,
    seed: u64,
) -> Result<(&'static str, Option<bool>)> {
    let pts = if set.is_empty() {
        Ok(vec![vec![]])
    } else {
        sample_points(set, DIM_SAMPLES, seed)
    };
    match pts {
        Ok(pts) => {
            let mut regular = true;
            let mut upto: Vec<Poly> = Vec::new();
            for g in gens.iter_mut() {
                upto.extend(g.constraints.iter().cloned());
                let mut ranks = Vec::new();
                for p in &pts {
                    ranks.push(if upto.is_empty() {
                        0
                    } else {
                        jacobian_rank(chart, &upto, p)?
                    });
                }
                let r = *ranks.iter().max().unwrap_or(&0);
                if ranks.iter().any(|&x| x != r) {
                    regular = false;
                }
                g.dim = chart.dim() - r;
            }
            Ok(("jacobian", Some(regular)))
        }
        Err(Error::NoSample(_)) => {
            let mut n = 0;
            for g in gens.iter_mut() {
                n += g.constraints.len();
                g.dim = chart.dim().saturating_sub(n);
            }
            Ok(("count", None))
        }
        Err(e) => Err(e),
    }
}

/// Particular solution, kernel basis labelled by its free column, and
/// compatibility conditions.
fn relaxed_solve(
    sys: &PresympSystem,
    beta: &DiffForm,
) -> Result<(VectorField, Vec<VectorField>, Vec<String>, Vec<Poly>)> {
    let chart = &sys.chart;
    let dynv = chart.dynamic();
    let rhs: Vec<Poly> = dynv.iter().map(|&i| beta.component(&[i])).collect();
    let m = contraction_matrix(sys);
    let sol = ring_solve_relaxed(&m, dynv.len(), &[rhs], chart.param_mask()).map_err(|col| {
        Error::NonConstantKernel(format!(
            "the contraction matrix has no unit pivot in column {}",
            chart.name_of(dynv[col])
        ))
    })?;
    let field = |v: &[Poly]| {
        let mut f = VectorField::zero(chart);
        for (k, &i) in dynv.iter().enumerate() {
            f.set(i, v[k].clone());
        }
        f
    };
    let x = field(&sol.particular[0]);
    let ker = sol.null_space.iter().map(|v| field(v)).collect();
    let labels = sol
        .null_space
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let f = (0..v.len())
                .find(|&f| {
                    v[f] == Poly::one(v[f].vars())
                        && sol
                            .null_space
                            .iter()
                            .enumerate()
                            .all(|(i, w)| i == j || w[f].is_zero())
                })
                .expect("null vectors carry a free column");
            chart.name_of(dynv[f]).to_string()
        })
        .collect();
    Ok((x, ker, labels, sol.residuals[0].clone()))
}

fn contraction_matrix(sys: &PresympSystem) -> Vec<Vec<Poly>> {
    let dynv = sys.chart.dynamic();
    let n = dynv.len();
    let mut m = vec![vec![sys.chart.zero(); n]; n];
    let pos = |i: usize| dynv.iter().position(|&k| k == i).unwrap();
    for (idx, c) in sys.omega.components() {
        let (a, b) = (pos(idx[0]), pos(idx[1]));
        m[b][a] = &m[b][a] + c;
        m[a][b] = &m[a][b] - c;
    }
    m
}

/// Reduce a residue modulo the set; `None` when its membership in the
/// ideal is certified. Sampling is not enough here: hints parametrize the
/// final set, so samples of an intermediate set are not generic.
fn residue_left(r: &Poly, set: &ConstraintSet) -> Result<Option<Poly>> {
    if r.is_zero() {
        return Ok(None);
    }
    if set.is_empty() {
        return Ok(Some(r.clone()));
    }
    let red = ideal_reduce_default(r, set)?;
    if red.certified() {
        return Ok(None);
    }
    let r = normal_form(&red.remainder, &set.constraints, set.units());
    Ok(if r.is_zero() { None } else { Some(r) })
}

/// First residue with a free symbol of unit coefficient, solved for it.
fn pick_fixing(
    residues: &[Poly],
    free: &[usize],
    units: &[bool],
    ext: &Chart,
) -> Result<Option<(usize, Poly)>> {
    let mut blocked: Option<String> = None;
    for r in residues {
        let involved: Vec<usize> = free.iter().copied().filter(|&k| r.involves(k)).collect();
        if involved.is_empty() {
            continue;
        }
        for &k in &involved {
            let (a, b) = r.linear_split(k).expect("family is linear in its symbols");
            if a.is_unit(units) {
                let inv = a.unit_inverse().unwrap();
                return Ok(Some((k, -(&b * &inv))));
            }
        }
        if blocked.is_none() {
            let k = involved[0];
            let (a, _) = r.linear_split(k).unwrap();
            blocked = Some(format!(
                "the coefficient {a} of {} in the tangency residue {r} is not invertible on the constraint set",
                ext.name_of(k)
            ));
        }
    }
    match blocked {
        Some(msg) => Err(Error::Bifurcation(msg)),
        None => Ok(None),
    }
}

fn dedupe_new(active: &[Poly], incoming: Vec<Poly>) -> Vec<Poly> {
    let mut out: Vec<Poly> = Vec::new();
    for p in incoming {
        if p.is_zero() {
            continue;
        }
        let p = p.monic();
        if active.contains(&p) || out.contains(&p) {
            continue;
        }
        out.push(p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(vars: &[&str], omega: &str, h: &str) -> PresympSystem {
        let c = Chart::new("c", vars, &[] as &[&str]).unwrap();
        let w = DiffForm::parse(&c, omega).unwrap();
        let h = c.poly(h).unwrap();
        PresympSystem::new(c, w, h).unwrap()
    }

    #[test]
    fn symplectic_system_needs_no_constraints() {
        let s = sys(&["q", "p"], "dq^dp", "1/2*p^2 + 1/2*q^2");
        let r = stabilize(&s, &StabilizeOptions::default()).unwrap();
        assert_eq!(r.generations.len(), 1);
        assert!(r.generations[0].constraints.is_empty());
        assert_eq!(r.dim, 2);
        assert_eq!(r.family.free_count(), 0);
        assert_eq!(
            r.family.particular,
            VectorField::parse(&s.chart, "p d/dq - q d/dp").unwrap()
        );
    }

    #[test]
    fn primary_constraint_and_fixing() {
        // ker = d/dz, H depends on z: primary constraint z = 0, then k_z = 0.
        let s = sys(&["q", "p", "z"], "dq^dp", "p + 1/2*z^2");
        let r = stabilize(&s, &StabilizeOptions::default()).unwrap();
        assert_eq!(
            r.generations[0].constraints,
            vec![s.chart.poly("z").unwrap()]
        );
        assert_eq!(r.generations[0].fixings.len(), 1);
        assert_eq!(r.generations[0].fixings[0].param, "k_z");
        assert!(r.generations[0].fixings[0].value.is_zero());
        assert_eq!(r.dim, 2);
        assert_eq!(r.family.free_count(), 0);
        assert!(r.equation.holds());
    }

    #[test]
    fn secondary_constraints_chain() {
        // ker = d/dz; H = p z gives z = 0 (primary); X(z) = k_z fixes k_z.
        // H = z + p with ker d/dz: i(d/dz)dH = 1 is inconsistent.
        let s = sys(&["q", "p", "z"], "dq^dp", "z + p");
        assert!(matches!(
            stabilize(&s, &StabilizeOptions::default()),
            Err(Error::UnsolvableConstraint(_))
        ));
        let s = sys(&["q", "p", "z", "w"], "dq^dp", "1/2*p^2 + z*q");
        // primary q = 0; X(q) = p → p = 0; X(p) = −z → z = 0; X(z) = k_z → fix.
        let r = stabilize(&s, &StabilizeOptions::default()).unwrap();
        let cs: Vec<String> = r
            .generations
            .iter()
            .flat_map(|g| g.constraints.iter().map(|c| c.to_string()))
            .collect();
        assert_eq!(cs, vec!["q", "p", "z"]);
        assert_eq!(r.dim, 1);
        assert_eq!(r.free_parameters(), &["k_w".to_string()]);
    }

    #[test]
    fn generation_cap_is_enforced() {
        let s = sys(&["q", "p", "z", "w"], "dq^dp", "1/2*p^2 + z*q");
        let opts = StabilizeOptions {
            cap: 2,
            ..Default::default()
        };
        assert!(matches!(stabilize(&s, &opts), Err(Error::GenerationCap(2))));
    }

    #[test]
    fn bifurcation_when_coefficient_can_vanish() {
        // ker = d/dz; H = q z^2/2 ... primary q z = 0 is not regular; use a
        // tangency residue q k_z instead: H = p + 1/2 z^2 q has primary z q.
        let s = sys(&["q", "p", "z"], "dq^dp", "p*z");
        // primary p = 0; X = z d/dq − … ; X(p) = 0 + …; tangency gives
        // residue via k_z? X = z d/dq + k_z d/dz, X(p) = 0: stable.
        let r = stabilize(&s, &StabilizeOptions::default()).unwrap();
        assert_eq!(
            r.generations[0].constraints,
            vec![s.chart.poly("p").unwrap()]
        );
        let s = sys(&["q", "p", "z", "y"], "dq^dp + dz^dy", "1/2*y^2 + p*z");
        // primary none (symplectic); sanity only
        assert!(stabilize(&s, &StabilizeOptions::default()).is_ok());
        let s = sys(&["q", "p", "z"], "dq^dp", "1/2*q*z^2 + p");
        // primary q z = 0: X(q z) = z + q k_z reduces to a residue with
        // the non-unit coefficient q.
        assert!(matches!(
            stabilize(&s, &StabilizeOptions::default()),
            Err(Error::Bifurcation(_))
        ));
    }
}
