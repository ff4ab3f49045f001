//! Presymplectic Hamiltonian systems `(M, Ω, H)` on a chart.
//!
//! The contraction equation `i(X)Ω = β` is solved over the polynomial ring
//! by elimination with unit pivots, so kernels and Hamiltonian fields come
//! out as global polynomial fields. Constant-coefficient forms always admit
//! this; other forms are accepted when unit pivots suffice and refused
//! otherwise.

use std::fmt;

use crate::cartan::{
    closedness_defect, exterior_derivative, integrate_closed_one_form, interior, Chart, DiffForm,
    VectorField,
};
use crate::error::{Error, Result};
use crate::linred::{pointwise, ring_solve, RingSolve};
use crate::sample::Sampler;
use crate::symexpr::Poly;

/// Number of random points used for the constant-rank check.
pub const RANK_SAMPLES: usize = 16;

/// Closed 2-form with a Hamiltonian on a chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresympSystem {
    pub chart: Chart,
    pub omega: DiffForm,
    pub hamiltonian: Poly,
}

impl PresympSystem {
    /// Checks closedness exactly and constant rank at sampled points.
    pub fn new(chart: Chart, omega: DiffForm, hamiltonian: Poly) -> Result<PresympSystem> {
        PresympSystem::with_rank_samples(chart, omega, hamiltonian, RANK_SAMPLES, 0)
    }

    pub fn with_rank_samples(
        chart: Chart,
        omega: DiffForm,
        hamiltonian: Poly,
        samples: usize,
        seed: u64,
    ) -> Result<PresympSystem> {
        if omega.chart() != &chart {
            return Err(Error::ChartMismatch("form and chart differ".into()));
        }
        if omega.degree() != 2 {
            return Err(Error::InvalidDegree(format!(
                "expected a 2-form, got degree {}",
                omega.degree()
            )));
        }
        if let Some((component, value)) = closedness_defect(&omega) {
            return Err(Error::NotClosed { component, value });
        }
        let hamiltonian = hamiltonian.embed(chart.vars())?;
        let sys = PresympSystem {
            chart,
            omega,
            hamiltonian,
        };
        sys.check_constant_rank(samples, seed)?;
        Ok(sys)
    }

    fn check_constant_rank(&self, samples: usize, seed: u64) -> Result<()> {
        if self.omega.is_constant_coefficient() || samples == 0 {
            return Ok(());
        }
        let mut rng = Sampler::new(seed ^ 0x5eed);
        let mut seen: Option<usize> = None;
        for _ in 0..samples {
            let pt = rng.point(&self.chart);
            let r = match pointwise(&self.omega, &pt) {
                Ok(f) => f.rank(),
                Err(Error::DivisionByZero(_)) => continue,
                Err(e) => return Err(e),
            };
            match seen {
                None => seen = Some(r),
                Some(s) if s != r => {
                    return Err(Error::NonConstantRank(format!(
                        "rank {s} and rank {r} at sampled points"
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Same form, different Hamiltonian.
    pub fn with_hamiltonian(&self, h: Poly) -> PresympSystem {
        PresympSystem {
            chart: self.chart.clone(),
            omega: self.omega.clone(),
            hamiltonian: h,
        }
    }

    /// Rank of `Ω` at a point.
    pub fn rank_at(&self, point: &[crate::symexpr::Rational]) -> Result<usize> {
        Ok(pointwise(&self.omega, point)?.rank())
    }

    /// Rows `i`, columns `j`: coefficient of `dx_i` in `i(∂_j)Ω`.
    fn contraction_matrix(&self) -> Vec<Vec<Poly>> {
        let dynv = self.chart.dynamic();
        let n = dynv.len();
        let mut m = vec![vec![self.chart.zero(); n]; n];
        let pos = |i: usize| dynv.iter().position(|&k| k == i).unwrap();
        for (idx, c) in self.omega.components() {
            let (a, b) = (pos(idx[0]), pos(idx[1]));
            // i(∂_a)(c dx_a∧dx_b) = c dx_b ; i(∂_b)(…) = −c dx_a
            m[b][a] = &m[b][a] + c;
            m[a][b] = &m[a][b] - c;
        }
        m
    }

    fn field_from(&self, comps: &[Poly]) -> VectorField {
        let mut v = VectorField::zero(&self.chart);
        for (k, &i) in self.chart.dynamic().iter().enumerate() {
            v.set(i, comps[k].clone());
        }
        v
    }

    /// Solve `i(X)Ω = β` for polynomial `X`. `Ok(None)` when `β` is not in
    /// the image.
    pub fn solve_contraction(
        &self,
        beta: &DiffForm,
    ) -> Result<Option<(VectorField, Vec<VectorField>)>> {
        if beta.degree() != 1 {
            return Err(Error::InvalidDegree(
                "right-hand side must be a 1-form".into(),
            ));
        }
        let beta = if beta.chart() == &self.chart {
            beta.clone()
        } else {
            beta.embed(&self.chart)?
        };
        let dynv = self.chart.dynamic();
        let rhs: Vec<Poly> = dynv.iter().map(|&i| beta.component(&[i])).collect();
        let m = self.contraction_matrix();
        match ring_solve(&m, dynv.len(), &[rhs], self.chart.param_mask()) {
            RingSolve::Solved {
                particular,
                null_space,
            } => {
                let x = self.field_from(&particular[0]);
                let ker = null_space.iter().map(|v| self.field_from(v)).collect();
                Ok(Some((x, ker)))
            }
            RingSolve::Inconsistent { .. } => Ok(None),
            RingSolve::NonUnitPivot { column } => Err(Error::NonConstantKernel(format!(
                "the contraction matrix has no unit pivot in column {}",
                self.chart.name_of(dynv[column])
            ))),
        }
    }
}

impl fmt::Display for PresympSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "chart {} [{}]",
            self.chart.name,
            self.chart.dynamic_names().join(", ")
        )?;
        writeln!(f, "omega = {}", self.omega)?;
        write!(f, "H = {}", self.hamiltonian)
    }
}

/// `particular + Σ c_a kernel_basis[a]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionFamily {
    pub particular: VectorField,
    pub kernel_basis: Vec<VectorField>,
    pub free_parameter_names: Vec<String>,
}

impl SolutionFamily {
    /// Member with the given parameter values.
    pub fn member(&self, c: &[Poly]) -> VectorField {
        let mut x = self.particular.clone();
        for (z, ci) in self.kernel_basis.iter().zip(c) {
            x = x.try_add(&z.scale_poly(ci)).expect("same chart");
        }
        x
    }

    pub fn free_count(&self) -> usize {
        self.kernel_basis.len()
    }
}

fn family(x: VectorField, ker: Vec<VectorField>) -> SolutionFamily {
    let names = (1..=ker.len()).map(|i| format!("c{i}")).collect();
    SolutionFamily {
        particular: x,
        kernel_basis: ker,
        free_parameter_names: names,
    }
}

/// A basis of `ker Ω` as global fields.
pub fn kernel_distribution(sys: &PresympSystem) -> Result<Vec<VectorField>> {
    let zero = DiffForm::zero(&sys.chart, 1);
    let (_, ker) = sys
        .solve_contraction(&zero)?
        .expect("zero is always in the image");
    for z in &ker {
        debug_assert!(interior(z, &sys.omega)?.is_zero());
    }
    Ok(ker)
}

/// All `X` with `i(X)Ω = df`, or `None` if `f` is not presymplectic
/// Hamiltonian.
pub fn hamiltonian_vector_field(sys: &PresympSystem, f: &Poly) -> Result<Option<SolutionFamily>> {
    let f = f.embed(sys.chart.vars())?;
    let df = exterior_derivative(&DiffForm::function(&sys.chart, f));
    let Some((x, ker)) = sys.solve_contraction(&df)? else {
        return Ok(None);
    };
    let check = interior(&x, &sys.omega)?.try_sub(&df)?;
    if !check.is_zero() {
        return Err(Error::NotHamiltonian(format!(
            "substitution check failed: {check}"
        )));
    }
    Ok(Some(family(x, ker)))
}

/// `{f1, f2} = i(X2)i(X1)Ω = X2(f1)`.
pub fn poisson_bracket(sys: &PresympSystem, f1: &Poly, f2: &Poly) -> Result<Poly> {
    let fam1 =
        hamiltonian_vector_field(sys, f1)?.ok_or_else(|| Error::NotHamiltonian(f1.to_string()))?;
    let fam2 =
        hamiltonian_vector_field(sys, f2)?.ok_or_else(|| Error::NotHamiltonian(f2.to_string()))?;
    let bracket = |x1: &VectorField, x2: &VectorField| -> Result<Poly> {
        let w = interior(x2, &interior(x1, &sys.omega)?)?;
        Ok(w.as_function())
    };
    let b = bracket(&fam1.particular, &fam2.particular)?;
    let ones: Vec<Poly> = fam1
        .kernel_basis
        .iter()
        .map(|_| Poly::one(sys.chart.vars()))
        .collect();
    let twos: Vec<Poly> = fam2
        .kernel_basis
        .iter()
        .map(|_| Poly::one(sys.chart.vars()).scale(&crate::symexpr::rat(-2)))
        .collect();
    let b2 = bracket(&fam1.member(&ones), &fam2.member(&twos))?;
    if b != b2 {
        return Err(Error::NotHamiltonian(
            "bracket depends on the kernel choice".into(),
        ));
    }
    Ok(b)
}

/// Where a vector field sits relative to `Ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    Kernel,
    /// `i(X)Ω = d function`. `from_closed_form` is true: the primitive came
    /// from integrating a closed form, i.e. the field is locally Hamiltonian
    /// and the chart makes it globally so.
    Hamiltonian {
        function: Poly,
        from_closed_form: bool,
    },
    /// `i(X)Ω` is not closed; `defect` names the offending component.
    NotHamiltonian {
        defect: String,
    },
}

pub fn classify(sys: &PresympSystem, x: &VectorField) -> Result<Classification> {
    let x = if x.chart() == &sys.chart {
        x.clone()
    } else {
        x.embed(&sys.chart)?
    };
    let a = interior(&x, &sys.omega)?;
    if a.is_zero() {
        return Ok(Classification::Kernel);
    }
    match integrate_closed_one_form(&a) {
        Ok(function) => Ok(Classification::Hamiltonian {
            function,
            from_closed_form: true,
        }),
        Err(Error::NotClosed { component, value }) => Ok(Classification::NotHamiltonian {
            defect: format!("{component}: {value}"),
        }),
        Err(e) => Err(e),
    }
}

/// Does `f` have zero derivative along every field of `fields`.
pub fn annihilated_by(f: &Poly, fields: &[VectorField]) -> bool {
    fields.iter().all(|z| z.apply(f).is_zero())
}
