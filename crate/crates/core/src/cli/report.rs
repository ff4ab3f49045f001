//! JSON and text renderings. JSON field order is the declaration order of
//! these structs, so output is byte-stable for a fixed seed.

use std::fmt::Write as _;

use serde::Serialize;

use super::Failure;
use crate::cartan::Chart;
use crate::gotay::StabilizationReport;
use crate::model::ReductionSetup;
use crate::momred::{MomentumMap, Poissonian, RouteReport};

pub const SCHEMA: u32 = 1;

#[derive(Serialize)]
pub struct Envelope<T: Serialize> {
    schema: u32,
    command: &'static str,
    model: String,
    seed: u64,
    #[serde(flatten)]
    body: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(command: &'static str, model: &str, seed: u64, body: T) -> Envelope<T> {
        Envelope {
            schema: SCHEMA,
            command,
            model: model.to_string(),
            seed,
            body,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Serialize)]
struct ErrorBody {
    error: ErrorJson,
}

#[derive(Serialize)]
struct ErrorJson {
    kind: &'static str,
    message: String,
    exit_code: i32,
}

pub fn error_json(command: &'static str, model: &str, seed: u64, f: &Failure) -> String {
    Envelope::new(
        command,
        model,
        seed,
        ErrorBody {
            error: ErrorJson {
                kind: f.kind,
                message: f.message.clone(),
                exit_code: f.code,
            },
        },
    )
    .to_json()
}

#[derive(Serialize)]
pub struct ChartJson {
    name: String,
    dim: usize,
    variables: Vec<String>,
    parameters: Vec<String>,
}

impl ChartJson {
    fn new(c: &Chart) -> ChartJson {
        ChartJson {
            name: c.name.clone(),
            dim: c.dim(),
            variables: c.dynamic_names(),
            parameters: c.parameter_names(),
        }
    }
}

#[derive(Serialize)]
struct FixingJson {
    param: String,
    value: String,
}

#[derive(Serialize)]
struct GenerationJson {
    index: usize,
    constraints: Vec<String>,
    fixings: Vec<FixingJson>,
    dim: usize,
}

#[derive(Serialize)]
struct FamilyTerm {
    parameter: String,
    field: String,
}

#[derive(Serialize)]
struct CheckJson {
    item: String,
    verdict: String,
}

#[derive(Serialize)]
pub struct StabilizeJson {
    sode: bool,
    chart: ChartJson,
    generations: Vec<GenerationJson>,
    final_constraints: Vec<String>,
    final_dim: usize,
    dim_method: &'static str,
    regular: Option<bool>,
    particular: String,
    family: Vec<FamilyTerm>,
    free_parameters: Vec<String>,
    tangency: Vec<CheckJson>,
    equation: String,
}

impl StabilizeJson {
    pub fn new(r: &StabilizationReport) -> StabilizeJson {
        StabilizeJson {
            sode: r.sode,
            chart: ChartJson::new(&r.chart),
            generations: r
                .generations
                .iter()
                .enumerate()
                .map(|(i, g)| GenerationJson {
                    index: i,
                    constraints: g.constraints.iter().map(|c| c.to_string()).collect(),
                    fixings: g
                        .fixings
                        .iter()
                        .map(|f| FixingJson {
                            param: f.param.clone(),
                            value: f.value.to_string(),
                        })
                        .collect(),
                    dim: g.dim,
                })
                .collect(),
            final_constraints: r
                .final_set
                .constraints
                .iter()
                .map(|c| c.to_string())
                .collect(),
            final_dim: r.dim,
            dim_method: r.dim_method,
            regular: r.regular,
            particular: r.family.particular.to_string(),
            family: r
                .family
                .free_parameter_names
                .iter()
                .zip(&r.family.kernel_basis)
                .map(|(n, z)| FamilyTerm {
                    parameter: n.clone(),
                    field: z.to_string(),
                })
                .collect(),
            free_parameters: r.free_parameters().to_vec(),
            tangency: r
                .tangency
                .iter()
                .map(|(c, v)| CheckJson {
                    item: c.to_string(),
                    verdict: v.label(),
                })
                .collect(),
            equation: r.equation.label(),
        }
    }
}

#[derive(Serialize)]
struct SetupJson {
    mode: &'static str,
    chart: ChartJson,
    constraints: Vec<String>,
    dropped_generators: Vec<String>,
    stabilization_dim: usize,
}

#[derive(Serialize)]
struct GeneratorJson {
    name: String,
    field: String,
    hamiltonian: String,
    in_kernel: bool,
}

#[derive(Serialize)]
struct MomentumJson {
    source: String,
    poissonian: &'static str,
    weak_defects: Vec<String>,
    generators: Vec<GeneratorJson>,
}

#[derive(Serialize)]
struct Assignment {
    var: String,
    value: String,
}

#[derive(Serialize)]
struct KernelGeneratedJson {
    global_kernel: bool,
    certified: bool,
    kernel: Vec<String>,
}

#[derive(Serialize)]
struct ExplicitJson {
    variables: Vec<String>,
    omega: String,
    hamiltonian: String,
}

#[derive(Serialize)]
struct CompleteJson {
    level_constraints: Vec<String>,
    ambient_dim: usize,
    level_dim: usize,
    rank_omega: usize,
    ker_omega_dim: usize,
    ker_level_form_dim: usize,
    isotropy_dim: usize,
    quotient_dim: usize,
    reduced_rank: usize,
    symplectic: bool,
    regular: bool,
    kernel_decomposition: bool,
    kernel_in_span: bool,
    kernel_generated: KernelGeneratedJson,
    verdict: &'static str,
    explicit: Option<ExplicitJson>,
}

#[derive(Serialize)]
struct RouteJson {
    route: &'static str,
    mode: &'static str,
    space_dim: usize,
    level_dim: usize,
    isotropy_dim: usize,
    quotient_dim: usize,
    reduced_rank: usize,
    symplectic: bool,
    note: Option<String>,
}

#[derive(Serialize)]
pub struct ReduceJson {
    sode: bool,
    setup: SetupJson,
    momentum: MomentumJson,
    mu: Vec<String>,
    base_point: Vec<Assignment>,
    complete: CompleteJson,
    routes: Vec<RouteJson>,
    routes_agree: bool,
    routes_expected_to_agree: bool,
}

impl ReduceJson {
    pub fn new(
        sode: bool,
        setup: &ReductionSetup,
        mm: &MomentumMap,
        rep: &RouteReport,
    ) -> ReduceJson {
        let a = &rep.complete;
        let chart = &setup.system.chart;
        let weak_defects = match &mm.poissonian {
            Poissonian::Weak(w) => w
                .iter()
                .map(|((i, j), v)| format!("{}, {}: {v}", mm.action.names[*i], mm.action.names[*j]))
                .collect(),
            Poissonian::Fails { pair, defect } => {
                vec![format!(
                    "{}, {}: {defect}",
                    mm.action.names[pair.0], mm.action.names[pair.1]
                )]
            }
            Poissonian::Strict => Vec::new(),
        };
        ReduceJson {
            sode,
            setup: SetupJson {
                mode: setup.mode,
                chart: ChartJson::new(chart),
                constraints: setup
                    .m_set
                    .constraints
                    .iter()
                    .map(|c| c.to_string())
                    .collect(),
                dropped_generators: setup.dropped.clone(),
                stabilization_dim: setup.stabilization.dim,
            },
            momentum: MomentumJson {
                source: format!("{:?}", mm.source).to_lowercase(),
                poissonian: mm.poissonian.label(),
                weak_defects,
                generators: (0..mm.len())
                    .map(|k| GeneratorJson {
                        name: mm.action.names[k].clone(),
                        field: mm.action.generators[k].to_string(),
                        hamiltonian: mm.hamiltonians[k].to_string(),
                        in_kernel: mm.in_kernel[k],
                    })
                    .collect(),
            },
            mu: a.mu.iter().map(|r| r.to_string()).collect(),
            base_point: (0..chart.len())
                .map(|i| Assignment {
                    var: chart.name_of(i).to_string(),
                    value: a.base_point[i].to_string(),
                })
                .collect(),
            complete: CompleteJson {
                level_constraints: a.level.polys().iter().map(|c| c.to_string()).collect(),
                ambient_dim: a.ambient_tangent.dim(),
                level_dim: a.level_dim(),
                rank_omega: a.rank_omega,
                ker_omega_dim: a.ker_omega.dim(),
                ker_level_form_dim: a.ker_level_form.dim(),
                isotropy_dim: a.isotropy_tangent.dim(),
                quotient_dim: a.quotient_dim,
                reduced_rank: a.reduced_rank,
                symplectic: a.symplectic,
                regular: a.regular,
                kernel_decomposition: a.kernel_decomposition,
                kernel_in_span: a.kernel_in_span,
                kernel_generated: KernelGeneratedJson {
                    global_kernel: a.kernel_generated.global_kernel,
                    certified: a.kernel_generated.certified(),
                    kernel: a
                        .kernel_generated
                        .kernel
                        .iter()
                        .map(|z| z.to_string())
                        .collect(),
                },
                verdict: a.verdict(),
                explicit: a.explicit_chart.as_ref().map(|e| ExplicitJson {
                    variables: e.system.chart.dynamic_names(),
                    omega: e.system.omega.to_string(),
                    hamiltonian: e.system.hamiltonian.to_string(),
                }),
            },
            routes: rep
                .results
                .iter()
                .map(|r| RouteJson {
                    route: r.route.label(),
                    mode: r.mode.label(),
                    space_dim: r.space_dim,
                    level_dim: r.level_dim,
                    isotropy_dim: r.isotropy_dim,
                    quotient_dim: r.quotient_dim,
                    reduced_rank: r.reduced_rank,
                    symplectic: r.symplectic,
                    note: r.note.clone(),
                })
                .collect(),
            routes_agree: rep.agree(),
            routes_expected_to_agree: rep.expected_to_agree(),
        }
    }

    pub fn text(&self, model: &str) -> String {
        let mut s = String::new();
        let st = &self.setup;
        let _ = writeln!(
            s,
            "model {model}  sode {}",
            if self.sode { "on" } else { "off" }
        );
        let how = match st.mode {
            "none" => "no constraints",
            "slice" => "constraints solved, working on the slice",
            _ => "constraints kept on the ambient chart",
        };
        let _ = writeln!(s, "chart {} (dim {}): {how}", st.chart.name, st.chart.dim);
        if !st.constraints.is_empty() {
            let _ = writeln!(s, "constraints: {{{}}}", st.constraints.join(", "));
        }
        if !st.dropped_generators.is_empty() {
            let _ = writeln!(
                s,
                "dropped (not tangent to the final set): {}",
                st.dropped_generators.join(", ")
            );
        }
        let m = &self.momentum;
        let _ = writeln!(s, "momentum ({}), poissonian {}", m.source, m.poissonian);
        for g in &m.generators {
            let k = if g.in_kernel { "  [kernel]" } else { "" };
            let _ = writeln!(s, "  f_{} = {}{k}", g.name, g.hamiltonian);
        }
        let _ = writeln!(s, "mu = ({})", self.mu.join(", "));
        let pt: Vec<String> = self
            .base_point
            .iter()
            .map(|a| format!("{}={}", a.var, a.value))
            .collect();
        let _ = writeln!(s, "base point: {}", pt.join(", "));
        let c = &self.complete;
        let _ = writeln!(s, "level set: {{{}}}", c.level_constraints.join(", "));
        let _ = writeln!(
            s,
            "dims: ambient {}  level {}  ker Ω {}  ker Ω_μ {}  isotropy {}  quotient {}",
            c.ambient_dim,
            c.level_dim,
            c.ker_omega_dim,
            c.ker_level_form_dim,
            c.isotropy_dim,
            c.quotient_dim
        );
        let _ = writeln!(
            s,
            "rank Ω {}  reduced rank {}  symplectic {}",
            c.rank_omega, c.reduced_rank, c.symplectic
        );
        let _ = writeln!(
            s,
            "kernel generated {}  kernel in span {}  regular {}",
            c.kernel_generated.certified, c.kernel_in_span, c.regular
        );
        let _ = writeln!(s, "verdict: {}", c.verdict);
        if let Some(e) = &c.explicit {
            let _ = writeln!(s, "explicit quotient on ({}):", e.variables.join(", "));
            let _ = writeln!(s, "  omega = {}", e.omega);
            let _ = writeln!(s, "  hamiltonian = {}", e.hamiltonian);
        }
        if self.routes.len() > 1 {
            let _ = writeln!(s, "routes:");
            for r in &self.routes {
                let _ = writeln!(
                    s,
                    "  {:<22} {:<9} space {:>2}  level {:>2}  isotropy {:>2}  quotient {:>2}  rank {:>2}  symplectic {}",
                    r.route, r.mode, r.space_dim, r.level_dim, r.isotropy_dim, r.quotient_dim, r.reduced_rank, r.symplectic
                );
                if let Some(n) = &r.note {
                    let _ = writeln!(s, "    ({n})");
                }
            }
            let _ = writeln!(
                s,
                "routes agree: {}  (expected: {})",
                self.routes_agree, self.routes_expected_to_agree
            );
        }
        s
    }
}

#[derive(Serialize, Clone)]
pub struct Row {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Serialize, Clone)]
pub struct VerifyJson {
    pub sode: bool,
    pub rows: Vec<Row>,
    pub all_passed: bool,
}

impl VerifyJson {
    pub fn text(&self, model: &str) -> String {
        let mut s = format!("model {model}\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<20} {}  {}",
                r.check,
                if r.passed { "pass" } else { "FAIL" },
                r.detail
            );
        }
        let _ = writeln!(
            s,
            "{}",
            if self.all_passed {
                "all checks pass"
            } else {
                "some checks fail"
            }
        );
        s
    }
}

#[derive(Serialize)]
pub struct ExampleJson {
    pub name: String,
    pub dim: usize,
    pub generators: Vec<String>,
    pub summary: String,
}

#[derive(Serialize)]
struct ExamplesBody<'a> {
    schema: u32,
    command: &'static str,
    examples: &'a [ExampleJson],
}

pub fn examples_json(list: &[ExampleJson]) -> String {
    let mut s = serde_json::to_string_pretty(&ExamplesBody {
        schema: SCHEMA,
        command: "examples",
        examples: list,
    })
    .expect("report serializes");
    s.push('\n');
    s
}
