//! Driver for the `presym` binary.
//!
//! Exit codes: 0 success, 1 usage or model errors, 2 bifurcation or
//! generation cap during stabilization, 3 any other engine failure and
//! failed `verify` rows.

mod report;

use std::ffi::OsString;
use std::fmt::Write as _;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::cartan::closedness_defect;
use crate::error::Error;
use crate::gotay::stabilize;
use crate::model::{builtin, builtin_names, builtins::builtin_text, Model};
use crate::momred::{
    build_momentum, check_locally_hamiltonian, kernel_generated, kernel_in_span_on, level_set,
    pfaff_check, route_equivalence, BasePoint, Poissonian, Route,
};
use crate::symexpr::Rational;

pub use report::SCHEMA;
use report::{Envelope, ReduceJson, Row, StabilizeJson, VerifyJson};

/// Points sampled by the kernel-span row of `verify`.
const SPAN_SAMPLES: usize = 8;

#[derive(Parser, Debug)]
#[command(
    name = "presym",
    version,
    about = "Exact presymplectic mechanics: stabilization, momentum maps, reduction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the constraint algorithm.
    Stabilize(Common),
    /// Reduce a level set of the momentum map.
    Reduce {
        #[command(flatten)]
        common: Common,
        /// Comma-separated rationals, one per generator (kernel generators may be left out). Defaults to zeros.
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
        /// `auto` or `var=value, ...` for every chart variable and parameter.
        #[arg(long, default_value = "auto")]
        point: String,
        #[arg(long, value_enum, default_value_t = RouteArg::Complete)]
        route: RouteArg,
    },
    /// Run the invariant battery and print a pass/fail matrix.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Level used by the Pfaff check. Defaults to zeros.
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
    },
    /// List the built-in models, or print one as a model file.
    Examples {
        name: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        report: Format,
    },
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).multiple(false)))]
struct Common {
    /// Built-in model name.
    #[arg(long, group = "source")]
    example: Option<String>,
    /// Path to a model file.
    #[arg(long, group = "source")]
    model: Option<std::path::PathBuf>,
    /// Ask for second-order solutions during stabilization.
    #[arg(long)]
    sode: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    report: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    Complete,
    GaugeThenSymplectic,
    Coisotropic,
    All,
}

impl RouteArg {
    fn routes(self) -> Vec<Route> {
        match self {
            RouteArg::Complete => vec![Route::Complete],
            RouteArg::GaugeThenSymplectic => vec![Route::Complete, Route::GaugeThenSymplectic],
            RouteArg::Coisotropic => vec![Route::Complete, Route::Coisotropic],
            RouteArg::All => Route::ALL.to_vec(),
        }
    }
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Failure {
        Failure {
            code: 1,
            kind: "usage",
            message: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let (code, kind) = match &e {
            Error::Parse(_) | Error::Model(_) | Error::UnknownVariable(_) => (1, "model"),
            Error::MuArity { .. } => (1, "usage"),
            Error::Bifurcation(_) => (2, "bifurcation"),
            Error::GenerationCap(_) => (2, "generation-cap"),
            _ => (3, "engine"),
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

/// Output of one command: what to print and the exit code.
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parse arguments, run, print, return the exit code.
pub fn run<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let out = execute(args);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.code
}

/// Like [`run`] but returns the output instead of printing it.
pub fn execute<I: IntoIterator<Item = OsString>>(args: I) -> Outcome {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code,
                }
            } else {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            };
        }
    };
    let (command, format, name, seed) = describe(&cli.command);
    match dispatch(&cli.command) {
        Ok((text, code)) => Outcome {
            stdout: text,
            stderr: String::new(),
            code,
        },
        Err(f) => {
            let stdout = if format == Format::Json {
                report::error_json(command, &name, seed, &f)
            } else {
                String::new()
            };
            Outcome {
                stdout,
                stderr: format!("presym {command}: {}\n", f.message),
                code: f.code,
            }
        }
    }
}

fn describe(c: &Command) -> (&'static str, Format, String, u64) {
    let src = |c: &Common| {
        c.example.clone().unwrap_or_else(|| {
            c.model
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default()
        })
    };
    match c {
        Command::Stabilize(c) => ("stabilize", c.report, src(c), c.seed),
        Command::Reduce { common, .. } => ("reduce", common.report, src(common), common.seed),
        Command::Verify { common, .. } => ("verify", common.report, src(common), common.seed),
        Command::Examples { report, name } => {
            ("examples", *report, name.clone().unwrap_or_default(), 0)
        }
    }
}

fn load(c: &Common) -> Result<Model, Failure> {
    match (&c.example, &c.model) {
        (Some(name), None) => Ok(builtin(name)?),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure {
                code: 1,
                kind: "io",
                message: format!("{}: {e}", path.display()),
            })?;
            Model::parse(&text).map_err(|e| Failure {
                code: 1,
                kind: "model",
                message: format!("{}: {e}", path.display()),
            })
        }
        _ => Err(Failure::usage("give exactly one of --example and --model")),
    }
}

fn parse_rationals(text: &str) -> Result<Vec<Rational>, Failure> {
    text.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<Rational>()
                .map_err(|_| Failure::usage(format!("'{s}' is not a rational number")))
        })
        .collect()
}

fn dispatch(c: &Command) -> Result<(String, i32), Failure> {
    match c {
        Command::Stabilize(common) => cmd_stabilize(common),
        Command::Reduce {
            common,
            mu,
            point,
            route,
        } => cmd_reduce(common, mu.as_deref(), point, *route),
        Command::Verify { common, mu } => cmd_verify(common, mu.as_deref()),
        Command::Examples { name, report } => cmd_examples(name.as_deref(), *report),
    }
}

fn cmd_stabilize(c: &Common) -> Result<(String, i32), Failure> {
    let m = load(c)?;
    let built = m.build()?;
    let r = stabilize(&built.system, &m.stabilize_options(c.sode, c.seed)?)?;
    let out = match c.report {
        Format::Json => {
            Envelope::new("stabilize", &m.name, c.seed, StabilizeJson::new(&r)).to_json()
        }
        Format::Text => format!("model {}\n{r}\n", m.name),
    };
    Ok((out, 0))
}

/// `μ` over the setup's generators; kernel generators may be omitted.
fn expand_mu(
    given: Option<&str>,
    names: &[String],
    kernel: &[String],
) -> Result<Vec<Rational>, Failure> {
    let zero = Rational::from_integer(0.into());
    let Some(text) = given else {
        return Ok(vec![zero; names.len()]);
    };
    let mu = parse_rationals(text)?;
    if mu.len() == names.len() {
        return Ok(mu);
    }
    let outside = names.iter().filter(|n| !kernel.contains(n)).count();
    if mu.len() == outside && !kernel.is_empty() {
        let mut it = mu.into_iter();
        return Ok(names
            .iter()
            .map(|n| {
                if kernel.contains(n) {
                    zero.clone()
                } else {
                    it.next().unwrap()
                }
            })
            .collect());
    }
    let expect = if kernel.is_empty() {
        format!("{}", names.len())
    } else {
        format!("{} or {outside}", names.len())
    };
    Err(Failure::usage(format!(
        "--mu has {} entries; the action ({}) needs {expect}",
        mu.len(),
        names.join(", ")
    )))
}

fn parse_point(text: &str, chart: &crate::cartan::Chart) -> Result<BasePoint, Failure> {
    if text.trim() == "auto" {
        return Ok(BasePoint::Auto);
    }
    let mut values: Vec<Option<Rational>> = vec![None; chart.len()];
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("expected 'var=value', got '{part}'")))?;
        let i = chart
            .vars()
            .index(k.trim())
            .ok_or_else(|| Failure::usage(format!("unknown variable '{}'", k.trim())))?;
        let v = v
            .trim()
            .parse::<Rational>()
            .map_err(|_| Failure::usage(format!("'{}' is not a rational number", v.trim())))?;
        values[i] = Some(v);
    }
    let missing: Vec<&str> = (0..chart.len())
        .filter(|&i| values[i].is_none())
        .map(|i| chart.name_of(i))
        .collect();
    if !missing.is_empty() {
        return Err(Failure::usage(format!(
            "--point leaves out {}",
            missing.join(", ")
        )));
    }
    Ok(BasePoint::Given(
        values.into_iter().map(Option::unwrap).collect(),
    ))
}

fn cmd_reduce(
    c: &Common,
    mu: Option<&str>,
    point: &str,
    route: RouteArg,
) -> Result<(String, i32), Failure> {
    let m = load(c)?;
    let setup = m.reduction_setup(c.sode, c.seed)?;
    let mu = expand_mu(mu, &setup.action.names, &setup.action.kernel_decl)?;
    let base = parse_point(point, &setup.system.chart)?;
    let mm = build_momentum(&setup.system, &setup.action)?;
    let rep = route_equivalence(
        &setup.system,
        &mm,
        &mu,
        &base,
        &setup.m_set,
        &route.routes(),
        c.seed,
    )?;
    let body = ReduceJson::new(c.sode, &setup, &mm, &rep);
    let out = match c.report {
        Format::Json => Envelope::new("reduce", &m.name, c.seed, body).to_json(),
        Format::Text => body.text(&m.name),
    };
    Ok((out, 0))
}

fn cmd_verify(c: &Common, mu: Option<&str>) -> Result<(String, i32), Failure> {
    let m = load(c)?;
    let rows = verify_rows(&m, c.sode, mu, c.seed)?;
    let passed = rows.iter().all(|r| r.passed);
    let body = VerifyJson {
        sode: c.sode,
        rows,
        all_passed: passed,
    };
    let out = match c.report {
        Format::Json => Envelope::new("verify", &m.name, c.seed, body.clone()).to_json(),
        Format::Text => body.text(&m.name),
    };
    Ok((out, if passed { 0 } else { 3 }))
}

pub(crate) const CHECKS: [&str; 5] = [
    "closedness",
    "locally-hamiltonian",
    "poissonian",
    "kernel-generated",
    "pfaff",
];

fn row(check: &str, passed: bool, detail: impl Into<String>) -> Row {
    Row {
        check: check.to_string(),
        passed,
        detail: detail.into(),
    }
}

fn skipped(rows: &mut Vec<Row>, why: &str) {
    for c in CHECKS.iter().skip(rows.len()) {
        rows.push(row(c, false, format!("not run: {why}")));
    }
}

/// Rows of the `verify` matrix. Failures become rows; only a model that
/// does not load is an error.
fn verify_rows(m: &Model, sode: bool, mu: Option<&str>, seed: u64) -> Result<Vec<Row>, Failure> {
    let mut rows = Vec::new();
    let forms = m.forms()?;
    match closedness_defect(&forms.omega) {
        None => rows.push(row("closedness", true, "dΩ = 0")),
        Some((comp, val)) => {
            rows.push(row(
                "closedness",
                false,
                format!("component {comp} of dΩ is {val}"),
            ));
            skipped(&mut rows, "Ω is not closed");
            return Ok(rows);
        }
    }
    let setup = match m.reduction_setup(sode, seed) {
        Ok(s) => s,
        Err(e) => {
            skipped(&mut rows, &format!("stabilization failed: {e}"));
            return Ok(rows);
        }
    };
    let (sys, action) = (&setup.system, &setup.action);
    match check_locally_hamiltonian(sys, action) {
        Ok(()) => rows.push(row(
            "locally-hamiltonian",
            true,
            format!(
                "d i(ξ)Ω = 0 for {}",
                if action.is_empty() {
                    "no generators".into()
                } else {
                    action.names.join(", ")
                }
            ),
        )),
        Err(e) => {
            rows.push(row("locally-hamiltonian", false, e.to_string()));
            skipped(&mut rows, "no momentum map");
            return Ok(rows);
        }
    }
    let mm = match build_momentum(sys, action) {
        Ok(mm) => mm,
        Err(e) => {
            rows.push(row("poissonian", false, e.to_string()));
            skipped(&mut rows, "no momentum map");
            return Ok(rows);
        }
    };
    match &mm.poissonian {
        Poissonian::Strict => {
            rows.push(row("poissonian", true, "strict: {f_j, f_i} = f_[ξ_i, ξ_j]"))
        }
        Poissonian::Weak(w) => {
            let mut d = String::from("weak, constant defects");
            for ((i, j), v) in w {
                let _ = write!(
                    d,
                    " ({}, {}): {v}",
                    mm.action.names[*i], mm.action.names[*j]
                );
            }
            rows.push(row("poissonian", true, d));
        }
        Poissonian::Fails { pair, defect } => rows.push(row(
            "poissonian",
            false,
            format!(
                "defect {defect} for ({}, {})",
                mm.action.names[pair.0], mm.action.names[pair.1]
            ),
        )),
    }
    let a2 = kernel_generated(sys, &mm)?;
    let span = kernel_in_span_on(sys, &mm, &setup.m_set, SPAN_SAMPLES, seed);
    let (ok, detail) = match (&span, a2.global_kernel) {
        (Err(e), _) => (false, format!("sampling failed: {e}")),
        (Ok(_), false) => (false, "ker Ω has no global polynomial basis".to_string()),
        (Ok(s), true) => {
            let global = a2.certified();
            let missing: Vec<String> = a2
                .kernel
                .iter()
                .zip(&a2.coefficients)
                .filter(|(_, c)| c.is_none())
                .map(|(z, _)| z.to_string())
                .collect();
            let mut d = if global {
                format!(
                    "ker Ω = span of {} field(s), each certified in the span of the generators",
                    a2.kernel.len()
                )
            } else {
                format!("not in the span of the generators: {}", missing.join("; "))
            };
            if !setup.m_set.is_empty() {
                let _ = write!(
                    d,
                    "; ker of Ω on the constraint set (dim {}) in the span at {} sampled points: {}",
                    s.kernel_dim,
                    s.checked,
                    if s.holds() { "yes" } else { "no" }
                );
            }
            (global && s.holds(), d)
        }
    };
    rows.push(row("kernel-generated", ok, detail));
    let mu = expand_mu(mu, &mm.action.names, &mm.action.kernel_decl)?;
    let pf = level_set(&mm, &mu).and_then(|l| pfaff_check(sys, &mm, &l));
    rows.push(match pf {
        Ok(v) if v.passed() => row(
            "pfaff",
            true,
            format!("dζ = i(ξ)Ω for {} level constraint(s)", v.checked),
        ),
        Ok(v) => row(
            "pfaff",
            false,
            format!(
                "level constraint {} fails: {}",
                v.offending.unwrap(),
                v.defect.unwrap_or_default()
            ),
        ),
        Err(e) => row("pfaff", false, e.to_string()),
    });
    Ok(rows)
}

fn cmd_examples(name: Option<&str>, format: Format) -> Result<(String, i32), Failure> {
    if let Some(n) = name {
        let text = builtin_text(n)?;
        return Ok((text, 0));
    }
    let mut list = Vec::new();
    for n in builtin_names() {
        let m = builtin(n)?;
        let chart = m.full_chart()?;
        list.push(report::ExampleJson {
            name: n.to_string(),
            dim: chart.dim(),
            generators: m.generators.iter().map(|(g, _)| g.clone()).collect(),
            summary: builtin_text(n)?
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("# ")
                .to_string(),
        });
    }
    Ok(match format {
        Format::Json => (report::examples_json(&list), 0),
        Format::Text => {
            let mut s = String::new();
            for e in &list {
                let _ = writeln!(
                    s,
                    "{:<14} dim {:>2}  generators {:<24} {}",
                    e.name,
                    e.dim,
                    e.generators.join(","),
                    e.summary
                );
            }
            s.push_str(
                "conformal-d<N> selects the dimension of the conformal example (default 2)\n",
            );
            (s, 0)
        }
    })
}
