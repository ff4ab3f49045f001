//! Model files: a line-oriented `key = value` format with `#` comments,
//! described in `docs/model-format.md`, and the built-in examples.
//!
//! A parsed [`Model`] keeps every expression in canonical printed form, so
//! `Model::parse(&m.to_string())` gives back `m` exactly.

pub mod builtins;

use std::fmt;

use crate::cartan::{exterior_derivative, wedge, Chart, DiffForm, VectorField};
use crate::error::{Error, Result};
use crate::gotay::{
    pullback_form, restrict_field, stabilize, ConstraintSet, SampleHint, StabilizationReport,
    StabilizeOptions,
};
use crate::momred::{build_time_extended, ActionSpec, StructureConstants};
use crate::presymp::PresympSystem;
use crate::symexpr::{self, Poly, Rational, Vars};

pub use builtins::{builtin, builtin_names};

/// Declarations the engine cannot check and takes on trust.
pub const ASSUMPTIONS: [&str; 2] = ["free-proper", "closed-subgroup"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormSource {
    Omega {
        omega: String,
        hamiltonian: String,
    },
    /// `ω_L` and `E_L` from the tangent-bundle recipe.
    Lagrangian(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Structure {
    Computed,
    Abelian,
    /// `[a, b] = combination`; unlisted pairs commute.
    Brackets(Vec<(String, String, String)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    pub name: String,
    pub vars: Vec<String>,
    pub params: Vec<String>,
    /// `(position, velocity)`.
    pub tangent: Vec<(String, String)>,
    pub source: FormSource,
    pub theta: Option<String>,
    pub time: Option<String>,
    pub generators: Vec<(String, String)>,
    pub structure: Structure,
    pub kernel: Vec<String>,
    /// `(variable, symbol)` names for the stabilization family.
    pub family: Vec<(String, String)>,
    pub samples: Vec<(String, String)>,
    pub assume: Vec<String>,
}

/// The raw ingredients, before any check on `Ω`.
#[derive(Clone, Debug)]
pub struct Forms {
    pub chart: Chart,
    pub omega: DiffForm,
    pub hamiltonian: Poly,
}

/// A model turned into engine objects.
#[derive(Clone, Debug)]
pub struct Built {
    pub system: PresympSystem,
    pub action: ActionSpec,
    pub hints: Vec<SampleHint>,
    /// Time variable, when time-extended.
    pub time: Option<String>,
}

/// What `reduce` works on after stabilization.
#[derive(Clone, Debug)]
pub struct ReductionSetup {
    pub stabilization: StabilizationReport,
    pub system: PresympSystem,
    pub action: ActionSpec,
    /// Constraint set the system lives on, empty after a pullback.
    pub m_set: ConstraintSet,
    /// `slice` when the final set was solved and pulled back, `ambient`
    /// when it is kept as constraints, `none` when it is empty.
    pub mode: &'static str,
    /// Generators left out because they are not tangent to the final set.
    pub dropped: Vec<String>,
}

fn err(line: usize, msg: impl fmt::Display) -> Error {
    Error::Model(format!("line {line}: {msg}"))
}

fn is_ident(s: &str) -> bool {
    let mut ch = s.chars();
    matches!(ch.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && ch.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn split_list(v: &str) -> Vec<String> {
    v.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

/// One logical line: key, optional label (`generator NAME`), value, the
/// line number and the column where the value starts.
struct Entry {
    key: String,
    label: Option<String>,
    value: String,
    line: usize,
    col: usize,
}

fn entries(text: &str) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    let mut pending: Option<(String, usize)> = None;
    for (k, raw) in text.lines().enumerate() {
        let n = k + 1;
        let body = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let trimmed = body.trim_end();
        let (piece, cont) = match trimmed.strip_suffix('\\') {
            Some(p) => (p, true),
            None => (trimmed, false),
        };
        let (mut acc, start) = pending.take().unwrap_or((String::new(), n));
        if !acc.is_empty() {
            acc.push(' ');
            acc.push_str(piece.trim());
        } else {
            acc.push_str(piece);
        }
        if cont {
            pending = Some((acc, start));
            continue;
        }
        if acc.trim().is_empty() {
            continue;
        }
        let eq = acc
            .find('=')
            .ok_or_else(|| err(start, "expected 'key = value'"))?;
        let head: Vec<&str> = acc[..eq].split_whitespace().collect();
        let value = acc[eq + 1..].trim();
        let lead = acc[eq + 1..].len() - acc[eq + 1..].trim_start().len();
        let col = acc[..eq].chars().count() + 2 + lead;
        let (key, label) = match head.as_slice() {
            [k] => (k.to_string(), None),
            [k, rest @ ..] => (k.to_string(), Some(rest.join(" "))),
            [] => return Err(err(start, "missing key before '='")),
        };
        if value.is_empty() {
            return Err(err(start, format!("empty value for '{key}'")));
        }
        out.push(Entry {
            key,
            label,
            value: value.to_string(),
            line: start,
            col,
        });
    }
    if let Some((_, start)) = pending {
        return Err(err(start, "line continuation at end of file"));
    }
    Ok(out)
}

fn at(e: &Entry, pe: symexpr::ParseError) -> Error {
    Error::Model(format!(
        "line {}, column {}: {}",
        e.line,
        e.col + pe.column - 1,
        pe.message
    ))
}

fn model_err(e: &Entry, inner: Error) -> Error {
    match inner {
        Error::Parse(pe) => at(e, pe),
        other => err(e.line, other),
    }
}

impl Model {
    pub fn parse(text: &str) -> Result<Model> {
        let es = entries(text)?;
        let single = |key: &str| -> Result<Option<&Entry>> {
            let mut found = es.iter().filter(|e| e.key == key);
            let first = found.next();
            if let Some(dup) = found.next() {
                return Err(err(dup.line, format!("'{key}' given twice")));
            }
            Ok(first)
        };
        for e in &es {
            let labelled = matches!(
                e.key.as_str(),
                "generator" | "bracket" | "family" | "sample"
            );
            let known = labelled
                || matches!(
                    e.key.as_str(),
                    "name"
                        | "vars"
                        | "params"
                        | "tangent"
                        | "omega"
                        | "hamiltonian"
                        | "lagrangian"
                        | "theta"
                        | "time"
                        | "structure"
                        | "kernel"
                        | "assume"
                );
            if !known {
                return Err(err(e.line, format!("unknown key '{}'", e.key)));
            }
            if labelled && e.label.is_none() {
                return Err(err(e.line, format!("'{}' needs a name before '='", e.key)));
            }
            if !labelled && e.label.is_some() {
                return Err(err(e.line, format!("unexpected words after '{}'", e.key)));
            }
        }

        let name = match single("name")? {
            Some(e) if is_ident_dashed(&e.value) => e.value.clone(),
            Some(e) => return Err(err(e.line, format!("invalid model name '{}'", e.value))),
            None => "model".to_string(),
        };
        let vars_e = single("vars")?.ok_or_else(|| Error::Model("missing 'vars'".into()))?;
        let vars = split_list(&vars_e.value);
        let params = single("params")?
            .map(|e| split_list(&e.value))
            .unwrap_or_default();
        let params_line = single("params")?.map(|e| e.line).unwrap_or(vars_e.line);
        let mut seen: Vec<&String> = Vec::new();
        for (v, line) in vars
            .iter()
            .map(|v| (v, vars_e.line))
            .chain(params.iter().map(|p| (p, params_line)))
        {
            if !is_ident(v) {
                return Err(err(line, format!("invalid variable name '{v}'")));
            }
            if seen.contains(&v) {
                return Err(err(line, format!("variable '{v}' declared twice")));
            }
            seen.push(v);
        }
        if vars.is_empty() {
            return Err(err(vars_e.line, "no variables"));
        }
        let mut all = vars.clone();
        all.extend(params.iter().cloned());
        let base = Chart::new(&name, &all, &params)?;

        let time = match single("time")? {
            Some(e) => {
                if !is_ident(&e.value) {
                    return Err(err(e.line, format!("invalid time variable '{}'", e.value)));
                }
                if all.contains(&e.value) {
                    return Err(err(
                        e.line,
                        format!("time variable '{}' is already a variable", e.value),
                    ));
                }
                Some(e.value.clone())
            }
            None => None,
        };
        let full = match &time {
            Some(t) => base.extended(&name, &[t.as_str()], &[])?,
            None => base.clone(),
        };

        let mut tangent = Vec::new();
        if let Some(e) = single("tangent")? {
            let mut used: Vec<String> = Vec::new();
            for pair in split_list(&e.value) {
                let (q, v) = pair
                    .split_once(':')
                    .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
                    .ok_or_else(|| {
                        err(
                            e.line,
                            format!("expected 'position:velocity', got '{pair}'"),
                        )
                    })?;
                for x in [&q, &v] {
                    if !vars.contains(x) {
                        return Err(err(e.line, format!("'{x}' in 'tangent' is not a variable")));
                    }
                    if used.contains(x) {
                        return Err(err(e.line, format!("'{x}' paired twice")));
                    }
                    used.push(x.clone());
                }
                tangent.push((q, v));
            }
        }

        let poly = |e: &Entry, chart: &Chart| -> Result<String> {
            symexpr::parse(&e.value, chart.vars())
                .map(|p| p.to_string())
                .map_err(|pe| at(e, pe))
        };
        let form = |e: &Entry, chart: &Chart, deg: usize| -> Result<String> {
            DiffForm::parse_with_degree(chart, deg, &e.value)
                .map(|w| w.to_string())
                .map_err(|x| model_err(e, x))
        };

        let source = match (single("omega")?, single("lagrangian")?) {
            (Some(o), None) => {
                let hamiltonian = match single("hamiltonian")? {
                    Some(h) => poly(h, &base)?,
                    None => "0".to_string(),
                };
                FormSource::Omega {
                    omega: form(o, &base, 2)?,
                    hamiltonian,
                }
            }
            (None, Some(l)) => {
                if let Some(h) = single("hamiltonian")? {
                    return Err(err(
                        h.line,
                        "'hamiltonian' conflicts with 'lagrangian' (the energy is built from it)",
                    ));
                }
                let paired: Vec<&String> = tangent.iter().flat_map(|(q, v)| [q, v]).collect();
                if let Some(v) = vars.iter().find(|v| !paired.contains(v)) {
                    return Err(err(
                        l.line,
                        format!(
                            "'lagrangian' needs every variable paired in 'tangent'; '{v}' is not"
                        ),
                    ));
                }
                FormSource::Lagrangian(poly(l, &base)?)
            }
            (Some(_), Some(l)) => {
                return Err(err(l.line, "give either 'omega' or 'lagrangian', not both"))
            }
            (None, None) => return Err(Error::Model("missing 'omega' or 'lagrangian'".into())),
        };

        let theta = single("theta")?.map(|e| form(e, &full, 1)).transpose()?;

        let mut generators: Vec<(String, String)> = Vec::new();
        for e in es.iter().filter(|e| e.key == "generator") {
            let n = e.label.clone().unwrap();
            if !is_ident(&n) || all.contains(&n) {
                return Err(err(e.line, format!("invalid generator name '{n}'")));
            }
            if generators.iter().any(|(g, _)| *g == n) {
                return Err(err(e.line, format!("generator '{n}' declared twice")));
            }
            let f = VectorField::parse(&full, &e.value).map_err(|x| model_err(e, x))?;
            generators.push((n, f.to_string()));
        }
        let gnames: Vec<String> = generators.iter().map(|(n, _)| n.clone()).collect();
        let gvars = Vars::new(&gnames);

        let mut brackets = Vec::new();
        for e in es.iter().filter(|e| e.key == "bracket") {
            let pair = split_list(e.label.as_deref().unwrap());
            let [a, b] = pair.as_slice() else {
                return Err(err(e.line, "expected 'bracket A, B = combination'"));
            };
            for x in [a, b] {
                if !gnames.contains(x) {
                    return Err(err(e.line, format!("'{x}' is not a generator")));
                }
            }
            if a == b {
                return Err(err(e.line, "a bracket needs two different generators"));
            }
            let p = symexpr::parse(&e.value, &gvars).map_err(|pe| at(e, pe))?;
            if p.terms().any(|(m, _)| m.degree() != 1) {
                return Err(err(
                    e.line,
                    "a bracket must be a constant linear combination of generators",
                ));
            }
            if brackets.iter().any(|(x, y, _): &(String, String, String)| {
                (x == a && y == b) || (x == b && y == a)
            }) {
                return Err(err(
                    e.line,
                    format!("bracket of '{a}' and '{b}' given twice"),
                ));
            }
            brackets.push((a.clone(), b.clone(), p.to_string()));
        }
        let structure = match single("structure")? {
            None if brackets.is_empty() => Structure::Computed,
            None => Structure::Brackets(brackets),
            Some(e) if !brackets.is_empty() => {
                return Err(err(
                    e.line,
                    format!("'structure = {}' conflicts with 'bracket' lines", e.value),
                ))
            }
            Some(e) => match e.value.as_str() {
                "computed" => Structure::Computed,
                "abelian" => Structure::Abelian,
                v => {
                    return Err(err(
                        e.line,
                        format!("unknown structure '{v}' (computed or abelian)"),
                    ))
                }
            },
        };

        let kernel = match single("kernel")? {
            Some(e) => {
                let ks = split_list(&e.value);
                if let Some(k) = ks.iter().find(|k| !gnames.contains(k)) {
                    return Err(err(e.line, format!("'{k}' in 'kernel' is not a generator")));
                }
                ks
            }
            None => Vec::new(),
        };

        let mut family: Vec<(String, String)> = Vec::new();
        for e in es.iter().filter(|e| e.key == "family") {
            let v = e.label.clone().unwrap();
            if !vars.contains(&v) {
                return Err(err(e.line, format!("'{v}' is not a variable")));
            }
            let s = e.value.clone();
            if !is_ident(&s) || all.contains(&s) || Some(&s) == time.as_ref() {
                return Err(err(e.line, format!("invalid family symbol '{s}'")));
            }
            if family.iter().any(|(a, b)| *a == v || *b == s) {
                return Err(err(
                    e.line,
                    format!("family name for '{v}' clashes with an earlier one"),
                ));
            }
            family.push((v, s));
        }

        let hint_names: Vec<String> = (1..=9).map(|i| format!("s{i}")).collect();
        let hint_vars = full.vars().extended(&hint_names);
        let mut samples: Vec<(String, String)> = Vec::new();
        for e in es.iter().filter(|e| e.key == "sample") {
            let v = e.label.clone().unwrap();
            if full
                .vars()
                .index(&v)
                .map(|i| full.is_param(i))
                .unwrap_or(true)
            {
                return Err(err(e.line, format!("'{v}' is not a dynamical variable")));
            }
            if samples.iter().any(|(a, _)| *a == v) {
                return Err(err(e.line, format!("sample hint for '{v}' given twice")));
            }
            let p = symexpr::parse(&e.value, &hint_vars).map_err(|pe| at(e, pe))?;
            samples.push((v, p.to_string()));
        }

        let assume = match single("assume")? {
            Some(e) => {
                let a = split_list(&e.value);
                if let Some(x) = a.iter().find(|x| !ASSUMPTIONS.contains(&x.as_str())) {
                    return Err(err(
                        e.line,
                        format!(
                            "unknown assumption '{x}' (known: {})",
                            ASSUMPTIONS.join(", ")
                        ),
                    ));
                }
                a
            }
            None => Vec::new(),
        };

        Ok(Model {
            name,
            vars,
            params,
            tangent,
            source,
            theta,
            time,
            generators,
            structure,
            kernel,
            family,
            samples,
            assume,
        })
    }

    pub fn base_chart(&self) -> Result<Chart> {
        let mut all = self.vars.clone();
        all.extend(self.params.iter().cloned());
        Chart::new(&self.name, &all, &self.params)
    }

    fn base_forms(&self) -> Result<(DiffForm, Poly)> {
        let base = self.base_chart()?;
        match &self.source {
            FormSource::Omega { omega, hamiltonian } => Ok((
                DiffForm::parse_with_degree(&base, 2, omega)?,
                base.poly(hamiltonian)?,
            )),
            FormSource::Lagrangian(l) => lagrangian_forms(&base, &base.poly(l)?, &self.tangent),
        }
    }

    /// `Ω` and `H` as written (or built from the Lagrangian), unchecked.
    /// With a time variable, `Ω_h = Ω + dH∧dt` and `H = 0`.
    pub fn forms(&self) -> Result<Forms> {
        let (omega, h) = self.base_forms()?;
        let base = omega.chart().clone();
        match &self.time {
            None => Ok(Forms {
                chart: base,
                omega,
                hamiltonian: h,
            }),
            Some(t) => {
                let chart = base.extended(&self.name, &[t.as_str()], &[])?;
                let ti = chart.index(t)?;
                let dh = exterior_derivative(&DiffForm::function(&chart, h.embed(chart.vars())?));
                let w = omega
                    .embed(&chart)?
                    .try_add(&wedge(&dh, &DiffForm::dx(&chart, ti))?)?;
                Ok(Forms {
                    hamiltonian: chart.zero(),
                    chart,
                    omega: w,
                })
            }
        }
    }

    /// The chart generators, `Θ` and hints are written on.
    pub fn full_chart(&self) -> Result<Chart> {
        Ok(self.forms()?.chart)
    }

    pub fn hints(&self) -> Vec<SampleHint> {
        self.samples
            .iter()
            .map(|(v, e)| SampleHint {
                var: v.clone(),
                expr: e.clone(),
            })
            .collect()
    }

    /// Generators and declarations, without building the system.
    pub fn action(&self, chart: &Chart) -> Result<ActionSpec> {
        let named = self
            .generators
            .iter()
            .map(|(n, f)| Ok((n.clone(), VectorField::parse(chart, f)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut action = ActionSpec::new(chart, named)?;
        action.kernel_decl = self.kernel.clone();
        if let Some(t) = &self.theta {
            action = action.with_theta(DiffForm::parse_with_degree(chart, 1, t)?);
        }
        match &self.structure {
            Structure::Computed => {}
            Structure::Abelian => {
                let n = action.len();
                action =
                    action.with_structure(vec![
                        vec![
                            vec![Rational::from_integer(0.into()); n];
                            n
                        ];
                        n
                    ])?;
            }
            Structure::Brackets(bs) => {
                let c = self.bracket_constants(bs)?;
                action = action.with_structure(c)?;
            }
        }
        Ok(action)
    }

    fn bracket_constants(&self, bs: &[(String, String, String)]) -> Result<StructureConstants> {
        let names: Vec<String> = self.generators.iter().map(|(n, _)| n.clone()).collect();
        let n = names.len();
        let vars = Vars::new(&names);
        let zero = Rational::from_integer(0.into());
        let mut c = vec![vec![vec![zero; n]; n]; n];
        for (a, b, combo) in bs {
            let i = names.iter().position(|x| x == a).unwrap();
            let j = names.iter().position(|x| x == b).unwrap();
            let p = symexpr::parse(combo, &vars)?;
            for k in 0..n {
                let v = p.derivative(k).constant_term();
                c[j][i][k] = -v.clone();
                c[i][j][k] = v;
            }
        }
        Ok(c)
    }

    /// System and action, with closedness and the other constructor checks.
    pub fn build(&self) -> Result<Built> {
        let system = match &self.time {
            Some(t) => {
                let (w, h) = self.base_forms()?;
                build_time_extended(&w, &h, t)?.system
            }
            None => {
                let Forms {
                    chart,
                    omega,
                    hamiltonian,
                } = self.forms()?;
                PresympSystem::new(chart, omega, hamiltonian)?
            }
        };
        let action = self.action(&system.chart)?;
        Ok(Built {
            system,
            action,
            hints: self.hints(),
            time: self.time.clone(),
        })
    }

    pub fn stabilize_options(&self, sode: bool, seed: u64) -> Result<StabilizeOptions> {
        if sode && self.tangent.is_empty() {
            return Err(Error::Model(
                "'--sode' needs 'tangent' pairs in the model".into(),
            ));
        }
        Ok(StabilizeOptions {
            sode: if sode {
                Some(self.tangent.clone())
            } else {
                None
            },
            seed,
            hints: self.hints(),
            family_names: self.family.clone(),
            ..Default::default()
        })
    }

    /// Stabilize, then hand `reduce` the final system: pulled back to the
    /// slice when every final constraint is solvable, kept on the ambient
    /// chart with the final set as constraints otherwise.
    pub fn reduction_setup(&self, sode: bool, seed: u64) -> Result<ReductionSetup> {
        let built = self.build()?;
        let stab = stabilize(&built.system, &self.stabilize_options(sode, seed)?)?;
        let fin = stab.final_set.clone();
        if fin.is_empty() {
            return Ok(ReductionSetup {
                m_set: ConstraintSet::empty(&built.system.chart).with_hints(built.hints.clone()),
                system: built.system,
                action: built.action,
                stabilization: stab,
                mode: "none",
                dropped: Vec::new(),
            });
        }
        if !fin.all_solvable() {
            return Ok(ReductionSetup {
                m_set: fin,
                system: built.system,
                action: built.action,
                stabilization: stab,
                mode: "ambient",
                dropped: Vec::new(),
            });
        }
        let sys = crate::gotay::pullback_system(&built.system, &fin)?;
        let mut named = Vec::new();
        let mut dropped = Vec::new();
        for (n, g) in built.action.names.iter().zip(&built.action.generators) {
            match restrict_field(g, &fin) {
                Ok(r) => named.push((n.clone(), r)),
                Err(Error::TangencyNotCertified(_)) => dropped.push(n.clone()),
                Err(e) => return Err(e),
            }
        }
        let mut action = ActionSpec::new(&sys.chart, named)?;
        action.kernel_decl = built
            .action
            .kernel_decl
            .iter()
            .filter(|k| !dropped.contains(k))
            .cloned()
            .collect();
        if let Some(t) = &built.action.theta {
            action = action.with_theta(pullback_form(t, &fin)?);
        }
        if built.action.structure.is_some() && dropped.is_empty() {
            action = action.with_structure(built.action.structure.clone().unwrap())?;
        }
        Ok(ReductionSetup {
            m_set: ConstraintSet::empty(&sys.chart),
            system: sys,
            action,
            stabilization: stab,
            mode: "slice",
            dropped,
        })
    }
}

fn is_ident_dashed(s: &str) -> bool {
    !s.is_empty() && s.split('-').all(is_ident_or_digits)
}

fn is_ident_or_digits(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// `ω_L = −dθ_L` with `θ_L = Σ ∂L/∂v dq`, and `E_L = Σ v ∂L/∂v − L`.
pub fn lagrangian_forms(
    chart: &Chart,
    l: &Poly,
    tangent: &[(String, String)],
) -> Result<(DiffForm, Poly)> {
    let mut theta = DiffForm::zero(chart, 1);
    let mut e = -l;
    for (q, v) in tangent {
        let (qi, vi) = (chart.index(q)?, chart.index(v)?);
        let p = l.derivative(vi);
        theta = theta.try_add(&DiffForm::dx(chart, qi).scale_poly(&p))?;
        e = &e + &(&chart.var(vi) * &p);
    }
    Ok((exterior_derivative(&theta).neg(), e))
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "name = {}", self.name)?;
        writeln!(f, "vars = {}", self.vars.join(", "))?;
        if !self.params.is_empty() {
            writeln!(f, "params = {}", self.params.join(", "))?;
        }
        if !self.tangent.is_empty() {
            let t: Vec<String> = self
                .tangent
                .iter()
                .map(|(q, v)| format!("{q}:{v}"))
                .collect();
            writeln!(f, "tangent = {}", t.join(", "))?;
        }
        match &self.source {
            FormSource::Omega { omega, hamiltonian } => {
                writeln!(f, "omega = {omega}")?;
                writeln!(f, "hamiltonian = {hamiltonian}")?;
            }
            FormSource::Lagrangian(l) => writeln!(f, "lagrangian = {l}")?,
        }
        if let Some(t) = &self.time {
            writeln!(f, "time = {t}")?;
        }
        for (n, g) in &self.generators {
            writeln!(f, "generator {n} = {g}")?;
        }
        if let Some(t) = &self.theta {
            writeln!(f, "theta = {t}")?;
        }
        match &self.structure {
            Structure::Computed => {}
            Structure::Abelian => writeln!(f, "structure = abelian")?,
            Structure::Brackets(bs) => {
                for (a, b, c) in bs {
                    writeln!(f, "bracket {a}, {b} = {c}")?;
                }
            }
        }
        if !self.kernel.is_empty() {
            writeln!(f, "kernel = {}", self.kernel.join(", "))?;
        }
        for (v, s) in &self.family {
            writeln!(f, "family {v} = {s}")?;
        }
        for (v, e) in &self.samples {
            writeln!(f, "sample {v} = {e}")?;
        }
        if !self.assume.is_empty() {
            writeln!(f, "assume = {}", self.assume.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::momred::build_momentum;

    const PLANE: &str = "
        # a rotation on the plane
        name = plane
        vars = q, p
        omega = dq^dp
        hamiltonian = (q^2 + p^2)/2
        generator rot = p d/dq \\
                      - q d/dp
    ";

    #[test]
    fn parses_and_canonicalizes() {
        let m = Model::parse(PLANE).unwrap();
        assert_eq!(m.name, "plane");
        assert_eq!(m.generators[0].1, "p d/dq - q d/dp");
        let FormSource::Omega { hamiltonian, .. } = &m.source else {
            panic!()
        };
        assert_eq!(hamiltonian, "1/2*q^2 + 1/2*p^2");
        let b = m.build().unwrap();
        let mm = build_momentum(&b.system, &b.action).unwrap();
        assert_eq!(
            mm.hamiltonians[0],
            b.system.chart.poly("1/2*q^2 + 1/2*p^2").unwrap()
        );
    }

    #[test]
    fn round_trip() {
        let m = Model::parse(PLANE).unwrap();
        assert_eq!(Model::parse(&m.to_string()).unwrap(), m);
    }

    #[test]
    fn errors_name_the_line() {
        let e = Model::parse("vars = q, p\nomega = dq^dz\n")
            .unwrap_err()
            .to_string();
        assert!(e.contains("line 2, column 12"), "{e}");
        let e = Model::parse("vars = q, p\nomega = dq^dp\ncolour = red\n")
            .unwrap_err()
            .to_string();
        assert!(e.contains("line 3") && e.contains("unknown key"), "{e}");
        let e = Model::parse("vars = q, v\nlagrangian = v^2\n")
            .unwrap_err()
            .to_string();
        assert!(e.contains("paired"), "{e}");
        let e = Model::parse("vars = q, v\ntangent = q:v\nlagrangian = v^2\nhamiltonian = q\n")
            .unwrap_err()
            .to_string();
        assert!(e.contains("conflicts"), "{e}");
        assert!(Model::parse("vars = q\nomega = 0\nvars = p\n").is_err());
        assert!(Model::parse("vars = q, p\nomega = dq^dp\nbracket a, b = a\n").is_err());
    }

    #[test]
    fn lagrangian_recipe() {
        let m =
            Model::parse("vars = q, v\ntangent = q:v\nlagrangian = 1/2*v^2 - 1/2*q^2\n").unwrap();
        let f = m.forms().unwrap();
        assert_eq!(f.omega, DiffForm::parse(&f.chart, "dq^dv").unwrap());
        assert_eq!(f.hamiltonian, f.chart.poly("1/2*v^2 + 1/2*q^2").unwrap());
    }

    #[test]
    fn time_extension_and_brackets() {
        let m = Model::parse(
            "vars = q, p\nomega = dq^dp\nhamiltonian = p\ntime = t\ngenerator tau = -d/dt\ngenerator sh = d/dq\n\
             bracket tau, sh = 0\n",
        )
        .unwrap();
        let b = m.build().unwrap();
        assert_eq!(b.system.chart.len(), 3);
        assert!(b.system.hamiltonian.is_zero());
        let mm = build_momentum(&b.system, &b.action).unwrap();
        assert_eq!(mm.hamiltonians[0], b.system.chart.poly("p").unwrap());
        let bad = "vars = q, p\nomega = dq^dp\ngenerator a = d/dq\ngenerator b = q d/dp\nbracket a, b = 0\n";
        assert!(matches!(
            Model::parse(bad).unwrap().build(),
            Err(Error::StructureConstants(_))
        ));
    }
}
