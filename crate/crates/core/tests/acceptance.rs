//! One line per acceptance criterion, then a single assertion over all of
//! them. Run with `cargo test --test acceptance -- --nocapture` to see the
//! lines.

mod common;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::panic::{catch_unwind, AssertUnwindSafe};

use common::*;
use num_traits::Zero;
use presym::cartan::{
    exterior_derivative, interior, lie_bracket, lie_derivative, DiffForm, VectorField,
};
use presym::error::Error;
use presym::gotay::{
    gauge_fields, ideal_reduce_default, stabilize, ConstraintSet, StabilizationReport,
};
use presym::linred::{linear_reduce, pointwise, LinForm, Subspace};
use presym::model::{builtin, Model};
use presym::momred::*;
use presym::presymp::{
    hamiltonian_vector_field, kernel_distribution, poisson_bracket, PresympSystem,
};
use presym::sample::Sampler;
use presym::symexpr::{rat, Poly, Rational};

type Outcome = Result<String, String>;

fn ensure(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn e<T>(r: presym::error::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn mu(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| rat(x)).collect()
}

fn stab(name: &str, sode: bool) -> Result<(Model, StabilizationReport), String> {
    let m = e(builtin(name))?;
    let b = e(m.build())?;
    let r = e(stabilize(&b.system, &e(m.stabilize_options(sode, 0))?))?;
    Ok((m, r))
}

fn fixings(r: &StabilizationReport, g: usize) -> Vec<(String, String)> {
    let mut v: Vec<_> = r.generations[g]
        .fixings
        .iter()
        .map(|f| (f.param.clone(), f.value.to_string()))
        .collect();
    v.sort();
    v
}

fn pair(a: &str, b: &str) -> (String, String) {
    (a.to_string(), b.to_string())
}

fn texts(ps: &[Poly]) -> Vec<String> {
    ps.iter().map(|p| p.to_string()).collect()
}

fn criterion_1() -> Outcome {
    let b = e(e(builtin("capri"))?.build())?;
    let chart = &b.system.chart;
    let ker = e(kernel_distribution(&b.system))?;
    let dynv = chart.dynamic();
    let mut rows = Vec::new();
    for z in &ker {
        let mut row = Vec::new();
        for &i in &dynv {
            row.push(
                z.component(i)
                    .constant_value()
                    .ok_or(format!("non-constant kernel field {z}"))?,
            );
        }
        rows.push(row);
    }
    let idx = |n: &str| dynv.iter().position(|&i| chart.name_of(i) == n).unwrap();
    let expected = Subspace::coordinate(dynv.len(), &[idx("x1"), idx("y1"), idx("u1"), idx("v1")]);
    ensure(
        Subspace::span(dynv.len(), &rows) == expected,
        "kernel distribution differs",
    )?;
    // Pointwise check by the oracle's own elimination.
    let mut rng = Sampler::new(11);
    for _ in 0..16 {
        let pt = rng.point(chart);
        let a = e(pointwise(&b.system.omega, &pt))?.matrix();
        ensure(
            same_span(&null_space(&a, dynv.len()), expected.basis(), dynv.len()),
            "pointwise kernel differs",
        )?;
    }
    Ok("ker ω_L = span{∂x1, ∂y1, ∂u1, ∂v1}, 16 pointwise checks".into())
}

fn criterion_2() -> Outcome {
    let (m, off) = stab("capri", false)?;
    let chart = e(m.full_chart())?;
    let p = |s: &str| chart.poly(s).unwrap();
    ensure(
        off.generations.len() == 1,
        format!("sode off: {} generations", off.generations.len()),
    )?;
    ensure(
        off.generations[0].constraints == vec![p("x1"), p("y1")],
        "sode off: first generation",
    )?;
    ensure(
        fixings(&off, 0) == vec![pair("f1", "0"), pair("g1", "0")],
        format!("sode off fixings {:?}", fixings(&off, 0)),
    )?;
    ensure(
        off.free_parameters() == ["F1", "G1"],
        format!("sode off free {:?}", off.free_parameters()),
    )?;
    ensure(off.dim == 10, format!("sode off dim {}", off.dim))?;
    let (_, on) = stab("capri", true)?;
    ensure(
        on.generations.len() == 2,
        format!("sode on: {} generations", on.generations.len()),
    )?;
    ensure(
        on.generations[0].constraints == vec![p("x1"), p("y1")],
        "sode on: generation 0",
    )?;
    ensure(
        fixings(&on, 0) == vec![pair("f1", "u1"), pair("g1", "v1")],
        format!("sode on fixings {:?}", fixings(&on, 0)),
    )?;
    ensure(
        on.generations[1].constraints == vec![p("u1"), p("v1")],
        "sode on: generation 1",
    )?;
    ensure(
        fixings(&on, 1) == vec![pair("F1", "0"), pair("G1", "0")],
        format!("sode on fixings {:?}", fixings(&on, 1)),
    )?;
    ensure(
        on.dim == 8 && on.free_parameters().is_empty(),
        format!("sode on dim {} free {:?}", on.dim, on.free_parameters()),
    )?;
    ensure(
        on.equation.holds() && on.tangency.iter().all(|(_, v)| v.holds()),
        "final family does not solve on S",
    )?;
    Ok("sode off {x1,y1} f1=g1=0 F1,G1 free dim 10; sode on +{u1,v1} F1=G1=0 dim 8".into())
}

fn criterion_3() -> Outcome {
    let m = e(builtin("capri-s"))?;
    let b = e(m.build())?;
    let mm = e(build_momentum(&b.system, &b.action))?;
    ensure(
        mm.source == MomentumSource::Primitive,
        "Hamiltonians not taken from Θ",
    )?;
    let c = &b.system.chart;
    let want = [
        e(c.poly("2*m2*(x2*v2 - y2*u2) - x2^2 - y2^2"))?,
        e(c.poly("2*m3*(x3*v3 - y3*u3) - x3^2 - y3^2"))?,
    ];
    ensure(
        mm.hamiltonians == want,
        format!("got {:?}", texts(&mm.hamiltonians)),
    )?;
    // Independently: f = −i(ξ)Θ, and i(ξ)Ω = df.
    let theta = b.action.theta.clone().ok_or("capri-s has no Θ")?;
    for (g, f) in b.action.generators.iter().zip(&want) {
        ensure(
            -&e(interior(g, &theta))?.as_function() == *f,
            "−i(ξ)Θ differs",
        )?;
        ensure(
            e(interior(g, &b.system.omega))?
                == exterior_derivative(&DiffForm::function(c, f.clone())),
            "i(ξ)Ω ≠ df",
        )?;
    }
    ensure(
        mm.poissonian == Poissonian::Strict,
        format!("Poissonian: {}", mm.poissonian.label()),
    )?;
    Ok(format!(
        "f_ξ1 = {}, f_ξ2 = {}, Poissonian strict",
        want[0], want[1]
    ))
}

fn routes(name: &str, m: &[i64]) -> Result<RouteReport, String> {
    let model = e(builtin(name))?;
    let s = e(model.reduction_setup(false, 0))?;
    let mm = e(build_momentum(&s.system, &s.action))?;
    e(route_equivalence(
        &s.system,
        &mm,
        &mu(m),
        &BasePoint::Auto,
        &s.m_set,
        &Route::ALL,
        0,
    ))
}

fn criterion_4() -> Outcome {
    let s = routes("capri-s", &[-1, -1])?;
    let full = routes("capri", &[-1, -1, 0, 0])?;
    let a = &s.complete;
    ensure(
        a.level_dim() == 6 && a.quotient_dim == 4,
        format!("S: level {} quotient {}", a.level_dim(), a.quotient_dim),
    )?;
    let c = &full.complete;
    ensure(
        c.level_dim() == 8 && c.quotient_dim == 4,
        format!("M: level {} quotient {}", c.level_dim(), c.quotient_dim),
    )?;
    for r in s.results.iter().chain(&full.results) {
        ensure(
            (r.quotient_dim, r.reduced_rank) == (4, 4),
            format!("route {r}"),
        )?;
    }
    ensure(s.agree() && full.agree(), "routes disagree")?;
    ensure(
        s.results.len() == 3 && full.results.len() == 3,
        "not all routes ran",
    )?;
    Ok("S: level 6 → 4; M: level 8 → 4; routes A/B/C give (4, 4) on both".into())
}

fn criterion_5() -> Outcome {
    let m = e(builtin("conformal"))?;
    let b = e(m.build())?;
    let st = e(stabilize(&b.system, &e(m.stabilize_options(false, 0))?))?;
    let c = &b.system.chart;
    let n = 4;
    let g = |a: usize| if a == 0 || a == n - 1 { "" } else { "-" };
    let form = |x: &str, y: &str| -> String {
        (0..n)
            .map(|a| format!("{}{x}{a}*{y}{a}", g(a)))
            .collect::<Vec<_>>()
            .join(" + ")
    };
    let etas = vec![
        e(c.poly(&form("q", "q")))?,
        e(c.poly(&form("q", "v")))?,
        e(c.poly(&form("v", "v")))?,
    ];
    let eta_set = e(ConstraintSet::new(c, etas.clone()))?;
    for eta in &etas {
        ensure(
            e(ideal_reduce_default(eta, &st.final_set))?.certified(),
            format!("{eta} not in the final ideal"),
        )?;
    }
    for f in &st.final_set.constraints {
        ensure(
            e(ideal_reduce_default(f, &eta_set))?.certified(),
            format!("{f} not in (η1, η2, η3)"),
        )?;
    }
    let gauge = e(gauge_fields(&b.system))?;
    for v in ["lambda", "u"] {
        let d = VectorField::coordinate(c, e(c.index(v))?);
        let mut rng = Sampler::new(5);
        let pt = rng.point(c);
        let vecs: Vec<Vec<Rational>> = gauge.iter().map(|z| z.at(&pt).unwrap()).collect();
        ensure(
            Subspace::span(c.dim(), &vecs).contains(&d.at(&pt).unwrap()),
            format!("∂{v} not a gauge field"),
        )?;
        ensure(
            e(interior(&d, &b.system.omega))?.is_zero(),
            format!("i(∂{v})ω ≠ 0"),
        )?;
    }
    e(check_locally_hamiltonian(&b.system, &b.action))?;
    let mm = e(build_momentum(&b.system, &b.action))?;
    ensure(mm.len() == 5, "expected 5 generators")?;
    let zero = vec![Rational::zero(); 5];
    let level = e(level_set(&mm, &zero))?;
    let pf = e(pfaff_check(&b.system, &mm, &level))?;
    ensure(pf.passed(), format!("Pfaff: {:?}", pf.defect))?;
    let ext = e(extend_momentum_noncompatible(
        &b.system,
        &st.final_set,
        &b.action,
        &mm.hamiltonians,
        &zero,
        0,
    ))?;
    ensure(
        ext.levels_equal(),
        format!("extension: sources {:?}", ext.sources),
    )?;
    Ok(format!("final set = (η1, η2, η3) certified both ways, {} gauge fields, Pfaff and M = J⁻¹(0) certified", gauge.len()))
}

fn criterion_6() -> Outcome {
    let m = e(builtin("autonomous-r2"))?;
    let b = e(m.build())?;
    let c = b.system.chart.clone();
    let h = e(c.poly("1/2*(q1^2 + p1^2 + q2^2 + p2^2)"))?;
    let mm = e(build_momentum(&b.system, &b.action))?;
    ensure(
        mm.hamiltonians == vec![h.clone()],
        format!("f = {}", mm.hamiltonians[0]),
    )?;
    let mu0 = mu(&[1]);
    let level = e(level_set(&mm, &mu0))?;
    ensure(
        level.polys() == vec![&h - &c.constant(rat(1))],
        format!("level {level}"),
    )?;
    let xh = e(VectorField::parse(
        &c,
        "p1 d/dq1 - q1 d/dp1 + p2 d/dq2 - q2 d/dp2",
    ))?;
    let dt = VectorField::coordinate(&c, e(c.index("t"))?);
    let pts = e(presym::gotay::sample_points(&level.set, 6, 3))?;
    for pt in pts {
        let r = e(reduce(
            &b.system,
            &mm,
            &mu0,
            &BasePoint::Given(pt.clone()),
            &ConstraintSet::empty(&c),
            0,
        ))?;
        ensure(
            r.ker_level_form.dim() == 2,
            format!("ker Ω_μ has dim {}", r.ker_level_form.dim()),
        )?;
        ensure(
            r.ker_level_form.contains(&dt.at(&pt).unwrap()),
            "∂t ∉ ker Ω_μ",
        )?;
        ensure(
            r.ker_level_form.contains(&xh.at(&pt).unwrap()),
            "X_μ ∉ ker Ω_μ",
        )?;
        ensure(
            r.reduced_rank == 2,
            format!("reduced rank {}", r.reduced_rank),
        )?;
    }
    Ok("f = h, level {h = 1}, ker Ω_μ = span{∂t, X_μ} at 6 points, reduced rank 2".into())
}

fn criterion_7() -> Outcome {
    let mut two = 0;
    for seed in 0..240u64 {
        let n = 1 + (seed as usize % 10);
        let mut rng = Sampler::new(seed);
        let a = random_two_form(&mut rng, n);
        let s = random_subspace(&mut rng, n);
        let o = two_form_oracle(&a, &s);
        let lr = e(linear_reduce(
            &e(LinForm::from_matrix(&a))?,
            &Subspace::span(n, &s),
        ))?;
        ensure(
            same_span(&o.ker_alpha_n, &o.ker_plus_cap, n),
            format!("oracle identity fails, seed {seed}"),
        )?;
        ensure(
            same_span(lr.kernel_of_alpha_n.basis(), &o.ker_plus_cap, n),
            format!("library ker α_N differs, seed {seed}"),
        )?;
        two += 1;
    }
    let mut three = 0;
    let mut seed = 1000u64;
    while three < 60 && seed < 3000 {
        let n = 3 + (seed as usize % 5);
        let mut rng = Sampler::new(seed);
        seed += 1;
        let alt = random_alt(&mut rng, n, 3, 0.5);
        let s = random_subspace(&mut rng, n);
        let alpha = e(LinForm::from_components(
            n,
            3,
            alt.comps.clone().into_iter().collect(),
        ))?;
        let lr = e(linear_reduce(&alpha, &Subspace::span(n, &s)))?;
        let q = lr.quotient_dim;
        if q == 0 {
            continue;
        }
        let red = Alt {
            n: q,
            k: 3,
            comps: lr
                .reduced_form
                .components()
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        };
        for t in increasing(q, 3) {
            let vs: Vec<Vector> = t.iter().map(|&i| lr.quotient_basis[i].clone()).collect();
            ensure(
                red.get(&t) == alt.eval(&vs),
                format!("reduced form is not α on the quotient, seed {seed}"),
            )?;
        }
        ensure(
            rank(&red.contraction_columns(), increasing(q, 2).len()) == q,
            format!("reduced form degenerate, seed {seed}"),
        )?;
        three += 1;
    }
    ensure(
        three >= 50,
        format!("only {three} degree-3 cases with a nonzero quotient"),
    )?;
    Ok(format!(
        "{two} degree-2 decompositions, {three} degree-3 nondegenerate quotients"
    ))
}

fn criterion_8() -> Outcome {
    let cases = 120u64;
    for seed in 0..cases {
        let mut rng = Sampler::new(seed);
        let n = 1 + rng.index(5);
        let c = chart(n);
        let k = rng.index(n.min(3) + 1);
        let w = random_form(&mut rng, &c, k);
        ensure(
            exterior_derivative(&exterior_derivative(&w)).is_zero(),
            format!("d² ≠ 0, seed {seed}"),
        )?;
        let x = random_field(&mut rng, &c);
        let want = leibniz_lie(&x, &w);
        ensure(
            components(&e(lie_derivative(&x, &w))?) == want,
            format!("Cartan vs Leibniz, seed {seed}"),
        )?;
        if w.degree() > 0 {
            let cartan = e(e(interior(&x, &exterior_derivative(&w)))?
                .try_add(&exterior_derivative(&e(interior(&x, &w))?)))?;
            ensure(
                components(&cartan) == want,
                format!("i d + d i vs Leibniz, seed {seed}"),
            )?;
        }
    }
    for seed in 0..cases {
        let mut rng = Sampler::new(10_000 + seed);
        let m = 1 + rng.index(2);
        let (c, w) = random_symplectic(&mut rng, m);
        let sys = e(PresympSystem::new(c.clone(), w, c.zero()))?;
        let f: Vec<Poly> = (0..3).map(|_| random_poly(&mut rng, &c, 3, 2)).collect();
        let pb = |a: &Poly, b: &Poly| poisson_bracket(&sys, a, b).map_err(|e| e.to_string());
        let j = &(&pb(&f[0], &pb(&f[1], &f[2])?)? + &pb(&f[1], &pb(&f[2], &f[0])?)?)
            + &pb(&f[2], &pb(&f[0], &f[1])?)?;
        ensure(j.is_zero(), format!("Jacobi fails, seed {seed}"))?;
        let x1 = e(hamiltonian_vector_field(&sys, &f[0]))?
            .ok_or("f1 not Hamiltonian")?
            .particular;
        let x2 = e(hamiltonian_vector_field(&sys, &f[1]))?
            .ok_or("f2 not Hamiltonian")?
            .particular;
        let lhs = e(interior(&e(lie_bracket(&x1, &x2))?, &sys.omega))?;
        let rhs = exterior_derivative(&DiffForm::function(&c, pb(&f[1], &f[0])?));
        ensure(lhs == rhs, format!("i([X1,X2])Ω ≠ d{{f2,f1}}, seed {seed}"))?;
    }
    Ok(format!(
        "{cases} cases each of d² = 0, Cartan vs Leibniz, Jacobi, i([X1,X2])Ω = d{{f2,f1}}"
    ))
}

/// Components keyed by variable names, with `drop` set to zero.
fn named(w: &DiffForm, drop: &[String]) -> BTreeMap<Vec<String>, String> {
    let c = w.chart();
    let subs: Vec<(usize, Poly)> = drop
        .iter()
        .map(|p| (c.index(p).unwrap(), c.zero()))
        .collect();
    w.components()
        .filter(|(idx, _)| !idx.iter().any(|&i| drop.iter().any(|p| p == c.name_of(i))))
        .map(|(idx, p)| {
            (
                idx.iter().map(|&i| c.name_of(i).to_string()).collect(),
                p.substitute_many(&subs),
            )
        })
        .filter(|(_, p)| !p.is_zero())
        .map(|(k, p)| (k, p.to_string()))
        .collect()
}

fn criterion_9() -> Outcome {
    let m = e(builtin("capri"))?;
    let s = e(m.reduction_setup(false, 0))?;
    let ext = e(coisotropic_extend(&s.system, 9))?;
    ensure(
        e(kernel_distribution(&ext.ambient))?.is_empty(),
        "ambient form is degenerate",
    )?;
    ensure(
        named(&ext.ambient.omega, &ext.momenta) == named(&s.system.omega, &[]),
        "ω does not pull back to Ω_M",
    )?;
    let amb = &ext.ambient.chart;
    let subs: Vec<(usize, Poly)> = ext
        .momenta
        .iter()
        .map(|p| (amb.index(p).unwrap(), amb.zero()))
        .collect();
    ensure(
        ext.ambient.hamiltonian.substitute_many(&subs).to_string()
            == s.system.hamiltonian.to_string(),
        "H does not pull back to E_M",
    )?;
    ensure(ext.pullback_verified, "library pullback check failed")?;
    ensure(
        ext.coisotropic && ext.coisotropic_samples == 64,
        "not coisotropic at every sample",
    )?;
    Ok(format!(
        "{} momenta added, symplectic, exact pullback at p = 0, coisotropic at 64 points",
        ext.momenta.len()
    ))
}

fn criterion_10() -> Outcome {
    // Corrupted closedness.
    let bad = "name = bad\nvars = x, y, z\nomega = x dy^dz\nhamiltonian = 0\n";
    match e(Model::parse(bad))?.build() {
        Err(Error::NotClosed { .. }) => {}
        other => return Err(format!("expected NotClosed, got {:?}", other.map(|_| ()))),
    }
    let path = std::env::temp_dir().join(format!("presym-bad-{}.model", std::process::id()));
    std::fs::write(&path, bad).map_err(|e| e.to_string())?;
    let args: Vec<OsString> = [
        "presym",
        "verify",
        "--model",
        path.to_str().unwrap(),
        "--report",
        "json",
    ]
    .iter()
    .map(OsString::from)
    .collect();
    let out = presym::cli::execute(args);
    let _ = std::fs::remove_file(&path);
    let json: serde_json::Value =
        serde_json::from_str(&out.stdout).map_err(|e| format!("{e}: {}", out.stdout))?;
    let row = json["rows"]
        .as_array()
        .and_then(|r| r.iter().find(|r| r["check"] == "closedness"))
        .ok_or("no closedness row")?;
    ensure(
        row["passed"] == false && out.code != 0,
        "closedness row did not fail",
    )?;
    // Corrupted Pfaff.
    let b = e(e(builtin("capri-s"))?.build())?;
    let mm = e(build_momentum(&b.system, &b.action))?;
    let mut level = e(level_set(&mm, &mu(&[-1, -1])))?;
    ensure(
        e(pfaff_check(&b.system, &mm, &level))?.passed(),
        "clean level already fails Pfaff",
    )?;
    let x2 = e(b.system.chart.poly("x2"))?;
    level.constraints[1].1 = &level.constraints[1].1 + &x2;
    let pf = e(pfaff_check(&b.system, &mm, &level))?;
    ensure(
        pf.offending == Some(1),
        format!("offending = {:?}", pf.offending),
    )?;
    // μ nonzero on a kernel generator.
    let s = e(e(builtin("capri"))?.reduction_setup(false, 0))?;
    let mm = e(build_momentum(&s.system, &s.action))?;
    match level_set(&mm, &mu(&[-1, -1, 1, 0])) {
        Err(Error::NotWeaklyRegular(_)) => {}
        other => {
            return Err(format!(
                "expected NotWeaklyRegular, got {:?}",
                other.map(|l| l.to_string())
            ))
        }
    }
    Ok("NotClosed + failing closedness row, Pfaff offending = 1, NotWeaklyRegular".into())
}

fn run(n: usize, f: fn() -> Outcome) -> bool {
    let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or(p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default())
    });
    match r {
        Ok(d) => {
            println!("criterion {n}: pass  {d}");
            true
        }
        Err(d) => {
            println!("criterion {n}: FAIL  {d}");
            false
        }
    }
}

#[test]
fn acceptance() {
    let all: [fn() -> Outcome; 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    let failed: Vec<usize> = all
        .iter()
        .enumerate()
        .filter(|(i, f)| !run(i + 1, **f))
        .map(|(i, _)| i + 1)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
