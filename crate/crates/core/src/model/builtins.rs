//! Built-in models, kept as model-file text.

use super::Model;
use crate::error::{Error, Result};

/// Capri–Kobayashi on `TQ = R¹²`.
pub const CAPRI: &str = "\
# Capri-Kobayashi mechanical model on TQ = R^12
name = capri
vars = x1, x2, x3, y1, y2, y3, u1, u2, u3, v1, v2, v3
params = m2, m3
tangent = x1:u1, x2:u2, x3:u3, y1:v1, y2:v2, y3:v3
omega = 2*m2 dx2^du2 + 2*m2 dy2^dv2 + 2*m3 dx3^du3 + 2*m3 dy3^dv3 + 2 dx2^dy2 + 2 dx3^dy3
hamiltonian = m2*(u2^2 + v2^2) + m3*(u3^2 + v3^2) + x1^2 + y1^2 + x2^2 + y2^2 + x3^2 + y3^2
# rotations in the (x2, y2) and (x3, y3) planes, lifted to TQ
generator xi1 = x2 d/dy2 - y2 d/dx2 + u2 d/dv2 - v2 d/du2
generator xi2 = x3 d/dy3 - y3 d/dx3 + u3 d/dv3 - v3 d/du3
generator xi3 = d/du1
generator xi4 = d/dv1
theta = -(2*m2*u2 + y2) dx2 - (2*m2*v2 - x2) dy2 - (2*m3*u3 + y3) dx3 - (2*m3*v3 - x3) dy3
structure = abelian
kernel = xi3, xi4
family x1 = f1
family y1 = g1
family u1 = F1
family v1 = G1
assume = free-proper
";

/// The SODE final system on `S = R⁸`.
pub const CAPRI_S: &str = "\
# final constraint manifold S of the SODE stabilization of capri
name = capri-s
vars = x2, x3, y2, y3, u2, u3, v2, v3
params = m2, m3
tangent = x2:u2, x3:u3, y2:v2, y3:v3
omega = 2*m2 dx2^du2 + 2*m2 dy2^dv2 + 2*m3 dx3^du3 + 2*m3 dy3^dv3 + 2 dx2^dy2 + 2 dx3^dy3
hamiltonian = m2*(u2^2 + v2^2) + m3*(u3^2 + v3^2) + x2^2 + y2^2 + x3^2 + y3^2
generator xi1 = x2 d/dy2 - y2 d/dx2 + u2 d/dv2 - v2 d/du2
generator xi2 = x3 d/dy3 - y3 d/dx3 + u3 d/dv3 - v3 d/du3
theta = -(2*m2*u2 + y2) dx2 - (2*m2*v2 - x2) dy2 - (2*m3*u3 + y3) dx3 - (2*m3*v3 - x3) dy3
structure = abelian
assume = free-proper
";

/// Free particle on `R^{d+2}` with the metric `diag(1, -1, …, -1, 1)`, a
/// multiplier `λ` for `q·q = 0` and the `sl(2)` action mixing `q` and `v`.
pub fn conformal(d: usize) -> Result<String> {
    if d == 0 {
        return Err(Error::Model("conformal needs d >= 1".into()));
    }
    let n = d + 2;
    let sign = |a: usize| if a == 0 || a == n - 1 { "" } else { "-" };
    let q: Vec<String> = (0..n).map(|a| format!("q{a}")).collect();
    let v: Vec<String> = (0..n).map(|a| format!("v{a}")).collect();
    let mut vars = q.clone();
    vars.push("lambda".into());
    vars.extend(v.iter().cloned());
    vars.push("u".into());
    let mut tangent: Vec<String> = (0..n).map(|a| format!("{}:{}", q[a], v[a])).collect();
    tangent.push("lambda:u".into());
    let lag: Vec<String> = (0..n)
        .map(|a| format!("{}1/2*({}^2 - lambda*{}^2)", sign(a), v[a], q[a]))
        .collect();
    let join = |f: &dyn Fn(usize) -> String| (0..n).map(f).collect::<Vec<_>>().join(" + ");
    let mut t = String::new();
    t.push_str(&format!(
        "# conformal particle, d = {d}\nname = conformal-d{d}\n"
    ));
    t.push_str(&format!("vars = {}\n", vars.join(", ")));
    t.push_str(&format!("tangent = {}\n", tangent.join(", ")));
    t.push_str(&format!("lagrangian = {}\n", lag.join(" + ")));
    t.push_str(&format!(
        "generator xi1 = {}\n",
        join(&|a| format!("{} d/d{}", q[a], v[a]))
    ));
    t.push_str(&format!(
        "generator xi2 = {}\n",
        join(&|a| format!("{} d/d{} - {} d/d{}", v[a], v[a], q[a], q[a]))
    ));
    t.push_str(&format!(
        "generator xi3 = {}\n",
        join(&|a| format!("{} d/d{}", v[a], q[a]))
    ));
    t.push_str("generator xi4 = d/dlambda\ngenerator xi5 = d/du\nkernel = xi4, xi5\n");
    // Rational points of the final set: q and v in a totally null plane.
    let plane: Vec<[String; 2]> = if d == 1 {
        vec![
            ["1".into(), "0".into()],
            ["1".into(), "0".into()],
            ["0".into(), "0".into()],
        ]
    } else {
        (0..n)
            .map(|a| match a {
                0 => ["1".into(), "0".into()],
                1 => ["3/5".into(), "-4/5".into()],
                2 => ["4/5".into(), "3/5".into()],
                a if a == n - 1 => ["0".into(), "1".into()],
                _ => ["0".into(), "0".into()],
            })
            .collect()
    };
    let (sq, sv) = if d == 1 {
        (["s1", "s1"], ["s2", "s2"])
    } else {
        (["s1", "s2"], ["s3", "s4"])
    };
    for (names, s) in [(&q, sq), (&v, sv)] {
        for a in 0..n {
            let [c1, c2] = &plane[a];
            t.push_str(&format!(
                "sample {} = {}*{} + {}*{}\n",
                names[a], c1, s[0], c2, s[1]
            ));
        }
    }
    t.push_str("assume = free-proper\n");
    Ok(t)
}

/// Two oscillators made autonomous-in-form by a time variable.
pub const AUTONOMOUS_R2: &str = "\
# P = R^4 with h, extended by time; the action is time translation
name = autonomous-r2
vars = q1, p1, q2, p2
omega = dq1^dp1 + dq2^dp2
hamiltonian = 1/2*(q1^2 + p1^2 + q2^2 + p2^2)
time = t
generator tau = -d/dt
assume = free-proper
";

pub fn builtin_names() -> &'static [&'static str] {
    &["capri", "capri-s", "conformal", "autonomous-r2"]
}

/// Model text for a built-in name. `conformal` accepts `conformal-d<N>`.
pub fn builtin_text(name: &str) -> Result<String> {
    match name {
        "capri" => Ok(CAPRI.to_string()),
        "capri-s" => Ok(CAPRI_S.to_string()),
        "autonomous-r2" => Ok(AUTONOMOUS_R2.to_string()),
        "conformal" => conformal(2),
        _ => match name
            .strip_prefix("conformal-d")
            .and_then(|d| d.parse::<usize>().ok())
        {
            Some(d) => conformal(d),
            None => Err(Error::Model(format!(
                "unknown example '{name}' (known: {}, conformal-d<N>)",
                builtin_names().join(", ")
            ))),
        },
    }
}

pub fn builtin(name: &str) -> Result<Model> {
    Model::parse(&builtin_text(name)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_parses_builds_and_round_trips() {
        for name in builtin_names()
            .iter()
            .copied()
            .chain(["conformal-d1", "conformal-d3"])
        {
            let m = builtin(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            let again = Model::parse(&m.to_string()).unwrap();
            assert_eq!(again, m, "{name}");
            let (a, b) = (m.build().unwrap(), again.build().unwrap());
            assert_eq!(a.system, b.system);
            assert_eq!(a.action, b.action);
        }
    }

    #[test]
    fn conformal_sizes() {
        let m = builtin("conformal").unwrap();
        assert_eq!(m.vars.len(), 10);
        assert_eq!(builtin("conformal-d1").unwrap().vars.len(), 8);
        assert!(builtin("conformal-d0").is_err());
        assert!(builtin("nope").is_err());
    }
}
