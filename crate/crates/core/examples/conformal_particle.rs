//! Gauge fields, stabilization and the extension of a non-compatible
//! momentum map for the conformal particle.

use presym::gotay::{gauge_fields, stabilize};
use presym::model::builtin;
use presym::momred::{build_momentum, extend_momentum_noncompatible};
use presym::symexpr::Rational;

fn main() -> presym::error::Result<()> {
    let d = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(2);
    let m = builtin(&format!("conformal-d{d}"))?;
    let b = m.build()?;
    for g in gauge_fields(&b.system)? {
        println!("gauge field {g}");
    }
    let st = stabilize(&b.system, &m.stabilize_options(false, 0)?)?;
    println!(
        "final constraints {:?}",
        st.final_set
            .constraints
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
    );
    let mm = build_momentum(&b.system, &b.action)?;
    let zero = vec![Rational::from_integer(0.into()); mm.len()];
    let ext = extend_momentum_noncompatible(
        &b.system,
        &st.final_set,
        &b.action,
        &mm.hamiltonians,
        &zero,
        0,
    )?;
    println!("J^-1(0) equals the final set: {}", ext.levels_equal());
    Ok(())
}
