//! A Hamiltonian system made presymplectic by adjoining time, reduced by
//! time translation.

use presym::gotay::ConstraintSet;
use presym::model::builtin;
use presym::momred::{build_momentum, reduce, BasePoint};
use presym::symexpr::rat;

fn main() -> presym::error::Result<()> {
    let b = builtin("autonomous-r2")?.build()?;
    println!("Ω = {}", b.system.omega);
    let mm = build_momentum(&b.system, &b.action)?;
    println!("f_tau = {}", mm.hamiltonians[0]);
    let r = reduce(
        &b.system,
        &mm,
        &[rat(1)],
        &BasePoint::Auto,
        &ConstraintSet::empty(&b.system.chart),
        0,
    )?;
    for z in r.fields(&r.ker_level_form) {
        println!("ker Ω_μ ∋ {z}");
    }
    println!(
        "quotient {}  reduced rank {}  {}",
        r.quotient_dim,
        r.reduced_rank,
        r.verdict()
    );
    Ok(())
}
