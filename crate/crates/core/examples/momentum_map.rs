//! Momentum map from a primitive Θ, its Poissonian check and the Pfaff
//! condition on a level set.

use presym::model::builtin;
use presym::momred::{build_momentum, level_set, pfaff_check};
use presym::symexpr::rat;

fn main() -> presym::error::Result<()> {
    let b = builtin("capri-s")?.build()?;
    let mm = build_momentum(&b.system, &b.action)?;
    for (n, f) in mm.action.names.iter().zip(&mm.hamiltonians) {
        println!("f_{n} = {f}");
    }
    println!("poissonian: {}", mm.poissonian.label());
    let level = level_set(&mm, &[rat(-1), rat(-1)])?;
    println!("J^-1(-1, -1) = {level}");
    println!(
        "pfaff passed: {}",
        pfaff_check(&b.system, &mm, &level)?.passed()
    );
    Ok(())
}
