//! Embed a presymplectic manifold as the zero section of a symplectic one
//! and extend the momentum map.

use presym::model::builtin;
use presym::momred::{build_momentum, coisotropic_extend};

fn main() -> presym::error::Result<()> {
    let setup = builtin("capri")?.reduction_setup(false, 0)?;
    let ext = coisotropic_extend(&setup.system, 0)?;
    println!(
        "kernel coordinates {:?}, momenta {:?}",
        ext.kernel_coords, ext.momenta
    );
    println!("ambient ω = {}", ext.ambient.omega);
    println!(
        "pullback verified {}, coisotropic at {} points: {}",
        ext.pullback_verified, ext.coisotropic_samples, ext.coisotropic
    );
    let mm = build_momentum(&setup.system, &setup.action)?;
    let big = ext.extend_momentum(&mm)?;
    for (n, f) in big.action.names.iter().zip(&big.hamiltonians) {
        println!("f_{n} = {f}");
    }
    Ok(())
}
