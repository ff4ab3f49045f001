//! The complete reduction and the two alternative routes on capri's final
//! constraint manifold.

use presym::model::builtin;
use presym::momred::{build_momentum, route_equivalence, BasePoint, Route};
use presym::symexpr::rat;

fn main() -> presym::error::Result<()> {
    let setup = builtin("capri")?.reduction_setup(false, 0)?;
    let mm = build_momentum(&setup.system, &setup.action)?;
    let mu = [rat(-1), rat(-1), rat(0), rat(0)];
    let rep = route_equivalence(
        &setup.system,
        &mm,
        &mu,
        &BasePoint::Auto,
        &setup.m_set,
        &Route::ALL,
        0,
    )?;
    println!(
        "working on {} (dim {})",
        setup.system.chart.name,
        setup.system.chart.dim()
    );
    for r in &rep.results {
        println!("{r}");
    }
    println!(
        "agree: {}  expected: {}",
        rep.agree(),
        rep.expected_to_agree()
    );
    Ok(())
}
