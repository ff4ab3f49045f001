//! Constraint stabilization of the Capri-Kobayashi model, with and without
//! the second-order condition.

use presym::gotay::stabilize;
use presym::model::builtin;

fn main() -> presym::error::Result<()> {
    let m = builtin("capri")?;
    let b = m.build()?;
    for sode in [false, true] {
        let r = stabilize(&b.system, &m.stabilize_options(sode, 0)?)?;
        println!("{r}\n");
    }
    Ok(())
}
