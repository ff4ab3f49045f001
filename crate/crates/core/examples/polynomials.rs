//! Exact polynomial arithmetic over named variables.

use presym::symexpr::{parse, rat, Vars};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vars = Vars::new(&["x", "y", "m"]);
    let p = parse("(x + y)^3 - x*y/m", &vars)?;
    let q = parse("x - y", &vars)?;
    println!("p        = {p}");
    println!("p * q    = {}", &p * &q);
    println!("dp/dx    = {}", p.derivative(0));
    // y := 2x, then evaluate at x = 1/2, m = 3.
    let s = p.substitute(1, &parse("2*x", &vars)?);
    println!("p|y=2x   = {s}");
    println!(
        "value    = {}",
        s.eval(&[presym::symexpr::ratio(1, 2), rat(0), rat(3)])?
    );
    Ok(())
}
