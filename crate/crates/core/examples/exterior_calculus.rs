//! d, wedge, interior product and the Lie derivative on a chart.

use presym::cartan::{
    exterior_derivative, interior, lie_bracket, lie_derivative, wedge, Chart, DiffForm, VectorField,
};

fn main() -> presym::error::Result<()> {
    let c = Chart::new("R3", &["x", "y", "z"], &[] as &[&str])?;
    let a = DiffForm::parse(&c, "y*z dx + x^2 dy")?;
    let b = DiffForm::parse(&c, "dz")?;
    let x = VectorField::parse(&c, "x d/dy - y d/dx")?;
    let y = VectorField::parse(&c, "z d/dx")?;
    println!("a        = {a}");
    println!("da       = {}", exterior_derivative(&a));
    println!(
        "dda      = {}",
        exterior_derivative(&exterior_derivative(&a))
    );
    println!("a ^ b    = {}", wedge(&a, &b)?);
    println!("i(X) da  = {}", interior(&x, &exterior_derivative(&a))?);
    println!("L_X a    = {}", lie_derivative(&x, &a)?);
    println!("[X, Y]   = {}", lie_bracket(&x, &y)?);
    Ok(())
}
