//! Load a model file (or a built-in by name) and print its canonical form.
//!
//! `cargo run --example model_file -- path/to/file.model`

use presym::model::{builtin, Model};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "capri".into());
    let m = match std::fs::read_to_string(&arg) {
        Ok(text) => Model::parse(&text)?,
        Err(_) => builtin(&arg)?,
    };
    print!("{m}");
    let b = m.build()?;
    println!(
        "# chart dim {}, {} generator(s)",
        b.system.chart.dim(),
        b.action.len()
    );
    Ok(())
}
