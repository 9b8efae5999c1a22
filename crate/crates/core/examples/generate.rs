//! Generate a space file, validate it and write it to stdout.

use plap::generate::Generator;
use plap::space::build_space;

fn main() -> plap::Result<()> {
    let generator: Generator = match std::env::args().nth(1) {
        Some(json) => serde_json::from_str(&json)?,
        None => serde_json::from_str(r#"{"kind":"grid","n":3,"h":0.5,"profile":{"name":"dipole","amplitude":1.0}}"#)?,
    };
    let file = generator.build()?;
    let space = build_space(&file)?;
    eprintln!(
        "{} vertices, |Omega| = {}, P(boundary) = {}, diam = {}",
        space.len(),
        space.domain_measure(),
        space.boundary_perimeter(space.boundary()),
        space.diameter()
    );
    println!("{}", serde_json::to_string_pretty(&file)?);
    Ok(())
}
