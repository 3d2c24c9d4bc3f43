//! Regenerates the bundled scenario files from their generators.
//!
//!     cargo run --example generate_scenarios -- crates/core/scenarios

use std::path::PathBuf;

use frsc_sim::fee_model::{long_term_builder, triangle_builder};

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "scenarios".into()));
    std::fs::create_dir_all(&dir)?;
    for (name, builder) in [
        ("long_term.scn", long_term_builder()),
        ("triangle.scn", triangle_builder()),
    ] {
        let path = dir.join(name);
        std::fs::write(&path, builder.render())?;
        let s = builder.build().expect("generated scenario parses");
        println!(
            "{}: {} records, ends at {} s",
            path.display(),
            s.segments().len(),
            s.last_change()
        );
    }
    Ok(())
}
