//! Loads a project file and runs the structural checks on it.
//!
//! `cargo run --example validate -- crates/core/examples/split.cfg`

use std::path::PathBuf;

use tame_tori::config::ProjectConfig;

fn main() -> tame_tori::Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/ramified-quadratic.cfg")
    });
    let cfg = ProjectConfig::load(&path)?;
    print!("{}", cfg.validate()?);
    let ctx = cfg.context()?;
    println!("|Gal(E/F)| = {}, X_I = {}", ctx.galois().order(), ctx.component_group());
    Ok(())
}
