//! Regenerates the bundled model files.
//!
//! ```text
//! cargo run -p bncausal --example write_fixtures -- models
//! ```

use std::path::PathBuf;

use bncausal::models::{fixture_text, FIXTURE_NAMES};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "models".to_string()));
    std::fs::create_dir_all(&dir)?;
    for name in FIXTURE_NAMES {
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, fixture_text(name)?)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
