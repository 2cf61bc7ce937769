//! Writes a checkpoint halfway, resumes from it, and compares with the
//! uninterrupted run bit for bit.

use radgas::cli::{resume_to_dir, run_to_dir, CHECKPOINT_FILE, DIAGNOSTICS_FILE};
use radgas::Config;

fn main() -> radgas::Result<()> {
    let root = std::env::temp_dir().join(format!("radgas-example-{}", std::process::id()));
    let mut full = Config::default();
    full.grid.nodes = 401;
    full.stepping.t_end = 1.0;
    full.output.dir = root.join("full");
    let mut half = full.clone();
    half.stepping.t_end = 0.5;
    half.output.dir = root.join("half");

    let a = run_to_dir(&full)?;
    run_to_dir(&half)?;
    let b = resume_to_dir(&half.output.dir.join(CHECKPOINT_FILE), 1.0, None)?;
    let same_rows = std::fs::read(full.output.dir.join(DIAGNOSTICS_FILE))?
        == std::fs::read(half.output.dir.join(DIAGNOSTICS_FILE))?;
    println!("final states identical: {}", a.state == b.state);
    println!("diagnostics.csv identical: {same_rows}");
    std::fs::remove_dir_all(&root)?;
    Ok(())
}
