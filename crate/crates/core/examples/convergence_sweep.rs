//! Three-level refinement study of the balance residuals.

use radgas::cli::{sweep, sweep_table};
use radgas::Config;

fn main() -> radgas::Result<()> {
    let mut cfg = Config::default();
    cfg.grid.nodes = 200;
    cfg.stepping.t_end = 1.0;
    let levels = sweep(&cfg, 3)?;
    print!("{}", sweep_table(&levels));
    Ok(())
}
