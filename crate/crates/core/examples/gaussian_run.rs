//! The large-data gaussian preset on a coarser grid: extrema, Lyapunov
//! functional and the decay of the perturbation norms.

use radgas::diagnostics::{decay_report, COMPONENTS};
use radgas::solver::run;
use radgas::Config;

fn main() -> radgas::Result<()> {
    let mut cfg = Config::default();
    cfg.grid.nodes = 401;
    cfg.stepping.t_end = 10.0;
    cfg.output.diag_interval = 0.05;
    let out = run(&cfg)?;
    println!("{} steps", out.steps);
    println!("{:>6} {:>9} {:>9} {:>9} {:>9} {:>11}", "t", "vmin", "vmax", "thetamin", "thetamax", "lyapunov");
    for r in out.records.iter().step_by(20) {
        println!(
            "{:>6.2} {:>9.5} {:>9.5} {:>9.5} {:>9.5} {:>11.6}",
            r.t, r.vmin, r.vmax, r.thetamin, r.thetamax, r.lyapunov
        );
    }
    let d = decay_report(&out.records)?;
    for (name, c) in COMPONENTS.iter().zip(&d.components) {
        println!("Linf ratio of {name} between t = {} and t = {}: {:.4}", d.t_ref, d.t_end, c.linf_ratio);
    }
    Ok(())
}
