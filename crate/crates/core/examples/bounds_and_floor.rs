//! Window bounds on the volume and temperature integrals, and the affine
//! growth test for the temperature floor, along a run.

use radgas::diagnostics::{energy_constant, temperature_floor_check, window_bounds_check};
use radgas::scenarios;
use radgas::solver::{run_from, Event};
use radgas::diagnostics::DiagnosticsTracker;
use radgas::Config;

fn main() -> radgas::Result<()> {
    let mut cfg = Config::default();
    cfg.grid.nodes = 401;
    cfg.stepping.t_end = 10.0;
    cfg.output.diag_interval = 0.05;
    let grid = cfg.grid.build()?;
    let s0 = scenarios::build(&cfg.scenario, &grid)?;
    let c0 = energy_constant(&s0, &cfg.params)?;
    println!("energy constant C0 = {c0:.6}");
    let mut violations = 0;
    let mut checks = 0;
    let out = run_from(&cfg, s0, DiagnosticsTracker::new(&cfg.params), &mut |e| {
        if let Event::Record(_, s) = e {
            for k in 0..=5 {
                checks += 1;
                if !window_bounds_check(s, &cfg.params, c0, k)?.pass {
                    violations += 1;
                }
            }
        }
        Ok(())
    })?;
    println!("window bounds: {violations} violations in {checks} checks");
    let floor = temperature_floor_check(&out.records)?;
    println!(
        "max 1/theta envelope {:.4} + {:.4} t; worst late ratio {:.4}; pass = {}",
        floor.intercept, floor.slope, floor.worst_ratio, floor.pass
    );
    Ok(())
}
