//! The constant state (1, 0, 1, 0) is a fixed point of the discrete system.

use radgas::scenarios::ScenarioSpec;
use radgas::solver::run;
use radgas::Config;

fn main() -> radgas::Result<()> {
    let mut cfg = Config::default();
    cfg.scenario = ScenarioSpec::equilibrium();
    cfg.grid.nodes = 401;
    cfg.stepping.t_end = 5.0;
    cfg.output.diag_interval = 1.0;
    let out = run(&cfg)?;
    println!("{} steps to t = {}", out.steps, out.state.t);
    println!("Linf distance from equilibrium: {:e}", out.state.distance_from_equilibrium());
    for r in &out.records {
        println!("t = {:>4}  lyapunov = {:e}  dissipation = {:e}", r.t, r.lyapunov, r.dissipation_accum);
    }
    Ok(())
}
