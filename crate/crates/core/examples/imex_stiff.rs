//! With a large radiative conductivity the explicit step is limited by heat
//! conduction; the IMEX step is not, and takes far fewer steps.

use std::time::Instant;

use radgas::config::Integrator;
use radgas::solver::run;
use radgas::Config;

fn main() -> radgas::Result<()> {
    let mut cfg = Config::default();
    cfg.params.conductivity_slope = 50.0;
    cfg.grid.nodes = 801;
    cfg.stepping.t_end = 0.5;
    cfg.output.diag_interval = 0.1;
    let mut results = Vec::new();
    for integrator in [Integrator::Heun, Integrator::Imex] {
        cfg.stepping.integrator = integrator;
        let start = Instant::now();
        let out = run(&cfg)?;
        println!(
            "{integrator:?}: {} steps, {:.2} s, thetamax = {:.6}",
            out.steps,
            start.elapsed().as_secs_f64(),
            out.records.last().map_or(f64::NAN, |r| r.thetamax)
        );
        results.push(out.state);
    }
    let gap = results[0].theta.iter().zip(&results[1].theta).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("largest temperature difference between the two: {gap:.3e}");
    Ok(())
}
