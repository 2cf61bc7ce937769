//! The closed-form expression of the specific volume through the stress
//! history, evaluated on a run and compared with the computed volume.

use radgas::diagnostics::RepresentationTracker;
use radgas::scenarios;
use radgas::solver::{run_from, Event};
use radgas::diagnostics::DiagnosticsTracker;
use radgas::Config;

fn main() -> radgas::Result<()> {
    let mut cfg = Config::default();
    cfg.grid.nodes = 801;
    cfg.stepping.t_end = 1.0;
    let grid = cfg.grid.build()?;
    let s0 = scenarios::build(&cfg.scenario, &grid)?;
    let mut rep = RepresentationTracker::new(&s0, &cfg.params, 1)?;
    println!("checking {} nodes of the cut-off window", rep.nodes().len());
    let mut worst = Vec::new();
    run_from(&cfg, s0, DiagnosticsTracker::new(&cfg.params), &mut |e| {
        if let Event::Record(r, s) = e {
            let sup = rep.push(s)?.into_iter().fold(0.0, f64::max);
            worst.push((r.t, sup));
        }
        Ok(())
    })?;
    for (t, sup) in worst.iter().step_by(10) {
        println!("t = {t:>4.2}  max relative residual {sup:.3e}");
    }
    Ok(())
}
