//! Reactant mass, reactant L² and entropy-energy balances along a run.

use radgas::diagnostics::balance_residuals;
use radgas::solver::run;
use radgas::Config;

fn main() -> radgas::Result<()> {
    let mut cfg = Config::default();
    cfg.grid.nodes = 801;
    let out = run(&cfg)?;
    let res = balance_residuals(&out.records, &cfg.params)?;
    println!("{:>5} {:>12} {:>12} {:>12}", "t", "mass", "l2", "entropy");
    for r in res.iter().step_by(25) {
        println!("{:>5.2} {:>12.3e} {:>12.3e} {:>12.3e}", r.t, r.mass, r.l2, r.entropy);
    }
    let worst = |f: fn(&radgas::diagnostics::BalanceResiduals) -> f64| res.iter().map(f).fold(0.0, f64::max);
    println!(
        "largest residuals: mass {:.3e}, l2 {:.3e}, entropy {:.3e}",
        worst(|r| r.mass),
        worst(|r| r.l2),
        worst(|r| r.entropy)
    );
    Ok(())
}
