//! Constitutive laws at a few states, and the consistency of the entropy
//! with pressure and energy.

use radgas::model::{self, Parameters};

fn main() -> radgas::Result<()> {
    let par = Parameters::default();
    let report = model::validate_params(&par)?;
    println!("default parameters in the proven regime: {}", report.in_regime);

    println!("{:>5} {:>5} {:>10} {:>10} {:>10} {:>10} {:>10} {:>12}", "v", "theta", "p", "e", "kappa", "phi", "S~", "S~ (energy)");
    for (v, th) in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.5), (1.5, 3.0)] {
        println!(
            "{v:>5} {th:>5} {:>10.5} {:>10.5} {:>10.4} {:>10.5} {:>10.6} {:>12.6}",
            model::pressure(v, th, &par)?,
            model::internal_energy(v, th, &par)?,
            model::conductivity(v, th, &par)?,
            model::reaction_rate(th, &par)?,
            model::normalized_entropy(v, th, &par)?,
            model::normalized_entropy_energy_form(v, th, &par)?,
        );
    }

    // dS/dv = dp/dθ, checked by central differences.
    let (v, th, h) = (0.7, 1.8, 1e-6);
    let ds_dv = (model::entropy(v + h, th, &par)? - model::entropy(v - h, th, &par)?) / (2.0 * h);
    let tp = model::partials(v, th, &par)?;
    println!("dS/dv = {ds_dv:.9}, dp/dtheta = {:.9}", tp.p_theta);
    Ok(())
}
