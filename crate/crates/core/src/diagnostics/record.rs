use crate::error::{Error, Result};
use crate::grid::{self, Grid};
use crate::model::{self, Parameters};
use crate::solver::State;

/// L², L∞ norms and H¹ seminorm of one perturbation component.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ComponentNorms {
    pub l2: f64,
    pub linf: f64,
    pub h1: f64,
}

/// Names of the perturbation components, in record order.
pub const COMPONENTS: [&str; 4] = ["v", "u", "theta", "z"];

/// One time slice of balances, functionals, extrema and norms.
///
/// Accumulators (`*_accum`, `theta_t_accum`, `u_xt_accum`) integrate in time
/// over the record sequence; the `*_rate` fields hold the instantaneous
/// integrands those accumulators are built from.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// `∫ z dx`
    pub reactant_mass: f64,
    /// `∫₀ᵗ ∫ φ z dx ds`
    pub reactant_burn_accum: f64,
    /// `∫ z² dx`
    pub reactant_l2: f64,
    /// `2 ∫₀ᵗ ∫ (d z_x²/v² + φ z²) dx ds`
    pub l2_burn_accum: f64,
    /// `∫ (S̃ + u²/2) dx`
    pub lyapunov: f64,
    /// `∫₀ᵗ ∫ (μ u_x²/(vθ) + κ θ_x²/(vθ²) + λ φ z/θ) dx ds`
    pub dissipation_accum: f64,
    /// `λ ∫₀ᵗ ∫ φ z dx ds`
    pub source_accum: f64,
    /// Entropy dissipation rate `∫ (μ u_x²/(vθ) + κ θ_x²/(vθ²)) dx`.
    pub dissipation_v: f64,
    /// X: `∫₀ᵗ ∫ (1 + θ^{b+3}) θ_t² dx ds`
    pub theta_t_accum: f64,
    /// Y: running maximum of `∫ (1 + θ^{2b}) θ_x² dx`
    pub theta_x_peak: f64,
    /// Z: running maximum of `∫ u_xx² dx`
    pub u_xx_peak: f64,
    /// W: `∫₀ᵗ ∫ u_xt² dx ds`
    pub u_xt_accum: f64,
    pub vmin: f64,
    pub vmax: f64,
    pub thetamin: f64,
    pub thetamax: f64,
    pub zmin: f64,
    pub zmax: f64,
    /// Norms of `(v − 1, u, θ − 1, z)`.
    pub norms: [ComponentNorms; 4],
    pub burn_rate: f64,
    pub l2_burn_rate: f64,
    pub dissipation_rate: f64,
    pub source_rate: f64,
}

/// Quantities that depend on a single state only.
#[derive(Clone, Debug)]
pub(crate) struct Snapshot {
    pub record: DiagnosticsRecord,
    pub theta: Vec<f64>,
    pub u_x: Vec<f64>,
    /// `∫ (1 + θ^{2b}) θ_x² dx`
    pub theta_x_energy: f64,
    /// `∫ u_xx² dx`
    pub u_xx_energy: f64,
}

pub(crate) fn snapshot(s: &State, par: &Parameters) -> Result<Snapshot> {
    s.validate()?;
    let g = &s.grid;
    let n = s.len();
    let dx = g.dx();
    let u_x = grid::ddx_raw(&s.u, dx);
    let th_x = grid::ddx_raw(&s.theta, dx);
    let z_x = grid::ddx_raw(&s.z, dx);
    let u_xx = grid::d2dx2_raw(&s.u, dx);
    let mu = par.viscosity;
    let d = par.species_diffusion;
    let lambda = par.heat_release;
    let b = par.conductivity_exponent;

    let phi: Vec<f64> = s.theta.iter().map(|&th| model::reaction_rate_unchecked(th, par)).collect();
    let tz = |f: &dyn Fn(usize) -> f64| grid::trapezoid_map(n, dx, f);

    let dissipation_v = tz(&|i| {
        let (v, th) = (s.v[i], s.theta[i]);
        let kappa = model::conductivity_unchecked(v, th, par);
        mu * u_x[i] * u_x[i] / (v * th) + kappa * th_x[i] * th_x[i] / (v * th * th)
    });
    let burn_rate = tz(&|i| phi[i] * s.z[i]);
    let reaction_entropy = tz(&|i| lambda * phi[i] * s.z[i] / s.theta[i]);
    let l2_burn_rate = 2.0
        * tz(&|i| d * z_x[i] * z_x[i] / (s.v[i] * s.v[i]) + phi[i] * s.z[i] * s.z[i]);
    let lyapunov = tz(&|i| {
        model::normalized_entropy_unchecked(s.v[i], s.theta[i], par) + 0.5 * s.u[i] * s.u[i]
    });

    let ev = grid::extrema(&s.v)?;
    let et = grid::extrema(&s.theta)?;
    let ez = grid::extrema(&s.z)?;

    let mut norms = [ComponentNorms::default(); 4];
    let fields: [(&[f64], f64); 4] = [(&s.v, 1.0), (&s.u, 0.0), (&s.theta, 1.0), (&s.z, 0.0)];
    for (slot, (f, base)) in norms.iter_mut().zip(fields) {
        let pert: Vec<f64> = f.iter().map(|x| x - base).collect();
        let nm = grid::norms(&pert, g)?;
        *slot = ComponentNorms {
            l2: nm.l2,
            linf: nm.linf,
            h1: nm.h1_semi,
        };
    }

    let theta_x_energy = tz(&|i| (1.0 + s.theta[i].powf(2.0 * b)) * th_x[i] * th_x[i]);
    let u_xx_energy = tz(&|i| u_xx[i] * u_xx[i]);

    let record = DiagnosticsRecord {
        t: s.t,
        reactant_mass: grid::trapezoid(&s.z, dx),
        reactant_l2: tz(&|i| s.z[i] * s.z[i]),
        lyapunov,
        dissipation_v,
        vmin: ev.min,
        vmax: ev.max,
        thetamin: et.min,
        thetamax: et.max,
        zmin: ez.min,
        zmax: ez.max,
        norms,
        burn_rate,
        l2_burn_rate,
        dissipation_rate: dissipation_v + reaction_entropy,
        source_rate: lambda * burn_rate,
        theta_x_peak: theta_x_energy,
        u_xx_peak: u_xx_energy,
        ..DiagnosticsRecord::default()
    };
    Ok(Snapshot {
        record,
        theta: s.theta.clone(),
        u_x,
        theta_x_energy,
        u_xx_energy,
    })
}

/// Midpoint increments of X and W between two slices:
/// `θ_t ≈ (θ_b − θ_a)/Δ`, weighted with `1 + θ_m^{b+3}` at the midpoint
/// `θ_m = (θ_a + θ_b)/2`.
pub(crate) fn xw_increment(a: &Snapshot, b: &Snapshot, grid: &Grid, par: &Parameters) -> (f64, f64) {
    let dt = b.record.t - a.record.t;
    if dt <= 0.0 {
        return (0.0, 0.0);
    }
    let n = a.theta.len();
    let dx = grid.dx();
    let p = par.conductivity_exponent + 3.0;
    let x = grid::trapezoid_map(n, dx, |i| {
        let d = b.theta[i] - a.theta[i];
        let m = 0.5 * (a.theta[i] + b.theta[i]);
        (1.0 + m.powf(p)) * d * d
    }) / dt;
    let w = grid::trapezoid_map(n, dx, |i| {
        let d = b.u_x[i] - a.u_x[i];
        d * d
    }) / dt;
    (x, w)
}

/// Streaming builder of the record sequence of one trajectory.
#[derive(Clone, Debug)]
pub struct DiagnosticsTracker {
    par: Parameters,
    last: Option<(Snapshot, Grid)>,
}

impl DiagnosticsTracker {
    pub fn new(par: &Parameters) -> Self {
        Self {
            par: par.clone(),
            last: None,
        }
    }

    /// Continues a trajectory whose last emitted record is `record`, taken
    /// at the state `s`.
    pub fn resume(par: &Parameters, record: &DiagnosticsRecord, s: &State) -> Result<Self> {
        if record.t != s.t {
            return Err(Error::Contract(format!(
                "record time {} does not match state time {}",
                record.t, s.t
            )));
        }
        let mut snap = snapshot(s, par)?;
        snap.record = record.clone();
        Ok(Self {
            par: par.clone(),
            last: Some((snap, s.grid.clone())),
        })
    }

    pub fn last(&self) -> Option<&DiagnosticsRecord> {
        self.last.as_ref().map(|(s, _)| &s.record)
    }

    /// Emits the record for `s`, advancing every accumulator with the
    /// trapezoid rule in time from the previous record.
    pub fn push(&mut self, s: &State) -> Result<DiagnosticsRecord> {
        let mut snap = snapshot(s, &self.par)?;
        if let Some((prev, grid)) = &self.last {
            let p = &prev.record;
            let dt = s.t - p.t;
            if dt < 0.0 {
                return Err(Error::Contract(format!(
                    "diagnostic times must not decrease ({} after {})",
                    s.t, p.t
                )));
            }
            let r = &mut snap.record;
            let trap = |a: f64, b: f64| 0.5 * dt * (a + b);
            r.reactant_burn_accum = p.reactant_burn_accum + trap(p.burn_rate, r.burn_rate);
            r.l2_burn_accum = p.l2_burn_accum + trap(p.l2_burn_rate, r.l2_burn_rate);
            r.dissipation_accum = p.dissipation_accum + trap(p.dissipation_rate, r.dissipation_rate);
            r.source_accum = p.source_accum + trap(p.source_rate, r.source_rate);
            let (dxf, dwf) = xw_increment(prev, &snap, grid, &self.par);
            let r = &mut snap.record;
            r.theta_t_accum = p.theta_t_accum + dxf;
            r.u_xt_accum = p.u_xt_accum + dwf;
            r.theta_x_peak = p.theta_x_peak.max(snap.theta_x_energy);
            r.u_xx_peak = p.u_xx_peak.max(snap.u_xx_energy);
        }
        let rec = snap.record.clone();
        self.last = Some((snap, s.grid.clone()));
        Ok(rec)
    }
}

/// Evaluates the instantaneous part of a record (accumulators zero).
pub fn record_of(s: &State, par: &Parameters) -> Result<DiagnosticsRecord> {
    Ok(snapshot(s, par)?.record)
}

/// Entropy dissipation rate `V = ∫ (μ u_x²/(vθ) + κ θ_x²/(vθ²)) dx`.
pub fn dissipation_v(s: &State, par: &Parameters) -> Result<f64> {
    Ok(snapshot(s, par)?.record.dissipation_v)
}

/// `C₀ = ∫ (S̃(v₀, θ₀) + u₀²/2 + λ z₀) dx`, the constant bounding the
/// Lyapunov functional along the whole trajectory.
pub fn energy_constant(s0: &State, par: &Parameters) -> Result<f64> {
    let r = record_of(s0, par)?;
    Ok(r.lyapunov + par.heat_release * r.reactant_mass)
}
