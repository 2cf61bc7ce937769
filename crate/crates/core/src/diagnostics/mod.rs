//! Balance laws, functionals and bounds evaluated on states and on record
//! sequences of whole trajectories.

mod record;
mod representation;

pub use record::{
    dissipation_v, energy_constant, record_of, ComponentNorms, DiagnosticsRecord,
    DiagnosticsTracker, COMPONENTS,
};
pub use representation::{representation_check, RepresentationResidual, RepresentationTracker};

use crate::error::{Error, Result};
use crate::grid;
use crate::model::Parameters;
use crate::solver::State;

/// Guard for every relative-residual denominator.
pub const EPS: f64 = 1e-300;

/// Relative residuals of the three integral balances at one record time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BalanceResiduals {
    pub t: f64,
    /// `∫z + ∫∫φz` against its initial value.
    pub mass: f64,
    /// `∫z² + 2∫∫(d z_x²/v² + φz²)` against its initial value.
    pub l2: f64,
    /// `∫(S̃ + u²/2) + ∫∫(dissipation) − λ∫∫φz` against its initial value,
    /// relative to the energy constant `C₀`.
    pub entropy: f64,
}

/// Residual series of the reactant mass, reactant L² and entropy-energy
/// balances, measured from the first record.
pub fn balance_residuals(records: &[DiagnosticsRecord], par: &Parameters) -> Result<Vec<BalanceResiduals>> {
    if records.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: records.len(),
        });
    }
    let r0 = &records[0];
    let mass0 = r0.reactant_mass + r0.reactant_burn_accum;
    let l2_0 = r0.reactant_l2 + r0.l2_burn_accum;
    let ent0 = r0.lyapunov + r0.dissipation_accum - r0.source_accum;
    let c0 = (r0.lyapunov + par.heat_release * r0.reactant_mass).abs();
    Ok(records
        .iter()
        .map(|r| BalanceResiduals {
            t: r.t,
            mass: ((r.reactant_mass + r.reactant_burn_accum) - mass0).abs() / mass0.abs().max(EPS),
            l2: ((r.reactant_l2 + r.l2_burn_accum) - l2_0).abs() / l2_0.abs().max(EPS),
            entropy: ((r.lyapunov + r.dissipation_accum - r.source_accum) - ent0).abs() / c0.max(EPS),
        })
        .collect())
}

/// The functionals X, Y, Z, W at one time.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Functionals {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
}

/// X, Y, Z, W along a uniformly spaced state sequence. Time derivatives are
/// central differences at interval midpoints.
pub fn functionals_xyzw(states: &[State], par: &Parameters) -> Result<Vec<Functionals>> {
    if states.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    if states.len() >= 3 {
        let h0 = states[1].t - states[0].t;
        for w in states.windows(2) {
            let h = w[1].t - w[0].t;
            if (h - h0).abs() > 1e-9 * h0.abs().max(1e-300) {
                return Err(Error::Contract(format!(
                    "state spacing must be uniform: {h} differs from {h0}"
                )));
            }
        }
    }
    let mut out = Vec::with_capacity(states.len());
    let mut prev: Option<record::Snapshot> = None;
    let mut acc = Functionals::default();
    for s in states {
        let snap = record::snapshot(s, par)?;
        if let Some(p) = &prev {
            let (dx, dw) = record::xw_increment(p, &snap, &s.grid, par);
            acc.x += dx;
            acc.w += dw;
            acc.y = acc.y.max(snap.theta_x_energy);
            acc.z = acc.z.max(snap.u_xx_energy);
        } else {
            acc.y = snap.theta_x_energy;
            acc.z = snap.u_xx_energy;
        }
        acc.t = s.t;
        out.push(acc);
        prev = Some(snap);
    }
    Ok(out)
}

fn relent(y: f64) -> f64 {
    y - y.ln() - 1.0
}

/// The two roots `a₁ ≤ 1 ≤ a₂` of `y − ln y − 1 = c`, found by bisection
/// to machine resolution (the small root is bisected in `ln y`).
pub fn entropy_roots(c: f64) -> Result<(f64, f64)> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::domain(format!("entropy_roots needs finite c >= 0, got {c}")));
    }
    if c == 0.0 {
        return Ok((1.0, 1.0));
    }
    // Small root: s = ln y ∈ [−(c+1), 0], g(s) = e^s − s − 1 decreasing.
    let (mut lo, mut hi) = (-(c + 1.0), 0.0_f64);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mid.exp() - mid - 1.0 > c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a1 = (0.5 * (lo + hi)).exp();

    let (mut lo, mut hi) = (1.0_f64, 2.0_f64);
    while relent(hi) < c {
        hi *= 2.0;
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if relent(mid) < c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a2 = 0.5 * (lo + hi);
    Ok((a1.min(1.0), a2.max(1.0)))
}

/// Outcome of [`window_bounds_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowVerdict {
    pub pass: bool,
    /// `ℓ a₁(C₀/(ℓ m))` with `ℓ = 2k + 2`, `m = min(R, Cv)`.
    pub lower: f64,
    /// `ℓ a₂(C₀/(ℓ m))`.
    pub upper: f64,
    pub v_integral: f64,
    pub theta_integral: f64,
}

/// Checks `lower ≤ ∫_{Ω_k} v dx` and `∫_{Ω_k} θ dx ≤ upper` on the window
/// `Ω_k = (−k−1, k+1)` of length `ℓ = 2k+2`.
///
/// Jensen's inequality on the window turns `∫_{Ω_k} R(v − ln v − 1) ≤ C₀`
/// into `ȳ − ln ȳ − 1 ≤ C₀/(ℓ R)` for the window mean `ȳ`, so the bounds are
/// the roots at `C₀/(ℓ m)` scaled by `ℓ`. At equilibrium (`C₀ = 0`) both
/// bounds equal `ℓ` and the check holds with equality.
pub fn window_bounds_check(s: &State, par: &Parameters, c0: f64, k: usize) -> Result<WindowVerdict> {
    let v_integral = grid::window_integral(&s.v, &s.grid, k)?;
    let theta_integral = grid::window_integral(&s.theta, &s.grid, k)?;
    let len = 2.0 * k as f64 + 2.0;
    let m = par.gas_constant.min(par.specific_heat);
    let (a1, a2) = entropy_roots(c0.max(0.0) / (len * m))?;
    let (lower, upper) = (len * a1, len * a2);
    let tol = 1e-8 * (1.0 + upper.abs());
    Ok(WindowVerdict {
        pass: v_integral >= lower - tol && theta_integral <= upper + tol,
        lower,
        upper,
        v_integral,
        theta_integral,
    })
}

/// Outcome of [`temperature_floor_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloorVerdict {
    pub pass: bool,
    /// Envelope `m(t) ≤ intercept + slope·t` fitted on the first half.
    pub slope: f64,
    pub intercept: f64,
    /// Largest `m(t)/envelope(t)` over the second half.
    pub worst_ratio: f64,
}

/// Allowed excess of `max 1/θ` over the extrapolated affine envelope.
pub const FLOOR_MARGIN: f64 = 0.10;

/// Tests that `m(t) = max_x 1/θ(t, x)` grows at most affinely.
///
/// A least-squares line with non-negative slope is fitted to `m` on the
/// first half of the record span and raised by its largest residual there,
/// giving an upper envelope; the check passes iff `m` stays below
/// `(1 + 10%)·envelope` on the second half.
pub fn temperature_floor_check(records: &[DiagnosticsRecord]) -> Result<FloorVerdict> {
    if records.len() < 10 {
        return Err(Error::InsufficientData {
            needed: 10,
            got: records.len(),
        });
    }
    let t0 = records[0].t;
    let t1 = records[records.len() - 1].t;
    let tmid = 0.5 * (t0 + t1);
    let pts: Vec<(f64, f64)> = records.iter().map(|r| (r.t, 1.0 / r.thetamin)).collect();
    type Points = Vec<(f64, f64)>;
    let (first, second): (Points, Points) = pts.into_iter().partition(|(t, _)| *t <= tmid);
    if first.len() < 2 || second.is_empty() {
        return Err(Error::InsufficientData {
            needed: 10,
            got: records.len(),
        });
    }
    let nf = first.len() as f64;
    let mt = first.iter().map(|p| p.0).sum::<f64>() / nf;
    let mm = first.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = first.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sxy: f64 = first.iter().map(|p| (p.0 - mt) * (p.1 - mm)).sum();
    let slope = if sxx > 0.0 { (sxy / sxx).max(0.0) } else { 0.0 };
    let mut intercept = mm - slope * mt;
    let lift = first
        .iter()
        .map(|p| p.1 - (intercept + slope * p.0))
        .fold(0.0_f64, f64::max);
    intercept += lift;
    let worst_ratio = second
        .iter()
        .map(|p| p.1 / (intercept + slope * p.0))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(FloorVerdict {
        pass: worst_ratio.is_finite() && worst_ratio <= 1.0 + FLOOR_MARGIN && worst_ratio > 0.0,
        slope,
        intercept,
        worst_ratio,
    })
}

/// Decay of one perturbation component between two record times.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComponentDecay {
    pub name: &'static str,
    pub linf_ref: f64,
    pub linf_end: f64,
    pub linf_ratio: f64,
    pub l2_ratio: f64,
    pub gradient_ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayReport {
    pub t_ref: f64,
    pub t_end: f64,
    pub components: [ComponentDecay; 4],
    /// Every L∞ ratio is below one.
    pub decaying: bool,
    /// `∫(‖u_x‖² + ‖θ_x‖² + ‖z_x‖²)` over the second half of the span.
    pub tail_dissipation: f64,
    /// The same integral over the first half.
    pub head_dissipation: f64,
}

impl DecayReport {
    pub fn tail_ratio(&self) -> f64 {
        self.tail_dissipation / self.head_dissipation.max(EPS)
    }
}

fn nearest(records: &[DiagnosticsRecord], t: f64) -> &DiagnosticsRecord {
    records
        .iter()
        .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
        .expect("non-empty records")
}

fn gradient_energy(r: &DiagnosticsRecord) -> f64 {
    r.norms[1].h1.powi(2) + r.norms[2].h1.powi(2) + r.norms[3].h1.powi(2)
}

/// Decay report comparing the record nearest `t_ref` with the last record.
pub fn decay_between(records: &[DiagnosticsRecord], t_ref: f64) -> Result<DecayReport> {
    if records.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: records.len(),
        });
    }
    let end = records.last().unwrap();
    let reference = nearest(records, t_ref);
    let ratio = |a: f64, b: f64| a / b.max(EPS);
    let components = std::array::from_fn(|c| {
        let (e, r) = (end.norms[c], reference.norms[c]);
        ComponentDecay {
            name: COMPONENTS[c],
            linf_ref: r.linf,
            linf_end: e.linf,
            linf_ratio: ratio(e.linf, r.linf),
            l2_ratio: ratio(e.l2, r.l2),
            gradient_ratio: ratio(e.h1, r.h1),
        }
    });
    let t0 = records[0].t;
    let tmid = 0.5 * (t0 + end.t);
    let (mut head, mut tail) = (0.0, 0.0);
    for w in records.windows(2) {
        let piece = 0.5 * (w[1].t - w[0].t) * (gradient_energy(&w[0]) + gradient_energy(&w[1]));
        if w[1].t <= tmid {
            head += piece;
        } else if w[0].t >= tmid {
            tail += piece;
        } else {
            // Split the straddling interval proportionally.
            let f = (tmid - w[0].t) / (w[1].t - w[0].t);
            head += f * piece;
            tail += (1.0 - f) * piece;
        }
    }
    Ok(DecayReport {
        t_ref: reference.t,
        t_end: end.t,
        decaying: components.iter().all(|c: &ComponentDecay| c.linf_ratio < 1.0),
        components,
        tail_dissipation: tail,
        head_dissipation: head,
    })
}

/// Decay report over records spanning at least two time units, with the
/// reference time at a tenth of the final time.
pub fn decay_report(records: &[DiagnosticsRecord]) -> Result<DecayReport> {
    let span = match (records.first(), records.last()) {
        (Some(a), Some(b)) => b.t - a.t,
        _ => 0.0,
    };
    if records.len() < 2 || span < 2.0 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: records.len(),
        });
    }
    decay_between(records, records.last().unwrap().t / 10.0)
}

/// The interpolation exponents `(λ₁, λ₂)` of the temperature upper-bound
/// argument:
///
/// ```text
/// λ₁ = max{(b+3)/(b+5), 3(b+3)/(8(b+2)), 1/2, 3(b+3)/(2(3b+9−2q))}
/// λ₂ = max{(3b+9)/(4b+10), 3(b+3)/(2(2b+6−q))},   q = max{1, (7−b)₊}
/// ```
pub fn proof_exponents(b: f64) -> Result<(f64, f64)> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::domain(format!("proof exponents need b > 0, got {b}")));
    }
    let q = 1.0_f64.max((7.0 - b).max(0.0));
    // A non-positive denominator means the interpolation has no admissible
    // exponent at all; report it as unbounded.
    let frac = |num: f64, den: f64| if den > 0.0 { num / den } else { f64::INFINITY };
    let l1 = ((b + 3.0) / (b + 5.0))
        .max(3.0 * (b + 3.0) / (8.0 * (b + 2.0)))
        .max(0.5)
        .max(frac(3.0 * (b + 3.0), 2.0 * (3.0 * b + 9.0 - 2.0 * q)));
    let l2 = ((3.0 * b + 9.0) / (4.0 * b + 10.0)).max(frac(3.0 * (b + 3.0), 2.0 * (2.0 * b + 6.0 - q)));
    Ok((l1, l2))
}
