//! Initial data: compactly supported perturbations of `(1, 0, 1, 0)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::solver::State;

/// Smallest admissible initial specific volume or temperature.
pub const POSITIVITY_FLOOR: f64 = 0.05;
/// Perturbations vanish outside `|x| ≤ SUPPORT_FRACTION · L`.
pub const SUPPORT_FRACTION: f64 = 0.8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ScenarioKind {
    Equilibrium,
    #[default]
    Gaussian,
    Multibump,
    SeededRandom,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Equilibrium => "equilibrium",
            ScenarioKind::Gaussian => "gaussian",
            ScenarioKind::Multibump => "multibump",
            ScenarioKind::SeededRandom => "seeded_random",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "equilibrium" => ScenarioKind::Equilibrium,
            "gaussian" => ScenarioKind::Gaussian,
            "multibump" => ScenarioKind::Multibump,
            "seeded_random" => ScenarioKind::SeededRandom,
            _ => return None,
        })
    }
}

/// Peak perturbation amplitudes of `(v, u, θ, z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Amplitudes {
    pub v: f64,
    pub u: f64,
    pub theta: f64,
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub amplitude: Amplitudes,
    /// Standard deviation of one gaussian bump.
    pub width: f64,
    /// Centre of the perturbation.
    pub center: f64,
    pub seed: u64,
}

impl Default for ScenarioSpec {
    /// The large-data reference preset.
    fn default() -> Self {
        Self {
            kind: ScenarioKind::Gaussian,
            amplitude: Amplitudes {
                v: 0.5,
                u: 0.5,
                theta: 1.0,
                z: 1.0,
            },
            width: 0.35,
            center: 0.0,
            seed: 0,
        }
    }
}

impl ScenarioSpec {
    pub fn equilibrium() -> Self {
        Self {
            kind: ScenarioKind::Equilibrium,
            ..Self::default()
        }
    }
}

/// Quintic smoothstep from 1 (at `r ≤ 1/2`) to 0 (at `r ≥ 1`); C² overall.
fn taper(r: f64) -> f64 {
    if r <= 0.5 {
        1.0
    } else if r >= 1.0 {
        0.0
    } else {
        let s = 2.0 * (1.0 - r);
        s * s * s * (s * (6.0 * s - 15.0) + 10.0)
    }
}

/// Shapes of one bump: `(G, odd profile with peak 1)`.
fn bump(x: f64, center: f64, width: f64, radius: f64) -> (f64, f64) {
    let s = (x - center) / width;
    let w = taper((x - center).abs() / radius);
    let g = (-0.5 * s * s).exp() * w;
    // s·exp(−s²/2) peaks at s = 1 with value e^{−1/2}.
    (g, s * 0.5f64.exp() * (-0.5 * s * s).exp() * w)
}

/// Builds the initial state for `spec` on `g`.
pub fn build(spec: &ScenarioSpec, g: &Grid) -> Result<State> {
    let mut s = State::equilibrium(g.clone());
    if spec.kind == ScenarioKind::Equilibrium {
        return Ok(s);
    }
    let a = spec.amplitude;
    for (name, value) in [("dv", a.v), ("du", a.u), ("dtheta", a.theta), ("dz", a.z)] {
        if !value.is_finite() {
            return Err(Error::domain(format!("scenario amplitude {name} is not finite")));
        }
    }
    if !(spec.width > 0.0) {
        return Err(Error::domain(format!("scenario width must be > 0, got {}", spec.width)));
    }
    let outer = SUPPORT_FRACTION * g.half_length();

    match spec.kind {
        ScenarioKind::Equilibrium => unreachable!(),
        ScenarioKind::Gaussian | ScenarioKind::Multibump => {
            let centers: Vec<f64> = if spec.kind == ScenarioKind::Gaussian {
                vec![spec.center]
            } else {
                let sp = 4.0 * spec.width;
                vec![spec.center - sp, spec.center, spec.center + sp]
            };
            let reach = centers.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
            let radius = outer - reach;
            if radius < 3.0 * spec.width {
                return Err(Error::domain(format!(
                    "perturbation support does not fit: bumps of width {} centred up to {reach} \
                     need |x| <= {} inside the inner {}% of the domain",
                    spec.width,
                    reach + 3.0 * spec.width,
                    SUPPORT_FRACTION * 100.0
                )));
            }
            for i in 0..g.len() {
                let x = g.x(i);
                let (mut gsum, mut osum) = (0.0, 0.0);
                for &c in &centers {
                    let (gb, ob) = bump(x, c, spec.width, radius);
                    gsum += gb;
                    osum += ob;
                }
                s.v[i] = 1.0 + a.v * gsum;
                s.u[i] = a.u * osum;
                s.theta[i] = 1.0 + a.theta * gsum;
                s.z[i] = a.z * gsum;
            }
        }
        ScenarioKind::SeededRandom => {
            let radius = outer - spec.center.abs();
            if radius < 3.0 * spec.width {
                return Err(Error::domain(format!(
                    "random perturbation centred at {} does not fit the inner {}% of the domain",
                    spec.center,
                    SUPPORT_FRACTION * 100.0
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let mut field = |amp: f64| -> Vec<f64> {
                let modes: Vec<(f64, f64)> = (0..8)
                    .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                let raw: Vec<f64> = (0..g.len())
                    .map(|i| {
                        let y = (g.x(i) - spec.center) / radius;
                        let mut f = 0.0;
                        for (m, (c, sn)) in modes.iter().enumerate() {
                            let k = (m + 1) as f64 * std::f64::consts::PI;
                            f += (c * (k * y).cos() + sn * (k * y).sin()) / (m + 1) as f64;
                        }
                        f * taper(y.abs())
                    })
                    .collect();
                let peak = raw.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
                if peak == 0.0 {
                    raw
                } else {
                    raw.iter().map(|x| amp * x / peak).collect()
                }
            };
            for (name, amp) in [("dv", a.v), ("dtheta", a.theta)] {
                if !(amp > -1.0) {
                    return Err(Error::domain(format!(
                        "seeded_random needs {name} > -1, got {amp}"
                    )));
                }
            }
            // Unit-peak fields; v and θ vary geometrically between
            // 1/(1+δ) and 1+δ so large amplitudes stay positive.
            let fv = field(1.0);
            let fu = field(a.u);
            let fth = field(1.0);
            let fz = field(a.z);
            for i in 0..g.len() {
                s.v[i] = (1.0 + a.v).powf(fv[i]);
                s.u[i] = fu[i];
                s.theta[i] = (1.0 + a.theta).powf(fth[i]);
                s.z[i] = fz[i].abs();
            }
        }
    }

    for zi in s.z.iter_mut() {
        *zi = zi.clamp(0.0, 1.0);
    }
    let n = g.len();
    for i in [0, n - 1] {
        s.v[i] = 1.0;
        s.u[i] = 0.0;
        s.theta[i] = 1.0;
        s.z[i] = 0.0;
    }
    for (name, f) in [("v", &s.v), ("theta", &s.theta)] {
        if let Some(i) = f.iter().position(|&x| !(x >= POSITIVITY_FLOOR)) {
            return Err(Error::domain(format!(
                "initial {name} = {} at x = {} is below the floor {POSITIVITY_FLOOR}",
                f[i],
                g.x(i)
            )));
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(20.0, 801).unwrap()
    }

    #[test]
    fn equilibrium_spec() {
        let s = build(&ScenarioSpec::equilibrium(), &grid()).unwrap();
        assert_eq!(s.distance_from_equilibrium(), 0.0);
    }

    #[test]
    fn zero_amplitude_gaussian_is_equilibrium() {
        let spec = ScenarioSpec {
            amplitude: Amplitudes { v: 0.0, u: 0.0, theta: 0.0, z: 0.0 },
            ..ScenarioSpec::default()
        };
        let s = build(&spec, &grid()).unwrap();
        assert_eq!(s.distance_from_equilibrium(), 0.0);
    }

    #[test]
    fn reference_preset_shape() {
        let g = grid();
        let s = build(&ScenarioSpec::default(), &g).unwrap();
        s.validate().unwrap();
        let mid = g.len() / 2;
        assert!((s.theta[mid] - 2.0).abs() < 1e-12);
        assert!((s.v[mid] - 1.5).abs() < 1e-12);
        assert!((s.z[mid] - 1.0).abs() < 1e-12);
        let umax = s.u.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        assert!((umax - 0.5).abs() < 1e-3);
        for i in 0..g.len() {
            if g.x(i).abs() >= 0.8 * 20.0 {
                assert_eq!((s.v[i], s.u[i], s.theta[i], s.z[i]), (1.0, 0.0, 1.0, 0.0));
            }
        }
    }

    #[test]
    fn seeded_random_is_deterministic_and_admissible() {
        let g = grid();
        let spec = ScenarioSpec {
            kind: ScenarioKind::SeededRandom,
            seed: 42,
            ..ScenarioSpec::default()
        };
        let a = build(&spec, &g).unwrap();
        let b = build(&spec, &g).unwrap();
        assert_eq!(a, b);
        a.validate().unwrap();
        let c = build(&ScenarioSpec { seed: 43, ..spec }, &g).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn multibump_clips_z() {
        let spec = ScenarioSpec {
            kind: ScenarioKind::Multibump,
            width: 0.5,
            ..ScenarioSpec::default()
        };
        let s = build(&spec, &grid()).unwrap();
        assert!(s.z.iter().all(|&z| (0.0..=1.0).contains(&z)));
        s.validate().unwrap();
    }

    #[test]
    fn rejections() {
        let g = grid();
        let cold = ScenarioSpec {
            amplitude: Amplitudes { v: 0.0, u: 0.0, theta: -0.99, z: 0.0 },
            ..ScenarioSpec::default()
        };
        let err = build(&cold, &g).unwrap_err().to_string();
        assert!(err.contains("theta"), "{err}");
        let wide = ScenarioSpec { width: 6.0, ..ScenarioSpec::default() };
        assert!(build(&wide, &g).is_err());
        let off = ScenarioSpec { center: 15.0, ..ScenarioSpec::default() };
        assert!(build(&off, &g).is_err());
    }
}
