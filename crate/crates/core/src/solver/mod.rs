//! Semi-discrete right-hand side, stability-limited time steps and the two
//! integrators (explicit Heun, split IMEX).
//!
//! The temperature is advanced through its non-conservative form
//!
//! ```text
//! e_θ θ_t + θ p_θ u_x = μ u_x²/v + (κ θ_x / v)_x + λ φ z
//! ```
//!
//! All diffusive fluxes are conservative flux differences with arithmetic
//! half-node averages of their coefficients.

mod run;
mod tridiag;

pub use run::{run, run_from, run_with, Event, RunOutput};
pub use tridiag::solve_tridiagonal;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::{self, Parameters};

/// Tolerance on the reactant mass fraction leaving `[0, 1]` by round-off.
pub const Z_SLACK: f64 = 1e-10;
/// Guard added to `2φ` in the reaction time-scale bound.
pub const RATE_GUARD: f64 = 1e-30;

/// How the truncated line is closed at `x = ±L`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BoundaryMode {
    /// Boundary nodes are clamped to the far-field state `(1, 0, 1, 0)`.
    #[default]
    FarField,
    /// `u = 0`, `θ_x = 0`, `z_x = 0` at both ends (reflected ghost values).
    InsulatedWall,
}

/// Grid samples of `(v, u, θ, z)` at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub t: f64,
    pub grid: Grid,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub theta: Vec<f64>,
    pub z: Vec<f64>,
}

impl State {
    /// The constant state `(1, 0, 1, 0)`.
    pub fn equilibrium(grid: Grid) -> Self {
        let n = grid.len();
        Self {
            t: 0.0,
            grid,
            v: vec![1.0; n],
            u: vec![0.0; n],
            theta: vec![1.0; n],
            z: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Checks alignment, finiteness, positivity of `v` and `θ`, and
    /// `z ∈ [−1e−10, 1 + 1e−10]`.
    pub fn validate(&self) -> Result<()> {
        for f in [&self.v, &self.u, &self.theta, &self.z] {
            self.grid.check(f)?;
        }
        check_positive(self)?;
        for (i, &z) in self.z.iter().enumerate() {
            if !(-Z_SLACK..=1.0 + Z_SLACK).contains(&z) {
                return Err(Error::Contract(format!(
                    "reactant fraction z = {z} outside [0, 1] at node {i}"
                )));
            }
        }
        Ok(())
    }

    /// Largest nodal deviation from `(1, 0, 1, 0)` over all four fields.
    pub fn distance_from_equilibrium(&self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..self.len() {
            m = m
                .max((self.v[i] - 1.0).abs())
                .max(self.u[i].abs())
                .max((self.theta[i] - 1.0).abs())
                .max(self.z[i].abs());
        }
        m
    }

    fn apply_boundary(&mut self, bc: BoundaryMode) {
        let n = self.len();
        match bc {
            BoundaryMode::FarField => {
                for i in [0, n - 1] {
                    self.v[i] = 1.0;
                    self.u[i] = 0.0;
                    self.theta[i] = 1.0;
                    self.z[i] = 0.0;
                }
            }
            BoundaryMode::InsulatedWall => {
                self.u[0] = 0.0;
                self.u[n - 1] = 0.0;
            }
        }
    }

    fn axpy(&self, dt: f64, k: &Tendency) -> State {
        let add = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + dt * y).collect();
        State {
            t: self.t + dt,
            grid: self.grid.clone(),
            v: add(&self.v, &k.dv),
            u: add(&self.u, &k.du),
            theta: add(&self.theta, &k.dtheta),
            z: add(&self.z, &k.dz),
        }
    }
}

fn check_positive(s: &State) -> Result<()> {
    for (i, (&v, &th)) in s.v.iter().zip(&s.theta).enumerate() {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Positivity { field: "v", node: i, value: v });
        }
        if !(th > 0.0) || !th.is_finite() {
            return Err(Error::Positivity { field: "theta", node: i, value: th });
        }
    }
    for (name, f) in [("u", &s.u), ("z", &s.z)] {
        if let Some(i) = f.iter().position(|x| !x.is_finite()) {
            return Err(Error::Positivity { field: name, node: i, value: f[i] });
        }
    }
    Ok(())
}

/// Time derivatives of the four fields.
#[derive(Clone, Debug, PartialEq)]
pub struct Tendency {
    pub dv: Vec<f64>,
    pub du: Vec<f64>,
    pub dtheta: Vec<f64>,
    pub dz: Vec<f64>,
}

impl Tendency {
    fn zeros(n: usize) -> Self {
        Self {
            dv: vec![0.0; n],
            du: vec![0.0; n],
            dtheta: vec![0.0; n],
            dz: vec![0.0; n],
        }
    }

    fn average(&self, other: &Tendency) -> Tendency {
        let avg = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
        Tendency {
            dv: avg(&self.dv, &other.dv),
            du: avg(&self.du, &other.du),
            dtheta: avg(&self.dtheta, &other.dtheta),
            dz: avg(&self.dz, &other.dz),
        }
    }
}

/// Field values padded with one ghost node at each end.
struct Padded {
    v: Vec<f64>,
    u: Vec<f64>,
    theta: Vec<f64>,
    z: Vec<f64>,
}

impl Padded {
    fn new(s: &State, bc: BoundaryMode) -> Self {
        let n = s.len();
        let pad = |f: &[f64], left: f64, right: f64| {
            let mut out = Vec::with_capacity(n + 2);
            out.push(left);
            out.extend_from_slice(f);
            out.push(right);
            out
        };
        match bc {
            // Ghosts are never used: boundary tendencies are zero.
            BoundaryMode::FarField => Self {
                v: pad(&s.v, 1.0, 1.0),
                u: pad(&s.u, 0.0, 0.0),
                theta: pad(&s.theta, 1.0, 1.0),
                z: pad(&s.z, 0.0, 0.0),
            },
            BoundaryMode::InsulatedWall => Self {
                v: pad(&s.v, s.v[1], s.v[n - 2]),
                u: pad(&s.u, -s.u[1], -s.u[n - 2]),
                theta: pad(&s.theta, s.theta[1], s.theta[n - 2]),
                z: pad(&s.z, s.z[1], s.z[n - 2]),
            },
        }
    }
}

/// Which groups of terms a right-hand-side evaluation includes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Terms {
    All,
    /// Everything except heat conduction and species diffusion.
    NoDiffusion,
}

/// Full semi-discrete right-hand side.
pub fn compute_rhs(s: &State, par: &Parameters, bc: BoundaryMode) -> Result<Tendency> {
    rhs(s, par, bc, Terms::All)
}

fn rhs(s: &State, par: &Parameters, bc: BoundaryMode, terms: Terms) -> Result<Tendency> {
    for f in [&s.v, &s.u, &s.theta, &s.z] {
        s.grid.check(f)?;
    }
    check_positive(s)?;
    let n = s.len();
    let dx = s.grid.dx();
    let inv_dx2 = 1.0 / (dx * dx);
    let inv_2dx = 0.5 / dx;
    let (mu, d, lambda) = (par.viscosity, par.species_diffusion, par.heat_release);
    let (r, cv, a) = (par.gas_constant, par.specific_heat, par.radiation_constant);
    let diffusion = terms == Terms::All;

    let g = Padded::new(s, bc);
    let m = n + 2;
    let mut p = vec![0.0; m];
    let mut inv_v = vec![0.0; m];
    let mut k_over_v = vec![0.0; m];
    for j in 0..m {
        let (v, th) = (g.v[j], g.theta[j]);
        p[j] = model::pressure_unchecked(v, th, par);
        inv_v[j] = 1.0 / v;
        if diffusion {
            k_over_v[j] = model::conductivity_unchecked(v, th, par) * inv_v[j];
        }
    }
    // Fluxes at half nodes: entry h sits between padded nodes h and h + 1.
    let mut visc = vec![0.0; m - 1];
    let mut heat = vec![0.0; m - 1];
    let mut spec = vec![0.0; m - 1];
    for h in 0..m - 1 {
        visc[h] = 0.5 * (inv_v[h] + inv_v[h + 1]) * (g.u[h + 1] - g.u[h]);
        if diffusion {
            heat[h] = 0.5 * (k_over_v[h] + k_over_v[h + 1]) * (g.theta[h + 1] - g.theta[h]);
            let iv2 = inv_v[h] * inv_v[h] + inv_v[h + 1] * inv_v[h + 1];
            spec[h] = 0.5 * d * iv2 * (g.z[h + 1] - g.z[h]);
        }
    }

    let mut out = Tendency::zeros(n);
    let range = match bc {
        BoundaryMode::FarField => 1..n - 1,
        BoundaryMode::InsulatedWall => 0..n,
    };
    for i in range {
        let j = i + 1;
        let (v, th, z) = (g.v[j], g.theta[j], g.z[j]);
        let u_x = (g.u[j + 1] - g.u[j - 1]) * inv_2dx;
        let th3 = th * th * th;
        let p_theta = r * inv_v[j] + 4.0 / 3.0 * a * th3;
        let e_theta = cv + 4.0 * a * v * th3;
        let phi = model::reaction_rate_unchecked(th, par);
        let conduction = (heat[j] - heat[j - 1]) * inv_dx2;
        let species = (spec[j] - spec[j - 1]) * inv_dx2;

        out.dv[i] = u_x;
        out.du[i] = -(p[j + 1] - p[j - 1]) * inv_2dx + mu * (visc[j] - visc[j - 1]) * inv_dx2;
        out.dtheta[i] =
            (-th * p_theta * u_x + mu * u_x * u_x * inv_v[j] + conduction + lambda * phi * z) / e_theta;
        out.dz[i] = species - phi * z;
    }
    if bc == BoundaryMode::InsulatedWall {
        out.du[0] = 0.0;
        out.du[n - 1] = 0.0;
    }
    Ok(out)
}

fn stable_dt_impl(s: &State, par: &Parameters, cfl: f64, diffusion: bool) -> Result<f64> {
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(Error::domain(format!("cfl must lie in (0, 1], got {cfl}")));
    }
    check_positive(s)?;
    let dx = s.grid.dx();
    let (mut diff, mut c2_max, mut phi_max, mut th_max) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    // K θ^β e^{−A/θ} increases with θ when β, A ≥ 0: one evaluation suffices.
    let rate_monotone = par.rate_exponent >= 0.0 && par.activation_energy >= 0.0;
    for i in 0..s.len() {
        let (v, th) = (s.v[i], s.theta[i]);
        let tp = model::partials_unchecked(v, th, par);
        diff = diff.max(par.viscosity / v);
        if diffusion {
            let kappa = model::conductivity_unchecked(v, th, par);
            diff = diff
                .max(kappa / (v * tp.e_theta))
                .max(par.species_diffusion / (v * v));
        }
        c2_max = c2_max.max(th * tp.p_theta * tp.p_theta / tp.e_theta - tp.p_v);
        if !rate_monotone {
            phi_max = phi_max.max(model::reaction_rate_unchecked(th, par));
        }
        th_max = th_max.max(th);
    }
    if rate_monotone {
        phi_max = model::reaction_rate_unchecked(th_max, par);
    }
    let dt = (dx * dx / (2.0 * diff))
        .min(dx / c2_max.sqrt())
        .min(1.0 / (2.0 * phi_max + RATE_GUARD));
    Ok(cfl * dt)
}

/// Explicit stability bound
/// `cfl · min_i { dx²/(2D), dx/c, 1/(2φ + ε₀) }` with
/// `D = max(μ/v, κ/(v e_θ), d/v²)` and the Lagrangian sound speed
/// `c² = θ p_θ²/e_θ − p_v`.
pub fn stable_dt(s: &State, par: &Parameters, cfl: f64) -> Result<f64> {
    stable_dt_impl(s, par, cfl, true)
}

/// Bound for [`step_imex`]: heat conduction and species diffusion are
/// implicit there, so only viscosity enters the diffusive limit.
pub fn stable_dt_imex(s: &State, par: &Parameters, cfl: f64) -> Result<f64> {
    stable_dt_impl(s, par, cfl, false)
}

fn blow_up(t: f64, e: Error) -> Error {
    match e {
        Error::Positivity { field, node, value } => Error::BlowUp {
            t,
            node,
            reason: format!("{field} = {value}"),
        },
        other => other,
    }
}

fn accept(mut s: State, bc: BoundaryMode) -> Result<State> {
    s.apply_boundary(bc);
    check_positive(&s).map_err(|e| blow_up(s.t, e))?;
    if let Some(i) = s.z.iter().position(|&z| !(-Z_SLACK..=1.0 + Z_SLACK).contains(&z)) {
        return Err(Error::BlowUp {
            t: s.t,
            node: i,
            reason: format!("z = {} left [0, 1]", s.z[i]),
        });
    }
    Ok(s)
}

/// One step of Heun's method (explicit trapezoidal Runge-Kutta).
pub fn step(s: &State, par: &Parameters, bc: BoundaryMode, dt: f64) -> Result<State> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::domain(format!("time step must be positive, got {dt}")));
    }
    let k1 = compute_rhs(s, par, bc).map_err(|e| blow_up(s.t, e))?;
    let s1 = accept(s.axpy(dt, &k1), bc)?;
    let k2 = compute_rhs(&s1, par, bc).map_err(|e| blow_up(s1.t, e))?;
    let mut next = s.axpy(dt, &k1.average(&k2));
    next.t = s.t + dt;
    accept(next, bc)
}

/// First-order split step: Heun on every non-diffusive term, then backward
/// Euler for heat conduction and species diffusion with coefficients frozen
/// at the start of the step.
pub fn step_imex(s: &State, par: &Parameters, bc: BoundaryMode, dt: f64) -> Result<State> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::domain(format!("time step must be positive, got {dt}")));
    }
    let k1 = rhs(s, par, bc, Terms::NoDiffusion).map_err(|e| blow_up(s.t, e))?;
    let s1 = accept(s.axpy(dt, &k1), bc)?;
    let k2 = rhs(&s1, par, bc, Terms::NoDiffusion).map_err(|e| blow_up(s1.t, e))?;
    let mut star = s.axpy(dt, &k1.average(&k2));
    star.t = s.t + dt;
    star.apply_boundary(bc);

    let n = s.len();
    let dx = s.grid.dx();
    let r = dt / (dx * dx);
    // Half-node coefficients from the stage-start state; index h is i + 1/2.
    let kv: Vec<f64> = (0..n)
        .map(|i| model::conductivity_unchecked(s.v[i], s.theta[i], par) / s.v[i])
        .collect();
    let k_half: Vec<f64> = (0..n - 1).map(|h| 0.5 * (kv[h] + kv[h + 1])).collect();
    let d_half: Vec<f64> = (0..n - 1)
        .map(|h| {
            0.5 * par.species_diffusion
                * (1.0 / (s.v[h] * s.v[h]) + 1.0 / (s.v[h + 1] * s.v[h + 1]))
        })
        .collect();
    let e_theta: Vec<f64> = (0..n)
        .map(|i| model::partials_unchecked(s.v[i], s.theta[i], par).e_theta)
        .collect();

    let theta = implicit_diffusion(&star.theta, &k_half, &e_theta, r, bc, 1.0)?;
    let ones = vec![1.0; n];
    let z = implicit_diffusion(&star.z, &d_half, &ones, r, bc, 0.0)?;
    star.theta = theta;
    star.z = z;
    accept(star, bc)
}

/// Solves `cap_i (y_i − rhs_i) = r · [c_{i+½}(y_{i+1} − y_i) − c_{i−½}(y_i − y_{i−1})]`.
fn implicit_diffusion(
    rhs: &[f64],
    c_half: &[f64],
    cap: &[f64],
    r: f64,
    bc: BoundaryMode,
    far_value: f64,
) -> Result<Vec<f64>> {
    let n = rhs.len();
    let mut lower = vec![0.0; n];
    let mut diag = vec![1.0; n];
    let mut upper = vec![0.0; n];
    let mut b = rhs.to_vec();
    for i in 1..n - 1 {
        let wl = r * c_half[i - 1] / cap[i];
        let wr = r * c_half[i] / cap[i];
        lower[i] = -wl;
        upper[i] = -wr;
        diag[i] = 1.0 + wl + wr;
    }
    match bc {
        BoundaryMode::FarField => {
            b[0] = far_value;
            b[n - 1] = far_value;
        }
        BoundaryMode::InsulatedWall => {
            // Reflected ghost: both half-node fluxes at an end node coincide.
            let w0 = 2.0 * r * c_half[0] / cap[0];
            diag[0] = 1.0 + w0;
            upper[0] = -w0;
            let wn = 2.0 * r * c_half[n - 2] / cap[n - 1];
            diag[n - 1] = 1.0 + wn;
            lower[n - 1] = -wn;
        }
    }
    solve_tridiagonal(&lower, &diag, &upper, &b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid {
        Grid::new(5.0, n).unwrap()
    }

    fn smooth_state(g: &Grid) -> State {
        let mut s = State::equilibrium(g.clone());
        for i in 0..g.len() {
            let x = g.x(i);
            let bump = (-x * x).exp();
            s.v[i] = 1.0 + 0.3 * bump;
            s.u[i] = 0.2 * x * bump;
            s.theta[i] = 1.0 + 0.5 * (-(x - 0.3).powi(2)).exp();
            s.z[i] = 0.8 * (-(x + 0.4).powi(2) * 2.0).exp();
        }
        s.apply_boundary(BoundaryMode::FarField);
        s
    }

    #[test]
    fn equilibrium_is_fixed_point() {
        let par = Parameters::default();
        for bc in [BoundaryMode::FarField, BoundaryMode::InsulatedWall] {
            let s = State::equilibrium(grid(41));
            let k = compute_rhs(&s, &par, bc).unwrap();
            for f in [&k.dv, &k.du, &k.dtheta, &k.dz] {
                assert!(f.iter().all(|&x| x == 0.0));
            }
            let next = step(&s, &par, bc, 1e-3).unwrap();
            assert_eq!(next.t, 1e-3);
            assert!(next.distance_from_equilibrium() <= 1e-15);
            let next = step_imex(&s, &par, bc, 1e-1).unwrap();
            assert!(next.distance_from_equilibrium() <= 1e-15);
        }
    }

    #[test]
    fn uniform_reactant_reduces_to_ode() {
        let par = Parameters::default();
        let z0 = 0.6;
        let mut s = State::equilibrium(grid(21));
        s.z.iter_mut().for_each(|z| *z = z0);
        let k = compute_rhs(&s, &par, BoundaryMode::InsulatedWall).unwrap();
        let phi = (-1.0f64).exp();
        for i in 0..21 {
            assert!((k.dz[i] + phi * z0).abs() < 1e-15);
            assert!((k.dtheta[i] - phi * z0 / 5.0).abs() < 1e-15);
            assert_eq!(k.dv[i], 0.0);
            assert_eq!(k.du[i], 0.0);
        }
        // Interior nodes see the same under clamping.
        let k = compute_rhs(&s, &par, BoundaryMode::FarField).unwrap();
        assert!((k.dz[10] + phi * z0).abs() < 1e-15);
    }

    #[test]
    fn positivity_error_names_node() {
        let par = Parameters::default();
        let mut s = State::equilibrium(grid(21));
        s.theta[7] = -0.1;
        match compute_rhs(&s, &par, BoundaryMode::FarField) {
            Err(Error::Positivity { field: "theta", node: 7, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        s.theta[7] = 1.0;
        s.v[3] = 0.0;
        match step(&s, &par, BoundaryMode::FarField, 1e-3) {
            Err(Error::BlowUp { node: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stable_dt_examples() {
        let par = Parameters::default();
        let g = Grid::new(0.1 * 40.0 / 2.0, 41).unwrap();
        assert!((g.dx() - 0.1).abs() < 1e-15);
        let s = State::equilibrium(g);
        // p_θ = 7/3, e_θ = 5, p_v = −1: c = sqrt(49/45 + 1) ≈ 1.445, so the
        // diffusive cap 0.1²/2 wins.
        let c = (49.0f64 / 45.0 + 1.0).sqrt();
        assert!(0.1 / c > 0.005);
        let dt = stable_dt(&s, &par, 1.0).unwrap();
        assert!((dt - 0.005).abs() < 1e-15);
        assert!((stable_dt(&s, &par, 0.5).unwrap() - 0.0025).abs() < 1e-15);

        let g2 = Grid::new(0.2 * 40.0 / 2.0, 41).unwrap();
        let dt2 = stable_dt(&State::equilibrium(g2), &par, 1.0).unwrap();
        assert!((dt2 - 0.02).abs() < 1e-15);
        assert!(stable_dt(&s, &par, 0.0).is_err());
        assert!(stable_dt(&s, &par, 1.5).is_err());
    }

    #[test]
    fn insulated_wall_conserves_mass_and_reactant_balance() {
        let par = Parameters::default();
        let g = grid(81);
        let mut s = smooth_state(&g);
        s.u[0] = 0.0;
        s.u[80] = 0.0;
        let k = compute_rhs(&s, &par, BoundaryMode::InsulatedWall).unwrap();
        let dmass = crate::grid::integrate(&k.dv, &g).unwrap();
        assert!(dmass.abs() < 1e-12, "{dmass}");
        // Reactant: d/dt ∫z = −∫φz exactly for the discrete flux form.
        let dz = crate::grid::integrate(&k.dz, &g).unwrap();
        let phiz: Vec<f64> = (0..81)
            .map(|i| model::reaction_rate(s.theta[i], &par).unwrap() * s.z[i])
            .collect();
        let burn = crate::grid::integrate(&phiz, &g).unwrap();
        assert!((dz + burn).abs() < 1e-12);
    }

    #[test]
    fn z_stays_in_unit_interval() {
        let par = Parameters::default();
        let g = grid(101);
        let mut s = smooth_state(&g);
        s.z.iter_mut().for_each(|z| *z = (*z * 1.25).min(1.0));
        for _ in 0..200 {
            let dt = stable_dt(&s, &par, 0.9).unwrap();
            s = step(&s, &par, BoundaryMode::FarField, dt).unwrap();
            assert!(s.z.iter().all(|&z| (-Z_SLACK..=1.0 + Z_SLACK).contains(&z)));
        }
    }

    fn d(f: &dyn Fn(f64) -> f64, x: f64) -> f64 {
        let h = 2e-4;
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    /// The continuous right-hand side of the smooth state, from analytic
    /// fields and finely resolved derivatives.
    fn exact_rhs(x: f64, par: &Parameters) -> [f64; 4] {
        let v = |x: f64| 1.0 + 0.3 * (-x * x).exp();
        let u = |x: f64| 0.2 * x * (-x * x).exp();
        let th = |x: f64| 1.0 + 0.5 * (-(x - 0.3).powi(2)).exp();
        let z = |x: f64| 0.8 * (-(x + 0.4).powi(2) * 2.0).exp();
        let p = |x: f64| model::pressure(v(x), th(x), par).unwrap();
        let visc = |x: f64| d(&u, x) / v(x);
        let heat = |x: f64| model::conductivity(v(x), th(x), par).unwrap() * d(&th, x) / v(x);
        let spec = |x: f64| par.species_diffusion * d(&z, x) / (v(x) * v(x));
        let tp = model::partials(v(x), th(x), par).unwrap();
        let phi = model::reaction_rate(th(x), par).unwrap();
        let u_x = d(&u, x);
        [
            u_x,
            -d(&p, x) + par.viscosity * d(&visc, x),
            (-th(x) * tp.p_theta * u_x + par.viscosity * u_x * u_x / v(x) + d(&heat, x) + par.heat_release * phi * z(x))
                / tp.e_theta,
            d(&spec, x) - phi * z(x),
        ]
    }

    fn rhs_error(n: usize, par: &Parameters) -> [f64; 4] {
        let g = grid(n);
        let s = smooth_state(&g);
        let k = compute_rhs(&s, par, BoundaryMode::FarField).unwrap();
        let mut err = [0.0_f64; 4];
        for i in 1..n - 1 {
            let ex = exact_rhs(g.x(i), par);
            for (c, f) in [&k.dv, &k.du, &k.dtheta, &k.dz].into_iter().enumerate() {
                err[c] = err[c].max((f[i] - ex[c]).abs());
            }
        }
        err
    }

    #[test]
    fn rhs_converges_to_the_continuous_operator_at_second_order() {
        let par = Parameters::default();
        let (coarse, fine) = (rhs_error(201, &par), rhs_error(401, &par));
        for c in 0..4 {
            let order = (coarse[c] / fine[c]).log2();
            assert!(order >= 1.8, "field {c}: {coarse:?} -> {fine:?}");
        }
        assert!(fine.iter().all(|&e| e < 1e-2), "{fine:?}");
    }

    fn integrate_fixed(
        s0: &State,
        par: &Parameters,
        dt: f64,
        steps: usize,
        f: fn(&State, &Parameters, BoundaryMode, f64) -> Result<State>,
    ) -> State {
        let mut s = s0.clone();
        for _ in 0..steps {
            s = f(&s, par, BoundaryMode::FarField, dt).unwrap();
        }
        s
    }

    fn gap(a: &State, b: &State) -> f64 {
        [(&a.v, &b.v), (&a.u, &b.u), (&a.theta, &b.theta), (&a.z, &b.z)]
            .into_iter()
            .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
            .fold(0.0, f64::max)
    }

    #[test]
    fn heun_is_second_order_in_time() {
        let par = Parameters::default();
        let s0 = smooth_state(&grid(51));
        let dt = 0.5 * stable_dt(&s0, &par, 1.0).unwrap();
        let steps = 16;
        let reference = integrate_fixed(&s0, &par, dt / 16.0, steps * 16, step);
        let e1 = gap(&integrate_fixed(&s0, &par, dt, steps, step), &reference);
        let e2 = gap(&integrate_fixed(&s0, &par, dt / 2.0, steps * 2, step), &reference);
        assert!((e1 / e2).log2() >= 1.8, "{e1} {e2}");
    }

    #[test]
    fn imex_is_first_order_and_approaches_heun() {
        let par = Parameters::default();
        let s0 = smooth_state(&grid(51));
        let dt = 0.5 * stable_dt(&s0, &par, 1.0).unwrap();
        let steps = 16;
        let reference = integrate_fixed(&s0, &par, dt / 16.0, steps * 16, step);
        let e1 = gap(&integrate_fixed(&s0, &par, dt, steps, step_imex), &reference);
        let e2 = gap(&integrate_fixed(&s0, &par, dt / 2.0, steps * 2, step_imex), &reference);
        let order = (e1 / e2).log2();
        assert!((0.8..1.5).contains(&order), "{e1} {e2}");
    }

    /// Backward Euler damps a cosine temperature mode by
    /// `1/(1 + 4 r c sin²(k dx/2)/e_θ)`, however large the step.
    #[test]
    fn imex_damps_stiff_temperature_modes_like_backward_euler() {
        let par = Parameters {
            conductivity_slope: 100.0,
            ..Parameters::default()
        };
        let g = Grid::new(1.0, 101).unwrap();
        let dx = g.dx();
        let eps = 1e-6;
        let dt = stable_dt_imex(&State::equilibrium(g.clone()), &par, 1.0).unwrap();
        assert!(dt > 10.0 * stable_dt(&State::equilibrium(g.clone()), &par, 1.0).unwrap());
        for m in [10.0, 50.0] {
            let k = m * std::f64::consts::PI / g.half_length();
            let mut s = State::equilibrium(g.clone());
            for i in 0..g.len() {
                s.theta[i] = 1.0 + eps * (k * g.x(i)).cos();
            }
            let next = step_imex(&s, &par, BoundaryMode::InsulatedWall, dt).unwrap();
            let mid = g.len() / 2;
            let measured = (next.theta[mid] - 1.0) / (s.theta[mid] - 1.0);
            let c = 1.0 + 100.0;
            let e_theta = 5.0;
            let expected = 1.0 / (1.0 + 4.0 * dt / (dx * dx) * c * (0.5 * k * dx).sin().powi(2) / e_theta);
            assert!((measured / expected - 1.0).abs() < 0.05, "m = {m}: {measured} vs {expected}");
        }
    }
}
