//! Local representation of the specific volume through a cut-off function.
//!
//! With the cut-off `χ_k(x) = 1` for `x ≤ k+1`, `k+2−x` on `[k+1, k+2]` and
//! `0` beyond, integrating the momentum equation against `χ_k` over `(x, ∞)`
//! gives, for `x ∈ [−k−1, k+1]`,
//!
//! ```text
//! v(t,x) = B(t,x) Y(t) + (1/μ) ∫₀ᵗ B(t,x) Y(t) v(s,x) p(s,x) / (B(s,x) Y(s)) ds
//! B(t,x) = v₀(x) exp{(1/μ) ∫ₓ^∞ (u₀ − u(t,·)) χ_k dy}
//! Y(t)   = exp{(1/μ) ∫₀ᵗ ∫_{k+1}^{k+2} σ dy ds},   σ = −p + μ u_x / v
//! ```
//!
//! The residual of this identity on a discrete trajectory measures how well
//! the solver honours the momentum balance in integrated form.

use crate::error::{Error, Result};
use crate::grid;
use crate::model::{self, Parameters};
use crate::solver::State;

/// Relative residual `|v − RHS|/v` on the nodes of `[−k−1, k+1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RepresentationResidual {
    pub times: Vec<f64>,
    /// Node indices covered by the window.
    pub nodes: Vec<usize>,
    /// `residual[n][j]` at `times[n]`, node `nodes[j]`.
    pub residual: Vec<Vec<f64>>,
}

impl RepresentationResidual {
    pub fn sup(&self) -> f64 {
        self.residual
            .iter()
            .flatten()
            .fold(0.0_f64, |m, &r| m.max(r))
    }
}

fn cutoff(x: f64, k: f64) -> f64 {
    if x <= k + 1.0 {
        1.0
    } else if x >= k + 2.0 {
        0.0
    } else {
        k + 2.0 - x
    }
}

/// `∫₀¹ e^{hτ} dτ` and `∫₀¹ τ e^{hτ} dτ`, accurate for all `h`.
fn exp_moments(h: f64) -> (f64, f64) {
    if h.abs() < 0.5 {
        // Σ hⁿ/(n+1)!  and  Σ hⁿ/(n!(n+2)).
        let (mut e1, mut e2) = (0.0, 0.0);
        let mut term = 1.0; // hⁿ/n!
        for n in 0..30 {
            e1 += term / (n + 1) as f64;
            e2 += term / (n + 2) as f64;
            term *= h / (n + 1) as f64;
        }
        (e1, e2)
    } else {
        let eh = h.exp();
        ((eh - 1.0) / h, ((h - 1.0) * eh + 1.0) / (h * h))
    }
}

/// Streaming evaluation of the representation identity: feed the states
/// of one trajectory in time order, starting with the initial state.
///
/// Spatial integrals use the trapezoid rule; the time integral of the
/// window stress uses the trapezoid rule and the memory integral is
/// integrated exactly for integrands that are linear in time times the
/// exponential of a linear function, which closes the identity at the
/// equilibrium to round-off.
#[derive(Clone, Debug)]
pub struct RepresentationTracker {
    par: Parameters,
    k: f64,
    s0: State,
    chi: Vec<f64>,
    nodes: Vec<usize>,
    log_y: f64,
    prev: Option<(f64, f64, Vec<f64>)>,
    /// Memory integral `∫₀ᵗ f(s) Y(t)/Y(s) ds` per window node, `f = v p / B`.
    q: Vec<f64>,
}

impl RepresentationTracker {
    pub fn new(s0: &State, par: &Parameters, k: usize) -> Result<Self> {
        let g = &s0.grid;
        let kf = k as f64;
        if kf + 2.0 > g.half_length() * (1.0 + 1e-12) {
            return Err(Error::domain(format!(
                "cut-off for k = {k} needs k + 2 <= L = {}",
                g.half_length()
            )));
        }
        s0.validate()?;
        let chi: Vec<f64> = (0..g.len()).map(|i| cutoff(g.x(i), kf)).collect();
        let nodes: Vec<usize> = (0..g.len()).filter(|&i| g.x(i).abs() <= kf + 1.0 + 1e-12).collect();
        Ok(Self {
            par: par.clone(),
            k: kf,
            s0: s0.clone(),
            q: vec![0.0; nodes.len()],
            chi,
            nodes,
            log_y: 0.0,
            prev: None,
        })
    }

    /// Node indices of the closed window `[−k−1, k+1]`.
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Residual `|v − RHS|/v` at the window nodes for the next state.
    pub fn push(&mut self, s: &State) -> Result<Vec<f64>> {
        let (s0, par) = (&self.s0, &self.par);
        if s.grid != s0.grid {
            return Err(Error::Contract("snapshots live on different grids".into()));
        }
        s.validate()?;
        let g = &s.grid;
        let n = g.len();
        let dx = g.dx();
        let mu = par.viscosity;

        // B(t, x) from the right-to-left cumulative trapezoid of (u₀ − u)χ.
        let integrand: Vec<f64> = (0..n).map(|i| (s0.u[i] - s.u[i]) * self.chi[i]).collect();
        let mut tail = vec![0.0; n];
        for i in (0..n - 1).rev() {
            tail[i] = tail[i + 1] + 0.5 * dx * (integrand[i] + integrand[i + 1]);
        }
        let b: Vec<f64> = self.nodes.iter().map(|&i| s0.v[i] * (tail[i] / mu).exp()).collect();

        let u_x = grid::ddx_raw(&s.u, dx);
        let sigma: Vec<f64> = (0..n)
            .map(|i| -model::pressure_unchecked(s.v[i], s.theta[i], par) + mu * u_x[i] / s.v[i])
            .collect();
        let sigma_bar = grid::interval_integral(&sigma, g, self.k + 1.0, self.k + 2.0)?;

        let f: Vec<f64> = self
            .nodes
            .iter()
            .zip(&b)
            .map(|(&i, bi)| s.v[i] * model::pressure_unchecked(s.v[i], s.theta[i], par) / bi)
            .collect();

        if let Some((prev_t, prev_sigma_bar, prev_f)) = &self.prev {
            let dt = s.t - prev_t;
            if !(dt > 0.0) {
                return Err(Error::Contract("snapshot times must increase".into()));
            }
            let new_log_y = self.log_y + 0.5 * dt * (prev_sigma_bar + sigma_bar) / mu;
            // Over the interval, ln(Y(t_new)/Y(s)) falls linearly from h to 0.
            let h = new_log_y - self.log_y;
            let decay = h.exp();
            let (e1, e2) = exp_moments(h);
            for (j, q) in self.q.iter_mut().enumerate() {
                *q = decay * *q + dt * (f[j] * e1 + (prev_f[j] - f[j]) * e2);
            }
            self.log_y = new_log_y;
        }

        let y = self.log_y.exp();
        let q = &self.q;
        let res = self
            .nodes
            .iter()
            .enumerate()
            .map(|(j, &i)| (s.v[i] - b[j] * (y + q[j] / mu)).abs() / s.v[i])
            .collect();
        self.prev = Some((s.t, sigma_bar, f));
        Ok(res)
    }
}

/// Evaluates the representation identity on a snapshot sequence whose
/// first element is the initial state.
pub fn representation_check(states: &[State], par: &Parameters, k: usize) -> Result<RepresentationResidual> {
    if states.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: states.len(),
        });
    }
    let mut tracker = RepresentationTracker::new(&states[0], par, k)?;
    let mut times = Vec::with_capacity(states.len());
    let mut residual = Vec::with_capacity(states.len());
    for s in states {
        residual.push(tracker.push(s)?);
        times.push(s.t);
    }
    Ok(RepresentationResidual {
        times,
        nodes: tracker.nodes().to_vec(),
        residual,
    })
}
