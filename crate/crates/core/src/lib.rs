//! Numerical laboratory for a one-dimensional viscous, heat-conducting,
//! radiative and reactive gas in Lagrangian mass coordinates.
//!
//! The crate solves
//!
//! ```text
//! v_t = u_x
//! u_t = σ_x,                         σ = −p + μ u_x / v
//! e_θ θ_t + θ p_θ u_x = μ u_x²/v + (κ θ_x / v)_x + λ φ z
//! z_t = (d z_x / v²)_x − φ z
//! ```
//!
//! with `p = Rθ/v + aθ⁴/3`, `e = C_v θ + a v θ⁴`, `κ = κ₁ + κ₂ v θᵇ` and the
//! Arrhenius rate `φ = K θ^β exp(−A/θ)`, and checks numerically the
//! balance laws, bounds and decay that hold for large data.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod io;
pub mod model;
pub mod scenarios;
pub mod solver;

pub use config::{parse_config, Config};
pub use error::{Error, Result};
pub use model::Parameters;
pub use solver::State;
