//! Constitutive laws of the radiative reactive gas.
//!
//! Pressure and internal energy carry a perfect-gas part linear in the
//! temperature and a Stefan-Boltzmann part quartic in it:
//!
//! ```text
//! p(v, θ) = Rθ/v + aθ⁴/3        e(v, θ) = Cv θ + a v θ⁴
//! κ(v, θ) = κ₁ + κ₂ v θᵇ        φ(θ)    = K θ^β exp(−A/θ)
//! ```
//!
//! Every function here is a pure function of its value inputs and rejects
//! non-positive specific volume or temperature with [`Error::Domain`].

use crate::error::{Error, Result};

/// Test hook that deliberately corrupts one constitutive law so that the
/// verification suite can demonstrate it catches the defect.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mutation {
    #[default]
    None,
    /// Flips the sign of the radiation term in [`pressure`] only.
    FlipRadiationPressure,
}

/// Physical constants of the model plus an optional mutation hook.
#[derive(Clone, Debug, PartialEq)]
pub struct Parameters {
    pub gas_constant: f64,
    pub specific_heat: f64,
    pub radiation_constant: f64,
    pub viscosity: f64,
    pub conductivity_offset: f64,
    pub conductivity_slope: f64,
    pub conductivity_exponent: f64,
    pub rate_prefactor: f64,
    pub activation_energy: f64,
    pub rate_exponent: f64,
    pub heat_release: f64,
    pub species_diffusion: f64,
    pub mutation: Mutation,
}

impl Default for Parameters {
    fn default() -> Self {
        Self {
            gas_constant: 1.0,
            specific_heat: 1.0,
            radiation_constant: 1.0,
            viscosity: 1.0,
            conductivity_offset: 1.0,
            conductivity_slope: 1.0,
            conductivity_exponent: 4.0,
            rate_prefactor: 1.0,
            activation_energy: 1.0,
            rate_exponent: 0.0,
            heat_release: 1.0,
            species_diffusion: 1.0,
            mutation: Mutation::None,
        }
    }
}

impl Parameters {
    /// `b > 11/3` and `0 ≤ β < b + 9`: the region where global existence and
    /// decay to equilibrium are proved.
    pub fn theorem_regime(&self) -> bool {
        let b = self.conductivity_exponent;
        let beta = self.rate_exponent;
        b > 11.0 / 3.0 && beta >= 0.0 && beta < b + 9.0
    }

    /// Equilibrium pressure `p(1, 1) = R + a/3`.
    pub fn equilibrium_pressure(&self) -> f64 {
        self.gas_constant + self.radiation_constant / 3.0
    }

    /// Named view of the fields, in config-key order.
    pub fn named_fields(&self) -> [(&'static str, f64); 12] {
        [
            ("R", self.gas_constant),
            ("Cv", self.specific_heat),
            ("a", self.radiation_constant),
            ("mu", self.viscosity),
            ("kappa1", self.conductivity_offset),
            ("kappa2", self.conductivity_slope),
            ("b", self.conductivity_exponent),
            ("K", self.rate_prefactor),
            ("A", self.activation_energy),
            ("beta", self.rate_exponent),
            ("lambda", self.heat_release),
            ("d", self.species_diffusion),
        ]
    }
}

/// Outcome of [`validate_params`] for a sign-valid parameter set.
#[derive(Clone, Debug, PartialEq)]
pub struct RegimeReport {
    pub in_regime: bool,
    pub warnings: Vec<String>,
}

/// Rejects sign violations; flags, but accepts, parameter sets outside the
/// theorem regime so experiments can probe beyond it.
pub fn validate_params(par: &Parameters) -> Result<RegimeReport> {
    for (name, value) in par.named_fields() {
        let ok = if name == "beta" {
            value >= 0.0
        } else {
            value > 0.0
        };
        if !ok || !value.is_finite() {
            let need = if name == "beta" { ">= 0" } else { "> 0" };
            return Err(Error::domain(format!(
                "parameter {name} = {value} must be finite and {need}"
            )));
        }
    }
    let mut warnings = Vec::new();
    let b = par.conductivity_exponent;
    if b <= 11.0 / 3.0 {
        warnings.push(format!(
            "b = {b} is outside the proven regime b > 11/3; running anyway"
        ));
    }
    if par.rate_exponent >= b + 9.0 {
        warnings.push(format!(
            "beta = {} is outside the proven regime beta < b + 9 = {}; running anyway",
            par.rate_exponent,
            b + 9.0
        ));
    }
    Ok(RegimeReport {
        in_regime: par.theorem_regime(),
        warnings,
    })
}

#[inline]
fn check_state(v: f64, theta: f64) -> Result<()> {
    if v > 0.0 && theta > 0.0 && v.is_finite() && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "thermodynamic state requires v > 0 and theta > 0, got v = {v}, theta = {theta}"
        )))
    }
}

#[inline]
pub(crate) fn pressure_unchecked(v: f64, theta: f64, par: &Parameters) -> f64 {
    let radiation = par.radiation_constant * theta.powi(4) / 3.0;
    match par.mutation {
        Mutation::None => par.gas_constant * theta / v + radiation,
        Mutation::FlipRadiationPressure => par.gas_constant * theta / v - radiation,
    }
}

/// `θ^e`, through repeated multiplication when `e` is a small integer.
#[inline]
pub(crate) fn pow(theta: f64, e: f64) -> f64 {
    if e.fract() == 0.0 && e.abs() <= 32.0 {
        let (mut n, mut base, mut acc) = (e.abs() as u32, theta, 1.0);
        while n > 0 {
            if n & 1 == 1 {
                acc *= base;
            }
            base *= base;
            n >>= 1;
        }
        if e < 0.0 {
            1.0 / acc
        } else {
            acc
        }
    } else {
        theta.powf(e)
    }
}

#[inline]
pub(crate) fn conductivity_unchecked(v: f64, theta: f64, par: &Parameters) -> f64 {
    par.conductivity_offset + par.conductivity_slope * v * pow(theta, par.conductivity_exponent)
}

#[inline]
pub(crate) fn reaction_rate_unchecked(theta: f64, par: &Parameters) -> f64 {
    let exponent = par.activation_energy / theta;
    // exp underflows to zero well before this; the limit θ → 0⁺ is zero.
    if exponent > 745.0 {
        return 0.0;
    }
    let power = if par.rate_exponent == 0.0 {
        1.0
    } else {
        pow(theta, par.rate_exponent)
    };
    par.rate_prefactor * power * (-exponent).exp()
}

/// `p = Rθ/v + aθ⁴/3`.
pub fn pressure(v: f64, theta: f64, par: &Parameters) -> Result<f64> {
    check_state(v, theta)?;
    Ok(pressure_unchecked(v, theta, par))
}

/// `e = Cv θ + a v θ⁴`.
pub fn internal_energy(v: f64, theta: f64, par: &Parameters) -> Result<f64> {
    check_state(v, theta)?;
    Ok(par.specific_heat * theta + par.radiation_constant * v * theta.powi(4))
}

/// Thermodynamic partial derivatives at one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermoPartials {
    pub p: f64,
    pub p_v: f64,
    pub p_theta: f64,
    pub e: f64,
    pub e_v: f64,
    pub e_theta: f64,
    pub s_v: f64,
    pub s_theta: f64,
}

/// Analytic partials. The entropy derivatives are filled through the
/// Maxwell relations, so `s_v == p_theta` and `e_v == θ p_theta − p` hold
/// by construction.
pub fn partials(v: f64, theta: f64, par: &Parameters) -> Result<ThermoPartials> {
    check_state(v, theta)?;
    Ok(partials_unchecked(v, theta, par))
}

#[inline]
pub(crate) fn partials_unchecked(v: f64, theta: f64, par: &Parameters) -> ThermoPartials {
    let (r, cv, a) = (par.gas_constant, par.specific_heat, par.radiation_constant);
    let theta3 = theta * theta * theta;
    let theta4 = theta3 * theta;
    let p = r * theta / v + a * theta4 / 3.0;
    let p_theta = r / v + 4.0 / 3.0 * a * theta3;
    let e_theta = cv + 4.0 * a * v * theta3;
    ThermoPartials {
        p,
        p_v: -r * theta / (v * v),
        p_theta,
        e: cv * theta + a * v * theta4,
        e_v: theta * p_theta - p,
        e_theta,
        s_v: p_theta,
        s_theta: e_theta / theta,
    }
}

/// Heat conductivity `κ₁ + κ₂ v θᵇ`.
pub fn conductivity(v: f64, theta: f64, par: &Parameters) -> Result<f64> {
    check_state(v, theta)?;
    Ok(conductivity_unchecked(v, theta, par))
}

/// Antiderivative of `κ(v, ·)/v` in the temperature, vanishing at θ = 0:
/// `κ₁θ/v + κ₂θ^(b+1)/(b+1)`.
pub fn kappa_potential(v: f64, theta: f64, par: &Parameters) -> Result<f64> {
    check_state(v, theta)?;
    let b = par.conductivity_exponent;
    Ok(par.conductivity_offset * theta / v + par.conductivity_slope * theta.powf(b + 1.0) / (b + 1.0))
}

/// Arrhenius rate `K θ^β exp(−A/θ)`; exactly zero once the exponential
/// underflows.
pub fn reaction_rate(theta: f64, par: &Parameters) -> Result<f64> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::domain(format!(
            "reaction rate requires theta > 0, got {theta}"
        )));
    }
    Ok(reaction_rate_unchecked(theta, par))
}

/// Physical entropy `Cv ln θ + (4/3) a v θ³ + R ln v`.
pub fn entropy(v: f64, theta: f64, par: &Parameters) -> Result<f64> {
    check_state(v, theta)?;
    Ok(par.specific_heat * theta.ln()
        + 4.0 / 3.0 * par.radiation_constant * v * theta.powi(3)
        + par.gas_constant * v.ln())
}

#[inline]
pub(crate) fn normalized_entropy_unchecked(v: f64, theta: f64, par: &Parameters) -> f64 {
    let (r, cv, a) = (par.gas_constant, par.specific_heat, par.radiation_constant);
    let dt = theta - 1.0;
    // y − ln y − 1 loses all digits near y = 1; ln_1p keeps them.
    let relent = |y: f64| (y - 1.0) - (y - 1.0).ln_1p();
    cv * relent(theta) + r * relent(v) + a * v * dt * dt * (3.0 * theta * theta + 2.0 * theta + 1.0) / 3.0
}

/// Relative entropy around `(v, θ) = (1, 1)`, written as a sum of
/// non-negative terms. Zero only at the equilibrium.
pub fn normalized_entropy(v: f64, theta: f64, par: &Parameters) -> Result<f64> {
    check_state(v, theta)?;
    Ok(normalized_entropy_unchecked(v, theta, par))
}

/// The same relative entropy assembled from energy, pressure and entropy:
/// `e − e(1,1) + p(1,1)(v − 1) − (S − S(1,1))`.
pub fn normalized_entropy_energy_form(v: f64, theta: f64, par: &Parameters) -> Result<f64> {
    check_state(v, theta)?;
    let (r, cv, a) = (par.gas_constant, par.specific_heat, par.radiation_constant);
    let s = entropy(v, theta, par)?;
    Ok(cv * theta + a * v * theta.powi(4) - (cv + a) + (r + a / 3.0) * (v - 1.0)
        - (s - 4.0 / 3.0 * a))
}

/// Total stress `σ = −p + μ u_x / v`.
pub fn stress(v: f64, theta: f64, u_x: f64, par: &Parameters) -> Result<f64> {
    check_state(v, theta)?;
    Ok(-pressure_unchecked(v, theta, par) + par.viscosity * u_x / v)
}
