//! Equal-time coherence functions `G^(m)` and the quantities built on them.

use serde::Serialize;

use crate::fock::{
    compensated_sum, falling_factorial, ln_falling_factorial, PhotonNumberDistribution,
    PureFockState,
};
use crate::{Error, Result};

/// `G^(m)` of a state together with its normalization against a coherent
/// state of the same intensity, `G^(m)_coh = n_av^m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherenceResult {
    pub order: u32,
    pub value: f64,
    pub n_av: f64,
    /// `value / n_av^m`; `None` for the vacuum, where it is undefined.
    pub ratio: Option<f64>,
}

/// Σ p_n n!/(n-m)! with compensated accumulation.
fn factorial_moment(populations: &[f64], m: u32) -> f64 {
    compensated_sum(
        populations
            .iter()
            .enumerate()
            .skip(m as usize)
            .filter(|(_, &p)| p > 0.0)
            .map(|(n, &p)| p * falling_factorial(n as u64, m as u64)),
    )
}

fn result_from_populations(populations: &[f64], n_av: f64, m: u32) -> Result<CoherenceResult> {
    if m < 1 {
        return Err(Error::domain("coherence order m must be at least 1"));
    }
    let value = factorial_moment(populations, m);
    let ratio = (n_av > 0.0).then(|| value / n_av.powi(m as i32));
    Ok(CoherenceResult {
        order: m,
        value,
        n_av,
        ratio,
    })
}

/// `G^(m) = ⟨(a†)^m a^m⟩ = Σ_n p_n n!/(n-m)!`.
pub fn coherence_gm(dist: &PhotonNumberDistribution, m: u32) -> Result<CoherenceResult> {
    result_from_populations(dist.probabilities(), dist.mean_photon_number(), m)
}

/// `G^(m)` straight from a pure state's amplitudes. Equal to
/// `coherence_gm(&state.dephase(), m)` bit for bit.
pub fn coherence_gm_pure(state: &PureFockState, m: u32) -> Result<CoherenceResult> {
    result_from_populations(state.populations(), state.mean_photon_number(), m)
}

fn check_bound_domain(n_av: f64, n_max: u64) -> Result<()> {
    if n_max < 2 {
        return Err(Error::domain("N_max must be at least 2"));
    }
    if !n_av.is_finite() || n_av < 0.0 || n_av > n_max as f64 {
        return Err(Error::domain(format!(
            "n_av = {n_av} outside [0, N_max = {n_max}]"
        )));
    }
    Ok(())
}

/// Largest `G^(2)` in `H_{N_max}` at mean photon number `n_av`:
/// `n_av (N_max - 1)`.
pub fn bound_g2(n_av: f64, n_max: u64) -> Result<f64> {
    check_bound_domain(n_av, n_max)?;
    Ok(n_av * (n_max - 1) as f64)
}

/// Largest `G^(m)` in `H_{N_max}`: `(N_max-2)!/(N_max-m)! · n_av (N_max-1)`.
pub fn bound_gm(m: u32, n_av: f64, n_max: u64) -> Result<f64> {
    if m < 2 {
        return Err(Error::domain("bound requires m >= 2"));
    }
    if m as u64 > n_max {
        return Err(Error::domain(format!("m = {m} exceeds N_max = {n_max}")));
    }
    Ok(unchecked_bound_gm(m, n_av, n_max.max(2)))
}

/// The bound formula without domain checks, for states whose own `n_av`
/// may sit outside `[0, N_max]`.
pub(crate) fn unchecked_bound_gm(m: u32, n_av: f64, n_max: u64) -> f64 {
    falling_factorial(n_max - 2, m as u64 - 2) * n_av * (n_max - 1) as f64
}

/// `G^(m)_coin / G^(m)_coh = (N_max-1)!/((N_max-m)! n_av^(m-1))`, exact
/// (no large-`N_max` approximation).
pub fn enhancement_coin(m: u32, n_av: f64, n_max: u64) -> Result<f64> {
    if m < 2 || m as u64 > n_max {
        return Err(Error::domain(format!(
            "enhancement requires 2 <= m <= N_max (m = {m}, N_max = {n_max})"
        )));
    }
    if !(n_av > 0.0) || !n_av.is_finite() {
        return Err(Error::domain("enhancement undefined for n_av <= 0"));
    }
    let numerator = falling_factorial(n_max - 1, m as u64 - 1);
    let denominator = n_av.powi(m as i32 - 1);
    let direct = numerator / denominator;
    if direct.is_finite() && direct > 0.0 && denominator.is_finite() && denominator > 0.0 {
        Ok(direct)
    } else {
        Ok((ln_falling_factorial(n_max - 1, m as u64 - 1) - (m - 1) as f64 * n_av.ln()).exp())
    }
}

/// `G^(m)_{coin,coh} / G^(m)_coh = (N_max/n_av)^(m-1)`.
///
/// This is the ideal value, with the coherent component of the mixture not
/// truncated and its vacuum overlap neglected. The numerically truncated
/// ratio follows from `coherence_gm(&coin_coherent_mixture(..), m)`.
pub fn enhancement_mixture(m: u32, n_av: f64, n_max: u64) -> Result<f64> {
    if m < 2 {
        return Err(Error::domain("enhancement requires m >= 2"));
    }
    if !(n_av > 0.0) || !n_av.is_finite() {
        return Err(Error::domain("enhancement undefined for n_av <= 0"));
    }
    Ok((n_max as f64 / n_av).powi(m as i32 - 1))
}

/// Single-mode line-shape factor `∫ dt e^{iΔt - γ|t|} = 2γ/(γ² + Δ²)`.
///
/// The same factor is used for every order `m`; whether the linewidth should
/// scale with `m` is left open.
pub fn lorentzian_factor(delta: f64, gamma_f: f64) -> Result<f64> {
    if !(gamma_f > 0.0) || !gamma_f.is_finite() {
        return Err(Error::domain(format!("gamma_F must be positive, got {gamma_f}")));
    }
    Ok(2.0 * gamma_f / (gamma_f * gamma_f + delta * delta))
}

/// Coupling constant, final-state linewidth and detuning of an `m`-photon
/// transition `|G⟩ → |F⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionParams {
    kappa: f64,
    gamma_f: f64,
    delta: f64,
}

impl TransitionParams {
    pub fn new(kappa: f64, gamma_f: f64, delta: f64) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::domain(format!("kappa must be positive, got {kappa}")));
        }
        if !(gamma_f > 0.0) || !gamma_f.is_finite() {
            return Err(Error::domain(format!("gamma_F must be positive, got {gamma_f}")));
        }
        if !delta.is_finite() {
            return Err(Error::domain("detuning must be finite"));
        }
        Ok(Self {
            kappa,
            gamma_f,
            delta,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn gamma_f(&self) -> f64 {
        self.gamma_f
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Lowest-order excitation probability `κ L(Δ, γ_F) G^(m) t` after time `t`.
///
/// Valid only in the perturbative regime; the value is not clamped to 1.
pub fn excitation_probability(
    dist: &PhotonNumberDistribution,
    m: u32,
    t: f64,
    params: &TransitionParams,
) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("time must be non-negative, got {t}")));
    }
    let gm = coherence_gm(dist, m)?.value;
    let line = lorentzian_factor(params.delta, params.gamma_f)?;
    Ok(params.kappa * line * gm * t)
}
