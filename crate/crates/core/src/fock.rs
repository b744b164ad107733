//! Fock-basis state representations and the combinatorics shared by the
//! rest of the crate.
//!
//! Only the photon-number populations enter `G^(m)`, so pure states are
//! stored as populations `|c_n|²` plus a phase per level. Dephasing is then
//! an exact projection onto the populations.

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::{Error, Result};

/// Absolute tolerance on `Σ p_n = 1` that every stored state satisfies.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Largest normalization drift that constructors silently remove.
/// Anything beyond this is treated as a caller error.
pub const RENORM_TOLERANCE: f64 = 1e-9;

/// Falling factorials with `m` above this are evaluated through log-gamma.
pub const DEFAULT_PRODUCT_LIMIT: u64 = 64;

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// `n!/(n-m)! = n (n-1) ... (n-m+1)`, the eigenvalue of `(a†)^m a^m` on `|n⟩`.
///
/// Zero when `m > n`, one when `m = 0`. Short products are evaluated exactly
/// as a running product (exact in `f64` while the result stays below 2^53);
/// longer ones go through log-gamma and saturate to `+inf` only when the
/// true value exceeds the `f64` range.
pub fn falling_factorial(n: u64, m: u64) -> f64 {
    falling_factorial_with_limit(n, m, DEFAULT_PRODUCT_LIMIT)
}

/// [`falling_factorial`] with an explicit running-product length limit.
pub fn falling_factorial_with_limit(n: u64, m: u64, product_limit: u64) -> f64 {
    if m > n {
        return 0.0;
    }
    if m <= product_limit {
        let mut acc = 1.0_f64;
        for k in 0..m {
            acc *= (n - k) as f64;
        }
        acc
    } else {
        ln_falling_factorial(n, m).exp()
    }
}

/// Natural log of [`falling_factorial`]; `-inf` when `m > n`.
pub fn ln_falling_factorial(n: u64, m: u64) -> f64 {
    if m > n {
        return f64::NEG_INFINITY;
    }
    if m <= 4096 {
        // a difference of two large log-gamma values loses ~|ln n!| ulps
        return compensated_sum((0..m).map(|k| ((n - k) as f64).ln()));
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma((n - m) as f64 + 1.0)
}

/// Validates non-negative weights and removes a normalization drift of at
/// most [`RENORM_TOLERANCE`].
fn normalize(mut weights: Vec<f64>) -> Result<Vec<f64>> {
    if weights.is_empty() {
        return Err(Error::Empty);
    }
    for (index, &value) in weights.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidProbability { index, value });
        }
    }
    let total = compensated_sum(weights.iter().copied());
    if (total - 1.0).abs() > RENORM_TOLERANCE {
        return Err(Error::NotNormalized {
            total,
            tolerance: RENORM_TOLERANCE,
        });
    }
    if total != 1.0 {
        for w in weights.iter_mut() {
            *w /= total;
        }
    }
    Ok(weights)
}

/// Photon-number populations `p_0..=p_cutoff` (the Fock-basis diagonal of a
/// density matrix).
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonNumberDistribution {
    probabilities: Vec<f64>,
}

impl PhotonNumberDistribution {
    /// Builds a distribution, renormalizing small drifts.
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        Ok(Self {
            probabilities: normalize(probabilities)?,
        })
    }

    /// `p_n = δ_{n,k}` on levels `0..=cutoff`.
    pub fn fock(k: usize, cutoff: usize) -> Result<Self> {
        if k > cutoff {
            return Err(Error::domain(format!(
                "Fock level {k} exceeds cutoff {cutoff}"
            )));
        }
        let mut p = vec![0.0; cutoff + 1];
        p[k] = 1.0;
        Ok(Self { probabilities: p })
    }

    pub fn vacuum() -> Self {
        Self {
            probabilities: vec![1.0],
        }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, n: usize) -> f64 {
        self.probabilities.get(n).copied().unwrap_or(0.0)
    }

    /// Highest stored photon number.
    pub fn cutoff(&self) -> usize {
        self.probabilities.len() - 1
    }

    /// `⟨a†a⟩ = Σ n p_n`.
    pub fn mean_photon_number(&self) -> f64 {
        compensated_sum(
            self.probabilities
                .iter()
                .enumerate()
                .map(|(n, &p)| n as f64 * p),
        )
    }

    /// Weight outside `H_{n_max}`, i.e. `Σ_{n > n_max} p_n`.
    pub fn tail_mass(&self, n_max: usize) -> f64 {
        if self.cutoff() <= n_max {
            return 0.0;
        }
        compensated_sum(self.probabilities[n_max + 1..].iter().copied())
    }

    /// Photon numbers carrying non-zero weight.
    pub fn support(&self) -> Vec<usize> {
        self.probabilities
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(n, _)| n)
            .collect()
    }
}

/// Pure single-mode state `Σ c_n |n⟩` on levels `0..=cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureFockState {
    populations: Vec<f64>,
    phases: Vec<f64>,
}

impl PureFockState {
    /// From complex amplitudes `c_n`.
    pub fn from_amplitudes(amplitudes: &[Complex64]) -> Result<Self> {
        let populations = amplitudes.iter().map(|c| c.norm_sqr()).collect();
        let phases = amplitudes
            .iter()
            .map(|c| if c.norm_sqr() > 0.0 { c.arg() } else { 0.0 })
            .collect();
        Self::from_populations(populations, phases)
    }

    /// From populations `|c_n|²` and phases `arg c_n`.
    pub fn from_populations(populations: Vec<f64>, phases: Vec<f64>) -> Result<Self> {
        if populations.len() != phases.len() {
            return Err(Error::domain(format!(
                "{} populations but {} phases",
                populations.len(),
                phases.len()
            )));
        }
        if let Some(bad) = phases.iter().position(|p| !p.is_finite()) {
            return Err(Error::domain(format!("non-finite phase at level {bad}")));
        }
        Ok(Self {
            populations: normalize(populations)?,
            phases,
        })
    }

    /// `|k⟩` on levels `0..=cutoff`.
    pub fn fock(k: usize, cutoff: usize) -> Result<Self> {
        let dist = PhotonNumberDistribution::fock(k, cutoff)?;
        Ok(Self {
            phases: vec![0.0; cutoff + 1],
            populations: dist.probabilities,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.populations.len() - 1
    }

    pub fn amplitude(&self, n: usize) -> Complex64 {
        match self.populations.get(n) {
            Some(&p) => Complex64::from_polar(p.sqrt(), self.phases[n]),
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn amplitudes(&self) -> Vec<Complex64> {
        (0..self.populations.len()).map(|n| self.amplitude(n)).collect()
    }

    /// `|c_n|²` without building the distribution.
    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Drops all Fock-basis coherences: `p_n = |c_n|²`.
    pub fn dephase(&self) -> PhotonNumberDistribution {
        PhotonNumberDistribution {
            probabilities: self.populations.clone(),
        }
    }

    pub fn mean_photon_number(&self) -> f64 {
        compensated_sum(
            self.populations
                .iter()
                .enumerate()
                .map(|(n, &p)| n as f64 * p),
        )
    }
}
