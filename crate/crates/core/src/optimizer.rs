//! Maximizing `G^(m)` over photon-number distributions in `H_{N_max}` at a
//! fixed mean photon number.
//!
//! Because `G^(m)` only sees the populations, the problem is a linear
//! program over the probability simplex with two equality constraints
//! (normalization and mean). Some optimal vertex therefore has at most two
//! non-zero entries, and enumerating all such vertices solves it exactly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use crate::coherence::{coherence_gm, unchecked_bound_gm};
use crate::fock::{falling_factorial, PhotonNumberDistribution};
use crate::zoo::TAIL_TOLERANCE;
use crate::{Error, Result};

/// Relative gap below which two objective values count as tied.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    TwoSupportExact,
    RandomSearch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub optimal_value: f64,
    pub distribution: PhotonNumberDistribution,
    pub support: Vec<usize>,
    pub method: Method,
}

impl OptimizationResult {
    pub fn weights(&self) -> Vec<f64> {
        self.support
            .iter()
            .map(|&n| self.distribution.probability(n))
            .collect()
    }
}

fn check_problem(m: u32, n_av: f64, n_max: usize) -> Result<()> {
    if m < 1 {
        return Err(Error::domain("coherence order m must be at least 1"));
    }
    if n_max < 1 || m as usize > n_max {
        return Err(Error::domain(format!(
            "need 1 <= m <= N_max (m = {m}, N_max = {n_max})"
        )));
    }
    if !n_av.is_finite() || n_av < 0.0 || n_av > n_max as f64 {
        return Err(Error::domain(format!(
            "infeasible n_av = {n_av}: must lie in [0, {n_max}]"
        )));
    }
    Ok(())
}

/// A vertex of the feasible polytope: one or two support points.
#[derive(Debug, Clone, Copy)]
struct Vertex {
    low: usize,
    high: usize,
    high_weight: f64,
    value: f64,
}

impl Vertex {
    fn is_coin(&self, n_max: usize) -> bool {
        self.low == 0 && self.high == n_max
    }

    /// Whether `self` should replace `best`: strictly larger objective, or a
    /// tie resolved toward `(0, N_max)` and then the lexicographically
    /// smallest pair.
    fn beats(&self, best: &Vertex, n_max: usize) -> bool {
        let scale = self.value.abs().max(best.value.abs());
        let gap = self.value - best.value;
        if gap > TIE_TOLERANCE * scale {
            return true;
        }
        if gap < -TIE_TOLERANCE * scale {
            return false;
        }
        match (self.is_coin(n_max), best.is_coin(n_max)) {
            (true, false) => true,
            (false, true) => false,
            _ => (self.low, self.high) < (best.low, best.high),
        }
    }
}

/// Exact maximum of `Σ p_n n!/(n-m)!` subject to `Σ p_n = 1`,
/// `Σ n p_n = n_av`, `p_n ≥ 0`, `n ≤ N_max`.
///
/// The mean is an equality constraint. The optimum grows with `n_av`, so
/// `Σ n p_n ≤ n_av` would give the same value.
pub fn optimize_gm_exact(m: u32, n_av: f64, n_max: usize) -> Result<OptimizationResult> {
    check_problem(m, n_av, n_max)?;
    let ff: Vec<f64> = (0..=n_max)
        .map(|n| falling_factorial(n as u64, m as u64))
        .collect();

    let mut best: Option<Vertex> = None;
    let mut consider = |v: Vertex| {
        if best.as_ref().is_none_or(|b| v.beats(b, n_max)) {
            best = Some(v);
        }
    };

    // single-point supports exist only for integer n_av
    if n_av.fract() == 0.0 {
        let k = n_av as usize;
        consider(Vertex {
            low: k,
            high: k,
            high_weight: 1.0,
            value: ff[k],
        });
    }
    // two-point supports i < n_av < j, both weights strictly positive
    let lowest_high = n_av.floor() as usize + 1;
    for i in (0..=n_max).take_while(|&i| (i as f64) < n_av) {
        for j in lowest_high..=n_max {
            let high_weight = (n_av - i as f64) / (j - i) as f64;
            let low_weight = 1.0 - high_weight;
            if !(high_weight > 0.0 && low_weight > 0.0) {
                continue;
            }
            consider(Vertex {
                low: i,
                high: j,
                high_weight,
                value: low_weight * ff[i] + high_weight * ff[j],
            });
        }
    }

    let v = best.expect("feasible problem has at least one vertex");
    let mut probabilities = vec![0.0; n_max + 1];
    let support = if v.low == v.high {
        probabilities[v.low] = 1.0;
        vec![v.low]
    } else {
        probabilities[v.high] = v.high_weight;
        probabilities[v.low] = 1.0 - v.high_weight;
        vec![v.low, v.high]
    };
    Ok(OptimizationResult {
        optimal_value: v.value,
        distribution: PhotonNumberDistribution::new(probabilities)?,
        support,
        method: Method::TwoSupportExact,
    })
}

/// Best `G^(m)` over `trials` random feasible distributions.
///
/// Each trial draws a point from the flat simplex on `0..=N_max` (normalized
/// exponential spacings), then mixes it with `δ_0` or `δ_{N_max}` so the mean
/// lands on `n_av`. The sampler is cheap and feasible but not uniform over
/// the feasible polytope. Deterministic for a given seed.
pub fn random_search_lower_bound(
    m: u32,
    n_av: f64,
    n_max: usize,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    check_problem(m, n_av, n_max)?;
    if trials < 1 {
        return Err(Error::domain("random search needs at least one trial"));
    }
    let ff: Vec<f64> = (0..=n_max)
        .map(|n| falling_factorial(n as u64, m as u64))
        .collect();
    let top = n_max as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::NEG_INFINITY;
    let mut weights = vec![0.0; n_max + 1];

    for _ in 0..trials {
        let mut total = 0.0;
        for w in weights.iter_mut() {
            *w = Exp1.sample(&mut rng);
            total += *w;
        }
        let (mut mean, mut objective) = (0.0, 0.0);
        for (n, w) in weights.iter().enumerate() {
            let p = w / total;
            mean += n as f64 * p;
            objective += p * ff[n];
        }
        // G is linear in p, so mixing acts on the objective directly
        let value = if mean > n_av {
            let keep = n_av / mean;
            keep * objective
        } else if mean < n_av {
            let keep = (top - n_av) / (top - mean);
            keep * objective + (1.0 - keep) * ff[n_max]
        } else {
            objective
        };
        best = best.max(value);
    }
    Ok(best)
}

/// Outcome of checking a state against the `H_{N_max}` bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub order: u32,
    pub gm: f64,
    pub n_av: f64,
    pub bound: f64,
    /// `bound - gm`; negative means the state exceeds the bound.
    pub slack: f64,
    pub tail_mass: f64,
    pub in_space: bool,
    /// Only states inside `H_{N_max}` can violate the bound.
    pub violation: bool,
}

/// Compares `G^(m)` of `dist` with the bound at the state's own mean photon
/// number. States with weight above `N_max` are flagged out of space rather
/// than reported as violations.
pub fn verify_state_bound(
    dist: &PhotonNumberDistribution,
    m: u32,
    n_max: usize,
) -> Result<BoundReport> {
    if m < 2 || n_max < 2 || m as usize > n_max {
        return Err(Error::domain(format!(
            "bound check needs 2 <= m <= N_max (m = {m}, N_max = {n_max})"
        )));
    }
    let gm = coherence_gm(dist, m)?;
    let bound = unchecked_bound_gm(m, gm.n_av, n_max as u64);
    let slack = bound - gm.value;
    let tail_mass = dist.tail_mass(n_max);
    let in_space = tail_mass < TAIL_TOLERANCE;
    Ok(BoundReport {
        order: m,
        gm: gm.value,
        n_av: gm.n_av,
        bound,
        slack,
        tail_mass,
        in_space,
        violation: in_space && slack < -TIE_TOLERANCE * bound,
    })
}
