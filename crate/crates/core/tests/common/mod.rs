//! Reference computations that avoid the library's own code paths.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use statrs::function::gamma::ln_gamma;

/// Σ_n p_n n(n-1)...(n-m+1) with a plain product and plain summation.
pub fn factorial_moment(p: &[f64], m: u32) -> f64 {
    p.iter()
        .enumerate()
        .map(|(n, &q)| {
            let mut f = 1.0;
            for j in 0..m as usize {
                f *= n as f64 - j as f64;
            }
            if n < m as usize {
                0.0
            } else {
                q * f
            }
        })
        .sum()
}

pub fn mean(p: &[f64]) -> f64 {
    p.iter().enumerate().map(|(n, q)| n as f64 * q).sum()
}

/// Squeezed-vacuum populations from the closed form
/// `|c_2k|² = tanh(r)^2k (2k)! / (4^k (k!)² cosh r)`, evaluated in log space.
pub fn squeezed_populations_closed_form(r: f64, cutoff: usize) -> Vec<f64> {
    let mut p = vec![0.0; cutoff + 1];
    if r == 0.0 {
        p[0] = 1.0;
        return p;
    }
    let ln_t = r.tanh().ln();
    let ln_cosh = r.cosh().ln();
    for k in 0..=cutoff / 2 {
        let kf = k as f64;
        let ln_p = 2.0 * kf * ln_t + ln_gamma(2.0 * kf + 1.0)
            - kf * 4f64.ln()
            - 2.0 * ln_gamma(kf + 1.0)
            - ln_cosh;
        p[2 * k] = ln_p.exp();
    }
    p
}

/// `exp(G)|0⟩` for the squeeze generator `G = (ξ* a² - ξ a†²)/2` on a
/// `dim`-level truncation, by repeated Taylor steps of `exp(G/steps)`.
pub fn squeezed_brute_force(r: f64, theta: f64, dim: usize) -> Vec<Complex64> {
    let xi = Complex64::from_polar(r, theta);
    let apply = |v: &[Complex64]| -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for n in 0..dim {
            // (a² v)_n = √((n+1)(n+2)) v_{n+2}
            if n + 2 < dim {
                out[n] += xi.conj() * 0.5 * (((n + 1) * (n + 2)) as f64).sqrt() * v[n + 2];
            }
            // (a†² v)_n = √(n(n-1)) v_{n-2}
            if n >= 2 {
                out[n] -= xi * 0.5 * ((n * (n - 1)) as f64).sqrt() * v[n - 2];
            }
        }
        out
    };
    let norm_estimate = r * dim as f64;
    let steps = (norm_estimate.ceil() as usize).max(1) * 2;
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[0] = Complex64::new(1.0, 0.0);
    for _ in 0..steps {
        let mut term = v.clone();
        let mut acc = v.clone();
        for k in 1..40 {
            term = apply(&term)
                .into_iter()
                .map(|c| c / (k as f64 * steps as f64))
                .collect();
            for (a, t) in acc.iter_mut().zip(&term) {
                *a += t;
            }
        }
        v = acc;
    }
    v
}

/// Flat-simplex sample on `len` levels.
pub fn random_simplex<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..len).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// Random distribution on `len` levels supported on a few random levels,
/// which reaches closer to the polytope's vertices than a flat sample.
pub fn random_sparse<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    let k = rng.random_range(1..=3.min(len));
    let mut w = vec![0.0; len];
    for _ in 0..k {
        w[rng.random_range(0..len)] += rng.random::<f64>() + 1e-3;
    }
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

pub fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}
