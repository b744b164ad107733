//! Constructors for the single-mode states compared throughout the crate,
//! plus a declarative [`StateSpec`] used by the CLI.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::fock::{compensated_sum, PhotonNumberDistribution, PureFockState};
use crate::{Error, Result};

/// Largest weight a constructor may discard when truncating at its cutoff.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Hard ceiling for automatic cutoff doubling.
const MAX_AUTO_CUTOFF: usize = 1 << 24;

/// A truncated state together with the weight that truncation removed
/// (before renormalization).
#[derive(Debug, Clone, PartialEq)]
pub struct Truncated<T> {
    pub state: T,
    pub discarded_tail: f64,
}

fn check_photon_number(name: &str, value: f64) -> Result<()> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::domain(format!(
            "{name} must be finite and non-negative, got {value}"
        )));
    }
    Ok(())
}

fn check_tail(cutoff: usize, tail: f64) -> Result<()> {
    if tail >= TAIL_TOLERANCE {
        return Err(Error::CutoffTooSmall {
            cutoff,
            tail,
            tolerance: TAIL_TOLERANCE,
        });
    }
    Ok(())
}

/// Poisson weights for levels `0..=cutoff` and the exact weight beyond.
///
/// Evaluated outward from the mode so that means of several hundred
/// photons do not underflow at `n = 0`.
fn poisson_weights(mean: f64, cutoff: usize) -> (Vec<f64>, f64) {
    let mut weights = vec![0.0; cutoff + 1];
    if mean == 0.0 {
        weights[0] = 1.0;
        return (weights, 0.0);
    }
    let reach = (mean + 40.0 * (mean + 1.0).sqrt() + 60.0).ceil() as usize;
    let len = cutoff.max(reach) + 1;
    let mut full = vec![0.0; len];
    let mode = (mean.floor() as usize).min(len - 1);
    let k = mode as f64;
    full[mode] = (-mean + k * mean.ln() - ln_gamma(k + 1.0)).exp();
    for n in (1..=mode).rev() {
        full[n - 1] = full[n] * n as f64 / mean;
    }
    for n in mode..len - 1 {
        full[n + 1] = full[n] * mean / (n + 1) as f64;
    }
    let tail = compensated_sum(full[cutoff + 1..].iter().copied());
    weights.copy_from_slice(&full[..=cutoff]);
    (weights, tail)
}

/// Coherent state `|α⟩` with `|α|² = n_av` and real non-negative amplitudes.
pub fn coherent_state(n_av: f64, cutoff: usize) -> Result<PureFockState> {
    coherent_state_truncated(n_av, cutoff).map(|t| t.state)
}

pub fn coherent_state_truncated(n_av: f64, cutoff: usize) -> Result<Truncated<PureFockState>> {
    check_photon_number("n_av", n_av)?;
    let (weights, tail) = poisson_weights(n_av, cutoff);
    check_tail(cutoff, tail)?;
    let phases = vec![0.0; weights.len()];
    Ok(Truncated {
        state: PureFockState::from_populations(weights, phases)?,
        discarded_tail: tail,
    })
}

/// Thermal (geometric) photon statistics `p_n = n̄^n / (1 + n̄)^(n+1)`.
pub fn thermal_state(n_av: f64, cutoff: usize) -> Result<PhotonNumberDistribution> {
    thermal_state_truncated(n_av, cutoff).map(|t| t.state)
}

pub fn thermal_state_truncated(
    n_av: f64,
    cutoff: usize,
) -> Result<Truncated<PhotonNumberDistribution>> {
    check_photon_number("n_av", n_av)?;
    let ground = 1.0 / (1.0 + n_av);
    let ratio = n_av / (1.0 + n_av);
    let weights: Vec<f64> = (0..=cutoff)
        .map(|n| ground * ratio.powi(n as i32))
        .collect();
    let tail = ratio.powf(cutoff as f64 + 1.0);
    check_tail(cutoff, tail)?;
    Ok(Truncated {
        state: PhotonNumberDistribution::new(weights)?,
        discarded_tail: tail,
    })
}

/// Squeezed vacuum with squeezing parameter `ξ = r e^{iθ}`.
///
/// Only even levels are populated:
/// `c_{2k+2} = -e^{iθ} tanh(r) √((2k+1)/(2k+2)) c_{2k}`, `c_0 = 1/√cosh r`.
/// The recurrence avoids the `(2k)!` overflow of the closed form.
pub fn squeezed_vacuum(xi_magnitude: f64, xi_phase: f64, cutoff: usize) -> Result<PureFockState> {
    squeezed_vacuum_truncated(xi_magnitude, xi_phase, cutoff).map(|t| t.state)
}

pub fn squeezed_vacuum_truncated(
    xi_magnitude: f64,
    xi_phase: f64,
    cutoff: usize,
) -> Result<Truncated<PureFockState>> {
    check_photon_number("xi", xi_magnitude)?;
    if !xi_phase.is_finite() {
        return Err(Error::domain("squeezing phase must be finite"));
    }
    let t2 = xi_magnitude.tanh().powi(2);
    let step_phase = (xi_phase + PI).rem_euclid(TAU);
    let mut populations = vec![0.0; cutoff + 1];
    let mut phases = vec![0.0; cutoff + 1];
    populations[0] = 1.0 / xi_magnitude.cosh();
    let next = |pop: f64, n: usize| {
        let k = (n / 2) as f64;
        pop * t2 * (2.0 * k + 1.0) / (2.0 * k + 2.0)
    };
    let mut n = 0;
    while n + 2 <= cutoff {
        populations[n + 2] = next(populations[n], n);
        phases[n + 2] = ((n / 2 + 1) as f64 * step_phase).rem_euclid(TAU);
        n += 2;
    }
    let tail = squeezed_tail(populations[n], n, t2, next);
    check_tail(cutoff, tail)?;
    Ok(Truncated {
        state: PureFockState::from_populations(populations, phases)?,
        discarded_tail: tail,
    })
}

/// Σ of the even populations above level `n`, continuing the recurrence.
/// Terms shrink by less than `t2` per step, so the remainder after the
/// last summed term is bounded by a geometric series.
fn squeezed_tail(mut pop: f64, mut n: usize, t2: f64, next: impl Fn(f64, usize) -> f64) -> f64 {
    const MAX_STEPS: usize = 10_000_000;
    let mut tail = crate::fock::CompensatedSum::new();
    for _ in 0..MAX_STEPS {
        pop = next(pop, n);
        n += 2;
        if pop == 0.0 {
            return tail.value();
        }
        tail.add(pop);
        let remainder = pop * t2 / (1.0 - t2);
        if remainder <= 1e-18 * tail.value() || remainder < 1e-300 {
            return tail.value() + remainder;
        }
    }
    tail.value() + pop * t2 / (1.0 - t2)
}

fn coin_weights(n_av: f64, n_max: usize) -> Result<Vec<f64>> {
    check_photon_number("n_av", n_av)?;
    if n_max < 1 {
        return Err(Error::domain("N_max must be at least 1"));
    }
    let top = n_max as f64;
    if n_av > top {
        return Err(Error::domain(format!(
            "n_av = {n_av} exceeds N_max = {n_max}"
        )));
    }
    let mut weights = vec![0.0; n_max + 1];
    weights[0] = (top - n_av) / top;
    weights[n_max] = n_av / top;
    Ok(weights)
}

/// Coin state `(√(N_max - n_av)|0⟩ + e^{iφ}√n_av |N_max⟩)/√N_max`.
pub fn coin_state(n_av: f64, n_max: usize, phase: f64) -> Result<PureFockState> {
    if !phase.is_finite() {
        return Err(Error::domain("coin phase must be finite"));
    }
    let weights = coin_weights(n_av, n_max)?;
    let mut phases = vec![0.0; n_max + 1];
    phases[n_max] = phase.rem_euclid(TAU);
    PureFockState::from_populations(weights, phases)
}

/// Dephased coin state: weight `1 - n_av/N_max` on vacuum, `n_av/N_max` on `|N_max⟩`.
pub fn coin_mixture(n_av: f64, n_max: usize) -> Result<PhotonNumberDistribution> {
    PhotonNumberDistribution::new(coin_weights(n_av, n_max)?)
}

/// Vacuum mixed with a coherent state of mean `N_max`, weights as in the
/// coin mixture. The coherent component is not confined to `H_{N_max}`.
pub fn coin_coherent_mixture(
    n_av: f64,
    n_max: usize,
    cutoff: usize,
) -> Result<PhotonNumberDistribution> {
    coin_coherent_mixture_truncated(n_av, n_max, cutoff).map(|t| t.state)
}

pub fn coin_coherent_mixture_truncated(
    n_av: f64,
    n_max: usize,
    cutoff: usize,
) -> Result<Truncated<PhotonNumberDistribution>> {
    let coin = coin_weights(n_av, n_max)?;
    let vacuum_weight = coin[0];
    let coherent_weight = coin[n_max];
    let (poisson, tail) = poisson_weights(n_max as f64, cutoff);
    check_tail(cutoff, tail)?;
    let mut weights: Vec<f64> = poisson.iter().map(|p| coherent_weight * p).collect();
    weights[0] += vacuum_weight;
    Ok(Truncated {
        state: PhotonNumberDistribution::new(weights)?,
        discarded_tail: coherent_weight * tail,
    })
}

/// Fock state `|n⟩` stored on levels `0..=cutoff`.
pub fn fock_state(n: usize, cutoff: usize) -> Result<PureFockState> {
    PureFockState::fock(n, cutoff)
}

/// Cutoff `ceil(n̄ + 20√(n̄+1))·2^k`, doubled until the constructor accepts
/// it and then once more.
///
/// A discarded weight `ε` at cutoff `N` shifts `G^(m)` by roughly `N^m ε`,
/// so passing the bare weight check is not enough for the higher moments;
/// the extra doubling pushes geometric and faster tails far below it.
fn with_auto_cutoff<T>(
    mean: f64,
    mut build: impl FnMut(usize) -> Result<Truncated<T>>,
) -> Result<(Truncated<T>, usize)> {
    let mut cutoff = (mean + 20.0 * (mean + 1.0).sqrt()).ceil().max(1.0) as usize;
    loop {
        match build(cutoff) {
            Err(Error::CutoffTooSmall { .. }) if cutoff < MAX_AUTO_CUTOFF => cutoff *= 2,
            Err(e) => return Err(e),
            Ok(_) => return build(2 * cutoff).map(|t| (t, 2 * cutoff)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Coherent,
    Thermal,
    SqueezedVacuum,
    Fock,
    Coin,
    CoinMixture,
    CoinCoherentMixture,
}

impl StateKind {
    pub const ALL: [StateKind; 7] = [
        StateKind::Coherent,
        StateKind::Thermal,
        StateKind::SqueezedVacuum,
        StateKind::Fock,
        StateKind::Coin,
        StateKind::CoinMixture,
        StateKind::CoinCoherentMixture,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StateKind::Coherent => "coherent",
            StateKind::Thermal => "thermal",
            StateKind::SqueezedVacuum => "squeezed_vacuum",
            StateKind::Fock => "fock",
            StateKind::Coin => "coin",
            StateKind::CoinMixture => "coin_mixture",
            StateKind::CoinCoherentMixture => "coin_coherent_mixture",
        }
    }

    fn required(self) -> &'static [&'static str] {
        match self {
            StateKind::Coherent | StateKind::Thermal => &["n_av"],
            // one of xi / n_av, checked separately
            StateKind::SqueezedVacuum => &[],
            StateKind::Fock => &["n"],
            StateKind::Coin | StateKind::CoinMixture | StateKind::CoinCoherentMixture => {
                &["n_av", "n_max"]
            }
        }
    }

    fn optional(self) -> &'static [&'static str] {
        match self {
            StateKind::SqueezedVacuum => &["xi", "n_av", "phase"],
            StateKind::Coin => &["phase"],
            _ => &[],
        }
    }

    fn accepts(self, key: &str) -> bool {
        self.required().contains(&key) || self.optional().contains(&key)
    }

    fn uses_n_max(self) -> bool {
        self.required().contains(&"n_max")
    }
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StateKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownKind(s.to_owned()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawStateSpec {
    kind: String,
    #[serde(default)]
    params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    label: String,
}

/// Declarative description of a zoo state, e.g.
/// `{"kind": "coin", "params": {"n_av": 10, "n_max": 500}, "label": "coin"}`.
///
/// Parameter names: `n_av`, `xi`, `phase`, `n`, `n_max` (`N_max` is
/// accepted as an alias).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStateSpec", into = "RawStateSpec")]
pub struct StateSpec {
    pub kind: StateKind,
    pub params: BTreeMap<String, f64>,
    pub label: String,
}

impl TryFrom<RawStateSpec> for StateSpec {
    type Error = Error;

    fn try_from(raw: RawStateSpec) -> Result<Self> {
        let kind: StateKind = raw.kind.parse()?;
        let mut params = BTreeMap::new();
        for (key, value) in raw.params {
            let key = if key == "N_max" { "n_max".to_owned() } else { key };
            if !kind.accepts(&key) {
                return Err(Error::InvalidSpec(format!(
                    "parameter `{key}` is not used by kind `{kind}`"
                )));
            }
            if params.insert(key.clone(), value).is_some() {
                return Err(Error::InvalidSpec(format!("duplicate parameter `{key}`")));
            }
        }
        Ok(StateSpec {
            kind,
            params,
            label: raw.label,
        })
    }
}

impl From<StateSpec> for RawStateSpec {
    fn from(spec: StateSpec) -> Self {
        RawStateSpec {
            kind: spec.kind.name().to_owned(),
            params: spec.params,
            label: spec.label,
        }
    }
}

impl StateSpec {
    pub fn new(kind: StateKind) -> Self {
        StateSpec {
            kind,
            params: BTreeMap::new(),
            label: String::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_owned(), value);
        self
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Display label, falling back to the kind name.
    pub fn label(&self) -> &str {
        if self.label.is_empty() {
            self.kind.name()
        } else {
            &self.label
        }
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    /// Fills in `n_av` (when given and the kind takes it but the spec leaves
    /// it open) and `n_max` (for the coin kinds).
    pub fn resolved(&self, n_av: Option<f64>, n_max: usize) -> StateSpec {
        let mut out = self.clone();
        if let Some(n_av) = n_av {
            let open = match self.kind {
                StateKind::SqueezedVacuum => {
                    !self.params.contains_key("xi") && !self.params.contains_key("n_av")
                }
                k => k.accepts("n_av") && !self.params.contains_key("n_av"),
            };
            if open {
                out.params.insert("n_av".to_owned(), n_av);
            }
        }
        if self.kind.uses_n_max() && !self.params.contains_key("n_max") {
            out.params.insert("n_max".to_owned(), n_max as f64);
        }
        out
    }

    /// Checks that exactly the parameters required by the kind are present
    /// and within range.
    pub fn validate(&self) -> Result<()> {
        let kind = self.kind;
        for key in self.params.keys() {
            if !kind.accepts(key) {
                return Err(Error::InvalidSpec(format!(
                    "parameter `{key}` is not used by kind `{kind}`"
                )));
            }
        }
        for key in kind.required() {
            if !self.params.contains_key(*key) {
                return Err(Error::InvalidSpec(format!(
                    "kind `{kind}` requires parameter `{key}`"
                )));
            }
        }
        if kind == StateKind::SqueezedVacuum {
            let xi = self.params.contains_key("xi");
            let n_av = self.params.contains_key("n_av");
            if xi == n_av {
                return Err(Error::InvalidSpec(
                    "squeezed_vacuum takes exactly one of `xi` or `n_av`".to_owned(),
                ));
            }
        }
        for (key, &value) in &self.params {
            if !value.is_finite() {
                return Err(Error::InvalidSpec(format!("`{key}` must be finite")));
            }
            match key.as_str() {
                "phase" => {}
                "n" | "n_max" => {
                    if value < 0.0 || value.fract() != 0.0 {
                        return Err(Error::InvalidSpec(format!(
                            "`{key}` must be a non-negative integer, got {value}"
                        )));
                    }
                    if key == "n_max" && value < 1.0 {
                        return Err(Error::InvalidSpec("`n_max` must be at least 1".to_owned()));
                    }
                }
                _ => {
                    if value < 0.0 {
                        return Err(Error::InvalidSpec(format!(
                            "`{key}` must be non-negative, got {value}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn integer(&self, key: &str) -> usize {
        self.param(key).unwrap_or(0.0) as usize
    }
}

/// A constructed distribution and what truncation did to it.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltState {
    pub label: String,
    pub distribution: PhotonNumberDistribution,
    /// Weight dropped at the storage cutoff before renormalization.
    pub discarded_tail: f64,
    /// Weight above the reference `N_max`.
    pub tail_beyond_n_max: f64,
    pub n_max: usize,
}

impl BuiltState {
    /// Whether the state lies in `H_{N_max}` up to `tolerance`.
    pub fn in_space(&self, tolerance: f64) -> bool {
        self.tail_beyond_n_max < tolerance
    }

    pub fn is_in_space(&self) -> bool {
        self.in_space(TAIL_TOLERANCE)
    }
}

/// Builds the photon-number distribution described by `spec`, choosing the
/// storage cutoff automatically. `n_max` is the reference truncation used
/// for the in-space check and as the default for coin kinds.
pub fn build_state(spec: &StateSpec, n_max: usize) -> Result<BuiltState> {
    let spec = spec.resolved(None, n_max);
    spec.validate()?;
    let (distribution, discarded_tail) = match spec.kind {
        StateKind::Coherent => {
            let n_av = spec.param("n_av").unwrap();
            let (t, _) = with_auto_cutoff(n_av, |c| coherent_state_truncated(n_av, c))?;
            (t.state.dephase(), t.discarded_tail)
        }
        StateKind::Thermal => {
            let n_av = spec.param("n_av").unwrap();
            let (t, _) = with_auto_cutoff(n_av, |c| thermal_state_truncated(n_av, c))?;
            (t.state, t.discarded_tail)
        }
        StateKind::SqueezedVacuum => {
            let r = match spec.param("xi") {
                Some(xi) => xi,
                None => spec.param("n_av").unwrap().sqrt().asinh(),
            };
            let phase = spec.param("phase").unwrap_or(0.0);
            let mean = r.sinh().powi(2);
            let (t, _) = with_auto_cutoff(mean, |c| squeezed_vacuum_truncated(r, phase, c))?;
            (t.state.dephase(), t.discarded_tail)
        }
        StateKind::Fock => {
            let n = spec.integer("n");
            (fock_state(n, n)?.dephase(), 0.0)
        }
        StateKind::Coin => {
            let phase = spec.param("phase").unwrap_or(0.0);
            let state = coin_state(spec.param("n_av").unwrap(), spec.integer("n_max"), phase)?;
            (state.dephase(), 0.0)
        }
        StateKind::CoinMixture => (
            coin_mixture(spec.param("n_av").unwrap(), spec.integer("n_max"))?,
            0.0,
        ),
        StateKind::CoinCoherentMixture => {
            let n_av = spec.param("n_av").unwrap();
            let top = spec.integer("n_max");
            let (t, _) = with_auto_cutoff(top as f64, |c| {
                coin_coherent_mixture_truncated(n_av, top, c)
            })?;
            (t.state, t.discarded_tail)
        }
    };
    let tail_beyond_n_max = distribution.tail_mass(n_max);
    Ok(BuiltState {
        label: spec.label().to_owned(),
        distribution,
        discarded_tail,
        tail_beyond_n_max,
        n_max,
    })
}
