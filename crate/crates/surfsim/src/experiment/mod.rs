//! The Monte-Carlo engine: windowed execution with deferred-flip carryover,
//! logical failure counting, and reproducible parallel trial scheduling.
//!
//! A trial prepares a fresh quiescent state and runs decode windows until
//! the watched logical operator flips (a failure) or the per-trial cap is
//! reached. Trials are independent, seeded by (master seed, trial index),
//! and scheduled in fixed-size batches whose results fold in index order,
//! so the aggregate is bit-identical for any worker count. The logical
//! error rate per window is P_r = m / R over all windows run.

pub mod breakeven;
pub mod report;
pub mod threshold;

use crate::decoder::{CorrectionSet, DecodeError, Decoder};
use crate::layout::{build_layout, Layout, LayoutKind};
use crate::noise::{NoiseError, NoiseModel, ResolvedNoise, ResolvedPauli};
use crate::schedule::{build_round_circuit, ScheduledCircuit};
use crate::sim::{
    self, frame::FrameState, vector, vector::SvNoise, EncodedState,
    ErrorSource, RoundOutcome, SimError,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("no threshold bracket found in the searched grid")]
    NoBracket,
    #[error("window relation has no root in [0, 1/2] for P_r = {0}")]
    NoRoot(f64),
}

/// Which simulation backend executes the rounds.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    Frame,
    StateVector,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Frame => "frame",
            Backend::StateVector => "state-vector",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "frame" => Some(Backend::Frame),
            "state-vector" | "sv" | "statevector" => Some(Backend::StateVector),
            _ => None,
        }
    }
}

/// Full configuration of one Monte-Carlo estimate.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub layout: LayoutKind,
    pub backend: Backend,
    pub model: NoiseModel,
    pub encoded: EncodedState,
    /// Window size in rounds (decode depth); 3 unless re-checking the
    /// window-size claim.
    #[serde(default = "default_window")]
    pub window: usize,
    /// Stop after this many logical failures.
    pub m_target: u64,
    /// Hard budget on total windows across all trials.
    #[serde(default = "default_max_windows")]
    pub max_windows: u64,
    /// Windows per trial before the trial is abandoned as failure-free.
    #[serde(default = "default_trial_cap")]
    pub trial_cap: u64,
    pub seed: u64,
    /// Worker threads; 0 uses the global default. Results do not depend on
    /// this value.
    #[serde(default)]
    pub workers: usize,
}

fn default_window() -> usize {
    3
}
fn default_max_windows() -> u64 {
    1_000_000_000
}
fn default_trial_cap() -> u64 {
    4096
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.m_target < 1 {
            return Err(ExperimentError::BadConfig("m_target must be >= 1".into()));
        }
        if !(2..=5).contains(&self.window) {
            return Err(ExperimentError::BadConfig(
                "window must be between 2 and 5 rounds".into(),
            ));
        }
        if self.backend == Backend::Frame && !self.model.is_pauli() {
            return Err(ExperimentError::BadConfig(
                "frame backend cannot execute Kraus damping; use the state-vector backend".into(),
            ));
        }
        if self.trial_cap == 0 || self.max_windows == 0 {
            return Err(ExperimentError::BadConfig(
                "trial_cap and max_windows must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Species label derived from the encoded state.
    pub fn species(&self) -> char {
        self.encoded.species()
    }
}

/// Outcome of a Monte-Carlo estimate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunResult {
    pub m: u64,
    pub windows: u64,
    /// m / windows.
    pub p_r: f64,
    /// Binomial standard error sqrt(p (1-p) / windows).
    pub stderr: f64,
    /// True when the window budget ran out before m_target failures; the
    /// conservative upper bound (m+1)/windows is then the quotable rate.
    pub censored: bool,
    pub p_r_upper: f64,
    pub seed: u64,
    pub wall_ms: u64,
}

impl RunResult {
    /// The rate to use in comparisons: the estimate itself, or its upper
    /// bound for censored runs.
    pub fn quotable_rate(&self) -> f64 {
        if self.censored {
            self.p_r_upper
        } else {
            self.p_r
        }
    }
}

/// Fixed scheduling quantum: trials per batch. Stop conditions are
/// evaluated only at batch boundaries, which is what makes the aggregate
/// independent of worker count.
const TRIAL_BATCH: u64 = 64;

/// Run windows until `m_target` logical failures (or the window budget).
pub fn run_until_m_failures(config: &ExperimentConfig) -> Result<RunResult, ExperimentError> {
    config.validate()?;
    let start = Instant::now();
    let layout = build_layout(config.layout);
    let circuit = build_round_circuit(&layout);
    let decoder = Decoder::with_window(&layout, config.window);
    let resolved = config.model.resolve()?;

    let run_batch = |first_trial: u64| -> Result<Vec<(u64, bool)>, ExperimentError> {
        (first_trial..first_trial + TRIAL_BATCH)
            .into_par_iter()
            .map(|trial| run_trial(config, &layout, &circuit, &decoder, &resolved, trial))
            .collect()
    };

    let execute = || -> Result<(u64, u64), ExperimentError> {
        let mut m = 0u64;
        let mut windows = 0u64;
        let mut next_trial = 0u64;
        while m < config.m_target && windows < config.max_windows {
            let batch = run_batch(next_trial)?;
            next_trial += TRIAL_BATCH;
            for (w, failed) in batch {
                windows += w;
                if failed {
                    m += 1;
                }
            }
        }
        Ok((m, windows))
    };
    let (m, windows) = if config.workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| ExperimentError::BadConfig(format!("worker pool: {e}")))?;
        pool.install(&execute)?
    } else {
        execute()?
    };

    let p_r = m as f64 / windows as f64;
    Ok(RunResult {
        m,
        windows,
        p_r,
        stderr: (p_r * (1.0 - p_r) / windows as f64).sqrt(),
        censored: m < config.m_target,
        p_r_upper: (m + 1) as f64 / windows as f64,
        seed: config.seed,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

/// One trial: quiescent preparation, then windows until the first logical
/// failure. Returns (windows run, failed).
fn run_trial(
    config: &ExperimentConfig,
    layout: &Layout,
    circuit: &ScheduledCircuit,
    decoder: &Decoder,
    resolved: &ResolvedNoise,
    trial: u64,
) -> Result<(u64, bool), ExperimentError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(trial);
    match (config.backend, resolved) {
        (Backend::Frame, ResolvedNoise::Pauli(channels)) => {
            frame_trial(config, layout, circuit, decoder, channels, &mut rng)
        }
        (Backend::Frame, ResolvedNoise::Damping(_)) => Err(SimError::BackendMismatch.into()),
        (Backend::StateVector, _) => {
            sv_trial(config, layout, circuit, decoder, resolved, &mut rng)
        }
    }
}

/// Shared window bookkeeping: accumulates per-species flip layers, decodes,
/// and hands corrections back to the backend closure.
struct WindowTracker<'a> {
    decoder: &'a Decoder,
    window: usize,
    /// Per-slot layer masks for the current window.
    layers: [Vec<u32>; 2],
    /// Deferred flips carried into the next window, per slot.
    carried: [u32; 2],
    first_window: bool,
}

impl<'a> WindowTracker<'a> {
    fn new(decoder: &'a Decoder, window: usize) -> Self {
        Self {
            decoder,
            window,
            layers: [vec![0; window], vec![0; window]],
            carried: [0, 0],
            first_window: true,
        }
    }

    /// Rounds of fresh noise needed for the next window.
    fn rounds_needed(&self) -> usize {
        if self.first_window {
            self.window
        } else {
            self.window - 1
        }
    }

    /// Record the flips of one round into the window; `layer` is the layer
    /// index this round fills.
    fn record_round(&mut self, layer: usize, prev: &RoundOutcome, cur: &RoundOutcome) {
        for (stab, (&p, &c)) in prev.bits.iter().zip(&cur.bits).enumerate() {
            if p != c {
                let (slot, local) = self.decoder.slot_of_stab(stab);
                self.layers[slot][layer] |= 1 << local;
            }
        }
    }

    /// Decode the assembled window; returns corrections and retains the
    /// deferred flips for the next window.
    fn decode(&mut self) -> CorrectionSet {
        let mut corrections = CorrectionSet::default();
        for slot in 0..2 {
            if !self.first_window {
                self.layers[slot][0] = self.carried[slot];
            }
            let (corr, deferred) = self.decoder.decode_species(slot, &self.layers[slot]);
            match self.decoder.slot_species(slot) {
                crate::layout::StabKind::X => corrections.x_mask ^= corr,
                crate::layout::StabKind::Z => corrections.z_mask ^= corr,
            }
            self.carried[slot] = deferred;
            for layer in self.layers[slot].iter_mut() {
                *layer = 0;
            }
        }
        self.first_window = false;
        corrections
    }

    /// Layer index offset for fresh rounds: the first window fills from
    /// layer 0, later windows from layer 1 (layer 0 is the carried overlap).
    fn first_fresh_layer(&self) -> usize {
        if self.first_window {
            0
        } else {
            1
        }
    }
}

fn frame_trial(
    config: &ExperimentConfig,
    layout: &Layout,
    circuit: &ScheduledCircuit,
    decoder: &Decoder,
    channels: &ResolvedPauli,
    rng: &mut ChaCha8Rng,
) -> Result<(u64, bool), ExperimentError> {
    let mut state = FrameState::prepare_quiescent(layout);
    let dual = config.encoded.dual_logical(layout);
    let mut prev = state.quiescent_reference();
    let mut tracker = WindowTracker::new(decoder, config.window);

    for window in 0..config.trial_cap {
        let base = tracker.first_fresh_layer();
        for k in 0..tracker.rounds_needed() {
            let mut source = ErrorSource::Stochastic {
                channels,
                record: None,
            };
            let cur = sim::frame::run_round(&mut state, circuit, &mut source, rng);
            tracker.record_round(base + k, &prev, &cur);
            prev = cur;
        }
        let corrections = tracker.decode();
        state.apply_mask(corrections.x_mask, corrections.z_mask);
        if state.anticommutes_with(&dual) {
            return Ok((window + 1, true));
        }
    }
    Ok((config.trial_cap, false))
}

fn sv_trial(
    config: &ExperimentConfig,
    layout: &Layout,
    circuit: &ScheduledCircuit,
    decoder: &Decoder,
    resolved: &ResolvedNoise,
    rng: &mut ChaCha8Rng,
) -> Result<(u64, bool), ExperimentError> {
    let (mut state, reference, sign) =
        vector::prepare_quiescent(layout, circuit, config.encoded, rng)?;
    let needs_projection = !config.model.is_pauli();
    let mut prev = reference;
    let mut tracker = WindowTracker::new(decoder, config.window);

    for window in 0..config.trial_cap {
        let base = tracker.first_fresh_layer();
        for k in 0..tracker.rounds_needed() {
            let mut noise = match resolved {
                ResolvedNoise::Pauli(channels) => SvNoise::Pauli(ErrorSource::Stochastic {
                    channels,
                    record: None,
                }),
                ResolvedNoise::Damping(d) => SvNoise::Damping(d),
            };
            let cur = vector::run_round(&mut state, circuit, &mut noise, rng)?;
            tracker.record_round(base + k, &prev, &cur);
            prev = cur;
        }
        let corrections = tracker.decode();
        state.apply_pauli_mask(corrections.x_mask, corrections.z_mask);
        let flipped = vector::logical_flip(
            &state,
            circuit,
            layout,
            config.encoded,
            sign,
            needs_projection,
            rng,
        )?;
        if flipped {
            return Ok((window + 1, true));
        }
    }
    Ok((config.trial_cap, false))
}

/// Logical error probability of an unencoded qubit held in memory for
/// `t_ns`: amplitude basis is a |1> state decaying with T1; phase basis is
/// a |+> state dephasing with T2.
pub fn unencoded_error_probability(t_ns: f64, t1_ns: f64, t2_ns: f64, basis: UnencodedBasis) -> f64 {
    match basis {
        UnencodedBasis::Amplitude => 1.0 - (-t_ns / t1_ns).exp(),
        UnencodedBasis::Phase => (1.0 - (-t_ns / t2_ns).exp()) / 2.0,
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnencodedBasis {
    Amplitude,
    Phase,
}

/// The window relation between per-round and per-window logical rates.
/// `corrected` uses the leading term r p (1-p)^{r-1}, which for r = 3 is
/// exactly the odd-flip-parity expansion; the `as_printed` variant keeps
/// the published leading term r p^r for comparison.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum WindowRelation {
    Corrected,
    AsPrinted,
}

pub fn window_rate_from_round_rate(p1: f64, r: usize, form: WindowRelation) -> f64 {
    let rf = r as f64;
    let lead = match form {
        WindowRelation::Corrected => rf * p1 * (1.0 - p1).powi(r as i32 - 1),
        WindowRelation::AsPrinted => rf * p1.powi(r as i32),
    };
    lead + (rf - 2.0) * p1.powi(3) * (1.0 - p1).powi(r as i32 - 3)
}

/// Invert the window relation by bisection on [0, 1/2].
pub fn round_rate_from_window_rate(
    p_r: f64,
    r: usize,
    form: WindowRelation,
) -> Result<f64, ExperimentError> {
    if !(0.0..=1.0).contains(&p_r) {
        return Err(ExperimentError::NoRoot(p_r));
    }
    if p_r == 0.0 {
        return Ok(0.0);
    }
    let f = |p: f64| window_rate_from_round_rate(p, r, form) - p_r;
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    if f(hi) < 0.0 {
        return Err(ExperimentError::NoRoot(p_r));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
