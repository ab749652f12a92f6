//! Monte Carlo estimators that check the closed forms.
//!
//! Every estimator is a pure function of its inputs and a seed. Trials are
//! grouped into fixed blocks of [`BLOCK_TRIALS`]; block `k` draws from the
//! ChaCha8 stream `k` of a generator keyed by the seed and the estimator, so
//! results do not depend on thread count or scheduling. Reductions are over
//! integer counts.
//!
//! The observation window is a disc of radius `window_radius` around the
//! typical receiver. Interference from beyond the disc is replaced by its
//! mean, which removes the truncation bias to first order.
//!
//! Simulations run in `f64`.

mod aloha;
mod csma;
mod field;
mod queue;

pub use aloha::{estimate_aloha_psuc, estimate_aloha_psuc_marked, estimate_aloha_psuc_window_pair};
pub use csma::{estimate_csma, estimate_csma_backoff, CsmaBackoffEstimate, CsmaEstimate};
pub use field::{far_field_mean, sample_ppp, typical_sir, Point};
pub use queue::simulate_energy_queue;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{ensure, Result};
use crate::model::ChannelParams;

/// Trials per independent random stream.
pub const BLOCK_TRIALS: u64 = 1024;

/// Default number of standard errors an estimate may deviate by.
pub const DEFAULT_CONFIDENCE: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    window_radius: f64,
    trials: u64,
    slots: u64,
    seed: u64,
    confidence: f64,
    far_field: bool,
}

impl SimConfig {
    /// `window_radius >= min_window_radius(channel)`, `trials >= 1`, `slots >= 100`.
    pub fn new(channel: &ChannelParams<f64>, window_radius: f64, trials: u64, slots: u64, seed: u64) -> Result<Self> {
        let min = min_window_radius(channel);
        ensure(window_radius >= min && window_radius.is_finite(), "window_radius", window_radius, "window_radius >= 20 max(d, d theta^(1/alpha))")?;
        ensure(trials >= 1, "trials", trials as f64, "trials >= 1")?;
        ensure(slots >= 100, "slots", slots as f64, "slots >= 100")?;
        Ok(Self {
            window_radius,
            trials,
            slots,
            seed,
            confidence: DEFAULT_CONFIDENCE,
            far_field: true,
        })
    }

    /// Smallest admissible window.
    pub fn with_default_radius(channel: &ChannelParams<f64>, trials: u64, slots: u64, seed: u64) -> Result<Self> {
        Self::new(channel, min_window_radius(channel), trials, slots, seed)
    }

    pub fn with_confidence(mut self, confidence: f64) -> Result<Self> {
        ensure(confidence > 0.0 && confidence.is_finite(), "confidence", confidence, "confidence > 0")?;
        self.confidence = confidence;
        Ok(self)
    }

    /// Disables the mean correction for interference beyond the window.
    pub fn without_far_field(mut self) -> Self {
        self.far_field = false;
        self
    }

    pub fn with_trials(mut self, trials: u64) -> Result<Self> {
        ensure(trials >= 1, "trials", trials as f64, "trials >= 1")?;
        self.trials = trials;
        Ok(self)
    }

    pub fn with_window_radius(self, channel: &ChannelParams<f64>, window_radius: f64) -> Result<Self> {
        let mut next = Self::new(channel, window_radius, self.trials, self.slots, self.seed)?;
        next.confidence = self.confidence;
        next.far_field = self.far_field;
        Ok(next)
    }

    pub fn window_radius(&self) -> f64 {
        self.window_radius
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn slots(&self) -> u64 {
        self.slots
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }

    pub fn far_field(&self) -> bool {
        self.far_field
    }
}

/// `20 max(d, d θ^{1/α})`.
pub fn min_window_radius(channel: &ChannelParams<f64>) -> f64 {
    20.0 * channel.d().max(channel.interference_radius())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

impl SimEstimate {
    /// Frequency `hits / trials` with its binomial standard error.
    pub fn from_counts(hits: u64, trials: u64, seed: u64) -> Self {
        let n = trials.max(1) as f64;
        let mean = hits as f64 / n;
        Self {
            mean,
            std_error: (mean * (1.0 - mean) / n).sqrt(),
            trials,
            seed,
        }
    }

    /// `|mean - target| <= k σ`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error
    }

    /// `(mean - target) / σ`, or 0 / ±∞ when `σ = 0`.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = self.mean - target;
        if self.std_error > 0.0 {
            diff / self.std_error
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }
}

/// Estimator identifiers that key independent generators for one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub(crate) enum Purpose {
    Aloha = 1,
    AlohaMarked = 2,
    Queue = 3,
    CsmaBackoff = 4,
    CsmaOutage = 5,
}

pub(crate) fn stream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let key = seed ^ (purpose as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}

/// Runs `trials` trials in blocks, block `k` on stream `k`, returning block results in order.
pub(crate) fn run_blocks<R, F>(trials: u64, seed: u64, purpose: Purpose, block: F) -> Vec<R>
where
    R: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> R + Sync,
{
    let blocks = trials.div_ceil(BLOCK_TRIALS);
    (0..blocks)
        .into_par_iter()
        .map(|k| {
            let n = BLOCK_TRIALS.min(trials - k * BLOCK_TRIALS);
            let mut rng = stream(seed, purpose, k);
            block(&mut rng, n)
        })
        .collect()
}
