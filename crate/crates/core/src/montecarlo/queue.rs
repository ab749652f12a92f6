//! Slot-by-slot simulation of one energy queue.

use rand::Rng;

use super::{stream, Purpose, SimEstimate};
use crate::model::Battery;

const BATCHES: u64 = 100;

/// Fraction of slots that start with at least one unit of energy.
///
/// Each slot: a node holding energy transmits with probability `q`, then a
/// unit arrives with probability `p`, and the level is capped at the battery
/// capacity. The first `slots / 10` slots are discarded; `slots` more are
/// measured in 100 batches, and the standard error is that of the batch means.
pub fn simulate_energy_queue(p: f64, q: f64, battery: Battery, slots: u64, seed: u64) -> SimEstimate {
    assert!(p > 0.0 && p <= 1.0 && (0.0..=1.0).contains(&q));
    let slots = slots.max(BATCHES);
    let cap = match battery {
        Battery::Finite(b) => u64::from(b),
        Battery::Unbounded => u64::MAX,
    };
    let mut rng = stream(seed, Purpose::Queue, 0);
    let mut level: u64 = 0;
    let step = |rng: &mut rand_chacha::ChaCha8Rng, level: &mut u64| -> bool {
        let charged = *level >= 1;
        if charged && rng.random::<f64>() < q {
            *level -= 1;
        }
        if rng.random::<f64>() < p && *level < cap {
            *level += 1;
        }
        charged
    };
    for _ in 0..slots / 10 {
        step(&mut rng, &mut level);
    }
    let per_batch = slots / BATCHES;
    let mut means = Vec::with_capacity(BATCHES as usize);
    let mut total = 0u64;
    for _ in 0..BATCHES {
        let mut hits = 0u64;
        for _ in 0..per_batch {
            hits += u64::from(step(&mut rng, &mut level));
        }
        total += hits;
        means.push(hits as f64 / per_batch as f64);
    }
    let n = (per_batch * BATCHES) as f64;
    let mean = total as f64 / n;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (BATCHES - 1) as f64;
    SimEstimate {
        mean,
        std_error: (var / BATCHES as f64).sqrt(),
        trials: per_batch * BATCHES,
        seed,
    }
}
