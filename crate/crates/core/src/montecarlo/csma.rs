//! CSMA back-off and outage of a tagged link.
//!
//! Other transmitters back off independently of one another, each sending in
//! a given slot with a common probability `ν` (their activity). The tagged
//! link's sensing slot and its `L` transmission slots are simulated exactly.
//!
//! The activity is found self-consistently: a node that does not back off
//! attempts, so its queue is driven by attempt probability `1 - p_b`, and the
//! resulting transmit rate is the activity that produces `p_b`.

use std::f64::consts::PI;

use rand::Rng;

use super::field::{exp1, far_field_mean, poisson_count};
use super::{run_blocks, simulate_energy_queue, Purpose, SimConfig, SimEstimate};
use crate::csma::CsmaParams;
use crate::model::Battery;

#[derive(Debug, Clone, PartialEq)]
pub struct CsmaBackoffEstimate {
    pub p_b: SimEstimate,
    /// Self-consistent per-slot activity of the other transmitters.
    pub activity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsmaEstimate {
    pub p_b: SimEstimate,
    pub p_fail: SimEstimate,
    pub p_out: SimEstimate,
    pub activity: f64,
}

/// Self-consistent back-off probability.
///
/// For every trial the field of all potential interferers (density `λ`) is
/// generated once, each with a uniform activity mark, and the smallest
/// activity `a*` at which the tagged node would back off is recorded; the
/// node backs off at activity `a` iff `a* < a`. The empirical distribution of
/// `a*` therefore gives the back-off probability at every activity from one
/// set of realisations, and the fixed point `p_b = P(a* < ν(1 - p_b))` is
/// found by bisection, with `ν(q)` the simulated transmit rate of a queue
/// with attempt probability `q`.
pub fn estimate_csma_backoff(params: &CsmaParams<f64>, config: &SimConfig) -> CsmaBackoffEstimate {
    let mut thresholds: Vec<f64> = run_blocks(config.trials(), config.seed(), Purpose::CsmaBackoff, |rng, n| {
        (0..n).map(|_| backoff_threshold(params, config, rng)).collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();
    thresholds.sort_by(f64::total_cmp);
    let backoff_count = |a: f64| thresholds.partition_point(|&t| t < a) as u64;
    let n = thresholds.len() as f64;

    let p = params.p();
    let activity = |attempt: f64| {
        let r = simulate_energy_queue(p, attempt, Battery::Unbounded, config.slots(), config.seed());
        attempt * r.mean
    };
    // g(x) = P(a* < ν(1 - x)) - x is decreasing, g(0) >= 0, g(1) = -1.
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if backoff_count(activity(1.0 - mid)) as f64 / n > mid {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let nu = activity(1.0 - 0.5 * (lo + hi));
    CsmaBackoffEstimate {
        p_b: SimEstimate::from_counts(backoff_count(nu), config.trials(), config.seed()),
        activity: nu,
    }
}

/// Back-off, failure and outage probabilities of the tagged link.
///
/// Interfering packets start in each of the `2L` slots that overlap the
/// tagged slots `0..=L` as a PPP of density `λν/L` on the window and last
/// `L` slots; fading is redrawn every slot on every link. The tagged node
/// backs off when slot 0 has SIR below `θ`, and otherwise fails when any of
/// slots `1..=L` does.
pub fn estimate_csma(params: &CsmaParams<f64>, config: &SimConfig) -> CsmaEstimate {
    let backoff = estimate_csma_backoff(params, config);
    let nu = backoff.activity;
    let counts = run_blocks(config.trials(), config.seed(), Purpose::CsmaOutage, |rng, n| {
        let mut interference = vec![0.0; params.packet_len() as usize + 1];
        let mut tally = [0u64; 2];
        for _ in 0..n {
            match outage_trial(params, config, nu, &mut interference, rng) {
                Outcome::BackedOff => tally[0] += 1,
                Outcome::Failed => tally[1] += 1,
                Outcome::Delivered => {}
            }
        }
        tally
    });
    let (backoffs, fails) = counts.iter().fold((0, 0), |(b, f), t| (b + t[0], f + t[1]));
    let trials = config.trials();
    CsmaEstimate {
        p_b: backoff.p_b,
        p_fail: SimEstimate::from_counts(fails, trials - backoffs, config.seed()),
        p_out: SimEstimate::from_counts(backoffs + fails, trials, config.seed()),
        activity: nu,
    }
}

/// Smallest activity at which the tagged node backs off, or infinity if it never does.
fn backoff_threshold<R: Rng + ?Sized>(params: &CsmaParams<f64>, config: &SimConfig, rng: &mut R) -> f64 {
    let ch = params.network().channel();
    let alpha = ch.alpha();
    let radius = config.window_radius();
    let lambda = params.lambda();
    // back off iff interference > E / (d^α θ)
    let budget = exp1(rng) / (ch.d().powf(alpha) * ch.theta());
    // far-field interference per unit activity
    let slope = if config.far_field() { far_field_mean(lambda, radius, alpha) } else { 0.0 };
    let mark_rate = lambda * PI * radius * radius;
    let mut near = 0.0;
    let mut mark = 0.0;
    loop {
        let next = mark + exp1(rng) / mark_rate;
        if slope > 0.0 {
            let crossing = (budget - near) / slope;
            if crossing < next && crossing <= 1.0 {
                return crossing.max(mark);
            }
        }
        if next > 1.0 {
            return f64::INFINITY;
        }
        mark = next;
        let r2 = radius * radius * rng.random::<f64>();
        near += exp1(rng) * r2.powf(-0.5 * alpha);
        if near + mark * slope > budget {
            return mark;
        }
    }
}

enum Outcome {
    BackedOff,
    Failed,
    Delivered,
}

fn outage_trial<R: Rng + ?Sized>(
    params: &CsmaParams<f64>,
    config: &SimConfig,
    nu: f64,
    interference: &mut [f64],
    rng: &mut R,
) -> Outcome {
    let ch = params.network().channel();
    let alpha = ch.alpha();
    let radius = config.window_radius();
    let len = params.packet_len() as i64;
    let density = params.lambda() * nu;
    let background = if config.far_field() { far_field_mean(density, radius, alpha) } else { 0.0 };
    interference.fill(background);
    let per_start = density / len as f64 * PI * radius * radius;
    for start in (1 - len)..=len {
        let first = start.max(0) as usize;
        let last = (start + len - 1).min(len) as usize;
        for _ in 0..poisson_count(per_start, rng) {
            let gain = (radius * radius * rng.random::<f64>()).powf(-0.5 * alpha);
            for slot in &mut interference[first..=last] {
                *slot += exp1(rng) * gain;
            }
        }
    }
    let scale = ch.d().powf(alpha) * ch.theta();
    let mut blocked = interference.iter().map(|&i| i * scale > exp1(rng));
    if blocked.next().unwrap_or(false) {
        return Outcome::BackedOff;
    }
    if blocked.any(|b| b) {
        Outcome::Failed
    } else {
        Outcome::Delivered
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ChannelParams, EnergyModel, NetworkParams};

    fn params(lambda: f64, len: u32) -> CsmaParams<f64> {
        let ch = ChannelParams::new(3.0, 2.0, 2.0).unwrap();
        let net = NetworkParams::new(lambda, ch, EnergyModel::new(0.5, Battery::Unbounded).unwrap()).unwrap();
        CsmaParams::new(net, len).unwrap()
    }

    fn config(trials: u64, seed: u64) -> SimConfig {
        SimConfig::with_default_radius(&ChannelParams::new(3.0, 2.0, 2.0).unwrap(), trials, 200_000, seed).unwrap()
    }

    #[test]
    fn sparse_network_rarely_backs_off() {
        let ch = ChannelParams::new(3.0, 2.0, 2.0).unwrap();
        let cfg = SimConfig::new(&ch, 100.0, 20_000, 1000, 1).unwrap();
        let e = estimate_csma(&params(1e-6, 2), &cfg);
        assert!(e.p_b.mean < 1e-3 && e.p_out.mean < 1e-3, "{e:?}");
    }

    #[test]
    fn backoff_matches_fixed_point() {
        for (lambda, p_b) in [(0.01, 0.214_323_036_290_035), (0.1, 0.729_201_905_825_921)] {
            let e = estimate_csma_backoff(&params(lambda, 1), &config(20_000, 2));
            assert!(e.p_b.within(p_b, 3.0), "λ={lambda}: {e:?}");
        }
    }

    #[test]
    fn unit_packet_outage_matches_and_respects_bound() {
        let pr = params(0.01, 1);
        let e = estimate_csma(&pr, &config(50_000, 3));
        let analytic = crate::csma::evaluate_csma(&pr, &Default::default()).unwrap();
        assert!(e.p_out.within(analytic.p_out, 3.0), "{e:?} vs {}", analytic.p_out);
        let bound = crate::csma::fkg_bound(e.p_b.mean, 1);
        assert!(e.p_out.mean <= bound + 3.0 * e.p_out.std_error);
    }

    #[test]
    fn reproducible() {
        let pr = params(0.02, 2);
        let a = estimate_csma(&pr, &config(3000, 4));
        let b = estimate_csma(&pr, &config(3000, 4));
        assert_eq!(a, b);
    }
}
