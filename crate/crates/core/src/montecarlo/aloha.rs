//! Success probability of the typical ALOHA link.

use std::f64::consts::PI;

use rand::Rng;

use super::field::{exp1, far_field_mean, sample_ppp, sir_with_background};
use super::{run_blocks, Purpose, SimConfig, SimEstimate};
use crate::model::NetworkParams;

/// Empirical `P(SIR > θ)` when each transmitter is active with probability `q r`.
///
/// Active transmitters are drawn directly as a PPP of density `λ q r` (an
/// independent thinning of a PPP is a PPP), in order of distance from the
/// receiver, out to the window radius.
pub fn estimate_aloha_psuc(params: &NetworkParams<f64>, q: f64, config: &SimConfig) -> SimEstimate {
    let density = active_density(params, q);
    let radius = config.window_radius();
    let counts = run_blocks(config.trials(), config.seed(), Purpose::Aloha, |rng, n| {
        (0..n)
            .filter(|_| {
                let walk = RadialWalk::new(params, density, config.far_field());
                walk.succeeds_within(&[radius], rng)[0]
            })
            .count() as u64
    });
    SimEstimate::from_counts(counts.iter().sum(), config.trials(), config.seed())
}

/// Estimates at the window radius and at twice it, from the same realisations.
///
/// The field inside the smaller disc is shared, so the difference between the
/// two estimates isolates the effect of the window.
pub fn estimate_aloha_psuc_window_pair(params: &NetworkParams<f64>, q: f64, config: &SimConfig) -> (SimEstimate, SimEstimate) {
    let density = active_density(params, q);
    let radius = config.window_radius();
    let counts = run_blocks(config.trials(), config.seed(), Purpose::Aloha, |rng, n| {
        let mut hits = [0u64; 2];
        for _ in 0..n {
            let walk = RadialWalk::new(params, density, config.far_field());
            let ok = walk.succeeds_within(&[radius, 2.0 * radius], rng);
            hits[0] += u64::from(ok[0]);
            hits[1] += u64::from(ok[1]);
        }
        hits
    });
    let (near, far) = counts.iter().fold((0, 0), |(a, b), h| (a + h[0], b + h[1]));
    (
        SimEstimate::from_counts(near, config.trials(), config.seed()),
        SimEstimate::from_counts(far, config.trials(), config.seed()),
    )
}

/// The same estimate built from every transmitter in the window, each marked
/// active independently with probability `q r`, as a check on the thinning
/// shortcut. Much slower at high densities.
pub fn estimate_aloha_psuc_marked(params: &NetworkParams<f64>, q: f64, config: &SimConfig) -> SimEstimate {
    let access = active_density(params, q) / params.lambda();
    let radius = config.window_radius();
    let channel = params.channel();
    let background = if config.far_field() {
        far_field_mean(params.lambda() * access, radius, channel.alpha())
    } else {
        0.0
    };
    let theta = channel.theta();
    let counts = run_blocks(config.trials(), config.seed(), Purpose::AlohaMarked, |rng, n| {
        (0..n)
            .filter(|_| {
                let points = sample_ppp(params.lambda(), radius, rng);
                let active: Vec<bool> = points.iter().map(|_| rng.random::<f64>() < access).collect();
                sir_with_background(&points, &active, channel, background, rng) > theta
            })
            .count() as u64
    });
    SimEstimate::from_counts(counts.iter().sum(), config.trials(), config.seed())
}

fn active_density(params: &NetworkParams<f64>, q: f64) -> f64 {
    assert!((0.0..=1.0).contains(&q), "q must be a probability");
    params.lambda() * params.energy().effective_access(q)
}

/// One realisation of the interference seen by the typical receiver, generated outward.
struct RadialWalk {
    density: f64,
    alpha: f64,
    /// `d^α θ`
    scale: f64,
    far_field: bool,
}

impl RadialWalk {
    fn new(params: &NetworkParams<f64>, density: f64, far_field: bool) -> Self {
        let ch = params.channel();
        Self {
            density,
            alpha: ch.alpha(),
            scale: ch.d().powf(ch.alpha()) * ch.theta(),
            far_field,
        }
    }

    /// Success for each window radius in increasing order of `radii`.
    fn succeeds_within<R: Rng + ?Sized>(&self, radii: &[f64], rng: &mut R) -> Vec<bool> {
        // SIR > θ  ⇔  interference < E / (d^α θ)
        let budget = exp1(rng) / self.scale;
        if self.density == 0.0 {
            return vec![true; radii.len()];
        }
        let background = |r: f64| if self.far_field { far_field_mean(self.density, r, self.alpha) } else { 0.0 };
        let outer = *radii.last().expect("at least one radius");
        let mut result = Vec::with_capacity(radii.len());
        let mut next = 0;
        let mut near = 0.0;
        let mut area = 0.0;
        loop {
            area += exp1(rng);
            let r2 = area / (PI * self.density);
            while next < radii.len() && r2 > radii[next] * radii[next] {
                result.push(near + background(radii[next]) < budget);
                next += 1;
            }
            if r2 > outer * outer {
                break;
            }
            near += exp1(rng) * r2.powf(-0.5 * self.alpha);
            if near >= budget {
                // every remaining window fails too
                result.resize(radii.len(), false);
                break;
            }
        }
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Battery, ChannelParams, EnergyModel};

    fn params(lambda: f64, p: f64, b: Battery) -> NetworkParams<f64> {
        let ch = ChannelParams::new(3.0, 2.0, 2.0).unwrap();
        NetworkParams::new(lambda, ch, EnergyModel::new(p, b).unwrap()).unwrap()
    }

    fn config(trials: u64, seed: u64) -> SimConfig {
        SimConfig::with_default_radius(&ChannelParams::new(3.0, 2.0, 2.0).unwrap(), trials, 1000, seed).unwrap()
    }

    fn closed_form(n: &NetworkParams<f64>, q: f64) -> f64 {
        crate::aloha::AlohaNetwork::new(n).evaluate(q).p_suc
    }

    #[test]
    fn silent_network_always_succeeds() {
        let e = estimate_aloha_psuc(&params(0.1, 0.5, Battery::Unbounded), 0.0, &config(5000, 1));
        assert_eq!(e.mean, 1.0);
    }

    #[test]
    fn matches_closed_form() {
        for (n, q) in [
            (params(0.1, 0.5, Battery::Unbounded), 0.23),
            (params(0.05, 0.5, Battery::Finite(1)), 1.0),
        ] {
            let e = estimate_aloha_psuc(&n, q, &config(100_000, 11));
            assert!(e.within(closed_form(&n, q), 3.0), "{e:?} vs {}", closed_form(&n, q));
        }
    }

    #[test]
    fn marked_and_thinned_agree() {
        let n = params(0.05, 0.5, Battery::Unbounded);
        let a = estimate_aloha_psuc(&n, 0.4, &config(20_000, 5));
        let b = estimate_aloha_psuc_marked(&n, 0.4, &config(20_000, 6));
        let se = a.std_error.hypot(b.std_error);
        assert!((a.mean - b.mean).abs() < 3.0 * se, "{a:?} {b:?}");
        assert!(b.within(closed_form(&n, 0.4), 3.0));
    }

    #[test]
    fn window_pair_shares_inner_field() {
        let n = params(0.1, 0.5, Battery::Unbounded);
        let cfg = config(20_000, 3);
        let (near, far) = estimate_aloha_psuc_window_pair(&n, 0.23, &cfg);
        assert!(near.within(closed_form(&n, 0.23), 3.0));
        assert!((near.mean - far.mean).abs() < near.std_error);
    }

    #[test]
    fn truncating_without_far_field_is_biased_upward() {
        let n = params(0.1, 0.5, Battery::Unbounded);
        let cfg = config(200_000, 4).without_far_field();
        let e = estimate_aloha_psuc(&n, 0.23, &cfg);
        assert!(e.mean - closed_form(&n, 0.23) > 3.0 * e.std_error, "{e:?}");
    }

    #[test]
    fn thread_count_does_not_matter() {
        let n = params(0.1, 0.5, Battery::Finite(5));
        let cfg = config(5000, 8);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let a = one.install(|| estimate_aloha_psuc(&n, 0.5, &cfg));
        let b = three.install(|| estimate_aloha_psuc(&n, 0.5, &cfg));
        assert_eq!(a, b);
    }
}
