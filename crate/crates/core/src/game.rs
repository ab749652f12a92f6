//! Selfish access: each transmitter maximises its own throughput.
//!
//! A transmitter using `q` while everybody else uses `q̃` earns
//! `TH(q, q̃) = f(q) exp(-f(q̃) λ / λ_max) R` with `f = f_B` the effective
//! access of its energy queue. Since `TH` depends on the transmitter's own
//! choice only through `f(q)`, the best response maximises `f`.

use crate::aloha::{AccessSet, AlohaNetwork};
use crate::model::Battery;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SneResult<T> {
    pub equilibrium: AccessSet<T>,
    /// Throughput of every node at the equilibrium, rate included.
    pub per_node_throughput: T,
    /// `λ · per_node_throughput`
    pub capacity_at_sne: T,
    pub poa: T,
}

pub fn throughput<T: Real>(net: &AlohaNetwork<T>, q: T, q_other: T) -> T {
    let energy = net.energy();
    let own = energy.effective_access(q);
    let others = energy.effective_access(q_other);
    own * (-others * net.lambda() / net.lambda_max()).exp() * net.rate()
}

/// Maximisers of `TH(·, q_other)`; they do not depend on `q_other`.
pub fn best_response<T: Real>(net: &AlohaNetwork<T>, _q_other: T) -> AccessSet<T> {
    match net.energy().battery() {
        // f = min(p, q) plateaus at p
        Battery::Unbounded => AccessSet::Interval(net.p(), T::one()),
        // f_B strictly increasing up to f_B(1) = p
        Battery::Finite(_) => AccessSet::Point(T::one()),
    }
}

pub fn sne<T: Real>(net: &AlohaNetwork<T>) -> SneResult<T> {
    let p = net.p();
    let equilibrium = match net.energy().battery() {
        Battery::Unbounded if p < T::one() => AccessSet::Interval(p, T::one()),
        _ => AccessSet::Point(T::one()),
    };
    let per_node_throughput = p * (-p * net.lambda() / net.lambda_max()).exp() * net.rate();
    SneResult {
        equilibrium,
        per_node_throughput,
        capacity_at_sne: net.lambda() * per_node_throughput,
        poa: price_of_anarchy(net),
    }
}

/// Globally optimal capacity over the capacity shared by every equilibrium.
///
/// Exactly 1 when the global optimum is itself an equilibrium: `p <= λ_max/λ`
/// for an unbounded battery, or `f_B(y) = λ_max/λ` having no root below 1 for a
/// finite one. Otherwise the ratio of the two capacities, so the rate cancels.
pub fn price_of_anarchy<T: Real>(net: &AlohaNetwork<T>) -> T {
    let p = net.p();
    let ratio = net.critical_ratio();
    let optimum_is_equilibrium = match net.energy().battery() {
        Battery::Unbounded => p <= ratio,
        Battery::Finite(_) => match net.solve_effective_access(ratio) {
            Some(y) => y >= T::one(),
            None => true,
        },
    };
    if optimum_is_equilibrium {
        return T::one();
    }
    net.optimal_access().capacity / net.capacity_at_access(p)
}

/// `λ_max / (e p λ exp(-pλ/λ_max))` off the equal-optimum branch.
///
/// Holds for any battery: at the finite-battery optimum `f_B(q̂) = λ_max/λ`,
/// so the optimal capacity is `λ_max R / e` as in the unbounded case.
pub fn price_of_anarchy_closed_form<T: Real>(net: &AlohaNetwork<T>) -> T {
    let p = net.p();
    let ratio = net.critical_ratio();
    if p <= ratio {
        return T::one();
    }
    let x = p * net.lambda() / net.lambda_max();
    net.lambda_max() / (T::E() * p * net.lambda() * (-x).exp())
}

/// Finite-battery ratio with `q̂` standing in for `f_B(q̂)` in the numerator,
/// `λ q̂ exp(-q̂λ/λ_max) / (λ p exp(-pλ/λ_max))`. Not the capacity ratio; kept
/// for comparison only. `None` for unbounded batteries or when `q̂` is not in `[0, 1)`.
pub fn price_of_anarchy_substituted<T: Real>(net: &AlohaNetwork<T>) -> Option<T> {
    if net.energy().battery().is_unbounded() {
        return None;
    }
    let q_hat = net.solve_effective_access(net.critical_ratio())?;
    if q_hat >= T::one() {
        return None;
    }
    let (lambda, lmax, p) = (net.lambda(), net.lambda_max(), net.p());
    let num = lambda * q_hat * (-q_hat * lambda / lmax).exp();
    let den = lambda * p * (-p * lambda / lmax).exp();
    Some(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ChannelParams, EnergyModel, NetworkParams};

    const LMAX: f64 = 0.020_728_863_430_647_392;

    fn net(lambda: f64, p: f64, b: Battery) -> AlohaNetwork<f64> {
        let ch = ChannelParams::new(3.0, 2.0, 2.0).unwrap();
        AlohaNetwork::new(&NetworkParams::new(lambda, ch, EnergyModel::new(p, b).unwrap()).unwrap())
    }

    fn grid() -> impl Iterator<Item = f64> {
        (0..=10_000).map(|k| k as f64 / 1e4)
    }

    #[test]
    fn throughput_examples() {
        let n = net(0.1, 0.5, Battery::Unbounded);
        let expect = 0.5 * (-0.5 * 0.1 / LMAX).exp() * 3f64.log2();
        assert!((throughput(&n, 0.7, 0.7) - expect).abs() < 1e-15);
        assert_eq!(throughput(&n, 0.0, 0.4), 0.0);
        let n3 = net(0.1, 0.5, Battery::Finite(3));
        assert!((throughput(&n3, 1.0, 1.0) - expect).abs() < 1e-15);
    }

    #[test]
    fn best_responses() {
        assert_eq!(best_response(&net(0.1, 0.5, Battery::Unbounded), 0.3), AccessSet::Interval(0.5, 1.0));
        assert_eq!(best_response(&net(0.1, 0.5, Battery::Finite(2)), 0.3), AccessSet::Point(1.0));
        assert_eq!(best_response(&net(0.1, 1.0, Battery::Unbounded), 0.3), AccessSet::Interval(1.0, 1.0));
    }

    #[test]
    fn sne_examples() {
        let th = 0.5 * (-0.5 * 0.1 / LMAX).exp() * 3f64.log2();
        let s = sne(&net(0.1, 0.5, Battery::Unbounded));
        assert_eq!(s.equilibrium, AccessSet::Interval(0.5, 1.0));
        assert!((s.per_node_throughput - th).abs() < 1e-15);
        assert!((s.capacity_at_sne - 0.1 * th).abs() < 1e-15);

        let s = sne(&net(0.1, 0.5, Battery::Finite(1)));
        assert_eq!(s.equilibrium, AccessSet::Point(1.0));
        assert!((s.per_node_throughput - th).abs() < 1e-15);

        let s = sne(&net(0.1, 1.0, Battery::Unbounded));
        assert_eq!(s.equilibrium, AccessSet::Point(1.0));
        assert!((s.per_node_throughput - (-0.1 / LMAX).exp() * 3f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn poa_examples() {
        // p = 0.4 below λ_max/λ = 0.45
        let n = net(LMAX / 0.45, 0.4, Battery::Unbounded);
        assert_eq!(price_of_anarchy(&n), 1.0);

        let poa = price_of_anarchy(&net(0.1, 0.5, Battery::Unbounded));
        assert!((poa - 1.701_652_229_914_366_6).abs() < 1e-12);

        let n = AlohaNetwork::from_parts(0.02, 0.023, 1.0, EnergyModel::new(0.5, Battery::Finite(1)).unwrap()).unwrap();
        assert_eq!(price_of_anarchy(&n), 1.0);
    }

    #[test]
    fn equilibria_survive_unilateral_deviation() {
        for b in [Battery::Unbounded, Battery::Finite(1), Battery::Finite(5)] {
            for lambda in [0.01, 0.1] {
                let n = net(lambda, 0.5, b);
                let eq = sne(&n).equilibrium;
                let probes: Vec<f64> = match eq {
                    AccessSet::Point(x) => vec![x],
                    AccessSet::Interval(lo, hi) => (0..=10).map(|k| lo + (hi - lo) * k as f64 / 10.0).collect(),
                };
                for q_star in probes {
                    let at_eq = throughput(&n, q_star, q_star);
                    let best = grid().map(|q| throughput(&n, q, q_star)).fold(f64::MIN, f64::max);
                    assert!(best - at_eq < 1e-12, "B={b} λ={lambda} q*={q_star}");
                }
            }
        }
    }

    #[test]
    fn throughput_plateau_above_p() {
        let n = net(0.1, 0.5, Battery::Unbounded);
        let base = throughput(&n, 0.5, 0.8);
        for q in grid().filter(|&q| q >= 0.5) {
            assert!((throughput(&n, q, 0.8) - base).abs() < 1e-12);
        }
    }

    #[test]
    fn poa_matches_closed_form_and_is_at_least_one() {
        for i in 0..10 {
            for j in 0..10 {
                let lambda = 0.005 * 1.5f64.powi(i);
                let p = 0.05 + 0.1 * j as f64;
                for b in [Battery::Unbounded, Battery::Finite(1), Battery::Finite(4)] {
                    let n = net(lambda, p, b);
                    let poa = price_of_anarchy(&n);
                    assert!(poa >= 1.0 - 1e-12);
                    let closed = price_of_anarchy_closed_form(&n);
                    assert!(((poa - closed) / closed).abs() < 1e-10, "λ={lambda} p={p} B={b}: {poa} vs {closed}");
                }
            }
        }
    }

    #[test]
    fn substituted_ratio_differs_from_capacity_ratio() {
        let n = net(0.1, 0.5, Battery::Finite(1));
        let sub = price_of_anarchy_substituted(&n).unwrap();
        assert!((sub - price_of_anarchy(&n)).abs() > 1e-3);
        assert!(price_of_anarchy_substituted(&net(0.1, 0.5, Battery::Unbounded)).is_none());
    }
}
