//! Poisson fields and the SIR at the typical receiver.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use crate::model::ChannelParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Homogeneous PPP of `density` on the disc of radius `radius` centred at the origin.
pub fn sample_ppp<R: Rng + ?Sized>(density: f64, radius: f64, rng: &mut R) -> Vec<Point> {
    assert!(density >= 0.0 && radius >= 0.0);
    let n = poisson_count(density * std::f64::consts::PI * radius * radius, rng);
    (0..n)
        .map(|_| {
            let r = radius * rng.random::<f64>().sqrt();
            let phi = std::f64::consts::TAU * rng.random::<f64>();
            Point {
                x: r * phi.cos(),
                y: r * phi.sin(),
            }
        })
        .collect()
}

pub(crate) fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let draw: f64 = Poisson::new(mean).expect("finite positive mean").sample(rng);
    draw as u64
}

pub(crate) fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

/// SIR at a receiver at the origin whose transmitter is `d` away, with
/// independent unit-mean exponential fading on every link. Only interferers
/// with `active[k]` contribute. Infinite when nothing interferes.
pub fn typical_sir<R: Rng + ?Sized>(
    interferers: &[Point],
    active: &[bool],
    channel: &ChannelParams<f64>,
    rng: &mut R,
) -> f64 {
    sir_with_background(interferers, active, channel, 0.0, rng)
}

/// [`typical_sir`] with a deterministic `background` added to the interference.
pub(crate) fn sir_with_background<R: Rng + ?Sized>(
    interferers: &[Point],
    active: &[bool],
    channel: &ChannelParams<f64>,
    background: f64,
    rng: &mut R,
) -> f64 {
    assert_eq!(interferers.len(), active.len());
    let alpha = channel.alpha();
    let signal = exp1(rng) * channel.d().powf(-alpha);
    let mut interference = background;
    for (pt, &on) in interferers.iter().zip(active) {
        if on {
            interference += exp1(rng) * pt.norm().powf(-alpha);
        }
    }
    if interference > 0.0 {
        signal / interference
    } else {
        f64::INFINITY
    }
}

/// Mean interference from a PPP of `density` outside the disc of radius
/// `radius`, with unit-mean fading: `2π density radius^{2-α} / (α - 2)`.
pub fn far_field_mean(density: f64, radius: f64, alpha: f64) -> f64 {
    std::f64::consts::TAU * density * radius.powf(2.0 - alpha) / (alpha - 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::{stream, Purpose};

    #[test]
    fn empty_field() {
        let mut rng = stream(1, Purpose::Aloha, 0);
        assert!(sample_ppp(0.0, 100.0, &mut rng).is_empty());
        let ch = ChannelParams::new(3.0, 2.0, 2.0).unwrap();
        assert_eq!(typical_sir(&[], &[], &ch, &mut rng), f64::INFINITY);
        let pts = [Point { x: 3.0, y: 0.0 }];
        assert_eq!(typical_sir(&pts, &[false], &ch, &mut rng), f64::INFINITY);
    }

    #[test]
    fn counts_are_poisson_and_points_uniform() {
        let mut rng = stream(2, Purpose::Aloha, 0);
        let mean = 0.1 * std::f64::consts::PI * 100.0 * 100.0;
        let draws = 10_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut inner = 0usize;
        let mut total = 0usize;
        for _ in 0..draws {
            let pts = sample_ppp(0.1, 100.0, &mut rng);
            let n = pts.len() as f64;
            sum += n;
            sum_sq += n * n;
            total += pts.len();
            inner += pts.iter().filter(|p| p.norm() <= 50.0).count();
            assert!(pts.iter().all(|p| p.norm() <= 100.0));
        }
        let m = sum / draws as f64;
        let var = sum_sq / draws as f64 - m * m;
        assert!((m - mean).abs() < 3.0 * (mean / draws as f64).sqrt(), "mean {m}");
        assert!((var / mean - 1.0).abs() < 0.05, "dispersion {}", var / mean);
        // a quarter of the area lies within half the radius
        let frac = inner as f64 / total as f64;
        assert!((frac - 0.25).abs() < 3.0 * (0.25 * 0.75 / total as f64).sqrt());
    }

    #[test]
    fn equal_distance_interferer_gives_fading_ratio() {
        // With one interferer at distance d the SIR is E1/E2, and P(E1/E2 > 1) = 1/2.
        let ch = ChannelParams::new(3.0, 2.0, 2.0).unwrap();
        let pts = [Point { x: 0.0, y: 2.0 }];
        let mut rng = stream(3, Purpose::Aloha, 0);
        let n = 100_000;
        let above = (0..n).filter(|_| typical_sir(&pts, &[true], &ch, &mut rng) > 1.0).count();
        let frac = above as f64 / n as f64;
        assert!((frac - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt());
    }

    #[test]
    fn same_stream_same_points() {
        let a = sample_ppp(0.05, 30.0, &mut stream(9, Purpose::Aloha, 4));
        let b = sample_ppp(0.05, 30.0, &mut stream(9, Purpose::Aloha, 4));
        assert_eq!(a, b);
    }

    #[test]
    fn far_field_integral() {
        // ∫_R^∞ 2π ρ λ ρ^{-3} dρ = 2πλ / R at α = 3
        assert!((far_field_mean(0.1, 50.0, 3.0) - std::f64::consts::TAU * 0.1 / 50.0).abs() < 1e-15);
    }
}
