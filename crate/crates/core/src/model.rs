//! Validated network parameters and the channel constants derived from them.
//!
//! Everything here is interference limited: there is no noise term, and all
//! transmitters use unit power. A link succeeds when its SIR exceeds `theta`.
//!
//! Constructors validate their inputs, so downstream modules take these types
//! as already-checked.

use std::fmt;
use std::str::FromStr;

use crate::error::{ensure, Error, Result};
use crate::scalar::Real;

/// Path loss, SIR threshold and link length of the typical transmitter/receiver pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams<T> {
    alpha: T,
    theta: T,
    d: T,
}

impl<T: Real> ChannelParams<T> {
    /// `alpha > 2`, `theta > 0` (linear scale), `d > 0` (meters).
    pub fn new(alpha: T, theta: T, d: T) -> Result<Self> {
        ensure(alpha > T::lit(2.0) && alpha.is_finite(), "alpha", alpha.as_f64(), "2 < alpha < inf")?;
        ensure(theta > T::zero() && theta.is_finite(), "theta", theta.as_f64(), "0 < theta < inf")?;
        ensure(d > T::zero() && d.is_finite(), "d", d.as_f64(), "0 < d < inf")?;
        Ok(Self { alpha, theta, d })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn d(&self) -> T {
        self.d
    }

    /// `d² θ^{2/α}`, the area scale of every interference integral.
    pub fn area_scale(&self) -> T {
        self.d * self.d * self.theta.powf(T::lit(2.0) / self.alpha)
    }

    /// `d θ^{1/α}`: distance at which an interferer's mean power equals `signal / theta`.
    pub fn interference_radius(&self) -> T {
        self.d * self.theta.powf(T::one() / self.alpha)
    }

    pub fn derive(&self) -> DerivedChannel<T> {
        derive_channel(self)
    }
}

/// Constants that follow from [`ChannelParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedChannel<T> {
    /// `2π² / (α sin(2π/α))`
    pub kappa: T,
    /// Active density at which the success probability falls to `1/e`.
    pub lambda_max: T,
    /// Rate in bits/sec/Hz attached to the threshold.
    pub rate: T,
}

pub fn kappa<T: Real>(alpha: T) -> T {
    let two_pi = T::TAU();
    T::lit(2.0) * T::PI() * T::PI() / (alpha * (two_pi / alpha).sin())
}

/// Rate for SIR threshold `theta`. Base 2, so the unit is bits/sec/Hz.
pub fn rate<T: Real>(theta: T) -> T {
    theta.ln_1p() / T::LN_2()
}

pub fn derive_channel<T: Real>(channel: &ChannelParams<T>) -> DerivedChannel<T> {
    let kappa = kappa(channel.alpha);
    DerivedChannel {
        kappa,
        lambda_max: T::one() / (channel.area_scale() * kappa),
        rate: rate(channel.theta),
    }
}

/// Battery capacity in energy units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Battery {
    Finite(u32),
    Unbounded,
}

impl Battery {
    pub fn finite(capacity: u32) -> Result<Self> {
        ensure(capacity >= 1, "B", capacity as f64, "B >= 1")?;
        Ok(Battery::Finite(capacity))
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, Battery::Unbounded)
    }
}

impl fmt::Display for Battery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Battery::Finite(b) => write!(f, "{b}"),
            Battery::Unbounded => f.write_str("inf"),
        }
    }
}

impl FromStr for Battery {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "Inf" | "INF" | "infinity" | "unbounded" | "∞" => Ok(Battery::Unbounded),
            other => match other.parse::<u32>() {
                Ok(b) => Battery::finite(b),
                Err(_) => Err(Error::InvalidParameter {
                    field: "B",
                    value: f64::NAN,
                    requirement: "a positive integer or `inf`",
                }),
            },
        }
    }
}

/// Bernoulli energy arrivals with rate `p` into a battery of capacity `battery`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyModel<T> {
    p: T,
    battery: Battery,
}

impl<T: Real> EnergyModel<T> {
    pub fn new(p: T, battery: Battery) -> Result<Self> {
        ensure(p > T::zero() && p <= T::one(), "p", p.as_f64(), "0 < p <= 1")?;
        if let Battery::Finite(b) = battery {
            ensure(b >= 1, "B", b as f64, "B >= 1")?;
        }
        Ok(Self { p, battery })
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn battery(&self) -> Battery {
        self.battery
    }
}

/// Transmitter density, channel and energy model of the whole network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams<T> {
    lambda: T,
    channel: ChannelParams<T>,
    energy: EnergyModel<T>,
}

impl<T: Real> NetworkParams<T> {
    pub fn new(lambda: T, channel: ChannelParams<T>, energy: EnergyModel<T>) -> Result<Self> {
        ensure(lambda > T::zero() && lambda.is_finite(), "lambda", lambda.as_f64(), "0 < lambda < inf")?;
        Ok(Self {
            lambda,
            channel,
            energy,
        })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn channel(&self) -> &ChannelParams<T> {
        &self.channel
    }

    pub fn energy(&self) -> &EnergyModel<T> {
        &self.energy
    }

    pub fn with_lambda(&self, lambda: T) -> Result<Self> {
        Self::new(lambda, self.channel, self.energy)
    }
}

/// Checks that `x` is a probability.
pub(crate) fn check_probability<T: Real>(field: &'static str, x: T) -> Result<()> {
    ensure(x >= T::zero() && x <= T::one(), field, x.as_f64(), "0 <= x <= 1")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn kappa_and_lambda_max_match_high_precision_values() {
        // Frozen from 30-digit evaluation of the closed forms.
        let ch = ChannelParams::new(3.0, 1.0, 1.0).unwrap().derive();
        assert!(rel(ch.kappa, 7.597_625_010_352_075) < 1e-14);
        assert!(rel(ch.lambda_max, 0.131_620_078_463_659_24) < 1e-14);

        let ch = ChannelParams::new(3.0, 2.0, 2.0).unwrap().derive();
        assert!(rel(ch.lambda_max, 0.020_728_863_430_647_392) < 1e-14);
        assert!(rel(ch.rate, 3f64.log2()) < 1e-15);
    }

    #[test]
    fn kappa_at_alpha_four_is_half_pi_squared() {
        let k = kappa(4.0f64);
        assert!(rel(k, std::f64::consts::PI.powi(2) / 2.0) < 1e-15);
    }

    #[test]
    fn constructor_names_offending_field() {
        for (a, t, d, field) in [
            (2.0, 1.0, 1.0, "alpha"),
            (1.5, 1.0, 1.0, "alpha"),
            (3.0, 0.0, 1.0, "theta"),
            (3.0, 1.0, -1.0, "d"),
            (f64::NAN, 1.0, 1.0, "alpha"),
        ] {
            match ChannelParams::new(a, t, d) {
                Err(Error::InvalidParameter { field: f, .. }) => assert_eq!(f, field),
                other => panic!("expected rejection of {field}, got {other:?}"),
            }
        }
        assert!(EnergyModel::new(0.0, Battery::Unbounded).is_err());
        assert!(EnergyModel::new(1.2, Battery::Unbounded).is_err());
        assert!(EnergyModel::new(1.0, Battery::Unbounded).is_ok());
        assert!(Battery::finite(0).is_err());
    }

    #[test]
    fn battery_parses_inf_and_integers() {
        assert_eq!("inf".parse::<Battery>().unwrap(), Battery::Unbounded);
        assert_eq!("5".parse::<Battery>().unwrap(), Battery::Finite(5));
        assert!("0".parse::<Battery>().is_err());
        assert!("x".parse::<Battery>().is_err());
    }

    #[test]
    fn lambda_max_scales_as_inverse_square_of_distance() {
        for alpha in [2.5, 3.0, 4.0, 5.5] {
            let near = ChannelParams::new(alpha, 2.0, 1.5).unwrap().derive().lambda_max;
            let far = ChannelParams::new(alpha, 2.0, 3.0).unwrap().derive().lambda_max;
            assert!(rel(near / far, 4.0) < 1e-13);
        }
    }

    #[test]
    fn f32_instantiation_agrees_with_f64() {
        let a = ChannelParams::new(3.0f32, 2.0, 2.0).unwrap().derive();
        let b = ChannelParams::new(3.0f64, 2.0, 2.0).unwrap().derive();
        assert!(rel(a.lambda_max as f64, b.lambda_max) < 1e-6);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn kappa_strictly_decreasing(a in 2.01f64..20.0, gap in 0.01f64..5.0) {
                prop_assert!(kappa(a) > kappa(a + gap));
            }

            #[test]
            fn lambda_max_decreasing_in_theta_and_d(
                alpha in 2.1f64..6.0, theta in 0.05f64..20.0, d in 0.1f64..50.0, k in 1.01f64..3.0,
            ) {
                let base = ChannelParams::new(alpha, theta, d).unwrap().derive().lambda_max;
                let more_theta = ChannelParams::new(alpha, theta * k, d).unwrap().derive().lambda_max;
                let more_d = ChannelParams::new(alpha, theta, d * k).unwrap().derive().lambda_max;
                prop_assert!(more_theta < base);
                prop_assert!(more_d < base);
            }

            #[test]
            fn derive_is_bit_reproducible(alpha in 2.1f64..6.0, theta in 0.05f64..20.0, d in 0.1f64..50.0) {
                let ch = ChannelParams::new(alpha, theta, d).unwrap();
                let (x, y) = (ch.derive(), ch.derive());
                prop_assert_eq!(x.kappa.to_bits(), y.kappa.to_bits());
                prop_assert_eq!(x.lambda_max.to_bits(), y.lambda_max.to_bits());
                prop_assert_eq!(x.rate.to_bits(), y.rate.to_bits());
            }
        }
    }
}
