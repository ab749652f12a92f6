//! Slotted ALOHA with energy-harvesting transmitters.
//!
//! Active transmitters form a thinned PPP of density `λ_a = q r λ`, so the
//! success probability of the typical link is `exp(-λ_a / λ_max)` and the
//! transmission capacity is `C = λ_a exp(-λ_a / λ_max) R`.

use crate::error::{ensure, Result};
use crate::model::{Battery, EnergyModel, NetworkParams};
use crate::numerics::find_root_increasing;
use crate::scalar::Real;

/// Everything the ALOHA closed forms depend on.
///
/// Usually built from [`NetworkParams`]; [`AlohaNetwork::from_parts`] accepts
/// an explicit `λ_max` so results can be reproduced for externally quoted
/// values of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlohaNetwork<T> {
    lambda: T,
    lambda_max: T,
    rate: T,
    energy: EnergyModel<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlohaResult<T> {
    pub q: T,
    pub r: T,
    pub active_density: T,
    pub p_suc: T,
    pub capacity: T,
}

/// A single access probability or a closed interval of equally good ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AccessSet<T> {
    Point(T),
    Interval(T, T),
}

impl<T: Real> AccessSet<T> {
    pub fn contains(&self, q: T, tol: T) -> bool {
        match *self {
            AccessSet::Point(x) => (q - x).abs() <= tol,
            AccessSet::Interval(lo, hi) => q >= lo - tol && q <= hi + tol,
        }
    }

    /// The point, or the lower end of the interval.
    pub fn representative(&self) -> T {
        match *self {
            AccessSet::Point(x) | AccessSet::Interval(x, _) => x,
        }
    }
}

impl<T: Real> std::fmt::Display for AccessSet<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AccessSet::Point(x) => write!(f, "Point({x})"),
            AccessSet::Interval(lo, hi) => write!(f, "Interval({lo};{hi})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalAccess<T> {
    pub kind: AccessSet<T>,
    pub capacity: T,
}

impl<T: Real> AlohaNetwork<T> {
    pub fn new(params: &NetworkParams<T>) -> Self {
        let derived = params.channel().derive();
        Self {
            lambda: params.lambda(),
            lambda_max: derived.lambda_max,
            rate: derived.rate,
            energy: *params.energy(),
        }
    }

    pub fn from_parts(lambda: T, lambda_max: T, rate: T, energy: EnergyModel<T>) -> Result<Self> {
        ensure(lambda > T::zero(), "lambda", lambda.as_f64(), "lambda > 0")?;
        ensure(lambda_max > T::zero(), "lambda_max", lambda_max.as_f64(), "lambda_max > 0")?;
        ensure(rate > T::zero(), "rate", rate.as_f64(), "rate > 0")?;
        Ok(Self {
            lambda,
            lambda_max,
            rate,
            energy,
        })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn lambda_max(&self) -> T {
        self.lambda_max
    }

    pub fn rate(&self) -> T {
        self.rate
    }

    pub fn energy(&self) -> &EnergyModel<T> {
        &self.energy
    }

    pub fn p(&self) -> T {
        self.energy.p()
    }

    /// `λ_max / λ`: the conventionally powered optimum and the level `f_B` is solved against.
    pub fn critical_ratio(&self) -> T {
        self.lambda_max / self.lambda
    }

    /// Capacity when every transmitter transmits in a slot with probability `f`.
    pub fn capacity_at_access(&self, f: T) -> T {
        let active = self.lambda * f;
        active * (-active / self.lambda_max).exp() * self.rate
    }

    pub fn evaluate(&self, q: T) -> AlohaResult<T> {
        debug_assert!(q >= T::zero() && q <= T::one());
        let occ = self.energy.occupancy(q);
        let active_density = self.lambda * occ.effective_access;
        let p_suc = (-active_density / self.lambda_max).exp();
        AlohaResult {
            q,
            r: occ.r,
            active_density,
            p_suc,
            capacity: active_density * p_suc * self.rate,
        }
    }

    pub fn capacity(&self, q: T) -> T {
        self.evaluate(q).capacity
    }

    pub fn optimal_access(&self) -> OptimalAccess<T> {
        match self.energy.battery() {
            Battery::Unbounded => self.optimal_q_infinite(),
            Battery::Finite(_) => self.optimal_q_finite(),
        }
    }

    /// Unbounded battery: `q* = λ_max/λ` when `p > λ_max/λ`, otherwise every `q ∈ [p, 1]`.
    pub fn optimal_q_infinite(&self) -> OptimalAccess<T> {
        let p = self.p();
        let ratio = self.critical_ratio();
        if p > ratio && ratio <= T::one() {
            OptimalAccess {
                kind: AccessSet::Point(ratio),
                capacity: self.capacity_at_access(ratio),
            }
        } else {
            OptimalAccess {
                kind: AccessSet::Interval(p, T::one()),
                capacity: self.capacity_at_access(p),
            }
        }
    }

    /// Finite battery: `q* = min(q̂, 1)` with `f_B(q̂) = λ_max/λ`, solved by bisection.
    pub fn optimal_q_finite(&self) -> OptimalAccess<T> {
        let q = match self.solve_effective_access(self.critical_ratio()) {
            Some(q) => q,
            None => T::one(),
        };
        OptimalAccess {
            kind: AccessSet::Point(q),
            capacity: self.capacity(q),
        }
    }

    /// Root of `f_B(q) = level` on `[0, 1]`, or `None` when `level > f_B(1) = p`.
    pub fn solve_effective_access(&self, level: T) -> Option<T> {
        let energy = self.energy;
        find_root_increasing(|q| energy.effective_access(q), level, T::zero(), T::one(), T::tol(1e-15)).ok()
    }
}

/// Unit-battery optimum in closed form, alongside the variant with the
/// opposite sign in the denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitBatteryOptimum<T> {
    /// `min(λ_max p / (λp - λ_max(1-p)), 1)`, or 1 when the denominator is not positive.
    pub q_star: T,
    /// `min(p λ_max / (λp + λ_max(1-p)), 1)`; does not solve `f_1(q) = λ_max/λ`.
    pub sign_flipped: T,
}

pub fn unit_battery_optimum<T: Real>(p: T, lambda: T, lambda_max: T) -> UnitBatteryOptimum<T> {
    let one = T::one();
    let denom = lambda * p - lambda_max * (one - p);
    let q_star = if denom > T::zero() {
        (lambda_max * p / denom).min(one)
    } else {
        one
    };
    let sign_flipped = (p * lambda_max / (lambda * p + lambda_max * (one - p))).min(one);
    UnitBatteryOptimum { q_star, sign_flipped }
}
