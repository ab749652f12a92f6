//! Transmission capacity of random-access wireless networks whose
//! transmitters harvest their energy.
//!
//! Transmitters form a Poisson point process; each stores harvested energy in
//! a battery and spends one unit per transmission. The crate provides the
//! closed forms for slotted ALOHA (capacity, optimal and selfish access) and
//! CSMA (back-off and outage), plus Monte Carlo estimators that check them.
//!
//! The analytic core is generic over the scalar type through [`Real`]; the
//! aliases below fix it to `f64` or `f32`. The simulators use `f64`.

pub mod acceptance;
pub mod aloha;
pub mod csma;
pub mod energy_queue;
pub mod error;
pub mod game;
pub mod model;
pub mod montecarlo;
pub mod numerics;
pub mod scalar;

pub use aloha::{AccessSet, AlohaNetwork, AlohaResult, OptimalAccess};
pub use csma::{BackoffBranch, CsmaParams, CsmaResult};
pub use error::{Error, Result};
pub use montecarlo::{SimConfig, SimEstimate};
pub use model::{Battery, ChannelParams, DerivedChannel, EnergyModel, NetworkParams};
pub use numerics::QuadratureSpec;
pub use scalar::Real;

pub type ChannelParams64 = ChannelParams<f64>;
pub type ChannelParams32 = ChannelParams<f32>;
pub type EnergyModel64 = EnergyModel<f64>;
pub type EnergyModel32 = EnergyModel<f32>;
pub type NetworkParams64 = NetworkParams<f64>;
pub type NetworkParams32 = NetworkParams<f32>;
pub type AlohaNetwork64 = AlohaNetwork<f64>;
pub type AlohaNetwork32 = AlohaNetwork<f32>;
pub type QuadratureSpec64 = QuadratureSpec<f64>;
pub type CsmaParams64 = CsmaParams<f64>;
pub type CsmaParams32 = CsmaParams<f32>;
