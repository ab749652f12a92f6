//! CSMA with energy-harvesting transmitters.
//!
//! A transmitter holding energy senses the channel in the slot its packet
//! would start and backs off when the SIR it would see is below `θ`; otherwise
//! it transmits for `L` consecutive slots. Back-off events of different
//! transmitters are treated as independent, so the transmitters that do send
//! form a PPP whose density follows from a fixed point in `p_b`:
//!
//! `1 - p_b = exp(-λ ν / λ_max)`, `ν = (1 - p_b) r`, `r = min(p / (1 - p_b), 1)`.
//!
//! A transmission that starts fails when any of its `L` slots has SIR below
//! `θ`; the outage probability is `p_out = p_b + (1 - p_b) p_fail`.

use crate::error::{ensure, Error, Result};
use crate::model::{check_probability, NetworkParams};
use crate::numerics::{alternating_binomial_sum, csma_spatial_integral, lambert_w0, QuadratureSpec};
use crate::scalar::Real;

/// Packet lengths above this make the alternating sum lose most of its digits.
pub const MAX_PRECISE_PACKET_LEN: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsmaParams<T> {
    network: NetworkParams<T>,
    packet_len: u32,
}

impl<T: Real> CsmaParams<T> {
    /// Only unbounded batteries are supported.
    pub fn new(network: NetworkParams<T>, packet_len: u32) -> Result<Self> {
        ensure(packet_len >= 1, "L", packet_len as f64, "L >= 1")?;
        if !network.energy().battery().is_unbounded() {
            return Err(Error::Unsupported("CSMA is analysed for an unbounded battery only"));
        }
        Ok(Self { network, packet_len })
    }

    pub fn network(&self) -> &NetworkParams<T> {
        &self.network
    }

    pub fn packet_len(&self) -> u32 {
        self.packet_len
    }

    pub fn lambda(&self) -> T {
        self.network.lambda()
    }

    pub fn p(&self) -> T {
        self.network.energy().p()
    }

    pub fn lambda_max(&self) -> T {
        self.network.channel().derive().lambda_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BackoffBranch {
    /// `-λ_max ln p / λ > p`: `p_b = 1 - exp(-pλ/λ_max)` and `r = p / (1 - p_b) <= 1`.
    HighEnergy,
    /// Otherwise: every node is always charged (`r = 1`) and `p_b` solves a Lambert W equation.
    EnergyLimited,
}

impl std::fmt::Display for BackoffBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BackoffBranch::HighEnergy => "HighEnergy",
            BackoffBranch::EnergyLimited => "EnergyLimited",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Backoff<T> {
    pub p_b: T,
    pub branch: BackoffBranch,
    /// `min(p / (1 - p_b), 1)`
    pub r: T,
    /// `-λ_max ln p / λ`, compared against `p` to pick the branch.
    pub condition: T,
}

impl<T: Real> Backoff<T> {
    /// Per-slot probability that a given node is transmitting, `(1 - p_b) r`.
    pub fn activity(&self) -> T {
        (T::one() - self.p_b) * self.r
    }
}

/// A probability together with whether it had to be clamped into `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clamped<T> {
    pub value: T,
    pub clamped: bool,
}

impl<T: Real> Clamped<T> {
    fn new(raw: T) -> Self {
        let value = raw.max(T::zero()).min(T::one());
        Self {
            value,
            clamped: value != raw,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsmaResult<T> {
    pub p_b: T,
    pub branch: BackoffBranch,
    pub r: T,
    pub p_fail_given_no_backoff: T,
    pub p_out: T,
    /// `1 - (1 - p_b)^{L+1}`
    pub fkg_bound: T,
    /// `λ (1 - p_out) R`
    pub capacity: T,
    /// Number of intermediate probabilities that were clamped into `[0, 1]`.
    pub clamp_events: u32,
}

pub fn backoff_probability<T: Real>(params: &CsmaParams<T>) -> Result<Backoff<T>> {
    let one = T::one();
    let p = params.p();
    let lambda = params.lambda();
    let lambda_max = params.lambda_max();
    let condition = -lambda_max * p.ln() / lambda;
    if condition > p {
        // (1 - p_b) r = p
        let p_b = -(-p * lambda / lambda_max).exp_m1();
        let r = (p / (one - p_b)).min(one);
        return Ok(Backoff {
            p_b,
            branch: BackoffBranch::HighEnergy,
            r,
            condition,
        });
    }
    let a = lambda / lambda_max;
    let w = lambert_w0(a)?;
    // 1 - p_b = W(a)/a = exp(-W(a))
    let p_b = -(-w).exp_m1();
    Ok(Backoff {
        p_b,
        branch: BackoffBranch::EnergyLimited,
        r: one,
        condition,
    })
}

/// `1 - (1 - p_b)^{L+1}`: upper bound on `p_out` from positive correlation of the per-slot success events.
pub fn fkg_bound<T: Real>(p_b: T, packet_len: u32) -> T {
    let exponent = T::lit(packet_len as f64 + 1.0);
    -(exponent * (-p_b).ln_1p()).exp_m1()
}

/// `P(some transmission slot fails | the sensing slot succeeded)`.
///
/// Interfering packets start in each slot as a PPP of density `λν/L`, with
/// `ν = (1 - p_b) r`, last `L` slots, and see independent Rayleigh fading in
/// every slot. Of the `2L` start slots whose packets overlap the tagged
/// sensing and transmission slots `0..=L`, exactly two cover `c` of those
/// slots for each `c = 1..=L`, so
///
/// `P(all L+1 slots succeed) = exp(-(2λν/L) Σ_{c=1}^{L} I(c, 1))`
///
/// with `I = csma_spatial_integral`, and the result is
/// `1 - P(all succeed) / (1 - p_b)`. For `L = 1` this equals `p_b`.
pub fn failure_probability<T: Real>(params: &CsmaParams<T>, p_b: T, r: T, spec: &QuadratureSpec<T>) -> Result<Clamped<T>> {
    check_probability("p_b", p_b)?;
    check_probability("r", r)?;
    let nu = (T::one() - p_b) * r;
    if nu == T::zero() {
        return Ok(Clamped::new(T::zero()));
    }
    let len = params.packet_len();
    let channel = params.network().channel();
    let spatial: T = (1..=len).map(|c| csma_spatial_integral(c, T::one(), channel, spec)).sum();
    let rate = T::lit(2.0) * params.lambda() * nu / T::lit(len as f64);
    let joint = (-rate * spatial).exp();
    Ok(Clamped::new(T::one() - joint / (T::one() - p_b)))
}

/// The failure probability as the alternating sum
/// `1 - Σ_{ℓ=0}^{L+1} (-1)^ℓ C(L+1, ℓ) exp(-(λ/L) I(ℓ, ν)) / (1 - p_b)`.
///
/// By inclusion–exclusion over `L + 1` slots the sum is the probability that
/// every slot fails, not that every slot succeeds, so the result is not a
/// failure probability; it exceeds the FKG bound at ordinary densities and
/// tends to 1 as `λ → 0`. Reported for comparison only.
pub fn failure_probability_alternating_sum<T: Real>(
    params: &CsmaParams<T>,
    p_b: T,
    r: T,
    spec: &QuadratureSpec<T>,
) -> Result<Clamped<T>> {
    check_probability("p_b", p_b)?;
    check_probability("r", r)?;
    let nu = (T::one() - p_b) * r;
    if nu == T::zero() {
        return Ok(Clamped::new(T::zero()));
    }
    let len = params.packet_len();
    let scale = params.lambda() / T::lit(len as f64);
    let channel = params.network().channel();
    let terms: Vec<T> = (0..=len + 1)
        .map(|ell| (-scale * csma_spatial_integral(ell, nu, channel, spec)).exp())
        .collect();
    let sum = alternating_binomial_sum(&terms);
    Ok(Clamped::new(T::one() - sum / (T::one() - p_b)))
}

/// Whether [`failure_probability_alternating_sum`] is evaluated beyond the packet
/// length where its cancellation leaves few significant digits.
pub fn alternating_sum_precision_warning(packet_len: u32) -> bool {
    packet_len > MAX_PRECISE_PACKET_LEN
}

/// `1 - (1 - p_b) exp(2λθ^{2/α}d²(1-p_b)²r²π²((α-2)/α) csc(2π/α))`, for `L = 1` only.
///
/// Its exponent is positive, so the conditional success probability it
/// implies exceeds 1 once the exponent is large. Reported for comparison only.
pub fn failure_probability_l1_closed_form<T: Real>(params: &CsmaParams<T>, p_b: T, r: T) -> Result<Clamped<T>> {
    if params.packet_len() != 1 {
        return Err(Error::Unsupported("the closed form is stated for L = 1"));
    }
    check_probability("p_b", p_b)?;
    check_probability("r", r)?;
    let ch = params.network().channel();
    let alpha = ch.alpha();
    let two = T::lit(2.0);
    let nu = (T::one() - p_b) * r;
    let pi = T::PI();
    let exponent = two * params.lambda() * ch.area_scale() * nu * nu * pi * pi * ((alpha - two) / alpha)
        / (T::TAU() / alpha).sin();
    Ok(Clamped::new(T::one() - (T::one() - p_b) * exponent.exp()))
}

pub fn evaluate_csma<T: Real>(params: &CsmaParams<T>, spec: &QuadratureSpec<T>) -> Result<CsmaResult<T>> {
    let one = T::one();
    let backoff = backoff_probability(params)?;
    let Backoff { p_b, branch, r, .. } = backoff;
    let fail = failure_probability(params, p_b, r, spec)?;
    let p_out_raw = p_b + (one - p_b) * fail.value;
    let p_out = Clamped::new(p_out_raw);
    let bound = fkg_bound(p_b, params.packet_len());
    let rate = params.network().channel().derive().rate;
    let result = CsmaResult {
        p_b,
        branch,
        r,
        p_fail_given_no_backoff: fail.value,
        p_out: p_out.value,
        fkg_bound: bound,
        capacity: params.lambda() * (one - p_out.value) * rate,
        clamp_events: u32::from(fail.clamped) + u32::from(p_out.clamped),
    };
    check_invariants(params, &result)?;
    Ok(result)
}

/// Residual of the back-off fixed point, `p_b - (1 - exp(-λ(1-p_b) r / λ_max))`.
pub fn fixed_point_residual<T: Real>(params: &CsmaParams<T>, p_b: T) -> T {
    let one = T::one();
    let r = (params.p() / (one - p_b)).min(one);
    let activity = (one - p_b) * r;
    p_b + (-params.lambda() * activity / params.lambda_max()).exp_m1()
}

fn check_invariants<T: Real>(params: &CsmaParams<T>, res: &CsmaResult<T>) -> Result<()> {
    let one = T::one();
    let tol = T::tol(1e-10);
    let residual = fixed_point_residual(params, res.p_b);
    if residual.abs() > tol {
        return Err(Error::InvariantViolation(format!("back-off fixed-point residual {residual}")));
    }
    let p = params.p();
    let consistent = match res.branch {
        BackoffBranch::HighEnergy => res.p_b <= one - p + tol,
        BackoffBranch::EnergyLimited => one - res.p_b <= p + tol && res.r == one,
    };
    if !consistent {
        return Err(Error::InvariantViolation(format!(
            "{} branch with p_b = {} and p = {p}",
            res.branch, res.p_b
        )));
    }
    if res.p_out > res.fkg_bound + T::tol(1e-9) {
        return Err(Error::InvariantViolation(format!(
            "p_out {} above FKG bound {}",
            res.p_out, res.fkg_bound
        )));
    }
    Ok(())
}
