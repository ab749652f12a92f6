//! Stationary occupancy of the per-transmitter energy queue.
//!
//! Each slot a unit of energy arrives with probability `p`; a transmitter
//! holding energy transmits (spending one unit) with probability `q`. The
//! queue is a birth–death chain:
//!
//! * state 0: up with `p`, otherwise stay;
//! * interior states: up with `p(1-q)`, down with `q(1-p)`;
//! * state `B` (finite battery): down with `q(1-p)`, otherwise stay. An
//!   arrival into a full battery is lost unless the slot also transmits.
//!
//! Only `r = P(E >= 1)` matters downstream, together with the unconditional
//! per-slot transmit probability `f = q·r`.

use crate::error::{Error, Result};
use crate::model::{Battery, EnergyModel};
use crate::scalar::Real;

/// Below this `|p - q|` the finite-battery closed form switches to its `p = q` limit.
///
/// The `p ≠ q` form below has no cancellation, so the switch only has to
/// avoid `0/0`; a wider window would cost accuracy, since `r` moves by about
/// `|p - q| / p` across it.
pub const EQUAL_RATE_SWITCH: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueOccupancy<T> {
    /// `P(E >= 1)`
    pub r: T,
    /// `q·r`, the probability of transmitting in a given slot
    pub effective_access: T,
}

impl<T: Real> QueueOccupancy<T> {
    fn new(r: T, q: T) -> Self {
        Self {
            r,
            effective_access: q * r,
        }
    }
}

/// Unbounded battery: `r = min(p/q, 1)`, with `r = 1` at `q = 0`.
pub fn occupancy_infinite<T: Real>(p: T, q: T) -> QueueOccupancy<T> {
    debug_assert!(p > T::zero() && p <= T::one());
    debug_assert!(q >= T::zero() && q <= T::one());
    let r = if q <= p { T::one() } else { p / q };
    // at q > p, q·(p/q) may round away from p
    let f = if q <= p { q } else { p };
    QueueOccupancy { r, effective_access: f }
}

/// Battery of capacity `capacity`, closed form.
///
/// With `ρ = p(1-q) / (q(1-p))`,
/// `r = (p/q)(1 - ρ^B) / (1 - (p/q) ρ^B)` for `p ≠ q` and `r = B/(B+1-p)` at
/// `p = q`. The `p ≠ q` form is evaluated as
/// `r = -p s / ((q - p) - p s)` with `s = ρ^B - 1 = expm1(B ln1p((p-q)/(q(1-p))))`,
/// where numerator and denominator terms share a sign, so nothing cancels
/// as `p → q`. When `ρ > 1` the same identity is applied to `ρ^{-B}` to
/// keep the exponent non-positive.
pub fn occupancy_finite<T: Real>(p: T, q: T, capacity: u32) -> QueueOccupancy<T> {
    debug_assert!(p > T::zero() && p <= T::one());
    debug_assert!(q >= T::zero() && q <= T::one());
    debug_assert!(capacity >= 1);
    let one = T::one();
    if p >= one || q == T::zero() {
        return QueueOccupancy::new(one, q);
    }
    if q == one {
        // every stored unit leaves in the slot after it arrives
        return QueueOccupancy::new(p, q);
    }
    let b = T::lit(capacity as f64);
    if (p - q).abs() < T::lit(EQUAL_RATE_SWITCH) {
        return QueueOccupancy::new(b / (b + one - p), q);
    }
    let log_rho = ((p - q) / (q * (one - p))).ln_1p();
    let r = if log_rho <= T::zero() {
        let s = (b * log_rho).exp_m1();
        -p * s / ((q - p) - p * s)
    } else {
        let t = (-b * log_rho).exp_m1();
        p * t / ((q - p) + q * t)
    };
    QueueOccupancy::new(r.min(one).max(T::zero()), q)
}

/// Direct stationary solve of the `(B+1)`-state chain, used to check [`occupancy_finite`].
///
/// Builds the transition matrix, replaces one balance equation by the
/// normalisation `Σπ = 1` and solves by Gaussian elimination with partial
/// pivoting. Returns `1 - π₀`.
pub fn occupancy_finite_oracle<T: Real>(p: T, q: T, capacity: u32) -> Result<QueueOccupancy<T>> {
    if !(p > T::zero()) {
        return Err(Error::SingularSystem("no energy ever arrives (p = 0)"));
    }
    if capacity == 0 {
        return Err(Error::InvalidParameter {
            field: "B",
            value: 0.0,
            requirement: "B >= 1",
        });
    }
    let n = capacity as usize + 1;
    let one = T::one();
    let up = p * (one - q);
    let down = q * (one - p);

    let mut trans = vec![vec![T::zero(); n]; n];
    trans[0][1] = p;
    trans[0][0] = one - p;
    for k in 1..n {
        let last = k == n - 1;
        let u = if last { T::zero() } else { up };
        trans[k][k - 1] = down;
        if !last {
            trans[k][k + 1] = u;
        }
        trans[k][k] = one - down - u;
    }

    // Balance: Σ_i π_i P[i][j] - π_j = 0, i.e. row j of (P - I)^T.
    let mut a = vec![vec![T::zero(); n + 1]; n];
    for (j, row) in a.iter_mut().enumerate() {
        for i in 0..n {
            row[i] = trans[i][j] - if i == j { one } else { T::zero() };
        }
    }
    for entry in a[n - 1].iter_mut().take(n) {
        *entry = one;
    }
    a[n - 1][n] = one;

    let pi = gauss_solve(a)?;
    Ok(QueueOccupancy::new(one - pi[0], q))
}

fn gauss_solve<T: Real>(mut a: Vec<Vec<T>>) -> Result<Vec<T>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() <= T::epsilon() * T::lit(16.0) {
            return Err(Error::SingularSystem("zero pivot"));
        }
        a.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == T::zero() {
                continue;
            }
            for k in col..=n {
                let v = a[col][k];
                a[row][k] -= factor * v;
            }
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = a[row][n];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

pub fn occupancy<T: Real>(p: T, q: T, battery: Battery) -> QueueOccupancy<T> {
    match battery {
        Battery::Unbounded => occupancy_infinite(p, q),
        Battery::Finite(b) => occupancy_finite(p, q, b),
    }
}

/// `f_B(q) = q·r_B`: nondecreasing in `q`, bounded by `min(p, q)`, equal to `p` at `q = 1`.
pub fn effective_access<T: Real>(p: T, q: T, battery: Battery) -> T {
    occupancy(p, q, battery).effective_access
}

impl<T: Real> EnergyModel<T> {
    pub fn occupancy(&self, q: T) -> QueueOccupancy<T> {
        occupancy(self.p(), q, self.battery())
    }

    pub fn effective_access(&self, q: T) -> T {
        effective_access(self.p(), q, self.battery())
    }
}
