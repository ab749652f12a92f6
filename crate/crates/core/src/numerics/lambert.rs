use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_ITER: usize = 200;

/// Principal branch of the Lambert W function: the `w >= -1` solving `w·e^w = x`.
///
/// Halley iteration seeded from a branch-point series (near `-1/e`) or
/// Winitzki's approximation, safeguarded by a bracket that is tightened on
/// every residual sign. Steps leaving the bracket fall back to bisection.
pub fn lambert_w0<T: Real>(x: T) -> Result<T> {
    let one = T::one();
    let e = T::E();
    let branch_x = -one / e;
    if x.is_nan() || x < branch_x {
        // Allow x that rounds a hair below -1/e.
        if x.is_nan() || x < branch_x - T::epsilon() * T::lit(4.0) {
            return Err(Error::LambertDomain(x.as_f64()));
        }
    }
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x == T::infinity() {
        return Ok(T::infinity());
    }

    let (mut lo, mut hi) = if x < T::zero() {
        (-one, x)
    } else if x <= e {
        (T::zero(), x)
    } else {
        (one, x.ln())
    };

    let mut w = initial_guess(x);
    if !(w >= lo && w <= hi) {
        w = (lo + hi) / T::lit(2.0);
    }

    let two = T::lit(2.0);
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        if f == T::zero() {
            return Ok(w);
        }
        if f < T::zero() {
            lo = w;
        } else {
            hi = w;
        }
        let wp1 = w + one;
        let denom = ew * wp1 - (w + two) * f / (two * wp1);
        let mut next = w - f / denom;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = (lo + hi) / two;
        }
        if (next - w).abs() <= T::epsilon() * T::lit(2.0) * next.abs().max(T::min_positive_value()) {
            return Ok(next);
        }
        if hi - lo <= T::epsilon() * hi.abs().max(lo.abs()) {
            return Ok(next);
        }
        w = next;
    }
    Ok(w)
}

fn initial_guess<T: Real>(x: T) -> T {
    let one = T::one();
    if x < T::lit(-0.25) {
        // Series in p = sqrt(2(ex + 1)) about the branch point.
        let p = (T::lit(2.0) * (T::E() * x + one)).max(T::zero()).sqrt();
        -one + p - p * p / T::lit(3.0) + T::lit(11.0 / 72.0) * p * p * p
    } else {
        let l = x.ln_1p();
        l * (one - l.ln_1p() / (T::lit(2.0) + l))
    }
}
