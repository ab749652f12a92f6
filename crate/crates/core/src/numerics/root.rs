use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_ITER: usize = 400;

/// Solves `f(x) = target` for a nondecreasing `f` on `[lo, hi]` by bisection.
///
/// Returns [`Error::NotBracketed`] when `target` lies outside `[f(lo), f(hi)]`;
/// callers use that to detect roots beyond the interval. The returned point is
/// the midpoint of a bracket of width at most `tol` (or the narrowest bracket
/// representable).
pub fn find_root_increasing<T, F>(f: F, target: T, lo: T, hi: T, tol: T) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    assert!(lo < hi, "empty search interval");
    let (f_lo, f_hi) = (f(lo), f(hi));
    if !(f_lo <= target && target <= f_hi) {
        return Err(Error::NotBracketed {
            target: target.as_f64(),
            f_lo: f_lo.as_f64(),
            f_hi: f_hi.as_f64(),
        });
    }
    if f_lo == target {
        return Ok(lo);
    }
    if f_hi == target {
        return Ok(hi);
    }
    let (mut lo, mut hi) = (lo, hi);
    let two = T::lit(2.0);
    for _ in 0..MAX_ITER {
        if hi - lo <= tol {
            break;
        }
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == target {
            return Ok(mid);
        }
        if fm < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / two)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity() {
        let x = find_root_increasing(|x: f64| x, 0.5, 0.0, 1.0, 1e-14).unwrap();
        assert!((x - 0.5).abs() < 1e-14);
    }

    #[test]
    fn unit_battery_occupancy_equation() {
        // p q / (p + q - p q) = 0.23 with p = 0.5 has the algebraic root 0.115 / 0.385.
        let p = 0.5;
        let f = |q: f64| p * q / (p + q - p * q);
        let x = find_root_increasing(f, 0.23, 0.0, 1.0, 1e-14).unwrap();
        assert!((x - 0.115 / 0.385).abs() < 1e-13);
    }

    #[test]
    fn reports_unbracketed_target() {
        let p = 0.5;
        let f = |q: f64| p * q / (p + q - p * q);
        match find_root_increasing(f, 0.6, 0.0, 1.0, 1e-12) {
            Err(Error::NotBracketed { f_hi, .. }) => assert!((f_hi - 0.5).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn known_roots() {
        let cases: [(fn(f64) -> f64, f64, f64, f64, f64); 3] = [
            (|x| x * x * x, 8.0, 0.0, 5.0, 2.0),
            (|x| x.exp(), 1.0, -3.0, 3.0, 0.0),
            (|x| x.tanh(), 0.5, -1.0, 4.0, 0.5f64.atanh()),
        ];
        for (f, target, lo, hi, root) in cases {
            let tol = 1e-10;
            let x = find_root_increasing(f, target, lo, hi, tol).unwrap();
            assert!((x - root).abs() <= tol, "{x} vs {root}");
        }
    }
}
