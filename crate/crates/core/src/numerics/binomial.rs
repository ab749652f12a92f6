use crate::scalar::Real;

/// `C(n, k)` as a float, by the multiplicative formula.
pub fn binomial<T: Real>(n: u32, k: u32) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut c = T::one();
    for j in 0..k {
        c = c * T::lit((n - j) as f64) / T::lit((j + 1) as f64);
    }
    c
}

/// `Σ_{ℓ=0}^{n} (-1)^ℓ C(n, ℓ) t_ℓ` with `n = terms.len() - 1`, summed with
/// Neumaier compensation.
///
/// The terms are nearly cancelling for smooth `t_ℓ`: the result is an `n`-th
/// finite difference, and the largest summand is about `C(n, n/2)` times the
/// result. Beyond `n ≈ 30` that ratio exceeds `1e8` and the sum loses most of
/// its f64 digits regardless of compensation.
pub fn alternating_binomial_sum<T: Real>(terms: &[T]) -> T {
    assert!(!terms.is_empty(), "need t_0..t_n");
    let n = (terms.len() - 1) as u32;
    let mut sum = T::zero();
    let mut comp = T::zero();
    for (ell, &t) in terms.iter().enumerate() {
        let c: T = binomial(n, ell as u32);
        let x = if ell % 2 == 0 { c * t } else { -(c * t) };
        let s = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - s) + x;
        } else {
            comp += (x - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_values() {
        assert_eq!(binomial::<f64>(5, 2), 10.0);
        assert_eq!(binomial::<f64>(17, 0), 1.0);
        assert_eq!(binomial::<f64>(3, 4), 0.0);
        assert_eq!(binomial::<f64>(30, 15), 155_117_520.0);
    }

    #[test]
    fn constant_terms_cancel() {
        assert_eq!(alternating_binomial_sum(&[1.0f64; 4]), 0.0);
    }

    #[test]
    fn geometric_terms_follow_binomial_theorem() {
        let a = 0.5f64;
        assert!((alternating_binomial_sum(&[1.0, a, a * a]) - 0.25).abs() < 1e-16);
        let terms: Vec<f64> = (0..=12).map(|l| 0.9f64.powi(l)).collect();
        assert!((alternating_binomial_sum(&terms) - 0.1f64.powi(12)).abs() < 1e-13);
    }

    #[test]
    fn direct_arithmetic() {
        assert!((alternating_binomial_sum(&[1.0f64, 0.8, 0.7]) - 0.1).abs() < 1e-15);
    }
}
