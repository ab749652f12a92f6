use crate::error::{ensure, Result};
use crate::model::ChannelParams;
use crate::numerics::binomial;
use crate::scalar::Real;

// 15-point Kronrod abscissae on [-1, 1] (non-negative half) with the Kronrod
// weights and the embedded 7-point Gauss weights (odd-indexed abscissae).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 48;

/// Tolerances for [`csma_spatial_integral`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    rel_tol: T,
    truncation_radius_factor: T,
}

impl<T: Real> QuadratureSpec<T> {
    /// `rel_tol` in (0, 1); `truncation_radius_factor >= 10`, in units of `d θ^{1/α}`.
    pub fn new(rel_tol: T, truncation_radius_factor: T) -> Result<Self> {
        ensure(
            rel_tol > T::zero() && rel_tol < T::one(),
            "rel_tol",
            rel_tol.as_f64(),
            "0 < rel_tol < 1",
        )?;
        ensure(
            truncation_radius_factor >= T::lit(10.0) && truncation_radius_factor.is_finite(),
            "truncation_radius_factor",
            truncation_radius_factor.as_f64(),
            "factor >= 10",
        )?;
        Ok(Self {
            rel_tol,
            truncation_radius_factor,
        })
    }

    pub fn rel_tol(&self) -> T {
        self.rel_tol
    }

    pub fn truncation_radius_factor(&self) -> T {
        self.truncation_radius_factor
    }
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::tol(1e-8),
            truncation_radius_factor: T::lit(1e4),
        }
    }
}

fn gauss_kronrod<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = (b - a) / T::lit(2.0);
    let center = (a + b) / T::lit(2.0);
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * T::lit(x);
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * T::lit(w);
        if j % 2 == 1 {
            gauss += pair * T::lit(WG[j / 2]);
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

fn adapt<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T, whole: (T, T), abs_tol: T, depth: u32) -> T {
    let (value, err) = whole;
    if err <= abs_tol || depth >= MAX_DEPTH {
        return value;
    }
    let mid = (a + b) / T::lit(2.0);
    if mid <= a || mid >= b {
        return value;
    }
    let left = gauss_kronrod(f, a, mid);
    let right = gauss_kronrod(f, mid, b);
    let half_tol = abs_tol / T::lit(2.0);
    adapt(f, a, mid, left, half_tol, depth + 1) + adapt(f, mid, b, right, half_tol, depth + 1)
}

/// Adaptive Gauss–Kronrod (7/15) integration of `f` over `[a, b]` to absolute tolerance `abs_tol`.
pub fn integrate_adaptive<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, abs_tol: T) -> T {
    let whole = gauss_kronrod(&f, a, b);
    adapt(&f, a, b, whole, abs_tol, 0)
}

/// `∫_{R²} 1 - (1 - ν / (1 + d^α θ |x|^{-α}) ... )` in the radial form
///
/// `2π d²θ^{2/α} ∫₀^∞ u (1 - (1 - ν/(1+u^α))^ℓ) du`   (m²).
///
/// The integral runs over `[0, U]`, `U = spec.truncation_radius_factor`, on
/// decade panels; beyond `U` the integrand is expanded in `u^{-α}` and the
/// first two orders of the tail are added in closed form.
pub fn csma_spatial_integral<T: Real>(ell: u32, nu: T, channel: &ChannelParams<T>, spec: &QuadratureSpec<T>) -> T {
    assert!(nu >= T::zero() && nu <= T::one(), "nu must be a probability");
    if ell == 0 || nu == T::zero() {
        return T::zero();
    }
    let alpha = channel.alpha();
    let ell_t = T::lit(ell as f64);
    let integrand = |u: T| {
        let eps = nu / (T::one() + u.powf(alpha));
        // 1 - (1 - eps)^ell without cancellation for small eps
        -(ell_t * (-eps).ln_1p()).exp_m1() * u
    };

    let upper = spec.truncation_radius_factor();
    let mut edges = vec![T::zero()];
    let mut edge = T::one();
    while edge < upper {
        edges.push(edge);
        edge = edge * T::lit(10.0);
    }
    edges.push(upper);

    let panels: Vec<(T, T, (T, T))> = edges
        .windows(2)
        .map(|w| (w[0], w[1], gauss_kronrod(&integrand, w[0], w[1])))
        .collect();
    let rough: T = panels.iter().map(|p| p.2 .0).sum();
    let tol_each = spec.rel_tol() * rough.abs() / T::lit(2.0 * panels.len() as f64);
    let body: T = panels
        .into_iter()
        .map(|(a, b, whole)| adapt(&integrand, a, b, whole, tol_each, 0))
        .sum();

    let two = T::lit(2.0);
    let lead = upper.powf(two - alpha) / (alpha - two);
    let second = upper.powf(two - two * alpha) / (two * alpha - two);
    let pairs = binomial::<T>(ell, 2);
    let tail = ell_t * nu * (lead - second) - pairs * nu * nu * second;

    T::TAU() * channel.area_scale() * (body + tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(alpha: f64, theta: f64, d: f64) -> ChannelParams<f64> {
        ChannelParams::new(alpha, theta, d).unwrap()
    }

    #[test]
    fn zero_packet_length_or_activity_gives_zero() {
        let spec = QuadratureSpec::default();
        assert_eq!(csma_spatial_integral(0, 0.7, &ch(3.0, 1.0, 1.0), &spec), 0.0);
        assert_eq!(csma_spatial_integral(4, 0.0, &ch(3.0, 1.0, 1.0), &spec), 0.0);
    }

    #[test]
    fn single_slot_reduces_to_kappa() {
        let spec = QuadratureSpec::default();
        let i1 = csma_spatial_integral(1, 1.0, &ch(3.0, 1.0, 1.0), &spec);
        assert!(((i1 - 7.597_625_010_352_075) / i1).abs() < 1e-8);
    }

    #[test]
    fn two_slots_half_activity_matches_riemann_sum() {
        // Brute-force midpoint sum on [0, 2000] with 10^7 panels plus the
        // analytic tail; 30-digit reference value is 6.96448959282091.
        let spec = QuadratureSpec::default();
        let v = csma_spatial_integral(2, 0.5, &ch(3.0, 1.0, 1.0), &spec);
        let n = 10_000_000usize;
        let top = 2000.0;
        let h = top / n as f64;
        let mut acc = 0.0;
        for k in 0..n {
            let u = (k as f64 + 0.5) * h;
            let y = 1.0 - 0.5 / (1.0 + u * u * u);
            acc += u * (1.0 - y * y);
        }
        // leading-order tail; the next order is ~1e-14 here
        let tail = 1.0 / top;
        let brute = std::f64::consts::TAU * (acc * h + tail);
        assert!(((v - brute) / brute).abs() < 1e-6, "{v} vs {brute}");
        assert!(((v - 6.964_489_592_820_91) / v).abs() < 1e-8);
        let i1 = csma_spatial_integral(1, 0.5, &ch(3.0, 1.0, 1.0), &spec);
        assert!(v > 0.0 && v < 2.0 * i1);
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(0.0, 1e4).is_err());
        assert!(QuadratureSpec::new(1e-8, 5.0).is_err());
        assert!(QuadratureSpec::new(1e-8, 10.0).is_ok());
    }

    #[test]
    fn adaptive_integrator_on_known_integrals() {
        let v = integrate_adaptive(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-13);
        assert!((v - 2.0).abs() < 1e-12);
        let v = integrate_adaptive(|x: f64| x.sqrt(), 0.0, 1.0, 1e-12);
        assert!((v - 2.0 / 3.0).abs() < 1e-10);
    }
}
