//! One-parameter Mittag-Leffler function on the non-positive real axis.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use crate::error::{invalid, Result};
use crate::quadrature::adaptive_gauss;

/// Below this `|x|` the power series has no cancellation worth worrying
/// about (every term is bounded by one).
const SERIES_RADIUS: f64 = 1.0;

/// `E_α(x) = Σ x^k / Γ(αk + 1)` for `x <= 0`, `0 < α <= 1`.
///
/// Uses the power series near the origin and, further out, the
/// completely-monotone integral representation
///
/// ```text
/// E_α(−s) = sin(απ)/(απ) ∫₀^∞ exp(−v^{1/α}) s / (v² + 2 v s cos(απ) + s²) dv
/// ```
pub fn mittag_leffler(alpha: f64, x: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid(format!("Mittag-Leffler order {alpha} outside (0,1]")));
    }
    if !(x <= 0.0) || !x.is_finite() {
        return Err(invalid(format!("Mittag-Leffler argument {x} must be finite and <= 0")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if alpha == 1.0 {
        return Ok(x.exp());
    }
    if -x <= SERIES_RADIUS {
        return Ok(series(alpha, x));
    }
    Ok(integral(alpha, -x))
}

fn series(alpha: f64, x: f64) -> f64 {
    let mut sum = 0.0;
    let mut power = 1.0;
    for k in 0..400 {
        let term = power / gamma(alpha * k as f64 + 1.0);
        sum += term;
        if term.abs() < 1e-17 && k > 2 {
            break;
        }
        power *= x;
    }
    sum
}

fn integral(alpha: f64, s: f64) -> f64 {
    let (sin, cos) = (alpha * PI).sin_cos();
    let f = |v: f64| (-v.powf(1.0 / alpha)).exp() * s / (v * v + 2.0 * v * s * cos + s * s);
    // exp(−v^{1/α}) < 1e-20 beyond this point
    let upper = 46.0f64.powf(alpha);
    // split at the peak of the rational factor
    let peak = (-s * cos).clamp(0.0, upper);
    let mut cuts = vec![0.0];
    if peak > 0.0 && peak < upper {
        cuts.push(peak);
    }
    cuts.push(upper);
    let total: f64 = cuts
        .windows(2)
        .map(|w| adaptive_gauss(&f, w[0], w[1], 1e-14))
        .sum();
    sin / (alpha * PI) * total
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::erf::erfc;

    #[test]
    fn special_values() {
        assert_eq!(mittag_leffler(0.3, 0.0).unwrap(), 1.0);
        assert!((mittag_leffler(1.0, -1.0).unwrap() - 0.36787944117144233).abs() < 1e-15);
        assert!((mittag_leffler(0.5, -1.0).unwrap() - 0.4275835761558070).abs() < 1e-10);
    }

    #[test]
    fn half_order_matches_erfc_identity() {
        for &s in &[0.1f64, 0.5, 0.99, 1.01, 2.0, 5.0, 9.8696, 20.0] {
            let expected = (s * s).exp() * erfc(s);
            let got = mittag_leffler(0.5, -s).unwrap();
            assert!((got - expected).abs() < 1e-10, "s = {s}: {got} vs {expected}");
        }
    }

    #[test]
    fn half_order_large_argument_asymptotics() {
        // e^{s²} erfc(s) = 1/(s√π) (1 − 1/(2s²) + 3/(4s⁴) − ...)
        let s: f64 = 100.0;
        let expected = (1.0 - 0.5 / (s * s) + 0.75 / s.powi(4)) / (s * PI.sqrt());
        assert!((mittag_leffler(0.5, -s).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn series_and_integral_agree_at_the_switch() {
        for &alpha in &[0.1, 0.3, 0.6, 0.9, 0.99] {
            let a = series(alpha, -SERIES_RADIUS);
            let b = integral(alpha, SERIES_RADIUS);
            assert!((a - b).abs() < 1e-11, "alpha = {alpha}: {a} vs {b}");
        }
    }

    #[test]
    fn rejects_out_of_domain() {
        assert!(mittag_leffler(0.5, 1.0).is_err());
        assert!(mittag_leffler(1.5, -1.0).is_err());
        assert!(mittag_leffler(0.0, -1.0).is_err());
    }
}
