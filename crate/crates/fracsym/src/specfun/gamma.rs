//! Gamma, log-gamma and related helpers for real and complex arguments.
//!
//! The Lanczos approximation (g = 7, 9 coefficients, the Godfrey/Boost table)
//! is used on the half-plane Re(z) ≥ 0.5 and extended by the reflection
//! formula elsewhere. Series code in this crate works with log-magnitudes and
//! signs so that ratios of gamma values never overflow before they are
//! combined.

use num_complex::Complex64;

/// Lanczos parameter g.
const LANCZOS_G: f64 = 7.0;

/// Lanczos series coefficients (g = 7, n = 9).
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

fn lanczos_sum_real(x: f64) -> f64 {
    let mut sum = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS[1..].iter().enumerate() {
        sum += c / (x + (i + 1) as f64);
    }
    sum
}

fn lanczos_sum_complex(z: Complex64) -> Complex64 {
    let mut sum = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS[1..].iter().enumerate() {
        sum += c / (z + (i + 1) as f64);
    }
    sum
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    if x < 0.5 {
        // reflection keeps the Lanczos argument in its accurate range
        return std::f64::consts::PI.ln() - (std::f64::consts::PI * x).sin().ln() - ln_gamma(1.0 - x);
    }
    let t = x + LANCZOS_G - 0.5;
    LN_SQRT_2PI + (x - 0.5) * t.ln() - t + lanczos_sum_real(x - 1.0).ln()
}

/// ln |Γ(x)| and the sign of Γ(x) for any non-pole real x.
///
/// Returns `None` at poles (x a nonpositive integer).
pub fn ln_gamma_sign(x: f64) -> Option<(f64, f64)> {
    if !x.is_finite() {
        return None;
    }
    if x > 0.0 {
        return Some((ln_gamma(x), 1.0));
    }
    if x == x.floor() {
        return None; // pole
    }
    // reflection: Γ(x) = π / (sin(πx) Γ(1−x))
    let s = (std::f64::consts::PI * x).sin();
    let ln = std::f64::consts::PI.ln() - s.abs().ln() - ln_gamma(1.0 - x);
    Some((ln, s.signum()))
}

/// Γ(x) for non-pole real x; f64::NAN at poles.
pub fn gamma(x: f64) -> f64 {
    match ln_gamma_sign(x) {
        Some((ln, sign)) => sign * ln.exp(),
        None => f64::NAN,
    }
}

/// 1/Γ(x); exactly 0 at poles (entire function).
pub fn recip_gamma(x: f64) -> f64 {
    match ln_gamma_sign(x) {
        Some((ln, sign)) => sign * (-ln).exp(),
        None => 0.0,
    }
}

/// ln sin(πz) for complex z, stable for large |Im z|.
///
/// The imaginary part carries an arbitrary branch multiple of 2πi; callers
/// only ever exponentiate the result, so the branch does not matter.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    use std::f64::consts::PI;
    let two_i = Complex64::new(0.0, 2.0);
    if z.im >= 0.0 {
        // sin πz = e^{iπz}(1 − e^{−2iπz}) / (2i); |e^{−2iπz}| = e^{2π im} ≥ 1…
        // factor out the dominant exponential e^{-iπz} instead.
        let w = Complex64::new(0.0, -PI) * z; // −iπz, Re = π·im ≥ 0 → dominant
        let rest = Complex64::new(1.0, 0.0) - (Complex64::new(0.0, 2.0 * PI) * z).exp();
        w + rest.ln() - (-two_i).ln()
    } else {
        let w = Complex64::new(0.0, PI) * z;
        let rest = Complex64::new(1.0, 0.0) - (Complex64::new(0.0, -2.0 * PI) * z).exp();
        w + rest.ln() - two_i.ln()
    }
}

/// ln Γ(z) for complex z (principal value up to 2πi multiples on the
/// reflected half-plane; safe to exponentiate).
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.re >= 0.5 {
        let t = z + (LANCZOS_G - 0.5);
        (z - 0.5) * t.ln() - t + LN_SQRT_2PI + (lanczos_sum_complex(z - 1.0)).ln()
    } else {
        // Γ(z) = π / (sin(πz) Γ(1−z))
        Complex64::new(std::f64::consts::PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma_complex(1.0 - z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn real_gamma_known_values() {
        assert_relative_eq!(gamma(0.5), std::f64::consts::PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma(1.0), 1.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(5.0), 24.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(2.5), 1.329_340_388_179_137, max_relative = 1e-13);
        // Γ(−0.5) = −2√π
        assert_relative_eq!(
            gamma(-0.5),
            -2.0 * std::f64::consts::PI.sqrt(),
            max_relative = 1e-13
        );
        // Γ(−1.5) = 4√π/3
        assert_relative_eq!(
            gamma(-1.5),
            4.0 * std::f64::consts::PI.sqrt() / 3.0,
            max_relative = 1e-13
        );
    }

    #[test]
    fn poles_detected() {
        assert!(ln_gamma_sign(0.0).is_none());
        assert!(ln_gamma_sign(-3.0).is_none());
        assert_eq!(recip_gamma(-2.0), 0.0);
        assert!(gamma(-1.0).is_nan());
    }

    #[test]
    fn ln_gamma_large_argument() {
        // Stirling cross-check at x = 171.5 (beyond f64 Γ overflow)
        let x: f64 = 171.5;
        let stirling = (x - 0.5) * x.ln() - x + LN_SQRT_2PI + 1.0 / (12.0 * x);
        assert_relative_eq!(ln_gamma(x), stirling, max_relative = 1e-9);
    }

    #[test]
    fn complex_matches_real_on_axis() {
        for &x in &[0.7, 1.3, 4.2, 25.0] {
            let c = ln_gamma_complex(Complex64::new(x, 0.0));
            assert_relative_eq!(c.re, ln_gamma(x), max_relative = 1e-13);
            assert!(c.im.abs() < 1e-13);
        }
    }

    #[test]
    fn complex_reflection_consistency() {
        // |Γ(it)|² = π / (t sinh(πt))
        for &t in &[0.5, 1.0, 3.0] {
            let lg = ln_gamma_complex(Complex64::new(0.0, t));
            let norm2 = (2.0 * lg.re).exp();
            let expect = std::f64::consts::PI / (t * (std::f64::consts::PI * t).sinh());
            assert_relative_eq!(norm2, expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn complex_recurrence() {
        // Γ(z+1) = zΓ(z) exercised through exp of the log
        for &(re, im) in &[(0.8, 2.0), (-1.3, 0.7), (-0.2, -5.0), (2.5, 40.0)] {
            let z = Complex64::new(re, im);
            let lhs = ln_gamma_complex(z + 1.0).exp();
            let rhs = z * ln_gamma_complex(z).exp();
            assert_relative_eq!(lhs.re, rhs.re, max_relative = 1e-11, epsilon = 1e-280);
            assert_relative_eq!(lhs.im, rhs.im, max_relative = 1e-11, epsilon = 1e-280);
        }
    }
}
