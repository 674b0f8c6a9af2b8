//! Gauss hypergeometric series ₂F₁(A, B; C; z) on |z| < 1.

use super::SpecFunError;
use crate::sum::Compensated;

const HYP_MAX_TERMS: usize = 100_000;
const HYP_TAIL_REL: f64 = 1e-13;

/// ₂F₁(A, B; C; z) by direct series; analytic continuation is out of scope.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64, SpecFunError> {
    for (name, v) in [("A", a), ("B", b), ("C", c), ("z", z)] {
        if !v.is_finite() {
            return Err(SpecFunError::NonFinite { name: match name {
                "A" => "A",
                "B" => "B",
                "C" => "C",
                _ => "z",
            } });
        }
    }
    if c <= 0.0 && c == c.floor() {
        return Err(SpecFunError::InvalidParameter {
            name: "C",
            value: c,
            requirement: "C must not be a nonpositive integer",
        });
    }
    if z.abs() >= 1.0 {
        return Err(SpecFunError::InvalidParameter {
            name: "z",
            value: z,
            requirement: "|z| < 1 (series domain)",
        });
    }
    let mut acc = Compensated::new();
    let mut term = 1.0f64;
    acc.add(term);
    for k in 0..HYP_MAX_TERMS {
        let kf = k as f64;
        let ratio = (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        term *= ratio;
        if term == 0.0 {
            // terminating (polynomial) case
            return Ok(acc.value());
        }
        acc.add(term);
        // the term ratio tends to |z| < 1: geometric tail bound
        let r = ratio.abs().max(z.abs());
        if k > 3 && r < 1.0 {
            let tail = term.abs() * r / (1.0 - r);
            if tail <= HYP_TAIL_REL * acc.value().abs().max(f64::MIN_POSITIVE) {
                return Ok(acc.value());
            }
        }
    }
    Err(SpecFunError::SeriesNoConvergence {
        terms: HYP_MAX_TERMS,
        tail_estimate: term.abs(),
        bound: HYP_TAIL_REL * acc.value().abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unity_at_origin() {
        assert_relative_eq!(gauss_2f1(0.37, -2.1, 5.5, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn log_closed_form() {
        // 2F1(1,1;2;z) = −ln(1−z)/z
        assert_relative_eq!(
            gauss_2f1(1.0, 1.0, 2.0, 0.5).unwrap(),
            2.0 * 2.0f64.ln(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn atanh_closed_form() {
        // 2F1(1/2,1;3/2;z) = atanh(sqrt z)/sqrt z at z = 0.25
        assert_relative_eq!(
            gauss_2f1(0.5, 1.0, 1.5, 0.25).unwrap(),
            3.0f64.ln(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn binomial_closed_form() {
        // 2F1(a,b;b;z) = (1−z)^{−a}, independent of b
        for &z in &[-0.8, -0.3, 0.4, 0.9] {
            assert_relative_eq!(
                gauss_2f1(0.5, 0.5, 0.5, z).unwrap(),
                (1.0 - z).powf(-0.5),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn rejects_pole_and_domain() {
        assert!(matches!(
            gauss_2f1(1.0, 1.0, 0.0, 0.5),
            Err(SpecFunError::InvalidParameter { name: "C", .. })
        ));
        assert!(matches!(
            gauss_2f1(1.0, 1.0, -2.0, 0.5),
            Err(SpecFunError::InvalidParameter { name: "C", .. })
        ));
        assert!(matches!(
            gauss_2f1(1.0, 1.0, 2.0, 1.0),
            Err(SpecFunError::InvalidParameter { name: "z", .. })
        ));
    }

    #[test]
    fn symmetric_in_a_b() {
        for &(a, b, c, z) in &[(0.3, 2.7, 1.1, 0.77), (1.9, 0.2, 2.4, -0.88)] {
            assert_relative_eq!(
                gauss_2f1(a, b, c, z).unwrap(),
                gauss_2f1(b, a, c, z).unwrap(),
                max_relative = 1e-13
            );
        }
    }
}
