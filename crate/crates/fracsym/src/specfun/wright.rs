//! Generalized Wright function pΨq and its convergence classification.
//!
//! pΨq[z] = Σ_k ΠΓ(aᵢ + αᵢk) / ΠΓ(bⱼ + βⱼk) · z^k / k!,
//! absolutely convergent everywhere when Δ = Σβⱼ − Σαᵢ > −1 and on
//! |z| < Π|αᵢ|^{−αᵢ} Π|βⱼ|^{βⱼ} when Δ = −1.

use super::gamma::ln_gamma_sign;
use super::{check_wright_weights, ConvergenceClass, ConvergenceKind, ParamPair, SpecFunError};
use crate::sum::DoubleDouble;

const WRIGHT_MAX_TERMS: usize = 60_000;
/// Documented relative truncation bound.
const WRIGHT_TAIL_REL: f64 = 1e-12;

/// Classify convergence of pΨq with the given parameter pairs.
pub fn wright_convergence(
    upper: &[ParamPair],
    lower: &[ParamPair],
) -> Result<ConvergenceClass, SpecFunError> {
    check_wright_weights(upper)?;
    check_wright_weights(lower)?;
    let delta: f64 =
        lower.iter().map(|p| p.weight).sum::<f64>() - upper.iter().map(|p| p.weight).sum::<f64>();
    let kind = if delta > -1.0 {
        ConvergenceKind::Everywhere
    } else if delta == -1.0 {
        let mut ln_r = 0.0;
        for p in upper {
            ln_r -= p.weight * p.weight.abs().ln();
        }
        for p in lower {
            ln_r += p.weight * p.weight.abs().ln();
        }
        ConvergenceKind::Disk { radius: ln_r.exp() }
    } else {
        ConvergenceKind::Divergent
    };
    Ok(ConvergenceClass { kind, exponent: delta })
}

/// Evaluate pΨq[z] by truncated series with tail bound ≤ 1e-12 relative.
pub fn wright_psi(upper: &[ParamPair], lower: &[ParamPair], z: f64) -> Result<f64, SpecFunError> {
    if !z.is_finite() {
        return Err(SpecFunError::NonFinite { name: "z" });
    }
    let class = wright_convergence(upper, lower)?;
    if z != 0.0 && !class.admits(z.abs()) {
        return Err(SpecFunError::OutsideConvergence { z, class });
    }

    let ln_abs_z = if z == 0.0 { f64::NEG_INFINITY } else { z.abs().ln() };
    let neg = z < 0.0;
    let mut acc = DoubleDouble::new();
    let mut prev_abs = 0.0f64;
    let mut ratios = [f64::INFINITY; 3];
    for k in 0..WRIGHT_MAX_TERMS {
        let term = term_value(upper, lower, k, ln_abs_z, neg)?;
        acc.add(term);
        if z == 0.0 {
            return Ok(acc.value());
        }
        let a = term.abs();
        if k > 0 && prev_abs > 0.0 {
            ratios[k % 3] = a / prev_abs;
            let r = ratios.iter().cloned().fold(0.0f64, f64::max);
            if r < 1.0 {
                let tail = a * r / (1.0 - r);
                if tail <= WRIGHT_TAIL_REL * acc.value().abs().max(f64::MIN_POSITIVE) && k > 4 {
                    return Ok(acc.value());
                }
            }
        }
        if a > 0.0 {
            prev_abs = a;
        }
    }
    Err(SpecFunError::SeriesNoConvergence {
        terms: WRIGHT_MAX_TERMS,
        tail_estimate: prev_abs,
        bound: WRIGHT_TAIL_REL * acc.value().abs(),
    })
}

fn term_value(
    upper: &[ParamPair],
    lower: &[ParamPair],
    k: usize,
    ln_abs_z: f64,
    neg: bool,
) -> Result<f64, SpecFunError> {
    let kf = k as f64;
    let mut ln = -ln_gamma_sign(kf + 1.0).expect("k+1 > 0").0;
    let mut sign = 1.0;
    for p in upper {
        let x = p.coeff + p.weight * kf;
        match ln_gamma_sign(x) {
            Some((lg, s)) => {
                ln += lg;
                sign *= s;
            }
            None => {
                return Err(SpecFunError::NumeratorGammaPole { argument: x, term: k });
            }
        }
    }
    let mut denominator_pole = false;
    for p in lower {
        let x = p.coeff + p.weight * kf;
        match ln_gamma_sign(x) {
            Some((lg, s)) => {
                ln -= lg;
                sign *= s;
            }
            None => denominator_pole = true, // 1/Γ vanishes: the term is zero
        }
    }
    if denominator_pole {
        return Ok(0.0);
    }
    let term = if k == 0 {
        sign * ln.exp()
    } else {
        sign * (ln + kf * ln_abs_z).exp() * if neg && k % 2 == 1 { -1.0 } else { 1.0 }
    };
    Ok(term)
}
