//! The explicit invariant solutions for generators V₁…V₇, the similarity
//! transformation, and the classical limits at α = 1 and α = 2.
//!
//! V₁/V₂ carry a Fox H-function profile for 0 < α < 2 and a finite sum of
//! ₃Ψ₁ terms for α ≥ 2 (mutually exclusive by α). V₃…V₆ are Mittag-Leffler
//! sums, V₇ a plain power sum. All solutions factor as prefactor(ω)·profile,
//! which the verification grids exploit.

use crate::fracderiv::FracOrder;
use crate::specfun::{
    fox_h_convergence, fox_h_with, gauss_2f1, mittag_leffler, wright_psi, ConvergenceKind,
    FoxHConfig, FoxHOrders, ParamPair, SpecFunError,
};
use crate::symmetry::{self, CaseSpec, GeneratorDescriptor, GeneratorTag, SymmetryError};
use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

/// Generator tags V₁…V₇ of the worked invariant solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    V1,
    V2,
    V3,
    V4,
    V5,
    V6,
    V7,
}

impl Generator {
    /// The coefficient family the generator belongs to.
    pub fn family_case(&self) -> u8 {
        match self {
            Self::V1 => 2,
            Self::V2 => 3,
            Self::V3 => 5,
            Self::V4 => 6,
            Self::V5 => 7,
            Self::V6 | Self::V7 => 8,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "V1" | "v1" => Some(Self::V1),
            "V2" | "v2" => Some(Self::V2),
            "V3" | "v3" => Some(Self::V3),
            "V4" | "v4" => Some(Self::V4),
            "V5" | "v5" => Some(Self::V5),
            "V6" | "v6" => Some(Self::V6),
            "V7" | "v7" => Some(Self::V7),
            _ => None,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Empirically validated s-range of the H-form solutions; outside it the
/// integrand poles were not studied and evaluation is refused.
pub const H_FORM_S_RANGE: (f64, f64) = (-3.0, 1.0);

/// Margin keeping the α = 2 Wright sums inside their convergence disk:
/// 4tᵅ/ω² must stay below 4(1 − margin).
pub const WRIGHT_DISK_MARGIN: f64 = 1e-3;

/// Imaginary residue above this (relative) magnitude breaks the real-valued
/// contract of the H-quadrature.
pub const IMAG_RESIDUE_TOL: f64 = 1e-12;

/// A fully specified invariant solution.
#[derive(Debug, Clone)]
pub struct SolutionSpec {
    pub generator: Generator,
    pub order: FracOrder,
    pub s: f64,
    pub epsilon: i8,
    pub coeffs: Vec<f64>,
    pub case: CaseSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolutionError {
    Domain { what: String },
    /// (generator, α, s) combination without a classical closed form.
    Unsupported { what: String },
    /// An s value putting a Γ factor of the α = 2 closed form on a pole.
    GammaPole { name: &'static str, argument: f64 },
    /// Argument left the Wright convergence disk (α = 2 forms).
    OutsideDisk { z: f64, limit: f64 },
    CoeffCount { expected: usize, got: usize },
    CaseMismatch { generator: Generator, expected: u8, got: u8 },
    /// Nonzero imaginary residue from the H-quadrature.
    NotReal { imag: f64 },
    SpecFun(SpecFunError),
    Symmetry(SymmetryError),
}

impl fmt::Display for SolutionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Domain { what } => write!(f, "domain violation: {what}"),
            Self::Unsupported { what } => write!(f, "unsupported combination: {what}"),
            Self::GammaPole { name, argument } => {
                write!(f, "{name} is singular: gamma argument {argument} is a nonpositive integer")
            }
            Self::OutsideDisk { z, limit } => {
                write!(f, "series argument {z} outside the convergence disk (limit {limit})")
            }
            Self::CoeffCount { expected, got } => {
                write!(f, "coefficient list must have length {expected}, got {got}")
            }
            Self::CaseMismatch { generator, expected, got } => {
                write!(f, "{generator:?} belongs to case {expected}, got case {got}")
            }
            Self::NotReal { imag } => {
                write!(f, "H-quadrature left imaginary residue {imag:e} above tolerance")
            }
            Self::SpecFun(e) => write!(f, "special function: {e}"),
            Self::Symmetry(e) => write!(f, "symmetry: {e}"),
        }
    }
}

impl std::error::Error for SolutionError {}

impl From<SpecFunError> for SolutionError {
    fn from(e: SpecFunError) -> Self {
        Self::SpecFun(e)
    }
}

impl From<SymmetryError> for SolutionError {
    fn from(e: SymmetryError) -> Self {
        Self::Symmetry(e)
    }
}

impl SolutionSpec {
    pub fn new(
        generator: Generator,
        order: FracOrder,
        s: f64,
        epsilon: i8,
        coeffs: Vec<f64>,
        case: CaseSpec,
    ) -> Result<Self, SolutionError> {
        case.validate()?;
        let expected_case = generator.family_case();
        if case.case_id != expected_case {
            return Err(SolutionError::CaseMismatch { generator, expected: expected_case, got: case.case_id });
        }
        if !s.is_finite() {
            return Err(SolutionError::Domain { what: "s must be finite".into() });
        }
        if epsilon != 1 && epsilon != -1 {
            return Err(SolutionError::Domain { what: "epsilon must be +1 or -1".into() });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(SolutionError::Domain { what: "coefficients must be finite".into() });
        }
        let spec = Self { generator, order, s, epsilon, coeffs, case };
        let expected = spec.expected_coeff_len();
        if spec.coeffs.len() != expected {
            return Err(SolutionError::CoeffCount { expected, got: spec.coeffs.len() });
        }
        if spec.uses_h_form() && !(H_FORM_S_RANGE.0..=H_FORM_S_RANGE.1).contains(&s) {
            return Err(SolutionError::Unsupported {
                what: format!("H-form s = {s} outside the validated range {:?}", H_FORM_S_RANGE),
            });
        }
        Ok(spec)
    }

    /// V1/V2 with 0 < α < 2 use the single-constant H-function form.
    pub fn uses_h_form(&self) -> bool {
        matches!(self.generator, Generator::V1 | Generator::V2) && self.order.alpha() < 2.0
    }

    fn expected_coeff_len(&self) -> usize {
        if self.uses_h_form() {
            1
        } else {
            self.order.bracket() as usize
        }
    }

    /// Whether ω is admissible and no prefactor denominator vanishes there.
    pub fn omega_admissible(&self, omega: f64) -> bool {
        self.prefactor(omega).is_ok()
    }

    /// The spatial factor multiplying the time/similarity profile.
    pub fn prefactor(&self, omega: f64) -> Result<f64, SolutionError> {
        let l2 = self.case.lambda2;
        let l3 = self.case.lambda3;
        let v = match self.generator {
            Generator::V1 => {
                require_positive_omega(omega)?;
                let den = omega.ln() + l2 - 2.0;
                if den == 0.0 {
                    return Err(SolutionError::Domain { what: format!("ln w + lambda2 - 2 = 0 at omega = {omega}") });
                }
                omega.powf(self.s) / den
            }
            Generator::V2 => {
                require_positive_omega(omega)?;
                let den = l3 * omega.powf(l2) + l2 + 1.0;
                if den == 0.0 {
                    return Err(SolutionError::Domain {
                        what: format!("lambda3 w^lambda2 + lambda2 + 1 = 0 at omega = {omega}"),
                    });
                }
                omega.powf(self.s) / den
            }
            Generator::V3 => {
                let den = self.case.epsilon as f64 * (l2 * omega).exp() + 1.0;
                if den == 0.0 {
                    return Err(SolutionError::Domain {
                        what: format!("epsilon e^(lambda2 w) + 1 = 0 at omega = {omega}"),
                    });
                }
                (self.s * omega).exp() / den
            }
            Generator::V4 => {
                let den = (0.5 * l2 * omega).cos();
                if den == 0.0 {
                    return Err(SolutionError::Domain { what: format!("cos(lambda2 w / 2) = 0 at omega = {omega}") });
                }
                (self.s * omega).exp() / den
            }
            Generator::V5 => (self.epsilon as f64 * omega).exp(),
            Generator::V6 => {
                require_positive_omega(omega)?;
                (self.epsilon as f64 * omega).exp() / omega
            }
            Generator::V7 => {
                require_positive_omega(omega)?;
                1.0 / omega
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(SolutionError::Domain { what: format!("prefactor not finite at omega = {omega}") })
        }
    }

    /// Mittag-Leffler argument coefficient κ in E_{α,1+α−k}(κ tᵅ).
    fn ml_kappa(&self) -> f64 {
        match self.generator {
            Generator::V3 => self.s * (self.s - self.case.lambda2),
            Generator::V4 => 0.25 * self.case.lambda2 * self.case.lambda2 + self.s * self.s,
            Generator::V5 | Generator::V6 => 1.0,
            _ => 0.0,
        }
    }

    /// The invariant-surface generator the solution belongs to, as a linear
    /// combination of the case's basis generators.
    pub fn invariant_generator(&self) -> Result<GeneratorDescriptor, SolutionError> {
        let gens = symmetry::generators(&self.case, self.order.alpha())?;
        let pick = |tag: GeneratorTag| -> Result<GeneratorDescriptor, SolutionError> {
            gens.iter()
                .find(|g| g.tag == tag)
                .cloned()
                .ok_or_else(|| SolutionError::Unsupported { what: format!("generator {tag} missing") })
        };
        let l2 = self.case.lambda2;
        let eps = self.epsilon as f64;
        let combo = match self.generator {
            Generator::V1 => vec![(self.s + 0.5, pick(GeneratorTag::X1)?), (1.0, pick(GeneratorTag::X2)?)],
            Generator::V2 => vec![
                (self.s + 0.5 * (1.0 - l2), pick(GeneratorTag::X1)?),
                (1.0, pick(GeneratorTag::X3)?),
            ],
            Generator::V3 => vec![(self.s - 0.5 * l2, pick(GeneratorTag::X1)?), (1.0, pick(GeneratorTag::X5)?)],
            Generator::V4 => vec![(self.s, pick(GeneratorTag::X1)?), (1.0, pick(GeneratorTag::X6)?)],
            Generator::V5 => vec![(1.0, pick(GeneratorTag::X1)?), (eps, pick(GeneratorTag::X8)?)],
            Generator::V6 => vec![(1.0, pick(GeneratorTag::X1)?), (eps, pick(GeneratorTag::X9)?)],
            Generator::V7 => vec![(1.0, pick(GeneratorTag::X9)?)],
        };
        Ok(symmetry::combine(combo)?)
    }
}

fn require_positive_omega(omega: f64) -> Result<(), SolutionError> {
    if omega > 0.0 {
        Ok(())
    } else {
        Err(SolutionError::Domain { what: "omega must be positive".into() })
    }
}

/// Similarity frame of the V₁ transformation: u = prefactor·φ(z),
/// z = ω^{−2/α} t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityFrame {
    pub prefactor: f64,
    pub z: f64,
}

/// Similarity transformation of the V₁ reduction.
pub fn similarity_transform(
    order: FracOrder,
    s: f64,
    lambda2: f64,
    omega: f64,
    t: f64,
) -> Result<SimilarityFrame, SolutionError> {
    require_positive_omega(omega)?;
    let den = omega.ln() + lambda2 - 2.0;
    if den == 0.0 {
        return Err(SolutionError::Domain { what: format!("ln w + lambda2 - 2 = 0 at omega = {omega}") });
    }
    Ok(SimilarityFrame {
        prefactor: omega.powf(s) / den,
        z: omega.powf(-2.0 / order.alpha()) * t,
    })
}

/// Right side of the reduced fractional ODE:
/// s²φ + (4/α)(1/α − s) z φ′ + (4/α²) z² φ″.
pub fn reduced_ode_rhs(order: FracOrder, s: f64, z: f64, phi: f64, dphi: f64, d2phi: f64) -> f64 {
    let alpha = order.alpha();
    s * s * phi + (4.0 / alpha) * (1.0 / alpha - s) * z * dphi + (4.0 / (alpha * alpha)) * z * z * d2phi
}

/// H-function profile of the V₁/V₂ reduction as a function of the similarity
/// variable: φ(z) = H^{2,0}_{1,2}[1/(4zᵅ)] (single constant c₁ = 1).
pub fn reduced_profile(order: FracOrder, s: f64, z: f64) -> Result<f64, SolutionError> {
    if z < 0.0 {
        return Err(SolutionError::Domain { what: "z must be nonnegative".into() });
    }
    if z == 0.0 {
        return Ok(0.0); // decay limit of H at large argument
    }
    let alpha = order.alpha();
    if alpha >= 2.0 {
        return Err(SolutionError::Unsupported { what: "H-form profile needs 0 < alpha < 2".into() });
    }
    let arg = 1.0 / (4.0 * z.powf(alpha));
    h_profile_value(alpha, -s / 2.0, -s / 2.0, arg)
}

fn h_profile_value(alpha: f64, b1: f64, b2: f64, arg: f64) -> Result<f64, SolutionError> {
    let orders = FoxHOrders::new(2, 0, 1, 2).map_err(SolutionError::from)?;
    let upper = [ParamPair::new(1.0, alpha)];
    let lower = [ParamPair::new(b1, 1.0), ParamPair::new(b2, 1.0)];
    let conv = fox_h_convergence(orders, &upper, &lower)?;
    if !matches!(conv.kind, ConvergenceKind::Sector { .. }) {
        return Err(SolutionError::SpecFun(SpecFunError::NotConvergent { rho: conv.exponent }));
    }
    let v = fox_h_with(&FoxHConfig::default(), orders, &upper, &lower, arg)?;
    if v.imag_residue.abs() > IMAG_RESIDUE_TOL * v.value.abs().max(1.0) {
        return Err(SolutionError::NotReal { imag: v.imag_residue });
    }
    Ok(v.value)
}

/// Evaluate the invariant solution at (ω, t).
pub fn eval_solution(spec: &SolutionSpec, omega: f64, t: f64) -> Result<f64, SolutionError> {
    if t < 0.0 {
        return Err(SolutionError::Domain { what: "t must be nonnegative".into() });
    }
    let pre = spec.prefactor(omega)?;
    let alpha = spec.order.alpha();
    match spec.generator {
        Generator::V1 | Generator::V2 => {
            if spec.uses_h_form() {
                if t == 0.0 {
                    return Ok(0.0); // H decays at large argument; the t→0⁺ limit vanishes
                }
                let l2 = spec.case.lambda2;
                let (b1, b2) = match spec.generator {
                    Generator::V1 => (-spec.s / 2.0, -spec.s / 2.0),
                    _ => (-spec.s / 2.0, -spec.s / 2.0 + l2 / 2.0),
                };
                let arg = omega * omega / (4.0 * t.powf(alpha));
                let h = h_profile_value(alpha, b1, b2, arg)?;
                Ok(spec.coeffs[0] * pre * h)
            } else {
                wright_sum_form(spec, pre, omega, t)
            }
        }
        Generator::V3 | Generator::V4 | Generator::V5 | Generator::V6 => {
            let g = ml_time_profile(spec, t)?;
            Ok(pre * g)
        }
        Generator::V7 => {
            let g = power_time_profile(spec, t)?;
            Ok(pre * g)
        }
    }
}

/// Σ_k cₖ t^{α−k} E_{α,1+α−k}(κ tᵅ), the time profile of V₃…V₆.
fn ml_time_profile(spec: &SolutionSpec, t: f64) -> Result<f64, SolutionError> {
    let alpha = spec.order.alpha();
    let kappa = spec.ml_kappa();
    let mut acc = 0.0;
    for (idx, &ck) in spec.coeffs.iter().enumerate() {
        let k = (idx + 1) as f64;
        if ck == 0.0 {
            continue;
        }
        let tp = t.powf(alpha - k);
        if !tp.is_finite() {
            return Err(SolutionError::Domain {
                what: format!("t^(alpha-k) singular at t = {t} for k = {k}"),
            });
        }
        let e = mittag_leffler(alpha, 1.0 + alpha - k, kappa * t.powf(alpha))?;
        acc += ck * tp * e;
    }
    Ok(acc)
}

/// Σ_k cₖ t^{α−k}, the V₇ time profile.
fn power_time_profile(spec: &SolutionSpec, t: f64) -> Result<f64, SolutionError> {
    let alpha = spec.order.alpha();
    let mut acc = 0.0;
    for (idx, &ck) in spec.coeffs.iter().enumerate() {
        let k = (idx + 1) as f64;
        if ck == 0.0 {
            continue;
        }
        let tp = t.powf(alpha - k);
        if !tp.is_finite() {
            return Err(SolutionError::Domain {
                what: format!("t^(alpha-k) singular at t = {t} for k = {k}"),
            });
        }
        acc += ck * tp;
    }
    Ok(acc)
}

/// The α ≥ 2 series form of V₁/V₂ built from ₃Ψ₁ terms.
fn wright_sum_form(spec: &SolutionSpec, pre: f64, omega: f64, t: f64) -> Result<f64, SolutionError> {
    let alpha = spec.order.alpha();
    let s = spec.s;
    let l2 = spec.case.lambda2;
    let z = 4.0 * t.powf(alpha) / (omega * omega);
    if alpha == 2.0 {
        let limit = 4.0 * (1.0 - WRIGHT_DISK_MARGIN);
        if z >= limit {
            return Err(SolutionError::OutsideDisk { z, limit });
        }
    }
    // prefactor already carries ω^s / denominator; strip ω^s, apply ω^{s-2}tᵅ
    let outer = pre * omega.powf(-2.0) * t.powf(alpha);
    let mut acc = 0.0;
    for (idx, &ck) in spec.coeffs.iter().enumerate() {
        let k = (idx + 1) as f64;
        if ck == 0.0 {
            continue;
        }
        let a1 = 1.0 - k / alpha - s / 2.0;
        let a2 = match spec.generator {
            Generator::V1 => a1,
            _ => a1 + l2 / 2.0,
        };
        let upper = [
            ParamPair::new(a1, 1.0),
            ParamPair::new(a2, 1.0),
            ParamPair::new(1.0, 1.0),
        ];
        let lower = [ParamPair::new(1.0 + alpha - k, alpha)];
        let psi = wright_psi(&upper, &lower, z)?;
        let tp = t.powf(-k);
        if !tp.is_finite() {
            return Err(SolutionError::Domain {
                what: format!("t^(-k) singular at t = {t} for k = {k}"),
            });
        }
        acc += ck * omega.powf(2.0 * k / alpha) * tp * psi;
    }
    let u = outer * acc;
    if u.is_finite() {
        Ok(u)
    } else {
        Err(SolutionError::Domain { what: format!("series form not finite at (omega, t) = ({omega}, {t})") })
    }
}

/// cosh-like branch: E_{2,1}(w t²) = cosh(√w t) / cos(√−w t).
fn cosh_like(w: f64, t: f64) -> f64 {
    if w >= 0.0 {
        (w.sqrt() * t).cosh()
    } else {
        ((-w).sqrt() * t).cos()
    }
}

/// sinh-like branch: t E_{2,2}(w t²) = sinh(√w t)/√w, t, or sin(√−w t)/√−w.
fn sinh_like(w: f64, t: f64) -> f64 {
    if w > 0.0 {
        (w.sqrt() * t).sinh() / w.sqrt()
    } else if w == 0.0 {
        t
    } else {
        ((-w).sqrt() * t).sin() / (-w).sqrt()
    }
}

/// Closed-form classical value at α = 1 or α = 2, bypassing the H/Wright
/// machinery.
pub fn classical_limit(spec: &SolutionSpec, omega: f64, t: f64) -> Result<f64, SolutionError> {
    let alpha = spec.order.alpha();
    if alpha != 1.0 && alpha != 2.0 {
        return Err(SolutionError::Unsupported {
            what: format!("classical limit needs alpha in {{1, 2}}, got {alpha}"),
        });
    }
    if t < 0.0 {
        return Err(SolutionError::Domain { what: "t must be nonnegative".into() });
    }
    let s = spec.s;
    let l2 = spec.case.lambda2;
    match (spec.generator, alpha as u8) {
        (Generator::V1, 1) => {
            if s != -2.0 {
                return Err(SolutionError::Unsupported {
                    what: format!("V1 at alpha = 1 has a closed form only for s = -2, got s = {s}"),
                });
            }
            require_positive_omega(omega)?;
            if t == 0.0 {
                return Ok(0.0);
            }
            let den = omega.ln() + l2 - 2.0;
            if den == 0.0 {
                return Err(SolutionError::Domain { what: "ln w + lambda2 - 2 = 0".into() });
            }
            Ok(spec.coeffs[0] / (4.0 * den * t) * (-omega * omega / (4.0 * t)).exp())
        }
        (Generator::V2, 1) => {
            require_positive_omega(omega)?;
            let den = spec.case.lambda3 * omega.powf(l2) + l2 + 1.0;
            if den == 0.0 {
                return Err(SolutionError::Domain { what: "case-3 denominator vanishes".into() });
            }
            if t == 0.0 {
                return Ok(0.0);
            }
            let gauss = (-omega * omega / (4.0 * t)).exp();
            if s == l2 - 2.0 {
                Ok(spec.coeffs[0] * 4.0f64.powf(l2 / 2.0 - 1.0) * t.powf(l2 / 2.0 - 1.0) * gauss / den)
            } else if s == -2.0 {
                Ok(spec.coeffs[0]
                    * 4.0f64.powf(-l2 / 2.0 - 1.0)
                    * omega.powf(l2)
                    * t.powf(-l2 / 2.0 - 1.0)
                    * gauss
                    / den)
            } else {
                Err(SolutionError::Unsupported {
                    what: format!("V2 at alpha = 1 has closed forms only for s = lambda2-2 or s = -2, got {s}"),
                })
            }
        }
        (Generator::V1 | Generator::V2, 2) => classical_wave_form(spec, omega, t),
        (Generator::V3, 1) => {
            let pre = spec.prefactor(omega)?;
            Ok(spec.coeffs[0] * pre * (s * (s - l2) * t).exp())
        }
        (Generator::V3, 2) => {
            let pre = spec.prefactor(omega)?;
            let w = s * (s - l2);
            Ok(pre * (spec.coeffs[0] * sinh_like(w, t) + spec.coeffs[1] * cosh_like(w, t)))
        }
        (Generator::V4, 1) => {
            let pre = spec.prefactor(omega)?;
            Ok(spec.coeffs[0] * pre * ((0.25 * l2 * l2 + s * s) * t).exp())
        }
        (Generator::V4, 2) => {
            let pre = spec.prefactor(omega)?;
            let w = 0.25 * l2 * l2 + s * s;
            Ok(pre * (spec.coeffs[0] * sinh_like(w, t) + spec.coeffs[1] * cosh_like(w, t)))
        }
        (Generator::V5 | Generator::V6, 1) => {
            let pre = spec.prefactor(omega)?;
            Ok(spec.coeffs[0] * pre * t.exp())
        }
        (Generator::V5 | Generator::V6, 2) => {
            let pre = spec.prefactor(omega)?;
            Ok(pre * (spec.coeffs[0] * t.sinh() + spec.coeffs[1] * t.cosh()))
        }
        (Generator::V7, _) => {
            let pre = spec.prefactor(omega)?;
            Ok(pre * power_time_profile(spec, t)?)
        }
        _ => unreachable!("alpha restricted to 1 or 2"),
    }
}

/// The α = 2 hypergeometric form of V₁/V₂ (valid for t²/ω² < 1).
fn classical_wave_form(spec: &SolutionSpec, omega: f64, t: f64) -> Result<f64, SolutionError> {
    use crate::specfun::gamma::{gamma, ln_gamma_sign};
    require_positive_omega(omega)?;
    let s = spec.s;
    let l2 = spec.case.lambda2;
    let den = match spec.generator {
        Generator::V1 => omega.ln() + l2 - 2.0,
        _ => spec.case.lambda3 * omega.powf(l2) + l2 + 1.0,
    };
    if den == 0.0 {
        return Err(SolutionError::Domain { what: "prefactor denominator vanishes".into() });
    }
    let ratio = t * t / (omega * omega);
    if ratio >= 1.0 {
        return Err(SolutionError::Domain {
            what: format!("t^2/omega^2 = {ratio} >= 1 leaves the 2F1 domain"),
        });
    }
    let shift = match spec.generator {
        Generator::V1 => 0.0,
        _ => l2 / 2.0,
    };
    let mut u = 0.0;
    // k = 1 term: Γ((1−s)/2)Γ((1−s)/2+shift) ω^{s−1} t · 2F1(·, ·; 3/2; ratio)
    if spec.coeffs[0] != 0.0 {
        let a = 0.5 * (1.0 - s);
        for (name, arg) in [("Gamma((1-s)/2)", a), ("Gamma((1-s)/2+lambda2/2)", a + shift)] {
            if ln_gamma_sign(arg).is_none() {
                return Err(SolutionError::GammaPole { name: leak_name(name), argument: arg });
            }
        }
        let f = gauss_2f1(a, a + shift, 1.5, ratio)?;
        u += spec.coeffs[0] * gamma(a) * gamma(a + shift) * omega.powf(s - 1.0) * t * f / den;
    }
    // k = 2 term: Γ(−s/2)Γ(−s/2+shift) ω^s · 2F1(·, ·; 1/2; ratio)
    if spec.coeffs[1] != 0.0 {
        let a = -0.5 * s;
        for (name, arg) in [("Gamma(-s/2)", a), ("Gamma(-s/2+lambda2/2)", a + shift)] {
            if ln_gamma_sign(arg).is_none() {
                return Err(SolutionError::GammaPole { name: leak_name(name), argument: arg });
            }
        }
        let f = gauss_2f1(a, a + shift, 0.5, ratio)?;
        u += spec.coeffs[1] * gamma(a) * gamma(a + shift) * omega.powf(s) * f / den;
    }
    Ok(u)
}

fn leak_name(name: &str) -> &'static str {
    // the small fixed set of Γ-pole labels lives for the program's duration
    Box::leak(name.to_owned().into_boxed_str())
}

/// Grid evaluation with a per-similarity-value H cache and the t = 0
/// substitution rule for singular origins.
pub struct GridSamples {
    /// Row i holds u(ωᵢ, tⱼ) for all j.
    pub values: Vec<Vec<f64>>,
    /// Whether u was singular at t = 0 and replaced by 0 there.
    pub singular_origin: bool,
}

/// Evaluate u on the product grid omegas × times. The t = 0 sample is the
/// solution's limit when finite and 0 otherwise (the replaced value is
/// flagged, and verification reports exclude a guard band around it anyway).
pub fn eval_grid(
    spec: &SolutionSpec,
    omegas: &[f64],
    times: &[f64],
) -> Result<GridSamples, SolutionError> {
    let mut singular = false;
    // separable fast path: u = prefactor(ω) · G(t)
    if !matches!(spec.generator, Generator::V1 | Generator::V2) {
        let mut profile = Vec::with_capacity(times.len());
        for &t in times {
            let g = if matches!(spec.generator, Generator::V7) {
                power_time_profile(spec, t)
            } else {
                ml_time_profile(spec, t)
            };
            match g {
                Ok(v) => profile.push(v),
                Err(SolutionError::Domain { .. }) if t == 0.0 => {
                    singular = true;
                    profile.push(0.0);
                }
                Err(e) => return Err(e),
            }
        }
        let mut values = Vec::with_capacity(omegas.len());
        for &w in omegas {
            let pre = spec.prefactor(w)?;
            values.push(profile.iter().map(|g| pre * g).collect());
        }
        return Ok(GridSamples { values, singular_origin: singular });
    }

    if spec.uses_h_form() {
        // u = c₁ prefactor(ω) H(arg), arg = ω²/4tᵅ: cache per distinct arg
        let cache: Mutex<HashMap<u64, f64>> = Mutex::new(HashMap::new());
        let alpha = spec.order.alpha();
        let (b1, b2) = match spec.generator {
            Generator::V1 => (-spec.s / 2.0, -spec.s / 2.0),
            _ => (-spec.s / 2.0, -spec.s / 2.0 + spec.case.lambda2 / 2.0),
        };
        let mut values = Vec::with_capacity(omegas.len());
        for &w in omegas {
            let pre = spec.prefactor(w)?;
            let mut row = Vec::with_capacity(times.len());
            for &t in times {
                if t == 0.0 {
                    row.push(0.0);
                    continue;
                }
                let arg = w * w / (4.0 * t.powf(alpha));
                let key = arg.to_bits();
                let cached = cache.lock().expect("cache lock").get(&key).copied();
                let h = match cached {
                    Some(h) => h,
                    None => {
                        let h = h_profile_value(alpha, b1, b2, arg)?;
                        cache.lock().expect("cache lock").insert(key, h);
                        h
                    }
                };
                row.push(spec.coeffs[0] * pre * h);
            }
            values.push(row);
        }
        return Ok(GridSamples { values, singular_origin: false });
    }

    // α ≥ 2 Wright-sum form
    let mut values = Vec::with_capacity(omegas.len());
    for &w in omegas {
        let pre = spec.prefactor(w)?;
        let mut row = Vec::with_capacity(times.len());
        for &t in times {
            match wright_sum_form(spec, pre, w, t) {
                Ok(v) => row.push(v),
                Err(SolutionError::Domain { .. }) if t == 0.0 => {
                    singular = true;
                    row.push(0.0);
                }
                Err(e) => return Err(e),
            }
        }
        values.push(row);
    }
    Ok(GridSamples { values, singular_origin: singular })
}
