//! Special functions the invariant solutions are written in: Mittag-Leffler,
//! generalized Wright, Gauss hypergeometric, and the Fox H-function evaluated
//! by Mellin-Barnes contour quadrature.
//!
//! Conventions follow the parameter-pair notation (aᵢ, αᵢ) / (bⱼ, βⱼ): each
//! pair is a coefficient together with the weight multiplying the series
//! index (Wright) or the integration variable (Fox H).

pub mod gamma;
mod foxh;
mod hyp2f1;
mod mittag_leffler;
mod wright;

pub use foxh::{fox_h, fox_h_convergence, fox_h_decay_params, fox_h_with, FoxHConfig, FoxHValue};
pub use hyp2f1::gauss_2f1;
pub use mittag_leffler::mittag_leffler;
pub use wright::{wright_convergence, wright_psi};

use std::fmt;

/// One (coefficient, weight) parameter pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamPair {
    pub coeff: f64,
    pub weight: f64,
}

impl ParamPair {
    pub const fn new(coeff: f64, weight: f64) -> Self {
        Self { coeff, weight }
    }
}

/// Shorthand for building parameter lists in tests and call sites.
pub fn pairs(items: &[(f64, f64)]) -> Vec<ParamPair> {
    items.iter().map(|&(c, w)| ParamPair::new(c, w)).collect()
}

/// Orders (m, l, p, q) of a Fox H-function H^{m,l}_{p,q}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FoxHOrders {
    pub m: usize,
    pub l: usize,
    pub p: usize,
    pub q: usize,
}

impl FoxHOrders {
    pub fn new(m: usize, l: usize, p: usize, q: usize) -> Result<Self, SpecFunError> {
        if m > q || l > p {
            return Err(SpecFunError::InvalidOrders(format!(
                "require m <= q and l <= p, got m={m}, l={l}, p={p}, q={q}"
            )));
        }
        if m == 0 && l == 0 {
            return Err(SpecFunError::InvalidOrders(
                "(m, l) = (0, 0) leaves an empty numerator".into(),
            ));
        }
        Ok(Self { m, l, p, q })
    }
}

/// Where a series or contour integral converges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConvergenceKind {
    /// Entire: converges for every finite argument.
    Everywhere,
    /// Converges on |z| < radius.
    Disk { radius: f64 },
    /// Converges on the sector |arg z| < half_angle (Mellin-Barnes case).
    Sector { half_angle: f64 },
    /// Does not converge for any nonzero argument.
    Divergent,
}

/// Convergence classification; `exponent` is the Wright Δ or the Fox ρ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceClass {
    pub kind: ConvergenceKind,
    pub exponent: f64,
}

impl ConvergenceClass {
    /// Whether a positive real argument of the given magnitude is admitted.
    pub fn admits(&self, z_abs: f64) -> bool {
        match self.kind {
            ConvergenceKind::Everywhere => true,
            ConvergenceKind::Disk { radius } => z_abs < radius,
            ConvergenceKind::Sector { .. } => true, // arg z = 0 on the positive axis
            ConvergenceKind::Divergent => false,
        }
    }
}

/// Errors from special-function evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecFunError {
    /// An input was NaN or infinite.
    NonFinite { name: &'static str },
    /// A parameter violated its stated constraint.
    InvalidParameter { name: &'static str, value: f64, requirement: &'static str },
    /// Weight constraint of a parameter pair list violated.
    InvalidWeights { usage: &'static str, weight: f64 },
    /// Bad Fox H orders.
    InvalidOrders(String),
    /// Parameter list length does not match the declared orders.
    LengthMismatch { which: &'static str, expected: usize, got: usize },
    /// Argument outside the documented evaluation range of the chosen representation.
    OutOfDocumentedRange { what: String },
    /// Argument outside the convergence domain.
    OutsideConvergence { z: f64, class: ConvergenceClass },
    /// A numerator gamma argument hit a nonpositive integer at some series term:
    /// parameter degeneracy, reported rather than silently zeroed.
    NumeratorGammaPole { argument: f64, term: usize },
    /// Series failed to meet its tail bound within the term budget.
    SeriesNoConvergence { terms: usize, tail_estimate: f64, bound: f64 },
    /// Mellin-Barnes convergence conditions (ρ > 0) violated.
    NotConvergent { rho: f64 },
    /// Left and right pole families leave no room for a vertical contour.
    ContourPinched { left_bound: f64, right_bound: f64 },
    /// Contour quadrature could not reach the requested mixed tolerance.
    QuadratureTolerance { achieved: f64, required: f64 },
}

impl fmt::Display for SpecFunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonFinite { name } => write!(f, "argument `{name}` is not finite"),
            Self::InvalidParameter { name, value, requirement } => {
                write!(f, "parameter `{name}` = {value} violates: {requirement}")
            }
            Self::InvalidWeights { usage, weight } => {
                write!(f, "invalid weight {weight} for {usage}")
            }
            Self::InvalidOrders(msg) => write!(f, "invalid Fox H orders: {msg}"),
            Self::LengthMismatch { which, expected, got } => {
                write!(f, "{which} parameter list: expected {expected} pairs, got {got}")
            }
            Self::OutOfDocumentedRange { what } => write!(f, "out of documented range: {what}"),
            Self::OutsideConvergence { z, class } => {
                write!(f, "argument {z} outside convergence domain {:?}", class.kind)
            }
            Self::NumeratorGammaPole { argument, term } => write!(
                f,
                "numerator gamma pole at argument {argument} (series term {term}): parameter degeneracy"
            ),
            Self::SeriesNoConvergence { terms, tail_estimate, bound } => write!(
                f,
                "series tail bound not met after {terms} terms (estimate {tail_estimate:e}, bound {bound:e})"
            ),
            Self::NotConvergent { rho } => {
                write!(f, "Mellin-Barnes integral not convergent: rho = {rho} <= 0")
            }
            Self::ContourPinched { left_bound, right_bound } => write!(
                f,
                "no admissible contour: left poles up to {left_bound}, right poles from {right_bound}"
            ),
            Self::QuadratureTolerance { achieved, required } => write!(
                f,
                "quadrature failed to reach tolerance: estimated error {achieved:e} > {required:e}"
            ),
        }
    }
}

impl std::error::Error for SpecFunError {}

pub(crate) fn check_wright_weights(list: &[ParamPair]) -> Result<(), SpecFunError> {
    for p in list {
        if p.weight == 0.0 || !p.weight.is_finite() {
            return Err(SpecFunError::InvalidWeights { usage: "Wright (weights must be nonzero)", weight: p.weight });
        }
    }
    Ok(())
}

pub(crate) fn check_foxh_weights(list: &[ParamPair]) -> Result<(), SpecFunError> {
    for p in list {
        if !(p.weight > 0.0) || !p.weight.is_finite() {
            return Err(SpecFunError::InvalidWeights { usage: "Fox H (weights must be strictly positive)", weight: p.weight });
        }
    }
    Ok(())
}
