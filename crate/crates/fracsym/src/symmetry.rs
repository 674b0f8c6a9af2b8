//! The eight classified coefficient families c̄(ω), their infinitesimal
//! generators, the ω-map normalizing the diffusion coefficient, and a
//! numerical classifier recovering the family from sampled (ω, c) data.
//!
//! Family and generator formulas are the classified results; the symbolic
//! machinery that derives them is out of scope, so generators are verified
//! numerically (invariant-surface residuals in `verify`) rather than
//! re-derived.

use crate::quad;
use std::fmt;
use std::sync::Arc;

/// One of the eight coefficient families with its parameters.
///
/// Unused parameters are ignored per case: λ₁ belongs to the ω-map for every
/// case, λ₂ to cases 2-6, λ₃ to cases 3-4, ε to case 5.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseSpec {
    pub case_id: u8,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub epsilon: i8,
}

impl CaseSpec {
    pub fn new(case_id: u8, lambda1: f64, lambda2: f64, lambda3: f64, epsilon: i8) -> Result<Self, SymmetryError> {
        let spec = Self { case_id, lambda1, lambda2, lambda3, epsilon };
        spec.validate()?;
        Ok(spec)
    }

    /// Convenience constructor for the parameter-free cases 7 and 8.
    pub fn parameter_free(case_id: u8) -> Result<Self, SymmetryError> {
        Self::new(case_id, 0.0, 0.0, 0.0, 1)
    }

    pub fn validate(&self) -> Result<(), SymmetryError> {
        if !(1..=8).contains(&self.case_id) {
            return Err(SymmetryError::InvalidCase { case_id: self.case_id, why: "case_id must be 1..8" });
        }
        if self.epsilon != 1 && self.epsilon != -1 {
            return Err(SymmetryError::InvalidCase { case_id: self.case_id, why: "epsilon must be +1 or -1" });
        }
        for (name, v) in [("lambda1", self.lambda1), ("lambda2", self.lambda2), ("lambda3", self.lambda3)] {
            if !v.is_finite() {
                return Err(SymmetryError::NonFiniteParameter { name });
            }
        }
        // Theorem side conditions
        match self.case_id {
            3 if self.lambda2 == -1.0 => Err(SymmetryError::InvalidCase { case_id: 3, why: "lambda2 must not be -1" }),
            4 | 5 | 6 if self.lambda2 == 0.0 => {
                Err(SymmetryError::InvalidCase { case_id: self.case_id, why: "lambda2 must not be 0" })
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SymmetryError {
    InvalidCase { case_id: u8, why: &'static str },
    NonFiniteParameter { name: &'static str },
    /// ω outside the case's admissible domain, or a denominator vanished.
    DomainViolation { case_id: u8, omega: f64, why: &'static str },
    /// The generic case 1 has no c̄ formula.
    GenericCaseHasNoFamily,
    /// a(x) vanishes (or changes sign) on the integration path of the ω-map.
    CoefficientVanishes { at: f64 },
    QuadratureFailed(String),
    /// classify: fewer than the required number of samples.
    TooFewSamples { got: usize, need: usize },
    /// classify: no family admits every sample point.
    NoAdmissibleFamily,
    NonFiniteSample { index: usize },
}

impl fmt::Display for SymmetryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidCase { case_id, why } => write!(f, "invalid case {case_id}: {why}"),
            Self::NonFiniteParameter { name } => write!(f, "parameter {name} is not finite"),
            Self::DomainViolation { case_id, omega, why } => {
                write!(f, "case {case_id} not defined at omega = {omega}: {why}")
            }
            Self::GenericCaseHasNoFamily => write!(f, "case 1 is generic: no family formula"),
            Self::CoefficientVanishes { at } => write!(f, "a(x) vanishes on the path near x = {at}"),
            Self::QuadratureFailed(msg) => write!(f, "omega-map quadrature failed: {msg}"),
            Self::TooFewSamples { got, need } => write!(f, "classification needs >= {need} samples, got {got}"),
            Self::NoAdmissibleFamily => write!(f, "no family admits every sample point"),
            Self::NonFiniteSample { index } => write!(f, "sample {index} is not finite"),
        }
    }
}

impl std::error::Error for SymmetryError {}

/// Whether ω lies in the case's admissible domain (denominator zeros are
/// reported by [`cbar`] itself).
pub fn omega_admissible(case_id: u8, omega: f64) -> bool {
    match case_id {
        2 | 3 | 4 | 7 | 8 => omega > 0.0,
        _ => omega.is_finite(),
    }
}

/// The family value c̄(ω) for cases 2-8.
pub fn cbar(case: &CaseSpec, omega: f64) -> Result<f64, SymmetryError> {
    case.validate()?;
    if case.case_id == 1 {
        return Err(SymmetryError::GenericCaseHasNoFamily);
    }
    if !omega_admissible(case.case_id, omega) {
        return Err(SymmetryError::DomainViolation {
            case_id: case.case_id,
            omega,
            why: "omega must be positive for this family",
        });
    }
    let l2 = case.lambda2;
    let l3 = case.lambda3;
    let eps = case.epsilon as f64;
    let v = match case.case_id {
        2 => {
            let logw = omega.ln();
            let den = omega * (logw + l2 - 2.0);
            if den == 0.0 {
                return Err(SymmetryError::DomainViolation { case_id: 2, omega, why: "ln w + lambda2 - 2 = 0" });
            }
            (logw + l2) / den
        }
        3 => {
            let pw = omega.powf(l2);
            let den = omega * (l3 * pw + l2 + 1.0);
            if den == 0.0 {
                return Err(SymmetryError::DomainViolation { case_id: 3, omega, why: "lambda3 w^lambda2 + lambda2 + 1 = 0" });
            }
            (l2 + 1.0) * (l3 * pw - l2 + 1.0) / den
        }
        4 => {
            let t = (0.5 * l2 * omega.ln() + l3).tan();
            let den = omega * (l2 * t + 1.0);
            if !t.is_finite() || den == 0.0 {
                return Err(SymmetryError::DomainViolation { case_id: 4, omega, why: "tangent pole or zero denominator" });
            }
            (l2 * l2 + 1.0) / den
        }
        5 => {
            let e = eps * (l2 * omega).exp();
            if e + 1.0 == 0.0 {
                return Err(SymmetryError::DomainViolation { case_id: 5, omega, why: "epsilon e^{lambda2 w} + 1 = 0" });
            }
            l2 * (e - 1.0) / (e + 1.0)
        }
        6 => {
            let t = (-0.5 * l2 * omega).tan();
            if !t.is_finite() {
                return Err(SymmetryError::DomainViolation { case_id: 6, omega, why: "tangent pole" });
            }
            l2 * t
        }
        7 => 0.0,
        8 => 2.0 / omega,
        _ => unreachable!("validated case_id"),
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(SymmetryError::DomainViolation { case_id: case.case_id, omega, why: "family value not finite" })
    }
}

/// ω(x) = ∫_β^x dr/a(r) + λ₁ by adaptive quadrature (relative 1e-10).
pub fn omega_map(
    a: &dyn Fn(f64) -> f64,
    beta: f64,
    lambda1: f64,
    x: f64,
) -> Result<f64, SymmetryError> {
    // a must keep one sign on the path; endpoints are cheap to check and a
    // sign change guarantees a zero in between
    let (lo, hi) = if beta <= x { (beta, x) } else { (x, beta) };
    for probe in [lo, 0.5 * (lo + hi), hi] {
        let v = a(probe);
        if v == 0.0 || !v.is_finite() {
            return Err(SymmetryError::CoefficientVanishes { at: probe });
        }
    }
    if a(lo).signum() != a(hi).signum() {
        return Err(SymmetryError::CoefficientVanishes { at: 0.5 * (lo + hi) });
    }
    match quad::integrate(&|r| 1.0 / a(r), beta, x, 1e-10) {
        Ok(v) => Ok(v + lambda1),
        Err(quad::QuadError::NonFiniteIntegrand { at }) => Err(SymmetryError::CoefficientVanishes { at }),
        Err(e) => Err(SymmetryError::QuadratureFailed(e.to_string())),
    }
}

/// b(x) = a(x)·c̄(ω(x)) + a(x)·a'(x), reconstructing the original-variable
/// equation from a classified family.
pub fn coefficient_b(
    a: &dyn Fn(f64) -> f64,
    a_prime: &dyn Fn(f64) -> f64,
    case: &CaseSpec,
    beta: f64,
    x: f64,
) -> Result<f64, SymmetryError> {
    let omega = omega_map(a, beta, case.lambda1, x)?;
    let c = cbar(case, omega)?;
    Ok(a(x) * c + a(x) * a_prime(x))
}

/// Generator tags from the classification table, plus `Combined` for linear
/// combinations assembled by callers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorTag {
    Xd,
    X1,
    X2,
    X3,
    X4,
    X5,
    X6,
    X7,
    X8,
    X9,
    Combined,
}

impl fmt::Display for GeneratorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Xd => "X_d",
            Self::X1 => "X1",
            Self::X2 => "X2",
            Self::X3 => "X3",
            Self::X4 => "X4",
            Self::X5 => "X5",
            Self::X6 => "X6",
            Self::X7 => "X7",
            Self::X8 => "X8",
            Self::X9 => "X9",
            Self::Combined => "combined",
        };
        write!(f, "{s}")
    }
}

impl GeneratorTag {
    /// Human-readable vector-field expression (λ's stay symbolic).
    pub fn formula(&self) -> &'static str {
        match self {
            Self::Xd => "d(w,t) d/du  (d an arbitrary solution)",
            Self::X1 => "u d/du",
            Self::X2 => "w d/dw + (2/alpha) t d/dt - (ln w + lambda2)/(2 (ln w + lambda2 - 2)) u d/du",
            Self::X3 => "w d/dw + (2/alpha) t d/dt - (lambda2+1)(lambda3 w^lambda2 - lambda2 + 1)/(2 (lambda3 w^lambda2 + lambda2 + 1)) u d/du",
            Self::X4 => "w d/dw + (2/alpha) t d/dt - (lambda2^2+1)/(2 (lambda2 tan(lambda2 ln(w)/2 + lambda3) + 1)) u d/du",
            Self::X5 => "d/dw - lambda2 (eps e^{lambda2 w} - 1)/(2 (eps e^{lambda2 w} + 1)) u d/du",
            Self::X6 => "d/dw - (lambda2/2) tan(-lambda2 w/2) u d/du",
            Self::X7 => "w d/dw + (2/alpha) t d/dt",
            Self::X8 => "d/dw",
            Self::X9 => "d/dw - (1/w) u d/du",
            Self::Combined => "linear combination",
        }
    }
}

/// Text form of the family c̄(ω) for cases 1-8.
pub fn family_formula(case_id: u8) -> &'static str {
    match case_id {
        1 => "any sufficiently differentiable c(w) except cases 2-8",
        2 => "(ln w + lambda2) / (w (ln w + lambda2 - 2))",
        3 => "(lambda2+1)(lambda3 w^lambda2 - lambda2 + 1) / (w (lambda3 w^lambda2 + lambda2 + 1))",
        4 => "(lambda2^2+1) / (w (lambda2 tan(lambda2 ln(w)/2 + lambda3) + 1))",
        5 => "lambda2 (eps e^{lambda2 w} - 1) / (eps e^{lambda2 w} + 1)",
        6 => "lambda2 tan(-lambda2 w / 2)",
        7 => "0",
        8 => "2/w",
        _ => "unknown case",
    }
}

type Field = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Evaluable parts of a generator X = ξ(ω)∂_ω + τ(t)∂_t + η_coef(ω)·u ∂_u.
#[derive(Clone)]
pub struct GeneratorFields {
    pub xi: Field,
    pub tau: Field,
    pub eta_coef: Field,
}

/// An infinitesimal generator; the arbitrary-solution generator X_d carries
/// no evaluable fields and stays a symbolic tag.
#[derive(Clone)]
pub struct GeneratorDescriptor {
    pub tag: GeneratorTag,
    pub fields: Option<GeneratorFields>,
}

impl fmt::Debug for GeneratorDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GeneratorDescriptor({})", self.tag)
    }
}

impl GeneratorDescriptor {
    fn symbolic(tag: GeneratorTag) -> Self {
        Self { tag, fields: None }
    }

    fn evaluable(
        tag: GeneratorTag,
        xi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        tau: impl Fn(f64) -> f64 + Send + Sync + 'static,
        eta_coef: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            tag,
            fields: Some(GeneratorFields {
                xi: Arc::new(xi),
                tau: Arc::new(tau),
                eta_coef: Arc::new(eta_coef),
            }),
        }
    }

    pub fn xi(&self, omega: f64) -> Option<f64> {
        self.fields.as_ref().map(|g| (g.xi)(omega))
    }

    pub fn tau(&self, t: f64) -> Option<f64> {
        self.fields.as_ref().map(|g| (g.tau)(t))
    }

    pub fn eta_coef(&self, omega: f64) -> Option<f64> {
        self.fields.as_ref().map(|g| (g.eta_coef)(omega))
    }
}

/// Linear combination Σ cᵢ Xᵢ of evaluable generators.
pub fn combine(terms: Vec<(f64, GeneratorDescriptor)>) -> Result<GeneratorDescriptor, SymmetryError> {
    let parts: Vec<(f64, GeneratorFields)> = terms
        .into_iter()
        .filter(|(c, _)| *c != 0.0)
        .map(|(c, d)| {
            d.fields
                .ok_or(SymmetryError::InvalidCase { case_id: 0, why: "X_d is symbolic only and cannot be combined" })
                .map(|g| (c, g))
        })
        .collect::<Result<_, _>>()?;
    let mk = |select: fn(&GeneratorFields) -> &Field| -> Field {
        let cloned: Vec<(f64, Field)> = parts.iter().map(|(c, g)| (*c, select(g).clone())).collect();
        Arc::new(move |v| cloned.iter().map(|(c, f)| c * f(v)).sum())
    };
    Ok(GeneratorDescriptor {
        tag: GeneratorTag::Combined,
        fields: Some(GeneratorFields {
            xi: mk(|g| &g.xi),
            tau: mk(|g| &g.tau),
            eta_coef: mk(|g| &g.eta_coef),
        }),
    })
}

/// The full generator list of a case. The derivative order enters through
/// τ = (2/α)t of the scaling generators; τ(0) = 0 for every generator, as the
/// fixed lower limit of the RL integral requires.
pub fn generators(case: &CaseSpec, alpha: f64) -> Result<Vec<GeneratorDescriptor>, SymmetryError> {
    case.validate()?;
    if !(alpha > 0.0) {
        return Err(SymmetryError::InvalidCase { case_id: case.case_id, why: "alpha must be positive" });
    }
    let mut out = vec![
        GeneratorDescriptor::symbolic(GeneratorTag::Xd),
        GeneratorDescriptor::evaluable(GeneratorTag::X1, |_| 0.0, |_| 0.0, |_| 1.0),
    ];
    let two_over_alpha = 2.0 / alpha;
    let scaling = |tag, case: CaseSpec| {
        GeneratorDescriptor::evaluable(
            tag,
            |w| w,
            move |t| two_over_alpha * t,
            move |w| -0.5 * w * cbar(&case, w).unwrap_or(f64::NAN),
        )
    };
    let translation = |tag, case: CaseSpec| {
        GeneratorDescriptor::evaluable(
            tag,
            |_| 1.0,
            |_| 0.0,
            move |w| -0.5 * cbar(&case, w).unwrap_or(f64::NAN),
        )
    };
    match case.case_id {
        1 => {}
        2 => out.push(scaling(GeneratorTag::X2, *case)),
        3 => out.push(scaling(GeneratorTag::X3, *case)),
        4 => out.push(scaling(GeneratorTag::X4, *case)),
        5 => out.push(translation(GeneratorTag::X5, *case)),
        6 => out.push(translation(GeneratorTag::X6, *case)),
        7 => {
            out.push(GeneratorDescriptor::evaluable(
                GeneratorTag::X7,
                |w| w,
                move |t| two_over_alpha * t,
                |_| 0.0,
            ));
            out.push(GeneratorDescriptor::evaluable(GeneratorTag::X8, |_| 1.0, |_| 0.0, |_| 0.0));
        }
        8 => {
            out.push(GeneratorDescriptor::evaluable(
                GeneratorTag::X7,
                |w| w,
                move |t| two_over_alpha * t,
                |_| 0.0,
            ));
            out.push(GeneratorDescriptor::evaluable(
                GeneratorTag::X9,
                |_| 1.0,
                |_| 0.0,
                |w| -1.0 / w,
            ));
        }
        _ => unreachable!(),
    }
    Ok(out)
}

/// One fitted family candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FittedCase {
    pub case_id: u8,
    pub lambda2: Option<f64>,
    pub lambda3: Option<f64>,
    pub epsilon: Option<i8>,
    /// Max absolute deviation over the sample points.
    pub fit_residual: f64,
}

/// Classification result: the winning case plus every sub-threshold
/// candidate (families overlap at special parameters, so ties are reported,
/// lower case id winning).
#[derive(Debug, Clone, PartialEq)]
pub struct CaseMatch {
    pub case_id: u8,
    pub lambda2: Option<f64>,
    pub lambda3: Option<f64>,
    pub epsilon: Option<i8>,
    pub fit_residual: f64,
    pub candidates: Vec<FittedCase>,
}

/// Default residual threshold separating a family match from generic case 1.
pub const CLASSIFY_THRESHOLD: f64 = 1e-6;
const MIN_SAMPLES: usize = 8;

/// Classify sampled (ω, c) data into one of the eight families.
pub fn classify(samples: &[(f64, f64)]) -> Result<CaseMatch, SymmetryError> {
    classify_with(samples, CLASSIFY_THRESHOLD)
}

/// Classify with an explicit acceptance threshold.
pub fn classify_with(samples: &[(f64, f64)], threshold: f64) -> Result<CaseMatch, SymmetryError> {
    if samples.len() < MIN_SAMPLES {
        return Err(SymmetryError::TooFewSamples { got: samples.len(), need: MIN_SAMPLES });
    }
    for (i, (w, c)) in samples.iter().enumerate() {
        if !w.is_finite() || !c.is_finite() {
            return Err(SymmetryError::NonFiniteSample { index: i });
        }
    }
    let all_positive = samples.iter().all(|&(w, _)| w > 0.0);
    if !all_positive && !samples.iter().all(|&(w, _)| w.is_finite()) {
        return Err(SymmetryError::NoAdmissibleFamily);
    }

    let mut candidates: Vec<FittedCase> = Vec::new();

    // Parameter-free families first: an exact hit short-circuits the fits.
    if all_positive {
        let r7 = samples.iter().map(|&(_, c)| c.abs()).fold(0.0f64, f64::max);
        let r8 = samples.iter().map(|&(w, c)| (c - 2.0 / w).abs()).fold(0.0f64, f64::max);
        for (id, r) in [(7u8, r7), (8u8, r8)] {
            if r <= threshold {
                candidates.push(FittedCase { case_id: id, lambda2: None, lambda3: None, epsilon: None, fit_residual: r });
            }
        }
        let strict = threshold.min(1e-9);
        if candidates.iter().any(|c| c.fit_residual <= strict) {
            candidates.sort_by(|a, b| a.case_id.cmp(&b.case_id));
            let best = candidates.iter().min_by(|a, b| a.fit_residual.total_cmp(&b.fit_residual)).copied().unwrap();
            return Ok(finish(best, candidates));
        }
    }

    // Parameterized families 2..6 by damped least squares with multistart.
    for case_id in 2u8..=6 {
        if matches!(case_id, 2 | 3 | 4) && !all_positive {
            continue;
        }
        if let Some(fit) = fit_case(case_id, samples) {
            if fit.fit_residual <= threshold {
                candidates.push(fit);
            }
        }
    }

    candidates.sort_by(|a, b| a.case_id.cmp(&b.case_id));
    if candidates.is_empty() {
        return Ok(CaseMatch {
            case_id: 1,
            lambda2: None,
            lambda3: None,
            epsilon: None,
            fit_residual: f64::INFINITY,
            candidates,
        });
    }
    // ties below threshold: the lower case id wins, every candidate reported
    let best = candidates[0];
    Ok(finish(best, candidates))
}

fn finish(best: FittedCase, candidates: Vec<FittedCase>) -> CaseMatch {
    CaseMatch {
        case_id: best.case_id,
        lambda2: best.lambda2,
        lambda3: best.lambda3,
        epsilon: best.epsilon,
        fit_residual: best.fit_residual,
        candidates,
    }
}

/// Model value of a parameterized family for the fitter; NaN when outside the
/// domain so that bad parameter regions are rejected by the residual.
fn model(case_id: u8, p: &[f64], epsilon: i8, omega: f64) -> f64 {
    let spec = CaseSpec {
        case_id,
        lambda1: 0.0,
        lambda2: p[0],
        lambda3: if p.len() > 1 { p[1] } else { 0.0 },
        epsilon,
    };
    match cbar(&spec, omega) {
        Ok(v) => v,
        Err(_) => f64::NAN,
    }
}

fn max_abs_residual(case_id: u8, p: &[f64], epsilon: i8, samples: &[(f64, f64)]) -> f64 {
    samples
        .iter()
        .map(|&(w, c)| {
            let m = model(case_id, p, epsilon, w);
            if m.is_finite() {
                (m - c).abs()
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0f64, f64::max)
}

fn fit_case(case_id: u8, samples: &[(f64, f64)]) -> Option<FittedCase> {
    let lambda2_grid: &[f64] = &[-4.0, -3.0, -2.0, -1.5, -1.0, -0.5, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0];
    let lambda3_grid: &[f64] = &[-2.0, -1.0, -0.3, 0.0, 0.3, 1.0, 2.0];
    let n_params: usize = if matches!(case_id, 3 | 4) { 2 } else { 1 };
    let epsilons: &[i8] = if case_id == 5 { &[1, -1] } else { &[1] };

    let mut best: Option<(Vec<f64>, i8, f64)> = None;
    for &eps in epsilons {
        let mut starts: Vec<Vec<f64>> = Vec::new();
        for &l2 in lambda2_grid {
            if case_id == 3 && l2 == -1.0 {
                continue;
            }
            if n_params == 2 {
                for &l3 in lambda3_grid {
                    starts.push(vec![l2, l3]);
                }
            } else {
                starts.push(vec![l2]);
            }
        }
        for start in starts {
            if let Some((p, ss)) = levenberg_marquardt(case_id, eps, start, samples) {
                let r = max_abs_residual(case_id, &p, eps, samples);
                if best.as_ref().map(|(_, _, b)| r < *b).unwrap_or(true) {
                    best = Some((p, eps, r));
                    let _ = ss;
                }
            }
        }
    }
    best.map(|(p, eps, r)| FittedCase {
        case_id,
        lambda2: Some(p[0]),
        lambda3: p.get(1).copied(),
        epsilon: if case_id == 5 { Some(eps) } else { None },
        fit_residual: r,
    })
}

/// Damped Gauss-Newton on the sum of squares; the tan/exp families are
/// multimodal in their parameters, hence the multistart caller.
fn levenberg_marquardt(
    case_id: u8,
    epsilon: i8,
    mut p: Vec<f64>,
    samples: &[(f64, f64)],
) -> Option<(Vec<f64>, f64)> {
    const MAX_ITER: usize = 120;
    const PARAM_CAP: f64 = 1e4;
    let n = p.len();
    let residuals = |p: &[f64]| -> Option<Vec<f64>> {
        let r: Vec<f64> = samples
            .iter()
            .map(|&(w, c)| model(case_id, p, epsilon, w) - c)
            .collect();
        if r.iter().all(|v| v.is_finite()) {
            Some(r)
        } else {
            None
        }
    };
    let ssq = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();

    let mut r = residuals(&p)?;
    let mut s = ssq(&r);
    let mut mu = 1e-3;
    for _ in 0..MAX_ITER {
        // central-difference Jacobian
        let mut jt_j = [[0.0f64; 2]; 2];
        let mut jt_r = [0.0f64; 2];
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
        for k in 0..n {
            let h = 1e-6 * p[k].abs().max(1.0);
            let mut pp = p.clone();
            pp[k] += h;
            let rp = residuals(&pp)?;
            pp[k] -= 2.0 * h;
            let rm = residuals(&pp)?;
            cols.push(rp.iter().zip(&rm).map(|(a, b)| (a - b) / (2.0 * h)).collect());
        }
        for i in 0..n {
            for j in 0..n {
                jt_j[i][j] = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
            }
            jt_r[i] = cols[i].iter().zip(&r).map(|(a, b)| a * b).sum();
        }
        // solve (JtJ + mu diag) delta = -Jt r  (n is 1 or 2)
        let mut improved = false;
        for _ in 0..25 {
            let delta = solve_damped(&jt_j, &jt_r, mu, n)?;
            let mut pnew = p.clone();
            for k in 0..n {
                pnew[k] += delta[k];
                if pnew[k].abs() > PARAM_CAP {
                    pnew[k] = pnew[k].signum() * PARAM_CAP;
                }
            }
            if let Some(rnew) = residuals(&pnew) {
                let snew = ssq(&rnew);
                if snew < s {
                    let step: f64 = delta.iter().map(|d| d.abs()).fold(0.0, f64::max);
                    p = pnew;
                    r = rnew;
                    s = snew;
                    mu = (mu / 3.0).max(1e-14);
                    improved = true;
                    if step < 1e-12 || s < 1e-28 {
                        return Some((p, s));
                    }
                    break;
                }
            }
            mu *= 4.0;
            if mu > 1e12 {
                return Some((p, s));
            }
        }
        if !improved {
            return Some((p, s));
        }
    }
    Some((p, s))
}

fn solve_damped(jt_j: &[[f64; 2]; 2], jt_r: &[f64; 2], mu: f64, n: usize) -> Option<Vec<f64>> {
    if n == 1 {
        let a = jt_j[0][0] * (1.0 + mu);
        if a == 0.0 {
            return None;
        }
        return Some(vec![-jt_r[0] / a]);
    }
    let a = jt_j[0][0] * (1.0 + mu);
    let d = jt_j[1][1] * (1.0 + mu);
    let b = jt_j[0][1];
    let c = jt_j[1][0];
    let det = a * d - b * c;
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some(vec![
        (-jt_r[0] * d + jt_r[1] * b) / det,
        (jt_r[0] * c - jt_r[1] * a) / det,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample_family(case: &CaseSpec, omegas: &[f64]) -> Vec<(f64, f64)> {
        omegas.iter().map(|&w| (w, cbar(case, w).unwrap())).collect()
    }

    fn omegas(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn cbar_fixed_points() {
        let c7 = CaseSpec::parameter_free(7).unwrap();
        assert_eq!(cbar(&c7, 5.0).unwrap(), 0.0);
        let c8 = CaseSpec::parameter_free(8).unwrap();
        assert_relative_eq!(cbar(&c8, 2.0).unwrap(), 1.0);
        let c5 = CaseSpec::new(5, 0.0, 1.0, 0.0, 1).unwrap();
        assert_eq!(cbar(&c5, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn cbar_case3_power_law_degeneracy() {
        // λ₃ = 0 collapses case 3 to (1-λ₂)/ω
        for &l2 in &[0.0, 2.0, -3.0] {
            let case = CaseSpec::new(3, 0.0, l2, 0.0, 1).unwrap();
            for &w in &[0.5, 1.0, 2.5] {
                assert_relative_eq!(cbar(&case, w).unwrap(), (1.0 - l2) / w, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn cbar_domain_violations() {
        let c8 = CaseSpec::parameter_free(8).unwrap();
        assert!(matches!(cbar(&c8, -1.0), Err(SymmetryError::DomainViolation { .. })));
        // case 2 pole at ln w = 2 − λ₂
        let c2 = CaseSpec::new(2, 0.0, 2.0, 0.0, 1).unwrap();
        assert!(matches!(cbar(&c2, 1.0), Err(SymmetryError::DomainViolation { .. })));
        assert!(cbar(&c2, 1.5).is_ok());
    }

    #[test]
    fn case_side_conditions() {
        assert!(CaseSpec::new(3, 0.0, -1.0, 1.0, 1).is_err());
        assert!(CaseSpec::new(4, 0.0, 0.0, 1.0, 1).is_err());
        assert!(CaseSpec::new(5, 0.0, 0.0, 0.0, 1).is_err());
        assert!(CaseSpec::new(6, 0.0, 0.0, 0.0, 1).is_err());
        assert!(CaseSpec::new(5, 0.0, 1.0, 0.0, 2).is_err());
        assert!(CaseSpec::new(9, 0.0, 0.0, 0.0, 1).is_err());
    }

    #[test]
    fn omega_map_identity_and_log() {
        let v = omega_map(&|_| 1.0, 0.0, 0.0, 3.0).unwrap();
        assert_relative_eq!(v, 3.0, max_relative = 1e-12);
        let v = omega_map(&|r| r, 1.0, 0.0, std::f64::consts::E).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-10);
        let v = omega_map(&|r| r * r, 1.0, 1.0, 2.0).unwrap();
        assert_relative_eq!(v, 1.5, max_relative = 1e-10);
    }

    #[test]
    fn omega_map_detects_vanishing_coefficient() {
        assert!(matches!(
            omega_map(&|r| r - 0.5, 0.0, 0.0, 1.0),
            Err(SymmetryError::CoefficientVanishes { .. })
        ));
    }

    #[test]
    fn coefficient_b_examples() {
        let c7 = CaseSpec::parameter_free(7).unwrap();
        let b = coefficient_b(&|_| 1.0, &|_| 0.0, &c7, 0.0, 3.0).unwrap();
        assert_eq!(b, 0.0);
        let b = coefficient_b(&|x| x, &|_| 1.0, &c7, 1.0, 4.0).unwrap();
        assert_relative_eq!(b, 4.0, max_relative = 1e-12);
        let c8 = CaseSpec::parameter_free(8).unwrap();
        let b = coefficient_b(&|_| 1.0, &|_| 0.0, &c8, 0.0, 2.0).unwrap();
        assert_relative_eq!(b, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn coefficient_b_reduces_to_cbar_for_identity_map() {
        for case_id in 2u8..=8 {
            let case = CaseSpec::new(case_id, 0.0, 1.5, 0.7, 1).unwrap();
            for &x in &[0.5, 1.0, 2.0] {
                let b = coefficient_b(&|_| 1.0, &|_| 0.0, &case, 0.0, x).unwrap();
                let c = cbar(&case, x).unwrap();
                assert_relative_eq!(b, c, max_relative = 1e-9, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn generator_lists_match_table() {
        let alpha = 1.5;
        let g7 = generators(&CaseSpec::parameter_free(7).unwrap(), alpha).unwrap();
        let tags: Vec<_> = g7.iter().map(|g| g.tag).collect();
        assert_eq!(tags, vec![GeneratorTag::Xd, GeneratorTag::X1, GeneratorTag::X7, GeneratorTag::X8]);
        let x7 = &g7[2];
        assert_relative_eq!(x7.xi(2.0).unwrap(), 2.0);
        assert_relative_eq!(x7.tau(3.0).unwrap(), 2.0 * 3.0 / alpha);
        assert_relative_eq!(x7.eta_coef(2.0).unwrap(), 0.0);
        let x8 = &g7[3];
        assert_relative_eq!(x8.xi(5.0).unwrap(), 1.0);
        assert_relative_eq!(x8.tau(5.0).unwrap(), 0.0);

        let g8 = generators(&CaseSpec::parameter_free(8).unwrap(), alpha).unwrap();
        let tags: Vec<_> = g8.iter().map(|g| g.tag).collect();
        assert_eq!(tags, vec![GeneratorTag::Xd, GeneratorTag::X1, GeneratorTag::X7, GeneratorTag::X9]);
        let x9 = &g8[3];
        assert_relative_eq!(x9.eta_coef(2.0).unwrap(), -0.5);

        // case 6, λ₂ = 1: η_coef(ω) = −(1/2) tan(−ω/2)
        let g6 = generators(&CaseSpec::new(6, 0.0, 1.0, 0.0, 1).unwrap(), alpha).unwrap();
        let x6 = &g6[2];
        assert_eq!(x6.tag, GeneratorTag::X6);
        assert_relative_eq!(x6.eta_coef(1.0).unwrap(), -0.5 * (-0.5f64).tan(), max_relative = 1e-13);
    }

    #[test]
    fn tau_vanishes_at_zero_for_all_generators() {
        for case_id in 1u8..=8 {
            let case = CaseSpec::new(case_id, 0.0, 1.5, 0.5, 1).unwrap();
            for g in generators(&case, 0.8).unwrap() {
                if let Some(tau0) = g.tau(0.0) {
                    assert_eq!(tau0, 0.0, "case {case_id} {}", g.tag);
                }
            }
        }
    }

    #[test]
    fn xd_is_symbolic_only() {
        let g = generators(&CaseSpec::parameter_free(7).unwrap(), 1.0).unwrap();
        assert!(g[0].fields.is_none());
        assert!(combine(vec![(1.0, g[0].clone())]).is_err());
    }

    #[test]
    fn combine_is_linear() {
        let g = generators(&CaseSpec::parameter_free(7).unwrap(), 2.0).unwrap();
        let combo = combine(vec![(2.0, g[1].clone()), (0.5, g[2].clone())]).unwrap();
        assert_relative_eq!(combo.xi(3.0).unwrap(), 0.5 * 3.0);
        assert_relative_eq!(combo.tau(4.0).unwrap(), 0.5 * 4.0);
        assert_relative_eq!(combo.eta_coef(1.0).unwrap(), 2.0);
    }

    #[test]
    fn classify_trivial_families() {
        let ws = omegas(1.0, 3.0, 12);
        let zero: Vec<(f64, f64)> = ws.iter().map(|&w| (w, 0.0)).collect();
        let m = classify(&zero).unwrap();
        assert_eq!(m.case_id, 7);
        assert_eq!(m.fit_residual, 0.0);

        let inv: Vec<(f64, f64)> = ws.iter().map(|&w| (w, 2.0 / w)).collect();
        let m = classify(&inv).unwrap();
        assert_eq!(m.case_id, 8);
        assert!(m.fit_residual <= 1e-12);
    }

    #[test]
    fn classify_roundtrip_case6() {
        let case = CaseSpec::new(6, 0.0, 1.0, 0.0, 1).unwrap();
        let samples = sample_family(&case, &omegas(0.1, 1.0, 12));
        let m = classify(&samples).unwrap();
        assert_eq!(m.case_id, 6);
        // λ₂ and −λ₂ generate the same family member
        assert!((m.lambda2.unwrap().abs() - 1.0).abs() <= 1e-6, "{:?}", m);
    }

    #[test]
    fn classify_too_few_samples() {
        assert!(matches!(
            classify(&[(1.0, 0.0); 5]),
            Err(SymmetryError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn classify_generic_falls_back_to_case1() {
        let ws = omegas(0.5, 2.5, 14);
        let samples: Vec<(f64, f64)> = ws.iter().map(|&w| (w, (3.0 * w).sin() + 0.3 * w)).collect();
        let m = classify(&samples).unwrap();
        assert_eq!(m.case_id, 1, "{m:?}");
    }
}
