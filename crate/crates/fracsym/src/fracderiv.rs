//! Riemann-Liouville fractional differentiation with lower limit 0:
//! the analytic power-law rule (used as an oracle) and the Grünwald-Letnikov
//! grid discretization used for residual verification.
//!
//! The GL scheme is the single discretization for every order α > 0; its
//! weights terminate for integer α, where it reduces to backward finite
//! differences.

use crate::specfun::gamma::{ln_gamma, ln_gamma_sign};
use std::fmt;

/// Derivative order α > 0 with its integer bracket n, n−1 < α ≤ n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder {
    alpha: f64,
    n: u32,
}

impl FracOrder {
    /// Build from α alone; n is the ceiling bracket.
    pub fn new(alpha: f64) -> Result<Self, FracDerivError> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(FracDerivError::InvalidOrder { alpha });
        }
        let n = alpha.ceil().max(1.0) as u32;
        Ok(Self { alpha, n })
    }

    /// Build with an explicit bracket; n must satisfy n−1 < α ≤ n.
    pub fn with_bracket(alpha: f64, n: u32) -> Result<Self, FracDerivError> {
        let auto = Self::new(alpha)?;
        if auto.n != n {
            return Err(FracDerivError::BracketMismatch { alpha, n, expected: auto.n });
        }
        Ok(auto)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn bracket(&self) -> u32 {
        self.n
    }

    pub fn is_integer(&self) -> bool {
        self.alpha == self.n as f64
    }
}

/// Uniform time grid with the first node pinned at t = 0 (the RL lower limit
/// is fixed, so every discrete operator must see the history back to 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub dt: f64,
    pub count: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, count: usize) -> Result<Self, FracDerivError> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(FracDerivError::InvalidGrid { what: "dt must be positive and finite" });
        }
        if count == 0 {
            return Err(FracDerivError::InvalidGrid { what: "count must be at least 1" });
        }
        Ok(Self { dt, count })
    }

    pub fn node(&self, j: usize) -> f64 {
        self.dt * j as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|j| self.node(j))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FracDerivError {
    InvalidOrder { alpha: f64 },
    BracketMismatch { alpha: f64, n: u32, expected: u32 },
    InvalidGrid { what: &'static str },
    /// p ≤ −1 is not integrable at the lower limit.
    PowerNotIntegrable { p: f64 },
    EmptyInput,
    NonFiniteSample { index: usize },
}

impl fmt::Display for FracDerivError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidOrder { alpha } => write!(f, "derivative order alpha = {alpha} must be positive"),
            Self::BracketMismatch { alpha, n, expected } => {
                write!(f, "n = {n} must satisfy n-1 < alpha <= n for alpha = {alpha} -> n = {expected}")
            }
            Self::InvalidGrid { what } => write!(f, "invalid time grid: {what}"),
            Self::PowerNotIntegrable { p } => {
                write!(f, "power p = {p} <= -1 is not integrable at the lower limit")
            }
            Self::EmptyInput => write!(f, "empty sample list"),
            Self::NonFiniteSample { index } => write!(f, "sample {index} is not finite"),
        }
    }
}

impl std::error::Error for FracDerivError {}

/// Generalized binomial coefficient (α choose k) by the product form
/// α(α−1)…(α−k+1)/k!. Exact zeros appear for integer α < k, matching the
/// limit of the Γ-ratio form, which is singular there.
pub fn frac_binomial(alpha: f64, k: usize) -> f64 {
    let mut c = 1.0f64;
    for i in 0..k {
        c *= (alpha - i as f64) / (i as f64 + 1.0);
    }
    c
}

/// RL derivative of t^p: Γ(p+1)/Γ(p+1−α) · t^{p−α}; exactly 0 when p+1−α is
/// a nonpositive integer (the kernel of the RL operator).
pub fn rl_derivative_power(p: f64, order: FracOrder, t: f64) -> Result<f64, FracDerivError> {
    if !(p > -1.0) {
        return Err(FracDerivError::PowerNotIntegrable { p });
    }
    let alpha = order.alpha();
    let denom_arg = p + 1.0 - alpha;
    match ln_gamma_sign(denom_arg) {
        None => Ok(0.0), // kernel: t^{alpha-k}
        Some((lg_den, sign_den)) => {
            let lg_num = ln_gamma(p + 1.0);
            Ok(sign_den * (lg_num - lg_den).exp() * t.powf(p - alpha))
        }
    }
}

/// Grünwald-Letnikov weights w₀ = 1, wₖ = wₖ₋₁ (k−1−α)/k.
pub fn gl_weights(order: FracOrder, count: usize) -> Vec<f64> {
    let alpha = order.alpha();
    let mut w = Vec::with_capacity(count);
    if count == 0 {
        return w;
    }
    w.push(1.0);
    for k in 1..count {
        let kf = k as f64;
        let prev = w[k - 1];
        w.push(prev * (kf - 1.0 - alpha) / kf);
    }
    w
}

/// GL approximation of the RL derivative on a uniform grid:
/// (Dᵅu)(tⱼ) ≈ dt^{−α} Σ_{k=0}^{j} wₖ u(tⱼ₋ₖ).
///
/// First-order accurate for smooth u with u(0) = 0; degraded near t = 0 when
/// u carries t^{α−k} singular terms (callers guard-band those nodes).
pub fn rl_derivative_grid(samples: &[f64], order: FracOrder) -> Result<Vec<f64>, FracDerivError> {
    rl_derivative_grid_dt(samples, order, 1.0)
}

/// Same as [`rl_derivative_grid`] with the grid spacing applied.
pub fn rl_derivative_grid_on(
    samples: &[f64],
    grid: TimeGrid,
    order: FracOrder,
) -> Result<Vec<f64>, FracDerivError> {
    if samples.len() != grid.count {
        return Err(FracDerivError::InvalidGrid { what: "sample count does not match grid count" });
    }
    rl_derivative_grid_dt(samples, order, grid.dt)
}

fn rl_derivative_grid_dt(
    samples: &[f64],
    order: FracOrder,
    dt: f64,
) -> Result<Vec<f64>, FracDerivError> {
    if samples.is_empty() {
        return Err(FracDerivError::EmptyInput);
    }
    if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
        return Err(FracDerivError::NonFiniteSample { index: i });
    }
    // integer alpha: the weights terminate after n+1 entries
    let weight_len = if order.is_integer() {
        (order.bracket() as usize + 1).min(samples.len())
    } else {
        samples.len()
    };
    let w = gl_weights(order, weight_len);
    let scale = dt.powf(-order.alpha());
    let out = (0..samples.len())
        .map(|j| {
            let kmax = j.min(w.len() - 1);
            let mut acc = 0.0;
            // convolve newest-to-oldest; terms are O(k^{-1-alpha}) so the sum
            // is short-memory dominated and plain summation suffices
            for k in 0..=kmax {
                acc += w[k] * samples[j - k];
            }
            acc * scale
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::gamma;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn binomial_basics() {
        assert_relative_eq!(frac_binomial(0.7, 0), 1.0);
        assert_relative_eq!(frac_binomial(0.7, 1), 0.7);
        assert_relative_eq!(frac_binomial(2.0, 3), 0.0);
        assert_relative_eq!(frac_binomial(0.5, 2), -0.125);
    }

    #[test]
    fn binomial_matches_gamma_ratio_form() {
        // (α choose n) = (−1)^{n−1} α Γ(n−α) / (Γ(1−α) Γ(n+1)) for non-integer α
        for &alpha in &[0.3, 0.5, 1.7, 2.5] {
            for n in 1..12usize {
                let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
                let reference = sign * alpha * gamma(n as f64 - alpha)
                    / (gamma(1.0 - alpha) * gamma(n as f64 + 1.0));
                assert_relative_eq!(frac_binomial(alpha, n), reference, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn power_rule_classical() {
        let order = FracOrder::new(1.0).unwrap();
        assert_relative_eq!(rl_derivative_power(2.0, order, 3.0).unwrap(), 6.0, max_relative = 1e-13);
    }

    #[test]
    fn power_rule_constant_half_derivative() {
        // D^{1/2} 1 = t^{-1/2}/Γ(1/2)
        let order = FracOrder::new(0.5).unwrap();
        assert_relative_eq!(
            rl_derivative_power(0.0, order, 1.0).unwrap(),
            0.564_189_583_547_756_3,
            max_relative = 1e-13
        );
    }

    #[test]
    fn power_rule_kernel() {
        // t^{α−1} lies in the RL kernel
        let order = FracOrder::new(0.5).unwrap();
        assert_eq!(rl_derivative_power(-0.5, order, 1.0).unwrap(), 0.0);
        // and t^{α−k} for k = 1..n at higher order
        let order = FracOrder::new(2.5).unwrap();
        for k in 1..=3 {
            let p = 2.5 - k as f64;
            assert_eq!(rl_derivative_power(p, order, 2.0).unwrap(), 0.0, "k={k}");
        }
    }

    #[test]
    fn power_rule_rejects_nonintegrable() {
        let order = FracOrder::new(0.5).unwrap();
        assert!(matches!(
            rl_derivative_power(-1.0, order, 1.0),
            Err(FracDerivError::PowerNotIntegrable { .. })
        ));
    }

    #[test]
    fn weights_integer_orders_terminate() {
        let w = gl_weights(FracOrder::new(1.0).unwrap(), 3);
        assert_eq!(w, vec![1.0, -1.0, 0.0]);
        let w = gl_weights(FracOrder::new(2.0).unwrap(), 4);
        assert_eq!(w, vec![1.0, -2.0, 1.0, 0.0]);
    }

    #[test]
    fn weights_half_order_by_hand() {
        let w = gl_weights(FracOrder::new(0.5).unwrap(), 3);
        assert_relative_eq!(w[0], 1.0);
        assert_relative_eq!(w[1], -0.5);
        assert_relative_eq!(w[2], -0.125);
    }

    #[test]
    fn weights_partial_sums_decay() {
        // Σ wₖ → 0 for 0 < α < 1; |Σ| < 0.1 by K = 10^4 at α = 0.5
        let w = gl_weights(FracOrder::new(0.5).unwrap(), 10_001);
        let sum: f64 = w.iter().sum();
        assert!(sum.abs() < 0.1, "partial sum {sum}");
        // and it matches the closed form Γ(K+1−α)/(Γ(1−α)Γ(K+1)) scale
        assert!(sum > 0.0);
    }

    #[test]
    fn grid_classical_first_derivative() {
        let grid = TimeGrid::new(1e-3, 1001).unwrap();
        let u: Vec<f64> = grid.nodes().collect();
        let d = rl_derivative_grid_on(&u, grid, FracOrder::new(1.0).unwrap()).unwrap();
        assert!((d[1000] - 1.0).abs() <= 2e-3, "got {}", d[1000]);
    }

    #[test]
    fn grid_matches_power_oracle() {
        // u = t², α = 0.5 at t = 1: Γ(3)/Γ(2.5)
        let order = FracOrder::new(0.5).unwrap();
        let grid = TimeGrid::new(1e-3, 1001).unwrap();
        let u: Vec<f64> = grid.nodes().map(|t| t * t).collect();
        let d = rl_derivative_grid_on(&u, grid, order).unwrap();
        let exact = rl_derivative_power(2.0, order, 1.0).unwrap();
        assert_relative_eq!(exact, 1.504_505_556_127_350, max_relative = 1e-12);
        assert!((d[1000] - exact).abs() < 4e-3, "got {} want {}", d[1000], exact);
    }

    #[test]
    fn grid_constant_half_derivative() {
        let order = FracOrder::new(0.5).unwrap();
        let grid = TimeGrid::new(1e-3, 1001).unwrap();
        let u = vec![1.0; 1001];
        let d = rl_derivative_grid_on(&u, grid, order).unwrap();
        let exact = rl_derivative_power(0.0, order, 1.0).unwrap();
        assert!((d[1000] - exact).abs() < 2e-3, "got {} want {}", d[1000], exact);
    }

    #[test]
    fn grid_convergence_order_for_powers() {
        // empirical order ≥ 0.8 over dt halvings for u = t^p at t = 1
        for &alpha in &[0.5, 1.5] {
            let order = FracOrder::new(alpha).unwrap();
            for &p in &[0.0, 0.5, 1.0, 2.0, alpha] {
                let mut errs = Vec::new();
                for &m in &[250usize, 500, 1000] {
                    let grid = TimeGrid::new(1.0 / m as f64, m + 1).unwrap();
                    let u: Vec<f64> = grid.nodes().map(|t| t.powf(p)).collect();
                    let d = rl_derivative_grid_on(&u, grid, order).unwrap();
                    let exact = rl_derivative_power(p, order, 1.0).unwrap();
                    errs.push((d[m] - exact).abs().max(1e-16));
                }
                let rate = (errs[0] / errs[2]).ln() / 4.0f64.ln();
                assert!(rate >= 0.8, "alpha={alpha} p={p}: errors {errs:?} rate {rate}");
            }
        }
    }

    #[test]
    fn integer_order_reduces_to_backward_differences() {
        // GL weights terminate for integer α, so the operator must equal the
        // plain backward-difference formulas to the last bit
        let grid = TimeGrid::new(0.02, 64).unwrap();
        let u: Vec<f64> = grid.nodes().map(|t| (2.0 * t).sin() + t * t).collect();
        let d1 = rl_derivative_grid_on(&u, grid, FracOrder::new(1.0).unwrap()).unwrap();
        let d2 = rl_derivative_grid_on(&u, grid, FracOrder::new(2.0).unwrap()).unwrap();
        for j in 2..grid.count {
            let b1 = (u[j] - u[j - 1]) / grid.dt;
            let b2 = (u[j] - 2.0 * u[j - 1] + u[j - 2]) / (grid.dt * grid.dt);
            assert_relative_eq!(d1[j], b1, max_relative = 1e-12, epsilon = 1e-12);
            assert_relative_eq!(d2[j], b2, max_relative = 1e-12, epsilon = 1e-9);
        }
    }

    #[test]
    fn grid_agrees_with_integral_oracle_on_smooth_input() {
        // independent route: direct numeric evaluation of the defining
        // integral, for a non-power smooth function
        let order = FracOrder::new(0.7).unwrap();
        let u = |t: f64| (1.5 * t).sin() + 0.3;
        let grid = TimeGrid::new(5e-4, 2001).unwrap();
        let samples: Vec<f64> = grid.nodes().map(u).collect();
        let d = rl_derivative_grid_on(&samples, grid, order).unwrap();
        let reference = crate::oracle::rl_derivative_integral(&u, order, 1.0).unwrap();
        assert!(
            (d[2000] - reference).abs() <= 5e-3 * reference.abs().max(1.0),
            "grid {} vs integral oracle {}",
            d[2000],
            reference
        );
    }

    #[test]
    fn grid_rejects_bad_input() {
        let order = FracOrder::new(0.5).unwrap();
        assert!(matches!(rl_derivative_grid(&[], order), Err(FracDerivError::EmptyInput)));
        assert!(matches!(
            rl_derivative_grid(&[1.0, f64::NAN], order),
            Err(FracDerivError::NonFiniteSample { index: 1 })
        ));
        let grid = TimeGrid::new(0.1, 3).unwrap();
        assert!(matches!(
            rl_derivative_grid_on(&[1.0, 2.0], grid, order),
            Err(FracDerivError::InvalidGrid { .. })
        ));
    }

    #[test]
    fn bracket_validation() {
        assert_eq!(FracOrder::new(2.5).unwrap().bracket(), 3);
        assert_eq!(FracOrder::new(2.0).unwrap().bracket(), 2);
        assert!(FracOrder::with_bracket(2.5, 2).is_err());
        assert!(FracOrder::with_bracket(2.5, 3).is_ok());
        assert!(FracOrder::new(0.0).is_err());
        assert!(FracOrder::new(-1.0).is_err());
    }

    proptest! {
        #[test]
        fn grid_operator_is_linear(
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
            alpha in 0.25f64..2.75,
        ) {
            let order = FracOrder::new(alpha).unwrap();
            let grid = TimeGrid::new(0.01, 64).unwrap();
            let u: Vec<f64> = grid.nodes().map(|t| (1.3 * t).sin()).collect();
            let v: Vec<f64> = grid.nodes().map(|t| t * t + 0.5).collect();
            let combo: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
            let du = rl_derivative_grid_on(&u, grid, order).unwrap();
            let dv = rl_derivative_grid_on(&v, grid, order).unwrap();
            let dc = rl_derivative_grid_on(&combo, grid, order).unwrap();
            // roundoff scales with the operator's internal magnitude
            // dt^{-alpha} Σ|w| max|u|, not with the (cancelled) result
            let umax = u.iter().chain(&v).fold(0.0f64, |m, &x| m.max(x.abs()));
            let wl1: f64 = gl_weights(order, grid.count).iter().map(|w| w.abs()).sum();
            let gross = grid.dt.powf(-alpha) * wl1 * umax * (a.abs() + b.abs() + 1.0);
            for j in 0..grid.count {
                let lin = a * du[j] + b * dv[j];
                prop_assert!((dc[j] - lin).abs() <= 1e-13 * gross.max(1.0));
            }
        }
    }
}
