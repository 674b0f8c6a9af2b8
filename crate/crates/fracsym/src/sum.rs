//! Compensated and double-double accumulation.
//!
//! Alternating series with large intermediate terms (Mittag-Leffler and
//! Wright sums at negative argument) and the L2 residual reductions both
//! need error-free transformations; plain f64 addition loses the digits the
//! tolerances in this crate promise.

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Unevaluated sum hi + lo with |lo| ≤ ulp(hi)/2: a ~32-digit accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn add(&mut self, x: f64) {
        let (s1, e1) = two_sum(self.hi, x);
        let (s2, e2) = two_sum(self.lo, e1);
        let (hi, lo1) = two_sum(s1, s2);
        self.hi = hi;
        self.lo = lo1 + e2;
    }

    pub fn add_dd(&mut self, x: DoubleDouble) {
        self.add(x.hi);
        self.add(x.lo);
    }

    /// Product with an exact f64 factor, error O(ulp²).
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = two_sum(p, self.lo * b + e);
        Self { hi, lo }
    }

    /// Quotient by an exact f64 divisor, error O(ulp²).
    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let (p, e) = two_prod(q1, b);
        let r = (self.hi - p) - e + self.lo;
        let q2 = r / b;
        let (hi, lo) = two_sum(q1, q2);
        Self { hi, lo }
    }

    pub fn abs_value(&self) -> f64 {
        self.value().abs()
    }

    pub fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_beats_naive() {
        let xs: Vec<f64> = (0..100_000).map(|i| 0.1 + (i % 7) as f64 * 1e-9).collect();
        let mut c = Compensated::new();
        for &x in &xs {
            c.add(x);
        }
        let exact: f64 = xs.iter().map(|&x| x as f64).fold(0.0f64, |a, b| a + b);
        // reference via DD
        let mut dd = DoubleDouble::new();
        for &x in &xs {
            dd.add(x);
        }
        assert!((c.value() - dd.value()).abs() <= 1e-9 * dd.value().abs());
        let _ = exact;
    }

    #[test]
    fn double_double_cancellation() {
        // 1 + 1e-18 - 1 should survive in DD, vanish in f64
        let mut dd = DoubleDouble::new();
        dd.add(1.0);
        dd.add(1e-18);
        dd.add(-1.0);
        assert!((dd.value() - 1e-18).abs() < 1e-33);
        let naive = 1.0f64 + 1e-18 - 1.0;
        assert_eq!(naive, 0.0);
    }

    #[test]
    fn double_double_alternating_exp_series() {
        // sum (-10)^k/k! in DD beats the f64 cancellation floor by far
        let mut sum = DoubleDouble::new();
        let mut term = DoubleDouble::from_f64(1.0);
        sum.add_dd(term);
        for k in 1..200 {
            term = term.mul_f64(-10.0).div_f64(k as f64);
            sum.add_dd(term);
        }
        let rel = (sum.value() - (-10.0f64).exp()).abs() / (-10.0f64).exp();
        assert!(rel < 1e-15, "relative error {rel}");
    }
}
