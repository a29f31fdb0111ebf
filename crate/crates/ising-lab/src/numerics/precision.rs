use rug::Float;

/// Working-precision settings shared by every floating computation.
///
/// `working_digits` is the decimal significand length; comparisons default to
/// the derived `tolerance` of `10^(-working_digits/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionContext {
    working_digits: u32,
}

pub const MIN_DIGITS: u32 = 30;
pub const DEFAULT_DIGITS: u32 = 50;

impl PrecisionContext {
    /// Panics if `digits < 30`; the engines are not calibrated below that.
    pub fn new(digits: u32) -> Self {
        assert!(digits >= MIN_DIGITS, "working_digits must be >= {MIN_DIGITS}");
        PrecisionContext { working_digits: digits }
    }

    pub fn working_digits(&self) -> u32 {
        self.working_digits
    }

    /// Binary precision handed to MPFR: digits * log2(10) plus guard bits.
    pub fn bits(&self) -> u32 {
        (self.working_digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 16
    }

    /// Default comparison epsilon, 10^(-working_digits/2).
    pub fn tolerance(&self) -> Float {
        let mut t = Float::with_val(self.bits(), 10);
        t.pow_assign(-(self.working_digits as i32) / 2);
        t
    }

    pub fn tolerance_f64(&self) -> f64 {
        10f64.powi(-(self.working_digits as i32) / 2)
    }

    pub fn float(&self, v: f64) -> Float {
        Float::with_val(self.bits(), v)
    }

    /// A context with twice the digits, used by escalation heuristics.
    pub fn escalated(&self) -> Self {
        PrecisionContext { working_digits: self.working_digits * 2 }
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext::new(DEFAULT_DIGITS)
    }
}

use rug::ops::PowAssign;
