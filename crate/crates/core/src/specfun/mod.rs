//! Log-space special functions.
//!
//! Every probability that can become astronomically small is carried as its
//! natural logarithm ([`LogProb`]). Laplace's posterior tail for the Paris
//! births sits near 1e-42 and the d'Angeville tails near 1e-7, so linear
//! space would be fine for some of them, but tail scans routinely go far
//! below the smallest normal `f64`.
//!
//! All functions here are pure and thread-safe.

pub(crate) mod beta;
pub(crate) mod dist;
pub(crate) mod gamma;
pub(crate) mod hypergeom;

use serde::{Serialize, Serializer};

pub use beta::{reg_inc_beta, reg_inc_beta_complement, reg_inc_beta_pair};
pub use dist::{normal_cdf, normal_upper_tail, student_t_cdf, student_t_sf};
pub use gamma::{log_beta, log_binomial, log_gamma};
pub use hypergeom::{hypergeom_log_pmf, hypergeom_support, hypergeom_tail, TailSide};

/// Natural logarithm of a probability.
///
/// `f64::NEG_INFINITY` encodes probability zero and is propagated without
/// error.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogProb(f64);

impl LogProb {
    pub const ZERO: LogProb = LogProb(f64::NEG_INFINITY);
    pub const ONE: LogProb = LogProb(0.0);

    /// Wraps a log-probability. Values a few ulps above zero, which rounding
    /// can produce, are clamped to `ln 1`.
    pub fn from_ln(value: f64) -> Self {
        debug_assert!(value.is_nan() || value <= 1e-12, "log-probability {value} > 0");
        LogProb(value.min(0.0))
    }

    pub fn from_prob(p: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&p) || p.is_nan());
        LogProb(p.ln().min(0.0))
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn prob(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// `ln(1 - p)`, evaluated without cancellation on either side.
    pub fn complement(self) -> LogProb {
        LogProb(log1m_exp(self.0))
    }

    /// `ln(p + q)`.
    pub fn add(self, other: LogProb) -> LogProb {
        LogProb::from_ln(log_add_exp(self.0, other.0))
    }

    pub fn mul(self, other: LogProb) -> LogProb {
        LogProb(self.0 + other.0)
    }
}

impl Serialize for LogProb {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        crate::inference::serialize_real(&self.0, s)
    }
}

/// `ln(exp(a) + exp(b))`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(1 - exp(x))` for `x <= 0` (Mächler's two-branch evaluation).
pub fn log1m_exp(x: f64) -> f64 {
    if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// Running log-sum-exp over an iterator of log terms.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    terms.into_iter().fold(f64::NEG_INFINITY, log_add_exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_is_accurate_on_both_sides() {
        let tiny = LogProb::from_prob(1e-20);
        assert!((tiny.complement().ln() + 1e-20).abs() < 1e-35);
        let near_one = LogProb::from_ln(-1e-20);
        assert!((near_one.complement().ln() - (1e-20f64).ln()).abs() < 1e-12);
        assert_eq!(LogProb::ZERO.complement(), LogProb::ONE);
        assert!(LogProb::ONE.complement().is_zero());
    }

    #[test]
    fn log_sum_exp_handles_zero_terms() {
        assert_eq!(log_sum_exp([]), f64::NEG_INFINITY);
        let s = log_sum_exp([0.25f64.ln(), 0.25f64.ln(), f64::NEG_INFINITY]);
        assert!((s - 0.5f64.ln()).abs() < 1e-15);
    }
}
