use serde::{Deserialize, Serialize};

use super::gamma::ln_binomial;
use super::{log_add_exp, LogProb};
use crate::error::{Error, Result};

/// Which end of the hypergeometric distribution a tail collects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailSide {
    /// `P(X >= x)`
    Ge,
    /// `P(X <= x)`
    Le,
}

/// Support `[max(0, n+K-N), min(n, K)]` of the intersection size of a
/// `K`-subset and an `n`-subset of `N` items.
pub fn hypergeom_support(population: u64, successes: u64, draws: u64) -> Result<(u64, u64)> {
    check(population, successes, draws)?;
    let lo = (draws + successes).saturating_sub(population);
    let hi = draws.min(successes);
    Ok((lo, hi))
}

fn check(population: u64, successes: u64, draws: u64) -> Result<()> {
    if successes > population || draws > population {
        return Err(Error::domain(format!(
            "hypergeometric parameters inconsistent: N = {population}, K = {successes}, n = {draws}"
        )));
    }
    Ok(())
}

/// `ln P(X = k)` for `X ~ Hypergeometric(N, K, n)`; log-zero outside the
/// support.
pub fn hypergeom_log_pmf(population: u64, successes: u64, draws: u64, k: i64) -> Result<LogProb> {
    let (lo, hi) = hypergeom_support(population, successes, draws)?;
    if k < lo as i64 || k > hi as i64 {
        return Ok(LogProb::ZERO);
    }
    Ok(LogProb::from_ln(ln_pmf(population, successes, draws, k as u64)))
}

fn ln_pmf(population: u64, successes: u64, draws: u64, k: u64) -> f64 {
    ln_binomial(successes, k) + ln_binomial(population - successes, draws - k)
        - ln_binomial(population, draws)
}

/// `ln P(X >= x)` or `ln P(X <= x)`.
///
/// Terms are accumulated with log-sum-exp starting at the far end of the
/// requested tail, so the smallest terms are added first. `x` may lie
/// anywhere on the integer line; tails that cover the whole support return
/// exactly `ln 1`.
pub fn hypergeom_tail(
    population: u64,
    successes: u64,
    draws: u64,
    x: i64,
    side: TailSide,
) -> Result<LogProb> {
    let (lo, hi) = hypergeom_support(population, successes, draws)?;
    let (lo, hi) = (lo as i64, hi as i64);
    let term = |k: i64| ln_pmf(population, successes, draws, k as u64);
    let acc = match side {
        TailSide::Ge => {
            if x <= lo {
                return Ok(LogProb::ONE);
            }
            if x > hi {
                return Ok(LogProb::ZERO);
            }
            (x..=hi).rev().map(term).fold(f64::NEG_INFINITY, log_add_exp)
        }
        TailSide::Le => {
            if x >= hi {
                return Ok(LogProb::ONE);
            }
            if x < lo {
                return Ok(LogProb::ZERO);
            }
            (lo..=x).map(term).fold(f64::NEG_INFINITY, log_add_exp)
        }
    };
    Ok(LogProb::from_ln(acc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_enumerated_case() {
        // Two 2-subsets of 4 items meet in exactly one item in 4 of 6 cases.
        let v = hypergeom_log_pmf(4, 2, 2, 1).unwrap();
        assert!((v.ln() - (4.0f64 / 6.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn outside_support_is_log_zero() {
        assert!(hypergeom_log_pmf(85, 17, 17, 18).unwrap().is_zero());
        assert!(hypergeom_log_pmf(85, 17, 17, -1).unwrap().is_zero());
        // support of (10, 8, 8) starts at 6
        assert!(hypergeom_log_pmf(10, 8, 8, 5).unwrap().is_zero());
    }

    #[test]
    fn whole_support_tails_are_exactly_one() {
        assert_eq!(hypergeom_tail(85, 17, 17, 0, TailSide::Ge).unwrap(), LogProb::ONE);
        assert_eq!(hypergeom_tail(85, 17, 17, -3, TailSide::Ge).unwrap(), LogProb::ONE);
        assert_eq!(hypergeom_tail(85, 17, 17, 17, TailSide::Le).unwrap(), LogProb::ONE);
        assert!(hypergeom_tail(85, 17, 17, 18, TailSide::Ge).unwrap().is_zero());
        assert!(hypergeom_tail(85, 17, 17, -1, TailSide::Le).unwrap().is_zero());
    }

    #[test]
    fn inconsistent_parameters() {
        assert!(matches!(hypergeom_log_pmf(85, 90, 17, 1), Err(Error::Domain(_))));
        assert!(matches!(
            hypergeom_tail(10, 3, 11, 1, TailSide::Ge),
            Err(Error::Domain(_))
        ));
    }
}
