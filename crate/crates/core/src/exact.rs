//! Exact rational hypergeometric probabilities.
//!
//! Used where a value has to be *identified* rather than approximated, such
//! as the scan for the number of maritime departments behind d'Angeville's
//! goitre claim, and to cross-check the floating-point route.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::Result;
use crate::specfun::{hypergeom_support, TailSide};

/// `C(n, k)` as a big integer (zero when `k > n`).
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for i in 0..k {
        c *= n - i;
        c /= i + 1;
    }
    c
}

/// Exact `P(X = k)` for `X ~ Hypergeometric(N, K, n)`.
pub fn hypergeom_pmf(population: u64, successes: u64, draws: u64, k: i64) -> Result<BigRational> {
    let (lo, hi) = hypergeom_support(population, successes, draws)?;
    if k < lo as i64 || k > hi as i64 {
        return Ok(BigRational::zero());
    }
    let k = k as u64;
    let numer = binomial(successes, k) * binomial(population - successes, draws - k);
    Ok(ratio(numer, binomial(population, draws)))
}

/// Exact `P(X >= x)` or `P(X <= x)`.
pub fn hypergeom_tail(
    population: u64,
    successes: u64,
    draws: u64,
    x: i64,
    side: TailSide,
) -> Result<BigRational> {
    let (lo, hi) = hypergeom_support(population, successes, draws)?;
    let (lo, hi) = (lo as i64, hi as i64);
    let range = match side {
        TailSide::Ge => x.max(lo)..=hi,
        TailSide::Le => lo..=x.min(hi),
    };
    let mut numer = BigUint::zero();
    for k in range {
        let k = k as u64;
        numer += binomial(successes, k) * binomial(population - successes, draws - k);
    }
    Ok(ratio(numer, binomial(population, draws)))
}

fn ratio(numer: BigUint, denom: BigUint) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Nearest `f64` to an exact probability.
pub fn to_f64(p: &BigRational) -> f64 {
    p.to_f64().unwrap_or(f64::NAN)
}

/// One row of [`scan_zero_overlap`].
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroOverlapRow {
    pub draws: u64,
    pub probability: BigRational,
}

/// `P(X = 0)` for each `n` in `draws`, with population and successes fixed.
pub fn scan_zero_overlap(
    population: u64,
    successes: u64,
    draws: impl IntoIterator<Item = u64>,
) -> Result<Vec<ZeroOverlapRow>> {
    draws
        .into_iter()
        .map(|n| {
            Ok(ZeroOverlapRow {
                draws: n,
                probability: hypergeom_pmf(population, successes, n, 0)?,
            })
        })
        .collect()
}
