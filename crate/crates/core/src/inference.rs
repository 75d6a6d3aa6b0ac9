//! The historical tests.
//!
//! Each procedure returns a [`TestResult`] that echoes its inputs in
//! [`TestResult::params`], so any result can be recomputed with [`rerun`].

use std::collections::BTreeMap;
use std::f64::consts::LN_2;
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::specfun::gamma::ln_beta;
use crate::specfun::{
    dist::student_t_tails, hypergeom_tail, log_sum_exp, normal_cdf, normal_upper_tail,
    reg_inc_beta, LogProb, TailSide,
};

/// Tail convention of a p-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    Ge,
    Le,
    TwoSided,
}

impl From<TailSide> for Tail {
    fn from(side: TailSide) -> Self {
        match side {
            TailSide::Ge => Tail::Ge,
            TailSide::Le => Tail::Le,
        }
    }
}

impl fmt::Display for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tail::Ge => "ge",
            Tail::Le => "le",
            Tail::TwoSided => "two-sided",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ArbuthnotSign,
    LaplaceProportion,
    LaplaceTwoSample,
    LaplaceTwoSampleNormal,
    FisherIntersection,
    StudentPooled,
    StudentWelch,
    Pearson,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::ArbuthnotSign => "arbuthnot sign test",
            Method::LaplaceProportion => "laplace posterior proportion test",
            Method::LaplaceTwoSample => "laplace two-sample posterior comparison",
            Method::LaplaceTwoSampleNormal => "laplace two-sample comparison (normal approximation)",
            Method::FisherIntersection => "fisher exact intersection test",
            Method::StudentPooled => "student two-sample t test (pooled variance)",
            Method::StudentWelch => "welch two-sample t test",
            Method::Pearson => "pearson correlation test",
        }
    }
}

/// An input echoed into a [`TestResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Count(u64),
    Int(i64),
    #[serde(serialize_with = "serialize_real")]
    Real(f64),
    Reals(Vec<f64>),
    Text(String),
}

pub type Params = BTreeMap<String, Param>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub method: Method,
    /// Count, t, z or r depending on the method.
    #[serde(serialize_with = "serialize_real")]
    pub statistic: f64,
    #[serde(serialize_with = "serialize_real")]
    pub p_value: f64,
    pub log_p: LogProb,
    pub tail: Tail,
    pub params: Params,
}

impl TestResult {
    fn new(method: Method, statistic: f64, log_p: LogProb, tail: Tail, params: Params) -> Self {
        TestResult {
            method,
            statistic,
            p_value: log_p.prob(),
            log_p,
            tail,
            params,
        }
    }

    fn count(&self, key: &str) -> Result<u64> {
        match self.params.get(key) {
            Some(Param::Count(v)) => Ok(*v),
            other => Err(Error::data(format!("parameter {key} missing or not a count: {other:?}"))),
        }
    }

    fn int(&self, key: &str) -> Result<i64> {
        match self.params.get(key) {
            Some(Param::Int(v)) => Ok(*v),
            Some(Param::Count(v)) => Ok(*v as i64),
            other => Err(Error::data(format!("parameter {key} missing or not an integer: {other:?}"))),
        }
    }

    fn real(&self, key: &str) -> Result<f64> {
        match self.params.get(key) {
            Some(Param::Real(v)) => Ok(*v),
            other => Err(Error::data(format!("parameter {key} missing or not real: {other:?}"))),
        }
    }

    fn reals(&self, key: &str) -> Result<&[f64]> {
        match self.params.get(key) {
            Some(Param::Reals(v)) => Ok(v),
            other => Err(Error::data(format!("parameter {key} missing or not a list: {other:?}"))),
        }
    }
}

/// Non-finite reals become the strings `"inf"`, `"-inf"` and `"nan"`, since
/// JSON has no literal for them.
pub(crate) fn serialize_real<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

fn params<const N: usize>(entries: [(&str, Param); N]) -> Params {
    entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Recomputes a result from its echoed parameters.
pub fn rerun(result: &TestResult) -> Result<TestResult> {
    match result.method {
        Method::ArbuthnotSign => {
            let n = u32::try_from(result.count("periods")?)
                .map_err(|_| Error::data("periods out of range"))?;
            arbuthnot_sign_test(n)
        }
        Method::LaplaceProportion => laplace_proportion_test(
            result.count("successes")?,
            result.count("failures")?,
            result.real("threshold")?,
        ),
        Method::LaplaceTwoSample => laplace_two_sample(
            result.count("s1")?,
            result.count("f1")?,
            result.count("s2")?,
            result.count("f2")?,
        ),
        Method::LaplaceTwoSampleNormal => laplace_two_sample_normal(
            result.count("s1")?,
            result.count("f1")?,
            result.count("s2")?,
            result.count("f2")?,
        ),
        Method::FisherIntersection => {
            let side = match result.tail {
                Tail::Ge => TailSide::Ge,
                Tail::Le => TailSide::Le,
                Tail::TwoSided => return Err(Error::data("fisher test has no two-sided form")),
            };
            fisher_intersection_test(
                result.count("population")?,
                result.count("first")?,
                result.count("second")?,
                result.int("overlap")?,
                side,
            )
        }
        Method::StudentPooled => {
            student_two_sample_with(result.reals("xs")?, result.reals("ys")?, Variance::Pooled)
        }
        Method::StudentWelch => {
            student_two_sample_with(result.reals("xs")?, result.reals("ys")?, Variance::Welch)
        }
        Method::Pearson => pearson_test(result.reals("xs")?, result.reals("ys")?),
    }
}

/// Probability that `n_periods` independent fair coin flips all land the
/// same way: `2^-n`.
pub fn arbuthnot_sign_test(n_periods: u32) -> Result<TestResult> {
    if n_periods == 0 {
        return Err(Error::domain("arbuthnot test needs at least one period"));
    }
    let exponent = i32::try_from(n_periods).map_err(|_| Error::domain("too many periods"))?;
    let log_p = LogProb::from_ln(-(n_periods as f64) * LN_2);
    let mut result = TestResult::new(
        Method::ArbuthnotSign,
        n_periods as f64,
        log_p,
        Tail::Ge,
        params([("periods", Param::Count(n_periods as u64))]),
    );
    // Powers of two are exact down to the subnormal range.
    result.p_value = 2f64.powi(-exponent);
    Ok(result)
}

/// Posterior probability that the latent proportion is at most `threshold`,
/// under a uniform prior: `I_threshold(successes + 1, failures + 1)`.
pub fn laplace_proportion_test(successes: u64, failures: u64, threshold: f64) -> Result<TestResult> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::domain(format!("threshold must lie in [0, 1], got {threshold}")));
    }
    let a = successes as f64 + 1.0;
    let b = failures as f64 + 1.0;
    let log_p = reg_inc_beta(threshold, a, b)?;
    Ok(TestResult::new(
        Method::LaplaceProportion,
        a / (a + b),
        log_p,
        Tail::Le,
        params([
            ("successes", Param::Count(successes)),
            ("failures", Param::Count(failures)),
            ("threshold", Param::Real(threshold)),
        ]),
    ))
}

fn beta_moments(s: u64, f: u64) -> (f64, f64) {
    let a = s as f64 + 1.0;
    let b = f as f64 + 1.0;
    let n = a + b;
    (a / n, a * b / (n * n * (n + 1.0)))
}

fn two_sample_params(s1: u64, f1: u64, s2: u64, f2: u64) -> Result<(Params, f64)> {
    if s1 + f1 == 0 || s2 + f2 == 0 {
        return Err(Error::domain("each group needs at least one observation"));
    }
    let (m1, v1) = beta_moments(s1, f1);
    let (m2, v2) = beta_moments(s2, f2);
    let z = (m1 - m2) / (v1 + v2).sqrt();
    let p = params([
        ("s1", Param::Count(s1)),
        ("f1", Param::Count(f1)),
        ("s2", Param::Count(s2)),
        ("f2", Param::Count(f2)),
    ]);
    Ok((p, z))
}

/// Posterior probability that the first group's proportion exceeds the
/// second's, with independent uniform priors.
///
/// Computed exactly from the finite-sum identity for two Beta variables
/// with integer parameters. The statistic is the moment-matched normal
/// deviate `(m1 - m2) / sqrt(v1 + v2)`.
pub fn laplace_two_sample(s1: u64, f1: u64, s2: u64, f2: u64) -> Result<TestResult> {
    let (params, z) = two_sample_params(s1, f1, s2, f2)?;
    let first = (s1 + 1, f1 + 1);
    let second = (s2 + 1, f2 + 1);
    // Always evaluate the sum for the lexicographically smaller parameter
    // pair so that swapping the groups yields exactly complementary values.
    let log_p = match first.cmp(&second) {
        std::cmp::Ordering::Equal => LogProb::from_ln(-LN_2),
        std::cmp::Ordering::Less => log_prob_beta_greater(first, second),
        std::cmp::Ordering::Greater => log_prob_beta_greater(second, first).complement(),
    };
    Ok(TestResult::new(Method::LaplaceTwoSample, z, log_p, Tail::Ge, params))
}

/// `ln P(X > Y)` for `X ~ Beta(ax, bx)`, `Y ~ Beta(ay, by)` with integer
/// parameters:
/// `Σ_{i<ax} B(ay+i, bx+by) / ((bx+i) B(1+i, bx) B(ay, by))`.
fn log_prob_beta_greater((ax, bx): (u64, u64), (ay, by): (u64, u64)) -> LogProb {
    let (bx_f, ay_f, by_f) = (bx as f64, ay as f64, by as f64);
    let base = ln_beta(ay_f, by_f);
    let terms = (0..ax).map(|i| {
        let i = i as f64;
        ln_beta(ay_f + i, bx_f + by_f) - (bx_f + i).ln() - ln_beta(1.0 + i, bx_f) - base
    });
    LogProb::from_ln(log_sum_exp(terms))
}

/// Same comparison through the normal approximation to the difference of the
/// two Beta posteriors: `Φ((m1 - m2) / sqrt(v1 + v2))`.
pub fn laplace_two_sample_normal(s1: u64, f1: u64, s2: u64, f2: u64) -> Result<TestResult> {
    let (params, z) = two_sample_params(s1, f1, s2, f2)?;
    Ok(TestResult::new(
        Method::LaplaceTwoSampleNormal,
        z,
        normal_cdf(z),
        Tail::Ge,
        params,
    ))
}

/// Cournot's pair of probabilities for a deviation from a reference
/// proportion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CournotResult {
    /// Probability that the deviation is smaller than observed, `2Φ(z) - 1`.
    #[serde(rename = "P")]
    pub p: f64,
    /// `(1 + P) / 2 = Φ(z)`.
    #[serde(rename = "Pi")]
    pub pi: f64,
    /// Standardized deviation `z`.
    pub deviation: f64,
    pub normalization: &'static str,
}

pub fn cournot_deviation_test(x: u64, n: u64, p0: f64) -> Result<CournotResult> {
    if n == 0 {
        return Err(Error::domain("cournot test needs n >= 1"));
    }
    if x > n {
        return Err(Error::domain(format!("observed count {x} exceeds n = {n}")));
    }
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::domain(format!("reference proportion must lie in (0, 1), got {p0}")));
    }
    let n_f = n as f64;
    let deviation = (x as f64 / n_f - p0).abs() / (p0 * (1.0 - p0) / n_f).sqrt();
    let upper = normal_upper_tail(deviation).prob();
    let p = 1.0 - 2.0 * upper;
    Ok(CournotResult {
        p,
        pi: (1.0 + p) / 2.0,
        deviation,
        normalization: "wald-null",
    })
}

/// Fisher's exact test on the overlap of a `first`-subset and a
/// `second`-subset of `population` items.
pub fn fisher_intersection_test(
    population: u64,
    first: u64,
    second: u64,
    overlap: i64,
    side: TailSide,
) -> Result<TestResult> {
    let log_p = hypergeom_tail(population, first, second, overlap, side)?;
    Ok(TestResult::new(
        Method::FisherIntersection,
        overlap as f64,
        log_p,
        side.into(),
        params([
            ("population", Param::Count(population)),
            ("first", Param::Count(first)),
            ("second", Param::Count(second)),
            ("overlap", Param::Int(overlap)),
        ]),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variance {
    #[default]
    Pooled,
    Welch,
}

/// Classic pooled-variance Student test, two-sided.
pub fn student_two_sample(xs: &[f64], ys: &[f64]) -> Result<TestResult> {
    student_two_sample_with(xs, ys, Variance::Pooled)
}

pub fn student_two_sample_with(xs: &[f64], ys: &[f64], variance: Variance) -> Result<TestResult> {
    if xs.len() < 2 || ys.len() < 2 {
        return Err(Error::domain("student test needs at least two values per sample"));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::domain("student test samples must be finite"));
    }
    let (n1, m1, ss1) = moments(xs);
    let (n2, m2, ss2) = moments(ys);
    let diff = m1 - m2;
    let (se, df) = match variance {
        Variance::Pooled => {
            let df = n1 + n2 - 2.0;
            let pooled = (ss1 + ss2) / df;
            ((pooled * (1.0 / n1 + 1.0 / n2)).sqrt(), df)
        }
        Variance::Welch => {
            let q1 = ss1 / (n1 - 1.0) / n1;
            let q2 = ss2 / (n2 - 1.0) / n2;
            let df = (q1 + q2).powi(2) / (q1 * q1 / (n1 - 1.0) + q2 * q2 / (n2 - 1.0));
            ((q1 + q2).sqrt(), df)
        }
    };
    let method = match variance {
        Variance::Pooled => Method::StudentPooled,
        Variance::Welch => Method::StudentWelch,
    };
    let params = params([("xs", Param::Reals(xs.to_vec())), ("ys", Param::Reals(ys.to_vec()))]);
    if se == 0.0 {
        if diff == 0.0 {
            return Err(Error::Degenerate(
                "both samples are constant and equal; t is undefined".into(),
            ));
        }
        let t = diff.signum() * f64::INFINITY;
        return Ok(TestResult::new(method, t, LogProb::ZERO, Tail::TwoSided, params));
    }
    let t = diff / se;
    let log_p = two_sided(t, df)?;
    Ok(TestResult::new(method, t, log_p, Tail::TwoSided, params))
}

/// `(n, mean, sum of squared deviations)`.
fn moments(v: &[f64]) -> (f64, f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let ss = v.iter().map(|x| (x - mean).powi(2)).sum();
    (n, mean, ss)
}

/// `min(1, 2 · min(upper, lower))` in log space.
fn two_sided(t: f64, df: f64) -> Result<LogProb> {
    let (upper, lower) = student_t_tails(t, df)?;
    let smaller = if upper.ln() <= lower.ln() { upper } else { lower };
    Ok(LogProb::from_ln((smaller.ln() + LN_2).min(0.0)))
}

/// Pearson correlation with a two-sided t-transform p-value.
pub fn pearson_test(xs: &[f64], ys: &[f64]) -> Result<TestResult> {
    if xs.len() != ys.len() {
        return Err(Error::domain(format!(
            "pearson test needs paired samples, got {} and {} values",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 3 {
        return Err(Error::domain("pearson test needs at least three pairs"));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::domain("pearson test samples must be finite"));
    }
    let (_, mx, sxx) = moments(xs);
    let (_, my, syy) = moments(ys);
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("constant sample: correlation undefined".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let (_, log_p) = pearson_p_from_r(r, xs.len())?;
    Ok(TestResult::new(
        Method::Pearson,
        r,
        log_p,
        Tail::TwoSided,
        params([("xs", Param::Reals(xs.to_vec())), ("ys", Param::Reals(ys.to_vec()))]),
    ))
}

/// `t = r sqrt((n-2)/(1-r²))` and its two-sided p-value on `n - 2` degrees of
/// freedom.
pub fn pearson_p_from_r(r: f64, n: usize) -> Result<(f64, LogProb)> {
    if !(-1.0..=1.0).contains(&r) {
        return Err(Error::domain(format!("correlation must lie in [-1, 1], got {r}")));
    }
    if n < 3 {
        return Err(Error::domain("pearson test needs at least three pairs"));
    }
    let df = (n - 2) as f64;
    if r.abs() == 1.0 {
        return Ok((r * f64::INFINITY, LogProb::ZERO));
    }
    let t = r * (df / ((1.0 - r) * (1.0 + r))).sqrt();
    Ok((t, two_sided(t, df)?))
}
