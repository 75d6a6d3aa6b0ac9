use std::f64::consts::LN_2;

use super::beta::reg_inc_beta_pair;
use super::LogProb;
use crate::error::{Error, Result};

/// `ln Γ(½) = ln √π`.
const LN_GAMMA_HALF: f64 = 0.572_364_942_924_700_087_07;
const MAX_ITERATIONS: usize = 500;
const EPSILON: f64 = 1e-16;

/// `ln P(T >= t)` for Student's t with `df` degrees of freedom.
pub fn student_t_sf(t: f64, df: f64) -> Result<LogProb> {
    let (upper, _) = student_t_tails(t, df)?;
    Ok(upper)
}

/// `ln P(T <= t)`.
pub fn student_t_cdf(t: f64, df: f64) -> Result<LogProb> {
    let (_, lower) = student_t_tails(t, df)?;
    Ok(lower)
}

/// `(ln P(T >= t), ln P(T <= t))`.
///
/// For `t > 0` the upper tail is `½ I_{df/(df+t²)}(df/2, ½)`; the lower tail
/// of a negative `t` is the same expression by symmetry.
pub(crate) fn student_t_tails(t: f64, df: f64) -> Result<(LogProb, LogProb)> {
    if !(df > 0.0) {
        return Err(Error::domain(format!("student t requires df > 0, got {df}")));
    }
    if t.is_nan() {
        return Err(Error::domain("student t statistic is NaN"));
    }
    if t == 0.0 {
        let half = LogProb::from_ln(-LN_2);
        return Ok((half, half));
    }
    let far = if t.is_infinite() {
        LogProb::ZERO
    } else {
        let t2 = t * t;
        let x = df / (df + t2);
        let y = t2 / (df + t2);
        let (ibeta, _) = reg_inc_beta_pair(x, y, 0.5 * df, 0.5)?;
        LogProb::from_ln(ibeta.ln() - LN_2)
    };
    let near = far.complement();
    Ok(if t > 0.0 { (far, near) } else { (near, far) })
}

/// `ln(1 - Φ(z))`, accurate in the log far into the tail.
///
/// The upper tail is `½ Q(½, z²/2)` with `Q` the regularized upper
/// incomplete gamma function, evaluated by its power series near the centre
/// and by a continued fraction beyond.
pub fn normal_upper_tail(z: f64) -> LogProb {
    if z.is_nan() {
        return LogProb(f64::NAN);
    }
    if z == 0.0 {
        return LogProb::from_ln(-LN_2);
    }
    let far = if z.is_infinite() {
        LogProb::ZERO
    } else {
        LogProb::from_ln(log_gamma_q_half(0.5 * z * z) - LN_2)
    };
    if z > 0.0 {
        far
    } else {
        far.complement()
    }
}

/// `ln Φ(z)`.
pub fn normal_cdf(z: f64) -> LogProb {
    normal_upper_tail(-z)
}

/// `ln Q(½, x)` for `x > 0`.
fn log_gamma_q_half(x: f64) -> f64 {
    const A: f64 = 0.5;
    let log_prefix = -x + A * x.ln() - LN_GAMMA_HALF;
    if x < A + 1.0 {
        // P(a, x) = prefix · Σ x^n / (a (a+1) ... (a+n))
        let mut term = 1.0 / A;
        let mut sum = term;
        let mut ap = A;
        for _ in 0..MAX_ITERATIONS {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * EPSILON {
                break;
            }
        }
        let p = (log_prefix + sum.ln()).exp();
        (-p).ln_1p()
    } else {
        // Lentz continued fraction for Q(a, x).
        let tiny = 1e-300;
        let mut b = x + 1.0 - A;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=MAX_ITERATIONS {
            let an = -(i as f64) * (i as f64 - A);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < EPSILON {
                break;
            }
        }
        log_prefix + h.ln()
    }
}
