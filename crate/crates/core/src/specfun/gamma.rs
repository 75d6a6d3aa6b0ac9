use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_78;

/// ζ(2) ..= ζ(40).
const ZETA: [f64; 39] = [
    1.644_934_066_848_226_436_5,
    1.202_056_903_159_594_285_4,
    1.082_323_233_711_138_191_5,
    1.036_927_755_143_369_926_3,
    1.017_343_061_984_449_139_7,
    1.008_349_277_381_922_826_8,
    1.004_077_356_197_944_339_4,
    1.002_008_392_826_082_214_4,
    1.000_994_575_127_818_085_3,
    1.000_494_188_604_119_464_6,
    1.000_246_086_553_308_048_3,
    1.000_122_713_347_578_489_1,
    1.000_061_248_135_058_704_8,
    1.000_030_588_236_307_020_5,
    1.000_015_282_259_408_651_9,
    1.000_007_637_197_637_899_8,
    1.000_003_817_293_264_999_8,
    1.000_001_908_212_716_553_9,
    1.000_000_953_962_033_872_8,
    1.000_000_476_932_986_787_8,
    1.000_000_238_450_502_727_7,
    1.000_000_119_219_925_965_3,
    1.000_000_059_608_189_051_3,
    1.000_000_029_803_503_514_7,
    1.000_000_014_901_554_828_4,
    1.000_000_007_450_711_789_8,
    1.000_000_003_725_334_024_8,
    1.000_000_001_862_659_723_5,
    1.000_000_000_931_327_432_4,
    1.000_000_000_465_662_906_5,
    1.000_000_000_232_831_183_4,
    1.000_000_000_116_415_501_7,
    1.000_000_000_058_207_720_9,
    1.000_000_000_029_103_850_4,
    1.000_000_000_014_551_921_9,
    1.000_000_000_007_275_959_8,
    1.000_000_000_003_637_979_5,
    1.000_000_000_001_818_989_7,
    1.000_000_000_000_909_494_8,
];

/// Half-width of the windows around 1 and 2 where the zeta series is used.
const SERIES_WINDOW: f64 = 0.35;

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma(x))
}

pub(crate) fn ln_gamma(x: f64) -> f64 {
    if x.is_infinite() {
        return f64::INFINITY;
    }
    if x >= 10.0 {
        return (x - 0.5) * x.ln() - x + LN_SQRT_2PI + stirling_correction(x);
    }
    let e1 = x - 1.0;
    if e1.abs() <= SERIES_WINDOW {
        return ln_gamma_1p_series(e1);
    }
    let e2 = x - 2.0;
    if e2.abs() <= SERIES_WINDOW {
        return ln_gamma_1p_series(e2) + e2.ln_1p();
    }
    // Shift upward into the Stirling range.
    let mut y = x;
    let mut prod = 1.0;
    while y < 10.0 {
        prod *= y;
        y += 1.0;
    }
    ln_gamma(y) - prod.ln()
}

/// `ln Γ(1 + e)` for `|e| <= 0.35`, from `-γe + Σ (-e)^k ζ(k) / k`.
fn ln_gamma_1p_series(e: f64) -> f64 {
    let mut sum = 0.0;
    let mut pow = -e;
    for (i, z) in ZETA.iter().enumerate() {
        pow *= -e;
        sum += z * pow / (i + 2) as f64;
    }
    -EULER_GAMMA * e + sum
}

/// `ln Γ(x) - [(x - ½) ln x - x + ½ ln 2π]` for `x >= 10`.
pub(crate) fn stirling_correction(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    r * (1.0 / 12.0
        - r2 * (1.0 / 360.0
            - r2 * (1.0 / 1260.0
                - r2 * (1.0 / 1680.0
                    - r2 * (1.0 / 1188.0
                        - r2 * (691.0 / 360_360.0 - r2 * (1.0 / 156.0 - r2 * 3617.0 / 122_400.0)))))))
}

/// `ln B(a, b)` for `a, b > 0`.
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain(format!(
            "log_beta requires a, b > 0, got ({a}, {b})"
        )));
    }
    Ok(ln_beta(a, b))
}

/// Works on the Stirling corrections directly when either argument is large
/// so the big `ln Γ` terms never have to cancel.
pub(crate) fn ln_beta(a: f64, b: f64) -> f64 {
    let (p, q) = if a <= b { (a, b) } else { (b, a) };
    let sum = p + q;
    if p >= 10.0 {
        let corr = stirling_correction(p) + stirling_correction(q) - stirling_correction(sum);
        -0.5 * q.ln() + LN_SQRT_2PI + corr + (p - 0.5) * (p / sum).ln() + q * (-p / sum).ln_1p()
    } else if q >= 10.0 {
        let corr = stirling_correction(q) - stirling_correction(sum);
        ln_gamma(p) + corr + p - p * sum.ln() + (q - 0.5) * (-p / sum).ln_1p()
    } else {
        ln_gamma(p) + ln_gamma(q) - ln_gamma(sum)
    }
}

/// Largest `n` for which binomials are computed with exact integers.
const EXACT_BINOMIAL_MAX: u64 = 60;

/// `ln C(n, k)`.
pub fn log_binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::domain(format!("log_binomial requires k <= n, got C({n}, {k})")));
    }
    Ok(ln_binomial(n, k))
}

pub(crate) fn ln_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    if k == 0 {
        return 0.0;
    }
    if n <= EXACT_BINOMIAL_MAX {
        return (exact_binomial(n, k) as f64).ln();
    }
    -((n + 1) as f64).ln() - ln_beta((n - k + 1) as f64, (k + 1) as f64)
}

fn exact_binomial(n: u64, k: u64) -> u128 {
    // Each partial product is itself a binomial coefficient, so the division
    // is exact.
    let mut c: u128 = 1;
    for i in 0..k as u128 {
        c = c * (n as u128 - i) / (i + 1);
    }
    c
}
