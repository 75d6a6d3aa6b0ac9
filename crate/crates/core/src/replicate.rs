//! Built-in replication suite: every historically published value the
//! toolkit can recompute, each checked at the precision it was printed with.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::Result;
use crate::exact;
use crate::inference::{
    arbuthnot_sign_test, cournot_deviation_test, fisher_intersection_test, laplace_proportion_test,
    pearson_p_from_r,
};
use crate::specfun::TailSide;

/// One recomputed value against its published counterpart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: &'static str,
    pub label: String,
    pub published: String,
    pub computed: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// `P(X = 0)` for the maritime-department scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub draws: u64,
    pub probability: f64,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
    pub maritime_scan: Vec<ScanRow>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// True when `value` and `published` agree once both are rounded to
/// `digits` significant digits.
pub fn agrees_to(value: f64, published: f64, digits: usize) -> bool {
    let p = digits.saturating_sub(1);
    format!("{value:.p$e}") == format!("{published:.p$e}")
}

const LAPLACE_BRACKET: (f64, f64) = (1.145e-42, 1.20e-42);
const LAPLACE_BUDGET: Duration = Duration::from_secs(1);

pub const MARITIME_RANGE: std::ops::RangeInclusive<u64> = 18..=30;
const MARITIME_PUBLISHED: f64 = 0.0043;

pub fn run() -> Result<Report> {
    let mut checks = vec![laplace()?, arbuthnot()?];
    checks.extend(dangeville()?);
    let (scan_check, maritime_scan) = maritime()?;
    checks.push(scan_check);
    checks.push(cournot()?);
    checks.push(correlation()?);
    Ok(Report {
        checks,
        maritime_scan,
    })
}

fn laplace() -> Result<Check> {
    let start = Instant::now();
    let r = laplace_proportion_test(251_527, 241_945, 0.5)?;
    let fast = start.elapsed() < LAPLACE_BUDGET;
    let (lo, hi) = LAPLACE_BRACKET;
    let inside = (lo..=hi).contains(&r.p_value);
    Ok(Check {
        id: "laplace",
        label: "Paris births 1745-1784, P(boy share <= 1/2)".into(),
        published: "1.1521e-42 (Laplace), 1.17e-42 (modern)".into(),
        computed: format!("{:.4e}", r.p_value),
        pass: inside && fast,
        note: (!fast).then(|| "exceeded the 1 s budget".to_string()),
    })
}

fn arbuthnot() -> Result<Check> {
    let r = arbuthnot_sign_test(82)?;
    let published = 2.07e-27;
    let pass = agrees_to(r.p_value, published, 3);
    Ok(Check {
        id: "arbuthnot",
        label: "82 years of male-majority christenings, 2^-82".into(),
        published: format!("{published:.2e}"),
        computed: format!("{:.2e}", r.p_value),
        pass,
        note: (!pass).then(|| {
            format!(
                "2^-82 = {:.6e} exactly; the published decimal is off by a factor of 100",
                r.p_value
            )
        }),
    })
}

fn dangeville() -> Result<Vec<Check>> {
    // (draws, overlap, side, published, significant digits)
    let cases = [
        (17, 12, TailSide::Ge, "2.08e-7", 3),
        (17, 7, TailSide::Ge, "0.022", 2),
        (17, 1, TailSide::Le, "0.092", 2),
        (32, 13, TailSide::Ge, "3.6e-4", 2),
    ];
    cases
        .into_iter()
        .map(|(n, x, side, printed, digits)| {
            let published: f64 = printed.parse().expect("literal");
            let r = fisher_intersection_test(85, 17, n, x, side)?;
            let oracle = exact::to_f64(&exact::hypergeom_tail(85, 17, n, x, side)?);
            let rel = (r.p_value - oracle).abs() / oracle;
            let op = match side {
                TailSide::Ge => ">=",
                TailSide::Le => "<=",
            };
            Ok(Check {
                id: "dangeville",
                label: format!("Fisher (85, 17, {n}), overlap {op} {x}"),
                published: printed.to_string(),
                computed: format!("{:.prec$e}", r.p_value, prec = digits - 1),
                pass: agrees_to(r.p_value, published, digits) && rel <= 0.005,
                note: None,
            })
        })
        .collect()
}

/// Scans the unknown number of maritime departments for the one whose
/// zero-overlap probability prints as the published value.
fn maritime() -> Result<(Check, Vec<ScanRow>)> {
    let rows: Vec<ScanRow> = exact::scan_zero_overlap(85, 17, MARITIME_RANGE)?
        .into_iter()
        .map(|row| {
            let probability = exact::to_f64(&row.probability);
            ScanRow {
                draws: row.draws,
                probability,
                matches: agrees_to(probability, MARITIME_PUBLISHED, 2),
            }
        })
        .collect();
    let found: Vec<u64> = rows.iter().filter(|r| r.matches).map(|r| r.draws).collect();
    let computed = match found.as_slice() {
        [] => "no n matches".to_string(),
        [n] => {
            let p = rows.iter().find(|r| r.draws == *n).map_or(f64::NAN, |r| r.probability);
            format!("n = {n}, P = {p:.4}")
        }
        many => format!("ambiguous: n in {many:?}"),
    };
    Ok((
        Check {
            id: "maritime",
            label: format!(
                "P(X = 0; 85, 17, n), n in {}..={}",
                MARITIME_RANGE.start(),
                MARITIME_RANGE.end()
            ),
            published: format!("{MARITIME_PUBLISHED}"),
            computed,
            pass: found.len() == 1,
            note: None,
        },
        rows,
    ))
}

/// Deterministic sweep of (x, n, p0): the relation must hold everywhere,
/// not only at the published pair.
fn cournot() -> Result<Check> {
    let mut worst = 0.0f64;
    let mut count = 0usize;
    for i in 0..100u64 {
        let n = 1 + i * i * 7 + i;
        let p0 = (i as f64 + 0.5) / 100.0;
        for j in 0..100u64 {
            let x = (n * j) / 99;
            let r = cournot_deviation_test(x, n, p0)?;
            worst = worst.max((r.pi - (1.0 + r.p) / 2.0).abs());
            count += 1;
        }
    }
    let (p, pi) = (0.1834, 0.5917);
    let pair_ok = agrees_to((1.0 + p) / 2.0, pi, 4);
    Ok(Check {
        id: "cournot",
        label: format!("Pi = (1 + P)/2 over {count} inputs and the pair P = {p}"),
        published: format!("Pi = {pi}"),
        computed: format!("max deviation {worst:e}, (1 + P)/2 = {:.4}", (1.0 + p) / 2.0),
        pass: worst <= 1e-15 && pair_ok,
        note: None,
    })
}

fn correlation() -> Result<Check> {
    let (t, log_p) = pearson_p_from_r(0.86, 35)?;
    let p = log_p.prob();
    Ok(Check {
        id: "pearson",
        label: format!("r = 0.86, n = 35 (t = {t:.4})"),
        published: "1.43e-11 (unrounded r)".into(),
        computed: format!("{p:.2e}"),
        pass: (1e-12..=1e-10).contains(&p),
        note: None,
    })
}
