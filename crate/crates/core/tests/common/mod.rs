#![allow(dead_code)]

use std::collections::BTreeSet;

use chrono::NaiveDate;
use statmode_core::corpus::IssueRecord;
use statmode_core::series::{load_dept_table, LoadOptions};
use statmode_core::DeptTable;

/// Issues for one year: how many, and how many mention each pattern.
#[derive(Debug, Clone, Copy)]
pub struct YearPlan {
    pub year: i32,
    pub issues: usize,
    pub a: usize,
    pub b: usize,
    pub both: usize,
}

pub const PATTERN_A: &str = "statistique";
pub const PATTERN_B: &str = "Charles Dupin";

/// Builds a deterministic archive following `plan`. Issue `i` of a year
/// mentions A when `i < a`, and B when it falls in the window that overlaps
/// the A block by exactly `both`.
pub fn archive(plan: &[YearPlan]) -> Vec<IssueRecord> {
    let mut out = Vec::new();
    for p in plan {
        assert!(p.both <= p.a.min(p.b) && p.a + p.b - p.both <= p.issues, "{p:?}");
        let b_start = p.a - p.both;
        for i in 0..p.issues {
            let day = NaiveDate::from_yo_opt(p.year, 1 + (i as u32 % 365)).unwrap();
            let mut text = format!("Journal du {day}. Nouvelles de la Chambre, numéro {i}.");
            if i < p.a {
                text.push_str(" On lit dans la Statistique de la France que les chiffres montent.");
            }
            if (b_start..b_start + p.b).contains(&i) {
                text.push_str(" M. le baron Charles Dupin a parlé hier.");
            }
            out.push(IssueRecord {
                id: format!("{}-{i:04}", p.year),
                date: day,
                text,
            });
        }
    }
    out
}

/// 1814-1826 around 5%, 1828-1848 around 25%, 40 issues a year with a
/// year-to-year wobble of one issue either way; 1827 sits between at 15% and
/// belongs to neither period.
pub fn planted_plan() -> Vec<YearPlan> {
    (1814..=1848)
        .map(|year| {
            let wobble = year as usize % 3;
            let a = match year {
                ..=1826 => 1 + wobble,
                1827 => 6,
                _ => 9 + wobble,
            };
            let b = 4 + (year as usize % 3);
            let both = if matches!(year, 1828 | 1836 | 1844) { b } else { 1.min(a) };
            YearPlan {
                year,
                issues: 40,
                a,
                b,
                both,
            }
        })
        .collect()
}

/// Guerry-style table: 86 departments, Corsica under code `20`.
pub fn guerry_csv() -> String {
    let mut s = String::from("code,name,crime_pers,instruction,population,life\n");
    for i in 1..=86u32 {
        let name = if i == 20 { "Corse".to_string() } else { format!("Departement {i}") };
        let crime = 1000 + (i * 7919) % 30000;
        let instr = 5 + (i * 37) % 70;
        let pop = 100_000 + (i * 104_729) % 900_000;
        let life = 28.0 + f64::from((i * 13) % 17) * 0.75;
        s.push_str(&format!("{i:02},{name},{crime},{instr},{pop},{life}\n"));
    }
    s
}

pub fn guerry_table() -> DeptTable {
    let options = LoadOptions {
        exclusions: BTreeSet::from(["20".to_string()]),
        decimal_comma: false,
    };
    load_dept_table(guerry_csv().as_bytes(), &options).unwrap()
}

/// 85 departments where the top 17 of `ignorance` and the top 17 of
/// `closed_windows` share exactly `overlap` departments.
pub fn engineered_overlap_csv(overlap: usize) -> String {
    assert!(overlap <= 17);
    let mut s = String::from("code,name,ignorance,closed_windows\n");
    for i in 0..85usize {
        // ignorance: department i has rank i + 1 (descending values)
        let ignorance = 1000 - i;
        // closed_windows: the first `overlap` departments keep their top
        // slot, the remaining top slots go to departments 17.. instead
        let cw_rank = if i < overlap {
            i
        } else if i < 17 {
            17 + (i - overlap)
        } else if i < 17 + (17 - overlap) {
            overlap + (i - 17)
        } else {
            i
        };
        let closed = 5000 - cw_rank;
        s.push_str(&format!("D{i:02},Dept {i},{ignorance},{closed}\n"));
    }
    s
}

pub fn engineered_overlap_table(overlap: usize) -> DeptTable {
    load_dept_table(engineered_overlap_csv(overlap).as_bytes(), &LoadOptions::default()).unwrap()
}

/// Relative error, with `expected` as reference.
pub fn rel_err(got: f64, expected: f64) -> f64 {
    if expected == 0.0 {
        got.abs()
    } else {
        ((got - expected) / expected).abs()
    }
}

/// Twenty Gaussian-like two-sample fixtures of four values each, shifts from
/// 0 to 4 standard deviations, rounded to two decimals as hand-entered data
/// would be.
pub fn student_fixtures() -> Vec<([f64; 4], [f64; 4])> {
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1828);
    let unit = Normal::new(0.0, 1.0).unwrap();
    let mut draw = |shift: f64| -> [f64; 4] {
        std::array::from_fn(|_| ((unit.sample(&mut rng) + shift) * 100.0).round() / 100.0)
    };
    (0..20)
        .map(|i| {
            let shift = f64::from(i % 5);
            (draw(0.0), draw(shift))
        })
        .collect()
}

/// Two-sided exhaustive permutation p-value for the difference in means:
/// the share of the C(8,4) relabelings at least as extreme as observed.
pub fn permutation_p(xs: &[f64; 4], ys: &[f64; 4]) -> f64 {
    let pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let total: f64 = pooled.iter().sum();
    let observed = (xs.iter().sum::<f64>() - ys.iter().sum::<f64>()).abs();
    let (mut extreme, mut count) = (0u32, 0u32);
    for mask in 0u32..256 {
        if mask.count_ones() != 4 {
            continue;
        }
        let s: f64 = (0..8).filter(|i| mask & (1 << i) != 0).map(|i| pooled[i]).sum();
        let diff = (2.0 * s - total).abs();
        count += 1;
        if diff >= observed - 1e-9 {
            extreme += 1;
        }
    }
    f64::from(extreme) / f64::from(count)
}
