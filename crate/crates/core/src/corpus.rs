//! Document-frequency analysis of a dated newspaper archive.
//!
//! An archive is a set of issues, each with a date and its text. For a
//! search string the primary indicator is, year by year, the share of issues
//! that contain it at least once; raw occurrence counts are available as a
//! secondary mode. On top of those annual series sit the period comparison
//! (Student), the correlation of two series (Pearson), the yearly
//! co-occurrence test (Fisher) and an SVG chart.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, Write};
use std::ops::RangeInclusive;
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};
use crate::inference::{fisher_intersection_test, pearson_test, student_two_sample, TestResult};
use crate::specfun::TailSide;

/// One dated issue of the archive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IssueRecord {
    pub id: String,
    pub date: NaiveDate,
    pub text: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonRecord {
    id: String,
    date: String,
    text: String,
}

/// Loads an archive from either a JSONL file or a directory of
/// `YYYY-MM-DD_<id>.txt` files. Records come back sorted by date, then id.
pub fn ingest_archive(path: &Path) -> Result<Vec<IssueRecord>> {
    let meta = fs::metadata(path).map_err(|e| Error::io(path, e))?;
    let mut records = if meta.is_dir() {
        read_text_directory(path)?
    } else {
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        read_jsonl(std::io::BufReader::new(file), &path.display().to_string())?
    };
    records.sort_by(|a, b| (a.date, &a.id).cmp(&(b.date, &b.id)));
    Ok(records)
}

fn parse_date(s: &str) -> Option<NaiveDate> {
    // chrono accepts years with a sign or more than four digits; the
    // manifest format does not.
    let b = s.as_bytes();
    if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
        return None;
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()
}

/// One JSON object per line with keys `id`, `date` and `text`. Blank lines
/// are skipped.
pub fn read_jsonl<R: BufRead>(reader: R, source: &str) -> Result<Vec<IssueRecord>> {
    let mut records = Vec::new();
    let mut ids = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::data(format!("{source}, line {lineno}: {e}")))?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: JsonRecord = serde_json::from_str(&line)
            .map_err(|e| Error::data(format!("{source}, line {lineno}: {e}")))?;
        let date = parse_date(&raw.date).ok_or_else(|| {
            Error::data(format!("{source}, line {lineno}: unparseable date {:?}", raw.date))
        })?;
        if !ids.insert(raw.id.clone()) {
            return Err(Error::data(format!(
                "{source}, line {lineno}: duplicate id {:?}",
                raw.id
            )));
        }
        records.push(IssueRecord {
            id: raw.id,
            date,
            text: raw.text,
        });
    }
    Ok(records)
}

fn read_text_directory(dir: &Path) -> Result<Vec<IssueRecord>> {
    let mut entries: Vec<_> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .collect::<std::io::Result<_>>()
        .map_err(|e| Error::io(dir, e))?;
    entries.sort_by_key(|e| e.file_name());

    let mut records = Vec::new();
    let mut ids = HashSet::new();
    for entry in entries {
        let path = entry.path();
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with('.') {
            continue;
        }
        if path.is_dir() {
            return Err(Error::Usage(format!(
                "archive directory contains a subdirectory: {}",
                path.display()
            )));
        }
        if name.ends_with(".jsonl") || name.ends_with(".json") {
            return Err(Error::Usage(format!(
                "mixed-mode manifest: {} is a JSON manifest inside a text-file archive",
                path.display()
            )));
        }
        let (date, id) = parse_file_name(&name)
            .ok_or_else(|| Error::data(format!("{}: expected YYYY-MM-DD_<id>.txt", path.display())))?;
        if !ids.insert(id.to_string()) {
            return Err(Error::data(format!("{}: duplicate id {id:?}", path.display())));
        }
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        let text = String::from_utf8(bytes)
            .map_err(|_| Error::data(format!("{}: not valid UTF-8", path.display())))?;
        records.push(IssueRecord {
            id: id.to_string(),
            date,
            text,
        });
    }
    Ok(records)
}

fn parse_file_name(name: &str) -> Option<(NaiveDate, &str)> {
    let stem = name.strip_suffix(".txt")?;
    let (date, id) = stem.split_once('_')?;
    if id.is_empty() {
        return None;
    }
    Some((parse_date(date)?, id))
}

/// Text normalization applied to both the documents and the pattern.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Normalization {
    /// Strip accents and other combining marks (`é` matches `e`).
    pub fold_diacritics: bool,
}

impl Normalization {
    pub fn apply(&self, text: &str) -> String {
        let folded = text.chars().map(simple_case_fold);
        if self.fold_diacritics {
            folded
                .collect::<String>()
                .nfd()
                .filter(|c| !is_combining_mark(*c))
                .nfc()
                .collect()
        } else {
            folded.collect()
        }
    }
}

/// One-to-one case folding: full lowercase mappings that would expand to
/// several characters are left alone.
fn simple_case_fold(c: char) -> char {
    match c {
        'ſ' => 's',
        'ς' => 'σ',
        'ϐ' => 'β',
        'ϑ' => 'θ',
        'ϕ' => 'φ',
        'ϖ' => 'π',
        'ϰ' => 'κ',
        'ϱ' => 'ρ',
        'ϵ' => 'ε',
        'ẛ' => 'ṡ',
        _ => {
            let mut lower = c.to_lowercase();
            match (lower.next(), lower.next()) {
                (Some(l), None) => l,
                _ => c,
            }
        }
    }
}

/// A normalized search string, reusable across documents.
#[derive(Debug, Clone)]
pub struct Matcher {
    needle: String,
    normalization: Normalization,
}

impl Matcher {
    pub fn new(pattern: &str, normalization: Normalization) -> Self {
        Matcher {
            needle: normalization.apply(pattern),
            normalization,
        }
    }

    /// Non-overlapping occurrences in `text`.
    pub fn count(&self, text: &str) -> u64 {
        if self.needle.is_empty() {
            return 0;
        }
        self.normalization.apply(text).matches(&self.needle).count() as u64
    }
}

/// Non-overlapping occurrences of `pattern` in `text` after normalization.
pub fn match_pattern(text: &str, pattern: &str, normalization: Normalization) -> u64 {
    Matcher::new(pattern, normalization).count(text)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMode {
    /// Issues containing the pattern at least once.
    #[default]
    DocFreq,
    /// Total occurrences.
    OccCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YearCount {
    pub year: i32,
    pub issues: u64,
    pub hits: u64,
    /// `hits / issues`, undefined for years without issues.
    pub proportion: Option<f64>,
}

/// Per-year counts for one pattern, contiguous over the archive span.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnualSeries {
    pub pattern: String,
    pub mode: CountMode,
    pub years: Vec<YearCount>,
}

impl AnnualSeries {
    pub fn span(&self) -> Option<(i32, i32)> {
        Some((self.years.first()?.year, self.years.last()?.year))
    }

    /// `(year, proportion)` for the years that have issues.
    pub fn defined(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.years
            .iter()
            .filter_map(|y| y.proportion.map(|p| (y.year, p)))
    }
}

fn year_span(records: &[IssueRecord]) -> Result<RangeInclusive<i32>> {
    let first = records.iter().map(|r| r.date.year()).min();
    let last = records.iter().map(|r| r.date.year()).max();
    match (first, last) {
        (Some(a), Some(b)) => Ok(a..=b),
        _ => Err(Error::domain("archive is empty")),
    }
}

/// Sums per-record values by year. The reduction is associative and
/// commutative, so the result does not depend on scheduling.
fn tally<T, F>(records: &[IssueRecord], per_record: F) -> BTreeMap<i32, T>
where
    T: Default + Send + Copy + std::ops::AddAssign,
    F: Fn(&IssueRecord) -> T + Sync + Send,
{
    records
        .par_iter()
        .fold(BTreeMap::new, |mut acc: BTreeMap<i32, T>, r| {
            *acc.entry(r.date.year()).or_default() += per_record(r);
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (year, v) in b {
                *a.entry(year).or_default() += v;
            }
            a
        })
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
struct Quad([u64; 4]);

impl std::ops::AddAssign for Quad {
    fn add_assign(&mut self, rhs: Self) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

pub fn annual_series(
    records: &[IssueRecord],
    pattern: &str,
    mode: CountMode,
    normalization: Normalization,
) -> Result<AnnualSeries> {
    let span = year_span(records)?;
    let matcher = Matcher::new(pattern, normalization);
    let per_year = tally(records, |r| {
        let n = matcher.count(&r.text);
        let hits = match mode {
            CountMode::DocFreq => u64::from(n > 0),
            CountMode::OccCount => n,
        };
        Pair(1, hits)
    });
    let years = span
        .map(|year| {
            let Pair(issues, hits) = per_year.get(&year).copied().unwrap_or_default();
            YearCount {
                year,
                issues,
                hits,
                proportion: (issues > 0).then(|| hits as f64 / issues as f64),
            }
        })
        .collect();
    Ok(AnnualSeries {
        pattern: pattern.to_string(),
        mode,
        years,
    })
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
struct Pair(u64, u64);

impl std::ops::AddAssign for Pair {
    fn add_assign(&mut self, rhs: Self) {
        self.0 += rhs.0;
        self.1 += rhs.1;
    }
}

pub fn write_series_csv<W: Write>(series: &AnnualSeries, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::data(format!("csv: {e}"));
    w.write_record(["year", "issues", "hits", "proportion"]).map_err(io)?;
    for y in &series.years {
        w.write_record([
            y.year.to_string(),
            y.issues.to_string(),
            y.hits.to_string(),
            y.proportion.map(|p| p.to_string()).unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

/// Student test between the annual proportions of two disjoint year
/// ranges. A positive statistic means the second period is higher.
pub fn compare_periods(
    series: &AnnualSeries,
    first: RangeInclusive<i32>,
    second: RangeInclusive<i32>,
) -> Result<TestResult> {
    if first.start() > first.end() || second.start() > second.end() {
        return Err(Error::domain("empty year range"));
    }
    if first.start() <= second.end() && second.start() <= first.end() {
        return Err(Error::domain(format!(
            "periods {}-{} and {}-{} overlap",
            first.start(),
            first.end(),
            second.start(),
            second.end()
        )));
    }
    let pick = |range: &RangeInclusive<i32>| -> Vec<f64> {
        series
            .defined()
            .filter(|(y, _)| range.contains(y))
            .map(|(_, p)| p)
            .collect()
    };
    let (early, late) = (pick(&first), pick(&second));
    if early.len() < 2 || late.len() < 2 {
        return Err(Error::domain(format!(
            "each period needs at least two years with issues, got {} and {}",
            early.len(),
            late.len()
        )));
    }
    student_two_sample(&late, &early)
}

/// Pearson correlation of two series over their common years.
pub fn correlate_series(a: &AnnualSeries, b: &AnnualSeries) -> Result<TestResult> {
    if a.span() != b.span() {
        return Err(Error::data(format!(
            "series cover different spans: {:?} and {:?}",
            a.span(),
            b.span()
        )));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = a
        .years
        .iter()
        .zip(&b.years)
        .filter_map(|(x, y)| Some((x.proportion?, y.proportion?)))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::domain("correlation needs at least three common years"));
    }
    pearson_test(&xs, &ys)
}

/// Yearly overlap of the issues containing two patterns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CooccurrenceYear {
    pub year: i32,
    pub issues: u64,
    pub a: u64,
    pub b: u64,
    pub both: u64,
    pub test: TestResult,
    pub significant: bool,
}

/// Default significance level for marking years.
pub const DEFAULT_ALPHA: f64 = 0.05;

/// For each year with issues, Fisher's test (upper tail) on the number of
/// issues containing both patterns. Years with `p < alpha` are flagged.
pub fn cooccurrence_by_year(
    records: &[IssueRecord],
    pattern_a: &str,
    pattern_b: &str,
    normalization: Normalization,
    alpha: f64,
) -> Result<Vec<CooccurrenceYear>> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    year_span(records)?;
    let ma = Matcher::new(pattern_a, normalization);
    let mb = Matcher::new(pattern_b, normalization);
    let per_year = tally(records, |r| {
        let a = ma.count(&r.text) > 0;
        let b = mb.count(&r.text) > 0;
        Quad([1, u64::from(a), u64::from(b), u64::from(a && b)])
    });
    per_year
        .into_iter()
        .map(|(year, Quad([n, a, b, x]))| {
            let test = fisher_intersection_test(n, a, b, x as i64, TailSide::Ge)?;
            Ok(CooccurrenceYear {
                year,
                issues: n,
                a,
                b,
                both: x,
                significant: test.p_value < alpha,
                test,
            })
        })
        .collect()
}

pub fn write_cooccurrence_csv<W: Write>(rows: &[CooccurrenceYear], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::data(format!("csv: {e}"));
    w.write_record(["year", "N", "a", "b", "x", "p_value", "significant"])
        .map_err(io)?;
    for r in rows {
        w.write_record([
            r.year.to_string(),
            r.issues.to_string(),
            r.a.to_string(),
            r.b.to_string(),
            r.both.to_string(),
            r.test.p_value.to_string(),
            r.significant.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

const CHART_WIDTH: f64 = 800.0;
const CHART_HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 190.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Renders annual proportions as a standalone SVG document.
///
/// Each run of consecutive years with issues becomes one `<polyline>`, so a
/// series without gaps is drawn as a single polyline. Marked years get a
/// dashed vertical line. Output depends only on the inputs.
pub fn render_chart(series: &[AnnualSeries], marked_years: &[i32]) -> Result<String> {
    if series.is_empty() {
        return Err(Error::domain("chart needs at least one series"));
    }
    let first = series.iter().filter_map(|s| s.span()).map(|s| s.0).min();
    let last = series.iter().filter_map(|s| s.span()).map(|s| s.1).max();
    let (Some(first), Some(last)) = (first, last) else {
        return Err(Error::domain("chart series have no years"));
    };
    let y_max_data = series
        .iter()
        .flat_map(|s| s.defined().map(|(_, p)| p))
        .fold(0.0f64, f64::max);
    let (y_step, y_top) = nice_axis(y_max_data);

    let plot_w = CHART_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = CHART_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_of = |year: i32| {
        if last == first {
            MARGIN_LEFT + plot_w / 2.0
        } else {
            MARGIN_LEFT + plot_w * f64::from(year - first) / f64::from(last - first)
        }
    };
    let y_of = |p: f64| MARGIN_TOP + plot_h * (1.0 - p / y_top);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CHART_WIDTH}" height="{CHART_HEIGHT}" viewBox="0 0 {CHART_WIDTH} {CHART_HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    // Axes.
    let (x0, x1) = (MARGIN_LEFT, MARGIN_LEFT + plot_w);
    let (y0, y1) = (MARGIN_TOP + plot_h, MARGIN_TOP);
    let _ = writeln!(
        svg,
        r#"<line class="axis" x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<line class="axis" x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}" stroke="black"/>"#
    );
    let year_step = year_tick_step(last - first);
    let mut year = first + (year_step - first.rem_euclid(year_step)) % year_step;
    while year <= last {
        let x = x_of(year);
        let _ = writeln!(
            svg,
            r#"<line class="tick" x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{year}</text>"#,
            y0 + 5.0,
            y0 + 20.0
        );
        year += year_step;
    }
    let decimals = decimals_for(y_step);
    let n_ticks = (y_top / y_step).round() as usize;
    for i in 0..=n_ticks {
        let p = y_step * i as f64;
        let y = y_of(p);
        let _ = writeln!(
            svg,
            r#"<line class="tick" x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{p:.decimals$}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">year</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        CHART_HEIGHT - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{:.2}" text-anchor="middle" transform="rotate(-90 15 {:.2})">proportion of issues</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );

    let mut marks: Vec<i32> = marked_years
        .iter()
        .copied()
        .filter(|y| (first..=last).contains(y))
        .collect();
    marks.sort_unstable();
    marks.dedup();
    for year in marks {
        let x = x_of(year);
        let _ = writeln!(
            svg,
            r##"<line class="marker" x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{y1:.2}" stroke="#555555" stroke-dasharray="4 3"/>"##
        );
    }

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        for segment in segments(s) {
            let points = segment
                .iter()
                .map(|&(year, p)| format!("{:.2},{:.2}", x_of(year), y_of(p)))
                .collect::<Vec<_>>()
                .join(" ");
            let _ = writeln!(
                svg,
                r#"<polyline class="series" data-series="{i}" fill="none" stroke="{color}" stroke-width="2" points="{points}"/>"#
            );
        }
        let ly = MARGIN_TOP + 10.0 + 20.0 * i as f64;
        let lx = CHART_WIDTH - MARGIN_RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<rect class="legend" x="{lx:.2}" y="{:.2}" width="14" height="4" fill="{color}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            ly - 2.0,
            lx + 20.0,
            ly + 4.0,
            xml_escape(&s.pattern)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Writes [`render_chart`] output to `path`.
pub fn emit_chart(series: &[AnnualSeries], marked_years: &[i32], path: &Path) -> Result<()> {
    let svg = render_chart(series, marked_years)?;
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}

fn segments(series: &AnnualSeries) -> Vec<Vec<(i32, f64)>> {
    let mut out: Vec<Vec<(i32, f64)>> = Vec::new();
    let mut current = Vec::new();
    for y in &series.years {
        match y.proportion {
            Some(p) => current.push((y.year, p)),
            None if !current.is_empty() => out.push(std::mem::take(&mut current)),
            None => {}
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

/// Tick step and axis top for data in `[0, max]`: steps of 1, 2 or 5 × 10^k,
/// four to eight ticks.
fn nice_axis(max: f64) -> (f64, f64) {
    if max <= 0.0 {
        return (0.25, 1.0);
    }
    let raw = max / 5.0;
    let magnitude = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * magnitude)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * magnitude);
    (step, (max / step).ceil().max(1.0) * step)
}

fn decimals_for(step: f64) -> usize {
    (-step.log10().floor()).max(0.0) as usize
}

fn year_tick_step(span: i32) -> i32 {
    [1, 2, 5, 10, 20, 25, 50, 100]
        .into_iter()
        .find(|s| span / s <= 12)
        .unwrap_or(200)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
