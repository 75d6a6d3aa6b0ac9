//! Departmental tables, d'Angeville's séries and Bigeon's above-mean method.
//!
//! A série is the top or bottom fifth of the departments ranked by one
//! variable (17 of the 85 continental departments). Two séries drawn from
//! the same ranking universe are compared through the size of their
//! intersection, tested with [`fisher_intersection_test`].
//!
//! Ranks are a strict total order: ties are broken by ascending department
//! code whatever the ranking direction.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::{fisher_intersection_test, TestResult};
use crate::specfun::TailSide;

/// Name of the variable added by [`bigeon_correction`].
pub const CORRECTED_INSTRUCTION: &str = "corrected_instruction";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Department {
    pub code: String,
    pub name: String,
}

/// Departments × named numeric variables. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct DeptTable {
    departments: Vec<Department>,
    variables: Vec<(String, Vec<f64>)>,
    excluded: BTreeSet<String>,
}

impl DeptTable {
    pub fn new(
        departments: Vec<Department>,
        variables: Vec<(String, Vec<f64>)>,
        excluded: BTreeSet<String>,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for d in &departments {
            if !seen.insert(d.code.as_str()) {
                return Err(Error::data(format!("duplicate department code {}", d.code)));
            }
            if excluded.contains(&d.code) {
                return Err(Error::data(format!("excluded department {} is present", d.code)));
            }
        }
        let mut names = HashSet::new();
        for (name, values) in &variables {
            if !names.insert(name.as_str()) {
                return Err(Error::data(format!("duplicate variable {name}")));
            }
            if values.len() != departments.len() {
                return Err(Error::data(format!(
                    "variable {name} has {} values for {} departments",
                    values.len(),
                    departments.len()
                )));
            }
            if let Some(i) = values.iter().position(|v| !v.is_finite()) {
                return Err(Error::data(format!(
                    "variable {name} is not finite for department {}",
                    departments[i].code
                )));
            }
        }
        Ok(DeptTable {
            departments,
            variables,
            excluded,
        })
    }

    pub fn departments(&self) -> &[Department] {
        &self.departments
    }

    /// Number of departments kept for analysis.
    pub fn len(&self) -> usize {
        self.departments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.departments.is_empty()
    }

    pub fn excluded(&self) -> &BTreeSet<String> {
        &self.excluded
    }

    pub fn variable_names(&self) -> impl Iterator<Item = &str> {
        self.variables.iter().map(|(n, _)| n.as_str())
    }

    pub fn variable(&self, name: &str) -> Result<&[f64]> {
        self.variables
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
            .ok_or_else(|| Error::data(format!("unknown variable {name}")))
    }

    /// A copy of the table with `name` added, or replaced if it exists.
    pub fn with_variable(&self, name: &str, values: Vec<f64>) -> Result<DeptTable> {
        let mut variables = self.variables.clone();
        match variables.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = values,
            None => variables.push((name.to_string(), values)),
        }
        DeptTable::new(self.departments.clone(), variables, self.excluded.clone())
    }

    /// Writes the table back out in the loader's CSV layout.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["code".to_string(), "name".to_string()];
        header.extend(self.variables.iter().map(|(n, _)| n.clone()));
        w.write_record(&header).map_err(csv_error)?;
        for (i, d) in self.departments.iter().enumerate() {
            let mut row = vec![d.code.clone(), d.name.clone()];
            row.extend(self.variables.iter().map(|(_, v)| v[i].to_string()));
            w.write_record(&row).map_err(csv_error)?;
        }
        w.flush().map_err(|e| Error::io("<csv output>", e))?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::data(format!("csv: {e}"))
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Department codes dropped before analysis (d'Angeville set Corsica
    /// aside).
    pub exclusions: BTreeSet<String>,
    /// Accept `12,5` as twelve and a half. Such cells must be quoted.
    pub decimal_comma: bool,
}

/// Reads a departments CSV: header row, `code` and `name` columns, then one
/// numeric column per variable.
pub fn load_dept_table<R: Read>(source: R, options: &LoadOptions) -> Result<DeptTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let header = reader.headers().map_err(csv_error)?.clone();
    if header.len() < 2
        || !header[0].eq_ignore_ascii_case("code")
        || !header[1].eq_ignore_ascii_case("name")
    {
        return Err(Error::data(
            "header must start with columns `code` and `name`".to_string(),
        ));
    }
    let var_names: Vec<String> = header.iter().skip(2).map(str::to_string).collect();
    let mut departments = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); var_names.len()];
    let mut seen = HashSet::new();

    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let row = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != header.len() {
            return Err(Error::data(format!(
                "row {row}: expected {} columns, found {}",
                header.len(),
                record.len()
            )));
        }
        let code = record[0].to_string();
        if code.is_empty() {
            return Err(Error::data(format!("row {row}, column code: empty department code")));
        }
        if !seen.insert(code.clone()) {
            return Err(Error::data(format!("row {row}, column code: duplicate code {code}")));
        }
        let mut values = Vec::with_capacity(var_names.len());
        for (j, name) in var_names.iter().enumerate() {
            let cell = &record[j + 2];
            values.push(parse_cell(cell, options.decimal_comma).ok_or_else(|| {
                if cell.is_empty() {
                    Error::data(format!("row {row}, column {name}: missing value"))
                } else {
                    Error::data(format!("row {row}, column {name}: non-numeric value {cell:?}"))
                }
            })?);
        }
        if options.exclusions.contains(&code) {
            continue;
        }
        departments.push(Department {
            code,
            name: record[1].to_string(),
        });
        for (col, v) in columns.iter_mut().zip(values) {
            col.push(v);
        }
    }
    DeptTable::new(
        departments,
        var_names.into_iter().zip(columns).collect(),
        options.exclusions.clone(),
    )
}

fn parse_cell(cell: &str, decimal_comma: bool) -> Option<f64> {
    let parsed = if decimal_comma && cell.contains(',') {
        if cell.contains('.') {
            return None;
        }
        cell.replace(',', ".").parse::<f64>()
    } else {
        cell.parse::<f64>()
    };
    parsed.ok().filter(|v| v.is_finite())
}

/// Rank of every department for one variable, 1 = most extreme.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankAssignment {
    pub variable: String,
    pub ascending: bool,
    pub ranks: BTreeMap<String, usize>,
    /// Department codes in rank order.
    pub order: Vec<String>,
}

impl RankAssignment {
    pub fn rank_of(&self, code: &str) -> Option<usize> {
        self.ranks.get(code).copied()
    }
}

/// `ascending = true` gives rank 1 to the smallest value.
pub fn rank_variable(table: &DeptTable, variable: &str, ascending: bool) -> Result<RankAssignment> {
    let values = table.variable(variable)?;
    let deps = table.departments();
    let mut idx: Vec<usize> = (0..deps.len()).collect();
    idx.sort_by(|&i, &j| {
        let by_value = if ascending {
            values[i].total_cmp(&values[j])
        } else {
            values[j].total_cmp(&values[i])
        };
        by_value.then_with(|| deps[i].code.cmp(&deps[j].code))
    });
    let order: Vec<String> = idx.iter().map(|&i| deps[i].code.clone()).collect();
    let ranks = order
        .iter()
        .enumerate()
        .map(|(r, c)| (c.clone(), r + 1))
        .collect();
    Ok(RankAssignment {
        variable: variable.to_string(),
        ascending,
        ranks,
        order,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Largest values.
    Top,
    /// Smallest values.
    Bottom,
}

impl Direction {
    /// The ranking direction whose first `k` ranks form this série.
    pub fn ascending(self) -> bool {
        matches!(self, Direction::Bottom)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Top => "top",
            Direction::Bottom => "bottom",
        })
    }
}

/// `k` departments at one extreme of a variable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Serie {
    pub variable: String,
    pub direction: Direction,
    pub k: usize,
    pub members: BTreeSet<String>,
    /// Number of departments in the ranking the série was cut from.
    pub universe: usize,
}

/// `floor(N / 5)`: 17 for 85 departments.
pub fn default_serie_size(n: usize) -> usize {
    n / 5
}

/// Builds a série; `k = None` uses [`default_serie_size`].
pub fn make_serie(
    table: &DeptTable,
    variable: &str,
    direction: Direction,
    k: Option<usize>,
) -> Result<Serie> {
    let n = table.len();
    let k = k.unwrap_or_else(|| default_serie_size(n));
    if k == 0 || k > n {
        return Err(Error::domain(format!("série size must lie in 1..={n}, got {k}")));
    }
    let ranking = rank_variable(table, variable, direction.ascending())?;
    Ok(Serie {
        variable: variable.to_string(),
        direction,
        k,
        members: ranking.order[..k].iter().cloned().collect(),
        universe: n,
    })
}

/// Overlap of two séries and its Fisher test.
pub fn intersect_series(
    a: &Serie,
    b: &Serie,
    population: usize,
    side: TailSide,
) -> Result<(usize, TestResult)> {
    if a.universe != population || b.universe != population {
        return Err(Error::data(format!(
            "séries come from universes of {} and {} departments, expected {population}",
            a.universe, b.universe
        )));
    }
    intersect_sets(&a.members, &b.members, population, side)
}

/// Overlap test for two arbitrary department sets of one universe, such as
/// a série against the 32 departments north of the Saint-Malo–Geneva line.
pub fn intersect_sets(
    a: &BTreeSet<String>,
    b: &BTreeSet<String>,
    population: usize,
    side: TailSide,
) -> Result<(usize, TestResult)> {
    if a.len() > population || b.len() > population {
        return Err(Error::data(format!(
            "sets of {} and {} departments cannot come from {population}",
            a.len(),
            b.len()
        )));
    }
    let overlap = a.intersection(b).count();
    let test = fisher_intersection_test(
        population as u64,
        a.len() as u64,
        b.len() as u64,
        overlap as i64,
        side,
    )?;
    Ok((overlap, test))
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Departments strictly above the mean (`above = true`) or at or below it.
pub fn above_mean_set(table: &DeptTable, variable: &str, above: bool) -> Result<BTreeSet<String>> {
    let values = table.variable(variable)?;
    let m = mean(values);
    Ok(table
        .departments()
        .iter()
        .zip(values)
        .filter(|(_, &v)| (v > m) == above)
        .map(|(d, _)| d.code.clone())
        .collect())
}

/// Bigeon's cross-count: how many departments of one above/below-mean set
/// also fall in another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MeanCross {
    pub condition: usize,
    pub both: usize,
}

impl MeanCross {
    /// `Of the 49 departments where life is long, 23 are instructed, 26 are not`.
    pub fn sentence(&self, condition: &str, outcome: &str) -> String {
        format!(
            "Of the {} departments {condition}, {} are {outcome}, {} are not",
            self.condition,
            self.both,
            self.condition - self.both
        )
    }
}

pub fn above_mean_cross(
    table: &DeptTable,
    condition: (&str, bool),
    outcome: (&str, bool),
) -> Result<MeanCross> {
    let c = above_mean_set(table, condition.0, condition.1)?;
    let o = above_mean_set(table, outcome.0, outcome.1)?;
    Ok(MeanCross {
        condition: c.len(),
        both: c.intersection(&o).count(),
    })
}

/// Adds [`CORRECTED_INSTRUCTION`] = life expectancy / schooling figure for
/// each department.
pub fn bigeon_correction(table: &DeptTable, schooling_var: &str, life_var: &str) -> Result<DeptTable> {
    let schooling = table.variable(schooling_var)?;
    let life = table.variable(life_var)?;
    let mut corrected = Vec::with_capacity(table.len());
    for ((d, &s), &l) in table.departments().iter().zip(schooling).zip(life) {
        if s <= 0.0 {
            return Err(Error::data(format!(
                "department {} ({}): schooling value {s} must be positive",
                d.code, d.name
            )));
        }
        corrected.push(l / s);
    }
    table.with_variable(CORRECTED_INSTRUCTION, corrected)
}

/// Outcome of [`robust_mean`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustMean {
    pub value: f64,
    pub weights: Vec<f64>,
    /// Set when the median absolute deviation was zero although some value
    /// deviates from the median; the mean absolute deviation about the
    /// median served as scale instead.
    pub scale_fallback: bool,
}

/// Weighted mean that shrinks the influence of years far from the others.
///
/// A value whose distance to the median exceeds `threshold × MAD` gets
/// weight `threshold × MAD / |deviation|`; the rest weigh 1. This is a
/// modern reading of Bigeon's unspecified probabilistic down-weighting.
pub fn robust_mean(values: &[f64], threshold: f64) -> Result<RobustMean> {
    if values.len() < 2 {
        return Err(Error::domain("robust mean needs at least two values"));
    }
    if !(threshold > 0.0) || !threshold.is_finite() {
        return Err(Error::domain(format!("threshold must be positive, got {threshold}")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("robust mean values must be finite"));
    }
    let med = median(values.to_vec());
    let deviations: Vec<f64> = values.iter().map(|v| (v - med).abs()).collect();
    let mut scale = median(deviations.clone());
    let mut scale_fallback = false;
    if scale == 0.0 && deviations.iter().any(|&d| d > 0.0) {
        scale = mean(&deviations);
        scale_fallback = true;
    }
    let limit = threshold * scale;
    let weights: Vec<f64> = deviations
        .iter()
        .map(|&d| if d > limit { limit / d } else { 1.0 })
        .collect();
    let total: f64 = weights.iter().sum();
    let value = values.iter().zip(&weights).map(|(v, w)| v * w).sum::<f64>() / total;
    Ok(RobustMean {
        value,
        weights,
        scale_fallback,
    })
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// d'Angeville's "département moyen": the per-variable mean.
pub fn mean_department(table: &DeptTable) -> Result<Vec<(String, f64)>> {
    if table.is_empty() {
        return Err(Error::domain("mean department of an empty table"));
    }
    Ok(table
        .variables
        .iter()
        .map(|(n, v)| (n.clone(), mean(v)))
        .collect())
}

/// Sizes of the five rank bands; the remainder goes to the first bands.
pub fn quintile_sizes(n: usize) -> [usize; 5] {
    let (base, rem) = (n / 5, n % 5);
    std::array::from_fn(|i| base + usize::from(i < rem))
}

/// Class 1..=5 of every department, class 1 being the first série of the
/// requested ranking direction.
pub fn quintile_classes(
    table: &DeptTable,
    variable: &str,
    ascending: bool,
) -> Result<BTreeMap<String, u8>> {
    let n = table.len();
    if n < 5 {
        return Err(Error::domain(format!("quintile classes need at least 5 departments, got {n}")));
    }
    let ranking = rank_variable(table, variable, ascending)?;
    let bounds: Vec<usize> = quintile_sizes(n)
        .iter()
        .scan(0, |acc, s| {
            *acc += s;
            Some(*acc)
        })
        .collect();
    Ok(ranking
        .ranks
        .iter()
        .map(|(code, &rank)| {
            let class = bounds.iter().position(|&b| rank <= b).unwrap_or(4) + 1;
            (code.clone(), class as u8)
        })
        .collect())
}

/// One line of the per-department série report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepartmentRow {
    pub code: String,
    pub name: String,
    pub rank: usize,
    pub top: bool,
    pub bottom: bool,
    pub class: u8,
}

/// Rank, série membership and quintile class of every department, in rank
/// order.
pub fn department_report(
    table: &DeptTable,
    variable: &str,
    ascending: bool,
    k: Option<usize>,
) -> Result<Vec<DepartmentRow>> {
    let ranking = rank_variable(table, variable, ascending)?;
    let top = make_serie(table, variable, Direction::Top, k)?;
    let bottom = make_serie(table, variable, Direction::Bottom, k)?;
    let classes = quintile_classes(table, variable, ascending)?;
    let names: BTreeMap<&str, &str> = table
        .departments()
        .iter()
        .map(|d| (d.code.as_str(), d.name.as_str()))
        .collect();
    Ok(ranking
        .order
        .iter()
        .enumerate()
        .map(|(i, code)| DepartmentRow {
            code: code.clone(),
            name: names[code.as_str()].to_string(),
            rank: i + 1,
            top: top.members.contains(code),
            bottom: bottom.members.contains(code),
            class: classes[code],
        })
        .collect())
}

pub fn write_department_csv<W: Write>(rows: &[DepartmentRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

/// JSON report of one série intersection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntersectionReport {
    pub first: Serie,
    pub second: Serie,
    pub population: usize,
    pub overlap: usize,
    pub common: Vec<String>,
    pub test: TestResult,
}

pub fn intersection_report(
    first: Serie,
    second: Serie,
    population: usize,
    side: TailSide,
) -> Result<IntersectionReport> {
    let (overlap, test) = intersect_series(&first, &second, population, side)?;
    let common = first.members.intersection(&second.members).cloned().collect();
    Ok(IntersectionReport {
        first,
        second,
        population,
        overlap,
        common,
        test,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(values: &[(&str, f64)]) -> DeptTable {
        let deps = values
            .iter()
            .map(|(c, _)| Department {
                code: c.to_string(),
                name: format!("dept {c}"),
            })
            .collect();
        let v = values.iter().map(|(_, v)| *v).collect();
        DeptTable::new(deps, vec![("v".into(), v)], BTreeSet::new()).unwrap()
    }

    fn ranks(t: &DeptTable, ascending: bool) -> Vec<usize> {
        let r = rank_variable(t, "v", ascending).unwrap();
        t.departments().iter().map(|d| r.ranks[&d.code]).collect()
    }

    #[test]
    fn ranks_simple_and_reversed() {
        let t = table(&[("a", 3.0), ("b", 1.0), ("c", 2.0)]);
        assert_eq!(ranks(&t, true), vec![3, 1, 2]);
        assert_eq!(ranks(&t, false), vec![1, 3, 2]);
    }

    #[test]
    fn ties_break_by_code() {
        let t = table(&[("04", 3.0), ("03", 2.0), ("02", 2.0), ("01", 1.0)]);
        assert_eq!(ranks(&t, true), vec![4, 3, 2, 1]);
        // still by code when descending
        assert_eq!(ranks(&t, false), vec![1, 3, 2, 4]);
    }

    #[test]
    fn unknown_variable() {
        let t = table(&[("a", 1.0)]);
        assert!(matches!(rank_variable(&t, "nope", true), Err(Error::Data(_))));
    }

    #[test]
    fn serie_bounds() {
        let t = table(&[("a", 1.0), ("b", 2.0), ("c", 3.0), ("d", 4.0), ("e", 5.0)]);
        assert!(matches!(make_serie(&t, "v", Direction::Top, Some(0)), Err(Error::Domain(_))));
        assert!(matches!(make_serie(&t, "v", Direction::Top, Some(6)), Err(Error::Domain(_))));
        let all = make_serie(&t, "v", Direction::Bottom, Some(5)).unwrap();
        assert_eq!(all.members.len(), 5);
        let top = make_serie(&t, "v", Direction::Top, Some(2)).unwrap();
        assert_eq!(top.members, ["d", "e"].iter().map(|s| s.to_string()).collect());
        assert_eq!(make_serie(&t, "v", Direction::Top, None).unwrap().k, 1);
    }

    #[test]
    fn mismatched_universes() {
        let t5 = table(&[("a", 1.0), ("b", 2.0), ("c", 3.0), ("d", 4.0), ("e", 5.0)]);
        let t4 = table(&[("a", 1.0), ("b", 2.0), ("c", 3.0), ("d", 4.0)]);
        let a = make_serie(&t5, "v", Direction::Top, Some(2)).unwrap();
        let b = make_serie(&t4, "v", Direction::Top, Some(2)).unwrap();
        assert!(matches!(intersect_series(&a, &b, 5, TailSide::Ge), Err(Error::Data(_))));
    }

    #[test]
    fn above_mean_partitions() {
        let t = table(&[("a", 1.0), ("b", 2.0), ("c", 3.0)]);
        let above = above_mean_set(&t, "v", true).unwrap();
        let below = above_mean_set(&t, "v", false).unwrap();
        assert_eq!(above.len(), 1);
        assert_eq!(above.len() + below.len(), 3);
        assert!(above.is_disjoint(&below));
    }

    #[test]
    fn bigeon_sentence_adds_up() {
        let c = MeanCross {
            condition: 49,
            both: 23,
        };
        assert_eq!(
            c.sentence("where life is long", "instructed"),
            "Of the 49 departments where life is long, 23 are instructed, 26 are not"
        );
    }

    #[test]
    fn robust_mean_edge_cases() {
        assert!(matches!(robust_mean(&[1.0], 3.0), Err(Error::Domain(_))));
        assert!(matches!(robust_mean(&[1.0, 2.0], 0.0), Err(Error::Domain(_))));
        let same = robust_mean(&[4.0, 4.0, 4.0], 3.0).unwrap();
        assert_eq!(same.value, 4.0);
        assert!(!same.scale_fallback);
    }

    #[test]
    fn quintile_band_sizes() {
        assert_eq!(quintile_sizes(85), [17; 5]);
        assert_eq!(quintile_sizes(10), [2; 5]);
        assert_eq!(quintile_sizes(7), [2, 2, 1, 1, 1]);
        let t = table(&[("a", 1.0), ("b", 2.0), ("c", 3.0), ("d", 4.0)]);
        assert!(matches!(quintile_classes(&t, "v", true), Err(Error::Domain(_))));
    }

    #[test]
    fn decimal_comma_cells() {
        assert_eq!(parse_cell("12,5", true), Some(12.5));
        assert_eq!(parse_cell("12,5", false), None);
        assert_eq!(parse_cell("1.2,5", true), None);
        assert_eq!(parse_cell("", false), None);
        assert_eq!(parse_cell("inf", false), None);
    }
}
