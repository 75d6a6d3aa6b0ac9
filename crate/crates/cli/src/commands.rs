use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use statmode_core::corpus::{self, AnnualSeries, CountMode, IssueRecord, Normalization};
use statmode_core::inference::{self, Variance};
use statmode_core::series::{self, LoadOptions};
use statmode_core::specfun::TailSide;
use statmode_core::{replicate, DeptTable, Direction, Error, Result};

use crate::args::{
    ArchiveArgs, Cli, Command, CorpusCommand, DirectionArg, Format, Laplace2Method, ModeArg,
    SeriesCommand, TableArgs, TailArg, TestCommand,
};
use crate::render;

pub const OUTPUT_DIR_VAR: &str = "STATMODE_OUTPUT_DIR";

/// What a successful command prints, and its exit code.
pub struct Outcome {
    pub stdout: String,
    pub code: u8,
}

impl From<String> for Outcome {
    fn from(stdout: String) -> Self {
        Outcome { stdout, code: 0 }
    }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    let format = cli.format;
    match cli.command {
        Command::Test(cmd) => test(cmd, format).map(Outcome::from),
        Command::Series(cmd) => series_cmd(cmd, format).map(Outcome::from),
        Command::Corpus(cmd) => corpus_cmd(cmd, format).map(Outcome::from),
        Command::Replicate => {
            let report = replicate::run()?;
            Ok(Outcome {
                stdout: render::replicate(&report, format)?,
                code: if report.all_pass() { 0 } else { 3 },
            })
        }
    }
}

fn side(tail: TailArg) -> TailSide {
    match tail {
        TailArg::Ge => TailSide::Ge,
        TailArg::Le => TailSide::Le,
    }
}

fn direction(d: DirectionArg) -> Direction {
    match d {
        DirectionArg::Top => Direction::Top,
        DirectionArg::Bottom => Direction::Bottom,
    }
}

fn mode(m: ModeArg) -> CountMode {
    match m {
        ModeArg::DocFreq => CountMode::DocFreq,
        ModeArg::OccCount => CountMode::OccCount,
    }
}

/// Relative paths land in `$STATMODE_OUTPUT_DIR` when it is set.
pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_VAR) {
        Some(dir) if path.is_relative() && !dir.is_empty() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<()> {
    let path = resolve_output(path);
    fs::write(&path, bytes).map_err(|source| Error::Io { path, source })
}

fn write_with<F>(path: Option<&Path>, fill: F) -> Result<()>
where
    F: FnOnce(&mut Vec<u8>) -> Result<()>,
{
    if let Some(path) = path {
        let mut buf = Vec::new();
        fill(&mut buf)?;
        write_output(path, &buf)?;
    }
    Ok(())
}

fn test(cmd: TestCommand, format: Format) -> Result<String> {
    let result = match cmd {
        TestCommand::Arbuthnot { periods } => inference::arbuthnot_sign_test(periods)?,
        TestCommand::Laplace {
            successes,
            failures,
            threshold,
        } => inference::laplace_proportion_test(successes, failures, threshold)?,
        TestCommand::Laplace2 {
            s1,
            f1,
            s2,
            f2,
            method,
        } => match method {
            Laplace2Method::Exact => inference::laplace_two_sample(s1, f1, s2, f2)?,
            Laplace2Method::Normal => inference::laplace_two_sample_normal(s1, f1, s2, f2)?,
        },
        TestCommand::Cournot { x, n, p0 } => {
            return render::cournot(&inference::cournot_deviation_test(x, n, p0)?, format)
        }
        TestCommand::Fisher {
            population,
            first,
            second,
            x,
            tail,
        } => inference::fisher_intersection_test(population, first, second, x, side(tail))?,
        TestCommand::Student { xs, ys, welch } => {
            let variance = if welch {
                Variance::Welch
            } else {
                Variance::Pooled
            };
            inference::student_two_sample_with(&xs, &ys, variance)?
        }
        TestCommand::Pearson { xs, ys } => inference::pearson_test(&xs, &ys)?,
    };
    render::test_result(&result, format)
}

fn load_table(args: &TableArgs) -> Result<DeptTable> {
    let file = fs::File::open(&args.input).map_err(|source| Error::Io {
        path: args.input.clone(),
        source,
    })?;
    let options = LoadOptions {
        exclusions: args.exclude.iter().cloned().collect::<BTreeSet<_>>(),
        decimal_comma: args.decimal_comma,
    };
    series::load_dept_table(std::io::BufReader::new(file), &options)
}

fn series_cmd(cmd: SeriesCommand, format: Format) -> Result<String> {
    match cmd {
        SeriesCommand::Rank {
            table,
            variable,
            ascending,
            k,
            output,
        } => {
            let table = load_table(&table)?;
            let rows = series::department_report(&table, &variable, ascending, k)?;
            write_with(output.as_deref(), |buf| series::write_department_csv(&rows, buf))?;
            match format {
                Format::Json => render::json(&rows),
                Format::Human => {
                    let mut out = format!("{variable}: N = {}\n", table.len());
                    for r in &rows {
                        let serie = match (r.top, r.bottom) {
                            (true, true) => "top,bottom",
                            (true, false) => "top",
                            (false, true) => "bottom",
                            _ => "",
                        };
                        out.push_str(&format!(
                            "{:>4}  {:<6} {:<24} class {}  {serie}\n",
                            r.rank, r.code, r.name, r.class
                        ));
                    }
                    Ok(out)
                }
            }
        }
        SeriesCommand::Intersect {
            table,
            first,
            first_direction,
            second,
            second_direction,
            k,
            tail,
            output,
        } => {
            let table = load_table(&table)?;
            let a = series::make_serie(&table, &first, direction(first_direction), k)?;
            let b = series::make_serie(&table, &second, direction(second_direction), k)?;
            let report = series::intersection_report(a, b, table.len(), side(tail))?;
            let text = render::json(&report)?;
            if let Some(path) = &output {
                write_output(path, text.as_bytes())?;
            }
            match format {
                Format::Json => Ok(text),
                Format::Human => {
                    let mut rows = vec![
                        ("first", serie_label(&report.first)),
                        ("second", serie_label(&report.second)),
                        ("N", report.population.to_string()),
                        ("overlap", report.overlap.to_string()),
                    ];
                    rows.extend(render::test_rows(&report.test));
                    rows.push(("common", report.common.join(",")));
                    Ok(render::table(&rows))
                }
            }
        }
        SeriesCommand::Classes {
            table,
            variable,
            ascending,
            output,
        } => {
            let table = load_table(&table)?;
            let classes = series::quintile_classes(&table, &variable, ascending)?;
            #[derive(Serialize)]
            struct Row<'a> {
                code: &'a str,
                name: &'a str,
                class: u8,
            }
            let rows: Vec<Row> = table
                .departments()
                .iter()
                .map(|d| Row {
                    code: &d.code,
                    name: &d.name,
                    class: classes[&d.code],
                })
                .collect();
            write_with(output.as_deref(), |buf| {
                let mut w = csv::Writer::from_writer(buf);
                for r in &rows {
                    w.serialize(r).map_err(|e| Error::Data(format!("csv: {e}")))?;
                }
                w.flush().map_err(|source| Error::Io {
                    path: PathBuf::from("<csv output>"),
                    source,
                })
            })?;
            match format {
                Format::Json => render::json(&rows),
                Format::Human => {
                    let sizes = series::quintile_sizes(table.len());
                    let mut out = format!("{variable}: N = {}, class sizes {sizes:?}\n", table.len());
                    for r in &rows {
                        out.push_str(&format!("{:<6} {:<24} {}\n", r.code, r.name, r.class));
                    }
                    Ok(out)
                }
            }
        }
        SeriesCommand::BigeonCorrect {
            table,
            schooling,
            life,
            output,
        } => {
            let table = load_table(&table)?;
            let corrected = series::bigeon_correction(&table, &schooling, &life)?;
            write_with(output.as_deref(), |buf| corrected.write_csv(buf))?;
            let ranking = series::rank_variable(&corrected, series::CORRECTED_INSTRUCTION, false)?;
            let values = corrected.variable(series::CORRECTED_INSTRUCTION)?;
            let by_code: std::collections::BTreeMap<&str, f64> = corrected
                .departments()
                .iter()
                .map(|d| d.code.as_str())
                .zip(values.iter().copied())
                .collect();
            match format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Row<'a> {
                        code: &'a str,
                        rank: usize,
                        corrected_instruction: f64,
                    }
                    let rows: Vec<Row> = ranking
                        .order
                        .iter()
                        .enumerate()
                        .map(|(i, c)| Row {
                            code: c,
                            rank: i + 1,
                            corrected_instruction: by_code[c.as_str()],
                        })
                        .collect();
                    render::json(&rows)
                }
                Format::Human => {
                    let mut out = format!("{}: {life} / {schooling}\n", series::CORRECTED_INSTRUCTION);
                    for (i, code) in ranking.order.iter().enumerate() {
                        out.push_str(&format!("{:>4}  {code:<6} {}\n", i + 1, by_code[code.as_str()]));
                    }
                    Ok(out)
                }
            }
        }
    }
}

fn serie_label(s: &series::Serie) -> String {
    format!("{} {} k={}", s.direction, s.variable, s.k)
}

fn load_archive(args: &ArchiveArgs) -> Result<(Vec<IssueRecord>, Normalization)> {
    let records = corpus::ingest_archive(&args.archive)?;
    let norm = Normalization {
        fold_diacritics: args.fold_diacritics,
    };
    Ok((records, norm))
}

fn series_text(s: &AnnualSeries) -> String {
    let mut out = format!("{}\n", s.pattern);
    for y in &s.years {
        let p = y.proportion.map_or_else(|| "-".to_string(), |p| format!("{p:.4}"));
        out.push_str(&format!("{}  {:>6}  {:>6}  {p}\n", y.year, y.issues, y.hits));
    }
    out
}

fn corpus_cmd(cmd: CorpusCommand, format: Format) -> Result<String> {
    match cmd {
        CorpusCommand::Scan {
            archive,
            pattern,
            mode: m,
            output,
        } => {
            let (records, norm) = load_archive(&archive)?;
            let s = corpus::annual_series(&records, &pattern, mode(m), norm)?;
            write_with(output.as_deref(), |buf| corpus::write_series_csv(&s, buf))?;
            match format {
                Format::Json => render::json(&s),
                Format::Human => Ok(series_text(&s)),
            }
        }
        CorpusCommand::Compare {
            archive,
            pattern,
            mode: m,
            period1,
            period2,
        } => {
            let (records, norm) = load_archive(&archive)?;
            let s = corpus::annual_series(&records, &pattern, mode(m), norm)?;
            let r = corpus::compare_periods(&s, period1, period2)?;
            render::test_result(&r, format)
        }
        CorpusCommand::Correlate {
            archive,
            pattern_a,
            pattern_b,
            mode: m,
        } => {
            let (records, norm) = load_archive(&archive)?;
            let a = corpus::annual_series(&records, &pattern_a, mode(m), norm)?;
            let b = corpus::annual_series(&records, &pattern_b, mode(m), norm)?;
            let r = corpus::correlate_series(&a, &b)?;
            render::test_result(&r, format)
        }
        CorpusCommand::Cooccur {
            archive,
            pattern_a,
            pattern_b,
            alpha,
            output,
        } => {
            let (records, norm) = load_archive(&archive)?;
            let rows = corpus::cooccurrence_by_year(&records, &pattern_a, &pattern_b, norm, alpha)?;
            write_with(output.as_deref(), |buf| corpus::write_cooccurrence_csv(&rows, buf))?;
            match format {
                Format::Json => render::json(&rows),
                Format::Human => {
                    let mut out = format!("{pattern_a} & {pattern_b}, alpha = {alpha}\nyear       N      a      b      x  p_value\n");
                    for r in &rows {
                        out.push_str(&format!(
                            "{}  {:>6} {:>6} {:>6} {:>6}  {}{}\n",
                            r.year,
                            r.issues,
                            r.a,
                            r.b,
                            r.both,
                            render::p3(r.test.p_value),
                            if r.significant { "  *" } else { "" }
                        ));
                    }
                    Ok(out)
                }
            }
        }
        CorpusCommand::Chart {
            archive,
            pattern,
            mode: m,
            mark,
            mark_cooccurrence,
            alpha,
            output,
        } => {
            let (records, norm) = load_archive(&archive)?;
            let all: Vec<AnnualSeries> = pattern
                .iter()
                .map(|p| corpus::annual_series(&records, p, mode(m), norm))
                .collect::<Result<_>>()?;
            let mut marks = mark;
            if let Some(pair) = &mark_cooccurrence {
                let rows = corpus::cooccurrence_by_year(&records, &pair[0], &pair[1], norm, alpha)?;
                marks.extend(rows.iter().filter(|r| r.significant).map(|r| r.year));
            }
            marks.sort_unstable();
            marks.dedup();
            let path = resolve_output(&output);
            corpus::emit_chart(&all, &marks, &path)?;
            match format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Chart<'a> {
                        path: String,
                        series: Vec<&'a str>,
                        marked_years: &'a [i32],
                    }
                    render::json(&Chart {
                        path: path.display().to_string(),
                        series: all.iter().map(|s| s.pattern.as_str()).collect(),
                        marked_years: &marks,
                    })
                }
                Format::Human => Ok(render::table(&[
                    ("chart", path.display().to_string()),
                    ("series", pattern.join(", ")),
                    (
                        "marked",
                        marks.iter().map(i32::to_string).collect::<Vec<_>>().join(", "),
                    ),
                ])),
            }
        }
    }
}
