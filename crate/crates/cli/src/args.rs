use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Historical statistical tests, d'Angeville séries and newspaper-archive
/// trends.
///
/// Relative output paths are resolved against $STATMODE_OUTPUT_DIR when it is
/// set, otherwise against the working directory.
#[derive(Debug, Parser)]
#[command(name = "statmode", version, propagate_version = true)]
pub struct Cli {
    /// Output style on standard output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Aligned text, p-values to 3 significant digits plus log_p.
    Human,
    /// One JSON document with full-precision numbers.
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a single test on numbers given as flags.
    #[command(subcommand)]
    Test(TestCommand),
    /// Ranks, séries and quintile classes over a departments CSV.
    #[command(subcommand)]
    Series(SeriesCommand),
    /// Annual pattern frequencies in a dated archive.
    #[command(subcommand)]
    Corpus(CorpusCommand),
    /// Recompute every published value and print a pass/fail table. Exits 3
    /// if any check fails.
    Replicate,
}

#[derive(Debug, Subcommand)]
pub enum TestCommand {
    /// Probability that n periods all fall the same way by chance, 2^-n.
    Arbuthnot {
        /// Number of periods (years) observed.
        #[arg(long)]
        periods: u32,
    },
    /// Posterior probability that a proportion lies at or below a threshold.
    Laplace {
        #[arg(long)]
        successes: u64,
        #[arg(long)]
        failures: u64,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
    },
    /// Posterior probability that group 1's proportion exceeds group 2's.
    Laplace2 {
        #[arg(long)]
        s1: u64,
        #[arg(long)]
        f1: u64,
        #[arg(long)]
        s2: u64,
        #[arg(long)]
        f2: u64,
        /// Exact finite sum, or the normal approximation to the Beta
        /// difference.
        #[arg(long, value_enum, default_value_t = Laplace2Method::Exact)]
        method: Laplace2Method,
    },
    /// Cournot's P and Pi for a deviation from a reference proportion.
    Cournot {
        /// Observed count.
        #[arg(long)]
        x: u64,
        /// Number of trials.
        #[arg(long)]
        n: u64,
        /// Reference proportion, strictly between 0 and 1.
        #[arg(long)]
        p0: f64,
    },
    /// Fisher's exact test on the overlap of two subsets.
    Fisher {
        /// Population size.
        #[arg(long = "N")]
        population: u64,
        /// Size of the first subset.
        #[arg(long = "K")]
        first: u64,
        /// Size of the second subset.
        #[arg(long = "n")]
        second: u64,
        /// Observed overlap.
        #[arg(long, allow_negative_numbers = true)]
        x: i64,
        #[arg(long, value_enum, default_value_t = TailArg::Ge)]
        tail: TailArg,
    },
    /// Two-sample Student t test, two-sided.
    Student {
        /// First sample, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        xs: Vec<f64>,
        /// Second sample, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        ys: Vec<f64>,
        /// Use Welch's unequal-variance statistic instead of the pooled one [default: off].
        #[arg(long, default_value_t = false)]
        welch: bool,
    },
    /// Pearson correlation with a two-sided t-based p-value.
    Pearson {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        xs: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        ys: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Laplace2Method {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TailArg {
    /// Overlap at least x.
    Ge,
    /// Overlap at most x.
    Le,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    /// Largest values.
    Top,
    /// Smallest values.
    Bottom,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Departments CSV: code, name, then numeric columns.
    #[arg(long)]
    pub input: PathBuf,
    /// Department codes to drop, comma separated [default: none].
    #[arg(long, value_delimiter = ',')]
    pub exclude: Vec<String>,
    /// Read `12,5` as 12.5 (such cells must be quoted) [default: off].
    #[arg(long, default_value_t = false)]
    pub decimal_comma: bool,
}

#[derive(Debug, Subcommand)]
pub enum SeriesCommand {
    /// Rank, série membership and quintile class of every department.
    Rank {
        #[command(flatten)]
        table: TableArgs,
        #[arg(long)]
        variable: String,
        /// Rank 1 is the smallest value instead of the largest [default: off].
        #[arg(long, default_value_t = false)]
        ascending: bool,
        /// Série size [default: floor(N/5)].
        #[arg(long)]
        k: Option<usize>,
        /// Also write the report as CSV [default: no file].
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Overlap of two séries and its Fisher test.
    Intersect {
        #[command(flatten)]
        table: TableArgs,
        #[arg(long)]
        first: String,
        #[arg(long, value_enum, default_value_t = DirectionArg::Top)]
        first_direction: DirectionArg,
        #[arg(long)]
        second: String,
        #[arg(long, value_enum, default_value_t = DirectionArg::Top)]
        second_direction: DirectionArg,
        /// Série size [default: floor(N/5)].
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = TailArg::Ge)]
        tail: TailArg,
        /// Also write the JSON report [default: no file].
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Quintile class 1..5 of every department.
    Classes {
        #[command(flatten)]
        table: TableArgs,
        #[arg(long)]
        variable: String,
        /// Class 1 holds the smallest values instead of the largest [default: off].
        #[arg(long, default_value_t = false)]
        ascending: bool,
        /// Also write code,name,class as CSV [default: no file].
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Add corrected_instruction = life / schooling.
    BigeonCorrect {
        #[command(flatten)]
        table: TableArgs,
        #[arg(long)]
        schooling: String,
        #[arg(long)]
        life: String,
        /// Write the augmented table as CSV [default: no file].
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Share of issues with at least one hit.
    DocFreq,
    /// Occurrences per issue.
    OccCount,
}

#[derive(Debug, Args)]
pub struct ArchiveArgs {
    /// JSONL file of {id, date, text} or directory of YYYY-MM-DD_<id>.txt.
    #[arg(long)]
    pub archive: PathBuf,
    /// Also strip accents before matching [default: off].
    #[arg(long, default_value_t = false)]
    pub fold_diacritics: bool,
}

#[derive(Debug, Subcommand)]
pub enum CorpusCommand {
    /// Per-year counts and proportions for one pattern.
    Scan {
        #[command(flatten)]
        archive: ArchiveArgs,
        #[arg(long)]
        pattern: String,
        #[arg(long, value_enum, default_value_t = ModeArg::DocFreq)]
        mode: ModeArg,
        /// Also write year,issues,hits,proportion as CSV [default: no file].
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Student test between the annual proportions of two periods.
    Compare {
        #[command(flatten)]
        archive: ArchiveArgs,
        #[arg(long)]
        pattern: String,
        #[arg(long, value_enum, default_value_t = ModeArg::DocFreq)]
        mode: ModeArg,
        /// First period, e.g. 1814-1826.
        #[arg(long, value_parser = parse_period)]
        period1: RangeInclusive<i32>,
        /// Second period, e.g. 1828-1848.
        #[arg(long, value_parser = parse_period)]
        period2: RangeInclusive<i32>,
    },
    /// Pearson correlation of two patterns' annual proportions.
    Correlate {
        #[command(flatten)]
        archive: ArchiveArgs,
        #[arg(long)]
        pattern_a: String,
        #[arg(long)]
        pattern_b: String,
        #[arg(long, value_enum, default_value_t = ModeArg::DocFreq)]
        mode: ModeArg,
    },
    /// Yearly Fisher test on issues containing both patterns.
    Cooccur {
        #[command(flatten)]
        archive: ArchiveArgs,
        #[arg(long)]
        pattern_a: String,
        #[arg(long)]
        pattern_b: String,
        /// Significance level for flagging years.
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Also write year,N,a,b,x,p_value,significant as CSV [default: no file].
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// SVG chart of annual proportions with marked years.
    Chart {
        #[command(flatten)]
        archive: ArchiveArgs,
        /// Pattern to plot; repeat for several series.
        #[arg(long, required = true)]
        pattern: Vec<String>,
        #[arg(long, value_enum, default_value_t = ModeArg::DocFreq)]
        mode: ModeArg,
        /// Years to mark, comma separated [default: none].
        #[arg(long, value_delimiter = ',')]
        mark: Vec<i32>,
        /// Also mark years where these two patterns co-occur significantly
        /// [default: none].
        #[arg(long, num_args = 2, value_names = ["A", "B"])]
        mark_cooccurrence: Option<Vec<String>>,
        /// Significance level for --mark-cooccurrence.
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// SVG file to write.
        #[arg(long, default_value = "chart.svg")]
        output: PathBuf,
    },
}

fn parse_period(s: &str) -> Result<RangeInclusive<i32>, String> {
    let (a, b) = s
        .split_once('-')
        .ok_or_else(|| format!("expected FIRST-LAST, got {s:?}"))?;
    let a: i32 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: i32 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if a > b {
        return Err(format!("period {a}-{b} runs backwards"));
    }
    Ok(a..=b)
}
