use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use twistparity::descent::{cross_check_one, is_fourth_power_free};
use twistparity::record::{fixture_check, BatchItem, ClassificationRecord, ErrorRecord, RankFixture};
use twistparity::tables::builtin_table;
use twistparity::{classify, classify_quadratic, load_table, Error, Family, LocalInvariantTable, Rational};

#[derive(Parser)]
#[command(name = "twistparity", version, about = "Rank parity of quartic and sextic twists")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a single twist parameter.
    Classify {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Twist parameter, `a` or `a/b`.
        #[arg(short = 'd', allow_hyphen_values = true)]
        d: String,
        /// Local invariant table; required for the quadratic family.
        #[arg(long)]
        fixture: Option<PathBuf>,
    },
    /// Classify a range or a list of parameters, one JSON record per line.
    Batch {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        fixture: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Cross-check the quartic formula against the descent over a range.
    Verify {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
        range: (i64, i64),
        #[arg(long, value_enum, default_value = "quartic")]
        family: FamilyArg,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Emit the built-in local invariant tables or diff a file against them.
    Tables {
        #[command(subcommand)]
        action: TablesAction,
    },
    /// Compare formula parities with known ranks.
    FixtureCheck {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        fixture: PathBuf,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Inclusive integer range `a..b`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    range: Option<(i64, i64)>,
    /// File with one parameter per line; `#` starts a comment.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum TablesAction {
    Emit {
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
    },
    Check {
        #[arg(long)]
        fixture: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Quadratic,
    Quartic,
    Sextic,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Quadratic => Family::Quadratic,
            FamilyArg::Quartic => Family::Quartic,
            FamilyArg::Sextic => Family::Sextic,
        }
    }
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected `a..b`, got {s:?}"))?;
    let a: i64 = a.trim().parse().map_err(|_| format!("bad range start {a:?}"))?;
    let b: i64 = b.trim().parse().map_err(|_| format!("bad range end {b:?}"))?;
    if a > b {
        return Err(format!("empty range {s:?}"));
    }
    Ok((a, b))
}

/// A failure that ends the run with a specific exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_computational() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::usage(format!("i/o error: {e}"))
    }
}

type Outcome = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("twistparity: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Classify { family, d, fixture } => cmd_classify(family.into(), &d, fixture.as_deref()),
        Command::Batch { family, source, fixture, jobs } => {
            cmd_batch(family.into(), &source, fixture.as_deref(), jobs)
        }
        Command::Verify { range, family, jobs } => cmd_verify(family.into(), range, jobs),
        Command::Tables { action: TablesAction::Emit { family } } => cmd_tables_emit(family.map(Into::into)),
        Command::Tables { action: TablesAction::Check { fixture } } => cmd_tables_check(&fixture),
        Command::FixtureCheck { family, fixture } => cmd_fixture_check(family.into(), &fixture),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

/// Classifies with the built-in tables, or with a fixture for the quadratic family.
struct Classifier {
    family: Family,
    table: Option<LocalInvariantTable>,
}

impl Classifier {
    fn new(family: Family, fixture: Option<&Path>) -> Result<Self, Failure> {
        let table = match (family, fixture) {
            (Family::Quadratic, None) => {
                return Err(Failure::usage("the quadratic family needs --fixture <table>"))
            }
            (Family::Quadratic, Some(path)) => {
                let table = load_table(&read(path)?)?;
                if table.family() != Family::Quadratic {
                    return Err(Failure::usage(format!("{} is not a quadratic table", path.display())));
                }
                Some(table)
            }
            (_, Some(_)) => return Err(Failure::usage("--fixture only applies to the quadratic family")),
            (_, None) => None,
        };
        Ok(Classifier { family, table })
    }

    fn classify(&self, d: &Rational) -> twistparity::Result<ClassificationRecord> {
        let breakdown = match &self.table {
            Some(table) => classify_quadratic(d, table)?,
            None => classify(self.family, d)?,
        };
        Ok(ClassificationRecord::from(&breakdown))
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::usage(format!("cannot start worker pool: {e}")))
}

fn cmd_classify(family: Family, d: &str, fixture: Option<&Path>) -> Outcome {
    let classifier = Classifier::new(family, fixture)?;
    let d: Rational = d.parse()?;
    let record = classifier.classify(&d)?;
    println!("{}", record.to_json_line());
    Ok(ExitCode::SUCCESS)
}

fn batch_inputs(source: &Source) -> Result<Vec<String>, Failure> {
    if let Some((a, b)) = source.range {
        return Ok((a..=b).map(|d| d.to_string()).collect());
    }
    let path = source.input.as_deref().expect("clap enforces one source");
    Ok(read(path)?
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

fn cmd_batch(family: Family, source: &Source, fixture: Option<&Path>, jobs: usize) -> Outcome {
    let classifier = Classifier::new(family, fixture)?;
    let inputs = batch_inputs(source)?;
    let items: Vec<BatchItem> = pool(jobs)?.install(|| {
        inputs
            .par_iter()
            .map(|input| {
                match input.parse::<Rational>().and_then(|d| classifier.classify(&d)) {
                    Ok(record) => BatchItem::Ok(record),
                    Err(e) => BatchItem::Err(ErrorRecord {
                        family,
                        input: input.clone(),
                        error: e.to_string(),
                    }),
                }
            })
            .collect()
    });
    let mut out = BufWriter::new(io::stdout().lock());
    for item in &items {
        writeln!(out, "{}", item.to_json_line())?;
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(family: Family, (lo, hi): (i64, i64), jobs: usize) -> Outcome {
    if family != Family::Quartic {
        return Err(Failure::usage("the descent oracle covers the quartic family only"));
    }
    let ds: Vec<num_bigint::BigInt> = (lo..=hi).map(Into::into).collect();
    let entries = pool(jobs)?.install(|| {
        ds.par_iter()
            .map(|d| match is_fourth_power_free(d)? {
                true => cross_check_one(d).map(Some),
                false => Ok(None),
            })
            .collect::<twistparity::Result<Vec<_>>>()
    })?;
    let mut out = BufWriter::new(io::stdout().lock());
    let (mut checked, mut disagreements) = (0, 0);
    for entry in entries.into_iter().flatten() {
        checked += 1;
        disagreements += usize::from(!entry.agree);
        writeln!(out, "{}", serde_json::to_string(&entry).expect("entries serialize"))?;
    }
    out.flush()?;
    eprintln!("verify {lo}..{hi}: {checked} checked, {disagreements} disagreements");
    Ok(if disagreements == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_tables_emit(family: Option<Family>) -> Outcome {
    let families = match family {
        Some(f) => vec![f],
        None => vec![Family::Quartic, Family::Sextic],
    };
    for f in families {
        print!("{}", builtin_table(f)?.to_text());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_tables_check(path: &Path) -> Outcome {
    let user = load_table(&read(path)?)?;
    let builtin = builtin_table(user.family())?;
    let diffs = builtin.diff(&user);
    for d in &diffs {
        println!("{d}");
    }
    Ok(if diffs.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_fixture_check(family: Family, path: &Path) -> Outcome {
    let fixture = RankFixture::parse(&read(path)?, family)?;
    let entries = fixture_check(&fixture)?;
    let mut out = BufWriter::new(io::stdout().lock());
    for e in &entries {
        writeln!(out, "{}", serde_json::to_string(e).expect("entries serialize"))?;
    }
    out.flush()?;
    let bad = entries.iter().filter(|e| !e.agree).count();
    eprintln!("fixture-check: {} entries, {bad} mismatches", entries.len());
    Ok(if bad == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
