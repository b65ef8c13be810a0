//! Command-line front end. [`run`] returns the process exit code: 0 on
//! success, 1 on usage errors, 2 when a computation fails.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::enumeration::DomainSpec;
use crate::error::Error;
use crate::ingest::{default_scheme, parse_qrels, parse_run, to_rankings};
use crate::intrinsic::{build_hasse, classify, order_domain, Category, ClassifyOptions, Spacing};
use crate::measures::{aggregate, registry, AggregateKind, Family, MeasureSpec};
use crate::model::{ContingencyTable, Element, GradeScheme, Ranking, Universe, UserContext};
use crate::report::{export_dot, paper_suite, render_table, run_suite, Format, LabelPolicy};

#[derive(Debug, Parser)]
#[command(name = "metriclass", version, about = "Scale-type classification of IR evaluation measures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List every measure id with its family, backend and formula.
    ListMeasures,
    /// Evaluate a measure on a single element.
    Evaluate(EvaluateArgs),
    /// Classify a measure on a domain.
    Classify(ClassifyArgs),
    /// Print the first collision or uneven spacing of a measure.
    Witness(WitnessArgs),
    /// Write the Hasse chain of a measure on a domain as DOT.
    Hasse(HasseArgs),
    /// Classify a reference suite and render the comparison table.
    Table(TableArgs),
    /// Evaluate a measure on a TREC run against qrels.
    IngestEval(IngestArgs),
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("element").required(true).args(["table", "ranking", "user"])))]
struct EvaluateArgs {
    /// Measure id, e.g. `recall`, `prec@4`, `rbp?p=1/2`.
    #[arg(long)]
    measure: MeasureSpec,
    /// Contingency table `tp=..,fp=..,fn=..,tn=..`.
    #[arg(long)]
    table: Option<String>,
    /// Comma-separated grades, e.g. `1,0,0,1`.
    #[arg(long)]
    ranking: Option<String>,
    /// User context `U=..,Rk=..,Ru=..,A=..`.
    #[arg(long)]
    user: Option<String>,
    /// Total relevant documents R (ranking only; defaults to the relevant count).
    #[arg(long, requires = "ranking")]
    relevant: Option<u64>,
    /// Collection size N (ranking only; defaults to length + R).
    #[arg(long, requires = "ranking")]
    collection: Option<u64>,
    /// Number of grades of the ranking's scheme (2 is binary).
    #[arg(long, default_value_t = 2, requires = "ranking")]
    grades: u8,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[arg(long)]
    measure: MeasureSpec,
    /// Domain, e.g. `binary:L=4,R=4` or `contingency:N=15,R=5,n=5`.
    #[arg(long)]
    domain: DomainSpec,
    /// Largest class count the interval oracle runs on.
    #[arg(long, default_value_t = 200)]
    oracle_cap: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct WitnessArgs {
    #[arg(long)]
    measure: MeasureSpec,
    /// Defaults to a domain suited to the measure's family.
    #[arg(long)]
    domain: Option<DomainSpec>,
}

#[derive(Debug, Args)]
struct HasseArgs {
    #[arg(long)]
    measure: MeasureSpec,
    #[arg(long)]
    domain: DomainSpec,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Labels::Elements)]
    labels: Labels,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long, value_enum, default_value_t = Suite::Paper)]
    suite: Suite,
    /// markdown, text, csv or json.
    #[arg(long, default_value = "markdown")]
    format: Format,
    #[arg(long, default_value_t = 200)]
    oracle_cap: usize,
}

#[derive(Debug, Args)]
struct IngestArgs {
    #[arg(long)]
    qrels: PathBuf,
    #[arg(long)]
    run: PathBuf,
    #[arg(long)]
    measure: MeasureSpec,
    /// Ranking depth L; runs are truncated or padded to it.
    #[arg(long)]
    depth: usize,
    #[arg(long, value_enum)]
    aggregate: Option<Aggregation>,
    /// Suppress the permissibility warning text (JSON keeps the flag).
    #[arg(long)]
    quiet_warnings: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Labels {
    Elements,
    Indices,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Suite {
    Paper,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Aggregation {
    Mean,
    Gmean,
}

enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

type CliResult = std::result::Result<(), Failure>;

/// Runs the command line `args` (program name first).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "usage error: {msg}");
            1
        }
        Err(Failure::Compute(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn io(e: std::io::Error) -> Failure {
    Failure::Compute(Error::Report(e.to_string()))
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    match command {
        Command::ListMeasures => list_measures(out),
        Command::Evaluate(a) => evaluate(a, out),
        Command::Classify(a) => {
            let opts = ClassifyOptions { oracle_cap: a.oracle_cap, ..ClassifyOptions::default() };
            let v = classify(&a.measure, &a.domain, &opts)?;
            match a.format {
                OutputFormat::Text => writeln!(out, "{v}").map_err(io),
                OutputFormat::Json => {
                    let text = serde_json::to_string_pretty(&v).map_err(|e| Error::Report(e.to_string()))?;
                    writeln!(out, "{text}").map_err(io)
                }
            }
        }
        Command::Witness(a) => witness(a, out),
        Command::Hasse(a) => {
            let od = order_domain(&a.measure, &a.domain, &ClassifyOptions::default())?;
            let policy = match a.labels {
                Labels::Elements => LabelPolicy::Elements,
                Labels::Indices => LabelPolicy::Indices,
            };
            let dot = export_dot(&build_hasse(&od), policy, &format!("{} on {}", a.measure, a.domain));
            match a.out {
                Some(path) => {
                    std::fs::write(&path, dot).map_err(io)?;
                    writeln!(out, "wrote {}", path.display()).map_err(io)
                }
                None => write!(out, "{dot}").map_err(io),
            }
        }
        Command::Table(a) => {
            let Suite::Paper = a.suite;
            let opts = ClassifyOptions { oracle_cap: a.oracle_cap, ..ClassifyOptions::default() };
            let report = run_suite(&paper_suite(), &opts)?;
            write!(out, "{}", render_table(&report, a.format)?).map_err(io)
        }
        Command::IngestEval(a) => ingest_eval(a, out, err),
    }
}

fn list_measures(out: &mut dyn Write) -> CliResult {
    for m in registry() {
        let family = match m.family() {
            Family::SetBased => "set-based",
            Family::UserOriented => "user-oriented",
            Family::RankBased => "rank-based",
        };
        writeln!(out, "{:<40} {:<14} {:<16} {}", m.to_string(), family, m.backend().to_string(), m.id.description())
            .map_err(io)?;
    }
    Ok(())
}

/// Parses `k=v,k=v` with exactly the given keys.
fn key_values(text: &str, keys: &[&str]) -> std::result::Result<Vec<u64>, Failure> {
    let mut vals = vec![None; keys.len()];
    for pair in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = pair.split_once('=').ok_or_else(|| Failure::Usage(format!("expected key=value, got `{pair}`")))?;
        let slot = keys
            .iter()
            .position(|key| key.eq_ignore_ascii_case(k.trim()))
            .ok_or_else(|| Failure::Usage(format!("unknown key `{k}`, expected {}", keys.join(", "))))?;
        vals[slot] = Some(v.trim().parse::<u64>().map_err(|_| Failure::Usage(format!("`{v}` is not a count")))?);
    }
    vals.into_iter()
        .zip(keys)
        .map(|(v, k)| v.ok_or_else(|| Failure::Usage(format!("missing `{k}`"))))
        .collect()
}

fn evaluate(a: EvaluateArgs, out: &mut dyn Write) -> CliResult {
    let element = if let Some(t) = &a.table {
        let v = key_values(t, &["tp", "fp", "fn", "tn"])?;
        Element::Table { table: ContingencyTable::new(v[0], v[1], v[2], v[3]) }
    } else if let Some(u) = &a.user {
        let v = key_values(u, &["U", "Rk", "Ru", "A"])?;
        Element::User { context: UserContext::new(v[0], v[1], v[2], v[3])? }
    } else {
        let text = a.ranking.as_deref().unwrap_or_default();
        let grades = text
            .split(',')
            .map(|g| g.trim().parse::<u8>().map_err(|_| Failure::Usage(format!("bad grade `{g}`"))))
            .collect::<std::result::Result<Vec<u8>, Failure>>()?;
        if a.grades < 2 {
            return Err(Failure::Usage("--grades must be at least 2".into()));
        }
        let scheme = Arc::new(if a.grades == 2 { GradeScheme::binary() } else { GradeScheme::graded(a.grades as usize) });
        let ranking = Ranking::new(scheme, grades)?;
        let r = a.relevant.unwrap_or_else(|| ranking.relevant_count());
        let n = a.collection.unwrap_or(ranking.len() as u64 + r);
        Element::ranked(ranking, Universe::new(n, r)?)
    };
    let v = a.measure.evaluate(&element)?;
    writeln!(out, "{v}").map_err(io)
}

fn default_domain(measure: &MeasureSpec) -> DomainSpec {
    let text = match measure.family() {
        Family::SetBased => "contingency:N=15,R=5,n=0..15",
        Family::UserOriented => "user:U=1..2,A=1..3",
        Family::RankBased => "binary:L=4,R=2",
    };
    text.parse().expect("default domains are valid")
}

fn witness(a: WitnessArgs, out: &mut dyn Write) -> CliResult {
    let domain = a.domain.unwrap_or_else(|| default_domain(&a.measure));
    let v = classify(&a.measure, &domain, &ClassifyOptions::default())?;
    let line = match (&v.collision, &v.spacing) {
        (Some(c), _) => format!("{}: collision {c}", a.measure.label()),
        (None, s @ Spacing::Uneven { .. }) => format!("{}: {s}", a.measure.label()),
        (None, _) => format!("{}: no witness, {} ({})", a.measure.label(), v.category, v.spacing),
    };
    writeln!(out, "{line}").map_err(io)?;
    writeln!(out, "domain: {domain}").map_err(io)
}

fn read(path: &PathBuf) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Compute(Error::Ingest(format!("{}: {e}", path.display()))))
}

fn ingest_eval(a: IngestArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let qrels = parse_qrels(&read(&a.qrels)?)?;
    let run = parse_run(&read(&a.run)?)?;
    let conv = to_rankings(&run, &qrels, &default_scheme(&qrels), a.depth)?;
    let mut per_topic = Vec::new();
    for t in &conv.topics {
        per_topic.push((t.topic.clone(), a.measure.eval_ranking(&t.ranking, &t.universe)?));
    }
    let agg = match a.aggregate {
        Some(kind) => {
            let kind = match kind {
                Aggregation::Mean => AggregateKind::Map,
                Aggregation::Gmean => AggregateKind::Gmap,
            };
            let values: Vec<_> = per_topic.iter().map(|(_, v)| v.clone()).collect();
            Some((kind, aggregate(&values, kind)?))
        }
        None => None,
    };
    // means are only permissible above the ordinal scale
    let ordinal = classify(&a.measure, &default_domain(&a.measure), &ClassifyOptions::default())
        .map(|v| v.category != Category::IntervalMetric)
        .unwrap_or(true);
    let warn = agg.is_some() && ordinal;
    match a.format {
        OutputFormat::Text => {
            for (topic, v) in &per_topic {
                writeln!(out, "{topic}\t{v}").map_err(io)?;
            }
            if let Some((kind, g)) = &agg {
                let name = if *kind == AggregateKind::Gmap { "gmean" } else { "mean" };
                writeln!(out, "{name}\t{}", g.value).map_err(io)?;
                if warn && !a.quiet_warnings {
                    writeln!(out, "{}", g.warning).map_err(io)?;
                }
            }
        }
        OutputFormat::Json => {
            let topics: Vec<_> = per_topic
                .iter()
                .map(|(t, v)| serde_json::json!({ "topic": t, "value": v, "display": v.to_string() }))
                .collect();
            let mut doc = serde_json::json!({
                "measure": a.measure.to_string(),
                "depth": a.depth,
                "topics": topics,
                "skipped": conv.skipped,
            });
            if let Some((_, g)) = &agg {
                doc["aggregate"] = serde_json::json!({
                    "value": g.value,
                    "display": g.value.to_string(),
                    "permissible": !warn,
                    "warning": if warn && !a.quiet_warnings { Some(g.warning) } else { None },
                });
            }
            let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Report(e.to_string()))?;
            writeln!(out, "{text}").map_err(io)?;
        }
    }
    for t in &conv.skipped {
        writeln!(err, "ingest: topic {t} has no judgments; skipped").map_err(io)?;
    }
    Ok(())
}
