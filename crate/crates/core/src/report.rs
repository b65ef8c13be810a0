//! Classification reports: the reference suite, table rendering, DOT export
//! of Hasse chains, and the versioned JSON record.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::enumeration::DomainSpec;
use crate::error::{Error, Result};
use crate::intrinsic::{classify, Category, ClassifyOptions, Hasse, Verdict};
use crate::measures::MeasureSpec;

/// Top-level schema tag of the JSON record.
pub const SCHEMA: &str = "metriclass/1";

/// Rendered in place of a witness when the measure is injective.
pub const NO_WITNESS: &str = "—";

/// One measure of a suite with the category it is compared against and the
/// domains it is classified on.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRow {
    pub label: &'static str,
    pub measure: MeasureSpec,
    /// `None` when there is no published category to compare with.
    pub expected: Option<Category>,
    pub domains: Vec<DomainSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteTable {
    pub name: &'static str,
    pub rows: Vec<SuiteRow>,
}

fn row(label: &'static str, measure: &str, expected: Option<Category>, domains: &[&str]) -> SuiteRow {
    SuiteRow {
        label,
        measure: measure.parse().expect("suite measure ids are valid"),
        expected,
        domains: domains.iter().map(|d| d.parse().expect("suite domains are valid")).collect(),
    }
}

/// Set-based and rank-based reference tables.
pub fn paper_suite() -> Vec<SuiteTable> {
    use Category::*;
    const SET: &[&str] = &["contingency:N=15,R=5,n=5", "contingency:N=15,R=5,n=0..15"];
    const USER: &[&str] = &["user:U=1..2,A=1..3"];
    const RANK: &[&str] = &["binary:L=4,R=4", "binary:L=8,R=4", "graded:grades=5,L=4,R=4"];
    let rank_plus = |extra: &[&'static str]| -> Vec<&'static str> { RANK.iter().copied().chain(extra.iter().copied()).collect() };
    const ROCCHIO: &[&str] = &["binary:L=4,R=2", "binary:L=8,R=4", "graded:grades=5,L=4,R=2"];

    let set_based = vec![
        row("recall", "recall", Some(IntervalMetric), SET),
        row("precision", "precision", Some(IntervalMetric), SET),
        row("fallout", "fallout", Some(IntervalMetric), SET),
        row("miss rate", "miss-rate", Some(IntervalMetric), SET),
        row("classification accuracy", "accuracy", Some(IntervalMetric), SET),
        row("error rate", "error-rate", Some(IntervalMetric), SET),
        row("inverse recall", "inverse-recall", Some(IntervalMetric), SET),
        row("inverse precision", "inverse-precision", Some(IntervalMetric), SET),
        row("specificity", "specificity", Some(IntervalMetric), SET),
        row("false discovery rate", "fdr", Some(IntervalMetric), SET),
        row("false omission rate", "for", Some(IntervalMetric), SET),
        row("F-measure", "f-measure", Some(OrdinalMetric), SET),
        row("generality", "generality", Some(OrdinalPseudometric), SET),
        row("utility", "utility?alpha=1&beta=1&gamma=1&delta=1", None, SET),
        row("coverage ratio", "coverage-ratio", Some(OrdinalPseudometric), USER),
        row("retrieval recall", "retrieval-recall", Some(OrdinalPseudometric), USER),
        row("novelty ratio", "novelty-ratio", Some(OrdinalPseudometric), USER),
        row("recall effort", "recall-effort", Some(OrdinalPseudometric), USER),
    ];

    let rank_based = vec![
        row("Prec@r", "prec@4", Some(OrdinalPseudometric), RANK),
        row("R-precision", "r-precision", Some(OrdinalPseudometric), &rank_plus(&["binary:L=4,R=2"])),
        row("sliding ratio", "sr", Some(OrdinalPseudometric), &rank_plus(&["binary:L=4,R=1"])),
        row("modified sliding ratio", "msr", Some(OrdinalMetric), &rank_plus(&["binary:L=4,R=1"])),
        row("Rnorm", "rnorm", Some(IntervalMetric), ROCCHIO),
        row("Pnorm", "pnorm", Some(OrdinalMetric), ROCCHIO),
        row("R-WP", "r-wp", Some(OrdinalPseudometric), &rank_plus(&["binary:L=4,R=2"])),
        row("R-measure", "r-measure", Some(OrdinalPseudometric), &rank_plus(&["binary:L=4,R=2"])),
        row("AP", "ap", Some(OrdinalPseudometric), RANK),
        row("AWP", "awp", Some(OrdinalPseudometric), &rank_plus(&["binary:L=4,R=2"])),
        row("Q-measure", "q-measure", Some(OrdinalPseudometric), RANK),
        row("RR", "rr", Some(OrdinalPseudometric), RANK),
        row("DCG_b", "dcg?b=2", Some(OrdinalPseudometric), RANK),
        row("RBP_p", "rbp?p=golden", Some(OrdinalPseudometric), &["binary:L=3,R=3", "binary:L=4,R=4"]),
        row("RBP_p", "rbp?p=1/2", Some(OrdinalPseudometric), &["binary:L=4,R=4"]),
        row("bpref", "bpref", Some(OrdinalPseudometric), &rank_plus(&["binary:L=1..2,R=1..2"])),
        row("nxCG[r]", "nxcg@4", Some(OrdinalPseudometric), &rank_plus(&["binary:L=4,R=1"])),
        row("MAnxCG[r]", "manxcg@4", Some(OrdinalPseudometric), &rank_plus(&["binary:L=4,R=1"])),
        row("gr[r]", "gr@4", Some(OrdinalPseudometric), &rank_plus(&["binary:L=4,R=1"])),
        row("esl", "esl?size=2&s=1", Some(OrdinalPseudometric), &["binary:L=4,R=4"]),
    ];

    vec![
        SuiteTable { name: "set-based retrieval", rows: set_based },
        SuiteTable { name: "rank-based retrieval", rows: rank_based },
    ]
}

/// One `(measure, domain)` classification with its comparison target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub label: String,
    pub expected: Option<Category>,
    /// `expected == found`; absent when there is nothing to compare.
    pub agree: Option<bool>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// The expected category is found on at least one domain.
    Agree,
    /// No domain yields the expected category.
    Contested,
    NotApplicable,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Agree => "agree",
            Status::Contested => "contested",
            Status::NotApplicable => "n/a",
        }
    }
}

/// Per-measure outcome over all of its rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSummary {
    pub label: String,
    pub expected: Option<Category>,
    pub found: Vec<Category>,
    pub status: Status,
    /// Collision `label: x = y = v` backing the status, if any.
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportTable {
    pub name: String,
    pub rows: Vec<ReportRow>,
    pub summary: Vec<MeasureSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub schema: String,
    pub version: String,
    pub tables: Vec<ReportTable>,
}

impl ClassificationReport {
    pub fn rows(&self) -> impl Iterator<Item = &ReportRow> {
        self.tables.iter().flat_map(|t| t.rows.iter())
    }

    pub fn summaries(&self) -> impl Iterator<Item = &MeasureSummary> {
        self.tables.iter().flat_map(|t| t.summary.iter())
    }

    pub fn summary(&self, label: &str) -> Option<&MeasureSummary> {
        self.summaries().find(|s| s.label == label)
    }
}

fn witness_text(row: &ReportRow) -> Option<String> {
    row.verdict.collision.as_ref().map(|c| format!("{}: {c}", row.verdict.measure.label()))
}

/// Classifies every row of `suite` on each of its domains.
pub fn run_suite(suite: &[SuiteTable], options: &ClassifyOptions) -> Result<ClassificationReport> {
    let mut tables = Vec::new();
    for table in suite {
        let mut rows = Vec::new();
        for r in &table.rows {
            for d in &r.domains {
                let verdict = classify(&r.measure, d, options)?;
                rows.push(ReportRow {
                    label: r.label.to_string(),
                    expected: r.expected,
                    agree: r.expected.map(|e| e == verdict.category),
                    verdict,
                });
            }
        }
        let mut summary: Vec<MeasureSummary> = Vec::new();
        for row in &rows {
            let s = match summary.iter_mut().find(|s| s.label == row.label) {
                Some(s) => s,
                None => {
                    summary.push(MeasureSummary {
                        label: row.label.clone(),
                        expected: row.expected,
                        found: Vec::new(),
                        status: Status::NotApplicable,
                        witness: None,
                    });
                    summary.last_mut().expect("just pushed")
                }
            };
            if !s.found.contains(&row.verdict.category) {
                s.found.push(row.verdict.category);
            }
        }
        for s in &mut summary {
            s.status = match s.expected {
                None => Status::NotApplicable,
                Some(e) if s.found.contains(&e) => Status::Agree,
                Some(_) => Status::Contested,
            };
            // evidence comes from the first agreeing row, else the first collision
            let mine = rows.iter().filter(|r| r.label == s.label);
            s.witness = match s.status {
                Status::Agree => mine.clone().find(|r| r.agree == Some(true)).and_then(witness_text),
                _ => mine.clone().find_map(witness_text),
            };
        }
        tables.push(ReportTable { name: table.name.to_string(), rows, summary });
    }
    Ok(ClassificationReport { schema: SCHEMA.to_string(), version: env!("CARGO_PKG_VERSION").to_string(), tables })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Markdown,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "text" | "txt" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "markdown" | "md" => Ok(Format::Markdown),
            "json" => Ok(Format::Json),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

const HEADER: [&str; 8] = ["measure", "domain", "ord/pseudom", "ord/metr", "interv/metr", "expected", "agree", "witness"];

fn cells(row: &ReportRow) -> [String; 8] {
    let mark = |c: Category| if row.verdict.category == c { "✓" } else { "" }.to_string();
    [
        row.label.clone(),
        row.verdict.domain.clone(),
        mark(Category::OrdinalPseudometric),
        mark(Category::OrdinalMetric),
        mark(Category::IntervalMetric),
        row.expected.map_or("n/a".to_string(), |c| c.to_string()),
        match row.agree {
            Some(true) => "agree".into(),
            Some(false) => "disagree".into(),
            None => "n/a".into(),
        },
        witness_text(row).unwrap_or_else(|| NO_WITNESS.to_string()),
    ]
}

fn summary_cells(s: &MeasureSummary) -> [String; 5] {
    [
        s.label.clone(),
        s.expected.map_or("n/a".to_string(), |c| c.to_string()),
        s.found.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(", "),
        s.status.as_str().to_string(),
        s.witness.clone().unwrap_or_else(|| NO_WITNESS.to_string()),
    ]
}

const SUMMARY_HEADER: [&str; 5] = ["measure", "expected", "found", "status", "witness"];

/// Renders a report. CSV holds one line per verdict after the header.
pub fn render_table(report: &ClassificationReport, format: Format) -> Result<String> {
    if report.tables.iter().all(|t| t.rows.is_empty()) {
        return Err(Error::Report("empty report".into()));
    }
    match format {
        Format::Json => emit_json(report),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["table"];
            header.extend(HEADER);
            w.write_record(&header).map_err(|e| Error::Report(e.to_string()))?;
            for t in &report.tables {
                for r in &t.rows {
                    let mut rec = vec![t.name.clone()];
                    rec.extend(cells(r));
                    w.write_record(&rec).map_err(|e| Error::Report(e.to_string()))?;
                }
            }
            let bytes = w.into_inner().map_err(|e| Error::Report(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Report(e.to_string()))
        }
        Format::Markdown => {
            let mut out = String::new();
            for t in &report.tables {
                let _ = writeln!(out, "## {}\n", t.name);
                markdown(&mut out, &HEADER, t.rows.iter().map(|r| cells(r).to_vec()));
                let _ = writeln!(out);
                markdown(&mut out, &SUMMARY_HEADER, t.summary.iter().map(|s| summary_cells(s).to_vec()));
                let _ = writeln!(out);
            }
            Ok(out)
        }
        Format::Text => {
            let mut out = String::new();
            for t in &report.tables {
                let _ = writeln!(out, "{}", t.name);
                aligned(&mut out, &HEADER, t.rows.iter().map(|r| cells(r).to_vec()));
                let _ = writeln!(out);
                aligned(&mut out, &SUMMARY_HEADER, t.summary.iter().map(|s| summary_cells(s).to_vec()));
                let _ = writeln!(out);
            }
            Ok(out)
        }
    }
}

fn markdown(out: &mut String, header: &[&str], rows: impl Iterator<Item = Vec<String>>) {
    let _ = writeln!(out, "| {} |", header.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
    for r in rows {
        let escaped: Vec<String> = r.iter().map(|c| c.replace('|', "\\|")).collect();
        let _ = writeln!(out, "| {} |", escaped.join(" | "));
    }
}

fn aligned(out: &mut String, header: &[&str], rows: impl Iterator<Item = Vec<String>>) {
    let rows: Vec<Vec<String>> = rows.collect();
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in &rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cols: Vec<&str>| -> String {
        let padded: Vec<String> = cols
            .iter()
            .zip(&width)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    let _ = writeln!(out, "{}", line(header.to_vec()));
    for r in &rows {
        let _ = writeln!(out, "{}", line(r.iter().map(String::as_str).collect()));
    }
}

pub fn emit_json(report: &ClassificationReport) -> Result<String> {
    serde_json::to_string_pretty(report).map_err(|e| Error::Report(e.to_string()))
}

pub fn parse_json(text: &str) -> Result<ClassificationReport> {
    let report: ClassificationReport = serde_json::from_str(text).map_err(|e| Error::Report(e.to_string()))?;
    if report.schema != SCHEMA {
        return Err(Error::Report(format!("unsupported schema `{}`", report.schema)));
    }
    Ok(report)
}

/// How Hasse nodes name their members.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelPolicy {
    /// The element itself, e.g. `⟨1,0,0,0⟩`.
    Elements,
    /// Enumeration positions, `x1`, `x2`, ...
    Indices,
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// DOT text for a Hasse chain: one node per class listing its members, one
/// edge per consecutive pair labelled with the gap.
pub fn export_dot(h: &Hasse, labels: LabelPolicy, title: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph hasse {{");
    let _ = writeln!(out, "  label=\"{}\";", dot_escape(title));
    let _ = writeln!(out, "  rankdir=BT;");
    let _ = writeln!(out, "  node [shape=box];");
    for (k, node) in h.nodes.iter().enumerate() {
        let members: Vec<String> = match labels {
            LabelPolicy::Elements => node.members.clone(),
            LabelPolicy::Indices => node.indices.iter().map(|i| format!("x{}", i + 1)).collect(),
        };
        let _ = writeln!(
            out,
            "  c{k} [label=\"{}\\n{{{}}}\"];",
            dot_escape(&node.value.fraction()),
            dot_escape(&members.join(", "))
        );
    }
    for e in &h.edges {
        let _ = writeln!(out, "  c{} -> c{} [label=\"{}\"];", e.from, e.to, dot_escape(&e.weight.fraction()));
    }
    out.push_str("}\n");
    out
}
