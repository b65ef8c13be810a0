//! TREC qrels and run files.
//!
//! Qrels lines are `topic iter doc grade`; run lines are
//! `topic Q0 doc rank score tag`. Both are whitespace separated, one record
//! per line, LF or CRLF. Run documents are ordered by descending score with
//! ties broken by ascending document id; the stated rank is kept only for
//! diagnostics.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{GradeScheme, Ranking, Universe};

/// Relevance judgments by topic and document.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Qrels {
    pub judgments: BTreeMap<String, BTreeMap<String, u32>>,
}

impl Qrels {
    pub fn topics(&self) -> impl Iterator<Item = &str> {
        self.judgments.keys().map(String::as_str)
    }

    pub fn grade(&self, topic: &str, doc: &str) -> Option<u32> {
        self.judgments.get(topic)?.get(doc).copied()
    }

    /// Distinct grades judged for `topic`.
    pub fn inventory(&self, topic: &str) -> BTreeSet<u32> {
        self.judgments.get(topic).map(|docs| docs.values().copied().collect()).unwrap_or_default()
    }

    pub fn max_grade(&self) -> u32 {
        self.judgments.values().flat_map(|d| d.values().copied()).max().unwrap_or(0)
    }

    /// Number of judgments.
    pub fn len(&self) -> usize {
        self.judgments.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Serialises back to qrels lines, topics and documents sorted.
    pub fn to_trec(&self) -> String {
        let mut out = String::new();
        for (topic, docs) in &self.judgments {
            for (doc, grade) in docs {
                out.push_str(&format!("{topic} 0 {doc} {grade}\n"));
            }
        }
        out
    }
}

fn fields(line: &str) -> Vec<&str> {
    line.split_whitespace().collect()
}

fn is_blank(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

pub fn parse_qrels(text: &str) -> Result<Qrels> {
    let mut q = Qrels::default();
    for (n, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        if is_blank(line) {
            continue;
        }
        let f = fields(line);
        if f.len() != 4 {
            return Err(Error::Parse { line: n, message: format!("expected `topic iter doc grade`, found {} fields", f.len()) });
        }
        let grade: i64 = f[3]
            .parse()
            .map_err(|_| Error::Parse { line: n, message: format!("grade `{}` is not an integer", f[3]) })?;
        if grade < 0 {
            return Err(Error::Parse { line: n, message: format!("negative grade {grade}") });
        }
        let grade = u32::try_from(grade).map_err(|_| Error::Parse { line: n, message: "grade too large".into() })?;
        let docs = q.judgments.entry(f[0].to_string()).or_default();
        if docs.insert(f[2].to_string(), grade).is_some() {
            return Err(Error::Parse { line: n, message: format!("duplicate judgment for topic {} doc {}", f[0], f[2]) });
        }
    }
    Ok(q)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub doc: String,
    /// Rank as stated in the file.
    pub rank: i64,
    pub score: f64,
}

/// A system's retrieved documents per topic, in evaluation order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunSet {
    pub tag: String,
    pub topics: BTreeMap<String, Vec<RunEntry>>,
}

pub fn parse_run(text: &str) -> Result<RunSet> {
    let mut run = RunSet::default();
    let mut seen: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (n, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        if is_blank(line) {
            continue;
        }
        let f = fields(line);
        if f.len() != 6 {
            let message = if f.len() == 5 {
                "missing run tag (expected `topic Q0 doc rank score tag`)".to_string()
            } else {
                format!("expected `topic Q0 doc rank score tag`, found {} fields", f.len())
            };
            return Err(Error::Parse { line: n, message });
        }
        let rank: i64 = f[3].parse().map_err(|_| Error::Parse { line: n, message: format!("rank `{}` is not an integer", f[3]) })?;
        let score: f64 = f[4].parse().map_err(|_| Error::Parse { line: n, message: format!("score `{}` is not a number", f[4]) })?;
        if !score.is_finite() {
            return Err(Error::Parse { line: n, message: "score must be finite".into() });
        }
        if run.tag.is_empty() {
            run.tag = f[5].to_string();
        } else if run.tag != f[5] {
            return Err(Error::Parse { line: n, message: format!("run tag `{}` differs from `{}`", f[5], run.tag) });
        }
        if !seen.entry(f[0].to_string()).or_default().insert(f[2].to_string()) {
            return Err(Error::Parse { line: n, message: format!("duplicate document {} for topic {}", f[2], f[0]) });
        }
        run.topics.entry(f[0].to_string()).or_default().push(RunEntry { doc: f[2].to_string(), rank, score });
    }
    for entries in run.topics.values_mut() {
        entries.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.doc.cmp(&b.doc)));
    }
    Ok(run)
}

/// Binary when every judged grade is 0 or 1, otherwise equally spaced gains
/// over `0..=max grade`.
pub fn default_scheme(qrels: &Qrels) -> Arc<GradeScheme> {
    match qrels.max_grade() {
        0 | 1 => Arc::new(GradeScheme::binary()),
        m => Arc::new(GradeScheme::graded(m as usize + 1)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicRanking {
    pub topic: String,
    pub ranking: Ranking,
    pub universe: Universe,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conversion {
    pub topics: Vec<TopicRanking>,
    /// Run topics absent from the qrels.
    pub skipped: Vec<String>,
}

/// Maps each run topic to a ranking of exactly `depth` grades. Unjudged
/// documents take the lowest grade; the universe's relevant inventory is
/// the topic's judged relevant documents per grade.
pub fn to_rankings(run: &RunSet, qrels: &Qrels, scheme: &Arc<GradeScheme>, depth: usize) -> Result<Conversion> {
    if depth == 0 {
        return Err(Error::Ingest("depth must be positive".into()));
    }
    let max = qrels.max_grade() as usize;
    if max >= scheme.len() {
        return Err(Error::Ingest(format!("grade {max} is outside a scheme of {} grades", scheme.len())));
    }
    let skipped: Vec<String> = run.topics.keys().filter(|t| !qrels.judgments.contains_key(*t)).cloned().collect();
    let topics = run
        .topics
        .par_iter()
        .filter_map(|(topic, entries)| qrels.judgments.get(topic).map(|judged| (topic, entries, judged)))
        .map(|(topic, entries, judged)| {
            let grades: Vec<u8> = entries
                .iter()
                .take(depth)
                .map(|e| judged.get(&e.doc).copied().unwrap_or(0) as u8)
                .collect();
            let ranking = Ranking::new(scheme.clone(), grades)?.with_depth(depth);
            let mut inventory = vec![0u64; scheme.len()];
            for &g in judged.values().filter(|&&g| g > 0) {
                inventory[g as usize] += 1;
            }
            let unjudged_retrieved = entries.iter().filter(|e| !judged.contains_key(&e.doc)).count();
            let collection = (judged.len() + unjudged_retrieved).max(depth) as u64;
            let universe = Universe::with_inventory(collection, inventory)?;
            Ok(TopicRanking { topic: topic.clone(), ranking, universe })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Conversion { topics, skipped })
}
