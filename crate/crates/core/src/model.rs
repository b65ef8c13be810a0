//! Domain elements and the quantities derived from them.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::value::{format_rational, parse_rational, ratio};

/// Ordered relevance grades `a_0 < a_1 < ... < a_max` with their gains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradeScheme {
    labels: Vec<String>,
    #[serde(with = "rational_strings")]
    gains: Vec<BigRational>,
}

impl GradeScheme {
    pub fn new(labels: Vec<String>, gains: Vec<BigRational>) -> Result<Self> {
        if labels.len() != gains.len() {
            return Err(Error::Constraint("grade labels and gains differ in length".into()));
        }
        if labels.len() < 2 {
            return Err(Error::Constraint("a grade scheme needs at least two grades".into()));
        }
        if labels.len() > u8::MAX as usize {
            return Err(Error::Constraint("too many grades".into()));
        }
        if !gains[0].is_zero() {
            return Err(Error::Constraint("the lowest grade must have gain 0".into()));
        }
        if gains.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Constraint("gains must strictly increase with grade".into()));
        }
        Ok(Self { labels, gains })
    }

    /// Grades `0` and `1` with gains 0 and 1.
    pub fn binary() -> Self {
        Self::graded(2)
    }

    /// `levels` grades labelled `0..levels` with linear gains `k / (levels - 1)`,
    /// so the top grade has gain 1.
    pub fn graded(levels: usize) -> Self {
        assert!((2..=255).contains(&levels), "graded scheme needs 2..=255 levels");
        let top = (levels - 1) as i64;
        Self {
            labels: (0..levels).map(|k| k.to_string()).collect(),
            gains: (0..levels as i64).map(|k| ratio(k, top)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn is_binary(&self) -> bool {
        self.len() == 2
    }

    pub fn gain(&self, grade: u8) -> &BigRational {
        &self.gains[grade as usize]
    }

    pub fn top_gain(&self) -> &BigRational {
        self.gains.last().expect("non-empty scheme")
    }

    pub fn label(&self, grade: u8) -> &str {
        &self.labels[grade as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn gains(&self) -> &[BigRational] {
        &self.gains
    }

    /// Grade index carrying `label`.
    pub fn grade_of(&self, label: &str) -> Option<u8> {
        self.labels.iter().position(|l| l == label).map(|i| i as u8)
    }

    /// Multiplies every gain by `factor` (> 0). Orders between rankings under
    /// normalised measures must not change.
    pub fn scaled(&self, factor: &BigRational) -> Result<Self> {
        if !factor.is_positive() {
            return Err(Error::Constraint("gain scale factor must be positive".into()));
        }
        Self::new(self.labels.clone(), self.gains.iter().map(|g| g * factor).collect())
    }
}

/// A ranked list of relevance grades, positions `1..=L`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranking {
    scheme: Arc<GradeScheme>,
    grades: Vec<u8>,
}

impl Ranking {
    pub fn new(scheme: Arc<GradeScheme>, grades: Vec<u8>) -> Result<Self> {
        if grades.is_empty() {
            return Err(Error::Constraint("a ranking needs at least one position".into()));
        }
        if let Some(bad) = grades.iter().find(|&&g| g as usize >= scheme.len()) {
            return Err(Error::Constraint(format!("grade index {bad} is not in the scheme")));
        }
        Ok(Self { scheme, grades })
    }

    /// Binary ranking from 0/1 flags.
    pub fn binary(flags: &[u8]) -> Result<Self> {
        Self::new(Arc::new(GradeScheme::binary()), flags.to_vec())
    }

    pub fn scheme(&self) -> &Arc<GradeScheme> {
        &self.scheme
    }

    pub fn grades(&self) -> &[u8] {
        &self.grades
    }

    pub fn len(&self) -> usize {
        self.grades.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grades.is_empty()
    }

    /// Number of relevant (grade above the lowest) items.
    pub fn relevant_count(&self) -> u64 {
        self.grades.iter().filter(|&&g| g > 0).count() as u64
    }

    /// Copy padded with the lowest grade up to `depth` positions.
    pub fn padded(&self, depth: usize) -> Ranking {
        let mut grades = self.grades.clone();
        if grades.len() < depth {
            grades.resize(depth, 0);
        }
        Ranking { scheme: self.scheme.clone(), grades }
    }

    /// Copy truncated or padded to exactly `depth` positions.
    pub fn with_depth(&self, depth: usize) -> Ranking {
        let mut r = self.padded(depth);
        r.grades.truncate(depth);
        r
    }

    pub fn with_scheme(&self, scheme: Arc<GradeScheme>) -> Result<Ranking> {
        Ranking::new(scheme, self.grades.clone())
    }
}

impl fmt::Display for Ranking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨")?;
        for (i, &g) in self.grades.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.scheme.label(g))?;
        }
        write!(f, "⟩")
    }
}

/// Collection-level context for a ranking: collection size `N` and the
/// number of relevant documents `R` in the collection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Universe {
    pub collection_size: u64,
    pub total_relevant: u64,
    /// Relevant documents per grade index (index 0 unused). When absent, the
    /// relevant documents a ranking did not retrieve are taken to carry the
    /// lowest relevant grade.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inventory: Option<Vec<u64>>,
}

impl Universe {
    pub fn new(collection_size: u64, total_relevant: u64) -> Result<Self> {
        if total_relevant > collection_size {
            return Err(Error::Constraint(format!(
                "R={total_relevant} exceeds collection size N={collection_size}"
            )));
        }
        Ok(Self { collection_size, total_relevant, inventory: None })
    }

    pub fn with_inventory(collection_size: u64, inventory: Vec<u64>) -> Result<Self> {
        let total: u64 = inventory.iter().skip(1).sum();
        let mut u = Self::new(collection_size, total)?;
        u.inventory = Some(inventory);
        Ok(u)
    }

    fn check(&self, ranking: &Ranking) -> Result<()> {
        let relevant = ranking.relevant_count();
        if relevant > self.total_relevant {
            return Err(Error::Constraint(format!(
                "ranking {ranking} holds {relevant} relevant items but R={}",
                self.total_relevant
            )));
        }
        if ranking.len() as u64 > self.collection_size {
            return Err(Error::Constraint(format!(
                "ranking length {} exceeds collection size N={}",
                ranking.len(),
                self.collection_size
            )));
        }
        if let Some(inv) = &self.inventory {
            if inv.len() != ranking.scheme().len() {
                return Err(Error::Constraint("inventory does not match the grade scheme".into()));
            }
            let mut seen = vec![0u64; inv.len()];
            for &g in ranking.grades() {
                seen[g as usize] += 1;
            }
            if seen.iter().zip(inv).skip(1).any(|(s, i)| s > i) {
                return Err(Error::Constraint(format!(
                    "ranking {ranking} retrieves more items of some grade than the collection holds"
                )));
            }
        }
        Ok(())
    }

    /// Grades of the ideal ranking for `ranking`, best first.
    fn ideal_grades(&self, ranking: &Ranking) -> Vec<u8> {
        let mut grades: Vec<u8> = match &self.inventory {
            Some(inv) => inv
                .iter()
                .enumerate()
                .skip(1)
                .flat_map(|(g, &n)| std::iter::repeat_n(g as u8, n as usize))
                .collect(),
            None => {
                let mut own: Vec<u8> = ranking.grades().iter().copied().filter(|&g| g > 0).collect();
                let missing = self.total_relevant - own.len() as u64;
                own.extend(std::iter::repeat_n(1u8, missing as usize));
                own
            }
        };
        grades.sort_unstable_by(|a, b| b.cmp(a));
        grades
    }
}

/// Per-position quantities of a ranking against its universe. Index `k`
/// holds the value at rank `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedCounts {
    pub isrel: Vec<bool>,
    pub count: Vec<u64>,
    pub gain: Vec<BigRational>,
    pub cg: Vec<BigRational>,
    pub ideal_gain: Vec<BigRational>,
    pub cig: Vec<BigRational>,
}

impl DerivedCounts {
    pub fn depth(&self) -> usize {
        self.isrel.len()
    }

    /// Total ideal gain over every relevant document of the universe.
    pub fn total_ideal_gain(&self) -> BigRational {
        self.cig.last().cloned().unwrap_or_else(BigRational::zero)
    }
}

/// `isrel`, `count`, `cg` and `cig` over the ranking's own length.
pub fn derived_counts(ranking: &Ranking, universe: &Universe) -> Result<DerivedCounts> {
    derived_counts_to(ranking, universe, ranking.len())
}

/// Like [`derived_counts`], padding the ranking with the lowest grade up to
/// `depth` positions when it is shorter. `cig` covers at least `R`
/// positions so the last entry is the total ideal gain.
pub fn derived_counts_to(ranking: &Ranking, universe: &Universe, depth: usize) -> Result<DerivedCounts> {
    universe.check(ranking)?;
    let scheme = ranking.scheme();
    let padded = ranking.padded(depth);
    let ideal = universe.ideal_grades(ranking);
    let positions = padded.len();

    let mut out = DerivedCounts {
        isrel: Vec::with_capacity(positions),
        count: Vec::with_capacity(positions),
        gain: Vec::with_capacity(positions),
        cg: Vec::with_capacity(positions),
        ideal_gain: Vec::with_capacity(positions),
        cig: Vec::with_capacity(positions),
    };
    let mut count = 0u64;
    let mut cg = BigRational::zero();
    let mut cig = BigRational::zero();
    for (k, &g) in padded.grades().iter().enumerate() {
        let rel = g > 0;
        count += rel as u64;
        let gain = scheme.gain(g).clone();
        cg += &gain;
        let ig = ideal.get(k).map(|&i| scheme.gain(i).clone()).unwrap_or_else(BigRational::zero);
        cig += &ig;
        out.isrel.push(rel);
        out.count.push(count);
        out.gain.push(gain);
        out.cg.push(cg.clone());
        out.ideal_gain.push(ig);
        out.cig.push(cig.clone());
    }
    Ok(out)
}

/// Total ideal gain of the universe for `ranking`.
pub fn total_ideal_gain(ranking: &Ranking, universe: &Universe) -> Result<BigRational> {
    universe.check(ranking)?;
    let scheme = ranking.scheme();
    Ok(universe.ideal_grades(ranking).iter().map(|&g| scheme.gain(g)).sum())
}

/// Set-based retrieval outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ContingencyTable {
    pub fn new(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        Self { tp, fp, fn_, tn }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn retrieved(&self) -> u64 {
        self.tp + self.fp
    }

    pub fn relevant(&self) -> u64 {
        self.tp + self.fn_
    }

    /// Reads a binary ranking as a retrieved set.
    pub fn from_ranking(ranking: &Ranking, universe: &Universe) -> Result<Self> {
        universe.check(ranking)?;
        let tp = ranking.relevant_count();
        let retrieved = ranking.len() as u64;
        let fn_ = universe.total_relevant - tp;
        let tn = universe
            .collection_size
            .checked_sub(retrieved + fn_)
            .ok_or_else(|| Error::Constraint("collection too small for this retrieved set".into()))?;
        Ok(Self { tp, fp: retrieved - tp, fn_, tn })
    }
}

impl fmt::Display for ContingencyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(tp={},fp={},fn={},tn={})", self.tp, self.fp, self.fn_, self.tn)
    }
}

/// User-oriented counts: known relevant `U`, retrieved known relevant `R_k`,
/// retrieved unknown relevant `R_u`, retrieved total `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UserContext {
    pub known_relevant: u64,
    pub retrieved_known: u64,
    pub retrieved_unknown: u64,
    pub retrieved_total: u64,
}

impl UserContext {
    pub fn new(known_relevant: u64, retrieved_known: u64, retrieved_unknown: u64, retrieved_total: u64) -> Result<Self> {
        if known_relevant == 0 || retrieved_total == 0 {
            return Err(Error::Constraint("U and A must be positive".into()));
        }
        if retrieved_known > known_relevant {
            return Err(Error::Constraint("R_k exceeds U".into()));
        }
        if retrieved_known + retrieved_unknown > retrieved_total {
            return Err(Error::Constraint("R_k + R_u exceeds A".into()));
        }
        Ok(Self { known_relevant, retrieved_known, retrieved_unknown, retrieved_total })
    }
}

impl fmt::Display for UserContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(U={},Rk={},Ru={},A={})",
            self.known_relevant, self.retrieved_known, self.retrieved_unknown, self.retrieved_total
        )
    }
}

/// One level of a weakly ordered output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Level {
    pub relevant: u64,
    pub nonrelevant: u64,
}

/// Output presented as successive levels, with a need of `s` relevant documents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LeveledOutput {
    pub levels: Vec<Level>,
    pub need: u64,
}

impl LeveledOutput {
    pub fn new(levels: Vec<Level>, need: u64) -> Result<Self> {
        if need == 0 {
            return Err(Error::Constraint("the need s must be positive".into()));
        }
        Ok(Self { levels, need })
    }

    /// Cuts a ranking into consecutive levels of `level_size` positions (the
    /// last level may be shorter).
    pub fn from_ranking(ranking: &Ranking, level_size: usize, need: u64) -> Result<Self> {
        if level_size == 0 {
            return Err(Error::Constraint("level size must be positive".into()));
        }
        let levels = ranking
            .grades()
            .chunks(level_size)
            .map(|chunk| {
                let relevant = chunk.iter().filter(|&&g| g > 0).count() as u64;
                Level { relevant, nonrelevant: chunk.len() as u64 - relevant }
            })
            .collect();
        Self::new(levels, need)
    }
}

impl fmt::Display for LeveledOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, l) in self.levels.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{}+{}-", l.relevant, l.nonrelevant)?;
        }
        write!(f, "] s={}", self.need)
    }
}

/// One element of an empirical domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Element {
    Ranked { ranking: Ranking, universe: Universe },
    Table { table: ContingencyTable },
    User { context: UserContext },
    Leveled { output: LeveledOutput },
}

impl Element {
    pub fn ranked(ranking: Ranking, universe: Universe) -> Self {
        Element::Ranked { ranking, universe }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Element::Ranked { .. } => "ranking",
            Element::Table { .. } => "contingency table",
            Element::User { .. } => "user context",
            Element::Leveled { .. } => "leveled output",
        }
    }

    /// Display including the universe, for elements whose `R` matters.
    pub fn label_with_universe(&self) -> String {
        match self {
            Element::Ranked { ranking, universe } => format!("{ranking}[R={}]", universe.total_relevant),
            other => other.to_string(),
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Ranked { ranking, .. } => write!(f, "{ranking}"),
            Element::Table { table } => write!(f, "{table}"),
            Element::User { context } => write!(f, "{context}"),
            Element::Leveled { output } => write!(f, "{output}"),
        }
    }
}

pub(crate) mod rational_strings {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigRational>, D::Error> {
        let raw: Vec<String> = Vec::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rational(s).ok_or_else(|| serde::de::Error::custom(format!("bad rational `{s}`"))))
            .collect()
    }
}
