//! Finite empirical domains and their exhaustive enumeration.
//!
//! A [`DomainSpec`] describes a set of elements by parameter ranges. Its
//! cardinality is computed in closed form, independently of the enumerator,
//! and enumeration refuses domains above a cap.
//!
//! Ranked domains are listed by length, then `R`, then total grade index,
//! then lexicographically descending with position 1 most significant.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ContingencyTable, Element, GradeScheme, Level, LeveledOutput, Ranking, Universe, UserContext};

/// Default upper bound on the number of enumerated elements.
pub const DEFAULT_MAX_DOMAIN: u128 = 10_000_000;

/// Environment variable overriding [`DEFAULT_MAX_DOMAIN`].
pub const MAX_DOMAIN_ENV: &str = "METRICLASS_MAX_DOMAIN";

/// The cap in force: the environment override when it parses, else the default.
pub fn max_domain() -> u128 {
    std::env::var(MAX_DOMAIN_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_MAX_DOMAIN)
}

/// Inclusive integer range written `a..b`, or a single value `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub lo: u64,
    pub hi: u64,
}

impl Span {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo > hi {
            return Err(Error::Domain(format!("empty range {lo}..{hi}")));
        }
        Ok(Self { lo, hi })
    }

    pub fn single(v: u64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn iter(self) -> impl Iterator<Item = u64> {
        self.lo..=self.hi
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}..{}", self.lo, self.hi)
        }
    }
}

impl FromStr for Span {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let num = |t: &str| t.trim().parse::<u64>().map_err(|_| Error::Domain(format!("bad number `{t}`")));
        match s.split_once("..") {
            Some((a, b)) => Span::new(num(a)?, num(b.trim_start_matches('='))?),
            None => Ok(Span::single(num(s)?)),
        }
    }
}

/// Parameterised description of a finite domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DomainSpec {
    /// Rankings of every length in `lengths` over a scheme of `grades`
    /// grades (2 means binary), against universes with `R` in `relevant`
    /// and collection size `collection`.
    Ranked { grades: u8, lengths: Span, relevant: Span, collection: u64 },
    /// Contingency tables with `N`, `R` and retrieved-set size `n` in range.
    Contingency { collection: Span, relevant: Span, retrieved: Span },
    /// User contexts with `U` and `A` in range.
    User { known: Span, retrieved: Span },
    /// Outputs of `levels` levels holding `size` documents each, with need `s`.
    Leveled { levels: u32, size: u64, need: u64 },
}

impl DomainSpec {
    pub fn binary(length: u64, relevant: u64) -> Result<Self> {
        Self::ranked(2, Span::single(length), Span::single(relevant), None)
    }

    pub fn ranked(grades: u8, lengths: Span, relevant: Span, collection: Option<u64>) -> Result<Self> {
        if grades < 2 {
            return Err(Error::Domain("at least two grades are needed".into()));
        }
        if lengths.lo == 0 {
            return Err(Error::Domain("ranking length must be positive".into()));
        }
        let collection = collection.unwrap_or(lengths.hi + relevant.hi);
        if collection < lengths.hi || collection < relevant.hi {
            return Err(Error::Domain(format!(
                "collection size N={collection} is smaller than the longest ranking or the largest R"
            )));
        }
        Ok(DomainSpec::Ranked { grades, lengths, relevant, collection })
    }

    pub fn contingency(collection: Span, relevant: Span, retrieved: Span) -> Result<Self> {
        if collection.lo == 0 {
            return Err(Error::Domain("collection size must be positive".into()));
        }
        Ok(DomainSpec::Contingency { collection, relevant, retrieved })
    }

    pub fn user(known: Span, retrieved: Span) -> Result<Self> {
        if known.lo == 0 || retrieved.lo == 0 {
            return Err(Error::Domain("U and A must be at least 1".into()));
        }
        Ok(DomainSpec::User { known, retrieved })
    }

    pub fn leveled(levels: u32, size: u64, need: u64) -> Result<Self> {
        if levels == 0 || size == 0 || need == 0 {
            return Err(Error::Domain("levels, size and s must be positive".into()));
        }
        Ok(DomainSpec::Leveled { levels, size, need })
    }

    /// Number of elements, computed without enumerating.
    pub fn cardinality(&self) -> u128 {
        match *self {
            DomainSpec::Ranked { grades, lengths, relevant, .. } => {
                let relevant_grades = grades as u128 - 1;
                let mut total = 0u128;
                for l in lengths.iter() {
                    for r in relevant.iter() {
                        total += (0..=l.min(r))
                            .map(|c| binomial(l, c).saturating_mul(relevant_grades.saturating_pow(c as u32)))
                            .fold(0u128, u128::saturating_add);
                    }
                }
                total
            }
            DomainSpec::Contingency { collection, relevant, retrieved } => {
                let mut total = 0u128;
                for n in collection.iter() {
                    for r in relevant.iter().filter(|&r| r <= n) {
                        for k in retrieved.iter().filter(|&k| k <= n) {
                            let lo = k.saturating_sub(n - r);
                            let hi = r.min(k);
                            total += (hi - lo + 1) as u128;
                        }
                    }
                }
                total
            }
            DomainSpec::User { known, retrieved } => {
                let mut total = 0u128;
                for u in known.iter() {
                    for a in retrieved.iter() {
                        // sum over rk = 0..=m of (a - rk + 1)
                        let m = u.min(a) as u128;
                        let a = a as u128;
                        total += (m + 1) * (a + 1) - m * (m + 1) / 2;
                    }
                }
                total
            }
            DomainSpec::Leveled { levels, size, .. } => (size as u128 + 1).saturating_pow(levels),
        }
    }

    fn enumerate_unsorted(&self, cap: u128) -> Result<Vec<Element>> {
        let cardinality = self.cardinality();
        if cardinality > cap {
            return Err(Error::CapExceeded { cardinality, cap });
        }
        let blocks = self.blocks();
        let out: Vec<Vec<Element>> = blocks.par_iter().map(|b| self.enumerate_block(b)).collect::<Result<_>>()?;
        Ok(out.into_iter().flatten().collect())
    }

    /// Independent blocks covering the domain; ranked blocks are re-sorted
    /// after concatenation.
    fn blocks(&self) -> Vec<Block> {
        match *self {
            DomainSpec::Ranked { grades, lengths, relevant, .. } => lengths
                .iter()
                .flat_map(|l| relevant.iter().flat_map(move |r| (0..grades).rev().map(move |first| (l, r, first))))
                .map(|(l, r, first)| Block::Ranked { length: l as usize, relevant: r, first })
                .collect(),
            DomainSpec::Contingency { collection, .. } => collection.iter().map(Block::Collection).collect(),
            DomainSpec::User { known, .. } => known.iter().map(Block::Known).collect(),
            DomainSpec::Leveled { size, .. } => (0..=size).map(Block::FirstLevel).collect(),
        }
    }

    fn enumerate_block(&self, block: &Block) -> Result<Vec<Element>> {
        match (self, *block) {
            (DomainSpec::Ranked { grades, collection, .. }, Block::Ranked { length, relevant, first }) => {
                let scheme = scheme_for(*grades);
                let universe = Universe::new(*collection, relevant)?;
                let mut out = Vec::new();
                for seq in sequences(*grades, length, first) {
                    let count = seq.iter().filter(|&&g| g > 0).count() as u64;
                    if count <= relevant {
                        out.push(Element::ranked(Ranking::new(scheme.clone(), seq)?, universe.clone()));
                    }
                }
                Ok(out)
            }
            (DomainSpec::Contingency { relevant, retrieved, .. }, Block::Collection(n)) => {
                let mut out = Vec::new();
                for r in relevant.iter().filter(|&r| r <= n) {
                    for k in retrieved.iter().filter(|&k| k <= n) {
                        for tp in k.saturating_sub(n - r)..=r.min(k) {
                            let (fp, fn_) = (k - tp, r - tp);
                            out.push(Element::Table { table: ContingencyTable::new(tp, fp, fn_, n - k - fn_) });
                        }
                    }
                }
                Ok(out)
            }
            (DomainSpec::User { retrieved, .. }, Block::Known(u)) => {
                let mut out = Vec::new();
                for a in retrieved.iter() {
                    for rk in 0..=u.min(a) {
                        for ru in 0..=a - rk {
                            out.push(Element::User { context: UserContext::new(u, rk, ru, a)? });
                        }
                    }
                }
                Ok(out)
            }
            (DomainSpec::Leveled { levels, size, need }, Block::FirstLevel(t0)) => {
                let rest = *levels as usize - 1;
                let mut out = Vec::new();
                let mut digits = vec![0u64; rest];
                loop {
                    let levels = std::iter::once(t0)
                        .chain(digits.iter().copied())
                        .map(|t| Level { relevant: t, nonrelevant: size - t })
                        .collect();
                    out.push(Element::Leveled { output: LeveledOutput::new(levels, *need)? });
                    if !odometer(&mut digits, *size) {
                        break;
                    }
                }
                Ok(out)
            }
            _ => unreachable!("block kinds follow the domain kind"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Block {
    Ranked { length: usize, relevant: u64, first: u8 },
    Collection(u64),
    Known(u64),
    FirstLevel(u64),
}

fn scheme_for(grades: u8) -> Arc<GradeScheme> {
    if grades == 2 {
        Arc::new(GradeScheme::binary())
    } else {
        Arc::new(GradeScheme::graded(grades as usize))
    }
}

/// Advances a little-endian counter with digits in `0..=max`; false on wrap.
fn odometer(digits: &mut [u64], max: u64) -> bool {
    for d in digits.iter_mut().rev() {
        if *d < max {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

/// Sequences of `length` grades starting with `first`, in descending
/// lexicographic order.
fn sequences(grades: u8, length: usize, first: u8) -> Vec<Vec<u8>> {
    let top = grades - 1;
    let mut seq = vec![top; length];
    seq[0] = first;
    let mut out = Vec::new();
    loop {
        out.push(seq.clone());
        // decrement the tail as a base-`grades` number
        let mut k = length;
        loop {
            if k == 1 {
                return out;
            }
            k -= 1;
            if seq[k] > 0 {
                seq[k] -= 1;
                break;
            }
            seq[k] = top;
        }
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Total grade index of a ranked element; the secondary sort key.
fn grade_sum(e: &Element) -> u64 {
    match e {
        Element::Ranked { ranking, .. } => ranking.grades().iter().map(|&g| g as u64).sum(),
        _ => 0,
    }
}

impl DomainSpec {
    /// All elements in canonical order, enumerated in parallel by first
    /// position and merged by `(L, R, grade sum)` with ties kept in
    /// descending lexicographic order.
    pub fn elements(&self) -> Result<Vec<Element>> {
        self.elements_capped(max_domain())
    }

    /// Like [`DomainSpec::elements`] with an explicit cap.
    pub fn elements_capped(&self, cap: u128) -> Result<Vec<Element>> {
        let mut all = self.enumerate_unsorted(cap)?;
        if let DomainSpec::Ranked { .. } = self {
            // stable: within equal keys the per-block descending order and
            // the descending `first` block order are preserved
            all.sort_by_key(|e| match e {
                Element::Ranked { ranking, universe } => (ranking.len(), universe.total_relevant, grade_sum(e)),
                _ => (0, 0, 0),
            });
        }
        Ok(all)
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSpec::Ranked { grades, lengths, relevant, collection } => {
                if *grades == 2 {
                    write!(f, "binary:L={lengths},R={relevant},N={collection}")
                } else {
                    write!(f, "graded:grades={grades},L={lengths},R={relevant},N={collection}")
                }
            }
            DomainSpec::Contingency { collection, relevant, retrieved } => {
                write!(f, "contingency:N={collection},R={relevant},n={retrieved}")
            }
            DomainSpec::User { known, retrieved } => write!(f, "user:U={known},A={retrieved}"),
            DomainSpec::Leveled { levels, size, need } => write!(f, "leveled:levels={levels},size={size},s={need}"),
        }
    }
}

impl FromStr for DomainSpec {
    type Err = Error;

    /// Accepts `kind:key=value,...` on one line, or a block of `key = value`
    /// lines including a `kind` key. `#` starts a comment.
    fn from_str(text: &str) -> Result<Self> {
        let (kind, pairs): (String, Vec<(String, String)>) = if text.trim().contains('\n') {
            let mut kind = None;
            let mut pairs = Vec::new();
            for line in text.lines() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| Error::Domain(format!("expected key = value, got `{line}`")))?;
                let (k, v) = (k.trim().to_string(), v.trim().to_string());
                if k == "kind" {
                    kind = Some(v);
                } else {
                    pairs.push((k, v));
                }
            }
            (kind.ok_or_else(|| Error::Domain("missing `kind`".into()))?, pairs)
        } else {
            let (kind, rest) = text.trim().split_once(':').unwrap_or((text.trim(), ""));
            let pairs = rest
                .split(',')
                .filter(|p| !p.trim().is_empty())
                .map(|p| {
                    p.split_once('=')
                        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                        .ok_or_else(|| Error::Domain(format!("expected key=value, got `{p}`")))
                })
                .collect::<Result<_>>()?;
            (kind.to_string(), pairs)
        };

        let allowed: &[&str] = match kind.as_str() {
            "binary" => &["L", "R", "N"],
            "graded" => &["grades", "L", "R", "N"],
            "contingency" => &["N", "R", "n"],
            "user" => &["U", "A"],
            "leveled" => &["levels", "size", "s"],
            other => return Err(Error::Domain(format!("unknown domain kind `{other}`"))),
        };
        for (k, _) in &pairs {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::Domain(format!("unknown key `{k}` for {kind} domains")));
            }
        }
        let get = |key: &str| -> Result<Option<Span>> {
            pairs.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.parse()).transpose()
        };
        let need = |key: &str| -> Result<Span> {
            get(key)?.ok_or_else(|| Error::Domain(format!("{kind} domains need `{key}`")))
        };
        let scalar = |key: &str, span: Span| -> Result<u64> {
            if span.lo != span.hi {
                return Err(Error::Domain(format!("`{key}` takes a single value")));
            }
            Ok(span.lo)
        };
        match kind.as_str() {
            "binary" | "graded" => {
                let grades = if kind == "graded" { scalar("grades", need("grades")?)? } else { 2 };
                if grades > u8::MAX as u64 {
                    return Err(Error::Domain("too many grades".into()));
                }
                let lengths = need("L")?;
                let relevant = get("R")?.unwrap_or(Span::single(lengths.hi));
                let collection = get("N")?.map(|s| scalar("N", s)).transpose()?;
                DomainSpec::ranked(grades as u8, lengths, relevant, collection)
            }
            "contingency" => {
                let collection = need("N")?;
                let relevant = get("R")?.unwrap_or(Span::new(0, collection.hi)?);
                let retrieved = get("n")?.unwrap_or(Span::new(0, collection.hi)?);
                DomainSpec::contingency(collection, relevant, retrieved)
            }
            "user" => DomainSpec::user(need("U")?, need("A")?),
            _ => {
                let levels = scalar("levels", need("levels")?)?;
                let size = scalar("size", need("size")?)?;
                let s = get("s")?.map(|s| scalar("s", s)).transpose()?.unwrap_or(1);
                DomainSpec::leveled(u32::try_from(levels).map_err(|_| Error::Domain("too many levels".into()))?, size, s)
            }
        }
    }
}
