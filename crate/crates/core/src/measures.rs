//! The measure catalogue.
//!
//! Every measure is a pure function from a domain element to a [`Value`].
//! Set-based and user-oriented measures read counts; rank-based measures read
//! a ranking together with its [`Universe`]. Measures are addressed by
//! stable string ids such as `recall`, `prec@4`, `dcg?b=2` or `rbp?p=1/2`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    derived_counts_to, total_ideal_gain, ContingencyTable, DerivedCounts, Element, LeveledOutput, Ranking,
    Universe, UserContext,
};
use crate::value::{format_rational, int, parse_rational, rational_to_f64, Backend, Value, DEFAULT_EPSILON};

/// What a measure reads from a domain element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    SetBased,
    UserOriented,
    RankBased,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MeasureId {
    Recall,
    Precision,
    Fallout,
    Accuracy,
    MissRate,
    ErrorRate,
    InverseRecall,
    InversePrecision,
    Specificity,
    FalseDiscoveryRate,
    FalseOmissionRate,
    FMeasure,
    Generality,
    Utility,
    CoverageRatio,
    RetrievalRecall,
    NoveltyRatio,
    RecallEffort,
    PrecisionAt,
    RecallAt,
    RPrecision,
    RWeightedPrecision,
    RMeasure,
    SlidingRatio,
    ModifiedSlidingRatio,
    NormalizedRecall,
    NormalizedPrecision,
    AveragePrecision,
    AverageWeightedPrecision,
    QMeasure,
    ReciprocalRank,
    Dcg,
    Rbp,
    Bpref,
    NxCg,
    MeanAverageNxCg,
    GainRecall,
    ExpectedSearchLength,
}

impl MeasureId {
    pub const ALL: [MeasureId; 38] = [
        MeasureId::Recall,
        MeasureId::Precision,
        MeasureId::Fallout,
        MeasureId::Accuracy,
        MeasureId::MissRate,
        MeasureId::ErrorRate,
        MeasureId::InverseRecall,
        MeasureId::InversePrecision,
        MeasureId::Specificity,
        MeasureId::FalseDiscoveryRate,
        MeasureId::FalseOmissionRate,
        MeasureId::FMeasure,
        MeasureId::Generality,
        MeasureId::Utility,
        MeasureId::CoverageRatio,
        MeasureId::RetrievalRecall,
        MeasureId::NoveltyRatio,
        MeasureId::RecallEffort,
        MeasureId::PrecisionAt,
        MeasureId::RecallAt,
        MeasureId::RPrecision,
        MeasureId::RWeightedPrecision,
        MeasureId::RMeasure,
        MeasureId::SlidingRatio,
        MeasureId::ModifiedSlidingRatio,
        MeasureId::NormalizedRecall,
        MeasureId::NormalizedPrecision,
        MeasureId::AveragePrecision,
        MeasureId::AverageWeightedPrecision,
        MeasureId::QMeasure,
        MeasureId::ReciprocalRank,
        MeasureId::Dcg,
        MeasureId::Rbp,
        MeasureId::Bpref,
        MeasureId::NxCg,
        MeasureId::MeanAverageNxCg,
        MeasureId::GainRecall,
        MeasureId::ExpectedSearchLength,
    ];

    /// Stable id used in measure strings.
    pub fn name(self) -> &'static str {
        use MeasureId::*;
        match self {
            Recall => "recall",
            Precision => "precision",
            Fallout => "fallout",
            Accuracy => "accuracy",
            MissRate => "miss-rate",
            ErrorRate => "error-rate",
            InverseRecall => "inverse-recall",
            InversePrecision => "inverse-precision",
            Specificity => "specificity",
            FalseDiscoveryRate => "fdr",
            FalseOmissionRate => "for",
            FMeasure => "f-measure",
            Generality => "generality",
            Utility => "utility",
            CoverageRatio => "coverage-ratio",
            RetrievalRecall => "retrieval-recall",
            NoveltyRatio => "novelty-ratio",
            RecallEffort => "recall-effort",
            PrecisionAt => "prec",
            RecallAt => "recall",
            RPrecision => "r-precision",
            RWeightedPrecision => "r-wp",
            RMeasure => "r-measure",
            SlidingRatio => "sr",
            ModifiedSlidingRatio => "msr",
            NormalizedRecall => "rnorm",
            NormalizedPrecision => "pnorm",
            AveragePrecision => "ap",
            AverageWeightedPrecision => "awp",
            QMeasure => "q-measure",
            ReciprocalRank => "rr",
            Dcg => "dcg",
            Rbp => "rbp",
            Bpref => "bpref",
            NxCg => "nxcg",
            MeanAverageNxCg => "manxcg",
            GainRecall => "gr",
            ExpectedSearchLength => "esl",
        }
    }

    pub fn description(self) -> &'static str {
        use MeasureId::*;
        match self {
            Recall => "tp/(tp+fn)",
            Precision => "tp/(tp+fp)",
            Fallout => "fp/(fp+tn)",
            Accuracy => "(tp+tn)/N",
            MissRate => "fn/(tp+fn)",
            ErrorRate => "(fp+fn)/N",
            InverseRecall => "tn/(fp+tn)",
            InversePrecision => "tn/(fn+tn)",
            Specificity => "tn/(tn+fp)",
            FalseDiscoveryRate => "fp/(fp+tp)",
            FalseOmissionRate => "fn/(fn+tn)",
            FMeasure => "harmonic mean of precision and recall",
            Generality => "(tp+fn)/N",
            Utility => "alpha*tp + beta*fn + gamma*fp + delta*tn",
            CoverageRatio => "R_k/U",
            RetrievalRecall => "(R_k+R_u)/U",
            NoveltyRatio => "R_u/(R_u+R_k)",
            RecallEffort => "U/A",
            PrecisionAt => "cg(r)/r",
            RecallAt => "cg(r)/total ideal gain",
            RPrecision => "count(R)/R",
            RWeightedPrecision => "cg(R)/cig(R)",
            RMeasure => "(cg(R)+count(R))/(cig(R)+R)",
            SlidingRatio => "cg(L)/cig(L)",
            ModifiedSlidingRatio => "sum g(r)/r over sum ig(r)/r",
            NormalizedRecall => "1 - (sum of relevant ranks - sum 1..R)/(R(L-R))",
            NormalizedPrecision => "1 - (sum ln relevant ranks - ln R!)/ln C(L,R)",
            AveragePrecision => "(1/R) sum isrel(r) count(r)/r",
            AverageWeightedPrecision => "sum isrel(r) cg(r)/cig(r)",
            QMeasure => "(1/R) sum isrel(r) (cg(r)+count(r))/(cig(r)+r)",
            ReciprocalRank => "1/rank of the first relevant document",
            Dcg => "sum g(r)/max(1, log_b r)",
            Rbp => "(1-p)/g(top) sum p^(r-1) g(r)",
            Bpref => "(1/R) sum over relevant r of 1 - min(r-count(r), R)/R",
            NxCg => "cg(r)/cig(r)",
            MeanAverageNxCg => "mean of nxCG[j] for j <= r",
            GainRecall => "cg(r)/cig(L)",
            ExpectedSearchLength => "j + i*s/(t+1)",
        }
    }

    pub fn family(self) -> Family {
        use MeasureId::*;
        match self {
            Recall | Precision | Fallout | Accuracy | MissRate | ErrorRate | InverseRecall | InversePrecision
            | Specificity | FalseDiscoveryRate | FalseOmissionRate | FMeasure | Generality | Utility => {
                Family::SetBased
            }
            CoverageRatio | RetrievalRecall | NoveltyRatio | RecallEffort => Family::UserOriented,
            _ => Family::RankBased,
        }
    }

    fn takes_cutoff(self) -> bool {
        matches!(
            self,
            MeasureId::PrecisionAt | MeasureId::RecallAt | MeasureId::NxCg | MeasureId::MeanAverageNxCg | MeasureId::GainRecall
        )
    }

    /// Whether values stay within `[0, 1]` for gain functions bounded by 1.
    pub fn unit_bounded(self) -> bool {
        !matches!(
            self,
            MeasureId::Utility | MeasureId::Dcg | MeasureId::ExpectedSearchLength | MeasureId::AverageWeightedPrecision
        )
    }
}

/// RBP persistence parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum Persistence {
    Rational(BigRational),
    /// `(sqrt(5) - 1) / 2`, the root of `p^2 + p - 1` in `(0, 1)`. Evaluated
    /// under the approximate backend.
    Golden,
}

impl Persistence {
    pub fn golden_value() -> f64 {
        (5f64.sqrt() - 1.0) / 2.0
    }
}

/// A measure with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpec {
    pub id: MeasureId,
    pub cutoff: Option<usize>,
    pub persistence: Option<Persistence>,
    pub base: Option<f64>,
    /// `[alpha, beta, gamma, delta]`.
    pub weights: Option<[BigRational; 4]>,
    pub level_size: Option<usize>,
    pub need: Option<u64>,
}

impl MeasureSpec {
    /// Parameterless measure.
    pub fn new(id: MeasureId) -> Result<Self> {
        let spec = Self::bare(id);
        spec.validate()?;
        Ok(spec)
    }

    fn bare(id: MeasureId) -> Self {
        Self { id, cutoff: None, persistence: None, base: None, weights: None, level_size: None, need: None }
    }

    pub fn at(id: MeasureId, cutoff: usize) -> Result<Self> {
        let spec = Self { cutoff: Some(cutoff), ..Self::bare(id) };
        spec.validate()?;
        Ok(spec)
    }

    pub fn dcg(base: f64) -> Result<Self> {
        let spec = Self { base: Some(base), ..Self::bare(MeasureId::Dcg) };
        spec.validate()?;
        Ok(spec)
    }

    pub fn rbp(p: Persistence) -> Result<Self> {
        let spec = Self { persistence: Some(p), ..Self::bare(MeasureId::Rbp) };
        spec.validate()?;
        Ok(spec)
    }

    pub fn utility(weights: [BigRational; 4]) -> Result<Self> {
        let spec = Self { weights: Some(weights), ..Self::bare(MeasureId::Utility) };
        spec.validate()?;
        Ok(spec)
    }

    pub fn esl(level_size: usize, need: u64) -> Result<Self> {
        let spec = Self { level_size: Some(level_size), need: Some(need), ..Self::bare(MeasureId::ExpectedSearchLength) };
        spec.validate()?;
        Ok(spec)
    }

    fn invalid(&self, message: impl Into<String>) -> Error {
        Error::InvalidParameter { measure: self.id.name().to_string(), message: message.into() }
    }

    fn validate(&self) -> Result<()> {
        let id = self.id;
        if id.takes_cutoff() != self.cutoff.is_some() {
            return Err(self.invalid(if id.takes_cutoff() { "a cutoff @r is required" } else { "no cutoff accepted" }));
        }
        if self.cutoff == Some(0) {
            return Err(self.invalid("cutoff must be positive"));
        }
        if (id == MeasureId::Dcg) != self.base.is_some() {
            return Err(self.invalid(if id == MeasureId::Dcg { "base b is required" } else { "no base accepted" }));
        }
        if let Some(b) = self.base {
            if !(b.is_finite() && b > 1.0) {
                return Err(self.invalid("base b must be a real number above 1"));
            }
        }
        if (id == MeasureId::Rbp) != self.persistence.is_some() {
            return Err(self.invalid(if id == MeasureId::Rbp { "persistence p is required" } else { "no p accepted" }));
        }
        if let Some(Persistence::Rational(p)) = &self.persistence {
            if !(p.is_positive() && p < &BigRational::one()) {
                return Err(self.invalid("p must lie in (0, 1)"));
            }
        }
        if (id == MeasureId::Utility) != self.weights.is_some() {
            return Err(self.invalid(if id == MeasureId::Utility {
                "weights alpha, beta, gamma, delta are required"
            } else {
                "no weights accepted"
            }));
        }
        if let Some(w) = &self.weights {
            if w.iter().any(|x| !x.is_positive()) {
                return Err(self.invalid("utility weights must be positive"));
            }
        }
        let is_esl = id == MeasureId::ExpectedSearchLength;
        if !is_esl && (self.level_size.is_some() || self.need.is_some()) {
            return Err(self.invalid("size and s apply to esl only"));
        }
        if self.level_size == Some(0) || self.need == Some(0) {
            return Err(self.invalid("size and s must be positive"));
        }
        Ok(())
    }

    pub fn family(&self) -> Family {
        self.id.family()
    }

    /// Numeric backend of every value this measure produces.
    pub fn backend(&self) -> Backend {
        match (self.id, &self.persistence) {
            (MeasureId::Dcg, _) | (MeasureId::NormalizedPrecision, _) | (MeasureId::Rbp, Some(Persistence::Golden)) => {
                Backend::Approx { epsilon: DEFAULT_EPSILON }
            }
            _ => Backend::Exact,
        }
    }

    /// Short human label, e.g. `Prec@4`, `DCG_2`, `RBP_1/2`.
    pub fn label(&self) -> String {
        use MeasureId::*;
        let r = self.cutoff.unwrap_or(0);
        match self.id {
            PrecisionAt => format!("Prec@{r}"),
            RecallAt => format!("Recall@{r}"),
            NxCg => format!("nxCG[{r}]"),
            MeanAverageNxCg => format!("MAnxCG[{r}]"),
            GainRecall => format!("gr[{r}]"),
            Dcg => format!("DCG_{}", self.base.unwrap_or(2.0)),
            Rbp => match &self.persistence {
                Some(Persistence::Rational(p)) => format!("RBP_{}", format_rational(p)),
                _ => "RBP_p".to_string(),
            },
            RPrecision => "R-precision".into(),
            RWeightedPrecision => "R-WP".into(),
            RMeasure => "R-measure".into(),
            SlidingRatio => "sr".into(),
            ModifiedSlidingRatio => "msr".into(),
            NormalizedRecall => "Rnorm".into(),
            NormalizedPrecision => "Pnorm".into(),
            AveragePrecision => "AP".into(),
            AverageWeightedPrecision => "AWP".into(),
            QMeasure => "Q-measure".into(),
            ReciprocalRank => "RR".into(),
            Bpref => "bpref".into(),
            ExpectedSearchLength => "esl".into(),
            FMeasure => "F".into(),
            _ => self.id.name().to_string(),
        }
    }

    fn undefined(&self, reason: impl Into<String>) -> Error {
        Error::Undefined { measure: self.to_string(), reason: reason.into() }
    }

    /// Evaluates on any element the measure can read. Binary rankings feed
    /// set-based measures as retrieved sets; rankings feed esl via their
    /// level partition.
    pub fn evaluate(&self, element: &Element) -> Result<Value> {
        match (self.family(), element) {
            (Family::SetBased, Element::Table { table }) => self.eval_contingency(table),
            (Family::SetBased, Element::Ranked { ranking, universe }) => {
                self.eval_contingency(&ContingencyTable::from_ranking(ranking, universe)?)
            }
            (Family::UserOriented, Element::User { context }) => self.eval_user_oriented(context),
            (Family::RankBased, Element::Ranked { ranking, universe }) => self.eval_ranking(ranking, universe),
            (Family::RankBased, Element::Leveled { output }) if self.id == MeasureId::ExpectedSearchLength => {
                eval_esl(output)
            }
            _ => Err(Error::UnsupportedElement { measure: self.to_string(), element: element.kind().into() }),
        }
    }

    pub fn eval_contingency(&self, t: &ContingencyTable) -> Result<Value> {
        use MeasureId::*;
        let (tp, fp, fn_, tn) = (t.tp as i64, t.fp as i64, t.fn_ as i64, t.tn as i64);
        let frac = |num: i64, den: i64, what: &str| -> Result<Value> {
            if den == 0 {
                return Err(self.undefined(format!("{what} is zero for {t}")));
            }
            Ok(Value::exact(BigRational::new(num.into(), den.into())))
        };
        let n = tp + fp + fn_ + tn;
        match self.id {
            Recall => frac(tp, tp + fn_, "tp+fn"),
            Precision => frac(tp, tp + fp, "tp+fp"),
            Fallout => frac(fp, fp + tn, "fp+tn"),
            Accuracy => frac(tp + tn, n, "N"),
            MissRate => frac(fn_, tp + fn_, "tp+fn"),
            ErrorRate => frac(fp + fn_, n, "N"),
            InverseRecall => frac(tn, fp + tn, "fp+tn"),
            InversePrecision => frac(tn, fn_ + tn, "fn+tn"),
            Specificity => frac(tn, tn + fp, "tn+fp"),
            FalseDiscoveryRate => frac(fp, fp + tp, "fp+tp"),
            FalseOmissionRate => frac(fn_, fn_ + tn, "fn+tn"),
            // Equal to 2*prec*recall/(prec+recall) wherever that is defined,
            // and 0 when nothing relevant is retrieved.
            FMeasure => frac(2 * tp, 2 * tp + fp + fn_, "2tp+fp+fn"),
            Generality => frac(tp + fn_, n, "N"),
            Utility => {
                let [a, b, c, d] = self.weights.as_ref().expect("validated");
                Ok(Value::exact(a * int(tp) + b * int(fn_) + c * int(fp) + d * int(tn)))
            }
            _ => Err(Error::UnsupportedElement { measure: self.to_string(), element: "contingency table".into() }),
        }
    }

    pub fn eval_user_oriented(&self, c: &UserContext) -> Result<Value> {
        use MeasureId::*;
        let (u, rk, ru, a) =
            (c.known_relevant as i64, c.retrieved_known as i64, c.retrieved_unknown as i64, c.retrieved_total as i64);
        let frac = |num: i64, den: i64| -> Result<Value> {
            if den == 0 {
                return Err(self.undefined(format!("zero denominator for {c}")));
            }
            Ok(Value::exact(BigRational::new(num.into(), den.into())))
        };
        match self.id {
            CoverageRatio => frac(rk, u),
            RetrievalRecall => frac(rk + ru, u),
            NoveltyRatio => frac(ru, ru + rk),
            RecallEffort => frac(u, a),
            _ => Err(Error::UnsupportedElement { measure: self.to_string(), element: "user context".into() }),
        }
    }

    pub fn eval_ranking(&self, ranking: &Ranking, universe: &Universe) -> Result<Value> {
        use MeasureId::*;
        match self.id {
            PrecisionAt => Ok(eval_prec_recall_at(self.cutoff.expect("validated"), ranking, universe)?.0),
            RecallAt => eval_prec_recall_at(self.cutoff.expect("validated"), ranking, universe)?
                .1
                .ok_or_else(|| self.undefined("no relevant documents in the universe")),
            RPrecision => Ok(eval_r_family(ranking, universe)?.r_precision),
            RWeightedPrecision => Ok(eval_r_family(ranking, universe)?.r_wp),
            RMeasure => Ok(eval_r_family(ranking, universe)?.r_measure),
            SlidingRatio => Ok(eval_sliding(ranking, universe)?.0),
            ModifiedSlidingRatio => Ok(eval_sliding(ranking, universe)?.1),
            NormalizedRecall => Ok(eval_rocchio(ranking, universe)?.0),
            NormalizedPrecision => Ok(eval_rocchio(ranking, universe)?.1),
            AveragePrecision => Ok(eval_ap_family(ranking, universe)?.ap),
            AverageWeightedPrecision => Ok(eval_ap_family(ranking, universe)?.awp),
            QMeasure => Ok(eval_ap_family(ranking, universe)?.q_measure),
            ReciprocalRank => Ok(eval_reciprocal_rank(ranking)),
            Dcg => eval_dcg(ranking, self.base.expect("validated")),
            Rbp => eval_rbp(ranking, self.persistence.as_ref().expect("validated")),
            Bpref => eval_bpref(ranking, universe),
            NxCg => Ok(eval_xcg_family(ranking, universe, self.cutoff.expect("validated"))?.nxcg),
            MeanAverageNxCg => Ok(eval_xcg_family(ranking, universe, self.cutoff.expect("validated"))?.manxcg),
            GainRecall => Ok(eval_xcg_family(ranking, universe, self.cutoff.expect("validated"))?.gr),
            ExpectedSearchLength => {
                let out = LeveledOutput::from_ranking(ranking, self.level_size.unwrap_or(2), self.need.unwrap_or(1))?;
                eval_esl(&out)
            }
            _ => Err(Error::UnsupportedElement { measure: self.to_string(), element: "ranking".into() }),
        }
        .map_err(|e| match e {
            Error::Undefined { reason, .. } => self.undefined(reason),
            other => other,
        })
    }
}

impl fmt::Display for MeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id.name())?;
        if let Some(r) = self.cutoff {
            write!(f, "@{r}")?;
        }
        let mut query = Vec::new();
        if let Some(b) = self.base {
            query.push(format!("b={b}"));
        }
        match &self.persistence {
            Some(Persistence::Rational(p)) => query.push(format!("p={}", format_rational(p))),
            Some(Persistence::Golden) => query.push("p=golden".into()),
            None => {}
        }
        if let Some([a, b, c, d]) = &self.weights {
            query.push(format!(
                "alpha={}&beta={}&gamma={}&delta={}",
                format_rational(a),
                format_rational(b),
                format_rational(c),
                format_rational(d)
            ));
        }
        if let Some(s) = self.level_size {
            query.push(format!("size={s}"));
        }
        if let Some(s) = self.need {
            query.push(format!("s={s}"));
        }
        if !query.is_empty() {
            write!(f, "?{}", query.join("&"))?;
        }
        Ok(())
    }
}

impl FromStr for MeasureSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim().to_ascii_lowercase();
        let (head, query) = match text.split_once('?') {
            Some((h, q)) => (h.to_string(), Some(q.to_string())),
            None => (text.clone(), None),
        };
        let (name, cutoff) = match head.split_once('@') {
            Some((n, r)) => {
                let r: usize = r.parse().map_err(|_| Error::UnknownMeasure(text.clone()))?;
                (n.to_string(), Some(r))
            }
            None => (head, None),
        };
        let id = match (name.as_str(), cutoff.is_some()) {
            ("recall", true) => MeasureId::RecallAt,
            ("prec" | "precision", true) => MeasureId::PrecisionAt,
            ("classification-accuracy", false) => MeasureId::Accuracy,
            ("f", false) => MeasureId::FMeasure,
            ("prevalence", false) => MeasureId::Generality,
            (n, at) => MeasureId::ALL
                .iter()
                .copied()
                .find(|id| id.name() == n && id.takes_cutoff() == at)
                .or_else(|| MeasureId::ALL.iter().copied().find(|id| id.name() == n))
                .ok_or_else(|| Error::UnknownMeasure(text.clone()))?,
        };
        let mut spec = MeasureSpec { cutoff, ..MeasureSpec::bare(id) };
        let mut weights: [Option<BigRational>; 4] = Default::default();
        for pair in query.iter().flat_map(|q| q.split('&')).filter(|p| !p.is_empty()) {
            let (k, v) = pair.split_once('=').ok_or_else(|| spec.invalid(format!("expected key=value, got `{pair}`")))?;
            let bad = || spec.invalid(format!("bad value `{v}` for `{k}`"));
            match k {
                "b" => spec.base = Some(v.parse().map_err(|_| bad())?),
                "p" if v == "golden" => spec.persistence = Some(Persistence::Golden),
                "p" => spec.persistence = Some(Persistence::Rational(parse_rational(v).ok_or_else(bad)?)),
                "alpha" | "beta" | "gamma" | "delta" => {
                    let slot = ["alpha", "beta", "gamma", "delta"].iter().position(|w| *w == k).expect("matched");
                    weights[slot] = Some(parse_rational(v).ok_or_else(bad)?);
                }
                "size" => spec.level_size = Some(v.parse().map_err(|_| bad())?),
                "s" => spec.need = Some(v.parse().map_err(|_| bad())?),
                _ => return Err(spec.invalid(format!("unknown parameter `{k}`"))),
            }
        }
        if weights.iter().any(Option::is_some) {
            if weights.iter().any(Option::is_none) {
                return Err(spec.invalid("utility needs all four of alpha, beta, gamma, delta"));
            }
            let [a, b, c, d] = weights.map(|w| w.expect("checked"));
            spec.weights = Some([a, b, c, d]);
        }
        spec.validate()?;
        Ok(spec)
    }
}

impl Serialize for MeasureSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for MeasureSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn undefined(measure: &str, reason: impl Into<String>) -> Error {
    Error::Undefined { measure: measure.to_string(), reason: reason.into() }
}

fn positions(ranking: &Ranking, universe: &Universe, depth: usize) -> Result<DerivedCounts> {
    derived_counts_to(ranking, universe, depth.max(ranking.len()))
}

fn q(n: u64) -> BigRational {
    int(n as i64)
}

/// `Prec@r = cg(r)/r` and `Recall@r = cg(r) / total ideal gain` (`cg(r)/R`
/// for binary grades). Recall is `None` when the universe holds nothing
/// relevant.
pub fn eval_prec_recall_at(cutoff: usize, ranking: &Ranking, universe: &Universe) -> Result<(Value, Option<Value>)> {
    if cutoff == 0 {
        return Err(Error::OutOfRange { cutoff, length: ranking.len() });
    }
    let d = positions(ranking, universe, cutoff)?;
    let cg = &d.cg[cutoff - 1];
    let prec = Value::exact(cg / q(cutoff as u64));
    let total = total_ideal_gain(ranking, universe)?;
    let recall = (!total.is_zero()).then(|| Value::exact(cg / total));
    Ok((prec, recall))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RFamily {
    pub r_precision: Value,
    pub r_wp: Value,
    pub r_measure: Value,
}

/// R-precision, R-WP and R-measure; the ranking is padded to `R` positions.
pub fn eval_r_family(ranking: &Ranking, universe: &Universe) -> Result<RFamily> {
    let r = universe.total_relevant as usize;
    if r == 0 {
        return Err(undefined("r-precision", "R = 0"));
    }
    let d = positions(ranking, universe, r)?;
    let (count, cg, cig) = (q(d.count[r - 1]), &d.cg[r - 1], &d.cig[r - 1]);
    Ok(RFamily {
        r_precision: Value::exact(&count / q(r as u64)),
        r_wp: Value::exact(cg / cig),
        r_measure: Value::exact((cg + &count) / (cig + q(r as u64))),
    })
}

/// Sliding ratio `cg(L)/cig(L)` and the rank-discounted variant.
pub fn eval_sliding(ranking: &Ranking, universe: &Universe) -> Result<(Value, Value)> {
    let d = positions(ranking, universe, ranking.len())?;
    let l = d.depth();
    if d.cig[l - 1].is_zero() {
        return Err(undefined("sr", "no relevant documents in the universe"));
    }
    let sr = Value::exact(&d.cg[l - 1] / &d.cig[l - 1]);
    let mut num = BigRational::zero();
    let mut den = BigRational::zero();
    for k in 0..l {
        let w = BigRational::new(BigInt::one(), BigInt::from(k + 1));
        num += &d.gain[k] * &w;
        den += &d.ideal_gain[k] * &w;
    }
    Ok((sr, Value::exact(num / den)))
}

/// Rocchio's normalised recall (exact) and normalised precision (approximate).
/// Both need `0 < R < L` and every relevant document inside the ranking.
pub fn eval_rocchio(ranking: &Ranking, universe: &Universe) -> Result<(Value, Value)> {
    let l = ranking.len() as u64;
    let r = universe.total_relevant;
    if r == 0 || r >= l {
        return Err(undefined("rnorm", format!("needs 0 < R < L, got R={r}, L={l}")));
    }
    if ranking.relevant_count() != r {
        return Err(undefined("rnorm", "needs all R relevant documents within the ranking"));
    }
    let ranks: Vec<u64> = ranking
        .grades()
        .iter()
        .enumerate()
        .filter(|(_, &g)| g > 0)
        .map(|(k, _)| k as u64 + 1)
        .collect();
    let rank_sum: u64 = ranks.iter().sum();
    let ideal_sum = r * (r + 1) / 2;
    let r_norm = BigRational::one() - BigRational::new(BigInt::from(rank_sum - ideal_sum), BigInt::from(r * (l - r)));

    let ln_sum: f64 = ranks.iter().map(|&k| (k as f64).ln()).sum();
    let ln_fact = |n: u64| -> f64 { (2..=n).map(|k| (k as f64).ln()).sum() };
    let ln_binom = ln_fact(l) - ln_fact(r) - ln_fact(l - r);
    let p_norm = 1.0 - (ln_sum - ln_fact(r)) / ln_binom;
    Ok((Value::exact(r_norm), Value::approx(p_norm)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApFamily {
    pub ap: Value,
    pub awp: Value,
    pub q_measure: Value,
}

/// AP, AWP (no `1/R` factor) and Q-measure.
pub fn eval_ap_family(ranking: &Ranking, universe: &Universe) -> Result<ApFamily> {
    let r = universe.total_relevant;
    if r == 0 {
        return Err(undefined("ap", "R = 0"));
    }
    let d = positions(ranking, universe, ranking.len())?;
    let mut ap = BigRational::zero();
    let mut awp = BigRational::zero();
    let mut qm = BigRational::zero();
    for k in (0..d.depth()).filter(|&k| d.isrel[k]) {
        let rank = q(k as u64 + 1);
        let count = q(d.count[k]);
        ap += &count / &rank;
        awp += &d.cg[k] / &d.cig[k];
        qm += (&d.cg[k] + &count) / (&d.cig[k] + &rank);
    }
    Ok(ApFamily {
        ap: Value::exact(ap / q(r)),
        awp: Value::exact(awp),
        q_measure: Value::exact(qm / q(r)),
    })
}

/// Reciprocal of the first relevant rank, 0 when nothing relevant is retrieved.
pub fn eval_reciprocal_rank(ranking: &Ranking) -> Value {
    match ranking.grades().iter().position(|&g| g > 0) {
        Some(k) => Value::exact(BigRational::new(BigInt::one(), BigInt::from(k + 1))),
        None => Value::zero(),
    }
}

pub fn eval_dcg(ranking: &Ranking, base: f64) -> Result<Value> {
    if !(base.is_finite() && base > 1.0) {
        return Err(Error::InvalidParameter { measure: "dcg".into(), message: "base b must exceed 1".into() });
    }
    let scheme = ranking.scheme();
    let total = ranking
        .grades()
        .iter()
        .enumerate()
        .map(|(k, &g)| {
            let discount = ((k + 1) as f64).ln() / base.ln();
            rational_to_f64(scheme.gain(g)) / discount.max(1.0)
        })
        .sum();
    Ok(Value::approx(total))
}

pub fn eval_rbp(ranking: &Ranking, p: &Persistence) -> Result<Value> {
    let scheme = ranking.scheme();
    let top = scheme.top_gain();
    match p {
        Persistence::Rational(p) => {
            if !(p.is_positive() && p < &BigRational::one()) {
                return Err(Error::InvalidParameter { measure: "rbp".into(), message: "p must lie in (0, 1)".into() });
            }
            let mut weight = BigRational::one();
            let mut sum = BigRational::zero();
            for &g in ranking.grades() {
                sum += scheme.gain(g) * &weight;
                weight *= p;
            }
            Ok(Value::exact((BigRational::one() - p) / top * sum))
        }
        Persistence::Golden => {
            let p = Persistence::golden_value();
            let sum: f64 = ranking
                .grades()
                .iter()
                .enumerate()
                .map(|(k, &g)| p.powi(k as i32) * rational_to_f64(scheme.gain(g)))
                .sum();
            Ok(Value::approx((1.0 - p) / rational_to_f64(top) * sum))
        }
    }
}

/// RR, DCG_b and RBP_p of one ranking.
pub fn eval_rank_biased(ranking: &Ranking, base: f64, p: &Persistence) -> Result<(Value, Value, Value)> {
    Ok((eval_reciprocal_rank(ranking), eval_dcg(ranking, base)?, eval_rbp(ranking, p)?))
}

/// bpref over the relevant retrieved ranks, each penalised by the nonrelevant
/// documents above it (at most `R` of them).
pub fn eval_bpref(ranking: &Ranking, universe: &Universe) -> Result<Value> {
    let r = universe.total_relevant;
    if r == 0 {
        return Err(undefined("bpref", "R = 0"));
    }
    let d = positions(ranking, universe, ranking.len())?;
    let mut sum = BigRational::zero();
    for k in (0..d.depth()).filter(|&k| d.isrel[k]) {
        let above = (k as u64 + 1 - d.count[k]).min(r);
        sum += BigRational::one() - BigRational::new(BigInt::from(above), BigInt::from(r));
    }
    Ok(Value::exact(sum / q(r)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct XcgFamily {
    pub nxcg: Value,
    pub manxcg: Value,
    pub gr: Value,
}

/// `nxCG[r] = cg(r)/cig(r)`, `MAnxCG[r]` the mean of `nxCG[1..=r]`, and
/// `gr[r] = cg(r)/cig(L)` with `L` the (padded) ranking length.
pub fn eval_xcg_family(ranking: &Ranking, universe: &Universe, cutoff: usize) -> Result<XcgFamily> {
    if cutoff == 0 {
        return Err(Error::OutOfRange { cutoff, length: ranking.len() });
    }
    let d = positions(ranking, universe, cutoff)?;
    if d.cig[0].is_zero() {
        return Err(undefined("nxcg", "no relevant documents in the universe"));
    }
    let nx = |j: usize| &d.cg[j] / &d.cig[j];
    let mean: BigRational = (0..cutoff).map(nx).sum::<BigRational>() / q(cutoff as u64);
    let l = d.depth();
    Ok(XcgFamily {
        nxcg: Value::exact(nx(cutoff - 1)),
        manxcg: Value::exact(mean),
        gr: Value::exact(&d.cg[cutoff - 1] / &d.cig[l - 1]),
    })
}

/// Expected search length `j + i*s/(t+1)` at the first level where the need
/// is met.
pub fn eval_esl(out: &LeveledOutput) -> Result<Value> {
    let mut nonrel_before = 0u64;
    let mut remaining = out.need;
    for level in &out.levels {
        if level.relevant >= remaining {
            let tail = BigRational::new(
                BigInt::from(level.nonrelevant * remaining),
                BigInt::from(level.relevant + 1),
            );
            return Ok(Value::exact(q(nonrel_before) + tail));
        }
        remaining -= level.relevant;
        nonrel_before += level.nonrelevant;
    }
    Err(undefined("esl", format!("need s={} cannot be satisfied by {out}", out.need)))
}

/// Cross-query aggregates. None of them is a permissible statistic on
/// ordinal values, which is what every caller is told.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AggregateKind {
    Map,
    Gmap,
    ErrMean,
    MeanNxCg,
}

impl FromStr for AggregateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" | "map" => Ok(AggregateKind::Map),
            "gmean" | "gmap" => Ok(AggregateKind::Gmap),
            "err" | "err-mean" => Ok(AggregateKind::ErrMean),
            "manxcg" => Ok(AggregateKind::MeanNxCg),
            _ => Err(Error::InvalidParameter { measure: "aggregate".into(), message: format!("unknown kind `{s}`") }),
        }
    }
}

pub const PERMISSIBILITY_WARNING: &str =
    "warning: this averages ordinal-scale values; means are not permissible statistics on an ordinal scale";

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub value: Value,
    pub warning: &'static str,
}

/// Arithmetic or geometric mean of per-query values. The geometric mean is
/// exact whenever the root of the product is rational.
pub fn aggregate(values: &[Value], kind: AggregateKind) -> Result<Aggregate> {
    if values.is_empty() {
        return Err(undefined("aggregate", "no values to aggregate"));
    }
    let n = values.len();
    let all_exact: Option<Vec<&BigRational>> = values.iter().map(Value::as_exact).collect();
    let value = match kind {
        AggregateKind::Map | AggregateKind::ErrMean | AggregateKind::MeanNxCg => match &all_exact {
            Some(xs) => Value::exact(xs.iter().copied().sum::<BigRational>() / q(n as u64)),
            None => Value::approx(values.iter().map(Value::to_f64).sum::<f64>() / n as f64),
        },
        AggregateKind::Gmap => {
            if values.iter().any(|v| v.to_f64() <= 0.0 || v.is_zero()) {
                return Err(undefined("gmap", "geometric mean needs strictly positive values"));
            }
            let exact_root = all_exact.and_then(|xs| {
                let product: BigRational = xs.into_iter().cloned().product();
                let num = product.numer().nth_root(n as u32);
                let den = product.denom().nth_root(n as u32);
                let root = BigRational::new(num, den);
                (num_traits::pow(root.clone(), n) == product).then_some(root)
            });
            match exact_root {
                Some(root) => Value::exact(root),
                None => Value::approx((values.iter().map(|v| v.to_f64().ln()).sum::<f64>() / n as f64).exp()),
            }
        }
    };
    Ok(Aggregate { value, warning: PERMISSIBILITY_WARNING })
}

/// Every measure the catalogue knows, with representative parameters.
pub fn registry() -> Vec<MeasureSpec> {
    let one = || int(1);
    MeasureId::ALL
        .iter()
        .map(|&id| match id {
            MeasureId::PrecisionAt | MeasureId::RecallAt | MeasureId::NxCg | MeasureId::MeanAverageNxCg | MeasureId::GainRecall => {
                MeasureSpec::at(id, 4)
            }
            MeasureId::Dcg => MeasureSpec::dcg(2.0),
            MeasureId::Rbp => MeasureSpec::rbp(Persistence::Rational(crate::value::ratio(1, 2))),
            MeasureId::Utility => MeasureSpec::utility([one(), one(), one(), one()]),
            MeasureId::ExpectedSearchLength => MeasureSpec::esl(2, 1),
            _ => MeasureSpec::new(id),
        })
        .collect::<Result<Vec<_>>>()
        .expect("registry parameters are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Level;
    use crate::value::ratio;

    fn spec(s: &str) -> MeasureSpec {
        s.parse().unwrap()
    }

    fn exact(v: &Value) -> BigRational {
        v.as_exact().expect("exact").clone()
    }

    fn bin(flags: &[u8]) -> Ranking {
        Ranking::binary(flags).unwrap()
    }

    fn uni(r: u64) -> Universe {
        Universe::new(100, r).unwrap()
    }

    fn table(tp: u64, fp: u64, fn_: u64, tn: u64) -> ContingencyTable {
        ContingencyTable::new(tp, fp, fn_, tn)
    }

    #[test]
    fn set_based_examples() {
        assert_eq!(exact(&spec("recall").eval_contingency(&table(0, 0, 5, 10)).unwrap()), int(0));
        assert_eq!(exact(&spec("precision").eval_contingency(&table(3, 0, 2, 10)).unwrap()), int(1));
        assert_eq!(exact(&spec("f-measure").eval_contingency(&table(2, 3, 3, 7)).unwrap()), ratio(2, 5));
        let u = spec("utility?alpha=1&beta=1&gamma=1&delta=1");
        assert_eq!(exact(&u.eval_contingency(&table(2, 3, 3, 7)).unwrap()), int(15));
        assert_eq!(exact(&u.eval_contingency(&table(5, 0, 0, 10)).unwrap()), int(15));
    }

    #[test]
    fn zero_denominators_are_undefined() {
        let err = spec("precision").eval_contingency(&table(0, 0, 5, 10)).unwrap_err();
        assert!(matches!(err, Error::Undefined { .. }), "{err}");
        let ctx = UserContext::new(2, 0, 0, 1).unwrap();
        assert!(matches!(spec("novelty-ratio").eval_user_oriented(&ctx), Err(Error::Undefined { .. })));
    }

    #[test]
    fn user_oriented_examples() {
        let rr = spec("retrieval-recall");
        let a = UserContext::new(1, 1, 0, 1).unwrap();
        let b = UserContext::new(1, 1, 0, 2).unwrap();
        assert_eq!(exact(&rr.eval_user_oriented(&a).unwrap()), int(1));
        assert_eq!(exact(&rr.eval_user_oriented(&b).unwrap()), int(1));
        let effort = spec("recall-effort");
        let c = UserContext::new(1, 0, 1, 2).unwrap();
        let d = UserContext::new(1, 0, 0, 2).unwrap();
        assert_eq!(exact(&effort.eval_user_oriented(&c).unwrap()), ratio(1, 2));
        assert_eq!(exact(&effort.eval_user_oriented(&d).unwrap()), ratio(1, 2));
        let full = UserContext::new(3, 3, 0, 4).unwrap();
        assert_eq!(exact(&spec("coverage-ratio").eval_user_oriented(&full).unwrap()), int(1));
    }

    #[test]
    fn precision_at_cutoff() {
        let p = |f: &[u8], r| exact(&eval_prec_recall_at(r, &bin(f), &uni(4)).unwrap().0);
        assert_eq!(p(&[1, 0, 0, 0], 4), ratio(1, 4));
        assert_eq!(p(&[0, 1, 0, 0], 4), ratio(1, 4));
        assert_eq!(p(&[1, 0, 0], 1), int(1));
        assert_eq!(p(&[0, 1, 1], 3), ratio(2, 3));
        let recall = eval_prec_recall_at(2, &bin(&[1, 1, 0]), &uni(4)).unwrap().1.unwrap();
        assert_eq!(exact(&recall), ratio(1, 2));
    }

    #[test]
    fn r_family_examples() {
        let a = eval_r_family(&bin(&[0, 1, 0, 1]), &uni(2)).unwrap();
        let b = eval_r_family(&bin(&[1, 0, 0, 1]), &uni(2)).unwrap();
        assert_eq!(exact(&a.r_precision), ratio(1, 2));
        assert_eq!(exact(&b.r_precision), ratio(1, 2));
        let ideal = eval_r_family(&bin(&[1, 1, 0]), &uni(2)).unwrap();
        assert_eq!(exact(&ideal.r_wp), int(1));
        assert_eq!(exact(&eval_r_family(&bin(&[1, 1]), &uni(2)).unwrap().r_measure), int(1));
        assert!(matches!(eval_r_family(&bin(&[0, 0]), &uni(0)), Err(Error::Undefined { .. })));
    }

    #[test]
    fn sliding_ratios() {
        let s = |f: &[u8]| eval_sliding(&bin(f), &uni(1)).unwrap();
        assert_eq!(exact(&s(&[1, 0, 0, 0]).0), int(1));
        assert_eq!(exact(&s(&[0, 1, 0, 0]).0), int(1));
        assert_eq!(exact(&s(&[1, 0, 0, 0]).1), int(1));
        assert_eq!(exact(&s(&[0, 1, 0, 0]).1), ratio(1, 2));
        assert_eq!(exact(&s(&[0, 0, 1, 0]).1), ratio(1, 3));
        let ideal = eval_sliding(&bin(&[1, 1, 0, 0]), &uni(2)).unwrap();
        assert_eq!(exact(&ideal.1), int(1));
        assert!(eval_sliding(&bin(&[0, 0]), &uni(0)).is_err());
    }

    #[test]
    fn normalized_recall() {
        let rn = |f: &[u8], r| exact(&eval_rocchio(&bin(f), &uni(r)).unwrap().0);
        assert_eq!(rn(&[1, 1, 0, 0], 2), int(1));
        assert_eq!(rn(&[0, 0, 1, 1], 2), int(0));
        assert_eq!(rn(&[1, 0, 0, 1], 2), ratio(1, 2));
        assert_eq!(rn(&[0, 1, 1, 0], 2), ratio(1, 2));
        assert!(eval_rocchio(&bin(&[1, 1]), &uni(2)).is_err());
        assert!(eval_rocchio(&bin(&[0, 0, 0]), &uni(0)).is_err());
        let pn = eval_rocchio(&bin(&[1, 1, 0, 0]), &uni(2)).unwrap().1;
        assert!((pn.to_f64() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn average_precision_family() {
        let a = eval_ap_family(&bin(&[1, 0, 0, 0]), &uni(4)).unwrap();
        let b = eval_ap_family(&bin(&[0, 1, 0, 1]), &uni(4)).unwrap();
        assert_eq!(exact(&a.ap), ratio(1, 4));
        assert_eq!(exact(&b.ap), ratio(1, 4));
        assert_eq!(exact(&a.q_measure), ratio(1, 4));
        assert_eq!(exact(&b.q_measure), ratio(1, 4));
        let ideal = eval_ap_family(&bin(&[1, 1, 0]), &uni(2)).unwrap();
        assert_eq!(exact(&ideal.ap), int(1));
        // no 1/R factor: cg/cig at ranks 2 and 4 is 1/2 + 2/4
        assert_eq!(exact(&b.awp), int(1));
        assert_eq!(exact(&eval_ap_family(&bin(&[1, 1, 0]), &uni(2)).unwrap().awp), int(2));
    }

    #[test]
    fn rank_biased_examples() {
        assert_eq!(exact(&eval_reciprocal_rank(&bin(&[0, 1, 0, 0]))), ratio(1, 2));
        assert_eq!(exact(&eval_reciprocal_rank(&bin(&[0, 1, 0, 1]))), ratio(1, 2));
        assert_eq!(exact(&eval_reciprocal_rank(&bin(&[0, 0]))), int(0));
        let d1 = eval_dcg(&bin(&[1, 0, 0, 0]), 2.0).unwrap();
        let d2 = eval_dcg(&bin(&[0, 1, 0, 0]), 2.0).unwrap();
        assert!(d1.same(&Value::approx(1.0)) && d2.same(&Value::approx(1.0)));
        let half = Persistence::Rational(ratio(1, 2));
        // 1/2 * (1*1 + 0 + 1/4 + 1/8) = 11/16
        assert_eq!(exact(&eval_rbp(&bin(&[1, 0, 1, 1]), &half).unwrap()), ratio(11, 16));
        let g1 = eval_rbp(&bin(&[1, 0, 0]), &Persistence::Golden).unwrap();
        let g2 = eval_rbp(&bin(&[0, 1, 1]), &Persistence::Golden).unwrap();
        assert!(g1.same(&g2));
        assert!(matches!("dcg?b=1".parse::<MeasureSpec>(), Err(Error::InvalidParameter { .. })));
        assert!("rbp?p=1".parse::<MeasureSpec>().is_err());
        assert!("rbp?p=0".parse::<MeasureSpec>().is_err());
    }

    #[test]
    fn bpref_examples() {
        assert_eq!(exact(&eval_bpref(&bin(&[1]), &uni(1)).unwrap()), int(1));
        assert_eq!(exact(&eval_bpref(&bin(&[1, 1]), &uni(2)).unwrap()), int(1));
        assert_eq!(exact(&eval_bpref(&bin(&[0, 0, 0]), &uni(2)).unwrap()), int(0));
        assert_eq!(exact(&eval_bpref(&bin(&[0, 1]), &uni(1)).unwrap()), int(0));
    }

    #[test]
    fn xcg_family_examples() {
        let a = eval_xcg_family(&bin(&[1, 0, 0, 0]), &uni(1), 4).unwrap();
        let b = eval_xcg_family(&bin(&[0, 1, 0, 0]), &uni(1), 4).unwrap();
        assert_eq!(exact(&a.nxcg), int(1));
        assert_eq!(exact(&b.nxcg), int(1));
        assert_eq!(exact(&a.gr), int(1));
        assert_eq!(exact(&b.gr), int(1));
        assert_eq!(exact(&a.manxcg), int(1));
        assert_eq!(exact(&b.manxcg), ratio(3, 4));
    }

    #[test]
    fn esl_examples() {
        let single = LeveledOutput::new(vec![Level { relevant: 1, nonrelevant: 0 }], 1).unwrap();
        assert_eq!(exact(&eval_esl(&single).unwrap()), int(0));
        let two = LeveledOutput::new(
            vec![Level { relevant: 0, nonrelevant: 2 }, Level { relevant: 1, nonrelevant: 1 }],
            1,
        )
        .unwrap();
        assert_eq!(exact(&eval_esl(&two).unwrap()), ratio(5, 2));
        let e = spec("esl?size=2&s=1");
        assert_eq!(
            e.eval_ranking(&bin(&[1, 0, 0, 1]), &uni(4)).unwrap(),
            e.eval_ranking(&bin(&[0, 1, 1, 0]), &uni(4)).unwrap()
        );
        let short = LeveledOutput::new(vec![Level { relevant: 1, nonrelevant: 3 }], 2).unwrap();
        assert!(matches!(eval_esl(&short), Err(Error::Undefined { .. })));
    }

    #[test]
    fn aggregates_carry_the_warning() {
        let quarter = Value::exact(ratio(1, 4));
        let m = aggregate(&[quarter.clone(), quarter.clone()], AggregateKind::Map).unwrap();
        assert_eq!(m.value, quarter);
        assert_eq!(m.warning, PERMISSIBILITY_WARNING);
        let g = aggregate(&[quarter.clone(), Value::exact(int(1))], AggregateKind::Gmap).unwrap();
        assert_eq!(g.value, Value::exact(ratio(1, 2)));
        let half = Value::exact(ratio(1, 2));
        let e = aggregate(&[half.clone(), half.clone()], AggregateKind::ErrMean).unwrap();
        assert_eq!(e.value, half);
        assert!(aggregate(&[Value::zero(), half], AggregateKind::Gmap).is_err());
        let irr = aggregate(&[Value::exact(ratio(1, 2)), Value::exact(int(1))], AggregateKind::Gmap).unwrap();
        assert!(irr.value.same(&Value::approx(0.5f64.sqrt())));
    }

    #[test]
    fn ids_round_trip_through_text() {
        for m in registry() {
            let back: MeasureSpec = m.to_string().parse().unwrap();
            assert_eq!(back, m, "{m}");
        }
        assert_eq!("prec@4".parse::<MeasureSpec>().unwrap().id, MeasureId::PrecisionAt);
        assert_eq!("recall".parse::<MeasureSpec>().unwrap().id, MeasureId::Recall);
        assert_eq!("recall@3".parse::<MeasureSpec>().unwrap().id, MeasureId::RecallAt);
        assert_eq!("rbp?p=golden".parse::<MeasureSpec>().unwrap().backend(), Backend::Approx { epsilon: 1e-9 });
        assert!("prec".parse::<MeasureSpec>().is_err());
        assert!("ap@3".parse::<MeasureSpec>().is_err());
        assert!("nope".parse::<MeasureSpec>().is_err());
        assert!("utility?alpha=1".parse::<MeasureSpec>().is_err());
    }
}
