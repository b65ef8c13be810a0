//! The structure a measure induces on a domain.
//!
//! A measure `f` orders elements by `x ⪯ y ⇔ f(x) ≤ f(y)` and spaces them by
//! `d(x, y) = |f(x) − f(y)|`. Quotienting by equal values gives a chain of
//! classes whose consecutive gaps decide the scale category:
//!
//! * not injective: `ordinal/pseudometric`,
//! * injective with uneven gaps: `ordinal/metric`,
//! * injective with equal gaps: `interval/metric`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumeration::DomainSpec;
use crate::error::{Error, Result};
use crate::measures::MeasureSpec;
use crate::model::Element;
use crate::value::{Backend, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    #[serde(rename = "ordinal/pseudometric")]
    OrdinalPseudometric,
    #[serde(rename = "ordinal/metric")]
    OrdinalMetric,
    #[serde(rename = "interval/metric")]
    IntervalMetric,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::OrdinalPseudometric => "ordinal/pseudometric",
            Category::OrdinalMetric => "ordinal/metric",
            Category::IntervalMetric => "interval/metric",
        }
    }

    /// Parses `ordinal/pseudometric`, `pseudometric`, `interval`, and so on.
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ordinal/pseudometric" | "pseudometric" | "ordinal" => Some(Category::OrdinalPseudometric),
            "ordinal/metric" | "metric" => Some(Category::OrdinalMetric),
            "interval/metric" | "interval" => Some(Category::IntervalMetric),
            _ => None,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An element the measure is undefined on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub element: String,
    pub reason: String,
}

/// A domain sorted into equivalence classes of equal value.
#[derive(Debug, Clone)]
pub struct OrderedDomain {
    pub measure: MeasureSpec,
    /// Defined elements in enumeration order.
    pub elements: Vec<Element>,
    pub values: Vec<Value>,
    /// Indices into `elements`, one class per distinct value, ascending. Each
    /// class lists its members in enumeration order.
    pub classes: Vec<Vec<usize>>,
    pub exclusions: Vec<Exclusion>,
}

impl OrderedDomain {
    /// Groups already computed values. `elements` and `values` are parallel.
    pub fn from_values(measure: MeasureSpec, elements: Vec<Element>, values: Vec<Value>) -> Self {
        assert_eq!(elements.len(), values.len(), "one value per element");
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for i in order {
            match classes.last_mut() {
                Some(class) if values[class[0]].same(&values[i]) => class.push(i),
                _ => classes.push(vec![i]),
            }
        }
        for class in &mut classes {
            class.sort_unstable();
        }
        Self { measure, elements, values, classes, exclusions: Vec::new() }
    }

    pub fn class_value(&self, class: usize) -> &Value {
        &self.values[self.classes[class][0]]
    }

    pub fn class_values(&self) -> Vec<Value> {
        (0..self.classes.len()).map(|c| self.class_value(c).clone()).collect()
    }

    /// Class index of every element.
    pub fn class_index(&self) -> Vec<usize> {
        let mut out = vec![0; self.elements.len()];
        for (c, members) in self.classes.iter().enumerate() {
            for &i in members {
                out[i] = c;
            }
        }
        out
    }

    /// `x ⪯ y`.
    pub fn precedes(&self, x: usize, y: usize) -> bool {
        self.values[x].le(&self.values[y])
    }

    pub fn distance(&self, x: usize, y: usize) -> Value {
        distance(&self.values[x], &self.values[y])
    }
}

pub fn distance(a: &Value, b: &Value) -> Value {
    a.sub(b).abs()
}

/// Evaluates `measure` on every element and groups equal values. Elements
/// the measure is undefined on are set aside with the reason.
pub fn induced_order(measure: &MeasureSpec, elements: Vec<Element>, domain_label: &str) -> Result<OrderedDomain> {
    let results: Vec<Result<Value>> = elements.par_iter().map(|e| measure.evaluate(e)).collect();
    let mut kept = Vec::with_capacity(elements.len());
    let mut values = Vec::with_capacity(elements.len());
    let mut exclusions = Vec::new();
    for (e, r) in elements.into_iter().zip(results) {
        match r {
            Ok(v) => {
                kept.push(e);
                values.push(v);
            }
            Err(Error::Undefined { reason, .. }) => {
                exclusions.push(Exclusion { element: e.label_with_universe(), reason })
            }
            Err(other) => return Err(other),
        }
    }
    if kept.is_empty() {
        return Err(Error::EmptyDomain { measure: measure.to_string(), domain: domain_label.to_string() });
    }
    let mut od = OrderedDomain::from_values(measure.clone(), kept, values);
    od.exclusions = exclusions;
    Ok(od)
}

/// The quotient chain. Node `k` is class `k`; edge `k` joins nodes `k` and
/// `k + 1` with weight equal to the value gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hasse {
    pub nodes: Vec<HasseNode>,
    pub edges: Vec<HasseEdge>,
    #[serde(skip)]
    prefix: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HasseNode {
    pub value: Value,
    /// Member labels in enumeration order.
    pub members: Vec<String>,
    /// Member positions in the ordered domain.
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HasseEdge {
    pub from: usize,
    pub to: usize,
    pub weight: Value,
}

impl Hasse {
    /// Weighted path length between classes `a` and `b`; along a chain this
    /// is the sum of the edge weights in between.
    pub fn path_length(&self, a: usize, b: usize) -> Result<Value> {
        if a >= self.nodes.len() || b >= self.nodes.len() {
            return Err(Error::Report(format!("class index out of range ({a}, {b})")));
        }
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if self.prefix.len() == self.nodes.len() {
            return Ok(self.prefix[hi].sub(&self.prefix[lo]));
        }
        // deserialised diagrams carry no prefix sums
        Ok(self.edges[lo..hi].iter().fold(Value::zero(), |acc, e| acc.add(&e.weight)))
    }
}

pub fn build_hasse(od: &OrderedDomain) -> Hasse {
    let nodes: Vec<HasseNode> = od
        .classes
        .iter()
        .map(|members| HasseNode {
            value: od.values[members[0]].clone(),
            members: members.iter().map(|&i| od.elements[i].to_string()).collect(),
            indices: members.clone(),
        })
        .collect();
    let edges: Vec<HasseEdge> = nodes
        .windows(2)
        .enumerate()
        .map(|(k, w)| HasseEdge { from: k, to: k + 1, weight: w[1].value.sub(&w[0].value) })
        .collect();
    let mut prefix = Vec::with_capacity(nodes.len());
    let mut acc = match od.values.first() {
        Some(Value::Approx { .. }) => Value::approx(0.0),
        _ => Value::zero(),
    };
    prefix.push(acc.clone());
    for e in &edges {
        acc = acc.add(&e.weight);
        prefix.push(acc.clone());
    }
    Hasse { nodes, edges, prefix }
}

/// Two distinct elements with the same value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Collision {
    pub first: String,
    pub second: String,
    pub value: Value,
    pub elements: [Element; 2],
}

impl fmt::Display for Collision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} = {}", self.first, self.second, self.value.fraction())
    }
}

/// `None` when the measure is injective on the domain; otherwise the
/// collision whose later element comes earliest in enumeration order.
pub fn check_injective(od: &OrderedDomain) -> Option<Collision> {
    let (first, second) = od
        .classes
        .iter()
        .filter(|c| c.len() > 1)
        .map(|c| (c[0], c[1]))
        .min_by_key(|&(_, second)| second)?;
    let (a, b) = (&od.elements[first], &od.elements[second]);
    let (mut la, mut lb) = (a.to_string(), b.to_string());
    if la == lb {
        la = a.label_with_universe();
        lb = b.label_with_universe();
    }
    Some(Collision { first: la, second: lb, value: od.values[first].clone(), elements: [a.clone(), b.clone()] })
}

/// Spacing of the class values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "spacing", rename_all = "kebab-case")]
#[allow(clippy::large_enum_variant)]
pub enum Spacing {
    /// A single class.
    Degenerate,
    Equispaced { gap: Value },
    /// Three consecutive class values with unequal gaps.
    Uneven { values: [Value; 3], gaps: [Value; 2] },
}

impl fmt::Display for Spacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spacing::Degenerate => write!(f, "single class"),
            Spacing::Equispaced { gap } => write!(f, "gap {}", gap.fraction()),
            Spacing::Uneven { values, gaps } => write!(
                f,
                "uneven gaps {} < {} < {} (gaps {} and {})",
                values[0].fraction(),
                values[1].fraction(),
                values[2].fraction(),
                gaps[0].fraction(),
                gaps[1].fraction()
            ),
        }
    }
}

pub fn check_equispaced(od: &OrderedDomain) -> Spacing {
    let vals = od.class_values();
    if vals.len() < 2 {
        return Spacing::Degenerate;
    }
    let gaps: Vec<Value> = vals.windows(2).map(|w| w[1].sub(&w[0])).collect();
    for k in 1..gaps.len() {
        if !gaps[k].same(&gaps[0]) {
            return Spacing::Uneven {
                values: [vals[k - 1].clone(), vals[k].clone(), vals[k + 1].clone()],
                gaps: [gaps[k - 1].clone(), gaps[k].clone()],
            };
        }
    }
    Spacing::Equispaced { gap: gaps[0].clone() }
}

/// Outcome of the direct interval-scale check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum OracleOutcome {
    Interval,
    NotInterval { reason: String },
    Skipped { classes: usize, cap: usize },
}

impl OracleOutcome {
    pub fn is_interval(&self) -> Option<bool> {
        match self {
            OracleOutcome::Interval => Some(true),
            OracleOutcome::NotInterval { .. } => Some(false),
            OracleOutcome::Skipped { .. } => None,
        }
    }
}

/// Number of elements in the closed interval of classes `[i, j]`.
pub fn interval_span(od: &OrderedDomain, i: usize, j: usize) -> Result<usize> {
    if i > j {
        return Err(Error::ReversedInterval);
    }
    if j >= od.classes.len() {
        return Err(Error::Report(format!("class {j} out of range")));
    }
    Ok(od.classes[i..=j].iter().map(Vec::len).sum())
}

/// Checks the interval/metric definition without the gap shortcut: distinct
/// elements are never at distance 0, and over every interval of classes the
/// value difference is a strictly increasing function of the element span.
/// `O(k² log k)` in the number of classes `k`; skipped above `cap` classes.
pub fn interval_scale_oracle(od: &OrderedDomain, cap: usize) -> OracleOutcome {
    let k = od.classes.len();
    if k > cap {
        return OracleOutcome::Skipped { classes: k, cap };
    }
    if let Some(class) = od.classes.iter().find(|c| c.len() > 1) {
        return OracleOutcome::NotInterval {
            reason: format!(
                "{} and {} are distinct at distance 0",
                od.elements[class[0]].label_with_universe(),
                od.elements[class[1]].label_with_universe()
            ),
        };
    }
    let vals = od.class_values();
    let mut sizes = vec![0usize; k + 1];
    for c in 0..k {
        sizes[c + 1] = sizes[c] + od.classes[c].len();
    }
    let mut intervals: Vec<(usize, Value, usize, usize)> = Vec::with_capacity(k * (k + 1) / 2);
    for i in 0..k {
        for j in i..k {
            intervals.push((sizes[j + 1] - sizes[i], vals[j].sub(&vals[i]), i, j));
        }
    }
    intervals.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.total_cmp(&b.1)));
    let mut prev: Option<&(usize, Value, usize, usize)> = None;
    let mut bucket_start = 0;
    for (n, cur) in intervals.iter().enumerate() {
        if let Some(p) = prev {
            if p.0 == cur.0 {
                let head = &intervals[bucket_start];
                if !head.1.same(&cur.1) {
                    return OracleOutcome::NotInterval {
                        reason: format!(
                            "intervals [{}, {}] and [{}, {}] span {} elements but differ by {} and {}",
                            head.2,
                            head.3,
                            cur.2,
                            cur.3,
                            cur.0,
                            head.1.fraction(),
                            cur.1.fraction()
                        ),
                    };
                }
            } else {
                if !p.1.lt(&cur.1) {
                    return OracleOutcome::NotInterval {
                        reason: format!(
                            "a wider interval [{}, {}] does not have a larger difference than [{}, {}]",
                            cur.2, cur.3, p.2, p.3
                        ),
                    };
                }
                bucket_start = n;
            }
        }
        prev = Some(cur);
    }
    OracleOutcome::Interval
}

/// Counts violations of symmetry and the triangle inequality of `d` over
/// element triples; exhaustive up to `limit` elements, evenly subsampled
/// beyond. Returns the number of triples checked and the first failure.
pub fn pseudometric_check(od: &OrderedDomain, limit: usize) -> (u64, Option<String>) {
    let n = od.elements.len();
    let step = n.div_ceil(limit.max(1)).max(1);
    let sample: Vec<usize> = (0..n).step_by(step).collect();
    let mut checked = 0u64;
    for &x in &sample {
        for &y in &sample {
            let dxy = od.distance(x, y);
            if !dxy.same(&od.distance(y, x)) {
                return (checked, Some(format!("d is not symmetric on {} and {}", od.elements[x], od.elements[y])));
            }
            for &z in &sample {
                checked += 1;
                if !od.distance(x, z).le(&dxy.add(&od.distance(y, z))) {
                    return (
                        checked,
                        Some(format!(
                            "triangle inequality fails on {}, {}, {}",
                            od.elements[x], od.elements[y], od.elements[z]
                        )),
                    );
                }
            }
        }
    }
    (checked, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifyOptions {
    /// Largest class count the interval oracle runs on.
    pub oracle_cap: usize,
    /// Cap on enumerated elements.
    pub max_domain: u128,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { oracle_cap: 200, max_domain: crate::enumeration::max_domain() }
    }
}

/// Scale category of a measure on a domain, with the evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub measure: MeasureSpec,
    pub domain: String,
    pub category: Category,
    pub backend: Backend,
    pub elements: usize,
    pub classes: usize,
    pub injective: bool,
    pub collision: Option<Collision>,
    pub spacing: Spacing,
    pub oracle: OracleOutcome,
    pub exclusions: Vec<Exclusion>,
    /// Enumeration cap the domain was checked under.
    pub max_domain: u128,
}

impl Verdict {
    /// Whether the direct oracle, when it ran, agrees with the category.
    pub fn oracle_agrees(&self) -> bool {
        match self.oracle.is_interval() {
            Some(interval) => interval == (self.category == Category::IntervalMetric),
            None => true,
        }
    }

    /// One-line summary, e.g. `ordinal/pseudometric; collision ⟨1,0⟩ = ⟨0,1⟩ = 1/2`.
    pub fn summary(&self) -> String {
        match (&self.collision, &self.spacing) {
            (Some(c), _) => format!("{}; collision {c}", self.category),
            (None, Spacing::Uneven { .. }) => format!("{}; {}", self.category, self.spacing),
            (None, Spacing::Equispaced { gap }) => format!("{}; equispaced, gap {}", self.category, gap.fraction()),
            (None, Spacing::Degenerate) => format!("{}; single element", self.category),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} on {}", self.measure, self.domain)?;
        writeln!(f, "  {}", self.summary())?;
        write!(
            f,
            "  {} elements, {} classes, {} backend, {} undefined",
            self.elements,
            self.classes,
            self.backend,
            self.exclusions.len()
        )
    }
}

/// Decides the scale category from an ordered domain.
pub fn verdict_from(od: &OrderedDomain, domain: &str, options: &ClassifyOptions) -> Verdict {
    let collision = check_injective(od);
    let spacing = check_equispaced(od);
    let category = match (&collision, &spacing) {
        (Some(_), _) => Category::OrdinalPseudometric,
        (None, Spacing::Uneven { .. }) => Category::OrdinalMetric,
        (None, _) => Category::IntervalMetric,
    };
    Verdict {
        measure: od.measure.clone(),
        domain: domain.to_string(),
        category,
        backend: od.measure.backend(),
        elements: od.elements.len(),
        classes: od.classes.len(),
        injective: collision.is_none(),
        collision,
        spacing,
        oracle: interval_scale_oracle(od, options.oracle_cap),
        exclusions: od.exclusions.clone(),
        max_domain: options.max_domain,
    }
}

pub fn order_domain(measure: &MeasureSpec, domain: &DomainSpec, options: &ClassifyOptions) -> Result<OrderedDomain> {
    let elements = domain.elements_capped(options.max_domain)?;
    induced_order(measure, elements, &domain.to_string())
}

pub fn classify(measure: &MeasureSpec, domain: &DomainSpec, options: &ClassifyOptions) -> Result<Verdict> {
    let od = order_domain(measure, domain, options)?;
    Ok(verdict_from(&od, &domain.to_string(), options))
}
