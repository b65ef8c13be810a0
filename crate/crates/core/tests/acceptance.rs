//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use metriclass::enumeration::DomainSpec;
use metriclass::error::Error;
use metriclass::ingest::{default_scheme, parse_qrels, parse_run, to_rankings};
use metriclass::intrinsic::{build_hasse, classify, order_domain, Category, ClassifyOptions, OracleOutcome, Spacing};
use metriclass::measures::{registry, Family, MeasureSpec, Persistence, PERMISSIBILITY_WARNING};
use metriclass::model::{Element, Ranking, Universe};
use metriclass::report::{paper_suite, run_suite, ClassificationReport, Status};
use metriclass::value::{ratio, Value};
use num_rational::BigRational;
use num_traits::{One, Signed};

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

const EPS: f64 = 1e-9;

fn dom(s: &str) -> DomainSpec {
    s.parse().unwrap_or_else(|e| panic!("domain {s}: {e}"))
}

fn spec(s: &str) -> MeasureSpec {
    s.parse().unwrap_or_else(|e| panic!("measure {s}: {e}"))
}

fn ranked(flags: &[u8], relevant: u64) -> Element {
    let ranking = Ranking::binary(flags).unwrap();
    Element::ranked(ranking, Universe::new(flags.len() as u64 + relevant, relevant).unwrap())
}

fn eval(m: &str, e: &Element) -> Value {
    spec(m).evaluate(e).unwrap_or_else(|err| panic!("{m} on {e}: {err}"))
}

fn exact(v: &Value) -> BigRational {
    v.as_exact().unwrap_or_else(|| panic!("{v} is not exact")).clone()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn dist(a: &Value, b: &Value) -> Value {
    a.sub(b).abs()
}

/// Values on the defined part of a domain; `None` if the measure cannot
/// read its elements at all.
fn defined_values(m: &MeasureSpec, d: &DomainSpec) -> Result<Option<Vec<Value>>, String> {
    let mut out = Vec::new();
    for e in d.elements().map_err(|e| e.to_string())? {
        match m.evaluate(&e) {
            Ok(v) => out.push(v),
            Err(Error::Undefined { .. }) => {}
            Err(Error::UnsupportedElement { .. }) => return Ok(None),
            Err(err) => return Err(format!("{m} on {e}: {err}")),
        }
    }
    Ok(Some(out))
}

fn pseudometric_axioms() -> Check {
    let binary = ["binary:L=4,R=4", "binary:L=4,R=2"];
    let mut triples = 0u64;
    let mut measures = 0;
    for m in registry() {
        let domains: Vec<&str> = match m.family() {
            Family::UserOriented => vec!["user:U=1..2,A=1..3"],
            _ => binary.to_vec(),
        };
        let mut covered = false;
        for d in domains {
            let Some(values) = defined_values(&m, &dom(d))? else { continue };
            covered |= !values.is_empty();
            for a in &values {
                ensure(dist(a, a).is_zero(), || format!("{m}: d(x,x) != 0 at {a}"))?;
                for b in &values {
                    let ab = dist(a, b);
                    ensure(ab.same(&dist(b, a)), || format!("{m}: asymmetric on {a}, {b}"))?;
                    for c in &values {
                        triples += 1;
                        ensure(dist(a, c).le(&ab.add(&dist(b, c))), || format!("{m}: triangle fails on {a}, {b}, {c}"))?;
                    }
                }
            }
        }
        ensure(covered, || format!("{m} is undefined on every domain"))?;
        measures += 1;
    }
    Ok(format!("{measures} measures, {triples} triples, 0 violations"))
}

fn oracle_measures() -> Vec<MeasureSpec> {
    let mut ms = registry();
    ms.extend(["rbp?p=golden", "rbp?p=3/4", "dcg?b=3", "msr", "prec@2", "esl?size=1&s=1"].map(spec));
    ms
}

const ORACLE_DOMAINS: &[&str] = &[
    "binary:L=1..4,R=1..3",
    "binary:L=3,R=3",
    "binary:L=4,R=1",
    "binary:L=4,R=2",
    "binary:L=4,R=4",
    "binary:L=5,R=2",
    "binary:L=6,R=3",
    "binary:L=8,R=4",
    "graded:grades=3,L=3,R=2",
    "graded:grades=5,L=4,R=4",
    "contingency:N=6",
    "contingency:N=15,R=5,n=5",
    "contingency:N=15,R=5,n=0..15",
    "user:U=1..3,A=1..4",
    "user:U=1..2,A=1..3",
    "leveled:levels=3,size=2,s=1",
];

fn oracle_agreement() -> Check {
    let opts = ClassifyOptions { oracle_cap: 200, ..ClassifyOptions::default() };
    let (mut runs, mut positives, mut skipped) = (0, 0, 0);
    let mut pairs: Vec<(MeasureSpec, String)> = Vec::new();
    for m in oracle_measures() {
        for d in ORACLE_DOMAINS {
            pairs.push((m.clone(), d.to_string()));
        }
    }
    for l in 3..=8 {
        pairs.push((spec("rbp?p=1/2"), format!("binary:L={l},R={l}")));
    }
    for (m, d) in pairs {
        let v = match classify(&m, &dom(&d), &opts) {
            Ok(v) => v,
            Err(Error::UnsupportedElement { .. } | Error::EmptyDomain { .. }) => continue,
            Err(e) => return Err(format!("{m} on {d}: {e}")),
        };
        if v.classes > 200 {
            skipped += 1;
            continue;
        }
        let oracle = match &v.oracle {
            OracleOutcome::Skipped { .. } => return Err(format!("{m} on {d}: oracle skipped at {} classes", v.classes)),
            o => o.is_interval().unwrap_or_default(),
        };
        let direct = v.injective && matches!(v.spacing, Spacing::Equispaced { .. } | Spacing::Degenerate);
        ensure(oracle == direct, || format!("{m} on {d}: oracle {oracle}, injective+equispaced {direct}"))?;
        runs += 1;
        positives += usize::from(oracle);
    }
    ensure(positives > 0 && positives < runs, || format!("degenerate sample: {positives}/{runs} interval"))?;
    Ok(format!("{runs} (measure, domain) pairs, {positives} interval, 0 disagreements ({skipped} above 200 classes)"))
}

#[derive(PartialEq)]
struct Dist(Value);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Plain Dijkstra on the undirected weighted chain.
fn dijkstra(n: usize, adj: &[Vec<(usize, Value)>], source: usize) -> Vec<Value> {
    let mut best: Vec<Option<Value>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    best[source] = Some(Value::zero());
    heap.push(Reverse((Dist(Value::zero()), source)));
    while let Some(Reverse((Dist(d), u))) = heap.pop() {
        if best[u].as_ref().is_some_and(|b| b.total_cmp(&d) == Ordering::Less) {
            continue;
        }
        for (v, w) in &adj[u] {
            let nd = d.add(w);
            if best[*v].as_ref().is_none_or(|b| nd.total_cmp(b) == Ordering::Less) {
                best[*v] = Some(nd.clone());
                heap.push(Reverse((Dist(nd), *v)));
            }
        }
    }
    best.into_iter().map(|b| b.expect("chain is connected")).collect()
}

fn close(a: &Value, b: &Value) -> bool {
    match (a.as_exact(), b.as_exact()) {
        (Some(x), Some(y)) => x == y,
        _ => (a.to_f64() - b.to_f64()).abs() <= EPS,
    }
}

fn hasse_distances() -> Check {
    let opts = ClassifyOptions::default();
    let mut jobs: Vec<(MeasureSpec, &str)> = Vec::new();
    let small = [
        "binary:L=4,R=4",
        "binary:L=4,R=2",
        "binary:L=8,R=4",
        "graded:grades=5,L=4,R=4",
        "contingency:N=15,R=5,n=0..15",
        "user:U=1..2,A=1..3",
        "leveled:levels=3,size=2,s=1",
    ];
    for m in oracle_measures() {
        for d in small {
            jobs.push((m.clone(), d));
        }
    }
    for m in ["prec@4", "rr", "recall", "sr"] {
        jobs.push((spec(m), "binary:L=13,R=13"));
    }
    jobs.push((spec("rbp?p=1/2"), "binary:L=10,R=10"));
    jobs.push((spec("dcg?b=2"), "graded:grades=3,L=7,R=4"));

    let (mut pairs, mut domains, mut largest) = (0u64, 0, 0);
    for (m, d) in jobs {
        let od = match order_domain(&m, &dom(d), &opts) {
            Ok(od) => od,
            Err(Error::UnsupportedElement { .. } | Error::EmptyDomain { .. }) => continue,
            Err(e) => return Err(format!("{m} on {d}: {e}")),
        };
        let n = od.elements.len();
        ensure(n <= 10_000, || format!("{d} has {n} elements"))?;
        let h = build_hasse(&od);
        let k = h.nodes.len();
        let mut adj = vec![Vec::new(); k];
        for e in &h.edges {
            adj[e.from].push((e.to, e.weight.clone()));
            adj[e.to].push((e.from, e.weight.clone()));
        }
        let class = od.class_index();
        // fresh evaluation of every element, checked against its class value
        let fresh: Vec<Value> = od.elements.iter().map(|e| m.evaluate(e).expect("defined in the order")).collect();
        for (x, v) in fresh.iter().enumerate() {
            ensure(v.same(&h.nodes[class[x]].value), || format!("{m} on {d}: {} left its class", od.elements[x]))?;
        }
        // |f(x) - f(y)| depends only on the classes once the above holds
        let reps: Vec<usize> = od.classes.iter().map(|c| c[0]).collect();
        // so each class pair stands for |A| x |B| element pairs
        for a in 0..k {
            let sp = dijkstra(k, &adj, a);
            for b in 0..k {
                let (x, y) = (reps[a], reps[b]);
                ensure(close(&sp[b], &dist(&fresh[x], &fresh[y])), || {
                    format!("{m} on {d}: path length {} differs from |f(x)-f(y)| on {} and {}", sp[b], od.elements[x], od.elements[y])
                })?;
                pairs += (od.classes[a].len() * od.classes[b].len()) as u64;
            }
        }
        domains += 1;
        largest = largest.max(n);
    }
    Ok(format!("{domains} ordered domains, {pairs} element pairs (largest {largest} elements), 0 mismatches"))
}

fn collision(m: &str, a: &Element, b: &Element, at: BigRational) -> Result<(), String> {
    let (va, vb) = (exact(&eval(m, a)), exact(&eval(m, b)));
    ensure(va == at && vb == at, || format!("{m}: {a} -> {va}, {b} -> {vb}, expected both {at}"))
}

fn paper_witnesses() -> Check {
    let one = BigRational::one();
    collision("prec@4", &ranked(&[1, 0, 0, 0], 4), &ranked(&[0, 1, 0, 0], 4), ratio(1, 4))?;

    let (d1, d2) = (eval("dcg?b=2", &ranked(&[1, 0, 0, 0], 4)), eval("dcg?b=2", &ranked(&[0, 1, 0, 0], 4)));
    ensure((d1.to_f64() - 1.0).abs() <= EPS && (d2.to_f64() - 1.0).abs() <= EPS, || format!("DCG_2: {d1}, {d2}"))?;

    collision("sr", &ranked(&[1, 0, 0, 0], 1), &ranked(&[0, 1, 0, 0], 1), one.clone())?;
    collision("rr", &ranked(&[0, 1, 0, 0], 4), &ranked(&[0, 1, 0, 1], 4), ratio(1, 2))?;
    collision("ap", &ranked(&[1, 0, 0, 0], 4), &ranked(&[0, 1, 0, 1], 4), ratio(1, 4))?;
    collision("r-precision", &ranked(&[0, 1, 0, 1], 2), &ranked(&[1, 0, 0, 1], 2), ratio(1, 2))?;
    collision("nxcg@4", &ranked(&[1, 0, 0, 0], 1), &ranked(&[0, 1, 0, 0], 1), one.clone())?;
    collision("gr@4", &ranked(&[1, 0, 0, 0], 1), &ranked(&[0, 1, 0, 0], 1), one.clone())?;
    collision("bpref", &ranked(&[1], 1), &ranked(&[1, 1], 2), one.clone())?;

    let msr: Vec<BigRational> =
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]].iter().map(|f| exact(&eval("msr", &ranked(f, 1)))).collect();
    ensure(msr == [one.clone(), ratio(1, 2), ratio(1, 3)], || format!("msr values {msr:?}"))?;
    ensure(&msr[0] - &msr[1] != &msr[1] - &msr[2], || "msr gaps are equal".into())?;
    let v = classify(&spec("msr"), &dom("binary:L=4,R=1"), &ClassifyOptions::default()).map_err(|e| e.to_string())?;
    ensure(v.category == Category::OrdinalMetric, || format!("msr on binary:L=4,R=1: {}", v.summary()))?;

    // esl: every within-level permutation of every binary L=4 ranking
    let esl = spec("esl?size=2&s=1");
    let mut permutations = 0;
    for bits in 0u8..16 {
        let flags: Vec<u8> = (0..4).map(|i| (bits >> (3 - i)) & 1).collect();
        let base = match esl.evaluate(&ranked(&flags, 4)) {
            Ok(v) => v,
            Err(Error::Undefined { .. }) => continue,
            Err(e) => return Err(e.to_string()),
        };
        for swap in 1..4u8 {
            let mut g = flags.clone();
            if swap & 1 != 0 {
                g.swap(0, 1);
            }
            if swap & 2 != 0 {
                g.swap(2, 3);
            }
            let v = esl.evaluate(&ranked(&g, 4)).map_err(|e| e.to_string())?;
            ensure(v.same(&base), || format!("esl {flags:?} -> {base} but {g:?} -> {v}"))?;
            permutations += usize::from(g != flags);
        }
    }

    // every collision a verdict reports re-evaluates to its recorded value
    let opts = ClassifyOptions::default();
    let mut rechecked = 0;
    for m in registry() {
        for d in ["binary:L=4,R=4", "binary:L=4,R=2", "contingency:N=15,R=5,n=0..15", "user:U=1..2,A=1..3"] {
            let Ok(v) = classify(&m, &dom(d), &opts) else { continue };
            if let Some(c) = &v.collision {
                for e in &c.elements {
                    let fresh = m.evaluate(e).map_err(|e| e.to_string())?;
                    ensure(fresh.same(&c.value), || format!("{m}: witness {e} re-evaluates to {fresh}, recorded {}", c.value))?;
                }
                rechecked += 1;
            }
        }
    }
    Ok(format!("10 worked collisions exact, msr 1 > 1/2 > 1/3 uneven, esl stable over {permutations} reorderings, {rechecked} witnesses re-evaluated"))
}

fn rbp_diff(p: &BigRational) -> BigRational {
    let m = MeasureSpec::rbp(Persistence::Rational(p.clone())).unwrap();
    let a = exact(&m.evaluate(&ranked(&[1, 0, 0], 3)).unwrap());
    let b = exact(&m.evaluate(&ranked(&[0, 1, 1], 3)).unwrap());
    a - b
}

fn rbp_golden() -> Check {
    let grid: Vec<BigRational> = (1..100).map(|k| ratio(k, 100)).collect();
    let bracket = grid
        .windows(2)
        .find(|w| rbp_diff(&w[0]).is_positive() != rbp_diff(&w[1]).is_positive())
        .ok_or("no sign change on the grid")?;
    let (mut lo, mut hi) = (bracket[0].clone(), bracket[1].clone());
    let lo_sign = rbp_diff(&lo).is_positive();
    for _ in 0..48 {
        let mid = (&lo + &hi) / BigRational::from_integer(2.into());
        if rbp_diff(&mid).is_positive() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = metriclass::value::rational_to_f64(&((&lo + &hi) / BigRational::from_integer(2.into())));
    let residual = p * p + p - 1.0;
    ensure(residual.abs() < EPS, || format!("root {p}: p^2+p-1 = {residual}"))?;
    ensure((p - Persistence::golden_value()).abs() < EPS, || format!("root {p} is not the golden value"))?;

    let opts = ClassifyOptions::default();
    let golden = spec("rbp?p=golden");
    let v = classify(&golden, &dom("binary:L=3,R=3"), &opts).map_err(|e| e.to_string())?;
    ensure(v.category == Category::OrdinalPseudometric, || format!("golden p on L=3: {}", v.summary()))?;
    let (a, b) = (golden.evaluate(&ranked(&[1, 0, 0], 3)).unwrap(), golden.evaluate(&ranked(&[0, 1, 1], 3)).unwrap());
    ensure(a.same(&b), || format!("golden p: {a} vs {b}"))?;

    let half = spec("rbp?p=1/2");
    for l in 3..=8u32 {
        let v = classify(&half, &dom(&format!("binary:L={l},R={l}")), &opts).map_err(|e| e.to_string())?;
        // normalizer (1-p)/g(top) times p^(L-1) collapses to 2^-L
        let want = Value::exact(BigRational::new(1.into(), num_bigint::BigInt::from(1u64 << l)));
        ensure(v.category == Category::IntervalMetric, || format!("p=1/2, L={l}: {}", v.summary()))?;
        ensure(matches!(&v.spacing, Spacing::Equispaced { gap } if gap.same(&want) && gap.as_exact().is_some()), || {
            format!("p=1/2, L={l}: {}", v.spacing)
        })?;
    }
    Ok(format!("crossing at p = {p:.12} (p^2+p-1 = {residual:.1e}); p=1/2 interval/metric with gap 2^-L for L=3..8"))
}

const TABLE1_AGREE: [&str; 16] = [
    "recall",
    "precision",
    "fallout",
    "miss rate",
    "classification accuracy",
    "error rate",
    "inverse recall",
    "inverse precision",
    "specificity",
    "false discovery rate",
    "false omission rate",
    "generality",
    "coverage ratio",
    "retrieval recall",
    "novelty ratio",
    "recall effort",
];

const TABLE2_AGREE: [&str; 18] = [
    "Prec@r",
    "R-precision",
    "sliding ratio",
    "modified sliding ratio",
    "Pnorm",
    "R-WP",
    "R-measure",
    "AP",
    "AWP",
    "Q-measure",
    "RR",
    "DCG_b",
    "RBP_p",
    "bpref",
    "nxCG[r]",
    "MAnxCG[r]",
    "gr[r]",
    "esl",
];

fn agreeing(report: &ClassificationReport, labels: &[&str]) -> Result<(), String> {
    for l in labels {
        let s = report.summary(l).ok_or_else(|| format!("no row for {l}"))?;
        ensure(s.status == Status::Agree, || format!("{l}: expected {:?}, found {:?}", s.expected, s.found))?;
    }
    Ok(())
}

fn table1(report: &ClassificationReport) -> Check {
    agreeing(report, &TABLE1_AGREE)?;
    let f = report.summary("F-measure").ok_or("no F-measure row")?;
    ensure(f.status == Status::Contested, || format!("F-measure status {}", f.status.as_str()))?;
    let w = f.witness.as_deref().ok_or("F-measure has no witness")?;
    ensure(report.rows().filter(|r| r.label == "F-measure").all(|r| r.agree == Some(false)), || {
        "F-measure rows are not flagged disagree".into()
    })?;
    Ok(format!("16/16 rows agree; F-measure contested, witness {w}"))
}

fn table2(report: &ClassificationReport) -> Check {
    agreeing(report, &TABLE2_AGREE)?;
    let r = report.summary("Rnorm").ok_or("no Rnorm row")?;
    ensure(r.status == Status::Contested, || format!("Rnorm status {}", r.status.as_str()))?;
    let w = r.witness.as_deref().ok_or("Rnorm has no witness")?;
    ensure(w.contains("⟨1,0,0,1⟩ = ⟨0,1,1,0⟩"), || format!("Rnorm witness {w}"))?;
    Ok(format!("18/18 rows agree; Rnorm contested, witness {w}"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn ingestion() -> Check {
    let read = |n: &str| std::fs::read_to_string(fixture(n)).map_err(|e| format!("{n}: {e}"));
    let qrels = parse_qrels(&read("qrels.txt")?).map_err(|e| e.to_string())?;
    let run = parse_run(&read("run.txt")?).map_err(|e| e.to_string())?;
    let conv = to_rankings(&run, &qrels, &default_scheme(&qrels), 4).map_err(|e| e.to_string())?;
    ensure(conv.topics.len() == 3 && conv.skipped.is_empty(), || format!("{} topics converted", conv.topics.len()))?;
    // topic -> (AP, DCG_2, RBP_1/2), derived by hand from the fixture
    let expected = [
        ("1", ratio(1, 2), ratio(3, 2), ratio(9, 16)),
        ("2", ratio(1, 1), ratio(2, 1), ratio(3, 4)),
        ("3", ratio(1, 6), ratio(1, 1), ratio(1, 4)),
    ];
    for ((topic, ap, dcg, rbp), t) in expected.iter().zip(&conv.topics) {
        ensure(&t.topic == topic, || format!("topic {} out of order", t.topic))?;
        let e = Element::ranked(t.ranking.clone(), t.universe.clone());
        let got_ap = exact(&eval("ap", &e));
        let got_rbp = exact(&eval("rbp?p=1/2", &e));
        let got_dcg = eval("dcg?b=2", &e);
        ensure(&got_ap == ap, || format!("topic {topic}: AP {got_ap}, want {ap}"))?;
        ensure(&got_rbp == rbp, || format!("topic {topic}: RBP {got_rbp}, want {rbp}"))?;
        let want = metriclass::value::rational_to_f64(dcg);
        ensure((got_dcg.to_f64() - want).abs() <= EPS, || format!("topic {topic}: DCG {got_dcg}, want {dcg}"))?;
    }

    let (q, r) = (fixture("qrels.txt"), fixture("run.txt"));
    let args = ["metriclass", "ingest-eval", "--qrels", q.to_str().unwrap(), "--run", r.to_str().unwrap()];
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = metriclass::cli::run(
        args.iter().copied().chain(["--measure", "ap", "--depth", "4", "--aggregate", "mean"]),
        &mut out,
        &mut err,
    );
    let text = String::from_utf8_lossy(&out);
    ensure(code == 0, || format!("exit {code}: {}", String::from_utf8_lossy(&err)))?;
    ensure(text.contains("mean\t5/9"), || format!("mean line missing:\n{text}"))?;
    ensure(text.contains(PERMISSIBILITY_WARNING), || format!("no warning:\n{text}"))?;
    Ok("AP 1/2, 1, 1/6; DCG_2 3/2, 2, 1; RBP_1/2 9/16, 3/4, 1/4; mean AP 5/9 with warning".into())
}

fn determinism() -> Check {
    let bin = env!("CARGO_BIN_EXE_metriclass");
    let once = || -> Result<Vec<u8>, String> {
        let o = Command::new(bin).args(["table", "--suite", "paper"]).output().map_err(|e| e.to_string())?;
        ensure(o.status.success(), || format!("exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr)))?;
        Ok(o.stdout)
    };
    let (a, b) = (once()?, once()?);
    ensure(!a.is_empty() && a == b, || "outputs differ".into())?;
    Ok(format!("{} bytes, identical", a.len()))
}

fn main() {
    let start = Instant::now();
    let suite = run_suite(&paper_suite(), &ClassifyOptions::default());
    let report = suite.as_ref().map_err(|e| e.to_string());
    let criteria: Vec<Criterion> = vec![
        ("pseudometric axioms on binary L=4", Box::new(pseudometric_axioms)),
        ("interval oracle vs injective+equispaced", Box::new(oracle_agreement)),
        ("Hasse shortest paths equal |f(x)-f(y)|", Box::new(hasse_distances)),
        ("worked witnesses", Box::new(paper_witnesses)),
        ("RBP golden-ratio crossing", Box::new(rbp_golden)),
        ("set-based table", Box::new(|| table1(report.clone()?))),
        ("rank-based table", Box::new(|| table2(report.clone()?))),
        ("ingestion round-trip", Box::new(ingestion)),
        ("table determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {why} [{secs:.1}s]", i + 1)
            }
        }
    }
    println!("{} of 9 criteria passed in {:.1}s", 9 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
