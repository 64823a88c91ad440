//! Executes the experiments of a config.

use std::collections::BTreeSet;
use std::time::Instant;

use anyhow::{anyhow, bail, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use rankone_core::analysis::{
    certify_v_alpha_lower_columns, joint_profile, multiplicative_profile, normalize_vector, verify_zero_window,
    witness_pair_search, Evidence, MeasureSeries, Reduction, SubsequenceRule,
};
use rankone_core::builders::{cyclic_extension_measure, SequenceRule, COPIES_KEY};
use rankone_core::oracle::Oracle;
use rankone_core::vectors::{Assignment, Relation};
use rankone_core::{
    decide_le_m, decide_le_p, ConstructionSpec, Error, Level, LevelSet, Limits, MeasureBound, OrderWitness, Vector,
    VerdictKind,
};

use crate::config::{
    AlphaVerdict, Experiment, ExperimentConfig, Points, ProfileMode, Rational, SetConfig, SubsequenceConfig,
    ZeroVerdict,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    /// Could not be decided: resource limits, unresolved depths, or a
    /// precondition that does not hold.
    Error,
    /// The claim checked by the experiment is false.
    Fail,
}

/// One CSV row: exact rationals as `p/q`.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesRow {
    pub n: String,
    pub shifts: String,
    pub mu_lower: String,
    pub mu_upper: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub id: String,
    pub kind: &'static str,
    pub status: Status,
    pub summary: String,
    pub data: Value,
    #[serde(skip)]
    pub series: Option<Vec<SeriesRow>>,
    #[serde(skip)]
    pub elapsed_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigReport {
    pub name: String,
    pub claim: String,
    pub construction: Value,
    pub status: Status,
    pub experiments: Vec<ExperimentResult>,
}

impl ConfigReport {
    /// 0 when nothing failed and not every experiment errored, 2 when a
    /// claim is falsified, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 2,
            Status::Error => 1,
        }
    }
}

/// `p/q`, also for integers.
pub fn frac(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn bound_json(b: &MeasureBound) -> Value {
    json!({ "lower": frac(&b.lower), "upper": frac(&b.upper), "exact": b.is_exact() })
}

fn join(xs: &[BigUint]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

fn row(n: &BigUint, shifts: &[BigUint], value: &MeasureBound) -> SeriesRow {
    SeriesRow {
        n: n.to_string(),
        shifts: join(shifts),
        mu_lower: frac(&value.lower),
        mu_upper: frac(&value.upper),
    }
}

struct Outcome {
    status: Status,
    summary: String,
    data: Value,
    series: Option<Vec<SeriesRow>>,
}

impl Outcome {
    fn new(status: Status, summary: impl Into<String>, data: Value) -> Self {
        Outcome {
            status,
            summary: summary.into(),
            data,
            series: None,
        }
    }
}

/// Normalizes a raw vector, recording how.
fn vector(raw: &[i64]) -> Result<(Vector, Value)> {
    let (v, reduction) = normalize_vector(raw)?;
    let note = match reduction {
        Reduction::Unchanged => Value::Null,
        r => json!(r.to_string()),
    };
    let data = json!({ "input": raw, "vector": v.components(), "reduction": note });
    Ok((v, data))
}

/// Combines per-check outcomes: any certain failure wins, then any
/// undecided check.
fn worst(statuses: impl IntoIterator<Item = Status>) -> Status {
    statuses.into_iter().max().unwrap_or(Status::Pass)
}

/// Every value at least `min`: fails if some upper bound is below it,
/// undecided if only a lower bound is.
fn check_min<'a>(values: impl IntoIterator<Item = &'a MeasureBound>, min: &BigRational) -> Status {
    worst(values.into_iter().map(|b| {
        if &b.upper < min {
            Status::Fail
        } else if &b.lower < min {
            Status::Error
        } else {
            Status::Pass
        }
    }))
}

/// Every value exactly zero.
fn check_zero<'a>(values: impl IntoIterator<Item = &'a MeasureBound>) -> Status {
    worst(values.into_iter().map(|b| {
        if !b.lower.is_zero() {
            Status::Fail
        } else if !b.upper.is_zero() {
            Status::Error
        } else {
            Status::Pass
        }
    }))
}

fn depth_for(spec: &ConstructionSpec, limits: &Limits) -> usize {
    spec.stage_limit().map_or(limits.depth_cap, |s| s.min(limits.depth_cap))
}

fn profile(
    spec: &ConstructionSpec,
    limits: &Limits,
    mode: ProfileMode,
    raw: &[i64],
    set: &Option<SetConfig>,
    points: &Points,
    expect: &crate::config::ProfileExpect,
) -> Result<Outcome> {
    let (v, vjson) = vector(raw)?;
    let set = SetConfig::level_set(set)?;
    let ns = points.resolve(spec)?;
    let series: MeasureSeries = match mode {
        ProfileMode::Joint => joint_profile(spec, &set, &v, &ns, limits)?,
        ProfileMode::Multiplicative => multiplicative_profile(spec, &set, &v, &ns, limits)?,
    };
    let values: Vec<&MeasureBound> = series.entries.iter().map(|e| &e.value).collect();
    let mut checks = Vec::new();
    if let Some(Rational(min)) = &expect.min_lower {
        checks.push(check_min(values.iter().copied(), min));
    }
    if expect.all_zero == Some(true) {
        checks.push(check_zero(values.iter().copied()));
    }
    let status = worst(checks);
    let min = series.min_lower().map(frac).unwrap_or_default();
    let notes: Vec<String> = series
        .entries
        .iter()
        .filter_map(|e| e.note.as_ref().map(|s| format!("n = {}: {s}", e.n)))
        .collect();
    let mut out = Outcome::new(
        status,
        format!(
            "{} points, smallest lower bound {min}{}",
            ns.len(),
            if series.all_exact() {
                ""
            } else {
                ", some values are intervals"
            }
        ),
        json!({ "v": vjson, "points": ns.len(), "min_lower": min, "all_exact": series.all_exact(), "notes": notes }),
    );
    out.series = Some(series.entries.iter().map(|e| row(&e.n, &e.shifts, &e.value)).collect());
    Ok(out)
}

fn evidence_json(e: &Evidence) -> Value {
    match e {
        Evidence::Exhaustive => json!({ "exhaustive": true }),
        Evidence::BuilderGuarantee(s) => json!({ "builder_guarantee": s }),
        Evidence::Citation(s) => json!({ "citation": s }),
    }
}

fn verdict_name(k: VerdictKind) -> &'static str {
    match k {
        VerdictKind::PositiveWitnessed => "positive_witnessed",
        VerdictKind::ZeroOnWindow => "zero_on_window",
        VerdictKind::Refuted => "refuted",
        VerdictKind::Inconclusive => "inconclusive",
    }
}

fn verify_zero(
    spec: &ConstructionSpec,
    limits: &Limits,
    raw: &[i64],
    set: &Option<SetConfig>,
    windows: &[usize],
    expect: ZeroVerdict,
) -> Result<Outcome> {
    if windows.is_empty() {
        bail!("no windows listed");
    }
    let (v, vjson) = vector(raw)?;
    let set = SetConfig::level_set(set)?;
    let verdicts = windows
        .par_iter()
        .map(|&n| verify_zero_window(spec, &set, &v, n, limits))
        .collect::<rankone_core::Result<Vec<_>>>()?;
    let kinds: Vec<VerdictKind> = verdicts.iter().map(|x| x.kind).collect();
    let status = match expect {
        ZeroVerdict::Zero => worst(kinds.iter().map(|k| match k {
            VerdictKind::ZeroOnWindow => Status::Pass,
            VerdictKind::Refuted => Status::Fail,
            _ => Status::Error,
        })),
        ZeroVerdict::Refuted => {
            if kinds.contains(&VerdictKind::Refuted) {
                Status::Pass
            } else if kinds.iter().all(|k| *k == VerdictKind::ZeroOnWindow) {
                Status::Fail
            } else {
                Status::Error
            }
        }
    };
    let data: Vec<Value> = windows
        .iter()
        .zip(&verdicts)
        .map(|(n, x)| {
            json!({
                "window": n,
                "range": x.windows.first().map(|(lo, hi)| format!("({lo}, {hi}]")),
                "verdict": verdict_name(x.kind),
                "witnesses": x.witnesses.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "evidence": x.evidence.iter().map(evidence_json).collect::<Vec<_>>(),
                "notes": x.notes,
            })
        })
        .collect();
    let zero = kinds.iter().filter(|k| **k == VerdictKind::ZeroOnWindow).count();
    Ok(Outcome::new(
        status,
        format!("{zero} of {} windows verified zero", windows.len()),
        json!({ "v": vjson, "windows": data }),
    ))
}

fn certify(
    spec: &ConstructionSpec,
    limits: &Limits,
    raw: &[i64],
    sub: &SubsequenceConfig,
    m_max: usize,
    max_column: Option<usize>,
    expect: &crate::config::AlphaExpect,
) -> Result<Outcome> {
    let (v, vjson) = vector(raw)?;
    let rule = match &sub.terms {
        Some(t) => SubsequenceRule::Explicit(t.iter().map(|&x| BigUint::from(x)).collect()),
        None => SubsequenceRule::ColumnHeight {
            scale: sub.scale,
            every: sub.every,
            phase: sub.phase,
        },
    };
    let verdict = certify_v_alpha_lower_columns(spec, &v, &rule, m_max, max_column.unwrap_or(m_max), limits)?;
    let positive = verdict.kind == VerdictKind::PositiveWitnessed;
    // a zero ratio is only a refutation when every measure was decided
    let undecided = !verdict
        .notes
        .iter()
        .all(|n| n.contains("zero lower bound") || n.contains("no builder"));
    let mut checks = Vec::new();
    if let Some(want) = expect.verdict {
        checks.push(match (want, positive) {
            (AlphaVerdict::Positive, true) | (AlphaVerdict::Inconclusive, false) => Status::Pass,
            (AlphaVerdict::Positive, false) if undecided => Status::Error,
            _ => Status::Fail,
        });
    }
    if let Some(Rational(min)) = &expect.min_bound {
        checks.push(if &verdict.bound >= min {
            Status::Pass
        } else if undecided {
            Status::Error
        } else {
            Status::Fail
        });
    }
    Ok(Outcome::new(
        worst(checks),
        format!("{}, ratio {}", verdict_name(verdict.kind), frac(&verdict.bound)),
        json!({
            "v": vjson,
            "verdict": verdict_name(verdict.kind),
            "bound": frac(&verdict.bound),
            "witnesses": verdict.witnesses.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "evidence": verdict.evidence.iter().map(evidence_json).collect::<Vec<_>>(),
            "notes": verdict.notes,
        }),
    ))
}

pub fn witness_json(w: &OrderWitness) -> Value {
    let relation = match w.relation {
        Relation::LeP => "le_p",
        Relation::LeM => "le_m",
    };
    let assignment = match &w.assignment {
        Assignment::Injection { targets, base } => json!({ "targets": targets, "base": base }),
        Assignment::SignedSums(sets) => json!(sets
            .iter()
            .map(|s| json!({ "plus": s.plus, "minus": s.minus }))
            .collect::<Vec<_>>()),
    };
    json!({ "relation": relation, "n": w.n, "m": w.m, "c": w.c, "assignment": assignment })
}

/// Both relations for `v` against `w`, with witnesses.
pub fn compare(v: &[i64], w: &[i64]) -> Result<Value> {
    let (v, vjson) = vector(v)?;
    let (w, wjson) = vector(w)?;
    let (p, pw) = decide_le_p(&v, &w);
    let (m, mw) = decide_le_m(&v, &w);
    Ok(json!({
        "v": vjson,
        "w": wjson,
        "le_p": p,
        "le_m": m,
        "le_p_witness": pw.as_ref().map(witness_json),
        "le_m_witness": mw.as_ref().map(witness_json),
    }))
}

fn order(v: &[i64], w: &[i64], expect: &crate::config::OrderExpect) -> Result<Outcome> {
    let data = compare(v, w)?;
    let (p, m) = (data["le_p"].as_bool().unwrap(), data["le_m"].as_bool().unwrap());
    let mut checks = Vec::new();
    for (want, got) in [(expect.le_p, p), (expect.le_m, m)] {
        if let Some(want) = want {
            checks.push(if want == got { Status::Pass } else { Status::Fail });
        }
    }
    Ok(Outcome::new(worst(checks), format!("le_p = {p}, le_m = {m}"), data))
}

/// Parameters of an oracle cross-check.
#[derive(Debug, Clone)]
pub struct AuditParams {
    pub max_depth: usize,
    pub max_column: usize,
    pub height_cap: u64,
    pub level_sample: u64,
    pub shifts: Option<Vec<Vec<u64>>>,
}

fn sampled_levels(h: u64, sample: u64) -> Vec<u64> {
    if h <= sample || sample < 2 {
        return (0..h.min(sample.max(1))).collect();
    }
    let mut xs: BTreeSet<u64> = (0..sample).map(|i| i * (h - 1) / (sample - 1)).collect();
    xs.insert(1);
    xs.into_iter().collect()
}

fn default_shifts(hs: &[BigUint]) -> Vec<Vec<BigUint>> {
    let top = hs.get(3).unwrap_or_else(|| hs.last().unwrap()).clone();
    let one = BigUint::from(1u32);
    let mut out = vec![
        vec![BigUint::zero()],
        vec![one.clone()],
        vec![one.clone(), BigUint::from(2u32)],
        vec![top.clone()],
    ];
    for h in hs.iter().take(4).skip(1) {
        out.push(vec![h.clone()]);
        if h * 2u32 <= top {
            out.push(vec![h.clone(), h * 2u32]);
        }
        out.push(vec![h - 1u32, h + 1u32]);
    }
    out
}

/// Cases checked and the disagreements found.
pub fn oracle_audit(spec: &ConstructionSpec, limits: &Limits, p: &AuditParams) -> Result<(usize, Vec<String>)> {
    let depth = p.max_depth.min(depth_for(spec, limits));
    let tower = spec.tower(depth)?;
    let shifts: Vec<Vec<BigUint>> = match &p.shifts {
        Some(list) => list
            .iter()
            .map(|s| s.iter().map(|&x| BigUint::from(x)).collect())
            .collect(),
        None => default_shifts(tower.heights()),
    };
    if shifts.iter().any(Vec::is_empty) {
        bail!("every shift vector needs at least one entry");
    }
    let mut cases = 0;
    let mut mismatches = Vec::new();
    for n in 0..=depth {
        let Some(h) = tower.height(n).to_u64().filter(|&h| h <= p.height_cap) else {
            break;
        };
        let _ = h;
        let oracle = Oracle::new(spec, n, p.height_cap)?;
        let mut jobs = Vec::new();
        for c in 0..=n.min(p.max_column) {
            let hc = tower.height(c).to_u64().expect("below the oracle cap");
            for x in sampled_levels(hc, p.level_sample) {
                for s in &shifts {
                    jobs.push((c, x, s));
                }
            }
        }
        let results = jobs
            .par_iter()
            .map(|&(c, x, s)| {
                let set = LevelSet::single(&Level::new(c, x));
                let core = tower.intersection_measure(&set, s, n, limits)?;
                let signed: Vec<BigInt> = s.iter().map(|k| BigInt::from(k.clone())).collect();
                let brute = oracle.intersection(&set, &signed)?;
                Ok((core != brute).then(|| {
                    format!(
                        "column {n}, level ({c}, {x}), shifts [{}]: core {core}, oracle {brute}",
                        join(s)
                    )
                }))
            })
            .collect::<rankone_core::Result<Vec<_>>>()?;
        cases += results.len();
        mismatches.extend(results.into_iter().flatten());
    }
    Ok((cases, mismatches))
}

fn audit(spec: &ConstructionSpec, limits: &Limits, p: &AuditParams, min_cases: Option<usize>) -> Result<Outcome> {
    let (cases, mismatches) = oracle_audit(spec, limits, p)?;
    let status = if !mismatches.is_empty() {
        Status::Fail
    } else if min_cases.is_some_and(|m| cases < m) {
        Status::Error
    } else {
        Status::Pass
    };
    Ok(Outcome::new(
        status,
        format!("{cases} cases, {} disagreements", mismatches.len()),
        json!({ "cases": cases, "disagreements": mismatches }),
    ))
}

fn witness(
    spec: &ConstructionSpec,
    limits: &Limits,
    set: &Option<SetConfig>,
    terms: &Points,
    window: usize,
    start: usize,
    min_ratio: &Option<Rational>,
) -> Result<Outcome> {
    let set = SetConfig::level_set(set)?;
    let terms = terms.resolve(spec)?;
    let w = match witness_pair_search(spec, &set, &terms, window, start, limits) {
        Ok(w) => w,
        Err(Error::Anomaly(msg)) => return Ok(Outcome::new(Status::Fail, msg.clone(), json!({ "anomaly": msg }))),
        Err(e) => return Err(e.into()),
    };
    let mu = spec.tower(set.column())?.measure(&set);
    let ratio = &w.value.lower / &mu;
    let status = match min_ratio {
        Some(Rational(min)) if &ratio < min => Status::Fail,
        _ => Status::Pass,
    };
    let mut out = Outcome::new(
        status,
        format!(
            "pair (n, m) = ({}, {}), value {}, bound {}",
            w.n,
            w.m,
            w.value,
            frac(&w.bound)
        ),
        json!({
            "n": w.n,
            "m": w.m,
            "value": bound_json(&w.value),
            "bound": frac(&w.bound),
            "ratio": frac(&ratio),
            "pairwise": w.pairwise.iter().map(|(k, b)| json!({ "k": k, "value": bound_json(b) })).collect::<Vec<_>>(),
        }),
    );
    out.series = Some(
        w.pairwise
            .iter()
            .map(|(k, b)| row(&terms[*k], &[terms[*k].clone()], b))
            .collect(),
    );
    Ok(out)
}

fn sequence_avoid(
    spec: &ConstructionSpec,
    limits: &Limits,
    a: &SequenceRule,
    b: &SequenceRule,
    up_to: usize,
    set: &Option<SetConfig>,
    expect: &crate::config::AvoidExpect,
) -> Result<Outcome> {
    a.validate()?;
    b.validate()?;
    let set = SetConfig::level_set(set)?;
    let depth = depth_for(spec, limits).max(up_to);
    let tower = spec.tower(depth)?;
    let top = tower.height(up_to).clone();
    let mut ks = Vec::new();
    for k in 1u64.. {
        let (Some(ak), Some(bk)) = (a.term(k), b.term(k)) else {
            bail!("sequences end before a_k + b_k exceeds {top}");
        };
        if &ak + &bk > top {
            break;
        }
        ks.push((k, ak, bk));
    }
    let measure = |shifts: &[BigUint]| -> rankone_core::Result<MeasureBound> {
        let (value, res) = tower.resolved_measure(&set, shifts, limits)?;
        Ok(if res.resolved {
            value
        } else {
            MeasureBound::new(BigRational::zero(), value.upper)?
        })
    };
    let rows = ks
        .par_iter()
        .map(|(k, ak, bk)| {
            let sum = ak + bk;
            let joint = measure(&[ak.clone(), sum.clone()])?;
            let mut product = MeasureBound::exact(BigRational::from_integer(1.into()));
            for s in [ak, bk, &sum] {
                product = product.mul(&measure(std::slice::from_ref(s))?);
            }
            Ok((*k, ak.clone(), sum, joint, product))
        })
        .collect::<rankone_core::Result<Vec<_>>>()?;
    let mut checks = Vec::new();
    if expect.joint_zero {
        checks.push(check_zero(rows.iter().map(|r| &r.3)));
    }
    if expect.product_zero {
        checks.push(check_zero(rows.iter().map(|r| &r.4)));
    }
    let zero_joint = rows.iter().filter(|r| r.3.upper.is_zero()).count();
    let zero_product = rows.iter().filter(|r| r.4.upper.is_zero()).count();
    let mut out = Outcome::new(
        worst(checks),
        format!(
            "{} values of k up to h_{up_to} = {top}: joint zero for {zero_joint}, product zero for {zero_product}",
            rows.len()
        ),
        json!({
            "up_to": top.to_string(),
            "cases": rows.iter().map(|(k, ak, sum, joint, product)| json!({
                "k": k,
                "a_k": ak.to_string(),
                "a_k_plus_b_k": sum.to_string(),
                "joint": bound_json(joint),
                "product": bound_json(product),
            })).collect::<Vec<_>>(),
        }),
    );
    out.series = Some(
        rows.iter()
            .map(|(k, ak, sum, joint, _)| row(&BigUint::from(*k), &[ak.clone(), sum.clone()], joint))
            .collect(),
    );
    Ok(out)
}

fn cyclic(
    spec: &ConstructionSpec,
    limits: &Limits,
    copies: Option<u64>,
    set: &Option<SetConfig>,
    points: &Points,
    expect: &crate::config::CyclicExpect,
) -> Result<Outcome> {
    let copies = match copies {
        Some(k) => k,
        None => spec
            .metadata()
            .get(COPIES_KEY)
            .ok_or_else(|| anyhow!("no `copies` given and the construction records none"))?
            .parse()?,
    };
    let set = SetConfig::level_set(set)?;
    let mu = spec.tower(set.column())?.measure(&set);
    let ns = points.resolve(spec)?;
    let values = ns
        .par_iter()
        .map(|n| cyclic_extension_measure(spec, &set, n, copies, limits))
        .collect::<rankone_core::Result<Vec<_>>>()?;
    let k = BigUint::from(copies);
    let on: Vec<&MeasureBound> = ns
        .iter()
        .zip(&values)
        .filter(|(n, _)| (*n % &k).is_zero())
        .map(|(_, v)| v)
        .collect();
    let off: Vec<&MeasureBound> = ns
        .iter()
        .zip(&values)
        .filter(|(n, _)| !(*n % &k).is_zero())
        .map(|(_, v)| v)
        .collect();
    let mut checks = Vec::new();
    if expect.zero_off_multiples {
        checks.push(check_zero(off.iter().copied()));
    }
    if let Some(Rational(r)) = &expect.min_ratio_on_multiples {
        checks.push(check_min(on.iter().copied(), &(r * &mu)));
    }
    let mut out = Outcome::new(
        worst(checks),
        format!("{copies} copies, {} points ({} multiples)", ns.len(), on.len()),
        json!({ "copies": copies, "points": ns.len(), "multiples": on.len() }),
    );
    out.series = Some(
        ns.iter()
            .zip(&values)
            .map(|(n, v)| row(n, std::slice::from_ref(n), v))
            .collect(),
    );
    Ok(out)
}

fn execute(spec: &ConstructionSpec, limits: &Limits, e: &Experiment) -> Result<Outcome> {
    match e {
        Experiment::Profile {
            mode,
            v,
            set,
            points,
            expect,
            ..
        } => profile(spec, limits, *mode, v, set, points, expect),
        Experiment::VerifyZero {
            v,
            set,
            windows,
            expect,
            ..
        } => verify_zero(spec, limits, v, set, windows, expect.verdict),
        Experiment::CertifyAlpha {
            v,
            subsequence,
            m_max,
            max_column,
            expect,
            ..
        } => certify(spec, limits, v, subsequence, *m_max, *max_column, expect),
        Experiment::Order { v, w, expect, .. } => order(v, w, expect),
        Experiment::OracleAudit {
            max_depth,
            max_column,
            height_cap,
            level_sample,
            shifts,
            expect,
            ..
        } => {
            let p = AuditParams {
                max_depth: *max_depth,
                max_column: *max_column,
                height_cap: *height_cap,
                level_sample: *level_sample,
                shifts: shifts.clone(),
            };
            audit(spec, limits, &p, expect.min_cases)
        }
        Experiment::WitnessSearch {
            set,
            terms,
            window,
            start,
            expect,
            ..
        } => witness(spec, limits, set, terms, *window, *start, &expect.min_ratio),
        Experiment::SequenceAvoid {
            a,
            b,
            up_to_column,
            set,
            expect,
            ..
        } => sequence_avoid(spec, limits, a, b, *up_to_column, set, expect),
        Experiment::CyclicExtension {
            copies,
            set,
            points,
            expect,
            ..
        } => cyclic(spec, limits, *copies, set, points, expect),
    }
}

/// Runs every experiment (concurrently; results keep config order).
pub fn run_config(config: &ExperimentConfig, limits: &Limits) -> Result<ConfigReport> {
    let spec = config.construction.build()?;
    let experiments: Vec<ExperimentResult> = config
        .experiments
        .par_iter()
        .map(|e| {
            let start = Instant::now();
            let outcome = execute(&spec, limits, e).unwrap_or_else(|err| {
                Outcome::new(
                    Status::Error,
                    format!("{err:#}"),
                    json!({ "error": format!("{err:#}") }),
                )
            });
            ExperimentResult {
                id: e.id().to_owned(),
                kind: e.kind(),
                status: outcome.status,
                summary: outcome.summary,
                data: outcome.data,
                series: outcome.series,
                elapsed_ms: start.elapsed().as_millis(),
            }
        })
        .collect();
    let status = if experiments.iter().any(|e| e.status == Status::Fail) {
        Status::Fail
    } else if !experiments.is_empty() && experiments.iter().all(|e| e.status == Status::Error) {
        Status::Error
    } else {
        Status::Pass
    };
    Ok(ConfigReport {
        name: config.name.clone(),
        claim: config.claim.clone(),
        construction: json!({ "name": spec.name(), "metadata": spec.metadata() }),
        status,
        experiments,
    })
}
