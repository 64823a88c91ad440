//! The JSON experiment config.

use std::collections::BTreeSet;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use num_bigint::BigUint;
use num_rational::BigRational;
use serde::Deserialize;

use rankone_core::builders::SequenceRule;
use rankone_core::{BuilderParams, ConstructionSpec, LevelSet, Stage};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// The statement the experiments check, in words.
    #[serde(default)]
    pub claim: String,
    pub construction: Construction,
    #[serde(default)]
    pub limits: LimitsConfig,
    #[serde(default)]
    pub experiments: Vec<Experiment>,
    #[serde(default)]
    pub output: OutputConfig,
}

/// A builder with parameters, or an explicit list of stages given by their
/// spacer counts (one entry per subcolumn).
#[derive(Debug, Clone)]
pub enum Construction {
    Explicit { name: String, stages: Vec<Vec<u64>> },
    Builder(BuilderParams),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitConstruction {
    #[serde(default = "explicit_name")]
    name: String,
    stages: Vec<Vec<u64>>,
}

fn explicit_name() -> String {
    "explicit".into()
}

impl<'de> Deserialize<'de> for Construction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let value = serde_json::Value::deserialize(d)?;
        if value.get("stages").is_some() {
            let e: ExplicitConstruction = serde_json::from_value(value).map_err(D::Error::custom)?;
            Ok(Construction::Explicit {
                name: e.name,
                stages: e.stages,
            })
        } else {
            serde_json::from_value(value)
                .map(Construction::Builder)
                .map_err(D::Error::custom)
        }
    }
}

impl Construction {
    pub fn build(&self) -> Result<ConstructionSpec> {
        match self {
            Construction::Explicit { name, stages } => {
                let stages = stages
                    .iter()
                    .enumerate()
                    .map(|(n, s)| Stage::from_u64(s).with_context(|| format!("stage {n}")))
                    .collect::<Result<Vec<_>>>()?;
                Ok(ConstructionSpec::explicit(stages)?.with_name(name.clone()))
            }
            Construction::Builder(p) => Ok(p.build()?),
        }
    }

    /// Short description for listings.
    pub fn label(&self) -> String {
        match self {
            Construction::Explicit { name, stages } => format!("{name} ({} explicit stages)", stages.len()),
            Construction::Builder(p) => serde_json::to_value(p)
                .ok()
                .and_then(|v| v.get("builder").and_then(|b| b.as_str()).map(str::to_owned))
                .unwrap_or_default(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitsConfig {
    pub depth_cap: Option<usize>,
    pub cardinality_budget: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory for results; `out/<name>` when absent.
    pub dir: Option<PathBuf>,
}

/// A union of levels of one column; the base level by default.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetConfig {
    pub column: usize,
    pub heights: Vec<u64>,
}

impl SetConfig {
    pub fn level_set(set: &Option<SetConfig>) -> Result<LevelSet> {
        match set {
            None => Ok(LevelSet::base()),
            Some(s) => {
                if s.heights.is_empty() {
                    bail!("a level set needs at least one height");
                }
                Ok(LevelSet::from_u64(s.column, &s.heights))
            }
        }
    }
}

/// A list of positive integers `n`.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Points {
    /// Listed values.
    Values(Vec<u64>),
    /// Every integer in `[from, to]`.
    Range { from: u64, to: u64 },
    /// `scale * h_c` for `c = from, from + every, ..., <= to`.
    Heights {
        from: usize,
        to: usize,
        #[serde(default = "one_usize")]
        every: usize,
        #[serde(default = "one_u64")]
        scale: u64,
    },
    /// `scale * h_c` for the listed columns.
    Columns {
        columns: Vec<usize>,
        #[serde(default = "one_u64")]
        scale: u64,
    },
}

fn one_usize() -> usize {
    1
}

fn one_u64() -> u64 {
    1
}

impl Points {
    /// Sorted, without repeats.
    pub fn resolve(&self, spec: &ConstructionSpec) -> Result<Vec<BigUint>> {
        let mut out = match self {
            Points::Values(xs) => xs.iter().map(|&x| BigUint::from(x)).collect(),
            Points::Range { from, to } => {
                if from > to {
                    bail!("empty range [{from}, {to}]");
                }
                (*from..=*to).map(BigUint::from).collect()
            }
            Points::Heights { from, to, every, scale } => {
                if *every == 0 {
                    bail!("`every` must be at least 1");
                }
                let cols: Vec<usize> = (*from..=*to).step_by(*every).collect();
                heights(spec, &cols, *scale)?
            }
            Points::Columns { columns, scale } => heights(spec, columns, *scale)?,
        };
        out.sort();
        out.dedup();
        Ok(out)
    }
}

fn heights(spec: &ConstructionSpec, columns: &[usize], scale: u64) -> Result<Vec<BigUint>> {
    if scale == 0 {
        bail!("`scale` must be at least 1");
    }
    let depth = columns.iter().copied().max().unwrap_or(0);
    let tower = spec.tower(depth)?;
    Ok(columns.iter().map(|&c| tower.height(c) * scale).collect())
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ProfileMode {
    Joint,
    Multiplicative,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileExpect {
    /// Every value is exact and at least this (`p/q`).
    pub min_lower: Option<Rational>,
    /// Every value is exactly zero.
    pub all_zero: Option<bool>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ZeroVerdict {
    #[default]
    Zero,
    Refuted,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZeroExpect {
    #[serde(default)]
    pub verdict: ZeroVerdict,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum AlphaVerdict {
    Positive,
    Inconclusive,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaExpect {
    pub verdict: Option<AlphaVerdict>,
    pub min_bound: Option<Rational>,
}

/// `n_m = scale * h_{phase + every * m}`, or listed terms.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsequenceConfig {
    #[serde(default = "one_u64")]
    pub scale: u64,
    #[serde(default = "one_usize")]
    pub every: usize,
    #[serde(default)]
    pub phase: usize,
    pub terms: Option<Vec<u64>>,
}

impl Default for SubsequenceConfig {
    fn default() -> Self {
        SubsequenceConfig {
            scale: 1,
            every: 1,
            phase: 0,
            terms: None,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderExpect {
    pub le_p: Option<bool>,
    pub le_m: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditExpect {
    pub min_cases: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessExpect {
    /// The pair's value divided by `mu(A)` is at least this.
    pub min_ratio: Option<Rational>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AvoidExpect {
    #[serde(default = "yes")]
    pub joint_zero: bool,
    #[serde(default)]
    pub product_zero: bool,
}

impl Default for AvoidExpect {
    fn default() -> Self {
        AvoidExpect {
            joint_zero: true,
            product_zero: false,
        }
    }
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CyclicExpect {
    /// Zero whenever the number of copies does not divide `n`.
    #[serde(default)]
    pub zero_off_multiples: bool,
    /// At multiples of the number of copies, at least this times `mu(A)`.
    pub min_ratio_on_multiples: Option<Rational>,
}

fn default_audit_depth() -> usize {
    5
}

fn default_audit_column() -> usize {
    3
}

fn default_height_cap() -> u64 {
    4096
}

fn default_level_sample() -> u64 {
    16
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Experiment {
    /// Measures along a list of `n`.
    Profile {
        id: String,
        mode: ProfileMode,
        v: Vec<i64>,
        set: Option<SetConfig>,
        points: Points,
        #[serde(default)]
        expect: ProfileExpect,
    },
    /// Zero joint measure on `(h_{n-1}, h_n]` for each listed `n`.
    VerifyZero {
        id: String,
        v: Vec<i64>,
        set: Option<SetConfig>,
        windows: Vec<usize>,
        #[serde(default)]
        expect: ZeroExpect,
    },
    /// Uniform lower ratio over all levels of the first columns.
    CertifyAlpha {
        id: String,
        v: Vec<i64>,
        #[serde(default)]
        subsequence: SubsequenceConfig,
        m_max: usize,
        max_column: Option<usize>,
        #[serde(default)]
        expect: AlphaExpect,
    },
    Order {
        id: String,
        v: Vec<i64>,
        w: Vec<i64>,
        #[serde(default)]
        expect: OrderExpect,
    },
    /// Cross-check against the interval oracle.
    OracleAudit {
        id: String,
        #[serde(default = "default_audit_depth")]
        max_depth: usize,
        #[serde(default = "default_audit_column")]
        max_column: usize,
        #[serde(default = "default_height_cap")]
        height_cap: u64,
        #[serde(default = "default_level_sample")]
        level_sample: u64,
        shifts: Option<Vec<Vec<u64>>>,
        #[serde(default)]
        expect: AuditExpect,
    },
    /// A pair `n > m` in a window of `2M + 1` terms with a large triple
    /// intersection.
    WitnessSearch {
        id: String,
        set: Option<SetConfig>,
        terms: Points,
        window: usize,
        #[serde(default)]
        start: usize,
        #[serde(default)]
        expect: WitnessExpect,
    },
    /// `mu(A ∩ T^{a_k}A ∩ T^{a_k+b_k}A)` and the matching product for every
    /// `k` with `a_k + b_k <= h_c`.
    SequenceAvoid {
        id: String,
        a: SequenceRule,
        b: SequenceRule,
        up_to_column: usize,
        set: Option<SetConfig>,
        #[serde(default)]
        expect: AvoidExpect,
    },
    /// `mu'(A ∩ T'^n A)` on a cyclic extension with `copies` fibers.
    CyclicExtension {
        id: String,
        copies: Option<u64>,
        set: Option<SetConfig>,
        points: Points,
        #[serde(default)]
        expect: CyclicExpect,
    },
}

impl Experiment {
    pub fn id(&self) -> &str {
        match self {
            Experiment::Profile { id, .. }
            | Experiment::VerifyZero { id, .. }
            | Experiment::CertifyAlpha { id, .. }
            | Experiment::Order { id, .. }
            | Experiment::OracleAudit { id, .. }
            | Experiment::WitnessSearch { id, .. }
            | Experiment::SequenceAvoid { id, .. }
            | Experiment::CyclicExtension { id, .. } => id,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Profile { .. } => "profile",
            Experiment::VerifyZero { .. } => "verify-zero",
            Experiment::CertifyAlpha { .. } => "certify-alpha",
            Experiment::Order { .. } => "order",
            Experiment::OracleAudit { .. } => "oracle-audit",
            Experiment::WitnessSearch { .. } => "witness-search",
            Experiment::SequenceAvoid { .. } => "sequence-avoid",
            Experiment::CyclicExtension { .. } => "cyclic-extension",
        }
    }
}

/// An exact rational written `p/q` or `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rational(pub BigRational);

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let s = String::deserialize(d)?;
        s.trim()
            .parse::<BigRational>()
            .map(Rational)
            .map_err(|_| D::Error::custom(format!("`{s}` is not an exact rational p/q")))
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text).context("invalid experiment config")?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            bail!("config name must be non-empty and contain no path separators");
        }
        let mut ids = BTreeSet::new();
        for e in &self.experiments {
            let id = e.id();
            if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
                bail!("experiment id `{id}` must be non-empty and use only letters, digits, `-` and `_`");
            }
            if !ids.insert(id) {
                bail!("experiment id `{id}` is used twice");
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_and_builder_constructions() {
        let c: Construction = serde_json::from_str(r#"{"stages": [[0, 2], [0, 0, 1]]}"#).unwrap();
        let spec = c.build().unwrap();
        assert_eq!(spec.tower(2).unwrap().height(2), &BigUint::from(13u32));
        let c: Construction = serde_json::from_str(r#"{"builder": "hk_skyscraper"}"#).unwrap();
        assert_eq!(c.label(), "hk_skyscraper");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{"name": "x", "construction": {"builder": "example42"}, "bogus": 1}"#;
        assert!(ExperimentConfig::parse(text).is_err());
        let text = r#"{"name": "x", "construction": {"builder": "example42", "v": [1]}}"#;
        assert!(ExperimentConfig::parse(text).is_err());
        let text = r#"{"name": "x", "construction": {"builder": "example42"},
            "experiments": [{"kind": "order", "id": "o", "v": [1], "w": [1], "extra": true}]}"#;
        assert!(ExperimentConfig::parse(text).is_err());
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let text = r#"{"name": "x", "construction": {"builder": "example42"},
            "experiments": [{"kind": "order", "id": "o", "v": [1], "w": [1]},
                            {"kind": "order", "id": "o", "v": [1], "w": [2]}]}"#;
        assert!(ExperimentConfig::parse(text).is_err());
    }

    #[test]
    fn points_resolve() {
        let spec = rankone_core::builders::build_example42();
        let p: Points = serde_json::from_str(r#"{"heights": {"from": 0, "to": 2}}"#).unwrap();
        let got: Vec<u64> = p
            .resolve(&spec)
            .unwrap()
            .iter()
            .map(|x| x.try_into().unwrap())
            .collect();
        assert_eq!(got, vec![1, 16, 256]);
        let p: Points = serde_json::from_str(r#"{"range": {"from": 3, "to": 5}}"#).unwrap();
        assert_eq!(p.resolve(&spec).unwrap().len(), 3);
        let p: Points = serde_json::from_str(r#"{"values": [5, 2, 5]}"#).unwrap();
        assert_eq!(
            p.resolve(&spec).unwrap(),
            vec![BigUint::from(2u32), BigUint::from(5u32)]
        );
    }

    #[test]
    fn rationals_parse() {
        let r: Rational = serde_json::from_str(r#""1/4""#).unwrap();
        assert_eq!(r.0, BigRational::new(1.into(), 4.into()));
        assert!(serde_json::from_str::<Rational>(r#""0.25""#).is_err());
    }
}
