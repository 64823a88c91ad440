//! Construction recipes and their materialized prefixes.
//!
//! A [`ConstructionSpec`] is the cutting-and-stacking recipe: for every stage
//! `n` it names the cut count `r_n` and the spacer counts placed above each
//! subcolumn before the copies are stacked left under right. A [`Tower`] is
//! the finite prefix of columns `C_0..=C_N` realized from a recipe, with
//! heights, level widths and the base offsets of the copies of `C_n` inside
//! `C_{n+1}` precomputed.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{invalid, Error, Result};
use crate::level::{Level, LevelSet};

/// Default cap on how many elements a descendant set may materialize.
pub const DEFAULT_CARDINALITY_BUDGET: u64 = 1 << 20;
/// Default cap on the deepest column any search will look at.
pub const DEFAULT_DEPTH_CAP: usize = 48;

/// Resource limits shared by every operation that materializes or deepens.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub cardinality_budget: u64,
    pub depth_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            cardinality_budget: DEFAULT_CARDINALITY_BUDGET,
            depth_cap: DEFAULT_DEPTH_CAP,
        }
    }
}

/// One cutting-and-stacking step: cut into `cuts` subcolumns, put
/// `spacers[i]` new levels above subcolumn `i`, stack left under right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    cuts: usize,
    spacers: Vec<BigUint>,
}

impl Stage {
    pub fn new(cuts: usize, spacers: Vec<BigUint>) -> Result<Self> {
        if cuts < 2 {
            return Err(invalid(format!("cut count must be at least 2, got {cuts}")));
        }
        if spacers.len() != cuts {
            return Err(invalid(format!("expected {cuts} spacer counts, got {}", spacers.len())));
        }
        Ok(Stage { cuts, spacers })
    }

    /// Convenience constructor for small spacer counts.
    pub fn from_u64(spacers: &[u64]) -> Result<Self> {
        Stage::new(spacers.len(), spacers.iter().map(|&s| BigUint::from(s)).collect())
    }

    pub fn cuts(&self) -> usize {
        self.cuts
    }

    pub fn spacers(&self) -> &[BigUint] {
        &self.spacers
    }

    /// Base heights of the `cuts` copies of a column of height `height`
    /// inside the next column: `o_i = i*h + sum_{j<i} s_j`.
    pub fn offsets(&self, height: &BigUint) -> Vec<BigUint> {
        let mut out = Vec::with_capacity(self.cuts);
        let mut cur = BigUint::zero();
        for s in &self.spacers {
            out.push(cur.clone());
            cur += height;
            cur += s;
        }
        out
    }

    /// `r*h + sum(s)`.
    pub fn next_height(&self, height: &BigUint) -> BigUint {
        let spacer_total: BigUint = self.spacers.iter().sum();
        height * BigUint::from(self.cuts) + spacer_total
    }
}

/// A deterministic generator for stage records.
///
/// `heights` holds `h_0..=h_n`, so rules whose spacer counts scale with the
/// current height (or with all earlier heights) can be expressed directly.
/// Asking for the same stage twice must return the same record.
pub trait StageRule: Send + Sync + fmt::Debug {
    fn stage(&self, n: usize, heights: &[BigUint]) -> Result<Stage>;
}

#[derive(Clone, Debug)]
enum StageSource {
    Explicit(Arc<[Stage]>),
    Rule(Arc<dyn StageRule>),
}

/// The full recipe of a rank-one construction, finitely materialized on demand.
#[derive(Clone, Debug)]
pub struct ConstructionSpec {
    source: StageSource,
    initial_width: BigRational,
    name: String,
    metadata: BTreeMap<String, String>,
}

impl ConstructionSpec {
    /// A construction given by a finite list of stages.
    pub fn explicit(stages: Vec<Stage>) -> Result<Self> {
        for (n, st) in stages.iter().enumerate() {
            check_stage(n, st)?;
        }
        Ok(ConstructionSpec {
            source: StageSource::Explicit(stages.into()),
            initial_width: BigRational::one(),
            name: "explicit".into(),
            metadata: BTreeMap::new(),
        })
    }

    pub fn from_rule(rule: impl StageRule + 'static) -> Self {
        ConstructionSpec {
            source: StageSource::Rule(Arc::new(rule)),
            initial_width: BigRational::one(),
            name: "rule".into(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_initial_width(mut self, width: BigRational) -> Result<Self> {
        if width <= BigRational::zero() {
            return Err(invalid("initial width must be positive"));
        }
        self.initial_width = width;
        Ok(self)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn initial_width(&self) -> &BigRational {
        &self.initial_width
    }

    /// Number of stages available, or `None` when the recipe is unbounded.
    pub fn stage_limit(&self) -> Option<usize> {
        match &self.source {
            StageSource::Explicit(s) => Some(s.len()),
            StageSource::Rule(_) => None,
        }
    }

    /// Stage records `0..count`.
    pub fn stages(&self, count: usize) -> Result<Vec<Stage>> {
        Ok(self.tower(count)?.stages)
    }

    /// Realize columns `C_0..=C_depth`.
    pub fn tower(&self, depth: usize) -> Result<Tower> {
        let mut stages = Vec::with_capacity(depth);
        let mut heights = vec![BigUint::one()];
        let mut widths = vec![self.initial_width.clone()];
        let mut offsets = Vec::with_capacity(depth);
        for n in 0..depth {
            let stage = match &self.source {
                StageSource::Explicit(list) => list.get(n).cloned().ok_or_else(|| Error::SpecIncomplete {
                    stage: n,
                    reason: format!("explicit construction has only {} stages", list.len()),
                })?,
                StageSource::Rule(rule) => rule.stage(n, &heights).map_err(|e| match e {
                    Error::SpecIncomplete { .. } | Error::InvalidStage { .. } => e,
                    other => Error::SpecIncomplete {
                        stage: n,
                        reason: other.to_string(),
                    },
                })?,
            };
            check_stage(n, &stage)?;
            let h = &heights[n];
            offsets.push(stage.offsets(h));
            heights.push(stage.next_height(h));
            widths.push(&widths[n] / BigRational::from_integer(stage.cuts.into()));
            stages.push(stage);
        }
        Ok(Tower {
            initial_width: self.initial_width.clone(),
            stages,
            heights,
            widths,
            offsets,
        })
    }

    /// A tower as deep as the limits and the recipe allow.
    pub fn tower_within(&self, limits: &Limits) -> Result<Tower> {
        self.tower(self.depth_within(limits))
    }

    pub(crate) fn depth_within(&self, limits: &Limits) -> usize {
        match self.stage_limit() {
            Some(n) => n.min(limits.depth_cap),
            None => limits.depth_cap,
        }
    }
}

fn check_stage(n: usize, st: &Stage) -> Result<()> {
    if st.cuts < 2 {
        return Err(Error::InvalidStage {
            stage: n,
            reason: format!("cut count {} < 2", st.cuts),
        });
    }
    if st.spacers.len() != st.cuts {
        return Err(Error::InvalidStage {
            stage: n,
            reason: format!("{} spacer counts for {} cuts", st.spacers.len(), st.cuts),
        });
    }
    Ok(())
}

/// Height, level width and total measure of one column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnStats {
    pub n: usize,
    pub height: BigUint,
    pub level_width: BigRational,
    pub total_measure: BigRational,
}

/// Columns `C_0..=C_depth` of a construction.
#[derive(Debug, Clone)]
pub struct Tower {
    initial_width: BigRational,
    stages: Vec<Stage>,
    heights: Vec<BigUint>,
    widths: Vec<BigRational>,
    offsets: Vec<Vec<BigUint>>,
}

impl Tower {
    /// Index of the deepest realized column.
    pub fn depth(&self) -> usize {
        self.stages.len()
    }

    pub fn initial_width(&self) -> &BigRational {
        &self.initial_width
    }

    pub fn stage(&self, m: usize) -> &Stage {
        &self.stages[m]
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn height(&self, n: usize) -> &BigUint {
        &self.heights[n]
    }

    pub fn heights(&self) -> &[BigUint] {
        &self.heights
    }

    pub fn width(&self, n: usize) -> &BigRational {
        &self.widths[n]
    }

    /// Base offsets of the copies of `C_m` inside `C_{m+1}`.
    pub fn offsets(&self, m: usize) -> &[BigUint] {
        &self.offsets[m]
    }

    pub(crate) fn check_column(&self, n: usize) -> Result<()> {
        if n > self.depth() {
            return Err(Error::SpecIncomplete {
                stage: n.saturating_sub(1),
                reason: format!("column {n} requested but only {} realized", self.depth()),
            });
        }
        Ok(())
    }

    pub fn column_stats(&self, n: usize) -> Result<ColumnStats> {
        self.check_column(n)?;
        let height = self.heights[n].clone();
        let level_width = self.widths[n].clone();
        let total_measure = &level_width * BigRational::from_integer(height.clone().into());
        Ok(ColumnStats {
            n,
            height,
            level_width,
            total_measure,
        })
    }

    pub(crate) fn check_level(&self, level: &Level) -> Result<()> {
        self.check_column(level.column)?;
        if level.height >= self.heights[level.column] {
            return Err(invalid(format!(
                "height {} outside column {} of height {}",
                level.height, level.column, self.heights[level.column]
            )));
        }
        Ok(())
    }

    pub(crate) fn check_set(&self, set: &LevelSet) -> Result<()> {
        self.check_column(set.column())?;
        if let Some(top) = set.heights().last() {
            if top >= &self.heights[set.column()] {
                return Err(invalid(format!(
                    "height {top} outside column {} of height {}",
                    set.column(),
                    self.heights[set.column()]
                )));
            }
        }
        Ok(())
    }

    /// Measure of a level set: number of levels times the level width.
    pub fn measure(&self, set: &LevelSet) -> BigRational {
        &self.widths[set.column()] * BigRational::from_integer(set.len().into())
    }

    /// `prod_{m in from..to} r_m`.
    pub fn cut_product(&self, from: usize, to: usize) -> BigUint {
        self.stages[from..to].iter().map(|s| BigUint::from(s.cuts)).product()
    }

    /// Largest descendant height in `C_to` of a level at `height` in `C_from`.
    pub(crate) fn max_descendant(&self, height: &BigUint, from: usize, to: usize) -> BigUint {
        let mut top = height.clone();
        for m in from..to {
            top += self.offsets[m].last().expect("stage has at least two offsets");
        }
        top
    }
}

/// Statistics of column `n`.
pub fn column_stats(spec: &ConstructionSpec, n: usize) -> Result<ColumnStats> {
    spec.tower(n)?.column_stats(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn skyscraper() -> ConstructionSpec {
        #[derive(Debug)]
        struct Hk;
        impl StageRule for Hk {
            fn stage(&self, n: usize, heights: &[BigUint]) -> Result<Stage> {
                Stage::new(2, vec![BigUint::zero(), &heights[n] * 2u32])
            }
        }
        ConstructionSpec::from_rule(Hk)
    }

    #[test]
    fn first_columns_of_skyscraper() {
        let s = column_stats(&skyscraper(), 1).unwrap();
        assert_eq!(s.height, BigUint::from(4u32));
        assert_eq!(s.level_width, BigRational::new(1.into(), 2.into()));
        assert_eq!(s.total_measure, BigRational::from_integer(2.into()));
    }

    #[test]
    fn column_zero_is_one_unit_level() {
        let s = column_stats(&skyscraper(), 0).unwrap();
        assert_eq!(s.height, BigUint::one());
        assert_eq!(s.level_width, BigRational::one());
        assert_eq!(s.total_measure, BigRational::one());
    }

    #[test]
    fn sixteen_fold_growth() {
        let st = Stage::from_u64(&[0, 3, 1, 8]).unwrap();
        assert_eq!(st.offsets(&BigUint::one()), [0u32, 1, 5, 7].map(BigUint::from).to_vec());
        // spacer counts here are fixed, not scaled; h_1 = 4 + 12.
        assert_eq!(st.next_height(&BigUint::one()), BigUint::from(16u32));
    }

    #[test]
    fn stage_validation() {
        assert!(Stage::from_u64(&[0]).is_err());
        assert!(Stage::new(3, vec![BigUint::zero(); 2]).is_err());
    }

    #[test]
    fn explicit_list_runs_out() {
        let spec = ConstructionSpec::explicit(vec![Stage::from_u64(&[0, 1]).unwrap()]).unwrap();
        assert!(spec.tower(1).is_ok());
        assert!(matches!(spec.tower(2), Err(Error::SpecIncomplete { stage: 1, .. })));
    }

    #[test]
    fn rule_failures_surface_as_incomplete() {
        #[derive(Debug)]
        struct Broken;
        impl StageRule for Broken {
            fn stage(&self, n: usize, _: &[BigUint]) -> Result<Stage> {
                if n < 2 {
                    Stage::from_u64(&[0, 0])
                } else {
                    Err(invalid("no more"))
                }
            }
        }
        let spec = ConstructionSpec::from_rule(Broken);
        assert!(matches!(spec.tower(3), Err(Error::SpecIncomplete { stage: 2, .. })));
    }
}
