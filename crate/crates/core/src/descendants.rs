//! Descendant sets: the heights in a deeper column whose levels partition a
//! given level, kept in sumset form `base + O_n + ... + O_{N-1}`.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{invalid, Error, Result};
use crate::kernel::{self, Coord};
use crate::level::{Level, LevelSet};
use crate::spec::{ConstructionSpec, Limits, Tower};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescendantSet {
    pub source: Level,
    pub target_column: usize,
    pub base: BigUint,
    /// `O_m` for `m` in `source.column..target_column`.
    pub stage_offsets: Vec<Vec<BigUint>>,
}

impl DescendantSet {
    /// A bare sumset, detached from any construction.
    pub fn from_parts(base: BigUint, stage_offsets: Vec<Vec<BigUint>>) -> Self {
        DescendantSet {
            source: Level::new(0, base.clone()),
            target_column: stage_offsets.len(),
            base,
            stage_offsets,
        }
    }

    /// `prod_m |O_m|`.
    pub fn cardinality(&self) -> BigUint {
        self.stage_offsets.iter().map(|o| BigUint::from(o.len())).product()
    }

    pub fn max_element(&self) -> BigUint {
        let mut top = self.base.clone();
        for o in &self.stage_offsets {
            if let Some(last) = o.last() {
                top += last;
            }
        }
        top
    }

    /// Sorted heights of every descendant.
    pub fn materialize(&self, budget: u64) -> Result<Vec<BigUint>> {
        check_budget(&self.cardinality(), budget)?;
        if let Some(out) = self.materialize_as::<u128>() {
            return Ok(out.iter().map(Coord::to_big).collect());
        }
        Ok(self.materialize_as::<BigUint>().expect("BigUint always converts"))
    }

    fn materialize_as<T: Coord>(&self) -> Option<Vec<T>> {
        // every partial sum is bounded by the maximum element
        T::from_big(&self.max_element())?;
        let base = T::from_big(&self.base)?;
        let offs: Vec<Vec<T>> = self
            .stage_offsets
            .iter()
            .map(|o| kernel::convert(o))
            .collect::<Option<_>>()?;
        let mut out = kernel::sumset(vec![base], &offs);
        // Offsets that are not spaced a column height apart (only possible
        // for hand-built parts) still need a sort.
        if !out.windows(2).all(|w| w[0] < w[1]) {
            out.sort_unstable();
            out.dedup();
        }
        Some(out)
    }
}

pub(crate) fn check_budget(needed: &BigUint, budget: u64) -> Result<()> {
    if needed.to_u64().is_none_or(|n| n > budget) {
        return Err(Error::BudgetExceeded {
            needed: needed.clone(),
            budget,
        });
    }
    Ok(())
}

/// Materialize the sorted set of a descendant sumset.
pub fn materialize(d: &DescendantSet, budget: u64) -> Result<Vec<BigUint>> {
    d.materialize(budget)
}

impl Tower {
    pub fn descendants(&self, level: &Level, target: usize) -> Result<DescendantSet> {
        self.check_level(level)?;
        if target < level.column {
            return Err(invalid(format!(
                "target column {target} is above source column {}",
                level.column
            )));
        }
        self.check_column(target)?;
        Ok(DescendantSet {
            source: level.clone(),
            target_column: target,
            base: level.height.clone(),
            stage_offsets: (level.column..target).map(|m| self.offsets(m).to_vec()).collect(),
        })
    }

    /// The level set in `C_target` whose union equals `set`.
    pub fn push_to_column(&self, set: &LevelSet, target: usize, limits: &Limits) -> Result<LevelSet> {
        let heights = self.push_heights::<BigUint>(set, target, limits)?;
        Ok(LevelSet::from_sorted(target, heights))
    }

    /// Materialized heights of `set` pushed to `C_target`, in the coordinate
    /// type `T`. Callers choose `T` so that every height of `C_target` fits.
    pub(crate) fn push_heights<T: Coord>(&self, set: &LevelSet, target: usize, limits: &Limits) -> Result<Vec<T>> {
        self.check_set(set)?;
        if target < set.column() {
            return Err(invalid(format!(
                "target column {target} is above source column {}",
                set.column()
            )));
        }
        self.check_column(target)?;
        let needed = self.cut_product(set.column(), target) * BigUint::from(set.len());
        check_budget(&needed, limits.cardinality_budget)?;
        let bases = kernel::convert::<T>(set.heights()).ok_or_else(|| invalid("height does not fit"))?;
        let offs: Vec<Vec<T>> = (set.column()..target)
            .map(|m| kernel::convert(self.offsets(m)).ok_or_else(|| invalid("offset does not fit")))
            .collect::<Result<_>>()?;
        Ok(kernel::sumset(bases, &offs))
    }

    /// Whether every height of `C_target` plus `slack` fits in a `u128`.
    pub(crate) fn fits_u128(&self, target: usize, slack: &BigUint) -> bool {
        (self.height(target) + slack).bits() <= 127
    }
}

pub fn descendants(spec: &ConstructionSpec, level: &Level, target: usize) -> Result<DescendantSet> {
    spec.tower(target.max(level.column))?.descendants(level, target)
}

pub fn push_to_column(spec: &ConstructionSpec, set: &LevelSet, target: usize, limits: &Limits) -> Result<LevelSet> {
    spec.tower(target.max(set.column()))?
        .push_to_column(set, target, limits)
}

impl LevelSet {
    /// Every level of column `n`.
    pub fn whole_column(tower: &Tower, n: usize) -> Result<LevelSet> {
        tower.check_column(n)?;
        let h = tower
            .height(n)
            .to_u64()
            .ok_or_else(|| invalid("column too tall to enumerate"))?;
        Ok(LevelSet::from_sorted(n, (0..h).map(BigUint::from).collect()))
    }
}
