use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use super::vector::Vector;
use crate::error::{invalid, Error, Result};
use crate::level::LevelSet;
use crate::measure::MeasureBound;
use crate::spec::{ConstructionSpec, Limits, Tower};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesMode {
    /// `mu(A ∩ T^{v_1 n}A ∩ ... ∩ T^{v_d n}A)`
    Joint,
    /// `prod_i mu(A ∩ T^{v_i n}A)`
    Multiplicative,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesEntry {
    pub n: BigUint,
    pub shifts: Vec<BigUint>,
    /// Deepest column used for this entry.
    pub depth: usize,
    pub value: MeasureBound,
    /// Why the value is an interval, when it is one.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureSeries {
    pub mode: SeriesMode,
    pub entries: Vec<SeriesEntry>,
}

impl MeasureSeries {
    pub fn all_exact(&self) -> bool {
        self.entries.iter().all(|e| e.value.is_exact())
    }

    /// Smallest lower bound over the series.
    pub fn min_lower(&self) -> Option<&BigRational> {
        self.entries.iter().map(|e| &e.value.lower).min()
    }
}

/// A tower as deep as `limits` allows, and at least as deep as `set`.
pub(crate) fn tower_for(spec: &ConstructionSpec, set: &LevelSet, limits: &Limits) -> Result<Tower> {
    spec.tower(spec.depth_within(limits).max(set.column()))
}

fn check_increasing(ns: &[BigUint]) -> Result<()> {
    if ns.windows(2).all(|w| w[0] < w[1]) {
        Ok(())
    } else {
        Err(invalid("profile points must be strictly increasing"))
    }
}

/// Measure of `set` against `shifts` at the first resolving depth; budget
/// failures become the trivial enclosure `[0, mu(set)]`.
pub(crate) fn measure_at(
    tower: &Tower,
    set: &LevelSet,
    shifts: &[BigUint],
    limits: &Limits,
) -> Result<(MeasureBound, usize, Option<String>)> {
    let res = tower.resolve_depth(set, shifts)?;
    match tower.intersection_measure(set, shifts, res.depth, limits) {
        Ok(value) => {
            let note = (!res.resolved).then(|| format!("not resolved by column {}", res.depth));
            Ok((value, res.depth, note))
        }
        Err(Error::BudgetExceeded { needed, budget }) => Ok((
            MeasureBound {
                lower: BigRational::zero(),
                upper: tower.measure(set),
            },
            res.depth,
            Some(format!(
                "needs {needed} descendants at column {}, budget {budget}",
                res.depth
            )),
        )),
        Err(e) => Err(e),
    }
}

pub fn joint_profile_on(
    tower: &Tower,
    set: &LevelSet,
    v: &Vector,
    ns: &[BigUint],
    limits: &Limits,
) -> Result<MeasureSeries> {
    check_increasing(ns)?;
    let entries = ns
        .par_iter()
        .map(|n| {
            let shifts = v.shifts(n);
            let (value, depth, note) = measure_at(tower, set, &shifts, limits)?;
            Ok(SeriesEntry {
                n: n.clone(),
                shifts,
                depth,
                value,
                note,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasureSeries {
        mode: SeriesMode::Joint,
        entries,
    })
}

pub fn multiplicative_profile_on(
    tower: &Tower,
    set: &LevelSet,
    v: &Vector,
    ns: &[BigUint],
    limits: &Limits,
) -> Result<MeasureSeries> {
    check_increasing(ns)?;
    let entries = ns
        .par_iter()
        .map(|n| {
            let shifts = v.shifts(n);
            let mut value = MeasureBound::exact(BigRational::from_integer(1.into()));
            let mut depth = set.column();
            let mut notes = Vec::new();
            for k in &shifts {
                let (factor, d, note) = measure_at(tower, set, std::slice::from_ref(k), limits)?;
                value = value.mul(&factor);
                depth = depth.max(d);
                notes.extend(note.map(|s| format!("shift {k}: {s}")));
            }
            Ok(SeriesEntry {
                n: n.clone(),
                shifts,
                depth,
                value,
                note: (!notes.is_empty()).then(|| notes.join("; ")),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasureSeries {
        mode: SeriesMode::Multiplicative,
        entries,
    })
}

/// `mu(A ∩ T^{v_1 n}A ∩ ... ∩ T^{v_d n}A)` for every `n` in `ns`, each at
/// its first fully resolved depth.
pub fn joint_profile(
    spec: &ConstructionSpec,
    set: &LevelSet,
    v: &Vector,
    ns: &[BigUint],
    limits: &Limits,
) -> Result<MeasureSeries> {
    joint_profile_on(&tower_for(spec, set, limits)?, set, v, ns, limits)
}

/// `prod_i mu(A ∩ T^{v_i n}A)` for every `n` in `ns`.
pub fn multiplicative_profile(
    spec: &ConstructionSpec,
    set: &LevelSet,
    v: &Vector,
    ns: &[BigUint],
    limits: &Limits,
) -> Result<MeasureSeries> {
    multiplicative_profile_on(&tower_for(spec, set, limits)?, set, v, ns, limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{Stage, StageRule};

    #[derive(Debug)]
    struct Scaled(Vec<u64>);
    impl StageRule for Scaled {
        fn stage(&self, n: usize, heights: &[BigUint]) -> Result<Stage> {
            Stage::new(self.0.len(), self.0.iter().map(|&c| &heights[n] * c).collect())
        }
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn sixteen() -> ConstructionSpec {
        ConstructionSpec::from_rule(Scaled(vec![0, 3, 1, 8]))
    }

    #[test]
    fn zero_point_is_the_measure() {
        let v = Vector::new(vec![1, 2]).unwrap();
        let a = LevelSet::from_u64(1, &[0, 3]);
        let s = joint_profile(&sixteen(), &a, &v, &[BigUint::zero()], &Limits::default()).unwrap();
        assert_eq!(s.entries[0].value, MeasureBound::exact(q(1, 2)));
        let s = multiplicative_profile(&sixteen(), &a, &v, &[BigUint::zero()], &Limits::default()).unwrap();
        assert_eq!(s.entries[0].value, MeasureBound::exact(q(1, 4)));
    }

    #[test]
    fn sixteen_fold_joint_vanishes_multiplicative_does_not() {
        let v = Vector::new(vec![1, 2]).unwrap();
        let t = sixteen().tower(6).unwrap();
        let ns: Vec<BigUint> = (0..=4).map(|n| t.height(n).clone()).collect();
        let l = Limits::default();
        let joint = joint_profile(&sixteen(), &LevelSet::base(), &v, &ns, &l).unwrap();
        let mult = multiplicative_profile(&sixteen(), &LevelSet::base(), &v, &ns, &l).unwrap();
        for (j, m) in joint.entries.iter().zip(&mult.entries) {
            assert_eq!(j.value, MeasureBound::zero(), "n = {}", j.n);
            assert!(m.value.is_exact());
            assert!(m.value.lower >= q(1, 16), "n = {}", m.n);
        }
    }

    #[test]
    fn budget_failure_degrades_to_trivial_interval() {
        let v = Vector::new(vec![1, 2]).unwrap();
        let tiny = Limits {
            cardinality_budget: 2,
            ..Limits::default()
        };
        let s = joint_profile(&sixteen(), &LevelSet::base(), &v, &[BigUint::from(16u32)], &tiny).unwrap();
        assert_eq!(s.entries[0].value.lower, q(0, 1));
        assert_eq!(s.entries[0].value.upper, q(1, 1));
        assert!(s.entries[0].note.is_some());
    }

    #[test]
    fn points_must_increase() {
        let v = Vector::new(vec![1]).unwrap();
        let ns = [BigUint::from(2u32), BigUint::from(1u32)];
        assert!(joint_profile(&sixteen(), &LevelSet::base(), &v, &ns, &Limits::default()).is_err());
    }
}
