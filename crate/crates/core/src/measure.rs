//! Exact intersection measures `mu(A ∩ T^{k_1}A ∩ ...)` computed on a
//! column, with a rigorous interval when the column is not yet tall enough.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::Zero;

use crate::descendants::check_budget;
use crate::error::{invalid, Error, Result};
use crate::kernel::{self, Coord};
use crate::level::LevelSet;
use crate::spec::{ConstructionSpec, Limits, Tower};

/// An exact rational enclosure `[lower, upper]` of a measure.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MeasureBound {
    pub lower: BigRational,
    pub upper: BigRational,
}

impl MeasureBound {
    pub fn exact(value: BigRational) -> Self {
        MeasureBound {
            lower: value.clone(),
            upper: value,
        }
    }

    pub fn new(lower: BigRational, upper: BigRational) -> Result<Self> {
        if lower < BigRational::zero() || lower > upper {
            return Err(invalid(format!("invalid enclosure [{lower}, {upper}]")));
        }
        Ok(MeasureBound { lower, upper })
    }

    pub fn zero() -> Self {
        MeasureBound::exact(BigRational::zero())
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    /// The value when fully resolved.
    pub fn value(&self) -> Option<&BigRational> {
        self.is_exact().then_some(&self.lower)
    }

    /// Product of two non-negative enclosures.
    pub fn mul(&self, other: &MeasureBound) -> MeasureBound {
        MeasureBound {
            lower: &self.lower * &other.lower,
            upper: &self.upper * &other.upper,
        }
    }
}

impl fmt::Display for MeasureBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.lower)
        } else {
            write!(f, "[{}, {}]", self.lower, self.upper)
        }
    }
}

/// Outcome of a depth search: the column used and whether every descendant
/// was resolved there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolution {
    pub depth: usize,
    pub resolved: bool,
}

pub(crate) fn nonneg_shifts(shifts: &[BigInt]) -> Result<Vec<BigUint>> {
    if shifts.is_empty() {
        return Err(invalid("at least one shift is required"));
    }
    shifts
        .iter()
        .map(|k| match k.sign() {
            Sign::Minus => Err(invalid(format!("negative shift {k}; normalize the vector first"))),
            _ => Ok(k.magnitude().clone()),
        })
        .collect()
}

impl Tower {
    /// Smallest column at or below `self.depth()` where `x + max(shifts)`
    /// stays inside the column for every descendant `x` of `set`.
    pub fn resolve_depth(&self, set: &LevelSet, shifts: &[BigUint]) -> Result<Resolution> {
        self.check_set(set)?;
        let max_shift = shifts
            .iter()
            .max()
            .ok_or_else(|| invalid("at least one shift is required"))?;
        let Some(top) = set.heights().last() else {
            // nothing to resolve
            return Ok(Resolution {
                depth: set.column(),
                resolved: true,
            });
        };
        let mut reach = top + max_shift;
        for n in set.column()..=self.depth() {
            if reach < *self.height(n) {
                return Ok(Resolution {
                    depth: n,
                    resolved: true,
                });
            }
            if n < self.depth() {
                reach += self.offsets(n).last().expect("at least two offsets");
            }
        }
        Ok(Resolution {
            depth: self.depth(),
            resolved: false,
        })
    }

    /// Enclosure of `mu(set ∩ T^{-k_1} set ∩ ...)`, the measure of points of
    /// `set` whose `k`-th iterate is back in `set` for every shift `k`,
    /// computed on column `target`.
    ///
    /// Descendants `x` with `x + max(shifts) <= h_target - 1` are resolved and
    /// counted exactly; the rest contribute `[0, their measure]`.
    pub fn intersection_measure(
        &self,
        set: &LevelSet,
        shifts: &[BigUint],
        target: usize,
        limits: &Limits,
    ) -> Result<MeasureBound> {
        self.check_set(set)?;
        if shifts.is_empty() {
            return Err(invalid("at least one shift is required"));
        }
        if target < set.column() {
            return Err(invalid(format!(
                "target column {target} is above source column {}",
                set.column()
            )));
        }
        self.check_column(target)?;
        let width = self.width(target).clone();
        let needed = self.cut_product(set.column(), target) * BigUint::from(set.len());
        if check_budget(&needed, limits.cardinality_budget).is_ok() {
            let max_shift = shifts.iter().max().unwrap();
            let (hits, unresolved) = if self.fits_u128(target, max_shift) {
                self.count_on::<u128>(set, shifts, target, limits)?
            } else {
                self.count_on::<BigUint>(set, shifts, target, limits)?
            };
            let lower = &width * BigRational::from_integer(hits.into());
            let upper = &width * BigRational::from_integer((hits + unresolved).into());
            return Ok(MeasureBound { lower, upper });
        }
        self.factored_measure(set, shifts, target, &needed, limits)
    }

    fn count_on<T: Coord>(
        &self,
        set: &LevelSet,
        shifts: &[BigUint],
        target: usize,
        limits: &Limits,
    ) -> Result<(u64, u64)> {
        let d = self.push_heights::<T>(set, target, limits)?;
        let shifts: Vec<T> = kernel::convert(shifts).expect("caller checked the coordinate range");
        let top = T::from_big(&(self.height(target) - 1u32)).expect("caller checked the coordinate range");
        Ok(kernel::count_joint(&d, &shifts, &top))
    }

    /// Pairwise count without materializing, for a single non-zero shift
    /// when every descendant is resolved.
    fn factored_measure(
        &self,
        set: &LevelSet,
        shifts: &[BigUint],
        target: usize,
        needed: &BigUint,
        limits: &Limits,
    ) -> Result<MeasureBound> {
        let over_budget = || Error::BudgetExceeded {
            needed: needed.clone(),
            budget: limits.cardinality_budget,
        };
        let mut nonzero: Vec<&BigUint> = shifts.iter().filter(|k| !k.is_zero()).collect();
        nonzero.sort();
        nonzero.dedup();
        let width = self.width(target).clone();
        match nonzero.as_slice() {
            [] => Ok(MeasureBound::exact(self.measure(set))),
            [k] => {
                let top = set.heights().last().expect("non-empty: budget exceeded");
                if self.max_descendant(top, set.column(), target) + *k >= *self.height(target) {
                    return Err(over_budget());
                }
                let offs: Vec<Vec<BigUint>> = (set.column()..target).map(|m| self.offsets(m).to_vec()).collect();
                let count = kernel::count_pairs_factored(set.heights(), &offs, k);
                Ok(MeasureBound::exact(width * BigRational::from_integer(count.into())))
            }
            _ => Err(over_budget()),
        }
    }

    /// Measure at the first fully resolved depth, or the interval at the
    /// deepest available column when no depth resolves.
    pub fn resolved_measure(
        &self,
        set: &LevelSet,
        shifts: &[BigUint],
        limits: &Limits,
    ) -> Result<(MeasureBound, Resolution)> {
        let res = self.resolve_depth(set, shifts)?;
        let value = self.intersection_measure(set, shifts, res.depth, limits)?;
        Ok((value, res))
    }
}

pub fn intersection_measure(
    spec: &ConstructionSpec,
    set: &LevelSet,
    shifts: &[BigInt],
    target: usize,
    limits: &Limits,
) -> Result<MeasureBound> {
    let shifts = nonneg_shifts(shifts)?;
    spec.tower(target.max(set.column()))?
        .intersection_measure(set, &shifts, target, limits)
}

/// Smallest depth (up to the depth cap) at which the intersection measure
/// is fully resolved; when the cap is hit, returns it with `resolved: false`.
pub fn resolve_depth(
    spec: &ConstructionSpec,
    set: &LevelSet,
    shifts: &[BigInt],
    limits: &Limits,
) -> Result<Resolution> {
    let shifts = nonneg_shifts(shifts)?;
    let depth = spec.depth_within(limits).max(set.column());
    spec.tower(depth)?.resolve_depth(set, &shifts)
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

    fn hk() -> ConstructionSpec {
        ConstructionSpec::from_rule(Scaled(vec![0, 2]))
    }
    fn sixteen() -> ConstructionSpec {
        ConstructionSpec::from_rule(Scaled(vec![0, 3, 1, 8]))
    }
    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }
    fn ks(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn skyscraper_unit_shift() {
        let m = intersection_measure(&hk(), &LevelSet::base(), &ks(&[1]), 2, &Limits::default()).unwrap();
        assert_eq!(m, MeasureBound::exact(q(1, 2)));
    }

    #[test]
    fn zero_shift_is_the_measure() {
        let a = LevelSet::from_u64(2, &[0, 3, 7]);
        let m = intersection_measure(&sixteen(), &a, &ks(&[0]), 3, &Limits::default()).unwrap();
        // three levels of width 1/16
        assert_eq!(m, MeasureBound::exact(q(3, 16)));
    }

    #[test]
    fn sixteen_fold_shift_sixteen() {
        let m = intersection_measure(&sixteen(), &LevelSet::base(), &ks(&[16]), 3, &Limits::default()).unwrap();
        assert_eq!(m, MeasureBound::exact(q(1, 4)));
    }

    #[test]
    fn sixteen_fold_double_shifts_vanish_up_to_256() {
        let spec = sixteen();
        let t = spec.tower(5).unwrap();
        for m in 1..=256u64 {
            let shifts = [BigUint::from(m), BigUint::from(2 * m)];
            let v = t
                .intersection_measure(&LevelSet::base(), &shifts, 5, &Limits::default())
                .unwrap();
            assert_eq!(v, MeasureBound::zero(), "m = {m}");
        }
    }

    #[test]
    fn unresolved_descendants_widen_the_interval() {
        // C_1 of the skyscraper: D = {0, 1}, h_1 = 4; shift 3 leaves 1 unresolved.
        let m = intersection_measure(&hk(), &LevelSet::base(), &ks(&[3]), 1, &Limits::default()).unwrap();
        assert_eq!(m.lower, q(0, 1));
        assert_eq!(m.upper, q(1, 2));
        assert!(!m.is_exact());
    }

    #[test]
    fn resolve_depths() {
        let l = Limits::default();
        let r = resolve_depth(&hk(), &LevelSet::base(), &ks(&[1]), &l).unwrap();
        assert_eq!(
            r,
            Resolution {
                depth: 1,
                resolved: true
            }
        );
        let r = resolve_depth(&hk(), &LevelSet::base(), &ks(&[0]), &l).unwrap();
        assert_eq!(
            r,
            Resolution {
                depth: 0,
                resolved: true
            }
        );
        let r = resolve_depth(&sixteen(), &LevelSet::base(), &ks(&[4096, 8192]), &l).unwrap();
        assert_eq!(
            r,
            Resolution {
                depth: 4,
                resolved: true
            }
        );
    }

    #[test]
    fn odometer_never_resolves() {
        let odo = ConstructionSpec::from_rule(Scaled(vec![0, 0]));
        let l = Limits {
            depth_cap: 10,
            ..Limits::default()
        };
        let r = resolve_depth(&odo, &LevelSet::base(), &ks(&[1]), &l).unwrap();
        assert_eq!(
            r,
            Resolution {
                depth: 10,
                resolved: false
            }
        );
        let m = intersection_measure(&odo, &LevelSet::base(), &ks(&[1]), 10, &l).unwrap();
        // only the top level of the column is unresolved
        assert_eq!(m.lower, q(1023, 1024));
        assert_eq!(m.upper, q(1, 1));
    }

    #[test]
    fn negative_shift_is_rejected() {
        let e = intersection_measure(&hk(), &LevelSet::base(), &ks(&[-1]), 2, &Limits::default());
        assert!(matches!(e, Err(Error::InvalidArgument(_))));
        let e = intersection_measure(&hk(), &LevelSet::base(), &[], 2, &Limits::default());
        assert!(matches!(e, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn factored_path_matches_materialized() {
        let spec = sixteen();
        let t = spec.tower(6).unwrap();
        let small = Limits {
            cardinality_budget: 8,
            ..Limits::default()
        };
        let a = LevelSet::from_u64(1, &[0, 5, 6]);
        for k in [16u64, 32, 80, 96, 256, 1280, 1296] {
            let shifts = [BigUint::from(k)];
            let big = t.intersection_measure(&a, &shifts, 6, &Limits::default()).unwrap();
            let fac = t.intersection_measure(&a, &shifts, 6, &small).unwrap();
            assert_eq!(big, fac, "k = {k}");
        }
        // two distinct non-zero shifts cannot be factored
        let two = [BigUint::from(16u32), BigUint::from(32u32)];
        assert!(matches!(
            t.intersection_measure(&a, &two, 6, &small),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
