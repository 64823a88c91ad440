//! Brute-force cross-check: the column map as an explicit translation of
//! real intervals, with exact interval arithmetic.
//!
//! Shares only the stage records with the rest of the crate. Columns are
//! built by literally cutting intervals and stacking them with fresh spacer
//! intervals; a level set is located in the deep column by interval
//! containment, and iterates are taken by composing piecewise translations.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::level::LevelSet;
use crate::measure::MeasureBound;
use crate::spec::ConstructionSpec;

/// Default cap on the number of levels the oracle realizes.
pub const DEFAULT_ORACLE_LEVELS: u64 = 1 << 16;

type Q = BigRational;

/// A finite union of disjoint half-open intervals, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntervalSet {
    parts: Vec<(Q, Q)>,
}

impl IntervalSet {
    pub fn new(mut parts: Vec<(Q, Q)>) -> Self {
        parts.retain(|(a, b)| a < b);
        parts.sort();
        let mut merged: Vec<(Q, Q)> = Vec::with_capacity(parts.len());
        for (a, b) in parts {
            match merged.last_mut() {
                Some(last) if a <= last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => merged.push((a, b)),
            }
        }
        IntervalSet { parts: merged }
    }

    pub fn interval(a: Q, b: Q) -> Self {
        IntervalSet::new(vec![(a, b)])
    }

    pub fn parts(&self) -> &[(Q, Q)] {
        &self.parts
    }

    pub fn measure(&self) -> Q {
        self.parts.iter().map(|(a, b)| b - a).sum()
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.parts.len() && j < other.parts.len() {
            let (a1, b1) = &self.parts[i];
            let (a2, b2) = &other.parts[j];
            let lo = a1.max(a2);
            let hi = b1.min(b2);
            if lo < hi {
                out.push((lo.clone(), hi.clone()));
            }
            if b1 < b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet { parts: out }
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for (a, b) in &self.parts {
            let mut cur = a.clone();
            for (c, d) in &other.parts {
                if d <= &cur || c >= b {
                    continue;
                }
                if c > &cur {
                    out.push((cur.clone(), c.clone()));
                }
                if d > &cur {
                    cur = d.clone();
                }
            }
            if &cur < b {
                out.push((cur, b.clone()));
            }
        }
        IntervalSet::new(out)
    }

    pub fn translate(&self, by: &Q) -> IntervalSet {
        IntervalSet {
            parts: self.parts.iter().map(|(a, b)| (a + by, b + by)).collect(),
        }
    }
}

/// One piece of a piecewise translation: `x -> x + shift` on `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub start: Q,
    pub end: Q,
    pub shift: Q,
}

/// A piecewise translation on the height-major layout of column `N`, where
/// level `i` occupies `[i w_N, (i + 1) w_N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalMap {
    pub column: usize,
    pub pieces: Vec<Piece>,
}

impl IntervalMap {
    fn identity(column: usize, space: &Q) -> Self {
        IntervalMap {
            column,
            pieces: vec![Piece {
                start: Q::zero(),
                end: space.clone(),
                shift: Q::zero(),
            }],
        }
    }

    pub fn domain(&self) -> IntervalSet {
        IntervalSet::new(self.pieces.iter().map(|p| (p.start.clone(), p.end.clone())).collect())
    }

    /// Points mapped into `set`.
    pub fn preimage(&self, set: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for p in &self.pieces {
            let back = set.translate(&-&p.shift);
            let dom = IntervalSet::interval(p.start.clone(), p.end.clone());
            out.extend(back.intersect(&dom).parts);
        }
        IntervalSet::new(out)
    }

    /// `other` after `self`.
    pub fn then(&self, other: &IntervalMap) -> IntervalMap {
        let mut pieces = Vec::new();
        for p in &self.pieces {
            for q in &other.pieces {
                let lo = (&q.start - &p.shift).max(p.start.clone());
                let hi = (&q.end - &p.shift).min(p.end.clone());
                if lo < hi {
                    pieces.push(Piece {
                        start: lo,
                        end: hi,
                        shift: &p.shift + &q.shift,
                    });
                }
            }
        }
        pieces.sort_by(|a, b| a.start.cmp(&b.start));
        IntervalMap {
            column: self.column,
            pieces,
        }
    }

    pub fn inverse(&self) -> IntervalMap {
        let mut pieces: Vec<Piece> = self
            .pieces
            .iter()
            .map(|p| Piece {
                start: &p.start + &p.shift,
                end: &p.end + &p.shift,
                shift: -&p.shift,
            })
            .collect();
        pieces.sort_by(|a, b| a.start.cmp(&b.start));
        IntervalMap {
            column: self.column,
            pieces,
        }
    }

    /// `self^k` by repeated squaring; `space` is the whole layout.
    pub fn power(&self, k: &BigInt, space: &Q) -> IntervalMap {
        let base = if k.is_negative() { self.inverse() } else { self.clone() };
        let mut e = k.magnitude().clone();
        let mut acc = IntervalMap::identity(self.column, space);
        let mut sq = base;
        while !e.is_zero() {
            if e.bit(0) {
                acc = acc.then(&sq);
            }
            e >>= 1u32;
            if !e.is_zero() {
                sq = sq.then(&sq);
            }
        }
        acc
    }
}

/// Column `N` built by cutting real intervals: each level is `[start, start + w_N)`.
#[derive(Debug, Clone)]
struct GeometricColumn {
    starts: Vec<Q>,
    width: Q,
    /// Real intervals of every column's levels, for locating level sets.
    history: Vec<(Vec<Q>, Q)>,
}

fn build_column(spec: &ConstructionSpec, n: usize, level_budget: u64) -> Result<GeometricColumn> {
    let stages = spec.stages(n)?;
    let mut width = spec.initial_width().clone();
    let mut starts = vec![Q::zero()];
    // spacers come from fresh space to the right of everything used so far
    let mut fresh = width.clone();
    let mut history = vec![(starts.clone(), width.clone())];
    for st in &stages {
        let r = st.cuts();
        let sub = &width / Q::from_integer(r.into());
        let mut next = Vec::new();
        for (i, s) in st.spacers().iter().enumerate() {
            let offset = &sub * Q::from_integer(i.into());
            next.extend(starts.iter().map(|x| x + &offset));
            let count = s
                .to_u64()
                .filter(|&c| c <= level_budget)
                .ok_or_else(|| Error::BudgetExceeded {
                    needed: s.clone(),
                    budget: level_budget,
                })?;
            for _ in 0..count {
                next.push(fresh.clone());
                fresh += &sub;
            }
            if next.len() as u64 > level_budget {
                return Err(Error::BudgetExceeded {
                    needed: BigUint::from(next.len()),
                    budget: level_budget,
                });
            }
        }
        starts = next;
        width = sub;
        history.push((starts.clone(), width.clone()));
    }
    Ok(GeometricColumn { starts, width, history })
}

/// The column map of `C_N` on the height-major layout: one translation by
/// `w_N` on `[0, (h_N - 1) w_N)`.
pub fn realize(spec: &ConstructionSpec, n: usize, level_budget: u64) -> Result<IntervalMap> {
    let col = build_column(spec, n, level_budget)?;
    Ok(column_map(n, &col))
}

fn column_map(n: usize, col: &GeometricColumn) -> IntervalMap {
    let top = Q::from_integer((col.starts.len() - 1).into()) * &col.width;
    let pieces = if top.is_zero() {
        Vec::new()
    } else {
        vec![Piece {
            start: Q::zero(),
            end: top,
            shift: col.width.clone(),
        }]
    };
    IntervalMap { column: n, pieces }
}

/// A realized column, reusable across queries.
#[derive(Debug, Clone)]
pub struct Oracle {
    column: usize,
    geometry: GeometricColumn,
}

impl Oracle {
    pub fn new(spec: &ConstructionSpec, n: usize, level_budget: u64) -> Result<Self> {
        Ok(Oracle {
            column: n,
            geometry: build_column(spec, n, level_budget)?,
        })
    }

    pub fn map(&self) -> IntervalMap {
        column_map(self.column, &self.geometry)
    }

    /// `mu(A ∩ ⋂_k T^{-k} A)` on this column by interval arithmetic, as an
    /// enclosure: points whose every iterate stays in the column are decided
    /// exactly; the rest of `A` contributes `[0, its measure]`. Shifts may
    /// be negative.
    pub fn intersection(&self, set: &LevelSet, shifts: &[BigInt]) -> Result<MeasureBound> {
        if shifts.is_empty() {
            return Err(invalid("at least one shift is required"));
        }
        let col = &self.geometry;
        if self.column < set.column() {
            return Err(invalid(format!(
                "target column {} is above source column {}",
                self.column,
                set.column()
            )));
        }
        let (src_starts, src_width) = &col.history[set.column()];
        let a_real = IntervalSet::new(
            set.heights()
                .iter()
                .map(|h| {
                    let i = h
                        .to_usize()
                        .filter(|&i| i < src_starts.len())
                        .ok_or_else(|| invalid(format!("height {h} outside column {}", set.column())))?;
                    Ok((src_starts[i].clone(), &src_starts[i] + src_width))
                })
                .collect::<Result<Vec<_>>>()?,
        );
        // levels of C_N inside A, laid out height-major
        let w = &col.width;
        let mut layout = Vec::new();
        for (y, s) in col.starts.iter().enumerate() {
            let idx = a_real.parts.partition_point(|(a, _)| a <= s);
            if idx > 0 && s < &a_real.parts[idx - 1].1 {
                let lo = Q::from_integer(y.into()) * w;
                layout.push((lo.clone(), lo + w));
            }
        }
        let h_set = IntervalSet::new(layout);
        let space = Q::from_integer(col.starts.len().into()) * w;
        let map = self.map();
        let mut hits = h_set.clone();
        let mut resolved = IntervalSet::interval(Q::zero(), space.clone());
        for k in shifts {
            let tk = map.power(k, &space);
            resolved = resolved.intersect(&tk.domain());
            hits = hits.intersect(&tk.preimage(&h_set));
        }
        let lower = hits.intersect(&resolved).measure();
        let unresolved = h_set.difference(&resolved).measure();
        Ok(MeasureBound {
            upper: &lower + unresolved,
            lower,
        })
    }
}

/// One-shot [`Oracle::intersection`] on column `n`.
pub fn oracle_intersection(
    spec: &ConstructionSpec,
    set: &LevelSet,
    shifts: &[BigInt],
    n: usize,
    level_budget: u64,
) -> Result<MeasureBound> {
    if n < set.column() {
        return Err(invalid(format!(
            "target column {n} is above source column {}",
            set.column()
        )));
    }
    Oracle::new(spec, n, level_budget)?.intersection(set, shifts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{build_example42, build_hk_skyscraper};

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn realized_maps() {
        let m = realize(&build_hk_skyscraper(2, 0), 1, 1 << 10).unwrap();
        assert_eq!(
            m.pieces,
            vec![Piece {
                start: q(0, 1),
                end: q(3, 2),
                shift: q(1, 2)
            }]
        );
        assert!(realize(&build_hk_skyscraper(2, 0), 0, 4).unwrap().pieces.is_empty());
        let m = realize(&build_example42(), 1, 1 << 10).unwrap();
        assert_eq!(
            m.pieces,
            vec![Piece {
                start: q(0, 1),
                end: q(15, 4),
                shift: q(1, 4)
            }]
        );
    }

    #[test]
    fn oracle_examples() {
        let hk = build_hk_skyscraper(2, 0);
        let one = [BigInt::from(1)];
        let v = oracle_intersection(&hk, &LevelSet::base(), &one, 2, 1 << 10).unwrap();
        assert_eq!(v, MeasureBound::exact(q(1, 2)));
        let a = LevelSet::from_u64(1, &[0, 2]);
        let v = oracle_intersection(&hk, &a, &[BigInt::zero()], 3, 1 << 10).unwrap();
        assert_eq!(v, MeasureBound::exact(q(1, 1)));
        let v = oracle_intersection(&build_example42(), &LevelSet::base(), &[BigInt::from(16)], 3, 1 << 13).unwrap();
        assert_eq!(v, MeasureBound::exact(q(1, 4)));
    }

    #[test]
    fn negative_shifts_mirror_positive_ones() {
        // the level sits 10 above the bottom, so 5 steps down stay inside
        let hk = build_hk_skyscraper(2, 0);
        let a = LevelSet::from_u64(2, &[10]);
        let up = oracle_intersection(&hk, &a, &[BigInt::from(5)], 4, 1 << 10).unwrap();
        let down = oracle_intersection(&hk, &a, &[BigInt::from(-5)], 4, 1 << 10).unwrap();
        assert!(up.is_exact());
        assert_eq!(up, down);
        // the base level's bottom piece never has a preimage inside a column
        let base = oracle_intersection(&hk, &LevelSet::base(), &[BigInt::from(-1)], 4, 1 << 10).unwrap();
        assert!(!base.is_exact());
    }

    #[test]
    fn interval_algebra() {
        let a = IntervalSet::new(vec![(q(0, 1), q(2, 1)), (q(3, 1), q(5, 1)), (q(1, 1), q(2, 1))]);
        assert_eq!(a.measure(), q(4, 1));
        let b = IntervalSet::interval(q(1, 1), q(4, 1));
        assert_eq!(a.intersect(&b).measure(), q(2, 1));
        assert_eq!(a.difference(&b).parts(), &[(q(0, 1), q(1, 1)), (q(4, 1), q(5, 1))]);
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            realize(&build_hk_skyscraper(2, 0), 6, 100),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
