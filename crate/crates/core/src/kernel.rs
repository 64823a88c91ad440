//! Materialization and counting kernels.
//!
//! All kernels are generic over [`Coord`], so the same code runs on `u128`
//! (the fast path whenever every height involved fits) and on `BigUint`.

use std::collections::HashMap;
use std::fmt::Debug;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

/// Sets at or above this size are scanned in parallel.
const PAR_THRESHOLD: usize = 1 << 12;

pub(crate) trait Coord: Ord + Clone + Send + Sync + Debug {
    fn from_big(v: &BigUint) -> Option<Self>;
    fn to_big(&self) -> BigUint;
    fn plus(&self, other: &Self) -> Self;
    /// `self - other`; callers guarantee `self >= other`.
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, k: u64) -> Self;
    /// `Some(self / k)` when `k` divides `self`.
    fn exact_div(&self, k: u64) -> Option<Self>;
}

impl Coord for u128 {
    fn from_big(v: &BigUint) -> Option<Self> {
        v.to_u128()
    }
    fn to_big(&self) -> BigUint {
        BigUint::from(*self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, k: u64) -> Self {
        self * k as u128
    }
    fn exact_div(&self, k: u64) -> Option<Self> {
        let k = k as u128;
        self.is_multiple_of(k).then(|| self / k)
    }
}

impl Coord for BigUint {
    fn from_big(v: &BigUint) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigUint {
        self.clone()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, k: u64) -> Self {
        self * k
    }
    fn exact_div(&self, k: u64) -> Option<Self> {
        (self % k).is_zero().then(|| self / k)
    }
}

pub(crate) fn convert<T: Coord>(xs: &[BigUint]) -> Option<Vec<T>> {
    xs.iter().map(T::from_big).collect()
}

/// `bases + O_first + ... + O_last`, sorted.
///
/// Requires every base to be below the height of the column the first offset
/// list stacks, and each offset list to place copies at least one column
/// height apart; concatenating the shifted copies in offset order is then
/// already sorted.
pub(crate) fn sumset<T: Coord>(bases: Vec<T>, stage_offsets: &[Vec<T>]) -> Vec<T> {
    let mut cur = bases;
    for offs in stage_offsets {
        let mut next = Vec::with_capacity(cur.len() * offs.len());
        for o in offs {
            next.extend(cur.iter().map(|x| x.plus(o)));
        }
        cur = next;
    }
    cur
}

/// Counts over a materialized sorted set `d` of column heights.
///
/// Returns `(hits, unresolved)`: `hits` counts the `x` with
/// `x + max(shifts) <= top` and `x + k` in `d` for every shift; `unresolved`
/// counts the `x` above that threshold.
pub(crate) fn count_joint<T: Coord>(d: &[T], shifts: &[T], top: &T) -> (u64, u64) {
    let max_shift = shifts.iter().max().expect("non-empty shifts");
    let resolved = d.partition_point(|x| &x.plus(max_shift) <= top);
    let hit = |x: &T| shifts.iter().all(|k| d.binary_search(&x.plus(k)).is_ok());
    let hits = if resolved >= PAR_THRESHOLD {
        d[..resolved].par_iter().filter(|x| hit(x)).count()
    } else {
        d[..resolved].iter().filter(|x| hit(x)).count()
    };
    (hits as u64, (d.len() - resolved) as u64)
}

/// Whether some `x` in `d` has `x + k` in `d` for every shift.
pub(crate) fn any_joint<T: Coord>(d: &[T], shifts: &[T]) -> bool {
    d.iter()
        .any(|x| shifts.iter().all(|k| d.binary_search(&x.plus(k)).is_ok()))
}

/// Every `m` in `(lo, hi]` with a positive joint intersection for the shift
/// multipliers `v` (strictly increasing), over the fully resolved set `d`.
///
/// Picks the cheaper of two strategies: scanning `m` with membership tests
/// (`O(window * |d|)`), or enumerating pairs `x < y` of `d` with
/// `y - x = v_1 m` (`O(|d|^2)`).
pub(crate) fn window_hits<T: Coord>(d: &[T], v: &[u64], lo: &T, window_len: u64) -> Vec<T> {
    if (d.len() as u64) < window_len {
        window_hits_pairs(d, v, lo, window_len)
    } else {
        window_hits_scan(d, v, lo, window_len)
    }
}

pub(crate) fn window_hits_scan<T: Coord>(d: &[T], v: &[u64], lo: &T, window_len: u64) -> Vec<T> {
    let check = |off: u64| {
        let m = lo.plus(&from_u64::<T>(off + 1));
        let shifts: Vec<T> = v.iter().map(|&c| m.times(c)).collect();
        any_joint(d, &shifts).then_some(m)
    };
    if window_len >= 256 {
        (0..window_len).into_par_iter().filter_map(check).collect()
    } else {
        (0..window_len).filter_map(check).collect()
    }
}

pub(crate) fn window_hits_pairs<T: Coord>(d: &[T], v: &[u64], lo: &T, window_len: u64) -> Vec<T> {
    let hi = lo.plus(&from_u64::<T>(window_len));
    let mut hits: Vec<T> = if d.len() >= 512 {
        (0..d.len())
            .into_par_iter()
            .flat_map_iter(|i| pair_hits(d, i, v, lo, &hi).collect::<Vec<_>>())
            .collect()
    } else {
        (0..d.len()).flat_map(|i| pair_hits(d, i, v, lo, &hi)).collect()
    };
    hits.sort_unstable();
    hits.dedup();
    hits
}

fn pair_hits<'a, T: Coord>(d: &'a [T], i: usize, v: &'a [u64], lo: &'a T, hi: &'a T) -> impl Iterator<Item = T> + 'a {
    let x = &d[i];
    d[i + 1..].iter().filter_map(move |y| {
        let m = y.minus(x).exact_div(v[0])?;
        if &m <= lo || &m > hi {
            return None;
        }
        v[1..]
            .iter()
            .all(|&c| d.binary_search(&x.plus(&m.times(c))).is_ok())
            .then_some(m)
    })
}

fn from_u64<T: Coord>(x: u64) -> T {
    T::from_big(&BigUint::from(x)).expect("u64 fits every coordinate type")
}

/// `#{x in D : x + k in D}` for `D = bases + O_0 + ... + O_last` without
/// materializing `D`.
///
/// Descends through the per-stage difference multisets from the top stage,
/// pruning any partial difference the lower stages cannot compensate, and
/// finishes on the difference multiset of the bases. Valid because every
/// element of `D` has exactly one representation as a base plus one offset
/// per stage.
pub(crate) fn count_pairs_factored(bases: &[BigUint], stage_offsets: &[Vec<BigUint>], k: &BigUint) -> BigUint {
    let base_diffs = diff_multiset(bases);
    let stage_diffs: Vec<Vec<(BigInt, u64)>> = stage_offsets
        .iter()
        .map(|o| diff_multiset(o).into_iter().collect())
        .collect();
    // reach[j]: largest |difference| producible by the bases and stages < j.
    let base_spread = spread(bases);
    let mut reach = Vec::with_capacity(stage_offsets.len() + 1);
    reach.push(base_spread);
    for o in stage_offsets {
        let next = reach.last().unwrap() + spread(o);
        reach.push(next);
    }
    let mut memo = HashMap::new();
    descend(
        stage_offsets.len(),
        BigInt::from_biguint(Sign::Plus, k.clone()),
        &stage_diffs,
        &base_diffs,
        &reach,
        &mut memo,
    )
}

fn spread(xs: &[BigUint]) -> BigInt {
    match (xs.iter().min(), xs.iter().max()) {
        (Some(lo), Some(hi)) => BigInt::from(hi - lo),
        _ => BigInt::zero(),
    }
}

fn diff_multiset(xs: &[BigUint]) -> HashMap<BigInt, u64> {
    let mut out = HashMap::new();
    for a in xs {
        for b in xs {
            *out.entry(BigInt::from(b.clone()) - BigInt::from(a.clone()))
                .or_insert(0) += 1;
        }
    }
    out
}

fn descend(
    level: usize,
    remaining: BigInt,
    stage_diffs: &[Vec<(BigInt, u64)>],
    base_diffs: &HashMap<BigInt, u64>,
    reach: &[BigInt],
    memo: &mut HashMap<(usize, BigInt), BigUint>,
) -> BigUint {
    if level == 0 {
        return base_diffs.get(&remaining).copied().unwrap_or(0).into();
    }
    if let Some(hit) = memo.get(&(level, remaining.clone())) {
        return hit.clone();
    }
    let below = &reach[level - 1];
    let mut total = BigUint::zero();
    for (diff, mult) in &stage_diffs[level - 1] {
        let rest = &remaining - diff;
        let mag = rest.magnitude();
        if BigInt::from(mag.clone()) <= *below {
            total += descend(level - 1, rest, stage_diffs, base_diffs, reach, memo) * *mult;
        }
    }
    memo.insert((level, remaining), total.clone());
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(xs: &[u64]) -> Vec<BigUint> {
        xs.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn sumset_of_two_skyscraper_stages() {
        let d = sumset(vec![0u128], &[vec![0, 1], vec![0, 4]]);
        assert_eq!(d, vec![0, 1, 4, 5]);
    }

    #[test]
    fn joint_counts_split_resolved_and_unresolved() {
        let d = [0u128, 1, 4, 5];
        // h = 16, top = 15: all resolved.
        assert_eq!(count_joint(&d, &[1], &15), (2, 0));
        // top = 4: 4 and 5 are unresolved for shift 1.
        assert_eq!(count_joint(&d, &[1], &4), (1, 2));
    }

    #[test]
    fn factored_count_matches_enumeration() {
        let bases = big(&[0, 2]);
        let offs = vec![big(&[0, 3, 9]), big(&[0, 12, 30])];
        let offs_u: Vec<Vec<u128>> = offs.iter().map(|o| convert(o).unwrap()).collect();
        let d = sumset(convert::<u128>(&bases).unwrap(), &offs_u);
        for k in 0..60u64 {
            let brute = d.iter().filter(|&&x| d.binary_search(&(x + k as u128)).is_ok()).count();
            assert_eq!(
                count_pairs_factored(&bases, &offs, &BigUint::from(k)),
                BigUint::from(brute),
                "k = {k}"
            );
        }
    }

    #[test]
    fn window_strategies_agree() {
        let offs: Vec<Vec<u128>> = vec![vec![0, 1, 5, 7], vec![0, 16, 80, 112], vec![0, 256, 1280, 1792]];
        let d = sumset(vec![0u128], &offs);
        for v in [[1u64, 3], [1, 2], [2, 5]] {
            let direct: Vec<u128> = (1..=200u128)
                .filter(|&m| any_joint(&d, &[v[0] as u128 * m, v[1] as u128 * m]))
                .collect();
            assert_eq!(window_hits_scan(&d, &v, &0u128, 200), direct, "{v:?}");
            assert_eq!(window_hits_pairs(&d, &v, &0u128, 200), direct, "{v:?}");
        }
    }
}
