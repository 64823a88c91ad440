use num_bigint::BigUint;
use num_rational::BigRational;
use rayon::prelude::*;

use super::profile::{measure_at, tower_for};
use crate::error::{invalid, Error, Result};
use crate::level::LevelSet;
use crate::measure::MeasureBound;
use crate::spec::{ConstructionSpec, Limits, Tower};

/// A pair of indices `n > m` whose triple intersection
/// `mu(A ∩ T^{a_m}A ∩ T^{a_n}A)` meets the guaranteed bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessPair {
    pub n: usize,
    pub m: usize,
    pub value: MeasureBound,
    /// `mu(A) / C(2M+1, 2)`.
    pub bound: BigRational,
    /// `(k, mu(A ∩ T^{a_k}A))` over the window.
    pub pairwise: Vec<(usize, MeasureBound)>,
}

fn binom2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Searches `[start, start + 2M]` for indices `n > m` with
/// `mu(A ∩ T^{a_m}A ∩ T^{a_n}A) >= mu(A) / C(2M+1, 2)`.
///
/// Requires `mu(A ∩ T^{a_k}A) >= mu(A)/M` on the whole window. Pigeonhole
/// then guarantees a pair; failing to find one is reported as an anomaly.
/// With `M = 0` the window is the single index `start` and the result is the
/// pairwise measure there.
pub fn witness_pair_search_on(
    tower: &Tower,
    set: &LevelSet,
    terms: &[BigUint],
    m_window: usize,
    start: usize,
    limits: &Limits,
) -> Result<WitnessPair> {
    let end = start + 2 * m_window;
    if end >= terms.len() {
        return Err(invalid(format!(
            "window [{start}, {end}] needs {} terms, got {}",
            end + 1,
            terms.len()
        )));
    }
    let mu = tower.measure(set);
    let pairwise = (start..=end)
        .into_par_iter()
        .map(|k| Ok((k, measure_at(tower, set, std::slice::from_ref(&terms[k]), limits)?.0)))
        .collect::<Result<Vec<_>>>()?;
    if m_window == 0 {
        let value = pairwise[0].1.clone();
        return Ok(WitnessPair {
            n: start,
            m: start,
            bound: value.lower.clone(),
            value,
            pairwise,
        });
    }
    let need = &mu / BigRational::from_integer(m_window.into());
    if let Some((k, v)) = pairwise.iter().find(|(_, v)| v.lower < need) {
        return Err(invalid(format!(
            "precondition fails at index {k}: pairwise measure {v} below mu(A)/{m_window} = {need}"
        )));
    }
    let bound = &mu / BigRational::from_integer(binom2(2 * m_window as u64 + 1).into());
    let pairs: Vec<(usize, usize)> = (start..=end).flat_map(|m| (m + 1..=end).map(move |n| (n, m))).collect();
    let values = pairs
        .par_iter()
        .map(|&(n, m)| {
            let shifts = [terms[m].clone(), terms[n].clone()];
            Ok((n, m, measure_at(tower, set, &shifts, limits)?.0))
        })
        .collect::<Result<Vec<_>>>()?;
    // largest certified value; ties go to the first pair in window order
    let best = values
        .into_iter()
        .rev()
        .max_by(|a, b| a.2.lower.cmp(&b.2.lower))
        .expect("M >= 1 gives at least one pair");
    if best.2.lower < bound {
        return Err(Error::Anomaly(format!(
            "no pair in [{start}, {end}] reaches {bound}; best is ({}, {}) with {}",
            best.0, best.1, best.2
        )));
    }
    Ok(WitnessPair {
        n: best.0,
        m: best.1,
        value: best.2,
        bound,
        pairwise,
    })
}

pub fn witness_pair_search(
    spec: &ConstructionSpec,
    set: &LevelSet,
    terms: &[BigUint],
    m_window: usize,
    start: usize,
    limits: &Limits,
) -> Result<WitnessPair> {
    witness_pair_search_on(&tower_for(spec, set, limits)?, set, terms, m_window, start, limits)
}

/// `a_k = h_k` for `k <= count`.
pub fn height_terms(tower: &Tower, count: usize) -> Result<Vec<BigUint>> {
    tower.check_column(count)?;
    Ok(tower.heights()[..=count].to_vec())
}
