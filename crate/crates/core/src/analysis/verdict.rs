use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use super::profile::{measure_at, tower_for};
use super::vector::Vector;
use crate::descendants::check_budget;
use crate::error::{invalid, Error, Result};
use crate::kernel::{self, Coord};
use crate::level::LevelSet;
use crate::spec::{ConstructionSpec, Limits, Tower};

/// Metadata key a builder sets when its pattern provably recurs at
/// infinitely many stages.
pub const GUARANTEE_KEY: &str = "guarantee";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerdictKind {
    /// A positive uniform lower bound was observed on every tested term.
    PositiveWitnessed,
    /// Every joint intersection in the listed windows is exactly zero.
    ZeroOnWindow,
    /// A window claimed to be zero holds a positive joint intersection.
    Refuted,
    Inconclusive,
}

/// What a verdict rests on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    /// Exhaustive exact computation over the listed windows or terms.
    Exhaustive,
    /// A property of the construction asserted by its builder.
    BuilderGuarantee(String),
    /// A theorem used to lift the computed facts; not itself computed.
    Citation(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeVerdict {
    pub kind: VerdictKind,
    /// Certified lower ratio for positive verdicts; zero otherwise.
    pub bound: BigRational,
    /// The `n` (or `m`) values attaining the bound, or counterexamples.
    pub witnesses: Vec<BigUint>,
    /// Verified half-open windows `(lo, hi]`.
    pub windows: Vec<(BigUint, BigUint)>,
    pub evidence: Vec<Evidence>,
    pub notes: Vec<String>,
}

impl TypeVerdict {
    fn inconclusive(note: String) -> Self {
        TypeVerdict {
            kind: VerdictKind::Inconclusive,
            bound: BigRational::zero(),
            witnesses: Vec::new(),
            windows: Vec::new(),
            evidence: Vec::new(),
            notes: vec![note],
        }
    }
}

/// How many window hits a refutation lists.
const MAX_LISTED_HITS: usize = 16;

/// Checks that `mu(A ∩ T^{v_1 m}A ∩ ... ∩ T^{v_d m}A) = 0` exactly for every
/// `m` in `(h_{n-1}, h_n]`.
pub fn verify_zero_window_on(
    tower: &Tower,
    set: &LevelSet,
    v: &Vector,
    n: usize,
    limits: &Limits,
) -> Result<TypeVerdict> {
    if n == 0 {
        return Err(invalid("window index must be at least 1"));
    }
    tower.check_column(n)?;
    let lo = tower.height(n - 1).clone();
    let hi = tower.height(n).clone();
    let Some(len) = (&hi - &lo).to_u64() else {
        return Ok(TypeVerdict::inconclusive(format!(
            "window ({lo}, {hi}] too long to scan"
        )));
    };
    let max_shift = &hi * v.last();
    let res = tower.resolve_depth(set, std::slice::from_ref(&max_shift))?;
    if !res.resolved {
        return Ok(TypeVerdict::inconclusive(format!(
            "shift {max_shift} not resolved by column {}",
            res.depth
        )));
    }
    let needed = tower.cut_product(set.column(), res.depth) * BigUint::from(set.len());
    if let Err(e) = check_budget(&needed, limits.cardinality_budget) {
        return Ok(TypeVerdict::inconclusive(e.to_string()));
    }
    let hits: Vec<BigUint> = if tower.fits_u128(res.depth, &max_shift) {
        scan::<u128>(tower, set, v, &lo, len, res.depth, limits)?
    } else {
        scan::<BigUint>(tower, set, v, &lo, len, res.depth, limits)?
    };
    let window = (lo, hi);
    if hits.is_empty() {
        return Ok(TypeVerdict {
            kind: VerdictKind::ZeroOnWindow,
            bound: BigRational::zero(),
            witnesses: Vec::new(),
            windows: vec![window],
            evidence: vec![
                Evidence::Exhaustive,
                Evidence::Citation(
                    "zero joint intersections on every column lift to all finite-measure sets; \
                     the lift is a theorem and is not computed here"
                        .into(),
                ),
            ],
            notes: vec![format!("checked at column {}", res.depth)],
        });
    }
    let total = hits.len();
    Ok(TypeVerdict {
        kind: VerdictKind::Refuted,
        bound: BigRational::zero(),
        witnesses: hits.into_iter().take(MAX_LISTED_HITS).collect(),
        windows: vec![window],
        evidence: vec![Evidence::Exhaustive],
        notes: vec![format!("{total} values of m with a positive joint intersection")],
    })
}

fn scan<T: Coord>(
    tower: &Tower,
    set: &LevelSet,
    v: &Vector,
    lo: &BigUint,
    len: u64,
    depth: usize,
    limits: &Limits,
) -> Result<Vec<BigUint>> {
    let d = tower.push_heights::<T>(set, depth, limits)?;
    let lo = T::from_big(lo).ok_or_else(|| invalid("window bound does not fit"))?;
    Ok(kernel::window_hits(&d, v.components(), &lo, len)
        .iter()
        .map(Coord::to_big)
        .collect())
}

pub fn verify_zero_window(
    spec: &ConstructionSpec,
    set: &LevelSet,
    v: &Vector,
    n: usize,
    limits: &Limits,
) -> Result<TypeVerdict> {
    let tower = tower_for(spec, set, limits)?;
    verify_zero_window_on(&tower, set, v, n, limits)
}

/// Names the `m`-th term of a subsequence `n_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubsequenceRule {
    /// `n_m = scale * h_{phase + every * m}`.
    ColumnHeight { scale: u64, every: usize, phase: usize },
    /// Strictly increasing positive terms.
    Explicit(Vec<BigUint>),
}

impl SubsequenceRule {
    /// `n_m = h_m`.
    pub fn heights() -> Self {
        SubsequenceRule::ColumnHeight {
            scale: 1,
            every: 1,
            phase: 0,
        }
    }

    /// Column whose height the `m`-th term uses, if any.
    pub fn column(&self, m: usize) -> Option<usize> {
        match self {
            SubsequenceRule::ColumnHeight { every, phase, .. } => Some(phase + every * m),
            SubsequenceRule::Explicit(_) => None,
        }
    }

    pub fn term(&self, m: usize, tower: &Tower) -> Result<BigUint> {
        match self {
            SubsequenceRule::ColumnHeight { scale, .. } => {
                let c = self.column(m).unwrap();
                tower.check_column(c)?;
                Ok(tower.height(c) * *scale)
            }
            SubsequenceRule::Explicit(list) => list
                .get(m)
                .cloned()
                .ok_or_else(|| invalid(format!("explicit subsequence has no term {m}"))),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            SubsequenceRule::ColumnHeight { scale, every, .. } => {
                if *scale == 0 || *every == 0 {
                    return Err(invalid("subsequence rule must be strictly increasing"));
                }
            }
            SubsequenceRule::Explicit(list) => {
                if list.first().is_some_and(Zero::is_zero) || !list.windows(2).all(|w| w[0] < w[1]) {
                    return Err(invalid("subsequence rule must be strictly increasing and positive"));
                }
            }
        }
        Ok(())
    }
}

/// Certifies `mu(I ∩ T^{v_1 n_m}I ∩ ...) >= alpha mu(I)` for every level `I`
/// of columns `0..=max_column` and every term `n_m`, `m <= m_max`, with
/// `alpha` the smallest observed ratio. Levels of column `c` are tested
/// against the terms with `m >= c`, since only large `n` matter.
pub fn certify_v_alpha_lower_columns(
    spec: &ConstructionSpec,
    v: &Vector,
    rule: &SubsequenceRule,
    m_max: usize,
    max_column: usize,
    limits: &Limits,
) -> Result<TypeVerdict> {
    rule.validate()?;
    let tower = spec.tower(spec.depth_within(limits).max(max_column))?;
    let terms = (0..=m_max).map(|m| rule.term(m, &tower)).collect::<Result<Vec<_>>>()?;
    let mut cases = Vec::new();
    for c in 0..=max_column.min(m_max) {
        let h = tower
            .height(c)
            .to_u64()
            .ok_or_else(|| invalid(format!("column {c} too tall to enumerate")))?;
        for x in 0..h {
            for m in c..=m_max {
                cases.push((c, x, m));
            }
        }
    }
    let results = cases
        .par_iter()
        .map(|&(c, x, m)| {
            let set = LevelSet::from_u64(c, &[x]);
            let (value, _, note) = measure_at(&tower, &set, &v.shifts(&terms[m]), limits)?;
            Ok((value.lower / tower.width(c), m, note))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut notes: Vec<String> = results.iter().filter_map(|r| r.2.clone()).collect();
    notes.dedup();
    let Some((alpha, _, _)) = results.iter().min_by(|a, b| a.0.cmp(&b.0)) else {
        return Ok(TypeVerdict::inconclusive("no levels tested".into()));
    };
    let alpha = alpha.clone();
    let mut witnesses: Vec<BigUint> = results
        .iter()
        .filter(|r| r.0 == alpha)
        .map(|r| terms[r.1].clone())
        .collect();
    witnesses.sort();
    witnesses.dedup();
    if alpha.is_zero() {
        notes.push("some tested level has zero lower bound".into());
        return Ok(TypeVerdict {
            witnesses,
            ..TypeVerdict::inconclusive(notes.join("; "))
        });
    }
    let mut evidence = vec![Evidence::Exhaustive];
    if let Some(g) = spec.metadata().get(GUARANTEE_KEY) {
        evidence.push(Evidence::BuilderGuarantee(g.clone()));
    } else {
        notes.push("no builder guarantee: positivity shown on finitely many terms only".into());
    }
    Ok(TypeVerdict {
        kind: VerdictKind::PositiveWitnessed,
        bound: alpha,
        witnesses,
        windows: Vec::new(),
        evidence,
        notes,
    })
}

/// [`certify_v_alpha_lower_columns`] over columns `0..=m_max`.
pub fn certify_v_alpha_lower(
    spec: &ConstructionSpec,
    v: &Vector,
    rule: &SubsequenceRule,
    m_max: usize,
    limits: &Limits,
) -> Result<TypeVerdict> {
    certify_v_alpha_lower_columns(spec, v, rule, m_max, m_max, limits)
}

/// Whether an error came from a resource limit rather than bad input.
pub fn is_resource_error(e: &Error) -> bool {
    matches!(e, Error::BudgetExceeded { .. })
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

    #[test]
    fn sixteen_fold_windows_are_zero() {
        let spec = ConstructionSpec::from_rule(Scaled(vec![0, 3, 1, 8]));
        let v = Vector::new(vec![1, 2]).unwrap();
        for n in 1..=3 {
            let verdict = verify_zero_window(&spec, &LevelSet::base(), &v, n, &Limits::default()).unwrap();
            assert_eq!(verdict.kind, VerdictKind::ZeroOnWindow, "n = {n}");
        }
    }

    #[test]
    fn consecutive_pattern_refutes_the_window() {
        // offsets {0, h, 2h}: m = h_n is a joint return
        let spec = ConstructionSpec::from_rule(Scaled(vec![0, 0, 2]));
        let v = Vector::new(vec![1, 2]).unwrap();
        let verdict = verify_zero_window(&spec, &LevelSet::base(), &v, 2, &Limits::default()).unwrap();
        assert_eq!(verdict.kind, VerdictKind::Refuted);
        let h2 = spec.tower(2).unwrap().height(2).clone();
        assert!(verdict.witnesses.contains(&h2));
    }

    #[test]
    fn skyscraper_alpha_is_one_half() {
        let hk = ConstructionSpec::from_rule(Scaled(vec![0, 2]));
        let v = Vector::new(vec![1]).unwrap();
        let verdict = certify_v_alpha_lower(&hk, &v, &SubsequenceRule::heights(), 4, &Limits::default()).unwrap();
        assert_eq!(verdict.kind, VerdictKind::PositiveWitnessed);
        assert_eq!(verdict.bound, q(1, 2));
    }

    #[test]
    fn constant_rule_is_rejected() {
        let hk = ConstructionSpec::from_rule(Scaled(vec![0, 2]));
        let v = Vector::new(vec![1]).unwrap();
        let rule = SubsequenceRule::ColumnHeight {
            scale: 0,
            every: 1,
            phase: 0,
        };
        assert!(certify_v_alpha_lower(&hk, &v, &rule, 2, &Limits::default()).is_err());
        let rule = SubsequenceRule::Explicit(vec![BigUint::zero()]);
        assert!(certify_v_alpha_lower(&hk, &v, &rule, 0, &Limits::default()).is_err());
    }

    #[test]
    fn zero_window_needs_positive_index() {
        let hk = ConstructionSpec::from_rule(Scaled(vec![0, 2]));
        let v = Vector::new(vec![1]).unwrap();
        assert!(verify_zero_window(&hk, &LevelSet::base(), &v, 0, &Limits::default()).is_err());
    }
}
