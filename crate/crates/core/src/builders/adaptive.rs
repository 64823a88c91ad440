//! A skyscraper whose spacer counts are chosen stage by stage so that no
//! `a_k`, `b_k`, `a_k + b_k` are all differences of base descendants.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::spec::{ConstructionSpec, Stage};

/// Largest horizon the adaptive builder accepts.
pub const MAX_HORIZON: usize = 24;

/// A strictly increasing positive sequence `k -> x_k`, indexed from `k = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum SequenceRule {
    /// `k^exp`
    Power { exp: u32 },
    /// `base^k`
    Exponential { base: u64 },
    /// `slope * k + intercept`
    Linear { slope: u64, intercept: u64 },
    /// Listed terms `x_1, x_2, ...`.
    Explicit { terms: Vec<u64> },
}

impl SequenceRule {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            SequenceRule::Power { exp } => *exp >= 1,
            SequenceRule::Exponential { base } => *base >= 2,
            SequenceRule::Linear { slope, .. } => *slope >= 1,
            SequenceRule::Explicit { terms } => {
                terms.first().is_some_and(|&t| t > 0) && terms.windows(2).all(|w| w[0] < w[1])
            }
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!(
                "sequence {self:?} is not strictly increasing and positive"
            )))
        }
    }

    /// `x_k`, or `None` past the end of an explicit list.
    pub fn term(&self, k: u64) -> Option<BigUint> {
        match self {
            SequenceRule::Power { exp } => Some(BigUint::from(k).pow(*exp)),
            SequenceRule::Exponential { base } => Some(BigUint::from(*base).pow(u32::try_from(k).ok()?)),
            SequenceRule::Linear { slope, intercept } => Some(BigUint::from(*slope) * k + *intercept),
            SequenceRule::Explicit { terms } => {
                let i = usize::try_from(k).ok()?.checked_sub(1)?;
                terms.get(i).map(|&t| BigUint::from(t))
            }
        }
    }

    /// `(k, x_k)` for every `x_k <= bound`. Errors when an explicit list ends
    /// before the terms exceed `bound`.
    pub fn terms_up_to(&self, bound: &BigUint) -> Result<Vec<(u64, BigUint)>> {
        let mut out = Vec::new();
        for k in 1u64.. {
            let Some(x) = self.term(k) else {
                return Err(invalid(format!(
                    "sequence ends at term {} but terms up to {bound} are needed",
                    k - 1
                )));
            };
            if &x > bound {
                break;
            }
            out.push((k, x));
        }
        Ok(out)
    }
}

/// Digits `e_i` in `{-1, 0, 1}` with `z = sum e_i h_i`, low index first, or
/// `None` when `z` has no such representation.
///
/// Greedy from the top: valid when `h_{i+1} >= 4 h_i`, which makes the
/// representation unique.
pub fn signed_digits(z: &BigInt, heights: &[BigUint]) -> Option<Vec<i8>> {
    let mut below: Vec<BigInt> = Vec::with_capacity(heights.len());
    let mut acc = BigInt::zero();
    for h in heights {
        below.push(acc.clone());
        acc += BigInt::from(h.clone());
    }
    if z.abs() > acc {
        return None;
    }
    let mut rest = z.clone();
    let mut digits = vec![0i8; heights.len()];
    for i in (0..heights.len()).rev() {
        if rest.abs() <= below[i] {
            continue;
        }
        let h = BigInt::from(heights[i].clone());
        let (d, next) = if rest.sign() == Sign::Plus {
            (1, &rest - &h)
        } else {
            (-1, &rest + &h)
        };
        if next.abs() > below[i] {
            return None;
        }
        digits[i] = d;
        rest = next;
    }
    rest.is_zero().then_some(digits)
}

/// Whether `z` is a signed sum of `heights`.
pub fn in_signed_sums(z: &BigUint, heights: &[BigUint]) -> bool {
    signed_digits(&BigInt::from(z.clone()), heights).is_some()
}

/// Heights `h_0..=h_{horizon+1}` of the adaptive skyscraper.
pub fn adaptive_heights(a: &SequenceRule, b: &SequenceRule, horizon: usize) -> Result<Vec<BigUint>> {
    a.validate()?;
    b.validate()?;
    if horizon > MAX_HORIZON {
        return Err(invalid(format!("horizon {horizon} above the supported {MAX_HORIZON}")));
    }
    let mut hs = vec![BigUint::from(1u32)];
    for _ in 0..=horizon {
        let reach: BigUint = hs.iter().sum();
        // K_a and K_b: exactly one of a_k, b_k is already a difference
        let mut forbidden = Vec::new();
        for (k, ak) in a.terms_up_to(&reach)? {
            let bk = b
                .term(k)
                .ok_or_else(|| invalid(format!("second sequence has no term {k}")))?;
            if in_signed_sums(&ak, &hs) && !in_signed_sums(&bk, &hs) {
                forbidden.push(bk);
            }
        }
        for (k, bk) in b.terms_up_to(&reach)? {
            let ak = a
                .term(k)
                .ok_or_else(|| invalid(format!("first sequence has no term {k}")))?;
            if in_signed_sums(&bk, &hs) && !in_signed_sums(&ak, &hs) {
                forbidden.push(ak);
            }
        }
        let last = hs.last().unwrap().clone();
        // c starts at 3h, so h_next starts at 5h
        let mut next = &last * 5u32;
        loop {
            hs.push(next.clone());
            let clear = forbidden.iter().all(|f| !in_signed_sums(f, &hs));
            hs.pop();
            if clear {
                break;
            }
            next += 1u32;
        }
        hs.push(next);
    }
    Ok(hs)
}

/// The adaptive skyscraper as an explicit list of `horizon + 1` stages.
pub fn build_prop64_adaptive(a: &SequenceRule, b: &SequenceRule, horizon: usize) -> Result<ConstructionSpec> {
    let hs = adaptive_heights(a, b, horizon)?;
    let stages = hs
        .windows(2)
        .map(|w| Stage::new(2, vec![BigUint::zero(), &w[1] - &w[0] * 2u32]))
        .collect::<Result<Vec<_>>>()?;
    let spacers: Vec<String> = hs.windows(2).map(|w| (&w[1] - &w[0] * 2u32).to_string()).collect();
    Ok(ConstructionSpec::explicit(stages)?
        .with_name("prop64_adaptive")
        .with_metadata("a", format!("{a:?}"))
        .with_metadata("b", format!("{b:?}"))
        .with_metadata("horizon", horizon.to_string())
        .with_metadata("c", spacers.join(",")))
}
