//! Stage rules that stack copies at prescribed multiples of the column height.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::analysis::Vector;
use crate::error::{invalid, Result};
use crate::spec::{Stage, StageRule};

/// Which stages carry the pattern: `n >= phase` with `(n - phase) % every == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    #[serde(default = "one")]
    pub every: usize,
    #[serde(default)]
    pub phase: usize,
}

fn one() -> usize {
    1
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule { every: 1, phase: 0 }
    }
}

impl Schedule {
    pub fn applies(&self, n: usize) -> bool {
        n >= self.phase && (n - self.phase).is_multiple_of(self.every)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.every == 0 {
            return Err(invalid("schedule period must be at least 1"));
        }
        Ok(())
    }
}

/// Spacers above the last copy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    /// `k * h_n`.
    Multiple(u64),
    /// Smallest tail with `h_{n+1} > (n + offset) * H_n`, where
    /// `H_n = weight * sum_{k <= n} h_k`.
    Growth { offset: u64, weight: u64 },
}

impl Tail {
    /// Tail spacer count for a stage whose copies already occupy `used`
    /// levels, given `h_0..=h_n`.
    pub(crate) fn spacers(&self, n: usize, heights: &[BigUint], used: &BigUint) -> BigUint {
        match self {
            Tail::Multiple(k) => &heights[n] * *k,
            Tail::Growth { offset, weight } => {
                let target = growth_target(n, heights, *offset, *weight);
                if target > *used {
                    target - used
                } else {
                    BigUint::zero()
                }
            }
        }
    }
}

/// `(n + offset) * H_n + 1`.
pub(crate) fn growth_target(n: usize, heights: &[BigUint], offset: u64, weight: u64) -> BigUint {
    let total: BigUint = heights[..=n].iter().sum();
    total * weight * (n as u64 + offset) + 1u32
}

/// `r = 2`, spacers `(0, 4h)`, or more if the tail asks for it.
pub(crate) fn filler(n: usize, heights: &[BigUint], tail: &Tail) -> Result<Stage> {
    let h = &heights[n];
    let mut s = h * 4u32;
    if let Tail::Growth { .. } = tail {
        let extra = tail.spacers(n, heights, &(h * 2u32));
        if extra > s {
            s = extra;
        }
    }
    Stage::new(2, vec![BigUint::zero(), s])
}

/// Stage whose copies of `C_n` sit at `q_i * h_n`, `q_0 = 0`.
pub(crate) fn pattern_stage(multipliers: &[u64], n: usize, heights: &[BigUint], tail: &Tail) -> Result<Stage> {
    let h = &heights[n];
    let mut spacers: Vec<BigUint> = multipliers.windows(2).map(|w| h * (w[1] - w[0] - 1)).collect();
    let last = *multipliers.last().unwrap();
    spacers.push(tail.spacers(n, heights, &(h * (last + 1))));
    Stage::new(multipliers.len(), spacers)
}

/// `0 = q_0 < q_1 < ... < q_d`.
pub(crate) fn check_multipliers(q: &[u64]) -> Result<()> {
    if q.len() < 2 || q[0] != 0 || !q.windows(2).all(|w| w[0] < w[1]) {
        return Err(invalid(format!(
            "offset multipliers must start at 0 and increase strictly, got {q:?}"
        )));
    }
    Ok(())
}

/// `(0, v_1, ..., v_d)`.
pub(crate) fn with_zero(v: &Vector) -> Vec<u64> {
    std::iter::once(0).chain(v.components().iter().copied()).collect()
}

/// Copies at `q_i * h_n` on scheduled stages, filler elsewhere.
#[derive(Debug, Clone)]
pub struct OffsetPatternRule {
    pub multipliers: Vec<u64>,
    pub tail: Tail,
    pub schedule: Schedule,
}

impl StageRule for OffsetPatternRule {
    fn stage(&self, n: usize, heights: &[BigUint]) -> Result<Stage> {
        if self.schedule.applies(n) {
            pattern_stage(&self.multipliers, n, heights, &self.tail)
        } else {
            filler(n, heights, &self.tail)
        }
    }
}

/// `r = 2`, spacers `(0, mul * h_n + add)`.
#[derive(Debug, Clone)]
pub struct SkyscraperRule {
    pub mul: u64,
    pub add: u64,
}

impl StageRule for SkyscraperRule {
    fn stage(&self, n: usize, heights: &[BigUint]) -> Result<Stage> {
        Stage::new(2, vec![BigUint::zero(), &heights[n] * self.mul + self.add])
    }
}

/// `r = 2d`: `(v_i - 1) h` above subcolumn `2i - 1`, `M h` above subcolumn
/// `2i` for `i < d`, and above the last subcolumn as many spacers as there
/// are levels below it.
#[derive(Debug, Clone)]
pub struct InterleavedRule {
    pub v: Vector,
    pub gap: u64,
}

impl StageRule for InterleavedRule {
    fn stage(&self, n: usize, heights: &[BigUint]) -> Result<Stage> {
        let h = &heights[n];
        let d = self.v.dim();
        let mut spacers = Vec::with_capacity(2 * d);
        for (i, &vi) in self.v.components().iter().enumerate() {
            spacers.push(h * (vi - 1));
            if i + 1 < d {
                spacers.push(h * self.gap);
            }
        }
        let below: BigUint = h * (2 * d as u64) + spacers.iter().sum::<BigUint>();
        spacers.push(below);
        Stage::new(2 * d, spacers)
    }
}

/// Pattern stages with `r = k` and no spacers, alternating with filler.
#[derive(Debug, Clone)]
pub struct KCutRule {
    pub k: usize,
    pub filler: bool,
}

impl StageRule for KCutRule {
    fn stage(&self, n: usize, heights: &[BigUint]) -> Result<Stage> {
        if self.filler && n % 2 == 1 {
            filler(n, heights, &Tail::Multiple(4))
        } else {
            Stage::new(self.k, vec![BigUint::zero(); self.k])
        }
    }
}

/// Prime-power scheduled family: stage `m = p^i > 1` uses the pattern of
/// the vector assigned to `p` (primes in increasing order, cycling through
/// the family); every other stage is filler. Tails grow with
/// `H_m = sum_{k <= m} h_k * sum_{i <= min(m, D-1)} |V_i|_1`.
#[derive(Debug, Clone)]
pub struct PrimePowerRule {
    pub family: Vec<Vector>,
}

impl PrimePowerRule {
    /// Index into the family used at stage `m`, if any.
    pub fn assignment(&self, m: usize) -> Option<usize> {
        let p = prime_power_base(m)?;
        Some(prime_index(p) % self.family.len())
    }

    fn weight(&self, m: usize) -> u64 {
        self.family.iter().take(m + 1).map(Vector::sum).sum()
    }
}

impl StageRule for PrimePowerRule {
    fn stage(&self, m: usize, heights: &[BigUint]) -> Result<Stage> {
        let tail = Tail::Growth {
            offset: 1,
            weight: self.weight(m),
        };
        match self.assignment(m) {
            Some(i) => pattern_stage(&with_zero(&self.family[i]), m, heights, &tail),
            None => filler(m, heights, &tail),
        }
    }
}

/// `p` when `m = p^i` for a prime `p` and `i >= 1`.
pub fn prime_power_base(m: usize) -> Option<usize> {
    if m < 2 {
        return None;
    }
    let p = (2..=m).find(|d| m.is_multiple_of(*d)).unwrap();
    let mut rest = m;
    while rest.is_multiple_of(p) {
        rest /= p;
    }
    (rest == 1).then_some(p)
}

/// Zero-based position of the prime `p` among the primes.
fn prime_index(p: usize) -> usize {
    (2..p).filter(|&q| prime_power_base(q) == Some(q)).count()
}
