//! Generators for the standard constructions, addressable by name and
//! parameters.

mod adaptive;
mod pattern;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::analysis::{joint_profile, Vector, GUARANTEE_KEY};
use crate::error::{invalid, Result};
use crate::level::LevelSet;
use crate::measure::MeasureBound;
use crate::spec::{ConstructionSpec, Limits};

pub use adaptive::{adaptive_heights, build_prop64_adaptive, in_signed_sums, signed_digits, SequenceRule, MAX_HORIZON};
pub use pattern::{
    prime_power_base, InterleavedRule, KCutRule, OffsetPatternRule, PrimePowerRule, Schedule, SkyscraperRule, Tail,
};

/// Metadata key holding the number of fibers of a cyclic extension.
pub const COPIES_KEY: &str = "copies";

fn default_two() -> u64 {
    2
}

fn default_one() -> u64 {
    1
}

fn default_true() -> bool {
    true
}

/// A builder name with its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "snake_case", deny_unknown_fields)]
pub enum BuilderParams {
    Example41 {
        v: Vec<u64>,
        #[serde(default)]
        schedule: Schedule,
    },
    Example42 {},
    Example43 {
        v: Vec<u64>,
    },
    HkSkyscraper {
        #[serde(default = "default_two")]
        c_mul: u64,
        #[serde(default)]
        c_add: u64,
    },
    Prop64Adaptive {
        a: SequenceRule,
        b: SequenceRule,
        horizon: usize,
    },
    Fact62Kcut {
        k: usize,
        #[serde(default = "default_true")]
        filler: bool,
    },
    Thm72 {
        v: Vec<u64>,
        #[serde(default = "default_one")]
        growth: u64,
    },
    Thm73 {
        v: Vec<u64>,
        #[serde(default = "default_one")]
        growth: u64,
        #[serde(default)]
        offsets: Option<Vec<u64>>,
    },
    Cor74Family {
        family: Vec<Vec<u64>>,
    },
    Fact61CyclicExtension {
        base: Box<BuilderParams>,
        copies: u64,
    },
}

impl BuilderParams {
    pub fn build(&self) -> Result<ConstructionSpec> {
        match self {
            BuilderParams::Example41 { v, schedule } => build_example41(&Vector::new(v.clone())?, *schedule),
            BuilderParams::Example42 {} => Ok(build_example42()),
            BuilderParams::Example43 { v } => build_example43(&Vector::new(v.clone())?),
            BuilderParams::HkSkyscraper { c_mul, c_add } => Ok(build_hk_skyscraper(*c_mul, *c_add)),
            BuilderParams::Prop64Adaptive { a, b, horizon } => build_prop64_adaptive(a, b, *horizon),
            BuilderParams::Fact62Kcut { k, filler } => build_fact62(*k, *filler),
            BuilderParams::Thm72 { v, growth } => build_thm72(&Vector::new(v.clone())?, *growth),
            BuilderParams::Thm73 { v, growth, offsets } => {
                build_thm73(&Vector::new(v.clone())?, *growth, offsets.as_deref())
            }
            BuilderParams::Cor74Family { family } => {
                let family = family
                    .iter()
                    .map(|v| Vector::new(v.clone()))
                    .collect::<Result<Vec<_>>>()?;
                build_cor74(&family)
            }
            BuilderParams::Fact61CyclicExtension { base, copies } => {
                if *copies == 0 {
                    return Err(invalid("a cyclic extension needs at least one copy"));
                }
                Ok(base.build()?.with_metadata(COPIES_KEY, copies.to_string()))
            }
        }
    }
}

/// Copies of `C_n` at `0, v_1 h_n, ..., v_d h_n` on scheduled stages, with
/// `v_d h_n` spacers on top; unscheduled stages are `r = 2` with `(0, 4h_n)`.
pub fn build_example41(v: &Vector, schedule: Schedule) -> Result<ConstructionSpec> {
    schedule.validate()?;
    let rule = OffsetPatternRule {
        multipliers: pattern::with_zero(v),
        tail: Tail::Multiple(v.last()),
        schedule,
    };
    Ok(ConstructionSpec::from_rule(rule)
        .with_name("example41")
        .with_metadata("v", v.to_string())
        .with_metadata("schedule", format!("every {} from {}", schedule.every, schedule.phase))
        .with_metadata(
            GUARANTEE_KEY,
            format!("copies at (0,{}) * h_n on every scheduled stage", join(v.components())),
        ))
}

/// `r = 4`, spacers `(0, 3h_n, h_n, 8h_n)`: copies at `{0, 1, 5, 7} h_n`,
/// `h_{n+1} = 16 h_n`.
pub fn build_example42() -> ConstructionSpec {
    ConstructionSpec::from_rule(OffsetPatternRule {
        multipliers: vec![0, 1, 5, 7],
        tail: Tail::Multiple(8),
        schedule: Schedule::default(),
    })
    .with_name("example42")
}

/// Smallest integer `M` with `M >= (v_d / v_1)(v_d + 1) v_d` and
/// `M >= d (v_d + 1) v_1 / (v_d - v_1 (d - 1))`.
pub fn example43_gap(v: &Vector) -> Result<u64> {
    let d = v.dim() as u64;
    let (v1, vd) = (v.first(), v.last());
    if vd < d * v1 {
        return Err(invalid(format!("needs v_d / v_1 >= d, but {vd} / {v1} < {d}")));
    }
    let r = |n: u64, m: u64| BigRational::new(n.into(), m.into());
    let first = r(vd * (vd + 1) * vd, v1);
    let second = r(d * (vd + 1) * v1, vd - v1 * (d - 1));
    let m = first.max(second).ceil().to_integer();
    m.to_u64().ok_or_else(|| invalid("gap overflows"))
}

/// `r = 2d` interleaving copies with `(v_i - 1) h_n` and `M h_n` gaps, topped
/// by a spacer block as tall as everything below it.
pub fn build_example43(v: &Vector) -> Result<ConstructionSpec> {
    let gap = example43_gap(v)?;
    Ok(ConstructionSpec::from_rule(InterleavedRule { v: v.clone(), gap })
        .with_name("example43")
        .with_metadata("v", v.to_string())
        .with_metadata("M", gap.to_string()))
}

/// `r = 2`, spacers `(0, c_n)` with `c_n = c_mul h_n + c_add`.
pub fn build_hk_skyscraper(c_mul: u64, c_add: u64) -> ConstructionSpec {
    ConstructionSpec::from_rule(SkyscraperRule { mul: c_mul, add: c_add })
        .with_name("hk_skyscraper")
        .with_metadata("c", format!("{c_mul} h_n + {c_add}"))
        .with_metadata(GUARANTEE_KEY, "copies at {0, h_n} on every stage")
}

/// `r = k` with no spacers on even stages; odd stages are `r = 2` with
/// `(0, 4h_n)` unless `filler` is off.
pub fn build_fact62(k: usize, filler: bool) -> Result<ConstructionSpec> {
    if k < 2 {
        return Err(invalid(format!("cut count must be at least 2, got {k}")));
    }
    Ok(ConstructionSpec::from_rule(KCutRule { k, filler })
        .with_name("fact62_kcut")
        .with_metadata("k", k.to_string())
        .with_metadata("filler", filler.to_string()))
}

/// Copies at `{0, v_1 h_m, ..., v_d h_m}` on every stage, with tails making
/// `h_{m+1} = (m + growth) H_m + 1`, `H_m = sum_{k <= m} sum_i v_i h_k`.
pub fn build_thm72(v: &Vector, growth: u64) -> Result<ConstructionSpec> {
    if growth == 0 {
        return Err(invalid("growth offset must be at least 1"));
    }
    Ok(thm72_spec(v, pattern::with_zero(v), growth)
        .with_name("thm72")
        .with_metadata(
            GUARANTEE_KEY,
            format!("copies at (0,{}) * h_m on every stage", join(v.components())),
        ))
}

fn thm72_spec(v: &Vector, multipliers: Vec<u64>, growth: u64) -> ConstructionSpec {
    ConstructionSpec::from_rule(OffsetPatternRule {
        multipliers,
        tail: Tail::Growth {
            offset: growth,
            weight: v.sum(),
        },
        schedule: Schedule::default(),
    })
    .with_metadata("v", v.to_string())
    .with_metadata("growth", format!("h_(m+1) = (m + {growth}) H_m + 1"))
}

fn join(xs: &[u64]) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

/// How many terms `n = h_m` the mirrored pattern is checked on.
const THM73_CHECK_TERMS: usize = 4;

/// Copies at `o_j = (v_d - v_{d-j}) h_n` (`v_0 = 0`), or at `offsets * h_n`
/// when given. The pattern is checked on the base level along `n = h_m`,
/// `m <= 4`; when some joint measure there is zero the builder falls back to
/// the `{0, v_1, ..., v_d}` pattern and records the substitution.
pub fn build_thm73(v: &Vector, growth: u64, offsets: Option<&[u64]>) -> Result<ConstructionSpec> {
    if growth == 0 {
        return Err(invalid("growth offset must be at least 1"));
    }
    let mirrored: Vec<u64> = match offsets {
        Some(q) => {
            pattern::check_multipliers(q)?;
            q.to_vec()
        }
        None => {
            let vd = v.last();
            std::iter::once(0)
                .chain(v.components().iter().rev().skip(1).map(|&c| vd - c))
                .chain(std::iter::once(vd))
                .collect()
        }
    };
    let spec = thm72_spec(v, mirrored.clone(), growth).with_name("thm73");
    let limits = Limits::default();
    let tower = spec.tower(THM73_CHECK_TERMS)?;
    let ns: Vec<BigUint> = tower.heights().to_vec();
    let series = joint_profile(&spec, &LevelSet::base(), v, &ns, &limits)?;
    let observed = series
        .entries
        .iter()
        .map(|e| e.value.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let positive = series.entries.iter().all(|e| !e.value.lower.is_zero());
    if positive {
        return Ok(spec
            .with_metadata("pattern", format!("({})", join(&mirrored)))
            .with_metadata("observed_joint_at_heights", observed)
            .with_metadata(
                GUARANTEE_KEY,
                format!("copies at ({}) * h_n on every stage", join(&mirrored)),
            ));
    }
    let fallback = pattern::with_zero(v);
    Ok(thm72_spec(v, fallback.clone(), growth)
        .with_name("thm73")
        .with_metadata("pattern", format!("({})", join(&fallback)))
        .with_metadata(
            "pattern_fallback",
            format!(
                "({}) gave joint measures [{observed}] along n = h_m; replaced",
                join(&mirrored)
            ),
        )
        .with_metadata(
            GUARANTEE_KEY,
            format!("copies at ({}) * h_n on every stage", join(&fallback)),
        ))
}

/// Stage `m = p^i > 1` uses the pattern of the family vector assigned to
/// the prime `p`, primes taken in order and cycling through the family.
pub fn build_cor74(family: &[Vector]) -> Result<ConstructionSpec> {
    if family.is_empty() {
        return Err(invalid("family must not be empty"));
    }
    let rule = PrimePowerRule {
        family: family.to_vec(),
    };
    let mut assignment = Vec::new();
    let mut primes = (2usize..).filter(|&q| prime_power_base(q) == Some(q));
    for v in family {
        assignment.push(format!("{}^i -> {v}", primes.next().unwrap()));
    }
    Ok(ConstructionSpec::from_rule(rule)
        .with_name("cor74_family")
        .with_metadata("schedule", assignment.join("; "))
        .with_metadata(
            GUARANTEE_KEY,
            "each vector's pattern recurs at every power of its prime",
        ))
}

/// `mu'(A ∩ T'^n A)` for `A` inside one fiber of the `k`-point cyclic
/// extension: the base measure at `n / k` when `k` divides `n`, else zero.
pub fn cyclic_extension_measure(
    spec: &ConstructionSpec,
    set: &LevelSet,
    n: &BigUint,
    copies: u64,
    limits: &Limits,
) -> Result<MeasureBound> {
    if copies == 0 {
        return Err(invalid("a cyclic extension needs at least one copy"));
    }
    let (q, r) = n.div_rem(&BigUint::from(copies));
    if !r.is_zero() {
        return Ok(MeasureBound::zero());
    }
    let tower = spec.tower(spec.depth_within(limits).max(set.column()))?;
    let shifts = [q];
    let res = tower.resolve_depth(set, &shifts)?;
    tower.intersection_measure(set, &shifts, res.depth, limits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(xs: &[u64]) -> Vec<BigUint> {
        xs.iter().map(|&x| BigUint::from(x)).collect()
    }

    fn v(xs: &[u64]) -> Vector {
        Vector::new(xs.to_vec()).unwrap()
    }

    #[test]
    fn example41_offsets() {
        let t = build_example41(&v(&[2, 5]), Schedule::default())
            .unwrap()
            .tower(2)
            .unwrap();
        assert_eq!(t.stage(0).spacers(), big(&[1, 2, 5]).as_slice());
        assert_eq!(
            t.offsets(1),
            (big(&[0, 2, 5]).iter().map(|x| x * t.height(1)).collect::<Vec<_>>())
        );
        let t = build_example41(&v(&[1, 2]), Schedule::default())
            .unwrap()
            .tower(1)
            .unwrap();
        assert_eq!(t.stage(0).spacers(), big(&[0, 0, 2]).as_slice());
        let t = build_example41(&v(&[1]), Schedule::default())
            .unwrap()
            .tower(1)
            .unwrap();
        assert_eq!(t.offsets(0), big(&[0, 1]).as_slice());
    }

    #[test]
    fn example41_filler_stages() {
        let t = build_example41(&v(&[1, 2]), Schedule { every: 2, phase: 0 })
            .unwrap()
            .tower(3)
            .unwrap();
        assert_eq!(t.stage(1).cuts(), 2);
        assert_eq!(t.stage(1).spacers()[1], t.height(1) * 4u32);
        assert_eq!(t.stage(2).cuts(), 3);
    }

    #[test]
    fn example42_heights_and_bases() {
        let t = build_example42().tower(3).unwrap();
        assert_eq!(t.heights(), big(&[1, 16, 256, 4096]).as_slice());
        assert_eq!(t.offsets(2), big(&[0, 256, 1280, 1792]).as_slice());
    }

    #[test]
    fn example43_gap_and_stage() {
        assert_eq!(example43_gap(&v(&[1, 2])).unwrap(), 12);
        let t = build_example43(&v(&[1, 2])).unwrap().tower(1).unwrap();
        assert_eq!(t.stage(0).spacers(), big(&[0, 12, 1, 17]).as_slice());
        assert!(build_example43(&v(&[1, 3])).is_ok());
        assert!(build_example43(&v(&[2, 3])).is_err());
    }

    #[test]
    fn skyscraper_heights() {
        let t = build_hk_skyscraper(2, 0).tower(3).unwrap();
        assert_eq!(t.heights(), big(&[1, 4, 16, 64]).as_slice());
        let t = build_hk_skyscraper(0, 0).tower(3).unwrap();
        assert_eq!(t.heights(), big(&[1, 2, 4, 8]).as_slice());
        let t = build_hk_skyscraper(2, 1).tower(2).unwrap();
        assert_eq!(t.heights(), big(&[1, 5, 21]).as_slice());
    }

    #[test]
    fn kcut_alternates() {
        let t = build_fact62(3, true).unwrap().tower(3).unwrap();
        assert_eq!(t.offsets(0), big(&[0, 1, 2]).as_slice());
        assert_eq!(t.stage(1).cuts(), 2);
        assert_eq!(
            t.offsets(2),
            (0..3u64).map(|i| t.height(2) * i).collect::<Vec<_>>().as_slice()
        );
        let odo = build_fact62(2, false).unwrap().tower(3).unwrap();
        assert_eq!(odo.heights(), big(&[1, 2, 4, 8]).as_slice());
        assert!(build_fact62(1, true).is_err());
    }

    #[test]
    fn thm72_first_height() {
        let t = build_thm72(&v(&[1, 2]), 1).unwrap().tower(1).unwrap();
        // H_0 = 3, h_1 = 1 * 3 + 1
        assert_eq!(t.height(1), &BigUint::from(4u32));
        assert_eq!(t.offsets(0), big(&[0, 1, 2]).as_slice());
    }

    #[test]
    fn thm73_patterns() {
        let s = build_thm73(&v(&[1, 2]), 1, None).unwrap();
        assert_eq!(s.metadata()["pattern"], "(0,1,2)");
        assert!(!s.metadata().contains_key("pattern_fallback"));
        let s = build_thm73(&v(&[1, 3]), 1, None).unwrap();
        assert!(s.metadata()["pattern_fallback"].starts_with("(0,2,3)"));
        assert_eq!(s.metadata()["pattern"], "(0,1,3)");
        let s = build_thm73(&v(&[4]), 1, None).unwrap();
        assert_eq!(s.metadata()["pattern"], "(0,4)");
    }

    #[test]
    fn cor74_schedule() {
        let s = build_cor74(&[v(&[1, 2]), v(&[1, 3])]).unwrap();
        assert_eq!(s.metadata()["schedule"], "2^i -> (1,2); 3^i -> (1,3)");
        let t = s.tower(10).unwrap();
        for (m, cuts) in [(0, 2), (1, 2), (2, 3), (3, 3), (4, 3), (6, 2), (8, 3), (9, 3)] {
            assert_eq!(t.stage(m).cuts(), cuts, "stage {m}");
        }
        assert_eq!(t.offsets(2)[2], t.height(2) * 2u32);
        assert_eq!(t.offsets(3)[2], t.height(3) * 3u32);
        assert!(build_cor74(&[]).is_err());
    }

    #[test]
    fn cyclic_extension() {
        let hk = build_hk_skyscraper(2, 0);
        let l = Limits::default();
        let a = LevelSet::base();
        assert_eq!(
            cyclic_extension_measure(&hk, &a, &BigUint::from(3u32), 2, &l).unwrap(),
            MeasureBound::zero()
        );
        assert_eq!(
            cyclic_extension_measure(&hk, &a, &BigUint::zero(), 2, &l).unwrap(),
            MeasureBound::exact(BigRational::from_integer(1.into()))
        );
        let h2 = BigUint::from(16u32);
        let third = cyclic_extension_measure(&hk, &a, &(&h2 * 3u32), 3, &l).unwrap();
        assert!(third.lower >= BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn cyclic_params_record_copies() {
        let p = BuilderParams::Fact61CyclicExtension {
            base: Box::new(BuilderParams::HkSkyscraper { c_mul: 2, c_add: 0 }),
            copies: 2,
        };
        assert_eq!(p.build().unwrap().metadata()[COPIES_KEY], "2");
    }
}
