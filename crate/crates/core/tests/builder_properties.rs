mod common;

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use common::{big, explicit, stage_lists, vector, vectors};
use rankone_core::analysis::joint_profile;
use rankone_core::builders::{
    adaptive_heights, build_cor74, build_example41, build_example42, build_example43, build_fact62,
    build_hk_skyscraper, build_prop64_adaptive, build_thm72, build_thm73, cyclic_extension_measure, in_signed_sums,
    Schedule, SequenceRule,
};
use rankone_core::{Level, LevelSet, Limits};

fn sequences() -> impl Strategy<Value = SequenceRule> {
    prop_oneof![
        (1u32..=3).prop_map(|exp| SequenceRule::Power { exp }),
        (2u64..=3).prop_map(|base| SequenceRule::Exponential { base }),
        (1u64..=5, 0u64..=4).prop_map(|(slope, intercept)| SequenceRule::Linear { slope, intercept }),
    ]
}

#[test]
fn builders_satisfy_the_height_recurrence() {
    let specs = vec![
        build_example41(&vector(&[1, 3]), Schedule { every: 2, phase: 1 }).unwrap(),
        build_example42(),
        build_example43(&vector(&[1, 3])).unwrap(),
        build_hk_skyscraper(2, 0),
        build_fact62(3, true).unwrap(),
        build_thm72(&vector(&[1, 2]), 1).unwrap(),
        build_thm73(&vector(&[1, 2]), 1, None).unwrap(),
        build_cor74(&[vector(&[1, 2]), vector(&[1, 3])]).unwrap(),
        build_prop64_adaptive(
            &SequenceRule::Power { exp: 2 },
            &SequenceRule::Exponential { base: 2 },
            6,
        )
        .unwrap(),
    ];
    for spec in specs {
        let tower = spec.tower(6).unwrap();
        for n in 0..6 {
            let st = tower.stage(n);
            let expect = tower.height(n) * st.cuts() + st.spacers().iter().sum::<BigUint>();
            assert_eq!(tower.height(n + 1), &expect, "{} at stage {n}", spec.name());
        }
    }
}

#[test]
fn example42_windows_are_zero_pointwise() {
    let spec = build_example42();
    let v = vector(&[1, 2]);
    let ms: Vec<BigUint> = (1..=4096u64).map(big).collect();
    let series = joint_profile(&spec, &LevelSet::base(), &v, &ms, &Limits::default()).unwrap();
    assert!(series.all_exact());
    assert!(series.entries.iter().all(|e| e.value.lower.is_zero()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn example41_offsets_reconstruct_the_pattern(v in vectors(5, 3), every in 1usize..=3, phase in 0usize..=2) {
        let schedule = Schedule { every, phase };
        let tower = build_example41(&v, schedule).unwrap().tower(5).unwrap();
        for n in (0..5).filter(|&n| schedule.applies(n)) {
            let h = tower.height(n);
            let expect: Vec<BigUint> = std::iter::once(0).chain(v.components().iter().copied()).map(|q| h * q).collect();
            prop_assert_eq!(tower.offsets(n), expect.as_slice());
        }
    }

    #[test]
    fn adaptive_heights_have_unique_signed_sums(a in sequences(), b in sequences(), horizon in 0usize..=4) {
        let hs = adaptive_heights(&a, &b, horizon).unwrap();
        let mut seen = BTreeMap::new();
        for code in 0..3u32.pow(hs.len() as u32) {
            let mut c = code;
            let mut z = BigInt::zero();
            for h in &hs {
                z += BigInt::from(h.clone()) * ((c % 3) as i32 - 1);
                c /= 3;
            }
            prop_assert!(seen.insert(z, code).is_none());
        }
    }

    #[test]
    fn adaptive_heights_avoid_full_triples(a in sequences(), b in sequences(), horizon in 1usize..=5) {
        let hs = adaptive_heights(&a, &b, horizon).unwrap();
        let top = &hs[horizon];
        for k in 1u64.. {
            let (ak, bk) = (a.term(k).unwrap(), b.term(k).unwrap());
            let sum = &ak + &bk;
            if &sum > top {
                break;
            }
            let all = in_signed_sums(&ak, &hs) && in_signed_sums(&bk, &hs) && in_signed_sums(&sum, &hs);
            prop_assert!(!all, "k = {}: {}, {}, {} all differences", k, ak, bk, sum);
        }
    }

    #[test]
    fn thm72_growth_ratio_increases(v in vectors(4, 3), growth in 1u64..=3) {
        let tower = build_thm72(&v, growth).unwrap().tower(6).unwrap();
        let mut last: Option<BigRational> = None;
        for m in 0..6 {
            let big_h: BigUint = tower.heights()[..=m].iter().sum::<BigUint>() * v.sum();
            let ratio = BigRational::new(tower.height(m + 1).clone().into(), big_h.into());
            prop_assert!(ratio >= BigRational::from_integer((m as u64 + 1).into()));
            if let Some(prev) = &last {
                prop_assert!(&ratio > prev);
            }
            last = Some(ratio);
        }
    }

    #[test]
    fn single_copy_extension_is_the_base(lists in stage_lists(10), pick in any::<u64>(), n in 0u64..40) {
        let spec = explicit(&lists);
        let tower = spec.tower(1).unwrap();
        let set = LevelSet::single(&Level::new(1, pick % tower.height(1)));
        let limits = Limits { cardinality_budget: 1 << 16, depth_cap: 10 };
        let ext = cyclic_extension_measure(&spec, &set, &big(n), 1, &limits).unwrap();
        let base = joint_profile(&spec, &set, &vector(&[1]), &[big(n.max(1))], &limits).unwrap();
        if n > 0 {
            prop_assert_eq!(&ext, &base.entries[0].value);
        } else {
            prop_assert_eq!(ext.value(), Some(&tower.measure(&set)));
        }
    }
}
