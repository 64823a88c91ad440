#![allow(dead_code)]

use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;
use rankone_core::{ConstructionSpec, Stage, Vector};

pub fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

pub fn signed(xs: &[BigUint]) -> Vec<BigInt> {
    xs.iter().map(|x| BigInt::from(x.clone())).collect()
}

pub fn vector(xs: &[u64]) -> Vector {
    Vector::new(xs.to_vec()).unwrap()
}

/// Spacer lists of random small stages: 2 or 3 cuts, 0..=3 spacers each.
pub fn stage_lists(depth: usize) -> impl Strategy<Value = Vec<Vec<u64>>> {
    prop::collection::vec(prop::collection::vec(0u64..=3, 2..=3), depth)
}

pub fn explicit(lists: &[Vec<u64>]) -> ConstructionSpec {
    let stages = lists.iter().map(|s| Stage::from_u64(s).unwrap()).collect();
    ConstructionSpec::explicit(stages).unwrap()
}

/// Strictly increasing positive vectors of dimension `1..=dim` with
/// components at most `max`.
pub fn vectors(max: u64, dim: usize) -> impl Strategy<Value = Vector> {
    prop::collection::btree_set(1..=max, 1..=dim).prop_map(|s| Vector::new(s.into_iter().collect()).unwrap())
}
