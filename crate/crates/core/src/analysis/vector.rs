use std::fmt;

use num_bigint::BigUint;

use crate::error::{invalid, Result};

/// A shift-multiplier vector `v_1 < v_2 < ... < v_d`, all positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vector(Vec<u64>);

impl Vector {
    pub fn new(components: Vec<u64>) -> Result<Self> {
        if components.is_empty() {
            return Err(invalid("a vector needs at least one component"));
        }
        if components[0] == 0 {
            return Err(invalid("vector components must be positive"));
        }
        if !components.windows(2).all(|w| w[0] < w[1]) {
            return Err(invalid(format!(
                "vector components must be strictly increasing, got {components:?}"
            )));
        }
        Ok(Vector(components))
    }

    pub fn components(&self) -> &[u64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn first(&self) -> u64 {
        self.0[0]
    }

    pub fn last(&self) -> u64 {
        self.0[self.0.len() - 1]
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().sum()
    }

    /// `(v_1 n, ..., v_d n)`.
    pub fn shifts(&self, n: &BigUint) -> Vec<BigUint> {
        self.0.iter().map(|&c| n * c).collect()
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// How a raw vector was brought to standard form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reduction {
    /// Already positive and increasing.
    Unchanged,
    /// Positive; only reordered.
    Sorted,
    /// Mixed signs: `w = {v_i - p : v_i != p} ∪ {-p}` for the most negative
    /// component `p`. The joint intersection for `v` on `A` equals the one
    /// for `w` on `A`, by applying `T^{-p n}` to every set.
    Shifted { pivot: i64 },
}

impl fmt::Display for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reduction::Unchanged => write!(f, "already in standard form"),
            Reduction::Sorted => write!(f, "components sorted"),
            Reduction::Shifted { pivot } => {
                write!(f, "shifted by {}: w = (v_i - ({pivot})) ∪ ({})", -pivot, -pivot)
            }
        }
    }
}

/// Bring a vector of nonzero distinct integers to standard form.
pub fn normalize_vector(raw: &[i64]) -> Result<(Vector, Reduction)> {
    if raw.is_empty() {
        return Err(invalid("a vector needs at least one component"));
    }
    if raw.contains(&0) {
        return Err(invalid("vector components must be nonzero"));
    }
    let mut sorted = raw.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(invalid(format!(
            "component {} repeats; redundant vectors are not in standard form",
            w[0]
        )));
    }
    let pivot = sorted[0];
    if pivot > 0 {
        let reduction = if sorted == raw {
            Reduction::Unchanged
        } else {
            Reduction::Sorted
        };
        let v = Vector::new(sorted.iter().map(|&c| c as u64).collect())?;
        return Ok((v, reduction));
    }
    let mut w: Vec<i128> = sorted[1..].iter().map(|&c| c as i128 - pivot as i128).collect();
    w.push(-(pivot as i128));
    // v_i - p = -p only when v_i = 0, so distinct input stays distinct
    w.sort_unstable();
    let comps = w
        .into_iter()
        .map(|c| u64::try_from(c).map_err(|_| invalid("reduced component overflows")))
        .collect::<Result<Vec<u64>>>()?;
    Ok((Vector::new(comps)?, Reduction::Shifted { pivot }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_vectors_pass_through() {
        let (v, r) = normalize_vector(&[1, 2]).unwrap();
        assert_eq!(v.components(), &[1, 2]);
        assert_eq!(r, Reduction::Unchanged);
        let (v, r) = normalize_vector(&[3, 1]).unwrap();
        assert_eq!(v.components(), &[1, 3]);
        assert_eq!(r, Reduction::Sorted);
    }

    #[test]
    fn mixed_signs_shift_by_the_pivot() {
        let (v, r) = normalize_vector(&[-2, 1, 3]).unwrap();
        assert_eq!(v.components(), &[2, 3, 5]);
        assert_eq!(r, Reduction::Shifted { pivot: -2 });
        let (v, _) = normalize_vector(&[-1, 1]).unwrap();
        assert_eq!(v.components(), &[1, 2]);
        let (v, _) = normalize_vector(&[-3]).unwrap();
        assert_eq!(v.components(), &[3]);
    }

    #[test]
    fn redundant_vectors_are_rejected() {
        assert!(normalize_vector(&[1, 1]).is_err());
        assert!(normalize_vector(&[0, 1]).is_err());
        assert!(normalize_vector(&[-2, 3, -2]).is_err());
        assert!(normalize_vector(&[]).is_err());
    }

    #[test]
    fn vector_guards() {
        assert!(Vector::new(vec![2, 1]).is_err());
        assert!(Vector::new(vec![0, 1]).is_err());
        assert_eq!(Vector::new(vec![2, 5]).unwrap().to_string(), "(2,5)");
    }
}
