//! Decision procedures for the two vector orders.
//!
//! `v <=_p w`: for some positive `n, m` and `c` in `{0} ∪ {m w_b}`, every
//! component of `n v` is a component of `m w - c`.
//!
//! `v <=_m w`: for some positive `n, m`, every `n v_i` is a signed subset sum
//! `sum_{j in I(i)} m w_j - sum_{j in J(i)} m w_j` with `I(i)`, `J(i)` disjoint.

use std::collections::BTreeMap;

use num_integer::Integer;

use crate::analysis::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    LeP,
    LeM,
}

/// Zero-based index sets of one signed subset sum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SignedIndexSets {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Assignment {
    /// `n v_i = m w_{targets[i]} - c`; `base` is `b` when `c = m w_b`.
    Injection { targets: Vec<usize>, base: Option<usize> },
    /// `n v_i = m (sum over plus - sum over minus)`.
    SignedSums(Vec<SignedIndexSets>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderWitness {
    pub relation: Relation,
    pub n: u64,
    pub m: u64,
    pub c: u64,
    pub assignment: Assignment,
}

/// Reduced `num / den`.
fn reduced(num: u64, den: u64) -> (u64, u64) {
    let g = num.gcd(&den);
    (num / g, den / g)
}

pub fn decide_le_p(v: &Vector, w: &Vector) -> (bool, Option<OrderWitness>) {
    let (vs, ws) = (v.components(), w.components());
    if vs.len() > ws.len() {
        return (false, None);
    }
    let index: BTreeMap<u64, usize> = ws.iter().enumerate().map(|(j, &x)| (x, j)).collect();
    let bases = std::iter::once(None).chain((0..ws.len()).map(Some));
    let mut best: Option<OrderWitness> = None;
    for base in bases {
        let wb = base.map_or(0, |b| ws[b]);
        for &wj in ws.iter().filter(|&&x| x > wb) {
            // n / m = (w_j - w_b) / v_1, forced by the image of v_1
            let (n, m) = reduced(wj - wb, vs[0]);
            let targets: Option<Vec<usize>> = vs
                .iter()
                .map(|&vi| {
                    let scaled = (n as u128) * (vi as u128);
                    if !scaled.is_multiple_of(m as u128) {
                        return None;
                    }
                    let image = u64::try_from(scaled / m as u128).ok()?.checked_add(wb)?;
                    index.get(&image).copied()
                })
                .collect();
            let Some(targets) = targets else { continue };
            let cand = OrderWitness {
                relation: Relation::LeP,
                n,
                m,
                c: m * wb,
                assignment: Assignment::Injection { targets, base },
            };
            if best.as_ref().is_none_or(|b| (cand.m, cand.n, cand.c) < (b.m, b.n, b.c)) {
                best = Some(cand);
            }
        }
    }
    (best.is_some(), best)
}

/// Every signed subset sum of `w`, mapped to the first index sets found.
fn signed_sums(w: &[u64]) -> BTreeMap<i128, SignedIndexSets> {
    let mut out = BTreeMap::new();
    let total = 3usize.pow(w.len() as u32);
    for code in 0..total {
        let mut c = code;
        let mut sets = SignedIndexSets::default();
        let mut sum = 0i128;
        for (j, &x) in w.iter().enumerate() {
            match c % 3 {
                1 => {
                    sets.plus.push(j);
                    sum += x as i128;
                }
                2 => {
                    sets.minus.push(j);
                    sum -= x as i128;
                }
                _ => {}
            }
            c /= 3;
        }
        out.entry(sum).or_insert(sets);
    }
    out
}

/// Returns the witness with the smallest ratio `n / m`.
pub fn decide_le_m(v: &Vector, w: &Vector) -> (bool, Option<OrderWitness>) {
    let vs = v.components();
    let sums = signed_sums(w.components());
    for &s in sums.keys().filter(|&&s| s > 0) {
        // n / m = s / v_1
        let (n, m) = reduced(s as u64, vs[0]);
        let sets: Option<Vec<SignedIndexSets>> = vs
            .iter()
            .map(|&vi| {
                let scaled = n as i128 * vi as i128;
                if scaled % m as i128 != 0 {
                    return None;
                }
                sums.get(&(scaled / m as i128)).cloned()
            })
            .collect();
        if let Some(sets) = sets {
            let witness = OrderWitness {
                relation: Relation::LeM,
                n,
                m,
                c: 0,
                assignment: Assignment::SignedSums(sets),
            };
            return (true, Some(witness));
        }
    }
    (false, None)
}

/// Substitutes a witness into the defining equations.
pub fn verify_witness(v: &Vector, w: &Vector, witness: &OrderWitness) -> bool {
    let (vs, ws) = (v.components(), w.components());
    let (n, m) = (witness.n as i128, witness.m as i128);
    if n <= 0 || m <= 0 {
        return false;
    }
    match (&witness.relation, &witness.assignment) {
        (Relation::LeP, Assignment::Injection { targets, base }) => {
            let c = match base {
                None => 0,
                Some(b) if *b < ws.len() => m * ws[*b] as i128,
                Some(_) => return false,
            };
            if c != witness.c as i128 || targets.len() != vs.len() {
                return false;
            }
            let mut seen = targets.clone();
            seen.sort_unstable();
            seen.dedup();
            seen.len() == targets.len()
                && vs
                    .iter()
                    .zip(targets)
                    .all(|(&vi, &j)| j < ws.len() && n * vi as i128 == m * ws[j] as i128 - c)
        }
        (Relation::LeM, Assignment::SignedSums(sets)) => {
            sets.len() == vs.len()
                && witness.c == 0
                && vs.iter().zip(sets).all(|(&vi, s)| {
                    let disjoint = s.plus.iter().all(|j| !s.minus.contains(j));
                    let distinct = |xs: &[usize]| {
                        let mut ys = xs.to_vec();
                        ys.sort_unstable();
                        ys.dedup();
                        ys.len() == xs.len() && ys.iter().all(|&j| j < ws.len())
                    };
                    let value: i128 = s.plus.iter().map(|&j| ws[j] as i128).sum::<i128>()
                        - s.minus.iter().map(|&j| ws[j] as i128).sum::<i128>();
                    disjoint && distinct(&s.plus) && distinct(&s.minus) && n * vi as i128 == m * value
                })
        }
        _ => false,
    }
}
