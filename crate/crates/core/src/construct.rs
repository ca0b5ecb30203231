//! Magic labelings as mixed-radix numbers built from digit labelings.
//!
//! Three balanced binary labelings and one ternary labeling give every vertex
//! a digit tuple in `{0,1}³ × {0,1,2}`. When the 24 tuples are all distinct,
//! reading them in any mixed radix with three 2s and one 3 numbers the
//! vertices `0..24`. Each cell holds three ones of every binary digit and two
//! of each trit, so every cell sums to the same value.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::incidence::build_24cell;
pub use crate::labelings::TritPerm;
use crate::labelings::{
    enumerate_parity_binary, permute_trits, ternary_16cell, BinaryLabeling, TernaryLabeling, VERTICES,
};
use crate::symmetry::{count_orbits, SymmetryGroup};

/// Which of the four digit positions (0 = most significant) holds the trit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightScheme(u8);

impl WeightScheme {
    pub fn new(ternary_position: u8) -> Result<Self> {
        if ternary_position > 3 {
            return Err(Error::InvalidPermutation(format!("ternary position {ternary_position} outside 0..=3")));
        }
        Ok(WeightScheme(ternary_position))
    }

    pub fn all() -> [WeightScheme; 4] {
        [0, 1, 2, 3].map(WeightScheme)
    }

    pub fn ternary_position(self) -> u8 {
        self.0
    }

    /// Radix of each digit position, most significant first.
    pub fn radices(self) -> [u32; 4] {
        std::array::from_fn(|i| if i == self.0 as usize { 3 } else { 2 })
    }

    /// Place values of each digit position, most significant first.
    pub fn weights(self) -> [u32; 4] {
        let radices = self.radices();
        let mut w = [1u32; 4];
        for i in (0..3).rev() {
            w[i] = w[i + 1] * radices[i + 1];
        }
        w
    }

    /// `b1, b2, b3` fill the binary positions in order, the trit takes its slot.
    pub fn value(self, b: [u8; 3], t: u8) -> u32 {
        let mut binary = b.into_iter();
        self.weights()
            .iter()
            .enumerate()
            .map(|(i, &w)| {
                let d = if i == self.0 as usize { t } else { binary.next().unwrap() };
                w * u32::from(d)
            })
            .sum()
    }
}

/// Per-vertex digit tuples of a valid superimposition, stored as the
/// mixed-radix code `12·b1 + 6·b2 + 3·b3 + t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DigitMap([u8; VERTICES]);

impl DigitMap {
    /// `(b1, b2, b3, t)` at the 0-based vertex `v`.
    pub fn tuple(&self, v: usize) -> ([u8; 3], u8) {
        let c = self.0[v];
        ([c / 12, c / 6 % 2, c / 3 % 2], c % 3)
    }

    pub fn codes(&self) -> &[u8; VERTICES] {
        &self.0
    }
}

/// The digit map, if the 24 vertex tuples are pairwise distinct.
pub fn superimpose(
    b1: BinaryLabeling,
    b2: BinaryLabeling,
    b3: BinaryLabeling,
    t: &TernaryLabeling,
) -> Option<DigitMap> {
    let mut codes = [0u8; VERTICES];
    let mut seen = 0u32;
    for (v, code) in codes.iter_mut().enumerate() {
        *code = 12 * b1.digit(v) + 6 * b2.digit(v) + 3 * b3.digit(v) + t.digit(v);
        if seen >> *code & 1 == 1 {
            return None;
        }
        seen |= 1 << *code;
    }
    Some(DigitMap(codes))
}

pub const BALANCED_POOL_SIZE: usize = 64;

pub type Triple = (BinaryLabeling, BinaryLabeling, BinaryLabeling);

/// All ordered triples from `pool` whose superimposition with `t` is valid,
/// in lexicographic order of pool positions.
pub fn enumerate_triples(pool: &[BinaryLabeling], t: &TernaryLabeling) -> Result<Vec<Triple>> {
    if pool.len() != BALANCED_POOL_SIZE {
        return Err(Error::PoolMismatch { expected: BALANCED_POOL_SIZE, actual: pool.len() });
    }
    let mut out = Vec::new();
    for &b1 in pool {
        for &b2 in pool {
            if b2 == b1 {
                continue;
            }
            for &b3 in pool {
                if superimpose(b1, b2, b3, t).is_some() {
                    out.push((b1, b2, b3));
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Provenance {
    pub b1: BinaryLabeling,
    pub b2: BinaryLabeling,
    pub b3: BinaryLabeling,
    pub trit_perm: TritPerm,
    pub scheme: WeightScheme,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MagicLabeling {
    pub labels: Vec<u32>,
    #[serde(flatten, default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl MagicLabeling {
    pub fn labels_i64(&self) -> Vec<i64> {
        self.labels.iter().map(|&l| i64::from(l)).collect()
    }
}

/// `label(v) = Σ weight·digit + 1`. `t` is used as given; provenance records
/// `TritPerm::IDENTITY` (see [`compose_permuted`] for the relabeled form).
pub fn compose(
    b1: BinaryLabeling,
    b2: BinaryLabeling,
    b3: BinaryLabeling,
    t: &TernaryLabeling,
    w: WeightScheme,
) -> Result<MagicLabeling> {
    compose_inner(b1, b2, b3, t, TritPerm::IDENTITY, w)
}

/// [`compose`] with the trits of `base` relabeled by `pi` first.
pub fn compose_permuted(
    b1: BinaryLabeling,
    b2: BinaryLabeling,
    b3: BinaryLabeling,
    base: &TernaryLabeling,
    pi: TritPerm,
    w: WeightScheme,
) -> Result<MagicLabeling> {
    compose_inner(b1, b2, b3, &permute_trits(base, pi), pi, w)
}

fn compose_inner(
    b1: BinaryLabeling,
    b2: BinaryLabeling,
    b3: BinaryLabeling,
    t: &TernaryLabeling,
    pi: TritPerm,
    w: WeightScheme,
) -> Result<MagicLabeling> {
    let digits = superimpose(b1, b2, b3, t).ok_or(Error::InvalidSuperimposition)?;
    let labels = (0..VERTICES)
        .map(|v| {
            let (b, t) = digits.tuple(v);
            w.value(b, t) + 1
        })
        .collect();
    Ok(MagicLabeling { labels, provenance: Some(Provenance { b1, b2, b3, trit_perm: pi, scheme: w }) })
}

/// The whole family: every trit relabeling, valid ordered triple and scheme.
#[derive(Clone, Debug)]
pub struct Construction {
    /// Valid ordered triples for the unpermuted ternary labeling.
    pub triples: Vec<Triple>,
    /// Valid triple count for each entry of [`TritPerm::all`].
    pub triples_per_perm: [usize; 6],
    /// Sorted by labels, then provenance.
    pub labelings: Vec<MagicLabeling>,
}

impl Construction {
    pub fn raw(&self) -> usize {
        self.labelings.len()
    }

    pub fn distinct(&self) -> usize {
        self.labelings.windows(2).filter(|w| w[0].labels != w[1].labels).count()
            + usize::from(!self.labelings.is_empty())
    }

    /// Distinct label sequences, sorted.
    pub fn distinct_labels(&self) -> Vec<Vec<u32>> {
        let mut out: Vec<Vec<u32>> = self.labelings.iter().map(|m| m.labels.clone()).collect();
        out.dedup();
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionSummary {
    pub raw: usize,
    pub distinct: usize,
    pub orbits: usize,
}

/// Builds the 24-cell, its balanced parity labelings and the 16-cell ternary
/// labeling, then runs [`construct_from`].
pub fn construct_all() -> Result<Construction> {
    let s = build_24cell();
    let pool = enumerate_parity_binary(&s)?.balanced;
    construct_from(&pool, &ternary_16cell(&s)?)
}

/// Orbit count of the distinct labelings under `g`.
pub fn summarize(c: &Construction, g: &SymmetryGroup) -> Result<ConstructionSummary> {
    let orbits = count_orbits(&c.distinct_labels(), g)?.count;
    Ok(ConstructionSummary { raw: c.raw(), distinct: c.distinct(), orbits })
}

/// Runs the construction from a balanced pool and the base ternary labeling.
pub fn construct_from(pool: &[BinaryLabeling], base: &TernaryLabeling) -> Result<Construction> {
    let per_perm = TritPerm::all()
        .par_iter()
        .map(|&pi| {
            let t = permute_trits(base, pi);
            let triples = enumerate_triples(pool, &t)?;
            let mut out = Vec::with_capacity(triples.len() * 4);
            for &(b1, b2, b3) in &triples {
                for w in WeightScheme::all() {
                    out.push(compose_inner(b1, b2, b3, &t, pi, w)?);
                }
            }
            Ok((triples, out))
        })
        .collect::<Result<Vec<_>>>()?;
    let triples_per_perm = std::array::from_fn(|i| per_perm[i].0.len());
    let triples = per_perm[0].0.clone();
    let mut labelings: Vec<MagicLabeling> = per_perm.into_iter().flat_map(|(_, l)| l).collect();
    labelings.par_sort_unstable();
    Ok(Construction { triples, triples_per_perm, labelings })
}
