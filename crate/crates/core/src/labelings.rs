//! Binary parity labelings and the three-16-cell ternary labeling of the 24-cell.
//!
//! A magic labeling by `1..=24` has cell sum 75, which is odd, so every cell
//! holds an odd number of odd labels. Bit `i` of a [`BinaryLabeling`] marks
//! vertex `i + 1` as carrying an odd label.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, chunk_ranges, next_same_weight, unrank_colex};
use crate::error::{Error, Result};
use crate::gf2::Gf2System;
use crate::incidence::IncidenceStructure;

pub const VERTICES: usize = 24;
const FULL: u32 = (1 << VERTICES) - 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BinaryLabeling(u32);

impl BinaryLabeling {
    pub fn new(bits: u32) -> Self {
        BinaryLabeling(bits & FULL)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Digit of the 0-based vertex `v`.
    #[inline]
    pub fn digit(self, v: usize) -> u8 {
        (self.0 >> v & 1) as u8
    }

    pub fn weight(self) -> u32 {
        self.0.count_ones()
    }

    /// Number of ones inside a vertex mask.
    pub fn count_in(self, mask: u64) -> u32 {
        (u64::from(self.0) & mask).count_ones()
    }

    pub fn digits(self) -> [u8; VERTICES] {
        std::array::from_fn(|v| self.digit(v))
    }
}

impl fmt::Display for BinaryLabeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn complement(b: BinaryLabeling) -> BinaryLabeling {
    BinaryLabeling(!b.0 & FULL)
}

/// One digit in `{0, 1, 2}` per vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct TernaryLabeling([u8; VERTICES]);

impl TernaryLabeling {
    pub fn new(trits: [u8; VERTICES]) -> Result<Self> {
        if let Some(&bad) = trits.iter().find(|&&t| t > 2) {
            return Err(Error::MalformedStructure(format!("trit {bad} out of range")));
        }
        Ok(TernaryLabeling(trits))
    }

    #[inline]
    pub fn digit(&self, v: usize) -> u8 {
        self.0[v]
    }

    pub fn trits(&self) -> &[u8; VERTICES] {
        &self.0
    }

    /// Occurrences of each trit among the vertices in `mask`.
    pub fn counts_in(&self, mask: u64) -> [usize; 3] {
        let mut out = [0; 3];
        for v in (0..VERTICES).filter(|&v| mask >> v & 1 == 1) {
            out[self.0[v] as usize] += 1;
        }
        out
    }
}

impl TryFrom<Vec<u8>> for TernaryLabeling {
    type Error = Error;
    fn try_from(v: Vec<u8>) -> Result<Self> {
        let arr: [u8; VERTICES] =
            v.try_into().map_err(|v: Vec<u8>| Error::LengthMismatch { expected: VERTICES, actual: v.len() })?;
        Self::new(arr)
    }
}

impl From<TernaryLabeling> for Vec<u8> {
    fn from(t: TernaryLabeling) -> Self {
        t.0.to_vec()
    }
}

/// A permutation of the trit values, `digit -> self.0[digit]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TritPerm([u8; 3]);

impl TritPerm {
    pub const IDENTITY: TritPerm = TritPerm([0, 1, 2]);

    pub fn new(images: [u8; 3]) -> Result<Self> {
        let mut sorted = images;
        sorted.sort_unstable();
        if sorted != [0, 1, 2] {
            return Err(Error::InvalidPermutation(format!("{images:?} is not a permutation of 0,1,2")));
        }
        Ok(TritPerm(images))
    }

    /// The six permutations in lexicographic order of their image strings.
    pub fn all() -> [TritPerm; 6] {
        [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]].map(TritPerm)
    }

    #[inline]
    pub fn apply(self, t: u8) -> u8 {
        self.0[t as usize]
    }

    pub fn images(self) -> [u8; 3] {
        self.0
    }
}

/// Written as `"012→120"`: the images of 0, 1, 2 follow the arrow.
impl fmt::Display for TritPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "012→{}{}{}", self.0[0], self.0[1], self.0[2])
    }
}

impl FromStr for TritPerm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidPermutation(format!("cannot parse trit permutation {s:?}"));
        let images = s.strip_prefix("012→").unwrap_or(s);
        let digits: Vec<u8> =
            images.chars().map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(bad)).collect::<Result<_>>()?;
        let arr: [u8; 3] = digits.try_into().map_err(|_| bad())?;
        TritPerm::new(arr)
    }
}

impl Serialize for TritPerm {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TritPerm {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn permute_trits(t: &TernaryLabeling, pi: TritPerm) -> TernaryLabeling {
    TernaryLabeling(t.0.map(|d| pi.apply(d)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityClassification {
    pub total_candidates: u64,
    /// Sorted numerically.
    pub solutions: Vec<BinaryLabeling>,
    /// Exactly three ones in every cell.
    pub balanced: Vec<BinaryLabeling>,
    /// Some cell holds one or five ones.
    pub unbalanced: Vec<BinaryLabeling>,
}

impl ParityClassification {
    pub fn to_file(&self) -> ParityFile {
        ParityFile {
            total_candidates: self.total_candidates,
            solutions: self.solutions.clone(),
            balanced: self.balanced.clone(),
        }
    }

    pub fn summary(&self) -> String {
        format!(
            "candidates={} solutions={} balanced={} unbalanced={}",
            self.total_candidates,
            self.solutions.len(),
            self.balanced.len(),
            self.unbalanced.len()
        )
    }
}

/// `{ "total_candidates": …, "solutions": [int], "balanced": [int] }`,
/// each int a 24-bit vector with bit 0 for vertex 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityFile {
    pub total_candidates: u64,
    pub solutions: Vec<BinaryLabeling>,
    pub balanced: Vec<BinaryLabeling>,
}

pub(crate) fn require_24cell(s: &IncidenceStructure) -> Result<()> {
    let wrong = |reason: String| Err(Error::WrongStructure { name: s.name().to_string(), reason });
    if s.num_vertices() != VERTICES || s.num_cells() != VERTICES {
        return wrong(format!("{} vertices and {} cells", s.num_vertices(), s.num_cells()));
    }
    if s.regularity() != Some((6, 6)) {
        return wrong("cells are not all octahedra with six cells per vertex".into());
    }
    Ok(())
}

fn cell_masks_24(s: &IncidenceStructure) -> Result<Vec<u64>> {
    require_24cell(s)?;
    Ok(s.cell_masks())
}

fn all_cells_odd(x: u64, masks: &[u64]) -> bool {
    masks.iter().all(|&m| (x & m).count_ones() & 1 == 1)
}

/// Brute force over all `C(24, 12)` weight-12 vectors on the rayon global pool.
pub fn enumerate_parity_binary(s: &IncidenceStructure) -> Result<ParityClassification> {
    enumerate_parity_binary_with(s, rayon::current_num_threads())
}

/// Brute force split into `workers` contiguous colex rank ranges. The result
/// does not depend on `workers`.
pub fn enumerate_parity_binary_with(s: &IncidenceStructure, workers: usize) -> Result<ParityClassification> {
    let masks = cell_masks_24(s)?;
    let half = (VERTICES / 2) as u32;
    let total = binomial(VERTICES as u32, half);
    let scan = |range: std::ops::Range<u64>| {
        let mut x = unrank_colex(range.start, half);
        let mut found = Vec::new();
        for _ in range {
            if all_cells_odd(x, &masks) {
                found.push(BinaryLabeling(x as u32));
            }
            x = next_same_weight(x);
        }
        found
    };
    let chunks = chunk_ranges(total, workers);
    let found: Vec<Vec<BinaryLabeling>> = if workers <= 1 {
        chunks.into_iter().map(scan).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool");
        pool.install(|| chunks.into_par_iter().map(scan).collect())
    };
    // chunks are in rank order and colex rank order is numeric order
    let solutions: Vec<BinaryLabeling> = found.into_iter().flatten().collect();
    Ok(classify(total, solutions, &masks))
}

fn classify(total: u64, solutions: Vec<BinaryLabeling>, masks: &[u64]) -> ParityClassification {
    let (balanced, unbalanced) = solutions.iter().partition(|b| masks.iter().all(|&m| b.count_in(m) == 3));
    ParityClassification { total_candidates: total, solutions, balanced, unbalanced }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Parity {
    pub rank: usize,
    /// Solutions of the odd-cell system before the weight filter: `2^(24 - rank)`.
    pub coset_size: u64,
    /// Weight-12 solutions, sorted.
    pub solutions: Vec<BinaryLabeling>,
}

/// Solves `Σ_{v ∈ cell} x_v = 1 (mod 2)` for every cell by elimination and
/// keeps the weight-12 members of the solution coset.
pub fn parity_solutions_gf2(s: &IncidenceStructure) -> Result<Gf2Parity> {
    let masks = cell_masks_24(s)?;
    let system = Gf2System::new(VERTICES, masks.iter().map(|&m| (m, true)));
    let coset = system.solutions()?;
    let mut solutions: Vec<BinaryLabeling> =
        coset.iter().filter(|x| x.count_ones() == VERTICES as u32 / 2).map(|&x| BinaryLabeling(x as u32)).collect();
    solutions.sort_unstable();
    Ok(Gf2Parity { rank: system.rank(), coset_size: coset.len() as u64, solutions })
}

/// Class of a vertex by which coordinate pair carries its nonzero entries:
/// `{1,2}` and `{3,4}` give 0, `{1,3}` and `{2,4}` give 1, `{1,4}` and `{2,3}` give 2.
/// The three classes are the vertex sets of three inscribed 16-cells.
pub fn ternary_16cell(s: &IncidenceStructure) -> Result<TernaryLabeling> {
    require_24cell(s)?;
    let mut trits = [0u8; VERTICES];
    for (v, t) in s.vertices().iter().zip(trits.iter_mut()) {
        let support: Vec<usize> = (0..v.coords.len()).filter(|&i| v.coords[i].doubled() != 0).collect();
        *t = match support.as_slice() {
            [0, 1] | [2, 3] => 0,
            [0, 2] | [1, 3] => 1,
            [0, 3] | [1, 2] => 2,
            _ if v.coords.is_empty() => return Err(Error::MissingCoordinates(v.index)),
            _ => {
                return Err(Error::WrongStructure {
                    name: s.name().to_string(),
                    reason: format!("vertex {} does not have two nonzero coordinates of four", v.index),
                })
            }
        };
    }
    TernaryLabeling::new(trits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::half::Half;
    use crate::incidence::{antipode_map, build_24cell, build_cube, triangles};
    use std::sync::OnceLock;

    fn parity() -> &'static ParityClassification {
        static P: OnceLock<ParityClassification> = OnceLock::new();
        P.get_or_init(|| enumerate_parity_binary(&build_24cell()).unwrap())
    }

    #[test]
    fn brute_force_counts() {
        let p = parity();
        assert_eq!(p.total_candidates, 2_704_156);
        assert_eq!(p.solutions.len(), 256);
        assert_eq!(p.balanced.len(), 64);
        assert_eq!(p.unbalanced.len(), 192);
        assert!(p.solutions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn odd_counts_per_cell() {
        let masks = build_24cell().cell_masks();
        for b in &parity().solutions {
            assert!(masks.iter().all(|&m| [1, 3, 5].contains(&b.count_in(m))));
        }
        assert!(!all_cells_odd(0, &masks));
    }

    #[test]
    fn gf2_agrees_with_brute_force() {
        let g = parity_solutions_gf2(&build_24cell()).unwrap();
        assert_eq!(g.solutions, parity().solutions);
        assert_eq!(g.coset_size, 1 << (24 - g.rank));
        assert_eq!(g.rank, 14);
    }

    #[test]
    fn opposite_vertices_have_opposite_parity() {
        let a = antipode_map(&build_24cell()).unwrap();
        for b in &parity().solutions {
            assert!((0..24).all(|v| b.digit(v) != b.digit(a.apply(v))), "{b}");
        }
    }

    #[test]
    fn complement_of_balanced() {
        let p = parity();
        for &b in &p.balanced {
            let c = complement(b);
            assert_eq!(c.weight(), 12);
            assert_eq!(complement(c), b);
            assert!(p.balanced.contains(&c));
        }
    }

    #[test]
    fn wrong_structure() {
        assert!(matches!(enumerate_parity_binary(&build_cube()), Err(Error::WrongStructure { .. })));
        assert!(matches!(ternary_16cell(&build_cube()), Err(Error::WrongStructure { .. })));
    }

    #[test]
    fn ternary_classes() {
        let s = build_24cell();
        let t = ternary_16cell(&s).unwrap();
        let at = |c: [i32; 4]| {
            let coords: Vec<Half> = c.iter().map(|&x| Half::from_int(x)).collect();
            t.digit(s.vertex_at(&coords).unwrap() - 1)
        };
        assert_eq!(at([1, 1, 0, 0]), 0);
        assert_eq!(at([1, 0, 1, 0]), 1);
        assert_eq!(at([1, 0, 0, 1]), 2);
        for m in s.cell_masks() {
            assert_eq!(t.counts_in(m), [2, 2, 2]);
        }
        for tri in triangles(&s).unwrap() {
            let mut ds: Vec<u8> = tri.iter().map(|&v| t.digit(v - 1)).collect();
            ds.sort_unstable();
            assert_eq!(ds, [0, 1, 2]);
        }
        let a = antipode_map(&s).unwrap();
        assert!((0..24).all(|v| t.digit(v) == t.digit(a.apply(v))));
    }

    #[test]
    fn ternary_classes_are_cross_polytopes() {
        let s = build_24cell();
        let t = ternary_16cell(&s).unwrap();
        let a = antipode_map(&s).unwrap();
        let vs = s.vertices();
        for class in 0..3 {
            let members: Vec<usize> = (0..24).filter(|&v| t.digit(v) == class).collect();
            assert_eq!(members.len(), 8);
            for &u in &members {
                for &w in &members {
                    if u != w && a.apply(u) != w {
                        let d: i32 =
                            vs[u].coords.iter().zip(&vs[w].coords).map(|(x, y)| x.doubled() * y.doubled()).sum();
                        assert_eq!(d, 0);
                    }
                }
            }
        }
    }

    #[test]
    fn trit_permutations() {
        let t = ternary_16cell(&build_24cell()).unwrap();
        assert_eq!(permute_trits(&t, TritPerm::IDENTITY), t);
        let all: Vec<TernaryLabeling> = TritPerm::all().iter().map(|&p| permute_trits(&t, p)).collect();
        for (i, x) in all.iter().enumerate() {
            assert!(all[i + 1..].iter().all(|y| y != x));
            for m in build_24cell().cell_masks() {
                assert_eq!(x.counts_in(m), [2, 2, 2]);
            }
        }
    }

    #[test]
    fn trit_perm_text() {
        let p = TritPerm::new([1, 2, 0]).unwrap();
        assert_eq!(p.to_string(), "012→120");
        assert_eq!("012→120".parse::<TritPerm>().unwrap(), p);
        assert_eq!("120".parse::<TritPerm>().unwrap(), p);
        assert!("012→112".parse::<TritPerm>().is_err());
        assert_eq!(serde_json::to_string(&p).unwrap(), "\"012→120\"");
    }

    #[test]
    fn ternary_json_checks_length() {
        assert!(serde_json::from_str::<TernaryLabeling>("[0,1,2]").is_err());
        let t = ternary_16cell(&build_24cell()).unwrap();
        let back: TernaryLabeling = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(back, t);
    }
}
