//! Vertex permutation groups, canonical forms and orbit counting.
//!
//! Groups are stored as explicit element lists. At order 1152 this is a few
//! tens of kilobytes, and lex-min canonicalization over the whole group is
//! fast enough to quotient the full constructed family.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::half::Half;
use crate::incidence::IncidenceStructure;

/// A permutation of `0..n`, stored 0-based. Serialized 1-based, so
/// `image[i]` in a file is the image of vertex `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &j in &image {
            if j >= n || seen[j] {
                return Err(Error::InvalidPermutation(format!("{image:?} is not a permutation of 0..{n}")));
            }
            seen[j] = true;
        }
        Ok(Permutation(image))
    }

    pub fn from_one_based(image: Vec<usize>) -> Result<Self> {
        if image.contains(&0) {
            return Err(Error::InvalidPermutation("0 in a 1-based image".into()));
        }
        Self::new(image.into_iter().map(|j| j - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// Swaps two 0-based points.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(n);
        p.0.swap(a, b);
        p
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn image(&self) -> &[usize] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|&j| j + 1).collect()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&j| self.0[j]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `(labels[σ(0)], …, labels[σ(n-1)])`.
    pub fn permute<T: Copy>(&self, labels: &[T]) -> Vec<T> {
        self.0.iter().map(|&j| labels[j]).collect()
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_based().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let image = Vec::<usize>::deserialize(deserializer)?;
        Permutation::from_one_based(image).map_err(serde::de::Error::custom)
    }
}

/// A finite permutation group with its elements listed in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryGroup {
    degree: usize,
    elements: Vec<Permutation>,
}

impl SymmetryGroup {
    /// Trusts the caller that `elements` is closed; use [`group_closure`] otherwise.
    fn from_elements(degree: usize, mut elements: Vec<Permutation>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        SymmetryGroup { degree, elements }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    /// Checks identity, closure under composition and inverses exhaustively.
    pub fn is_closed(&self) -> bool {
        let set: HashSet<&Permutation> = self.elements.iter().collect();
        self.contains(&Permutation::identity(self.degree))
            && self
                .elements
                .par_iter()
                .all(|a| set.contains(&a.inverse()) && self.elements.iter().all(|b| set.contains(&a.compose(b))))
    }

    /// Orbits of the points `0..degree`, each sorted, ordered by least point.
    pub fn point_orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for p in 0..self.degree {
            if seen[p] {
                continue;
            }
            let orbit: BTreeSet<usize> = self.elements.iter().map(|g| g.apply(p)).collect();
            for &q in &orbit {
                seen[q] = true;
            }
            out.push(orbit.into_iter().collect());
        }
        out
    }

    pub fn to_file(&self) -> GroupFile {
        GroupFile { order: self.order(), elements: self.elements.clone() }
    }

    /// Rebuilds a group from an export, rejecting sets that are not closed.
    pub fn from_file(file: GroupFile) -> Result<Self> {
        let degree = file.elements.first().map_or(0, Permutation::degree);
        if file.elements.iter().any(|p| p.degree() != degree) {
            return Err(Error::InvalidPermutation("elements have different degrees".into()));
        }
        let g = Self::from_elements(degree, file.elements);
        if g.order() != file.order || !g.is_closed() {
            return Err(Error::InvalidPermutation("element list is not a closed group".into()));
        }
        Ok(g)
    }
}

/// `{ "order": n, "elements": [[1-based images], ...] }`, elements sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupFile {
    pub order: usize,
    pub elements: Vec<Permutation>,
}

/// Breadth-first closure of `generators` under composition.
pub fn group_closure(generators: &[Permutation], cap: usize) -> Result<SymmetryGroup> {
    let degree = generators.first().ok_or_else(|| Error::InvalidPermutation("no generators".into()))?.degree();
    if generators.iter().any(|g| g.degree() != degree) {
        return Err(Error::InvalidPermutation("generators have different degrees".into()));
    }
    let identity = Permutation::identity(degree);
    let mut seen: HashSet<Permutation> = HashSet::from([identity.clone()]);
    let mut frontier = vec![identity];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for a in &frontier {
            for g in generators {
                let c = g.compose(a);
                if !seen.contains(&c) {
                    if seen.len() == cap {
                        return Err(Error::CapExceeded(cap));
                    }
                    seen.insert(c.clone());
                    next.push(c);
                }
            }
        }
        frontier = next;
    }
    Ok(SymmetryGroup::from_elements(degree, seen.into_iter().collect()))
}

/// A 4x4 matrix of half-integers acting on column vectors.
pub type Matrix4 = [[Half; 4]; 4];

fn permutation_matrix(images: [usize; 4]) -> Matrix4 {
    let mut m = [[Half::ZERO; 4]; 4];
    for (row, &col) in images.iter().enumerate() {
        m[row][col] = Half::ONE;
    }
    m
}

/// Coordinate swap `(1 2)`, 4-cycle `(1 2 3 4)` and the sign flip of the first axis.
pub fn signed_permutation_generators() -> Vec<Matrix4> {
    let mut flip = permutation_matrix([0, 1, 2, 3]);
    flip[0][0] = Half::from_int(-1);
    vec![permutation_matrix([1, 0, 2, 3]), permutation_matrix([1, 2, 3, 0]), flip]
}

/// The orthogonal matrix with rows `(1,1,1,1)/2, (1,1,-1,-1)/2,
/// (1,-1,1,-1)/2, (1,-1,-1,1)/2`. It permutes the three inscribed 16-cells.
pub fn triality_generator() -> Matrix4 {
    let signs = [[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]];
    signs.map(|row| row.map(Half::halves))
}

/// The vertex permutation induced by a linear map, or
/// `GeneratorNotAutomorphism(which)` if some image is not a vertex.
pub fn matrix_permutation(s: &IncidenceStructure, m: &Matrix4, which: usize) -> Result<Permutation> {
    let index = s.coordinate_index();
    let image = s
        .vertices()
        .iter()
        .map(|v| {
            if v.coords.len() != 4 {
                return Err(Error::GeneratorNotAutomorphism(which));
            }
            let w = m
                .iter()
                .map(|row| {
                    row.iter().zip(&v.coords).try_fold(Half::ZERO, |acc, (&a, &x)| Some(acc + a.checked_mul(x)?))
                })
                .collect::<Option<Vec<Half>>>()
                .ok_or(Error::GeneratorNotAutomorphism(which))?;
            index.get(&w).map(|&j| j - 1).ok_or(Error::GeneratorNotAutomorphism(which))
        })
        .collect::<Result<Vec<_>>>()?;
    Permutation::new(image).map_err(|_| Error::GeneratorNotAutomorphism(which))
}

const GROUP_CAP_24CELL: usize = 1152;

/// The order-384 group of signed coordinate permutations, as vertex permutations.
pub fn signed_permutations_24cell(s: &IncidenceStructure) -> Result<SymmetryGroup> {
    let gens = signed_permutation_generators()
        .iter()
        .enumerate()
        .map(|(i, m)| matrix_permutation(s, m, i))
        .collect::<Result<Vec<_>>>()?;
    group_closure(&gens, GROUP_CAP_24CELL)
}

/// The full symmetry group of the 24-cell (order 1152): signed coordinate
/// permutations plus the triality matrix.
pub fn symmetry_24cell(s: &IncidenceStructure) -> Result<SymmetryGroup> {
    let mut matrices = signed_permutation_generators();
    matrices.push(triality_generator());
    let gens = matrices.iter().enumerate().map(|(i, m)| matrix_permutation(s, m, i)).collect::<Result<Vec<_>>>()?;
    group_closure(&gens, GROUP_CAP_24CELL)
}

/// Every vertex permutation that maps the family of cell member-sets onto
/// itself, found by backtracking. A partial map `u -> w` restricts each cell
/// to target cells that agree with it on every assigned vertex.
pub fn automorphisms(s: &IncidenceStructure, cap: usize) -> Result<SymmetryGroup> {
    let n = s.num_vertices();
    let m = s.num_cells();
    let masks = s.cell_masks();
    let cells_of: Vec<u64> =
        s.cells_of_vertex().iter().map(|cs| cs.iter().fold(0u64, |acc, &c| acc | 1 << c)).collect();
    let all_cells = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let initial: Vec<u64> = masks
        .iter()
        .map(|&a| (0..m).filter(|&j| masks[j].count_ones() == a.count_ones()).fold(0u64, |acc, j| acc | 1 << j))
        .collect();
    let mut sorted_masks = masks.clone();
    sorted_masks.sort_unstable();

    struct Search<'a> {
        n: usize,
        cap: usize,
        masks: &'a [u64],
        sorted_masks: &'a [u64],
        cells_of: &'a [u64],
        all_cells: u64,
        image: Vec<usize>,
        found: Vec<Permutation>,
    }

    impl Search<'_> {
        fn go(&mut self, u: usize, used: u64, cand: &[u64]) -> Result<()> {
            if u == self.n {
                let mut mapped: Vec<u64> = self
                    .masks
                    .iter()
                    .map(|&c| (0..self.n).filter(|&v| c >> v & 1 == 1).fold(0u64, |acc, v| acc | 1 << self.image[v]))
                    .collect();
                mapped.sort_unstable();
                if mapped == self.sorted_masks {
                    if self.found.len() == self.cap {
                        return Err(Error::CapExceeded(self.cap));
                    }
                    self.found.push(Permutation(self.image.clone()));
                }
                return Ok(());
            }
            let mut next = vec![0u64; cand.len()];
            for w in 0..self.n {
                if used >> w & 1 == 1 || self.cells_of[w].count_ones() != self.cells_of[u].count_ones() {
                    continue;
                }
                let mut ok = true;
                for (c, (&mask, &cs)) in self.masks.iter().zip(cand).enumerate() {
                    let allowed =
                        if mask >> u & 1 == 1 { self.cells_of[w] } else { self.all_cells & !self.cells_of[w] };
                    next[c] = cs & allowed;
                    if next[c] == 0 {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    self.image[u] = w;
                    self.go(u + 1, used | 1 << w, &next)?;
                }
            }
            Ok(())
        }
    }

    let mut search = Search {
        n,
        cap,
        masks: &masks,
        sorted_masks: &sorted_masks,
        cells_of: &cells_of,
        all_cells,
        image: vec![0; n],
        found: Vec::new(),
    };
    search.go(0, 0, &initial)?;
    Ok(SymmetryGroup::from_elements(n, search.found))
}

/// Lexicographically least `(labels[σ(0)], …)` over all `σ` in `g`.
pub fn canonical_form<T: Ord + Copy>(labels: &[T], g: &SymmetryGroup) -> Result<Vec<T>> {
    if labels.len() != g.degree() {
        return Err(Error::LengthMismatch { expected: g.degree(), actual: labels.len() });
    }
    let mut best = labels.to_vec();
    for sigma in g.elements() {
        for (i, &j) in sigma.image().iter().enumerate() {
            match labels[j].cmp(&best[i]) {
                std::cmp::Ordering::Less => {
                    best = sigma.permute(labels);
                    break;
                }
                std::cmp::Ordering::Greater => break,
                std::cmp::Ordering::Equal => {}
            }
        }
    }
    Ok(best)
}

/// All distinct images of `labels` under `g`.
pub fn orbit<T: Ord + Copy>(labels: &[T], g: &SymmetryGroup) -> Result<BTreeSet<Vec<T>>> {
    if labels.len() != g.degree() {
        return Err(Error::LengthMismatch { expected: g.degree(), actual: labels.len() });
    }
    Ok(g.elements().iter().map(|s| s.permute(labels)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitCount<T> {
    pub count: usize,
    /// Canonical forms, sorted.
    pub representatives: Vec<Vec<T>>,
    /// Distinct input sequences falling in each orbit, parallel to `representatives`.
    pub hits: Vec<usize>,
}

/// Deduplicates by canonical form. Duplicate inputs count once toward `hits`.
pub fn count_orbits<T>(labelings: &[Vec<T>], g: &SymmetryGroup) -> Result<OrbitCount<T>>
where
    T: Ord + Copy + Send + Sync,
{
    let distinct: BTreeSet<&Vec<T>> = labelings.iter().collect();
    let distinct: Vec<&Vec<T>> = distinct.into_iter().collect();
    let forms = distinct.par_iter().map(|l| canonical_form(l, g)).collect::<Result<Vec<_>>>()?;
    let mut classes: BTreeMap<Vec<T>, usize> = BTreeMap::new();
    for f in forms {
        *classes.entry(f).or_default() += 1;
    }
    let (representatives, hits): (Vec<_>, Vec<_>) = classes.into_iter().unzip();
    Ok(OrbitCount { count: representatives.len(), representatives, hits })
}
