//! Vertex/cell incidence structures and labeling arithmetic.
//!
//! Vertices and cells are 1-based in every public field and file format.
//! Bitmask helpers (`cell_masks`) use bit `i` for vertex `i + 1`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::half::Half;
use crate::symmetry::Permutation;

/// Upper bound on vertices and on cells, so that a vertex or cell subset fits in a `u64`.
pub const MAX_ELEMENTS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub index: usize,
    /// Empty for structures loaded without geometry.
    pub coords: Vec<Half>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub index: usize,
    pub center: Option<Vec<Half>>,
    /// Sorted, 1-based.
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceStructure {
    name: String,
    vertices: Vec<Vertex>,
    cells: Vec<Cell>,
}

impl IncidenceStructure {
    /// Validates indices and membership. Cell members are sorted and must be
    /// distinct valid vertex indices.
    pub fn new(name: impl Into<String>, vertices: Vec<Vertex>, cells: Vec<Cell>) -> Result<Self> {
        let name = name.into();
        let n = vertices.len();
        if n == 0 || n > MAX_ELEMENTS {
            return Err(Error::MalformedStructure(format!("vertex count {n} outside 1..={MAX_ELEMENTS}")));
        }
        if cells.len() > MAX_ELEMENTS {
            return Err(Error::MalformedStructure(format!("cell count {} exceeds {MAX_ELEMENTS}", cells.len())));
        }
        for (i, v) in vertices.iter().enumerate() {
            if v.index != i + 1 {
                return Err(Error::MalformedStructure(format!("vertex at position {} has index {}", i + 1, v.index)));
            }
        }
        let dim = vertices[0].coords.len();
        if vertices.iter().any(|v| v.coords.len() != dim) {
            return Err(Error::MalformedStructure("vertices have mixed dimensions".into()));
        }
        let mut cells = cells;
        for (i, c) in cells.iter_mut().enumerate() {
            if c.index != i + 1 {
                return Err(Error::MalformedStructure(format!("cell at position {} has index {}", i + 1, c.index)));
            }
            c.members.sort_unstable();
            let before = c.members.len();
            c.members.dedup();
            if c.members.len() != before {
                return Err(Error::MalformedStructure(format!("cell {} repeats a vertex", c.index)));
            }
            if let Some(&bad) = c.members.iter().find(|&&m| m == 0 || m > n) {
                return Err(Error::MalformedStructure(format!("cell {} references vertex {bad}", c.index)));
            }
        }
        Ok(IncidenceStructure { name, vertices, cells })
    }

    /// Abstract structure without coordinates, from 1-based member lists.
    pub fn from_cells(name: impl Into<String>, n: usize, cells: Vec<Vec<usize>>) -> Result<Self> {
        let vertices = (1..=n).map(|index| Vertex { index, coords: Vec::new() }).collect();
        let cells =
            cells.into_iter().enumerate().map(|(i, members)| Cell { index: i + 1, center: None, members }).collect();
        Self::new(name, vertices, cells)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn has_coordinates(&self) -> bool {
        !self.vertices[0].coords.is_empty()
    }

    /// One bitmask per cell, bit `i` set when vertex `i + 1` is a member.
    pub fn cell_masks(&self) -> Vec<u64> {
        self.cells.iter().map(|c| c.members.iter().fold(0u64, |m, &v| m | 1 << (v - 1))).collect()
    }

    /// For each vertex (0-based), the 0-based indices of the cells containing it.
    pub fn cells_of_vertex(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_vertices()];
        for (ci, c) in self.cells.iter().enumerate() {
            for &v in &c.members {
                out[v - 1].push(ci);
            }
        }
        out
    }

    /// `(k, r)`: members per cell and cells per vertex, when both are uniform.
    pub fn regularity(&self) -> Option<(usize, usize)> {
        let k = self.cells.first()?.members.len();
        if self.cells.iter().any(|c| c.members.len() != k) {
            return None;
        }
        let r = self.cells_per_vertex()?;
        Some((k, r))
    }

    fn cells_per_vertex(&self) -> Option<usize> {
        let degrees: Vec<usize> = self.cells_of_vertex().iter().map(Vec::len).collect();
        let r = degrees[0];
        degrees.iter().all(|&d| d == r).then_some(r)
    }

    /// 1-based index of the vertex with exactly these coordinates.
    pub fn vertex_at(&self, coords: &[Half]) -> Option<usize> {
        self.vertices.iter().find(|v| v.coords == coords).map(|v| v.index)
    }

    pub(crate) fn coordinate_index(&self) -> HashMap<Vec<Half>, usize> {
        self.vertices.iter().map(|v| (v.coords.clone(), v.index)).collect()
    }

    pub fn to_file(&self) -> StructureFile {
        StructureFile {
            name: self.name.clone(),
            vertices: self.vertices.iter().map(|v| v.coords.clone()).collect(),
            cells: self.cells.iter().map(|c| c.members.clone()).collect(),
        }
    }

    /// Rebuilds from a file. Cell centers are recomputed when the stored
    /// members match one of the built-in structures exactly.
    pub fn from_file(file: StructureFile) -> Result<Self> {
        let vertices =
            file.vertices.into_iter().enumerate().map(|(i, coords)| Vertex { index: i + 1, coords }).collect();
        let cells = file
            .cells
            .into_iter()
            .enumerate()
            .map(|(i, members)| Cell { index: i + 1, center: None, members })
            .collect();
        let s = Self::new(file.name, vertices, cells)?;
        for builtin in [build_24cell(), build_cube(), build_tesseract()] {
            if builtin.name == s.name && builtin.same_incidence(&s) {
                return Ok(builtin);
            }
        }
        Ok(s)
    }

    /// Same vertex coordinates and the same cell member lists, in order.
    pub fn same_incidence(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.cells.len() == other.cells.len()
            && self.cells.iter().zip(&other.cells).all(|(a, b)| a.members == b.members)
    }
}

/// On-disk structure: coordinates per vertex, 1-based member lists per cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureFile {
    pub name: String,
    pub vertices: Vec<Vec<Half>>,
    pub cells: Vec<Vec<usize>>,
}

/// On-disk labeling: `labels[i]` labels vertex `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelingFile {
    pub structure: String,
    pub labels: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelingReport {
    pub is_permutation: bool,
    pub cell_sums: Vec<i64>,
    pub magic: bool,
    /// The common cell sum, when every cell has the same sum.
    pub magic_sum: Option<i64>,
}

fn dot(a: &[Half], b: &[Half]) -> Option<Half> {
    a.iter().zip(b).try_fold(Half::ZERO, |acc, (&x, &y)| Some(acc + x.checked_mul(y)?))
}

/// Cells are `{v : v . center = 1}`; vertices and centers are indexed in the order given.
fn from_coordinates(name: &str, vertices: Vec<Vec<Half>>, centers: Vec<Vec<Half>>) -> IncidenceStructure {
    let cells = centers
        .into_iter()
        .enumerate()
        .map(|(ci, center)| {
            let members = vertices
                .iter()
                .enumerate()
                .filter(|(_, v)| dot(v, &center) == Some(Half::ONE))
                .map(|(vi, _)| vi + 1)
                .collect();
            Cell { index: ci + 1, center: Some(center), members }
        })
        .collect();
    let vertices = vertices.into_iter().enumerate().map(|(i, coords)| Vertex { index: i + 1, coords }).collect();
    IncidenceStructure::new(name, vertices, cells).expect("built-in structure is well formed")
}

fn descending<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

fn sign_vectors(dim: usize) -> Vec<Vec<i32>> {
    (0..1u32 << dim).map(|bits| (0..dim).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect()).collect()
}

/// `±e_i` for each axis.
fn axis_centers(dim: usize) -> Vec<Vec<Half>> {
    let mut out = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        for s in [1, -1] {
            let mut c = vec![Half::ZERO; dim];
            c[i] = Half::from_int(s);
            out.push(c);
        }
    }
    descending(out)
}

fn to_halves(v: &[i32]) -> Vec<Half> {
    v.iter().map(|&x| Half::from_int(x)).collect()
}

/// The 24-cell: vertices are the permutations of `(±1, ±1, 0, 0)`, indexed in
/// descending lexicographic order. The 8 cells centered on `±e_i` come first,
/// then the 16 centered on `s / 2` for sign vectors `s`, each family in
/// descending order of its center.
pub fn build_24cell() -> IncidenceStructure {
    let mut vertices = Vec::with_capacity(24);
    for i in 0..4 {
        for j in i + 1..4 {
            for s in sign_vectors(2) {
                let mut v = vec![0; 4];
                v[i] = s[0];
                v[j] = s[1];
                vertices.push(to_halves(&v));
            }
        }
    }
    let mut centers = axis_centers(4);
    centers.extend(descending(sign_vectors(4)).into_iter().map(|s| s.into_iter().map(Half::halves).collect()));
    from_coordinates("24cell", descending(vertices), centers)
}

/// The cube `(±1, ±1, ±1)` with its six square faces as cells.
pub fn build_cube() -> IncidenceStructure {
    let vertices = descending(sign_vectors(3)).iter().map(|v| to_halves(v)).collect();
    from_coordinates("cube", vertices, axis_centers(3))
}

/// The tesseract `(±1, ±1, ±1, ±1)` with its eight cubic cells.
pub fn build_tesseract() -> IncidenceStructure {
    let vertices = descending(sign_vectors(4)).iter().map(|v| to_halves(v)).collect();
    from_coordinates("tesseract", vertices, axis_centers(4))
}

/// The common cell sum forced on any bijective labeling by `1..=|V|`:
/// `r * |V|(|V|+1)/2 / |cells|`.
pub fn magic_sum(s: &IncidenceStructure) -> Result<u64> {
    let r = s.cells_per_vertex().ok_or(Error::NonRegular)? as u64;
    let n = s.num_vertices() as u64;
    let numerator = r * n * (n + 1) / 2;
    let denominator = s.num_cells() as u64;
    if denominator == 0 || !numerator.is_multiple_of(denominator) {
        return Err(Error::NonIntegral { numerator, denominator });
    }
    Ok(numerator / denominator)
}

pub fn verify_labeling(s: &IncidenceStructure, labels: &[i64]) -> Result<LabelingReport> {
    let n = s.num_vertices();
    if labels.len() != n {
        return Err(Error::LengthMismatch { expected: n, actual: labels.len() });
    }
    let mut seen = vec![false; n];
    let mut is_permutation = true;
    for &l in labels {
        match usize::try_from(l) {
            Ok(l) if (1..=n).contains(&l) && !seen[l - 1] => seen[l - 1] = true,
            _ => is_permutation = false,
        }
    }
    let cell_sums: Vec<i64> = s.cells.iter().map(|c| c.members.iter().map(|&v| labels[v - 1]).sum()).collect();
    let magic_sum = match cell_sums.split_first() {
        Some((&first, rest)) if rest.iter().all(|&x| x == first) => Some(first),
        _ => None,
    };
    Ok(LabelingReport { is_permutation, magic: is_permutation && magic_sum.is_some(), cell_sums, magic_sum })
}

/// Pairs each vertex with the vertex at its negated coordinates.
pub fn antipode_map(s: &IncidenceStructure) -> Result<Permutation> {
    if !s.has_coordinates() {
        return Err(Error::MissingCoordinates(1));
    }
    let index = s.coordinate_index();
    let image = s
        .vertices
        .iter()
        .map(|v| {
            let neg: Vec<Half> = v.coords.iter().map(|&x| -x).collect();
            index.get(&neg).map(|&j| j - 1).ok_or(Error::NotCentrallySymmetric(v.index))
        })
        .collect::<Result<Vec<_>>>()?;
    // the origin is its own antipode
    if let Some(i) = (0..image.len()).find(|&i| image[i] == i) {
        return Err(Error::NotCentrallySymmetric(i + 1));
    }
    Permutation::new(image)
}

fn squared_distance(a: &[Half], b: &[Half]) -> i64 {
    // in quarter units
    a.iter().zip(b).map(|(x, y)| i64::from(x.doubled() - y.doubled()).pow(2)).sum()
}

/// All 3-cliques of the edge graph, where edges join vertices at the minimal
/// squared distance. Returned as sorted 1-based triples in lexicographic order.
pub fn triangles(s: &IncidenceStructure) -> Result<Vec<[usize; 3]>> {
    if !s.has_coordinates() {
        return Err(Error::MissingCoordinates(1));
    }
    let n = s.num_vertices();
    let coords: Vec<&[Half]> = s.vertices.iter().map(|v| v.coords.as_slice()).collect();
    let Some(min) =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| squared_distance(coords[i], coords[j])).min()
    else {
        return Ok(Vec::new());
    };
    let mut adjacent = vec![0u64; n];
    for i in 0..n {
        for j in i + 1..n {
            if squared_distance(coords[i], coords[j]) == min {
                adjacent[i] |= 1 << j;
                adjacent[j] |= 1 << i;
            }
        }
    }
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if adjacent[i] >> j & 1 == 0 {
                continue;
            }
            let mut common = adjacent[i] & adjacent[j] & !((2u64 << j) - 1);
            while common != 0 {
                let k = common.trailing_zeros() as usize;
                common &= common - 1;
                out.push([i + 1, j + 1, k + 1]);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i32]) -> Vec<Half> {
        to_halves(v)
    }

    #[test]
    fn cell_24_shape() {
        let s = build_24cell();
        assert_eq!(s.num_vertices(), 24);
        assert_eq!(s.num_cells(), 24);
        assert_eq!(s.regularity(), Some((6, 6)));
        assert_eq!(s.cells().iter().map(|c| c.members.len()).sum::<usize>(), 144);
        assert_eq!(s.vertices()[0].coords, ints(&[1, 1, 0, 0]));
        assert_eq!(s.vertices()[23].coords, ints(&[-1, -1, 0, 0]));
    }

    #[test]
    fn cell_24_first_cell_members() {
        let s = build_24cell();
        let c = &s.cells()[0];
        assert_eq!(c.center.as_deref(), Some(ints(&[1, 0, 0, 0]).as_slice()));
        let mut got: Vec<Vec<Half>> = c.members.iter().map(|&v| s.vertices()[v - 1].coords.clone()).collect();
        let mut want: Vec<Vec<Half>> =
            [[1, 1, 0, 0], [1, -1, 0, 0], [1, 0, 1, 0], [1, 0, -1, 0], [1, 0, 0, 1], [1, 0, 0, -1]]
                .iter()
                .map(|v| ints(v))
                .collect();
        got.sort();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn sign_family_follows_axis_family() {
        let s = build_24cell();
        let c = &s.cells()[8];
        assert_eq!(c.center.as_deref(), Some(vec![Half::halves(1); 4].as_slice()));
        assert_eq!(s.cells()[23].center.as_deref(), Some(vec![Half::halves(-1); 4].as_slice()));
    }

    #[test]
    fn cube_and_tesseract() {
        let cube = build_cube();
        assert_eq!((cube.num_vertices(), cube.num_cells()), (8, 6));
        assert_eq!(cube.regularity(), Some((4, 3)));
        let face = &cube.cells()[0];
        assert!(face.members.iter().all(|&v| cube.vertices()[v - 1].coords[0] == Half::ONE));
        let t = build_tesseract();
        assert_eq!((t.num_vertices(), t.num_cells()), (16, 8));
        assert_eq!(t.regularity(), Some((8, 4)));
    }

    #[test]
    fn magic_sums() {
        assert_eq!(magic_sum(&build_24cell()), Ok(75));
        assert_eq!(magic_sum(&build_cube()), Ok(18));
        assert_eq!(magic_sum(&build_tesseract()), Ok(68));
        let whole = IncidenceStructure::from_cells("one", 5, vec![vec![1, 2, 3, 4, 5]]).unwrap();
        assert_eq!(magic_sum(&whole), Ok(15));
    }

    #[test]
    fn magic_sum_errors() {
        let uneven = IncidenceStructure::from_cells("u", 3, vec![vec![1, 2]]).unwrap();
        assert_eq!(magic_sum(&uneven), Err(Error::NonRegular));
        // r = 1, n = 3: 6 / 4 cells is not integral
        let s = IncidenceStructure::from_cells("f", 3, vec![vec![1], vec![2], vec![3], vec![]]).unwrap();
        assert!(matches!(magic_sum(&s), Err(Error::NonIntegral { .. })));
    }

    #[test]
    fn verify_reports() {
        let s = build_24cell();
        let dup: Vec<i64> = (1..=24).map(|i| if i == 2 { 1 } else { i }).collect();
        let r = verify_labeling(&s, &dup).unwrap();
        assert!(!r.is_permutation);
        assert!(!r.magic);
        assert_eq!(verify_labeling(&s, &[1, 2, 3]), Err(Error::LengthMismatch { expected: 24, actual: 3 }));
    }

    #[test]
    fn identity_labeling_sums() {
        let s = build_24cell();
        let identity: Vec<i64> = (1..=24).collect();
        let r = verify_labeling(&s, &identity).unwrap();
        let direct: Vec<i64> = s.cells().iter().map(|c| c.members.iter().map(|&v| v as i64).sum()).collect();
        assert_eq!(r.cell_sums, direct);
        assert_eq!(r.cell_sums.iter().sum::<i64>(), 6 * 300);
        assert!(r.is_permutation);
        assert!(!r.magic);
    }

    #[test]
    fn antipodes() {
        let s = build_24cell();
        let a = antipode_map(&s).unwrap();
        assert_eq!(a.apply(0), 23);
        assert!(a.compose(&a).is_identity());
        let cube = antipode_map(&build_cube()).unwrap();
        assert!((0..8).all(|i| cube.apply(i) != i && cube.apply(cube.apply(i)) == i));
        let lopsided = IncidenceStructure::new(
            "l",
            vec![Vertex { index: 1, coords: ints(&[1, 0]) }, Vertex { index: 2, coords: ints(&[0, 1]) }],
            vec![],
        )
        .unwrap();
        assert!(matches!(antipode_map(&lopsided), Err(Error::NotCentrallySymmetric(_))));
    }

    #[test]
    fn antipode_maps_cells_to_opposite_cells() {
        let s = build_24cell();
        let a = antipode_map(&s).unwrap();
        for c in s.cells() {
            let neg: Vec<Half> = c.center.as_ref().unwrap().iter().map(|&x| -x).collect();
            let opposite = s.cells().iter().find(|d| d.center.as_ref() == Some(&neg)).unwrap();
            let mut image: Vec<usize> = c.members.iter().map(|&v| a.apply(v - 1) + 1).collect();
            image.sort_unstable();
            assert_eq!(image, opposite.members);
        }
    }

    #[test]
    fn triangle_counts() {
        let s = build_24cell();
        let tri = triangles(&s).unwrap();
        assert_eq!(tri.len(), 96);
        let masks = s.cell_masks();
        for t in &tri {
            let m = t.iter().fold(0u64, |m, &v| m | 1 << (v - 1));
            assert!(masks.iter().any(|&c| c & m == m), "{t:?} not in any cell");
        }
        assert!(triangles(&build_cube()).unwrap().is_empty());
    }

    #[test]
    fn deterministic_build() {
        assert_eq!(build_24cell(), build_24cell());
    }

    #[test]
    fn file_round_trip_restores_centers() {
        let s = build_24cell();
        let json = serde_json::to_string(&s.to_file()).unwrap();
        let back = IncidenceStructure::from_file(serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn malformed_rejected() {
        assert!(IncidenceStructure::from_cells("bad", 3, vec![vec![1, 4]]).is_err());
        assert!(IncidenceStructure::from_cells("bad", 3, vec![vec![1, 1]]).is_err());
        assert!(IncidenceStructure::from_cells("bad", 0, vec![]).is_err());
    }
}
