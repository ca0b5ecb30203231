//! Exact depth-first search for magic labelings of any incidence structure.
//!
//! Labels `1..=n` are assigned one vertex at a time. The next vertex is the
//! lowest-indexed unassigned member of the incomplete cell with the fewest
//! unassigned members (lowest cell index on ties); its candidate labels are
//! tried in increasing order. A candidate is rejected when some cell through
//! the vertex can no longer reach the target: its remaining `k` slots must be
//! fillable by the `k` smallest or largest unused labels.
//!
//! The search is an explicit stack, so a stopped run serializes to a
//! [`Checkpoint`] and resumes exactly where it left off.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construct::MagicLabeling;
use crate::error::{Error, Result};
use crate::incidence::{verify_labeling, IncidenceStructure};
use crate::symmetry::{automorphisms, count_orbits, OrbitCount, SymmetryGroup};

const AUTOMORPHISM_CAP: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub target_sum: i64,
    #[serde(default)]
    pub node_budget: Option<u64>,
    #[serde(default)]
    pub emit_limit: Option<u64>,
    /// Only lets label 1 sit on the least vertex of each vertex orbit of the
    /// automorphism group. Every orbit of magic labelings keeps a member.
    #[serde(default)]
    pub symmetry_reduction: bool,
    /// `(vertex, label)` pairs, both 1-based, fixed before the search starts.
    /// Restricts the run to one subtree.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fixed: Vec<(usize, u32)>,
}

impl SearchConfig {
    pub fn new(target_sum: i64) -> Self {
        SearchConfig { target_sum, node_budget: None, emit_limit: None, symmetry_reduction: false, fixed: Vec::new() }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.target_sum <= 0 {
            return Err(Error::BadTargetSum(self.target_sum));
        }
        if self.node_budget == Some(0) || self.emit_limit == Some(0) {
            return Err(Error::BadConfig("budgets must be positive".into()));
        }
        let mut vs = 0u64;
        let mut ls = 0u64;
        for &(v, l) in &self.fixed {
            let l = l as usize;
            if v == 0 || v > n || l == 0 || l > n || vs >> (v - 1) & 1 == 1 || ls >> (l - 1) & 1 == 1 {
                return Err(Error::BadConfig(format!("invalid fixed assignment ({v}, {l})")));
            }
            vs |= 1 << (v - 1);
            ls |= 1 << (l - 1);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointFrame {
    /// 1-based.
    pub vertex: usize,
    pub label: Option<u32>,
    /// Smallest label not yet tried at this depth.
    pub next: u32,
}

/// The search stack of a stopped run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub structure: String,
    pub target_sum: i64,
    pub symmetry_reduction: bool,
    pub fixed: Vec<(usize, u32)>,
    pub frames: Vec<CheckpointFrame>,
    /// Nodes explored by every run leading up to this checkpoint.
    pub nodes_explored: u64,
    pub emitted: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    /// In search order.
    pub labelings: Vec<MagicLabeling>,
    /// Label assignments made by this run.
    pub nodes_explored: u64,
    /// The whole (sub)tree was exhausted.
    pub complete: bool,
    /// Present exactly when `complete` is false.
    pub checkpoint: Option<Checkpoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub nodes: u64,
    pub complete: bool,
    pub count: usize,
}

impl SearchOutcome {
    pub fn summary(&self) -> SearchSummary {
        SearchSummary { nodes: self.nodes_explored, complete: self.complete, count: self.labelings.len() }
    }
}

struct Frame {
    vertex: usize,
    label: Option<u32>,
    next: u32,
}

struct Search<'a> {
    s: &'a IncidenceStructure,
    n: usize,
    target: i64,
    members: Vec<Vec<usize>>,
    cells_of: Vec<Vec<usize>>,
    labels: Vec<u32>,
    assigned: u64,
    /// Bit `l - 1` for label `l`.
    used: u64,
    sums: Vec<i64>,
    missing: Vec<usize>,
    /// Vertices allowed to carry label 1.
    one_allowed: u64,
}

impl<'a> Search<'a> {
    fn new(s: &'a IncidenceStructure, cfg: &SearchConfig) -> Result<Self> {
        let n = s.num_vertices();
        cfg.validate(n)?;
        let members: Vec<Vec<usize>> = s.cells().iter().map(|c| c.members.iter().map(|&v| v - 1).collect()).collect();
        let one_allowed = if cfg.symmetry_reduction {
            automorphisms(s, AUTOMORPHISM_CAP)?.point_orbits().iter().fold(0u64, |m, orbit| m | 1 << orbit[0])
        } else {
            u64::MAX
        };
        let mut search = Search {
            s,
            n,
            target: cfg.target_sum,
            missing: members.iter().map(Vec::len).collect(),
            sums: vec![0; members.len()],
            cells_of: s.cells_of_vertex(),
            members,
            labels: vec![0; n],
            assigned: 0,
            used: 0,
            one_allowed,
        };
        for &(v, l) in &cfg.fixed {
            search.assign(v - 1, l);
        }
        Ok(search)
    }

    fn full_mask(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1 << self.n) - 1
        }
    }

    fn assign(&mut self, v: usize, l: u32) {
        self.labels[v] = l;
        self.assigned |= 1 << v;
        self.used |= 1 << (l - 1);
        for &c in &self.cells_of[v] {
            self.sums[c] += i64::from(l);
            self.missing[c] -= 1;
        }
    }

    fn unassign(&mut self, v: usize) {
        let l = self.labels[v];
        self.labels[v] = 0;
        self.assigned &= !(1 << v);
        self.used &= !(1 << (l - 1));
        for &c in &self.cells_of[v] {
            self.sums[c] -= i64::from(l);
            self.missing[c] += 1;
        }
    }

    fn choose_vertex(&self) -> Option<usize> {
        let best = (0..self.members.len()).filter(|&c| self.missing[c] > 0).min_by_key(|&c| (self.missing[c], c));
        match best {
            Some(c) => self.members[c].iter().copied().find(|&v| self.assigned >> v & 1 == 0),
            None => (0..self.n).find(|&v| self.assigned >> v & 1 == 0),
        }
    }

    /// Sum of the `k` smallest and of the `k` largest labels in `avail`, if it has `k`.
    #[inline]
    fn extremes(avail: u64, k: usize) -> Option<(i64, i64)> {
        if (avail.count_ones() as usize) < k {
            return None;
        }
        let (mut lo, mut hi) = (0i64, 0i64);
        let (mut a, mut b) = (avail, avail);
        for _ in 0..k {
            lo += i64::from(a.trailing_zeros()) + 1;
            a &= a - 1;
            let top = 63 - b.leading_zeros();
            hi += i64::from(top) + 1;
            b &= !(1 << top);
        }
        Some((lo, hi))
    }

    #[inline]
    fn has_label(avail: u64, l: i64) -> bool {
        (1..=64).contains(&l) && avail >> (l - 1) & 1 == 1
    }

    /// Whether `k` distinct labels from `avail` can sum to `need`. Exact for
    /// `k <= 2`, an interval bound beyond.
    fn reachable(avail: u64, k: usize, need: i64) -> bool {
        match k {
            0 => need == 0,
            1 => Self::has_label(avail, need),
            2 => {
                let mut a = avail;
                while a != 0 {
                    let x = i64::from(a.trailing_zeros()) + 1;
                    a &= a - 1;
                    if 2 * x >= need {
                        break;
                    }
                    if Self::has_label(avail, need - x) {
                        return true;
                    }
                }
                false
            }
            _ => Self::extremes(avail, k).is_some_and(|(lo, hi)| lo <= need && need <= hi),
        }
    }

    fn cell_ok(&self, c: usize, avail: u64) -> bool {
        Self::reachable(avail, self.missing[c], self.target - self.sums[c])
    }

    /// Every cell can still reach the target with the unused labels.
    fn consistent(&self) -> bool {
        let avail = !self.used & self.full_mask();
        (0..self.members.len()).all(|c| self.cell_ok(c, avail))
    }

    fn feasible(&self, v: usize, l: u32) -> bool {
        if l == 1 && self.one_allowed >> v & 1 == 0 {
            return false;
        }
        let after = self.used | 1 << (l - 1);
        if self.used & 1 == 0 && l != 1 {
            // label 1 still needs an allowed vertex
            let open = self.one_allowed & !self.assigned & !(1 << v) & self.full_mask();
            if open == 0 {
                return false;
            }
        }
        let avail = !after & self.full_mask();
        self.cells_of[v]
            .iter()
            .all(|&c| Self::reachable(avail, self.missing[c] - 1, self.target - self.sums[c] - i64::from(l)))
    }

    /// Smallest feasible label `>= from` for `v`. Each cell through `v` first
    /// narrows the candidates to an interval.
    fn next_feasible(&self, v: usize, from: u32) -> Option<u32> {
        let avail = !self.used & self.full_mask();
        let (mut lo, mut hi) = (i64::from(from), self.n as i64);
        for &c in &self.cells_of[v] {
            let need = self.target - self.sums[c];
            let k = self.missing[c] - 1;
            let (a, b) = if k == 0 { (0, 0) } else { Self::extremes(avail, k)? };
            // avail still contains the candidate, so this interval is a superset
            lo = lo.max(need - b);
            hi = hi.min(need - a);
        }
        (lo.max(1)..=hi).map(|l| l as u32).find(|&l| self.used >> (l - 1) & 1 == 0 && self.feasible(v, l))
    }

    fn leaf(&self) -> Option<MagicLabeling> {
        let labels: Vec<i64> = self.labels.iter().map(|&l| i64::from(l)).collect();
        let report = verify_labeling(self.s, &labels).expect("length matches");
        (report.magic && report.magic_sum == Some(self.target))
            .then(|| MagicLabeling { labels: self.labels.clone(), provenance: None })
    }

    fn run(
        &mut self,
        mut stack: Vec<Frame>,
        cfg: &SearchConfig,
        prior_nodes: u64,
        prior_emitted: u64,
    ) -> SearchOutcome {
        let mut found = Vec::new();
        let mut nodes = 0u64;
        let structure = self.s.name().to_string();
        let stop = |stack: &[Frame], nodes: u64, found: &Vec<MagicLabeling>| Checkpoint {
            structure: structure.clone(),
            target_sum: cfg.target_sum,
            symmetry_reduction: cfg.symmetry_reduction,
            fixed: cfg.fixed.clone(),
            frames: stack
                .iter()
                .map(|f| CheckpointFrame { vertex: f.vertex + 1, label: f.label, next: f.next })
                .collect(),
            nodes_explored: prior_nodes + nodes,
            emitted: prior_emitted + found.len() as u64,
        };
        if stack.is_empty() && self.consistent() {
            match self.choose_vertex() {
                Some(v) => stack.push(Frame { vertex: v, label: None, next: 1 }),
                None => found.extend(self.leaf()),
            }
        }
        while let Some(top) = stack.last_mut() {
            if top.label.take().is_some() {
                let v = top.vertex;
                self.unassign(v);
            }
            let top = stack.last().expect("nonempty");
            let (v, from) = (top.vertex, top.next);
            let Some(l) = self.next_feasible(v, from) else {
                stack.pop();
                continue;
            };
            if cfg.node_budget.is_some_and(|b| nodes >= b) {
                stack.last_mut().expect("nonempty").next = l;
                let checkpoint = stop(&stack, nodes, &found);
                return SearchOutcome {
                    labelings: found,
                    nodes_explored: nodes,
                    complete: false,
                    checkpoint: Some(checkpoint),
                };
            }
            self.assign(v, l);
            nodes += 1;
            let top = stack.last_mut().expect("nonempty");
            top.label = Some(l);
            top.next = l + 1;
            match self.choose_vertex() {
                Some(next) => stack.push(Frame { vertex: next, label: None, next: 1 }),
                None => {
                    if let Some(m) = self.leaf() {
                        found.push(m);
                        if cfg.emit_limit.is_some_and(|e| prior_emitted + found.len() as u64 >= e) {
                            let checkpoint = stop(&stack, nodes, &found);
                            return SearchOutcome {
                                labelings: found,
                                nodes_explored: nodes,
                                complete: false,
                                checkpoint: Some(checkpoint),
                            };
                        }
                    }
                }
            }
        }
        SearchOutcome { labelings: found, nodes_explored: nodes, complete: true, checkpoint: None }
    }
}

/// Runs the search from the root (or the subtree given by `cfg.fixed`).
pub fn solve(s: &IncidenceStructure, cfg: &SearchConfig) -> Result<SearchOutcome> {
    let mut search = Search::new(s, cfg)?;
    Ok(search.run(Vec::new(), cfg, 0, 0))
}

/// Continues a stopped run. `cfg` must describe the same search; its budgets
/// apply afresh to this run, except `emit_limit`, which counts all emissions.
pub fn resume(s: &IncidenceStructure, cfg: &SearchConfig, checkpoint: &Checkpoint) -> Result<SearchOutcome> {
    if checkpoint.structure != s.name()
        || checkpoint.target_sum != cfg.target_sum
        || checkpoint.symmetry_reduction != cfg.symmetry_reduction
        || checkpoint.fixed != cfg.fixed
    {
        return Err(Error::BadCheckpoint("search parameters differ".into()));
    }
    let mut search = Search::new(s, cfg)?;
    let mut stack = Vec::with_capacity(checkpoint.frames.len());
    for (depth, f) in checkpoint.frames.iter().enumerate() {
        let expected = search.choose_vertex().map(|v| v + 1);
        if expected != Some(f.vertex) {
            return Err(Error::BadCheckpoint(format!("frame {depth} expects vertex {expected:?}, found {}", f.vertex)));
        }
        let last = depth + 1 == checkpoint.frames.len();
        match f.label {
            Some(l) if l as usize <= search.n && search.used >> (l - 1) & 1 == 0 && l < f.next => {
                search.assign(f.vertex - 1, l)
            }
            None if last => {}
            _ => return Err(Error::BadCheckpoint(format!("frame {depth} has an unusable label"))),
        }
        stack.push(Frame { vertex: f.vertex - 1, label: f.label, next: f.next });
    }
    if stack.is_empty() {
        return Err(Error::BadCheckpoint("empty stack".into()));
    }
    Ok(search.run(stack, cfg, checkpoint.nodes_explored, checkpoint.emitted))
}

/// Same output as [`solve`], with the labels of the first decision vertex
/// explored on separate workers. Budgeted or emit-limited runs are sequential.
pub fn solve_parallel(s: &IncidenceStructure, cfg: &SearchConfig, workers: usize) -> Result<SearchOutcome> {
    if workers <= 1 || cfg.node_budget.is_some() || cfg.emit_limit.is_some() {
        return solve(s, cfg);
    }
    let root = Search::new(s, cfg)?;
    let Some(v) = root.choose_vertex().filter(|_| root.consistent()) else {
        return solve(s, cfg);
    };
    let mut branches = Vec::new();
    let mut from = 1;
    while let Some(l) = root.next_feasible(v, from) {
        branches.push(l);
        from = l + 1;
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool");
    let parts = pool.install(|| {
        branches
            .par_iter()
            .map(|&l| {
                let mut sub = cfg.clone();
                sub.fixed.push((v + 1, l));
                solve(s, &sub)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let nodes = branches.len() as u64 + parts.iter().map(|p| p.nodes_explored).sum::<u64>();
    Ok(SearchOutcome {
        labelings: parts.into_iter().flat_map(|p| p.labelings).collect(),
        nodes_explored: nodes,
        complete: true,
        checkpoint: None,
    })
}

/// Orbits of the emitted labelings under `g`.
pub fn orbit_report(outcome: &SearchOutcome, g: &SymmetryGroup) -> Result<OrbitCount<u32>> {
    let labelings: Vec<Vec<u32>> = outcome.labelings.iter().map(|m| m.labels.clone()).collect();
    count_orbits(&labelings, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::incidence::{build_cube, build_tesseract, magic_sum};

    #[test]
    fn reachable_bounds() {
        let avail = 0b1111u64; // labels 1..=4
        assert!(Search::reachable(avail, 2, 3));
        assert!(Search::reachable(avail, 2, 7));
        assert!(!Search::reachable(avail, 2, 2));
        assert!(!Search::reachable(avail, 2, 8));
        assert!(!Search::reachable(avail, 5, 10));
        assert!(Search::reachable(avail, 0, 0));
        assert!(!Search::reachable(avail, 0, 1));
    }

    #[test]
    fn cube_search_completes() {
        let cube = build_cube();
        let out = solve(&cube, &SearchConfig::new(18)).unwrap();
        assert!(out.complete);
        assert!(out.checkpoint.is_none());
        assert!(!out.labelings.is_empty());
        for m in &out.labelings {
            assert!(verify_labeling(&cube, &m.labels_i64()).unwrap().magic);
        }
    }

    #[test]
    fn impossible_cube_sum() {
        let out = solve(&build_cube(), &SearchConfig::new(17)).unwrap();
        assert!(out.complete);
        assert!(out.labelings.is_empty());
    }

    #[test]
    fn bad_target() {
        assert_eq!(solve(&build_cube(), &SearchConfig::new(0)), Err(Error::BadTargetSum(0)));
    }

    #[test]
    fn deterministic() {
        let cube = build_cube();
        assert_eq!(solve(&cube, &SearchConfig::new(18)), solve(&cube, &SearchConfig::new(18)));
    }

    #[test]
    fn parallel_matches_sequential() {
        let cube = build_cube();
        let cfg = SearchConfig::new(18);
        assert_eq!(solve_parallel(&cube, &cfg, 4).unwrap(), solve(&cube, &cfg).unwrap());
    }

    #[test]
    fn budget_and_resume() {
        let cube = build_cube();
        let full = solve(&cube, &SearchConfig::new(18)).unwrap();
        let mut cfg = SearchConfig::new(18);
        cfg.node_budget = Some(40);
        let mut collected = Vec::new();
        let mut out = solve(&cube, &cfg).unwrap();
        assert_eq!(out.nodes_explored, 40);
        let mut rounds = 1;
        loop {
            collected.extend(out.labelings.clone());
            match out.checkpoint {
                Some(cp) => {
                    // a checkpoint survives serialization
                    let cp: Checkpoint = serde_json::from_str(&serde_json::to_string(&cp).unwrap()).unwrap();
                    out = resume(&cube, &cfg, &cp).unwrap();
                    rounds += 1;
                }
                None => break,
            }
        }
        assert!(rounds > 2);
        assert_eq!(collected, full.labelings);
    }

    #[test]
    fn emit_limit_then_resume() {
        let cube = build_cube();
        let full = solve(&cube, &SearchConfig::new(18)).unwrap();
        let mut cfg = SearchConfig::new(18);
        cfg.emit_limit = Some(5);
        let first = solve(&cube, &cfg).unwrap();
        assert_eq!(first.labelings, full.labelings[..5]);
        cfg.emit_limit = None;
        let rest = resume(&cube, &cfg, first.checkpoint.as_ref().unwrap()).unwrap();
        assert!(rest.complete);
        assert_eq!(rest.labelings, full.labelings[5..]);
    }

    #[test]
    fn fixed_restricts_to_subtree() {
        let cube = build_cube();
        let full = solve(&cube, &SearchConfig::new(18)).unwrap();
        let mut cfg = SearchConfig::new(18);
        cfg.fixed = vec![(1, 1), (2, 8)];
        let sub = solve(&cube, &cfg).unwrap();
        let want: Vec<_> = full.labelings.iter().filter(|m| m.labels[0] == 1 && m.labels[1] == 8).cloned().collect();
        let mut got = sub.labelings.clone();
        got.sort();
        let mut want_sorted = want.clone();
        want_sorted.sort();
        assert_eq!(got, want_sorted);
        cfg.fixed = vec![(1, 1), (2, 1)];
        assert!(solve(&cube, &cfg).is_err());
    }

    #[test]
    fn symmetry_reduction_keeps_every_orbit() {
        let cube = build_cube();
        let g = automorphisms(&cube, 1000).unwrap();
        let full = solve(&cube, &SearchConfig::new(18)).unwrap();
        let mut cfg = SearchConfig::new(18);
        cfg.symmetry_reduction = true;
        let reduced = solve(&cube, &cfg).unwrap();
        assert!(reduced.labelings.len() < full.labelings.len());
        assert!(reduced.labelings.iter().all(|m| m.labels[0] == 1));
        let (r, f) = (orbit_report(&reduced, &g).unwrap(), orbit_report(&full, &g).unwrap());
        assert_eq!(r.representatives, f.representatives);
        assert_eq!(f.hits, vec![48; 3]);
    }

    #[test]
    fn tesseract_has_labelings() {
        let t = build_tesseract();
        let mut cfg = SearchConfig::new(magic_sum(&t).unwrap() as i64);
        cfg.emit_limit = Some(3);
        let out = solve(&t, &cfg).unwrap();
        assert_eq!(out.labelings.len(), 3);
        for m in &out.labelings {
            assert_eq!(verify_labeling(&t, &m.labels_i64()).unwrap().magic_sum, Some(68));
        }
    }

    #[test]
    fn empty_outcome_has_no_orbits() {
        let cube = build_cube();
        let g = automorphisms(&cube, 1000).unwrap();
        let none = solve(&cube, &SearchConfig::new(17)).unwrap();
        assert_eq!(orbit_report(&none, &g).unwrap().count, 0);
    }
}
