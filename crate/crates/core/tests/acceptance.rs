//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//! All criteria are exact integer or set equalities.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use magic24_core::labelings::{enumerate_parity_binary_with, ParityClassification};
use magic24_core::symmetry::signed_permutations_24cell;
use magic24_core::*;

struct Shared {
    s: IncidenceStructure,
    parity: ParityClassification,
    group: SymmetryGroup,
    construction: Construction,
    orbits: OrbitCount<u32>,
}

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn(&Shared) -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn structure(sh: &Shared) -> Outcome {
    let s = &sh.s;
    let members_per_cell: BTreeSet<usize> = s.cells().iter().map(|c| c.members.len()).collect();
    let cells_per_vertex: BTreeSet<usize> = s.cells_of_vertex().iter().map(Vec::len).collect();
    let sum = magic_sum(s).map_err(|e| e.to_string())?;
    let detail = format!(
        "vertices={} cells={} members/cell={members_per_cell:?} cells/vertex={cells_per_vertex:?} magic_sum={sum}",
        s.num_vertices(),
        s.num_cells()
    );
    check(
        s.num_vertices() == 24
            && s.num_cells() == 24
            && members_per_cell == BTreeSet::from([6])
            && cells_per_vertex == BTreeSet::from([6])
            && sum == 75,
        detail,
    )
}

fn parity_search(sh: &Shared) -> Outcome {
    let p = &sh.parity;
    check(
        p.total_candidates == 2_704_156
            && p.solutions.len() == 256
            && p.balanced.len() == 64
            && p.unbalanced.len() == 192,
        p.summary(),
    )
}

fn antipodal_parity(sh: &Shared) -> Outcome {
    let a = antipode_map(&sh.s).map_err(|e| e.to_string())?;
    let bad = sh.parity.solutions.iter().filter(|b| (0..24).any(|v| b.digit(v) == b.digit(a.apply(v)))).count();
    check(bad == 0 && sh.parity.solutions.len() == 256, format!("violations={bad} of {}", sh.parity.solutions.len()))
}

fn oracle_agreement(sh: &Shared) -> Outcome {
    let g = parity_solutions_gf2(&sh.s).map_err(|e| e.to_string())?;
    check(
        g.solutions == sh.parity.solutions,
        format!(
            "gf2 rank={} coset={} weight12={} brute={}",
            g.rank,
            g.coset_size,
            g.solutions.len(),
            sh.parity.solutions.len()
        ),
    )
}

fn symmetry(sh: &Shared) -> Outcome {
    let sub = signed_permutations_24cell(&sh.s).map_err(|e| e.to_string())?;
    let mut cells = sh.s.cell_masks();
    cells.sort_unstable();
    let preserving = sh
        .group
        .elements()
        .iter()
        .filter(|sigma| {
            let mut mapped: Vec<u64> = cells
                .iter()
                .map(|&c| (0..24).filter(|&v| c >> v & 1 == 1).fold(0, |m, v| m | 1 << sigma.apply(v)))
                .collect();
            mapped.sort_unstable();
            mapped == cells
        })
        .count();
    check(
        sh.group.order() == 1152 && sub.order() == 384 && preserving == 1152 && sh.group.is_closed(),
        format!("order={} signed_subgroup={} cell_preserving={preserving}", sh.group.order(), sub.order()),
    )
}

fn constructed_family(sh: &Shared) -> Outcome {
    let c = &sh.construction;
    let not_magic = c
        .labelings
        .iter()
        .filter(|m| {
            let r = verify_labeling(&sh.s, &m.labels_i64()).expect("24 labels");
            !(r.magic && r.magic_sum == Some(75))
        })
        .count();
    check(
        c.triples.len() == 3072
            && c.triples_per_perm == [3072; 6]
            && c.raw() == 6 * 3072 * 4
            && c.raw() == 73_728
            && not_magic == 0
            && sh.orbits.count == 64,
        format!(
            "triples={} raw={} distinct={} not_magic={not_magic} orbits={}",
            c.triples.len(),
            c.raw(),
            c.distinct(),
            sh.orbits.count
        ),
    )
}

fn orbit_structure(sh: &Shared) -> Outcome {
    let sizes: Vec<usize> =
        sh.orbits.representatives.iter().map(|r| symmetry::orbit(r, &sh.group).map(|o| o.len()).unwrap_or(0)).collect();
    let full = sizes.iter().all(|&n| n == 1152) && sh.orbits.hits.iter().all(|&h| h == 1152);
    let detail = if full {
        format!("{} orbits x 1152 = {}", sizes.len(), sizes.iter().sum::<usize>())
    } else {
        format!("orbit sizes {sizes:?}, constructed per orbit {:?}", sh.orbits.hits)
    };
    check(full && sizes.len() * 1152 == 73_728, detail)
}

/// Every bijection `1..=8 -> vertices`, kept when all faces sum to `target`.
fn cube_oracle(s: &IncidenceStructure, target: i64) -> BTreeSet<Vec<u32>> {
    let mut out = BTreeSet::new();
    let mut labels: Vec<u32> = (1..=8).collect();
    let mut c = [0usize; 8];
    let masks = s.cell_masks();
    let mut visit = |l: &[u32]| {
        if masks.iter().all(|&m| (0..8).filter(|&v| m >> v & 1 == 1).map(|v| i64::from(l[v])).sum::<i64>() == target) {
            out.insert(l.to_vec());
        }
    };
    visit(&labels);
    let mut i = 0;
    while i < 8 {
        if c[i] < i {
            if i % 2 == 0 {
                labels.swap(0, i);
            } else {
                labels.swap(c[i], i);
            }
            visit(&labels);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

fn cube(_: &Shared) -> Outcome {
    let s = build_cube();
    let out = solve(&s, &SearchConfig::new(18)).map_err(|e| e.to_string())?;
    let found: BTreeSet<Vec<u32>> = out.labelings.iter().map(|m| m.labels.clone()).collect();
    let oracle = cube_oracle(&s, 18);
    let g = automorphisms(&s, 1000).map_err(|e| e.to_string())?;
    let solver_orbits = orbit_report(&out, &g).map_err(|e| e.to_string())?.count;
    let oracle_orbits = count_orbits(&oracle.iter().cloned().collect::<Vec<_>>(), &g).map_err(|e| e.to_string())?.count;
    let impossible = solve(&s, &SearchConfig::new(17)).map_err(|e| e.to_string())?;
    check(
        out.complete
            && found == oracle
            && found.len() == out.labelings.len()
            && solver_orbits == oracle_orbits
            && impossible.complete
            && impossible.labelings.is_empty()
            && cube_oracle(&s, 17).is_empty(),
        format!(
            "complete={} solver={} oracle={} orbits={solver_orbits}/{oracle_orbits} sum17={}",
            out.complete,
            found.len(),
            oracle.len(),
            impossible.labelings.len()
        ),
    )
}

/// Node budget for the unseeded 24-cell run; the constructed family is
/// contained after about 5.8e7 nodes.
const CONTAINMENT_BUDGET: u64 = 1 << 26;

fn solver_containment(sh: &Shared) -> Outcome {
    let mut cfg = SearchConfig::new(75);
    cfg.node_budget = Some(CONTAINMENT_BUDGET);
    let out = solve(&sh.s, &cfg).map_err(|e| e.to_string())?;
    let report = orbit_report(&out, &sh.group).map_err(|e| e.to_string())?;
    let solver_forms: BTreeSet<&Vec<u32>> = report.representatives.iter().collect();
    let missing = sh.orbits.representatives.iter().filter(|r| !solver_forms.contains(r)).count();
    check(
        missing == 0,
        format!(
            "nodes={} complete={} emitted={} solver_orbits={} constructed_missing={missing}",
            out.nodes_explored,
            out.complete,
            out.labelings.len(),
            report.count
        ),
    )
}

fn determinism(sh: &Shared) -> Outcome {
    let parity = |w: usize| {
        serde_json::to_string(&enumerate_parity_binary_with(&sh.s, w).expect("24-cell").to_file()).expect("json")
    };
    let construct = |w: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(w).build().expect("pool");
        pool.install(|| {
            let c = construct_from(&sh.parity.balanced, &ternary_16cell(&sh.s).expect("24-cell")).expect("construct");
            c.labelings.iter().map(|m| serde_json::to_string(m).expect("json") + "\n").collect::<String>()
        })
    };
    let parity_same = parity(1) == parity(8);
    let construct_same = construct(1) == construct(8);
    check(parity_same && construct_same, format!("parity identical={parity_same} construct identical={construct_same}"))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let s = build_24cell();
    let parity = enumerate_parity_binary(&s).expect("24-cell");
    let group = symmetry_24cell(&s).expect("24-cell group");
    let construction = construct_from(&parity.balanced, &ternary_16cell(&s).expect("24-cell")).expect("construct");
    let orbits = count_orbits(&construction.distinct_labels(), &group).expect("orbits");
    let shared = Shared { s, parity, group, construction, orbits };

    let criteria: [Criterion; 10] = [
        ("1 structure", structure),
        ("2 parity search", parity_search),
        ("3 antipodal parity", antipodal_parity),
        ("4 gf2 oracle agreement", oracle_agreement),
        ("5 symmetry group", symmetry),
        ("6 construction", constructed_family),
        ("7 orbit structure", orbit_structure),
        ("8 cube solver", cube),
        ("9 solver containment", solver_containment),
        ("10 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let t = Instant::now();
        let (tag, detail) = match run(&shared) {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {name}: {tag} ({detail}) [{:.1}s]", t.elapsed().as_secs_f64());
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
