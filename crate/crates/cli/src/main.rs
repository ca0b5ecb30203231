//! `magic24`: reproducible pipelines over the magic24 engine.
//!
//! Every command writes JSON or JSON-lines artifacts plus a run manifest with
//! SHA-256 digests. Exit codes: 0 success, 1 verification failure, 2 usage,
//! parse or I/O error.

mod manifest;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use magic24_core::incidence::{LabelingFile, StructureFile};
use magic24_core::labelings::{enumerate_parity_binary_with, parity_solutions_gf2};
use magic24_core::solver::{resume, solve_parallel, Checkpoint};
use magic24_core::symmetry::{GroupFile, SymmetryGroup};
use magic24_core::{
    automorphisms, build_24cell, build_cube, build_tesseract, canonical_form, construct_from, count_orbits, magic_sum,
    permute_trits, symmetry_24cell, ternary_16cell, verify_labeling, ConstructionSummary, IncidenceStructure,
    SearchConfig, TritPerm,
};

use manifest::Manifest;

#[derive(Parser)]
#[command(name = "magic24", version, about = "Exact construction and search of magic 24-cells")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StructureName {
    #[value(name = "24cell")]
    Cell24,
    Cube,
    Tesseract,
}

#[derive(Subcommand)]
enum Command {
    /// Write a built-in incidence structure.
    GenStructure {
        name: StructureName,
        #[arg(long)]
        out: PathBuf,
    },
    /// Enumerate weight-12 binary labelings with an odd count in every cell.
    ParitySearch {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, env = "MAGIC24_WORKERS", default_value_t = 1)]
        workers: usize,
        /// Cross-check against GF(2) elimination.
        #[arg(long)]
        gf2_check: bool,
    },
    /// Write the three-16-cell ternary labeling.
    Ternary {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Relabel trits, e.g. `012→201` or `201`.
        #[arg(long, default_value = "012")]
        perm: String,
    },
    /// Build every mixed-radix magic labeling and count symmetry classes.
    Construct {
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, env = "MAGIC24_WORKERS", default_value_t = 1)]
        workers: usize,
    },
    /// Replace labelings by their lex-least images under a group.
    Canonicalize {
        labelings: PathBuf,
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Count orbits of a set of labelings.
    CountOrbits {
        labelings: PathBuf,
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "MAGIC24_WORKERS", default_value_t = 1)]
        workers: usize,
    },
    /// Export a symmetry group as explicit permutations.
    Group {
        #[arg(long)]
        structure: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Backtracking search for magic labelings.
    Solve {
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Overrides `node_budget` from the config.
        #[arg(long)]
        budget: Option<u64>,
        /// Continue from a checkpoint written by an earlier run.
        #[arg(long)]
        resume: Option<PathBuf>,
        #[arg(long, env = "MAGIC24_WORKERS", default_value_t = 1)]
        workers: usize,
    },
    /// Check a labeling; exits 1 unless it is magic.
    Verify {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        labeling: PathBuf,
    },
}

#[derive(clap::Args)]
struct GroupArgs {
    /// Group export to use (default: the 24-cell symmetry group).
    #[arg(long, conflicts_with = "structure")]
    group: Option<PathBuf>,
    /// Use the automorphism group of this structure.
    #[arg(long)]
    structure: Option<PathBuf>,
}

#[derive(Deserialize)]
struct SolveConfigFile {
    structure: PathBuf,
    #[serde(flatten)]
    search: SearchConfig,
}

#[derive(Serialize)]
struct TernaryFile {
    structure: String,
    trit_perm: TritPerm,
    trits: Vec<u8>,
}

/// A verification failure, reported with exit code 1.
#[derive(Debug)]
struct NotMagic;

impl std::fmt::Display for NotMagic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("labeling is not magic")
    }
}

impl std::error::Error for NotMagic {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<NotMagic>() => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::GenStructure { name, out } => gen_structure(name, &out),
        Command::ParitySearch { structure, out, workers, gf2_check } => {
            parity_search(&structure, &out, workers, gf2_check)
        }
        Command::Ternary { structure, out, perm } => ternary(&structure, &out, &perm),
        Command::Construct { out, workers } => construct(&out, workers),
        Command::Canonicalize { labelings, group, out } => canonicalize(&labelings, &group, &out),
        Command::CountOrbits { labelings, group, out, workers } => count(&labelings, &group, out.as_deref(), workers),
        Command::Group { structure, out } => export_group(structure.as_deref(), &out),
        Command::Solve { config, out, budget, resume, workers } => {
            run_solve(&config, &out, budget, resume.as_deref(), workers)
        }
        Command::Verify { structure, labeling } => verify(&structure, &labeling),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_structure(path: &Path) -> Result<IncidenceStructure> {
    Ok(IncidenceStructure::from_file(read_json::<StructureFile>(path)?)?)
}

fn to_json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("serializable");
    s.push('\n');
    s
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_bytes(path, to_json_line(value).as_bytes())
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Sizes the global rayon pool used by the engine's parallel paths.
fn init_workers(workers: usize) -> Result<()> {
    anyhow::ensure!(workers >= 1, "--workers must be at least 1");
    rayon::ThreadPoolBuilder::new().num_threads(workers).build_global().context("configuring worker threads")
}

fn gen_structure(name: StructureName, out: &Path) -> Result<()> {
    let mut manifest = Manifest::start("gen-structure");
    let s = match name {
        StructureName::Cell24 => build_24cell(),
        StructureName::Cube => build_cube(),
        StructureName::Tesseract => build_tesseract(),
    };
    manifest.param("name", s.name());
    write_json(out, &s.to_file())?;
    manifest.output(out)?;
    manifest.write_beside(out)?;
    let sum = magic_sum(&s).map_or_else(|e| format!("undefined ({e})"), |m| m.to_string());
    println!("{} vertices, {} cells, magic sum {sum}", s.num_vertices(), s.num_cells());
    Ok(())
}

fn parity_search(structure: &Path, out: &Path, workers: usize, gf2_check: bool) -> Result<()> {
    let mut manifest = Manifest::start("parity-search");
    manifest.param("workers", workers);
    manifest.param("gf2_check", gf2_check);
    manifest.input(structure)?;
    let s = load_structure(structure)?;
    init_workers(workers)?;
    let result = enumerate_parity_binary_with(&s, workers)?;
    write_json(out, &result.to_file())?;
    manifest.output(out)?;
    manifest.write_beside(out)?;
    let mut line = result.summary();
    if gf2_check {
        let gf2 = parity_solutions_gf2(&s)?;
        if gf2.solutions == result.solutions {
            line.push_str(" gf2: agree");
        } else {
            line.push_str(" gf2: DISAGREE");
            println!("{line}");
            return Err(NotMagic.into());
        }
    }
    println!("{line}");
    Ok(())
}

fn ternary(structure: &Path, out: &Path, perm: &str) -> Result<()> {
    let mut manifest = Manifest::start("ternary");
    manifest.input(structure)?;
    let pi: TritPerm = perm.parse()?;
    manifest.param("perm", pi.to_string());
    let s = load_structure(structure)?;
    let t = permute_trits(&ternary_16cell(&s)?, pi);
    write_json(out, &TernaryFile { structure: s.name().into(), trit_perm: pi, trits: t.trits().to_vec() })?;
    manifest.output(out)?;
    manifest.write_beside(out)?;
    let counts = (0..3).map(|d| t.trits().iter().filter(|&&x| x == d).count().to_string());
    println!("trit counts {}", counts.collect::<Vec<_>>().join(","));
    Ok(())
}

fn construct(out: &Path, workers: usize) -> Result<()> {
    let mut manifest = Manifest::start("construct");
    manifest.param("workers", workers);
    init_workers(workers)?;
    let s = build_24cell();
    let parity = enumerate_parity_binary_with(&s, workers)?;
    let c = construct_from(&parity.balanced, &ternary_16cell(&s)?)?;
    let g = symmetry_24cell(&s)?;
    let orbits = count_orbits(&c.distinct_labels(), &g)?;

    let mut failures = 0usize;
    let mut lines = String::with_capacity(c.raw() * 120);
    for m in &c.labelings {
        if !verify_labeling(&s, &m.labels_i64())?.magic {
            failures += 1;
        }
        lines.push_str(&to_json_line(m));
    }
    let labelings_path = out.join("labelings.jsonl");
    write_bytes(&labelings_path, lines.as_bytes())?;
    let reps: String = orbits.representatives.iter().map(|r| to_json_line(&json!({ "labels": r }))).collect();
    let reps_path = out.join("representatives.jsonl");
    write_bytes(&reps_path, reps.as_bytes())?;
    let summary = ConstructionSummary { raw: c.raw(), distinct: c.distinct(), orbits: orbits.count };
    let summary_path = out.join("summary.json");
    write_json(&summary_path, &summary)?;
    for p in [&labelings_path, &reps_path, &summary_path] {
        manifest.output(p)?;
    }
    manifest.write(&out.join("manifest.json"))?;
    println!(
        "raw={} distinct={} orbits={} triples={} verify_failures={failures}",
        c.raw(),
        c.distinct(),
        orbits.count,
        c.triples.len()
    );
    if failures > 0 {
        return Err(NotMagic.into());
    }
    Ok(())
}

/// Labelings from either one labeling file or JSON lines with a `labels` field.
fn read_labelings(path: &Path) -> Result<Vec<Vec<i64>>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if let Ok(single) = serde_json::from_str::<LabelingFile>(&text) {
        return Ok(vec![single.labels]);
    }
    #[derive(Deserialize)]
    struct Line {
        labels: Vec<i64>,
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str::<Line>(l)
                .map(|x| x.labels)
                .with_context(|| format!("parsing {} line {}", path.display(), i + 1))
        })
        .collect()
}

fn resolve_group(args: &GroupArgs, manifest: &mut Manifest) -> Result<SymmetryGroup> {
    if let Some(path) = &args.group {
        manifest.input(path)?;
        return Ok(SymmetryGroup::from_file(read_json::<GroupFile>(path)?)?);
    }
    match &args.structure {
        Some(path) => {
            manifest.input(path)?;
            group_of(&load_structure(path)?)
        }
        None => Ok(symmetry_24cell(&build_24cell())?),
    }
}

fn group_of(s: &IncidenceStructure) -> Result<SymmetryGroup> {
    if s.same_incidence(&build_24cell()) {
        Ok(symmetry_24cell(s)?)
    } else {
        Ok(automorphisms(s, 1 << 20)?)
    }
}

fn canonicalize(input: &Path, args: &GroupArgs, out: &Path) -> Result<()> {
    let mut manifest = Manifest::start("canonicalize");
    manifest.input(input)?;
    let g = resolve_group(args, &mut manifest)?;
    let labelings = read_labelings(input)?;
    let mut lines = String::new();
    for l in &labelings {
        lines.push_str(&to_json_line(&json!({ "labels": canonical_form(l, &g)? })));
    }
    write_bytes(out, lines.as_bytes())?;
    manifest.output(out)?;
    manifest.write_beside(out)?;
    println!("canonicalized {} labelings under a group of order {}", labelings.len(), g.order());
    Ok(())
}

fn count(input: &Path, args: &GroupArgs, out: Option<&Path>, workers: usize) -> Result<()> {
    let mut manifest = Manifest::start("count-orbits");
    manifest.param("workers", workers);
    manifest.input(input)?;
    init_workers(workers)?;
    let g = resolve_group(args, &mut manifest)?;
    let labelings = read_labelings(input)?;
    let orbits = count_orbits(&labelings, &g)?;
    if let Some(out) = out {
        write_json(out, &orbits)?;
        manifest.output(out)?;
        manifest.write_beside(out)?;
    }
    println!("labelings={} orbits={}", labelings.len(), orbits.count);
    Ok(())
}

fn export_group(structure: Option<&Path>, out: &Path) -> Result<()> {
    let mut manifest = Manifest::start("group");
    let g = match structure {
        Some(p) => {
            manifest.input(p)?;
            group_of(&load_structure(p)?)?
        }
        None => symmetry_24cell(&build_24cell())?,
    };
    write_json(out, &g.to_file())?;
    manifest.output(out)?;
    manifest.write_beside(out)?;
    println!("order {}", g.order());
    Ok(())
}

fn run_solve(config: &Path, out: &Path, budget: Option<u64>, resume_from: Option<&Path>, workers: usize) -> Result<()> {
    let mut manifest = Manifest::start("solve");
    manifest.input(config)?;
    let file: SolveConfigFile = read_json(config)?;
    let structure_path = if file.structure.is_relative() {
        config.parent().unwrap_or(Path::new(".")).join(&file.structure)
    } else {
        file.structure.clone()
    };
    manifest.input(&structure_path)?;
    let s = load_structure(&structure_path)?;
    let mut cfg = file.search;
    if budget.is_some() {
        cfg.node_budget = budget;
    }
    manifest.param("node_budget", cfg.node_budget);
    manifest.param("emit_limit", cfg.emit_limit);
    manifest.param("workers", workers);
    init_workers(workers)?;
    let outcome = match resume_from {
        Some(cp) => {
            manifest.input(cp)?;
            let checkpoint: Checkpoint = read_json(cp)?;
            resume(&s, &cfg, &checkpoint)?
        }
        None => solve_parallel(&s, &cfg, workers)?,
    };
    for m in &outcome.labelings {
        if !verify_labeling(&s, &m.labels_i64())?.magic {
            bail!("solver emitted a non-magic labeling: {:?}", m.labels);
        }
    }
    let lines: String = outcome.labelings.iter().map(to_json_line).collect();
    let labelings_path = out.join("labelings.jsonl");
    write_bytes(&labelings_path, lines.as_bytes())?;
    let summary_path = out.join("summary.json");
    write_json(&summary_path, &outcome.summary())?;
    manifest.output(&labelings_path)?;
    manifest.output(&summary_path)?;
    let checkpoint_path = out.join("checkpoint.json");
    match &outcome.checkpoint {
        Some(cp) => {
            write_json(&checkpoint_path, cp)?;
            manifest.output(&checkpoint_path)?;
        }
        None => {
            if checkpoint_path.exists() {
                fs::remove_file(&checkpoint_path)?;
            }
        }
    }
    manifest.write(&out.join("manifest.json"))?;
    let summary = outcome.summary();
    println!("nodes={} complete={} count={}", summary.nodes, summary.complete, summary.count);
    Ok(())
}

fn verify(structure: &Path, labeling: &Path) -> Result<()> {
    let s = load_structure(structure)?;
    let file: LabelingFile = read_json(labeling)?;
    let report = verify_labeling(&s, &file.labels)?;
    let mut cells: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &sum) in report.cell_sums.iter().enumerate() {
        cells.entry(sum).or_default().push(i + 1);
    }
    println!("permutation of 1..{}: {}", s.num_vertices(), report.is_permutation);
    if report.magic {
        println!("magic sum {}", report.magic_sum.expect("magic implies a common sum"));
        Ok(())
    } else {
        for (i, sum) in report.cell_sums.iter().enumerate() {
            println!("cell {}: {sum}", i + 1);
        }
        println!("not magic");
        Err(NotMagic.into())
    }
}
