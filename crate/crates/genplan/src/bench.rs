//! Benchmark recipes: on-disk instance sets for the eight built-in
//! domains, regression checks for the bundled reference programs, and the
//! table harness behind `bench`.
//!
//! Instance sets live under `<root>/<domain>/` as `domain.pddl` plus
//! zero-padded `train/NN.pddl` and `val/NN.pddl` files, so the same tree
//! serves `synth`, `validate` and the table runs. Generation is
//! deterministic per seed, byte for byte.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use thiserror::Error;

use crate::domains;
use crate::heuristics::Eval;
use crate::pddl;
use crate::program::{parse_program, PointerDecl};
use crate::search::{self, Algo, Metrics, SearchConfig, Status, Synthesis, SynthError};
use crate::strips::{Domain, Instance};

/// Synthesis bounds and pointer allocation for one built-in domain.
pub struct Recipe {
    pub domain: &'static str,
    /// Program length bound, final `end` included.
    pub lines: usize,
    /// Pointer allocation as `type=count` pairs, in declaration order.
    pub pointers: &'static str,
    /// Corridor's reference solution needs test instructions.
    pub enable_tests: bool,
}

pub const RECIPES: [Recipe; 8] = [
    Recipe {
        domain: "baking",
        lines: 13,
        pointers: "egg=1,flour=1,pan=1,oven=1,cake=1,soap=1",
        enable_tests: false,
    },
    Recipe {
        domain: "corridor",
        lines: 11,
        pointers: "location=2",
        enable_tests: true,
    },
    Recipe {
        domain: "gripper",
        lines: 8,
        pointers: "ball=1,room=2,gripper=1",
        enable_tests: false,
    },
    Recipe {
        domain: "intrusion",
        lines: 9,
        pointers: "host=1",
        enable_tests: false,
    },
    Recipe {
        domain: "lock",
        lines: 12,
        pointers: "location=2",
        enable_tests: false,
    },
    Recipe {
        domain: "ontable",
        lines: 11,
        pointers: "block=3",
        enable_tests: false,
    },
    Recipe {
        domain: "spanner",
        lines: 12,
        pointers: "location=2,spanner=1,nut=1,man=1",
        enable_tests: false,
    },
    Recipe {
        domain: "visitall",
        lines: 7,
        pointers: "row=1,col=1",
        enable_tests: false,
    },
];

pub fn recipe(domain: &str) -> Option<&'static Recipe> {
    RECIPES.iter().find(|r| r.domain == domain)
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("unknown domain {0:?}")]
    UnknownDomain(String),
    #[error(transparent)]
    Pddl(#[from] pddl::Diagnostic),
    #[error(transparent)]
    Program(#[from] crate::program::ProgramError),
    #[error("no {split} instances under {dir}; run `gen {domain}` with the same --out root first")]
    Missing {
        domain: String,
        split: &'static str,
        dir: PathBuf,
    },
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("{0}")]
    PointerSpec(String),
}

/// Expand a `type=count,...` allocation into named declarations z1, z2, ...
/// in spec order.
pub fn pointer_decls_from_counts(
    spec: &str,
    domain: &Domain,
) -> Result<Vec<PointerDecl>, BenchError> {
    let bad = |msg: String| BenchError::PointerSpec(msg);
    let mut out: Vec<PointerDecl> = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (ty_name, count) = part
            .split_once('=')
            .ok_or_else(|| bad(format!("pointer allocation {part:?} must be type=count")))?;
        let ty = domain
            .types
            .id(ty_name.trim())
            .ok_or_else(|| bad(format!("unknown pointer type {:?}", ty_name.trim())))?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad pointer count {:?}", count.trim())))?;
        for _ in 0..count {
            out.push(PointerDecl {
                name: format!("z{}", out.len() + 1),
                ty,
            });
        }
    }
    if out.is_empty() {
        return Err(bad("empty pointer allocation".into()));
    }
    if out.len() > 64 {
        return Err(bad(format!("{} pointers exceed the limit of 64", out.len())));
    }
    Ok(out)
}

/// Write `domain.pddl` plus train/val instance files for one built-in
/// domain; returns the domain directory.
pub fn generate_to_dir(name: &str, seed: u64, root: &Path) -> Result<PathBuf, BenchError> {
    let (domain, train, val) = domains::generate(name, seed)
        .ok_or_else(|| BenchError::UnknownDomain(name.to_string()))?;
    let dir = root.join(name);
    fs::create_dir_all(dir.join("train"))?;
    fs::create_dir_all(dir.join("val"))?;
    fs::write(dir.join("domain.pddl"), pddl::write_domain(&domain))?;
    for (split, set) in [("train", &train), ("val", &val)] {
        for (i, inst) in set.iter().enumerate() {
            let file = dir.join(split).join(format!("{:02}.pddl", i + 1));
            fs::write(file, pddl::write_problem(&domain, inst))?;
        }
    }
    Ok(dir)
}

/// `.pddl` files under `dir` in filename order, `domain.pddl` excluded.
pub fn list_instance_files(dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let is_pddl = path.extension().is_some_and(|e| e == "pddl");
        let is_domain = path.file_name().is_some_and(|n| n == "domain.pddl");
        if is_pddl && !is_domain {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// The domain file serving an instance directory: `domain.pddl` in the
/// directory itself or next to it.
pub fn find_domain_file(instances_dir: &Path) -> Option<PathBuf> {
    let own = instances_dir.join("domain.pddl");
    if own.is_file() {
        return Some(own);
    }
    let sibling = instances_dir.parent()?.join("domain.pddl");
    sibling.is_file().then_some(sibling)
}

pub fn load_domain_file(path: &Path) -> Result<Arc<Domain>, BenchError> {
    let text = fs::read_to_string(path)?;
    Ok(Arc::new(pddl::parse_domain(
        &text,
        &path.to_string_lossy(),
    )?))
}

pub fn load_problem_files(
    domain: &Domain,
    files: &[PathBuf],
) -> Result<Vec<Arc<Instance>>, BenchError> {
    let mut out = Vec::with_capacity(files.len());
    for path in files {
        let text = fs::read_to_string(path)?;
        out.push(Arc::new(pddl::parse_problem(
            &text,
            &path.to_string_lossy(),
            domain,
        )?));
    }
    Ok(out)
}

/// Load one generated split back from disk.
pub fn load_split(
    root: &Path,
    domain_name: &str,
    split: &'static str,
) -> Result<(Arc<Domain>, Vec<Arc<Instance>>), BenchError> {
    let dir = root.join(domain_name);
    let missing = || BenchError::Missing {
        domain: domain_name.to_string(),
        split,
        dir: dir.join(split),
    };
    let domain_file = dir.join("domain.pddl");
    if !domain_file.is_file() {
        return Err(missing());
    }
    let split_dir = dir.join(split);
    if !split_dir.is_dir() {
        return Err(missing());
    }
    let files = list_instance_files(&split_dir)?;
    if files.is_empty() {
        return Err(missing());
    }
    let domain = load_domain_file(&domain_file)?;
    let instances = load_problem_files(&domain, &files)?;
    Ok((domain, instances))
}

/// One (domain, search, evaluation) benchmark cell.
#[derive(Debug, Clone, Copy)]
pub struct Cell {
    pub table: u8,
    pub domain: &'static str,
    pub algo: Algo,
    pub evals: &'static [Eval],
}

const GC: &[Eval] = &[Eval::GoalCount];
const LM: &[Eval] = &[Eval::Landmarks];
const GC_F1: &[Eval] = &[Eval::GoalCount, Eval::GotoCount];
const LM_F1: &[Eval] = &[Eval::Landmarks, Eval::GotoCount];

/// The published grid: tables 1 and 3 run BFS/PGP under goal count and
/// landmark count; table 2 adds the goto-count tie-breaker to each
/// search's stronger configuration.
pub fn table_cells(table: u8) -> Vec<Cell> {
    let configs: &[(Algo, &'static [Eval])] = match table {
        1 | 3 => &[
            (Algo::Bfs, GC),
            (Algo::Bfs, LM),
            (Algo::Pgp, GC),
            (Algo::Pgp, LM),
        ],
        2 => &[(Algo::Bfs, GC_F1), (Algo::Pgp, LM_F1)],
        _ => return Vec::new(),
    };
    let mut cells = Vec::new();
    for r in &RECIPES {
        for &(algo, evals) in configs {
            cells.push(Cell {
                table,
                domain: r.domain,
                algo,
                evals,
            });
        }
    }
    cells
}

pub fn algo_label(algo: Algo) -> &'static str {
    match algo {
        Algo::Bfs => "bfs",
        Algo::Pgp => "pgp",
    }
}

pub fn eval_label(evals: &[Eval]) -> String {
    evals
        .iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join("+")
}

pub fn csv_header() -> &'static str {
    "table,domain,search,eval,n,z,t_s,m_mb,ex,ev,dead,se,status"
}

/// One CSV row. Budget exhaustion replaces the spent resource with a
/// literal marker: TE in the time column, ME in the memory column.
pub fn csv_row(cell: &Cell, lines: usize, n_pointers: usize, m: &Metrics) -> String {
    let t_s = match m.status {
        Status::TimeExceeded => "TE".to_string(),
        _ => format!("{:.2}", m.t_seconds),
    };
    let m_mb = match m.status {
        Status::MemExceeded => "ME".to_string(),
        _ => m.m_peak_mb.to_string(),
    };
    let status = match m.status {
        Status::Solved => "solved",
        Status::Unsolvable => "unsolvable",
        Status::TimeExceeded => "te",
        Status::MemExceeded => "me",
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        cell.table,
        cell.domain,
        algo_label(cell.algo),
        eval_label(cell.evals),
        lines,
        n_pointers,
        t_s,
        m_mb,
        m.expanded,
        m.evaluated,
        m.dead,
        m.se,
        status,
    )
}

#[derive(Debug, Clone, Copy)]
pub struct Budgets {
    pub time: Duration,
    pub mem_mb: u64,
    /// Evaluate instances of one expansion across threads.
    pub parallel_eval: bool,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            time: Duration::from_secs(3600),
            mem_mb: 8192,
            parallel_eval: false,
        }
    }
}

/// Run one cell against the generated training split under `root`.
pub fn run_cell(cell: &Cell, root: &Path, budgets: Budgets) -> Result<Synthesis, BenchError> {
    let r = recipe(cell.domain).ok_or_else(|| BenchError::UnknownDomain(cell.domain.into()))?;
    let (domain, train) = load_split(root, cell.domain, "train")?;
    let pointers = pointer_decls_from_counts(r.pointers, &domain)?;
    let mut cfg = SearchConfig::new(cell.algo, cell.evals.to_vec(), r.lines);
    cfg.enable_tests = r.enable_tests;
    cfg.time_budget = budgets.time;
    cfg.mem_budget_mb = budgets.mem_mb;
    cfg.parallel = budgets.parallel_eval;
    Ok(search::synthesize(domain, &train, &pointers, cfg)?)
}

/// Outcome of replaying one bundled reference program on its full
/// generated instance set.
#[derive(Debug)]
pub struct FixtureReport {
    pub domain: &'static str,
    pub instances: usize,
    pub first_failure: Option<String>,
}

/// Validate every bundled reference program against its freshly generated
/// training and validation sets.
pub fn fixture_check(seed: u64) -> Result<Vec<FixtureReport>, BenchError> {
    let mut reports = Vec::new();
    for r in &RECIPES {
        let (domain, train, val) = domains::generate(r.domain, seed)
            .ok_or_else(|| BenchError::UnknownDomain(r.domain.into()))?;
        let text = domains::fixture_text(r.domain)
            .ok_or_else(|| BenchError::UnknownDomain(r.domain.into()))?;
        let program = parse_program(text, &domain)?;
        let domain = Arc::new(domain);
        let instances: Vec<Arc<Instance>> =
            train.into_iter().chain(val).map(Arc::new).collect();
        let report = search::validate(&program, domain, &instances)?;
        reports.push(FixtureReport {
            domain: r.domain,
            instances: report.rows.len(),
            first_failure: report.first_failure().map(|row| row.instance.clone()),
        });
    }
    Ok(reports)
}
