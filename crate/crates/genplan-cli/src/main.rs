//! Command-line front end: instance generation, synthesis, validation,
//! landmark export, and the benchmark tables.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command as Proc;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use genplan::bench::{self, Budgets};
use genplan::heuristics::Eval;
use genplan::landmarks;
use genplan::pddl;
use genplan::program::{parse_program, PointerDecl};
use genplan::search::{self, Algo, SearchConfig};
use genplan::strips::{Domain, Instance};

#[derive(Parser)]
#[command(name = "genplan", version, about = "Generalized-planning synthesizer")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableId {
    Table1,
    Table2,
    Table3,
}

impl TableId {
    fn number(self) -> u8 {
        match self {
            TableId::Table1 => 1,
            TableId::Table2 => 2,
            TableId::Table3 => 3,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchKind {
    Bfs,
    Pgp,
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalKind {
    Gc,
    Lm,
    LmNorm,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write train/val instance files for a built-in domain.
    Gen {
        /// One of the built-in domain names.
        domain: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Root directory; files land under <out>/<domain>/.
        #[arg(long, default_value = "bench-data")]
        out: PathBuf,
    },
    /// Reproduce a published table over the generated instance sets.
    Bench {
        table: TableId,
        /// Output CSV path.
        #[arg(long)]
        csv: PathBuf,
        /// Per-cell wall-clock budget in seconds.
        #[arg(long, default_value_t = 3600)]
        time_budget: u64,
        /// Per-cell resident-memory budget in MB.
        #[arg(long, default_value_t = 8192)]
        mem_budget: u64,
        /// Root directory holding `gen` output.
        #[arg(long, default_value = "bench-data")]
        data: PathBuf,
        /// Run cells concurrently (each cell is its own process either way).
        #[arg(long)]
        parallel: bool,
    },
    /// Run a program file against every instance in a directory.
    Validate {
        program: PathBuf,
        instances_dir: PathBuf,
    },
    /// Synthesize a program for a PDDL domain and instance set.
    Synth {
        domain: PathBuf,
        instances_dir: PathBuf,
        /// Program length bound, final `end` included.
        #[arg(long)]
        lines: usize,
        /// Pointer allocation, e.g. row=1,col=1.
        #[arg(long)]
        pointers: String,
        #[arg(long, value_enum, default_value_t = SearchKind::Pgp)]
        search: SearchKind,
        #[arg(long, value_enum, default_value_t = EvalKind::Lm)]
        eval: EvalKind,
        /// Break evaluation ties by goto count.
        #[arg(long)]
        tie_f1: bool,
        /// Enumerate test instructions as candidates.
        #[arg(long)]
        enable_tests: bool,
        #[arg(long, default_value_t = 3600)]
        time_budget: u64,
        #[arg(long, default_value_t = 8192)]
        mem_budget: u64,
        /// Evaluate the instances of one expansion across threads.
        #[arg(long)]
        parallel: bool,
        /// Also append the metrics as a CSV row to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Export the landmark graph of one instance as DOT.
    Landmarks {
        domain: PathBuf,
        problem: PathBuf,
        /// Pointer allocation, e.g. location=2; omit for no pointer nodes.
        #[arg(long)]
        pointers: Option<String>,
        #[arg(long)]
        dot: PathBuf,
    },
    /// Run one bench cell in-process and print its CSV row.
    #[command(hide = true)]
    BenchCell {
        table: u8,
        index: usize,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        time_budget: u64,
        #[arg(long)]
        mem_budget: u64,
    },
}

fn main() {
    if let Err(e) = dispatch(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Gen { domain, seed, out } => gen(&domain, seed, &out),
        Cmd::Bench {
            table,
            csv,
            time_budget,
            mem_budget,
            data,
            parallel,
        } => bench_table(table, &csv, time_budget, mem_budget, &data, parallel),
        Cmd::Validate {
            program,
            instances_dir,
        } => validate(&program, &instances_dir),
        Cmd::Synth {
            domain,
            instances_dir,
            lines,
            pointers,
            search,
            eval,
            tie_f1,
            enable_tests,
            time_budget,
            mem_budget,
            parallel,
            csv,
        } => synth(
            &domain,
            &instances_dir,
            lines,
            &pointers,
            search,
            eval,
            tie_f1,
            enable_tests,
            time_budget,
            mem_budget,
            parallel,
            csv.as_deref(),
        ),
        Cmd::Landmarks {
            domain,
            problem,
            pointers,
            dot,
        } => landmarks_cmd(&domain, &problem, pointers.as_deref(), &dot),
        Cmd::BenchCell {
            table,
            index,
            data,
            time_budget,
            mem_budget,
        } => bench_cell(table, index, &data, time_budget, mem_budget),
    }
}

fn gen(domain: &str, seed: u64, out: &Path) -> Result<()> {
    let dir = bench::generate_to_dir(domain, seed, out)
        .with_context(|| format!("generating {domain}"))?;
    let count = |split: &str| {
        bench::list_instance_files(&dir.join(split))
            .map(|f| f.len())
            .unwrap_or(0)
    };
    println!(
        "{domain}: wrote {} training and {} validation instances under {}",
        count("train"),
        count("val"),
        dir.display()
    );
    Ok(())
}

fn bench_table(
    table: TableId,
    csv: &Path,
    time_budget: u64,
    mem_budget: u64,
    data: &Path,
    parallel: bool,
) -> Result<()> {
    let cells = bench::table_cells(table.number());
    // Every cell runs in a child process so each row's memory peak is its
    // own; the parent only collates rows.
    let exe = std::env::current_exe().context("locating own executable")?;
    let spawn = |index: usize| -> Result<std::process::Child> {
        Proc::new(&exe)
            .arg("bench-cell")
            .arg(table.number().to_string())
            .arg(index.to_string())
            .arg("--data")
            .arg(data)
            .arg("--time-budget")
            .arg(time_budget.to_string())
            .arg("--mem-budget")
            .arg(mem_budget.to_string())
            .stdout(std::process::Stdio::piped())
            .spawn()
            .context("spawning bench cell")
    };
    let collect = |child: std::process::Child, cell: &bench::Cell| -> Result<String> {
        let out = child.wait_with_output()?;
        let row = String::from_utf8_lossy(&out.stdout).trim().to_string();
        if !out.status.success() || row.is_empty() {
            bail!(
                "cell {} {} {} failed: {}",
                cell.domain,
                bench::algo_label(cell.algo),
                bench::eval_label(cell.evals),
                String::from_utf8_lossy(&out.stderr)
            );
        }
        eprintln!("{row}");
        Ok(row)
    };

    let mut rows = Vec::with_capacity(cells.len());
    if parallel {
        let jobs = std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(4);
        for chunk in (0..cells.len()).collect::<Vec<_>>().chunks(jobs) {
            let children: Vec<_> = chunk
                .iter()
                .map(|&i| spawn(i).map(|c| (c, i)))
                .collect::<Result<_>>()?;
            for (child, i) in children {
                rows.push(collect(child, &cells[i])?);
            }
        }
    } else {
        for (i, cell) in cells.iter().enumerate() {
            rows.push(collect(spawn(i)?, cell)?);
        }
    }

    let mut body = String::from(bench::csv_header());
    for row in &rows {
        body.push('\n');
        body.push_str(row);
    }
    body.push('\n');
    fs::write(csv, body).with_context(|| format!("writing {}", csv.display()))?;
    println!("wrote {} rows to {}", rows.len(), csv.display());
    Ok(())
}

fn bench_cell(table: u8, index: usize, data: &Path, time_budget: u64, mem_budget: u64) -> Result<()> {
    let cells = bench::table_cells(table);
    let cell = cells
        .get(index)
        .ok_or_else(|| anyhow!("table {table} has no cell {index}"))?;
    let budgets = Budgets {
        time: Duration::from_secs(time_budget),
        mem_mb: mem_budget,
        parallel_eval: false,
    };
    let out = bench::run_cell(cell, data, budgets)?;
    let recipe = bench::recipe(cell.domain).unwrap();
    let (domain, _) = bench::load_split(data, cell.domain, "train")?;
    let n_pointers = bench::pointer_decls_from_counts(recipe.pointers, &domain)?.len();
    println!("{}", bench::csv_row(cell, recipe.lines, n_pointers, &out.metrics));
    Ok(())
}

/// Domain text plus sorted instances for a directory of problem files.
fn load_dir(instances_dir: &Path) -> Result<(Arc<Domain>, Vec<Arc<Instance>>)> {
    let domain_file = bench::find_domain_file(instances_dir).ok_or_else(|| {
        anyhow!(
            "no domain.pddl in {} or its parent",
            instances_dir.display()
        )
    })?;
    let domain = bench::load_domain_file(&domain_file)?;
    let files = bench::list_instance_files(instances_dir)?;
    if files.is_empty() {
        bail!("no .pddl instances under {}", instances_dir.display());
    }
    let instances = bench::load_problem_files(&domain, &files)?;
    Ok((domain, instances))
}

fn validate(program: &Path, instances_dir: &Path) -> Result<()> {
    let (domain, instances) = load_dir(instances_dir)?;
    let text = fs::read_to_string(program)
        .with_context(|| format!("reading {}", program.display()))?;
    let prog = parse_program(&text, &domain)?;
    let report = search::validate(&prog, domain, &instances)?;
    for row in &report.rows {
        println!(
            "{}: {} ({} actions)",
            row.instance,
            match row.outcome {
                genplan::vm::Outcome::Solved => "solved",
                genplan::vm::Outcome::FailedIncorrect => "failed (wrong final state)",
                genplan::vm::Outcome::FailedInfinite { by_limit: false } =>
                    "failed (revisited state)",
                genplan::vm::Outcome::FailedInfinite { by_limit: true } =>
                    "failed (step limit)",
                genplan::vm::Outcome::PendingUndefined => "failed (undefined line)",
            },
            row.plan_len
        );
    }
    let solved = report.rows.iter().filter(|r| r.outcome == genplan::vm::Outcome::Solved).count();
    println!("{}/{} solved", solved, report.rows.len());
    if !report.pass() {
        std::process::exit(1);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn synth(
    domain_file: &Path,
    instances_dir: &Path,
    lines: usize,
    pointers: &str,
    search_kind: SearchKind,
    eval: EvalKind,
    tie_f1: bool,
    enable_tests: bool,
    time_budget: u64,
    mem_budget: u64,
    parallel: bool,
    csv: Option<&Path>,
) -> Result<()> {
    let domain = bench::load_domain_file(domain_file)?;
    let files = bench::list_instance_files(instances_dir)?;
    if files.is_empty() {
        bail!("no .pddl instances under {}", instances_dir.display());
    }
    let train = bench::load_problem_files(&domain, &files)?;
    let decls = bench::pointer_decls_from_counts(pointers, &domain)?;

    let algo = match search_kind {
        SearchKind::Bfs => Algo::Bfs,
        SearchKind::Pgp => Algo::Pgp,
    };
    let mut evals = vec![match eval {
        EvalKind::Gc => Eval::GoalCount,
        EvalKind::Lm => Eval::Landmarks,
        EvalKind::LmNorm => Eval::LandmarksNorm,
    }];
    if tie_f1 {
        evals.push(Eval::GotoCount);
    }

    let mut cfg = SearchConfig::new(algo, evals.clone(), lines);
    cfg.enable_tests = enable_tests;
    cfg.parallel = parallel;
    cfg.time_budget = Duration::from_secs(time_budget);
    cfg.mem_budget_mb = mem_budget;
    let out = search::synthesize(domain.clone(), &train, &decls, cfg)?;

    let m = &out.metrics;
    eprintln!(
        "status {:?}: {:.2}s, {} MB peak, {} expanded, {} evaluated, {} dead ends, {} state evaluations, {} active instances",
        m.status,
        m.t_seconds,
        m.m_peak_mb,
        m.expanded,
        m.evaluated,
        m.dead,
        m.se,
        m.active_instances
    );
    if let Some(csv_path) = csv {
        let cell = bench::Cell {
            table: 0,
            domain: "custom",
            algo,
            evals: Box::leak(evals.into_boxed_slice()),
        };
        let row = bench::csv_row(&cell, lines, decls.len(), m);
        let mut body = if csv_path.exists() {
            fs::read_to_string(csv_path)?
        } else {
            format!("{}\n", bench::csv_header())
        };
        body.push_str(&row);
        body.push('\n');
        fs::write(csv_path, body)?;
    }
    match out.program {
        Some(p) => {
            println!("{}", p.format(&domain));
            Ok(())
        }
        None => {
            bail!("no program: {:?}", m.status);
        }
    }
}

fn landmarks_cmd(
    domain_file: &Path,
    problem_file: &Path,
    pointers: Option<&str>,
    dot: &Path,
) -> Result<()> {
    let domain = bench::load_domain_file(domain_file)?;
    let text = fs::read_to_string(problem_file)
        .with_context(|| format!("reading {}", problem_file.display()))?;
    let instance = Arc::new(pddl::parse_problem(
        &text,
        &problem_file.to_string_lossy(),
        &domain,
    )?);
    let g = Arc::new(genplan::strips::Grounded::new(domain, instance)?);
    let decls: Vec<PointerDecl> = match pointers {
        Some(spec) => bench::pointer_decls_from_counts(spec, &g.domain)?,
        None => Vec::new(),
    };
    let graph = landmarks::build(&g, &decls)?;
    fs::write(dot, landmarks::to_dot(&graph, &g, &decls))
        .with_context(|| format!("writing {}", dot.display()))?;
    let gn_edges: usize = (0..graph.len()).map(|q| graph.gn_preds[q].len()).sum();
    let nat_edges: usize = (0..graph.len()).map(|q| graph.nat_preds[q].len()).sum();
    println!(
        "{} landmarks ({} greedy-necessary edges, {} natural edges) written to {}",
        graph.len(),
        gn_edges,
        nat_edges,
        dot.display()
    );
    for note in &graph.notes {
        eprintln!("note: {note}");
    }
    Ok(())
}
