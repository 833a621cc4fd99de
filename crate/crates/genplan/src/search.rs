//! Best-first synthesis of pointer programs over a training set.
//!
//! The frontier holds partial programs, always defined as a prefix: a child
//! fills its parent's first undefined line with one candidate instruction,
//! so the space is a tree and no listing is generated twice. A child that
//! fails any training instance in scope is discarded; a child that solves
//! all of them is checked against the rest of the set and either returned
//! or, in progressive mode, used to grow the scope.
//!
//! Progressive search scores against the first instance only until some
//! candidate solves everything in scope but fails a later instance. That
//! instance then joins the scope, every open program is re-run on it
//! (purging the ones it kills), and the search continues with the richer
//! signal. Plain best-first scores against the full set from the start.
//!
//! Popping order is lexicographic on the evaluation vector, insertion
//! order on ties. Parallel mode evaluates the children of one expansion
//! across worker threads but consumes the results in enumeration order, so
//! every counter and the synthesized program match the sequential run.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::heuristics::{score_scratch, Eval, LmIndex};
use crate::landmarks;
use crate::program::{Instr, PointerDecl, Program};
use crate::strips::{Domain, GroundError, Grounded, Instance, TypeId};
use crate::vm::{ExecContext, NoObserver, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    /// Score against every training instance from the start.
    Bfs,
    /// Grow the instance scope on demand.
    Pgp,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub algo: Algo,
    /// Evaluation vector, most significant first.
    pub evals: Vec<Eval>,
    /// Program length including the trailing end.
    pub lines: usize,
    /// Enumerate predicate tests as candidate instructions.
    pub enable_tests: bool,
    /// Evaluate expansion batches across threads.
    pub parallel: bool,
    /// Track generated listings and count collisions (there should be none).
    pub check_duplicates: bool,
    pub time_budget: Duration,
    pub mem_budget_mb: u64,
}

impl SearchConfig {
    pub fn new(algo: Algo, evals: Vec<Eval>, lines: usize) -> Self {
        SearchConfig {
            algo,
            evals,
            lines,
            enable_tests: false,
            parallel: false,
            check_duplicates: false,
            time_budget: Duration::from_secs(3600),
            mem_budget_mb: 8192,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Solved,
    /// The whole program space was exhausted.
    Unsolvable,
    TimeExceeded,
    MemExceeded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub status: Status,
    pub t_seconds: f64,
    pub m_peak_mb: u64,
    /// Nodes popped for expansion.
    pub expanded: u64,
    /// Programs classified, the root included.
    pub evaluated: u64,
    /// Programs discarded: failed a scoped instance, finished without
    /// solving, or purged by a scope sweep.
    pub dead: u64,
    /// Instance executions charged to surviving programs.
    pub se: u64,
    /// Generated listings already seen before (tracked only on request).
    pub dup_programs: u64,
    /// The returned program was re-run on the full set before acceptance.
    pub revalidated: bool,
    /// Scope size at the end of the search.
    pub active_instances: usize,
}

#[derive(Debug)]
pub struct Synthesis {
    pub program: Option<Program>,
    pub metrics: Metrics,
}

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error("instance {name}: {err}")]
    Landmarks {
        name: String,
        err: landmarks::RelaxedUnsolvable,
    },
    #[error("no training instances")]
    NoInstances,
}

fn status_field_kb(name: &str) -> Option<u64> {
    let text = std::fs::read_to_string("/proc/self/status").ok()?;
    for line in text.lines() {
        let mut it = line.split_whitespace();
        if it.next() == Some(name) {
            return it.next()?.parse().ok();
        }
    }
    None
}

/// Resident set size right now, in MB.
pub fn rss_mb() -> u64 {
    status_field_kb("VmRSS:").unwrap_or(0) / 1024
}

/// Peak resident set size of this process, in MB.
pub fn peak_mb() -> u64 {
    status_field_kb("VmHWM:").unwrap_or(0) / 1024
}

fn push_tuples(slots: &[Vec<u8>], f: &mut impl FnMut(&[u8])) {
    if slots.iter().any(|s| s.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; slots.len()];
    let mut args: Vec<u8> = slots.iter().map(|s| s[0]).collect();
    loop {
        f(&args);
        let mut k = slots.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if idx[k] + 1 < slots[k].len() {
                idx[k] += 1;
                args[k] = slots[k][idx[k]];
                break;
            }
            idx[k] = 0;
            args[k] = slots[k][0];
        }
    }
}

/// Candidate instructions for line `i` of an `n`-line program: actions over
/// compatible pointer tuples, pointer arithmetic, assignments between
/// same-typed pointers, optional predicate tests, then jumps to every line
/// except the end, this one, and the next.
pub fn candidates(
    domain: &Domain,
    pointers: &[PointerDecl],
    i: usize,
    n: usize,
    enable_tests: bool,
) -> Vec<Instr> {
    let mut out = Vec::new();
    let compat = |param: TypeId| -> Vec<u8> {
        pointers
            .iter()
            .enumerate()
            .filter(|(_, p)| domain.types.is_subtype(p.ty, param))
            .map(|(z, _)| z as u8)
            .collect()
    };
    for (si, schema) in domain.schemas.iter().enumerate() {
        let slots: Vec<Vec<u8>> = schema.params.iter().map(|&t| compat(t)).collect();
        push_tuples(&slots, &mut |args| {
            out.push(Instr::Act {
                schema: si as u16,
                args: SmallVec::from_slice(args),
            })
        });
    }
    let nz = pointers.len() as u8;
    // Clear enumerates before inc/dec: it is the one primitive that is
    // applicable in every machine state, so resets surface early on
    // heuristic plateaus where insertion order decides the pop order.
    for z in 0..nz {
        out.push(Instr::Clear(z));
    }
    for z in 0..nz {
        out.push(Instr::Inc(z));
    }
    for z in 0..nz {
        out.push(Instr::Dec(z));
    }
    for z1 in 0..nz {
        for z2 in 0..nz {
            if z1 != z2 && pointers[z1 as usize].ty == pointers[z2 as usize].ty {
                out.push(Instr::Set(z1, z2));
            }
        }
    }
    if enable_tests {
        for (pi, pred) in domain.predicates.iter().enumerate() {
            let slots: Vec<Vec<u8>> = pred.params.iter().map(|&t| compat(t)).collect();
            push_tuples(&slots, &mut |args| {
                out.push(Instr::Test {
                    pred: pi as u16,
                    args: SmallVec::from_slice(args),
                })
            });
        }
    }
    for target in 0..n.saturating_sub(1) {
        if target == i || target == i + 1 {
            continue;
        }
        out.push(Instr::Goto {
            target: target as u8,
            on_true: true,
        });
        out.push(Instr::Goto {
            target: target as u8,
            on_true: false,
        });
    }
    out
}

/// Link in a child-to-root chain; the listing is recovered by walking
/// parents, since each node fills exactly one line.
struct Chain {
    line: u8,
    instr: Instr,
    parent: Option<Arc<Chain>>,
}

struct Entry {
    key: SmallVec<[i64; 2]>,
    seq: u64,
    /// Defined prefix length; the line an expansion will fill.
    depth: u8,
    chain: Option<Arc<Chain>>,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    /// Inverted so the max-heap pops the smallest key, oldest first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .cmp(&self.key)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn materialize(chain: &Option<Arc<Chain>>, scratch: &mut Program) {
    let n = scratch.lines.len();
    for line in scratch.lines[..n - 1].iter_mut() {
        *line = None;
    }
    let mut cur = chain;
    while let Some(c) = cur {
        scratch.lines[c.line as usize] = Some(c.instr.clone());
        cur = &c.parent;
    }
}

enum Class {
    Dead,
    Open { sums: SmallVec<[i64; 2]> },
    SolvedAll,
}

/// Run one program over the scoped instances, aborting at the first
/// failure. Open programs report the summed executed-eval terms.
fn classify(
    prog: &Program,
    scope: &[usize],
    ctxs: &[ExecContext],
    lms: &[Option<LmIndex>],
    evals: &[Eval],
    seen: &mut HashSet<u128>,
) -> Class {
    let n_exec = evals.iter().filter(|e| !e.structural()).count();
    let mut sums: SmallVec<[i64; 2]> = SmallVec::from_elem(0, n_exec);
    let mut all_solved = true;
    for &k in scope {
        let (exec, terms) = score_scratch(prog, &ctxs[k], lms[k].as_ref(), evals, seen);
        if exec.outcome.is_failed() {
            return Class::Dead;
        }
        if exec.outcome != Outcome::Solved {
            all_solved = false;
        }
        for (s, t) in sums.iter_mut().zip(terms.iter()) {
            *s += t;
        }
    }
    if all_solved {
        Class::SolvedAll
    } else {
        Class::Open { sums }
    }
}

/// What became of a classified candidate.
enum Verdict {
    Continue,
    GrewScope,
    Accept,
}

struct Engine {
    cfg: SearchConfig,
    ctxs: Vec<ExecContext>,
    lms: Vec<Option<LmIndex>>,
    scope: Vec<usize>,
    heap: BinaryHeap<Entry>,
    seq: u64,
    metrics: Metrics,
    started: Instant,
    dup_set: Option<HashSet<Vec<u8>>>,
    seen: HashSet<u128>,
}

impl Engine {
    fn finish(&mut self, status: Status, program: Option<Program>) -> Synthesis {
        self.metrics.status = status;
        self.metrics.t_seconds = self.started.elapsed().as_secs_f64();
        self.metrics.m_peak_mb = peak_mb();
        self.metrics.active_instances = self.scope.len();
        Synthesis {
            program,
            metrics: self.metrics.clone(),
        }
    }

    /// Evaluation key in declared order: structural values straight from
    /// the listing, executed values from the summed per-instance terms.
    fn build_key(&self, prog: &Program, sums: &[i64]) -> SmallVec<[i64; 2]> {
        let mut key = SmallVec::with_capacity(self.cfg.evals.len());
        let mut j = 0;
        for e in &self.cfg.evals {
            if e.structural() {
                key.push(e.structural_value(prog));
            } else {
                key.push(sums[j]);
                j += 1;
            }
        }
        key
    }

    fn solves_on(&mut self, prog: &Program, k: usize) -> bool {
        let ctx = &self.ctxs[k];
        let limit = ctx.default_step_limit(prog.len());
        let exec = ctx.execute_scratch(prog, &mut NoObserver, None, limit, &mut self.seen);
        exec.outcome == Outcome::Solved
    }

    /// First instance outside the scope the program does not solve.
    fn first_failure_outside(&mut self, prog: &Program) -> Option<usize> {
        for k in 0..self.ctxs.len() {
            if self.scope.contains(&k) {
                continue;
            }
            if !self.solves_on(prog, k) {
                return Some(k);
            }
        }
        None
    }

    /// Re-run every open program on the instance just added to the scope:
    /// failures leave the frontier, survivors absorb the new terms. `shape`
    /// only provides the line count and pointer declarations.
    fn sweep(&mut self, new_k: usize, shape: &Program) {
        let mut local = Program::empty(shape.len(), shape.pointers.clone());
        let entries = std::mem::take(&mut self.heap).into_vec();
        let mut kept = Vec::with_capacity(entries.len());
        for mut e in entries {
            materialize(&e.chain, &mut local);
            let (exec, terms) = score_scratch(
                &local,
                &self.ctxs[new_k],
                self.lms[new_k].as_ref(),
                &self.cfg.evals,
                &mut self.seen,
            );
            if exec.outcome.is_failed() {
                self.metrics.dead += 1;
                continue;
            }
            let mut j = 0;
            for (pos, ev) in self.cfg.evals.iter().enumerate() {
                if !ev.structural() {
                    e.key[pos] += terms[j];
                    j += 1;
                }
            }
            kept.push(e);
        }
        self.heap = BinaryHeap::from(kept);
    }

    /// Final acceptance: the program must solve every training instance,
    /// scoped or not, in a fresh run.
    fn accept(&mut self, prog: &Program) -> Synthesis {
        for k in 0..self.ctxs.len() {
            assert!(
                self.solves_on(prog, k),
                "accepted program fails instance {k} on re-validation"
            );
        }
        self.metrics.revalidated = true;
        self.finish(Status::Solved, Some(prog.clone()))
    }

    /// Classify the program in `scratch` (the root, or a parent with
    /// `line` filled) and fold it into the search.
    fn consume(
        &mut self,
        scratch: &Program,
        parent: Option<Arc<Chain>>,
        line: Option<usize>,
        precomputed: Option<Class>,
    ) -> Verdict {
        let class = match precomputed {
            Some(c) => c,
            None => classify(
                scratch,
                &self.scope,
                &self.ctxs,
                &self.lms,
                &self.cfg.evals,
                &mut self.seen,
            ),
        };
        self.metrics.evaluated += 1;
        if let Some(set) = self.dup_set.as_mut() {
            if !set.insert(scratch.encode()) {
                self.metrics.dup_programs += 1;
            }
        }
        match class {
            Class::Dead => {
                self.metrics.dead += 1;
                Verdict::Continue
            }
            Class::Open { sums } => {
                self.metrics.se += self.scope.len() as u64;
                let key = self.build_key(scratch, &sums);
                let chain = line.map(|i| {
                    Arc::new(Chain {
                        line: i as u8,
                        instr: scratch.lines[i].clone().unwrap(),
                        parent,
                    })
                });
                // Partial programs never solve, complete ones never stay
                // open, so an open program always has an undefined line.
                let depth = scratch.first_undefined().unwrap() as u8;
                self.heap.push(Entry {
                    key,
                    seq: self.seq,
                    depth,
                    chain,
                });
                self.seq += 1;
                Verdict::Continue
            }
            Class::SolvedAll => {
                self.metrics.se += self.scope.len() as u64;
                match self.first_failure_outside(scratch) {
                    None => Verdict::Accept,
                    Some(k) => {
                        self.scope.push(k);
                        self.sweep(k, scratch);
                        self.metrics.dead += 1;
                        Verdict::GrewScope
                    }
                }
            }
        }
    }
}

pub fn synthesize(
    domain: Arc<Domain>,
    train: &[Arc<Instance>],
    pointers: &[PointerDecl],
    cfg: SearchConfig,
) -> Result<Synthesis, SynthError> {
    let started = Instant::now();
    if train.is_empty() {
        return Err(SynthError::NoInstances);
    }
    let pointer_arc: Arc<[PointerDecl]> = Arc::from(pointers.to_vec());
    let needs_lm = cfg.evals.iter().any(|e| e.needs_landmarks());

    let mut ctxs = Vec::with_capacity(train.len());
    let mut lms = Vec::with_capacity(train.len());
    for inst in train {
        let g = Arc::new(Grounded::new(domain.clone(), inst.clone())?);
        let lm = if needs_lm {
            let graph = landmarks::build(&g, pointers).map_err(|err| SynthError::Landmarks {
                name: inst.name.clone(),
                err,
            })?;
            Some(LmIndex::new(graph, &g))
        } else {
            None
        };
        ctxs.push(ExecContext::new(g, pointer_arc.clone()));
        lms.push(lm);
    }

    let scope = match cfg.algo {
        Algo::Pgp => vec![0],
        Algo::Bfs => (0..train.len()).collect(),
    };
    let dup_set = cfg.check_duplicates.then(HashSet::new);
    let mut engine = Engine {
        metrics: Metrics {
            status: Status::Unsolvable,
            t_seconds: 0.0,
            m_peak_mb: 0,
            expanded: 0,
            evaluated: 0,
            dead: 0,
            se: 0,
            dup_programs: 0,
            revalidated: false,
            active_instances: scope.len(),
        },
        cfg,
        ctxs,
        lms,
        scope,
        heap: BinaryHeap::new(),
        seq: 0,
        started,
        dup_set,
        seen: HashSet::new(),
    };
    Ok(run(&mut engine, &domain, pointer_arc))
}

fn run(e: &mut Engine, domain: &Domain, pointer_arc: Arc<[PointerDecl]>) -> Synthesis {
    let n = e.cfg.lines;
    let mut scratch = Program::empty(n, pointer_arc);
    let mut cand_cache: Vec<Option<Arc<Vec<Instr>>>> = vec![None; n];

    match e.consume(&scratch, None, None, None) {
        Verdict::Accept => return e.accept(&scratch.clone()),
        Verdict::Continue | Verdict::GrewScope => {}
    }

    loop {
        if e.started.elapsed() >= e.cfg.time_budget {
            return e.finish(Status::TimeExceeded, None);
        }
        let Some(entry) = e.heap.pop() else {
            return e.finish(Status::Unsolvable, None);
        };
        e.metrics.expanded += 1;
        if e.metrics.expanded % 64 == 0 && rss_mb() >= e.cfg.mem_budget_mb {
            return e.finish(Status::MemExceeded, None);
        }

        materialize(&entry.chain, &mut scratch);
        let i = entry.depth as usize;
        debug_assert_eq!(scratch.first_undefined(), Some(i));
        {
            static TRACE: std::sync::OnceLock<bool> = std::sync::OnceLock::new();
            if *TRACE.get_or_init(|| std::env::var_os("GP_TRACE").is_some()) {
                let listing = scratch
                    .format(domain)
                    .lines()
                    .skip(1)
                    .take(i)
                    .map(|l| l.split_once(". ").map(|x| x.1).unwrap_or(l).to_string())
                    .collect::<Vec<_>>()
                    .join("; ");
                eprintln!(
                    "POP ex={} seq={} d={} key={:?} | {}",
                    e.metrics.expanded, entry.seq, entry.depth, entry.key, listing
                );
            }
        }
        let cands = cand_cache[i]
            .get_or_insert_with(|| {
                Arc::new(candidates(
                    domain,
                    &scratch.pointers,
                    i,
                    n,
                    e.cfg.enable_tests,
                ))
            })
            .clone();

        // Parallel mode precomputes the whole batch; results are consumed
        // in order below and recomputed live past any scope growth.
        let mut batch: Option<Vec<Class>> = if e.cfg.parallel {
            let base = &scratch;
            let scope = &e.scope;
            let ctxs = &e.ctxs;
            let lms = &e.lms;
            let evals = &e.cfg.evals;
            Some(
                cands
                    .par_iter()
                    .map_init(
                        || (HashSet::new(), base.clone()),
                        |(seen, prog), instr| {
                            prog.lines[i] = Some(instr.clone());
                            classify(prog, scope, ctxs, lms, evals, seen)
                        },
                    )
                    .collect(),
            )
        } else {
            None
        };

        for (j, instr) in cands.iter().enumerate() {
            if e.started.elapsed() >= e.cfg.time_budget {
                return e.finish(Status::TimeExceeded, None);
            }
            scratch.lines[i] = Some(instr.clone());
            let precomputed = batch
                .as_mut()
                .map(|b| std::mem::replace(&mut b[j], Class::Dead));
            match e.consume(&scratch, entry.chain.clone(), Some(i), precomputed) {
                Verdict::Accept => return e.accept(&scratch.clone()),
                Verdict::GrewScope => batch = None,
                Verdict::Continue => {}
            }
            scratch.lines[i] = None;
        }
    }
}

/// One instance's result under [`validate`].
#[derive(Debug, Clone)]
pub struct ValidationRow {
    pub instance: String,
    pub outcome: Outcome,
    /// Ground actions applied before the run halted.
    pub plan_len: usize,
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.outcome == Outcome::Solved)
    }

    pub fn first_failure(&self) -> Option<&ValidationRow> {
        self.rows.iter().find(|r| r.outcome != Outcome::Solved)
    }
}

/// Run a finished program over every instance and tabulate the outcomes.
pub fn validate(
    program: &Program,
    domain: Arc<Domain>,
    instances: &[Arc<Instance>],
) -> Result<ValidationReport, SynthError> {
    if instances.is_empty() {
        return Err(SynthError::NoInstances);
    }
    let mut report = ValidationReport::default();
    for inst in instances {
        let g = Arc::new(Grounded::new(domain.clone(), inst.clone())?);
        let mut ctx = ExecContext::new(g, program.pointers.clone());
        let mut plan = Vec::new();
        let exec = ctx.execute(program, &mut NoObserver, Some(&mut plan));
        report.rows.push(ValidationRow {
            instance: inst.name.clone(),
            outcome: exec.outcome,
            plan_len: plan.len(),
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{ground, lock_domain, mark_domain, mark_instance};

    fn mark_pointers(domain: &Domain) -> Vec<PointerDecl> {
        crate::program::parse_pointer_decls("z:item", domain).unwrap()
    }

    fn counts(instrs: &[Instr]) -> (usize, usize, usize, usize) {
        let mut acts = 0;
        let mut arith = 0;
        let mut tests = 0;
        let mut gotos = 0;
        for ins in instrs {
            match ins {
                Instr::Act { .. } => acts += 1,
                Instr::Inc(_) | Instr::Dec(_) | Instr::Clear(_) | Instr::Set(..) => arith += 1,
                Instr::Test { .. } => tests += 1,
                Instr::Goto { .. } => gotos += 1,
                Instr::End => unreachable!(),
            }
        }
        (acts, arith, tests, gotos)
    }

    #[test]
    fn candidate_menu_orders_actions_arithmetic_jumps() {
        let d = lock_domain();
        let ptrs = crate::program::parse_pointer_decls("z1:location, z2:location", &d).unwrap();
        let cands = candidates(&d, &ptrs, 1, 12, false);
        let (acts, arith, tests, gotos) = counts(&cands);
        assert_eq!(acts, 10, "move over 4 pairs plus three unary schemas twice");
        assert_eq!(arith, 8, "inc, dec, clear per pointer plus both assignments");
        assert_eq!(tests, 0);
        assert_eq!(gotos, 18, "targets 0..=10 without lines 1 and 2");
        assert!(matches!(
            cands[0],
            Instr::Act { schema: 0, ref args } if args.as_slice() == [0, 0]
        ));
        assert!(matches!(
            cands[1],
            Instr::Act { schema: 0, ref args } if args.as_slice() == [0, 1]
        ));
        let first_goto = cands.iter().position(|c| matches!(c, Instr::Goto { .. })).unwrap();
        assert!(matches!(
            cands[first_goto],
            Instr::Goto { target: 0, on_true: true }
        ));
    }

    #[test]
    fn single_pointer_menu_matches_the_hand_count() {
        let (d, _, _) = crate::domains::generate("intrusion", 0).unwrap();
        let ptrs = crate::program::parse_pointer_decls("zh:host", &d).unwrap();
        assert_eq!(candidates(&d, &ptrs, 3, 9, false).len(), 24);

        let (d, _, _) = crate::domains::generate("visitall", 0).unwrap();
        let ptrs = crate::program::parse_pointer_decls("zi:row, zj:col", &d).unwrap();
        assert_eq!(candidates(&d, &ptrs, 0, 7, false).len(), 15);
        assert_eq!(candidates(&d, &ptrs, 5, 7, false).len(), 17);
    }

    #[test]
    fn tests_enumerate_only_when_enabled() {
        let (d, _, _) = crate::domains::generate("corridor", 0).unwrap();
        let ptrs = crate::program::parse_pointer_decls("z1:location, z2:location", &d).unwrap();
        let without = candidates(&d, &ptrs, 2, 11, false);
        let with = candidates(&d, &ptrs, 2, 11, true);
        let (_, _, t0, _) = counts(&without);
        let (_, _, t1, _) = counts(&with);
        assert_eq!(t0, 0);
        // at(z), goal-at(z), adjacent(z,z') over two pointers.
        assert_eq!(t1, 2 + 2 + 4);
        assert_eq!(with.len(), without.len() + t1);
    }

    fn toy_config(algo: Algo, evals: Vec<Eval>, lines: usize) -> SearchConfig {
        let mut cfg = SearchConfig::new(algo, evals, lines);
        cfg.check_duplicates = true;
        cfg
    }

    fn mark_setup(sizes: &[usize]) -> (Arc<Domain>, Vec<Arc<Instance>>, Vec<PointerDecl>) {
        let d = Arc::new(mark_domain());
        let train: Vec<Arc<Instance>> = sizes
            .iter()
            .enumerate()
            .map(|(i, &n)| Arc::new(mark_instance(&format!("m{i}"), n, true)))
            .collect();
        let ptrs = mark_pointers(&d);
        (d, train, ptrs)
    }

    #[test]
    fn search_finds_the_marking_loop() {
        let (d, train, ptrs) = mark_setup(&[2, 3]);
        let cfg = toy_config(Algo::Bfs, vec![Eval::GoalCount], 4);
        let out = synthesize(d.clone(), &train, &ptrs, cfg).unwrap();
        assert_eq!(out.metrics.status, Status::Solved);
        assert!(out.metrics.revalidated);
        assert_eq!(out.metrics.dup_programs, 0);
        assert!(out.metrics.expanded <= out.metrics.evaluated);
        assert!(out.metrics.dead <= out.metrics.evaluated);
        let prog = out.program.unwrap();
        for inst in &train {
            let g = Arc::new(ground((*d).clone(), (**inst).clone()));
            let mut ctx = ExecContext::new(g, prog.pointers.clone());
            assert!(ctx.solves(&prog));
        }
    }

    /// Every complete listing, generated line by line from the same menus.
    fn brute_force_solvers(
        d: &Arc<Domain>,
        train: &[Arc<Instance>],
        ptrs: &[PointerDecl],
        lines: usize,
    ) -> Vec<Vec<u8>> {
        let pointer_arc: Arc<[PointerDecl]> = Arc::from(ptrs.to_vec());
        let mut ctxs: Vec<ExecContext> = train
            .iter()
            .map(|inst| {
                let g = Arc::new(Grounded::new(d.clone(), inst.clone()).unwrap());
                ExecContext::new(g, pointer_arc.clone())
            })
            .collect();
        let menus: Vec<Vec<Instr>> = (0..lines - 1)
            .map(|i| candidates(d, ptrs, i, lines, false))
            .collect();
        let mut prog = Program::empty(lines, pointer_arc);
        let mut found = Vec::new();
        let mut stack = vec![0usize; lines - 1];
        let mut depth = 0usize;
        loop {
            if depth == lines - 1 {
                if ctxs.iter_mut().all(|ctx| ctx.solves(&prog)) {
                    found.push(prog.encode());
                }
                depth -= 1;
                stack[depth] += 1;
            }
            if stack[depth] < menus[depth].len() {
                prog.lines[depth] = Some(menus[depth][stack[depth]].clone());
                depth += 1;
                if depth < lines - 1 {
                    stack[depth] = 0;
                }
                continue;
            }
            prog.lines[depth] = None;
            if depth == 0 {
                return found;
            }
            depth -= 1;
            stack[depth] += 1;
        }
    }

    #[test]
    fn exhaustive_enumeration_agrees_on_solvability() {
        // Three free lines fit the mark/advance/jump loop.
        let (d, train, ptrs) = mark_setup(&[2]);
        let solvers = brute_force_solvers(&d, &train, &ptrs, 4);
        assert!(!solvers.is_empty());
        let cfg = toy_config(Algo::Bfs, vec![Eval::Zero], 4);
        let out = synthesize(d.clone(), &train, &ptrs, cfg).unwrap();
        assert_eq!(out.metrics.status, Status::Solved);
        let enc = out.program.unwrap().encode();
        assert!(solvers.contains(&enc), "search returned a non-enumerated solver");

        // Two free lines cannot mark two objects.
        let solvers = brute_force_solvers(&d, &train, &ptrs, 3);
        assert!(solvers.is_empty());
        let cfg = toy_config(Algo::Bfs, vec![Eval::Zero], 3);
        let out = synthesize(d, &train, &ptrs, cfg).unwrap();
        assert_eq!(out.metrics.status, Status::Unsolvable);
        assert!(out.program.is_none());
        assert_eq!(out.metrics.dup_programs, 0, "exhaustion generated a duplicate");
    }

    #[test]
    fn progressive_scope_grows_and_purges() {
        let (d, train, ptrs) = mark_setup(&[1, 3]);
        let cfg = toy_config(Algo::Pgp, vec![Eval::GoalCount], 4);
        let out = synthesize(d.clone(), &train, &ptrs, cfg).unwrap();
        assert_eq!(out.metrics.status, Status::Solved);
        assert_eq!(out.metrics.active_instances, 2, "the second instance joined");
        assert!(out.metrics.dead > 0);
        assert!(out.metrics.revalidated);
        let prog = out.program.unwrap();
        for inst in &train {
            let g = Arc::new(ground((*d).clone(), (**inst).clone()));
            let mut ctx = ExecContext::new(g, prog.pointers.clone());
            assert!(ctx.solves(&prog));
        }
    }

    #[test]
    fn progressive_needs_fewer_evaluations_here() {
        let (d, train, ptrs) = mark_setup(&[1, 3, 4]);
        let bfs = synthesize(
            d.clone(),
            &train,
            &ptrs,
            toy_config(Algo::Bfs, vec![Eval::GoalCount], 4),
        )
        .unwrap();
        let pgp = synthesize(
            d,
            &train,
            &ptrs,
            toy_config(Algo::Pgp, vec![Eval::GoalCount], 4),
        )
        .unwrap();
        assert_eq!(bfs.metrics.status, Status::Solved);
        assert_eq!(pgp.metrics.status, Status::Solved);
        assert!(pgp.metrics.se < bfs.metrics.se, "scoped runs should execute less");
    }

    #[test]
    fn budgets_interrupt_the_search() {
        let (d, train, ptrs) = mark_setup(&[2, 3]);
        let mut cfg = SearchConfig::new(Algo::Bfs, vec![Eval::Zero], 8);
        cfg.time_budget = Duration::from_millis(0);
        let out = synthesize(d.clone(), &train, &ptrs, cfg).unwrap();
        assert_eq!(out.metrics.status, Status::TimeExceeded);
        assert!(out.program.is_none());

        let mut cfg = SearchConfig::new(Algo::Bfs, vec![Eval::Zero], 8);
        cfg.mem_budget_mb = 1;
        let out = synthesize(d, &train, &ptrs, cfg).unwrap();
        assert_eq!(out.metrics.status, Status::MemExceeded);
    }

    #[test]
    fn parallel_run_reproduces_the_sequential_one() {
        let (d, train, ptrs) = mark_setup(&[1, 3]);
        for algo in [Algo::Bfs, Algo::Pgp] {
            let seq = synthesize(
                d.clone(),
                &train,
                &ptrs,
                toy_config(algo, vec![Eval::GoalCount], 4),
            )
            .unwrap();
            let mut cfg = toy_config(algo, vec![Eval::GoalCount], 4);
            cfg.parallel = true;
            let par = synthesize(d.clone(), &train, &ptrs, cfg).unwrap();
            assert_eq!(seq.metrics.status, par.metrics.status);
            assert_eq!(seq.metrics.expanded, par.metrics.expanded);
            assert_eq!(seq.metrics.evaluated, par.metrics.evaluated);
            assert_eq!(seq.metrics.dead, par.metrics.dead);
            assert_eq!(seq.metrics.se, par.metrics.se);
            assert_eq!(
                seq.program.as_ref().map(|p| p.encode()),
                par.program.as_ref().map(|p| p.encode())
            );
        }
    }

    #[test]
    fn frontier_orders_by_key_then_insertion() {
        let mut heap = BinaryHeap::new();
        for (seq, key) in [(0u64, 2i64), (1, 1), (2, 1), (3, 3)] {
            heap.push(Entry {
                key: SmallVec::from_slice(&[key]),
                seq,
                depth: 0,
                chain: None,
            });
        }
        let order: Vec<u64> = std::iter::from_fn(|| heap.pop().map(|e| e.seq)).collect();
        assert_eq!(order, vec![1, 2, 0, 3]);
    }

    #[test]
    fn goto_tiebreak_prefers_fewer_jumps() {
        // With [gc, f1], a straight-line solver should beat loopy siblings
        // of equal goal count; just check the key layout mixes both.
        let (d, train, ptrs) = mark_setup(&[2]);
        let cfg = toy_config(Algo::Bfs, vec![Eval::GoalCount, Eval::GotoCount], 4);
        let out = synthesize(d, &train, &ptrs, cfg).unwrap();
        assert_eq!(out.metrics.status, Status::Solved);
        let prog = out.program.unwrap();
        assert!(prog.goto_count() <= 1);
    }

    #[test]
    fn validation_tabulates_outcomes_and_plan_lengths() {
        let domain = Arc::new(lock_domain());
        let text = crate::domains::fixture_text("lock").unwrap();
        let good = crate::program::parse_program(text, &domain).unwrap();
        let instances: Vec<Arc<Instance>> = (5..8)
            .map(|n| {
                Arc::new(crate::domains::lock::instance(
                    &format!("lock-{n}"),
                    n,
                    0,
                    n - 1,
                    1,
                ))
            })
            .collect();

        let report = validate(&good, domain.clone(), &instances).unwrap();
        assert!(report.pass());
        assert_eq!(report.rows.len(), 3);
        // Longer corridors need strictly more ground actions.
        let lens: Vec<usize> = report.rows.iter().map(|r| r.plan_len).collect();
        assert!(lens.windows(2).all(|w| w[0] < w[1]), "{lens:?}");

        // Flipping one instruction must surface at least one failure.
        let mut bad = good.clone();
        let flipped = bad
            .lines
            .iter()
            .position(|l| matches!(l, Some(Instr::Inc(_))))
            .unwrap();
        bad.lines[flipped] = Some(Instr::Dec(0));
        let report = validate(&bad, domain, &instances).unwrap();
        assert!(!report.pass());
        let fail = report.first_failure().unwrap();
        assert_eq!(fail.instance, "lock-5");

        assert!(matches!(
            validate(&good, Arc::new(lock_domain()), &[]),
            Err(SynthError::NoInstances)
        ));
    }
}
