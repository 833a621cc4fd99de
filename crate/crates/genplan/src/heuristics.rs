//! Evaluation functions that order the synthesis frontier.
//!
//! Structural functions read the listing alone; executed functions run the
//! program on an instance and grade the final machine state. The landmark
//! count piggybacks on the single execution through a [`LmMonitor`]
//! observer, so grading never costs a second run.
//!
//! A landmark node counts as reached the first time it holds in a machine
//! state where all of its ordering predecessors have already been reached.
//! The count charged to a program is the number of nodes never reached plus
//! the reached ones that must hold again: goal facts no longer true, and
//! nodes no longer true whose greedy-necessary successors are still open.

use fixedbitset::FixedBitSet;
use smallvec::SmallVec;
use std::collections::HashMap;

use crate::landmarks::{LandmarkGraph, NodeKind};
use crate::program::Program;
use crate::strips::{AtomId, Grounded, State};
use crate::vm::{ExecContext, Execution, NoObserver, Observer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Eval {
    /// Unsatisfied goal atoms in the final state.
    GoalCount,
    /// Landmarks still to reach or reach again.
    Landmarks,
    /// Landmark count over graph size, in ten-thousandths.
    LandmarksNorm,
    /// Goto instructions in the listing.
    GotoCount,
    /// Constant; leaves ordering entirely to the tie-break rule.
    Zero,
}

impl Eval {
    /// Computable from the listing without executing it.
    pub fn structural(self) -> bool {
        matches!(self, Eval::GotoCount | Eval::Zero)
    }

    pub fn needs_landmarks(self) -> bool {
        matches!(self, Eval::Landmarks | Eval::LandmarksNorm)
    }

    pub fn structural_value(self, prog: &Program) -> i64 {
        match self {
            Eval::GotoCount => prog.goto_count() as i64,
            Eval::Zero => 0,
            _ => unreachable!("{self} is graded per instance"),
        }
    }
}

impl std::fmt::Display for Eval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Eval::GoalCount => "gc",
            Eval::Landmarks => "lm",
            Eval::LandmarksNorm => "lm-norm",
            Eval::GotoCount => "f1",
            Eval::Zero => "zero",
        })
    }
}

/// `count / total` rounded to four digits, scaled to an integer number of
/// ten-thousandths. An empty graph grades zero.
pub fn norm_term(count: u32, total: u32) -> i64 {
    if total == 0 {
        return 0;
    }
    (count as i64 * 20_000 + total as i64) / (2 * total as i64)
}

/// Per-instance landmark graph with the lookup tables the monitor needs:
/// which nodes mention an atom or a pointer value, how many ordering
/// predecessors each node waits on, and the combined successor lists.
pub struct LmIndex {
    pub graph: LandmarkGraph,
    by_atom: Vec<Vec<u32>>,
    by_ptr: HashMap<(u8, u16), Vec<u32>>,
    n_preds: Vec<u32>,
    succs: Vec<Vec<u32>>,
}

impl LmIndex {
    pub fn new(graph: LandmarkGraph, g: &Grounded) -> Self {
        let n = graph.len();
        let mut by_atom: Vec<Vec<u32>> = vec![Vec::new(); g.n_atoms()];
        let mut by_ptr: HashMap<(u8, u16), Vec<u32>> = HashMap::new();
        for (i, kind) in graph.nodes.iter().enumerate() {
            match kind {
                NodeKind::Fact(a) => by_atom[*a as usize].push(i as u32),
                NodeKind::Disj(atoms) => {
                    for &a in atoms {
                        by_atom[a as usize].push(i as u32);
                    }
                }
                NodeKind::PtrDisj(pairs) => {
                    for &pair in pairs {
                        by_ptr.entry(pair).or_default().push(i as u32);
                    }
                }
            }
        }
        let mut n_preds = vec![0u32; n];
        let mut succs: Vec<Vec<u32>> = vec![Vec::new(); n];
        for to in 0..n {
            for &from in graph.gn_preds[to].iter().chain(graph.nat_preds[to].iter()) {
                n_preds[to] += 1;
                succs[from as usize].push(to as u32);
            }
        }
        LmIndex { graph, by_atom, by_ptr, n_preds, succs }
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }
}

/// Tracks reached landmarks across one execution.
pub struct LmMonitor<'a> {
    idx: &'a LmIndex,
    reached: FixedBitSet,
    pending: Vec<u32>,
}

impl<'a> LmMonitor<'a> {
    pub fn new(idx: &'a LmIndex) -> Self {
        LmMonitor {
            idx,
            reached: FixedBitSet::with_capacity(idx.len()),
            pending: idx.n_preds.clone(),
        }
    }

    pub fn reached_count(&self) -> usize {
        self.reached.count_ones(..)
    }

    pub fn is_reached(&self, node: u32) -> bool {
        self.reached.contains(node as usize)
    }

    /// Reach `node` if its predecessors are settled and it holds now, then
    /// cascade to successors whose last predecessor this satisfied.
    fn settle(&mut self, node: u32, state: &State, ptrs: &[u16]) {
        let idx = self.idx;
        let mut stack = vec![node];
        while let Some(n) = stack.pop() {
            if self.reached.contains(n as usize)
                || self.pending[n as usize] != 0
                || !idx.graph.holds(n, state, ptrs)
            {
                continue;
            }
            self.reached.insert(n as usize);
            for &s in &idx.succs[n as usize] {
                self.pending[s as usize] -= 1;
                if self.pending[s as usize] == 0 {
                    stack.push(s);
                }
            }
        }
    }

    /// Landmarks still owed after the run ends in `state`/`ptrs`.
    pub fn count(&self, state: &State, ptrs: &[u16]) -> u32 {
        let idx = self.idx;
        let mut f = 0u32;
        for n in 0..idx.len() as u32 {
            if !self.reached.contains(n as usize) {
                f += 1;
                continue;
            }
            if idx.graph.holds(n, state, ptrs) {
                continue;
            }
            let required_again = idx.graph.is_goal_atom[n as usize]
                || idx.graph.gn_succs[n as usize]
                    .iter()
                    .any(|&s| !self.reached.contains(s as usize));
            if required_again {
                f += 1;
            }
        }
        f
    }
}

impl Observer for LmMonitor<'_> {
    fn start(&mut self, state: &State, ptrs: &[u16]) {
        self.reached.clear();
        self.pending.copy_from_slice(&self.idx.n_preds);
        for n in 0..self.idx.len() as u32 {
            self.settle(n, state, ptrs);
        }
    }

    fn atoms_added(&mut self, added: &[AtomId], state: &State, ptrs: &[u16]) {
        for &a in added {
            for i in 0..self.idx.by_atom[a as usize].len() {
                let node = self.idx.by_atom[a as usize][i];
                self.settle(node, state, ptrs);
            }
        }
    }

    fn ptr_set(&mut self, z: usize, value: u16, state: &State, ptrs: &[u16]) {
        if let Some(nodes) = self.idx.by_ptr.get(&(z as u8, value)) {
            for i in 0..nodes.len() {
                let node = self.idx.by_ptr[&(z as u8, value)][i];
                self.settle(node, state, ptrs);
            }
        }
    }
}

pub fn goals_missing(g: &Grounded, state: &State) -> u32 {
    g.goal_atoms
        .iter()
        .filter(|&&a| !state.contains(a as usize))
        .count() as u32
}

/// Execute `prog` on one instance and grade the final machine state with
/// every executed function in `evals`, in order; structural functions are
/// skipped here since their value does not depend on the instance.
pub fn score(
    prog: &Program,
    ctx: &ExecContext,
    lm: Option<&LmIndex>,
    evals: &[Eval],
) -> (Execution, SmallVec<[i64; 2]>) {
    let mut seen = std::collections::HashSet::new();
    score_scratch(prog, ctx, lm, evals, &mut seen)
}

/// [`score`] against a shared context, with caller-owned scratch space.
pub fn score_scratch(
    prog: &Program,
    ctx: &ExecContext,
    lm: Option<&LmIndex>,
    evals: &[Eval],
    seen: &mut std::collections::HashSet<u128>,
) -> (Execution, SmallVec<[i64; 2]>) {
    let limit = ctx.default_step_limit(prog.len());
    let wants_lm = evals.iter().any(|e| e.needs_landmarks());
    let (exec, lm_count, lm_total) = if wants_lm {
        let idx = lm.expect("landmark grading needs a graph");
        let mut mon = LmMonitor::new(idx);
        let exec = ctx.execute_scratch(prog, &mut mon, None, limit, seen);
        let f = mon.count(&exec.state, &exec.pointers);
        (exec, f, idx.len() as u32)
    } else {
        (ctx.execute_scratch(prog, &mut NoObserver, None, limit, seen), 0, 0)
    };
    let mut terms: SmallVec<[i64; 2]> = SmallVec::new();
    for e in evals {
        if e.structural() {
            continue;
        }
        terms.push(match e {
            Eval::GoalCount => goals_missing(&ctx.g, &exec.state) as i64,
            Eval::Landmarks => lm_count as i64,
            Eval::LandmarksNorm => norm_term(lm_count, lm_total),
            _ => unreachable!(),
        });
    }
    (exec, terms)
}
