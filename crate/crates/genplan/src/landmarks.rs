//! Landmark graphs: facts and disjunctions every plan must make true,
//! ordered by when they can first be achieved.
//!
//! Construction is a three-stage pipeline per instance:
//!
//! 1. [`backchain`] seeds the graph with the goal atoms and walks first
//!    achievers backwards through a relaxed planning graph, adding shared
//!    preconditions as fact nodes and per-predicate unions of non-shared
//!    preconditions as disjunctive nodes, with greedy-necessary orderings.
//! 2. [`add_natural_orderings`] rebuilds the relaxed graph once per node
//!    with that node's achievers disabled; anything unreachable then must
//!    come after it. Orderings that would close a cycle are dropped.
//! 3. [`add_pointer_landmarks`] projects achiever arguments onto typed
//!    pointers: to execute an achiever of node q, some pointer must hold
//!    each argument object, so `(z_i = o)` disjunctions are landmarks too.
//!
//! The graph is a pure function of (instance, pointer set) and never
//! changes after construction.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::program::PointerDecl;
use crate::strips::{ActId, AtomId, GroundAction, Grounded, ObjId};

pub const UNREACHED: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Fact(AtomId),
    /// Atoms of one predicate; the node holds when any member does.
    Disj(Vec<AtomId>),
    /// (pointer index, value) pairs; holds when any pointer sits on the value.
    PtrDisj(Vec<(u8, u16)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    GreedyNecessary,
    Natural,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LandmarkGraph {
    pub nodes: Vec<NodeKind>,
    /// Incoming greedy-necessary edges per node.
    pub gn_preds: Vec<Vec<u32>>,
    /// Outgoing greedy-necessary edges per node.
    pub gn_succs: Vec<Vec<u32>>,
    /// Incoming natural edges per node.
    pub nat_preds: Vec<Vec<u32>>,
    /// First achievers recorded during backchaining (empty for nodes that
    /// hold initially and for pointer nodes).
    pub achievers: Vec<Vec<ActId>>,
    /// True for Fact nodes whose atom is a goal atom.
    pub is_goal_atom: Vec<bool>,
    /// Human-readable reports: dropped cycle edges, skipped pointer conjuncts.
    pub notes: Vec<String>,
}

impl LandmarkGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn new() -> Self {
        LandmarkGraph {
            nodes: Vec::new(),
            gn_preds: Vec::new(),
            gn_succs: Vec::new(),
            nat_preds: Vec::new(),
            achievers: Vec::new(),
            is_goal_atom: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn push_node(&mut self, kind: NodeKind, is_goal: bool) -> u32 {
        self.nodes.push(kind);
        self.gn_preds.push(Vec::new());
        self.gn_succs.push(Vec::new());
        self.nat_preds.push(Vec::new());
        self.achievers.push(Vec::new());
        self.is_goal_atom.push(is_goal);
        (self.nodes.len() - 1) as u32
    }

    fn has_edge(&self, from: u32, to: u32) -> bool {
        self.gn_preds[to as usize].contains(&from) || self.nat_preds[to as usize].contains(&from)
    }

    fn add_gn(&mut self, from: u32, to: u32) {
        if from != to && !self.gn_preds[to as usize].contains(&from) {
            self.gn_preds[to as usize].push(from);
            self.gn_succs[from as usize].push(to);
        }
    }

    /// True when some edge path leads from `from` to `to`.
    fn reaches(&self, from: u32, to: u32) -> bool {
        if from == to {
            return true;
        }
        let mut seen = FixedBitSet::with_capacity(self.nodes.len());
        let mut stack = vec![from];
        seen.insert(from as usize);
        while let Some(n) = stack.pop() {
            for &s in &self.gn_succs[n as usize] {
                if s == to {
                    return true;
                }
                if !seen.contains(s as usize) {
                    seen.insert(s as usize);
                    stack.push(s);
                }
            }
            // nat successors are not indexed; scan incoming lists instead.
            for (m, preds) in self.nat_preds.iter().enumerate() {
                if preds.contains(&n) {
                    if m as u32 == to {
                        return true;
                    }
                    if !seen.contains(m) {
                        seen.insert(m);
                        stack.push(m as u32);
                    }
                }
            }
        }
        false
    }

    /// Does this node hold in the given machine state?
    pub fn holds(&self, node: u32, state: &fixedbitset::FixedBitSet, ptrs: &[u16]) -> bool {
        match &self.nodes[node as usize] {
            NodeKind::Fact(a) => state.contains(*a as usize),
            NodeKind::Disj(atoms) => atoms.iter().any(|&a| state.contains(a as usize)),
            NodeKind::PtrDisj(pairs) => pairs.iter().any(|&(z, v)| ptrs[z as usize] == v),
        }
    }

    pub fn label(&self, node: u32, g: &Grounded, pointers: &[PointerDecl]) -> String {
        match &self.nodes[node as usize] {
            NodeKind::Fact(a) => g.atom_text(*a),
            NodeKind::Disj(atoms) => {
                let parts: Vec<String> = atoms.iter().map(|&a| g.atom_text(a)).collect();
                parts.join(" | ")
            }
            NodeKind::PtrDisj(pairs) => {
                let parts: Vec<String> = pairs
                    .iter()
                    .map(|&(z, v)| {
                        let p = &pointers[z as usize];
                        let obj = g.objs_by_type[p.ty as usize][v as usize];
                        format!("{}={}", p.name, g.instance.objects[obj as usize].0)
                    })
                    .collect();
                parts.join(" | ")
            }
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("goal atom {0} is unreachable even ignoring deletes")]
pub struct RelaxedUnsolvable(pub String);

/// Layered delete-relaxation reachability: the first level where each atom
/// and action becomes available, [`UNREACHED`] when never.
pub struct Rpg {
    pub atom_level: Vec<u32>,
    pub act_level: Vec<u32>,
}

/// Precondition index shared by repeated reachability sweeps.
pub struct Relaxed<'a> {
    g: &'a Grounded,
    actions: &'a [GroundAction],
    by_pre: Vec<Vec<u32>>,
    no_pre: Vec<u32>,
}

impl<'a> Relaxed<'a> {
    pub fn new(g: &'a Grounded, actions: &'a [GroundAction]) -> Self {
        let mut by_pre: Vec<Vec<u32>> = vec![Vec::new(); g.n_atoms()];
        let mut no_pre = Vec::new();
        for (i, a) in actions.iter().enumerate() {
            if a.pre.is_empty() {
                no_pre.push(i as u32);
            }
            for &p in &a.pre {
                by_pre[p as usize].push(i as u32);
            }
        }
        Relaxed { g, actions, by_pre, no_pre }
    }

    /// `disabled` actions are treated as absent.
    pub fn levels(&self, disabled: Option<&FixedBitSet>) -> Rpg {
        let off = |i: u32| disabled.is_some_and(|d| d.contains(i as usize));
        let mut atom_level = vec![UNREACHED; self.g.n_atoms()];
        let mut act_level = vec![UNREACHED; self.actions.len()];
        let mut remaining: Vec<u32> = self.actions.iter().map(|a| a.pre.len() as u32).collect();

        let mut frontier: Vec<AtomId> = Vec::new();
        for a in self.g.init_state.ones() {
            atom_level[a] = 0;
            frontier.push(a as AtomId);
        }
        let mut level = 0u32;
        let mut ready: Vec<u32> = Vec::new();
        for &i in &self.no_pre {
            if !off(i) {
                act_level[i as usize] = 0;
                ready.push(i);
            }
        }
        loop {
            for &f in &frontier {
                for &i in &self.by_pre[f as usize] {
                    if off(i) || act_level[i as usize] != UNREACHED {
                        continue;
                    }
                    remaining[i as usize] -= 1;
                    if remaining[i as usize] == 0 {
                        act_level[i as usize] = level;
                        ready.push(i);
                    }
                }
            }
            frontier.clear();
            for &i in &ready {
                for &ad in &self.actions[i as usize].add {
                    if atom_level[ad as usize] == UNREACHED {
                        atom_level[ad as usize] = level + 1;
                        frontier.push(ad);
                    }
                }
            }
            ready.clear();
            if frontier.is_empty() {
                break;
            }
            level += 1;
        }
        Rpg { atom_level, act_level }
    }
}

fn adders_index(g: &Grounded, actions: &[GroundAction]) -> Vec<Vec<u32>> {
    let mut adders: Vec<Vec<u32>> = vec![Vec::new(); g.n_atoms()];
    for (i, a) in actions.iter().enumerate() {
        for &ad in &a.add {
            adders[ad as usize].push(i as u32);
        }
    }
    adders
}

fn node_level(kind: &NodeKind, rpg: &Rpg) -> u32 {
    match kind {
        NodeKind::Fact(a) => rpg.atom_level[*a as usize],
        NodeKind::Disj(atoms) => atoms.iter().map(|&a| rpg.atom_level[a as usize]).min().unwrap(),
        NodeKind::PtrDisj(_) => unreachable!("pointer nodes are never backchained"),
    }
}

fn holds_initially(kind: &NodeKind, g: &Grounded) -> bool {
    match kind {
        NodeKind::Fact(a) => g.init_state.contains(*a as usize),
        NodeKind::Disj(atoms) => atoms.iter().any(|&a| g.init_state.contains(a as usize)),
        NodeKind::PtrDisj(pairs) => pairs.iter().any(|&(_, v)| v == 0),
    }
}

const DISJ_MAX: usize = 4;

/// Stage 1: goal seeds, first achievers, shared and disjunctive
/// preconditions, greedy-necessary orderings.
pub fn backchain(g: &Grounded, actions: &[GroundAction]) -> Result<LandmarkGraph, RelaxedUnsolvable> {
    let relaxed = Relaxed::new(g, actions);
    let rpg = relaxed.levels(None);
    for &goal in &g.goal_atoms {
        if rpg.atom_level[goal as usize] == UNREACHED {
            return Err(RelaxedUnsolvable(g.atom_text(goal)));
        }
    }
    let adders = adders_index(g, actions);

    let mut graph = LandmarkGraph::new();
    let mut fact_ids: HashMap<AtomId, u32> = HashMap::new();
    let mut disj_ids: HashMap<Vec<AtomId>, u32> = HashMap::new();
    let mut queue: Vec<u32> = Vec::new();

    for &goal in &g.goal_atoms {
        let id = graph.push_node(NodeKind::Fact(goal), true);
        fact_ids.insert(goal, id);
        queue.push(id);
    }

    let mut qi = 0;
    while qi < queue.len() {
        let q = queue[qi];
        qi += 1;
        let kind = graph.nodes[q as usize].clone();
        if holds_initially(&kind, g) {
            continue;
        }
        let level = node_level(&kind, &rpg);
        if level == UNREACHED {
            continue;
        }
        let member_atoms: Vec<AtomId> = match &kind {
            NodeKind::Fact(a) => vec![*a],
            NodeKind::Disj(atoms) => atoms.clone(),
            NodeKind::PtrDisj(_) => unreachable!(),
        };
        let mut achievers: Vec<u32> = Vec::new();
        for &a in &member_atoms {
            for &act in &adders[a as usize] {
                if rpg.act_level[act as usize] < level && !achievers.contains(&act) {
                    achievers.push(act);
                }
            }
        }
        achievers.sort_unstable();
        if achievers.is_empty() {
            continue;
        }

        // Preconditions shared by every first achiever become fact landmarks.
        let mut shared: Vec<AtomId> = actions[achievers[0] as usize].pre.to_vec();
        for &act in &achievers[1..] {
            shared.retain(|p| actions[act as usize].pre.contains(p));
        }
        for &p in &shared {
            if member_atoms.contains(&p) {
                continue;
            }
            let pid = *fact_ids.entry(p).or_insert_with(|| {
                let id = graph.push_node(NodeKind::Fact(p), false);
                queue.push(id);
                id
            });
            graph.add_gn(pid, q);
        }

        // Non-shared preconditions: when every achiever needs some atom of
        // one predicate, their union is a disjunctive landmark.
        let mut by_pred: HashMap<u16, (usize, Vec<AtomId>)> = HashMap::new();
        for &act in &achievers {
            let mut preds_here: Vec<u16> = Vec::new();
            for &p in actions[act as usize].pre.iter() {
                if shared.contains(&p) {
                    continue;
                }
                let (pred, _) = g.atom_of(p);
                let entry = by_pred.entry(pred).or_insert((0, Vec::new()));
                if !entry.1.contains(&p) {
                    entry.1.push(p);
                }
                if !preds_here.contains(&pred) {
                    preds_here.push(pred);
                    entry.0 += 1;
                }
            }
        }
        let mut candidates: Vec<Vec<AtomId>> = by_pred
            .into_iter()
            .filter(|(_, (contributors, union))| {
                *contributors == achievers.len() && union.len() >= 2 && union.len() <= DISJ_MAX
            })
            .map(|(_, (_, mut union))| {
                union.sort_unstable();
                union
            })
            .collect();
        candidates.sort();
        for union in candidates {
            if union.iter().any(|a| fact_ids.contains_key(a)) || union.iter().any(|a| member_atoms.contains(a)) {
                continue;
            }
            let did = *disj_ids.entry(union.clone()).or_insert_with(|| {
                let id = graph.push_node(NodeKind::Disj(union), false);
                queue.push(id);
                id
            });
            graph.add_gn(did, q);
        }

        graph.achievers[q as usize] = achievers;
    }
    Ok(graph)
}

/// Stage 2: disable each node's adders in turn; whatever becomes
/// unreachable must come after that node. Cycle-closing edges are dropped.
pub fn add_natural_orderings(graph: &mut LandmarkGraph, g: &Grounded, actions: &[GroundAction]) {
    let relaxed = Relaxed::new(g, actions);
    let adders = adders_index(g, actions);
    let n = graph.nodes.len();

    // Facts already holding initially precede everything achieved later.
    for q in 0..n as u32 {
        if !holds_initially(&graph.nodes[q as usize], g) {
            continue;
        }
        for p in 0..n as u32 {
            if p == q || holds_initially(&graph.nodes[p as usize], g) {
                continue;
            }
            if !graph.has_edge(q, p) {
                graph.nat_preds[p as usize].push(q);
            }
        }
    }

    let mut disabled = FixedBitSet::with_capacity(actions.len());
    for q in 0..n as u32 {
        let members: Vec<AtomId> = match &graph.nodes[q as usize] {
            NodeKind::Fact(a) => vec![*a],
            NodeKind::Disj(atoms) => atoms.clone(),
            NodeKind::PtrDisj(_) => continue,
        };
        disabled.clear();
        let mut any = false;
        for &a in &members {
            for &act in &adders[a as usize] {
                disabled.insert(act as usize);
                any = true;
            }
        }
        if !any {
            continue;
        }
        let rpg = relaxed.levels(Some(&disabled));
        for p in 0..n as u32 {
            if p == q {
                continue;
            }
            let unreachable = match &graph.nodes[p as usize] {
                NodeKind::Fact(a) => rpg.atom_level[*a as usize] == UNREACHED,
                NodeKind::Disj(atoms) => {
                    atoms.iter().all(|&a| rpg.atom_level[a as usize] == UNREACHED)
                }
                NodeKind::PtrDisj(_) => false,
            };
            if !unreachable || graph.has_edge(q, p) {
                continue;
            }
            if graph.reaches(p, q) {
                let note = format!("dropped ordering {} -> {} (cycle)", q, p);
                graph.notes.push(note);
                continue;
            }
            graph.nat_preds[p as usize].push(q);
        }
    }
}

/// Stage 3: achiever arguments as pointer-value disjunctions.
pub fn add_pointer_landmarks(graph: &mut LandmarkGraph, g: &Grounded, pointers: &[PointerDecl]) {
    let mut ptr_ids: HashMap<Vec<(u8, u16)>, u32> = HashMap::new();
    for q in 0..graph.nodes.len() as u32 {
        let achievers = graph.achievers[q as usize].clone();
        let Some((&first, rest)) = achievers.split_first() else {
            continue;
        };
        // Only arguments every first achiever agrees on are owed by every
        // plan; an object one achiever can substitute away is no landmark.
        let mut shared: Vec<ObjId> = g.action_args_of(first).1.to_vec();
        shared.sort_unstable();
        shared.dedup();
        for &act in rest {
            let (_, args) = g.action_args_of(act);
            shared.retain(|o| args.contains(o));
        }
        for &obj in &shared {
            let mut pairs: Vec<(u8, u16)> = Vec::new();
            for (zi, p) in pointers.iter().enumerate() {
                if let Some(pos) = g.type_position(p.ty, obj) {
                    pairs.push((zi as u8, pos));
                }
            }
            if pairs.is_empty() {
                graph.notes.push(format!(
                    "object {} has no pointer of a compatible type; conjunct for node {} skipped",
                    g.instance.objects[obj as usize].0, q
                ));
                continue;
            }
            pairs.sort_unstable();
            pairs.dedup();
            let id = *ptr_ids
                .entry(pairs.clone())
                .or_insert_with(|| graph.push_node(NodeKind::PtrDisj(pairs), false));
            graph.add_gn(id, q);
        }
    }
}

/// Full pipeline for one instance.
pub fn build(
    g: &Grounded,
    pointers: &[PointerDecl],
) -> Result<LandmarkGraph, RelaxedUnsolvable> {
    let actions = g.all_actions();
    let mut graph = backchain(g, &actions)?;
    add_natural_orderings(&mut graph, g, &actions);
    add_pointer_landmarks(&mut graph, g, pointers);
    Ok(graph)
}

/// Sound check used by the test suite: an atom outside the initial state is
/// a landmark if deleting all of its adders makes the goal unreachable even
/// under delete relaxation. Initial and goal atoms are landmarks outright.
pub fn verify_fact_landmark(g: &Grounded, actions: &[GroundAction], atom: AtomId) -> bool {
    if g.init_state.contains(atom as usize) || g.goal_atoms.contains(&atom) {
        return true;
    }
    let relaxed = Relaxed::new(g, actions);
    let mut disabled = FixedBitSet::with_capacity(actions.len());
    for (i, a) in actions.iter().enumerate() {
        if a.add.contains(&atom) {
            disabled.insert(i);
        }
    }
    let rpg = relaxed.levels(Some(&disabled));
    g.goal_atoms
        .iter()
        .any(|&goal| rpg.atom_level[goal as usize] == UNREACHED)
}

/// DOT rendering: greedy-necessary edges solid, natural edges dashed.
pub fn to_dot(graph: &LandmarkGraph, g: &Grounded, pointers: &[PointerDecl]) -> String {
    use std::fmt::Write as _;
    let mut out = String::from("digraph landmarks {\n  rankdir=BT;\n");
    for (i, kind) in graph.nodes.iter().enumerate() {
        let shape = match kind {
            NodeKind::Fact(_) => "ellipse",
            NodeKind::Disj(_) => "box",
            NodeKind::PtrDisj(_) => "hexagon",
        };
        let _ = writeln!(
            out,
            "  n{} [label=\"{}\", shape={}];",
            i,
            graph.label(i as u32, g, pointers),
            shape
        );
    }
    for (to, preds) in graph.gn_preds.iter().enumerate() {
        for &from in preds {
            let _ = writeln!(out, "  n{from} -> n{to};");
        }
    }
    for (to, preds) in graph.nat_preds.iter().enumerate() {
        for &from in preds {
            let _ = writeln!(out, "  n{from} -> n{to} [style=dashed];");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains;
    use crate::program::parse_pointer_decls;
    use crate::strips::Domain;
    use crate::testutil::{ground, lock_domain, lock_instance};
    use smallvec::SmallVec;
    use std::sync::Arc;

    fn lock_i1() -> Grounded {
        ground(lock_domain(), lock_instance("i1", 6, 0, 5, 2))
    }

    fn fact_node(graph: &LandmarkGraph, g: &Grounded, text: &str) -> u32 {
        graph
            .nodes
            .iter()
            .position(|k| matches!(k, NodeKind::Fact(a) if g.atom_text(*a) == text))
            .unwrap_or_else(|| panic!("no fact node {text}")) as u32
    }

    #[test]
    fn relaxed_levels_on_the_corridor() {
        let g = lock_i1();
        let actions = g.all_actions();
        let rpg = Relaxed::new(&g, &actions).levels(None);
        let d = &g.domain;
        let at = d.pred_id("agent-at").unwrap();
        let key = d.pred_id("agent-has-key").unwrap();
        assert_eq!(rpg.atom_level[g.atom_id(at, &[2]).unwrap() as usize], 0);
        assert_eq!(rpg.atom_level[g.atom_id(at, &[3]).unwrap() as usize], 1);
        assert_eq!(rpg.atom_level[g.atom_id(key, &[]).unwrap() as usize], 4);
        let unlocked = d.pred_id("unlocked").unwrap();
        assert_eq!(rpg.atom_level[g.atom_id(unlocked, &[]).unwrap() as usize], 5);
        // Nothing ever adds lock positions: unreachable unless initial.
        let lock_at = d.pred_id("lock-at").unwrap();
        assert_eq!(rpg.atom_level[g.atom_id(lock_at, &[0]).unwrap() as usize], 0);
        assert_eq!(rpg.atom_level[g.atom_id(lock_at, &[3]).unwrap() as usize], UNREACHED);
    }

    #[test]
    fn relaxed_levels_cover_a_small_grid() {
        let (d, train, _) = domains::generate("visitall", 0).unwrap();
        let g = ground(d, train[0].clone());
        let actions = g.all_actions();
        let rpg = Relaxed::new(&g, &actions).levels(None);
        for a in 0..g.n_atoms() {
            assert!(rpg.atom_level[a] <= 2, "{}", g.atom_text(a as AtomId));
        }
    }

    #[test]
    fn backchain_recovers_the_corridor_chain() {
        let g = lock_i1();
        let actions = g.all_actions();
        let graph = backchain(&g, &actions).unwrap();

        let facts = graph
            .nodes
            .iter()
            .filter(|k| matches!(k, NodeKind::Fact(_)))
            .count();
        assert_eq!(facts, 15, "10 corridor facts plus 5 adjacency statics");
        assert_eq!(graph.nodes.len(), facts, "no disjunctions in a corridor");

        let chain = [
            "agent-at(p2)",
            "agent-at(p3)",
            "agent-at(p4)",
            "agent-at(p5)",
            "agent-has-key()",
            "unlocked()",
        ];
        for pair in chain.windows(2) {
            let from = fact_node(&graph, &g, pair[0]);
            let to = fact_node(&graph, &g, pair[1]);
            assert!(
                graph.gn_preds[to as usize].contains(&from),
                "{} should order before {}",
                pair[0],
                pair[1]
            );
        }
        let key5 = fact_node(&graph, &g, "key-at(p5)");
        let has = fact_node(&graph, &g, "agent-has-key()");
        assert!(graph.gn_preds[has as usize].contains(&key5));
        let lock0 = fact_node(&graph, &g, "lock-at(p0)");
        let unlocked = fact_node(&graph, &g, "unlocked()");
        assert!(graph.gn_preds[unlocked as usize].contains(&lock0));
        // Walking left to the lock is needed too.
        let p0 = fact_node(&graph, &g, "agent-at(p0)");
        let p1 = fact_node(&graph, &g, "agent-at(p1)");
        assert!(graph.gn_preds[p0 as usize].contains(&p1));
        assert!(graph.gn_preds[unlocked as usize].contains(&p0));
    }

    #[test]
    fn backchain_is_idempotent_and_goal_closed() {
        let g = lock_i1();
        let actions = g.all_actions();
        let a = backchain(&g, &actions).unwrap();
        let b = backchain(&g, &actions).unwrap();
        assert_eq!(a, b);
        for &goal in &g.goal_atoms {
            assert!(a.nodes.contains(&NodeKind::Fact(goal)));
        }
    }

    #[test]
    fn goal_inside_init_yields_bare_nodes() {
        let mut inst = crate::testutil::mark_instance("t", 2, true);
        inst.init = inst.goal.clone();
        let g = ground(crate::testutil::mark_domain(), inst);
        let actions = g.all_actions();
        let graph = backchain(&g, &actions).unwrap();
        assert_eq!(graph.nodes.len(), 2);
        assert!(graph.gn_preds.iter().all(|p| p.is_empty()));
    }

    #[test]
    fn unreachable_goal_is_reported() {
        // Goal q(...) over the spare type: no objects, so the goal atom
        // cannot even be grounded... use a reachable type but no adder.
        let mut d = crate::testutil::mark_domain();
        d.schemas.retain(|s| s.name != "mark");
        let inst = crate::testutil::mark_instance("t", 1, true);
        let g = ground(d, inst);
        let actions = g.all_actions();
        assert!(backchain(&g, &actions).is_err());
    }

    #[test]
    fn disjunctions_cover_alternative_grippers() {
        let (d, _, _) = domains::generate("gripper", 0).unwrap();
        let g = ground(d, domains::gripper::instance("g2", 2));
        let actions = g.all_actions();
        let graph = backchain(&g, &actions).unwrap();
        let carry_disjs: Vec<&NodeKind> = graph
            .nodes
            .iter()
            .filter(|k| match k {
                NodeKind::Disj(atoms) => atoms
                    .iter()
                    .all(|&a| g.atom_text(a).starts_with("carry(")),
                _ => false,
            })
            .collect();
        assert_eq!(carry_disjs.len(), 2, "one carry alternative per ball");
        for k in &carry_disjs {
            if let NodeKind::Disj(atoms) = k {
                assert_eq!(atoms.len(), 2, "two grippers");
            }
        }
        let free_disjs = graph
            .nodes
            .iter()
            .filter(|k| match k {
                NodeKind::Disj(atoms) => {
                    atoms.iter().all(|&a| g.atom_text(a).starts_with("free("))
                }
                _ => false,
            })
            .count();
        assert_eq!(free_disjs, 1);
    }

    #[test]
    fn natural_orderings_point_forward_and_dedup() {
        let g = lock_i1();
        let actions = g.all_actions();
        let mut graph = backchain(&g, &actions).unwrap();
        add_natural_orderings(&mut graph, &g, &actions);

        let p5 = fact_node(&graph, &g, "agent-at(p5)");
        let has = fact_node(&graph, &g, "agent-has-key()");
        let unlocked = fact_node(&graph, &g, "unlocked()");
        // gn already covers agent-has-key -> unlocked; no duplicate natural edge.
        assert!(graph.gn_preds[unlocked as usize].contains(&has));
        assert!(!graph.nat_preds[unlocked as usize].contains(&has));
        // Reaching the far cell must precede holding the key; only natural.
        assert!(graph.nat_preds[unlocked as usize].contains(&p5));
        assert!(!graph.gn_preds[unlocked as usize].contains(&p5));
        // Initial facts order before everything not yet holding.
        let p2 = fact_node(&graph, &g, "agent-at(p2)");
        let p4 = fact_node(&graph, &g, "agent-at(p4)");
        assert!(graph.nat_preds[p4 as usize].contains(&p2));
        for (to, preds) in graph.nat_preds.iter().enumerate() {
            assert!(!preds.contains(&(to as u32)), "self ordering");
        }
    }

    #[test]
    fn grid_init_cell_orders_before_the_rest() {
        let (d, _, _) = domains::generate("visitall", 0).unwrap();
        let g = ground(d, domains::visitall::instance("v2", 2));
        let actions = g.all_actions();
        let mut graph = backchain(&g, &actions).unwrap();
        add_natural_orderings(&mut graph, &g, &actions);
        let origin = fact_node(&graph, &g, "visited(r0,c0)");
        for text in ["visited(r0,c1)", "visited(r1,c0)", "visited(r1,c1)"] {
            let node = fact_node(&graph, &g, text);
            assert!(graph.nat_preds[node as usize].contains(&origin), "{text}");
        }
    }

    #[test]
    fn ordering_cycles_break_by_dropping_the_newest_edge() {
        // One action achieves both goals, so each goal looks naturally
        // prior to the other; the second edge must be dropped.
        let mut types = crate::strips::Types::new();
        types.add("item", crate::strips::TYPE_OBJECT);
        let d = Domain {
            name: "twin".into(),
            types,
            predicates: vec![
                crate::strips::PredicateDecl { name: "a".into(), params: vec![] },
                crate::strips::PredicateDecl { name: "b".into(), params: vec![] },
            ],
            schemas: vec![crate::strips::ActionSchema {
                name: "both".into(),
                params: vec![],
                pre: vec![],
                add: vec![
                    crate::strips::SchemaAtom { pred: 0, args: SmallVec::new() },
                    crate::strips::SchemaAtom { pred: 1, args: SmallVec::new() },
                ],
                del: vec![],
            }],
            constants: vec![],
        };
        let inst = crate::strips::Instance {
            name: "t".into(),
            objects: vec![],
            init: vec![],
            goal: vec![(0, SmallVec::new()), (1, SmallVec::new())],
        };
        let g = ground(d, inst);
        let actions = g.all_actions();
        let mut graph = backchain(&g, &actions).unwrap();
        add_natural_orderings(&mut graph, &g, &actions);
        let nat_edges: usize = graph.nat_preds.iter().map(|p| p.len()).sum();
        assert_eq!(nat_edges, 1, "one direction kept");
        assert_eq!(graph.notes.len(), 1);
        assert!(graph.notes[0].contains("cycle"));
    }

    #[test]
    fn pointer_nodes_name_the_key_cell() {
        let g = lock_i1();
        let actions = g.all_actions();
        let pointers = parse_pointer_decls("z1:location, z2:location", &g.domain).unwrap();
        let mut graph = backchain(&g, &actions).unwrap();
        add_natural_orderings(&mut graph, &g, &actions);
        let before = graph.clone();
        add_pointer_landmarks(&mut graph, &g, &pointers);

        // Monotone: enrichment only adds.
        assert!(graph.nodes.len() > before.nodes.len());
        for (i, preds) in before.gn_preds.iter().enumerate() {
            for p in preds {
                assert!(graph.gn_preds[i].contains(p));
            }
        }

        let ptr_nodes: Vec<u32> = (0..graph.nodes.len() as u32)
            .filter(|&i| matches!(graph.nodes[i as usize], NodeKind::PtrDisj(_)))
            .collect();
        assert_eq!(ptr_nodes.len(), 6, "one per corridor cell");
        let at5 = ptr_nodes
            .iter()
            .copied()
            .find(|&i| graph.label(i, &g, &pointers) == "z1=p5 | z2=p5")
            .expect("key cell node");
        let has = fact_node(&graph, &g, "agent-has-key()");
        assert!(graph.gn_preds[has as usize].contains(&at5));
        assert_eq!(graph.nodes.len(), 21);
    }

    #[test]
    fn grid_pointers_are_projected_per_axis() {
        let (d, _, _) = domains::generate("visitall", 0).unwrap();
        let g = ground(d, domains::visitall::instance("v2", 2));
        let actions = g.all_actions();
        let pointers = parse_pointer_decls("zi:row, zj:col", &g.domain).unwrap();
        let mut graph = backchain(&g, &actions).unwrap();
        add_pointer_landmarks(&mut graph, &g, &pointers);
        let labels: Vec<String> = (0..graph.nodes.len() as u32)
            .filter(|&i| matches!(graph.nodes[i as usize], NodeKind::PtrDisj(_)))
            .map(|i| graph.label(i, &g, &pointers))
            .collect();
        for want in ["zi=r0", "zi=r1", "zj=c0", "zj=c1"] {
            assert!(labels.iter().any(|l| l == want), "{want} missing in {labels:?}");
        }
    }

    #[test]
    fn no_pointers_means_skipped_conjuncts() {
        let g = lock_i1();
        let actions = g.all_actions();
        let mut graph = backchain(&g, &actions).unwrap();
        let nodes_before = graph.nodes.len();
        add_pointer_landmarks(&mut graph, &g, &[]);
        assert_eq!(graph.nodes.len(), nodes_before);
        assert!(!graph.notes.is_empty());
        assert!(graph.notes[0].contains("no pointer of a compatible type"));
    }

    #[test]
    fn emitted_facts_pass_the_removal_oracle() {
        for (name, inst) in [
            ("lock", None),
            ("gripper", Some(domains::gripper::instance("g3", 3))),
            ("intrusion", Some(domains::intrusion::instance("h2", 2))),
        ] {
            let g = match inst {
                Some(i) => {
                    let (d, _, _) = domains::generate(name, 0).unwrap();
                    ground(d, i)
                }
                None => lock_i1(),
            };
            let actions = g.all_actions();
            let graph = backchain(&g, &actions).unwrap();
            for kind in &graph.nodes {
                if let NodeKind::Fact(a) = kind {
                    assert!(
                        verify_fact_landmark(&g, &actions, *a),
                        "{name}: {}",
                        g.atom_text(*a)
                    );
                }
            }
        }
    }

    #[test]
    fn oracle_rejects_non_landmarks() {
        let g = lock_i1();
        let actions = g.all_actions();
        let key_at = g.domain.pred_id("key-at").unwrap();
        // The key never needs to sit at p3.
        let a = g.atom_id(key_at, &[3]).unwrap();
        assert!(!verify_fact_landmark(&g, &actions, a));
        let at = g.domain.pred_id("agent-at").unwrap();
        for pos in 0..6 {
            assert!(verify_fact_landmark(&g, &actions, g.atom_id(at, &[pos]).unwrap()));
        }
    }

    #[test]
    fn dot_export_renders_both_edge_styles() {
        let g = lock_i1();
        let actions = g.all_actions();
        let pointers = parse_pointer_decls("z1:location, z2:location", &g.domain).unwrap();
        let mut graph = backchain(&g, &actions).unwrap();
        add_natural_orderings(&mut graph, &g, &actions);
        add_pointer_landmarks(&mut graph, &g, &pointers);
        let dot = to_dot(&graph, &g, &pointers);
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("agent-has-key()"));
        assert!(dot.contains("z1=p5 | z2=p5"));
        assert!(dot.contains("[style=dashed]"));
        assert!(dot.contains("};") || dot.ends_with("}\n"));
    }

    #[test]
    fn build_is_deterministic() {
        let g = Arc::new(lock_i1());
        let pointers = parse_pointer_decls("z1:location, z2:location", &g.domain).unwrap();
        let a = build(&g, &pointers).unwrap();
        let b = build(&g, &pointers).unwrap();
        assert_eq!(a, b);
    }
}
