//! Typed STRIPS model: domains, instances, grounding, and state transitions.
//!
//! A [`Domain`] holds predicate and action-schema declarations over an object-type
//! hierarchy; an [`Instance`] supplies objects, an initial state, and a goal.
//! [`Grounded`] fixes a canonical numbering of ground atoms and ground actions for
//! one (domain, instance) pair, which everything downstream (execution, landmark
//! graphs, heuristics) relies on for reproducible traces.

use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use smallvec::SmallVec;

pub type TypeId = u16;
pub type PredId = u16;
pub type SchemaId = u16;
pub type ObjId = u16;
pub type AtomId = u32;
pub type ActId = u32;

/// Root type every object belongs to. Always id 0.
pub const TYPE_OBJECT: TypeId = 0;

/// Single-inheritance object-type table.
#[derive(Debug, Clone)]
pub struct Types {
    names: Vec<String>,
    parent: Vec<Option<TypeId>>,
}

impl Types {
    pub fn new() -> Self {
        Types { names: vec!["object".to_string()], parent: vec![None] }
    }

    pub fn add(&mut self, name: &str, parent: TypeId) -> TypeId {
        debug_assert!((parent as usize) < self.names.len());
        if let Some(id) = self.id(name) {
            return id;
        }
        let id = self.names.len() as TypeId;
        self.names.push(name.to_string());
        self.parent.push(Some(parent));
        id
    }

    pub fn id(&self, name: &str) -> Option<TypeId> {
        self.names.iter().position(|n| n == name).map(|i| i as TypeId)
    }

    pub fn name(&self, t: TypeId) -> &str {
        &self.names[t as usize]
    }

    /// Parent link; the root `object` has none.
    pub fn parent(&self, t: TypeId) -> Option<TypeId> {
        self.parent[t as usize]
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.names.len()
    }

    /// True iff `t` equals `anc` or `anc` is reachable via parent links.
    pub fn is_subtype(&self, t: TypeId, anc: TypeId) -> bool {
        let mut cur = Some(t);
        while let Some(c) = cur {
            if c == anc {
                return true;
            }
            cur = self.parent[c as usize];
        }
        false
    }
}

impl Default for Types {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone)]
pub struct PredicateDecl {
    pub name: String,
    pub params: Vec<TypeId>,
}

impl PredicateDecl {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

/// Atom over schema parameters: `pred(args...)` where each arg indexes a parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaAtom {
    pub pred: PredId,
    pub args: SmallVec<[u8; 4]>,
}

#[derive(Debug, Clone)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<TypeId>,
    pub pre: Vec<SchemaAtom>,
    pub add: Vec<SchemaAtom>,
    pub del: Vec<SchemaAtom>,
}

#[derive(Debug, Clone)]
pub struct Domain {
    pub name: String,
    pub types: Types,
    pub predicates: Vec<PredicateDecl>,
    pub schemas: Vec<ActionSchema>,
    /// Domain-level constants, prepended to every instance's object list.
    pub constants: Vec<(String, TypeId)>,
}

impl Domain {
    pub fn pred_id(&self, name: &str) -> Option<PredId> {
        self.predicates.iter().position(|p| p.name == name).map(|i| i as PredId)
    }

    pub fn schema_id(&self, name: &str) -> Option<SchemaId> {
        self.schemas.iter().position(|s| s.name == name).map(|i| i as SchemaId)
    }
}

/// Ground atom as written in an instance file, pre-numbering.
pub type GroundAtomSpec = (PredId, SmallVec<[ObjId; 4]>);

#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub objects: Vec<(String, TypeId)>,
    pub init: Vec<GroundAtomSpec>,
    pub goal: Vec<GroundAtomSpec>,
}

impl Instance {
    pub fn obj_id(&self, name: &str) -> Option<ObjId> {
        self.objects.iter().position(|(n, _)| n == name).map(|i| i as ObjId)
    }
}

/// Planning state: dense truth assignment over one instance's atom universe.
pub type State = FixedBitSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAction {
    pub schema: SchemaId,
    pub args: SmallVec<[ObjId; 4]>,
    pub pre: SmallVec<[AtomId; 6]>,
    pub add: SmallVec<[AtomId; 6]>,
    pub del: SmallVec<[AtomId; 6]>,
}

#[derive(Debug, thiserror::Error)]
pub enum GroundError {
    #[error("atom {0} has wrong arity for predicate")]
    Arity(String),
    #[error("object {obj} is not compatible with parameter type {ty} in {ctx}")]
    Typing { obj: String, ty: String, ctx: String },
    #[error("goal atom {0} is not part of the ground universe")]
    BadGoal(String),
}

/// Canonical grounding of one instance against its domain.
///
/// Atom ids are assigned lexicographically by (predicate declaration order,
/// object-id tuple), where each tuple position ranges over the objects
/// compatible with that parameter's type, in object declaration order.
/// Ground action ids follow the same scheme over schemas.
pub struct Grounded {
    pub domain: Arc<Domain>,
    pub instance: Arc<Instance>,
    /// Per type: compatible objects ascending by id.
    pub objs_by_type: Vec<Vec<ObjId>>,
    /// Per type, per object: position within `objs_by_type[t]`, if compatible.
    type_pos: Vec<Vec<Option<u16>>>,
    pred_base: Vec<AtomId>,
    n_atoms: AtomId,
    schema_base: Vec<ActId>,
    n_actions: ActId,
    pub init_state: State,
    pub goal_atoms: Vec<AtomId>,
}

impl Grounded {
    pub fn new(domain: Arc<Domain>, instance: Arc<Instance>) -> Result<Self, GroundError> {
        let nt = domain.types.len();
        let mut objs_by_type: Vec<Vec<ObjId>> = vec![Vec::new(); nt];
        let mut type_pos: Vec<Vec<Option<u16>>> = vec![vec![None; instance.objects.len()]; nt];
        for (oid, (_, oty)) in instance.objects.iter().enumerate() {
            for t in 0..nt as TypeId {
                if domain.types.is_subtype(*oty, t) {
                    type_pos[t as usize][oid] = Some(objs_by_type[t as usize].len() as u16);
                    objs_by_type[t as usize].push(oid as ObjId);
                }
            }
        }

        let mut pred_base = Vec::with_capacity(domain.predicates.len());
        let mut n_atoms: u64 = 0;
        for p in &domain.predicates {
            pred_base.push(n_atoms as AtomId);
            let mut count: u64 = 1;
            for &t in &p.params {
                count *= objs_by_type[t as usize].len() as u64;
            }
            n_atoms += count;
        }
        let mut schema_base = Vec::with_capacity(domain.schemas.len());
        let mut n_actions: u64 = 0;
        for s in &domain.schemas {
            schema_base.push(n_actions as ActId);
            let mut count: u64 = 1;
            for &t in &s.params {
                count *= objs_by_type[t as usize].len() as u64;
            }
            n_actions += count;
        }

        let mut g = Grounded {
            domain,
            instance,
            objs_by_type,
            type_pos,
            pred_base,
            n_atoms: n_atoms as AtomId,
            schema_base,
            n_actions: n_actions as ActId,
            init_state: FixedBitSet::with_capacity(n_atoms as usize),
            goal_atoms: Vec::new(),
        };

        let mut init = FixedBitSet::with_capacity(g.n_atoms as usize);
        for (pred, args) in &g.instance.init {
            let a = g.atom_id(*pred, args).ok_or_else(|| GroundError::Typing {
                obj: g.atom_spec_text(*pred, args),
                ty: "declared parameter".into(),
                ctx: "init".into(),
            })?;
            init.insert(a as usize);
        }
        let mut goal = Vec::new();
        for (pred, args) in &g.instance.goal {
            let a = g
                .atom_id(*pred, args)
                .ok_or_else(|| GroundError::BadGoal(g.atom_spec_text(*pred, args)))?;
            goal.push(a);
        }
        goal.sort_unstable();
        goal.dedup();
        g.init_state = init;
        g.goal_atoms = goal;
        Ok(g)
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms as usize
    }

    /// Position of `obj` within `objs_by_type[ty]`, if compatible.
    pub fn type_position(&self, ty: TypeId, obj: ObjId) -> Option<u16> {
        self.type_pos[ty as usize].get(obj as usize).copied().flatten()
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions as usize
    }

    fn atom_spec_text(&self, pred: PredId, args: &[ObjId]) -> String {
        let mut s = self.domain.predicates[pred as usize].name.clone();
        s.push('(');
        for (i, o) in args.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&self.instance.objects[*o as usize].0);
        }
        s.push(')');
        s
    }

    /// Mixed-radix atom id; `None` when a tuple element is type-incompatible.
    pub fn atom_id(&self, pred: PredId, args: &[ObjId]) -> Option<AtomId> {
        let decl = &self.domain.predicates[pred as usize];
        if decl.params.len() != args.len() {
            return None;
        }
        let mut idx: u64 = 0;
        for (&t, &o) in decl.params.iter().zip(args) {
            let pos = self.type_pos[t as usize].get(o as usize).copied().flatten()?;
            idx = idx * self.objs_by_type[t as usize].len() as u64 + pos as u64;
        }
        Some(self.pred_base[pred as usize] + idx as AtomId)
    }

    pub fn atom_of(&self, atom: AtomId) -> (PredId, SmallVec<[ObjId; 4]>) {
        let pred = match self.pred_base.binary_search(&atom) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let decl = &self.domain.predicates[pred];
        let mut rem = (atom - self.pred_base[pred]) as u64;
        let mut args: SmallVec<[ObjId; 4]> = SmallVec::from_elem(0, decl.params.len());
        for (slot, &t) in decl.params.iter().enumerate().rev() {
            let radix = self.objs_by_type[t as usize].len() as u64;
            args[slot] = self.objs_by_type[t as usize][(rem % radix) as usize];
            rem /= radix;
        }
        (pred as PredId, args)
    }

    pub fn action_id(&self, schema: SchemaId, args: &[ObjId]) -> Option<ActId> {
        let decl = &self.domain.schemas[schema as usize];
        if decl.params.len() != args.len() {
            return None;
        }
        let mut idx: u64 = 0;
        for (&t, &o) in decl.params.iter().zip(args) {
            let pos = self.type_pos[t as usize].get(o as usize).copied().flatten()?;
            idx = idx * self.objs_by_type[t as usize].len() as u64 + pos as u64;
        }
        Some(self.schema_base[schema as usize] + idx as ActId)
    }

    pub fn action_args_of(&self, act: ActId) -> (SchemaId, SmallVec<[ObjId; 4]>) {
        let schema = match self.schema_base.binary_search(&act) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let decl = &self.domain.schemas[schema];
        let mut rem = (act - self.schema_base[schema]) as u64;
        let mut args: SmallVec<[ObjId; 4]> = SmallVec::from_elem(0, decl.params.len());
        for (slot, &t) in decl.params.iter().enumerate().rev() {
            let radix = self.objs_by_type[t as usize].len() as u64;
            args[slot] = self.objs_by_type[t as usize][(rem % radix) as usize];
            rem /= radix;
        }
        (schema as SchemaId, args)
    }

    /// Instantiate a schema over an object tuple. The tuple must be type-correct.
    pub fn ground_action(&self, schema: SchemaId, args: &[ObjId]) -> GroundAction {
        let decl = &self.domain.schemas[schema as usize];
        let inst = |atoms: &[SchemaAtom]| -> SmallVec<[AtomId; 6]> {
            let mut out = SmallVec::new();
            for sa in atoms {
                let mut objs: SmallVec<[ObjId; 4]> = SmallVec::new();
                for &pi in &sa.args {
                    objs.push(args[pi as usize]);
                }
                let a = self
                    .atom_id(sa.pred, &objs)
                    .expect("schema atom grounds within the universe for type-correct args");
                out.push(a);
            }
            out
        };
        GroundAction {
            schema,
            args: SmallVec::from_slice(args),
            pre: inst(&decl.pre),
            add: inst(&decl.add),
            del: inst(&decl.del),
        }
    }

    pub fn action_of(&self, act: ActId) -> GroundAction {
        let (schema, args) = self.action_args_of(act);
        self.ground_action(schema, &args)
    }

    /// All ground actions in canonical id order.
    pub fn all_actions(&self) -> Vec<GroundAction> {
        let mut out = Vec::with_capacity(self.n_actions as usize);
        for id in 0..self.n_actions {
            out.push(self.action_of(id));
        }
        out
    }

    pub fn atom_text(&self, atom: AtomId) -> String {
        let (pred, args) = self.atom_of(atom);
        self.atom_spec_text(pred, &args)
    }

    pub fn action_text(&self, act: ActId) -> String {
        let (schema, args) = self.action_args_of(act);
        let mut s = self.domain.schemas[schema as usize].name.clone();
        s.push('(');
        for (i, o) in args.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&self.instance.objects[*o as usize].0);
        }
        s.push(')');
        s
    }

    pub fn new_state(&self) -> State {
        FixedBitSet::with_capacity(self.n_atoms as usize)
    }
}

impl fmt::Debug for Grounded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grounded")
            .field("instance", &self.instance.name)
            .field("atoms", &self.n_atoms)
            .field("actions", &self.n_actions)
            .finish()
    }
}

pub fn applicable(a: &GroundAction, s: &State) -> bool {
    a.pre.iter().all(|&p| s.contains(p as usize))
}

/// Successor state: (s \ del) ∪ add. Pure; `s` is untouched.
pub fn apply(a: &GroundAction, s: &State) -> State {
    debug_assert!(applicable(a, s));
    let mut out = s.clone();
    apply_in_place(a, &mut out);
    out
}

/// Delete-then-add on a mutable state.
pub fn apply_in_place(a: &GroundAction, s: &mut State) {
    for &d in &a.del {
        s.remove(d as usize);
    }
    for &ad in &a.add {
        s.insert(ad as usize);
    }
}

/// Like [`apply_in_place`], reporting actually flipped atoms (for incremental
/// hashing and landmark progress).
pub fn apply_tracked(
    a: &GroundAction,
    s: &mut State,
    removed: &mut SmallVec<[AtomId; 6]>,
    added: &mut SmallVec<[AtomId; 6]>,
) {
    removed.clear();
    added.clear();
    for &d in &a.del {
        if s.contains(d as usize) {
            s.remove(d as usize);
            removed.push(d);
        }
    }
    for &ad in &a.add {
        if !s.contains(ad as usize) {
            s.insert(ad as usize);
            added.push(ad);
        }
    }
}

pub fn satisfies_goal(s: &State, goal: &[AtomId]) -> bool {
    goal.iter().all(|&g| s.contains(g as usize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{lock_domain, lock_instance};

    #[test]
    fn move_schema_grounds_with_repetition() {
        // 2-parameter schema over 4 location objects: 16 ground actions.
        let domain = Arc::new(lock_domain());
        let inst = Arc::new(lock_instance("i", 4, 0, 3, 1));
        let g = Grounded::new(domain.clone(), inst).unwrap();
        let move_id = domain.schema_id("move").unwrap();
        let count = (0..g.n_actions())
            .filter(|&a| g.action_args_of(a as ActId).0 == move_id)
            .count();
        assert_eq!(count, 16);
    }

    #[test]
    fn atom_numbering_round_trips() {
        let domain = Arc::new(lock_domain());
        let inst = Arc::new(lock_instance("i1", 6, 0, 5, 2));
        let g = Grounded::new(domain, inst).unwrap();
        for a in 0..g.n_atoms() as AtomId {
            let (p, args) = g.atom_of(a);
            assert_eq!(g.atom_id(p, &args), Some(a));
        }
    }

    #[test]
    fn atom_numbering_is_lexicographic() {
        let domain = Arc::new(lock_domain());
        let inst = Arc::new(lock_instance("i1", 6, 0, 5, 2));
        let g = Grounded::new(domain.clone(), inst).unwrap();
        let at = domain.pred_id("agent-at").unwrap();
        let adj = domain.pred_id("adjacent").unwrap();
        // Within one predicate, ids follow the object tuple order.
        let a0 = g.atom_id(at, &[0]).unwrap();
        let a1 = g.atom_id(at, &[1]).unwrap();
        assert_eq!(a1, a0 + 1);
        let b = g.atom_id(adj, &[0, 1]).unwrap();
        let c = g.atom_id(adj, &[1, 0]).unwrap();
        assert!(b < c);
    }

    #[test]
    fn init_and_goal_are_grounded() {
        let domain = Arc::new(lock_domain());
        let inst = Arc::new(lock_instance("i1", 6, 0, 5, 2));
        let g = Grounded::new(domain.clone(), inst).unwrap();
        let lock_at = domain.pred_id("lock-at").unwrap();
        let key_at = domain.pred_id("key-at").unwrap();
        let agent_at = domain.pred_id("agent-at").unwrap();
        assert!(g.init_state.contains(g.atom_id(lock_at, &[0]).unwrap() as usize));
        assert!(g.init_state.contains(g.atom_id(key_at, &[5]).unwrap() as usize));
        assert!(g.init_state.contains(g.atom_id(agent_at, &[2]).unwrap() as usize));
        let unlocked = domain.pred_id("unlocked").unwrap();
        assert_eq!(g.goal_atoms, vec![g.atom_id(unlocked, &[]).unwrap()]);
        assert!(!satisfies_goal(&g.init_state, &g.goal_atoms));
    }

    #[test]
    fn apply_moves_the_agent() {
        let domain = Arc::new(lock_domain());
        let inst = Arc::new(lock_instance("i1", 6, 0, 5, 2));
        let g = Grounded::new(domain.clone(), inst).unwrap();
        let move_id = domain.schema_id("move").unwrap();
        let at = domain.pred_id("agent-at").unwrap();

        let a23 = g.ground_action(move_id, &[2, 3]);
        assert!(applicable(&a23, &g.init_state));
        let s1 = apply(&a23, &g.init_state);
        assert!(!s1.contains(g.atom_id(at, &[2]).unwrap() as usize));
        assert!(s1.contains(g.atom_id(at, &[3]).unwrap() as usize));

        // Frame: nothing but the touched atoms changed.
        let mut diff: Vec<usize> = s1.symmetric_difference(&g.init_state).collect();
        diff.sort_unstable();
        let mut expect = vec![
            g.atom_id(at, &[2]).unwrap() as usize,
            g.atom_id(at, &[3]).unwrap() as usize,
        ];
        expect.sort_unstable();
        assert_eq!(diff, expect);

        let a34 = g.ground_action(move_id, &[3, 4]);
        assert!(applicable(&a34, &s1));
        let a01 = g.ground_action(move_id, &[0, 1]);
        assert!(!applicable(&a01, &s1));
    }

    #[test]
    fn pickup_then_open_replays_plan_tail() {
        let domain = Arc::new(lock_domain());
        let inst = Arc::new(lock_instance("i1", 6, 0, 5, 2));
        let g = Grounded::new(domain.clone(), inst).unwrap();
        let move_id = domain.schema_id("move").unwrap();
        let pickup = domain.schema_id("pickup-key").unwrap();
        let open = domain.schema_id("open-lock").unwrap();

        let mut s = g.init_state.clone();
        for (from, to) in [(2u16, 3u16), (3, 4), (4, 5)] {
            let a = g.ground_action(move_id, &[from, to]);
            assert!(applicable(&a, &s), "move({from},{to})");
            apply_in_place(&a, &mut s);
        }
        let pk = g.ground_action(pickup, &[5]);
        assert!(applicable(&pk, &s));
        apply_in_place(&pk, &mut s);
        let key_at = domain.pred_id("key-at").unwrap();
        assert!(!s.contains(g.atom_id(key_at, &[5]).unwrap() as usize));
        for (from, to) in [(5u16, 4u16), (4, 3), (3, 2), (2, 1), (1, 0)] {
            let a = g.ground_action(move_id, &[from, to]);
            assert!(applicable(&a, &s));
            apply_in_place(&a, &mut s);
        }
        let op = g.ground_action(open, &[0]);
        assert!(applicable(&op, &s));
        apply_in_place(&op, &mut s);
        assert!(satisfies_goal(&s, &g.goal_atoms));
    }

    #[test]
    fn action_count_matches_radix_product() {
        let domain = Arc::new(lock_domain());
        let inst = Arc::new(lock_instance("i3", 5, 0, 4, 3));
        let g = Grounded::new(domain, inst).unwrap();
        // move: 25, pickup-key/drop-key/open-lock: 5 each.
        assert_eq!(g.n_actions(), 25 + 5 + 5 + 5);
        assert_eq!(g.all_actions().len(), g.n_actions());
    }
}
