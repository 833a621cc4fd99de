//! Abstract machine that runs pointer programs against one ground instance.
//!
//! Machine state is (planning state, pointer values, flag, program counter).
//! Pointers start at 0, the flag starts false. One instruction executes per
//! step; an inapplicable instruction of any kind sets the flag and falls
//! through, it never aborts the run. Execution halts on `end` (solved or not
//! depending on the goal), on an undefined line (the program is a prefix
//! still being synthesized), on revisiting a complete machine state, or on
//! the step limit. Revisits are detected with 128-bit Zobrist keys kept
//! incrementally, so a hit means a provable infinite loop up to hash
//! collision odds of roughly 2^-128 per pair.

use std::collections::HashSet;
use std::sync::Arc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use smallvec::SmallVec;

use crate::program::{Instr, PointerDecl, Program};
use crate::strips::{
    apply_tracked, satisfies_goal, ActId, AtomId, GroundAction, Grounded, ObjId, State,
};

const ZOBRIST_SEED: u64 = 0x51ab_3c77_9e1f_204d;
const STEP_LIMIT_CAP: u64 = 100_000_000;

pub type PtrVals = SmallVec<[u16; 8]>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Halted at `end` with the goal satisfied.
    Solved,
    /// Halted at `end` with the goal unsatisfied.
    FailedIncorrect,
    /// Revisited a machine state, or ran out of steps (`by_limit`).
    FailedInfinite { by_limit: bool },
    /// Reached an undefined line; the carried machine state is where a
    /// continuation of the program would resume.
    PendingUndefined,
}

impl Outcome {
    pub fn is_failed(self) -> bool {
        matches!(self, Outcome::FailedIncorrect | Outcome::FailedInfinite { .. })
    }
}

#[derive(Debug, Clone)]
pub struct Execution {
    pub outcome: Outcome,
    pub steps: u64,
    pub state: State,
    pub pointers: PtrVals,
    pub flag: bool,
    /// Line the machine halted on.
    pub pc: usize,
}

/// Receives state-change events during a run. Heuristic monitors hook in
/// here so one execution serves both classification and evaluation.
pub trait Observer {
    fn start(&mut self, state: &State, ptrs: &[u16]);
    fn atoms_added(&mut self, added: &[AtomId], state: &State, ptrs: &[u16]);
    fn ptr_set(&mut self, z: usize, value: u16, state: &State, ptrs: &[u16]);
}

pub struct NoObserver;

impl Observer for NoObserver {
    fn start(&mut self, _: &State, _: &[u16]) {}
    fn atoms_added(&mut self, _: &[AtomId], _: &State, _: &[u16]) {}
    fn ptr_set(&mut self, _: usize, _: u16, _: &State, _: &[u16]) {}
}

/// Reusable execution context for one (instance, pointer set) pair: the
/// ground action table, pointer value ranges, and Zobrist key tables.
pub struct ExecContext {
    pub g: Arc<Grounded>,
    pub pointers: Arc<[PointerDecl]>,
    /// Per pointer: objects its type ranges over, declaration order.
    ptr_dom: Vec<Arc<Vec<ObjId>>>,
    actions: Vec<GroundAction>,
    atom_keys: Vec<u128>,
    ptr_keys: Vec<Vec<u128>>,
    pc_keys: Vec<u128>,
    flag_key: u128,
    base_key: u128,
    dom_product: u64,
    seen: HashSet<u128>,
}

impl ExecContext {
    pub fn new(g: Arc<Grounded>, pointers: Arc<[PointerDecl]>) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(ZOBRIST_SEED);
        let atom_keys: Vec<u128> = (0..g.n_atoms()).map(|_| rng.gen()).collect();
        let mut ptr_dom = Vec::with_capacity(pointers.len());
        let mut ptr_keys: Vec<Vec<u128>> = Vec::with_capacity(pointers.len());
        let mut dom_product: u64 = 1;
        for p in pointers.iter() {
            let dom = &g.objs_by_type[p.ty as usize];
            dom_product = dom_product.saturating_mul(dom.len().max(1) as u64);
            ptr_dom.push(Arc::new(dom.clone()));
            ptr_keys.push((0..dom.len().max(1)).map(|_| rng.gen()).collect());
        }
        let pc_keys: Vec<u128> = (0..Program::MAX_LINES).map(|_| rng.gen()).collect();
        let flag_key: u128 = rng.gen();

        let mut base_key = 0u128;
        for a in g.init_state.ones() {
            base_key ^= atom_keys[a];
        }
        for keys in &ptr_keys {
            base_key ^= keys[0];
        }

        ExecContext {
            actions: g.all_actions(),
            g,
            pointers,
            ptr_dom,
            atom_keys,
            ptr_keys,
            pc_keys,
            flag_key,
            base_key,
            dom_product,
            seen: HashSet::new(),
        }
    }

    /// Covers every reachable machine state with a 10x margin, capped so a
    /// single run can never stall a search indefinitely.
    pub fn default_step_limit(&self, n_lines: usize) -> u64 {
        let states = (n_lines as u64)
            .saturating_mul(2)
            .saturating_mul(self.dom_product)
            .saturating_mul(self.g.n_atoms() as u64 + 1);
        states.saturating_mul(10).min(STEP_LIMIT_CAP)
    }

    pub fn execute<O: Observer>(
        &mut self,
        prog: &Program,
        obs: &mut O,
        plan: Option<&mut Vec<ActId>>,
    ) -> Execution {
        let limit = self.default_step_limit(prog.len());
        self.execute_with_limit(prog, obs, plan, limit)
    }

    pub fn execute_with_limit<O: Observer>(
        &mut self,
        prog: &Program,
        obs: &mut O,
        plan: Option<&mut Vec<ActId>>,
        step_limit: u64,
    ) -> Execution {
        let mut seen = std::mem::take(&mut self.seen);
        let exec = self.execute_scratch(prog, obs, plan, step_limit, &mut seen);
        self.seen = seen;
        exec
    }

    /// Core interpreter. The duplicate set comes from the caller so shared
    /// contexts can serve concurrent runs.
    pub fn execute_scratch<O: Observer>(
        &self,
        prog: &Program,
        obs: &mut O,
        mut plan: Option<&mut Vec<ActId>>,
        step_limit: u64,
        seen: &mut HashSet<u128>,
    ) -> Execution {
        debug_assert_eq!(prog.pointers.len(), self.pointers.len());
        let nz = self.pointers.len();
        let mut state = self.g.init_state.clone();
        let mut ptrs: PtrVals = SmallVec::from_elem(0u16, nz);
        let mut flag = false;
        let mut pc = 0usize;
        let mut steps = 0u64;
        let mut key = self.base_key ^ self.pc_keys[0];
        seen.clear();
        seen.insert(key);
        obs.start(&state, &ptrs);

        let mut removed: SmallVec<[AtomId; 6]> = SmallVec::new();
        let mut added: SmallVec<[AtomId; 6]> = SmallVec::new();

        let finish = |outcome, steps, state, ptrs, flag, pc| Execution {
            outcome,
            steps,
            state,
            pointers: ptrs,
            flag,
            pc,
        };

        loop {
            let instr = match &prog.lines[pc] {
                None => return finish(Outcome::PendingUndefined, steps, state, ptrs, flag, pc),
                Some(Instr::End) => {
                    let outcome = if satisfies_goal(&state, &self.g.goal_atoms) {
                        Outcome::Solved
                    } else {
                        Outcome::FailedIncorrect
                    };
                    return finish(outcome, steps, state, ptrs, flag, pc);
                }
                Some(i) => i,
            };

            let mut next_pc = pc + 1;
            match *instr {
                Instr::Act { schema, ref args } => {
                    match self.map_action(schema, args, &ptrs) {
                        Some(act_id) => {
                            let action = &self.actions[act_id as usize];
                            if crate::strips::applicable(action, &state) {
                                apply_tracked(action, &mut state, &mut removed, &mut added);
                                for &a in removed.iter().chain(added.iter()) {
                                    key ^= self.atom_keys[a as usize];
                                }
                                if let Some(p) = plan.as_deref_mut() {
                                    p.push(act_id);
                                }
                                if !added.is_empty() {
                                    obs.atoms_added(&added, &state, &ptrs);
                                }
                            } else if !flag {
                                flag = true;
                                key ^= self.flag_key;
                            }
                        }
                        None => {
                            if !flag {
                                flag = true;
                                key ^= self.flag_key;
                            }
                        }
                    }
                }
                Instr::Inc(z) => {
                    let z = z as usize;
                    let size = self.ptr_dom[z].len() as u64;
                    let new = if (ptrs[z] as u64) + 1 < size {
                        Some(ptrs[z] + 1)
                    } else {
                        None
                    };
                    self.set_ptr(z, new, &mut ptrs, &mut flag, &mut key, &mut state, obs);
                }
                Instr::Dec(z) => {
                    let z = z as usize;
                    let new = if ptrs[z] > 0 { Some(ptrs[z] - 1) } else { None };
                    self.set_ptr(z, new, &mut ptrs, &mut flag, &mut key, &mut state, obs);
                }
                Instr::Clear(z) => {
                    let z = z as usize;
                    self.set_ptr(z, Some(0), &mut ptrs, &mut flag, &mut key, &mut state, obs);
                }
                Instr::Set(z1, z2) => {
                    let (z1, z2) = (z1 as usize, z2 as usize);
                    self.set_ptr(z1, Some(ptrs[z2]), &mut ptrs, &mut flag, &mut key, &mut state, obs);
                }
                Instr::Test { pred, ref args } => {
                    let holds = self.map_atom(pred, args, &ptrs).map(|a| state.contains(a as usize));
                    let new_flag = match holds {
                        Some(h) => !h,
                        None => true,
                    };
                    if flag != new_flag {
                        flag = new_flag;
                        key ^= self.flag_key;
                    }
                }
                Instr::Goto { target, on_true } => {
                    if flag == on_true {
                        next_pc = target as usize;
                    }
                }
                Instr::End => unreachable!(),
            }

            key ^= self.pc_keys[pc] ^ self.pc_keys[next_pc];
            pc = next_pc;
            steps += 1;

            // Halting lines cannot recur, so skip their bookkeeping.
            let halts = matches!(prog.lines[pc], None | Some(Instr::End));
            if halts {
                continue;
            }
            if !seen.insert(key) {
                return finish(
                    Outcome::FailedInfinite { by_limit: false },
                    steps,
                    state,
                    ptrs,
                    flag,
                    pc,
                );
            }
            if steps >= step_limit {
                return finish(
                    Outcome::FailedInfinite { by_limit: true },
                    steps,
                    state,
                    ptrs,
                    flag,
                    pc,
                );
            }
        }
    }

    /// Pointer write shared by inc/dec/clear/set: `None` means the update
    /// was inapplicable. Keeps the flag and hash key in sync.
    #[allow(clippy::too_many_arguments)]
    fn set_ptr<O: Observer>(
        &self,
        z: usize,
        new: Option<u16>,
        ptrs: &mut PtrVals,
        flag: &mut bool,
        key: &mut u128,
        state: &mut State,
        obs: &mut O,
    ) {
        let new_flag = match new {
            Some(v) => {
                if v != ptrs[z] {
                    *key ^= self.ptr_keys[z][ptrs[z] as usize] ^ self.ptr_keys[z][v as usize];
                    ptrs[z] = v;
                    obs.ptr_set(z, v, state, ptrs);
                }
                v == 0
            }
            None => true,
        };
        if *flag != new_flag {
            *flag = new_flag;
            *key ^= self.flag_key;
        }
    }

    fn map_action(&self, schema: u16, args: &[u8], ptrs: &[u16]) -> Option<ActId> {
        let mut objs: SmallVec<[ObjId; 4]> = SmallVec::new();
        for &z in args {
            let dom = &self.ptr_dom[z as usize];
            objs.push(*dom.get(ptrs[z as usize] as usize)?);
        }
        self.g.action_id(schema, &objs)
    }

    fn map_atom(&self, pred: u16, args: &[u8], ptrs: &[u16]) -> Option<AtomId> {
        let mut objs: SmallVec<[ObjId; 4]> = SmallVec::new();
        for &z in args {
            let dom = &self.ptr_dom[z as usize];
            objs.push(*dom.get(ptrs[z as usize] as usize)?);
        }
        self.g.atom_id(pred, &objs)
    }

    pub fn solves(&mut self, prog: &Program) -> bool {
        self.execute(prog, &mut NoObserver, None).outcome == Outcome::Solved
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains;
    use crate::program::parse_program;
    use crate::testutil::{ground, lock_domain, lock_instance, mark_domain, mark_instance};

    fn run_mark(items: usize, goal_all: bool, text: &str) -> (Execution, Vec<String>) {
        let d = Arc::new(mark_domain());
        let inst = Arc::new(mark_instance("m", items, goal_all));
        let g = Arc::new(Grounded::new(d.clone(), inst).unwrap());
        let prog = parse_program(text, &d).unwrap();
        let mut ctx = ExecContext::new(g.clone(), prog.pointers.clone());
        let mut plan = Vec::new();
        let exec = ctx.execute(&prog, &mut NoObserver, Some(&mut plan));
        let plan_text = plan.iter().map(|&a| g.action_text(a)).collect();
        (exec, plan_text)
    }

    #[test]
    fn pointer_ops_drive_the_flag() {
        // inc up to the last object, then a failing inc.
        let (exec, _) = run_mark(2, false, "pointers: z1:item\n0. inc(z1)\n2. end\n");
        assert_eq!(exec.outcome, Outcome::PendingUndefined);
        assert_eq!(exec.pointers[0], 1);
        assert!(!exec.flag);

        let (exec, _) = run_mark(2, false, "pointers: z1:item\n0. inc(z1)\n1. inc(z1)\n3. end\n");
        assert_eq!(exec.pointers[0], 1);
        assert!(exec.flag, "saturated inc is inapplicable");

        // dec at zero fails; dec back onto zero raises the flag.
        let (exec, _) = run_mark(3, false, "pointers: z1:item\n0. dec(z1)\n2. end\n");
        assert_eq!(exec.pointers[0], 0);
        assert!(exec.flag);
        let (exec, _) = run_mark(
            3,
            false,
            "pointers: z1:item\n0. inc(z1)\n1. dec(z1)\n3. end\n",
        );
        assert_eq!(exec.pointers[0], 0);
        assert!(exec.flag);

        let (exec, _) = run_mark(
            3,
            false,
            "pointers: z1:item\n0. inc(z1)\n1. inc(z1)\n2. clear(z1)\n4. end\n",
        );
        assert_eq!(exec.pointers[0], 0);
        assert!(exec.flag);

        // set copies the source value; flag reports whether it was zero.
        let (exec, _) = run_mark(
            3,
            false,
            "pointers: z1:item, z2:item\n0. inc(z2)\n1. set(z1,z2)\n3. end\n",
        );
        assert_eq!(exec.pointers[0], 1);
        assert_eq!(exec.pointers[1], 1);
        assert!(!exec.flag);
        let (exec, _) = run_mark(
            3,
            false,
            "pointers: z1:item, z2:item\n0. inc(z1)\n1. set(z1,z2)\n3. end\n",
        );
        assert_eq!(exec.pointers[0], 0);
        assert!(exec.flag);
    }

    #[test]
    fn test_instruction_reads_negated_truth() {
        let (exec, _) = run_mark(2, false, "pointers: z1:item\n0. test(p(z1))\n2. end\n");
        assert!(exec.flag, "unmarked item: p false, flag true");
        let (exec, _) = run_mark(
            2,
            false,
            "pointers: z1:item\n0. mark(z1)\n1. test(p(z1))\n3. end\n",
        );
        assert!(!exec.flag, "marked item: p true, flag false");
    }

    #[test]
    fn applicable_actions_leave_the_flag_alone() {
        let (exec, plan) = run_mark(
            2,
            false,
            "pointers: z1:item\n0. inc(z1)\n1. dec(z1)\n2. mark(z1)\n4. end\n",
        );
        // dec left the flag raised; mark must not touch it.
        assert_eq!(plan, vec!["mark(b1)"]);
        assert!(exec.flag);

        let (exec, _) = run_mark(
            2,
            false,
            "pointers: z1:item\n0. mark(z1)\n1. mark(z1)\n3. end\n",
        );
        // Second mark deletes nothing and adds nothing new, yet p(b1)
        // still holds, so it is applicable and the flag stays down.
        assert!(!exec.flag);
        assert_eq!(exec.outcome, Outcome::PendingUndefined);
    }

    #[test]
    fn lock_reference_run_emits_the_expected_plan() {
        let g = Arc::new(ground(lock_domain(), lock_instance("i1", 6, 0, 5, 2)));
        let prog = parse_program(domains::fixture_text("lock").unwrap(), &g.domain).unwrap();
        let mut ctx = ExecContext::new(g.clone(), prog.pointers.clone());
        let mut plan = Vec::new();
        let exec = ctx.execute(&prog, &mut NoObserver, Some(&mut plan));
        assert_eq!(exec.outcome, Outcome::Solved);
        let texts: Vec<String> = plan.iter().map(|&a| g.action_text(a)).collect();
        assert_eq!(
            texts,
            vec![
                "move(p2,p3)",
                "move(p3,p4)",
                "move(p4,p5)",
                "pickup-key(p5)",
                "move(p5,p4)",
                "move(p4,p3)",
                "move(p3,p2)",
                "move(p2,p1)",
                "move(p1,p0)",
                "open-lock(p0)",
            ]
        );
    }

    #[test]
    fn end_alone_solves_iff_the_goal_already_holds() {
        let (exec, plan) = run_mark(2, false, "pointers: z1:item\n0. end\n");
        assert_eq!(exec.outcome, Outcome::Solved);
        assert!(plan.is_empty());
        assert_eq!(exec.steps, 0);

        let (exec, _) = run_mark(2, true, "pointers: z1:item\n0. end\n");
        assert_eq!(exec.outcome, Outcome::FailedIncorrect);
    }

    #[test]
    fn revisited_machine_state_is_an_infinite_loop() {
        let (exec, _) = run_mark(
            2,
            true,
            "pointers: z1:item\n0. clear(z1)\n1. goto(0,yz)\n2. end\n",
        );
        assert_eq!(exec.outcome, Outcome::FailedInfinite { by_limit: false });
        // clear raises the flag, goto jumps back, and the second clear
        // reproduces the step-1 state exactly.
        assert_eq!(exec.steps, 3);
    }

    #[test]
    fn flag_participates_in_the_machine_state_key() {
        // After the saturated inc only the flag differs from the earlier
        // visit to line 1; the run must push on to the end, not abort.
        let (exec, _) = run_mark(
            2,
            false,
            "pointers: z1:item\n0. inc(z1)\n1. goto(0,!yz)\n2. end\n",
        );
        assert_eq!(exec.outcome, Outcome::Solved);
        assert_eq!(exec.steps, 4);
    }

    #[test]
    fn state_changes_keep_the_loop_alive_until_the_goal() {
        let (exec, plan) = run_mark(
            2,
            true,
            "pointers: z1:item\n0. mark(z1)\n1. inc(z1)\n2. goto(0,!yz)\n3. end\n",
        );
        assert_eq!(exec.outcome, Outcome::Solved);
        assert_eq!(plan, vec!["mark(b1)", "mark(b2)"]);
    }

    #[test]
    fn step_limit_reports_by_limit() {
        let d = Arc::new(mark_domain());
        let inst = Arc::new(mark_instance("m", 2, true));
        let g = Arc::new(Grounded::new(d.clone(), inst).unwrap());
        let prog = parse_program(
            "pointers: z1:item\n0. mark(z1)\n1. inc(z1)\n2. goto(0,!yz)\n3. end\n",
            &d,
        )
        .unwrap();
        let mut ctx = ExecContext::new(g, prog.pointers.clone());
        let exec = ctx.execute_with_limit(&prog, &mut NoObserver, None, 2);
        assert_eq!(exec.outcome, Outcome::FailedInfinite { by_limit: true });
        assert_eq!(exec.steps, 2);
    }

    #[test]
    fn undefined_line_suspends_with_the_machine_state() {
        let (exec, _) = run_mark(
            3,
            false,
            "pointers: z1:item\n0. inc(z1)\n1. mark(z1)\n3. end\n",
        );
        assert_eq!(exec.outcome, Outcome::PendingUndefined);
        assert_eq!(exec.pc, 2);
        assert_eq!(exec.steps, 2);
        assert_eq!(exec.pointers[0], 1);
        let d = mark_domain();
        let p = d.pred_id("p").unwrap();
        let g = ground(mark_domain(), mark_instance("m", 3, false));
        assert!(exec.state.contains(g.atom_id(p, &[1]).unwrap() as usize));
    }

    #[test]
    fn empty_pointer_type_makes_everything_inapplicable() {
        // No objects of type spare exist, so the pointer can never map.
        let (exec, plan) = run_mark(
            2,
            false,
            "pointers: z1:item, zs:spare\n0. inc(zs)\n1. spark(zs)\n2. test(q(zs))\n3. mark(z1)\n5. end\n",
        );
        assert_eq!(exec.outcome, Outcome::PendingUndefined);
        assert_eq!(exec.pointers[1], 0);
        assert!(exec.flag);
        assert_eq!(plan, vec!["mark(b1)"]);
    }

    #[test]
    fn step_limit_default_scales_and_caps() {
        let g = Arc::new(ground(mark_domain(), mark_instance("m", 2, true)));
        let d = Arc::new(mark_domain());
        let prog = parse_program("pointers: z1:item\n0. end\n", &d).unwrap();
        let ctx = ExecContext::new(g, prog.pointers.clone());
        // 1 line, flag, 2 pointer values, 5 atoms (p over 2 items... 2 atoms) + 1.
        let small = ctx.default_step_limit(1);
        let large = ctx.default_step_limit(200);
        assert!(small < large);
        assert!(large <= STEP_LIMIT_CAP);

        let big = Arc::new(ground(lock_domain(), lock_instance("big", 120, 0, 119, 60)));
        let lp = parse_program(
            "pointers: z1:location, z2:location\n0. end\n",
            &lock_domain(),
        )
        .unwrap();
        let bctx = ExecContext::new(big, lp.pointers.clone());
        assert_eq!(bctx.default_step_limit(200), STEP_LIMIT_CAP);
    }
}
