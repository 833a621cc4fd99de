//! Shared fixtures for unit tests.

use std::sync::Arc;

use smallvec::SmallVec;

use crate::domains;
use crate::strips::{Domain, GroundAtomSpec, Grounded, Instance, ObjId, TYPE_OBJECT};

pub fn ground(domain: Domain, instance: Instance) -> Grounded {
    Grounded::new(Arc::new(domain), Arc::new(instance)).unwrap()
}

pub fn lock_domain() -> Domain {
    domains::lock::domain()
}

pub fn lock_instance(
    name: &str,
    n: usize,
    lock_pos: usize,
    key_pos: usize,
    agent_pos: usize,
) -> Instance {
    domains::lock::instance(name, n, lock_pos, key_pos, agent_pos)
}

/// Minimal domain for machine-level tests: `mark(x)` makes `p(x)` true and
/// nothing ever deletes. The `spare` type exists but instances declare no
/// objects of it, which exercises empty pointer ranges.
pub fn mark_domain() -> Domain {
    let mut types = crate::strips::Types::new();
    let item = types.add("item", TYPE_OBJECT);
    let spare = types.add("spare", TYPE_OBJECT);
    let mut d = Domain {
        name: "mark".into(),
        types,
        predicates: vec![
            crate::strips::PredicateDecl { name: "p".into(), params: vec![item] },
            crate::strips::PredicateDecl { name: "q".into(), params: vec![spare] },
        ],
        schemas: Vec::new(),
        constants: Vec::new(),
    };
    let atom = |pred, args: &[u8]| crate::strips::SchemaAtom {
        pred,
        args: SmallVec::from_slice(args),
    };
    d.schemas.push(crate::strips::ActionSchema {
        name: "mark".into(),
        params: vec![item],
        pre: vec![],
        add: vec![atom(0, &[0])],
        del: vec![],
    });
    d.schemas.push(crate::strips::ActionSchema {
        name: "spark".into(),
        params: vec![spare],
        pre: vec![],
        add: vec![atom(1, &[0])],
        del: vec![],
    });
    d
}

/// Items b1..bn, empty init; the goal is every `p(b)` when `goal_all`,
/// otherwise empty (trivially satisfied).
pub fn mark_instance(name: &str, items: usize, goal_all: bool) -> Instance {
    let objects: Vec<(String, u16)> = (0..items).map(|i| (format!("b{}", i + 1), 1)).collect();
    let goal: Vec<GroundAtomSpec> = if goal_all {
        (0..items)
            .map(|i| (0u16, SmallVec::from_slice(&[i as ObjId])))
            .collect()
    } else {
        Vec::new()
    };
    Instance {
        name: name.into(),
        objects,
        init: Vec::new(),
        goal,
    }
}
