//! Built-in benchmark domains: typed STRIPS encodings, deterministic
//! instance constructors, and seeded instance samplers.
//!
//! Declaration order is part of each domain's identity. Predicate and
//! schema order fix atom and action numbering, which in turn fix the
//! candidate enumeration order during synthesis, so the builders below
//! never reorder declarations.
//!
//! Samplers draw from `ChaCha8Rng` seeded with the user seed and the
//! instance index as the stream (validation instances offset by 1000),
//! so any single instance can be regenerated without the rest.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use smallvec::SmallVec;

use crate::strips::{
    ActionSchema, Domain, GroundAtomSpec, Instance, ObjId, PredId, SchemaAtom, TypeId, Types,
    TYPE_OBJECT,
};

const VAL_STREAM_BASE: u64 = 1000;

/// Names of all built-in domains, in alphabetical order.
pub const DOMAIN_NAMES: [&str; 8] = [
    "baking",
    "corridor",
    "gripper",
    "intrusion",
    "lock",
    "ontable",
    "spanner",
    "visitall",
];

/// Reference program listing for a built-in domain, if one is bundled.
pub fn fixture_text(domain: &str) -> Option<&'static str> {
    Some(match domain {
        "baking" => include_str!("fixtures/baking.program"),
        "corridor" => include_str!("fixtures/corridor.program"),
        "gripper" => include_str!("fixtures/gripper.program"),
        "intrusion" => include_str!("fixtures/intrusion.program"),
        "lock" => include_str!("fixtures/lock.program"),
        "ontable" => include_str!("fixtures/ontable.program"),
        "spanner" => include_str!("fixtures/spanner.program"),
        "visitall" => include_str!("fixtures/visitall.program"),
        _ => return None,
    })
}

/// Builds the domain named `name` along with its seeded training and
/// validation instance sets.
pub fn generate(name: &str, seed: u64) -> Option<(Domain, Vec<Instance>, Vec<Instance>)> {
    let out = match name {
        "baking" => (baking::domain(), baking::train(seed), baking::val(seed)),
        "corridor" => (corridor::domain(), corridor::train(seed), corridor::val(seed)),
        "gripper" => (gripper::domain(), gripper::train(seed), gripper::val(seed)),
        "intrusion" => (intrusion::domain(), intrusion::train(seed), intrusion::val(seed)),
        "lock" => (lock::domain(), lock::train(seed), lock::val(seed)),
        "ontable" => (ontable::domain(), ontable::train(seed), ontable::val(seed)),
        "spanner" => (spanner::domain(), spanner::train(seed), spanner::val(seed)),
        "visitall" => (visitall::domain(), visitall::train(seed), visitall::val(seed)),
        _ => return None,
    };
    Some(out)
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Incremental builder so the domain definitions below read like tables.
struct Db {
    domain: Domain,
}

impl Db {
    fn new(name: &str) -> Self {
        Db {
            domain: Domain {
                name: name.to_string(),
                types: Types::new(),
                predicates: Vec::new(),
                schemas: Vec::new(),
                constants: Vec::new(),
            },
        }
    }

    fn ty(&mut self, name: &str, parent: TypeId) -> TypeId {
        self.domain.types.add(name, parent)
    }

    fn pred(&mut self, name: &str, params: &[TypeId]) -> PredId {
        self.domain.predicates.push(crate::strips::PredicateDecl {
            name: name.to_string(),
            params: params.to_vec(),
        });
        (self.domain.predicates.len() - 1) as PredId
    }

    fn schema(
        &mut self,
        name: &str,
        params: &[TypeId],
        pre: &[(PredId, &[u8])],
        add: &[(PredId, &[u8])],
        del: &[(PredId, &[u8])],
    ) {
        let conv = |atoms: &[(PredId, &[u8])]| {
            atoms
                .iter()
                .map(|&(pred, args)| SchemaAtom {
                    pred,
                    args: SmallVec::from_slice(args),
                })
                .collect::<Vec<_>>()
        };
        self.domain.schemas.push(ActionSchema {
            name: name.to_string(),
            params: params.to_vec(),
            pre: conv(pre),
            add: conv(add),
            del: conv(del),
        });
    }
}

fn atom(pred: PredId, args: &[ObjId]) -> GroundAtomSpec {
    (pred, SmallVec::from_slice(args))
}

/// Corridor of locations with a lock at one end and a key at the other.
pub mod lock {
    use super::*;

    pub fn domain() -> Domain {
        let mut b = Db::new("lock");
        let loc = b.ty("location", TYPE_OBJECT);
        let agent_at = b.pred("agent-at", &[loc]);
        let key_at = b.pred("key-at", &[loc]);
        let lock_at = b.pred("lock-at", &[loc]);
        let has_key = b.pred("agent-has-key", &[]);
        let adjacent = b.pred("adjacent", &[loc, loc]);
        let unlocked = b.pred("unlocked", &[]);
        b.schema(
            "move",
            &[loc, loc],
            &[(agent_at, &[0]), (adjacent, &[0, 1])],
            &[(agent_at, &[1])],
            &[(agent_at, &[0])],
        );
        b.schema(
            "pickup-key",
            &[loc],
            &[(agent_at, &[0]), (key_at, &[0])],
            &[(has_key, &[])],
            &[(key_at, &[0])],
        );
        b.schema(
            "drop-key",
            &[loc],
            &[(agent_at, &[0]), (has_key, &[])],
            &[(key_at, &[0])],
            &[(has_key, &[])],
        );
        b.schema(
            "open-lock",
            &[loc],
            &[(agent_at, &[0]), (lock_at, &[0]), (has_key, &[])],
            &[(unlocked, &[])],
            &[],
        );
        b.domain
    }

    /// `n` locations p0..p{n-1} in a line; positions index into that line.
    pub fn instance(name: &str, n: usize, lock_pos: usize, key_pos: usize, agent_pos: usize) -> Instance {
        assert!(n >= 2 && lock_pos < n && key_pos < n && agent_pos < n);
        let objects: Vec<(String, TypeId)> = (0..n).map(|i| (format!("p{i}"), 1)).collect();
        let mut init = vec![
            atom(0, &[agent_pos as ObjId]),
            atom(1, &[key_pos as ObjId]),
            atom(2, &[lock_pos as ObjId]),
        ];
        for i in 0..n - 1 {
            init.push(atom(4, &[i as ObjId, i as ObjId + 1]));
            init.push(atom(4, &[i as ObjId + 1, i as ObjId]));
        }
        Instance {
            name: name.to_string(),
            objects,
            init,
            goal: vec![atom(5, &[])],
        }
    }

    pub fn train(seed: u64) -> Vec<Instance> {
        (0..10)
            .map(|i| {
                let n = 5 + i;
                let mut rng = rng_for(seed, i as u64);
                let agent = rng.gen_range(1..n - 1);
                instance(&format!("lock-{:02}", i + 1), n, 0, n - 1, agent)
            })
            .collect()
    }

    pub fn val(seed: u64) -> Vec<Instance> {
        (0..50)
            .map(|j| {
                let n = 12 + j;
                let mut rng = rng_for(seed, VAL_STREAM_BASE + j as u64);
                let agent = rng.gen_range(1..n - 1);
                instance(&format!("lock-val-{:02}", j + 1), n, 0, n - 1, agent)
            })
            .collect()
    }
}

/// Corridor walk to a goal location marked by a static predicate.
pub mod corridor {
    use super::*;

    pub fn domain() -> Domain {
        let mut b = Db::new("corridor");
        let loc = b.ty("location", TYPE_OBJECT);
        let at = b.pred("at", &[loc]);
        let _goal_at = b.pred("goal-at", &[loc]);
        let adjacent = b.pred("adjacent", &[loc, loc]);
        b.schema(
            "move",
            &[loc, loc],
            &[(at, &[0]), (adjacent, &[0, 1])],
            &[(at, &[1])],
            &[(at, &[0])],
        );
        b.domain
    }

    pub fn instance(name: &str, n: usize, start: usize, goal: usize) -> Instance {
        assert!(n >= 2 && start < n && goal < n && start != goal);
        let objects: Vec<(String, TypeId)> = (0..n).map(|i| (format!("p{i}"), 1)).collect();
        let mut init = vec![atom(0, &[start as ObjId]), atom(1, &[goal as ObjId])];
        for i in 0..n - 1 {
            init.push(atom(2, &[i as ObjId, i as ObjId + 1]));
            init.push(atom(2, &[i as ObjId + 1, i as ObjId]));
        }
        Instance {
            name: name.to_string(),
            objects,
            init,
            goal: vec![atom(0, &[goal as ObjId])],
        }
    }

    fn sample(name: String, n: usize, rng: &mut ChaCha8Rng) -> Instance {
        let start = rng.gen_range(1..n - 1);
        let goal = loop {
            let g = rng.gen_range(0..n);
            if g != start {
                break g;
            }
        };
        instance(&name, n, start, goal)
    }

    pub fn train(seed: u64) -> Vec<Instance> {
        (0..10)
            .map(|i| {
                let mut rng = rng_for(seed, i as u64);
                sample(format!("corridor-{:02}", i + 1), 5 + i, &mut rng)
            })
            .collect()
    }

    pub fn val(seed: u64) -> Vec<Instance> {
        (0..50)
            .map(|j| {
                let mut rng = rng_for(seed, VAL_STREAM_BASE + j as u64);
                sample(format!("corridor-val-{:02}", j + 1), 12 + j, &mut rng)
            })
            .collect()
    }
}

/// Two rooms, two grippers, and balls to carry from room A to room B.
pub mod gripper {
    use super::*;

    pub fn domain() -> Domain {
        let mut b = Db::new("gripper");
        let ball = b.ty("ball", TYPE_OBJECT);
        let room = b.ty("room", TYPE_OBJECT);
        let grip = b.ty("gripper", TYPE_OBJECT);
        let at_robby = b.pred("at-robby", &[room]);
        let at = b.pred("at", &[ball, room]);
        let free = b.pred("free", &[grip]);
        let carry = b.pred("carry", &[ball, grip]);
        b.schema(
            "move",
            &[room, room],
            &[(at_robby, &[0])],
            &[(at_robby, &[1])],
            &[(at_robby, &[0])],
        );
        b.schema(
            "pick",
            &[ball, room, grip],
            &[(at, &[0, 1]), (at_robby, &[1]), (free, &[2])],
            &[(carry, &[0, 2])],
            &[(at, &[0, 1]), (free, &[2])],
        );
        b.schema(
            "drop",
            &[ball, room, grip],
            &[(carry, &[0, 2]), (at_robby, &[1])],
            &[(at, &[0, 1]), (free, &[2])],
            &[(carry, &[0, 2])],
        );
        b.domain
    }

    pub fn instance(name: &str, balls: usize) -> Instance {
        assert!(balls >= 1);
        let mut objects: Vec<(String, TypeId)> = vec![
            ("rooma".into(), 2),
            ("roomb".into(), 2),
            ("g1".into(), 3),
            ("g2".into(), 3),
        ];
        for i in 0..balls {
            objects.push((format!("b{}", i + 1), 1));
        }
        let rooma = 0;
        let ball_ids: Vec<ObjId> = (0..balls).map(|i| 4 + i as ObjId).collect();
        let mut init = vec![atom(0, &[rooma]), atom(2, &[2]), atom(2, &[3])];
        for &b in &ball_ids {
            init.push(atom(1, &[b, rooma]));
        }
        let goal = ball_ids.iter().map(|&b| atom(1, &[b, 1])).collect();
        Instance {
            name: name.to_string(),
            objects,
            init,
            goal,
        }
    }

    pub fn train(_seed: u64) -> Vec<Instance> {
        (0..10)
            .map(|i| instance(&format!("gripper-{:02}", i + 1), 2 + i))
            .collect()
    }

    pub fn val(_seed: u64) -> Vec<Instance> {
        (0..50)
            .map(|j| instance(&format!("gripper-val-{:02}", j + 1), 12 + j))
            .collect()
    }
}

/// Attack chain over a set of hosts; three schemas are decoys that no
/// plan for the goal ever needs.
pub mod intrusion {
    use super::*;

    pub fn domain() -> Domain {
        let mut b = Db::new("intrusion");
        let host = b.ty("host", TYPE_OBJECT);
        let reconned = b.pred("reconned", &[host]);
        let gathered = b.pred("gathered", &[host]);
        let broken = b.pred("broken-into", &[host]);
        let modified = b.pred("modified", &[host]);
        let cleaned = b.pred("cleaned", &[host]);
        let vandalized = b.pred("vandalized", &[host]);
        let root = b.pred("root-access", &[host]);
        let downloaded = b.pred("files-downloaded", &[host]);
        let stolen = b.pred("data-stolen", &[host]);
        b.schema("recon", &[host], &[], &[(reconned, &[0])], &[]);
        b.schema("gather-information", &[host], &[(reconned, &[0])], &[(gathered, &[0])], &[]);
        b.schema("break-into", &[host], &[(reconned, &[0])], &[(broken, &[0])], &[]);
        b.schema("modify-files", &[host], &[(root, &[0])], &[(modified, &[0])], &[]);
        b.schema("clean", &[host], &[(broken, &[0])], &[(cleaned, &[0])], &[]);
        b.schema("vandalize", &[host], &[(broken, &[0])], &[(vandalized, &[0])], &[]);
        b.schema("gain-root", &[host], &[(cleaned, &[0])], &[(root, &[0])], &[]);
        b.schema("download-files", &[host], &[(root, &[0])], &[(downloaded, &[0])], &[]);
        b.schema("steal-data", &[host], &[(downloaded, &[0])], &[(stolen, &[0])], &[]);
        b.domain
    }

    pub fn instance(name: &str, hosts: usize) -> Instance {
        assert!(hosts >= 1);
        let objects: Vec<(String, TypeId)> =
            (0..hosts).map(|i| (format!("h{}", i + 1), 1)).collect();
        let goal = (0..hosts).map(|i| atom(8, &[i as ObjId])).collect();
        Instance {
            name: name.to_string(),
            objects,
            init: Vec::new(),
            goal,
        }
    }

    pub fn train(_seed: u64) -> Vec<Instance> {
        (0..10)
            .map(|i| instance(&format!("intrusion-{:02}", i + 1), 1 + i))
            .collect()
    }

    pub fn val(_seed: u64) -> Vec<Instance> {
        (0..50)
            .map(|j| instance(&format!("intrusion-val-{:02}", j + 1), 11 + j))
            .collect()
    }
}

/// Four-operator blocksworld where the goal is every block on the table.
pub mod ontable {
    use super::*;

    pub fn domain() -> Domain {
        let mut b = Db::new("ontable");
        let block = b.ty("block", TYPE_OBJECT);
        let on = b.pred("on", &[block, block]);
        let on_table = b.pred("ontable", &[block]);
        let clear = b.pred("clear", &[block]);
        let holding = b.pred("holding", &[block]);
        let handempty = b.pred("handempty", &[]);
        b.schema(
            "pick-up",
            &[block],
            &[(clear, &[0]), (on_table, &[0]), (handempty, &[])],
            &[(holding, &[0])],
            &[(on_table, &[0]), (clear, &[0]), (handempty, &[])],
        );
        b.schema(
            "put-down",
            &[block],
            &[(holding, &[0])],
            &[(on_table, &[0]), (clear, &[0]), (handempty, &[])],
            &[(holding, &[0])],
        );
        b.schema(
            "stack",
            &[block, block],
            &[(holding, &[0]), (clear, &[1])],
            &[(on, &[0, 1]), (clear, &[0]), (handempty, &[])],
            &[(holding, &[0]), (clear, &[1])],
        );
        b.schema(
            "unstack",
            &[block, block],
            &[(on, &[0, 1]), (clear, &[0]), (handempty, &[])],
            &[(holding, &[0]), (clear, &[1])],
            &[(on, &[0, 1]), (clear, &[0]), (handempty, &[])],
        );
        b.domain
    }

    /// `towers` lists each tower bottom to top by block index (0-based).
    pub fn instance(name: &str, n: usize, towers: &[Vec<usize>]) -> Instance {
        let mut seen = vec![false; n];
        for t in towers {
            assert!(!t.is_empty());
            for &b in t {
                assert!(b < n && !seen[b], "tower layout must partition the blocks");
                seen[b] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
        let objects: Vec<(String, TypeId)> = (0..n).map(|i| (format!("b{}", i + 1), 1)).collect();
        let mut init = vec![atom(4, &[])];
        for t in towers {
            init.push(atom(1, &[t[0] as ObjId]));
            for w in t.windows(2) {
                init.push(atom(0, &[w[1] as ObjId, w[0] as ObjId]));
            }
            init.push(atom(2, &[*t.last().unwrap() as ObjId]));
        }
        let goal = (0..n).map(|i| atom(1, &[i as ObjId])).collect();
        Instance {
            name: name.to_string(),
            objects,
            init,
            goal,
        }
    }

    fn sample_towers(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut towers: Vec<Vec<usize>> = Vec::new();
        for b in order {
            let slot = rng.gen_range(0..=towers.len());
            if slot == towers.len() {
                towers.push(vec![b]);
            } else {
                towers[slot].push(b);
            }
        }
        towers
    }

    pub fn train(seed: u64) -> Vec<Instance> {
        (0..12)
            .map(|i| {
                let n = 10 + i % 6;
                let mut rng = rng_for(seed, i as u64);
                let towers = sample_towers(n, &mut rng);
                instance(&format!("ontable-{:02}", i + 1), n, &towers)
            })
            .collect()
    }

    pub fn val(seed: u64) -> Vec<Instance> {
        (0..50)
            .map(|j| {
                let n = 16 + j;
                let mut rng = rng_for(seed, VAL_STREAM_BASE + j as u64);
                let towers = sample_towers(n, &mut rng);
                instance(&format!("ontable-val-{:02}", j + 1), n, &towers)
            })
            .collect()
    }
}

/// One-way corridor; the man gathers spanners on the way to the nuts at
/// the far end, each spanner good for tightening one nut.
pub mod spanner {
    use super::*;

    pub fn domain() -> Domain {
        let mut b = Db::new("spanner");
        let loc = b.ty("location", TYPE_OBJECT);
        let locatable = b.ty("locatable", TYPE_OBJECT);
        let man = b.ty("man", locatable);
        let span = b.ty("spanner", locatable);
        let nut = b.ty("nut", locatable);
        let at = b.pred("at", &[locatable, loc]);
        let carrying = b.pred("carrying", &[man, span]);
        let useable = b.pred("useable", &[span]);
        let link = b.pred("link", &[loc, loc]);
        let tightened = b.pred("tightened", &[nut]);
        let loose = b.pred("loose", &[nut]);
        b.schema(
            "walk",
            &[loc, loc, man],
            &[(at, &[2, 0]), (link, &[0, 1])],
            &[(at, &[2, 1])],
            &[(at, &[2, 0])],
        );
        b.schema(
            "pickup_spanner",
            &[loc, span, man],
            &[(at, &[2, 0]), (at, &[1, 0])],
            &[(carrying, &[2, 1])],
            &[(at, &[1, 0])],
        );
        b.schema(
            "tighten_nut",
            &[loc, span, man, nut],
            &[
                (at, &[2, 0]),
                (at, &[3, 0]),
                (carrying, &[2, 1]),
                (useable, &[1]),
                (loose, &[3]),
            ],
            &[(tightened, &[3])],
            &[(loose, &[3]), (useable, &[1])],
        );
        b.domain
    }

    /// `n` locations in a line; the man starts leftmost, `spanner_locs`
    /// places each of the `2n` spanners, and the `2n` nuts sit rightmost.
    pub fn instance(name: &str, n: usize, spanner_locs: &[usize]) -> Instance {
        assert!(n >= 1);
        assert_eq!(spanner_locs.len(), 2 * n);
        assert!(spanner_locs.iter().all(|&l| l < n));
        let mut objects: Vec<(String, TypeId)> =
            (0..n).map(|i| (format!("loc{}", i + 1), 1)).collect();
        objects.push(("bob".into(), 3));
        let bob = n as ObjId;
        for i in 0..2 * n {
            objects.push((format!("spanner{}", i + 1), 4));
        }
        for i in 0..2 * n {
            objects.push((format!("nut{}", i + 1), 5));
        }
        let spanner_id = |i: usize| (n + 1 + i) as ObjId;
        let nut_id = |i: usize| (n + 1 + 2 * n + i) as ObjId;
        let mut init = vec![atom(0, &[bob, 0])];
        for (i, &l) in spanner_locs.iter().enumerate() {
            init.push(atom(0, &[spanner_id(i), l as ObjId]));
            init.push(atom(2, &[spanner_id(i)]));
        }
        for i in 0..2 * n {
            init.push(atom(0, &[nut_id(i), n as ObjId - 1]));
            init.push(atom(5, &[nut_id(i)]));
        }
        for i in 0..n - 1 {
            init.push(atom(3, &[i as ObjId, i as ObjId + 1]));
        }
        let goal = (0..2 * n).map(|i| atom(4, &[nut_id(i)])).collect();
        Instance {
            name: name.to_string(),
            objects,
            init,
            goal,
        }
    }

    fn sample(name: String, n: usize, rng: &mut ChaCha8Rng) -> Instance {
        let locs: Vec<usize> = (0..2 * n).map(|_| rng.gen_range(0..n)).collect();
        instance(&name, n, &locs)
    }

    pub fn train(seed: u64) -> Vec<Instance> {
        (0..10)
            .map(|i| {
                let mut rng = rng_for(seed, i as u64);
                sample(format!("spanner-{:02}", i + 1), 1 + i, &mut rng)
            })
            .collect()
    }

    pub fn val(seed: u64) -> Vec<Instance> {
        (0..50)
            .map(|j| {
                let mut rng = rng_for(seed, VAL_STREAM_BASE + j as u64);
                sample(format!("spanner-val-{:02}", j + 1), 12 + j, &mut rng)
            })
            .collect()
    }
}

/// Square grid whose cells are (row, col) pairs; visiting needs no
/// movement, so the domain is about covering the whole product space.
pub mod visitall {
    use super::*;

    pub fn domain() -> Domain {
        let mut b = Db::new("visitall");
        let row = b.ty("row", TYPE_OBJECT);
        let col = b.ty("col", TYPE_OBJECT);
        let visited = b.pred("visited", &[row, col]);
        b.schema("visit", &[row, col], &[], &[(visited, &[0, 1])], &[]);
        b.domain
    }

    pub fn instance(name: &str, n: usize) -> Instance {
        assert!(n >= 1);
        let mut objects: Vec<(String, TypeId)> = (0..n).map(|i| (format!("r{i}"), 1)).collect();
        for j in 0..n {
            objects.push((format!("c{j}"), 2));
        }
        let col = |j: usize| (n + j) as ObjId;
        let init = vec![atom(0, &[0, col(0)])];
        let mut goal = Vec::new();
        for i in 0..n {
            for j in 0..n {
                goal.push(atom(0, &[i as ObjId, col(j)]));
            }
        }
        Instance {
            name: name.to_string(),
            objects,
            init,
            goal,
        }
    }

    pub fn train(_seed: u64) -> Vec<Instance> {
        (0..10)
            .map(|i| instance(&format!("visitall-{:02}", i + 1), 2 + i))
            .collect()
    }

    pub fn val(_seed: u64) -> Vec<Instance> {
        (0..50)
            .map(|j| instance(&format!("visitall-val-{:02}", j + 1), 12 + j))
            .collect()
    }
}

/// Bake one cake per egg/flour pair with a single pan and oven; the pan
/// must be cleaned with fresh soap between cakes.
pub mod baking {
    use super::*;

    pub fn domain() -> Domain {
        let mut b = Db::new("baking");
        let egg = b.ty("egg", TYPE_OBJECT);
        let flour = b.ty("flour", TYPE_OBJECT);
        let pan = b.ty("pan", TYPE_OBJECT);
        let oven = b.ty("oven", TYPE_OBJECT);
        let cake = b.ty("cake", TYPE_OBJECT);
        let soap = b.ty("soap", TYPE_OBJECT);
        let unused_egg = b.pred("unused-egg", &[egg]);
        let unused_flour = b.pred("unused-flour", &[flour]);
        let unused_soap = b.pred("unused-soap", &[soap]);
        let egg_in_pan = b.pred("egg-in-pan", &[egg, pan]);
        let flour_in_pan = b.pred("flour-in-pan", &[flour, pan]);
        let mixture = b.pred("mixture-in-pan", &[pan]);
        let pan_clean = b.pred("pan-clean", &[pan]);
        let pan_dirty = b.pred("pan-dirty", &[pan]);
        let pan_out = b.pred("pan-out", &[pan]);
        let in_oven = b.pred("in-oven", &[pan, oven]);
        let oven_empty = b.pred("oven-empty", &[oven]);
        let unbaked = b.pred("unbaked-cake", &[cake]);
        let baked = b.pred("baked", &[cake]);
        b.schema(
            "putegginpan",
            &[egg, pan],
            &[(unused_egg, &[0]), (pan_clean, &[1])],
            &[(egg_in_pan, &[0, 1])],
            &[(unused_egg, &[0]), (pan_clean, &[1])],
        );
        b.schema(
            "putflourinpan",
            &[flour, pan],
            &[(unused_flour, &[0])],
            &[(flour_in_pan, &[0, 1])],
            &[(unused_flour, &[0])],
        );
        b.schema(
            "mix",
            &[egg, flour, pan],
            &[(egg_in_pan, &[0, 2]), (flour_in_pan, &[1, 2])],
            &[(mixture, &[2])],
            &[(egg_in_pan, &[0, 2]), (flour_in_pan, &[1, 2])],
        );
        b.schema(
            "putpaninoven",
            &[pan, oven],
            &[(mixture, &[0]), (pan_out, &[0]), (oven_empty, &[1])],
            &[(in_oven, &[0, 1])],
            &[(pan_out, &[0]), (oven_empty, &[1])],
        );
        b.schema(
            "bakecake",
            &[oven, pan, cake],
            &[(in_oven, &[1, 0]), (mixture, &[1]), (unbaked, &[2])],
            &[(baked, &[2]), (pan_dirty, &[1])],
            &[(mixture, &[1]), (unbaked, &[2])],
        );
        b.schema(
            "removepanfromoven",
            &[pan, oven],
            &[(in_oven, &[0, 1])],
            &[(pan_out, &[0]), (oven_empty, &[1])],
            &[(in_oven, &[0, 1])],
        );
        b.schema(
            "cleanpan",
            &[pan, soap],
            &[(pan_out, &[0]), (pan_dirty, &[0]), (unused_soap, &[1])],
            &[(pan_clean, &[0])],
            &[(pan_dirty, &[0]), (unused_soap, &[1])],
        );
        b.domain
    }

    pub fn instance(name: &str, cakes: usize) -> Instance {
        assert!(cakes >= 1);
        let mut objects: Vec<(String, TypeId)> = Vec::new();
        for i in 0..cakes {
            objects.push((format!("e{}", i + 1), 1));
        }
        for i in 0..cakes {
            objects.push((format!("f{}", i + 1), 2));
        }
        objects.push(("p1".into(), 3));
        objects.push(("o1".into(), 4));
        for i in 0..cakes {
            objects.push((format!("c{}", i + 1), 5));
        }
        for i in 0..cakes {
            objects.push((format!("s{}", i + 1), 6));
        }
        let pan = (2 * cakes) as ObjId;
        let oven = pan + 1;
        let cake_id = |i: usize| oven + 1 + i as ObjId;
        let soap_id = |i: usize| oven + 1 + (cakes + i) as ObjId;
        let mut init = vec![atom(6, &[pan]), atom(8, &[pan]), atom(10, &[oven])];
        for i in 0..cakes {
            init.push(atom(0, &[i as ObjId]));
            init.push(atom(1, &[(cakes + i) as ObjId]));
            init.push(atom(11, &[cake_id(i)]));
            init.push(atom(2, &[soap_id(i)]));
        }
        let goal = (0..cakes).map(|i| atom(12, &[cake_id(i)])).collect();
        Instance {
            name: name.to_string(),
            objects,
            init,
            goal,
        }
    }

    pub fn train(_seed: u64) -> Vec<Instance> {
        (0..10)
            .map(|i| instance(&format!("baking-{:02}", i + 1), 1 + i))
            .collect()
    }

    pub fn val(_seed: u64) -> Vec<Instance> {
        (0..50)
            .map(|j| instance(&format!("baking-val-{:02}", j + 1), 11 + j))
            .collect()
    }
}
