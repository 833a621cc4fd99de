//! PDDL reader/writer for the STRIPS fragment (`:strips`, `:typing`).
//!
//! Anything outside the fragment (negative preconditions, conditional effects,
//! unsupported requirement flags) is rejected with a [`Diagnostic`] pointing at
//! the offending s-expression. Symbols are case-insensitive and normalized to
//! lower case. Domain constants are merged into every instance's object list,
//! ahead of the problem's own objects.

use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::strips::{
    ActId, ActionSchema, Domain, Grounded, Instance, ObjId, PredicateDecl, SchemaAtom, TypeId,
    Types, TYPE_OBJECT,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// Parse problem report: position plus message, severity always carried.
#[derive(Debug, Clone)]
pub struct Diagnostic {
    pub file: String,
    pub line: usize,
    pub col: usize,
    pub message: String,
    pub severity: Severity,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: {}", self.file, self.line, self.col, self.message)
    }
}

impl std::error::Error for Diagnostic {}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    col: usize,
}

#[derive(Debug)]
enum Sexp {
    Sym(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    fn pos(&self) -> Pos {
        match self {
            Sexp::Sym(_, p) | Sexp::List(_, p) => *p,
        }
    }

    fn as_sym(&self) -> Option<&str> {
        match self {
            Sexp::Sym(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            Sexp::Sym(..) => None,
        }
    }
}

struct Ctx<'a> {
    file: &'a str,
}

impl Ctx<'_> {
    fn err(&self, pos: Pos, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            file: self.file.to_string(),
            line: pos.line,
            col: pos.col,
            message: message.into(),
            severity: Severity::Error,
        }
    }
}

fn tokenize_parse(ctx: &Ctx, text: &str) -> Result<Sexp, Diagnostic> {
    let mut stack: Vec<(Vec<Sexp>, Pos)> = Vec::new();
    let mut top: Option<Sexp> = None;
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    let push = |e: Sexp, stack: &mut Vec<(Vec<Sexp>, Pos)>, top: &mut Option<Sexp>| {
        if let Some((items, _)) = stack.last_mut() {
            items.push(e);
            Ok(())
        } else if top.is_none() {
            *top = Some(e);
            Ok(())
        } else {
            Err(e.pos())
        }
    };
    while let Some(c) = chars.next() {
        let pos = Pos { line, col };
        match c {
            '\n' => {
                line += 1;
                col = 1;
                continue;
            }
            ';' => {
                for c2 in chars.by_ref() {
                    if c2 == '\n' {
                        line += 1;
                        col = 1;
                        break;
                    }
                }
                continue;
            }
            c if c.is_whitespace() => {}
            '(' => stack.push((Vec::new(), pos)),
            ')' => {
                let (items, open) = stack
                    .pop()
                    .ok_or_else(|| ctx.err(pos, "unbalanced ')'"))?;
                push(Sexp::List(items, open), &mut stack, &mut top)
                    .map_err(|p| ctx.err(p, "multiple top-level expressions"))?;
            }
            _ => {
                let mut sym = String::new();
                sym.push(c.to_ascii_lowercase());
                let mut last_len = 1;
                while let Some(&c2) = chars.peek() {
                    if c2.is_whitespace() || c2 == '(' || c2 == ')' || c2 == ';' {
                        break;
                    }
                    sym.push(c2.to_ascii_lowercase());
                    chars.next();
                    last_len += 1;
                }
                push(Sexp::Sym(sym, pos), &mut stack, &mut top)
                    .map_err(|p| ctx.err(p, "multiple top-level expressions"))?;
                col += last_len - 1;
            }
        }
        col += 1;
    }
    if let Some((_, open)) = stack.last() {
        return Err(ctx.err(*open, "unclosed '('"));
    }
    top.ok_or_else(|| ctx.err(Pos { line: 1, col: 1 }, "empty input"))
}

/// Typed-list parser: `a b - t c - t2 d` (untyped tail defaults to `object`).
/// `register` controls whether unknown type names are added to the hierarchy.
fn parse_typed_list<'a>(
    ctx: &Ctx,
    items: &'a [Sexp],
    types: &mut Types,
    register: bool,
) -> Result<Vec<(&'a str, TypeId, Pos)>, Diagnostic> {
    let mut out: Vec<(&str, TypeId, Pos)> = Vec::new();
    let mut pending: Vec<(&str, Pos)> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let sym = items[i]
            .as_sym()
            .ok_or_else(|| ctx.err(items[i].pos(), "expected a name, found a list"))?;
        if sym == "-" {
            i += 1;
            let ty_sexp = items
                .get(i)
                .ok_or_else(|| ctx.err(items[i - 1].pos(), "dangling '-' without a type"))?;
            let ty_name = ty_sexp
                .as_sym()
                .ok_or_else(|| ctx.err(ty_sexp.pos(), "type name must be a symbol"))?;
            let ty = match types.id(ty_name) {
                Some(t) => t,
                None if register => types.add(ty_name, TYPE_OBJECT),
                None => return Err(ctx.err(ty_sexp.pos(), format!("unknown type {ty_name}"))),
            };
            for (name, pos) in pending.drain(..) {
                out.push((name, ty, pos));
            }
        } else {
            pending.push((sym, items[i].pos()));
        }
        i += 1;
    }
    for (name, pos) in pending.drain(..) {
        out.push((name, TYPE_OBJECT, pos));
    }
    Ok(out)
}

fn expect_head<'a>(ctx: &Ctx, sexp: &'a Sexp, head: &str) -> Result<&'a [Sexp], Diagnostic> {
    let items = sexp
        .as_list()
        .ok_or_else(|| ctx.err(sexp.pos(), format!("expected ({head} ...)")))?;
    match items.first().and_then(|s| s.as_sym()) {
        Some(h) if h == head => Ok(&items[1..]),
        _ => Err(ctx.err(sexp.pos(), format!("expected ({head} ...)"))),
    }
}

struct AtomRef<'a> {
    pred_name: &'a str,
    args: Vec<&'a str>,
    pos: Pos,
}

fn parse_atom_ref<'a>(ctx: &Ctx, sexp: &'a Sexp) -> Result<AtomRef<'a>, Diagnostic> {
    let items = sexp
        .as_list()
        .ok_or_else(|| ctx.err(sexp.pos(), "atom must be a list (pred args...)"))?;
    let pred_name = items
        .first()
        .and_then(|s| s.as_sym())
        .ok_or_else(|| ctx.err(sexp.pos(), "atom must start with a predicate name"))?;
    let mut args = Vec::with_capacity(items.len() - 1);
    for a in &items[1..] {
        args.push(a.as_sym().ok_or_else(|| ctx.err(a.pos(), "atom argument must be a symbol"))?);
    }
    Ok(AtomRef { pred_name, args, pos: sexp.pos() })
}

/// Flattens `(and x y ...)`, a bare atom, or `()` into conjunct list.
fn conjuncts<'a>(sexp: &'a Sexp) -> Vec<&'a Sexp> {
    if let Some(items) = sexp.as_list() {
        match items.first().and_then(|s| s.as_sym()) {
            Some("and") => return items[1..].iter().collect(),
            None if items.is_empty() => return Vec::new(),
            _ => {}
        }
    }
    vec![sexp]
}

pub fn parse_domain(text: &str, file: &str) -> Result<Domain, Diagnostic> {
    let ctx = Ctx { file };
    let root = tokenize_parse(&ctx, text)?;
    let body = expect_head(&ctx, &root, "define")?;
    let name_items = body
        .first()
        .ok_or_else(|| ctx.err(root.pos(), "missing (domain NAME)"))
        .and_then(|s| expect_head(&ctx, s, "domain"))?;
    let name = name_items
        .first()
        .and_then(|s| s.as_sym())
        .ok_or_else(|| ctx.err(body[0].pos(), "missing domain name"))?
        .to_string();

    let mut types = Types::new();
    let mut predicates: Vec<PredicateDecl> = Vec::new();
    let mut schemas: Vec<ActionSchema> = Vec::new();
    let mut constants: Vec<(String, TypeId)> = Vec::new();

    for section in &body[1..] {
        let items = section
            .as_list()
            .ok_or_else(|| ctx.err(section.pos(), "expected a (:section ...) list"))?;
        let head = items
            .first()
            .and_then(|s| s.as_sym())
            .ok_or_else(|| ctx.err(section.pos(), "expected a section keyword"))?;
        match head {
            ":requirements" => {
                for req in &items[1..] {
                    match req.as_sym() {
                        Some(":strips") | Some(":typing") => {}
                        Some(other) => {
                            return Err(ctx.err(
                                req.pos(),
                                format!("unsupported requirement {other} (only :strips and :typing)"),
                            ))
                        }
                        None => return Err(ctx.err(req.pos(), "requirement must be a symbol")),
                    }
                }
            }
            ":types" => {
                // Hierarchy form: children listed before their parent tag.
                let mut pending: Vec<(&str, Pos)> = Vec::new();
                let mut i = 1;
                while i < items.len() {
                    let sym = items[i]
                        .as_sym()
                        .ok_or_else(|| ctx.err(items[i].pos(), "type name must be a symbol"))?;
                    if sym == "-" {
                        i += 1;
                        let parent_sexp = items
                            .get(i)
                            .ok_or_else(|| ctx.err(items[i - 1].pos(), "dangling '-'"))?;
                        let pname = parent_sexp
                            .as_sym()
                            .ok_or_else(|| ctx.err(parent_sexp.pos(), "parent type must be a symbol"))?;
                        let parent =
                            types.id(pname).unwrap_or_else(|| types.add(pname, TYPE_OBJECT));
                        for (child, _) in pending.drain(..) {
                            types.add(child, parent);
                        }
                    } else {
                        pending.push((sym, items[i].pos()));
                    }
                    i += 1;
                }
                for (child, _) in pending.drain(..) {
                    types.add(child, TYPE_OBJECT);
                }
            }
            ":constants" => {
                for (cname, ty, pos) in parse_typed_list(&ctx, &items[1..], &mut types, false)? {
                    if constants.iter().any(|(n, _)| n == cname) {
                        return Err(ctx.err(pos, format!("duplicate constant {cname}")));
                    }
                    constants.push((cname.to_string(), ty));
                }
            }
            ":predicates" => {
                for decl in &items[1..] {
                    let d = decl
                        .as_list()
                        .ok_or_else(|| ctx.err(decl.pos(), "predicate declaration must be a list"))?;
                    let pname = d
                        .first()
                        .and_then(|s| s.as_sym())
                        .ok_or_else(|| ctx.err(decl.pos(), "missing predicate name"))?;
                    if predicates.iter().any(|p| p.name == pname) {
                        return Err(ctx.err(decl.pos(), format!("duplicate predicate {pname}")));
                    }
                    let params = parse_typed_list(&ctx, &d[1..], &mut types, false)?
                        .into_iter()
                        .map(|(v, t, p)| {
                            if v.starts_with('?') {
                                Ok(t)
                            } else {
                                Err(ctx.err(p, format!("predicate parameter {v} must start with ?")))
                            }
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    predicates.push(PredicateDecl { name: pname.to_string(), params });
                }
            }
            ":action" => {
                let schema = parse_action(&ctx, &items[1..], section.pos(), &mut types, &predicates)?;
                if schemas.iter().any(|s| s.name == schema.name) {
                    return Err(ctx.err(section.pos(), format!("duplicate action {}", schema.name)));
                }
                schemas.push(schema);
            }
            other => return Err(ctx.err(section.pos(), format!("unsupported section {other}"))),
        }
    }

    Ok(Domain { name, types, predicates, schemas, constants })
}

fn parse_action(
    ctx: &Ctx,
    items: &[Sexp],
    pos: Pos,
    types: &mut Types,
    predicates: &[PredicateDecl],
) -> Result<ActionSchema, Diagnostic> {
    let name = items
        .first()
        .and_then(|s| s.as_sym())
        .ok_or_else(|| ctx.err(pos, "missing action name"))?
        .to_string();
    let mut params: Vec<(String, TypeId)> = Vec::new();
    let mut pre: Vec<SchemaAtom> = Vec::new();
    let mut add: Vec<SchemaAtom> = Vec::new();
    let mut del: Vec<SchemaAtom> = Vec::new();
    let mut saw_params = false;

    let mut i = 1;
    while i < items.len() {
        let key = items[i]
            .as_sym()
            .ok_or_else(|| ctx.err(items[i].pos(), "expected :parameters/:precondition/:effect"))?;
        let val = items
            .get(i + 1)
            .ok_or_else(|| ctx.err(items[i].pos(), format!("{key} missing its argument")))?;
        match key {
            ":parameters" => {
                saw_params = true;
                let list = val
                    .as_list()
                    .ok_or_else(|| ctx.err(val.pos(), ":parameters must be a list"))?;
                for (v, t, p) in parse_typed_list(ctx, list, types, false)? {
                    if !v.starts_with('?') {
                        return Err(ctx.err(p, format!("parameter {v} must start with ?")));
                    }
                    if params.iter().any(|(n, _)| n == v) {
                        return Err(ctx.err(p, format!("duplicate parameter {v}")));
                    }
                    params.push((v.to_string(), t));
                }
            }
            ":precondition" => {
                for c in conjuncts(val) {
                    if is_not(c) {
                        return Err(ctx.err(
                            c.pos(),
                            "negative preconditions are outside the STRIPS fragment",
                        ));
                    }
                    pre.push(schema_atom(ctx, c, &params, types, predicates)?);
                }
            }
            ":effect" => {
                for c in conjuncts(val) {
                    if is_not(c) {
                        let inner = &c.as_list().unwrap()[1..];
                        if inner.len() != 1 {
                            return Err(ctx.err(c.pos(), "(not ...) takes exactly one atom"));
                        }
                        del.push(schema_atom(ctx, &inner[0], &params, types, predicates)?);
                    } else {
                        if let Some(list) = c.as_list() {
                            if let Some(h) = list.first().and_then(|s| s.as_sym()) {
                                if h == "when" || h == "forall" {
                                    return Err(ctx.err(
                                        c.pos(),
                                        format!("{h} effects are outside the STRIPS fragment"),
                                    ));
                                }
                            }
                        }
                        add.push(schema_atom(ctx, c, &params, types, predicates)?);
                    }
                }
            }
            other => return Err(ctx.err(items[i].pos(), format!("unsupported action key {other}"))),
        }
        i += 2;
    }
    if !saw_params {
        return Err(ctx.err(pos, "action is missing :parameters"));
    }
    for d in &del {
        if add.contains(d) {
            return Err(ctx.err(pos, format!("action {name} adds and deletes the same atom")));
        }
    }
    Ok(ActionSchema { name, params: params.into_iter().map(|(_, t)| t).collect(), pre, add, del })
}

fn is_not(sexp: &Sexp) -> bool {
    sexp.as_list()
        .and_then(|l| l.first())
        .and_then(|s| s.as_sym())
        .is_some_and(|h| h == "not")
}

fn schema_atom(
    ctx: &Ctx,
    sexp: &Sexp,
    params: &[(String, TypeId)],
    types: &Types,
    predicates: &[PredicateDecl],
) -> Result<SchemaAtom, Diagnostic> {
    let atom = parse_atom_ref(ctx, sexp)?;
    let pred = predicates
        .iter()
        .position(|p| p.name == atom.pred_name)
        .ok_or_else(|| ctx.err(atom.pos, format!("unknown predicate {}", atom.pred_name)))?;
    let decl = &predicates[pred];
    if decl.params.len() != atom.args.len() {
        return Err(ctx.err(
            atom.pos,
            format!("{} expects {} arguments, got {}", decl.name, decl.params.len(), atom.args.len()),
        ));
    }
    let mut args = SmallVec::new();
    for (slot, v) in atom.args.iter().enumerate() {
        if !v.starts_with('?') {
            return Err(ctx.err(
                atom.pos,
                format!("constant {v} in an action body is not supported; use a parameter"),
            ));
        }
        let pi = params
            .iter()
            .position(|(n, _)| n == v)
            .ok_or_else(|| ctx.err(atom.pos, format!("unknown parameter {v}")))?;
        if !types.is_subtype(params[pi].1, decl.params[slot]) {
            return Err(ctx.err(
                atom.pos,
                format!(
                    "parameter {v} of type {} is not a {}",
                    types.name(params[pi].1),
                    types.name(decl.params[slot])
                ),
            ));
        }
        args.push(pi as u8);
    }
    Ok(SchemaAtom { pred: pred as crate::strips::PredId, args })
}

pub fn parse_problem(text: &str, file: &str, domain: &Domain) -> Result<Instance, Diagnostic> {
    let ctx = Ctx { file };
    let root = tokenize_parse(&ctx, text)?;
    let body = expect_head(&ctx, &root, "define")?;
    let name = body
        .first()
        .ok_or_else(|| ctx.err(root.pos(), "missing (problem NAME)"))
        .and_then(|s| expect_head(&ctx, s, "problem"))?
        .first()
        .and_then(|s| s.as_sym())
        .ok_or_else(|| ctx.err(body[0].pos(), "missing problem name"))?
        .to_string();

    let mut objects: Vec<(String, TypeId)> = domain.constants.clone();
    let mut init: Vec<(crate::strips::PredId, SmallVec<[ObjId; 4]>)> = Vec::new();
    let mut goal: Vec<(crate::strips::PredId, SmallVec<[ObjId; 4]>)> = Vec::new();
    let mut types = domain.types.clone();

    for section in &body[1..] {
        let items = section
            .as_list()
            .ok_or_else(|| ctx.err(section.pos(), "expected a (:section ...) list"))?;
        let head = items
            .first()
            .and_then(|s| s.as_sym())
            .ok_or_else(|| ctx.err(section.pos(), "expected a section keyword"))?;
        match head {
            ":domain" => {
                let dname = items
                    .get(1)
                    .and_then(|s| s.as_sym())
                    .ok_or_else(|| ctx.err(section.pos(), "missing domain name"))?;
                if dname != domain.name {
                    return Err(ctx.err(
                        items[1].pos(),
                        format!("problem references domain {dname}, expected {}", domain.name),
                    ));
                }
            }
            ":objects" => {
                for (oname, ty, pos) in parse_typed_list(&ctx, &items[1..], &mut types, false)? {
                    if objects.iter().any(|(n, _)| n == oname) {
                        return Err(ctx.err(pos, format!("duplicate object {oname}")));
                    }
                    objects.push((oname.to_string(), ty));
                }
            }
            ":init" => {
                for atom_sexp in &items[1..] {
                    init.push(ground_atom(&ctx, atom_sexp, domain, &objects)?);
                }
            }
            ":goal" => {
                let val = items
                    .get(1)
                    .ok_or_else(|| ctx.err(section.pos(), "missing goal body"))?;
                for c in conjuncts(val) {
                    if is_not(c) {
                        return Err(ctx.err(c.pos(), "goals must be positive literals"));
                    }
                    goal.push(ground_atom(&ctx, c, domain, &objects)?);
                }
            }
            other => return Err(ctx.err(section.pos(), format!("unsupported section {other}"))),
        }
    }

    Ok(Instance { name, objects, init, goal })
}

fn ground_atom(
    ctx: &Ctx,
    sexp: &Sexp,
    domain: &Domain,
    objects: &[(String, TypeId)],
) -> Result<(crate::strips::PredId, SmallVec<[ObjId; 4]>), Diagnostic> {
    let atom = parse_atom_ref(ctx, sexp)?;
    let pred = domain
        .pred_id(atom.pred_name)
        .ok_or_else(|| ctx.err(atom.pos, format!("unknown predicate {}", atom.pred_name)))?;
    let decl = &domain.predicates[pred as usize];
    if decl.params.len() != atom.args.len() {
        return Err(ctx.err(
            atom.pos,
            format!("{} expects {} arguments, got {}", decl.name, decl.params.len(), atom.args.len()),
        ));
    }
    let mut ids = SmallVec::new();
    for (slot, oname) in atom.args.iter().enumerate() {
        let oid = objects
            .iter()
            .position(|(n, _)| n == oname)
            .ok_or_else(|| ctx.err(atom.pos, format!("unknown object {oname}")))?;
        let oty = objects[oid].1;
        if !domain.types.is_subtype(oty, decl.params[slot]) {
            return Err(ctx.err(
                atom.pos,
                format!(
                    "object {oname} of type {} is not a {}",
                    domain.types.name(oty),
                    domain.types.name(decl.params[slot])
                ),
            ));
        }
        ids.push(oid as ObjId);
    }
    Ok((pred, ids))
}

fn type_suffix(types: &Types, t: TypeId) -> String {
    if t == TYPE_OBJECT {
        String::new()
    } else {
        format!(" - {}", types.name(t))
    }
}

pub fn write_domain(d: &Domain) -> String {
    let mut out = String::new();
    out.push_str(&format!("(define (domain {})\n", d.name));
    out.push_str("  (:requirements :strips :typing)\n");
    // Parents always carry a smaller id than their children, so emitting
    // in id order declares every parent before it is referenced.
    if d.types.len() > 1 {
        out.push_str("  (:types");
        for t in 1..d.types.len() as TypeId {
            let parent = d.types.parent(t).unwrap_or(crate::strips::TYPE_OBJECT);
            out.push_str(&format!(" {} - {}", d.types.name(t), d.types.name(parent)));
        }
        out.push_str(")\n");
    }
    if !d.constants.is_empty() {
        out.push_str("  (:constants");
        for (name, ty) in &d.constants {
            out.push_str(&format!(" {name}{}", type_suffix(&d.types, *ty)));
        }
        out.push_str(")\n");
    }
    out.push_str("  (:predicates");
    for p in &d.predicates {
        out.push_str(&format!("\n    ({}", p.name));
        for (i, t) in p.params.iter().enumerate() {
            out.push_str(&format!(" ?x{i}{}", type_suffix(&d.types, *t)));
        }
        out.push(')');
    }
    out.push_str(")\n");
    for s in &d.schemas {
        out.push_str(&format!("  (:action {}\n    :parameters (", s.name));
        for (i, t) in s.params.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&format!("?x{i}{}", type_suffix(&d.types, *t)));
        }
        out.push_str(")\n");
        let atom_text = |a: &SchemaAtom| {
            let mut t = format!("({}", d.predicates[a.pred as usize].name);
            for pi in &a.args {
                t.push_str(&format!(" ?x{pi}"));
            }
            t.push(')');
            t
        };
        out.push_str("    :precondition (and");
        for a in &s.pre {
            out.push(' ');
            out.push_str(&atom_text(a));
        }
        out.push_str(")\n    :effect (and");
        for a in &s.add {
            out.push(' ');
            out.push_str(&atom_text(a));
        }
        for a in &s.del {
            out.push_str(&format!(" (not {})", atom_text(a)));
        }
        out.push_str("))\n");
    }
    out.push_str(")\n");
    out
}

pub fn write_problem(d: &Domain, inst: &Instance) -> String {
    let mut out = String::new();
    out.push_str(&format!("(define (problem {})\n  (:domain {})\n", inst.name, d.name));
    out.push_str("  (:objects");
    // Constants are implied by the domain file; list only the problem's own.
    for (name, ty) in inst.objects.iter().skip(d.constants.len()) {
        out.push_str(&format!(" {name}{}", type_suffix(&d.types, *ty)));
    }
    out.push_str(")\n  (:init");
    let atom_text = |pred: crate::strips::PredId, args: &[ObjId]| {
        let mut t = format!("({}", d.predicates[pred as usize].name);
        for o in args {
            t.push_str(&format!(" {}", inst.objects[*o as usize].0));
        }
        t.push(')');
        t
    };
    for (pred, args) in &inst.init {
        out.push_str("\n    ");
        out.push_str(&atom_text(*pred, args));
    }
    out.push_str(")\n  (:goal (and");
    for (pred, args) in &inst.goal {
        out.push(' ');
        out.push_str(&atom_text(*pred, args));
    }
    out.push_str("))\n)\n");
    out
}

/// One "(name obj...)" line per action.
pub fn format_plan(g: &Grounded, plan: &[ActId]) -> String {
    let mut out = String::new();
    for &act in plan {
        let (schema, args) = g.action_args_of(act);
        out.push('(');
        out.push_str(&g.domain.schemas[schema as usize].name);
        for o in &args {
            out.push(' ');
            out.push_str(&g.instance.objects[*o as usize].0);
        }
        out.push_str(")\n");
    }
    out
}

pub fn parse_plan(text: &str, g: &Grounded, file: &str) -> Result<Vec<ActId>, Diagnostic> {
    let ctx = Ctx { file };
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        let pos = Pos { line: lineno + 1, col: 1 };
        let inner = line
            .strip_prefix('(')
            .and_then(|l| l.strip_suffix(')'))
            .ok_or_else(|| ctx.err(pos, "plan line must be (name obj...)"))?;
        let mut parts = inner.split_whitespace();
        let name = parts.next().ok_or_else(|| ctx.err(pos, "empty plan line"))?.to_lowercase();
        let schema = g
            .domain
            .schema_id(&name)
            .ok_or_else(|| ctx.err(pos, format!("unknown action {name}")))?;
        let mut args: SmallVec<[ObjId; 4]> = SmallVec::new();
        for obj in parts {
            let obj = obj.to_lowercase();
            let oid = g
                .instance
                .obj_id(&obj)
                .ok_or_else(|| ctx.err(pos, format!("unknown object {obj}")))?;
            args.push(oid);
        }
        let act = g
            .action_id(schema, &args)
            .ok_or_else(|| ctx.err(pos, format!("ill-typed action instance {line}")))?;
        out.push(act);
    }
    Ok(out)
}

/// Convenience: parse, merge constants, and ground in one step.
pub fn load_grounded(
    domain_text: &str,
    domain_file: &str,
    problem_text: &str,
    problem_file: &str,
) -> Result<Grounded, Diagnostic> {
    let domain = Arc::new(parse_domain(domain_text, domain_file)?);
    let instance = Arc::new(parse_problem(problem_text, problem_file, &domain)?);
    Grounded::new(domain.clone(), instance).map_err(|e| Diagnostic {
        file: problem_file.to_string(),
        line: 0,
        col: 0,
        message: e.to_string(),
        severity: Severity::Error,
    })
}
