//! Pointer programs: fixed-length instruction listings over typed pointers.
//!
//! Text grammar (one listing per file):
//!
//! ```text
//! pointers: z1:location, z2:location
//! 0. inc(z1)
//! 1. move(z2,z1)
//! 4. goto(1,!yz)
//! 8. test(goal-at(z1))
//! 11. end
//! ```
//!
//! Line numbers fix the program length (the highest number + 1); omitted lines
//! are undefined, and `k. undefined` spells that out. The last line must be
//! `end`, which may not appear anywhere else. `goto(i,yz)` jumps when the flag
//! is true, `goto(i,!yz)` when it is false; a goto may not target its own line
//! or the line after it. The keywords `inc dec clear set goto test end
//! undefined` shadow action schemas of the same name.

use std::fmt::Write as _;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::strips::{Domain, PredId, SchemaId, TypeId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointerDecl {
    pub name: String,
    pub ty: TypeId,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Instr {
    /// Planning action over pointer arguments (indices into the pointer list).
    Act { schema: SchemaId, args: SmallVec<[u8; 4]> },
    Inc(u8),
    Dec(u8),
    Clear(u8),
    /// z1 := z2.
    Set(u8, u8),
    Test { pred: PredId, args: SmallVec<[u8; 4]> },
    Goto { target: u8, on_true: bool },
    End,
}

#[derive(Debug, Clone)]
pub struct Program {
    pub lines: Vec<Option<Instr>>,
    pub pointers: Arc<[PointerDecl]>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.lines == other.lines
    }
}
impl Eq for Program {}

impl Program {
    pub const MAX_LINES: usize = 256;

    /// All lines undefined except the fixed trailing `End`.
    pub fn empty(n: usize, pointers: Arc<[PointerDecl]>) -> Self {
        assert!(n >= 1 && n <= Self::MAX_LINES, "program length out of range");
        assert!(pointers.len() <= 64, "too many pointers");
        let mut lines = vec![None; n];
        lines[n - 1] = Some(Instr::End);
        Program { lines, pointers }
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn first_undefined(&self) -> Option<usize> {
        self.lines.iter().position(|l| l.is_none())
    }

    pub fn defined_count(&self) -> usize {
        self.lines.iter().filter(|l| l.is_some()).count()
    }

    pub fn goto_count(&self) -> usize {
        self.lines
            .iter()
            .filter(|l| matches!(l, Some(Instr::Goto { .. })))
            .count()
    }

    pub fn pointer_index(&self, name: &str) -> Option<usize> {
        self.pointers.iter().position(|p| p.name == name)
    }

    /// Compact canonical byte encoding of the line vector (duplicate checks).
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.lines.len() * 4);
        for line in &self.lines {
            match line {
                None => out.push(0xff),
                Some(Instr::End) => out.push(0xfe),
                Some(Instr::Inc(z)) => out.extend_from_slice(&[0x01, *z]),
                Some(Instr::Dec(z)) => out.extend_from_slice(&[0x02, *z]),
                Some(Instr::Clear(z)) => out.extend_from_slice(&[0x03, *z]),
                Some(Instr::Set(a, b)) => out.extend_from_slice(&[0x04, *a, *b]),
                Some(Instr::Goto { target, on_true }) => {
                    out.extend_from_slice(&[0x05, *target, *on_true as u8])
                }
                Some(Instr::Act { schema, args }) => {
                    out.extend_from_slice(&[0x06, (*schema & 0xff) as u8, (*schema >> 8) as u8]);
                    out.push(args.len() as u8);
                    out.extend(args.iter().copied());
                }
                Some(Instr::Test { pred, args }) => {
                    out.extend_from_slice(&[0x07, (*pred & 0xff) as u8, (*pred >> 8) as u8]);
                    out.push(args.len() as u8);
                    out.extend(args.iter().copied());
                }
            }
        }
        out
    }

    pub fn format(&self, domain: &Domain) -> String {
        let mut out = String::from("pointers:");
        for (i, p) in self.pointers.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, " {}:{}", p.name, domain.types.name(p.ty));
        }
        out.push('\n');
        for (i, line) in self.lines.iter().enumerate() {
            let _ = write!(out, "{i}. ");
            match line {
                None => out.push_str("undefined"),
                Some(instr) => self.format_instr(instr, domain, &mut out),
            }
            out.push('\n');
        }
        out
    }

    fn format_instr(&self, instr: &Instr, domain: &Domain, out: &mut String) {
        let ptr = |z: u8| self.pointers[z as usize].name.clone();
        match instr {
            Instr::Inc(z) => {
                let _ = write!(out, "inc({})", ptr(*z));
            }
            Instr::Dec(z) => {
                let _ = write!(out, "dec({})", ptr(*z));
            }
            Instr::Clear(z) => {
                let _ = write!(out, "clear({})", ptr(*z));
            }
            Instr::Set(a, b) => {
                let _ = write!(out, "set({},{})", ptr(*a), ptr(*b));
            }
            Instr::Goto { target, on_true } => {
                let _ = write!(out, "goto({target},{}yz)", if *on_true { "" } else { "!" });
            }
            Instr::End => out.push_str("end"),
            Instr::Act { schema, args } => {
                let _ = write!(out, "{}(", domain.schemas[*schema as usize].name);
                for (i, z) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(&ptr(*z));
                }
                out.push(')');
            }
            Instr::Test { pred, args } => {
                let _ = write!(out, "test({}(", domain.predicates[*pred as usize].name);
                for (i, z) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(&ptr(*z));
                }
                out.push_str("))");
            }
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ProgramError {
    #[error("line {0}: {1}")]
    Line(usize, String),
    #[error("{0}")]
    Header(String),
}

fn header_err(msg: impl Into<String>) -> ProgramError {
    ProgramError::Header(msg.into())
}

pub fn parse_pointer_decls(spec: &str, domain: &Domain) -> Result<Vec<PointerDecl>, ProgramError> {
    let mut out: Vec<PointerDecl> = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (name, ty_name) = part
            .split_once(':')
            .ok_or_else(|| header_err(format!("pointer {part} must be name:type")))?;
        let name = name.trim().to_lowercase();
        let ty_name = ty_name.trim().to_lowercase();
        if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-') {
            return Err(header_err(format!("bad pointer name {name:?}")));
        }
        let ty = domain
            .types
            .id(&ty_name)
            .ok_or_else(|| header_err(format!("unknown pointer type {ty_name}")))?;
        if out.iter().any(|p| p.name == name) {
            return Err(header_err(format!("duplicate pointer {name}")));
        }
        out.push(PointerDecl { name, ty });
    }
    if out.len() > 64 {
        return Err(header_err("too many pointers (max 64)"));
    }
    Ok(out)
}

pub fn parse_program(text: &str, domain: &Domain) -> Result<Program, ProgramError> {
    let mut pointers: Option<Vec<PointerDecl>> = None;
    let mut numbered: Vec<(usize, String)> = Vec::new();
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("pointers:") {
            if pointers.is_some() {
                return Err(header_err("duplicate pointers: header"));
            }
            pointers = Some(parse_pointer_decls(rest, domain)?);
            continue;
        }
        let (num, instr_text) = line
            .split_once('.')
            .ok_or_else(|| header_err(format!("expected 'k. instr', got {line:?}")))?;
        let num: usize = num
            .trim()
            .parse()
            .map_err(|_| header_err(format!("bad line number in {line:?}")))?;
        numbered.push((num, instr_text.trim().to_lowercase()));
    }
    let pointers = pointers.ok_or_else(|| header_err("missing pointers: header"))?;
    let n = numbered
        .iter()
        .map(|(k, _)| k + 1)
        .max()
        .ok_or_else(|| header_err("program has no lines"))?;
    if n > Program::MAX_LINES {
        return Err(header_err("program too long (max 256 lines)"));
    }

    let pointers: Arc<[PointerDecl]> = pointers.into();
    let mut lines: Vec<Option<Instr>> = vec![None; n];
    for (k, text) in numbered {
        if lines[k].is_some() {
            return Err(ProgramError::Line(k, "line defined twice".into()));
        }
        lines[k] = parse_instr(&text, k, n, domain, &pointers)?;
    }
    match lines[n - 1] {
        Some(Instr::End) => {}
        _ => return Err(ProgramError::Line(n - 1, "last line must be end".into())),
    }
    Ok(Program { lines, pointers })
}

fn parse_instr(
    text: &str,
    lineno: usize,
    n: usize,
    domain: &Domain,
    pointers: &Arc<[PointerDecl]>,
) -> Result<Option<Instr>, ProgramError> {
    let err = |msg: String| ProgramError::Line(lineno, msg);
    if text == "undefined" {
        return Ok(None);
    }
    if text == "end" {
        if lineno != n - 1 {
            return Err(err("end may only appear on the last line".into()));
        }
        return Ok(Some(Instr::End));
    }
    let (head, inner) = text
        .split_once('(')
        .ok_or_else(|| err(format!("malformed instruction {text:?}")))?;
    let head = head.trim();
    let inner = inner
        .strip_suffix(')')
        .ok_or_else(|| err(format!("missing ')' in {text:?}")))?;

    let ptr_of = |name: &str| -> Result<u8, ProgramError> {
        let name = name.trim();
        pointers
            .iter()
            .position(|p| p.name == name)
            .map(|i| i as u8)
            .ok_or_else(|| err(format!("unknown pointer {name}")))
    };
    let split_args = |inner: &str| -> Vec<String> {
        inner
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect()
    };

    let instr = match head {
        "inc" | "dec" | "clear" => {
            let args = split_args(inner);
            if args.len() != 1 {
                return Err(err(format!("{head} takes one pointer")));
            }
            let z = ptr_of(&args[0])?;
            match head {
                "inc" => Instr::Inc(z),
                "dec" => Instr::Dec(z),
                _ => Instr::Clear(z),
            }
        }
        "set" => {
            let args = split_args(inner);
            if args.len() != 2 {
                return Err(err("set takes two pointers".into()));
            }
            let a = ptr_of(&args[0])?;
            let b = ptr_of(&args[1])?;
            if pointers[a as usize].ty != pointers[b as usize].ty {
                return Err(err(format!(
                    "set({},{}) mixes pointer types",
                    args[0], args[1]
                )));
            }
            Instr::Set(a, b)
        }
        "goto" => {
            let args = split_args(inner);
            if args.len() != 2 {
                return Err(err("goto takes (target,cond)".into()));
            }
            let target: usize = args[0]
                .parse()
                .map_err(|_| err(format!("bad goto target {}", args[0])))?;
            let on_true = match args[1].as_str() {
                "yz" => true,
                "!yz" => false,
                other => return Err(err(format!("goto condition must be yz or !yz, got {other}"))),
            };
            if target >= n {
                return Err(err(format!("goto target {target} out of range")));
            }
            if target == lineno || target == lineno + 1 {
                return Err(err("goto may not target its own or the next line".into()));
            }
            Instr::Goto { target: target as u8, on_true }
        }
        "test" => {
            let (pname, pargs) = inner
                .split_once('(')
                .ok_or_else(|| err("test takes a predicate atom, e.g. test(p(z1))".into()))?;
            let pargs = pargs
                .strip_suffix(')')
                .ok_or_else(|| err("missing ')' in test atom".into()))?;
            let pred = domain
                .pred_id(pname.trim())
                .ok_or_else(|| err(format!("unknown predicate {}", pname.trim())))?;
            let args = bind_args(&split_args(pargs), &domain.predicates[pred as usize].params, domain, pointers, ptr_of)
                .map_err(|m| err(m))?;
            Instr::Test { pred, args }
        }
        name => {
            let schema = domain
                .schema_id(name)
                .ok_or_else(|| err(format!("unknown instruction or action {name}")))?;
            let args = bind_args(&split_args(inner), &domain.schemas[schema as usize].params, domain, pointers, ptr_of)
                .map_err(|m| err(m))?;
            Instr::Act { schema, args }
        }
    };
    Ok(Some(instr))
}

fn bind_args(
    names: &[String],
    param_types: &[TypeId],
    domain: &Domain,
    pointers: &Arc<[PointerDecl]>,
    ptr_of: impl Fn(&str) -> Result<u8, ProgramError>,
) -> Result<SmallVec<[u8; 4]>, String> {
    if names.len() != param_types.len() {
        return Err(format!("expected {} pointer arguments, got {}", param_types.len(), names.len()));
    }
    let mut out = SmallVec::new();
    for (name, &want) in names.iter().zip(param_types) {
        let z = ptr_of(name).map_err(|e| e.to_string())?;
        let have = pointers[z as usize].ty;
        if !domain.types.is_subtype(have, want) {
            return Err(format!(
                "pointer {name} of type {} is not a {}",
                domain.types.name(have),
                domain.types.name(want)
            ));
        }
        out.push(z);
    }
    Ok(out)
}
