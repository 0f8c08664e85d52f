//! Line-oriented record of DP-steps and DP-removals.
//!
//! ```text
//! # dpg-trace v1
//! # direction=grow
//! STEP 8 3 op3a 0 M=5-6
//! STEP 9 3 op2 - M=1-2,8-s
//! REMOVE 7 invop2 M=5-6 x=4
//! REMOVE 0 invop3b M=1-2,3-4 u=4
//! ```

use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{ExtEdge, StubGraph, VertexId};
use crate::growth::{apply_step, covered_in_order, DpStepRecord, OpKind};
use crate::reduce::{dp_remove, mirrored_certificate, InvOpKind, RemovabilityCertificate};

const MAGIC: &str = "# dpg-trace v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceDirection {
    Grow,
    Reduce,
}

impl fmt::Display for TraceDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TraceDirection::Grow => "grow",
            TraceDirection::Reduce => "reduce",
        })
    }
}

impl FromStr for TraceDirection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grow" => Ok(TraceDirection::Grow),
            "reduce" => Ok(TraceDirection::Reduce),
            _ => Err(format!("unknown direction {s:?}")),
        }
    }
}

/// Size of the graph a trace starts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedSummary {
    pub n: usize,
    pub m: usize,
    pub max_degree: usize,
}

impl SeedSummary {
    pub fn of(sg: &StubGraph) -> Self {
        let g = sg.graph();
        SeedSummary {
            n: g.vertex_count(),
            m: g.edge_count(),
            max_degree: g.max_degree(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    Step(DpStepRecord),
    Remove(RemovabilityCertificate),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub direction: TraceDirection,
    pub protocol: Option<String>,
    pub strategy: Option<String>,
    pub rng_seed: Option<u64>,
    pub seed: Option<SeedSummary>,
    pub events: Vec<TraceEvent>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("event {index}: {msg}")]
    Mismatch { index: usize, msg: String },
}

fn write_pairs(out: &mut String, pairs: &[ExtEdge]) {
    out.push_str("M=");
    for (i, e) in pairs.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{e}").unwrap();
    }
}

fn parse_pairs(s: &str) -> Result<Vec<ExtEdge>, String> {
    let body = s.strip_prefix("M=").ok_or_else(|| format!("expected M=, got {s:?}"))?;
    if body.is_empty() {
        return Ok(Vec::new());
    }
    body.split(',')
        .map(|p| p.parse::<ExtEdge>().map_err(|e| format!("bad pair {p:?}: {e}")))
        .collect()
}

fn parse_id(s: &str) -> Result<VertexId, String> {
    s.parse::<usize>()
        .map(VertexId::from)
        .map_err(|_| format!("bad vertex id {s:?}"))
}

/// Fills in the stub locations of a parsed step, given where the stub sits
/// right after it.
fn resolve_stubs(rec: &mut DpStepRecord, stub_after: Option<VertexId>) {
    let stub_lift = rec.lifted.iter().find_map(|e| match e {
        ExtEdge::Stub(x) => Some(*x),
        ExtEdge::Real(_) => None,
    });
    rec.stub_before = match rec.op {
        OpKind::Op1 => stub_lift.or(stub_after),
        OpKind::Op2 => stub_lift,
        OpKind::Op3a | OpKind::Op3b => None,
    };
    rec.stub_after = match rec.op {
        OpKind::Op1 if stub_lift.is_some() => Some(rec.new_vertex),
        OpKind::Op1 => stub_after,
        OpKind::Op2 => None,
        OpKind::Op3a => Some(rec.new_vertex),
        OpKind::Op3b => rec
            .r
            .and_then(|r| covered_in_order(&rec.lifted).get(r.wrapping_sub(1)).copied()),
    };
}

impl Trace {
    pub fn new(direction: TraceDirection) -> Self {
        Trace {
            direction,
            protocol: None,
            strategy: None,
            rng_seed: None,
            seed: None,
            events: Vec::new(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{MAGIC}").unwrap();
        writeln!(out, "# direction={}", self.direction).unwrap();
        if let Some(p) = &self.protocol {
            writeln!(out, "# protocol={p}").unwrap();
        }
        if let Some(s) = &self.strategy {
            writeln!(out, "# strategy={s}").unwrap();
        }
        if let Some(s) = self.rng_seed {
            writeln!(out, "# rng-seed={s}").unwrap();
        }
        if let Some(s) = self.seed {
            writeln!(out, "# seed-n={} seed-m={} seed-maxdeg={}", s.n, s.m, s.max_degree).unwrap();
        }
        for ev in &self.events {
            match ev {
                TraceEvent::Step(rec) => {
                    write!(out, "STEP {} {} {} ", rec.new_vertex, rec.p_degree, rec.op).unwrap();
                    match rec.r {
                        Some(r) => write!(out, "{r} ").unwrap(),
                        None => out.push_str("- "),
                    }
                    write_pairs(&mut out, &rec.lifted);
                    if let Some(nu) = rec.nu {
                        write!(out, " nu={nu}").unwrap();
                    }
                }
                TraceEvent::Remove(c) => {
                    write!(out, "REMOVE {} {} ", c.vertex, c.inv_op).unwrap();
                    write_pairs(&mut out, &c.restored);
                    if c.inv_op == InvOpKind::InvOp2 {
                        if let Some(x) = c.new_deficient {
                            write!(out, " x={x}").unwrap();
                        }
                    }
                    if let Some(u) = c.stub_before {
                        write!(out, " u={u}").unwrap();
                    }
                }
            }
            out.push('\n');
        }
        out
    }

    /// Parses the text form. Stub locations of steps that do not move the
    /// stub-edge are only known after replay; [`Trace::replay`] fills them in.
    pub fn parse(text: &str) -> Result<Trace, TraceError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let err = |line: usize, msg: String| TraceError::Parse { line, msg };
        match lines.next() {
            Some((_, MAGIC)) => {}
            Some((line, other)) => return Err(err(line, format!("expected {MAGIC:?}, got {other:?}"))),
            None => return Err(err(1, "empty trace".into())),
        }
        let mut trace = Trace::new(TraceDirection::Grow);
        let mut seen_direction = false;
        let mut stub: Option<VertexId> = None;
        for (line, l) in lines {
            if l.is_empty() {
                continue;
            }
            if let Some(h) = l.strip_prefix('#') {
                for field in h.split_whitespace() {
                    let Some((key, value)) = field.split_once('=') else {
                        continue;
                    };
                    let num = || value.parse::<u64>().map_err(|_| err(line, format!("bad {key} {value:?}")));
                    match key {
                        "direction" => {
                            trace.direction = value.parse().map_err(|e| err(line, e))?;
                            seen_direction = true;
                        }
                        "protocol" => trace.protocol = Some(value.to_string()),
                        "strategy" => trace.strategy = Some(value.to_string()),
                        "rng-seed" => trace.rng_seed = Some(num()?),
                        "seed-n" | "seed-m" | "seed-maxdeg" => {
                            let s = trace.seed.get_or_insert(SeedSummary { n: 0, m: 0, max_degree: 0 });
                            let v = num()? as usize;
                            match key {
                                "seed-n" => s.n = v,
                                "seed-m" => s.m = v,
                                _ => s.max_degree = v,
                            }
                        }
                        _ => {}
                    }
                }
                continue;
            }
            let tok: Vec<&str> = l.split_whitespace().collect();
            let ev = match tok[0] {
                "STEP" => {
                    if !(6..=7).contains(&tok.len()) {
                        return Err(err(line, "STEP takes 5 or 6 fields".into()));
                    }
                    let w = parse_id(tok[1]).map_err(|e| err(line, e))?;
                    let p = tok[2].parse().map_err(|_| err(line, format!("bad p-degree {:?}", tok[2])))?;
                    let op: OpKind = tok[3].parse().map_err(|e| err(line, e))?;
                    let r = match tok[4] {
                        "-" => None,
                        s => Some(s.parse().map_err(|_| err(line, format!("bad r {s:?}")))?),
                    };
                    let lifted = parse_pairs(tok[5]).map_err(|e| err(line, e))?;
                    let nu = match tok.get(6) {
                        None => None,
                        Some(s) => Some(
                            s.strip_prefix("nu=")
                                .and_then(|v| v.parse().ok())
                                .ok_or_else(|| err(line, format!("bad field {s:?}")))?,
                        ),
                    };
                    let mut rec = DpStepRecord {
                        new_vertex: w,
                        p_degree: p,
                        op,
                        r,
                        lifted,
                        stub_before: None,
                        stub_after: None,
                        nu,
                    };
                    resolve_stubs(&mut rec, stub);
                    stub = rec.stub_after;
                    TraceEvent::Step(rec)
                }
                "REMOVE" => {
                    if tok.len() < 4 {
                        return Err(err(line, "REMOVE takes at least 3 fields".into()));
                    }
                    let w = parse_id(tok[1]).map_err(|e| err(line, e))?;
                    let inv_op: InvOpKind = tok[2].parse().map_err(|e| err(line, e))?;
                    let restored = parse_pairs(tok[3]).map_err(|e| err(line, e))?;
                    let (mut x, mut u) = (None, None);
                    for f in &tok[4..] {
                        let (key, value) = f
                            .split_once('=')
                            .ok_or_else(|| err(line, format!("bad field {f:?}")))?;
                        let id = parse_id(value).map_err(|e| err(line, e))?;
                        match key {
                            "x" => x = Some(id),
                            "u" => u = Some(id),
                            _ => return Err(err(line, format!("unknown field {key:?}"))),
                        }
                    }
                    let new_deficient = match inv_op {
                        InvOpKind::InvOp1 => restored
                            .iter()
                            .find_map(|e| match e {
                                ExtEdge::Stub(y) => Some(*y),
                                ExtEdge::Real(_) => None,
                            })
                            .or(u),
                        InvOpKind::InvOp2 => {
                            Some(x.ok_or_else(|| err(line, "invop2 needs x=".into()))?)
                        }
                        InvOpKind::InvOp3a | InvOpKind::InvOp3b => None,
                    };
                    stub = new_deficient;
                    TraceEvent::Remove(RemovabilityCertificate {
                        vertex: w,
                        inv_op,
                        restored,
                        new_deficient,
                        stub_before: u,
                    })
                }
                other => return Err(err(line, format!("unknown record {other:?}"))),
            };
            trace.events.push(ev);
        }
        if !seen_direction {
            return Err(err(2, "missing direction header".into()));
        }
        Ok(trace)
    }

    /// Applies every event to `start`, checking each against the state.
    /// Step records get their stub locations from the replay.
    pub fn replay(&mut self, start: &StubGraph) -> Result<StubGraph, TraceError> {
        let mut sg = start.clone();
        for (index, ev) in self.events.iter_mut().enumerate() {
            let mismatch = |msg: String| TraceError::Mismatch { index, msg };
            match ev {
                TraceEvent::Step(rec) => {
                    let fresh = sg.graph().id_bound();
                    let reuse = (rec.new_vertex.index() != fresh).then_some(rec.new_vertex);
                    let got = apply_step(&mut sg, rec.p_degree, &rec.lifted, rec.r, reuse)
                        .map_err(|e| mismatch(e.to_string()))?;
                    if got.new_vertex != rec.new_vertex || got.op != rec.op {
                        return Err(mismatch(format!(
                            "recorded {} {}, replay gave {} {}",
                            rec.new_vertex, rec.op, got.new_vertex, got.op
                        )));
                    }
                    rec.stub_before = got.stub_before;
                    rec.stub_after = got.stub_after;
                }
                TraceEvent::Remove(cert) => {
                    if sg.deficient() != cert.stub_before {
                        return Err(mismatch(format!(
                            "stub-edge at {:?}, recorded {:?}",
                            sg.deficient(),
                            cert.stub_before
                        )));
                    }
                    dp_remove(&mut sg, cert).map_err(|e| mismatch(e.to_string()))?;
                }
            }
        }
        Ok(sg)
    }

    /// Undoes every event, last first, starting from the final state.
    pub fn replay_reverse(&self, end: &StubGraph) -> Result<StubGraph, TraceError> {
        let mut sg = end.clone();
        for (index, ev) in self.events.iter().enumerate().rev() {
            let mismatch = |msg: String| TraceError::Mismatch { index, msg };
            match ev {
                TraceEvent::Step(rec) => {
                    let mut rec = rec.clone();
                    resolve_stubs(&mut rec, sg.deficient());
                    if rec.stub_after != sg.deficient() {
                        return Err(mismatch(format!(
                            "stub-edge at {:?}, step leaves it at {:?}",
                            sg.deficient(),
                            rec.stub_after
                        )));
                    }
                    dp_remove(&mut sg, &mirrored_certificate(&rec))
                        .map_err(|e| mismatch(e.to_string()))?;
                }
                TraceEvent::Remove(cert) => {
                    let (p, lifts, r) = cert.inverse_step().map_err(|e| mismatch(e.to_string()))?;
                    apply_step(&mut sg, p, &lifts, r, Some(cert.vertex))
                        .map_err(|e| mismatch(e.to_string()))?;
                    if sg.deficient() != cert.stub_before {
                        return Err(mismatch("stub-edge not restored".into()));
                    }
                }
            }
        }
        Ok(sg)
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Trace {
    type Err = TraceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Trace::parse(s)
    }
}
