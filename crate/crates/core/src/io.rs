//! Text formats for instances, solutions and decompositions.
//!
//! Files use 1-based vertex ids; everything in memory is 0-based.
//!
//! ```text
//! p mcpp <n> <edges> <arcs>    |  p bcpp <n> <edges>
//! e <u> <v> <w>
//! a <u> <v> <w>                   (mcpp only)
//! t <v> <demand>                  (bcpp only, default 0)
//! ```
//!
//! Solutions are `s <weight>`, then `m <u> <v> <count>` per traversed arc
//! and optionally one `w <v1> ... <v1>` closed walk.

use std::fmt::Write as _;

use thiserror::Error;

use crate::classical::CppSolution;
use crate::decomp::{CutDecomposition, NodeKind};
use crate::error::Error as GraphError;
use crate::graph::{ClosedWalk, Demand, DirectedMultigraph, MixedGraph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Instance(#[from] GraphError),
}

pub type FormatResult<T> = std::result::Result<T, FormatError>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Mcpp(MixedGraph),
    Bcpp(MixedGraph, Demand),
}

impl Instance {
    pub fn graph(&self) -> &MixedGraph {
        match self {
            Instance::Mcpp(g) | Instance::Bcpp(g, _) => g,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Mcpp(_) => "mcpp",
            Instance::Bcpp(..) => "bcpp",
        }
    }
}

fn parse_err(line: usize, reason: impl Into<String>) -> FormatError {
    FormatError::Parse { line, reason: reason.into() }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = body.split_whitespace().collect();
        (!fields.is_empty()).then_some((i + 1, fields))
    })
}

fn number<T: std::str::FromStr>(line: usize, field: &str, what: &str) -> FormatResult<T> {
    field.parse().map_err(|_| parse_err(line, format!("bad {what} '{field}'")))
}

fn vertex(line: usize, field: &str, n: usize) -> FormatResult<Vertex> {
    let v: usize = number(line, field, "vertex")?;
    if v == 0 || v > n {
        return Err(parse_err(line, format!("vertex {v} outside 1..={n}")));
    }
    Ok(v - 1)
}

fn arity(line: usize, fields: &[&str], want: usize) -> FormatResult<()> {
    if fields.len() != want {
        return Err(parse_err(line, format!("'{}' takes {} fields, got {}", fields[0], want - 1, fields.len() - 1)));
    }
    Ok(())
}

pub fn parse_instance(text: &str) -> FormatResult<Instance> {
    let mut recs = records(text);
    let (hline, header) = recs.next().ok_or_else(|| parse_err(1, "missing header"))?;
    if header[0] != "p" {
        return Err(parse_err(hline, "first record must be the 'p' header"));
    }
    let bcpp = match header.get(1).copied() {
        Some("mcpp") => {
            arity(hline, &header, 5)?;
            false
        }
        Some("bcpp") => {
            arity(hline, &header, 4)?;
            true
        }
        other => return Err(parse_err(hline, format!("unknown problem kind {other:?}"))),
    };
    let n: usize = number(hline, header[2], "vertex count")?;
    let want_edges: usize = number(hline, header[3], "edge count")?;
    let want_arcs: usize = if bcpp { 0 } else { number(hline, header[4], "arc count")? };

    let mut edges = Vec::new();
    let mut arcs = Vec::new();
    let mut demand = vec![0i64; n];
    let mut demand_set = vec![false; n];
    for (line, f) in recs {
        match f[0] {
            "e" | "a" => {
                arity(line, &f, 4)?;
                if f[0] == "a" && bcpp {
                    return Err(parse_err(line, "arcs are not allowed in a bcpp instance"));
                }
                let u = vertex(line, f[1], n)?;
                let v = vertex(line, f[2], n)?;
                if u == v {
                    return Err(parse_err(line, "self-loop"));
                }
                let w: u64 = number(line, f[3], "weight")?;
                if f[0] == "e" { &mut edges } else { &mut arcs }.push((u, v, w));
            }
            "t" => {
                arity(line, &f, 3)?;
                if !bcpp {
                    return Err(parse_err(line, "demands are only allowed in a bcpp instance"));
                }
                let v = vertex(line, f[1], n)?;
                if demand_set[v] {
                    return Err(parse_err(line, format!("second demand for vertex {}", v + 1)));
                }
                demand_set[v] = true;
                demand[v] = number(line, f[2], "demand")?;
            }
            "p" => return Err(parse_err(line, "second header")),
            other => return Err(parse_err(line, format!("unknown record '{other}'"))),
        }
    }
    if edges.len() != want_edges || arcs.len() != want_arcs {
        return Err(parse_err(
            hline,
            format!(
                "header announces {want_edges} edges and {want_arcs} arcs, found {} and {}",
                edges.len(),
                arcs.len()
            ),
        ));
    }
    let g = MixedGraph::new(n, edges, arcs)?;
    if bcpp {
        let t = Demand::new(demand);
        if t.sum() != 0 {
            return Err(GraphError::DemandSum(t.sum()).into());
        }
        Ok(Instance::Bcpp(g, t))
    } else {
        Ok(Instance::Mcpp(g))
    }
}

pub fn write_instance(inst: &Instance) -> String {
    let g = inst.graph();
    let mut out = String::new();
    match inst {
        Instance::Mcpp(_) => writeln!(out, "p mcpp {} {} {}", g.n(), g.edges().len(), g.arcs().len()),
        Instance::Bcpp(..) => writeln!(out, "p bcpp {} {}", g.n(), g.edges().len()),
    }
    .unwrap();
    for e in g.edges() {
        writeln!(out, "e {} {} {}", e.u + 1, e.v + 1, e.w).unwrap();
    }
    for a in g.arcs() {
        writeln!(out, "a {} {} {}", a.u + 1, a.v + 1, a.w).unwrap();
    }
    if let Instance::Bcpp(_, t) = inst {
        for (v, &d) in t.as_slice().iter().enumerate() {
            if d != 0 {
                writeln!(out, "t {} {}", v + 1, d).unwrap();
            }
        }
    }
    out
}

pub fn write_solution(sol: &CppSolution) -> String {
    let mut out = format!("s {}\n", sol.weight);
    for ((u, v), c) in sol.multigraph.iter() {
        writeln!(out, "m {} {} {}", u + 1, v + 1, c).unwrap();
    }
    if let Some(walk) = &sol.walk {
        out.push('w');
        for &v in walk.vertices() {
            write!(out, " {}", v + 1).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Reads a solution for a graph on `n` vertices. Repeated `m` lines for the
/// same arc add up.
pub fn parse_solution(text: &str, n: usize) -> FormatResult<CppSolution> {
    let mut weight = None;
    let mut d = DirectedMultigraph::new(n);
    let mut walk = None;
    for (line, f) in records(text) {
        match f[0] {
            "s" => {
                arity(line, &f, 2)?;
                if weight.is_some() {
                    return Err(parse_err(line, "second weight line"));
                }
                weight = Some(number(line, f[1], "weight")?);
            }
            "m" => {
                arity(line, &f, 4)?;
                let u = vertex(line, f[1], n)?;
                let v = vertex(line, f[2], n)?;
                if u == v {
                    return Err(parse_err(line, "self-loop"));
                }
                d.add(u, v, number(line, f[3], "count")?);
            }
            "w" => {
                if walk.is_some() {
                    return Err(parse_err(line, "second walk line"));
                }
                let vs = f[1..].iter().map(|x| vertex(line, x, n)).collect::<FormatResult<Vec<_>>>()?;
                walk = Some(ClosedWalk(vs));
            }
            other => return Err(parse_err(line, format!("unknown record '{other}'"))),
        }
    }
    let weight = weight.ok_or_else(|| parse_err(1, "missing 's' line"))?;
    Ok(CppSolution { weight, multigraph: d, walk })
}

/// The core, the cut edges and one line per decomposition node.
pub fn write_decomposition(g: &MixedGraph, cd: &CutDecomposition) -> String {
    let mut out = String::from("cprime:");
    for v in &cd.core {
        write!(out, " {}", v + 1).unwrap();
    }
    out.push_str("\nfcut:");
    for &i in &cd.cut_edges {
        let e = g.edges()[i];
        write!(out, " {} {}", e.u + 1, e.v + 1).unwrap();
    }
    out.push('\n');
    for (id, node) in cd.td.nodes.iter().enumerate() {
        let kind = match node.kind {
            NodeKind::Introduce(v) => format!("introduce({})", v + 1),
            NodeKind::Forget(v) => format!("forget({})", v + 1),
            other => other.name().to_string(),
        };
        let parent = node.parent.map_or("-".to_string(), |p| p.to_string());
        write!(out, "node {id} {kind} {parent} :").unwrap();
        for v in &node.bag {
            write!(out, " {}", v + 1).unwrap();
        }
        out.push('\n');
    }
    out
}
