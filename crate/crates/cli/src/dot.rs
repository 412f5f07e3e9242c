//! Graphviz rendering of wiring diagrams.
//!
//! Each shell is a cluster holding one node per port, numbered from 1.
//! A block joining exactly two ports is drawn as a plain edge between them;
//! any other block gets a point node with an edge to each of its ports.
//! Support types not carried by any block label a diamond node.

use std::fmt::Write;

use regulus::{Port, Relation, Shell};

fn port_id(p: &Port) -> String {
    match p.shell {
        Shell::Inner(s) => format!("s{}p{}", s + 1, p.index + 1),
        Shell::Outer => format!("outp{}", p.index + 1),
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn cluster(out: &mut String, id: &str, label: &str, ports: &[String]) {
    writeln!(out, "  subgraph cluster_{id} {{").unwrap();
    writeln!(out, "    label={};", quote(label)).unwrap();
    if ports.is_empty() {
        writeln!(out, "    {id} [shape=none, label=\"\"];").unwrap();
    }
    for (j, p) in ports.iter().enumerate() {
        writeln!(out, "    {p} [shape=circle, fixedsize=true, width=0.25, label=\"{}\"];", j + 1).unwrap();
    }
    writeln!(out, "  }}").unwrap();
}

/// Renders `rel`, labelling inner shell `i` with `labels[i]` (or its
/// 1-based position when no label is given).
pub fn emit_dot(name: &str, rel: &Relation, labels: Option<&[String]>) -> String {
    let mut out = String::new();
    writeln!(out, "graph {} {{", quote(name)).unwrap();
    for (i, ctx) in rel.inner().iter().enumerate() {
        let ports: Vec<String> = (0..ctx.arity()).map(|j| port_id(&Port::inner(i, j))).collect();
        let label = labels.map_or_else(|| (i + 1).to_string(), |l| l[i].clone());
        cluster(&mut out, &format!("s{}", i + 1), &label, &ports);
    }
    let outer: Vec<String> = (0..rel.outer().arity()).map(|j| port_id(&Port::outer(j))).collect();
    cluster(&mut out, "out", "out", &outer);

    for (b, (ports, ty)) in rel.blocks().iter().zip(rel.block_types()).enumerate() {
        if let [p, q] = ports.as_slice() {
            writeln!(out, "  {} -- {};", port_id(p), port_id(q)).unwrap();
            continue;
        }
        writeln!(out, "  b{} [shape=point, xlabel={}];", b + 1, quote(ty.name())).unwrap();
        for p in ports {
            writeln!(out, "  b{} -- {};", b + 1, port_id(p)).unwrap();
        }
    }
    let white_dot = rel.white_dot();
    let white: Vec<&str> = white_dot.iter().map(|t| t.name()).collect();
    if !white.is_empty() {
        writeln!(out, "  white [shape=diamond, label={}];", quote(&white.join(","))).unwrap();
    }
    out.push_str("}\n");
    out
}
