//! Graphviz rendering of the automata of a network (not of its state graph).

use std::fmt::Write as _;

use super::model::{Network, Sync};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn network_to_dot(network: &Network) -> String {
    let mut out =
        String::from("digraph network {\n  rankdir=LR;\n  node [shape=ellipse, fontsize=10];\n");
    for (ai, a) in network.automata.iter().enumerate() {
        let _ = writeln!(
            out,
            "  subgraph cluster_{ai} {{\n    label={};",
            quote(&a.name)
        );
        let _ = writeln!(
            out,
            "    {} [shape=point];",
            quote(&format!("{}.__init", a.name))
        );
        for l in &a.locations {
            let mut label = l.id.clone();
            if !l.invariant.is_true() {
                let _ = write!(label, "\\n{}", l.invariant);
            }
            let style = if l.urgent { ", style=dashed" } else { "" };
            let _ = writeln!(
                out,
                "    {} [label={}{style}];",
                quote(&format!("{}.{}", a.name, l.id)),
                quote(&label)
            );
        }
        let _ = writeln!(
            out,
            "    {} -> {};",
            quote(&format!("{}.__init", a.name)),
            quote(&format!("{}.{}", a.name, a.initial))
        );
        for e in &a.edges {
            let mut parts = Vec::new();
            if !e.guard.is_true() {
                parts.push(e.guard.to_string());
            }
            if e.sync != Sync::Internal {
                parts.push(e.sync.to_string());
            }
            if !e.resets.is_empty() {
                parts.push(format!("{}:=0", e.resets.join(",")));
            }
            if !e.updates.is_empty() {
                parts.push(
                    e.updates
                        .iter()
                        .map(|u| u.to_string())
                        .collect::<Vec<_>>()
                        .join(", "),
                );
            }
            let _ = writeln!(
                out,
                "    {} -> {} [label={}];",
                quote(&format!("{}.{}", a.name, e.source)),
                quote(&format!("{}.{}", a.name, e.target)),
                quote(&parts.join("\\n"))
            );
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}
