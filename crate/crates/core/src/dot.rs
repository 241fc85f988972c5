//! Graphviz export of multigraphs and orientations.

use std::fmt::Write;

use num_traits::{Signed, Zero};

use crate::error::Result;
use crate::model::{Multigraph, Orientation};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DotStyle {
    /// Labels only.
    #[default]
    Plain,
    /// Heavy edges solid, light and zero-weight edges dashed. An edge is
    /// heavy when its larger endpoint magnitude is the largest in the graph.
    Paper,
}

fn magnitude(g: &Multigraph, k: usize) -> Rational {
    let e = &g.edges[k];
    e.wa.abs().max(e.wb.abs())
}

/// Vertices `0..n` in order, then edges in graph order. With an orientation
/// the graph is directed toward each head; edges it leaves open are drawn
/// without an arrow.
pub fn export_dot(g: &Multigraph, pi: Option<&Orientation>, style: DotStyle) -> Result<String> {
    let heads = match pi {
        Some(p) => Some(p.heads(g)?),
        None => None,
    };
    let heavy = (0..g.edges.len())
        .map(|k| magnitude(g, k))
        .max()
        .unwrap_or_else(Rational::zero);
    let mut out = String::new();
    out.push_str(if heads.is_some() {
        "digraph {\n"
    } else {
        "graph {\n"
    });
    for v in 0..g.vertices {
        writeln!(out, "  {v};").expect("writing to a string");
    }
    for (k, e) in g.edges.iter().enumerate() {
        let mut attrs = vec![format!(
            "label=\"{}\"",
            e.id.replace('\\', "\\\\").replace('"', "\\\"")
        )];
        if style == DotStyle::Paper {
            let solid = !heavy.is_zero() && magnitude(g, k) == heavy;
            attrs.push(format!("style={}", if solid { "solid" } else { "dashed" }));
        }
        let line = match &heads {
            None => format!("{} -- {}", e.a, e.b),
            Some(h) => match h[k] {
                Some(head) => format!("{} -> {}", e.other(head), head),
                None => {
                    attrs.push("dir=none".into());
                    format!("{} -> {}", e.a, e.b)
                }
            },
        };
        writeln!(out, "  {line} [{}];", attrs.join(", ")).expect("writing to a string");
    }
    out.push_str("}\n");
    Ok(out)
}
