//! DOT export for external rendering. Vertex kinds map to shapes, edge
//! kinds to line styles; boundary edges are drawn heavier.

use crate::dessin::{Dessin, EdgeColor, VertexKind};
use crate::skeleton::{AbstractSkeleton, Part};

pub fn dessin_to_dot(d: &Dessin) -> String {
    let mut out = String::from("digraph dessin {\n");
    out.push_str("  layout=neato;\n  node [fontsize=10];\n");
    for v in d.graph.vertices.values() {
        let (shape, fill) = match d.kind_of(&v.id) {
            VertexKind::Black => ("circle", "black"),
            VertexKind::White => ("circle", "white"),
            VertexKind::Cross => ("diamond", "gray"),
            VertexKind::Monochrome => ("point", "gray"),
        };
        let peripheries = if v.locus.is_real() { 2 } else { 1 };
        out.push_str(&format!(
            "  \"{}\" [shape={}, style=filled, fillcolor={}, peripheries={}];\n",
            v.id, shape, fill, peripheries
        ));
    }
    for e in d.graph.edges.values() {
        let style = match d.color_of(&e.id) {
            EdgeColor::Solid => "solid",
            EdgeColor::Bold => "bold",
            EdgeColor::Dotted => "dotted",
        };
        let (from, to) = if d.dir[&e.id] == e.darts.0 {
            (&e.ends.0, &e.ends.1)
        } else {
            (&e.ends.1, &e.ends.0)
        };
        let penwidth = if d.graph.is_real_edge(&e.id) { "2.0" } else { "1.0" };
        out.push_str(&format!(
            "  \"{}\" -> \"{}\" [style={}, penwidth={}, label=\"{}\"];\n",
            from, to, style, penwidth, e.id
        ));
    }
    out.push_str("}\n");
    out
}

pub fn skeleton_to_dot(s: &AbstractSkeleton) -> String {
    let mut out = String::from("digraph skeleton {\n");
    out.push_str("  layout=neato;\n  node [fontsize=10];\n");
    for v in s.graph.vertices.values() {
        let shape = match s.vertex_part[&v.id] {
            Part::Directed => "triangle",
            Part::Undirected => "circle",
        };
        let peripheries = if v.locus.is_real() { 2 } else { 1 };
        out.push_str(&format!(
            "  \"{}\" [shape={}, peripheries={}];\n",
            v.id, shape, peripheries
        ));
    }
    for e in s.graph.edges.values() {
        if s.is_arc(&e.id) {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [style=solid, color=gray, arrowhead=none];\n",
                e.ends.0, e.ends.1
            ));
            continue;
        }
        match s.dir.get(&e.id) {
            Some(dd) => {
                let (from, to) = if *dd == e.darts.0 {
                    (&e.ends.0, &e.ends.1)
                } else {
                    (&e.ends.1, &e.ends.0)
                };
                out.push_str(&format!(
                    "  \"{}\" -> \"{}\" [style=dashed, label=\"{}\"];\n",
                    from, to, e.id
                ));
            }
            None => {
                out.push_str(&format!(
                    "  \"{}\" -> \"{}\" [style=dashed, arrowhead=none, label=\"{}\"];\n",
                    e.ends.0, e.ends.1, e.id
                ));
            }
        }
    }
    out.push_str("}\n");
    out
}
