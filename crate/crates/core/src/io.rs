//! Text formats.
//!
//! One record per line, whitespace separated, `#` starts a comment.
//!
//! Embedded graphs / dessins:
//! ```text
//! vertex <id> inner|real:<bc>:<pos>
//! edge <id> <v1> <v2> side <dartA> <dartB>
//! region <id> genus <g> [walk <dart...>]* [puncture <v>]*
//! boundary <bc> <v> <e> <v> <e> ...
//! color <edge> solid|bold|dotted
//! kind <vertex> black|white|cross|mono
//! dir <edge> <fromVertex|dart>
//! ```
//!
//! Abstract skeletons:
//! ```text
//! svertex <id> inner|real:<bc>:<pos> directed|undirected
//! sedge <id> <v1> <v2> [dir <from>]
//! region ...            # optional; omitted regions are derived for
//!                       # disk skeletons without parallel chords
//! ```
//! Boundary arcs between consecutive real skeleton vertices are
//! materialized as edges `arc:<bc>:<i>` with darts `arc:<bc>:<i>:+` and
//! `arc:<bc>:<i>:-`; region records may reference those darts.
//!
//! Chord diagrams:
//! ```text
//! point <pos> source|sink|undirected|zigzag
//! chord <posA> <posB> [dir <posFrom>]
//! ```
//!
//! Region labellings: `label <region> 1|2|3`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::dessin::{Dessin, EdgeColor, VertexKind};
use crate::ids::{BoundaryId, DartId, EdgeId, RegionId, VertexId};
use crate::rational::{ChordDiagram, MarkKind};
use crate::skeleton::{AbstractSkeleton, Part};
use crate::surface::{
    BoundaryComponent, BoundaryItem, Edge, EmbeddedGraph, Locus, Region, Vertex, Walk,
};
use crate::typing::RegionLabelling;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{0}")]
    Structure(String),
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn parse_locus(line: usize, tok: &str) -> Result<Locus, ParseError> {
    if tok == "inner" {
        return Ok(Locus::Inner);
    }
    let parts: Vec<&str> = tok.split(':').collect();
    if parts.len() == 3 && parts[0] == "real" {
        let pos: usize = parts[2]
            .parse()
            .map_err(|_| syntax(line, format!("bad position in locus `{}`", tok)))?;
        return Ok(Locus::Real {
            bc: BoundaryId::new(parts[1]),
            pos,
        });
    }
    Err(syntax(line, format!("bad locus `{}`", tok)))
}

fn locus_str(l: &Locus) -> String {
    match l {
        Locus::Inner => "inner".to_string(),
        Locus::Real { bc, pos } => format!("real:{}:{}", bc, pos),
    }
}

struct Records {
    /// (line number, tokens)
    lines: Vec<(usize, Vec<String>)>,
}

fn tokenize(text: &str) -> Records {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let toks: Vec<String> = line.split_whitespace().map(|s| s.to_string()).collect();
        if !toks.is_empty() {
            lines.push((i + 1, toks));
        }
    }
    Records { lines }
}

fn parse_region_record(
    ln: usize,
    toks: &[String],
) -> Result<Region, ParseError> {
    // region <id> genus <g> [walk <darts...>]* [puncture <v>]*
    if toks.len() < 4 || toks[2] != "genus" {
        return Err(syntax(ln, "expected `region <id> genus <g> ...`"));
    }
    let id = RegionId::new(&toks[1]);
    let genus: usize = toks[3]
        .parse()
        .map_err(|_| syntax(ln, "bad genus"))?;
    let mut walks = Vec::new();
    let mut i = 4;
    while i < toks.len() {
        match toks[i].as_str() {
            "walk" => {
                let mut darts = Vec::new();
                i += 1;
                while i < toks.len() && toks[i] != "walk" && toks[i] != "puncture" {
                    darts.push(DartId::new(&toks[i]));
                    i += 1;
                }
                if darts.is_empty() {
                    return Err(syntax(ln, "empty walk"));
                }
                walks.push(Walk::Darts(darts));
            }
            "puncture" => {
                if i + 1 >= toks.len() {
                    return Err(syntax(ln, "puncture needs a vertex"));
                }
                walks.push(Walk::Puncture(VertexId::new(&toks[i + 1])));
                i += 2;
            }
            other => {
                return Err(syntax(ln, format!("unexpected token `{}`", other)));
            }
        }
    }
    Ok(Region { id, genus, walks })
}

/// Parses an embedded graph with optional decorations.
struct RawFile {
    graph: EmbeddedGraph,
    color: BTreeMap<EdgeId, EdgeColor>,
    kind: BTreeMap<VertexId, VertexKind>,
    dir: BTreeMap<EdgeId, String>,
    has_regions: bool,
}

fn parse_graph_records(text: &str) -> Result<RawFile, ParseError> {
    let recs = tokenize(text);
    let mut g = EmbeddedGraph::default();
    let mut color = BTreeMap::new();
    let mut kind = BTreeMap::new();
    let mut dir = BTreeMap::new();
    let mut has_regions = false;
    for (ln, toks) in &recs.lines {
        let ln = *ln;
        match toks[0].as_str() {
            "vertex" => {
                if toks.len() != 3 {
                    return Err(syntax(ln, "expected `vertex <id> <locus>`"));
                }
                let id = VertexId::new(&toks[1]);
                if g.vertices.contains_key(&id) {
                    return Err(syntax(ln, format!("duplicate vertex id `{}`", id)));
                }
                let locus = parse_locus(ln, &toks[2])?;
                g.vertices.insert(id.clone(), Vertex { id, locus });
            }
            "edge" => {
                if toks.len() != 7 || toks[4] != "side" {
                    return Err(syntax(
                        ln,
                        "expected `edge <id> <v1> <v2> side <dartA> <dartB>`",
                    ));
                }
                let id = EdgeId::new(&toks[1]);
                if g.edges.contains_key(&id) {
                    return Err(syntax(ln, format!("duplicate edge id `{}`", id)));
                }
                g.edges.insert(
                    id.clone(),
                    Edge {
                        id,
                        ends: (VertexId::new(&toks[2]), VertexId::new(&toks[3])),
                        darts: (DartId::new(&toks[5]), DartId::new(&toks[6])),
                    },
                );
            }
            "region" => {
                has_regions = true;
                let reg = parse_region_record(ln, toks)?;
                if g.regions.contains_key(&reg.id) {
                    return Err(syntax(ln, format!("duplicate region id `{}`", reg.id)));
                }
                g.regions.insert(reg.id.clone(), reg);
            }
            "boundary" => {
                if toks.len() < 2 {
                    return Err(syntax(ln, "expected `boundary <bc> <items...>`"));
                }
                let id = BoundaryId::new(&toks[1]);
                let mut items = Vec::new();
                for (j, t) in toks[2..].iter().enumerate() {
                    if j % 2 == 0 {
                        items.push(BoundaryItem::V(VertexId::new(t)));
                    } else {
                        items.push(BoundaryItem::E(EdgeId::new(t)));
                    }
                }
                g.boundary.push(BoundaryComponent { id, items });
            }
            "color" => {
                if toks.len() != 3 {
                    return Err(syntax(ln, "expected `color <edge> <color>`"));
                }
                let c = match toks[2].as_str() {
                    "solid" => EdgeColor::Solid,
                    "bold" => EdgeColor::Bold,
                    "dotted" => EdgeColor::Dotted,
                    other => return Err(syntax(ln, format!("bad color `{}`", other))),
                };
                color.insert(EdgeId::new(&toks[1]), c);
            }
            "kind" => {
                if toks.len() != 3 {
                    return Err(syntax(ln, "expected `kind <vertex> <kind>`"));
                }
                let k = match toks[2].as_str() {
                    "black" => VertexKind::Black,
                    "white" => VertexKind::White,
                    "cross" => VertexKind::Cross,
                    "mono" => VertexKind::Monochrome,
                    other => return Err(syntax(ln, format!("bad kind `{}`", other))),
                };
                kind.insert(VertexId::new(&toks[1]), k);
            }
            "dir" => {
                if toks.len() != 3 {
                    return Err(syntax(ln, "expected `dir <edge> <from>`"));
                }
                dir.insert(EdgeId::new(&toks[1]), toks[2].clone());
            }
            other => {
                return Err(syntax(ln, format!("unknown record `{}`", other)));
            }
        }
    }
    Ok(RawFile {
        graph: g,
        color,
        kind,
        dir,
        has_regions,
    })
}

/// Parses a plain embedded graph (regions required).
pub fn parse_graph(text: &str) -> Result<EmbeddedGraph, ParseError> {
    let raw = parse_graph_records(text)?;
    if !raw.has_regions {
        return Err(ParseError::Structure(
            "graph file needs region records".into(),
        ));
    }
    Ok(raw.graph)
}

/// Parses a dessin: graph records plus total color/kind/dir decorations.
pub fn parse_dessin(text: &str) -> Result<Dessin, ParseError> {
    let raw = parse_graph_records(text)?;
    if !raw.has_regions {
        return Err(ParseError::Structure(
            "dessin file needs region records".into(),
        ));
    }
    let mut dir = BTreeMap::new();
    for (e, from) in &raw.dir {
        let edge = raw
            .graph
            .edges
            .get(e)
            .ok_or_else(|| ParseError::Structure(format!("dir for unknown edge `{}`", e)))?;
        let from_v = VertexId::new(from.as_str());
        let d = if edge.ends.0 == from_v && edge.ends.1 == from_v {
            // loop: `from` must name a dart
            let d = DartId::new(from.as_str());
            if d != edge.darts.0 && d != edge.darts.1 {
                return Err(ParseError::Structure(format!(
                    "loop edge `{}` needs a dart in its dir record",
                    e
                )));
            }
            d
        } else if edge.ends.0 == from_v {
            edge.darts.0.clone()
        } else if edge.ends.1 == from_v {
            edge.darts.1.clone()
        } else {
            let d = DartId::new(from.as_str());
            if d == edge.darts.0 || d == edge.darts.1 {
                d
            } else {
                return Err(ParseError::Structure(format!(
                    "dir for edge `{}` names neither endpoint nor dart",
                    e
                )));
            }
        };
        dir.insert(e.clone(), d);
    }
    Ok(Dessin {
        graph: raw.graph,
        color: raw.color,
        kind: raw.kind,
        dir,
    })
}

pub fn write_graph(g: &EmbeddedGraph) -> String {
    let mut out = String::new();
    for v in g.vertices.values() {
        out.push_str(&format!("vertex {} {}\n", v.id, locus_str(&v.locus)));
    }
    for e in g.edges.values() {
        out.push_str(&format!(
            "edge {} {} {} side {} {}\n",
            e.id, e.ends.0, e.ends.1, e.darts.0, e.darts.1
        ));
    }
    for reg in g.regions.values() {
        out.push_str(&format!("region {} genus {}", reg.id, reg.genus));
        for w in &reg.walks {
            match w {
                Walk::Darts(ds) => {
                    out.push_str(" walk");
                    for d in ds {
                        out.push_str(&format!(" {}", d));
                    }
                }
                Walk::Puncture(v) => out.push_str(&format!(" puncture {}", v)),
            }
        }
        out.push('\n');
    }
    for b in &g.boundary {
        out.push_str(&format!("boundary {}", b.id));
        for item in &b.items {
            match item {
                BoundaryItem::V(v) => out.push_str(&format!(" {}", v)),
                BoundaryItem::E(e) => out.push_str(&format!(" {}", e)),
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_dessin(d: &Dessin) -> String {
    let mut out = write_graph(&d.graph);
    for (e, c) in &d.color {
        out.push_str(&format!("color {} {}\n", e, c.as_str()));
    }
    for (v, k) in &d.kind {
        out.push_str(&format!("kind {} {}\n", v, k.as_str()));
    }
    for (e, dart) in &d.dir {
        let edge = d.graph.edge(e);
        if edge.ends.0 == edge.ends.1 {
            out.push_str(&format!("dir {} {}\n", e, dart));
        } else {
            let from = if *dart == edge.darts.0 {
                &edge.ends.0
            } else {
                &edge.ends.1
            };
            out.push_str(&format!("dir {} {}\n", e, from));
        }
    }
    out
}

/// Parses an abstract skeleton.
pub fn parse_skeleton(text: &str) -> Result<AbstractSkeleton, ParseError> {
    let recs = tokenize(text);
    let mut vertices: Vec<(usize, VertexId, Locus, Part)> = Vec::new();
    let mut sedges: Vec<(usize, EdgeId, VertexId, VertexId, Option<String>)> = Vec::new();
    let mut regions: Vec<Region> = Vec::new();
    for (ln, toks) in &recs.lines {
        let ln = *ln;
        match toks[0].as_str() {
            "svertex" => {
                if toks.len() != 4 {
                    return Err(syntax(ln, "expected `svertex <id> <locus> <part>`"));
                }
                let part = match toks[3].as_str() {
                    "directed" => Part::Directed,
                    "undirected" => Part::Undirected,
                    other => return Err(syntax(ln, format!("bad part `{}`", other))),
                };
                vertices.push((ln, VertexId::new(&toks[1]), parse_locus(ln, &toks[2])?, part));
            }
            "sedge" => {
                if toks.len() != 4 && !(toks.len() == 6 && toks[4] == "dir") {
                    return Err(syntax(
                        ln,
                        "expected `sedge <id> <v1> <v2> [dir <from>]`",
                    ));
                }
                let dir = if toks.len() == 6 {
                    Some(toks[5].clone())
                } else {
                    None
                };
                sedges.push((
                    ln,
                    EdgeId::new(&toks[1]),
                    VertexId::new(&toks[2]),
                    VertexId::new(&toks[3]),
                    dir,
                ));
            }
            "region" => {
                regions.push(parse_region_record(ln, toks)?);
            }
            other => return Err(syntax(ln, format!("unknown record `{}`", other))),
        }
    }
    AbstractSkeleton::assemble(vertices, sedges, regions).map_err(ParseError::Structure)
}

pub fn write_skeleton(s: &AbstractSkeleton) -> String {
    let mut out = String::new();
    for v in s.graph.vertices.values() {
        out.push_str(&format!(
            "svertex {} {} {}\n",
            v.id,
            locus_str(&v.locus),
            match s.vertex_part[&v.id] {
                Part::Directed => "directed",
                Part::Undirected => "undirected",
            }
        ));
    }
    for e in s.graph.edges.values() {
        if s.is_arc(&e.id) {
            continue;
        }
        match s.dir.get(&e.id) {
            Some(d) => {
                let from = if *d == e.darts.0 { &e.ends.0 } else { &e.ends.1 };
                out.push_str(&format!(
                    "sedge {} {} {} dir {}\n",
                    e.id, e.ends.0, e.ends.1, from
                ));
            }
            None => out.push_str(&format!("sedge {} {} {}\n", e.id, e.ends.0, e.ends.1)),
        }
    }
    for reg in s.graph.regions.values() {
        out.push_str(&format!("region {} genus {}", reg.id, reg.genus));
        for w in &reg.walks {
            match w {
                Walk::Darts(ds) => {
                    out.push_str(" walk");
                    for d in ds {
                        out.push_str(&format!(" {}", d));
                    }
                }
                Walk::Puncture(v) => out.push_str(&format!(" puncture {}", v)),
            }
        }
        out.push('\n');
    }
    out
}

/// Parses a chord diagram.
pub fn parse_diagram(text: &str) -> Result<ChordDiagram, ParseError> {
    let recs = tokenize(text);
    let mut points = Vec::new();
    let mut chords = Vec::new();
    for (ln, toks) in &recs.lines {
        let ln = *ln;
        match toks[0].as_str() {
            "point" => {
                if toks.len() != 3 {
                    return Err(syntax(ln, "expected `point <pos> <kind>`"));
                }
                let pos: usize = toks[1].parse().map_err(|_| syntax(ln, "bad position"))?;
                let kind = match toks[2].as_str() {
                    "source" => MarkKind::Source,
                    "sink" => MarkKind::Sink,
                    "undirected" => MarkKind::Undirected,
                    "zigzag" => MarkKind::Zigzag,
                    other => return Err(syntax(ln, format!("bad point kind `{}`", other))),
                };
                points.push((pos, kind));
            }
            "chord" => {
                if toks.len() != 3 && !(toks.len() == 5 && toks[3] == "dir") {
                    return Err(syntax(ln, "expected `chord <a> <b> [dir <from>]`"));
                }
                let a: usize = toks[1].parse().map_err(|_| syntax(ln, "bad position"))?;
                let b: usize = toks[2].parse().map_err(|_| syntax(ln, "bad position"))?;
                let dir = if toks.len() == 5 {
                    Some(
                        toks[4]
                            .parse::<usize>()
                            .map_err(|_| syntax(ln, "bad position"))?,
                    )
                } else {
                    None
                };
                chords.push((a, b, dir));
            }
            other => return Err(syntax(ln, format!("unknown record `{}`", other))),
        }
    }
    ChordDiagram::assemble(points, chords).map_err(ParseError::Structure)
}

pub fn write_diagram(c: &ChordDiagram) -> String {
    let mut out = String::new();
    for (pos, kind) in c.points() {
        out.push_str(&format!("point {} {}\n", pos, kind.as_str()));
    }
    for ch in c.chords() {
        match ch.dir_from {
            Some(from) => out.push_str(&format!("chord {} {} dir {}\n", ch.a, ch.b, from)),
            None => out.push_str(&format!("chord {} {}\n", ch.a, ch.b)),
        }
    }
    out
}

/// Parses a labelling file: `label <region> 1|2|3`.
pub fn parse_labelling(text: &str) -> Result<RegionLabelling, ParseError> {
    let recs = tokenize(text);
    let mut map = BTreeMap::new();
    for (ln, toks) in &recs.lines {
        let ln = *ln;
        if toks[0] != "label" || toks.len() != 3 {
            return Err(syntax(ln, "expected `label <region> 1|2|3`"));
        }
        let lab: u8 = toks[2].parse().map_err(|_| syntax(ln, "bad label"))?;
        if !(1..=3).contains(&lab) {
            return Err(syntax(ln, "label must be 1, 2 or 3"));
        }
        map.insert(RegionId::new(&toks[1]), lab);
    }
    Ok(RegionLabelling { label: map })
}

pub fn write_labelling(l: &RegionLabelling) -> String {
    let mut out = String::new();
    for (r, lab) in &l.label {
        out.push_str(&format!("label {} {}\n", r, lab));
    }
    out
}
