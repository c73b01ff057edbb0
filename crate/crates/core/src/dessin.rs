//! Dessins: trichotomic decorations of embedded graphs.
//!
//! A trichotomic graph colors every edge solid/bold/dotted, sorts vertices
//! into black/white/cross/monochrome, and orients every edge so that the
//! edge directions orient the boundary of the cut surface. A dessin is a
//! trichotomic graph with the generic valencies (2/4/6 full valency for
//! cross/white/black, real monochrome valency 3, no inner monochrome
//! vertices) and no oriented monochrome cycles.

use std::collections::{BTreeMap, BTreeSet};

use crate::ids::{BoundaryId, DartId, EdgeId, VertexId};
use crate::report::ValidationReport;
use crate::surface::{region_sign, validate_embedding, BoundaryItem, EmbeddedGraph, Locus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeColor {
    Solid,
    Bold,
    Dotted,
}

impl EdgeColor {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeColor::Solid => "solid",
            EdgeColor::Bold => "bold",
            EdgeColor::Dotted => "dotted",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum VertexKind {
    Black,
    White,
    Cross,
    Monochrome,
}

impl VertexKind {
    pub fn is_essential(self) -> bool {
        self != VertexKind::Monochrome
    }
    pub fn as_str(self) -> &'static str {
        match self {
            VertexKind::Black => "black",
            VertexKind::White => "white",
            VertexKind::Cross => "cross",
            VertexKind::Monochrome => "mono",
        }
    }
}

/// A decorated embedded graph. `dir` maps each edge to its forward dart.
#[derive(Debug, Clone)]
pub struct Dessin {
    pub graph: EmbeddedGraph,
    pub color: BTreeMap<EdgeId, EdgeColor>,
    pub kind: BTreeMap<VertexId, VertexKind>,
    pub dir: BTreeMap<EdgeId, DartId>,
}

impl Dessin {
    pub fn color_of(&self, e: &EdgeId) -> EdgeColor {
        self.color[e]
    }
    pub fn kind_of(&self, v: &VertexId) -> VertexKind {
        self.kind[v]
    }

    /// Source vertex of an edge under its orientation.
    pub fn source_of(&self, e: &EdgeId) -> VertexId {
        let edge = self.graph.edge(e);
        if self.dir[e] == edge.darts.0 {
            edge.ends.0.clone()
        } else {
            edge.ends.1.clone()
        }
    }

    pub fn target_of(&self, e: &EdgeId) -> VertexId {
        let edge = self.graph.edge(e);
        if self.dir[e] == edge.darts.0 {
            edge.ends.1.clone()
        } else {
            edge.ends.0.clone()
        }
    }

    /// True if the edge is directed into `v` at this endpoint slot.
    /// For loops both hold; callers that care use darts instead.
    pub fn directed_into(&self, e: &EdgeId, v: &VertexId) -> bool {
        self.target_of(e) == *v
    }

    /// Whether decoration maps are total over the graph.
    fn check_decoration_totality(&self, r: &mut ValidationReport) {
        for e in self.graph.edges.keys() {
            if !self.color.contains_key(e) {
                r.push("deco-color", vec![e.0.clone()], "edge has no color");
            }
            if !self.dir.contains_key(e) {
                r.push("deco-dir", vec![e.0.clone()], "edge has no orientation");
            } else {
                let d = &self.dir[e];
                let edge = self.graph.edge(e);
                if *d != edge.darts.0 && *d != edge.darts.1 {
                    r.push(
                        "deco-dir",
                        vec![e.0.clone(), d.0.clone()],
                        "orientation dart does not belong to the edge",
                    );
                }
            }
        }
        for v in self.graph.vertices.keys() {
            if !self.kind.contains_key(v) {
                r.push("deco-kind", vec![v.0.clone()], "vertex has no kind");
            }
        }
        for e in self.color.keys() {
            if !self.graph.edges.contains_key(e) {
                r.push("deco-color", vec![e.0.clone()], "color for unknown edge");
            }
        }
        for v in self.kind.keys() {
            if !self.graph.vertices.contains_key(v) {
                r.push("deco-kind", vec![v.0.clone()], "kind for unknown vertex");
            }
        }
    }

    /// Edges incident to `v` with multiplicity (loops twice), as darts out of `v`.
    pub fn out_darts(&self, v: &VertexId) -> Vec<DartId> {
        let mut out = Vec::new();
        for e in self.graph.edges.values() {
            if e.ends.0 == *v {
                out.push(e.darts.0.clone());
            }
            if e.ends.1 == *v {
                out.push(e.darts.1.clone());
            }
        }
        out.sort();
        out
    }
}

/// Axioms (1)-(8) of trichotomic graphs.
pub fn validate_trichotomic(d: &Dessin) -> ValidationReport {
    let mut r = validate_embedding(&d.graph);
    d.check_decoration_totality(&mut r);
    if !r.is_empty() {
        return r;
    }
    let g = &d.graph;
    let idx = g.index();

    // (1) boundary covered by edges: the alternating encoding guarantees
    // coverage whenever every boundary component is nonempty; an isolated
    // real vertex (no boundary edges around it) breaks coverage.
    for b in &g.boundary {
        if b.items.len() == 1 {
            r.push(
                "tg1-coverage",
                vec![b.id.0.clone()],
                "boundary component has a vertex but no covering edges",
            );
        }
    }

    // (2) valency bounds.
    for v in g.vertices.values() {
        let val = g.valency(&v.id);
        match d.kind_of(&v.id) {
            VertexKind::Monochrome => {
                if val < 3 {
                    r.push(
                        "tg2-valency",
                        vec![v.id.0.clone()],
                        format!("monochrome vertex has valency {}, needs >= 3", val),
                    );
                }
            }
            _ => {
                if val < 2 {
                    r.push(
                        "tg2-valency",
                        vec![v.id.0.clone()],
                        format!("essential vertex has valency {}, needs >= 2", val),
                    );
                }
            }
        }
    }

    // (3) edge orientations orient the boundary of the cut and extend to it:
    // per region, every walk dart agrees with the edge direction or every
    // walk dart opposes it.
    let forward = |e: &EdgeId| d.dir.get(e).cloned();
    for reg in g.regions.keys() {
        if region_sign(g, &idx, reg, &forward).is_none() {
            r.push(
                "tg3-orientation",
                vec![reg.0.clone()],
                "edge directions are incoherent along the region boundary",
            );
        }
    }

    // (4) monochrome purity.
    for v in g.vertices.values() {
        if d.kind_of(&v.id) == VertexKind::Monochrome {
            let colors: BTreeSet<EdgeColor> = d
                .out_darts(&v.id)
                .iter()
                .map(|dart| d.color_of(idx.edge_of(dart)))
                .collect();
            if colors.len() > 1 {
                r.push(
                    "tg4-monochrome",
                    vec![v.id.0.clone()],
                    "monochrome vertex with edges of different kinds",
                );
            }
        }
    }

    // (5)-(7) incidence rules; the lists are complete.
    for v in g.vertices.values() {
        let kind = d.kind_of(&v.id);
        if kind == VertexKind::Monochrome {
            continue;
        }
        for dart in d.out_darts(&v.id) {
            let e = idx.edge_of(&dart);
            let color = d.color_of(e);
            // incoming at v means the forward dart is the reverse of `dart`
            let incoming = d.dir[e] == idx.rev(&dart);
            let ok = match kind {
                VertexKind::Cross => {
                    (color == EdgeColor::Dotted && incoming)
                        || (color == EdgeColor::Solid && !incoming)
                }
                VertexKind::Black => {
                    (color == EdgeColor::Solid && incoming)
                        || (color == EdgeColor::Bold && !incoming)
                }
                VertexKind::White => {
                    (color == EdgeColor::Bold && incoming)
                        || (color == EdgeColor::Dotted && !incoming)
                }
                VertexKind::Monochrome => unreachable!(),
            };
            if !ok {
                let code = match kind {
                    VertexKind::Cross => "tg5-cross",
                    VertexKind::Black => "tg6-black",
                    VertexKind::White => "tg7-white",
                    VertexKind::Monochrome => unreachable!(),
                };
                r.push(
                    code,
                    vec![v.id.0.clone(), e.0.clone()],
                    format!(
                        "{} vertex cannot carry {} {} edge",
                        kind.as_str(),
                        if incoming { "incoming" } else { "outgoing" },
                        color.as_str()
                    ),
                );
            }
        }
    }

    // (8) triangles are disks.
    for reg in g.regions.values() {
        let mut essential: BTreeSet<&VertexId> = BTreeSet::new();
        for w in &reg.walks {
            if let crate::surface::Walk::Darts(ds) = w {
                for dart in ds {
                    let v = idx.head(dart);
                    if d.kind_of(v).is_essential() {
                        essential.insert(v);
                    }
                }
            }
        }
        if essential.len() == 3 && (reg.genus != 0 || reg.walks.len() != 1) {
            r.push(
                "tg8-triangle",
                vec![reg.id.0.clone()],
                "triangle region is not a topological disk",
            );
        }
    }

    r
}

/// Generic dessin conditions on top of the trichotomic axioms.
pub fn validate_dessin(d: &Dessin) -> ValidationReport {
    let mut r = validate_trichotomic(d);
    if !r.is_empty() {
        return r;
    }
    let g = &d.graph;

    // (1) full valencies 2/4/6.
    for v in g.vertices.values() {
        let fv = crate::surface::full_valency(g, &v.id).unwrap();
        let expected = match d.kind_of(&v.id) {
            VertexKind::Cross => Some(2),
            VertexKind::White => Some(4),
            VertexKind::Black => Some(6),
            VertexKind::Monochrome => None,
        };
        if let Some(exp) = expected {
            if fv != exp {
                r.push(
                    "ds1-full-valency",
                    vec![v.id.0.clone()],
                    format!(
                        "{} vertex has full valency {}, expected {}",
                        d.kind_of(&v.id).as_str(),
                        fv,
                        exp
                    ),
                );
            }
        }
    }

    // (2) real monochrome valency 3, (3) no inner monochrome vertices.
    for v in g.vertices.values() {
        if d.kind_of(&v.id) == VertexKind::Monochrome {
            match v.locus {
                Locus::Real { .. } => {
                    let val = g.valency(&v.id);
                    if val != 3 {
                        r.push(
                            "ds2-monochrome-valency",
                            vec![v.id.0.clone()],
                            format!("real monochrome vertex has valency {}, expected 3", val),
                        );
                    }
                }
                Locus::Inner => {
                    r.push(
                        "ds3-inner-monochrome",
                        vec![v.id.0.clone()],
                        "inner monochrome vertex",
                    );
                }
            }
        }
    }

    // (4) no oriented monochrome cycles.
    for cycle in oriented_monochrome_cycles(d) {
        r.push(
            "ds4-monochrome-cycle",
            cycle.iter().map(|e| e.0.clone()).collect(),
            "oriented monochrome cycle",
        );
    }

    r
}

/// Directed cycles through monochrome vertices only, as edge lists.
pub fn oriented_monochrome_cycles(d: &Dessin) -> Vec<Vec<EdgeId>> {
    let mono: BTreeSet<&VertexId> = d
        .kind
        .iter()
        .filter(|(_, k)| **k == VertexKind::Monochrome)
        .map(|(v, _)| v)
        .collect();
    // adjacency: monochrome vertex -> (edge, target) for edges whose both
    // ends are monochrome, following the edge direction
    let mut self_loops = Vec::new();
    let mut adj: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> = BTreeMap::new();
    for e in d.graph.edges.values() {
        if mono.contains(&e.ends.0) && mono.contains(&e.ends.1) {
            let src = d.source_of(&e.id);
            let tgt = d.target_of(&e.id);
            if src == tgt {
                self_loops.push(vec![e.id.clone()]);
            } else {
                adj.entry(src).or_default().push((e.id.clone(), tgt));
            }
        }
    }
    for v in adj.values_mut() {
        v.sort();
    }
    let mut cycles = self_loops;
    // DFS cycle detection, reporting one minimal cycle per back edge
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Gray,
        Black,
    }
    let mut mark: BTreeMap<VertexId, Mark> = adj.keys().map(|v| (v.clone(), Mark::White)).collect();
    fn dfs(
        v: &VertexId,
        adj: &BTreeMap<VertexId, Vec<(EdgeId, VertexId)>>,
        mark: &mut BTreeMap<VertexId, Mark>,
        stack: &mut Vec<(VertexId, EdgeId)>,
        cycles: &mut Vec<Vec<EdgeId>>,
    ) {
        mark.insert(v.clone(), Mark::Gray);
        if let Some(outs) = adj.get(v) {
            for (e, w) in outs {
                match mark.get(w).copied().unwrap_or(Mark::White) {
                    Mark::Gray => {
                        // unwind stack to w
                        let mut cyc = vec![e.clone()];
                        for (sv, se) in stack.iter().rev() {
                            cyc.push(se.clone());
                            if sv == w {
                                break;
                            }
                        }
                        cyc.reverse();
                        cycles.push(cyc);
                    }
                    Mark::White => {
                        stack.push((v.clone(), e.clone()));
                        dfs(w, adj, mark, stack, cycles);
                        stack.pop();
                    }
                    Mark::Black => {}
                }
            }
        }
        mark.insert(v.clone(), Mark::Black);
    }
    let verts: Vec<VertexId> = adj.keys().cloned().collect();
    for v in verts {
        if mark.get(&v).copied().unwrap_or(Mark::White) == Mark::White {
            let mut stack = Vec::new();
            dfs(&v, &adj, &mut mark, &mut stack, &mut cycles);
        }
    }
    cycles
}

/// A maximal same-color run of real edges along a boundary component.
#[derive(Debug, Clone)]
pub struct Segment {
    pub bc: BoundaryId,
    pub color: EdgeColor,
    /// Bounding vertices (equal for a full circle; None for hyperbolic).
    pub ends: Option<(VertexId, VertexId)>,
    pub edges: Vec<EdgeId>,
    /// Vertices strictly inside the run, in order.
    pub interior: Vec<VertexId>,
}

impl Segment {
    pub fn white_count(&self, d: &Dessin) -> usize {
        self.interior
            .iter()
            .filter(|v| d.kind_of(v) == VertexKind::White)
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PillarKind {
    Oval,
    Zigzag,
    Jump,
    Hyperbolic,
}

impl PillarKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PillarKind::Oval => "oval",
            PillarKind::Zigzag => "zigzag",
            PillarKind::Jump => "jump",
            PillarKind::Hyperbolic => "hyperbolic",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Pillar {
    pub kind: PillarKind,
    pub bc: BoundaryId,
    /// Index of the pillar along its component, in boundary order.
    pub index: usize,
    /// Vertices of the support (bounding crosses/blacks included).
    pub support_vertices: Vec<VertexId>,
    pub support_edges: Vec<EdgeId>,
    /// White vertices inside the support.
    pub whites: usize,
}

/// Per-boundary-component analysis.
#[derive(Debug, Clone)]
pub struct ComponentReport {
    pub bc: BoundaryId,
    pub even: bool,
    pub hyperbolic: bool,
    pub anti_hyperbolic: bool,
    pub dotted_segments: Vec<Segment>,
    pub bold_segments: Vec<Segment>,
    pub pillars: Vec<Pillar>,
    /// Maximal bold segments that do not match the jump pattern.
    pub unclassified_bold: Vec<usize>,
}

/// Splits one boundary component into maximal same-color runs.
fn color_runs(d: &Dessin, bc: &crate::surface::BoundaryComponent) -> Vec<Segment> {
    let items = &bc.items;
    let n = items.len();
    if n == 0 {
        return Vec::new();
    }
    let edge_at = |i: usize| -> &EdgeId {
        match &items[(2 * i + 1) % n] {
            BoundaryItem::E(e) => e,
            _ => unreachable!(),
        }
    };
    let vertex_at = |i: usize| -> &VertexId {
        match &items[(2 * i) % n] {
            BoundaryItem::V(v) => v,
            _ => unreachable!(),
        }
    };
    let k = n / 2; // number of edges = number of vertices
    let colors: Vec<EdgeColor> = (0..k).map(|i| d.color_of(edge_at(i))).collect();
    if colors.iter().all(|c| *c == colors[0]) {
        // one full circle
        return vec![Segment {
            bc: bc.id.clone(),
            color: colors[0],
            ends: None,
            edges: (0..k).map(|i| edge_at(i).clone()).collect(),
            interior: (0..k).map(|i| vertex_at(i).clone()).collect(),
        }];
    }
    // find run starts: edge i starts a run if color differs from edge i-1
    let mut segments = Vec::new();
    for i in 0..k {
        if colors[i] != colors[(i + k - 1) % k] {
            // run starting at edge i
            let mut edges = vec![edge_at(i).clone()];
            let mut interior = Vec::new();
            let mut j = i;
            while colors[(j + 1) % k] == colors[i] {
                j = (j + 1) % k;
                interior.push(vertex_at(j).clone());
                edges.push(edge_at(j).clone());
            }
            let start_v = vertex_at(i).clone();
            let end_v = vertex_at((j + 1) % k).clone();
            segments.push(Segment {
                bc: bc.id.clone(),
                color: colors[i],
                ends: Some((start_v, end_v)),
                edges,
                interior,
            });
        }
    }
    segments
}

/// analyze_real_components: parities, hyperbolic flags, segments, pillars.
pub fn analyze_real_components(d: &Dessin) -> Vec<ComponentReport> {
    let mut out = Vec::new();
    for bc in &d.graph.boundary {
        let whites_on_bc = bc
            .vertices()
            .iter()
            .filter(|v| d.kind_of(v) == VertexKind::White)
            .count();
        let colors: BTreeSet<EdgeColor> =
            bc.edges().iter().map(|e| d.color_of(e)).collect();
        let hyperbolic = !colors.is_empty() && colors.iter().all(|c| *c == EdgeColor::Dotted);
        let anti_hyperbolic = !colors.contains(&EdgeColor::Dotted);
        let runs = color_runs(d, bc);
        let dotted_segments: Vec<Segment> = runs
            .iter()
            .filter(|s| s.color == EdgeColor::Dotted && s.ends.is_some())
            .cloned()
            .collect();
        let bold_segments: Vec<Segment> = runs
            .iter()
            .filter(|s| s.color == EdgeColor::Bold && s.ends.is_some())
            .cloned()
            .collect();

        let mut pillars = Vec::new();
        let mut unclassified_bold = Vec::new();
        if hyperbolic {
            pillars.push(Pillar {
                kind: PillarKind::Hyperbolic,
                bc: bc.id.clone(),
                index: 0,
                support_vertices: bc.vertices().into_iter().cloned().collect(),
                support_edges: bc.edges().into_iter().cloned().collect(),
                whites: whites_on_bc,
            });
        } else {
            // pillars in boundary order: walk runs in order of appearance
            let mut index = 0;
            for s in &runs {
                match s.color {
                    EdgeColor::Dotted => {
                        let whites = s.white_count(d);
                        let kind = if whites % 2 == 0 {
                            PillarKind::Oval
                        } else {
                            PillarKind::Zigzag
                        };
                        let mut verts = Vec::new();
                        if let Some((a, b)) = &s.ends {
                            verts.push(a.clone());
                            verts.extend(s.interior.iter().cloned());
                            verts.push(b.clone());
                        }
                        pillars.push(Pillar {
                            kind,
                            bc: bc.id.clone(),
                            index,
                            support_vertices: verts,
                            support_edges: s.edges.clone(),
                            whites,
                        });
                        index += 1;
                    }
                    EdgeColor::Bold => {
                        let whites = s.white_count(d);
                        let jumpish = whites == 1
                            && s.ends.as_ref().map_or(false, |(a, b)| {
                                d.kind_of(a) == VertexKind::Black
                                    && d.kind_of(b) == VertexKind::Black
                            })
                            && s.interior.iter().all(|v| {
                                matches!(
                                    d.kind_of(v),
                                    VertexKind::White | VertexKind::Monochrome
                                )
                            });
                        if jumpish {
                            let mut verts = Vec::new();
                            if let Some((a, b)) = &s.ends {
                                verts.push(a.clone());
                                verts.extend(s.interior.iter().cloned());
                                verts.push(b.clone());
                            }
                            pillars.push(Pillar {
                                kind: PillarKind::Jump,
                                bc: bc.id.clone(),
                                index,
                                support_vertices: verts,
                                support_edges: s.edges.clone(),
                                whites,
                            });
                        } else {
                            unclassified_bold.push(index);
                            let mut verts = Vec::new();
                            if let Some((a, b)) = &s.ends {
                                verts.push(a.clone());
                                verts.extend(s.interior.iter().cloned());
                                verts.push(b.clone());
                            }
                            // still recorded as a pillar slot so that the
                            // alternation check sees the full sequence
                            pillars.push(Pillar {
                                kind: PillarKind::Jump,
                                bc: bc.id.clone(),
                                index,
                                support_vertices: verts,
                                support_edges: s.edges.clone(),
                                whites,
                            });
                        }
                        index += 1;
                    }
                    EdgeColor::Solid => {}
                }
            }
        }
        out.push(ComponentReport {
            bc: bc.id.clone(),
            even: whites_on_bc % 2 == 0,
            hyperbolic,
            anti_hyperbolic,
            dotted_segments,
            bold_segments,
            pillars,
            unclassified_bold,
        });
    }
    out
}

/// True when all real components are hyperbolic.
pub fn is_hyperbolic_dessin(d: &Dessin) -> bool {
    let reports = analyze_real_components(d);
    !reports.is_empty() && reports.iter().all(|c| c.hyperbolic)
}

/// Number of white vertices of the orientation double.
pub fn degree(d: &Dessin) -> Result<usize, String> {
    let mut deg = 0;
    for v in d.graph.vertices.values() {
        if d.kind_of(&v.id) == VertexKind::White {
            deg += if v.locus.is_real() { 1 } else { 2 };
        }
    }
    if deg % 3 != 0 {
        return Err(format!("degree {} is not divisible by 3", deg));
    }
    Ok(deg)
}

/// All cross-vertices real.
pub fn is_unramified(d: &Dessin) -> bool {
    d.graph.vertices.values().all(|v| {
        d.kind_of(&v.id) != VertexKind::Cross || v.locus.is_real()
    })
}

/// A point of the boundary, for fiber queries.
#[derive(Debug, Clone)]
pub enum BoundaryPoint {
    Vertex(VertexId),
    EdgeInterior(EdgeId),
}

/// Number of real curve points over a boundary point: 3 over dotted
/// points and over white vertices with two real dotted edges, 2 over
/// cross-vertices, 1 otherwise.
pub fn real_fiber_points(d: &Dessin, p: &BoundaryPoint) -> Option<u8> {
    match p {
        BoundaryPoint::EdgeInterior(e) => {
            if !d.graph.is_real_edge(e) {
                return None;
            }
            Some(if d.color_of(e) == EdgeColor::Dotted { 3 } else { 1 })
        }
        BoundaryPoint::Vertex(v) => {
            let vert = d.graph.vertices.get(v)?;
            if !vert.locus.is_real() {
                return None;
            }
            Some(match d.kind_of(v) {
                VertexKind::Cross => 2,
                VertexKind::White | VertexKind::Monochrome => {
                    let idx = d.graph.index();
                    let (din, dout) = idx.boundary_darts.get(v)?.clone();
                    let cin = d.color_of(idx.edge_of(&din));
                    let cout = d.color_of(idx.edge_of(&dout));
                    if cin == EdgeColor::Dotted && cout == EdgeColor::Dotted {
                        3
                    } else {
                        1
                    }
                }
                VertexKind::Black => 1,
            })
        }
    }
}

/// Feature of a real scheme, in boundary order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeFeature {
    Oval { whites: usize },
    Zigzag { whites: usize },
    Jump,
    Hyperbolic { whites: usize },
}

#[derive(Debug, Clone)]
pub struct ComponentScheme {
    pub bc: BoundaryId,
    pub features: Vec<SchemeFeature>,
    /// The corresponding component of the ruled surface is orientable
    /// iff the component is even.
    pub orientable: bool,
}

#[derive(Debug, Clone)]
pub struct RealScheme {
    pub components: Vec<ComponentScheme>,
}

/// real_scheme: cyclic feature lists plus orientability flags.
pub fn real_scheme(d: &Dessin) -> RealScheme {
    let reports = analyze_real_components(d);
    let components = reports
        .iter()
        .map(|c| ComponentScheme {
            bc: c.bc.clone(),
            features: c
                .pillars
                .iter()
                .map(|p| match p.kind {
                    PillarKind::Oval => SchemeFeature::Oval { whites: p.whites },
                    PillarKind::Zigzag => SchemeFeature::Zigzag { whites: p.whites },
                    PillarKind::Jump => SchemeFeature::Jump,
                    PillarKind::Hyperbolic => SchemeFeature::Hyperbolic { whites: p.whites },
                })
                .collect(),
            orientable: c.even,
        })
        .collect();
    RealScheme { components }
}
