//! Abstract skeletons: partially directed graphs embedded in a bordered
//! surface, the reduced classifying objects of unramified type-I dessins.
//!
//! The underlying carrier is an [`EmbeddedGraph`] in which the boundary
//! arcs between consecutive real vertices are materialized as edges named
//! `arc:<bc>:<i>`; skeleton edges proper are the non-boundary edges.

mod extend;
mod extract;
mod orient;

pub use extend::{extend_to_dessin, ExtendError};
pub use extract::{extract_skeleton, ExtractError};
pub use orient::{
    admissible_orientation, all_admissible_orientations, bfs_inversion_path, classify_edges,
    inversion_path, is_admissible, AdmissibleOrientation, EdgeClass, OrientError,
};

/// Part of a skeleton edge, from its endpoints.
pub fn edge_part(s: &AbstractSkeleton, e: &crate::ids::EdgeId) -> Option<Part> {
    let ends = &s.graph.edges.get(e)?.ends;
    s.vertex_part.get(&ends.0).copied()
}

use std::collections::{BTreeMap, BTreeSet};

use crate::ids::{BoundaryId, DartId, EdgeId, VertexId};
use crate::report::ValidationReport;
use crate::surface::{
    validate_embedding, BoundaryComponent, BoundaryItem, Edge, EmbeddedGraph, Locus, Region,
    Vertex, Walk,
};

/// Component kind of a skeleton vertex or edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Part {
    Directed,
    Undirected,
}

#[derive(Debug, Clone)]
pub struct AbstractSkeleton {
    pub graph: EmbeddedGraph,
    pub vertex_part: BTreeMap<VertexId, Part>,
    /// Forward dart of each directed skeleton edge.
    pub dir: BTreeMap<EdgeId, DartId>,
}

pub fn arc_edge_id(bc: &BoundaryId, i: usize) -> EdgeId {
    EdgeId::new(format!("arc:{}:{}", bc, i))
}
pub fn arc_dart_ids(bc: &BoundaryId, i: usize) -> (DartId, DartId) {
    (
        DartId::new(format!("arc:{}:{}:+", bc, i)),
        DartId::new(format!("arc:{}:{}:-", bc, i)),
    )
}

impl AbstractSkeleton {
    /// True if the edge is a boundary arc rather than a skeleton edge.
    pub fn is_arc(&self, e: &EdgeId) -> bool {
        e.0.starts_with("arc:")
    }

    /// Skeleton edges (non-arc), sorted.
    pub fn skeleton_edges(&self) -> Vec<EdgeId> {
        self.graph
            .edges
            .keys()
            .filter(|e| !self.is_arc(e))
            .cloned()
            .collect()
    }

    /// Chord valency of a vertex (arc edges excluded, loops twice).
    pub fn chord_valency(&self, v: &VertexId) -> usize {
        self.graph
            .edges
            .values()
            .filter(|e| !self.is_arc(&e.id))
            .map(|e| (e.ends.0 == *v) as usize + (e.ends.1 == *v) as usize)
            .sum()
    }

    /// Rotation of chord out-darts at a vertex: cyclic for inner vertices,
    /// linear (boundary to boundary) for real ones.
    pub fn chord_rotation(&self, v: &VertexId) -> Option<Vec<DartId>> {
        let idx = self.graph.index();
        let cyc = if self.graph.vertices.get(v)?.locus.is_real() {
            idx.linear_rotation(v)?
        } else {
            idx.rotation_cycle(v)?
        };
        Some(
            cyc.into_iter()
                .filter(|d| !self.is_arc(idx.edge_of(d)))
                .collect(),
        )
    }

    /// Pairs of rotation-adjacent chord out-darts at `v`. For inner
    /// vertices the list is cyclic (including the wrap pair); for real
    /// vertices only consecutive pairs of the linear order appear.
    /// A monovalent inner vertex yields the self-pair.
    pub fn adjacent_chord_pairs(&self, v: &VertexId) -> Vec<(DartId, DartId)> {
        let rot = match self.chord_rotation(v) {
            Some(r) => r,
            None => return Vec::new(),
        };
        let n = rot.len();
        if n == 0 {
            return Vec::new();
        }
        let inner = !self.graph.vertices[v].locus.is_real();
        let mut pairs = Vec::new();
        if inner {
            if n == 1 {
                pairs.push((rot[0].clone(), rot[0].clone()));
            } else {
                for i in 0..n {
                    pairs.push((rot[i].clone(), rot[(i + 1) % n].clone()));
                }
            }
        } else {
            for i in 0..n.saturating_sub(1) {
                pairs.push((rot[i].clone(), rot[i + 1].clone()));
            }
        }
        pairs
    }

    /// Immediate-neighbor successors of a dart: darts `g` out of `head(d)`
    /// whose edges are rotation-adjacent to `edge(d)` there.
    pub fn first_neighbor_successors(&self, d: &DartId) -> Vec<DartId> {
        let idx = self.graph.index();
        let v = idx.head(d).clone();
        let rot = match self.chord_rotation(&v) {
            Some(r) => r,
            None => return Vec::new(),
        };
        let rev = idx.rev(d);
        let pos = match rot.iter().position(|x| *x == rev) {
            Some(p) => p,
            None => return Vec::new(),
        };
        let n = rot.len();
        let inner = !self.graph.vertices[&v].locus.is_real();
        let mut succ = Vec::new();
        if inner {
            if n == 1 {
                succ.push(rot[0].clone());
            } else {
                succ.push(rot[(pos + 1) % n].clone());
                succ.push(rot[(pos + n - 1) % n].clone());
            }
        } else {
            if pos + 1 < n {
                succ.push(rot[pos + 1].clone());
            }
            if pos > 0 {
                succ.push(rot[pos - 1].clone());
            }
        }
        succ.sort();
        succ.dedup();
        succ
    }

    /// Assembles a skeleton from parsed records, materializing boundary
    /// arcs and deriving regions when absent (single-boundary disk case).
    pub fn assemble(
        vertices: Vec<(usize, VertexId, Locus, Part)>,
        sedges: Vec<(usize, EdgeId, VertexId, VertexId, Option<String>)>,
        regions: Vec<Region>,
    ) -> Result<AbstractSkeleton, String> {
        let mut g = EmbeddedGraph::default();
        let mut vertex_part = BTreeMap::new();
        for (_, id, locus, part) in &vertices {
            if g.vertices.contains_key(id) {
                return Err(format!("duplicate vertex `{}`", id));
            }
            g.vertices.insert(
                id.clone(),
                Vertex {
                    id: id.clone(),
                    locus: locus.clone(),
                },
            );
            vertex_part.insert(id.clone(), *part);
        }
        // boundary components from loci
        let mut by_bc: BTreeMap<BoundaryId, Vec<(usize, VertexId)>> = BTreeMap::new();
        for v in g.vertices.values() {
            if let Locus::Real { bc, pos } = &v.locus {
                by_bc.entry(bc.clone()).or_default().push((*pos, v.id.clone()));
            }
        }
        for (bc, mut vs) in by_bc {
            vs.sort();
            for (i, (pos, _)) in vs.iter().enumerate() {
                if *pos != i {
                    return Err(format!(
                        "positions on boundary `{}` are not 0..{}",
                        bc,
                        vs.len() - 1
                    ));
                }
            }
            let k = vs.len();
            let mut items = Vec::new();
            for (i, (_, v)) in vs.iter().enumerate() {
                let aid = arc_edge_id(&bc, i);
                let (dp, dm) = arc_dart_ids(&bc, i);
                let to = vs[(i + 1) % k].1.clone();
                g.edges.insert(
                    aid.clone(),
                    Edge {
                        id: aid.clone(),
                        ends: (v.clone(), to),
                        darts: (dp, dm),
                    },
                );
                items.push(BoundaryItem::V(v.clone()));
                items.push(BoundaryItem::E(aid));
            }
            g.boundary.push(BoundaryComponent {
                id: bc.clone(),
                items,
            });
        }
        let mut dir = BTreeMap::new();
        for (_, id, v1, v2, dirv) in &sedges {
            if g.edges.contains_key(id) {
                return Err(format!("duplicate edge `{}`", id));
            }
            let darts = (
                DartId::new(format!("{}:+", id)),
                DartId::new(format!("{}:-", id)),
            );
            g.edges.insert(
                id.clone(),
                Edge {
                    id: id.clone(),
                    ends: (v1.clone(), v2.clone()),
                    darts: darts.clone(),
                },
            );
            if let Some(from) = dirv {
                let from_v = VertexId::new(from.as_str());
                let d = if *v1 == from_v {
                    darts.0.clone()
                } else if *v2 == from_v {
                    darts.1.clone()
                } else {
                    return Err(format!("dir of `{}` names unknown endpoint `{}`", id, from));
                };
                dir.insert(id.clone(), d);
            }
        }
        if !regions.is_empty() {
            for reg in regions {
                g.regions.insert(reg.id.clone(), reg);
            }
        } else {
            derive_disk_regions(&mut g)?;
        }
        Ok(AbstractSkeleton {
            graph: g,
            vertex_part,
            dir,
        })
    }
}

/// Derives regions by planar face tracing for a skeleton on a disk whose
/// vertices are all real and whose chords have distinct endpoints.
fn derive_disk_regions(g: &mut EmbeddedGraph) -> Result<(), String> {
    if g.boundary.len() != 1 {
        return Err("region records required for skeletons with more than one boundary component".into());
    }
    for v in g.vertices.values() {
        if !v.locus.is_real() {
            return Err(format!(
                "region records required: vertex `{}` is inner",
                v.id
            ));
        }
    }
    let bc = &g.boundary[0];
    let k = bc.vertices().len();
    let pos_of: BTreeMap<VertexId, usize> = g
        .vertices
        .values()
        .map(|v| match &v.locus {
            Locus::Real { pos, .. } => (v.id.clone(), *pos),
            Locus::Inner => unreachable!(),
        })
        .collect();
    // clockwise rotation at each vertex: [rev(arc_in), chords by
    // decreasing circular distance of the far endpoint, arc_out]
    let mut sigma: BTreeMap<DartId, DartId> = BTreeMap::new();
    let rev = |g: &EmbeddedGraph, d: &DartId| -> DartId {
        for e in g.edges.values() {
            if e.darts.0 == *d {
                return e.darts.1.clone();
            }
            if e.darts.1 == *d {
                return e.darts.0.clone();
            }
        }
        unreachable!()
    };
    for v in g.vertices.values() {
        let p = pos_of[&v.id];
        let arc_out = {
            let (dp, _) = arc_dart_ids(&bc.id, p);
            dp
        };
        let arc_in_rev = {
            let (_, dm) = arc_dart_ids(&bc.id, (p + k - 1) % k);
            dm
        };
        let mut chords: Vec<(usize, DartId)> = Vec::new();
        for e in g.edges.values() {
            if e.id.0.starts_with("arc:") {
                continue;
            }
            for (which, dart) in [(0, &e.darts.0), (1, &e.darts.1)] {
                let end = if which == 0 { &e.ends.0 } else { &e.ends.1 };
                if *end == v.id {
                    let far = if which == 0 { &e.ends.1 } else { &e.ends.0 };
                    if *far == v.id {
                        return Err(format!(
                            "region records required: edge `{}` is a loop",
                            e.id
                        ));
                    }
                    let key = (pos_of[far] + k - p) % k;
                    chords.push((key, dart.clone()));
                }
            }
        }
        chords.sort();
        for w in chords.windows(2) {
            if w[0].0 == w[1].0 {
                return Err("region records required: parallel chords".into());
            }
        }
        // cycle: arc_in_rev -> chords by decreasing key -> arc_out -> wrap
        let mut cycle = vec![arc_in_rev.clone()];
        for (_, d) in chords.iter().rev() {
            cycle.push(d.clone());
        }
        cycle.push(arc_out);
        for i in 0..cycle.len() {
            sigma.insert(cycle[i].clone(), cycle[(i + 1) % cycle.len()].clone());
        }
    }
    // trace orbits of next(d) = sigma(rev(d))
    let mut all_darts: Vec<DartId> = Vec::new();
    for e in g.edges.values() {
        all_darts.push(e.darts.0.clone());
        all_darts.push(e.darts.1.clone());
    }
    all_darts.sort();
    let mut seen: BTreeSet<DartId> = BTreeSet::new();
    let mut walks = Vec::new();
    for d0 in &all_darts {
        if seen.contains(d0) {
            continue;
        }
        let mut walk = Vec::new();
        let mut d = d0.clone();
        loop {
            walk.push(d.clone());
            seen.insert(d.clone());
            d = sigma
                .get(&rev(g, &d))
                .cloned()
                .ok_or_else(|| "region derivation failed: broken rotation".to_string())?;
            if d == *d0 {
                break;
            }
            if walk.len() > all_darts.len() {
                return Err("region derivation failed: runaway walk".into());
            }
        }
        // outside orbit: traverses boundary arcs backward (`-` darts)
        let outside = walk.iter().any(|d| d.0.starts_with("arc:") && d.0.ends_with(":-"));
        if !outside {
            walks.push(walk);
        }
    }
    let chi = g.vertices.len() as i64 - g.edges.len() as i64 + walks.len() as i64;
    if chi != 1 {
        return Err(format!(
            "region records required: face tracing gives Euler characteristic {}, expected 1",
            chi
        ));
    }
    for (i, w) in walks.into_iter().enumerate() {
        let id = crate::ids::RegionId::new(format!("r{}", i));
        g.regions.insert(
            id.clone(),
            Region {
                id,
                genus: 0,
                walks: vec![Walk::Darts(w)],
            },
        );
    }
    Ok(())
}

/// validate_skeleton: conditions Sk.1-Sk.6.
pub fn validate_skeleton(s: &AbstractSkeleton) -> ValidationReport {
    let mut r = validate_embedding(&s.graph);
    // decoration totality
    for v in s.graph.vertices.keys() {
        if !s.vertex_part.contains_key(v) {
            r.push("sk-part", vec![v.0.clone()], "vertex has no part");
        }
    }
    for (e, d) in &s.dir {
        match s.graph.edges.get(e) {
            None => r.push("sk-dir", vec![e.0.clone()], "direction for unknown edge"),
            Some(edge) => {
                if *d != edge.darts.0 && *d != edge.darts.1 {
                    r.push("sk-dir", vec![e.0.clone()], "direction dart not of this edge");
                }
            }
        }
    }
    if !r.is_empty() {
        return r;
    }
    // parts are per component; directed edges exactly those in Sk_dir
    for e in s.graph.edges.values() {
        if s.is_arc(&e.id) {
            continue;
        }
        let p0 = s.vertex_part[&e.ends.0];
        let p1 = s.vertex_part[&e.ends.1];
        if p0 != p1 {
            r.push(
                "sk-mixing",
                vec![e.id.0.clone()],
                "edge joins directed and undirected vertices",
            );
            continue;
        }
        match (p0, s.dir.contains_key(&e.id)) {
            (Part::Directed, false) => r.push(
                "sk-dir",
                vec![e.id.0.clone()],
                "edge of the directed part has no direction",
            ),
            (Part::Undirected, true) => r.push(
                "sk-dir",
                vec![e.id.0.clone()],
                "edge of the undirected part carries a direction",
            ),
            _ => {}
        }
    }

    // Sk.2: directions alternate at directed vertices.
    for (v, part) in &s.vertex_part {
        if *part != Part::Directed {
            continue;
        }
        for (a, b) in s.adjacent_chord_pairs(v) {
            let ea = edge_of_dart(s, &a);
            let eb = edge_of_dart(s, &b);
            if let (Some(da), Some(db)) = (s.dir.get(&ea), s.dir.get(&eb)) {
                // incoming at v iff forward dart is the reverse of the out-dart
                let in_a = *da != a;
                let in_b = *db != b;
                if a == b {
                    if in_a {
                        r.push(
                            "sk2-alternation",
                            vec![v.0.clone(), ea.0.clone()],
                            "edge at a monovalent inner vertex directed towards it",
                        );
                    }
                } else if in_a == in_b {
                    r.push(
                        "sk2-alternation",
                        vec![v.0.clone(), ea.0.clone(), eb.0.clone()],
                        "adjacent directed edges do not alternate",
                    );
                }
            }
        }
    }

    // Sk.5 and Sk.6.
    for (v, part) in &s.vertex_part {
        let vert = &s.graph.vertices[v];
        let val = s.chord_valency(v);
        if *part == Part::Directed && vert.locus.is_real() {
            if val % 2 == 0 {
                r.push(
                    "sk5-odd",
                    vec![v.0.clone()],
                    format!("real directed vertex has even valency {}", val),
                );
            } else if is_source(s, v) == Some(true) && val != 1 {
                r.push(
                    "sk6-source",
                    vec![v.0.clone()],
                    format!("source of valency {}", val),
                );
            }
        }
    }

    // Sk.1: no first neighbor cycles, no inner isolated vertices.
    for v in s.graph.vertices.values() {
        if !v.locus.is_real() && s.chord_valency(&v.id) == 0 {
            r.push("sk1-isolated", vec![v.id.0.clone()], "inner isolated vertex");
        }
    }
    for cyc in first_neighbor_cycles(s) {
        r.push(
            "sk1-cycle",
            cyc.iter().map(|d| d.0.clone()).collect(),
            "first neighbor cycle",
        );
    }

    // Sk.3: every boundary component has a vertex; directed and
    // undirected vertices alternate along it.
    for b in &s.graph.boundary {
        let verts = b.vertices();
        if verts.is_empty() {
            r.push("sk3-vertex", vec![b.id.0.clone()], "boundary component without vertices");
            continue;
        }
        let n = verts.len();
        for i in 0..n {
            let p0 = s.vertex_part[verts[i]];
            let p1 = s.vertex_part[verts[(i + 1) % n]];
            if p0 == p1 {
                r.push(
                    "sk3-parity",
                    vec![b.id.0.clone(), verts[i].0.clone(), verts[(i + 1) % n].0.clone()],
                    "adjacent boundary vertices in the same part",
                );
            }
        }
    }

    // Sk.4: a region with a single source on its boundary is a disk.
    let idx = s.graph.index();
    for reg in s.graph.regions.values() {
        let mut sources = BTreeSet::new();
        for w in &reg.walks {
            if let Walk::Darts(ds) = w {
                for d in ds {
                    for v in [idx.tail(d), idx.head(d)] {
                        if is_source(s, v) == Some(true) {
                            sources.insert(v.clone());
                        }
                    }
                }
            }
        }
        if sources.len() == 1 && (reg.genus != 0 || reg.walks.len() != 1) {
            r.push(
                "sk4-disk",
                vec![reg.id.0.clone(), sources.iter().next().unwrap().0.clone()],
                "region with a single source is not a disk",
            );
        }
    }
    r
}

pub(crate) fn edge_of_dart(s: &AbstractSkeleton, d: &DartId) -> EdgeId {
    for e in s.graph.edges.values() {
        if e.darts.0 == *d || e.darts.1 == *d {
            return e.id.clone();
        }
    }
    panic!("unknown dart {}", d);
}

/// Whether a real directed vertex is a source (extremal edges outgoing).
/// `None` for vertices that are not real directed or have no edges.
pub fn is_source(s: &AbstractSkeleton, v: &VertexId) -> Option<bool> {
    if s.vertex_part.get(v) != Some(&Part::Directed) {
        return None;
    }
    if !s.graph.vertices.get(v)?.locus.is_real() {
        return None;
    }
    let rot = s.chord_rotation(v)?;
    let first = rot.first()?;
    let e = edge_of_dart(s, first);
    let d = s.dir.get(&e)?;
    // outgoing at v iff the forward dart is the out-dart itself
    Some(*d == *first)
}

/// All minimal first-neighbor cycles, as dart sequences.
pub fn first_neighbor_cycles(s: &AbstractSkeleton) -> Vec<Vec<DartId>> {
    let mut darts: Vec<DartId> = Vec::new();
    for e in s.graph.edges.values() {
        if s.is_arc(&e.id) {
            continue;
        }
        darts.push(e.darts.0.clone());
        darts.push(e.darts.1.clone());
    }
    darts.sort();
    let succ: BTreeMap<DartId, Vec<DartId>> = darts
        .iter()
        .map(|d| (d.clone(), s.first_neighbor_successors(d)))
        .collect();
    let mut cycles: Vec<Vec<DartId>> = Vec::new();
    let mut found: BTreeSet<Vec<DartId>> = BTreeSet::new();
    // enumerate simple cycles whose least dart is the start
    for start in &darts {
        let mut stack = vec![(start.clone(), vec![start.clone()])];
        let mut guard = 0usize;
        while let Some((d, path)) = stack.pop() {
            guard += 1;
            if guard > 200_000 {
                break;
            }
            for nxt in &succ[&d] {
                if nxt == start && path.len() >= 1 {
                    let mut cyc = path.clone();
                    // canonical rotation: least dart first
                    let min_pos = cyc
                        .iter()
                        .enumerate()
                        .min_by_key(|(_, x)| (*x).clone())
                        .map(|(i, _)| i)
                        .unwrap();
                    cyc.rotate_left(min_pos);
                    if found.insert(cyc.clone()) {
                        cycles.push(cyc);
                    }
                } else if *nxt > *start && !path.contains(nxt) {
                    let mut p = path.clone();
                    p.push(nxt.clone());
                    stack.push((nxt.clone(), p));
                }
            }
        }
    }
    cycles.sort();
    cycles
}
