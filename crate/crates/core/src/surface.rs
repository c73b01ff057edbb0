//! Graphs embedded in compact orientable surfaces with boundary.
//!
//! The encoding is region-based: every region (connected component of the
//! surface cut along the graph) is stored with its genus and its boundary
//! walks, each walk a cyclic sequence of darts. A dart is one of the two
//! traversal directions of an edge; the dart listed first in an edge record
//! runs from the first endpoint to the second.
//!
//! Conventions baked into the data:
//!  - region walks are stored with the region on the left for the global
//!    orientation of the surface;
//!  - boundary components are stored with the surface on the left, as a
//!    cyclic alternating sequence `v0 e0 v1 e1 ...`;
//!  - consequently an inner edge shows each of its two darts exactly once
//!    across all walks, and a real edge shows exactly the dart that agrees
//!    with the stored boundary traversal.
//!
//! A rotation system is derived from the walks (never stored): consecutive
//! walk darts `(a, b)` meeting at `v = head(a) = tail(b)` contribute the
//! corner `rev(a) -> b` to the rotation at `v`. Corner consistency demands
//! that these corners assemble into a single cycle of the out-darts at each
//! inner vertex, and, together with one implicit outside corner, at each
//! real vertex.

use std::collections::{BTreeMap, BTreeSet};

use crate::ids::{BoundaryId, DartId, EdgeId, RegionId, VertexId};
use crate::report::ValidationReport;

/// Position of a vertex: in the interior, or on a boundary component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Locus {
    Inner,
    Real { bc: BoundaryId, pos: usize },
}

impl Locus {
    pub fn is_real(&self) -> bool {
        matches!(self, Locus::Real { .. })
    }
}

#[derive(Debug, Clone)]
pub struct Vertex {
    pub id: VertexId,
    pub locus: Locus,
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub id: EdgeId,
    /// Ordered endpoints; loops are allowed.
    pub ends: (VertexId, VertexId),
    /// `darts.0` runs `ends.0 -> ends.1`, `darts.1` the reverse.
    pub darts: (DartId, DartId),
}

/// One boundary walk of a region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Walk {
    /// Cyclic dart sequence.
    Darts(Vec<DartId>),
    /// A circle around an isolated inner vertex.
    Puncture(VertexId),
}

#[derive(Debug, Clone)]
pub struct Region {
    pub id: RegionId,
    pub genus: usize,
    pub walks: Vec<Walk>,
}

impl Region {
    /// Euler characteristic of the region as a surface with boundary.
    pub fn euler(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.walks.len() as i64
    }
}

/// Entry of a boundary component cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundaryItem {
    V(VertexId),
    E(EdgeId),
}

#[derive(Debug, Clone)]
pub struct BoundaryComponent {
    pub id: BoundaryId,
    /// Cyclic alternating sequence starting with a vertex: `v0 e0 v1 e1 ...`.
    pub items: Vec<BoundaryItem>,
}

impl BoundaryComponent {
    pub fn vertices(&self) -> Vec<&VertexId> {
        self.items
            .iter()
            .filter_map(|i| match i {
                BoundaryItem::V(v) => Some(v),
                _ => None,
            })
            .collect()
    }
    pub fn edges(&self) -> Vec<&EdgeId> {
        self.items
            .iter()
            .filter_map(|i| match i {
                BoundaryItem::E(e) => Some(e),
                _ => None,
            })
            .collect()
    }
}

/// A graph embedded in a compact orientable surface with boundary.
#[derive(Debug, Clone, Default)]
pub struct EmbeddedGraph {
    pub vertices: BTreeMap<VertexId, Vertex>,
    pub edges: BTreeMap<EdgeId, Edge>,
    pub regions: BTreeMap<RegionId, Region>,
    pub boundary: Vec<BoundaryComponent>,
}

impl Default for Walk {
    fn default() -> Self {
        Walk::Darts(Vec::new())
    }
}

/// Indexed view over an `EmbeddedGraph`, built once and queried a lot.
///
/// Construction only requires referential integrity (checked by
/// [`EmbeddedGraph::check_references`]); all deeper invariants are the
/// business of [`EmbeddedGraph::validate`].
pub struct GraphIndex<'g> {
    pub g: &'g EmbeddedGraph,
    /// dart -> (edge, true if it is the forward dart `ends.0 -> ends.1`).
    pub dart_edge: BTreeMap<DartId, (EdgeId, bool)>,
    /// dart -> region whose walk contains it.
    pub dart_region: BTreeMap<DartId, RegionId>,
    /// vertex -> rotation cycle of out-darts (next dart counterclockwise).
    /// Present only when corner consistency holds at that vertex.
    pub rotation_next: BTreeMap<DartId, DartId>,
    /// real vertex -> (incoming boundary dart, outgoing boundary dart).
    pub boundary_darts: BTreeMap<VertexId, (DartId, DartId)>,
    /// edge -> boundary component containing it (real edges only).
    pub edge_bc: BTreeMap<EdgeId, BoundaryId>,
    /// vertex -> all incident out-darts, sorted.
    pub out_darts: BTreeMap<VertexId, Vec<DartId>>,
}

impl EmbeddedGraph {
    pub fn edge(&self, id: &EdgeId) -> &Edge {
        &self.edges[id]
    }
    pub fn vertex(&self, id: &VertexId) -> &Vertex {
        &self.vertices[id]
    }

    pub fn bc(&self, id: &BoundaryId) -> Option<&BoundaryComponent> {
        self.boundary.iter().find(|b| &b.id == id)
    }

    /// True if the edge lies on the boundary.
    pub fn is_real_edge(&self, id: &EdgeId) -> bool {
        self.boundary
            .iter()
            .any(|b| b.items.iter().any(|i| matches!(i, BoundaryItem::E(e) if e == id)))
    }

    /// Number of incident edge ends (loops count twice).
    pub fn valency(&self, v: &VertexId) -> usize {
        self.edges
            .values()
            .map(|e| (e.ends.0 == *v) as usize + (e.ends.1 == *v) as usize)
            .sum()
    }

    /// Basic referential integrity; must pass before deeper validation.
    pub fn check_references(&self) -> ValidationReport {
        let mut r = ValidationReport::new();
        let mut seen_darts: BTreeMap<&DartId, &EdgeId> = BTreeMap::new();
        for e in self.edges.values() {
            for v in [&e.ends.0, &e.ends.1] {
                if !self.vertices.contains_key(v) {
                    r.push(
                        "ref-vertex",
                        vec![e.id.0.clone(), v.0.clone()],
                        "edge endpoint is not a declared vertex",
                    );
                }
            }
            if e.darts.0 == e.darts.1 {
                r.push(
                    "ref-dart",
                    vec![e.id.0.clone()],
                    "edge must have two distinct darts",
                );
            }
            for d in [&e.darts.0, &e.darts.1] {
                if let Some(other) = seen_darts.insert(d, &e.id) {
                    r.push(
                        "ref-dart",
                        vec![d.0.clone(), other.0.clone(), e.id.0.clone()],
                        "dart id used by two edges",
                    );
                }
            }
        }
        for reg in self.regions.values() {
            for w in &reg.walks {
                match w {
                    Walk::Darts(ds) => {
                        if ds.is_empty() {
                            r.push(
                                "ref-walk",
                                vec![reg.id.0.clone()],
                                "empty dart walk",
                            );
                        }
                        for d in ds {
                            if !seen_darts.contains_key(d) {
                                r.push(
                                    "ref-walk",
                                    vec![reg.id.0.clone(), d.0.clone()],
                                    "walk references unknown dart",
                                );
                            }
                        }
                    }
                    Walk::Puncture(v) => {
                        if !self.vertices.contains_key(v) {
                            r.push(
                                "ref-walk",
                                vec![reg.id.0.clone(), v.0.clone()],
                                "puncture references unknown vertex",
                            );
                        }
                    }
                }
            }
        }
        let mut bc_ids = BTreeSet::new();
        for b in &self.boundary {
            if !bc_ids.insert(&b.id) {
                r.push(
                    "ref-boundary",
                    vec![b.id.0.clone()],
                    "duplicate boundary component id",
                );
            }
            for item in &b.items {
                match item {
                    BoundaryItem::V(v) => {
                        if !self.vertices.contains_key(v) {
                            r.push(
                                "ref-boundary",
                                vec![b.id.0.clone(), v.0.clone()],
                                "boundary references unknown vertex",
                            );
                        }
                    }
                    BoundaryItem::E(e) => {
                        if !self.edges.contains_key(e) {
                            r.push(
                                "ref-boundary",
                                vec![b.id.0.clone(), e.0.clone()],
                                "boundary references unknown edge",
                            );
                        }
                    }
                }
            }
        }
        r
    }

    /// Builds the derived index. Requires `check_references` to pass.
    pub fn index(&self) -> GraphIndex<'_> {
        let mut dart_edge = BTreeMap::new();
        let mut out_darts: BTreeMap<VertexId, Vec<DartId>> = BTreeMap::new();
        for v in self.vertices.keys() {
            out_darts.insert(v.clone(), Vec::new());
        }
        for e in self.edges.values() {
            dart_edge.insert(e.darts.0.clone(), (e.id.clone(), true));
            dart_edge.insert(e.darts.1.clone(), (e.id.clone(), false));
            out_darts
                .entry(e.ends.0.clone())
                .or_default()
                .push(e.darts.0.clone());
            out_darts
                .entry(e.ends.1.clone())
                .or_default()
                .push(e.darts.1.clone());
        }
        for v in out_darts.values_mut() {
            v.sort();
        }
        let mut dart_region = BTreeMap::new();
        for reg in self.regions.values() {
            for w in &reg.walks {
                if let Walk::Darts(ds) = w {
                    for d in ds {
                        dart_region.insert(d.clone(), reg.id.clone());
                    }
                }
            }
        }
        let mut edge_bc = BTreeMap::new();
        let mut boundary_darts = BTreeMap::new();
        for b in &self.boundary {
            let n = b.items.len();
            for (i, item) in b.items.iter().enumerate() {
                if let BoundaryItem::E(e) = item {
                    edge_bc.insert(e.clone(), b.id.clone());
                }
                if let BoundaryItem::V(v) = item {
                    // incoming edge precedes, outgoing follows (cyclically)
                    if n >= 2 {
                        let prev = &b.items[(i + n - 1) % n];
                        let next = &b.items[(i + 1) % n];
                        if let (BoundaryItem::E(pe), BoundaryItem::E(ne)) = (prev, next) {
                            if let (Some(pe), Some(ne)) =
                                (self.edges.get(pe), self.edges.get(ne))
                            {
                                // incoming dart of prev edge ends at v
                                let din = if pe.ends.1 == *v {
                                    pe.darts.0.clone()
                                } else {
                                    pe.darts.1.clone()
                                };
                                let dout = if ne.ends.0 == *v {
                                    ne.darts.0.clone()
                                } else {
                                    ne.darts.1.clone()
                                };
                                boundary_darts.insert(v.clone(), (din, dout));
                            }
                        }
                    }
                }
            }
        }
        // Corner relation sigma: rev(a) -> b for consecutive walk darts (a, b),
        // plus the outside corner b_out -> rev(a_in) at each real vertex.
        let mut rotation_next = BTreeMap::new();
        let rev = |d: &DartId| -> DartId {
            let (eid, fwd) = &dart_edge[d];
            let e = &self.edges[eid];
            if *fwd {
                e.darts.1.clone()
            } else {
                e.darts.0.clone()
            }
        };
        for reg in self.regions.values() {
            for w in &reg.walks {
                if let Walk::Darts(ds) = w {
                    let n = ds.len();
                    for i in 0..n {
                        let a = &ds[i];
                        let b = &ds[(i + 1) % n];
                        rotation_next.insert(rev(a), b.clone());
                    }
                }
            }
        }
        for (_, (din, dout)) in &boundary_darts {
            rotation_next.insert(dout.clone(), rev(din));
        }
        GraphIndex {
            g: self,
            dart_edge,
            dart_region,
            rotation_next,
            boundary_darts,
            edge_bc,
            out_darts,
        }
    }

    /// Surface Euler characteristic computed from the cut.
    pub fn euler_characteristic_unchecked(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64
            + self.regions.values().map(|r| r.euler()).sum::<i64>()
    }

    /// Genus of the underlying surface, from the Euler characteristic and
    /// the boundary count. `None` when the data is not consistent with an
    /// orientable surface.
    pub fn surface_genus(&self) -> Option<usize> {
        let chi = self.euler_characteristic_unchecked();
        let b = self.boundary.len() as i64;
        let twice_g = 2 - b - chi;
        if twice_g < 0 || twice_g % 2 != 0 {
            None
        } else {
            Some((twice_g / 2) as usize)
        }
    }
}

impl<'g> GraphIndex<'g> {
    pub fn edge_of(&self, d: &DartId) -> &EdgeId {
        &self.dart_edge[d].0
    }

    pub fn rev(&self, d: &DartId) -> DartId {
        let (eid, fwd) = &self.dart_edge[d];
        let e = &self.g.edges[eid];
        if *fwd {
            e.darts.1.clone()
        } else {
            e.darts.0.clone()
        }
    }

    pub fn tail(&self, d: &DartId) -> &VertexId {
        let (eid, fwd) = &self.dart_edge[d];
        let e = &self.g.edges[eid];
        if *fwd {
            &e.ends.0
        } else {
            &e.ends.1
        }
    }

    pub fn head(&self, d: &DartId) -> &VertexId {
        let (eid, fwd) = &self.dart_edge[d];
        let e = &self.g.edges[eid];
        if *fwd {
            &e.ends.1
        } else {
            &e.ends.0
        }
    }

    /// Walk successor: the next dart of the region walk after `d`.
    pub fn walk_next(&self, d: &DartId) -> Option<DartId> {
        self.rotation_next.get(&self.rev(d)).cloned()
    }

    /// Rotation at a vertex as a cyclic sequence of out-darts, when the
    /// corner relation closes into a single cycle covering all of them.
    /// For real vertices the cycle includes the outside corner; the
    /// canonical starting dart is the reverse of the incoming boundary
    /// dart. For inner vertices the least dart starts the cycle.
    pub fn rotation_cycle(&self, v: &VertexId) -> Option<Vec<DartId>> {
        let outs = self.out_darts.get(v)?;
        if outs.is_empty() {
            return Some(Vec::new());
        }
        let start = match self.boundary_darts.get(v) {
            Some((din, _)) => self.rev(din),
            None => outs[0].clone(),
        };
        if !outs.contains(&start) {
            return None;
        }
        let mut cyc = vec![start.clone()];
        let mut cur = start.clone();
        loop {
            let next = self.rotation_next.get(&cur)?.clone();
            if self.tail(&next) != v {
                return None;
            }
            if next == start {
                break;
            }
            if cyc.len() > outs.len() {
                return None;
            }
            cyc.push(next.clone());
            cur = next;
        }
        if cyc.len() != outs.len() {
            return None;
        }
        Some(cyc)
    }

    /// Linear rotation at a real vertex: out-darts from the backward
    /// boundary direction to the forward one, outside corner removed.
    pub fn linear_rotation(&self, v: &VertexId) -> Option<Vec<DartId>> {
        let (_, dout) = self.boundary_darts.get(v)?.clone();
        let cyc = self.rotation_cycle(v)?;
        // cycle starts at rev(din) and ends just before it; the outside
        // corner is the step dout -> rev(din), so the linear order runs
        // from rev(din) around to dout.
        let pos = cyc.iter().position(|d| *d == dout)?;
        if pos != cyc.len() - 1 {
            return None;
        }
        Some(cyc)
    }
}

/// validate_embedding: every structural invariant of the encoding.
pub fn validate_embedding(g: &EmbeddedGraph) -> ValidationReport {
    let mut r = g.check_references();
    if !r.is_empty() {
        return r;
    }
    let idx = g.index();

    // Boundary structure: alternating v,e,... with matching endpoints,
    // positions a permutation, loci consistent.
    let mut real_vertices: BTreeSet<&VertexId> = BTreeSet::new();
    let mut real_edges: BTreeMap<&EdgeId, usize> = BTreeMap::new();
    for b in &g.boundary {
        let n = b.items.len();
        if n == 0 {
            r.push(
                "bd-empty",
                vec![b.id.0.clone()],
                "boundary component has no items",
            );
            continue;
        }
        if n % 2 != 0 {
            r.push(
                "bd-alternation",
                vec![b.id.0.clone()],
                "boundary must alternate vertices and edges",
            );
            continue;
        }
        for (i, item) in b.items.iter().enumerate() {
            match (i % 2, item) {
                (0, BoundaryItem::V(v)) => {
                    if !real_vertices.insert(v) {
                        r.push(
                            "bd-vertex-repeat",
                            vec![v.0.clone()],
                            "vertex occurs twice on the boundary",
                        );
                    }
                    match &g.vertices[v].locus {
                        Locus::Real { bc, pos } => {
                            if bc != &b.id || *pos != i / 2 {
                                r.push(
                                    "bd-locus",
                                    vec![v.0.clone(), b.id.0.clone()],
                                    format!(
                                        "declared locus real:{}:{} does not match boundary position {}:{}",
                                        bc, pos, b.id, i / 2
                                    ),
                                );
                            }
                        }
                        Locus::Inner => {
                            r.push(
                                "bd-locus",
                                vec![v.0.clone()],
                                "inner vertex listed on the boundary",
                            );
                        }
                    }
                }
                (1, BoundaryItem::E(e)) => {
                    *real_edges.entry(e).or_insert(0) += 1;
                    let prev = match &b.items[i - 1] {
                        BoundaryItem::V(v) => v.clone(),
                        _ => continue,
                    };
                    let next = match &b.items[(i + 1) % n] {
                        BoundaryItem::V(v) => v.clone(),
                        _ => continue,
                    };
                    let e = &g.edges[e];
                    let ok = (e.ends.0 == prev && e.ends.1 == next)
                        || (e.ends.1 == prev && e.ends.0 == next);
                    if !ok {
                        r.push(
                            "bd-edge-ends",
                            vec![e.id.0.clone(), b.id.0.clone()],
                            "boundary edge endpoints do not match neighboring vertices",
                        );
                    }
                }
                _ => {
                    r.push(
                        "bd-alternation",
                        vec![b.id.0.clone()],
                        format!("item {} breaks vertex/edge alternation", i),
                    );
                }
            }
        }
    }
    for (e, count) in &real_edges {
        if *count > 1 {
            r.push(
                "bd-edge-repeat",
                vec![e.0.clone()],
                "edge occurs twice on the boundary",
            );
        }
    }
    // Declared real vertices must be on the boundary and vice versa.
    for v in g.vertices.values() {
        let declared_real = v.locus.is_real();
        let listed = real_vertices.contains(&v.id);
        if declared_real && !listed {
            r.push(
                "bd-locus",
                vec![v.id.0.clone()],
                "vertex declared real but absent from its boundary component",
            );
        }
    }

    // Edge reality: both ends real on the same bc AND in the walk.
    for e in g.edges.values() {
        if real_edges.contains_key(&e.id) {
            let v0 = &g.vertices[&e.ends.0];
            let v1 = &g.vertices[&e.ends.1];
            let ok = match (&v0.locus, &v1.locus) {
                (Locus::Real { bc: b0, .. }, Locus::Real { bc: b1, .. }) => {
                    b0 == b1 && idx.edge_bc.get(&e.id) == Some(b0)
                }
                _ => false,
            };
            if !ok {
                r.push(
                    "edge-real",
                    vec![e.id.0.clone()],
                    "real edge must join two real vertices of its own boundary component",
                );
            }
        }
    }

    // Walk chaining and side counts.
    let mut dart_occurrences: BTreeMap<&DartId, usize> = BTreeMap::new();
    for reg in g.regions.values() {
        if reg.walks.is_empty() {
            r.push(
                "walk-missing",
                vec![reg.id.0.clone()],
                "region has no boundary walks",
            );
        }
        for w in &reg.walks {
            match w {
                Walk::Darts(ds) => {
                    let n = ds.len();
                    for i in 0..n {
                        let a = &ds[i];
                        let b = &ds[(i + 1) % n];
                        *dart_occurrences.entry(a).or_insert(0) += 1;
                        if idx.head(a) != idx.tail(b) {
                            r.push(
                                "walk-chain",
                                vec![reg.id.0.clone(), a.0.clone(), b.0.clone()],
                                "consecutive walk darts do not chain head to tail",
                            );
                        }
                    }
                }
                Walk::Puncture(v) => {
                    if g.valency(v) != 0 || g.vertices[v].locus.is_real() {
                        r.push(
                            "walk-puncture",
                            vec![reg.id.0.clone(), v.0.clone()],
                            "puncture walk must name an isolated inner vertex",
                        );
                    }
                }
            }
        }
    }
    for e in g.edges.values() {
        let n0 = dart_occurrences.get(&e.darts.0).copied().unwrap_or(0);
        let n1 = dart_occurrences.get(&e.darts.1).copied().unwrap_or(0);
        if real_edges.contains_key(&e.id) {
            // exactly one occurrence: the dart matching boundary orientation
            if n0 + n1 != 1 {
                r.push(
                    "side-count",
                    vec![e.id.0.clone()],
                    format!("real edge occurs {} times in walks, expected 1", n0 + n1),
                );
            } else {
                // determine the boundary-forward dart
                let bc = &idx.edge_bc[&e.id];
                let b = g.bc(bc).unwrap();
                let n = b.items.len();
                let mut expected = None;
                for (i, item) in b.items.iter().enumerate() {
                    if matches!(item, BoundaryItem::E(eid) if eid == &e.id) {
                        if let BoundaryItem::V(prev) = &b.items[(i + n - 1) % n] {
                            expected = Some(if e.ends.0 == *prev {
                                e.darts.0.clone()
                            } else {
                                e.darts.1.clone()
                            });
                        }
                    }
                }
                if let Some(exp) = expected {
                    let used = if n0 == 1 { &e.darts.0 } else { &e.darts.1 };
                    if *used != exp {
                        r.push(
                            "side-convention",
                            vec![e.id.0.clone()],
                            "real edge walk dart opposes the stored boundary orientation",
                        );
                    }
                }
            }
        } else {
            if n0 != 1 || n1 != 1 {
                r.push(
                    "side-count",
                    vec![e.id.0.clone()],
                    format!(
                        "inner edge darts occur {}+{} times in walks, expected 1+1",
                        n0, n1
                    ),
                );
            }
        }
    }

    // Isolated inner vertices need exactly one puncture walk.
    let mut punctured: BTreeMap<&VertexId, usize> = BTreeMap::new();
    for reg in g.regions.values() {
        for w in &reg.walks {
            if let Walk::Puncture(v) = w {
                *punctured.entry(v).or_insert(0) += 1;
            }
        }
    }
    for v in g.vertices.values() {
        let isolated_inner = !v.locus.is_real() && g.valency(&v.id) == 0;
        let cnt = punctured.get(&v.id).copied().unwrap_or(0);
        if isolated_inner && cnt != 1 {
            r.push(
                "walk-puncture",
                vec![v.id.0.clone()],
                format!(
                    "isolated inner vertex has {} puncture walks, expected 1",
                    cnt
                ),
            );
        }
        if !isolated_inner && cnt != 0 {
            r.push(
                "walk-puncture",
                vec![v.id.0.clone()],
                "puncture walk on a non-isolated or real vertex",
            );
        }
    }

    if !r.is_empty() {
        return r;
    }

    // Corner consistency: rotations must close into single cycles.
    for v in g.vertices.values() {
        if g.valency(&v.id) == 0 {
            continue;
        }
        if v.locus.is_real() {
            if idx.linear_rotation(&v.id).is_none() {
                r.push(
                    "corner",
                    vec![v.id.0.clone()],
                    "corners at real vertex do not form a single boundary-bounded chain",
                );
            }
        } else if idx.rotation_cycle(&v.id).is_none() {
            r.push(
                "corner",
                vec![v.id.0.clone()],
                "corners at inner vertex do not form a single rotation cycle",
            );
        }
    }

    // Euler consistency with an orientable underlying surface.
    if g.surface_genus().is_none() {
        r.push(
            "euler",
            vec![],
            format!(
                "Euler characteristic {} with {} boundary components does not fit an orientable surface",
                g.euler_characteristic_unchecked(),
                g.boundary.len()
            ),
        );
    }

    r
}

/// Per-region orientation sign relative to the stored walks.
///
/// `+1`: every walk dart agrees with its edge direction map; `-1`: every
/// dart opposes. Returns `None` when mixed (the orientation axiom fails).
pub fn region_sign(
    g: &EmbeddedGraph,
    idx: &GraphIndex<'_>,
    region: &RegionId,
    forward: &dyn Fn(&EdgeId) -> Option<DartId>,
) -> Option<i8> {
    let mut sign: Option<i8> = None;
    for w in &g.regions[region].walks {
        if let Walk::Darts(ds) = w {
            for d in ds {
                let e = idx.edge_of(d);
                let f = forward(e)?;
                let s = if f == *d { 1 } else { -1 };
                match sign {
                    None => sign = Some(s),
                    Some(prev) if prev != s => return None,
                    _ => {}
                }
            }
        }
    }
    sign.or(Some(1))
}

/// The closed orientation double: two mirror copies of every inner
/// element, one copy of every real element, no boundary.
pub fn orientation_double(g: &EmbeddedGraph) -> EmbeddedGraph {
    let real_edge: BTreeSet<EdgeId> = g
        .edges
        .keys()
        .filter(|e| g.is_real_edge(e))
        .cloned()
        .collect();
    let plus = |s: &str| format!("{}+", s);
    let minus = |s: &str| format!("{}-", s);

    let mut out = EmbeddedGraph::default();
    for v in g.vertices.values() {
        if v.locus.is_real() {
            out.vertices.insert(
                v.id.clone(),
                Vertex {
                    id: v.id.clone(),
                    locus: Locus::Inner,
                },
            );
        } else {
            for name in [plus(&v.id.0), minus(&v.id.0)] {
                out.vertices.insert(
                    VertexId::new(name.clone()),
                    Vertex {
                        id: VertexId::new(name),
                        locus: Locus::Inner,
                    },
                );
            }
        }
    }
    let map_v = |v: &VertexId, side: char| -> VertexId {
        if g.vertices[v].locus.is_real() {
            v.clone()
        } else if side == '+' {
            VertexId::new(plus(&v.0))
        } else {
            VertexId::new(minus(&v.0))
        }
    };
    for e in g.edges.values() {
        if real_edge.contains(&e.id) {
            out.edges.insert(e.id.clone(), e.clone());
        } else {
            for side in ['+', '-'] {
                let name = if side == '+' {
                    plus(&e.id.0)
                } else {
                    minus(&e.id.0)
                };
                out.edges.insert(
                    EdgeId::new(name.clone()),
                    Edge {
                        id: EdgeId::new(name.clone()),
                        ends: (map_v(&e.ends.0, side), map_v(&e.ends.1, side)),
                        darts: (
                            DartId::new(format!("{}{}", e.darts.0 .0, side)),
                            DartId::new(format!("{}{}", e.darts.1 .0, side)),
                        ),
                    },
                );
            }
        }
    }
    let idx = g.index();
    let map_dart = |d: &DartId, side: char| -> DartId {
        let (eid, fwd) = &idx.dart_edge[d];
        if real_edge.contains(eid) {
            let e = &g.edges[eid];
            if *fwd {
                e.darts.0.clone()
            } else {
                e.darts.1.clone()
            }
        } else {
            DartId::new(format!("{}{}", d.0, side))
        }
    };
    for reg in g.regions.values() {
        // plus copy: same walks
        let mut walks_p = Vec::new();
        let mut walks_m = Vec::new();
        for w in &reg.walks {
            match w {
                Walk::Darts(ds) => {
                    walks_p.push(Walk::Darts(ds.iter().map(|d| map_dart(d, '+')).collect()));
                    // mirror copy: reversed order, each dart reversed
                    let mut rev_walk: Vec<DartId> = ds
                        .iter()
                        .rev()
                        .map(|d| {
                            let r = idx.rev(d);
                            map_dart(&r, '-')
                        })
                        .collect();
                    // rotate so walks start deterministically
                    if let Some(min_pos) = rev_walk
                        .iter()
                        .enumerate()
                        .min_by_key(|(_, d)| (*d).clone())
                        .map(|(i, _)| i)
                    {
                        rev_walk.rotate_left(min_pos);
                    }
                    walks_m.push(Walk::Darts(rev_walk));
                }
                Walk::Puncture(v) => {
                    walks_p.push(Walk::Puncture(map_v(v, '+')));
                    walks_m.push(Walk::Puncture(map_v(v, '-')));
                }
            }
        }
        out.regions.insert(
            RegionId::new(plus(&reg.id.0)),
            Region {
                id: RegionId::new(plus(&reg.id.0)),
                genus: reg.genus,
                walks: walks_p,
            },
        );
        out.regions.insert(
            RegionId::new(minus(&reg.id.0)),
            Region {
                id: RegionId::new(minus(&reg.id.0)),
                genus: reg.genus,
                walks: walks_m,
            },
        );
    }
    out
}

/// Explicit rotation data for rebuilding regions by face tracing.
#[derive(Debug, Clone, Default)]
pub struct RotationSpec {
    /// real vertex -> inner out-darts, ordered from the backward boundary
    /// flank to the forward one
    pub inner_order: BTreeMap<VertexId, Vec<DartId>>,
    /// inner vertex -> full cyclic out-dart order
    pub inner_cycles: BTreeMap<VertexId, Vec<DartId>>,
}

/// Rebuilds `g.regions` by face tracing from the given rotations. Every
/// traced face becomes a genus-0 single-walk region, so this only
/// supports graphs whose cut pieces are disks.
pub fn retrace_disk_regions(g: &mut EmbeddedGraph, spec: &RotationSpec) -> Result<(), String> {
    let mut rev: BTreeMap<DartId, DartId> = BTreeMap::new();
    let mut tail: BTreeMap<DartId, VertexId> = BTreeMap::new();
    let mut head: BTreeMap<DartId, VertexId> = BTreeMap::new();
    for e in g.edges.values() {
        rev.insert(e.darts.0.clone(), e.darts.1.clone());
        rev.insert(e.darts.1.clone(), e.darts.0.clone());
        tail.insert(e.darts.0.clone(), e.ends.0.clone());
        tail.insert(e.darts.1.clone(), e.ends.1.clone());
        head.insert(e.darts.0.clone(), e.ends.1.clone());
        head.insert(e.darts.1.clone(), e.ends.0.clone());
    }
    // boundary in/out darts
    let mut bin: BTreeMap<VertexId, DartId> = BTreeMap::new();
    let mut bout: BTreeMap<VertexId, DartId> = BTreeMap::new();
    let mut boundary_forward: BTreeSet<DartId> = BTreeSet::new();
    for b in &g.boundary {
        let n = b.items.len();
        for (i, it) in b.items.iter().enumerate() {
            if let BoundaryItem::E(e) = it {
                let prev_v = match &b.items[(i + n - 1) % n] {
                    BoundaryItem::V(v) => v.clone(),
                    _ => return Err("boundary misalternates".into()),
                };
                let next_v = match &b.items[(i + 1) % n] {
                    BoundaryItem::V(v) => v.clone(),
                    _ => return Err("boundary misalternates".into()),
                };
                let ed = g
                    .edges
                    .get(e)
                    .ok_or_else(|| format!("unknown boundary edge {}", e))?;
                let fwd = if ed.ends.0 == prev_v && ed.ends.1 == next_v {
                    ed.darts.0.clone()
                } else if ed.ends.1 == prev_v && ed.ends.0 == next_v {
                    ed.darts.1.clone()
                } else {
                    return Err(format!("boundary edge {} does not join its neighbors", e));
                };
                boundary_forward.insert(fwd.clone());
                bout.insert(prev_v, fwd.clone());
                bin.insert(next_v, fwd);
            }
        }
    }
    let mut sigma: BTreeMap<DartId, DartId> = BTreeMap::new();
    for v in g.vertices.values() {
        if v.locus.is_real() {
            let din = bin
                .get(&v.id)
                .ok_or_else(|| format!("real vertex {} not on the boundary", v.id))?;
            let dout = bout
                .get(&v.id)
                .ok_or_else(|| format!("real vertex {} not on the boundary", v.id))?;
            let mut cyc = vec![rev[din].clone()];
            if let Some(inner) = spec.inner_order.get(&v.id) {
                cyc.extend(inner.iter().cloned());
            }
            cyc.push(dout.clone());
            for i in 0..cyc.len() {
                sigma.insert(cyc[i].clone(), cyc[(i + 1) % cyc.len()].clone());
            }
        } else {
            let cyc = spec
                .inner_cycles
                .get(&v.id)
                .ok_or_else(|| format!("no rotation for inner vertex {}", v.id))?;
            if cyc.is_empty() {
                continue;
            }
            for i in 0..cyc.len() {
                sigma.insert(cyc[i].clone(), cyc[(i + 1) % cyc.len()].clone());
            }
        }
    }
    let mut all: Vec<DartId> = rev.keys().cloned().collect();
    all.sort();
    let mut seen: BTreeSet<DartId> = BTreeSet::new();
    let mut faces = Vec::new();
    for d0 in &all {
        if seen.contains(d0) {
            continue;
        }
        let mut face = Vec::new();
        let mut d = d0.clone();
        loop {
            face.push(d.clone());
            seen.insert(d.clone());
            d = sigma
                .get(&rev[&d])
                .cloned()
                .ok_or_else(|| format!("rotation incomplete at dart {}", rev[&d]))?;
            if d == *d0 {
                break;
            }
            if face.len() > all.len() {
                return Err("face tracing diverged".into());
            }
        }
        let outside = face.iter().any(|x| boundary_forward.contains(&rev[x]));
        if !outside {
            faces.push(face);
        }
    }
    g.regions.clear();
    for (i, face) in faces.into_iter().enumerate() {
        let id = crate::ids::RegionId::new(format!("r{}", i));
        g.regions.insert(
            id.clone(),
            Region {
                id,
                genus: 0,
                walks: vec![Walk::Darts(face)],
            },
        );
    }
    Ok(())
}

/// full_valency: valency for inner vertices, `2*valency - 2` for real ones.
pub fn full_valency(g: &EmbeddedGraph, v: &VertexId) -> Option<usize> {
    let vert = g.vertices.get(v)?;
    let val = g.valency(v);
    Some(if vert.locus.is_real() {
        2 * val - 2
    } else {
        val
    })
}
