//! Weak equivalence machinery: bridges and lumps, zigzag straightening
//! and creation, and normalization of type-I dessins toward unramified
//! ones.
//!
//! Straightening merges the two crosses of a short zigzag into an inner
//! cross; creation is the exact inverse. Both are compound rewrites
//! implemented by record substitution plus face retracing, so they
//! support dessins whose regions are disks (the disk-base case).

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::dessin::{validate_dessin, Dessin, EdgeColor, VertexKind};
use crate::ids::{BoundaryId, DartId, EdgeId, VertexId};
use crate::moves::{apply_dessin_move, DessinMove};
use crate::surface::{
    retrace_disk_regions, BoundaryItem, Edge, Locus, RotationSpec, Vertex,
};

#[derive(Debug, Error)]
pub enum WeakError {
    #[error("site does not match the zigzag fragment: {0}")]
    Pattern(String),
    #[error("move rejected: {0}")]
    Move(String),
    #[error("no unramified form found within budget {0}")]
    Budget(usize),
    #[error("{0}")]
    Other(String),
}

/// Bridges, lumps, long edges and the peripheral flag.
#[derive(Debug, Clone)]
pub struct BridgeStructure {
    pub bridges: Vec<EdgeId>,
    /// Boundary components that are two-edge, two-monochrome circles.
    pub lumps: Vec<BoundaryId>,
    /// Maximal chains of inner edges interconnected by lumps.
    pub long_edges: Vec<Vec<EdgeId>>,
    /// No inner vertices other than crosses.
    pub peripheral: bool,
    /// Bridges not contained in lumps.
    pub destroyable: Vec<EdgeId>,
}

pub fn analyze_bridge_structure(d: &Dessin) -> BridgeStructure {
    let mut bridges = Vec::new();
    for e in d.graph.edges.values() {
        if d.graph.is_real_edge(&e.id)
            && d.kind_of(&e.ends.0) == VertexKind::Monochrome
            && d.kind_of(&e.ends.1) == VertexKind::Monochrome
        {
            bridges.push(e.id.clone());
        }
    }
    bridges.sort();
    let mut lumps = Vec::new();
    let mut lump_edges: Vec<EdgeId> = Vec::new();
    for b in &d.graph.boundary {
        let verts = b.vertices();
        if verts.len() == 2 && verts.iter().all(|v| d.kind_of(v) == VertexKind::Monochrome) {
            lumps.push(b.id.clone());
            lump_edges.extend(b.edges().iter().map(|e| (*e).clone()));
        }
    }
    let mut long_edges: Vec<Vec<EdgeId>> = Vec::new();
    {
        let mut adj: BTreeMap<EdgeId, Vec<EdgeId>> = BTreeMap::new();
        for bc in &lumps {
            let b = d.graph.bc(bc).unwrap();
            let verts = b.vertices();
            let inner_of = |v: &VertexId| -> Option<EdgeId> {
                d.graph
                    .edges
                    .values()
                    .find(|e| (e.ends.0 == *v || e.ends.1 == *v) && !d.graph.is_real_edge(&e.id))
                    .map(|e| e.id.clone())
            };
            if let (Some(a), Some(bb)) = (inner_of(verts[0]), inner_of(verts[1])) {
                adj.entry(a.clone()).or_default().push(bb.clone());
                adj.entry(bb).or_default().push(a);
            }
        }
        let mut seen: BTreeSet<EdgeId> = BTreeSet::new();
        for start in adj.keys() {
            if seen.contains(start) {
                continue;
            }
            let mut chain = vec![start.clone()];
            seen.insert(start.clone());
            let mut frontier = vec![start.clone()];
            while let Some(x) = frontier.pop() {
                for y in adj.get(&x).into_iter().flatten() {
                    if seen.insert(y.clone()) {
                        chain.push(y.clone());
                        frontier.push(y.clone());
                    }
                }
            }
            chain.sort();
            long_edges.push(chain);
        }
        long_edges.sort();
    }
    let peripheral = d
        .graph
        .vertices
        .values()
        .all(|v| v.locus.is_real() || d.kind_of(&v.id) == VertexKind::Cross);
    let destroyable = bridges
        .iter()
        .filter(|e| !lump_edges.contains(e))
        .cloned()
        .collect();
    BridgeStructure {
        bridges,
        lumps,
        long_edges,
        peripheral,
        destroyable,
    }
}

/// make_bridge_free: destroy destroyable bridges until only lump bridges
/// remain.
pub fn make_bridge_free(d: &Dessin) -> (Dessin, Vec<DessinMove>) {
    let mut cur = d.clone();
    let mut path = Vec::new();
    loop {
        let bs = analyze_bridge_structure(&cur);
        let mut progressed = false;
        for b in bs.destroyable {
            let m = DessinMove::DestroyBridge { bridge: b };
            if let Ok(next) = apply_dessin_move(&cur, &m) {
                cur = next;
                path.push(m);
                progressed = true;
                break;
            }
        }
        if !progressed {
            break;
        }
    }
    (cur, path)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZigzagMove {
    /// Merge the two crosses flanking the given zigzag white into an
    /// inner cross.
    Straighten { white: VertexId },
    /// Recreate a zigzag from an inner cross.
    Create { cross: VertexId },
}

impl ZigzagMove {
    pub fn describe(&self) -> String {
        match self {
            ZigzagMove::Straighten { white } => format!("straighten {}", white),
            ZigzagMove::Create { cross } => format!("create-zigzag {}", cross),
        }
    }
}

pub fn apply_zigzag_move(d: &Dessin, m: &ZigzagMove) -> Result<Dessin, WeakError> {
    let out = match m {
        ZigzagMove::Straighten { white } => straighten(d, white)?,
        ZigzagMove::Create { cross } => create_zigzag(d, cross)?,
    };
    let rep = validate_dessin(&out);
    if !rep.is_empty() {
        return Err(WeakError::Move(format!("result invalid:\n{}", rep)));
    }
    Ok(out)
}

/// Rotation data of the current dessin: inner out-darts per real vertex,
/// full cyclic order per inner vertex.
fn current_rotations(d: &Dessin) -> Result<RotationSpec, WeakError> {
    let idx = d.graph.index();
    let mut spec = RotationSpec::default();
    for v in d.graph.vertices.values() {
        if v.locus.is_real() {
            let rot = idx
                .linear_rotation(&v.id)
                .ok_or_else(|| WeakError::Other(format!("no rotation at {}", v.id)))?;
            // strip the two boundary darts (first = rev(in), last = out)
            let inner: Vec<DartId> = rot[1..rot.len() - 1].to_vec();
            spec.inner_order.insert(v.id.clone(), inner);
        } else {
            let rot = idx
                .rotation_cycle(&v.id)
                .ok_or_else(|| WeakError::Other(format!("no rotation at {}", v.id)))?;
            spec.inner_cycles.insert(v.id.clone(), rot);
        }
    }
    Ok(spec)
}

struct Records {
    vertices: BTreeMap<VertexId, (VertexKind, bool)>, // kind, on-boundary
    edges: BTreeMap<EdgeId, (VertexId, VertexId, EdgeColor, bool)>, // ends, color, fwd
    boundary: Vec<(BoundaryId, Vec<BoundaryItem>)>,
    spec: RotationSpec,
}

impl Records {
    fn from_dessin(d: &Dessin) -> Result<Records, WeakError> {
        let spec = current_rotations(d)?;
        let vertices = d
            .graph
            .vertices
            .values()
            .map(|v| (v.id.clone(), (d.kind_of(&v.id), v.locus.is_real())))
            .collect();
        let edges = d
            .graph
            .edges
            .values()
            .map(|e| {
                (
                    e.id.clone(),
                    (
                        e.ends.0.clone(),
                        e.ends.1.clone(),
                        d.color_of(&e.id),
                        d.dir[&e.id] == e.darts.0,
                    ),
                )
            })
            .collect();
        let boundary = d
            .graph
            .boundary
            .iter()
            .map(|b| (b.id.clone(), b.items.clone()))
            .collect();
        Ok(Records {
            vertices,
            edges,
            boundary,
            spec,
        })
    }

    fn dart0(e: &EdgeId) -> DartId {
        DartId::new(format!("{}:~+", e))
    }
    fn dart1(e: &EdgeId) -> DartId {
        DartId::new(format!("{}:~-", e))
    }

    /// out-dart of edge `e` at endpoint `v` (after rebuild darts).
    fn out_dart(&self, e: &EdgeId, v: &VertexId) -> Result<DartId, WeakError> {
        let (a, _b, _, _) = self
            .edges
            .get(e)
            .ok_or_else(|| WeakError::Other(format!("unknown edge {}", e)))?;
        Ok(if a == v {
            Records::dart0(e)
        } else {
            Records::dart1(e)
        })
    }

    fn into_dessin(self) -> Result<Dessin, WeakError> {
        let mut g = crate::surface::EmbeddedGraph::default();
        for (id, _) in &self.vertices {
            g.vertices.insert(
                id.clone(),
                Vertex {
                    id: id.clone(),
                    locus: Locus::Inner,
                },
            );
        }
        let mut color = BTreeMap::new();
        let mut dir = BTreeMap::new();
        for (id, (a, b, c, fwd)) in &self.edges {
            let d0 = Records::dart0(id);
            let d1 = Records::dart1(id);
            g.edges.insert(
                id.clone(),
                Edge {
                    id: id.clone(),
                    ends: (a.clone(), b.clone()),
                    darts: (d0.clone(), d1.clone()),
                },
            );
            color.insert(id.clone(), *c);
            dir.insert(id.clone(), if *fwd { d0 } else { d1 });
        }
        for (bcid, items) in &self.boundary {
            g.boundary.push(crate::surface::BoundaryComponent {
                id: bcid.clone(),
                items: items.clone(),
            });
        }
        // real loci
        let mut loci = BTreeMap::new();
        for b in &g.boundary {
            let mut pos = 0;
            for it in &b.items {
                if let BoundaryItem::V(v) = it {
                    loci.insert(
                        v.clone(),
                        Locus::Real {
                            bc: b.id.clone(),
                            pos,
                        },
                    );
                    pos += 1;
                }
            }
        }
        for v in g.vertices.values_mut() {
            if let Some(l) = loci.get(&v.id) {
                v.locus = l.clone();
            }
        }
        retrace_disk_regions(&mut g, &self.spec).map_err(WeakError::Other)?;
        let kind = self
            .vertices
            .iter()
            .map(|(v, (k, _))| (v.clone(), *k))
            .collect();
        Ok(Dessin {
            graph: g,
            color,
            kind,
            dir,
        })
    }
}

/// Remaps a rotation-spec dart produced by the OLD dessin to the rebuild
/// convention, keeping edge identity.
fn remap_old_dart(d: &Dessin, old: &DartId) -> (EdgeId, bool) {
    for e in d.graph.edges.values() {
        if e.darts.0 == *old {
            return (e.id.clone(), true);
        }
        if e.darts.1 == *old {
            return (e.id.clone(), false);
        }
    }
    panic!("unknown dart {}", old);
}

fn convert_spec(d: &Dessin, spec: &RotationSpec, recs: &Records) -> RotationSpec {
    let conv = |dart: &DartId| -> Option<DartId> {
        let (e, fwd) = remap_old_dart(d, dart);
        if !recs.edges.contains_key(&e) {
            return None;
        }
        Some(if fwd {
            Records::dart0(&e)
        } else {
            Records::dart1(&e)
        })
    };
    let mut out = RotationSpec::default();
    for (v, order) in &spec.inner_order {
        if !recs.vertices.contains_key(v) {
            continue;
        }
        out.inner_order
            .insert(v.clone(), order.iter().filter_map(|x| conv(x)).collect());
    }
    for (v, cyc) in &spec.inner_cycles {
        if !recs.vertices.contains_key(v) {
            continue;
        }
        out.inner_cycles
            .insert(v.clone(), cyc.iter().filter_map(|x| conv(x)).collect());
    }
    out
}

struct ZigzagSite {
    w: VertexId,
    x_near: VertexId,
    x_far: VertexId,
    e_near: EdgeId,
    e_far: EdgeId,
    f: EdgeId,
    u: EdgeVertex,
    s_u: EdgeId,
    s_inner: EdgeId,
    m_arc: VertexId,
    m_near: EdgeId,
    m_far: EdgeId,
    far_end: VertexId,
    u_bold: EdgeId,
    w_far: VertexId,
}
type EdgeVertex = VertexId;

/// Pattern-matches the straightening site around a zigzag white.
fn match_straighten_site(d: &Dessin, white: &VertexId) -> Result<ZigzagSite, WeakError> {
    if d.kind.get(white) != Some(&VertexKind::White) || !d.graph.vertices[white].locus.is_real() {
        return Err(WeakError::Pattern(format!("{} is not a real white", white)));
    }
    let bc_id = match &d.graph.vertices[white].locus {
        Locus::Real { bc, .. } => bc.clone(),
        _ => unreachable!(),
    };
    let bcomp = d.graph.bc(&bc_id).unwrap().clone();
    let verts: Vec<VertexId> = bcomp.vertices().into_iter().cloned().collect();
    let n = verts.len();
    let pw = verts.iter().position(|x| x == white).unwrap();
    let left = verts[(pw + n - 1) % n].clone();
    let right = verts[(pw + 1) % n].clone();
    for x in [&left, &right] {
        if d.kind_of(x) != VertexKind::Cross {
            return Err(WeakError::Pattern("white is not flanked by crosses".into()));
        }
    }
    let edge_between = |a: &VertexId, b: &VertexId| -> Option<EdgeId> {
        d.graph.edges.values().find_map(|e| {
            if !d.graph.is_real_edge(&e.id) {
                return None;
            }
            if (e.ends.0 == *a && e.ends.1 == *b) || (e.ends.0 == *b && e.ends.1 == *a) {
                Some(e.id.clone())
            } else {
                None
            }
        })
    };
    let e_left = edge_between(&left, white)
        .ok_or_else(|| WeakError::Pattern("zigzag edge missing".into()))?;
    let e_right = edge_between(white, &right)
        .ok_or_else(|| WeakError::Pattern("zigzag edge missing".into()))?;
    for e in [&e_left, &e_right] {
        if d.color_of(e) != EdgeColor::Dotted {
            return Err(WeakError::Pattern("zigzag edges are not dotted".into()));
        }
    }
    // inner bold edge of the white
    let f = d
        .graph
        .edges
        .values()
        .find(|e| (e.ends.0 == *white || e.ends.1 == *white) && !d.graph.is_real_edge(&e.id))
        .map(|e| e.id.clone())
        .ok_or_else(|| WeakError::Pattern("white has no inner edge".into()))?;
    if d.color_of(&f) != EdgeColor::Bold {
        return Err(WeakError::Pattern("white's inner edge is not bold".into()));
    }
    let u = {
        let ed = d.graph.edge(&f);
        if ed.ends.0 == *white {
            ed.ends.1.clone()
        } else {
            ed.ends.0.clone()
        }
    };
    if d.kind_of(&u) != VertexKind::Black || !d.graph.vertices[&u].locus.is_real() {
        return Err(WeakError::Pattern(
            "inner bold edge does not reach a real black".into(),
        ));
    }
    // u flanks via a single solid edge to one of the crosses
    let (x_near, e_near, x_far, e_far, s_u) = if let Some(e) = edge_between(&u, &left) {
        (left.clone(), e_left.clone(), right.clone(), e_right.clone(), e)
    } else if let Some(e) = edge_between(&u, &right) {
        (right.clone(), e_right.clone(), left.clone(), e_left.clone(), e)
    } else {
        return Err(WeakError::Pattern("black does not flank the zigzag".into()));
    };
    if d.color_of(&s_u) != EdgeColor::Solid {
        return Err(WeakError::Pattern("flank edge is not solid".into()));
    }
    // u's inner solid edge to a real monochrome
    let s_inner = d
        .graph
        .edges
        .values()
        .find(|e| {
            (e.ends.0 == u || e.ends.1 == u)
                && !d.graph.is_real_edge(&e.id)
                && d.color_of(&e.id) == EdgeColor::Solid
        })
        .map(|e| e.id.clone())
        .ok_or_else(|| WeakError::Pattern("black has no inner solid edge".into()))?;
    let m_arc = {
        let ed = d.graph.edge(&s_inner);
        if ed.ends.0 == u {
            ed.ends.1.clone()
        } else {
            ed.ends.0.clone()
        }
    };
    if d.kind_of(&m_arc) != VertexKind::Monochrome || !d.graph.vertices[&m_arc].locus.is_real() {
        return Err(WeakError::Pattern(
            "inner solid edge does not end at a real monochrome".into(),
        ));
    }
    // m_arc's real edges: one to x_far (m_near), one onward (m_far)
    let m_near = edge_between(&x_far, &m_arc).ok_or_else(|| {
        WeakError::Pattern("monochrome is not adjacent to the far cross".into())
    })?;
    let m_far = d
        .graph
        .edges
        .values()
        .find(|e| {
            e.id != m_near
                && d.graph.is_real_edge(&e.id)
                && (e.ends.0 == m_arc || e.ends.1 == m_arc)
        })
        .map(|e| e.id.clone())
        .ok_or_else(|| WeakError::Pattern("monochrome lacks a second real edge".into()))?;
    let far_end = {
        let ed = d.graph.edge(&m_far);
        if ed.ends.0 == m_arc {
            ed.ends.1.clone()
        } else {
            ed.ends.0.clone()
        }
    };
    if far_end == u || far_end == x_near || far_end == x_far {
        return Err(WeakError::Pattern("solid run closes onto the fragment".into()));
    }
    // u's real bold edge
    let u_bold = d
        .graph
        .edges
        .values()
        .find(|e| {
            d.graph.is_real_edge(&e.id)
                && d.color_of(&e.id) == EdgeColor::Bold
                && (e.ends.0 == u || e.ends.1 == u)
        })
        .map(|e| e.id.clone())
        .ok_or_else(|| WeakError::Pattern("black lacks a real bold edge".into()))?;
    let w_far = {
        let ed = d.graph.edge(&u_bold);
        if ed.ends.0 == u {
            ed.ends.1.clone()
        } else {
            ed.ends.0.clone()
        }
    };
    if w_far == *white {
        return Err(WeakError::Pattern("bold side closes onto the white".into()));
    }
    Ok(ZigzagSite {
        w: white.clone(),
        x_near,
        x_far,
        e_near,
        e_far,
        f,
        u,
        s_u,
        s_inner,
        m_arc,
        m_near,
        m_far,
        far_end,
        u_bold,
        w_far,
    })
}

fn straighten(d: &Dessin, white: &VertexId) -> Result<Dessin, WeakError> {
    let site = match_straighten_site(d, white)?;
    let mut recs = Records::from_dessin(d)?;
    recs.spec = convert_spec(d, &recs.spec.clone(), &recs);
    // fresh names
    let v = VertexId::new(format!("{}.v", site.w));
    let m_b = VertexId::new(format!("{}.mb", site.w));
    let nd = EdgeId::new(format!("{}.nd", site.w));
    let ns = EdgeId::new(format!("{}.ns", site.w));
    let nb = EdgeId::new(format!("{}.nb", site.w));
    let b1 = EdgeId::new(format!("{}.b1", site.w));
    let b2 = EdgeId::new(format!("{}.b2", site.w));
    let b3 = EdgeId::new(format!("{}.b3", site.w));
    let ms = EdgeId::new(format!("{}.ms", site.w));
    for x in [&v, &m_b] {
        if recs.vertices.contains_key(x) {
            return Err(WeakError::Pattern("straighten names already used".into()));
        }
    }
    // record edits
    for x in [&site.x_near, &site.x_far, &site.m_arc] {
        recs.vertices.remove(x);
        recs.spec.inner_order.remove(x);
    }
    for e in [
        &site.e_near,
        &site.e_far,
        &site.s_u,
        &site.s_inner,
        &site.m_near,
        &site.m_far,
        &site.f,
        &site.u_bold,
    ] {
        recs.edges.remove(e);
    }
    recs.vertices.insert(v.clone(), (VertexKind::Cross, false));
    recs.vertices.insert(m_b.clone(), (VertexKind::Monochrome, true));
    recs.edges
        .insert(nd.clone(), (site.w.clone(), v.clone(), EdgeColor::Dotted, true));
    recs.edges
        .insert(ns.clone(), (v.clone(), site.u.clone(), EdgeColor::Solid, true));
    recs.edges
        .insert(nb.clone(), (site.u.clone(), m_b.clone(), EdgeColor::Bold, true));
    recs.edges
        .insert(b1.clone(), (site.u.clone(), site.w.clone(), EdgeColor::Bold, true));
    recs.edges
        .insert(b2.clone(), (m_b.clone(), site.w.clone(), EdgeColor::Bold, true));
    recs.edges
        .insert(b3.clone(), (m_b.clone(), site.w_far.clone(), EdgeColor::Bold, true));
    // merged solid directed into the black
    recs.edges
        .insert(ms.clone(), (site.far_end.clone(), site.u.clone(), EdgeColor::Solid, true));
    // rotations: substitute u's inner darts, reset w's, add new vertices
    {
        let ns_at_u = recs.out_dart(&ns, &site.u)?;
        let nb_at_u = recs.out_dart(&nb, &site.u)?;
        let order = recs
            .spec
            .inner_order
            .get_mut(&site.u)
            .ok_or_else(|| WeakError::Other("no rotation at the black".into()))?;
        for dart in order.iter_mut() {
            let is_s_inner = *dart == Records::dart0(&site.s_inner) || *dart == Records::dart1(&site.s_inner);
            let is_f = *dart == Records::dart0(&site.f) || *dart == Records::dart1(&site.f);
            if is_s_inner {
                *dart = ns_at_u.clone();
            } else if is_f {
                *dart = nb_at_u.clone();
            }
        }
    }
    recs.spec
        .inner_order
        .insert(site.w.clone(), vec![recs.out_dart(&nd, &site.w)?]);
    recs.spec
        .inner_order
        .insert(m_b.clone(), vec![recs.out_dart(&nb, &m_b)?]);
    recs.spec.inner_cycles.insert(
        v.clone(),
        vec![recs.out_dart(&nd, &v)?, recs.out_dart(&ns, &v)?],
    );
    // boundary: replace the zigzag span and the bold edge
    edit_boundary_straighten(&mut recs, &site, &b1, &b2, &b3, &ms, &m_b)?;
    recs.into_dessin()
}

fn edit_boundary_straighten(
    recs: &mut Records,
    site: &ZigzagSite,
    b1: &EdgeId,
    b2: &EdgeId,
    b3: &EdgeId,
    ms: &EdgeId,
    m_b: &VertexId,
) -> Result<(), WeakError> {
    for (_, items) in recs.boundary.iter_mut() {
        let has_u = items
            .iter()
            .any(|it| matches!(it, BoundaryItem::V(x) if x == &site.u));
        if !has_u {
            continue;
        }
        let old = items.clone();
        let n = old.len();
        let mut out: Vec<BoundaryItem> = Vec::new();
        let mut i = 0usize;
        // find a safe starting item outside the rewritten spans
        let start = old
            .iter()
            .position(|it| matches!(it, BoundaryItem::V(x) if x == &site.far_end))
            .ok_or_else(|| WeakError::Pattern("far end not on the circle".into()))?;
        while i < n {
            let it = &old[(start + i) % n];
            match it {
                BoundaryItem::E(e) if *e == site.u_bold => {
                    // [u_bold] -> [b1, w, b2, m_b, b3] oriented by neighbor
                    let prev_is_u = matches!(out.last(), Some(BoundaryItem::V(x)) if *x == site.u);
                    if prev_is_u {
                        out.push(BoundaryItem::E(b1.clone()));
                        out.push(BoundaryItem::V(site.w.clone()));
                        out.push(BoundaryItem::E(b2.clone()));
                        out.push(BoundaryItem::V(m_b.clone()));
                        out.push(BoundaryItem::E(b3.clone()));
                    } else {
                        out.push(BoundaryItem::E(b3.clone()));
                        out.push(BoundaryItem::V(m_b.clone()));
                        out.push(BoundaryItem::E(b2.clone()));
                        out.push(BoundaryItem::V(site.w.clone()));
                        out.push(BoundaryItem::E(b1.clone()));
                    }
                    i += 1;
                }
                BoundaryItem::E(e) if *e == site.s_u => {
                    // the span [s_u .. m_far] or [m_far .. s_u] collapses to ms
                    out.push(BoundaryItem::E(ms.clone()));
                    // skip items until past m_far (5 edges, 4 vertices = 9 items)
                    i += 9;
                }
                BoundaryItem::E(e) if *e == site.m_far => {
                    out.push(BoundaryItem::E(ms.clone()));
                    i += 9;
                }
                other => {
                    out.push(other.clone());
                    i += 1;
                }
            }
        }
        *items = out;
        return Ok(());
    }
    Err(WeakError::Pattern("fragment circle not found".into()))
}

fn create_zigzag(d: &Dessin, cross: &VertexId) -> Result<Dessin, WeakError> {
    if d.kind.get(cross) != Some(&VertexKind::Cross) || d.graph.vertices[cross].locus.is_real() {
        return Err(WeakError::Pattern(format!("{} is not an inner cross", cross)));
    }
    // the fragment: nd (dotted from a real bold-white w), ns (solid into
    // a real black u), boundary [u, b1, w, b2, m_b, b3, w_far], nb =
    // m_b's inner bold from u, ms = u's real solid to far_end
    let mut nd = None;
    let mut ns = None;
    for e in d.graph.edges.values() {
        if e.ends.0 == *cross || e.ends.1 == *cross {
            match d.color_of(&e.id) {
                EdgeColor::Dotted => nd = Some(e.id.clone()),
                EdgeColor::Solid => ns = Some(e.id.clone()),
                EdgeColor::Bold => {}
            }
        }
    }
    let nd = nd.ok_or_else(|| WeakError::Pattern("inner cross lacks a dotted edge".into()))?;
    let ns = ns.ok_or_else(|| WeakError::Pattern("inner cross lacks a solid edge".into()))?;
    let w = {
        let ed = d.graph.edge(&nd);
        if ed.ends.0 == *cross { ed.ends.1.clone() } else { ed.ends.0.clone() }
    };
    let u = {
        let ed = d.graph.edge(&ns);
        if ed.ends.0 == *cross { ed.ends.1.clone() } else { ed.ends.0.clone() }
    };
    if d.kind_of(&w) != VertexKind::White
        || !d.graph.vertices[&w].locus.is_real()
        || d.kind_of(&u) != VertexKind::Black
        || !d.graph.vertices[&u].locus.is_real()
    {
        return Err(WeakError::Pattern(
            "fragment does not join a real white and a real black".into(),
        ));
    }
    let edge_between = |a: &VertexId, b: &VertexId| -> Option<EdgeId> {
        d.graph.edges.values().find_map(|e| {
            if !d.graph.is_real_edge(&e.id) {
                return None;
            }
            if (e.ends.0 == *a && e.ends.1 == *b) || (e.ends.0 == *b && e.ends.1 == *a) {
                Some(e.id.clone())
            } else {
                None
            }
        })
    };
    let b1 = edge_between(&u, &w)
        .ok_or_else(|| WeakError::Pattern("white is not beside the black".into()))?;
    // m_b on the other side of w
    let bc_id = match &d.graph.vertices[&w].locus {
        Locus::Real { bc, .. } => bc.clone(),
        _ => unreachable!(),
    };
    let bcomp = d.graph.bc(&bc_id).unwrap().clone();
    let verts: Vec<VertexId> = bcomp.vertices().into_iter().cloned().collect();
    let n = verts.len();
    let pw = verts.iter().position(|x| x == &w).unwrap();
    let left = verts[(pw + n - 1) % n].clone();
    let right = verts[(pw + 1) % n].clone();
    let m_b = if left == u { right } else { left };
    if d.kind_of(&m_b) != VertexKind::Monochrome {
        return Err(WeakError::Pattern("no monochrome beside the white".into()));
    }
    let b2 = edge_between(&w, &m_b).ok_or_else(|| WeakError::Pattern("missing bold".into()))?;
    let b3 = d
        .graph
        .edges
        .values()
        .find(|e| {
            e.id != b2 && d.graph.is_real_edge(&e.id) && (e.ends.0 == m_b || e.ends.1 == m_b)
        })
        .map(|e| e.id.clone())
        .ok_or_else(|| WeakError::Pattern("missing far bold".into()))?;
    let w_far = {
        let ed = d.graph.edge(&b3);
        if ed.ends.0 == m_b { ed.ends.1.clone() } else { ed.ends.0.clone() }
    };
    let nb = d
        .graph
        .edges
        .values()
        .find(|e| !d.graph.is_real_edge(&e.id) && (e.ends.0 == m_b || e.ends.1 == m_b))
        .map(|e| e.id.clone())
        .ok_or_else(|| WeakError::Pattern("monochrome lacks an inner edge".into()))?;
    let ms = d
        .graph
        .edges
        .values()
        .find(|e| {
            d.graph.is_real_edge(&e.id)
                && d.color_of(&e.id) == EdgeColor::Solid
                && (e.ends.0 == u || e.ends.1 == u)
        })
        .map(|e| e.id.clone())
        .ok_or_else(|| WeakError::Pattern("black lacks a real solid edge".into()))?;
    let far_end = {
        let ed = d.graph.edge(&ms);
        if ed.ends.0 == u { ed.ends.1.clone() } else { ed.ends.0.clone() }
    };
    // rebuild
    let mut recs = Records::from_dessin(d)?;
    recs.spec = convert_spec(d, &recs.spec.clone(), &recs);
    let x1 = VertexId::new(format!("{}.x1", cross));
    let x2 = VertexId::new(format!("{}.x2", cross));
    let m_arc = VertexId::new(format!("{}.ma", cross));
    let e1 = EdgeId::new(format!("{}.e1", cross));
    let e2 = EdgeId::new(format!("{}.e2", cross));
    let s_u = EdgeId::new(format!("{}.su", cross));
    let s_near = EdgeId::new(format!("{}.sn", cross));
    let s_rest = EdgeId::new(format!("{}.sr", cross));
    let s_i = EdgeId::new(format!("{}.si", cross));
    let f = EdgeId::new(format!("{}.f", cross));
    let ub = EdgeId::new(format!("{}.ub", cross));
    for x in [&x1, &x2, &m_arc] {
        if recs.vertices.contains_key(x) {
            return Err(WeakError::Pattern("creation names already used".into()));
        }
    }
    recs.vertices.remove(cross);
    recs.vertices.remove(&m_b);
    recs.spec.inner_cycles.remove(cross);
    recs.spec.inner_order.remove(&m_b);
    for e in [&nd, &ns, &b1, &b2, &b3, &nb, &ms] {
        recs.edges.remove(e);
    }
    recs.vertices.insert(x1.clone(), (VertexKind::Cross, true));
    recs.vertices.insert(x2.clone(), (VertexKind::Cross, true));
    recs.vertices
        .insert(m_arc.clone(), (VertexKind::Monochrome, true));
    recs.edges
        .insert(e1.clone(), (w.clone(), x1.clone(), EdgeColor::Dotted, true));
    recs.edges
        .insert(e2.clone(), (w.clone(), x2.clone(), EdgeColor::Dotted, true));
    recs.edges
        .insert(s_u.clone(), (x1.clone(), u.clone(), EdgeColor::Solid, true));
    recs.edges
        .insert(s_near.clone(), (x2.clone(), m_arc.clone(), EdgeColor::Solid, true));
    recs.edges
        .insert(s_rest.clone(), (far_end.clone(), m_arc.clone(), EdgeColor::Solid, true));
    recs.edges
        .insert(s_i.clone(), (m_arc.clone(), u.clone(), EdgeColor::Solid, true));
    recs.edges
        .insert(f.clone(), (u.clone(), w.clone(), EdgeColor::Bold, true));
    recs.edges
        .insert(ub.clone(), (u.clone(), w_far.clone(), EdgeColor::Bold, true));
    // rotations
    {
        let si_at_u = recs.out_dart(&s_i, &u)?;
        let f_at_u = recs.out_dart(&f, &u)?;
        let order = recs
            .spec
            .inner_order
            .get_mut(&u)
            .ok_or_else(|| WeakError::Other("no rotation at the black".into()))?;
        for dart in order.iter_mut() {
            let is_ns = *dart == Records::dart0(&ns) || *dart == Records::dart1(&ns);
            let is_nb = *dart == Records::dart0(&nb) || *dart == Records::dart1(&nb);
            if is_ns {
                *dart = si_at_u.clone();
            } else if is_nb {
                *dart = f_at_u.clone();
            }
        }
    }
    recs.spec
        .inner_order
        .insert(w.clone(), vec![recs.out_dart(&f, &w)?]);
    recs.spec
        .inner_order
        .insert(m_arc.clone(), vec![recs.out_dart(&s_i, &m_arc)?]);
    recs.spec.inner_order.insert(x1.clone(), Vec::new());
    recs.spec.inner_order.insert(x2.clone(), Vec::new());
    // boundary edits
    for (_, items) in recs.boundary.iter_mut() {
        let has_u = items
            .iter()
            .any(|it| matches!(it, BoundaryItem::V(x) if x == &u));
        if !has_u {
            continue;
        }
        let old = items.clone();
        let n = old.len();
        let start = old
            .iter()
            .position(|it| matches!(it, BoundaryItem::V(x) if x == &far_end))
            .ok_or_else(|| WeakError::Pattern("far end not on the circle".into()))?;
        let mut out: Vec<BoundaryItem> = Vec::new();
        let mut i = 0usize;
        while i < n {
            let it = &old[(start + i) % n];
            match it {
                BoundaryItem::E(e) if *e == b1 || *e == b3 => {
                    // the span [b1, w, b2, m_b, b3] (either direction) -> [ub]
                    out.push(BoundaryItem::E(ub.clone()));
                    i += 5;
                }
                BoundaryItem::E(e) if *e == ms => {
                    let prev_is_u = matches!(out.last(), Some(BoundaryItem::V(x)) if *x == u);
                    if prev_is_u {
                        out.push(BoundaryItem::E(s_u.clone()));
                        out.push(BoundaryItem::V(x1.clone()));
                        out.push(BoundaryItem::E(e1.clone()));
                        out.push(BoundaryItem::V(w.clone()));
                        out.push(BoundaryItem::E(e2.clone()));
                        out.push(BoundaryItem::V(x2.clone()));
                        out.push(BoundaryItem::E(s_near.clone()));
                        out.push(BoundaryItem::V(m_arc.clone()));
                        out.push(BoundaryItem::E(s_rest.clone()));
                    } else {
                        out.push(BoundaryItem::E(s_rest.clone()));
                        out.push(BoundaryItem::V(m_arc.clone()));
                        out.push(BoundaryItem::E(s_near.clone()));
                        out.push(BoundaryItem::V(x2.clone()));
                        out.push(BoundaryItem::E(e2.clone()));
                        out.push(BoundaryItem::V(w.clone()));
                        out.push(BoundaryItem::E(e1.clone()));
                        out.push(BoundaryItem::V(x1.clone()));
                        out.push(BoundaryItem::E(s_u.clone()));
                    }
                    i += 1;
                }
                other => {
                    out.push(other.clone());
                    i += 1;
                }
            }
        }
        *items = out;
        break;
    }
    recs.into_dessin()
}

/// to_unramified: eliminate inner crosses by zigzag creation; a bounded
/// search over elementary moves prepares sites when the direct template
/// does not match.
pub fn to_unramified(d: &Dessin, budget: usize) -> Result<(Dessin, Vec<String>), WeakError> {
    let mut cur = d.clone();
    let mut path: Vec<String> = Vec::new();
    let inner_crosses = |x: &Dessin| -> Vec<VertexId> {
        x.graph
            .vertices
            .values()
            .filter(|v| !v.locus.is_real() && x.kind_of(&v.id) == VertexKind::Cross)
            .map(|v| v.id.clone())
            .collect()
    };
    let mut guard = 0;
    while !inner_crosses(&cur).is_empty() {
        guard += 1;
        if guard > 64 {
            return Err(WeakError::Budget(budget));
        }
        let crosses = inner_crosses(&cur);
        let mut progressed = false;
        for v in &crosses {
            let m = ZigzagMove::Create { cross: v.clone() };
            if let Ok(next) = apply_zigzag_move(&cur, &m) {
                path.push(m.describe());
                cur = next;
                progressed = true;
                break;
            }
        }
        if progressed {
            continue;
        }
        // bounded elementary-move search for a creation site
        let mut found = None;
        let mut frontier = vec![(cur.clone(), Vec::<String>::new())];
        let mut seen = BTreeSet::new();
        seen.insert(crate::moves::canonical_key_dessin(&cur));
        'search: for _depth in 0..budget {
            let mut next_frontier = Vec::new();
            for (state, spath) in &frontier {
                for m in crate::moves::enumerate_dessin_moves(state) {
                    if let Ok(nsd) = apply_dessin_move(state, &m) {
                        let key = crate::moves::canonical_key_dessin(&nsd);
                        if !seen.insert(key) {
                            continue;
                        }
                        let mut np = spath.clone();
                        np.push(m.describe());
                        for v in inner_crosses(&nsd) {
                            let zm = ZigzagMove::Create { cross: v.clone() };
                            if let Ok(done) = apply_zigzag_move(&nsd, &zm) {
                                let mut fp = np.clone();
                                fp.push(zm.describe());
                                found = Some((done, fp));
                                break 'search;
                            }
                        }
                        next_frontier.push((nsd, np));
                    }
                }
            }
            if next_frontier.is_empty() {
                break;
            }
            frontier = next_frontier;
        }
        match found {
            Some((next, fp)) => {
                path.extend(fp);
                cur = next;
            }
            None => return Err(WeakError::Budget(budget)),
        }
    }
    Ok((cur, path))
}
