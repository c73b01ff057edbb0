//! Extension of an abstract skeleton to a dessin.
//!
//! Each skeleton vertex is blown up into a pillar: sources become jumps,
//! other real directed vertices type-2 ovals, isolated real undirected
//! vertices zigzags, other real undirected vertices type-3 ovals, and
//! inner vertices hyperbolic boundary circles. White vertices are
//! inserted on real dotted segments connecting pairs of absorbing germs,
//! following a fixed admissible orientation of the undirected part. The
//! solid interface around the directed components is produced from their
//! contour walks, and the bold interiors are filled by the canonical
//! non-crossing matching of alternating germs in each face.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::dessin::{Dessin, EdgeColor, VertexKind};
use crate::ids::{BoundaryId, DartId, EdgeId, RegionId, VertexId};
use crate::surface::{
    BoundaryComponent, BoundaryItem, Edge, EmbeddedGraph, Locus, Region, Vertex, Walk,
};
use crate::typing::{check_labelling, RegionLabelling};

use super::orient::admissible_orientation;
use super::{is_source, validate_skeleton, AbstractSkeleton, Part};

#[derive(Debug, Error)]
pub enum ExtendError {
    #[error("skeleton is not valid:\n{0}")]
    InvalidSkeleton(String),
    #[error("orientation construction failed: {0}")]
    Orientation(String),
    #[error("extension needs a non-disk region; only disk regions are constructed")]
    NonDiskRegion,
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// The builder accumulates the dessin under construction.
struct Builder {
    vertices: BTreeMap<VertexId, (Locus, VertexKind)>,
    /// id -> (ends, color, forward dart index 0/1)
    edges: BTreeMap<EdgeId, ((VertexId, VertexId), EdgeColor, u8)>,
    /// real vertex -> inner out-darts in rotation order (backward flank
    /// to forward flank along the boundary)
    inner_order: BTreeMap<VertexId, Vec<DartId>>,
    /// edges whose adjacent regions are of type 2
    type2_edges: BTreeSet<EdgeId>,
    solid_counter: usize,
    bold_counter: usize,
}

impl Builder {
    fn new() -> Self {
        Builder {
            vertices: BTreeMap::new(),
            edges: BTreeMap::new(),
            inner_order: BTreeMap::new(),
            type2_edges: BTreeSet::new(),
            solid_counter: 0,
            bold_counter: 0,
        }
    }

    fn add_vertex(&mut self, id: &VertexId, kind: VertexKind) {
        self.vertices.insert(id.clone(), (Locus::Inner, kind));
    }

    fn dart0(&self, e: &EdgeId) -> DartId {
        DartId::new(format!("{}:+", e))
    }
    fn dart1(&self, e: &EdgeId) -> DartId {
        DartId::new(format!("{}:-", e))
    }

    /// Adds an edge directed from `from` to `to`.
    fn add_edge(&mut self, id: &EdgeId, from: &VertexId, to: &VertexId, color: EdgeColor) {
        self.edges
            .insert(id.clone(), ((from.clone(), to.clone()), color, 0));
    }

    fn fresh_solid(&mut self) -> EdgeId {
        let id = EdgeId::new(format!("S{}", self.solid_counter));
        self.solid_counter += 1;
        id
    }
    fn fresh_bold(&mut self) -> EdgeId {
        let id = EdgeId::new(format!("B{}", self.bold_counter));
        self.bold_counter += 1;
        id
    }
}

/// Pillar produced by blowing up one skeleton vertex.
struct PillarBuild {
    /// boundary items of the pillar interval, starting and ending with a vertex
    items: Vec<BoundaryItem>,
    /// chord out-dart at the old vertex -> attachment vertex
    attach: BTreeMap<DartId, VertexId>,
    /// flank landings for directed pillars
    flank_bwd: Option<Flank>,
    flank_fwd: Option<Flank>,
}

#[derive(Clone, Debug)]
enum Flank {
    Black(VertexId),
    /// a landing monochrome must be created on the adjacent run
    OvalSide,
}

/// Kind of a germ object along a pillar, for white insertion.
#[derive(Clone, Copy, PartialEq)]
enum GapEnd {
    /// cross-vertex or attachment with outgoing chord: demands an edge in
    Absorbs,
    /// attachment with incoming chord: its real edges point away
    Emits,
}

pub fn extend_to_dessin(
    s: &AbstractSkeleton,
) -> Result<(Dessin, RegionLabelling), ExtendError> {
    let report = validate_skeleton(s);
    if !report.is_empty() {
        return Err(ExtendError::InvalidSkeleton(report.to_string()));
    }
    let o = admissible_orientation(s, None)
        .map_err(|e| ExtendError::Orientation(e.to_string()))?;
    // total orientation: forward dart of every skeleton edge
    let mut total: BTreeMap<EdgeId, DartId> = s.dir.clone();
    for (e, d) in &o.forward {
        total.insert(e.clone(), d.clone());
    }
    let _idx = s.graph.index();
    let mut b = Builder::new();

    // 1. blow up every skeleton vertex
    let mut pillars: BTreeMap<VertexId, PillarBuild> = BTreeMap::new();
    for v in s.graph.vertices.values() {
        let rot = s
            .chord_rotation(&v.id)
            .ok_or_else(|| ExtendError::Internal(format!("no rotation at {}", v.id)))?;
        let incoming: Vec<bool> = rot
            .iter()
            .map(|c| {
                let e = super::edge_of_dart(s, c);
                total[&e] != *c
            })
            .collect();
        let part = s.vertex_part[&v.id];
        let pb = if v.locus.is_real() {
            build_real_pillar(&mut b, s, &v.id, &rot, &incoming, part)?
        } else {
            build_inner_pillar(&mut b, s, &v.id, &rot, &incoming, part)?
        };
        pillars.insert(v.id.clone(), pb);
    }

    // 2. assemble boundary components of the dessin: pillar intervals
    //    joined by solid runs; one run edge per gap, subdivided later.
    //    run_edge[(bc, i)] = solid edge after the pillar at position i
    let mut run_edges: BTreeMap<(BoundaryId, usize), EdgeId> = BTreeMap::new();
    let mut bc_items: Vec<(BoundaryId, Vec<BoundaryItem>)> = Vec::new();
    for bcomp in &s.graph.boundary {
        let verts = bcomp.vertices();
        let k = verts.len();
        let mut items = Vec::new();
        for (i, v) in verts.iter().enumerate() {
            let pb = &pillars[*v];
            items.extend(pb.items.iter().cloned());
            // run edge to the next pillar
            let next = verts[(i + 1) % k];
            let last_v = match pb.items.last().unwrap() {
                BoundaryItem::V(x) => x.clone(),
                _ => unreachable!(),
            };
            let first_next = match pillars[next].items.first().unwrap() {
                BoundaryItem::V(x) => x.clone(),
                _ => unreachable!(),
            };
            let run = EdgeId::new(format!("{}.s{}", bcomp.id, i));
            // direction fixed after landings are placed
            b.add_edge(&run, &last_v, &first_next, EdgeColor::Solid);
            run_edges.insert((bcomp.id.clone(), i), run.clone());
            items.push(BoundaryItem::E(run));
        }
        bc_items.push((bcomp.id.clone(), items));
    }
    // new boundary circles from inner skeleton vertices
    for v in s.graph.vertices.values() {
        if v.locus.is_real() {
            continue;
        }
        let pb = &pillars[&v.id];
        bc_items.push((BoundaryId::new(format!("bc:{}", v.id)), pb.items.clone()));
    }

    // 3. chords become inner dotted edges between attachment vertices
    for e in s.skeleton_edges() {
        let edge = &s.graph.edges[&e];
        let a0 = pillars[&edge.ends.0]
            .attach
            .get(&edge.darts.0)
            .cloned()
            .ok_or_else(|| ExtendError::Internal(format!("no attachment for {}", edge.darts.0)))?;
        let a1 = pillars[&edge.ends.1]
            .attach
            .get(&edge.darts.1)
            .cloned()
            .ok_or_else(|| ExtendError::Internal(format!("no attachment for {}", edge.darts.1)))?;
        // orientation: forward dart total[e] runs from its tail attachment
        let (from, to) = if total[&e] == edge.darts.0 {
            (a0.clone(), a1.clone())
        } else {
            (a1.clone(), a0.clone())
        };
        b.add_edge(&e, &from, &to, EdgeColor::Dotted);
        if s.dir.contains_key(&e) {
            b.type2_edges.insert(e.clone());
        }
        // attachments' inner order: single chord each
        let d_at_a0 = if from == a0 { b.dart0(&e) } else { b.dart1(&e) };
        let d_at_a1 = if from == a0 { b.dart1(&e) } else { b.dart0(&e) };
        b.inner_order.entry(a0).or_default().push(d_at_a0);
        b.inner_order.entry(a1).or_default().push(d_at_a1);
    }

    // 4. contour walks of directed components -> inner solid edges
    let landings = build_solid_interface(&mut b, s, &pillars, &run_edges, &mut bc_items)?;

    // 5. fix run edge directions now that landings subdivided them
    fix_run_directions(&mut b)?;

    // 6+7. face-trace and fill bold interiors, then retrace for regions
    let dessin = finish(&mut b, s, bc_items, landings)?;

    // final checks
    let labelling = label_regions(&dessin, &b.type2_edges);
    let rep = crate::dessin::validate_dessin(&dessin);
    if !rep.is_empty() {
        return Err(ExtendError::Internal(format!(
            "constructed dessin invalid:\n{}",
            rep
        )));
    }
    match check_labelling(&dessin, &labelling) {
        Ok(r) if r.is_empty() => {}
        Ok(r) => {
            return Err(ExtendError::Internal(format!(
                "constructed labelling invalid:\n{}",
                r
            )))
        }
        Err(e) => return Err(ExtendError::Internal(e.to_string())),
    }
    Ok((dessin, labelling))
}

fn build_real_pillar(
    b: &mut Builder,
    s: &AbstractSkeleton,
    v: &VertexId,
    rot: &[DartId],
    incoming: &[bool],
    part: Part,
) -> Result<PillarBuild, ExtendError> {
    let k = rot.len();
    let mut items = Vec::new();
    let mut attach = BTreeMap::new();
    let mut type2 = false;
    let mut flank_bwd = None;
    let mut flank_fwd = None;
    if part == Part::Directed && k == 1 && is_source(s, v) == Some(true) {
        // jump: [black, bold, white, bold, black]
        let b0 = VertexId::new(format!("{}.b0", v));
        let b1 = VertexId::new(format!("{}.b1", v));
        let w = VertexId::new(format!("{}.w0", v));
        b.add_vertex(&b0, VertexKind::Black);
        b.add_vertex(&b1, VertexKind::Black);
        b.add_vertex(&w, VertexKind::White);
        let e0 = EdgeId::new(format!("{}.p0", v));
        let e1 = EdgeId::new(format!("{}.p1", v));
        b.add_edge(&e0, &b0, &w, EdgeColor::Bold);
        b.add_edge(&e1, &b1, &w, EdgeColor::Bold);
        b.type2_edges.insert(e0.clone());
        b.type2_edges.insert(e1.clone());
        items.push(BoundaryItem::V(b0.clone()));
        items.push(BoundaryItem::E(e0));
        items.push(BoundaryItem::V(w.clone()));
        items.push(BoundaryItem::E(e1));
        items.push(BoundaryItem::V(b1.clone()));
        attach.insert(rot[0].clone(), w);
        type2 = true;
        flank_bwd = Some(Flank::Black(b0));
        flank_fwd = Some(Flank::Black(b1));
    } else if part == Part::Directed {
        // sink: type-2 oval [cross, m_1 .. m_k, cross]
        if k == 0 || k % 2 == 0 {
            return Err(ExtendError::Internal(format!(
                "directed real vertex {} with valency {}",
                v, k
            )));
        }
        if !incoming[0] || !incoming[k - 1] {
            return Err(ExtendError::Internal(format!(
                "sink {} without extremal incoming edges",
                v
            )));
        }
        let x0 = VertexId::new(format!("{}.x0", v));
        let x1 = VertexId::new(format!("{}.x1", v));
        b.add_vertex(&x0, VertexKind::Cross);
        b.add_vertex(&x1, VertexKind::Cross);
        items.push(BoundaryItem::V(x0.clone()));
        let mut monos = Vec::new();
        for i in 0..k {
            let m = VertexId::new(format!("{}.m{}", v, i));
            b.add_vertex(&m, VertexKind::Monochrome);
            attach.insert(rot[i].clone(), m.clone());
            monos.push(m);
        }
        // dotted edges: [x0, m0], [m0, m1], ..., [m_{k-1}, x1]
        // emitted by the attachment with incoming chord on each side
        let mut objs: Vec<VertexId> = vec![x0.clone()];
        objs.extend(monos.iter().cloned());
        objs.push(x1.clone());
        for i in 0..=k {
            let e = EdgeId::new(format!("{}.p{}", v, i));
            // side emitting: an attachment whose chord is incoming
            let left_emits = i > 0 && incoming[i - 1];
            let right_emits = i < k && incoming[i];
            let (from, to) = match (left_emits, right_emits) {
                (true, false) => (objs[i].clone(), objs[i + 1].clone()),
                (false, true) => (objs[i + 1].clone(), objs[i].clone()),
                _ => {
                    return Err(ExtendError::Internal(format!(
                        "sink {} breaks in/out alternation",
                        v
                    )))
                }
            };
            b.add_edge(&e, &from, &to, EdgeColor::Dotted);
            b.type2_edges.insert(e.clone());
            if i > 0 {
                items.push(BoundaryItem::V(objs[i].clone()));
            }
            items.push(BoundaryItem::E(e));
        }
        items.push(BoundaryItem::V(x1));
        type2 = true;
        flank_bwd = Some(Flank::OvalSide);
        flank_fwd = Some(Flank::OvalSide);
    } else if k == 0 {
        // zigzag: [cross, dotted, white, dotted, cross]
        let x0 = VertexId::new(format!("{}.x0", v));
        let x1 = VertexId::new(format!("{}.x1", v));
        let w = VertexId::new(format!("{}.w0", v));
        b.add_vertex(&x0, VertexKind::Cross);
        b.add_vertex(&x1, VertexKind::Cross);
        b.add_vertex(&w, VertexKind::White);
        let e0 = EdgeId::new(format!("{}.p0", v));
        let e1 = EdgeId::new(format!("{}.p1", v));
        b.add_edge(&e0, &w, &x0, EdgeColor::Dotted);
        b.add_edge(&e1, &w, &x1, EdgeColor::Dotted);
        items.push(BoundaryItem::V(x0));
        items.push(BoundaryItem::E(e0));
        items.push(BoundaryItem::V(w));
        items.push(BoundaryItem::E(e1));
        items.push(BoundaryItem::V(x1));
    } else {
        // type-3 oval with whites on absorbing gaps
        let x0 = VertexId::new(format!("{}.x0", v));
        let x1 = VertexId::new(format!("{}.x1", v));
        b.add_vertex(&x0, VertexKind::Cross);
        b.add_vertex(&x1, VertexKind::Cross);
        let mut objs: Vec<(VertexId, GapEnd)> = vec![(x0.clone(), GapEnd::Absorbs)];
        for i in 0..k {
            let m = VertexId::new(format!("{}.m{}", v, i));
            b.add_vertex(&m, VertexKind::Monochrome);
            attach.insert(rot[i].clone(), m.clone());
            let end = if incoming[i] { GapEnd::Emits } else { GapEnd::Absorbs };
            objs.push((m, end));
        }
        objs.push((x1.clone(), GapEnd::Absorbs));
        items.push(BoundaryItem::V(x0));
        let mut edge_counter = 0usize;
        for i in 0..objs.len() - 1 {
            let (items2, _) = build_gap(
                b,
                v,
                &objs[i],
                &objs[i + 1],
                &mut edge_counter,
                false,
            )?;
            items.extend(items2);
            items.push(BoundaryItem::V(objs[i + 1].0.clone()));
        }
    }
    let _ = type2;
    Ok(PillarBuild {
        items,
        attach,
        flank_bwd,
        flank_fwd,
    })
}

/// One gap between consecutive pillar objects; returns the boundary items
/// strictly between the two object vertices.
fn build_gap(
    b: &mut Builder,
    v: &VertexId,
    left: &(VertexId, GapEnd),
    right: &(VertexId, GapEnd),
    counter: &mut usize,
    type2: bool,
) -> Result<(Vec<BoundaryItem>, ()), ExtendError> {
    let mut items = Vec::new();
    let e_a = EdgeId::new(format!("{}.g{}", v, *counter));
    let e_b = EdgeId::new(format!("{}.g{}", v, *counter + 1));
    let w_name = VertexId::new(format!("{}.gw{}", v, *counter));
    *counter += 2;
    match (left.1, right.1) {
        (GapEnd::Emits, GapEnd::Absorbs) => {
            let e = e_a;
            b.add_edge(&e, &left.0, &right.0, EdgeColor::Dotted);
            if type2 {
                b.type2_edges.insert(e.clone());
            }
            items.push(BoundaryItem::E(e));
        }
        (GapEnd::Absorbs, GapEnd::Emits) => {
            let e = e_a;
            b.add_edge(&e, &right.0, &left.0, EdgeColor::Dotted);
            if type2 {
                b.type2_edges.insert(e.clone());
            }
            items.push(BoundaryItem::E(e));
        }
        (GapEnd::Absorbs, GapEnd::Absorbs) => {
            let w = w_name;
            b.add_vertex(&w, VertexKind::White);
            let e0 = e_a;
            let e1 = e_b;
            b.add_edge(&e0, &w, &left.0, EdgeColor::Dotted);
            b.add_edge(&e1, &w, &right.0, EdgeColor::Dotted);
            if type2 {
                b.type2_edges.insert(e0.clone());
                b.type2_edges.insert(e1.clone());
            }
            items.push(BoundaryItem::E(e0));
            items.push(BoundaryItem::V(w));
            items.push(BoundaryItem::E(e1));
        }
        (GapEnd::Emits, GapEnd::Emits) => {
            return Err(ExtendError::Internal(format!(
                "adjacent incoming chords at {}: orientation not admissible",
                v
            )))
        }
    }
    Ok((items, ()))
}

fn build_inner_pillar(
    b: &mut Builder,
    _s: &AbstractSkeleton,
    v: &VertexId,
    rot: &[DartId],
    incoming: &[bool],
    part: Part,
) -> Result<PillarBuild, ExtendError> {
    let k = rot.len();
    if k == 0 {
        return Err(ExtendError::Internal(format!(
            "isolated inner vertex {} survived validation",
            v
        )));
    }
    let mut attach = BTreeMap::new();
    let mut objs: Vec<(VertexId, GapEnd)> = Vec::new();
    for i in 0..k {
        let m = VertexId::new(format!("{}.m{}", v, i));
        b.add_vertex(&m, VertexKind::Monochrome);
        attach.insert(rot[i].clone(), m.clone());
        let end = if incoming[i] { GapEnd::Emits } else { GapEnd::Absorbs };
        objs.push((m, end));
    }
    let mut items = Vec::new();
    let mut counter = 0usize;
    let type2 = part == Part::Directed;
    for i in 0..k {
        items.push(BoundaryItem::V(objs[i].0.clone()));
        let (items2, _) = build_gap(
            b,
            v,
            &objs[i],
            &objs[(i + 1) % k],
            &mut counter,
            type2,
        )?;
        items.extend(items2);
    }
    let _ = type2;
    Ok(PillarBuild {
        items,
        attach,
        flank_bwd: None,
        flank_fwd: None,
    })
}

/// A landing slot resolved to a concrete vertex.
struct Landings {
    /// black vertex -> its inner solid dart, in rotation position
    black_inner: BTreeMap<VertexId, DartId>,
}

/// Walks the contour of each directed component and materializes the
/// inner solid edges between consecutive flank slots.
fn build_solid_interface(
    b: &mut Builder,
    s: &AbstractSkeleton,
    pillars: &BTreeMap<VertexId, PillarBuild>,
    run_edges: &BTreeMap<(BoundaryId, usize), EdgeId>,
    bc_items: &mut Vec<(BoundaryId, Vec<BoundaryItem>)>,
) -> Result<Landings, ExtendError> {
    let idx = s.graph.index();
    // directed components: union-find over directed skeleton edges
    let mut comp_of: BTreeMap<EdgeId, usize> = BTreeMap::new();
    let mut comps: Vec<Vec<EdgeId>> = Vec::new();
    {
        let dir_edges: Vec<EdgeId> = s
            .skeleton_edges()
            .into_iter()
            .filter(|e| s.dir.contains_key(e))
            .collect();
        let mut vert_comp: BTreeMap<VertexId, usize> = BTreeMap::new();
        for e in &dir_edges {
            let ends = &s.graph.edges[e].ends;
            let c0 = vert_comp.get(&ends.0).copied();
            let c1 = vert_comp.get(&ends.1).copied();
            let c = match (c0, c1) {
                (None, None) => {
                    comps.push(Vec::new());
                    comps.len() - 1
                }
                (Some(c), None) | (None, Some(c)) => c,
                (Some(a), Some(bb)) => {
                    if a != bb {
                        // merge: relabel bb into a
                        let moved = std::mem::take(&mut comps[bb]);
                        for m in &moved {
                            comp_of.insert(m.clone(), a);
                        }
                        comps[a].extend(moved);
                        for (_, c) in vert_comp.iter_mut() {
                            if *c == bb {
                                *c = a;
                            }
                        }
                    }
                    a
                }
            };
            vert_comp.insert(ends.0.clone(), c);
            vert_comp.insert(ends.1.clone(), c);
            comps[c].push(e.clone());
            comp_of.insert(e.clone(), c);
        }
    }
    // position of each skeleton vertex on its boundary component
    let mut landings = Landings {
        black_inner: BTreeMap::new(),
    };
    // resolve a flank slot to a landing vertex, creating run monochromes
    let mut subdivided: BTreeSet<(BoundaryId, usize)> = BTreeSet::new();
    let mut resolve = |b: &mut Builder,
                       bc_items: &mut Vec<(BoundaryId, Vec<BoundaryItem>)>,
                       v: &VertexId,
                       forward: bool|
     -> Result<VertexId, ExtendError> {
        let pb = &pillars[v];
        let flank = if forward { &pb.flank_fwd } else { &pb.flank_bwd };
        match flank {
            Some(Flank::Black(bk)) => Ok(bk.clone()),
            Some(Flank::OvalSide) => {
                // landing on the run before (backward) or after (forward)
                let (bc, pos) = match &s.graph.vertices[v].locus {
                    Locus::Real { bc, pos } => (bc.clone(), *pos),
                    Locus::Inner => {
                        return Err(ExtendError::Internal(format!(
                            "inner vertex {} with oval flank",
                            v
                        )))
                    }
                };
                let kk = s
                    .graph
                    .bc(&bc)
                    .map(|x| x.vertices().len())
                    .unwrap_or(1);
                let run_idx = if forward { pos } else { (pos + kk - 1) % kk };
                let run = run_edges[&(bc.clone(), run_idx)].clone();
                if !subdivided.insert((bc.clone(), run_idx)) {
                    return Err(ExtendError::Internal(format!(
                        "run {} needs two landings",
                        run
                    )));
                }
                // subdivide run = (a, c) into (a, m) + (m, c)
                let ((a, c), _, _) = b.edges[&run].clone();
                let m = VertexId::new(format!("{}m", run));
                let e2 = EdgeId::new(format!("{}b", run));
                b.add_vertex(&m, VertexKind::Monochrome);
                b.edges.insert(run.clone(), ((a, m.clone()), EdgeColor::Solid, 0));
                b.add_edge(&e2, &m, &c, EdgeColor::Solid);
                // boundary item splice: run -> run, m, e2
                for (_, items) in bc_items.iter_mut() {
                    if let Some(p) = items
                        .iter()
                        .position(|it| matches!(it, BoundaryItem::E(e) if *e == run))
                    {
                        items.splice(
                            p + 1..p + 1,
                            [BoundaryItem::V(m.clone()), BoundaryItem::E(e2.clone())],
                        );
                        break;
                    }
                }
                Ok(m)
            }
            None => Err(ExtendError::Internal(format!(
                "undirected pillar {} used as a flank",
                v
            ))),
        }
    };

    for comp in comps.iter().filter(|c| !c.is_empty()) {
        let mut sorted = comp.clone();
        sorted.sort();
        sorted.dedup();
        let start = s.graph.edges[&sorted[0]].darts.0.clone();
        // contour walk emitting pillar visits at real extremal corners
        let mut visits: Vec<VertexId> = Vec::new();
        let mut d = start.clone();
        let mut guard = 0;
        loop {
            guard += 1;
            if guard > 10_000 {
                return Err(ExtendError::Internal("contour walk does not close".into()));
            }
            let v = idx.head(&d).clone();
            let rot = s.chord_rotation(&v).unwrap();
            let rev = idx.rev(&d);
            let pos = rot
                .iter()
                .position(|x| *x == rev)
                .ok_or_else(|| ExtendError::Internal("dart missing from rotation".into()))?;
            let inner = !s.graph.vertices[&v].locus.is_real();
            let next = if inner {
                rot[(pos + 1) % rot.len()].clone()
            } else if pos + 1 < rot.len() {
                rot[pos + 1].clone()
            } else {
                visits.push(v.clone());
                rot[0].clone()
            };
            d = next;
            if d == start {
                break;
            }
        }
        if visits.is_empty() {
            return Err(ExtendError::Internal(
                "directed component without real vertices".into(),
            ));
        }
        // stretches: exit slot (backward flank) of visit i to enter slot
        // (forward flank) of visit i+1
        let n = visits.len();
        for i in 0..n {
            let from_v = &visits[i];
            let to_v = &visits[(i + 1) % n];
            let exit = resolve(b, bc_items, from_v, false)?;
            let enter = resolve(b, bc_items, to_v, true)?;
            let (black, mono) = match (
                b.vertices[&exit].1 == VertexKind::Black,
                b.vertices[&enter].1 == VertexKind::Black,
            ) {
                (true, false) => (exit.clone(), enter.clone()),
                (false, true) => (enter.clone(), exit.clone()),
                _ => {
                    return Err(ExtendError::Internal(format!(
                        "stretch {} -> {} does not join a black and a landing",
                        exit, enter
                    )))
                }
            };
            let e = b.fresh_solid();
            b.add_edge(&e, &mono, &black, EdgeColor::Solid);
            let mono_dart = b.dart0(&e);
            let black_dart = b.dart1(&e);
            b.inner_order.entry(mono).or_default().push(mono_dart);
            landings.black_inner.insert(black.clone(), black_dart);
        }
    }
    Ok(landings)
}

/// After landings, every solid run sub-edge must run from a cross to an
/// absorbing endpoint (black or landing monochrome).
fn fix_run_directions(b: &mut Builder) -> Result<(), ExtendError> {
    let cross: BTreeSet<VertexId> = b
        .vertices
        .iter()
        .filter(|(_, (_, k))| *k == VertexKind::Cross)
        .map(|(v, _)| v.clone())
        .collect();
    let ids: Vec<EdgeId> = b.edges.keys().cloned().collect();
    for e in ids {
        let ((from, to), color, _) = b.edges[&e].clone();
        if color != EdgeColor::Solid {
            continue;
        }
        if !e.0.contains(".s") {
            continue; // inner solid stretches already directed
        }
        let f_cross = cross.contains(&from);
        let t_cross = cross.contains(&to);
        match (f_cross, t_cross) {
            (true, false) => {}
            (false, true) => {
                b.edges.insert(e.clone(), ((to, from), EdgeColor::Solid, 0));
            }
            _ => {
                return Err(ExtendError::Internal(format!(
                    "solid run {} joins {} and {}",
                    e, from, to
                )))
            }
        }
    }
    Ok(())
}

/// Rotation map for face tracing: sigma over out-darts plus the outside
/// corner closure at every real vertex.
struct Rot {
    sigma: BTreeMap<DartId, DartId>,
    rev: BTreeMap<DartId, DartId>,
    head: BTreeMap<DartId, VertexId>,
    /// boundary-forward darts, for outside-orbit detection
    boundary_forward: BTreeSet<DartId>,
}

fn build_rotation(
    b: &Builder,
    bc_items: &[(BoundaryId, Vec<BoundaryItem>)],
) -> Result<Rot, ExtendError> {
    let mut rev = BTreeMap::new();
    let mut head = BTreeMap::new();
    let mut tail: BTreeMap<DartId, VertexId> = BTreeMap::new();
    for (e, ((v0, v1), _, _)) in &b.edges {
        let d0 = b.dart0(e);
        let d1 = b.dart1(e);
        rev.insert(d0.clone(), d1.clone());
        rev.insert(d1.clone(), d0.clone());
        head.insert(d0.clone(), v1.clone());
        head.insert(d1.clone(), v0.clone());
        tail.insert(d0, v0.clone());
        tail.insert(d1, v1.clone());
    }
    // boundary in/out darts per vertex
    let mut bin: BTreeMap<VertexId, DartId> = BTreeMap::new();
    let mut bout: BTreeMap<VertexId, DartId> = BTreeMap::new();
    let mut boundary_forward = BTreeSet::new();
    for (_, items) in bc_items {
        let n = items.len();
        for (i, it) in items.iter().enumerate() {
            if let BoundaryItem::E(e) = it {
                let prev_v = match &items[(i + n - 1) % n] {
                    BoundaryItem::V(v) => v.clone(),
                    _ => return Err(ExtendError::Internal("boundary misalternates".into())),
                };
                let next_v = match &items[(i + 1) % n] {
                    BoundaryItem::V(v) => v.clone(),
                    _ => return Err(ExtendError::Internal("boundary misalternates".into())),
                };
                let d0 = b.dart0(e);
                let d1 = b.dart1(e);
                let fwd = if tail[&d0] == prev_v && head[&d0] == next_v {
                    d0
                } else if tail[&d1] == prev_v && head[&d1] == next_v {
                    d1
                } else {
                    return Err(ExtendError::Internal(format!(
                        "boundary edge {} does not join {} and {}",
                        e, prev_v, next_v
                    )));
                };
                boundary_forward.insert(fwd.clone());
                bout.insert(prev_v, fwd.clone());
                bin.insert(next_v, fwd);
            }
        }
    }
    let mut sigma = BTreeMap::new();
    for (v, _) in &b.vertices {
        let din = bin
            .get(v)
            .ok_or_else(|| ExtendError::Internal(format!("vertex {} off the boundary", v)))?;
        let dout = bout
            .get(v)
            .ok_or_else(|| ExtendError::Internal(format!("vertex {} off the boundary", v)))?;
        let mut cycle = vec![rev[din].clone()];
        if let Some(inner) = b.inner_order.get(v) {
            cycle.extend(inner.iter().cloned());
        }
        cycle.push(dout.clone());
        for i in 0..cycle.len() {
            sigma.insert(cycle[i].clone(), cycle[(i + 1) % cycle.len()].clone());
        }
    }
    Ok(Rot {
        sigma,
        rev,
        head,
        boundary_forward,
    })
}

fn trace_faces(rot: &Rot) -> Result<Vec<Vec<DartId>>, ExtendError> {
    let mut all: Vec<DartId> = rot.rev.keys().cloned().collect();
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
            let nxt = rot
                .sigma
                .get(&rot.rev[&d])
                .cloned()
                .ok_or_else(|| ExtendError::Internal("rotation incomplete".into()))?;
            d = nxt;
            if d == *d0 {
                break;
            }
            if face.len() > all.len() {
                return Err(ExtendError::Internal("face tracing diverged".into()));
            }
        }
        // outside orbit: traverses a boundary edge against its forward dart
        let outside = face
            .iter()
            .any(|d| rot.boundary_forward.contains(&rot.rev[&d]));
        if !outside {
            faces.push(face);
        }
    }
    Ok(faces)
}

/// Face tracing, bold filling, final regions and dessin assembly.
fn finish(
    b: &mut Builder,
    s: &AbstractSkeleton,
    bc_items: Vec<(BoundaryId, Vec<BoundaryItem>)>,
    landings: Landings,
) -> Result<Dessin, ExtendError> {
    // register blacks' inner solid darts in rotation order and remember
    // where the bold germ goes:
    //   forward black (boundary-in bold):  [b_real, s_inner, b_germ, s_real]
    //   backward black (boundary-in solid): [s_real, b_germ, s_inner, b_real]
    // i.e. the germ sits on the real-solid side of the inner solid edge.
    // register the blacks' inner solid darts; bold germ slots are
    // recovered from the rotation structure below
    for (v, (_, kind)) in b.vertices.clone() {
        if kind == VertexKind::Black {
            let d = landings.black_inner.get(&v).cloned().ok_or_else(|| {
                ExtendError::Internal(format!("black {} without inner solid", v))
            })?;
            b.inner_order.insert(v.clone(), vec![d]);
        }
    }
    // partial rotation and faces
    let rot = build_rotation(b, &bc_items)?;
    let faces = trace_faces(&rot)?;
    // find, per face, its germ corners in walk order. A germ corner is a
    // consecutive walk pair (a, nxt) at a vertex carrying a germ, where
    // the corner (rev(a), nxt) is the declared germ slot.
    // germ slot per vertex: pair of out-darts (p, q) with sigma(p) = q.
    let mut slot_of: BTreeMap<VertexId, (DartId, DartId)> = BTreeMap::new();
    for (v, (_, kind)) in &b.vertices {
        match kind {
            VertexKind::White => {
                if b.inner_order.get(v).map_or(0, |x| x.len()) == 0 {
                    // corner between the two real dotted edges
                    // slot = (rev(bin), bout) in sigma
                    // recover from sigma: rev(bin) -> bout directly
                    // find bin/bout via rotation: the cycle has length 2
                    let outs: Vec<DartId> = rot
                        .sigma
                        .keys()
                        .filter(|d| rot.head[&rot.rev[d]] == *v)
                        .cloned()
                        .collect();
                    // outs are the out-darts at v; cycle [rev(bin), bout]
                    if outs.len() != 2 {
                        return Err(ExtendError::Internal(format!(
                            "white {} has {} out-darts before bold filling",
                            v,
                            outs.len()
                        )));
                    }
                    // identify bout: it is a boundary-forward dart
                    let (p, q) = if rot.boundary_forward.contains(&outs[0]) {
                        (outs[1].clone(), outs[0].clone())
                    } else {
                        (outs[0].clone(), outs[1].clone())
                    };
                    slot_of.insert(v.clone(), (p, q));
                }
            }
            VertexKind::Black => {
                let s_inner = b.inner_order[v][0].clone();
                // forward black: germ between s_inner and s_real(bout);
                // backward black: germ between rev(bin)=s_real and s_inner.
                // Distinguish by the color of the boundary-out edge.
                let bout = rot
                    .sigma
                    .get(&s_inner)
                    .cloned()
                    .ok_or_else(|| ExtendError::Internal("missing sigma".into()))?;
                // if sigma(s_inner) is the boundary-out dart of a SOLID
                // edge, this is a forward black: slot (s_inner, bout).
                let eid = edge_of_new_dart(&bout);
                let is_solid = b.edges[&eid].1 == EdgeColor::Solid;
                if is_solid {
                    slot_of.insert(v.clone(), (s_inner, bout));
                } else {
                    // backward: find p with sigma(p) = s_inner
                    let p = rot
                        .sigma
                        .iter()
                        .find(|(_, q)| **q == s_inner)
                        .map(|(p, _)| p.clone())
                        .ok_or_else(|| ExtendError::Internal("missing sigma".into()))?;
                    slot_of.insert(v.clone(), (p, s_inner));
                }
            }
            _ => {}
        }
    }
    // bold filling per face
    let mut bold_insertions: Vec<(VertexId, (DartId, DartId), EdgeId, bool)> = Vec::new();
    for face in &faces {
        // events in walk order
        let mut events: Vec<(usize, VertexId, bool)> = Vec::new(); // (pos, vertex, is_out)
        for (i, d) in face.iter().enumerate() {
            let nxt = &face[(i + 1) % face.len()];
            let corner_vertex = rot.head[d].clone();
            if let Some((p, q)) = slot_of.get(&corner_vertex) {
                if rot.rev[d] == *p && *nxt == *q {
                    let is_out = b.vertices[&corner_vertex].1 == VertexKind::Black;
                    events.push((i, corner_vertex, is_out));
                }
            }
        }
        if events.is_empty() {
            continue;
        }
        let m = events.len();
        if m % 2 != 0 {
            return Err(ExtendError::Internal(
                "odd number of bold germs in a face".into(),
            ));
        }
        for w in 0..m {
            if events[w].2 == events[(w + 1) % m].2 {
                return Err(ExtendError::Internal(
                    "bold germs do not alternate in a face".into(),
                ));
            }
        }
        // pair each out (black) with the following in (white)
        for w in 0..m {
            if !events[w].2 {
                continue;
            }
            let black = events[w].1.clone();
            let white = events[(w + 1) % m].1.clone();
            let e = b.fresh_bold();
            b.add_edge(&e, &black, &white, EdgeColor::Bold);
            bold_insertions.push((black.clone(), slot_of[&black].clone(), e.clone(), true));
            bold_insertions.push((white.clone(), slot_of[&white].clone(), e, false));
        }
    }
    // insert bold darts into inner orders: the germ slot (p, q) means the
    // new dart goes between them in the sigma cycle; in inner_order terms
    // insert after p if p is an inner dart, else at the front.
    for (v, (p, _q), e, at_black) in &bold_insertions {
        let d_out = if *at_black {
            // bold edge directed black -> white, black end is `from`
            b.dart0(e)
        } else {
            b.dart1(e)
        };
        let order = b.inner_order.entry(v.clone()).or_default();
        // position: after p when p is in the order, else front
        if let Some(pos) = order.iter().position(|x| x == p) {
            order.insert(pos + 1, d_out);
        } else {
            order.insert(0, d_out);
        }
    }
    // final faces
    let rot2 = build_rotation(b, &bc_items)?;
    let faces2 = trace_faces(&rot2)?;
    // expected Euler characteristic: blow-up of the skeleton surface at
    // its inner vertices
    let inner_sk = s
        .graph
        .vertices
        .values()
        .filter(|v| !v.locus.is_real())
        .count() as i64;
    let chi_sk = s.graph.euler_characteristic_unchecked();
    let expected_chi = chi_sk - inner_sk;
    let v_n = b.vertices.len() as i64;
    let e_n = b.edges.len() as i64;
    let f_n = faces2.len() as i64;
    if v_n - e_n + f_n != expected_chi {
        return Err(ExtendError::NonDiskRegion);
    }
    // assemble the embedded graph
    let mut g = EmbeddedGraph::default();
    // locus from boundary items
    let mut locus: BTreeMap<VertexId, Locus> = BTreeMap::new();
    for (bcid, items) in &bc_items {
        let mut pos = 0usize;
        for it in items {
            if let BoundaryItem::V(v) = it {
                locus.insert(
                    v.clone(),
                    Locus::Real {
                        bc: bcid.clone(),
                        pos,
                    },
                );
                pos += 1;
            }
        }
    }
    for (v, (_, _kind)) in &b.vertices {
        let l = locus
            .get(v)
            .cloned()
            .ok_or_else(|| ExtendError::Internal(format!("vertex {} not on boundary", v)))?;
        g.vertices.insert(
            v.clone(),
            Vertex {
                id: v.clone(),
                locus: l,
            },
        );
    }
    for (e, ((v0, v1), _, _)) in &b.edges {
        g.edges.insert(
            e.clone(),
            Edge {
                id: e.clone(),
                ends: (v0.clone(), v1.clone()),
                darts: (b.dart0(e), b.dart1(e)),
            },
        );
    }
    for (i, face) in faces2.iter().enumerate() {
        let id = RegionId::new(format!("r{}", i));
        g.regions.insert(
            id.clone(),
            Region {
                id,
                genus: 0,
                walks: vec![Walk::Darts(face.clone())],
            },
        );
    }
    for (bcid, items) in bc_items {
        g.boundary.push(BoundaryComponent { id: bcid, items });
    }
    let color: BTreeMap<EdgeId, EdgeColor> =
        b.edges.iter().map(|(e, (_, c, _))| (e.clone(), *c)).collect();
    let kind: BTreeMap<VertexId, VertexKind> = b
        .vertices
        .iter()
        .map(|(v, (_, k))| (v.clone(), *k))
        .collect();
    let dir: BTreeMap<EdgeId, DartId> = b
        .edges
        .keys()
        .map(|e| (e.clone(), b.dart0(e)))
        .collect();
    Ok(Dessin {
        graph: g,
        color,
        kind,
        dir,
    })
}

/// dart id convention: `<edge>:+` / `<edge>:-`
fn edge_of_new_dart(d: &DartId) -> EdgeId {
    let s = &d.0;
    let cut = s.rfind(':').unwrap();
    EdgeId::new(&s[..cut])
}

/// Labels: regions whose walk touches a type-2 element get 2, others 3.
fn label_regions(d: &Dessin, type2: &BTreeSet<EdgeId>) -> RegionLabelling {
    let mut label = BTreeMap::new();
    for reg in d.graph.regions.values() {
        let mut is2 = false;
        for w in &reg.walks {
            if let Walk::Darts(ds) = w {
                for dart in ds {
                    let e = edge_of_new_dart(dart);
                    if type2.contains(&e) {
                        is2 = true;
                    }
                }
            }
        }
        label.insert(reg.id.clone(), if is2 { 2 } else { 3 });
    }
    RegionLabelling { label }
}
