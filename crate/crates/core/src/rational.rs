//! The disk-base specialization: chord diagrams, canonical forms, the
//! equivalence decision, block construction, junctions, and enumeration
//! of deformation classes by pillar budget.
//!
//! Over a disk every skeleton is a boundary-anchored forest. Destroying
//! bridges reduces every vertex to valency at most one, leaving disjoint
//! chords between marked boundary points: sources, sinks, undirected
//! endpoints and isolated zigzag points.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::dessin::Dessin;
use crate::ids::{BoundaryId, DartId, EdgeId, VertexId};
use crate::moves::{apply_skeleton_move, SkeletonMove};
use crate::skeleton::{
    extend_to_dessin, validate_skeleton, AbstractSkeleton, Part,
};
use crate::surface::Locus;
use crate::typing::RegionLabelling;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MarkKind {
    Source,
    Sink,
    Undirected,
    Zigzag,
}

impl MarkKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MarkKind::Source => "source",
            MarkKind::Sink => "sink",
            MarkKind::Undirected => "undirected",
            MarkKind::Zigzag => "zigzag",
        }
    }
    pub fn directed(self) -> bool {
        matches!(self, MarkKind::Source | MarkKind::Sink)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chord {
    pub a: usize,
    pub b: usize,
    /// Position of the source end for directed chords.
    pub dir_from: Option<usize>,
}

/// A disk-base normal form: marked circle positions plus disjoint chords.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChordDiagram {
    points: BTreeMap<usize, MarkKind>,
    chords: Vec<Chord>,
}

#[derive(Debug, Error)]
pub enum RationalError {
    #[error("invalid chord diagram: {0}")]
    InvalidDiagram(String),
    #[error("mismatched boundary data: {0}")]
    BoundaryMismatch(String),
    #[error("skeleton is not a disk forest with boundary vertices: {0}")]
    NotDisk(String),
    #[error("block construction rejected: {0}")]
    Block(String),
    #[error("junction rejected: {0}")]
    Junction(String),
    #[error("{0}")]
    Other(String),
}

impl ChordDiagram {
    pub fn assemble(
        points: Vec<(usize, MarkKind)>,
        chords: Vec<(usize, usize, Option<usize>)>,
    ) -> Result<ChordDiagram, String> {
        let mut map = BTreeMap::new();
        for (p, k) in points {
            if map.insert(p, k).is_some() {
                return Err(format!("duplicate point {}", p));
            }
        }
        let mut cs = Vec::new();
        for (a, b, dir) in chords {
            if !map.contains_key(&a) || !map.contains_key(&b) {
                return Err(format!("chord ({}, {}) uses unknown points", a, b));
            }
            if let Some(f) = dir {
                if f != a && f != b {
                    return Err(format!("chord ({}, {}) direction from {}", a, b, f));
                }
            }
            cs.push(Chord { a, b, dir_from: dir });
        }
        cs.sort_by_key(|c| (c.a.min(c.b), c.a.max(c.b)));
        Ok(ChordDiagram {
            points: map,
            chords: cs,
        })
    }

    pub fn points(&self) -> Vec<(usize, MarkKind)> {
        self.points.iter().map(|(p, k)| (*p, *k)).collect()
    }
    pub fn chords(&self) -> &[Chord] {
        &self.chords
    }

    /// Structural validity: chord ends match kinds, valencies are right,
    /// chords are pairwise non-crossing, directed/undirected alternate.
    pub fn validate(&self) -> Result<(), RationalError> {
        let mut deg: BTreeMap<usize, usize> = BTreeMap::new();
        for c in &self.chords {
            *deg.entry(c.a).or_insert(0) += 1;
            *deg.entry(c.b).or_insert(0) += 1;
            let (ka, kb) = (self.points[&c.a], self.points[&c.b]);
            match (ka, kb) {
                (MarkKind::Undirected, MarkKind::Undirected) => {
                    if c.dir_from.is_some() {
                        return Err(RationalError::InvalidDiagram(format!(
                            "undirected chord ({}, {}) carries a direction",
                            c.a, c.b
                        )));
                    }
                }
                (MarkKind::Source, MarkKind::Sink) | (MarkKind::Sink, MarkKind::Source) => {
                    let from = c.dir_from.ok_or_else(|| {
                        RationalError::InvalidDiagram(format!(
                            "directed chord ({}, {}) lacks a direction",
                            c.a, c.b
                        ))
                    })?;
                    let src = if ka == MarkKind::Source { c.a } else { c.b };
                    if from != src {
                        return Err(RationalError::InvalidDiagram(format!(
                            "chord ({}, {}) must run from its source",
                            c.a, c.b
                        )));
                    }
                }
                _ => {
                    return Err(RationalError::InvalidDiagram(format!(
                        "chord ({}, {}) joins {} and {}",
                        c.a,
                        c.b,
                        ka.as_str(),
                        kb.as_str()
                    )))
                }
            }
        }
        for (p, k) in &self.points {
            let expect = match k {
                MarkKind::Zigzag => 0,
                _ => 1,
            };
            if deg.get(p).copied().unwrap_or(0) != expect {
                return Err(RationalError::InvalidDiagram(format!(
                    "point {} ({}) has {} chord ends, expected {}",
                    p,
                    k.as_str(),
                    deg.get(p).copied().unwrap_or(0),
                    expect
                )));
            }
        }
        // non-crossing: order positions circularly
        let order: Vec<usize> = self.points.keys().copied().collect();
        let rank: BTreeMap<usize, usize> = order.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        for (i, c1) in self.chords.iter().enumerate() {
            for c2 in self.chords.iter().skip(i + 1) {
                let (a, b) = (rank[&c1.a].min(rank[&c1.b]), rank[&c1.a].max(rank[&c1.b]));
                let (c, dd) = (rank[&c2.a].min(rank[&c2.b]), rank[&c2.a].max(rank[&c2.b]));
                let inside_c = a < c && c < b;
                let inside_d = a < dd && dd < b;
                if inside_c != inside_d {
                    return Err(RationalError::InvalidDiagram(format!(
                        "chords ({}, {}) and ({}, {}) cross",
                        c1.a, c1.b, c2.a, c2.b
                    )));
                }
            }
        }
        // alternation of directed/undirected around the circle
        let n = order.len();
        if n >= 2 {
            for i in 0..n {
                let k1 = self.points[&order[i]].directed();
                let k2 = self.points[&order[(i + 1) % n]].directed();
                if k1 == k2 {
                    return Err(RationalError::InvalidDiagram(format!(
                        "points {} and {} break the parity rule",
                        order[i],
                        order[(i + 1) % n]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// to_chord_form: destroy bridges until every vertex has valency at most
/// one, then read off the diagram. Returns the diagram, the move path,
/// and the reduced skeleton.
pub fn to_chord_form(
    s: &AbstractSkeleton,
) -> Result<(ChordDiagram, Vec<SkeletonMove>, AbstractSkeleton), RationalError> {
    let rep = validate_skeleton(s);
    if !rep.is_empty() {
        return Err(RationalError::NotDisk(rep.to_string()));
    }
    if s.graph.boundary.len() != 1 || s.graph.surface_genus() != Some(0) {
        return Err(RationalError::NotDisk(
            "chord form needs a skeleton on a disk".into(),
        ));
    }
    for v in s.graph.vertices.values() {
        if !v.locus.is_real() {
            return Err(RationalError::NotDisk(format!(
                "vertex {} is inner",
                v.id
            )));
        }
    }
    let mut cur = s.clone();
    let mut path = Vec::new();
    loop {
        // least vertex with chord valency >= 2
        let mut site: Option<(VertexId, DartId, DartId)> = None;
        for v in cur.graph.vertices.keys() {
            if cur.chord_valency(v) >= 2 {
                let rot = cur.chord_rotation(v).ok_or_else(|| {
                    RationalError::Other("rotation failure during reduction".into())
                })?;
                site = Some((v.clone(), rot[0].clone(), rot[1].clone()));
                break;
            }
        }
        let (v, x, y) = match site {
            Some(t) => t,
            None => break,
        };
        let m = SkeletonMove::DestroyBridge { v, x, y };
        cur = apply_skeleton_move(&cur, &m)
            .map_err(|e| RationalError::Other(format!("bridge destruction failed: {}", e)))?;
        path.push(m);
        if path.len() > 10_000 {
            return Err(RationalError::Other("reduction does not terminate".into()));
        }
    }
    let diagram = diagram_of_reduced(&cur)?;
    Ok((diagram, path, cur))
}

/// Reads a chord diagram off a reduced (valency <= 1) disk skeleton.
pub fn diagram_of_reduced(s: &AbstractSkeleton) -> Result<ChordDiagram, RationalError> {
    let mut points = Vec::new();
    let mut pos_of: BTreeMap<VertexId, usize> = BTreeMap::new();
    for v in s.graph.vertices.values() {
        let pos = match &v.locus {
            Locus::Real { pos, .. } => *pos,
            Locus::Inner => {
                return Err(RationalError::NotDisk("inner vertex in chord form".into()))
            }
        };
        pos_of.insert(v.id.clone(), pos);
        let val = s.chord_valency(&v.id);
        let kind = match (s.vertex_part[&v.id], val) {
            (Part::Undirected, 0) => MarkKind::Zigzag,
            (Part::Undirected, 1) => MarkKind::Undirected,
            (Part::Directed, 1) => {
                if crate::skeleton::is_source(s, &v.id) == Some(true) {
                    MarkKind::Source
                } else {
                    MarkKind::Sink
                }
            }
            (_, k) => {
                return Err(RationalError::NotDisk(format!(
                    "vertex {} has valency {} after reduction",
                    v.id, k
                )))
            }
        };
        points.push((pos, kind));
    }
    let mut chords = Vec::new();
    for e in s.skeleton_edges() {
        let edge = &s.graph.edges[&e];
        let a = pos_of[&edge.ends.0];
        let b = pos_of[&edge.ends.1];
        let dir = s.dir.get(&e).map(|dd| {
            if *dd == edge.darts.0 {
                a
            } else {
                b
            }
        });
        chords.push((a, b, dir));
    }
    ChordDiagram::assemble(points, chords).map_err(RationalError::InvalidDiagram)
}

/// Rebuilds a skeleton from a chord diagram (positions become boundary
/// positions 0..n-1 in circular order).
pub fn diagram_to_skeleton(c: &ChordDiagram) -> Result<AbstractSkeleton, RationalError> {
    c.validate()?;
    let order: Vec<(usize, MarkKind)> = c.points();
    let rank: BTreeMap<usize, usize> = order
        .iter()
        .enumerate()
        .map(|(i, (p, _))| (*p, i))
        .collect();
    let mut vertices = Vec::new();
    for (p, k) in &order {
        let part = if k.directed() {
            Part::Directed
        } else {
            Part::Undirected
        };
        vertices.push((
            0usize,
            VertexId::new(format!("v{}", p)),
            Locus::Real {
                bc: BoundaryId::new("b0"),
                pos: rank[p],
            },
            part,
        ));
    }
    let mut sedges = Vec::new();
    for (i, ch) in c.chords().iter().enumerate() {
        let dir = ch.dir_from.map(|f| format!("v{}", f));
        sedges.push((
            0usize,
            EdgeId::new(format!("c{}", i)),
            VertexId::new(format!("v{}", ch.a)),
            VertexId::new(format!("v{}", ch.b)),
            dir,
        ));
    }
    AbstractSkeleton::assemble(vertices, sedges, Vec::new()).map_err(RationalError::NotDisk)
}

/// Canonical encoding: repeatedly remove the least-position adjacent
/// compatible pair of non-zigzag marks (re-matching is justified by the
/// disk classification), recording endpoints and kinds; trailing zigzag
/// positions close the encoding. Diagrams with the same marked boundary
/// produce identical encodings.
pub fn canonical_form(c: &ChordDiagram) -> Result<String, RationalError> {
    c.validate()?;
    let mut marks: Vec<(usize, MarkKind)> = c
        .points()
        .into_iter()
        .filter(|(_, k)| *k != MarkKind::Zigzag)
        .collect();
    let zigzags: Vec<usize> = c
        .points()
        .into_iter()
        .filter(|(_, k)| *k == MarkKind::Zigzag)
        .map(|(p, _)| p)
        .collect();
    let compatible = |a: MarkKind, b: MarkKind| -> bool {
        matches!(
            (a, b),
            (MarkKind::Source, MarkKind::Sink)
                | (MarkKind::Sink, MarkKind::Source)
                | (MarkKind::Undirected, MarkKind::Undirected)
        )
    };
    let mut out = Vec::new();
    while !marks.is_empty() {
        let n = marks.len();
        let mut removed = false;
        for i in 0..n {
            let (p1, k1) = marks[i];
            let (p2, k2) = marks[(i + 1) % n];
            if compatible(k1, k2) {
                out.push(format!("({}:{},{}:{})", p1, k1.as_str(), p2, k2.as_str()));
                let j = (i + 1) % n;
                let mut keep = Vec::new();
                for (t, m) in marks.iter().enumerate() {
                    if t != i && t != j {
                        keep.push(*m);
                    }
                }
                marks = keep;
                removed = true;
                break;
            }
        }
        if !removed {
            return Err(RationalError::InvalidDiagram(
                "no adjacent compatible pair; the diagram admits no matching".into(),
            ));
        }
    }
    let z: Vec<String> = zigzags.iter().map(|p| p.to_string()).collect();
    Ok(format!("{}|z[{}]", out.join(""), z.join(",")))
}

/// decide_equivalence: diagrams over the same marked boundary are
/// equivalent iff their canonical forms coincide.
pub fn decide_equivalence(c1: &ChordDiagram, c2: &ChordDiagram) -> Result<bool, RationalError> {
    let p1: Vec<usize> = c1.points().iter().map(|(p, _)| *p).collect();
    let p2: Vec<usize> = c2.points().iter().map(|(p, _)| *p).collect();
    if p1 != p2 {
        return Err(RationalError::BoundaryMismatch(
            "diagrams mark different boundary points".into(),
        ));
    }
    if c1.points() != c2.points() {
        return Ok(false);
    }
    Ok(canonical_form(c1)? == canonical_form(c2)?)
}

/// build_block: the degree-3n block with ovals about O, jumps at J and a
/// zigzag between any two consecutive marked points.
pub fn build_block(
    n: usize,
    ovals: &[usize],
    jumps: &[usize],
) -> Result<(Dessin, RegionLabelling), RationalError> {
    if n == 0 {
        return Err(RationalError::Block("n must be positive".into()));
    }
    if ovals.len() != n || jumps.len() != n {
        return Err(RationalError::Block(format!(
            "need {} ovals and {} jumps",
            n, n
        )));
    }
    let mut o = ovals.to_vec();
    let mut j = jumps.to_vec();
    o.sort_unstable();
    j.sort_unstable();
    o.dedup();
    j.dedup();
    if o.len() != n || j.len() != n || o.iter().any(|p| j.contains(p)) {
        return Err(RationalError::Block(
            "oval and jump points must be distinct".into(),
        ));
    }
    // chords from sorted jumps to sorted ovals, then resolve crossings
    let mut all: Vec<(usize, MarkKind)> = Vec::new();
    for p in &o {
        all.push((*p, MarkKind::Sink));
    }
    for p in &j {
        all.push((*p, MarkKind::Source));
    }
    all.sort();
    let rank: BTreeMap<usize, usize> = all.iter().enumerate().map(|(i, (p, _))| (*p, i)).collect();
    let mut chords: Vec<(usize, usize)> = j.iter().zip(o.iter()).map(|(a, b)| (*a, *b)).collect();
    // crossing resolution, lexicographic sweep
    let crosses = |c1: (usize, usize), c2: (usize, usize), rank: &BTreeMap<usize, usize>| -> bool {
        let m = rank.len();
        let (a, b) = (rank[&c1.0], rank[&c1.1]);
        let (c, dd) = (rank[&c2.0], rank[&c2.1]);
        let between = |x: usize, lo: usize, hi: usize| -> bool {
            // x strictly inside the arc lo -> hi (cyclic)
            if lo < hi {
                lo < x && x < hi
            } else {
                x > lo || x < hi
            }
        };
        let _ = m;
        between(c, a, b) != between(dd, a, b)
    };
    let mut guard = 0;
    loop {
        guard += 1;
        if guard > 100_000 {
            return Err(RationalError::Block("crossing resolution diverged".into()));
        }
        let mut done = true;
        'outer: for i in 0..chords.len() {
            for k in i + 1..chords.len() {
                if crosses(chords[i], chords[k], &rank) {
                    // resolve respecting orientation: sources keep tails
                    let (a, b) = chords[i];
                    let (c, dd) = chords[k];
                    chords[i] = (a, dd);
                    chords[k] = (c, b);
                    done = false;
                    break 'outer;
                }
            }
        }
        if done {
            break;
        }
    }
    // final positions: rescale to 0..4n-1 with zigzags in every gap
    let mut points: Vec<(usize, MarkKind)> = Vec::new();
    let mut newpos: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, (p, k)) in all.iter().enumerate() {
        newpos.insert(*p, 2 * i);
        points.push((2 * i, *k));
        points.push((2 * i + 1, MarkKind::Zigzag));
    }
    let chord_list: Vec<(usize, usize, Option<usize>)> = chords
        .iter()
        .map(|(a, b)| (newpos[a], newpos[b], Some(newpos[a])))
        .collect();
    let diagram = ChordDiagram::assemble(points, chord_list).map_err(RationalError::InvalidDiagram)?;
    diagram.validate()?;
    let skel = diagram_to_skeleton(&diagram)?;
    let (dessin, labelling) =
        extend_to_dessin(&skel).map_err(|e| RationalError::Block(e.to_string()))?;
    Ok((dessin, labelling))
}

/// junction: boundary connected sum of two dessins along same-color real
/// edges whose region sides agree in orientation sign.
pub fn junction(
    d1: &Dessin,
    e1: &EdgeId,
    d2: &Dessin,
    e2: &EdgeId,
) -> Result<Dessin, RationalError> {
    let merged = raw_junction(d1, e1, d2, e2)?;
    let rep = crate::dessin::validate_dessin(&merged);
    if !rep.is_empty() {
        return Err(RationalError::Junction(format!(
            "result is not a dessin:\n{}",
            rep
        )));
    }
    match crate::typing::solve_labelling(&merged) {
        Ok(outcome) if outcome.is_type_i() => Ok(merged),
        Ok(_) => Err(RationalError::Junction(
            "result is of type II; gluing site rejected".into(),
        )),
        Err(e) => Err(RationalError::Junction(e.to_string())),
    }
}

/// The connected-sum surgery without the type-I quarantine; used by the
/// generators to manufacture type-II instances.
pub fn raw_junction(
    d1: &Dessin,
    e1: &EdgeId,
    d2: &Dessin,
    e2: &EdgeId,
) -> Result<Dessin, RationalError> {
    for (d, e) in [(d1, e1), (d2, e2)] {
        if !d.graph.is_real_edge(e) {
            return Err(RationalError::Junction(format!("{} is not real", e)));
        }
    }
    if d1.color_of(e1) != d2.color_of(e2) {
        return Err(RationalError::Junction("gluing colors differ".into()));
    }
    // relabel d2 with a prefix to avoid id collisions
    let p2 = prefix_dessin(d2, "J.");
    let e2p = EdgeId::new(format!("J.{}", e2));
    // merge structures
    let mut out = d1.clone();
    out.graph.vertices.extend(p2.graph.vertices.clone());
    out.graph.edges.extend(p2.graph.edges.clone());
    out.graph.regions.extend(p2.graph.regions.clone());
    out.graph.boundary.extend(p2.graph.boundary.clone());
    out.color.extend(p2.color.clone());
    out.kind.extend(p2.kind.clone());
    out.dir.extend(p2.dir.clone());
    // orientation signs on the gluing sides must agree
    let idx = out.graph.index();
    let w1 = {
        let ed = out.graph.edge(e1).clone();
        if idx.dart_region.contains_key(&ed.darts.0) {
            ed.darts.0
        } else {
            ed.darts.1
        }
    };
    let w2 = {
        let ed = out.graph.edge(&e2p).clone();
        if idx.dart_region.contains_key(&ed.darts.0) {
            ed.darts.0
        } else {
            ed.darts.1
        }
    };
    let fwd1 = out.dir[e1] == w1;
    let fwd2 = out.dir[&e2p] == w2;
    if fwd1 != fwd2 {
        return Err(RationalError::Junction(
            "gluing sides have opposite orientation signs".into(),
        ));
    }
    // cross-splice the edges: e1 = (u1 -> w1v), e2 = (u2 -> w2v) along
    // their walk darts; merged: e1 = (u1, w2v), e2' = (u2, w1v)
    let (u1, w1v) = (idx.tail(&w1).clone(), idx.head(&w1).clone());
    let (u2, w2v) = (idx.tail(&w2).clone(), idx.head(&w2).clone());
    {
        let ed = out.graph.edges.get_mut(e1).unwrap();
        if ed.darts.0 == w1 {
            ed.ends = (u1.clone(), w2v.clone());
        } else {
            ed.ends = (w2v.clone(), u1.clone());
        }
    }
    {
        let ed = out.graph.edges.get_mut(&e2p).unwrap();
        if ed.darts.0 == w2 {
            ed.ends = (u2.clone(), w1v.clone());
        } else {
            ed.ends = (w1v.clone(), u2.clone());
        }
    }
    // region merge: walks [w1-dart...] and [w2-dart...] splice crosswise
    let (r1, wi1, pp1) = locate_in(&out, &w1)
        .ok_or_else(|| RationalError::Junction("gluing edge not in a walk".into()))?;
    let (r2, wi2, pp2) = locate_in(&out, &w2)
        .ok_or_else(|| RationalError::Junction("gluing edge not in a walk".into()))?;
    if r1 == r2 {
        return Err(RationalError::Junction("edges already share a region".into()));
    }
    {
        let reg2 = out.graph.regions.remove(&r2).unwrap();
        let reg1 = out.graph.regions.get_mut(&r1).unwrap();
        let ds1 = match &reg1.walks[wi1] {
            crate::surface::Walk::Darts(x) => x.clone(),
            _ => unreachable!(),
        };
        let ds2 = match &reg2.walks[wi2] {
            crate::surface::Walk::Darts(x) => x.clone(),
            _ => unreachable!(),
        };
        let rot1 = rotate(&ds1, pp1); // [w1, A..]
        let rot2 = rotate(&ds2, pp2); // [w2, B..]
        let mut merged = vec![rot1[0].clone()];
        merged.extend(rot2[1..].iter().cloned());
        merged.push(rot2[0].clone());
        merged.extend(rot1[1..].iter().cloned());
        reg1.walks[wi1] = crate::surface::Walk::Darts(merged);
        for (wi, w) in reg2.walks.into_iter().enumerate() {
            if wi != wi2 {
                reg1.walks.push(w);
            }
        }
        reg1.genus += reg2.genus;
    }
    // boundary merge: splice the two circles at the cut edges
    let mut items1 = None;
    let mut items2 = None;
    for (i, b) in out.graph.boundary.iter().enumerate() {
        if b.items.iter().any(|it| matches!(it, BoundaryItem::E(e) if e == e1)) {
            items1 = Some(i);
        } else if b
            .items
            .iter()
            .any(|it| matches!(it, BoundaryItem::E(e) if e == &e2p))
        {
            items2 = Some(i);
        }
    }
    use crate::surface::BoundaryItem;
    let (i1, i2) = match (items1, items2) {
        (Some(a), Some(b)) if a != b => (a, b),
        _ => {
            return Err(RationalError::Junction(
                "gluing edges must lie on distinct boundary circles".into(),
            ))
        }
    };
    {
        let b2 = out.graph.boundary[i2].items.clone();
        let b1 = &mut out.graph.boundary[i1].items;
        let p1 = b1
            .iter()
            .position(|it| matches!(it, BoundaryItem::E(e) if e == e1))
            .unwrap();
        let p2 = b2
            .iter()
            .position(|it| matches!(it, BoundaryItem::E(e) if e == &e2p))
            .unwrap();
        // circle1: [.., u1?, e1, w1v?, ..]; splice circle2 rotated at e2
        // so that e1 -> [e1-first-half..]: the merged circle:
        // [..before e1.., e1, (circle2 after e2), e2p, (circle2 before e2 tail)? ..]
        // Orientation bookkeeping: new boundary order follows
        //   ... u1, e1, w2v, ...circle2..., u2, e2p, w1v, ...
        let rot2: Vec<BoundaryItem> = {
            let mut r = b2.clone();
            r.rotate_left(p2);
            r
        };
        let mut merged: Vec<BoundaryItem> = Vec::new();
        // b1 up to and including e1
        for it in b1.iter().take(p1 + 1) {
            merged.push(it.clone());
        }
        // circle2 after e2p (positions 1..) then e2p
        for it in rot2.iter().skip(1) {
            merged.push(it.clone());
        }
        merged.push(rot2[0].clone());
        // rest of b1
        for it in b1.iter().skip(p1 + 1) {
            merged.push(it.clone());
        }
        *b1 = merged;
    }
    out.graph.boundary.remove(i2);
    crate::moves::renumber_positions_pub(&mut out);
    Ok(out)
}

fn rotate(v: &[DartId], p: usize) -> Vec<DartId> {
    let mut out = Vec::with_capacity(v.len());
    out.extend_from_slice(&v[p..]);
    out.extend_from_slice(&v[..p]);
    out
}

fn locate_in(d: &Dessin, dart: &DartId) -> Option<(crate::ids::RegionId, usize, usize)> {
    for reg in d.graph.regions.values() {
        for (wi, w) in reg.walks.iter().enumerate() {
            if let crate::surface::Walk::Darts(ds) = w {
                if let Some(p) = ds.iter().position(|x| x == dart) {
                    return Some((reg.id.clone(), wi, p));
                }
            }
        }
    }
    None
}

/// Prefixes every id of a dessin; used to juxtapose two dessins.
pub fn prefix_dessin(d: &Dessin, prefix: &str) -> Dessin {
    let pv = |v: &VertexId| VertexId::new(format!("{}{}", prefix, v));
    let pe = |e: &EdgeId| EdgeId::new(format!("{}{}", prefix, e));
    let pd = |x: &DartId| DartId::new(format!("{}{}", prefix, x));
    let pr = |r: &crate::ids::RegionId| crate::ids::RegionId::new(format!("{}{}", prefix, r));
    let pb = |b: &BoundaryId| BoundaryId::new(format!("{}{}", prefix, b));
    let mut g = crate::surface::EmbeddedGraph::default();
    for v in d.graph.vertices.values() {
        let locus = match &v.locus {
            Locus::Inner => Locus::Inner,
            Locus::Real { bc, pos } => Locus::Real {
                bc: pb(bc),
                pos: *pos,
            },
        };
        g.vertices.insert(
            pv(&v.id),
            crate::surface::Vertex {
                id: pv(&v.id),
                locus,
            },
        );
    }
    for e in d.graph.edges.values() {
        g.edges.insert(
            pe(&e.id),
            crate::surface::Edge {
                id: pe(&e.id),
                ends: (pv(&e.ends.0), pv(&e.ends.1)),
                darts: (pd(&e.darts.0), pd(&e.darts.1)),
            },
        );
    }
    for r in d.graph.regions.values() {
        g.regions.insert(
            pr(&r.id),
            crate::surface::Region {
                id: pr(&r.id),
                genus: r.genus,
                walks: r
                    .walks
                    .iter()
                    .map(|w| match w {
                        crate::surface::Walk::Darts(ds) => {
                            crate::surface::Walk::Darts(ds.iter().map(|x| pd(x)).collect())
                        }
                        crate::surface::Walk::Puncture(v) => {
                            crate::surface::Walk::Puncture(pv(v))
                        }
                    })
                    .collect(),
            },
        );
    }
    for b in &d.graph.boundary {
        g.boundary.push(crate::surface::BoundaryComponent {
            id: pb(&b.id),
            items: b
                .items
                .iter()
                .map(|it| match it {
                    crate::surface::BoundaryItem::V(v) => {
                        crate::surface::BoundaryItem::V(pv(v))
                    }
                    crate::surface::BoundaryItem::E(e) => {
                        crate::surface::BoundaryItem::E(pe(e))
                    }
                })
                .collect(),
        });
    }
    Dessin {
        graph: g,
        color: d.color.iter().map(|(e, c)| (pe(e), *c)).collect(),
        kind: d.kind.iter().map(|(v, k)| (pv(v), *k)).collect(),
        dir: d.dir.iter().map(|(e, x)| (pe(e), pd(x))).collect(),
    }
}

/// Pillar budget for class enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub ovals2: usize,
    pub ovals3: usize,
    pub jumps: usize,
    pub zigzags: usize,
}

/// enumerate_classes: all deformation classes with the given pillar
/// budget, as canonical encodings of representative chord diagrams.
/// Each class is verified by building a representative dessin.
pub fn enumerate_classes(budget: Budget) -> Result<Vec<String>, RationalError> {
    let directed = budget.ovals2 + budget.jumps;
    let undirected = budget.ovals3 + budget.zigzags;
    let mut out: BTreeSet<String> = BTreeSet::new();
    if directed != undirected || directed == 0 {
        return Ok(Vec::new());
    }
    if budget.jumps != budget.ovals2 {
        // every directed tree balances sources against sinks
        return Ok(Vec::new());
    }
    if budget.ovals3 % 2 != 0 {
        return Ok(Vec::new());
    }
    let n = 2 * directed;
    // positions 0..n-1 alternate directed (even) / undirected (odd)
    // choose which directed slots are jumps and which undirected slots
    // are ovals3; dedup arrangements by minimal rotation (rotating by 2
    // keeps the parity classes aligned)
    let dslots = directed;
    let uslots = undirected;
    let mut arrangements: BTreeSet<Vec<MarkKind>> = BTreeSet::new();
    for dmask in 0u32..(1 << dslots) {
        if (dmask.count_ones() as usize) != budget.jumps {
            continue;
        }
        for umask in 0u32..(1 << uslots) {
            if (umask.count_ones() as usize) != budget.ovals3 {
                continue;
            }
            let mut seq: Vec<MarkKind> = Vec::with_capacity(n);
            for i in 0..dslots {
                seq.push(if dmask & (1 << i) != 0 {
                    MarkKind::Source
                } else {
                    MarkKind::Sink
                });
                seq.push(if umask & (1 << i) != 0 {
                    MarkKind::Undirected
                } else {
                    MarkKind::Zigzag
                });
            }
            // minimal rotation by steps of 2
            let mut best: Option<Vec<MarkKind>> = None;
            for r in 0..dslots {
                let mut cand = seq.clone();
                cand.rotate_left(2 * r);
                if best.as_ref().map_or(true, |b| cand < *b) {
                    best = Some(cand);
                }
            }
            arrangements.insert(best.unwrap());
        }
    }
    for seq in arrangements {
        if let Some(diagram) = match_arrangement(&seq)? {
            // verify by construction: extend, validate, re-canonicalize
            let skel = diagram_to_skeleton(&diagram)?;
            if let Ok((dessin, labelling)) = extend_to_dessin(&skel) {
                let re = crate::skeleton::extract_skeleton(&dessin, &labelling)
                    .map_err(|e| RationalError::Other(e.to_string()))?;
                let (rec, _, _) = to_chord_form(&re)?;
                let canon = canonical_form(&rec)?;
                let canon_direct = canonical_form(&diagram)?;
                if canon != canon_direct {
                    return Err(RationalError::Other(format!(
                        "representative does not recanonicalize: {} vs {}",
                        canon, canon_direct
                    )));
                }
                out.insert(canon);
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Public wrapper over the matching feasibility check: given a cyclic
/// kind sequence (positions 0..n-1), returns a valid diagram if some
/// non-crossing type-respecting matching exists.
pub fn feasible_diagram(seq: &[MarkKind]) -> Result<Option<ChordDiagram>, RationalError> {
    match_arrangement(seq)
}

/// Finds a non-crossing type-respecting matching for an arrangement, if
/// any, and returns the diagram. Interval dynamic programming.
fn match_arrangement(seq: &[MarkKind]) -> Result<Option<ChordDiagram>, RationalError> {
    let n = seq.len();
    let active: Vec<usize> = (0..n).filter(|i| seq[*i] != MarkKind::Zigzag).collect();
    let m = active.len();
    // memoized feasibility of matching active[i..j) among themselves
    fn feasible(
        i: usize,
        j: usize,
        active: &[usize],
        seq: &[MarkKind],
        memo: &mut BTreeMap<(usize, usize), Option<Vec<(usize, usize)>>>,
    ) -> Option<Vec<(usize, usize)>> {
        if i >= j {
            return Some(Vec::new());
        }
        if let Some(v) = memo.get(&(i, j)) {
            return v.clone();
        }
        let mut res = None;
        // match active[i] with some active[k], i < k < j, splitting
        for k in (i + 1..j).step_by(1) {
            let (a, b) = (active[i], active[k]);
            let ok = matches!(
                (seq[a], seq[b]),
                (MarkKind::Source, MarkKind::Sink)
                    | (MarkKind::Sink, MarkKind::Source)
                    | (MarkKind::Undirected, MarkKind::Undirected)
            );
            if !ok {
                continue;
            }
            if let Some(inner) = feasible(i + 1, k, active, seq, memo) {
                if let Some(outer) = feasible(k + 1, j, active, seq, memo) {
                    let mut v = vec![(a, b)];
                    v.extend(inner);
                    v.extend(outer);
                    res = Some(v);
                    break;
                }
            }
        }
        memo.insert((i, j), res.clone());
        res
    }
    let mut memo = BTreeMap::new();
    let matching = feasible(0, m, &active, seq, &mut memo);
    let matching = match matching {
        Some(v) => v,
        None => return Ok(None),
    };
    let points: Vec<(usize, MarkKind)> = seq.iter().enumerate().map(|(i, k)| (i, *k)).collect();
    let chords: Vec<(usize, usize, Option<usize>)> = matching
        .into_iter()
        .map(|(a, b)| {
            let dir = if seq[a] == MarkKind::Source {
                Some(a)
            } else if seq[b] == MarkKind::Source {
                Some(b)
            } else {
                None
            };
            (a, b, dir)
        })
        .collect();
    let c = ChordDiagram::assemble(points, chords).map_err(RationalError::InvalidDiagram)?;
    match c.validate() {
        Ok(()) => Ok(Some(c)),
        Err(_) => Ok(None),
    }
}
