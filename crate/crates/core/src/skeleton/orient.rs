//! Admissible orientations of the undirected part, triggers and diodes,
//! and elementary inversions.
//!
//! An orientation of the undirected part is admissible when at each
//! vertex no two incoming edges are immediate rotation neighbors. The
//! constructive tool is anchor propagation: orienting an edge forces
//! every rotation neighbor at its head outward, and so on along first
//! neighbor paths.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::ids::{DartId, EdgeId};

use super::{edge_of_dart, AbstractSkeleton, Part};

/// Chosen forward dart for every undirected edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleOrientation {
    pub forward: BTreeMap<EdgeId, DartId>,
}

#[derive(Debug, Error)]
pub enum OrientError {
    #[error("anchor {0} conflicts in both senses; the skeleton has a first neighbor cycle")]
    AnchorConflict(EdgeId),
    #[error("orientation is not admissible: {0}")]
    NotAdmissible(String),
    #[error("inversion path construction failed: {0}")]
    Inversion(String),
}

/// Undirected skeleton edges, sorted.
fn undirected_edges(s: &AbstractSkeleton) -> Vec<EdgeId> {
    s.skeleton_edges()
        .into_iter()
        .filter(|e| {
            let ends = &s.graph.edges[e].ends;
            s.vertex_part.get(&ends.0) == Some(&Part::Undirected)
        })
        .collect()
}

/// Propagates a seed orientation through first neighbor paths.
/// `assign` maps undirected edges to forward darts; directed edges are
/// consulted read-only. Returns the list of edges newly oriented, in BFS
/// order with depths, or the conflicting edge.
fn propagate(
    s: &AbstractSkeleton,
    assign: &mut BTreeMap<EdgeId, DartId>,
    seed: DartId,
    order: &mut Vec<(EdgeId, usize)>,
) -> Result<(), EdgeId> {
    let idx = s.graph.index();
    let seed_edge = edge_of_dart(s, &seed);
    match assign.get(&seed_edge) {
        Some(d) if *d == seed => return Ok(()),
        Some(_) => return Err(seed_edge),
        None => {}
    }
    assign.insert(seed_edge.clone(), seed.clone());
    order.push((seed_edge, 0));
    let mut queue = VecDeque::new();
    queue.push_back((seed, 0usize));
    while let Some((d, depth)) = queue.pop_front() {
        // every rotation neighbor of rev(d) at head(d) must point outward
        let v = idx.head(&d).clone();
        let rev = idx.rev(&d);
        let rot = match s.chord_rotation(&v) {
            Some(r) => r,
            None => continue,
        };
        let n = rot.len();
        let pos = match rot.iter().position(|x| *x == rev) {
            Some(p) => p,
            None => continue,
        };
        let inner = !s.graph.vertices[&v].locus.is_real();
        let mut neighbors = Vec::new();
        if inner {
            if n == 1 {
                neighbors.push(rot[0].clone());
            } else {
                neighbors.push(rot[(pos + 1) % n].clone());
                neighbors.push(rot[(pos + n - 1) % n].clone());
            }
        } else {
            if pos + 1 < n {
                neighbors.push(rot[pos + 1].clone());
            }
            if pos > 0 {
                neighbors.push(rot[pos - 1].clone());
            }
        }
        neighbors.sort();
        neighbors.dedup();
        for out in neighbors {
            let e = edge_of_dart(s, &out);
            // directed edges participate as fixed assignments
            let fixed = s.dir.get(&e).cloned();
            let current = fixed.or_else(|| assign.get(&e).cloned());
            match current {
                Some(x) if x == out => {}
                Some(_) => return Err(e),
                None => {
                    assign.insert(e.clone(), out.clone());
                    order.push((e, depth + 1));
                    queue.push_back((out, depth + 1));
                }
            }
        }
    }
    Ok(())
}

/// Checks admissibility directly.
pub fn is_admissible(s: &AbstractSkeleton, o: &AdmissibleOrientation) -> bool {
    let und = undirected_edges(s);
    for e in &und {
        if !o.forward.contains_key(e) {
            return false;
        }
    }
    let idx = s.graph.index();
    for v in s.graph.vertices.keys() {
        if s.vertex_part.get(v) != Some(&Part::Undirected) {
            continue;
        }
        for (a, b) in s.adjacent_chord_pairs(v) {
            let ea = edge_of_dart(s, &a);
            let eb = edge_of_dart(s, &b);
            let fa = match o.forward.get(&ea) {
                Some(f) => f.clone(),
                None => continue,
            };
            let fb = match o.forward.get(&eb) {
                Some(f) => f.clone(),
                None => continue,
            };
            // incoming at v iff the forward dart ends at v, i.e. is not the out-dart
            let in_a = fa == idx.rev(&a);
            let in_b = fb == idx.rev(&b);
            if a == b {
                if in_a {
                    return false;
                }
            } else if in_a && in_b {
                return false;
            }
        }
    }
    true
}

/// Record of how an orientation was constructed: the anchor darts used
/// and, per anchor, the forced closure with BFS depths.
#[derive(Debug, Clone)]
pub struct AnchorTrace {
    pub anchors: Vec<DartId>,
    pub closures: Vec<Vec<(EdgeId, usize)>>,
}

/// Builds an admissible orientation by anchor propagation. Each anchor
/// dart is tried as given, then reversed; with `anchors` omitted the
/// lexicographically least unoriented edge seeds each round.
pub fn admissible_orientation(
    s: &AbstractSkeleton,
    anchors: Option<&[DartId]>,
) -> Result<AdmissibleOrientation, OrientError> {
    Ok(orient_with_trace(s, anchors, None)?.0)
}

/// Same as [`admissible_orientation`] but also returns the anchor trace.
/// With `target` given, every anchor is seeded with the target's sense,
/// so the construction reproduces `target` when it is admissible.
pub fn orient_with_trace(
    s: &AbstractSkeleton,
    anchors: Option<&[DartId]>,
    target: Option<&AdmissibleOrientation>,
) -> Result<(AdmissibleOrientation, AnchorTrace), OrientError> {
    let idx = s.graph.index();
    let und = undirected_edges(s);
    let mut assign: BTreeMap<EdgeId, DartId> = BTreeMap::new();
    let mut trace = AnchorTrace {
        anchors: Vec::new(),
        closures: Vec::new(),
    };
    let mut anchor_queue: Vec<DartId> = anchors.map(|a| a.to_vec()).unwrap_or_default();
    anchor_queue.reverse(); // pop from the back
    loop {
        // next seed
        let seed = if let Some(a) = anchor_queue.pop() {
            let e = edge_of_dart(s, &a);
            if assign.contains_key(&e) {
                continue;
            }
            a
        } else {
            match und.iter().find(|e| !assign.contains_key(*e)) {
                Some(e) => {
                    let edge = &s.graph.edges[e];
                    match target.and_then(|t| t.forward.get(e)) {
                        Some(d) => d.clone(),
                        None => edge.darts.0.clone(),
                    }
                }
                None => break,
            }
        };
        // try the seed, then its reverse
        let mut trial = assign.clone();
        let mut order = Vec::new();
        match propagate(s, &mut trial, seed.clone(), &mut order) {
            Ok(()) => {
                assign = trial;
                trace.anchors.push(seed);
                trace.closures.push(order);
            }
            Err(_) => {
                let rev = idx.rev(&seed);
                let mut trial2 = assign.clone();
                let mut order2 = Vec::new();
                match propagate(s, &mut trial2, rev.clone(), &mut order2) {
                    Ok(()) => {
                        assign = trial2;
                        trace.anchors.push(rev);
                        trace.closures.push(order2);
                    }
                    Err(_) => {
                        return Err(OrientError::AnchorConflict(edge_of_dart(s, &seed)));
                    }
                }
            }
        }
    }
    let forward: BTreeMap<EdgeId, DartId> = und
        .iter()
        .map(|e| (e.clone(), assign[e].clone()))
        .collect();
    let o = AdmissibleOrientation { forward };
    debug_assert!(is_admissible(s, &o));
    Ok((o, trace))
}

/// Classification of an undirected edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeClass {
    Trigger,
    /// The natural direction every admissible orientation assigns.
    Diode(DartId),
}

/// classify_edges: an undirected edge is a trigger iff both of its darts
/// can seed a consistent first-anchor propagation.
pub fn classify_edges(
    s: &AbstractSkeleton,
) -> Result<BTreeMap<EdgeId, EdgeClass>, OrientError> {
    let mut out = BTreeMap::new();
    for e in undirected_edges(s) {
        let edge = &s.graph.edges[&e];
        let ok_fwd = {
            let mut a = BTreeMap::new();
            let mut ord = Vec::new();
            propagate(s, &mut a, edge.darts.0.clone(), &mut ord).is_ok()
        };
        let ok_bwd = {
            let mut a = BTreeMap::new();
            let mut ord = Vec::new();
            propagate(s, &mut a, edge.darts.1.clone(), &mut ord).is_ok()
        };
        let class = match (ok_fwd, ok_bwd) {
            (true, true) => EdgeClass::Trigger,
            (true, false) => EdgeClass::Diode(edge.darts.0.clone()),
            (false, true) => EdgeClass::Diode(edge.darts.1.clone()),
            (false, false) => return Err(OrientError::AnchorConflict(e.clone())),
        };
        out.insert(e, class);
    }
    Ok(out)
}

/// inversion_path: a sequence of single-edge reversals transforming `o1`
/// into `o2`, each intermediate orientation admissible.
pub fn inversion_path(
    s: &AbstractSkeleton,
    o1: &AdmissibleOrientation,
    o2: &AdmissibleOrientation,
) -> Result<Vec<EdgeId>, OrientError> {
    if !is_admissible(s, o1) {
        return Err(OrientError::NotAdmissible("o1".into()));
    }
    if !is_admissible(s, o2) {
        return Err(OrientError::NotAdmissible("o2".into()));
    }
    let idx = s.graph.index();
    // anchor decomposition reproducing o2
    let (rebuilt, trace) = orient_with_trace(s, None, Some(o2))?;
    if rebuilt != *o2 {
        return Err(OrientError::Inversion(
            "anchor closure does not reproduce the target orientation".into(),
        ));
    }
    let mut current = o1.clone();
    let mut path = Vec::new();
    for closure in &trace.closures {
        loop {
            // deepest edge of this closure still differing from o2
            let mut cand: Option<(usize, EdgeId)> = None;
            for (e, depth) in closure {
                if current.forward[e] != o2.forward[e] {
                    let better = match &cand {
                        None => true,
                        Some((d, ce)) => *depth > *d || (*depth == *d && e < ce),
                    };
                    if better {
                        cand = Some((*depth, e.clone()));
                    }
                }
            }
            let (_, e) = match cand {
                Some(c) => c,
                None => break,
            };
            let mut flipped = current.clone();
            let f = flipped.forward.get_mut(&e).unwrap();
            *f = idx.rev(f);
            if is_admissible(s, &flipped) {
                path.push(e);
                current = flipped;
            } else {
                // fall back to breadth-first search over orientations
                return bfs_inversion_path(s, o1, o2);
            }
        }
    }
    if current != *o2 {
        return bfs_inversion_path(s, o1, o2);
    }
    Ok(path)
}

/// Exhaustive fallback: BFS over admissible orientations by single-edge
/// reversals. Exponential in the number of undirected edges; sizes here
/// are desk scale.
pub fn bfs_inversion_path(
    s: &AbstractSkeleton,
    o1: &AdmissibleOrientation,
    o2: &AdmissibleOrientation,
) -> Result<Vec<EdgeId>, OrientError> {
    let idx = s.graph.index();
    let key = |o: &AdmissibleOrientation| -> Vec<DartId> { o.forward.values().cloned().collect() };
    let mut seen: BTreeSet<Vec<DartId>> = BTreeSet::new();
    let mut queue: VecDeque<(AdmissibleOrientation, Vec<EdgeId>)> = VecDeque::new();
    seen.insert(key(o1));
    queue.push_back((o1.clone(), Vec::new()));
    while let Some((o, path)) = queue.pop_front() {
        if o == *o2 {
            return Ok(path);
        }
        for e in o.forward.keys().cloned().collect::<Vec<_>>() {
            let mut next = o.clone();
            let f = next.forward.get_mut(&e).unwrap();
            *f = idx.rev(f);
            if is_admissible(s, &next) && seen.insert(key(&next)) {
                let mut p = path.clone();
                p.push(e);
                queue.push_back((next, p));
            }
        }
    }
    Err(OrientError::Inversion(
        "orientations are not connected by elementary inversions".into(),
    ))
}

/// Enumerates all admissible orientations (brute force over the
/// undirected edges); used by tests and the trigger-pair checks.
pub fn all_admissible_orientations(s: &AbstractSkeleton) -> Vec<AdmissibleOrientation> {
    let und = undirected_edges(s);
    let mut out = Vec::new();
    let n = und.len();
    if n > 20 {
        panic!("too many undirected edges for brute force");
    }
    for mask in 0u32..(1 << n) {
        let mut forward = BTreeMap::new();
        for (i, e) in und.iter().enumerate() {
            let edge = &s.graph.edges[e];
            let d = if mask & (1 << i) == 0 {
                edge.darts.0.clone()
            } else {
                edge.darts.1.clone()
            };
            forward.insert(e.clone(), d);
        }
        let o = AdmissibleOrientation { forward };
        if is_admissible(s, &o) {
            out.push(o);
        }
    }
    out
}
