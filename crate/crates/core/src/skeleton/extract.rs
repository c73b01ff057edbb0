//! Extraction of the dotted skeleton from an unramified type-I dessin:
//! contract each pillar to a vertex, patch inner dotted edges through
//! inner white vertices, direct the type-2 part, and rebuild the region
//! structure of the cut along the skeleton.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::dessin::{
    analyze_real_components, is_unramified, Dessin, EdgeColor, PillarKind, VertexKind,
};
use crate::ids::{BoundaryId, DartId, EdgeId, RegionId, VertexId};
use crate::surface::{
    BoundaryComponent, BoundaryItem, Edge, EmbeddedGraph, Locus, Region, Vertex, Walk,
};
use crate::typing::{derive_edge_labels, PillarType, RegionLabelling, TypingError};

use super::{arc_dart_ids, arc_edge_id, validate_skeleton, AbstractSkeleton, Part};

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("dessin is not valid:\n{0}")]
    InvalidDessin(String),
    #[error("dessin is not unramified")]
    Ramified,
    #[error("labelling rejected: {0}")]
    Labelling(String),
    #[error("anti-hyperbolic component {0} is not supported by skeleton extraction")]
    AntiHyperbolic(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl From<TypingError> for ExtractError {
    fn from(e: TypingError) -> Self {
        ExtractError::Labelling(e.to_string())
    }
}

pub fn extract_skeleton(
    d: &Dessin,
    l: &RegionLabelling,
) -> Result<AbstractSkeleton, ExtractError> {
    let rep = crate::dessin::validate_dessin(d);
    if !rep.is_empty() {
        return Err(ExtractError::InvalidDessin(rep.to_string()));
    }
    if !is_unramified(d) {
        return Err(ExtractError::Ramified);
    }
    let labrep = crate::typing::check_labelling(d, l)?;
    if !labrep.is_empty() {
        return Err(ExtractError::Labelling(labrep.to_string()));
    }
    let labels = derive_edge_labels(d, l)?;
    let comps = analyze_real_components(d);
    for c in &comps {
        if c.anti_hyperbolic {
            return Err(ExtractError::AntiHyperbolic(c.bc.0.clone()));
        }
    }
    let idx = d.graph.index();

    // pillar vertex per (bc, index); hyperbolic components become inner.
    #[derive(Clone)]
    struct PillarV {
        id: VertexId,
        part: Part,
        /// attachment dessin vertices in support order
        attachments: Vec<VertexId>,
    }
    let mut pillar_of_vertex: BTreeMap<VertexId, (BoundaryId, usize)> = BTreeMap::new();
    let mut pillars: BTreeMap<(BoundaryId, usize), PillarV> = BTreeMap::new();
    let mut type_of: BTreeMap<(BoundaryId, usize), PillarType> = BTreeMap::new();
    for (p, t) in &labels.pillar_types {
        type_of.insert((p.bc.clone(), p.index), *t);
    }
    for c in &comps {
        for p in &c.pillars {
            let key = (p.bc.clone(), p.index);
            let t = type_of.get(&key).copied().ok_or_else(|| {
                ExtractError::Internal("pillar without a type".to_string())
            })?;
            let part = match t {
                PillarType::T2 => Part::Directed,
                PillarType::T3 => Part::Undirected,
                other => {
                    return Err(ExtractError::Labelling(format!(
                        "pillar {}:{} of type {} cannot enter a skeleton",
                        p.bc,
                        p.index,
                        other.as_str()
                    )))
                }
            };
            let id = if p.kind == PillarKind::Hyperbolic {
                VertexId::new(format!("h.{}", p.bc))
            } else {
                VertexId::new(format!("{}.{}", p.bc, p.index))
            };
            // attachments: support vertices carrying an inner dotted edge
            // (dotted monochromes and jump whites), in support order
            let mut attachments = Vec::new();
            for v in &p.support_vertices {
                let has_inner_dotted = d.graph.edges.values().any(|e| {
                    (e.ends.0 == *v || e.ends.1 == *v)
                        && d.color_of(&e.id) == EdgeColor::Dotted
                        && !d.graph.is_real_edge(&e.id)
                });
                if has_inner_dotted {
                    attachments.push(v.clone());
                }
            }
            for v in &p.support_vertices {
                pillar_of_vertex.insert(v.clone(), key.clone());
            }
            pillars.insert(
                key,
                PillarV {
                    id,
                    part,
                    attachments,
                },
            );
        }
    }

    // chains of inner dotted edges patched through inner whites
    let inner_dotted: Vec<EdgeId> = d
        .graph
        .edges
        .keys()
        .filter(|e| d.color_of(e) == EdgeColor::Dotted && !d.graph.is_real_edge(e))
        .cloned()
        .collect();
    // inner white -> its two dotted edges
    let mut white_link: BTreeMap<VertexId, Vec<EdgeId>> = BTreeMap::new();
    for e in &inner_dotted {
        let edge = d.graph.edge(e);
        for v in [&edge.ends.0, &edge.ends.1] {
            if d.kind_of(v) == VertexKind::White && !d.graph.vertices[v].locus.is_real() {
                white_link.entry(v.clone()).or_default().push(e.clone());
            }
        }
    }
    for (w, es) in &white_link {
        if es.len() != 2 {
            return Err(ExtractError::Internal(format!(
                "inner white {} with {} dotted edges",
                w,
                es.len()
            )));
        }
    }
    // walk chains
    #[derive(Clone)]
    struct Chain {
        /// ordered dessin edges with traversal darts (tail to head)
        darts: Vec<DartId>,
        /// attachment endpoints (dessin vertices)
        ends: (VertexId, VertexId),
        directed: bool,
        /// direction runs ends.0 -> ends.1 when directed
        forward: bool,
        id: EdgeId,
    }
    let is_attachment_end = |v: &VertexId| -> bool {
        let vert = &d.graph.vertices[v];
        vert.locus.is_real()
            && matches!(
                d.kind_of(v),
                VertexKind::Monochrome | VertexKind::White
            )
    };
    let mut used: BTreeSet<EdgeId> = BTreeSet::new();
    let mut chains: Vec<Chain> = Vec::new();
    for e in &inner_dotted {
        if used.contains(e) {
            continue;
        }
        // find a free end of the chain containing e
        let mut cur = e.clone();
        let mut from = d.graph.edge(&cur).ends.0.clone();
        // travel backwards to a free end
        let mut guard = 0;
        loop {
            guard += 1;
            if guard > inner_dotted.len() + 2 {
                return Err(ExtractError::Internal("dotted chain loops".into()));
            }
            if is_attachment_end(&from) {
                break;
            }
            // inner white: step to the other dotted edge
            let es = white_link
                .get(&from)
                .ok_or_else(|| ExtractError::Internal(format!("chain stuck at {}", from)))?;
            let other = if es[0] == cur { es[1].clone() } else { es[0].clone() };
            let oe = d.graph.edge(&other);
            from = if oe.ends.0 == from {
                oe.ends.1.clone()
            } else {
                oe.ends.0.clone()
            };
            cur = other;
        }
        // now walk forward from `from` along `cur`
        let mut darts = Vec::new();
        let mut edges_in_chain = Vec::new();
        let start = from.clone();
        let mut v = from;
        let mut guard = 0;
        loop {
            guard += 1;
            if guard > inner_dotted.len() + 2 {
                return Err(ExtractError::Internal("dotted chain loops".into()));
            }
            let edge = d.graph.edge(&cur);
            let dart = if edge.ends.0 == v {
                edge.darts.0.clone()
            } else {
                edge.darts.1.clone()
            };
            darts.push(dart);
            edges_in_chain.push(cur.clone());
            used.insert(cur.clone());
            let w = if edge.ends.0 == v {
                edge.ends.1.clone()
            } else {
                edge.ends.0.clone()
            };
            if is_attachment_end(&w) {
                let directed = edges_in_chain
                    .iter()
                    .all(|x| labels.edges[x] == crate::typing::EdgeLabel::L2);
                // a directed chain is a single dessin edge; its direction
                // is the dessin orientation of that edge
                let forward = if directed {
                    d.dir[&edges_in_chain[0]] == darts[0]
                } else {
                    true
                };
                let id = edges_in_chain.iter().min().unwrap().clone();
                chains.push(Chain {
                    darts,
                    ends: (start, w),
                    directed,
                    forward,
                    id,
                });
                break;
            }
            let es = white_link
                .get(&w)
                .ok_or_else(|| ExtractError::Internal(format!("chain stuck at {}", w)))?;
            cur = if es[0] == cur { es[1].clone() } else { es[0].clone() };
            v = w;
        }
    }
    chains.sort_by(|a, b| a.id.cmp(&b.id));

    // skeleton graph assembly
    let mut g = EmbeddedGraph::default();
    let mut vertex_part = BTreeMap::new();
    let mut dir = BTreeMap::new();
    // vertices with loci
    let mut hyp_circles: Vec<(BoundaryId, VertexId)> = Vec::new();
    for c in &comps {
        if c.hyperbolic {
            let p = &pillars[&(c.bc.clone(), 0)];
            g.vertices.insert(
                p.id.clone(),
                Vertex {
                    id: p.id.clone(),
                    locus: Locus::Inner,
                },
            );
            vertex_part.insert(p.id.clone(), p.part);
            hyp_circles.push((c.bc.clone(), p.id.clone()));
        } else {
            let k = c.pillars.len();
            let mut items = Vec::new();
            for (i, pl) in c.pillars.iter().enumerate() {
                let p = &pillars[&(c.bc.clone(), pl.index)];
                g.vertices.insert(
                    p.id.clone(),
                    Vertex {
                        id: p.id.clone(),
                        locus: Locus::Real {
                            bc: c.bc.clone(),
                            pos: i,
                        },
                    },
                );
                vertex_part.insert(p.id.clone(), p.part);
                let aid = arc_edge_id(&c.bc, i);
                let (dp, dm) = arc_dart_ids(&c.bc, i);
                let next = &pillars[&(c.bc.clone(), c.pillars[(i + 1) % k].index)];
                g.edges.insert(
                    aid.clone(),
                    Edge {
                        id: aid.clone(),
                        ends: (p.id.clone(), next.id.clone()),
                        darts: (dp, dm),
                    },
                );
                items.push(BoundaryItem::V(p.id.clone()));
                items.push(BoundaryItem::E(aid));
            }
            g.boundary.push(BoundaryComponent {
                id: c.bc.clone(),
                items,
            });
        }
    }
    // skeleton edges from chains; darts `<id>:+` run ends.0 -> ends.1
    // (attachment vertices mapped to pillar vertices)
    let pillar_vertex_of = |v: &VertexId| -> Result<VertexId, ExtractError> {
        let key = pillar_of_vertex
            .get(v)
            .ok_or_else(|| ExtractError::Internal(format!("{} not on a pillar", v)))?;
        Ok(pillars[key].id.clone())
    };
    // attachment -> (skeleton out-dart) for rotations
    let mut chord_dart_at: BTreeMap<VertexId, DartId> = BTreeMap::new();
    // skeleton dart -> dessin dart (aligned travel) for region classes
    let mut dessin_dart_of: BTreeMap<DartId, DartId> = BTreeMap::new();
    for ch in &chains {
        let p0 = pillar_vertex_of(&ch.ends.0)?;
        let p1 = pillar_vertex_of(&ch.ends.1)?;
        let dp = DartId::new(format!("{}:+", ch.id));
        let dm = DartId::new(format!("{}:-", ch.id));
        g.edges.insert(
            ch.id.clone(),
            Edge {
                id: ch.id.clone(),
                ends: (p0.clone(), p1.clone()),
                darts: (dp.clone(), dm.clone()),
            },
        );
        if ch.directed {
            dir.insert(ch.id.clone(), if ch.forward { dp.clone() } else { dm.clone() });
        }
        chord_dart_at.insert(ch.ends.0.clone(), dp.clone());
        chord_dart_at.insert(ch.ends.1.clone(), dm.clone());
        dessin_dart_of.insert(dp, ch.darts[0].clone());
        dessin_dart_of.insert(
            dm,
            idx.rev(ch.darts.last().unwrap()),
        );
    }

    // regions of the cut along the skeleton: classes of dessin regions
    // glued across inner solid and bold edges
    let regions: Vec<RegionId> = d.graph.regions.keys().cloned().collect();
    let rix: BTreeMap<&RegionId, usize> = regions.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let mut parent: Vec<usize> = (0..regions.len()).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    let glue_edges: Vec<EdgeId> = d
        .graph
        .edges
        .keys()
        .filter(|e| {
            !d.graph.is_real_edge(e)
                && matches!(d.color_of(e), EdgeColor::Solid | EdgeColor::Bold)
        })
        .cloned()
        .collect();
    for e in &glue_edges {
        let edge = d.graph.edge(e);
        let r0 = idx.dart_region[&edge.darts.0].clone();
        let r1 = idx.dart_region[&edge.darts.1].clone();
        let a = find(&mut parent, rix[&r0]);
        let b = find(&mut parent, rix[&r1]);
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    // chi per class via corner merging: chi = sum chi(R_i) + E_glue - U
    // corners: (position in some walk) identified by (prev dart, next dart)
    let mut corner_parent: BTreeMap<(DartId, DartId), (DartId, DartId)> = BTreeMap::new();
    let mut corner_before: BTreeMap<DartId, (DartId, DartId)> = BTreeMap::new();
    let mut corner_after: BTreeMap<DartId, (DartId, DartId)> = BTreeMap::new();
    for reg in d.graph.regions.values() {
        for w in &reg.walks {
            if let Walk::Darts(ds) = w {
                let n = ds.len();
                for i in 0..n {
                    let a = ds[i].clone();
                    let b = ds[(i + 1) % n].clone();
                    let c = (a.clone(), b.clone());
                    corner_parent.insert(c.clone(), c.clone());
                    corner_before.insert(b, c.clone());
                    corner_after.insert(a, c);
                }
            }
        }
    }
    fn cfind(
        p: &mut BTreeMap<(DartId, DartId), (DartId, DartId)>,
        x: (DartId, DartId),
    ) -> (DartId, DartId) {
        let px = p[&x].clone();
        if px != x {
            let r = cfind(p, px);
            p.insert(x, r.clone());
            r
        } else {
            x
        }
    }
    let mut unions_per_class: BTreeMap<usize, i64> = BTreeMap::new();
    let mut glue_per_class: BTreeMap<usize, i64> = BTreeMap::new();
    for e in &glue_edges {
        let edge = d.graph.edge(e);
        let r0 = idx.dart_region[&edge.darts.0].clone();
        let class = find(&mut parent, rix[&r0]);
        *glue_per_class.entry(class).or_insert(0) += 1;
        // identify corner_before(d) ~ corner_after(d') and
        // corner_after(d) ~ corner_before(d')
        let dands = [
            (
                corner_before[&edge.darts.0].clone(),
                corner_after[&edge.darts.1].clone(),
            ),
            (
                corner_after[&edge.darts.0].clone(),
                corner_before[&edge.darts.1].clone(),
            ),
        ];
        for (ca, cb) in dands {
            let ra = cfind(&mut corner_parent, ca);
            let rb = cfind(&mut corner_parent, cb);
            if ra != rb {
                corner_parent.insert(ra.clone().max(rb.clone()), ra.min(rb));
                *unions_per_class.entry(class).or_insert(0) += 1;
            }
        }
    }
    let mut chi_per_class: BTreeMap<usize, i64> = BTreeMap::new();
    for (i, r) in regions.iter().enumerate() {
        let class = find(&mut parent, i);
        *chi_per_class.entry(class).or_insert(0) += d.graph.regions[r].euler();
    }
    for (class, glue) in &glue_per_class {
        *chi_per_class.get_mut(class).unwrap() +=
            glue - unions_per_class.get(class).copied().unwrap_or(0);
    }
    // hyperbolic circles with no dotted attachments collapse to interior
    // points of their class: +1 each
    let mut punctures: Vec<(usize, VertexId)> = Vec::new();
    for (bc, vid) in &hyp_circles {
        let key = (bc.clone(), 0usize);
        if pillars[&key].attachments.is_empty() {
            // class of the adjacent region: via any real edge on the circle
            let b = d.graph.bc(bc).unwrap();
            let e = b.edges()[0].clone();
            let edge = d.graph.edge(&e);
            let dart = if idx.dart_region.contains_key(&edge.darts.0) {
                edge.darts.0.clone()
            } else {
                edge.darts.1.clone()
            };
            let class = find(&mut parent, rix[&idx.dart_region[&dart]]);
            *chi_per_class.entry(class).or_insert(0) += 1;
            punctures.push((class, vid.clone()));
        }
    }

    // rotations of the skeleton graph, then face tracing
    // sigma cycles: real pillar [rev(arc_in), chords..., arc_out];
    // inner pillar: cyclic chord order
    let mut sigma: BTreeMap<DartId, DartId> = BTreeMap::new();
    let mut skel_rev: BTreeMap<DartId, DartId> = BTreeMap::new();
    for e in g.edges.values() {
        skel_rev.insert(e.darts.0.clone(), e.darts.1.clone());
        skel_rev.insert(e.darts.1.clone(), e.darts.0.clone());
    }
    let mut boundary_forward: BTreeSet<DartId> = BTreeSet::new();
    for c in &comps {
        if c.hyperbolic {
            let p = &pillars[&(c.bc.clone(), 0)];
            let cyc: Vec<DartId> = p
                .attachments
                .iter()
                .map(|a| chord_dart_at[a].clone())
                .collect();
            if cyc.is_empty() {
                continue;
            }
            for i in 0..cyc.len() {
                sigma.insert(cyc[i].clone(), cyc[(i + 1) % cyc.len()].clone());
            }
        } else {
            let k = c.pillars.len();
            for (i, pl) in c.pillars.iter().enumerate() {
                let p = &pillars[&(c.bc.clone(), pl.index)];
                let (arc_out, _) = arc_dart_ids(&c.bc, i);
                let (_, arc_in_rev) = arc_dart_ids(&c.bc, (i + k - 1) % k);
                boundary_forward.insert(arc_out.clone());
                let mut cyc = vec![arc_in_rev];
                for a in &p.attachments {
                    cyc.push(chord_dart_at[a].clone());
                }
                cyc.push(arc_out);
                for j in 0..cyc.len() {
                    sigma.insert(cyc[j].clone(), cyc[(j + 1) % cyc.len()].clone());
                }
            }
        }
    }
    // trace orbits
    let mut all_darts: Vec<DartId> = skel_rev.keys().cloned().collect();
    all_darts.sort();
    let mut seen: BTreeSet<DartId> = BTreeSet::new();
    let mut orbits: Vec<Vec<DartId>> = Vec::new();
    for d0 in &all_darts {
        if seen.contains(d0) {
            continue;
        }
        let mut orbit = Vec::new();
        let mut dd = d0.clone();
        loop {
            orbit.push(dd.clone());
            seen.insert(dd.clone());
            dd = sigma
                .get(&skel_rev[&dd])
                .cloned()
                .ok_or_else(|| ExtractError::Internal("skeleton rotation incomplete".into()))?;
            if dd == *d0 {
                break;
            }
            if orbit.len() > all_darts.len() {
                return Err(ExtractError::Internal("skeleton face tracing diverged".into()));
            }
        }
        let outside = orbit
            .iter()
            .any(|x| boundary_forward.contains(&skel_rev[x]));
        if !outside {
            orbits.push(orbit);
        }
    }
    // orbit -> class
    let class_of_orbit = |orbit: &[DartId]| -> Result<usize, ExtractError> {
        for dart in orbit {
            if let Some(dd) = dessin_dart_of.get(dart) {
                let r = idx.dart_region[dd].clone();
                return Ok(find(&mut parent.clone(), rix[&r]));
            }
            // arc dart: `arc:<bc>:<i>:+`
            if dart.0.starts_with("arc:") && dart.0.ends_with(":+") {
                let parts: Vec<&str> = dart.0.split(':').collect();
                let bc = BoundaryId::new(parts[1]);
                let i: usize = parts[2].parse().unwrap();
                // region above the solid run after pillar i on this bc:
                // find the dessin boundary edges strictly after the pillar
                let comp = comps.iter().find(|c| c.bc == bc).unwrap();
                let pl = &comp.pillars[i];
                let b = d.graph.bc(&bc).unwrap();
                // walk items to find an edge after the pillar support
                let last_sup = pl.support_vertices.last().unwrap();
                let verts: Vec<&VertexId> = b.vertices();
                let n = verts.len();
                let pos = verts.iter().position(|x| *x == last_sup).unwrap();
                // boundary edge right after this vertex
                let eid = match &b.items[(2 * pos + 1) % b.items.len()] {
                    BoundaryItem::E(e) => e.clone(),
                    _ => return Err(ExtractError::Internal("misaligned boundary".into())),
                };
                let edge = d.graph.edge(&eid);
                let dd = if idx.dart_region.contains_key(&edge.darts.0) {
                    edge.darts.0.clone()
                } else {
                    edge.darts.1.clone()
                };
                let n_ = n;
                let _ = n_;
                let r = idx.dart_region[&dd].clone();
                return Ok(find(&mut parent.clone(), rix[&r]));
            }
        }
        Err(ExtractError::Internal("orbit with no class witness".into()))
    };
    let mut class_orbits: BTreeMap<usize, Vec<Vec<DartId>>> = BTreeMap::new();
    for orbit in orbits {
        let c = class_of_orbit(&orbit)?;
        class_orbits.entry(c).or_default().push(orbit);
    }
    for (class, v) in &punctures {
        class_orbits.entry(*class).or_default();
        let _ = v;
    }
    // assemble regions
    let mut rcounter = 0usize;
    let mut classes: Vec<usize> = class_orbits.keys().copied().collect();
    classes.sort();
    for class in classes {
        let orbs = &class_orbits[&class];
        let chi = chi_per_class.get(&class).copied().ok_or_else(|| {
            ExtractError::Internal("class without euler characteristic".into())
        })?;
        let mut walks: Vec<Walk> = orbs.iter().map(|o| Walk::Darts(o.clone())).collect();
        for (pc, v) in &punctures {
            if *pc == class {
                walks.push(Walk::Puncture(v.clone()));
            }
        }
        let w = walks.len() as i64;
        let twice_g = 2 - chi - w;
        if twice_g < 0 || twice_g % 2 != 0 {
            return Err(ExtractError::Internal(format!(
                "class chi {} with {} walks is not an orientable region",
                chi, w
            )));
        }
        let id = RegionId::new(format!("R{}", rcounter));
        rcounter += 1;
        g.regions.insert(
            id.clone(),
            Region {
                id,
                genus: (twice_g / 2) as usize,
                walks,
            },
        );
    }

    let skel = AbstractSkeleton {
        graph: g,
        vertex_part,
        dir,
    };
    let vrep = validate_skeleton(&skel);
    if !vrep.is_empty() {
        return Err(ExtractError::Internal(format!(
            "extracted skeleton invalid:\n{}",
            vrep
        )));
    }
    Ok(skel)
}
