//! Region labellings in {1,2,3}: the combinatorial certificate of type I.
//!
//! A labelling is valid when
//!  - the region adjacent to a real solid (bold) edge is not of type 1
//!    (respectively not of type 3),
//!  - the two regions adjacent to an inner solid edge are both 1 or {2,3},
//!  - the two regions adjacent to an inner bold edge are both 3 or {1,2},
//!  - the two regions adjacent to an inner dotted edge agree.
//!
//! A dessin admitting such a labelling is of type I; `solve_labelling`
//! decides this with union-find over dotted edges plus backtracking.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::dessin::{
    analyze_real_components, is_hyperbolic_dessin, is_unramified, Dessin, EdgeColor, Pillar,
    PillarKind, RealScheme, SchemeFeature, VertexKind,
};
use crate::ids::{BoundaryId, EdgeId, RegionId, VertexId};
use crate::report::ValidationReport;
use crate::surface::Locus;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionLabelling {
    pub label: BTreeMap<RegionId, u8>,
}

#[derive(Debug, Error)]
pub enum TypingError {
    #[error("hyperbolic dessin: the labelling calculus is undefined")]
    Hyperbolic,
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Regions adjacent to each edge: one for real edges, two for inner ones.
pub fn edge_regions(d: &Dessin) -> BTreeMap<EdgeId, Vec<RegionId>> {
    let idx = d.graph.index();
    let mut out: BTreeMap<EdgeId, Vec<RegionId>> = BTreeMap::new();
    for e in d.graph.edges.values() {
        let mut regs = Vec::new();
        for dart in [&e.darts.0, &e.darts.1] {
            if let Some(r) = idx.dart_region.get(dart) {
                regs.push(r.clone());
            }
        }
        out.insert(e.id.clone(), regs);
    }
    out
}

/// check_labelling: Theorem-style conditions (1)-(4) above.
pub fn check_labelling(d: &Dessin, l: &RegionLabelling) -> Result<ValidationReport, TypingError> {
    if is_hyperbolic_dessin(d) {
        return Err(TypingError::Hyperbolic);
    }
    let mut r = ValidationReport::new();
    for reg in d.graph.regions.keys() {
        match l.label.get(reg) {
            None => r.push("lab-total", vec![reg.0.clone()], "region has no label"),
            Some(x) if !(1..=3).contains(x) => {
                r.push("lab-total", vec![reg.0.clone()], "label out of range")
            }
            _ => {}
        }
    }
    for reg in l.label.keys() {
        if !d.graph.regions.contains_key(reg) {
            r.push("lab-total", vec![reg.0.clone()], "label for unknown region");
        }
    }
    if !r.is_empty() {
        return Ok(r);
    }
    let adj = edge_regions(d);
    for e in d.graph.edges.values() {
        let regs = &adj[&e.id];
        let color = d.color_of(&e.id);
        if regs.len() == 1 {
            let lab = l.label[&regs[0]];
            match color {
                EdgeColor::Solid if lab == 1 => r.push(
                    "lab-real-solid",
                    vec![e.id.0.clone(), regs[0].0.clone()],
                    "region at a real solid edge is of type 1",
                ),
                EdgeColor::Bold if lab == 3 => r.push(
                    "lab-real-bold",
                    vec![e.id.0.clone(), regs[0].0.clone()],
                    "region at a real bold edge is of type 3",
                ),
                _ => {}
            }
        } else if regs.len() == 2 {
            let (a, b) = (l.label[&regs[0]], l.label[&regs[1]]);
            let ok = match color {
                EdgeColor::Solid => (a == 1 && b == 1) || (a.min(b) == 2 && a.max(b) == 3),
                EdgeColor::Bold => (a == 3 && b == 3) || (a.min(b) == 1 && a.max(b) == 2),
                EdgeColor::Dotted => a == b,
            };
            if !ok {
                let code = match color {
                    EdgeColor::Solid => "lab-inner-solid",
                    EdgeColor::Bold => "lab-inner-bold",
                    EdgeColor::Dotted => "lab-inner-dotted",
                };
                r.push(
                    code,
                    vec![e.id.0.clone()],
                    format!("labels ({}, {}) not allowed across {} edge", a, b, color.as_str()),
                );
            }
        }
    }
    Ok(r)
}

/// Outcome of the labelling search.
#[derive(Debug, Clone)]
pub enum LabellingOutcome {
    Labelled(RegionLabelling),
    /// Type II: no labelling exists; the certificate is the conflict
    /// chain of the final failed branch.
    TypeII(Vec<String>),
}

impl LabellingOutcome {
    pub fn labelling(&self) -> Option<&RegionLabelling> {
        match self {
            LabellingOutcome::Labelled(l) => Some(l),
            LabellingOutcome::TypeII(_) => None,
        }
    }
    pub fn is_type_i(&self) -> bool {
        matches!(self, LabellingOutcome::Labelled(_))
    }
}

struct Csp {
    /// per-class sorted list of member regions
    members: Vec<Vec<RegionId>>,
    /// per-class allowed values
    domain: Vec<[bool; 3]>,
    /// (class a, class b, color, witness edge); a <= b
    binary: Vec<(usize, usize, EdgeColor, EdgeId)>,
}

fn allowed(color: EdgeColor, a: u8, b: u8) -> bool {
    match color {
        EdgeColor::Solid => (a == 1 && b == 1) || (a.min(b) == 2 && a.max(b) == 3),
        EdgeColor::Bold => (a == 3 && b == 3) || (a.min(b) == 1 && a.max(b) == 2),
        EdgeColor::Dotted => a == b,
    }
}

fn build_csp(d: &Dessin) -> Csp {
    // union-find over regions across inner dotted edges
    let regions: Vec<RegionId> = d.graph.regions.keys().cloned().collect();
    let rindex: BTreeMap<&RegionId, usize> = regions.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let mut parent: Vec<usize> = (0..regions.len()).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    let adj = edge_regions(d);
    for e in d.graph.edges.values() {
        if d.color_of(&e.id) == EdgeColor::Dotted {
            let regs = &adj[&e.id];
            if regs.len() == 2 {
                let a = find(&mut parent, rindex[&regs[0]]);
                let b = find(&mut parent, rindex[&regs[1]]);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    // classes in order of least member
    let mut class_members: BTreeMap<usize, Vec<RegionId>> = BTreeMap::new();
    for (i, r) in regions.iter().enumerate() {
        let root = find(&mut parent, i);
        class_members.entry(root).or_default().push(r.clone());
    }
    let roots: Vec<usize> = class_members.keys().copied().collect();
    let class_idx: BTreeMap<usize, usize> = roots.iter().enumerate().map(|(i, r)| (*r, i)).collect();
    let mut class_of = BTreeMap::new();
    let mut members = vec![Vec::new(); roots.len()];
    for (i, r) in regions.iter().enumerate() {
        let root = find(&mut parent, i);
        let c = class_idx[&root];
        class_of.insert(r.clone(), c);
        members[c].push(r.clone());
    }
    // unary constraints from real edges
    let mut domain = vec![[true, true, true]; roots.len()];
    for e in d.graph.edges.values() {
        let regs = &adj[&e.id];
        if regs.len() == 1 {
            let c = class_of[&regs[0]];
            match d.color_of(&e.id) {
                EdgeColor::Solid => domain[c][0] = false,
                EdgeColor::Bold => domain[c][2] = false,
                EdgeColor::Dotted => {}
            }
        }
    }
    // binary constraints from inner solid/bold edges
    let mut binary = Vec::new();
    for e in d.graph.edges.values() {
        let color = d.color_of(&e.id);
        if color == EdgeColor::Dotted {
            continue;
        }
        let regs = &adj[&e.id];
        if regs.len() == 2 {
            let a = class_of[&regs[0]];
            let b = class_of[&regs[1]];
            binary.push((a.min(b), a.max(b), color, e.id.clone()));
        }
    }
    binary.sort();
    binary.dedup();
    let _ = class_of;
    Csp {
        members,
        domain,
        binary,
    }
}

/// solve_labelling: deterministic propagation + lexicographic branching.
pub fn solve_labelling(d: &Dessin) -> Result<LabellingOutcome, TypingError> {
    if is_hyperbolic_dessin(d) {
        return Err(TypingError::Hyperbolic);
    }
    let csp = build_csp(d);
    let n = csp.members.len();
    // self-constraints shrink domains up front
    let mut domain = csp.domain.clone();
    let mut chain: Vec<String> = Vec::new();
    for (a, b, color, e) in &csp.binary {
        if a == b {
            let forced = match color {
                EdgeColor::Solid => 1,
                EdgeColor::Bold => 3,
                EdgeColor::Dotted => continue,
            };
            for v in 1..=3u8 {
                if v != forced && domain[*a][(v - 1) as usize] {
                    domain[*a][(v - 1) as usize] = false;
                }
            }
            chain.push(format!(
                "edge {} forces class {} to {}",
                e,
                csp.members[*a][0],
                forced
            ));
        }
    }

    let mut assign: Vec<Option<u8>> = vec![None; n];
    fn consistent(
        csp: &Csp,
        assign: &[Option<u8>],
        domain: &[[bool; 3]],
        failure: &mut Vec<String>,
    ) -> bool {
        for (c, dom) in domain.iter().enumerate() {
            match assign[c] {
                Some(v) => {
                    if !dom[(v - 1) as usize] {
                        failure.push(format!(
                            "class {} assigned {} outside its domain",
                            csp.members[c][0], v
                        ));
                        return false;
                    }
                }
                None => {
                    if !dom.iter().any(|x| *x) {
                        failure.push(format!("class {} has empty domain", csp.members[c][0]));
                        return false;
                    }
                }
            }
        }
        for (a, b, color, e) in &csp.binary {
            if let (Some(x), Some(y)) = (assign[*a], assign[*b]) {
                if !allowed(*color, x, y) {
                    failure.push(format!(
                        "edge {} rejects labels ({}, {}) on classes {}, {}",
                        e, x, y, csp.members[*a][0], csp.members[*b][0]
                    ));
                    return false;
                }
            }
        }
        true
    }
    fn search(
        csp: &Csp,
        assign: &mut Vec<Option<u8>>,
        domain: &[[bool; 3]],
        idx: usize,
        conflicts: &mut Vec<String>,
    ) -> bool {
        if idx == csp.members.len() {
            return true;
        }
        for v in 1..=3u8 {
            if !domain[idx][(v - 1) as usize] {
                continue;
            }
            assign[idx] = Some(v);
            let mut failure = Vec::new();
            if consistent(csp, assign, domain, &mut failure)
                && search(csp, assign, domain, idx + 1, conflicts)
            {
                return true;
            }
            if !failure.is_empty() {
                conflicts.push(format!(
                    "class {} = {}: {}",
                    csp.members[idx][0],
                    v,
                    failure.join("; ")
                ));
            }
            assign[idx] = None;
        }
        false
    }
    let mut conflicts = Vec::new();
    let ok = search(&csp, &mut assign, &domain, 0, &mut conflicts);
    if !ok {
        chain.extend(conflicts.into_iter().rev().take(12));
        if chain.is_empty() {
            chain.push("no region classes admit a consistent assignment".to_string());
        }
        return Ok(LabellingOutcome::TypeII(chain));
    }
    let mut label = BTreeMap::new();
    for (c, ms) in csp.members.iter().enumerate() {
        for r in ms {
            label.insert(r.clone(), assign[c].unwrap());
        }
    }
    Ok(LabellingOutcome::Labelled(RegionLabelling { label }))
}

/// Edge labels derived from a region labelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeLabel {
    L1,
    L2,
    L3,
    Not1,
    Not3,
}

impl EdgeLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeLabel::L1 => "1",
            EdgeLabel::L2 => "2",
            EdgeLabel::L3 => "3",
            EdgeLabel::Not1 => "not1",
            EdgeLabel::Not3 => "not3",
        }
    }
    pub fn definite(self) -> Option<u8> {
        match self {
            EdgeLabel::L1 => Some(1),
            EdgeLabel::L2 => Some(2),
            EdgeLabel::L3 => Some(3),
            _ => None,
        }
    }
}

/// Type of a pillar or hyperbolic component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PillarType {
    T1,
    T2,
    T3,
    Not3,
}

impl PillarType {
    pub fn as_str(self) -> &'static str {
        match self {
            PillarType::T1 => "1",
            PillarType::T2 => "2",
            PillarType::T3 => "3",
            PillarType::Not3 => "not3",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EdgeLabels {
    pub edges: BTreeMap<EdgeId, EdgeLabel>,
    /// Common label of the two edges at each cross-vertex.
    pub cross_types: BTreeMap<VertexId, u8>,
    /// Pillar types per boundary component, in boundary order.
    pub pillar_types: Vec<(Pillar, PillarType)>,
}

/// derive_edge_labels: per-edge labels, cross types and pillar types.
pub fn derive_edge_labels(
    d: &Dessin,
    l: &RegionLabelling,
) -> Result<EdgeLabels, TypingError> {
    let rep = check_labelling(d, l)?;
    if !rep.is_empty() {
        return Err(TypingError::Invalid(format!(
            "labelling violates the region conditions: {}",
            rep
        )));
    }
    let adj = edge_regions(d);
    let mut edges = BTreeMap::new();
    for e in d.graph.edges.values() {
        let regs = &adj[&e.id];
        let lab = if regs.len() == 1 {
            match l.label[&regs[0]] {
                1 => EdgeLabel::L1,
                2 => EdgeLabel::L2,
                _ => EdgeLabel::L3,
            }
        } else {
            let (a, b) = (l.label[&regs[0]], l.label[&regs[1]]);
            match d.color_of(&e.id) {
                EdgeColor::Dotted => match a {
                    1 => EdgeLabel::L1,
                    2 => EdgeLabel::L2,
                    _ => EdgeLabel::L3,
                },
                EdgeColor::Solid => {
                    if a == 1 && b == 1 {
                        EdgeLabel::L1
                    } else {
                        EdgeLabel::Not1
                    }
                }
                EdgeColor::Bold => {
                    if a == 3 && b == 3 {
                        EdgeLabel::L3
                    } else {
                        EdgeLabel::Not3
                    }
                }
            }
        };
        edges.insert(e.id.clone(), lab);
    }
    // cross types: common definite label of the incident edges
    let mut cross_types = BTreeMap::new();
    for v in d.graph.vertices.values() {
        if d.kind_of(&v.id) != VertexKind::Cross {
            continue;
        }
        let mut labels = BTreeSet::new();
        for e in d.graph.edges.values() {
            if e.ends.0 == v.id || e.ends.1 == v.id {
                if let Some(x) = edges[&e.id].definite() {
                    labels.insert(x);
                }
            }
        }
        if labels.len() == 1 {
            cross_types.insert(v.id.clone(), *labels.iter().next().unwrap());
        } else {
            return Err(TypingError::Invalid(format!(
                "cross vertex {} has edges of distinct definite types {:?}",
                v.id, labels
            )));
        }
    }
    // pillar types
    let mut pillar_types = Vec::new();
    for comp in analyze_real_components(d) {
        for p in comp.pillars {
            let labs: BTreeSet<EdgeLabel> =
                p.support_edges.iter().map(|e| edges[e]).collect();
            let t = match p.kind {
                PillarKind::Oval | PillarKind::Hyperbolic => {
                    if labs.len() == 1 {
                        match labs.iter().next().unwrap() {
                            EdgeLabel::L1 => PillarType::T1,
                            EdgeLabel::L2 => PillarType::T2,
                            EdgeLabel::L3 => PillarType::T3,
                            other => {
                                return Err(TypingError::Invalid(format!(
                                    "dotted support with indefinite label {}",
                                    other.as_str()
                                )))
                            }
                        }
                    } else if labs
                        .iter()
                        .all(|x| matches!(x, EdgeLabel::L1 | EdgeLabel::L2))
                    {
                        PillarType::Not3
                    } else {
                        return Err(TypingError::Invalid(format!(
                            "support of pillar {}:{} mixes labels {:?}",
                            p.bc, p.index, labs
                        )));
                    }
                }
                PillarKind::Zigzag => {
                    if labs.len() == 1 && labs.contains(&EdgeLabel::L3) {
                        PillarType::T3
                    } else {
                        return Err(TypingError::Invalid(format!(
                            "zigzag {}:{} carries non-3 labels {:?}",
                            p.bc, p.index, labs
                        )));
                    }
                }
                PillarKind::Jump => {
                    if labs.len() == 1 {
                        match labs.iter().next().unwrap() {
                            EdgeLabel::L1 => PillarType::T1,
                            EdgeLabel::L2 => PillarType::T2,
                            _ => {
                                return Err(TypingError::Invalid(format!(
                                    "bold pillar {}:{} with label 3",
                                    p.bc, p.index
                                )))
                            }
                        }
                    } else {
                        return Err(TypingError::Invalid(format!(
                            "bold pillar {}:{} mixes labels {:?}",
                            p.bc, p.index, labs
                        )));
                    }
                }
            };
            pillar_types.push((p, t));
        }
    }
    Ok(EdgeLabels {
        edges,
        cross_types,
        pillar_types,
    })
}

/// check_summary_structure: the structural consequences for unramified
/// type-I dessins (summary theorem plus its lemma suite).
pub fn check_summary_structure(
    d: &Dessin,
    l: &RegionLabelling,
) -> Result<ValidationReport, TypingError> {
    if !is_unramified(d) {
        return Err(TypingError::Invalid("dessin is not unramified".into()));
    }
    let labels = derive_edge_labels(d, l)?;
    let mut r = ValidationReport::new();
    let idx = d.graph.index();

    // no solid or dotted edges of type 1
    for e in d.graph.edges.values() {
        let lab = labels.edges[&e.id];
        let color = d.color_of(&e.id);
        if lab == EdgeLabel::L1 && color != EdgeColor::Bold {
            r.push(
                "sum-no1",
                vec![e.id.0.clone()],
                format!("{} edge of type 1", color.as_str()),
            );
        }
        // no inner bold edges of type not-3
        if color == EdgeColor::Bold && lab == EdgeLabel::Not3 && !d.graph.is_real_edge(&e.id) {
            r.push(
                "sum-bold-not3",
                vec![e.id.0.clone()],
                "inner bold edge of type not-3",
            );
        }
    }

    // blacks real, edge pattern (3, 3, not1, 2), neighbors white and cross
    for v in d.graph.vertices.values() {
        if d.kind_of(&v.id) != VertexKind::Black {
            continue;
        }
        if !v.locus.is_real() {
            r.push("sum-black-real", vec![v.id.0.clone()], "inner black vertex");
            continue;
        }
        if let Some(rot) = idx.linear_rotation(&v.id) {
            // out-darts in linear order; classify by (color, real)
            let mut pat = Vec::new();
            for dart in &rot {
                let e = idx.edge_of(dart);
                pat.push((d.color_of(e), d.graph.is_real_edge(e), labels.edges[e]));
            }
            let ok = pat.len() == 4 && {
                // two real ends carry solid and bold in some order
                let (a, b, c, e4) = (&pat[0], &pat[1], &pat[2], &pat[3]);
                let fwd = a.1
                    && e4.1
                    && a.0 == EdgeColor::Solid
                    && e4.0 == EdgeColor::Bold
                    && a.2 == EdgeLabel::L3
                    && b.2 == EdgeLabel::L3
                    && c.2 == EdgeLabel::Not1
                    && e4.2 == EdgeLabel::L2
                    && b.0 == EdgeColor::Bold
                    && c.0 == EdgeColor::Solid;
                let bwd = a.1
                    && e4.1
                    && a.0 == EdgeColor::Bold
                    && e4.0 == EdgeColor::Solid
                    && a.2 == EdgeLabel::L2
                    && b.2 == EdgeLabel::Not1
                    && c.2 == EdgeLabel::L3
                    && e4.2 == EdgeLabel::L3
                    && b.0 == EdgeColor::Solid
                    && c.0 == EdgeColor::Bold;
                fwd || bwd
            };
            if !ok {
                r.push(
                    "sum-black-pattern",
                    vec![v.id.0.clone()],
                    "real black vertex does not carry the (3,3,not1,2) pattern",
                );
            }
        }
        // essential boundary neighbors: white on the bold side, cross on the solid side
        if let Some((win, wout)) = essential_neighbors(d, &v.id) {
            let mut kinds = vec![d.kind_of(&win), d.kind_of(&wout)];
            kinds.sort();
            if kinds != vec![VertexKind::White, VertexKind::Cross] {
                r.push(
                    "sum-black-neighbors",
                    vec![v.id.0.clone(), win.0.clone(), wout.0.clone()],
                    "black vertex neighbors are not a white and a cross",
                );
            }
        }
    }

    // whites monotype; type-2 whites are real jumps
    for v in d.graph.vertices.values() {
        if d.kind_of(&v.id) != VertexKind::White {
            continue;
        }
        let mut dotted_labels = BTreeSet::new();
        let mut bold_labels = BTreeSet::new();
        for e in d.graph.edges.values() {
            if e.ends.0 == v.id || e.ends.1 == v.id {
                match d.color_of(&e.id) {
                    EdgeColor::Dotted => {
                        dotted_labels.insert(labels.edges[&e.id]);
                    }
                    EdgeColor::Bold => {
                        bold_labels.insert(labels.edges[&e.id]);
                    }
                    EdgeColor::Solid => {}
                }
            }
        }
        let whitetype = dotted_labels
            .iter()
            .next()
            .and_then(|x| x.definite())
            .or_else(|| bold_labels.iter().next().and_then(|x| x.definite()));
        if dotted_labels.len() > 1 {
            r.push(
                "sum-white-monotype",
                vec![v.id.0.clone()],
                "white vertex with dotted edges of distinct types",
            );
            continue;
        }
        match whitetype {
            Some(2) => {
                // jump shape: real, real edges bold, black essential neighbors
                let real = v.locus.is_real();
                let mut ok = real;
                if real {
                    if let Some((din, dout)) = idx.boundary_darts.get(&v.id) {
                        ok &= d.color_of(idx.edge_of(din)) == EdgeColor::Bold
                            && d.color_of(idx.edge_of(dout)) == EdgeColor::Bold;
                    }
                    if let Some((a, b)) = essential_neighbors(d, &v.id) {
                        ok &= d.kind_of(&a) == VertexKind::Black
                            && d.kind_of(&b) == VertexKind::Black;
                    }
                }
                if !ok {
                    r.push(
                        "sum-jump-shape",
                        vec![v.id.0.clone()],
                        "type-2 white vertex is not in jump position",
                    );
                }
            }
            Some(3) | None => {}
            Some(t) => {
                r.push(
                    "sum-white-type",
                    vec![v.id.0.clone()],
                    format!("white vertex of type {}", t),
                );
            }
        }
    }

    // components: anti-hyperbolic all solid; hyperbolic type 3 or 2
    let comps = analyze_real_components(d);
    for comp in &comps {
        if comp.anti_hyperbolic {
            let b = d.graph.bc(&comp.bc).unwrap();
            for e in b.edges() {
                if d.color_of(e) != EdgeColor::Solid {
                    r.push(
                        "sum-anti-hyperbolic",
                        vec![comp.bc.0.clone(), e.0.clone()],
                        "anti-hyperbolic component with a non-solid edge",
                    );
                }
            }
        }
    }
    for (p, t) in &labels.pillar_types {
        match p.kind {
            PillarKind::Hyperbolic => {
                if !matches!(t, PillarType::T2 | PillarType::T3) {
                    r.push(
                        "sum-hyperbolic-type",
                        vec![p.bc.0.clone()],
                        format!("hyperbolic component of type {}", t.as_str()),
                    );
                }
                if *t == PillarType::T2 && p.whites > 0 {
                    r.push(
                        "sum-hyperbolic-type",
                        vec![p.bc.0.clone()],
                        "type-2 hyperbolic component contains white vertices",
                    );
                }
            }
            PillarKind::Jump => {
                if *t != PillarType::T2 {
                    r.push(
                        "sum-pillar-type",
                        vec![p.bc.0.clone(), p.index.to_string()],
                        format!("jump of type {}", t.as_str()),
                    );
                }
            }
            PillarKind::Zigzag => {
                if *t != PillarType::T3 {
                    r.push(
                        "sum-pillar-type",
                        vec![p.bc.0.clone(), p.index.to_string()],
                        format!("zigzag of type {}", t.as_str()),
                    );
                }
            }
            PillarKind::Oval => {
                if !matches!(t, PillarType::T2 | PillarType::T3) {
                    r.push(
                        "sum-pillar-type",
                        vec![p.bc.0.clone(), p.index.to_string()],
                        format!("oval of type {}", t.as_str()),
                    );
                }
                if *t == PillarType::T2 && p.whites > 0 {
                    r.push(
                        "sum-pillar-type",
                        vec![p.bc.0.clone(), p.index.to_string()],
                        "type-2 oval contains white vertices",
                    );
                }
            }
        }
    }
    // unclassified bold segments are excluded by the summary theorem
    for comp in &comps {
        if !comp.unclassified_bold.is_empty() {
            r.push(
                "sum-bold-segment",
                vec![comp.bc.0.clone()],
                "maximal bold segment that is not a jump",
            );
        }
    }
    // parity rule: pillar types alternate along each component
    for comp in &comps {
        if comp.hyperbolic {
            continue;
        }
        let seq: Vec<PillarType> = labels
            .pillar_types
            .iter()
            .filter(|(p, _)| p.bc == comp.bc)
            .map(|(_, t)| *t)
            .collect();
        let n = seq.len();
        if n >= 2 {
            for i in 0..n {
                if seq[i] == seq[(i + 1) % n] {
                    r.push(
                        "sum-alternation",
                        vec![comp.bc.0.clone(), i.to_string()],
                        format!(
                            "adjacent pillars {} and {} share type {}",
                            i,
                            (i + 1) % n,
                            seq[i].as_str()
                        ),
                    );
                }
            }
        }
    }
    // type-2 inner dotted edges avoid inner whites; type-3 patch through them
    for e in d.graph.edges.values() {
        if d.color_of(&e.id) != EdgeColor::Dotted || d.graph.is_real_edge(&e.id) {
            continue;
        }
        let lab = labels.edges[&e.id];
        for v in [&e.ends.0, &e.ends.1] {
            let inner_white =
                d.kind_of(v) == VertexKind::White && !d.graph.vertices[v].locus.is_real();
            if inner_white && lab == EdgeLabel::L2 {
                r.push(
                    "sum-type2-edge",
                    vec![e.id.0.clone(), v.0.clone()],
                    "type-2 inner dotted edge attached to an inner white vertex",
                );
            }
        }
    }
    Ok(r)
}

/// Essential neighbors of a real vertex along the boundary (skipping
/// monochrome vertices), on each side.
fn essential_neighbors(d: &Dessin, v: &VertexId) -> Option<(VertexId, VertexId)> {
    let bc_id = match &d.graph.vertices[v].locus {
        Locus::Real { bc, .. } => bc.clone(),
        Locus::Inner => return None,
    };
    let b = d.graph.bc(&bc_id)?;
    let verts: Vec<VertexId> = b.vertices().into_iter().cloned().collect();
    let n = verts.len();
    let pos = verts.iter().position(|x| x == v)?;
    let mut fwd = None;
    for k in 1..=n {
        let u = &verts[(pos + k) % n];
        if d.kind_of(u).is_essential() {
            fwd = Some(u.clone());
            break;
        }
    }
    let mut bwd = None;
    for k in 1..=n {
        let u = &verts[(pos + n - k) % n];
        if d.kind_of(u).is_essential() {
            bwd = Some(u.clone());
            break;
        }
    }
    match (bwd, fwd) {
        (Some(a), Some(b)) => Some((a, b)),
        _ => None,
    }
}

/// quasi_complex_parity: over each component of the boundary minus the
/// zigzags, the number of ovals plus zero-section crossings must equal
/// the Euler characteristic of the component mod 2. Crossings at white
/// vertices interior to non-zigzag dotted supports are counted
/// automatically; all other crossings come from `supplied`, one count per
/// arc in boundary order.
pub fn quasi_complex_parity(
    scheme: &RealScheme,
    supplied: &BTreeMap<BoundaryId, Vec<usize>>,
) -> Result<bool, String> {
    for comp in &scheme.components {
        let zigzags = comp
            .features
            .iter()
            .filter(|f| matches!(f, SchemeFeature::Zigzag { .. }))
            .count();
        let arcs = if zigzags == 0 { 1 } else { zigzags };
        let given = supplied.get(&comp.bc).map(|v| v.len()).unwrap_or(0);
        if given != arcs && !(given == 0 && zigzags == 0) {
            return Err(format!(
                "component {}: {} crossing counts supplied for {} arcs",
                comp.bc, given, arcs
            ));
        }
    }
    for comp in &scheme.components {
        let feats = &comp.features;
        let zig_positions: Vec<usize> = feats
            .iter()
            .enumerate()
            .filter(|(_, f)| matches!(f, SchemeFeature::Zigzag { .. }))
            .map(|(i, _)| i)
            .collect();
        let counts = supplied.get(&comp.bc);
        if zig_positions.is_empty() {
            // whole circle: chi = 0
            let mut total = 0usize;
            for f in feats {
                match f {
                    SchemeFeature::Oval { whites } => total += 1 + whites,
                    SchemeFeature::Hyperbolic { whites } => total += *whites,
                    SchemeFeature::Jump => {}
                    SchemeFeature::Zigzag { .. } => unreachable!(),
                }
            }
            total += counts.map(|v| v.iter().sum::<usize>()).unwrap_or(0);
            if total % 2 != 0 {
                return Ok(false);
            }
        } else {
            let n = feats.len();
            for (k, zp) in zig_positions.iter().enumerate() {
                let next_zp = zig_positions[(k + 1) % zig_positions.len()];
                // features strictly between this zigzag and the next
                let mut total = 0usize;
                let mut i = (zp + 1) % n;
                while i != next_zp {
                    match &feats[i] {
                        SchemeFeature::Oval { whites } => total += 1 + whites,
                        SchemeFeature::Hyperbolic { whites } => total += whites,
                        SchemeFeature::Jump => {}
                        SchemeFeature::Zigzag { .. } => break,
                    }
                    i = (i + 1) % n;
                }
                total += counts.map(|v| v[k]).unwrap_or(0);
                // chi of an open arc is 1
                if total % 2 != 1 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
