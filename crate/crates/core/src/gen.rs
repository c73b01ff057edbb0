//! Seeded instance generators for tests, the acceptance suite and the
//! CLI's randomized checks. Everything is deterministic given the seed.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dessin::Dessin;
use crate::moves::{apply_skeleton_move, enumerate_skeleton_moves};
use crate::rational::{diagram_to_skeleton, feasible_diagram, ChordDiagram, MarkKind};
use crate::skeleton::AbstractSkeleton;
use crate::typing::RegionLabelling;

pub type Seeded = ChaCha8Rng;

pub fn rng(seed: u64) -> Seeded {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random valid chord diagram with `pairs` directed+undirected marks on
/// each side of the parity rule. Kind sequences are sampled and checked
/// for matching feasibility; the first feasible sample wins.
pub fn random_diagram(r: &mut Seeded, pairs: usize) -> ChordDiagram {
    let n = pairs.max(1);
    for _attempt in 0..64 {
        // alternating directed (even slots) / undirected (odd slots)
        let mut seq: Vec<MarkKind> = Vec::with_capacity(4 * n);
        // directed slots: random multiset of sources and sinks, balanced
        let mut dkinds: Vec<MarkKind> = Vec::new();
        for _ in 0..n {
            dkinds.push(MarkKind::Source);
            dkinds.push(MarkKind::Sink);
        }
        dkinds.shuffle(r);
        // undirected slots: an even number of chord endpoints, rest zigzags
        let chord_ends = 2 * r.gen_range(0..=(2 * n) / 2);
        let mut ukinds: Vec<MarkKind> = Vec::new();
        for i in 0..2 * n {
            ukinds.push(if i < chord_ends {
                MarkKind::Undirected
            } else {
                MarkKind::Zigzag
            });
        }
        ukinds.shuffle(r);
        for i in 0..2 * n {
            seq.push(dkinds[i]);
            seq.push(ukinds[i]);
        }
        if let Ok(Some(diagram)) = feasible_diagram(&seq) {
            return diagram;
        }
    }
    // guaranteed fallback: a block-like diagram (nested sources/sinks)
    let mut seq = Vec::with_capacity(4 * n);
    for _ in 0..n {
        seq.push(MarkKind::Source);
        seq.push(MarkKind::Zigzag);
        seq.push(MarkKind::Sink);
        seq.push(MarkKind::Zigzag);
    }
    feasible_diagram(&seq)
        .expect("fallback must assemble")
        .expect("fallback must match")
}

/// A random valid disk skeleton: a random diagram thickened by a few
/// random valid skeleton moves.
pub fn random_skeleton(r: &mut Seeded, pairs: usize, extra_moves: usize) -> AbstractSkeleton {
    let diagram = random_diagram(r, pairs.max(1));
    let mut s = diagram_to_skeleton(&diagram).expect("diagram must embed");
    for _ in 0..extra_moves {
        let moves = enumerate_skeleton_moves(&s);
        if moves.is_empty() {
            break;
        }
        let m = &moves[r.gen_range(0..moves.len())];
        if let Ok(next) = apply_skeleton_move(&s, m) {
            s = next;
        }
    }
    s
}

/// A random disk-base type-I dessin with its labelling.
pub fn random_type_i_dessin(
    r: &mut Seeded,
    pairs: usize,
) -> Option<(Dessin, RegionLabelling)> {
    let s = random_skeleton(r, pairs, 0);
    crate::skeleton::extend_to_dessin(&s).ok()
}

/// A random type-II dessin: two blocks joined at a type-breaking site.
/// Returns `None` if the sampled sites do not produce a valid dessin.
pub fn random_type_ii_dessin(r: &mut Seeded) -> Option<Dessin> {
    let n1 = r.gen_range(1..=2usize);
    let n2 = r.gen_range(1..=2usize);
    let o1: Vec<usize> = (0..n1).map(|i| 2 * i).collect();
    let j1: Vec<usize> = (0..n1).map(|i| 2 * i + 1).collect();
    let o2: Vec<usize> = (0..n2).map(|i| 2 * i).collect();
    let j2: Vec<usize> = (0..n2).map(|i| 2 * i + 1).collect();
    let (d1, _) = crate::rational::build_block(n1, &o1, &j1).ok()?;
    let (d2, _) = crate::rational::build_block(n2, &o2, &j2).ok()?;
    let solids1: Vec<_> = d1
        .graph
        .edges
        .keys()
        .filter(|e| d1.graph.is_real_edge(e) && d1.color_of(e) == crate::dessin::EdgeColor::Solid)
        .cloned()
        .collect();
    let solids2: Vec<_> = d2
        .graph
        .edges
        .keys()
        .filter(|e| d2.graph.is_real_edge(e) && d2.color_of(e) == crate::dessin::EdgeColor::Solid)
        .cloned()
        .collect();
    let mut sites: Vec<(usize, usize)> = (0..solids1.len())
        .flat_map(|i| (0..solids2.len()).map(move |j| (i, j)))
        .collect();
    sites.shuffle(r);
    for (i, j) in sites {
        if let Ok(merged) = crate::rational::raw_junction(&d1, &solids1[i], &d2, &solids2[j]) {
            if crate::dessin::validate_dessin(&merged).is_empty() {
                if let Ok(outcome) = crate::typing::solve_labelling(&merged) {
                    if !outcome.is_type_i() {
                        return Some(merged);
                    }
                }
            }
        }
    }
    None
}
