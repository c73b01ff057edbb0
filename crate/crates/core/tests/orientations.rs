//! Admissible orientations: construction, triggers and diodes, elementary
//! inversions, and the brute-force cross-checks.

use trigonal_core::ids::{DartId, EdgeId, VertexId};
use trigonal_core::skeleton::{
    admissible_orientation, all_admissible_orientations, classify_edges, inversion_path,
    is_admissible, validate_skeleton, AbstractSkeleton, EdgeClass, Part,
};
use trigonal_core::surface::Locus;
use trigonal_core::io::parse_skeleton;

fn disk_skeleton(text: &str) -> AbstractSkeleton {
    let s = parse_skeleton(text).expect("skeleton must parse");
    let rep = validate_skeleton(&s);
    assert!(rep.is_empty(), "fixture invalid:\n{}", rep);
    s
}

#[test]
fn single_chord_is_a_trigger() {
    // an undirected chord nests around a directed pair: the parity rule
    // forbids zigzags beside undirected chord ends
    let s = disk_skeleton(
        "svertex z0 real:b0:0 undirected\n\
         svertex s0 real:b0:1 directed\n\
         svertex a real:b0:2 undirected\n\
         svertex s1 real:b0:3 directed\n\
         svertex z1 real:b0:4 undirected\n\
         svertex k1 real:b0:5 directed\n\
         svertex b real:b0:6 undirected\n\
         svertex k0 real:b0:7 directed\n\
         sedge c0 a b\n\
         sedge d0 s0 k0 dir s0\n\
         sedge d1 s1 k1 dir s1\n",
    );
    let classes = classify_edges(&s).unwrap();
    assert_eq!(classes.len(), 1);
    assert!(matches!(classes[&EdgeId::new("c0")], EdgeClass::Trigger));
    // both anchor senses succeed
    let e = &s.graph.edges[&EdgeId::new("c0")];
    for dart in [e.darts.0.clone(), e.darts.1.clone()] {
        let o = admissible_orientation(&s, Some(&[dart.clone()])).unwrap();
        assert!(is_admissible(&s, &o));
        assert_eq!(o.forward[&EdgeId::new("c0")], dart);
    }
}

#[test]
fn two_disjoint_chords_reach_all_four_orientations() {
    // two nested undirected chords, each wrapping its own directed pair
    let s = disk_skeleton(
        "svertex z0 real:b0:0 undirected\n\
         svertex s0 real:b0:1 directed\n\
         svertex a real:b0:2 undirected\n\
         svertex s1 real:b0:3 directed\n\
         svertex z1 real:b0:4 undirected\n\
         svertex k1 real:b0:5 directed\n\
         svertex b real:b0:6 undirected\n\
         svertex k0 real:b0:7 directed\n\
         svertex c real:b0:8 undirected\n\
         svertex s2 real:b0:9 directed\n\
         svertex z2 real:b0:10 undirected\n\
         svertex k2 real:b0:11 directed\n\
         svertex d real:b0:12 undirected\n\
         svertex s3 real:b0:13 directed\n\
         svertex z3 real:b0:14 undirected\n\
         svertex k3 real:b0:15 directed\n\
         sedge c0 a b\n\
         sedge c1 c d\n\
         sedge d0 s0 k0 dir s0\n\
         sedge d1 s1 k1 dir s1\n\
         sedge d2 s2 k2 dir s2\n\
         sedge d3 s3 k3 dir s3\n",
    );
    let all = all_admissible_orientations(&s);
    assert_eq!(all.len(), 4, "both chords are free");
    let classes = classify_edges(&s).unwrap();
    assert!(classes.values().all(|c| matches!(c, EdgeClass::Trigger)));
}

/// A monovalent inner vertex forces its edge away from it.
#[test]
fn monovalent_inner_vertex_is_a_diode() {
    // disk with boundary [a(U), j(D), k(U), o(D)], chord j->o, and a
    // dangling undirected edge from inner u to a
    let text = "svertex a real:b0:0 undirected\n\
                svertex j real:b0:1 directed\n\
                svertex k real:b0:2 undirected\n\
                svertex o real:b0:3 directed\n\
                svertex u inner undirected\n\
                sedge e1 j o dir j\n\
                sedge e2 u a\n\
                region RA genus 0 walk arc:b0:1:+ arc:b0:2:+ e1:-\n\
                region RB genus 0 walk arc:b0:0:+ e1:+ arc:b0:3:+ e2:- e2:+\n";
    let s = disk_skeleton(text);
    let classes = classify_edges(&s).unwrap();
    match &classes[&EdgeId::new("e2")] {
        EdgeClass::Diode(natural) => {
            // natural direction away from u: the dart with tail u
            let e = &s.graph.edges[&EdgeId::new("e2")];
            let away = if e.ends.0 == VertexId::new("u") {
                e.darts.0.clone()
            } else {
                e.darts.1.clone()
            };
            assert_eq!(*natural, away, "diode must point away from the inner vertex");
        }
        other => panic!("expected a diode, got {:?}", other),
    }
}

#[test]
fn inversion_paths_are_stepwise_admissible() {
    let s = disk_skeleton(
        "svertex z0 real:b0:0 undirected\n\
         svertex s0 real:b0:1 directed\n\
         svertex a real:b0:2 undirected\n\
         svertex s1 real:b0:3 directed\n\
         svertex z1 real:b0:4 undirected\n\
         svertex k1 real:b0:5 directed\n\
         svertex b real:b0:6 undirected\n\
         svertex k0 real:b0:7 directed\n\
         svertex c real:b0:8 undirected\n\
         svertex s2 real:b0:9 directed\n\
         svertex z2 real:b0:10 undirected\n\
         svertex k2 real:b0:11 directed\n\
         svertex d real:b0:12 undirected\n\
         svertex s3 real:b0:13 directed\n\
         svertex z3 real:b0:14 undirected\n\
         svertex k3 real:b0:15 directed\n\
         sedge c0 a b\n\
         sedge c1 c d\n\
         sedge d0 s0 k0 dir s0\n\
         sedge d1 s1 k1 dir s1\n\
         sedge d2 s2 k2 dir s2\n\
         sedge d3 s3 k3 dir s3\n",
    );
    let all = all_admissible_orientations(&s);
    let idx = s.graph.index();
    for o1 in &all {
        for o2 in &all {
            let path = inversion_path(&s, o1, o2).unwrap();
            // replay stepwise
            let mut cur = o1.clone();
            for e in &path {
                let f = cur.forward.get_mut(e).unwrap();
                *f = idx.rev(f);
                assert!(is_admissible(&s, &cur), "intermediate inadmissible");
            }
            assert_eq!(&cur, o2, "path must end at the target");
        }
    }
}

#[test]
fn adjacent_incoming_pairs_are_excluded() {
    // a 3-valent undirected vertex: orientations with two adjacent
    // incoming edges at it are not admissible
    // vertex a carries two chords; the orientation with both incoming
    // is the single inadmissible one out of four
    let s = disk_skeleton(
        "svertex z0 real:b0:0 undirected\n\
         svertex s0 real:b0:1 directed\n\
         svertex b real:b0:2 undirected\n\
         svertex s1 real:b0:3 directed\n\
         svertex z1 real:b0:4 undirected\n\
         svertex k1 real:b0:5 directed\n\
         svertex a real:b0:6 undirected\n\
         svertex s2 real:b0:7 directed\n\
         svertex z2 real:b0:8 undirected\n\
         svertex k2 real:b0:9 directed\n\
         svertex c real:b0:10 undirected\n\
         svertex k0 real:b0:11 directed\n\
         sedge c0 b a\n\
         sedge c1 a c\n\
         sedge d0 s0 k0 dir s0\n\
         sedge d1 s1 k1 dir s1\n\
         sedge d2 s2 k2 dir s2\n",
    );
    for o in all_admissible_orientations(&s) {
        assert!(is_admissible(&s, &o));
    }
    let count = all_admissible_orientations(&s).len();
    assert_eq!(count, 3, "one of four joint states is excluded");
}

#[test]
fn monovalent_inner_loopback_cycle_detected() {
    // an inner-inner chord has a first neighbor cycle: invalid skeleton
    let text = "svertex a real:b0:0 undirected\n\
                svertex j real:b0:1 directed\n\
                svertex k real:b0:2 undirected\n\
                svertex o real:b0:3 directed\n\
                svertex u inner undirected\n\
                svertex v inner undirected\n\
                sedge e1 j o dir j\n\
                sedge e2 u v\n\
                region RA genus 0 walk arc:b0:1:+ arc:b0:2:+ e1:-\n\
                region RB genus 0 walk arc:b0:0:+ e1:+ arc:b0:3:+ walk e2:- e2:+\n";
    let s = parse_skeleton(text).expect("parses");
    let rep = validate_skeleton(&s);
    assert!(
        rep.has_code("sk1-cycle"),
        "expected a first neighbor cycle:\n{}",
        rep
    );
}

#[test]
fn loci_accessible() {
    let s = disk_skeleton(
        "svertex a real:b0:0 undirected\n\
         svertex j real:b0:1 directed\n\
         svertex b real:b0:2 undirected\n\
         svertex o real:b0:3 directed\n\
         sedge c1 j o dir j\n",
    );
    assert!(matches!(
        s.graph.vertices[&VertexId::new("a")].locus,
        Locus::Real { .. }
    ));
    assert_eq!(s.vertex_part[&VertexId::new("a")], Part::Undirected);
    let _d: Option<&DartId> = s.dir.get(&EdgeId::new("c1"));
    // a and b are isolated undirected vertices: zigzag points
}
