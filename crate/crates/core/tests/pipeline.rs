//! End-to-end pipeline checks on small fixtures: block construction,
//! validation, labelling, skeleton round trips.

use trigonal_core::dessin::{
    analyze_real_components, degree, is_unramified, real_scheme, validate_dessin, PillarKind,
};
use trigonal_core::rational::build_block;
use trigonal_core::skeleton::{extend_to_dessin, extract_skeleton, validate_skeleton};
use trigonal_core::typing::{check_labelling, check_summary_structure, solve_labelling};

#[test]
fn block1_is_a_valid_type_i_dessin() {
    let (d, l) = build_block(1, &[0], &[1]).expect("block(1) must build");
    let rep = validate_dessin(&d);
    assert!(rep.is_empty(), "block(1) invalid:\n{}", rep);
    assert!(is_unramified(&d));
    assert_eq!(degree(&d).unwrap(), 3);
    let lab = check_labelling(&d, &l).unwrap();
    assert!(lab.is_empty(), "labelling rejected:\n{}", lab);
    let sum = check_summary_structure(&d, &l).unwrap();
    assert!(sum.is_empty(), "summary structure violated:\n{}", sum);
}

#[test]
fn block1_pillars() {
    let (d, _) = build_block(1, &[0], &[1]).unwrap();
    let comps = analyze_real_components(&d);
    assert_eq!(comps.len(), 1);
    let c = &comps[0];
    let mut counts = std::collections::BTreeMap::new();
    for p in &c.pillars {
        *counts.entry(p.kind.clone()).or_insert(0usize) += 1;
    }
    assert_eq!(counts.get(&PillarKind::Oval), Some(&1));
    assert_eq!(counts.get(&PillarKind::Jump), Some(&1));
    assert_eq!(counts.get(&PillarKind::Zigzag), Some(&2));
    assert!(c.unclassified_bold.is_empty());
    // three whites on the circle: the ruled component is non-orientable
    let scheme = real_scheme(&d);
    assert!(!scheme.components[0].orientable);
}

#[test]
fn block1_roundtrip_through_skeleton() {
    let (d, l) = build_block(1, &[0], &[1]).unwrap();
    let s = extract_skeleton(&d, &l).expect("extraction must succeed");
    let rep = validate_skeleton(&s);
    assert!(rep.is_empty(), "extracted skeleton invalid:\n{}", rep);
    // one directed chord + two isolated undirected vertices
    assert_eq!(s.skeleton_edges().len(), 1);
    let (d2, l2) = extend_to_dessin(&s).expect("re-extension must succeed");
    let rep2 = validate_dessin(&d2);
    assert!(rep2.is_empty(), "re-extended dessin invalid:\n{}", rep2);
    assert!(check_labelling(&d2, &l2).unwrap().is_empty());
    assert_eq!(degree(&d2).unwrap(), 3);
}

#[test]
fn blocks_up_to_four() {
    for n in 1..=4usize {
        let ovals: Vec<usize> = (0..n).map(|i| 2 * i).collect();
        let jumps: Vec<usize> = (0..n).map(|i| 2 * i + 1).collect();
        let (d, l) = build_block(n, &ovals, &jumps).unwrap_or_else(|e| {
            panic!("block({}) failed: {}", n, e);
        });
        assert!(validate_dessin(&d).is_empty(), "block({}) invalid", n);
        assert_eq!(degree(&d).unwrap(), 3 * n, "block({}) degree", n);
        let comps = analyze_real_components(&d);
        let c = &comps[0];
        let mut ovals_n = 0;
        let mut jumps_n = 0;
        let mut zigzags_n = 0;
        for p in &c.pillars {
            match p.kind {
                PillarKind::Oval => ovals_n += 1,
                PillarKind::Jump => jumps_n += 1,
                PillarKind::Zigzag => zigzags_n += 1,
                PillarKind::Hyperbolic => {}
            }
        }
        assert_eq!((ovals_n, jumps_n, zigzags_n), (n, n, 2 * n), "block({})", n);
        assert!(solve_labelling(&d).unwrap().is_type_i());
        assert!(check_summary_structure(&d, &l).unwrap().is_empty());
    }
}

#[test]
fn block2_crossing_and_noncrossing_agree() {
    // bijections with and without crossings give equivalent blocks
    let (d1, l1) = build_block(2, &[0, 2], &[1, 3]).unwrap();
    let (d2, l2) = build_block(2, &[0, 1], &[2, 3]).unwrap();
    for (d, l) in [(&d1, &l1), (&d2, &l2)] {
        assert!(validate_dessin(d).is_empty());
        assert!(check_labelling(d, l).unwrap().is_empty());
    }
}
