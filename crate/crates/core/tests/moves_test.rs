//! Move soundness: applied moves produce validator-passing results,
//! preserve degree and pillar sequences, and invert cleanly.

use trigonal_core::dessin::{analyze_real_components, degree, validate_dessin, PillarKind};
use trigonal_core::gen::{random_skeleton, random_type_i_dessin, rng};
use trigonal_core::moves::{
    apply_dessin_move, apply_skeleton_move, canonical_key_dessin, canonical_key_skeleton,
    enumerate_dessin_moves, enumerate_skeleton_moves, inverse_dessin_move,
};
use trigonal_core::rational::build_block;
use trigonal_core::skeleton::validate_skeleton;
use trigonal_core::typing::solve_labelling;

fn pillar_seq(d: &trigonal_core::dessin::Dessin) -> Vec<Vec<PillarKind>> {
    analyze_real_components(d)
        .into_iter()
        .map(|c| c.pillars.into_iter().map(|p| p.kind).collect())
        .collect()
}

#[test]
fn block1_has_moves_and_they_are_sound() {
    let (d, _) = build_block(1, &[0], &[1]).unwrap();
    let moves = enumerate_dessin_moves(&d);
    assert!(!moves.is_empty(), "block(1) admits no moves");
    let deg = degree(&d).unwrap();
    let pillars = pillar_seq(&d);
    for m in &moves {
        let next = apply_dessin_move(&d, m).expect("enumerated move must apply");
        let rep = validate_dessin(&next);
        assert!(rep.is_empty(), "move {} broke validity:\n{}", m.describe(), rep);
        assert_eq!(degree(&next).unwrap(), deg, "move {} changed degree", m.describe());
        assert_eq!(
            pillar_seq(&next),
            pillars,
            "move {} changed the pillar sequence",
            m.describe()
        );
        assert!(
            solve_labelling(&next).unwrap().is_type_i(),
            "move {} broke type I",
            m.describe()
        );
    }
}

#[test]
fn dessin_moves_invert() {
    let (d, _) = build_block(1, &[0], &[1]).unwrap();
    let key = canonical_key_dessin(&d);
    let moves = enumerate_dessin_moves(&d);
    let mut inverted = 0;
    for m in &moves {
        let next = apply_dessin_move(&d, m).unwrap();
        if let Some(inv) = inverse_dessin_move(&d, &next, m) {
            if let Ok(back) = apply_dessin_move(&next, &inv) {
                assert_eq!(
                    canonical_key_dessin(&back),
                    key,
                    "inverse of {} does not restore the dessin",
                    m.describe()
                );
                inverted += 1;
            }
        }
    }
    assert!(
        inverted >= moves.len() / 2,
        "only {}/{} moves inverted",
        inverted,
        moves.len()
    );
}

#[test]
fn random_move_sequences_stay_sound() {
    let mut r = rng(31);
    let mut applied = 0;
    for i in 0..10 {
        if let Some((mut d, _)) = random_type_i_dessin(&mut r, 1 + (i % 2)) {
            let deg = degree(&d).unwrap();
            let pillars = pillar_seq(&d);
            for _ in 0..4 {
                let moves = enumerate_dessin_moves(&d);
                if moves.is_empty() {
                    break;
                }
                use rand::Rng;
                let m = &moves[r.gen_range(0..moves.len())];
                d = apply_dessin_move(&d, m).unwrap();
                assert!(validate_dessin(&d).is_empty());
                assert_eq!(degree(&d).unwrap(), deg);
                assert_eq!(pillar_seq(&d), pillars);
                assert!(solve_labelling(&d).unwrap().is_type_i());
                applied += 1;
            }
        }
    }
    assert!(applied >= 20, "too few moves exercised: {}", applied);
}

#[test]
fn skeleton_moves_sound_and_preserve_parts() {
    let mut r = rng(37);
    let mut applied = 0;
    for i in 0..10 {
        let s = random_skeleton(&mut r, 1 + (i % 3), 0);
        let parts: Vec<_> = s.vertex_part.values().cloned().collect();
        for m in enumerate_skeleton_moves(&s).into_iter().take(6) {
            let next = apply_skeleton_move(&s, &m).expect("enumerated move applies");
            assert!(validate_skeleton(&next).is_empty());
            let parts2: Vec<_> = next.vertex_part.values().cloned().collect();
            assert_eq!(parts, parts2, "move {} changed vertex parts", m.describe());
            applied += 1;
        }
    }
    assert!(applied >= 10, "too few skeleton moves exercised: {}", applied);
}

#[test]
fn skeleton_canonical_key_distinguishes() {
    let mut r = rng(41);
    let s1 = random_skeleton(&mut r, 2, 0);
    let s2 = random_skeleton(&mut r, 3, 0);
    assert_eq!(canonical_key_skeleton(&s1), canonical_key_skeleton(&s1));
    assert_ne!(canonical_key_skeleton(&s1), canonical_key_skeleton(&s2));
}
