//! The seeded generators must produce valid objects, and the typing
//! solver must agree with brute-force enumeration on them.

use std::collections::BTreeMap;

use trigonal_core::dessin::validate_dessin;
use trigonal_core::gen::{random_diagram, random_skeleton, random_type_i_dessin, random_type_ii_dessin, rng};
use trigonal_core::rational::diagram_to_skeleton;
use trigonal_core::skeleton::validate_skeleton;
use trigonal_core::typing::{check_labelling, solve_labelling, RegionLabelling};

#[test]
fn random_diagrams_embed_and_validate() {
    let mut r = rng(7);
    for i in 0..40 {
        let pairs = 1 + (i % 3);
        let c = random_diagram(&mut r, pairs);
        c.validate().expect("diagram valid");
        let s = diagram_to_skeleton(&c).expect("embeds");
        let rep = validate_skeleton(&s);
        assert!(rep.is_empty(), "skeleton invalid:\n{}", rep);
    }
}

#[test]
fn random_skeletons_stay_valid_under_moves() {
    let mut r = rng(11);
    for i in 0..25 {
        let s = random_skeleton(&mut r, 1 + (i % 3), 2);
        let rep = validate_skeleton(&s);
        assert!(rep.is_empty(), "skeleton invalid:\n{}", rep);
    }
}

#[test]
fn type_i_generator_extends() {
    let mut r = rng(13);
    let mut ok = 0;
    for i in 0..20 {
        if let Some((d, l)) = random_type_i_dessin(&mut r, 1 + (i % 3)) {
            assert!(validate_dessin(&d).is_empty());
            assert!(check_labelling(&d, &l).unwrap().is_empty());
            ok += 1;
        }
    }
    assert!(ok >= 15, "only {} extensions succeeded", ok);
}

#[test]
fn type_ii_generator_produces_unsat_instances() {
    let mut r = rng(17);
    let mut found = 0;
    for _ in 0..8 {
        if let Some(d) = random_type_ii_dessin(&mut r) {
            assert!(validate_dessin(&d).is_empty());
            let out = solve_labelling(&d).unwrap();
            assert!(!out.is_type_i());
            found += 1;
        }
    }
    assert!(found >= 1, "no type-II instances found");
}

/// Brute-force oracle: try all 3^regions labellings.
fn brute_force_type_i(d: &trigonal_core::dessin::Dessin) -> bool {
    let regions: Vec<_> = d.graph.regions.keys().cloned().collect();
    let n = regions.len();
    assert!(n <= 12, "too many regions for brute force");
    let mut counter = vec![0u8; n];
    loop {
        let label: BTreeMap<_, _> = regions
            .iter()
            .cloned()
            .zip(counter.iter().map(|x| x + 1))
            .collect();
        let l = RegionLabelling { label };
        if let Ok(rep) = check_labelling(d, &l) {
            if rep.is_empty() {
                return true;
            }
        }
        // increment
        let mut i = 0;
        loop {
            if i == n {
                return false;
            }
            counter[i] += 1;
            if counter[i] < 3 {
                break;
            }
            counter[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn solver_agrees_with_brute_force() {
    let mut r = rng(23);
    let mut tested = 0;
    for i in 0..30 {
        let candidate = if i % 3 == 0 {
            random_type_ii_dessin(&mut r)
        } else {
            random_type_i_dessin(&mut r, 1 + (i % 2)).map(|(d, _)| d)
        };
        if let Some(d) = candidate {
            if d.graph.regions.len() > 10 {
                continue;
            }
            let solver = solve_labelling(&d).unwrap().is_type_i();
            let brute = brute_force_type_i(&d);
            assert_eq!(solver, brute, "solver disagrees with brute force");
            tested += 1;
        }
    }
    assert!(tested >= 10, "too few instances tested: {}", tested);
}
