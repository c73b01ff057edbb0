use trigonal_core::gen::{random_skeleton, rng};
use trigonal_core::moves::*;
use trigonal_core::skeleton::validate_skeleton;

fn main() {
    let mut r = rng(37);
    let s = random_skeleton(&mut r, 2, 0);
    println!("skeleton:\n{}", trigonal_core::io::write_skeleton(&s));
    println!("valid: {}", validate_skeleton(&s).is_empty());
    let idx = s.graph.index();
    let mut darts = Vec::new();
    for e in s.graph.edges.values() {
        if !s.is_arc(&e.id) {
            darts.push(e.darts.0.clone());
            darts.push(e.darts.1.clone());
        }
    }
    darts.sort();
    let verts: Vec<_> = s.graph.vertices.keys().cloned().collect();
    let mut shown = 0;
    for v in &verts {
        let rot = s.chord_rotation(v).unwrap();
        for dstart in &darts {
            for after in std::iter::once(None).chain(rot.iter().map(|x| Some(x.clone()))) {
                let m = SkeletonMove::CreateBridge { edge_dart: dstart.clone(), v: v.clone(), after: after.clone() };
                match apply_skeleton_move(&s, &m) {
                    Ok(_) => { println!("OK  {}", m.describe()); }
                    Err(e) => { if shown < 12 { println!("ERR {}: {}", m.describe(), e); shown += 1; } }
                }
            }
        }
    }
    let _ = idx;
}
