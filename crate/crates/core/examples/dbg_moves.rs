use trigonal_core::rational::build_block;
use trigonal_core::moves::*;
use trigonal_core::dessin::EdgeColor;

fn main() {
    let (d, _) = build_block(1, &[0], &[1]).unwrap();
    let idx = d.graph.index();
    println!("edges:");
    for e in d.graph.edges.values() {
        println!("  {} {} {}-{} real={} dir={}", e.id, d.color_of(&e.id).as_str(), e.ends.0, e.ends.1, d.graph.is_real_edge(&e.id), d.dir[&e.id]);
    }
    println!("regions:");
    for r in d.graph.regions.values() {
        println!("  {:?}", r);
    }
    // try a create-bridge by hand: find inner solid edge and real solid in same region
    for e in d.graph.edges.values() {
        if !d.graph.is_real_edge(&e.id) {
            for dart in [&e.darts.0, &e.darts.1] {
                if let Some(r) = idx.dart_region.get(dart) {
                    for er in d.graph.edges.values() {
                        if d.graph.is_real_edge(&er.id) && d.color_of(&er.id) == d.color_of(&e.id) {
                            let er_dart = if idx.dart_region.contains_key(&er.darts.0) { &er.darts.0 } else { &er.darts.1 };
                            if idx.dart_region.get(er_dart) == Some(r) {
                                let m = DessinMove::CreateBridge { inner: dart.clone(), real: er.id.clone() };
                                match apply_dessin_move(&d, &m) {
                                    Ok(_) => println!("OK: {}", m.describe()),
                                    Err(e2) => println!("ERR {}: {}", m.describe(), e2),
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}
