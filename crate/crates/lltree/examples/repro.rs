use std::sync::Arc;
use lltree::gen::gen_increasing_tree;
use lltree::hasse::HasseDiagram;
use lltree::rng::Rng;
use lltree::LineLeafTree;

fn main() {
    let mut rng = Rng::new(777);
    let mut ops_done = 0u64;
    for trace in 0..3000 {
        let m = 2 + rng.usize_below(23);
        let uni = Arc::new(gen_increasing_tree(m, rng.next_u64()));
        let h = HasseDiagram::from_members(uni.clone(), &[]).unwrap();
        let mut t = LineLeafTree::build_static(h).unwrap();
        let mut members: Vec<usize> = Vec::new();
        let mut ops: Vec<String> = Vec::new();
        for _ in 0..60 {
            let roll = rng.f64();
            if roll < 0.5 {
                let candidates: Vec<usize> = (1..m).filter(|v| !members.contains(v)).collect();
                if candidates.is_empty() { continue; }
                let a = candidates[rng.usize_below(candidates.len())];
                ops.push(format!("I{a}"));
                if let Err(e) = t.insert(a) {
                    println!("trace={trace} m={m} ERR insert: {e}\nuniverse:\n{}ops: {}", uni.render(), ops.join(" "));
                    return;
                }
                members.push(a);
            } else if roll < 0.8 {
                if members.is_empty() { continue; }
                let i = rng.usize_below(members.len());
                let a = members.swap_remove(i);
                ops.push(format!("D{a}"));
                if let Err(e) = t.delete(a) {
                    println!("trace={trace} m={m} ERR delete: {e}\nuniverse:\n{}ops: {}", uni.render(), ops.join(" "));
                    return;
                }
            } else {
                let u = rng.usize_below(m);
                let expect = u == 0 || members.contains(&u);
                if t.test_membership(u).unwrap() != expect {
                    println!("trace={trace} MEMBERSHIP WRONG u={u}");
                    return;
                }
                continue;
            }
            ops_done += 1;
            if let Err(e) = t.check_structure() {
                println!("trace={trace} m={m} AUDIT: {e}\nuniverse:\n{}ops: {}", uni.render(), ops.join(" "));
                return;
            }
            let (ok, rep) = t.check_rebuild();
            if !ok {
                println!("trace={trace} m={m} REBUILD\nuniverse:\n{}ops: {}\n{rep}", uni.render(), ops.join(" "));
                return;
            }
        }
    }
    println!("all ok: {ops_done} mutations validated");
}
