//! Component-structure contracts: linear-structure ordering, path
//! splits and merges, endpoint renames through shared edge records.

use std::sync::Arc;

use lltree::gen::gen_increasing_tree;
use lltree::hasse::HasseDiagram;
use lltree::rng::Rng;
use lltree::universe::{ElementId, UniverseTree};
use lltree::{Error, LineLeafTree};

/// The 23-element tree used across the crate: see the builder tests for
/// the layout. F=0, the chain G..K (ids 6..=10) sits between F and L=11.
fn worked_example() -> LineLeafTree {
    let parents = [
        3, 3, 0, 0, 0, 0, 6, 7, 8, 9, 10, 11, 11, 0, 14, 15, 16, 17, 15, 19, 12, 12,
    ];
    let uni = Arc::new(UniverseTree::from_parents(&parents).unwrap());
    let members: Vec<ElementId> = (1..uni.len()).collect();
    let h = HasseDiagram::from_members(uni, &members).unwrap();
    LineLeafTree::build_static(h).unwrap()
}

#[test]
fn split_then_merge_restores_in_order() {
    let mut t = worked_example();
    // the structure on (F, M) nests the (F, L) chain holding G..K
    let h_fm = t.lst(0)[t.lst(0).iter().position(|&h| t.ends(h).1 == 12).unwrap()];
    let h_fl = t.handle(h_fm).bst[0];
    assert_eq!(t.ends(h_fl), (0, 11));
    let before = t.bst_junctions(h_fl);
    assert_eq!(before, vec![6, 7, 8, 9, 10]);

    // split around I (id 8), then merge the halves back
    let (left, right) = t.bst_split_at(h_fl, 8).unwrap();
    assert_eq!(t.bst_junctions(left), vec![6, 7]);
    assert_eq!(t.bst_junctions(right), vec![9, 10]);
    let merged = t.bst_merge(&[left, right]).unwrap();
    assert_eq!(t.bst_junctions(merged), before);
    assert_eq!(t.ends(merged), (0, 11));
}

#[test]
fn merge_rejects_non_adjacent_segments() {
    let mut t = worked_example();
    let h_fm = t.lst(0)[t.lst(0).iter().position(|&h| t.ends(h).1 == 12).unwrap()];
    let h_fl = t.handle(h_fm).bst[0];
    let (left, right) = t.bst_split_at(h_fl, 8).unwrap();
    // drop the shared junction by splitting the right half once more
    let (mid, far) = t.bst_split_at(right, 9).unwrap();
    assert!(matches!(
        t.bst_merge(&[left, far]),
        Err(Error::NonAdjacentMerge)
    ));
    let _ = mid;
}

#[test]
fn lst_front_insert_enforces_order() {
    // Removing and re-inserting the front entry restores the sequence;
    // pushing a stale entry under a newer front is refused.
    let mut t = worked_example();
    let front_far = t.rho(0, 1).unwrap();
    let before: Vec<ElementId> = t.lst(0).iter().map(|&h| t.ends(h).1).collect();
    let h = t.lst_remove_far(0, front_far).unwrap();
    t.lst_insert_front(0, h).unwrap();
    let after: Vec<ElementId> = t.lst(0).iter().map(|&h| t.ends(h).1).collect();
    assert_eq!(before, after);

    // the round-1 entries of F cannot go in front of the round-2 run
    let stale_far = *before.last().unwrap();
    let stale = t.lst_remove_far(0, stale_far).unwrap();
    assert!(matches!(
        t.lst_insert_front(0, stale),
        Err(Error::OrderViolation)
    ));
}

#[test]
fn mu_matches_round_rescan_after_mutations() {
    let uni = Arc::new(gen_increasing_tree(40, 12));
    let h = HasseDiagram::from_members(uni.clone(), &[]).unwrap();
    let mut t = LineLeafTree::build_static(h).unwrap();
    let mut rng = Rng::new(4);
    let mut members: Vec<ElementId> = Vec::new();
    for _ in 0..120 {
        if rng.f64() < 0.6 || members.is_empty() {
            let free: Vec<ElementId> = (1..40).filter(|v| !members.contains(v)).collect();
            if free.is_empty() {
                continue;
            }
            let a = free[rng.usize_below(free.len())];
            t.insert(a).unwrap();
            members.push(a);
        } else {
            let i = rng.usize_below(members.len());
            let a = members.swap_remove(i);
            t.delete(a).unwrap();
        }
        for v in t.hasse().members().collect::<Vec<_>>() {
            let rescan: Vec<u32> = t
                .lst(v)
                .iter()
                .map(|&h| t.meta(t.ends(h).1).round)
                .collect();
            for (i, &r) in rescan.iter().enumerate() {
                assert_eq!(t.mu(v, i + 1), r, "mu({v},{})", i + 1);
            }
            assert_eq!(t.mu(v, rescan.len() + 1), 0, "mu past the end");
            assert!(rescan.windows(2).all(|w| w[0] >= w[1]), "order at {v}");
        }
    }
}

#[test]
fn rename_updates_every_query_through_the_record() {
    let mut t = worked_example();
    // the entry (F, M) reads its far endpoint through the (L, M) record
    let h_fm = t.lst(0)[t.lst(0).iter().position(|&h| t.ends(h).1 == 12).unwrap()];
    let rec = t.handle(h_fm).lam2.rec;
    t.hasse_mut().rename_record(rec, 12, 21).unwrap();
    assert_eq!(t.ends(h_fm).1, 21, "handle follows the renamed record");
    t.hasse_mut().rename_record(rec, 21, 12).unwrap();
    assert_eq!(t.ends(h_fm).1, 12, "rename back restores the endpoint");
    t.check_structure().unwrap();
    assert!(matches!(
        t.hasse_mut().rename_record(rec, 99, 3),
        Err(Error::EndpointMismatch(99))
    ));
}

#[test]
fn local_height_contract_under_random_mutations() {
    // Path structures are searched by midpoint, so each one answers in
    // at most 2*ceil(log2(p+2)) queries; spot-check the whole nest after
    // thousands of mutations.
    let uni = Arc::new(gen_increasing_tree(64, 9));
    let h = HasseDiagram::from_members(uni.clone(), &[]).unwrap();
    let mut t = LineLeafTree::build_static(h).unwrap();
    let mut rng = Rng::new(10);
    let mut members: Vec<ElementId> = Vec::new();
    let mut audits = 0u64;
    for _ in 0..10_000 {
        if rng.f64() < 0.55 || members.is_empty() {
            let free: Vec<ElementId> = (1..64).filter(|v| !members.contains(v)).collect();
            if free.is_empty() {
                continue;
            }
            let a = free[rng.usize_below(free.len())];
            t.insert(a).unwrap();
            members.push(a);
        } else {
            let i = rng.usize_below(members.len());
            let a = members.swap_remove(i);
            t.delete(a).unwrap();
        }
        let mut stack: Vec<_> = t
            .hasse()
            .members()
            .flat_map(|v| t.lst(v).to_vec())
            .collect();
        while let Some(h) = stack.pop() {
            let edges = &t.handle(h).bst;
            if edges.is_empty() {
                continue;
            }
            stack.extend(edges.iter().copied());
            let p = edges.len() - 1;
            let local = (usize::BITS - edges.len().leading_zeros()) as u64;
            let contract = 2 * lltree::tree::ceil_log2(p as u64 + 2);
            assert!(local <= contract.max(1), "p={p} local={local}");
            audits += 1;
        }
    }
    assert!(audits > 10_000);
}
