//! Property-based differential checks over generated universes and
//! operation scripts.

use std::sync::Arc;

use proptest::collection::vec;
use proptest::prelude::*;

use lltree::hasse::HasseDiagram;
use lltree::query::{edge_query_brute, edge_query_fast};
use lltree::universe::{ElementId, UniverseTree};
use lltree::{LineLeafTree, SearchOutcome};

#[derive(Clone, Debug)]
enum Script {
    Insert(prop::sample::Index),
    Delete(prop::sample::Index),
    Query(prop::sample::Index),
}

fn script_strategy() -> impl Strategy<Value = (Vec<usize>, Vec<Script>)> {
    // parent choices encode an increasing tree on 2..=16 nodes
    (2usize..=16)
        .prop_flat_map(|m| {
            let parents: Vec<BoxedStrategy<usize>> =
                (1..m).map(|i| (0..i).boxed()).collect();
            (parents, Just(m))
        })
        .prop_flat_map(|(parents, _)| {
            let ops = vec(
                prop_oneof![
                    any::<prop::sample::Index>().prop_map(Script::Insert),
                    any::<prop::sample::Index>().prop_map(Script::Delete),
                    any::<prop::sample::Index>().prop_map(Script::Query),
                ],
                0..40,
            );
            (Just(parents), ops)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Any script of inserts, deletes and queries keeps the structure
    /// rebuild-equivalent, and membership answers match the model set.
    #[test]
    fn scripts_stay_rebuild_equivalent((parents, script) in script_strategy()) {
        let uni = Arc::new(UniverseTree::from_parents(&parents).unwrap());
        let m = uni.len();
        let h = HasseDiagram::from_members(uni.clone(), &[]).unwrap();
        let mut tree = LineLeafTree::build_static(h).unwrap();
        let mut members: Vec<ElementId> = Vec::new();
        for op in script {
            match op {
                Script::Insert(idx) => {
                    let free: Vec<ElementId> = (1..m).filter(|v| !members.contains(v)).collect();
                    if free.is_empty() { continue; }
                    let a = free[idx.index(free.len())];
                    tree.insert(a).unwrap();
                    members.push(a);
                }
                Script::Delete(idx) => {
                    if members.is_empty() { continue; }
                    let a = members.remove(idx.index(members.len()));
                    tree.delete(a).unwrap();
                }
                Script::Query(idx) => {
                    let u = idx.index(m);
                    let found = matches!(tree.search(u).unwrap(), SearchOutcome::Found(x) if x == u);
                    prop_assert_eq!(found, u == 0 || members.contains(&u));
                    continue;
                }
            }
            tree.check_structure().unwrap();
            let (ok, report) = tree.check_rebuild();
            prop_assert!(ok, "{}", report);
        }
    }

    /// The constant-test edge query agrees with the component oracle on
    /// arbitrary universes, member sets and query triples.
    #[test]
    fn fast_edge_query_agrees_with_oracle(
        (parents, picks) in (2usize..=24)
            .prop_flat_map(|m| {
                let parents: Vec<BoxedStrategy<usize>> = (1..m).map(|i| (0..i).boxed()).collect();
                (parents, vec(any::<(prop::sample::Index, prop::sample::Index, prop::sample::Index, bool)>(), 1..60))
            })
    ) {
        let uni = Arc::new(UniverseTree::from_parents(&parents).unwrap());
        let m = uni.len();
        let members: Vec<ElementId> = (1..m).filter(|&v| v % 2 == 1).collect();
        let h = HasseDiagram::from_members(uni, &members).unwrap();
        let all: Vec<ElementId> = h.members().collect();
        for (ix, iy, iu, _) in picks {
            let x = all[ix.index(all.len())];
            let y = all[iy.index(all.len())];
            if x == y { continue; }
            let u = iu.index(m);
            prop_assert_eq!(
                edge_query_fast(&h, x, y, u).unwrap(),
                edge_query_brute(&h, x, y, u).unwrap()
            );
        }
    }

    /// Predecessor through the search structure matches the diagram's
    /// linear definition for every element.
    #[test]
    fn predecessor_matches_diagram(
        parents in (2usize..=20).prop_flat_map(|m| {
            let p: Vec<BoxedStrategy<usize>> = (1..m).map(|i| (0..i).boxed()).collect();
            p
        }),
        density in 0.1f64..0.9
    ) {
        let uni = Arc::new(UniverseTree::from_parents(&parents).unwrap());
        let m = uni.len();
        let members: Vec<ElementId> = (1..m)
            .filter(|&v| ((v as f64 * 0.61803398875).fract()) < density)
            .collect();
        let h = HasseDiagram::from_members(uni, &members).unwrap();
        let tree = LineLeafTree::build_static(h).unwrap();
        for u in 0..m {
            prop_assert_eq!(
                tree.predecessor(u).unwrap(),
                tree.hasse().predecessor_in_set(u).unwrap()
            );
        }
    }
}
