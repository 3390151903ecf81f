//! Exact optimal static search-tree height for small member trees, plus
//! the cheap lower bound used beyond the exact budget.
//!
//! The model: a search tree queries edges of the member tree; an edge
//! query splits the tree in two and the search recurses into the half
//! holding the target. The height of a single node is 0; otherwise it is
//! `1 + min over edges of the max over both sides`.

use std::collections::HashMap;

use crate::error::Error;
use crate::Result;

/// Exact budget: connected-subtree bitmasks stay tractable up to here.
pub const OPT_BUDGET: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OptResult {
    /// Minimum worst-case number of edge queries.
    pub height: u32,
    /// An optimal first query, as an index pair into the node list.
    pub first_query: Option<(usize, usize)>,
}

/// Undirected tree on `n` nodes given by its edge list.
#[derive(Debug, Clone)]
pub struct SmallTree {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl SmallTree {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> SmallTree {
        debug_assert!(n == 0 || edges.len() == n - 1);
        SmallTree { n, edges }
    }

    pub fn path(n: usize) -> SmallTree {
        SmallTree::new(n, (1..n).map(|i| (i - 1, i)).collect())
    }

    pub fn star(k: usize) -> SmallTree {
        SmallTree::new(k + 1, (1..=k).map(|i| (0, i)).collect())
    }

    pub fn max_degree(&self) -> usize {
        let mut deg = vec![0usize; self.n];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }
}

/// Exact minimum worst-case edge-query count, memoized on connected
/// vertex subsets.
pub fn opt_height(tree: &SmallTree) -> Result<OptResult> {
    if tree.n > OPT_BUDGET {
        return Err(Error::TooLarge {
            n: tree.n,
            budget: OPT_BUDGET,
        });
    }
    if tree.n <= 1 {
        return Ok(OptResult {
            height: 0,
            first_query: None,
        });
    }
    let mut memo: HashMap<u32, u32> = HashMap::new();
    let full = if tree.n == 32 { u32::MAX } else { (1u32 << tree.n) - 1 };
    let h = solve(tree, full, &mut memo);
    let first = best_first_query(tree, full, &mut memo);
    Ok(OptResult {
        height: h,
        first_query: first,
    })
}

fn solve(tree: &SmallTree, mask: u32, memo: &mut HashMap<u32, u32>) -> u32 {
    if mask.count_ones() <= 1 {
        return 0;
    }
    if let Some(&h) = memo.get(&mask) {
        return h;
    }
    let mut best = u32::MAX;
    for &(a, b) in &tree.edges {
        if mask & (1 << a) != 0 && mask & (1 << b) != 0 {
            let side_a = component(tree, mask, a, (a, b));
            let side_b = mask & !side_a;
            let h = 1 + solve(tree, side_a, memo).max(solve(tree, side_b, memo));
            best = best.min(h);
        }
    }
    debug_assert!(best != u32::MAX, "connected mask with >1 node has an internal edge");
    memo.insert(mask, best);
    best
}

fn best_first_query(
    tree: &SmallTree,
    mask: u32,
    memo: &mut HashMap<u32, u32>,
) -> Option<(usize, usize)> {
    let target = solve(tree, mask, memo);
    if target == 0 {
        return None;
    }
    for &(a, b) in &tree.edges {
        if mask & (1 << a) != 0 && mask & (1 << b) != 0 {
            let side_a = component(tree, mask, a, (a, b));
            let side_b = mask & !side_a;
            if 1 + solve(tree, side_a, memo).max(solve(tree, side_b, memo)) == target {
                return Some((a, b));
            }
        }
    }
    None
}

/// Vertices of `mask` reachable from `start` without crossing `cut`.
fn component(tree: &SmallTree, mask: u32, start: usize, cut: (usize, usize)) -> u32 {
    let mut seen = 1u32 << start;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &(a, b) in &tree.edges {
            if (a, b) == cut || (b, a) == cut {
                continue;
            }
            let w = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if mask & (1 << w) != 0 && seen & (1 << w) == 0 {
                seen |= 1 << w;
                stack.push(w);
            }
        }
    }
    seen
}

/// Independent check: the same recursion without memoization. Kept apart
/// from the DP so the two can be compared in tests.
pub fn opt_height_unmemoized(tree: &SmallTree) -> u32 {
    fn rec(tree: &SmallTree, mask: u32) -> u32 {
        if mask.count_ones() <= 1 {
            return 0;
        }
        let mut best = u32::MAX;
        for &(a, b) in &tree.edges {
            if mask & (1 << a) != 0 && mask & (1 << b) != 0 {
                let side_a = component(tree, mask, a, (a, b));
                let side_b = mask & !side_a;
                best = best.min(1 + rec(tree, side_a).max(rec(tree, side_b)));
            }
        }
        best
    }
    if tree.n <= 1 {
        return 0;
    }
    let full = (1u32 << tree.n) - 1;
    rec(tree, full)
}

/// Lower bound usable at any size: a highest-degree node needs one query
/// per incident edge, and every query at most halves the candidates.
pub fn opt_lower_bound(max_degree: usize, n: usize) -> u32 {
    let log = if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as u32
    };
    (max_degree as u32).max(log)
}

/// Enumerate all rooted tree shapes on `n` nodes as parent vectors in
/// canonical (level-sequence) order. Every shape is realizable as an
/// increasing tree by labelling along a BFS order.
pub fn rooted_tree_shapes(n: usize) -> Vec<Vec<usize>> {
    // Beyer–Hedetniemi successor algorithm on level sequences.
    assert!(n >= 1);
    let mut out = Vec::new();
    let mut levels: Vec<usize> = (0..n).collect(); // the path: 0,1,...,n-1
    loop {
        out.push(levels_to_parents(&levels));
        // Find rightmost entry > 1 (root level is 0, its child level 1).
        let Some(p) = (1..n).rev().find(|&i| levels[i] > 1) else {
            break;
        };
        let q = (0..p).rev().find(|&i| levels[i] == levels[p] - 1).unwrap();
        let span = p - q;
        let mut i = p;
        while i < n {
            levels[i] = levels[i - span];
            i += 1;
        }
    }
    out
}

fn levels_to_parents(levels: &[usize]) -> Vec<usize> {
    // parent of node i (i >= 1) = most recent earlier node one level up.
    let mut parents = vec![0usize; levels.len() - 1];
    for i in 1..levels.len() {
        let p = (0..i).rev().find(|&j| levels[j] + 1 == levels[i]).unwrap();
        parents[i - 1] = p;
    }
    parents
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_needs_no_queries() {
        let t = SmallTree::new(1, vec![]);
        assert_eq!(opt_height(&t).unwrap().height, 0);
    }

    #[test]
    fn star_needs_degree_queries() {
        for k in 1..=8 {
            let t = SmallTree::star(k);
            assert_eq!(opt_height(&t).unwrap().height, k as u32, "star {k}");
        }
    }

    #[test]
    fn path_matches_independent_enumeration() {
        let t = SmallTree::path(8); // 7 edges
        let dp = opt_height(&t).unwrap().height;
        assert_eq!(dp, opt_height_unmemoized(&t));
        assert_eq!(dp, 3); // binary search over 8 positions
    }

    #[test]
    fn budget_enforced() {
        let t = SmallTree::path(OPT_BUDGET + 1);
        assert!(matches!(opt_height(&t), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(opt_lower_bound(5, 6), 5);
        assert_eq!(opt_lower_bound(2, 8), 3);
        assert_eq!(opt_lower_bound(0, 1), 0);
    }

    #[test]
    fn shape_counts() {
        // Number of rooted trees on n nodes: 1, 1, 2, 4, 9, 20, 48, 115.
        let expect = [1usize, 1, 2, 4, 9, 20, 48, 115];
        for (i, &e) in expect.iter().enumerate() {
            assert_eq!(rooted_tree_shapes(i + 1).len(), e, "n={}", i + 1);
        }
    }

    #[test]
    fn dp_equals_enumeration_small() {
        for n in 1..=7 {
            for parents in rooted_tree_shapes(n) {
                let edges: Vec<(usize, usize)> =
                    parents.iter().enumerate().map(|(i, &p)| (p, i + 1)).collect();
                let t = SmallTree::new(n, edges);
                assert_eq!(
                    opt_height(&t).unwrap().height,
                    opt_height_unmemoized(&t),
                    "n={n} parents={parents:?}"
                );
            }
        }
    }
}
