//! Universe generators: uniform random increasing trees and the
//! adversarial family whose search cost grows a log-factor faster than
//! the optimum.

use crate::rng::Rng;
use crate::universe::UniverseTree;

/// Uniform random increasing tree on `n` nodes: node `i` (1 ≤ i < n)
/// attaches to a uniformly random `j < i`; node 0 is the root.
pub fn gen_increasing_tree(n: usize, seed: u64) -> UniverseTree {
    assert!(n >= 1);
    let mut rng = Rng::new(seed);
    let parents: Vec<usize> = (1..n).map(|i| rng.usize_below(i)).collect();
    UniverseTree::from_parents(&parents).expect("parents j < i cannot form a cycle")
}

/// Per-step audit data for the adversarial family generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TightStep {
    pub step: usize,
    /// Nodes that sprouted a pair of children this step.
    pub sprouted: usize,
    /// Children added this step.
    pub children_added: usize,
    /// Spine nodes added this step.
    pub spine_added: usize,
}

/// Adversarial family, grown over `k` steps.
///
/// A horizontal spine ends in a fixed rightmost node. Step 1 creates the
/// spine head and that rightmost node. Each later step `j` gives two
/// children to every node born at step `j - 1` and splices `2^(j-1)` new
/// spine nodes just left of the rightmost node. Total size after step
/// `k` is `Σ_{j=1..k} (j+1)·2^(j-1)`.
pub fn gen_tight_family(k: usize) -> (UniverseTree, Vec<TightStep>) {
    assert!(k >= 1);
    // parent[i] for node i >= 1; node 0 is the spine head and root.
    let mut parents: Vec<usize> = vec![0]; // node 1 = rightmost, child of 0
    let rightmost = 1usize;
    let mut spine_tail = 0usize; // spine node whose child is `rightmost`
    let mut newborns: Vec<usize> = vec![0, rightmost];
    let mut audit = Vec::new();
    for j in 2..=k {
        let sprouting = std::mem::take(&mut newborns);
        let mut children_added = 0;
        for &v in &sprouting {
            for _ in 0..2 {
                let id = parents.len() + 1;
                parents.push(v);
                newborns.push(id);
                children_added += 1;
            }
        }
        // Splice 2^(j-1) spine nodes between the spine tail and the
        // rightmost node.
        let spine_added = 1usize << (j - 1);
        for _ in 0..spine_added {
            let id = parents.len() + 1;
            parents.push(spine_tail);
            spine_tail = id;
            newborns.push(id);
        }
        parents[rightmost - 1] = spine_tail;
        audit.push(TightStep {
            step: j,
            sprouted: sprouting.len(),
            children_added,
            spine_added,
        });
    }
    let tree = UniverseTree::from_parents(&parents).expect("growth never forms a cycle");
    (tree, audit)
}

/// Closed form for the size of the adversarial family after `k` steps.
pub fn tight_family_size(k: usize) -> usize {
    (1..=k).map(|j| (j + 1) * (1 << (j - 1))).sum()
}
