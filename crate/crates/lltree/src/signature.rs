//! Canonical serialization of a [`LineLeafTree`] and the
//! rebuild-equivalence check built on it.
//!
//! Two trees with equal signatures answer every search identically: the
//! signature captures each node's round, type and parent, each linear
//! structure as round-grouped sets, and each balanced structure as its
//! endpoint pair plus in-order node sequence. Internal balanced-tree
//! shape is excluded, and runs of equal rounds in a linear structure are
//! rendered as sorted sets since their order is not semantically
//! visible.
//!
//! A final leaf contraction between two surviving nodes picks a root
//! arbitrarily; [`LineLeafTree::normalize_root`] re-expresses such a
//! tree with the smaller-id survivor as root so that histories with
//! different choices compare equal.

use std::fmt::Write as _;

use crate::tree::{HandleId, LineLeafTree, NodeMeta, NodeType, ParentLoc};
use crate::universe::ElementId;

/// Canonical text form of the whole structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature(pub String);

impl LineLeafTree {
    /// True when the root and its most recent entry form the symmetric
    /// surviving pair: either could have been made root.
    pub fn root_pair_swappable(&self) -> Option<ElementId> {
        let r = self.root();
        let k = self.meta(r).round as i64;
        let mu = |i: usize| self.mu(r, i) as i64;
        if mu(1) == k - 1 && mu(2) == k - 2 && mu(3) == k - 2 {
            Some(self.rho(r, 1).expect("mu(1) nonzero implies an entry"))
        } else {
            None
        }
    }

    /// If the final contraction had a choice of root, re-root at the
    /// smaller id of the surviving pair. Idempotent.
    pub fn normalize_root(&mut self) {
        let r = self.root();
        let Some(p) = self.root_pair_swappable() else {
            return;
        };
        if p >= r {
            return;
        }
        let k = self.meta(r).round;
        let h = self
            .lst_remove_far(r, p)
            .expect("pair entry present in the root's structure");
        self.orient(h, p);
        self.meta_mut(r).round = k - 1;
        self.meta_mut(r).ty = NodeType::Leaf;
        self.lst_insert_sorted(p, h);
        self.meta_mut(p).round = k;
        self.meta_mut(p).ty = NodeType::Leaf;
        self.meta_mut(p).parent = ParentLoc::Root;
        self.set_root(p);
    }

    /// Canonical signature, computed after root normalization (the tree
    /// itself is not mutated).
    pub fn signature(&self) -> Signature {
        match self.root_pair_swappable() {
            Some(p) if p < self.root() => {
                let mut c = self.clone();
                c.normalize_root();
                c.render_signature()
            }
            _ => self.render_signature(),
        }
    }

    fn render_signature(&self) -> Signature {
        let mut out = String::new();
        let _ = writeln!(out, "root {}", self.root());
        for v in self.hasse().members() {
            let NodeMeta { round, ty, parent } = *self.meta(v);
            let ty = match ty {
                NodeType::Line => "line",
                NodeType::Leaf => "leaf",
            };
            let parent = match parent {
                ParentLoc::Root => "none".to_string(),
                ParentLoc::Lst(o) => format!("node:{o}"),
                ParentLoc::Bst(h) => {
                    let (a, b) = self.ends(h);
                    format!("edge:{}-{}", a.min(b), a.max(b))
                }
            };
            let _ = writeln!(out, "node {v} round={round} type={ty} parent={parent}");
        }
        for v in self.hasse().members() {
            if self.lst(v).is_empty() {
                continue;
            }
            let _ = write!(out, "lst {v}:");
            let mut i = 0;
            let entries = self.lst(v);
            while i < entries.len() {
                let r = self.meta(self.end2(entries[i])).round;
                let mut group: Vec<ElementId> = Vec::new();
                while i < entries.len() && self.meta(self.end2(entries[i])).round == r {
                    group.push(self.end2(entries[i]));
                    i += 1;
                }
                group.sort_unstable();
                let ids: Vec<String> = group.iter().map(|x| x.to_string()).collect();
                let _ = write!(out, " r{r}:{{{}}}", ids.join(","));
            }
            out.push('\n');
        }
        // Balanced structures, canonically keyed by endpoint pair.
        let mut bsts: Vec<(ElementId, ElementId, Vec<ElementId>)> = Vec::new();
        let mut stack: Vec<HandleId> = Vec::new();
        for v in self.hasse().members() {
            stack.extend(self.lst(v).iter().copied());
        }
        while let Some(h) = stack.pop() {
            let edges = &self.handle(h).bst;
            if edges.is_empty() {
                continue;
            }
            stack.extend(edges.iter().copied());
            let (a, b) = self.ends(h);
            let mut seq: Vec<ElementId> = (1..edges.len()).map(|i| self.end1(edges[i])).collect();
            let (lo, hi) = (a.min(b), a.max(b));
            if a > b {
                seq.reverse();
            }
            bsts.push((lo, hi, seq));
        }
        bsts.sort();
        for (a, b, seq) in bsts {
            let ids: Vec<String> = seq.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "bst {a}-{b}: {}", ids.join(","));
        }
        Signature(out)
    }

    /// Compare against a fresh static build of the current member set.
    /// On mismatch the report holds the first differing line of the two
    /// signatures.
    pub fn check_rebuild(&self) -> (bool, String) {
        let dynamic = self.signature();
        let rebuilt = match LineLeafTree::build_static(self.hasse().clone()) {
            Ok(t) => t,
            Err(e) => return (false, format!("rebuild failed: {e}")),
        };
        let fresh = rebuilt.signature();
        if dynamic == fresh {
            (true, String::new())
        } else {
            let mut report = String::from("signatures differ\n");
            for (a, b) in dynamic.0.lines().zip(fresh.0.lines()) {
                if a != b {
                    let _ = writeln!(report, "dynamic: {a}\nrebuilt: {b}");
                    break;
                }
            }
            let (la, lb) = (dynamic.0.lines().count(), fresh.0.lines().count());
            if la != lb {
                let _ = writeln!(report, "line counts differ: dynamic {la}, rebuilt {lb}");
            }
            (false, report)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hasse::HasseDiagram;
    use crate::universe::UniverseTree;
    use std::sync::Arc;

    #[test]
    fn signature_idempotent_under_normalization() {
        let uni = Arc::new(crate::gen::gen_increasing_tree(30, 3));
        let members: Vec<usize> = (1..30).step_by(2).collect();
        let h = HasseDiagram::from_members(uni, &members).unwrap();
        let t = LineLeafTree::build_static(h).unwrap();
        let s1 = t.signature();
        let mut n = t.clone();
        n.normalize_root();
        n.check_structure().unwrap();
        let s2 = n.signature();
        let mut n2 = n.clone();
        n2.normalize_root();
        assert_eq!(s1, s2);
        assert_eq!(s2, n2.signature());
    }

    #[test]
    fn fresh_build_equals_itself() {
        let uni = Arc::new(crate::gen::gen_increasing_tree(40, 8));
        let members: Vec<usize> = (1..40).filter(|v| v % 3 != 0).collect();
        let h = HasseDiagram::from_members(uni, &members).unwrap();
        let t = LineLeafTree::build_static(h).unwrap();
        let (ok, report) = t.check_rebuild();
        assert!(ok, "{report}");
    }

    #[test]
    fn corrupted_round_is_detected() {
        let uni = Arc::new(UniverseTree::from_parents(&[0, 1, 2, 0, 4]).unwrap());
        let members: Vec<usize> = (1..6).collect();
        let h = HasseDiagram::from_members(uni, &members).unwrap();
        let mut t = LineLeafTree::build_static(h).unwrap();
        let victim = t.hasse().members().find(|&v| v != t.root()).unwrap();
        t.meta_mut(victim).round += 7;
        let (ok, report) = t.check_rebuild();
        assert!(!ok);
        assert!(report.contains("node") || report.contains("lst"), "{report}");
    }
}
