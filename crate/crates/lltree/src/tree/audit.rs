//! Structure audits: the per-node round-profile invariant, full
//! wiring consistency, and the per-search component-sequence check.

use std::collections::HashSet;

use super::{HandleId, LineLeafTree, NodeType, ParentLoc, SearchStats};
use crate::error::Error;
use crate::universe::ElementId;
use crate::Result;

impl LineLeafTree {
    /// Round-profile invariant at `v`: relates a node's round and type to
    /// the rounds of the nodes contracted into it.
    pub fn profile_ok(&self, v: ElementId) -> bool {
        let k = self.meta[v].round as i64;
        let mu = |i: usize| self.mu(v, i) as i64;
        match self.meta[v].parent {
            ParentLoc::Root => {
                (mu(1) == k - 1 && mu(2) == k - 2 && mu(3) == k - 2)
                    || (mu(1) == k - 1 && mu(2) == k - 1 && mu(3) == k - 1)
            }
            _ => match self.meta[v].ty {
                NodeType::Leaf => mu(1) == k - 1 && mu(2) == k - 1,
                NodeType::Line => mu(1) == k - 1,
            },
        }
    }

    /// Audit a recorded search: per structure kind, rounds strictly
    /// decrease, so at most one linear and one balanced structure is
    /// visited per contraction round.
    pub fn audit_search(stats: &SearchStats) -> Result<()> {
        for (name, rounds) in [("lst", &stats.lst_rounds), ("bst", &stats.bst_rounds)] {
            for w in rounds.windows(2) {
                if w[1] >= w[0] {
                    return Err(Error::Corrupt(format!(
                        "search visited {name} rounds out of order: {rounds:?}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Full wiring audit. Checks, over the whole reachable structure:
    /// membership partition, parent back-pointers, handle orientation and
    /// edge-reference incidence, per-structure round uniformity, order of
    /// linear structures, the round-profile invariant, and that every
    /// path structure matches the member-tree segment it stands for.
    pub fn check_structure(&self) -> Result<()> {
        if !self.contains(self.root) {
            return Err(Error::Corrupt("root is not a member".into()));
        }
        if !matches!(self.meta[self.root].parent, ParentLoc::Root) {
            return Err(Error::Corrupt("root's parent is not none".into()));
        }
        self.hasse.check()?;

        let mut placed: HashSet<ElementId> = HashSet::new();
        placed.insert(self.root);
        let mut seen_handles: HashSet<HandleId> = HashSet::new();

        // Walk all linear structures of members; collect every handle.
        let mut queue: Vec<HandleId> = Vec::new();
        for v in self.hasse.members() {
            let mut prev_round = u32::MAX;
            for &h in &self.lsts[v] {
                if self.end1(h) != v {
                    return Err(Error::Corrupt(format!(
                        "entry of {v} not oriented owner-first: {:?}",
                        self.ends(h)
                    )));
                }
                let far = self.end2(h);
                let r = self.meta[far].round;
                if r > prev_round {
                    return Err(Error::Corrupt(format!("lst({v}) rounds out of order")));
                }
                prev_round = r;
                if r >= self.meta[v].round && self.meta[v].round != 0 {
                    return Err(Error::Corrupt(format!(
                        "entry {far} (round {r}) not earlier than owner {v} (round {})",
                        self.meta[v].round
                    )));
                }
                if self.meta[far].parent != ParentLoc::Lst(v) {
                    return Err(Error::Corrupt(format!(
                        "{far} sits in lst({v}) but its parent disagrees"
                    )));
                }
                if self.meta[far].ty != NodeType::Leaf {
                    return Err(Error::Corrupt(format!("lst entry {far} is not leaf-typed")));
                }
                if !placed.insert(far) {
                    return Err(Error::Corrupt(format!("{far} placed twice")));
                }
                queue.push(h);
                seen_handles.insert(h);
            }
        }

        // Walk nested balanced structures.
        let mut qi = 0;
        while qi < queue.len() {
            let h = queue[qi];
            qi += 1;
            let hh = &self.handles[h.0];
            if !hh.alive {
                return Err(Error::Corrupt("dead handle reachable".into()));
            }
            let (x, y) = self.ends(h);
            if x == y {
                return Err(Error::Corrupt(format!("degenerate handle on {x}")));
            }
            // Edge references point at live records incident to the
            // reported endpoints.
            for lam in [hh.lam1, hh.lam2] {
                if !self.hasse.record(lam.rec).live {
                    return Err(Error::Corrupt(format!(
                        "handle ({x},{y}) references a retired edge record"
                    )));
                }
            }
            let edges = &hh.bst;
            if edges.len() == 1 {
                return Err(Error::Corrupt(format!(
                    "structure ({x},{y}) wraps a single edge"
                )));
            }
            if edges.is_empty() {
                // actual edge: both references name the same record
                if hh.lam1.rec != hh.lam2.rec {
                    return Err(Error::Corrupt(format!(
                        "empty structure ({x},{y}) is not an actual edge"
                    )));
                }
                if self.hasse.pred(x) != Some(y) && self.hasse.pred(y) != Some(x) {
                    return Err(Error::Corrupt(format!("({x},{y}) is not a member-tree edge")));
                }
                continue;
            }
            // boundary references are shared with the boundary edges
            if self.handles[edges[0].0].lam1 != hh.lam1
                || self.handles[edges[edges.len() - 1].0].lam2 != hh.lam2
            {
                return Err(Error::Corrupt(format!(
                    "structure ({x},{y}) boundary references not inherited from its edges"
                )));
            }
            // junction chain and uniform round
            let round = self.bst_round(h);
            let mut path_nodes = vec![x];
            for i in 0..edges.len() {
                let e = edges[i];
                if self.end1(e) != path_nodes[i] {
                    return Err(Error::Corrupt(format!(
                        "edge chain of ({x},{y}) breaks at position {i}"
                    )));
                }
                path_nodes.push(self.end2(e));
                if i + 1 < edges.len() {
                    let j = self.end2(e);
                    if self.meta[j].round != round {
                        return Err(Error::Corrupt(format!(
                            "junction {j} of ({x},{y}) has round {} != {round}",
                            self.meta[j].round
                        )));
                    }
                    if self.meta[j].parent != ParentLoc::Bst(h) {
                        return Err(Error::Corrupt(format!(
                            "junction {j} of ({x},{y}) has a stale parent"
                        )));
                    }
                    if self.meta[j].ty != NodeType::Line {
                        return Err(Error::Corrupt(format!("junction {j} is not line-typed")));
                    }
                    if !placed.insert(j) {
                        return Err(Error::Corrupt(format!("{j} placed twice")));
                    }
                }
                if !seen_handles.insert(e) {
                    return Err(Error::Corrupt("handle reachable twice".into()));
                }
                queue.push(e);
            }
            if *path_nodes.last().unwrap() != y {
                return Err(Error::Corrupt(format!("edge chain of ({x},{y}) ends early")));
            }
            // The in-order nodes are exactly the members of the given
            // round on the member-tree path between the endpoints.
            let seg = self.member_path(x, y);
            let expect: Vec<ElementId> = seg[1..seg.len() - 1]
                .iter()
                .copied()
                .filter(|&v| self.meta[v].round == round)
                .collect();
            let got = self.bst_junctions(h);
            if got != expect {
                return Err(Error::Corrupt(format!(
                    "structure ({x},{y}) holds {got:?}, segment expects {expect:?}"
                )));
            }
        }

        // Every member is placed exactly once.
        for v in self.hasse.members() {
            if !placed.contains(&v) {
                return Err(Error::Corrupt(format!("member {v} unreachable")));
            }
        }

        // Round-profile invariant everywhere.
        for v in self.hasse.members() {
            if !self.profile_ok(v) {
                let mus: Vec<u32> = (1..=4).map(|i| self.mu(v, i)).collect();
                return Err(Error::Corrupt(format!(
                    "round profile fails at {v}: round={} ty={:?} parent={:?} mu={mus:?}",
                    self.meta[v].round, self.meta[v].ty, self.meta[v].parent
                )));
            }
        }
        Ok(())
    }

    /// Member-tree path from `x` to `y` inclusive.
    pub(crate) fn member_path(&self, x: ElementId, y: ElementId) -> Vec<ElementId> {
        let uni = self.universe();
        let mut up_x = vec![x];
        let mut cur = x;
        while let Some(p) = self.hasse.pred(cur) {
            up_x.push(p);
            cur = p;
        }
        let mut up_y = vec![y];
        cur = y;
        while let Some(p) = self.hasse.pred(cur) {
            up_y.push(p);
            cur = p;
        }
        let meet = *up_x
            .iter()
            .find(|v| up_y.contains(v))
            .expect("member tree is connected");
        let mut path: Vec<ElementId> = up_x.iter().copied().take_while(|&v| v != meet).collect();
        path.push(meet);
        let tail: Vec<ElementId> = up_y.iter().copied().take_while(|&v| v != meet).collect();
        path.extend(tail.into_iter().rev());
        debug_assert!(uni.leq(meet, x) && uni.leq(meet, y));
        path
    }
}

/// Per-search audit record, re-exported for harness use.
pub type SearchAudit = SearchStats;
