//! Primitives over the balanced path structures: orientation, split,
//! merge, and edge insertion/removal on the ordered edge lists.

use super::{HandleId, LineLeafTree, ParentLoc};
use crate::error::Error;
use crate::universe::ElementId;
use crate::Result;

impl LineLeafTree {
    /// Creation round of the structure behind `h`: the shared round of
    /// its interior nodes, 0 when empty.
    pub(crate) fn bst_round(&self, h: HandleId) -> u32 {
        let edges = &self.handles[h.0].bst;
        if edges.is_empty() {
            0
        } else {
            self.meta[self.end2(edges[0])].round
        }
    }

    /// Interior nodes in order: the shared endpoints of consecutive edges.
    pub fn bst_junctions(&self, h: HandleId) -> Vec<ElementId> {
        let edges = &self.handles[h.0].bst;
        (1..edges.len()).map(|i| self.end1(edges[i])).collect()
    }

    /// Height of the balanced structure in edge queries per level,
    /// counting nested structures.
    pub fn bst_height(&self, h: HandleId) -> u32 {
        let edges = &self.handles[h.0].bst;
        if edges.is_empty() {
            return 0;
        }
        let local = (usize::BITS - edges.len().leading_zeros()) as u32;
        let nested = edges.iter().map(|&e| self.bst_height(e)).max().unwrap_or(0);
        local + nested
    }

    /// Orient `h` so its first endpoint is `left`, reversing the whole
    /// nested structure when needed.
    pub(crate) fn orient(&mut self, h: HandleId, left: ElementId) {
        if self.end1(h) == left {
            return;
        }
        assert_eq!(self.end2(h), left, "orient target must be an endpoint");
        self.flip(h);
    }

    pub(crate) fn flip(&mut self, h: HandleId) {
        let mut stack = vec![h];
        while let Some(x) = stack.pop() {
            let hx = &mut self.handles[x.0];
            std::mem::swap(&mut hx.lam1, &mut hx.lam2);
            hx.bst.reverse();
            stack.extend(hx.bst.iter().copied());
            self.counters.structure_ops += 1;
        }
    }

    /// Point every interior node's parent at `h`.
    pub(crate) fn refresh_bst_parents(&mut self, h: HandleId) {
        for v in self.bst_junctions(h) {
            self.meta[v].parent = ParentLoc::Bst(h);
        }
    }

    /// Split at interior node `v`: the edge list divides into the part
    /// ending at `v` and the part starting at `v`. `h` is left alive with
    /// an empty list; the caller decides its fate.
    pub fn bst_split_at(&mut self, h: HandleId, v: ElementId) -> Result<(HandleId, HandleId)> {
        let edges = std::mem::take(&mut self.handles[h.0].bst);
        let cut = (1..edges.len())
            .find(|&i| self.end1(edges[i]) == v)
            .ok_or_else(|| Error::Corrupt(format!("{v} is not an interior node of the structure")))?;
        let left: Vec<HandleId> = edges[..cut].to_vec();
        let right: Vec<HandleId> = edges[cut..].to_vec();
        self.counters.structure_ops += edges.len() as u64;
        let hl = if left.len() == 1 {
            left[0]
        } else {
            let lam1 = self.handles[left[0].0].lam1;
            let lam2 = self.handles[left[left.len() - 1].0].lam2;
            let nh = self.new_handle(lam1, lam2, left);
            self.refresh_bst_parents(nh);
            nh
        };
        let hr = if right.len() == 1 {
            right[0]
        } else {
            let lam1 = self.handles[right[0].0].lam1;
            let lam2 = self.handles[right[right.len() - 1].0].lam2;
            let nh = self.new_handle(lam1, lam2, right);
            self.refresh_bst_parents(nh);
            nh
        };
        Ok((hl, hr))
    }

    /// Remove the edge at `idx` from `h`'s list, fixing the boundary
    /// references when the removed edge was first or last.
    pub(crate) fn bst_remove_at(&mut self, h: HandleId, idx: usize) -> HandleId {
        let e = self.handles[h.0].bst.remove(idx);
        self.counters.structure_ops += 1;
        let len = self.handles[h.0].bst.len();
        if len > 0 {
            if idx == 0 {
                let lam = self.handles[self.handles[h.0].bst[0].0].lam1;
                self.set_lam1(h, lam);
            } else if idx == len {
                let lam = self.handles[self.handles[h.0].bst[len - 1].0].lam2;
                self.set_lam2(h, lam);
            }
        }
        e
    }

    /// Insert edge `e` at `idx`, fixing boundary references.
    pub(crate) fn bst_insert_at(&mut self, h: HandleId, idx: usize, e: HandleId) {
        self.handles[h.0].bst.insert(idx, e);
        self.counters.structure_ops += 1;
        let len = self.handles[h.0].bst.len();
        if idx == 0 {
            let lam = self.handles[e.0].lam1;
            self.set_lam1(h, lam);
        }
        if idx == len - 1 {
            let lam = self.handles[e.0].lam2;
            self.set_lam2(h, lam);
        }
    }

    /// Position of the edge `e` in `h`'s list.
    pub(crate) fn bst_index_of(&self, h: HandleId, e: HandleId) -> Result<usize> {
        self.handles[h.0]
            .bst
            .iter()
            .position(|&x| x == e)
            .ok_or_else(|| Error::Corrupt("edge not found in its supposed structure".into()))
    }

    /// Junction index of interior node `v` in `h`: the index `i` such
    /// that `v` joins edges `i-1` and `i`.
    pub(crate) fn bst_junction_index(&self, h: HandleId, v: ElementId) -> Result<usize> {
        (1..self.handles[h.0].bst.len())
            .find(|&i| {
                let e = self.handles[h.0].bst[i];
                self.end1(e) == v
            })
            .ok_or_else(|| Error::Corrupt(format!("{v} is not a junction of the structure")))
    }

    /// Merge two or three adjacent segment structures into one new
    /// handle whose list is the concatenation. Operands must chain
    /// end-to-end; their lists are consumed.
    pub fn bst_merge(&mut self, parts: &[HandleId]) -> Result<HandleId> {
        debug_assert!(parts.len() == 2 || parts.len() == 3);
        for w in parts.windows(2) {
            if self.end2(w[0]) != self.end1(w[1]) {
                return Err(Error::NonAdjacentMerge);
            }
        }
        let lam1 = self.handles[parts[0].0].lam1;
        let lam2 = self.handles[parts[parts.len() - 1].0].lam2;
        let mut edges = Vec::new();
        for &p in parts {
            let inner = std::mem::take(&mut self.handles[p.0].bst);
            if inner.is_empty() {
                // an actual edge participates as a single edge
                edges.push(p);
            } else {
                let junction = self.end1(p);
                if !edges.is_empty() {
                    debug_assert_eq!(self.end2(*edges.last().unwrap()), junction);
                }
                edges.extend(inner);
                self.kill_handle(p);
            }
        }
        self.counters.structure_ops += edges.len() as u64;
        let nh = self.new_handle(lam1, lam2, edges);
        self.refresh_bst_parents(nh);
        Ok(nh)
    }
}
