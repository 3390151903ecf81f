//! Linear search structures: per-node ordered sequences of edge queries,
//! scanned front to back, terminating at the owner itself. Entries are
//! kept in non-increasing order of the far endpoint's round.

use super::{HandleId, LineLeafTree, ParentLoc};
use crate::error::Error;
use crate::universe::ElementId;
use crate::Result;

impl LineLeafTree {
    /// Round of the `i`-th most recent entry (1-indexed); 0 past the end.
    pub fn mu(&self, owner: ElementId, i: usize) -> u32 {
        debug_assert!(i >= 1);
        match self.lsts[owner].get(i - 1) {
            Some(&h) => self.meta[self.end2(h)].round,
            None => 0,
        }
    }

    /// Far endpoint of the `i`-th most recent entry (1-indexed).
    pub fn rho(&self, owner: ElementId, i: usize) -> Option<ElementId> {
        self.lsts[owner].get(i - 1).map(|&h| self.end2(h))
    }

    /// Front insertion. The entry handle must already be oriented with
    /// the owner first. Errors if the far round is below the current
    /// front, which would break the order invariant.
    pub fn lst_insert_front(&mut self, owner: ElementId, h: HandleId) -> Result<()> {
        debug_assert_eq!(self.end1(h), owner);
        let far = self.end2(h);
        if self.meta[far].round < self.mu(owner, 1) {
            return Err(Error::OrderViolation);
        }
        self.lsts[owner].insert(0, h);
        self.meta[far].parent = ParentLoc::Lst(owner);
        self.counters.structure_ops += 1;
        Ok(())
    }

    /// Insert keeping the order invariant, at the front of the run of
    /// equal rounds. Orients the handle owner-first itself.
    pub(crate) fn lst_insert_sorted(&mut self, owner: ElementId, h: HandleId) {
        self.orient(h, owner);
        let far = self.end2(h);
        let r = self.meta[far].round;
        let pos = self.lsts[owner]
            .iter()
            .position(|&e| self.meta[self.end2(e)].round <= r)
            .unwrap_or(self.lsts[owner].len());
        self.lsts[owner].insert(pos, h);
        self.meta[far].parent = ParentLoc::Lst(owner);
        self.counters.structure_ops += 1;
    }

    /// Remove the entry whose far endpoint is `far`, returning its handle.
    pub fn lst_remove_far(&mut self, owner: ElementId, far: ElementId) -> Result<HandleId> {
        let pos = self.lsts[owner]
            .iter()
            .position(|&e| self.end2(e) == far)
            .ok_or(Error::NotFound(far))?;
        self.counters.structure_ops += 1;
        Ok(self.lsts[owner].remove(pos))
    }

    /// Merge `incoming` (already order-sorted, owner-oriented) into the
    /// owner's sequence: stable by descending round, existing entries
    /// first among equal rounds.
    pub(crate) fn lst_merge(&mut self, owner: ElementId, incoming: Vec<HandleId>) {
        let mut merged = Vec::with_capacity(self.lsts[owner].len() + incoming.len());
        let old = std::mem::take(&mut self.lsts[owner]);
        let mut a = old.into_iter().peekable();
        let mut b = incoming.into_iter().peekable();
        let round_of = |t: &LineLeafTree, h: HandleId| t.meta[t.end2(h)].round;
        loop {
            match (a.peek().copied(), b.peek().copied()) {
                (Some(x), Some(y)) => {
                    if round_of(self, x) >= round_of(self, y) {
                        merged.push(x);
                        a.next();
                    } else {
                        merged.push(y);
                        b.next();
                    }
                }
                (Some(_), None) => {
                    merged.extend(a.by_ref());
                }
                (None, Some(_)) => {
                    merged.extend(b.by_ref());
                }
                (None, None) => break,
            }
        }
        for &h in &merged {
            let far = self.end2(h);
            self.meta[far].parent = ParentLoc::Lst(owner);
        }
        self.counters.structure_ops += merged.len() as u64;
        self.lsts[owner] = merged;
    }
}
