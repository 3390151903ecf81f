//! Dynamic maintenance: insert and delete with local, downward and
//! upward correction of the contraction process, plus stabilization
//! after deletions. Every public mutation leaves the structure equal to
//! a from-scratch static build of the current member set, up to root
//! normalization.

use super::{HandleId, LamRef, LineLeafTree, NodeMeta, NodeType, ParentLoc, SearchOutcome};
use crate::error::Error;
use crate::universe::{ElementId, ROOT};
use crate::Result;

/// Sets identified during local correction of an insertion: the re-hung
/// successors `D`, the stolen linear-structure entries `C`, and the
/// stolen boundary nodes `L`.
#[derive(Debug, Clone)]
pub struct StolenSets {
    pub insertion_point: ElementId,
    pub rehung: Vec<ElementId>,
    pub stolen_entries: Vec<ElementId>,
    pub stolen_bounds: Vec<ElementId>,
}

/// Fragility/instability classification of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FragilityReport {
    pub node: ElementId,
    pub fragile: bool,
    pub unstable: bool,
    /// Which fragility clause fired: 1 = root, 2 = leaf, 3 = line.
    pub clause: Option<u8>,
}

/// Internal result of local correction.
struct LocalCorrection {
    b: ElementId,
    /// Handle of the new actual edge (b, a).
    h_ab: HandleId,
    /// Stolen boundary flags. For a line-typed insertion point:
    /// (toward first endpoint, toward second endpoint) of its structure;
    /// for a leaf-typed one only the first flag is meaningful.
    l_first: bool,
    l_second: bool,
    /// Junction index of `b` in its structure, when line-typed.
    junction: Option<usize>,
    report: StolenSets,
}

impl LineLeafTree {
    // ----- instability ------------------------------------------------------

    pub fn is_unstable(&self, v: ElementId) -> bool {
        !self.profile_ok(v)
    }

    /// Fragility per the deletion analysis: a node that meets the round
    /// profile with no slack.
    pub fn fragility(&self, v: ElementId) -> FragilityReport {
        let k = self.meta[v].round as i64;
        let mu = |i: usize| self.mu(v, i) as i64;
        let (fragile, clause) = match self.meta[v].parent {
            ParentLoc::Root => {
                let f = (mu(1) == k - 1 && mu(2) == k - 2 && mu(3) == k - 2)
                    || (mu(1) == k - 1 && mu(2) == k - 1 && mu(3) == k - 1 && mu(4) < k - 1);
                (f, 1u8)
            }
            _ => match self.meta[v].ty {
                NodeType::Leaf => (mu(1) == k - 1 && mu(2) == k - 1 && mu(3) < k - 1, 2u8),
                NodeType::Line => (mu(1) == k - 1 && mu(2) < k - 1, 3u8),
            },
        };
        FragilityReport {
            node: v,
            fragile,
            unstable: self.is_unstable(v),
            clause: fragile.then_some(clause),
        }
    }

    // ----- insert ------------------------------------------------------------

    /// Insert `a` into the set and repair the structure so it matches a
    /// static rebuild.
    pub fn insert(&mut self, a: ElementId) -> Result<()> {
        self.universe().check_element(a)?;
        if self.contains(a) {
            return Err(Error::Duplicate(a));
        }
        let lc = self.local_correct(a)?;
        let b = lc.b;
        let k = self.meta[b].round as i64;
        let tyb = self.meta[b].ty;
        let parb = self.meta[b].parent;
        let mu_a = |t: &Self, i: usize| t.mu(a, i) as i64;
        let mu_b = |t: &Self, i: usize| t.mu(b, i) as i64;

        match parb {
            ParentLoc::Root => {
                // Case 1: insertion at the root.
                self.coverage.insert[0] += 1;
                let g = (mu_b(self, 1) == k - 1 && mu_b(self, 2) == k - 1)
                    || (mu_b(self, 1) == k - 1 && mu_a(self, 2) < k - 2)
                    || (mu_b(self, 1) == k - 2 && mu_b(self, 2) == k - 2 && mu_a(self, 2) < k - 1);
                if g {
                    if mu_a(self, 1) == mu_a(self, 2)
                        && mu_a(self, 1) == mu_b(self, 1)
                        && mu_b(self, 1) == mu_b(self, 2)
                    {
                        self.meta[b].round += 1;
                    }
                    self.transition(a, b, lc.h_ab)?;
                } else {
                    // a becomes the new root; its round must anticipate
                    // the entry the transition will hand it (the old
                    // root, or the old root's displaced partner).
                    let incoming = if mu_b(self, 1) == mu_b(self, 2) {
                        mu_b(self, 2) + 1
                    } else {
                        mu_b(self, 1)
                    };
                    self.meta[a] = NodeMeta {
                        round: (mu_a(self, 1).max(incoming) + 1) as u32,
                        ty: NodeType::Leaf,
                        parent: ParentLoc::Root,
                    };
                    self.root = a;
                    self.transition(b, a, lc.h_ab)?;
                }
            }
            ParentLoc::Lst(e) if tyb == NodeType::Leaf => {
                if !lc.l_first {
                    // Case 2: boundary not stolen.
                    self.coverage.insert[1] += 1;
                    if mu_a(self, 1) == k - 1 && mu_a(self, 2) == k - 1 {
                        self.meta[a].round = k as u32;
                        self.meta[a].ty = NodeType::Leaf;
                        let h_be = self.lst_remove_far(e, b)?;
                        self.meta[b].round = (mu_b(self, 1) + 1) as u32;
                        let h_ae = self.down_correct(lc.h_ab, h_be)?;
                        self.lst_insert_sorted(e, h_ae);
                    } else {
                        self.transition(a, b, lc.h_ab)?;
                    }
                } else {
                    // Case 3: the boundary toward the owner is stolen;
                    // the entry already reads (e, a) through the renamed
                    // records.
                    self.coverage.insert[2] += 1;
                    self.meta[a].round = (mu_a(self, 1) + 1) as u32;
                    if mu_b(self, 2) < k - 1 {
                        self.meta[a].ty = NodeType::Leaf;
                        let h_ea = self.lst_remove_far(e, a)?;
                        self.lst_insert_sorted(e, h_ea);
                        self.transition(b, a, lc.h_ab)?;
                    } else {
                        let h_ea = self.lst_remove_far(e, a)?;
                        let h_be = self.down_correct(lc.h_ab, h_ea)?;
                        self.lst_insert_sorted(e, h_be);
                    }
                }
            }
            ParentLoc::Bst(h_ef) if tyb == NodeType::Line => {
                match (lc.l_first, lc.l_second) {
                    (true, true) | (false, false) => {
                        // Case 5: both boundaries or neither.
                        self.coverage.insert[4] += 1;
                        if lc.l_first {
                            self.meta[a] = NodeMeta {
                                round: k as u32,
                                ty: NodeType::Line,
                                parent: ParentLoc::Bst(h_ef),
                            };
                            self.transition(b, a, lc.h_ab)?;
                        } else {
                            self.transition(a, b, lc.h_ab)?;
                        }
                    }
                    (stole_left, _) => {
                        // Case 4: exactly one boundary stolen.
                        self.coverage.insert[3] += 1;
                        self.meta[a].round = (mu_a(self, 1) + 1) as u32;
                        self.meta[b].round = (mu_b(self, 1) + 1) as u32;
                        self.meta[a].ty = NodeType::Line;
                        let j = lc.junction.expect("line-typed insertion point has a junction");
                        let cmp = mu_b(self, 1).cmp(&mu_a(self, 1));
                        if stole_left {
                            // stolen edge spans (m .. a)
                            let stolen = self.bst_remove_at(h_ef, j - 1);
                            match cmp {
                                std::cmp::Ordering::Greater => {
                                    let res = self.down_correct(stolen, lc.h_ab)?;
                                    self.bst_insert_at(h_ef, j - 1, res);
                                }
                                std::cmp::Ordering::Equal => {
                                    self.bst_insert_at(h_ef, j - 1, stolen);
                                    self.orient(lc.h_ab, a);
                                    self.bst_insert_at(h_ef, j, lc.h_ab);
                                }
                                std::cmp::Ordering::Less => {
                                    self.bst_insert_at(h_ef, j - 1, stolen);
                                    let kept = self.bst_remove_at(h_ef, j);
                                    let res = self.down_correct(lc.h_ab, kept)?;
                                    self.bst_insert_at(h_ef, j, res);
                                }
                            }
                        } else {
                            // stolen edge spans (a .. m)
                            let stolen = self.bst_remove_at(h_ef, j);
                            match cmp {
                                std::cmp::Ordering::Greater => {
                                    let res = self.down_correct(lc.h_ab, stolen)?;
                                    self.bst_insert_at(h_ef, j, res);
                                }
                                std::cmp::Ordering::Equal => {
                                    self.orient(lc.h_ab, b);
                                    self.bst_insert_at(h_ef, j, lc.h_ab);
                                    self.bst_insert_at(h_ef, j + 1, stolen);
                                }
                                std::cmp::Ordering::Less => {
                                    self.bst_insert_at(h_ef, j, stolen);
                                    let kept = self.bst_remove_at(h_ef, j - 1);
                                    let res = self.down_correct(kept, lc.h_ab)?;
                                    self.bst_insert_at(h_ef, j - 1, res);
                                }
                            }
                        }
                        self.refresh_bst_parents(h_ef);
                    }
                }
            }
            _ => {
                return Err(Error::Corrupt(format!(
                    "insertion point {b} has inconsistent type and parent"
                )))
            }
        }
        Ok(())
    }

    /// Find the insertion point, compute the stolen sets, re-hang the
    /// affected Hasse edges (renaming their shared records) and move the
    /// stolen entries to the new element.
    fn local_correct(&mut self, a: ElementId) -> Result<LocalCorrection> {
        let b = match self.search_counted(a)? {
            SearchOutcome::Found(x) => x,
            SearchOutcome::Nil { shallow, .. } => shallow,
        };

        // Boundary flags, read before the renames while the records
        // still carry the old names.
        let (l_first, l_second, junction) = match self.meta[b].parent {
            ParentLoc::Root => (false, false, None),
            ParentLoc::Lst(e) => {
                let h = self.lsts[e]
                    .iter()
                    .copied()
                    .find(|&h| self.end2(h) == b)
                    .ok_or_else(|| Error::Corrupt(format!("{b} missing from its structure")))?;
                let t = self.bookend2(h);
                (self.leq_counted(a, t), false, None)
            }
            ParentLoc::Bst(h_ef) => {
                let j = self.bst_junction_index(h_ef, b)?;
                let left = self.handles[h_ef.0].bst[j - 1];
                let right = self.handles[h_ef.0].bst[j];
                let t_left = self.bookend2(left);
                let t_right = self.bookend1(right);
                (
                    self.leq_counted(a, t_left),
                    self.leq_counted(a, t_right),
                    Some(j),
                )
            }
        };

        // Stolen entries: those whose first step from b heads into a
        // subtree now below a.
        let mut stolen: Vec<(usize, HandleId)> = Vec::new();
        for (i, &h) in self.lsts[b].iter().enumerate() {
            let z = self.bookend1(h);
            self.counters.comparisons += 1;
            if self.universe().leq(a, z) {
                stolen.push((i, h));
            }
        }
        for &(i, _) in stolen.iter().rev() {
            self.lsts[b].remove(i);
        }
        let stolen_entries: Vec<ElementId> = stolen.iter().map(|&(_, h)| self.end2(h)).collect();

        let out = self.hasse.attach(a)?;
        self.counters.comparisons += self.hasse.succs(b).len() as u64 + out.rehung.len() as u64;
        self.sync_lam_refs_len();
        debug_assert_eq!(out.pred, b);
        let h_ab = self.edge_handle(out.edge, b);

        // The moved entries keep their relative order; their handles now
        // read (a, X) through the renamed records.
        for &(_, h) in &stolen {
            debug_assert_eq!(self.end1(h), a);
            let far = self.end2(h);
            self.meta[far].parent = ParentLoc::Lst(a);
            self.counters.structure_ops += 1;
        }
        self.lsts[a] = stolen.iter().map(|&(_, h)| h).collect();

        let mut stolen_bounds = Vec::new();
        if l_first || l_second {
            match self.meta[b].parent {
                ParentLoc::Lst(e) => stolen_bounds.push(e),
                ParentLoc::Bst(h_ef) => {
                    let (x, y) = self.ends(h_ef);
                    if l_first {
                        stolen_bounds.push(x);
                    }
                    if l_second {
                        stolen_bounds.push(y);
                    }
                }
                ParentLoc::Root => {}
            }
        }
        Ok(LocalCorrection {
            b,
            h_ab,
            l_first,
            l_second,
            junction,
            report: StolenSets {
                insertion_point: b,
                rehung: out.rehung,
                stolen_entries,
                stolen_bounds,
            },
        })
    }

    /// Public probe used by the differential tests: run local correction
    /// alone and report the stolen sets. Leaves the Hasse diagram updated
    /// but the search structure uncorrected, so callers must discard the
    /// tree afterwards.
    pub fn local_correct_probe(&mut self, a: ElementId) -> Result<StolenSets> {
        Ok(self.local_correct(a)?.report)
    }

    // ----- transition ---------------------------------------------------------

    /// After local correction, decide whether `p` was line contracted
    /// between its most recent entry and `q`, and finish the repair
    /// downward or upward. `h_pq` is the handle of the actual edge
    /// between `p` and `q`.
    fn transition(&mut self, p: ElementId, q: ElementId, h_pq: HandleId) -> Result<()> {
        self.coverage.transition += 1;
        let round = self.mu(p, 2) + 1;
        self.meta[p].round = round;
        if self.mu(p, 1) == self.mu(p, 2) {
            self.up_correct(p, q, h_pq)
        } else {
            let m = self.rho(p, 1).expect("mu1 > mu2 implies an entry");
            let h_pm = self.lst_remove_far(p, m)?;
            let res = self.down_correct(h_pq, h_pm)?;
            self.lst_insert_sorted(q, res);
            Ok(())
        }
    }

    // ----- down correction ------------------------------------------------------

    /// Combine two adjacent segment structures sharing a junction node
    /// `b` whose round was just corrected, floating `b` down to the
    /// structure created in its round. Returns the combined handle.
    pub(crate) fn down_correct(&mut self, left: HandleId, right: HandleId) -> Result<HandleId> {
        // Orient the operands around their shared endpoint.
        let (l1, l2) = self.ends(left);
        let (r1, r2) = self.ends(right);
        let b = if l1 == r1 || l1 == r2 { l1 } else { l2 };
        if (b != r1 && b != r2) || (b != l1 && b != l2) {
            return Err(Error::NonAdjacentMerge);
        }
        self.orient(left, if l1 == b { l2 } else { l1 });
        self.orient(right, b);
        debug_assert_eq!(self.end2(left), b);

        let k = self.meta[b].round;
        if k == 0 {
            return Err(Error::Corrupt(format!(
                "downward correction on {b} with unset round"
            )));
        }
        let m = self.bst_round(left);
        let n = self.bst_round(right);
        self.meta[b].ty = NodeType::Line;

        let res = if m > k && n > k {
            // Case 5: b belongs strictly inside both operands.
            self.coverage.down_correct[4] += 1;
            let last = self.handles[left.0].bst.len() - 1;
            let el = self.bst_remove_at(left, last);
            let er = self.bst_remove_at(right, 0);
            let mid = self.down_correct(el, er)?;
            if m > n {
                self.bst_insert_at(right, 0, mid);
                let len = self.handles[left.0].bst.len();
                self.bst_insert_at(left, len, right);
                self.refresh_bst_parents(right);
                self.refresh_bst_parents(left);
                left
            } else if n > m {
                let len = self.handles[left.0].bst.len();
                self.bst_insert_at(left, len, mid);
                self.bst_insert_at(right, 0, left);
                self.refresh_bst_parents(left);
                self.refresh_bst_parents(right);
                right
            } else {
                let lam1 = self.handles[left.0].lam1;
                let lam2 = self.handles[right.0].lam2;
                let mut edges = std::mem::take(&mut self.handles[left.0].bst);
                edges.push(mid);
                edges.extend(std::mem::take(&mut self.handles[right.0].bst));
                self.counters.structure_ops += edges.len() as u64;
                self.kill_handle(left);
                self.kill_handle(right);
                let res = self.new_handle(lam1, lam2, edges);
                self.refresh_bst_parents(res);
                res
            }
        } else if n > k {
            // Case 4: b floats into the right operand's first edge.
            self.coverage.down_correct[3] += 1;
            let er = self.bst_remove_at(right, 0);
            let rec = self.down_correct(left, er)?;
            self.bst_insert_at(right, 0, rec);
            self.refresh_bst_parents(right);
            right
        } else if m > k {
            // Case 4, mirrored.
            self.coverage.down_correct[3] += 1;
            let last = self.handles[left.0].bst.len() - 1;
            let el = self.bst_remove_at(left, last);
            let rec = self.down_correct(el, right)?;
            let len = self.handles[left.0].bst.len();
            self.bst_insert_at(left, len, rec);
            self.refresh_bst_parents(left);
            left
        } else if m == k && n == k {
            // Case 3: contracted together; plain merge.
            self.coverage.down_correct[2] += 1;
            let res = self.bst_merge(&[left, right])?;
            res
        } else if m == k || n == k {
            // Case 1: b joins the operand of its own round.
            self.coverage.down_correct[0] += 1;
            let (lam1, lam2) = (self.handles[left.0].lam1, self.handles[right.0].lam2);
            let edges = if n == k {
                let mut edges = vec![left];
                edges.extend(std::mem::take(&mut self.handles[right.0].bst));
                self.kill_handle(right);
                edges
            } else {
                let mut edges = std::mem::take(&mut self.handles[left.0].bst);
                edges.push(right);
                self.kill_handle(left);
                edges
            };
            self.counters.structure_ops += edges.len() as u64;
            let res = self.new_handle(lam1, lam2, edges);
            self.refresh_bst_parents(res);
            res
        } else {
            // Case 2: b alone between the operands.
            self.coverage.down_correct[1] += 1;
            let (lam1, lam2) = (self.handles[left.0].lam1, self.handles[right.0].lam2);
            let res = self.new_handle(lam1, lam2, vec![left, right]);
            self.refresh_bst_parents(res);
            res
        };
        Ok(res)
    }

    // ----- up correction ----------------------------------------------------------

    /// Repair the contraction upward: `a`'s round and entries are final,
    /// `(a, b)` appears as an edge during some iteration, and
    /// `round(a) <= round(b)`. `h_ab` is the connecting segment handle.
    fn up_correct(&mut self, a: ElementId, b: ElementId, h_ab: HandleId) -> Result<()> {
        self.meta[a].ty = NodeType::Leaf;
        let ka = self.meta[a].round;
        let kb = self.meta[b].round;
        if ka > kb {
            return Err(Error::Corrupt(format!(
                "upward correction with round({a})={ka} > round({b})={kb}"
            )));
        }
        if ka < kb {
            let root_shift = matches!(self.meta[b].parent, ParentLoc::Root)
                && self.mu(b, 2) < self.mu(b, 1)
                && self.mu(b, 1) == ka
                && ka + 1 == kb;
            if root_shift {
                // Case 1: the root's pair partner takes over.
                self.coverage.up_correct[0] += 1;
                let m = self.rho(b, 1).expect("pair partner exists");
                let h_bm = self.lst_remove_far(b, m)?;
                self.meta[b].round = kb - 1;
                self.meta[m].round += 1;
                let res = self.down_correct(h_ab, h_bm)?;
                self.lst_insert_sorted(m, res);
                self.meta[m].parent = ParentLoc::Root;
                self.root = m;
            } else {
                // Case 2: plain entry insertion.
                self.coverage.up_correct[1] += 1;
                self.orient(h_ab, b);
                self.lst_insert_sorted(b, h_ab);
            }
            return Ok(());
        }

        // round(a) == round(b)
        match (self.meta[b].ty, self.meta[b].parent) {
            (NodeType::Leaf, ParentLoc::Lst(e)) => {
                // Case 3: a replaces b as the entry of e.
                self.coverage.up_correct[2] += 1;
                let h_be = self.lst_remove_far(e, b)?;
                let res = self.down_correct(h_ab, h_be)?;
                self.lst_insert_sorted(e, res);
                Ok(())
            }
            (NodeType::Line, ParentLoc::Bst(h_ef)) => {
                // Cases 4-6: b survives an extra round; its structure
                // splits at b.
                self.orient(h_ab, b);
                self.lst_insert_sorted(b, h_ab);
                self.meta[b].round = kb + 1;
                let (h_left, h_right) = self.bst_split_at(h_ef, b)?;
                let end_l = self.end1(h_left);
                let end_r = self.end2(h_right);
                // w.l.o.g. labels: e is the lower-round bound, with line
                // type breaking ties.
                let swap = {
                    let (rl, rr) = (self.meta[end_l].round, self.meta[end_r].round);
                    rl > rr
                        || (rl == rr
                            && self.meta[end_l].ty == NodeType::Leaf
                            && self.meta[end_r].ty == NodeType::Line)
                };
                let (e, f, h_be, h_bf) = if swap {
                    (end_r, end_l, h_right, h_left)
                } else {
                    (end_l, end_r, h_left, h_right)
                };
                let (re, rf) = (self.meta[e].round, self.meta[f].round);
                let k1 = kb + 1;

                if (k1 < re && k1 < rf)
                    || (k1 == re && re < rf && self.meta[e].ty == NodeType::Leaf)
                {
                    // Case 4: b alone remains between the bounds. The
                    // halves refill the structure in its own orientation.
                    self.coverage.up_correct[3] += 1;
                    self.handles[h_ef.0].bst = vec![h_left, h_right];
                    self.counters.structure_ops += 2;
                    self.refresh_bst_parents(h_ef);
                    Ok(())
                } else if k1 == re && self.meta[e].ty == NodeType::Line {
                    // Case 5: b joins e's own chain structure, replacing
                    // the edge between the bounds by the two halves.
                    self.coverage.up_correct[4] += 1;
                    let ParentLoc::Bst(h_gh) = self.meta[e].parent else {
                        return Err(Error::Corrupt(format!(
                            "line node {e} lacks a containing structure"
                        )));
                    };
                    let idx = self.bst_index_of(h_gh, h_ef)?;
                    self.bst_remove_at(h_gh, idx);
                    self.bst_insert_at(h_gh, idx, h_left);
                    self.bst_insert_at(h_gh, idx + 1, h_right);
                    self.kill_handle(h_ef);
                    self.refresh_bst_parents(h_gh);
                    Ok(())
                } else if re < k1 && k1 <= rf {
                    // Case 6: e was a leaf entry of f; b absorbs it and
                    // climbs.
                    self.coverage.up_correct[5] += 1;
                    if re != kb || self.meta[e].ty != NodeType::Leaf {
                        return Err(Error::Corrupt(format!(
                            "unexpected bound state in upward correction at {e}"
                        )));
                    }
                    self.meta[b].ty = NodeType::Leaf;
                    let entry = self.lst_remove_far(f, e)?;
                    if entry != h_ef {
                        return Err(Error::Corrupt(
                            "bound entry does not match the split structure".into(),
                        ));
                    }
                    self.kill_handle(h_ef);
                    self.lst_insert_sorted(b, h_be);
                    if matches!(self.meta[f].parent, ParentLoc::Root) && self.meta[f].round == k1 {
                        if self.mu(f, 1) == kb {
                            // f keeps another top-round entry, so both b
                            // and f survive the next round and contract
                            // as a pair; b is picked as the root.
                            self.meta[b].round = k1 + 1;
                        } else {
                            // f loses its footing and joins b's entries
                            // one round earlier.
                            self.meta[f].round = k1 - 1;
                        }
                        self.lst_insert_sorted(b, h_bf);
                        self.meta[b].parent = ParentLoc::Root;
                        self.root = b;
                        Ok(())
                    } else {
                        self.up_correct(b, f, h_bf)
                    }
                } else {
                    Err(Error::Corrupt(format!(
                        "no upward-correction case applies at {b} (bounds {e}:{re} {f}:{rf})"
                    )))
                }
            }
            _ => Err(Error::Corrupt(format!(
                "upward correction at {b} with equal rounds but no structural case"
            ))),
        }
    }

    // ----- delete ------------------------------------------------------------------

    /// Remove `a` from the set and repair the structure.
    pub fn delete(&mut self, a: ElementId) -> Result<()> {
        self.universe().check_element(a)?;
        if !self.contains(a) {
            return Err(Error::NotFound(a));
        }
        if a == ROOT {
            return Err(Error::RootDeletion);
        }
        let b = self.hasse.pred(a).expect("non-root member has a predecessor");
        let ka = self.meta[a].round;
        let kb = self.meta[b].round;
        let tya = self.meta[a].ty;
        let tyb = self.meta[b].ty;
        let pa = self.meta[a].parent;
        let rec_ba = self.hasse.up_edge(a).expect("non-root member has an up edge");

        // 1. Drop the direct pair entries (their structures are empty:
        //    the pair is an actual edge).
        if pa == ParentLoc::Lst(b) {
            let h = self.lst_remove_far(b, a)?;
            debug_assert!(self.handles[h.0].bst.is_empty());
            self.kill_handle(h);
        }
        if self.meta[b].parent == ParentLoc::Lst(a) {
            let h = self.lst_remove_far(a, b)?;
            debug_assert!(self.handles[h.0].bst.is_empty());
            self.kill_handle(h);
        }

        // 2. If the (b, a) edge handle sits inside a path structure,
        //    remove it there; b takes over the junction or bound.
        let edge_h = self.lam_refs[rec_ba.0]
            .iter()
            .copied()
            .find(|&h| {
                self.handles[h.0].alive
                    && self.handles[h.0].lam1.rec == rec_ba
                    && self.handles[h.0].lam2.rec == rec_ba
            });
        let mut pending_unwrap = None;
        if let Some(eh) = edge_h {
            let container = [self.meta[a].parent, self.meta[b].parent]
                .into_iter()
                .find_map(|p| match p {
                    ParentLoc::Bst(c) => self.bst_index_of(c, eh).ok().map(|i| (c, i)),
                    _ => None,
                });
            let Some((container, idx)) = container else {
                return Err(Error::Corrupt(format!(
                    "edge ({b},{a}) is held by no structure"
                )));
            };
            self.bst_remove_at(container, idx);
            self.kill_handle(eh);
            if self.handles[container.0].bst.len() == 1 {
                // A single-edge wrapper is not a real structure; it is
                // unwrapped once the edge renames have settled.
                pending_unwrap = Some(container);
            }
        }

        // 3. Detach from the Hasse diagram: successor records now read b.
        let out = self.hasse.detach(a)?;
        self.counters.comparisons += out.rehung.len() as u64;

        // 4. Repoint surviving references to the retired record at b's
        //    actual first edges.
        let holders: Vec<HandleId> = self.lam_refs[rec_ba.0].clone();
        for h in holders {
            if !self.handles[h.0].alive {
                continue;
            }
            for side in 0..2 {
                let lam = if side == 0 {
                    self.handles[h.0].lam1
                } else {
                    self.handles[h.0].lam2
                };
                if lam.rec != rec_ba {
                    continue;
                }
                let other = if side == 0 { self.end2(h) } else { self.end1(h) };
                let new_lam = self.first_edge_from(b, other)?;
                if side == 0 {
                    self.set_lam1(h, new_lam);
                } else {
                    self.set_lam2(h, new_lam);
                }
            }
        }
        if !self.lam_refs[rec_ba.0].is_empty() {
            return Err(Error::Corrupt("retired record still referenced".into()));
        }

        // 5. Merge the removed node's entries into b's, then unwrap any
        //    single-edge wrapper left by the removal.
        let incoming = std::mem::take(&mut self.lsts[a]);
        for &h in &incoming {
            debug_assert_eq!(self.end1(h), b);
        }
        self.lst_merge(b, incoming);
        self.meta[a] = NodeMeta::default();
        if let Some(container) = pending_unwrap {
            let inner = self.handles[container.0].bst[0];
            self.replace_handle_everywhere(container, inner);
            self.kill_handle(container);
        }

        // 6. b replaces a when a was contracted later (or on the
        //    leaf/line tie); otherwise b absorbs a in place.
        if kb < ka || (kb == ka && tya == NodeType::Leaf && tyb == NodeType::Line) {
            self.coverage.delete_replace += 1;
            self.meta[b] = NodeMeta {
                round: ka,
                ty: tya,
                parent: pa,
            };
            if pa == ParentLoc::Root {
                self.root = b;
            }
        } else {
            self.coverage.delete_absorb += 1;
        }

        // 7. Stabilize if the merge broke b's profile.
        if self.is_unstable(b) {
            self.stabilize(b)?;
        }
        Ok(())
    }

    /// `seg` spans the entire remaining member tree with no enclosing
    /// context. Derive its top structure by replaying the contraction
    /// from the ends: the end that expires first is absorbed by the
    /// nearest interior node that outlives it, until the interior is
    /// exhausted and the survivors pair up.
    fn cap_segment(&mut self, seg: HandleId) -> Result<()> {
        let mut seg = seg;
        loop {
            let (x0, y0) = self.ends(seg);
            if self.meta[x0].round > self.meta[y0].round {
                self.flip(seg);
            }
            let (x, y) = self.ends(seg);
            let rx = self.meta[x].round;
            let ry = self.meta[y].round;
            if self.bst_round(seg) <= rx {
                // The interior contracts before x does: x enters y's
                // structure with the whole segment attached, and y roots.
                self.meta[x].ty = NodeType::Leaf;
                self.meta[y].round = ry.max(rx + 1);
                self.orient(seg, y);
                self.lst_insert_sorted(y, seg);
                self.meta[y].ty = NodeType::Leaf;
                self.meta[y].parent = ParentLoc::Root;
                self.root = y;
                return Ok(());
            }
            // Peel: find the nearest node past x that outlives it, at
            // whatever nesting depth, and hand x's side to it.
            let mut chain: Vec<HandleId> = Vec::new();
            let mut cur = seg;
            loop {
                let e = self.handles[cur.0].bst[0];
                if self.bst_round(e) > rx {
                    chain.push(cur);
                    cur = e;
                    continue;
                }
                let j = self.end2(e);
                self.bst_remove_at(cur, 0);
                if self.handles[cur.0].bst.len() == 1 {
                    let inner = self.handles[cur.0].bst[0];
                    if let Some(&parent) = chain.last() {
                        self.handles[parent.0].bst[0] = inner;
                    } else {
                        seg = inner;
                    }
                    self.kill_handle(cur);
                }
                for &lvl in chain.iter().rev() {
                    let lam = self.handles[self.handles[lvl.0].bst[0].0].lam1;
                    self.set_lam1(lvl, lam);
                }
                self.meta[x].ty = NodeType::Leaf;
                self.orient(e, j);
                self.lst_insert_sorted(j, e);
                break;
            }
        }
    }

    /// Reference to the actual first edge on the member-tree path from
    /// `v` toward `other`.
    fn first_edge_from(&mut self, v: ElementId, other: ElementId) -> Result<LamRef> {
        self.counters.comparisons += self.hasse.succs(v).len() as u64;
        let rec = match self.hasse.step_toward(v, other) {
            Some(s) => self.hasse.up_edge(s).expect("successor has an up edge"),
            None => self
                .hasse
                .up_edge(v)
                .ok_or_else(|| Error::Corrupt(format!("no edge from {v} toward {other}")))?,
        };
        let slot = self
            .hasse
            .record(rec)
            .slot_of(v)
            .ok_or_else(|| Error::Corrupt("first edge does not touch its node".into()))?;
        Ok(LamRef { rec, slot })
    }

    /// Replace every structural occurrence of `old` (a linear entry or a
    /// path edge) by `new`.
    fn replace_handle_everywhere(&mut self, old: HandleId, new: HandleId) {
        for v in 0..self.lsts.len() {
            for i in 0..self.lsts[v].len() {
                if self.lsts[v][i] == old {
                    self.lsts[v][i] = new;
                    self.orient(new, v);
                    return;
                }
            }
        }
        for h in 0..self.handles.len() {
            if !self.handles[h].alive {
                continue;
            }
            for i in 0..self.handles[h].bst.len() {
                if self.handles[h].bst[i] == old {
                    let left = self.end1(old);
                    self.handles[h].bst[i] = new;
                    self.orient(new, left);
                    return;
                }
            }
        }
    }

    // ----- stabilize --------------------------------------------------------------

    /// Repair the contraction process after `b` became unstable. Calling
    /// it on a stable node is a counted no-op.
    pub fn stabilize(&mut self, b: ElementId) -> Result<()> {
        if self.profile_ok(b) {
            self.counters.stabilize_noops += 1;
            return Ok(());
        }
        let k = self.meta[b].round as i64;
        let mu = |t: &Self, i: usize| t.mu(b, i) as i64;
        match self.meta[b].parent {
            ParentLoc::Root => {
                self.coverage.stabilize[0] += 1;
                let all_equal = mu(self, 1) == mu(self, 2) && mu(self, 2) == mu(self, 3);
                let top = mu(self, 1) == k - 1;
                if !(all_equal || top) {
                    return Err(Error::Corrupt(format!(
                        "unstable root {b} matches no stabilization case"
                    )));
                }
                self.meta[b].round = self.mu(b, 3) + 1;
                if top {
                    // The root's two most recent entries survive it; the
                    // root floats down between them and the remaining
                    // tree is the combined segment, re-capped from its
                    // ends.
                    let m = self.rho(b, 1).expect("entry exists");
                    let n = self.rho(b, 2).expect("second entry exists");
                    let h_bm = self.lst_remove_far(b, m)?;
                    let h_bn = self.lst_remove_far(b, n)?;
                    let res = self.down_correct(h_bn, h_bm)?;
                    self.cap_segment(res)?;
                }
                Ok(())
            }
            ParentLoc::Lst(e) if self.meta[b].ty == NodeType::Leaf => {
                self.coverage.stabilize[1] += 1;
                if mu(self, 1) != k - 1 {
                    return Err(Error::Corrupt(format!(
                        "unstable leaf {b} without a top-round entry"
                    )));
                }
                self.meta[b].round = self.mu(b, 2) + 1;
                let h_eb = self.lst_remove_far(e, b)?;
                let m = self.rho(b, 1).expect("entry exists");
                let h_bm = self.lst_remove_far(b, m)?;
                self.orient(h_eb, e);
                let inner = &self.handles[h_eb.0].bst;
                let n = if inner.is_empty() {
                    e
                } else {
                    self.end1(inner[inner.len() - 1])
                };
                if n != e && self.meta[n].round as i64 == k {
                    // b's former chain neighbor takes over the entry.
                    let last = self.handles[h_eb.0].bst.len() - 1;
                    let h_nb = self.bst_remove_at(h_eb, last);
                    let h_ne = if self.handles[h_eb.0].bst.len() == 1 {
                        let innermost = self.handles[h_eb.0].bst[0];
                        self.kill_handle(h_eb);
                        innermost
                    } else {
                        h_eb
                    };
                    self.meta[n].ty = NodeType::Leaf;
                    self.lst_insert_sorted(e, h_ne);
                    let res = self.down_correct(h_bm, h_nb)?;
                    self.lst_insert_sorted(n, res);
                    Ok(())
                } else {
                    let res = self.down_correct(h_bm, h_eb)?;
                    self.lst_insert_sorted(e, res);
                    if self.is_unstable(e) {
                        self.stabilize(e)?;
                    }
                    Ok(())
                }
            }
            ParentLoc::Bst(h_ef) if self.meta[b].ty == NodeType::Line => {
                self.coverage.stabilize[2] += 1;
                self.meta[b].round = self.mu(b, 1) + 1;
                let (hl, hr) = self.bst_split_at(h_ef, b)?;
                let res = self.down_correct(hl, hr)?;
                let lam1 = self.handles[res.0].lam1;
                let lam2 = self.handles[res.0].lam2;
                let edges = std::mem::take(&mut self.handles[res.0].bst);
                self.kill_handle(res);
                self.set_lam1(h_ef, lam1);
                self.set_lam2(h_ef, lam2);
                self.handles[h_ef.0].bst = edges;
                self.counters.structure_ops += self.handles[h_ef.0].bst.len() as u64;
                self.refresh_bst_parents(h_ef);
                Ok(())
            }
            _ => Err(Error::Corrupt(format!(
                "unstable node {b} with inconsistent type and parent"
            ))),
        }
    }
}
