//! The Line-Leaf Tree: a search structure over the members of a
//! [`HasseDiagram`], assembled by repeatedly contracting degree-2 paths
//! into balanced binary search structures and leaves into linear search
//! structures.
//!
//! Every component edge query is a [`Handle`] holding two references into
//! the shared Hasse edge arena; renaming an endpoint on a shared edge
//! record retargets every handle through it at once. A handle's balanced
//! structure is its ordered edge list searched by midpoint descent, so
//! its height is always within the `2·⌈log₂(p+2)⌉` contract and its
//! in-order sequence is the stored order.

mod audit;
mod build;
mod bst;
mod dynamic;
mod lst;

pub use audit::SearchAudit;
pub use build::ContractionEvent;
pub use dynamic::{FragilityReport, StolenSets};

use std::sync::Arc;

use crate::error::Error;
use crate::hasse::{HasseDiagram, RecordId};
use crate::query::{eval_descending, eval_incomparable, EdgeQueryAnswer};
use crate::universe::{ElementId, UniverseTree};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HandleId(pub usize);

/// One side of an edge query: a record in the Hasse edge arena plus the
/// slot holding this query's endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LamRef {
    pub rec: RecordId,
    pub slot: u8,
}

/// A dynamic edge query `(x, y)`: endpoint names are read through the
/// two edge references, and the balanced structure over the contracted
/// path between `x` and `y` is the ordered edge list `bst` (empty iff
/// the query is an actual Hasse edge).
#[derive(Debug, Clone)]
pub struct Handle {
    pub lam1: LamRef,
    pub lam2: LamRef,
    pub bst: Vec<HandleId>,
    pub alive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeType {
    Line,
    Leaf,
}

/// Where a contracted node sits: the root, a linear structure owned by a
/// node, or a balanced structure owned by an edge query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParentLoc {
    Root,
    Lst(ElementId),
    Bst(HandleId),
}

#[derive(Debug, Clone, Copy)]
pub struct NodeMeta {
    pub round: u32,
    pub ty: NodeType,
    pub parent: ParentLoc,
}

impl Default for NodeMeta {
    fn default() -> Self {
        NodeMeta {
            round: 0,
            ty: NodeType::Leaf,
            parent: ParentLoc::Root,
        }
    }
}

/// Instrumentation. `comparisons` counts ancestry tests made directly by
/// the dynamic operations; `edge_queries` counts dynamic edge-query
/// evaluations; `structure_ops` counts elementary structure edits.
#[derive(Debug, Clone, Copy, Default)]
pub struct Counters {
    pub edge_queries: u64,
    pub comparisons: u64,
    pub structure_ops: u64,
    pub stabilize_noops: u64,
}

/// Hit counters for every case of the dynamic-operation analysis.
#[derive(Debug, Clone, Default)]
pub struct Coverage {
    pub transition: u64,
    pub insert: [u64; 5],
    pub down_correct: [u64; 5],
    pub up_correct: [u64; 6],
    pub stabilize: [u64; 3],
    pub delete_replace: u64,
    pub delete_absorb: u64,
}

impl Coverage {
    /// All named cases with their hit counts, for coverage reports.
    pub fn entries(&self) -> Vec<(String, u64)> {
        let mut out = vec![("transition".to_string(), self.transition)];
        for (i, &v) in self.insert.iter().enumerate() {
            out.push((format!("insert case {}", i + 1), v));
        }
        for (i, &v) in self.down_correct.iter().enumerate() {
            out.push((format!("down-correct case {}", i + 1), v));
        }
        for (i, &v) in self.up_correct.iter().enumerate() {
            out.push((format!("up-correct case {}", i + 1), v));
        }
        for (i, &v) in self.stabilize.iter().enumerate() {
            out.push((format!("stabilize case {}", i + 1), v));
        }
        out.push(("delete replace branch".to_string(), self.delete_replace));
        out.push(("delete absorb branch".to_string(), self.delete_absorb));
        out
    }

    pub fn merge(&mut self, other: &Coverage) {
        self.transition += other.transition;
        for i in 0..5 {
            self.insert[i] += other.insert[i];
            self.down_correct[i] += other.down_correct[i];
        }
        for i in 0..6 {
            self.up_correct[i] += other.up_correct[i];
        }
        for i in 0..3 {
            self.stabilize[i] += other.stabilize[i];
        }
        self.delete_replace += other.delete_replace;
        self.delete_absorb += other.delete_absorb;
    }

    pub fn all_positive(&self) -> bool {
        self.entries().iter().all(|(_, v)| *v > 0)
    }
}

/// Outcome of a search: the terminal node reached, or the empty
/// structure of an actual edge (the element falls strictly between its
/// endpoints).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(ElementId),
    Nil { shallow: ElementId, deep: ElementId },
}

#[derive(Debug, Clone, Default)]
pub struct SearchStats {
    pub queries: u64,
    /// (owner round) per linear structure visited, in visit order.
    pub lst_rounds: Vec<u32>,
    /// (creation round) per balanced structure entered, in visit order.
    pub bst_rounds: Vec<u32>,
}

/// Structure-wide shape numbers: search height `h` in edge queries,
/// width `w` (leaves of the member tree), maximum degree, diameter,
/// contraction rounds and member count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metrics {
    pub h: u64,
    pub w: usize,
    pub max_degree: usize,
    pub diameter: usize,
    pub rounds: u32,
    pub n: usize,
}

impl Metrics {
    /// Safe-constant height bound: `(Δ + 2⌈log₂(D+2)⌉ + 2)·(⌈log₂ max(w,2)⌉ + 1)`.
    pub fn height_bound(&self) -> u64 {
        let log_d = ceil_log2(self.diameter as u64 + 2);
        let log_w = ceil_log2(self.w.max(2) as u64);
        (self.max_degree as u64 + 2 * log_d + 2) * (log_w + 1)
    }

    /// Round bound: `⌈log₂ max(w,2)⌉ + 1`.
    pub fn round_bound(&self) -> u32 {
        (ceil_log2(self.w.max(2) as u64) + 1) as u32
    }
}

pub fn ceil_log2(x: u64) -> u64 {
    debug_assert!(x >= 1);
    (64 - (x - 1).leading_zeros() as u64).min(63) * u64::from(x > 1)
}

#[derive(Debug, Clone)]
pub struct LineLeafTree {
    pub(crate) hasse: HasseDiagram,
    pub(crate) meta: Vec<NodeMeta>,
    pub(crate) lsts: Vec<Vec<HandleId>>,
    pub(crate) handles: Vec<Handle>,
    /// Per record: live handles referencing it through either side.
    pub(crate) lam_refs: Vec<Vec<HandleId>>,
    pub(crate) root: ElementId,
    pub counters: Counters,
    pub coverage: Coverage,
}

impl LineLeafTree {
    pub fn universe(&self) -> &Arc<UniverseTree> {
        self.hasse.universe()
    }

    pub fn hasse(&self) -> &HasseDiagram {
        &self.hasse
    }

    /// Mutable access to the backing diagram, for endpoint renames in
    /// tests and tooling. Structural edits through it are on the caller.
    pub fn hasse_mut(&mut self) -> &mut HasseDiagram {
        &mut self.hasse
    }

    pub fn root(&self) -> ElementId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.hasse.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: ElementId) -> bool {
        self.hasse.contains(v)
    }

    pub fn meta(&self, v: ElementId) -> &NodeMeta {
        &self.meta[v]
    }

    pub(crate) fn meta_mut(&mut self, v: ElementId) -> &mut NodeMeta {
        &mut self.meta[v]
    }

    pub(crate) fn set_root(&mut self, v: ElementId) {
        self.root = v;
    }

    pub fn lst(&self, v: ElementId) -> &[HandleId] {
        &self.lsts[v]
    }

    pub fn handle(&self, h: HandleId) -> &Handle {
        &self.handles[h.0]
    }

    // ----- handle plumbing -------------------------------------------------

    pub(crate) fn end1(&self, h: HandleId) -> ElementId {
        let l = self.handles[h.0].lam1;
        self.hasse.record(l.rec).ends[l.slot as usize]
    }

    pub(crate) fn end2(&self, h: HandleId) -> ElementId {
        let l = self.handles[h.0].lam2;
        self.hasse.record(l.rec).ends[l.slot as usize]
    }

    pub fn ends(&self, h: HandleId) -> (ElementId, ElementId) {
        (self.end1(h), self.end2(h))
    }

    /// Bookend member next to `end1`: the far element of the first actual
    /// edge on the path.
    pub(crate) fn bookend1(&self, h: HandleId) -> ElementId {
        let l = self.handles[h.0].lam1;
        self.hasse.record(l.rec).ends[1 - l.slot as usize]
    }

    pub(crate) fn bookend2(&self, h: HandleId) -> ElementId {
        let l = self.handles[h.0].lam2;
        self.hasse.record(l.rec).ends[1 - l.slot as usize]
    }

    pub(crate) fn new_handle(&mut self, lam1: LamRef, lam2: LamRef, bst: Vec<HandleId>) -> HandleId {
        let id = HandleId(self.handles.len());
        self.handles.push(Handle {
            lam1,
            lam2,
            bst,
            alive: true,
        });
        self.register_lam(id, lam1);
        self.register_lam(id, lam2);
        self.counters.structure_ops += 1;
        id
    }

    /// Handle for an actual Hasse edge, oriented with `left` as its first
    /// endpoint.
    pub(crate) fn edge_handle(&mut self, rec: RecordId, left: ElementId) -> HandleId {
        let slot = self
            .hasse
            .record(rec)
            .slot_of(left)
            .expect("left element is an endpoint of the record");
        self.new_handle(
            LamRef { rec, slot },
            LamRef {
                rec,
                slot: 1 - slot,
            },
            Vec::new(),
        )
    }

    pub(crate) fn kill_handle(&mut self, h: HandleId) {
        let (l1, l2) = {
            let hh = &self.handles[h.0];
            debug_assert!(hh.alive);
            (hh.lam1, hh.lam2)
        };
        self.unregister_lam(h, l1);
        self.unregister_lam(h, l2);
        let hh = &mut self.handles[h.0];
        hh.alive = false;
        hh.bst = Vec::new();
    }

    pub(crate) fn set_lam1(&mut self, h: HandleId, lam: LamRef) {
        let old = self.handles[h.0].lam1;
        if old == lam {
            return;
        }
        self.unregister_lam(h, old);
        self.handles[h.0].lam1 = lam;
        self.register_lam(h, lam);
    }

    pub(crate) fn set_lam2(&mut self, h: HandleId, lam: LamRef) {
        let old = self.handles[h.0].lam2;
        if old == lam {
            return;
        }
        self.unregister_lam(h, old);
        self.handles[h.0].lam2 = lam;
        self.register_lam(h, lam);
    }

    fn register_lam(&mut self, h: HandleId, lam: LamRef) {
        if self.lam_refs.len() <= lam.rec.0 {
            self.lam_refs.resize(lam.rec.0 + 1, Vec::new());
        }
        self.lam_refs[lam.rec.0].push(h);
    }

    fn unregister_lam(&mut self, h: HandleId, lam: LamRef) {
        let refs = &mut self.lam_refs[lam.rec.0];
        if let Some(pos) = refs.iter().position(|&x| x == h) {
            refs.swap_remove(pos);
        }
    }

    pub(crate) fn sync_lam_refs_len(&mut self) {
        let n = self.hasse.record_count();
        if self.lam_refs.len() < n {
            self.lam_refs.resize(n, Vec::new());
        }
    }

    /// Counted ancestry test.
    pub(crate) fn leq_counted(&mut self, a: ElementId, b: ElementId) -> bool {
        self.counters.comparisons += 1;
        self.universe().leq(a, b)
    }

    // ----- query evaluation ------------------------------------------------

    /// Evaluate the dynamic edge query behind `h` against `u`. The answer
    /// is relative to the handle's first endpoint (`X` means that side).
    pub fn eval_handle(&self, h: HandleId, u: ElementId, stats: &mut SearchStats) -> EdgeQueryAnswer {
        stats.queries += 1;
        let uni = self.universe();
        let (x, y) = self.ends(h);
        debug_assert_ne!(x, y);
        if uni.leq(x, y) {
            eval_descending(uni, x, y, self.bookend1(h), u)
        } else if uni.leq(y, x) {
            eval_descending(uni, y, x, self.bookend2(h), u).flip()
        } else {
            eval_incomparable(uni, x, y, u)
        }
    }

    // ----- search ----------------------------------------------------------

    /// Search for `u` from the root, recording per-component audit data.
    pub fn search_with_stats(&self, u: ElementId) -> Result<(SearchOutcome, SearchStats)> {
        self.universe().check_element(u)?;
        let mut stats = SearchStats::default();
        let mut cur = self.root;
        'outer: loop {
            stats.lst_rounds.push(self.meta[cur].round);
            for &h in &self.lsts[cur] {
                match self.eval_handle(h, u, &mut stats) {
                    EdgeQueryAnswer::X => continue,
                    EdgeQueryAnswer::Y => {
                        cur = self.end2(h);
                        continue 'outer;
                    }
                    EdgeQueryAnswer::Here => match self.descend_bst(h, u, &mut stats)? {
                        Step::AtNode(v) => {
                            cur = v;
                            continue 'outer;
                        }
                        Step::Nil(edge) => {
                            let (a, b) = self.ends(edge);
                            let (shallow, deep) = if self.universe().leq(a, b) {
                                (a, b)
                            } else {
                                (b, a)
                            };
                            return Ok((SearchOutcome::Nil { shallow, deep }, stats));
                        }
                    },
                }
            }
            return Ok((SearchOutcome::Found(cur), stats));
        }
    }

    /// Binary descent over the balanced structure of `h`. Returns the
    /// interior node concluded at, or the empty actual-edge structure.
    fn descend_bst(&self, h: HandleId, u: ElementId, stats: &mut SearchStats) -> Result<Step> {
        let mut h = h;
        loop {
            let edges = &self.handles[h.0].bst;
            if edges.is_empty() {
                return Ok(Step::Nil(h));
            }
            stats.bst_rounds.push(self.bst_round(h));
            let (mut lo, mut hi) = (0usize, edges.len());
            loop {
                if lo == hi {
                    if lo == 0 || lo == self.handles[h.0].bst.len() {
                        return Err(Error::Corrupt(format!(
                            "search reached an impossible answer in structure {:?}",
                            self.ends(h)
                        )));
                    }
                    let e = self.handles[h.0].bst[lo];
                    return Ok(Step::AtNode(self.end1(e)));
                }
                let mid = (lo + hi) / 2;
                let e = self.handles[h.0].bst[mid];
                match self.eval_handle(e, u, stats) {
                    EdgeQueryAnswer::X => hi = mid,
                    EdgeQueryAnswer::Y => lo = mid + 1,
                    EdgeQueryAnswer::Here => {
                        h = e;
                        break;
                    }
                }
            }
        }
    }

    pub fn search(&self, u: ElementId) -> Result<SearchOutcome> {
        Ok(self.search_with_stats(u)?.0)
    }

    /// Search that charges the query count to the tree's counters.
    pub fn search_counted(&mut self, u: ElementId) -> Result<SearchOutcome> {
        let (out, stats) = self.search_with_stats(u)?;
        self.counters.edge_queries += stats.queries;
        Ok(out)
    }

    pub fn test_membership(&self, u: ElementId) -> Result<bool> {
        Ok(matches!(self.search(u)?, SearchOutcome::Found(x) if x == u))
    }

    /// Deepest member `⪯ u`; `u` itself when present.
    pub fn predecessor(&self, u: ElementId) -> Result<ElementId> {
        Ok(match self.search(u)? {
            SearchOutcome::Found(x) => x,
            SearchOutcome::Nil { shallow, .. } => shallow,
        })
    }

    // ----- metrics ----------------------------------------------------------

    /// Shape metrics. `h` is the worst search cost in dynamic edge
    /// queries over every universe element (exhaustive; pass a sample
    /// budget for large universes via [`LineLeafTree::metrics_sampled`]).
    pub fn metrics(&self, double_count: bool) -> Metrics {
        self.metrics_sampled(double_count, None, 0)
    }

    pub fn metrics_sampled(
        &self,
        double_count: bool,
        sample: Option<usize>,
        seed: u64,
    ) -> Metrics {
        let m = self.universe().len();
        let mut h = 0u64;
        let mut probe = |u: ElementId, tree: &LineLeafTree| {
            let (_, stats) = tree.search_with_stats(u).expect("valid element");
            h = h.max(stats.queries);
        };
        match sample {
            Some(k) if k < m => {
                let mut rng = crate::rng::Rng::new(seed);
                for _ in 0..k {
                    probe(rng.usize_below(m), self);
                }
                for v in self.hasse.members() {
                    probe(v, self);
                }
            }
            _ => {
                for u in 0..m {
                    probe(u, self);
                }
            }
        }
        if double_count {
            h *= 2;
        }

        let n = self.hasse.len();
        // width = successor-less members: the largest antichain of a
        // tree-like order, one for the singleton set
        let mut w = 0usize;
        let mut max_degree = 0usize;
        for v in self.hasse.members() {
            max_degree = max_degree.max(self.hasse.degree(v));
            if self.hasse.succs(v).is_empty() {
                w += 1;
            }
        }
        Metrics {
            h,
            w,
            max_degree,
            diameter: self.member_tree_diameter(),
            rounds: self.meta[self.root].round.saturating_sub(1),
            n,
        }
    }

    fn member_tree_diameter(&self) -> usize {
        let start = self.root;
        let (far, _) = self.farthest_member(start);
        let (_, d) = self.farthest_member(far);
        d
    }

    fn farthest_member(&self, from: ElementId) -> (ElementId, usize) {
        let mut best = (from, 0usize);
        let mut stack = vec![(from, None::<ElementId>, 0usize)];
        while let Some((v, prev, d)) = stack.pop() {
            if d > best.1 {
                best = (v, d);
            }
            let mut push = |w: ElementId| {
                if Some(w) != prev {
                    stack.push((w, Some(v), d + 1));
                }
            };
            if let Some(p) = self.hasse.pred(v) {
                push(p);
            }
            for &s in self.hasse.succs(v) {
                push(s);
            }
        }
        best
    }
}

enum Step {
    AtNode(ElementId),
    Nil(HandleId),
}
