//! Dynamic Hasse diagram for a member set `S` over a fixed universe.
//!
//! Every non-root member keeps exactly one predecessor (its deepest
//! member ancestor) and an id-sorted successor list. The undirected edges
//! are materialised as shared records in an arena; queries reference
//! records by id, so renaming an endpoint on a record retargets every
//! query through it in constant time.

use std::sync::Arc;

use crate::error::Error;
use crate::universe::{ElementId, UniverseTree, ROOT};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RecordId(pub usize);

/// One undirected Hasse edge held in memory. The two endpoint slots are
/// stable: renames overwrite a slot in place.
#[derive(Debug, Clone, Copy)]
pub struct EdgeRecord {
    pub ends: [ElementId; 2],
    pub live: bool,
}

impl EdgeRecord {
    pub fn other(&self, a: ElementId) -> ElementId {
        if self.ends[0] == a {
            self.ends[1]
        } else {
            self.ends[0]
        }
    }

    pub fn slot_of(&self, a: ElementId) -> Option<u8> {
        if self.ends[0] == a {
            Some(0)
        } else if self.ends[1] == a {
            Some(1)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone)]
pub struct HasseDiagram {
    universe: Arc<UniverseTree>,
    in_set: Vec<bool>,
    pred: Vec<Option<ElementId>>,
    succs: Vec<Vec<ElementId>>,
    /// Record of the edge between a member and its predecessor.
    up_edge: Vec<Option<RecordId>>,
    records: Vec<EdgeRecord>,
    n: usize,
}

impl HasseDiagram {
    /// The set `{ν}`.
    pub fn new(universe: Arc<UniverseTree>) -> HasseDiagram {
        let m = universe.len();
        let mut in_set = vec![false; m];
        in_set[ROOT] = true;
        HasseDiagram {
            universe,
            in_set,
            pred: vec![None; m],
            succs: vec![Vec::new(); m],
            up_edge: vec![None; m],
            records: Vec::new(),
            n: 1,
        }
    }

    /// Build the set `{ν} ∪ members` in one pass.
    pub fn from_members(universe: Arc<UniverseTree>, members: &[ElementId]) -> Result<HasseDiagram> {
        let mut h = HasseDiagram::new(universe);
        let mut sorted: Vec<ElementId> = members.to_vec();
        sorted.sort_unstable_by_key(|&v| h.universe.depth_of(v));
        for v in sorted {
            if v != ROOT {
                h.attach(v)?;
            }
        }
        Ok(h)
    }

    pub fn universe(&self) -> &Arc<UniverseTree> {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: ElementId) -> bool {
        v < self.in_set.len() && self.in_set[v]
    }

    pub fn pred(&self, v: ElementId) -> Option<ElementId> {
        self.pred[v]
    }

    pub fn succs(&self, v: ElementId) -> &[ElementId] {
        &self.succs[v]
    }

    pub fn up_edge(&self, v: ElementId) -> Option<RecordId> {
        self.up_edge[v]
    }

    pub fn record(&self, id: RecordId) -> &EdgeRecord {
        &self.records[id.0]
    }

    pub fn members(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.in_set
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(v, _)| v)
    }

    /// Degree of `v` in the undirected member tree `T_S`.
    pub fn degree(&self, v: ElementId) -> usize {
        self.succs[v].len() + usize::from(self.pred[v].is_some())
    }

    /// Deepest member `m` with `m ⪯ u`; `u` itself when `u` is a member.
    pub fn predecessor_in_set(&self, u: ElementId) -> Result<ElementId> {
        self.universe.check_element(u)?;
        let mut cur = u;
        loop {
            if self.in_set[cur] {
                return Ok(cur);
            }
            cur = self
                .universe
                .parent_of(cur)
                .expect("ν is always a member, so the walk terminates");
        }
    }

    /// The member adjacent to `x` on the member-tree path towards a
    /// strict member descendant `y`: the unique successor `s` of `x`
    /// with `s ⪯ y`.
    pub fn step_toward(&self, x: ElementId, y: ElementId) -> Option<ElementId> {
        self.succs[x]
            .iter()
            .copied()
            .find(|&s| self.universe.leq(s, y))
    }

    /// Add `u` to the set. Returns the record of the new edge `(pred, u)`
    /// together with the set `D` of former successors of `pred` re-hung
    /// under `u` (their records are renamed in place).
    pub fn attach(&mut self, u: ElementId) -> Result<AttachOutcome> {
        self.universe.check_element(u)?;
        if self.in_set[u] {
            return Err(Error::Duplicate(u));
        }
        let b = self.predecessor_in_set(self.universe.parent_of(u).unwrap_or(ROOT))?;
        let uni = self.universe.clone();
        let mut stolen = Vec::new();
        self.succs[b].retain(|&d| {
            if uni.leq(u, d) {
                stolen.push(d);
                false
            } else {
                true
            }
        });
        for &d in &stolen {
            let rec = self.up_edge[d].expect("non-root member has an up edge");
            self.rename_record(rec, b, u).expect("edge carries the old predecessor");
            self.pred[d] = Some(u);
        }
        let rec = self.alloc_record(b, u);
        self.in_set[u] = true;
        self.pred[u] = Some(b);
        self.up_edge[u] = Some(rec);
        self.succs[u] = stolen.clone();
        self.succs[u].sort_unstable();
        let pos = self.succs[b].binary_search(&u).unwrap_err();
        self.succs[b].insert(pos, u);
        self.n += 1;
        Ok(AttachOutcome {
            pred: b,
            edge: rec,
            rehung: stolen,
        })
    }

    /// Remove `u` from the set, re-hanging its successors under its
    /// predecessor (their records renamed in place). The record of the
    /// removed edge `(pred, u)` is retired, not renamed: callers that keep
    /// references into the arena must repoint them first.
    pub fn detach(&mut self, u: ElementId) -> Result<DetachOutcome> {
        self.universe.check_element(u)?;
        if !self.in_set[u] {
            return Err(Error::NotFound(u));
        }
        if u == ROOT {
            return Err(Error::RootDeletion);
        }
        let b = self.pred[u].unwrap();
        let rec = self.up_edge[u].unwrap();
        self.records[rec.0].live = false;
        let rehung = std::mem::take(&mut self.succs[u]);
        for &s in &rehung {
            let e = self.up_edge[s].unwrap();
            self.rename_record(e, u, b).expect("edge carries the removed member");
            self.pred[s] = Some(b);
        }
        self.succs[b].retain(|&s| s != u);
        for &s in &rehung {
            let pos = self.succs[b].binary_search(&s).unwrap_err();
            self.succs[b].insert(pos, s);
        }
        self.in_set[u] = false;
        self.pred[u] = None;
        self.up_edge[u] = None;
        self.n -= 1;
        Ok(DetachOutcome {
            pred: b,
            retired: rec,
            rehung,
        })
    }

    /// Rename endpoint `old` of a record to `new`. Every query holding
    /// the record observes the new name; the query objects themselves are
    /// untouched.
    pub fn rename_record(&mut self, id: RecordId, old: ElementId, new: ElementId) -> Result<()> {
        let rec = &mut self.records[id.0];
        match rec.slot_of(old) {
            Some(s) => {
                rec.ends[s as usize] = new;
                Ok(())
            }
            None => Err(Error::EndpointMismatch(old)),
        }
    }

    fn alloc_record(&mut self, a: ElementId, b: ElementId) -> RecordId {
        let id = RecordId(self.records.len());
        self.records.push(EdgeRecord {
            ends: [a, b],
            live: true,
        });
        id
    }

    pub fn record_count(&self) -> usize {
        self.records.len()
    }

    /// Consistency audit: predecessor/successor lists mutually consistent,
    /// predecessors are deepest member ancestors, records match edges.
    pub fn check(&self) -> Result<()> {
        let mut count = 0;
        for v in 0..self.in_set.len() {
            if !self.in_set[v] {
                continue;
            }
            count += 1;
            match self.pred[v] {
                None => {
                    if v != ROOT {
                        return Err(Error::Corrupt(format!("member {v} has no predecessor")));
                    }
                }
                Some(p) => {
                    if !self.in_set[p] || !self.universe.leq(p, v) || p == v {
                        return Err(Error::Corrupt(format!("bad predecessor {p} for {v}")));
                    }
                    // deepest member ancestor: no member strictly between
                    let mut cur = self.universe.parent_of(v).unwrap();
                    while cur != p {
                        if self.in_set[cur] {
                            return Err(Error::Corrupt(format!(
                                "member {cur} lies between {v} and its predecessor {p}"
                            )));
                        }
                        cur = self.universe.parent_of(cur).unwrap();
                    }
                    if !self.succs[p].contains(&v) {
                        return Err(Error::Corrupt(format!("{v} missing from succs({p})")));
                    }
                    let rec = self.up_edge[v].ok_or_else(|| {
                        Error::Corrupt(format!("member {v} lacks an up-edge record"))
                    })?;
                    let r = self.record(rec);
                    if !r.live || r.slot_of(v).is_none() || r.slot_of(p).is_none() {
                        return Err(Error::Corrupt(format!(
                            "record {rec:?} does not match edge ({p},{v})"
                        )));
                    }
                }
            }
            let mut prev = None;
            for &s in &self.succs[v] {
                if prev.is_some_and(|p| p >= s) {
                    return Err(Error::Corrupt(format!("succs({v}) not sorted")));
                }
                prev = Some(s);
                if self.pred[s] != Some(v) {
                    return Err(Error::Corrupt(format!("succ {s} of {v} disagrees on pred")));
                }
            }
        }
        if count != self.n {
            return Err(Error::Corrupt("member count out of sync".into()));
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct AttachOutcome {
    pub pred: ElementId,
    pub edge: RecordId,
    /// The set `D`: former successors of `pred` now hanging under the new
    /// element.
    pub rehung: Vec<ElementId>,
}

#[derive(Debug)]
pub struct DetachOutcome {
    pub pred: ElementId,
    pub retired: RecordId,
    pub rehung: Vec<ElementId>,
}
