//! Dynamic edge queries.
//!
//! A query on a member pair `(x, y)` asks where an element `u` falls
//! relative to the path between `x` and `y` in the member tree of
//! `S ∪ {u}`: on `x`'s side, on `y`'s side, or strictly between. The
//! brute-force form builds that tree explicitly and is the reference
//! oracle; the fast form answers with a handful of ancestry tests and
//! must agree with it everywhere.

use crate::error::Error;
use crate::hasse::HasseDiagram;
use crate::universe::{ElementId, UniverseTree};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeQueryAnswer {
    X,
    Y,
    Here,
}

impl EdgeQueryAnswer {
    pub fn flip(self) -> EdgeQueryAnswer {
        match self {
            EdgeQueryAnswer::X => EdgeQueryAnswer::Y,
            EdgeQueryAnswer::Y => EdgeQueryAnswer::X,
            EdgeQueryAnswer::Here => EdgeQueryAnswer::Here,
        }
    }
}

/// Reference oracle. Builds the member tree of `S ∪ {u}`, removes the
/// two edges bookending the `x`–`y` path and reports which component
/// holds `u`. Universes of at most 64 elements take an allocation-free
/// path so exhaustive sweeps stay fast.
pub fn edge_query_brute(
    h: &HasseDiagram,
    x: ElementId,
    y: ElementId,
    u: ElementId,
) -> Result<EdgeQueryAnswer> {
    let uni = h.universe();
    uni.check_element(u)?;
    if x == y || !h.contains(x) || !h.contains(y) {
        return Err(Error::InvalidQuery);
    }
    if uni.len() <= 64 {
        return Ok(brute_small(h, x, y, u));
    }

    // Member list of S' = S ∪ {u}.
    let mut members: Vec<ElementId> = h.members().collect();
    if !h.contains(u) {
        members.push(u);
    }
    // pred over S': deepest other member that is an ancestor.
    let pred = |v: ElementId| -> Option<ElementId> {
        members
            .iter()
            .copied()
            .filter(|&m| m != v && uni.leq(m, v))
            .max_by_key(|&m| uni.depth_of(m))
    };
    let parent: Vec<Option<ElementId>> = members.iter().map(|&v| pred(v)).collect();
    let index_of = |v: ElementId| members.iter().position(|&m| m == v).unwrap();

    // Path from x to y through predecessor chains.
    let chain_up = |mut v: ElementId| -> Vec<ElementId> {
        let mut out = vec![v];
        while let Some(p) = parent[index_of(v)] {
            out.push(p);
            v = p;
        }
        out
    };
    let cx = chain_up(x);
    let cy = chain_up(y);
    let meet = *cx.iter().find(|v| cy.contains(v)).unwrap();
    let mut path: Vec<ElementId> = cx.iter().copied().take_while(|&v| v != meet).collect();
    path.push(meet);
    let tail: Vec<ElementId> = cy.iter().copied().take_while(|&v| v != meet).collect();
    path.extend(tail.into_iter().rev());
    debug_assert!(path.len() >= 2);

    // Remove the bookend edges and flood from u.
    let removed_a = (path[0], path[1]);
    let removed_b = (path[path.len() - 2], path[path.len() - 1]);
    let banned = |a: ElementId, b: ElementId| {
        (a, b) == removed_a
            || (b, a) == removed_a
            || (a, b) == removed_b
            || (b, a) == removed_b
    };
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); members.len()];
    for (i, &v) in members.iter().enumerate() {
        if let Some(p) = parent[i] {
            if !banned(v, p) {
                let j = index_of(p);
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let mut seen = vec![false; members.len()];
    let mut stack = vec![index_of(u)];
    seen[index_of(u)] = true;
    while let Some(i) = stack.pop() {
        for &j in &adj[i] {
            if !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    if seen[index_of(x)] {
        Ok(EdgeQueryAnswer::X)
    } else if seen[index_of(y)] {
        Ok(EdgeQueryAnswer::Y)
    } else {
        Ok(EdgeQueryAnswer::Here)
    }
}

/// Same component computation on stack bitmaps.
fn brute_small(h: &HasseDiagram, x: ElementId, y: ElementId, u: ElementId) -> EdgeQueryAnswer {
    let uni = h.universe();
    let mut in_set: u64 = 1; // the minimal element
    for v in 1..uni.len() {
        if h.contains(v) {
            in_set |= 1 << v;
        }
    }
    in_set |= 1 << u;
    // parent of each member of S' under the induced tree
    let mut parent = [usize::MAX; 64];
    for v in 0..uni.len() {
        if in_set & (1 << v) == 0 {
            continue;
        }
        let mut cur = uni.parent_of(v);
        while let Some(p) = cur {
            if in_set & (1 << p) != 0 {
                parent[v] = p;
                break;
            }
            cur = uni.parent_of(p);
        }
    }
    // path between x and y through the induced tree
    let chain = |mut v: ElementId| -> u64 {
        let mut mask = 1u64 << v;
        while parent[v] != usize::MAX {
            v = parent[v];
            mask |= 1 << v;
        }
        mask
    };
    let cy = chain(y);
    let meet = {
        let mut v = x;
        while cy & (1 << v) == 0 {
            v = parent[v];
        }
        v
    };
    let mut path = [0usize; 64];
    let mut len = 0;
    let mut v = x;
    loop {
        path[len] = v;
        len += 1;
        if v == meet {
            break;
        }
        v = parent[v];
    }
    let mut tail = [0usize; 64];
    let mut tlen = 0;
    let mut w = y;
    while w != meet {
        tail[tlen] = w;
        tlen += 1;
        w = parent[w];
    }
    for i in (0..tlen).rev() {
        path[len] = tail[i];
        len += 1;
    }
    let bookend_a = (path[0], path[1]);
    let bookend_b = (path[len - 2], path[len - 1]);
    let banned = |a: usize, b: usize| {
        (a, b) == bookend_a || (b, a) == bookend_a || (a, b) == bookend_b || (b, a) == bookend_b
    };
    // flood from u over the surviving edges
    let mut visited: u64 = 1 << u;
    let mut stack = [0usize; 64];
    let mut sp = 0;
    stack[sp] = u;
    sp += 1;
    while sp > 0 {
        sp -= 1;
        let v = stack[sp];
        let push = |w: usize, visited: &mut u64, stack: &mut [usize; 64], sp: &mut usize| {
            if *visited & (1 << w) == 0 {
                *visited |= 1 << w;
                stack[*sp] = w;
                *sp += 1;
            }
        };
        if parent[v] != usize::MAX && !banned(v, parent[v]) {
            push(parent[v], &mut visited, &mut stack, &mut sp);
        }
        for w in 0..uni.len() {
            if in_set & (1 << w) != 0 && parent[w] == v && !banned(v, w) {
                push(w, &mut visited, &mut stack, &mut sp);
            }
        }
    }
    if visited & (1 << x) != 0 {
        EdgeQueryAnswer::X
    } else if visited & (1 << y) != 0 {
        EdgeQueryAnswer::Y
    } else {
        EdgeQueryAnswer::Here
    }
}

/// Fast path: constant number of ancestry tests once the bookend member
/// next to the shallower endpoint is known.
pub fn edge_query_fast(
    h: &HasseDiagram,
    x: ElementId,
    y: ElementId,
    u: ElementId,
) -> Result<EdgeQueryAnswer> {
    let uni = h.universe();
    uni.check_element(u)?;
    if x == y || !h.contains(x) || !h.contains(y) {
        return Err(Error::InvalidQuery);
    }
    if uni.leq(x, y) {
        let d = h.step_toward(x, y).expect("y lies below x through a successor");
        Ok(eval_descending(uni, x, y, d, u))
    } else if uni.leq(y, x) {
        let d = h.step_toward(y, x).expect("x lies below y through a successor");
        Ok(eval_descending(uni, y, x, d, u).flip())
    } else {
        Ok(eval_incomparable(uni, x, y, u))
    }
}

/// Core rule for `x ≺ y`, given the bookend member `d`: the member
/// adjacent to `x` on the current path towards `y`. Exposed for reuse by
/// the tree's query handles, whose edge references supply `d` directly.
pub fn eval_descending(
    uni: &UniverseTree,
    x: ElementId,
    y: ElementId,
    d: ElementId,
    u: ElementId,
) -> EdgeQueryAnswer {
    if u == x {
        return EdgeQueryAnswer::X;
    }
    if u == y {
        return EdgeQueryAnswer::Y;
    }
    let c = uni.child_toward(x, y);
    if !uni.leq(c, u) {
        // u leaves x's subtree before the branch towards y.
        EdgeQueryAnswer::X
    } else if uni.leq(y, u) {
        EdgeQueryAnswer::Y
    } else if uni.leq(d, u) || uni.leq(u, d) {
        // u hangs at or below the first path member, or slots in between.
        EdgeQueryAnswer::Here
    } else {
        // u branches off between x and d: it joins the tree at x.
        EdgeQueryAnswer::X
    }
}

/// Core rule for incomparable endpoints.
pub fn eval_incomparable(
    uni: &UniverseTree,
    x: ElementId,
    y: ElementId,
    u: ElementId,
) -> EdgeQueryAnswer {
    if uni.leq(x, u) {
        EdgeQueryAnswer::X
    } else if uni.leq(y, u) {
        EdgeQueryAnswer::Y
    } else {
        EdgeQueryAnswer::Here
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::universe::sample_poset;
    use std::sync::Arc;

    #[test]
    fn endpoint_hits() {
        let u = Arc::new(sample_poset());
        let h = HasseDiagram::from_members(u, &[1, 2]).unwrap();
        for f in [edge_query_brute, edge_query_fast] {
            assert_eq!(f(&h, 1, 2, 1).unwrap(), EdgeQueryAnswer::X);
            assert_eq!(f(&h, 1, 2, 2).unwrap(), EdgeQueryAnswer::Y);
        }
    }

    #[test]
    fn descendant_of_deeper_endpoint() {
        // x ancestor of y, u a descendant of y.
        let u = Arc::new(sample_poset());
        let h = HasseDiagram::from_members(u, &[1, 9]).unwrap(); // B, J
        for f in [edge_query_brute, edge_query_fast] {
            assert_eq!(f(&h, 1, 9, 7).unwrap(), EdgeQueryAnswer::Y); // H under J
        }
    }

    #[test]
    fn sibling_branch_joins_at_shallow_end() {
        // S = {A, G}; u = I shares the hidden parent J with G, so the
        // member tree of S ∪ {I} stars at A and u sits on A's side.
        let u = Arc::new(sample_poset());
        let h = HasseDiagram::from_members(u, &[6]).unwrap();
        assert_eq!(edge_query_brute(&h, 0, 6, 8).unwrap(), EdgeQueryAnswer::X);
        assert_eq!(edge_query_fast(&h, 0, 6, 8).unwrap(), EdgeQueryAnswer::X);
    }

    #[test]
    fn invalid_query_rejected() {
        let u = Arc::new(sample_poset());
        let h = HasseDiagram::from_members(u, &[1]).unwrap();
        assert!(matches!(
            edge_query_fast(&h, 1, 1, 0),
            Err(Error::InvalidQuery)
        ));
        assert!(matches!(
            edge_query_brute(&h, 1, 5, 0),
            Err(Error::InvalidQuery)
        ));
    }

    /// Both brute-force paths agree with the fast rule beyond the small
    /// bitmap cutoff.
    #[test]
    fn large_universe_paths_agree() {
        use crate::rng::Rng;
        let uni = Arc::new(crate::gen::gen_increasing_tree(80, 31));
        let mut rng = Rng::new(5);
        let members: Vec<ElementId> = (1..80).filter(|_| rng.f64() < 0.4).collect();
        let h = HasseDiagram::from_members(uni, &members).unwrap();
        let all: Vec<ElementId> = h.members().collect();
        for _ in 0..4000 {
            let x = all[rng.usize_below(all.len())];
            let y = all[rng.usize_below(all.len())];
            if x == y {
                continue;
            }
            let u = rng.usize_below(80);
            assert_eq!(
                edge_query_brute(&h, x, y, u).unwrap(),
                edge_query_fast(&h, x, y, u).unwrap(),
                "x={x} y={y} u={u}"
            );
        }
    }

    /// Exhaustive agreement on every member set of the shared sample
    /// poset. The acceptance suite widens this to every small universe.
    #[test]
    fn fast_agrees_with_brute_on_sample() {
        let uni = Arc::new(sample_poset());
        let m = uni.len();
        for mask in 0u32..(1 << (m - 1)) {
            let members: Vec<ElementId> =
                (1..m).filter(|&v| mask & (1 << (v - 1)) != 0).collect();
            if members.len() < 1 {
                continue;
            }
            let h = HasseDiagram::from_members(uni.clone(), &members).unwrap();
            let all: Vec<ElementId> = h.members().collect();
            for &x in &all {
                for &y in &all {
                    if x == y {
                        continue;
                    }
                    for q in 0..m {
                        let b = edge_query_brute(&h, x, y, q).unwrap();
                        let f = edge_query_fast(&h, x, y, q).unwrap();
                        assert_eq!(b, f, "S={members:?} x={x} y={y} u={q}");
                    }
                }
            }
        }
    }
}
