//! The fixed universe: a rooted tree whose ancestry relation is the
//! partial order. Element 0 is the minimal element `ν` (the root).

use crate::error::Error;
use crate::Result;

pub type ElementId = usize;

/// Immutable rooted universe of `M` elements. `leq(a, b)` holds iff `a`
/// is `b` or an ancestor of `b`, answered in O(1) via preorder entry/exit
/// intervals. A binary-lifting table supports level-ancestor lookups
/// (the child of `a` on the path towards a descendant `b`).
#[derive(Debug, Clone)]
pub struct UniverseTree {
    parent: Vec<Option<ElementId>>,
    children: Vec<Vec<ElementId>>,
    depth: Vec<u32>,
    entry: Vec<u32>,
    exit: Vec<u32>,
    // up[j][v] = 2^j-th ancestor of v (root maps to itself)
    up: Vec<Vec<ElementId>>,
}

pub const ROOT: ElementId = 0;

impl UniverseTree {
    /// Build from parent references: `parents[i]` is the parent of element
    /// `i + 1`. Element 0 is the root.
    pub fn from_parents(parents: &[ElementId]) -> Result<UniverseTree> {
        let m = parents.len() + 1;
        let mut parent = vec![None; m];
        let mut children = vec![Vec::new(); m];
        for (i, &p) in parents.iter().enumerate() {
            let child = i + 1;
            if p >= m {
                return Err(Error::InvalidUniverse(format!(
                    "parent {p} of element {child} is out of range"
                )));
            }
            parent[child] = Some(p);
            children[p].push(child);
        }
        for kids in &mut children {
            kids.sort_unstable();
        }

        // Iterative preorder walk; also detects unreachable elements, which
        // can only arise from a cycle among the parent references.
        let mut depth = vec![0u32; m];
        let mut entry = vec![0u32; m];
        let mut exit = vec![0u32; m];
        let mut clock = 0u32;
        let mut visited = 0usize;
        let mut stack: Vec<(ElementId, bool)> = vec![(ROOT, false)];
        while let Some((v, done)) = stack.pop() {
            if done {
                exit[v] = clock;
                continue;
            }
            entry[v] = clock;
            clock += 1;
            visited += 1;
            stack.push((v, true));
            for &c in children[v].iter().rev() {
                depth[c] = depth[v] + 1;
                stack.push((c, false));
            }
        }
        if visited != m {
            return Err(Error::InvalidUniverse(
                "parent references contain a cycle or unreachable elements".into(),
            ));
        }

        let levels = (usize::BITS - m.leading_zeros()).max(1) as usize;
        let mut up = vec![vec![ROOT; m]; levels];
        for v in 0..m {
            up[0][v] = parent[v].unwrap_or(ROOT);
        }
        for j in 1..levels {
            for v in 0..m {
                up[j][v] = up[j - 1][up[j - 1][v]];
            }
        }

        Ok(UniverseTree {
            parent,
            children,
            depth,
            entry,
            exit,
            up,
        })
    }

    /// Parse the text format: first line `M`, then `M - 1` lines
    /// `child parent`. Element ids are `0..M-1` and id 0 is the root.
    pub fn parse(text: &str) -> Result<UniverseTree> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let m: usize = lines
            .next()
            .ok_or_else(|| Error::InvalidUniverse("empty universe file".into()))?
            .trim()
            .parse()
            .map_err(|_| Error::InvalidUniverse("first line must be the element count".into()))?;
        if m == 0 {
            return Err(Error::InvalidUniverse("element count must be positive".into()));
        }
        let mut parents = vec![usize::MAX; m.saturating_sub(1)];
        let mut seen = 0usize;
        for line in lines {
            let mut it = line.split_whitespace();
            let child: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::InvalidUniverse(format!("bad edge line: {line:?}")))?;
            let par: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::InvalidUniverse(format!("bad edge line: {line:?}")))?;
            if child == 0 {
                return Err(Error::InvalidUniverse("element 0 is the root and has no parent".into()));
            }
            if child >= m || par >= m {
                return Err(Error::InvalidUniverse(format!(
                    "edge {child} {par} references an element outside 0..{m}"
                )));
            }
            if parents[child - 1] != usize::MAX {
                return Err(Error::InvalidUniverse(format!(
                    "element {child} has multiple parents"
                )));
            }
            parents[child - 1] = par;
            seen += 1;
        }
        if seen != m - 1 {
            return Err(Error::InvalidUniverse(format!(
                "expected {} edges, found {seen}",
                m - 1
            )));
        }
        UniverseTree::from_parents(&parents)
    }

    /// Render in the same text format accepted by [`UniverseTree::parse`].
    pub fn render(&self) -> String {
        let mut out = format!("{}\n", self.len());
        for v in 1..self.len() {
            out.push_str(&format!("{} {}\n", v, self.parent[v].unwrap()));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, a: ElementId) -> bool {
        a < self.len()
    }

    pub fn check_element(&self, a: ElementId) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::InvalidElement(a))
        }
    }

    pub fn parent_of(&self, a: ElementId) -> Option<ElementId> {
        self.parent[a]
    }

    pub fn children_of(&self, a: ElementId) -> &[ElementId] {
        &self.children[a]
    }

    pub fn depth_of(&self, a: ElementId) -> u32 {
        self.depth[a]
    }

    /// `a ⪯ b`: `a` equals `b` or is an ancestor of `b`.
    #[inline]
    pub fn leq(&self, a: ElementId, b: ElementId) -> bool {
        debug_assert!(a < self.len() && b < self.len());
        self.entry[a] <= self.entry[b] && self.exit[b] <= self.exit[a]
    }

    /// Checked form of [`UniverseTree::leq`].
    pub fn try_leq(&self, a: ElementId, b: ElementId) -> Result<bool> {
        self.check_element(a)?;
        self.check_element(b)?;
        Ok(self.leq(a, b))
    }

    /// Ancestor of `v` at the given depth (must not exceed `depth(v)`).
    pub fn ancestor_at_depth(&self, v: ElementId, target: u32) -> ElementId {
        debug_assert!(target <= self.depth[v]);
        let mut v = v;
        let mut diff = self.depth[v] - target;
        let mut j = 0;
        while diff > 0 {
            if diff & 1 == 1 {
                v = self.up[j][v];
            }
            diff >>= 1;
            j += 1;
        }
        v
    }

    /// The child of `a` on the path to a strict descendant `b`.
    pub fn child_toward(&self, a: ElementId, b: ElementId) -> ElementId {
        debug_assert!(self.leq(a, b) && a != b);
        self.ancestor_at_depth(b, self.depth[a] + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Ten-element poset used across the crate's tests: root A with a
    /// chain side (E above F) and a branching side where J sits between B
    /// and the incomparable siblings G, I.
    ///
    /// ids: A=0 B=1 C=2 D=3 E=4 F=5 G=6 H=7 I=8 J=9
    /// edges: B←A, E←A, F←E, C←B, J←B, G←J, I←J, D←C, H←G
    pub fn sample_poset() -> UniverseTree {
        // parents of elements 1..=9
        UniverseTree::from_parents(&[0, 1, 2, 0, 4, 9, 6, 9, 1]).unwrap()
    }

    #[test]
    fn leq_reflexive_and_minimal() {
        let u = sample_poset();
        for x in 0..u.len() {
            assert!(u.leq(x, x));
            assert!(u.leq(0, x));
        }
    }

    #[test]
    fn sample_relations() {
        let u = sample_poset();
        let (e, f, g, i) = (4, 5, 6, 8);
        assert!(u.leq(e, f));
        assert!(!u.leq(g, i));
        assert!(!u.leq(i, g));
    }

    #[test]
    fn leq_matches_parent_walk() {
        let u = sample_poset();
        for a in 0..u.len() {
            for b in 0..u.len() {
                let mut cur = Some(b);
                let mut found = false;
                while let Some(c) = cur {
                    if c == a {
                        found = true;
                        break;
                    }
                    cur = u.parent_of(c);
                }
                assert_eq!(u.leq(a, b), found, "leq({a},{b})");
            }
        }
    }

    #[test]
    fn partial_order_axioms_exhaustive() {
        let u = sample_poset();
        let n = u.len();
        for a in 0..n {
            for b in 0..n {
                if u.leq(a, b) && u.leq(b, a) {
                    assert_eq!(a, b, "antisymmetry");
                }
                for c in 0..n {
                    if u.leq(a, b) && u.leq(b, c) {
                        assert!(u.leq(a, c), "transitivity");
                    }
                }
            }
        }
    }

    #[test]
    fn child_toward_is_first_step() {
        let u = sample_poset();
        for a in 0..u.len() {
            for b in 0..u.len() {
                if u.leq(a, b) && a != b {
                    let c = u.child_toward(a, b);
                    assert_eq!(u.parent_of(c), Some(a));
                    assert!(u.leq(c, b));
                }
            }
        }
    }

    #[test]
    fn parse_round_trip_and_rejects() {
        let u = sample_poset();
        let text = u.render();
        let back = UniverseTree::parse(&text).unwrap();
        assert_eq!(u.len(), back.len());
        for v in 1..u.len() {
            assert_eq!(u.parent_of(v), back.parent_of(v));
        }

        assert!(UniverseTree::parse("").is_err());
        assert!(UniverseTree::parse("3\n1 0\n").is_err()); // missing edge
        assert!(UniverseTree::parse("3\n1 2\n2 1\n").is_err()); // cycle
        assert!(UniverseTree::parse("2\n1 0\n1 0\n").is_err()); // duplicate parent
        assert!(UniverseTree::parse("2\n0 1\n").is_err()); // root re-parented
    }

    #[test]
    fn invalid_element_is_reported() {
        let u = sample_poset();
        assert!(matches!(u.try_leq(0, 99), Err(Error::InvalidElement(99))));
    }
}

#[cfg(test)]
pub use tests::sample_poset;
