//! Static construction: repeatedly contract degree-2 paths into balanced
//! structures and leaves into linear structures until one node remains.

use super::{Counters, Coverage, HandleId, LineLeafTree, NodeMeta, NodeType, ParentLoc};
use crate::hasse::HasseDiagram;
use crate::universe::ElementId;
use crate::Result;

/// One contraction event, for trace dumps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContractionEvent {
    Line {
        round: u32,
        nodes: Vec<ElementId>,
        target: (ElementId, ElementId),
    },
    Leaf {
        round: u32,
        nodes: Vec<ElementId>,
        target: ElementId,
    },
}

impl ContractionEvent {
    pub fn render(&self) -> String {
        fn ids(v: &[ElementId]) -> String {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
        match self {
            ContractionEvent::Line {
                round,
                nodes,
                target,
            } => format!(
                "round={round} step=line nodes={} target=edge({},{})",
                ids(nodes),
                target.0,
                target.1
            ),
            ContractionEvent::Leaf {
                round,
                nodes,
                target,
            } => format!(
                "round={round} step=leaf nodes={} target=node({target})",
                ids(nodes)
            ),
        }
    }
}

impl LineLeafTree {
    pub fn build_static(hasse: HasseDiagram) -> Result<LineLeafTree> {
        Ok(Self::build_static_traced(hasse)?.0)
    }

    /// Build and report every contraction event in order.
    pub fn build_static_traced(
        hasse: HasseDiagram,
    ) -> Result<(LineLeafTree, Vec<ContractionEvent>)> {
        let m = hasse.universe().len();
        let mut tree = LineLeafTree {
            hasse,
            meta: vec![NodeMeta::default(); m],
            lsts: vec![Vec::new(); m],
            handles: Vec::new(),
            lam_refs: Vec::new(),
            root: 0,
            counters: Counters::default(),
            coverage: Coverage::default(),
        };
        tree.sync_lam_refs_len();
        let mut events = Vec::new();

        // Live contracted tree: adjacency of (neighbor, connecting handle).
        let mut adj: Vec<Vec<(ElementId, HandleId)>> = vec![Vec::new(); m];
        let mut live: Vec<ElementId> = tree.hasse.members().collect();
        live.sort_unstable();
        for &v in &live {
            if let Some(p) = tree.hasse.pred(v) {
                let rec = tree.hasse.up_edge(v).expect("member edge record");
                let h = tree.edge_handle(rec, p);
                adj[p].push((v, h));
                adj[v].push((p, h));
            }
        }

        let mut round = 0u32;
        while live.len() > 1 {
            round += 1;

            // Line step: contract every maximal run of degree-2 nodes.
            let mut in_run = vec![false; m];
            let mut runs: Vec<Vec<ElementId>> = Vec::new();
            for &v in &live {
                if adj[v].len() == 2 && !in_run[v] {
                    // expand to the maximal run through v
                    let mut run = vec![v];
                    in_run[v] = true;
                    for dir in 0..2 {
                        let mut prev = v;
                        let mut cur = adj[v][dir].0;
                        while adj[cur].len() == 2 && !in_run[cur] {
                            in_run[cur] = true;
                            if dir == 0 {
                                run.insert(0, cur);
                            } else {
                                run.push(cur);
                            }
                            let next = if adj[cur][0].0 == prev {
                                adj[cur][1].0
                            } else {
                                adj[cur][0].0
                            };
                            prev = cur;
                            cur = next;
                        }
                    }
                    runs.push(run);
                }
            }
            for run in runs {
                // bounds: the non-run neighbors of the run's endpoints
                let first = run[0];
                let last = *run.last().unwrap();
                let (b1, b2) = if run.len() == 1 {
                    (adj[first][0].0, adj[first][1].0)
                } else {
                    let b1 = adj[first]
                        .iter()
                        .map(|(n, _)| *n)
                        .find(|n| !run.contains(n))
                        .expect("run endpoint has an outside neighbor");
                    let b2 = adj[last]
                        .iter()
                        .map(|(n, _)| *n)
                        .find(|n| !run.contains(n))
                        .expect("run endpoint has an outside neighbor");
                    (b1, b2)
                };
                tree.contract_run(&mut adj, &run, b1, b2, round);
                events.push(ContractionEvent::Line {
                    round,
                    nodes: run,
                    target: (b1, b2),
                });
            }
            live.retain(|&v| !in_run[v]);

            // Leaf step.
            if live.len() == 2 {
                let (a, b) = (live[0].min(live[1]), live[0].max(live[1]));
                // a (smaller id) becomes the root, b contracts into it
                let h = adj[a][0].1;
                tree.orient(h, a);
                tree.meta[b] = NodeMeta {
                    round,
                    ty: NodeType::Leaf,
                    parent: ParentLoc::Lst(a),
                };
                tree.lsts[a].insert(0, h);
                tree.counters.structure_ops += 1;
                events.push(ContractionEvent::Leaf {
                    round,
                    nodes: vec![b],
                    target: a,
                });
                live = vec![a];
                break;
            }
            let leaves: Vec<ElementId> = live.iter().copied().filter(|&v| adj[v].len() == 1).collect();
            let mut absorbed = vec![false; m];
            let mut grouped: Vec<(ElementId, Vec<ElementId>)> = Vec::new();
            for &y in &leaves {
                let (x, h) = adj[y][0];
                tree.orient(h, x);
                tree.meta[y] = NodeMeta {
                    round,
                    ty: NodeType::Leaf,
                    parent: ParentLoc::Lst(x),
                };
                tree.lsts[x].insert(0, h);
                tree.counters.structure_ops += 1;
                absorbed[y] = true;
                adj[x].retain(|&(n, _)| n != y);
                adj[y].clear();
                match grouped.iter_mut().find(|(g, _)| *g == x) {
                    Some((_, nodes)) => nodes.push(y),
                    None => grouped.push((x, vec![y])),
                }
            }
            for (target, nodes) in grouped {
                events.push(ContractionEvent::Leaf {
                    round,
                    nodes,
                    target,
                });
            }
            live.retain(|&v| !absorbed[v]);
        }

        let survivor = live[0];
        tree.root = survivor;
        tree.meta[survivor] = NodeMeta {
            round: round + 1,
            ty: NodeType::Leaf,
            parent: ParentLoc::Root,
        };
        Ok((tree, events))
    }

    /// Contract the run into a balanced structure on a fresh handle
    /// spanning the bounds, updating adjacency.
    fn contract_run(
        &mut self,
        adj: &mut [Vec<(ElementId, HandleId)>],
        run: &[ElementId],
        b1: ElementId,
        b2: ElementId,
        round: u32,
    ) -> HandleId {
        // collect edges in order b1 -> b2
        let mut edges = Vec::with_capacity(run.len() + 1);
        let mut prev = b1;
        for &v in run {
            let &(_, h) = adj[v].iter().find(|&&(n, _)| n == prev).unwrap();
            self.orient(h, prev);
            edges.push(h);
            prev = v;
        }
        let &(_, h_last) = adj[b2].iter().find(|&&(n, _)| n == prev).unwrap();
        self.orient(h_last, prev);
        edges.push(h_last);
        for &v in run {
            adj[v].clear();
        }
        let lam1 = self.handles[edges[0].0].lam1;
        let lam2 = self.handles[edges[edges.len() - 1].0].lam2;
        let nh = self.new_handle(lam1, lam2, edges);
        for &v in run {
            self.meta[v] = NodeMeta {
                round,
                ty: NodeType::Line,
                parent: ParentLoc::Bst(nh),
            };
        }
        self.counters.structure_ops += run.len() as u64;
        adj[b1].retain(|&(n, _)| n != run[0]);
        adj[b2].retain(|&(n, _)| n != *run.last().unwrap());
        adj[b1].push((b2, nh));
        adj[b2].push((b1, nh));
        nh
    }
}
