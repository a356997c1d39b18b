//! Orbit graphs on comparison prefixes and their sink components.

use std::collections::HashMap;
use std::fmt::Write;

use serde_json::{json, Value};

use crate::bits::Bits;
use crate::detectors::check_syndetic;
use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::semigroup::WindowGrid;
use crate::sets::GroundSet;

use super::recurrence::{depth_guard, rung_ladder, UniformReport, UniformRung};
use super::{bitstring, distance_at, first_disagreement, ShiftSystem};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitNode {
    pub id: usize,
    /// Numerators of the reachable shifts of the base with this prefix;
    /// the first one is the representative.
    pub offsets: Vec<usize>,
    pub prefix: Bits,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitEdge {
    pub from: usize,
    /// Numerator of the shift label.
    pub label: usize,
    pub to: usize,
}

/// Quotient of the reachable shifts of the base by agreement on the first
/// `P` indices. Nodes are numbered in first-reached order of a
/// breadth-first search that tries labels in ascending order; `(c, s, c')`
/// is an edge when some member of `c` shifted by `s` lies in `c'`. Pairs
/// `(c, s)` for which every member runs past the domain are listed in
/// `truncated`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitGraph {
    pub grid: WindowGrid,
    pub prefix: usize,
    pub labels: Vec<usize>,
    pub nodes: Vec<OrbitNode>,
    pub edges: Vec<OrbitEdge>,
    pub truncated: Vec<(usize, usize)>,
}

pub fn orbit_graph(sys: &ShiftSystem, shift_bound: &Rat) -> Result<OrbitGraph> {
    let grid = &sys.grid;
    if shift_bound > grid.delta_max() {
        return Err(Error::OutOfRange {
            value: shift_bound.clone(),
            delta_max: grid.delta_max().clone(),
        });
    }
    let p = sys.prefix;
    let base = sys.base.bits();
    sys.base.prefix(p)?;
    let last = base.len() - p;
    let labels: Vec<usize> = (1..=grid.count_upto(shift_bound)).collect();

    let mut reachable = vec![false; last + 1];
    reachable[0] = true;
    for o in 0..=last {
        if reachable[o] {
            for &k in labels.iter().take_while(|&&k| o + k <= last) {
                reachable[o + k] = true;
            }
        }
    }
    let mut class_of: HashMap<Bits, Vec<usize>> = HashMap::new();
    for o in (0..=last).filter(|&o| reachable[o]) {
        class_of.entry(base.window(o, p)).or_default().push(o);
    }

    let root = base.window(0, p);
    let mut ids: HashMap<Bits, usize> = HashMap::from([(root.clone(), 0)]);
    let mut nodes = vec![OrbitNode {
        id: 0,
        offsets: class_of[&root].clone(),
        prefix: root,
    }];
    let mut edges = Vec::new();
    let mut truncated = Vec::new();
    let mut next = 0;
    while next < nodes.len() {
        let members = nodes[next].offsets.clone();
        for &k in &labels {
            let mut targets = Vec::new();
            for &o in members.iter().filter(|&&o| o + k <= last) {
                let key = base.window(o + k, p);
                let to = match ids.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = nodes.len();
                        ids.insert(key.clone(), id);
                        nodes.push(OrbitNode {
                            id,
                            offsets: class_of[&key].clone(),
                            prefix: key,
                        });
                        id
                    }
                };
                if !targets.contains(&to) {
                    targets.push(to);
                }
            }
            if targets.is_empty() {
                truncated.push((next, k));
            }
            edges.extend(targets.into_iter().map(|to| OrbitEdge { from: next, label: k, to }));
        }
        next += 1;
    }
    Ok(OrbitGraph {
        grid: grid.clone(),
        prefix: p,
        labels,
        nodes,
        edges,
        truncated,
    })
}

impl OrbitGraph {
    /// One `from label to` line per edge.
    pub fn edge_list(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            writeln!(out, "{} {} {}", e.from, self.grid.element(e.label), e.to).expect("string write");
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "edges": self.edges.iter().map(|e| json!([e.from, self.grid.element(e.label), e.to])).collect::<Vec<_>>(),
            "modulus": self.grid.modulus(),
            "nodes": self.nodes.iter().map(|n| json!({
                "config": bitstring(&n.prefix),
                "id": n.id,
                "offset": match n.offsets[0] { 0 => Rat::zero(), o => self.grid.element(o) },
            })).collect::<Vec<_>>(),
            "prefix": self.prefix,
            "truncated": self.truncated.iter().map(|(n, k)| json!([n, self.grid.element(*k)])).collect::<Vec<_>>(),
        })
    }

    fn successors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            out[e.from].push(e.to);
        }
        out
    }
}

/// Strongly connected components, each as ascending node ids.
fn components(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut frames = vec![(root, 0usize)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = frames.last_mut() {
            if let Some(&w) = succ[v].get(*i) {
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            frames.pop();
            if let Some(&(u, _)) = frames.last() {
                low[u] = low[u].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("component member");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                out.push(comp);
            }
        }
    }
    out
}

/// Sink components closed under every label, ordered by smallest node id.
pub fn minimal_invariant(g: &OrbitGraph) -> Vec<Vec<usize>> {
    let succ = g.successors();
    let mut comp_of = vec![0; g.nodes.len()];
    let comps = components(&succ);
    for (c, members) in comps.iter().enumerate() {
        for &v in members {
            comp_of[v] = c;
        }
    }
    let mut out: Vec<Vec<usize>> = comps
        .iter()
        .enumerate()
        .filter(|(c, members)| {
            members.iter().all(|&v| succ[v].iter().all(|&w| comp_of[w] == *c))
                && !g.truncated.iter().any(|(v, _)| comp_of[*v] == *c)
        })
        .map(|(_, m)| m.clone())
        .collect();
    out.sort_by_key(|m| m[0]);
    out
}

/// Numerators `s` such that some walk from `node` with label sum `s` ends
/// at a node within distance `< delta` of `node` on the prefix.
pub fn graph_returns(g: &OrbitGraph, node: usize, delta: &Rat) -> GroundSet {
    let size = g.grid.size();
    let n = g.nodes.len();
    let mut out_edges = vec![Vec::new(); n];
    for e in &g.edges {
        out_edges[e.from].push((e.label, e.to));
    }
    let mut reach = vec![vec![false; n]; size + 1];
    reach[0][node] = true;
    for sum in 0..size {
        for u in 0..n {
            if !reach[sum][u] {
                continue;
            }
            for &(k, w) in &out_edges[u] {
                if sum + k <= size {
                    reach[sum + k][w] = true;
                }
            }
        }
    }
    let near: Vec<bool> = g
        .nodes
        .iter()
        .map(|m| distance_at(first_disagreement(&m.prefix, &g.nodes[node].prefix)) < *delta)
        .collect();
    GroundSet::from_indices(&g.grid, (1..=size).filter(|&s| (0..n).any(|u| reach[s][u] && near[u])))
}

/// Uniform recurrence of `node` at graph resolution: at every rung `1/n`
/// the walk-return set must pass the syndetic check on `1/n, ..., 1/depth`.
pub fn uniform_in_graph(g: &OrbitGraph, node: usize, depth: usize, f_cap: usize) -> Result<UniformReport> {
    depth_guard(&g.grid, depth)?;
    let mut rungs = Vec::with_capacity(depth);
    for n in 1..=depth {
        let set = graph_returns(g, node, &Rat::new(1, n as u64));
        let verdict = check_syndetic(&set, &rung_ladder(&g.grid, n, depth, f_cap)?, f_cap)?;
        rungs.push(UniformRung {
            n,
            returns: set.elements(),
            verdict,
        });
    }
    Ok(UniformReport::assemble(depth, f_cap, rungs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{chi, replay_uniform, Configuration};
    use crate::sets::SetSpec;

    fn odd_system(p: usize) -> ShiftSystem {
        let g = WindowGrid::dyadic(16).unwrap();
        let odd = SetSpec::Pattern {
            period: 2,
            residues: vec![1],
        };
        ShiftSystem::new(chi(&odd, &g).unwrap(), p).unwrap()
    }

    #[test]
    fn all_ones_is_one_self_loop() {
        let g = WindowGrid::dyadic(16).unwrap();
        let sys = ShiftSystem::new(Configuration::ones(&g), 4).unwrap();
        let og = orbit_graph(&sys, &Rat::new(2, 16)).unwrap();
        assert_eq!(og.nodes.len(), 1);
        assert_eq!(og.edge_list(), "0 1/16 0\n0 1/8 0\n");
        assert_eq!(minimal_invariant(&og), vec![vec![0]]);
    }

    #[test]
    fn parity_classes() {
        let og = orbit_graph(&odd_system(4), &Rat::new(2, 16)).unwrap();
        assert_eq!(og.nodes.len(), 2);
        assert_eq!(bitstring(&og.nodes[0].prefix), "0101");
        assert_eq!(bitstring(&og.nodes[1].prefix), "1010");
        let flips: Vec<(usize, usize, usize)> = og.edges.iter().map(|e| (e.from, e.label, e.to)).collect();
        assert_eq!(flips, vec![(0, 1, 1), (0, 2, 0), (1, 1, 0), (1, 2, 1)]);
        assert_eq!(minimal_invariant(&og), vec![vec![0, 1]]);
        let doc = serde_json::to_string(&og.to_json()).unwrap();
        assert!(doc.starts_with(r#"{"edges":[[0,"1/16",1],"#));
    }

    #[test]
    fn transient_source_is_excluded() {
        let g = WindowGrid::dyadic(32).unwrap();
        let spec = SetSpec::union(
            SetSpec::Explicit(vec![Rat::new(1, 32)]),
            SetSpec::Pattern {
                period: 2,
                residues: vec![0],
            },
        );
        let sys = ShiftSystem::new(chi(&spec, &g).unwrap(), 3).unwrap();
        let og = orbit_graph(&sys, &Rat::new(1, 32)).unwrap();
        let sinks = minimal_invariant(&og);
        assert!(sinks.iter().all(|c| !c.contains(&0)));
        assert_eq!(sinks.len(), 1);
    }

    #[test]
    fn sink_nodes_are_uniform_at_graph_resolution() {
        let og = orbit_graph(&odd_system(4), &Rat::new(2, 16)).unwrap();
        for v in minimal_invariant(&og).concat() {
            let rep = uniform_in_graph(&og, v, 4, 2).unwrap();
            assert!(rep.uniform, "node {v}");
            let g = og.grid.clone();
            assert!(replay_uniform(&rep, &g, |n| graph_returns(&og, v, &Rat::new(1, n as u64)).elements()).is_ok());
        }
    }

    #[test]
    fn node_count_is_bounded_and_refines() {
        let g = WindowGrid::dyadic(32).unwrap();
        let spec = SetSpec::Explicit((1..32).filter(|k| k % 3 == 0 || k % 5 == 1).map(|k| Rat::new(k, 32)).collect());
        let x = chi(&spec, &g).unwrap();
        let graphs: Vec<OrbitGraph> = (1..=6)
            .map(|p| orbit_graph(&ShiftSystem::new(x.clone(), p).unwrap(), &Rat::new(3, 32)).unwrap())
            .collect();
        for (i, og) in graphs.iter().enumerate() {
            assert!(og.nodes.len() <= 1 << (i + 1));
        }
        for w in graphs.windows(2) {
            let coarse: Vec<&Bits> = w[0].nodes.iter().map(|n| &n.prefix).collect();
            for n in &w[1].nodes {
                assert!(coarse.contains(&&n.prefix.truncated(w[0].prefix)));
            }
        }
    }

    #[test]
    fn components_of_a_chain() {
        let succ = vec![vec![1], vec![2], vec![1], vec![3]];
        assert_eq!(components(&succ), vec![vec![1, 2], vec![0], vec![3]]);
    }
}
