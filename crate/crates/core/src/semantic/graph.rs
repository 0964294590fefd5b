//! Call-graph cycle detection.
//!
//! Reentrant trap wiring shows up as cycles in the transfer slice's call
//! graph: a callback-driven helper that ends up calling the transfer path
//! again.  [`find_cycles`] reports every strongly connected component with
//! more than one member, plus single nodes that call themselves.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::graph::{DiGraph, NodeIndex};

/// All cycle-carrying node groups of a directed graph given by its edge
/// list: strongly connected components of size greater than one, and
/// self-loop singletons.  Groups come back sorted by their smallest member;
/// nodes that appear in no edge cannot lie on a cycle and are ignored.
pub fn find_cycles(edges: &[(u32, u32)]) -> Vec<BTreeSet<u32>> {
    let mut graph: DiGraph<u32, ()> = DiGraph::new();
    let mut index: BTreeMap<u32, NodeIndex> = BTreeMap::new();
    let mut self_loops: BTreeSet<u32> = BTreeSet::new();

    for &(from, to) in edges {
        let fi = *index.entry(from).or_insert_with(|| graph.add_node(from));
        let ti = *index.entry(to).or_insert_with(|| graph.add_node(to));
        if from == to {
            self_loops.insert(from);
        }
        graph.update_edge(fi, ti, ());
    }

    let mut cycles: Vec<BTreeSet<u32>> = Vec::new();
    for component in petgraph::algo::tarjan_scc(&graph) {
        if component.len() > 1 {
            cycles.push(component.iter().map(|&i| graph[i]).collect());
        } else if let Some(&only) = component.first() {
            if self_loops.contains(&graph[only]) {
                cycles.push(BTreeSet::from([graph[only]]));
            }
        }
    }
    cycles.sort_by_key(|c| c.first().copied());
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reference implementation: a node group is cyclic when every member
    /// can reach every other member (and itself) through at least one edge.
    /// Computed from plain DFS reachability, independent of the SCC
    /// algorithm above.
    pub(crate) fn cycles_by_reachability(edges: &[(u32, u32)]) -> Vec<BTreeSet<u32>> {
        let mut adj: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
        let mut nodes: BTreeSet<u32> = BTreeSet::new();
        for &(from, to) in edges {
            adj.entry(from).or_default().insert(to);
            nodes.insert(from);
            nodes.insert(to);
        }
        // reach[v] = nodes reachable from v via one or more edges.
        let mut reach: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
        for &start in &nodes {
            let mut seen = BTreeSet::new();
            let mut stack: Vec<u32> = adj.get(&start).into_iter().flatten().copied().collect();
            while let Some(cur) = stack.pop() {
                if seen.insert(cur) {
                    stack.extend(adj.get(&cur).into_iter().flatten().copied());
                }
            }
            reach.insert(start, seen);
        }
        // Group nodes that are mutually reachable and on some cycle.
        let mut grouped: BTreeSet<u32> = BTreeSet::new();
        let mut out: Vec<BTreeSet<u32>> = Vec::new();
        for &v in &nodes {
            if grouped.contains(&v) || !reach[&v].contains(&v) {
                continue;
            }
            let members: BTreeSet<u32> = nodes
                .iter()
                .copied()
                .filter(|&u| reach[&v].contains(&u) && reach[&u].contains(&v))
                .collect();
            grouped.extend(members.iter().copied());
            out.push(members);
        }
        out.sort_by_key(|c| c.first().copied());
        out
    }

    #[test]
    fn two_node_cycle_found() {
        let cycles = find_cycles(&[(1, 2), (2, 1), (2, 3)]);
        assert_eq!(cycles, vec![BTreeSet::from([1, 2])]);
    }

    #[test]
    fn self_loop_is_a_cycle() {
        let cycles = find_cycles(&[(5, 5), (5, 6)]);
        assert_eq!(cycles, vec![BTreeSet::from([5])]);
    }

    #[test]
    fn acyclic_graph_has_none() {
        assert!(find_cycles(&[(1, 2), (2, 3), (1, 3)]).is_empty());
    }

    #[test]
    fn nested_and_disjoint_cycles() {
        let edges = [(1, 2), (2, 3), (3, 1), (4, 5), (5, 4), (3, 4), (9, 9)];
        let cycles = find_cycles(&edges);
        assert_eq!(
            cycles,
            vec![
                BTreeSet::from([1, 2, 3]),
                BTreeSet::from([4, 5]),
                BTreeSet::from([9]),
            ]
        );
    }

    #[test]
    fn agrees_with_reachability_reference_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5cc);
        for _ in 0..200 {
            let nodes = rng.gen_range(2..=12u32);
            let edge_count = rng.gen_range(0..=(nodes * 2) as usize);
            let edges: Vec<(u32, u32)> = (0..edge_count)
                .map(|_| (rng.gen_range(0..nodes), rng.gen_range(0..nodes)))
                .collect();
            assert_eq!(
                find_cycles(&edges),
                cycles_by_reachability(&edges),
                "edges: {edges:?}"
            );
        }
    }
}
