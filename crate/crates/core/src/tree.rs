//! Spanning trees of `X ∪ {Δ}` rooted at `Δ`, their matrix-tree weights and
//! exhaustive enumeration for small graphs.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{AugEdge, WeightedGraph};

/// Largest augmented edge count accepted by [`enumerate_rooted_trees`].
pub const ENUMERATION_EDGE_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parent {
    Root,
    Vertex(usize),
}

/// A spanning tree stored as the parent of every vertex on its path to the root.
///
/// The parent map is unique for a given edge set, so derived equality and
/// ordering agree with edge-set equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootedSpanningTree {
    parent: Vec<Parent>,
}

impl RootedSpanningTree {
    /// Builds a tree from its parent map. Every vertex must reach the root.
    pub fn from_parents(g: &WeightedGraph, parent: Vec<Parent>) -> Result<Self> {
        if parent.len() != g.len() {
            return Err(Error::InvalidTree(format!("{} parents for {} vertices", parent.len(), g.len())));
        }
        for (x, p) in parent.iter().enumerate() {
            let ok = match *p {
                Parent::Root => g.killing()[x] > 0.0,
                Parent::Vertex(y) => y < g.len() && g.edge_between(x, y).is_some(),
            };
            if !ok {
                return Err(Error::InvalidTree(format!("`{}` has a parent it is not joined to", g.name(x))));
            }
        }
        // Cycle check: walking up from any vertex must end at the root within n steps.
        for start in 0..g.len() {
            let mut x = start;
            let mut steps = 0;
            while let Parent::Vertex(y) = parent[x] {
                x = y;
                steps += 1;
                if steps > g.len() {
                    return Err(Error::InvalidTree("parent map has a cycle".into()));
                }
            }
        }
        Ok(RootedSpanningTree { parent })
    }

    /// Builds a tree from an unordered edge set.
    pub fn from_edges(g: &WeightedGraph, edges: &[AugEdge]) -> Result<Self> {
        let n = g.len();
        if edges.len() != n {
            return Err(Error::InvalidTree(format!("{} edges, expected {n}", edges.len())));
        }
        // Node n stands for the root.
        let mut adj = vec![Vec::new(); n + 1];
        for &e in edges {
            let (a, b) = match e {
                AugEdge::Conductance(i) => {
                    let edge = g.edges().get(i).ok_or_else(|| Error::InvalidTree(format!("no edge {i}")))?;
                    (edge.u, edge.v)
                }
                AugEdge::Killing(x) => {
                    if x >= n || g.killing()[x] <= 0.0 {
                        return Err(Error::InvalidTree(format!("no killing edge at vertex {x}")));
                    }
                    (x, n)
                }
            };
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n + 1];
        seen[n] = true;
        let mut queue = VecDeque::from([n]);
        while let Some(a) = queue.pop_front() {
            for &b in &adj[a] {
                if !seen[b] {
                    seen[b] = true;
                    parent[b] = Some(if a == n { Parent::Root } else { Parent::Vertex(a) });
                    queue.push_back(b);
                }
            }
        }
        // n edges reaching all n+1 nodes is a spanning tree.
        let parent: Option<Vec<Parent>> = parent.into_iter().collect();
        let parent = parent.ok_or_else(|| Error::InvalidTree("edges do not span X ∪ {Δ}".into()))?;
        Ok(RootedSpanningTree { parent })
    }

    pub fn parents(&self) -> &[Parent] {
        &self.parent
    }

    pub fn parent(&self, x: usize) -> Parent {
        self.parent[x]
    }

    pub fn contains(&self, g: &WeightedGraph, e: AugEdge) -> bool {
        match e {
            AugEdge::Conductance(i) => {
                let edge = &g.edges()[i];
                self.parent[edge.u] == Parent::Vertex(edge.v) || self.parent[edge.v] == Parent::Vertex(edge.u)
            }
            AugEdge::Killing(x) => self.parent[x] == Parent::Root,
        }
    }

    pub fn contains_conductance(&self, g: &WeightedGraph, edge: usize) -> bool {
        self.contains(g, AugEdge::Conductance(edge))
    }

    /// Tree edges, sorted.
    pub fn edges(&self, g: &WeightedGraph) -> Vec<AugEdge> {
        let mut out: Vec<AugEdge> = self
            .parent
            .iter()
            .enumerate()
            .map(|(x, p)| match *p {
                Parent::Root => AugEdge::Killing(x),
                Parent::Vertex(y) => AugEdge::Conductance(g.edge_between(x, y).expect("validated tree edge")),
            })
            .collect();
        out.sort();
        out
    }

    /// `∏_{e∈T} C_e · ∏_{{x,Δ}∈T} κ_x`.
    pub fn weight(&self, g: &WeightedGraph) -> f64 {
        self.edges(g).into_iter().map(|e| g.aug_edge_weight(e)).product()
    }

    pub fn labels(&self, g: &WeightedGraph) -> Vec<String> {
        self.edges(g).into_iter().map(|e| g.aug_edge_label(e)).collect()
    }
}

/// `P_𝒯(T) = weight(T) / det(M_λ − C)`.
pub fn tree_probability(g: &WeightedGraph, t: &RootedSpanningTree) -> Result<f64> {
    // Re-validate: trees may come from another graph with the same vertex count.
    let t = RootedSpanningTree::from_parents(g, t.parents().to_vec())?;
    Ok(t.weight(g) / g.det())
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
}

/// All rooted spanning trees with their weights, in lexicographic order of
/// their augmented edge sets.
pub fn enumerate_rooted_trees(g: &WeightedGraph) -> Result<Vec<(RootedSpanningTree, f64)>> {
    let aug = g.augmented_edges();
    if aug.len() > ENUMERATION_EDGE_LIMIT {
        return Err(Error::TooLarge(format!(
            "{} augmented edges exceed the enumeration limit of {ENUMERATION_EDGE_LIMIT}",
            aug.len()
        )));
    }
    let n = g.len();
    let ends: Vec<(usize, usize)> = aug
        .iter()
        .map(|&e| match e {
            AugEdge::Conductance(i) => (g.edges()[i].u, g.edges()[i].v),
            AugEdge::Killing(x) => (x, n),
        })
        .collect();

    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(n);
    fn recurse(
        start: usize,
        need: usize,
        dsu: &Dsu,
        ends: &[(usize, usize)],
        aug: &[AugEdge],
        chosen: &mut Vec<AugEdge>,
        out: &mut Vec<Vec<AugEdge>>,
    ) {
        if need == 0 {
            out.push(chosen.clone());
            return;
        }
        for i in start..=ends.len().saturating_sub(need) {
            let mut next = Dsu(dsu.0.clone());
            let (a, b) = (next.find(ends[i].0), next.find(ends[i].1));
            if a == b {
                continue;
            }
            next.0[a] = b;
            chosen.push(aug[i]);
            recurse(i + 1, need - 1, &next, ends, aug, chosen, out);
            chosen.pop();
        }
    }
    let mut sets = Vec::new();
    recurse(0, n, &Dsu((0..=n).collect()), &ends, &aug, &mut chosen, &mut sets);
    out.extend(sets.into_iter().map(|edges| {
        let t = RootedSpanningTree::from_edges(g, &edges).expect("acyclic n-edge set spans");
        let w = t.weight(g);
        (t, w)
    }));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::graph::{EdgeSpec, GraphSpec};

    #[test]
    fn enumeration_examples() {
        let trees = enumerate_rooted_trees(&g1()).unwrap();
        assert_eq!(trees.len(), 1);
        assert_eq!(trees[0].0.edges(&g1()), vec![AugEdge::Killing(0)]);
        assert_eq!(trees[0].1, 1.0);

        let g = g2();
        let trees = enumerate_rooted_trees(&g).unwrap();
        assert_eq!(trees.len(), 3);
        for (t, w) in &trees {
            assert_eq!(*w, 1.0);
            assert!((tree_probability(&g, t).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        }

        let g = g3();
        let trees = enumerate_rooted_trees(&g).unwrap();
        assert_eq!(trees.len(), 16);
        let total: f64 = trees.iter().map(|(_, w)| w).sum();
        assert!((total - 16.0).abs() < 1e-10);
        for (t, _) in &trees {
            assert!((tree_probability(&g, t).unwrap() - 1.0 / 16.0).abs() < 1e-12);
        }
    }

    #[test]
    fn matrix_tree_on_weighted_graph() {
        let spec = GraphSpec {
            vertices: ["a", "b", "c", "d"].map(String::from).to_vec(),
            edges: vec![
                EdgeSpec { u: "a".into(), v: "b".into(), c: 0.7 },
                EdgeSpec { u: "b".into(), v: "c".into(), c: 2.5 },
                EdgeSpec { u: "c".into(), v: "d".into(), c: 1.3 },
                EdgeSpec { u: "d".into(), v: "a".into(), c: 0.4 },
                EdgeSpec { u: "a".into(), v: "c".into(), c: 1.9 },
            ],
            killing: [("a".to_string(), 0.5), ("d".to_string(), 1.1)].into_iter().collect(),
        };
        let g = WeightedGraph::build(&spec).unwrap();
        let total: f64 = enumerate_rooted_trees(&g).unwrap().iter().map(|(_, w)| w).sum();
        assert!((total - g.det()).abs() <= 1e-10 * g.det());
    }

    #[test]
    fn enumeration_guard() {
        let n = 8;
        let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push(EdgeSpec { u: names[i].clone(), v: names[j].clone(), c: 1.0 });
            }
        }
        let spec = GraphSpec { vertices: names.clone(), edges, killing: [(names[0].clone(), 1.0)].into_iter().collect() };
        let g = WeightedGraph::build(&spec).unwrap();
        assert!(matches!(enumerate_rooted_trees(&g), Err(Error::TooLarge(_))));
    }

    #[test]
    fn invalid_trees_rejected() {
        let g = g3();
        // Two edges only.
        assert!(RootedSpanningTree::from_edges(&g, &[AugEdge::Killing(0), AugEdge::Conductance(0)]).is_err());
        // Cycle a-b-c plus nothing at the root.
        let cyc = [AugEdge::Conductance(0), AugEdge::Conductance(1), AugEdge::Conductance(2)];
        assert!(RootedSpanningTree::from_edges(&g, &cyc).is_err());
        assert!(RootedSpanningTree::from_parents(&g, vec![Parent::Vertex(1), Parent::Vertex(0), Parent::Root]).is_err());
        let t = RootedSpanningTree::from_parents(&g, vec![Parent::Root, Parent::Vertex(0), Parent::Vertex(1)]).unwrap();
        assert!(t.contains(&g, AugEdge::Conductance(0)));
        assert!(t.contains(&g, AugEdge::Conductance(1)));
        assert!(!t.contains(&g, AugEdge::Conductance(2)));
        assert!(tree_probability(&g2(), &t).is_err());
    }
}
