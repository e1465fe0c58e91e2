//! Group-valued connections on the conductance edges, gauge classes and
//! holonomy of loops.

mod cover;
mod phi;
mod random;

pub use cover::{build_cover, lift_trivial_loops, project_cover_soup, Cover};
pub use phi::{gibbs_nu_phi, nu_phi_tree_marginal, PhiBlockUpdate, PhiChain, PhiState};
pub use random::{
    gamma_tree_class_probability, nu_phi_weight, sample_gamma_tree_connection, tree_assignments, z_phi_iota,
    z_phi_monte_carlo, GroupDistribution, ZPhiArbitration, ZPhiReading, ZPhiSums, ASSIGNMENT_LIMIT,
};

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{OrientedEdge, WeightedGraph};
use crate::group::{ConjClass, FiniteGroup};
use crate::loops::{Loop, LoopEnsemble};
use crate::tree::{Parent, RootedSpanningTree};

/// A connection: one group element per conductance edge, read in the edge's
/// forward orientation `u → v`; the reverse orientation carries the inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConnectionRep {
    values: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConnectionSpec {
    pub edges: Vec<ConnectionEdgeSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConnectionEdgeSpec {
    pub u: String,
    pub v: String,
    pub g: usize,
}

impl ConnectionRep {
    pub fn trivial(g: &WeightedGraph, group: &FiniteGroup) -> Self {
        ConnectionRep { values: vec![group.identity(); g.edges().len()] }
    }

    /// Values per edge in forward orientation.
    pub fn from_values(g: &WeightedGraph, group: &FiniteGroup, values: Vec<usize>) -> Result<Self> {
        if values.len() != g.edges().len() {
            return Err(Error::Domain(format!(
                "connection has {} values, graph has {} edges",
                values.len(),
                g.edges().len()
            )));
        }
        if let Some(v) = values.iter().find(|&&v| v >= group.order()) {
            return Err(Error::Domain(format!("group element {v} out of range")));
        }
        Ok(ConnectionRep { values })
    }

    /// Reads `{"edges":[{"u":..,"v":..,"g":..}]}`; unlisted edges get the identity.
    pub fn from_spec(g: &WeightedGraph, group: &FiniteGroup, spec: &ConnectionSpec) -> Result<Self> {
        let mut m = Self::trivial(g, group);
        let mut seen = vec![false; g.edges().len()];
        for e in &spec.edges {
            let oe = g.oriented_by_name(&e.u, &e.v)?;
            if e.g >= group.order() {
                return Err(Error::Domain(format!("group element {} out of range", e.g)));
            }
            if std::mem::replace(&mut seen[oe.edge], true) {
                return Err(Error::Parse(format!("edge {}-{} listed twice", e.u, e.v)));
            }
            m.set(group, oe, e.g);
        }
        Ok(m)
    }

    pub fn from_json(g: &WeightedGraph, group: &FiniteGroup, text: &str) -> Result<Self> {
        Self::from_spec(g, group, &serde_json::from_str(text)?)
    }

    pub fn to_spec(&self, g: &WeightedGraph) -> ConnectionSpec {
        ConnectionSpec {
            edges: g
                .edges()
                .iter()
                .zip(&self.values)
                .map(|(e, &v)| ConnectionEdgeSpec { u: g.name(e.u).to_string(), v: g.name(e.v).to_string(), g: v })
                .collect(),
        }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn get(&self, group: &FiniteGroup, oe: OrientedEdge) -> usize {
        let v = self.values[oe.edge];
        if oe.forward {
            v
        } else {
            group.inv(v)
        }
    }

    pub fn set(&mut self, group: &FiniteGroup, oe: OrientedEdge, value: usize) {
        self.values[oe.edge] = if oe.forward { value } else { group.inv(value) };
    }

    /// `m_{(x,y)}`; panics if `x` and `y` are not adjacent.
    pub fn between(&self, g: &WeightedGraph, group: &FiniteGroup, x: usize, y: usize) -> usize {
        self.get(group, g.oriented(x, y).expect("adjacent vertices"))
    }

    pub fn is_trivial(&self, group: &FiniteGroup) -> bool {
        self.values.iter().all(|&v| v == group.identity())
    }
}

/// `m'_{(x,y)} = h_x · m_{(x,y)} · h_y⁻¹`.
pub fn gauge_transform(g: &WeightedGraph, group: &FiniteGroup, m: &ConnectionRep, h: &[usize]) -> Result<ConnectionRep> {
    g.check_vertex_fn(h.len())?;
    if let Some(v) = h.iter().find(|&&v| v >= group.order()) {
        return Err(Error::Domain(format!("group element {v} out of range")));
    }
    let values = g
        .edges()
        .iter()
        .zip(&m.values)
        .map(|(e, &v)| group.mul(group.mul(h[e.u], v), group.inv(h[e.v])))
        .collect();
    Ok(ConnectionRep { values })
}

/// Ordered product of `m` along a closed vertex sequence, starting at its first vertex.
pub fn holonomy_element(g: &WeightedGraph, group: &FiniteGroup, m: &ConnectionRep, cycle: &[usize]) -> usize {
    let k = cycle.len();
    (0..k).fold(group.identity(), |acc, i| group.mul(acc, m.between(g, group, cycle[i], cycle[(i + 1) % k])))
}

/// `H_A(l)`: the conjugacy class of the product of `m` around the loop.
pub fn holonomy(g: &WeightedGraph, group: &FiniteGroup, m: &ConnectionRep, l: &Loop) -> ConjClass {
    group.class_of(holonomy_element(g, group, m, l.skeleton()))
}

/// Whether every nontrivial loop of the ensemble has trivial holonomy.
pub fn all_loops_trivial(g: &WeightedGraph, group: &FiniteGroup, m: &ConnectionRep, ens: &LoopEnsemble) -> bool {
    ens.loops.iter().all(|l| holonomy_element(g, group, m, l.skeleton()) == group.identity())
}

/// The cyclically reduced vertex word of a loop: backtracks `x → y → x` are
/// removed repeatedly, including across the base point. Empty iff the loop is
/// contractible.
pub fn geodesic_reduce(g: &WeightedGraph, l: &Loop) -> Vec<usize> {
    let mut stack: Vec<OrientedEdge> = Vec::with_capacity(l.len());
    for oe in l.steps(g) {
        if stack.last() == Some(&oe.reversed()) {
            stack.pop();
        } else {
            stack.push(oe);
        }
    }
    let (mut lo, mut hi) = (0, stack.len());
    while hi - lo >= 2 && stack[hi - 1] == stack[lo].reversed() {
        lo += 1;
        hi -= 1;
    }
    stack[lo..hi].iter().map(|&oe| g.endpoints(oe).0).collect()
}

/// Gauge map `h` with `h = ι` at forest roots and `h_x m_{(x,p)} h_p⁻¹ = ι`
/// along every forest edge `x → p`. `order` lists vertices parents-first.
fn forest_gauge(
    g: &WeightedGraph,
    group: &FiniteGroup,
    m: &ConnectionRep,
    parent: &[Option<usize>],
    order: &[usize],
) -> Vec<usize> {
    let mut h = vec![group.identity(); g.len()];
    for &x in order {
        if let Some(p) = parent[x] {
            h[x] = group.mul(h[p], m.between(g, group, p, x));
        }
    }
    h
}

fn parents_first(parent: &[Option<usize>]) -> Vec<usize> {
    let n = parent.len();
    let mut children = vec![Vec::new(); n];
    let mut queue = VecDeque::new();
    for (x, p) in parent.iter().enumerate() {
        match p {
            Some(p) => children[*p].push(x),
            None => queue.push_back(x),
        }
    }
    let mut order = Vec::with_capacity(n);
    while let Some(x) = queue.pop_front() {
        order.push(x);
        queue.extend(children[x].iter().copied());
    }
    order
}

/// The gauge-equivalent representative with `ι` on every conductance edge of
/// `t`, together with the gauge map `h` that produces it. Vertices attached to
/// the root get `h = ι`.
pub fn t_reduce(
    g: &WeightedGraph,
    group: &FiniteGroup,
    m: &ConnectionRep,
    t: &RootedSpanningTree,
) -> Result<(ConnectionRep, Vec<usize>)> {
    if t.parents().len() != g.len() {
        return Err(Error::InvalidTree("tree does not match the graph".into()));
    }
    let parent: Vec<Option<usize>> = t
        .parents()
        .iter()
        .map(|p| match p {
            Parent::Root => None,
            Parent::Vertex(y) => Some(*y),
        })
        .collect();
    let h = forest_gauge(g, group, m, &parent, &parents_first(&parent));
    Ok((gauge_transform(g, group, m, &h)?, h))
}

/// A breadth-first spanning forest of the conductance graph rooted at the
/// smallest vertex of each component.
fn reference_forest(g: &WeightedGraph) -> (Vec<Option<usize>>, Vec<usize>, Vec<usize>) {
    let n = g.len();
    let mut parent = vec![None; n];
    let mut component = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut count = 0;
    for root in 0..n {
        if component[root] != usize::MAX {
            continue;
        }
        component[root] = count;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &(y, _) in g.neighbors(x) {
                if component[y] == usize::MAX {
                    component[y] = count;
                    parent[y] = Some(x);
                    queue.push_back(y);
                }
            }
        }
        count += 1;
    }
    (parent, order, component)
}

/// Canonical representative of the gauge class of `m`: reduce along a fixed
/// reference forest, then pick the lexicographically smallest conjugate on
/// each connected component.
pub fn canonical_form(g: &WeightedGraph, group: &FiniteGroup, m: &ConnectionRep) -> ConnectionRep {
    let (parent, order, component) = reference_forest(g);
    let h = forest_gauge(g, group, m, &parent, &order);
    let reduced = gauge_transform(g, group, m, &h).expect("gauge map on every vertex");
    let mut by_component: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, e) in g.edges().iter().enumerate() {
        by_component.entry(component[e.u]).or_default().push(i);
    }
    let mut values = reduced.values.clone();
    for edges in by_component.values() {
        let best = (0..group.order())
            .map(|k| edges.iter().map(|&i| group.conjugate(k, reduced.values[i])).collect::<Vec<_>>())
            .min()
            .expect("nonempty group");
        for (&i, v) in edges.iter().zip(best) {
            values[i] = v;
        }
    }
    ConnectionRep { values }
}

pub fn gauge_equivalent(g: &WeightedGraph, group: &FiniteGroup, a: &ConnectionRep, b: &ConnectionRep) -> bool {
    canonical_form(g, group, a) == canonical_form(g, group, b)
}

fn check_z2(group: &FiniteGroup) -> Result<usize> {
    if group.order() != 2 {
        return Err(Error::InvalidGroup(format!("expected a group of order 2, got order {}", group.order())));
    }
    Ok(1 - group.identity())
}

/// The ℤ/2 connection that flips exactly the edges of `open`.
pub fn z2_connection(g: &WeightedGraph, group: &FiniteGroup, open: &[bool]) -> Result<ConnectionRep> {
    let flip = check_z2(group)?;
    if open.len() != g.edges().len() {
        return Err(Error::Domain("edge subset does not match the graph".into()));
    }
    Ok(ConnectionRep { values: open.iter().map(|&o| if o { flip } else { group.identity() }).collect() })
}

/// The edge subset (percolation configuration) of a ℤ/2 connection.
pub fn z2_edge_set(group: &FiniteGroup, m: &ConnectionRep) -> Result<Vec<bool>> {
    let flip = check_z2(group)?;
    Ok(m.values.iter().map(|&v| v == flip).collect())
}
