//! Weighted graphs with a killing measure, the associated energy form and
//! Green function.
//!
//! Vertices are indexed in input order and every matrix produced here uses
//! that order. The root is implicit: vertex `x` is joined to it whenever
//! `killing[x] > 0`.

use std::collections::{BTreeMap, HashMap, VecDeque};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Display name of the root vertex in files and reports.
pub const ROOT_NAME: &str = "Δ";

/// An undirected conductance edge; `u < v` in vertex order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub conductance: f64,
}

/// An edge of the conductance graph traversed in a given direction.
///
/// The dense id `2 * edge + (!forward as usize)` indexes [`EdgeTilt`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientedEdge {
    pub edge: usize,
    pub forward: bool,
}

impl OrientedEdge {
    pub fn id(self) -> usize {
        2 * self.edge + usize::from(!self.forward)
    }

    pub fn reversed(self) -> Self {
        OrientedEdge { edge: self.edge, forward: !self.forward }
    }
}

/// An edge of the augmented graph on `X ∪ {Δ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AugEdge {
    /// Index into [`WeightedGraph::edges`].
    Conductance(usize),
    /// The edge `{x, Δ}`.
    Killing(usize),
}

/// On-disk graph description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub edges: Vec<EdgeSpec>,
    #[serde(default)]
    pub killing: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub u: String,
    pub v: String,
    pub c: f64,
}

#[derive(Debug, Clone)]
pub struct WeightedGraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
    edge_lookup: HashMap<(usize, usize), usize>,
    /// `(neighbor, edge id)` per vertex, in edge order.
    adjacency: Vec<Vec<(usize, usize)>>,
    killing: Vec<f64>,
    lambda: Vec<f64>,
}

impl WeightedGraph {
    /// Validates a description and builds the graph.
    pub fn build(spec: &GraphSpec) -> Result<Self> {
        if spec.vertices.is_empty() {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        let mut index = HashMap::new();
        for (i, name) in spec.vertices.iter().enumerate() {
            if name == ROOT_NAME {
                return Err(Error::InvalidGraph(format!("vertex name `{ROOT_NAME}` is reserved for the root")));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate vertex `{name}`")));
            }
        }
        let lookup = |name: &str| index.get(name).copied().ok_or_else(|| Error::UnknownVertex(name.to_string()));

        let n = spec.vertices.len();
        let mut edges = Vec::with_capacity(spec.edges.len());
        let mut edge_lookup = HashMap::new();
        let mut adjacency = vec![Vec::new(); n];
        for e in &spec.edges {
            let (a, b) = (lookup(&e.u)?, lookup(&e.v)?);
            if a == b {
                return Err(Error::InvalidGraph(format!("self-edge at `{}`", e.u)));
            }
            if !(e.c.is_finite() && e.c > 0.0) {
                return Err(Error::InvalidGraph(format!("conductance {}-{} must be positive, got {}", e.u, e.v, e.c)));
            }
            let (u, v) = (a.min(b), a.max(b));
            if edge_lookup.insert((u, v), edges.len()).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate edge {}-{}", e.u, e.v)));
            }
            adjacency[u].push((v, edges.len()));
            adjacency[v].push((u, edges.len()));
            edges.push(Edge { u, v, conductance: e.c });
        }

        let mut killing = vec![0.0; n];
        for (name, &k) in &spec.killing {
            let x = lookup(name)?;
            if !(k.is_finite() && k >= 0.0) {
                return Err(Error::InvalidGraph(format!("killing at `{name}` must be non-negative, got {k}")));
            }
            killing[x] = k;
        }

        let mut lambda = killing.clone();
        for e in &edges {
            lambda[e.u] += e.conductance;
            lambda[e.v] += e.conductance;
        }

        let g = WeightedGraph { names: spec.vertices.clone(), index, edges, edge_lookup, adjacency, killing, lambda };
        g.check_connected()?;
        Ok(g)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: GraphSpec = serde_json::from_str(text)?;
        Self::build(&spec)
    }

    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            vertices: self.names.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeSpec { u: self.names[e.u].clone(), v: self.names[e.v].clone(), c: e.conductance })
                .collect(),
            killing: self
                .killing
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0.0)
                .map(|(x, &k)| (self.names[x].clone(), k))
                .collect(),
        }
    }

    // Every vertex must reach the root through the augmented graph.
    fn check_connected(&self) -> Result<()> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut queue: VecDeque<usize> = (0..n).filter(|&x| self.killing[x] > 0.0).collect();
        for &x in &queue {
            seen[x] = true;
        }
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &self.adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            None => Ok(()),
            Some(x) => Err(Error::InvalidGraph(format!(
                "augmented graph is disconnected: `{}` cannot reach the root",
                self.names[x]
            ))),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, x: usize) -> &[(usize, usize)] {
        &self.adjacency[x]
    }

    pub fn killing(&self) -> &[f64] {
        &self.killing
    }

    /// Total jump rates `λ_x = Σ_y C_{x,y} + κ_x`.
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn edge_between(&self, x: usize, y: usize) -> Option<usize> {
        self.edge_lookup.get(&(x.min(y), x.max(y))).copied()
    }

    pub fn conductance(&self, x: usize, y: usize) -> f64 {
        self.edge_between(x, y).map_or(0.0, |e| self.edges[e].conductance)
    }

    pub fn oriented(&self, x: usize, y: usize) -> Option<OrientedEdge> {
        self.edge_between(x, y).map(|edge| OrientedEdge { edge, forward: x < y })
    }

    pub fn oriented_by_name(&self, x: &str, y: &str) -> Result<OrientedEdge> {
        let (a, b) = (self.vertex(x)?, self.vertex(y)?);
        self.oriented(a, b).ok_or_else(|| Error::UnknownEdge(x.to_string(), y.to_string()))
    }

    pub fn endpoints(&self, e: OrientedEdge) -> (usize, usize) {
        let edge = &self.edges[e.edge];
        if e.forward {
            (edge.u, edge.v)
        } else {
            (edge.v, edge.u)
        }
    }

    pub fn oriented_edges(&self) -> impl Iterator<Item = OrientedEdge> + '_ {
        (0..self.edges.len()).flat_map(|edge| [true, false].map(|forward| OrientedEdge { edge, forward }))
    }

    /// Edges of the augmented graph: conductance edges first, then killing
    /// edges `{x, Δ}` with `κ_x > 0`.
    pub fn augmented_edges(&self) -> Vec<AugEdge> {
        (0..self.edges.len())
            .map(AugEdge::Conductance)
            .chain((0..self.len()).filter(|&x| self.killing[x] > 0.0).map(AugEdge::Killing))
            .collect()
    }

    pub fn aug_edge_weight(&self, e: AugEdge) -> f64 {
        match e {
            AugEdge::Conductance(i) => self.edges[i].conductance,
            AugEdge::Killing(x) => self.killing[x],
        }
    }

    pub fn aug_edge_label(&self, e: AugEdge) -> String {
        match e {
            AugEdge::Conductance(i) => format!("{}-{}", self.names[self.edges[i].u], self.names[self.edges[i].v]),
            AugEdge::Killing(x) => format!("{}-{}", self.names[x], ROOT_NAME),
        }
    }

    /// Parses `"u-v"`; `"x-Δ"` names a killing edge.
    pub fn parse_aug_edge(&self, label: &str) -> Result<AugEdge> {
        let (a, b) = label.split_once('-').ok_or_else(|| Error::Parse(format!("bad edge label `{label}`")))?;
        if b == ROOT_NAME || a == ROOT_NAME {
            let x = self.vertex(if a == ROOT_NAME { b } else { a })?;
            if self.killing[x] > 0.0 {
                return Ok(AugEdge::Killing(x));
            }
            return Err(Error::UnknownEdge(a.to_string(), b.to_string()));
        }
        let (x, y) = (self.vertex(a)?, self.vertex(b)?);
        self.edge_between(x, y)
            .map(AugEdge::Conductance)
            .ok_or_else(|| Error::UnknownEdge(a.to_string(), b.to_string()))
    }

    /// Dense `M_λ − C`.
    pub fn energy_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.lambda));
        for e in &self.edges {
            m[(e.u, e.v)] -= e.conductance;
            m[(e.v, e.u)] -= e.conductance;
        }
        debug_assert_eq!(m.nrows(), n);
        m
    }

    /// Dense `M_{λ+χ} − C∘q`, with `(C∘q)_{x,y} = C_{x,y} q_{(x,y)}`.
    pub fn tilted_energy_matrix(&self, chi: &[f64], q: &EdgeTilt) -> DMatrix<Complex64> {
        let n = self.len();
        let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for x in 0..n {
            m[(x, x)] = Complex64::new(self.lambda[x] + chi[x], 0.0);
        }
        for oe in self.oriented_edges() {
            let (x, y) = self.endpoints(oe);
            m[(x, y)] -= q.get(oe) * self.edges[oe.edge].conductance;
        }
        m
    }

    /// `𝔈(f, h) = ½ Σ C_{x,y}(f(x)−f(y))(h̄(x)−h̄(y)) + Σ κ_x f(x) h̄(x)`.
    pub fn energy_form(&self, f: &[Complex64], h: &[Complex64]) -> Result<Complex64> {
        self.check_vertex_fn(f.len())?;
        self.check_vertex_fn(h.len())?;
        // The half-sum over ordered pairs equals one sum over undirected edges.
        let mut total: Complex64 = self
            .edges
            .iter()
            .map(|e| (f[e.u] - f[e.v]) * (h[e.u] - h[e.v]).conj() * e.conductance)
            .sum();
        for x in 0..self.len() {
            total += f[x] * h[x].conj() * self.killing[x];
        }
        Ok(total)
    }

    /// `G = (M_λ − C)^{-1}`.
    pub fn green(&self) -> Result<DMatrix<f64>> {
        self.energy_matrix()
            .try_inverse()
            .ok_or_else(|| Error::Singular(format!("M_λ − C on {} vertices", self.len())))
    }

    /// `det(M_{λ+χ} − C∘q)`.
    pub fn det_energy(&self, chi: &[f64], q: &EdgeTilt) -> Result<Complex64> {
        self.check_chi(chi)?;
        q.check(self)?;
        Ok(self.tilted_energy_matrix(chi, q).determinant())
    }

    /// `det(M_λ − C)`, the total matrix-tree weight.
    pub fn det(&self) -> f64 {
        self.energy_matrix().determinant()
    }

    pub(crate) fn check_vertex_fn(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::Domain(format!("vertex function has {len} values, graph has {} vertices", self.len())));
        }
        Ok(())
    }

    pub(crate) fn check_chi(&self, chi: &[f64]) -> Result<()> {
        self.check_vertex_fn(chi.len())?;
        if let Some(x) = chi.iter().position(|&c| !(c.is_finite() && c >= 0.0)) {
            return Err(Error::Domain(format!("χ at `{}` must be non-negative, got {}", self.names[x], chi[x])));
        }
        Ok(())
    }

    pub fn zeros(&self) -> Vec<f64> {
        vec![0.0; self.len()]
    }
}

/// A complex function on oriented conductance edges (the tilt `q`).
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeTilt(Vec<Complex64>);

impl EdgeTilt {
    pub fn constant(g: &WeightedGraph, q: impl Into<Complex64>) -> Self {
        EdgeTilt(vec![q.into(); 2 * g.edges().len()])
    }

    pub fn ones(g: &WeightedGraph) -> Self {
        Self::constant(g, 1.0)
    }

    /// Builds `q_{(x,y)} = f(x, y)` in vertex indices.
    pub fn from_fn(g: &WeightedGraph, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); 2 * g.edges().len()];
        for oe in g.oriented_edges() {
            let (x, y) = g.endpoints(oe);
            values[oe.id()] = f(x, y);
        }
        EdgeTilt(values)
    }

    /// Real tilt per undirected edge, the same in both directions.
    pub fn symmetric(scale: &[f64]) -> Self {
        EdgeTilt(scale.iter().flat_map(|&s| [Complex64::new(s, 0.0); 2]).collect())
    }

    pub fn get(&self, e: OrientedEdge) -> Complex64 {
        self.0[e.id()]
    }

    pub fn set(&mut self, e: OrientedEdge, value: impl Into<Complex64>) {
        self.0[e.id()] = value.into();
    }

    pub fn values(&self) -> &[Complex64] {
        &self.0
    }

    pub fn is_identically_one(&self) -> bool {
        self.0.iter().all(|&v| v == Complex64::new(1.0, 0.0))
    }

    pub fn check(&self, g: &WeightedGraph) -> Result<()> {
        if self.0.len() != 2 * g.edges().len() {
            return Err(Error::Domain(format!(
                "tilt has {} values, graph has {} oriented edges",
                self.0.len(),
                2 * g.edges().len()
            )));
        }
        for oe in g.oriented_edges() {
            let v = self.get(oe);
            if v.norm().is_nan() || v.norm() > 1.0 + 1e-12 {
                let (x, y) = g.endpoints(oe);
                return Err(Error::Domain(format!("|q({},{})| = {} exceeds 1", g.name(x), g.name(y), v.norm())));
            }
        }
        Ok(())
    }
}

/// A real function on the augmented edges (the `b`, `c` of tree pairings).
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeights {
    pub conductance: Vec<f64>,
    pub killing: Vec<f64>,
}

impl EdgeWeights {
    pub fn constant(g: &WeightedGraph, value: f64) -> Self {
        EdgeWeights { conductance: vec![value; g.edges().len()], killing: vec![value; g.len()] }
    }

    pub fn ones(g: &WeightedGraph) -> Self {
        Self::constant(g, 1.0)
    }

    pub fn get(&self, e: AugEdge) -> f64 {
        match e {
            AugEdge::Conductance(i) => self.conductance[i],
            AugEdge::Killing(x) => self.killing[x],
        }
    }

    pub fn set(&mut self, e: AugEdge, value: f64) {
        match e {
            AugEdge::Conductance(i) => self.conductance[i] = value,
            AugEdge::Killing(x) => self.killing[x] = value,
        }
    }

    pub fn is_identically_one(&self) -> bool {
        self.conductance.iter().chain(&self.killing).all(|&v| v == 1.0)
    }
}

/// The reference graphs used by the verification suites: a single vertex,
/// an edge and a triangle, every conductance and killing rate equal to 1.
pub mod fixtures {
    use super::*;

    pub const G1_JSON: &str = include_str!("../fixtures/g1.json");
    pub const G2_JSON: &str = include_str!("../fixtures/g2.json");
    pub const G3_JSON: &str = include_str!("../fixtures/g3.json");

    pub fn g1() -> WeightedGraph {
        WeightedGraph::from_json(G1_JSON).expect("valid fixture")
    }
    pub fn g2() -> WeightedGraph {
        WeightedGraph::from_json(G2_JSON).expect("valid fixture")
    }
    pub fn g3() -> WeightedGraph {
        WeightedGraph::from_json(G3_JSON).expect("valid fixture")
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn lambda_on_fixtures() {
        assert_eq!(g1().lambda(), &[1.0]);
        assert_eq!(g2().lambda(), &[2.0, 2.0]);
        assert_eq!(g3().lambda(), &[3.0, 3.0, 3.0]);
    }

    #[test]
    fn build_rejects_bad_input() {
        let bad = [
            r#"{"vertices":["a","b"],"edges":[{"u":"a","v":"b","c":0.0}],"killing":{"a":1}}"#,
            r#"{"vertices":["a","b"],"edges":[{"u":"a","v":"b","c":1.0}],"killing":{"a":-1}}"#,
            r#"{"vertices":["a","b"],"edges":[],"killing":{"a":1}}"#,
            r#"{"vertices":["a"],"edges":[{"u":"a","v":"z","c":1.0}],"killing":{"a":1}}"#,
            r#"{"vertices":["a"],"edges":[{"u":"a","v":"a","c":1.0}],"killing":{"a":1}}"#,
            r#"{"vertices":["a","b"],"edges":[{"u":"a","v":"b","c":1},{"u":"b","v":"a","c":2}],"killing":{"a":1}}"#,
            r#"{"vertices":["a"],"killing":{"q":1}}"#,
            r#"{"vertices":["a"],"killing":{}}"#,
        ];
        for text in bad {
            assert!(WeightedGraph::from_json(text).is_err(), "accepted {text}");
        }
    }

    #[test]
    fn unlisted_killing_defaults_to_zero() {
        let g = WeightedGraph::from_json(r#"{"vertices":["a","b"],"edges":[{"u":"a","v":"b","c":2}],"killing":{"a":1}}"#)
            .unwrap();
        assert_eq!(g.killing(), &[1.0, 0.0]);
        assert_eq!(g.lambda(), &[3.0, 2.0]);
    }

    #[test]
    fn energy_form_examples() {
        assert_eq!(g1().energy_form(&[c(1.0)], &[c(1.0)]).unwrap(), c(1.0));
        assert_eq!(g2().energy_form(&[c(1.0), c(0.0)], &[c(1.0), c(0.0)]).unwrap(), c(2.0));
        let g = g3();
        assert_eq!(g.energy_form(&[c(0.0); 3], &[c(0.0); 3]).unwrap(), c(0.0));
        assert!(g.energy_form(&[c(0.0); 2], &[c(0.0); 3]).is_err());
    }

    #[test]
    fn green_examples() {
        let g = g1().green().unwrap();
        assert!(close(g[(0, 0)], 1.0, 1e-12));

        let g = g2().green().unwrap();
        for (x, y, want) in [(0, 0, 2.0 / 3.0), (0, 1, 1.0 / 3.0), (1, 0, 1.0 / 3.0), (1, 1, 2.0 / 3.0)] {
            assert!(close(g[(x, y)], want, 1e-12));
        }

        let g = g3().green().unwrap();
        for x in 0..3 {
            for y in 0..3 {
                assert!(close(g[(x, y)], if x == y { 0.5 } else { 0.25 }, 1e-12));
            }
        }
    }

    #[test]
    fn det_energy_examples() {
        let g = g2();
        assert!(close(g.det_energy(&g.zeros(), &EdgeTilt::ones(&g)).unwrap().re, 3.0, 1e-12));
        assert!(close(g.det_energy(&g.zeros(), &EdgeTilt::constant(&g, 0.0)).unwrap().re, 4.0, 1e-12));
        let g = g1();
        assert!(close(g.det_energy(&[1.0], &EdgeTilt::ones(&g)).unwrap().re, 2.0, 1e-12));
    }

    #[test]
    fn det_energy_domain_checks() {
        let g = g2();
        assert!(g.det_energy(&[-0.1, 0.0], &EdgeTilt::ones(&g)).is_err());
        assert!(g.det_energy(&g.zeros(), &EdgeTilt::constant(&g, 1.5)).is_err());
        assert!(g.det_energy(&g.zeros(), &EdgeTilt::constant(&g, Complex64::new(0.8, 0.8))).is_err());
    }

    #[test]
    fn reproducing_property() {
        for g in [g1(), g2(), g3()] {
            let green = g.green().unwrap();
            let n = g.len();
            for x in 0..n {
                for y in 0..n {
                    let gx: Vec<_> = (0..n).map(|z| c(green[(x, z)])).collect();
                    let gy: Vec<_> = (0..n).map(|z| c(green[(y, z)])).collect();
                    let e = g.energy_form(&gx, &gy).unwrap();
                    assert!((e.re - green[(x, y)]).abs() < 1e-10 && e.im.abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn det_energy_increases_with_chi() {
        for g in [g1(), g2(), g3()] {
            let q = EdgeTilt::constant(&g, 0.6);
            for x in 0..g.len() {
                let mut chi = vec![0.3; g.len()];
                let lo = g.det_energy(&chi, &q).unwrap().re;
                chi[x] += 1e-3;
                let hi = g.det_energy(&chi, &q).unwrap().re;
                assert!(hi > lo, "det not increasing in χ at {x}");
            }
        }
    }

    #[test]
    fn aug_edge_labels_round_trip() {
        let g = g3();
        for e in g.augmented_edges() {
            assert_eq!(g.parse_aug_edge(&g.aug_edge_label(e)).unwrap(), e);
        }
        assert!(g.parse_aug_edge("a-z").is_err());
    }

    fn random_graph() -> impl Strategy<Value = GraphSpec> {
        (2usize..7).prop_flat_map(|n| {
            (
                proptest::collection::vec(proptest::option::of(0.1f64..3.0), n * (n - 1) / 2),
                proptest::collection::vec(0.05f64..2.0, n),
            )
                .prop_map(move |(pairs, kill)| {
                    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
                    let mut edges = Vec::new();
                    let mut k = 0;
                    for i in 0..n {
                        for j in i + 1..n {
                            if let Some(c) = pairs[k] {
                                edges.push(EdgeSpec { u: names[i].clone(), v: names[j].clone(), c });
                            }
                            k += 1;
                        }
                    }
                    let killing = names.iter().cloned().zip(kill).collect();
                    GraphSpec { vertices: names, edges, killing }
                })
        })
    }

    proptest! {
        #[test]
        fn green_is_symmetric_positive_definite(spec in random_graph()) {
            let g = WeightedGraph::build(&spec).unwrap();
            let green = g.green().unwrap();
            prop_assert!((&green - green.transpose()).abs().max() < 1e-10);
            let eig = green.symmetric_eigenvalues();
            prop_assert!(eig.iter().all(|&v| v > 0.0));
        }
    }
}
