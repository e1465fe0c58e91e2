//! The `|M|`-fold cover defined by a connection, and moving loops between
//! the cover and the base graph.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::{holonomy_element, ConnectionRep};
use crate::error::{Error, Result};
use crate::graph::{EdgeSpec, EdgeTilt, GraphSpec, WeightedGraph};
use crate::group::FiniteGroup;
use crate::loops::{Loop, LoopEnsemble};

/// The cover graph on `X × M`; vertex `(x, i)` has index `x·|M| + i` and name `x@i`.
#[derive(Debug, Clone)]
pub struct Cover {
    graph: WeightedGraph,
    base_len: usize,
    order: usize,
}

impl Cover {
    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn vertex(&self, x: usize, i: usize) -> usize {
        x * self.order + i
    }

    /// `(x, i)` for a cover vertex.
    pub fn base(&self, v: usize) -> (usize, usize) {
        (v / self.order, v % self.order)
    }

    pub fn base_len(&self) -> usize {
        self.base_len
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `q̃_{(x,i),(y,j)} = q_{(x,y)}`.
    pub fn lift_tilt(&self, g: &WeightedGraph, q: &EdgeTilt) -> EdgeTilt {
        EdgeTilt::from_fn(&self.graph, |a, b| {
            let (x, y) = (self.base(a).0, self.base(b).0);
            q.get(g.oriented(x, y).expect("cover edge over a base edge"))
        })
    }

    pub fn lift_chi(&self, chi: &[f64]) -> Vec<f64> {
        chi.iter().flat_map(|&c| std::iter::repeat_n(c, self.order)).collect()
    }
}

/// Cover with `C_{(x,i),(y,j)} = C_{x,y} 1[i = m_{(x,y)}·j]` and `κ_{(x,i)} = κ_x`.
pub fn build_cover(g: &WeightedGraph, group: &FiniteGroup, m: &ConnectionRep) -> Result<Cover> {
    if m.values().len() != g.edges().len() {
        return Err(Error::Domain("connection does not match the graph".into()));
    }
    let order = group.order();
    let name = |x: usize, i: usize| format!("{}@{}", g.name(x), i);
    let vertices = (0..g.len()).flat_map(|x| (0..order).map(move |i| (x, i))).map(|(x, i)| name(x, i)).collect();
    let mut edges = Vec::with_capacity(g.edges().len() * order);
    for (e, &a) in g.edges().iter().zip(m.values()) {
        for j in 0..order {
            edges.push(EdgeSpec { u: name(e.u, group.mul(a, j)), v: name(e.v, j), c: e.conductance });
        }
    }
    let killing = (0..g.len())
        .filter(|&x| g.killing()[x] > 0.0)
        .flat_map(|x| (0..order).map(move |i| (x, i)))
        .map(|(x, i)| (name(x, i), g.killing()[x]))
        .collect();
    let graph = WeightedGraph::build(&GraphSpec { vertices, edges, killing })?;
    Ok(Cover { graph, base_len: g.len(), order })
}

/// Replaces each cover vertex `(x, i)` by `x`; trivial time is summed over fibers.
pub fn project_cover_soup(cover: &Cover, ens: &LoopEnsemble) -> LoopEnsemble {
    let loops = ens
        .loops
        .iter()
        .map(|l| Loop::new_unchecked(l.skeleton().iter().map(|&v| cover.base(v).0).collect(), l.holding().to_vec()))
        .collect();
    let mut trivial_time = vec![0.0; cover.base_len];
    for (v, &t) in ens.trivial_time.iter().enumerate() {
        trivial_time[cover.base(v).0] += t;
    }
    LoopEnsemble { loops, trivial_time }
}

/// Lifts every loop from a uniform fiber point and splits each vertex's
/// trivial time over its fiber by a uniform Dirichlet vector.
pub fn lift_trivial_loops<R: Rng + ?Sized>(
    g: &WeightedGraph,
    group: &FiniteGroup,
    m: &ConnectionRep,
    cover: &Cover,
    ens: &LoopEnsemble,
    rng: &mut R,
) -> Result<LoopEnsemble> {
    let order = group.order();
    let mut loops = Vec::with_capacity(ens.loops.len());
    for (index, l) in ens.loops.iter().enumerate() {
        let skel = l.skeleton();
        if holonomy_element(g, group, m, skel) != group.identity() {
            return Err(Error::NontrivialHolonomy { index });
        }
        let mut i = rng.random_range(0..order);
        let mut lifted = Vec::with_capacity(skel.len());
        for (k, &x) in skel.iter().enumerate() {
            lifted.push(cover.vertex(x, i));
            // From (x, i) across x → y the fiber index becomes m_{(y,x)}·i.
            let y = skel[(k + 1) % skel.len()];
            i = group.mul(m.between(g, group, y, x), i);
        }
        loops.push(Loop::new_unchecked(lifted, l.holding().to_vec()));
    }
    let mut trivial_time = vec![0.0; g.len() * order];
    for (x, &t) in ens.trivial_time.iter().enumerate() {
        let w: Vec<f64> = (0..order).map(|_| Exp1.sample(rng)).collect();
        let total: f64 = w.iter().sum();
        for (i, wi) in w.iter().enumerate() {
            trivial_time[cover.vertex(x, i)] = t * wi / total;
        }
    }
    Ok(LoopEnsemble { loops, trivial_time })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connections::{all_loops_trivial, ConnectionRep};
    use crate::graph::fixtures::*;
    use crate::rng::RngStream;
    use crate::samplers::sample_soup;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn cover_determinants() {
        let z2 = FiniteGroup::cyclic(2);
        let g2 = g2();
        let c2 = build_cover(&g2, &z2, &ConnectionRep::from_values(&g2, &z2, vec![1]).unwrap()).unwrap();
        assert!((c2.graph().det() - 9.0).abs() < 1e-10);
        let g3 = g3();
        let c3 = build_cover(&g3, &z2, &ConnectionRep::from_values(&g3, &z2, vec![1, 0, 0]).unwrap()).unwrap();
        assert!((c3.graph().det() - 320.0).abs() < 1e-9);
        let s3 = FiniteGroup::s3();
        let ct = build_cover(&g3, &s3, &ConnectionRep::trivial(&g3, &s3)).unwrap();
        assert!((ct.graph().det() - 16f64.powi(6)).abs() < 1e-3);
    }

    #[test]
    fn lift_example_on_g2() {
        let z2 = FiniteGroup::cyclic(2);
        let g = g2();
        let m = ConnectionRep::from_values(&g, &z2, vec![1]).unwrap();
        let cover = build_cover(&g, &z2, &m).unwrap();
        let ens = LoopEnsemble { loops: vec![Loop::from_names_unit(&g, &["a", "b"]).unwrap()], trivial_time: vec![0.0; 2] };
        let mut rng = RngStream::new(9, 0).rng();
        let mut starts = [0u32; 2];
        for _ in 0..1000 {
            let lifted = lift_trivial_loops(&g, &z2, &m, &cover, &ens, &mut rng).unwrap();
            let skel = lifted.loops[0].skeleton();
            let (i, j) = (cover.base(skel[0]).1, cover.base(skel[1]).1);
            assert_ne!(i, j);
            starts[i] += 1;
            Loop::new(cover.graph(), skel.to_vec(), vec![1.0; 2]).unwrap();
        }
        assert!(starts[0] > 400 && starts[1] > 400);
    }

    #[test]
    fn nontrivial_loop_is_rejected() {
        let z2 = FiniteGroup::cyclic(2);
        let g = g3();
        let m = ConnectionRep::from_values(&g, &z2, vec![1, 0, 0]).unwrap();
        let cover = build_cover(&g, &z2, &m).unwrap();
        let ens = LoopEnsemble {
            loops: vec![
                Loop::from_names_unit(&g, &["a", "b"]).unwrap(),
                Loop::from_names_unit(&g, &["a", "b", "c"]).unwrap(),
            ],
            trivial_time: vec![0.0; 3],
        };
        let mut rng = RngStream::new(1, 0).rng();
        assert!(matches!(
            lift_trivial_loops(&g, &z2, &m, &cover, &ens, &mut rng),
            Err(Error::NontrivialHolonomy { index: 1 })
        ));
    }

    #[test]
    fn projected_cover_loops_have_trivial_holonomy() {
        let z2 = FiniteGroup::cyclic(2);
        let g = g3();
        let m = ConnectionRep::from_values(&g, &z2, vec![1, 0, 0]).unwrap();
        let cover = build_cover(&g, &z2, &m).unwrap();
        let mut rng = RngStream::new(4, 0).rng();
        for _ in 0..2000 {
            let ens = sample_soup(cover.graph(), &mut rng).unwrap();
            let p = project_cover_soup(&cover, &ens);
            assert!(all_loops_trivial(&g, &z2, &m, &p));
            for l in &p.loops {
                Loop::new(&g, l.skeleton().to_vec(), l.holding().to_vec()).unwrap();
            }
        }
    }

    proptest! {
        #[test]
        fn project_after_lift_is_identity(seed in any::<u64>()) {
            let s3 = FiniteGroup::s3();
            let g = g3();
            let mut rng = RngStream::new(seed, 0).rng();
            let m = ConnectionRep::from_values(&g, &s3, (0..3).map(|_| rng.random_range(0..6)).collect()).unwrap();
            let cover = build_cover(&g, &s3, &m).unwrap();
            // Projections of cover soups are exactly the trivial-holonomy ensembles.
            let base = project_cover_soup(&cover, &sample_soup(cover.graph(), &mut rng).unwrap());
            let lifted = lift_trivial_loops(&g, &s3, &m, &cover, &base, &mut rng).unwrap();
            let back = project_cover_soup(&cover, &lifted);
            prop_assert_eq!(back.loops, base.loops);
            for (a, b) in back.trivial_time.iter().zip(&base.trivial_time) {
                prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0));
            }
        }
    }
}
