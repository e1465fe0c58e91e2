//! The extended Wilson algorithm: one walk produces a rooted spanning tree and
//! an independent loop soup. Checks the tree law, the soup's Laplace
//! transform, and that tree and soup are uncorrelated.

use loopsoup::graph::{fixtures, AugEdge, EdgeTilt};
use loopsoup::oracles::expectation_identity;
use loopsoup::rng::RngStream;
use loopsoup::samplers::sample_pair_extended_wilson;
use loopsoup::stats::{ComplexSummary, Summary};
use loopsoup::graph::WeightedGraph;
use loopsoup::tree::enumerate_rooted_trees;

fn main() -> loopsoup::error::Result<()> {
    let g = fixtures::g3();
    let q = EdgeTilt::constant(&g, 0.6);
    let chi = vec![0.5, 0.0, 0.25];
    let exact = expectation_identity(&g, &q, &chi)?.value;

    let mut rng = RngStream::new(11, 0).rng();
    let mut soup_acc = ComplexSummary::default();
    let ab = AugEdge::Conductance(g.edge_between(0, 1).expect("edge a-b"));
    let (mut in_tree, mut n_ab, mut joint) = (Summary::default(), Summary::default(), Summary::default());
    for _ in 0..60_000 {
        let (t, soup) = sample_pair_extended_wilson(&g, &mut rng)?;
        soup_acc.push(soup.tilt_weight(&g, &q, &chi, None)?);
        let i = if t.contains(&g, ab) { 1.0 } else { 0.0 };
        let n = soup.crossings(&g, 0)? as f64;
        in_tree.push(i);
        n_ab.push(n);
        joint.push(i * n);
    }
    println!("P(a-b ∈ T): {:.4} ± {:.4}", in_tree.mean(), in_tree.standard_error());
    println!("exact P(a-b ∈ T) = {:.4}", tree_marginal_ab(&g, ab)?);
    println!("soup transform {:.5}, exact {:.5}, max |z| {:.2}", soup_acc.mean().re, exact.re, soup_acc.max_z(exact));
    println!("cov(1[a-b ∈ T], N_ab) = {:.5} (independent: 0)", joint.mean() - in_tree.mean() * n_ab.mean());
    Ok(())
}

fn tree_marginal_ab(g: &WeightedGraph, e: AugEdge) -> loopsoup::error::Result<f64> {
    Ok(enumerate_rooted_trees(g)?.iter().filter(|(t, _)| t.contains(g, e)).map(|(_, w)| w).sum::<f64>() / g.det())
}
