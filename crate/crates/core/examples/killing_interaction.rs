//! Gibbs sampler for the pair weighted by `e^{−b L̂^x}` at every vertex
//! not attached to the root by the tree.

use std::collections::HashMap;

use loopsoup::graph::{fixtures, EdgeTilt, EdgeWeights};
use loopsoup::interactions::{estimate_functional, run_chain, ChainKind};
use loopsoup::oracles::{bstar_expectation, bstar_partition, bstar_tree_marginal};
use loopsoup::rng::RngStream;
use loopsoup::stats::chi_square;

fn main() -> loopsoup::error::Result<()> {
    let g = fixtures::g2();
    let b = 1.0;
    println!("Z(b*={b}) = {:.6} (11/15 = {:.6})", bstar_partition(&g, b)?.re(), 11.0 / 15.0);

    let mut rng = RngStream::new(4, 0).rng();
    let states = run_chain(&g, ChainKind::BStar(b), 50_000, 1_000, &mut rng)?;
    let marginal = bstar_tree_marginal(&g, b)?;
    let mut counts: HashMap<Vec<String>, u64> = HashMap::new();
    for s in &states {
        *counts.entry(s.tree.labels(&g)).or_default() += 1;
    }
    let observed: Vec<u64> = marginal.iter().map(|(t, _)| counts.get(&t.labels(&g)).copied().unwrap_or(0)).collect();
    for ((t, p), o) in marginal.iter().zip(&observed) {
        println!("{:<10} p={p:.4} freq={:.4}", t.labels(&g).join(" "), *o as f64 / states.len() as f64);
    }
    let expected: Vec<f64> = marginal.iter().map(|(_, p)| *p).collect();
    println!("chi-square p = {:.3}", chi_square(&observed, &expected).p_value);

    let q = EdgeTilt::constant(&g, 0.5);
    let chi = vec![0.3, 0.0];
    let (bw, cw) = (EdgeWeights::ones(&g), EdgeWeights::ones(&g));
    let exact = bstar_expectation(&g, b, &bw, &cw, &q, &chi)?.value;
    let est = estimate_functional(&g, &states, &q, &bw, &cw, &chi)?;
    println!("E[q^N e^(−χ·L̂)] exact {:.5}, chain {:.5} ± {:.5}", exact.re, est.mean.re, est.se_re);
    Ok(())
}
