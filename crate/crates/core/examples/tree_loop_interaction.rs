//! Gibbs sampler for the tree/soup pair with weight `∏_{e∉T} β^{N_e}`:
//! tree marginal, partition function and a functional against exact values.

use std::collections::HashMap;

use loopsoup::graph::{fixtures, EdgeTilt, EdgeWeights};
use loopsoup::interactions::{estimate_functional, offtree_crossing_diagnostic, run_chain, ChainKind};
use loopsoup::oracles::{thm1_expectation, thm1_partition, thm1_tree_marginal};
use loopsoup::rng::RngStream;
use loopsoup::stats::chi_square;

fn main() -> loopsoup::error::Result<()> {
    let g = fixtures::g3();
    let beta = 0.5;
    println!("Z(β={beta}) = {:.6}", thm1_partition(&g, beta)?.re());

    let mut rng = RngStream::new(2, 0).rng();
    let states = run_chain(&g, ChainKind::Beta(beta), 60_000, 1_000, &mut rng)?;

    let marginal = thm1_tree_marginal(&g, beta)?;
    let mut counts: HashMap<Vec<String>, u64> = HashMap::new();
    for s in &states {
        *counts.entry(s.tree.labels(&g)).or_default() += 1;
    }
    let observed: Vec<u64> = marginal.iter().map(|(t, _)| counts.get(&t.labels(&g)).copied().unwrap_or(0)).collect();
    let expected: Vec<f64> = marginal.iter().map(|(_, p)| *p).collect();
    for ((t, p), o) in marginal.iter().zip(&observed).take(4) {
        println!("{:<22} p={p:.4} freq={:.4}", t.labels(&g).join(" "), *o as f64 / states.len() as f64);
    }
    println!("tree marginal chi-square p = {:.3}", chi_square(&observed, &expected).p_value);

    let q = EdgeTilt::constant(&g, 0.8);
    let chi = vec![0.2, 0.4, 0.0];
    let (b, c) = (EdgeWeights::ones(&g), EdgeWeights::constant(&g, 1.2));
    let exact = thm1_expectation(&g, beta, &b, &c, &q, &chi)?.value;
    let est = estimate_functional(&g, &states, &q, &b, &c, &chi)?;
    println!("functional exact {exact:.5}, chain {:.5} ± {:.5}", est.mean.re, est.se_re);

    let d = offtree_crossing_diagnostic(&g, &states)?;
    println!("off-tree crossings per state {:.4} ± {:.4}", d.mean, d.se);
    Ok(())
}
