//! Rooted spanning trees: Wilson's algorithm, the exact loop-erased walk
//! used for stiff weights, and the enumerated law they should match.

use std::collections::BTreeMap;

use loopsoup::graph::fixtures;
use loopsoup::rng::RngStream;
use loopsoup::samplers::{sample_tree_exact_lerw, sample_tree_wilson};
use loopsoup::stats::chi_square;
use loopsoup::tree::{enumerate_rooted_trees, tree_probability};

fn main() -> loopsoup::error::Result<()> {
    let g = fixtures::g3();
    let table = enumerate_rooted_trees(&g)?;
    println!("{} rooted spanning trees, Σ weights = det = {}", table.len(), g.det());

    let n = 40_000;
    let mut rng = RngStream::new(1, 0).rng();
    let mut wilson: BTreeMap<Vec<String>, u64> = BTreeMap::new();
    let mut lerw: BTreeMap<Vec<String>, u64> = BTreeMap::new();
    let (zero_e, zero_k) = (vec![0.0; g.edges().len()], g.zeros());
    for _ in 0..n {
        *wilson.entry(sample_tree_wilson(&g, &mut rng)?.labels(&g)).or_default() += 1;
        *lerw.entry(sample_tree_exact_lerw(&g, &zero_e, &zero_k, &mut rng)?.labels(&g)).or_default() += 1;
    }

    let mut expected = Vec::new();
    let (mut obs_w, mut obs_l) = (Vec::new(), Vec::new());
    for (t, _) in &table {
        let p = tree_probability(&g, t)?;
        let key = t.labels(&g);
        let (w, l) = (wilson.get(&key).copied().unwrap_or(0), lerw.get(&key).copied().unwrap_or(0));
        println!("{:<22} p={p:.4}  wilson={:.4}  lerw={:.4}", key.join(" "), w as f64 / n as f64, l as f64 / n as f64);
        expected.push(p);
        obs_w.push(w);
        obs_l.push(l);
    }
    println!("wilson chi-square p = {:.3}", chi_square(&obs_w, &expected).p_value);
    println!("lerw   chi-square p = {:.3}", chi_square(&obs_l, &expected).p_value);
    Ok(())
}
