//! Tree pairings `E[∏_e (b_e 1[e∉T] + c_e 1[e∈T])]` from enumeration versus
//! Wilson samples.

use loopsoup::graph::{fixtures, AugEdge, EdgeWeights};
use loopsoup::oracles::fermionic_pairing;
use loopsoup::rng::RngStream;
use loopsoup::samplers::sample_tree_wilson;
use loopsoup::stats::{z_score, Summary};

fn main() -> loopsoup::error::Result<()> {
    let g = fixtures::g3();
    let mut b = EdgeWeights::ones(&g);
    let mut c = EdgeWeights::constant(&g, 0.5);
    b.set(AugEdge::Conductance(0), 2.0);
    c.set(AugEdge::Killing(2), 3.0);
    let exact = fermionic_pairing(&g, &b, &c)?.re();

    let mut rng = RngStream::new(5, 0).rng();
    let mut acc = Summary::default();
    let edges = g.augmented_edges();
    for _ in 0..50_000 {
        let t = sample_tree_wilson(&g, &mut rng)?;
        acc.push(edges.iter().map(|&e| if t.contains(&g, e) { c.get(e) } else { b.get(e) }).product());
    }
    let z = z_score(acc.mean(), acc.standard_error(), exact);
    println!("exact {exact:.5}  wilson {:.5} ± {:.5}  z = {z:.2}", acc.mean(), acc.standard_error());
    Ok(())
}
