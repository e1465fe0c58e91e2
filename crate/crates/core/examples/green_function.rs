//! Green's function, determinant and the occupation-field Laplace transform
//! on a small graph, compared against a soup Monte Carlo.

use loopsoup::graph::{fixtures, EdgeTilt};
use loopsoup::oracles::expectation_identity;
use loopsoup::rng::RngStream;
use loopsoup::samplers::SoupSampler;
use loopsoup::stats::ComplexSummary;
use num_complex::Complex64;

fn main() -> loopsoup::error::Result<()> {
    let g = fixtures::g3();
    let green = g.green()?;
    println!("det(M_λ − C) = {}", g.det());
    for x in 0..g.len() {
        let row: Vec<String> = (0..g.len()).map(|y| format!("{:.4}", green[(x, y)])).collect();
        println!("G[{}] = [{}]", g.name(x), row.join(", "));
    }

    let chi = vec![0.3, 0.0, 0.6];
    let q = EdgeTilt::from_fn(&g, |x, y| Complex64::from_polar(0.9, if x < y { 0.4 } else { -0.2 }));
    let exact = expectation_identity(&g, &q, &chi)?.value;

    let sampler = SoupSampler::new(&g)?;
    let mut rng = RngStream::new(7, 0).rng();
    let mut acc = ComplexSummary::default();
    for _ in 0..50_000 {
        acc.push(sampler.sample(&mut rng)?.tilt_weight(&g, &q, &chi, None)?);
    }
    println!("exact  {exact:.5}");
    println!("soup   {:.5}  (max |z| = {:.2})", acc.mean(), acc.max_z(exact));
    Ok(())
}
