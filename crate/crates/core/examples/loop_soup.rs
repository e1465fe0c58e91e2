//! Draw a soup, print its loops, and check mean edge crossings and local
//! times against the Green's function.

use loopsoup::graph::fixtures;
use loopsoup::rng::RngStream;
use loopsoup::samplers::SoupSampler;
use loopsoup::stats::Summary;

fn main() -> loopsoup::error::Result<()> {
    let g = fixtures::g3();
    let sampler = SoupSampler::new(&g)?;
    let mut rng = RngStream::new(3, 0).rng();

    let mut one = sampler.sample(&mut rng)?;
    while one.loops.is_empty() {
        one = sampler.sample(&mut rng)?;
    }
    println!("a soup with {} nontrivial loops", one.loops.len());
    for l in &one.loops {
        let names: Vec<&str> = l.skeleton().iter().map(|&x| g.name(x)).collect();
        println!("  [{}] total time {:.3}", names.join(" "), l.holding().iter().sum::<f64>());
    }
    one.write_jsonl(&g, std::io::stdout().lock())?;

    // E[L̂^x] = G(x,x) and E[N_{(x,y)}] = C_xy G(x,y).
    let green = g.green()?;
    let mut occ = vec![Summary::default(); g.len()];
    let mut cross = Summary::default();
    let ab = g.oriented_by_name("a", "b")?;
    for _ in 0..50_000 {
        let s = sampler.sample(&mut rng)?;
        for (acc, v) in occ.iter_mut().zip(s.occupation_field()) {
            acc.push(v);
        }
        cross.push(s.crossings_directed(&g, ab)? as f64);
    }
    for x in 0..g.len() {
        println!(
            "L̂^{}: mean {:.4} ± {:.4}, G = {:.4}",
            g.name(x),
            occ[x].mean(),
            occ[x].standard_error(),
            green[(x, x)]
        );
    }
    println!("N_(a,b): mean {:.4} ± {:.4}, C·G = {:.4}", cross.mean(), cross.standard_error(), g.conductance(0, 1) * green[(0, 1)]);
    Ok(())
}
