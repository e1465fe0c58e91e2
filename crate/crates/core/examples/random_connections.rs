//! Random connections drawn i.i.d. on tree edges: the two candidate
//! partition sums, the Monte Carlo estimate that decides between them, and
//! the Gibbs sampler for the resulting measure.

use loopsoup::connections::{
    gibbs_nu_phi, nu_phi_tree_marginal, z_phi_iota, z_phi_monte_carlo, GroupDistribution, PhiBlockUpdate,
    ZPhiArbitration,
};
use loopsoup::graph::fixtures;
use loopsoup::group::FiniteGroup;
use loopsoup::rng::RngStream;

fn main() -> loopsoup::error::Result<()> {
    let g = fixtures::g3();
    let z2 = FiniteGroup::cyclic(2);
    let gamma = GroupDistribution::uniform(&z2);

    let sums = z_phi_iota(&g, &z2, &gamma)?;
    println!("cover_ratio = {}, inverse_ratio = {}", sums.cover_ratio, sums.inverse_ratio);
    let mut rng = RngStream::new(1, 0).rng();
    let estimate = z_phi_monte_carlo(&g, &z2, &gamma, 100_000, &mut rng)?;
    let arb = ZPhiArbitration::new(sums, &estimate);
    println!(
        "estimate {:.5} ± {:.5}: z = {:.2} vs cover_ratio, {:.2} vs inverse_ratio → {}",
        arb.mc_mean,
        arb.mc_se,
        arb.z_cover_ratio,
        arb.z_inverse_ratio,
        arb.selected.map_or("undecided".to_string(), |r| r.to_string())
    );

    let chain = gibbs_nu_phi(&g, &z2, &gamma, 20_000, 500, PhiBlockUpdate::Auto, &mut rng)?;
    let marginal = nu_phi_tree_marginal(&g, &z2, &gamma)?;
    let n = chain.states.len() as f64;
    println!("update {:?}, {} states", chain.update, chain.states.len());
    for (t, p) in marginal.iter().take(5) {
        let freq = chain.states.iter().filter(|s| s.tree == *t).count() as f64 / n;
        println!("{:<22} p={p:.4} freq={freq:.4}", t.labels(&g).join(" "));
    }
    let nontrivial = chain.states.iter().filter(|s| !s.connection.is_trivial(&z2)).count();
    println!("states with a nontrivial connection: {nontrivial}");
    Ok(())
}
