//! A Z2 connection on the triangle: its cover graph, gauge invariance of
//! holonomies, and the two determinant readings of the all-trivial event.

use loopsoup::connections::{
    all_loops_trivial, build_cover, canonical_form, gauge_transform, holonomy_element, project_cover_soup,
    ConnectionRep,
};
use loopsoup::graph::{fixtures, EdgeTilt};
use loopsoup::group::FiniteGroup;
use loopsoup::oracles::{cover_identity, cover_identity_thinned};
use loopsoup::rng::RngStream;
use loopsoup::samplers::SoupSampler;
use loopsoup::stats::{z_score, Summary};

fn main() -> loopsoup::error::Result<()> {
    let g = fixtures::g3();
    let z2 = FiniteGroup::cyclic(2);
    let m = ConnectionRep::from_values(&g, &z2, vec![1, 0, 0])?;
    let cover = build_cover(&g, &z2, &m)?;
    println!("cover: {} vertices, det = {}", cover.graph().len(), cover.graph().det());
    println!("holonomy of a→b→c: {}", holonomy_element(&g, &z2, &m, &[0, 1, 2]));

    let gauged = gauge_transform(&g, &z2, &m, &[1, 1, 0])?;
    println!("gauge-transformed values {:?}, same class: {}", gauged.values(), canonical_form(&g, &z2, &gauged) == canonical_form(&g, &z2, &m));

    let (ones, zeros) = (EdgeTilt::ones(&g), g.zeros());
    let joint = cover_identity(&g, &z2, &m, &ones, &zeros)?.re();
    let thinned = cover_identity_thinned(&g, &z2, &m, &ones, &zeros)?.re();
    println!("q=1: joint reading {joint:.4}, thinned reading {thinned:.4}");
    let q = EdgeTilt::constant(&g, 0.7);
    let chi = vec![0.2, 0.0, 0.1];
    let (jq, tq) = (cover_identity(&g, &z2, &m, &q, &chi)?.re(), cover_identity_thinned(&g, &z2, &m, &q, &chi)?.re());
    println!("q=0.7: joint {jq:.4}, thinned {tq:.4}, ratio {:.4}", jq / tq);

    // Joint reading: |M| independent base soups all have trivial holonomy.
    let base = SoupSampler::new(&g)?;
    let mut rng = RngStream::new(9, 0).rng();
    let mut acc = Summary::default();
    for _ in 0..50_000 {
        let mut ok = true;
        for _ in 0..z2.order() {
            ok &= all_loops_trivial(&g, &z2, &m, &base.sample(&mut rng)?);
        }
        acc.push(if ok { 1.0 } else { 0.0 });
    }
    println!("base soups:  {:.4} ± {:.4}  z = {:.2}", acc.mean(), acc.standard_error(), z_score(acc.mean(), acc.standard_error(), joint));

    // Projected cover soups only ever contain trivial-holonomy loops.
    let lifted = SoupSampler::new(cover.graph())?;
    let mut trivial = 0;
    for _ in 0..5_000 {
        trivial += all_loops_trivial(&g, &z2, &m, &project_cover_soup(&cover, &lifted.sample(&mut rng)?)) as u32;
    }
    println!("projected cover soups with trivial holonomy: {trivial}/5000");
    Ok(())
}
