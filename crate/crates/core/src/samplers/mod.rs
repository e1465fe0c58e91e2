//! Random spanning trees, loop soups and the tree/soup pair.

mod extended;
pub(crate) mod kernel;
mod lerw;
mod soup;
mod wilson;

use rand::Rng;

pub use extended::sample_pair_extended_wilson;
pub use kernel::STEP_BUDGET;
pub use soup::{sample_soup, sample_soup_tilted, SoupSampler};
pub use wilson::{sample_tree_exact_lerw, sample_tree_log_scaled, sample_tree_wilson, WALK_STEP_LIMIT};

use crate::error::Result;
use crate::graph::WeightedGraph;
use crate::loops::LoopEnsemble;
use crate::tree::RootedSpanningTree;

/// The independent pair: a Wilson tree followed by an exact soup drawn from
/// the remainder of the same stream.
pub fn sample_pair<R: Rng + ?Sized>(g: &WeightedGraph, rng: &mut R) -> Result<(RootedSpanningTree, LoopEnsemble)> {
    let tree = sample_tree_wilson(g, rng)?;
    let soup = sample_soup(g, rng)?;
    Ok((tree, soup))
}
