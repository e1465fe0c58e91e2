use nalgebra::DMatrix;
use rand::Rng;

use super::kernel::{Kernel, STEP_BUDGET};
use super::lerw::{exact_lerw_parents, LogWeights};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::tree::{Parent, RootedSpanningTree};

/// Wilson's algorithm on the jump chain of `kernel`, starting walks from the
/// vertices in order. Loop erasure is chronological: the last exit from each
/// vertex is kept.
pub(crate) fn wilson_parents<R: Rng + ?Sized>(kernel: &Kernel, rng: &mut R) -> Result<Vec<Parent>> {
    let n = kernel.len();
    let mut in_tree = vec![false; n];
    let mut next = vec![Parent::Root; n];
    let mut steps: u64 = 0;
    for start in 0..n {
        let mut u = start;
        while !in_tree[u] {
            let s = kernel.step(u, rng);
            next[u] = s;
            steps += 1;
            if steps > STEP_BUDGET {
                return Err(Error::StepBudget { budget: STEP_BUDGET, context: "Wilson walk" });
            }
            match s {
                Parent::Root => break,
                Parent::Vertex(y) => u = y,
            }
        }
        let mut u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            match next[u] {
                Parent::Root => break,
                Parent::Vertex(y) => u = y,
            }
        }
    }
    Ok(next)
}

/// A spanning tree with probability proportional to `∏_{e∈T} C_e ∏_{{x,Δ}∈T} κ_x`.
pub fn sample_tree_wilson<R: Rng + ?Sized>(g: &WeightedGraph, rng: &mut R) -> Result<RootedSpanningTree> {
    let parents = wilson_parents(&Kernel::from_graph(g), rng)?;
    RootedSpanningTree::from_parents(g, parents)
}

/// Expected number of walk steps Wilson's algorithm takes on `kernel`: the
/// trace of the jump-chain Green function. Infinite when the estimate is
/// unusable.
pub(crate) fn expected_wilson_steps(kernel: &Kernel) -> f64 {
    let n = kernel.len();
    let a = DMatrix::identity(n, n) - kernel.matrix();
    match a.try_inverse() {
        Some(inv) => {
            let t = inv.trace();
            if t.is_finite() && (0..n).all(|i| inv[(i, i)] >= 1.0 - 1e-9) {
                t
            } else {
                f64::INFINITY
            }
        }
        None => f64::INFINITY,
    }
}

/// Above this expected walk length the exact loop-erased path sampler is used.
pub const WALK_STEP_LIMIT: f64 = 1e7;

/// A spanning tree for the modified weights `C_e e^{a_e}` and `κ_x e^{b_x}`.
///
/// Runs Wilson's walk when its expected length is at most [`WALK_STEP_LIMIT`],
/// and otherwise draws each loop-erased path from its exact step law. The
/// choice depends only on the weights, so the output law is the same either way.
pub fn sample_tree_log_scaled<R: Rng + ?Sized>(
    g: &WeightedGraph,
    edge_log_scale: &[f64],
    kill_log_scale: &[f64],
    rng: &mut R,
) -> Result<RootedSpanningTree> {
    let kernel = Kernel::from_log_scales(g, edge_log_scale, kill_log_scale)?;
    let parents = if expected_wilson_steps(&kernel) <= WALK_STEP_LIMIT {
        wilson_parents(&kernel, rng)?
    } else {
        exact_lerw_parents(g, &LogWeights::new(g, edge_log_scale, kill_log_scale), rng)?
    };
    RootedSpanningTree::from_parents(g, parents)
}

/// The walk-free sampler, for any weights.
pub fn sample_tree_exact_lerw<R: Rng + ?Sized>(
    g: &WeightedGraph,
    edge_log_scale: &[f64],
    kill_log_scale: &[f64],
    rng: &mut R,
) -> Result<RootedSpanningTree> {
    Kernel::from_log_scales(g, edge_log_scale, kill_log_scale)?;
    let parents = exact_lerw_parents(g, &LogWeights::new(g, edge_log_scale, kill_log_scale), rng)?;
    RootedSpanningTree::from_parents(g, parents)
}
