//! The coupled tree/soup construction from a single run of Wilson's
//! algorithm.
//!
//! Every walk is recorded with its holding times. When a vertex `v` joins the
//! tree, the part of the walk between its first and last visit is the erased
//! loop at `v`: a concatenation of excursions from `v`. The local time at `v`
//! (all holdings at `v`, including the final one before leaving) is laid on
//! an interval `[0, T)` with excursions attached at their start times. The
//! interval is cut by uniform stick-breaking (a Poisson–Dirichlet(0,1)
//! partition); each piece carrying excursions closes into one loop, pieces
//! without excursions become one-point loops.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::kernel::{Kernel, STEP_BUDGET};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::loops::{Loop, LoopEnsemble};
use crate::tree::{Parent, RootedSpanningTree};

/// Excursions from a base vertex together with its holding times.
struct ErasedLoop {
    base: usize,
    /// `holdings[m]` precedes `excursions[m]`; one extra final holding.
    holdings: Vec<f64>,
    excursions: Vec<Vec<(usize, f64)>>,
}

pub fn sample_pair_extended_wilson<R: Rng + ?Sized>(
    g: &WeightedGraph,
    rng: &mut R,
) -> Result<(RootedSpanningTree, LoopEnsemble)> {
    let kernel = Kernel::from_graph(g);
    let n = g.len();
    let mut in_tree = vec![false; n];
    let mut parent = vec![Parent::Root; n];
    let mut ensemble = LoopEnsemble::empty(g);
    let mut steps: u64 = 0;
    let mut walk: Vec<(usize, f64)> = Vec::new();
    let mut last_visit = vec![0usize; n];

    for start in 0..n {
        if in_tree[start] {
            continue;
        }
        walk.clear();
        let mut u = start;
        let end = loop {
            let hold: f64 = Exp1.sample(rng);
            walk.push((u, hold / kernel.rates[u]));
            steps += 1;
            if steps > STEP_BUDGET {
                return Err(Error::StepBudget { budget: STEP_BUDGET, context: "extended Wilson walk" });
            }
            match kernel.step(u, rng) {
                Parent::Root => break Parent::Root,
                Parent::Vertex(y) if in_tree[y] => break Parent::Vertex(y),
                Parent::Vertex(y) => u = y,
            }
        };
        for (j, &(x, _)) in walk.iter().enumerate() {
            last_visit[x] = j;
        }

        let mut pos = 0;
        while pos < walk.len() {
            let v = walk[pos].0;
            let last = last_visit[v];
            let mut erased = ErasedLoop { base: v, holdings: Vec::new(), excursions: Vec::new() };
            let mut current: Option<Vec<(usize, f64)>> = None;
            for &(x, h) in &walk[pos..=last] {
                if x == v {
                    if let Some(exc) = current.take() {
                        erased.excursions.push(exc);
                    }
                    erased.holdings.push(h);
                    current = Some(Vec::new());
                } else {
                    current.as_mut().expect("excursion open").push((x, h));
                }
            }
            in_tree[v] = true;
            parent[v] = if last + 1 < walk.len() { Parent::Vertex(walk[last + 1].0) } else { end };
            split_erased_loop(erased, &mut ensemble, rng);
            pos = last + 1;
        }
    }

    Ok((RootedSpanningTree::from_parents(g, parent)?, ensemble))
}

fn split_erased_loop<R: Rng + ?Sized>(erased: ErasedLoop, ensemble: &mut LoopEnsemble, rng: &mut R) {
    let v = erased.base;
    let total: f64 = erased.holdings.iter().sum();
    // Excursion m starts after holdings[0..=m].
    let points: Vec<f64> = erased
        .holdings
        .iter()
        .take(erased.excursions.len())
        .scan(0.0, |acc, h| {
            *acc += h;
            Some(*acc)
        })
        .collect();

    let mut a = 0.0;
    let mut next = 0;
    while next < points.len() {
        let u: f64 = rng.random();
        let b = a + u * (total - a);
        let first = next;
        while next < points.len() && points[next] < b {
            next += 1;
        }
        if first == next {
            ensemble.trivial_time[v] += b - a;
        } else {
            let mut skeleton = Vec::new();
            let mut holding = Vec::new();
            for m in first..next {
                let h = if m == first { (b - points[next - 1]) + (points[first] - a) } else { points[m] - points[m - 1] };
                skeleton.push(v);
                holding.push(h);
                for &(x, hx) in &erased.excursions[m] {
                    skeleton.push(x);
                    holding.push(hx);
                }
            }
            ensemble.loops.push(Loop::new_unchecked(skeleton, holding));
        }
        a = b;
    }
    ensemble.trivial_time[v] += total - a;
}
