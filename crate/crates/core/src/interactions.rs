//! Gibbs samplers for the interacting tree/soup pairs.
//!
//! Both conditionals are exact. Given the tree, the soup is the soup of a
//! modified chain: off-tree conductances scaled by `β`, or extra killing `b`
//! at vertices not attached to the root. Given the soup, the tree is a
//! weighted spanning tree with `C_e β^{−N_e}` or `κ_x e^{b L̂^x}`.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::connections::geodesic_reduce;
use crate::error::{Error, Result};
use crate::graph::{AugEdge, EdgeTilt, EdgeWeights, WeightedGraph};
use crate::loops::LoopEnsemble;
use crate::samplers::{sample_pair, sample_tree_log_scaled, SoupSampler};
use crate::stats::{batch_means, z_score};
use crate::tree::RootedSpanningTree;

#[derive(Debug, Clone, PartialEq)]
pub struct InteractionState {
    pub sweep: u64,
    pub tree: RootedSpanningTree,
    pub soup: LoopEnsemble,
}

/// Which interacting measure to sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChainKind {
    /// Weight `∏_{e∉T} β^{N_e}`, `0 < β < 1`.
    Beta(f64),
    /// Weight `∏_{x: {x,Δ}∉T} e^{−b L̂^x}`, `b > 0`.
    BStar(f64),
}

impl ChainKind {
    fn check(self) -> Result<()> {
        match self {
            ChainKind::Beta(beta) if !(beta > 0.0 && beta < 1.0) => {
                Err(Error::Domain(format!("β = {beta} outside the open interval (0, 1)")))
            }
            ChainKind::BStar(b) if !(b.is_finite() && b > 0.0) => Err(Error::Domain(format!("b = {b} must be positive"))),
            _ => Ok(()),
        }
    }
}

/// A Gibbs kernel with its soup samplers cached per tree shape.
pub struct InteractionSampler<'a> {
    g: &'a WeightedGraph,
    kind: ChainKind,
    soups: HashMap<Vec<bool>, SoupSampler>,
}

impl<'a> InteractionSampler<'a> {
    pub fn new(g: &'a WeightedGraph, kind: ChainKind) -> Result<Self> {
        kind.check()?;
        Ok(InteractionSampler { g, kind, soups: HashMap::new() })
    }

    fn soup_given_tree<R: Rng + ?Sized>(&mut self, tree: &RootedSpanningTree, rng: &mut R) -> Result<LoopEnsemble> {
        let g = self.g;
        let key: Vec<bool> = match self.kind {
            ChainKind::Beta(_) => (0..g.edges().len()).map(|e| tree.contains_conductance(g, e)).collect(),
            ChainKind::BStar(_) => (0..g.len()).map(|x| tree.contains(g, AugEdge::Killing(x))).collect(),
        };
        if !self.soups.contains_key(&key) {
            let sampler = match self.kind {
                ChainKind::Beta(beta) => {
                    let scale: Vec<f64> = key.iter().map(|&on| if on { 1.0 } else { beta }).collect();
                    SoupSampler::tilted(g, &scale, &g.zeros())?
                }
                ChainKind::BStar(b) => {
                    let kill: Vec<f64> = key.iter().map(|&rooted| if rooted { 0.0 } else { b }).collect();
                    SoupSampler::tilted(g, &vec![1.0; g.edges().len()], &kill)?
                }
            };
            self.soups.insert(key.clone(), sampler);
        }
        self.soups[&key].sample(rng)
    }

    fn tree_given_soup<R: Rng + ?Sized>(&self, soup: &LoopEnsemble, rng: &mut R) -> Result<RootedSpanningTree> {
        let g = self.g;
        match self.kind {
            ChainKind::Beta(beta) => {
                let lift = -beta.ln();
                let edge: Vec<f64> = soup.edge_crossings(g).iter().map(|&n| n as f64 * lift).collect();
                sample_tree_log_scaled(g, &edge, &g.zeros(), rng)
            }
            ChainKind::BStar(b) => {
                let kill: Vec<f64> = soup.occupation_field().iter().map(|&l| b * l).collect();
                sample_tree_log_scaled(g, &vec![0.0; g.edges().len()], &kill, rng)
            }
        }
    }

    /// One sweep: soup given tree, then tree given soup.
    pub fn step<R: Rng + ?Sized>(&mut self, state: &InteractionState, rng: &mut R) -> Result<InteractionState> {
        let soup = self.soup_given_tree(&state.tree, rng)?;
        let tree = self.tree_given_soup(&soup, rng)?;
        Ok(InteractionState { sweep: state.sweep + 1, tree, soup })
    }
}

/// One sweep of the `β`-interaction Gibbs sampler.
pub fn gibbs_beta_step<R: Rng + ?Sized>(
    g: &WeightedGraph,
    beta: f64,
    state: &InteractionState,
    rng: &mut R,
) -> Result<InteractionState> {
    InteractionSampler::new(g, ChainKind::Beta(beta))?.step(state, rng)
}

/// One sweep of the killing-interaction Gibbs sampler.
pub fn gibbs_bstar_step<R: Rng + ?Sized>(
    g: &WeightedGraph,
    b: f64,
    state: &InteractionState,
    rng: &mut R,
) -> Result<InteractionState> {
    InteractionSampler::new(g, ChainKind::BStar(b))?.step(state, rng)
}

/// Starts from the independent pair and returns the `sweeps − burnin` states
/// after burn-in.
pub fn run_chain<R: Rng + ?Sized>(
    g: &WeightedGraph,
    kind: ChainKind,
    sweeps: u64,
    burnin: u64,
    rng: &mut R,
) -> Result<Vec<InteractionState>> {
    if sweeps <= burnin {
        return Err(Error::Domain(format!("sweeps ({sweeps}) must exceed burn-in ({burnin})")));
    }
    let mut sampler = InteractionSampler::new(g, kind)?;
    let (tree, soup) = sample_pair(g, rng)?;
    let mut state = InteractionState { sweep: 0, tree, soup };
    let mut out = Vec::with_capacity((sweeps - burnin) as usize);
    for s in 0..sweeps {
        state = sampler.step(&state, rng)?;
        if s >= burnin {
            out.push(state.clone());
        }
    }
    Ok(out)
}

/// Mean and batch-means standard errors of a complex functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalEstimate {
    pub mean: Complex64,
    pub se_re: f64,
    pub se_im: f64,
}

impl FunctionalEstimate {
    /// Largest |z| of the real and imaginary parts against `target`.
    pub fn max_z(&self, target: Complex64) -> f64 {
        z_score(self.mean.re, self.se_re, target.re).abs().max(z_score(self.mean.im, self.se_im, target.im).abs())
    }
}

fn batches_for(n: usize) -> usize {
    ((n as f64).sqrt() as usize).max(2)
}

/// Estimates `E[∏ q^N ∏_e (b_e 1[e∉T] + c_e 1[e∈T]) e^{−Σχ L̂}]` along a chain.
pub fn estimate_functional(
    g: &WeightedGraph,
    states: &[InteractionState],
    q: &EdgeTilt,
    b: &EdgeWeights,
    c: &EdgeWeights,
    chi: &[f64],
) -> Result<FunctionalEstimate> {
    if states.is_empty() {
        return Err(Error::Domain("empty chain".into()));
    }
    let mut re = Vec::with_capacity(states.len());
    let mut im = Vec::with_capacity(states.len());
    let edges = g.augmented_edges();
    for s in states {
        let pairing: f64 = edges.iter().map(|&e| if s.tree.contains(g, e) { c.get(e) } else { b.get(e) }).product();
        let w = s.soup.tilt_weight(g, q, chi, None)? * pairing;
        re.push(w.re);
        im.push(w.im);
    }
    let k = batches_for(states.len());
    let (mr, sr) = batch_means(&re, k);
    let (mi, si) = batch_means(&im, k);
    Ok(FunctionalEstimate { mean: Complex64::new(mr, mi), se_re: sr, se_im: si })
}

/// How much of the soup sits off the tree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OffTreeDiagnostic {
    /// Mean of `Σ_{e∉T} N_e` per state.
    pub mean: f64,
    pub se: f64,
    /// Fraction of nontrivial loops whose geodesic reduction is empty
    /// (`NaN` when no state has a loop).
    pub contractible_rate: f64,
}

pub fn offtree_crossing_diagnostic(g: &WeightedGraph, states: &[InteractionState]) -> Result<OffTreeDiagnostic> {
    if states.is_empty() {
        return Err(Error::Domain("empty chain".into()));
    }
    let mut values = Vec::with_capacity(states.len());
    let (mut loops, mut contractible) = (0u64, 0u64);
    for s in states {
        let n = s.soup.edge_crossings(g);
        let off: u64 = (0..g.edges().len()).filter(|&e| !s.tree.contains_conductance(g, e)).map(|e| n[e]).sum();
        values.push(off as f64);
        for l in &s.soup.loops {
            loops += 1;
            if geodesic_reduce(g, l).is_empty() {
                contractible += 1;
            }
        }
    }
    let (mean, se) = batch_means(&values, batches_for(values.len()));
    let contractible_rate = if loops == 0 { f64::NAN } else { contractible as f64 / loops as f64 };
    Ok(OffTreeDiagnostic { mean, se, contractible_rate })
}
