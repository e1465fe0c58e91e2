//! Gibbs sampler for triples `(T, A, L)` weighted by `1_ι` on every loop.
//!
//! `L | (T, A)` is the projection of a soup on the cover of `A`; `(T, A) | L`
//! is drawn exactly by enumerating trees and tree-edge assignments, weighted
//! by `P_𝒯(T) · γ-product · 1[every loop of L has trivial holonomy under A]`.

use std::collections::HashMap;

use rand::Rng;

use super::cover::{build_cover, project_cover_soup, Cover};
use super::random::{sample_gamma_tree_connection, tree_assignments, GroupDistribution, ASSIGNMENT_LIMIT};
use super::{all_loops_trivial, canonical_form, ConnectionRep};
use crate::error::{Error, Result};
use crate::graph::{EdgeTilt, WeightedGraph};
use crate::group::FiniteGroup;
use crate::loops::LoopEnsemble;
use crate::oracles::cover_identity;
use crate::samplers::{sample_tree_wilson, SoupSampler};
use crate::tree::{enumerate_rooted_trees, RootedSpanningTree};

/// How the `(T, A)` block is resampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiBlockUpdate {
    /// Exact draw from the enumerated conditional; fails beyond
    /// [`ASSIGNMENT_LIMIT`] (tree, assignment) pairs.
    Exact,
    /// Independence Metropolis: propose `T ~ P_𝒯`, `A ~ γ^T` and accept iff
    /// every loop stays trivial.
    Metropolis,
    /// Exact when enumerable, Metropolis otherwise.
    Auto,
}

#[derive(Debug, Clone)]
pub struct PhiState {
    pub sweep: u64,
    pub tree: RootedSpanningTree,
    pub connection: ConnectionRep,
    pub soup: LoopEnsemble,
}

#[derive(Debug, Clone)]
pub struct PhiChain {
    pub states: Vec<PhiState>,
    /// The update actually used (never `Auto`).
    pub update: PhiBlockUpdate,
    /// Accepted block moves (always every sweep for the exact update).
    pub accepted: u64,
}

struct Pair {
    tree: usize,
    connection: usize,
    weight: f64,
}

struct Enumeration {
    trees: Vec<RootedSpanningTree>,
    connections: Vec<ConnectionRep>,
    pairs: Vec<Pair>,
}

fn enumerate_pairs(g: &WeightedGraph, group: &FiniteGroup, gamma: &GroupDistribution) -> Result<Enumeration> {
    let det = g.det();
    let mut trees = Vec::new();
    let mut connections = Vec::new();
    let mut index: HashMap<ConnectionRep, usize> = HashMap::new();
    let mut pairs = Vec::new();
    for (t, w) in enumerate_rooted_trees(g)? {
        for (a, gw) in tree_assignments(g, group, &t, gamma)? {
            if pairs.len() >= ASSIGNMENT_LIMIT {
                return Err(Error::TooLarge(format!("more than {ASSIGNMENT_LIMIT} (tree, assignment) pairs")));
            }
            let next = connections.len();
            let c = *index.entry(a.clone()).or_insert(next);
            if c == next {
                connections.push(a);
            }
            pairs.push(Pair { tree: trees.len(), connection: c, weight: w / det * gw });
        }
        trees.push(t);
    }
    Ok(Enumeration { trees, connections, pairs })
}

/// Soup samplers on covers, keyed by gauge class.
struct CoverSoups<'a> {
    g: &'a WeightedGraph,
    group: &'a FiniteGroup,
    cache: HashMap<ConnectionRep, (Cover, SoupSampler)>,
}

impl CoverSoups<'_> {
    /// A projected cover soup for `m`. The cover of a gauge-equivalent
    /// connection is isomorphic and projects to the same law, so one sampler
    /// per class suffices.
    fn sample<R: Rng + ?Sized>(&mut self, m: &ConnectionRep, rng: &mut R) -> Result<LoopEnsemble> {
        let key = canonical_form(self.g, self.group, m);
        if !self.cache.contains_key(&key) {
            let cover = build_cover(self.g, self.group, &key)?;
            let sampler = SoupSampler::new(cover.graph())?;
            self.cache.insert(key.clone(), (cover, sampler));
        }
        let (cover, sampler) = &self.cache[&key];
        Ok(project_cover_soup(cover, &sampler.sample(rng)?))
    }
}

/// Runs the chain for `sweeps` sweeps, starting from `T ~ P_𝒯`, `A ~ γ^T`,
/// and keeps the states after `burnin`.
pub fn gibbs_nu_phi<R: Rng + ?Sized>(
    g: &WeightedGraph,
    group: &FiniteGroup,
    gamma: &GroupDistribution,
    sweeps: u64,
    burnin: u64,
    update: PhiBlockUpdate,
    rng: &mut R,
) -> Result<PhiChain> {
    if sweeps <= burnin {
        return Err(Error::Domain(format!("sweeps ({sweeps}) must exceed burn-in ({burnin})")));
    }
    let exact = match update {
        PhiBlockUpdate::Metropolis => None,
        PhiBlockUpdate::Exact => Some(enumerate_pairs(g, group, gamma)?),
        PhiBlockUpdate::Auto => match enumerate_pairs(g, group, gamma) {
            Ok(e) => Some(e),
            Err(Error::TooLarge(_)) => None,
            Err(e) => return Err(e),
        },
    };
    let update = if exact.is_some() { PhiBlockUpdate::Exact } else { PhiBlockUpdate::Metropolis };
    let mut soups = CoverSoups { g, group, cache: HashMap::new() };

    let mut tree = sample_tree_wilson(g, rng)?;
    let mut connection = sample_gamma_tree_connection(g, group, &tree, gamma, rng);
    let mut states = Vec::with_capacity((sweeps - burnin) as usize);
    let mut accepted = 0;
    let mut weights = Vec::new();
    for sweep in 0..sweeps {
        let soup = soups.sample(&connection, rng)?;
        match &exact {
            Some(en) => {
                let ok: Vec<bool> = en.connections.iter().map(|a| all_loops_trivial(g, group, a, &soup)).collect();
                weights.clear();
                weights.extend(en.pairs.iter().map(|p| if ok[p.connection] { p.weight } else { 0.0 }));
                // The current state always has positive weight, so the total is positive.
                let total: f64 = weights.iter().sum();
                let mut u = rng.random::<f64>() * total;
                let mut pick = en.pairs.len() - 1;
                for (i, &w) in weights.iter().enumerate() {
                    if u < w {
                        pick = i;
                        break;
                    }
                    u -= w;
                }
                let p = &en.pairs[pick];
                tree = en.trees[p.tree].clone();
                connection = en.connections[p.connection].clone();
                accepted += 1;
            }
            None => {
                let t = sample_tree_wilson(g, rng)?;
                let a = sample_gamma_tree_connection(g, group, &t, gamma, rng);
                if all_loops_trivial(g, group, &a, &soup) {
                    tree = t;
                    connection = a;
                    accepted += 1;
                }
            }
        }
        if sweep >= burnin {
            states.push(PhiState { sweep, tree: tree.clone(), connection: connection.clone(), soup });
        }
    }
    Ok(PhiChain { states, update, accepted })
}

/// Exact tree marginal of the chain's stationary law:
/// `P(T) ∝ P_𝒯(T) Σ_A γ^T(A) · det(M_λ−C)^{|M|} / det(M^{(A)}_λ − C^{(A)})`.
pub fn nu_phi_tree_marginal(
    g: &WeightedGraph,
    group: &FiniteGroup,
    gamma: &GroupDistribution,
) -> Result<Vec<(RootedSpanningTree, f64)>> {
    let en = enumerate_pairs(g, group, gamma)?;
    let ones = EdgeTilt::ones(g);
    let zeros = g.zeros();
    let mut values: HashMap<ConnectionRep, f64> = HashMap::new();
    let mut mass = vec![0.0; en.trees.len()];
    for p in &en.pairs {
        let key = canonical_form(g, group, &en.connections[p.connection]);
        let v = match values.get(&key) {
            Some(&v) => v,
            None => {
                let v = cover_identity(g, group, &key, &ones, &zeros)?.re();
                values.insert(key, v);
                v
            }
        };
        mass[p.tree] += p.weight * v;
    }
    let z: f64 = mass.iter().sum();
    Ok(en.trees.into_iter().zip(mass).map(|(t, m)| (t, m / z)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::rng::RngStream;

    #[test]
    fn support_is_respected() {
        let g = g3();
        let z2 = FiniteGroup::cyclic(2);
        let gamma = GroupDistribution::uniform(&z2);
        let mut rng = RngStream::new(3, 0).rng();
        let chain = gibbs_nu_phi(&g, &z2, &gamma, 2000, 100, PhiBlockUpdate::Auto, &mut rng).unwrap();
        assert_eq!(chain.states.len(), 1900);
        assert_eq!(chain.update, PhiBlockUpdate::Exact);
        for s in &chain.states {
            assert!(all_loops_trivial(&g, &z2, &s.connection, &s.soup));
        }
    }

    #[test]
    fn delta_gamma_keeps_trivial_connection() {
        let g = g3();
        let s3 = FiniteGroup::s3();
        let mut rng = RngStream::new(4, 0).rng();
        let chain = gibbs_nu_phi(&g, &s3, &GroupDistribution::delta(&s3), 200, 0, PhiBlockUpdate::Exact, &mut rng).unwrap();
        assert!(chain.states.iter().all(|s| s.connection.is_trivial(&s3)));
        let marginal = nu_phi_tree_marginal(&g, &s3, &GroupDistribution::delta(&s3)).unwrap();
        assert!(marginal.iter().all(|(_, p)| (p - 1.0 / 16.0).abs() < 1e-12));
    }

    #[test]
    fn metropolis_fallback_keeps_support() {
        let g = g3();
        let z2 = FiniteGroup::cyclic(2);
        let gamma = GroupDistribution::uniform(&z2);
        let mut rng = RngStream::new(5, 0).rng();
        let chain = gibbs_nu_phi(&g, &z2, &gamma, 500, 0, PhiBlockUpdate::Metropolis, &mut rng).unwrap();
        assert_eq!(chain.update, PhiBlockUpdate::Metropolis);
        assert!(chain.accepted > 0 && chain.accepted < 500);
        assert!(chain.states.iter().all(|s| all_loops_trivial(&g, &z2, &s.connection, &s.soup)));
    }
}
