//! Random connections carried by a spanning tree, the weight of the
//! tree/connection/loop triples and the partition function for `Φ = 1_ι`.

use std::collections::HashMap;
use std::fmt;

use rand::Rng;
use serde::Serialize;

use super::{all_loops_trivial, canonical_form, holonomy, ConnectionRep};
use crate::error::{Error, Result};
use crate::graph::{AugEdge, EdgeTilt, WeightedGraph};
use crate::group::{ClassFunction, FiniteGroup};
use crate::loops::LoopEnsemble;
use crate::oracles::cover_identity;
use crate::samplers::{sample_tree_wilson, SoupSampler};
use crate::stats::{z_score, Summary, Z_MAX};
use crate::tree::{enumerate_rooted_trees, tree_probability, RootedSpanningTree};

/// Largest number of tree-edge assignments enumerated exactly.
pub const ASSIGNMENT_LIMIT: usize = 1_000_000;

/// A symmetric probability on the group: `γ(g) = γ(g⁻¹)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupDistribution {
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl GroupDistribution {
    pub fn new(group: &FiniteGroup, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != group.order() {
            return Err(Error::Domain(format!("{} probabilities for a group of order {}", probs.len(), group.order())));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::Domain("probabilities must be non-negative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("probabilities sum to {total}")));
        }
        for (g, &p) in probs.iter().enumerate() {
            if (p - probs[group.inv(g)]).abs() > 1e-12 {
                return Err(Error::Domain(format!("γ is not symmetric: γ({g}) ≠ γ({})", group.inv(g))));
            }
        }
        let cumulative = probs
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        Ok(GroupDistribution { probs, cumulative })
    }

    pub fn uniform(group: &FiniteGroup) -> Self {
        let n = group.order();
        Self::new(group, vec![1.0 / n as f64; n]).expect("uniform is symmetric")
    }

    /// Point mass at the identity.
    pub fn delta(group: &FiniteGroup) -> Self {
        let mut p = vec![0.0; group.order()];
        p[group.identity()] = 1.0;
        Self::new(group, p).expect("identity is self-inverse")
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, g: usize) -> f64 {
        self.probs[g]
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.random::<f64>() * self.cumulative.last().copied().unwrap_or(1.0);
        self.cumulative.partition_point(|&c| c <= u).min(self.probs.len() - 1)
    }

    pub fn is_delta(&self, group: &FiniteGroup) -> bool {
        self.probs[group.identity()] == 1.0
    }
}

fn tree_conductance_edges(g: &WeightedGraph, t: &RootedSpanningTree) -> Vec<usize> {
    t.edges(g)
        .into_iter()
        .filter_map(|e| match e {
            AugEdge::Conductance(i) => Some(i),
            AugEdge::Killing(_) => None,
        })
        .collect()
}

/// `γ`-i.i.d. values on the conductance edges of `t` (forward orientation), `ι` elsewhere.
pub fn sample_gamma_tree_connection<R: Rng + ?Sized>(
    g: &WeightedGraph,
    group: &FiniteGroup,
    t: &RootedSpanningTree,
    gamma: &GroupDistribution,
    rng: &mut R,
) -> ConnectionRep {
    let mut values = vec![group.identity(); g.edges().len()];
    for e in tree_conductance_edges(g, t) {
        values[e] = gamma.sample(rng);
    }
    ConnectionRep::from_values(g, group, values).expect("values in range")
}

/// Every assignment of group elements to the conductance edges of `t` with
/// positive `γ`-product, together with that product.
pub fn tree_assignments(
    g: &WeightedGraph,
    group: &FiniteGroup,
    t: &RootedSpanningTree,
    gamma: &GroupDistribution,
) -> Result<Vec<(ConnectionRep, f64)>> {
    let edges = tree_conductance_edges(g, t);
    let support: Vec<usize> = (0..group.order()).filter(|&a| gamma.prob(a) > 0.0).collect();
    let count = (support.len() as f64).powi(edges.len() as i32);
    if count > ASSIGNMENT_LIMIT as f64 {
        return Err(Error::TooLarge(format!("{count} tree-edge assignments exceed {ASSIGNMENT_LIMIT}")));
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut digits = vec![0usize; edges.len()];
    loop {
        let mut values = vec![group.identity(); g.edges().len()];
        let mut w = 1.0;
        for (&e, &d) in edges.iter().zip(&digits) {
            values[e] = support[d];
            w *= gamma.prob(support[d]);
        }
        out.push((ConnectionRep::from_values(g, group, values)?, w));
        // Odometer increment.
        let mut k = 0;
        while k < digits.len() {
            digits[k] += 1;
            if digits[k] < support.len() {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
        if k == digits.len() {
            break;
        }
    }
    Ok(out)
}

/// `γ^T(A)`: the probability that a `γ`-tree connection on `t` lies in the
/// gauge class of `m`.
pub fn gamma_tree_class_probability(
    g: &WeightedGraph,
    group: &FiniteGroup,
    t: &RootedSpanningTree,
    gamma: &GroupDistribution,
    m: &ConnectionRep,
) -> Result<f64> {
    let target = canonical_form(g, group, m);
    Ok(tree_assignments(g, group, t, gamma)?
        .into_iter()
        .filter(|(a, _)| canonical_form(g, group, a) == target)
        .map(|(_, w)| w)
        .sum())
}

/// Unnormalized density `∏_l Φ(H_A(l)) · γ^T(A) · P_𝒯(T)` of a triple.
pub fn nu_phi_weight(
    g: &WeightedGraph,
    group: &FiniteGroup,
    t: &RootedSpanningTree,
    m: &ConnectionRep,
    ens: &LoopEnsemble,
    phi: &ClassFunction,
    gamma: &GroupDistribution,
) -> Result<f64> {
    let loops: f64 = ens.loops.iter().map(|l| phi.get(holonomy(g, group, m, l))).product();
    if loops == 0.0 {
        return Ok(0.0);
    }
    Ok(loops * gamma_tree_class_probability(g, group, t, gamma, m)? * tree_probability(g, t)?)
}

/// The two candidate values of `Z_{1_ι}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZPhiSums {
    /// `Σ P_𝒯(T) γ^T(A) det(M_λ−C)^{|M|} / det(M^{(A)}_λ−C^{(A)})`.
    pub cover_ratio: f64,
    /// The reciprocal form `Σ P_𝒯(T) γ^T(A) det(M^{(A)}_λ−C^{(A)}) / det(M_λ−C)^{|M|}`.
    pub inverse_ratio: f64,
}

/// Exact enumeration of both sums over trees and tree-edge assignments.
pub fn z_phi_iota(g: &WeightedGraph, group: &FiniteGroup, gamma: &GroupDistribution) -> Result<ZPhiSums> {
    let det = g.det();
    let ones = EdgeTilt::ones(g);
    let zeros = g.zeros();
    let mut cache: HashMap<ConnectionRep, f64> = HashMap::new();
    let (mut cover_ratio, mut inverse_ratio) = (0.0, 0.0);
    for (t, w) in enumerate_rooted_trees(g)? {
        let p = w / det;
        for (a, gw) in tree_assignments(g, group, &t, gamma)? {
            let key = canonical_form(g, group, &a);
            let v = match cache.get(&key) {
                Some(&v) => v,
                None => {
                    let v = cover_identity(g, group, &key, &ones, &zeros)?.re();
                    cache.insert(key, v);
                    v
                }
            };
            cover_ratio += p * gw * v;
            inverse_ratio += p * gw / v;
        }
    }
    Ok(ZPhiSums { cover_ratio, inverse_ratio })
}

/// Monte Carlo estimate of `E[∏_l 1_ι(H_𝒜(l))]` with `T ~ P_𝒯`, `A ~ γ^T` and
/// the union of `|M|` independent soups.
pub fn z_phi_monte_carlo<R: Rng + ?Sized>(
    g: &WeightedGraph,
    group: &FiniteGroup,
    gamma: &GroupDistribution,
    samples: usize,
    rng: &mut R,
) -> Result<Summary> {
    let soup = SoupSampler::new(g)?;
    let mut s = Summary::default();
    for _ in 0..samples {
        let t = sample_tree_wilson(g, rng)?;
        let a = sample_gamma_tree_connection(g, group, &t, gamma, rng);
        let mut ok = true;
        for _ in 0..group.order() {
            // Keep drawing so the stream consumption does not depend on the outcome.
            ok &= all_loops_trivial(g, group, &a, &soup.sample(rng)?);
        }
        s.push(if ok { 1.0 } else { 0.0 });
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ZPhiReading {
    #[serde(rename = "cover_ratio")]
    CoverRatio,
    #[serde(rename = "inverse_ratio")]
    InverseRatio,
}

impl fmt::Display for ZPhiReading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZPhiReading::CoverRatio => "cover_ratio",
            ZPhiReading::InverseRatio => "inverse_ratio",
        })
    }
}

/// Which of the two sums the Monte Carlo estimate supports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZPhiArbitration {
    pub sums: ZPhiSums,
    pub mc_mean: f64,
    pub mc_se: f64,
    pub z_cover_ratio: f64,
    pub z_inverse_ratio: f64,
    /// `Some` when exactly one sum is within `Z_MAX` standard errors.
    pub selected: Option<ZPhiReading>,
}

impl ZPhiArbitration {
    pub fn new(sums: ZPhiSums, estimate: &Summary) -> Self {
        let (mean, se) = (estimate.mean(), estimate.standard_error());
        let z_cover_ratio = z_score(mean, se, sums.cover_ratio);
        let z_inverse_ratio = z_score(mean, se, sums.inverse_ratio);
        let selected = match (z_cover_ratio.abs() <= Z_MAX, z_inverse_ratio.abs() <= Z_MAX) {
            (true, false) => Some(ZPhiReading::CoverRatio),
            (false, true) => Some(ZPhiReading::InverseRatio),
            _ => None,
        };
        ZPhiArbitration { sums, mc_mean: mean, mc_se: se, z_cover_ratio, z_inverse_ratio, selected }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::loops::Loop;
    use crate::rng::RngStream;
    use crate::stats::chi_square;

    #[test]
    fn gamma_must_be_symmetric() {
        let z3 = FiniteGroup::cyclic(3);
        assert!(GroupDistribution::new(&z3, vec![0.2, 0.5, 0.3]).is_err());
        assert!(GroupDistribution::new(&z3, vec![0.2, 0.4, 0.4]).is_ok());
        assert!(GroupDistribution::new(&z3, vec![0.2, 0.2, 0.2]).is_err());
    }

    #[test]
    fn delta_gives_trivial_connection() {
        let g = g3();
        let s3 = FiniteGroup::s3();
        let t = enumerate_rooted_trees(&g).unwrap()[5].0.clone();
        let mut rng = RngStream::new(1, 0).rng();
        assert!(sample_gamma_tree_connection(&g, &s3, &t, &GroupDistribution::delta(&s3), &mut rng).is_trivial(&s3));
    }

    #[test]
    fn nu_phi_weight_examples() {
        let g = g3();
        let z2 = FiniteGroup::cyclic(2);
        let gamma = GroupDistribution::uniform(&z2);
        let iota = ClassFunction::identity_indicator(&z2);
        let tri = LoopEnsemble { loops: vec![Loop::from_names_unit(&g, &["a", "b", "c"]).unwrap()], trivial_time: vec![0.0; 3] };
        // A tree with two conductance edges: the path a-b-c attached at a.
        let t = RootedSpanningTree::from_edges(
            &g,
            &[AugEdge::Killing(0), g.parse_aug_edge("a-b").unwrap(), g.parse_aug_edge("b-c").unwrap()],
        )
        .unwrap();
        let trivial = ConnectionRep::trivial(&g, &z2);
        // (ι,ι) and (flip,flip) on the path both close the triangle trivially,
        // so the trivial class has γ^T-mass 1/2.
        assert!((gamma_tree_class_probability(&g, &z2, &t, &gamma, &trivial).unwrap() - 0.5).abs() < 1e-12);
        let w = nu_phi_weight(&g, &z2, &t, &trivial, &tri, &iota, &gamma).unwrap();
        assert!((w - 1.0 / 32.0).abs() < 1e-12, "{w}");
        let flip = ConnectionRep::from_values(&g, &z2, vec![1, 0, 0]).unwrap();
        assert_eq!(nu_phi_weight(&g, &z2, &t, &flip, &tri, &iota, &gamma).unwrap(), 0.0);
        let one = ClassFunction::one(&z2);
        let w1 = nu_phi_weight(&g, &z2, &t, &flip, &tri, &one, &gamma).unwrap();
        assert!((w1 - 1.0 / 32.0).abs() < 1e-12);
    }

    #[test]
    fn z_phi_examples() {
        let z2 = FiniteGroup::cyclic(2);
        let g = g3();
        let d = z_phi_iota(&g, &z2, &GroupDistribution::delta(&z2)).unwrap();
        assert!((d.cover_ratio - 1.0).abs() < 1e-12 && (d.inverse_ratio - 1.0).abs() < 1e-12);
        let u2 = z_phi_iota(&g2(), &z2, &GroupDistribution::uniform(&z2)).unwrap();
        assert!((u2.cover_ratio - 1.0).abs() < 1e-12);
        let u3 = z_phi_iota(&g, &z2, &GroupDistribution::uniform(&z2)).unwrap();
        assert!(u3.cover_ratio > 0.8 && u3.cover_ratio < 1.0);
        assert!(u3.inverse_ratio > 1.0);
    }

    #[test]
    fn orientation_does_not_change_holonomy_law() {
        // Reading the tree edge b-c backwards gives the same holonomy law under symmetric γ.
        let g = g3();
        let z3 = FiniteGroup::cyclic(3);
        let gamma = GroupDistribution::new(&z3, vec![0.5, 0.25, 0.25]).unwrap();
        let t = RootedSpanningTree::from_edges(
            &g,
            &[AugEdge::Killing(0), g.parse_aug_edge("a-b").unwrap(), g.parse_aug_edge("b-c").unwrap()],
        )
        .unwrap();
        let tri = Loop::from_names_unit(&g, &["a", "b", "c"]).unwrap();
        let mut rng = RngStream::new(12, 0).rng();
        let mut counts = [[0u64; 3]; 2];
        for _ in 0..30_000 {
            let m = sample_gamma_tree_connection(&g, &z3, &t, &gamma, &mut rng);
            counts[0][holonomy(&g, &z3, &m, &tri).0] += 1;
            let mut r = m.clone();
            let bc = g.oriented(1, 2).unwrap();
            r.set(&z3, bc.reversed(), m.get(&z3, bc));
            counts[1][holonomy(&g, &z3, &r, &tri).0] += 1;
        }
        let total = counts[0].iter().sum::<u64>() as f64;
        let p: Vec<f64> = counts[0].iter().map(|&c| c as f64 / total).collect();
        assert!(chi_square(&counts[1], &p).p_value > 1e-4);
    }
}
