//! Exact values of the determinant identities, computed from determinants and
//! spanning-tree enumeration. Every sampler is checked against these.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::connections::{build_cover, ConnectionRep};
use crate::error::{Error, Result};
use crate::graph::{AugEdge, EdgeTilt, EdgeWeights, WeightedGraph};
use crate::group::FiniteGroup;
use crate::tree::{enumerate_rooted_trees, RootedSpanningTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OracleMethod {
    #[serde(rename = "eq1")]
    Eq1,
    #[serde(rename = "eq3")]
    Eq3,
    #[serde(rename = "thm1_Z")]
    Thm1Z,
    #[serde(rename = "thm1_E")]
    Thm1E,
    #[serde(rename = "bstar_Z")]
    BstarZ,
    #[serde(rename = "eq4")]
    Eq4,
}

impl fmt::Display for OracleMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleMethod::Eq1 => "eq1",
            OracleMethod::Eq3 => "eq3",
            OracleMethod::Thm1Z => "thm1_Z",
            OracleMethod::Thm1E => "thm1_E",
            OracleMethod::BstarZ => "bstar_Z",
            OracleMethod::Eq4 => "eq4",
        })
    }
}

/// An exact value together with the formula that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: Complex64,
    pub method: OracleMethod,
}

impl OracleValue {
    fn new(value: Complex64, method: OracleMethod) -> Result<Self> {
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::Singular(format!("{method} oracle produced a non-finite value")));
        }
        Ok(OracleValue { value, method })
    }

    fn real(value: f64, method: OracleMethod) -> Result<Self> {
        Self::new(Complex64::new(value, 0.0), method)
    }

    /// The real part; every real-input oracle has zero imaginary part.
    pub fn re(&self) -> f64 {
        self.value.re
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(format!("β = {beta} outside the open interval (0, 1)")));
    }
    Ok(())
}

fn check_b(b: f64) -> Result<()> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::Domain(format!("b = {b} must be positive")));
    }
    Ok(())
}

fn check_edge_weights(g: &WeightedGraph, w: &EdgeWeights) -> Result<()> {
    if w.conductance.len() != g.edges().len() || w.killing.len() != g.len() {
        return Err(Error::Domain("edge function does not match the augmented graph".into()));
    }
    Ok(())
}

/// Spanning trees with their matrix-tree probabilities.
fn tree_table(g: &WeightedGraph) -> Result<Vec<(RootedSpanningTree, f64)>> {
    let det = g.det();
    Ok(enumerate_rooted_trees(g)?.into_iter().map(|(t, w)| (t, w / det)).collect())
}

fn pairing_factor(g: &WeightedGraph, t: &RootedSpanningTree, b: &EdgeWeights, c: &EdgeWeights) -> f64 {
    g.augmented_edges().into_iter().map(|e| if t.contains(g, e) { c.get(e) } else { b.get(e) }).product()
}

/// `q` on tree edges and `β·q` off the tree.
fn off_tree_tilt(g: &WeightedGraph, t: &RootedSpanningTree, beta: f64, q: &EdgeTilt) -> EdgeTilt {
    let mut out = q.clone();
    for oe in g.oriented_edges() {
        if !t.contains_conductance(g, oe.edge) {
            out.set(oe, q.get(oe) * beta);
        }
    }
    out
}

/// `χ + b·1[{x,Δ} ∉ T]`.
fn detached_kill(g: &WeightedGraph, t: &RootedSpanningTree, b: f64, chi: &[f64]) -> Vec<f64> {
    (0..g.len()).map(|x| chi[x] + if t.contains(g, AugEdge::Killing(x)) { 0.0 } else { b }).collect()
}

fn det_ratio(g: &WeightedGraph, chi: &[f64], q: &EdgeTilt) -> Complex64 {
    Complex64::new(g.det(), 0.0) / g.tilted_energy_matrix(chi, q).determinant()
}

/// `E[∏ q^{N_{e^o}} e^{−Σ χ L̂}] = det(M_λ − C) / det(M_{λ+χ} − C∘q)`.
pub fn expectation_identity(g: &WeightedGraph, q: &EdgeTilt, chi: &[f64]) -> Result<OracleValue> {
    g.check_chi(chi)?;
    q.check(g)?;
    OracleValue::new(det_ratio(g, chi, q), OracleMethod::Eq1)
}

/// `E[∏_e (b_e 1[e∉𝒯] + c_e 1[e∈𝒯])]` by enumeration of rooted spanning trees.
pub fn fermionic_pairing(g: &WeightedGraph, b: &EdgeWeights, c: &EdgeWeights) -> Result<OracleValue> {
    check_edge_weights(g, b)?;
    check_edge_weights(g, c)?;
    let value = tree_table(g)?.iter().map(|(t, p)| p * pairing_factor(g, t, b, c)).sum();
    OracleValue::real(value, OracleMethod::Eq3)
}

fn thm1_terms(g: &WeightedGraph, beta: f64) -> Result<Vec<(RootedSpanningTree, f64)>> {
    let ones = EdgeTilt::ones(g);
    let zeros = g.zeros();
    tree_table(g)?
        .into_iter()
        .map(|(t, p)| {
            let w = p * det_ratio(g, &zeros, &off_tree_tilt(g, &t, beta, &ones)).re;
            Ok((t, w))
        })
        .collect()
}

/// `Z^(β) = Σ_T P_𝒯(T) det(M_λ − C) / det(M_λ − C∘q_T)` with `q_T = β` off the tree.
pub fn thm1_partition(g: &WeightedGraph, beta: f64) -> Result<OracleValue> {
    check_beta(beta)?;
    OracleValue::real(thm1_terms(g, beta)?.iter().map(|(_, w)| w).sum(), OracleMethod::Thm1Z)
}

/// Tree marginal of the β-interacting pair.
pub fn thm1_tree_marginal(g: &WeightedGraph, beta: f64) -> Result<Vec<(RootedSpanningTree, f64)>> {
    check_beta(beta)?;
    normalize(thm1_terms(g, beta)?)
}

/// `∫ ∏ q^{N} ∏_e (b_e 1[e∉T] + c_e 1[e∈T]) e^{−Σχ L̂} dP^(β)`.
pub fn thm1_expectation(
    g: &WeightedGraph,
    beta: f64,
    b: &EdgeWeights,
    c: &EdgeWeights,
    q: &EdgeTilt,
    chi: &[f64],
) -> Result<OracleValue> {
    check_beta(beta)?;
    check_edge_weights(g, b)?;
    check_edge_weights(g, c)?;
    g.check_chi(chi)?;
    q.check(g)?;
    let mut num = Complex64::new(0.0, 0.0);
    let mut z = 0.0;
    let ones = EdgeTilt::ones(g);
    let zeros = g.zeros();
    for (t, p) in tree_table(g)? {
        z += p * det_ratio(g, &zeros, &off_tree_tilt(g, &t, beta, &ones)).re;
        num += det_ratio(g, chi, &off_tree_tilt(g, &t, beta, q)) * (p * pairing_factor(g, &t, b, c));
    }
    OracleValue::new(num / z, OracleMethod::Thm1E)
}

fn bstar_terms(g: &WeightedGraph, b: f64) -> Result<Vec<(RootedSpanningTree, f64)>> {
    let ones = EdgeTilt::ones(g);
    let zeros = g.zeros();
    tree_table(g)?
        .into_iter()
        .map(|(t, p)| {
            let w = p * det_ratio(g, &detached_kill(g, &t, b, &zeros), &ones).re;
            Ok((t, w))
        })
        .collect()
}

/// `Z^(b*) = Σ_T P_𝒯(T) det(M_λ − C) / det(M_{λ+χ_T} − C)`, `χ_T = b` off the root edges of `T`.
pub fn bstar_partition(g: &WeightedGraph, b: f64) -> Result<OracleValue> {
    check_b(b)?;
    OracleValue::real(bstar_terms(g, b)?.iter().map(|(_, w)| w).sum(), OracleMethod::BstarZ)
}

/// Tree marginal of the killing-interacting pair.
pub fn bstar_tree_marginal(g: &WeightedGraph, b: f64) -> Result<Vec<(RootedSpanningTree, f64)>> {
    check_b(b)?;
    normalize(bstar_terms(g, b)?)
}

/// `∫ ∏ q^{N} ∏_e (b_e 1[e∉T] + c_e 1[e∈T]) e^{−Σχ L̂} dP^(b*)`.
pub fn bstar_expectation(
    g: &WeightedGraph,
    b_kill: f64,
    b: &EdgeWeights,
    c: &EdgeWeights,
    q: &EdgeTilt,
    chi: &[f64],
) -> Result<OracleValue> {
    check_b(b_kill)?;
    check_edge_weights(g, b)?;
    check_edge_weights(g, c)?;
    g.check_chi(chi)?;
    q.check(g)?;
    let ones = EdgeTilt::ones(g);
    let zeros = g.zeros();
    let mut num = Complex64::new(0.0, 0.0);
    let mut z = 0.0;
    for (t, p) in tree_table(g)? {
        z += p * det_ratio(g, &detached_kill(g, &t, b_kill, &zeros), &ones).re;
        num += det_ratio(g, &detached_kill(g, &t, b_kill, chi), q) * (p * pairing_factor(g, &t, b, c));
    }
    OracleValue::new(num / z, OracleMethod::BstarZ)
}

fn normalize(terms: Vec<(RootedSpanningTree, f64)>) -> Result<Vec<(RootedSpanningTree, f64)>> {
    let z: f64 = terms.iter().map(|(_, w)| w).sum();
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::Singular("partition function is not positive".into()));
    }
    Ok(terms.into_iter().map(|(t, w)| (t, w / z)).collect())
}

/// Coefficients `a_0..=a_order` of `Z^(β) ≈ Σ_k a_k (1−β)^k`, fitted through
/// `Z` at `β = 1 − j·h`, `j = 0..=order` (the `β = 1` term is the formula's
/// limit, equal to 1).
pub fn thm1_series_coefficients(g: &WeightedGraph, order: usize, h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0 && (order as f64) * h < 1.0) {
        return Err(Error::Domain(format!("step {h} with order {order} leaves (0, 1]")));
    }
    let k = order + 1;
    let mut vander = DMatrix::zeros(k, k);
    let mut values = DVector::zeros(k);
    for j in 0..k {
        let t = j as f64 * h;
        let beta = 1.0 - t;
        values[j] = thm1_terms(g, beta)?.iter().map(|(_, w)| w).sum::<f64>();
        for p in 0..k {
            vander[(j, p)] = t.powi(p as i32);
        }
    }
    let coeffs = vander.lu().solve(&values).ok_or_else(|| Error::Singular("series fit".into()))?;
    Ok(coeffs.iter().copied().collect())
}

/// Joint reading of the cover identity:
/// `det(M_λ − C)^{|M|} / det(M^{(A)}_{λ+χ} − C^{(A)}∘q̃)`, the expectation of
/// `∏ q^N e^{−Σχ L̂} ∏_l 1_ι(H_A(l))` under the union of `|M|` independent soups.
pub fn cover_identity(
    g: &WeightedGraph,
    group: &FiniteGroup,
    m: &ConnectionRep,
    q: &EdgeTilt,
    chi: &[f64],
) -> Result<OracleValue> {
    g.check_chi(chi)?;
    q.check(g)?;
    let cover = build_cover(g, group, m)?;
    let tilted = cover.graph().tilted_energy_matrix(&cover.lift_chi(chi), &cover.lift_tilt(g, q)).determinant();
    let base = Complex64::new(g.det(), 0.0).powu(group.order() as u32);
    OracleValue::new(base / tilted, OracleMethod::Eq4)
}

/// Thinned reading of the cover identity:
/// `det(M^{(A)} − C^{(A)}) / det(M^{(A)}_{λ+χ} − C^{(A)}∘q̃)`, the expectation
/// of `∏ q^N e^{−Σχ L̂}` under the trivial-holonomy part alone.
pub fn cover_identity_thinned(
    g: &WeightedGraph,
    group: &FiniteGroup,
    m: &ConnectionRep,
    q: &EdgeTilt,
    chi: &[f64],
) -> Result<OracleValue> {
    g.check_chi(chi)?;
    q.check(g)?;
    let cover = build_cover(g, group, m)?;
    let tilted = cover.graph().tilted_energy_matrix(&cover.lift_chi(chi), &cover.lift_tilt(g, q)).determinant();
    OracleValue::new(Complex64::new(cover.graph().det(), 0.0) / tilted, OracleMethod::Eq4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-10 * b.abs().max(1.0)
    }

    #[test]
    fn eq1_examples() {
        let g2 = g2();
        assert!(close(expectation_identity(&g2, &EdgeTilt::ones(&g2), &g2.zeros()).unwrap().re(), 1.0));
        assert!(close(expectation_identity(&g2, &EdgeTilt::constant(&g2, 0.0), &g2.zeros()).unwrap().re(), 0.75));
        let g1 = g1();
        assert!(close(expectation_identity(&g1, &EdgeTilt::ones(&g1), &[1.0]).unwrap().re(), 0.5));
        assert!(expectation_identity(&g1, &EdgeTilt::ones(&g1), &[-1.0]).is_err());
    }

    #[test]
    fn eq3_examples() {
        let g = g2();
        let ones = EdgeWeights::ones(&g);
        assert!(close(fermionic_pairing(&g, &ones, &ones).unwrap().re(), 1.0));
        let mut b = ones.clone();
        b.set(AugEdge::Conductance(0), 0.0);
        assert!(close(fermionic_pairing(&g, &b, &ones).unwrap().re(), 2.0 / 3.0));
        assert!(close(fermionic_pairing(&g, &ones, &EdgeWeights::constant(&g, 0.0)).unwrap().re(), 0.0));
    }

    #[test]
    fn eq3_indicators_recover_tree_probabilities() {
        let g = g3();
        for (t, w) in enumerate_rooted_trees(&g).unwrap() {
            let mut b = EdgeWeights::ones(&g);
            let mut c = EdgeWeights::ones(&g);
            for e in g.augmented_edges() {
                if t.contains(&g, e) {
                    b.set(e, 0.0);
                } else {
                    c.set(e, 0.0);
                }
            }
            assert!(close(fermionic_pairing(&g, &b, &c).unwrap().re(), w / g.det()));
        }
    }

    #[test]
    fn thm1_partition_on_g2() {
        let g = g2();
        for beta in [0.25, 0.5, 0.75] {
            let z = thm1_partition(&g, beta).unwrap().re();
            assert!(close(z, 2.0 / 3.0 + 1.0 / (4.0 - beta * beta)), "β={beta}");
        }
        assert!(close(thm1_partition(&g, 0.5).unwrap().re(), 14.0 / 15.0));
        assert!(thm1_partition(&g, 1.0).is_err());
        assert!(thm1_partition(&g, 0.0).is_err());
        assert!(close(thm1_partition(&g1(), 0.3).unwrap().re(), 1.0));
    }

    #[test]
    fn thm1_partition_is_monotone() {
        for g in [g2(), g3()] {
            let zs: Vec<f64> = (1..20).map(|k| thm1_partition(&g, k as f64 / 20.0).unwrap().re()).collect();
            assert!(zs.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn thm1_expectation_examples() {
        for g in [g2(), g3()] {
            let ones = EdgeWeights::ones(&g);
            let v = thm1_expectation(&g, 0.4, &ones, &ones, &EdgeTilt::ones(&g), &g.zeros()).unwrap();
            assert!(close(v.re(), 1.0));
        }
        let g = g2();
        let ones = EdgeWeights::ones(&g);
        let v = thm1_expectation(&g, 0.5, &ones, &ones, &EdgeTilt::constant(&g, 0.0), &g.zeros()).unwrap();
        assert!(close(v.re(), 45.0 / 56.0));
        let marginal: Vec<f64> = thm1_tree_marginal(&g, 0.5).unwrap().iter().map(|p| p.1).collect();
        let mut sorted = marginal.clone();
        sorted.sort_by(f64::total_cmp);
        assert!(close(sorted[0], 4.0 / 14.0) && close(sorted[1], 5.0 / 14.0) && close(sorted[2], 5.0 / 14.0));
    }

    #[test]
    fn thm1_near_one_factorizes() {
        // Near β = 1 the tilt no longer depends on the tree.
        let g = g3();
        let mut b = EdgeWeights::ones(&g);
        b.set(AugEdge::Conductance(1), 0.3);
        let c = EdgeWeights::constant(&g, 0.8);
        let q = EdgeTilt::constant(&g, 0.6);
        let chi = [0.2, 0.0, 0.5];
        let beta = 1.0 - 1e-9;
        let joint = thm1_expectation(&g, beta, &b, &c, &q, &chi).unwrap().re();
        let product =
            expectation_identity(&g, &q, &chi).unwrap().re() * fermionic_pairing(&g, &b, &c).unwrap().re();
        assert!((joint - product).abs() < 1e-7);
    }

    #[test]
    fn bstar_examples() {
        assert!(close(bstar_partition(&g2(), 1.0).unwrap().re(), 11.0 / 15.0));
        assert!(close(bstar_partition(&g1(), 2.0).unwrap().re(), 1.0));
        assert!((bstar_partition(&g3(), 1e-9).unwrap().re() - 1.0).abs() < 1e-8);
        assert!(bstar_partition(&g2(), 0.0).is_err());
        let mut p: Vec<f64> = bstar_tree_marginal(&g2(), 1.0).unwrap().iter().map(|x| x.1).collect();
        p.sort_by(f64::total_cmp);
        assert!(close(p[0], 3.0 / 11.0) && close(p[2], 5.0 / 11.0));
    }

    #[test]
    fn series_first_coefficient() {
        // Z = 2/3 + 1/(4−β²) on g2, so dZ/dβ at 1 is 2/9.
        let a = thm1_series_coefficients(&g2(), 4, 0.01).unwrap();
        assert!((a[0] - 1.0).abs() < 1e-10);
        assert!((a[1] + 2.0 / 9.0).abs() < 1e-6, "{a:?}");
    }

    #[test]
    fn cover_identity_examples() {
        let z2 = FiniteGroup::cyclic(2);
        let g = g3();
        let trivial = ConnectionRep::trivial(&g, &z2);
        let ones = EdgeTilt::ones(&g);
        assert!((cover_identity(&g, &z2, &trivial, &ones, &g.zeros()).unwrap().re() - 1.0).abs() < 1e-12);
        let flip = ConnectionRep::from_values(&g, &z2, vec![1, 0, 0]).unwrap();
        assert!(close(cover_identity(&g, &z2, &flip, &ones, &g.zeros()).unwrap().re(), 0.8));
        let g2 = g2();
        let flip2 = ConnectionRep::from_values(&g2, &z2, vec![1]).unwrap();
        assert!(close(cover_identity(&g2, &z2, &flip2, &EdgeTilt::ones(&g2), &g2.zeros()).unwrap().re(), 1.0));
    }

    #[test]
    fn cover_readings_differ_by_the_untilted_value() {
        let z2 = FiniteGroup::cyclic(2);
        let g = g3();
        let flip = ConnectionRep::from_values(&g, &z2, vec![1, 0, 0]).unwrap();
        let q = EdgeTilt::from_fn(&g, |x, y| Complex64::new(if x < y { 0.7 } else { 0.3 }, 0.1));
        let chi = [0.5, 0.0, 1.0];
        let joint = cover_identity(&g, &z2, &flip, &q, &chi).unwrap().value;
        let thinned = cover_identity_thinned(&g, &z2, &flip, &q, &chi).unwrap().value;
        let factor = cover_identity(&g, &z2, &flip, &EdgeTilt::ones(&g), &g.zeros()).unwrap().value;
        assert!((joint - thinned * factor).norm() < 1e-12);
    }
}
