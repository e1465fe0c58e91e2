//! Verification suites: Monte Carlo estimates from the samplers compared with
//! the exact oracles, plus exact and 100%-rate property checks.
//!
//! Every suite is deterministic given its [`VerifyConfig`]. Randomized work is
//! split over replicas, each with its own substream; replica results are
//! merged in replica order, so the thread count never changes the output.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::connections::{
    all_loops_trivial, build_cover, canonical_form, gauge_equivalent, gauge_transform, geodesic_reduce, gibbs_nu_phi,
    holonomy, holonomy_element, lift_trivial_loops, nu_phi_tree_marginal, project_cover_soup, t_reduce, z2_connection,
    z2_edge_set, z_phi_iota, z_phi_monte_carlo, ConnectionRep, GroupDistribution, PhiBlockUpdate, ZPhiArbitration,
};
use crate::error::{Error, Result};
use crate::graph::{fixtures, AugEdge, EdgeTilt, EdgeWeights, WeightedGraph};
use crate::group::FiniteGroup;
use crate::interactions::{estimate_functional, run_chain, ChainKind, InteractionState};
use crate::loops::{Loop, LoopEnsemble};
use crate::oracles::{
    bstar_expectation, bstar_partition, bstar_tree_marginal, cover_identity, cover_identity_thinned,
    expectation_identity, fermionic_pairing, thm1_expectation, thm1_partition, thm1_tree_marginal,
};
use crate::rng::RngStream;
use crate::samplers::{sample_pair_extended_wilson, sample_tree_exact_lerw, sample_tree_wilson, SoupSampler};
use crate::stats::{chi_square, z_score, ComplexSummary, Summary, CHI_SQUARE_MIN_P, Z_MAX};
use crate::tree::{enumerate_rooted_trees, tree_probability, RootedSpanningTree};

/// Number of fuzzed cases per holonomy property.
pub const HOLONOMY_CHECKS: usize = 10_000;
/// Tolerance for exact checks of closed forms.
pub const EXACT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Suite {
    /// Soup expectations against the determinant ratio.
    Eq1,
    /// The coupled tree/soup pair from one Wilson run.
    Extended,
    /// Wilson and walk-free tree samplers against matrix-tree probabilities.
    Trees,
    /// Tree pairings against the spanning-tree sums.
    Eq3,
    /// The β-interacting pair.
    Thm1,
    /// The killing-interacting pair.
    Bstar,
    /// Cover determinant identities.
    Eq4,
    /// Trivial-holonomy projection and lift.
    Projection,
    /// Random connections and the `1_ι` partition function.
    Zphi,
    /// Gauge and geodesic invariance of holonomy.
    Holonomy,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Eq1,
        Suite::Extended,
        Suite::Trees,
        Suite::Eq3,
        Suite::Thm1,
        Suite::Bstar,
        Suite::Eq4,
        Suite::Projection,
        Suite::Zphi,
        Suite::Holonomy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Eq1 => "eq1",
            Suite::Extended => "extended",
            Suite::Trees => "trees",
            Suite::Eq3 => "eq3",
            Suite::Thm1 => "thm1",
            Suite::Bstar => "bstar",
            Suite::Eq4 => "eq4",
            Suite::Projection => "projection",
            Suite::Zphi => "zphi",
            Suite::Holonomy => "holonomy",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A graph with the label used in report rows.
#[derive(Debug, Clone)]
pub struct Target {
    pub label: String,
    pub graph: WeightedGraph,
}

/// The graph, group, connection and `γ` used by the connection suites.
#[derive(Debug, Clone)]
pub struct CoverTarget {
    pub label: String,
    pub graph: WeightedGraph,
    pub group: FiniteGroup,
    pub connection: ConnectionRep,
    pub gamma: GroupDistribution,
}

impl CoverTarget {
    /// The triangle with `ℤ/2`, the flip on `ab` and uniform `γ`.
    pub fn flip_triangle() -> Self {
        let graph = fixtures::g3();
        let group = FiniteGroup::cyclic(2);
        let connection = flip_ab(&graph, &group);
        let gamma = GroupDistribution::uniform(&group);
        CoverTarget { label: "g3".into(), graph, group, connection, gamma }
    }
}

fn flip_ab(g: &WeightedGraph, group: &FiniteGroup) -> ConnectionRep {
    ConnectionRep::from_json(g, group, include_str!("../fixtures/flip_ab.json")).expect("valid fixture")
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Monte Carlo samples (or post-burn-in sweeps) per estimate, split over replicas.
    pub samples: usize,
    pub replicas: usize,
    pub burnin: u64,
    pub beta: f64,
    pub b: f64,
    pub graphs: Vec<Target>,
    pub cover: CoverTarget,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 1,
            samples: 100_000,
            replicas: 8,
            burnin: 1_000,
            beta: 0.5,
            b: 1.0,
            graphs: vec![
                Target { label: "g1".into(), graph: fixtures::g1() },
                Target { label: "g2".into(), graph: fixtures::g2() },
                Target { label: "g3".into(), graph: fixtures::g3() },
            ],
            cover: CoverTarget::flip_triangle(),
        }
    }
}

impl VerifyConfig {
    fn check(&self) -> Result<()> {
        if self.samples == 0 || self.replicas == 0 {
            return Err(Error::Domain("samples and replicas must be positive".into()));
        }
        if self.samples < self.replicas {
            return Err(Error::Domain(format!("{} samples cannot be split over {} replicas", self.samples, self.replicas)));
        }
        if self.graphs.is_empty() {
            return Err(Error::Domain("no graphs to verify".into()));
        }
        Ok(())
    }

    /// Samples per replica; the first `samples % replicas` replicas take one more.
    fn split(&self) -> Vec<usize> {
        let (q, r) = (self.samples / self.replicas, self.samples % self.replicas);
        (0..self.replicas).map(|i| q + usize::from(i < r)).collect()
    }

    /// Runs `f(count, rng)` once per replica in parallel and returns the
    /// results in replica order.
    fn replicate<T, F>(&self, tag: &str, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize, &mut ChaCha8Rng) -> Result<T> + Sync,
    {
        let base = RngStream::new(self.seed, 0).substream(fnv1a(tag));
        self.split()
            .into_par_iter()
            .enumerate()
            .map(|(r, n)| f(n, &mut base.substream(r as u64).rng()))
            .collect()
    }

    fn stream(&self, tag: &str) -> ChaCha8Rng {
        RngStream::new(self.seed, 0).substream(fnv1a(tag)).rng()
    }
}

/// Stable 64-bit FNV-1a, used to derive one stream per check.
fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub identity: String,
    pub inputs: String,
    /// Exact value; the p-value threshold for chi-square rows; 1 for rate rows.
    pub oracle: f64,
    /// Estimate, computed value, p-value or rate.
    pub mc_mean: f64,
    pub mc_se: Option<f64>,
    pub z_score: Option<f64>,
    pub pass: bool,
}

impl Row {
    /// Passes when the estimate is within [`Z_MAX`] standard errors.
    pub fn monte_carlo(identity: &str, inputs: String, oracle: f64, mean: f64, se: f64) -> Self {
        let z = z_score(mean, se, oracle);
        Row { identity: identity.into(), inputs, oracle, mc_mean: mean, mc_se: Some(se), z_score: Some(z), pass: z.abs() <= Z_MAX }
    }

    /// Passes when `|value − oracle| ≤ tol`.
    pub fn exact(identity: &str, inputs: String, oracle: f64, value: f64, tol: f64) -> Self {
        let pass = (value - oracle).abs() <= tol;
        Row { identity: identity.into(), inputs, oracle, mc_mean: value, mc_se: None, z_score: None, pass }
    }

    /// Chi-square goodness of fit of `observed` counts to `expected` probabilities.
    pub fn chi_square(identity: &str, inputs: String, observed: &[u64], expected: &[f64]) -> Self {
        let r = chi_square(observed, expected);
        Row {
            identity: identity.into(),
            inputs: format!("{inputs} chi2={:.4} dof={}", r.statistic, r.dof),
            oracle: CHI_SQUARE_MIN_P,
            mc_mean: r.p_value,
            mc_se: None,
            z_score: None,
            pass: r.p_value > CHI_SQUARE_MIN_P,
        }
    }

    /// Passes only when every case holds.
    pub fn rate(identity: &str, inputs: String, hits: usize, total: usize) -> Self {
        let rate = if total == 0 { 1.0 } else { hits as f64 / total as f64 };
        Row {
            identity: identity.into(),
            inputs: format!("{inputs} cases={total}"),
            oracle: 1.0,
            mc_mean: rate,
            mc_se: None,
            z_score: None,
            pass: hits == total,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Report {
    pub rows: Vec<Row>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "identity,inputs,oracle,mc_mean,mc_se,z_score,pass")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                csv_field(&r.identity),
                csv_field(&r.inputs),
                r.oracle,
                r.mc_mean,
                r.mc_se.map(|v| v.to_string()).unwrap_or_default(),
                r.z_score.map(|v| format!("{v:.4}")).unwrap_or_default(),
                r.pass
            )?;
        }
        Ok(())
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Runs one suite.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<Report> {
    cfg.check()?;
    let rows = match suite {
        Suite::Eq1 => eq1(cfg)?,
        Suite::Extended => extended(cfg)?,
        Suite::Trees => trees(cfg)?,
        Suite::Eq3 => eq3(cfg)?,
        Suite::Thm1 => thm1(cfg)?,
        Suite::Bstar => bstar(cfg)?,
        Suite::Eq4 => eq4(cfg)?,
        Suite::Projection => projection(cfg)?,
        Suite::Zphi => zphi(cfg)?,
        Suite::Holonomy => holonomy_suite(cfg)?,
    };
    Ok(Report { rows })
}

/// Runs the given suites in order into one report.
pub fn run_suites(suites: &[Suite], cfg: &VerifyConfig) -> Result<Report> {
    let mut report = Report::default();
    for &s in suites {
        report.rows.extend(run_suite(s, cfg)?.rows);
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Shared grids and helpers

/// A labelled `(q, χ)` point.
struct TiltPoint {
    label: String,
    q: EdgeTilt,
    chi: Vec<f64>,
}

fn asymmetric(g: &WeightedGraph, forward: f64, backward: f64) -> EdgeTilt {
    EdgeTilt::from_fn(g, |x, y| Complex64::new(if x < y { forward } else { backward }, 0.0))
}

/// The nine-point grid: constants, asymmetric and complex tilts, with and without χ.
fn eq1_grid(g: &WeightedGraph) -> Vec<TiltPoint> {
    let n = g.len();
    let konst = |v: f64| vec![v; n];
    let phase = Complex64::from_polar(1.0, PI / 3.0);
    let spiral = EdgeTilt::from_fn(g, |x, y| Complex64::from_polar(0.8, if x < y { 0.7 } else { -0.7 }));
    let ramp: Vec<f64> = (0..n).map(|x| 0.2 * (x + 1) as f64).collect();
    let p = |label: &str, q: EdgeTilt, chi: Vec<f64>| TiltPoint { label: label.into(), q, chi };
    vec![
        p("q=1 chi=0", EdgeTilt::ones(g), konst(0.0)),
        p("q=0 chi=0", EdgeTilt::constant(g, 0.0), konst(0.0)),
        p("q=0.5 chi=0", EdgeTilt::constant(g, 0.5), konst(0.0)),
        p("q=1 chi=1", EdgeTilt::ones(g), konst(1.0)),
        p("q=0.5 chi=0.5", EdgeTilt::constant(g, 0.5), konst(0.5)),
        p("q=0.7/0.3 chi=0", asymmetric(g, 0.7, 0.3), konst(0.0)),
        p("q=0.7/0.3 chi=0.25", asymmetric(g, 0.7, 0.3), konst(0.25)),
        p("q=exp(i*pi/3) chi=0", EdgeTilt::constant(g, phase), konst(0.0)),
        p("q=0.8*exp(+-0.7i) chi=0.2(x+1)", spiral, ramp),
    ]
}

/// The three real points used for the chain functionals.
fn chain_grid(g: &WeightedGraph) -> Vec<TiltPoint> {
    let n = g.len();
    vec![
        TiltPoint { label: "q=0 chi=0".into(), q: EdgeTilt::constant(g, 0.0), chi: vec![0.0; n] },
        TiltPoint { label: "q=0.5 chi=0.3".into(), q: EdgeTilt::constant(g, 0.5), chi: vec![0.3; n] },
        TiltPoint { label: "q=0.7/0.3 chi=0".into(), q: asymmetric(g, 0.7, 0.3), chi: vec![0.0; n] },
    ]
}

/// One row for a real target, two (`part=re`, `part=im`) for a complex one.
fn complex_rows(rows: &mut Vec<Row>, identity: &str, inputs: &str, oracle: Complex64, est: &ComplexSummary, complex: bool) {
    if complex {
        rows.push(Row::monte_carlo(identity, format!("{inputs} part=re"), oracle.re, est.re.mean(), est.re.standard_error()));
        rows.push(Row::monte_carlo(identity, format!("{inputs} part=im"), oracle.im, est.im.mean(), est.im.standard_error()));
    } else {
        rows.push(Row::monte_carlo(identity, inputs.to_string(), oracle.re, est.re.mean(), est.re.standard_error()));
    }
}

fn is_complex(p: &TiltPoint) -> bool {
    p.q.values().iter().any(|v| v.im != 0.0)
}

fn merge_summaries(parts: Vec<Vec<ComplexSummary>>) -> Vec<ComplexSummary> {
    let mut out = vec![ComplexSummary::default(); parts.first().map_or(0, Vec::len)];
    for part in &parts {
        for (o, p) in out.iter_mut().zip(part) {
            o.merge(p);
        }
    }
    out
}

/// Tilt weights of the grid for soups drawn by `draw`, merged over replicas.
fn grid_estimates<F>(cfg: &VerifyConfig, tag: &str, g: &WeightedGraph, grid: &[TiltPoint], draw: F) -> Result<Vec<ComplexSummary>>
where
    F: Fn(&mut ChaCha8Rng) -> Result<LoopEnsemble> + Sync,
{
    let parts = cfg.replicate(tag, |n, rng| {
        let mut acc = vec![ComplexSummary::default(); grid.len()];
        for _ in 0..n {
            let soup = draw(rng)?;
            for (a, p) in acc.iter_mut().zip(grid) {
                a.push(soup.tilt_weight(g, &p.q, &p.chi, None)?);
            }
        }
        Ok(acc)
    })?;
    Ok(merge_summaries(parts))
}

/// Index of every spanning tree and its exact probability.
fn tree_index(g: &WeightedGraph) -> Result<(HashMap<RootedSpanningTree, usize>, Vec<f64>)> {
    let det = g.det();
    let mut index = HashMap::new();
    let mut probs = Vec::new();
    for (t, w) in enumerate_rooted_trees(g)? {
        index.insert(t, probs.len());
        probs.push(w / det);
    }
    Ok((index, probs))
}

fn marginal_index(marginal: Vec<(RootedSpanningTree, f64)>) -> (HashMap<RootedSpanningTree, usize>, Vec<f64>) {
    let mut index = HashMap::new();
    let mut probs = Vec::new();
    for (t, p) in marginal {
        index.insert(t, probs.len());
        probs.push(p);
    }
    (index, probs)
}

fn count_trees<'a>(index: &HashMap<RootedSpanningTree, usize>, trees: impl Iterator<Item = &'a RootedSpanningTree>) -> Vec<u64> {
    let mut counts = vec![0u64; index.len()];
    for t in trees {
        counts[index[t]] += 1;
    }
    counts
}

fn sum_counts(parts: Vec<Vec<u64>>) -> Vec<u64> {
    let mut out = vec![0u64; parts.first().map_or(0, Vec::len)];
    for p in parts {
        for (o, c) in out.iter_mut().zip(p) {
            *o += c;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Suites

fn eq1(cfg: &VerifyConfig) -> Result<Vec<Row>> {
    let mut rows = vec![
        Row::exact(
            "eq1_anchor",
            "graph=g1 q=1 chi=1".into(),
            0.5,
            expectation_identity(&fixtures::g1(), &EdgeTilt::ones(&fixtures::g1()), &[1.0])?.re(),
            EXACT_TOL,
        ),
        Row::exact(
            "eq1_anchor",
            "graph=g2 q=0 chi=0".into(),
            0.75,
            expectation_identity(&fixtures::g2(), &EdgeTilt::constant(&fixtures::g2(), 0.0), &[0.0; 2])?.re(),
            EXACT_TOL,
        ),
    ];
    for t in &cfg.graphs {
        let g = &t.graph;
        let grid = eq1_grid(g);
        let sampler = SoupSampler::new(g)?;
        let est = grid_estimates(cfg, &format!("eq1/{}", t.label), g, &grid, |rng| sampler.sample(rng))?;
        for (p, e) in grid.iter().zip(&est) {
            let oracle = expectation_identity(g, &p.q, &p.chi)?.value;
            complex_rows(&mut rows, "eq1", &format!("graph={} {} n={}", t.label, p.label, cfg.samples), oracle, e, is_complex(p));
        }
    }
    Ok(rows)
}

/// Pearson correlation between tree membership of an edge and its crossing
/// count, with a delta-method standard error.
fn correlation(flags: &[bool], counts: &[u64]) -> (f64, f64) {
    let n = flags.len() as f64;
    let mi = flags.iter().filter(|&&f| f).count() as f64 / n;
    let mn = counts.iter().sum::<u64>() as f64 / n;
    let (mut vi, mut vn) = (0.0, 0.0);
    let products: Summary = flags
        .iter()
        .zip(counts)
        .map(|(&f, &c)| {
            let (di, dn) = (f64::from(u8::from(f)) - mi, c as f64 - mn);
            vi += di * di;
            vn += dn * dn;
            di * dn
        })
        .collect();
    let scale = ((vi / n) * (vn / n)).sqrt();
    if scale == 0.0 {
        return (0.0, 0.0);
    }
    (products.mean() / scale, products.standard_error() / scale)
}

fn extended(cfg: &VerifyConfig) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for t in &cfg.graphs {
        let g = &t.graph;
        let grid = eq1_grid(g);
        let (index, probs) = tree_index(g)?;
        let edges = g.edges().len();
        struct Part {
            counts: Vec<u64>,
            acc: Vec<ComplexSummary>,
            flags: Vec<Vec<bool>>,
            crossings: Vec<Vec<u64>>,
        }
        let parts = cfg.replicate(&format!("extended/{}", t.label), |n, rng| {
            let mut part = Part {
                counts: vec![0; probs.len()],
                acc: vec![ComplexSummary::default(); grid.len()],
                flags: vec![Vec::with_capacity(n); edges],
                crossings: vec![Vec::with_capacity(n); edges],
            };
            for _ in 0..n {
                let (tree, soup) = sample_pair_extended_wilson(g, rng)?;
                part.counts[index[&tree]] += 1;
                for (a, p) in part.acc.iter_mut().zip(&grid) {
                    a.push(soup.tilt_weight(g, &p.q, &p.chi, None)?);
                }
                let n_e = soup.edge_crossings(g);
                for (e, (flags, crossings)) in part.flags.iter_mut().zip(&mut part.crossings).enumerate() {
                    flags.push(tree.contains_conductance(g, e));
                    crossings.push(n_e[e]);
                }
            }
            Ok(part)
        })?;
        let mut counts = vec![0u64; probs.len()];
        let mut flags = vec![Vec::new(); edges];
        let mut crossings = vec![Vec::new(); edges];
        let mut accs = Vec::new();
        for p in parts {
            for (c, x) in counts.iter_mut().zip(&p.counts) {
                *c += x;
            }
            for e in 0..edges {
                flags[e].extend_from_slice(&p.flags[e]);
                crossings[e].extend_from_slice(&p.crossings[e]);
            }
            accs.push(p.acc);
        }
        let inputs = format!("graph={} n={}", t.label, cfg.samples);
        rows.push(Row::chi_square("extended_tree", inputs.clone(), &counts, &probs));
        for (p, e) in grid.iter().zip(&merge_summaries(accs)) {
            let oracle = expectation_identity(g, &p.q, &p.chi)?.value;
            complex_rows(&mut rows, "extended_eq1", &format!("{inputs} {}", p.label), oracle, e, is_complex(p));
        }
        for e in 0..edges {
            let (r, se) = correlation(&flags[e], &crossings[e]);
            let ed = &g.edges()[e];
            rows.push(Row::monte_carlo(
                "extended_corr",
                format!("{inputs} edge={}{}", g.name(ed.u), g.name(ed.v)),
                0.0,
                r,
                se,
            ));
        }
    }
    Ok(rows)
}

fn trees(cfg: &VerifyConfig) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for t in &cfg.graphs {
        let g = &t.graph;
        let (index, probs) = tree_index(g)?;
        let inputs = format!("graph={} n={}", t.label, cfg.samples);
        let wilson = cfg.replicate(&format!("trees/wilson/{}", t.label), |n, rng| {
            let mut counts = vec![0u64; probs.len()];
            for _ in 0..n {
                counts[index[&sample_tree_wilson(g, rng)?]] += 1;
            }
            Ok(counts)
        })?;
        rows.push(Row::chi_square("trees_wilson", inputs.clone(), &sum_counts(wilson), &probs));
        let zeros_e = vec![0.0; g.edges().len()];
        let zeros_v = g.zeros();
        let exact = cfg.replicate(&format!("trees/exact/{}", t.label), |n, rng| {
            let mut counts = vec![0u64; probs.len()];
            for _ in 0..n {
                counts[index[&sample_tree_exact_lerw(g, &zeros_e, &zeros_v, rng)?]] += 1;
            }
            Ok(counts)
        })?;
        rows.push(Row::chi_square("trees_exact_lerw", inputs, &sum_counts(exact), &probs));
    }
    Ok(rows)
}

/// `(label, b, c)` pairings.
fn eq3_grid(g: &WeightedGraph) -> Vec<(String, EdgeWeights, EdgeWeights)> {
    let first = if g.edges().is_empty() { AugEdge::Killing(0) } else { AugEdge::Conductance(0) };
    let mut b_first = EdgeWeights::ones(g);
    b_first.set(first, 0.0);
    let mut b_mixed = EdgeWeights::ones(g);
    b_mixed.conductance.iter_mut().for_each(|v| *v = 0.3);
    let mut c_mixed = EdgeWeights::ones(g);
    c_mixed.killing.iter_mut().for_each(|v| *v = 2.0);
    vec![
        ("b=1 c=1".into(), EdgeWeights::ones(g), EdgeWeights::ones(g)),
        (format!("b[{}]=0 c=1", g.aug_edge_label(first)), b_first, EdgeWeights::ones(g)),
        ("b=1 c=0".into(), EdgeWeights::ones(g), EdgeWeights::constant(g, 0.0)),
        ("b=0.5 c=1.5".into(), EdgeWeights::constant(g, 0.5), EdgeWeights::constant(g, 1.5)),
        ("b=0.3|1 c=1|2".into(), b_mixed, c_mixed),
    ]
}

fn eq3(cfg: &VerifyConfig) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for t in &cfg.graphs {
        let g = &t.graph;
        let grid = eq3_grid(g);
        let edges = g.augmented_edges();
        let parts = cfg.replicate(&format!("eq3/{}", t.label), |n, rng| {
            let mut acc = vec![Summary::default(); grid.len()];
            for _ in 0..n {
                let tree = sample_tree_wilson(g, rng)?;
                for (a, (_, b, c)) in acc.iter_mut().zip(&grid) {
                    a.push(edges.iter().map(|&e| if tree.contains(g, e) { c.get(e) } else { b.get(e) }).product());
                }
            }
            Ok(acc)
        })?;
        let mut acc = vec![Summary::default(); grid.len()];
        for p in &parts {
            for (a, x) in acc.iter_mut().zip(p) {
                a.merge(x);
            }
        }
        for ((label, b, c), s) in grid.iter().zip(&acc) {
            let oracle = fermionic_pairing(g, b, c)?.re();
            rows.push(Row::monte_carlo(
                "eq3",
                format!("graph={} {label} n={}", t.label, cfg.samples),
                oracle,
                s.mean(),
                s.standard_error(),
            ));
        }
        // Indicator pairings single out one tree each.
        let mut worst: f64 = 0.0;
        let trees = enumerate_rooted_trees(g)?;
        for (tree, _) in &trees {
            let mut b = EdgeWeights::ones(g);
            let mut c = EdgeWeights::constant(g, 0.0);
            for e in tree.edges(g) {
                b.set(e, 0.0);
                c.set(e, 1.0);
            }
            worst = worst.max((fermionic_pairing(g, &b, &c)?.re() - tree_probability(g, tree)?).abs());
        }
        rows.push(Row::exact("eq3_indicator", format!("graph={} trees={}", t.label, trees.len()), 0.0, worst, EXACT_TOL));
    }
    Ok(rows)
}

/// States of `replicas` independent chains, each with its own burn-in.
fn chains(cfg: &VerifyConfig, tag: &str, g: &WeightedGraph, kind: ChainKind) -> Result<Vec<Vec<InteractionState>>> {
    cfg.replicate(tag, |n, rng| run_chain(g, kind, n as u64 + cfg.burnin, cfg.burnin, rng))
}

/// Pools per-chain batch-means estimates, weighting by chain length.
fn pooled_functional(
    g: &WeightedGraph,
    runs: &[Vec<InteractionState>],
    q: &EdgeTilt,
    b: &EdgeWeights,
    c: &EdgeWeights,
    chi: &[f64],
) -> Result<(f64, f64)> {
    let total: usize = runs.iter().map(Vec::len).sum();
    let (mut mean, mut var) = (0.0, 0.0);
    for r in runs {
        let est = estimate_functional(g, r, q, b, c, chi)?;
        let w = r.len() as f64 / total as f64;
        mean += w * est.mean.re;
        var += w * w * est.se_re * est.se_re;
    }
    Ok((mean, var.sqrt()))
}

fn chain_tree_counts(index: &HashMap<RootedSpanningTree, usize>, runs: &[Vec<InteractionState>]) -> Vec<u64> {
    count_trees(index, runs.iter().flatten().map(|s| &s.tree))
}

/// Indicator that the first conductance edge is off the tree, if there is one.
fn off_first_edge(g: &WeightedGraph) -> Option<(String, EdgeWeights)> {
    let e = g.edges().first()?;
    let mut c = EdgeWeights::ones(g);
    c.set(AugEdge::Conductance(0), 0.0);
    Some((format!("b=1 c[{}{}]=0", g.name(e.u), g.name(e.v)), c))
}

fn thm1(cfg: &VerifyConfig) -> Result<Vec<Row>> {
    if !(cfg.beta > 0.0 && cfg.beta < 1.0) {
        return Err(Error::Domain(format!("β = {} outside the open interval (0, 1)", cfg.beta)));
    }
    let mut rows = Vec::new();
    let g2 = fixtures::g2();
    for beta in [0.25, 0.5, 0.75] {
        rows.push(Row::exact(
            "thm1_partition",
            format!("graph=g2 beta={beta}"),
            2.0 / 3.0 + 1.0 / (4.0 - beta * beta),
            thm1_partition(&g2, beta)?.re(),
            EXACT_TOL,
        ));
    }
    let mut betas = vec![cfg.beta];
    if cfg.beta != 0.9 {
        betas.push(0.9);
    }
    for t in &cfg.graphs {
        let g = &t.graph;
        let ones = EdgeWeights::ones(g);
        rows.push(Row::exact(
            "thm1_normalized",
            format!("graph={} beta={}", t.label, cfg.beta),
            1.0,
            thm1_expectation(g, cfg.beta, &ones, &ones, &EdgeTilt::ones(g), &g.zeros())?.re(),
            EXACT_TOL,
        ));
        for &beta in &betas {
            let runs = chains(cfg, &format!("thm1/{}/{beta}", t.label), g, ChainKind::Beta(beta))?;
            let inputs = format!("graph={} beta={beta} sweeps={} burnin={}", t.label, cfg.samples, cfg.burnin);
            let (index, probs) = marginal_index(thm1_tree_marginal(g, beta)?);
            rows.push(Row::chi_square("thm1_tree", inputs.clone(), &chain_tree_counts(&index, &runs), &probs));
            for p in chain_grid(g) {
                let oracle = thm1_expectation(g, beta, &ones, &ones, &p.q, &p.chi)?.re();
                let (mean, se) = pooled_functional(g, &runs, &p.q, &ones, &ones, &p.chi)?;
                rows.push(Row::monte_carlo("thm1_functional", format!("{inputs} {} b=1 c=1", p.label), oracle, mean, se));
            }
            if let Some((label, c)) = off_first_edge(g) {
                let (q, chi) = (EdgeTilt::ones(g), g.zeros());
                let oracle = thm1_expectation(g, beta, &ones, &c, &q, &chi)?.re();
                let (mean, se) = pooled_functional(g, &runs, &q, &ones, &c, &chi)?;
                rows.push(Row::monte_carlo("thm1_functional", format!("{inputs} q=1 chi=0 {label}"), oracle, mean, se));
            }
        }
        // Near β = 1 the tree and the soup decouple.
        let beta = 0.999;
        let runs = chains(cfg, &format!("thm1/{}/{beta}", t.label), g, ChainKind::Beta(beta))?;
        let states: Vec<&InteractionState> = runs.iter().flatten().collect();
        for (e, ed) in g.edges().iter().enumerate() {
            let flags: Vec<bool> = states.iter().map(|s| s.tree.contains_conductance(g, e)).collect();
            let counts: Vec<u64> = states.iter().map(|s| s.soup.edge_crossings(g)[e]).collect();
            let (r, se) = correlation(&flags, &counts);
            rows.push(Row::monte_carlo(
                "thm1_independence",
                format!("graph={} beta={beta} edge={}{} sweeps={}", t.label, g.name(ed.u), g.name(ed.v), cfg.samples),
                0.0,
                r,
                se,
            ));
        }
    }
    Ok(rows)
}

fn bstar(cfg: &VerifyConfig) -> Result<Vec<Row>> {
    if !(cfg.b.is_finite() && cfg.b > 0.0) {
        return Err(Error::Domain(format!("b = {} must be positive", cfg.b)));
    }
    let mut rows = vec![Row::exact("bstar_partition", "graph=g2 b=1".into(), 11.0 / 15.0, bstar_partition(&fixtures::g2(), 1.0)?.re(), EXACT_TOL)];
    for t in &cfg.graphs {
        let g = &t.graph;
        let ones = EdgeWeights::ones(g);
        let b = cfg.b;
        let runs = chains(cfg, &format!("bstar/{}/{b}", t.label), g, ChainKind::BStar(b))?;
        let inputs = format!("graph={} b={b} sweeps={} burnin={}", t.label, cfg.samples, cfg.burnin);
        let (index, probs) = marginal_index(bstar_tree_marginal(g, b)?);
        rows.push(Row::chi_square("bstar_tree", inputs.clone(), &chain_tree_counts(&index, &runs), &probs));
        for p in chain_grid(g) {
            let oracle = bstar_expectation(g, b, &ones, &ones, &p.q, &p.chi)?.re();
            let (mean, se) = pooled_functional(g, &runs, &p.q, &ones, &ones, &p.chi)?;
            rows.push(Row::monte_carlo("bstar_functional", format!("{inputs} {} b=1 c=1", p.label), oracle, mean, se));
        }
    }
    Ok(rows)
}

/// Grid for the cover identities.
fn eq4_grid(g: &WeightedGraph) -> Vec<TiltPoint> {
    let n = g.len();
    vec![
        TiltPoint { label: "q=1 chi=0".into(), q: EdgeTilt::ones(g), chi: vec![0.0; n] },
        TiltPoint { label: "q=0.5 chi=0.3".into(), q: EdgeTilt::constant(g, 0.5), chi: vec![0.3; n] },
        TiltPoint { label: "q=0.7/0.3 chi=0".into(), q: asymmetric(g, 0.7, 0.3), chi: vec![0.0; n] },
        TiltPoint {
            label: "q=exp(i*pi/3) chi=0.1".into(),
            q: EdgeTilt::constant(g, Complex64::from_polar(1.0, PI / 3.0)),
            chi: vec![0.1; n],
        },
    ]
}

fn cover_label(c: &CoverTarget) -> String {
    format!("graph={} order={} m={:?}", c.label, c.group.order(), c.connection.values())
}

fn eq4(cfg: &VerifyConfig) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    // Fixture anchors.
    let g2 = fixtures::g2();
    let g3 = fixtures::g3();
    let z2 = FiniteGroup::cyclic(2);
    let s3 = FiniteGroup::s3();
    let flip3 = flip_ab(&g3, &z2);
    rows.push(Row::exact("eq4_det", "graph=g3 order=2 m=flip(ab)".into(), 320.0, build_cover(&g3, &z2, &flip3)?.graph().det(), 1e-9));
    rows.push(Row::exact(
        "eq4_anchor",
        "graph=g3 order=2 m=flip(ab) q=1 chi=0".into(),
        0.8,
        cover_identity(&g3, &z2, &flip3, &EdgeTilt::ones(&g3), &g3.zeros())?.re(),
        EXACT_TOL,
    ));
    rows.push(Row::exact(
        "eq4_anchor",
        "graph=g2 order=2 m=flip(ab) q=1 chi=0".into(),
        1.0,
        cover_identity(&g2, &z2, &flip_ab(&g2, &z2), &EdgeTilt::ones(&g2), &g2.zeros())?.re(),
        1e-12,
    ));
    for (label, g, group) in [("g2", &g2, &z2), ("g3", &g3, &z2), ("g3", &g3, &s3)] {
        rows.push(Row::exact(
            "eq4_trivial",
            format!("graph={label} order={} m=trivial q=1 chi=0", group.order()),
            1.0,
            cover_identity(g, group, &ConnectionRep::trivial(g, group), &EdgeTilt::ones(g), &g.zeros())?.re(),
            1e-12,
        ));
    }

    let c = &cfg.cover;
    let (g, group, m) = (&c.graph, &c.group, &c.connection);
    let label = cover_label(c);
    rows.push(Row::exact(
        "eq4_trivial",
        format!("graph={} order={} m=trivial q=1 chi=0", c.label, group.order()),
        1.0,
        cover_identity(g, group, &ConnectionRep::trivial(g, group), &EdgeTilt::ones(g), &g.zeros())?.re(),
        1e-12,
    ));
    let grid = eq4_grid(g);
    let base = cover_identity(g, group, m, &EdgeTilt::ones(g), &g.zeros())?.re();
    // The two readings differ by exactly the untilted joint value.
    let mut worst: f64 = 0.0;
    for p in &grid {
        let joint = cover_identity(g, group, m, &p.q, &p.chi)?.value;
        let thinned = cover_identity_thinned(g, group, m, &p.q, &p.chi)?.value;
        worst = worst.max(((joint - thinned * base) / joint).norm());
    }
    rows.push(Row::exact("eq4_readings", format!("{label} points={}", grid.len()), 0.0, worst, 1e-12));

    // Joint reading: |M| independent soups on the base, weighted by 1[all trivial].
    let order = group.order();
    let sampler = SoupSampler::new(g)?;
    let parts = cfg.replicate("eq4/joint", |n, rng| {
        let mut acc = vec![ComplexSummary::default(); grid.len()];
        for _ in 0..n {
            let mut w = vec![Complex64::new(1.0, 0.0); grid.len()];
            let mut trivial = true;
            for _ in 0..order {
                let soup = sampler.sample(rng)?;
                trivial &= all_loops_trivial(g, group, m, &soup);
                for (wi, p) in w.iter_mut().zip(&grid) {
                    *wi *= soup.tilt_weight(g, &p.q, &p.chi, None)?;
                }
            }
            for (a, wi) in acc.iter_mut().zip(w) {
                a.push(if trivial { wi } else { Complex64::new(0.0, 0.0) });
            }
        }
        Ok(acc)
    })?;
    for (p, e) in grid.iter().zip(&merge_summaries(parts)) {
        let oracle = cover_identity(g, group, m, &p.q, &p.chi)?.value;
        complex_rows(&mut rows, "eq4_joint", &format!("{label} {} n={}", p.label, cfg.samples), oracle, e, is_complex(p));
    }

    // Thinned reading: projections of the cover soup.
    let cover = build_cover(g, group, m)?;
    let cover_sampler = SoupSampler::new(cover.graph())?;
    let est = grid_estimates(cfg, "eq4/thinned", g, &grid, |rng| Ok(project_cover_soup(&cover, &cover_sampler.sample(rng)?)))?;
    for (p, e) in grid.iter().zip(&est) {
        let oracle = cover_identity_thinned(g, group, m, &p.q, &p.chi)?.value;
        complex_rows(&mut rows, "eq4_thinned", &format!("{label} {} n={}", p.label, cfg.samples), oracle, e, is_complex(p));
    }
    Ok(rows)
}

fn projection(cfg: &VerifyConfig) -> Result<Vec<Row>> {
    let c = &cfg.cover;
    let (g, group, m) = (&c.graph, &c.group, &c.connection);
    let label = cover_label(c);
    let order = group.order();
    let mut rows = Vec::new();

    // P(every loop of the union of |M| soups is trivial) = joint value at q ≡ 1, χ ≡ 0.
    let sampler = SoupSampler::new(g)?;
    let parts = cfg.replicate("projection/all-trivial", |n, rng| {
        let mut s = Summary::default();
        for _ in 0..n {
            let mut ok = true;
            for _ in 0..order {
                ok &= all_loops_trivial(g, group, m, &sampler.sample(rng)?);
            }
            s.push(if ok { 1.0 } else { 0.0 });
        }
        Ok(s)
    })?;
    let mut s = Summary::default();
    parts.iter().for_each(|p| s.merge(p));
    let oracle = cover_identity(g, group, m, &EdgeTilt::ones(g), &g.zeros())?.re();
    rows.push(Row::monte_carlo("projection_all_trivial", format!("{label} n={}", cfg.samples), oracle, s.mean(), s.standard_error()));

    // Projected cover soups are supported on trivial loops, and lifting inverts projection.
    let cover = build_cover(g, group, m)?;
    let cover_sampler = SoupSampler::new(cover.graph())?;
    let parts = cfg.replicate("projection/lift", |n, rng| {
        let (mut support, mut roundtrip) = (0usize, 0usize);
        for _ in 0..n {
            let projected = project_cover_soup(&cover, &cover_sampler.sample(rng)?);
            if all_loops_trivial(g, group, m, &projected) {
                support += 1;
                let lifted = lift_trivial_loops(g, group, m, &cover, &projected, rng)?;
                let back = project_cover_soup(&cover, &lifted);
                let times_match = back
                    .trivial_time
                    .iter()
                    .zip(&projected.trivial_time)
                    .all(|(a, b)| (a - b).abs() <= 1e-12 * b.max(1.0));
                if back.loops == projected.loops && times_match {
                    roundtrip += 1;
                }
            }
        }
        Ok((support, roundtrip))
    })?;
    let support: usize = parts.iter().map(|p| p.0).sum();
    let roundtrip: usize = parts.iter().map(|p| p.1).sum();
    rows.push(Row::rate("projection_support", label.clone(), support, cfg.samples));
    rows.push(Row::rate("projection_roundtrip", label, roundtrip, cfg.samples));
    Ok(rows)
}

fn zphi(cfg: &VerifyConfig) -> Result<Vec<Row>> {
    let c = &cfg.cover;
    let (g, group, gamma) = (&c.graph, &c.group, &c.gamma);
    let label = format!("graph={} order={} gamma={:?}", c.label, group.order(), gamma.probs());
    let mut rows = Vec::new();

    let sums = z_phi_iota(g, group, gamma)?;
    let parts = cfg.replicate("zphi/mc", |n, rng| z_phi_monte_carlo(g, group, gamma, n, rng))?;
    let mut s = Summary::default();
    parts.iter().for_each(|p| s.merge(p));
    let arb = ZPhiArbitration::new(sums, &s);
    let (oracle, z) = match arb.selected {
        Some(crate::connections::ZPhiReading::InverseRatio) => (sums.inverse_ratio, arb.z_inverse_ratio),
        _ => (sums.cover_ratio, arb.z_cover_ratio),
    };
    rows.push(Row {
        identity: "zphi_arbitration".into(),
        inputs: format!(
            "{label} n={} selected={} cover_ratio={} (z={:.3}) inverse_ratio={} (z={:.3})",
            cfg.samples,
            arb.selected.map_or("none".to_string(), |r| r.to_string()),
            sums.cover_ratio,
            arb.z_cover_ratio,
            sums.inverse_ratio,
            arb.z_inverse_ratio
        ),
        oracle,
        mc_mean: arb.mc_mean,
        mc_se: Some(arb.mc_se),
        z_score: Some(z),
        pass: arb.selected.is_some(),
    });

    // The ν_{1_ι} chain.
    let runs = cfg.replicate("zphi/gibbs", |n, rng| {
        gibbs_nu_phi(g, group, gamma, n as u64 + cfg.burnin, cfg.burnin, PhiBlockUpdate::Auto, rng)
    })?;
    let states = runs.iter().flat_map(|r| &r.states);
    let support = states.clone().filter(|s| all_loops_trivial(g, group, &s.connection, &s.soup)).count();
    let total = states.clone().count();
    let inputs = format!("{label} sweeps={} burnin={}", cfg.samples, cfg.burnin);
    rows.push(Row::rate("nu_phi_support", inputs.clone(), support, total));
    let (index, probs) = marginal_index(nu_phi_tree_marginal(g, group, gamma)?);
    rows.push(Row::chi_square("nu_phi_tree", inputs, &count_trees(&index, states.map(|s| &s.tree)), &probs));
    Ok(rows)
}

/// A based closed walk from a uniform start, cut at its first return.
fn random_loop<R: Rng + ?Sized>(g: &WeightedGraph, rng: &mut R) -> Option<Loop> {
    const MAX_LEN: usize = 64;
    let start = rng.random_range(0..g.len());
    let mut skeleton = vec![start];
    let mut x = start;
    while skeleton.len() <= MAX_LEN {
        let nb = g.neighbors(x);
        if nb.is_empty() {
            return None;
        }
        x = nb[rng.random_range(0..nb.len())].0;
        if x == start {
            let len = skeleton.len();
            return Loop::new(g, skeleton, vec![1.0; len]).ok();
        }
        skeleton.push(x);
    }
    None
}

fn random_connection<R: Rng + ?Sized>(g: &WeightedGraph, group: &FiniteGroup, rng: &mut R) -> Result<ConnectionRep> {
    ConnectionRep::from_values(g, group, (0..g.edges().len()).map(|_| rng.random_range(0..group.order())).collect())
}

fn holonomy_suite(cfg: &VerifyConfig) -> Result<Vec<Row>> {
    let g = &cfg.cover.graph;
    let label = &cfg.cover.label;
    if g.edges().is_empty() {
        return Err(Error::Domain(format!("graph {label} has no edges to carry loops")));
    }
    let mut rows = Vec::new();
    let groups = [("Z2", FiniteGroup::cyclic(2)), ("Z3", FiniteGroup::cyclic(3)), ("S3", FiniteGroup::s3())];
    let trees: Vec<RootedSpanningTree> = enumerate_rooted_trees(g)?.into_iter().map(|(t, _)| t).collect();
    for (name, group) in &groups {
        let mut rng = cfg.stream(&format!("holonomy/{label}/{name}"));
        let inputs = format!("graph={label} group={name}");
        let (mut gauge, mut geodesic, mut reduce, mut total) = (0, 0, 0, 0);
        while total < HOLONOMY_CHECKS {
            let Some(l) = random_loop(g, &mut rng) else { continue };
            total += 1;
            let m = random_connection(g, group, &mut rng)?;
            let h: Vec<usize> = (0..g.len()).map(|_| rng.random_range(0..group.order())).collect();
            let m2 = gauge_transform(g, group, &m, &h)?;
            if holonomy(g, group, &m2, &l) == holonomy(g, group, &m, &l) {
                gauge += 1;
            }
            let reduced = geodesic_reduce(g, &l);
            if group.class_of(holonomy_element(g, group, &m, &reduced)) == holonomy(g, group, &m, &l) {
                geodesic += 1;
            }
            let t = &trees[rng.random_range(0..trees.len())];
            let (r, hr) = t_reduce(g, group, &m, t)?;
            let on_tree = (0..g.edges().len()).filter(|&e| t.contains_conductance(g, e)).all(|e| r.values()[e] == group.identity());
            if on_tree && gauge_transform(g, group, &m, &hr)? == r && gauge_equivalent(g, group, &m, &r) {
                reduce += 1;
            }
        }
        rows.push(Row::rate("holonomy_gauge", inputs.clone(), gauge, total));
        rows.push(Row::rate("holonomy_geodesic", inputs.clone(), geodesic, total));
        rows.push(Row::rate("holonomy_t_reduce", inputs, reduce, total));
    }
    // ℤ/2 connections are percolation configurations.
    let z2 = FiniteGroup::cyclic(2);
    let mut rng = cfg.stream(&format!("holonomy/{label}/percolation"));
    let mut ok = 0;
    for _ in 0..HOLONOMY_CHECKS {
        let open: Vec<bool> = (0..g.edges().len()).map(|_| rng.random_bool(0.5)).collect();
        let m = z2_connection(g, &z2, &open)?;
        let m2 = random_connection(g, &z2, &mut rng)?;
        if z2_edge_set(&z2, &m)? == open && z2_connection(g, &z2, &z2_edge_set(&z2, &m2)?)? == m2 {
            ok += 1;
        }
    }
    rows.push(Row::rate("holonomy_percolation", format!("graph={label} group=Z2"), ok, HOLONOMY_CHECKS));
    // Canonical forms are gauge invariant.
    let mut rng = cfg.stream(&format!("holonomy/{label}/canonical"));
    let s3 = FiniteGroup::s3();
    let mut ok = 0;
    for _ in 0..HOLONOMY_CHECKS {
        let m = random_connection(g, &s3, &mut rng)?;
        let h: Vec<usize> = (0..g.len()).map(|_| rng.random_range(0..s3.order())).collect();
        if canonical_form(g, &s3, &gauge_transform(g, &s3, &m, &h)?) == canonical_form(g, &s3, &m) {
            ok += 1;
        }
    }
    rows.push(Row::rate("holonomy_canonical", format!("graph={label} group=S3"), ok, HOLONOMY_CHECKS));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyConfig {
        VerifyConfig { samples: 4_000, replicas: 4, burnin: 200, ..VerifyConfig::default() }
    }

    #[test]
    fn csv_shape() {
        let report = Report {
            rows: vec![
                Row::exact("x", "a=1, b=2".into(), 1.0, 1.0, 0.0),
                Row::monte_carlo("y", "n=10".into(), 0.5, 0.6, 0.1),
            ],
        };
        let mut out = Vec::new();
        report.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "identity,inputs,oracle,mc_mean,mc_se,z_score,pass");
        assert_eq!(lines[1], "x,\"a=1, b=2\",1,1,,,true");
        assert!(lines[2].starts_with("y,n=10,0.5,0.6,0.1,1.0000,true"));
    }

    #[test]
    fn split_covers_all_samples() {
        let cfg = VerifyConfig { samples: 10, replicas: 4, ..VerifyConfig::default() };
        assert_eq!(cfg.split(), vec![3, 3, 2, 2]);
        assert!(VerifyConfig { samples: 3, replicas: 4, ..VerifyConfig::default() }.check().is_err());
    }

    #[test]
    fn replicas_are_order_independent_of_threads() {
        let cfg = small();
        let a = run_suite(Suite::Trees, &cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| run_suite(Suite::Trees, &cfg).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn beta_domain_is_open() {
        let cfg = VerifyConfig { beta: 1.0, ..small() };
        assert!(matches!(run_suite(Suite::Thm1, &cfg), Err(Error::Domain(_))));
    }

    #[test]
    fn exact_anchors_hold() {
        let report = run_suite(Suite::Eq4, &small()).unwrap();
        for r in report.rows.iter().filter(|r| r.z_score.is_none()) {
            assert!(r.pass, "{r:?}");
        }
        let anchor = report.rows.iter().find(|r| r.identity == "eq4_anchor").unwrap();
        assert!((anchor.mc_mean - 0.8).abs() < 1e-10);
    }

    #[test]
    fn correlation_of_independent_data_is_small() {
        let mut rng = RngStream::new(2, 0).rng();
        let flags: Vec<bool> = (0..20_000).map(|_| rng.random_bool(0.3)).collect();
        let counts: Vec<u64> = (0..20_000).map(|_| rng.random_range(0..5)).collect();
        let (r, se) = correlation(&flags, &counts);
        assert!((r / se).abs() < 4.0);
        let same: Vec<u64> = flags.iter().map(|&f| u64::from(f)).collect();
        assert!((correlation(&flags, &same).0 - 1.0).abs() < 1e-9);
    }
}
