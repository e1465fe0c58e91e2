//! End-to-end acceptance: one PASS/FAIL line per criterion, then a single
//! assertion over all of them. Run with `--nocapture` to see the lines.

use std::time::{Duration, Instant};

use loopsoup::cli;
use loopsoup::connections::ZPhiReading;
use loopsoup::graph::fixtures::{g2, g3};
use loopsoup::oracles::{bstar_partition, bstar_tree_marginal, thm1_partition, thm1_tree_marginal};
use loopsoup::stats::{CHI_SQUARE_MIN_P, Z_MAX};
use loopsoup::tree::enumerate_rooted_trees;
use loopsoup::verify::{run_suite, Report, Row, Suite, VerifyConfig};

/// Closed forms must agree to this absolute tolerance.
const EXACT: f64 = 1e-10;
/// Cover determinants are O(10²); compared to this absolute tolerance.
const DET_TOL: f64 = 1e-9;
/// Wall-clock budget for the first suite.
const EQ1_BUDGET: Duration = Duration::from_secs(120);
/// Samples per Monte Carlo estimate and fuzz cases per holonomy property.
const SAMPLES: usize = 100_000;
const FUZZ: usize = 10_000;

struct Outcome {
    criterion: usize,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn report(criterion: usize, name: &'static str, pass: bool, detail: String) -> Outcome {
    println!("criterion {criterion:>2} [{name}]: {} — {detail}", if pass { "PASS" } else { "FAIL" });
    Outcome { criterion, name, pass, detail }
}

fn rows<'a>(r: &'a Report, identity: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
    r.rows.iter().filter(move |row| row.identity == identity)
}

fn row<'a>(r: &'a Report, identity: &str, needle: &str) -> &'a Row {
    r.rows
        .iter()
        .find(|row| row.identity == identity && row.inputs.contains(needle))
        .unwrap_or_else(|| panic!("no {identity} row matching `{needle}`"))
}

fn failures(r: &Report) -> String {
    let f: Vec<String> = r.failures().map(|row| format!("{} [{}]", row.identity, row.inputs)).collect();
    if f.is_empty() {
        "none".into()
    } else {
        f.join("; ")
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn marginal_matches(marginal: &[(loopsoup::tree::RootedSpanningTree, f64)], expected: &[f64]) -> bool {
    let mut got: Vec<f64> = marginal.iter().map(|(_, p)| *p).collect();
    let mut want = expected.to_vec();
    got.sort_by(f64::total_cmp);
    want.sort_by(f64::total_cmp);
    got.len() == want.len() && got.iter().zip(&want).all(|(a, b)| close(*a, *b, EXACT))
}

fn cli_bytes(args: &[&str]) -> (i32, Vec<u8>) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(std::iter::once("loopsoup").chain(args.iter().copied()), &mut out, &mut err);
    (code, out)
}

#[test]
fn acceptance() {
    let cfg = VerifyConfig { samples: SAMPLES, ..VerifyConfig::default() };
    const { assert!(Z_MAX == 3.0 && CHI_SQUARE_MIN_P == 0.001) };
    let mut out = Vec::new();

    // 1. Soup expectations on the nine-point grid.
    let start = Instant::now();
    let eq1 = run_suite(Suite::Eq1, &cfg).unwrap();
    let elapsed = start.elapsed();
    let anchors = rows(&eq1, "eq1_anchor").count() == 2 && rows(&eq1, "eq1_anchor").all(|r| r.pass);
    let per_graph = ["g1", "g2", "g3"].iter().all(|g| {
        let points: std::collections::BTreeSet<&str> = rows(&eq1, "eq1")
            .filter(|r| r.inputs.starts_with(&format!("graph={g} ")))
            .map(|r| r.inputs.split(" part=").next().unwrap())
            .collect();
        points.len() == 9
    });
    out.push(report(
        1,
        "soup expectations",
        eq1.passed() && anchors && per_graph && elapsed <= EQ1_BUDGET,
        format!(
            "{} rows, max |z| = {:.3}, failures: {}, {:.1}s",
            eq1.rows.len(),
            eq1.rows.iter().filter_map(|r| r.z_score).fold(0.0, |m: f64, z| m.max(z.abs())),
            failures(&eq1),
            elapsed.as_secs_f64()
        ),
    ));

    // 2. Wilson trees against matrix-tree probabilities.
    let trees = run_suite(Suite::Trees, &cfg).unwrap();
    let uniform = |g: &loopsoup::graph::WeightedGraph, p: f64| {
        let det = g.det();
        enumerate_rooted_trees(g).unwrap().iter().all(|(_, w)| close(w / det, p, EXACT))
    };
    let (w2, w3) = (row(&trees, "trees_wilson", "graph=g2"), row(&trees, "trees_wilson", "graph=g3"));
    out.push(report(
        2,
        "tree marginal",
        uniform(&g2(), 1.0 / 3.0) && uniform(&g3(), 1.0 / 16.0) && w2.pass && w3.pass,
        format!("chi-square p(g2) = {:.4}, p(g3) = {:.4}", w2.mc_mean, w3.mc_mean),
    ));

    // 3. The coupled pair from one Wilson run.
    let ext = run_suite(Suite::Extended, &cfg).unwrap();
    out.push(report(
        3,
        "extended Wilson coupling",
        ext.passed() && rows(&ext, "extended_corr").count() == 4,
        format!(
            "tree chi-square p(g2) = {:.4}, p(g3) = {:.4}, max |z| = {:.3}, failures: {}",
            row(&ext, "extended_tree", "graph=g2").mc_mean,
            row(&ext, "extended_tree", "graph=g3").mc_mean,
            ext.rows.iter().filter_map(|r| r.z_score).fold(0.0, |m: f64, z| m.max(z.abs())),
            failures(&ext)
        ),
    ));

    // 4. The β-interacting pair.
    let partition_ok = [0.25, 0.5, 0.75]
        .iter()
        .all(|&b| close(thm1_partition(&g2(), b).unwrap().re(), 2.0 / 3.0 + 1.0 / (4.0 - b * b), EXACT));
    let marginal_ok = marginal_matches(&thm1_tree_marginal(&g2(), 0.5).unwrap(), &[5.0 / 14.0, 5.0 / 14.0, 4.0 / 14.0]);
    let thm1 = run_suite(Suite::Thm1, &cfg).unwrap();
    let functional = row(&thm1, "thm1_functional", "graph=g2 beta=0.5 sweeps=100000 burnin=1000 q=0 chi=0 b=1 c=1");
    let chain = row(&thm1, "thm1_tree", "graph=g2 beta=0.5");
    out.push(report(
        4,
        "beta-interacting pair",
        partition_ok
            && marginal_ok
            && close(functional.oracle, 45.0 / 56.0, EXACT)
            && functional.pass
            && chain.pass
            && thm1.passed(),
        format!(
            "E[q=0] = {:.5} ± {:.5} vs 45/56 (z = {:.3}), tree chi-square p = {:.4}, failures: {}",
            functional.mc_mean,
            functional.mc_se.unwrap(),
            functional.z_score.unwrap(),
            chain.mc_mean,
            failures(&thm1)
        ),
    ));

    // 5. The killing-interacting pair.
    let bstar = run_suite(Suite::Bstar, &cfg).unwrap();
    let z = bstar_partition(&g2(), 1.0).unwrap().re();
    let marginal_ok = marginal_matches(&bstar_tree_marginal(&g2(), 1.0).unwrap(), &[3.0 / 11.0, 3.0 / 11.0, 5.0 / 11.0]);
    let chain = row(&bstar, "bstar_tree", "graph=g2 b=1");
    out.push(report(
        5,
        "killing-interacting pair",
        close(z, 11.0 / 15.0, EXACT) && marginal_ok && chain.pass && bstar.passed(),
        format!("Z = {z:.12}, tree chi-square p = {:.4}, failures: {}", chain.mc_mean, failures(&bstar)),
    ));

    // 6. Cover identities and the projection law.
    let eq4 = run_suite(Suite::Eq4, &cfg).unwrap();
    let proj = run_suite(Suite::Projection, &cfg).unwrap();
    let det = row(&eq4, "eq4_det", "graph=g3");
    let value = row(&eq4, "eq4_anchor", "graph=g3");
    let trivial_ok = rows(&eq4, "eq4_trivial").all(|r| close(r.mc_mean, 1.0, 1e-12));
    let all_trivial = row(&proj, "projection_all_trivial", "");
    out.push(report(
        6,
        "covers",
        trivial_ok
            && close(det.mc_mean, 320.0, DET_TOL)
            && close(value.mc_mean, 0.8, EXACT)
            && all_trivial.pass
            && eq4.passed()
            && proj.passed(),
        format!(
            "det = {}, identity = {}, P(all trivial) = {:.5} ± {:.5} (z = {:.3}), failures: {}",
            det.mc_mean,
            value.mc_mean,
            all_trivial.mc_mean,
            all_trivial.mc_se.unwrap(),
            all_trivial.z_score.unwrap(),
            failures(&Report { rows: eq4.rows.iter().chain(&proj.rows).cloned().collect() })
        ),
    ));

    // 7. Holonomy algebra.
    let hol = run_suite(Suite::Holonomy, &cfg).unwrap();
    let complete = hol.rows.iter().all(|r| r.inputs.ends_with(&format!("cases={FUZZ}")));
    out.push(report(
        7,
        "holonomy algebra",
        hol.passed() && complete && rows(&hol, "holonomy_percolation").count() == 1,
        format!("{} properties × {FUZZ} cases, failures: {}", hol.rows.len(), failures(&hol)),
    ));

    // 8 and 9. The partition function for 1_ι and the ν chain.
    let zphi = run_suite(Suite::Zphi, &cfg).unwrap();
    let arb = row(&zphi, "zphi_arbitration", "");
    let selected = arb.inputs.split("selected=").nth(1).and_then(|s| s.split(' ').next()).unwrap_or("none");
    let named = [ZPhiReading::CoverRatio.to_string(), ZPhiReading::InverseRatio.to_string()].contains(&selected.to_string());
    out.push(report(
        8,
        "partition-function arbitration",
        arb.pass && named,
        format!("estimate {:.5} ± {:.5}; selected {selected}; {}", arb.mc_mean, arb.mc_se.unwrap(), arb.inputs),
    ));
    let support = row(&zphi, "nu_phi_support", "");
    let tree = row(&zphi, "nu_phi_tree", "");
    out.push(report(
        9,
        "nu chain",
        support.pass && support.mc_mean == 1.0 && tree.pass,
        format!("support rate = {}, tree chi-square p = {:.4}", support.mc_mean, tree.mc_mean),
    ));

    // 10. Every command is byte-for-byte reproducible.
    let dir = tempfile::tempdir().unwrap();
    let fixture = |n: &str| format!("{}/fixtures/{n}", env!("CARGO_MANIFEST_DIR"));
    let (g2f, g3f) = (fixture("g2.json"), fixture("g3.json"));
    let chain_a = dir.path().join("a.jsonl").display().to_string();
    let chain_b = dir.path().join("b.jsonl").display().to_string();
    let commands: Vec<Vec<&str>> = vec![
        vec!["green", "--graph", &g3f],
        vec!["sample", "tree", "--graph", &g3f, "--samples", "200", "--seed", "5"],
        vec!["sample", "soup", "--graph", &g3f, "--samples", "200", "--seed", "5"],
        vec!["sample", "pair", "--graph", &g2f, "--samples", "200", "--format", "csv"],
        vec!["sample", "pair-extended", "--graph", &g3f, "--samples", "200"],
        vec!["sample", "soup", "--graph", &g2f, "--samples", "200", "--format", "csv"],
        vec!["verify", "eq1", "eq4", "zphi", "--samples", "2000", "--replicas", "3", "--burnin", "100"],
        vec!["gibbs", "beta", "--graph", &g2f, "--samples", "2000", "--burnin", "50"],
        vec!["gibbs", "bstar", "--graph", &g3f, "--samples", "2000", "--burnin", "50"],
        vec!["gibbs", "phi", "--graph", &g3f, "--samples", "2000", "--burnin", "50"],
    ];
    let mut identical = 0;
    for c in &commands {
        let (a, b) = (cli_bytes(c), cli_bytes(c));
        if a == b && a.0 == 0 && !a.1.is_empty() {
            identical += 1;
        }
    }
    let mut chain_same = true;
    for kind in ["beta", "bstar", "phi"] {
        let args = |p: &str| {
            vec!["gibbs", kind, "--graph", g3f.as_str(), "--samples", "500", "--burnin", "10", "--seed", "9", "--out"]
                .into_iter()
                .map(String::from)
                .chain([p.to_string()])
                .collect::<Vec<_>>()
        };
        let (ra, rb) = (args(&chain_a), args(&chain_b));
        let ca = cli_bytes(&ra.iter().map(String::as_str).collect::<Vec<_>>());
        let cb = cli_bytes(&rb.iter().map(String::as_str).collect::<Vec<_>>());
        let (fa, fb) = (std::fs::read(&chain_a).unwrap(), std::fs::read(&chain_b).unwrap());
        chain_same &= ca == cb && fa == fb && !fa.is_empty();
    }
    out.push(report(
        10,
        "determinism",
        identical == commands.len() && chain_same,
        format!("{identical}/{} commands identical on rerun, chain files identical: {chain_same}", commands.len()),
    ));

    let failed: Vec<String> =
        out.iter().filter(|o| !o.pass).map(|o| format!("{} ({}): {}", o.criterion, o.name, o.detail)).collect();
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.join("\n"));
}
