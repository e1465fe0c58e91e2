//! The `loopsoup` command line: argument parsing and the four subcommands.
//!
//! Output is assembled in memory and written only after the command has
//! succeeded, so a failing command never leaves partial output behind.
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

use std::collections::{BTreeMap, HashMap};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::connections::{gibbs_nu_phi, nu_phi_tree_marginal, ConnectionRep, GroupDistribution, PhiBlockUpdate};
use crate::error::{Error, Result};
use crate::graph::{AugEdge, WeightedGraph};
use crate::group::FiniteGroup;
use crate::interactions::{offtree_crossing_diagnostic, run_chain, ChainKind};
use crate::loops::LoopEnsemble;
use crate::oracles::{bstar_tree_marginal, thm1_tree_marginal};
use crate::rng::RngStream;
use crate::samplers::{sample_pair, sample_pair_extended_wilson, sample_soup, sample_tree_wilson};
use crate::stats::{chi_square, CHI_SQUARE_MIN_P};
use crate::tree::{enumerate_rooted_trees, RootedSpanningTree};
use crate::verify::{run_suites, CoverTarget, Suite, Target, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "loopsoup", version, about = "Loop soups, random spanning trees and connections on weighted graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print λ, det(M_λ − C) and the Green function as CSV.
    Green(GreenArgs),
    /// Draw samples from one of the samplers.
    Sample(SampleArgs),
    /// Compare Monte Carlo estimates with the exact identities.
    Verify(VerifyArgs),
    /// Run an interacting Gibbs chain and report its tree marginal.
    Gibbs(GibbsArgs),
}

#[derive(Debug, Args)]
pub struct GreenArgs {
    /// Graph file (JSON).
    #[arg(long)]
    pub graph: PathBuf,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SampleKind {
    Tree,
    Soup,
    Pair,
    PairExtended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    pub kind: SampleKind,
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
    /// `jsonl`: every sample; `csv`: tree frequencies, or per-sample soup statistics.
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suites to run (default: all).
    #[arg(value_enum)]
    pub identity: Vec<Suite>,
    /// Graph file; defaults to the built-in fixtures g1, g2 and g3.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Group file or built-in name (Z1..Z6, S3) for the connection suites [default: Z2].
    #[arg(long)]
    pub group: Option<String>,
    /// Connection file; defaults to the flip on `a-b` for the built-in triangle and to the trivial connection otherwise.
    #[arg(long)]
    pub connection: Option<PathBuf>,
    /// `uniform`, `delta` or comma-separated probabilities of the group elements.
    #[arg(long, default_value = "uniform")]
    pub gamma: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Samples (or post-burn-in sweeps) per estimate.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Independent replicas, run in parallel and merged in order.
    #[arg(long, default_value_t = 8)]
    pub replicas: usize,
    #[arg(long, default_value_t = 1_000)]
    pub burnin: u64,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GibbsKind {
    Beta,
    Bstar,
    Phi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UpdateArg {
    Auto,
    Exact,
    Metropolis,
}

#[derive(Debug, Args)]
pub struct GibbsArgs {
    pub kind: GibbsKind,
    #[arg(long)]
    pub graph: PathBuf,
    /// Group file or built-in name (Z1..Z6, S3) [default: Z2].
    #[arg(long)]
    pub group: Option<String>,
    /// `uniform`, `delta` or comma-separated probabilities of the group elements.
    #[arg(long, default_value = "uniform")]
    pub gamma: String,
    /// Block update for `phi`.
    #[arg(long, value_enum, default_value_t = UpdateArg::Auto)]
    pub update: UpdateArg,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Sweeps kept after burn-in.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 1_000)]
    pub burnin: u64,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    /// Chain output (JSON lines); omitted when not given.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // Help and version requests exit 0 and go to stdout.
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(out) => match emit(&out, stdout) {
            Ok(()) => out.code,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                EXIT_USAGE
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

/// Everything a command produces, written only on success.
struct Output {
    stdout: Vec<u8>,
    file: Option<(PathBuf, Vec<u8>)>,
    code: i32,
}

fn emit(out: &Output, stdout: &mut dyn Write) -> Result<()> {
    if let Some((path, bytes)) = &out.file {
        std::fs::write(path, bytes).map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?;
    }
    stdout.write_all(&out.stdout)?;
    stdout.flush()?;
    Ok(())
}

/// Sends `body` to `--out` when given, otherwise to stdout.
fn routed(out: &Option<PathBuf>, body: Vec<u8>, code: i32) -> Output {
    match out {
        Some(p) => Output { stdout: Vec::new(), file: Some((p.clone(), body)), code },
        None => Output { stdout: body, file: None, code },
    }
}

fn execute(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::Green(a) => cmd_green(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Gibbs(a) => cmd_gibbs(a),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<WeightedGraph> {
    WeightedGraph::from_json(&read(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn label_of(path: &Path) -> String {
    path.file_stem().map_or_else(|| "graph".into(), |s| s.to_string_lossy().into_owned())
}

/// A built-in group name or a group file.
pub fn load_group(spec: &str) -> Result<FiniteGroup> {
    match spec {
        "S3" => return Ok(FiniteGroup::s3()),
        s if s.len() == 2 && s.starts_with('Z') => {
            if let Some(n) = s[1..].parse::<usize>().ok().filter(|n| (1..=6).contains(n)) {
                return Ok(FiniteGroup::cyclic(n));
            }
        }
        _ => {}
    }
    let path = Path::new(spec);
    FiniteGroup::from_json(&read(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// `uniform`, `delta` or a comma-separated probability vector.
pub fn parse_gamma(group: &FiniteGroup, spec: &str) -> Result<GroupDistribution> {
    match spec {
        "uniform" => Ok(GroupDistribution::uniform(group)),
        "delta" => Ok(GroupDistribution::delta(group)),
        s => {
            let probs = s
                .split(',')
                .map(|p| p.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad probability `{p}` in --gamma"))))
                .collect::<Result<Vec<_>>>()?;
            GroupDistribution::new(group, probs)
        }
    }
}

fn csv_num(v: f64) -> String {
    format!("{v}")
}

fn cmd_green(a: &GreenArgs) -> Result<Output> {
    let g = load_graph(&a.graph)?;
    let green = g.green()?;
    let mut s = String::from("kind,row,col,value\n");
    for x in 0..g.len() {
        writeln!(s, "lambda,{},,{}", g.name(x), csv_num(g.lambda()[x])).expect("string write");
    }
    writeln!(s, "det,,,{}", csv_num(g.det())).expect("string write");
    for x in 0..g.len() {
        for y in 0..g.len() {
            writeln!(s, "G,{},{},{}", g.name(x), g.name(y), csv_num(green[(x, y)])).expect("string write");
        }
    }
    Ok(routed(&a.out, s.into_bytes(), EXIT_OK))
}

#[derive(Serialize)]
struct TreeRecord {
    tree: Vec<String>,
}

/// Counts per distinct tree, with exact probabilities when the graph is small
/// enough to enumerate.
fn tree_frequencies(g: &WeightedGraph, trees: &[RootedSpanningTree], exact: Option<Vec<(RootedSpanningTree, f64)>>) -> String {
    let mut counts: BTreeMap<Vec<String>, (u64, Option<f64>)> = BTreeMap::new();
    if let Some(list) = &exact {
        for (t, p) in list {
            counts.insert(t.labels(g), (0, Some(*p)));
        }
    }
    for t in trees {
        counts.entry(t.labels(g)).or_insert((0, None)).0 += 1;
    }
    let n = trees.len() as f64;
    let mut s = String::from("tree,count,frequency,probability\n");
    for (labels, (c, p)) in &counts {
        let p = p.map(csv_num).unwrap_or_default();
        writeln!(s, "{},{c},{},{p}", labels.join(" "), csv_num(*c as f64 / n)).expect("string write");
    }
    if exact.is_some() {
        let observed: Vec<u64> = counts.values().map(|v| v.0).collect();
        let expected: Vec<f64> = counts.values().map(|v| v.1.unwrap_or(0.0)).collect();
        let r = chi_square(&observed, &expected);
        writeln!(
            s,
            "# chi2={:.4} dof={} p={} pass={}",
            r.statistic,
            r.dof,
            csv_num(r.p_value),
            r.p_value > CHI_SQUARE_MIN_P
        )
        .expect("string write");
    }
    s
}

/// Matrix-tree probabilities, or `None` past the enumeration guard.
fn exact_trees(g: &WeightedGraph) -> Result<Option<Vec<(RootedSpanningTree, f64)>>> {
    match enumerate_rooted_trees(g) {
        Ok(list) => {
            let det = g.det();
            Ok(Some(list.into_iter().map(|(t, w)| (t, w / det)).collect()))
        }
        Err(Error::TooLarge(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn soup_csv_header(g: &WeightedGraph) -> String {
    let mut s = String::from("sample,loops");
    for e in 0..g.edges().len() {
        write!(s, ",N_{}", g.aug_edge_label(AugEdge::Conductance(e))).expect("string write");
    }
    for x in 0..g.len() {
        write!(s, ",L_{}", g.name(x)).expect("string write");
    }
    s.push('\n');
    s
}

fn soup_csv_row(g: &WeightedGraph, i: usize, soup: &LoopEnsemble) -> String {
    let mut s = format!("{i},{}", soup.loops.len());
    for n in soup.edge_crossings(g) {
        write!(s, ",{n}").expect("string write");
    }
    for v in soup.occupation_field() {
        write!(s, ",{}", csv_num(v)).expect("string write");
    }
    s.push('\n');
    s
}

fn cmd_sample(a: &SampleArgs) -> Result<Output> {
    let g = load_graph(&a.graph)?;
    if a.samples == 0 {
        return Err(Error::Domain("--samples must be positive".into()));
    }
    let mut rng = RngStream::new(a.seed, 0).rng();
    let mut buf = Vec::new();
    let mut trees = Vec::new();
    if a.format == Format::Csv && a.kind == SampleKind::Soup {
        buf.extend_from_slice(soup_csv_header(&g).as_bytes());
    }
    for i in 0..a.samples {
        let (tree, soup) = match a.kind {
            SampleKind::Tree => (Some(sample_tree_wilson(&g, &mut rng)?), None),
            SampleKind::Soup => (None, Some(sample_soup(&g, &mut rng)?)),
            SampleKind::Pair => {
                let (t, s) = sample_pair(&g, &mut rng)?;
                (Some(t), Some(s))
            }
            SampleKind::PairExtended => {
                let (t, s) = sample_pair_extended_wilson(&g, &mut rng)?;
                (Some(t), Some(s))
            }
        };
        match a.format {
            Format::Jsonl => {
                if let Some(t) = &tree {
                    serde_json::to_writer(&mut buf, &TreeRecord { tree: t.labels(&g) })?;
                    buf.push(b'\n');
                }
                if let Some(s) = &soup {
                    s.write_jsonl(&g, &mut buf)?;
                }
            }
            Format::Csv => {
                if let Some(t) = tree {
                    trees.push(t);
                } else if let Some(s) = &soup {
                    buf.extend_from_slice(soup_csv_row(&g, i, s).as_bytes());
                }
            }
        }
    }
    if a.format == Format::Csv && a.kind != SampleKind::Soup {
        buf = tree_frequencies(&g, &trees, exact_trees(&g)?).into_bytes();
    }
    Ok(routed(&a.out, buf, EXIT_OK))
}

fn cmd_verify(a: &VerifyArgs) -> Result<Output> {
    let mut cfg = VerifyConfig {
        seed: a.seed,
        samples: a.samples,
        replicas: a.replicas,
        burnin: a.burnin,
        beta: a.beta,
        b: a.b,
        ..VerifyConfig::default()
    };
    if let Some(path) = &a.graph {
        cfg.graphs = vec![Target { label: label_of(path), graph: load_graph(path)? }];
    }
    if a.graph.is_some() || a.group.is_some() || a.connection.is_some() || a.gamma != "uniform" {
        let (label, graph) = match &a.graph {
            Some(p) => (label_of(p), load_graph(p)?),
            None => (cfg.cover.label.clone(), cfg.cover.graph.clone()),
        };
        let group = match &a.group {
            Some(s) => load_group(s)?,
            None => FiniteGroup::cyclic(2),
        };
        let connection = match &a.connection {
            Some(p) => ConnectionRep::from_json(&graph, &group, &read(p)?)?,
            None if a.graph.is_none() && group.order() == 2 => cfg.cover.connection.clone(),
            None => ConnectionRep::trivial(&graph, &group),
        };
        let gamma = parse_gamma(&group, &a.gamma)?;
        cfg.cover = CoverTarget { label, graph, group, connection, gamma };
    }
    let suites: Vec<Suite> = if a.identity.is_empty() { Suite::ALL.to_vec() } else { a.identity.clone() };
    let report = run_suites(&suites, &cfg)?;
    let mut buf = Vec::new();
    report.write_csv(&mut buf)?;
    let code = if report.passed() { EXIT_OK } else { EXIT_FAILED };
    Ok(routed(&a.out, buf, code))
}

#[derive(Serialize)]
struct ChainRecord<'a> {
    sweep: u64,
    tree: Vec<String>,
    crossings: BTreeMap<String, u64>,
    occupation: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    connection: Option<&'a BTreeMap<String, usize>>,
}

fn chain_record<'a>(
    g: &WeightedGraph,
    sweep: u64,
    tree: &RootedSpanningTree,
    soup: &LoopEnsemble,
    connection: Option<&'a BTreeMap<String, usize>>,
) -> ChainRecord<'a> {
    let crossings = soup
        .edge_crossings(g)
        .into_iter()
        .enumerate()
        .map(|(e, n)| (g.aug_edge_label(AugEdge::Conductance(e)), n))
        .collect();
    let occupation = soup.occupation_field().into_iter().enumerate().map(|(x, v)| (g.name(x).to_string(), v)).collect();
    ChainRecord { sweep, tree: tree.labels(g), crossings, occupation, connection }
}

fn cmd_gibbs(a: &GibbsArgs) -> Result<Output> {
    let g = load_graph(&a.graph)?;
    let mut rng = RngStream::new(a.seed, 0).rng();
    let sweeps = a.samples.checked_add(a.burnin).ok_or_else(|| Error::Domain("too many sweeps".into()))?;
    let mut chain = Vec::new();
    let mut report = String::new();
    match a.kind {
        GibbsKind::Beta | GibbsKind::Bstar => {
            let (kind, exact) = match a.kind {
                GibbsKind::Beta => (ChainKind::Beta(a.beta), thm1_tree_marginal(&g, a.beta)),
                _ => (ChainKind::BStar(a.b), bstar_tree_marginal(&g, a.b)),
            };
            let states = run_chain(&g, kind, sweeps, a.burnin, &mut rng)?;
            let exact = match exact {
                Ok(m) => Some(m),
                Err(Error::TooLarge(_)) => None,
                Err(e) => return Err(e),
            };
            if a.out.is_some() {
                for s in &states {
                    serde_json::to_writer(&mut chain, &chain_record(&g, s.sweep, &s.tree, &s.soup, None))?;
                    chain.push(b'\n');
                }
            }
            let param = match kind {
                ChainKind::Beta(b) => format!("beta={b}"),
                ChainKind::BStar(b) => format!("b={b}"),
            };
            writeln!(report, "# chain={} {param} sweeps={} burnin={} seed={}", kind_name(a.kind), a.samples, a.burnin, a.seed)
                .expect("string write");
            let trees: Vec<RootedSpanningTree> = states.iter().map(|s| s.tree.clone()).collect();
            report.push_str(&tree_frequencies(&g, &trees, exact));
            let d = offtree_crossing_diagnostic(&g, &states)?;
            writeln!(report, "# offtree_crossings mean={} se={} contractible_rate={}", d.mean, d.se, d.contractible_rate)
                .expect("string write");
        }
        GibbsKind::Phi => {
            let group = load_group(a.group.as_deref().unwrap_or("Z2"))?;
            let gamma = parse_gamma(&group, &a.gamma)?;
            let update = match a.update {
                UpdateArg::Auto => PhiBlockUpdate::Auto,
                UpdateArg::Exact => PhiBlockUpdate::Exact,
                UpdateArg::Metropolis => PhiBlockUpdate::Metropolis,
            };
            let run = gibbs_nu_phi(&g, &group, &gamma, sweeps, a.burnin, update, &mut rng)?;
            let mut names: HashMap<ConnectionRep, BTreeMap<String, usize>> = HashMap::new();
            let mut support = 0usize;
            for s in &run.states {
                if crate::connections::all_loops_trivial(&g, &group, &s.connection, &s.soup) {
                    support += 1;
                }
                if a.out.is_some() {
                    let m = names.entry(s.connection.clone()).or_insert_with(|| {
                        s.connection.to_spec(&g).edges.into_iter().map(|e| (format!("{}-{}", e.u, e.v), e.g)).collect()
                    });
                    serde_json::to_writer(&mut chain, &chain_record(&g, s.sweep, &s.tree, &s.soup, Some(m)))?;
                    chain.push(b'\n');
                }
            }
            let exact = match nu_phi_tree_marginal(&g, &group, &gamma) {
                Ok(m) => Some(m),
                Err(Error::TooLarge(_)) => None,
                Err(e) => return Err(e),
            };
            let update_name = match run.update {
                PhiBlockUpdate::Exact => "exact",
                PhiBlockUpdate::Metropolis => "metropolis",
                PhiBlockUpdate::Auto => "auto",
            };
            writeln!(
                report,
                "# chain=phi order={} gamma={:?} update={update_name} sweeps={} burnin={} seed={}",
                group.order(),
                gamma.probs(),
                a.samples,
                a.burnin,
                a.seed
            )
            .expect("string write");
            if gamma.is_delta(&group) {
                report.push_str("# gamma is the point mass at the identity: every connection is trivial\n");
            }
            let trees: Vec<RootedSpanningTree> = run.states.iter().map(|s| s.tree.clone()).collect();
            report.push_str(&tree_frequencies(&g, &trees, exact));
            writeln!(
                report,
                "# support={support}/{} accepted={}/{}",
                run.states.len(),
                run.accepted,
                sweeps
            )
            .expect("string write");
        }
    }
    Ok(Output { stdout: report.into_bytes(), file: a.out.clone().map(|p| (p, chain)), code: EXIT_OK })
}

fn kind_name(k: GibbsKind) -> &'static str {
    match k {
        GibbsKind::Beta => "beta",
        GibbsKind::Bstar => "bstar",
        GibbsKind::Phi => "phi",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(name: &str) -> String {
        format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
    }

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("loopsoup").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn green_on_g2() {
        let (code, out, _) = run_capture(&["green", "--graph", &fixture("g2.json")]);
        assert_eq!(code, 0);
        assert!(out.contains("det,,,3\n"));
        let g_ab: f64 = out.lines().find(|l| l.starts_with("G,a,b,")).unwrap()[6..].parse().unwrap();
        assert!((g_ab - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_capture(&["green"]).0, 2);
        assert_eq!(run_capture(&["sample", "forest", "--graph", &fixture("g2.json")]).0, 2);
        let (code, out, err) = run_capture(&["green", "--graph", "/nonexistent.json"]);
        assert_eq!(code, 2);
        assert!(out.is_empty() && err.contains("cannot read"));
    }

    #[test]
    fn builtin_groups_and_gamma() {
        assert_eq!(load_group("S3").unwrap().order(), 6);
        assert_eq!(load_group("Z5").unwrap().order(), 5);
        assert!(load_group("Z9").is_err());
        let z3 = load_group("Z3").unwrap();
        assert!(parse_gamma(&z3, "0.5,0.25,0.25").is_ok());
        assert!(parse_gamma(&z3, "0.5,0.3,0.2").is_err());
        assert!(parse_gamma(&z3, "x").is_err());
    }

    #[test]
    fn soup_on_g1_has_only_trivial_records() {
        let (code, out, _) = run_capture(&["sample", "soup", "--graph", &fixture("g1.json"), "--samples", "5"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 5);
        assert!(out.lines().all(|l| l.starts_with("{\"trivial_time\"")));
    }

    #[test]
    fn verify_rejects_beta_one() {
        let (code, out, err) = run_capture(&["verify", "thm1", "--beta", "1", "--samples", "100", "--replicas", "1"]);
        assert_eq!(code, 2);
        assert!(out.is_empty());
        assert!(err.contains("open interval"));
    }
}
