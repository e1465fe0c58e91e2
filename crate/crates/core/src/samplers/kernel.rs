use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::tree::Parent;

/// Per-sample limit on discrete steps.
pub const STEP_BUDGET: u64 = 1_000_000_000;

/// A sub-Markov jump chain on the vertices: holding rates and jump
/// probabilities. The missing mass at each vertex is the killing probability.
#[derive(Debug, Clone)]
pub(crate) struct Kernel {
    pub rates: Vec<f64>,
    /// `(target, probability)` per vertex.
    pub moves: Vec<Vec<(usize, f64)>>,
}

impl Kernel {
    /// The chain of `g`: jumps `C_{x,y}/λ_x`, holding rate `λ_x`.
    pub fn from_graph(g: &WeightedGraph) -> Self {
        Self::tilted(g, &vec![1.0; g.edges().len()], &g.zeros()).expect("unit tilt is valid")
    }

    /// Conductances `C_e · scale_e`, rates `λ + extra_kill`.
    pub fn tilted(g: &WeightedGraph, scale: &[f64], extra_kill: &[f64]) -> Result<Self> {
        if scale.len() != g.edges().len() {
            return Err(Error::Domain(format!("{} edge scales for {} edges", scale.len(), g.edges().len())));
        }
        if let Some(s) = scale.iter().find(|&&s| !(s > 0.0 && s <= 1.0)) {
            return Err(Error::Domain(format!("edge scale {s} outside (0, 1]")));
        }
        g.check_chi(extra_kill)?;
        let rates: Vec<f64> = g.lambda().iter().zip(extra_kill).map(|(l, k)| l + k).collect();
        let moves = (0..g.len())
            .map(|x| {
                g.neighbors(x)
                    .iter()
                    .map(|&(y, e)| (y, g.edges()[e].conductance * scale[e] / rates[x]))
                    .collect()
            })
            .collect();
        Ok(Kernel { rates, moves })
    }

    /// Jump chain with weights `C_e e^{a_e}` and killing weights `κ_x e^{b_x}`,
    /// normalized in log space so that large tilts do not overflow. Holding
    /// rates are those of `g`.
    pub fn from_log_scales(g: &WeightedGraph, edge_log_scale: &[f64], kill_log_scale: &[f64]) -> Result<Self> {
        if edge_log_scale.len() != g.edges().len() || kill_log_scale.len() != g.len() {
            return Err(Error::Domain("log-scale vectors do not match the graph".into()));
        }
        if edge_log_scale.iter().chain(kill_log_scale).any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(Error::Domain("log scales must be finite or −∞".into()));
        }
        let moves = (0..g.len())
            .map(|x| {
                let logs: Vec<(usize, f64)> = g
                    .neighbors(x)
                    .iter()
                    .map(|&(y, e)| (y, g.edges()[e].conductance.ln() + edge_log_scale[e]))
                    .collect();
                let kill = if g.killing()[x] > 0.0 {
                    g.killing()[x].ln() + kill_log_scale[x]
                } else {
                    f64::NEG_INFINITY
                };
                let top = logs.iter().map(|p| p.1).fold(kill, f64::max);
                let total: f64 = logs.iter().map(|p| (p.1 - top).exp()).sum::<f64>() + (kill - top).exp();
                logs.into_iter().map(|(y, l)| (y, (l - top).exp() / total)).collect()
            })
            .collect();
        Ok(Kernel { rates: g.lambda().to_vec(), moves })
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    /// Dense jump matrix `P`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut p = DMatrix::zeros(n, n);
        for (x, row) in self.moves.iter().enumerate() {
            for &(y, pr) in row {
                p[(x, y)] += pr;
            }
        }
        p
    }

    /// One jump from `x`; `Parent::Root` means the chain was killed.
    pub fn step<R: Rng + ?Sized>(&self, x: usize, rng: &mut R) -> Parent {
        let mut u: f64 = rng.random();
        for &(y, p) in &self.moves[x] {
            if u < p {
                return Parent::Vertex(y);
            }
            u -= p;
        }
        Parent::Root
    }
}
