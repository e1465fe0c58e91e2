//! Exact sampling of the Poisson loop ensemble.
//!
//! Loops are grouped by their smallest vertex `x_i` in graph order. Loops with
//! minimal vertex `x_i` live in `H_i = {x_i, …, x_n}`; their number is Poisson
//! with mean `−log(1 − r_i)`, where `r_i` is the probability that the chain
//! started at `x_i` returns to it without leaving `H_i` or dying. Each such
//! loop visits `x_i` a Logarithmic(`r_i`) number of times and is the
//! concatenation of that many independent excursions drawn from the
//! return-conditioned chain.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use super::kernel::{Kernel, STEP_BUDGET};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::loops::{Loop, LoopEnsemble};

/// Logarithmic tail mass left out of the cached cumulative table.
const LOG_TABLE_TAIL: f64 = 1e-12;

/// Logarithmic distribution `P(k) = r^k / (k · (−log(1−r)))`, `k ≥ 1`,
/// sampled by inversion.
#[derive(Debug, Clone)]
pub(crate) struct Logarithmic {
    r: f64,
    norm: f64,
    cumulative: Vec<f64>,
}

impl Logarithmic {
    pub fn new(r: f64) -> Self {
        assert!(r > 0.0 && r < 1.0, "logarithmic parameter {r} outside (0,1)");
        let norm = -(-r).ln_1p();
        let mut cumulative = Vec::new();
        let (mut acc, mut pow) = (0.0, 1.0);
        let mut k = 1u32;
        loop {
            pow *= r;
            acc += pow / (f64::from(k) * norm);
            cumulative.push(acc);
            // Tail after k is at most r^{k+1} / ((k+1)(1−r) norm).
            let tail = pow * r / (f64::from(k + 1) * (1.0 - r) * norm);
            if tail < LOG_TABLE_TAIL || acc >= 1.0 {
                break;
            }
            k += 1;
        }
        Logarithmic { r, norm, cumulative }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        let idx = self.cumulative.partition_point(|&c| c < u);
        if idx < self.cumulative.len() {
            return idx as u64 + 1;
        }
        // Beyond the table: continue the series term by term.
        let mut k = self.cumulative.len() as u64;
        let mut acc = *self.cumulative.last().unwrap();
        let mut pow = self.r.powi(k as i32);
        while acc < u {
            k += 1;
            pow *= self.r;
            let term = pow / (k as f64 * self.norm);
            if term == 0.0 {
                break;
            }
            acc += term;
        }
        k
    }

    #[cfg(test)]
    pub fn pmf(&self, k: u64) -> f64 {
        self.r.powi(k as i32) / (k as f64 * self.norm)
    }
}

#[derive(Debug, Clone)]
struct Level {
    r: f64,
    mean_loops: f64,
    visits: Option<Logarithmic>,
    /// Return-conditioned jumps `(target, probability)` for vertices in `H_i`.
    conditioned: Vec<Vec<(usize, f64)>>,
}

/// Precomputed exact sampler for the loop soup of a sub-Markov chain.
#[derive(Debug, Clone)]
pub struct SoupSampler {
    rates: Vec<f64>,
    levels: Vec<Level>,
}

impl SoupSampler {
    /// Sampler for the soup of `g`.
    pub fn new(g: &WeightedGraph) -> Result<Self> {
        Self::from_kernel(&Kernel::from_graph(g))
    }

    /// Sampler for the soup of the chain with conductances `C∘edge_scale` and
    /// rates `λ + extra_kill`.
    pub fn tilted(g: &WeightedGraph, edge_scale: &[f64], extra_kill: &[f64]) -> Result<Self> {
        Self::from_kernel(&Kernel::tilted(g, edge_scale, extra_kill)?)
    }

    pub(crate) fn from_kernel(kernel: &Kernel) -> Result<Self> {
        let n = kernel.len();
        let p = kernel.matrix();
        let levels = (0..n).map(|i| build_level(kernel, &p, i)).collect::<Result<Vec<_>>>()?;
        Ok(SoupSampler { rates: kernel.rates.clone(), levels })
    }

    /// Return probabilities `r_i` in vertex order.
    pub fn return_probabilities(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.r).collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<LoopEnsemble> {
        let mut loops = Vec::new();
        let mut steps: u64 = 0;
        for (i, level) in self.levels.iter().enumerate() {
            let Some(visits) = &level.visits else { continue };
            let count = if level.mean_loops > 0.0 {
                Poisson::new(level.mean_loops).expect("positive mean").sample(rng) as u64
            } else {
                0
            };
            for _ in 0..count {
                let k = visits.sample(rng);
                let mut skeleton = Vec::new();
                for _ in 0..k {
                    skeleton.push(i);
                    let mut y = conditioned_step(&level.conditioned[i], rng);
                    while y != i {
                        skeleton.push(y);
                        steps += 1;
                        if steps > STEP_BUDGET {
                            return Err(Error::StepBudget { budget: STEP_BUDGET, context: "soup excursion" });
                        }
                        y = conditioned_step(&level.conditioned[y], rng);
                    }
                }
                let holding = skeleton.iter().map(|&x| self.hold(x, rng)).collect();
                loops.push(Loop::new_unchecked(skeleton, holding));
            }
        }
        let trivial_time = (0..self.rates.len()).map(|x| self.hold(x, rng)).collect();
        Ok(LoopEnsemble { loops, trivial_time })
    }

    fn hold<R: Rng + ?Sized>(&self, x: usize, rng: &mut R) -> f64 {
        let e: f64 = Exp1.sample(rng);
        e / self.rates[x]
    }
}

fn conditioned_step<R: Rng + ?Sized>(row: &[(usize, f64)], rng: &mut R) -> usize {
    let mut u: f64 = rng.random();
    for &(y, p) in row {
        if u < p {
            return y;
        }
        u -= p;
    }
    row.last().expect("conditioned chain has a move").0
}

fn build_level(kernel: &Kernel, p: &DMatrix<f64>, i: usize) -> Result<Level> {
    let n = kernel.len();
    let h_size = n - i;

    // r_i = 1 − 1/(λ_i G_i(x_i, x_i)) with G_i the Green function on H_i.
    let mut a = DMatrix::zeros(h_size, h_size);
    for (ai, x) in (i..n).enumerate() {
        for (aj, y) in (i..n).enumerate() {
            let delta = if x == y { 1.0 } else { 0.0 };
            a[(ai, aj)] = kernel.rates[x] * (delta - p[(x, y)]);
        }
    }
    let lu = a.lu();
    let mut e0 = DVector::zeros(h_size);
    e0[0] = 1.0;
    let g_col = lu.solve(&e0).ok_or_else(|| Error::Singular(format!("restricted Green function at level {i}")))?;
    let r = (1.0 - 1.0 / (kernel.rates[i] * g_col[0])).clamp(0.0, 1.0);

    // h(y) = P_y(reach x_i before dying or leaving H_i), h(x_i) = 1.
    let mut h = vec![0.0; n];
    h[i] = 1.0;
    if h_size > 1 {
        let d = h_size - 1;
        let mut m = DMatrix::zeros(d, d);
        let mut rhs = DVector::zeros(d);
        for (di, x) in (i + 1..n).enumerate() {
            for (dj, y) in (i + 1..n).enumerate() {
                m[(di, dj)] = if x == y { 1.0 } else { 0.0 } - p[(x, y)];
            }
            rhs[di] = p[(x, i)];
        }
        let sol = m.lu().solve(&rhs).ok_or_else(|| Error::Singular(format!("hitting probabilities at level {i}")))?;
        for (di, x) in (i + 1..n).enumerate() {
            h[x] = sol[di].clamp(0.0, 1.0);
        }
    }

    if r <= 0.0 {
        return Ok(Level { r: 0.0, mean_loops: 0.0, visits: None, conditioned: Vec::new() });
    }
    let mut conditioned = vec![Vec::new(); n];
    for x in i..n {
        if h[x] <= 0.0 {
            continue;
        }
        let row: Vec<(usize, f64)> = kernel.moves[x]
            .iter()
            .filter(|&&(y, _)| y >= i && h[y] > 0.0)
            .map(|&(y, pr)| (y, pr * h[y]))
            .collect();
        let total: f64 = row.iter().map(|e| e.1).sum();
        if total > 0.0 {
            conditioned[x] = row.into_iter().map(|(y, w)| (y, w / total)).collect();
        }
    }
    let mean_loops = -(-r).ln_1p();
    Ok(Level { r, mean_loops, visits: Some(Logarithmic::new(r)), conditioned })
}

/// One exact sample of the loop soup of `g`.
pub fn sample_soup<R: Rng + ?Sized>(g: &WeightedGraph, rng: &mut R) -> Result<LoopEnsemble> {
    SoupSampler::new(g)?.sample(rng)
}

/// One exact sample of the soup of the chain with conductances `C∘edge_scale`
/// and holding rates `λ + extra_kill`.
pub fn sample_soup_tilted<R: Rng + ?Sized>(
    g: &WeightedGraph,
    edge_scale: &[f64],
    extra_kill: &[f64],
    rng: &mut R,
) -> Result<LoopEnsemble> {
    SoupSampler::tilted(g, edge_scale, extra_kill)?.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::rng::RngStream;
    use crate::stats::Summary;

    #[test]
    fn logarithmic_table_is_normalized() {
        for r in [1e-6, 0.1, 0.5, 0.9, 0.999] {
            let d = Logarithmic::new(r);
            let total: f64 = (1..=d.cumulative.len() as u64).map(|k| d.pmf(k)).sum();
            assert!((1.0 - total).abs() < 1e-11, "r={r} total={total}");
        }
    }

    #[test]
    fn logarithmic_sample_mean() {
        let r = 0.6;
        let d = Logarithmic::new(r);
        let mut rng = RngStream::new(5, 0).rng();
        let mut s = Summary::default();
        for _ in 0..200_000 {
            s.push(d.sample(&mut rng) as f64);
        }
        let mean = r / ((1.0 - r) * -(-r).ln_1p());
        assert!((s.mean() - mean).abs() < 4.0 * s.standard_error());
    }

    #[test]
    fn return_probability_agrees_with_hitting_solve() {
        // r_i from the Green function must equal Σ_z P(x_i,z) h(z).
        let g = g3();
        let kernel = Kernel::tilted(&g, &[0.9, 0.4, 1.0], &[0.0, 0.3, 0.1]).unwrap();
        let sampler = SoupSampler::from_kernel(&kernel).unwrap();
        let p = kernel.matrix();
        for (i, level) in sampler.levels.iter().enumerate() {
            let n = g.len();
            if i + 1 == n {
                assert_eq!(level.r, 0.0);
                continue;
            }
            // h on D = {i+1..n} by fixed-point iteration, independent of the LU path.
            let mut h = vec![0.0; n];
            for _ in 0..2000 {
                let mut next = h.clone();
                for x in i + 1..n {
                    next[x] = p[(x, i)] + (i + 1..n).map(|y| p[(x, y)] * h[y]).sum::<f64>();
                }
                h = next;
            }
            let r: f64 = (i + 1..n).map(|z| p[(i, z)] * h[z]).sum();
            assert!((r - level.r).abs() < 1e-12, "level {i}: {r} vs {}", level.r);
        }
    }

    #[test]
    fn g1_has_only_trivial_time() {
        let g = g1();
        let mut rng = RngStream::new(9, 0).rng();
        for _ in 0..100 {
            let s = sample_soup(&g, &mut rng).unwrap();
            assert!(s.loops.is_empty());
            assert!(s.trivial_time[0] > 0.0);
        }
    }

    #[test]
    fn sampled_loops_are_valid_closed_paths() {
        let g = g3();
        let sampler = SoupSampler::new(&g).unwrap();
        let mut rng = RngStream::new(11, 0).rng();
        for _ in 0..2000 {
            let s = sampler.sample(&mut rng).unwrap();
            for l in &s.loops {
                let checked = Loop::new(&g, l.skeleton().to_vec(), l.holding().to_vec()).unwrap();
                // In- and out-degree agree at every vertex.
                let mut balance = vec![0i64; g.len()];
                for step in checked.steps(&g) {
                    let (x, y) = g.endpoints(step);
                    balance[x] += 1;
                    balance[y] -= 1;
                }
                assert!(balance.iter().all(|&b| b == 0));
            }
        }
    }

    #[test]
    fn tilted_trivial_time_rate() {
        // extra_kill 1 on g1 → trivial time ~ Exp(2), mean 1/2.
        let g = g1();
        let sampler = SoupSampler::tilted(&g, &[], &[1.0]).unwrap();
        let mut rng = RngStream::new(3, 0).rng();
        let mut s = Summary::default();
        for _ in 0..100_000 {
            s.push(sampler.sample(&mut rng).unwrap().trivial_time[0]);
        }
        assert!((s.mean() - 0.5).abs() < 3.0 * s.standard_error());
    }

    #[test]
    fn unit_tilt_matches_plain_sampler() {
        let g = g3();
        let a = SoupSampler::new(&g).unwrap();
        let b = SoupSampler::tilted(&g, &[1.0; 3], &[0.0; 3]).unwrap();
        let mut ra = RngStream::new(4, 1).rng();
        let mut rb = RngStream::new(4, 1).rng();
        for _ in 0..50 {
            assert_eq!(a.sample(&mut ra).unwrap(), b.sample(&mut rb).unwrap());
        }
    }

    #[test]
    fn tilted_domain_checks() {
        let g = g2();
        assert!(SoupSampler::tilted(&g, &[0.0], &[0.0, 0.0]).is_err());
        assert!(SoupSampler::tilted(&g, &[1.2], &[0.0, 0.0]).is_err());
        assert!(SoupSampler::tilted(&g, &[1.0], &[-1.0, 0.0]).is_err());
    }
}
