//! Exact weighted spanning trees without simulating the walk.
//!
//! Each loop-erased path of Wilson's algorithm is drawn step by step: from
//! the current tip `x` with path `A`, the next vertex is `y` with probability
//! proportional to `w(x,y) · h(y)`, where `h(y)` is the probability that the
//! walk from `y` reaches the tree (or the root) before `A`. `h` is obtained by
//! eliminating free vertices one at a time (Kron reduction) in log space.
//! Elimination only adds, multiplies and divides positive quantities, so
//! hitting probabilities keep full relative accuracy even when weights span
//! hundreds of orders of magnitude, which is where the walk-based sampler
//! stalls.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::tree::Parent;

/// Log weights: `edge[e]` for conductance edges and `kill[x]` to the root
/// (`−∞` when absent).
pub(crate) struct LogWeights {
    pub edge: Vec<f64>,
    pub kill: Vec<f64>,
}

impl LogWeights {
    pub fn new(g: &WeightedGraph, edge_log_scale: &[f64], kill_log_scale: &[f64]) -> Self {
        LogWeights {
            edge: g.edges().iter().zip(edge_log_scale).map(|(e, s)| e.conductance.ln() + s).collect(),
            kill: g
                .killing()
                .iter()
                .zip(kill_log_scale)
                .map(|(&k, s)| if k > 0.0 { k.ln() + s } else { f64::NEG_INFINITY })
                .collect(),
        }
    }
}

/// Remaining live neighbours with log weights, log weight to the target, log total.
type EliminationRow = (Vec<(usize, f64)>, f64, f64);

/// `ln(e^a + e^b)`.
fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

fn log_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, log_add)
}

#[derive(Clone, Copy, PartialEq)]
enum State {
    Free,
    Path,
    Target,
}

/// `ln h(y)` where `h(y) = P_y(hit Target before Path)`; `h` is 1 on targets
/// and 0 on the path.
fn log_hitting_probabilities(g: &WeightedGraph, w: &LogWeights, state: &[State]) -> Result<Vec<f64>> {
    const ZERO: f64 = f64::NEG_INFINITY;
    let n = g.len();
    let free: Vec<usize> = (0..n).filter(|&x| state[x] == State::Free).collect();
    let m = free.len();
    let mut pos = vec![usize::MAX; n];
    for (i, &x) in free.iter().enumerate() {
        pos[x] = i;
    }
    // Weights among free vertices plus aggregated weights to the target and to the path.
    let mut inner = vec![vec![ZERO; m]; m];
    let mut to_target = vec![ZERO; m];
    let mut to_path = vec![ZERO; m];
    for (i, &x) in free.iter().enumerate() {
        to_target[i] = w.kill[x];
        for &(y, e) in g.neighbors(x) {
            let slot = match state[y] {
                State::Free => &mut inner[i][pos[y]],
                State::Target => &mut to_target[i],
                State::Path => &mut to_path[i],
            };
            *slot = log_add(*slot, w.edge[e]);
        }
    }

    // Eliminate free vertices in order, recording each elimination row.
    let mut rows: Vec<EliminationRow> = Vec::with_capacity(m);
    let mut alive = vec![true; m];
    for v in 0..m {
        alive[v] = false;
        let nbrs: Vec<(usize, f64)> =
            (0..m).filter(|&u| alive[u] && inner[v][u] > ZERO).map(|u| (u, inner[v][u])).collect();
        let total = log_sum(nbrs.iter().map(|p| p.1).chain([to_target[v], to_path[v]]));
        if total == ZERO {
            return Err(Error::Singular("vertex cut off from both the path and the root".into()));
        }
        for &(a, wa) in &nbrs {
            to_target[a] = log_add(to_target[a], wa + to_target[v] - total);
            to_path[a] = log_add(to_path[a], wa + to_path[v] - total);
            for &(b, wb) in &nbrs {
                if a != b {
                    inner[a][b] = log_add(inner[a][b], wa + wb - total);
                }
            }
        }
        rows.push((nbrs, to_target[v], total));
    }
    let mut h_free = vec![ZERO; m];
    for v in (0..m).rev() {
        let (nbrs, t, total) = &rows[v];
        h_free[v] = log_sum(nbrs.iter().map(|&(u, wu)| wu + h_free[u]).chain([*t])) - total;
    }

    Ok((0..n)
        .map(|x| match state[x] {
            State::Free => h_free[pos[x]],
            State::Target => 0.0,
            State::Path => ZERO,
        })
        .collect())
}

/// Wilson's algorithm with loop-erased paths drawn by their exact step laws.
pub(crate) fn exact_lerw_parents<R: Rng + ?Sized>(g: &WeightedGraph, w: &LogWeights, rng: &mut R) -> Result<Vec<Parent>> {
    let n = g.len();
    let mut state = vec![State::Free; n];
    let mut parent = vec![Parent::Root; n];
    for start in 0..n {
        if state[start] == State::Target {
            continue;
        }
        let mut path = vec![start];
        state[start] = State::Path;
        loop {
            let x = *path.last().unwrap();
            let log_h = log_hitting_probabilities(g, w, &state)?;
            let mut choices: Vec<(Parent, f64)> = g
                .neighbors(x)
                .iter()
                .filter(|&&(y, _)| state[y] != State::Path)
                .map(|&(y, e)| (Parent::Vertex(y), w.edge[e] + log_h[y]))
                .collect();
            choices.push((Parent::Root, w.kill[x]));
            let top = choices.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
            if top == f64::NEG_INFINITY {
                return Err(Error::Singular(format!("no way to the root from `{}`", g.name(x))));
            }
            for c in &mut choices {
                c.1 = (c.1 - top).exp();
            }
            let total: f64 = choices.iter().map(|c| c.1).sum();
            let mut u = rng.random::<f64>() * total;
            let mut next = choices.last().unwrap().0;
            for &(c, p) in &choices {
                if u < p {
                    next = c;
                    break;
                }
                u -= p;
            }
            parent[x] = next;
            match next {
                Parent::Vertex(y) if state[y] == State::Free => {
                    state[y] = State::Path;
                    path.push(y);
                }
                _ => break,
            }
        }
        for &x in &path {
            state[x] = State::Target;
        }
    }
    Ok(parent)
}
