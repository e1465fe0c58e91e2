//! Continuous-time loops, loop ensembles and the functionals used by every
//! identity: oriented crossing counts, occupation field and the
//! multiplicative tilt `∏ q^{N} e^{−Σ χ L̂}`.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AugEdge, EdgeTilt, OrientedEdge, WeightedGraph};
use crate::tree::RootedSpanningTree;

/// A nontrivial loop: a cyclic vertex sequence with one holding time per visit.
#[derive(Debug, Clone)]
pub struct Loop {
    skeleton: Vec<usize>,
    holding: Vec<f64>,
}

impl Loop {
    pub fn new(g: &WeightedGraph, skeleton: Vec<usize>, holding: Vec<f64>) -> Result<Self> {
        if skeleton.len() < 2 {
            return Err(Error::Domain("a loop needs at least two visits".into()));
        }
        if holding.len() != skeleton.len() {
            return Err(Error::Domain(format!("{} holding times for {} visits", holding.len(), skeleton.len())));
        }
        if let Some(&x) = skeleton.iter().find(|&&x| x >= g.len()) {
            return Err(Error::UnknownVertex(x.to_string()));
        }
        if let Some(h) = holding.iter().find(|&&h| !(h.is_finite() && h > 0.0)) {
            return Err(Error::Domain(format!("holding time {h} must be positive")));
        }
        let k = skeleton.len();
        for i in 0..k {
            let (x, y) = (skeleton[i], skeleton[(i + 1) % k]);
            if g.edge_between(x, y).is_none() {
                return Err(Error::UnknownEdge(g.name(x).to_string(), g.name(y).to_string()));
            }
        }
        Ok(Loop { skeleton, holding })
    }

    pub fn from_names(g: &WeightedGraph, names: &[&str], holding: Vec<f64>) -> Result<Self> {
        let skeleton = names.iter().map(|n| g.vertex(n)).collect::<Result<Vec<_>>>()?;
        Self::new(g, skeleton, holding)
    }

    /// Unit holding times; handy for tests of discrete functionals.
    pub fn from_names_unit(g: &WeightedGraph, names: &[&str]) -> Result<Self> {
        Self::from_names(g, names, vec![1.0; names.len()])
    }

    pub(crate) fn new_unchecked(skeleton: Vec<usize>, holding: Vec<f64>) -> Self {
        debug_assert_eq!(skeleton.len(), holding.len());
        Loop { skeleton, holding }
    }

    pub fn skeleton(&self) -> &[usize] {
        &self.skeleton
    }

    pub fn holding(&self) -> &[f64] {
        &self.holding
    }

    pub fn len(&self) -> usize {
        self.skeleton.len()
    }

    pub fn is_empty(&self) -> bool {
        self.skeleton.is_empty()
    }

    /// Oriented edges traversed, in cyclic order starting from the first visit.
    pub fn steps<'a>(&'a self, g: &'a WeightedGraph) -> impl Iterator<Item = OrientedEdge> + 'a {
        let k = self.skeleton.len();
        (0..k).map(move |i| {
            g.oriented(self.skeleton[i], self.skeleton[(i + 1) % k]).expect("validated loop step")
        })
    }

    /// The rotation with lexicographically minimal skeleton (ties broken by
    /// holding times).
    pub fn canonical(&self) -> Loop {
        let k = self.skeleton.len();
        let key = |r: usize| {
            (0..k).map(move |i| (self.skeleton[(r + i) % k], self.holding[(r + i) % k]))
        };
        let best = (1..k).fold(0, |best, r| {
            let ord = key(r)
                .zip(key(best))
                .map(|((a, ha), (b, hb))| a.cmp(&b).then(ha.total_cmp(&hb)))
                .find(|o| o.is_ne());
            if ord == Some(std::cmp::Ordering::Less) {
                r
            } else {
                best
            }
        });
        let (skeleton, holding) = key(best).unzip();
        Loop { skeleton, holding }
    }
}

impl PartialEq for Loop {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = (self.canonical(), other.canonical());
        a.skeleton == b.skeleton && a.holding == b.holding
    }
}

/// A finite multiset of nontrivial loops plus the aggregated occupation of
/// one-point loops at each vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopEnsemble {
    pub loops: Vec<Loop>,
    pub trivial_time: Vec<f64>,
}

impl LoopEnsemble {
    pub fn empty(g: &WeightedGraph) -> Self {
        LoopEnsemble { loops: Vec::new(), trivial_time: g.zeros() }
    }

    /// `N_{e^o}` for every oriented edge, indexed by [`OrientedEdge::id`].
    pub fn crossing_counts(&self, g: &WeightedGraph) -> Vec<u64> {
        let mut counts = vec![0; 2 * g.edges().len()];
        for l in &self.loops {
            for step in l.steps(g) {
                counts[step.id()] += 1;
            }
        }
        counts
    }

    pub fn crossings_directed(&self, g: &WeightedGraph, e: OrientedEdge) -> Result<u64> {
        if e.edge >= g.edges().len() {
            return Err(Error::Domain(format!("no edge {}", e.edge)));
        }
        Ok(self.loops.iter().flat_map(|l| l.steps(g)).filter(|&s| s == e).count() as u64)
    }

    /// `N_e = N_{(x,y)} + N_{(y,x)}`.
    pub fn crossings(&self, g: &WeightedGraph, edge: usize) -> Result<u64> {
        let fwd = OrientedEdge { edge, forward: true };
        Ok(self.crossings_directed(g, fwd)? + self.crossings_directed(g, fwd.reversed())?)
    }

    /// Undirected crossing counts per conductance edge.
    pub fn edge_crossings(&self, g: &WeightedGraph) -> Vec<u64> {
        self.crossing_counts(g).chunks(2).map(|c| c[0] + c[1]).collect()
    }

    /// `L̂^x` for every vertex.
    pub fn occupation_field(&self) -> Vec<f64> {
        let mut occ = self.trivial_time.clone();
        for l in &self.loops {
            for (&x, &h) in l.skeleton.iter().zip(&l.holding) {
                occ[x] += h;
            }
        }
        occ
    }

    pub fn occupation(&self, g: &WeightedGraph, x: usize) -> Result<f64> {
        if x >= g.len() {
            return Err(Error::UnknownVertex(x.to_string()));
        }
        Ok(self.occupation_field()[x])
    }

    /// `∏_{e^o} q^{N_{e^o}} · e^{−Σ_x χ_x L̂^x}`, times `∏_{e∉T} β^{N_e}` when an
    /// off-tree factor is given.
    pub fn tilt_weight(
        &self,
        g: &WeightedGraph,
        q: &EdgeTilt,
        chi: &[f64],
        beta_off_tree: Option<(f64, &RootedSpanningTree)>,
    ) -> Result<Complex64> {
        q.check(g)?;
        g.check_chi(chi)?;
        let counts = self.crossing_counts(g);
        let mut w = tilt_from_counts(g, &counts, q);
        let occ = self.occupation_field();
        let exponent: f64 = chi.iter().zip(&occ).map(|(c, o)| c * o).sum();
        w *= (-exponent).exp();
        if let Some((beta, tree)) = beta_off_tree {
            if !(beta > 0.0 && beta <= 1.0) {
                return Err(Error::Domain(format!("β = {beta} outside (0, 1]")));
            }
            let off: u64 = (0..g.edges().len())
                .filter(|&e| !tree.contains(g, AugEdge::Conductance(e)))
                .map(|e| counts[2 * e] + counts[2 * e + 1])
                .sum();
            w *= beta.powf(off as f64);
        }
        Ok(w)
    }

    /// Writes one JSON object per loop followed by the trivial-time record.
    pub fn write_jsonl<W: Write>(&self, g: &WeightedGraph, mut out: W) -> Result<()> {
        for l in &self.loops {
            let rec = LoopRecord {
                skeleton: l.skeleton.iter().map(|&x| g.name(x).to_string()).collect(),
                holding: l.holding.clone(),
            };
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n")?;
        }
        let rec = TrivialRecord { trivial_time: self.named_vertex_map(g, &self.trivial_time) };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(g: &WeightedGraph, input: R) -> Result<Self> {
        let mut ens = LoopEnsemble::empty(g);
        let mut saw_trivial = false;
        for line in input.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let value: serde_json::Value = serde_json::from_str(&line)?;
            if value.get("trivial_time").is_some() {
                let rec: TrivialRecord = serde_json::from_value(value)?;
                for (name, t) in rec.trivial_time {
                    if !(t.is_finite() && t >= 0.0) {
                        return Err(Error::Parse(format!("negative trivial time at `{name}`")));
                    }
                    ens.trivial_time[g.vertex(&name)?] = t;
                }
                saw_trivial = true;
            } else {
                let rec: LoopRecord = serde_json::from_value(value)?;
                let names: Vec<&str> = rec.skeleton.iter().map(String::as_str).collect();
                ens.loops.push(Loop::from_names(g, &names, rec.holding)?);
            }
        }
        if !saw_trivial {
            return Err(Error::Parse("missing trivial_time record".into()));
        }
        Ok(ens)
    }

    fn named_vertex_map(&self, g: &WeightedGraph, values: &[f64]) -> BTreeMap<String, f64> {
        values.iter().enumerate().map(|(x, &v)| (g.name(x).to_string(), v)).collect()
    }
}

/// `∏_{e^o} q_{e^o}^{N_{e^o}}` from precomputed counts.
pub(crate) fn tilt_from_counts(g: &WeightedGraph, counts: &[u64], q: &EdgeTilt) -> Complex64 {
    g.oriented_edges()
        .map(|oe| {
            let n = counts[oe.id()];
            if n == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                q.get(oe).powu(n as u32)
            }
        })
        .product()
}

#[derive(Serialize, Deserialize)]
struct LoopRecord {
    skeleton: Vec<String>,
    holding: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TrivialRecord {
    trivial_time: BTreeMap<String, f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    fn one_loop(g: &WeightedGraph, l: Loop) -> LoopEnsemble {
        LoopEnsemble { loops: vec![l], trivial_time: g.zeros() }
    }

    #[test]
    fn loop_validation() {
        let g = g2();
        assert!(Loop::from_names_unit(&g, &["a"]).is_err());
        assert!(Loop::from_names(&g, &["a", "b"], vec![1.0, 0.0]).is_err());
        assert!(Loop::from_names(&g, &["a", "b"], vec![1.0]).is_err());
        assert!(Loop::from_names_unit(&g, &["a", "a"]).is_err());
        assert!(Loop::from_names_unit(&g, &["a", "z"]).is_err());
    }

    #[test]
    fn directed_crossings() {
        let g = g2();
        let ab = g.oriented_by_name("a", "b").unwrap();
        assert_eq!(LoopEnsemble::empty(&g).crossings_directed(&g, ab).unwrap(), 0);
        let l = one_loop(&g, Loop::from_names_unit(&g, &["a", "b"]).unwrap());
        assert_eq!(l.crossings_directed(&g, ab).unwrap(), 1);
        assert_eq!(l.crossings_directed(&g, ab.reversed()).unwrap(), 1);
        let l = one_loop(&g, Loop::from_names_unit(&g, &["a", "b", "a", "b"]).unwrap());
        assert_eq!(l.crossings_directed(&g, ab).unwrap(), 2);
        assert!(l.crossings_directed(&g, OrientedEdge { edge: 5, forward: true }).is_err());
    }

    #[test]
    fn undirected_crossings() {
        let g = g2();
        assert_eq!(LoopEnsemble::empty(&g).crossings(&g, 0).unwrap(), 0);
        let l = one_loop(&g, Loop::from_names_unit(&g, &["a", "b"]).unwrap());
        assert_eq!(l.crossings(&g, 0).unwrap(), 2);

        let g = g3();
        let l = one_loop(&g, Loop::from_names_unit(&g, &["a", "b", "c"]).unwrap());
        assert_eq!(l.edge_crossings(&g), vec![1, 1, 1]);
    }

    #[test]
    fn occupation_examples() {
        let g = g2();
        assert_eq!(LoopEnsemble::empty(&g).occupation(&g, 0).unwrap(), 0.0);
        let mut l = one_loop(&g, Loop::from_names(&g, &["a", "b"], vec![0.3, 0.5]).unwrap());
        assert_eq!(l.occupation(&g, 0).unwrap(), 0.3);
        assert_eq!(l.occupation(&g, 1).unwrap(), 0.5);
        l.trivial_time[0] = 0.2;
        assert!((l.occupation(&g, 0).unwrap() - 0.5).abs() < 1e-15);
        assert!(l.occupation(&g, 2).is_err());
    }

    #[test]
    fn tilt_weight_examples() {
        let g = g2();
        let chi = g.zeros();
        let l = one_loop(&g, Loop::from_names(&g, &["a", "b"], vec![1.0, 1.0]).unwrap());
        assert_eq!(l.tilt_weight(&g, &EdgeTilt::ones(&g), &chi, None).unwrap(), Complex64::new(1.0, 0.0));

        let mut q = EdgeTilt::ones(&g);
        q.set(g.oriented_by_name("a", "b").unwrap(), 0.0);
        assert_eq!(l.tilt_weight(&g, &q, &chi, None).unwrap(), Complex64::new(0.0, 0.0));

        let w = l.tilt_weight(&g, &EdgeTilt::ones(&g), &[1.0, 0.0], None).unwrap();
        assert!((w.re - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn off_tree_factor() {
        use crate::tree::{Parent, RootedSpanningTree};
        let g = g2();
        let l = one_loop(&g, Loop::from_names_unit(&g, &["a", "b", "a", "b"]).unwrap());
        let off = RootedSpanningTree::from_parents(&g, vec![Parent::Root, Parent::Root]).unwrap();
        let on = RootedSpanningTree::from_parents(&g, vec![Parent::Root, Parent::Vertex(0)]).unwrap();
        let one = EdgeTilt::ones(&g);
        let w = l.tilt_weight(&g, &one, &g.zeros(), Some((0.5, &off))).unwrap();
        assert!((w.re - 0.5f64.powi(4)).abs() < 1e-15);
        let w = l.tilt_weight(&g, &one, &g.zeros(), Some((0.5, &on))).unwrap();
        assert_eq!(w.re, 1.0);
    }

    #[test]
    fn canonical_rotation() {
        let g = g3();
        let a = Loop::from_names(&g, &["b", "c", "a"], vec![2.0, 3.0, 1.0]).unwrap();
        let b = Loop::from_names(&g, &["a", "b", "c"], vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.canonical().skeleton(), &[0, 1, 2]);
        let c = Loop::from_names(&g, &["a", "c", "b"], vec![1.0, 3.0, 2.0]).unwrap();
        assert_ne!(b, c);
    }

    #[test]
    fn jsonl_round_trip() {
        let g = g3();
        let ens = LoopEnsemble {
            loops: vec![
                Loop::from_names(&g, &["a", "b", "c"], vec![0.1, 0.2, 0.3]).unwrap(),
                Loop::from_names(&g, &["b", "c"], vec![0.4, 0.5]).unwrap(),
            ],
            trivial_time: vec![0.25, 0.0, 1.5],
        };
        let mut buf = Vec::new();
        ens.write_jsonl(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with(r#"{"skeleton":["a","b","c"],"holding":[0.1,0.2,0.3]}"#));
        let back = LoopEnsemble::read_jsonl(&g, buf.as_slice()).unwrap();
        assert_eq!(back, ens);
    }
}
