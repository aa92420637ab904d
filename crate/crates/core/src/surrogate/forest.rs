//! Regression random forest: CART trees on bootstrap samples with a random
//! feature subset per split, leaves predicting the mean target.

use serde::{Deserialize, Serialize};

use super::TrainingSet;
use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// `None` grows until the leaf-size rule stops it.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// `None` means `max(1, n / 3)`.
    pub features_per_split: Option<usize>,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: None,
            min_samples_leaf: 2,
            features_per_split: None,
            bootstrap: true,
        }
    }
}

impl ForestParams {
    /// One unpruned tree on the full data set: recalls every training target.
    pub fn single_exact_tree() -> Self {
        Self {
            n_trees: 1,
            max_depth: None,
            min_samples_leaf: 1,
            features_per_split: None,
            bootstrap: false,
        }
    }

    fn mtry(&self, dim: usize) -> usize {
        self.features_per_split
            .unwrap_or((dim / 3).max(1))
            .clamp(1, dim.max(1))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
enum Node {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    nodes: Vec<Node>,
}

impl RegressionTree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf(v) => return v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

/// Per-tree growth state. Every feature keeps a list of sample slots
/// sorted by that feature; a node owns the same range `lo..hi` in all of
/// them, and a split stably partitions each list, so no node ever sorts.
struct Builder<'a> {
    /// Column-major inputs: `cols[f][row]`.
    cols: &'a [Vec<f64>],
    params: &'a ForestParams,
    mtry: usize,
    nodes: Vec<Node>,
    /// `xs[f][slot]` and `ys[slot]` for the slots of the current tree
    /// (bootstrap draws repeat rows).
    xs: Vec<Vec<f64>>,
    ys: Vec<f64>,
    sorted: Vec<Vec<u32>>,
    goes_left: Vec<bool>,
    scratch: Vec<u32>,
    features: Vec<usize>,
    slots_of_row: Vec<Vec<u32>>,
}

struct SplitChoice {
    feature: usize,
    threshold: f64,
    cost: f64,
}

impl<'a> Builder<'a> {
    fn new(cols: &'a [Vec<f64>], params: &'a ForestParams, mtry: usize) -> Self {
        let dim = cols.len();
        Self {
            cols,
            params,
            mtry,
            nodes: Vec::new(),
            xs: vec![Vec::new(); dim],
            ys: Vec::new(),
            sorted: vec![Vec::new(); dim],
            goes_left: Vec::new(),
            scratch: Vec::new(),
            features: Vec::with_capacity(dim),
            slots_of_row: Vec::new(),
        }
    }

    /// Load the slots of one tree. `row_order[f]` lists data rows sorted by
    /// feature `f`.
    fn reset(&mut self, rows: &[usize], targets: &[f64], row_order: &[Vec<usize>]) {
        self.slots_of_row.resize(targets.len(), Vec::new());
        self.slots_of_row.iter_mut().for_each(Vec::clear);
        for (slot, &r) in rows.iter().enumerate() {
            self.slots_of_row[r].push(slot as u32);
        }
        for (list, order) in self.sorted.iter_mut().zip(row_order) {
            list.clear();
            for &r in order {
                list.extend_from_slice(&self.slots_of_row[r]);
            }
        }
        for (xs, col) in self.xs.iter_mut().zip(self.cols) {
            xs.clear();
            xs.extend(rows.iter().map(|&r| col[r]));
        }
        self.ys.clear();
        self.ys.extend(rows.iter().map(|&r| targets[r]));
        self.goes_left.clear();
        self.goes_left.resize(rows.len(), false);
        self.nodes = Vec::new();
    }

    fn grow(&mut self, lo: usize, hi: usize, depth: usize, rng: &mut RngStream) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf(0.0));

        let m = (hi - lo) as f64;
        let (sum, sumsq) = self.sorted[0][lo..hi].iter().fold((0.0, 0.0), |(s, q), &k| {
            let y = self.ys[k as usize];
            (s + y, q + y * y)
        });
        let mean = sum / m;
        let sse = (sumsq - sum * sum / m).max(0.0);

        let depth_ok = self.params.max_depth.is_none_or(|d| depth < d);
        let size_ok = hi - lo >= 2 * self.params.min_samples_leaf;
        let spread = sse > 1e-12 * (1.0 + sumsq);
        if !(depth_ok && size_ok && spread) {
            self.nodes[id] = Node::Leaf(mean);
            return id;
        }

        let Some(split) = self.best_split(lo, hi, sum, sumsq, sse, rng) else {
            self.nodes[id] = Node::Leaf(mean);
            return id;
        };

        let xs = &self.xs[split.feature];
        let mut cut = lo;
        for &k in &self.sorted[split.feature][lo..hi] {
            let left = xs[k as usize] <= split.threshold;
            self.goes_left[k as usize] = left;
            cut += left as usize;
        }
        let n_left = cut - lo;
        for list in self.sorted.iter_mut() {
            let seg = &mut list[lo..hi];
            self.scratch.clear();
            self.scratch.extend_from_slice(seg);
            // stable partition; the left count is known up front
            let (mut w, mut r) = (0, n_left);
            for &k in &self.scratch {
                let left = self.goes_left[k as usize];
                let at = if left { w } else { r };
                seg[at] = k;
                w += left as usize;
                r += !left as usize;
            }
        }

        let left = self.grow(lo, cut, depth + 1, rng);
        let right = self.grow(cut, hi, depth + 1, rng);
        self.nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }

    fn best_split(
        &mut self,
        lo: usize,
        hi: usize,
        total: f64,
        total_sq: f64,
        sse: f64,
        rng: &mut RngStream,
    ) -> Option<SplitChoice> {
        let dim = self.cols.len();
        // partial Fisher-Yates: the first `mtry` entries are the sample
        self.features.clear();
        self.features.extend(0..dim);
        for i in 0..self.mtry {
            let j = i + rng.index(dim - i);
            self.features.swap(i, j);
        }
        let mut best = self.search(lo, hi, total, total_sq, &self.features[..self.mtry]);
        if best.is_none() && self.mtry < dim {
            // no usable split among the sampled features: try the rest
            best = self.search(lo, hi, total, total_sq, &self.features[self.mtry..]);
        }
        best.filter(|b| b.cost < sse - 1e-12 * sse.abs().max(1e-300))
    }

    fn search(
        &self,
        lo: usize,
        hi: usize,
        total: f64,
        total_sq: f64,
        features: &[usize],
    ) -> Option<SplitChoice> {
        let leaf = self.params.min_samples_leaf.max(1);
        let m = hi - lo;
        let mut best: Option<SplitChoice> = None;
        for &f in features {
            let xs = &self.xs[f];
            let seg = &self.sorted[f][lo..hi];
            let (mut ls, mut lq) = (0.0, 0.0);
            let mut xa = xs[seg[0] as usize];
            for p in 1..m {
                let y = self.ys[seg[p - 1] as usize];
                ls += y;
                lq += y * y;
                let xb = xs[seg[p] as usize];
                let prev = std::mem::replace(&mut xa, xb);
                if p < leaf || m - p < leaf || prev >= xb {
                    continue;
                }
                let (nl, nr) = (p as f64, (m - p) as f64);
                let (rs, rq) = (total - ls, total_sq - lq);
                let cost = (lq - ls * ls / nl) + (rq - rs * rs / nr);
                if best.as_ref().is_none_or(|c| cost < c.cost) {
                    let mid = 0.5 * (prev + xb);
                    let threshold = if mid < xb { mid } else { prev };
                    best = Some(SplitChoice {
                        feature: f,
                        threshold,
                        cost,
                    });
                }
            }
        }
        best
    }
}

/// An ensemble of regression trees.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    params: ForestParams,
    dim: usize,
    trees: Vec<RegressionTree>,
}

impl RandomForest {
    pub fn new(params: ForestParams) -> Self {
        Self {
            params,
            dim: 0,
            trees: Vec::new(),
        }
    }

    pub fn params(&self) -> &ForestParams {
        &self.params
    }

    pub fn trees(&self) -> &[RegressionTree] {
        &self.trees
    }

    pub fn is_trained(&self) -> bool {
        !self.trees.is_empty()
    }

    /// Fit on `data`. Tree `t` draws from `rng.derive_indexed("tree", t)`.
    pub fn fit(&mut self, data: &TrainingSet, rng: &RngStream) -> Result<()> {
        if self.params.n_trees == 0 {
            return Err(Error::InvalidParameter("forest needs at least one tree".into()));
        }
        let n = data.len();
        if n < 2 {
            return Err(Error::NotEnoughIndividuals {
                needed: 2,
                available: n,
            });
        }
        let dim = data.dim();
        let cols: Vec<Vec<f64>> = (0..dim)
            .map(|f| data.inputs.iter().map(|x| x[f]).collect())
            .collect();
        let row_order: Vec<Vec<usize>> = cols
            .iter()
            .map(|col| {
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&a, &b| col[a].total_cmp(&col[b]));
                order
            })
            .collect();
        let mut builder = Builder::new(&cols, &self.params, self.params.mtry(dim));
        let mut trees = Vec::with_capacity(self.params.n_trees);
        for t in 0..self.params.n_trees {
            let mut tree_rng = rng.derive_indexed("tree", t as u64);
            let rows: Vec<usize> = if self.params.bootstrap {
                (0..n).map(|_| tree_rng.index(n)).collect()
            } else {
                (0..n).collect()
            };
            builder.reset(&rows, &data.targets, &row_order);
            builder.grow(0, rows.len(), 0, &mut tree_rng);
            trees.push(RegressionTree {
                nodes: std::mem::take(&mut builder.nodes),
            });
        }
        self.dim = dim;
        self.trees = trees;
        Ok(())
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if !self.is_trained() {
            return Err(Error::Untrained);
        }
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Mean over trees.
    pub fn predict_one(&self, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        let s: f64 = self.trees.iter().map(|t| t.predict(x)).sum();
        Ok(s / self.trees.len() as f64)
    }

    /// Mean and across-tree standard deviation.
    pub fn predict_one_with_std(&self, x: &[f64]) -> Result<(f64, f64)> {
        self.check(x)?;
        let t = self.trees.len() as f64;
        let outs: Vec<f64> = self.trees.iter().map(|tr| tr.predict(x)).collect();
        let mean = outs.iter().sum::<f64>() / t;
        let var = outs.iter().map(|o| (o - mean).powi(2)).sum::<f64>() / t;
        Ok((mean, var.max(0.0).sqrt()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::DecisionVector;

    fn data(points: &[(Vec<f64>, f64)]) -> TrainingSet {
        TrainingSet::new(
            points
                .iter()
                .map(|(x, _)| DecisionVector::new(x.clone()).unwrap())
                .collect(),
            points.iter().map(|(_, y)| *y).collect(),
        )
        .unwrap()
    }

    #[test]
    fn exact_recall_single_tree() {
        let ts = data(&[(vec![0.0], 3.0), (vec![1.0], -1.0), (vec![2.5], 7.0)]);
        let mut rf = RandomForest::new(ForestParams::single_exact_tree());
        rf.fit(&ts, &RngStream::new(0)).unwrap();
        for (x, y) in ts.inputs.iter().zip(&ts.targets) {
            assert_eq!(rf.predict_one(x).unwrap(), *y);
            assert_eq!(rf.predict_one_with_std(x).unwrap().1, 0.0);
        }
    }

    #[test]
    fn constant_targets_give_constant_predictions() {
        let ts = data(&[(vec![0.0, 1.0], 4.0), (vec![1.0, 0.0], 4.0), (vec![2.0, 2.0], 4.0)]);
        let mut rf = RandomForest::new(ForestParams::default());
        rf.fit(&ts, &RngStream::new(1)).unwrap();
        assert_eq!(rf.predict_one(&[5.0, -5.0]).unwrap(), 4.0);
    }

    #[test]
    fn untrained_and_mismatched_inputs() {
        let rf = RandomForest::new(ForestParams::default());
        assert_eq!(rf.predict_one(&[0.0]), Err(Error::Untrained));
        let ts = data(&[(vec![0.0], 1.0), (vec![1.0], 2.0)]);
        let mut rf = RandomForest::new(ForestParams::default());
        rf.fit(&ts, &RngStream::new(1)).unwrap();
        assert!(matches!(rf.predict_one(&[0.0, 1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn depth_limit_respected() {
        let pts: Vec<(Vec<f64>, f64)> = (0..64).map(|i| (vec![i as f64], (i * i) as f64)).collect();
        let mut rf = RandomForest::new(ForestParams {
            n_trees: 3,
            max_depth: Some(2),
            ..ForestParams::default()
        });
        rf.fit(&data(&pts), &RngStream::new(2)).unwrap();
        assert!(rf.trees().iter().all(|t| t.depth() <= 2));
    }

    #[test]
    fn same_seed_same_forest() {
        let pts: Vec<(Vec<f64>, f64)> = (0..30)
            .map(|i| (vec![i as f64, (i * 7 % 11) as f64, (i % 5) as f64], (i as f64).sin()))
            .collect();
        let ts = data(&pts);
        let mut a = RandomForest::new(ForestParams::default());
        let mut b = RandomForest::new(ForestParams::default());
        a.fit(&ts, &RngStream::new(9)).unwrap();
        b.fit(&ts, &RngStream::new(9)).unwrap();
        assert_eq!(a, b);
    }
}
