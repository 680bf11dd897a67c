//! CART classification tree grown greedily on Gini impurity.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ModelError, Result, TrainingData};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    /// Rows with `x[feature] <= threshold` go left.
    Internal {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        p_default: f64,
        n_default: usize,
        n_nondefault: usize,
    },
}

impl TreeNode {
    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Internal { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn leaves(&self) -> Vec<&TreeNode> {
        match self {
            TreeNode::Leaf { .. } => vec![self],
            TreeNode::Internal { left, right, .. } => {
                let mut v = left.leaves();
                v.extend(right.leaves());
                v
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub n_features: usize,
    pub root: TreeNode,
}

impl TreeModel {
    pub fn predict_proba(&self, row: &[f64]) -> f64 {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { p_default, .. } => return *p_default,
                TreeNode::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if row[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: 5,
            min_leaf: 20,
        }
    }
}

impl TreeParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_depth == 0 || self.min_leaf == 0 {
            return Err(ModelError::InvalidParams("max_depth and min_leaf must be >= 1".into()));
        }
        Ok(())
    }
}

fn gini(pos: usize, neg: usize) -> f64 {
    let n = (pos + neg) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p = pos as f64 / n;
    2.0 * p * (1.0 - p)
}

/// Size-weighted Gini impurity of a split, from `(defaults, non-defaults)`
/// on each side.
pub fn weighted_gini(left: (usize, usize), right: (usize, usize)) -> f64 {
    let nl = (left.0 + left.1) as f64;
    let nr = (right.0 + right.1) as f64;
    (nl * gini(left.0, left.1) + nr * gini(right.0, right.1)) / (nl + nr)
}

/// Per-feature sorted distinct values and each row's index into them.
pub(crate) struct Codes {
    values: Vec<Vec<f64>>,
    codes: Vec<u32>,
    n_cols: usize,
}

impl Codes {
    pub(crate) fn new(data: &TrainingData) -> Self {
        let x = &data.x;
        let mut values = Vec::with_capacity(x.n_cols);
        let mut codes = vec![0u32; x.n_rows * x.n_cols];
        for j in 0..x.n_cols {
            let mut v: Vec<f64> = (0..x.n_rows).map(|i| x.get(i, j)).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            for i in 0..x.n_rows {
                let code = v.partition_point(|&u| u < x.get(i, j));
                codes[i * x.n_cols + j] = code as u32;
            }
            values.push(v);
        }
        Codes {
            values,
            codes,
            n_cols: x.n_cols,
        }
    }

    fn code(&self, row: usize, feature: usize) -> usize {
        self.codes[row * self.n_cols + feature] as usize
    }
}

struct Split {
    feature: usize,
    threshold: f64,
    score: f64,
}

struct Grower<'a> {
    data: &'a TrainingData,
    codes: &'a Codes,
    params: &'a TreeParams,
    n_candidates: usize,
    rng: ChaCha8Rng,
    hist: Vec<(usize, usize)>,
}

impl<'a> Grower<'a> {
    fn counts(&self, rows: &[usize]) -> (usize, usize) {
        let pos = rows.iter().filter(|&&i| self.data.y[i] > 0.5).count();
        (pos, rows.len() - pos)
    }

    /// Best threshold for one feature; candidates are midpoints between
    /// consecutive distinct values present in the node.
    fn best_for_feature(&mut self, rows: &[usize], feature: usize, totals: (usize, usize)) -> Option<Split> {
        let values = &self.codes.values[feature];
        self.hist.clear();
        self.hist.resize(values.len(), (0, 0));
        for &i in rows {
            let c = self.codes.code(i, feature);
            if self.data.y[i] > 0.5 {
                self.hist[c].0 += 1;
            } else {
                self.hist[c].1 += 1;
            }
        }
        let min_leaf = self.params.min_leaf;
        let n = rows.len();
        let mut left = (0usize, 0usize);
        let mut best: Option<Split> = None;
        let mut prev: Option<usize> = None;
        for (c, &(p, q)) in self.hist.iter().enumerate() {
            if p + q == 0 {
                continue;
            }
            if let Some(pc) = prev {
                let nl = left.0 + left.1;
                if nl >= min_leaf && n - nl >= min_leaf {
                    let right = (totals.0 - left.0, totals.1 - left.1);
                    let score = weighted_gini(left, right);
                    if best.as_ref().is_none_or(|b| score < b.score) {
                        best = Some(Split {
                            feature,
                            threshold: 0.5 * (values[pc] + values[c]),
                            score,
                        });
                    }
                }
            }
            left.0 += p;
            left.1 += q;
            prev = Some(c);
        }
        best
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> TreeNode {
        let (pos, neg) = self.counts(&rows);
        let leaf = TreeNode::Leaf {
            p_default: pos as f64 / rows.len() as f64,
            n_default: pos,
            n_nondefault: neg,
        };
        if depth >= self.params.max_depth || pos == 0 || neg == 0 || rows.len() < 2 * self.params.min_leaf {
            return leaf;
        }
        let n_cols = self.data.x.n_cols;
        let features: Vec<usize> = if self.n_candidates >= n_cols {
            (0..n_cols).collect()
        } else {
            let mut f = sample(&mut self.rng, n_cols, self.n_candidates).into_vec();
            f.sort_unstable();
            f
        };
        let mut best: Option<Split> = None;
        for f in features {
            if let Some(s) = self.best_for_feature(&rows, f, (pos, neg)) {
                if best.as_ref().is_none_or(|b| s.score < b.score) {
                    best = Some(s);
                }
            }
        }
        let parent = gini(pos, neg);
        match best {
            Some(split) if split.score < parent - 1e-12 => {
                let (l, r): (Vec<usize>, Vec<usize>) = rows
                    .into_iter()
                    .partition(|&i| self.data.x.get(i, split.feature) <= split.threshold);
                TreeNode::Internal {
                    feature: split.feature,
                    threshold: split.threshold,
                    left: Box::new(self.grow(l, depth + 1)),
                    right: Box::new(self.grow(r, depth + 1)),
                }
            }
            _ => leaf,
        }
    }
}

/// Grows a tree on `rows` (with repetition allowed, for bootstrap
/// samples), considering `n_candidates` random features per split.
pub(crate) fn grow_tree(
    data: &TrainingData,
    codes: &Codes,
    rows: Vec<usize>,
    params: &TreeParams,
    n_candidates: usize,
    seed: u64,
) -> Result<TreeModel> {
    params.validate()?;
    if rows.is_empty() {
        return Err(ModelError::Data("no rows".into()));
    }
    let mut grower = Grower {
        data,
        codes,
        params,
        n_candidates: n_candidates.max(1),
        rng: ChaCha8Rng::seed_from_u64(seed),
        hist: Vec::new(),
    };
    let root = grower.grow(rows, 0);
    Ok(TreeModel {
        n_features: data.x.n_cols,
        root,
    })
}

pub fn train_tree(data: &TrainingData, params: &TreeParams, seed: u64) -> Result<TreeModel> {
    grow_tree(
        data,
        &Codes::new(data),
        (0..data.x.n_rows).collect(),
        params,
        data.x.n_cols,
        seed,
    )
}

/// Every candidate `(threshold, weighted Gini)` of `feature` over all rows,
/// ignoring `min_leaf`. Exposed for inspection and testing.
pub fn candidate_splits(data: &TrainingData, feature: usize) -> Vec<(f64, f64)> {
    let params = TreeParams {
        max_depth: 1,
        min_leaf: 1,
    };
    let rows: Vec<usize> = (0..data.x.n_rows).collect();
    let codes = Codes::new(data);
    let mut grower = Grower {
        data,
        codes: &codes,
        params: &params,
        n_candidates: data.x.n_cols,
        rng: ChaCha8Rng::seed_from_u64(0),
        hist: Vec::new(),
    };
    let totals = grower.counts(&rows);
    let values = grower.codes.values[feature].clone();
    let mut out = Vec::new();
    for w in values.windows(2) {
        let threshold = 0.5 * (w[0] + w[1]);
        let mut left = (0, 0);
        for &i in &rows {
            if data.x.get(i, feature) <= threshold {
                if data.y[i] > 0.5 {
                    left.0 += 1;
                } else {
                    left.1 += 1;
                }
            }
        }
        let right = (totals.0 - left.0, totals.1 - left.1);
        out.push((threshold, weighted_gini(left, right)));
    }
    // the grower must agree on the optimum
    if let Some(best) = grower.best_for_feature(&rows, feature, totals) {
        debug_assert!(out.iter().any(|&(t, s)| t == best.threshold && s == best.score));
    }
    out
}
