//! Random forest: bootstrapped CART trees with Gini splits and a random
//! feature subset per split, grown to purity. The score is the fraction of
//! trees voting FAKE.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::dsp::NUM_FEATURES;

/// ⌈√26⌉ candidate features examined at each split.
pub const FEATURES_PER_SPLIT: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CartNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        fake: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartTree {
    pub nodes: Vec<CartNode>,
}

impl CartTree {
    pub fn vote(&self, row: &[f64]) -> bool {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                CartNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => idx = if row[*feature] < *threshold { *left } else { *right },
                CartNode::Leaf { fake } => return *fake,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<CartTree>,
}

impl ForestModel {
    pub fn fit(x: &[[f64; NUM_FEATURES]], y: &[Label], n_trees: usize, seed: u64) -> Self {
        assert_eq!(x.len(), y.len());
        assert!(!x.is_empty() && n_trees >= 1);
        // per-tree seeds fixed up front so rayon scheduling cannot affect them
        let seeds: Vec<u64> = (0..n_trees as u64)
            .map(|t| seed.wrapping_add(t.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
            .collect();
        let trees: Vec<CartTree> = seeds
            .par_iter()
            .map(|&s| grow_tree(x, y, s))
            .collect();
        ForestModel { trees }
    }

    /// Fraction of trees voting FAKE.
    pub fn score(&self, row: &[f64]) -> f64 {
        let fake = self.trees.iter().filter(|t| t.vote(row)).count();
        fake as f64 / self.trees.len() as f64
    }
}

fn gini(fake: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = fake as f64 / total as f64;
    2.0 * p * (1.0 - p)
}

fn grow_tree(x: &[[f64; NUM_FEATURES]], y: &[Label], seed: u64) -> CartTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = x.len();
    let bootstrap: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();

    let mut nodes: Vec<CartNode> = vec![CartNode::Leaf { fake: false }];
    // explicit work stack keeps deep trees off the call stack
    let mut work: Vec<(usize, Vec<usize>)> = vec![(0, bootstrap)];
    while let Some((node_id, rows)) = work.pop() {
        let fake = rows.iter().filter(|&&i| y[i] == Label::Fake).count();
        if fake == 0 || fake == rows.len() {
            nodes[node_id] = CartNode::Leaf { fake: fake > 0 };
            continue;
        }

        match best_split(x, y, &rows, &mut rng) {
            Some((feature, threshold)) => {
                let (mut left_rows, mut right_rows) = (Vec::new(), Vec::new());
                for &i in &rows {
                    if x[i][feature] < threshold {
                        left_rows.push(i);
                    } else {
                        right_rows.push(i);
                    }
                }
                let left = nodes.len();
                let right = nodes.len() + 1;
                nodes.push(CartNode::Leaf { fake: false });
                nodes.push(CartNode::Leaf { fake: false });
                nodes[node_id] = CartNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                };
                work.push((left, left_rows));
                work.push((right, right_rows));
            }
            None => {
                // candidate features constant (e.g. duplicated rows with
                // conflicting labels): majority leaf, REAL on a tie
                nodes[node_id] = CartNode::Leaf {
                    fake: 2 * fake > rows.len(),
                };
            }
        }
    }
    CartTree { nodes }
}

/// Best Gini split over a fresh random feature subset; None when no
/// candidate feature varies within the node.
fn best_split(
    x: &[[f64; NUM_FEATURES]],
    y: &[Label],
    rows: &[usize],
    rng: &mut ChaCha8Rng,
) -> Option<(usize, f64)> {
    // partial Fisher–Yates draw of FEATURES_PER_SPLIT distinct features
    let mut features: Vec<usize> = (0..NUM_FEATURES).collect();
    for i in 0..FEATURES_PER_SPLIT {
        let j = rng.gen_range(i..NUM_FEATURES);
        features.swap(i, j);
    }

    // the best split may have zero Gini improvement (splitting anyway is
    // what lets purity-grown trees crack interaction structure); when every
    // sampled feature is constant within the node, fall through to the rest
    // of the features rather than giving up on a mixed node
    let subset = &features[..FEATURES_PER_SPLIT];
    let remainder = &features[FEATURES_PER_SPLIT..];
    best_over(x, y, rows, subset).or_else(|| best_over(x, y, rows, remainder))
}

/// Feature/threshold pair minimizing the weighted child Gini over the given
/// features; None when all of them are constant within the node.
fn best_over(
    x: &[[f64; NUM_FEATURES]],
    y: &[Label],
    rows: &[usize],
    features: &[usize],
) -> Option<(usize, f64)> {
    let total = rows.len();
    let total_fake = rows.iter().filter(|&&i| y[i] == Label::Fake).count();

    let mut best: Option<(f64, usize, f64)> = None; // (weighted child gini, feature, threshold)
    let mut sorted = rows.to_vec();
    for &feature in features {
        sorted.sort_by(|&a, &b| x[a][feature].partial_cmp(&x[b][feature]).unwrap());
        let mut left_fake = 0usize;
        for (k, &i) in sorted.iter().enumerate() {
            if k > 0 {
                let prev = x[sorted[k - 1]][feature];
                let cur = x[i][feature];
                if prev < cur {
                    let left_total = k;
                    let right_total = total - k;
                    let weighted = (left_total as f64 * gini(left_fake, left_total)
                        + right_total as f64 * gini(total_fake - left_fake, right_total))
                        / total as f64;
                    if best.as_ref().is_none_or(|(w, _, _)| weighted < *w) {
                        best = Some((weighted, feature, 0.5 * (prev + cur)));
                    }
                }
            }
            if y[i] == Label::Fake {
                left_fake += 1;
            }
        }
    }
    best.map(|(_, feature, threshold)| (feature, threshold))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row2(a: f64, b: f64) -> [f64; NUM_FEATURES] {
        let mut r = [0.0; NUM_FEATURES];
        r[0] = a;
        r[1] = b;
        r
    }

    fn blobs() -> (Vec<[f64; NUM_FEATURES]>, Vec<Label>) {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..60 {
            let t = i as f64 * 0.05;
            x.push(row2(-2.0 - t.sin() * 0.3, -2.0 + t.cos() * 0.3));
            y.push(Label::Real);
            x.push(row2(2.0 + t.cos() * 0.3, 2.0 - t.sin() * 0.3));
            y.push(Label::Fake);
        }
        (x, y)
    }

    #[test]
    fn separable_blobs_and_score_range() {
        let (x, y) = blobs();
        let model = ForestModel::fit(&x, &y, 25, 42);
        assert_eq!(model.trees.len(), 25);
        for (xi, yi) in x.iter().zip(&y) {
            let s = model.score(xi);
            assert!((0.0..=1.0).contains(&s));
            // score is a vote fraction over 25 trees
            let votes = (s * 25.0).round();
            assert!((s - votes / 25.0).abs() < 1e-12);
            assert_eq!(s >= 0.5, *yi == Label::Fake);
        }
    }

    #[test]
    fn fit_is_deterministic_across_thread_schedules() {
        let (x, y) = blobs();
        let a = ForestModel::fit(&x, &y, 31, 7);
        let b = ForestModel::fit(&x, &y, 31, 7);
        assert_eq!(a, b);
        let c = ForestModel::fit(&x, &y, 31, 8);
        assert_ne!(a, c, "different seed should change the bootstrap");
    }

    #[test]
    fn conflicting_duplicate_rows_become_majority_leaves() {
        // identical rows, 2/3 FAKE: no split exists anywhere
        let x = vec![row2(1.0, 1.0); 9];
        let y: Vec<Label> = (0..9)
            .map(|i| if i % 3 == 0 { Label::Real } else { Label::Fake })
            .collect();
        let model = ForestModel::fit(&x, &y, 11, 3);
        // every tree is a single leaf; votes follow its bootstrap majority
        let s = model.score(&x[0]);
        assert!(s > 0.5, "FAKE-heavy duplicates should vote FAKE: {s}");
    }
}
