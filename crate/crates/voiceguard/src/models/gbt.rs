//! Gradient-boosted decision trees with second-order logistic boosting.
//!
//! Each round fits a regression tree to the gradient/hessian of the
//! logistic loss (g = p − y, h = p(1−p)); leaves take the Newton step
//! w = −G/(H+λ) and splits maximize
//! gain = ½·(G_L²/(H_L+λ) + G_R²/(H_R+λ) − G²/(H+λ)).
//! Trees grow level-wise with exact greedy splits over presorted feature
//! columns, so a round costs O(features · rows · depth).

use serde::{Deserialize, Serialize};

use crate::dsp::NUM_FEATURES;

#[derive(Debug, Clone, Copy)]
pub struct GbtParams {
    pub rounds: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub lambda: f64,
    pub min_child_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Split {
        feature: usize,
        /// Standardized-space midpoint; rows with value < threshold go left.
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        /// Raw Newton-step weight; the learning rate is applied at predict.
        weight: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf_weight(&self, row: &[f64]) -> f64 {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    idx = if row[*feature] < *threshold { *left } else { *right };
                }
                Node::Leaf { weight } => return *weight,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    pub learning_rate: f64,
    pub trees: Vec<Tree>,
}

pub(crate) fn sigmoid(m: f64) -> f64 {
    1.0 / (1.0 + (-m).exp())
}

impl GbtModel {
    /// `y` holds 0.0 (REAL) / 1.0 (FAKE) targets.
    pub fn fit(x: &[[f64; NUM_FEATURES]], y: &[f64], params: &GbtParams) -> Self {
        assert_eq!(x.len(), y.len());
        assert!(!x.is_empty());
        let n = x.len();

        // global presort of every feature column, reused across all rounds
        let orders: Vec<Vec<u32>> = (0..NUM_FEATURES)
            .map(|j| {
                let mut idx: Vec<u32> = (0..n as u32).collect();
                idx.sort_by(|&a, &b| {
                    x[a as usize][j].partial_cmp(&x[b as usize][j]).unwrap()
                });
                idx
            })
            .collect();

        let mut margins = vec![0.0f64; n];
        let mut g = vec![0.0f64; n];
        let mut h = vec![0.0f64; n];
        let mut trees = Vec::with_capacity(params.rounds);
        for _ in 0..params.rounds {
            for i in 0..n {
                let p = sigmoid(margins[i]);
                g[i] = p - y[i];
                h[i] = p * (1.0 - p);
            }
            let (tree, leaf_of_row) = grow_tree(x, &orders, &g, &h, params);
            for i in 0..n {
                if let Node::Leaf { weight } = tree.nodes[leaf_of_row[i]] {
                    margins[i] += params.learning_rate * weight;
                }
            }
            trees.push(tree);
        }
        GbtModel {
            learning_rate: params.learning_rate,
            trees,
        }
    }

    pub fn margin(&self, row: &[f64]) -> f64 {
        self.trees
            .iter()
            .map(|t| self.learning_rate * t.leaf_weight(row))
            .sum()
    }

    /// P(FAKE) for one row.
    pub fn probability(&self, row: &[f64]) -> f64 {
        sigmoid(self.margin(row))
    }

    /// P(FAKE) after each boosting round — the training-loss diagnostics.
    pub fn staged_probabilities(&self, row: &[f64]) -> Vec<f64> {
        let mut margin = 0.0;
        self.trees
            .iter()
            .map(|t| {
                margin += self.learning_rate * t.leaf_weight(row);
                sigmoid(margin)
            })
            .collect()
    }
}

struct NodeStats {
    g: f64,
    h: f64,
}

#[derive(Clone)]
struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
    left_g: f64,
    left_h: f64,
}

/// One level-wise tree. Also returns each row's final leaf node index so
/// the caller can update margins without re-walking the tree.
fn grow_tree(
    x: &[[f64; NUM_FEATURES]],
    orders: &[Vec<u32>],
    g: &[f64],
    h: &[f64],
    params: &GbtParams,
) -> (Tree, Vec<usize>) {
    let n = x.len();
    let lambda = params.lambda;
    let score = |sg: f64, sh: f64| sg * sg / (sh + lambda);

    let mut nodes: Vec<Node> = vec![Node::Leaf { weight: 0.0 }]; // placeholder root
    let mut node_of: Vec<usize> = vec![0; n];
    let root = NodeStats {
        g: g.iter().sum(),
        h: h.iter().sum(),
    };
    // nodes of the level currently being split, as (node index, stats)
    let mut level: Vec<(usize, NodeStats)> = vec![(0, root)];

    for _depth in 0..params.max_depth {
        if level.is_empty() {
            break;
        }
        let level_base = level[0].0; // node ids in a level are contiguous
        let mut best: Vec<Option<Candidate>> = (0..level.len()).map(|_| None).collect();

        for feature in 0..NUM_FEATURES {
            // per-node running scan state over this feature's sorted order
            let mut acc_g = vec![0.0f64; level.len()];
            let mut acc_h = vec![0.0f64; level.len()];
            let mut prev_val: Vec<f64> = vec![f64::NAN; level.len()];
            for &ri in &orders[feature] {
                let i = ri as usize;
                let node = node_of[i];
                if node < level_base || node - level_base >= level.len() {
                    continue;
                }
                let slot = node - level_base;
                let v = x[i][feature];
                if !prev_val[slot].is_nan() && prev_val[slot] < v {
                    // boundary between distinct values: candidate split
                    let stats = &level[slot].1;
                    let (lg, lh) = (acc_g[slot], acc_h[slot]);
                    let (rg, rh) = (stats.g - lg, stats.h - lh);
                    if lh >= params.min_child_weight && rh >= params.min_child_weight {
                        let gain = 0.5 * (score(lg, lh) + score(rg, rh) - score(stats.g, stats.h));
                        let better = match &best[slot] {
                            None => gain > 0.0,
                            Some(c) => gain > c.gain,
                        };
                        if better {
                            best[slot] = Some(Candidate {
                                gain,
                                feature,
                                threshold: 0.5 * (prev_val[slot] + v),
                                left_g: lg,
                                left_h: lh,
                            });
                        }
                    }
                }
                acc_g[slot] += g[i];
                acc_h[slot] += h[i];
                prev_val[slot] = v;
            }
        }

        // materialize splits and queue the next level
        let mut next_level: Vec<(usize, NodeStats)> = Vec::new();
        let mut split_of_slot: Vec<Option<(usize, f64, usize, usize)>> = vec![None; level.len()];
        for (slot, (node_id, stats)) in level.iter().enumerate() {
            match &best[slot] {
                Some(c) => {
                    let left = nodes.len();
                    let right = nodes.len() + 1;
                    nodes.push(Node::Leaf { weight: 0.0 });
                    nodes.push(Node::Leaf { weight: 0.0 });
                    nodes[*node_id] = Node::Split {
                        feature: c.feature,
                        threshold: c.threshold,
                        left,
                        right,
                    };
                    split_of_slot[slot] = Some((c.feature, c.threshold, left, right));
                    next_level.push((
                        left,
                        NodeStats {
                            g: c.left_g,
                            h: c.left_h,
                        },
                    ));
                    next_level.push((
                        right,
                        NodeStats {
                            g: stats.g - c.left_g,
                            h: stats.h - c.left_h,
                        },
                    ));
                }
                None => {
                    nodes[*node_id] = Node::Leaf {
                        weight: -stats.g / (stats.h + lambda),
                    };
                }
            }
        }
        for i in 0..n {
            let node = node_of[i];
            if node >= level_base && node - level_base < level.len() {
                if let Some((f, thr, left, right)) = split_of_slot[node - level_base] {
                    node_of[i] = if x[i][f] < thr { left } else { right };
                }
            }
        }
        level = next_level;
    }

    // depth limit reached: finalize what's left
    for (node_id, stats) in level {
        nodes[node_id] = Node::Leaf {
            weight: -stats.g / (stats.h + lambda),
        };
    }
    (Tree { nodes }, node_of)
}
