//! k-nearest-neighbors on the standardized feature space.

use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::dsp::NUM_FEATURES;

/// Brute-force k-NN. Stores the (already standardized) training matrix;
/// prediction sorts by squared distance with the row index as tie-break.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub rows: Vec<[f64; NUM_FEATURES]>,
    pub labels: Vec<Label>,
}

impl KnnModel {
    pub fn fit(x: &[[f64; NUM_FEATURES]], y: &[Label], k: usize) -> Self {
        assert!(k >= 1 && k <= x.len());
        KnnModel {
            k,
            rows: x.to_vec(),
            labels: y.to_vec(),
        }
    }

    /// Fraction of the k nearest neighbors labeled FAKE.
    pub fn score(&self, row: &[f64]) -> f64 {
        let (fake_votes, _) = self.neighbor_votes(row);
        fake_votes as f64 / self.k as f64
    }

    /// Majority vote; an exact tie goes to the label of the single nearest
    /// neighbor.
    pub fn vote(&self, row: &[f64]) -> Label {
        let (fake_votes, nearest) = self.neighbor_votes(row);
        let real_votes = self.k - fake_votes;
        if fake_votes > real_votes {
            Label::Fake
        } else if real_votes > fake_votes {
            Label::Real
        } else {
            nearest
        }
    }

    fn neighbor_votes(&self, row: &[f64]) -> (usize, Label) {
        let mut order: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let d2: f64 = r.iter().zip(row).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2, i)
            })
            .collect();
        order.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let fake_votes = order[..self.k]
            .iter()
            .filter(|&&(_, i)| self.labels[i] == Label::Fake)
            .count();
        (fake_votes, self.labels[order[0].1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(v: f64) -> [f64; NUM_FEATURES] {
        let mut p = [0.0; NUM_FEATURES];
        p[0] = v;
        p
    }

    #[test]
    fn k1_recovers_training_labels() {
        let x: Vec<_> = (0..8).map(|i| point(i as f64)).collect();
        let y: Vec<Label> = (0..8)
            .map(|i| if i < 4 { Label::Real } else { Label::Fake })
            .collect();
        let model = KnnModel::fit(&x, &y, 1);
        for (xi, &yi) in x.iter().zip(&y) {
            assert_eq!(model.vote(xi), yi);
            assert_eq!(model.score(xi), yi.as_f64());
        }
    }

    #[test]
    fn even_tie_falls_back_to_nearest() {
        // query at 0.4: neighbors 0.0 (REAL) and 1.0 (FAKE); with k=2 the
        // vote ties and the closer REAL point decides
        let x = vec![point(0.0), point(1.0)];
        let y = vec![Label::Real, Label::Fake];
        let model = KnnModel::fit(&x, &y, 2);
        assert_eq!(model.vote(&point(0.4)), Label::Real);
        assert_eq!(model.vote(&point(0.6)), Label::Fake);
        assert_eq!(model.score(&point(0.4)), 0.5);
    }

    #[test]
    fn equal_distances_break_by_row_index() {
        // both training points are equidistant from the query; index 0 wins
        // the nearest slot, so a tied vote goes to its label
        let x = vec![point(-1.0), point(1.0)];
        let y = vec![Label::Fake, Label::Real];
        let model = KnnModel::fit(&x, &y, 2);
        assert_eq!(model.vote(&point(0.0)), Label::Fake);
    }

    #[test]
    fn majority_beats_distance_when_odd() {
        let x = vec![point(0.0), point(2.0), point(2.1)];
        let y = vec![Label::Real, Label::Fake, Label::Fake];
        let model = KnnModel::fit(&x, &y, 3);
        // nearest single neighbor is REAL but the FAKE pair outvotes it
        assert_eq!(model.vote(&point(0.5)), Label::Fake);
        assert!((model.score(&point(0.5)) - 2.0 / 3.0).abs() < 1e-12);
    }
}
