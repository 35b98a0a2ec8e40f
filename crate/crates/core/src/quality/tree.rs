//! Binary decision tree over feature vectors, with a CART-style learner.

use serde::{Deserialize, Serialize};

use super::features::{FeatureVector, FEATURE_COUNT};
use super::QualityError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeNode {
    Leaf {
        class: bool,
        /// Fraction of positive training examples that reached the leaf.
        score: f64,
    },
    /// `feature <= threshold` goes left.
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    fn check(&self) -> Result<(), QualityError> {
        match self {
            TreeNode::Leaf { score, .. } => {
                if !(0.0..=1.0).contains(score) {
                    return Err(QualityError::InvalidTree(format!("leaf score {score} outside [0, 1]")));
                }
                Ok(())
            }
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                if *feature >= FEATURE_COUNT {
                    return Err(QualityError::InvalidTree(format!("feature index {feature}")));
                }
                if threshold.is_nan() {
                    return Err(QualityError::InvalidTree("NaN threshold".into()));
                }
                left.check()?;
                right.check()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTree")]
pub struct DecisionTree {
    pub max_depth: usize,
    pub root: TreeNode,
}

#[derive(Deserialize)]
struct RawTree {
    max_depth: usize,
    root: TreeNode,
}

impl TryFrom<RawTree> for DecisionTree {
    type Error = QualityError;

    fn try_from(raw: RawTree) -> Result<Self, QualityError> {
        DecisionTree::new(raw.root, raw.max_depth)
    }
}

impl DecisionTree {
    pub fn new(root: TreeNode, max_depth: usize) -> Result<Self, QualityError> {
        root.check()?;
        if root.depth() > max_depth {
            return Err(QualityError::InvalidTree(format!(
                "depth {} exceeds max_depth {max_depth}",
                root.depth()
            )));
        }
        Ok(DecisionTree { max_depth, root })
    }

    pub fn leaf(class: bool, score: f64) -> Result<Self, QualityError> {
        DecisionTree::new(TreeNode::Leaf { class, score }, 0)
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }
}

/// Class and score of the leaf `fv` reaches.
pub fn tree_eval(tree: &DecisionTree, fv: &FeatureVector) -> (bool, f64) {
    let x = fv.to_array();
    let mut node = &tree.root;
    loop {
        match node {
            TreeNode::Leaf { class, score } => return (*class, *score),
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            } => node = if x[*feature] <= *threshold { left } else { right },
        }
    }
}

/// Candidate split quality as the exact fraction
/// `(p_l² + n_l²) / |l| + (p_r² + n_r²) / |r|`; larger means lower weighted
/// Gini impurity.
#[derive(Clone, Copy)]
struct Purity {
    num: u128,
    den: u128,
}

impl Purity {
    fn of(left: (u64, u64), right: (u64, u64)) -> Self {
        let sq = |(p, n): (u64, u64)| (p as u128).pow(2) + (n as u128).pow(2);
        let (nl, nr) = ((left.0 + left.1) as u128, (right.0 + right.1) as u128);
        Purity {
            num: sq(left) * nr + sq(right) * nl,
            den: nl * nr,
        }
    }

    fn better_than(&self, other: &Purity) -> bool {
        self.num * other.den > other.num * self.den
    }
}

fn leaf(rows: &[([f64; FEATURE_COUNT], bool)]) -> TreeNode {
    let pos = rows.iter().filter(|r| r.1).count();
    let score = pos as f64 / rows.len() as f64;
    TreeNode::Leaf {
        class: 2 * pos >= rows.len(),
        score,
    }
}

fn grow(rows: &mut [([f64; FEATURE_COUNT], bool)], depth: usize, max_depth: usize, min_leaf: usize) -> TreeNode {
    let pos = rows.iter().filter(|r| r.1).count();
    if depth == max_depth || pos == 0 || pos == rows.len() || rows.len() < 2 * min_leaf {
        return leaf(rows);
    }
    let total = (pos as u64, (rows.len() - pos) as u64);
    let mut best: Option<(Purity, usize, f64)> = None;
    for f in 0..FEATURE_COUNT {
        rows.sort_by(|a, b| a.0[f].total_cmp(&b.0[f]));
        let mut left = (0u64, 0u64);
        for i in 0..rows.len() - 1 {
            if rows[i].1 {
                left.0 += 1;
            } else {
                left.1 += 1;
            }
            let (here, next) = (rows[i].0[f], rows[i + 1].0[f]);
            if here == next || i + 1 < min_leaf || rows.len() - i - 1 < min_leaf {
                continue;
            }
            let purity = Purity::of(left, (total.0 - left.0, total.1 - left.1));
            // Strictly better only: earlier features and lower thresholds win ties.
            if best.as_ref().is_none_or(|(b, _, _)| purity.better_than(b)) {
                let mid = here + (next - here) / 2.0;
                best = Some((purity, f, if mid < next { mid } else { here }));
            }
        }
    }
    let Some((_, feature, threshold)) = best else {
        return leaf(rows);
    };
    let split = stable_partition(rows, |r| r.0[feature] <= threshold);
    let (l, r) = rows.split_at_mut(split);
    TreeNode::Split {
        feature,
        threshold,
        left: Box::new(grow(l, depth + 1, max_depth, min_leaf)),
        right: Box::new(grow(r, depth + 1, max_depth, min_leaf)),
    }
}

/// Stable in-place partition; returns the number of rows satisfying `pred`.
fn stable_partition<T: Clone>(rows: &mut [T], pred: impl Fn(&T) -> bool) -> usize {
    let (yes, no): (Vec<T>, Vec<T>) = rows.iter().cloned().partition(|r| pred(r));
    let n = yes.len();
    for (slot, v) in rows.iter_mut().zip(yes.into_iter().chain(no)) {
        *slot = v;
    }
    n
}

/// Greedy Gini splits on midpoints between consecutive distinct feature
/// values. Stops at `max_depth`, on pure nodes, and when a split would leave
/// fewer than `min_leaf` rows on a side.
pub fn tree_train(
    data: &[(FeatureVector, bool)],
    max_depth: usize,
    min_leaf: usize,
) -> Result<DecisionTree, QualityError> {
    if data.is_empty() {
        return Err(QualityError::EmptyData);
    }
    if max_depth == 0 || min_leaf == 0 {
        return Err(QualityError::InvalidParameter(
            "max_depth and min_leaf must be positive".into(),
        ));
    }
    let mut rows: Vec<([f64; FEATURE_COUNT], bool)> = data.iter().map(|(fv, y)| (fv.to_array(), *y)).collect();
    if rows.iter().any(|r| r.0.iter().any(|x| !x.is_finite())) {
        return Err(QualityError::InvalidParameter("features must be finite".into()));
    }
    let root = grow(&mut rows, 0, max_depth, min_leaf);
    DecisionTree::new(root, max_depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quality::Hardness;

    fn fv(work: f64, lev: usize, terminals: bool) -> FeatureVector {
        FeatureVector {
            work_time_s: work,
            has_more_than_two_words: true,
            terminals_in_nl: terminals,
            sql_complexity: Hardness::Easy,
            time_per_complexity: work,
            levenshtein_nl_sql: lev,
            order_by_direction_match: true,
            limit_words_present: true,
        }
    }

    #[test]
    fn leaf_tree() {
        let t = DecisionTree::leaf(true, 0.9).unwrap();
        assert_eq!(tree_eval(&t, &fv(1.0, 1, true)), (true, 0.9));
    }

    #[test]
    fn json_round_trip() {
        let json = r#"{"max_depth":1,"root":{"split":{"feature":5,"threshold":10.0,"left":{"leaf":{"class":true,"score":1.0}},"right":{"leaf":{"class":false,"score":0.0}}}}}"#;
        let t: DecisionTree = serde_json::from_str(json).unwrap();
        assert_eq!(serde_json::to_string(&t).unwrap(), json);
        assert_eq!(tree_eval(&t, &fv(0.0, 3, true)), (true, 1.0));
        assert_eq!(tree_eval(&t, &fv(0.0, 11, true)), (false, 0.0));
        let bad = json.replace("\"feature\":5", "\"feature\":8");
        assert!(serde_json::from_str::<DecisionTree>(&bad).is_err());
    }

    #[test]
    fn separable_and_pure() {
        let data: Vec<_> = (0..10).map(|i| (fv(i as f64, 0, true), i >= 6)).collect();
        let t = tree_train(&data, 1, 1).unwrap();
        assert!(data.iter().all(|(x, y)| tree_eval(&t, x).0 == *y));
        match &t.root {
            TreeNode::Split { feature, threshold, .. } => {
                assert_eq!((*feature, *threshold), (0, 5.5));
            }
            other => panic!("{other:?}"),
        }
        let same: Vec<_> = (0..4).map(|i| (fv(i as f64, 0, true), false)).collect();
        assert_eq!(
            tree_train(&same, 3, 1).unwrap().root,
            TreeNode::Leaf {
                class: false,
                score: 0.0
            }
        );
        assert_eq!(tree_train(&[], 1, 1), Err(QualityError::EmptyData));
    }
}
