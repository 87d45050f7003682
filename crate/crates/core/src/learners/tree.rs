use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::linalg::Mat;
use crate::rng::Rng;
use crate::scalar::Real;

/// Binary regression tree; `x[feature] < threshold` goes left. Node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Tree<T> {
    pub nodes: Vec<Node<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", rename_all = "snake_case")]
pub enum Node<T> {
    Split {
        feature: usize,
        threshold: T,
        left: usize,
        right: usize,
        /// objective reduction achieved by this split
        gain: T,
        cover: usize,
    },
    Leaf {
        value: T,
        cover: usize,
    },
}

impl<T: Real> Tree<T> {
    pub fn leaf(value: T) -> Self {
        Tree { nodes: vec![Node::Leaf { value, cover: 0 }] }
    }

    /// Depth-one tree on `feature`.
    pub fn stump(feature: usize, threshold: T, left: T, right: T) -> Self {
        Tree {
            nodes: vec![
                Node::Split { feature, threshold, left: 1, right: 2, gain: T::zero(), cover: 0 },
                Node::Leaf { value: left, cover: 0 },
                Node::Leaf { value: right, cover: 0 },
            ],
        }
    }

    pub fn predict_row(&self, x: &[T]) -> T {
        let mut k = 0;
        loop {
            match &self.nodes[k] {
                Node::Leaf { value, .. } => return *value,
                Node::Split { feature, threshold, left, right, .. } => {
                    k = if x[*feature] < *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk<T>(nodes: &[Node<T>], k: usize) -> usize {
            match &nodes[k] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    /// `(feature, gain)` for every split.
    pub fn split_gains(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Split { feature, gain, .. } => Some((*feature, *gain)),
            Node::Leaf { .. } => None,
        })
    }

    pub(crate) fn scale_leaves(&mut self, factor: T) {
        for n in &mut self.nodes {
            if let Node::Leaf { value, .. } = n {
                *value *= factor;
            }
        }
    }
}

pub(crate) struct GrowParams<T> {
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    /// features examined per split; `>= n_features` means all
    pub max_features: usize,
    pub l1: T,
    pub l2: T,
}

impl<T: Real> GrowParams<T> {
    pub fn cart(max_depth: Option<usize>, min_samples_leaf: usize) -> Self {
        GrowParams {
            max_depth: max_depth.unwrap_or(usize::MAX),
            min_samples_leaf: min_samples_leaf.max(1),
            max_features: usize::MAX,
            l1: T::zero(),
            l2: T::zero(),
        }
    }

    fn shrink(&self, g: T) -> T {
        if g > self.l1 {
            g - self.l1
        } else if g < -self.l1 {
            g + self.l1
        } else {
            T::zero()
        }
    }

    /// Regularized objective credit of a node with target sum `g` over `n` rows.
    fn score(&self, g: T, n: usize) -> T {
        let t = self.shrink(g);
        t * t / (T::from_usize_lossy(n) + self.l2)
    }

    fn leaf_value(&self, g: T, n: usize) -> T {
        self.shrink(g) / (T::from_usize_lossy(n) + self.l2)
    }
}

struct Grower<'a, T> {
    x: &'a Mat<T>,
    target: &'a [T],
    p: &'a GrowParams<T>,
    rng: Option<&'a mut Rng>,
    nodes: Vec<Node<T>>,
    scratch: Vec<(T, T)>,
}

/// Greedy CART growth on `rows` (duplicates allowed, as in a bootstrap sample).
///
/// A split is accepted only if its gain exceeds a roundoff floor; ties keep the
/// lowest feature index, then the lowest threshold.
pub(crate) fn grow<T: Real>(x: &Mat<T>, target: &[T], rows: Vec<usize>, p: &GrowParams<T>, rng: Option<&mut Rng>) -> Tree<T> {
    let mut g = Grower { x, target, p, rng, nodes: Vec::new(), scratch: Vec::new() };
    g.build(rows, 0);
    Tree { nodes: g.nodes }
}

impl<T: Real> Grower<'_, T> {
    fn build(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let n = rows.len();
        let g: T = rows.iter().map(|&r| self.target[r]).sum();
        self.nodes.push(Node::Leaf { value: self.p.leaf_value(g, n), cover: n });
        if depth >= self.p.max_depth || n < 2 * self.p.min_samples_leaf {
            return id;
        }
        let Some((feature, threshold, gain)) = self.best_split(&rows, g) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = rows.into_iter().partition(|&i| self.x[(i, feature)] < threshold);
        let left = self.build(l, depth + 1);
        let right = self.build(r, depth + 1);
        self.nodes[id] = Node::Split { feature, threshold, left, right, gain, cover: n };
        id
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.x.cols;
        match self.rng.as_deref_mut() {
            Some(rng) if self.p.max_features < d => {
                let mut all: Vec<usize> = (0..d).collect();
                for i in 0..self.p.max_features {
                    let j = rng.random_range(i..d);
                    all.swap(i, j);
                }
                let mut pick = all[..self.p.max_features.max(1)].to_vec();
                pick.sort_unstable();
                pick
            }
            _ => (0..d).collect(),
        }
    }

    fn best_split(&mut self, rows: &[usize], g: T) -> Option<(usize, T, T)> {
        let n = rows.len();
        let parent = self.p.score(g, n);
        let sq: T = rows.iter().map(|&r| self.target[r] * self.target[r]).sum();
        let floor = T::lit(1e-12) * (sq + parent.abs()) + T::min_positive_value();
        let min_leaf = self.p.min_samples_leaf;
        let mut best: Option<(usize, T, T)> = None;
        for f in self.candidate_features() {
            self.scratch.clear();
            self.scratch.extend(rows.iter().map(|&r| (self.x[(r, f)], self.target[r])));
            self.scratch.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite features"));
            let mut gl = T::zero();
            for i in 0..n - 1 {
                gl += self.scratch[i].1;
                let (v, next) = (self.scratch[i].0, self.scratch[i + 1].0);
                let nl = i + 1;
                if nl < min_leaf || n - nl < min_leaf || !(v < next) {
                    continue;
                }
                let gain = self.p.score(gl, nl) + self.p.score(g - gl, n - nl) - parent;
                if gain > floor && best.is_none_or(|(_, _, bg)| gain > bg) {
                    let mut thr = v + (next - v) / T::lit(2.0);
                    if !(thr > v) {
                        thr = next;
                    }
                    best = Some((f, thr, gain));
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stump_semantics() {
        let t = Tree::stump(0, 2.0, 1.0, 3.0);
        assert_eq!(t.predict_row(&[0.0]), 1.0);
        assert_eq!(t.predict_row(&[5.0]), 3.0);
        assert_eq!(t.predict_row(&[2.0]), 3.0);
    }

    #[test]
    fn perfectly_separable_needs_depth_one() {
        let x = Mat::from_rows(6, 2, vec![0.3, 1.0, 0.1, 2.0, 0.2, 3.0, 0.9, 4.0, 0.8, 5.0, 0.7, 6.0]);
        let y = [1.0, 1.0, 1.0, 7.0, 7.0, 7.0];
        let t = grow(&x, &y, (0..6).collect(), &GrowParams::cart(Some(1), 1), None);
        assert_eq!(t.depth(), 1);
        for i in 0..6 {
            assert_eq!(t.predict_row(x.row(i)), y[i]);
        }
        match &t.nodes[0] {
            Node::Split { feature, threshold, .. } => {
                // feature 1 separates equally well, the lower index wins
                assert_eq!(*feature, 0);
                assert!((*threshold - 0.5f64).abs() < 1e-12);
            }
            _ => panic!("expected a split"),
        }
    }

    #[test]
    fn constant_target_is_a_single_leaf() {
        let x = Mat::from_rows(4, 1, vec![1.0, 2.0, 3.0, 4.0]);
        let t = grow(&x, &[2.5; 4], (0..4).collect(), &GrowParams::cart(None, 1), None);
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.predict_row(&[9.0]), 2.5);
    }

    #[test]
    fn regularized_leaf_value() {
        let p = GrowParams { max_depth: 0, min_samples_leaf: 1, max_features: usize::MAX, l1: 1.0, l2: 2.0 };
        // sum 6 over 3 rows: (6 - 1) / (3 + 2)
        assert_eq!(p.leaf_value(6.0, 3), 1.0);
        assert_eq!(p.leaf_value(0.5, 3), 0.0);
        assert_eq!(p.leaf_value(-6.0, 3), -1.0);
    }
}
