//! Random trees, samples and configs shared by the integration tests.
#![allow(dead_code)]

use std::cmp::Ordering;

use fairtree::tree::TrainingMeta;
use fairtree::{DecisionTree, FairTTTSConfig, FairnessSpec, Node};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn meta() -> TrainingMeta {
    TrainingMeta { max_depth: None, min_samples_leaf: 1, rng_seed: 0 }
}

pub fn leaf(class: u8) -> Node {
    let mut class_counts = [1, 1];
    class_counts[class as usize] = 2;
    Node::Leaf { class_counts, predicted_class: class }
}

/// Nested description of a tree, flattened in pre-order so children always
/// follow their parent.
pub enum Shape {
    Leaf(u8),
    Split { feature: usize, threshold: f64, scale: f64, left: Box<Shape>, right: Box<Shape> },
}

impl Shape {
    /// Stand-in for the training majority: the majority class over the
    /// leaves below (ties to 0).
    fn majority(&self) -> u8 {
        let mut counts = [0usize; 2];
        self.count_leaves(&mut counts);
        u8::from(counts[1] > counts[0])
    }

    fn count_leaves(&self, counts: &mut [usize; 2]) {
        match self {
            Shape::Leaf(c) => counts[*c as usize] += 1,
            Shape::Split { left, right, .. } => {
                left.count_leaves(counts);
                right.count_leaves(counts);
            }
        }
    }

    pub fn build(&self, n_features: usize) -> DecisionTree {
        let mut nodes = Vec::new();
        self.flatten(&mut nodes);
        DecisionTree::new(nodes, n_features, meta()).expect("generated trees are valid")
    }

    fn flatten(&self, nodes: &mut Vec<Node>) -> usize {
        let id = nodes.len();
        match self {
            Shape::Leaf(c) => nodes.push(leaf(*c)),
            Shape::Split { feature, threshold, scale, left, right } => {
                nodes.push(leaf(0));
                let l = left.flatten(nodes);
                let r = right.flatten(nodes);
                nodes[id] = Node::Internal {
                    feature_index: *feature,
                    threshold: *threshold,
                    left: l,
                    right: r,
                    scale: *scale,
                    left_majority: left.majority(),
                    right_majority: right.majority(),
                };
            }
        }
        id
    }
}

/// Random shape of depth at most `max_depth`. Features `0..n_features`,
/// thresholds in [-2, 2]; the protected feature (if any) splits at 0.5.
pub fn random_shape<R: Rng>(r: &mut R, n_features: usize, max_depth: usize, protected: Option<usize>) -> Shape {
    if max_depth == 0 || r.random_bool(0.25) {
        return Shape::Leaf(r.random_range(0..2));
    }
    let feature = r.random_range(0..n_features);
    let threshold = if Some(feature) == protected { 0.5 } else { r.random_range(-2.0..2.0) };
    Shape::Split {
        feature,
        threshold,
        scale: r.random_range(0.3..4.0),
        left: Box::new(random_shape(r, n_features, max_depth - 1, protected)),
        right: Box::new(random_shape(r, n_features, max_depth - 1, protected)),
    }
}

pub fn random_tree<R: Rng>(r: &mut R, n_features: usize, max_depth: usize, protected: Option<usize>) -> DecisionTree {
    random_shape(r, n_features, max_depth, protected).build(n_features)
}

/// Sample whose protected entry (if any) is 0 or 1 and whose other entries
/// lie near typical thresholds so flips are likely.
pub fn random_sample<R: Rng>(r: &mut R, n_features: usize, protected: Option<usize>) -> Vec<f64> {
    (0..n_features)
        .map(|j| if Some(j) == protected { f64::from(r.random_range(0..2u8)) } else { r.random_range(-2.5..2.5) })
        .collect()
}

pub fn random_config<R: Rng>(r: &mut R) -> FairTTTSConfig {
    FairTTTSConfig {
        n_simulations: 100,
        p_max: r.random_range(0.0..=0.5),
        alpha: r.random_range(0.0..20.0),
        rng_seed: r.random(),
    }
}

pub fn random_spec<R: Rng>(r: &mut R, n_features: usize) -> FairnessSpec {
    FairnessSpec::new(r.random_range(0..n_features))
}

/// Independent flip probability: linear decay, clamp, boost and cap,
/// written out from the definitions.
pub fn oracle_flip(node: &Node, x: &[f64], spec: &FairnessSpec, cfg: &FairTTTSConfig) -> (f64, f64, bool) {
    let Node::Internal { feature_index, threshold, scale, left_majority, right_majority, .. } = *node else {
        return (0.0, 0.0, false);
    };
    let d = (x[feature_index] - threshold).abs();
    let mut base = cfg.p_max - if d == 0.0 { 0.0 } else { d / scale };
    if base < 0.0 {
        base = 0.0;
    }
    if base > cfg.p_max {
        base = cfg.p_max;
    }
    let det_majority = if x[feature_index] <= threshold { left_majority } else { right_majority };
    let triggered = feature_index == spec.protected_feature
        && x[feature_index] == spec.unprivileged_value
        && det_majority == spec.unfavorable_class;
    let adjusted = if triggered { f64::min(cfg.alpha * base, 0.5) } else { base };
    (base, adjusted, triggered)
}

/// Brute-force tally straight from the definitions.
pub struct Tally {
    pub accuracy: f64,
    pub eod: Option<f64>,
    pub di: Option<f64>,
}

pub fn count(y: &[u8], p: &[u8], g: &[u8], f: impl Fn(u8, u8, u8) -> bool) -> usize {
    (0..y.len()).filter(|&i| f(y[i], p[i], g[i])).count()
}

fn rate(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn tally(y: &[u8], p: &[u8], g: &[u8]) -> Tally {
    let correct = count(y, p, g, |a, b, _| a == b);
    let tpr = |grp| rate(count(y, p, g, |a, b, c| a == 1 && b == 1 && c == grp), count(y, p, g, |a, _, c| a == 1 && c == grp));
    let fpr = |grp| rate(count(y, p, g, |a, b, c| a == 0 && b == 1 && c == grp), count(y, p, g, |a, _, c| a == 0 && c == grp));
    let pos = |grp| rate(count(y, p, g, |_, b, c| b == 1 && c == grp), count(y, p, g, |_, _, c| c == grp));
    let eod = match (tpr(0), tpr(1), fpr(0), fpr(1)) {
        (Some(a), Some(b), Some(c), Some(d)) => Some(((a - b).abs() + (c - d).abs()) / 2.0),
        _ => None,
    };
    let di = match (pos(0), pos(1)) {
        (Some(u), Some(pr)) if pr > 0.0 => Some(u / pr),
        _ => None,
    };
    Tally { accuracy: correct as f64 / y.len() as f64, eod, di }
}

pub fn random_input<R: Rng>(r: &mut R) -> (Vec<u8>, Vec<u8>, Vec<u8>) {
    let n = r.random_range(1..=20);
    let bits = |r: &mut R| (0..n).map(|_| r.random_range(0..2u8)).collect::<Vec<_>>();
    (bits(r), bits(r), bits(r))
}

/// Exact nonnegative fraction.
#[derive(Clone, Copy, Debug)]
pub struct Frac(i128, i128);

impl Frac {
    fn sub_abs(self, o: Frac) -> Frac {
        Frac((self.0 * o.1 - o.0 * self.1).abs(), self.1 * o.1)
    }
    fn add(self, o: Frac) -> Frac {
        Frac(self.0 * o.1 + o.0 * self.1, self.1 * o.1)
    }
    fn cmp(self, o: Frac) -> Ordering {
        (self.0 * o.1).cmp(&(o.0 * self.1))
    }
}

/// Exhaustive search over both groups' grids with exact EOD arithmetic.
/// Returns grid indices (i for the privileged group, j for unprivileged).
pub fn grid_oracle(scores: &[f64], y: &[u8], g: &[u8]) -> (usize, usize) {
    let mut best: Option<(Frac, usize, usize, usize, usize)> = None;
    for i in 0..=100usize {
        for j in 0..=100usize {
            let t = [j as f64 / 100.0, i as f64 / 100.0];
            let pred: Vec<u8> = scores.iter().zip(g).map(|(&s, &gg)| u8::from(s >= t[gg as usize])).collect();
            let cell = |grp: u8, label: u8| {
                let members = (0..y.len()).filter(|&k| g[k] == grp && y[k] == label);
                let den = members.clone().count() as i128;
                let num = members.filter(|&k| pred[k] == 1).count() as i128;
                Frac(num, den)
            };
            let eod = cell(0, 1).sub_abs(cell(1, 1)).add(cell(0, 0).sub_abs(cell(1, 0)));
            let correct = (0..y.len()).filter(|&k| pred[k] == y[k]).count();
            let gap = i.abs_diff(j);
            let better = match best {
                None => true,
                Some((be, bc, bg, bi, bj)) => match eod.cmp(be) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => (std::cmp::Reverse(correct), gap, i, j) < (std::cmp::Reverse(bc), bg, bi, bj),
                },
            };
            if better {
                best = Some((eod, correct, gap, i, j));
            }
        }
    }
    let (_, _, _, i, j) = best.unwrap();
    (i, j)
}

pub fn threshold_fixture<R: Rng>(r: &mut R) -> (Vec<f64>, Vec<u8>, Vec<u8>) {
    loop {
        let n = r.random_range(4..=30);
        let g: Vec<u8> = (0..n).map(|_| r.random_range(0..2)).collect();
        let y: Vec<u8> = (0..n).map(|_| r.random_range(0..2)).collect();
        // Mix of on-grid scores (to exercise the >= boundary) and arbitrary
        // ones, loosely correlated with the label.
        let scores: Vec<f64> = y
            .iter()
            .map(|&label| {
                let s = if r.random_bool(0.5) {
                    f64::from(r.random_range(0..=100u8)) / 100.0
                } else {
                    r.random_range(0.0..=1.0)
                };
                if label == 1 { (s + 0.3).min(1.0) } else { s * 0.8 }
            })
            .collect();
        let has = |grp, label| (0..n).any(|k| g[k] == grp && y[k] == label);
        if has(0, 0) && has(0, 1) && has(1, 0) && has(1, 1) {
            return (scores, y, g);
        }
    }
}
