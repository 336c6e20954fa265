//! Bagged CART regression forest.
//!
//! Each tree is grown on a bootstrap sample with `ceil(p/3)` candidate
//! features drawn per node, splitting on the largest reduction in squared
//! error. Nodes with fewer than five rows become leaves. Every tree derives
//! its random stream from `(seed, tree index)`, and rows are put in a
//! canonical order first, so the fitted forest does not depend on the order
//! in which rows were supplied.

use std::cmp::Ordering;

use rand::Rng as _;

use super::RegressionModel;
use crate::exec::Execution;
use crate::rng::{derive, rng, Rng};
use crate::series::EmbeddedDataset;

pub const MIN_SPLIT_ROWS: usize = 5;

#[derive(Debug, Clone)]
pub struct RfParams {
    pub n_trees: usize,
    /// Candidate features per split; `None` means `ceil(p / 3)`.
    pub mtry: Option<usize>,
    pub bootstrap: bool,
    pub exec: Execution,
}

impl RfParams {
    pub fn new(n_trees: usize) -> Self {
        Self {
            n_trees,
            mtry: None,
            bootstrap: true,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf(v) => return v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf(_))).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    pub trees: Vec<Tree>,
}

impl RegressionModel for RandomForest {
    fn predict(&self, row: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict(row)).sum::<f64>() / self.trees.len() as f64
    }
}

fn cmp_rows(data: &EmbeddedDataset, a: usize, b: usize) -> Ordering {
    data.row(a)
        .iter()
        .zip(data.row(b))
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| data.targets[a].total_cmp(&data.targets[b]))
}

pub fn rf_train(data: &EmbeddedDataset, params: &RfParams, seed: u64) -> RandomForest {
    let n = data.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| cmp_rows(data, a, b));
    let mtry = params
        .mtry
        .unwrap_or_else(|| data.p.div_ceil(3))
        .clamp(1, data.p.max(1));
    let canon = Canonical::new(data, &order);
    let trees = params.exec.map_range(params.n_trees.max(1), |t| {
        let mut r = rng(derive(seed, t as u64));
        let mut counts = vec![0u32; n];
        if params.bootstrap {
            for _ in 0..n {
                counts[r.random_range(0..n)] += 1;
            }
        } else {
            counts.fill(1);
        }
        grow(&canon, &counts, mtry, &mut r)
    });
    RandomForest { trees }
}

/// Rows in canonical order, stored by column, with every column's row
/// positions presorted by value (ties by position).
struct Canonical {
    p: usize,
    columns: Vec<Vec<f64>>,
    targets: Vec<f64>,
    sorted: Vec<Vec<u32>>,
}

impl Canonical {
    fn new(data: &EmbeddedDataset, order: &[usize]) -> Self {
        let p = data.p;
        let columns: Vec<Vec<f64>> = (0..p)
            .map(|f| order.iter().map(|&i| data.row(i)[f]).collect())
            .collect();
        let targets = order.iter().map(|&i| data.targets[i]).collect();
        let sorted = columns
            .iter()
            .map(|col| {
                let mut idx: Vec<u32> = (0..order.len() as u32).collect();
                idx.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]).then(a.cmp(&b)));
                idx
            })
            .collect();
        Self {
            p,
            columns,
            targets,
            sorted,
        }
    }
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
    left_rows: usize,
}

/// Grows one tree on the rows with nonzero `counts` (bootstrap
/// multiplicities). Each node owns the same range `lo..hi` of every
/// per-feature sorted list; splitting partitions all lists stably.
fn grow(data: &Canonical, counts: &[u32], mtry: usize, r: &mut Rng) -> Tree {
    let p = data.p;
    let mut lists: Vec<Vec<u32>> = data
        .sorted
        .iter()
        .map(|s| s.iter().copied().filter(|&i| counts[i as usize] > 0).collect())
        .collect();
    let u = lists.first().map_or(0, Vec::len);
    let mut goes_left = vec![false; counts.len()];
    let mut scratch: Vec<u32> = Vec::with_capacity(u);
    let mut features: Vec<usize> = (0..p).collect();
    let mut nodes = vec![Node::Leaf(0.0)];
    let mut stack = vec![(0usize, 0usize, u)];

    while let Some((slot, lo, hi)) = stack.pop() {
        let rows = &lists[0][lo..hi];
        let (mut total, mut weight) = (0.0, 0u64);
        for &i in rows {
            let c = counts[i as usize];
            total += c as f64 * data.targets[i as usize];
            weight += c as u64;
        }
        let mean = total / weight as f64;
        let first = data.targets[rows[0] as usize];
        if (weight as usize) < MIN_SPLIT_ROWS || rows.iter().all(|&i| data.targets[i as usize] == first) {
            nodes[slot] = Node::Leaf(mean);
            continue;
        }
        // Partial Fisher-Yates: the first `mtry` entries are the candidates.
        for k in 0..mtry {
            let j = r.random_range(k..p);
            features.swap(k, j);
        }
        let m = weight as f64;
        let base = total * total / m;
        let mut best: Option<BestSplit> = None;
        for &f in &features[..mtry] {
            let col = &data.columns[f];
            let list = &lists[f][lo..hi];
            let (mut left_sum, mut nl) = (0.0, 0.0);
            for k in 0..list.len() - 1 {
                let i = list[k] as usize;
                let c = counts[i] as f64;
                left_sum += c * data.targets[i];
                nl += c;
                let (x, x_next) = (col[i], col[list[k + 1] as usize]);
                if x == x_next {
                    continue;
                }
                let right_sum = total - left_sum;
                let gain = left_sum * left_sum / nl + right_sum * right_sum / (m - nl) - base;
                if best.as_ref().is_none_or(|b| gain > b.gain) {
                    best = Some(BestSplit {
                        feature: f,
                        threshold: 0.5 * (x + x_next),
                        gain,
                        left_rows: k + 1,
                    });
                }
            }
        }
        let Some(split) = best.filter(|b| b.gain > 0.0) else {
            nodes[slot] = Node::Leaf(mean);
            continue;
        };
        let mid = lo + split.left_rows;
        for (k, &i) in lists[split.feature][lo..hi].iter().enumerate() {
            goes_left[i as usize] = k < split.left_rows;
        }
        for (f, list) in lists.iter_mut().enumerate() {
            if f == split.feature {
                continue;
            }
            scratch.clear();
            let seg = &mut list[lo..hi];
            let mut w = 0;
            for k in 0..seg.len() {
                let i = seg[k];
                if goes_left[i as usize] {
                    seg[w] = i;
                    w += 1;
                } else {
                    scratch.push(i);
                }
            }
            seg[w..].copy_from_slice(&scratch);
        }
        let left = nodes.len();
        nodes.push(Node::Leaf(0.0));
        nodes.push(Node::Leaf(0.0));
        nodes[slot] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right: left + 1,
        };
        stack.push((left + 1, mid, hi));
        stack.push((left, lo, mid));
    }
    Tree { nodes }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(n: usize) -> EmbeddedDataset {
        let mut features = Vec::new();
        let mut targets = Vec::new();
        for i in 0..n {
            let a = (i as f64 * 0.37).sin();
            let b = (i as f64 * 0.11).cos();
            features.extend([a, b, a * b]);
            targets.push(if a > 0.0 { 3.0 + b } else { -1.0 + 0.5 * b });
        }
        EmbeddedDataset { features, targets, p: 3 }
    }

    #[test]
    fn predictions_stay_within_target_range() {
        let d = data(120);
        let rf = rf_train(&d, &RfParams::new(30), 5);
        let (lo, hi) = d
            .targets
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
        for probe in [[5.0, 5.0, 5.0], [-5.0, 0.0, 1.0], [0.1, -0.2, 0.0]] {
            let v = rf.predict(&probe);
            assert!(v >= lo && v <= hi);
        }
    }

    #[test]
    fn same_seed_is_bitwise_identical_and_order_free() {
        let d = data(80);
        let a = rf_train(&d, &RfParams::new(10), 3);
        let b = rf_train(&d, &RfParams::new(10), 3);
        assert_eq!(a, b);

        let n = d.rows();
        let perm: Vec<usize> = (0..n).map(|i| (i * 31 + 7) % n).collect();
        let shuffled = EmbeddedDataset {
            features: perm.iter().flat_map(|&i| d.row(i).to_vec()).collect(),
            targets: perm.iter().map(|&i| d.targets[i]).collect(),
            p: d.p,
        };
        let c = rf_train(&shuffled, &RfParams::new(10), 3);
        for i in 0..n {
            assert_eq!(a.predict(d.row(i)).to_bits(), c.predict(d.row(i)).to_bits());
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let d = data(60);
        let mut params = RfParams::new(8);
        params.exec = Execution::Sequential;
        let a = rf_train(&d, &params, 9);
        params.exec = Execution::Parallel;
        let b = rf_train(&d, &params, 9);
        assert_eq!(a, b);
    }

    #[test]
    fn small_nodes_are_leaves() {
        let d = EmbeddedDataset {
            features: vec![1.0, 2.0, 3.0, 4.0],
            targets: vec![1.0, 2.0, 3.0, 4.0],
            p: 1,
        };
        let rf = rf_train(&d, &RfParams::new(1), 0);
        assert_eq!(rf.trees[0].n_leaves(), 1);
    }
}
