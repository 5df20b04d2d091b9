//! Binary regression tree: variance-reduction splits on normalized time,
//! midpoint thresholds, mean-valued leaves.

use super::CartParams;

#[derive(Debug, Clone)]
enum Node {
    Leaf { value: f64 },
    Split { threshold: f64, left: u32, right: u32 },
}

#[derive(Debug, Clone)]
pub(crate) struct CartModel {
    nodes: Vec<Node>,
    root: u32,
}

pub(crate) fn fit(params: &CartParams, train_times: &[f64], values_std: &[f64]) -> CartModel {
    let n = train_times.len();
    // Prefix sums of y and y^2 over the time-sorted samples give O(1)
    // sum-of-squared-error for any contiguous range.
    let mut sum = vec![0.0f64; n + 1];
    let mut sum_sq = vec![0.0f64; n + 1];
    for (i, &v) in values_std.iter().enumerate() {
        sum[i + 1] = sum[i] + v;
        sum_sq[i + 1] = sum_sq[i] + v * v;
    }
    let mut builder = Builder {
        times: train_times,
        values: values_std,
        sum: &sum,
        sum_sq: &sum_sq,
        params,
        nodes: Vec::new(),
    };
    let root = builder.build(0, n, 0);
    CartModel {
        nodes: builder.nodes,
        root,
    }
}

struct Builder<'a> {
    times: &'a [f64],
    values: &'a [f64],
    sum: &'a [f64],
    sum_sq: &'a [f64],
    params: &'a CartParams,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    /// Direct summation, not the prefix-sum difference: a one-sample leaf
    /// must reproduce its value exactly for the memorization law to hold.
    fn mean(&self, lo: usize, hi: usize) -> f64 {
        self.values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
    }

    fn sse(&self, lo: usize, hi: usize) -> f64 {
        let s = self.sum[hi] - self.sum[lo];
        let sq = self.sum_sq[hi] - self.sum_sq[lo];
        (sq - s * s / (hi - lo) as f64).max(0.0)
    }

    fn push(&mut self, node: Node) -> u32 {
        self.nodes.push(node);
        (self.nodes.len() - 1) as u32
    }

    fn build(&mut self, lo: usize, hi: usize, depth: usize) -> u32 {
        let size = hi - lo;
        let min_leaf = self.params.min_leaf;
        if depth >= self.params.max_depth || size < 2 * min_leaf {
            let value = self.mean(lo, hi);
            return self.push(Node::Leaf { value });
        }
        let parent_sse = self.sse(lo, hi);
        let mut best: Option<(f64, usize)> = None;
        for p in (lo + min_leaf)..=(hi - min_leaf) {
            if self.times[p - 1] >= self.times[p] {
                continue;
            }
            let cost = self.sse(lo, p) + self.sse(p, hi);
            if best.is_none_or(|(c, _)| cost < c) {
                best = Some((cost, p));
            }
        }
        let split = best.and_then(|(cost, p)| {
            if cost >= parent_sse {
                return None; // no variance reduction (constant values)
            }
            let threshold = self.times[p - 1] + (self.times[p] - self.times[p - 1]) / 2.0;
            // Adjacent floats can collapse the midpoint onto an endpoint.
            if threshold <= self.times[p - 1] || threshold >= self.times[p] {
                return None;
            }
            Some((p, threshold))
        });
        match split {
            Some((p, threshold)) => {
                let left = self.build(lo, p, depth + 1);
                let right = self.build(p, hi, depth + 1);
                self.push(Node::Split { threshold, left, right })
            }
            None => {
                let value = self.mean(lo, hi);
                self.push(Node::Leaf { value })
            }
        }
    }
}

impl CartModel {
    pub fn predict(&self, times: &[f64]) -> Vec<f64> {
        times.iter().map(|&t| self.predict_one(t)).collect()
    }

    fn predict_one(&self, t: f64) -> f64 {
        let mut index = self.root;
        loop {
            match &self.nodes[index as usize] {
                Node::Leaf { value } => return *value,
                Node::Split { threshold, left, right } => {
                    index = if t < *threshold { *left } else { *right };
                }
            }
        }
    }

    #[cfg(test)]
    fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }
}
