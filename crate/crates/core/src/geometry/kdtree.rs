use alloc::vec::Vec;

use crate::dataset::{sq_dist, Dataset};

const LEAF_SIZE: usize = 16;

#[derive(Debug)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        dim: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// Static kd-tree over the rows of a dataset.
#[derive(Debug)]
pub(crate) struct KdTree<'a> {
    data: &'a Dataset,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl<'a> KdTree<'a> {
    pub(crate) fn build(data: &'a Dataset) -> Self {
        let mut tree = KdTree {
            data,
            order: (0..data.n_obj()).collect(),
            nodes: Vec::new(),
        };
        tree.build_node(0, data.n_obj());
        tree
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let d = self.data;
        let mut best_dim = 0;
        let mut best_spread = -1.0;
        for dim in 0..d.n_var() {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &i in &self.order[start..end] {
                let x = d.get(i, dim);
                lo = lo.min(x);
                hi = hi.max(x);
            }
            if hi - lo > best_spread {
                best_spread = hi - lo;
                best_dim = dim;
            }
        }
        if best_spread <= 0.0 {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let mid = start + (end - start) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            d.get(a, best_dim)
                .partial_cmp(&d.get(b, best_dim))
                .unwrap()
                .then(a.cmp(&b))
        });
        let value = d.get(self.order[mid], best_dim);
        self.nodes.push(Node::Split {
            dim: best_dim,
            value,
            left: 0,
            right: 0,
        });
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        if let Node::Split {
            left: l, right: r, ..
        } = &mut self.nodes[id]
        {
            *l = left;
            *r = right;
        }
        id
    }

    /// The `k` nearest rows to row `query`, excluding `query` itself, as
    /// `(squared distance, index)` sorted lexicographically.
    pub(crate) fn query(&self, query: usize, k: usize, best: &mut Vec<(f64, usize)>) {
        best.clear();
        let q = self.data.row(query);
        let mut stack: Vec<(usize, f64)> = Vec::with_capacity(64);
        stack.push((0, 0.0));
        while let Some((node, bound)) = stack.pop() {
            if best.len() == k && bound > best[k - 1].0 * (1.0 + 1e-12) {
                continue;
            }
            match self.nodes[node] {
                Node::Leaf { start, end } => {
                    for &j in &self.order[start..end] {
                        if j == query {
                            continue;
                        }
                        let d2 = sq_dist(q, self.data.row(j));
                        insert_candidate(best, k, (d2, j));
                    }
                }
                Node::Split {
                    dim,
                    value,
                    left,
                    right,
                } => {
                    let diff = q[dim] - value;
                    let (near, far) = if diff <= 0.0 {
                        (left, right)
                    } else {
                        (right, left)
                    };
                    // Far side first so the near side is popped next.
                    stack.push((far, bound.max(diff * diff)));
                    stack.push((near, bound));
                }
            }
        }
    }
}

#[inline]
pub(crate) fn insert_candidate(best: &mut Vec<(f64, usize)>, k: usize, cand: (f64, usize)) {
    let less = |a: &(f64, usize), b: &(f64, usize)| a.0 < b.0 || (a.0 == b.0 && a.1 < b.1);
    if best.len() == k {
        if !less(&cand, &best[k - 1]) {
            return;
        }
        best.pop();
    }
    let pos = best.partition_point(|x| less(x, &cand));
    best.insert(pos, cand);
}
