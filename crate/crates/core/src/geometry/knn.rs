use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::Float;

use super::kdtree::{insert_candidate, KdTree};
use crate::dataset::{sq_dist, Dataset};
use crate::error::{param_err, Result};

/// Above this ambient dimension the kd-tree is replaced by a linear scan.
pub const KDTREE_MAX_DIM: usize = 30;

/// Exact k-nearest-neighbour graph.
///
/// Row `i` lists the `k` nearest other points of `i`, sorted by ascending
/// distance; equal distances are ordered by ascending row index.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborGraph {
    k: usize,
    indices: Vec<usize>,
    distances: Vec<f64>,
}

impl NeighborGraph {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_obj(&self) -> usize {
        self.indices.len() / self.k
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.indices[i * self.k..(i + 1) * self.k]
    }

    pub fn distances(&self, i: usize) -> &[f64] {
        &self.distances[i * self.k..(i + 1) * self.k]
    }

    /// Distance from `i` to its `j`-th neighbour, 1-based.
    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.distances[i * self.k + j - 1]
    }
}

fn check(data: &Dataset, k: usize) -> Result<()> {
    if k == 0 {
        return param_err("k must be positive");
    }
    if k >= data.n_obj() {
        return param_err(alloc::format!(
            "k = {} must be smaller than the number of points {}",
            k,
            data.n_obj()
        ));
    }
    Ok(())
}

/// Exact Euclidean k-NN: kd-tree for `n_var <= 30`, linear scan above.
/// Both backends return identical graphs.
pub fn knn(data: &Dataset, k: usize) -> Result<NeighborGraph> {
    if data.n_var() <= KDTREE_MAX_DIM {
        knn_kdtree(data, k)
    } else {
        knn_brute_force(data, k)
    }
}

pub fn knn_kdtree(data: &Dataset, k: usize) -> Result<NeighborGraph> {
    check(data, k)?;
    let tree = KdTree::build(data);
    let n = data.n_obj();
    let mut indices = Vec::with_capacity(n * k);
    let mut distances = Vec::with_capacity(n * k);
    let mut best = Vec::with_capacity(k + 1);
    for i in 0..n {
        tree.query(i, k, &mut best);
        for &(d2, j) in &best {
            indices.push(j);
            distances.push(d2.sqrt());
        }
    }
    Ok(NeighborGraph {
        k,
        indices,
        distances,
    })
}

pub fn knn_brute_force(data: &Dataset, k: usize) -> Result<NeighborGraph> {
    check(data, k)?;
    let n = data.n_obj();
    let mut indices = Vec::with_capacity(n * k);
    let mut distances = Vec::with_capacity(n * k);
    let cmp = |a: &(f64, usize), b: &(f64, usize)| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(Ordering::Equal)
            .then(a.1.cmp(&b.1))
    };
    let mut all: Vec<(f64, usize)> = Vec::with_capacity(n);
    let mut best = Vec::with_capacity(k + 1);
    for i in 0..n {
        let q = data.row(i);
        if k * 8 < n {
            best.clear();
            for j in 0..n {
                if j != i {
                    insert_candidate(&mut best, k, (sq_dist(q, data.row(j)), j));
                }
            }
        } else {
            all.clear();
            all.extend(
                (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (sq_dist(q, data.row(j)), j)),
            );
            all.select_nth_unstable_by(k - 1, cmp);
            all.truncate(k);
            all.sort_by(cmp);
            best.clear();
            best.extend_from_slice(&all);
        }
        for &(d2, j) in &best {
            indices.push(j);
            distances.push(d2.sqrt());
        }
    }
    Ok(NeighborGraph {
        k,
        indices,
        distances,
    })
}
