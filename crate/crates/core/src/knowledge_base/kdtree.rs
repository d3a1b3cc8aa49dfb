//! Exact k-d tree over complete encoded records, ranked by the masked
//! Euclidean distance.
//!
//! Query columns whose attribute is absent contribute nothing, so a split on
//! such a column gives no bound and both children are searched. Results are
//! ordered by `(distance, id)` and match an exhaustive scan exactly.

use std::cmp::Ordering;

use super::encoding::{EncodedFeatures, ENCODED_WIDTH};
use super::metric::euclidean;

const LEAF_SIZE: usize = 8;

#[derive(Debug, Clone)]
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

#[derive(Debug, Clone)]
pub struct KdTree {
    points: Vec<EncodedFeatures>,
    ids: Vec<u32>,
    /// Permutation of point indices; leaves own contiguous runs.
    order: Vec<usize>,
    nodes: Vec<Node>,
    root: Option<usize>,
}

/// A search hit: index into the points the tree was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub index: usize,
    pub id: u32,
    pub distance: f64,
}

fn hit_order(a: &Hit, b: &Hit) -> Ordering {
    a.distance.total_cmp(&b.distance).then(a.id.cmp(&b.id))
}

impl KdTree {
    pub fn build(points: Vec<EncodedFeatures>, ids: Vec<u32>) -> KdTree {
        assert_eq!(points.len(), ids.len());
        let mut tree = KdTree {
            order: (0..points.len()).collect(),
            points,
            ids,
            nodes: Vec::new(),
            root: None,
        };
        if !tree.points.is_empty() {
            let n = tree.points.len();
            tree.root = Some(tree.build_node(0, n));
        }
        tree
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn widest_dim(&self, start: usize, end: usize) -> (usize, f64) {
        let mut best = (0, -1.0);
        for dim in 0..ENCODED_WIDTH {
            let (lo, hi) = self.order[start..end].iter().fold(
                (f64::INFINITY, f64::NEG_INFINITY),
                |(lo, hi), &i| {
                    let v = self.points[i].values[dim];
                    (lo.min(v), hi.max(v))
                },
            );
            if hi - lo > best.1 {
                best = (dim, hi - lo);
            }
        }
        best
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let (dim, spread) = self.widest_dim(start, end);
        if end - start <= LEAF_SIZE || spread <= 0.0 {
            self.nodes.push(Node::Leaf { start, end });
            return self.nodes.len() - 1;
        }
        let points = &self.points;
        self.order[start..end]
            .sort_by(|&x, &y| points[x].values[dim].total_cmp(&points[y].values[dim]));
        let mid = start + (end - start) / 2;
        let value = self.points[self.order[mid]].values[dim];
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes.push(Node::Split {
            dim,
            value,
            left,
            right,
        });
        self.nodes.len() - 1
    }

    /// The `k` nearest points to `query`, nearest first.
    pub fn nearest(&self, query: &EncodedFeatures, k: usize) -> Vec<Hit> {
        let mut best = Vec::with_capacity(k + 1);
        if let Some(root) = self.root {
            if k > 0 {
                self.search(root, query, k, &mut best);
            }
        }
        best
    }

    fn search(&self, node: usize, query: &EncodedFeatures, k: usize, best: &mut Vec<Hit>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    let hit = Hit {
                        index: i,
                        id: self.ids[i],
                        distance: euclidean(query, &self.points[i]),
                    };
                    if best.len() == k && hit_order(&hit, &best[k - 1]) != Ordering::Less {
                        continue;
                    }
                    let pos = best
                        .binary_search_by(|h| hit_order(h, &hit))
                        .unwrap_or_else(|p| p);
                    best.insert(pos, hit);
                    best.truncate(k);
                }
            }
            Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                let attr = super::encoding::column_attributes()[dim];
                if !query.mask.contains(attr) {
                    self.search(left, query, k, best);
                    self.search(right, query, k, best);
                    return;
                }
                let diff = query.values[dim] - value;
                let (near, far) = if diff < 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.search(near, query, k, best);
                // same rounding path as the full distance, so this is a true
                // lower bound in floating point
                let bound = (diff * diff).sqrt();
                if best.len() < k || bound <= best[k - 1].distance {
                    self.search(far, query, k, best);
                }
            }
        }
    }
}
