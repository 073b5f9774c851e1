//! Axis-aligned recursive binary partition of the unit cube.
//!
//! Nodes live in an index arena. Each split appends the two children, so the
//! partition of size K is recoverable from the first `2K - 1` nodes; nested
//! partition sequences snapshot in O(1) by remembering a node limit.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::data::{LabeledDataset, PointMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum NodeKind {
    Leaf,
    Split {
        dim: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Node {
    /// Bin id of this node while it was (or still is) a leaf. The left child
    /// of a split inherits it, so snapshots can read bin ids off internal
    /// nodes.
    bin: usize,
    kind: NodeKind,
}

/// An axis-aligned box, as (lo, hi) per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Rect {
    pub fn unit(d: usize) -> Self {
        Rect {
            lo: vec![0.0; d],
            hi: vec![1.0; d],
        }
    }

    pub fn volume(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| b - a)
            .product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        // half-open on the upper side except at the cube boundary, matching
        // the `< value` left / `>= value` right descent rule
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(&xi, (&lo, &hi))| {
            xi >= lo && (xi < hi || (hi == 1.0 && xi <= 1.0))
        })
    }
}

/// Binary tree of axis-aligned splits; leaves are the bins.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionTree {
    d: usize,
    nodes: Vec<Node>,
    /// bin id -> node index of the leaf currently holding that bin
    leaf_node: Vec<usize>,
    /// bin id -> hyper-rectangle
    extents: Vec<Rect>,
}

impl PartitionTree {
    /// Single-bin partition of the unit cube.
    pub fn unit(d: usize) -> Self {
        assert!(d >= 1, "dimension must be positive");
        PartitionTree {
            d,
            nodes: vec![Node {
                bin: 0,
                kind: NodeKind::Leaf,
            }],
            leaf_node: vec![0],
            extents: vec![Rect::unit(d)],
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of bins.
    pub fn k(&self) -> usize {
        self.leaf_node.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn bin_extent(&self, bin: usize) -> Result<&Rect> {
        self.extents.get(bin).ok_or(Error::UnknownBin(bin))
    }

    /// Bin containing `x`: descend comparing `x[dim] < value` (left) versus
    /// `>= value` (right).
    pub fn locate(&self, x: &[f64]) -> Result<usize> {
        self.locate_at(x, self.nodes.len())
    }

    /// Locate within the snapshot made of the first `node_limit` nodes.
    pub fn locate_at(&self, x: &[f64], node_limit: usize) -> Result<usize> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: x.len(),
            });
        }
        let mut i = 0usize;
        loop {
            match self.nodes[i].kind {
                NodeKind::Leaf => return Ok(self.nodes[i].bin),
                NodeKind::Split {
                    dim,
                    value,
                    left,
                    right,
                } => {
                    if right >= node_limit {
                        // split not yet applied in this snapshot
                        return Ok(self.nodes[i].bin);
                    }
                    i = if x[dim] < value { left } else { right };
                }
            }
        }
    }

    /// Node limit corresponding to the nested partition of size `k`.
    pub fn node_limit_for(k: usize) -> usize {
        2 * k - 1
    }

    /// Materialize the nested partition with `k` leaves (k <= self.k()).
    pub fn snapshot(&self, k: usize) -> Result<PartitionTree> {
        if k == 0 || k > self.k() {
            return Err(Error::InvalidParameter(format!(
                "snapshot size {k} out of range 1..={}",
                self.k()
            )));
        }
        let limit = Self::node_limit_for(k);
        let mut nodes = Vec::with_capacity(limit);
        for node in &self.nodes[..limit] {
            let kind = match node.kind {
                NodeKind::Split { right, .. } if right >= limit => NodeKind::Leaf,
                ref other => other.clone(),
            };
            nodes.push(Node {
                bin: node.bin,
                kind,
            });
        }
        let mut tree = PartitionTree {
            d: self.d,
            nodes,
            leaf_node: vec![0; k],
            extents: vec![Rect::unit(self.d); k],
        };
        tree.rebuild_leaf_info();
        Ok(tree)
    }

    fn rebuild_leaf_info(&mut self) {
        let mut leaf_node = vec![usize::MAX; self.nodes.len().div_ceil(2)];
        let mut extents = vec![Rect::unit(self.d); leaf_node.len()];
        let mut stack = vec![(0usize, Rect::unit(self.d))];
        while let Some((i, rect)) = stack.pop() {
            match self.nodes[i].kind {
                NodeKind::Leaf => {
                    let bin = self.nodes[i].bin;
                    leaf_node[bin] = i;
                    extents[bin] = rect;
                }
                NodeKind::Split {
                    dim,
                    value,
                    left,
                    right,
                } => {
                    let mut lrect = rect.clone();
                    lrect.hi[dim] = value;
                    let mut rrect = rect;
                    rrect.lo[dim] = value;
                    stack.push((left, lrect));
                    stack.push((right, rrect));
                }
            }
        }
        self.leaf_node = leaf_node;
        self.extents = extents;
    }

    /// Split a leaf at `value` along `dim`, returning the extended tree.
    ///
    /// The left child keeps the old bin id; the right child gets id `K`.
    pub fn split_leaf(&self, bin: usize, dim: usize, value: f64) -> Result<PartitionTree> {
        let node_idx = *self.leaf_node.get(bin).ok_or(Error::UnknownBin(bin))?;
        if dim >= self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: dim,
            });
        }
        let rect = &self.extents[bin];
        if !(value > rect.lo[dim] && value < rect.hi[dim]) {
            return Err(Error::SplitOutOfRange {
                bin,
                dim,
                value,
                lo: rect.lo[dim],
                hi: rect.hi[dim],
            });
        }
        let mut tree = self.clone();
        let new_bin = tree.k();
        let left = tree.nodes.len();
        let right = left + 1;
        tree.nodes.push(Node {
            bin,
            kind: NodeKind::Leaf,
        });
        tree.nodes.push(Node {
            bin: new_bin,
            kind: NodeKind::Leaf,
        });
        tree.nodes[node_idx].kind = NodeKind::Split {
            dim,
            value,
            left,
            right,
        };
        tree.leaf_node[bin] = left;
        tree.leaf_node.push(right);
        let mut lrect = tree.extents[bin].clone();
        let mut rrect = tree.extents[bin].clone();
        lrect.hi[dim] = value;
        rrect.lo[dim] = value;
        tree.extents[bin] = lrect;
        tree.extents.push(rrect);
        Ok(tree)
    }

    /// Count points per bin, optionally restricted to a subset of rows.
    pub fn count_points(&self, points: &PointMatrix, subset: Option<&[usize]>) -> Result<Vec<u64>> {
        self.count_points_at(points, subset, self.nodes.len())
    }

    /// Count points per snapshot bin.
    pub fn count_points_at(
        &self,
        points: &PointMatrix,
        subset: Option<&[usize]>,
        node_limit: usize,
    ) -> Result<Vec<u64>> {
        let k = node_limit.div_ceil(2);
        let mut counts = vec![0u64; k];
        match subset {
            Some(idx) => {
                for &i in idx {
                    counts[self.locate_at(points.row(i), node_limit)?] += 1;
                }
            }
            None => {
                for row in points.rows() {
                    counts[self.locate_at(row, node_limit)?] += 1;
                }
            }
        }
        Ok(counts)
    }

    /// Serialize as nested `{dim, value, left, right}` / `{bin}` objects.
    pub fn to_json(&self) -> Value {
        self.node_json(0)
    }

    fn node_json(&self, i: usize) -> Value {
        match self.nodes[i].kind {
            NodeKind::Leaf => json!({ "bin": self.nodes[i].bin }),
            NodeKind::Split {
                dim,
                value,
                left,
                right,
            } => json!({
                "dim": dim,
                "value": value,
                "left": self.node_json(left),
                "right": self.node_json(right),
            }),
        }
    }

    /// Rebuild a tree from its JSON form. Node order is normalized to
    /// preorder; bin ids are taken from the leaves.
    pub fn from_json(d: usize, v: &Value) -> Result<PartitionTree> {
        let mut nodes = Vec::new();
        let k = Self::parse_node(v, &mut nodes)?;
        let expected: Vec<usize> = (0..k).collect();
        let mut seen: Vec<usize> = nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::Leaf))
            .map(|n| n.bin)
            .collect();
        seen.sort_unstable();
        if seen != expected {
            return Err(Error::TreeJson(format!(
                "leaf bin ids must be 0..{k} with no gaps"
            )));
        }
        let mut tree = PartitionTree {
            d,
            nodes,
            leaf_node: vec![0; k],
            extents: vec![Rect::unit(d); k],
        };
        // internal nodes inherit the bin id of their leftmost descendant
        fn fill_bins(nodes: &mut Vec<Node>, i: usize) -> usize {
            match nodes[i].kind {
                NodeKind::Leaf => nodes[i].bin,
                NodeKind::Split { left, right, .. } => {
                    let b = fill_bins(nodes, left);
                    fill_bins(nodes, right);
                    nodes[i].bin = b;
                    b
                }
            }
        }
        fill_bins(&mut tree.nodes, 0);
        tree.rebuild_leaf_info();
        Ok(tree)
    }

    fn parse_node(v: &Value, nodes: &mut Vec<Node>) -> Result<usize> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::TreeJson("node must be an object".into()))?;
        let here = nodes.len();
        if let Some(bin) = obj.get("bin") {
            let bin = bin
                .as_u64()
                .ok_or_else(|| Error::TreeJson("bin must be an unsigned integer".into()))?
                as usize;
            nodes.push(Node {
                bin,
                kind: NodeKind::Leaf,
            });
            Ok(1)
        } else {
            let dim = obj
                .get("dim")
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::TreeJson("missing dim".into()))? as usize;
            let value = obj
                .get("value")
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::TreeJson("missing value".into()))?;
            nodes.push(Node {
                bin: 0,
                kind: NodeKind::Leaf,
            });
            let left = nodes.len();
            let kl = Self::parse_node(
                obj.get("left")
                    .ok_or_else(|| Error::TreeJson("missing left".into()))?,
                nodes,
            )?;
            let right = nodes.len();
            let kr = Self::parse_node(
                obj.get("right")
                    .ok_or_else(|| Error::TreeJson("missing right".into()))?,
                nodes,
            )?;
            nodes[here].kind = NodeKind::Split {
                dim,
                value,
                left,
                right,
            };
            Ok(kl + kr)
        }
    }
}

/// Per-bin counts of the three samples over a fixed partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinTable {
    pub n0: Vec<u64>,
    pub n1: Vec<u64>,
    pub n_test: Vec<u64>,
}

impl BinTable {
    pub fn new(n0: Vec<u64>, n1: Vec<u64>, n_test: Vec<u64>) -> Result<Self> {
        if n0.len() != n1.len() || n0.len() != n_test.len() {
            return Err(Error::BinCountMismatch {
                expected: n0.len(),
                got: n1.len().max(n_test.len()),
            });
        }
        Ok(BinTable { n0, n1, n_test })
    }

    pub fn k(&self) -> usize {
        self.n0.len()
    }

    pub fn total0(&self) -> u64 {
        self.n0.iter().sum()
    }

    pub fn total1(&self) -> u64 {
        self.n1.iter().sum()
    }

    pub fn total_test(&self) -> u64 {
        self.n_test.iter().sum()
    }
}

/// Counts for the rows in `subset`, which the caller typically takes from a
/// [`crate::data::SampleSplit`] index set.
pub fn count_bins(
    tree: &PartitionTree,
    ds: &LabeledDataset,
    subset: &[usize],
) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; tree.k()];
    for &i in subset {
        if i >= ds.n() {
            return Err(Error::InvalidParameter(format!(
                "row index {i} out of range for dataset of size {}",
                ds.n()
            )));
        }
        counts[tree.locate(ds.points().row(i))?] += 1;
    }
    Ok(counts)
}
