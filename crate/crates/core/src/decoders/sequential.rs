use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::{DMatrix, DVector};

use super::{DecodeOutcome, DecodeStatus};
use crate::error::{check_dim, invalid, Result};
use crate::linalg::{check_upper_positive, round_int, row_major};

/// Stack (best-first) lattice sequential decoder.
///
/// Nodes are partial vectors ordered by the biased metric
/// `bias * k - ‖y'_{last k} − R_kk z_{last k}‖²`. The best node is popped and
/// extended: its closest child is pushed, together with its next sibling in
/// zig-zag order, so every node of the infinite tree is eventually reachable
/// in metric order without being materialized. The first full-length vector
/// popped is returned.
///
/// `total_count` counts popped nodes (layers 1 through `m`), which equals the
/// number of extensions including the root. The budget check happens before
/// each pop.
pub fn stack_sequential_decode(
    r_upper: &DMatrix<f64>,
    y_prime: &DVector<f64>,
    bias: f64,
    timeout: Option<u64>,
) -> Result<DecodeOutcome> {
    let m = check_upper_positive(r_upper)?;
    check_dim(m, y_prime.len())?;
    if !(bias > 0.0) {
        return Err(invalid(format!("sequential bias must be positive, got {bias}")));
    }
    let mut out = DecodeOutcome::new(m);
    if m == 0 {
        out.z_hat = Some(Vec::new());
        out.status = DecodeStatus::Found;
        return Ok(out);
    }
    let r = row_major(r_upper);
    let y = y_prime.as_slice();
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;

    let child = |z: &[i64], depth: usize, parent_dist: f64, seq: &mut u64| -> Node {
        // The child fixes coordinate l = m - 1 - depth.
        let l = m - 1 - depth;
        let mut s = y[l];
        for j in (l + 1)..m {
            s -= r[l * m + j] * z[j] as f64;
        }
        let d = r[l * m + l];
        let c = s / d;
        let z0 = round_int(c);
        let mut node = Node {
            metric: 0.0,
            seq: 0,
            depth: depth + 1,
            z: z.to_vec(),
            dist: 0.0,
            parent_dist,
            resid: s,
            z0,
            dir: if c >= z0 as f64 { 1 } else { -1 },
            step: 0,
        };
        node.settle(&r, m, bias, seq);
        node
    };

    let root = vec![0i64; m];
    heap.push(child(&root, 0, 0.0, &mut seq));
    while let Some(node) = heap.pop() {
        if let Some(limit) = timeout {
            if out.total_count >= limit {
                out.status = DecodeStatus::TimedOut;
                return Ok(out);
            }
        }
        out.total_count += 1;
        out.layer_counts[node.depth - 1] += 1;
        if node.depth == m {
            out.z_hat = Some(node.z);
            out.status = DecodeStatus::Found;
            return Ok(out);
        }
        heap.push(child(&node.z, node.depth, node.dist, &mut seq));
        let mut sibling = node;
        sibling.step += 1;
        sibling.settle(&r, m, bias, &mut seq);
        heap.push(sibling);
    }
    Err(crate::Error::Internal("sequential decoder exhausted an infinite tree".into()))
}

#[derive(Debug)]
struct Node {
    metric: f64,
    seq: u64,
    depth: usize,
    z: Vec<i64>,
    dist: f64,
    parent_dist: f64,
    resid: f64,
    z0: i64,
    dir: i64,
    step: i64,
}

impl Node {
    /// Places the node's coordinate at its current zig-zag position and
    /// refreshes the metric.
    fn settle(&mut self, r: &[f64], m: usize, bias: f64, seq: &mut u64) {
        let l = m - self.depth;
        let v = match self.step {
            0 => self.z0,
            s if s % 2 == 1 => self.z0 + self.dir * (s + 1) / 2,
            s => self.z0 - self.dir * s / 2,
        };
        self.z[l] = v;
        let e = self.resid - r[l * m + l] * v as f64;
        self.dist = self.parent_dist + e * e;
        self.metric = bias * self.depth as f64 - self.dist;
        self.seq = *seq;
        *seq += 1;
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // Max-heap on metric; earlier insertion wins ties.
    fn cmp(&self, other: &Self) -> Ordering {
        self.metric
            .total_cmp(&other.metric)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}
