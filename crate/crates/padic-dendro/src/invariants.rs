//! Volume, branch weights and the complex balance of a dendrogram, all
//! computed on the dagger-tree (the span of the internal vertices).

use serde::{Deserialize, Serialize};

use crate::dendrogram::{ChildEdge, ProjectiveDendrogram};
use crate::graph::{FlagGraph, GraphBuilder};
use crate::padic::is_prime;

/// The dagger-tree: internal vertices and edges only, unbounded edges
/// dropped, lengths inherited.
#[derive(Clone, Debug)]
pub struct DaggerTree {
    pub graph: FlagGraph,
    /// Parallel to the graph's internal edges.
    pub lengths: Vec<u64>,
}

pub fn dagger_tree(x: &ProjectiveDendrogram) -> DaggerTree {
    let mut gb = GraphBuilder::new();
    gb.add_vertices(x.num_vertices());
    let mut lengths = Vec::new();
    for &(a, b, len) in x.internal_edges() {
        gb.add_internal_edge(a, b);
        lengths.push(len);
    }
    DaggerTree {
        graph: gb.build().expect("dendrogram edges form a valid graph"),
        lengths,
    }
}

impl DaggerTree {
    pub fn volume(&self) -> u64 {
        self.lengths.iter().sum()
    }
}

/// A branch of the root: its data labels and weight (dagger volume of the
/// branch plus the length of its root edge; a bare leaf weighs 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub labels: Vec<String>,
    pub weight: u64,
}

/// Branches in the root's child order.
pub fn branches(x: &ProjectiveDendrogram) -> Vec<Branch> {
    x.children(x.root())
        .iter()
        .map(|c| match c {
            ChildEdge::Leaf { label } => Branch {
                labels: vec![label.clone()],
                weight: 0,
            },
            ChildEdge::Internal { vertex, len } => Branch {
                labels: x.subtree_labels(*vertex),
                weight: subtree_volume(x, *vertex) + len,
            },
        })
        .collect()
}

fn subtree_volume(x: &ProjectiveDendrogram, v: usize) -> u64 {
    x.subtree_vertices(v)
        .into_iter()
        .flat_map(|w| x.children(w))
        .map(|c| match c {
            ChildEdge::Internal { len, .. } => *len,
            ChildEdge::Leaf { .. } => 0,
        })
        .sum()
}

/// Balance data. The exact value is the pair (weights, m): the complex
/// number sum of w_v * e^{2 pi i v / m}; the floating evaluation is
/// advisory. For m = 2 the balance is the exact integer w_0 - w_1.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BalanceReport {
    pub volume: u64,
    pub weights: Vec<u64>,
    pub balance: ComplexJson,
    pub balanced: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub binary_balance: Option<i64>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

pub fn balance_float(weights: &[u64]) -> (f64, f64) {
    let m = weights.len() as f64;
    let mut re = 0.0;
    let mut im = 0.0;
    for (v, &w) in weights.iter().enumerate() {
        let arg = 2.0 * std::f64::consts::PI * v as f64 / m;
        re += w as f64 * arg.cos();
        im += w as f64 * arg.sin();
    }
    (re, im)
}

/// Exact zero test for the symbolic balance when m is prime: the m-th
/// cyclotomic polynomial is 1 + x + ... + x^{m-1}, so the weighted
/// root-of-unity sum vanishes iff all weights are equal. None for
/// composite m (where b = 0 does not imply equal weights).
pub fn balance_exact_zero(weights: &[u64]) -> Option<bool> {
    let m = weights.len() as u64;
    if is_prime(m) {
        Some(weights.windows(2).all(|w| w[0] == w[1]))
    } else {
        None
    }
}

pub fn balance_report(x: &ProjectiveDendrogram) -> BalanceReport {
    let weights: Vec<u64> = branches(x).into_iter().map(|b| b.weight).collect();
    let (re, im) = balance_float(&weights);
    let binary_balance = if weights.len() == 2 {
        Some(weights[0] as i64 - weights[1] as i64)
    } else {
        None
    };
    BalanceReport {
        volume: x.volume(),
        balanced: weights.windows(2).all(|w| w[0] == w[1]),
        weights,
        balance: ComplexJson { re, im },
        binary_balance,
    }
}
