//! Shared test helpers: an independent threshold-merging clustering
//! oracle and seeded random generators for numbers, trees, strings and
//! graphs. Not every test target uses every helper.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;

use padic_dendro::classify::ClusterHierarchy;
use padic_dendro::dendrogram::{Ordering, ProjectiveDendrogram};
use padic_dendro::graph::{FlagGraph, GraphBuilder};
use padic_dendro::padic::{format_padic, Field, PAdicNumber, DEFAULT_PRECISION};

pub type ClusterSet = BTreeSet<(i64, Vec<String>)>;

/// Independent oracle: sweep merge thresholds from the largest pairwise
/// difference valuation down, merging everything at distance >= m; each
/// multi-element class is recorded at the largest threshold where it
/// appears, which is exactly the radius exponent of the corresponding
/// tree vertex.
pub fn oracle_clusters(data: &[(String, PAdicNumber)]) -> ClusterSet {
    let n = data.len();
    let mut dv = vec![vec![0i64; n]; n];
    let mut thresholds = BTreeSet::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = data[i]
                .1
                .difference_valuation(&data[j].1)
                .expect("oracle inputs must be pairwise distinguishable");
            dv[i][j] = v;
            dv[j][i] = v;
            thresholds.insert(v);
        }
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    let mut out = ClusterSet::new();
    for &m in thresholds.iter().rev() {
        for i in 0..n {
            for j in (i + 1)..n {
                if dv[i][j] >= m {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri] = rj;
                    }
                }
            }
        }
        let mut classes: Vec<Vec<String>> = vec![Vec::new(); n];
        for i in 0..n {
            let r = find(&mut parent, i);
            classes[r].push(data[i].0.clone());
        }
        for mut labels in classes {
            if labels.len() >= 2 {
                labels.sort();
                if !out.iter().any(|(_, l)| *l == labels) {
                    out.insert((m, labels));
                }
            }
        }
    }
    out
}

/// The hierarchy's internal vertices as (radius exponent, sorted labels).
pub fn hierarchy_clusters(h: &ClusterHierarchy) -> ClusterSet {
    (0..h.dendrogram.num_vertices())
        .map(|v| {
            (
                h.vertex_disc[v].radius_exp,
                h.dendrogram.subtree_labels(v),
            )
        })
        .collect()
}

/// Random pairwise-distinct elements of the unit disc, with coefficients
/// over the full representative system.
pub fn random_padic_set<R: Rng>(rng: &mut R, field: &Field, n: usize) -> Vec<(String, PAdicNumber)> {
    let size = field.residue_size();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < n {
        let mut terms = Vec::new();
        for exp in 0..16i64 {
            let idx = rng.gen_range(0..size);
            if idx != 0 {
                terms.push((exp, field.canonical_label(idx).unwrap()));
            }
        }
        let x = PAdicNumber::from_terms(field.clone(), &terms, DEFAULT_PRECISION).unwrap();
        if seen.insert(format_padic(&x)) {
            out.push((format!("x{}", out.len() + 1), x));
        }
    }
    out
}

struct TreeGen<'a, R: Rng> {
    rng: &'a mut R,
    edges: Vec<(usize, usize, u64)>,
    leaves: Vec<(usize, String)>,
    next_vertex: usize,
    next_label: usize,
    max_arity: usize,
}

impl<'a, R: Rng> TreeGen<'a, R> {
    fn leaf(&mut self, at: usize) {
        self.next_label += 1;
        self.leaves.push((at, format!("x{}", self.next_label)));
    }

    /// Grows a stable subtree rooted at `v` with exactly `budget` leaves.
    fn grow(&mut self, v: usize, budget: usize) {
        if budget < 2 {
            self.leaf(v);
            return;
        }
        let arity = self.rng.gen_range(2..=self.max_arity.min(budget));
        // split the leaf budget into `arity` positive parts
        let mut parts = vec![1usize; arity];
        for _ in 0..(budget - arity) {
            let i = self.rng.gen_range(0..arity);
            parts[i] += 1;
        }
        for part in parts {
            if part == 1 {
                self.leaf(v);
            } else {
                let w = self.next_vertex;
                self.next_vertex += 1;
                let len = self.rng.gen_range(1..=8);
                self.edges.push((v, w, len));
                self.grow(w, part);
            }
        }
    }
}

/// A random stable dendrogram with `leaves` data labels and vertex arity
/// between 2 and `max_arity`.
pub fn random_dendrogram<R: Rng>(
    rng: &mut R,
    leaves: usize,
    max_arity: usize,
) -> ProjectiveDendrogram {
    assert!(leaves >= 2 && max_arity >= 2);
    let mut gen = TreeGen {
        rng,
        edges: Vec::new(),
        leaves: Vec::new(),
        next_vertex: 1,
        next_label: 0,
        max_arity,
    };
    gen.grow(0, leaves);
    ProjectiveDendrogram::new(gen.next_vertex, 0, gen.edges, gen.leaves, Ordering::Canonical)
        .unwrap()
}

pub fn random_string<R: Rng>(rng: &mut R, alphabet: &[char], max_len: usize) -> String {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
        .collect()
}

/// A random finite graph: flags with a random involution, so loops,
/// multi-edges and unbounded edges all occur.
pub fn random_graph<R: Rng>(rng: &mut R) -> FlagGraph {
    let n = rng.gen_range(1..=50);
    let mut gb = GraphBuilder::new();
    gb.add_vertices(n);
    let internal = rng.gen_range(0..=2 * n);
    for _ in 0..internal {
        gb.add_internal_edge(rng.gen_range(0..n), rng.gen_range(0..n));
    }
    let unbounded = rng.gen_range(0..=3);
    for _ in 0..unbounded {
        gb.add_unbounded_edge(rng.gen_range(0..n));
    }
    gb.build().unwrap()
}
