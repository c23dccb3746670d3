//! Rooted projective dendrograms: metric trees with labelled unbounded
//! edges, one of which points to infinity at the root. The combinatorics
//! live in a [`FlagGraph`]; this layer adds the root, the metric, the data
//! labels and the induced level and order structure.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{FlagGraph, GraphBuilder};

/// Child order at each vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Ordering {
    /// Children sorted ascending by the minimal data label in their subtree.
    #[default]
    Canonical,
    /// Children keep the order in which their edges were listed.
    AsListed,
}

/// An outgoing edge at a vertex, in child order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChildEdge {
    Internal { vertex: usize, len: u64 },
    Leaf { label: String },
}

#[derive(Clone, Debug)]
pub struct ProjectiveDendrogram {
    graph: FlagGraph,
    root: usize,
    infinity_flag: usize,
    num_vertices: usize,
    /// Oriented away from the root; one entry per vertex, in child order.
    children: Vec<Vec<ChildEdge>>,
    /// Parent vertex and incoming edge length; None at the root.
    parent: Vec<Option<(usize, u64)>>,
    ordering: Ordering,
    /// Serialization echoes (edges as given, leaves as given).
    internal_edges: Vec<(usize, usize, u64)>,
    leaves: Vec<(usize, String)>,
}

impl ProjectiveDendrogram {
    /// Builds and validates a dendrogram from undirected internal edges
    /// (orientation is recovered from the root), leaf labels and a root.
    pub fn new(
        num_vertices: usize,
        root: usize,
        internal_edges: Vec<(usize, usize, u64)>,
        leaves: Vec<(usize, String)>,
        ordering: Ordering,
    ) -> Result<Self> {
        Self::new_inner(num_vertices, root, internal_edges, leaves, ordering, false)
    }

    /// Like `new` but without the minimum-degree conditions; used for the
    /// degenerate single-datum output, which is flagged with a warning.
    pub(crate) fn new_relaxed(
        num_vertices: usize,
        root: usize,
        internal_edges: Vec<(usize, usize, u64)>,
        leaves: Vec<(usize, String)>,
        ordering: Ordering,
    ) -> Result<Self> {
        Self::new_inner(num_vertices, root, internal_edges, leaves, ordering, true)
    }

    fn new_inner(
        num_vertices: usize,
        root: usize,
        internal_edges: Vec<(usize, usize, u64)>,
        leaves: Vec<(usize, String)>,
        ordering: Ordering,
        relax_degrees: bool,
    ) -> Result<Self> {
        if root >= num_vertices {
            return Err(Error::InvalidInput("root is not a vertex".into()));
        }
        let mut gb = GraphBuilder::new();
        gb.add_vertices(num_vertices);
        for &(a, b, len) in &internal_edges {
            if a >= num_vertices || b >= num_vertices {
                return Err(Error::InvalidInput("edge endpoint is not a vertex".into()));
            }
            if len < 1 {
                return Err(Error::InvalidInput(format!(
                    "internal edge ({a},{b}) has non-positive length"
                )));
            }
            gb.add_internal_edge(a, b);
        }
        let infinity_flag = gb.add_unbounded_edge(root);
        for &(v, _) in &leaves {
            if v >= num_vertices {
                return Err(Error::InvalidInput("leaf vertex is not a vertex".into()));
            }
            gb.add_unbounded_edge(v);
        }
        let graph = gb.build()?;
        if !graph.is_tree() {
            return Err(Error::InvalidInput(
                "underlying graph is not a tree (need h0 = 1, h1 = 0)".into(),
            ));
        }
        {
            let mut labels: Vec<&String> = leaves.iter().map(|(_, l)| l).collect();
            labels.sort();
            if labels.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidInput("duplicate data labels".into()));
            }
        }

        // Orient the tree away from the root.
        let mut adj: Vec<Vec<(usize, u64, usize)>> = vec![Vec::new(); num_vertices];
        for (seq, &(a, b, len)) in internal_edges.iter().enumerate() {
            adj[a].push((b, len, seq));
            adj[b].push((a, len, seq));
        }
        let mut parent: Vec<Option<(usize, u64)>> = vec![None; num_vertices];
        let mut children: Vec<Vec<(usize, ChildEdge)>> = vec![Vec::new(); num_vertices];
        let mut stack = vec![root];
        let mut seen = vec![false; num_vertices];
        seen[root] = true;
        while let Some(v) = stack.pop() {
            for &(w, len, seq) in &adj[v] {
                if seen[w] {
                    continue;
                }
                seen[w] = true;
                parent[w] = Some((v, len));
                children[v].push((seq, ChildEdge::Internal { vertex: w, len }));
                stack.push(w);
            }
        }
        let leaf_base = internal_edges.len();
        for (i, (v, label)) in leaves.iter().enumerate() {
            children[*v].push((leaf_base + i, ChildEdge::Leaf { label: label.clone() }));
        }

        // Degree conditions: every vertex originates in >= 2 edges and the
        // root in the infinity edge plus >= 2 more. Every vertex has exactly
        // one edge towards the root (the infinity edge resp. the parent).
        for v in 0..num_vertices {
            let originating = children[v].len() + 1;
            let needed = if v == root { 3 } else { 2 };
            if !relax_degrees && originating < needed {
                return Err(Error::InvalidInput(format!(
                    "vertex {v} originates in {originating} edges, need {needed}"
                )));
            }
        }

        let mut dg = ProjectiveDendrogram {
            graph,
            root,
            infinity_flag,
            num_vertices,
            children: Vec::new(),
            parent,
            ordering,
            internal_edges,
            leaves,
        };
        dg.children = dg.sort_children(children);
        Ok(dg)
    }

    fn sort_children(&self, raw: Vec<Vec<(usize, ChildEdge)>>) -> Vec<Vec<ChildEdge>> {
        // Minimal data label in each subtree, computed leaves-up.
        let mut min_label: Vec<Option<String>> = vec![None; self.num_vertices];
        let order = self.post_order_from(raw.as_slice());
        for &v in &order {
            let mut best: Option<String> = None;
            for (_, c) in &raw[v] {
                let cand = match c {
                    ChildEdge::Leaf { label } => Some(label.clone()),
                    ChildEdge::Internal { vertex, .. } => min_label[*vertex].clone(),
                };
                if let Some(cand) = cand {
                    if best.as_ref().map_or(true, |b| cand < *b) {
                        best = Some(cand);
                    }
                }
            }
            min_label[v] = best;
        }
        raw.into_iter()
            .map(|mut list| {
                match self.ordering {
                    Ordering::AsListed => list.sort_by_key(|(seq, _)| *seq),
                    Ordering::Canonical => list.sort_by(|(_, a), (_, b)| {
                        let ka = match a {
                            ChildEdge::Leaf { label } => Some(label.clone()),
                            ChildEdge::Internal { vertex, .. } => min_label[*vertex].clone(),
                        };
                        let kb = match b {
                            ChildEdge::Leaf { label } => Some(label.clone()),
                            ChildEdge::Internal { vertex, .. } => min_label[*vertex].clone(),
                        };
                        ka.cmp(&kb)
                    }),
                }
                list.into_iter().map(|(_, c)| c).collect()
            })
            .collect()
    }

    fn post_order_from(&self, raw: &[Vec<(usize, ChildEdge)>]) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.num_vertices);
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            out.push(v);
            for (_, c) in &raw[v] {
                if let ChildEdge::Internal { vertex, .. } = c {
                    stack.push(*vertex);
                }
            }
        }
        out.reverse();
        out
    }

    pub fn graph(&self) -> &FlagGraph {
        &self.graph
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn infinity_flag(&self) -> usize {
        self.infinity_flag
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    /// Outgoing edges at `v` in child order.
    pub fn children(&self, v: usize) -> &[ChildEdge] {
        &self.children[v]
    }

    /// Parent vertex and the length of the incoming edge; None at the root.
    pub fn parent(&self, v: usize) -> Option<(usize, u64)> {
        self.parent[v]
    }

    pub fn internal_edges(&self) -> &[(usize, usize, u64)] {
        &self.internal_edges
    }

    pub fn leaves(&self) -> &[(usize, String)] {
        &self.leaves
    }

    pub fn data_labels(&self) -> Vec<String> {
        self.leaves.iter().map(|(_, l)| l.clone()).collect()
    }

    /// Level of each vertex: the metric distance from the root.
    pub fn level_map(&self) -> Vec<u64> {
        let mut level = vec![0u64; self.num_vertices];
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            for c in &self.children[v] {
                if let ChildEdge::Internal { vertex, len } = c {
                    level[*vertex] = level[v] + len;
                    stack.push(*vertex);
                }
            }
        }
        level
    }

    /// Data labels in the total order induced by the child orders
    /// (lexicographic order of root-to-leaf edge words).
    pub fn order_data(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_data(self.root, &mut out);
        out
    }

    fn collect_data(&self, v: usize, out: &mut Vec<String>) {
        for c in &self.children[v] {
            match c {
                ChildEdge::Leaf { label } => out.push(label.clone()),
                ChildEdge::Internal { vertex, .. } => self.collect_data(*vertex, out),
            }
        }
    }

    /// A string invariant under dendrogram isometry respecting labels:
    /// children are recursively canonicalized and sorted, so two dendrograms
    /// are isometric (as rooted, labelled metric trees) iff the forms match.
    pub fn canonical_form(&self) -> String {
        self.canon_at(self.root)
    }

    fn canon_at(&self, v: usize) -> String {
        let mut parts: Vec<String> = self.children[v]
            .iter()
            .map(|c| match c {
                ChildEdge::Leaf { label } => format!("L[{label}]"),
                ChildEdge::Internal { vertex, len } => {
                    format!("E{}{}", len, self.canon_at(*vertex))
                }
            })
            .collect();
        parts.sort();
        format!("({})", parts.join(","))
    }

    pub fn to_json(&self) -> DendrogramJson {
        DendrogramJson {
            vertices: (0..self.num_vertices).collect(),
            root: self.root,
            internal_edges: self
                .internal_edges
                .iter()
                .map(|&(a, b, len)| EdgeJson { a, b, len })
                .collect(),
            leaves: self
                .leaves
                .iter()
                .map(|(vertex, label)| LeafJson {
                    vertex: *vertex,
                    label: label.clone(),
                })
                .collect(),
            infinity_at: self.root,
            ordering: self.ordering,
        }
    }

    pub fn from_json(j: &DendrogramJson) -> Result<Self> {
        let n = j.vertices.len();
        let mut sorted = j.vertices.clone();
        sorted.sort_unstable();
        if sorted != (0..n).collect::<Vec<_>>() {
            return Err(Error::InvalidInput(
                "vertices must be exactly 0..n-1".into(),
            ));
        }
        if j.infinity_at != j.root {
            return Err(Error::InvalidInput(
                "the infinity edge must sit at the root".into(),
            ));
        }
        ProjectiveDendrogram::new(
            n,
            j.root,
            j.internal_edges.iter().map(|e| (e.a, e.b, e.len)).collect(),
            j.leaves.iter().map(|l| (l.vertex, l.label.clone())).collect(),
            j.ordering,
        )
    }

    /// DOT export; internal edges carry a `len` attribute.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph dendrogram {\n");
        s.push_str(&format!("  v{} [shape=point];\n", self.root));
        s.push_str("  inf [label=\"∞\", shape=none];\n");
        s.push_str(&format!("  v{} -- inf;\n", self.root));
        for v in 0..self.num_vertices {
            if v != self.root {
                s.push_str(&format!("  v{v} [shape=point];\n"));
            }
        }
        for &(a, b, len) in &self.internal_edges {
            s.push_str(&format!("  v{a} -- v{b} [label=\"{len}\", len={len}];\n"));
        }
        for (i, (v, label)) in self.leaves.iter().enumerate() {
            s.push_str(&format!("  d{i} [label=\"{label}\", shape=none];\n"));
            s.push_str(&format!("  v{v} -- d{i};\n"));
        }
        s.push_str("}\n");
        s
    }

    /// Newick export. Branch lengths are the edge metric; the infinity edge
    /// is dropped and the root kept as the outermost node.
    pub fn to_newick(&self) -> String {
        format!("{};", self.newick_at(self.root))
    }

    fn newick_at(&self, v: usize) -> String {
        let parts: Vec<String> = self.children[v]
            .iter()
            .map(|c| match c {
                ChildEdge::Leaf { label } => label.clone(),
                ChildEdge::Internal { vertex, len } => {
                    format!("{}:{}", self.newick_at(*vertex), len)
                }
            })
            .collect();
        format!("({})", parts.join(","))
    }

    /// The non-stable intermediate view: every internal edge of length L is
    /// split into L unit edges through degree-2 chain vertices, so a vertex
    /// sits at every integer level.
    pub fn subdivide(&self) -> Result<Self> {
        let mut next = self.num_vertices;
        let mut edges = Vec::new();
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            for c in &self.children[v] {
                if let ChildEdge::Internal { vertex, len } = c {
                    let mut prev = v;
                    for _ in 1..*len {
                        edges.push((prev, next, 1));
                        prev = next;
                        next += 1;
                    }
                    edges.push((prev, *vertex, 1));
                    stack.push(*vertex);
                }
            }
        }
        ProjectiveDendrogram::new(next, self.root, edges, self.leaves.clone(), self.ordering)
    }

    /// Suppresses chain vertices (exactly one outgoing edge, which is
    /// internal), summing edge lengths, so every vertex has >= 3 emanating
    /// edge-ends. Inverse of `subdivide`.
    pub fn stabilize(&self) -> Result<Self> {
        // the root itself may sit on a chain: walk it down first
        let mut root = self.root;
        loop {
            match self.children(root) {
                [ChildEdge::Internal { vertex, .. }] => root = *vertex,
                _ => break,
            }
        }
        let mut keep = vec![root];
        let mut edges = Vec::new();
        let mut leaves = Vec::new();
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for c in &self.children[v] {
                match c {
                    ChildEdge::Leaf { label } => {
                        let vi = keep.iter().position(|&k| k == v).unwrap();
                        leaves.push((vi, label.clone()));
                    }
                    ChildEdge::Internal { vertex, len } => {
                        let (mut w, mut total) = (*vertex, *len);
                        loop {
                            match self.children(w) {
                                [ChildEdge::Internal { vertex, len }] => {
                                    total += len;
                                    w = *vertex;
                                }
                                _ => break,
                            }
                        }
                        let vi = keep.iter().position(|&k| k == v).unwrap();
                        keep.push(w);
                        edges.push((vi, keep.len() - 1, total));
                        stack.push(w);
                    }
                }
            }
        }
        ProjectiveDendrogram::new(keep.len(), 0, edges, leaves, self.ordering)
    }

    /// Whether every internal vertex has exactly two outgoing edges.
    pub fn is_binary(&self) -> bool {
        (0..self.num_vertices).all(|v| self.children[v].len() == 2)
    }

    /// Sum of the internal edge lengths (the volume of the tree).
    pub fn volume(&self) -> u64 {
        self.internal_edges.iter().map(|&(_, _, len)| len).sum()
    }

    /// Vertices of the subtree hanging off `v` (including `v`).
    pub fn subtree_vertices(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(w) = stack.pop() {
            out.push(w);
            for c in &self.children[w] {
                if let ChildEdge::Internal { vertex, .. } = c {
                    stack.push(*vertex);
                }
            }
        }
        out
    }

    /// Data labels below `v`, grouped by nothing — just the set.
    pub fn subtree_labels(&self, v: usize) -> Vec<String> {
        let mut out = Vec::new();
        for w in self.subtree_vertices(v) {
            for c in &self.children[w] {
                if let ChildEdge::Leaf { label } = c {
                    out.push(label.clone());
                }
            }
        }
        out.sort();
        out
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeJson {
    pub a: usize,
    pub b: usize,
    pub len: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LeafJson {
    pub vertex: usize,
    pub label: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DendrogramJson {
    pub vertices: Vec<usize>,
    pub root: usize,
    pub internal_edges: Vec<EdgeJson>,
    pub leaves: Vec<LeafJson>,
    pub infinity_at: usize,
    #[serde(default)]
    pub ordering: Ordering,
}

/// Multiset of internal edge lengths, ascending.
pub fn edge_length_multiset(d: &ProjectiveDendrogram) -> Vec<u64> {
    let mut lens: Vec<u64> = d.internal_edges().iter().map(|&(_, _, l)| l).collect();
    lens.sort_unstable();
    lens
}

/// Grouping of data labels by merge level, for comparing hierarchies that
/// were built by different algorithms: level -> sorted list of clusters.
pub fn cluster_signature(d: &ProjectiveDendrogram) -> BTreeMap<u64, Vec<Vec<String>>> {
    let levels = d.level_map();
    let mut out: BTreeMap<u64, Vec<Vec<String>>> = BTreeMap::new();
    for v in 0..d.num_vertices() {
        let labels = d.subtree_labels(v);
        if labels.len() > 1 {
            out.entry(levels[v]).or_default().push(labels);
        }
    }
    for clusters in out.values_mut() {
        clusters.sort();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The three-datapoint dendrogram: root with leaf x3, inner vertex at
    /// distance 1 with leaves x1, x2.
    fn segment() -> ProjectiveDendrogram {
        ProjectiveDendrogram::new(
            2,
            0,
            vec![(0, 1, 1)],
            vec![(1, "x1".into()), (1, "x2".into()), (0, "x3".into())],
            Ordering::Canonical,
        )
        .unwrap()
    }

    #[test]
    fn segment_structure() {
        let d = segment();
        let (internal, unbounded) = d.graph().edges();
        assert_eq!((internal.len(), unbounded.len()), (1, 4));
        assert_eq!(d.order_data(), vec!["x1", "x2", "x3"]);
        assert_eq!(d.level_map(), vec![0, 1]);
        assert_eq!(d.to_newick(), "((x1,x2):1,x3);");
    }

    #[test]
    fn levels_follow_partial_sums() {
        // chain of internal edges with lengths (1, 3): levels 0, 1, 4
        let d = ProjectiveDendrogram::new(
            3,
            0,
            vec![(0, 1, 1), (1, 2, 3)],
            vec![
                (0, "a".into()),
                (1, "b".into()),
                (2, "c".into()),
                (2, "d".into()),
            ],
            Ordering::Canonical,
        )
        .unwrap();
        assert_eq!(d.level_map(), vec![0, 1, 4]);
    }

    #[test]
    fn example_levels() {
        // root --2--> w1 (leaves), w1 --4--> w2 (leaves): deepest level 6
        let d = ProjectiveDendrogram::new(
            3,
            0,
            vec![(0, 1, 2), (1, 2, 4)],
            vec![
                (0, "a".into()),
                (1, "b".into()),
                (2, "c".into()),
                (2, "d".into()),
            ],
            Ordering::Canonical,
        )
        .unwrap();
        let levels = d.level_map();
        assert_eq!(levels[1], 2);
        assert_eq!(levels[2], 6);
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        // non-tree: cycle
        assert!(ProjectiveDendrogram::new(
            3,
            0,
            vec![(0, 1, 1), (1, 2, 1), (2, 0, 1)],
            vec![(0, "a".into()), (1, "b".into()), (2, "c".into())],
            Ordering::Canonical,
        )
        .is_err());
        // zero-length edge
        assert!(ProjectiveDendrogram::new(
            2,
            0,
            vec![(0, 1, 0)],
            vec![(0, "a".into()), (1, "b".into()), (1, "c".into())],
            Ordering::Canonical,
        )
        .is_err());
        // root originates in too few edges (infinity + 1)
        assert!(ProjectiveDendrogram::new(
            1,
            0,
            vec![],
            vec![(0, "a".into())],
            Ordering::Canonical,
        )
        .is_err());
        // duplicate labels
        assert!(ProjectiveDendrogram::new(
            1,
            0,
            vec![],
            vec![(0, "a".into()), (0, "a".into())],
            Ordering::Canonical,
        )
        .is_err());
    }

    #[test]
    fn json_roundtrip_preserves_order() {
        let d = segment();
        let j = d.to_json();
        let text = serde_json::to_string(&j).unwrap();
        let back: DendrogramJson = serde_json::from_str(&text).unwrap();
        let d2 = ProjectiveDendrogram::from_json(&back).unwrap();
        assert_eq!(d.order_data(), d2.order_data());
        assert_eq!(d.canonical_form(), d2.canonical_form());
        assert_eq!(d.level_map(), d2.level_map());
    }

    #[test]
    fn canonical_form_ignores_listing_order() {
        let a = ProjectiveDendrogram::new(
            2,
            0,
            vec![(0, 1, 1)],
            vec![(1, "x1".into()), (1, "x2".into()), (0, "x3".into())],
            Ordering::Canonical,
        )
        .unwrap();
        let b = ProjectiveDendrogram::new(
            2,
            1,
            vec![(1, 0, 1)],
            vec![(0, "x2".into()), (1, "x3".into()), (0, "x1".into())],
            Ordering::Canonical,
        )
        .unwrap();
        assert_eq!(a.canonical_form(), b.canonical_form());
    }

    #[test]
    fn dot_export_mentions_lengths() {
        let d = segment();
        let dot = d.to_dot();
        assert!(dot.contains("len=1"));
        assert!(dot.contains("x3"));
    }

    #[test]
    fn volume_is_edge_sum() {
        let d = segment();
        assert_eq!(d.volume(), 1);
    }
}
