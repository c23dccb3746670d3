//! Both directions of the dendrogram / p-adic correspondence: the
//! agglomerative ultrametric classification of a finite p-adic set into its
//! star-tree, and the encoding map assigning p-adic numbers to the data of
//! a dendrogram.

use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::dendrogram::{DendrogramJson, Ordering, ProjectiveDendrogram};
use crate::error::{Error, Result};
use crate::padic::{
    format_padic, parse_padic, Field, FieldDescriptor, PAdicNumber, RepSystem, DEFAULT_PRECISION,
};

/// A disc B(center, p^{-m}) = center + p^m O_K, a vertex of the
/// Bruhat-Tits tree. Equality is disc equality: equal radius and centers
/// congruent modulo p^m — never field comparison of the centers.
#[derive(Clone, Debug)]
pub struct Disc {
    pub center: PAdicNumber,
    pub radius_exp: i64,
}

impl Disc {
    pub fn contains(&self, x: &PAdicNumber) -> bool {
        match self.center.difference_valuation(x) {
            Ok(v) => v >= self.radius_exp,
            // indistinguishable from the center at the working precision
            Err(_) => true,
        }
    }
}

impl PartialEq for Disc {
    fn eq(&self, other: &Self) -> bool {
        self.radius_exp == other.radius_exp && self.contains(&other.center)
    }
}
impl Eq for Disc {}

/// The smallest disc containing three pairwise distinct points: center x,
/// radius exponent = min of the three pairwise difference valuations.
pub fn median_vertex(x: &PAdicNumber, y: &PAdicNumber, z: &PAdicNumber) -> Result<Disc> {
    let coincident =
        |_| Error::InvalidInput("median vertex of coincident points".into());
    let vxy = x.difference_valuation(y).map_err(coincident)?;
    let vxz = x.difference_valuation(z).map_err(coincident)?;
    let vyz = y.difference_valuation(z).map_err(coincident)?;
    Ok(Disc {
        center: x.clone(),
        radius_exp: vxy.min(vxz).min(vyz),
    })
}

/// Median vertex with one point at infinity: the smallest disc containing
/// x and y.
pub fn median_vertex_inf(x: &PAdicNumber, y: &PAdicNumber) -> Result<Disc> {
    let v = x
        .difference_valuation(y)
        .map_err(|_| Error::InvalidInput("median vertex of coincident points".into()))?;
    Ok(Disc {
        center: x.clone(),
        radius_exp: v,
    })
}

#[derive(Clone, Debug)]
pub struct ClusterHierarchy {
    pub dendrogram: ProjectiveDendrogram,
    /// One disc per dendrogram vertex.
    pub vertex_disc: Vec<Disc>,
    pub coding: Vec<(String, PAdicNumber)>,
    pub warnings: Vec<String>,
}

impl ClusterHierarchy {
    pub fn coding_of(&self, label: &str) -> Option<&PAdicNumber> {
        self.coding
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, x)| x)
    }

    /// Normality: 0 and 1 occur among the coded values and all values lie
    /// in the unit disc.
    pub fn is_normal(&self) -> bool {
        let field = match self.coding.first() {
            Some((_, x)) => x.field().clone(),
            None => return false,
        };
        let zero = PAdicNumber::zero(field.clone());
        let one = PAdicNumber::one(field);
        let has = |t: &PAdicNumber| {
            self.coding
                .iter()
                .any(|(_, x)| x.difference_valuation(t).is_err())
        };
        let in_unit_disc = self
            .coding
            .iter()
            .all(|(_, x)| x.valuation().finite().map_or(true, |v| v >= 0));
        has(&zero) && has(&one) && in_unit_disc
    }
}

/// The pairwise difference-valuation matrix (diagonal entries unused).
/// Fails with a precision error naming both labels if any pair is
/// indistinguishable.
pub fn valuation_matrix(data: &[(String, PAdicNumber)]) -> Result<Vec<Vec<i64>>> {
    #[cfg(feature = "parallel")]
    {
        valuation_matrix_par(data)
    }
    #[cfg(not(feature = "parallel"))]
    {
        valuation_matrix_seq(data)
    }
}

fn pair_valuation(data: &[(String, PAdicNumber)], i: usize, j: usize) -> Result<i64> {
    data[i].1.difference_valuation(&data[j].1).map_err(|e| match e {
        Error::Indistinguishable { precision, .. } => Error::Indistinguishable {
            precision,
            labels: Some((data[i].0.clone(), data[j].0.clone())),
        },
        other => other,
    })
}

pub fn valuation_matrix_seq(data: &[(String, PAdicNumber)]) -> Result<Vec<Vec<i64>>> {
    let n = data.len();
    let mut m = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = pair_valuation(data, i, j)?;
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    Ok(m)
}

#[cfg(feature = "parallel")]
pub fn valuation_matrix_par(data: &[(String, PAdicNumber)]) -> Result<Vec<Vec<i64>>> {
    let n = data.len();
    let rows: Vec<Vec<i64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Ok(0)
                    } else {
                        pair_valuation(data, i.min(j), i.max(j))
                    }
                })
                .collect::<Result<Vec<i64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows)
}

enum NodeRef {
    Leaf(usize),
    Node(usize),
}

struct Node {
    radius_exp: i64,
    center: usize,
    children: Vec<NodeRef>,
}

/// The agglomerative loop: per pass, each cluster gathers the clusters at
/// minimal representative distance; the resulting (nested-or-disjoint)
/// candidate sets are merged smallest-disc-first; passes repeat on the
/// maximal clusters until one remains. A merge at difference valuation m
/// becomes a vertex with disc radius exponent m.
pub fn classify(data: &[(String, PAdicNumber)]) -> Result<ClusterHierarchy> {
    {
        let mut labels: Vec<&String> = data.iter().map(|(l, _)| l).collect();
        labels.sort();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("duplicate data labels".into()));
        }
    }
    if data.is_empty() {
        return Err(Error::InvalidInput("no data points".into()));
    }
    if data.len() == 1 {
        let dendrogram = ProjectiveDendrogram::new_relaxed(
            1,
            0,
            vec![],
            vec![(0, data[0].0.clone())],
            Ordering::Canonical,
        )?;
        return Ok(ClusterHierarchy {
            dendrogram,
            vertex_disc: vec![Disc {
                center: data[0].1.clone(),
                radius_exp: 0,
            }],
            coding: data.to_vec(),
            warnings: vec!["single datum: degenerate one-leaf dendrogram".to_string()],
        });
    }
    let matrix = valuation_matrix(data)?;
    let n = data.len();

    let mut nodes: Vec<Node> = Vec::new();
    // cluster state: representative datum (minimal label) and tree handle
    let mut reps: Vec<usize> = (0..n).collect();
    let mut handles: Vec<NodeRef> = (0..n).map(NodeRef::Leaf).collect();

    while reps.len() > 1 {
        let k = reps.len();
        // candidate sets: for each cluster, all clusters at minimal distance
        let mut csets: Vec<(i64, Vec<usize>)> = Vec::new();
        for i in 0..k {
            let m = (0..k)
                .filter(|&j| j != i)
                .map(|j| matrix[reps[i]][reps[j]])
                .max()
                .unwrap();
            let mut set: Vec<usize> = (0..k)
                .filter(|&j| j == i || matrix[reps[i]][reps[j]] == m)
                .collect();
            set.sort_unstable();
            if !csets.iter().any(|(m2, s2)| *m2 == m && *s2 == set) {
                csets.push((m, set));
            }
        }
        // Only the smallest pending discs (largest radius exponent) merge in
        // this pass: at the maximal level the relation dv >= m is an
        // equivalence on the current clusters, so the candidate sets are
        // exactly the merge classes. Lower-level sets may straddle closer
        // pairs and are recomputed next pass.
        let m_star = csets.iter().map(|(m, _)| *m).max().unwrap();
        csets.retain(|(m, _)| *m == m_star);

        let mut uf: Vec<usize> = (0..k).collect();
        fn find(uf: &mut Vec<usize>, mut x: usize) -> usize {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        for (m, set) in csets {
            let mut groups: Vec<usize> = set.iter().map(|&i| find(&mut uf, i)).collect();
            groups.sort_unstable();
            groups.dedup();
            if groups.len() < 2 {
                continue;
            }
            let children: Vec<NodeRef> = groups
                .iter()
                .map(|&g| match handles[g] {
                    NodeRef::Leaf(d) => NodeRef::Leaf(d),
                    NodeRef::Node(id) => NodeRef::Node(id),
                })
                .collect();
            // representative of the merge: the member with the minimal label
            let center = groups
                .iter()
                .map(|&g| reps[g])
                .min_by(|&a, &b| data[a].0.cmp(&data[b].0))
                .unwrap();
            nodes.push(Node {
                radius_exp: m,
                center,
                children,
            });
            let id = nodes.len() - 1;
            let target = groups[0];
            for &g in &groups[1..] {
                uf[g] = target;
            }
            handles[target] = NodeRef::Node(id);
            reps[target] = center;
        }
        // the surviving groups are the maximal clusters of this pass
        let mut new_reps = Vec::new();
        let mut new_handles = Vec::new();
        let mut seen_roots = Vec::new();
        for i in 0..k {
            let r = find(&mut uf, i);
            if !seen_roots.contains(&r) {
                seen_roots.push(r);
                new_reps.push(reps[r]);
                new_handles.push(std::mem::replace(&mut handles[r], NodeRef::Leaf(0)));
            }
        }
        reps = new_reps;
        handles = new_handles;
    }

    // translate the node arena into a dendrogram
    let root = match handles.pop().unwrap() {
        NodeRef::Node(id) => id,
        NodeRef::Leaf(_) => unreachable!("n >= 2 always merges"),
    };
    let mut edges = Vec::new();
    let mut leaves = Vec::new();
    for (id, node) in nodes.iter().enumerate() {
        for c in &node.children {
            match c {
                NodeRef::Leaf(d) => leaves.push((id, data[*d].0.clone())),
                NodeRef::Node(cid) => {
                    let len = (nodes[*cid].radius_exp - node.radius_exp) as u64;
                    edges.push((id, *cid, len));
                }
            }
        }
    }
    let dendrogram =
        ProjectiveDendrogram::new(nodes.len(), root, edges, leaves, Ordering::Canonical)?;
    let vertex_disc = nodes
        .iter()
        .map(|node| Disc {
            center: data[node.center].1.clone(),
            radius_exp: node.radius_exp,
        })
        .collect();
    Ok(ClusterHierarchy {
        dendrogram,
        vertex_disc,
        coding: data.to_vec(),
        warnings: Vec::new(),
    })
}

/// The star-tree of a finite point set together with infinity. The finite
/// part is auto-normalized into the unit disc when necessary (subtract the
/// first datum, then shift by a power of p), which is an isometry.
pub fn star_tree(data: &[(String, PAdicNumber)]) -> Result<ClusterHierarchy> {
    let out_of_disc = data
        .iter()
        .any(|(_, x)| x.valuation().finite().is_some_and(|v| v < 0));
    if !out_of_disc {
        return classify(data);
    }
    let base = &data[0].1;
    let mut shifted: Vec<(String, PAdicNumber)> = Vec::with_capacity(data.len());
    for (l, x) in data {
        shifted.push((l.clone(), x.sub(base)?));
    }
    let min_val = shifted
        .iter()
        .filter_map(|(_, x)| x.valuation().finite())
        .min()
        .unwrap_or(0);
    if min_val < 0 {
        for (_, x) in &mut shifted {
            *x = x.shift(-min_val);
        }
    }
    let mut h = classify(&shifted)?;
    h.warnings
        .push("input auto-normalized into the unit disc".to_string());
    Ok(h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    Canonical,
    PaperBinary,
}

/// The encoding map: per-vertex injections chi_w from children into the
/// representative system, datum value = sum over its root path of
/// chi(e) * p^{level(origin(e))}.
///
/// `canonical` assigns, at the root, 0 to the first child and 1 to the
/// last (middles get the remaining labels in order); inside the last
/// branch the last child gets 0 and the others 1, 2, ... ; everywhere else
/// children get 0, 1, 2, ... in child order. This guarantees that the
/// first datum encodes to 0 and the last to 1, and specializes on binary
/// trees to `paper-binary` (chi_0 / chi_1 with opposite bit sense in the
/// two root branches).
pub fn encode_dendrogram(
    x: &ProjectiveDendrogram,
    convention: Convention,
    p: u64,
    rep_system: RepSystem,
) -> Result<Vec<(String, PAdicNumber)>> {
    let max_arity = (0..x.num_vertices())
        .map(|v| x.children(v).len())
        .max()
        .unwrap_or(0);
    if convention == Convention::PaperBinary && !x.is_binary() {
        return Err(Error::InvalidInput(
            "paper-binary convention requires a binary dendrogram".into(),
        ));
    }
    let mut f = 1usize;
    let mut size = p;
    while size < max_arity as u64 {
        f += 1;
        size *= p;
    }
    let field = FieldDescriptor::unramified(p, f, rep_system)?;
    let levels = x.level_map();
    let max_level = *levels.iter().max().unwrap_or(&0) as i64;
    let precision = DEFAULT_PRECISION.max(max_level + 1);

    let mut out = Vec::new();
    encode_at(
        x,
        &field,
        x.root(),
        true,
        false,
        &levels,
        &mut Vec::new(),
        precision,
        &mut out,
    )?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn encode_at(
    x: &ProjectiveDendrogram,
    field: &Field,
    v: usize,
    is_root: bool,
    in_last_branch: bool,
    levels: &[u64],
    path: &mut Vec<(i64, u64)>,
    precision: i64,
    out: &mut Vec<(String, PAdicNumber)>,
) -> Result<()> {
    use crate::dendrogram::ChildEdge;
    let cs = x.children(v);
    let k = cs.len();
    let level = levels[v] as i64;
    for (i, c) in cs.iter().enumerate() {
        let idx = if is_root {
            if i == 0 {
                0
            } else if i == k - 1 {
                1
            } else {
                (i + 1) as u64 as usize
            }
        } else if in_last_branch {
            if i == k - 1 {
                0
            } else {
                i + 1
            }
        } else {
            i
        } as u64;
        path.push((level, idx));
        match c {
            ChildEdge::Leaf { label } => {
                let terms: Vec<_> = path
                    .iter()
                    .filter(|(_, idx)| *idx != 0)
                    .map(|&(lvl, idx)| Ok((lvl, field.canonical_label(idx)?)))
                    .collect::<Result<Vec<_>>>()?;
                let value = PAdicNumber::from_terms(field.clone(), &terms, precision)?;
                out.push((label.clone(), value));
            }
            ChildEdge::Internal { vertex, .. } => {
                let child_in_last = if is_root { i == k - 1 } else { in_last_branch };
                encode_at(
                    x,
                    field,
                    *vertex,
                    false,
                    child_in_last,
                    levels,
                    path,
                    precision,
                    out,
                )?;
            }
        }
        path.pop();
    }
    Ok(())
}

/// Serialized hierarchy: the dendrogram plus per-vertex discs and the
/// coding, with the field parameters needed to re-parse the numbers.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HierarchyJson {
    #[serde(flatten)]
    pub dendrogram: DendrogramJson,
    pub vertex_disc: Vec<DiscJson>,
    pub coding: Vec<CodingJson>,
    pub field: FieldJson,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiscJson {
    pub vertex: usize,
    pub center: String,
    pub radius_exp: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CodingJson {
    pub label: String,
    pub number: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldJson {
    pub p: u64,
    pub f: usize,
    pub reps: RepSystem,
}

impl ClusterHierarchy {
    pub fn to_json(&self) -> HierarchyJson {
        let field = self.coding[0].1.field();
        HierarchyJson {
            dendrogram: self.dendrogram.to_json(),
            vertex_disc: self
                .vertex_disc
                .iter()
                .enumerate()
                .map(|(vertex, d)| DiscJson {
                    vertex,
                    center: format_padic(&d.center),
                    radius_exp: d.radius_exp,
                })
                .collect(),
            coding: self
                .coding
                .iter()
                .map(|(label, x)| CodingJson {
                    label: label.clone(),
                    number: format_padic(x),
                })
                .collect(),
            field: FieldJson {
                p: field.p(),
                f: field.f(),
                reps: field.rep_system(),
            },
            warnings: self.warnings.clone(),
        }
    }

    pub fn from_json(j: &HierarchyJson) -> Result<Self> {
        let field = FieldDescriptor::unramified(j.field.p, j.field.f, j.field.reps)?;
        let dendrogram = ProjectiveDendrogram::from_json(&j.dendrogram)?;
        let mut vertex_disc = vec![None; dendrogram.num_vertices()];
        for d in &j.vertex_disc {
            vertex_disc[d.vertex] = Some(Disc {
                center: parse_padic(&field, &d.center)?,
                radius_exp: d.radius_exp,
            });
        }
        let vertex_disc = vertex_disc
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidInput("missing vertex disc".into()))?;
        let coding = j
            .coding
            .iter()
            .map(|c| Ok((c.label.clone(), parse_padic(&field, &c.number)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ClusterHierarchy {
            dendrogram,
            vertex_disc,
            coding,
            warnings: j.warnings.clone(),
        })
    }
}
