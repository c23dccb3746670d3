//! Time series of binary dendrograms: balance trends, velocity, flow
//! classification, and the Tate / genus-2 Mumford curve data extracted
//! from a translation along the (0,1)-axis plus an invariant branch.

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::classify::{classify, ClusterHierarchy, Disc};
use crate::dendrogram::ChildEdge;
use crate::error::{Error, Result};
use crate::expr::{sigma_matrix, theta_matrix, Matrix};
use crate::graph::{FlagGraph, GraphBuilder};
use crate::invariants::branches;
use crate::padic::{Field, FieldDescriptor, PAdicNumber, DEFAULT_PRECISION};

#[derive(Clone, Debug)]
pub struct DendrogramSeries {
    frames: Vec<ClusterHierarchy>,
}

impl DendrogramSeries {
    /// Validates: nonempty, common field, common label set, every frame a
    /// binary dendrogram, every frame normal (0 and 1 among the codings,
    /// all codings in the unit disc).
    pub fn new(frames: Vec<ClusterHierarchy>) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::InvalidInput("empty dendrogram series".into()));
        }
        let field = frames[0].coding[0].1.field().clone();
        let mut labels0: Vec<String> = frames[0].dendrogram.data_labels();
        labels0.sort();
        for (t, h) in frames.iter().enumerate() {
            if h.coding.iter().any(|(_, x)| x.field() != &field) {
                return Err(Error::DescriptorMismatch);
            }
            let mut labels: Vec<String> = h.dendrogram.data_labels();
            labels.sort();
            if labels != labels0 {
                return Err(Error::InvalidInput(format!(
                    "frame {t} has a different label set"
                )));
            }
            if !h.dendrogram.is_binary() {
                return Err(Error::InvalidInput(format!("frame {t} is not binary")));
            }
            if !h.is_normal() {
                return Err(Error::InvalidInput(format!(
                    "frame {t} is not normal (0 and 1 must be coded values in O_K)"
                )));
            }
        }
        Ok(DendrogramSeries { frames })
    }

    /// Builds the series by classifying raw codings frame by frame.
    pub fn from_codings(frames: &[Vec<(String, PAdicNumber)>]) -> Result<Self> {
        #[cfg(feature = "parallel")]
        let hierarchies: Result<Vec<_>> = frames.par_iter().map(|f| classify(f)).collect();
        #[cfg(not(feature = "parallel"))]
        let hierarchies: Result<Vec<_>> = frames.iter().map(|f| classify(f)).collect();
        Self::new(hierarchies?)
    }

    pub fn frames(&self) -> &[ClusterHierarchy] {
        &self.frames
    }

    pub fn field(&self) -> &Field {
        self.frames[0].coding[0].1.field()
    }
}

fn label_coded_as(h: &ClusterHierarchy, target: &PAdicNumber) -> Result<String> {
    h.coding
        .iter()
        .find(|(_, x)| x.difference_valuation(target).is_err())
        .map(|(l, _)| l.clone())
        .ok_or_else(|| Error::InvalidInput("frame is missing a required coded value".into()))
}

/// The binary balance w(branch of 0) - w(branch of 1) of one frame.
fn frame_balance(h: &ClusterHierarchy) -> Result<i64> {
    let field = h.coding[0].1.field().clone();
    let zero_label = label_coded_as(h, &PAdicNumber::zero(field.clone()))?;
    let bs = branches(&h.dendrogram);
    if bs.len() != 2 {
        return Err(Error::InvalidInput("frame root is not binary".into()));
    }
    let zero_side = bs
        .iter()
        .position(|b| b.labels.contains(&zero_label))
        .ok_or_else(|| Error::InvalidInput("0 is not among the data".into()))?;
    Ok(bs[zero_side].weight as i64 - bs[1 - zero_side].weight as i64)
}

pub fn balance_series(s: &DendrogramSeries) -> Result<Vec<i64>> {
    #[cfg(feature = "parallel")]
    {
        s.frames.par_iter().map(frame_balance).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        s.frames.iter().map(frame_balance).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VelocityMethod {
    Periodic,
    OlsFallback,
}

#[derive(Clone, Debug)]
pub struct VelocityEstimate {
    /// d/e in lowest terms.
    pub c: Ratio<i64>,
    pub method: VelocityMethod,
    pub period: Option<usize>,
    pub diffs: Vec<i64>,
}

/// Velocity of a balance series: exact periodicity of the first
/// differences is primary (c = period average); a least-squares slope
/// rounded to a small rational is a flagged fallback.
pub fn estimate_velocity(balances: &[i64]) -> Result<VelocityEstimate> {
    if balances.len() < 2 {
        return Err(Error::InvalidInput(
            "velocity needs at least two balance values".into(),
        ));
    }
    let diffs: Vec<i64> = balances.windows(2).map(|w| w[1] - w[0]).collect();
    let max_q = if diffs.len() == 1 { 1 } else { diffs.len() - 1 };
    for q in 1..=max_q {
        if (0..diffs.len()).all(|i| diffs[i] == diffs[i % q]) {
            let sum: i64 = diffs[..q].iter().sum();
            return Ok(VelocityEstimate {
                c: Ratio::new(sum, q as i64),
                method: VelocityMethod::Periodic,
                period: Some(q),
                diffs,
            });
        }
    }
    // least squares slope of balances against t, rounded to the nearest
    // rational with denominator bounded by the series length
    let n = balances.len() as f64;
    let mean_t = (n - 1.0) / 2.0;
    let mean_b = balances.iter().sum::<i64>() as f64 / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, &b) in balances.iter().enumerate() {
        num += (t as f64 - mean_t) * (b as f64 - mean_b);
        den += (t as f64 - mean_t) * (t as f64 - mean_t);
    }
    let slope = num / den;
    let mut best = Ratio::new(slope.round() as i64, 1);
    let mut best_err = (slope - best.numer().to_owned() as f64).abs();
    for e in 1..=balances.len() as i64 {
        let d = (slope * e as f64).round() as i64;
        let cand = Ratio::new(d, e);
        let err = (slope - *cand.numer() as f64 / *cand.denom() as f64).abs();
        if err < best_err {
            best = cand;
            best_err = err;
        }
    }
    Ok(VelocityEstimate {
        c: best,
        method: VelocityMethod::OlsFallback,
        period: None,
        diffs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flow {
    Stationary,
    TranslationAtRoot,
    FlowFromInfinity,
}

/// Deepest internal vertex whose disc contains the target point; returns
/// its radius exponent.
fn deepest_on_axis(h: &ClusterHierarchy, target: &PAdicNumber) -> i64 {
    h.vertex_disc
        .iter()
        .filter(|d| d.contains(target))
        .map(|d| d.radius_exp)
        .max()
        .expect("a normal frame has a root disc containing the target")
}

/// Stationary if c = 0; translation-at-root if the common root vertex is
/// eventually the repelling-side endpoint of the axis segment (the side of
/// 0 for c < 0, of 1 for c > 0); otherwise flow from infinity, which the
/// analysis does not pursue further.
pub fn classify_flow(s: &DendrogramSeries, velocity: &VelocityEstimate) -> Result<Flow> {
    if velocity.c.is_zero() {
        return Ok(Flow::Stationary);
    }
    let field = s.field().clone();
    let target = if velocity.c < Ratio::zero() {
        PAdicNumber::zero(field)
    } else {
        PAdicNumber::one(field)
    };
    let last = s.frames.last().unwrap();
    let root_radius = last.vertex_disc[last.dendrogram.root()].radius_exp;
    Ok(if deepest_on_axis(last, &target) == root_radius {
        Flow::TranslationAtRoot
    } else {
        Flow::FlowFromInfinity
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    Tate,
    Mumford2,
    DiscreteIntersecting,
}

#[derive(Clone, Debug)]
pub struct QuotientGraph {
    pub graph: FlagGraph,
    /// Parallel to the graph's internal edges.
    pub lengths: Vec<Ratio<i64>>,
}

#[derive(Clone, Debug)]
pub struct CurveData {
    pub kind: CurveKind,
    /// L = purely ramified extension of the series' field.
    pub base_field: Field,
    pub generators: Vec<Matrix>,
    pub quotient: Option<QuotientGraph>,
    pub betti1: usize,
    pub genus: usize,
    /// Frame t -> vertex of the quotient cycle.
    pub orbit_map: Vec<usize>,
    /// Translation length of the primary generator along (0,1).
    pub translation: Ratio<i64>,
}

fn cycle_into(
    gb: &mut GraphBuilder,
    count: usize,
    len: Ratio<i64>,
    lengths: &mut Vec<Ratio<i64>>,
) -> usize {
    let vs = gb.add_vertices(count);
    for i in 0..count {
        gb.add_internal_edge(vs[i], vs[(i + 1) % count]);
        lengths.push(len);
    }
    vs[0]
}

/// Tate-curve data for a translation with velocity c = d/e: the quotient
/// of the axis is a cycle of |d| edges of length 1/e over the ramified
/// extension L of index e, generated by Theta = [[-c_p, 0], [1-c_p, -1]].
/// Frame t maps to cycle vertex (e * b(t)) mod |d|.
pub fn tate_curve(k: &Field, c: Ratio<i64>, balances: &[i64]) -> Result<CurveData> {
    if c.is_zero() {
        return Err(Error::InvalidInput(
            "zero velocity: no translation, no Tate curve".into(),
        ));
    }
    let d = c.numer().unsigned_abs() as usize;
    let e = *c.denom() as usize;
    let base_field = FieldDescriptor::ramified_over(k, e);
    let mut gb = GraphBuilder::new();
    let mut lengths = Vec::new();
    cycle_into(&mut gb, d, Ratio::new(1, e as i64), &mut lengths);
    let graph = gb.build()?;
    let (h0, h1) = graph.betti();
    debug_assert_eq!((h0, h1), (1, 1));
    let orbit_map = balances
        .iter()
        .map(|&b| (e as i64 * b).rem_euclid(d as i64) as usize)
        .collect();
    Ok(CurveData {
        kind: CurveKind::Tate,
        base_field,
        generators: vec![theta_matrix(c)],
        quotient: Some(QuotientGraph { graph, lengths }),
        betti1: h1,
        genus: 1,
        orbit_map,
        translation: c.abs(),
    })
}

/// Branches (as root disc + label set) that persist across every frame
/// with the same disc, the same particle set, and the same root-ward path
/// of discs. Sorted by label count descending, depth descending.
pub fn invariant_branches(s: &DendrogramSeries) -> Result<Vec<(Disc, Vec<String>)>> {
    let first = &s.frames[0];
    let mut out: Vec<(Disc, Vec<String>)> = Vec::new();
    for v in 0..first.dendrogram.num_vertices() {
        if v == first.dendrogram.root() {
            continue;
        }
        let disc = first.vertex_disc[v].clone();
        let labels = first.dendrogram.subtree_labels(v);
        let path = ancestor_discs(first, v);
        let persistent = s.frames[1..].iter().all(|h| {
            (0..h.dendrogram.num_vertices()).any(|w| {
                h.vertex_disc[w] == disc
                    && h.dendrogram.subtree_labels(w) == labels
                    && ancestor_discs(h, w) == path
            })
        });
        if persistent {
            out.push((disc, labels));
        }
    }
    out.sort_by(|a, b| {
        b.1.len()
            .cmp(&a.1.len())
            .then(b.0.radius_exp.cmp(&a.0.radius_exp))
    });
    Ok(out)
}

fn ancestor_discs(h: &ClusterHierarchy, v: usize) -> Vec<Disc> {
    let mut path = Vec::new();
    let mut cur = v;
    while let Some((parent, _)) = h.dendrogram.parent(cur) {
        path.push(h.vertex_disc[parent].clone());
        cur = parent;
    }
    path.reverse();
    path
}

/// The largest persistent branch, if any.
pub fn invariant_branch(s: &DendrogramSeries) -> Result<Option<(Disc, Vec<String>)>> {
    Ok(invariant_branches(s)?.into_iter().next())
}

/// The deepest persistent branch hanging off the (0,1)-axis: its disc
/// contains neither 0 nor 1.
pub fn invariant_branch_off_axis(s: &DendrogramSeries) -> Result<Option<(Disc, Vec<String>)>> {
    let field = s.field().clone();
    let zero = PAdicNumber::zero(field.clone());
    let one = PAdicNumber::one(field);
    Ok(invariant_branches(s)?
        .into_iter()
        .filter(|(d, _)| !d.contains(&zero) && !d.contains(&one))
        .max_by_key(|(d, _)| d.radius_exp))
}

/// Ends of the geodesic through an off-axis vertex w0 = B(center, p^{-m}):
/// a = the center truncated below m (continued by zeros), b = a + p^m.
pub fn geodesic_endpoints(w0: &Disc) -> Result<(PAdicNumber, PAdicNumber)> {
    let field = w0.center.field().clone();
    let zero = PAdicNumber::zero(field.clone());
    let one = PAdicNumber::one(field.clone());
    if w0.contains(&zero) || w0.contains(&one) {
        return Err(Error::InvalidInput(
            "branch vertex lies on the (0,1)-axis".into(),
        ));
    }
    let m = w0.radius_exp;
    let mut terms: Vec<_> = w0
        .center
        .terms()
        .into_iter()
        .filter(|(exp, _)| *exp < m)
        .collect();
    let precision = DEFAULT_PRECISION.max(m + 1);
    let a = PAdicNumber::from_terms(field.clone(), &terms, precision)?;
    terms.push((m, field.one_label()));
    let b = PAdicNumber::from_terms(field, &terms, precision)?;
    Ok((a, b))
}

/// Genus-2 Mumford-curve data from a Tate translation Theta plus the
/// hyperbolic generator with fixed points a, b and translation length u.
///
/// The geodesics (0,1) and (a,b) are disjoint iff the apex disc
/// B(a, p^{-v(a-b)}) contains neither 0 nor 1; then the quotient is two
/// cycles joined by a bridge segment (Betti number 2). If they share a
/// segment, the group is discrete only when that segment is no longer
/// than both translation lengths.
pub fn mumford_curve(
    theta: &CurveData,
    a: &PAdicNumber,
    b: &PAdicNumber,
    u: Ratio<i64>,
) -> Result<CurveData> {
    let field = a.field().clone();
    let zero = PAdicNumber::zero(field.clone());
    let one = PAdicNumber::one(field.clone());
    for (name, x) in [("a", a), ("b", b)] {
        if x.difference_valuation(&zero).is_err() || x.difference_valuation(&one).is_err() {
            return Err(Error::InvalidInput(format!(
                "fixed point {name} coincides with an end of the (0,1)-axis"
            )));
        }
    }
    if u <= Ratio::zero() {
        return Err(Error::InvalidInput("translation length u must be positive".into()));
    }
    let m_bar = a
        .difference_valuation(b)
        .map_err(|_| Error::InvalidInput("a and b coincide".into()))?;
    let val = |x: &PAdicNumber| x.valuation().finite().unwrap();
    let dv_one = |x: &PAdicNumber| x.difference_valuation(&one).unwrap();
    let apex = Disc {
        center: a.clone(),
        radius_exp: m_bar,
    };
    let generators = vec![theta.generators[0].clone(), sigma_matrix(u)];
    if !apex.contains(&zero) && !apex.contains(&one) {
        // disjoint axes: bridge from the deepest axis vertex containing a
        let attach = val(a).max(dv_one(a)).max(0);
        let bridge_len = m_bar - attach;
        let d1 = theta.quotient.as_ref().map(|q| q.lengths.len()).unwrap_or(1);
        let e1_len = theta
            .quotient
            .as_ref()
            .map(|q| q.lengths[0])
            .unwrap_or_else(Ratio::one);
        let d2 = u.numer().unsigned_abs() as usize;
        let e2 = *u.denom() as usize;
        let mut gb = GraphBuilder::new();
        let mut lengths = Vec::new();
        let c1 = cycle_into(&mut gb, d1, e1_len, &mut lengths);
        let c2 = cycle_into(&mut gb, d2, Ratio::new(1, e2 as i64), &mut lengths);
        gb.add_internal_edge(c1, c2);
        lengths.push(Ratio::from_integer(bridge_len));
        let graph = gb.build()?;
        let (h0, h1) = graph.betti();
        let (h0t, h1t) = graph.betti_by_traversal();
        debug_assert_eq!((h0, h1), (h0t, h1t));
        debug_assert_eq!((h0, h1), (1, 2));
        return Ok(CurveData {
            kind: CurveKind::Mumford2,
            base_field: theta.base_field.clone(),
            generators,
            quotient: Some(QuotientGraph { graph, lengths }),
            betti1: h1,
            genus: 2,
            orbit_map: theta.orbit_map.clone(),
            translation: theta.translation,
        });
    }
    // intersecting axes: count the shared vertices of (a,b) and (0,1)
    let a_side = val(a).max(dv_one(a)) - m_bar + 1; // j >= m_bar on the a side
    let b_side = (val(b).max(dv_one(b)) - m_bar).max(0); // j > m_bar on the b side
    let shared_vertices = a_side.max(0) + b_side;
    let overlap = Ratio::from_integer((shared_vertices - 1).max(0));
    if overlap <= theta.translation.min(u) {
        Ok(CurveData {
            kind: CurveKind::DiscreteIntersecting,
            base_field: theta.base_field.clone(),
            generators,
            quotient: None,
            betti1: 2,
            genus: 2,
            orbit_map: theta.orbit_map.clone(),
            translation: theta.translation,
        })
    } else {
        Err(Error::NonDiscrete(format!(
            "axes overlap along {overlap} edges, more than both periods"
        )))
    }
}

/// Shifts every coded value by delta and rebuilds each frame; a
/// translation of the unit disc is an isometry, so all frame shapes and
/// invariants are preserved.
pub fn recenter(s: &DendrogramSeries, delta: &PAdicNumber) -> Result<DendrogramSeries> {
    let shifted: Result<Vec<Vec<(String, PAdicNumber)>>> = s
        .frames
        .iter()
        .map(|h| {
            h.coding
                .iter()
                .map(|(l, x)| Ok((l.clone(), x.add(delta)?)))
                .collect()
        })
        .collect();
    let shifted = shifted?;
    let hierarchies: Result<Vec<_>> = shifted.iter().map(|f| classify(f)).collect();
    Ok(DendrogramSeries {
        frames: hierarchies?,
    })
}

/// Velocity of the balance series inside a persistent branch, used as the
/// default translation length u along its own axis; 1 when the branch is
/// rigid or too small to carry a trend.
fn branch_translation_default(s: &DendrogramSeries, branch: &Disc) -> Ratio<i64> {
    let mut balances = Vec::new();
    for h in &s.frames {
        let Some(v) = (0..h.dendrogram.num_vertices()).find(|&w| h.vertex_disc[w] == *branch)
        else {
            return Ratio::one();
        };
        let cs = h.dendrogram.children(v);
        if cs.len() != 2 {
            return Ratio::one();
        }
        let weight = |c: &ChildEdge| match c {
            ChildEdge::Leaf { .. } => 0i64,
            ChildEdge::Internal { vertex, len } => {
                let vol: u64 = h
                    .dendrogram
                    .subtree_vertices(*vertex)
                    .into_iter()
                    .flat_map(|w| h.dendrogram.children(w))
                    .map(|c| match c {
                        ChildEdge::Internal { len, .. } => *len,
                        ChildEdge::Leaf { .. } => 0,
                    })
                    .sum();
                (vol + len) as i64
            }
        };
        balances.push(weight(&cs[0]) - weight(&cs[1]));
    }
    match estimate_velocity(&balances) {
        Ok(v) if !v.c.is_zero() => v.c.abs(),
        _ => Ratio::one(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesReport {
    pub balances: Vec<i64>,
    pub velocity: VelocityJson,
    pub flow: Flow,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flow_note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VelocityJson {
    pub d: i64,
    pub e: i64,
    pub method: VelocityMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveJson {
    pub kind: CurveKind,
    pub genus: usize,
    pub betti1: usize,
    pub generators: Vec<Vec<Vec<String>>>,
    pub base_field: FieldRampJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotient: Option<QuotientJson>,
    pub orbits: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FieldRampJson {
    pub p: u64,
    pub f: usize,
    pub e: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuotientJson {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub lengths: Vec<String>,
}

pub fn curve_json(c: &CurveData) -> CurveJson {
    CurveJson {
        kind: c.kind,
        genus: c.genus,
        betti1: c.betti1,
        generators: c
            .generators
            .iter()
            .map(|m| {
                m.iter()
                    .map(|row| row.iter().map(|e| e.to_string()).collect())
                    .collect()
            })
            .collect(),
        base_field: FieldRampJson {
            p: c.base_field.p(),
            f: c.base_field.f(),
            e: c.base_field.e(),
        },
        quotient: c.quotient.as_ref().map(|q| {
            let (internal, _) = q.graph.edges();
            QuotientJson {
                vertices: q.graph.num_vertices(),
                edges: internal.iter().map(|e| (e.va, e.vb)).collect(),
                lengths: q.lengths.iter().map(|r| r.to_string()).collect(),
            }
        }),
        orbits: c.orbit_map.clone(),
    }
}

/// The full pipeline: balances, velocity, flow, then curve data — a Tate
/// curve from the axis translation, upgraded to a genus-2 Mumford curve
/// when a persistent off-axis branch supplies a second hyperbolic
/// generator. `u` overrides the translation length along that branch's
/// axis; the default is measured from the branch's own balance trend.
pub fn analyze_series(s: &DendrogramSeries, u: Option<Ratio<i64>>) -> Result<SeriesReport> {
    let balances = balance_series(s)?;
    let velocity = estimate_velocity(&balances)?;
    let flow = classify_flow(s, &velocity)?;
    let flow_note = match flow {
        Flow::FlowFromInfinity => {
            Some("flow from infinity: analysis unsupported beyond curve extraction".to_string())
        }
        _ => None,
    };
    let curve = if velocity.c.is_zero() {
        None
    } else {
        let theta = tate_curve(s.field(), velocity.c, &balances)?;
        match invariant_branch_off_axis(s)? {
            Some((disc, _labels)) => {
                let (a, b) = geodesic_endpoints(&disc)?;
                let u = u.unwrap_or_else(|| branch_translation_default(s, &disc));
                Some(curve_json(&mumford_curve(&theta, &a, &b, u)?))
            }
            None => Some(curve_json(&theta)),
        }
    };
    Ok(SeriesReport {
        balances,
        velocity: VelocityJson {
            d: *velocity.c.numer(),
            e: *velocity.c.denom(),
            method: velocity.method,
            period: velocity.period,
        },
        flow,
        flow_note,
        curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{int, moebius_fixes, Expr};
    use crate::padic::{RepSystem, DEFAULT_PRECISION};

    fn q2() -> Field {
        FieldDescriptor::unramified(2, 1, RepSystem::Polynomial).unwrap()
    }

    fn num(field: &Field, exps: &[i64]) -> PAdicNumber {
        let terms: Vec<_> = exps.iter().map(|&e| (e, field.one_label())).collect();
        PAdicNumber::from_terms(field.clone(), &terms, DEFAULT_PRECISION).unwrap()
    }

    fn frame(field: &Field, values: &[(&str, &[i64])]) -> Vec<(String, PAdicNumber)> {
        values
            .iter()
            .map(|(l, e)| (l.to_string(), num(field, e)))
            .collect()
    }

    /// Marked particle m2 drifts across the (0,1)-axis; balances 2,1,-1,-2.
    fn drift_series() -> DendrogramSeries {
        let f = q2();
        let frames = vec![
            frame(&f, &[("m1", &[]), ("m2", &[2]), ("m3", &[0])]),
            frame(&f, &[("m1", &[]), ("m2", &[1]), ("m3", &[0])]),
            frame(&f, &[("m1", &[]), ("m2", &[0, 1]), ("m3", &[0])]),
            frame(&f, &[("m1", &[]), ("m2", &[0, 2]), ("m3", &[0])]),
        ];
        DendrogramSeries::from_codings(&frames).unwrap()
    }

    #[test]
    fn drift_balances_and_velocity() {
        let s = drift_series();
        let b = balance_series(&s).unwrap();
        assert_eq!(b, vec![2, 1, -1, -2]);
        let v = estimate_velocity(&b).unwrap();
        assert_eq!(v.c, Ratio::new(-3, 2));
        assert_eq!(v.method, VelocityMethod::Periodic);
        assert_eq!(v.period, Some(2));
    }

    #[test]
    fn velocity_examples() {
        let v = estimate_velocity(&[0, 1, 2, 3]).unwrap();
        assert_eq!(v.c, Ratio::from_integer(1));
        assert_eq!(v.period, Some(1));
        let v = estimate_velocity(&[0, -1, -3, -4, -6]).unwrap();
        assert_eq!(v.c, Ratio::new(-3, 2));
        assert_eq!(v.period, Some(2));
        assert!(estimate_velocity(&[1]).is_err());
    }

    #[test]
    fn velocity_recovers_synthetic_periodic_increments() {
        for d in -10i64..=10 {
            for e in 1i64..=6 {
                if d == 0 {
                    continue;
                }
                // increments: e-cycle summing to d
                let base = d.div_euclid(e);
                let extra = d.rem_euclid(e);
                let incs: Vec<i64> = (0..e).map(|i| base + i64::from(i < extra)).collect();
                let mut balances = vec![0i64];
                for t in 0..(3 * e as usize) {
                    balances.push(balances[t] + incs[t % e as usize]);
                }
                let v = estimate_velocity(&balances).unwrap();
                assert_eq!(v.c, Ratio::new(d, e), "d={d} e={e}");
                assert_eq!(v.method, VelocityMethod::Periodic);
            }
        }
    }

    #[test]
    fn ols_fallback_for_aperiodic_series() {
        let v = estimate_velocity(&[0, 1, 3, 4, 5, 9]).unwrap();
        assert_eq!(v.method, VelocityMethod::OlsFallback);
        assert!(*v.c.denom() <= 6);
    }

    #[test]
    fn drift_flow_is_translation_at_root() {
        let s = drift_series();
        let b = balance_series(&s).unwrap();
        let v = estimate_velocity(&b).unwrap();
        assert_eq!(classify_flow(&s, &v).unwrap(), Flow::TranslationAtRoot);
    }

    #[test]
    fn interior_root_means_flow_from_infinity() {
        // both axis sides keep internal vertices in every frame
        let f = q2();
        let frames = vec![
            frame(&f, &[("m1", &[]), ("m2", &[3]), ("m3", &[0]), ("m4", &[0, 1])]),
            frame(&f, &[("m1", &[]), ("m2", &[2]), ("m3", &[0]), ("m4", &[0, 1])]),
            frame(&f, &[("m1", &[]), ("m2", &[1]), ("m3", &[0]), ("m4", &[0, 2])]),
            frame(&f, &[("m1", &[]), ("m2", &[1]), ("m3", &[0]), ("m4", &[0, 3])]),
        ];
        let s = DendrogramSeries::from_codings(&frames).unwrap();
        let b = balance_series(&s).unwrap();
        assert_eq!(b, vec![2, 1, -1, -2]);
        let v = estimate_velocity(&b).unwrap();
        assert_eq!(classify_flow(&s, &v).unwrap(), Flow::FlowFromInfinity);
    }

    #[test]
    fn stationary_flow() {
        let f = q2();
        let fr = frame(&f, &[("m1", &[]), ("m2", &[1]), ("m3", &[0])]);
        let s = DendrogramSeries::from_codings(&[fr.clone(), fr]).unwrap();
        let b = balance_series(&s).unwrap();
        let v = estimate_velocity(&b).unwrap();
        assert_eq!(classify_flow(&s, &v).unwrap(), Flow::Stationary);
    }

    #[test]
    fn tate_curve_drift_fixture() {
        let k = q2();
        let c = Ratio::new(-3, 2);
        let curve = tate_curve(&k, c, &[2, 1, -1, -2]).unwrap();
        assert_eq!(curve.kind, CurveKind::Tate);
        assert_eq!(curve.genus, 1);
        assert_eq!(curve.betti1, 1);
        assert_eq!(curve.base_field.e(), 2);
        let q = curve.quotient.as_ref().unwrap();
        assert_eq!(q.graph.num_vertices(), 3);
        assert_eq!(q.lengths, vec![Ratio::new(1, 2); 3]);
        // orbits split into {even t} and {odd t}
        assert_eq!(curve.orbit_map, vec![1, 2, 1, 2]);
        // Theta fixes 0 and 1
        assert!(moebius_fixes(&curve.generators[0], &int(0)));
        assert!(moebius_fixes(&curve.generators[0], &int(1)));
    }

    #[test]
    fn tate_curve_degenerate_cycle() {
        let k = q2();
        let curve = tate_curve(&k, Ratio::from_integer(-1), &[0, -1, -2]).unwrap();
        let q = curve.quotient.as_ref().unwrap();
        assert_eq!(q.graph.num_vertices(), 1);
        assert!(curve.orbit_map.iter().all(|&v| v == 0));
        assert!(tate_curve(&k, Ratio::zero(), &[0, 0]).is_err());
    }

    /// Five particles; only the subtree {x3, x4} = {12, 28} persists.
    fn genus2_series() -> DendrogramSeries {
        let f = q2();
        let frames = vec![
            frame(
                &f,
                &[("x0", &[]), ("x1", &[0]), ("x2", &[0, 4]), ("x3", &[2, 3]), ("x4", &[2, 3, 4])],
            ),
            frame(
                &f,
                &[("x0", &[]), ("x1", &[0]), ("x2", &[0, 5]), ("x3", &[2, 3]), ("x4", &[2, 3, 4])],
            ),
            frame(
                &f,
                &[("x0", &[]), ("x1", &[0]), ("x2", &[0, 6]), ("x3", &[2, 3]), ("x4", &[2, 3, 4])],
            ),
        ];
        DendrogramSeries::from_codings(&frames).unwrap()
    }

    #[test]
    fn invariant_branch_detection() {
        let s = genus2_series();
        let all = invariant_branches(&s).unwrap();
        // the {x0, x3, x4} branch and its {x3, x4} sub-branch persist
        assert!(all.iter().any(|(_, l)| l == &["x3", "x4"]));
        let largest = invariant_branch(&s).unwrap().unwrap();
        assert_eq!(largest.1, vec!["x0", "x3", "x4"]);
        let off = invariant_branch_off_axis(&s).unwrap().unwrap();
        assert_eq!(off.1, vec!["x3", "x4"]);
        assert_eq!(off.0.radius_exp, 4);
    }

    #[test]
    fn invariant_branch_none_when_everything_moves() {
        let f = q2();
        let frames = vec![
            frame(&f, &[("a", &[]), ("b", &[0]), ("c", &[2])]),
            frame(&f, &[("a", &[]), ("b", &[0]), ("c", &[3])]),
        ];
        let s = DendrogramSeries::from_codings(&frames).unwrap();
        // the {a, c} branch changes its disc radius between frames
        assert!(invariant_branch_off_axis(&s).unwrap().is_none());
        assert!(invariant_branches(&s)
            .unwrap()
            .iter()
            .all(|(d, _)| d.radius_exp == 0 || d.contains(&PAdicNumber::one(q2()))));
    }

    #[test]
    fn identical_frames_keep_whole_branch() {
        let f = q2();
        let fr = frame(&f, &[("a", &[]), ("b", &[0]), ("c", &[2]), ("d", &[2, 3])]);
        let s = DendrogramSeries::from_codings(&[fr.clone(), fr]).unwrap();
        let largest = invariant_branch(&s).unwrap().unwrap();
        assert_eq!(largest.1, vec!["a", "c", "d"]);
    }

    #[test]
    fn geodesic_endpoints_examples() {
        let f = q2();
        // w0 = B(2^2 + 2^3, 2^-4): a = 2^2+2^3, b = a + 2^4
        let w0 = Disc {
            center: num(&f, &[2, 3]),
            radius_exp: 4,
        };
        let (a, b) = geodesic_endpoints(&w0).unwrap();
        assert_eq!(a.terms().iter().map(|(e, _)| *e).collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(b.terms().iter().map(|(e, _)| *e).collect::<Vec<_>>(), vec![2, 3, 4]);
        assert_eq!(a.difference_valuation(&b).unwrap(), 4);
        // truncation drops deep coefficients of the center
        let w0 = Disc {
            center: num(&f, &[1, 5]),
            radius_exp: 3,
        };
        let (a, b) = geodesic_endpoints(&w0).unwrap();
        assert_eq!(a.terms().iter().map(|(e, _)| *e).collect::<Vec<_>>(), vec![1]);
        assert_eq!(a.difference_valuation(&b).unwrap(), 3);
        // on-axis discs are rejected
        let on_axis = Disc {
            center: PAdicNumber::zero(f.clone()),
            radius_exp: 2,
        };
        assert!(geodesic_endpoints(&on_axis).is_err());
    }

    #[test]
    fn mumford_genus2_fixture() {
        let k = q2();
        let theta = tate_curve(&k, Ratio::from_integer(-1), &[0, -1, -2]).unwrap();
        let a = num(&k, &[2, 3]);
        let b = num(&k, &[2, 3, 4]);
        let curve = mumford_curve(&theta, &a, &b, Ratio::one()).unwrap();
        assert_eq!(curve.kind, CurveKind::Mumford2);
        assert_eq!(curve.genus, 2);
        assert_eq!(curve.betti1, 2);
        let q = curve.quotient.as_ref().unwrap();
        assert_eq!(q.graph.betti(), (1, 2));
        assert_eq!(q.graph.betti_by_traversal(), (1, 2));
        // two unit loops joined by a length-2 bridge
        let mut lens = q.lengths.clone();
        lens.sort();
        assert_eq!(
            lens,
            vec![Ratio::one(), Ratio::one(), Ratio::from_integer(2)]
        );
        // sigma fixes a and b symbolically
        assert!(moebius_fixes(&curve.generators[1], &Expr::SymA));
        assert!(moebius_fixes(&curve.generators[1], &Expr::SymB));
    }

    #[test]
    fn mumford_rejects_axis_endpoint() {
        let k = q2();
        let theta = tate_curve(&k, Ratio::from_integer(-1), &[0, -1]).unwrap();
        let a = PAdicNumber::zero(k.clone());
        let b = num(&k, &[4]);
        assert!(mumford_curve(&theta, &a, &b, Ratio::one()).is_err());
    }

    #[test]
    fn mumford_intersecting_cases() {
        let k = q2();
        // a = 2^2, b = 2^2 + 2: apex B(a, 2^-1) contains 0 (val(a) = 2 >= 1);
        // the axes share one edge, within both translation lengths
        let theta = tate_curve(&k, Ratio::from_integer(-2), &[0, -2, -4]).unwrap();
        let a = num(&k, &[2]);
        let b = num(&k, &[2, 1]);
        let curve = mumford_curve(&theta, &a, &b, Ratio::from_integer(2)).unwrap();
        assert_eq!(curve.kind, CurveKind::DiscreteIntersecting);
        assert!(curve.quotient.is_none());
        // a deep overlap with short periods is non-discrete
        let theta1 = tate_curve(&k, Ratio::new(-1, 1), &[0, -1]).unwrap();
        let a = num(&k, &[4]);
        let b = num(&k, &[4, 1]);
        match mumford_curve(&theta1, &a, &b, Ratio::one()) {
            Err(Error::NonDiscrete(_)) => {}
            other => panic!("expected non-discrete error, got {other:?}"),
        }
    }

    #[test]
    fn recenter_preserves_shape() {
        let s = drift_series();
        let delta = num(&q2(), &[3, 5]);
        let s2 = recenter(&s, &delta).unwrap();
        for (h1, h2) in s.frames().iter().zip(s2.frames()) {
            assert_eq!(
                h1.dendrogram.canonical_form(),
                h2.dendrogram.canonical_form()
            );
            assert_eq!(h1.dendrogram.volume(), h2.dendrogram.volume());
        }
    }

    #[test]
    fn analyze_series_end_to_end() {
        let s = genus2_series();
        let report = analyze_series(&s, None).unwrap();
        assert_eq!(report.balances, vec![0, -1, -2]);
        assert_eq!((report.velocity.d, report.velocity.e), (-1, 1));
        let curve = report.curve.unwrap();
        assert_eq!(curve.kind, CurveKind::Mumford2);
        assert_eq!(curve.genus, 2);
        assert_eq!(curve.betti1, 2);
        assert_eq!(curve.generators.len(), 2);

        let s = drift_series();
        let report = analyze_series(&s, None).unwrap();
        let curve = report.curve.unwrap();
        assert_eq!(curve.kind, CurveKind::Tate);
        assert_eq!(curve.genus, 1);
        assert_eq!(curve.orbits, vec![1, 2, 1, 2]);
        assert_eq!(curve.base_field.e, 2);
    }
}
