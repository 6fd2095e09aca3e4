//! The uniformized metric `d_eps` on a filling, with boundary nodes hung at
//! the truncation level by their exact tail lengths.
//!
//! Arc length is `e^{-eps h} ds`, where `h` is the graph distance to the
//! root: `n + t` along a vertical edge leaving level `n`, and
//! `n + min(t, 1 - t)` along a horizontal edge at level `n`. Below the
//! stabilization level every vertex of the infinite filling lies on a ray
//! that meets the rest of the graph only at its top, so shortest paths
//! between truncated vertices and boundary points never use the part that
//! was cut off; Dijkstra on the truncated graph is exact.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filling::{EdgeKind, FillingGraph, BOUND_RTOL};
use crate::metric::FiniteMetricSpace;

/// Absolute tolerance of the identity `d_eps(v, boundary) = e^{-eps n}/eps`.
pub const WHITNEY_TOL: f64 = 1e-12;

/// A node of the uniformized graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Node {
    Vertex(usize),
    /// The boundary point of the ray through the given point of `Z`.
    Boundary(usize),
}

/// Where a ball may be centered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Center {
    Node(Node),
    /// A point of an edge at graph parameter `t` in `[0, 1]`, measured from
    /// the edge's first endpoint.
    OnEdge { edge: usize, t: f64 },
}

#[derive(Debug, Clone)]
pub struct UniformizedFilling {
    graph: Arc<FillingGraph>,
    eps: f64,
    sigma: f64,
    collapse: bool,
    edge_len: Vec<f64>,
    tail_len: f64,
}

/// `e^{-eps n}(1 - e^{-eps})/eps`.
pub fn vertical_length(eps: f64, n: u32) -> f64 {
    (-eps * n as f64).exp() * (-(-eps).exp_m1()) / eps
}

/// `2 e^{-eps n}(1 - e^{-eps/2})/eps`.
pub fn horizontal_length(eps: f64, n: u32) -> f64 {
    2.0 * (-eps * n as f64).exp() * (-(-eps / 2.0).exp_m1()) / eps
}

/// `e^{-eps n}/eps`, the length of a ray from level `n` to the boundary.
pub fn whitney(eps: f64, n: u32) -> f64 {
    (-eps * n as f64).exp() / eps
}

/// Uniformizes `g`. `eps > ln(alpha)` requires `allow_collapse`.
pub fn uniformize(g: Arc<FillingGraph>, eps: f64, allow_collapse: bool) -> Result<UniformizedFilling> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::BadParams(format!("eps {eps} must be positive")));
    }
    let max = g.alpha().ln();
    let collapse = eps > max;
    if collapse && !allow_collapse {
        return Err(Error::EpsOutOfRange { eps, max });
    }
    let edge_len = g
        .edges()
        .iter()
        .map(|e| match e.kind {
            EdgeKind::Vertical => vertical_length(eps, e.level),
            EdgeKind::Horizontal => horizontal_length(eps, e.level),
        })
        .collect();
    let tail_len = whitney(eps, g.n_trunc());
    Ok(UniformizedFilling {
        sigma: eps / max,
        graph: g,
        eps,
        collapse,
        edge_len,
        tail_len,
    })
}

#[derive(Clone, Copy, PartialEq)]
struct State(f64, usize);

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl UniformizedFilling {
    pub fn graph(&self) -> &FillingGraph {
        &self.graph
    }

    pub fn graph_arc(&self) -> Arc<FillingGraph> {
        Arc::clone(&self.graph)
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn collapse(&self) -> bool {
        self.collapse
    }

    pub fn edge_len(&self, e: usize) -> f64 {
        self.edge_len[e]
    }

    pub fn edge_lengths(&self) -> &[f64] {
        &self.edge_len
    }

    /// Uniformized length of each ray below the truncation level.
    pub fn tail_len(&self) -> f64 {
        self.tail_len
    }

    /// `d_eps(v, boundary)` for a vertex at level `n`.
    pub fn whitney(&self, n: u32) -> f64 {
        whitney(self.eps, n)
    }

    pub fn node_count(&self) -> usize {
        self.graph.vertex_count() + self.graph.space().len()
    }

    pub fn node_index(&self, n: Node) -> Result<usize> {
        let v = self.graph.vertex_count();
        match n {
            Node::Vertex(i) if i < v => Ok(i),
            Node::Boundary(p) if p < self.graph.space().len() => Ok(v + p),
            _ => Err(Error::UnknownNode(format!("{n:?}"))),
        }
    }

    pub fn node_at(&self, i: usize) -> Node {
        let v = self.graph.vertex_count();
        if i < v {
            Node::Vertex(i)
        } else {
            Node::Boundary(i - v)
        }
    }

    /// Arc length from the first endpoint of edge `e` to parameter `t`.
    pub fn arc_from_a(&self, e: usize, t: f64) -> f64 {
        let edge = self.graph.edge(e);
        let eps = self.eps;
        let base = (-eps * edge.level as f64).exp() / eps;
        match edge.kind {
            EdgeKind::Vertical => base * -(-eps * t).exp_m1(),
            EdgeKind::Horizontal => {
                if t <= 0.5 {
                    base * -(-eps * t).exp_m1()
                } else {
                    self.edge_len[e] - base * -(-eps * (1.0 - t)).exp_m1()
                }
            }
        }
    }

    /// Arc length from parameter `t` to the second endpoint of edge `e`.
    pub fn arc_from_b(&self, e: usize, t: f64) -> f64 {
        let edge = self.graph.edge(e);
        let eps = self.eps;
        let base = (-eps * edge.level as f64).exp() / eps;
        match edge.kind {
            // e^{-eps n}(e^{-eps t} - e^{-eps})/eps
            EdgeKind::Vertical => base * (-eps * t).exp() * -(-eps * (1.0 - t)).exp_m1(),
            EdgeKind::Horizontal => self.arc_from_a(e, 1.0 - t),
        }
    }

    /// Parameter at arc length `s` from the first endpoint (clamped to the
    /// edge).
    pub fn param_from_a(&self, e: usize, s: f64) -> f64 {
        let len = self.edge_len[e];
        if s <= 0.0 {
            return 0.0;
        }
        if s >= len {
            return 1.0;
        }
        let edge = self.graph.edge(e);
        let eps = self.eps;
        let scale = eps * (eps * edge.level as f64).exp();
        let climb = |s: f64| -(-(s * scale)).ln_1p() / eps;
        match edge.kind {
            EdgeKind::Vertical => climb(s).min(1.0),
            EdgeKind::Horizontal => {
                if s <= len / 2.0 {
                    climb(s).min(0.5)
                } else {
                    1.0 - climb(len - s).min(0.5)
                }
            }
        }
    }

    /// Parameter at arc length `s` from the second endpoint.
    pub fn param_from_b(&self, e: usize, s: f64) -> f64 {
        let len = self.edge_len[e];
        if s <= 0.0 {
            return 1.0;
        }
        if s >= len {
            return 0.0;
        }
        let edge = self.graph.edge(e);
        match edge.kind {
            EdgeKind::Vertical => {
                let eps = self.eps;
                let n1 = edge.level as f64 + 1.0;
                (1.0 - (s * eps * (eps * n1).exp()).ln_1p() / eps).clamp(0.0, 1.0)
            }
            EdgeKind::Horizontal => 1.0 - self.param_from_a(e, s),
        }
    }

    /// Shortest `d_eps` distances to every node from weighted sources.
    pub fn dijkstra(&self, sources: &[(usize, f64)]) -> Vec<f64> {
        let g = &*self.graph;
        let nv = g.vertex_count();
        let mut dist = vec![f64::INFINITY; self.node_count()];
        let mut heap = BinaryHeap::new();
        for &(s, d) in sources {
            if d < dist[s] {
                dist[s] = d;
                heap.push(State(d, s));
            }
        }
        let trunc = g.n_trunc();
        while let Some(State(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            let mut relax = |w: usize, len: f64, heap: &mut BinaryHeap<State>| {
                let nd = d + len;
                if nd < dist[w] {
                    dist[w] = nd;
                    heap.push(State(nd, w));
                }
            };
            if u < nv {
                for &(w, e) in g.neighbors(u) {
                    relax(w, self.edge_len[e], &mut heap);
                }
                let v = g.vertex(u);
                if v.level == trunc {
                    relax(nv + v.point, self.tail_len, &mut heap);
                }
            } else {
                let top = g.find(u - nv, trunc).expect("every point has a ray");
                relax(top, self.tail_len, &mut heap);
            }
        }
        dist
    }

    /// Initial Dijkstra sources for a ball center.
    pub fn center_sources(&self, c: Center) -> Result<Vec<(usize, f64)>> {
        match c {
            Center::Node(n) => Ok(vec![(self.node_index(n)?, 0.0)]),
            Center::OnEdge { edge, t } => {
                if edge >= self.edge_len.len() || !(0.0..=1.0).contains(&t) {
                    return Err(Error::UnknownNode(format!("edge {edge} at {t}")));
                }
                let e = self.graph.edge(edge);
                Ok(vec![(e.a, self.arc_from_a(edge, t)), (e.b, self.arc_from_b(edge, t))])
            }
        }
    }

    pub fn distances_from(&self, c: Center) -> Result<Vec<f64>> {
        Ok(self.dijkstra(&self.center_sources(c)?))
    }

    pub fn d_eps(&self, a: Node, b: Node) -> Result<f64> {
        let (ia, ib) = (self.node_index(a)?, self.node_index(b)?);
        Ok(self.dijkstra(&[(ia, 0.0)])[ib])
    }

    /// Distance from every node to the nearest boundary node.
    pub fn distance_to_boundary(&self) -> Vec<f64> {
        let nv = self.graph.vertex_count();
        let sources: Vec<(usize, f64)> = (0..self.graph.space().len()).map(|p| (nv + p, 0.0)).collect();
        self.dijkstra(&sources)
    }

    /// All-pairs `d_eps` among boundary nodes.
    pub fn boundary_metric(&self) -> BoundarySpace {
        let nv = self.graph.vertex_count();
        let np = self.graph.space().len();
        let rows: Vec<Vec<f64>> = {
            use rayon::prelude::*;
            (0..np)
                .into_par_iter()
                .map(|p| self.dijkstra(&[(nv + p, 0.0)])[nv..].to_vec())
                .collect()
        };
        let mut metric = vec![vec![0.0; np]; np];
        // Symmetrize exactly: both directions sum the same edges, possibly
        // in a different order.
        for i in 0..np {
            for j in (i + 1)..np {
                let d = rows[i][j].min(rows[j][i]);
                metric[i][j] = d;
                metric[j][i] = d;
            }
        }
        BoundarySpace {
            labels: (0..np).map(|p| self.graph.space().label(p)).collect(),
            metric,
            eps: self.eps,
        }
    }
}

/// The boundary of a uniformized filling with its exact metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundarySpace {
    pub labels: Vec<String>,
    pub metric: Vec<Vec<f64>>,
    pub eps: f64,
}

impl BoundarySpace {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn diam(&self) -> f64 {
        self.metric.iter().flatten().cloned().fold(0.0, f64::max)
    }

    /// The metric multiplied by `factor` as a finite metric space (no
    /// rescaling). Fails with [`Error::ScaleMismatch`] unless the diameter
    /// stays below 1.
    pub fn scaled_space(&self, factor: f64) -> Result<FiniteMetricSpace> {
        let dist: Vec<Vec<f64>> = self
            .metric
            .iter()
            .map(|r| r.iter().map(|d| d * factor).collect())
            .collect();
        let diam = dist.iter().flatten().cloned().fold(0.0, f64::max);
        if diam >= 1.0 {
            return Err(Error::ScaleMismatch(diam));
        }
        FiniteMetricSpace::from_matrix(self.labels.iter().map(|l| Some(l.clone())).collect(), dist)
    }

    /// `(eps tau / 2 alpha) d_eps`, the normalization under which a tree
    /// filling returns the original leaf metric.
    pub fn tree_rescaled(&self, tau: f64, alpha: f64) -> Result<FiniteMetricSpace> {
        self.scaled_space(self.eps * tau / (2.0 * alpha))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformizationReport {
    pub eps: f64,
    pub sigma: f64,
    pub collapse: bool,
    pub c1: f64,
    pub c2: Option<f64>,
    pub whitney_max_error: f64,
    pub diam: f64,
    pub diam_bound: f64,
    pub boundary_pairs: usize,
    /// `min C1 d_eps / d_Z^sigma` over boundary pairs; at least 1 when the
    /// lower bound holds.
    pub lower_ratio_min: Option<f64>,
    /// `max d_eps / (C2 d_Z^sigma)`; at most 1 when the upper bound holds.
    pub upper_ratio_max: Option<f64>,
    pub vertex_pairs: usize,
    /// `max d_Z^sigma / (C1 d_eps)` over vertex pairs.
    pub vertex_ratio_max: Option<f64>,
    /// Range of `d_eps / (e^{-eps (v|w)} min{d_X, 1})` over vertex pairs.
    pub product_ratio: Option<(f64, f64)>,
    /// `(n, D(n))`, the largest `d_eps` between two vertices of level `n`.
    pub collapse_series: Vec<(u32, f64)>,
    pub violations: Vec<String>,
}

impl UniformizationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the Whitney identity, the diameter bound, the snowflake bounds on
/// the boundary and for vertex pairs, and tabulates the product comparison
/// and the same-level diameters `D(n)`. The snowflake bounds are asserted
/// only when `eps <= ln(alpha)` and `tau > 1`.
pub fn verify_uniformization(u: &UniformizedFilling) -> UniformizationReport {
    let g = u.graph();
    let space = g.space();
    let (alpha, tau, eps, sigma) = (g.alpha(), g.tau(), u.eps(), u.sigma());
    let nv = g.vertex_count();
    let np = space.len();
    let mut violations = Vec::new();

    let to_bdry = u.distance_to_boundary();
    let mut whitney_max_error = 0.0f64;
    for id in 0..nv {
        let err = (to_bdry[id] - u.whitney(g.vertex(id).level)).abs();
        whitney_max_error = whitney_max_error.max(err);
        if err > WHITNEY_TOL {
            violations.push(format!("whitney at {}: error {err}", g.vertex(id)));
        }
    }

    let all: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        (0..u.node_count())
            .into_par_iter()
            .map(|i| u.dijkstra(&[(i, 0.0)]))
            .collect()
    };
    let diam = all.iter().flatten().cloned().fold(0.0, f64::max);
    let diam_bound = 2.0 / eps;
    if diam > diam_bound + WHITNEY_TOL {
        violations.push(format!("diameter {diam} exceeds 2/eps = {diam_bound}"));
    }

    let asserted = !u.collapse() && tau > 1.0;
    let c1 = (2.0 * tau * alpha).powf(sigma);
    let c2 = g.l().map(|l| 4.0 * alpha.powf((l as f64 + 1.0) * sigma) / eps);
    let mut lower_ratio_min: Option<f64> = None;
    let mut upper_ratio_max: Option<f64> = None;
    for i in 0..np {
        for j in (i + 1)..np {
            let d = all[nv + i][nv + j].min(all[nv + j][nv + i]);
            let dz = space.dist(i, j).powf(sigma);
            let lo = c1 * d / dz;
            lower_ratio_min = Some(lower_ratio_min.map_or(lo, |m: f64| m.min(lo)));
            if asserted && lo < 1.0 - BOUND_RTOL {
                violations.push(format!("lower snowflake bound at boundary pair ({i},{j}): {lo}"));
            }
            if let Some(c2) = c2 {
                let hi = d / (c2 * dz);
                upper_ratio_max = Some(upper_ratio_max.map_or(hi, |m: f64| m.max(hi)));
                if asserted && hi > 1.0 + BOUND_RTOL {
                    violations.push(format!("upper snowflake bound at boundary pair ({i},{j}): {hi}"));
                }
            }
        }
    }

    let mut vertex_ratio_max: Option<f64> = None;
    let mut product_ratio: Option<(f64, f64)> = None;
    let mut d_level = vec![0.0f64; g.n_trunc() as usize + 1];
    for a in 0..nv {
        let va = g.vertex(a);
        let bfs = g.bfs(a);
        for b in (a + 1)..nv {
            let vb = g.vertex(b);
            let d = all[a][b].min(all[b][a]);
            if va.level == vb.level {
                let slot = &mut d_level[va.level as usize];
                *slot = slot.max(d);
            }
            let dz = space.dist(va.point, vb.point);
            if dz > 0.0 {
                let r = dz.powf(sigma) / (c1 * d);
                vertex_ratio_max = Some(vertex_ratio_max.map_or(r, |m: f64| m.max(r)));
                if asserted && r > 1.0 + BOUND_RTOL {
                    violations.push(format!("vertex snowflake bound at {va}, {vb}: {r}"));
                }
            }
            let dx = bfs[b] as f64;
            let prod = (va.level as f64 + vb.level as f64 - dx) / 2.0;
            let pr = d / ((-eps * prod).exp() * dx.min(1.0));
            product_ratio = Some(product_ratio.map_or((pr, pr), |(lo, hi)| (lo.min(pr), hi.max(pr))));
        }
    }
    if let Some((lo, hi)) = product_ratio {
        if !(lo.is_finite() && hi.is_finite()) {
            violations.push("product comparison ratio not finite".into());
        }
    }
    let collapse_series = d_level
        .iter()
        .enumerate()
        .filter(|(n, _)| g.level_range(*n as u32).len() > 1)
        .map(|(n, &d)| (n as u32, d))
        .collect();

    UniformizationReport {
        eps,
        sigma,
        collapse: u.collapse(),
        c1,
        c2,
        whitney_max_error,
        diam,
        diam_bound,
        boundary_pairs: np * np.saturating_sub(1) / 2,
        lower_ratio_min,
        upper_ratio_max,
        vertex_pairs: nv * nv.saturating_sub(1) / 2,
        vertex_ratio_max,
        product_ratio,
        collapse_series,
        violations,
    }
}
