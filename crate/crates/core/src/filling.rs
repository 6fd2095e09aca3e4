//! The hyperbolic filling of a finite metric space, truncated below the
//! level where it becomes a disjoint union of rays.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::nets::{scale, NetHierarchy};

/// Relative slack used when checking proven inequalities in floating point.
pub const BOUND_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub point: usize,
    pub level: u32,
}

impl Vertex {
    pub fn new(point: usize, level: u32) -> Self {
        Self { point, level }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.point, self.level)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Horizontal,
    Vertical,
}

/// An edge between vertex ids `a < b`. For vertical edges `a` is the upper
/// endpoint and `level` is its level; horizontal edges sit at `level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub kind: EdgeKind,
    pub level: u32,
}

/// How to decide whether two open balls of `Z` meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeighborRule {
    /// Some point of `Z` lies in both balls.
    #[default]
    Witness,
    /// `d(x, y) < r1 + r2`, the ambient-space shortcut.
    RadiusSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FillingParams {
    pub tau: f64,
    /// Defaults to `N_star + 2`.
    pub n_trunc: Option<u32>,
    pub counterexample_mode: bool,
    pub rule: NeighborRule,
}

impl FillingParams {
    pub fn new(tau: f64) -> Self {
        Self {
            tau,
            n_trunc: None,
            counterexample_mode: false,
            rule: NeighborRule::Witness,
        }
    }

    pub fn with_n_trunc(mut self, n: u32) -> Self {
        self.n_trunc = Some(n);
        self
    }

    pub fn counterexample(mut self) -> Self {
        self.counterexample_mode = true;
        self
    }

    pub fn with_rule(mut self, rule: NeighborRule) -> Self {
        self.rule = rule;
        self
    }
}

/// Smallest `l >= 0` with `alpha^{-l} <= tau - 1`; `None` when `tau <= 1`.
pub fn l_param(alpha: f64, tau: f64) -> Option<u32> {
    if tau <= 1.0 {
        return None;
    }
    let mut l = 0;
    while scale(alpha, l) > tau - 1.0 {
        l += 1;
    }
    Some(l)
}

/// Smallest `n` with `2 tau alpha^{-n} <= min_sep`. From this level on the
/// filling is a disjoint union of vertical rays.
pub fn stabilization_level(alpha: f64, tau: f64, min_sep: f64) -> u32 {
    let mut n = 0;
    while 2.0 * tau * scale(alpha, n) > min_sep {
        n += 1;
    }
    n
}

#[derive(Debug, Clone)]
pub struct FillingGraph {
    nets: NetHierarchy,
    alpha: f64,
    tau: f64,
    l: Option<u32>,
    n_star: u32,
    n_trunc: u32,
    rule: NeighborRule,
    counterexample_mode: bool,
    vertices: Vec<Vertex>,
    level_start: Vec<usize>,
    /// `lookup[n][p]` is the id of `(p, n)` or `usize::MAX`.
    lookup: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, usize)>>,
}

/// Parameter block echoed by exports and reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FillingSummary {
    pub alpha: f64,
    pub tau: f64,
    pub l: Option<u32>,
    pub n_star: u32,
    pub n_trunc: u32,
    pub n_iso: u32,
    pub rule: NeighborRule,
    pub counterexample_mode: bool,
    pub points: usize,
    pub vertices: usize,
    pub edges: usize,
    /// Level at which each point enters the nets, in index order.
    pub net_order: Vec<u32>,
}

fn balls_meet(space: &FiniteMetricSpace, rule: NeighborRule, x: usize, rx: f64, y: usize, ry: f64) -> bool {
    let d = space.dist(x, y);
    if d >= rx + ry {
        return false;
    }
    match rule {
        NeighborRule::RadiusSum => true,
        NeighborRule::Witness => space.balls_meet(x, rx, y, ry),
    }
}

pub fn build_filling(nets: &NetHierarchy, params: FillingParams) -> Result<FillingGraph> {
    let alpha = nets.alpha();
    let tau = params.tau;
    if !tau.is_finite() || tau < 1.0 || (tau == 1.0 && !params.counterexample_mode) {
        return Err(Error::BadTau(tau));
    }
    let space = nets.space();
    let n_star = stabilization_level(alpha, tau, space.min_sep());
    let n_trunc = params.n_trunc.unwrap_or(n_star + 2);
    if n_trunc < n_star {
        return Err(Error::TruncationTooShallow { required: n_star });
    }
    let nets = if nets.depth() < n_trunc && !nets.is_complete() {
        nets.deepened(n_trunc)?
    } else {
        nets.clone()
    };
    let space = nets.space();
    let n_pts = space.len();

    let mut vertices = Vec::new();
    let mut level_start = Vec::with_capacity(n_trunc as usize + 2);
    let mut lookup = Vec::with_capacity(n_trunc as usize + 1);
    for n in 0..=n_trunc {
        level_start.push(vertices.len());
        let mut row = vec![usize::MAX; n_pts];
        for &p in nets.level(n)? {
            row[p] = vertices.len();
            vertices.push(Vertex::new(p, n));
        }
        lookup.push(row);
    }
    level_start.push(vertices.len());

    let mut edges = Vec::new();
    for n in 0..=n_trunc {
        let a_n = nets.level(n)?;
        let r = tau * scale(alpha, n);
        for (i, &x) in a_n.iter().enumerate() {
            for &y in &a_n[i + 1..] {
                if balls_meet(space, params.rule, x, r, y, r) {
                    edges.push(Edge {
                        a: lookup[n as usize][x],
                        b: lookup[n as usize][y],
                        kind: EdgeKind::Horizontal,
                        level: n,
                    });
                }
            }
        }
        if n == n_trunc {
            break;
        }
        let a_next = nets.level(n + 1)?;
        let (r0, r1) = (scale(alpha, n), scale(alpha, n + 1));
        for &x in a_n {
            for &y in a_next {
                if x == y || balls_meet(space, params.rule, x, r0, y, r1) {
                    edges.push(Edge {
                        a: lookup[n as usize][x],
                        b: lookup[n as usize + 1][y],
                        kind: EdgeKind::Vertical,
                        level: n,
                    });
                }
            }
        }
    }
    let mut adj = vec![Vec::new(); vertices.len()];
    for (id, e) in edges.iter().enumerate() {
        adj[e.a].push((e.b, id));
        adj[e.b].push((e.a, id));
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    Ok(FillingGraph {
        nets,
        alpha,
        tau,
        l: l_param(alpha, tau),
        n_star,
        n_trunc,
        rule: params.rule,
        counterexample_mode: params.counterexample_mode,
        vertices,
        level_start,
        lookup,
        edges,
        adj,
    })
}

impl FillingGraph {
    pub fn nets(&self) -> &NetHierarchy {
        &self.nets
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        self.nets.space()
    }

    pub fn space_arc(&self) -> Arc<FiniteMetricSpace> {
        self.nets.space_arc()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn l(&self) -> Option<u32> {
        self.l
    }

    pub fn n_star(&self) -> u32 {
        self.n_star
    }

    pub fn n_trunc(&self) -> u32 {
        self.n_trunc
    }

    pub fn rule(&self) -> NeighborRule {
        self.rule
    }

    pub fn counterexample_mode(&self) -> bool {
        self.counterexample_mode
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, id: usize) -> Vertex {
        self.vertices[id]
    }

    pub fn root(&self) -> usize {
        0
    }

    /// Vertex ids of level `n`, contiguous.
    pub fn level_range(&self, n: u32) -> std::ops::Range<usize> {
        self.level_start[n as usize]..self.level_start[n as usize + 1]
    }

    pub fn id(&self, v: Vertex) -> Result<usize> {
        self.lookup
            .get(v.level as usize)
            .and_then(|row| row.get(v.point))
            .copied()
            .filter(|&id| id != usize::MAX)
            .ok_or(Error::UnknownVertex {
                point: v.point,
                level: v.level,
            })
    }

    /// Id of `(p, n)` if it exists.
    pub fn find(&self, p: usize, n: u32) -> Option<usize> {
        self.id(Vertex::new(p, n)).ok()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    /// `(neighbor, edge id)` pairs sorted by neighbor id.
    pub fn neighbors(&self, id: usize) -> &[(usize, usize)] {
        &self.adj[id]
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search_by_key(&b, |&(n, _)| n).is_ok()
    }

    pub fn summary(&self) -> FillingSummary {
        FillingSummary {
            alpha: self.alpha,
            tau: self.tau,
            l: self.l,
            n_star: self.n_star,
            n_trunc: self.n_trunc,
            n_iso: self.nets.isolation_level(),
            rule: self.rule,
            counterexample_mode: self.counterexample_mode,
            points: self.space().len(),
            vertices: self.vertices.len(),
            edges: self.edges.len(),
            net_order: (0..self.space().len())
                .map(|p| self.nets.entry_level(p).unwrap_or(u32::MAX))
                .collect(),
        }
    }

    /// Breadth-first distances from `src` in edges; `u32::MAX` if unreachable.
    pub fn bfs(&self, src: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.vertices.len()];
        let mut queue = VecDeque::new();
        dist[src] = 0;
        queue.push_back(src);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v] + 1;
            for &(w, _) in &self.adj[v] {
                if dist[w] == u32::MAX {
                    dist[w] = dv;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// The first level at which the vertical ray through `p` becomes pendant:
    /// every `(p, m)` with `m` greater than the returned level has exactly the
    /// neighbors `(p, m - 1)` and `(p, m + 1)` (the latter absent at the
    /// truncation level).
    pub fn pendant_level(&self, p: usize) -> u32 {
        let mut m = self.n_trunc;
        loop {
            if m == 0 {
                return 0;
            }
            let id = self.lookup[m as usize][p];
            if id == usize::MAX {
                return m;
            }
            let ok = self.adj[id].iter().all(|&(w, _)| self.vertices[w].point == p);
            if !ok {
                return m;
            }
            m -= 1;
        }
    }
}

/// Edge count of a shortest path between two vertices.
pub fn graph_distance(g: &FillingGraph, v: Vertex, w: Vertex) -> Result<u32> {
    let (a, b) = (g.id(v)?, g.id(w)?);
    Ok(g.bfs(a)[b])
}

/// An exact half-integer, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct HalfInt(pub i64);

impl HalfInt {
    pub fn from_twice(t: i64) -> Self {
        HalfInt(t)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// `(v|w)` based at the root, from breadth-first distances.
pub fn gromov_product(g: &FillingGraph, v: Vertex, w: Vertex) -> Result<HalfInt> {
    let (a, b) = (g.id(v)?, g.id(w)?);
    let from_root = g.bfs(g.root());
    let from_a = g.bfs(a);
    Ok(HalfInt(
        from_root[a] as i64 + from_root[b] as i64 - from_a[b] as i64,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeStats {
    pub max_degree: usize,
    pub per_level_max: Vec<usize>,
    pub histogram: BTreeMap<usize, usize>,
}

pub fn degree_stats(g: &FillingGraph) -> DegreeStats {
    let mut per_level_max = vec![0; g.n_trunc() as usize + 1];
    let mut histogram = BTreeMap::new();
    for (id, v) in g.vertices().iter().enumerate() {
        let d = g.neighbors(id).len();
        let slot = &mut per_level_max[v.level as usize];
        *slot = (*slot).max(d);
        *histogram.entry(d).or_insert(0) += 1;
    }
    DegreeStats {
        max_degree: per_level_max.iter().cloned().max().unwrap_or(0),
        per_level_max,
        histogram,
    }
}

/// Extremes of `alpha^{-(v|w)} / (d_Z(z, y) + alpha^{-n} + alpha^{-m})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductComparison {
    pub lower_const: f64,
    pub upper_const: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Largest relative excess over either bound; 0 when none.
    pub max_violation: f64,
    pub pairs: usize,
}

/// Checks the two-sided comparison between Gromov products and the
/// distances in `Z` over all vertex pairs, with bounds `alpha^{l + 3/2}`
/// and `(alpha - 1) / (4 tau alpha)`.
pub fn product_comparison_check(g: &FillingGraph) -> Result<ProductComparison> {
    let alpha = g.alpha();
    let tau = g.tau();
    let l = g.l().ok_or(Error::BadTau(tau))?;
    let upper = alpha.powf(l as f64 + 1.5);
    let lower = (alpha - 1.0) / (4.0 * tau * alpha);
    let space = g.space();
    let n = g.vertex_count();
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = 0.0f64;
    let mut worst: Option<(f64, usize, usize, f64)> = None;
    for a in 0..n {
        let da = g.bfs(a);
        let va = g.vertex(a);
        for b in a..n {
            let vb = g.vertex(b);
            let twice = va.level as i64 + vb.level as i64 - da[b] as i64;
            let prod = alpha.powf(-(twice as f64) / 2.0);
            let denom = space.dist(va.point, vb.point) + scale(alpha, va.level) + scale(alpha, vb.level);
            let r = prod / denom;
            min_ratio = min_ratio.min(r);
            max_ratio = max_ratio.max(r);
            let excess = (r / upper - 1.0).max(lower / r - 1.0);
            if excess > BOUND_RTOL && worst.is_none_or(|w| excess > w.0) {
                worst = Some((excess, a, b, r));
            }
        }
    }
    if let Some((_, a, b, r)) = worst {
        return Err(Error::BoundViolation {
            check: "product comparison".into(),
            detail: format!(
                "ratio {r} outside [{lower}, {upper}] at {} and {}",
                g.vertex(a),
                g.vertex(b)
            ),
        });
    }
    Ok(ProductComparison {
        lower_const: lower,
        upper_const: upper,
        min_ratio,
        max_ratio,
        max_violation: 0.0,
        pairs: n * (n + 1) / 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::interval_net;
    use crate::metric::{validate_and_rescale, RawPoints};
    use crate::nets::build_nets;

    fn space(xs: &[f64]) -> Arc<FiniteMetricSpace> {
        Arc::new(
            validate_and_rescale(
                RawPoints::Coordinates(xs.iter().map(|&x| (None, vec![x])).collect()),
                0.5,
            )
            .unwrap(),
        )
    }

    fn two_point(rule: NeighborRule, n_trunc: Option<u32>) -> FillingGraph {
        let nets = build_nets(space(&[0.0, 1.0]), 2.0, 8).unwrap();
        let mut p = FillingParams::new(1.5).with_rule(rule);
        p.n_trunc = n_trunc;
        build_filling(&nets, p).unwrap()
    }

    /// Brute-force neighbor oracle following the definitions directly.
    fn oracle_adjacent(g: &FillingGraph, v: Vertex, w: Vertex) -> bool {
        let s = g.space();
        let (alpha, tau) = (g.alpha(), g.tau());
        let meet = |x: usize, rx: f64, y: usize, ry: f64| -> bool {
            match g.rule() {
                NeighborRule::RadiusSum => s.dist(x, y) < rx + ry,
                NeighborRule::Witness => (0..s.len()).any(|z| s.dist(z, x) < rx && s.dist(z, y) < ry),
            }
        };
        if v == w {
            return false;
        }
        if v.level == w.level {
            let r = tau * alpha.powi(-(v.level as i32));
            meet(v.point, r, w.point, r)
        } else if v.level.abs_diff(w.level) == 1 {
            meet(
                v.point,
                alpha.powi(-(v.level as i32)),
                w.point,
                alpha.powi(-(w.level as i32)),
            )
        } else {
            false
        }
    }

    fn assert_rules_sound(g: &FillingGraph) {
        for a in 0..g.vertex_count() {
            for b in 0..g.vertex_count() {
                assert_eq!(
                    g.are_adjacent(a, b),
                    oracle_adjacent(g, g.vertex(a), g.vertex(b)),
                    "{} vs {}",
                    g.vertex(a),
                    g.vertex(b)
                );
            }
        }
    }

    #[test]
    fn two_point_radius_sum_fixture() {
        let g = two_point(NeighborRule::RadiusSum, None);
        assert_eq!(g.n_star(), 3);
        assert_rules_sound(&g);
        let h: Vec<u32> = g
            .edges()
            .iter()
            .filter(|e| e.kind == EdgeKind::Horizontal)
            .map(|e| e.level)
            .collect();
        assert_eq!(h, vec![1, 2]);
        let a = g.find(0, 1).unwrap();
        let b = g.find(1, 2).unwrap();
        assert!(g.are_adjacent(a, b));
    }

    #[test]
    fn two_point_witness_fixture() {
        // With Z = {0, 1/2} no point of Z lies in both balls of radius
        // 3/8 at level 2, nor in B(0, 1/2) and B(1/2, 1/4).
        let g = two_point(NeighborRule::Witness, None);
        assert_rules_sound(&g);
        let h: Vec<u32> = g
            .edges()
            .iter()
            .filter(|e| e.kind == EdgeKind::Horizontal)
            .map(|e| e.level)
            .collect();
        assert_eq!(h, vec![1]);
        assert!(!g.are_adjacent(g.find(0, 1).unwrap(), g.find(1, 2).unwrap()));
    }

    #[test]
    fn two_point_distances_and_products() {
        let g = two_point(NeighborRule::RadiusSum, None);
        let (v, w) = (Vertex::new(0, 3), Vertex::new(1, 3));
        // Oracle: the only crossings are at levels 1 and 2, so the path goes
        // up to level 2, across, and back down.
        assert_eq!(graph_distance(&g, v, w).unwrap(), 3);
        assert_eq!(gromov_product(&g, v, w).unwrap(), HalfInt(3));
        let g = two_point(NeighborRule::Witness, None);
        assert_eq!(graph_distance(&g, v, w).unwrap(), 5);
        assert_eq!(gromov_product(&g, v, w).unwrap(), HalfInt(1));
    }

    #[test]
    fn root_distance_is_level() {
        let nets = build_nets(Arc::new(interval_net(9).unwrap()), 2.0, 12).unwrap();
        let g = build_filling(&nets, FillingParams::new(1.5)).unwrap();
        let d = g.bfs(0);
        for (id, v) in g.vertices().iter().enumerate() {
            assert_eq!(d[id], v.level);
        }
        assert_eq!(graph_distance(&g, Vertex::new(0, 7), Vertex::new(0, 0)).unwrap(), 7);
        assert_rules_sound(&g);
    }

    #[test]
    fn stabilized_levels_are_rays() {
        let nets = build_nets(Arc::new(interval_net(9).unwrap()), 2.0, 12).unwrap();
        let g = build_filling(&nets, FillingParams::new(3.0)).unwrap();
        for e in g.edges() {
            if e.level >= g.n_star() {
                assert_eq!(e.kind, EdgeKind::Vertical);
                assert_eq!(g.vertex(e.a).point, g.vertex(e.b).point);
            }
        }
        for p in 0..9 {
            assert!(g.pendant_level(p) <= g.n_star());
        }
    }

    #[test]
    fn single_point_is_a_ray() {
        let nets = build_nets(space(&[0.0]), 2.0, 0).unwrap();
        let g = build_filling(&nets, FillingParams::new(1.5).with_n_trunc(5)).unwrap();
        assert_eq!(g.vertex_count(), 6);
        assert!(g.edges().iter().all(|e| e.kind == EdgeKind::Vertical));
        let s = degree_stats(&g);
        assert_eq!(g.neighbors(0).len(), 1);
        assert_eq!(s.per_level_max[2], 2);
        assert_eq!(s.histogram[&2], 4);
    }

    #[test]
    fn parameters() {
        assert_eq!(l_param(2.0, 1.5), Some(1));
        assert_eq!(l_param(2.0, 3.0), Some(0));
        assert_eq!(l_param(2.0, 1.0), None);
        assert_eq!(stabilization_level(2.0, 1.5, 0.5), 3);
    }

    #[test]
    fn errors() {
        let nets = build_nets(space(&[0.0, 1.0]), 2.0, 4).unwrap();
        assert_eq!(build_filling(&nets, FillingParams::new(1.0)).unwrap_err(), Error::BadTau(1.0));
        assert!(build_filling(&nets, FillingParams::new(1.0).counterexample()).is_ok());
        assert_eq!(
            build_filling(&nets, FillingParams::new(1.5).with_n_trunc(2)).unwrap_err(),
            Error::TruncationTooShallow { required: 3 }
        );
        let g = build_filling(&nets, FillingParams::new(1.5)).unwrap();
        assert!(matches!(
            graph_distance(&g, Vertex::new(0, 99), Vertex::new(0, 0)),
            Err(Error::UnknownVertex { .. })
        ));
    }

    #[test]
    fn product_comparison_on_small_spaces() {
        for rule in [NeighborRule::Witness, NeighborRule::RadiusSum] {
            let g = two_point(rule, Some(6));
            let r = product_comparison_check(&g).unwrap();
            assert!(r.min_ratio >= r.lower_const && r.max_ratio <= r.upper_const);
        }
        let nets = build_nets(Arc::new(interval_net(17).unwrap()), 2.0, 12).unwrap();
        for tau in [1.5, 3.0] {
            let g = build_filling(&nets, FillingParams::new(tau)).unwrap();
            product_comparison_check(&g).unwrap();
        }
    }

    #[test]
    fn same_point_products() {
        let g = two_point(NeighborRule::Witness, Some(6));
        for n in 0..=6 {
            for m in n..=6 {
                let p = gromov_product(&g, Vertex::new(1, n.max(1)), Vertex::new(1, m.max(1))).unwrap();
                assert_eq!(p, HalfInt(2 * n.max(1) as i64));
            }
        }
    }

    #[test]
    fn grid_degree_is_bounded() {
        let s = Arc::new(crate::generate::grid(2, 5).unwrap());
        let shallow = build_filling(&build_nets(Arc::clone(&s), 2.0, 6).unwrap(), FillingParams::new(1.5).with_n_trunc(6)).unwrap();
        let deep = build_filling(&build_nets(s, 2.0, 10).unwrap(), FillingParams::new(1.5).with_n_trunc(10)).unwrap();
        assert_eq!(degree_stats(&shallow).max_degree, degree_stats(&deep).max_degree);
    }
}
