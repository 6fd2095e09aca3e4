//! Lifting a boundary measure to the filling.
//!
//! `muhat(z, n) = nu(B_Z(z, alpha^{-n}))`, and `mu_beta` has constant
//! density `2(e^{-beta n_v} muhat(v) + e^{-beta n_w} muhat(w))` per unit of
//! graph length on the edge `{v, w}`. On the ray below `(z, N)` the density
//! of the edge leaving level `m` is `2 w(z)(1 + e^{-beta}) e^{-beta m}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::filling::EdgeKind;
use crate::functions::GraphFunction;
use crate::metric::{doubling_constant_estimate, FiniteMetricSpace};
use crate::nets::scale;
use crate::quadrature::Rule;
use crate::uniformize::{Center, Node, UniformizedFilling};

/// Relative slack on the neighbor-mass bound.
pub const NEIGHBOR_RTOL: f64 = 1e-12;
/// Radii per boundary center in the codimension sweep.
pub const CODIM_RADII: usize = 48;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryMeasure {
    weights: Vec<f64>,
}

impl BoundaryMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::BadParams(format!("atom weight {w} is not strictly positive")));
        }
        Ok(BoundaryMeasure { weights })
    }

    /// Counting measure.
    pub fn counting(n: usize) -> Self {
        BoundaryMeasure { weights: vec![1.0; n] }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Mass of the open ball `B(x, r)`.
    pub fn ball(&self, space: &FiniteMetricSpace, x: usize, r: f64) -> f64 {
        space.ball_weight(&self.weights, x, r)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        BoundaryMeasure::new(self.weights.iter().map(|w| w * c).collect())
    }
}

#[derive(Debug, Clone)]
pub struct LiftedMeasure {
    u: Arc<UniformizedFilling>,
    nu: BoundaryMeasure,
    beta: f64,
    muhat: Vec<f64>,
    edge_density: Vec<f64>,
    /// `2 w(z)(1 + e^{-beta})`: tail density at level `m` is this times
    /// `e^{-beta m}`.
    tail_coeff: Vec<f64>,
    tail_mass: Vec<f64>,
}

/// Portion of an open ball on the filling: a union of parameter intervals
/// per edge, and per ray the covered set `[0, top) ∪ (bottom, ∞)` measured in
/// graph length below the truncation level.
#[derive(Debug, Clone, Default)]
pub struct BallCover {
    pub edges: Vec<(usize, Vec<(f64, f64)>)>,
    pub tails: Vec<(usize, f64, f64)>,
}

pub fn lift_measure(u: Arc<UniformizedFilling>, nu: BoundaryMeasure, beta: f64) -> Result<LiftedMeasure> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::BadBeta(beta));
    }
    let g = u.graph();
    if nu.weights.len() != g.space().len() {
        return Err(Error::BadParams(format!(
            "{} atoms for {} points",
            nu.weights.len(),
            g.space().len()
        )));
    }
    let alpha = g.alpha();
    let muhat: Vec<f64> = g
        .vertices()
        .iter()
        .map(|v| nu.ball(g.space(), v.point, scale(alpha, v.level)))
        .collect();
    let weight = |id: usize| (-beta * g.vertex(id).level as f64).exp() * muhat[id];
    let edge_density = g.edges().iter().map(|e| 2.0 * (weight(e.a) + weight(e.b))).collect();
    let tail_coeff: Vec<f64> = nu.weights.iter().map(|w| 2.0 * w * (1.0 + (-beta).exp())).collect();
    let n = g.n_trunc() as f64;
    let tail_mass = tail_coeff
        .iter()
        .map(|c| c * (-beta * n).exp() / -(-beta).exp_m1())
        .collect();
    Ok(LiftedMeasure {
        u,
        nu,
        beta,
        muhat,
        edge_density,
        tail_coeff,
        tail_mass,
    })
}

/// Total length of a union of intervals.
fn union_length(mut iv: Vec<(f64, f64)>) -> f64 {
    iv.retain(|(a, b)| b > a);
    iv.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (a, b) in iv {
        match cur {
            Some((ca, cb)) if a <= cb => cur = Some((ca, cb.max(b))),
            Some((ca, cb)) => {
                total += cb - ca;
                cur = Some((a, b));
            }
            None => cur = Some((a, b)),
        }
    }
    if let Some((a, b)) = cur {
        total += b - a;
    }
    total
}

/// Merged, sorted version of a union of intervals.
pub fn merge_intervals(mut iv: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    iv.retain(|(a, b)| b > a);
    iv.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in iv {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// `int_{t0}^{t1} f(u(t)) dt` on edge `e`, where `u` is linear in
/// uniformized arc length from `ua` at the first endpoint to `ub` at the
/// second. The range is split at the midpoint of horizontal edges and where
/// `u` crosses `kink`.
pub fn integrate_on_edge(
    u: &UniformizedFilling,
    rule: &Rule,
    e: usize,
    (ua, ub): (f64, f64),
    (t0, t1): (f64, f64),
    kink: Option<f64>,
    f: impl Fn(f64) -> f64,
) -> f64 {
    if t1 <= t0 {
        return 0.0;
    }
    let len = u.edge_len(e);
    let value = |t: f64| ua + (ub - ua) * u.arc_from_a(e, t) / len;
    let mut cuts = vec![t0, t1];
    if u.graph().edge(e).kind == EdgeKind::Horizontal && t0 < 0.5 && 0.5 < t1 {
        cuts.push(0.5);
    }
    if let Some(c) = kink {
        if (ua - c) * (ub - c) < 0.0 {
            let tc = u.param_from_a(e, len * (c - ua) / (ub - ua));
            if t0 < tc && tc < t1 {
                cuts.push(tc);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2).map(|w| rule.integrate(w[0], w[1], |t| f(value(t)))).sum()
}

impl LiftedMeasure {
    pub fn uniformized(&self) -> &UniformizedFilling {
        &self.u
    }

    pub fn uniformized_arc(&self) -> Arc<UniformizedFilling> {
        Arc::clone(&self.u)
    }

    pub fn nu(&self) -> &BoundaryMeasure {
        &self.nu
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn muhat(&self) -> &[f64] {
        &self.muhat
    }

    pub fn edge_density(&self) -> &[f64] {
        &self.edge_density
    }

    pub fn tail_mass(&self) -> &[f64] {
        &self.tail_mass
    }

    pub fn tail_coeff(&self) -> &[f64] {
        &self.tail_coeff
    }

    /// Edge masses in edge order, then tails.
    pub fn total(&self) -> f64 {
        self.edge_density.iter().sum::<f64>() + self.tail_mass.iter().sum::<f64>()
    }

    /// Total mass accumulated vertex by vertex: each vertex contributes its
    /// weight once per incident edge.
    pub fn total_by_vertices(&self) -> f64 {
        let g = self.u.graph();
        let mut sum = 0.0;
        for id in (0..g.vertex_count()).rev() {
            let w = (-self.beta * g.vertex(id).level as f64).exp() * self.muhat[id];
            sum += 2.0 * w * g.neighbors(id).len() as f64;
        }
        for p in (0..self.tail_mass.len()).rev() {
            sum += self.tail_mass[p];
        }
        sum
    }

    /// Mass of the first `t` units of graph length of the ray of point `p`
    /// below the truncation level.
    pub fn tail_partial(&self, p: usize, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if !t.is_finite() {
            return self.tail_mass[p];
        }
        let b = self.beta;
        let k = t.floor();
        let n = self.u.graph().n_trunc() as f64;
        let head = -(-b * k).exp_m1() / -(-b).exp_m1();
        (self.tail_coeff[p] * (-b * n).exp() * (head + (-b * k).exp() * (t - k))).min(self.tail_mass[p])
    }

    /// The part of the open ball of radius `r` around `c`, given Dijkstra
    /// distances from `c`.
    pub fn cover(&self, c: Center, dist: &[f64], r: f64) -> BallCover {
        let u = &*self.u;
        let g = u.graph();
        let nv = g.vertex_count();
        let mut cover = BallCover::default();
        for (e, edge) in g.edges().iter().enumerate() {
            let (da, db) = (dist[edge.a], dist[edge.b]);
            let mut iv = Vec::new();
            if r > da {
                iv.push((0.0, u.param_from_a(e, r - da)));
            }
            if r > db {
                iv.push((u.param_from_b(e, r - db), 1.0));
            }
            if let Center::OnEdge { edge: ce, t } = c {
                if ce == e {
                    let s = u.arc_from_a(e, t);
                    iv.push((u.param_from_a(e, s - r), u.param_from_a(e, s + r)));
                }
            }
            let iv = merge_intervals(iv);
            if !iv.is_empty() {
                cover.edges.push((e, iv));
            }
        }
        let eps = u.eps();
        let n = g.n_trunc();
        let tail = u.tail_len();
        for p in 0..g.space().len() {
            let top = g.find(p, n).expect("every point has a ray");
            let (dt, dbn) = (dist[top], dist[nv + p]);
            let t_top = if r > dt {
                let s = r - dt;
                if s >= tail {
                    f64::INFINITY
                } else {
                    -(-(eps * s * (eps * n as f64).exp())).ln_1p() / eps
                }
            } else {
                0.0
            };
            let t_bot = if r > dbn {
                let s = r - dbn;
                if s >= tail {
                    0.0
                } else {
                    (-(eps * s).ln() / eps - n as f64).max(0.0)
                }
            } else {
                f64::INFINITY
            };
            if t_top > 0.0 || t_bot.is_finite() {
                cover.tails.push((p, t_top, t_bot));
            }
        }
        cover
    }

    pub fn cover_mass(&self, cover: &BallCover) -> f64 {
        let edges: f64 = cover
            .edges
            .iter()
            .map(|(e, iv)| self.edge_density[*e] * union_length(iv.clone()))
            .sum();
        let tails: f64 = cover
            .tails
            .iter()
            .map(|&(p, top, bot)| {
                if top >= bot {
                    self.tail_mass[p]
                } else {
                    self.tail_partial(p, top) + self.tail_mass[p] - self.tail_partial(p, bot)
                }
            })
            .sum();
        edges + tails
    }

    /// `mu_beta(B_eps(c, r))` on the infinite filling.
    pub fn ball_measure(&self, c: Center, r: f64) -> Result<f64> {
        let dist = self.u.distances_from(c)?;
        Ok(self.cover_mass(&self.cover(c, &dist, r)))
    }

    pub fn dump(&self) -> MeasureDump {
        let g = self.u.graph();
        MeasureDump {
            beta: self.beta,
            muhat: g
                .vertices()
                .iter()
                .zip(&self.muhat)
                .map(|(v, m)| (v.point, v.level, *m))
                .collect(),
            edge_density: g
                .edges()
                .iter()
                .zip(&self.edge_density)
                .map(|(e, d)| {
                    let (a, b) = (g.vertex(e.a), g.vertex(e.b));
                    ((a.point, a.level), (b.point, b.level), *d)
                })
                .collect(),
            tail_mass: self.tail_mass.clone(),
            total: self.total(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureDump {
    pub beta: f64,
    pub muhat: Vec<(usize, u32, f64)>,
    pub edge_density: Vec<((usize, u32), (usize, u32), f64)>,
    pub tail_mass: Vec<f64>,
    pub total: f64,
}

/// Smallest `N` with `2^N >= alpha(1 + tau) + tau`.
pub fn neighbor_exponent(alpha: f64, tau: f64) -> u32 {
    let target = alpha * (1.0 + tau) + tau;
    let mut n = 0;
    while 2f64.powi(n as i32) < target {
        n += 1;
    }
    n
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    pub beta: f64,
    pub eps: f64,
    pub seed: u64,
    pub samples: usize,
    pub doubling_constant: f64,
    pub neighbor_exponent: u32,
    pub neighbor_bound: f64,
    pub neighbor_max_ratio: f64,
    pub neighbor_mass_bound_ok: bool,
    pub doubling_max: f64,
    pub doubling_balls: usize,
    pub radius_range: (f64, f64),
    pub codim_ratio_range: (f64, f64),
    pub codim_k: f64,
    pub codim_balls: usize,
    pub s_nu: f64,
    pub eta: f64,
    pub s_beta_target: f64,
    pub s_beta_observed: f64,
    pub total_mass: f64,
    pub total_mass_alt: f64,
}

/// Ball centers used by the sweeps: every boundary node and every vertex up
/// to the stabilization level. Neither set, nor the radius range, depends on
/// the truncation level.
fn sweep_centers(u: &UniformizedFilling) -> Vec<Node> {
    let g = u.graph();
    let mut c: Vec<Node> = (0..g.space().len()).map(Node::Boundary).collect();
    c.extend((0..g.vertex_count()).filter(|&i| g.vertex(i).level <= g.n_star()).map(Node::Vertex));
    c
}

fn radius_range(u: &UniformizedFilling) -> (f64, f64) {
    let g = u.graph();
    let ns = g.n_star();
    let min_edge = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.level <= ns)
        .map(|(i, _)| u.edge_len(i))
        .fold(u.whitney(ns + 1) * -(-u.eps()).exp_m1(), f64::min);
    let nv = g.vertex_count();
    let diam = (0..g.space().len())
        .map(|p| {
            let d = u.dijkstra(&[(nv + p, 0.0)]);
            (0..u.node_count())
                .filter(|&i| i >= nv || g.vertex(i).level <= ns)
                .map(|i| d[i])
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    (min_edge / 4.0, 2.0 * diam)
}

/// Runs the measure checks. The neighbor-mass bound is a hard assertion;
/// everything else is reported.
pub fn verify_measure(m: &LiftedMeasure, samples: usize, seed: u64) -> Result<MeasureReport> {
    let u = m.uniformized();
    let g = u.graph();
    let space = g.space();
    let (eps, beta) = (u.eps(), m.beta());

    let c_d = doubling_constant_estimate(space, m.nu().weights(), samples, seed)?;
    let n_exp = neighbor_exponent(g.alpha(), g.tau());
    let bound = c_d.powi(n_exp as i32);
    let mut worst = 1.0f64;
    for e in g.edges() {
        let (a, b) = (m.muhat[e.a], m.muhat[e.b]);
        let ratio = (a / b).max(b / a);
        if ratio > bound * (1.0 + NEIGHBOR_RTOL) {
            let (va, vb) = (g.vertex(e.a), g.vertex(e.b));
            return Err(Error::NeighborMassViolation {
                edge: ((va.point, va.level), (vb.point, vb.level)),
                ratio,
                bound,
            });
        }
        worst = worst.max(ratio);
    }

    let (r_lo, r_hi) = radius_range(u);
    let (ln_lo, ln_hi) = (r_lo.ln(), r_hi.ln());
    let centers = sweep_centers(u);

    // Doubling: seeded (center, radius) draws, grouped per center so each
    // center needs one Dijkstra run.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws: Vec<Vec<f64>> = vec![Vec::new(); centers.len()];
    for _ in 0..samples {
        let c = rng.gen_range(0..centers.len());
        draws[c].push(rng.gen_range(ln_lo..=ln_hi).exp());
    }
    // Nested pairs r' = r 2^{-j} for the growth exponents.
    let mut nested: Vec<Vec<(f64, i32)>> = vec![Vec::new(); centers.len()];
    for _ in 0..samples {
        let c = rng.gen_range(0..centers.len());
        nested[c].push((rng.gen_range(ln_lo..=ln_hi).exp(), rng.gen_range(1..=4)));
    }
    let per_center: Vec<(f64, f64)> = centers
        .par_iter()
        .enumerate()
        .map(|(i, &c)| {
            let c = Center::Node(c);
            let dist = u.distances_from(c).expect("sweep center exists");
            let ball = |r: f64| m.cover_mass(&m.cover(c, &dist, r));
            let dmax = draws[i].iter().map(|&r| ball(2.0 * r) / ball(r)).fold(0.0, f64::max);
            let smax = nested[i]
                .iter()
                .map(|&(r, j)| {
                    let small = r * 2f64.powi(-j);
                    (ball(r) / ball(small)).ln() / (j as f64 * 2f64.ln())
                })
                .fold(0.0, f64::max);
            (dmax, smax)
        })
        .collect();
    let doubling_max = per_center.iter().map(|x| x.0).fold(0.0, f64::max);
    let s_beta_observed = per_center.iter().map(|x| x.1).fold(0.0, f64::max);
    if !doubling_max.is_finite() {
        return Err(Error::BoundViolation {
            check: "doubling".into(),
            detail: format!("ratio {doubling_max}"),
        });
    }

    // Codimension band on a fixed log grid of radii per boundary point.
    let sigma = u.sigma();
    let np = space.len();
    let grid: Vec<f64> = (0..CODIM_RADII)
        .map(|k| (ln_lo + (ln_hi - ln_lo) * k as f64 / (CODIM_RADII - 1) as f64).exp())
        .collect();
    let bands: Vec<(f64, f64)> = (0..np)
        .into_par_iter()
        .map(|p| {
            let c = Center::Node(Node::Boundary(p));
            let dist = u.distances_from(c).expect("boundary node exists");
            grid.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| {
                let mass = m.cover_mass(&m.cover(c, &dist, r));
                let er = eps * r;
                let model = er.powf(beta / eps) * m.nu().ball(space, p, er.powf(1.0 / sigma));
                let q = mass / model;
                (lo.min(q), hi.max(q))
            })
        })
        .collect();
    let codim_ratio_range = bands
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &(a, b)| (lo.min(a), hi.max(b)));
    let codim_k = codim_ratio_range.1.max(1.0 / codim_ratio_range.0);

    // Growth exponents of nu on Z.
    let (s_nu, eta) = if np == 1 {
        (0.0, 0.0)
    } else {
        let (zlo, zhi) = ((space.min_sep() / 2.0).ln(), (2.0 * space.diam()).ln());
        let mut s_nu = 0.0f64;
        let mut eta = f64::INFINITY;
        for _ in 0..samples {
            let x = rng.gen_range(0..np);
            let r = rng.gen_range(zlo..=zhi).exp();
            let j = rng.gen_range(1..=4);
            let small = r * 2f64.powi(-j);
            let q = (m.nu().ball(space, x, r) / m.nu().ball(space, x, small)).ln() / (j as f64 * 2f64.ln());
            s_nu = s_nu.max(q);
            if r <= space.diam() {
                eta = eta.min(q);
            }
        }
        (s_nu, if eta.is_finite() { eta } else { 0.0 })
    };

    Ok(MeasureReport {
        beta,
        eps,
        seed,
        samples,
        doubling_constant: c_d,
        neighbor_exponent: n_exp,
        neighbor_bound: bound,
        neighbor_max_ratio: worst,
        neighbor_mass_bound_ok: true,
        doubling_max,
        doubling_balls: samples,
        radius_range: (r_lo, r_hi),
        codim_ratio_range,
        codim_k,
        codim_balls: np * CODIM_RADII,
        s_nu,
        eta,
        s_beta_target: 1f64.max(beta / eps + s_nu),
        s_beta_observed,
        total_mass: m.total(),
        total_mass_alt: m.total_by_vertices(),
    })
}

/// Largest observed `int_B |u - u_B| dmu / (r int_B g dmu)` over the given
/// functions and balls. Each supplied gradient must be the exact per-edge
/// `|u(v) - u(w)| / len`.
pub fn poincare_ratio(
    m: &LiftedMeasure,
    functions: &[(GraphFunction, Vec<f64>)],
    balls: &[(Center, f64)],
) -> Result<f64> {
    let u = m.uniformized();
    let g = u.graph();
    for (f, grad) in functions {
        if grad.len() != g.edges().len() {
            return Err(Error::BadParams(format!("{} gradients for {} edges", grad.len(), g.edges().len())));
        }
        for (e, edge) in g.edges().iter().enumerate() {
            let exact = (f.values()[edge.a] - f.values()[edge.b]).abs() / u.edge_len(e);
            if (grad[e] - exact).abs() > 1e-12 * exact.max(1e-300) && (grad[e] - exact).abs() > 1e-15 {
                return Err(Error::GradientMismatch { edge: e, supplied: grad[e], exact });
            }
        }
    }
    let rule = Rule::new(16);
    let covers: Vec<(BallCover, f64)> = balls
        .iter()
        .map(|&(c, r)| Ok((m.cover(c, &u.distances_from(c)?, r), r)))
        .collect::<Result<_>>()?;
    let mut best = 0.0f64;
    for (f, grad) in functions {
        let vals = f.values();
        for (cover, r) in &covers {
            let mass = m.cover_mass(cover);
            if mass <= 0.0 {
                continue;
            }
            let integral = |kink: Option<f64>, h: &dyn Fn(f64) -> f64| -> f64 {
                let mut s = 0.0;
                for (e, iv) in &cover.edges {
                    let edge = g.edge(*e);
                    for &(t0, t1) in iv {
                        s += m.edge_density[*e]
                            * integrate_on_edge(u, &rule, *e, (vals[edge.a], vals[edge.b]), (t0, t1), kink, h);
                    }
                }
                for &(p, top, bot) in &cover.tails {
                    let covered = if top >= bot {
                        m.tail_mass[p]
                    } else {
                        m.tail_partial(p, top) + m.tail_mass[p] - m.tail_partial(p, bot)
                    };
                    let top_id = g.find(p, g.n_trunc()).expect("ray exists");
                    s += covered * h(vals[top_id]);
                }
                s
            };
            let mean = integral(None, &|x| x) / mass;
            let num = integral(Some(mean), &|x| (x - mean).abs());
            let den: f64 = cover
                .edges
                .iter()
                .map(|(e, iv)| grad[*e] * m.edge_density[*e] * union_length(iv.clone()))
                .sum::<f64>()
                * r;
            if num <= 1e-14 * mass * vals.iter().fold(0.0f64, |a, v| a.max(v.abs())) {
                continue;
            }
            best = best.max(num / den);
        }
    }
    if !best.is_finite() {
        return Err(Error::BoundViolation {
            check: "poincare".into(),
            detail: format!("ratio {best}"),
        });
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filling::{build_filling, FillingParams};
    use crate::generate::{grid, interval_net};
    use crate::metric::{validate_and_rescale, RawPoints};
    use crate::nets::build_nets;
    use crate::uniformize::uniformize;
    use approx::assert_relative_eq;

    fn lifted(space: FiniteMetricSpace, tau: f64, n_trunc: Option<u32>, weights: Option<Vec<f64>>, beta: f64) -> LiftedMeasure {
        let n = space.len();
        let nets = build_nets(Arc::new(space), 2.0, 12).unwrap();
        let mut p = FillingParams::new(tau);
        p.n_trunc = n_trunc;
        let g = Arc::new(build_filling(&nets, p).unwrap());
        let u = Arc::new(uniformize(g, 2f64.ln(), false).unwrap());
        let nu = BoundaryMeasure::new(weights.unwrap_or_else(|| vec![1.0 / n as f64; n])).unwrap();
        lift_measure(u, nu, beta).unwrap()
    }

    fn line(xs: &[f64]) -> FiniteMetricSpace {
        validate_and_rescale(RawPoints::Coordinates(xs.iter().map(|&x| (None, vec![x])).collect()), 0.5).unwrap()
    }

    #[test]
    fn two_point_fixture_values() {
        let m = lifted(line(&[0.0, 1.0]), 1.5, Some(6), None, 2f64.ln());
        let g = m.uniformized().graph();
        assert_eq!(m.muhat()[g.root()], 1.0);
        let v = g.find(0, 1).unwrap();
        assert_eq!(m.muhat()[v], 0.5);
        assert_relative_eq!(m.tail_mass()[0], 3.0 / 64.0, max_relative = 1e-14);
    }

    #[test]
    fn muhat_monotone_and_stable() {
        let space = interval_net(17).unwrap();
        let n_iso = crate::nets::isolation_level(2.0, space.min_sep());
        let m = lifted(space, 1.5, None, None, 0.5);
        let g = m.uniformized().graph();
        for p in 0..g.space().len() {
            let mut prev = f64::INFINITY;
            for n in 0..=g.n_trunc() {
                if let Some(id) = g.find(p, n) {
                    assert!(m.muhat()[id] <= prev);
                    prev = m.muhat()[id];
                    if n >= n_iso {
                        assert_eq!(m.muhat()[id], m.nu().weights()[p]);
                    }
                }
            }
        }
    }

    #[test]
    fn totals_agree() {
        let m = lifted(grid(2, 5).unwrap(), 1.5, None, None, 0.7);
        assert_relative_eq!(m.total(), m.total_by_vertices(), max_relative = 1e-12);
        let dist = m.uniformized().distances_from(Center::Node(Node::Vertex(0))).unwrap();
        let big = m.cover_mass(&m.cover(Center::Node(Node::Vertex(0)), &dist, 10.0));
        assert_relative_eq!(big, m.total(), max_relative = 1e-12);
    }

    #[test]
    fn tail_partial_matches_summed_edges() {
        let m = lifted(line(&[0.0, 1.0]), 1.5, Some(6), None, 0.9);
        let b = 0.9f64;
        let c = m.tail_coeff()[0];
        let mut sum = 0.0;
        for k in 0..5 {
            sum += c * (-b * (6 + k) as f64).exp();
        }
        let partial = sum + 0.25 * c * (-b * 11.0).exp();
        assert_relative_eq!(m.tail_partial(0, 5.25), partial, max_relative = 1e-13);
        assert_relative_eq!(m.tail_partial(0, 1e9), m.tail_mass()[0], max_relative = 1e-15);
    }

    #[test]
    fn small_ball_inside_an_edge() {
        let m = lifted(line(&[0.0, 1.0]), 1.5, Some(6), None, 0.7);
        let u = m.uniformized();
        let e = 0;
        let len = u.edge_len(e);
        let c = Center::OnEdge { edge: e, t: 0.5 };
        let s = u.arc_from_a(e, 0.5);
        let r = 0.1 * len;
        let want = m.edge_density()[e] * (u.param_from_a(e, s + r) - u.param_from_a(e, s - r));
        assert_relative_eq!(m.ball_measure(c, r).unwrap(), want, max_relative = 1e-13);
    }

    #[test]
    fn ball_measure_monotone_and_continuous() {
        let m = lifted(interval_net(9).unwrap(), 1.5, None, None, 0.6);
        let u = m.uniformized();
        for c in [Center::Node(Node::Boundary(3)), Center::Node(Node::Vertex(5)), Center::OnEdge { edge: 7, t: 0.3 }] {
            let dist = u.distances_from(c).unwrap();
            let mut prev = 0.0;
            for k in 1..2000 {
                let r = k as f64 * 1.5e-3;
                let b = m.cover_mass(&m.cover(c, &dist, r));
                assert!(b >= prev, "{c:?} r {r}: {b} < {prev}");
                let h = 1e-9;
                let b2 = m.cover_mass(&m.cover(c, &dist, r + h));
                assert!(b2 - b < 1e-5, "jump {} at r {r}", b2 - b);
                prev = b;
            }
        }
    }

    #[test]
    fn single_point_doubling_is_finite() {
        let m = lifted(line(&[0.0]), 1.5, Some(5), None, 0.5);
        let r = verify_measure(&m, 500, 1).unwrap();
        assert!(r.doubling_max.is_finite() && r.doubling_max >= 1.0);
    }

    #[test]
    fn neighbor_exponent_example() {
        assert_eq!(neighbor_exponent(2.0, 1.5), 3);
    }

    #[test]
    fn doubling_invariant_under_atom_scaling() {
        let w: Vec<f64> = (0..9).map(|i| 1.0 + i as f64 / 4.0).collect();
        let a = lifted(interval_net(9).unwrap(), 1.5, None, Some(w.clone()), 0.6);
        let b = lifted(interval_net(9).unwrap(), 1.5, None, Some(w.iter().map(|x| x * 7.0).collect()), 0.6);
        let (ra, rb) = (verify_measure(&a, 400, 3).unwrap(), verify_measure(&b, 400, 3).unwrap());
        assert_relative_eq!(ra.doubling_max, rb.doubling_max, max_relative = 1e-12);
        assert_relative_eq!(ra.codim_ratio_range.0, rb.codim_ratio_range.0, max_relative = 1e-12);
    }

    #[test]
    fn grid_codimension_band_is_bounded_and_depth_stable() {
        let beta = 2f64.ln() * 2.0 * 0.5;
        let a = lifted(grid(2, 5).unwrap(), 1.5, None, None, beta);
        let n = a.uniformized().graph().n_trunc();
        let b = lifted(grid(2, 5).unwrap(), 1.5, Some(n + 2), None, beta);
        let (ra, rb) = (verify_measure(&a, 600, 9).unwrap(), verify_measure(&b, 600, 9).unwrap());
        assert!(ra.codim_k.is_finite());
        assert_relative_eq!(ra.codim_ratio_range.0, rb.codim_ratio_range.0, max_relative = 1e-9);
        assert_relative_eq!(ra.codim_ratio_range.1, rb.codim_ratio_range.1, max_relative = 1e-9);
        assert_relative_eq!(ra.doubling_max, rb.doubling_max, max_relative = 1e-9);
        assert!(ra.neighbor_max_ratio <= ra.neighbor_bound);
    }

    #[test]
    fn poincare_constant_and_single_edge() {
        let m = lifted(line(&[0.0, 1.0]), 1.5, Some(6), None, 0.7);
        let u = m.uniformized();
        let g = u.graph();
        let nvals = g.vertex_count();
        let grad0 = vec![0.0; g.edges().len()];
        let constant = GraphFunction::new(vec![2.5; nvals]);
        let balls = [(Center::Node(Node::Vertex(0)), 0.5), (Center::OnEdge { edge: 0, t: 0.5 }, 0.1)];
        assert_eq!(poincare_ratio(&m, &[(constant, grad0)], &balls).unwrap(), 0.0);

        // u linear in arc length along edge 0, ball strictly inside it: the
        // ratio is the weighted 1-D quantity for the segment.
        let e = 0;
        let edge = g.edge(e);
        let mut vals = vec![0.0; nvals];
        vals[edge.b] = 1.0;
        // Make u constant off the edge's second endpoint side.
        for (id, v) in vals.iter_mut().enumerate() {
            if id != edge.a && id != edge.b {
                *v = 1.0;
            }
        }
        let f = GraphFunction::new(vals.clone());
        let grad: Vec<f64> = g
            .edges()
            .iter()
            .enumerate()
            .map(|(i, ed)| (vals[ed.a] - vals[ed.b]).abs() / u.edge_len(i))
            .collect();
        let len = u.edge_len(e);
        let s = u.arc_from_a(e, 0.5);
        let r = 0.1 * len;
        let got = poincare_ratio(&m, &[(f, grad)], &[(Center::OnEdge { edge: e, t: 0.5 }, r)]).unwrap();
        // Oracle: fine midpoint rule in the graph parameter.
        let (t0, t1) = (u.param_from_a(e, s - r), u.param_from_a(e, s + r));
        let k = 200_000;
        let h = (t1 - t0) / k as f64;
        let pts: Vec<f64> = (0..k).map(|i| u.arc_from_a(e, t0 + (i as f64 + 0.5) * h) / len).collect();
        let mean = pts.iter().sum::<f64>() / k as f64;
        let dev = pts.iter().map(|x| (x - mean).abs()).sum::<f64>() / k as f64;
        let want = dev / (r / len);
        assert_relative_eq!(got, want, max_relative = 1e-6);
    }

    #[test]
    fn gradient_mismatch_is_rejected() {
        let m = lifted(line(&[0.0, 1.0]), 1.5, Some(4), None, 0.7);
        let g = m.uniformized().graph();
        let f = GraphFunction::new((0..g.vertex_count()).map(|i| i as f64).collect());
        let grad = vec![0.0; g.edges().len()];
        assert!(matches!(
            poincare_ratio(&m, &[(f, grad)], &[(Center::Node(Node::Vertex(0)), 0.1)]),
            Err(Error::GradientMismatch { .. })
        ));
    }
}
