//! Besov seminorms on the boundary, Newtonian norms on the uniformized
//! filling, and the trace and extension operators between them.
//!
//! Graph functions are linear in uniformized arc length on every edge and
//! constant along each ray below the truncation level, so their minimal
//! upper gradient is constant per edge and vanishes on the tails.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::filling::FillingGraph;
use crate::measure::{integrate_on_edge, BoundaryMeasure, LiftedMeasure};
use crate::metric::FiniteMetricSpace;
use crate::nets::{scale, NetHierarchy};
use crate::quadrature::Rule;

pub const ROUND_TRIP_TOL: f64 = 1e-9;
pub const DEFAULT_ORDER: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFunction {
    values: Vec<f64>,
}

impl BoundaryFunction {
    pub fn new(values: Vec<f64>) -> Self {
        BoundaryFunction { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        BoundaryFunction::new(self.values.iter().map(|v| v * c).collect())
    }
}

/// Values on the truncated vertices, indexed by vertex id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFunction {
    values: Vec<f64>,
}

impl GraphFunction {
    pub fn new(values: Vec<f64>) -> Self {
        GraphFunction { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value along the ray of `p`, which is also its boundary value.
    pub fn ray_value(&self, g: &FillingGraph, p: usize) -> f64 {
        self.values[g.find(p, g.n_trunc()).expect("every point has a ray")]
    }

    /// `|u(v) - u(w)| / len(e)` for every edge.
    pub fn gradient(&self, lengths: &[f64], g: &FillingGraph) -> Vec<f64> {
        g.edges()
            .iter()
            .zip(lengths)
            .map(|(e, len)| (self.values[e.a] - self.values[e.b]).abs() / len)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BesovMethod {
    Direct,
    Dyadic,
}

/// `||f||_{theta,p}^p`. The direct form sums over ordered pairs of distinct
/// points; the dyadic form sums the ball averages at scales `alpha^{-n}`
/// below the isolation level (all later terms vanish).
pub fn besov_energy(
    space: &FiniteMetricSpace,
    f: &BoundaryFunction,
    nu: &BoundaryMeasure,
    theta: f64,
    p: f64,
    method: BesovMethod,
    alpha: f64,
) -> f64 {
    let w = nu.weights();
    let v = f.values();
    let n = space.len();
    match method {
        BesovMethod::Direct => (0..n)
            .map(|z| {
                (0..n)
                    .filter(|&x| x != z)
                    .map(|x| {
                        let d = space.dist(z, x);
                        w[z] * w[x] * (v[z] - v[x]).abs().powf(p) / (d.powf(p * theta) * nu.ball(space, z, d))
                    })
                    .sum::<f64>()
            })
            .sum(),
        BesovMethod::Dyadic => {
            let n_iso = crate::nets::isolation_level(alpha, space.min_sep());
            dyadic_terms(space, f, nu, theta, p, alpha, n_iso).iter().sum()
        }
    }
}

/// The first `levels` terms of the dyadic form.
pub fn dyadic_terms(
    space: &FiniteMetricSpace,
    f: &BoundaryFunction,
    nu: &BoundaryMeasure,
    theta: f64,
    p: f64,
    alpha: f64,
    levels: u32,
) -> Vec<f64> {
    let w = nu.weights();
    let v = f.values();
    (0..levels)
        .map(|k| {
            let r = scale(alpha, k);
            (0..space.len())
                .map(|z| {
                    let ball = space.ball(z, r);
                    let mass: f64 = ball.iter().map(|&x| w[x]).sum();
                    let s: f64 = ball.iter().map(|&x| w[x] * (v[z] - v[x]).abs().powf(p)).sum();
                    w[z] * s / mass
                })
                .sum::<f64>()
                / r.powf(theta * p)
        })
        .collect()
}

/// `||f||_{theta,p}`.
pub fn besov_seminorm(
    space: &FiniteMetricSpace,
    f: &BoundaryFunction,
    nu: &BoundaryMeasure,
    theta: f64,
    p: f64,
    method: BesovMethod,
    alpha: f64,
) -> f64 {
    besov_energy(space, f, nu, theta, p, method, alpha).powf(1.0 / p)
}

/// `||f||_{L^p(nu)}^p`.
pub fn lp_boundary(f: &BoundaryFunction, nu: &BoundaryMeasure, p: f64) -> f64 {
    f.values().iter().zip(nu.weights()).map(|(v, w)| w * v.abs().powf(p)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NewtonianNorm {
    pub gradient_energy: f64,
    pub lp: f64,
    pub norm: f64,
}

pub fn newtonian_norm(u: &GraphFunction, m: &LiftedMeasure, p: f64) -> NewtonianNorm {
    newtonian_norm_with_order(u, m, p, DEFAULT_ORDER)
}

/// As [`newtonian_norm`] with a Gauss–Legendre rule of the given order on
/// each smooth piece of every edge.
pub fn newtonian_norm_with_order(u: &GraphFunction, m: &LiftedMeasure, p: f64, order: usize) -> NewtonianNorm {
    let uf = m.uniformized();
    let g = uf.graph();
    let rule = Rule::new(order);
    let vals = u.values();
    let density = m.edge_density();
    let mut gradient_energy = 0.0;
    let mut lp = 0.0;
    for (e, edge) in g.edges().iter().enumerate() {
        let (a, b) = (vals[edge.a], vals[edge.b]);
        let grad = (a - b).abs() / uf.edge_len(e);
        gradient_energy += grad.powf(p) * density[e];
        lp += density[e] * integrate_on_edge(uf, &rule, e, (a, b), (0.0, 1.0), Some(0.0), |x| x.abs().powf(p));
    }
    for (q, tail) in m.tail_mass().iter().enumerate() {
        lp += u.ray_value(g, q).abs().powf(p) * tail;
    }
    NewtonianNorm {
        gradient_energy,
        lp,
        norm: (lp + gradient_energy).powf(1.0 / p),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub trace: BoundaryFunction,
    /// `u_n(zeta)` for `n = 0..=N_trunc`, per boundary point.
    pub sequence: Vec<Vec<f64>>,
}

/// Net averages `u_n(zeta)` over `A_n ∩ B(zeta, alpha^{-n})` and the limit,
/// which is the ray value.
pub fn trace(u: &GraphFunction, g: &FillingGraph) -> Result<Trace> {
    if u.values().len() != g.vertex_count() {
        return Err(Error::BadParams(format!("{} values for {} vertices", u.values().len(), g.vertex_count())));
    }
    let nets: &NetHierarchy = g.nets();
    let space = g.space();
    let alpha = g.alpha();
    let sequence = (0..space.len())
        .map(|zeta| {
            (0..=g.n_trunc())
                .map(|n| {
                    let r = scale(alpha, n);
                    let (mut s, mut k) = (0.0, 0usize);
                    for &z in nets.level(n).expect("filling nets reach truncation") {
                        if space.dist(zeta, z) < r {
                            s += u.values()[g.find(z, n).expect("net vertex")];
                            k += 1;
                        }
                    }
                    s / k as f64
                })
                .collect()
        })
        .collect();
    let trace = BoundaryFunction::new((0..space.len()).map(|p| u.ray_value(g, p)).collect());
    Ok(Trace { trace, sequence })
}

/// `Ef(z, n)`, the `nu`-average of `f` over `B_Z(z, alpha^{-n})`.
pub fn extend(f: &BoundaryFunction, g: &FillingGraph, nu: &BoundaryMeasure) -> GraphFunction {
    let space = g.space();
    let w = nu.weights();
    let values = g
        .vertices()
        .iter()
        .map(|v| {
            let ball = space.ball(v.point, scale(g.alpha(), v.level));
            let mass: f64 = ball.iter().map(|&x| w[x]).sum();
            ball.iter().map(|&x| w[x] * f.values()[x]).sum::<f64>() / mass
        })
        .collect();
    GraphFunction::new(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    /// i.i.d. uniform on `[-1, 1]`.
    Uniform,
    /// `d(z, anchor)^exponent`.
    Smooth { anchor: usize, exponent: f64 },
}

pub fn random_boundary_function(space: &FiniteMetricSpace, spec: FunctionSpec, seed: u64) -> BoundaryFunction {
    match spec {
        FunctionSpec::Uniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            BoundaryFunction::new((0..space.len()).map(|_| rng.gen_range(-1.0..=1.0)).collect())
        }
        FunctionSpec::Smooth { anchor, exponent } => {
            BoundaryFunction::new((0..space.len()).map(|z| space.dist(z, anchor).powf(exponent)).collect())
        }
    }
}

/// i.i.d. uniform values on vertices up to the stabilization level; deeper
/// vertices copy the value at `(z, N_star)`, so the function on the
/// infinite filling does not depend on the truncation level.
pub fn random_graph_function(g: &FillingGraph, seed: u64) -> GraphFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ns = g.n_star();
    let mut values = vec![0.0; g.vertex_count()];
    for (id, v) in g.vertices().iter().enumerate() {
        values[id] = if v.level <= ns {
            rng.gen_range(-1.0..=1.0)
        } else {
            values[g.find(v.point, ns).expect("rays are complete below the stabilization level")]
        };
    }
    GraphFunction::new(values)
}

/// A norm ratio, or the 0/0 sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio {
    Value(f64),
    Degenerate,
}

impl Ratio {
    /// `num / den`, with `0/0` (up to roundoff in the numerator) degenerate.
    pub fn of(num: f64, den: f64) -> Ratio {
        if den == 0.0 && num.abs() < 1e-20 {
            Ratio::Degenerate
        } else {
            Ratio::Value(num / den)
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Ratio::Value(v) => Some(v),
            Ratio::Degenerate => None,
        }
    }

    pub fn is_finite(self) -> bool {
        self.value().is_none_or(f64::is_finite)
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Ratio::Value(v) => s.serialize_f64(*v),
            Ratio::Degenerate => s.serialize_str("degenerate"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyKind {
    Extension,
    Trace,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub kind: EnergyKind,
    pub index: usize,
    pub seed: u64,
    pub p: f64,
    pub theta: f64,
    pub beta: f64,
    pub eps: f64,
    pub beta_critical: bool,
    /// `||f||_{theta,p}^p` of the boundary function, or of the trace.
    pub besov_energy: f64,
    pub lp_boundary: f64,
    pub gradient_energy: f64,
    pub lp_graph: f64,
    pub round_trip_error: Option<f64>,
    /// Extension: `||g_Ef||^p / ||f||_{theta,p}^p`; trace:
    /// `||u~||_{theta,p} / ||g_u||`.
    pub seminorm_ratio: Option<Ratio>,
    /// Extension: `||Ef||^p_{L^p(mu_beta)} / ||f||^p_{L^p(nu)}`; trace:
    /// `||u~||_{L^p(nu)} / (|u(v_0)| + ||g_u||)`.
    pub lp_ratio: Option<Ratio>,
}

/// Relative tolerance for `theta` sitting on the critical line
/// `theta = 1 - beta/(eps p)`.
const CRITICAL_RTOL: f64 = 1e-12;

/// Runs `n_functions` seeded boundary functions through `Tr E` and
/// `n_functions` seeded graph functions through `Tr`, reporting norms and
/// ratios. Fails on the first round-trip error above [`ROUND_TRIP_TOL`].
pub fn verify_trace_extension(
    m: &LiftedMeasure,
    theta: f64,
    p: f64,
    n_functions: usize,
    seed: u64,
) -> Result<Vec<EnergyReport>> {
    if !(theta > 0.0 && p >= 1.0) {
        return Err(Error::BadParams(format!("theta {theta} and p {p} must satisfy theta > 0, p >= 1")));
    }
    let u = m.uniformized();
    let g = u.graph();
    let space = g.space();
    let nu = m.nu();
    let (eps, beta) = (u.eps(), m.beta());
    let critical = 1.0 - beta / (eps * p);
    let on_line = (theta - critical).abs() <= CRITICAL_RTOL * theta.abs().max(1.0);
    let ext_ok = on_line || theta >= critical;
    let trace_ok = on_line || theta <= critical;
    let alpha = g.alpha();

    let ext: Vec<Result<EnergyReport>> = (0..n_functions)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i as u64);
            let f = random_boundary_function(space, FunctionSpec::Uniform, s);
            let ef = extend(&f, g, nu);
            let tr = trace(&ef, g)?;
            let mut err = 0.0f64;
            for (z, (a, b)) in tr.trace.values().iter().zip(f.values()).enumerate() {
                let d = (a - b).abs();
                if d > ROUND_TRIP_TOL {
                    return Err(Error::RoundTripFailure { point: z, error: d });
                }
                err = err.max(d);
            }
            let bes = besov_energy(space, &f, nu, theta, p, BesovMethod::Direct, alpha);
            let lpb = lp_boundary(&f, nu, p);
            let nn = newtonian_norm(&ef, m, p);
            Ok(EnergyReport {
                kind: EnergyKind::Extension,
                index: i,
                seed: s,
                p,
                theta,
                beta,
                eps,
                beta_critical: on_line,
                besov_energy: bes,
                lp_boundary: lpb,
                gradient_energy: nn.gradient_energy,
                lp_graph: nn.lp,
                round_trip_error: Some(err),
                seminorm_ratio: ext_ok.then(|| Ratio::of(nn.gradient_energy, bes)),
                lp_ratio: ext_ok.then(|| Ratio::of(nn.lp, lpb)),
            })
        })
        .collect();
    let tr: Vec<Result<EnergyReport>> = (0..n_functions)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i as u64) ^ 0x9e37_79b9_7f4a_7c15;
            let gu = random_graph_function(g, s);
            let t = trace(&gu, g)?;
            let bes = besov_energy(space, &t.trace, nu, theta, p, BesovMethod::Direct, alpha);
            let lpb = lp_boundary(&t.trace, nu, p);
            let nn = newtonian_norm(&gu, m, p);
            let grad_norm = nn.gradient_energy.powf(1.0 / p);
            let root = gu.values()[g.root()].abs();
            Ok(EnergyReport {
                kind: EnergyKind::Trace,
                index: i,
                seed: s,
                p,
                theta,
                beta,
                eps,
                beta_critical: on_line,
                besov_energy: bes,
                lp_boundary: lpb,
                gradient_energy: nn.gradient_energy,
                lp_graph: nn.lp,
                round_trip_error: None,
                seminorm_ratio: trace_ok.then(|| Ratio::of(bes.powf(1.0 / p), grad_norm)),
                lp_ratio: trace_ok.then(|| Ratio::of(lpb.powf(1.0 / p), root + grad_norm)),
            })
        })
        .collect();
    ext.into_iter().chain(tr).collect()
}

/// Largest finite ratio of each kind over a set of reports.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct RatioMaxima {
    pub extension_seminorm: f64,
    pub extension_lp: f64,
    pub trace_seminorm: f64,
    pub trace_lp: f64,
    pub all_finite: bool,
}

pub fn ratio_maxima(reports: &[EnergyReport]) -> RatioMaxima {
    let mut out = RatioMaxima {
        all_finite: true,
        ..Default::default()
    };
    for r in reports {
        for (ratio, slot) in [
            (r.seminorm_ratio, 0usize),
            (r.lp_ratio, 1usize),
        ] {
            let Some(ratio) = ratio else { continue };
            if !ratio.is_finite() {
                out.all_finite = false;
            }
            let v = ratio.value().unwrap_or(0.0);
            let target = match (r.kind, slot) {
                (EnergyKind::Extension, 0) => &mut out.extension_seminorm,
                (EnergyKind::Extension, _) => &mut out.extension_lp,
                (EnergyKind::Trace, 0) => &mut out.trace_seminorm,
                (EnergyKind::Trace, _) => &mut out.trace_lp,
            };
            if v.is_finite() {
                *target = target.max(v);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filling::{build_filling, FillingParams};
    use crate::generate::{cantor, interval_net};
    use crate::measure::lift_measure;
    use crate::metric::{validate_and_rescale, RawPoints};
    use crate::nets::build_nets;
    use crate::uniformize::uniformize;
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn line(xs: &[f64]) -> FiniteMetricSpace {
        validate_and_rescale(RawPoints::Coordinates(xs.iter().map(|&x| (None, vec![x])).collect()), 0.5).unwrap()
    }

    fn lifted(space: FiniteMetricSpace, n_trunc: Option<u32>, beta: f64) -> LiftedMeasure {
        let n = space.len();
        let nets = build_nets(Arc::new(space), 2.0, 12).unwrap();
        let mut params = FillingParams::new(1.5);
        params.n_trunc = n_trunc;
        let g = Arc::new(build_filling(&nets, params).unwrap());
        let u = Arc::new(uniformize(g, 2f64.ln(), false).unwrap());
        lift_measure(u, BoundaryMeasure::new(vec![1.0 / n as f64; n]).unwrap(), beta).unwrap()
    }

    #[test]
    fn two_point_indicator_besov() {
        let s = line(&[0.0, 1.0]);
        let nu = BoundaryMeasure::new(vec![0.5, 0.5]).unwrap();
        let f = BoundaryFunction::new(vec![1.0, 0.0]);
        let direct = besov_energy(&s, &f, &nu, 0.5, 2.0, BesovMethod::Direct, 2.0);
        assert_relative_eq!(direct, 2.0, max_relative = 1e-15);
        let c = BoundaryFunction::new(vec![3.0, 3.0]);
        assert_eq!(besov_energy(&s, &c, &nu, 0.5, 2.0, BesovMethod::Direct, 2.0), 0.0);
        assert_eq!(besov_energy(&s, &c, &nu, 0.5, 2.0, BesovMethod::Dyadic, 2.0), 0.0);
    }

    #[test]
    fn dyadic_terms_vanish_past_isolation() {
        let s = cantor(3, 0.3).unwrap();
        let n = s.len();
        let nu = BoundaryMeasure::counting(n);
        let f = random_boundary_function(&s, FunctionSpec::Uniform, 4);
        let n_iso = crate::nets::isolation_level(2.0, s.min_sep());
        let long = dyadic_terms(&s, &f, &nu, 0.4, 2.0, 2.0, n_iso + 10);
        assert!(long[n_iso as usize..].iter().all(|&t| t == 0.0));
        let sum: f64 = long.iter().sum();
        assert_eq!(sum, besov_energy(&s, &f, &nu, 0.4, 2.0, BesovMethod::Dyadic, 2.0));
    }

    #[test]
    fn seminorm_scales() {
        let s = interval_net(9).unwrap();
        let nu = BoundaryMeasure::counting(9);
        let f = random_boundary_function(&s, FunctionSpec::Uniform, 2);
        for method in [BesovMethod::Direct, BesovMethod::Dyadic] {
            let a = besov_seminorm(&s, &f, &nu, 0.5, 3.0, method, 2.0);
            let b = besov_seminorm(&s, &f.scaled(-2.5), &nu, 0.5, 3.0, method, 2.0);
            assert_relative_eq!(b, 2.5 * a, max_relative = 1e-13);
        }
    }

    #[test]
    fn constant_and_single_edge_norms() {
        let m = lifted(line(&[0.0, 1.0]), Some(5), 0.7);
        let g = m.uniformized().graph();
        let c = GraphFunction::new(vec![2.0; g.vertex_count()]);
        let nn = newtonian_norm(&c, &m, 3.0);
        assert_eq!(nn.gradient_energy, 0.0);
        assert_relative_eq!(nn.lp, 8.0 * m.total(), max_relative = 1e-13);

        let e = 0;
        let edge = g.edge(e);
        let mut vals = vec![0.0; g.vertex_count()];
        vals[edge.a] = 1.0;
        let u = GraphFunction::new(vals);
        let nn = newtonian_norm(&u, &m, 1.0);
        let want = m.edge_density()[e] / m.uniformized().edge_len(e);
        let others: usize = g.neighbors(edge.a).len();
        // Every edge at edge.a carries the same unit jump.
        let total: f64 = g
            .neighbors(edge.a)
            .iter()
            .map(|&(_, f)| m.edge_density()[f] / m.uniformized().edge_len(f))
            .sum();
        assert!(others >= 1);
        assert!(nn.gradient_energy >= want);
        assert_relative_eq!(nn.gradient_energy, total, max_relative = 1e-14);
    }

    #[test]
    fn lp_matches_trapezoid_oracle() {
        let m = lifted(line(&[0.0, 1.0]), None, 0.8);
        let u = m.uniformized();
        let g = u.graph();
        let f = random_graph_function(g, 11);
        let got = newtonian_norm(&f, &m, 2.0).lp;
        // 10^4-interval trapezoid per edge, Richardson-extrapolated against
        // 5000 intervals. The midpoint of a horizontal edge is a node of both.
        let trap = |e: usize, k: usize| -> f64 {
            let edge = g.edge(e);
            let (a, b) = (f.values()[edge.a], f.values()[edge.b]);
            let len = u.edge_len(e);
            let val = |t: f64| (a + (b - a) * u.arc_from_a(e, t) / len).powi(2);
            let h = 1.0 / k as f64;
            let mut s = 0.5 * (val(0.0) + val(1.0));
            for i in 1..k {
                s += val(i as f64 * h);
            }
            s * h
        };
        let mut want = 0.0;
        for e in 0..g.edges().len() {
            let (t1, t2) = (trap(e, 5000), trap(e, 10_000));
            want += m.edge_density()[e] * (t2 + (t2 - t1) / 3.0);
        }
        for p in 0..g.space().len() {
            want += f.ray_value(g, p).powi(2) * m.tail_mass()[p];
        }
        assert_relative_eq!(got, want, max_relative = 1e-9);
    }

    #[test]
    fn quadrature_orders_agree() {
        let m = lifted(interval_net(9).unwrap(), None, 0.6);
        let g = m.uniformized().graph();
        for seed in 0..5 {
            let f = random_graph_function(g, seed);
            for p in [1.0, 2.0, 3.0] {
                let a = newtonian_norm_with_order(&f, &m, p, 16).lp;
                let b = newtonian_norm_with_order(&f, &m, p, 32).lp;
                assert_relative_eq!(a, b, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn extension_examples() {
        let m = lifted(line(&[0.0, 1.0]), None, 0.7);
        let g = m.uniformized().graph();
        let nu = m.nu();
        let f = BoundaryFunction::new(vec![0.0, 1.0]);
        let ef = extend(&f, g, nu);
        assert_eq!(ef.values()[g.root()], 0.5);
        assert_eq!(ef.values()[g.find(0, 1).unwrap()], 0.0);
        let t = trace(&ef, g).unwrap();
        assert_eq!(t.trace, f);
        assert_eq!(t.sequence[0][0], 0.5);
        assert_eq!(t.sequence[1][0], 0.5);
    }

    #[test]
    fn extension_is_linear() {
        let m = lifted(cantor(3, 0.3).unwrap(), None, 0.7);
        let g = m.uniformized().graph();
        let s = g.space();
        let f = random_boundary_function(s, FunctionSpec::Uniform, 1);
        let h = random_boundary_function(s, FunctionSpec::Uniform, 2);
        let comb = BoundaryFunction::new(f.values().iter().zip(h.values()).map(|(a, b)| 2.0 * a - 3.0 * b).collect());
        let (ef, eh, ec) = (extend(&f, g, m.nu()), extend(&h, g, m.nu()), extend(&comb, g, m.nu()));
        for i in 0..g.vertex_count() {
            assert!((ec.values()[i] - (2.0 * ef.values()[i] - 3.0 * eh.values()[i])).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_trace_sequence() {
        let m = lifted(interval_net(9).unwrap(), None, 0.5);
        let g = m.uniformized().graph();
        let t = trace(&GraphFunction::new(vec![4.0; g.vertex_count()]), g).unwrap();
        assert!(t.sequence.iter().flatten().all(|&v| v == 4.0));
        assert!(t.trace.values().iter().all(|&v| v == 4.0));
    }

    #[test]
    fn round_trip_and_ratios_on_cantor() {
        let (theta, p) = (0.5, 2.0);
        let beta = 2f64.ln() * p * (1.0 - theta);
        let m = lifted(cantor(4, 0.3).unwrap(), None, beta);
        let reports = verify_trace_extension(&m, theta, p, 100, 7).unwrap();
        assert_eq!(reports.len(), 200);
        assert!(reports.iter().all(|r| r.beta_critical));
        let max = ratio_maxima(&reports);
        assert!(max.all_finite);
        assert!(max.extension_seminorm > 0.0 && max.trace_seminorm > 0.0);
    }

    #[test]
    fn round_trip_for_other_beta() {
        let m = lifted(interval_net(9).unwrap(), None, 3.0);
        let reports = verify_trace_extension(&m, 0.5, 2.0, 10, 1).unwrap();
        assert!(reports.iter().all(|r| !r.beta_critical));
        // Away from the critical line only one side of the ratios applies.
        assert!(reports.iter().all(|r| match r.kind {
            EnergyKind::Extension => r.seminorm_ratio.is_some(),
            EnergyKind::Trace => r.seminorm_ratio.is_none(),
        }));
    }

    #[test]
    fn degenerate_ratio_for_constants() {
        let r = Ratio::of(0.0, 0.0);
        assert_eq!(r, Ratio::Degenerate);
        assert_eq!(serde_json::to_string(&r).unwrap(), "\"degenerate\"");
    }

    #[test]
    fn smooth_profile_is_distance() {
        let s = interval_net(9).unwrap();
        let f = random_boundary_function(&s, FunctionSpec::Smooth { anchor: 0, exponent: 1.0 }, 0);
        for z in 0..9 {
            assert_eq!(f.values()[z], s.dist(z, 0));
        }
        assert_eq!(
            random_boundary_function(&s, FunctionSpec::Uniform, 5),
            random_boundary_function(&s, FunctionSpec::Uniform, 5)
        );
        assert_ne!(
            random_boundary_function(&s, FunctionSpec::Uniform, 5),
            random_boundary_function(&s, FunctionSpec::Uniform, 6)
        );
    }

    #[test]
    fn random_graph_functions_ignore_truncation() {
        let a = lifted(interval_net(9).unwrap(), None, 0.5);
        let ga = a.uniformized().graph();
        let b = lifted(interval_net(9).unwrap(), Some(ga.n_trunc() + 2), 0.5);
        let gb = b.uniformized().graph();
        let (fa, fb) = (random_graph_function(ga, 3), random_graph_function(gb, 3));
        for id in 0..ga.vertex_count() {
            assert_eq!(fa.values()[id], fb.values()[id]);
        }
        let (na, nb) = (newtonian_norm(&fa, &a, 2.0), newtonian_norm(&fb, &b, 2.0));
        assert_relative_eq!(na.lp, nb.lp, max_relative = 1e-12);
        assert_relative_eq!(na.gradient_energy, nb.gradient_energy, max_relative = 1e-12);
    }
}
