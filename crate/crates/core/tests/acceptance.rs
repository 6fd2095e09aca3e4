//! Acceptance criteria, one line each. Exits nonzero if any criterion fails
//! or runs over its time budget.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use hypfill::filling::product_comparison_check;
use hypfill::functions::{newtonian_norm_with_order, random_graph_function, ratio_maxima, verify_trace_extension};
use hypfill::generate::{cantor, grid, interval_net, slit_family};
use hypfill::geodesic::{geodesic_structure_check, n0, regime_tau, DEFAULT_GEODESIC_CAP};
use hypfill::hyperbolicity::hyperbolicity_constant;
use hypfill::measure::{lift_measure, verify_measure, BoundaryMeasure, LiftedMeasure};
use hypfill::tree::{check_tree_isomorphism, random_tree, tree_boundary_space};
use hypfill::uniformize::{uniformize, verify_uniformization, UniformizedFilling};
use hypfill::{build_filling, build_nets, validate_and_rescale, FillingGraph, FillingParams, FiniteMetricSpace, RawPoints};

const ALPHA: f64 = 2.0;
const TAUS: [f64; 2] = [1.5, 3.0];
const WHITNEY_TOL: f64 = 1e-12;
const ROUND_TRIP_TOL: f64 = 1e-9;
const RATIO_STABILITY: f64 = 0.10;
const MEASURE_STABILITY: f64 = 0.15;
const HYPERBOLICITY_STABILITY: f64 = 0.5;
const QUADRATURE_RTOL: f64 = 1e-10;
const MASS_RTOL: f64 = 1e-12;
const FUNCTIONS: usize = 100;
const MEASURE_SAMPLES: usize = 2000;
const SEED: u64 = 20_240_601;

fn line(xs: &[f64]) -> FiniteMetricSpace {
    validate_and_rescale(RawPoints::Coordinates(xs.iter().map(|&x| (None, vec![x])).collect()), 0.5).unwrap()
}

fn fixtures() -> Vec<(&'static str, Arc<FiniteMetricSpace>)> {
    vec![
        ("single-point", line(&[0.0])),
        ("two-point", line(&[0.0, 1.0])),
        ("interval_net(17)", interval_net(17).unwrap()),
        ("cantor(4)", cantor(4, 1.0 / 3.0).unwrap()),
        ("grid(2,5)", grid(2, 5).unwrap()),
    ]
    .into_iter()
    .map(|(n, s)| (n, Arc::new(s)))
    .collect()
}

fn filling(space: &Arc<FiniteMetricSpace>, tau: f64, extra_depth: u32) -> Arc<FillingGraph> {
    let nets = build_nets(Arc::clone(space), ALPHA, 8).unwrap();
    let g = build_filling(&nets, FillingParams::new(tau)).unwrap();
    if extra_depth == 0 {
        return Arc::new(g);
    }
    Arc::new(build_filling(&nets, FillingParams::new(tau).with_n_trunc(g.n_trunc() + extra_depth)).unwrap())
}

fn uniform(space: &Arc<FiniteMetricSpace>, tau: f64, eps: f64, extra_depth: u32) -> Arc<UniformizedFilling> {
    Arc::new(uniformize(filling(space, tau, extra_depth), eps, false).unwrap())
}

fn lifted(space: &Arc<FiniteMetricSpace>, tau: f64, beta: f64, extra_depth: u32) -> LiftedMeasure {
    let n = space.len();
    let nu = BoundaryMeasure::new(vec![1.0 / n as f64; n]).unwrap();
    lift_measure(uniform(space, tau, ALPHA.ln(), extra_depth), nu, beta).unwrap()
}

fn rel_change(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn criterion_1() -> Outcome {
    let eps = ALPHA.ln();
    let mut worst = 0.0f64;
    let mut vertices = 0usize;
    for (_, s) in fixtures() {
        for tau in TAUS {
            let u = uniform(&s, tau, eps, 0);
            let to_bdry = u.distance_to_boundary();
            let g = u.graph();
            for id in 0..g.vertex_count() {
                worst = worst.max((to_bdry[id] - u.whitney(g.vertex(id).level)).abs());
                vertices += 1;
            }
        }
    }
    Outcome {
        pass: worst <= WHITNEY_TOL,
        detail: format!("{vertices} vertices, max |d(v, boundary) - e^(-eps n)/eps| = {worst:.3e} (tol {WHITNEY_TOL:e})"),
    }
}

fn criterion_2() -> Outcome {
    let mut violations = 0usize;
    let mut pairs = 0usize;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    let mut notes = Vec::new();
    for (name, s) in fixtures() {
        for tau in TAUS {
            for eps in [ALPHA.ln(), 0.7 * ALPHA.ln()] {
                let r = verify_uniformization(&uniform(&s, tau, eps, 0));
                pairs += r.boundary_pairs;
                violations += r.violations.len();
                if let Some(x) = r.lower_ratio_min {
                    lo = lo.min(x);
                }
                if let Some(x) = r.upper_ratio_max {
                    hi = hi.max(x);
                }
                if let Some(v) = r.violations.first() {
                    notes.push(format!("{name} tau={tau} eps={eps:.4}: {v}"));
                }
            }
        }
    }
    Outcome {
        pass: violations == 0,
        detail: format!(
            "{pairs} boundary pairs, {violations} violations; min C1 d_eps/d^sigma = {lo:.4}, max d_eps/(C2 d^sigma) = {hi:.4}{}",
            if notes.is_empty() { String::new() } else { format!("; first: {}", notes.join(" | ")) }
        ),
    }
}

fn tree_cases() -> Vec<(u64, f64)> {
    let taus = [1.2, 1.5];
    (0..20u64).flat_map(|seed| taus.map(|t| (seed, t))).collect()
}

fn tree_filling(seed: u64, tau: f64) -> (hypfill::tree::RootedTree, FillingGraph) {
    let eps = ALPHA.ln();
    let tree = random_tree(200, 4, seed).unwrap();
    let space = Arc::new(tree_boundary_space(&tree, eps, tau).unwrap());
    let nets = build_nets(space, eps.exp(), 8).unwrap();
    let g = build_filling(&nets, FillingParams::new(tau)).unwrap();
    (tree, g)
}

fn criterion_3() -> Outcome {
    let failures: Vec<String> = tree_cases()
        .par_iter()
        .filter_map(|&(seed, tau)| {
            let (tree, g) = tree_filling(seed, tau);
            check_tree_isomorphism(&tree, &g).err().map(|e| format!("seed {seed} tau {tau}: {e}"))
        })
        .collect();
    Outcome {
        pass: failures.is_empty(),
        detail: format!("{} trees x 2 tau, {} non-isomorphic{}", 20, failures.len(), failures.first().map(|f| format!("; {f}")).unwrap_or_default()),
    }
}

/// `(fixture, theta, p) -> ratio maxima` for both truncation depths, with
/// round-trip error.
fn energy_sweep(extra_depth: u32) -> Vec<(String, f64, f64, hypfill::functions::RatioMaxima, f64, usize)> {
    let eps = ALPHA.ln();
    let mut jobs = Vec::new();
    for (name, s) in fixtures() {
        for theta in [0.3, 0.5, 0.7] {
            for p in [1.0, 2.0, 3.0] {
                jobs.push((name, Arc::clone(&s), theta, p));
            }
        }
    }
    jobs.par_iter()
        .map(|(name, s, theta, p)| {
            let beta = eps * p * (1.0 - theta);
            let m = lifted(s, 1.5, beta, extra_depth);
            match verify_trace_extension(&m, *theta, *p, FUNCTIONS, SEED) {
                Ok(reports) => {
                    let err = reports.iter().filter_map(|r| r.round_trip_error).fold(0.0, f64::max);
                    let passes = reports.iter().filter(|r| r.round_trip_error.is_some_and(|e| e <= ROUND_TRIP_TOL)).count();
                    (name.to_string(), *theta, *p, ratio_maxima(&reports), err, passes)
                }
                Err(e) => {
                    eprintln!("{name} theta {theta} p {p}: {e}");
                    (name.to_string(), *theta, *p, Default::default(), f64::INFINITY, 0)
                }
            }
        })
        .collect()
}

fn criterion_4() -> Outcome {
    let sweep = energy_sweep(0);
    let runs = sweep.len() * FUNCTIONS;
    let passes: usize = sweep.iter().map(|x| x.5).sum();
    let worst = sweep.iter().map(|x| x.4).fold(0.0, f64::max);
    Outcome {
        pass: passes == runs && worst <= ROUND_TRIP_TOL,
        detail: format!("{passes}/{runs} round trips, max |Tr(Ef) - f| = {worst:.3e} (tol {ROUND_TRIP_TOL:e})"),
    }
}

fn criterion_5() -> Outcome {
    let (a, b) = (energy_sweep(0), energy_sweep(2));
    let mut finite = true;
    let mut worst = (0.0f64, String::new());
    for (x, y) in a.iter().zip(&b) {
        finite &= x.3.all_finite && y.3.all_finite;
        for (label, u, v) in [
            ("extension seminorm", x.3.extension_seminorm, y.3.extension_seminorm),
            ("extension lp", x.3.extension_lp, y.3.extension_lp),
            ("trace seminorm", x.3.trace_seminorm, y.3.trace_seminorm),
            ("trace lp", x.3.trace_lp, y.3.trace_lp),
        ] {
            let c = rel_change(u, v);
            if c >= worst.0 {
                worst = (c, format!("{} theta={} p={} {label}: {u:.6} -> {v:.6}", x.0, x.1, x.2));
            }
        }
    }
    Outcome {
        pass: finite && worst.0 < RATIO_STABILITY,
        detail: format!(
            "all ratios finite: {finite}; max relative change of per-fixture maxima under depth +2 = {:.3e} (limit {RATIO_STABILITY}) at {}",
            worst.0, worst.1
        ),
    }
}

fn criterion_6() -> Outcome {
    let tau = regime_tau(ALPHA);
    let mut geodesics = 0u64;
    let mut failures = Vec::new();
    let mut cap_hits = 0usize;
    for (name, s) in [("interval_net(9)", interval_net(9).unwrap()), ("cantor(3)", cantor(3, 1.0 / 3.0).unwrap())] {
        let nets = build_nets(Arc::new(s), ALPHA, 8).unwrap();
        let g0 = build_filling(&nets, FillingParams::new(tau)).unwrap();
        let g = build_filling(&nets, FillingParams::new(tau).with_n_trunc(g0.n_trunc().max(8))).unwrap();
        match geodesic_structure_check(&g, 8, DEFAULT_GEODESIC_CAP) {
            Ok(r) => {
                geodesics += r.geodesics;
                cap_hits += r.cap_hits;
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    Outcome {
        pass: failures.is_empty() && cap_hits == 0,
        detail: format!(
            "tau = {tau}, n0 = {}, {geodesics} geodesics enumerated, {cap_hits} pairs hit the cap, {} violations{}",
            n0(ALPHA),
            failures.len(),
            failures.first().map(|f| format!("; {f}")).unwrap_or_default()
        ),
    }
}

fn criterion_7() -> Outcome {
    let family = [vec![3, 4], vec![3, 4, 5], vec![3, 4, 5, 6]];
    let cs: Vec<(f64, bool)> = family
        .par_iter()
        .map(|ns| {
            let s = Arc::new(slit_family(ns).unwrap());
            let nets = build_nets(s, ALPHA, 8).unwrap();
            let g = build_filling(&nets, FillingParams::new(1.0).counterexample()).unwrap();
            let r = hyperbolicity_constant(&g, 5000, 0, SEED);
            (r.value(), r.exhaustive)
        })
        .collect();
    let increasing = cs.windows(2).all(|w| w[1].0 > w[0].0);
    let exhaustive = cs.iter().all(|c| c.1);
    Outcome {
        pass: increasing && exhaustive,
        detail: format!(
            "C for k = 1, 2, 3: {:?} (exhaustive: {exhaustive})",
            cs.iter().map(|c| c.0).collect::<Vec<_>>()
        ),
    }
}

fn criterion_8() -> Outcome {
    let mut product_failures = Vec::new();
    let mut c_changes = Vec::new();
    let mut worst_change = 0.0f64;
    for (name, s) in fixtures() {
        for tau in TAUS {
            let nets = build_nets(Arc::clone(&s), ALPHA, 8).unwrap();
            let base = build_filling(&nets, FillingParams::new(tau)).unwrap();
            if let Err(e) = product_comparison_check(&base) {
                product_failures.push(format!("{name} tau={tau}: {e}"));
            }
            let ns = base.n_star();
            let cs: Vec<f64> = [2, 4]
                .iter()
                .map(|d| {
                    let g = build_filling(&nets, FillingParams::new(tau).with_n_trunc(ns + d)).unwrap();
                    let r = hyperbolicity_constant(&g, 5000, 0, SEED);
                    assert!(r.exhaustive, "{name}: core too large for an exhaustive search");
                    r.value()
                })
                .collect();
            let change = (cs[1] - cs[0]).abs();
            worst_change = worst_change.max(change);
            c_changes.push(format!("{name}/{tau}: {}", cs[0]));
        }
    }
    let tree_cs: Vec<f64> = tree_cases()
        .par_iter()
        .map(|&(seed, tau)| hyperbolicity_constant(&tree_filling(seed, tau).1, 5000, 0, SEED).value())
        .collect();
    let trees_zero = tree_cs.iter().all(|&c| c == 0.0);
    Outcome {
        pass: product_failures.is_empty() && trees_zero && worst_change < HYPERBOLICITY_STABILITY,
        detail: format!(
            "product bounds violated on {} fixtures{}; tree C all zero: {trees_zero}; max |C(N*+4) - C(N*+2)| = {worst_change} (limit {HYPERBOLICITY_STABILITY}); C: {}",
            product_failures.len(),
            product_failures.first().map(|f| format!(" ({f})")).unwrap_or_default(),
            c_changes.join(", ")
        ),
    }
}

fn criterion_9() -> Outcome {
    let beta = ALPHA.ln();
    let mut jobs = Vec::new();
    for (name, s) in fixtures() {
        for tau in TAUS {
            jobs.push((name, Arc::clone(&s), tau));
        }
    }
    let results: Vec<Result<(String, f64, f64, f64, f64, f64), String>> = jobs
        .par_iter()
        .map(|(name, s, tau)| {
            let a = verify_measure(&lifted(s, *tau, beta, 0), MEASURE_SAMPLES, SEED).map_err(|e| format!("{name}: {e}"))?;
            let b = verify_measure(&lifted(s, *tau, beta, 2), MEASURE_SAMPLES, SEED).map_err(|e| format!("{name}: {e}"))?;
            let change = rel_change(a.codim_ratio_range.0, b.codim_ratio_range.0)
                .max(rel_change(a.codim_ratio_range.1, b.codim_ratio_range.1));
            Ok((
                format!("{name}/{tau}"),
                a.codim_k,
                change,
                a.doubling_max,
                rel_change(a.doubling_max, b.doubling_max),
                a.neighbor_max_ratio / a.neighbor_bound,
            ))
        })
        .collect();
    let errors: Vec<&String> = results.iter().filter_map(|r| r.as_ref().err()).collect();
    let ok: Vec<_> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
    let band_change = ok.iter().map(|r| r.2).fold(0.0, f64::max);
    let dbl_change = ok.iter().map(|r| r.4).fold(0.0, f64::max);
    let finite = ok.iter().all(|r| r.1.is_finite() && r.3.is_finite());
    let kmax = ok.iter().map(|r| r.1).fold(0.0, f64::max);
    let dmax = ok.iter().map(|r| r.3).fold(0.0, f64::max);
    let nb = ok.iter().map(|r| r.5).fold(0.0, f64::max);
    Outcome {
        pass: errors.is_empty() && finite && band_change < MEASURE_STABILITY && dbl_change < MEASURE_STABILITY,
        detail: format!(
            "{} neighbor-mass violations (max ratio/bound {nb:.3}); codim K max {kmax:.3}, band change {band_change:.2e}; doubling max {dmax:.3}, change {dbl_change:.2e} (limit {MEASURE_STABILITY}){}",
            errors.len(),
            errors.first().map(|e| format!("; {e}")).unwrap_or_default()
        ),
    }
}

fn criterion_10() -> Outcome {
    let mut quad = 0.0f64;
    let mut mass = 0.0f64;
    for (_, s) in fixtures() {
        for tau in TAUS {
            let m = lifted(&s, tau, 0.6, 0);
            mass = mass.max(rel_change(m.total(), m.total_by_vertices()));
            let g = m.uniformized().graph();
            for seed in 0..3 {
                let u = random_graph_function(g, seed);
                for p in [1.0, 2.0, 3.0] {
                    let a = newtonian_norm_with_order(&u, &m, p, 16).lp;
                    let b = newtonian_norm_with_order(&u, &m, p, 32).lp;
                    quad = quad.max(rel_change(a, b));
                }
            }
        }
    }
    let s = Arc::new(cantor(4, 1.0 / 3.0).unwrap());
    let run = || {
        let m = lifted(&s, 1.5, ALPHA.ln(), 0);
        let mr = serde_json::to_string(&verify_measure(&m, 500, SEED).unwrap()).unwrap();
        let er = serde_json::to_string(&verify_trace_extension(&m, 0.5, 2.0, 20, SEED).unwrap()).unwrap();
        format!("{mr}{er}")
    };
    let identical = run() == run();
    Outcome {
        pass: quad <= QUADRATURE_RTOL && mass <= MASS_RTOL && identical,
        detail: format!(
            "order 16 vs 32 max rel diff {quad:.2e} (tol {QUADRATURE_RTOL:e}); edge vs vertex mass totals diff {mass:.2e} (tol {MASS_RTOL:e}); identical reports: {identical}"
        ),
    }
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome, u64); 10] = [
        (1, "whitney identity", criterion_1, 5),
        (2, "snowflake bounds", criterion_2, 10),
        (3, "tree round trip", criterion_3, 10),
        (4, "trace of extension is the identity", criterion_4, 30),
        (5, "norm-ratio stability", criterion_5, 60),
        (6, "geodesic structure", criterion_6, 60),
        (7, "non-hyperbolic slit family", criterion_7, 30),
        (8, "hyperbolicity soundness", criterion_8, 30),
        (9, "lifted measure", criterion_9, 60),
        (10, "numerical self-consistency", criterion_10, 10),
    ];
    let mut failed = 0;
    for (n, name, f, budget) in criteria {
        let start = Instant::now();
        let out = f();
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(budget);
        let ok = out.pass && in_time;
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {n:>2} [{}] {name}: {} | {:.2}s (budget {budget}s)",
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {}/10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
