//! Subcommand bodies. Each builds the pipeline stages it needs and returns a
//! report; nothing here touches global state.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use hypfill::export;
use hypfill::filling::{degree_stats, product_comparison_check};
use hypfill::functions::{
    extend, random_boundary_function, ratio_maxima, trace, verify_trace_extension, FunctionSpec, ROUND_TRIP_TOL,
};
use hypfill::generate::{generate_space, SpaceKind};
use hypfill::geodesic::{geodesic_structure_scan, regime_tau};
use hypfill::hyperbolicity::hyperbolicity_constant;
use hypfill::io;
use hypfill::measure::{lift_measure, verify_measure, BoundaryMeasure, LiftedMeasure};
use hypfill::report::{emit_series, CheckRecord, CheckStatus, SeriesKind, VerificationReport};
use hypfill::rough::{rescaled_boundary, rough_similarity};
use hypfill::tree::{check_tree_isomorphism, RootedTree};
use hypfill::uniformize::{uniformize, verify_uniformization, UniformizedFilling, WHITNEY_TOL};
use hypfill::{build_filling, build_nets, Error, FillingGraph, FillingParams, FiniteMetricSpace, Result};

use crate::config::{ExportFormat, RunConfig};

/// Relative tolerance on the two mass totals.
const MASS_RTOL: f64 = 1e-12;

pub const ANALYZE_CHECKS: [&str; 9] = [
    "filling",
    "whitney",
    "snowflake",
    "collapse",
    "product",
    "hyperbolicity",
    "tree",
    "geodesic",
    "rough",
];

pub struct Input {
    pub space: Arc<FiniteMetricSpace>,
    pub tree: Option<RootedTree>,
}

pub fn load_input(cfg: &RunConfig) -> Result<Input> {
    let (space, generated_tree) = match (&cfg.space, &cfg.generator) {
        (Some(path), None) => (io::load_space(path, cfg.target_diam)?, None),
        (None, Some(kind)) => {
            let g = generate_space(kind)?;
            (g.space, g.tree)
        }
        _ => return Err(Error::BadParams("exactly one of space or generator is required".into())),
    };
    let tree = match &cfg.tree {
        Some(path) => Some(io::load_tree(path)?),
        None => generated_tree,
    };
    Ok(Input {
        space: Arc::new(space),
        tree,
    })
}

pub fn filling(cfg: &RunConfig, space: &Arc<FiniteMetricSpace>) -> Result<Arc<FillingGraph>> {
    let nets = build_nets(Arc::clone(space), cfg.alpha, cfg.net_depth)?;
    let mut params = FillingParams::new(cfg.tau).with_rule(cfg.rule);
    if cfg.counterexample {
        params = params.counterexample();
    }
    if let Some(n) = cfg.n_trunc {
        params = params.with_n_trunc(n);
    }
    Ok(Arc::new(build_filling(&nets, params)?))
}

pub fn uniformized(cfg: &RunConfig, g: &Arc<FillingGraph>) -> Result<Arc<UniformizedFilling>> {
    Ok(Arc::new(uniformize(Arc::clone(g), cfg.eps(), cfg.allow_collapse)?))
}

fn boundary_measure(cfg: &RunConfig, space: &FiniteMetricSpace) -> Result<BoundaryMeasure> {
    match &cfg.measure {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            BoundaryMeasure::new(io::parse_boundary_function(space, &text)?.values().to_vec())
        }
        None => Ok(BoundaryMeasure::counting(space.len())),
    }
}

fn lifted(cfg: &RunConfig, u: &Arc<UniformizedFilling>, beta: f64) -> Result<LiftedMeasure> {
    let nu = boundary_measure(cfg, u.graph().space())?;
    lift_measure(Arc::clone(u), nu, beta)
}

/// Errors that report a failed proven inequality become failed checks;
/// anything else aborts the run.
fn violation_or_abort(name: &str, e: Error) -> Result<CheckRecord> {
    match e {
        Error::BoundViolation { .. }
        | Error::LemmaViolation { .. }
        | Error::NeighborMassViolation { .. }
        | Error::RoundTripFailure { .. }
        | Error::GradientMismatch { .. } => Ok(CheckRecord::new(name, CheckStatus::Fail)
            .with("error", e.kind())
            .witness(e.to_string())),
        e => Err(e),
    }
}

fn status(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

fn skipped(name: &str, why: &str) -> CheckRecord {
    CheckRecord::new(name, CheckStatus::Diagnostic).with("skipped", why)
}

/// Collects checks in order, with optional timing.
struct Recorder {
    report: VerificationReport,
    timing: Option<BTreeMap<String, f64>>,
}

impl Recorder {
    fn new(command: &str, cfg: &RunConfig, timing: bool) -> Self {
        Recorder {
            report: VerificationReport::new(command, serde_json::to_value(cfg).expect("config serializes")),
            timing: timing.then(BTreeMap::new),
        }
    }

    fn run(&mut self, name: &str, f: impl FnOnce() -> Result<CheckRecord>) -> Result<()> {
        let start = Instant::now();
        let rec = f()?;
        if let Some(t) = &mut self.timing {
            t.insert(name.to_string(), start.elapsed().as_secs_f64());
        }
        self.report.push(rec);
        Ok(())
    }

    fn finish(mut self) -> VerificationReport {
        self.report.timing = self.timing;
        self.report
    }
}

pub fn build(cfg: &RunConfig, timing: bool) -> Result<(VerificationReport, Vec<PathBuf>)> {
    let input = load_input(cfg)?;
    let g = filling(cfg, &input.space)?;
    let u = uniformized(cfg, &g)?;
    let mut rec = Recorder::new("build", cfg, timing);
    rec.run("filling", || Ok(filling_record(&g)))?;
    rec.run("whitney", || Ok(whitney_record(&u)))?;
    let files = vec![
        write_file(&cfg.out, "filling.json", &export::json_adjacency(&g, Some(&u)))?,
        write_file(&cfg.out, "boundary.csv", &export::boundary_csv(&u.boundary_metric()))?,
    ];
    Ok((rec.finish(), files))
}

fn filling_record(g: &FillingGraph) -> CheckRecord {
    CheckRecord::new("filling", CheckStatus::Diagnostic)
        .with("summary", g.summary())
        .with("degrees", degree_stats(g))
}

fn whitney_record(u: &UniformizedFilling) -> CheckRecord {
    let d = u.distance_to_boundary();
    let g = u.graph();
    let err = (0..g.vertex_count())
        .map(|id| (d[id] - u.whitney(g.vertex(id).level)).abs())
        .fold(0.0, f64::max);
    CheckRecord::new("whitney", status(err <= WHITNEY_TOL))
        .with("max_error", err)
        .with("tolerance", WHITNEY_TOL)
        .with("vertices", g.vertex_count())
}

/// Depth index used by the hyperbolicity series: the number of gluings for
/// slit families, the truncation level otherwise.
fn series_depth(cfg: &RunConfig, g: &FillingGraph) -> usize {
    match &cfg.generator {
        Some(SpaceKind::SlitFamily { ns }) => ns.len().saturating_sub(1),
        _ => g.n_trunc() as usize,
    }
}

pub fn analyze(cfg: &RunConfig, timing: bool) -> Result<VerificationReport> {
    for c in &cfg.checks {
        if !ANALYZE_CHECKS.contains(&c.as_str()) {
            return Err(Error::BadParams(format!(
                "unknown check {c:?}; expected one of {}",
                ANALYZE_CHECKS.join(", ")
            )));
        }
    }
    let wanted = |name: &str| cfg.checks.is_empty() || cfg.checks.iter().any(|c| c == name);
    let input = load_input(cfg)?;
    let g = filling(cfg, &input.space)?;
    let u = uniformized(cfg, &g)?;
    let mut rec = Recorder::new("analyze", cfg, timing);
    let needs_uniform = ["snowflake", "collapse"].iter().any(|c| wanted(c));
    let ur = needs_uniform.then(|| verify_uniformization(&u));

    if wanted("filling") {
        rec.run("filling", || Ok(filling_record(&g)))?;
    }
    if wanted("whitney") {
        rec.run("whitney", || Ok(whitney_record(&u)))?;
    }
    if let Some(r) = &ur {
        if wanted("snowflake") {
            rec.run("snowflake", || {
                let hard = !r.collapse && g.tau() > 1.0;
                let st = if hard { status(r.passed()) } else { CheckStatus::Diagnostic };
                let mut c = CheckRecord::new("snowflake", st)
                    .with("eps", r.eps)
                    .with("sigma", r.sigma)
                    .with("c1", r.c1)
                    .with("c2", r.c2)
                    .with("boundary_pairs", r.boundary_pairs)
                    .with("lower_ratio_min", r.lower_ratio_min)
                    .with("upper_ratio_max", r.upper_ratio_max)
                    .with("vertex_pairs", r.vertex_pairs)
                    .with("vertex_ratio_max", r.vertex_ratio_max)
                    .with("product_ratio", r.product_ratio)
                    .with("diam", r.diam)
                    .with("diam_bound", r.diam_bound);
                for v in &r.violations {
                    c = c.witness(v.clone());
                }
                Ok(c)
            })?;
        }
        if wanted("collapse") {
            rec.run("collapse", || {
                Ok(CheckRecord::new("collapse", CheckStatus::Diagnostic)
                    .with("collapse", r.collapse)
                    .with("eps", r.eps)
                    .with("n_iso", g.nets().isolation_level())
                    .with("series", &r.collapse_series))
            })?;
        }
    }
    if wanted("product") {
        rec.run("product", || {
            if g.tau() <= 1.0 {
                return Ok(skipped("product", "needs tau > 1"));
            }
            match product_comparison_check(&g) {
                Ok(p) => Ok(CheckRecord::new("product", CheckStatus::Pass)
                    .with("lower_const", p.lower_const)
                    .with("upper_const", p.upper_const)
                    .with("min_ratio", p.min_ratio)
                    .with("max_ratio", p.max_ratio)
                    .with("pairs", p.pairs)),
                Err(e) => violation_or_abort("product", e),
            }
        })?;
    }
    if wanted("hyperbolicity") {
        rec.run("hyperbolicity", || {
            let h = hyperbolicity_constant(&g, cfg.hyperbolicity_cap, cfg.hyperbolicity_samples, cfg.seed);
            // Fillings of tree boundaries are trees, so C must vanish.
            let st = match (&input.tree, h.exhaustive) {
                (Some(_), true) => status(h.value() == 0.0),
                _ => CheckStatus::Diagnostic,
            };
            let mut c = CheckRecord::new("hyperbolicity", st)
                .with("k", series_depth(cfg, &g))
                .with("c", h.value())
                .with("exhaustive", h.exhaustive)
                .with("core_vertices", h.core_vertices)
                .with("triples", h.triples);
            if let Some((a, b, w)) = h.witness {
                c = c.witness(format!(
                    "({}, {}) ({}, {}) ({}, {})",
                    a.point, a.level, b.point, b.level, w.point, w.level
                ));
            }
            Ok(c)
        })?;
    }
    if wanted("tree") {
        rec.run("tree", || {
            let Some(tree) = &input.tree else {
                return Ok(skipped("tree", "no tree given"));
            };
            Ok(match check_tree_isomorphism(tree, &g) {
                Ok(()) => CheckRecord::new("tree", CheckStatus::Pass).with("tree_vertices", tree.len()),
                Err(w) => CheckRecord::new("tree", CheckStatus::Fail).witness(w),
            })
        })?;
    }
    if wanted("geodesic") {
        rec.run("geodesic", || {
            let need = regime_tau(g.alpha());
            if g.tau() < need || g.counterexample_mode() {
                return Ok(skipped("geodesic", &format!("needs tau >= {need}")));
            }
            let r = geodesic_structure_scan(&g, cfg.geodesic_budget, cfg.geodesic_cap)?;
            let mut c = CheckRecord::new("geodesic", status(r.all_pass()))
                .with("n0", r.n0)
                .with("level_budget", r.level_budget)
                .with("pairs", r.pairs)
                .with("geodesics", r.geodesics)
                .with("cap_hits", r.cap_hits)
                .with("lemmas", &r.lemmas);
            for (lemma, path) in r.witnesses.iter().take(10) {
                let p: Vec<String> = path.iter().map(|v| format!("({}, {})", v.point, v.level)).collect();
                c = c.witness(format!("{lemma}: {}", p.join(" ")));
            }
            Ok(c)
        })?;
    }
    if wanted("rough") {
        rec.run("rough", || {
            let bdry = match rescaled_boundary(&u) {
                Ok(b) => b,
                Err(e @ Error::ScaleMismatch(_)) => return Ok(skipped("rough", &e.to_string())),
                Err(e) => return Err(e),
            };
            let alpha_hat = cfg.alpha_hat();
            let nets = build_nets(Arc::new(bdry), alpha_hat, cfg.net_depth)?;
            let target = build_filling(&nets, FillingParams::new(cfg.tau).with_rule(cfg.rule))?;
            let r = rough_similarity(&u, &target, alpha_hat, cfg.samples, cfg.seed)?;
            Ok(CheckRecord::new("rough", CheckStatus::Diagnostic)
                .with("l", r.l)
                .with("best_c", r.best_c)
                .with("max_violation", r.max_violation)
                .with("coverage_c", r.coverage_c)
                .with("pairs", r.pairs)
                .with("exhaustive", r.exhaustive))
        })?;
    }
    Ok(rec.finish())
}

pub fn measure(cfg: &RunConfig, timing: bool) -> Result<VerificationReport> {
    let ex = cfg.exponents()?;
    let input = load_input(cfg)?;
    let g = filling(cfg, &input.space)?;
    let u = uniformized(cfg, &g)?;
    let m = lifted(cfg, &u, ex.beta)?;
    let mut rec = Recorder::new("measure", cfg, timing);
    rec.run("measure", || match verify_measure(&m, cfg.samples, cfg.seed) {
        Ok(r) => {
            let mass_ok = (r.total_mass - r.total_mass_alt).abs() <= MASS_RTOL * r.total_mass.abs().max(r.total_mass_alt.abs());
            let ok = r.neighbor_mass_bound_ok && mass_ok && r.doubling_max.is_finite();
            Ok(CheckRecord::new("measure", status(ok))
                .with("n_trunc", g.n_trunc())
                .with("beta", r.beta)
                .with("eps", r.eps)
                .with("codim_lo", r.codim_ratio_range.0)
                .with("codim_hi", r.codim_ratio_range.1)
                .with("codim_k", r.codim_k)
                .with("codim_balls", r.codim_balls)
                .with("neighbor_bound", r.neighbor_bound)
                .with("neighbor_max_ratio", r.neighbor_max_ratio)
                .with("neighbor_exponent", r.neighbor_exponent)
                .with("doubling_constant", r.doubling_constant)
                .with("doubling_max", r.doubling_max)
                .with("doubling_balls", r.doubling_balls)
                .with("radius_range", r.radius_range)
                .with("s_nu", r.s_nu)
                .with("eta", r.eta)
                .with("s_beta_target", r.s_beta_target)
                .with("s_beta_observed", r.s_beta_observed)
                .with("total_mass", r.total_mass)
                .with("total_mass_alt", r.total_mass_alt))
        }
        Err(e) => violation_or_abort("measure", e),
    })?;
    Ok(rec.finish())
}

fn theta_p(cfg: &RunConfig) -> Result<(f64, f64, f64)> {
    let ex = cfg.exponents()?;
    match (ex.theta, ex.p) {
        (Some(t), Some(p)) => Ok((t, p, ex.beta)),
        _ => Err(Error::BadParams("this command needs theta and p".into())),
    }
}

pub fn verify(cfg: &RunConfig, timing: bool) -> Result<(VerificationReport, Vec<PathBuf>)> {
    let (theta, p, beta) = theta_p(cfg)?;
    let input = load_input(cfg)?;
    let g = filling(cfg, &input.space)?;
    let u = uniformized(cfg, &g)?;
    let m = lifted(cfg, &u, beta)?;
    let mut rec = Recorder::new("verify", cfg, timing);
    let mut energy = Vec::new();
    rec.run("trace_extension", || {
        energy = verify_trace_extension(&m, theta, p, cfg.functions, cfg.seed)?;
        let mx = ratio_maxima(&energy);
        let trips: Vec<f64> = energy.iter().filter_map(|r| r.round_trip_error).collect();
        let passes = trips.iter().filter(|&&e| e <= ROUND_TRIP_TOL).count();
        let worst = trips.iter().copied().fold(0.0, f64::max);
        Ok(CheckRecord::new("trace_extension", status(passes == trips.len() && mx.all_finite))
            .with("theta", theta)
            .with("p", p)
            .with("beta", beta)
            .with("eps", u.eps())
            .with("functions", cfg.functions)
            .with("round_trips", trips.len())
            .with("round_trip_passes", passes)
            .with("round_trip_max_error", worst)
            .with("all_finite", mx.all_finite)
            .with("extension_seminorm_max", mx.extension_seminorm)
            .with("extension_lp_max", mx.extension_lp)
            .with("trace_seminorm_max", mx.trace_seminorm)
            .with("trace_lp_max", mx.trace_lp))
    })?;
    let body = serde_json::json!({ "config": cfg, "reports": energy });
    let mut text = serde_json::to_string_pretty(&body).expect("energy reports serialize");
    text.push('\n');
    let files = vec![write_file(&cfg.out, "energy_reports.json", &text)?];
    Ok((rec.finish(), files))
}

pub fn roundtrip(cfg: &RunConfig, function: Option<&Path>, timing: bool) -> Result<(VerificationReport, Vec<PathBuf>)> {
    let input = load_input(cfg)?;
    let g = filling(cfg, &input.space)?;
    let nu = boundary_measure(cfg, &input.space)?;
    let mut rec = Recorder::new("roundtrip", cfg, timing);
    let mut files = Vec::new();
    rec.run("roundtrip", || {
        let mut worst = 0.0f64;
        let mut passes = 0usize;
        for i in 0..cfg.functions {
            let f = random_boundary_function(&input.space, FunctionSpec::Uniform, cfg.seed.wrapping_add(i as u64));
            let back = trace(&extend(&f, &g, &nu), &g)?.trace;
            let err = f
                .values()
                .iter()
                .zip(back.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            worst = worst.max(err);
            passes += usize::from(err <= ROUND_TRIP_TOL);
        }
        Ok(CheckRecord::new("roundtrip", status(passes == cfg.functions))
            .with("functions", cfg.functions)
            .with("passes", passes)
            .with("max_error", worst)
            .with("tolerance", ROUND_TRIP_TOL))
    })?;
    if let Some(path) = function {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let f = io::parse_boundary_function(&input.space, &text)?;
        let ext = extend(&f, &g, &nu);
        let back = trace(&ext, &g)?.trace;
        files.push(write_file(&cfg.out, "extension.csv", &io::graph_function_to_csv(&g, &ext))?);
        files.push(write_file(&cfg.out, "trace.csv", &io::boundary_function_to_csv(&input.space, &back))?);
    }
    Ok((rec.finish(), files))
}

pub fn export_graph(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let input = load_input(cfg)?;
    let g = filling(cfg, &input.space)?;
    let u = uniformized(cfg, &g)?;
    let mut files = Vec::new();
    for f in &cfg.formats {
        let (name, text) = match f {
            ExportFormat::Graphml => ("filling.graphml", export::graphml(&g, Some(&u))),
            ExportFormat::Dot => ("filling.dot", export::dot(&g, Some(&u))),
            ExportFormat::Json => ("filling.json", export::json_adjacency(&g, Some(&u))),
            ExportFormat::Csv => ("boundary.csv", export::boundary_csv(&u.boundary_metric())),
        };
        files.push(write_file(&cfg.out, name, &text)?);
    }
    Ok(files)
}

/// Writes the generated space and, for tree kinds, the tree.
pub fn gen(kind: &SpaceKind, out: &Path) -> Result<Vec<PathBuf>> {
    let g = generate_space(kind)?;
    let mut files = vec![write_file(out, "space.json", &io::space_to_json(&g.space))?];
    if let Some(t) = &g.tree {
        files.push(write_file(out, "tree.txt", &io::tree_to_text(t))?);
    }
    Ok(files)
}

pub fn series(kind: SeriesKind, paths: &[PathBuf]) -> Result<String> {
    let mut reports = Vec::new();
    for p in paths {
        let text = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
        reports.push(VerificationReport::from_json(&text)?);
    }
    emit_series(&reports, kind)
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    io::write(&path, contents)?;
    Ok(path)
}
