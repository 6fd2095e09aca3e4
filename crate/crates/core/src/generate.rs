//! Generators for the test spaces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{validate_and_rescale, FiniteMetricSpace, RawPoints, DEFAULT_TARGET_DIAM};
use crate::tree::{random_tree, tree_boundary_space, RootedTree};

/// Named generator with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceKind {
    /// `k` equally spaced points.
    IntervalNet { k: usize },
    /// `k^dim` lattice points of a cube.
    Grid { dim: usize, k: usize },
    /// The `2^depth` endpoints of the generation `depth - 1` intervals of the
    /// Cantor construction removing middle parts, keeping `ratio` per side.
    Cantor { depth: u32, ratio: f64 },
    /// Two intervals `[0, 1/4 - rho]`, `[1/4 + rho, 1/2]` sampled on the
    /// `2^{-n-2}` grid together with the gap ends.
    SlitExample {
        n: u32,
        rho: Option<f64>,
        tau: Option<f64>,
    },
    /// Iterated gluing of slit examples with depths `ns[0] < ns[1] < ...`.
    SlitFamily { ns: Vec<u32> },
    /// `base` with distances raised to `exponent`.
    Snowflake {
        base: Box<SpaceKind>,
        exponent: f64,
    },
    /// Boundary of a seeded random tree.
    RandomTree {
        max_vertices: usize,
        max_children: usize,
        seed: u64,
        eps: f64,
        tau: f64,
    },
}

/// A generated space and, for tree kinds, the tree it came from.
#[derive(Debug, Clone)]
pub struct Generated {
    pub space: FiniteMetricSpace,
    pub tree: Option<RootedTree>,
}

pub fn generate_space(kind: &SpaceKind) -> Result<Generated> {
    let space = match kind {
        SpaceKind::IntervalNet { k } => interval_net(*k)?,
        SpaceKind::Grid { dim, k } => grid(*dim, *k)?,
        SpaceKind::Cantor { depth, ratio } => cantor(*depth, *ratio)?,
        SpaceKind::SlitExample { n, rho, tau } => slit_example(*n, *rho, *tau)?,
        SpaceKind::SlitFamily { ns } => slit_family(ns)?,
        SpaceKind::Snowflake { base, exponent } => {
            let base = generate_space(base)?.space;
            base.snowflake(*exponent, DEFAULT_TARGET_DIAM)?
        }
        SpaceKind::RandomTree {
            max_vertices,
            max_children,
            seed,
            eps,
            tau,
        } => {
            let tree = random_tree(*max_vertices, *max_children, *seed)?;
            let space = tree_boundary_space(&tree, *eps, *tau)?;
            return Ok(Generated {
                space,
                tree: Some(tree),
            });
        }
    };
    Ok(Generated { space, tree: None })
}

fn from_line(xs: &[f64]) -> Result<FiniteMetricSpace> {
    validate_and_rescale(
        RawPoints::Coordinates(xs.iter().map(|&x| (None, vec![x])).collect()),
        DEFAULT_TARGET_DIAM,
    )
}

/// `k` equally spaced points of `[0, 1/2]`.
pub fn interval_net(k: usize) -> Result<FiniteMetricSpace> {
    if k == 0 {
        return Err(Error::BadParams("interval_net needs k >= 1".into()));
    }
    let xs: Vec<f64> = (0..k).map(|i| i as f64).collect();
    from_line(&xs)
}

/// Lattice `{0, ..., k-1}^dim`, rescaled.
pub fn grid(dim: usize, k: usize) -> Result<FiniteMetricSpace> {
    if dim == 0 || k == 0 {
        return Err(Error::BadParams("grid needs dim >= 1 and k >= 1".into()));
    }
    let total = k
        .checked_pow(dim as u32)
        .filter(|&t| t <= 20_000)
        .ok_or_else(|| Error::BadParams(format!("grid {k}^{dim} is too large")))?;
    let pts = (0..total)
        .map(|mut idx| {
            let mut c = Vec::with_capacity(dim);
            for _ in 0..dim {
                c.push((idx % k) as f64);
                idx /= k;
            }
            (None, c)
        })
        .collect();
    validate_and_rescale(RawPoints::Coordinates(pts), DEFAULT_TARGET_DIAM)
}

/// Endpoints of the intervals of generation `depth - 1`, ascending.
pub fn cantor(depth: u32, ratio: f64) -> Result<FiniteMetricSpace> {
    if depth == 0 || depth > 14 {
        return Err(Error::BadParams(format!("cantor depth {depth} must lie in 1..=14")));
    }
    if !(ratio > 0.0 && ratio < 0.5) {
        return Err(Error::BadParams(format!("cantor ratio {ratio} must lie in (0, 1/2)")));
    }
    let mut intervals = vec![(0.0f64, 1.0f64)];
    for _ in 1..depth {
        intervals = intervals
            .iter()
            .flat_map(|&(a, b)| {
                let l = (b - a) * ratio;
                [(a, a + l), (b - l, b)]
            })
            .collect();
    }
    let xs: Vec<f64> = intervals.iter().flat_map(|&(a, b)| [a, b]).collect();
    from_line(&xs)
}

/// Dyadic level of `x = k 2^{-m}` (smallest such `m`), for `x` on the
/// `2^{-max}` grid.
fn dyadic_level(k: u64, max: u32) -> u32 {
    if k == 0 {
        return 0;
    }
    max - k.trailing_zeros().min(max)
}

/// Default gap half-width for depth `n`.
pub fn default_rho(n: u32) -> f64 {
    0.8 * 2f64.powi(-(n as i32) - 1)
}

/// Sample points of one slit example in `[0, 1/2]`, with ordering keys.
/// Keys place coarse dyadic levels first and the gap ends just before the
/// multiples of `2^{-n}`, so the greedy nets follow the coarse dyadic grid.
fn slit_points(n: u32, rho: f64) -> Vec<((u32, u8), f64)> {
    let fine = n + 2;
    let steps = 1u64 << (fine - 1);
    let h = 2f64.powi(-(fine as i32));
    let (zm, zp) = (0.25 - rho, 0.25 + rho);
    let mut out = Vec::new();
    for k in 0..=steps {
        let x = k as f64 * h;
        if x <= zm || x >= zp {
            out.push(((dyadic_level(k, fine), 1), x));
        }
    }
    for z in [zm, zp] {
        if !out.iter().any(|&(_, x)| x == z) {
            out.push(((n, 0), z));
        }
    }
    out
}

fn ordered_space(mut pts: Vec<((u32, u8), f64)>) -> Result<FiniteMetricSpace> {
    pts.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.partial_cmp(&b.1).unwrap()));
    let xs: Vec<f64> = pts.iter().map(|p| p.1).collect();
    from_line(&xs)
}

/// The two-interval space with a gap of half-width `rho` around 1/4.
pub fn slit_example(n: u32, rho: Option<f64>, tau: Option<f64>) -> Result<FiniteMetricSpace> {
    if !(3..=20).contains(&n) {
        return Err(Error::BadParams(format!("slit_example needs 3 <= n <= 20, got {n}")));
    }
    let rho = rho.unwrap_or_else(|| default_rho(n));
    let bound = 2f64.powi(-(n as i32) - 1);
    if !(rho > 0.0 && rho < bound) {
        return Err(Error::BadParams(format!(
            "slit_example needs 0 < rho < 2^(-n-1) = {bound}, got {rho}"
        )));
    }
    if let Some(tau) = tau {
        if !(1.0..1.25).contains(&tau) || rho < (tau - 1.0) / 4.0 {
            return Err(Error::BadParams(format!(
                "slit_example needs 1 <= tau < 5/4 and rho >= (tau - 1)/4, got tau = {tau}"
            )));
        }
    }
    ordered_space(slit_points(n, rho))
}

/// Iterated gluing: starting from the slit example of depth `ns[0]`, the
/// piece `[0, 2^{-N_{j-1}-1}]` is replaced by a `2^{-N_{j-1}}`-scaled copy
/// of the slit example of depth `ns[j]`, where `N_j = ns[0] + ... + ns[j]`.
pub fn slit_family(ns: &[u32]) -> Result<FiniteMetricSpace> {
    if ns.is_empty() {
        return Err(Error::BadParams("slit_family needs at least one depth".into()));
    }
    if ns.iter().any(|&n| n < 3) || ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::BadParams(format!(
            "slit_family depths must be increasing and >= 3, got {ns:?}"
        )));
    }
    let total: u32 = ns.iter().sum();
    if total > 40 {
        return Err(Error::BadParams(format!("slit_family total depth {total} exceeds 40")));
    }
    let mut pts = slit_points(ns[0], default_rho(ns[0]));
    let mut offset = ns[0];
    for &n in &ns[1..] {
        let s = 2f64.powi(-(offset as i32));
        let cut = s * 0.5;
        pts.retain(|&(_, x)| x > cut);
        for ((lvl, sub), x) in slit_points(n, default_rho(n)) {
            // z_0 stays the root.
            let key = if x == 0.0 { (0, sub) } else { (lvl + offset, sub) };
            pts.push((key, x * s));
        }
        offset += n;
    }
    ordered_space(pts)
}
