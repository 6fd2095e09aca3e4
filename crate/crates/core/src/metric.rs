//! Finite metric spaces: validation, rescaling, open balls, and the
//! doubling-constant estimate.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute slack allowed in the triangle inequality.
pub const TRIANGLE_TOL: f64 = 1e-9;

/// Default diameter after rescaling.
pub const DEFAULT_TARGET_DIAM: f64 = 0.5;

/// Above this point count the doubling estimate samples instead of sweeping.
pub const EXHAUSTIVE_DOUBLING_LIMIT: usize = 200;

/// A point of a finite space. `index` is dense in `0..len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointId {
    pub index: usize,
    pub label: Option<String>,
}

/// Raw input accepted by [`validate_and_rescale`].
#[derive(Debug, Clone)]
pub enum RawPoints {
    /// Labeled Euclidean coordinates.
    Coordinates(Vec<(Option<String>, Vec<f64>)>),
    /// A full distance matrix with optional labels.
    Matrix {
        labels: Vec<Option<String>>,
        dist: Vec<Vec<f64>>,
    },
}

/// A validated finite metric space with `diam < 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteMetricSpace {
    points: Vec<PointId>,
    dist: Vec<f64>,
    diam: f64,
    min_sep: f64,
    scale_factor: f64,
}

impl FiniteMetricSpace {
    /// Builds a space from a distance matrix that is used as is (no
    /// rescaling). The diameter must already be below 1.
    pub fn from_matrix(labels: Vec<Option<String>>, dist: Vec<Vec<f64>>) -> Result<Self> {
        let n = dist.len();
        let flat = flatten_checked(&dist)?;
        let labels = if labels.is_empty() { vec![None; n] } else { labels };
        let space = Self::assemble(labels, flat, 1.0)?;
        if space.diam >= 1.0 {
            return Err(Error::BadParams(format!(
                "diameter {} must be below 1 when not rescaling",
                space.diam
            )));
        }
        Ok(space)
    }

    fn assemble(labels: Vec<Option<String>>, dist: Vec<f64>, scale_factor: f64) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        if dist.len() != n * n {
            return Err(Error::Malformed(format!(
                "{} labels but {} matrix entries",
                n,
                dist.len()
            )));
        }
        let mut seen = HashSet::new();
        for l in labels.iter().flatten() {
            if !seen.insert(l.clone()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        check_metric(n, &dist)?;
        let mut diam = 0.0f64;
        let mut min_sep = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = dist[i * n + j];
                diam = diam.max(d);
                min_sep = min_sep.min(d);
            }
        }
        let points = labels
            .into_iter()
            .enumerate()
            .map(|(index, label)| PointId { index, label })
            .collect();
        Ok(Self {
            points,
            dist,
            diam,
            min_sep,
            scale_factor,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[PointId] {
        &self.points
    }

    pub fn label(&self, i: usize) -> String {
        self.points[i]
            .label
            .clone()
            .unwrap_or_else(|| i.to_string())
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.points.len() + j]
    }

    /// Row `i` of the distance matrix.
    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.points.len();
        &self.dist[i * n..(i + 1) * n]
    }

    pub fn diam(&self) -> f64 {
        self.diam
    }

    /// Smallest distance between distinct points; infinite for a singleton.
    pub fn min_sep(&self) -> f64 {
        self.min_sep
    }

    /// Factor that was applied to the raw distances.
    pub fn scale_factor(&self) -> f64 {
        self.scale_factor
    }

    /// Open ball `{y : d(x, y) < r}` as a list of indices.
    pub fn ball(&self, x: usize, r: f64) -> Vec<usize> {
        self.row(x)
            .iter()
            .enumerate()
            .filter(|(_, &d)| d < r)
            .map(|(j, _)| j)
            .collect()
    }

    /// Whether the open balls `B(x, rx)` and `B(y, ry)` share a point of the
    /// space.
    pub fn balls_meet(&self, x: usize, rx: f64, y: usize, ry: f64) -> bool {
        let (rowx, rowy) = (self.row(x), self.row(y));
        rowx.iter().zip(rowy).any(|(&a, &b)| a < rx && b < ry)
    }

    /// Sum of `weights` over the open ball `B(x, r)`.
    pub fn ball_weight(&self, weights: &[f64], x: usize, r: f64) -> f64 {
        self.row(x)
            .iter()
            .zip(weights)
            .filter(|(&d, _)| d < r)
            .map(|(_, &w)| w)
            .sum()
    }

    /// Returns the space with every distance raised to `exponent` and then
    /// rescaled to `target_diam`.
    pub fn snowflake(&self, exponent: f64, target_diam: f64) -> Result<Self> {
        if !(exponent > 0.0 && exponent <= 1.0) {
            return Err(Error::BadParams(format!(
                "snowflake exponent {exponent} must lie in (0, 1]"
            )));
        }
        let n = self.len();
        let dist = (0..n)
            .map(|i| (0..n).map(|j| self.dist(i, j).powf(exponent)).collect())
            .collect();
        let labels = self.points.iter().map(|p| p.label.clone()).collect();
        validate_and_rescale(RawPoints::Matrix { labels, dist }, target_diam)
    }
}

fn flatten_checked(dist: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = dist.len();
    let mut flat = Vec::with_capacity(n * n);
    for (i, row) in dist.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Malformed(format!(
                "row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        for (j, &d) in row.iter().enumerate() {
            if !d.is_finite() || d < 0.0 {
                return Err(Error::InvalidDistance(i, j, d));
            }
            flat.push(d);
        }
    }
    Ok(flat)
}

fn check_metric(n: usize, d: &[f64]) -> Result<()> {
    for i in 0..n {
        if d[i * n + i] != 0.0 {
            return Err(Error::InvalidDistance(i, i, d[i * n + i]));
        }
        for j in (i + 1)..n {
            if d[i * n + j] != d[j * n + i] {
                return Err(Error::Malformed(format!("matrix not symmetric at ({i},{j})")));
            }
            if d[i * n + j] == 0.0 {
                return Err(Error::DuplicatePoints(i, j));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let dij = d[i * n + j];
            for k in 0..n {
                if d[i * n + k] > dij + d[j * n + k] + TRIANGLE_TOL {
                    return Err(Error::TriangleViolation(i, j, k));
                }
            }
        }
    }
    Ok(())
}

/// Validates raw input and rescales it so that the diameter equals
/// `target_diam` (a singleton is left unscaled).
pub fn validate_and_rescale(raw: RawPoints, target_diam: f64) -> Result<FiniteMetricSpace> {
    if !(target_diam > 0.0 && target_diam < 1.0) {
        return Err(Error::BadParams(format!(
            "target diameter {target_diam} must lie in (0, 1)"
        )));
    }
    let (labels, dist) = match raw {
        RawPoints::Coordinates(pts) => {
            if pts.is_empty() {
                return Err(Error::Empty);
            }
            let dim = pts[0].1.len();
            for (i, (_, c)) in pts.iter().enumerate() {
                if c.len() != dim {
                    return Err(Error::Malformed(format!(
                        "point {i} has dimension {}, expected {dim}",
                        c.len()
                    )));
                }
                if c.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Malformed(format!("point {i} has a non-finite coordinate")));
                }
            }
            let dist = pts
                .iter()
                .map(|(_, a)| {
                    pts.iter()
                        .map(|(_, b)| {
                            a.iter()
                                .zip(b)
                                .map(|(x, y)| (x - y) * (x - y))
                                .sum::<f64>()
                                .sqrt()
                        })
                        .collect()
                })
                .collect::<Vec<Vec<f64>>>();
            (pts.into_iter().map(|(l, _)| l).collect::<Vec<_>>(), dist)
        }
        RawPoints::Matrix { labels, dist } => {
            let labels = if labels.is_empty() {
                vec![None; dist.len()]
            } else {
                labels
            };
            (labels, dist)
        }
    };
    if labels.len() != dist.len() {
        return Err(Error::Malformed(format!(
            "{} labels for a {}x{} matrix",
            labels.len(),
            dist.len(),
            dist.len()
        )));
    }
    if dist.is_empty() {
        return Err(Error::Empty);
    }
    let flat = flatten_checked(&dist)?;
    let n = dist.len();
    // Validate before scaling so that witnesses refer to raw input.
    check_metric(n, &flat)?;
    let raw_diam = flat.iter().cloned().fold(0.0, f64::max);
    if raw_diam == 0.0 {
        return FiniteMetricSpace::assemble(labels, flat, 1.0);
    }
    // Dividing first makes the diametral pairs land exactly on target_diam.
    let scaled = flat.iter().map(|&d| (d / raw_diam) * target_diam).collect();
    FiniteMetricSpace::assemble(labels, scaled, target_diam / raw_diam)
}

/// Largest observed ratio `nu(B(x, 2r)) / nu(B(x, r))`.
///
/// Up to [`EXHAUSTIVE_DOUBLING_LIMIT`] points the sweep is exact: for each
/// center the ratio is piecewise constant in `r` with breakpoints at the
/// distances `d` and half-distances `d / 2` from the center, so evaluating at
/// every breakpoint realizes the supremum. Larger spaces use `samples`
/// seeded draws with radii log-uniform in `[min_sep / 2, 2 diam]`.
pub fn doubling_constant_estimate(
    space: &FiniteMetricSpace,
    weights: &[f64],
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if weights.len() != space.len() {
        return Err(Error::BadParams(format!(
            "{} weights for {} points",
            weights.len(),
            space.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
        return Err(Error::BadParams(format!("weight {w} is not strictly positive")));
    }
    let n = space.len();
    if n == 1 {
        return Ok(1.0);
    }
    let ratio = |x: usize, r: f64| space.ball_weight(weights, x, 2.0 * r) / space.ball_weight(weights, x, r);
    let mut best = 1.0f64;
    if n <= EXHAUSTIVE_DOUBLING_LIMIT {
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                let d = space.dist(x, y);
                best = best.max(ratio(x, d)).max(ratio(x, d / 2.0));
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lo, hi) = ((space.min_sep() / 2.0).ln(), (2.0 * space.diam()).ln());
        for _ in 0..samples {
            let x = rng.gen_range(0..n);
            let r = rng.gen_range(lo..=hi).exp();
            best = best.max(ratio(x, r));
        }
    }
    Ok(best)
}
