//! The map from a filling to a filling of its own uniformized boundary.
//!
//! A vertex `x` goes to `(z, n)` with `alpha_hat^{-n-1} < dh(x) <= alpha_hat^{-n}`,
//! where `dh = (eps/e) d_eps` is the rescaled uniformized metric and `z` is a
//! point of the level-`n` net nearest to `x`. Target vertices below the
//! target's truncation level sit on rays, and distances to them are extended
//! along the ray.

use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filling::{FillingGraph, Vertex};
use crate::metric::FiniteMetricSpace;
use crate::nets::scale;
use crate::uniformize::UniformizedFilling;

/// Pair sweeps are exhaustive up to this many pairs.
pub const EXHAUSTIVE_PAIRS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoughSimilarityReport {
    pub l: f64,
    pub best_c: f64,
    pub max_violation: f64,
    pub coverage_c: f64,
    pub pairs: usize,
    pub exhaustive: bool,
    /// `Phi(x)` for every source vertex, in source vertex order.
    pub image: Vec<Vertex>,
}

/// The boundary of `u` with metric `(eps/e) d_eps`, ready to be filled.
pub fn rescaled_boundary(u: &UniformizedFilling) -> Result<FiniteMetricSpace> {
    u.boundary_metric().scaled_space(u.eps() / std::f64::consts::E)
}

/// Level index of a point at rescaled distance `dh` from the boundary.
fn level_for(alpha_hat: f64, dh: f64) -> u32 {
    let mut n = ((-dh.ln()) / alpha_hat.ln()).floor().max(0.0) as u32;
    while n > 0 && scale(alpha_hat, n) < dh {
        n -= 1;
    }
    while scale(alpha_hat, n + 1) >= dh {
        n += 1;
    }
    n
}

/// Fits the additive constant of `Phi`. `target` must be a filling of
/// [`rescaled_boundary`] built with nets at scale `alpha_hat`.
pub fn rough_similarity(
    source: &UniformizedFilling,
    target: &FillingGraph,
    alpha_hat: f64,
    samples: usize,
    seed: u64,
) -> Result<RoughSimilarityReport> {
    let g = source.graph();
    let np = g.space().len();
    if target.alpha() != alpha_hat {
        return Err(Error::BadParams(format!(
            "target filling has alpha {} but alpha_hat is {alpha_hat}",
            target.alpha()
        )));
    }
    if target.space().len() != np {
        return Err(Error::BadParams("target is not a filling of the source boundary".into()));
    }
    if target.space().diam() >= 1.0 {
        return Err(Error::ScaleMismatch(target.space().diam()));
    }
    let eps = source.eps();
    let shrink = eps / std::f64::consts::E;
    let nv = g.vertex_count();
    let t_trunc = target.n_trunc();

    let image: Vec<Vertex> = (0..nv)
        .into_par_iter()
        .map(|x| {
            let dh = shrink * source.whitney(g.vertex(x).level);
            let n = level_for(alpha_hat, dh);
            let d = source.dijkstra(&[(x, 0.0)]);
            let net = target.nets().level(n.min(t_trunc)).expect("target nets reach truncation");
            let mut best = (f64::INFINITY, usize::MAX);
            for &z in net {
                let dz = d[nv + z];
                if dz < best.0 {
                    best = (dz, z);
                }
            }
            Vertex::new(best.1, n)
        })
        .collect();

    let clamp = |v: Vertex| -> Result<usize> {
        target
            .find(v.point, v.level.min(t_trunc))
            .ok_or(Error::UnknownVertex { point: v.point, level: v.level })
    };
    let clamped: Vec<usize> = image.iter().map(|&v| clamp(v)).collect::<Result<_>>()?;
    let mut rows: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for &c in &clamped {
        rows.entry(c).or_default();
    }
    let keys: Vec<usize> = rows.keys().copied().collect();
    let computed: Vec<Vec<u32>> = keys.par_iter().map(|&c| target.bfs(c)).collect();
    for (k, r) in keys.into_iter().zip(computed) {
        rows.insert(k, r);
    }
    let ext = |n: u32| n.saturating_sub(t_trunc) as f64;
    let target_dist = |a: usize, b: usize| -> f64 {
        let (va, vb) = (image[a], image[b]);
        if va.point == vb.point && va.level >= t_trunc && vb.level >= t_trunc {
            return (va.level as f64 - vb.level as f64).abs();
        }
        rows[&clamped[a]][clamped[b]] as f64 + ext(va.level) + ext(vb.level)
    };

    let l = alpha_hat.ln() / eps;
    let total = nv * nv.saturating_sub(1) / 2;
    let exhaustive = total <= EXHAUSTIVE_PAIRS;
    let pairs: Vec<(usize, usize)> = if exhaustive {
        (0..nv).flat_map(|a| ((a + 1)..nv).map(move |b| (a, b))).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples)
            .map(|_| loop {
                let (a, b) = (rng.gen_range(0..nv), rng.gen_range(0..nv));
                if a != b {
                    break (a.min(b), a.max(b));
                }
            })
            .collect()
    };
    let mut by_source: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in &pairs {
        by_source.entry(a).or_default().push(b);
    }
    let best_c = by_source
        .par_iter()
        .map(|(&a, bs)| {
            let dx = g.bfs(a);
            bs.iter()
                .map(|&b| (target_dist(a, b) - l * dx[b] as f64).abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);

    // Multi-source search over target vertices up to the deepest image level.
    let top = image.iter().map(|v| v.level).max().unwrap_or(0).min(t_trunc);
    let mut dist = vec![u32::MAX; target.vertex_count()];
    let mut queue = VecDeque::new();
    for &c in &clamped {
        if dist[c] == u32::MAX {
            dist[c] = 0;
            queue.push_back(c);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &(w, _) in target.neighbors(v) {
            if dist[w] == u32::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    let coverage_c = (0..target.vertex_count())
        .filter(|&id| target.vertex(id).level <= top)
        .map(|id| dist[id] as f64)
        .fold(0.0, f64::max);

    Ok(RoughSimilarityReport {
        l,
        best_c,
        max_violation: 0.0,
        coverage_c,
        pairs: pairs.len(),
        exhaustive,
        image,
    })
}
