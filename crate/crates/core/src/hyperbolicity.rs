//! The base-point four-point constant
//! `C = max_{u,v,w} min{(v|u), (w|u)} - (v|w)`.
//!
//! Rays that hang off the graph (a vertex `(z, m)` whose only neighbors are
//! `(z, m - 1)` and `(z, m + 1)`, for every `m` past some level) never raise
//! the constant: a vertex at distance `t` down such a ray has the same
//! products with every vertex off the ray as the ray's attaching vertex, and
//! triples with two vertices on one ray have nonpositive defect. The search
//! therefore runs over the remaining core vertices, with distances taken in
//! the full graph.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::filling::{FillingGraph, HalfInt, Vertex};

pub const DEFAULT_CAP: usize = 400;
pub const DEFAULT_SAMPLES: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperbolicityReport {
    pub c: HalfInt,
    pub exhaustive: bool,
    /// `(u, v, w)` attaining `c`.
    pub witness: Option<(Vertex, Vertex, Vertex)>,
    pub core_vertices: usize,
    pub triples: u64,
}

impl HyperbolicityReport {
    pub fn value(&self) -> f64 {
        self.c.to_f64()
    }
}

/// Vertex ids not strictly inside a hanging ray.
pub fn core_vertices(g: &FillingGraph) -> Vec<usize> {
    let pendant: Vec<u32> = (0..g.space().len()).map(|p| g.pendant_level(p)).collect();
    (0..g.vertex_count())
        .filter(|&id| {
            let v = g.vertex(id);
            v.level <= pendant[v.point]
        })
        .collect()
}

/// Doubled Gromov products among `ids`, row-major.
pub fn product_matrix(g: &FillingGraph, ids: &[usize]) -> Vec<u16> {
    let k = ids.len();
    let rows: Vec<Vec<u16>> = ids
        .par_iter()
        .map(|&a| {
            let d = g.bfs(a);
            let la = g.vertex(a).level as i64;
            ids.iter()
                .map(|&b| (la + g.vertex(b).level as i64 - d[b] as i64) as u16)
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(k * k);
    for r in rows {
        out.extend(r);
    }
    out
}

/// Best `(defect, u, v, w)` for a fixed `u`, over all `v, w`.
fn best_for_u(p: &[u16], k: usize, u: usize, order: &mut Vec<usize>) -> (i64, usize, usize, usize) {
    let row_u = &p[u * k..(u + 1) * k];
    order.clear();
    order.extend(0..k);
    order.sort_unstable_by(|&a, &b| row_u[b].cmp(&row_u[a]));
    let mut best = (i64::MIN, u, u, u);
    // With v ranked before w, min{(v|u), (w|u)} = (w|u); once that falls
    // to the current best no later w can improve it.
    for (j, &w) in order.iter().enumerate() {
        let aw = row_u[w] as i64;
        if aw <= best.0 {
            break;
        }
        let row_w = &p[w * k..(w + 1) * k];
        for &v in &order[..=j] {
            let defect = aw - row_w[v] as i64;
            if defect > best.0 {
                best = (defect, u, v, w);
            }
        }
    }
    best
}

/// Four-point constant of the filling. Exhaustive when the core has at most
/// `cap` vertices; otherwise the maximum over `samples` seeded triples drawn
/// in independent per-chunk streams.
pub fn hyperbolicity_constant(g: &FillingGraph, cap: usize, samples: usize, seed: u64) -> HyperbolicityReport {
    let ids = core_vertices(g);
    let k = ids.len();
    let p = product_matrix(g, &ids);
    let exhaustive = k <= cap;
    let (best, triples) = if exhaustive {
        let best = (0..k)
            .into_par_iter()
            .map_init(Vec::new, |order, u| best_for_u(&p, k, u, order))
            .reduce(|| (i64::MIN, 0, 0, 0), pick);
        (best, (k as u64).pow(3))
    } else {
        const CHUNK: usize = 65_536;
        let chunks = samples.div_ceil(CHUNK);
        let best = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(c as u64);
                let n = CHUNK.min(samples - c * CHUNK);
                let mut best = (i64::MIN, 0, 0, 0);
                for _ in 0..n {
                    let (u, v, w) = (rng.gen_range(0..k), rng.gen_range(0..k), rng.gen_range(0..k));
                    let d = (p[u * k + v].min(p[u * k + w]) as i64) - p[v * k + w] as i64;
                    best = pick(best, (d, u, v, w));
                }
                best
            })
            .reduce(|| (i64::MIN, 0, 0, 0), pick);
        (best, samples as u64)
    };
    let (c, u, v, w) = best;
    HyperbolicityReport {
        c: HalfInt(c.max(0)),
        exhaustive,
        witness: (c > i64::MIN).then(|| (g.vertex(ids[u]), g.vertex(ids[v]), g.vertex(ids[w]))),
        core_vertices: k,
        triples,
    }
}

/// Larger defect wins; ties go to the lexicographically smallest triple so
/// the result does not depend on the reduction order.
fn pick(a: (i64, usize, usize, usize), b: (i64, usize, usize, usize)) -> (i64, usize, usize, usize) {
    if b.0 > a.0 || (b.0 == a.0 && (b.1, b.2, b.3) < (a.1, a.2, a.3)) {
        b
    } else {
        a
    }
}
