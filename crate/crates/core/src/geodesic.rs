//! Structure of geodesics in fillings with `tau >= (alpha + 1)/(alpha - 1)`.
//!
//! Every geodesic between vertex pairs up to a level budget is enumerated
//! from the breadth-first predecessor structure and checked against five
//! statements:
//!
//! * `skip_triangle`: no segment `(x,n) ~ (z,n+1) ~ (y,n)`;
//! * `ladder`: no segment `(x1,n) ~ (x2,n+1) ~ (y2,n+1) ~ (y1,n)`;
//! * `not_down_up`: a segment `(x,n) ~ (y,n+1) ~ (z,n+1)` can be rerouted
//!   through some `(y',n)`, and no geodesic has an interior vertex strictly
//!   deeper than a vertex before it and a vertex after it;
//! * `bounded_horizon`: no horizontal run has length `>= 2 n0`;
//! * `normal_form`: every pair is joined by a geodesic that climbs, runs at
//!   most `2 n0 - 1` horizontal steps, then descends.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filling::{FillingGraph, Vertex};

pub const DEFAULT_GEODESIC_CAP: usize = 100_000;

/// Smallest positive `n` with `n alpha^{1-n} <= 1/(alpha + 1)`.
pub fn n0(alpha: f64) -> u32 {
    let mut n = 1u32;
    while n as f64 * alpha.powi(1 - n as i32) > 1.0 / (alpha + 1.0) {
        n += 1;
    }
    n
}

/// Smallest admissible `tau` for the geodesic statements.
pub fn regime_tau(alpha: f64) -> f64 {
    (alpha + 1.0) / (alpha - 1.0)
}

pub const LEMMAS: [&str; 5] = [
    "skip_triangle",
    "ladder",
    "not_down_up",
    "bounded_horizon",
    "normal_form",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaStatus {
    pub name: String,
    pub violations: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicReport {
    pub n0: u32,
    pub level_budget: u32,
    pub pairs: usize,
    pub geodesics: u64,
    /// Pairs whose enumeration stopped at the cap.
    pub cap_hits: usize,
    pub lemmas: Vec<LemmaStatus>,
    /// `(lemma, vertex sequence)` for each recorded violation.
    pub witnesses: Vec<(String, Vec<Vertex>)>,
}

impl GeodesicReport {
    pub fn all_pass(&self) -> bool {
        self.lemmas.iter().all(|l| l.pass)
    }
}

struct Scan<'g> {
    g: &'g FillingGraph,
    dist: Vec<u16>,
    n: usize,
    n0: u32,
    counts: [usize; 5],
    witnesses: Vec<(String, Vec<Vertex>)>,
}

const MAX_WITNESSES: usize = 20;

impl<'g> Scan<'g> {
    fn d(&self, a: usize, b: usize) -> u16 {
        self.dist[a * self.n + b]
    }

    fn level(&self, a: usize) -> u32 {
        self.g.vertex(a).level
    }

    fn flag(&mut self, lemma: usize, path: &[usize]) {
        self.counts[lemma] += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            let p = path.iter().map(|&i| self.g.vertex(i)).collect();
            self.witnesses.push((LEMMAS[lemma].to_string(), p));
        }
    }

    fn check_path(&mut self, path: &[usize]) {
        let lv: Vec<u32> = path.iter().map(|&i| self.level(i)).collect();
        let m = path.len();
        for i in 0..m.saturating_sub(2) {
            if lv[i] == lv[i + 2] && lv[i + 1] == lv[i] + 1 {
                self.flag(0, &path[i..i + 3]);
            }
        }
        for i in 0..m.saturating_sub(3) {
            if lv[i] == lv[i + 3] && lv[i + 1] == lv[i] + 1 && lv[i + 2] == lv[i] + 1 {
                self.flag(1, &path[i..i + 4]);
            }
        }
        // Reroutable down-then-across segments, in either direction.
        for i in 0..m.saturating_sub(2) {
            let (x, z) = (path[i], path[i + 2]);
            let down_across = lv[i + 1] == lv[i] + 1 && lv[i + 2] == lv[i + 1];
            let across_up = lv[i] == lv[i + 1] && lv[i + 2] + 1 == lv[i + 1];
            let (top, bottom) = if down_across {
                (x, z)
            } else if across_up {
                (z, x)
            } else {
                continue;
            };
            let n = self.level(top);
            let ok = self.g.neighbors(top).iter().any(|&(y, _)| {
                self.level(y) == n && self.g.are_adjacent(y, bottom)
            });
            if !ok {
                self.flag(2, &path[i..i + 3]);
            }
        }
        let mut prefix_min = u32::MAX;
        let mut suffix_min = vec![u32::MAX; m + 1];
        for i in (0..m).rev() {
            suffix_min[i] = suffix_min[i + 1].min(lv[i]);
        }
        for j in 0..m {
            if j > 0 && prefix_min < lv[j] && suffix_min[j + 1] < lv[j] {
                self.flag(2, path);
                break;
            }
            prefix_min = prefix_min.min(lv[j]);
        }
        let mut run = 0u32;
        for i in 1..m {
            run = if lv[i] == lv[i - 1] { run + 1 } else { 0 };
            if run >= 2 * self.n0 {
                self.flag(3, path);
                break;
            }
        }
    }

    /// Whether a normal-form geodesic joins `a` to `b`.
    fn has_normal_form(&self, a: usize, b: usize) -> bool {
        let total = self.d(a, b);
        let max_h = 2 * self.n0 - 1;
        // Phase 0 climbs, phase 1 runs horizontally, phase 2 descends.
        let mut stack = vec![(a, 0u8, 0u32)];
        let mut seen = std::collections::HashSet::new();
        while let Some((v, phase, h)) = stack.pop() {
            if v == b {
                return true;
            }
            if !seen.insert((v, phase, h)) {
                continue;
            }
            let dv = self.d(a, v);
            let lv = self.level(v);
            for &(w, _) in self.g.neighbors(v) {
                if self.d(a, w) != dv + 1 || self.d(w, b) != total - dv - 1 {
                    continue;
                }
                let lw = self.level(w);
                let next = if lw + 1 == lv {
                    (phase == 0).then_some((0u8, h))
                } else if lw == lv {
                    (phase <= 1 && h < max_h).then_some((1u8, h + 1))
                } else {
                    Some((2u8, h))
                };
                if let Some((p, hh)) = next {
                    stack.push((w, p, hh));
                }
            }
        }
        false
    }

    /// Enumerates geodesics from `a` to `b`; returns how many were visited
    /// and whether the cap stopped the enumeration.
    fn enumerate(&mut self, a: usize, b: usize, cap: usize) -> (u64, bool) {
        let total = self.d(a, b);
        let mut path = vec![a];
        let mut iters: Vec<usize> = vec![0];
        let mut count = 0u64;
        while let Some(it) = iters.last_mut() {
            let v = *path.last().unwrap();
            if v == b {
                let p = path.clone();
                self.check_path(&p);
                count += 1;
                if count as usize >= cap {
                    return (count, true);
                }
                path.pop();
                iters.pop();
                continue;
            }
            let nb = self.g.neighbors(v);
            let dv = self.d(a, v);
            let mut advanced = false;
            while *it < nb.len() {
                let w = nb[*it].0;
                *it += 1;
                if self.d(a, w) == dv + 1 && self.d(w, b) == total - dv - 1 {
                    path.push(w);
                    iters.push(0);
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                path.pop();
                iters.pop();
            }
        }
        (count, false)
    }
}

/// All-pairs edge distances, row-major.
pub fn distance_matrix(g: &FillingGraph) -> Vec<u16> {
    let n = g.vertex_count();
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n {
        out.extend(g.bfs(a).into_iter().map(|d| d.min(u16::MAX as u32) as u16));
    }
    out
}

/// Runs every check and records violations without failing.
pub fn geodesic_structure_scan(g: &FillingGraph, level_budget: u32, cap: usize) -> Result<GeodesicReport> {
    let required = regime_tau(g.alpha());
    if g.tau() < required {
        return Err(Error::NotInRegime {
            tau: g.tau(),
            required,
        });
    }
    let n = g.vertex_count();
    let mut scan = Scan {
        g,
        dist: distance_matrix(g),
        n,
        n0: n0(g.alpha()),
        counts: [0; 5],
        witnesses: Vec::new(),
    };
    let ids: Vec<usize> = (0..n).filter(|&i| g.vertex(i).level <= level_budget).collect();
    let (mut pairs, mut geodesics, mut cap_hits) = (0usize, 0u64, 0usize);
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            pairs += 1;
            let (c, hit) = scan.enumerate(a, b, cap);
            geodesics += c;
            cap_hits += hit as usize;
            if !scan.has_normal_form(a, b) {
                scan.flag(4, &[a, b]);
            }
        }
    }
    let lemmas = LEMMAS
        .iter()
        .zip(scan.counts)
        .map(|(name, v)| LemmaStatus {
            name: name.to_string(),
            violations: v,
            pass: v == 0,
        })
        .collect();
    Ok(GeodesicReport {
        n0: scan.n0,
        level_budget,
        pairs,
        geodesics,
        cap_hits,
        lemmas,
        witnesses: scan.witnesses,
    })
}

/// Like [`geodesic_structure_scan`] but fails on the first violation.
pub fn geodesic_structure_check(g: &FillingGraph, level_budget: u32, cap: usize) -> Result<GeodesicReport> {
    let r = geodesic_structure_scan(g, level_budget, cap)?;
    if let Some((lemma, path)) = r.witnesses.first() {
        return Err(Error::LemmaViolation {
            lemma: lemma.clone(),
            path: path.iter().map(|v| (v.point, v.level)).collect(),
        });
    }
    Ok(r)
}
