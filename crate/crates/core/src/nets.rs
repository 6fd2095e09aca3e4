//! Nested maximal separated nets `A_0 ⊆ A_1 ⊆ ...`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;

/// `alpha^{-n}`. Every scale comparison in the crate goes through this so
/// that equal radii compare equal in floating point.
#[inline]
pub fn scale(alpha: f64, n: u32) -> f64 {
    alpha.powi(-(n as i32))
}

/// Smallest `n >= 0` with `alpha^{-n} <= min_sep`.
pub fn isolation_level(alpha: f64, min_sep: f64) -> u32 {
    let mut n = 0;
    while scale(alpha, n) > min_sep {
        n += 1;
    }
    n
}

/// Greedy nested nets. Point 0 is the root `z_0`.
#[derive(Debug, Clone, Serialize)]
pub struct NetHierarchy {
    #[serde(skip)]
    space: Arc<FiniteMetricSpace>,
    alpha: f64,
    depth: u32,
    n_iso: u32,
    /// Level at which each point enters the hierarchy.
    entry: Vec<u32>,
    levels: Vec<Vec<usize>>,
}

/// Builds `A_0, ..., A_max_depth` greedily in ascending index order.
pub fn build_nets(space: Arc<FiniteMetricSpace>, alpha: f64, max_depth: u32) -> Result<NetHierarchy> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::BadParams(format!("alpha {alpha} must be > 1")));
    }
    let n_pts = space.len();
    let n_iso = isolation_level(alpha, space.min_sep());
    if max_depth < n_iso {
        log::warn!("net depth {max_depth} is below the isolation level {n_iso}");
    }
    let mut entry = vec![u32::MAX; n_pts];
    entry[0] = 0;
    let mut current = vec![0usize];
    let mut levels = vec![current.clone()];
    for n in 1..=max_depth {
        let r = scale(alpha, n);
        for p in 0..n_pts {
            if entry[p] != u32::MAX {
                continue;
            }
            if current.iter().all(|&q| space.dist(p, q) >= r) {
                entry[p] = n;
                current.push(p);
            }
        }
        current.sort_unstable();
        levels.push(current.clone());
    }
    Ok(NetHierarchy {
        space,
        alpha,
        depth: max_depth,
        n_iso,
        entry,
        levels,
    })
}

impl NetHierarchy {
    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn space_arc(&self) -> Arc<FiniteMetricSpace> {
        Arc::clone(&self.space)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn isolation_level(&self) -> u32 {
        self.n_iso
    }

    pub fn root(&self) -> usize {
        0
    }

    /// Whether the stored levels reach the isolation level, so that every
    /// deeper level is known to be the full set.
    pub fn is_complete(&self) -> bool {
        self.depth >= self.n_iso
    }

    /// `A_n`, sorted by index. Levels past the stored depth are available
    /// once the hierarchy is complete.
    pub fn level(&self, n: u32) -> Result<&[usize]> {
        if n <= self.depth {
            Ok(&self.levels[n as usize])
        } else if self.is_complete() {
            Ok(&self.levels[self.depth as usize])
        } else {
            Err(Error::NetsTooShallow {
                have: self.depth,
                need: n,
            })
        }
    }

    /// Whether point `p` belongs to `A_n`.
    pub fn contains(&self, p: usize, n: u32) -> bool {
        self.entry[p] <= n
    }

    /// First level containing `p`, if within the stored depth.
    pub fn entry_level(&self, p: usize) -> Option<u32> {
        (self.entry[p] != u32::MAX).then_some(self.entry[p])
    }

    /// Returns a hierarchy with at least `depth` stored levels.
    pub fn deepened(&self, depth: u32) -> Result<NetHierarchy> {
        if depth <= self.depth {
            return Ok(self.clone());
        }
        build_nets(self.space_arc(), self.alpha, depth)
    }
}
