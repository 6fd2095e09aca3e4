//! Rooted trees, their boundary ultrametric, and the level-preserving
//! comparison with a filling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::filling::FillingGraph;
use crate::metric::FiniteMetricSpace;

/// A finite rooted tree. Leaves stand for infinite rays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<u32>,
    labels: Vec<String>,
}

impl RootedTree {
    /// Builds a tree from `(parent, child)` pairs over vertices `0..n`,
    /// rooted at 0.
    pub fn from_parents(parent: Vec<Option<usize>>) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        if parent[0].is_some() {
            return Err(Error::Malformed("vertex 0 must be the root".into()));
        }
        let mut children = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate().skip(1) {
            match p {
                Some(p) if *p < n && *p != v => children[*p].push(v),
                _ => return Err(Error::Malformed(format!("vertex {v} has no valid parent"))),
            }
        }
        let mut depth = vec![u32::MAX; n];
        depth[0] = 0;
        let mut stack = vec![0usize];
        let mut seen = 1;
        while let Some(v) = stack.pop() {
            for &c in &children[v] {
                depth[c] = depth[v] + 1;
                seen += 1;
                stack.push(c);
            }
        }
        if seen != n {
            return Err(Error::Malformed("parent links contain a cycle".into()));
        }
        let labels = (0..n).map(|i| i.to_string()).collect();
        Ok(Self {
            parent,
            children,
            depth,
            labels,
        })
    }

    /// Builds a tree from labeled edges; `root` names the root vertex.
    pub fn from_edges(root: &str, edges: &[(String, String)]) -> Result<Self> {
        let mut names = vec![root.to_string()];
        let mut index = std::collections::HashMap::new();
        index.insert(root.to_string(), 0usize);
        let mut parent = vec![None];
        for (p, c) in edges {
            let pi = match index.get(p) {
                Some(&i) => i,
                None => {
                    return Err(Error::Malformed(format!(
                        "parent {p:?} appears before being attached to the tree"
                    )))
                }
            };
            if index.contains_key(c) {
                return Err(Error::Malformed(format!("vertex {c:?} has two parents")));
            }
            index.insert(c.clone(), names.len());
            names.push(c.clone());
            parent.push(Some(pi));
        }
        let mut t = Self::from_parents(parent)?;
        t.labels = names;
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn depth(&self, v: usize) -> u32 {
        self.depth[v]
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    /// Leaves in depth-first order, visiting children in index order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            if self.children[v].is_empty() {
                out.push(v);
            }
            for &c in self.children[v].iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    /// Ancestor of `v` at depth `d <= depth(v)`.
    pub fn ancestor_at(&self, mut v: usize, d: u32) -> usize {
        while self.depth[v] > d {
            v = self.parent[v].expect("non-root has a parent");
        }
        v
    }

    /// Depth of the deepest common ancestor.
    pub fn lca_depth(&self, mut a: usize, mut b: usize) -> u32 {
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].unwrap();
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].unwrap();
        }
        while a != b {
            a = self.parent[a].unwrap();
            b = self.parent[b].unwrap();
        }
        self.depth[a]
    }

    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        (1..self.len()).map(|v| (self.parent[v].unwrap(), v)).collect()
    }
}

/// Seeded random tree grown breadth first: each vertex draws
/// `0..=max_children` children until `max_vertices` is reached.
pub fn random_tree(max_vertices: usize, max_children: usize, seed: u64) -> Result<RootedTree> {
    if max_vertices == 0 || max_children == 0 {
        return Err(Error::BadParams(
            "random_tree needs max_vertices >= 1 and max_children >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parent = vec![None];
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        // The root always branches so the boundary is not a single point.
        let lo = if v == 0 { 1 } else { 0 };
        let k = rng.gen_range(lo..=max_children);
        for _ in 0..k {
            if parent.len() >= max_vertices {
                break;
            }
            queue.push_back(parent.len());
            parent.push(Some(v));
        }
    }
    RootedTree::from_parents(parent)
}

/// Distance `tau * alpha^{-n-1}` between leaves whose deepest common
/// ancestor sits at depth `n`.
pub fn leaf_distance(alpha: f64, tau: f64, n: u32) -> f64 {
    tau * alpha.powi(-(n as i32) - 1)
}

/// Boundary of the tree viewed as a filling: the leaf set with the metric
/// `tau * alpha^{-n-1}`, `alpha = e^eps`. Point `i` is the `i`-th leaf of
/// [`RootedTree::leaves`].
pub fn tree_boundary_space(tree: &RootedTree, eps: f64, tau: f64) -> Result<FiniteMetricSpace> {
    let alpha = eps.exp();
    if !(eps > 0.0) {
        return Err(Error::BadParams(format!("eps {eps} must be positive")));
    }
    if !(tau > 1.0 && tau < alpha) {
        return Err(Error::BadParams(format!(
            "tree boundary needs 1 < tau < alpha = {alpha}, got tau = {tau}"
        )));
    }
    let leaves = tree.leaves();
    let n = leaves.len();
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = leaf_distance(alpha, tau, tree.lca_depth(leaves[i], leaves[j]));
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    let labels = leaves.iter().map(|&l| Some(tree.label(l).to_string())).collect();
    FiniteMetricSpace::from_matrix(labels, dist)
}

/// Checks that `g`, built on [`tree_boundary_space`] of `tree`, is the tree
/// itself with its leaves continued as rays. Vertex `(leaf i, n)` is sent to
/// the depth-`n` ancestor of leaf `i`, or to the ray below the leaf. Returns
/// `Ok(())` when this map is a level-preserving graph isomorphism, else a
/// description of the first mismatch.
pub fn check_tree_isomorphism(tree: &RootedTree, g: &FillingGraph) -> std::result::Result<(), String> {
    let leaves = tree.leaves();
    if g.space().len() != leaves.len() {
        return Err(format!(
            "{} boundary points for {} leaves",
            g.space().len(),
            leaves.len()
        ));
    }
    // Image of a filling vertex: (tree vertex, extra ray depth below it).
    let image = |p: usize, n: u32| -> (usize, u32) {
        let leaf = leaves[p];
        let d = tree.depth(leaf);
        if n <= d {
            (tree.ancestor_at(leaf, n), 0)
        } else {
            (leaf, n - d)
        }
    };
    let top = g.n_trunc();
    let mut seen = std::collections::HashSet::new();
    for id in 0..g.vertex_count() {
        let v = g.vertex(id);
        if !seen.insert(image(v.point, v.level)) {
            return Err(format!("two filling vertices map to {:?}", image(v.point, v.level)));
        }
    }
    // Surjectivity onto tree vertices and ray vertices up to the truncation.
    let mut expected = 0usize;
    for t in 0..tree.len() {
        if tree.depth(t) <= top {
            expected += 1;
        }
    }
    for &l in &leaves {
        expected += top.saturating_sub(tree.depth(l)) as usize;
    }
    if expected != seen.len() {
        return Err(format!(
            "filling has {} vertices, tree with rays has {expected}",
            seen.len()
        ));
    }
    let adjacent_in_tree = |a: (usize, u32), b: (usize, u32)| -> bool {
        match (a.1, b.1) {
            (0, 0) => tree.parent(a.0) == Some(b.0) || tree.parent(b.0) == Some(a.0),
            _ => a.0 == b.0 && a.1.abs_diff(b.1) == 1,
        }
    };
    let mut edges = 0usize;
    for e in g.edges() {
        let (a, b) = (g.vertex(e.a), g.vertex(e.b));
        if a.level == b.level {
            return Err(format!("horizontal edge {a:?} ~ {b:?}"));
        }
        let (ia, ib) = (image(a.point, a.level), image(b.point, b.level));
        if !adjacent_in_tree(ia, ib) {
            return Err(format!("edge {a:?} ~ {b:?} maps to non-adjacent {ia:?}, {ib:?}"));
        }
        edges += 1;
    }
    // Connected graphs on the same vertex count: a tree has exactly n-1 edges.
    if edges + 1 != seen.len() {
        return Err(format!("{edges} edges on {} vertices", seen.len()));
    }
    Ok(())
}
