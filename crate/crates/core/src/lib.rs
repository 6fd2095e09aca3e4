//! Hyperbolic fillings of finite metric spaces.
//!
//! A finite space `Z` with `diam Z < 1` is filled in by a graph whose level
//! `n` vertices are a maximal `alpha^{-n}`-separated net. Below a finite
//! stabilization level the graph is a disjoint union of rays, so every
//! quantity on the infinite filling (uniformized distances, lifted measures,
//! norms of functions) is computed exactly from the truncated graph plus
//! closed-form geometric tails.

pub mod error;
pub mod export;
pub mod filling;
pub mod functions;
pub mod generate;
pub mod geodesic;
pub mod hyperbolicity;
pub mod io;
pub mod measure;
pub mod metric;
pub mod nets;
pub mod quadrature;
pub mod report;
pub mod rough;
pub mod tree;
pub mod uniformize;

pub use error::{Error, Result};
pub use filling::{build_filling, EdgeKind, FillingGraph, FillingParams, NeighborRule, Vertex};
pub use metric::{validate_and_rescale, FiniteMetricSpace, RawPoints};
pub use nets::{build_nets, NetHierarchy};
