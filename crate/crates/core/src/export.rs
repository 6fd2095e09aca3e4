//! GraphML, DOT and JSON dumps of fillings, and the boundary metric as CSV.
//!
//! Vertices appear in `(level, point)` order and edges in order of their
//! endpoints, so output is byte-stable for a fixed input.

use serde::Serialize;

use crate::filling::{EdgeKind, FillingGraph};
use crate::uniformize::{BoundarySpace, UniformizedFilling};

fn kind_name(k: EdgeKind) -> &'static str {
    match k {
        EdgeKind::Horizontal => "horizontal",
        EdgeKind::Vertical => "vertical",
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Edge ids sorted by endpoint ids (vertex ids are already in
/// `(level, point)` order).
fn sorted_edges(g: &FillingGraph) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..g.edges().len()).collect();
    ids.sort_by_key(|&e| {
        let edge = g.edge(e);
        (edge.a.min(edge.b), edge.a.max(edge.b))
    });
    ids
}

pub fn graphml(g: &FillingGraph, u: Option<&UniformizedFilling>) -> String {
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    s.push_str("  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n");
    s.push_str("  <key id=\"level\" for=\"node\" attr.name=\"level\" attr.type=\"int\"/>\n");
    s.push_str("  <key id=\"boundary\" for=\"node\" attr.name=\"boundary\" attr.type=\"boolean\"/>\n");
    s.push_str("  <key id=\"kind\" for=\"edge\" attr.name=\"kind\" attr.type=\"string\"/>\n");
    if u.is_some() {
        s.push_str("  <key id=\"edge_len\" for=\"edge\" attr.name=\"edge_len\" attr.type=\"double\"/>\n");
    }
    s.push_str("  <graph id=\"filling\" edgedefault=\"undirected\">\n");
    for (id, v) in g.vertices().iter().enumerate() {
        s.push_str(&format!(
            "    <node id=\"v{id}\"><data key=\"label\">{}</data><data key=\"level\">{}</data><data key=\"boundary\">false</data></node>\n",
            xml_escape(&g.space().label(v.point)),
            v.level
        ));
    }
    if u.is_some() {
        for p in 0..g.space().len() {
            s.push_str(&format!(
                "    <node id=\"b{p}\"><data key=\"label\">{}</data><data key=\"boundary\">true</data></node>\n",
                xml_escape(&g.space().label(p))
            ));
        }
    }
    for e in sorted_edges(g) {
        let edge = g.edge(e);
        let len = u.map(|u| format!("<data key=\"edge_len\">{}</data>", u.edge_len(e))).unwrap_or_default();
        s.push_str(&format!(
            "    <edge source=\"v{}\" target=\"v{}\"><data key=\"kind\">{}</data>{len}</edge>\n",
            edge.a,
            edge.b,
            kind_name(edge.kind)
        ));
    }
    if let Some(u) = u {
        for p in 0..g.space().len() {
            let top = g.find(p, g.n_trunc()).expect("ray");
            s.push_str(&format!(
                "    <edge source=\"v{top}\" target=\"b{p}\"><data key=\"kind\">tail</data><data key=\"edge_len\">{}</data></edge>\n",
                u.tail_len()
            ));
        }
    }
    s.push_str("  </graph>\n</graphml>\n");
    s
}

pub fn dot(g: &FillingGraph, u: Option<&UniformizedFilling>) -> String {
    let mut s = String::from("graph filling {\n");
    for (id, v) in g.vertices().iter().enumerate() {
        s.push_str(&format!(
            "  v{id} [label=\"{} @ {}\", point=\"{}\", level={}];\n",
            dot_escape(&g.space().label(v.point)),
            v.level,
            dot_escape(&g.space().label(v.point)),
            v.level
        ));
    }
    if u.is_some() {
        for p in 0..g.space().len() {
            s.push_str(&format!(
                "  b{p} [label=\"{}\", shape=box, boundary=true];\n",
                dot_escape(&g.space().label(p))
            ));
        }
    }
    for e in sorted_edges(g) {
        let edge = g.edge(e);
        let len = u.map(|u| format!(", edge_len={}", u.edge_len(e))).unwrap_or_default();
        s.push_str(&format!("  v{} -- v{} [kind={}{len}];\n", edge.a, edge.b, kind_name(edge.kind)));
    }
    if let Some(u) = u {
        for p in 0..g.space().len() {
            let top = g.find(p, g.n_trunc()).expect("ray");
            s.push_str(&format!("  v{top} -- b{p} [kind=tail, edge_len={}];\n", u.tail_len()));
        }
    }
    s.push_str("}\n");
    s
}

#[derive(Debug, Serialize)]
struct JsonParams {
    alpha: f64,
    tau: f64,
    l: Option<u32>,
    n_star: u32,
    n_trunc: u32,
    rule: crate::filling::NeighborRule,
    counterexample_mode: bool,
    /// Level at which each point enters the nets, in point order.
    net_order: Vec<Option<u32>>,
    eps: Option<f64>,
    tail_len: Option<f64>,
}

#[derive(Debug, Serialize)]
struct JsonVertex {
    id: usize,
    point: usize,
    label: String,
    level: u32,
    neighbors: Vec<usize>,
}

#[derive(Debug, Serialize)]
struct JsonEdge {
    a: usize,
    b: usize,
    kind: &'static str,
    level: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    edge_len: Option<f64>,
}

#[derive(Debug, Serialize)]
struct JsonBoundary {
    point: usize,
    label: String,
    attached_to: usize,
}

#[derive(Debug, Serialize)]
struct JsonGraph {
    params: JsonParams,
    vertices: Vec<JsonVertex>,
    edges: Vec<JsonEdge>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    boundary: Vec<JsonBoundary>,
}

/// Adjacency dump with the full parameter block.
pub fn json_adjacency(g: &FillingGraph, u: Option<&UniformizedFilling>) -> String {
    let params = JsonParams {
        alpha: g.alpha(),
        tau: g.tau(),
        l: g.l(),
        n_star: g.n_star(),
        n_trunc: g.n_trunc(),
        rule: g.rule(),
        counterexample_mode: g.counterexample_mode(),
        net_order: (0..g.space().len()).map(|p| g.nets().entry_level(p)).collect(),
        eps: u.map(|u| u.eps()),
        tail_len: u.map(|u| u.tail_len()),
    };
    let vertices = g
        .vertices()
        .iter()
        .enumerate()
        .map(|(id, v)| JsonVertex {
            id,
            point: v.point,
            label: g.space().label(v.point),
            level: v.level,
            neighbors: g.neighbors(id).iter().map(|&(w, _)| w).collect(),
        })
        .collect();
    let edges = sorted_edges(g)
        .into_iter()
        .map(|e| {
            let edge = g.edge(e);
            JsonEdge {
                a: edge.a,
                b: edge.b,
                kind: kind_name(edge.kind),
                level: edge.level,
                edge_len: u.map(|u| u.edge_len(e)),
            }
        })
        .collect();
    let boundary = match u {
        Some(_) => (0..g.space().len())
            .map(|p| JsonBoundary {
                point: p,
                label: g.space().label(p),
                attached_to: g.find(p, g.n_trunc()).expect("ray"),
            })
            .collect(),
        None => Vec::new(),
    };
    let mut s = serde_json::to_string_pretty(&JsonGraph {
        params,
        vertices,
        edges,
        boundary,
    })
    .expect("graph serializes");
    s.push('\n');
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Labeled square matrix; the top-left cell is empty.
pub fn boundary_csv(b: &BoundarySpace) -> String {
    let mut s = String::new();
    for l in &b.labels {
        s.push(',');
        s.push_str(&csv_field(l));
    }
    s.push('\n');
    for (l, row) in b.labels.iter().zip(&b.metric) {
        s.push_str(&csv_field(l));
        for d in row {
            s.push_str(&format!(",{d}"));
        }
        s.push('\n');
    }
    s
}
