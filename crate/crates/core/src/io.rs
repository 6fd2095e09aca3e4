//! Readers and writers for spaces, trees and functions.
//!
//! Point clouds are CSV with header `id,x1,...,xd` or JSON
//! `{"points":[{"id":...,"coords":[...]}]}`; distance matrices are JSON
//! `{"labels":[...],"dist":[[...]]}`; trees are a text edge list with the root
//! alone on the first line and `parent child` on the others.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filling::FillingGraph;
use crate::functions::{BoundaryFunction, GraphFunction};
use crate::metric::{validate_and_rescale, FiniteMetricSpace, RawPoints};
use crate::tree::RootedTree;

#[derive(Debug, Serialize, Deserialize)]
struct JsonPoint {
    id: serde_json::Value,
    coords: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonPoints {
    points: Vec<JsonPoint>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonMatrix {
    labels: Vec<String>,
    dist: Vec<Vec<f64>>,
}

fn id_string(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn parse_points_csv(text: &str) -> Result<RawPoints> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| Error::Malformed(e.to_string()))?.clone();
    if headers.len() < 2 || &headers[0] != "id" {
        return Err(Error::Malformed("point CSV header must be id,x1,...,xd".into()));
    }
    let mut points = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Malformed(e.to_string()))?;
        let coords = rec
            .iter()
            .skip(1)
            .map(|c| {
                c.parse::<f64>()
                    .map_err(|_| Error::Malformed(format!("row {}: bad coordinate {c:?}", line + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        points.push((Some(rec[0].to_string()), coords));
    }
    Ok(RawPoints::Coordinates(points))
}

/// Accepts either JSON layout.
pub fn parse_space_json(text: &str) -> Result<RawPoints> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    if value.get("points").is_some() {
        let p: JsonPoints = serde_json::from_value(value).map_err(|e| Error::Malformed(e.to_string()))?;
        Ok(RawPoints::Coordinates(
            p.points.into_iter().map(|pt| (Some(id_string(&pt.id)), pt.coords)).collect(),
        ))
    } else if value.get("dist").is_some() {
        let m: JsonMatrix = serde_json::from_value(value).map_err(|e| Error::Malformed(e.to_string()))?;
        Ok(RawPoints::Matrix {
            labels: m.labels.into_iter().map(Some).collect(),
            dist: m.dist,
        })
    } else {
        Err(Error::Malformed("expected a \"points\" or \"dist\" field".into()))
    }
}

/// Builds a space from raw input. Point clouds are rescaled to `target`
/// diameter; a distance matrix is used as given when its diameter is already
/// below 1 and rescaled otherwise.
pub fn space_from_raw(raw: RawPoints, target: f64) -> Result<FiniteMetricSpace> {
    match raw {
        RawPoints::Matrix { labels, dist } => {
            let diam = dist.iter().flatten().cloned().fold(0.0, f64::max);
            if diam < 1.0 && diam.is_finite() {
                FiniteMetricSpace::from_matrix(labels, dist)
            } else {
                validate_and_rescale(RawPoints::Matrix { labels, dist }, target)
            }
        }
        raw => validate_and_rescale(raw, target),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        }
    }
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Loads a `.csv` point cloud or a `.json` point cloud / distance matrix.
pub fn load_space(path: &Path, target: f64) -> Result<FiniteMetricSpace> {
    let text = read(path)?;
    let raw = match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => parse_points_csv(&text)?,
        Some("json") => parse_space_json(&text)?,
        _ => return Err(Error::Malformed(format!("{}: expected .csv or .json", path.display()))),
    };
    space_from_raw(raw, target)
}

/// Distance-matrix JSON; exact round trip through [`load_space`].
pub fn space_to_json(space: &FiniteMetricSpace) -> String {
    let m = JsonMatrix {
        labels: (0..space.len()).map(|i| space.label(i)).collect(),
        dist: (0..space.len()).map(|i| space.row(i).to_vec()).collect(),
    };
    let mut s = serde_json::to_string_pretty(&m).expect("matrix serializes");
    s.push('\n');
    s
}

pub fn parse_tree(text: &str) -> Result<RootedTree> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let root = lines.next().ok_or(Error::Empty)?;
    if root.split_whitespace().count() != 1 {
        return Err(Error::Malformed("the first line must name the root".into()));
    }
    let mut edges = Vec::new();
    for l in lines {
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(Error::Malformed(format!("expected `parent child`, got {l:?}")));
        }
        edges.push((parts[0].to_string(), parts[1].to_string()));
    }
    RootedTree::from_edges(root, &edges)
}

pub fn load_tree(path: &Path) -> Result<RootedTree> {
    parse_tree(&read(path)?)
}

pub fn tree_to_text(tree: &RootedTree) -> String {
    let mut s = format!("{}\n", tree.label(0));
    for (p, c) in tree.edge_list() {
        s.push_str(&format!("{} {}\n", tree.label(p), tree.label(c)));
    }
    s
}

pub fn boundary_function_to_csv(space: &FiniteMetricSpace, f: &BoundaryFunction) -> String {
    let mut s = String::from("id,value\n");
    for (i, v) in f.values().iter().enumerate() {
        s.push_str(&format!("{},{}\n", space.label(i), v));
    }
    s
}

fn label_index(space: &FiniteMetricSpace, label: &str) -> Result<usize> {
    (0..space.len())
        .find(|&i| space.label(i) == label)
        .ok_or_else(|| Error::Malformed(format!("unknown point {label:?}")))
}

pub fn parse_boundary_function(space: &FiniteMetricSpace, text: &str) -> Result<BoundaryFunction> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut values = vec![None; space.len()];
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Malformed(e.to_string()))?;
        if rec.len() != 2 {
            return Err(Error::Malformed("expected id,value".into()));
        }
        let i = label_index(space, &rec[0])?;
        let v: f64 = rec[1].parse().map_err(|_| Error::Malformed(format!("bad value {:?}", &rec[1])))?;
        if !v.is_finite() {
            return Err(Error::Malformed(format!("non-finite value at {:?}", &rec[0])));
        }
        values[i] = Some(v);
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::Malformed(format!("no value for {:?}", space.label(i)))))
        .collect::<Result<_>>()?;
    Ok(BoundaryFunction::new(values))
}

pub fn graph_function_to_csv(g: &FillingGraph, u: &GraphFunction) -> String {
    let mut s = String::from("point,level,value\n");
    for (v, x) in g.vertices().iter().zip(u.values()) {
        s.push_str(&format!("{},{},{}\n", g.space().label(v.point), v.level, x));
    }
    s
}

pub fn parse_graph_function(g: &FillingGraph, text: &str) -> Result<GraphFunction> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut values = vec![None; g.vertex_count()];
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Malformed(e.to_string()))?;
        if rec.len() != 3 {
            return Err(Error::Malformed("expected point,level,value".into()));
        }
        let p = label_index(g.space(), &rec[0])?;
        let n: u32 = rec[1].parse().map_err(|_| Error::Malformed(format!("bad level {:?}", &rec[1])))?;
        let id = g.find(p, n).ok_or(Error::UnknownVertex { point: p, level: n })?;
        let v: f64 = rec[2].parse().map_err(|_| Error::Malformed(format!("bad value {:?}", &rec[2])))?;
        if !v.is_finite() {
            return Err(Error::Malformed("non-finite value".into()));
        }
        values[id] = Some(v);
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(id, v)| v.ok_or_else(|| Error::Malformed(format!("no value for vertex {}", g.vertex(id)))))
        .collect::<Result<_>>()?;
    Ok(GraphFunction::new(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filling::{build_filling, FillingParams};
    use crate::functions::random_graph_function;
    use crate::generate::interval_net;
    use crate::nets::build_nets;
    use std::sync::Arc;

    #[test]
    fn csv_points() {
        let raw = parse_points_csv("id,x1,x2\na,0,0\nb,3,4\n").unwrap();
        let s = space_from_raw(raw, 0.5).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.label(1), "b");
        assert_eq!(s.dist(0, 1), 0.5);
        assert!(parse_points_csv("name,x\na,0\n").is_err());
        assert!(parse_points_csv("id,x\na,zz\n").is_err());
    }

    #[test]
    fn json_layouts() {
        let raw = parse_space_json(r#"{"points":[{"id":1,"coords":[0]},{"id":"q","coords":[2]}]}"#).unwrap();
        let s = space_from_raw(raw, 0.5).unwrap();
        assert_eq!(s.label(0), "1");
        let raw = parse_space_json(r#"{"labels":["a","b"],"dist":[[0,0.25],[0.25,0]]}"#).unwrap();
        let s = space_from_raw(raw, 0.5).unwrap();
        assert_eq!(s.dist(0, 1), 0.25);
        let raw = parse_space_json(r#"{"labels":["a","b"],"dist":[[0,-1],[-1,0]]}"#).unwrap();
        assert!(space_from_raw(raw, 0.5).is_err());
        assert!(parse_space_json(r#"{"other":1}"#).is_err());
    }

    #[test]
    fn matrix_round_trip_is_exact() {
        let s = interval_net(7).unwrap();
        let back = space_from_raw(parse_space_json(&space_to_json(&s)).unwrap(), 0.5).unwrap();
        for i in 0..7 {
            assert_eq!(back.row(i), s.row(i));
            assert_eq!(back.label(i), s.label(i));
        }
    }

    #[test]
    fn tree_text() {
        let t = parse_tree("r\nr a\nr b\na c\n").unwrap();
        assert_eq!(t.len(), 4);
        let again = parse_tree(&tree_to_text(&t)).unwrap();
        assert_eq!(again.edge_list(), t.edge_list());
        assert!(parse_tree("r x\n").is_err());
        assert!(parse_tree("r\nr\n").is_err());
    }

    #[test]
    fn function_round_trips() {
        let s = interval_net(5).unwrap();
        let f = BoundaryFunction::new(vec![0.1, -2.0, 1.0 / 3.0, 7.0, 0.0]);
        assert_eq!(parse_boundary_function(&s, &boundary_function_to_csv(&s, &f)).unwrap(), f);
        let nets = build_nets(Arc::new(s), 2.0, 8).unwrap();
        let g = build_filling(&nets, FillingParams::new(1.5)).unwrap();
        let u = random_graph_function(&g, 3);
        assert_eq!(parse_graph_function(&g, &graph_function_to_csv(&g, &u)).unwrap(), u);
    }
}
