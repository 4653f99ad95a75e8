//! File formats: `m,n,w` edge lists, plain numeric CSV matrices, and Matrix
//! Market coordinate files.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Writes `m,n,w` rows in lexicographic edge order.
pub fn write_edge_list<W: Write>(g: &WeightedGraph, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["m", "n", "w"])?;
    for ((m, n), weight) in g.edges() {
        w.write_record([m.to_string(), n.to_string(), weight.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an `m,n,w` edge list. The node count is `n_nodes` if given,
/// otherwise one more than the largest index seen.
pub fn read_edge_list<R: Read>(input: R, n_nodes: Option<usize>) -> Result<WeightedGraph> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.len() != 3 || &headers[0] != "m" || &headers[1] != "n" || &headers[2] != "w" {
        return Err(Error::Parse(format!("expected header 'm,n,w', got '{}'", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let field = |j: usize| rec.get(j).unwrap_or("");
        let bad = || Error::Parse(format!("edge list row {}: '{}'", i + 2, rec.iter().collect::<Vec<_>>().join(",")));
        let m: usize = field(0).parse().map_err(|_| bad())?;
        let n: usize = field(1).parse().map_err(|_| bad())?;
        let w: f64 = field(2).parse().map_err(|_| bad())?;
        if m >= n {
            return Err(Error::Parse(format!("edge list row {}: expected m < n", i + 2)));
        }
        rows.push((m, n, w));
    }
    let n = n_nodes.unwrap_or_else(|| rows.iter().map(|r| r.1 + 1).max().unwrap_or(0));
    WeightedGraph::from_edges(n, rows)
}

/// Writes a matrix as header-less CSV, one row per line.
pub fn write_matrix_csv<W: Write>(m: &DMatrix<f64>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for i in 0..m.nrows() {
        w.write_record(m.row(i).iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix_csv<R: Read>(input: R) -> Result<DMatrix<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for rec in reader.records() {
        let rec = rec?;
        if cols.is_some_and(|c| c != rec.len()) {
            return Err(Error::Parse(format!("row {} has {} columns", rows + 1, rec.len())));
        }
        cols = Some(rec.len());
        for f in rec.iter() {
            data.push(
                f.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("row {}: bad number '{f}'", rows + 1)))?,
            );
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}

/// Parses a Matrix Market `coordinate real` file (`general` or `symmetric`).
pub fn read_matrix_market<R: Read>(mut input: R) -> Result<DMatrix<f64>> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let mut lines = text.lines();
    let banner = lines
        .next()
        .ok_or_else(|| Error::Parse("empty Matrix Market file".into()))?
        .to_ascii_lowercase();
    let parts: Vec<&str> = banner.split_whitespace().collect();
    if parts.len() < 5 || parts[0] != "%%matrixmarket" || parts[1] != "matrix" {
        return Err(Error::Parse("missing %%MatrixMarket banner".into()));
    }
    if parts[2] != "coordinate" {
        return Err(Error::Parse(format!("unsupported layout '{}'", parts[2])));
    }
    if !matches!(parts[3], "real" | "integer") {
        return Err(Error::Parse(format!("unsupported field '{}'", parts[3])));
    }
    let symmetric = match parts[4] {
        "general" => false,
        "symmetric" => true,
        other => return Err(Error::Parse(format!("unsupported symmetry '{other}'"))),
    };
    let mut body = lines.filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('%'));
    let size = body
        .next()
        .ok_or_else(|| Error::Parse("missing size line".into()))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad size line '{size}'"))))
        .collect::<Result<_>>()?;
    if dims.len() != 3 {
        return Err(Error::Parse(format!("bad size line '{size}'")));
    }
    let (rows, cols, nnz) = (dims[0], dims[1], dims[2]);
    let mut m = DMatrix::zeros(rows, cols);
    let mut seen = 0;
    for line in body {
        let t: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::Parse(format!("bad entry '{line}'"));
        if t.len() != 3 {
            return Err(bad());
        }
        let i: usize = t[0].parse().map_err(|_| bad())?;
        let j: usize = t[1].parse().map_err(|_| bad())?;
        let v: f64 = t[2].parse().map_err(|_| bad())?;
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(bad());
        }
        m[(i - 1, j - 1)] = v;
        if symmetric {
            m[(j - 1, i - 1)] = v;
        }
        seen += 1;
    }
    if seen != nnz {
        return Err(Error::Parse(format!("expected {nnz} entries, found {seen}")));
    }
    Ok(m)
}

/// Graph from a dense adjacency; the upper triangle is used.
pub fn graph_from_adjacency(w: &DMatrix<f64>) -> Result<WeightedGraph> {
    if w.nrows() != w.ncols() {
        return Err(Error::DimensionMismatch("adjacency must be square".into()));
    }
    let n = w.nrows();
    let mut g = WeightedGraph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            let v = w[(i, j)].max(w[(j, i)]);
            if v != 0.0 {
                g.set_weight(i, j, v)?;
            }
        }
    }
    Ok(g)
}

fn is_mtx(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("mtx"))
}

/// Loads an observation matrix from `.csv` or `.mtx`.
pub fn load_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let file = fs::File::open(path)?;
    if is_mtx(path) {
        read_matrix_market(file)
    } else {
        read_matrix_csv(file)
    }
}

/// Loads a graph from an edge-list `.csv` or a Matrix Market adjacency.
pub fn load_graph(path: &Path, n_nodes: Option<usize>) -> Result<WeightedGraph> {
    let file = fs::File::open(path)?;
    if is_mtx(path) {
        graph_from_adjacency(&read_matrix_market(file)?)
    } else {
        read_edge_list(file, n_nodes)
    }
}
