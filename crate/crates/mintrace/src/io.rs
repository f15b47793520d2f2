//! File formats: model documents as JSON, covariance matrices and datasets
//! as CSV.
//!
//! Node ids are 1-based on the wire (edges `[[i, j], …]`, orderings as
//! integer arrays, dataset columns `x1..xp`) and 0-based in memory. All
//! numeric output uses the shortest round-trip float formatting, so repeated
//! runs produce byte-identical files.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::model::{Dataset, LinearSem};
use crate::perm::Ordering;
use crate::{Error, Result};

/// JSON document for a linear SEM: `{p, edges, b (row-major), omega, seed}`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDocument {
    p: usize,
    /// 1-based `[from, to]` pairs.
    edges: Vec<[usize; 2]>,
    /// Row-major `p × p` weights.
    b: Vec<f64>,
    omega: Vec<f64>,
    seed: Option<u64>,
}

/// Serializes a SEM (with the seed that generated it, when known).
pub fn model_to_json(sem: &LinearSem, seed: Option<u64>) -> Result<String> {
    let p = sem.p();
    let edges = sem
        .dag()
        .edges()
        .map(|(i, j)| [i + 1, j + 1])
        .collect();
    let b = (0..p)
        .flat_map(|i| (0..p).map(move |j| (i, j)))
        .map(|(i, j)| sem.b()[(i, j)])
        .collect();
    let doc = ModelDocument {
        p,
        edges,
        b,
        omega: sem.omega().iter().copied().collect(),
        seed,
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// Parses a model document, validating that the edge list matches the weight
/// support exactly.
pub fn model_from_json(text: &str) -> Result<(LinearSem, Option<u64>)> {
    let doc: ModelDocument = serde_json::from_str(text)?;
    let p = doc.p;
    if doc.b.len() != p * p {
        return Err(Error::Model(format!(
            "weight matrix has {} entries, expected {}",
            doc.b.len(),
            p * p
        )));
    }
    if doc.omega.len() != p {
        return Err(Error::Model(format!(
            "omega has {} entries, expected {p}",
            doc.omega.len()
        )));
    }
    let b = DMatrix::from_row_slice(p, p, &doc.b);
    let sem = LinearSem::new(b, DVector::from_vec(doc.omega))?;
    let mut listed: Vec<(usize, usize)> = Vec::new();
    for [i, j] in &doc.edges {
        if *i == 0 || *j == 0 || *i > p || *j > p {
            return Err(Error::Model(format!("edge [{i}, {j}] out of range 1..={p}")));
        }
        listed.push((i - 1, j - 1));
    }
    listed.sort_unstable();
    let support: Vec<(usize, usize)> = sem.dag().edges().collect();
    if listed != support {
        return Err(Error::Model(
            "edge list does not match the support of the weight matrix".into(),
        ));
    }
    Ok((sem, doc.seed))
}

pub fn write_model_json(sem: &LinearSem, seed: Option<u64>, path: &Path) -> Result<()> {
    std::fs::write(path, model_to_json(sem, seed)?)?;
    Ok(())
}

pub fn read_model_json(path: &Path) -> Result<(LinearSem, Option<u64>)> {
    model_from_json(&std::fs::read_to_string(path)?)
}

/// Reads a square numeric CSV matrix (no header).
pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    parse_matrix_csv(&std::fs::read_to_string(path)?)
}

pub fn parse_matrix_csv(text: &str) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Result<Vec<f64>> = line
            .split(',')
            .map(|cell| {
                cell.trim().parse::<f64>().map_err(|_| {
                    Error::Parameter(format!("line {}: bad number '{cell}'", lineno + 1))
                })
            })
            .collect();
        rows.push(row?);
    }
    if rows.is_empty() {
        return Err(Error::Parameter("empty matrix".into()));
    }
    let ncols = rows[0].len();
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parameter("ragged rows in matrix".into()));
    }
    let nrows = rows.len();
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub fn matrix_to_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let cells: Vec<String> = (0..m.ncols()).map(|j| m[(i, j)].to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Writes a dataset as CSV with the header row `x1,…,xp`.
pub fn dataset_to_csv(ds: &Dataset) -> String {
    let header: Vec<String> = (1..=ds.p()).map(|j| format!("x{j}")).collect();
    let mut out = header.join(",");
    out.push('\n');
    out.push_str(&matrix_to_csv(ds.matrix()));
    out
}

pub fn write_dataset_csv(ds: &Dataset, path: &Path) -> Result<()> {
    std::fs::write(path, dataset_to_csv(ds))?;
    Ok(())
}

/// Parses a 1-based comma-separated ordering such as `"3,1,2"`.
pub fn parse_ordering(text: &str) -> Result<Ordering> {
    let vals: Result<Vec<usize>> = text
        .split(',')
        .map(|cell| {
            cell.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parameter(format!("bad ordering entry '{cell}'")))
        })
        .collect();
    Ordering::from_one_based(&vals?)
}

/// Serializes non-finite floats as JSON `null` (JSON numbers cannot carry
/// `±∞`).
pub fn serialize_f64_or_null<S: serde::Serializer>(
    v: &f64,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn model_json_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sem = crate::model::generate_model(5, &mut rng).unwrap();
        let json = model_to_json(&sem, Some(4)).unwrap();
        let (back, seed) = model_from_json(&json).unwrap();
        assert_eq!(seed, Some(4));
        assert_eq!(back.b(), sem.b());
        assert_eq!(back.omega(), sem.omega());
        assert_eq!(back.dag(), sem.dag());
    }

    #[test]
    fn model_json_rejects_unknown_keys_and_mismatched_support() {
        let bad = r#"{"p":2,"edges":[],"b":[0,0,0,0],"omega":[1,1],"seed":null,"extra":1}"#;
        assert!(model_from_json(bad).is_err());
        let mismatch = r#"{"p":2,"edges":[[1,2]],"b":[0,0,0,0],"omega":[1,1],"seed":null}"#;
        assert!(matches!(model_from_json(mismatch), Err(Error::Model(_))));
    }

    #[test]
    fn matrix_csv_roundtrip() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.25, 0.25, 2.0]);
        let text = matrix_to_csv(&m);
        assert_eq!(text, "1,0.25\n0.25,2\n");
        assert_eq!(parse_matrix_csv(&text).unwrap(), m);
        assert!(parse_matrix_csv("1,2\n3\n").is_err());
        assert!(parse_matrix_csv("").is_err());
    }

    #[test]
    fn dataset_csv_has_named_header() {
        let ds = Dataset::new(DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]))
            .unwrap();
        let text = dataset_to_csv(&ds);
        assert!(text.starts_with("x1,x2,x3\n1,2,3\n"));
    }

    #[test]
    fn ordering_parses_one_based() {
        let sigma = parse_ordering("3,1,2").unwrap();
        assert_eq!(sigma.as_slice(), &[2, 0, 1]);
        assert!(parse_ordering("3,1").is_err());
        assert!(parse_ordering("a,b").is_err());
    }
}
