//! JSON file format for n-mode coefficient matrices:
//! `{"n": 2, "A": [[{"re": .., "im": ..}, ..], ..], "C": [[..], ..]}`.

use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fock::MATRIX_SYMMETRY_TOL;
use crate::linalg::CMatrix;

/// Validated `(A, C)` pair with `A` symmetric and `C` Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile {
    pub n: usize,
    pub a: CMatrix,
    pub c: CMatrix,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema { path: path.into(), message: message.into() }
}

fn parse_matrix(root: &Value, key: &str, n: usize) -> Result<CMatrix> {
    let path = format!("$.{key}");
    let rows = root
        .get(key)
        .ok_or_else(|| schema(&path, "missing field"))?
        .as_array()
        .ok_or_else(|| schema(&path, "expected an array of rows"))?;
    if rows.len() != n {
        return Err(schema(&path, format!("expected {n} rows, got {}", rows.len())));
    }
    let mut m = CMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let row_path = format!("{path}[{i}]");
        let row = row.as_array().ok_or_else(|| schema(&row_path, "expected an array"))?;
        if row.len() != n {
            return Err(schema(&row_path, format!("expected {n} entries, got {}", row.len())));
        }
        for (j, z) in row.iter().enumerate() {
            let entry_path = format!("{row_path}[{j}]");
            let part = |name: &str| -> Result<f64> {
                let x = z
                    .get(name)
                    .ok_or_else(|| schema(format!("{entry_path}.{name}"), "missing field"))?
                    .as_f64()
                    .ok_or_else(|| schema(format!("{entry_path}.{name}"), "expected a number"))?;
                if x.is_finite() {
                    Ok(x)
                } else {
                    Err(schema(format!("{entry_path}.{name}"), "expected a finite number"))
                }
            };
            if !z.is_object() {
                return Err(schema(&entry_path, "expected {\"re\": .., \"im\": ..}"));
            }
            m[(i, j)] = Complex64::new(part("re")?, part("im")?);
        }
    }
    Ok(m)
}

impl MatrixFile {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| schema("$", format!("malformed JSON: {e}")))?;
        Self::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        if !v.is_object() {
            return Err(schema("$", "expected an object"));
        }
        let n = v
            .get("n")
            .ok_or_else(|| schema("$.n", "missing field"))?
            .as_u64()
            .filter(|&n| n > 0)
            .ok_or_else(|| schema("$.n", "expected a positive integer"))? as usize;
        let a = parse_matrix(v, "A", n)?;
        let c = parse_matrix(v, "C", n)?;
        for i in 0..n {
            for j in 0..n {
                if (a[(i, j)] - a[(j, i)]).norm() > MATRIX_SYMMETRY_TOL {
                    return Err(schema(
                        format!("$.A[{i}][{j}]"),
                        format!("A must be symmetric: row {i}, column {j} differs from row {j}, column {i}"),
                    ));
                }
                if (c[(i, j)] - c[(j, i)].conj()).norm() > MATRIX_SYMMETRY_TOL {
                    return Err(schema(
                        format!("$.C[{i}][{j}]"),
                        format!("C must be Hermitian: row {i}, column {j} is not the conjugate of row {j}, column {i}"),
                    ));
                }
            }
        }
        Ok(Self { n, a, c })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json(&self) -> Value {
        let encode = |m: &CMatrix| -> Value {
            (0..self.n)
                .map(|i| (0..self.n).map(|j| json!({"re": m[(i, j)].re, "im": m[(i, j)].im})).collect::<Vec<_>>())
                .collect::<Vec<_>>()
                .into()
        };
        json!({"n": self.n, "A": encode(&self.a), "C": encode(&self.c)})
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_of(text: &str) -> String {
        match MatrixFile::from_json_str(text) {
            Err(Error::Schema { path, .. }) => path,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trip() {
        let text = r#"{"n":2,
            "A":[[{"re":0.5,"im":0.1},{"re":0.2,"im":0}],[{"re":0.2,"im":0},{"re":0.3,"im":0}]],
            "C":[[{"re":1,"im":0},{"re":0.1,"im":0.2}],[{"re":0.1,"im":-0.2},{"re":0.8,"im":0}]]}"#;
        let m = MatrixFile::from_json_str(text).unwrap();
        assert_eq!(m.n, 2);
        assert_eq!(m.a[(0, 0)], Complex64::new(0.5, 0.1));
        assert_eq!(m.c[(1, 0)], Complex64::new(0.1, -0.2));
        assert_eq!(MatrixFile::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn localized_errors() {
        assert_eq!(path_of("[1]"), "$");
        assert_eq!(path_of(r#"{"A":[],"C":[]}"#), "$.n");
        assert_eq!(path_of(r#"{"n":0,"A":[],"C":[]}"#), "$.n");
        assert_eq!(path_of(r#"{"n":1,"C":[[{"re":1,"im":0}]]}"#), "$.A");
        assert_eq!(path_of(r#"{"n":1,"A":[[{"re":1}]],"C":[[{"re":1,"im":0}]]}"#), "$.A[0][0].im");
        assert_eq!(path_of(r#"{"n":1,"A":[[1]],"C":[[{"re":1,"im":0}]]}"#), "$.A[0][0]");
        assert_eq!(path_of(r#"{"n":2,"A":[[{"re":1,"im":0}]],"C":[]}"#), "$.A");
        let asym = r#"{"n":2,
            "A":[[{"re":0,"im":0},{"re":0.2,"im":0}],[{"re":0.1,"im":0},{"re":0,"im":0}]],
            "C":[[{"re":1,"im":0},{"re":0,"im":0}],[{"re":0,"im":0},{"re":1,"im":0}]]}"#;
        assert_eq!(path_of(asym), "$.A[0][1]");
        let non_herm = r#"{"n":2,
            "A":[[{"re":0,"im":0},{"re":0,"im":0}],[{"re":0,"im":0},{"re":0,"im":0}]],
            "C":[[{"re":1,"im":0},{"re":0,"im":0.3}],[{"re":0,"im":0.3},{"re":1,"im":0}]]}"#;
        assert_eq!(path_of(non_herm), "$.C[0][1]");
    }
}
