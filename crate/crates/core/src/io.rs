//! JSON formats for matrices, deformation operators and Fock-level tables.
//!
//! ```text
//! real matrix     {"rows": n, "cols": m, "data": [row-major]}
//! complex matrix  {"rows": n, "cols": m, "re": [...], "im": [...]}
//! deformation     {"lambda": x, "K": <matrix> | {"diag_fn": [...]}}
//! table           [values] | "identity" | {"name": "sinh", "lambda": 0.5}
//! ```
//!
//! Anywhere a matrix or table is expected, a string naming a JSON file holding
//! one may be given instead.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kdeform::{DeformationOperator, Kernel};
use crate::numerics::{ComplexMatrix, RealMatrix};
use crate::oscillator::NamedTable;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub re: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<f64>>,
}

fn check_len(name: &str, values: &[f64], rows: usize, cols: usize) -> Result<()> {
    if values.len() != rows * cols {
        return Err(Error::Invalid(format!(
            "matrix \"{name}\" has {} entries, expected {rows}×{cols} = {}",
            values.len(),
            rows * cols
        )));
    }
    Ok(())
}

impl MatrixJson {
    pub fn from_real(m: &RealMatrix) -> Self {
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data: Some(m.transpose().iter().copied().collect()),
            re: None,
            im: None,
        }
    }

    pub fn from_complex(m: &ComplexMatrix) -> Self {
        let t = m.transpose();
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data: None,
            re: Some(t.iter().map(|z| z.re).collect()),
            im: Some(t.iter().map(|z| z.im).collect()),
        }
    }

    /// Fails when the document carries a nonzero imaginary part.
    pub fn to_real(&self) -> Result<RealMatrix> {
        match (&self.data, &self.re, &self.im) {
            (Some(data), None, None) => {
                check_len("data", data, self.rows, self.cols)?;
                Ok(RealMatrix::from_row_slice(self.rows, self.cols, data))
            }
            (None, Some(_), _) => {
                let m = self.to_complex()?;
                if m.iter().any(|z| z.im != 0.0) {
                    return Err(Error::Invalid("expected a real matrix".into()));
                }
                Ok(m.map(|z| z.re))
            }
            _ => Err(Error::Invalid(
                "matrix needs either \"data\" or \"re\"/\"im\"".into(),
            )),
        }
    }

    /// A real document reads as a complex matrix with zero imaginary part; a
    /// missing `im` means zero.
    pub fn to_complex(&self) -> Result<ComplexMatrix> {
        match (&self.data, &self.re, &self.im) {
            (Some(_), None, None) => Ok(self.to_real()?.map(|x| Complex64::new(x, 0.0))),
            (None, Some(re), im) => {
                check_len("re", re, self.rows, self.cols)?;
                let zeros = vec![0.0; re.len()];
                let im = im.as_deref().unwrap_or(&zeros);
                check_len("im", im, self.rows, self.cols)?;
                let values: Vec<Complex64> = re
                    .iter()
                    .zip(im)
                    .map(|(&r, &i)| Complex64::new(r, i))
                    .collect();
                Ok(ComplexMatrix::from_row_slice(self.rows, self.cols, &values))
            }
            _ => Err(Error::Invalid(
                "matrix needs either \"data\" or \"re\"/\"im\"".into(),
            )),
        }
    }
}

/// Inline value or path to a JSON file containing one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Source<T> {
    Path(PathBuf),
    Inline(T),
}

impl<T: for<'de> Deserialize<'de> + Clone> Source<T> {
    /// Relative paths resolve against `base`.
    pub fn load(&self, base: Option<&Path>) -> Result<T> {
        match self {
            Source::Inline(v) => Ok(v.clone()),
            Source::Path(p) => read_json(&resolve(p, base)),
        }
    }
}

pub fn resolve(path: &Path, base: Option<&Path>) -> PathBuf {
    match base {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Invalid(format!("cannot parse {}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KernelJson {
    Diagonal { diag_fn: Vec<f64> },
    Matrix(MatrixJson),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeformationJson {
    pub lambda: f64,
    #[serde(rename = "K")]
    pub k: KernelJson,
}

impl DeformationJson {
    pub fn from_operator(d: &DeformationOperator) -> Self {
        let k = match d.kernel() {
            Kernel::Diagonal(values) => KernelJson::Diagonal {
                diag_fn: values.clone(),
            },
            Kernel::Full(m) => KernelJson::Matrix(MatrixJson::from_complex(m)),
        };
        Self {
            lambda: d.lambda(),
            k,
        }
    }

    pub fn to_operator(&self) -> Result<DeformationOperator> {
        let kernel = match &self.k {
            KernelJson::Diagonal { diag_fn } => Kernel::Diagonal(diag_fn.clone()),
            KernelJson::Matrix(m) => Kernel::Full(m.to_complex()?),
        };
        DeformationOperator::new(kernel, self.lambda)
    }
}

/// A function of the Fock level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TableSpec {
    Values(Vec<f64>),
    Named {
        name: String,
        #[serde(default)]
        lambda: Option<f64>,
    },
    /// A built-in name, or a path to a JSON file holding a table.
    Text(String),
}

/// How a table is turned into values: as `f(n)` or as `H̃(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableRole {
    F,
    Htilde,
}

const BUILTINS: [&str; 3] = ["identity", "sinh", "affine"];

impl TableSpec {
    /// Values on levels `0..dim`. `lambda` fills in for a named table without one.
    pub fn resolve(
        &self,
        role: TableRole,
        dim: usize,
        lambda: Option<f64>,
        base: Option<&Path>,
    ) -> Result<Vec<f64>> {
        let named = |table: NamedTable| match role {
            TableRole::F => table.f_values(dim),
            TableRole::Htilde => table.htilde_values(dim),
        };
        match self {
            TableSpec::Values(v) => Ok(v.clone()),
            TableSpec::Named { name, lambda: own } => {
                Ok(named(NamedTable::parse(name, own.or(lambda))?))
            }
            TableSpec::Text(s) if BUILTINS.contains(&s.as_str()) => {
                Ok(named(NamedTable::parse(s, lambda)?))
            }
            TableSpec::Text(path) => {
                let inner: TableSpec = read_json(&resolve(Path::new(path), base))?;
                if let TableSpec::Text(_) = inner {
                    return Err(Error::Invalid(format!(
                        "{path}: table file must hold an array or a named table"
                    )));
                }
                inner.resolve(role, dim, lambda, base)
            }
        }
    }

    /// Short description for reports.
    pub fn describe(&self) -> String {
        match self {
            TableSpec::Values(v) => format!("values[{}]", v.len()),
            TableSpec::Named { name, lambda } => match lambda {
                Some(l) => format!("{name}(lambda={l})"),
                None => name.clone(),
            },
            TableSpec::Text(s) => s.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_matrix_round_trip() {
        let m = RealMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let json = serde_json::to_string(&MatrixJson::from_real(&m)).unwrap();
        assert_eq!(
            json,
            r#"{"rows":2,"cols":3,"data":[1.0,2.0,3.0,4.0,5.0,6.0]}"#
        );
        let back: MatrixJson = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_real().unwrap(), m);
    }

    #[test]
    fn complex_matrix_round_trip() {
        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.5),
                Complex64::new(0.0, -1.0),
                Complex64::new(2.0, 0.0),
                Complex64::new(-3.0, 4.0),
            ],
        );
        let doc = MatrixJson::from_complex(&m);
        assert_eq!(doc.re.as_deref(), Some(&[1.0, 0.0, 2.0, -3.0][..]));
        assert_eq!(doc.im.as_deref(), Some(&[0.5, -1.0, 0.0, 4.0][..]));
        assert_eq!(doc.to_complex().unwrap(), m);
        assert!(doc.to_real().is_err());
    }

    #[test]
    fn malformed_matrices() {
        let bad: MatrixJson =
            serde_json::from_str(r#"{"rows":2,"cols":2,"data":[1,2,3]}"#).unwrap();
        assert!(bad.to_real().is_err());
        let empty: MatrixJson = serde_json::from_str(r#"{"rows":1,"cols":1}"#).unwrap();
        assert!(empty.to_complex().is_err());
        assert!(serde_json::from_str::<MatrixJson>(r#"{"rows":1,"cols":1,"x":[]}"#).is_err());
    }

    #[test]
    fn deformation_formats() {
        let diag: DeformationJson =
            serde_json::from_str(r#"{"lambda": 0.5, "K": {"diag_fn": [0, 1, 2]}}"#).unwrap();
        let d = diag.to_operator().unwrap();
        assert_eq!(d.dim(), 3);
        assert!((d.weight()[(2, 2)].re - 1f64.exp()).abs() < 1e-15);

        let full: DeformationJson = serde_json::from_str(
            r#"{"lambda": 1, "K": {"rows": 2, "cols": 2, "data": [0, 1, 1, 0]}}"#,
        )
        .unwrap();
        let d = full.to_operator().unwrap();
        let back = DeformationJson::from_operator(&d);
        assert_eq!(back.to_operator().unwrap().weight(), d.weight());

        let non_hermitean: DeformationJson = serde_json::from_str(
            r#"{"lambda": 1, "K": {"rows": 2, "cols": 2, "data": [0, 1, 0, 0]}}"#,
        )
        .unwrap();
        assert!(non_hermitean.to_operator().is_err());
    }

    #[test]
    fn table_specs() {
        let parse = |s: &str| serde_json::from_str::<TableSpec>(s).unwrap();
        assert_eq!(
            parse("[1, 2]")
                .resolve(TableRole::F, 2, None, None)
                .unwrap(),
            vec![1.0, 2.0]
        );
        assert_eq!(
            parse(r#""identity""#)
                .resolve(TableRole::Htilde, 3, None, None)
                .unwrap(),
            vec![0.5, 1.5, 2.5]
        );
        let affine = parse(r#"{"name": "affine", "lambda": 0.2}"#)
            .resolve(TableRole::F, 3, None, None)
            .unwrap();
        assert!((affine[2] * affine[2] - 1.4).abs() < 1e-15);
        assert!(parse(r#""sinh""#)
            .resolve(TableRole::F, 3, None, None)
            .is_err());
        assert!(parse(r#""sinh""#)
            .resolve(TableRole::F, 3, Some(0.5), None)
            .is_ok());
        assert!(parse(r#""missing.json""#)
            .resolve(TableRole::F, 3, None, None)
            .is_err());
    }

    #[test]
    fn sources_resolve_relative_to_base() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("f.json"), "[1.0, 0.5]").unwrap();
        std::fs::write(
            dir.path().join("m.json"),
            r#"{"rows":1,"cols":1,"data":[3.0]}"#,
        )
        .unwrap();
        let table = TableSpec::Text("f.json".into());
        assert_eq!(
            table
                .resolve(TableRole::F, 2, None, Some(dir.path()))
                .unwrap(),
            vec![1.0, 0.5]
        );
        let src: Source<MatrixJson> = serde_json::from_str(r#""m.json""#).unwrap();
        assert_eq!(src.load(Some(dir.path())).unwrap().data, Some(vec![3.0]));
    }
}
