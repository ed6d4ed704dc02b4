//! The JSON input format and its canonical form.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use ifslab::invariant::{AffineIfs, AffineMap};
use ifslab::linalg::MAX_DIM;
use ifslab::{RealVector, SquareMatrix};

use crate::error::{CliError, ErrorKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDocument {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub v: Vec<f64>,
}

/// `{"dim": d, "maps": [{"A": [[...]], "v": [...]}, ...], "name": "..."}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IfsDocument {
    pub dim: usize,
    pub maps: Vec<MapDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl IfsDocument {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let doc: IfsDocument = serde_json::from_str(text).map_err(|e| CliError {
            kind: ErrorKind::Parse,
            message: e.to_string(),
            line: Some(e.line()),
            column: Some(e.column()),
        })?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.dim == 0 || self.dim > MAX_DIM {
            return Err(CliError::validation(format!("dim must lie in 1..={MAX_DIM}, got {}", self.dim)));
        }
        if self.maps.is_empty() {
            return Err(CliError::validation("maps must not be empty"));
        }
        for (i, m) in self.maps.iter().enumerate() {
            if m.a.len() != self.dim {
                return Err(CliError::validation(format!(
                    "maps[{i}].A has {} rows, expected {}",
                    m.a.len(),
                    self.dim
                )));
            }
            for (r, row) in m.a.iter().enumerate() {
                if row.len() != self.dim {
                    return Err(CliError::validation(format!(
                        "maps[{i}].A[{r}] has length {}, expected {}",
                        row.len(),
                        self.dim
                    )));
                }
            }
            if m.v.len() != self.dim {
                return Err(CliError::validation(format!(
                    "maps[{i}].v has length {}, expected {}",
                    m.v.len(),
                    self.dim
                )));
            }
        }
        Ok(())
    }

    pub fn to_ifs(&self) -> Result<AffineIfs, CliError> {
        let maps = self
            .maps
            .iter()
            .map(|m| AffineMap::new(SquareMatrix::from_rows(&m.a)?, RealVector::new(m.v.clone())?))
            .collect::<ifslab::Result<Vec<_>>>()?;
        Ok(AffineIfs::new(maps)?)
    }

    pub fn from_ifs(name: Option<String>, ifs: &AffineIfs) -> Self {
        IfsDocument {
            dim: ifs.dim(),
            maps: ifs
                .maps()
                .iter()
                .map(|m| MapDocument { a: m.linear.rows(), v: m.translation.as_slice().to_vec() })
                .collect(),
            name,
        }
    }

    /// Compact JSON with keys in the order `dim`, `maps` (`A`, `v`), `name`
    /// and every entry written as a shortest round-trip float.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("documents always serialize")
    }

    /// Hex SHA-256 of [`canonical_json`](Self::canonical_json).
    pub fn sha256(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_ignores_layout() {
        let a = IfsDocument::parse(r#"{"name":"x","dim":1,"maps":[{"v":[1],"A":[[0.5]]}]}"#).unwrap();
        let b = IfsDocument::parse("{\n  \"dim\": 1,\n  \"maps\": [{\"A\": [[5e-1]], \"v\": [1.0]}],\n  \"name\": \"x\"\n}")
            .unwrap();
        assert_eq!(a.canonical_json(), r#"{"dim":1,"maps":[{"A":[[0.5]],"v":[1.0]}],"name":"x"}"#);
        assert_eq!(a.sha256(), b.sha256());
    }

    #[test]
    fn parse_errors_carry_position() {
        let e = IfsDocument::parse("{\n  \"dim\": 2,\n  \"maps\": [\n}").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Parse);
        assert_eq!(e.line, Some(4));
        assert!(e.column.is_some());
    }

    #[test]
    fn validation_names_the_offending_field() {
        let e = IfsDocument::parse(r#"{"dim":2,"maps":[{"A":[[0.5,0],[0]],"v":[0,0]}]}"#).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Validation);
        assert!(e.message.contains("maps[0].A[1]"));
        let e = IfsDocument::parse(r#"{"dim":2,"maps":[]}"#).unwrap_err();
        assert!(e.message.contains("empty"));
    }
}
