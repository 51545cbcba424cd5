use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::basis::InvariantBasis;
use crate::algebra::SparsePoly;
use crate::coxeter::CoxeterType;
use crate::error::{Error, Result};

/// On-disk form of a basis: the polynomials plus a SHA-256 of their
/// canonical JSON.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BasisFile {
    #[serde(rename = "type")]
    pub ty: CoxeterType,
    pub degrees: Vec<u32>,
    pub polys: Vec<SparsePoly>,
    pub sha256: String,
}

#[derive(Serialize)]
struct Hashed<'a> {
    #[serde(rename = "type")]
    ty: CoxeterType,
    degrees: &'a [u32],
    polys: &'a [SparsePoly],
}

/// Hex SHA-256 of the canonical JSON of `(type, degrees, polys)`.
pub fn basis_hash(ty: CoxeterType, degrees: &[u32], polys: &[SparsePoly]) -> String {
    let body = serde_json::to_vec(&Hashed { ty, degrees, polys })
        .expect("polynomials always serialize");
    hex::encode(Sha256::digest(&body))
}

impl BasisFile {
    pub fn from_basis(b: &InvariantBasis) -> Self {
        let ty = b.coxeter_type();
        BasisFile {
            ty,
            degrees: b.degrees().to_vec(),
            polys: b.polys().to_vec(),
            sha256: basis_hash(ty, b.degrees(), b.polys()),
        }
    }

    /// Checks the hash and the expected type, then builds the basis.
    pub fn into_basis(self, expected: CoxeterType) -> Result<InvariantBasis> {
        if self.ty != expected {
            return Err(Error::Integrity(format!(
                "basis file holds {} where {expected} was expected",
                self.ty
            )));
        }
        let h = basis_hash(self.ty, &self.degrees, &self.polys);
        if h != self.sha256 {
            return Err(Error::Integrity(format!(
                "hash mismatch for {}: stored {}, computed {h}",
                self.ty, self.sha256
            )));
        }
        if self.degrees != expected.degrees() {
            return Err(Error::Integrity(format!(
                "degrees {:?} do not match the table for {expected}",
                self.degrees
            )));
        }
        InvariantBasis::new(expected, self.polys)
            .map_err(|e| Error::Integrity(format!("malformed basis file: {e}")))
    }
}

pub fn write_basis_file(path: &Path, b: &InvariantBasis) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let body = serde_json::to_string(&BasisFile::from_basis(b))?;
    fs::write(path, body)?;
    Ok(())
}

/// Reads a basis file. A file that does not parse or whose hash does not
/// match is an integrity error.
pub fn load_basis_file(path: &Path, expected: CoxeterType) -> Result<InvariantBasis> {
    let body = fs::read_to_string(path)?;
    let file: BasisFile = serde_json::from_str(&body)
        .map_err(|e| Error::Integrity(format!("{}: {e}", path.display())))?;
    file.into_basis(expected)
}
