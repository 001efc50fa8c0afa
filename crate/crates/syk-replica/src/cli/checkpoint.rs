//! Binary field checkpoints: `SYKGF01\n`, a little-endian `u32` header
//! length, a JSON header, then the row-major `f64` payload.

use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::contour::ContourKind;
use crate::error::{Error, Result};
use crate::field::BilocalField;
use crate::models::ModelParams;

pub const MAGIC: &[u8; 8] = b"SYKGF01\n";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub kind: String,
    pub beta: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub flavors: usize,
    pub model: ModelParams,
    pub theta: f64,
    pub dtype: String,
    pub layout: String,
}

impl CheckpointHeader {
    pub fn new(kind: ContourKind, beta: f64, m: usize, model: ModelParams, theta: f64) -> Self {
        Self {
            kind: kind.name().to_string(),
            beta,
            m,
            flavors: kind.flavors(),
            model,
            theta,
            dtype: "f64".into(),
            layout: "row-major".into(),
        }
    }

    pub fn contour_kind(&self) -> Result<ContourKind> {
        self.kind.parse()
    }

    /// Grid points per flavor.
    pub fn points(&self) -> Result<usize> {
        Ok(self.contour_kind()?.length_in_beta() * self.m)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub header: CheckpointHeader,
    pub g: BilocalField,
}

fn err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Checkpoint { path: path.display().to_string(), msg: msg.into() }
}

pub fn write_checkpoint(path: &Path, header: &CheckpointHeader, g: &BilocalField) -> Result<()> {
    let points = header.points()?;
    if g.flavors() != header.flavors || g.points() != points {
        return Err(err(path, format!("field {}x{} does not match header {}x{}", g.flavors(), g.points(), header.flavors, points)));
    }
    let json = serde_json::to_vec(header)?;
    let len = u32::try_from(json.len()).map_err(|_| err(path, "header too large"))?;
    let mut buf = Vec::with_capacity(12 + json.len() + 8 * g.values().len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&len.to_le_bytes());
    buf.extend_from_slice(&json);
    for v in g.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    let mut f = fs::File::create(path)?;
    f.write_all(&buf)?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    let bytes = fs::read(path).map_err(|e| err(path, e.to_string()))?;
    if bytes.len() < 12 || &bytes[..8] != MAGIC {
        return Err(err(path, "bad magic (not a SYKGF01 checkpoint)"));
    }
    let len = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let body = bytes.get(12..12 + len).ok_or_else(|| err(path, "truncated header"))?;
    let header: CheckpointHeader =
        serde_json::from_slice(body).map_err(|e| err(path, format!("header: {e}")))?;
    if header.dtype != "f64" || header.layout != "row-major" {
        return Err(err(path, format!("unsupported dtype/layout {}/{}", header.dtype, header.layout)));
    }
    let kind = header.contour_kind().map_err(|e| err(path, e.to_string()))?;
    if kind.flavors() != header.flavors {
        return Err(err(path, format!("{} flavors for contour {kind}", header.flavors)));
    }
    let n = header.flavors * header.points()?;
    let payload = &bytes[12 + len..];
    if payload.len() != 8 * n * n {
        return Err(err(path, format!("payload of {} bytes, expected {}", payload.len(), 8 * n * n)));
    }
    let data = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    let g = BilocalField::from_vec(header.flavors, n / header.flavors, data)?;
    Ok(Checkpoint { header, g })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.sykgf");
        let header = CheckpointHeader::new(ContourKind::Renyi2Qr, 2.0, 8, ModelParams::syk(1.0), 0.25);
        let g = BilocalField::from_fn(2, 16, |i, j| (i as f64 - j as f64) * 0.1 + 1e-17 * i as f64);
        write_checkpoint(&path, &header, &g).unwrap();
        let back = read_checkpoint(&path).unwrap();
        assert_eq!(back.header, header);
        assert_eq!(back.g, g);

        let mut bytes = fs::read(&path).unwrap();
        bytes[0] = b'X';
        fs::write(&path, &bytes).unwrap();
        match read_checkpoint(&path) {
            Err(Error::Checkpoint { path: p, msg }) => {
                assert!(p.ends_with("g.sykgf") && msg.contains("magic"));
            }
            other => panic!("{other:?}"),
        }
        bytes[0] = b'S';
        bytes.pop();
        fs::write(&path, &bytes).unwrap();
        assert!(read_checkpoint(&path).is_err());
        assert!(write_checkpoint(&path, &header, &BilocalField::zeros(1, 16)).is_err());
    }
}
