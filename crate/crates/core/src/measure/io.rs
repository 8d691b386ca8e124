//! On-disk layout: a directory holding `header.json`, `mass.f64` and, for vector measures,
//! `polar.f64` (`n^d × dimE`, cell-major). Arrays are raw little-endian binary64 in C order.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GridMeasure, Polar, VectorGridMeasure};
use crate::error::{parse_err, Result};

pub const HEADER: &str = "header.json";
pub const MASS: &str = "mass.f64";
pub const POLAR: &str = "polar.f64";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub d: usize,
    pub n: usize,
    pub h: f64,
    pub origin: Vec<f64>,
    pub dtype: String,
    #[serde(rename = "dimE", skip_serializing_if = "Option::is_none", default)]
    pub dim_e: Option<usize>,
}

impl Header {
    pub fn of(g: &GridMeasure, dtype: &str, dim_e: Option<usize>) -> Self {
        Self {
            d: g.d,
            n: g.n,
            h: g.h,
            origin: g.origin.clone(),
            dtype: dtype.to_string(),
            dim_e,
        }
    }
}

fn f64s_to_bytes(v: &[f64]) -> Vec<u8> {
    v.iter().flat_map(|x| x.to_le_bytes()).collect()
}

fn bytes_to_f64s(b: &[u8], field: &str) -> Result<Vec<f64>> {
    if b.len() % 8 != 0 {
        return Err(parse_err(field, "length is not a multiple of 8 bytes"));
    }
    Ok(b.chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

pub fn write_header(dir: &Path, header: &Header) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(HEADER), serde_json::to_vec_pretty(header)?)?;
    Ok(())
}

pub fn read_header(dir: &Path) -> Result<Header> {
    let raw = fs::read(dir.join(HEADER))?;
    serde_json::from_slice(&raw).map_err(|e| parse_err(HEADER, e.to_string()))
}

pub fn write_grid(dir: &Path, g: &GridMeasure) -> Result<()> {
    write_header(dir, &Header::of(g, "f64le", None))?;
    fs::write(dir.join(MASS), f64s_to_bytes(&g.mass))?;
    Ok(())
}

pub fn write_vector(dir: &Path, mu: &VectorGridMeasure) -> Result<()> {
    write_header(dir, &Header::of(&mu.base, "f64le", Some(mu.dim_e)))?;
    fs::write(dir.join(MASS), f64s_to_bytes(&mu.base.mass))?;
    fs::write(dir.join(POLAR), f64s_to_bytes(&mu.dense_polar()))?;
    Ok(())
}

/// Reads the base measure, ignoring any polar array.
pub fn read_grid(dir: &Path) -> Result<GridMeasure> {
    let h = read_header(dir)?;
    if h.dtype != "f64le" {
        return Err(parse_err("dtype", format!("expected \"f64le\", got {:?}", h.dtype)));
    }
    let mass = bytes_to_f64s(&fs::read(dir.join(MASS))?, MASS)?;
    let g = GridMeasure {
        d: h.d,
        n: h.n,
        h: h.h,
        origin: h.origin,
        mass,
    };
    g.validate()?;
    Ok(g)
}

/// Reads a vector measure; a polar that is identical on every supported cell comes back as
/// [`Polar::Uniform`].
pub fn read_vector(dir: &Path) -> Result<VectorGridMeasure> {
    let dim_e = read_header(dir)?
        .dim_e
        .ok_or_else(|| parse_err("dimE", "missing; not a vector measure"))?;
    let base = read_grid(dir)?;
    let field = bytes_to_f64s(&fs::read(dir.join(POLAR))?, POLAR)?;
    let mut mu = VectorGridMeasure {
        base,
        dim_e,
        polar: Polar::Field(field),
    };
    mu.validate()?;
    let support = mu.base.support();
    if let Some(&first) = support.first() {
        let p0 = mu.polar_at(first).to_vec();
        if support.iter().all(|&c| mu.polar_at(c) == p0.as_slice()) {
            mu.polar = Polar::Uniform(p0);
        }
    }
    Ok(mu)
}
