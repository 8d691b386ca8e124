//! Binary64 grid measures on a cube and the experiments run on them.
//!
//! A grid has `n` cells of width `h` per axis, centered at `origin`; cell `(i₁, …, i_d)` covers
//! `origin_k − nh/2 + [i_k h, (i_k + 1) h)` and masses are stored in C order.

mod blowup;
mod boxdim;
mod density;
mod invariance;
pub mod io;
mod masks;
mod residual;
mod sharp;

pub use blowup::{ball_mass, blowup, blowup_onto, BlowupResult};
pub use boxdim::{box_dimension, default_scales, BoxDimension, ScaleCount, DEFAULT_MASS_THRESHOLD};
pub use density::upper_density;
pub use invariance::{
    candidate_directions, detect_invariance, invariance_defect, invariance_defect_seeded, translations,
};
pub use masks::{pointwise_invariance_dim, restrict, wave_cone_mask, MASK_MAX_DEN};
pub use residual::{weak_residual, ResidualReport, TestFamily, TestProbe};
pub use sharp::sharp_measure;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct GridMeasure {
    pub d: usize,
    pub n: usize,
    pub h: f64,
    pub origin: Vec<f64>,
    pub mass: Vec<f64>,
}

impl GridMeasure {
    pub fn zeros(d: usize, n: usize, h: f64) -> Result<Self> {
        if d == 0 || n == 0 || !(h > 0.0) {
            return Err(Error::Shape(format!("grid needs d, n ≥ 1 and h > 0, got d={d}, n={n}, h={h}")));
        }
        let len = n
            .checked_pow(d as u32)
            .ok_or_else(|| Error::Shape(format!("{n}^{d} cells overflow")))?;
        Ok(Self {
            d,
            n,
            h,
            origin: vec![0.0; d],
            mass: vec![0.0; len],
        })
    }

    /// Each cell carries its volume `h^d`.
    pub fn lebesgue(d: usize, n: usize, h: f64) -> Result<Self> {
        let mut g = Self::zeros(d, n, h)?;
        let v = h.powi(d as i32);
        g.mass.iter_mut().for_each(|m| *m = v);
        Ok(g)
    }

    /// Unit mass in the cell containing the origin.
    pub fn dirac(d: usize, n: usize, h: f64) -> Result<Self> {
        let mut g = Self::zeros(d, n, h)?;
        let c = g.flat(&vec![n / 2; d]);
        g.mass[c] = 1.0;
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn side(&self) -> f64 {
        self.n as f64 * self.h
    }

    pub fn total_mass(&self) -> f64 {
        crate::par::sum_f64(self.len(), |i| self.mass[i])
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn unflat(&self, mut k: usize, out: &mut [usize]) {
        for slot in out.iter_mut().rev() {
            *slot = k % self.n;
            k /= self.n;
        }
    }

    /// Lower corner of the domain along axis `k`.
    pub fn lo(&self, k: usize) -> f64 {
        self.origin[k] - self.side() / 2.0
    }

    pub fn center_of(&self, idx: &[usize], out: &mut [f64]) {
        for (k, (o, &i)) in out.iter_mut().zip(idx).enumerate() {
            *o = self.lo(k) + (i as f64 + 0.5) * self.h;
        }
    }

    /// Cell containing `x` along axis `k`, if inside the domain.
    pub fn axis_index(&self, k: usize, x: f64) -> Option<usize> {
        let t = ((x - self.origin[k]) / self.h + self.n as f64 / 2.0).floor();
        (t >= 0.0 && t < self.n as f64).then_some(t as usize)
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        x.len() == self.d
            && x
                .iter()
                .enumerate()
                .all(|(k, &v)| v >= self.lo(k) && v <= self.lo(k) + self.side())
    }

    /// Flat indices of cells with positive mass, ascending.
    pub fn support(&self) -> Vec<usize> {
        crate::par::map_chunks(self.len(), |r| r.filter(|&i| self.mass[i] > 0.0).collect::<Vec<_>>())
            .into_iter()
            .flatten()
            .collect()
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.origin.len() != self.d {
            return Err(Error::Shape("origin length differs from d".into()));
        }
        if Some(self.mass.len()) != self.n.checked_pow(self.d as u32) {
            return Err(Error::Shape(format!(
                "mass array has {} entries, expected {}^{}",
                self.mass.len(),
                self.n,
                self.d
            )));
        }
        if self.mass.iter().any(|m| !(*m >= 0.0) || !m.is_finite()) {
            return Err(Error::Domain("masses must be finite and nonnegative".into()));
        }
        Ok(())
    }
}

/// Polar density `dμ/d|μ|`. A constant polar is stored once.
#[derive(Clone, Debug, PartialEq)]
pub enum Polar {
    Uniform(Vec<f64>),
    /// `n^d × dimE`, cell-major.
    Field(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorGridMeasure {
    pub base: GridMeasure,
    pub dim_e: usize,
    pub polar: Polar,
}

impl VectorGridMeasure {
    /// Constant polar `e/|e|`.
    pub fn uniform(base: GridMeasure, e: &[f64]) -> Result<Self> {
        let norm = e.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::ZeroInput("polar vector must be nonzero"));
        }
        Ok(Self {
            base,
            dim_e: e.len(),
            polar: Polar::Uniform(e.iter().map(|x| x / norm).collect()),
        })
    }

    pub fn polar_at(&self, cell: usize) -> &[f64] {
        match &self.polar {
            Polar::Uniform(v) => v,
            Polar::Field(f) => &f[cell * self.dim_e..(cell + 1) * self.dim_e],
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        self.base.validate()?;
        let ok = match &self.polar {
            Polar::Uniform(v) => v.len() == self.dim_e,
            Polar::Field(f) => f.len() == self.base.len() * self.dim_e,
        };
        if !ok || self.dim_e == 0 {
            return Err(Error::Shape("polar array does not match dimE".into()));
        }
        Ok(())
    }

    /// Cell-major polar array with zeros off the support.
    pub fn dense_polar(&self) -> Vec<f64> {
        match &self.polar {
            Polar::Field(f) => f.clone(),
            Polar::Uniform(v) => {
                let mut out = vec![0.0; self.base.len() * self.dim_e];
                for (c, m) in self.base.mass.iter().enumerate() {
                    if *m > 0.0 {
                        out[c * self.dim_e..(c + 1) * self.dim_e].copy_from_slice(v);
                    }
                }
                out
            }
        }
    }
}
