//! Box-counting over dyadic coarsenings of the grid.
//!
//! Minkowski dimension bounds Hausdorff dimension from above; for the flat measures `H^ℓ ⌞ V`
//! used here the two agree.

use serde::{Deserialize, Serialize};

use super::GridMeasure;
use crate::error::{Error, Result};

/// Boxes count when they carry at least this fraction of the mean mass of nonempty boxes.
pub const DEFAULT_MASS_THRESHOLD: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleCount {
    pub box_cells: usize,
    pub epsilon: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDimension {
    /// Least-squares slope of `log N` against `log 1/ε`; 0 when the fit is degenerate.
    pub estimate: f64,
    pub r2: Option<f64>,
    pub degenerate: bool,
    pub mass_threshold: f64,
    pub scales: Vec<ScaleCount>,
}

/// Number of dyadic scales used when the caller does not choose: up to six, keeping at least
/// two boxes per axis at the coarsest one.
pub fn default_scales(n: usize) -> usize {
    let mut s = 0;
    while s < 6 && (n >> s) >= 2 {
        s += 1;
    }
    s
}

/// Box sides `2^s` cells for `s = 0..scales`.
pub fn box_dimension(mu: &GridMeasure, scales: usize, mass_threshold: f64) -> Result<BoxDimension> {
    mu.validate()?;
    if !(mass_threshold > 0.0 && mass_threshold < 1.0) {
        return Err(Error::OutOfRange(format!("mass threshold {mass_threshold} not in (0, 1)")));
    }
    if scales < 4 || scales > usize::BITS as usize || (mu.n >> (scales - 1)) < 2 {
        return Err(Error::TooCoarse);
    }
    let d = mu.d;
    let support = mu.support();
    let total: f64 = support.iter().map(|&c| mu.mass[c]).sum();
    let counts: Vec<ScaleCount> = crate::par::map_range(scales, |s| {
        let b = 1usize << s;
        let m = mu.n.div_ceil(b);
        let mut boxes = vec![0.0f64; m.pow(d as u32)];
        let mut idx = vec![0usize; d];
        for &c in &support {
            mu.unflat(c, &mut idx);
            let flat = idx.iter().fold(0, |acc, &i| acc * m + i / b);
            boxes[flat] += mu.mass[c];
        }
        let nonempty = boxes.iter().filter(|&&x| x > 0.0).count();
        let count = if nonempty == 0 {
            0
        } else {
            let cut = mass_threshold * total / nonempty as f64;
            boxes.iter().filter(|&&x| x > 0.0 && x >= cut).count()
        };
        ScaleCount {
            box_cells: b,
            epsilon: b as f64 * mu.h,
            count,
        }
    });
    if counts.iter().any(|c| c.count == 0) {
        return Err(Error::ZeroMass);
    }
    let xs: Vec<f64> = counts.iter().map(|c| -c.epsilon.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|c| (c.count as f64).ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let degenerate = syy == 0.0;
    let (estimate, r2) = if degenerate {
        (0.0, None)
    } else {
        (sxy / sxx, Some(sxy * sxy / (sxx * syy)))
    };
    Ok(BoxDimension {
        estimate,
        r2,
        degenerate,
        mass_threshold,
        scales: counts,
    })
}
