//! Ratios `μ(Q_r(x)) / r^κ` over shrinking cubes of side `2r`.

use super::GridMeasure;
use crate::error::{Error, Result};
use crate::par;

/// Boundary cells count with their volume fraction inside the cube.
pub fn upper_density(mu: &GridMeasure, x: &[f64], kappa: f64, radii: &[f64]) -> Result<Vec<(f64, f64)>> {
    let d = mu.d;
    if x.len() != d {
        return Err(Error::DimensionMismatch(x.len(), d));
    }
    if !mu.contains_point(x) {
        return Err(Error::Domain(format!("point {x:?} lies outside the grid")));
    }
    if !(0.0..=d as f64).contains(&kappa) {
        return Err(Error::OutOfRange(format!("κ = {kappa} not in [0, {d}]")));
    }
    radii
        .iter()
        .map(|&r| {
            if !(r > 0.0) {
                return Err(Error::Domain(format!("radius must be positive, got {r}")));
            }
            Ok((r, cube_mass(mu, x, r) / r.powf(kappa)))
        })
        .collect()
}

fn cube_mass(mu: &GridMeasure, x: &[f64], r: f64) -> f64 {
    let d = mu.d;
    let h = mu.h;
    // per axis: (first cell, fractions of consecutive cells inside [x−r, x+r])
    let axes: Vec<(usize, Vec<f64>)> = (0..d)
        .map(|k| {
            let (a, b) = (x[k] - r, x[k] + r);
            let first = mu.axis_index(k, a).unwrap_or(0);
            let last = mu.axis_index(k, b).unwrap_or(mu.n - 1);
            let fr = (first..=last)
                .map(|i| {
                    let lo = mu.lo(k) + i as f64 * h;
                    ((b.min(lo + h) - a.max(lo)) / h).clamp(0.0, 1.0)
                })
                .collect();
            (first, fr)
        })
        .collect();
    let ext: Vec<usize> = axes.iter().map(|a| a.1.len()).collect();
    let inner: usize = ext[1..].iter().product();
    par::map_range(ext[0], |s| {
        let mut idx = vec![0usize; d];
        let mut acc = 0.0;
        for t in 0..inner {
            idx[0] = axes[0].0 + s;
            let mut w = axes[0].1[s];
            let mut rest = t;
            for k in (1..d).rev() {
                let j = rest % ext[k];
                rest /= ext[k];
                idx[k] = axes[k].0 + j;
                w *= axes[k].1[j];
            }
            if w > 0.0 {
                acc += w * mu.mass[mu.flat(&idx)];
            }
        }
        acc
    })
    .into_iter()
    .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane3(n: usize) -> GridMeasure {
        let h = 2.0 / n as f64;
        let mut g = GridMeasure::zeros(3, n, h).unwrap();
        let mut idx = [0; 3];
        for c in 0..g.len() {
            g.unflat(c, &mut idx);
            if idx[2] == n / 2 {
                g.mass[c] = h * h;
            }
        }
        g
    }

    #[test]
    fn plane_densities() {
        let g = plane3(128);
        let radii = [0.5, 0.25, 0.125, 0.0625];
        let at = |k: f64| upper_density(&g, &[0.0, 0.0, 0.0], k, &radii).unwrap();
        let r2 = at(2.0);
        for (_, v) in &r2 {
            assert!((v - 4.0).abs() / 4.0 < 0.05, "{r2:?}");
        }
        let r1 = at(1.0);
        assert!(r1.windows(2).all(|w| w[1].1 < w[0].1));
        let r25 = at(2.5);
        assert!(r25.windows(2).all(|w| w[1].1 > w[0].1));
    }

    #[test]
    fn fractional_boundary_cells() {
        let g = GridMeasure::lebesgue(2, 10, 0.2).unwrap();
        // cube of side 0.3 centered off-grid: exact area 0.09
        let v = upper_density(&g, &[0.03, -0.11], 0.0, &[0.15]).unwrap();
        assert!((v[0].1 - 0.09).abs() < 1e-12);
    }

    #[test]
    fn guards() {
        let g = GridMeasure::lebesgue(2, 10, 0.2).unwrap();
        assert!(upper_density(&g, &[3.0, 0.0], 1.0, &[0.1]).is_err());
        assert!(upper_density(&g, &[0.0, 0.0], 2.5, &[0.1]).is_err());
    }
}
