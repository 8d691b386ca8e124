//! `e · H^ℓ ⌞ V` on the grid cube, with `V` the invariance space of the witness.

use super::{GridMeasure, VectorGridMeasure};
use crate::error::{Error, Result};
use crate::operator::{EllCertificate, FirstOrderOperator};
use crate::par;
use crate::rational::to_f64;

/// Lays a lattice of spacing `h/2` (offset by half a step) on an orthonormal basis of `V` and
/// deposits each sample's ℓ-volume `(h/2)^ℓ` in its cell. Axis-aligned `V` is filled directly.
pub fn sharp_measure(op: &FirstOrderOperator, cert: &EllCertificate, n: usize, h: f64) -> Result<VectorGridMeasure> {
    let d = op.d();
    if cert.witness.len() != op.dim_e() {
        return Err(Error::DimensionMismatch(cert.witness.len(), op.dim_e()));
    }
    if cert.witness.iter().all(num_traits::Zero::is_zero) {
        return Err(Error::ZeroInput("certificate witness must be nonzero"));
    }
    let v = &cert.invariance_space;
    if v.ambient_dim() != d {
        return Err(Error::DimensionMismatch(v.ambient_dim(), d));
    }
    let e: Vec<f64> = cert.witness.iter().map(to_f64).collect();
    let mut base = GridMeasure::zeros(d, n, h)?;
    let ell = v.dim();

    if ell == 0 {
        tracing::warn!("ℓ = 0: the sharp measure is a Dirac mass at the origin");
        return VectorGridMeasure::uniform(GridMeasure::dirac(d, n, h)?, &e);
    }

    let axes: Option<Vec<usize>> = v
        .basis()
        .iter()
        .map(|row| {
            let nz: Vec<usize> = row
                .iter()
                .enumerate()
                .filter(|(_, x)| !num_traits::Zero::is_zero(*x))
                .map(|(k, _)| k)
                .collect();
            (nz.len() == 1).then(|| nz[0])
        })
        .collect();

    match axes {
        Some(axes) => fill_axis_aligned(&mut base, &axes),
        None => splat_lattice(&mut base, &v.orthonormal_f64()),
    }
    VectorGridMeasure::uniform(base, &e)
}

fn fill_axis_aligned(g: &mut GridMeasure, axes: &[usize]) {
    let (d, n) = (g.d, g.n);
    let w = g.h.powi(axes.len() as i32);
    let normal: Vec<usize> = (0..d).map(|k| g.axis_index(k, g.origin[k]).unwrap_or(n / 2)).collect();
    let mut idx = vec![0usize; d];
    for cell in 0..g.len() {
        g.unflat(cell, &mut idx);
        let on_plane = (0..d).all(|k| axes.contains(&k) || idx[k] == normal[k]);
        if on_plane {
            g.mass[cell] = w;
        }
    }
}

fn splat_lattice(g: &mut GridMeasure, basis: &[Vec<f64>]) {
    let (d, ell) = (g.d, basis.len());
    let s = g.h / 2.0;
    let half = g.side() / 2.0;
    let reach = (d as f64).sqrt() * half;
    let k = (reach / s).ceil() as i64;
    let per_axis = (2 * k) as usize;
    let w = s.powi(ell as i32);
    let total = per_axis.pow(ell as u32);
    // each chunk returns the flat cells it hit; merged in order for a deterministic sum
    let hits: Vec<Vec<usize>> = par::map_chunks(total, |range| {
        let mut out = Vec::new();
        let mut coef = vec![0.0; ell];
        let mut p = vec![0.0; d];
        for lin in range {
            let mut r = lin;
            for c in coef.iter_mut().rev() {
                *c = ((r % per_axis) as i64 - k) as f64 + 0.5;
                r /= per_axis;
            }
            p.iter_mut().for_each(|x| *x = 0.0);
            for (c, u) in coef.iter().zip(basis) {
                for (x, ui) in p.iter_mut().zip(u) {
                    *x += c * s * ui;
                }
            }
            if p.iter().any(|x| x.abs() >= half) {
                continue;
            }
            let mut flat = 0;
            let mut inside = true;
            for (axis, x) in p.iter().enumerate() {
                match g.axis_index(axis, g.origin[axis] + x) {
                    Some(i) => flat = flat * g.n + i,
                    None => {
                        inside = false;
                        break;
                    }
                }
            }
            if inside {
                out.push(flat);
            }
        }
        out
    });
    for cell in hits.into_iter().flatten() {
        g.mass[cell] += w;
    }
}
