//! Rescaled restrictions `(1/|μ|(B_r(x))) (T^{r,x}_# μ) ⌞ B₁` with `T^{r,x}(y) = (y − x)/r`.

use serde::Serialize;

use super::GridMeasure;
use crate::error::{Error, Result};
use crate::par;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlowupResult {
    pub center: Vec<f64>,
    pub radius: f64,
    /// `|μ|(B_r(x))` before normalization.
    pub ball_mass: f64,
    /// Mass on `[−1, 1]^d`, all of it inside the closed unit ball, summing to 1.
    #[serde(skip)]
    pub measure: GridMeasure,
}

/// Blow-up onto a unit grid with the same number of cells per axis as `mu`.
pub fn blowup(mu: &GridMeasure, x: &[f64], r: f64) -> Result<BlowupResult> {
    blowup_onto(mu, x, r, mu.n)
}

/// Cells whose centers lie in the closed ball `B̄_r(x)` are pushed forward and their mass is
/// split over the `out_n^d` cells covering `[−1, 1]^d` in proportion to overlap, which conserves
/// mass up to summation order.
pub fn blowup_onto(mu: &GridMeasure, x: &[f64], r: f64, out_n: usize) -> Result<BlowupResult> {
    mu.validate()?;
    let d = mu.d;
    if x.len() != d {
        return Err(Error::DimensionMismatch(x.len(), d));
    }
    if !(r > 0.0) {
        return Err(Error::Domain(format!("blow-up radius must be positive, got {r}")));
    }
    let tol = 1e-12 * mu.side();
    for (k, &xk) in x.iter().enumerate() {
        if xk - r < mu.lo(k) - tol || xk + r > mu.lo(k) + mu.side() + tol {
            return Err(Error::Domain(format!("ball of radius {r} around {x:?} leaves the grid")));
        }
    }
    let mut out = GridMeasure::zeros(d, out_n, 2.0 / out_n as f64)?;
    let r2 = r * r * (1.0 + 1e-12);
    let support = mu.support();
    let binned: Vec<Vec<(usize, f64)>> = par::map_chunks(support.len(), |range| {
        let mut idx = vec![0usize; d];
        let mut c = vec![0.0; d];
        let mut hits = Vec::new();
        let mut axes: Vec<(usize, Vec<f64>)> = vec![(0, Vec::new()); d];
        for &cell in &support[range] {
            mu.unflat(cell, &mut idx);
            mu.center_of(&idx, &mut c);
            let dist2: f64 = c.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            if dist2 > r2 {
                continue;
            }
            for k in 0..d {
                axes[k] = spread(&out, k, (c[k] - mu.h / 2.0 - x[k]) / r, (c[k] + mu.h / 2.0 - x[k]) / r);
            }
            let ext: Vec<usize> = axes.iter().map(|a| a.1.len()).collect();
            let count: usize = ext.iter().product();
            for t in 0..count {
                let mut rest = t;
                let mut flat = 0;
                let mut w = mu.mass[cell];
                let mut stride = 1;
                for k in (0..d).rev() {
                    let j = rest % ext[k];
                    rest /= ext[k];
                    flat += (axes[k].0 + j) * stride;
                    stride *= out_n;
                    w *= axes[k].1[j];
                }
                if w != 0.0 {
                    hits.push((flat, w));
                }
            }
        }
        hits
    });
    let mut ball_mass = 0.0;
    for (cell, m) in binned.into_iter().flatten() {
        out.mass[cell] += m;
        ball_mass += m;
    }
    if !(ball_mass > 0.0) {
        return Err(Error::ZeroMass);
    }
    out.mass.iter_mut().for_each(|m| *m /= ball_mass);
    Ok(BlowupResult {
        center: x.to_vec(),
        radius: r,
        ball_mass,
        measure: out,
    })
}

/// Fractions of the interval `[a, b]` (clipped to the unit grid) falling in consecutive cells
/// along axis `k`; they sum to 1.
fn spread(out: &GridMeasure, k: usize, a: f64, b: f64) -> (usize, Vec<f64>) {
    let (lo, hi) = (out.lo(k), out.lo(k) + out.side());
    let (a, b) = (a.clamp(lo, hi), b.clamp(lo, hi));
    let last_cell = out.n - 1;
    let first = out.axis_index(k, a).unwrap_or(last_cell);
    if b <= a {
        return (first, vec![1.0]);
    }
    let last = out.axis_index(k, b).unwrap_or(last_cell).max(first);
    let len = b - a;
    let fr: Vec<f64> = (first..=last)
        .map(|i| {
            let c0 = lo + i as f64 * out.h;
            ((b.min(c0 + out.h) - a.max(c0)) / len).max(0.0)
        })
        .collect();
    let total: f64 = fr.iter().sum();
    (first, fr.into_iter().map(|f| f / total).collect())
}

/// Mass of `mu` on cells whose centers lie in the closed ball, computed directly.
pub fn ball_mass(mu: &GridMeasure, x: &[f64], r: f64) -> f64 {
    let d = mu.d;
    let r2 = r * r * (1.0 + 1e-12);
    par::sum_f64(mu.len(), |cell| {
        let m = mu.mass[cell];
        if m == 0.0 {
            return 0.0;
        }
        let mut idx = vec![0usize; d];
        let mut c = vec![0.0; d];
        mu.unflat(cell, &mut idx);
        mu.center_of(&idx, &mut c);
        let dist2: f64 = c.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
        if dist2 <= r2 {
            m
        } else {
            0.0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l1(a: &GridMeasure, b: &GridMeasure) -> f64 {
        a.mass.iter().zip(&b.mass).map(|(x, y)| (x - y).abs()).sum()
    }

    fn line(n: usize) -> GridMeasure {
        let h = 2.0 / n as f64;
        let mut g = GridMeasure::zeros(2, n, h).unwrap();
        for i in 0..n {
            let c = g.flat(&[i, n / 2]);
            g.mass[c] = h;
        }
        g
    }

    /// Arc-length measure of the circle of radius `rho` centered at the origin.
    fn circle(n: usize, rho: f64) -> GridMeasure {
        let h = 2.0 / n as f64;
        let mut g = GridMeasure::zeros(2, n, h).unwrap();
        let samples = 400_000;
        let w = 2.0 * std::f64::consts::PI * rho / samples as f64;
        for s in 0..samples {
            let t = 2.0 * std::f64::consts::PI * (s as f64 + 0.5) / samples as f64;
            let (i, j) = (
                g.axis_index(0, rho * t.cos()).unwrap(),
                g.axis_index(1, rho * t.sin()).unwrap(),
            );
            let c = g.flat(&[i, j]);
            g.mass[c] += w;
        }
        g
    }

    #[test]
    fn lebesgue_blows_up_to_uniform_ball() {
        let g = GridMeasure::lebesgue(2, 64, 1.0 / 32.0).unwrap();
        let b = blowup(&g, &[0.1, -0.2], 0.5).unwrap();
        assert!((b.measure.total_mass() - 1.0).abs() < 1e-12);
        // uniform on the ball: cells near the center carry equal mass
        let c1 = b.measure.mass[b.measure.flat(&[31, 32])];
        let c2 = b.measure.mass[b.measure.flat(&[33, 30])];
        assert!(c1 > 0.0 && (c1 - c2).abs() / c1 < 0.2);
    }

    #[test]
    fn conserves_mass_before_normalization() {
        let g = GridMeasure::lebesgue(3, 32, 1.0 / 16.0).unwrap();
        let x = [0.05, 0.0, -0.3];
        let b = blowup_onto(&g, &x, 0.4, 16).unwrap();
        let direct = ball_mass(&g, &x, 0.4);
        assert!((b.ball_mass - direct).abs() <= 1e-10 * direct);
    }

    #[test]
    fn line_is_self_similar() {
        let g = line(128);
        let b = blowup(&g, &[0.0, 0.0], 0.5).unwrap();
        assert!((b.measure.total_mass() - 1.0).abs() < 1e-12);
        // the line cell row has width 2h after scaling by 1/r, so it covers two output rows
        let support = b.measure.support();
        let mut idx = [0; 2];
        for c in &support {
            b.measure.unflat(*c, &mut idx);
            assert!((64..=65).contains(&idx[1]));
        }
        let row = |i: usize| b.measure.mass[b.measure.flat(&[i, 64])] + b.measure.mass[b.measure.flat(&[i, 65])];
        assert!((row(40) - row(80)).abs() < 1e-12);
    }

    #[test]
    fn double_blowup_is_stable() {
        let g = line(128);
        let inner = blowup(&g, &[0.25, 0.0], 0.5).unwrap();
        let outer = blowup(&inner.measure, &[0.0, 0.0], 1.0).unwrap();
        let cell = inner.measure.mass.iter().copied().fold(0.0, f64::max);
        assert!(l1(&inner.measure, &outer.measure) <= 2.0 * cell + 1e-12);
    }

    #[test]
    fn circle_converges_to_tangent() {
        let rho = 0.5;
        let g = circle(256, rho);
        let tangent = {
            let mut t = GridMeasure::zeros(2, 256, 2.0 / 256.0).unwrap();
            for j in 0..256 {
                let c = t.flat(&[128, j]);
                t.mass[c] = 1.0;
            }
            blowup(&t, &[0.0, 0.0], 1.0).unwrap().measure
        };
        let dists: Vec<f64> = [0.4, 0.2, 0.1]
            .iter()
            .map(|&r| l1(&blowup_onto(&g, &[rho - 1.0 / 256.0, 0.0], r, 32).unwrap().measure, &blowup_onto(&tangent, &[0.0, 0.0], 1.0, 32).unwrap().measure))
            .collect();
        assert!(dists[0] > dists[1] && dists[1] > dists[2], "{dists:?}");
    }

    #[test]
    fn errors() {
        let g = GridMeasure::lebesgue(2, 16, 0.125).unwrap();
        assert!(matches!(blowup(&g, &[0.9, 0.0], 0.5), Err(Error::Domain(_))));
        let z = GridMeasure::zeros(2, 16, 0.125).unwrap();
        assert!(matches!(blowup(&z, &[0.0, 0.0], 0.5), Err(Error::ZeroMass)));
    }
}
