//! Distributional pairing `|⟨P(D)μ, φ⟩|` against a seeded family of radial C² bumps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::VectorGridMeasure;
use crate::error::{Error, Result};
use crate::operator::FirstOrderOperator;
use crate::par;
use crate::rational::to_f64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFamily {
    pub radii: Vec<f64>,
    pub centers_per_radius: usize,
    pub seed: u64,
    /// Explicit `(center, radius)` bumps; when present the random draw is skipped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed: Option<Vec<(Vec<f64>, f64)>>,
}

impl Default for TestFamily {
    fn default() -> Self {
        Self {
            radii: vec![0.2, 0.35, 0.5],
            centers_per_radius: 5,
            seed: 0,
            fixed: None,
        }
    }
}

impl TestFamily {
    pub fn seeded(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    /// Replays the bumps of an earlier report, e.g. on a finer grid.
    pub fn replay(report: &ResidualReport) -> Self {
        Self {
            fixed: Some(report.probes.iter().map(|p| (p.center.clone(), p.radius)).collect()),
            ..report.family.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestProbe {
    pub center: Vec<f64>,
    pub radius: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub value: f64,
    pub family: TestFamily,
    pub probes: Vec<TestProbe>,
}

const CENTER_TRIES: usize = 10_000;

/// Max over the family of `|Σ_cells Σᵢ Pᵢμ(cell) ∂ᵢφ(x) − P₀μ(cell) φ(x)|`, the norm taken in F.
///
/// Bumps are `φ(x) = (1 − |x − c|²/r²)³` on `|x − c| < r`. Centers are drawn near the support
/// (a random supported cell moved by at most `r/2`) so that every bump actually meets `μ`.
pub fn weak_residual(op: &FirstOrderOperator, mu: &VectorGridMeasure, family: &TestFamily) -> Result<ResidualReport> {
    mu.validate()?;
    let g = &mu.base;
    if op.d() != g.d {
        return Err(Error::DimensionMismatch(op.d(), g.d));
    }
    if op.dim_e() != mu.dim_e {
        return Err(Error::DimensionMismatch(op.dim_e(), mu.dim_e));
    }
    let (d, f, e) = (g.d, op.dim_f(), op.dim_e());
    let mats: Vec<Vec<f64>> = std::iter::once(op.p0())
        .chain(op.principal().iter())
        .map(|m| {
            (0..f)
                .flat_map(|r| (0..e).map(move |c| (r, c)))
                .map(|(r, c)| to_f64(&m[(r, c)]))
                .collect()
        })
        .collect();
    let apply = |k: usize, v: &[f64], out: &mut [f64], scale: f64| {
        for (r, o) in out.iter_mut().enumerate() {
            let row = &mats[k][r * e..(r + 1) * e];
            *o += scale * row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        }
    };

    let bumps: Vec<(Vec<f64>, f64)> = match &family.fixed {
        Some(list) => {
            for (c, r) in list {
                let fits = c.len() == d
                    && *r > 0.0
                    && (0..d).all(|k| c[k] - r >= g.lo(k) && c[k] + r <= g.lo(k) + g.side());
                if !fits {
                    return Err(Error::Domain(format!("test bump at {c:?} of radius {r} leaves the grid")));
                }
            }
            list.clone()
        }
        None => {
            let support = g.support();
            let mut rng = ChaCha8Rng::seed_from_u64(family.seed);
            let mut list = Vec::new();
            for &r in &family.radii {
                if !(r > 0.0) || 2.0 * r > g.side() {
                    return Err(Error::Domain(format!("test radius {r} does not fit the grid")));
                }
                for _ in 0..family.centers_per_radius {
                    list.push((pick_center(g, &support, r, &mut rng)?, r));
                }
            }
            list
        }
    };
    let mut probes = Vec::new();
    for (center, r) in bumps {
        let mut lo = vec![0usize; d];
        let mut hi = vec![0usize; d];
        for k in 0..d {
            lo[k] = g.axis_index(k, center[k] - r).unwrap_or(0);
            hi[k] = g.axis_index(k, center[k] + r).unwrap_or(g.n - 1);
        }
        let ext: Vec<usize> = (0..d).map(|k| hi[k] - lo[k] + 1).collect();
        let inner: usize = ext[1..].iter().product();
        let slabs = par::map_range(ext[0], |s| {
            let mut acc = vec![0.0; f];
            let mut idx = vec![0usize; d];
            let mut x = vec![0.0; d];
            for t in 0..inner {
                idx[0] = lo[0] + s;
                let mut rest = t;
                for k in (1..d).rev() {
                    idx[k] = lo[k] + rest % ext[k];
                    rest /= ext[k];
                }
                let cell = g.flat(&idx);
                let m = g.mass[cell];
                if m == 0.0 {
                    continue;
                }
                g.center_of(&idx, &mut x);
                let rho2: f64 = x.iter().zip(&center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / (r * r);
                if rho2 >= 1.0 {
                    continue;
                }
                let base = 1.0 - rho2;
                let phi = base * base * base;
                let dphi = -6.0 * base * base / (r * r);
                let pol = mu.polar_at(cell);
                for i in 0..d {
                    let gi = dphi * (x[i] - center[i]);
                    if gi != 0.0 {
                        apply(i + 1, pol, &mut acc, m * gi);
                    }
                }
                apply(0, pol, &mut acc, -m * phi);
            }
            acc
        });
        let mut total = vec![0.0; f];
        for s in slabs {
            total.iter_mut().zip(&s).for_each(|(t, v)| *t += v);
        }
        let residual = total.iter().map(|v| v * v).sum::<f64>().sqrt();
        probes.push(TestProbe {
            center,
            radius: r,
            residual,
        });
    }
    let value = probes.iter().map(|p| p.residual).fold(0.0, f64::max);
    Ok(ResidualReport {
        value,
        family: family.clone(),
        probes,
    })
}

fn pick_center(g: &super::GridMeasure, support: &[usize], r: f64, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let d = g.d;
    let mut idx = vec![0usize; d];
    let mut c = vec![0.0; d];
    for _ in 0..CENTER_TRIES {
        if support.is_empty() {
            for (k, ck) in c.iter_mut().enumerate() {
                *ck = g.lo(k) + rng.gen_range(0.0..1.0) * g.side();
            }
        } else {
            g.unflat(support[rng.gen_range(0..support.len())], &mut idx);
            g.center_of(&idx, &mut c);
            let off: Vec<f64> = loop {
                let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
                if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
                    break v;
                }
            };
            c.iter_mut().zip(&off).for_each(|(ck, o)| *ck += 0.5 * r * o);
        }
        let fits = (0..d).all(|k| c[k] - r >= g.lo(k) && c[k] + r <= g.lo(k) + g.side());
        if fits {
            return Ok(c);
        }
    }
    Err(Error::Domain(format!("no test bump of radius {r} fits inside the grid")))
}
