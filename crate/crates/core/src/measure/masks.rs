//! Per-cell symbol tests on the polar of a vector measure. Polars are rationalized before the
//! exact test and each distinct polar is evaluated once.

use std::collections::HashMap;

use super::{GridMeasure, Polar, VectorGridMeasure};
use crate::error::{Error, Result};
use crate::operator::FirstOrderOperator;
use crate::par;
use crate::rational::{rationalize, Q};

/// Largest denominator used when rationalizing a polar vector.
pub const MASK_MAX_DEN: u64 = 1000;

fn rational_polar(p: &[f64]) -> Vec<Q> {
    p.iter().map(|&x| rationalize(x, MASK_MAX_DEN)).collect()
}

/// Evaluates `f` once per distinct polar on the support; `None` off the support.
fn per_cell<T, F>(op: &FirstOrderOperator, mu: &VectorGridMeasure, f: F) -> Result<Vec<Option<T>>>
where
    T: Clone + Send + Sync,
    F: Fn(&[Q]) -> Result<T> + Sync + Send,
{
    mu.validate()?;
    if op.dim_e() != mu.dim_e {
        return Err(Error::DimensionMismatch(op.dim_e(), mu.dim_e));
    }
    if op.d() != mu.base.d {
        return Err(Error::DimensionMismatch(op.d(), mu.base.d));
    }
    let support = mu.base.support();
    let mut out: Vec<Option<T>> = vec![None; mu.base.len()];
    match &mu.polar {
        Polar::Uniform(p) => {
            if support.is_empty() {
                return Ok(out);
            }
            let v = f(&rational_polar(p))?;
            for c in support {
                out[c] = Some(v.clone());
            }
        }
        Polar::Field(_) => {
            let mut keys: HashMap<Vec<u64>, usize> = HashMap::new();
            let mut distinct: Vec<usize> = Vec::new();
            let mut slot = vec![0usize; support.len()];
            for (s, &c) in support.iter().enumerate() {
                let key: Vec<u64> = mu.polar_at(c).iter().map(|x| x.to_bits()).collect();
                let next = distinct.len();
                let k = *keys.entry(key).or_insert(next);
                if k == next {
                    distinct.push(c);
                }
                slot[s] = k;
            }
            let values: Vec<Result<T>> = par::map_slice(&distinct, |&c| f(&rational_polar(mu.polar_at(c))));
            let values: Vec<T> = values.into_iter().collect::<Result<_>>()?;
            for (s, &c) in support.iter().enumerate() {
                out[c] = Some(values[slot[s]].clone());
            }
        }
    }
    Ok(out)
}

/// `true` where the polar lies outside the wave cone; unsupported cells are `false`.
pub fn wave_cone_mask(op: &FirstOrderOperator, mu: &VectorGridMeasure) -> Result<Vec<bool>> {
    Ok(per_cell(op, mu, |e| Ok(!op.wave_cone_member(e)?.member))?
        .into_iter()
        .map(|v| v.unwrap_or(false))
        .collect())
}

/// `dim invariance_space(polar)` on supported cells.
pub fn pointwise_invariance_dim(op: &FirstOrderOperator, mu: &VectorGridMeasure) -> Result<Vec<Option<usize>>> {
    per_cell(op, mu, |e| Ok(op.invariance_space(e)?.dim()))
}

/// `mu` with mass removed where `mask` is false.
pub fn restrict(mu: &GridMeasure, mask: &[bool]) -> Result<GridMeasure> {
    if mask.len() != mu.len() {
        return Err(Error::DimensionMismatch(mask.len(), mu.len()));
    }
    let mut out = mu.clone();
    for (m, &keep) in out.mass.iter_mut().zip(mask) {
        if !keep {
            *m = 0.0;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::{box_dimension, DEFAULT_MASS_THRESHOLD};
    use super::*;
    use crate::operator::{make_curl, make_div};

    #[test]
    fn identity_polar_is_outside_the_cone() {
        let op = make_curl(2, 2).unwrap();
        let base = GridMeasure::lebesgue(2, 64, 2.0 / 64.0).unwrap();
        let mu = VectorGridMeasure::uniform(base.clone(), &[1.0, 0.0, 0.0, 1.0]).unwrap();
        let mask = wave_cone_mask(&op, &mu).unwrap();
        assert!(mask.iter().all(|&m| m));
        let b = box_dimension(&restrict(&base, &mask).unwrap(), 5, DEFAULT_MASS_THRESHOLD).unwrap();
        assert!((b.estimate - 2.0).abs() <= 0.15);
    }

    #[test]
    fn planar_curl_cone_is_everything() {
        let op = make_curl(2, 1).unwrap();
        let base = GridMeasure::lebesgue(2, 16, 0.125).unwrap();
        let mu = VectorGridMeasure::uniform(base, &[0.3, -0.7]).unwrap();
        assert!(wave_cone_mask(&op, &mu).unwrap().iter().all(|&m| !m));
    }

    #[test]
    fn unsupported_cells_are_unmarked() {
        let op = make_curl(2, 2).unwrap();
        let mu = VectorGridMeasure::uniform(GridMeasure::dirac(2, 8, 0.25).unwrap(), &[1.0, 0.0, 0.0, 1.0]).unwrap();
        let mask = wave_cone_mask(&op, &mu).unwrap();
        assert_eq!(mask.iter().filter(|&&m| m).count(), 1);
    }

    #[test]
    fn rank_maps_for_div() {
        let op = make_div(2, 2).unwrap();
        let base = GridMeasure::lebesgue(2, 8, 0.25).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let r1 = VectorGridMeasure::uniform(base.clone(), &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(pointwise_invariance_dim(&op, &r1).unwrap().iter().all(|&v| v == Some(1)));
        let r2 = VectorGridMeasure::uniform(base.clone(), &[s, 0.0, 0.0, s]).unwrap();
        assert!(pointwise_invariance_dim(&op, &r2).unwrap().iter().all(|&v| v == Some(2)));
        // a field mixing both
        let (a, b) = ([1.0, 0.0, 0.0, 0.0], [s, 0.0, 0.0, s]);
        let mut field = Vec::new();
        for c in 0..base.len() {
            field.extend_from_slice(if c % 2 == 0 { &a } else { &b });
        }
        let mixed = VectorGridMeasure {
            base,
            dim_e: 4,
            polar: Polar::Field(field),
        };
        let dims = pointwise_invariance_dim(&op, &mixed).unwrap();
        assert_eq!(dims[0], Some(1));
        assert_eq!(dims[1], Some(2));
    }
}
