//! Translation invariance along rational subspaces, tested with whole-cell shifts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::GridMeasure;
use crate::exterior::Subspace;
use crate::par;
use crate::rational::q;

const RANDOM_COMBINATIONS: usize = 6;

/// Seeded cell shifts in `V`: each primitive integer basis vector, a random multiple of it, and
/// a few random integer combinations, all of Euclidean length ≤ n/4 cells.
pub fn translations(v: &Subspace, n: usize, seed: u64) -> Vec<Vec<i64>> {
    let Some(basis) = v.integer_basis_i64() else {
        return Vec::new();
    };
    let limit = 0.25 * n as f64;
    let norm = |t: &[i64]| t.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Vec<i64>> = Vec::new();
    let push = |t: Vec<i64>, out: &mut Vec<Vec<i64>>| {
        if t.iter().any(|&x| x != 0) && norm(&t) <= limit && !out.contains(&t) {
            out.push(t);
        }
    };
    for b in &basis {
        push(b.clone(), &mut out);
        let kmax = (limit / norm(b)).floor() as i64;
        if kmax >= 2 {
            let k = rng.gen_range(2..=kmax);
            push(b.iter().map(|x| x * k).collect(), &mut out);
        }
    }
    for _ in 0..RANDOM_COMBINATIONS {
        let c: Vec<i64> = basis.iter().map(|_| rng.gen_range(-2..=2)).collect();
        let t: Vec<i64> = (0..v.ambient_dim())
            .map(|k| basis.iter().zip(&c).map(|(b, cj)| b[k] * cj).sum())
            .collect();
        if t.iter().all(|&x| x == 0) {
            continue;
        }
        let kmax = (limit / norm(&t)).floor() as i64;
        if kmax >= 1 {
            let k = rng.gen_range(1..=kmax);
            push(t.iter().map(|x| x * k).collect(), &mut out);
        }
    }
    out
}

pub fn invariance_defect(mu: &GridMeasure, v: &Subspace) -> f64 {
    invariance_defect_seeded(mu, v, 0)
}

/// Max over [`translations`] of `‖A/|A| − B/|B|‖₁`, where `A` is `μ` on the overlap of the grid
/// with its shift and `B` the shifted copy there. 2 means the shifted mass is disjoint; a
/// subspace with no admissible shift also scores 2.
pub fn invariance_defect_seeded(mu: &GridMeasure, v: &Subspace, seed: u64) -> f64 {
    assert_eq!(v.ambient_dim(), mu.d, "subspace and grid dimensions differ");
    if v.dim() == 0 {
        return 0.0;
    }
    let support = mu.support();
    translations(v, mu.n, seed)
        .iter()
        .filter_map(|t| shift_defect(mu, &support, t))
        .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))))
        .unwrap_or(2.0)
}

fn shifted(mu: &GridMeasure, cell: usize, t: &[i64], sign: i64, idx: &mut [usize]) -> Option<usize> {
    mu.unflat(cell, idx);
    let mut flat = 0usize;
    for (i, &tk) in idx.iter().zip(t) {
        let j = *i as i64 + sign * tk;
        if j < 0 || j >= mu.n as i64 {
            return None;
        }
        flat = flat * mu.n + j as usize;
    }
    Some(flat)
}

fn shift_defect(mu: &GridMeasure, support: &[usize], t: &[i64]) -> Option<f64> {
    let d = mu.d;
    let sums = |sign: i64| {
        par::map_chunks(support.len(), |r| {
            let mut idx = vec![0usize; d];
            support[r]
                .iter()
                .filter(|&&c| shifted(mu, c, t, sign, &mut idx).is_some())
                .map(|&c| mu.mass[c])
                .sum::<f64>()
        })
        .into_iter()
        .sum::<f64>()
    };
    let sa = sums(1);
    let sb = sums(-1);
    if sa == 0.0 && sb == 0.0 {
        return None;
    }
    if sa == 0.0 || sb == 0.0 {
        return Some(2.0);
    }
    let l1 = par::map_chunks(support.len(), |r| {
        let mut idx = vec![0usize; d];
        let mut acc = 0.0;
        for &c in &support[r] {
            if let Some(fwd) = shifted(mu, c, t, 1, &mut idx) {
                acc += (mu.mass[c] / sa - mu.mass[fwd] / sb).abs();
            }
            if let Some(back) = shifted(mu, c, t, -1, &mut idx) {
                if mu.mass[back] == 0.0 {
                    acc += mu.mass[c] / sb;
                }
            }
        }
        acc
    })
    .into_iter()
    .sum::<f64>();
    Some(l1)
}

/// Primitive integer directions of height ≤ `height`, first nonzero entry positive, ordered by
/// height, then support size, with coordinate axes first.
pub fn candidate_directions(d: usize, height: i64) -> Vec<Vec<i64>> {
    let side = (2 * height + 1) as usize;
    let total = side.pow(d as u32);
    let mut out: Vec<Vec<i64>> = (0..total)
        .map(|mut k| {
            let mut v = vec![0i64; d];
            for x in v.iter_mut().rev() {
                *x = (k % side) as i64 - height;
                k /= side;
            }
            v
        })
        .filter(|v| {
            let first = v.iter().find(|&&x| x != 0);
            matches!(first, Some(&x) if x > 0)
                && v.iter().fold(0i64, |g, &x| num_integer::gcd(g, x)) == 1
        })
        .collect();
    out.sort_by(|a, b| {
        let key = |v: &[i64]| {
            (
                v.iter().map(|x| x.abs()).max().unwrap_or(0),
                v.iter().filter(|&&x| x != 0).count(),
            )
        };
        key(a).cmp(&key(b)).then_with(|| b.cmp(a))
    });
    out
}

/// Greedy span of candidate directions that keeps the invariance defect within `tol`.
pub fn detect_invariance(mu: &GridMeasure, tol: f64) -> Subspace {
    let d = mu.d;
    let mut current = Subspace::zero(d);
    for dir in candidate_directions(d, 2) {
        if current.dim() == d {
            break;
        }
        let v: Vec<_> = dir.iter().map(|&x| q(x)).collect();
        if current.contains(&v) {
            continue;
        }
        let line = Subspace::span(d, &[v]);
        if invariance_defect(mu, &line) > tol {
            continue;
        }
        let trial = current.sum(&line);
        if invariance_defect(mu, &trial) <= tol {
            current = trial;
        }
    }
    current
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(d: usize, n: usize, axes: &[usize]) -> GridMeasure {
        let h = 2.0 / n as f64;
        let mut g = GridMeasure::zeros(d, n, h).unwrap();
        let mut idx = vec![0; d];
        for c in 0..g.len() {
            g.unflat(c, &mut idx);
            if (0..d).all(|k| axes.contains(&k) || idx[k] == n / 2) {
                g.mass[c] = h.powi(axes.len() as i32);
            }
        }
        g
    }

    fn axis(d: usize, k: usize) -> Subspace {
        let mut v = vec![q(0); d];
        v[k] = q(1);
        Subspace::span(d, &[v])
    }

    #[test]
    fn lebesgue_is_invariant() {
        let g = GridMeasure::lebesgue(3, 16, 0.125).unwrap();
        let v = Subspace::span(3, &[vec![q(1), q(2), q(0)]]);
        assert!(invariance_defect(&g, &v) <= 1e-12);
        assert!(invariance_defect(&g, &Subspace::full(3)) <= 1e-12);
    }

    #[test]
    fn plane_is_invariant_along_itself_only() {
        let g = plane(3, 64, &[0, 1]);
        let v = Subspace::span(3, &[vec![q(1), q(0), q(0)], vec![q(0), q(1), q(0)]]);
        assert!(invariance_defect(&g, &v) < 0.02);
        assert!((invariance_defect(&g, &axis(3, 2)) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dirac_defect_is_two() {
        let g = GridMeasure::dirac(2, 16, 0.125).unwrap();
        assert!((invariance_defect(&g, &axis(2, 0)) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn translations_stay_in_subspace_and_bound() {
        let v = Subspace::span(3, &[vec![q(1), q(-1), q(0)], vec![q(0), q(0), q(1)]]);
        let ts = translations(&v, 64, 3);
        assert!(!ts.is_empty());
        for t in &ts {
            let tq: Vec<_> = t.iter().map(|&x| q(x)).collect();
            assert!(v.contains(&tq));
            assert!(t.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt() <= 16.0);
        }
        assert_eq!(ts, translations(&v, 64, 3));
    }

    #[test]
    fn candidates_start_with_axes() {
        let c = candidate_directions(3, 2);
        assert_eq!(&c[..3], &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(c.len(), 49);
        assert!(!c.contains(&vec![2, 0, 0]));
    }

    #[test]
    fn detector_examples() {
        let g = plane(3, 32, &[0, 1]);
        let s = detect_invariance(&g, 0.05);
        assert_eq!(s.dim(), 2);
        assert!(invariance_defect(&g, &s) <= 0.05);
        assert_eq!(detect_invariance(&GridMeasure::lebesgue(2, 16, 0.125).unwrap(), 0.05).dim(), 2);
        assert_eq!(detect_invariance(&GridMeasure::dirac(3, 16, 0.125).unwrap(), 0.05).dim(), 0);
    }
}
