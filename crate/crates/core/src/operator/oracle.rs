//! Exhaustive lattice minimum of rank M(e), written without the search machinery: integer
//! coefficients, i128 arithmetic and fraction-free elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use super::FirstOrderOperator;
use crate::error::{Error, Result};
use crate::par;

const LIMIT: u64 = 10_000_000;

/// `min rank M(e)` over nonzero `e ∈ {−H..H}^{dimE}` (one representative per ±e).
pub fn ell_bruteforce_oracle(op: &FirstOrderOperator, height: u32) -> Result<usize> {
    let n = op.dim_e();
    let side = 2 * height as u64 + 1;
    let total = side
        .checked_pow(n as u32)
        .filter(|&t| t <= LIMIT)
        .ok_or(Error::LatticeTooLarge {
            height,
            dim: n,
            limit: LIMIT,
        })?;
    let (f, d) = (op.dim_f(), op.d());

    let mut den = BigInt::one();
    for p in op.principal() {
        for r in 0..f {
            for c in 0..n {
                den = den.lcm(p[(r, c)].denom());
            }
        }
    }
    // per coordinate j: nonzero (row, column, value) of the integer symbol block
    let mut triplets: Vec<Vec<(usize, usize, i128)>> = vec![Vec::new(); n];
    for (i, p) in op.principal().iter().enumerate() {
        for r in 0..f {
            for (j, t) in triplets.iter_mut().enumerate() {
                let v = p[(r, j)].numer() * (&den / p[(r, j)].denom());
                let v = v
                    .to_i128()
                    .ok_or_else(|| Error::Domain("coefficients too large for the oracle".into()))?;
                if v != 0 {
                    t.push((r, i, v));
                }
            }
        }
    }

    let h = height as i64;
    let chunks = total.div_ceil(par::CHUNK as u64) as usize;
    let mins = par::map_range(chunks, |c| {
        let lo = c as u64 * par::CHUNK as u64;
        let hi = (lo + par::CHUNK as u64).min(total);
        let mut best = usize::MAX;
        let mut e = vec![0i64; n];
        let mut m = vec![0i128; f * d];
        for idx in lo..hi {
            let mut rest = idx;
            for x in e.iter_mut().rev() {
                *x = (rest % side) as i64 - h;
                rest /= side;
            }
            match e.iter().find(|&&x| x != 0) {
                Some(&x) if x > 0 => {}
                _ => continue,
            }
            m.iter_mut().for_each(|v| *v = 0);
            for (j, &x) in e.iter().enumerate() {
                if x != 0 {
                    for &(r, i, v) in &triplets[j] {
                        m[r * d + i] += v * x as i128;
                    }
                }
            }
            best = best.min(bareiss_rank(&mut m, f, d, best));
            if best == 0 {
                break;
            }
        }
        best
    });
    Ok(mins.into_iter().min().unwrap_or(0).min(f.min(d)))
}

/// Fraction-free rank; returns early once `cap` pivots are found.
fn bareiss_rank(a: &mut [i128], rows: usize, cols: usize, cap: usize) -> usize {
    let mut rank = 0;
    let mut prev = 1i128;
    for c in 0..cols {
        if rank == rows || rank >= cap {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| a[r * cols + c] != 0) else {
            continue;
        };
        if p != rank {
            for k in 0..cols {
                a.swap(p * cols + k, rank * cols + k);
            }
        }
        let piv = a[rank * cols + c];
        for r in rank + 1..rows {
            let f = a[r * cols + c];
            for k in c + 1..cols {
                a[r * cols + k] = (piv * a[r * cols + k] - f * a[rank * cols + k]) / prev;
            }
            a[r * cols + c] = 0;
        }
        prev = piv;
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::super::{make_curl, make_div, make_ext_derivative};
    use super::*;

    #[test]
    fn bareiss_matches_known_ranks() {
        let mut a = vec![1, 2, 3, 2, 4, 6, 1, 0, 1];
        assert_eq!(bareiss_rank(&mut a, 3, 3, usize::MAX), 2);
        let mut b = vec![2, 0, 0, 3];
        assert_eq!(bareiss_rank(&mut b, 2, 2, usize::MAX), 2);
        let mut z = vec![0; 6];
        assert_eq!(bareiss_rank(&mut z, 2, 3, usize::MAX), 0);
    }

    #[test]
    fn small_gallery_values() {
        assert_eq!(ell_bruteforce_oracle(&make_curl(2, 1).unwrap(), 2).unwrap(), 1);
        assert_eq!(ell_bruteforce_oracle(&make_curl(3, 2).unwrap(), 1).unwrap(), 2);
        assert_eq!(ell_bruteforce_oracle(&make_div(2, 2).unwrap(), 2).unwrap(), 1);
        assert_eq!(ell_bruteforce_oracle(&make_ext_derivative(3, 1).unwrap(), 2).unwrap(), 2);
    }

    #[test]
    fn refuses_huge_lattices() {
        let op = make_curl(4, 3).unwrap();
        assert!(matches!(
            ell_bruteforce_oracle(&op, 2),
            Err(Error::LatticeTooLarge { .. })
        ));
    }
}
