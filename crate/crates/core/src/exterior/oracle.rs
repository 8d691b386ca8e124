//! Brute-force checks of the annihilator dimension bounds and of simplicity ⟺ extremal
//! annihilator dimension. Simplicity is judged independently of the annihilators through the
//! rank of the contraction map Λ^{m-1} → ℝ^d, z ↦ v ⌞ z (the dimension of the smallest
//! subspace W with v ∈ Λ_m W), which equals m exactly for decomposable v.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{ann1_covector, ann1_vector, basis_masks, is_simple, MultiVector, Variance};
use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::rational::{q, q_frac, Q};

/// Dimension of the support space of `v`, computed from the full contraction matrix.
pub fn support_rank(v: &MultiVector) -> usize {
    let (d, m) = (v.dim(), v.grade());
    if m == 0 {
        return 0;
    }
    let ts = basis_masks(d, m - 1);
    let mut a = QMatrix::zeros(d, ts.len());
    for (col, &t) in ts.iter().enumerate() {
        for j in 0..d {
            let bit = 1u64 << j;
            if t & bit != 0 {
                continue;
            }
            let c = v.coeff(t | bit);
            if num_traits::Zero::is_zero(&c) {
                continue;
            }
            // e_T ∧ e_j = (-1)^{#{t in T : t > j}} e_{T ∪ j}
            let above = (t >> (j + 1)).count_ones();
            a[(j, col)] = if above % 2 == 1 { -c } else { c };
        }
    }
    a.rank()
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaAbReport {
    pub d: usize,
    pub m: usize,
    pub samples: usize,
    pub cases_checked: usize,
    pub simple_cases: usize,
    pub pass: bool,
    pub counterexample: Option<String>,
}

/// Checks, for all basis blades, all sums of two distinct blades, and `samples` random
/// rational m-(co)vectors: dim Ann¹(v*) ≤ m, dim Ann₁(v) ≤ d − m, and equality in either
/// bound exactly when v is simple.
pub fn lemma_ab_oracle(d: usize, m: usize, samples: usize, seed: u64) -> Result<LemmaAbReport> {
    if !(1..=6).contains(&d) || m < 1 || m > d {
        return Err(Error::OutOfRange(format!(
            "lemma_ab_oracle needs 1 ≤ m ≤ d ≤ 6, got d={d}, m={m}"
        )));
    }
    let mut report = LemmaAbReport {
        d,
        m,
        samples,
        cases_checked: 0,
        simple_cases: 0,
        pass: true,
        counterexample: None,
    };
    let masks = basis_masks(d, m);

    // (coefficients, independently known simplicity if any)
    let mut cases: Vec<(MultiVector, Option<bool>)> = Vec::new();
    for &s in &masks {
        cases.push((MultiVector::from_terms(d, m, Variance::Vector, [(s, q(1))])?, Some(true)));
    }
    for (i, &s) in masks.iter().enumerate() {
        for &t in &masks[i + 1..] {
            let shared = (s & t).count_ones() as usize;
            let v = MultiVector::from_terms(d, m, Variance::Vector, [(s, q(1)), (t, q(1))])?;
            cases.push((v, Some(shared + 1 == m)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while cases.len() < masks.len() + masks.len() * (masks.len() - 1) / 2 + samples {
        if rng.gen_bool(0.5) {
            let mut w = MultiVector::scalar(d, Variance::Vector, q(1));
            for _ in 0..m {
                let coords: Vec<Q> = (0..d).map(|_| random_q(&mut rng)).collect();
                w = w.wedge(&MultiVector::from_vector(Variance::Vector, &coords))?;
            }
            if !w.is_zero() {
                cases.push((w, Some(true)));
            }
        } else {
            let mut terms: Vec<(u64, Q)> = Vec::new();
            for &s in &masks {
                if rng.gen_bool(0.6) {
                    terms.push((s, random_q(&mut rng)));
                }
            }
            let w = MultiVector::from_terms(d, m, Variance::Vector, terms)?;
            if !w.is_zero() {
                cases.push((w, None));
            }
        }
    }

    for (v, known) in cases {
        report.cases_checked += 1;
        if let Err(msg) = check_case(&v, known) {
            report.pass = false;
            report.counterexample = Some(format!("{v}: {msg}"));
            break;
        }
        if support_rank(&v) == m {
            report.simple_cases += 1;
        }
    }
    Ok(report)
}

fn check_case(v: &MultiVector, known: Option<bool>) -> std::result::Result<(), String> {
    let (d, m) = (v.dim(), v.grade());
    let r = support_rank(v);
    let simple = r == m;
    if let Some(k) = known {
        if k != simple {
            return Err(format!("support rank {r} contradicts known simplicity {k}"));
        }
    }
    let vstar = v.musical_iso();
    let a_up = ann1_covector(&vstar).map_err(|e| e.to_string())?.dim();
    let a_dn = ann1_vector(v).map_err(|e| e.to_string())?.dim();
    if a_up > m {
        return Err(format!("dim Ann¹ = {a_up} > m = {m}"));
    }
    if a_dn > d - m {
        return Err(format!("dim Ann₁ = {a_dn} > d − m = {}", d - m));
    }
    if (a_up == m) != simple {
        return Err(format!("dim Ann¹ = {a_up} but support rank {r}"));
    }
    if (a_dn == d - m) != simple {
        return Err(format!("dim Ann₁ = {a_dn} but support rank {r}"));
    }
    let t1 = is_simple(v).map_err(|e| e.to_string())?;
    let t2 = is_simple(&vstar).map_err(|e| e.to_string())?;
    if t1.simple != simple || t2.simple != simple {
        return Err("is_simple disagrees with support rank".into());
    }
    for (t, w) in [(t1, v), (t2, &vstar)] {
        if let Some(f) = t.factors {
            let prod = f[1..]
                .iter()
                .try_fold(f[0].clone(), |acc, x| acc.wedge(x))
                .map_err(|e| e.to_string())?;
            if &prod != w {
                return Err("factorization does not reproduce the input".into());
            }
        }
    }
    Ok(())
}

fn random_q(rng: &mut ChaCha8Rng) -> Q {
    let n = rng.gen_range(-4i64..=4);
    let d = rng.gen_range(1i64..=3);
    q_frac(n, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_rank_examples() {
        let e12 = MultiVector::blade(4, Variance::Vector, &[1, 2]).unwrap();
        let e34 = MultiVector::blade(4, Variance::Vector, &[3, 4]).unwrap();
        assert_eq!(support_rank(&e12), 2);
        assert_eq!(support_rank(&e12.add(&e34).unwrap()), 4);
    }

    #[test]
    fn oracle_small_cases() {
        let r = lemma_ab_oracle(4, 2, 100, 0).unwrap();
        assert!(r.pass, "{:?}", r.counterexample);
        let r = lemma_ab_oracle(3, 3, 10, 0).unwrap();
        assert!(r.pass);
        assert_eq!(r.simple_cases, r.cases_checked);
    }

    #[test]
    fn oracle_range_guard() {
        assert!(lemma_ab_oracle(7, 2, 1, 0).is_err());
        assert!(lemma_ab_oracle(3, 0, 1, 0).is_err());
        assert!(lemma_ab_oracle(3, 4, 1, 0).is_err());
    }
}
