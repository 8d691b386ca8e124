use num_traits::Zero;

use super::{basis_masks, MultiVector, Subspace, Variance};
use crate::error::{Error, Result};
use crate::linalg::QMatrix;

/// Ann¹(v*) = {ξ : ξ* ∧ v* = 0}, the kernel of the (d choose m+1) × d wedge matrix.
pub fn ann1_covector(v: &MultiVector) -> Result<Subspace> {
    if v.variance() != Variance::Covector {
        return Err(Error::VarianceMismatch { expected: "covector" });
    }
    if v.is_zero() {
        return Err(Error::ZeroInput("ann1_covector of the zero covector"));
    }
    let d = v.dim();
    let rows = basis_masks(d, v.grade() + 1);
    let mut a = QMatrix::zeros(rows.len(), d);
    for i in 0..d {
        let xi = MultiVector::blade(d, Variance::Covector, &[i + 1])?;
        let w = xi.wedge(v)?;
        for (r, &mask) in rows.iter().enumerate() {
            a[(r, i)] = w.coeff(mask);
        }
    }
    Ok(kernel(&a, d))
}

/// Ann₁(v) = {ξ : v ⌞ ξ* = 0}, the kernel of the (d choose m−1) × d interior-product matrix.
pub fn ann1_vector(v: &MultiVector) -> Result<Subspace> {
    if v.variance() != Variance::Vector {
        return Err(Error::VarianceMismatch { expected: "vector" });
    }
    if v.is_zero() {
        return Err(Error::ZeroInput("ann1_vector of the zero vector"));
    }
    if v.grade() == 0 {
        return Err(Error::OutOfRange("ann1_vector needs grade ≥ 1".into()));
    }
    let d = v.dim();
    let rows = basis_masks(d, v.grade() - 1);
    let mut a = QMatrix::zeros(rows.len(), d);
    for i in 0..d {
        let xi = MultiVector::blade(d, Variance::Covector, &[i + 1])?;
        let w = v.interior_mult(&xi)?;
        for (r, &mask) in rows.iter().enumerate() {
            a[(r, i)] = w.coeff(mask);
        }
    }
    Ok(kernel(&a, d))
}

fn kernel(a: &QMatrix, d: usize) -> Subspace {
    Subspace::span(d, &a.null_space())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleTest {
    pub simple: bool,
    /// Grade-1 factors (same variance as the input) whose wedge equals the input exactly.
    pub factors: Option<Vec<MultiVector>>,
}

/// Decides decomposability by the extremal annihilator dimension and, when simple, returns an
/// exact wedge factorization.
pub fn is_simple(v: &MultiVector) -> Result<SimpleTest> {
    if v.is_zero() {
        return Err(Error::ZeroInput("is_simple of the zero element"));
    }
    let (d, m) = (v.dim(), v.grade());
    if m == 0 {
        return Ok(SimpleTest {
            simple: true,
            factors: Some(Vec::new()),
        });
    }
    let span = match v.variance() {
        Variance::Covector => {
            let ann = ann1_covector(v)?;
            if ann.dim() != m {
                return Ok(SimpleTest {
                    simple: false,
                    factors: None,
                });
            }
            ann
        }
        Variance::Vector => {
            let ann = ann1_vector(v)?;
            if ann.dim() != d - m {
                return Ok(SimpleTest {
                    simple: false,
                    factors: None,
                });
            }
            ann.orthogonal_complement()
        }
    };
    let mut factors: Vec<MultiVector> = span
        .basis()
        .iter()
        .map(|b| MultiVector::from_vector(v.variance(), b))
        .collect();
    let mut w = factors[0].clone();
    for f in &factors[1..] {
        w = w.wedge(f)?;
    }
    let (mask, c) = v.terms().next().expect("nonzero");
    let wc = w.coeff(mask);
    if wc.is_zero() {
        return Err(Error::Degenerate("annihilator factors do not reproduce the input".into()));
    }
    let ratio = c / &wc;
    factors[0] = factors[0].scale(&ratio);
    debug_assert_eq!(
        factors[1..]
            .iter()
            .try_fold(factors[0].clone(), |acc, f| acc.wedge(f))
            .ok(),
        Some(v.clone())
    );
    Ok(SimpleTest {
        simple: true,
        factors: Some(factors),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn cov(d: usize, idx: &[usize]) -> MultiVector {
        MultiVector::blade(d, Variance::Covector, idx).unwrap()
    }

    fn vecb(d: usize, idx: &[usize]) -> MultiVector {
        MultiVector::blade(d, Variance::Vector, idx).unwrap()
    }

    fn e(d: usize, i: usize) -> Vec<crate::rational::Q> {
        (0..d).map(|j| q(i64::from(j + 1 == i))).collect()
    }

    #[test]
    fn ann1_covector_examples() {
        let a = ann1_covector(&cov(4, &[1, 2])).unwrap();
        assert_eq!(a, Subspace::span(4, &[e(4, 1), e(4, 2)]));
        let sympl = cov(4, &[1, 2]).add(&cov(4, &[3, 4])).unwrap();
        assert_eq!(ann1_covector(&sympl).unwrap().dim(), 0);
        assert_eq!(ann1_covector(&cov(3, &[1])).unwrap(), Subspace::span(3, &[e(3, 1)]));
        assert!(matches!(
            ann1_covector(&MultiVector::zero(3, 1, Variance::Covector)),
            Err(Error::ZeroInput(_))
        ));
    }

    #[test]
    fn ann1_vector_examples() {
        let a = ann1_vector(&vecb(4, &[1, 2])).unwrap();
        assert_eq!(a, Subspace::span(4, &[e(4, 3), e(4, 4)]));
        let sympl = vecb(4, &[1, 2]).add(&vecb(4, &[3, 4])).unwrap();
        assert_eq!(ann1_vector(&sympl).unwrap().dim(), 0);
        assert_eq!(ann1_vector(&vecb(3, &[1])).unwrap(), Subspace::span(3, &[e(3, 2), e(3, 3)]));
    }

    #[test]
    fn simplicity_examples() {
        let t = is_simple(&cov(4, &[1, 2])).unwrap();
        assert!(t.simple);
        assert_eq!(t.factors.unwrap().len(), 2);

        let sympl = cov(4, &[1, 2]).add(&cov(4, &[3, 4])).unwrap();
        assert!(!is_simple(&sympl).unwrap().simple);

        let v = cov(3, &[1, 2]).add(&cov(3, &[1, 3])).unwrap();
        let t = is_simple(&v).unwrap();
        assert!(t.simple);
        let f = t.factors.unwrap();
        assert_eq!(f[0].wedge(&f[1]).unwrap(), v);
        assert_eq!(
            ann1_covector(&v).unwrap(),
            Subspace::span(3, &[e(3, 1), vec![q(0), q(1), q(1)]])
        );
    }

    #[test]
    fn vector_factorization_reproduces_input() {
        let v = vecb(4, &[1, 3]).scale(&q(3)).add(&vecb(4, &[2, 3])).unwrap();
        let t = is_simple(&v).unwrap();
        assert!(t.simple);
        let f = t.factors.unwrap();
        assert_eq!(f[0].wedge(&f[1]).unwrap(), v);
    }
}
