//! Exact multilinear algebra on ℝ^d: m-vectors, m-covectors, wedge and interior products,
//! the euclidean musical isomorphism, and the 1-annihilators used to decide simplicity.
//!
//! Basis blades are sorted index sets stored as bit masks (bit `i` is the 1-based index
//! `i + 1`), so `d` is limited to 64. Coefficients are exact rationals.

mod annihilator;
mod oracle;
mod subspace;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Error, Result};
use crate::rational::{format_q, parse_q, Q};

pub use annihilator::{ann1_covector, ann1_vector, is_simple, SimpleTest};
pub use oracle::{lemma_ab_oracle, support_rank, LemmaAbReport};
pub use subspace::Subspace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    Vector,
    Covector,
}

impl Variance {
    pub fn flip(self) -> Self {
        match self {
            Variance::Vector => Variance::Covector,
            Variance::Covector => Variance::Vector,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Variance::Vector => "vector",
            Variance::Covector => "covector",
        }
    }
}

/// A homogeneous element of Λ_m ℝ^d (vector) or Λ^m ℝ^d (covector).
///
/// Zero coefficients are never stored, so derived equality is coefficient-wise equality.
/// A wedge whose grade would exceed `d` yields the zero element with that formal grade.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiVector {
    dim: usize,
    grade: usize,
    variance: Variance,
    coeffs: BTreeMap<u64, Q>,
}

/// Sorted basis subsets of size `m` in `{0..d}` as masks, in lexicographic tuple order.
pub fn basis_masks(d: usize, m: usize) -> Vec<u64> {
    fn rec(start: usize, d: usize, left: usize, acc: u64, out: &mut Vec<u64>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for i in start..=d - left {
            rec(i + 1, d, left - 1, acc | (1 << i), out);
        }
    }
    let mut out = Vec::new();
    if m <= d {
        rec(0, d, m, 0, &mut out);
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Sign of `e_a ∧ e_b` relative to `e_{a∪b}`; `None` when the blades overlap.
pub fn wedge_sign(a: u64, b: u64) -> Option<bool> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        rest &= rest - 1;
        let above = if bit >= 63 { 0 } else { a >> (bit + 1) };
        swaps += above.count_ones();
    }
    Some(swaps % 2 == 1)
}

pub fn mask_to_indices(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect()
}

impl MultiVector {
    pub fn zero(dim: usize, grade: usize, variance: Variance) -> Self {
        assert!((1..=64).contains(&dim), "ambient dimension must be in 1..=64");
        Self {
            dim,
            grade,
            variance,
            coeffs: BTreeMap::new(),
        }
    }

    /// Builds from `(mask, coefficient)` terms; repeated masks accumulate.
    pub fn from_terms(
        dim: usize,
        grade: usize,
        variance: Variance,
        terms: impl IntoIterator<Item = (u64, Q)>,
    ) -> Result<Self> {
        if dim == 0 || dim > 64 {
            return Err(Error::OutOfRange(format!("ambient dimension {dim}")));
        }
        if grade > dim {
            return Err(Error::OutOfRange(format!("grade {grade} > dimension {dim}")));
        }
        let mut mv = Self::zero(dim, grade, variance);
        for (mask, c) in terms {
            if mask.count_ones() as usize != grade || (dim < 64 && mask >> dim != 0) {
                return Err(Error::OutOfRange(format!(
                    "basis index {:?} invalid for grade {grade} in dimension {dim}",
                    mask_to_indices(mask)
                )));
            }
            mv.add_term(mask, c);
        }
        Ok(mv)
    }

    /// The basis blade `e_{i1} ∧ … ∧ e_{im}` for 1-based indices (any order; sign follows).
    pub fn blade(dim: usize, variance: Variance, indices: &[usize]) -> Result<Self> {
        let mut out = Self::scalar(dim, variance, Q::one());
        for &i in indices {
            if i == 0 || i > dim {
                return Err(Error::OutOfRange(format!("index {i} outside 1..={dim}")));
            }
            out = out.wedge(&Self::basis1(dim, variance, i - 1))?;
        }
        Ok(out)
    }

    pub fn scalar(dim: usize, variance: Variance, c: Q) -> Self {
        let mut mv = Self::zero(dim, 0, variance);
        mv.add_term(0, c);
        mv
    }

    /// Grade-1 element with the given coordinates.
    pub fn from_vector(variance: Variance, coords: &[Q]) -> Self {
        let dim = coords.len();
        let mut mv = Self::zero(dim, 1, variance);
        for (i, c) in coords.iter().enumerate() {
            mv.add_term(1 << i, c.clone());
        }
        mv
    }

    fn basis1(dim: usize, variance: Variance, i: usize) -> Self {
        let mut mv = Self::zero(dim, 1, variance);
        mv.add_term(1 << i, Q::one());
        mv
    }

    /// Builds from a dense coefficient list ordered as `basis_masks(dim, grade)`.
    pub fn from_dense(dim: usize, grade: usize, variance: Variance, dense: &[Q]) -> Result<Self> {
        let masks = basis_masks(dim, grade);
        if masks.len() != dense.len() {
            return Err(Error::Shape(format!(
                "expected {} coefficients for grade {grade} in dimension {dim}, got {}",
                masks.len(),
                dense.len()
            )));
        }
        Self::from_terms(dim, grade, variance, masks.into_iter().zip(dense.iter().cloned()))
    }

    pub fn to_dense(&self) -> Vec<Q> {
        basis_masks(self.dim, self.grade)
            .into_iter()
            .map(|m| self.coeff(m))
            .collect()
    }

    fn add_term(&mut self, mask: u64, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(mask).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&mask);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, mask: u64) -> Q {
        self.coeffs.get(&mask).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &Q)> {
        self.coeffs.iter().map(|(m, c)| (*m, c))
    }

    pub fn scale(&self, s: &Q) -> Self {
        let mut out = Self::zero(self.dim, self.grade, self.variance);
        for (m, c) in &self.coeffs {
            out.add_term(*m, c * s);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.grade != other.grade {
            return Err(Error::GradeMismatch(self.grade, other.grade));
        }
        let mut out = self.clone();
        for (m, c) in &other.coeffs {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Q::one()))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        if self.variance != other.variance {
            return Err(Error::VarianceMismatch {
                expected: self.variance.name(),
            });
        }
        Ok(())
    }

    /// Exterior product; bilinear, associative and graded-anticommutative.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let grade = self.grade + other.grade;
        let mut out = Self::zero(self.dim, grade, self.variance);
        if grade > self.dim {
            return Ok(out);
        }
        for (&a, ca) in &self.coeffs {
            for (&b, cb) in &other.coeffs {
                if let Some(neg) = wedge_sign(a, b) {
                    let v = ca * cb;
                    out.add_term(a | b, if neg { -v } else { v });
                }
            }
        }
        Ok(out)
    }

    /// Duality pairing ⟨v, w⟩ of an m-vector with an m-covector in the orthonormal basis.
    pub fn pairing(&self, w: &Self) -> Result<Q> {
        if self.dim != w.dim {
            return Err(Error::DimensionMismatch(self.dim, w.dim));
        }
        if self.grade != w.grade {
            return Err(Error::GradeMismatch(self.grade, w.grade));
        }
        if self.variance != Variance::Vector {
            return Err(Error::VarianceMismatch { expected: "vector" });
        }
        if w.variance != Variance::Covector {
            return Err(Error::VarianceMismatch { expected: "covector" });
        }
        Ok(self
            .coeffs
            .iter()
            .filter_map(|(m, c)| w.coeffs.get(m).map(|d| c * d))
            .fold(Q::zero(), |acc, x| acc + x))
    }

    /// Canonical isomorphism Λ_m ↔ Λ^m: flips variance and keeps coefficients.
    pub fn musical_iso(&self) -> Self {
        Self {
            variance: self.variance.flip(),
            ..self.clone()
        }
    }

    /// Interior multiplication `v ⌞ ξ*`, defined by ⟨v ⌞ ξ*, z*⟩ = ⟨v, ξ* ∧ z*⟩.
    pub fn interior_mult(&self, xi: &Self) -> Result<Self> {
        if self.dim != xi.dim {
            return Err(Error::DimensionMismatch(self.dim, xi.dim));
        }
        if self.variance != Variance::Vector {
            return Err(Error::VarianceMismatch { expected: "vector" });
        }
        if xi.variance != Variance::Covector {
            return Err(Error::VarianceMismatch { expected: "covector" });
        }
        if xi.grade != 1 {
            return Err(Error::GradeMismatch(1, xi.grade));
        }
        if self.grade == 0 {
            return Err(Error::OutOfRange("interior product of a grade-0 vector".into()));
        }
        let mut out = Self::zero(self.dim, self.grade - 1, Variance::Vector);
        for (&s, cs) in &self.coeffs {
            for (&i, ci) in &xi.coeffs {
                if s & i == 0 {
                    continue;
                }
                // e_i ∧ e_{S\i} = (-1)^{#{j in S : j < i}} e_S
                let below = (s & (i - 1)).count_ones();
                let v = cs * ci;
                out.add_term(s & !i, if below % 2 == 1 { -v } else { v });
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> MultiVectorJson {
        MultiVectorJson {
            dim: self.dim,
            grade: self.grade,
            variance: self.variance,
            terms: self
                .coeffs
                .iter()
                .map(|(m, c)| TermJson {
                    idx: mask_to_indices(*m),
                    coef: format_q(c),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &MultiVectorJson) -> Result<Self> {
        let mut terms = Vec::with_capacity(j.terms.len());
        let mut seen = std::collections::BTreeSet::new();
        for (n, t) in j.terms.iter().enumerate() {
            let field = format!("terms[{n}].idx");
            if t.idx.len() != j.grade {
                return Err(parse_err(field, format!("expected {} indices", j.grade)));
            }
            if t.idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(parse_err(field, "indices must be strictly increasing"));
            }
            if t.idx.iter().any(|&i| i == 0 || i > j.dim) {
                return Err(parse_err(field, format!("indices must lie in 1..={}", j.dim)));
            }
            let mask = t.idx.iter().fold(0u64, |acc, i| acc | (1 << (i - 1)));
            if !seen.insert(mask) {
                return Err(parse_err(field, "duplicate basis element"));
            }
            let c = parse_q(&t.coef)
                .ok_or_else(|| parse_err(format!("terms[{n}].coef"), format!("bad rational {:?}", t.coef)))?;
            terms.push((mask, c));
        }
        Self::from_terms(j.dim, j.grade, j.variance, terms)
    }
}

impl fmt::Display for MultiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let star = if self.variance == Variance::Covector { "*" } else { "" };
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(m, c)| {
                let idx = mask_to_indices(*m);
                let blade = if idx.is_empty() {
                    "1".to_string()
                } else {
                    idx.iter()
                        .map(|i| format!("e{i}{star}"))
                        .collect::<Vec<_>>()
                        .join("∧")
                };
                format!("{}·{}", format_q(c), blade)
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub idx: Vec<usize>,
    pub coef: String,
}

/// Wire form: `{"dim", "grade", "variance", "terms": [{"idx": [...], "coef": "p/q"}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiVectorJson {
    pub dim: usize,
    pub grade: usize,
    pub variance: Variance,
    pub terms: Vec<TermJson>,
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

    #[test]
    fn wedge_basis_and_antisymmetry() {
        let e12 = cov(3, &[1]).wedge(&cov(3, &[2])).unwrap();
        assert_eq!(e12.coeff(0b011), q(1));
        assert_eq!(e12.terms().count(), 1);
        assert!(cov(3, &[1]).wedge(&cov(3, &[1])).unwrap().is_zero());
    }

    #[test]
    fn wedge_of_sums() {
        let a = MultiVector::from_vector(Variance::Covector, &[q(1), q(1)]);
        let b = MultiVector::from_vector(Variance::Covector, &[q(1), q(-1)]);
        let w = a.wedge(&b).unwrap();
        assert_eq!(w, cov(2, &[1, 2]).scale(&q(-2)));
    }

    #[test]
    fn wedge_beyond_top_grade_is_zero() {
        let w = cov(2, &[1, 2]).wedge(&cov(2, &[1])).unwrap();
        assert!(w.is_zero());
        assert_eq!(w.grade(), 3);
    }

    #[test]
    fn wedge_rejects_dimension_mismatch() {
        assert!(matches!(
            cov(2, &[1]).wedge(&cov(3, &[1])),
            Err(Error::DimensionMismatch(2, 3))
        ));
    }

    #[test]
    fn pairing_examples() {
        let v = vecb(4, &[1, 2]);
        assert_eq!(v.pairing(&cov(4, &[1, 2])).unwrap(), q(1));
        assert_eq!(v.pairing(&cov(4, &[1, 3])).unwrap(), q(0));
        let w = vecb(4, &[1, 2]).scale(&q(2)).add(&vecb(4, &[3, 4])).unwrap();
        assert_eq!(w.pairing(&cov(4, &[3, 4])).unwrap(), q(1));
        assert!(matches!(v.pairing(&cov(4, &[1])), Err(Error::GradeMismatch(2, 1))));
    }

    #[test]
    fn musical_iso_is_involutive() {
        let v = vecb(3, &[1, 2]);
        assert_eq!(v.musical_iso(), cov(3, &[1, 2]));
        assert_eq!(v.musical_iso().musical_iso(), v);
        let x = MultiVector::from_vector(Variance::Vector, &[q(2), q(3)]);
        assert_eq!(x.musical_iso(), MultiVector::from_vector(Variance::Covector, &[q(2), q(3)]));
    }

    #[test]
    fn interior_examples() {
        let v = vecb(3, &[1, 2]);
        assert_eq!(v.interior_mult(&cov(3, &[1])).unwrap(), vecb(3, &[2]));
        assert!(v.interior_mult(&cov(3, &[3])).unwrap().is_zero());
        assert!(vecb(3, &[]).interior_mult(&cov(3, &[1])).is_err());
    }

    #[test]
    fn interior_of_symplectic_form() {
        // (e1∧e2 + e3∧e4) ⌞ ξ = ξ1 e2 − ξ2 e1 + ξ3 e4 − ξ4 e3, checked against the defining identity
        let v = vecb(4, &[1, 2]).add(&vecb(4, &[3, 4])).unwrap();
        let xi_c = [q(2), q(3), q(5), q(7)];
        let xi = MultiVector::from_vector(Variance::Covector, &xi_c);
        let got = v.interior_mult(&xi).unwrap();
        let expected = MultiVector::from_vector(Variance::Vector, &[q(-3), q(2), q(-7), q(5)]);
        assert_eq!(got, expected);
        for i in 1..=4 {
            let z = cov(4, &[i]);
            let lhs = got.pairing(&z).unwrap();
            let rhs = v.pairing(&xi.wedge(&z).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let v = vecb(4, &[1, 2]).scale(&crate::rational::q_frac(-2, 4));
        let j = v.to_json();
        assert_eq!(j.terms[0].coef, "-1/2");
        assert_eq!(MultiVector::from_json(&j).unwrap(), v);
        let bad = MultiVectorJson {
            dim: 3,
            grade: 2,
            variance: Variance::Vector,
            terms: vec![TermJson {
                idx: vec![2, 1],
                coef: "1".into(),
            }],
        };
        assert!(MultiVector::from_json(&bad).is_err());
    }

    #[test]
    fn basis_enumeration() {
        assert_eq!(basis_masks(4, 2).len(), 6);
        assert_eq!(basis_masks(4, 2)[0], 0b0011);
        assert_eq!(basis_masks(4, 2)[1], 0b0101);
        assert_eq!(basis_masks(3, 0), vec![0]);
        assert_eq!(binomial(5, 2), 10);
    }
}
