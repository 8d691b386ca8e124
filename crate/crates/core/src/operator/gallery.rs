//! Curl, divergence, exterior derivative and boundary as explicit coefficient matrices.

use super::{FirstOrderOperator, Structure};
use crate::error::{Error, Result};
use crate::exterior::{basis_masks, wedge_sign};
use crate::linalg::QMatrix;
use crate::rational::q;

/// `curl μ = (∂ᵢμ_kj − ∂ⱼμ_ki)` for `μ ∈ ℝ^m ⊗ ℝ^d`, one equation per `k` and `i < j`.
pub fn make_curl(d: usize, m: usize) -> Result<FirstOrderOperator> {
    if d < 2 || m < 1 {
        return Err(Error::OutOfRange(format!("curl needs d ≥ 2 and m ≥ 1, got d={d}, m={m}")));
    }
    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
        .collect();
    let (dim_e, dim_f) = (m * d, m * pairs.len());
    let mut p = vec![QMatrix::zeros(dim_f, dim_e); d];
    for k in 0..m {
        for (n, &(i, j)) in pairs.iter().enumerate() {
            let row = k * pairs.len() + n;
            p[i][(row, k * d + j)] = q(1);
            p[j][(row, k * d + i)] = q(-1);
        }
    }
    Ok(FirstOrderOperator::new(format!("curl(d={d},m={m})"), QMatrix::zeros(dim_f, dim_e), p)?
        .with_structure(Structure::Curl { d, m }))
}

/// `(Div μ)_j = Σᵢ ∂ᵢ μ_ji` for `μ ∈ ℝ^k ⊗ ℝ^d`.
pub fn make_div(k: usize, d: usize) -> Result<FirstOrderOperator> {
    if k < 1 || d < 1 {
        return Err(Error::OutOfRange(format!("div needs k ≥ 1 and d ≥ 1, got k={k}, d={d}")));
    }
    let mut p = vec![QMatrix::zeros(k, k * d); d];
    for (i, pi) in p.iter_mut().enumerate() {
        for j in 0..k {
            pi[(j, j * d + i)] = q(1);
        }
    }
    Ok(FirstOrderOperator::new(format!("div(k={k},d={d})"), QMatrix::zeros(k, k * d), p)?
        .with_structure(Structure::Div { k, d }))
}

/// Exterior derivative on m-forms: symbol `ξ ↦ ξ* ∧ v*`, from Λ^m to Λ^{m+1}.
pub fn make_ext_derivative(d: usize, m: usize) -> Result<FirstOrderOperator> {
    if d < 1 || m >= d {
        return Err(Error::OutOfRange(format!(
            "exterior derivative needs 0 ≤ m ≤ d − 1, got d={d}, m={m}"
        )));
    }
    let cols = basis_masks(d, m);
    let rows = basis_masks(d, m + 1);
    let mut p = vec![QMatrix::zeros(rows.len(), cols.len()); d];
    for (i, pi) in p.iter_mut().enumerate() {
        for (c, &s) in cols.iter().enumerate() {
            if let Some(neg) = wedge_sign(1 << i, s) {
                let r = rows.iter().position(|&x| x == s | (1 << i)).expect("basis row");
                pi[(r, c)] = q(if neg { -1 } else { 1 });
            }
        }
    }
    Ok(FirstOrderOperator::new(
        format!("ext_derivative(d={d},m={m})"),
        QMatrix::zeros(rows.len(), cols.len()),
        p,
    )?
    .with_structure(Structure::ExtDerivative { d, m }))
}

/// Boundary on m-currents: symbol `ξ ↦ v ⌞ ξ*`, from Λ_m to Λ_{m−1}.
pub fn make_boundary(d: usize, m: usize) -> Result<FirstOrderOperator> {
    if m < 1 || m > d {
        return Err(Error::OutOfRange(format!("boundary needs 1 ≤ m ≤ d, got d={d}, m={m}")));
    }
    let cols = basis_masks(d, m);
    let rows = basis_masks(d, m - 1);
    let mut p = vec![QMatrix::zeros(rows.len(), cols.len()); d];
    for (i, pi) in p.iter_mut().enumerate() {
        let bit = 1u64 << i;
        for (c, &s) in cols.iter().enumerate() {
            if s & bit == 0 {
                continue;
            }
            let below = (s & (bit - 1)).count_ones();
            let r = rows.iter().position(|&x| x == s & !bit).expect("basis row");
            pi[(r, c)] = q(if below % 2 == 1 { -1 } else { 1 });
        }
    }
    Ok(FirstOrderOperator::new(
        format!("boundary(d={d},m={m})"),
        QMatrix::zeros(rows.len(), cols.len()),
        p,
    )?
    .with_structure(Structure::Boundary { d, m }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{MultiVector, Variance};
    use crate::rational::Q;

    #[test]
    fn planar_curl_is_single_equation() {
        let op = make_curl(2, 1).unwrap();
        assert_eq!((op.dim_f(), op.dim_e()), (1, 2));
        // ∂₁μ₂ − ∂₂μ₁
        assert_eq!(op.p(0).row(0), &[q(0), q(1)][..]);
        assert_eq!(op.p(1).row(0), &[q(-1), q(0)][..]);
    }

    #[test]
    fn div_has_k_equations() {
        let op = make_div(2, 2).unwrap();
        assert_eq!((op.dim_f(), op.dim_e()), (2, 4));
        // row j: Σᵢ ∂ᵢ μ_{ji}
        assert_eq!(op.p(0).row(1), &[q(0), q(0), q(1), q(0)][..]);
        assert_eq!(op.p(1).row(1), &[q(0), q(0), q(0), q(1)][..]);
    }

    #[test]
    fn ext_derivative_symbol_is_wedge() {
        for d in 1..=4 {
            for m in 0..d {
                let op = make_ext_derivative(d, m).unwrap();
                for (c, &s) in basis_masks(d, m).iter().enumerate() {
                    let v = MultiVector::from_terms(d, m, Variance::Covector, [(s, q(1))]).unwrap();
                    for i in 0..d {
                        let xi = MultiVector::blade(d, Variance::Covector, &[i + 1]).unwrap();
                        let w = xi.wedge(&v).unwrap();
                        let col: Vec<Q> = op.p(i).column(c);
                        assert_eq!(col, w.to_dense());
                    }
                }
            }
        }
    }

    #[test]
    fn boundary_symbol_is_interior_product() {
        for d in 1..=4 {
            for m in 1..=d {
                let op = make_boundary(d, m).unwrap();
                for (c, &s) in basis_masks(d, m).iter().enumerate() {
                    let v = MultiVector::from_terms(d, m, Variance::Vector, [(s, q(1))]).unwrap();
                    for i in 0..d {
                        let xi = MultiVector::blade(d, Variance::Covector, &[i + 1]).unwrap();
                        let w = v.interior_mult(&xi).unwrap();
                        assert_eq!(op.p(i).column(c), w.to_dense());
                    }
                }
            }
        }
    }

    #[test]
    fn range_guards() {
        assert!(make_curl(1, 1).is_err());
        assert!(make_div(0, 2).is_err());
        assert!(make_ext_derivative(3, 3).is_err());
        assert!(make_boundary(3, 0).is_err());
        assert!(make_boundary(3, 4).is_err());
    }
}
