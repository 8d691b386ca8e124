use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{parse_err, Error, Result};
use crate::linalg::QMatrix;
use crate::rational::{primitive_integer, q_vec_from_json, q_vec_to_json, to_f64, Q};

/// A linear subspace of ℝ^d held by its reduced row-echelon basis, so equal subspaces
/// compare equal structurally.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<Q>>,
}

impl Subspace {
    pub fn zero(d: usize) -> Self {
        Self {
            ambient_dim: d,
            basis: Vec::new(),
        }
    }

    pub fn full(d: usize) -> Self {
        Self::span(d, &QMatrix::identity(d).row_vecs())
    }

    pub fn span(d: usize, vectors: &[Vec<Q>]) -> Self {
        if vectors.is_empty() {
            return Self::zero(d);
        }
        let basis = QMatrix::from_rows(d, vectors).row_space();
        Self {
            ambient_dim: d,
            basis,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        &self.basis
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        assert_eq!(v.len(), self.ambient_dim);
        if v.iter().all(Zero::is_zero) {
            return true;
        }
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        QMatrix::from_rows(self.ambient_dim, &rows).rank() == self.dim()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn orthogonal_complement(&self) -> Self {
        if self.basis.is_empty() {
            return Self::full(self.ambient_dim);
        }
        let ns = QMatrix::from_rows(self.ambient_dim, &self.basis).null_space();
        Self::span(self.ambient_dim, &ns)
    }

    pub fn sum(&self, other: &Subspace) -> Self {
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Self::span(self.ambient_dim, &rows)
    }

    /// Primitive integer vectors spanning the subspace (one per echelon row).
    pub fn integer_basis(&self) -> Vec<Vec<BigInt>> {
        self.basis.iter().map(|r| primitive_integer(r)).collect()
    }

    pub fn integer_basis_i64(&self) -> Option<Vec<Vec<i64>>> {
        self.integer_basis()
            .into_iter()
            .map(|r| r.iter().map(|x| x.to_i64()).collect::<Option<Vec<_>>>())
            .collect()
    }

    /// Orthonormal basis in binary64 via modified Gram–Schmidt on the exact basis.
    pub fn orthonormal_f64(&self) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        for row in &self.basis {
            let mut v: Vec<f64> = row.iter().map(to_f64).collect();
            for u in &out {
                let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= dot * y;
                }
            }
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            out.push(v.into_iter().map(|x| x / n).collect());
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ambient_dim": self.ambient_dim,
            "dim": self.dim(),
            "basis": self.basis.iter().map(|r| q_vec_to_json(r)).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let d = v
            .get("ambient_dim")
            .and_then(Value::as_u64)
            .ok_or_else(|| parse_err("ambient_dim", "missing or not an integer"))? as usize;
        let rows = v
            .get("basis")
            .and_then(Value::as_array)
            .ok_or_else(|| parse_err("basis", "missing or not an array"))?;
        let rows = rows
            .iter()
            .enumerate()
            .map(|(i, r)| q_vec_from_json(r, &format!("basis[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Shape("basis row length differs from ambient_dim".into()));
        }
        Ok(Self::span(d, &rows))
    }
}
