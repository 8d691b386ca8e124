use num_traits::Zero;
use serde_json::{json, Value};

use super::FirstOrderOperator;
use crate::error::{Error, Result};
use crate::exterior::Subspace;
use crate::linalg::QMatrix;
use crate::rational::{is_zero_vec, q_vec_to_json, Q};

/// `M(e)`, the dimF × d matrix with columns `Pᵢ e`, so that `ℙ(ξ)[e] = M(e) ξ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolMatrix {
    pub e: Vec<Q>,
    pub m: QMatrix,
}

impl SymbolMatrix {
    pub fn rank(&self) -> usize {
        self.m.rank()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WaveConeReport {
    pub e: Vec<Q>,
    pub member: bool,
    pub kernel_direction: Option<Vec<Q>>,
}

impl WaveConeReport {
    pub fn to_json(&self) -> Value {
        json!({
            "e": q_vec_to_json(&self.e),
            "member": self.member,
            "kernel_direction": self.kernel_direction.as_deref().map(q_vec_to_json),
        })
    }
}

impl FirstOrderOperator {
    /// `ℙ(ξ) = Σ ξᵢ Pᵢ`; the zero-order term plays no role.
    pub fn principal_symbol(&self, xi: &[Q]) -> Result<QMatrix> {
        if xi.len() != self.d {
            return Err(Error::DimensionMismatch(xi.len(), self.d));
        }
        let mut out = QMatrix::zeros(self.dim_f, self.dim_e);
        for (x, p) in xi.iter().zip(&self.p) {
            if x.is_zero() {
                continue;
            }
            out = out.add(&p.scale(x));
        }
        Ok(out)
    }

    pub fn symbol_matrix(&self, e: &[Q]) -> Result<SymbolMatrix> {
        self.check_e(e)?;
        Ok(SymbolMatrix {
            e: e.to_vec(),
            m: self.symbol_matrix_unchecked(e),
        })
    }

    pub(crate) fn symbol_matrix_unchecked(&self, e: &[Q]) -> QMatrix {
        let mut m = QMatrix::zeros(self.dim_f, self.d);
        for (i, p) in self.p.iter().enumerate() {
            for (r, v) in p.mul_vec(e).into_iter().enumerate() {
                m[(r, i)] = v;
            }
        }
        m
    }

    fn check_e(&self, e: &[Q]) -> Result<()> {
        if e.len() != self.dim_e {
            return Err(Error::DimensionMismatch(e.len(), self.dim_e));
        }
        if is_zero_vec(e) {
            return Err(Error::ZeroInput("polar vector e must be nonzero"));
        }
        Ok(())
    }

    /// `{ξ : ℙ(ξ)[e] = 0}`, the null space of `M(e)`.
    pub fn kernel_directions(&self, e: &[Q]) -> Result<Subspace> {
        let s = self.symbol_matrix(e)?;
        Ok(Subspace::span(self.d, &s.m.null_space()))
    }

    /// `{ℙ[e] ≡ 0}^⊥`, the row space of `M(e)`.
    pub fn invariance_space(&self, e: &[Q]) -> Result<Subspace> {
        let s = self.symbol_matrix(e)?;
        Ok(Subspace::span(self.d, &s.m.row_space()))
    }

    pub fn wave_cone_member(&self, e: &[Q]) -> Result<WaveConeReport> {
        let s = self.symbol_matrix(e)?;
        let ns = s.m.null_space();
        let kernel_direction = ns.into_iter().next();
        Ok(WaveConeReport {
            e: e.to_vec(),
            member: kernel_direction.is_some(),
            kernel_direction,
        })
    }
}
