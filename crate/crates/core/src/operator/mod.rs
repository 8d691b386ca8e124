//! First-order constant-coefficient operators `P(D)μ = Σᵢ Pᵢ ∂ᵢμ + P₀μ` with `Pᵢ: E → F`.

mod ell;
mod gallery;
mod oracle;
mod symbol;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{parse_err, Error, Result};
use crate::linalg::QMatrix;
use crate::rational::{q, q_vec_from_json, q_vec_to_json, Q};

pub use ell::{ell, CertMode, EllCertificate, EllConfig, SearchLog};
pub use gallery::{make_boundary, make_curl, make_div, make_ext_derivative};
pub use oracle::ell_bruteforce_oracle;
pub use symbol::{SymbolMatrix, WaveConeReport};

/// Algebraic layout of `E` for operators from the gallery. User operators carry `None`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Structure {
    /// `E = ℝ^m ⊗ ℝ^d`, entries `(k, j)` at `k*d + j`.
    Curl { d: usize, m: usize },
    /// `E = ℝ^k ⊗ ℝ^d`, entries `(j, i)` at `j*d + i`.
    Div { k: usize, d: usize },
    /// `E = Λ^m ℝ^d` in lexicographic basis order.
    ExtDerivative { d: usize, m: usize },
    /// `E = Λ_m ℝ^d` in lexicographic basis order.
    Boundary { d: usize, m: usize },
}

impl Structure {
    /// The closed-form value of ℓ for the gallery family.
    pub fn analytic_ell(&self) -> usize {
        match *self {
            Structure::Curl { d, .. } => d - 1,
            Structure::Div { .. } => 1,
            Structure::ExtDerivative { d, m } => d - m,
            Structure::Boundary { m, .. } => m,
        }
    }

    /// `(rows, cols)` when `E` is a matrix space.
    pub fn tensor_shape(&self) -> Option<(usize, usize)> {
        match *self {
            Structure::Curl { d, m } => Some((m, d)),
            Structure::Div { k, d } => Some((k, d)),
            _ => None,
        }
    }

    /// `(d, m)` when `E` is an exterior power.
    pub fn exterior_shape(&self) -> Option<(usize, usize)> {
        match *self {
            Structure::ExtDerivative { d, m } | Structure::Boundary { d, m } => Some((d, m)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstOrderOperator {
    d: usize,
    dim_e: usize,
    dim_f: usize,
    p0: QMatrix,
    p: Vec<QMatrix>,
    label: String,
    structure: Option<Structure>,
}

impl FirstOrderOperator {
    pub fn new(label: impl Into<String>, p0: QMatrix, p: Vec<QMatrix>) -> Result<Self> {
        let d = p.len();
        if d == 0 {
            return Err(Error::Shape("operator needs at least one derivative direction".into()));
        }
        let (dim_f, dim_e) = (p0.rows(), p0.cols());
        if dim_e == 0 || dim_f == 0 {
            return Err(Error::Shape("dimE and dimF must be at least 1".into()));
        }
        for (i, m) in p.iter().enumerate() {
            if (m.rows(), m.cols()) != (dim_f, dim_e) {
                return Err(Error::Shape(format!(
                    "P[{i}] is {}x{}, expected {dim_f}x{dim_e}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        if p.iter().all(QMatrix::is_zero) {
            return Err(Error::PrincipalPartVanishes);
        }
        Ok(Self {
            d,
            dim_e,
            dim_f,
            p0,
            p,
            label: label.into(),
            structure: None,
        })
    }

    pub fn with_structure(mut self, s: Structure) -> Self {
        self.structure = Some(s);
        self
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dim_e(&self) -> usize {
        self.dim_e
    }

    pub fn dim_f(&self) -> usize {
        self.dim_f
    }

    pub fn p0(&self) -> &QMatrix {
        &self.p0
    }

    pub fn p(&self, i: usize) -> &QMatrix {
        &self.p[i]
    }

    pub fn principal(&self) -> &[QMatrix] {
        &self.p
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn structure(&self) -> Option<Structure> {
        self.structure
    }

    pub fn has_zero_order_term(&self) -> bool {
        !self.p0.is_zero()
    }

    /// Operator on `E × F` for the inhomogeneous equation `P(D)μ = τ`:
    /// `P̃ᵢ = [Pᵢ | 0]`, `P̃₀ = [P₀ | −Id_F]`.
    pub fn lift_inhomogeneous(&self) -> Self {
        let (f, e) = (self.dim_f, self.dim_e);
        let widen = |m: &QMatrix, tail: Option<Q>| {
            let mut out = QMatrix::zeros(f, e + f);
            for r in 0..f {
                for c in 0..e {
                    out[(r, c)] = m[(r, c)].clone();
                }
                if let Some(t) = &tail {
                    out[(r, e + r)] = t.clone();
                }
            }
            out
        };
        Self {
            d: self.d,
            dim_e: e + f,
            dim_f: f,
            p0: widen(&self.p0, Some(q(-1))),
            p: self.p.iter().map(|m| widen(m, None)).collect(),
            label: format!("lift({})", self.label),
            structure: None,
        }
    }

    pub fn to_json(&self) -> Value {
        let mat = |m: &QMatrix| Value::Array(m.row_vecs().iter().map(|r| q_vec_to_json(r)).collect());
        let mut v = json!({
            "d": self.d,
            "dimE": self.dim_e,
            "dimF": self.dim_f,
            "label": self.label,
            "P0": mat(&self.p0),
            "P": self.p.iter().map(mat).collect::<Vec<_>>(),
        });
        if let Some(s) = self.structure {
            v["structure"] = serde_json::to_value(s).expect("structure serializes");
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let int = |key: &str| -> Result<usize> {
            v.get(key)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| parse_err(key, "missing or not a nonnegative integer"))
        };
        let d = int("d")?;
        let dim_e = int("dimE")?;
        let dim_f = int("dimF")?;
        let label = v
            .get("label")
            .and_then(Value::as_str)
            .unwrap_or("")
            .to_string();
        let parse_mat = |val: &Value, field: &str| -> Result<QMatrix> {
            let rows = val
                .as_array()
                .ok_or_else(|| parse_err(field, "expected an array of rows"))?;
            if rows.len() != dim_f {
                return Err(parse_err(field, format!("expected {dim_f} rows, got {}", rows.len())));
            }
            let rows = rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let row = q_vec_from_json(r, &format!("{field}[{i}]"))?;
                    if row.len() != dim_e {
                        return Err(parse_err(
                            format!("{field}[{i}]"),
                            format!("expected {dim_e} entries, got {}", row.len()),
                        ));
                    }
                    Ok(row)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(QMatrix::from_rows(dim_e, &rows))
        };
        let p0 = match v.get("P0") {
            Some(x) => parse_mat(x, "P0")?,
            None => QMatrix::zeros(dim_f, dim_e),
        };
        let ps = v
            .get("P")
            .and_then(Value::as_array)
            .ok_or_else(|| parse_err("P", "missing or not an array of matrices"))?;
        if ps.len() != d {
            return Err(parse_err("P", format!("expected {d} matrices, got {}", ps.len())));
        }
        let p = ps
            .iter()
            .enumerate()
            .map(|(i, m)| parse_mat(m, &format!("P[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let mut op = Self::new(label, p0, p)?;
        if let Some(s) = v.get("structure") {
            let s: Structure = serde_json::from_value(s.clone())
                .map_err(|e| parse_err("structure", e.to_string()))?;
            op = op.with_structure(s);
        }
        Ok(op)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_vanishing_principal_part() {
        let z = QMatrix::zeros(1, 2);
        let err = FirstOrderOperator::new("zero", z.clone(), vec![z.clone(), z]).unwrap_err();
        assert!(matches!(err, Error::PrincipalPartVanishes));
    }

    #[test]
    fn rejects_shape_mismatch() {
        let a = QMatrix::identity(2);
        let b = QMatrix::zeros(1, 2);
        assert!(matches!(
            FirstOrderOperator::new("bad", a.clone(), vec![a, b]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let op = make_curl(3, 2).unwrap();
        let back = FirstOrderOperator::from_json(&op.to_json()).unwrap();
        assert_eq!(back, op);
    }

    #[test]
    fn json_errors_name_the_field() {
        let mut v = make_div(2, 2).unwrap().to_json();
        v["P"][1][0] = json!(["1", "x", "0", "0"]);
        let err = FirstOrderOperator::from_json(&v).unwrap_err().to_string();
        assert!(err.contains("P[1][0][1]"), "{err}");
        let mut v = make_div(2, 2).unwrap().to_json();
        v.as_object_mut().unwrap().remove("dimE");
        assert!(FirstOrderOperator::from_json(&v).unwrap_err().to_string().contains("dimE"));
    }

    #[test]
    fn lift_shapes_and_symbol() {
        let op = make_div(1, 3).unwrap();
        let lift = op.lift_inhomogeneous();
        assert_eq!(lift.dim_e(), op.dim_e() + op.dim_f());
        assert_eq!(lift.dim_f(), op.dim_f());
        let xi = vec![q(2), q(-1), q(3)];
        let e = vec![q(1), q(4), q(-2)];
        let mut ef = e.clone();
        ef.push(q(7));
        assert_eq!(
            lift.principal_symbol(&xi).unwrap().mul_vec(&ef),
            op.principal_symbol(&xi).unwrap().mul_vec(&e)
        );
    }
}
