//! Exact rational scalars and their canonical string form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{parse_err, Result};

/// Exact scalar used by all algebraic code.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical `p/q` form: gcd-reduced, positive denominator, integers written without `/1`.
pub fn format_q(x: &Q) -> String {
    x.to_string()
}

pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Q::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().ok()?;
            Some(Q::from_integer(n))
        }
    }
}

/// Accepts `"p/q"` strings and JSON integers.
pub fn q_from_json(v: &Value, field: &str) -> Result<Q> {
    match v {
        Value::String(s) => parse_q(s).ok_or_else(|| parse_err(field, format!("bad rational {s:?}"))),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(q(i))
            } else {
                Err(parse_err(field, format!("non-integer JSON number {n}; use a \"p/q\" string")))
            }
        }
        other => Err(parse_err(field, format!("expected rational, got {other}"))),
    }
}

pub fn q_vec_from_json(v: &Value, field: &str) -> Result<Vec<Q>> {
    let arr = v
        .as_array()
        .ok_or_else(|| parse_err(field, "expected an array"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| q_from_json(x, &format!("{field}[{i}]")))
        .collect()
}

pub fn q_vec_to_json(v: &[Q]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(format_q(x))).collect())
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Best rational approximation with denominator at most `max_den`, via continued fractions.
pub fn rationalize(x: f64, max_den: u64) -> Q {
    if !x.is_finite() {
        return Q::zero();
    }
    let neg = x < 0.0;
    let mut r = x.abs();
    // convergents h/k
    let (mut h0, mut h1) = (0u128, 1u128);
    let (mut k0, mut k1) = (1u128, 0u128);
    let max_den = max_den as u128;
    for _ in 0..64 {
        let a = r.floor();
        if a > 1e18 {
            break;
        }
        let a = a as u128;
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > max_den {
            // semiconvergent check
            let t = (max_den - k0) / k1.max(1);
            let hs = t * h1 + h0;
            let ks = t * k1 + k0;
            if ks > 0 && t > 0 {
                let cand = hs as f64 / ks as f64;
                let conv = h1 as f64 / k1.max(1) as f64;
                if (cand - x.abs()).abs() < (conv - x.abs()).abs() {
                    h1 = hs;
                    k1 = ks;
                }
            }
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = r - a as f64;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    if k1 == 0 {
        return Q::zero();
    }
    let v = Q::new(BigInt::from(h1), BigInt::from(k1));
    if neg {
        -v
    } else {
        v
    }
}

/// Scales a rational vector to a primitive integer vector (same direction).
pub fn primitive_integer(v: &[Q]) -> Vec<BigInt> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn norm_f64(v: &[Q]) -> f64 {
    v.iter().map(|x| to_f64(x).powi(2)).sum::<f64>().sqrt()
}

pub fn abs_max(v: &[Q]) -> Q {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(Q::zero)
}
