//! Certified minimal-rank search for ℓ = min_{e ≠ 0} rank M(e).
//!
//! Three stages feed one running minimum; every accepted witness is re-checked with exact
//! rational rank:
//! 1. structured candidates (coordinate vectors, rank-one tensors, simple multivectors, random
//!    vectors);
//! 2. the projective integer lattice `{−H..H}^{dimE}`, screened by rank over GF(2^61 − 1)
//!    (which never exceeds the rational rank) and verified exactly on improvement;
//! 3. Nelder–Mead restarts minimizing the (r+1)-th singular value of `M(e/|e|)`, rationalized
//!    by continued fractions.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{FirstOrderOperator, Structure};
use crate::error::{parse_err, Error, Result};
use crate::exterior::{basis_masks, MultiVector, Subspace, Variance};
use crate::linalg::{add_mod, mul_mod, rank_mod_p, sub_mod, to_mod, MOD_P};
use crate::par;
use crate::rational::{primitive_integer, q, q_vec_from_json, q_vec_to_json, rationalize, to_f64, Q};

/// Largest lattice the search (and the brute-force oracle) will enumerate.
pub const LATTICE_LIMIT: u64 = 10_000_000;

const DESCENT_TOL: f64 = 1e-10;
const RATIONALIZE_DEN: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EllConfig {
    pub height: u32,
    pub samples: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for EllConfig {
    fn default() -> Self {
        Self {
            height: 2,
            samples: 200,
            restarts: 8,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertMode {
    CertifiedUpperBound,
    LatticeExhausted,
    Analytic,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLog {
    pub seed: u64,
    pub lattice_height: u32,
    pub lattice_size: Option<u64>,
    pub lattice_exhausted: bool,
    pub lattice_points_examined: u64,
    pub structured_candidates: usize,
    pub random_samples: usize,
    pub descent_restarts: usize,
    pub descent_hits: usize,
    pub witness_stage: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllCertificate {
    pub value: usize,
    pub witness: Vec<Q>,
    pub invariance_space: Subspace,
    pub mode: CertMode,
    pub search_log: SearchLog,
}

impl EllCertificate {
    /// Re-checks the exact invariants against `op`.
    pub fn verify(&self, op: &FirstOrderOperator) -> Result<()> {
        let m = op.symbol_matrix(&self.witness)?;
        let rank = m.rank();
        if rank != self.value {
            return Err(Error::Degenerate(format!(
                "certificate claims ℓ = {} but rank M(witness) = {rank}",
                self.value
            )));
        }
        if op.invariance_space(&self.witness)? != self.invariance_space {
            return Err(Error::Degenerate(
                "certificate invariance space is not the row space of M(witness)".into(),
            ));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "value": self.value,
            "witness": q_vec_to_json(&self.witness),
            "invariance_space": self.invariance_space.to_json(),
            "mode": self.mode,
            "search_log": self.search_log,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let value = v
            .get("value")
            .and_then(Value::as_u64)
            .ok_or_else(|| parse_err("value", "missing or not an integer"))? as usize;
        let witness = q_vec_from_json(
            v.get("witness").ok_or_else(|| parse_err("witness", "missing"))?,
            "witness",
        )?;
        let invariance_space = Subspace::from_json(
            v.get("invariance_space")
                .ok_or_else(|| parse_err("invariance_space", "missing"))?,
        )?;
        let mode = serde_json::from_value(v.get("mode").cloned().unwrap_or(Value::Null))
            .map_err(|e| parse_err("mode", e.to_string()))?;
        let search_log = match v.get("search_log") {
            Some(s) => serde_json::from_value(s.clone()).map_err(|e| parse_err("search_log", e.to_string()))?,
            None => SearchLog::default(),
        };
        Ok(Self {
            value,
            witness,
            invariance_space,
            mode,
            search_log,
        })
    }
}

/// Ordering key for witnesses: smaller height, then fewer nonzeros, then lexicographic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct WitnessKey {
    height: BigInt,
    nnz: usize,
    lex: Vec<BigInt>,
}

/// Primitive integer representative with positive leading entry.
fn canonical(e: &[Q]) -> Vec<BigInt> {
    let mut v = primitive_integer(e);
    if let Some(first) = v.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            v.iter_mut().for_each(|x| *x = -x.clone());
        }
    }
    v
}

fn key_of(v: &[BigInt]) -> WitnessKey {
    WitnessKey {
        height: v.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero),
        nnz: v.iter().filter(|x| !x.is_zero()).count(),
        lex: v.to_vec(),
    }
}

#[derive(Clone, Debug)]
struct Best {
    rank: usize,
    key: WitnessKey,
    witness: Vec<BigInt>,
    stage: &'static str,
}

impl Best {
    fn better_than(&self, other: &Best) -> bool {
        (self.rank, &self.key).cmp(&(other.rank, &other.key)) == Ordering::Less
    }
}

fn offer(best: &mut Option<Best>, cand: Best) {
    match best {
        Some(b) if !cand.better_than(b) => {}
        _ => *best = Some(cand),
    }
}

fn exact_candidate(op: &FirstOrderOperator, e: &[Q], stage: &'static str) -> Option<Best> {
    if e.iter().all(Zero::is_zero) {
        return None;
    }
    let w = canonical(e);
    let wq: Vec<Q> = w.iter().cloned().map(Q::from_integer).collect();
    Some(Best {
        rank: op.symbol_matrix_unchecked(&wq).rank(),
        key: key_of(&w),
        witness: w,
        stage,
    })
}

/// Computes ℓ with an exact witness and a record of how far the search got.
pub fn ell(op: &FirstOrderOperator, cfg: &EllConfig) -> EllCertificate {
    let n = op.dim_e();
    let mut log = SearchLog {
        seed: cfg.seed,
        lattice_height: cfg.height,
        ..SearchLog::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // stage 1
    let cands = structured_candidates(op, cfg.samples, &mut rng);
    log.structured_candidates = cands.len() - cands.iter().filter(|c| c.1).count();
    log.random_samples = cands.iter().filter(|c| c.1).count();
    let mut best: Option<Best> = None;
    for (e, _) in &cands {
        if let Some(c) = exact_candidate(op, e, "structured") {
            offer(&mut best, c);
        }
    }

    // A structured operator whose known ℓ is already attained needs no further search.
    let settled = match (op.structure(), &best) {
        (Some(s), Some(b)) => b.rank == s.analytic_ell(),
        _ => false,
    };

    // stage 2
    let size = lattice_size(n, cfg.height);
    log.lattice_size = size;
    if !settled && size.is_some_and(|s| s <= LATTICE_LIMIT) && cfg.height > 0 {
        let (found, examined) = lattice_search(op, cfg.height, best.as_ref());
        log.lattice_points_examined = examined;
        log.lattice_exhausted = true;
        if let Some(f) = found {
            offer(&mut best, f);
        }
    }

    // stage 3
    let mut current = best.expect("coordinate candidates are never all zero");
    log.descent_restarts = if settled { 0 } else { cfg.restarts };
    if !settled && cfg.restarts > 0 && current.rank > 0 {
        let sym = FloatSymbol::new(op);
        loop {
            if current.rank == 0 {
                break;
            }
            let target = current.rank - 1;
            let hits: Vec<Option<Best>> = par::map_range(cfg.restarts, |k| {
                let mut r = ChaCha8Rng::seed_from_u64(cfg.seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(k as u64 + 1)) ^ target as u64);
                descend(op, &sym, target, &mut r)
            });
            let mut improved = None;
            for h in hits.into_iter().flatten() {
                log.descent_hits += 1;
                offer(&mut improved, h);
            }
            match improved {
                Some(h) if h.rank < current.rank => current = h,
                _ => break,
            }
        }
    }

    let witness: Vec<Q> = current.witness.iter().cloned().map(Q::from_integer).collect();
    let invariance_space = op
        .invariance_space(&witness)
        .expect("witness is nonzero and has dimE entries");
    debug_assert_eq!(invariance_space.dim(), current.rank);
    log.witness_stage = current.stage.to_string();
    let mode = match op.structure() {
        Some(s) if s.analytic_ell() == current.rank => CertMode::Analytic,
        _ if log.lattice_exhausted => CertMode::LatticeExhausted,
        _ => CertMode::CertifiedUpperBound,
    };
    EllCertificate {
        value: current.rank,
        witness,
        invariance_space,
        mode,
        search_log: log,
    }
}

pub(crate) fn lattice_size(n: usize, height: u32) -> Option<u64> {
    (2 * height as u64 + 1).checked_pow(n as u32)
}

fn random_int_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Q> {
    loop {
        let v: Vec<Q> = (0..n).map(|_| q(rng.gen_range(-3..=3))).collect();
        if v.iter().any(|x| !x.is_zero()) {
            return v;
        }
    }
}

fn unit(n: usize, i: usize) -> Vec<Q> {
    (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()
}

/// `(candidate, is_random)` pairs.
fn structured_candidates(op: &FirstOrderOperator, samples: usize, rng: &mut ChaCha8Rng) -> Vec<(Vec<Q>, bool)> {
    let n = op.dim_e();
    let mut out: Vec<(Vec<Q>, bool)> = (0..n).map(|i| (unit(n, i), false)).collect();
    match op.structure() {
        Some(s) if s.tensor_shape().is_some() => {
            let (r, c) = s.tensor_shape().unwrap();
            let outer = |a: &[Q], b: &[Q]| -> Vec<Q> {
                a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
            };
            let rows: Vec<Vec<Q>> = (0..r).map(|i| unit(r, i)).collect();
            let cols: Vec<Vec<Q>> = (0..c).map(|i| unit(c, i)).collect();
            let rrand: Vec<Vec<Q>> = (0..r.min(4)).map(|_| random_int_vec(rng, r)).collect();
            let crand: Vec<Vec<Q>> = (0..c.min(4)).map(|_| random_int_vec(rng, c)).collect();
            for a in rows.iter().chain(&rrand) {
                for b in cols.iter().chain(&crand) {
                    out.push((outer(a, b), false));
                }
            }
            for _ in 0..samples {
                let a = random_int_vec(rng, r);
                let b = random_int_vec(rng, c);
                out.push((outer(&a, &b), true));
            }
        }
        Some(s) if s.exterior_shape().is_some() => {
            let (d, m) = s.exterior_shape().unwrap();
            let variance = match s {
                Structure::ExtDerivative { .. } => Variance::Covector,
                _ => Variance::Vector,
            };
            for _ in 0..samples {
                let mut w = MultiVector::scalar(d, variance, Q::one());
                for _ in 0..m {
                    w = w
                        .wedge(&MultiVector::from_vector(variance, &random_int_vec(rng, d)))
                        .expect("same ambient space");
                }
                if !w.is_zero() {
                    out.push((w.to_dense(), true));
                }
            }
            debug_assert_eq!(basis_masks(d, m).len(), n);
        }
        _ => {
            for _ in 0..samples {
                out.push((random_int_vec(rng, n), true));
            }
        }
    }
    out
}

/// Integer symbol blocks: `blocks[j]` is `L · M(e_j)` flattened row-major (dimF × d), with `L`
/// the common denominator of the principal coefficients.
fn integer_blocks(op: &FirstOrderOperator) -> Vec<Vec<BigInt>> {
    let lcm = op
        .principal()
        .iter()
        .flat_map(|p| (0..p.rows()).flat_map(move |r| (0..p.cols()).map(move |c| p[(r, c)].denom().clone())))
        .fold(BigInt::one(), |acc, d| acc.lcm(&d));
    let (f, d) = (op.dim_f(), op.d());
    (0..op.dim_e())
        .map(|j| {
            let mut b = vec![BigInt::zero(); f * d];
            for (i, p) in op.principal().iter().enumerate() {
                for r in 0..f {
                    b[r * d + i] = (&p[(r, j)] * Q::from_integer(lcm.clone())).to_integer();
                }
            }
            b
        })
        .collect()
}

fn big_to_mod(x: &BigInt) -> u64 {
    let p = BigInt::from(MOD_P);
    let r = ((x % &p) + &p) % &p;
    r.to_u64().expect("reduced residue fits")
}

/// Exhausts the projective lattice. Units are (leading index, leading value); inside a unit an
/// odometer updates `M(e) mod p` incrementally.
fn lattice_search(op: &FirstOrderOperator, height: u32, start: Option<&Best>) -> (Option<Best>, u64) {
    let n = op.dim_e();
    let cells = op.dim_f() * op.d();
    let blocks: Vec<Vec<u64>> = integer_blocks(op)
        .iter()
        .map(|b| b.iter().map(big_to_mod).collect())
        .collect();
    let h = height as i64;
    let units: Vec<(usize, i64)> = (0..n).flat_map(|lead| (1..=h).map(move |v| (lead, v))).collect();
    let results = par::map_slice(&units, |&(lead, lead_val)| {
        let mut local: Option<Best> = start.cloned();
        let mut found: Option<Best> = None;
        let mut examined = 0u64;
        let free = n - lead - 1;
        let mut x = vec![-h; free];
        let mut cur = vec![0u64; cells];
        let lv = to_mod(lead_val);
        for (c, b) in cur.iter_mut().zip(&blocks[lead]) {
            *c = mul_mod(lv, *b);
        }
        let neg_h = to_mod(-h);
        for (t, xv) in x.iter().enumerate() {
            debug_assert_eq!(*xv, -h);
            for (c, b) in cur.iter_mut().zip(&blocks[lead + 1 + t]) {
                *c = add_mod(*c, mul_mod(neg_h, *b));
            }
        }
        let wrap: Vec<Vec<u64>> = (lead + 1..n)
            .map(|j| blocks[j].iter().map(|b| mul_mod(to_mod(2 * h), *b)).collect())
            .collect();
        let mut scratch = vec![0u64; cells];
        loop {
            examined += 1;
            let primitive = lead_val == 1 || {
                let g = x.iter().fold(lead_val, |g, v| g.gcd(v));
                g == 1
            };
            if primitive {
                let bound = local.as_ref().map_or(usize::MAX, |b| b.rank);
                scratch.copy_from_slice(&cur);
                let rp = rank_mod_p(&mut scratch, op.dim_f(), op.d(), bound.saturating_add(1));
                if rp <= bound {
                    let mut e = vec![BigInt::zero(); n];
                    e[lead] = BigInt::from(lead_val);
                    for (t, v) in x.iter().enumerate() {
                        e[lead + 1 + t] = BigInt::from(*v);
                    }
                    let key = key_of(&e);
                    let worth = match &local {
                        None => true,
                        Some(b) => rp < b.rank || key < b.key,
                    };
                    if worth {
                        let eq: Vec<Q> = e.iter().cloned().map(Q::from_integer).collect();
                        let rank = op.symbol_matrix_unchecked(&eq).rank();
                        let cand = Best {
                            rank,
                            key,
                            witness: e,
                            stage: "lattice",
                        };
                        if local.as_ref().map_or(true, |b| cand.better_than(b)) {
                            local = Some(cand.clone());
                            found = Some(cand);
                        }
                    }
                }
            }
            // odometer step, last coordinate fastest
            let mut pos = free;
            loop {
                if pos == 0 {
                    return (found, examined);
                }
                pos -= 1;
                if x[pos] < h {
                    x[pos] += 1;
                    for (c, b) in cur.iter_mut().zip(&blocks[lead + 1 + pos]) {
                        *c = add_mod(*c, *b);
                    }
                    break;
                }
                x[pos] = -h;
                for (c, w) in cur.iter_mut().zip(&wrap[pos]) {
                    *c = sub_mod(*c, *w);
                }
            }
        }
    });
    let mut best: Option<Best> = None;
    let mut examined = 0;
    for (f, ex) in results {
        examined += ex;
        if let Some(f) = f {
            offer(&mut best, f);
        }
    }
    (best, examined)
}

/// Binary64 copy of the symbol blocks for the descent stage.
struct FloatSymbol {
    f: usize,
    d: usize,
    blocks: Vec<Vec<f64>>,
}

impl FloatSymbol {
    fn new(op: &FirstOrderOperator) -> Self {
        let (f, d) = (op.dim_f(), op.d());
        let blocks = (0..op.dim_e())
            .map(|j| {
                let mut b = vec![0.0; f * d];
                for (i, p) in op.principal().iter().enumerate() {
                    for r in 0..f {
                        b[r * d + i] = to_f64(&p[(r, j)]);
                    }
                }
                b
            })
            .collect();
        Self { f, d, blocks }
    }

    /// The (target+1)-th largest singular value of M(x/|x|).
    fn objective(&self, x: &[f64], target: usize) -> f64 {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return f64::MAX;
        }
        let mut m = DMatrix::<f64>::zeros(self.f, self.d);
        for (xj, b) in x.iter().zip(&self.blocks) {
            if *xj == 0.0 {
                continue;
            }
            let s = xj / norm;
            for r in 0..self.f {
                for c in 0..self.d {
                    m[(r, c)] += s * b[r * self.d + c];
                }
            }
        }
        let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
        sv.get(target).copied().unwrap_or(0.0)
    }
}

fn descend(op: &FirstOrderOperator, sym: &FloatSymbol, target: usize, rng: &mut ChaCha8Rng) -> Option<Best> {
    let n = op.dim_e();
    let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let (x, fx) = nelder_mead(|x| sym.objective(x, target), &x0, 0.5, 200 * n.max(2));
    if fx > DESCENT_TOL {
        return None;
    }
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    let e: Vec<Q> = x.iter().map(|v| rationalize(v / scale, RATIONALIZE_DEN)).collect();
    let cand = exact_candidate(op, &e, "descent")?;
    (cand.rank <= target).then_some(cand)
}

/// Derivative-free simplex minimization. Returns the best vertex and its value.
pub(crate) fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], step: f64, max_evals: usize) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let mut vals: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut evals = n + 1;
    while evals < max_evals {
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap_or(Ordering::Equal));
        simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        vals = idx.iter().map(|&i| vals[i]).collect();
        if vals[0] < DESCENT_TOL * 1e-2 || (vals[n] - vals[0]).abs() < 1e-16 {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let xr = along(-1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                simplex[n] = xe;
                vals[n] = fe;
            } else {
                simplex[n] = xr;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            simplex[n] = xr;
            vals[n] = fr;
        } else {
            let (xc, fc) = if fr < vals[n] {
                let xc = along(-0.5);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(0.5);
                let fc = f(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < vals[n].min(fr) {
                simplex[n] = xc;
                vals[n] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    simplex[i] = best
                        .iter()
                        .zip(&simplex[i])
                        .map(|(b, v)| b + 0.5 * (v - b))
                        .collect();
                    vals[i] = f(&simplex[i]);
                }
                evals += n;
            }
        }
    }
    let (i, v) = vals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(Ordering::Equal))
        .map(|(i, v)| (i, *v))
        .expect("nonempty simplex");
    (simplex[i].clone(), v)
}

#[cfg(test)]
mod tests {
    use super::super::{make_boundary, make_curl, make_div, make_ext_derivative};
    use super::*;
    use crate::linalg::QMatrix;

    #[test]
    fn gallery_examples() {
        let cfg = EllConfig::default();
        let c = ell(&make_curl(3, 2).unwrap(), &cfg);
        assert_eq!(c.value, 2);
        assert_eq!(c.mode, CertMode::Analytic);
        assert!(!c.search_log.lattice_exhausted && c.search_log.lattice_points_examined == 0);
        c.verify(&make_curl(3, 2).unwrap()).unwrap();

        let c = ell(&make_div(3, 3).unwrap(), &cfg);
        assert_eq!(c.value, 1);
        let w = QMatrix::from_rows(3, &c.witness.chunks(3).map(|r| r.to_vec()).collect::<Vec<_>>());
        assert_eq!(w.rank(), 1);

        assert_eq!(ell(&make_ext_derivative(4, 1).unwrap(), &cfg).value, 3);

        let c = ell(&make_boundary(4, 2).unwrap(), &cfg);
        assert_eq!(c.value, 2);
        let v = MultiVector::from_dense(4, 2, Variance::Vector, &c.witness).unwrap();
        assert!(crate::exterior::is_simple(&v).unwrap().simple);
    }

    #[test]
    fn witness_prefers_coordinate_vectors() {
        let c = ell(&make_div(2, 2).unwrap(), &EllConfig::default());
        assert_eq!(c.witness.iter().filter(|x| !x.is_zero()).count(), 1);
    }

    #[test]
    fn unstructured_operator_is_lattice_exhausted() {
        let mut v = make_div(2, 2).unwrap().to_json();
        v.as_object_mut().unwrap().remove("structure");
        let op = FirstOrderOperator::from_json(&v).unwrap();
        let c = ell(&op, &EllConfig { height: 1, ..EllConfig::default() });
        assert_eq!(c.value, 1);
        assert_eq!(c.mode, CertMode::LatticeExhausted);
    }

    #[test]
    fn lift_degrades_to_zero() {
        let lift = make_div(1, 3).unwrap().lift_inhomogeneous();
        let c = ell(&lift, &EllConfig::default());
        assert_eq!(c.value, 0);
        assert!(c.witness[..3].iter().all(Zero::is_zero));
        assert_eq!(c.invariance_space.dim(), 0);
    }

    #[test]
    fn certificate_json_round_trip() {
        let op = make_curl(2, 1).unwrap();
        let c = ell(&op, &EllConfig::default());
        let back = EllCertificate::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        back.verify(&op).unwrap();
    }

    #[test]
    fn descent_finds_rank_drop_without_lattice() {
        // generic 2x2 matrices under curl(2,2): rank 1 (rank-one e) reachable from random starts
        let mut v = make_curl(2, 2).unwrap().to_json();
        v.as_object_mut().unwrap().remove("structure");
        let op = FirstOrderOperator::from_json(&v).unwrap();
        let c = ell(&op, &EllConfig { height: 0, samples: 0, restarts: 8, seed: 3 });
        assert_eq!(c.value, 1);
        assert_eq!(c.mode, CertMode::CertifiedUpperBound);
    }

    #[test]
    fn nelder_mead_minimizes_quadratic() {
        let (x, f) = nelder_mead(|x| (x[0] - 1.0).powi(2) + (x[1] + 2.0).powi(2), &[0.0, 0.0], 0.5, 2000);
        assert!(f < 1e-10);
        assert!((x[0] - 1.0).abs() < 1e-4 && (x[1] + 2.0).abs() < 1e-4);
    }
}
