use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};
use wavecone::exterior::lemma_ab_oracle;
use wavecone::measure::{
    self, box_dimension, default_scales, detect_invariance, pointwise_invariance_dim, restrict,
    sharp_measure, wave_cone_mask, weak_residual, TestFamily,
};
use wavecone::operator::{
    ell as compute_ell, make_boundary, make_curl, make_div, make_ext_derivative, EllCertificate, EllConfig,
    FirstOrderOperator,
};
use wavecone::rational::{parse_q, q_vec_to_json};

use crate::report::Report;
use crate::GalleryOp;

/// Pipeline acceptance thresholds.
pub const RESIDUAL_TOL: f64 = 0.05;
pub const INVARIANCE_TOL: f64 = 0.05;
pub const BOX_TOL: f64 = 0.2;
pub const MIN_R2: f64 = 0.99;
pub const MIN_PIPELINE_N: usize = 16;

pub struct Outcome {
    pub report: Value,
    /// Set when a check failed; reported as a warning, the exit status stays 0.
    pub failure: Option<String>,
}

fn ok(report: Value) -> Result<Outcome> {
    Ok(Outcome { report, failure: None })
}

fn load_operator(r: &mut Report, path: &Path) -> Result<FirstOrderOperator> {
    let bytes = r.read_file(path)?;
    let v: Value = serde_json::from_slice(&bytes).with_context(|| format!("{} is not valid JSON", path.display()))?;
    FirstOrderOperator::from_json(&v).with_context(|| format!("operator file {}", path.display()))
}

fn load_certificate(r: &mut Report, path: &Path) -> Result<EllCertificate> {
    let bytes = r.read_file(path)?;
    let v: Value = serde_json::from_slice(&bytes).with_context(|| format!("{} is not valid JSON", path.display()))?;
    let inner = v.pointer("/results/certificate").unwrap_or(&v);
    EllCertificate::from_json(inner).with_context(|| format!("certificate file {}", path.display()))
}

pub fn gallery(which: GalleryOp, output: Option<&Path>) -> Result<()> {
    let op = match which {
        GalleryOp::Curl { d, m } => make_curl(d, m),
        GalleryOp::Div { k, d } => make_div(k, d),
        GalleryOp::Ext { d, m } => make_ext_derivative(d, m),
        GalleryOp::Boundary { d, m } => make_boundary(d, m),
    }?;
    let text = serde_json::to_string_pretty(&op.to_json())? + "\n";
    match output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

pub fn ell(
    input: &Path,
    height: u32,
    samples: usize,
    restarts: usize,
    seed: u64,
    output: Option<&Path>,
    timed: bool,
) -> Result<Outcome> {
    let mut r = Report::new("ell", seed, timed);
    r.input("operator", input.display().to_string());
    let cfg = EllConfig {
        height,
        samples,
        restarts,
        seed,
    };
    r.input("config", serde_json::to_value(cfg)?);
    let op = load_operator(&mut r, input)?;
    let cert = r.time("search", || compute_ell(&op, &cfg));
    cert.verify(&op).context("certificate failed its own exact check")?;
    if let Some(p) = output {
        std::fs::write(p, serde_json::to_string_pretty(&cert.to_json())? + "\n")
            .with_context(|| format!("writing {}", p.display()))?;
    }
    ok(r.finish(json!({
        "operator": op.label(),
        "value": cert.value,
        "mode": cert.mode,
        "certificate": cert.to_json(),
    })))
}

pub fn member(input: &Path, e: &str, timed: bool) -> Result<Outcome> {
    let mut r = Report::new("member", 0, timed);
    r.input("operator", input.display().to_string());
    r.input("e", e);
    let op = load_operator(&mut r, input)?;
    let text = match Path::new(e) {
        p if p.is_file() => {
            let bytes = r.read_file(p)?;
            let v: Value = serde_json::from_slice(&bytes).with_context(|| format!("{e} is not valid JSON"))?;
            let items = v.as_array().ok_or_else(|| anyhow!("{e} must hold a JSON array"))?;
            items
                .iter()
                .map(|x| match x {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect::<Vec<_>>()
                .join(",")
        }
        _ => e.to_string(),
    };
    let e = text
        .split(',')
        .enumerate()
        .map(|(i, s)| parse_q(s.trim()).ok_or_else(|| anyhow!("entry {i} of --e ({s:?}) is not a rational")))
        .collect::<Result<Vec<_>>>()?;
    let rep = op.wave_cone_member(&e)?;
    let kernel = op.kernel_directions(&e)?;
    let inv = op.invariance_space(&e)?;
    ok(r.finish(json!({
        "operator": op.label(),
        "member": rep.member,
        "report": rep.to_json(),
        "rank": inv.dim(),
        "kernel_directions": kernel.to_json(),
        "invariance_space": inv.to_json(),
    })))
}

pub fn sharp(input: &Path, cert: &Path, n: usize, h: Option<f64>, output: &Path, timed: bool) -> Result<Outcome> {
    let mut r = Report::new("sharp", 0, timed);
    r.input("operator", input.display().to_string());
    r.input("cert", cert.display().to_string());
    r.input("n", n);
    let h = h.unwrap_or(2.0 / n as f64);
    r.input("h", h);
    let op = load_operator(&mut r, input)?;
    let cert = load_certificate(&mut r, cert)?;
    let mu = r.time("build", || sharp_measure(&op, &cert, n, h))?;
    r.time("write", || measure::io::write_vector(output, &mu))?;
    ok(r.finish(json!({
        "operator": op.label(),
        "ell": cert.invariance_space.dim(),
        "witness": q_vec_to_json(&cert.witness),
        "output": output.display().to_string(),
        "total_mass": mu.base.total_mass(),
        "supported_cells": mu.base.support().len(),
    })))
}

pub fn residual(input: &Path, mdir: &Path, seed: u64, timed: bool) -> Result<Outcome> {
    let mut r = Report::new("residual", seed, timed);
    r.input("operator", input.display().to_string());
    r.input("measure", mdir.display().to_string());
    let op = load_operator(&mut r, input)?;
    r.hash_dir(mdir)?;
    let mu = measure::io::read_vector(mdir)?;
    let rep = r.time("pairing", || weak_residual(&op, &mu, &TestFamily::seeded(seed)))?;
    ok(r.finish(json!({
        "operator": op.label(),
        "n": mu.base.n,
        "h": mu.base.h,
        "residual": rep.value,
        "family": rep.family,
        "probes": rep.probes,
    })))
}

pub fn dim_estimate(mdir: &Path, scales: Option<usize>, threshold: f64, tol: f64, timed: bool) -> Result<Outcome> {
    let mut r = Report::new("dim-estimate", 0, timed);
    r.input("measure", mdir.display().to_string());
    r.hash_dir(mdir)?;
    let g = measure::io::read_grid(mdir)?;
    let scales = scales.unwrap_or_else(|| default_scales(g.n));
    r.input("scales", scales);
    r.input("threshold", threshold);
    r.input("invariance_tol", tol);
    let b = r.time("box_count", || box_dimension(&g, scales, threshold))?;
    let mut results = json!({ "n": g.n, "box_dimension": b });
    if tol > 0.0 {
        let v = r.time("invariance", || detect_invariance(&g, tol));
        results["invariance"] = json!({ "dim": v.dim(), "space": v.to_json() });
    }
    ok(r.finish(results))
}

pub fn mask(input: &Path, mdir: &Path, output: &Path, timed: bool) -> Result<Outcome> {
    let mut r = Report::new("mask", 0, timed);
    r.input("operator", input.display().to_string());
    r.input("measure", mdir.display().to_string());
    r.input("max_denominator", measure::MASK_MAX_DEN);
    let op = load_operator(&mut r, input)?;
    r.hash_dir(mdir)?;
    let mu = measure::io::read_vector(mdir)?;
    let m = r.time("mask", || wave_cone_mask(&op, &mu))?;
    let ranks = r.time("ranks", || pointwise_invariance_dim(&op, &mu))?;
    let supported = ranks.iter().filter(|x| x.is_some()).count();
    let marked = m.iter().filter(|&&x| x).count();
    let min_rank = ranks.iter().flatten().min().copied();

    let header = measure::io::Header::of(&mu.base, "u8", None);
    measure::io::write_header(output, &header)?;
    std::fs::write(output.join("mask.u8"), m.iter().map(|&x| x as u8).collect::<Vec<_>>())?;
    std::fs::write(
        output.join("rank.u8"),
        ranks.iter().map(|x| x.map_or(u8::MAX, |v| v.min(254) as u8)).collect::<Vec<_>>(),
    )?;

    let mut results = json!({
        "operator": op.label(),
        "supported_cells": supported,
        "marked_cells": marked,
        "marked_fraction": if supported == 0 { 0.0 } else { marked as f64 / supported as f64 },
        "min_invariance_dim": min_rank,
        "output": output.display().to_string(),
    });
    let scales = default_scales(mu.base.n);
    if marked > 0 && scales >= 4 {
        let masked = restrict(&mu.base, &m)?;
        results["masked_box_dimension"] = serde_json::to_value(box_dimension(
            &masked,
            scales,
            measure::DEFAULT_MASS_THRESHOLD,
        )?)?;
    }
    ok(r.finish(results))
}

pub fn pipeline(input: &Path, n: usize, seed: u64, output: Option<&Path>, timed: bool) -> Result<Outcome> {
    if n < MIN_PIPELINE_N {
        bail!(wavecone::Error::TooCoarse);
    }
    let mut r = Report::new("pipeline", seed, timed);
    r.input("operator", input.display().to_string());
    r.input("n", n);
    r.input(
        "thresholds",
        json!({
            "residual": RESIDUAL_TOL,
            "invariance": INVARIANCE_TOL,
            "box_dimension": BOX_TOL,
            "r2": MIN_R2,
            "mass_threshold": measure::DEFAULT_MASS_THRESHOLD,
        }),
    );
    let op = load_operator(&mut r, input)?;
    let cfg = EllConfig {
        seed,
        ..EllConfig::default()
    };
    let cert = r.time("ell", || compute_ell(&op, &cfg));
    cert.verify(&op).context("stage ell")?;
    let h = 2.0 / n as f64;
    let mu = r.time("sharp", || sharp_measure(&op, &cert, n, h)).context("stage sharp")?;
    if let Some(dir) = output {
        measure::io::write_vector(dir, &mu).context("stage sharp")?;
    }
    let res = r
        .time("residual", || weak_residual(&op, &mu, &TestFamily::seeded(seed)))
        .context("stage residual")?;
    let inv = r.time("invariance", || detect_invariance(&mu.base, INVARIANCE_TOL));
    let b = r
        .time("box_dimension", || {
            box_dimension(&mu.base, default_scales(n), measure::DEFAULT_MASS_THRESHOLD)
        })
        .context("stage box_dimension")?;

    let ell_value = cert.value;
    let checks = json!({
        "residual": res.value < RESIDUAL_TOL,
        "invariance": inv.dim() >= ell_value,
        "box_dimension": (b.estimate - ell_value as f64).abs() <= BOX_TOL,
        "r2": b.r2.map_or(false, |x| x >= MIN_R2),
    });
    let failed: Vec<String> = checks
        .as_object()
        .expect("object")
        .iter()
        .filter(|(_, v)| v == &&Value::Bool(false))
        .map(|(k, _)| k.clone())
        .collect();
    let report = r.finish(json!({
        "operator": op.label(),
        "ell": ell_value,
        "mode": cert.mode,
        "witness": q_vec_to_json(&cert.witness),
        "residual": res.value,
        "detected_invariance_dim": inv.dim(),
        "detected_invariance": inv.to_json(),
        "box_dimension": b,
        "checks": checks,
    }));
    Ok(Outcome {
        report,
        failure: (!failed.is_empty()).then(|| format!("pipeline checks failed: {}", failed.join(", "))),
    })
}

pub fn verify_appendix(dmax: usize, samples: usize, seed: u64, timed: bool) -> Result<Outcome> {
    if !(1..=6).contains(&dmax) {
        bail!("dmax must be between 1 and 6, got {dmax}");
    }
    let mut r = Report::new("verify-appendix", seed, timed);
    r.input("dmax", dmax);
    r.input("samples", samples);
    let mut cases = Vec::new();
    r.time("oracle", || -> Result<()> {
        for d in 1..=dmax {
            for m in 1..=d {
                cases.push(lemma_ab_oracle(d, m, samples, seed)?);
            }
        }
        Ok(())
    })?;
    let all_pass = cases.iter().all(|c| c.pass);
    let report = r.finish(json!({ "all_pass": all_pass, "cases": cases }));
    Ok(Outcome {
        report,
        failure: (!all_pass).then(|| "annihilator checks failed".to_string()),
    })
}
