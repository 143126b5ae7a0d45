//! Machine-readable reports. Every document is a JSON object carrying
//! `schema_version`, a `kind`, and an `input` echo of the run
//! configuration. Floating-point values are written with 17 significant
//! digits, so they parse back to the same `f64`; non-finite values become
//! `null`.

use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;

use serde_json::{json, Map, Number, Value};

use crate::audit::{EvaluationSummary, PinchingReport};
use crate::constants::NamedConstant;
use crate::engine::{CurvatureBundle, FdConfig};
use crate::lab::{Inequality, NamedTensor, SampleStats, SHARD_SIZE, RNG_NAME};
use crate::verify::SuiteReport;
use crate::zoo::{ExactData, YamabeDatum, ZooEntry};

pub const SCHEMA_VERSION: u32 = 1;

pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let s = format!("{x:.16e}");
    Value::Number(Number::from_str(&s).expect("formatted float is a JSON number"))
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().copied().map(num).collect())
}

fn document(kind: &str, input: &Value, body: Value) -> Value {
    let mut map = Map::new();
    map.insert("schema_version".into(), json!(SCHEMA_VERSION));
    map.insert("kind".into(), json!(kind));
    map.insert("input".into(), input.clone());
    if let Value::Object(fields) = body {
        map.extend(fields);
    }
    Value::Object(map)
}

pub fn fd_json(fd: &FdConfig) -> Value {
    json!({ "step": num(fd.step), "order": fd.order, "richardson": fd.richardson })
}

fn yamabe_json(y: Option<&YamabeDatum>) -> Value {
    y.map_or(Value::Null, |y| json!({ "value": num(y.value), "provenance": y.provenance.to_string() }))
}

fn exact_json(e: &ExactData) -> Value {
    json!({
        "scalar": num(e.scalar),
        "ricci0_sq": num(e.ricci0_sq),
        "weyl_sq": num(e.weyl_sq),
        "rm0_sq": num(e.rm0_sq),
        "volume": num(e.volume),
        "yamabe": yamabe_json(e.yamabe.as_ref()),
        "euler": e.euler,
    })
}

fn evaluation_json(e: &EvaluationSummary) -> Value {
    match e {
        EvaluationSummary::ClosedForm { volume } => json!({ "method": "closed-form", "volume": num(*volume) }),
        EvaluationSummary::Quadrature { chart, nodes, points, volume, exact_volume, volume_rel_error } => json!({
            "method": "quadrature",
            "chart": chart,
            "nodes": nodes,
            "points": points,
            "volume": num(*volume),
            "exact_volume": opt_num(*exact_volume),
            "volume_rel_error": opt_num(*volume_rel_error),
        }),
        EvaluationSummary::Sampled { points, max_abs_residual } => json!({
            "method": "sampled-halton",
            "points": points,
            "max_abs_residual": num(*max_abs_residual),
        }),
    }
}

pub fn audit_report(r: &PinchingReport, input: &Value) -> Value {
    let bach = r.flags.bach.as_ref();
    let auxiliary: Map<String, Value> = r.auxiliary.iter().map(|(k, v)| (k.clone(), num(*v))).collect();
    document(
        "audit",
        input,
        json!({
            "theorem": r.audit.id(),
            "metric_label": r.metric_label,
            "n": r.n,
            "p": opt_num(r.audit.p()),
            "lhs": num(r.lhs),
            "threshold": num(r.threshold),
            "margin": num(r.margin),
            "ratio": num(r.ratio()),
            "verdict": r.verdict.as_str(),
            "equality_allowed": r.audit.non_strict(),
            "hypothesis_holds": r.hypothesis_holds(),
            "conclusion_if_hypotheses_hold": r.audit.conclusion(),
            "hypothesis_flags": {
                "bach_flat": bach.map(|b| b.flat),
                "bach_max_entry": opt_num(bach.map(|b| b.max_entry)),
                "bach_points": bach.map(|b| b.points),
                "constant_R": r.flags.constant_r,
                "R_positive": r.flags.r_positive,
            },
            "yamabe": yamabe_json(r.yamabe.as_ref()),
            "grid": evaluation_json(&r.evaluation),
            "tolerances": {
                "boundary": num(r.tol.boundary),
                "bach": num(r.tol.bach),
                "volume": num(r.tol.volume),
            },
            "runtime_ms": r.runtime_ms as u64,
            "auxiliary": auxiliary,
        }),
    )
}

fn tensor_json(t: &NamedTensor) -> Value {
    json!({ "name": t.name, "rank": t.rank, "dim": t.dim, "data": nums(&t.data) })
}

/// Reads the witness tensors back from a sample report.
pub fn witness_tensors(report: &Value) -> Option<Vec<NamedTensor>> {
    let tensors = report.get("witness")?.get("tensors")?.as_array()?;
    tensors
        .iter()
        .map(|t| {
            Some(NamedTensor {
                name: t.get("name")?.as_str()?.to_string(),
                rank: t.get("rank")?.as_u64()? as usize,
                dim: t.get("dim")?.as_u64()? as usize,
                data: t.get("data")?.as_array()?.iter().map(Value::as_f64).collect::<Option<_>>()?,
            })
        })
        .collect()
}

pub fn sample_report(s: &SampleStats, runtime_ms: u128, input: &Value) -> Value {
    let cfg = &s.config;
    let k = match cfg.inequality {
        Inequality::WeylRicciCubic(k) => num(k.resolve(cfg.n)),
        _ => Value::Null,
    };
    let witness = s.witness.as_ref().map_or(Value::Null, |w| {
        json!({
            "trial": w.trial,
            "ratio": num(w.ratio),
            "tensors": w.tensors.iter().map(tensor_json).collect::<Vec<_>>(),
        })
    });
    document(
        "sample",
        input,
        json!({
            "inequality": cfg.inequality.id(),
            "k": k,
            "n": cfg.n,
            "trials": s.trials,
            "seed": cfg.seed,
            "distribution": cfg.distribution.id(),
            "rng": RNG_NAME,
            "shard_size": SHARD_SIZE,
            "tol": num(s.tol),
            "violations": s.violations,
            "degenerate": s.degenerate,
            "max_ratio": opt_num(s.max_ratio),
            "witness": witness,
            "runtime_ms": runtime_ms as u64,
        }),
    )
}

pub fn curvature_report(label: &str, b: &CurvatureBundle, fd: &FdConfig, closed_form: bool, input: &Value) -> Value {
    let g = &b.g;
    let norm = |t: &crate::tensor::AlgCurv4| t.norm_sq(g).map_or(Value::Null, num);
    document(
        "curvature",
        input,
        json!({
            "metric_label": label,
            "n": g.dim(),
            "point": nums(&b.point),
            "riemann_source": if closed_form { "closed-form" } else { "finite-difference" },
            "fd": fd_json(fd),
            "metric": nums(g.as_slice()),
            "riemann": nums(b.rm.as_slice()),
            "weyl": nums(b.weyl.as_slice()),
            "ricci_part": nums(b.v.as_slice()),
            "scalar_part": nums(b.u.as_slice()),
            "rm0": nums(b.rm0.as_slice()),
            "ricci": nums(b.ricci.as_slice()),
            "ricci0": nums(b.ricci0.as_slice()),
            "scalar": num(b.scalar),
            "norms_sq": {
                "riemann": norm(&b.rm),
                "weyl": norm(&b.weyl),
                "rm0": norm(&b.rm0),
                "ricci0": b.ricci0.norm_sq(g).map_or(Value::Null, num),
            },
            "bach": b.bach.as_ref().map_or(Value::Null, |s| nums(s.as_slice())),
            "bach_max_entry": opt_num(b.bach.as_ref().map(|s| s.max_abs_entry())),
            "div_rm0": b.div_rm0.as_deref().map_or(Value::Null, nums),
            "raw_symmetry_residual": num(b.raw_symmetry_residual),
        }),
    )
}

pub fn constants_report(n: usize, p: Option<f64>, sign: &str, values: &[NamedConstant], input: &Value) -> Value {
    let list: Vec<Value> = values
        .iter()
        .map(|c| match &c.value {
            Ok(v) => json!({ "name": c.name, "value": num(*v) }),
            Err(e) => json!({ "name": c.name, "value": null, "not_applicable": e.to_string() }),
        })
        .collect();
    document("constants", input, json!({ "n": n, "p": opt_num(p), "sign": sign, "constants": list }))
}

pub fn suite_report(r: &SuiteReport, runtime_ms: u128, input: &Value) -> Value {
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "subject": c.subject,
                "cases": c.cases,
                "max_residual": num(c.max_residual),
                "tol": num(c.tol),
                "passed": c.passed(),
            })
        })
        .collect();
    document(
        "verify",
        input,
        json!({ "suite": r.suite.id(), "passed": r.passed(), "checks": checks, "runtime_ms": runtime_ms as u64 }),
    )
}

pub fn zoo_report(entries: &[ZooEntry], input: &Value) -> Value {
    let list: Vec<Value> = entries
        .iter()
        .map(|e| {
            let f = e.flags();
            json!({
                "label": e.label,
                "n": e.dim(),
                "flags": {
                    "einstein": f.einstein,
                    "conformally_flat": f.conformally_flat,
                    "constant_scalar": f.constant_scalar,
                },
                "closed_form_riemann": e.chart.has_exact_riemann(),
                "integration_chart": e.integration_chart.as_ref().map(|c| c.label().to_string()),
                "quadrature_nodes": e.quadrature_nodes,
                "exact": e.exact.as_ref().map_or(Value::Null, exact_json),
            })
        })
        .collect();
    document("zoo", input, json!({ "entries": list }))
}

pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}
