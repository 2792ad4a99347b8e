use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Map, Value};

use ncmeasure::classical::{compare, oracle_decompose, oracle_moments};
use ncmeasure::decompose::decompose_report;
use ncmeasure::gns::cuntz_distance_of;
use ncmeasure::linalg::{hermitian_eigen, hermitian_part, op_norm};
use ncmeasure::transforms::{cauchy, herglotz, mu_kernel};
use ncmeasure::{CMat, Error, GnsTruncation, MeasureSpec, NcMeasure, WordIndex};

use crate::config::{Format, RunConfig};
use crate::point::{self, PointSpec};
use crate::report::{self, complex_table, matrix, opt};
use crate::CliError;

/// Reads and parses a measure spec file.
pub fn load_measure_spec(path: &Path) -> Result<MeasureSpec, CliError> {
    let text = read(path)?;
    ncmeasure::specfile::parse(&text).map_err(|e| CliError::in_file(path, e))
}

pub fn load_point_spec(path: &Path) -> Result<PointSpec, CliError> {
    let text = read(path)?;
    point::parse(&text).map_err(|e| CliError::in_file(path, e))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn measure_block(spec: &MeasureSpec, m: &NcMeasure) -> Value {
    json!({
        "kind": spec.kind_name(),
        "d": m.d(),
        "budget": m.budget(),
        "mass": m.total_mass(),
        "spec": serde_json::to_value(spec).expect("spec serializes"),
    })
}

fn words_block(d: usize, degree: usize) -> Result<Value, Error> {
    let idx = WordIndex::new(d, degree)?;
    Ok(Value::Array(
        idx.words().map(|w| json!(w.letters())).collect(),
    ))
}

fn same_alphabet(a: &MeasureSpec, b: &MeasureSpec) -> Result<usize, Error> {
    let d = a.alphabet()?;
    let e = b.alphabet()?;
    if d != e {
        return Err(Error::AlphabetMismatch {
            expected: d,
            found: e,
        });
    }
    Ok(d)
}

/// Lebesgue decomposition of `μ` against `λ` along the configured ladder.
pub fn decompose(
    mu_spec: &MeasureSpec,
    lambda_spec: &MeasureSpec,
    cfg: &RunConfig,
) -> Result<Value, Error> {
    let d = same_alphabet(mu_spec, lambda_spec)?;
    cfg.validate(d, 3)?;
    let top = cfg.top_degree();
    let mu = mu_spec.to_measure(Some(top))?;
    let lambda = lambda_spec.to_measure(Some(top))?;
    let dcfg = cfg.decompose_config();
    let rep = decompose_report(&mu, &lambda, &cfg.degree_ladder, &dcfg)?;

    let oracle = match (d, mu_spec.classical(), lambda_spec.classical()) {
        (1, Some(a), Some(b)) => Some(oracle_decompose(&a, &b)),
        _ => None,
    };

    let mut degrees = Vec::new();
    let mut oracle_rows = Vec::new();
    for (r, step) in rep.per_degree.iter().zip(rep.steps()) {
        if r.additivity_ulps() > 1.0 {
            return Err(Error::Invariant(format!(
                "moments_ac + moments_s deviates from μ by {:.3e} at degree {}",
                r.additivity_defect(),
                r.degree
            )));
        }
        let pos = r.positivity();
        if !pos.holds(cfg.tol_psd) {
            return Err(Error::Invariant(format!(
                "decomposed Grams not PSD at degree {}: min eigenvalues {:.3e} (ac), {:.3e} (s), scale {:.3e}",
                r.degree, pos.min_ac, pos.min_s, pos.scale
            )));
        }
        degrees.push(json!({
            "degree": r.degree,
            "moments_ac": complex_table(&r.moments_ac),
            "moments_s": complex_table(&r.moments_s),
            "kernel_dim": step.kernel_dim,
            "strict_kernel_dim": step.strict_kernel_dim,
            "smallest_nonzero_singular": opt(step.smallest_nonzero_singular),
            "coembedding_norm": step.coembedding_norm,
            "toeplitz_residual": opt(step.toeplitz_residual),
            "cuntz_distance_lambda": opt(step.cuntz_distance_lambda),
            "trace_d": step.trace_d,
            "max_moment_change": opt(step.max_moment_change),
            "ranks": {"sigma": r.sigma_rank, "mu": r.mu_rank, "lambda": r.lambda_rank},
            "positivity": {"min_eig_ac": pos.min_ac, "min_eig_s": pos.min_s, "scale": pos.scale},
        }));
        if let Some(o) = &oracle {
            let cmp = compare(r, &oracle_moments(o, r.degree), r.degree)?;
            oracle_rows.push(json!({
                "degree": cmp.degree,
                "ac_error": cmp.ac_error,
                "sing_error": cmp.sing_error,
            }));
        }
    }

    let mut out = report::header("decompose", cfg);
    out.insert("mu".into(), measure_block(mu_spec, &mu));
    out.insert("lambda".into(), measure_block(lambda_spec, &lambda));
    out.insert("words".into(), words_block(d, top)?);
    out.insert("degrees".into(), Value::Array(degrees));
    out.insert("verdict".into(), json!(rep.verdict.to_string()));
    let trace: Vec<Value> = rep
        .steps()
        .iter()
        .map(|s| opt(s.cuntz_distance_lambda))
        .collect();
    out.insert("cuntz_trace_lambda".into(), Value::Array(trace));
    if let Some(o) = &oracle {
        out.insert(
            "oracle".into(),
            json!({
                "ac": serde_json::to_value(&o.ac).expect("spec serializes"),
                "sing": serde_json::to_value(&o.sing).expect("spec serializes"),
                "comparison": oracle_rows,
            }),
        );
    }
    Ok(Value::Object(out))
}

/// Herglotz, Cauchy and μ-kernel values at each point and ladder degree.
pub fn transform(
    mu_spec: &MeasureSpec,
    points: &PointSpec,
    cfg: &RunConfig,
) -> Result<Value, Error> {
    let d = mu_spec.alphabet()?;
    cfg.validate(d, 1)?;
    let p = points.polynomial(d)?;
    let p_degree = p.iter().map(|(w, _)| w.len()).max().unwrap_or(0);
    let unit_p = p.len() == 1 && p[0].0.is_empty() && p[0].1 == ncmeasure::linalg::ONE;
    let mu = mu_spec.to_measure(Some(cfg.top_degree().max(p_degree)))?;
    let pts = points.points(d, cfg.seed)?;

    let mut rows = Vec::new();
    for z in &pts {
        let mut per_degree = Vec::new();
        for &n in &cfg.degree_ladder {
            let h = herglotz(&mu, z, n)?;
            let c = cauchy(&mu, &p, z, n)?;
            let k = mu_kernel(&mu, z, z, &CMat::identity(z.n(), z.n()), n)?;
            let min_real = hermitian_eigen(&hermitian_part(&h.value))
                .0
                .last()
                .copied()
                .unwrap_or(0.0);
            let mut row = Map::new();
            row.insert("degree".into(), json!(n));
            row.insert("herglotz".into(), json!({"value": matrix(&h.value), "tail_bound": h.tail_bound, "rounding_bound": h.rounding_bound}));
            row.insert("herglotz_min_real_eig".into(), json!(min_real));
            row.insert("cauchy".into(), json!({"value": matrix(&c.value), "tail_bound": c.tail_bound, "rounding_bound": c.rounding_bound}));
            row.insert("mu_kernel".into(), json!({"value": matrix(&k.value), "tail_bound": k.tail_bound, "rounding_bound": k.rounding_bound}));
            if unit_p {
                let ident = &c.value * ncmeasure::C64::new(2.0, 0.0)
                    - CMat::identity(z.n(), z.n()).scale(mu.total_mass())
                    - &h.value;
                row.insert(
                    "herglotz_cauchy_defect".into(),
                    json!({"norm": op_norm(&ident), "bound": h.error_bound() + 2.0 * c.error_bound()}),
                );
            }
            per_degree.push(Value::Object(row));
        }
        rows.push(json!({
            "point": z.components().iter().map(matrix).collect::<Vec<_>>(),
            "row_norm": z.row_norm(),
            "degrees": per_degree,
        }));
    }
    let mut out = report::header("transform", cfg);
    out.insert("mu".into(), measure_block(mu_spec, &mu));
    out.insert(
        "polynomial".into(),
        Value::Array(
            p.iter()
                .map(|(w, v)| json!({"word": w.letters(), "coeff": report::complex(*v)}))
                .collect(),
        ),
    );
    out.insert("points".into(), Value::Array(rows));
    Ok(Value::Object(out))
}

/// Cuntz distance trace, Gram ranks and null dimensions of `λ`.
pub fn diagnose(lambda_spec: &MeasureSpec, cfg: &RunConfig) -> Result<Value, Error> {
    let d = lambda_spec.alphabet()?;
    cfg.validate(d, 1)?;
    let lambda = lambda_spec.to_measure(Some(cfg.top_degree()))?;
    let mut rows = Vec::new();
    let mut last = None;
    for &n in &cfg.degree_ladder {
        let t = GnsTruncation::build_with(&lambda, n, cfg.tol_psd, cfg.tol_null)?;
        let dist = if n >= 1 {
            Some(cuntz_distance_of(&t)?)
        } else {
            None
        };
        last = dist.or(last);
        rows.push(json!({
            "degree": n,
            "size": t.gram().size(),
            "rank": t.rank(),
            "null_dim": t.null_dim(),
            "largest_eig": t.eigenvalues().first().copied().unwrap_or(0.0),
            "smallest_eig": t.eigenvalues().last().copied().unwrap_or(0.0),
            "cuntz_distance": opt(dist),
        }));
    }
    let verdict = match last {
        Some(v) if v < cfg.cuntz_tol => "cuntz",
        Some(_) => "non_cuntz",
        None => "undetermined",
    };
    let mut out = report::header("diagnose", cfg);
    out.insert("lambda".into(), measure_block(lambda_spec, &lambda));
    out.insert("degrees".into(), Value::Array(rows));
    out.insert(
        "verdict".into(),
        json!({"cuntz": verdict, "heuristic": true, "threshold": cfg.cuntz_tol}),
    );
    Ok(Value::Object(out))
}

/// Final rendering in the configured format.
pub fn render(report: Value, format: Format) -> String {
    match format {
        Format::Json => report::to_string(report),
        Format::Text => render_text(&report),
    }
}

fn num(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.6e}"),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

fn render_text(r: &Value) -> String {
    let mut s = String::new();
    let cmd = r["command"].as_str().unwrap_or("");
    let _ = writeln!(
        s,
        "ncmeasure {} {}",
        r["version"].as_str().unwrap_or(""),
        cmd
    );
    match cmd {
        "decompose" => {
            let _ = writeln!(
                s,
                "mu: {}  lambda: {}",
                r["mu"]["kind"], r["lambda"]["kind"]
            );
            let _ = writeln!(
                s,
                "{:>6} {:>6} {:>14} {:>14} {:>14} {:>14}",
                "N", "kerE", "trace D", "toeplitz", "cuntz(λ)", "Δmoments"
            );
            for row in r["degrees"].as_array().into_iter().flatten() {
                let _ = writeln!(
                    s,
                    "{:>6} {:>6} {:>14} {:>14} {:>14} {:>14}",
                    num(&row["degree"]),
                    num(&row["kernel_dim"]),
                    num(&row["trace_d"]),
                    num(&row["toeplitz_residual"]),
                    num(&row["cuntz_distance_lambda"]),
                    num(&row["max_moment_change"]),
                );
            }
            if let Some(rows) = r["oracle"]["comparison"].as_array() {
                for row in rows {
                    let _ = writeln!(
                        s,
                        "oracle N={}: ac error {}, singular error {}",
                        num(&row["degree"]),
                        num(&row["ac_error"]),
                        num(&row["sing_error"])
                    );
                }
            }
            let _ = writeln!(s, "verdict: {}", r["verdict"].as_str().unwrap_or(""));
        }
        "transform" => {
            for (k, p) in r["points"].as_array().into_iter().flatten().enumerate() {
                let _ = writeln!(s, "point {k}: row norm {}", num(&p["row_norm"]));
                for row in p["degrees"].as_array().into_iter().flatten() {
                    let h = &row["herglotz"]["value"];
                    let _ = writeln!(
                        s,
                        "  N={:<4} H[0,0] = {} + {}i  (tail {})  min Re-eig {}",
                        num(&row["degree"]),
                        num(&h[0][0][0]),
                        num(&h[0][0][1]),
                        num(&row["herglotz"]["tail_bound"]),
                        num(&row["herglotz_min_real_eig"]),
                    );
                }
            }
        }
        "diagnose" => {
            let _ = writeln!(
                s,
                "{:>6} {:>6} {:>6} {:>8} {:>14}",
                "N", "size", "rank", "null", "cuntz dist"
            );
            for row in r["degrees"].as_array().into_iter().flatten() {
                let _ = writeln!(
                    s,
                    "{:>6} {:>6} {:>6} {:>8} {:>14}",
                    num(&row["degree"]),
                    num(&row["size"]),
                    num(&row["rank"]),
                    num(&row["null_dim"]),
                    num(&row["cuntz_distance"]),
                );
            }
            let _ = writeln!(
                s,
                "verdict (heuristic): {}",
                r["verdict"]["cuntz"].as_str().unwrap_or("")
            );
        }
        _ => {}
    }
    s
}
