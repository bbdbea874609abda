//! The four subcommands. Each returns a JSON report for stdout.

use std::fs;
use std::path::{Path, PathBuf};

use fuzzyds_core::cs;
use fuzzyds_core::ds2::{self, CommutatorDefects, Ds2Params, TimeConvention, MIN_VERIFY_TRUNCATION};
use fuzzyds_core::ds4::{self, BasisProvider, Ds4Params, ModelProvider};
use fuzzyds_core::expr::{parse, Expr};
use fuzzyds_core::numerics::ComplexMatrix;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{Model, RunConfig};
use crate::error::CliError;
use crate::matrix_file::MatrixFile;

/// Threshold for identities that hold exactly in exact arithmetic.
pub const ALGEBRAIC_THRESHOLD: f64 = 1e-12;
/// Threshold for quantities computed by quadrature.
pub const QUADRATURE_THRESHOLD: f64 = 1e-8;
/// Orthonormality defects above this trigger a warning.
pub const ORTHONORMALITY_WARNING: f64 = 1e-6;

/// Outcome of a command: the report plus any warnings for stderr.
#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn quiet(report: Value) -> Self {
        Self {
            report,
            warnings: Vec::new(),
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn ds2_meta(p: &Ds2Params) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("model".into(), json!("ds2"));
    m.insert("r".into(), json!(p.r()));
    m.insert("rho".into(), json!(p.rho()));
    m.insert("epsilon".into(), json!(p.epsilon()));
    m.insert("M".into(), json!(p.truncation()));
    m.insert("convention".into(), to_value(&p.convention()));
    m.insert("H_inv".into(), json!(p.h_inv()));
    m
}

fn ds4_meta(p: &Ds4Params, cfg: &RunConfig) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("model".into(), json!("ds4"));
    m.insert("r".into(), json!(p.r()));
    m.insert("nu".into(), json!(p.nu()));
    m.insert("s".into(), json!(p.s()));
    m.insert("epsilon".into(), json!(p.epsilon()));
    m.insert("L_max".into(), json!(cfg.l_max()));
    m.insert("H_inv".into(), json!(p.h_inv()));
    if let Some(path) = &cfg.spectrum {
        m.insert("spectrum".into(), json!(path.display().to_string()));
    }
    m
}

fn ds4_labels(provider: &ModelProvider) -> Vec<Value> {
    (0..provider.len()).map(|i| json!(provider.label(i))).collect()
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_report(path: Option<&PathBuf>, report: &Value) -> Result<(), CliError> {
    if let Some(path) = path {
        let text = serde_json::to_string_pretty(report).expect("reports serialize");
        fs::write(path, text).map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}

fn parse_pair(re: &str, im: Option<&str>) -> Result<(Expr, Option<Expr>), CliError> {
    let re = parse(re).map_err(|e| CliError::Expr(format!("--f: {e}")))?;
    let im = im
        .map(|s| parse(s).map_err(|e| CliError::Expr(format!("--f-im: {e}"))))
        .transpose()?;
    Ok((re, im))
}

// ---------------------------------------------------------------- build

/// ds2: writes the analytic `x0, x1, x2`. ds4: writes the quantized time
/// coordinate `x0 = r τ` and the spectrum observable `tau`.
pub fn build(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("ops"));
    match cfg.model() {
        Model::Ds2 => {
            let p = cfg.ds2_params()?;
            let (x0, x1, x2) = ds2::analytic_operators(&p);
            ensure_dir(&dir)?;
            let mut files = Vec::new();
            for (name, m) in [("x0", &x0), ("x1", &x1), ("x2", &x2)] {
                let mut meta = ds2_meta(&p);
                meta.insert("operator".into(), json!(name));
                let path = dir.join(format!("{name}.json"));
                MatrixFile::with_offset_labels(m, meta).save(&path)?;
                files.push(path.display().to_string());
            }
            Ok(Outcome::quiet(json!({
                "model": "ds2",
                "params": ds2_meta(&p),
                "dim": p.dim(),
                "files": files,
            })))
        }
        Model::Ds4 => {
            let p = cfg.ds4_params()?;
            let provider = cfg.ds4_provider(&p)?;
            let grid = ds4::default_grid(&provider, p.epsilon(), cfg.ds4_grid()?)?;
            ensure_dir(&dir)?;
            let labels = ds4_labels(&provider);
            let mut files = Vec::new();
            for (name, src) in [("x0", "r*tau"), ("tau", "tau")] {
                let f = parse(src)?;
                let a = ds4::quantize4(&provider, &p, &f, None, &grid)?;
                let mut meta = ds4_meta(&p, cfg);
                meta.insert("operator".into(), json!(name));
                meta.insert("f".into(), json!(src));
                let path = dir.join(format!("{name}.json"));
                MatrixFile::new(&a, labels.clone(), meta).save(&path)?;
                files.push(path.display().to_string());
            }
            Ok(Outcome::quiet(json!({
                "model": "ds4",
                "params": ds4_meta(&p, cfg),
                "dim": provider.len(),
                "files": files,
            })))
        }
    }
}

// ---------------------------------------------------------------- verify

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub identity: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &str, identity: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            identity: identity.into(),
            value,
            threshold,
            pass: value <= threshold,
        }
    }
}

fn finish(mut report: Map<String, Value>, checks: Vec<Check>, warnings: Vec<String>) -> Result<Outcome, CliError> {
    let violations: Vec<&Check> = checks.iter().filter(|c| !c.pass).collect();
    let names: Vec<String> = violations
        .iter()
        .map(|c| format!("{} ({})", c.name, c.identity))
        .collect();
    let verdict = if violations.is_empty() { "pass" } else { "fail" };
    report.insert("checks".into(), to_value(&checks));
    report.insert("violations".into(), json!(names));
    report.insert("verdict".into(), json!(verdict));
    Ok(Outcome {
        report: Value::Object(report),
        warnings,
    })
}

/// Verdict and report for `verify`. A failing verdict is reported through the
/// returned outcome; the caller maps it to the exit code.
pub fn verify(cfg: &RunConfig, matrices: Option<&Path>) -> Result<Outcome, CliError> {
    match (cfg.model(), matrices) {
        (Model::Ds4, Some(_)) => Err(CliError::Config(
            "--matrices is only supported for model ds2".into(),
        )),
        (Model::Ds2, _) => verify_ds2(cfg, matrices),
        (Model::Ds4, None) => verify_ds4(cfg),
    }
}

fn load_triple(dir: &Path) -> Result<(MatrixFile, [ComplexMatrix; 3]), CliError> {
    let files: Vec<MatrixFile> = ["x0", "x1", "x2"]
        .iter()
        .map(|n| MatrixFile::load(&dir.join(format!("{n}.json"))))
        .collect::<Result<_, _>>()?;
    let mats: Vec<ComplexMatrix> = files.iter().map(MatrixFile::to_matrix).collect::<Result<_, _>>()?;
    let (d, k) = (mats[0].dim(), mats[0].label_offset());
    if mats.iter().any(|m| m.dim() != d || m.label_offset() != k) {
        return Err(CliError::Config(format!(
            "{}: x0, x1, x2 must share dimension and label offset",
            dir.display()
        )));
    }
    let first = files.into_iter().next().expect("three files");
    let [a, b, c]: [ComplexMatrix; 3] = mats.try_into().expect("three matrices");
    Ok((first, [a, b, c]))
}

fn verify_ds2(cfg: &RunConfig, matrices: Option<&Path>) -> Result<Outcome, CliError> {
    let (cfg, loaded) = match matrices {
        None => (cfg.clone(), None),
        Some(dir) => {
            let (x0_file, mats) = load_triple(dir)?;
            let merged = cfg.clone().over(RunConfig::from_meta(&x0_file.meta)?);
            let n = mats[0].dim();
            let m = (n - 1) / 2;
            if n % 2 == 0 || mats[0].label_offset() != -(m as i64) {
                return Err(CliError::Config(format!(
                    "{}: expected labels −M..=M, got dim {n} offset {}",
                    dir.display(),
                    mats[0].label_offset()
                )));
            }
            if merged.truncation.is_some_and(|t| t != m) {
                return Err(CliError::Config(format!(
                    "configured M = {} but the matrices have M = {m}",
                    merged.truncation.unwrap_or_default()
                )));
            }
            let merged = RunConfig {
                truncation: Some(m),
                ..merged
            };
            (merged, Some(mats))
        }
    };
    let p = cfg.ds2_params()?;
    if p.truncation() < MIN_VERIFY_TRUNCATION {
        return Err(CliError::Config(format!(
            "verify needs M ≥ {MIN_VERIFY_TRUNCATION} for a non-empty interior block, got M = {}",
            p.truncation()
        )));
    }
    let source = if loaded.is_some() { "matrices" } else { "analytic" };
    let [x0, x1, x2] = match loaded {
        Some(m) => m,
        None => {
            let (a, b, c) = ds2::analytic_operators(&p);
            [a, b, c]
        }
    };

    let by_convention = |c: TimeConvention| -> Result<CommutatorDefects, CliError> {
        Ok(ds2::commutator_report_for(&p.with_convention(c), &x0, &x1, &x2)?.quantized)
    };
    let selected = ds2::commutator_report_for(&p, &x0, &x1, &x2)?;
    let casimir = ds2::casimir_report_for(&p, &ds2::casimir_of(&x0, &x1, &x2).map_err(ds2::Ds2Error::from)?)?;
    let grid = p.grid(cfg.ds2_grid())?;
    let identity_defect = cs::identity_resolution_defect(&ds2::basis(&p), &grid)?;

    // Algebraic checks compare the defect relative to the squared entry scale,
    // since products of O(s) entries carry rounding of order s²·1e−16.
    let scale = [&x0, &x1, &x2]
        .iter()
        .map(|m| m.max_abs())
        .fold(1.0f64, f64::max);
    let rel = |d: f64| d / (scale * scale);
    let alg = ALGEBRAIC_THRESHOLD;
    let q = selected.quantized;
    let mut checks = vec![
        Check::new("commutator_x0_x1", "[x0,x1] = i r x2", rel(q.x0_x1), alg),
        Check::new("commutator_x0_x2", "[x0,x2] = -i r x1", rel(q.x0_x2), alg),
        Check::new("commutator_x1_x2", "[x1,x2] = -i r e^(-eps/2) x0", rel(q.x1_x2), alg),
        Check::new("casimir_off_diagonal", "x0^2 - x1^2 - x2^2 is diagonal", rel(casimir.off_diagonal), alg),
        Check::new(
            "casimir_diagonal",
            "diag = r^2 m^2 - r^2 e^(-eps/2) (m^2 + 1/4 + rho^2)",
            rel(casimir.formula_defect),
            alg,
        ),
        Check::new("identity_resolution", "integral of |x><x| N mu = 1", identity_defect, QUADRATURE_THRESHOLD),
    ];
    if source == "matrices" {
        for (name, m) in [("x0", &x0), ("x1", &x1), ("x2", &x2)] {
            checks.push(Check::new(
                &format!("self_adjoint_{name}"),
                &format!("{name} = {name}^dagger"),
                m.self_adjoint_defect() / scale,
                alg,
            ));
        }
    }
    let mut warnings = Vec::new();
    if identity_defect > ORTHONORMALITY_WARNING {
        warnings.push(format!("identity-resolution defect {identity_defect:.3e} exceeds {ORTHONORMALITY_WARNING:e}"));
    }

    let mut report = Map::new();
    report.insert("model".into(), json!("ds2"));
    report.insert("source".into(), json!(source));
    report.insert("params".into(), Value::Object(ds2_meta(&p)));
    report.insert(
        "thresholds".into(),
        json!({"algebraic_relative": alg, "entry_scale": scale, "quadrature": QUADRATURE_THRESHOLD}),
    );
    report.insert(
        "commutator_defects".into(),
        json!({
            "margin": selected.margin,
            "convention": to_value(&p.convention()),
            "checked": to_value(&q),
            "cs_quantized": to_value(&by_convention(TimeConvention::CsQuantized)?),
            "group_generator": to_value(&by_convention(TimeConvention::GroupGenerator)?),
            "undeformed": to_value(&selected.expected_form),
        }),
    );
    report.insert("casimir_interior_deviation".into(), json!(casimir.target_deviation));
    report.insert("casimir".into(), to_value(&casimir));
    report.insert("identity_defect".into(), json!(identity_defect));
    finish(report, checks, warnings)
}

fn verify_ds4(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.ds4_params()?;
    let provider = cfg.ds4_provider(&p)?;
    let grid = ds4::default_grid(&provider, p.epsilon(), cfg.ds4_grid()?)?;
    let consistency = ds4::provider_consistency(&provider, &p, &grid)?;
    let n = provider.len();
    let one = ds4::quantize4(&provider, &p, &parse("1")?, None, &grid)?;
    let tau = ds4::quantize4(&provider, &p, &parse("tau")?, None, &grid)?;
    let identity = ComplexMatrix::identity(n, 0)?;
    let spectrum = ds4::spectrum_matrix(&provider)?;
    let one_defect = one.max_abs_diff(&identity)?;
    let tau_defect = tau.max_abs_diff(&spectrum)?;

    let checks = vec![
        Check::new(
            "orthonormality",
            "integral of Z^dagger Z over S^3 = 1",
            consistency.orthonormality_defect,
            QUADRATURE_THRESHOLD,
        ),
        Check::new("quantize_one", "A_1 = 1", one_defect, QUADRATURE_THRESHOLD),
        Check::new("quantize_tau", "A_tau = diag(tau_J)", tau_defect, QUADRATURE_THRESHOLD),
        Check::new(
            "casimir_relation",
            "H_inv = r s sqrt(nu^2 + 1/4)",
            consistency.relation_residual.abs(),
            ALGEBRAIC_THRESHOLD * p.h_inv().max(1.0),
        ),
        Check::new(
            "declared_parameters",
            "provider declares the configured (s, nu)",
            if consistency.declared_matches { 0.0 } else { 1.0 },
            0.0,
        ),
    ];
    let mut warnings = Vec::new();
    if consistency.orthonormality_defect > ORTHONORMALITY_WARNING {
        warnings.push(format!(
            "orthonormality defect {:.3e} exceeds {ORTHONORMALITY_WARNING:e}; refine --s3-counts",
            consistency.orthonormality_defect
        ));
    }
    let mut report = Map::new();
    report.insert("model".into(), json!("ds4"));
    report.insert("params".into(), Value::Object(ds4_meta(&p, cfg)));
    report.insert("dim".into(), json!(n));
    report.insert(
        "thresholds".into(),
        json!({"algebraic": ALGEBRAIC_THRESHOLD, "quadrature": QUADRATURE_THRESHOLD}),
    );
    report.insert("consistency".into(), to_value(&consistency));
    report.insert("identity_defect".into(), json!(one_defect));
    report.insert("tau_defect".into(), json!(tau_defect));
    finish(report, checks, warnings)
}

// ---------------------------------------------------------------- quantize

pub fn quantize(cfg: &RunConfig, f: &str, f_im: Option<&str>) -> Result<Outcome, CliError> {
    let (re, im) = parse_pair(f, f_im)?;
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("quantized.json"));
    let mut report = Map::new();
    let (a, file) = match cfg.model() {
        Model::Ds2 => {
            let p = cfg.ds2_params()?;
            let grid = p.grid(cfg.ds2_grid())?;
            let a = ds2::quantize_expr(&p, &re, im.as_ref(), &grid)?;
            let degree = re.trig_degree().zip(im.as_ref().map_or(Some(0), Expr::trig_degree));
            let degree = degree.map(|(a, b)| a.max(b));
            report.insert("model".into(), json!("ds2"));
            report.insert("params".into(), Value::Object(ds2_meta(&p)));
            report.insert("trig_degree".into(), json!(degree));
            report.insert(
                "outside_band_max".into(),
                json!(degree.map(|d| a.max_abs_outside_band(d as usize))),
            );
            if im.is_none() {
                let oracle = ds2::oracle_compare_on(&p, &re, &grid)?;
                report.insert("oracle".into(), to_value(&oracle));
            }
            let mut meta = ds2_meta(&p);
            meta.insert("f".into(), json!(f));
            if let Some(s) = f_im {
                meta.insert("f_im".into(), json!(s));
            }
            let file = MatrixFile::with_offset_labels(&a, meta);
            (a, file)
        }
        Model::Ds4 => {
            let p = cfg.ds4_params()?;
            let provider = cfg.ds4_provider(&p)?;
            let grid = ds4::default_grid(&provider, p.epsilon(), cfg.ds4_grid()?)?;
            let a = ds4::quantize4(&provider, &p, &re, im.as_ref(), &grid)?;
            report.insert("model".into(), json!("ds4"));
            report.insert("params".into(), Value::Object(ds4_meta(&p, cfg)));
            let mut meta = ds4_meta(&p, cfg);
            meta.insert("f".into(), json!(f));
            if let Some(s) = f_im {
                meta.insert("f_im".into(), json!(s));
            }
            let file = MatrixFile::new(&a, ds4_labels(&provider), meta);
            (a, file)
        }
    };
    if !a.is_finite() {
        return Err(CliError::Expr("quantized matrix has non-finite entries".into()));
    }
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    file.save(&out)?;
    report.insert("dim".into(), json!(a.dim()));
    report.insert("file".into(), json!(out.display().to_string()));
    report.insert("self_adjoint_defect".into(), json!(a.self_adjoint_defect()));
    report.insert("observed_bandwidth".into(), json!(a.bandwidth(1e-10)));
    Ok(Outcome::quiet(Value::Object(report)))
}

// ---------------------------------------------------------------- limit-scan

pub fn limit_scan(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rs = cfg.r_list()?;
    let h = cfg.h_inv();
    let report = match cfg.model() {
        Model::Ds2 => {
            let scan = ds2::classical_limit_scan(h, rs, cfg.epsilon(), cfg.truncation())?;
            let mut v = to_value(&scan);
            v["model"] = json!("ds2");
            v
        }
        Model::Ds4 => {
            let points = ds4::casimir_limit_path(h, cfg.spin(), cfg.epsilon(), rs)?;
            let max_residual = points
                .iter()
                .map(|p| p.relation_residual.abs())
                .fold(0.0f64, f64::max);
            json!({
                "model": "ds4",
                "h_inv": h,
                "s": cfg.spin(),
                "epsilon": cfg.epsilon(),
                "points": to_value(&points),
                "max_relation_residual": max_residual,
            })
        }
    };
    write_report(cfg.out.as_ref(), &report)?;
    Ok(Outcome::quiet(report))
}

/// Writes a verify report to `--out` when given.
pub fn save_report(cfg: &RunConfig, report: &Value) -> Result<(), CliError> {
    write_report(cfg.out.as_ref(), report)
}
