use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use heunbound_core::oracle::{cross_validate_with, CrossValidationReport};
use heunbound_core::quantize::{PermittedFrequency, RootProvenance};
use heunbound_core::series::{frobenius_coeffs, truncation_residual};
use heunbound_core::spectrum::{build_wavefunction, GridSpec};
use heunbound_core::{
    energy_case_a, energy_case_b, permitted_frequencies, truncation_params, Case, Error, FrequencyQuery,
    PhysicalConfig, QuantizationResult, ScanGrid,
};

use crate::args::{CommandKind, Format, RunConfig};
use crate::format::{sig9, Table};
use crate::CliError;

/// Rendered output plus the exit code it implies.
pub struct Outcome {
    pub body: String,
    pub exit: i32,
    /// Human-readable lines for the error stream.
    pub notes: Vec<String>,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Outcome {
            body,
            exit: 0,
            notes: Vec::new(),
        }
    }
}

#[derive(Serialize, Deserialize)]
pub struct Envelope<T> {
    pub config: RunConfig,
    pub result: T,
}

fn json<T: Serialize>(cfg: &RunConfig, result: T) -> String {
    let env = Envelope {
        config: cfg.clone(),
        result,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("serializable output");
    s.push('\n');
    s
}

fn case_label(case: Case) -> &'static str {
    match case {
        Case::A => "A",
        Case::B => "B",
    }
}

/// Shortest round-trip representation.
fn exact(x: f64) -> String {
    format!("{x:?}")
}

fn metadata(t: &mut Table, cfg: &RunConfig) {
    t.meta("command", cfg.command.name());
    t.meta("case", case_label(cfg.case));
    t.meta("convention", cfg.convention);
    t.meta("m", exact(cfg.m));
    t.meta("a", exact(cfg.a));
    t.meta("chi", exact(cfg.chi));
    let opt = |t: &mut Table, k: &str, v: Option<String>| {
        if let Some(v) = v {
            t.meta(k, v);
        }
    };
    opt(t, "n", cfg.n.map(|v| v.to_string()));
    opt(t, "l", cfg.l.map(|v| v.to_string()));
    opt(t, "n_max", cfg.n_max.map(|v| v.to_string()));
    opt(t, "l_max", cfg.l_max.map(|v| v.to_string()));
    opt(t, "omega_min", cfg.omega_min.map(exact));
    opt(t, "omega_max", cfg.omega_max.map(exact));
    t.meta("tol", exact(cfg.tol));
    opt(t, "grid_n", cfg.grid_n.map(|v| v.to_string()));
    opt(t, "rho_max_scale", cfg.rho_max_scale.map(exact));
    opt(t, "force_omega", cfg.force_omega.map(exact));
    opt(t, "root_index", cfg.root_index.map(|v| v.to_string()));
}

fn query(cfg: &RunConfig, n: u32, l: i32) -> FrequencyQuery {
    FrequencyQuery {
        m: cfg.m,
        a: cfg.a,
        chi: cfg.chi,
        n,
        l,
        convention: cfg.convention,
        tol: cfg.tol,
        scan: ScanGrid {
            omega_min: cfg.omega_min,
            omega_max: cfg.omega_max,
            ..ScanGrid::default()
        },
    }
}

fn physical(cfg: &RunConfig, omega: f64) -> Result<PhysicalConfig, Error> {
    Ok(PhysicalConfig::new(cfg.m, omega, cfg.a, cfg.chi, cfg.n.unwrap_or(1), cfg.l.unwrap_or(0))?
        .with_convention(cfg.convention))
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        CommandKind::Frequency => frequency(cfg),
        CommandKind::Spectrum => spectrum(cfg),
        CommandKind::Verify => verify(cfg),
        CommandKind::Wavefunction => wavefunction(cfg),
    }
}

fn frequency(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let res = permitted_frequencies(&query(cfg, cfg.n.unwrap_or(1), cfg.l.unwrap_or(0)))?;
    if cfg.format == Format::Json {
        return Ok(Outcome::ok(json(cfg, &res)));
    }
    let mut t = Table::new(vec!["root_index", "omega", "provenance", "residual"]);
    metadata(&mut t, cfg);
    for (i, r) in res.roots.iter().enumerate() {
        t.row(vec![i.to_string(), sig9(r.omega), r.provenance.as_str().into(), sig9(r.residual)]);
    }
    Ok(Outcome::ok(t.render()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub case: Case,
    pub n: u32,
    pub l: i32,
    pub root_index: Option<usize>,
    pub omega: Option<f64>,
    pub e_plus: Option<f64>,
    pub e_minus: Option<f64>,
    pub residual: Option<f64>,
    pub error: Option<String>,
}

fn spectrum_cell(cfg: &RunConfig, n: u32, l: i32) -> Vec<SpectrumRow> {
    let failed = |e: Error| SpectrumRow {
        case: cfg.case,
        n,
        l,
        root_index: None,
        omega: None,
        e_plus: None,
        e_minus: None,
        residual: None,
        error: Some(e.to_string()),
    };
    let res = match permitted_frequencies(&query(cfg, n, l)) {
        Ok(r) => r,
        Err(e) => return vec![failed(e)],
    };
    res.roots
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let level = match cfg.case {
                Case::A => energy_case_a(cfg.m, r.omega, n, l),
                Case::B => energy_case_b(cfg.m, r.omega, cfg.chi, n, l),
            };
            match level {
                Ok(e) => SpectrumRow {
                    case: cfg.case,
                    n,
                    l,
                    root_index: Some(i),
                    omega: Some(r.omega),
                    e_plus: Some(e.e_plus),
                    e_minus: Some(e.e_minus),
                    residual: Some(r.residual),
                    error: None,
                },
                Err(e) => SpectrumRow {
                    root_index: Some(i),
                    omega: Some(r.omega),
                    ..failed(e)
                },
            }
        })
        .collect()
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("HEUNBOUND_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| CliError::Usage(format!("HEUNBOUND_THREADS must be an integer >= 1, got '{v}'")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Io(e.to_string()))
}

fn spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n_max = cfg.n_max.unwrap_or(0);
    let l_max = cfg.l_max.unwrap_or(0) as i32;
    let cells: Vec<(u32, i32)> = (1..=n_max)
        .flat_map(|n| (-l_max..=l_max).map(move |l| (n, l)))
        .collect();
    let rows: Vec<SpectrumRow> = thread_pool()?.install(|| {
        cells
            .par_iter()
            .map(|&(n, l)| spectrum_cell(cfg, n, l))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    });
    if cfg.format == Format::Json {
        return Ok(Outcome::ok(json(cfg, &rows)));
    }
    let mut t = Table::new(vec![
        "case", "n", "l", "root_index", "omega", "E_plus", "E_minus", "residual", "error",
    ]);
    metadata(&mut t, cfg);
    let num = |v: Option<f64>| v.map(sig9).unwrap_or_default();
    for r in &rows {
        t.row(vec![
            case_label(r.case).into(),
            r.n.to_string(),
            r.l.to_string(),
            r.root_index.map(|i| i.to_string()).unwrap_or_default(),
            num(r.omega),
            num(r.e_plus),
            num(r.e_minus),
            num(r.residual),
            r.error.clone().unwrap_or_default(),
        ]);
    }
    Ok(Outcome::ok(t.render()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyResult {
    pub pass: bool,
    pub report: CrossValidationReport,
}

fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = cfg.n.unwrap_or(1);
    let l = cfg.l.unwrap_or(0);
    let res = match cfg.force_omega {
        Some(omega) => {
            let p = truncation_params(&physical(cfg, omega)?)?;
            QuantizationResult {
                n,
                l,
                case: cfg.case,
                convention: cfg.convention,
                roots: vec![PermittedFrequency {
                    omega,
                    provenance: RootProvenance::Forced,
                    residual: truncation_residual(&p, n),
                }],
            }
        }
        None => permitted_frequencies(&query(cfg, n, l))?,
    };
    let base = physical(cfg, res.roots[0].omega)?;
    let adjust = |spec: heunbound_core::RadialOperatorSpec| {
        let spec = match cfg.grid_n {
            Some(points) => spec.with_points(points),
            None => spec,
        };
        match cfg.rho_max_scale {
            Some(s) => spec.with_rho_max(spec.rho_max * s),
            None => spec,
        }
    };
    let (report, exit) = match cross_validate_with(&base, &res, cfg.tol, adjust) {
        Ok(r) => (r, 0),
        Err(Error::Mismatch(r)) => (*r, 4),
        Err(e) => return Err(e.into()),
    };
    let notes: Vec<String> = report
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            format!(
                "{} root {i}: omega={} node={} lambda_analytic={} lambda_oracle={} rel_error={} energy_check={}",
                if r.pass { "PASS" } else { "FAIL" },
                sig9(r.omega),
                r.node_index,
                sig9(r.lambda_analytic),
                sig9(r.lambda_oracle),
                sig9(r.rel_error),
                if r.energy_pass { "ok" } else { "mismatch" },
            )
        })
        .collect();
    let body = if cfg.format == Format::Json {
        json(
            cfg,
            VerifyResult {
                pass: exit == 0,
                report,
            },
        )
    } else {
        let mut t = Table::new(vec![
            "root_index",
            "omega",
            "node_index",
            "lambda_analytic",
            "lambda_oracle",
            "rel_error",
            "energy",
            "energy_from_lambda",
            "status",
        ]);
        metadata(&mut t, cfg);
        for (i, r) in report.rows.iter().enumerate() {
            t.row(vec![
                i.to_string(),
                sig9(r.omega),
                r.node_index.to_string(),
                sig9(r.lambda_analytic),
                sig9(r.lambda_oracle),
                sig9(r.rel_error),
                sig9(r.energy),
                sig9(r.energy_from_lambda),
                (if r.pass { "PASS" } else { "FAIL" }).into(),
            ]);
        }
        t.render()
    };
    Ok(Outcome { body, exit, notes })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionResult {
    pub omega: f64,
    pub norm_constant: f64,
    pub nodes: usize,
    pub rho: Vec<f64>,
    pub f: Vec<f64>,
}

fn wavefunction(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = cfg.n.unwrap_or(1);
    let l = cfg.l.unwrap_or(0);
    let omega = match cfg.force_omega {
        Some(w) => w,
        None => {
            let res = permitted_frequencies(&query(cfg, n, l))?;
            let idx = cfg.root_index.unwrap_or(0);
            res.roots.get(idx).map(|r| r.omega).ok_or_else(|| {
                CliError::Usage(format!("--root-index {idx} out of range: {} permitted frequencies", res.roots.len()))
            })?
        }
    };
    let p = truncation_params(&physical(cfg, omega)?)?;
    let s = frobenius_coeffs(&p, n as usize + 2);
    let scale = p.varpi.sqrt();
    let grid = GridSpec {
        rho_max: cfg.rho_max_scale.map(|k| k * 10.0 / scale),
        points: cfg.grid_n.unwrap_or(GridSpec::default().points),
    };
    let wf = build_wavefunction(&s, scale, &grid)?;
    if cfg.format == Format::Json {
        return Ok(Outcome::ok(json(
            cfg,
            WavefunctionResult {
                omega,
                norm_constant: wf.norm_constant,
                nodes: wf.nodes,
                rho: wf.grid,
                f: wf.values,
            },
        )));
    }
    let mut t = Table::new(vec!["rho", "f"]);
    metadata(&mut t, cfg);
    t.meta("omega", exact(omega));
    t.meta("norm_constant", exact(wf.norm_constant));
    t.meta("nodes", wf.nodes);
    for (r, f) in wf.grid.iter().zip(&wf.values) {
        t.row(vec![sig9(*r), sig9(*f)]);
    }
    Ok(Outcome::ok(t.render()))
}
