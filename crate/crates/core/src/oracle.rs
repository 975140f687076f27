//! Independent check of the spectral parameter: a finite-difference
//! discretization of the radial operator
//!
//! `-f'' - f'/ρ + l²/ρ² f + ϖ²ρ² f + 2mχ ρ f + c/ρ f = Λ f`
//!
//! whose eigenvalue `Λ` must equal `ϖ μ̄` at a permitted frequency.
//! Cells are centred at `ρ_i = ρ_min + (i + 1/2) h`; the flux form
//! `(ρ f')'/ρ` is symmetrized with `u_i = sqrt(ρ_i) f_i`, Dirichlet
//! conditions sit on the outer faces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{truncation_params, Case, PhysicalConfig, SignConvention};
use crate::poly::Polynomial;
use crate::quantize::QuantizationResult;
use crate::series::coefficients;
use crate::spectrum::{energy_case_a, energy_case_b};
use crate::tridiag::{count_sign_changes, SymTridiagonal};

pub const DEFAULT_POINTS: usize = 4000;
pub const MIN_POINTS: usize = 100;
const ENERGY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialOperatorSpec {
    pub abs_l: u32,
    /// `ϖ²`, coefficient of `ρ²`.
    pub varpi2: f64,
    /// `2mχ`, coefficient of `ρ`.
    pub lin_coeff: f64,
    /// Coefficient of `1/ρ`.
    pub coul_coeff: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub points: usize,
}

impl RadialOperatorSpec {
    /// Operator for `cfg` on `[0, 12/sqrt(ϖ) · max(1, sqrt(n+|l|+1))]`.
    pub fn for_config(cfg: &PhysicalConfig) -> Result<Self> {
        cfg.validate()?;
        let w = cfg.varpi();
        if w == 0.0 {
            return Err(Error::DegenerateOperator);
        }
        let spread = ((cfg.n + cfg.abs_l() + 1) as f64).sqrt().max(1.0);
        Ok(RadialOperatorSpec {
            abs_l: cfg.abs_l(),
            varpi2: w * w,
            lin_coeff: 2.0 * cfg.m * cfg.chi,
            coul_coeff: cfg.convention.sign() * cfg.coupling_a,
            rho_min: 0.0,
            rho_max: 12.0 / w.sqrt() * spread,
            points: DEFAULT_POINTS,
        })
    }

    pub fn with_points(mut self, points: usize) -> Self {
        self.points = points;
        self
    }

    pub fn with_rho_max(mut self, rho_max: f64) -> Self {
        self.rho_max = rho_max;
        self
    }

    pub fn step(&self) -> f64 {
        (self.rho_max - self.rho_min) / self.points as f64
    }

    fn validate(&self) -> Result<()> {
        if self.points < MIN_POINTS {
            return Err(Error::InvalidDomain(format!(
                "need at least {MIN_POINTS} points, got {}",
                self.points
            )));
        }
        if !(self.rho_min >= 0.0 && self.rho_max.is_finite() && self.rho_max > self.rho_min) {
            return Err(Error::InvalidDomain(format!(
                "need 0 <= rho_min < rho_max, got [{}, {}]",
                self.rho_min, self.rho_max
            )));
        }
        if !(self.varpi2.is_finite() && self.lin_coeff.is_finite() && self.coul_coeff.is_finite()) {
            return Err(Error::InvalidDomain("non-finite operator coefficient".into()));
        }
        Ok(())
    }
}

pub fn build_operator(spec: &RadialOperatorSpec) -> Result<SymTridiagonal> {
    spec.validate()?;
    let n = spec.points;
    let h = spec.step();
    let h2 = h * h;
    let l2 = (spec.abs_l as f64).powi(2);
    let centre = |i: usize| spec.rho_min + (i as f64 + 0.5) * h;
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n - 1);
    for i in 0..n {
        let r = centre(i);
        let potential = l2 / (r * r) + spec.varpi2 * r * r + spec.lin_coeff * r + spec.coul_coeff / r;
        diag.push(2.0 / h2 + potential);
        if i + 1 < n {
            let face = r + 0.5 * h;
            off.push(-face / (h2 * (r * centre(i + 1)).sqrt()));
        }
    }
    // mirror ghosts put f = 0 on the boundary faces; the axis face has
    // weight ρ_min and drops out when ρ_min = 0
    diag[0] += spec.rho_min / (h2 * centre(0));
    diag[n - 1] += spec.rho_max / (h2 * centre(n - 1));
    Ok(SymTridiagonal::new(diag, off))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub points: usize,
    pub rho_min: f64,
    pub rho_max: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSpectrum {
    /// Richardson-extrapolated from `N` and `2N`.
    pub eigenvalues: Vec<f64>,
    /// Sign changes of each eigenvector on the base grid.
    pub node_counts: Vec<usize>,
    pub grid_meta: GridMeta,
    /// `|Λ_2N - Λ_N| · 4/3` per eigenvalue.
    pub convergence_estimate: Vec<f64>,
}

/// Lowest `k` eigenvalues, checked for second-order convergence.
///
/// Fails with [`Error::OracleConvergence`] when the two-grid estimate exceeds
/// `tol · max(1, |Λ|)`.
pub fn eigen_lowest(spec: &RadialOperatorSpec, k: usize, tol: f64) -> Result<OracleSpectrum> {
    spec.validate()?;
    if k == 0 || k > spec.points / 10 {
        return Err(Error::InvalidDomain(format!(
            "requested {k} eigenvalues from {} points",
            spec.points
        )));
    }
    let coarse_op = build_operator(spec)?;
    let fine_op = build_operator(&spec.with_points(2 * spec.points))?;
    let coarse = coarse_op.lowest(k);
    let fine = fine_op.lowest(k);
    let mut eigenvalues = Vec::with_capacity(k);
    let mut estimate = Vec::with_capacity(k);
    let mut node_counts = Vec::with_capacity(k);
    for j in 0..k {
        let diff = fine[j] - coarse[j];
        let est = diff.abs() * 4.0 / 3.0;
        if !(est <= tol * fine[j].abs().max(1.0)) {
            return Err(Error::OracleConvergence(format!(
                "eigenvalue {j}: two-grid estimate {est:e} (N = {}, {}: {} vs {})",
                spec.points,
                2 * spec.points,
                coarse[j],
                fine[j]
            )));
        }
        eigenvalues.push(fine[j] + diff / 3.0);
        estimate.push(est);
        node_counts.push(count_sign_changes(&coarse_op.eigenvector(coarse[j]), 1e-8));
    }
    Ok(OracleSpectrum {
        eigenvalues,
        node_counts,
        grid_meta: GridMeta {
            points: spec.points,
            rho_min: spec.rho_min,
            rho_max: spec.rho_max,
            step: spec.step(),
        },
        convergence_estimate: estimate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidationRow {
    pub omega: f64,
    pub node_index: usize,
    pub lambda_analytic: f64,
    pub lambda_oracle: f64,
    pub rel_error: f64,
    pub oracle_nodes: usize,
    /// Energy from the level formula.
    pub energy: f64,
    /// `sqrt(Λ + m² - mω)`.
    pub energy_from_lambda: f64,
    pub energy_pass: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidationReport {
    pub case: Case,
    pub n: u32,
    pub l: i32,
    pub convention: SignConvention,
    pub tol: f64,
    pub rows: Vec<CrossValidationRow>,
}

impl CrossValidationReport {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }
}

/// Compares `ϖ μ̄` at every root of `q` with the oracle eigenvalue whose
/// index equals the number of positive zeros of the polynomial factor.
///
/// `cfg` supplies `m`, `a`, `χ`; its `n`, `l`, `ω` and convention are taken
/// from `q`. Any row outside `tol` turns the result into
/// [`Error::Mismatch`].
pub fn cross_validate(
    cfg: &PhysicalConfig,
    q: &QuantizationResult,
    tol: f64,
) -> Result<CrossValidationReport> {
    cross_validate_with(cfg, q, tol, |spec| spec)
}

/// [`cross_validate`] with a hook to adjust the oracle domain per root.
pub fn cross_validate_with(
    cfg: &PhysicalConfig,
    q: &QuantizationResult,
    tol: f64,
    adjust: impl Fn(RadialOperatorSpec) -> RadialOperatorSpec,
) -> Result<CrossValidationReport> {
    if q.roots.is_empty() {
        return Err(Error::InvalidConfig("no frequencies to validate".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tolerance must be > 0, got {tol}")));
    }
    let mut rows = Vec::with_capacity(q.roots.len());
    for root in &q.roots {
        let mut c = cfg.with_omega(root.omega).with_convention(q.convention);
        c.n = q.n;
        c.l = q.l;
        let p = truncation_params(&c)?;
        let lambda_analytic = p.lambda();
        let poly = Polynomial::new(coefficients(&p, q.n as usize + 1));
        let node_index = poly.positive_root_count();
        let spec = adjust(RadialOperatorSpec::for_config(&c)?);
        let oracle = eigen_lowest(&spec, node_index + 1, tol.max(1e-3))?;
        let lambda_oracle = oracle.eigenvalues[node_index];
        let rel_error = (lambda_oracle - lambda_analytic).abs() / lambda_analytic.abs().max(f64::MIN_POSITIVE);

        let level = match q.case {
            Case::A => energy_case_a(c.m, c.omega, c.n, c.l)?,
            Case::B => energy_case_b(c.m, c.omega, c.chi, c.n, c.l)?,
        };
        let radicand = lambda_analytic + c.m * c.m - c.m * c.omega;
        let energy_from_lambda = radicand.max(0.0).sqrt();
        let energy_pass = radicand >= 0.0
            && (energy_from_lambda - level.e_plus).abs() <= ENERGY_TOL * level.e_plus.abs();
        rows.push(CrossValidationRow {
            omega: root.omega,
            node_index,
            lambda_analytic,
            lambda_oracle,
            rel_error,
            oracle_nodes: oracle.node_counts[node_index],
            energy: level.e_plus,
            energy_from_lambda,
            energy_pass,
            pass: rel_error <= tol && energy_pass,
        });
    }
    let report = CrossValidationReport {
        case: q.case,
        n: q.n,
        l: q.l,
        convention: q.convention,
        tol,
        rows,
    };
    if report.failures() > 0 {
        return Err(Error::Mismatch(Box::new(report)));
    }
    Ok(report)
}
