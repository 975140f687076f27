//! Energy levels and normalized radial wavefunctions at permitted frequencies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{truncation_params, varpi, Case, PhysicalConfig, SignConvention};
use crate::quantize::{freq_case_a_n1, FrequencyCubic};
use crate::series::{eval_radial, SeriesSolution};
use crate::tridiag::count_sign_changes;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyLevel {
    pub n: u32,
    pub l: i32,
    pub omega: f64,
    pub e_plus: f64,
    pub e_minus: f64,
    pub case: Case,
}

fn check_common(m: f64, omega: f64, n: u32) -> Result<()> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::InvalidConfig(format!("m must be finite and > 0, got {m}")));
    }
    if !(omega.is_finite() && omega >= 0.0) {
        return Err(Error::InvalidConfig(format!("omega must be finite and >= 0, got {omega}")));
    }
    if n < 1 {
        return Err(Error::InvalidConfig("n must be >= 1".into()));
    }
    Ok(())
}

fn level(n: u32, l: i32, omega: f64, radicand: f64, case: Case) -> Result<EnergyLevel> {
    if !(radicand >= 0.0) {
        return Err(Error::NegativeRadicand(radicand));
    }
    let e = radicand.sqrt();
    Ok(EnergyLevel {
        n,
        l,
        omega,
        e_plus: e,
        e_minus: -e,
        case,
    })
}

/// `E = ±sqrt(m² + 2mω(n + |l| + 1/2))`.
pub fn energy_case_a(m: f64, omega: f64, n: u32, l: i32) -> Result<EnergyLevel> {
    check_common(m, omega, n)?;
    if omega == 0.0 {
        return Err(Error::DegenerateOperator);
    }
    let radicand = m * m + 2.0 * m * omega * (n as f64 + l.unsigned_abs() as f64 + 0.5);
    level(n, l, omega, radicand, Case::A)
}

/// `E = ±sqrt(m² + 2ϖ(n + |l| + 1) - mω - m²χ²/ϖ²)` with
/// `ϖ = sqrt(m²ω² + χ²)`; identical to [`energy_case_a`] at `chi = 0`.
pub fn energy_case_b(m: f64, omega: f64, chi: f64, n: u32, l: i32) -> Result<EnergyLevel> {
    check_common(m, omega, n)?;
    if !(chi.is_finite() && chi >= 0.0) {
        return Err(Error::InvalidConfig(format!("chi must be finite and >= 0, got {chi}")));
    }
    if chi == 0.0 {
        return energy_case_a(m, omega, n, l);
    }
    let w = varpi(m, omega, chi);
    let radicand = m * m + 2.0 * w * (n as f64 + l.unsigned_abs() as f64 + 1.0)
        - m * omega
        - m * m * chi * chi / (w * w);
    level(n, l, omega, radicand, Case::B)
}

/// Energy at the permitted frequency of the lowest Coulomb-only mode,
/// `E = m sqrt(1 + a²(2|l|+3) / (2m²(2|l|+1)))`.
pub fn energy_case_a_lowest(m: f64, a: f64, l: i32) -> f64 {
    let abs_l = l.unsigned_abs() as f64;
    m * (1.0 + a * a * (2.0 * abs_l + 3.0) / (2.0 * m * m * (2.0 * abs_l + 1.0))).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityRow {
    pub omega: f64,
    /// Closed-form (Coulomb-only) or spectral-parameter route.
    pub e_reference: f64,
    /// Energy-level formula at the permitted frequency.
    pub e_levels: f64,
    pub rel_diff: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub case: Case,
    pub tolerance: f64,
    pub rows: Vec<IdentityRow>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.pass)
    }
}

const IDENTITY_TOL_A: f64 = 1e-14;
const IDENTITY_TOL_B: f64 = 1e-12;

/// Cross-checks the lowest-mode energies through two algebraic routes.
///
/// Coulomb-only: the closed-form lowest energy against the level formula at
/// the closed-form frequency. Linear potential: the level formula at each
/// physical cubic root against `sqrt(ϖ μ̄ + m² - mω)` with `μ̄` from the
/// spectral truncation condition.
pub fn algebraic_identity_check(m: f64, a: f64, chi: f64, l: i32, n: u32) -> Result<IdentityReport> {
    if n != 1 {
        return Err(Error::InvalidConfig("the identity check covers n = 1 only".into()));
    }
    if chi == 0.0 {
        let omega = freq_case_a_n1(m, a, l)?;
        let e_ref = energy_case_a_lowest(m, a, l);
        let e_lev = energy_case_a(m, omega, 1, l)?.e_plus;
        let rel_diff = (e_ref - e_lev).abs() / e_ref.abs();
        return Ok(IdentityReport {
            case: Case::A,
            tolerance: IDENTITY_TOL_A,
            rows: vec![IdentityRow {
                omega,
                e_reference: e_ref,
                e_levels: e_lev,
                rel_diff,
                pass: rel_diff <= IDENTITY_TOL_A,
            }],
        });
    }
    let convention = SignConvention::default_for(Case::B);
    let cubic = FrequencyCubic::new(m, a, chi, l, convention);
    let mut rows = Vec::new();
    for &s in &cubic.physical_roots {
        let omega = (s * s - chi * chi).sqrt() / m;
        let cfg = PhysicalConfig::new(m, omega, a, chi, 1, l)?.with_convention(convention);
        let p = truncation_params(&cfg)?;
        let radicand = p.varpi * p.mu_bar + m * m - m * omega;
        let e_ref = radicand.max(0.0).sqrt();
        let e_lev = energy_case_b(m, omega, chi, 1, l)?.e_plus;
        let rel_diff = (e_ref - e_lev).abs() / e_ref.abs();
        rows.push(IdentityRow {
            omega,
            e_reference: e_ref,
            e_levels: e_lev,
            rel_diff,
            pass: radicand >= 0.0 && rel_diff <= IDENTITY_TOL_B,
        });
    }
    Ok(IdentityReport {
        case: Case::B,
        tolerance: IDENTITY_TOL_B,
        rows,
    })
}

/// Uniform radial sampling in the physical coordinate ρ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Defaults to `10/sqrt(ϖ)`.
    pub rho_max: Option<f64>,
    /// Odd, so that composite Simpson applies.
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            rho_max: None,
            points: 4001,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialWavefunction {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub norm_constant: f64,
    pub nodes: usize,
    /// Positive real roots of the polynomial `F`, by Sturm isolation.
    pub polynomial_roots: usize,
}

/// Composite Simpson over equally spaced samples (odd count).
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    debug_assert!(n >= 3 && n % 2 == 1);
    let mut acc = values[0] + values[n - 1];
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

/// Samples `f(ρ) = f̃(sqrt(ϖ) ρ)` and normalizes it to `∫ f² ρ dρ = 1`.
///
/// `physical_scale` is `sqrt(ϖ)`, the factor mapping ρ to the dimensionless
/// variable of the series.
pub fn build_wavefunction(
    s: &SeriesSolution,
    physical_scale: f64,
    grid: &GridSpec,
) -> Result<RadialWavefunction> {
    let poly = s.polynomial().ok_or(Error::NotTruncated)?;
    if !(physical_scale.is_finite() && physical_scale > 0.0) {
        return Err(Error::InvalidConfig(format!("physical scale must be > 0, got {physical_scale}")));
    }
    if grid.points < 3 || grid.points.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!(
            "wavefunction grid needs an odd number of points >= 3, got {}",
            grid.points
        )));
    }
    let rho_max = grid.rho_max.unwrap_or(10.0 / physical_scale);
    if !(rho_max.is_finite() && rho_max > 0.0) {
        return Err(Error::InvalidConfig(format!("rho_max must be > 0, got {rho_max}")));
    }
    let h = rho_max / (grid.points - 1) as f64;
    let rho: Vec<f64> = (0..grid.points).map(|i| i as f64 * h).collect();
    let raw = rho
        .iter()
        .map(|&x| eval_radial(s, physical_scale * x))
        .collect::<Result<Vec<f64>>>()?;
    let density: Vec<f64> = raw.iter().zip(&rho).map(|(f, x)| f * f * x).collect();
    let norm2 = simpson(&density, h);
    if !(norm2 > 0.0 && norm2.is_finite()) {
        return Err(Error::InvalidConfig(format!("wavefunction norm is {norm2}")));
    }
    let norm_constant = 1.0 / norm2.sqrt();
    let values: Vec<f64> = raw.iter().map(|f| f * norm_constant).collect();
    let nodes = count_sign_changes(&values, 1e-12);
    Ok(RadialWavefunction {
        grid: rho,
        values,
        norm_constant,
        nodes,
        polynomial_roots: poly.positive_root_count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::truncation_params;
    use crate::series::frobenius_coeffs;

    #[test]
    fn case_a_examples() {
        let e = energy_case_a(1.0, 0.5, 1, 0).unwrap();
        assert!((e.e_plus - 2.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(e.e_plus, -e.e_minus);
        let e = energy_case_a(1.0, 1e-12, 1, 0).unwrap();
        assert!((e.e_plus - 1.0).abs() < 1e-11);
        assert!((energy_case_a_lowest(1.0, 1.0, 0) - 2.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn case_b_examples() {
        let a = energy_case_a(1.0, 0.5, 1, 0).unwrap();
        let b = energy_case_b(1.0, 0.5, 0.0, 1, 0).unwrap();
        assert_eq!(a.e_plus.to_bits(), b.e_plus.to_bits());
        let e = energy_case_b(1.0, 0.0, 1.0, 1, 0).unwrap();
        assert_eq!(e.e_plus, 2.0);
        assert_eq!(e.case, Case::B);
        let e = energy_case_b(1.0, 7.898328249872952, 0.1, 1, 0).unwrap();
        assert!((e.e_plus - 4.97).abs() < 0.01);
    }

    #[test]
    fn case_b_radicand_stays_positive() {
        // m⁴ω²/ϖ² + 2ϖ(n+|l|+1) - mω > 0 since ϖ >= mω
        for (omega, chi) in [(0.0, 1e-6), (1e-9, 1e-3), (5.0, 1e-4), (1e3, 2.0)] {
            assert!(energy_case_b(1.0, omega, chi, 1, 0).unwrap().e_plus > 0.0);
        }
    }

    #[test]
    fn identity_examples() {
        for (m, a, l) in [(1.0, 1.0, 0), (1.0, 2.0, 1), (2.0, 1.0, 0)] {
            let r = algebraic_identity_check(m, a, 0.0, l, 1).unwrap();
            assert!(r.all_pass(), "{r:?}");
        }
        let r = algebraic_identity_check(1.0, 2.0, 0.0, 1, 1).unwrap();
        assert!((r.rows[0].e_levels.powi(2) - 13.0 / 3.0).abs() < 1e-13);
        let r = algebraic_identity_check(1.0, 4.0, 0.1, 0, 1).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert!(r.all_pass());
    }

    fn ground(a: f64) -> SeriesSolution {
        let cfg = PhysicalConfig::new(1.0, 0.5, a, 0.0, 1, 0).unwrap();
        frobenius_coeffs(&truncation_params(&cfg).unwrap(), 4)
    }

    #[test]
    fn ground_family_nodes() {
        let scale = 0.5f64.sqrt();
        let wf = build_wavefunction(&ground(1.0), scale, &GridSpec::default()).unwrap();
        assert_eq!(wf.nodes, 0);
        assert_eq!(wf.polynomial_roots, 0);
        let wf = build_wavefunction(&ground(-1.0), scale, &GridSpec::default()).unwrap();
        assert_eq!(wf.nodes, 1);
        assert_eq!(wf.polynomial_roots, 1);
        // node at r = 1/√2, ρ = r / sqrt(ϖ) = 1
        let i = wf.values.windows(2).position(|w| w[0] > 0.0 && w[1] <= 0.0).unwrap();
        assert!((wf.grid[i] - 1.0).abs() <= wf.grid[1]);
    }

    #[test]
    fn normalization_is_grid_stable() {
        let s = ground(1.0);
        let scale = 0.5f64.sqrt();
        let coarse = build_wavefunction(&s, scale, &GridSpec::default()).unwrap();
        let fine = build_wavefunction(&s, scale, &GridSpec { rho_max: None, points: 8001 }).unwrap();
        let h = coarse.grid[1];
        let dens: Vec<f64> = coarse.values.iter().zip(&coarse.grid).map(|(f, x)| f * f * x).collect();
        assert!((simpson(&dens, h) - 1.0).abs() < 1e-8);
        assert!((coarse.norm_constant - fine.norm_constant).abs() < 1e-9 * coarse.norm_constant);
        // f(0) = norm · b₀ for l = 0
        assert_eq!(coarse.values[0], coarse.norm_constant);
    }

    #[test]
    fn centrifugal_zero_at_origin() {
        let cfg = PhysicalConfig::new(1.0, 0.5, 1.0, 0.0, 1, 2).unwrap();
        let omega = freq_case_a_n1(1.0, 1.0, 2).unwrap();
        let p = truncation_params(&cfg.with_omega(omega)).unwrap();
        let s = frobenius_coeffs(&p, 4);
        let wf = build_wavefunction(&s, p.varpi.sqrt(), &GridSpec::default()).unwrap();
        assert_eq!(wf.values[0], 0.0);
    }

    #[test]
    fn requires_polynomial() {
        let cfg = PhysicalConfig::new(1.0, 0.4, 1.0, 0.0, 1, 0).unwrap();
        let s = frobenius_coeffs(&truncation_params(&cfg).unwrap(), 4);
        assert_eq!(
            build_wavefunction(&s, 0.4f64.sqrt(), &GridSpec::default()),
            Err(Error::NotTruncated)
        );
    }
}
