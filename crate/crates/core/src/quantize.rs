//! Permitted oscillator frequencies.
//!
//! A degree-`n` polynomial solution needs both halves of the truncation
//! condition. The spectral half fixes the energy; the coefficient half
//! `b_{n+1} = 0` is an equation for the oscillator frequency itself, so only
//! discrete values of ω admit bound states of this form.

use serde::{Deserialize, Serialize};

use crate::cubic::MonicCubic;
use crate::error::{Error, Result};
use crate::params::{truncation_params, Case, PhysicalConfig, SignConvention};
use crate::poly::Polynomial;
use crate::series::{check_truncation, truncation_residual, DEFAULT_TRUNCATION_TOL};
use crate::tridiag::SymTridiagonal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootProvenance {
    ClosedForm,
    PolyRoot,
    CubicRoot,
    ScanRoot,
    /// Supplied by the caller for diagnostics; not a verified root.
    Forced,
}

impl RootProvenance {
    pub fn as_str(self) -> &'static str {
        match self {
            RootProvenance::ClosedForm => "closed_form",
            RootProvenance::PolyRoot => "poly_root",
            RootProvenance::CubicRoot => "cubic_root",
            RootProvenance::ScanRoot => "scan_root",
            RootProvenance::Forced => "forced",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PermittedFrequency {
    pub omega: f64,
    pub provenance: RootProvenance,
    /// Scaled `|b_{n+1}|` at this frequency.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizationResult {
    pub n: u32,
    pub l: i32,
    pub case: Case,
    pub convention: SignConvention,
    /// Ascending in omega.
    pub roots: Vec<PermittedFrequency>,
}

/// Log-spaced scan range for the general linear-potential search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub omega_min: Option<f64>,
    pub omega_max: Option<f64>,
    pub points: usize,
}

impl Default for ScanGrid {
    fn default() -> Self {
        ScanGrid {
            omega_min: None,
            omega_max: None,
            points: 4000,
        }
    }
}

impl ScanGrid {
    /// `[1e-4 χ/m, 1e4 max(a²/m, χ/m)]` unless overridden.
    pub fn bounds(&self, m: f64, a: f64, chi: f64) -> (f64, f64) {
        let lo = self.omega_min.unwrap_or(1e-4 * chi / m);
        let hi = self
            .omega_max
            .unwrap_or(1e4 * (a * a / m).max(chi / m));
        (lo, hi)
    }
}

fn check_inputs(m: f64, a: f64, chi: f64) -> Result<()> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::InvalidConfig(format!("m must be finite and > 0, got {m}")));
    }
    if !a.is_finite() {
        return Err(Error::InvalidConfig(format!("a must be finite, got {a}")));
    }
    if !(chi.is_finite() && chi >= 0.0) {
        return Err(Error::InvalidConfig(format!("chi must be finite and >= 0, got {chi}")));
    }
    Ok(())
}

fn check_degree(n: u32) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidConfig("n must be >= 1".into()));
    }
    Ok(())
}

/// Lowest-mode permitted frequency of the Coulomb-only problem,
/// `ω = a² / (2m(2|l|+1))`.
pub fn freq_case_a_n1(m: f64, a: f64, l: i32) -> Result<f64> {
    check_inputs(m, a, 0.0)?;
    if a == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    let two_l1 = (2 * l.unsigned_abs() + 1) as f64;
    Ok(a * a / (2.0 * m * two_l1))
}

/// Jacobi matrix whose eigenvalues are the signed Coulomb parameters `c`
/// for which the `chi = 0` series terminates at degree `n`.
///
/// With `mu = 2n + 2|l| + 2` the recurrence reads
/// `c b_j = (j+1)(j+1+2|l|) b_{j+1} + 2(n-j+1) b_{j-1}` for `j = 0..n`, with
/// `b_{n+1} = 0`. The off-diagonal products are positive, so the diagonal
/// similarity transform to symmetric form exists and all `n + 1`
/// eigenvalues are real, simple, and symmetric about zero.
pub fn coulomb_jacobi(abs_l: u32, n: u32) -> SymTridiagonal {
    let l = abs_l as f64;
    let nf = n as f64;
    let off = (0..n)
        .map(|j| {
            let j = j as f64;
            ((j + 1.0) * (j + 1.0 + 2.0 * l) * 2.0 * (nf - j)).sqrt()
        })
        .collect();
    SymTridiagonal::new(vec![0.0; n as usize + 1], off)
}

/// `b_{n+1}` of the `chi = 0` series at `mu = 2n + 2|l| + 2`, as a
/// polynomial of degree `n + 1` in the signed Coulomb parameter.
pub fn truncation_polynomial(abs_l: u32, n: u32) -> Polynomial {
    let l = abs_l as f64;
    let nf = n as f64;
    // b[k] as coefficient vectors in c
    let mut b: Vec<Vec<f64>> = vec![vec![1.0], vec![0.0, 1.0 / (2.0 * l + 1.0)]];
    for k in 0..n as usize {
        let kf = k as f64;
        let den = (kf + 2.0) * (kf + 2.0 + 2.0 * l);
        let mut next = vec![0.0; k + 3];
        for (i, &x) in b[k + 1].iter().enumerate() {
            next[i + 1] += x / den;
        }
        for (i, &x) in b[k].iter().enumerate() {
            next[i] -= 2.0 * (nf - kf) * x / den;
        }
        b.push(next);
    }
    Polynomial::new(b[n as usize + 1].clone())
}

/// `b_{n+1}` and its derivative in `c` at `delta = 0`, `mu = 2n + 2|l| + 2`.
fn coulomb_residual_with_slope(abs_l: u32, n: u32, c: f64) -> (f64, f64) {
    let l = abs_l as f64;
    let nf = n as f64;
    let (mut b0, mut b1) = (1.0, c / (2.0 * l + 1.0));
    let (mut d0, mut d1) = (0.0, 1.0 / (2.0 * l + 1.0));
    for k in 0..n as usize {
        let kf = k as f64;
        let den = (kf + 2.0) * (kf + 2.0 + 2.0 * l);
        let h = 2.0 * (nf - kf);
        let b2 = (c * b1 - h * b0) / den;
        let d2 = (b1 + c * d1 - h * d0) / den;
        b0 = b1;
        b1 = b2;
        d0 = d1;
        d1 = d2;
    }
    (b1, d1)
}

fn newton_polish(abs_l: u32, n: u32, mut c: f64) -> f64 {
    let (mut f, _) = coulomb_residual_with_slope(abs_l, n, c);
    for _ in 0..4 {
        let (_, df) = coulomb_residual_with_slope(abs_l, n, c);
        if df == 0.0 || f == 0.0 {
            break;
        }
        let next = c - f / df;
        let (fnext, _) = coulomb_residual_with_slope(abs_l, n, next);
        if !(fnext.abs() < f.abs()) {
            break;
        }
        c = next;
        f = fnext;
    }
    c
}

fn verify(cfg: &PhysicalConfig, provenance: RootProvenance, tol: f64) -> Option<PermittedFrequency> {
    let p = truncation_params(cfg).ok()?;
    if !check_truncation(&p, cfg.n, tol) {
        return None;
    }
    Some(PermittedFrequency {
        omega: cfg.omega,
        provenance,
        residual: truncation_residual(&p, cfg.n),
    })
}

fn sorted(mut roots: Vec<PermittedFrequency>) -> Vec<PermittedFrequency> {
    roots.sort_by(|x, y| x.omega.partial_cmp(&y.omega).unwrap());
    roots
}

/// All permitted frequencies of the Coulomb-only problem at degree `n`.
///
/// Roots of `b_{n+1}(α)` come from the Jacobi matrix of [`coulomb_jacobi`]
/// and are polished by Newton's method on the recurrence. Only roots with
/// `sign(α) = sign(a)` are physical; each maps to `ω = a²/(m α²)`.
pub fn freq_case_a_general(
    m: f64,
    a: f64,
    l: i32,
    n: u32,
    convention: SignConvention,
) -> Result<QuantizationResult> {
    case_a_general(m, a, l, n, convention, DEFAULT_TRUNCATION_TOL)
}

fn case_a_general(
    m: f64,
    a: f64,
    l: i32,
    n: u32,
    convention: SignConvention,
    tol: f64,
) -> Result<QuantizationResult> {
    check_inputs(m, a, 0.0)?;
    check_degree(n)?;
    if a == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    let abs_l = l.unsigned_abs();
    let jacobi = coulomb_jacobi(abs_l, n);
    let eigs = jacobi.lowest(jacobi.dim());
    let radius = eigs.iter().fold(0.0f64, |r, c| r.max(c.abs()));
    let mut roots = Vec::new();
    for c in eigs {
        // the spectrum is symmetric; even n carries an exact zero, which
        // would need an infinite frequency
        if c.abs() <= 1e-8 * radius {
            continue;
        }
        let c = newton_polish(abs_l, n, c);
        let alpha = convention.sign() * c;
        if (alpha > 0.0) != (a > 0.0) {
            continue;
        }
        let omega = a * a / (m * alpha * alpha);
        let cfg = PhysicalConfig::new(m, omega, a, 0.0, n, l)?.with_convention(convention);
        if let Some(root) = verify(&cfg, RootProvenance::PolyRoot, tol) {
            roots.push(root);
        }
    }
    if roots.is_empty() {
        return Err(Error::NoPhysicalRoot {
            max_real_root: None,
            chi: None,
        });
    }
    Ok(QuantizationResult {
        n,
        l,
        case: Case::A,
        convention,
        roots: sorted(roots),
    })
}

/// Lowest-mode frequency condition with a linear potential, as a cubic in
/// `s = sqrt(m²ω² + χ²)`:
///
/// ```text
/// s³ - A s² ∓ B s - C = 0
/// A = a² / (2(2|l|+1)),  B = 2mχa(|l|+1)/(2|l|+1),  C = m²χ²(2|l|+3)/2
/// ```
///
/// The linear term is `+B s` under [`SignConvention::Printed`] and `-B s`
/// under [`SignConvention::Derived`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyCubic {
    pub quad: f64,
    pub lin: f64,
    pub constant: f64,
    pub discriminant: f64,
    /// All real roots, ascending.
    pub real_roots: Vec<f64>,
    /// Real roots with `s > chi`.
    pub physical_roots: Vec<f64>,
}

impl FrequencyCubic {
    pub fn new(m: f64, a: f64, chi: f64, l: i32, convention: SignConvention) -> Self {
        let abs_l = l.unsigned_abs() as f64;
        let two_l1 = 2.0 * abs_l + 1.0;
        let quad = a * a / (2.0 * two_l1);
        let lin = -convention.sign() * 2.0 * m * chi * a * (abs_l + 1.0) / two_l1;
        let constant = m * m * chi * chi * (2.0 * abs_l + 3.0) / 2.0;
        let cubic = MonicCubic::new(-quad, lin, -constant);
        let real_roots = cubic.real_roots();
        let physical_roots = real_roots.iter().copied().filter(|&s| s > chi).collect();
        FrequencyCubic {
            quad,
            lin,
            constant,
            discriminant: cubic.discriminant(),
            real_roots,
            physical_roots,
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        ((s - self.quad) * s + self.lin) * s - self.constant
    }

    /// `max(1, A s², |B| s, C)`.
    pub fn residual_scale(&self, s: f64) -> f64 {
        1.0f64
            .max(self.quad * s * s)
            .max((self.lin * s).abs())
            .max(self.constant)
    }
}

/// Lowest-mode permitted frequencies with a linear potential, from the cubic.
pub fn freq_case_b_n1(
    m: f64,
    a: f64,
    chi: f64,
    l: i32,
    convention: SignConvention,
) -> Result<QuantizationResult> {
    case_b_n1(m, a, chi, l, convention, DEFAULT_TRUNCATION_TOL)
}

fn case_b_n1(
    m: f64,
    a: f64,
    chi: f64,
    l: i32,
    convention: SignConvention,
    tol: f64,
) -> Result<QuantizationResult> {
    check_inputs(m, a, chi)?;
    if chi == 0.0 {
        return Err(Error::InvalidConfig("the linear-potential problem needs chi > 0".into()));
    }
    let cubic = FrequencyCubic::new(m, a, chi, l, convention);
    let mut roots = Vec::new();
    for &s in &cubic.physical_roots {
        let omega = (s * s - chi * chi).sqrt() / m;
        if !(omega > 0.0) {
            continue;
        }
        let cfg = PhysicalConfig::new(m, omega, a, chi, 1, l)?.with_convention(convention);
        if let Some(root) = verify(&cfg, RootProvenance::CubicRoot, tol) {
            roots.push(root);
        }
    }
    if roots.is_empty() {
        return Err(Error::NoPhysicalRoot {
            max_real_root: cubic.real_roots.last().copied(),
            chi: Some(chi),
        });
    }
    Ok(QuantizationResult {
        n: 1,
        l,
        case: Case::B,
        convention,
        roots: sorted(roots),
    })
}

/// Scaled `b_{n+1}` as a function of ω with the spectral condition imposed.
fn scan_residual(cfg: &PhysicalConfig) -> Option<f64> {
    let p = truncation_params(cfg).ok()?;
    let n = cfg.n as usize;
    let b = crate::series::coefficients(&p, n + 2);
    Some(b[n + 1])
}

/// Permitted frequencies with a linear potential at any degree, by a
/// log-spaced sign-change scan of `b_{n+1}(ω)` and bisection.
pub fn freq_case_b_general(
    m: f64,
    a: f64,
    chi: f64,
    l: i32,
    n: u32,
    scan: &ScanGrid,
    convention: SignConvention,
) -> Result<QuantizationResult> {
    case_b_general(m, a, chi, l, n, scan, convention, DEFAULT_TRUNCATION_TOL)
}

#[allow(clippy::too_many_arguments)]
fn case_b_general(
    m: f64,
    a: f64,
    chi: f64,
    l: i32,
    n: u32,
    scan: &ScanGrid,
    convention: SignConvention,
    tol: f64,
) -> Result<QuantizationResult> {
    check_inputs(m, a, chi)?;
    check_degree(n)?;
    if chi == 0.0 {
        return Err(Error::InvalidConfig("the linear-potential problem needs chi > 0".into()));
    }
    let (lo, hi) = scan.bounds(m, a, chi);
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || scan.points < 2 {
        return Err(Error::InvalidConfig(format!(
            "scan range must satisfy 0 < omega_min < omega_max with >= 2 points, got [{lo}, {hi}] x {}",
            scan.points
        )));
    }
    let base = PhysicalConfig::new(m, lo, a, chi, n, l)?.with_convention(convention);
    let f = |omega: f64| scan_residual(&base.with_omega(omega)).unwrap_or(f64::NAN);

    let ratio = (hi / lo).ln() / (scan.points - 1) as f64;
    let grid: Vec<f64> = (0..scan.points)
        .map(|i| if i + 1 == scan.points { hi } else { lo * (ratio * i as f64).exp() })
        .collect();
    let values: Vec<f64> = grid.iter().map(|&w| f(w)).collect();

    let mut candidates = Vec::new();
    let mut brackets = 0;
    for i in 0..grid.len() {
        if values[i] == 0.0 {
            candidates.push(grid[i]);
            brackets += 1;
            continue;
        }
        if i + 1 < grid.len() && values[i + 1] != 0.0 && (values[i] > 0.0) != (values[i + 1] > 0.0) {
            brackets += 1;
            candidates.push(bisect(&f, grid[i], grid[i + 1], values[i]));
        }
    }
    if brackets == 0 {
        return Err(Error::BracketExhausted {
            omega_min: lo,
            omega_max: hi,
        });
    }
    let roots: Vec<PermittedFrequency> = candidates
        .into_iter()
        .filter_map(|omega| verify(&base.with_omega(omega), RootProvenance::ScanRoot, tol))
        .collect();
    if roots.is_empty() {
        return Err(Error::NoPhysicalRoot {
            max_real_root: None,
            chi: None,
        });
    }
    Ok(QuantizationResult {
        n,
        l,
        case: Case::B,
        convention,
        roots: sorted(roots),
    })
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut flo: f64) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
}

/// Everything needed to ask for the permitted frequencies of one `(n, l)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyQuery {
    pub m: f64,
    pub a: f64,
    pub chi: f64,
    pub n: u32,
    pub l: i32,
    pub convention: SignConvention,
    pub tol: f64,
    pub scan: ScanGrid,
}

impl FrequencyQuery {
    pub fn new(m: f64, a: f64, chi: f64, n: u32, l: i32) -> Self {
        FrequencyQuery {
            m,
            a,
            chi,
            n,
            l,
            convention: SignConvention::default_for(Case::for_chi(chi)),
            tol: DEFAULT_TRUNCATION_TOL,
            scan: ScanGrid::default(),
        }
    }
}

/// Dispatches to the closed form, Jacobi-matrix, cubic or scan solver.
pub fn permitted_frequencies(q: &FrequencyQuery) -> Result<QuantizationResult> {
    check_inputs(q.m, q.a, q.chi)?;
    check_degree(q.n)?;
    if !(q.tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tolerance must be > 0, got {}", q.tol)));
    }
    match (Case::for_chi(q.chi), q.n) {
        (Case::A, 1) => {
            let omega = freq_case_a_n1(q.m, q.a, q.l)?;
            let cfg = PhysicalConfig::new(q.m, omega, q.a, 0.0, 1, q.l)?.with_convention(q.convention);
            let root = verify(&cfg, RootProvenance::ClosedForm, q.tol).ok_or(Error::NoPhysicalRoot {
                max_real_root: None,
                chi: None,
            })?;
            Ok(QuantizationResult {
                n: 1,
                l: q.l,
                case: Case::A,
                convention: q.convention,
                roots: vec![root],
            })
        }
        (Case::A, n) => case_a_general(q.m, q.a, q.l, n, q.convention, q.tol),
        (Case::B, 1) => case_b_n1(q.m, q.a, q.chi, q.l, q.convention, q.tol),
        (Case::B, n) => case_b_general(q.m, q.a, q.chi, q.l, n, &q.scan, q.convention, q.tol),
    }
}
