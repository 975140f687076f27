//! Frobenius series of the biconfluent Heun equation
//!
//! ```text
//! F'' + [(2|l|+1)/ζ - δ - 2ζ] F' + [μ̄ + δ²/4 - 2|l| - 2 - (2c + δ(2|l|+1))/(2ζ)] F = 0
//! ```
//!
//! where `c` is the signed Coulomb parameter of [`HeunParams::coulomb`].
//! With `F = Σ b_k ζ^k` and `b₀ = 1`:
//!
//! ```text
//! b₁      = [δ(2|l|+1) + 2c] / (2(2|l|+1))
//! b_{k+2} = {[δ(2k+2|l|+3) + 2c] b_{k+1} - (2μ̄ + δ²/2 - 4|l| - 4 - 4k) b_k}
//!           / (2(k+2)(k+2+2|l|))
//! ```
//!
//! The series terminates at degree `n` when `μ̄ + δ²/4 - 2|l| - 2 = 2n` and
//! `b_{n+1} = 0`: the `b_n` multiplier then vanishes at `k = n` and every
//! later coefficient is zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::HeunParams;
use crate::poly::Polynomial;

pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-12;

/// Coefficients beyond `b_{n+1}` that must also vanish for a truncation to
/// count.
pub const TAIL_CHECK: usize = 8;

const EVAL_REL_TOL: f64 = 1e-15;
const MAX_TERMS: usize = 5000;
const MIN_TERMS: usize = 12;
const WINDOW: usize = 10;
const MAX_CANCELLATION: f64 = 1e8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSolution {
    pub coeffs: Vec<f64>,
    pub abs_l: u32,
    pub params: HeunParams,
    /// Polynomial degree when the series terminates.
    pub truncated_at: Option<u32>,
    /// Largest `|b_k|` past the truncation degree, before zeroing.
    pub tail_max: f64,
}

impl SeriesSolution {
    pub fn polynomial(&self) -> Option<Polynomial> {
        self.truncated_at
            .map(|n| Polynomial::new(self.coeffs[..=n as usize].to_vec()))
    }

    pub fn is_polynomial(&self) -> bool {
        self.truncated_at.is_some()
    }
}

fn first_coeff(p: &HeunParams) -> f64 {
    let two_l1 = (2 * p.abs_l + 1) as f64;
    (p.delta * two_l1 + 2.0 * p.coulomb()) / (2.0 * two_l1)
}

/// `b_{k+2}` from `b_k` and `b_{k+1}`.
fn next_coeff(p: &HeunParams, k: usize, b_k: f64, b_k1: f64) -> f64 {
    let l = p.abs_l as f64;
    let kf = k as f64;
    let lin = p.delta * (2.0 * kf + 2.0 * l + 3.0) + 2.0 * p.coulomb();
    let h = 2.0 * p.spectral_excess() - 4.0 * kf;
    let den = 2.0 * (kf + 2.0) * (kf + 2.0 + 2.0 * l);
    (lin * b_k1 - h * b_k) / den
}

/// Raw coefficients `b₀ .. b_{count-1}`, no truncation applied.
pub fn coefficients(p: &HeunParams, count: usize) -> Vec<f64> {
    let mut b = Vec::with_capacity(count.max(2));
    b.push(1.0);
    b.push(first_coeff(p));
    while b.len() < count {
        let k = b.len() - 2;
        b.push(next_coeff(p, k, b[k], b[k + 1]));
    }
    b.truncate(count);
    b
}

/// Coefficients `b₀ .. b_order` with truncation detection.
///
/// If the parameters satisfy the degree-`n` truncation condition the
/// returned coefficients past `b_n` are exactly zero and `truncated_at`
/// records `n`.
pub fn frobenius_coeffs(p: &HeunParams, order: usize) -> SeriesSolution {
    assert!(order >= 2, "need at least b₀..b₂");
    let n_est = (p.spectral_excess() / 2.0).round();
    let truncated_at = if n_est >= 1.0 && n_est < u32::MAX as f64 {
        let n = n_est as u32;
        check_truncation(p, n, DEFAULT_TRUNCATION_TOL).then_some(n)
    } else {
        None
    };

    match truncated_at {
        Some(n) => {
            let n = n as usize;
            let mut coeffs = coefficients(p, (order + 1).max(n + 2 + TAIL_CHECK));
            let tail_max = coeffs[n + 1..].iter().fold(0.0f64, |a, b| a.max(b.abs()));
            coeffs.truncate((order + 1).max(n + 1));
            coeffs[n + 1..].iter_mut().for_each(|b| *b = 0.0);
            SeriesSolution {
                coeffs,
                abs_l: p.abs_l,
                params: *p,
                truncated_at: Some(n as u32),
                tail_max,
            }
        }
        None => {
            let coeffs = coefficients(p, order + 1);
            SeriesSolution {
                tail_max: 0.0,
                coeffs,
                abs_l: p.abs_l,
                params: *p,
                truncated_at: None,
            }
        }
    }
}

/// Scaled size of `b_{n+1}`: `|b_{n+1}| / max(1, max_{k≤n} |b_k|)`.
pub fn truncation_residual(p: &HeunParams, n: u32) -> f64 {
    let n = n as usize;
    let b = coefficients(p, n + 2);
    let scale = b[..=n].iter().fold(1.0f64, |a, x| a.max(x.abs()));
    b[n + 1].abs() / scale
}

/// Whether the series is a polynomial of degree `n` within `tol`.
///
/// Requires the spectral condition `μ̄ + δ²/4 - 2|l| - 2 = 2n`, a vanishing
/// `b_{n+1}` and a vanishing tail `b_{n+2} .. b_{n+8}`, all relative to the
/// coefficient scale `max(1, max_{k≤n} |b_k|)`.
pub fn check_truncation(p: &HeunParams, n: u32, tol: f64) -> bool {
    assert!(n >= 1, "truncation degree must be >= 1");
    let excess = p.spectral_excess();
    let spectral_scale = 1.0f64
        .max(p.mu_bar.abs())
        .max(p.delta * p.delta / 4.0)
        .max((2 * p.abs_l + 2) as f64);
    if !((excess - 2.0 * n as f64).abs() <= tol * spectral_scale) {
        return false;
    }
    let n = n as usize;
    let b = coefficients(p, n + 1 + TAIL_CHECK + 1);
    let scale = b[..=n].iter().fold(1.0f64, |a, x| a.max(x.abs()));
    b[n + 1..].iter().all(|x| x.abs() <= tol * scale)
}

/// `F(r) = Σ b_k r^k`.
///
/// Polynomial solutions are evaluated exactly by Horner's rule. Otherwise
/// the series is summed to the order where the last ten terms decay
/// geometrically and the extrapolated tail is negligible; the summation
/// itself is then done by Horner's rule over that order.
pub fn eval_series(s: &SeriesSolution, r: f64) -> Result<f64> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidConfig(format!("series argument must be finite and >= 0, got {r}")));
    }
    if let Some(poly) = s.polynomial() {
        return Ok(poly.eval(r));
    }
    if r == 0.0 {
        return Ok(s.coeffs[0]);
    }

    let mut b = s.coeffs.clone();
    let mut power = 1.0;
    let mut abs_sum = 0.0;
    let mut terms: Vec<f64> = Vec::new();
    let mut order = None;
    for k in 0..MAX_TERMS {
        if k >= b.len() {
            let next = next_coeff(&s.params, k - 2, b[k - 2], b[k - 1]);
            b.push(next);
        }
        let t = b[k] * power;
        if !t.is_finite() {
            return Err(Error::ConvergenceFailure {
                r,
                detail: format!("term {k} overflowed"),
            });
        }
        terms.push(t.abs());
        abs_sum += t.abs();
        power *= r;
        if k + 1 >= MIN_TERMS.max(WINDOW + 1) && tail_negligible(&terms, abs_sum) {
            order = Some(k);
            break;
        }
    }
    let Some(order) = order else {
        return Err(Error::ConvergenceFailure {
            r,
            detail: format!("no geometric decay within {MAX_TERMS} terms"),
        });
    };

    let value = b[..=order].iter().rev().fold(0.0, |acc, &c| acc * r + c);
    if abs_sum > MAX_CANCELLATION * value.abs() {
        return Err(Error::ConvergenceFailure {
            r,
            detail: format!(
                "cancellation: sum of |terms| {abs_sum:e} vs value {value:e}"
            ),
        });
    }
    Ok(value)
}

// Envelope w_k = max(|t_k|, |t_{k-1}|) tolerates zero odd or even terms.
fn tail_negligible(terms: &[f64], abs_sum: f64) -> bool {
    let k = terms.len() - 1;
    let envelope = |j: usize| terms[j].max(terms[j - 1]);
    let window: Vec<f64> = (k + 1 - WINDOW..=k).map(envelope).collect();
    let last = window[WINDOW - 1];
    if last == 0.0 {
        return window.iter().all(|&w| w == 0.0);
    }
    if window.windows(2).any(|w| w[1] > w[0]) {
        return false;
    }
    let q = (last / window[0]).powf(1.0 / (WINDOW - 1) as f64);
    if !(q < 1.0) {
        return false;
    }
    let tail = 2.0 * last * q / (1.0 - q);
    tail <= EVAL_REL_TOL * abs_sum
}

/// `f(r) = r^|l| e^{-r²/2} e^{-δ r/2} F(r)` in the dimensionless variable.
pub fn eval_radial(s: &SeriesSolution, r: f64) -> Result<f64> {
    let f = eval_series(s, r)?;
    let envelope = (-0.5 * r * r - 0.5 * s.params.delta * r).exp();
    Ok(r.powi(s.abs_l as i32) * envelope * f)
}

/// Residual of the biconfluent Heun equation for the given `F, F', F''`.
pub fn ode_residual(p: &HeunParams, r: f64, f: f64, df: f64, ddf: f64) -> f64 {
    let l = p.abs_l as f64;
    let drift = (2.0 * l + 1.0) / r - p.delta - 2.0 * r;
    let pot = p.spectral_excess() - (2.0 * p.coulomb() + p.delta * (2.0 * l + 1.0)) / (2.0 * r);
    ddf + drift * df + pot * f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SignConvention;

    fn hp(abs_l: u32, c: f64, delta: f64, mu_bar: f64) -> HeunParams {
        HeunParams {
            abs_l,
            alpha_or_theta: c,
            delta,
            mu_bar,
            varpi: 1.0,
            convention: SignConvention::Derived,
        }
    }

    #[test]
    fn ground_state_series_terminates() {
        let s = frobenius_coeffs(&hp(0, 2f64.sqrt(), 0.0, 4.0), 6);
        assert_eq!(s.coeffs.len(), 7);
        assert_eq!(s.coeffs[0], 1.0);
        assert!((s.coeffs[1] - 2f64.sqrt()).abs() < 1e-15);
        assert!(s.coeffs[2..].iter().all(|&b| b == 0.0));
        assert_eq!(s.truncated_at, Some(1));
        assert!(s.tail_max < 1e-15);
    }

    #[test]
    fn odd_coefficients_vanish_without_coulomb_term() {
        let b = coefficients(&hp(0, 0.0, 0.0, 3.3), 12);
        for k in (1..12).step_by(2) {
            assert_eq!(b[k], 0.0);
        }
    }

    #[test]
    fn hand_iterated_l1_example() {
        // b1 = 1/3, b2 = [1·(1/3) - (0 - 4)·1] / (2·4) = 13/24
        let b = coefficients(&hp(1, 1.0, 0.0, 0.0), 3);
        assert!((b[1] - 1.0 / 3.0).abs() < 1e-16);
        assert!((b[2] - 13.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn printed_convention_flips_odd_coefficients() {
        let mut p = hp(2, 0.7, 0.0, 3.1);
        let d = coefficients(&p, 15);
        p.convention = SignConvention::Printed;
        let q = coefficients(&p, 15);
        for k in 0..15 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((q[k] - sign * d[k]).abs() <= 1e-15 * d[k].abs().max(1e-300));
        }
    }

    #[test]
    fn truncation_check_examples() {
        assert!(check_truncation(&hp(0, 2f64.sqrt(), 0.0, 4.0), 1, 1e-12));
        // b₂ = (1 - 2)/4
        assert!(!check_truncation(&hp(0, 1.0, 0.0, 4.0), 1, 1e-12));
        assert!((truncation_residual(&hp(0, 1.0, 0.0, 4.0), 1) - 0.25).abs() < 1e-15);
        // pure oscillator, degree 2: mu = 2n + 2
        let p = hp(0, 0.0, 0.0, 6.0);
        assert!(check_truncation(&p, 2, 1e-12));
        let b = coefficients(&p, 8);
        assert_eq!(b[1], 0.0);
        assert_eq!(b[3], 0.0);
        assert_eq!(b[4], 0.0);
        // spectral condition violated
        assert!(!check_truncation(&hp(0, 2f64.sqrt(), 0.0, 4.1), 1, 1e-12));
    }

    #[test]
    fn rational_truncation_point_closes_exactly() {
        // |l| = 0, δ = 1, c = 1/2: (3δ + 2c)(δ + 2c) = 8, μ̄ = 4 - 1/4
        let p = hp(0, 0.5, 1.0, 3.75);
        let b = coefficients(&p, 30);
        assert_eq!(b[1], 1.0);
        assert!(b[2..].iter().all(|&x| x.abs() < 1e-14));
        assert!(check_truncation(&p, 1, 1e-14));
    }

    #[test]
    fn eval_examples() {
        let s = frobenius_coeffs(&hp(0, 2f64.sqrt(), 0.0, 4.0), 4);
        assert_eq!(eval_series(&s, 0.0).unwrap(), 1.0);
        assert!((eval_series(&s, 2.0).unwrap() - (1.0 + 2.0 * 2f64.sqrt())).abs() < 1e-14);
        let f1 = eval_radial(&s, 1.0).unwrap();
        assert!((f1 - (-0.5f64).exp() * (1.0 + 2f64.sqrt())).abs() < 1e-14);
        assert!((f1 - 1.4642945).abs() < 1e-7);
    }

    #[test]
    fn radial_vanishes_at_origin_for_nonzero_l() {
        let p = hp(2, 0.0, 0.0, 10.0);
        let s = frobenius_coeffs(&p, 6);
        assert_eq!(s.truncated_at, Some(2));
        assert_eq!(eval_radial(&s, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn radial_tail_decays() {
        let s = frobenius_coeffs(&hp(0, 2f64.sqrt(), 0.0, 4.0), 4);
        let mut prev = f64::INFINITY;
        for i in 0..60 {
            let r = 1.0 + 0.25 * i as f64;
            let f = eval_radial(&s, r).unwrap();
            assert!(f >= 0.0 && f < prev);
            prev = f;
        }
        assert!(eval_radial(&s, 40.0).unwrap() < 1e-300);
    }

    #[test]
    fn non_truncating_series_converges_moderately() {
        let s = frobenius_coeffs(&hp(0, 1.0, 0.0, 1.0), 10);
        assert!(s.truncated_at.is_none());
        let v = eval_series(&s, 0.5).unwrap();
        // partial sums by brute force with many terms
        let b = coefficients(&s.params, 200);
        let brute: f64 = b.iter().enumerate().map(|(k, c)| c * 0.5f64.powi(k as i32)).sum();
        assert!((v - brute).abs() < 1e-14 * brute.abs());
    }

    #[test]
    fn rejects_negative_argument() {
        let s = frobenius_coeffs(&hp(0, 1.0, 0.0, 1.0), 10);
        assert!(eval_series(&s, -1.0).is_err());
        assert!(eval_series(&s, f64::NAN).is_err());
    }

    #[test]
    fn polynomial_solves_the_ode() {
        let p = hp(0, 0.5, 1.0, 3.75);
        let s = frobenius_coeffs(&p, 4);
        let poly = s.polynomial().unwrap();
        for i in 0..20 {
            let r = 0.1 + 0.1 * i as f64;
            let (f, df, ddf) = poly.eval_with_derivatives(r);
            assert!(ode_residual(&p, r, f, df, ddf).abs() < 1e-13);
        }
    }
}
