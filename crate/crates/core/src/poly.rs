//! Dense real polynomials: Horner evaluation and Sturm-chain root isolation.

use serde::{Deserialize, Serialize};

/// `coeffs[k]` multiplies `x^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Polynomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Value, first and second derivative in one Horner pass.
    pub fn eval_with_derivatives(&self, x: f64) -> (f64, f64, f64) {
        let mut p = 0.0;
        let mut dp = 0.0;
        let mut ddp = 0.0;
        for &c in self.coeffs.iter().rev() {
            ddp = ddp * x + 2.0 * dp;
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp, ddp)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial::new(vec![0.0]);
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Remainder of `self / divisor`.
    fn rem(&self, divisor: &Polynomial) -> Polynomial {
        let mut r = self.coeffs.clone();
        let dd = divisor.degree();
        let lead = divisor.coeffs[dd];
        while r.len() > dd && r.len() > 1 {
            let shift = r.len() - 1 - dd;
            let q = r[r.len() - 1] / lead;
            for (i, &c) in divisor.coeffs.iter().enumerate() {
                r[i + shift] -= q * c;
            }
            r.pop();
        }
        if r.is_empty() {
            r.push(0.0);
        }
        Polynomial::new(r)
    }

    /// Sturm chain `p, p', -rem(p, p'), ...` with round-off level trailing
    /// terms dropped.
    fn sturm_chain(&self) -> Vec<Polynomial> {
        let scale = self.coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let k = chain.len();
            if chain[k - 1].degree() == 0 {
                break;
            }
            let mut r = chain[k - 2].rem(&chain[k - 1]);
            r.coeffs.iter_mut().for_each(|c| *c = -*c);
            let rs = r.coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
            if r.is_zero() || rs <= 1e-13 * scale {
                break;
            }
            chain.push(r);
        }
        chain
    }

    fn variations(values: impl Iterator<Item = f64>) -> usize {
        let mut last = 0.0f64;
        let mut count = 0;
        for v in values {
            if v == 0.0 {
                continue;
            }
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                count += 1;
            }
            last = v;
        }
        count
    }

    fn count_between(chain: &[Polynomial], lo: f64, hi: f64) -> usize {
        let at = |x: f64| Self::variations(chain.iter().map(|p| p.eval(x)));
        at(lo).saturating_sub(at(hi))
    }

    /// Number of distinct real roots in `(0, ∞)`.
    pub fn positive_root_count(&self) -> usize {
        if self.degree() == 0 {
            return 0;
        }
        let chain = self.sturm_chain();
        let at_zero = Self::variations(chain.iter().map(|p| p.coeffs[0]));
        let at_inf = Self::variations(chain.iter().map(|p| *p.coeffs.last().unwrap()));
        at_zero.saturating_sub(at_inf)
    }

    /// Cauchy bound on root magnitudes.
    pub fn root_bound(&self) -> f64 {
        let lead = *self.coeffs.last().unwrap();
        1.0 + self.coeffs[..self.degree()]
            .iter()
            .fold(0.0f64, |a, c| a.max((c / lead).abs()))
    }

    /// All distinct real roots in ascending order.
    pub fn real_roots(&self) -> Vec<f64> {
        if self.degree() == 0 {
            return Vec::new();
        }
        let chain = self.sturm_chain();
        let bound = self.root_bound();
        let mut roots = Vec::new();
        self.isolate(&chain, -bound, bound, &mut roots);
        roots
    }

    fn isolate(&self, chain: &[Polynomial], lo: f64, hi: f64, out: &mut Vec<f64>) {
        let count = Self::count_between(chain, lo, hi);
        if count == 0 {
            return;
        }
        let mid = 0.5 * (lo + hi);
        if count == 1 || hi - lo <= 1e-14 * lo.abs().max(hi.abs()).max(1e-300) {
            let r = self
                .bisect_sign_change(lo, hi)
                .unwrap_or_else(|| Self::bisect_sturm(chain, lo, hi));
            out.push(r);
            return;
        }
        self.isolate(chain, lo, mid, out);
        self.isolate(chain, mid, hi, out);
    }

    /// Single root in `(lo, hi]` located by Sturm counts alone.
    fn bisect_sturm(chain: &[Polynomial], mut lo: f64, mut hi: f64) -> f64 {
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return hi;
            }
            if Self::count_between(chain, lo, mid) > 0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    /// Root in `(lo, hi]` when the end values have strictly opposite signs
    /// or `hi` is itself a root.
    fn bisect_sign_change(&self, mut lo: f64, mut hi: f64) -> Option<f64> {
        let mut flo = self.eval(lo);
        let fhi = self.eval(hi);
        if fhi == 0.0 {
            return Some(hi);
        }
        if flo == 0.0 || (flo > 0.0) == (fhi > 0.0) {
            return None;
        }
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Some(mid);
            }
            let fm = self.eval(mid);
            if fm == 0.0 {
                return Some(mid);
            }
            if (fm > 0.0) == (flo > 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
    }
}
