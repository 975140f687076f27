//! Real roots of monic cubics: discriminant classification, closed-form
//! seeds, Newton polishing.

use std::f64::consts::PI;

/// `s³ + c2 s² + c1 s + c0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonicCubic {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootStructure {
    ThreeDistinct,
    OneReal,
    Repeated,
}

impl MonicCubic {
    pub fn new(c2: f64, c1: f64, c0: f64) -> Self {
        MonicCubic { c2, c1, c0 }
    }

    pub fn eval(&self, s: f64) -> f64 {
        ((s + self.c2) * s + self.c1) * s + self.c0
    }

    fn deriv(&self, s: f64) -> f64 {
        (3.0 * s + 2.0 * self.c2) * s + self.c1
    }

    pub fn discriminant(&self) -> f64 {
        let (b, c, d) = (self.c2, self.c1, self.c0);
        18.0 * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * c * c * c - 27.0 * d * d
    }

    /// Largest term magnitude at `s`, the natural scale for residuals.
    pub fn term_scale(&self, s: f64) -> f64 {
        (s * s * s)
            .abs()
            .max((self.c2 * s * s).abs())
            .max((self.c1 * s).abs())
            .max(self.c0.abs())
            .max(1.0)
    }

    pub fn classify(&self) -> RootStructure {
        let disc = self.discriminant();
        // discriminant terms are sixth order in the root scale
        let scale = [self.c2.abs(), self.c1.abs().sqrt(), self.c0.abs().cbrt()]
            .into_iter()
            .fold(0.0f64, f64::max);
        let noise = 64.0 * f64::EPSILON * scale.powi(6);
        if disc.abs() <= noise {
            RootStructure::Repeated
        } else if disc > 0.0 {
            RootStructure::ThreeDistinct
        } else {
            RootStructure::OneReal
        }
    }

    /// Distinct real roots, ascending, each polished by Newton's method.
    pub fn real_roots(&self) -> Vec<f64> {
        let shift = self.c2 / 3.0;
        // depressed cubic t³ + p t + q with s = t - c2/3
        let p = self.c1 - self.c2 * self.c2 / 3.0;
        let q = 2.0 * self.c2.powi(3) / 27.0 - self.c2 * self.c1 / 3.0 + self.c0;
        let seeds: Vec<f64> = match self.classify() {
            RootStructure::ThreeDistinct => {
                let r = 2.0 * (-p / 3.0).sqrt();
                let arg = (3.0 * q / (p * r)).clamp(-1.0, 1.0);
                let phi = arg.acos() / 3.0;
                (0..3)
                    .map(|k| r * (phi - 2.0 * PI * k as f64 / 3.0).cos() - shift)
                    .collect()
            }
            RootStructure::OneReal => {
                let disc = (q * q / 4.0 + p * p * p / 27.0).max(0.0).sqrt();
                let t = (-q / 2.0 + disc).cbrt() + (-q / 2.0 - disc).cbrt();
                vec![t - shift]
            }
            RootStructure::Repeated => {
                if p.abs() <= f64::EPSILON * (self.c2 * self.c2).max(1.0) {
                    vec![-shift]
                } else {
                    vec![3.0 * q / p - shift, -1.5 * q / p - shift]
                }
            }
        };
        let mut roots: Vec<f64> = seeds.into_iter().map(|s| self.polish(s)).collect();
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300));
        roots
    }

    fn polish(&self, mut s: f64) -> f64 {
        let mut f = self.eval(s);
        for _ in 0..60 {
            let d = self.deriv(s);
            if d == 0.0 || f == 0.0 {
                break;
            }
            let next = s - f / d;
            let fn_ = self.eval(next);
            if !(fn_.abs() < f.abs()) {
                break;
            }
            s = next;
            f = fn_;
        }
        s
    }
}
