//! Physical inputs and the dimensionless biconfluent Heun parameters.
//!
//! Both problems share one parameterization. With `varpi = sqrt(m²ω² + χ²)`
//! and the radial variable `ζ = sqrt(varpi)·ρ`:
//!
//! ```text
//! theta = a / sqrt(varpi)
//! delta = 2 m chi / varpi^(3/2)
//! mu_bar = (E² - m² + m ω) / varpi
//! ```
//!
//! At `chi = 0` these are exactly the Coulomb-only quantities
//! `alpha = a / sqrt(m ω)`, `delta = 0`, `mu = (E² - m² + m ω)/(m ω)`.
//! The background constants g, λ, B₀, κ only ever appear through the
//! product `a = g·λ·B₀·κ`, which is what [`PhysicalConfig`] stores.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coulomb-only (`chi = 0`) or Coulomb plus linear scalar potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    A,
    B,
}

impl Case {
    pub fn for_chi(chi: f64) -> Case {
        if chi == 0.0 {
            Case::A
        } else {
            Case::B
        }
    }
}

/// Sign with which the Coulomb-type parameter enters the Frobenius relations.
///
/// `Derived` is the recurrence obtained by substituting the power series
/// into the biconfluent Heun equation with a `-(2θ + δ(2|l|+1))/(2ζ)` term;
/// at `delta = 0` it is `b₁ = α/(2|l|+1)`. `Printed` flips the sign of
/// the `θ` terms (`b₁ = [δ(2|l|+1) - 2θ] / (2(2|l|+1))`), which is the same
/// recurrence for the Coulomb term of opposite sign. Frequencies of the
/// Coulomb-only problem are identical under both; the linear-potential cubic
/// changes the sign of its linear term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignConvention {
    Derived,
    Printed,
}

impl SignConvention {
    /// `Derived` for the Coulomb-only problem, `Printed` once `chi > 0`.
    pub fn default_for(case: Case) -> SignConvention {
        match case {
            Case::A => SignConvention::Derived,
            Case::B => SignConvention::Printed,
        }
    }

    /// Multiplier mapping `theta` to the signed series parameter.
    pub fn sign(self) -> f64 {
        match self {
            SignConvention::Derived => 1.0,
            SignConvention::Printed => -1.0,
        }
    }

    pub fn flipped(self) -> SignConvention {
        match self {
            SignConvention::Derived => SignConvention::Printed,
            SignConvention::Printed => SignConvention::Derived,
        }
    }
}

impl std::str::FromStr for SignConvention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "derived" => Ok(SignConvention::Derived),
            "printed" => Ok(SignConvention::Printed),
            other => Err(format!("unknown sign convention '{other}' (expected derived|printed)")),
        }
    }
}

impl std::fmt::Display for SignConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SignConvention::Derived => "derived",
            SignConvention::Printed => "printed",
        })
    }
}

/// Raw physical inputs in natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConfig {
    pub m: f64,
    pub omega: f64,
    /// Composite coupling `g·λ·B₀·κ`.
    pub coupling_a: f64,
    pub chi: f64,
    pub n: u32,
    pub l: i32,
    pub convention: SignConvention,
}

impl PhysicalConfig {
    /// Validated config with the default sign convention for its case.
    pub fn new(m: f64, omega: f64, coupling_a: f64, chi: f64, n: u32, l: i32) -> Result<Self> {
        let cfg = PhysicalConfig {
            m,
            omega,
            coupling_a,
            chi,
            n,
            l,
            convention: SignConvention::default_for(Case::for_chi(chi)),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_convention(mut self, convention: SignConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("m", self.m),
            ("omega", self.omega),
            ("a", self.coupling_a),
            ("chi", self.chi),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be finite, got {v}")));
            }
        }
        if self.m <= 0.0 {
            return Err(Error::InvalidConfig(format!("m must be > 0, got {}", self.m)));
        }
        if self.omega < 0.0 {
            return Err(Error::InvalidConfig(format!("omega must be >= 0, got {}", self.omega)));
        }
        if self.chi < 0.0 {
            return Err(Error::InvalidConfig(format!("chi must be >= 0, got {}", self.chi)));
        }
        if self.n < 1 {
            return Err(Error::InvalidConfig("n must be >= 1".into()));
        }
        Ok(())
    }

    pub fn abs_l(&self) -> u32 {
        self.l.unsigned_abs()
    }

    pub fn case(&self) -> Case {
        Case::for_chi(self.chi)
    }

    /// `sqrt(m²ω² + χ²)`.
    pub fn varpi(&self) -> f64 {
        varpi(self.m, self.omega, self.chi)
    }
}

pub(crate) fn varpi(m: f64, omega: f64, chi: f64) -> f64 {
    let mw = m * omega;
    if chi == 0.0 {
        // sqrt of a square is exact; keep the reduction bit-identical
        mw
    } else {
        (mw * mw + chi * chi).sqrt()
    }
}

/// Dimensionless parameter set of one biconfluent Heun problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeunParams {
    pub abs_l: u32,
    /// `alpha` (chi = 0) or `theta`.
    pub alpha_or_theta: f64,
    pub delta: f64,
    /// `mu` (chi = 0) or `mu_bar`.
    pub mu_bar: f64,
    pub varpi: f64,
    pub convention: SignConvention,
}

impl HeunParams {
    /// Signed Coulomb parameter `c` entering the recurrence
    /// (`b₁ = [δ(2|l|+1) + 2c] / (2(2|l|+1))`).
    pub fn coulomb(&self) -> f64 {
        self.convention.sign() * self.alpha_or_theta
    }

    /// Left side of the spectral truncation condition,
    /// `mu_bar + delta²/4 - 2|l| - 2`, which must equal `2n`.
    pub fn spectral_excess(&self) -> f64 {
        self.mu_bar + self.delta * self.delta / 4.0 - 2.0 * self.abs_l as f64 - 2.0
    }

    /// Eigenvalue `E² - m² + m ω` of the effective radial operator.
    pub fn lambda(&self) -> f64 {
        self.mu_bar * self.varpi
    }
}

/// Heun parameters for a given energy.
pub fn derive_params(cfg: &PhysicalConfig, energy: f64) -> Result<HeunParams> {
    cfg.validate()?;
    if !energy.is_finite() {
        return Err(Error::InvalidConfig(format!("energy must be finite, got {energy}")));
    }
    let (varpi, theta, delta) = geometric(cfg)?;
    let mu_bar = (energy * energy - cfg.m * cfg.m + cfg.m * cfg.omega) / varpi;
    Ok(HeunParams {
        abs_l: cfg.abs_l(),
        alpha_or_theta: theta,
        delta,
        mu_bar,
        varpi,
        convention: cfg.convention,
    })
}

/// Heun parameters with `mu_bar` fixed by the spectral half of the degree-`n`
/// truncation condition, `mu_bar = 2n + 2|l| + 2 - delta²/4`.
pub fn truncation_params(cfg: &PhysicalConfig) -> Result<HeunParams> {
    cfg.validate()?;
    let (varpi, theta, delta) = geometric(cfg)?;
    let mu_bar = truncated_mu_bar(cfg.n, cfg.abs_l(), delta);
    Ok(HeunParams {
        abs_l: cfg.abs_l(),
        alpha_or_theta: theta,
        delta,
        mu_bar,
        varpi,
        convention: cfg.convention,
    })
}

pub(crate) fn truncated_mu_bar(n: u32, abs_l: u32, delta: f64) -> f64 {
    let base = (2 * n + 2 * abs_l + 2) as f64;
    if delta == 0.0 {
        base
    } else {
        base - delta * delta / 4.0
    }
}

fn geometric(cfg: &PhysicalConfig) -> Result<(f64, f64, f64)> {
    if cfg.omega == 0.0 && cfg.chi == 0.0 {
        return Err(Error::DegenerateOperator);
    }
    let varpi = cfg.varpi();
    let theta = cfg.coupling_a / varpi.sqrt();
    let delta = if cfg.chi == 0.0 {
        0.0
    } else {
        2.0 * cfg.m * cfg.chi / varpi.powf(1.5)
    };
    Ok((varpi, theta, delta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(m: f64, omega: f64, a: f64, chi: f64) -> PhysicalConfig {
        PhysicalConfig::new(m, omega, a, chi, 1, 0).unwrap()
    }

    #[test]
    fn coulomb_only_example() {
        let p = derive_params(&cfg(1.0, 0.5, 1.0, 0.0), 2.5f64.sqrt()).unwrap();
        assert_eq!(p.varpi, 0.5);
        assert!((p.alpha_or_theta - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(p.delta, 0.0);
        assert!((p.mu_bar - 4.0).abs() < 1e-14);
    }

    #[test]
    fn pure_linear_confinement() {
        let p = derive_params(&cfg(1.0, 0.0, 0.0, 1.0), 1.0).unwrap();
        assert_eq!(p.varpi, 1.0);
        assert_eq!(p.alpha_or_theta, 0.0);
        assert_eq!(p.delta, 2.0);
        assert_eq!(p.mu_bar, 0.0);
    }

    #[test]
    fn chi_zero_gives_alpha() {
        for omega in [1e-3, 0.1, 0.5, 2.0, 17.0] {
            let p = derive_params(&cfg(1.0, omega, 1.0, 0.0), 1.3).unwrap();
            assert_eq!(p.delta, 0.0);
            assert_eq!(p.alpha_or_theta, 1.0 / (1.0 * omega).sqrt());
        }
    }

    #[test]
    fn rejects_degenerate_and_invalid() {
        assert_eq!(
            derive_params(&cfg(1.0, 0.0, 1.0, 0.0), 1.0),
            Err(Error::DegenerateOperator)
        );
        assert!(matches!(
            PhysicalConfig::new(0.0, 1.0, 1.0, 0.0, 1, 0),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            PhysicalConfig::new(1.0, -1.0, 1.0, 0.0, 1, 0),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            PhysicalConfig::new(1.0, 1.0, f64::NAN, 0.0, 1, 0),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            PhysicalConfig::new(1.0, 1.0, 1.0, -0.5, 1, 0),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            PhysicalConfig::new(1.0, 1.0, 1.0, 0.0, 0, 0),
            Err(Error::InvalidConfig(_))
        ));
        let c = cfg(1.0, 1.0, 1.0, 0.0);
        assert!(matches!(derive_params(&c, f64::INFINITY), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn negative_coupling_allowed() {
        let p = derive_params(&cfg(1.0, 0.5, -1.0, 0.0), 1.0).unwrap();
        assert!(p.alpha_or_theta < 0.0);
    }

    #[test]
    fn default_conventions() {
        assert_eq!(cfg(1.0, 1.0, 1.0, 0.0).convention, SignConvention::Derived);
        assert_eq!(cfg(1.0, 1.0, 1.0, 0.2).convention, SignConvention::Printed);
        assert_eq!("Printed".parse::<SignConvention>(), Ok(SignConvention::Printed));
        assert!("sideways".parse::<SignConvention>().is_err());
    }

    #[test]
    fn truncation_params_hit_the_spectral_condition() {
        let c = PhysicalConfig::new(1.0, 0.7, 2.0, 0.0, 3, -2).unwrap();
        let p = truncation_params(&c).unwrap();
        assert_eq!(p.mu_bar, 12.0);
        assert_eq!(p.spectral_excess(), 6.0);

        let c = PhysicalConfig::new(1.0, 0.7, 2.0, 0.3, 2, 1).unwrap();
        let p = truncation_params(&c).unwrap();
        assert!((p.spectral_excess() - 4.0).abs() < 1e-14);
    }
}
