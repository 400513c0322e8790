//! Run configuration, read from TOML or JSON and overridden by command-line flags.

use crate::bessel::{BesselConstants, FROZEN};
use crate::bounds::{parse_rational, EnvelopeConstants, Q};
use crate::error::{Error, Result};
use crate::lift::LiftOptions;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::str::FromStr;

/// Environment variable naming a config file.
pub const CONFIG_ENV: &str = "THETALIFT_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Target tail bound for lift evaluation, relative to e^{−πr/2}y^{N/2}.
    pub lift: f64,
    /// Target for the Beta-integral quadratures.
    pub quadrature: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { lift: 1e-10, quadrature: 1e-13 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub epsilon0: f64,
    /// Ramanujan exponent as a fraction.
    pub theta: String,
    pub bessel_constants: BesselConstants,
    pub tolerances: Tolerances,
    /// Largest truncation norm for lift evaluation.
    pub shell_budget: u64,
    /// Largest number of stored lattice vectors.
    pub vector_budget: u64,
    /// Primes used in Euler products.
    pub primes: u64,
    /// Output format; each subcommand has its own default when unset.
    pub format: Option<Format>,
}

impl Default for Config {
    fn default() -> Self {
        let lo = LiftOptions::default();
        Config {
            epsilon0: lo.eps0,
            theta: "7/64".into(),
            bessel_constants: FROZEN,
            tolerances: Tolerances::default(),
            shell_budget: lo.shell_budget,
            vector_budget: lo.vector_budget,
            primes: 9973,
            format: None,
        }
    }
}

impl FromStr for Config {
    type Err = Error;

    /// Parses TOML, or JSON when the text starts with `{`.
    fn from_str(text: &str) -> Result<Self> {
        let c: Config = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?
        };
        c.validate()?;
        Ok(c)
    }
}

impl Config {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    /// The explicit path if given, else $THETALIFT_CONFIG, else defaults.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::from_file(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => Self::from_file(Path::new(&p)),
                _ => Ok(Self::default()),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let th = self.theta()?;
        if th < Ratio::from_integer(0) || th >= Ratio::new(1, 4) {
            return Err(Error::Config(format!("theta = {th} outside [0, 1/4)")));
        }
        if !(self.epsilon0 > 0.0 && self.epsilon0.is_finite()) {
            return Err(Error::Config("epsilon0 must be positive".into()));
        }
        let t = &self.tolerances;
        if !(t.lift > 0.0 && t.quadrature > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if self.shell_budget == 0 || self.vector_budget == 0 {
            return Err(Error::Config("budgets must be positive".into()));
        }
        if self.primes < 2 {
            return Err(Error::Config("primes must be at least 2".into()));
        }
        self.bessel_constants.validate()
    }

    pub fn theta(&self) -> Result<Q> {
        parse_rational(&self.theta).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn lift_options(&self) -> LiftOptions {
        LiftOptions {
            eps0: self.epsilon0,
            shell_budget: self.shell_budget,
            vector_budget: self.vector_budget,
            ..LiftOptions::default()
        }
    }

    pub fn envelope_constants(&self) -> EnvelopeConstants {
        EnvelopeConstants { eps0: self.epsilon0, decay: self.bessel_constants.c6, ..EnvelopeConstants::default() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        Config::default().validate().unwrap();
        assert_eq!(Config::default().theta().unwrap(), Ratio::new(7, 64));
    }

    #[test]
    fn toml_and_json() {
        let t = Config::from_str("epsilon0 = 0.2\ntheta = \"0\"\n[tolerances]\nlift = 1e-8\n").unwrap();
        assert_eq!(t.epsilon0, 0.2);
        assert_eq!(t.tolerances.lift, 1e-8);
        assert_eq!(t.tolerances.quadrature, 1e-13);
        let j = Config::from_str(r#"{"format": "csv", "primes": 100}"#).unwrap();
        assert_eq!((j.format, j.primes), (Some(Format::Csv), 100));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(Config::from_str("theta = \"1/4\"").is_err());
        assert!(Config::from_str("theta = \"0.1\"").is_err());
        assert!(Config::from_str("[tolerances]\nlift = 0").is_err());
        assert!(Config::from_str("unknown = 1").is_err());
        assert!(Config::from_str("[bessel_constants]\nwidth = -1").is_err());
        let c = Config::from_str("[bessel_constants]\nc6 = 0.2").unwrap();
        assert_eq!(c.bessel_constants, BesselConstants { c6: 0.2, ..FROZEN });
    }
}
