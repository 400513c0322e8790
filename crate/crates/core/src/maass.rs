//! Level-1 Hecke–Maass cusp forms as ingested data.

use crate::arith;
use crate::error::{Error, Result};
use crate::special::ln_cosh;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

pub const DEFAULT_THETA: f64 = 7.0 / 64.0;

/// Shipped sample forms: an even form with r ≈ 27.56 and an odd one with r ≈ 19.07.
pub const SAMPLE_NAMES: [&str; 2] = ["sample-even", "sample-odd"];

const SAMPLE_EVEN: &str = include_str!("../../../data/maass_even_r27.json");
const SAMPLE_ODD: &str = include_str!("../../../data/maass_odd_r19.json");

/// Ingestion checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormOptions {
    pub r_min: f64,
    pub theta: f64,
}

impl Default for FormOptions {
    fn default() -> Self {
        FormOptions { r_min: 1.0, theta: DEFAULT_THETA }
    }
}

/// Hecke–Maass form with Laplace eigenvalue (r²+1)/4, c(n) = c1·μ(|n|)·(ε if n < 0).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaassForm {
    r: f64,
    parity: i8,
    c1: f64,
    hecke: BTreeMap<u64, f64>,
    norm_sq: Option<f64>,
    theta: f64,
    precision: Option<f64>,
}

#[derive(Deserialize)]
struct FormFile {
    r: f64,
    parity: i64,
    #[serde(default = "one")]
    c1: f64,
    #[serde(default)]
    norm_sq: Option<f64>,
    hecke: BTreeMap<String, f64>,
    #[serde(default)]
    precision: Option<f64>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RamanujanReport {
    pub max_ratio: f64,
    pub argmax: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct C1Window {
    pub lower: f64,
    pub upper: f64,
    /// |c(1)|²/‖f‖₂².
    pub measured: f64,
    /// measured lies in [lower/100, 100·upper].
    pub within_100x: bool,
}

impl MaassForm {
    pub fn new(
        r: f64,
        parity: i8,
        c1: f64,
        hecke: BTreeMap<u64, f64>,
        norm_sq: Option<f64>,
        opts: &FormOptions,
    ) -> Result<Self> {
        if !(r.is_finite() && r >= opts.r_min) {
            return Err(Error::InvalidForm(format!("r = {r} below r_min = {}", opts.r_min)));
        }
        if parity != 1 && parity != -1 {
            return Err(Error::InvalidForm(format!("parity must be +1 or -1, got {parity}")));
        }
        if !(c1.is_finite() && c1 != 0.0) {
            return Err(Error::InvalidForm("c1 must be finite and nonzero".into()));
        }
        if let Some(n) = norm_sq {
            if !(n.is_finite() && n > 0.0) {
                return Err(Error::InvalidForm(format!("norm_sq must be positive, got {n}")));
            }
        }
        if !(0.0..0.25).contains(&opts.theta) {
            return Err(Error::InvalidForm(format!("theta = {} outside [0, 1/4)", opts.theta)));
        }
        for (&p, &mu) in &hecke {
            if !arith::is_prime(p) {
                return Err(Error::InvalidForm(format!("Hecke key {p} is not prime")));
            }
            let cap = 2.0 * (p as f64).powf(opts.theta);
            if !mu.is_finite() || mu.abs() > cap {
                return Err(Error::InvalidForm(format!(
                    "|mu({p})| = {} exceeds 2 p^theta = {cap}",
                    mu.abs()
                )));
            }
        }
        Ok(MaassForm { r, parity, c1, hecke, norm_sq, theta: opts.theta, precision: None })
    }

    pub fn from_json_str(s: &str, opts: &FormOptions) -> Result<Self> {
        let f: FormFile = serde_json::from_str(s)?;
        let mut hecke = BTreeMap::new();
        for (k, v) in f.hecke {
            let p: u64 = k
                .trim()
                .parse()
                .map_err(|_| Error::InvalidForm(format!("Hecke key {k:?} is not an integer")))?;
            hecke.insert(p, v);
        }
        let parity = i8::try_from(f.parity)
            .map_err(|_| Error::InvalidForm(format!("parity must be +1 or -1, got {}", f.parity)))?;
        let mut form = MaassForm::new(f.r, parity, f.c1, hecke, f.norm_sq, opts)?;
        form.precision = f.precision;
        Ok(form)
    }

    pub fn from_json_file(path: &Path, opts: &FormOptions) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?, opts)
    }

    /// One of [`SAMPLE_NAMES`].
    pub fn sample(name: &str, opts: &FormOptions) -> Result<Self> {
        match name {
            "sample-even" => Self::from_json_str(SAMPLE_EVEN, opts),
            "sample-odd" => Self::from_json_str(SAMPLE_ODD, opts),
            _ => Err(Error::InvalidForm(format!(
                "unknown sample {name:?}; expected one of {}",
                SAMPLE_NAMES.join(", ")
            ))),
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn parity(&self) -> i8 {
        self.parity
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn norm_sq(&self) -> Option<f64> {
        self.norm_sq
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn precision(&self) -> Option<f64> {
        self.precision
    }

    /// Largest prime p such that every prime ≤ p has an eigenvalue.
    pub fn p_max(&self) -> u64 {
        let mut last = 1;
        for p in arith::primes_upto(*self.hecke.keys().last().unwrap_or(&1)) {
            if !self.hecke.contains_key(&p) {
                break;
            }
            last = p;
        }
        last
    }

    pub fn hecke_primes(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.hecke.iter().map(|(&p, &v)| (p, v))
    }

    /// Same form with c(1) replaced by α·c(1) and ‖f‖² by α²‖f‖².
    pub fn scaled(&self, alpha: f64) -> Self {
        let mut f = self.clone();
        f.c1 *= alpha;
        f.norm_sq = f.norm_sq.map(|n| n * alpha * alpha);
        f
    }

    pub fn prime_eigenvalue(&self, p: u64) -> Result<f64> {
        self.hecke.get(&p).copied().ok_or(Error::InsufficientHecke(p))
    }

    /// μ(p^k) from μ(p^{k+1}) = μ(p)μ(p^k) − μ(p^{k−1}).
    pub fn prime_power_eigenvalue(&self, p: u64, k: u32) -> Result<f64> {
        if k == 0 {
            return Ok(1.0);
        }
        let a = self.prime_eigenvalue(p)?;
        let (mut prev, mut cur) = (1.0, a);
        for _ in 1..k {
            let next = a * cur - prev;
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }

    /// μ(m), extended multiplicatively; μ(1) = 1.
    pub fn hecke_eigenvalue(&self, m: u64) -> Result<f64> {
        if m == 0 {
            return Err(Error::Domain("hecke_eigenvalue needs m >= 1".into()));
        }
        let mut v = 1.0;
        for (p, k) in arith::factorize(m) {
            v *= self.prime_power_eigenvalue(p, k)?;
        }
        Ok(v)
    }

    /// c(n) = c1·μ(|n|), times ε for n < 0.
    pub fn coefficient(&self, n: i64) -> Result<f64> {
        if n == 0 {
            return Err(Error::Domain("coefficient index must be nonzero".into()));
        }
        let v = self.c1 * self.hecke_eigenvalue(n.unsigned_abs())?;
        Ok(if n < 0 { self.parity as f64 * v } else { v })
    }

    /// max over m ≤ M of |μ(m)|/(m^θ τ(m)).
    pub fn ramanujan_check(&self, max_m: u64) -> Result<RamanujanReport> {
        let mut rep = RamanujanReport { max_ratio: 0.0, argmax: 1 };
        for m in 1..=max_m {
            let ratio =
                self.hecke_eigenvalue(m)?.abs() / ((m as f64).powf(self.theta) * arith::tau(m) as f64);
            if ratio > rep.max_ratio {
                rep = RamanujanReport { max_ratio: ratio, argmax: m };
            }
        }
        Ok(rep)
    }

    /// (cosh(πr/2)·r^{−ε₀}, cosh(πr/2)·r^{ε₀}) against the measured |c(1)|²/‖f‖₂².
    pub fn c1_envelope(&self, eps0: f64) -> Result<C1Window> {
        let n = self.norm_sq.ok_or(Error::MissingNorm)?;
        let (lower, upper) = c1_window(self.r, eps0);
        let measured = self.c1 * self.c1 / n;
        Ok(C1Window {
            lower,
            upper,
            measured,
            within_100x: measured >= lower / 100.0 && measured <= upper * 100.0,
        })
    }
}

/// (cosh(πr/2)·r^{−ε₀}, cosh(πr/2)·r^{ε₀}); collapses to (1, 1) as r → 0 only when ε₀ = 0.
pub fn c1_window(r: f64, eps0: f64) -> (f64, f64) {
    let lc = ln_cosh(std::f64::consts::FRAC_PI_2 * r);
    let lr = if r > 0.0 { eps0 * r.ln() } else { 0.0 };
    ((lc - lr).exp(), (lc + lr).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> MaassForm {
        let mut h = BTreeMap::new();
        h.insert(2, 1.5);
        h.insert(3, -0.5);
        h.insert(5, 0.25);
        MaassForm::new(10.0, -1, 2.0, h, Some(1.0), &FormOptions::default()).unwrap()
    }

    #[test]
    fn eigenvalue_examples() {
        let f = toy();
        assert_eq!(f.hecke_eigenvalue(1).unwrap(), 1.0);
        assert_eq!(f.hecke_eigenvalue(4).unwrap(), 1.5 * 1.5 - 1.0);
        assert_eq!(f.hecke_eigenvalue(12).unwrap(), (1.5 * 1.5 - 1.0) * -0.5);
        assert!(matches!(f.hecke_eigenvalue(7), Err(Error::InsufficientHecke(7))));
    }

    #[test]
    fn coefficient_examples() {
        let f = toy();
        assert_eq!(f.coefficient(1).unwrap(), 2.0);
        assert_eq!(f.coefficient(-1).unwrap(), -2.0);
        assert_eq!(f.coefficient(-4).unwrap(), -2.0 * (1.5 * 1.5 - 1.0));
        assert_eq!(f.p_max(), 5);
    }

    #[test]
    fn ingestion_rejects() {
        let opts = FormOptions::default();
        let mut h = BTreeMap::new();
        h.insert(2, 2.2);
        assert!(MaassForm::new(10.0, 1, 1.0, h.clone(), None, &opts).is_err());
        h.insert(2, 1.0);
        assert!(MaassForm::new(10.0, 1, 0.0, h.clone(), None, &opts).is_err());
        assert!(MaassForm::new(0.5, 1, 1.0, h.clone(), None, &opts).is_err());
        assert!(MaassForm::new(10.0, 0, 1.0, h.clone(), None, &opts).is_err());
        h.insert(4, 0.0);
        assert!(MaassForm::new(10.0, 1, 1.0, h, None, &opts).is_err());
    }

    #[test]
    fn window() {
        let (lo, hi) = c1_window(10.0, 0.1);
        let c = (5.0 * std::f64::consts::PI).cosh();
        assert!((lo / (c * 10f64.powf(-0.1)) - 1.0).abs() < 1e-13);
        assert!((hi / (c * 10f64.powf(0.1)) - 1.0).abs() < 1e-13);
        assert_eq!(c1_window(0.0, 0.1), (1.0, 1.0));
        assert!(toy().c1_envelope(0.1).is_ok());
    }

    #[test]
    fn ramanujan_trivial() {
        let rep = toy().ramanujan_check(1).unwrap();
        assert_eq!((rep.max_ratio, rep.argmax), (1.0, 1));
    }
}
