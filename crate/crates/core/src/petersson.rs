//! Closed-form Petersson norm ratio ‖F_f‖²/‖f‖² and its ingredients.
//!
//! ‖F_f‖² = L(N/2, π_f, Ad)/(ζ(N/2+1)ζ(N)) · B(s₀) · ‖f‖², s₀ = (N−1)/2, with
//! B(s₀) = 2^{1−N/2}π²|Γ(N/4 + ir/2)|²/Γ(N/4 + 1/2)².

use crate::arith;
use crate::error::{Error, Result};
use crate::maass::MaassForm;
use crate::quad;
use crate::special::{ln_gamma_complex, ln_gamma_half_integer, ln_sinh, zeta};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::{LN_2, PI};

fn check_rank(n: usize) -> Result<()> {
    if n == 0 || n % 8 != 0 {
        return Err(Error::Domain(format!("rank {n} is not a positive multiple of 8")));
    }
    Ok(())
}

/// ln|Γ(N/4 + ir/2)|² from (πt/sinh πt)·Π_{k=1}^{N/4−1}(k² + t²), t = r/2.
pub fn ln_abs_gamma_sq(n: usize, r: f64) -> Result<f64> {
    check_rank(n)?;
    let t = 0.5 * r.abs();
    let pt = PI * t;
    let lead = if pt < 1e-8 { -pt * pt / 6.0 } else { pt.ln() - ln_sinh(pt) };
    Ok(lead + (1..n / 4).map(|k| ((k * k) as f64 + t * t).ln()).sum::<f64>())
}

/// The same quantity from the complex log-Gamma.
pub fn ln_abs_gamma_sq_complex(n: usize, r: f64) -> Result<f64> {
    check_rank(n)?;
    Ok(2.0 * ln_gamma_complex(Complex64::new(n as f64 / 4.0, 0.5 * r)).re)
}

fn ln_arch(n: usize, ln_g2: f64) -> f64 {
    (1.0 - n as f64 / 2.0) * LN_2 + 2.0 * PI.ln() + ln_g2 - 2.0 * ln_gamma_half_integer(n as u64 / 4)
}

/// B(s₀) = 2^{1−N/2}π²|Γ(N/4 + ir/2)|²/Γ(N/4 + 1/2)², by the finite product.
pub fn arch_factor(n: usize, r: f64) -> Result<f64> {
    Ok(ln_arch(n, ln_abs_gamma_sq(n, r)?).exp())
}

/// B(s₀) through the complex log-Gamma.
pub fn arch_factor_complex(n: usize, r: f64) -> Result<f64> {
    Ok(ln_arch(n, ln_abs_gamma_sq_complex(n, r)?).exp())
}

/// Two quadratures of the Beta function against Γ(v)Γ(w)/Γ(v+w).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaOracle {
    /// ∫₀^∞ u^{v−1}(1+u)^{−v−w} du.
    pub half_line: Complex64,
    /// 2∫₀^{π/2} sin^{2v−1}θ cos^{2w−1}θ dθ.
    pub trigonometric: Complex64,
    pub closed_form: Complex64,
    /// Largest relative deviation of either quadrature from the closed form.
    pub discrepancy: f64,
}

/// Beta-integral oracle for Re v, Re w > 0.
pub fn beta_oracle(v: Complex64, w: Complex64) -> Result<BetaOracle> {
    beta_oracle_tol(v, w, 1e-13)
}

/// [`beta_oracle`] with an explicit quadrature tolerance.
pub fn beta_oracle_tol(v: Complex64, w: Complex64, tol: f64) -> Result<BetaOracle> {
    if !(v.re > 0.0 && w.re > 0.0) {
        return Err(Error::Domain(format!("beta integrals diverge for v = {v}, w = {w}")));
    }
    let closed = (ln_gamma_complex(v) + ln_gamma_complex(w) - ln_gamma_complex(v + w)).exp();
    let f = |u: f64| ((v - 1.0) * u.ln() - (v + w) * u.ln_1p()).exp();
    let half_line = quad::exp_sinh(&f, 0.0, tol)?;
    let g = |th: f64| {
        let (s, c) = th.sin_cos();
        ((2.0 * v - 1.0) * s.ln() + (2.0 * w - 1.0) * c.ln()).exp() * 2.0
    };
    let trigonometric = quad::tanh_sinh(&g, 0.0, std::f64::consts::FRAC_PI_2, tol)?;
    let discrepancy = ((half_line - closed).norm() / closed.norm())
        .max((trigonometric - closed).norm() / closed.norm());
    Ok(BetaOracle { half_line, trigonometric, closed_form: closed, discrepancy })
}

/// B(s₀) assembled from quadratures: π·B(N/4 + ir/2, N/4 − ir/2)·B(1/2, N/4).
pub fn arch_factor_quadrature(n: usize, r: f64) -> Result<f64> {
    check_rank(n)?;
    let q = n as f64 / 4.0;
    let a = beta_oracle(Complex64::new(q, 0.5 * r), Complex64::new(q, -0.5 * r))?;
    let b = beta_oracle(Complex64::new(0.5, 0.0), Complex64::new(q, 0.0))?;
    Ok(PI * a.half_line.re * b.trigonometric.re)
}

/// Local adjoint factor 1/[(1 − (μ²−2)X + X²)(1 − X)], X = p^{−s}.
pub fn adjoint_local_factor(mu: f64, p: u64, s: f64) -> f64 {
    let x = (p as f64).powf(-s);
    1.0 / ((1.0 - (mu * mu - 2.0) * x + x * x) * (1.0 - x))
}

/// Truncated adjoint L-value and a bound on the omitted primes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdjointL {
    pub value: f64,
    /// Bound on |L − value| from |α_p^{±2}| ≤ p^{2θ}.
    pub tail_bound: f64,
    pub primes_upto: u64,
}

/// Π_{p ≤ P} of the local factors at s, with the tail over p > P bounded by
/// exp(T) − 1 relative, T = [2P^{1−σ}/(σ−1) + P^{1−s}/(s−1)]/(1 − P^{−σ}), σ = s − 2θ.
pub fn adjoint_l(f: &MaassForm, s: f64, primes_upto: u64) -> Result<AdjointL> {
    let th = f.theta();
    let sigma = s - 2.0 * th;
    if !(s >= 4.0) || !(sigma > 1.0) {
        return Err(Error::Domain(format!("adjoint L needs s >= 4 in the convergent range, got {s}")));
    }
    if primes_upto < 2 {
        return Err(Error::Domain("adjoint L needs at least one prime".into()));
    }
    let mut ln_value = 0.0;
    for p in arith::primes_upto(primes_upto) {
        let mu = f.prime_eigenvalue(p)?;
        ln_value += adjoint_local_factor(mu, p, s).ln();
    }
    let pf = primes_upto as f64;
    let t = (2.0 * pf.powf(1.0 - sigma) / (sigma - 1.0) + pf.powf(1.0 - s) / (s - 1.0))
        / (1.0 - pf.powf(-sigma));
    let value = ln_value.exp();
    Ok(AdjointL { value, tail_bound: value * t.exp_m1(), primes_upto })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormFactorization {
    pub rank: usize,
    /// s₀ = (N−1)/2 as a fraction.
    pub s0: String,
    pub arch_factor: f64,
    /// B(s₀) through the complex log-Gamma.
    pub arch_factor_complex: f64,
    pub adjoint_l: f64,
    pub adjoint_l_tail: f64,
    pub primes_upto: u64,
    /// ζ(N/2 + 1).
    pub zeta_half: f64,
    /// ζ(N).
    pub zeta_rank: f64,
    /// ‖F_f‖²/‖f‖².
    pub ratio: f64,
    /// The ratio with B(s₀) taken from the complex log-Gamma.
    pub ratio_complex: f64,
}

impl NormFactorization {
    /// ‖F_f‖² = ratio · ‖f‖².
    pub fn lift_norm_sq(&self, f: &MaassForm) -> Result<f64> {
        Ok(self.ratio * f.norm_sq().ok_or(Error::MissingNorm)?)
    }
}

/// ‖F_f‖²/‖f‖² for rank N with the Euler product over p ≤ P.
pub fn norm_ratio(f: &MaassForm, n: usize, primes_upto: u64) -> Result<NormFactorization> {
    check_rank(n)?;
    let r = f.r();
    let arch = arch_factor(n, r)?;
    let arch_c = arch_factor_complex(n, r)?;
    let l = adjoint_l(f, n as f64 / 2.0, primes_upto)?;
    let zh = zeta(n as f64 / 2.0 + 1.0);
    let zn = zeta(n as f64);
    let base = l.value / (zh * zn);
    Ok(NormFactorization {
        rank: n,
        s0: format!("{}/2", n - 1),
        arch_factor: arch,
        arch_factor_complex: arch_c,
        adjoint_l: l.value,
        adjoint_l_tail: l.tail_bound,
        primes_upto,
        zeta_half: zh,
        zeta_rank: zn,
        ratio: base * arch,
        ratio_complex: base * arch_c,
    })
}
