//! k(r, y) = e^{πr/2}·K_{ir}(y) and its regime envelopes.
//!
//! The defining integral ∫₀^∞ e^{−y cosh t} cos(rt) dt cancels catastrophically on the
//! real line once r is large, so it is evaluated along a deformed contour instead:
//! the steepest-descent path through the saddle on the imaginary axis when y ≥ r, and a
//! broken path through the saddle at acosh(r/y) + iπ/2 when y < r.

mod airy;
mod envelope;
mod reference;

pub use airy::{airy_ai, airy_transition, AiryTransition};
pub use envelope::{
    calibrate, envelope, ln_majorant, regime, transition_peak, BesselConstants, CalibrationReport,
    Regime, FROZEN, TRANSITION_PEAK,
};
pub use reference::k_scaled_reference;

use crate::error::{Error, Result};
use crate::quad;
use std::f64::consts::FRAC_PI_2;

/// ln of the smallest normal double, below which k(r, y) is reported as underflowed.
const LN_UNDERFLOW: f64 = -708.0;

/// A value of k(r, y) = mantissa·e^{ln_scale}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KValue {
    pub mantissa: f64,
    pub ln_scale: f64,
    /// Absolute error estimate on the mantissa.
    pub err: f64,
    /// true when mantissa·e^{ln_scale} is below the double range.
    pub underflow: bool,
}

impl KValue {
    pub fn value(&self) -> f64 {
        if self.underflow {
            0.0
        } else {
            self.mantissa * self.ln_scale.exp()
        }
    }

    /// ln |k|, finite even when the value underflows.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.abs().ln() + self.ln_scale
    }
}

/// e^{πr/2}K_{ir}(y); returns 0 when the true value underflows.
pub fn k_scaled(r: f64, y: f64) -> Result<f64> {
    Ok(k_scaled_parts(r, y)?.value())
}

/// e^{πr/2}K_{ir}(y) in mantissa/log-scale form.
pub fn k_scaled_parts(r: f64, y: f64) -> Result<KValue> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::Domain(format!("k_scaled needs y > 0, got {y}")));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("k_scaled needs r >= 0, got {r}")));
    }
    if y >= r {
        decay_side(r, y)
    } else {
        oscillatory_side(r, y)
    }
}

/// sinh(u) − u without cancellation.
fn sinh_minus_id(u: f64) -> f64 {
    if u.abs() < 0.75 {
        let u2 = u * u;
        let mut term = u * u2 / 6.0;
        let mut sum = term;
        let mut k = 3.0;
        while term.abs() > 1e-18 * sum.abs() {
            term *= u2 / ((k + 1.0) * (k + 2.0));
            sum += term;
            k += 2.0;
        }
        sum
    } else {
        u.sinh() - u
    }
}

/// y ≥ r: integrate exp(rβ − y cosh u cos σ) along sin σ = r u/(y sinh u), β = π/2 − σ.
fn decay_side(r: f64, y: f64) -> Result<KValue> {
    let root = ((y - r) * (y + r)).sqrt();
    let e0 = r * root.atan2(r) - root;
    let exponent = |u: f64| -> f64 {
        let one_minus_s = if u == 0.0 {
            (y - r) / y
        } else {
            (y * sinh_minus_id(u) + (y - r) * u) / (y * u.sinh())
        };
        let s = 1.0 - one_minus_s;
        let cos_sigma = (one_minus_s * (1.0 + s)).max(0.0).sqrt();
        let beta = cos_sigma.atan2(s);
        r * beta - y * u.cosh() * cos_sigma - e0
    };
    // truncate where the integrand has dropped below e^{-46} of its peak
    let mut upper = 0.05;
    while exponent(upper) > -46.0 && upper < 700.0 {
        upper *= 1.5;
    }
    let g = |u: f64| exponent(u).exp();
    let (rough, _) = quad::adaptive(&g, 0.0, upper, 1e-6 * upper, 4000)?;
    let tol = 2e-13 * rough.abs().max(1e-300);
    let (val, err) = quad::adaptive(&g, 0.0, upper, tol, 20000)?;
    Ok(KValue { mantissa: val, ln_scale: e0, err, underflow: val.ln() + e0 < LN_UNDERFLOW })
}

/// y < r: three pieces through the saddle a + iπ/2, a = acosh(r/y).
fn oscillatory_side(r: f64, y: f64) -> Result<KValue> {
    let xm1 = (r - y) / y;
    let a = (xm1 + (xm1 * (xm1 + 2.0)).sqrt()).ln_1p();
    let tol = 1e-13;
    let width = (2.0 / r).min(0.5);

    // horizontal segment Im t = π/2, 0 ≤ Re t ≤ a
    let p1 = |u: f64| (r * u - y * u.sinh()).cos();
    let (v1, e1) = quad::panelled(&p1, 0.0, a, width, tol / 3.0)?;

    // diagonal t = (a + s) + i(π/2 − s), 0 ≤ s ≤ π/2
    let p2 = |s: f64| {
        let (sn, cs) = s.sin_cos();
        let eb = r * s - y * (a + s).cosh() * sn;
        if eb < -60.0 {
            return 0.0;
        }
        let psi = r * (a + s) - y * (a + s).sinh() * cs;
        eb.exp() * (psi.cos() + psi.sin())
    };
    let (v2, e2) = quad::panelled(&p2, 0.0, FRAC_PI_2, (0.5 / r).min(0.25), tol / 3.0)?;

    // real axis from a + π/2 outwards
    let t0 = a + FRAC_PI_2;
    let lead = r * FRAC_PI_2;
    let (mut v3, mut e3) = (0.0, 0.0);
    if lead - y * t0.cosh() > -60.0 {
        let t1 = ((lead + 60.0) / y).acosh().max(t0);
        let p3 = |t: f64| (lead - y * t.cosh()).exp() * (r * t).cos();
        let (v, e) = quad::panelled(&p3, t0, t1, (2.0 / r).min(0.5), tol / 3.0)?;
        v3 = v;
        e3 = e;
    }
    Ok(KValue { mantissa: v1 + v2 + v3, ln_scale: 0.0, err: e1 + e2 + e3, underflow: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Multiprecision reference values (40 and 90 digits agree).
    pub(crate) const MP_REFERENCE: [(f64, f64, f64); 24] = [
        (0.0, 1.0, 0.421024438240708333),
        (0.0, 0.01, 4.72124473016109494),
        (0.0, 30.0, 2.13247749646305637e-14),
        (5.0, 5.0, 0.82068108136183095),
        (5.0, 0.5, -1.09251326056566198),
        (5.0, 12.0, 0.00205606538509698135),
        (1.0, 0.001, 2.13274764981563547),
        (50.0, 25.0, -0.370569157098184209),
        (50.0, 50.0, 0.381419045720988866),
        (50.0, 53.7, 0.107060408652032956),
        (50.0, 100.0, 1.80689334506247042e-16),
        (50.0, 205.0, 2.32314087159950919e-59),
        (100.0, 100.0, 0.302745101849441774),
        (100.0, 60.0, -0.195447071551548308),
        (100.0, 104.64, 0.0850068552255588085),
        (100.0, 140.0, 1.64148006795492391e-10),
        (100.0, 300.0, 3.12546834669584429e-71),
        (200.0, 199.0, 0.277935288933377379),
        (200.0, 150.0, 0.141399799600758085),
        (200.0, 350.0, 5.40890220808613885e-43),
        (27.5595, 10.0, 0.356657093724378236),
        (500.0, 400.0, -0.033497609817903189),
        (500.0, 520.0, 0.00253663614342230116),
        (0.5, 3.0, 0.0734657852396283352),
    ];

    #[test]
    fn matches_multiprecision() {
        for &(r, y, want) in &MP_REFERENCE {
            let got = k_scaled(r, y).unwrap();
            let rel = (got - want).abs() / want.abs();
            assert!(rel < 1e-10, "r={r} y={y}: got {got:e}, want {want:e}, rel {rel:e}");
        }
    }

    #[test]
    fn k0_limit() {
        let mut y = 0.01;
        while y <= 30.0 {
            let a = k_scaled(0.0, y).unwrap();
            let b = crate::special::bessel_k0(y);
            assert!(((a - b) / b).abs() < 1e-10, "y={y}");
            y *= 1.1;
        }
    }

    #[test]
    fn underflow_flag() {
        let v = k_scaled_parts(10.0, 2000.0).unwrap();
        assert!(v.underflow);
        assert_eq!(v.value(), 0.0);
        assert!(v.ln_abs() < -1900.0 && v.ln_abs().is_finite());
        assert!(k_scaled(1.0, 0.0).is_err());
        assert!(k_scaled(-1.0, 1.0).is_err());
    }

    #[test]
    fn decreasing_at_r_zero() {
        let mut prev = f64::INFINITY;
        for i in 1..200 {
            let v = k_scaled(0.0, i as f64 * 0.5).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }
}
