//! Airy function of complex argument and the transition-region approximation of k(r, y).

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const AI0: f64 = 0.355_028_053_887_817_24;
const AIP0: f64 = 0.258_819_403_792_806_8;

/// Ai(z): Maclaurin series for |z| ≤ 8, asymptotic expansions beyond.
pub fn airy_ai(z: Complex64) -> Complex64 {
    if z.norm() <= 8.0 {
        series(z)
    } else if z.arg().abs() <= 2.0 * PI / 3.0 {
        decaying(z)
    } else {
        oscillating(z)
    }
}

fn series(z: Complex64) -> Complex64 {
    // Ai = Ai(0) f − |Ai'(0)| g
    let z3 = z * z * z;
    let mut f = Complex64::new(1.0, 0.0);
    let mut g = z;
    let mut tf = f;
    let mut tg = g;
    let mut k = 1.0;
    loop {
        tf = tf * z3 / ((3.0 * k - 1.0) * (3.0 * k));
        tg = tg * z3 / ((3.0 * k) * (3.0 * k + 1.0));
        f += tf;
        g += tg;
        if tf.norm() < 1e-18 * f.norm().max(1e-300) && tg.norm() < 1e-18 * g.norm().max(1e-300) {
            break;
        }
        k += 1.0;
        if k > 400.0 {
            break;
        }
    }
    f * AI0 - g * AIP0
}

/// u_k coefficients of the Airy asymptotic series.
fn u_coeffs(n: usize) -> Vec<f64> {
    let mut u = vec![1.0];
    for k in 1..n {
        let kf = k as f64;
        let prev = u[k - 1];
        u.push(prev * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf));
    }
    u
}

fn decaying(z: Complex64) -> Complex64 {
    let zeta = z.powf(1.5) * (2.0 / 3.0);
    let u = u_coeffs(60);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut p = Complex64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for (k, &uk) in u.iter().enumerate() {
        let t = p * uk * if k % 2 == 0 { 1.0 } else { -1.0 };
        if t.norm() > last {
            break;
        }
        last = t.norm();
        sum += t;
        p /= zeta;
    }
    (-zeta).exp() * sum / (2.0 * PI.sqrt() * z.powf(0.25))
}

fn oscillating(z: Complex64) -> Complex64 {
    // Ai(−w) = π^{−1/2} w^{−1/4} [sin(ζ + π/4) P − cos(ζ + π/4) Q], ζ = (2/3)w^{3/2}
    let w = -z;
    let zeta = w.powf(1.5) * (2.0 / 3.0);
    let u = u_coeffs(60);
    let mut p_sum = Complex64::new(0.0, 0.0);
    let mut q_sum = Complex64::new(0.0, 0.0);
    let mut pow = Complex64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for (k, &uk) in u.iter().enumerate() {
        let t = pow * uk;
        if t.norm() > last {
            break;
        }
        last = t.norm();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p_sum += t * sign;
        } else {
            q_sum += t * sign;
        }
        pow /= zeta;
    }
    let phase = zeta + PI / 4.0;
    (phase.sin() * p_sum - phase.cos() * q_sum) / (PI.sqrt() * w.powf(0.25))
}

/// Transition approximation π(2/y)^{1/3}·Ai(ξe^{−2πi/3}), ξ = i(y − r)(−iy/2)^{−1/3}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryTransition {
    /// Real part, the approximation of k(r, y).
    pub value: f64,
    /// Imaginary residue of the complex evaluation.
    pub imag_residue: f64,
    /// The rotated argument ξe^{−2πi/3}; analytically (y − r)(2/y)^{1/3}.
    pub argument: Complex64,
}

/// Airy approximation of k(r, y) on |y − r| ≤ width·r^{1/3}.
pub fn airy_transition(r: f64, y: f64, width: f64) -> Result<AiryTransition> {
    if !(y > 0.0 && r > 0.0) {
        return Err(Error::Domain(format!("airy_transition needs r, y > 0, got r={r}, y={y}")));
    }
    // relative slack so that grid endpoints computed as r ± w stay inside
    if (y - r).abs() > width * r.cbrt() * (1.0 + 1e-12) {
        return Err(Error::OutOfRange {
            what: "transition strip",
            detail: format!("|y - r| = {} exceeds {}", (y - r).abs(), width * r.cbrt()),
        });
    }
    let base = Complex64::new(0.0, -0.5 * y).powf(-1.0 / 3.0);
    let xi = Complex64::new(0.0, y - r) * base;
    let rot = Complex64::from_polar(1.0, -2.0 * PI / 3.0);
    let arg = xi * rot;
    let v = airy_ai(arg) * (PI * (2.0 / y).cbrt());
    Ok(AiryTransition { value: v.re, imag_residue: v.im, argument: arg })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, re: f64, im: f64, tol: f64) -> bool {
        (a - Complex64::new(re, im)).norm() <= tol * Complex64::new(re, im).norm() + 1e-12
    }

    #[test]
    fn reference_values() {
        // multiprecision references
        let cases = [
            (0.0, 0.0, 0.355028053887817239, 0.0),
            (1.0, 0.0, 0.135292416312881416, 0.0),
            (-2.0, 0.0, 0.227407428201685576, 0.0),
            (2.0, 1.0, 0.00169776685726545682, -0.0407180170532239812),
            (-3.0, 2.0, -4.41968955426416726, 5.45462251778266739),
            (6.0, 0.0, 9.94769436025288957e-6, 0.0),
            (-7.0, 0.0, 0.184280835250505637, 0.0),
            (-2.0, 3.464_101_615_137_754_6, 36.3070848272934421, -20.9613558128828018),
            (-5.608_005_308_828_536, -4.189_305_008_727_695, 4330.3885798408838, -633.858604835842217),
        ];
        for (x, y, re, im) in cases {
            let v = airy_ai(Complex64::new(x, y));
            assert!(close(v, re, im, 1e-10), "Ai({x}+{y}i) = {v}");
        }
    }

    #[test]
    fn series_meets_asymptotic() {
        for arg in [0.0, 1.0, 2.0, 2.5, 3.0] {
            let a = Complex64::from_polar(8.0 - 1e-9, arg);
            let b = Complex64::from_polar(8.0 + 1e-9, arg);
            let (va, vb) = (airy_ai(a), airy_ai(b));
            assert!((va - vb).norm() < 1e-8 * va.norm().max(1e-3), "arg {arg}: {va} vs {vb}");
        }
    }

    #[test]
    fn argument_is_real() {
        let t = airy_transition(100.0, 103.0, 1.0).unwrap();
        let want = 3.0 * (2.0f64 / 103.0).cbrt();
        assert!((t.argument.re - want).abs() < 1e-13 && t.argument.im.abs() < 1e-13);
        assert!(t.imag_residue.abs() < 1e-12);
        let z = airy_transition(8.0, 8.0, 1.0).unwrap();
        assert!((z.value - PI * (0.25f64).cbrt() * AI0).abs() < 1e-14);
        assert!(airy_transition(100.0, 110.0, 1.0).is_err());
    }
}
