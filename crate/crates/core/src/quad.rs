//! Numerical quadrature: adaptive Gauss–Kronrod 7-15 and double-exponential rules.

use crate::error::{Error, Result};
use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Gauss–Kronrod 7-15 panel; returns (Kronrod value, |Kronrod − Gauss|).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let (v, e, _) = gk15_abs(f, a, b);
    (v, e)
}

/// As [`gk15`], also returning the Kronrod estimate of ∫|f|.
fn gk15_abs<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut ka = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let (f1, f2) = (f(c - dx), f(c + dx));
        k += WGK[j] * (f1 + f2);
        ka += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            g += WG[j / 2] * (f1 + f2);
        }
    }
    (k * h, ((k - g) * h).abs(), ka * h.abs())
}

struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
    /// error estimate is at the rounding floor and cannot improve by bisection
    limited: bool,
}

fn panel<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Panel {
    let (value, err, abs) = gk15_abs(f, lo, hi);
    let floor = 50.0 * f64::EPSILON * abs;
    let limited = err <= floor || (hi - lo) <= 1e-12 * lo.abs().max(hi.abs()).max(1e-300);
    Panel { lo, hi, value, err, limited }
}

/// Globally adaptive GK15 to absolute tolerance `tol`.
///
/// Returns (value, error estimate). Panels whose estimate sits at the rounding floor are
/// not split further. Fails with the achieved estimate if `max_panels` subdivisions do
/// not reach `tol`.
pub fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    max_panels: usize,
) -> Result<(f64, f64)> {
    refine(f, vec![panel(f, a, b)], tol, max_panels)
}

/// Global adaptive GK15 over an initial partition into panels of width at most `width`.
pub fn panelled<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    width: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    if b <= a {
        return Ok((0.0, 0.0));
    }
    let n = ((b - a) / width).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    let panels = (0..n)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == n { b } else { lo + h };
            panel(f, lo, hi)
        })
        .collect();
    refine(f, panels, tol, 20 * n + 2000)
}

fn refine<F: Fn(f64) -> f64>(
    f: &F,
    mut panels: Vec<Panel>,
    tol: f64,
    max_panels: usize,
) -> Result<(f64, f64)> {
    let mut total_err: f64 = panels.iter().map(|p| p.err).sum();
    while total_err > tol {
        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.limited)
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i);
        let Some(i) = worst else { break };
        if panels.len() >= max_panels {
            return Err(Error::Quadrature { estimate: total_err, target: tol });
        }
        let p = panels.swap_remove(i);
        let mid = 0.5 * (p.lo + p.hi);
        let (left, right) = (panel(f, p.lo, mid), panel(f, mid, p.hi));
        total_err += left.err + right.err - p.err;
        panels.push(left);
        panels.push(right);
        if total_err <= tol {
            // guard against drift in the running sum
            total_err = panels.iter().map(|p| p.err).sum();
        }
    }
    panels.sort_by(|x, y| x.lo.total_cmp(&y.lo));
    let value = panels.iter().map(|p| p.value).sum();
    Ok((value, total_err))
}

/// Double-exponential rule on (a, b) with endpoint singularities allowed.
///
/// Halves the step until two successive levels agree to `tol` relative.
pub fn tanh_sinh<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: f64) -> Result<Complex64> {
    let c = 0.5 * (a + b);
    let h2 = 0.5 * (b - a);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let eval = |t: f64| -> Complex64 {
        let u = half_pi * t.sinh();
        let x = u.tanh();
        let w = half_pi * t.cosh() / (u.cosh() * u.cosh());
        // distance to the nearer endpoint, computed without cancellation
        let e = 1.0 / (u.abs().exp() * u.abs().cosh());
        let d = h2 * e;
        if d <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let pt = if x < 0.0 { a + d } else { b - d };
        let pt = if x == 0.0 { c } else { pt };
        f(pt) * (w * h2)
    };
    de_levels(&eval, 6.5, tol)
}

/// Double-exponential rule on (a, ∞), x = a + exp(π/2·sinh t).
pub fn exp_sinh<F: Fn(f64) -> Complex64>(f: &F, a: f64, tol: f64) -> Result<Complex64> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let eval = |t: f64| -> Complex64 {
        let u = half_pi * t.sinh();
        if u > 700.0 {
            return Complex64::new(0.0, 0.0);
        }
        let x = u.exp();
        let w = half_pi * t.cosh() * x;
        let v = f(a + x);
        if v == Complex64::new(0.0, 0.0) {
            v
        } else {
            v * w
        }
    };
    de_levels(&eval, 5.0, tol)
}

fn de_levels<G: Fn(f64) -> Complex64>(g: &G, tmax: f64, tol: f64) -> Result<Complex64> {
    let mut h = 0.5;
    let mut sum = g(0.0);
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        if t > tmax {
            break;
        }
        sum += g(t) + g(-t);
        k += 1;
    }
    let mut prev = sum * h;
    let mut diff = f64::INFINITY;
    for _ in 0..9 {
        h *= 0.5;
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > tmax {
                break;
            }
            sum += g(t) + g(-t);
            k += 2;
        }
        let cur = sum * h;
        diff = (cur - prev).norm();
        if diff <= tol * cur.norm().max(1e-300) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature { estimate: diff, target: tol })
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = z;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gk_polynomial_exact() {
        let (v, e) = gk15(&|x: f64| x.powi(20), -1.0, 1.0);
        assert_relative_eq!(v, 2.0 / 21.0, epsilon = 1e-15);
        assert!(e > 0.0 && e < 1e-2);
    }

    #[test]
    fn adaptive_peak() {
        let f = |x: f64| 1.0 / (1e-4 + x * x);
        let (v, _) = adaptive(&f, -1.0, 1.0, 1e-10, 500).unwrap();
        assert_relative_eq!(v, 2.0 * (1.0f64 / 0.01).atan() / 0.01, max_relative = 1e-11);
    }

    #[test]
    fn de_rules() {
        let v = tanh_sinh(&|x: f64| Complex64::new(1.0 / x.sqrt(), 0.0), 0.0, 1.0, 1e-13).unwrap();
        assert_relative_eq!(v.re, 2.0, max_relative = 1e-12);
        let v = exp_sinh(&|x: f64| Complex64::new((-x).exp(), 0.0), 0.0, 1e-13).unwrap();
        assert_relative_eq!(v.re, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn legendre() {
        let (x, w) = gauss_legendre(20);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(38)).sum();
        assert_relative_eq!(s, 2.0 / 39.0, max_relative = 1e-13);
    }
}
