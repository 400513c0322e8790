//! Gamma, zeta and the classical K₀, in double precision.

use num_complex::Complex64;
use std::f64::consts::PI;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// B_{2k}/(2k(2k-1)) for the Stirling series, k = 1..10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// ln Γ(z) for Re z > 0, principal branch continued along the shift.
///
/// Stirling series after shifting Re z above 16.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    assert!(z.re > 0.0, "ln_gamma_complex needs Re z > 0");
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < 16.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        series += p * c;
        p *= inv2;
    }
    (w - 0.5) * w.ln() - w + LN_SQRT_2PI + series - shift
}

/// ln Γ(x) for real x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    ln_gamma_complex(Complex64::new(x, 0.0)).re
}

pub fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// ln Γ(k + 1/2) for integer k ≥ 0, from Γ(k+1/2) = (2k)!/(4^k k!)·√π.
pub fn ln_gamma_half_integer(k: u64) -> f64 {
    0.5 * PI.ln() + (1..=k).map(|j| ((2 * j - 1) as f64 / 2.0).ln()).sum::<f64>()
}

/// ln sinh(x) for x > 0 without overflow.
pub fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// ln cosh(x) without overflow.
pub fn ln_cosh(x: f64) -> f64 {
    let x = x.abs();
    x - std::f64::consts::LN_2 + (-2.0 * x).exp().ln_1p()
}

/// B_{2k}/(2k)! for k = 1..8.
const BERN_OVER_FACT: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
    -3617.0 / 10_670_622_842_880_000.0,
];

/// Riemann ζ(s) for real s > 1 by Euler–Maclaurin summation.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta needs s > 1");
    let n = 12usize;
    let nf = n as f64;
    let mut sum = 0.0;
    for k in (1..n).rev() {
        sum += (k as f64).powf(-s);
    }
    sum += nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    // rising factorial s(s+1)...(s+2k-2) times N^{-s-2k+1}
    let mut rising = s;
    let mut npow = nf.powf(-s - 1.0);
    for (k, c) in BERN_OVER_FACT.iter().enumerate() {
        sum += c * rising * npow;
        let a = s + 2.0 * k as f64 + 1.0;
        rising *= a * (a + 1.0);
        npow /= nf * nf;
    }
    sum
}

/// Classical K₀(x), x > 0: power series for x ≤ 2, Steed's continued fraction beyond.
pub fn bessel_k0(x: f64) -> f64 {
    assert!(x > 0.0);
    if x <= 2.0 {
        const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
        let q = 0.25 * x * x;
        let lead = -((0.5 * x).ln() + EULER_GAMMA);
        let mut term = 1.0;
        let mut harmonic = 0.0;
        let mut sum = lead;
        for k in 1..60 {
            let kf = k as f64;
            term *= q / (kf * kf);
            harmonic += 1.0 / kf;
            let add = term * (lead + harmonic);
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        // Steed's algorithm for K_ν(x), ν = 0
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..10_000 {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < 1e-17 {
                break;
            }
        }
        (PI / (2.0 * x)).sqrt() * (-x).exp() / s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_values() {
        assert_relative_eq!(ln_gamma(0.5), 0.5 * PI.ln(), epsilon = 1e-14);
        assert_relative_eq!(ln_gamma(5.0), 24f64.ln(), epsilon = 1e-14);
        assert_relative_eq!(ln_gamma_half_integer(2), ln_gamma(2.5), epsilon = 1e-14);
        // multiprecision reference for |Γ(2+i)|²
        let z = ln_gamma_complex(Complex64::new(2.0, 1.0));
        assert_relative_eq!((2.0 * z.re).exp(), 0.544_058_109_964_266_3, epsilon = 1e-14);
    }

    #[test]
    fn zeta_values() {
        assert_relative_eq!(zeta(2.0), PI * PI / 6.0, epsilon = 1e-15);
        assert_relative_eq!(zeta(5.0), 1.036_927_755_143_369_9, epsilon = 1e-15);
        assert_relative_eq!(zeta(8.0), PI.powi(8) / 9450.0, epsilon = 1e-15);
        assert_relative_eq!(zeta(13.0), 1.000_122_713_347_578_5, epsilon = 1e-15);
    }

    #[test]
    fn k0_values() {
        assert_relative_eq!(bessel_k0(1.0), 0.421_024_438_240_708_33, max_relative = 1e-14);
        assert_relative_eq!(bessel_k0(0.01), 4.721_244_730_161_095, max_relative = 1e-14);
        assert_relative_eq!(bessel_k0(30.0), 2.132_477_496_463_056_4e-14, max_relative = 1e-13);
        let a = bessel_k0(2.0 - 1e-12);
        let b = bessel_k0(2.0 + 1e-12);
        assert_relative_eq!(a, b, max_relative = 1e-11);
    }
}
