//! Independent evaluation of e^{πr/2}K_{ir}(y) by integrating Bessel's equation.
//!
//! Starts from the large-argument asymptotic series at x₀ ≥ max(r², 50) and marches
//! x²w'' + xw' − (x² − r²)w = 0 towards the origin with Taylor steps. K_{ir} is the
//! solution that grows in that direction, so the march is stable.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Taylor coefficients of w about c from w(c), w'(c).
fn taylor_coeffs(r2: f64, c: f64, w: f64, dw: f64, h: f64, out: &mut Vec<f64>) {
    out.clear();
    out.push(w);
    out.push(dw);
    let c2 = c * c;
    let scale = w.abs() + dw.abs() * h;
    let mut small = 0;
    let mut k = 0usize;
    while k < 400 {
        let kf = k as f64;
        let am1 = if k >= 1 { out[k - 1] } else { 0.0 };
        let am2 = if k >= 2 { out[k - 2] } else { 0.0 };
        let next = (-c * (kf + 1.0) * (2.0 * kf + 1.0) * out[k + 1]
            - (kf * kf - c2 + r2) * out[k]
            + 2.0 * c * am1
            + am2)
            / (c2 * (kf + 1.0) * (kf + 2.0));
        out.push(next);
        k += 1;
        if (next * h.powi(k as i32 + 1)).abs() < 1e-19 * scale {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
}

/// k(r, y) at every y in `ys` (any order), each y > 0.
pub fn k_scaled_reference(r: f64, ys: &[f64]) -> Result<Vec<f64>> {
    if ys.iter().any(|&y| !(y > 0.0 && y.is_finite())) {
        return Err(Error::Domain("reference evaluation needs y > 0".into()));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("reference evaluation needs r >= 0, got {r}")));
    }
    let ymax = ys.iter().cloned().fold(0.0, f64::max);
    let x0 = (r * r).max(50.0).max(ymax + 1.0);
    let r2 = r * r;

    // asymptotic series: K = √(π/2x) e^{−x} Σ a_k x^{−k}, a_k = a_{k−1}(−4r² − (2k−1)²)/(8k)
    let mut sum = 1.0;
    let mut dsum = 0.0; // d/dx of Σ a_k x^{−k}
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..2000 {
        let kf = k as f64;
        let next = term * (-4.0 * r2 - (2.0 * kf - 1.0).powi(2)) / (8.0 * kf * x0);
        if next.abs() >= last || next.abs() < 1e-20 {
            break;
        }
        last = next.abs();
        term = next;
        sum += term;
        dsum -= kf * term / x0;
    }
    // w = e^{ln_scale}·(wv, dwv), with ln_scale holding e^{−x}, the prefactor and e^{πr/2}
    let mut ln_scale = -x0 + 0.5 * (PI / (2.0 * x0)).ln() + 0.5 * PI * r;
    let mut wv = sum;
    let mut dwv = dsum - sum * (1.0 + 0.5 / x0);

    let mut order: Vec<usize> = (0..ys.len()).collect();
    order.sort_by(|&i, &j| ys[j].total_cmp(&ys[i]));
    let mut out = vec![0.0; ys.len()];
    let mut x = x0;
    let mut coeffs = Vec::with_capacity(128);
    for &idx in &order {
        let target = ys[idx];
        while x > target {
            let omega = ((r2 / (x * x) - 1.0).abs()).sqrt().max(1.0);
            let mut h = (0.25 * x).min(2.0 / omega).min(2.0);
            if x - h < target {
                h = x - target;
            }
            taylor_coeffs(r2, x, wv, dwv, h, &mut coeffs);
            let mut w_new = 0.0;
            let mut dw_new = 0.0;
            let mut p = 1.0;
            for (k, &a) in coeffs.iter().enumerate() {
                w_new += a * p;
                if k + 1 < coeffs.len() {
                    dw_new += (k + 1) as f64 * coeffs[k + 1] * p;
                }
                p *= -h;
            }
            x = if x - h <= target { target } else { x - h };
            let norm = w_new.abs() + dw_new.abs();
            wv = w_new / norm;
            dwv = dw_new / norm;
            ln_scale += norm.ln();
        }
        out[idx] = wv * ln_scale.exp();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agrees_with_multiprecision() {
        for &(r, y, want) in &crate::bessel::tests::MP_REFERENCE {
            if want.abs() < 1e-300 || r > 200.0 {
                continue;
            }
            let got = k_scaled_reference(r, &[y]).unwrap()[0];
            let rel = (got - want).abs() / want.abs();
            assert!(rel < 1e-10, "r={r} y={y}: got {got:e}, want {want:e}, rel {rel:e}");
        }
    }
}
