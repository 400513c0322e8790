//! The invariant suite behind `thetalift verify`.

use crate::arith;
use crate::bessel::{airy_transition, calibrate, k_scaled, k_scaled_reference, transition_peak, BesselConstants, TRANSITION_PEAK};
use crate::bounds::{
    combined_bound, fourier_exponent_at_y0, lower_bound_witness, pretrace_exponent_at_y0, secondary_exponent,
    sup_exponent, y0_exponent, SpectralParams, Q,
};
use crate::error::Result;
use crate::lattice::{count_shells, enumerate_shells, theta_counts, Lattice};
use crate::lift::{coefficient_sweep, Lift, LiftOptions, COEFF_BOUND_CONSTANT};
use crate::maass::MaassForm;
use crate::petersson::{arch_factor_quadrature, arch_factor, beta_oracle_tol, ln_abs_gamma_sq, ln_abs_gamma_sq_complex, norm_ratio};
use num_complex::Complex64;
use num_rational::Ratio;
use serde::Serialize;
use std::time::Instant;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub bessel: BesselConstants,
    pub theta: Q,
    pub lift: LiftOptions,
    pub tol: f64,
    pub quad_tol: f64,
    pub primes: u64,
}

fn run(checks: &mut Vec<Check>, name: &str, f: impl FnOnce() -> Result<(bool, String)>) {
    let t = Instant::now();
    let (passed, detail) = match f() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    checks.push(Check { name: name.into(), passed, detail, seconds: t.elapsed().as_secs_f64() });
}

/// Runs every check; `forms` are the Maass forms used by the lift and norm checks.
pub fn run_suite(forms: &[(String, MaassForm)], o: &VerifyOptions) -> Report {
    let mut c = Vec::new();

    run(&mut c, "shells/e8_theta", || {
        let n = count_shells(&Lattice::e8(), 20);
        let bad: Vec<u64> = (1..=20u64).filter(|&m| n[m as usize] as u128 != 240 * arith::sigma(3, m)).collect();
        Ok((bad.is_empty(), format!("m <= 20, mismatches {bad:?}")))
    });
    run(&mut c, "shells/rank16_theta", || {
        let want = theta_counts(16, 4).expect("rank 16 has a closed form");
        let mut ok = true;
        for l in [Lattice::e8xe8(), Lattice::d16plus()] {
            ok &= count_shells(&l, 4) == want;
        }
        Ok((ok, "E8xE8 and D16plus against 480 sigma_7, m <= 4".into()))
    });
    run(&mut c, "shells/scaling", || {
        let t = enumerate_shells(&Lattice::e8(), 8)?;
        let ok = t.class_counts(4)? == vec![(1, 17280), (2, 240)]
            && t.class_counts(8)?.iter().find(|x| x.0 == 2).map(|x| x.1) == Some(2160);
        Ok((ok, "2λ has d = 2 in shells 4 and 8".into()))
    });

    run(&mut c, "bessel/dual_oracle", || {
        let mut worst: f64 = 0.0;
        for r in [0.0, 5.0, 50.0, 100.0] {
            let ys: Vec<f64> = (0..50).map(|i| 0.5 + (4.0 * r + 4.5) * i as f64 / 49.0).collect();
            let refs = k_scaled_reference(r, &ys)?;
            for (y, b) in ys.iter().zip(refs) {
                let a = k_scaled(r, *y)?;
                if b != 0.0 {
                    worst = worst.max(((a - b) / b).abs());
                }
            }
        }
        Ok((worst < 1e-9, format!("max relative deviation {worst:.3e}")))
    });
    run(&mut c, "bessel/transition", || {
        let mut detail = Vec::new();
        let mut ok = true;
        for r in [50.0, 100.0, 200.0] {
            let (y, v) = transition_peak(r, 1.0)?;
            let s = v * r.cbrt();
            ok &= (TRANSITION_PEAK.0..=TRANSITION_PEAK.1).contains(&s);
            let a = airy_transition(r, y, 1.0)?;
            ok &= (a.value - v).abs() <= 5.0 * y.powf(-2.0 / 3.0);
            detail.push(format!("r={r}: {s:.4}"));
        }
        Ok((ok, detail.join(", ")))
    });
    run(&mut c, "bessel/envelopes", || {
        let rep = calibrate(&[50.0, 100.0, 200.0], 1000, &o.bessel)?;
        let b = &o.bessel;
        let lead = [b.c1, b.c2, b.c3, b.c5];
        let ok = rep.max_ratio.iter().zip(lead).all(|(m, c)| *m <= c);
        Ok((ok, format!("{} points, max ratios {:?}", rep.points, rep.max_ratio)))
    });

    run(&mut c, "gamma/finite_product", || {
        let mut worst: f64 = 0.0;
        for n in [8, 16, 24] {
            for i in 0..=200 {
                let r = i as f64;
                worst = worst.max((ln_abs_gamma_sq(n, r)? - ln_abs_gamma_sq_complex(n, r)?).exp_m1().abs());
            }
        }
        Ok((worst < 1e-10, format!("max relative deviation {worst:.3e}")))
    });
    run(&mut c, "gamma/beta_oracle", || {
        let mut worst: f64 = 0.0;
        for n in [8.0, 16.0, 24.0] {
            let b = beta_oracle_tol(Complex64::new(0.5, 0.0), Complex64::new(n / 4.0, 0.0), o.quad_tol)?;
            worst = worst.max(b.discrepancy);
            for r in [0.0, 2.0, 5.0] {
                let v = Complex64::new(n / 4.0, r / 2.0);
                worst = worst.max(beta_oracle_tol(v, v.conj(), o.quad_tol)?.discrepancy);
            }
        }
        let q = arch_factor_quadrature(8, 2.0)?;
        let dev = (q / arch_factor(8, 2.0)? - 1.0).abs();
        Ok((worst < 1e-8 && dev < 1e-8, format!("beta {worst:.3e}, assembled B(s0) {dev:.3e}")))
    });

    for (label, f) in forms {
        run(&mut c, &format!("norm/{label}"), || {
            let a = norm_ratio(f, 8, o.primes)?;
            let b = norm_ratio(&f.scaled(3.25), 8, o.primes)?;
            let scale = ((a.ratio - b.ratio) / a.ratio).abs();
            let paths = ((a.ratio - a.ratio_complex) / a.ratio).abs();
            let p50 = crate::petersson::adjoint_l(f, 4.0, 50)?;
            let p100 = crate::petersson::adjoint_l(f, 4.0, 100)?;
            let step = (p100.value - p50.value).abs();
            let ok = scale < 1e-12 && paths < 1e-9 && step <= p50.tail_bound && a.ratio > 0.0;
            Ok((ok, format!("rescale {scale:.1e}, gamma paths {paths:.1e}, L(P=100)-L(P=50) {step:.2e} <= {:.2e}", p50.tail_bound)))
        });
    }

    run(&mut c, "bounds/exponents", || {
        let th = o.theta;
        let mut ok = fourier_exponent_at_y0(8, th) == pretrace_exponent_at_y0(8, th)
            && sup_exponent(8, th) <= secondary_exponent(8, th);
        if th == Ratio::new(7, 64) {
            ok &= y0_exponent(8, th) == Ratio::new(167, 295) && sup_exponent(8, th) == Ratio::new(629, 295);
        }
        for n in (8..=64).step_by(8) {
            for k in 0..16 {
                let t = Ratio::new(k, 64);
                ok &= y0_exponent(n, t) < Ratio::new(11, 12)
                    && fourier_exponent_at_y0(n, t) == pretrace_exponent_at_y0(n, t);
            }
        }
        let cb = combined_bound(&SpectralParams::new(27.5, 8, th)?);
        Ok((ok, format!("y0 = r^{}, sup = Λ^{}", cb.y0_exponent, cb.sup_exponent)))
    });

    for (label, f) in forms {
        run(&mut c, &format!("coefficients/{label}"), || {
            let (ratio, at) = coefficient_sweep(&Lattice::e8(), f, 10_000, o.lift.eps0)?;
            Ok((ratio <= COEFF_BOUND_CONSTANT, format!("max ratio {ratio:.4} at {at:?}, constant {COEFF_BOUND_CONSTANT}")))
        });
        run(&mut c, &format!("lift/{label}"), || {
            let lift = Lift::new(Lattice::e8(), f.clone(), o.lift)?;
            let w = lower_bound_witness(&lift, 201, o.tol)?;
            let y = 2.5;
            let (m, _) = lift.truncation_for(y, o.tol)?;
            let table = enumerate_shells(&Lattice::e8(), 2 * m)?;
            let x0 = vec![0.0; 8];
            let e = lift.evaluate_with(&table, &x0, y, o.tol)?;
            let real = e.mantissa.im.abs() <= 1e-10 * e.mantissa.re.abs();
            let x: Vec<f64> = (0..8).map(|i| 0.1 * i as f64 - 0.3).collect();
            let a = lift.evaluate_truncated(Some(&table), &x, y, m)?;
            let b = lift.evaluate_truncated(Some(&table), &x, y, 2 * m)?;
            let tail = lift.tail_profile(y)?.tail(m);
            let cert = (a.mantissa - b.mantissa).norm() <= tail;
            let per = lift.periodicity_check(&table, &x, y, o.tol)?;
            Ok((
                w.passed && real && cert && per.passed,
                format!(
                    "witness ratio {:.4} at 4πy - r = {:.3}; real {real}; tail certificate {cert}; periodicity {:.1e}",
                    w.ratio, w.offset, per.max_deviation
                ),
            ))
        });
    }

    let passed = c.iter().all(|x| x.passed);
    Report { passed, checks: c }
}
