mod common;

use num_rational::Ratio;
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;
use thetalift::arith;
use thetalift::bessel::{envelope, k_scaled, k_scaled_reference, ln_majorant, regime, Regime, FROZEN};
use thetalift::bounds::*;
use thetalift::lattice::{enumerate_shells, Lattice, ShellTable};
use thetalift::lift::{class_coefficient, coefficient_a, Lift, LiftOptions};
use thetalift::maass::MaassForm;
use thetalift::petersson::{arch_factor, ln_abs_gamma_sq, ln_abs_gamma_sq_complex, norm_ratio};

fn e8_table() -> &'static ShellTable {
    static T: OnceLock<ShellTable> = OnceLock::new();
    T.get_or_init(|| enumerate_shells(&Lattice::e8(), 10).unwrap())
}

fn even() -> &'static MaassForm {
    static F: OnceLock<MaassForm> = OnceLock::new();
    F.get_or_init(|| common::sample("sample-even"))
}

fn odd() -> &'static MaassForm {
    static F: OnceLock<MaassForm> = OnceLock::new();
    F.get_or_init(|| common::sample("sample-odd"))
}

#[test]
fn naive_box_scan_small_shells() {
    let naive = common::e8_naive_scan(3);
    let split = common::e8_box_scan(3);
    let t = e8_table();
    for m in 1..=3u64 {
        assert_eq!(naive[m as usize], split[m as usize]);
        assert_eq!(naive[m as usize], t.shell_count(m).unwrap());
    }
}

#[test]
fn shells_are_even_and_match_theta() {
    let t = e8_table();
    for m in 1..=10u64 {
        let c = t.shell_count(m).unwrap();
        assert_eq!(c % 2, 0);
        assert_eq!(c as u128, 240 * arith::sigma(3, m));
        assert_eq!(t.shell_divisor_sum(m, 0.0).unwrap(), c as f64);
    }
}

#[test]
fn divisor_sums() {
    let t = e8_table();
    assert_eq!(t.shell_divisor_sum(1, 2.0).unwrap(), 240.0);
    for e in [0.5, 1.0, 3.0] {
        assert_eq!(t.shell_divisor_sum(4, e).unwrap(), 17280.0 + 240.0 * 2f64.powf(e));
    }
    assert_eq!(t.shell_divisor_sum(3, 5.0).unwrap(), t.shell_count(3).unwrap() as f64);
    // Σ_{d²|m} r(m/d²) d^e ≤ 240 ζ(3) ζ(6 − e) m³ for e < 5
    let c = 240.0 * thetalift::special::zeta(3.0).powi(2);
    for kp in [0.5, 1.0, 2.0, 3.0] {
        for m in 1..=10u64 {
            let s = t.shell_divisor_sum(m, 3.0 - kp).unwrap();
            assert!(s <= c * (m as f64).powf(3.1), "k'={kp} m={m}");
        }
    }
}

#[test]
fn class_function_on_shells() {
    let t = e8_table();
    for f in [even(), odd()] {
        for m in 1..=10u64 {
            for v in t.vectors(m).unwrap() {
                let a = coefficient_a(&Lattice::e8(), f, &v).unwrap();
                assert_eq!(a, class_coefficient(8, f, m, v.primitivity).unwrap());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_moves_primitive_vectors(m in 1u64..=2, idx in 0usize..2160, t in 1i64..=2) {
        let tab = e8_table();
        let v = tab.vectors(m).unwrap();
        let v = &v[idx % v.len()];
        prop_assume!(v.primitivity == 1 && (t * t) as u64 * m <= 10);
        let w: Vec<i64> = v.coords.iter().map(|c| c * t).collect();
        let target = tab.vectors((t * t) as u64 * m).unwrap();
        let hit = target.iter().find(|u| u.coords == w);
        prop_assert!(hit.is_some());
        prop_assert_eq!(hit.unwrap().primitivity, t as u64);
    }

    #[test]
    fn bessel_agrees_with_reference(r in 0.0f64..120.0, f in 0.0f64..1.0) {
        let y = 0.5 + f * (4.0 * r + 4.5);
        let a = k_scaled(r, y).unwrap();
        let b = k_scaled_reference(r, &[y]).unwrap()[0];
        prop_assert!(((a - b) / b).abs() < 1e-9, "r={} y={} a={:e} b={:e}", r, y, a, b);
    }

    #[test]
    fn envelope_dominates(ri in 0usize..3, u in 0.0f64..1.0) {
        let r: f64 = [50.0, 100.0, 200.0][ri];
        let y = (4.0 * r).powf(u);
        let k = k_scaled(r, y).unwrap().abs();
        let (_, e) = envelope(r, y, &FROZEN, 1.0).unwrap();
        prop_assert!(k <= e, "r={} y={} k={:e} env={:e}", r, y, k, e);
        prop_assert!(k.ln() <= ln_majorant(r, y) + 1e-12);
    }

    #[test]
    fn regimes_partition(r in 1.0f64..500.0, y in 0.01f64..2000.0) {
        let w = r.cbrt();
        let reg = regime(r, y, 1.0);
        let expect = if y < r - w {
            Regime::Oscillatory
        } else if y <= r + w {
            Regime::Transition
        } else if y < 2.0 * r {
            Regime::DecayNear
        } else {
            Regime::DecayFar
        };
        prop_assert_eq!(reg, expect);
    }

    #[test]
    fn gamma_paths_agree(ni in 0usize..3, r in 0.0f64..200.0) {
        let n = [8, 16, 24][ni];
        let d = (ln_abs_gamma_sq(n, r).unwrap() - ln_abs_gamma_sq_complex(n, r).unwrap()).exp_m1();
        prop_assert!(d.abs() < 1e-10);
        prop_assert!(arch_factor(n, r).unwrap() > 0.0);
    }

    #[test]
    fn arch_decay_is_bounded(r in 10.0f64..200.0) {
        let v = arch_factor(8, r).unwrap().ln() + PI * r / 2.0 - 3.0 * r.ln();
        prop_assert!((-1.0..3.0).contains(&v), "r={} ln value {}", r, v);
    }

    #[test]
    fn norm_ratio_ignores_scale(alpha in -50.0f64..50.0) {
        prop_assume!(alpha.abs() > 1e-6);
        let a = norm_ratio(even(), 8, 200).unwrap();
        let b = norm_ratio(&even().scaled(alpha), 8, 200).unwrap();
        prop_assert!(((a.ratio - b.ratio) / a.ratio).abs() < 1e-12);
        prop_assert!(a.adjoint_l > 0.0 && a.zeta_half > 1.0 && a.zeta_rank > 1.0 && a.arch_factor > 0.0);
    }

    #[test]
    fn euler_truncation_within_tail(p in 20u64..2000, q in 20u64..2000, s in 4.0f64..8.0, odd_form in any::<bool>()) {
        let f = if odd_form { odd() } else { even() };
        let (lo, hi) = (p.min(q), p.max(q));
        let a = thetalift::petersson::adjoint_l(f, s, lo).unwrap();
        let b = thetalift::petersson::adjoint_l(f, s, hi).unwrap();
        prop_assert!((b.value - a.value).abs() <= a.tail_bound);
        prop_assert!(b.tail_bound <= a.tail_bound);
    }

    #[test]
    fn hecke_multiplicative(m in 1u64..300, n in 1u64..300) {
        prop_assume!(arith::gcd(m, n) == 1);
        let f = even();
        let lhs = f.hecke_eigenvalue(m * n).unwrap();
        let rhs = f.hecke_eigenvalue(m).unwrap() * f.hecke_eigenvalue(n).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn exponent_identities(k in 1i64..=8, num in 0i64..64, den in 1i64..64) {
        let n = 8 * k as usize;
        prop_assume!(4 * num < den);
        let th = Ratio::new(num, den);
        prop_assert!(y0_exponent(n, th) < Ratio::new(11, 12));
        prop_assert_eq!(fourier_exponent_at_y0(n, th), pretrace_exponent_at_y0(n, th));
        prop_assert_eq!(fourier_exponent_at_y0(n, th), crossing_exponent(n, th));
        prop_assert!(sup_exponent(n, th) <= secondary_exponent(n, th));
    }

    #[test]
    fn envelopes_monotone(r in 5.0f64..1e6, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let p = SpectralParams::new(r, 8, Ratio::new(7, 64)).unwrap();
        let c = EnvelopeConstants::default();
        let (y1, y2) = ((3.0 * r).powf(a.min(b)), (3.0 * r).powf(a.max(b)));
        prop_assert!(ln_fourier_envelope(&p, &c, y2).unwrap().1 <= ln_fourier_envelope(&p, &c, y1).unwrap().1);
        prop_assert!(ln_pretrace_envelope(&p, y2).unwrap() >= ln_pretrace_envelope(&p, y1).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tail_certificate(xs in proptest::collection::vec(-1.0f64..1.0, 8), y in 2.5f64..5.0, odd_form in any::<bool>()) {
        let f = if odd_form { odd() } else { even() };
        let lift = Lift::new(Lattice::e8(), f.clone(), LiftOptions::default()).unwrap();
        let (m, tail) = lift.truncation_for(y, 1e-8).unwrap();
        prop_assume!(2 * m <= 10);
        let a = lift.evaluate_truncated(Some(e8_table()), &xs, y, m).unwrap();
        let b = lift.evaluate_truncated(Some(e8_table()), &xs, y, 2 * m).unwrap();
        prop_assert!((a.mantissa - b.mantissa).norm() <= tail);
    }

    #[test]
    fn periodic_in_x(xs in proptest::collection::vec(-1.0f64..1.0, 8), y in 2.5f64..5.0) {
        let lift = Lift::new(Lattice::e8(), even().clone(), LiftOptions::default()).unwrap();
        let rep = lift.periodicity_check(e8_table(), &xs, y, 1e-8).unwrap();
        prop_assert!(rep.passed, "deviation {:e}", rep.max_deviation);
    }

    #[test]
    fn real_at_origin(y in 0.6f64..6.0) {
        let lift = Lift::new(Lattice::e8(), odd().clone(), LiftOptions::default()).unwrap();
        let e = lift.evaluate(&[0.0; 8], y, 1e-10).unwrap();
        prop_assert!(e.value.im.abs() <= 1e-10 * e.value.re.abs());
        prop_assert!(e.tail_bound >= 0.0);
    }
}
