//! Fourier coefficients A(λ) of the lift and evaluation of F_f(n(x)a_y).
//!
//! F_f(n(x)a_y) = Σ_λ A(λ) y^{N/2} K_{ir}(4π|λ|y) e(λᵀSx). Values are carried as
//! e^{ln_scale}·mantissa with ln_scale = −πr/2 + (N/2)ln y, so the e^{−πr/2} factor of
//! K_{ir} never meets floating point. Tolerances and tail bounds on the mantissa are
//! therefore relative to the natural scale e^{−πr/2}y^{N/2}.

use crate::arith;
use crate::bessel::{k_scaled_parts, ln_majorant};
use crate::error::{Error, Result};
use crate::lattice::{enumerate_shells, primitive_counts, theta_counts, count_shells, Lattice, ShellTable, ShellVector};
use crate::maass::MaassForm;
use crate::special::{ln_cosh, zeta};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

/// Fitted constant in front of the coefficient bound; twice the largest |A(λ)|/bound seen
/// on E8 for m ≤ 10⁴ over both shipped forms.
pub const COEFF_BOUND_CONSTANT: f64 = 1.35;

/// Explicit tail terms run until both the term and the analytic remainder are below this,
/// in units of e^{−πr/2}y^{N/2}.
const TAIL_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiftOptions {
    /// Smallest admissible y.
    pub y_min: f64,
    /// ε₀ in the coefficient bound.
    pub eps0: f64,
    /// Largest truncation norm M an evaluation may use.
    pub shell_budget: u64,
    /// Largest number of stored vectors when x ≠ 0 forces explicit enumeration.
    pub vector_budget: u64,
}

impl Default for LiftOptions {
    fn default() -> Self {
        LiftOptions { y_min: 0.5, eps0: 0.1, shell_budget: 5000, vector_budget: 20_000_000 }
    }
}

/// A(λ) for the class (m, d): √m Σ_{e | d} c(−m/e²) e^{N/2−2}.
pub fn class_coefficient(rank: usize, f: &MaassForm, m: u64, d: u64) -> Result<f64> {
    if m == 0 || d == 0 || m % (d * d) != 0 {
        return Err(Error::Domain(format!("class (m={m}, d={d}) needs d² | m")));
    }
    let w = rank as i32 / 2 - 2;
    let mut s = 0.0;
    for e in arith::divisors(d) {
        let n = (m / (e * e)) as i64;
        s += f.coefficient(-n)? * (e as f64).powi(w);
    }
    Ok((m as f64).sqrt() * s)
}

/// A(λ) = |λ|_S Σ_{d | d_λ} c(−|λ|²/d²) d^{N/2−2}.
pub fn coefficient_a(lat: &Lattice, f: &MaassForm, v: &ShellVector) -> Result<f64> {
    class_coefficient(lat.rank(), f, v.norm_sq, v.primitivity)
}

/// ln of m^{(2θ+1+ε₀)/2}·d^{N/2−2−2θ}·r^{ε₀}·√cosh(πr/2)·‖f‖₂, without the fitted constant.
pub fn ln_coefficient_bound_unit(f: &MaassForm, rank: usize, m: u64, d: u64, eps0: f64) -> Result<f64> {
    let n2 = f.norm_sq().ok_or(Error::MissingNorm)?;
    if d == 0 || m % (d * d) != 0 {
        return Err(Error::Domain(format!("coefficient bound needs d² | m, got m={m}, d={d}")));
    }
    let th = f.theta();
    Ok(0.5 * (2.0 * th + 1.0 + eps0) * (m as f64).ln()
        + (rank as f64 / 2.0 - 2.0 - 2.0 * th) * (d as f64).ln()
        + eps0 * f.r().ln()
        + 0.5 * ln_cosh(FRAC_PI_2 * f.r())
        + 0.5 * n2.ln())
}

/// The fitted coefficient bound for |A(λ)| on the class (m, d).
pub fn coefficient_bound(f: &MaassForm, rank: usize, m: u64, d: u64, eps0: f64) -> Result<f64> {
    Ok(COEFF_BOUND_CONSTANT * ln_coefficient_bound_unit(f, rank, m, d, eps0)?.exp())
}

/// A(m, d) for every class with d² | m ≤ max_norm.
#[derive(Debug, Clone)]
pub struct ClassCoefficients {
    max_norm: u64,
    classes: Vec<Vec<(u64, f64)>>,
}

impl ClassCoefficients {
    pub fn new(rank: usize, f: &MaassForm, max_norm: u64) -> Result<Self> {
        let mut classes = vec![Vec::new(); max_norm as usize + 1];
        for m in 1..=max_norm {
            let top = arith::square_part_root(m);
            for d in arith::divisors(top) {
                classes[m as usize].push((d, class_coefficient(rank, f, m, d)?));
            }
        }
        Ok(ClassCoefficients { max_norm, classes })
    }

    pub fn max_norm(&self) -> u64 {
        self.max_norm
    }

    pub fn get(&self, m: u64, d: u64) -> Option<f64> {
        self.classes
            .get(m as usize)?
            .iter()
            .find(|&&(e, _)| e == d)
            .map(|&(_, a)| a)
    }

    pub fn classes(&self, m: u64) -> &[(u64, f64)] {
        &self.classes[m as usize]
    }
}

/// Upper bound for the shell size r(n): exact for ranks 8 and 16, otherwise twice the
/// Eisenstein main term c_k σ_{k−1}(n).
pub fn shell_count_bound(rank: usize, n: u64) -> f64 {
    let k = rank as u32 / 2;
    match rank {
        8 => 240.0 * arith::sigma(3, n) as f64,
        16 => 480.0 * arith::sigma(7, n) as f64,
        _ => 2.0 * arith::eisenstein_constant(k) * arith::sigma(k - 1, n) as f64,
    }
}

/// Constant C with shell_count_bound(n) ≤ C n^{N/2−1}.
fn shell_count_power_constant(rank: usize) -> f64 {
    let k = rank as u32 / 2;
    let lead = match rank {
        8 => 240.0,
        16 => 480.0,
        _ => 2.0 * arith::eisenstein_constant(k),
    };
    lead * zeta((k - 1) as f64)
}

/// ln of a bound for Σ_{q(λ)=m} |A(λ)|, using |μ(n)| ≤ τ(n)n^θ.
fn ln_shell_mass_bound(rank: usize, c1: f64, theta: f64, m: u64) -> f64 {
    let w = rank as i32 / 2 - 2;
    let mut s = 0.0;
    for d in arith::divisors(arith::square_part_root(m)) {
        let n = m / (d * d);
        s += shell_count_bound(rank, n) * arith::tau(n) as f64 * (n as f64).powf(theta) * (d as f64).powi(w);
    }
    c1.abs().ln() + 0.5 * (m as f64).ln() + s.ln()
}

/// Majorants of the discarded shells m > M, in units of e^{−πr/2}y^{N/2}.
#[derive(Debug, Clone, Serialize)]
pub struct TailProfile {
    /// terms[m − 1] bounds the contribution of shell m, for m ≤ explicit_end.
    terms: Vec<f64>,
    /// Bound for every shell beyond explicit_end together.
    remainder: f64,
}

impl TailProfile {
    pub fn explicit_end(&self) -> u64 {
        self.terms.len() as u64
    }

    /// Bound for Σ_{m > M} of the shell contributions.
    pub fn tail(&self, m: u64) -> f64 {
        let start = (m as usize).min(self.terms.len());
        self.terms[start..].iter().rev().sum::<f64>() + self.remainder
    }
}

/// Compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct Kahan {
    sum: Complex64,
    c: Complex64,
}

impl Kahan {
    fn add(&mut self, v: Complex64) {
        let y = v - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

/// F_f(n(x)a_y) = e^{ln_scale}·mantissa.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftEvaluation {
    pub x: Vec<f64>,
    pub y: f64,
    /// Value in natural units; underflows to 0 when ln_scale is very negative.
    pub value: Complex64,
    pub mantissa: Complex64,
    pub ln_scale: f64,
    pub truncation_m: u64,
    /// Bound on |exact − value| in natural units.
    pub tail_bound: f64,
    /// The same bound relative to e^{ln_scale}: truncation majorant plus rounding allowance.
    pub tail_scaled: f64,
}

impl LiftEvaluation {
    /// ln |F|, finite even when `value` underflows.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.ln_scale
    }
}

/// Comparison of F at x and at lattice translates x ± e_j.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodicityReport {
    pub max_deviation: f64,
    pub allowed: f64,
    pub passed: bool,
}

/// A lattice and a form, ready for evaluation.
#[derive(Debug, Clone)]
pub struct Lift {
    lattice: Lattice,
    form: MaassForm,
    opts: LiftOptions,
}

impl Lift {
    pub fn new(lattice: Lattice, form: MaassForm, opts: LiftOptions) -> Result<Self> {
        if !(opts.y_min > 0.0 && opts.eps0 > 0.0 && opts.shell_budget >= 1) {
            return Err(Error::Config("lift options need y_min > 0, eps0 > 0, shell_budget >= 1".into()));
        }
        Ok(Lift { lattice, form, opts })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn form(&self) -> &MaassForm {
        &self.form
    }

    pub fn options(&self) -> &LiftOptions {
        &self.opts
    }

    fn half_rank(&self) -> f64 {
        self.lattice.rank() as f64 / 2.0
    }

    fn check_y(&self, y: f64) -> Result<()> {
        if !(y >= self.opts.y_min && y.is_finite()) {
            return Err(Error::Domain(format!("y = {y} below y_min = {}", self.opts.y_min)));
        }
        Ok(())
    }

    /// −πr/2 + (N/2) ln y.
    pub fn ln_scale(&self, y: f64) -> f64 {
        -FRAC_PI_2 * self.form.r() + self.half_rank() * y.ln()
    }

    /// Shell-by-shell majorants for the discarded part of the expansion at height y.
    pub fn tail_profile(&self, y: f64) -> Result<TailProfile> {
        self.check_y(y)?;
        let rank = self.lattice.rank();
        let (r, c1, th) = (self.form.r(), self.form.c1(), self.form.theta());
        let b = 4.0 * PI * y;
        // remainder exponent: mass ≤ A0 m^{N/2+θ}, K_{ir}(z) ≤ √(π/2z)e^{−z}
        let a = self.half_rank() + th - 0.25;
        let s = 2.0 * a + 2.0;
        let ln_a0 = c1.abs().ln()
            + (2.0 * shell_count_power_constant(rank) * zeta(self.half_rank() + 1.0)).ln()
            + FRAC_PI_2 * r
            + 0.5 * (PI / (2.0 * b)).ln();
        // Σ_{n>m} n^a e^{−b√n} ≤ 2b^{−s}Γ(s, x) ≤ 2b^{−s}x^{s−1}e^{−x}/(1 − (s−1)/x), x = b√m,
        // valid once x ≥ 2(s − 1) and n^a e^{−b√n} decreases beyond m
        let ln_rem = |m: u64| {
            let x = b * (m as f64).sqrt();
            if x < 2.0 * (s - 1.0) || (m as f64).sqrt() < 2.0 * a / b {
                return f64::INFINITY;
            }
            ln_a0 + 2f64.ln() - s * b.ln() + (s - 1.0) * x.ln() - x - (1.0 - (s - 1.0) / x).ln()
        };
        let mut terms = Vec::new();
        let mut m = 1u64;
        let ln_rem = loop {
            let z = b * (m as f64).sqrt();
            let t = (ln_shell_mass_bound(rank, c1, th, m) + ln_majorant(r, z)).exp();
            terms.push(t);
            let lr = ln_rem(m);
            if z > r && t <= TAIL_FLOOR && lr.exp() <= TAIL_FLOOR {
                break lr;
            }
            m += 1;
            if m > 10_000_000 {
                return Err(Error::Domain(format!("tail profile did not settle at y = {y}")));
            }
        };
        Ok(TailProfile { terms, remainder: ln_rem.exp() })
    }

    /// Smallest M whose tail majorant is below `tol`, with that majorant.
    pub fn truncation_for(&self, y: f64, tol: f64) -> Result<(u64, f64)> {
        if !(tol > 0.0) {
            return Err(Error::Domain(format!("tol must be positive, got {tol}")));
        }
        let prof = self.tail_profile(y)?;
        let mut m = 1;
        loop {
            let t = prof.tail(m);
            if t < tol {
                return Ok((m, t));
            }
            if m >= self.opts.shell_budget || m > prof.explicit_end() {
                return Err(Error::Budget { tol, budget: self.opts.shell_budget, tail: t });
            }
            m += 1;
        }
    }

    /// F at (x, y) with the tail below `tol` (relative to e^{−πr/2}y^{N/2}).
    ///
    /// x = 0 runs on shell counts alone; otherwise shells up to M are enumerated.
    pub fn evaluate(&self, x: &[f64], y: f64, tol: f64) -> Result<LiftEvaluation> {
        let (m, _) = self.truncation_for(y, tol)?;
        if x.iter().all(|&v| v == 0.0) && x.len() == self.lattice.rank() {
            return self.evaluate_truncated(None, x, y, m);
        }
        self.check_vector_budget(m)?;
        let table = enumerate_shells(&self.lattice, m)?;
        self.evaluate_truncated(Some(&table), x, y, m)
    }

    /// Same as [`evaluate`](Self::evaluate) on a prebuilt shell table.
    pub fn evaluate_with(&self, table: &ShellTable, x: &[f64], y: f64, tol: f64) -> Result<LiftEvaluation> {
        let (m, _) = self.truncation_for(y, tol)?;
        self.evaluate_truncated(Some(table), x, y, m)
    }

    fn check_vector_budget(&self, m: u64) -> Result<()> {
        let total: f64 = (1..=m).map(|n| shell_count_bound(self.lattice.rank(), n)).sum();
        if total > self.opts.vector_budget as f64 {
            return Err(Error::OutOfRange {
                what: "vector budget",
                detail: format!("about {total:.0} vectors needed for M = {m}, budget {}", self.opts.vector_budget),
            });
        }
        Ok(())
    }

    /// Class sizes n(m, d) = #{λ : q(λ) = m, d_λ = d}, m ≤ M, from the theta series when the
    /// rank determines it and from a counting pass otherwise.
    fn class_sizes(&self, max_norm: u64) -> Vec<Vec<(u64, u64)>> {
        let counts = theta_counts(self.lattice.rank(), max_norm)
            .unwrap_or_else(|| count_shells(&self.lattice, max_norm));
        let prim = primitive_counts(&counts);
        (0..=max_norm)
            .map(|m| {
                if m == 0 {
                    return Vec::new();
                }
                arith::divisors(arith::square_part_root(m))
                    .into_iter()
                    .map(|d| (d, prim[(m / (d * d)) as usize]))
                    .filter(|&(_, c)| c > 0)
                    .collect()
            })
            .collect()
    }

    /// F with the expansion cut at q(λ) ≤ M. Without a table x must be 0.
    pub fn evaluate_truncated(
        &self,
        table: Option<&ShellTable>,
        x: &[f64],
        y: f64,
        max_norm: u64,
    ) -> Result<LiftEvaluation> {
        self.check_y(y)?;
        let n = self.lattice.rank();
        if x.len() != n {
            return Err(Error::Domain(format!("x has length {}, lattice rank is {n}", x.len())));
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::Domain("x must be finite".into()));
        }
        let coeffs = ClassCoefficients::new(n, &self.form, max_norm)?;
        let r = self.form.r();
        // w = Sx, so λᵀSx = λ·w
        let w: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| self.lattice.gram()[i][j] as f64 * x[j]).sum())
            .collect();

        // per shell: (Σ_d A(m,d)·S(m,d), Σ_d |A(m,d)|·n(m,d))
        let shell_sums: Vec<(Complex64, f64)> = match table {
            None => {
                if x.iter().any(|&v| v != 0.0) {
                    return Err(Error::Domain("a shell table is needed for x != 0".into()));
                }
                let sizes = self.class_sizes(max_norm);
                (1..=max_norm)
                    .map(|m| {
                        let mut s = 0.0;
                        let mut mass = 0.0;
                        for &(d, c) in &sizes[m as usize] {
                            let a = coeffs.get(m, d).unwrap_or(0.0);
                            s += a * c as f64;
                            mass += a.abs() * c as f64;
                        }
                        (Complex64::new(s, 0.0), mass)
                    })
                    .collect()
            }
            Some(t) => {
                if t.lattice() != &self.lattice {
                    return Err(Error::Domain("shell table belongs to a different lattice".into()));
                }
                if t.max_norm() < max_norm {
                    return Err(Error::OutOfRange {
                        what: "shell table",
                        detail: format!("covers m <= {}, evaluation needs {max_norm}", t.max_norm()),
                    });
                }
                (1..=max_norm)
                    .into_par_iter()
                    .map(|m| {
                        let sh = t.shell(m).expect("m within table range");
                        let cls = coeffs.classes(m);
                        let mut acc = vec![Kahan::default(); cls.len()];
                        let mut cnt = vec![0u64; cls.len()];
                        for i in 0..sh.len() {
                            let v = sh.coords(i, n);
                            let mut ph = 0.0;
                            for (c, wi) in v.iter().zip(&w) {
                                ph += *c as f64 * wi;
                            }
                            let frac = ph - ph.round();
                            let (s, c) = (2.0 * PI * frac).sin_cos();
                            let d = sh.primitivity(i);
                            let k = cls.iter().position(|&(e, _)| e == d).expect("class present");
                            acc[k].add(Complex64::new(c, s));
                            cnt[k] += 1;
                        }
                        let mut s = Complex64::new(0.0, 0.0);
                        let mut mass = 0.0;
                        for (k, &(_, a)) in cls.iter().enumerate() {
                            s += acc[k].sum * a;
                            mass += a.abs() * cnt[k] as f64;
                        }
                        (s, mass)
                    })
                    .collect()
            }
        };

        let b = 4.0 * PI * y;
        let ks: Vec<(f64, f64)> = (1..=max_norm)
            .into_par_iter()
            .map(|m| {
                let kv = k_scaled_parts(r, b * (m as f64).sqrt())?;
                Ok((kv.value(), kv.err * kv.ln_scale.exp()))
            })
            .collect::<Result<_>>()?;

        let mut total = Kahan::default();
        let mut rounding = 0.0;
        for ((s, mass), (k, kerr)) in shell_sums.iter().zip(&ks) {
            total.add(s * *k);
            rounding += mass * (kerr.abs() + 1e-13 * k.abs());
        }
        let prof = self.tail_profile(y)?;
        let tail_scaled = prof.tail(max_norm) + rounding;
        let ln_scale = self.ln_scale(y);
        let mantissa = total.sum;
        let scale = ln_scale.exp();
        Ok(LiftEvaluation {
            x: x.to_vec(),
            y,
            value: mantissa * scale,
            mantissa,
            ln_scale,
            truncation_m: max_norm,
            tail_bound: tail_scaled * scale,
            tail_scaled,
        })
    }

    /// Compares F(x, y) with F(x ± e_j, y) for every basis vector e_j.
    pub fn periodicity_check(&self, table: &ShellTable, x: &[f64], y: f64, tol: f64) -> Result<PeriodicityReport> {
        let base = self.evaluate_with(table, x, y, tol)?;
        let mut worst: f64 = 0.0;
        for j in 0..self.lattice.rank() {
            for sign in [1.0, -1.0] {
                let mut xs = x.to_vec();
                xs[j] += sign;
                let e = self.evaluate_truncated(Some(table), &xs, y, base.truncation_m)?;
                worst = worst.max((e.mantissa - base.mantissa).norm());
            }
        }
        let allowed = 10.0 * tol;
        Ok(PeriodicityReport { max_deviation: worst, allowed, passed: worst <= allowed })
    }
}

/// Largest |A(λ)|/bound_unit over all classes (m, d) with m ≤ max_norm that occur in the
/// lattice, with the class where it occurs.
pub fn coefficient_sweep(
    lat: &Lattice,
    f: &MaassForm,
    max_norm: u64,
    eps0: f64,
) -> Result<(f64, (u64, u64))> {
    let rank = lat.rank();
    let counts = theta_counts(rank, max_norm).unwrap_or_else(|| count_shells(lat, max_norm));
    let prim = primitive_counts(&counts);
    let per_m: Vec<(f64, (u64, u64))> = (1..=max_norm)
        .into_par_iter()
        .map(|m| {
            let mut best = (0.0, (m, 1));
            for d in arith::divisors(arith::square_part_root(m)) {
                if prim[(m / (d * d)) as usize] == 0 {
                    continue;
                }
                let a = class_coefficient(rank, f, m, d)?;
                let ratio = (a.abs().ln() - ln_coefficient_bound_unit(f, rank, m, d, eps0)?).exp();
                if ratio > best.0 {
                    best = (ratio, (m, d));
                }
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;
    Ok(per_m.into_iter().fold((0.0, (1, 1)), |acc, v| if v.0 > acc.0 { v } else { acc }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maass::FormOptions;
    use std::collections::BTreeMap;

    fn toy(parity: i8) -> MaassForm {
        let mut h = BTreeMap::new();
        for (p, v) in [(2, 0.7), (3, -1.1), (5, 0.3), (7, -0.4), (11, 1.2), (13, 0.1)] {
            h.insert(p, v);
        }
        MaassForm::new(12.0, parity, 1.5, h, Some(2e-8), &FormOptions::default()).unwrap()
    }

    #[test]
    fn coefficient_examples() {
        let f = toy(-1);
        let e = -1.5;
        assert!((class_coefficient(8, &f, 1, 1).unwrap() - e).abs() < 1e-15);
        let want = 2.0 * e * (0.7 * 0.7 - 1.0 + 4.0);
        assert!((class_coefficient(8, &f, 4, 2).unwrap() - want).abs() < 1e-14);
        let want = 3f64.sqrt() * e * -1.1;
        assert!((class_coefficient(8, &f, 3, 1).unwrap() - want).abs() < 1e-14);
        assert!(class_coefficient(8, &f, 3, 2).is_err());
    }

    #[test]
    fn bound_ratio() {
        let f = toy(1);
        let a = coefficient_bound(&f, 8, 4, 2, 0.1).unwrap();
        let b = coefficient_bound(&f, 8, 4, 1, 0.1).unwrap();
        let want = 2f64.powf(8.0 / 2.0 - 2.0 - 2.0 * f.theta());
        assert!((a / b / want - 1.0).abs() < 1e-13);
    }

    #[test]
    fn origin_is_real_and_tail_shrinks() {
        let lift = Lift::new(Lattice::e8(), toy(1), LiftOptions::default()).unwrap();
        let e = lift.evaluate(&[0.0; 8], 1.5, 1e-10).unwrap();
        assert_eq!(e.mantissa.im, 0.0);
        assert!(e.tail_scaled < 1e-10);
        let prof = lift.tail_profile(1.5).unwrap();
        assert!(prof.tail(e.truncation_m + 3) <= prof.tail(e.truncation_m));
    }

    #[test]
    fn table_matches_counts_at_origin() {
        let lift = Lift::new(Lattice::e8(), toy(1), LiftOptions::default()).unwrap();
        let table = enumerate_shells(&Lattice::e8(), 6).unwrap();
        let a = lift.evaluate_truncated(None, &[0.0; 8], 2.0, 6).unwrap();
        let b = lift.evaluate_truncated(Some(&table), &[0.0; 8], 2.0, 6).unwrap();
        assert!((a.mantissa - b.mantissa).norm() < 1e-12 * a.mantissa.norm());
    }
}
