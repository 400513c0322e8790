//! Sup-norm envelopes: the Fourier-side piecewise bound, the pre-trace bound, their
//! crossing point y₀, and the lower bound from the Bessel transition.

use crate::bessel::{regime, Regime, FROZEN, TRANSITION_PEAK};
use crate::error::{Error, Result};
use crate::lattice::{count_shells, Lattice};
use crate::lift::Lift;
use crate::petersson::NormFactorization;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

pub type Q = Ratio<i64>;

fn q(n: i64, d: i64) -> Q {
    Ratio::new(n, d)
}

fn to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Parses a fraction such as "7/64" or an integer. Decimals are rejected.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("expected a fraction like 7/64, got {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if b == 0 {
                return Err(bad());
            }
            Ok(q(a, b))
        }
        None => Ok(q(s.parse().map_err(|_| bad())?, 1)),
    }
}

/// (r, N, θ) for the bound formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParams {
    pub r: f64,
    pub rank: usize,
    pub theta: Q,
}

impl SpectralParams {
    pub fn new(r: f64, rank: usize, theta: Q) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("r must be positive, got {r}")));
        }
        if rank == 0 || rank % 8 != 0 {
            return Err(Error::Domain(format!("rank {rank} is not a positive multiple of 8")));
        }
        if theta < q(0, 1) || theta >= q(1, 4) {
            return Err(Error::Domain(format!("theta = {theta} outside [0, 1/4)")));
        }
        Ok(SpectralParams { r, rank, theta })
    }

    fn th(&self) -> f64 {
        to_f64(self.theta)
    }
}

/// Implied constants made explicit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeConstants {
    pub eps0: f64,
    /// C in the e^{−Cy} piece.
    pub decay: f64,
    /// Leading factor applied to min(fourier, pretrace) in scan dominance checks.
    pub dominance: f64,
}

impl Default for EnvelopeConstants {
    fn default() -> Self {
        EnvelopeConstants { eps0: 0.1, decay: FROZEN.c6, dominance: 1.0 }
    }
}

/// y₀ = r^e with e = (N/2 + 1 + 2θ)/(N + 1 + 2θ).
pub fn y0_exponent(rank: usize, theta: Q) -> Q {
    let n = q(rank as i64, 1);
    let two_th = theta * 2;
    (n / 2 + 1 + two_th) / (n + 1 + two_th)
}

/// N/4 + N(1+2θ)/(8(N+1+2θ)).
pub fn sup_exponent(rank: usize, theta: Q) -> Q {
    let n = q(rank as i64, 1);
    let two_th = theta * 2;
    n / 4 + n * (two_th + 1) / ((n + 1 + two_th) * 8)
}

/// The coarser N/4 + θ/4 + 1/8.
pub fn secondary_exponent(rank: usize, theta: Q) -> Q {
    q(rank as i64, 4) + theta / 4 + q(1, 8)
}

/// r-exponent of the first Fourier piece at y = y₀: 3N/4 + 1 + 2θ − (N/2 + 1 + 2θ)e.
pub fn fourier_exponent_at_y0(rank: usize, theta: Q) -> Q {
    let n = q(rank as i64, 1);
    let two_th = theta * 2;
    n * 3 / 4 + 1 + two_th - (n / 2 + 1 + two_th) * y0_exponent(rank, theta)
}

/// r-exponent of the ht^{N/2}(1+r)^{N/4} term at ht = y₀: N/4 + (N/2)e.
pub fn pretrace_exponent_at_y0(rank: usize, theta: Q) -> Q {
    let n = q(rank as i64, 1);
    n / 4 + n / 2 * y0_exponent(rank, theta)
}

/// N/2 + N(1+2θ)/(4(N+1+2θ)), the common value of the two exponents above.
pub fn crossing_exponent(rank: usize, theta: Q) -> Q {
    sup_exponent(rank, theta) * 2
}

/// N/8 + 1/12.
pub fn lower_exponent(rank: usize) -> Q {
    q(rank as i64, 8) + q(1, 12)
}

/// Which piece of the Fourier-side bound is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Piece {
    Low,
    Middle,
    Exponential,
}

/// ln of the Fourier-side bound for |F_f|/‖F_f‖₂ at height y ≥ 1.
///
/// The exponential piece takes over for y > r/2π; the middle piece is only reached when
/// r^{11/12} < r/2π, i.e. r > (2π)^{12}.
pub fn ln_fourier_envelope(p: &SpectralParams, c: &EnvelopeConstants, y: f64) -> Result<(Piece, f64)> {
    if !(y >= 1.0) {
        return Err(Error::Domain(format!("fourier envelope needs y >= 1, got {y}")));
    }
    let (r, n, th) = (p.r, p.rank as f64, p.th());
    let lr = r.ln();
    let ly = y.ln();
    if y > r / (2.0 * PI) {
        return Ok((Piece::Exponential, -c.decay * y));
    }
    if y <= r.powf(11.0 / 12.0) {
        Ok((Piece::Low, -(n / 2.0 + 1.0 + 2.0 * th) * ly + (0.75 * n + 1.0 + 2.0 * th + c.eps0) * lr))
    } else {
        Ok((Piece::Middle, -(n / 2.0 - 1.0 + 2.0 * th) * ly + (0.75 * n - 5.0 / 6.0 + 2.0 * th + c.eps0) * lr))
    }
}

pub fn fourier_envelope(p: &SpectralParams, c: &EnvelopeConstants, y: f64) -> Result<f64> {
    Ok(ln_fourier_envelope(p, c, y)?.1.exp())
}

/// ln[(1+r)^{N/2} + ht^{N/2}(1+r)^{N/4}].
pub fn ln_pretrace_envelope(p: &SpectralParams, ht: f64) -> Result<f64> {
    if !(ht >= 1.0) {
        return Err(Error::Domain(format!("pretrace envelope needs ht >= 1, got {ht}")));
    }
    let h = p.rank as f64 / 2.0;
    let l1 = p.r.ln_1p();
    let a = h * l1;
    let b = h * ht.ln() + 0.5 * h * l1;
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    Ok(hi + (lo - hi).exp().ln_1p())
}

pub fn pretrace_envelope(p: &SpectralParams, ht: f64) -> Result<f64> {
    Ok(ln_pretrace_envelope(p, ht)?.exp())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombinedBound {
    pub y0: f64,
    pub y0_exponent: String,
    pub sup_exponent: String,
    pub sup_exponent_value: f64,
    pub secondary_exponent: String,
    /// sup exponent ≤ the coarser exponent.
    pub within_secondary: bool,
    /// y₀ exponent < 11/12, compared as fractions.
    pub y0_below_transition: bool,
}

/// y₀ and the sup-norm exponent in Λ.
pub fn combined_bound(p: &SpectralParams) -> CombinedBound {
    let e = y0_exponent(p.rank, p.theta);
    let s = sup_exponent(p.rank, p.theta);
    let s2 = secondary_exponent(p.rank, p.theta);
    CombinedBound {
        y0: p.r.powf(to_f64(e)),
        y0_exponent: e.to_string(),
        sup_exponent: s.to_string(),
        sup_exponent_value: to_f64(s),
        secondary_exponent: s2.to_string(),
        within_secondary: s <= s2,
        y0_below_transition: e < q(11, 12),
    }
}

/// Both envelopes for one (r, N, θ) with their constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundProfile {
    pub params: SpectralParams,
    pub constants: EnvelopeConstants,
    pub y0: f64,
    /// Exponent of Λ in the combined sup-norm bound.
    pub combined_exponent: f64,
}

impl BoundProfile {
    pub fn new(params: SpectralParams, constants: EnvelopeConstants) -> Self {
        let cb = combined_bound(&params);
        BoundProfile { params, constants, y0: cb.y0, combined_exponent: cb.sup_exponent_value }
    }

    pub fn fourier_env(&self, y: f64) -> Result<f64> {
        fourier_envelope(&self.params, &self.constants, y)
    }

    pub fn pretrace_env(&self, ht: f64) -> Result<f64> {
        pretrace_envelope(&self.params, ht)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBound {
    /// ln(|c(1)|·r^{N/2−1/3}·e^{−πr/2}).
    pub ln_value: f64,
    /// Exponent of Λ in ‖F_f‖_∞/‖F_f‖₂ ≫ Λ^{N/8+1/12−ε}.
    pub lambda_exponent: String,
    /// Number of norm-1 vectors.
    pub shell_one: u64,
    /// Fitted constant for the witness: half of r₁(4π)^{−N/2} times the lower end of the
    /// transition-peak interval.
    pub witness_constant: f64,
}

pub fn lower_bound(lat: &Lattice, c1: f64, r: f64) -> Result<LowerBound> {
    let n = lat.rank();
    let r1 = count_shells(lat, 1)[1];
    if r1 == 0 {
        return Err(Error::InvalidLattice("no vector of norm 1".into()));
    }
    let h = n as f64 / 2.0;
    Ok(LowerBound {
        ln_value: c1.abs().ln() + (h - 1.0 / 3.0) * r.ln() - FRAC_PI_2 * r,
        lambda_exponent: lower_exponent(n).to_string(),
        shell_one: r1,
        witness_constant: 0.5 * r1 as f64 * (4.0 * PI).powf(-h) * TRANSITION_PEAK.0,
    })
}

/// Largest |F_f(0, y)| over the m = 1 transition window |4πy − r| ≤ r^{1/3}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub y: f64,
    pub ln_peak: f64,
    /// peak/(|c(1)|r^{N/2−1/3}e^{−πr/2}).
    pub ratio: f64,
    pub witness_constant: f64,
    /// 4πy − r at the maximum.
    pub offset: f64,
    /// The maximum is not at either end of the window.
    pub interior: bool,
    pub passed: bool,
}

pub fn lower_bound_witness(lift: &Lift, points: usize, tol: f64) -> Result<Witness> {
    let f = lift.form();
    let r = f.r();
    let lb = lower_bound(lift.lattice(), f.c1(), r)?;
    let half = r.cbrt() / (4.0 * PI);
    let centre = r / (4.0 * PI);
    let points = points.max(3);
    let zero = vec![0.0; lift.lattice().rank()];
    let ys: Vec<f64> = (0..points)
        .map(|i| centre - half + 2.0 * half * i as f64 / (points - 1) as f64)
        .collect();
    let vals: Vec<f64> = ys
        .par_iter()
        .map(|&y| Ok(lift.evaluate(&zero, y, tol)?.ln_abs()))
        .collect::<Result<_>>()?;
    let (i, &ln_peak) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least three points");
    let ratio = (ln_peak - lb.ln_value).exp();
    let offset = 4.0 * PI * ys[i] - r;
    Ok(Witness {
        y: ys[i],
        ln_peak,
        ratio,
        witness_constant: lb.witness_constant,
        offset,
        interior: i > 0 && i + 1 < points,
        passed: ratio >= lb.witness_constant && offset.abs() <= 3.0 * r.cbrt(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub y: f64,
    /// |F_f(0, y)|/‖F_f‖₂.
    pub value: f64,
    pub fourier_env: f64,
    pub pretrace_env: f64,
    /// Regime of k(r, 4πy), the norm-1 shell.
    pub regime: Regime,
    pub dominated: bool,
}

/// |F_f(0, y)|/‖F_f‖₂ on a uniform grid against both envelopes, ht = y.
pub fn supnorm_scan(
    lift: &Lift,
    norm: &NormFactorization,
    consts: &EnvelopeConstants,
    theta: Q,
    (ymin, ymax): (f64, f64),
    points: usize,
    tol: f64,
) -> Result<Vec<ScanRow>> {
    if !(ymin >= 1.0 && ymax > ymin && points >= 2) {
        return Err(Error::Domain(format!(
            "scan needs 1 <= ymin < ymax and at least 2 points, got [{ymin}, {ymax}] x {points}"
        )));
    }
    let f = lift.form();
    let params = SpectralParams::new(f.r(), lift.lattice().rank(), theta)?;
    let ln_norm = 0.5 * norm.lift_norm_sq(f)?.ln();
    let zero = vec![0.0; lift.lattice().rank()];
    (0..points)
        .into_par_iter()
        .map(|i| {
            let y = ymin + (ymax - ymin) * i as f64 / (points - 1) as f64;
            let e = lift.evaluate(&zero, y, tol)?;
            let ln_v = e.ln_abs() - ln_norm;
            let (_, lf) = ln_fourier_envelope(&params, consts, y)?;
            let lp = ln_pretrace_envelope(&params, y)?;
            Ok(ScanRow {
                y,
                value: ln_v.exp(),
                fourier_env: lf.exp(),
                pretrace_env: lp.exp(),
                regime: regime(f.r(), 4.0 * PI * y, FROZEN.width),
                dominated: ln_v <= consts.dominance.ln() + lf.min(lp),
            })
        })
        .collect()
}

/// Least-squares slope of ln(value) against y over rows with y > y_from; −slope is the
/// fitted decay rate C′.
pub fn decay_rate(rows: &[ScanRow], y_from: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.y > y_from && r.value > 0.0)
        .map(|r| (r.y, r.value.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = pts
        .iter()
        .fold((0.0, 0.0), |a, p| (a.0 + (p.0 - mx) * (p.1 - my), a.1 + (p.0 - mx) * (p.0 - mx)));
    Some(-num / den)
}

/// Interior local maxima of the scanned curve.
pub fn local_maxima(rows: &[ScanRow]) -> Vec<f64> {
    rows.windows(3)
        .filter(|w| w[1].value > w[0].value && w[1].value >= w[2].value)
        .map(|w| w[1].y)
        .collect()
}

/// The interior local maximum of the scan that lies in the m = 1 transition window
/// |4πy − r| ≤ width·r^{1/3}, if any.
pub fn transition_peak_in_scan(rows: &[ScanRow], r: f64, width: f64) -> Option<f64> {
    let w = width * r.cbrt();
    rows.windows(3)
        .filter(|v| v[1].value > v[0].value && v[1].value >= v[2].value)
        .filter(|v| (4.0 * PI * v[1].y - r).abs() <= w)
        .max_by(|a, b| a[1].value.total_cmp(&b[1].value))
        .map(|v| v[1].y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta() -> Q {
        q(7, 64)
    }

    #[test]
    fn exponents_at_rank_eight() {
        assert_eq!(y0_exponent(8, theta()), q(167, 295));
        assert_eq!(sup_exponent(8, theta()), q(2, 1) + q(39, 295));
        assert!(sup_exponent(8, theta()) <= secondary_exponent(8, theta()));
        assert_eq!(fourier_exponent_at_y0(8, theta()), pretrace_exponent_at_y0(8, theta()));
        assert_eq!(fourier_exponent_at_y0(8, theta()), crossing_exponent(8, theta()));
        assert_eq!(lower_exponent(8), q(13, 12));
    }

    #[test]
    fn theta_zero_limit() {
        for n in [8i64, 16, 24, 32] {
            assert_eq!(sup_exponent(n as usize, q(0, 1)), q(n, 4) + q(n, 8 * (n + 1)));
        }
    }

    #[test]
    fn piece_continuity() {
        // r large enough that the middle piece exists
        let p = SpectralParams::new(1e10, 8, theta()).unwrap();
        let c = EnvelopeConstants::default();
        let yt = p.r.powf(11.0 / 12.0);
        let (a, la) = ln_fourier_envelope(&p, &c, yt).unwrap();
        let (b, lb) = ln_fourier_envelope(&p, &c, yt * (1.0 + 1e-12)).unwrap();
        assert_eq!((a, b), (Piece::Low, Piece::Middle));
        assert!((la - lb).abs() < 1e-6);
    }

    #[test]
    fn pretrace_examples() {
        let p = SpectralParams::new(10.0, 8, theta()).unwrap();
        let v = pretrace_envelope(&p, 1.0).unwrap();
        let want = 11f64.powi(4) * (1.0 + 11f64.powi(-2));
        assert!((v / want - 1.0).abs() < 1e-13);
        assert!(pretrace_envelope(&p, 2.0).unwrap() > v);
    }

    #[test]
    fn monotone_envelopes() {
        let c = EnvelopeConstants::default();
        for r in [10.0, 27.5, 200.0, 1e9] {
            let p = SpectralParams::new(r, 8, theta()).unwrap();
            let mut prev = (f64::INFINITY, 0.0);
            for i in 0..400 {
                let y = (3.0 * r).powf(i as f64 / 399.0);
                let f = ln_fourier_envelope(&p, &c, y).unwrap().1;
                let t = ln_pretrace_envelope(&p, y).unwrap();
                assert!(f <= prev.0 && t >= prev.1, "r={r} y={y}");
                prev = (f, t);
            }
        }
    }

    #[test]
    fn y0_below_transition_on_grid() {
        for n in (8..=64).step_by(8) {
            for k in 0..16 {
                let e = y0_exponent(n, q(k, 64));
                assert!(e < q(11, 12), "N={n} theta={k}/64");
                assert_eq!(fourier_exponent_at_y0(n, q(k, 64)), pretrace_exponent_at_y0(n, q(k, 64)));
            }
        }
    }

    #[test]
    fn lower_bound_needs_norm_one() {
        let lb = lower_bound(&Lattice::e8(), 1.0, 30.0).unwrap();
        assert_eq!(lb.shell_one, 240);
        assert_eq!(lb.lambda_exponent, "13/12");
        assert!((lb.ln_value - ((4.0 - 1.0 / 3.0) * 30f64.ln() - 15.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn parse() {
        assert_eq!(parse_rational("7/64").unwrap(), theta());
        assert_eq!(parse_rational(" 3 ").unwrap(), q(3, 1));
        assert!(parse_rational("0.1").is_err());
        assert!(parse_rational("1/0").is_err());
    }
}
