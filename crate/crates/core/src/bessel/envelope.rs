//! Regime envelopes for k(r, y) and the rigorous majorant used for tail bounds.

use super::k_scaled;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Regime {
    Oscillatory,
    Transition,
    DecayNear,
    DecayFar,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Oscillatory => "OSCILLATORY",
            Regime::Transition => "TRANSITION",
            Regime::DecayNear => "DECAY_NEAR",
            Regime::DecayFar => "DECAY_FAR",
        })
    }
}

/// Envelope constants. `width` is the transition half-width in units of r^{1/3}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BesselConstants {
    pub width: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
}

/// Frozen constants.
///
/// c4 and c6 are half of the analytic infima of −ln k·r^{1/2}(y−r)^{−3/2} on (r, 2r] and
/// of −ln k/y on [2r, ∞) (0.685 and 0.342). c1, c2, c3, c5 are twice the largest ratio
/// k/shape seen by [`calibrate`] on r ∈ {50, 100, 200}.
pub const FROZEN: BesselConstants = BesselConstants {
    width: 1.0,
    c1: 5.01,
    c2: 4.30,
    c3: 1.12,
    c4: 0.34,
    c5: 8.8e-9,
    c6: 0.17,
};

/// Interval [c, C] containing r^{1/3}·max k(r, y) over |y − r| ≤ r^{1/3}; the observed
/// values on r ∈ {50, 100, 200} are 2.130 to 2.146.
pub const TRANSITION_PEAK: (f64, f64) = (1.5, 3.0);

impl Default for BesselConstants {
    fn default() -> Self {
        FROZEN
    }
}

impl BesselConstants {
    pub fn validate(&self) -> Result<()> {
        let all = [self.width, self.c1, self.c2, self.c3, self.c4, self.c5, self.c6];
        if all.iter().all(|c| c.is_finite() && *c > 0.0) {
            Ok(())
        } else {
            Err(Error::Config("Bessel constants must be positive".into()))
        }
    }
}

pub fn regime(r: f64, y: f64, width: f64) -> Regime {
    let w = width * r.cbrt();
    if y < r - w {
        Regime::Oscillatory
    } else if y <= r + w {
        Regime::Transition
    } else if y < 2.0 * r {
        Regime::DecayNear
    } else {
        Regime::DecayFar
    }
}

/// Envelope with unit leading constant, for calibration.
fn shape(reg: Regime, r: f64, y: f64, c: &BesselConstants) -> f64 {
    match reg {
        Regime::Oscillatory => r.powf(-0.25) * (r - y).powf(-0.25),
        Regime::Transition => r.powf(-1.0 / 3.0),
        Regime::DecayNear => {
            let d = y - r;
            r.powf(-0.25) * d.powf(-0.25) * (-c.c4 * d.powf(1.5) / r.sqrt()).exp()
        }
        Regime::DecayFar => (-c.c6 * y).exp(),
    }
}

/// The bound for the regime containing (r, y).
pub fn envelope(r: f64, y: f64, c: &BesselConstants, r_min: f64) -> Result<(Regime, f64)> {
    if r < r_min || !(y > 0.0) {
        return Err(Error::Domain(format!("envelope needs r >= {r_min} and y > 0, got r={r}, y={y}")));
    }
    let reg = regime(r, y, c.width);
    let lead = match reg {
        Regime::Oscillatory => c.c1,
        Regime::Transition => c.c2,
        Regime::DecayNear => c.c3,
        Regime::DecayFar => c.c5,
    };
    Ok((reg, lead * shape(reg, r, y, c)))
}

/// ln of a rigorous bound for |k(r, y)|:
/// min over α ∈ [0, π/2) of r(π/2 − α) + ln K₀(y cos α), with K₀(z) ≤ √(π/2z)e^{−z}.
pub fn ln_majorant(r: f64, y: f64) -> f64 {
    let f = |a: f64| {
        let z = y * a.cos();
        r * (FRAC_PI_2 - a) - z + 0.5 * (PI / (2.0 * z)).ln()
    };
    // f'(α) = −r + y sin α + ½ tan α is increasing; bisect for its root
    let df = |a: f64| -r + y * a.sin() + 0.5 * a.tan();
    let (mut lo, mut hi) = (0.0, FRAC_PI_2 - 1e-12);
    if df(lo) >= 0.0 {
        return f(lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if df(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    f(0.5 * (lo + hi))
}

/// Largest k(r, y) on |y − r| ≤ width·r^{1/3} and where it occurs.
pub fn transition_peak(r: f64, width: f64) -> Result<(f64, f64)> {
    let w = width * r.cbrt();
    let n = 400;
    let mut best = (r, f64::NEG_INFINITY);
    for i in 0..=n {
        let y = r - w + 2.0 * w * i as f64 / n as f64;
        let v = k_scaled(r, y)?;
        if v > best.1 {
            best = (y, v);
        }
    }
    // golden-section refinement around the grid maximum
    let h = 2.0 * w / n as f64;
    let (mut a, mut b) = ((best.0 - h).max(r - w), (best.0 + h).min(r + w));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if k_scaled(r, c)? > k_scaled(r, d)? {
            b = d;
        } else {
            a = c;
        }
    }
    let y = 0.5 * (a + b);
    let v = k_scaled(r, y)?;
    Ok(if v > best.1 { (y, v) } else { best })
}

/// Largest |k|/shape per regime over a grid.
#[derive(Debug, Clone, Serialize)]
pub struct CalibrationReport {
    pub max_ratio: [f64; 4],
    pub argmax: [(f64, f64); 4],
    pub points: usize,
}

impl CalibrationReport {
    /// Constants with leading factors set to `safety` × the observed maxima.
    pub fn constants(&self, base: &BesselConstants, safety: f64) -> BesselConstants {
        BesselConstants {
            c1: safety * self.max_ratio[0],
            c2: safety * self.max_ratio[1],
            c3: safety * self.max_ratio[2],
            c5: safety * self.max_ratio[3],
            ..*base
        }
    }
}

fn regime_index(reg: Regime) -> usize {
    match reg {
        Regime::Oscillatory => 0,
        Regime::Transition => 1,
        Regime::DecayNear => 2,
        Regime::DecayFar => 3,
    }
}

/// Scans `points` log-spaced y in [1, 4r] plus the regime boundaries for each r.
pub fn calibrate(rs: &[f64], points: usize, c: &BesselConstants) -> Result<CalibrationReport> {
    let mut rep = CalibrationReport { max_ratio: [0.0; 4], argmax: [(0.0, 0.0); 4], points: 0 };
    for &r in rs {
        let w = c.width * r.cbrt();
        let mut ys: Vec<f64> = (0..points)
            .map(|i| (4.0 * r).powf(i as f64 / (points - 1) as f64))
            .collect();
        for t in 0..200 {
            let f = t as f64 / 199.0;
            ys.push(r - w - 1e-9 - 3.0 * w * f);
            ys.push(r - w + 2.0 * w * f);
            ys.push(r + w + 1e-9 + (r - w) * f * f);
            ys.push(2.0 * r + 0.5 * r * f);
        }
        for y in ys {
            if !(1.0..=4.0 * r).contains(&y) {
                continue;
            }
            let reg = regime(r, y, c.width);
            let k = k_scaled(r, y)?.abs();
            let ratio = k / shape(reg, r, y, c);
            let i = regime_index(reg);
            rep.points += 1;
            if ratio > rep.max_ratio[i] {
                rep.max_ratio[i] = ratio;
                rep.argmax[i] = (r, y);
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_examples() {
        assert_eq!(regime(100.0, 50.0, 1.0), Regime::Oscillatory);
        assert_eq!(regime(100.0, 100.0, 1.0), Regime::Transition);
        assert_eq!(regime(100.0, 150.0, 1.0), Regime::DecayNear);
        assert_eq!(regime(100.0, 300.0, 1.0), Regime::DecayFar);
        let (reg, v) = envelope(100.0, 300.0, &FROZEN, 1.0).unwrap();
        assert_eq!(reg, Regime::DecayFar);
        assert_eq!(v, FROZEN.c5 * (-300.0 * FROZEN.c6).exp());
    }

    #[test]
    fn frozen_constants_cover_calibration() {
        let rep = calibrate(&[50.0, 100.0], 300, &FROZEN).unwrap();
        let lead = [FROZEN.c1, FROZEN.c2, FROZEN.c3, FROZEN.c5];
        for (m, c) in rep.max_ratio.iter().zip(lead) {
            assert!(*m > 0.0 && *m <= c / 1.5, "{m} vs {c}");
        }
    }

    #[test]
    fn majorant_dominates() {
        for &(r, y) in &[(0.0, 1.0), (5.0, 5.0), (50.0, 25.0), (50.0, 100.0), (100.0, 140.0), (27.5, 90.0)] {
            let k = k_scaled(r, y).unwrap().abs();
            assert!(k.ln() <= ln_majorant(r, y), "r={r} y={y}");
        }
    }
}
