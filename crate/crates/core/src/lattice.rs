//! Even unimodular lattices, shell enumeration and primitivity statistics.

use crate::arith;
use crate::error::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Rank-N even unimodular lattice given by its Gram matrix S, q(λ) = ½λᵀSλ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lattice {
    gram: Vec<Vec<i64>>,
    rank: usize,
}

#[derive(Deserialize)]
struct GramFile {
    rank: usize,
    gram: Vec<Vec<i64>>,
}

/// E8 Cartan matrix, Bourbaki labelling.
const E8_CARTAN: [[i64; 8]; 8] = [
    [2, 0, -1, 0, 0, 0, 0, 0],
    [0, 2, 0, -1, 0, 0, 0, 0],
    [-1, 0, 2, -1, 0, 0, 0, 0],
    [0, -1, -1, 2, -1, 0, 0, 0],
    [0, 0, 0, -1, 2, -1, 0, 0],
    [0, 0, 0, 0, -1, 2, -1, 0],
    [0, 0, 0, 0, 0, -1, 2, -1],
    [0, 0, 0, 0, 0, 0, -1, 2],
];

pub const BUILTIN_NAMES: [&str; 3] = ["E8", "E8xE8", "D16plus"];

impl Lattice {
    /// Validates S and wraps it.
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self> {
        let n = gram.len();
        if n == 0 || gram.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidLattice("Gram matrix must be square and non-empty".into()));
        }
        if n % 8 != 0 {
            return Err(Error::InvalidLattice(format!("rank {n} is not divisible by 8")));
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::InvalidLattice(format!("not symmetric at ({i}, {j})")));
                }
            }
            if gram[i][i] % 2 != 0 {
                return Err(Error::InvalidLattice(format!("odd diagonal entry at {i}")));
            }
        }
        let minors = leading_minors(&gram)?;
        if let Some(k) = minors.iter().position(|&d| d <= 0) {
            return Err(Error::InvalidLattice(format!(
                "not positive definite: leading minor {} is {}",
                k + 1,
                minors[k]
            )));
        }
        if minors[n - 1] != 1 {
            return Err(Error::InvalidLattice(format!(
                "determinant {} != 1, lattice is not unimodular",
                minors[n - 1]
            )));
        }
        Ok(Lattice { gram, rank: n })
    }

    pub fn e8() -> Self {
        Lattice::new(E8_CARTAN.iter().map(|r| r.to_vec()).collect()).expect("E8 Gram is valid")
    }

    pub fn e8xe8() -> Self {
        let mut g = vec![vec![0i64; 16]; 16];
        for b in 0..2 {
            for i in 0..8 {
                for j in 0..8 {
                    g[8 * b + i][8 * b + j] = E8_CARTAN[i][j];
                }
            }
        }
        Lattice::new(g).expect("E8xE8 Gram is valid")
    }

    /// D16⁺ from the basis e_{i+1} − e_i (i ≠ 15), e_1 + e_2 and the glue vector (½, …, ½).
    pub fn d16plus() -> Self {
        // basis vectors scaled by 2 so every entry is an integer
        let mut basis: Vec<Vec<i64>> = Vec::with_capacity(16);
        for i in 0..15 {
            if i == 14 {
                continue;
            }
            let mut v = vec![0i64; 16];
            v[i] = -2;
            v[i + 1] = 2;
            basis.push(v);
        }
        let mut v = vec![0i64; 16];
        v[0] = 2;
        v[1] = 2;
        basis.push(v);
        basis.push(vec![1i64; 16]);
        let g = basis
            .iter()
            .map(|a| basis.iter().map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum::<i64>() / 4).collect())
            .collect();
        Lattice::new(g).expect("D16+ Gram is valid")
    }

    pub fn builtin(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "e8" => Ok(Self::e8()),
            "e8xe8" | "e8+e8" => Ok(Self::e8xe8()),
            "d16plus" | "d16+" => Ok(Self::d16plus()),
            _ => Err(Error::InvalidLattice(format!(
                "unknown built-in lattice {name:?}; expected one of {}",
                BUILTIN_NAMES.join(", ")
            ))),
        }
    }

    /// Reads `{ "rank": N, "gram": [[...], ...] }`.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let f: GramFile = serde_json::from_str(s)?;
        if f.rank != f.gram.len() {
            return Err(Error::InvalidLattice(format!(
                "rank {} does not match Gram size {}",
                f.rank,
                f.gram.len()
            )));
        }
        Lattice::new(f.gram)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    /// q(λ) = ½λᵀSλ, exact.
    pub fn norm(&self, v: &[i64]) -> i64 {
        let mut s = 0i64;
        for i in 0..self.rank {
            if v[i] == 0 {
                continue;
            }
            s += v[i] * v[i] * self.gram[i][i];
            for j in 0..i {
                s += 2 * v[i] * v[j] * self.gram[i][j];
            }
        }
        s / 2
    }

    /// λᵀSμ, exact.
    pub fn inner(&self, u: &[i64], v: &[i64]) -> i64 {
        (0..self.rank)
            .map(|i| u[i] * (0..self.rank).map(|j| self.gram[i][j] * v[j]).sum::<i64>())
            .sum()
    }

    /// Fincke–Pohst data for the coordinate order λ_0 outermost.
    fn fp_data(&self) -> FpData {
        let n = self.rank;
        // Cholesky of the reversed Gram matrix so level N-1 of the recursion is coordinate 0
        let s: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| self.gram[n - 1 - i][n - 1 - j] as f64).collect())
            .collect();
        let mut r = vec![vec![0.0; n]; n];
        for i in 0..n {
            let mut d = s[i][i];
            for k in 0..i {
                d -= r[k][i] * r[k][i];
            }
            r[i][i] = d.sqrt();
            for j in i + 1..n {
                let mut v = s[i][j];
                for k in 0..i {
                    v -= r[k][i] * r[k][j];
                }
                r[i][j] = v / r[i][i];
            }
        }
        let diag: Vec<f64> = (0..n).map(|i| r[i][i] * r[i][i]).collect();
        let off: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if j > i { r[i][j] / r[i][i] } else { 0.0 }).collect())
            .collect();
        FpData { n, diag, off }
    }

    /// Visits every λ ≠ 0 with q(λ) ≤ max_norm whose first coordinate equals `first`,
    /// in lexicographic order, passing (coords, q(λ)).
    fn visit_slice<F: FnMut(&[i64], u64)>(&self, fp: &FpData, max_norm: u64, first: i64, visit: &mut F) {
        let n = fp.n;
        let bound = 2.0 * max_norm as f64;
        let slack = 1e-9 * (bound + 1.0);
        // mu[i] = λ_{n-1-i}
        let mut mu = vec![0i64; n];
        let mut lam = vec![0i64; n];
        let top = n - 1;
        let c = 0.0;
        let t = bound - fp.diag[top] * (first as f64 - c).powi(2);
        if t < -slack {
            return;
        }
        mu[top] = first;
        if n == 1 {
            lam[0] = first;
            let q = self.norm(&lam);
            if q > 0 && q as u64 <= max_norm {
                visit(&lam, q as u64);
            }
            return;
        }
        let mut rem = vec![0.0; n];
        rem[top] = t.max(0.0);
        self.recurse(fp, max_norm, top - 1, &mut mu, &mut lam, &mut rem, slack, visit);
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<F: FnMut(&[i64], u64)>(
        &self,
        fp: &FpData,
        max_norm: u64,
        level: usize,
        mu: &mut [i64],
        lam: &mut [i64],
        rem: &mut [f64],
        slack: f64,
        visit: &mut F,
    ) {
        let n = fp.n;
        let mut c = 0.0;
        for j in level + 1..n {
            c -= fp.off[level][j] * mu[j] as f64;
        }
        let budget = rem[level + 1];
        let w = ((budget + slack) / fp.diag[level]).sqrt();
        let lo = (c - w - 1e-9).ceil() as i64;
        let hi = (c + w + 1e-9).floor() as i64;
        for x in lo..=hi {
            mu[level] = x;
            let t = budget - fp.diag[level] * (x as f64 - c).powi(2);
            if t < -slack {
                continue;
            }
            if level == 0 {
                for i in 0..n {
                    lam[i] = mu[n - 1 - i];
                }
                let q = self.norm(lam);
                if q > 0 && q as u64 <= max_norm {
                    visit(lam, q as u64);
                }
            } else {
                rem[level] = t.max(0.0);
                self.recurse(fp, max_norm, level - 1, mu, lam, rem, slack, visit);
            }
        }
    }

    fn first_range(&self, fp: &FpData, max_norm: u64) -> (i64, i64) {
        let w = ((2.0 * max_norm as f64) * (1.0 + 1e-9) / fp.diag[fp.n - 1]).sqrt();
        (-(w.floor() as i64) - 1, w.floor() as i64 + 1)
    }

    /// Runs the enumeration, calling `visit` on every nonzero λ with q(λ) ≤ max_norm.
    /// Vectors arrive in lexicographic coordinate order.
    pub fn for_each_vector<F: FnMut(&[i64], u64)>(&self, max_norm: u64, mut visit: F) {
        let fp = self.fp_data();
        let (lo, hi) = self.first_range(&fp, max_norm);
        for first in lo..=hi {
            self.visit_slice(&fp, max_norm, first, &mut visit);
        }
    }
}

struct FpData {
    n: usize,
    diag: Vec<f64>,
    off: Vec<Vec<f64>>,
}

/// Leading principal minors by fraction-free (Bareiss) elimination.
fn leading_minors(g: &[Vec<i64>]) -> Result<Vec<i128>> {
    let n = g.len();
    let mut a: Vec<Vec<i128>> = g.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut minors = Vec::with_capacity(n);
    let mut prev = 1i128;
    for k in 0..n {
        let pivot = a[k][k];
        minors.push(pivot);
        if pivot <= 0 {
            // remaining minors are irrelevant once definiteness fails
            while minors.len() < n {
                minors.push(0);
            }
            return Ok(minors);
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[i][j]
                    .checked_mul(pivot)
                    .and_then(|x| x.checked_sub(a[i][k].checked_mul(a[k][j])?))
                    .ok_or_else(|| Error::InvalidLattice("Gram entries too large".into()))?;
                a[i][j] = v / prev;
            }
        }
        prev = pivot;
    }
    Ok(minors)
}

/// One stored shell vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShellVector {
    pub coords: Vec<i64>,
    pub norm_sq: u64,
    pub primitivity: u64,
}

/// Vectors of one shell, flat with stride `rank`.
#[derive(Debug, Clone, Default)]
pub struct Shell {
    coords: Vec<i16>,
    prim: Vec<u16>,
}

impl Shell {
    pub fn len(&self) -> usize {
        self.prim.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prim.is_empty()
    }

    pub fn primitivity(&self, i: usize) -> u64 {
        self.prim[i] as u64
    }

    pub fn coords(&self, i: usize, rank: usize) -> &[i16] {
        &self.coords[i * rank..(i + 1) * rank]
    }
}

/// All λ ≠ 0 with q(λ) ≤ max_norm, grouped by q(λ). Immutable once built.
#[derive(Debug, Clone)]
pub struct ShellTable {
    lattice: Lattice,
    max_norm: u64,
    shells: Vec<Shell>,
}

fn coord_gcd(v: &[i64]) -> u64 {
    v.iter().fold(0u64, |g, &x| arith::gcd(g, x.unsigned_abs()))
}

/// Enumerates all shells up to `max_norm` with Fincke–Pohst, in parallel over λ_0.
pub fn enumerate_shells(lat: &Lattice, max_norm: u64) -> Result<ShellTable> {
    if max_norm == 0 {
        return Err(Error::OutOfRange { what: "max_norm", detail: "must be at least 1".into() });
    }
    let fp = lat.fp_data();
    let (lo, hi) = lat.first_range(&fp, max_norm);
    if hi > i16::MAX as i64 {
        return Err(Error::OutOfRange {
            what: "max_norm",
            detail: format!("coordinates up to {hi} exceed the storage range"),
        });
    }
    let n = lat.rank;
    let m = max_norm as usize;
    let slices: Vec<Vec<Shell>> = (lo..=hi)
        .into_par_iter()
        .map(|first| {
            let mut part = vec![Shell::default(); m + 1];
            lat.visit_slice(&fp, max_norm, first, &mut |v, q| {
                let sh = &mut part[q as usize];
                sh.coords.extend(v.iter().map(|&x| x as i16));
                sh.prim.push(coord_gcd(v) as u16);
            });
            part
        })
        .collect();
    let mut shells = vec![Shell::default(); m + 1];
    for part in slices {
        for (q, sh) in part.into_iter().enumerate() {
            shells[q].coords.extend(sh.coords);
            shells[q].prim.extend(sh.prim);
        }
    }
    debug_assert!(shells.iter().all(|s| s.coords.len() == s.prim.len() * n));
    Ok(ShellTable { lattice: lat.clone(), max_norm, shells })
}

/// Shell sizes r(m) for 1 ≤ m ≤ max_norm without storing vectors. Index 0 is unused.
pub fn count_shells(lat: &Lattice, max_norm: u64) -> Vec<u64> {
    let fp = lat.fp_data();
    let (lo, hi) = lat.first_range(&fp, max_norm);
    let m = max_norm as usize;
    let parts: Vec<Vec<u64>> = (lo..=hi)
        .into_par_iter()
        .map(|first| {
            let mut c = vec![0u64; m + 1];
            lat.visit_slice(&fp, max_norm, first, &mut |_, q| c[q as usize] += 1);
            c
        })
        .collect();
    let mut out = vec![0u64; m + 1];
    for p in parts {
        for (a, b) in out.iter_mut().zip(p) {
            *a += b;
        }
    }
    out
}

impl ShellTable {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn max_norm(&self) -> u64 {
        self.max_norm
    }

    fn check(&self, m: u64) -> Result<()> {
        if m == 0 || m > self.max_norm {
            return Err(Error::OutOfRange {
                what: "shell index",
                detail: format!("m = {m} outside 1..={}", self.max_norm),
            });
        }
        Ok(())
    }

    pub fn shell(&self, m: u64) -> Result<&Shell> {
        self.check(m)?;
        Ok(&self.shells[m as usize])
    }

    pub fn shell_count(&self, m: u64) -> Result<u64> {
        Ok(self.shell(m)?.len() as u64)
    }

    /// Owned copies of the vectors in shell m.
    pub fn vectors(&self, m: u64) -> Result<Vec<ShellVector>> {
        let sh = self.shell(m)?;
        let n = self.lattice.rank;
        Ok((0..sh.len())
            .map(|i| ShellVector {
                coords: sh.coords(i, n).iter().map(|&x| x as i64).collect(),
                norm_sq: m,
                primitivity: sh.primitivity(i),
            })
            .collect())
    }

    /// Σ_{q(λ)=m} d_λ^e.
    pub fn shell_divisor_sum(&self, m: u64, exponent: f64) -> Result<f64> {
        let sh = self.shell(m)?;
        let mut by_d = std::collections::BTreeMap::new();
        for &d in &sh.prim {
            *by_d.entry(d).or_insert(0u64) += 1;
        }
        Ok(by_d.iter().map(|(&d, &c)| c as f64 * (d as f64).powf(exponent)).sum())
    }

    /// Number of vectors in shell m with primitivity d, for each d with d² | m.
    pub fn class_counts(&self, m: u64) -> Result<Vec<(u64, u64)>> {
        let sh = self.shell(m)?;
        let mut by_d = std::collections::BTreeMap::new();
        for &d in &sh.prim {
            *by_d.entry(d as u64).or_insert(0u64) += 1;
        }
        Ok(by_d.into_iter().collect())
    }

    pub fn total_vectors(&self) -> usize {
        self.shells.iter().map(|s| s.len()).sum()
    }
}

/// Shell sizes r(m), 1 ≤ m ≤ max_norm, from the theta series where it is determined by
/// the rank alone: θ_L = E_{N/2} for N = 8 and 16. Index 0 is unused.
pub fn theta_counts(rank: usize, max_norm: u64) -> Option<Vec<u64>> {
    let k = match rank {
        8 => 4u32,
        16 => 8u32,
        _ => return None,
    };
    let c: u128 = if k == 4 { 240 } else { 480 };
    let mut out = vec![0u64; max_norm as usize + 1];
    for m in 1..=max_norm {
        let v = c * arith::sigma(k - 1, m);
        out[m as usize] = u64::try_from(v).ok()?;
    }
    Some(out)
}

/// Counts of primitive vectors per norm from total counts: p(n) = Σ_{e²|n} μ(e) r(n/e²).
pub fn primitive_counts(counts: &[u64]) -> Vec<u64> {
    let m = counts.len().saturating_sub(1);
    let mut out = vec![0u64; m + 1];
    for n in 1..=m {
        let mut s: i128 = 0;
        let mut e = 1usize;
        while e * e <= n {
            if n % (e * e) == 0 {
                s += arith::mobius(e as u64) as i128 * counts[n / (e * e)] as i128;
            }
            e += 1;
        }
        out[n] = s as u64;
    }
    out
}
