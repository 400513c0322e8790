#![allow(dead_code)]

use thetalift::maass::{FormOptions, MaassForm};

pub fn sample(name: &str) -> MaassForm {
    MaassForm::sample(name, &FormOptions::default()).unwrap()
}

/// E8 shell sizes from the coordinate model: v = a/2 with a ∈ ℤ⁸, all a_i of one parity,
/// Σa_i ≡ 0 mod 4, and q(v) = Σa_i²/8. Every a in the box |a_i| ≤ √(8M) is visited; the
/// two halves of the coordinate vector are tabulated separately and then paired.
pub fn e8_box_scan(max_norm: u64) -> Vec<u64> {
    let smax = 8 * max_norm as usize;
    let b = (smax as f64).sqrt() as i64;
    let mut out = vec![0u64; max_norm as usize + 1];
    for parity in 0..2i64 {
        // half[s][t]: number of a ∈ box⁴ of this parity with Σa² = s, Σa ≡ t mod 4
        let mut half = vec![[0u64; 4]; smax + 1];
        let vals: Vec<i64> = (-b..=b).filter(|a| a.rem_euclid(2) == parity).collect();
        for &a in &vals {
            for &c in &vals {
                for &d in &vals {
                    for &e in &vals {
                        let s = (a * a + c * c + d * d + e * e) as usize;
                        if s <= smax {
                            half[s][(a + c + d + e).rem_euclid(4) as usize] += 1;
                        }
                    }
                }
            }
        }
        for s1 in 0..=smax {
            for s2 in 0..=smax - s1 {
                let s = s1 + s2;
                if s == 0 || s % 8 != 0 {
                    continue;
                }
                for t1 in 0..4 {
                    out[s / 8] += half[s1][t1] * half[s2][(4 - t1) % 4];
                }
            }
        }
    }
    out
}

/// The same count by visiting every point of the box one at a time.
pub fn e8_naive_scan(max_norm: u64) -> Vec<u64> {
    let smax = 8 * max_norm as i64;
    let b = (smax as f64).sqrt() as i64;
    let w = 2 * b + 1;
    let mut out = vec![0u64; max_norm as usize + 1];
    for idx in 0..w.pow(8) {
        let mut k = idx;
        let mut a = [0i64; 8];
        for x in a.iter_mut() {
            *x = k % w - b;
            k /= w;
        }
        let p = a[0].rem_euclid(2);
        if a.iter().any(|x| x.rem_euclid(2) != p) || a.iter().sum::<i64>().rem_euclid(4) != 0 {
            continue;
        }
        let s: i64 = a.iter().map(|x| x * x).sum();
        if s > 0 && s <= smax {
            out[(s / 8) as usize] += 1;
        }
    }
    out
}
