//! Elementary arithmetic functions on small positive integers.

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Primes `<= n` by the sieve of Eratosthenes.
pub fn primes_upto(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut comp = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if comp[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            comp[j] = true;
            j += i;
        }
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization as (p, k) pairs in increasing p.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Sorted positive divisors of n.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, k) in factorize(n) {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..k {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

pub fn tau(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, k)| k as u64 + 1).product()
}

/// σ_k(n) by direct divisor sum; exact as long as the result fits in u128.
pub fn sigma(k: u32, n: u64) -> u128 {
    divisors(n).iter().map(|&d| (d as u128).pow(k)).sum()
}

/// Möbius function.
pub fn mobius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, k)| k > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Largest d with d² | n.
pub fn square_part_root(n: u64) -> u64 {
    factorize(n)
        .iter()
        .map(|&(p, k)| p.pow(k / 2))
        .product()
}

/// Leading constant of the weight-k Eisenstein series, `-2k/B_k`, for even k ≥ 4.
///
/// Uses `|B_k| = 2 k! ζ(k) / (2π)^k`.
pub fn eisenstein_constant(k: u32) -> f64 {
    assert!(k >= 4 && k % 2 == 0);
    let kf = k as f64;
    let ln_abs_b = std::f64::consts::LN_2 + crate::special::ln_factorial(k as u64)
        + crate::special::zeta(kf).ln()
        - kf * (2.0 * std::f64::consts::PI).ln();
    let sign = if k % 4 == 0 { 1.0 } else { -1.0 };
    sign * 2.0 * kf * (-ln_abs_b).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(primes_upto(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(tau(12), 6);
        assert_eq!(sigma(3, 2), 9);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(12), 0);
        assert_eq!(square_part_root(72), 6);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert!(is_prime(9973) && !is_prime(9971));
    }

    #[test]
    fn eisenstein_constants() {
        assert!((eisenstein_constant(4) - 240.0).abs() < 1e-9);
        assert!((eisenstein_constant(8) - 480.0).abs() < 1e-9);
        assert!((eisenstein_constant(12) - 65520.0 / 691.0).abs() < 1e-9);
    }
}
