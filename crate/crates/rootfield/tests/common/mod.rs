//! Shared helpers for the integration suites: independent small-field
//! oracles implemented with plain u64 arithmetic, deliberately avoiding the
//! crate's field and ring types.

use std::collections::HashMap;

use rootfield::RingEl;

pub fn primes_below(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut sieve = vec![true; n];
    let mut out = Vec::new();
    for i in 2..n {
        if sieve[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j < n {
                sieve[j] = false;
                j += i;
            }
        }
    }
    out
}

pub fn powmod(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut result = 1u128;
    let mut base = (base % m) as u128;
    let m = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    result as u64
}

/// Map c -> sorted roots {y : y^r = c} by exhaustive scan.
pub fn root_map(p: u64, r: u64) -> HashMap<u64, Vec<u64>> {
    let mut map: HashMap<u64, Vec<u64>> = HashMap::new();
    for y in 0..p {
        map.entry(powmod(y, r, p)).or_default().push(y);
    }
    map
}

/// Naive quotient-ring product: schoolbook polynomial multiply, then
/// substitute θ^{r+k} -> d·θ^k.
pub fn naive_ring_mul(x: &[u64], y: &[u64], r: usize, d: u64, p: u64) -> Vec<u64> {
    let mut wide = vec![0u64; 2 * r - 1];
    for i in 0..r {
        for j in 0..r {
            wide[i + j] = ((wide[i + j] as u128 + x[i] as u128 * y[j] as u128) % p as u128) as u64;
        }
    }
    for k in (r..2 * r - 1).rev() {
        let v = (wide[k] as u128 * d as u128) % p as u128;
        wide[k - r] = ((wide[k - r] as u128 + v) % p as u128) as u64;
        wide[k] = 0;
    }
    wide.truncate(r);
    wide
}

/// Decide by exhaustion over all b ∈ F_p (independent u64 arithmetic)
/// whether any admissible witness exists: d = b^r − c ≠ 0 with
/// d^((p−1)/r) a primitive r-th root of unity. When r = p − 1 the answer
/// can be negative (b^r ∈ {0, 1} by Fermat), in which case the
/// Cipolla-Lehmer-type construction has no valid input at all.
pub fn witness_exists(p: u64, r: u64, c: u64) -> bool {
    let exp = (p - 1) / r;
    let mut factors = Vec::new();
    let mut n = r;
    let mut f = 2;
    while f * f <= n {
        if n % f == 0 {
            factors.push(f);
            while n % f == 0 {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    (0..p).any(|b| {
        let d = (powmod(b, r, p) + p - c % p) % p;
        if d == 0 {
            return false;
        }
        let omega = powmod(d, exp, p);
        factors.iter().all(|&pf| powmod(omega, r / pf, p) != 1)
    })
}

pub fn coeffs_u64(e: &RingEl) -> Vec<u64> {
    e.coeffs()
        .iter()
        .map(|c| c.value().to_u64_digits().first().copied().unwrap_or(0))
        .collect()
}

pub fn fe_u64(f: &rootfield::Fe) -> u64 {
    f.value().to_u64_digits().first().copied().unwrap_or(0)
}
