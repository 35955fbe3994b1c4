//! Miller-Rabin primality testing and generation of primes p ≡ 1 (mod r).

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const SMALL_PRIMES: &[u64] = &[
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// The first 13 primes are known to be a complete Miller-Rabin witness set
/// for all n < 3,317,044,064,679,887,385,961,981 (≈ 3.3e24), well past the
/// 64-bit range where we rely on determinism.
const DETERMINISTIC_BASES: &[u64] = &[2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn deterministic_limit() -> BigUint {
    "3317044064679887385961981".parse().unwrap()
}

fn strong_probable_prime(n: &BigUint, n_minus_1: &BigUint, d: &BigUint, s: u64, a: &BigUint) -> bool {
    let a = a % n;
    if a.is_zero() {
        return true;
    }
    let mut x = a.modpow(d, n);
    if x.is_one() || x == *n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == *n_minus_1 {
            return true;
        }
    }
    false
}

/// Miller-Rabin primality verdict.
///
/// Deterministic (fixed witness set) for n below ~3.3e24; `rounds` random
/// witnesses above that.
pub fn is_prime(n: &BigUint, rounds: u32) -> bool {
    if *n < BigUint::from(2u32) {
        return false;
    }
    for &sp in SMALL_PRIMES {
        let sp = BigUint::from(sp);
        if *n == sp {
            return true;
        }
        if (n % &sp).is_zero() {
            return false;
        }
    }

    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;

    if *n < deterministic_limit() {
        return DETERMINISTIC_BASES
            .iter()
            .all(|&a| strong_probable_prime(n, &n_minus_1, &d, s, &BigUint::from(a)));
    }

    let mut rng = rand::thread_rng();
    let two = BigUint::from(2u32);
    let span = &n_minus_1 - &two;
    (0..rounds).all(|_| {
        let a = &two + rng.gen_biguint_below(&span);
        strong_probable_prime(n, &n_minus_1, &d, s, &a)
    })
}

/// Candidate budget for [`gen_prime_1_mod_r`].
pub const PRIME_SEARCH_BUDGET: u64 = 100_000;

/// Generate a prime with exactly `bits` bits satisfying p ≡ 1 (mod r).
///
/// Candidates are p = k·r + 1 for k stepped upward (with parity fixed so p
/// is odd) from a seeded random start, wrapping at the top of the range, so
/// the result is deterministic given `seed`.
pub fn gen_prime_1_mod_r(bits: u64, r: u64, seed: u64) -> Result<BigUint> {
    if r < 2 {
        return Err(Error::Usage(format!("r must be at least 2, got {r}")));
    }
    if bits < 2 {
        return Err(Error::Usage(format!("bits must be at least 2, got {bits}")));
    }
    let r_big = BigUint::from(r);
    let lo = BigUint::one() << (bits - 1);
    let hi = (BigUint::one() << bits) - 1u32;

    // k range with k*r + 1 in [lo, hi]
    let k_lo = (&lo - 1u32 + &r_big - 1u32) / &r_big; // ceil((lo-1)/r)
    let k_hi = (&hi - 1u32) / &r_big;

    // p = k*r + 1 must be odd: any k works for even r, even k for odd r.
    let step: u32 = if r % 2 == 0 { 1 } else { 2 };
    let fix_parity = |mut k: BigUint| -> BigUint {
        if r % 2 == 1 && k.bit(0) {
            k += 1u32;
        }
        k
    };
    let k_lo = fix_parity(k_lo);
    if k_lo > k_hi {
        return Err(Error::PrimeSearchFailed { candidates: 0 });
    }

    let width = &k_hi - &k_lo + 1u32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut k = fix_parity(&k_lo + rng.gen_biguint_below(&width));
    if k > k_hi {
        k = k_lo.clone();
    }

    for _ in 0..PRIME_SEARCH_BUDGET {
        let p = &k * &r_big + 1u32;
        if is_prime(&p, 40) {
            return Ok(p);
        }
        k += step;
        if k > k_hi {
            k = k_lo.clone();
        }
    }
    Err(Error::PrimeSearchFailed {
        candidates: PRIME_SEARCH_BUDGET,
    })
}
