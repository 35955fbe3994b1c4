//! Montgomery arithmetic on little-endian u64 limbs.
//!
//! Elements stay in Montgomery form between operations; conversion happens
//! at the `Fe` boundary. Moduli up to 8 limbs (512 bits) take fixed-size
//! CIOS paths that keep the accumulator in registers; larger moduli fall
//! back to a general loop.

use num_bigint::BigUint;
use num_traits::One;
use smallvec::SmallVec;

/// Inline capacity covers 512-bit moduli without heap traffic.
pub(crate) type Limbs = SmallVec<[u64; 8]>;

/// acc + x*y + carry -> (low, high)
#[inline(always)]
fn mac(acc: u64, x: u64, y: u64, carry: u64) -> (u64, u64) {
    let t = (acc as u128) + (x as u128) * (y as u128) + (carry as u128);
    (t as u64, (t >> 64) as u64)
}

/// a + b + carry -> (low, high)
#[inline(always)]
fn adc(a: u64, b: u64, carry: u64) -> (u64, u64) {
    let t = (a as u128) + (b as u128) + (carry as u128);
    (t as u64, (t >> 64) as u64)
}

/// a - b - borrow -> (diff, borrow)
#[inline(always)]
fn sbb(a: u64, b: u64, borrow: u64) -> (u64, u64) {
    let (d, b1) = a.overflowing_sub(b);
    let (d, b2) = d.overflowing_sub(borrow);
    (d, (b1 | b2) as u64)
}

fn ge(a: &[u64], b: &[u64]) -> bool {
    for i in (0..a.len()).rev() {
        if a[i] > b[i] {
            return true;
        }
        if a[i] < b[i] {
            return false;
        }
    }
    true
}

fn sub_in_place(a: &mut [u64], b: &[u64]) {
    let mut borrow = 0u64;
    for i in 0..a.len() {
        let (d, br) = sbb(a[i], b[i], borrow);
        a[i] = d;
        borrow = br;
    }
}

fn sub_in_place_borrowing(a: &mut [u64], b: &[u64]) -> u64 {
    let mut borrow = 0u64;
    for i in 0..a.len() {
        let (d, br) = sbb(a[i], b[i], borrow);
        a[i] = d;
        borrow = br;
    }
    borrow
}

fn add_in_place(a: &mut [u64], b: &[u64]) -> u64 {
    let mut carry = 0u64;
    for i in 0..a.len() {
        let (s, c) = adc(a[i], b[i], carry);
        a[i] = s;
        carry = c;
    }
    carry
}

/// Logical right shift by one, injecting `top` as the new most
/// significant bit.
fn shr1_in_place(a: &mut [u64], top: u64) {
    for i in 0..a.len() {
        let next = if i + 1 < a.len() { a[i + 1] } else { top };
        a[i] = (a[i] >> 1) | (next << 63);
    }
}

fn is_one_limbs(a: &[u64]) -> bool {
    a[0] == 1 && a[1..].iter().all(|&w| w == 0)
}

pub(crate) struct Monty {
    limbs: usize,
    p: Limbs,
    /// -p^{-1} mod 2^64
    p_inv_neg: u64,
    /// R mod p, the Montgomery form of 1 (R = 2^{64*limbs})
    r1: Limbs,
    /// R^2 mod p
    r2: Limbs,
}

impl Monty {
    /// `p` must be odd and >= 3.
    pub fn new(p: &BigUint) -> Self {
        assert!(p.bit(0), "Montgomery modulus must be odd");
        let digits = p.to_u64_digits();
        let limbs = digits.len().max(1);
        let mut p_limbs: Limbs = digits.into_iter().collect();
        p_limbs.resize(limbs, 0);

        // Newton iteration: each step doubles the valid low bits.
        let p0 = p_limbs[0];
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p0.wrapping_mul(inv)));
        }
        let p_inv_neg = inv.wrapping_neg();

        let r1 = (BigUint::one() << (64 * limbs)) % p;
        let r2 = (BigUint::one() << (128 * limbs)) % p;
        let to = |x: &BigUint| -> Limbs {
            let mut v: Limbs = x.to_u64_digits().into_iter().collect();
            v.resize(limbs, 0);
            v
        };
        Monty {
            limbs,
            p: p_limbs,
            p_inv_neg,
            r1: to(&r1),
            r2: to(&r2),
        }
    }

    /// Montgomery form of 1.
    pub fn one(&self) -> Limbs {
        self.r1.clone()
    }

    pub fn is_zero(a: &[u64]) -> bool {
        a.iter().all(|&w| w == 0)
    }

    /// Convert a canonical residue (< p) into Montgomery form.
    pub fn enter(&self, x: &BigUint) -> Limbs {
        let mut v: Limbs = x.to_u64_digits().into_iter().collect();
        v.resize(self.limbs, 0);
        self.mul(&v, &self.r2)
    }

    /// Convert out of Montgomery form to a canonical residue.
    pub fn leave(&self, a: &[u64]) -> BigUint {
        let mut one: Limbs = SmallVec::new();
        one.resize(self.limbs, 0);
        one[0] = 1;
        let plain = self.mul(a, &one);
        let mut bytes = Vec::with_capacity(plain.len() * 8);
        for w in &plain {
            bytes.extend_from_slice(&w.to_le_bytes());
        }
        BigUint::from_bytes_le(&bytes)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Limbs {
        let mut out: Limbs = SmallVec::new();
        out.resize(self.limbs, 0);
        let mut carry = 0u64;
        for i in 0..self.limbs {
            let (s, c) = adc(a[i], b[i], carry);
            out[i] = s;
            carry = c;
        }
        if carry != 0 || ge(&out, &self.p) {
            sub_in_place(&mut out, &self.p);
        }
        out
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Limbs {
        let mut out: Limbs = SmallVec::new();
        out.resize(self.limbs, 0);
        let mut borrow = 0u64;
        for i in 0..self.limbs {
            let (d, br) = sbb(a[i], b[i], borrow);
            out[i] = d;
            borrow = br;
        }
        if borrow != 0 {
            let mut carry = 0u64;
            for i in 0..self.limbs {
                let (s, c) = adc(out[i], self.p[i], carry);
                out[i] = s;
                carry = c;
            }
        }
        out
    }

    pub fn neg(&self, a: &[u64]) -> Limbs {
        if Self::is_zero(a) {
            let mut out: Limbs = SmallVec::new();
            out.resize(self.limbs, 0);
            return out;
        }
        let mut out: Limbs = self.p.clone();
        sub_in_place(&mut out, a);
        out
    }

    /// Inverse of a nonzero canonical residue by binary extended gcd on
    /// raw limbs. Maintains x1·a ≡ u and x2·a ≡ v (mod p) with x1, x2
    /// canonical, so the transient one-bit overflow of `x + p` is absorbed
    /// by the following halving or subtraction.
    pub fn inv_canonical(&self, a: &[u64]) -> Limbs {
        debug_assert!(!Self::is_zero(a));
        let n = self.limbs;
        let mut u: Limbs = a.iter().copied().collect();
        let mut v = self.p.clone();
        let mut x1: Limbs = SmallVec::new();
        x1.resize(n, 0);
        x1[0] = 1;
        let mut x2: Limbs = SmallVec::new();
        x2.resize(n, 0);
        // each pass strips at least one bit from u or v, so a run past this
        // bound means gcd(a, p) > 1, i.e. a non-prime "trusted" modulus
        let max_iter = 256 * n + 256;
        for _ in 0..max_iter {
            if is_one_limbs(&u) {
                return x1;
            }
            if is_one_limbs(&v) {
                return x2;
            }
            while u[0] & 1 == 0 {
                shr1_in_place(&mut u, 0);
                let carry = if x1[0] & 1 == 1 {
                    add_in_place(&mut x1, &self.p)
                } else {
                    0
                };
                shr1_in_place(&mut x1, carry);
            }
            while v[0] & 1 == 0 {
                shr1_in_place(&mut v, 0);
                let carry = if x2[0] & 1 == 1 {
                    add_in_place(&mut x2, &self.p)
                } else {
                    0
                };
                shr1_in_place(&mut x2, carry);
            }
            if ge(&u, &v) {
                sub_in_place(&mut u, &v);
                let carry = if ge(&x1, &x2) {
                    0
                } else {
                    add_in_place(&mut x1, &self.p)
                };
                let borrow = sub_in_place_borrowing(&mut x1, &x2);
                debug_assert_eq!(carry, borrow);
            } else {
                sub_in_place(&mut v, &u);
                let carry = if ge(&x2, &x1) {
                    0
                } else {
                    add_in_place(&mut x2, &self.p)
                };
                let borrow = sub_in_place_borrowing(&mut x2, &x1);
                debug_assert_eq!(carry, borrow);
            }
        }
        panic!("inverse did not terminate: modulus is not prime");
    }

    /// Montgomery form -> canonical-residue limbs.
    pub fn demont(&self, a: &[u64]) -> Limbs {
        let mut one: Limbs = SmallVec::new();
        one.resize(self.limbs, 0);
        one[0] = 1;
        self.mul(a, &one)
    }

    /// Canonical-residue limbs -> Montgomery form.
    pub fn remont(&self, a: &[u64]) -> Limbs {
        self.mul(a, &self.r2)
    }

    /// Montgomery product a*b*R^{-1} mod p.
    pub fn mul(&self, a: &[u64], b: &[u64]) -> Limbs {
        match self.limbs {
            1 => self.mul_fixed::<1>(a, b),
            2 => self.mul_fixed::<2>(a, b),
            3 => self.mul_fixed::<3>(a, b),
            4 => self.mul_fixed::<4>(a, b),
            5 => self.mul_fixed::<5>(a, b),
            6 => self.mul_fixed::<6>(a, b),
            7 => self.mul_fixed::<7>(a, b),
            8 => self.mul_fixed::<8>(a, b),
            _ => self.mul_general(a, b),
        }
    }

    /// CIOS with the accumulator in a fixed-size array.
    fn mul_fixed<const N: usize>(&self, a: &[u64], b: &[u64]) -> Limbs {
        let mut t = [0u64; N];
        let mut t_hi: u64 = 0;
        let p = &self.p;
        for i in 0..N {
            let ai = a[i];
            let mut carry = 0u64;
            for j in 0..N {
                let (lo, hi) = mac(t[j], ai, b[j], carry);
                t[j] = lo;
                carry = hi;
            }
            let (lo, t_top) = adc(t_hi, carry, 0);
            t_hi = lo;

            let m = t[0].wrapping_mul(self.p_inv_neg);
            let (_, mut carry) = mac(t[0], m, p[0], 0);
            for j in 1..N {
                let (lo, hi) = mac(t[j], m, p[j], carry);
                t[j - 1] = lo;
                carry = hi;
            }
            let (lo, c) = adc(t_hi, carry, 0);
            t[N - 1] = lo;
            t_hi = t_top + c;
        }
        let mut out: Limbs = SmallVec::new();
        out.extend_from_slice(&t);
        if t_hi != 0 || ge(&out, p) {
            sub_in_place(&mut out, p);
        }
        out
    }

    fn mul_general(&self, a: &[u64], b: &[u64]) -> Limbs {
        let n = self.limbs;
        let mut t: SmallVec<[u64; 10]> = SmallVec::new();
        t.resize(n + 2, 0);
        for i in 0..n {
            let ai = a[i];
            let mut carry = 0u64;
            for j in 0..n {
                let (lo, hi) = mac(t[j], ai, b[j], carry);
                t[j] = lo;
                carry = hi;
            }
            let (lo, c) = adc(t[n], carry, 0);
            t[n] = lo;
            t[n + 1] = c;

            let m = t[0].wrapping_mul(self.p_inv_neg);
            let (_, mut carry) = mac(t[0], m, self.p[0], 0);
            for j in 1..n {
                let (lo, hi) = mac(t[j], m, self.p[j], carry);
                t[j - 1] = lo;
                carry = hi;
            }
            let (lo, c) = adc(t[n], carry, 0);
            t[n - 1] = lo;
            t[n] = t[n + 1] + c;
        }
        let mut out: Limbs = SmallVec::new();
        out.extend_from_slice(&t[..n]);
        if t[n] != 0 || ge(&out, &self.p) {
            sub_in_place(&mut out, &self.p);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::RandBigInt;
    use num_traits::Zero;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn roundtrip_and_ops(p: &BigUint, rng: &mut ChaCha8Rng) {
        let m = Monty::new(p);
        for _ in 0..64 {
            let a = rng.gen_biguint_below(p);
            let b = rng.gen_biguint_below(p);
            let am = m.enter(&a);
            let bm = m.enter(&b);
            assert_eq!(m.leave(&am), a);
            assert_eq!(m.leave(&m.mul(&am, &bm)), (&a * &b) % p);
            assert_eq!(m.leave(&m.add(&am, &bm)), (&a + &b) % p);
            assert_eq!(m.leave(&m.sub(&am, &bm)), ((p + &a) - &b) % p);
            assert_eq!(m.leave(&m.neg(&am)), (p - &a) % p);
            if !a.is_zero() && is_prime_for_test(p) {
                let inv = m.inv_canonical(&m.demont(&am));
                let mut bytes = Vec::new();
                for w in &inv {
                    bytes.extend_from_slice(&w.to_le_bytes());
                }
                let inv = BigUint::from_bytes_le(&bytes);
                assert_eq!((&a * &inv) % p, BigUint::one(), "inverse of {a} mod {p}");
            }
        }
        assert_eq!(m.leave(&m.one()), BigUint::one());
    }

    fn is_prime_for_test(p: &BigUint) -> bool {
        crate::fp::is_prime(p, 16)
    }

    #[test]
    fn agrees_with_biguint_across_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // smallest odd prime, one-limb, boundary sizes, fixed/general cutover
        for bits in [2u64, 8, 61, 64, 65, 127, 128, 192, 256, 384, 512, 513, 576, 1024] {
            let p = if bits == 2 {
                BigUint::from(3u32)
            } else {
                let mut c = rng.gen_biguint(bits);
                c |= BigUint::one() << (bits - 1);
                c |= BigUint::one();
                c
            };
            roundtrip_and_ops(&p, &mut rng);
        }
    }
}
