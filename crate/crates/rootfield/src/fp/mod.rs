//! Prime field F_p: field context, canonical elements, modular arithmetic.
//!
//! `Fe` values are held internally in Montgomery form; `value()` always
//! yields the canonical residue in [0, p). Multiplications (and squarings)
//! are the single cost unit and bump the thread-local [`counter`].
//!
//! All arithmetic is variable-time. This crate measures algorithms; it is
//! not hardened for secret inputs.

pub mod counter;
mod monty;
mod primality;

pub use primality::{gen_prime_1_mod_r, is_prime, PRIME_SEARCH_BUDGET};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::{BigUint, RandBigInt};
use num_traits::{Num, One, Zero};
use rand::RngCore;

use crate::error::{Error, Result};
use monty::{Limbs, Monty};

struct FieldInner {
    p: BigUint,
    bits: u64,
    monty: Monty,
}

/// A prime field F_p. Cheap to clone; immutable after construction and safe
/// to share across threads.
#[derive(Clone)]
pub struct FieldCtx {
    inner: Arc<FieldInner>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.p == other.inner.p
    }
}

impl Eq for FieldCtx {}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldCtx(p={}, {} bits)", to_hex(&self.inner.p), self.inner.bits)
    }
}

impl FieldCtx {
    /// Build a field, verifying primality (Miller-Rabin, 40 rounds on top of
    /// the deterministic small-witness set).
    pub fn new(p: BigUint) -> Result<Self> {
        if !is_prime(&p, 40) {
            return Err(Error::Usage(format!("modulus {} is not prime", to_hex(&p))));
        }
        Self::new_unchecked(p)
    }

    /// Trusted constructor: skips the primality test. `p` must still be odd
    /// and at least 3.
    pub fn new_unchecked(p: BigUint) -> Result<Self> {
        if p < BigUint::from(3u32) || !p.bit(0) {
            return Err(Error::Usage(format!(
                "modulus {} must be an odd number >= 3",
                to_hex(&p)
            )));
        }
        let bits = p.bits();
        let monty = Monty::new(&p);
        Ok(FieldCtx {
            inner: Arc::new(FieldInner { p, bits, monty }),
        })
    }

    pub fn modulus(&self) -> &BigUint {
        &self.inner.p
    }

    /// Bit length of p.
    pub fn bits(&self) -> u64 {
        self.inner.bits
    }

    /// Canonical element for an arbitrary integer (reduced mod p).
    pub fn elem(&self, v: &BigUint) -> Fe {
        let reduced = v % &self.inner.p;
        Fe {
            field: self.clone(),
            mont: self.inner.monty.enter(&reduced),
        }
    }

    pub fn from_u64(&self, v: u64) -> Fe {
        self.elem(&BigUint::from(v))
    }

    pub fn zero(&self) -> Fe {
        self.elem(&BigUint::zero())
    }

    pub fn one(&self) -> Fe {
        Fe {
            field: self.clone(),
            mont: self.inner.monty.one(),
        }
    }

    /// Parse a lowercase/uppercase hex string (no prefix) into an element,
    /// reducing mod p.
    pub fn parse_hex(&self, s: &str) -> Result<Fe> {
        Ok(self.elem(&parse_hex(s)?))
    }

    /// Uniform element of [0, p).
    pub fn random(&self, rng: &mut dyn RngCore) -> Fe {
        let v = rng.gen_biguint_below(&self.inner.p);
        self.elem(&v)
    }
}

/// A field element, canonical residue in [0, p).
#[derive(Clone)]
pub struct Fe {
    field: FieldCtx,
    mont: Limbs,
}

impl Fe {
    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    /// Canonical value in [0, p).
    pub fn value(&self) -> BigUint {
        self.field.inner.monty.leave(&self.mont)
    }

    /// Lowercase hex, no prefix.
    pub fn to_hex(&self) -> String {
        to_hex(&self.value())
    }

    pub fn is_zero(&self) -> bool {
        Monty::is_zero(&self.mont)
    }

    pub fn is_one(&self) -> bool {
        self.mont == self.field.inner.monty.one()
    }

    /// a^e by binary square-and-multiply; counts between bitlen(e) and
    /// 2·bitlen(e) multiplications. 0^0 = 1.
    pub fn pow(&self, e: &BigUint) -> Fe {
        if e.is_zero() {
            return self.field.one();
        }
        let mut result = self.field.one();
        let mut base = self.clone();
        let mut e = e.clone();
        loop {
            if e.bit(0) {
                result = &result * &base;
            }
            e >>= 1;
            if e.is_zero() {
                break;
            }
            base = &base * &base;
        }
        result
    }

    pub fn pow_u64(&self, e: u64) -> Fe {
        self.pow(&BigUint::from(e))
    }

    /// Multiplicative inverse by binary extended gcd on raw limbs (not
    /// counted as a field multiplication).
    pub fn inv(&self) -> Result<Fe> {
        if self.is_zero() {
            return Err(Error::NonInvertible);
        }
        let monty = &self.field.inner.monty;
        let inv = monty.inv_canonical(&monty.demont(&self.mont));
        Ok(Fe {
            field: self.field.clone(),
            mont: monty.remont(&inv),
        })
    }

    fn assert_same_field(&self, other: &Fe) {
        assert!(
            self.field == other.field,
            "operands belong to different fields"
        );
    }
}

impl PartialEq for Fe {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.mont == other.mont
    }
}

impl Eq for Fe {}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fe({})", self.to_hex())
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Add for &Fe {
    type Output = Fe;
    fn add(self, rhs: &Fe) -> Fe {
        self.assert_same_field(rhs);
        Fe {
            field: self.field.clone(),
            mont: self.field.inner.monty.add(&self.mont, &rhs.mont),
        }
    }
}

impl Sub for &Fe {
    type Output = Fe;
    fn sub(self, rhs: &Fe) -> Fe {
        self.assert_same_field(rhs);
        Fe {
            field: self.field.clone(),
            mont: self.field.inner.monty.sub(&self.mont, &rhs.mont),
        }
    }
}

impl Mul for &Fe {
    type Output = Fe;
    fn mul(self, rhs: &Fe) -> Fe {
        self.assert_same_field(rhs);
        counter::bump();
        Fe {
            field: self.field.clone(),
            mont: self.field.inner.monty.mul(&self.mont, &rhs.mont),
        }
    }
}

impl Neg for &Fe {
    type Output = Fe;
    fn neg(self) -> Fe {
        Fe {
            field: self.field.clone(),
            mont: self.field.inner.monty.neg(&self.mont),
        }
    }
}

/// Lowercase hex without prefix (the CLI wire format).
pub fn to_hex(n: &BigUint) -> String {
    n.to_str_radix(16)
}

/// Parse hex without prefix.
pub fn parse_hex(s: &str) -> Result<BigUint> {
    BigUint::from_str_radix(s.trim(), 16)
        .map_err(|_| Error::Usage(format!("invalid hex value: {s:?}")))
}
