//! Arithmetic in the quotient ring F_p[θ]/(θ^r − d).
//!
//! Elements are coefficient vectors (a_0, …, a_{r−1}) over F_p. General
//! multiplication is schoolbook with the wrap terms folded through a single
//! multiplication by d per coefficient (≤ r² + r counted multiplications);
//! multiplication by a linear element u + vθ costs ≤ 2r + 1. Exponentiation
//! is most-significant-bit-first square-and-multiply, multiplying by the
//! original base on set bits.

use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fp::{Fe, FieldCtx};

struct RingInner {
    field: FieldCtx,
    r: usize,
    d: Fe,
}

/// The ring F_p[θ]/(θ^r − d). Cheap to clone and immutable.
#[derive(Clone)]
pub struct RingCtx {
    inner: Arc<RingInner>,
}

impl PartialEq for RingCtx {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.field == other.inner.field
                && self.inner.r == other.inner.r
                && self.inner.d == other.inner.d)
    }
}

impl Eq for RingCtx {}

impl fmt::Debug for RingCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "RingCtx(r={}, d={}, p={} bits)",
            self.inner.r,
            self.inner.d.to_hex(),
            self.inner.field.bits()
        )
    }
}

impl RingCtx {
    /// Requires r ≥ 2 and d ≠ 0 (d = 0 would make θ nilpotent).
    pub fn new(field: FieldCtx, r: u64, d: Fe) -> Result<Self> {
        if r < 2 {
            return Err(Error::Usage(format!("ring degree r must be >= 2, got {r}")));
        }
        if d.is_zero() {
            return Err(Error::Usage("reduction constant d must be nonzero".into()));
        }
        assert!(*d.field() == field, "d belongs to a different field");
        Ok(RingCtx {
            inner: Arc::new(RingInner {
                field,
                r: r as usize,
                d,
            }),
        })
    }

    pub fn field(&self) -> &FieldCtx {
        &self.inner.field
    }

    pub fn r(&self) -> u64 {
        self.inner.r as u64
    }

    pub fn d(&self) -> &Fe {
        &self.inner.d
    }

    /// The multiplicative identity (1, 0, …, 0).
    pub fn one(&self) -> RingEl {
        let mut coeffs = vec![self.inner.field.zero(); self.inner.r];
        coeffs[0] = self.inner.field.one();
        RingEl {
            ctx: self.clone(),
            coeffs,
        }
    }

    pub fn zero(&self) -> RingEl {
        RingEl {
            ctx: self.clone(),
            coeffs: vec![self.inner.field.zero(); self.inner.r],
        }
    }

    /// The linear element u + vθ.
    pub fn linear(&self, u: &Fe, v: &Fe) -> RingEl {
        let mut coeffs = vec![self.inner.field.zero(); self.inner.r];
        coeffs[0] = u.clone();
        coeffs[1] = v.clone();
        RingEl {
            ctx: self.clone(),
            coeffs,
        }
    }

    /// Build an element from exactly r coefficients (a_0 first).
    pub fn from_coeffs(&self, coeffs: Vec<Fe>) -> Result<RingEl> {
        if coeffs.len() != self.inner.r {
            return Err(Error::Usage(format!(
                "expected {} coefficients, got {}",
                self.inner.r,
                coeffs.len()
            )));
        }
        Ok(RingEl {
            ctx: self.clone(),
            coeffs,
        })
    }
}

/// An element Σ a_i θ^i of the quotient ring.
#[derive(Clone, PartialEq, Eq)]
pub struct RingEl {
    ctx: RingCtx,
    coeffs: Vec<Fe>,
}

impl RingEl {
    pub fn ctx(&self) -> &RingCtx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Fe::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs.iter().skip(1).all(Fe::is_zero)
    }

    /// Product with the linear element u + vθ in ≤ 2r + 1 multiplications
    /// (the +1 is the wrap term v·a_{r−1}·d).
    pub fn mul_linear(&self, u: &Fe, v: &Fe) -> RingEl {
        let r = self.ctx.inner.r;
        let d = &self.ctx.inner.d;
        let x = &self.coeffs;
        let mut out = Vec::with_capacity(r);
        out.push(&(u * &x[0]) + &(&(v * &x[r - 1]) * d));
        for l in 1..r {
            out.push(&(u * &x[l]) + &(v * &x[l - 1]));
        }
        RingEl {
            ctx: self.ctx.clone(),
            coeffs: out,
        }
    }

    /// a^m, MSB-first binary method: square, and multiply by the original
    /// base on set bits. m = 0 yields the identity.
    pub fn pow(&self, m: &BigUint) -> RingEl {
        self.pow_until(m, None)
            .expect("pow_until cannot be interrupted without a deadline")
    }

    /// [`RingEl::pow`] with a cooperative deadline, checked every 64
    /// exponent bits (clock reads are syscalls on some platforms, so a
    /// per-bit check would distort small measurements).
    pub fn pow_until(&self, m: &BigUint, deadline: Option<Instant>) -> Result<RingEl> {
        if m.is_zero() {
            return Ok(self.ctx.one());
        }
        let top = m.bits() - 1;
        let mut acc = self.clone();
        for k in (0..top).rev() {
            if k & 63 == 0 {
                if let Some(limit) = deadline {
                    if Instant::now() >= limit {
                        return Err(Error::Interrupted);
                    }
                }
            }
            acc = &acc * &acc;
            if m.bit(k) {
                acc = &acc * self;
            }
        }
        Ok(acc)
    }

    /// Multiplicative inverse by the extended Euclidean algorithm on
    /// polynomials over F_p, against the modulus θ^r − d.
    ///
    /// Fails with [`Error::NonInvertible`] on zero, and on zero divisors
    /// (possible only when θ^r − d is reducible, i.e. for a non-primitive
    /// witness).
    pub fn inv(&self) -> Result<RingEl> {
        if self.is_zero() {
            return Err(Error::NonInvertible);
        }
        let field = &self.ctx.inner.field;
        let r = self.ctx.inner.r;
        if self.coeffs.iter().skip(2).all(Fe::is_zero) {
            return self.inv_low_degree();
        }

        // modulus m(X) = X^r - d
        let mut modulus = vec![field.zero(); r + 1];
        modulus[0] = -&self.ctx.inner.d;
        modulus[r] = field.one();

        let mut r0 = modulus;
        let mut r1 = trim(self.coeffs.clone());
        let mut t0: Vec<Fe> = Vec::new();
        let mut t1 = vec![field.one()];

        while !r1.is_empty() {
            let (q, rem) = poly_divmod(&r0, &r1)?;
            let t_next = poly_sub(&t0, &poly_mul(&q, &t1));
            r0 = r1;
            r1 = rem;
            t0 = t1;
            t1 = t_next;
        }
        // gcd = r0 with t0 * self ≡ r0 (mod θ^r − d)
        if r0.len() != 1 {
            return Err(Error::NonInvertible);
        }
        let scale = r0[0].inv()?;
        let mut coeffs: Vec<Fe> = t0.iter().map(|c| c * &scale).collect();
        coeffs.resize(r, field.zero());
        Ok(RingEl {
            ctx: self.ctx.clone(),
            coeffs,
        })
    }

    /// Inverse of u + vθ through the telescoping identity
    /// (u + vθ)·Σ_{i<r} u^{r−1−i}(−v)^i θ^i = u^r − (−v)^r d,
    /// which needs a single field inversion.
    fn inv_low_degree(&self) -> Result<RingEl> {
        let field = &self.ctx.inner.field;
        let r = self.ctx.inner.r;
        let u = &self.coeffs[0];
        let minus_v = -&self.coeffs[1];

        // numerator coefficients u^{r-1-i}·(-v)^i and the telescoped scalar
        // u^r - (-v)^r·d
        let mut u_pows = vec![field.one(); r];
        let mut mv_pows = vec![field.one(); r];
        for i in 1..r {
            u_pows[i] = &u_pows[i - 1] * u;
            mv_pows[i] = &mv_pows[i - 1] * &minus_v;
        }
        let u_r = &u_pows[r - 1] * u;
        let mv_r = &mv_pows[r - 1] * &minus_v;
        let scale = (&u_r - &(&mv_r * &self.ctx.inner.d)).inv()?;
        let coeffs = (0..r)
            .map(|i| &(&u_pows[r - 1 - i] * &mv_pows[i]) * &scale)
            .collect();
        Ok(RingEl {
            ctx: self.ctx.clone(),
            coeffs,
        })
    }

    /// The constant term a_0. With `strict`, additionally requires every
    /// higher coefficient to vanish; a violation signals an internal bug or
    /// an invalid witness.
    pub fn constant_term(&self, strict: bool) -> Result<Fe> {
        if strict {
            for (i, c) in self.coeffs.iter().enumerate().skip(1) {
                if !c.is_zero() {
                    return Err(Error::InternalInconsistency(format!(
                        "expected a constant, found nonzero coefficient at θ^{i}"
                    )));
                }
            }
        }
        Ok(self.coeffs[0].clone())
    }
}

impl std::ops::Mul for &RingEl {
    type Output = RingEl;

    /// Coefficient recurrence: out_l = Σ_{j=0}^{l} x_j y_{l−j}
    /// + d · Σ_{j=l+1}^{r−1} x_j y_{l+r−j}; the wrap sum is absent at
    /// l = r−1. At most r² + r counted multiplications.
    fn mul(self, rhs: &RingEl) -> RingEl {
        assert!(self.ctx == rhs.ctx, "ring context mismatch");
        let r = self.ctx.inner.r;
        let field = &self.ctx.inner.field;
        let d = &self.ctx.inner.d;
        let x = &self.coeffs;
        let y = &rhs.coeffs;
        let mut out = Vec::with_capacity(r);
        for l in 0..r {
            let mut acc = field.zero();
            for j in 0..=l {
                acc = &acc + &(&x[j] * &y[l - j]);
            }
            if l + 1 < r {
                let mut wrap = field.zero();
                for j in (l + 1)..r {
                    wrap = &wrap + &(&x[j] * &y[l + r - j]);
                }
                acc = &acc + &(d * &wrap);
            }
            out.push(acc);
        }
        RingEl {
            ctx: self.ctx.clone(),
            coeffs: out,
        }
    }
}

impl fmt::Display for RingEl {
    /// Comma-separated hex coefficients, a_0 first (debug/trace output).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(Fe::to_hex).collect();
        f.write_str(&parts.join(","))
    }
}

impl fmt::Debug for RingEl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingEl({self})")
    }
}

fn trim(mut p: Vec<Fe>) -> Vec<Fe> {
    while p.last().is_some_and(Fe::is_zero) {
        p.pop();
    }
    p
}

fn poly_sub(a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    let field = if let Some(c) = a.first().or_else(|| b.first()) {
        c.field().clone()
    } else {
        return Vec::new();
    };
    let n = a.len().max(b.len());
    let zero = field.zero();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).unwrap_or(&zero);
        let y = b.get(i).unwrap_or(&zero);
        out.push(x - y);
    }
    trim(out)
}

fn poly_mul(a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let zero = a[0].field().zero();
    let mut out = vec![zero; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    trim(out)
}

/// Division with remainder for trimmed polynomials; `b` must be nonzero.
fn poly_divmod(a: &[Fe], b: &[Fe]) -> Result<(Vec<Fe>, Vec<Fe>)> {
    if b.is_empty() {
        return Err(Error::NonInvertible);
    }
    let lead_inv = b.last().unwrap().inv()?;
    let mut rem = a.to_vec();
    let mut quot = vec![b[0].field().zero(); a.len().saturating_sub(b.len() - 1)];
    // each pass zeroes rem's leading coefficient, so trim strictly shrinks it
    while rem.len() >= b.len() {
        let k = rem.len() - b.len();
        let coef = rem.last().unwrap() * &lead_inv;
        for (j, bj) in b.iter().enumerate() {
            rem[k + j] = &rem[k + j] - &(&coef * bj);
        }
        quot[k] = coef;
        rem = trim(rem);
    }
    Ok((trim(quot), trim(rem)))
}
