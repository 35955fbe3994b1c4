//! r-th root extraction in F_p (p ≡ 1 mod r) by three Cipolla-Lehmer-type
//! algorithms, plus witness search, residue testing, root-set enumeration
//! and a brute-force oracle.
//!
//! All three algorithms work in the quotient ring F_p[θ]/(θ^r − d) built
//! from a witness b with d = b^r − c, and rest on the norm identity
//! Π_{i<r} (b − ω^i θ) = b^r − θ^r = c for a primitive r-th root of unity
//! ω = d^((q−1)/r):
//!
//! * `root_hc` raises α = b − θ to M = (1 + q + … + q^{r−1})/r directly
//!   (O(r³ log q) multiplications; odd prime r only).
//! * `root_wh` splits α^M into E₁^((q−1)/r)·E₂ with binomial-coefficient
//!   exponents (O(r⁴ + r² log q); odd prime r only).
//! * `root_new` telescopes α^M into α·(α·α^{1+q}···α^{1+…+q^{r−2}})^((q−1)/r),
//!   accumulating the inner product with cheap linear multiplications
//!   (O(r³ + r² log q); any r > 1).

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fp::{counter, Fe, FieldCtx};
use crate::ring::{RingCtx, RingEl};

/// Trial budget for witness search is `64 * r` unless overridden.
pub const DEFAULT_TRIALS_PER_R: u64 = 64;

/// Algorithm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgoId {
    /// Direct exponentiation (odd prime r only).
    Hc,
    /// Binomial-exponent split (odd prime r only).
    Wh,
    /// Telescoping accumulation (any r > 1).
    New,
}

impl AlgoId {
    pub fn all() -> [AlgoId; 3] {
        [AlgoId::Hc, AlgoId::Wh, AlgoId::New]
    }

    /// HC and WH require an odd prime r; NEW accepts every r > 1.
    pub fn applicable(self, r: u64, r_is_prime: bool) -> bool {
        match self {
            AlgoId::New => true,
            AlgoId::Hc | AlgoId::Wh => r_is_prime && r != 2,
        }
    }
}

impl fmt::Display for AlgoId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgoId::Hc => "hc",
            AlgoId::Wh => "wh",
            AlgoId::New => "new",
        })
    }
}

impl FromStr for AlgoId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hc" => Ok(AlgoId::Hc),
            "wh" => Ok(AlgoId::Wh),
            "new" => Ok(AlgoId::New),
            other => Err(Error::Usage(format!(
                "unknown algorithm {other:?} (expected hc, wh or new)"
            ))),
        }
    }
}

/// An instance: find x with x^r = c in F_p.
#[derive(Debug, Clone)]
pub struct RootProblem {
    field: FieldCtx,
    r: u64,
    c: Fe,
    /// Distinct prime factors of r, ascending.
    prime_factors: Vec<u64>,
    /// (p − 1) / r.
    exp_r: BigUint,
}

const MAX_R: u64 = 1 << 20;

impl RootProblem {
    /// Requires r > 1, r ≤ 2^20 and p ≡ 1 (mod r).
    pub fn new(field: FieldCtx, r: u64, c: Fe) -> Result<Self> {
        if r < 2 {
            return Err(Error::Usage(format!("r must be at least 2, got {r}")));
        }
        if r > MAX_R {
            return Err(Error::Usage(format!("r must be at most 2^20, got {r}")));
        }
        assert!(*c.field() == field, "c belongs to a different field");
        let p_minus_1 = field.modulus() - 1u32;
        let (exp_r, rem) = p_minus_1.div_rem(&BigUint::from(r));
        if !rem.is_zero() {
            return Err(Error::Usage(format!(
                "p must satisfy p ≡ 1 (mod r); p = {} is not 1 mod {r}",
                crate::fp::to_hex(field.modulus())
            )));
        }
        let prime_factors = distinct_prime_factors(r);
        Ok(RootProblem {
            field,
            r,
            c,
            prime_factors,
            exp_r,
        })
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn c(&self) -> &Fe {
        &self.c
    }

    pub fn r_is_prime(&self) -> bool {
        self.prime_factors == [self.r]
    }

    pub fn prime_factors(&self) -> &[u64] {
        &self.prime_factors
    }

    /// (p − 1) / r.
    pub fn residue_exponent(&self) -> &BigUint {
        &self.exp_r
    }
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2u64;
    while f * f <= n {
        if n % f == 0 {
            out.push(f);
            while n % f == 0 {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// An accepted witness: b with d = b^r − c ≠ 0 whose ω = d^((q−1)/r) is a
/// primitive r-th root of unity.
#[derive(Debug, Clone)]
pub struct RootWitness {
    b: Fe,
    d: Fe,
    omega: Fe,
    trials: u64,
}

impl RootWitness {
    /// Validate a forced b against the witness invariants.
    pub fn from_b(prob: &RootProblem, b: Fe) -> Result<Self> {
        match admit(prob, b) {
            Some(w) => Ok(w),
            None => Err(Error::Usage(
                "b is not an admissible witness: b^r - c is zero or yields a non-primitive root of unity"
                    .into(),
            )),
        }
    }

    pub fn b(&self) -> &Fe {
        &self.b
    }

    /// d = b^r − c.
    pub fn d(&self) -> &Fe {
        &self.d
    }

    /// ω = d^((q−1)/r), primitive by construction.
    pub fn omega(&self) -> &Fe {
        &self.omega
    }

    /// Number of rejected b values before this one.
    pub fn trials(&self) -> u64 {
        self.trials
    }
}

fn admit(prob: &RootProblem, b: Fe) -> Option<RootWitness> {
    let d = &b.pow_u64(prob.r) - &prob.c;
    if d.is_zero() {
        return None;
    }
    let omega = d.pow(&prob.exp_r);
    // primitive iff ω^(r/p') ≠ 1 for every prime p' | r
    for &pf in &prob.prime_factors {
        if omega.pow_u64(prob.r / pf).is_one() {
            return None;
        }
    }
    Some(RootWitness {
        b,
        d,
        omega,
        trials: 0,
    })
}

/// Test c^((q−1)/r) = 1. Caller handles c = 0 (zero is trivially the r-th
/// power of zero).
pub fn is_rth_residue(prob: &RootProblem) -> bool {
    prob.c.pow(&prob.exp_r).is_one()
}

/// Sample b uniformly (seeded) until the witness invariants hold.
///
/// `max_trials` defaults to 64·r rejected candidates.
pub fn find_witness(prob: &RootProblem, seed: u64, max_trials: Option<u64>) -> Result<RootWitness> {
    let cap = max_trials.unwrap_or(DEFAULT_TRIALS_PER_R.saturating_mul(prob.r));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rejected = 0u64;
    while rejected <= cap {
        let b = prob.field.random(&mut rng);
        if let Some(mut w) = admit(prob, b) {
            w.trials = rejected;
            return Ok(w);
        }
        rejected += 1;
    }
    Err(Error::WitnessSearchFailed { trials: rejected })
}

/// Per-phase multiplication counts and instrumentation for one algorithm
/// run (witness search excluded; see [`PhaseCounts`]).
#[derive(Debug, Clone, Default)]
pub struct AlgoTrace {
    /// Product-accumulation phase (root_new's loop; E₁/E₂ assembly for
    /// root_wh; zero for root_hc).
    pub accumulation_mults: u64,
    /// The big ring exponentiation.
    pub exponentiation_mults: u64,
    /// Final assembly: constant extraction plus the x^r = c verification.
    pub assembly_mults: u64,
    /// Iterations of root_new's accumulation loop (zero when r = 2).
    pub loop_iterations: u64,
    /// root_new only: the accumulated product P before exponentiation.
    pub post_loop: Option<RingEl>,
    /// root_new only: P^((q−1)/r).
    pub post_pow: Option<RingEl>,
}

impl AlgoTrace {
    /// Total counted multiplications across the algorithm's phases.
    pub fn algo_mults(&self) -> u64 {
        self.accumulation_mults + self.exponentiation_mults + self.assembly_mults
    }
}

fn ring_for(prob: &RootProblem, w: &RootWitness) -> Result<RingCtx> {
    RingCtx::new(prob.field.clone(), prob.r, w.d.clone())
}

fn verify_root(prob: &RootProblem, x: &Fe) -> Result<()> {
    if x.pow_u64(prob.r) == prob.c {
        Ok(())
    } else {
        Err(Error::InternalInconsistency(format!(
            "computed x = {} does not satisfy x^{} = {}",
            x.to_hex(),
            prob.r,
            prob.c.to_hex()
        )))
    }
}

/// Telescoping-accumulation algorithm; applicable for every r > 1.
///
/// Maintains W = ω^i, V = b − Wθ, A ← A·V (linear multiply), P ← P·A for
/// i = 1 … r−2, then returns the strict constant term of
/// α·P^((q−1)/r). The loop body is empty for r = 2, which reduces to the
/// classical Cipolla square-root iteration x = α^((q+1)/2).
pub fn root_new(prob: &RootProblem, w: &RootWitness) -> Result<Fe> {
    root_new_traced(prob, w, None).map(|(x, _)| x)
}

pub fn root_new_traced(
    prob: &RootProblem,
    w: &RootWitness,
    deadline: Option<Instant>,
) -> Result<(Fe, AlgoTrace)> {
    let ring = ring_for(prob, w)?;
    let field = prob.field();
    let minus_one = -&field.one();
    let mut trace = AlgoTrace::default();

    let span = counter::Span::begin();
    let alpha = ring.linear(w.b(), &minus_one);
    let mut acc = alpha.clone();
    let mut prod = alpha.clone();
    let mut w_pow = field.one();
    for _ in 1..=prob.r.saturating_sub(2) {
        w_pow = &w_pow * w.omega();
        acc = acc.mul_linear(w.b(), &(-&w_pow));
        prod = &prod * &acc;
        trace.loop_iterations += 1;
    }
    trace.accumulation_mults = span.elapsed();
    trace.post_loop = Some(prod.clone());

    let span = counter::Span::begin();
    let prod = prod.pow_until(&prob.exp_r, deadline)?;
    trace.exponentiation_mults = span.elapsed();
    trace.post_pow = Some(prod.clone());

    let span = counter::Span::begin();
    let x = prod
        .mul_linear(w.b(), &minus_one)
        .constant_term(true)?;
    verify_root(prob, &x)?;
    trace.assembly_mults = span.elapsed();
    Ok((x, trace))
}

/// Direct-exponentiation algorithm: the strict constant term of
/// α^M with M = (1 + q + … + q^{r−1})/r. Odd prime r only.
pub fn root_hc(prob: &RootProblem, w: &RootWitness) -> Result<Fe> {
    root_hc_traced(prob, w, None).map(|(x, _)| x)
}

pub fn root_hc_traced(
    prob: &RootProblem,
    w: &RootWitness,
    deadline: Option<Instant>,
) -> Result<(Fe, AlgoTrace)> {
    require_odd_prime(prob, AlgoId::Hc)?;
    let ring = ring_for(prob, w)?;
    let field = prob.field();
    let mut trace = AlgoTrace::default();

    // M = (Σ_{j<r} q^j) / r, exact since q ≡ 1 (mod r)
    let q = field.modulus();
    let mut sum = BigUint::zero();
    let mut q_j = BigUint::one();
    for j in 0..prob.r {
        sum += &q_j;
        if j + 1 < prob.r {
            q_j *= q;
        }
    }
    let (m, rem) = sum.div_rem(&BigUint::from(prob.r));
    if !rem.is_zero() {
        return Err(Error::InternalInconsistency(
            "1 + q + … + q^{r-1} is not divisible by r".into(),
        ));
    }

    let alpha = ring.linear(w.b(), &(-&field.one()));
    let span = counter::Span::begin();
    let powered = alpha.pow_until(&m, deadline)?;
    trace.exponentiation_mults = span.elapsed();

    let span = counter::Span::begin();
    let x = powered.constant_term(true)?;
    verify_root(prob, &x)?;
    trace.assembly_mults = span.elapsed();
    Ok((x, trace))
}

/// Binomial-split algorithm: the strict constant term of
/// E₁^((q−1)/r)·E₂, with
/// E₁ = Π_{i=0}^{r−2} (b − ω^i θ)^{(−1)^{r−i} C(r−2, i)} and
/// E₂ = Π_{i=1}^{r−1} (b − ω^{r−1−i} θ)^{(1 − (−1)^i C(r−1, i))/r}.
/// Odd prime r only (the E₂ exponents are integers exactly when r is
/// prime).
pub fn root_wh(prob: &RootProblem, w: &RootWitness) -> Result<Fe> {
    root_wh_traced(prob, w, None).map(|(x, _)| x)
}

pub fn root_wh_traced(
    prob: &RootProblem,
    w: &RootWitness,
    deadline: Option<Instant>,
) -> Result<(Fe, AlgoTrace)> {
    require_odd_prime(prob, AlgoId::Wh)?;
    let ring = ring_for(prob, w)?;
    let field = prob.field();
    let r = prob.r;
    let r_big = BigUint::from(r);
    let mut trace = AlgoTrace::default();

    let span = counter::Span::begin();
    // ω^0 … ω^{r−2}
    let mut omega_pows = Vec::with_capacity(r as usize - 1);
    omega_pows.push(field.one());
    for _ in 1..(r - 1) {
        omega_pows.push(omega_pows.last().unwrap() * w.omega());
    }

    // Signed exponents realized as numerator/denominator products with one
    // inversion per product.
    let fold = |acc: &mut RingEl, base_omega: &Fe, exp: &BigUint| -> Result<()> {
        let base = ring.linear(w.b(), &(-base_omega));
        let term = base.pow_until(exp, deadline)?;
        *acc = &*acc * &term;
        Ok(())
    };

    // One inversion per product; a denominator of 1 needs none.
    let combine = |num: RingEl, den: RingEl| -> Result<RingEl> {
        if den.is_one() {
            Ok(num)
        } else {
            Ok(&num * &den.inv()?)
        }
    };

    // E₁: sign (−1)^{r−i} with r odd is negative exactly when i is even.
    let c_r2 = binomial_row(r - 2);
    let mut e1_num = ring.one();
    let mut e1_den = ring.one();
    for i in 0..=(r - 2) {
        let acc = if i % 2 == 1 { &mut e1_num } else { &mut e1_den };
        fold(acc, &omega_pows[i as usize], &c_r2[i as usize])?;
    }
    let e1 = combine(e1_num, e1_den)?;

    // E₂ exponents (1 − (−1)^i C(r−1, i))/r: positive (C+1)/r for odd i,
    // negative with magnitude (C−1)/r for even i.
    let c_r1 = binomial_row(r - 1);
    let mut e2_num = ring.one();
    let mut e2_den = ring.one();
    for i in 1..=(r - 1) {
        let c = &c_r1[i as usize];
        let (acc, numer) = if i % 2 == 1 {
            (&mut e2_num, c + 1u32)
        } else {
            (&mut e2_den, c - 1u32)
        };
        if numer.is_zero() {
            continue;
        }
        let (exp, rem) = numer.div_rem(&r_big);
        if !rem.is_zero() {
            return Err(Error::InternalInconsistency(format!(
                "E2 exponent (1 - (-1)^{i} C({},{i}))/{r} is not an integer",
                r - 1
            )));
        }
        fold(acc, &omega_pows[(r - 1 - i) as usize], &exp)?;
    }
    let e2 = combine(e2_num, e2_den)?;
    trace.accumulation_mults = span.elapsed();

    let span = counter::Span::begin();
    let e1_pow = e1.pow_until(&prob.exp_r, deadline)?;
    trace.exponentiation_mults = span.elapsed();

    let span = counter::Span::begin();
    let x = (&e1_pow * &e2).constant_term(true)?;
    verify_root(prob, &x)?;
    trace.assembly_mults = span.elapsed();
    Ok((x, trace))
}

fn require_odd_prime(prob: &RootProblem, algo: AlgoId) -> Result<()> {
    if algo.applicable(prob.r, prob.r_is_prime()) {
        Ok(())
    } else {
        Err(Error::NotApplicable { algo, r: prob.r })
    }
}

/// Row C(n, 0..=n) of Pascal's triangle, exact.
fn binomial_row(n: u64) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n as usize + 1);
    row.push(BigUint::one());
    for k in 0..n {
        let next = (row.last().unwrap() * (n - k)) / (k + 1);
        row.push(next);
    }
    row
}

/// The r distinct roots {x·ω^i}, sorted ascending as integers.
pub fn all_roots(prob: &RootProblem, x: &Fe, w: &RootWitness) -> Result<Vec<Fe>> {
    let mut roots = Vec::with_capacity(prob.r as usize);
    let mut cur = x.clone();
    for _ in 0..prob.r {
        roots.push(cur.clone());
        cur = &cur * w.omega();
    }
    roots.sort_by_key(Fe::value);
    for pair in roots.windows(2) {
        if pair[0] == pair[1] {
            return Err(Error::InternalInconsistency(
                "duplicate roots: ω is not a primitive r-th root of unity".into(),
            ));
        }
    }
    Ok(roots)
}

/// Exhaustive root set by scanning y ∈ [0, p). Independent of the field /
/// ring implementation (plain u64 arithmetic); guarded to p < 2^20.
pub fn oracle_roots(prob: &RootProblem) -> Result<Vec<Fe>> {
    if prob.field.bits() > 20 {
        return Err(Error::Usage(
            "oracle_roots is limited to p < 2^20".into(),
        ));
    }
    let p = prob.field.modulus().to_u64_digits()[0];
    let c = prob
        .c
        .value()
        .to_u64_digits()
        .first()
        .copied()
        .unwrap_or(0);
    let mut out = Vec::new();
    for y in 0..p {
        if powmod_u64(y, prob.r, p) == c {
            out.push(prob.field.from_u64(y));
        }
    }
    Ok(out)
}

fn powmod_u64(base: u64, mut exp: u64, m: u64) -> u64 {
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

/// Field multiplications by phase for one extraction.
#[derive(Debug, Clone, Copy, Default)]
pub struct PhaseCounts {
    pub witness_search: u64,
    pub accumulation: u64,
    pub exponentiation: u64,
    pub assembly: u64,
}

impl PhaseCounts {
    /// Algorithm-only multiplications (witness search excluded).
    pub fn algo_total(&self) -> u64 {
        self.accumulation + self.exponentiation + self.assembly
    }

    pub fn total(&self) -> u64 {
        self.witness_search + self.algo_total()
    }
}

/// Outcome of [`extract`].
#[derive(Debug, Clone)]
pub struct Extraction {
    pub x: Fe,
    /// Absent only for the trivial c = 0 instance.
    pub witness: Option<RootWitness>,
    pub counts: PhaseCounts,
    /// Accumulation-loop iterations (root_new; zero for the others).
    pub loop_iterations: u64,
}

/// Dispatch one algorithm run on a prepared witness.
pub fn run_algo(
    prob: &RootProblem,
    w: &RootWitness,
    algo: AlgoId,
    deadline: Option<Instant>,
) -> Result<(Fe, AlgoTrace)> {
    match algo {
        AlgoId::Hc => root_hc_traced(prob, w, deadline),
        AlgoId::Wh => root_wh_traced(prob, w, deadline),
        AlgoId::New => root_new_traced(prob, w, deadline),
    }
}

/// Full pipeline: trivial-zero shortcut, applicability and residue checks,
/// witness search, algorithm run, verification.
pub fn extract(prob: &RootProblem, algo: AlgoId, seed: u64) -> Result<Extraction> {
    if prob.c.is_zero() {
        return Ok(Extraction {
            x: prob.field.zero(),
            witness: None,
            counts: PhaseCounts::default(),
            loop_iterations: 0,
        });
    }
    if !algo.applicable(prob.r, prob.r_is_prime()) {
        return Err(Error::NotApplicable { algo, r: prob.r });
    }
    // the residue pre-check counts toward the witness-search phase
    let span = counter::Span::begin();
    if !is_rth_residue(prob) {
        return Err(Error::NonResidue);
    }
    let witness = find_witness(prob, seed, None)?;
    let witness_search = span.elapsed();

    let (x, trace) = run_algo(prob, &witness, algo, None)?;
    Ok(Extraction {
        x,
        witness: Some(witness),
        counts: PhaseCounts {
            witness_search,
            accumulation: trace.accumulation_mults,
            exponentiation: trace.exponentiation_mults,
            assembly: trace.assembly_mults,
        },
        loop_iterations: trace.loop_iterations,
    })
}
