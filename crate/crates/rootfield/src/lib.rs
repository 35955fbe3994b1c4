//! r-th root extraction in prime fields F_p with p ≡ 1 (mod r).
//!
//! Three Cipolla-Lehmer-type algorithms over the quotient ring
//! F_p[θ]/(θ^r − d):
//!
//! * `hc` — direct exponentiation to (1 + q + … + q^{r−1})/r,
//!   O(r³ log q) field multiplications, odd prime r;
//! * `wh` — binomial-exponent split E₁^((q−1)/r)·E₂,
//!   O(r⁴ + r² log q), odd prime r;
//! * `new` — telescoping accumulation, O(r³ + r² log q), any r > 1
//!   (including composite and even r).
//!
//! Every field multiplication is counted on a thread-local counter
//! ([`fp::counter`]), which the benchmark harness ([`bench`]) reports next
//! to wall time, since instruction counts reproduce across machines while
//! seconds do not.

pub mod bench;
pub mod cli;
pub mod error;
pub mod fp;
pub mod ring;
pub mod roots;

pub use error::{Error, Result};
pub use fp::{Fe, FieldCtx};
pub use ring::{RingCtx, RingEl};
pub use roots::{AlgoId, Extraction, PhaseCounts, RootProblem, RootWitness};
