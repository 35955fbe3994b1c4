//! Thread-local multiplication counter.
//!
//! Every field multiplication (squarings included) bumps the counter of the
//! calling thread; additions, subtractions and inversions do not count.
//! Benchmark cells each run on a single thread and aggregate deltas
//! explicitly, so counts from concurrent runs never interleave.

use std::cell::Cell;

thread_local! {
    static MULTS: Cell<u64> = const { Cell::new(0) };
}

#[inline]
pub(crate) fn bump() {
    MULTS.with(|c| c.set(c.get() + 1));
}

/// Multiplications counted on this thread since the last [`reset`].
pub fn read() -> u64 {
    MULTS.with(|c| c.get())
}

/// Zero this thread's counter.
pub fn reset() {
    MULTS.with(|c| c.set(0));
}

/// Delta meter over the thread counter. Spans only read the counter, so
/// they may nest freely.
#[derive(Debug)]
pub struct Span(u64);

impl Span {
    pub fn begin() -> Self {
        Span(read())
    }

    pub fn elapsed(&self) -> u64 {
        read() - self.0
    }
}
