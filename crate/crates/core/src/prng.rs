//! Seedable, streamed PCG32 generator (64-bit LCG state, XSH-RR output).
//!
//! The constants and the seeding sequence follow the reference
//! `pcg32_srandom_r` so that `(seed, stream)` pairs reproduce the same
//! sequence on every platform. Real numbers use 53 random mantissa bits
//! assembled from two 32-bit outputs.

use crate::error::{Error, Result};

const MULTIPLIER: u64 = 6_364_136_223_846_793_005;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_STREAM: u64 = 54;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pcg32 {
    state: u64,
    inc: u64,
}

impl Default for Pcg32 {
    fn default() -> Self {
        Pcg32::new(DEFAULT_SEED, DEFAULT_STREAM)
    }
}

impl Pcg32 {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = Pcg32 {
            state: 0,
            inc: (stream << 1) | 1,
        };
        rng.step();
        rng.state = rng.state.wrapping_add(seed);
        rng.step();
        rng
    }

    #[inline]
    fn step(&mut self) {
        self.state = self.state.wrapping_mul(MULTIPLIER).wrapping_add(self.inc);
    }

    #[inline]
    pub fn next_u32(&mut self) -> u32 {
        let old = self.state;
        self.step();
        let xorshifted = (((old >> 18) ^ old) >> 27) as u32;
        let rot = (old >> 59) as u32;
        xorshifted.rotate_right(rot)
    }

    pub fn next_u64(&mut self) -> u64 {
        let hi = self.next_u32() as u64;
        let lo = self.next_u32() as u64;
        (hi << 32) | lo
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        let a = (self.next_u32() >> 5) as u64;
        let b = (self.next_u32() >> 6) as u64;
        ((a << 26) | b) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_real(&mut self, lo: f64, hi: f64) -> Result<f64> {
        if !(lo <= hi) {
            return Err(Error::Argument(format!("empty real interval [{lo}, {hi})")));
        }
        if lo == hi {
            return Ok(lo);
        }
        let v = lo + (hi - lo) * self.next_f64();
        // rounding can land exactly on hi for wide intervals
        Ok(if v >= hi { lo.max(hi - (hi - lo) * f64::EPSILON) } else { v })
    }

    /// Unbiased integer in `[lo, hi]` by rejection sampling.
    pub fn uniform_int(&mut self, lo: i64, hi: i64) -> Result<i64> {
        if lo > hi {
            return Err(Error::Argument(format!("empty integer interval [{lo}, {hi}]")));
        }
        let span = hi.wrapping_sub(lo) as u64;
        let offset = if span < u32::MAX as u64 {
            self.bounded_u32(span as u32 + 1) as u64
        } else if span == u64::MAX {
            self.next_u64()
        } else {
            self.bounded_u64(span + 1)
        };
        Ok(lo.wrapping_add(offset as i64))
    }

    pub(crate) fn index(&mut self, len: usize) -> usize {
        debug_assert!(len > 0);
        self.uniform_int(0, len as i64 - 1).expect("non-empty range") as usize
    }

    fn bounded_u32(&mut self, bound: u32) -> u32 {
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let r = self.next_u32();
            if r >= threshold {
                return r % bound;
            }
        }
    }

    fn bounded_u64(&mut self, bound: u64) -> u64 {
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let r = self.next_u64();
            if r >= threshold {
                return r % bound;
            }
        }
    }

    /// Standard normal draw (Box-Muller, cosine branch only).
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// `count` distinct elements of `pool`, uniformly without replacement,
    /// in draw order (partial Fisher-Yates).
    pub fn sample_without_replacement(&mut self, pool: &[usize], count: usize) -> Vec<usize> {
        let mut items = pool.to_vec();
        let count = count.min(items.len());
        for i in 0..count {
            let j = i + self.index(items.len() - i);
            items.swap(i, j);
        }
        items.truncate(count);
        items
    }
}
