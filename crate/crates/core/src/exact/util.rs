//! Small number-theoretic utilities shared across the crate.

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{Signed, Zero};

/// Floor of the square root of a non-negative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of negative number");
    n.sqrt()
}

/// Floor of the square root of a `u64`.
pub fn isqrt_u64(n: u64) -> u64 {
    n.sqrt()
}

/// `true` if `n` is a perfect square.
pub fn is_square_u64(n: u64) -> bool {
    let r = isqrt_u64(n);
    r * r == n
}

/// The exponent of the largest power of `p` dividing `n`.
/// Requires `n != 0` and `p >= 2`.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    assert!(p >= 2);
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0u32;
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    v
}

/// The exponent of the largest power of `p` dividing `n` (`n != 0`).
pub fn valuation_u64(mut n: u64, p: u64) -> u32 {
    assert!(n != 0, "valuation of zero");
    assert!(p >= 2);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Trial-division primality test; adequate for the word-sized inputs
/// used throughout this crate.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs in
/// increasing prime order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1);
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// If `n` is a prime power `p^a` with `a >= 1`, return `(p, a)`.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    let f = factorize(n);
    match f.as_slice() {
        [(p, a)] => Some((*p, *a)),
        _ => None,
    }
}

/// The Möbius function of `n >= 1`.
pub fn moebius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        return 0;
    }
    if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All divisors of `n >= 1`, in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

/// `true` if `n` is squarefree.
pub fn is_squarefree(n: u64) -> bool {
    factorize(n).iter().all(|&(_, e)| e == 1)
}

/// A tiny deterministic pseudo-random generator (splitmix64).  Used where
/// the library needs arbitrary-but-reproducible choices, e.g. random
/// splitting attempts inside polynomial factorization.  Determinism
/// matters: the same inputs must always produce the same outputs.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..bound` (`bound > 0`), by rejection.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % bound;
            }
        }
    }
}
