//! Real Weil polynomials and the quantities attached to them.
//!
//! A *real Weil polynomial* for `F_q` is a monic integer polynomial
//! whose roots are real and lie in `[-2*sqrt(q), 2*sqrt(q)]`.  Each root
//! `y` corresponds to a conjugate pair `alpha, q/alpha` of Frobenius
//! eigenvalues with `alpha + q/alpha = y`; the associated *Weil
//! polynomial* is the degree-`2g` characteristic polynomial of
//! Frobenius.  Point counts over every extension field, and hence place
//! counts of every degree, are exact integer functions of the real Weil
//! polynomial.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::util::{isqrt_u64, moebius, prime_power};
use crate::exact::{self, IntPoly};

/// The base field `F_q` together with derived constants used everywhere:
/// the characteristic `p`, the extension degree `a` (so `q = p^a`), and
/// `m = floor(2*sqrt(q))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldParams {
    pub q: u64,
    pub p: u64,
    pub a: u32,
    pub m: u64,
}

impl FieldParams {
    pub fn new(q: u64) -> Result<FieldParams> {
        let (p, a) = prime_power(q)
            .ok_or_else(|| Error::invalid(format!("q = {q} is not a prime power")))?;
        Ok(FieldParams {
            q,
            p,
            a,
            m: isqrt_u64(4 * q),
        })
    }

    /// `true` when `q` is a square, i.e. `a` is even.
    pub fn is_square_q(&self) -> bool {
        self.a % 2 == 0
    }

    /// `sqrt(q)` when `q` is a square.
    pub fn sqrt_q(&self) -> Option<u64> {
        if self.is_square_q() {
            Some(self.p.pow(self.a / 2))
        } else {
            None
        }
    }

    /// The elementary upper bound `q + 1 + g*m` on the number of
    /// rational points of a genus-`g` curve over `F_q`.
    pub fn ws_bound(&self, g: usize) -> u64 {
        self.q + 1 + (g as u64) * self.m
    }
}

/// Map a real Weil polynomial `h` of degree `g` to the corresponding
/// Weil polynomial of degree `2g`:
/// `f(x) = x^g * h(x + q/x) = sum_j b_j x^j (x^2+q)^(g-j)` where
/// `b_j` is the coefficient of `y^(g-j)` in `h`.
pub fn to_weil(h: &IntPoly, q: u64) -> Result<IntPoly> {
    if !h.is_monic() {
        return Err(Error::invalid("real Weil polynomial must be monic"));
    }
    let g = h.deg();
    let x2q = IntPoly::from_i64(&[q as i64, 0, 1]);
    let mut f = IntPoly::zero();
    let mut x2q_pow = IntPoly::one();
    // Accumulate j from g down to 0 so (x^2+q)^(g-j) is built up once.
    for j in (0..=g).rev() {
        let b = h.coeff(g - j);
        let term = IntPoly::monomial(j, b);
        f = &f + &(&term * &x2q_pow);
        if j > 0 {
            x2q_pow = &x2q_pow * &x2q;
        }
    }
    Ok(f)
}

/// Sum of the roots of a monic polynomial.
pub fn trace(h: &IntPoly) -> BigInt {
    match h.degree() {
        Some(g) if g >= 1 => -h.coeff(g - 1),
        _ => BigInt::zero(),
    }
}

/// Number of rational points of a curve (or abelian variety minus-part
/// count) with real Weil polynomial `h`: `q + 1 - trace(h)`.
pub fn rational_points(h: &IntPoly, ctx: &FieldParams) -> BigInt {
    BigInt::from(ctx.q) + BigInt::one() - trace(h)
}

/// The defect of `h` relative to the maximal trace: `g*m + trace(h)`.
/// Rational points then satisfy `N = q + 1 + g*m - defect`.
pub fn defect(h: &IntPoly, ctx: &FieldParams) -> BigInt {
    let g = h.degree().unwrap_or(0);
    BigInt::from(ctx.m) * BigInt::from(g as u64) + trace(h)
}

/// Point counts `N_1, ..., N_dmax` over the extension fields
/// `F_{q^d}` for the (virtual) curve with real Weil polynomial `h`.
pub fn extension_point_counts(h: &IntPoly, ctx: &FieldParams, dmax: usize) -> Result<Vec<BigInt>> {
    let f = to_weil(h, ctx.q)?;
    let sums = f.power_sums(dmax);
    let q = BigInt::from(ctx.q);
    let mut out = Vec::with_capacity(dmax);
    let mut qd = BigInt::one();
    for d in 1..=dmax {
        qd *= &q;
        out.push(&qd + BigInt::one() - &sums[d - 1]);
    }
    Ok(out)
}

/// Place counts `a_1, ..., a_dmax`: the number of degree-`d` places of
/// the (virtual) function field, via Möbius inversion of the point
/// counts `N_d = sum over e dividing d of e * a_e`.
///
/// For any product of admissible real Weil polynomials these are
/// integers; a non-integer here means the arithmetic is broken, so it is
/// reported as an internal error rather than silently rounded.
pub fn place_counts(h: &IntPoly, ctx: &FieldParams, dmax: usize) -> Result<Vec<BigInt>> {
    let n = extension_point_counts(h, ctx, dmax)?;
    let mut out = Vec::with_capacity(dmax);
    for d in 1..=dmax {
        let mut acc = BigInt::zero();
        for e in crate::exact::util::divisors(d as u64) {
            let mu = moebius(e);
            if mu == 0 {
                continue;
            }
            let nd = &n[(d as u64 / e) as usize - 1];
            acc += BigInt::from(mu) * nd;
        }
        let d_big = BigInt::from(d as u64);
        if (&acc % &d_big) != BigInt::zero() {
            return Err(Error::internal(format!(
                "non-integral degree-{d} place count for h = {h}"
            )));
        }
        out.push(acc / d_big);
    }
    Ok(out)
}

/// Outcome of checking whether `h` is a valid real Weil polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeilStatus {
    /// Monic with all roots real and in `[-2*sqrt(q), 2*sqrt(q)]`.
    Valid,
    NotMonic,
    NotTotallyReal,
    RootOutOfRange,
}

impl WeilStatus {
    pub fn is_valid(self) -> bool {
        self == WeilStatus::Valid
    }
}

/// Check the defining conditions of a real Weil polynomial (monic, all
/// roots real, all roots within the closed interval).
pub fn validate(h: &IntPoly, q: u64) -> WeilStatus {
    if !h.is_monic() {
        return WeilStatus::NotMonic;
    }
    if h.deg() == 0 {
        return WeilStatus::Valid;
    }
    if !exact::is_totally_real(h) {
        return WeilStatus::NotTotallyReal;
    }
    if !exact::roots_admissible(h, q) {
        return WeilStatus::RootOutOfRange;
    }
    WeilStatus::Valid
}

/// Parse a polynomial from a comma/space separated list of integer
/// coefficients, constant term first (e.g. `"5,5,1"` for
/// `x^2 + 5x + 5`).
pub fn parse_poly(s: &str) -> Result<IntPoly> {
    let mut coeffs = Vec::new();
    for tok in s.split(|c: char| c == ',' || c.is_whitespace()) {
        if tok.is_empty() {
            continue;
        }
        let v: BigInt = tok
            .parse()
            .map_err(|_| Error::invalid(format!("bad coefficient {tok:?}")))?;
        coeffs.push(v);
    }
    if coeffs.is_empty() {
        return Err(Error::invalid("empty polynomial"));
    }
    Ok(IntPoly::new(coeffs))
}
