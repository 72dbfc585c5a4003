//! Isogeny-class constraints: which real Weil polynomials actually come
//! from abelian varieties, and with which multiplicities.
//!
//! For an irreducible admissible factor `h`, the corresponding conjugacy
//! class of Frobenius eigenvalues determines a simple abelian variety
//! whose real Weil polynomial is `h^e` for a specific exponent `e`; `h`
//! can only appear in the real Weil polynomial of a variety with
//! multiplicity divisible by `e`.  The exponent is the least common
//! denominator of the local invariants of the endomorphism algebra, and
//! each invariant is `slope * degree / a` (mod 1) taken over the
//! `p`-adic factors of the Weil polynomial.  Slopes come from the Newton
//! polygon; local degrees come from the residual polynomials of its
//! segments, refined where necessary by a Newton-polygon analysis of
//! shifted polynomials.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::util::{valuation_u64};
use crate::exact::{polygon_segments, IntPoly, Segment};
use crate::smallfield::{self, FPoly, SmallField};
use crate::weil::{to_weil, FieldParams};

/// Result of an exponent computation.  `Unknown` is an honest "could not
/// decide": the local factorization was ambiguous beyond the refinement
/// this module performs.  Callers must treat `Unknown` conservatively
/// (no elimination based on it).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exponent {
    Known(u64),
    Unknown,
}

impl Exponent {
    pub fn known(self) -> Option<u64> {
        match self {
            Exponent::Known(e) => Some(e),
            Exponent::Unknown => None,
        }
    }
}

/// Whether an elliptic curve over `F_q` with Frobenius trace `t` exists
/// (for `t^2 <= 4q`): the classification of admissible elliptic traces.
pub fn elliptic_trace_admissible(ctx: &FieldParams, t: i64) -> bool {
    let q = ctx.q as i64;
    debug_assert!(t * t <= 4 * q, "trace out of the Weil interval");
    let p = ctx.p as i64;
    let a = ctx.a;
    if t.rem_euclid(p) != 0 {
        return true; // ordinary
    }
    if a % 2 == 0 {
        let root = ctx.p.pow(a / 2) as i64;
        if t == 2 * root || t == -2 * root {
            return true;
        }
        if ctx.p % 3 != 1 && (t == root || t == -root) {
            return true;
        }
        if ctx.p % 4 != 1 && t == 0 {
            return true;
        }
    } else {
        if t == 0 {
            return true;
        }
        if ctx.p == 2 || ctx.p == 3 {
            let v = ctx.p.pow((a + 1) / 2) as i64;
            if t == v || t == -v {
                return true;
            }
        }
    }
    false
}

/// Exponent of an irreducible admissible real Weil factor `h`: the
/// smallest `e` such that `h^e` is the real Weil polynomial of an
/// abelian variety.  Any variety containing the isogeny factor attached
/// to `h` contains it with multiplicity divisible by `e`.
///
/// The caller must pass an `h` that is irreducible over `Q` and passes
/// `weil::validate`; the result is unspecified otherwise.
pub fn honda_tate_exponent(h: &IntPoly, ctx: &FieldParams) -> Result<Exponent> {
    let d = match h.degree() {
        Some(d) if d >= 1 => d,
        _ => return Err(Error::invalid("exponent of a constant polynomial")),
    };
    // The totally real pair +-2*sqrt(q) (q not a square): its minimal
    // abelian variety is a surface whose real Weil polynomial is
    // x^2 - 4q itself.
    if d == 2
        && h.coeff(1).is_zero()
        && h.coeff(0) == BigInt::from(-4 * (ctx.q as i64))
    {
        return Ok(Exponent::Known(1));
    }
    if d == 1 {
        // Elliptic trace: honest elliptic curves exist exactly for the
        // admissible traces; otherwise fall through to the local
        // analysis of x^2 - tx + q.
        let c = h.coeff(0);
        let t_big = -c;
        let t: i64 = t_big
            .try_into()
            .map_err(|_| Error::invalid("trace out of machine range"))?;
        if t * t > 4 * ctx.q as i64 {
            return Err(Error::invalid("trace outside the Weil interval"));
        }
        if elliptic_trace_admissible(ctx, t) {
            return Ok(Exponent::Known(1));
        }
    }
    let f0 = to_weil(h, ctx.q)?;
    // Ordinary check: middle coefficient prime to p.
    let mid = f0.coeff(d);
    if !mid.is_zero() && crate::exact::util::valuation(&mid, ctx.p) == 0 {
        return Ok(Exponent::Known(1));
    }
    local_invariant_lcm(&f0, ctx)
}

/// Least common multiple of the denominators of the local invariants
/// `slope * degree / a` over the `p`-adic factors of `f0`.
fn local_invariant_lcm(f0: &IntPoly, ctx: &FieldParams) -> Result<Exponent> {
    let segs = polygon_segments(f0, ctx.p)?;
    // Each segment contributes a set of possible lcm values (singleton
    // when fully determined).
    let mut possibilities: BTreeSet<u64> = [1u64].into();
    for seg in &segs {
        let contrib = segment_possibilities(f0, ctx, seg)?;
        let mut next = BTreeSet::new();
        for &e in &possibilities {
            for &c in &contrib {
                next.insert(e.lcm(&c));
            }
        }
        possibilities = next;
    }
    if possibilities.len() == 1 {
        Ok(Exponent::Known(*possibilities.iter().next().unwrap()))
    } else {
        Ok(Exponent::Unknown)
    }
}

/// Denominator of `slope * degree / a`: the contribution a single local
/// factor of the given degree makes to the exponent.
fn invariant_denominator(slope: Rational64, degree: usize, a: u32) -> u64 {
    if degree == 0 {
        return 1;
    }
    let inv = slope * Rational64::new(degree as i64, a as i64);
    *inv.denom() as u64
}

/// Possible invariant-lcm contributions of one polygon segment.
fn segment_possibilities(
    f0: &IntPoly,
    ctx: &FieldParams,
    seg: &Segment,
) -> Result<BTreeSet<u64>> {
    let slope = seg.root_valuation();
    let sigma = *slope.numer();
    let rho = *slope.denom() as usize;
    let ell = seg.length();
    let a = ctx.a as i64;
    // Integer multiple of a: every factor has invariant 0 regardless of
    // how the segment splits.  This covers slope 0, slope a, and all
    // prime fields (a = 1).
    if sigma % a == 0 && rho == 1 {
        return Ok([1u64].into());
    }
    // Totally ramified segment: a single local factor of degree rho.
    if ell == rho {
        return Ok([invariant_denominator(slope, rho, ctx.a)].into());
    }
    // General segment: local degrees follow the factorization of the
    // residual polynomial over F_p.
    if ctx.p > smallfield::MAX_Q {
        // Cannot factor residuals; give the safe spread of partitions.
        return Ok(partition_possibilities_for_unknown(slope, rho, ell / rho, ctx.a));
    }
    let fp = SmallField::new(ctx.p)?;
    let residual = residual_polynomial(f0, ctx.p, seg, &fp)?;
    let (_, factors) = smallfield::factor(&fp, &residual);
    let mut out: BTreeSet<u64> = [1u64].into();
    for (pi, mult) in factors {
        let k = pi.deg();
        let part = group_possibilities(f0, ctx, slope, rho, k, mult, &fp, &pi, 0)?;
        let mut next = BTreeSet::new();
        for &e in &out {
            for &c in &part {
                next.insert(e.lcm(&c));
            }
        }
        out = next;
    }
    Ok(out)
}

/// Possible contributions of the group of roots belonging to one
/// irreducible residual factor `pi` of degree `k` with multiplicity
/// `mult` on a segment of slope `sigma/rho`.
///
/// * `mult == 1`: exactly one local factor, of degree `rho * k`.
/// * `mult >= 2`: the group can split into local factors of degrees
///   `rho * k * j` for any partition `sum j = mult`.  If every partition
///   yields the same lcm the answer is exact; otherwise, for linear
///   residual factors on integer slopes, a shifted Newton polygon
///   resolves the splitting one level deeper.
#[allow(clippy::too_many_arguments)]
fn group_possibilities(
    f0: &IntPoly,
    ctx: &FieldParams,
    orig_slope: Rational64,
    rho: usize,
    k: usize,
    mult: usize,
    fp: &SmallField,
    pi: &FPoly,
    depth: u32,
) -> Result<BTreeSet<u64>> {
    if mult == 1 {
        return Ok([invariant_denominator(orig_slope, rho * k, ctx.a)].into());
    }
    let dens: Vec<u64> = (1..=mult)
        .map(|j| invariant_denominator(orig_slope, rho * k * j, ctx.a))
        .collect();
    let parts = partition_lcms(&dens);
    if parts.len() == 1 {
        return Ok(parts);
    }
    // Ambiguous.  Refine when the group is approachable: linear residual
    // factor on an integer slope, limited depth.
    if rho == 1 && k == 1 && depth < 3 && orig_slope.is_integer() {
        if let Some(set) = refine_linear_group(f0, ctx, orig_slope, fp, pi, depth)? {
            return Ok(set);
        }
    }
    Ok(parts)
}

/// All values `lcm(d_{j_1}, ..., d_{j_t})` over partitions
/// `j_1 + ... + j_t = m` of `m = dens.len()`, where `d_j = dens[j-1]`.
fn partition_lcms(dens: &[u64]) -> BTreeSet<u64> {
    let m = dens.len();
    // sets[t] = possible lcms for total weight t.
    let mut sets: Vec<BTreeSet<u64>> = vec![BTreeSet::new(); m + 1];
    sets[0].insert(1);
    for t in 1..=m {
        let mut acc = BTreeSet::new();
        for j in 1..=t {
            let d = dens[j - 1];
            for &s in &sets[t - j] {
                acc.insert(s.lcm(&d));
            }
        }
        sets[t] = acc;
    }
    sets[m].clone()
}

/// Partition spread when the residual cannot even be factored (huge
/// characteristic): local degrees are unknown multiples of `rho` summing
/// to `rho * n`.
fn partition_possibilities_for_unknown(
    slope: Rational64,
    rho: usize,
    n: usize,
    a: u32,
) -> BTreeSet<u64> {
    let dens: Vec<u64> = (1..=n)
        .map(|j| invariant_denominator(slope, rho * j, a))
        .collect();
    partition_lcms(&dens)
}

/// Residual polynomial of a segment: coefficients on the segment line,
/// divided by their exact power of `p`, reduced mod `p`.
fn residual_polynomial(
    f0: &IntPoly,
    p: u64,
    seg: &Segment,
    fp: &SmallField,
) -> Result<FPoly> {
    let val = seg.root_valuation();
    let rho = *val.denom() as usize;
    let sigma = *val.numer();
    let n = seg.length() / rho;
    let p_big = BigInt::from(p);
    let mut coeffs = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let idx = seg.x0 + j * rho;
        // Height of the segment line at idx (an integer at these steps).
        let line = seg.y0 - (j as i64) * sigma;
        debug_assert!(line >= 0);
        let c = f0.coeff(idx);
        let reduced = if c.is_zero() {
            BigInt::zero()
        } else {
            let v = crate::exact::util::valuation(&c, p) as i64;
            if v < line {
                return Err(Error::internal("coefficient below Newton segment"));
            }
            if v > line {
                BigInt::zero()
            } else {
                let div = c / p_big.pow(line as u32);
                div.mod_floor(&p_big)
            }
        };
        let r: u32 = reduced.try_into().map_err(|_| Error::internal("residual overflow"))?;
        coeffs.push(crate::smallfield::Fe(r));
    }
    Ok(FPoly::new(fp, coeffs))
}

/// Resolve the splitting of a group of roots with linear residual `pi`
/// on an integer slope `s`: substitute `x = p^s (y + c)` (with `c` a
/// lift of the residual root), clear content, and analyze the strictly
/// positive part of the new polygon, which captures exactly this group.
fn refine_linear_group(
    f0: &IntPoly,
    ctx: &FieldParams,
    orig_slope: Rational64,
    fp: &SmallField,
    pi: &FPoly,
    depth: u32,
) -> Result<Option<BTreeSet<u64>>> {
    let s = orig_slope.to_integer();
    if s < 0 {
        return Ok(None);
    }
    // pi = z - c_bar; lift the root.
    let c_bar = fp.neg(pi.coeff(0));
    let c = BigInt::from(c_bar.0);
    let ps = BigInt::from(ctx.p).pow(s as u32);
    let shift = &c * &ps;
    // g(y) = f0(p^s * y + c * p^s), then strip content.
    let scaled = scale_variable(&f0.shift(&shift), &ps);
    let g = scaled.primitive_part();
    let segs = polygon_segments(&g, ctx.p);
    let segs = match segs {
        Ok(s) => s,
        Err(_) => return Ok(None), // e.g. g(0) = 0: a root exactly at the lift
    };
    let mut out: BTreeSet<u64> = [1u64].into();
    for seg in &segs {
        let val = seg.root_valuation();
        if val <= Rational64::zero() {
            continue; // other groups / other segments of the original
        }
        let rho = *val.denom() as usize;
        let ell = seg.length();
        let mut seg_set: BTreeSet<u64> = [1u64].into();
        if ell == rho {
            seg_set = [invariant_denominator(orig_slope, rho, ctx.a)].into();
        } else {
            let residual = residual_polynomial(&g, ctx.p, seg, fp)?;
            let (_, factors) = smallfield::factor(fp, &residual);
            for (sub_pi, mult) in factors {
                let k = sub_pi.deg();
                // Local degrees multiply: ramification rho and residue
                // degree k of the refined piece, invariant still taken
                // at the original slope.
                let part = if mult == 1 {
                    [invariant_denominator(orig_slope, rho * k, ctx.a)].into()
                } else {
                    let dens: Vec<u64> = (1..=mult)
                        .map(|j| invariant_denominator(orig_slope, rho * k * j, ctx.a))
                        .collect();
                    let parts = partition_lcms(&dens);
                    if parts.len() == 1 || !(rho == 1 && k == 1 && val.is_integer()) {
                        parts
                    } else {
                        // One more refinement level on the shifted
                        // polynomial.
                        match group_possibilities(
                            &g, ctx, orig_slope, rho, k, mult, fp, &sub_pi,
                            depth + 1,
                        ) {
                            Ok(set) => set,
                            Err(_) => parts,
                        }
                    }
                };
                let mut next = BTreeSet::new();
                for &e in &seg_set {
                    for &cv in &part {
                        next.insert(e.lcm(&cv));
                    }
                }
                seg_set = next;
            }
        }
        let mut next = BTreeSet::new();
        for &e in &out {
            for &cv in &seg_set {
                next.insert(e.lcm(&cv));
            }
        }
        out = next;
    }
    Ok(Some(out))
}

/// `f(c * x)` for integer `c`.
fn scale_variable(f: &IntPoly, c: &BigInt) -> IntPoly {
    let coeffs: Vec<BigInt> = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, a)| a * c.pow(i as u32))
        .collect();
    IntPoly::new(coeffs)
}

/// Exponent of the extremal linear factor `x + m` (`m = floor(2*sqrt(q))`):
/// `1` when `q` is a square or `q < 4`, otherwise `a / gcd(a, v_p(m))`.
pub fn defect0(ctx: &FieldParams) -> u64 {
    if ctx.a % 2 == 0 || ctx.q < 4 {
        return 1;
    }
    let w = if ctx.m % ctx.p == 0 {
        valuation_u64(ctx.m, ctx.p)
    } else {
        0
    };
    if w == 0 {
        return 1;
    }
    (ctx.a as u64) / (ctx.a as u64).gcd(&(w as u64))
}

/// Field sizes `q = 2^(2e+1) <= 2^max_exp` for which the extremal
/// factor `x + m` has exponent bigger than one, so that genus-`g`
/// curves cannot meet the elementary bound unless `defect0(q)` divides
/// the multiplicity of `x + m`.
pub fn exceptional_scan(max_exp: u32) -> Vec<u64> {
    let mut out = Vec::new();
    let mut e = 1;
    while 2 * e + 1 <= max_exp {
        let q = 1u64 << (2 * e + 1);
        let ctx = FieldParams::new(q).expect("power of two");
        if defect0(&ctx) > 1 {
            out.push(q);
        }
        e += 1;
    }
    out
}

/// For exceptional `q` (where `defect0(q) = delta > 1`), a lower bound
/// on the defect of any genus-`g` real Weil polynomial: the multiplicity
/// of `x + m` must be a multiple of `delta`, and the leftover degree
/// `g mod delta` must be covered by factors each contributing defect at
/// least half its degree.
pub fn exceptional_defect_bound(ctx: &FieldParams, g: usize) -> u64 {
    let delta = defect0(ctx);
    if delta <= 1 {
        return 0;
    }
    let r = (g as u64) % delta;
    r.div_ceil(2)
}

/// `p`-rank of (the isogeny class with) real Weil polynomial `h`: the
/// multiplicity of slope 0 in the Newton polygon of its Weil polynomial.
pub fn p_rank(h: &IntPoly, ctx: &FieldParams) -> Result<usize> {
    let f0 = to_weil(h, ctx.q)?;
    let polygon = crate::exact::newton_polygon(&f0, ctx.p)?;
    Ok(polygon
        .iter()
        .find(|(v, _)| v.is_zero())
        .map(|&(_, l)| l)
        .unwrap_or(0))
}
