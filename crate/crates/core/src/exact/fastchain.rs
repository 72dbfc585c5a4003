//! Checked 128-bit fast paths for sign-variation counting.
//!
//! These mirror the big-integer Sturm machinery in `sturm.rs` on plain
//! `i128` coefficient slices (constant term first).  Every arithmetic
//! step is overflow-checked; `None` means the caller must redo the
//! computation with big integers.  Results, when present, are exact.

use num_integer::Integer;

/// Sign-variation summary of the signed remainder chain of `f`.
#[derive(Clone, Copy, Debug)]
pub struct ChainCounts {
    pub var_neg_inf: usize,
    pub var_pos_inf: usize,
    /// Degree of the final chain element, i.e. of `gcd(f, f')`.
    pub last_degree: usize,
}

#[inline]
fn trim(c: &mut Vec<i128>) {
    while c.len() > 1 && *c.last().unwrap() == 0 {
        c.pop();
    }
    if c.len() == 1 && c[0] == 0 {
        c.clear();
    }
}

#[inline]
fn deg(c: &[i128]) -> usize {
    c.len().saturating_sub(1)
}

fn content(c: &[i128]) -> i128 {
    let mut g: i128 = 0;
    for &a in c {
        if a == i128::MIN {
            return 1; // |MIN| overflows; skip stripping
        }
        g = g.gcd(&a);
        if g == 1 {
            break;
        }
    }
    g
}

fn strip_content(c: &mut [i128]) {
    let g = content(c);
    if g > 1 {
        for a in c.iter_mut() {
            *a /= g;
        }
    }
}

fn derivative(c: &[i128]) -> Option<Vec<i128>> {
    if c.len() <= 1 {
        return Some(Vec::new());
    }
    let mut out = Vec::with_capacity(c.len() - 1);
    for (i, &a) in c.iter().enumerate().skip(1) {
        out.push(a.checked_mul(i as i128)?);
    }
    Some(out)
}

/// Pseudo-remainder of `a` by `b` (`lc(b)^(delta+1) * a mod b`), with the
/// sign flipped when the implied multiplier is negative, then negated and
/// content-stripped: exactly the next element of the signed chain.
fn next_chain_element(a: &[i128], b: &[i128]) -> Option<Vec<i128>> {
    let db = deg(b);
    let da = deg(a);
    debug_assert!(da >= db && !b.is_empty());
    let lb = *b.last().unwrap();
    let delta = da - db;
    let mut rem: Vec<i128> = a.to_vec();
    for k in (0..=delta).rev() {
        let top = rem[db + k];
        for c in rem.iter_mut() {
            *c = c.checked_mul(lb)?;
        }
        for (i, &dc) in b.iter().enumerate() {
            rem[i + k] = rem[i + k].checked_sub(top.checked_mul(dc)?)?;
        }
        debug_assert_eq!(rem[db + k], 0);
    }
    trim(&mut rem);
    if rem.is_empty() {
        return Some(rem);
    }
    // Multiplier lc(b)^(delta+1): if negative, the computed remainder has
    // the opposite sign of the true positive-multiplier remainder.
    let multiplier_negative = lb < 0 && (delta + 1) % 2 == 1;
    if !multiplier_negative {
        for c in rem.iter_mut() {
            *c = c.checked_neg()?;
        }
    }
    strip_content(&mut rem);
    Some(rem)
}

#[inline]
fn sign(x: i128) -> i8 {
    match x.cmp(&0) {
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
        std::cmp::Ordering::Greater => 1,
    }
}

fn variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut count = 0;
    let mut last: Option<i8> = None;
    for s in signs {
        if s == 0 {
            continue;
        }
        if let Some(prev) = last {
            if prev != s {
                count += 1;
            }
        }
        last = Some(s);
    }
    count
}

/// Signed remainder chain of `(f, f')` with per-element content removal,
/// summarized by its sign variations at minus and plus infinity and the
/// degree of its last element.  `f` must be nonconstant.
pub fn chain_counts(f: &[i128]) -> Option<ChainCounts> {
    debug_assert!(deg(f) >= 1);
    let mut chain: Vec<Vec<i128>> = Vec::with_capacity(f.len());
    let mut f0 = f.to_vec();
    trim(&mut f0);
    strip_content(&mut f0);
    let mut f1 = derivative(&f0)?;
    strip_content(&mut f1);
    chain.push(f0);
    chain.push(f1);
    loop {
        let a = &chain[chain.len() - 2];
        let b = &chain[chain.len() - 1];
        if b.is_empty() || deg(a) < deg(b) {
            break;
        }
        let next = next_chain_element(a, b)?;
        if next.is_empty() {
            break;
        }
        chain.push(next);
    }
    let pos = |c: &Vec<i128>| sign(*c.last().unwrap_or(&0));
    let neg = |c: &Vec<i128>| {
        let s = sign(*c.last().unwrap_or(&0));
        if deg(c) % 2 == 0 {
            s
        } else {
            -s
        }
    };
    Some(ChainCounts {
        var_neg_inf: variations(chain.iter().map(neg)),
        var_pos_inf: variations(chain.iter().map(pos)),
        last_degree: deg(chain.last().unwrap()),
    })
}

/// `true` when every complex root of `f` is real; `f` nonconstant.
/// By Sturm-Tarski the variation difference of the signed remainder
/// chain counts the distinct real roots even when `f` has repeated
/// roots, and the number of distinct complex roots is
/// `deg f - deg gcd(f, f')`.
pub fn totally_real(f: &[i128]) -> Option<bool> {
    let cc = chain_counts(f)?;
    Some(cc.var_neg_inf - cc.var_pos_inf == deg(f) - cc.last_degree)
}

/// Coefficients of `f(x + a)` (Taylor shift), constant term first.
pub fn taylor_shift(f: &[i128], a: i128) -> Option<Vec<i128>> {
    let mut c = f.to_vec();
    let n = deg(&c);
    for k in 0..n {
        for j in (k..n).rev() {
            c[j] = c[j].checked_add(a.checked_mul(c[j + 1])?)?;
        }
    }
    Some(c)
}

/// The polynomial whose roots are the squares of the roots of `f`:
/// `(-1)^deg f * f(y) * f(-y)` read as a polynomial in `y^2`.
/// Multiplicities carry over; `f` need not be squarefree.
pub fn root_squares(f: &[i128]) -> Option<Vec<i128>> {
    let d = deg(f);
    let mut prod = vec![0i128; 2 * d + 1];
    for (i, &a) in f.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in f.iter().enumerate() {
            if b == 0 {
                continue;
            }
            let term = a.checked_mul(b)?;
            let term = if j % 2 == 1 { term.checked_neg()? } else { term };
            prod[i + j] = prod[i + j].checked_add(term)?;
        }
    }
    let flip = d % 2 == 1;
    let mut out = Vec::with_capacity(d + 1);
    for j in 0..=d {
        let c = prod[2 * j];
        out.push(if flip { c.checked_neg()? } else { c });
    }
    Some(out)
}

/// For real-rooted `p`: does `p` have no root strictly above `a`?
/// Shifts to `p(x + a)` and applies Descartes' rule, which is exact for
/// real-rooted polynomials: positive roots correspond one-to-one to
/// coefficient sign changes.
pub fn no_roots_above(p: &[i128], a: i128) -> Option<bool> {
    let shifted = taylor_shift(p, a)?;
    Some(variations(shifted.iter().map(|&c| sign(c))) == 0)
}

/// Roots of `f` all real and within `[-2 sqrt q, 2 sqrt q]`; `f`
/// nonconstant.  The bound is tested on squared roots against `4q`.
pub fn roots_admissible(f: &[i128], q: u64) -> Option<bool> {
    if !totally_real(f)? {
        return Some(false);
    }
    let p = root_squares(f)?;
    no_roots_above(&p, 4 * q as i128)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_detects_real_and_complex() {
        // x^2 - 2: two real roots.
        assert_eq!(totally_real(&[-2, 0, 1]), Some(true));
        // x^2 + 1: none.
        assert_eq!(totally_real(&[1, 0, 1]), Some(false));
        // (x-1)^2 (x+2): repeated roots, still totally real.
        assert_eq!(totally_real(&[2, -3, 0, 1]), Some(true));
        // (x-1)^2 (x^2+1).
        assert_eq!(totally_real(&[1, -2, 2, -2, 1]), Some(false));
    }

    #[test]
    fn shift_matches_binomial() {
        // (x+1)^2 from x^2.
        assert_eq!(taylor_shift(&[0, 0, 1], 1), Some(vec![1, 2, 1]));
        // x^2 - 4 shifted by 2: (x+2)^2 - 4 = x^2 + 4x.
        assert_eq!(taylor_shift(&[-4, 0, 1], 2), Some(vec![0, 4, 1]));
    }

    #[test]
    fn root_squares_handles_multiplicity() {
        // (x-1)(x+2): squares {1, 4} -> x^2 - 5x + 4.
        assert_eq!(root_squares(&[-2, 1, 1]), Some(vec![4, -5, 1]));
        // (x-2)^2: squares {4, 4} -> (x-4)^2.
        assert_eq!(root_squares(&[4, -4, 1]), Some(vec![16, -8, 1]));
    }

    #[test]
    fn descartes_boundary_semantics() {
        // p = (x-4)^2 (x-9), roots above 4: just 9.
        let p = [-144, 88, -17, 1];
        assert_eq!(no_roots_above(&p, 9), Some(true));
        assert_eq!(no_roots_above(&p, 4), Some(false));
        // Root exactly at the cut does not count.
        let q = [-4, 1]; // x - 4
        assert_eq!(no_roots_above(&q, 4), Some(true));
        assert_eq!(no_roots_above(&q, 3), Some(false));
    }

    #[test]
    fn admissibility_examples() {
        // q = 128 examples, matching the big-integer implementation.
        assert_eq!(roots_admissible(&[461, 43, 1], 128), Some(true));
        assert_eq!(roots_admissible(&[480, 44, 1], 128), Some(false));
        assert_eq!(roots_admissible(&[22, 1], 128), Some(true));
        assert_eq!(roots_admissible(&[23, 1], 128), Some(false));
        assert_eq!(roots_admissible(&[1, 0, 1], 128), Some(false));
        // Exact endpoint with a repeated root: q = 121, (x+22)^2.
        assert_eq!(roots_admissible(&[484, 44, 1], 121), Some(true));
        // Repeated endpoint root times an inadmissible factor.
        // (x+22)^2 (x+23) over q = 121.
        assert_eq!(roots_admissible(&[11132, 1496, 67, 1], 121), Some(false));
    }
}
