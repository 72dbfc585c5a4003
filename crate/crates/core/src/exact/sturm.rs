//! Sturm chains and exact real-root counting.
//!
//! The chain is built with pseudo-remainders so every element stays an
//! integer polynomial; the multiplier used at each step is a *positive*
//! power of the leading coefficient, so sign variations behave exactly as
//! in the classical rational-coefficient chain.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::fastchain;
use super::intpoly::IntPoly;

/// Sturm chain of `f`: `f, f', -rem(f, f'), ...` with each element
/// divided by its (positive) content.
pub fn sturm_chain(f: &IntPoly) -> Vec<IntPoly> {
    let mut chain = Vec::new();
    let f0 = f.primitive_part();
    if f0.is_zero() {
        return chain;
    }
    chain.push(f0.clone());
    let f1 = f0.derivative().primitive_part();
    if f1.is_zero() {
        return chain;
    }
    chain.push(f1);
    loop {
        let a = &chain[chain.len() - 2];
        let b = &chain[chain.len() - 1];
        let delta = match (a.degree(), b.degree()) {
            (Some(da), Some(db)) if da >= db => da - db,
            _ => break,
        };
        let (_, r) = a.pseudo_divrem(b);
        if r.is_zero() {
            break;
        }
        // Pseudo-division scaled by lc(b)^(delta+1); if that multiplier is
        // negative the remainder's sign is flipped relative to the true
        // (positive-multiplier) remainder, so compensate before negating.
        let multiplier_negative = b.leading().is_negative() && (delta + 1) % 2 == 1;
        let next = if multiplier_negative { r } else { -r };
        chain.push(next.primitive_part());
    }
    chain
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

fn variations_at(chain: &[IntPoly], x: &BigRational) -> usize {
    variations(chain.iter().map(|f| f.sign_at(x)))
}

fn variations_neg_inf(chain: &[IntPoly]) -> usize {
    variations(chain.iter().map(|f| f.sign_at_neg_inf()))
}

fn variations_pos_inf(chain: &[IntPoly]) -> usize {
    variations(chain.iter().map(|f| f.sign_at_pos_inf()))
}

/// Number of distinct real roots of `f` (any nonzero polynomial).
pub fn count_real_roots(f: &IntPoly) -> usize {
    let rad = f.radical();
    if rad.degree().map_or(true, |d| d == 0) {
        return 0;
    }
    let chain = sturm_chain(&rad);
    variations_neg_inf(&chain) - variations_pos_inf(&chain)
}

/// Number of distinct real roots of `f` in the open interval
/// `(a, +infinity)`.
pub fn count_roots_above(f: &IntPoly, a: &BigRational) -> usize {
    let rad = f.radical();
    if rad.degree().map_or(true, |d| d == 0) {
        return 0;
    }
    let chain = sturm_chain(&rad);
    // V(a) - V(+inf) counts roots in the half-open interval (a, +inf).
    variations_at(&chain, a) - variations_pos_inf(&chain)
}

/// Number of distinct real roots of `f` in the half-open interval
/// `(a, b]`.
pub fn count_roots_in(f: &IntPoly, a: &BigRational, b: &BigRational) -> usize {
    assert!(a <= b);
    let rad = f.radical();
    if rad.degree().map_or(true, |d| d == 0) {
        return 0;
    }
    let chain = sturm_chain(&rad);
    variations_at(&chain, a) - variations_at(&chain, b)
}

fn to_i128_coeffs(f: &IntPoly) -> Option<Vec<i128>> {
    let mut out = Vec::with_capacity(f.deg() + 1);
    for i in 0..=f.deg() {
        out.push(f.coeff(i).to_i128()?);
    }
    Some(out)
}

fn from_i128_coeffs(c: &[i128]) -> IntPoly {
    IntPoly::new(c.iter().map(|&a| BigInt::from(a)).collect())
}

/// `true` if every complex root of `f` is real.
///
/// Uses one signed remainder chain, no radical: by Sturm-Tarski the
/// variation difference at the infinities counts the distinct real
/// roots even for non-squarefree `f`, while the final chain element is
/// `gcd(f, f')` whose degree gives the number of distinct complex
/// roots.
pub fn is_totally_real(f: &IntPoly) -> bool {
    match f.degree() {
        None => false, // zero polynomial
        Some(0) => true,
        Some(d) => {
            if let Some(c) = to_i128_coeffs(f) {
                if let Some(ans) = fastchain::totally_real(&c) {
                    return ans;
                }
            }
            let chain = sturm_chain(f);
            let dl = chain.last().map_or(0, |p| p.deg());
            variations_neg_inf(&chain) - variations_pos_inf(&chain) == d - dl
        }
    }
}

/// Totally-real test on a plain coefficient slice (constant first).
pub fn is_totally_real_coeffs(c: &[i128]) -> bool {
    match c.len() {
        0 => false,
        1 => c[0] != 0,
        _ => match fastchain::totally_real(c) {
            Some(ans) => ans,
            None => is_totally_real(&from_i128_coeffs(c)),
        },
    }
}

/// `true` if every root of `f` is real and lies in the closed interval
/// `[-2*sqrt(q), 2*sqrt(q)]`.
///
/// The interval endpoints are usually irrational, so the bound check is
/// done on squared roots: with `P` the polynomial whose roots are the
/// squares of the roots of `f` (computed from `f(y) * f(-y)`), all
/// roots of `f` lie in the closed interval iff `P` has no root in the
/// open interval `(4q, +infinity)`.  Since `P` is real-rooted whenever
/// `f` is totally real, that last condition is decided exactly by
/// Descartes' rule on `P` shifted by `4q`.
pub fn roots_admissible(f: &IntPoly, q: u64) -> bool {
    match f.degree() {
        None => return false,
        Some(0) => return true,
        Some(_) => {}
    }
    if let Some(c) = to_i128_coeffs(f) {
        if let Some(ans) = fastchain::roots_admissible(&c, q) {
            return ans;
        }
    }
    if !is_totally_real(f) {
        return false;
    }
    let p = root_squares(f);
    let shifted = p.shift(&BigInt::from(4 * q));
    let signs = (0..=shifted.deg()).map(|i| {
        let c = shifted.coeff(i);
        if c.is_negative() {
            -1i8
        } else if c.is_zero() {
            0
        } else {
            1
        }
    });
    variations(signs) == 0
}

/// Admissibility test on a plain coefficient slice (constant first).
pub fn roots_admissible_coeffs(c: &[i128], q: u64) -> bool {
    match c.len() {
        0 => false,
        1 => c[0] != 0,
        _ => match fastchain::roots_admissible(c, q) {
            Some(ans) => ans,
            None => roots_admissible(&from_i128_coeffs(c), q),
        },
    }
}

/// The polynomial whose roots are the squares of the roots of `f`:
/// `P(y^2) = (-1)^d * f(y) * f(-y)`.  Multiplicities carry over; `f`
/// need not be squarefree.
fn root_squares(f: &IntPoly) -> IntPoly {
    let d = f.deg();
    let mut g = &f.clone() * &f.negate_variable();
    if d % 2 == 1 {
        g = -g;
    }
    // g is even; keep coefficients of even powers.
    let coeffs: Vec<BigInt> = (0..=d).map(|j| g.coeff(2 * j)).collect();
    IntPoly::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn p(coeffs: &[i64]) -> IntPoly {
        IntPoly::from_i64(coeffs)
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn chain_of_classic_example() {
        // x^3 - 3x - 1 has three real roots.
        let f = p(&[-1, -3, 0, 1]);
        assert_eq!(count_real_roots(&f), 3);
        assert!(is_totally_real(&f));
    }

    #[test]
    fn no_real_roots() {
        assert_eq!(count_real_roots(&p(&[1, 0, 1])), 0); // x^2 + 1
        assert!(!is_totally_real(&p(&[1, 0, 1])));
        // x^4 + x^2 + 1 = (x^2+x+1)(x^2-x+1)
        assert_eq!(count_real_roots(&p(&[1, 0, 1, 0, 1])), 0);
    }

    #[test]
    fn counts_with_multiplicities_collapsed() {
        // (x-1)^2 (x+2): distinct roots 1, -2.
        let f = &(&p(&[-1, 1]) * &p(&[-1, 1])) * &p(&[2, 1]);
        assert_eq!(count_real_roots(&f), 2);
        assert!(is_totally_real(&f));
    }

    #[test]
    fn interval_counting() {
        // roots of (x^2-2)(x^2-3): -1.73, -1.41, 1.41, 1.73
        let f = &p(&[-2, 0, 1]) * &p(&[-3, 0, 1]);
        assert_eq!(count_real_roots(&f), 4);
        assert_eq!(count_roots_above(&f, &rat(0)), 2);
        assert_eq!(count_roots_above(&f, &rat(-2)), 4);
        assert_eq!(count_roots_above(&f, &rat(2)), 0);
        assert_eq!(count_roots_in(&f, &rat(-2), &rat(0)), 2);
        let half3 = BigRational::new(BigInt::from(3), BigInt::from(2));
        assert_eq!(count_roots_in(&f, &rat(0), &half3), 1); // sqrt(2) only
    }

    #[test]
    fn half_open_endpoint_semantics() {
        // (a, b] includes b, excludes a.
        let f = p(&[-1, 1]); // root 1
        assert_eq!(count_roots_in(&f, &rat(0), &rat(1)), 1);
        assert_eq!(count_roots_in(&f, &rat(1), &rat(2)), 0);
        assert_eq!(count_roots_above(&f, &rat(1)), 0);
        assert_eq!(count_roots_above(&f, &rat(0)), 1);
    }

    #[test]
    fn admissibility_interval() {
        // q = 128: 2*sqrt(q) ~ 22.627.
        // x^2 + 43x + 461 has roots ~ -20.38, -22.62: admissible.
        assert!(roots_admissible(&p(&[461, 43, 1]), 128));
        // x^2 + 44x + 480 has roots -20, -24: not admissible.
        assert!(!roots_admissible(&p(&[480, 44, 1]), 128));
        // x + 22 (root -22) admissible; x + 23 not.
        assert!(roots_admissible(&p(&[22, 1]), 128));
        assert!(!roots_admissible(&p(&[23, 1]), 128));
        // Complex roots are never admissible.
        assert!(!roots_admissible(&p(&[1, 0, 1]), 128));
    }

    #[test]
    fn admissibility_closed_endpoint() {
        // q = 4: interval is [-4, 4]; the endpoint itself is allowed.
        assert!(roots_admissible(&p(&[4, 1]), 4)); // root -4
        assert!(roots_admissible(&p(&[-4, 1]), 4)); // root 4
        assert!(!roots_admissible(&p(&[5, 1]), 4));
        // q = 121: root -22 = -2*sqrt(121) exactly.
        assert!(roots_admissible(&p(&[22, 1]), 121));
        assert!(!roots_admissible(&p(&[23, 1]), 121));
    }

    #[test]
    fn admissibility_q8_shifted_examples() {
        // q = 8: 2*sqrt(8) ~ 5.657.
        assert!(roots_admissible(&p(&[19, 9, 1]), 8)); // roots ~ -3.38, -5.62
        assert!(!roots_admissible(&p(&[13, 8, 1]), 8)); // roots ~ -2.27, -5.73
        assert!(roots_admissible(&p(&[14, 8, 1]), 8)); // roots ~ -2.59, -5.41
        assert!(roots_admissible(&p(&[8, 7, 1]), 8)); // roots ~ -1.44, -5.56
        assert!(roots_admissible(&p(&[51, 45, 12, 1]), 8));
    }

    fn reference_totally_real(f: &IntPoly) -> bool {
        let rad = f.radical();
        match rad.degree() {
            None => false,
            Some(0) => true,
            Some(d) => count_real_roots(&rad) == d,
        }
    }

    fn reference_admissible(f: &IntPoly, q: u64) -> bool {
        let rad = f.radical();
        match rad.degree() {
            None => return false,
            Some(0) => return true,
            Some(_) => {}
        }
        if !reference_totally_real(&rad) {
            return false;
        }
        let p = root_squares(&rad);
        count_roots_above(&p, &BigRational::from_integer(BigInt::from(4 * q))) == 0
    }

    #[test]
    fn fast_paths_agree_with_reference_on_cubics() {
        for a in -6i64..=6 {
            for b in -6i64..=6 {
                for c in -6i64..=6 {
                    let f = p(&[c, b, a, 1]);
                    assert_eq!(
                        is_totally_real(&f),
                        reference_totally_real(&f),
                        "totally_real mismatch on {f:?}"
                    );
                    assert_eq!(
                        is_totally_real_coeffs(&[c as i128, b as i128, a as i128, 1]),
                        reference_totally_real(&f)
                    );
                    for q in [4u64, 8, 121] {
                        assert_eq!(
                            roots_admissible(&f, q),
                            reference_admissible(&f, q),
                            "admissible mismatch on {f:?} q={q}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn fast_paths_agree_on_products_with_multiplicity() {
        for a in -5i64..=5 {
            for b in -5i64..=5 {
                // (x - a)^2 (x - b) and (x - a)^2 (x^2 + b^2 + 1).
                let sq = &p(&[-a, 1]) * &p(&[-a, 1]);
                let f = &sq * &p(&[-b, 1]);
                let g = &sq * &p(&[b * b + 1, 0, 1]);
                assert_eq!(is_totally_real(&f), reference_totally_real(&f));
                assert_eq!(is_totally_real(&g), reference_totally_real(&g));
                for q in [4u64, 9, 25, 121] {
                    assert_eq!(roots_admissible(&f, q), reference_admissible(&f, q));
                    assert_eq!(roots_admissible(&g, q), reference_admissible(&g, q));
                }
            }
        }
    }

    #[test]
    fn root_squares_construction() {
        // f = (x-1)(x+2), squares {1, 4}: P = (z-1)(z-4) = z^2 - 5z + 4.
        let f = &p(&[-1, 1]) * &p(&[2, 1]);
        assert_eq!(root_squares(&f), p(&[4, -5, 1]));
        // Degenerate-looking but fine: f = x, P = z.
        assert_eq!(root_squares(&p(&[0, 1])), p(&[0, 1]));
        assert!(root_squares(&p(&[0, 1])).coeff(0).is_zero());
    }
}
