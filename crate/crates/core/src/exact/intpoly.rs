//! Dense integer polynomials with exact arithmetic.
//!
//! Coefficients are stored constant-term first (`coeffs[i]` multiplies
//! `x^i`).  The zero polynomial is the empty coefficient vector; all
//! other representations have a nonzero leading coefficient.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    /// Build from constant-first coefficients; trailing zeros are trimmed.
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    /// Convenience constructor from machine integers, constant term first.
    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly::from_i64(&[1])
    }

    pub fn constant(c: BigInt) -> Self {
        IntPoly::new(vec![c])
    }

    pub fn x() -> Self {
        IntPoly::from_i64(&[0, 1])
    }

    /// The monic linear polynomial `x + c`.
    pub fn x_plus(c: impl Into<BigInt>) -> Self {
        IntPoly::new(vec![c.into(), BigInt::one()])
    }

    pub fn monomial(deg: usize, c: BigInt) -> Self {
        let mut coeffs = vec![BigInt::zero(); deg];
        coeffs.push(c);
        IntPoly::new(coeffs)
    }

    /// The monic polynomial with the given integer roots.
    pub fn from_roots(roots: &[BigInt]) -> Self {
        let mut f = IntPoly::one();
        for r in roots {
            f = &f * &IntPoly::new(vec![-r.clone(), BigInt::one()]);
        }
        f
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree of a polynomial known to be nonzero.
    pub fn deg(&self) -> usize {
        self.degree().expect("degree of zero polynomial")
    }

    /// Coefficient of `x^i` (zero when `i` exceeds the degree).
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Leading coefficient (zero for the zero polynomial).
    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().map_or(false, |c| c.is_one())
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        if c.is_zero() {
            return IntPoly::zero();
        }
        IntPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiply by `x^k`.
    pub fn mul_x_pow(&self, k: usize) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        IntPoly { coeffs }
    }

    pub fn evaluate(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn evaluate_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// Sign (`-1`, `0`, `1`) of the value at an exact rational point,
    /// computed without rational arithmetic: for `x = n/d` the sign of
    /// `f(x)` equals the sign of `sum_i c_i n^i d^(deg-i)`.
    pub fn sign_at(&self, x: &BigRational) -> i8 {
        if self.is_zero() {
            return 0;
        }
        let n = x.numer();
        let d = x.denom();
        let deg = self.deg();
        // Horner in n; each coefficient c_i contributes c_i * d^(deg-i).
        let mut acc = BigInt::zero();
        let mut dpow = BigInt::one();
        for i in (0..=deg).rev() {
            acc = acc * n + &self.coeffs[i] * &dpow;
            if i > 0 {
                dpow *= d;
            }
        }
        bigint_sign(&acc)
    }

    /// Sign of `f(x)` as `x -> +infinity`.
    pub fn sign_at_pos_inf(&self) -> i8 {
        bigint_sign(&self.leading())
    }

    /// Sign of `f(x)` as `x -> -infinity`.
    pub fn sign_at_neg_inf(&self) -> i8 {
        let s = bigint_sign(&self.leading());
        if self.is_zero() {
            return 0;
        }
        if self.deg() % 2 == 0 {
            s
        } else {
            -s
        }
    }

    pub fn derivative(&self) -> IntPoly {
        if self.coeffs.len() <= 1 {
            return IntPoly::zero();
        }
        IntPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * BigInt::from(i + 1))
                .collect(),
        )
    }

    /// Substitute `-x` for `x`.
    pub fn negate_variable(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 0 { c.clone() } else { -c })
                .collect(),
        )
    }

    /// Substitute `x + c` for `x`.
    pub fn shift(&self, c: &BigInt) -> IntPoly {
        let mut acc = IntPoly::zero();
        let xc = IntPoly::new(vec![c.clone(), BigInt::one()]);
        for coeff in self.coeffs.iter().rev() {
            acc = &(&acc * &xc) + &IntPoly::constant(coeff.clone());
        }
        acc
    }

    pub fn shift_i64(&self, c: i64) -> IntPoly {
        self.shift(&BigInt::from(c))
    }

    /// Pseudo-division: returns `(quo, rem)` with
    /// `lc(d)^(deg f - deg d + 1) * f = quo * d + rem` and
    /// `deg rem < deg d`.  If `deg f < deg d` this is `(0, f)` unscaled.
    pub fn pseudo_divrem(&self, d: &IntPoly) -> (IntPoly, IntPoly) {
        let db = d.degree().expect("pseudo-division by zero polynomial");
        let da = match self.degree() {
            Some(da) if da >= db => da,
            _ => return (IntPoly::zero(), self.clone()),
        };
        let lb = d.leading();
        let delta = da - db;
        let mut rem = self.coeffs.clone();
        let mut quo = vec![BigInt::zero(); delta + 1];
        for k in (0..=delta).rev() {
            // rem <- lb*rem - top*x^k*d, quo <- lb*quo + top*x^k, where
            // top is the coefficient of x^(db+k) before this iteration.
            let top = rem[db + k].clone();
            for c in rem.iter_mut() {
                *c *= &lb;
            }
            for c in quo.iter_mut() {
                *c *= &lb;
            }
            quo[k] += &top;
            for (i, dc) in d.coeffs.iter().enumerate() {
                rem[i + k] -= &top * dc;
            }
            debug_assert!(rem[db + k].is_zero());
        }
        (IntPoly::new(quo), IntPoly::new(rem))
    }

    /// Exact division: `Some(q)` with `self = q * d` when `d` divides
    /// `self` over the integers, else `None`.
    pub fn div_exact(&self, d: &IntPoly) -> Option<IntPoly> {
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        let db = d.degree()?;
        let da = self.deg();
        if da < db {
            return None;
        }
        let lb = d.leading();
        let mut rem = self.coeffs.clone();
        let mut quo = vec![BigInt::zero(); da - db + 1];
        for k in (0..=da - db).rev() {
            let top = rem[db + k].clone();
            if (&top % &lb) != BigInt::zero() {
                return None;
            }
            let qk = &top / &lb;
            for (i, dc) in d.coeffs.iter().enumerate() {
                rem[i + k] -= &qk * dc;
            }
            quo[k] = qk;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(IntPoly::new(quo))
    }

    /// Content: non-negative gcd of the coefficients (zero polynomial
    /// has content zero).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        g
    }

    /// Primitive part: the polynomial divided by its content.  Signs of
    /// coefficients are preserved.
    pub fn primitive_part(&self) -> IntPoly {
        let c = self.content();
        if c.is_zero() || c.is_one() {
            return self.clone();
        }
        IntPoly::new(self.coeffs.iter().map(|a| a / &c).collect())
    }

    /// Greatest common divisor, normalized to have positive leading
    /// coefficient.  Contents are combined with an integer gcd.
    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() {
            return other.positive_leading();
        }
        if other.is_zero() {
            return self.positive_leading();
        }
        let cont = self.content().gcd(&other.content());
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.deg() < b.deg() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let (_, r) = a.pseudo_divrem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.positive_leading().scale(&cont)
    }

    /// Flip signs so the leading coefficient is positive.
    pub fn positive_leading(&self) -> IntPoly {
        if self.leading().is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Radical: product of the distinct irreducible factors, primitive
    /// with positive leading coefficient.
    pub fn radical(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        if self.deg() == 0 {
            return IntPoly::one();
        }
        let f = self.primitive_part().positive_leading();
        let g = f.gcd(&f.derivative());
        if g.deg() == 0 {
            return f;
        }
        f.div_exact(&g)
            .expect("gcd(f, f') must divide f")
            .primitive_part()
            .positive_leading()
    }

    /// Resultant of `self` and `other`, with the standard sign
    /// convention (`res(f, g) = lc(f)^deg(g) * prod g(root_i)` over the
    /// roots of `f`).
    pub fn resultant(&self, other: &IntPoly) -> BigInt {
        let mut a = self.clone();
        let mut b = other.clone();
        if a.is_zero() || b.is_zero() {
            // res(0, g) vanishes unless both are nonzero constants (the
            // empty Sylvester matrix has determinant 1).  The zero
            // polynomial is never a nonzero constant, so:
            return BigInt::zero();
        }
        // `scale` collects all factors pulled out along the way, so that
        // res(self, other) = scale * res(a, b) at every point in the loop.
        let mut scale = BigRational::one();
        loop {
            let da = a.deg();
            let db = b.deg();
            if da == 0 && db == 0 {
                return finish(scale, BigInt::one());
            }
            if da == 0 {
                return finish(scale, a.leading().pow(db as u32));
            }
            if db == 0 {
                return finish(scale, b.leading().pow(da as u32));
            }
            if da < db {
                std::mem::swap(&mut a, &mut b);
                if (da * db) % 2 == 1 {
                    scale = -scale;
                }
                continue;
            }
            // deg a >= deg b >= 1: reduce via the pseudo-remainder.
            let delta = da - db;
            let (_, r) = a.pseudo_divrem(&b);
            if r.is_zero() {
                return BigInt::zero(); // common factor
            }
            let cont = r.content();
            let rstar = r.primitive_part();
            let dr = rstar.degree().map_or(0, |d| d);
            let lb = b.leading();
            // res(a, b) = (-1)^(da*db) * lc(b)^(da - dr) * cont^db
            //             * res(b, rstar) / lc(b)^((delta + 1) * db)
            let mut factor = BigRational::from_integer(lb.pow((da - dr) as u32))
                * BigRational::from_integer(cont.pow(db as u32))
                / BigRational::from_integer(lb.pow(((delta + 1) * db) as u32));
            if (da * db) % 2 == 1 {
                factor = -factor;
            }
            scale *= factor;
            a = b;
            b = rstar;
        }

        fn finish(scale: BigRational, base: BigInt) -> BigInt {
            let v = scale * BigRational::from_integer(base);
            assert!(v.is_integer(), "resultant scale must resolve to an integer");
            v.to_integer()
        }
    }

    /// Discriminant of a monic polynomial:
    /// `(-1)^(d(d-1)/2) * res(f, f')`.
    pub fn discriminant_monic(&self) -> BigInt {
        assert!(self.is_monic(), "discriminant_monic requires a monic polynomial");
        let d = self.deg();
        let r = self.resultant(&self.derivative());
        if (d * (d - 1) / 2) % 2 == 1 {
            -r
        } else {
            r
        }
    }

    /// Power sums `p_1, ..., p_count` of the roots of a monic
    /// polynomial, via Newton's identities on the coefficients.
    pub fn power_sums(&self, count: usize) -> Vec<BigInt> {
        assert!(self.is_monic(), "power_sums requires a monic polynomial");
        let g = self.deg();
        // Elementary symmetric functions: e_i = (-1)^i * coeff(x^(g-i)).
        let mut e = vec![BigInt::zero(); g + 1];
        for i in 0..=g {
            let c = self.coeff(g - i);
            e[i] = if i % 2 == 0 { c } else { -c };
        }
        let mut p = vec![BigInt::zero(); count + 1];
        for k in 1..=count {
            let mut acc = BigInt::zero();
            for i in 1..k.min(g + 1) {
                let term = &e[i] * &p[k - i];
                if i % 2 == 1 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            if k <= g {
                let term = BigInt::from(k) * &e[k];
                if k % 2 == 1 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            p[k] = acc;
        }
        p.remove(0);
        p
    }
}

fn bigint_sign(x: &BigInt) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_negative() {
        -1
    } else {
        1
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + rhs.coeff(i));
        }
        IntPoly::new(out)
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - rhs.coeff(i));
        }
        IntPoly::new(out)
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl Neg for IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl fmt::Display for IntPoly {
    /// Render in descending powers: `x^3 + 4*x^2 - x + 7`, `0` for the
    /// zero polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let deg = self.deg();
        let mut first = true;
        for k in (0..=deg).rev() {
            let c = &self.coeffs[k];
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit = mag.is_one();
            if k == 0 {
                write!(f, "{mag}")?;
            } else {
                if !unit {
                    write!(f, "{mag}*")?;
                }
                if k == 1 {
                    write!(f, "x")?;
                } else {
                    write!(f, "x^{k}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(coeffs: &[i64]) -> IntPoly {
        IntPoly::from_i64(coeffs)
    }

    #[test]
    fn construction_and_normalization() {
        assert!(IntPoly::from_i64(&[0, 0, 0]).is_zero());
        assert_eq!(p(&[1, 2, 0]).degree(), Some(1));
        assert_eq!(IntPoly::zero().degree(), None);
        assert_eq!(IntPoly::x_plus(3).to_string(), "x + 3");
    }

    #[test]
    fn arithmetic() {
        let a = p(&[1, 2, 3]);
        let b = p(&[5, -1]);
        assert_eq!(&a + &b, p(&[6, 1, 3]));
        assert_eq!(&a - &b, p(&[-4, 3, 3]));
        assert_eq!(&a * &b, p(&[5, 9, 13, -3]));
        assert_eq!(-(a.clone()), p(&[-1, -2, -3]));
        assert_eq!(a.derivative(), p(&[2, 6]));
        assert_eq!(a.evaluate(&BigInt::from(2)), BigInt::from(17));
    }

    #[test]
    fn display_format() {
        assert_eq!(p(&[2, 4, 1]).to_string(), "x^2 + 4*x + 2");
        assert_eq!(p(&[-3, 1, -6, 4, 1]).to_string(), "x^4 + 4*x^3 - 6*x^2 + x - 3");
        assert_eq!(p(&[0, -1]).to_string(), "-x");
        assert_eq!(p(&[7]).to_string(), "7");
        assert_eq!(IntPoly::zero().to_string(), "0");
        assert_eq!(p(&[51, 45, 12, 1]).to_string(), "x^3 + 12*x^2 + 45*x + 51");
    }

    #[test]
    fn shift_and_negate() {
        // (x+1)^2 shifted by 2 -> (x+3)^2
        let f = p(&[1, 2, 1]);
        assert_eq!(f.shift_i64(2), p(&[9, 6, 1]));
        assert_eq!(f.shift_i64(0), f);
        let g = p(&[1, -3, 0, 2]);
        assert_eq!(g.negate_variable(), p(&[1, 3, 0, -2]));
        // Round trip.
        assert_eq!(g.shift_i64(5).shift_i64(-5), g);
    }

    #[test]
    fn pseudo_division() {
        let a = p(&[1, 0, 0, 2, 1]); // x^4 + 2x^3 + 1
        let b = p(&[3, 0, 2]); // 2x^2 + 3
        let (q, r) = a.pseudo_divrem(&b);
        let lhs = a.scale(&BigInt::from(2i64.pow(3)));
        assert_eq!(&(&q * &b) + &r, lhs);
        assert!(r.degree().map_or(true, |d| d < 2));
    }

    #[test]
    fn exact_division() {
        let a = p(&[1, 2, 1]);
        let b = p(&[1, 1]);
        assert_eq!(a.div_exact(&b), Some(p(&[1, 1])));
        assert_eq!(a.div_exact(&p(&[1, 2])), None);
        let c = &p(&[3, 5, -2]) * &p(&[-7, 1, 1]);
        assert_eq!(c.div_exact(&p(&[3, 5, -2])), Some(p(&[-7, 1, 1])));
    }

    #[test]
    fn content_primitive_gcd() {
        let a = p(&[6, 12, 18]);
        assert_eq!(a.content(), BigInt::from(6));
        assert_eq!(a.primitive_part(), p(&[1, 2, 3]));
        let f = &p(&[1, 1]) * &p(&[-2, 1]); // (x+1)(x-2)
        let g = &p(&[1, 1]) * &p(&[5, 3]); // (x+1)(3x+5)
        assert_eq!(f.gcd(&g), p(&[1, 1]));
        // gcd picks up shared content
        assert_eq!(f.scale(&BigInt::from(4)).gcd(&g.scale(&BigInt::from(6))), p(&[2, 2]));
    }

    #[test]
    fn radicals() {
        let f = &(&p(&[1, 1]) * &p(&[1, 1])) * &p(&[-5, 1]); // (x+1)^2 (x-5)
        assert_eq!(f.radical(), &p(&[1, 1]) * &p(&[-5, 1]));
        assert_eq!(p(&[0, 0, 0, 1]).radical(), p(&[0, 1])); // x^3 -> x
        assert_eq!(p(&[4, 4, 1]).radical(), p(&[2, 1])); // (x+2)^2 -> x+2
        let g = p(&[-1, 0, 1]); // already squarefree
        assert_eq!(g.radical(), g);
    }

    #[test]
    fn resultant_against_evaluation_product() {
        // res(f, g) = lc(f)^deg(g) * prod over roots a of f of g(a);
        // with f monic from integer roots this is an exact check.
        let roots = [2i64, -5, 7];
        let f = IntPoly::from_roots(&roots.map(BigInt::from));
        let g = p(&[1, -4, 0, 2, 3]);
        let expect: BigInt = roots.iter().map(|&r| g.evaluate(&BigInt::from(r))).product();
        assert_eq!(f.resultant(&g), expect);
        // Antisymmetry up to sign (-1)^(deg f * deg g).
        let sign = if (f.deg() * g.deg()) % 2 == 1 { -1 } else { 1 };
        assert_eq!(g.resultant(&f), BigInt::from(sign) * f.resultant(&g));
    }

    #[test]
    fn resultant_known_values() {
        // res(x^2 - 1, x - 3) = (3-1)(3+1)... careful with convention:
        // res(f, g) = prod g(roots of f) for monic f.
        let f = p(&[-1, 0, 1]);
        let g = p(&[-3, 1]);
        // roots of f: 1, -1; g at them: -2, -4 -> product 8.
        assert_eq!(f.resultant(&g), BigInt::from(8));
        // Common root -> 0.
        assert_eq!(f.resultant(&p(&[-1, 1])), BigInt::zero());
        // Constants.
        assert_eq!(f.resultant(&p(&[5])), BigInt::from(25));
        assert_eq!(p(&[5]).resultant(&f), BigInt::from(25));
        // Non-monic: res(2x - 1, 3x - 1) = lc(f)^deg g * g(1/2) = 2 * 1/2 = 1.
        assert_eq!(p(&[-1, 2]).resultant(&p(&[-1, 3])), BigInt::from(1));
    }

    #[test]
    fn resultant_multiplicative() {
        let a = p(&[3, 1]);
        let b = p(&[1, -2, 1]);
        let g = p(&[7, 0, -1, 2]);
        let left = (&a * &b).resultant(&g);
        let right = a.resultant(&g) * b.resultant(&g);
        assert_eq!(left, right);
    }

    #[test]
    fn discriminants() {
        // disc(x^2 + bx + c) = b^2 - 4c
        let f = p(&[7, 3, 1]);
        assert_eq!(f.discriminant_monic(), BigInt::from(9 - 28));
        // disc((x-1)(x-2)(x-3)) = prod (ri - rj)^2 = 1*4*1 = 4
        let g = IntPoly::from_roots(&[1, 2, 3].map(BigInt::from));
        assert_eq!(g.discriminant_monic(), BigInt::from(4));
    }

    #[test]
    fn power_sums_match_roots() {
        let roots = [2i64, -5, 7];
        let f = IntPoly::from_roots(&roots.map(BigInt::from));
        let ps = f.power_sums(6);
        for k in 1..=6 {
            let expect: i64 = roots.iter().map(|&r| r.pow(k as u32)).sum();
            assert_eq!(ps[k - 1], BigInt::from(expect), "p_{k}");
        }
    }

    #[test]
    fn sign_queries() {
        let f = p(&[-2, 0, 1]); // x^2 - 2
        let half3 = BigRational::new(BigInt::from(3), BigInt::from(2));
        assert_eq!(f.sign_at(&half3), 1); // 9/4 - 2 > 0
        let x = BigRational::new(BigInt::from(7), BigInt::from(5));
        assert_eq!(f.sign_at(&x), -1); // 49/25 - 2 < 0
        assert_eq!(f.sign_at(&BigRational::from_integer(BigInt::from(-2))), 1);
        assert_eq!(f.sign_at(&BigRational::from_integer(BigInt::zero())), -1);
        assert_eq!(f.sign_at_pos_inf(), 1);
        assert_eq!(f.sign_at_neg_inf(), 1);
        assert_eq!(p(&[0, 1]).sign_at_neg_inf(), -1);
        assert_eq!(p(&[0, 0, 0, -2]).sign_at_neg_inf(), 1);
    }
}
