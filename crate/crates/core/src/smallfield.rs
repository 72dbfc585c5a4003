//! Small finite fields `F_q` for `q <= 2^13`, with exact table-based
//! arithmetic, plus univariate polynomial factorization over them.
//!
//! Elements are indices `0..q`.  The base-`p` digits of an index are the
//! coordinates of the element with respect to the power basis of a fixed
//! irreducible modulus polynomial; addition is digit-wise mod `p`, and
//! multiplication goes through exponential/logarithm tables for a fixed
//! generator of the unit group.  For the handful of fields that outside
//! data depends on, the modulus is pinned explicitly so element indices
//! are stable; other fields get the lexicographically smallest monic
//! irreducible modulus.

use std::fmt;

use crate::error::{Error, Result};
use crate::exact::util::{factorize, prime_power, SplitMix64};

pub const MAX_Q: u64 = 1 << 13;

/// A field element: an index in `0..q`.  Only meaningful together with
/// the `SmallField` it came from.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Fe(pub u32);

/// Fixed moduli (constant term first) for fields whose element indices
/// must stay stable across versions.
fn pinned_modulus(q: u64) -> Option<&'static [u64]> {
    Some(match q {
        4 => &[1, 1, 1],                       // x^2 + x + 1
        8 => &[1, 1, 0, 1],                    // x^3 + x + 1
        16 => &[1, 1, 0, 0, 1],                // x^4 + x + 1
        32 => &[1, 0, 1, 0, 0, 1],             // x^5 + x^2 + 1
        128 => &[1, 1, 0, 0, 0, 0, 0, 1],      // x^7 + x + 1
        1024 => &[1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1], // x^10 + x^3 + 1
        9 => &[2, 2, 1],                       // x^2 + 2x + 2
        27 => &[1, 2, 0, 1],                   // x^3 + 2x + 1
        _ => return None,
    })
}

#[derive(Clone)]
pub struct SmallField {
    pub q: u64,
    pub p: u64,
    pub a: u32,
    /// Modulus polynomial coefficients, constant first, length `a + 1`.
    modulus: Vec<u64>,
    /// `exp[i] = g^i` for `0 <= i < q-1`, `g` the stored generator.
    exp: Vec<u32>,
    /// `log[x]` for `1 <= x < q`; `log[0]` is unused.
    log: Vec<u32>,
}

impl fmt::Debug for SmallField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmallField(q = {})", self.q)
    }
}

impl SmallField {
    pub fn new(q: u64) -> Result<SmallField> {
        if q < 2 || q > MAX_Q {
            return Err(Error::invalid(format!(
                "field size {q} out of supported range 2..={MAX_Q}"
            )));
        }
        let (p, a) = prime_power(q)
            .ok_or_else(|| Error::invalid(format!("field size {q} is not a prime power")))?;
        let modulus = match pinned_modulus(q) {
            Some(m) => m.to_vec(),
            None => smallest_irreducible(p, a),
        };
        let mut field = SmallField {
            q,
            p,
            a,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
        };
        field.build_tables();
        Ok(field)
    }

    /// Direct (table-free) multiplication used only while constructing
    /// the exp/log tables: polynomial product of digit vectors, reduced
    /// by the modulus.
    fn raw_mul(&self, x: u32, y: u32) -> u32 {
        let p = self.p;
        let a = self.a as usize;
        let xd = digits(x as u64, p, a);
        let yd = digits(y as u64, p, a);
        let mut prod = vec![0u64; 2 * a];
        for (i, &xi) in xd.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in yd.iter().enumerate() {
                prod[i + j] = (prod[i + j] + xi * yj) % p;
            }
        }
        // Reduce: x^a = -(modulus minus leading term).
        for k in (a..2 * a).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..a {
                let sub = (c * self.modulus[i]) % p;
                prod[k - a + i] = (prod[k - a + i] + p - sub) % p;
            }
        }
        undigits(&prod[..a], p) as u32
    }

    fn build_tables(&mut self) {
        let q = self.q;
        if q == 2 {
            self.exp = vec![1];
            self.log = vec![0, 0];
            return;
        }
        let unit_factors = factorize(q - 1);
        // Find a generator of the multiplicative group.
        let mut gen = 0u32;
        'search: for cand in 2..q as u32 {
            if cand as u64 >= q {
                break;
            }
            for &(ell, _) in &unit_factors {
                if self.raw_pow(cand, (q - 1) / ell) == 1 {
                    continue 'search;
                }
            }
            gen = cand;
            break;
        }
        assert!(gen != 0, "no generator found (impossible for a field)");
        let mut exp = Vec::with_capacity((q - 1) as usize);
        let mut log = vec![0u32; q as usize];
        let mut cur = 1u32;
        for i in 0..(q - 1) as u32 {
            exp.push(cur);
            log[cur as usize] = i;
            cur = self.raw_mul(cur, gen);
        }
        assert_eq!(cur, 1, "generator order mismatch");
        self.exp = exp;
        self.log = log;
    }

    fn raw_pow(&self, x: u32, mut e: u64) -> u32 {
        let mut base = x;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.raw_mul(acc, base);
            }
            base = self.raw_mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn zero(&self) -> Fe {
        Fe(0)
    }

    pub fn one(&self) -> Fe {
        Fe(1)
    }

    /// A fixed generator of the unit group.
    pub fn generator(&self) -> Fe {
        Fe(self.exp[1])
    }

    /// The image of the integer `n` under `Z -> F_p` composed with the
    /// prime-field embedding.
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.p as i64) as u32)
    }

    /// The element with the given power-basis coordinates (little
    /// endian); coordinates are reduced mod `p`.
    pub fn from_digits(&self, ds: &[i64]) -> Fe {
        assert!(ds.len() <= self.a as usize);
        let mut idx = 0u64;
        for &d in ds.iter().rev() {
            idx = idx * self.p + d.rem_euclid(self.p as i64) as u64;
        }
        Fe(idx as u32)
    }

    pub fn digits_of(&self, x: Fe) -> Vec<u64> {
        digits(x.0 as u64, self.p, self.a as usize)
    }

    pub fn is_zero(&self, x: Fe) -> bool {
        x.0 == 0
    }

    pub fn add(&self, x: Fe, y: Fe) -> Fe {
        if self.p == 2 {
            return Fe(x.0 ^ y.0);
        }
        let p = self.p;
        let mut out = 0u64;
        let mut mult = 1u64;
        let (mut xv, mut yv) = (x.0 as u64, y.0 as u64);
        while xv > 0 || yv > 0 {
            out += ((xv % p + yv % p) % p) * mult;
            xv /= p;
            yv /= p;
            mult *= p;
        }
        Fe(out as u32)
    }

    pub fn neg(&self, x: Fe) -> Fe {
        if self.p == 2 {
            return x;
        }
        let p = self.p;
        let mut out = 0u64;
        let mut mult = 1u64;
        let mut xv = x.0 as u64;
        while xv > 0 {
            out += ((p - xv % p) % p) * mult;
            xv /= p;
            mult *= p;
        }
        Fe(out as u32)
    }

    pub fn sub(&self, x: Fe, y: Fe) -> Fe {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: Fe, y: Fe) -> Fe {
        if x.0 == 0 || y.0 == 0 {
            return Fe(0);
        }
        let n = self.q - 1;
        let s = (self.log[x.0 as usize] as u64 + self.log[y.0 as usize] as u64) % n;
        Fe(self.exp[s as usize])
    }

    pub fn inv(&self, x: Fe) -> Fe {
        assert!(x.0 != 0, "inverse of zero");
        let n = self.q - 1;
        let s = (n - self.log[x.0 as usize] as u64) % n;
        Fe(self.exp[s as usize])
    }

    pub fn div(&self, x: Fe, y: Fe) -> Fe {
        self.mul(x, self.inv(y))
    }

    pub fn pow(&self, x: Fe, e: u64) -> Fe {
        if x.0 == 0 {
            return if e == 0 { Fe(1) } else { Fe(0) };
        }
        let n = self.q - 1;
        let s = (self.log[x.0 as usize] as u128 * e as u128 % n as u128) as u64;
        Fe(self.exp[s as usize])
    }

    pub fn frobenius(&self, x: Fe) -> Fe {
        self.pow(x, self.p)
    }

    /// Absolute trace down to the prime field, returned as an element of
    /// the prime subfield (index < p).
    pub fn trace(&self, x: Fe) -> Fe {
        let mut acc = Fe(0);
        let mut cur = x;
        for _ in 0..self.a {
            acc = self.add(acc, cur);
            cur = self.frobenius(cur);
        }
        debug_assert!(acc.0 < self.p as u32);
        acc
    }

    /// Absolute norm down to the prime field.
    pub fn norm(&self, x: Fe) -> Fe {
        self.pow(x, (self.q - 1) / (self.p - 1))
    }

    /// `true` when `x` is a square in the field (zero counts).
    pub fn is_square(&self, x: Fe) -> bool {
        if x.0 == 0 || self.p == 2 {
            return true;
        }
        self.log[x.0 as usize] % 2 == 0
    }

    /// A square root, if one exists.  In characteristic 2 every element
    /// has exactly one.
    pub fn sqrt(&self, x: Fe) -> Option<Fe> {
        if x.0 == 0 {
            return Some(Fe(0));
        }
        if self.p == 2 {
            return Some(self.pow(x, self.q / 2));
        }
        let l = self.log[x.0 as usize] as u64;
        if l % 2 == 1 {
            return None;
        }
        Some(Fe(self.exp[(l / 2) as usize]))
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q as u32).map(Fe)
    }

    /// The multiplicative order of `x != 0`.
    pub fn order(&self, x: Fe) -> u64 {
        assert!(x.0 != 0);
        let n = self.q - 1;
        let l = self.log[x.0 as usize] as u64;
        n / num_integer::gcd(n, l)
    }

    /// Embedding table from a subfield: `table[x.0]` is the image in
    /// `self` of the subfield element `x`.  The image of the subfield
    /// generator-polynomial root is chosen as the smallest-index root in
    /// `self`, which makes the embedding deterministic.
    pub fn embedding_from(&self, sub: &SmallField) -> Result<Vec<Fe>> {
        if sub.p != self.p || self.a % sub.a != 0 {
            return Err(Error::invalid(format!(
                "F_{} is not a subfield of F_{}",
                sub.q, self.q
            )));
        }
        // Find the smallest root in self of sub's modulus polynomial
        // (whose coefficients live in the shared prime field).
        let mu: Vec<Fe> = sub.modulus.iter().map(|&c| Fe(c as u32)).collect();
        let mut root = None;
        for x in self.elements() {
            let mut acc = Fe(0);
            for &c in mu.iter().rev() {
                acc = self.add(self.mul(acc, x), c);
            }
            if acc.0 == 0 {
                root = Some(x);
                break;
            }
        }
        let r = root.ok_or_else(|| Error::internal("subfield modulus has no root"))?;
        let mut table = Vec::with_capacity(sub.q as usize);
        for x in sub.elements() {
            let ds = sub.digits_of(x);
            let mut acc = Fe(0);
            for &d in ds.iter().rev() {
                acc = self.add(self.mul(acc, r), Fe(d as u32));
            }
            table.push(acc);
        }
        Ok(table)
    }
}

fn digits(mut n: u64, p: u64, len: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(n % p);
        n /= p;
    }
    out
}

fn undigits(ds: &[u64], p: u64) -> u64 {
    let mut out = 0;
    for &d in ds.iter().rev() {
        out = out * p + d;
    }
    out
}

/// Lexicographically smallest monic irreducible polynomial of degree `a`
/// over `F_p` (compared by coefficient tuples, constant term varying
/// fastest).
fn smallest_irreducible(p: u64, a: u32) -> Vec<u64> {
    if a == 1 {
        return vec![0, 1]; // x itself; never used for multiplication
    }
    let fp = SmallField {
        q: p,
        p,
        a: 1,
        modulus: vec![0, 1],
        exp: (0..p as u32).collect(), // placeholder, fixed below
        log: vec![0; p as usize],
    };
    // For a prime field we can run polynomial arithmetic without tables:
    // build a proper field object the cheap way.
    let fp = {
        let mut f = fp;
        f.build_tables();
        f
    };
    let n = p.pow(a);
    for idx in 0..n {
        let mut coeffs: Vec<Fe> = digits(idx, p, a as usize)
            .into_iter()
            .map(|d| Fe(d as u32))
            .collect();
        coeffs.push(Fe(1));
        let cand = FPoly::new(&fp, coeffs);
        if is_irreducible(&fp, &cand) {
            let mut out: Vec<u64> = cand.coeffs().iter().map(|c| c.0 as u64).collect();
            while out.len() < a as usize + 1 {
                out.push(0);
            }
            return out;
        }
    }
    unreachable!("irreducible polynomials of every degree exist");
}

/// A polynomial over a `SmallField`, constant term first, normalized so
/// the leading coefficient is nonzero (zero polynomial = empty vec).
/// Field operations take the field explicitly; mixing fields is a logic
/// error the caller must avoid.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FPoly(Vec<Fe>);

impl fmt::Debug for FPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FPoly({:?})",
            self.0.iter().map(|c| c.0).collect::<Vec<_>>()
        )
    }
}

impl FPoly {
    pub fn new(_f: &SmallField, mut coeffs: Vec<Fe>) -> FPoly {
        while coeffs.last().map_or(false, |c| c.0 == 0) {
            coeffs.pop();
        }
        FPoly(coeffs)
    }

    pub fn from_ints(f: &SmallField, coeffs: &[i64]) -> FPoly {
        FPoly::new(f, coeffs.iter().map(|&c| f.from_int(c)).collect())
    }

    pub fn zero() -> FPoly {
        FPoly(Vec::new())
    }

    pub fn one() -> FPoly {
        FPoly(vec![Fe(1)])
    }

    pub fn x() -> FPoly {
        FPoly(vec![Fe(0), Fe(1)])
    }

    /// `x - r`.
    pub fn x_minus(f: &SmallField, r: Fe) -> FPoly {
        FPoly::new(f, vec![f.neg(r), Fe(1)])
    }

    pub fn constant(c: Fe) -> FPoly {
        if c.0 == 0 {
            FPoly::zero()
        } else {
            FPoly(vec![c])
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().expect("degree of zero polynomial")
    }

    pub fn coeff(&self, i: usize) -> Fe {
        self.0.get(i).copied().unwrap_or(Fe(0))
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.0
    }

    pub fn leading(&self) -> Fe {
        self.0.last().copied().unwrap_or(Fe(0))
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Fe(1)
    }

    pub fn add(f: &SmallField, a: &FPoly, b: &FPoly) -> FPoly {
        let n = a.0.len().max(b.0.len());
        FPoly::new(f, (0..n).map(|i| f.add(a.coeff(i), b.coeff(i))).collect())
    }

    pub fn sub(f: &SmallField, a: &FPoly, b: &FPoly) -> FPoly {
        let n = a.0.len().max(b.0.len());
        FPoly::new(f, (0..n).map(|i| f.sub(a.coeff(i), b.coeff(i))).collect())
    }

    pub fn neg(f: &SmallField, a: &FPoly) -> FPoly {
        FPoly(a.0.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn scale(f: &SmallField, a: &FPoly, c: Fe) -> FPoly {
        if c.0 == 0 {
            return FPoly::zero();
        }
        FPoly(a.0.iter().map(|&x| f.mul(x, c)).collect())
    }

    pub fn mul(f: &SmallField, a: &FPoly, b: &FPoly) -> FPoly {
        if a.is_zero() || b.is_zero() {
            return FPoly::zero();
        }
        let mut out = vec![Fe(0); a.0.len() + b.0.len() - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x.0 == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(x, y));
            }
        }
        FPoly::new(f, out)
    }

    pub fn mul_x_pow(&self, k: usize) -> FPoly {
        if self.is_zero() {
            return FPoly::zero();
        }
        let mut coeffs = vec![Fe(0); k];
        coeffs.extend(self.0.iter().copied());
        FPoly(coeffs)
    }

    /// Division with remainder; divisor must be nonzero.
    pub fn divrem(f: &SmallField, a: &FPoly, b: &FPoly) -> (FPoly, FPoly) {
        let db = b.degree().expect("division by zero polynomial");
        let mut rem = a.0.clone();
        if a.0.len() <= db {
            return (FPoly::zero(), a.clone());
        }
        let da = a.0.len() - 1;
        let inv_lead = f.inv(b.leading());
        let mut quo = vec![Fe(0); da - db + 1];
        for k in (0..=da - db).rev() {
            let top = rem[db + k];
            if top.0 == 0 {
                continue;
            }
            let qk = f.mul(top, inv_lead);
            quo[k] = qk;
            for (i, &bc) in b.0.iter().enumerate() {
                rem[i + k] = f.sub(rem[i + k], f.mul(qk, bc));
            }
        }
        (FPoly::new(f, quo), FPoly::new(f, rem))
    }

    pub fn rem(f: &SmallField, a: &FPoly, b: &FPoly) -> FPoly {
        FPoly::divrem(f, a, b).1
    }

    pub fn gcd(f: &SmallField, a: &FPoly, b: &FPoly) -> FPoly {
        let mut a = a.clone();
        let mut b = b.clone();
        while !b.is_zero() {
            let r = FPoly::rem(f, &a, &b);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// Scale to a monic polynomial (zero stays zero).
    pub fn monic(&self, f: &SmallField) -> FPoly {
        match self.leading() {
            Fe(0) => self.clone(),
            Fe(1) => self.clone(),
            lc => FPoly::scale(f, self, f.inv(lc)),
        }
    }

    pub fn evaluate(&self, f: &SmallField, x: Fe) -> Fe {
        let mut acc = Fe(0);
        for &c in self.0.iter().rev() {
            acc = f.add(f.mul(acc, x), c);
        }
        acc
    }

    pub fn derivative(&self, f: &SmallField) -> FPoly {
        if self.0.len() <= 1 {
            return FPoly::zero();
        }
        FPoly::new(
            f,
            self.0[1..]
                .iter()
                .enumerate()
                .map(|(i, &c)| {
                    let scalar = f.from_int((i + 1) as i64);
                    f.mul(c, scalar)
                })
                .collect(),
        )
    }

    /// `self^e mod m`.
    pub fn powmod(f: &SmallField, base: &FPoly, mut e: u64, m: &FPoly) -> FPoly {
        let mut base = FPoly::rem(f, base, m);
        let mut acc = FPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = FPoly::rem(f, &FPoly::mul(f, &acc, &base), m);
            }
            base = FPoly::rem(f, &FPoly::mul(f, &base, &base), m);
            e >>= 1;
        }
        acc
    }

    /// `x^(q^k) mod m` for the field size `q`, by repeated `q`-power.
    fn x_qpow_mod(f: &SmallField, k: u32, m: &FPoly) -> FPoly {
        let mut acc = FPoly::rem(f, &FPoly::x(), m);
        for _ in 0..k {
            acc = FPoly::powmod(f, &acc, f.q, m);
        }
        acc
    }
}

/// Irreducibility over the given field, by the standard Frobenius
/// criterion: `f` of degree `d` is irreducible iff `x^(q^d) = x mod f`
/// and `gcd(x^(q^(d/l)) - x, f) = 1` for every prime `l` dividing `d`.
pub fn is_irreducible(f: &SmallField, poly: &FPoly) -> bool {
    let d = match poly.degree() {
        Some(0) | None => return false,
        Some(1) => return true,
        Some(d) => d,
    };
    let poly = poly.monic(f);
    let xq_d = FPoly::x_qpow_mod(f, d as u32, &poly);
    if FPoly::sub(f, &xq_d, &FPoly::x()) != FPoly::zero() {
        return false;
    }
    for (ell, _) in factorize(d as u64) {
        let k = d as u64 / ell;
        let xq_k = FPoly::x_qpow_mod(f, k as u32, &poly);
        let diff = FPoly::sub(f, &xq_k, &FPoly::x());
        let g = FPoly::gcd(f, &diff, &poly);
        if g.degree() != Some(0) {
            return false;
        }
    }
    true
}

/// All roots of `poly` in the field, sorted by element index, with
/// multiplicity collapsed.
pub fn roots(f: &SmallField, poly: &FPoly) -> Vec<Fe> {
    let mut out: Vec<Fe> = f
        .elements()
        .filter(|&x| poly.evaluate(f, x).0 == 0)
        .collect();
    out.sort();
    out
}

/// Factor a nonzero polynomial into monic irreducible factors with
/// multiplicities, in a deterministic order (by degree, then by
/// coefficient indices).  The leading coefficient is returned
/// separately.
pub fn factor(f: &SmallField, poly: &FPoly) -> (Fe, Vec<(FPoly, usize)>) {
    assert!(!poly.is_zero(), "factor of zero polynomial");
    let lead = poly.leading();
    let mut work = poly.monic(f);
    let mut out: Vec<(FPoly, usize)> = Vec::new();
    // Trial-divide by x first so every remaining factor has a nonzero
    // constant term.
    let mut x_mult = 0;
    while work.degree().map_or(false, |d| d >= 1) && work.coeff(0).0 == 0 {
        work = FPoly::divrem(f, &work, &FPoly::x()).0;
        x_mult += 1;
    }
    if x_mult > 0 {
        out.push((FPoly::x(), x_mult));
    }
    if work.degree().map_or(true, |d| d == 0) {
        out.sort_by_key(factor_sort_key);
        return (lead, out);
    }
    // Squarefree decomposition, then distinct-degree, then equal-degree.
    for (sqfree, mult) in squarefree_decomposition(f, &work) {
        for (dd_poly, d) in distinct_degree_split(f, &sqfree) {
            for irr in equal_degree_split(f, &dd_poly, d) {
                out.push((irr, mult));
            }
        }
    }
    // Merge duplicates (possible when multiplicities differ across the
    // squarefree layers -- they cannot collide, but be safe) and sort.
    out.sort_by_key(factor_sort_key);
    let mut merged: Vec<(FPoly, usize)> = Vec::new();
    for (p, m) in out {
        if let Some(last) = merged.last_mut() {
            if last.0 == p {
                last.1 += m;
                continue;
            }
        }
        merged.push((p, m));
    }
    (lead, merged)
}

fn factor_sort_key(entry: &(FPoly, usize)) -> (usize, Vec<u32>) {
    let d = entry.0.degree().unwrap_or(0);
    (d, entry.0.coeffs().iter().map(|c| c.0).collect())
}

/// Yun-style squarefree decomposition adapted to positive
/// characteristic: returns pairs `(g, m)` with `g` squarefree, the `g`
/// pairwise coprime, and `poly = prod g^m`.
fn squarefree_decomposition(f: &SmallField, poly: &FPoly) -> Vec<(FPoly, usize)> {
    let mut out: Vec<(FPoly, usize)> = Vec::new();
    sqfree_rec(f, poly, 1, &mut out);
    out
}

fn sqfree_rec(f: &SmallField, poly: &FPoly, outer_mult: usize, out: &mut Vec<(FPoly, usize)>) {
    if poly.degree().map_or(true, |d| d == 0) {
        return;
    }
    let deriv = poly.derivative(f);
    if deriv.is_zero() {
        // poly = h(x^p): take the p-th root by mapping coefficient
        // c*x^(pi) -> c^(q/p)*x^i and recurse with multiplicity * p.
        let p = f.p as usize;
        let d = poly.deg();
        debug_assert!(d % p == 0);
        let root_exp = f.q / f.p;
        let coeffs: Vec<Fe> = (0..=d / p)
            .map(|i| f.pow(poly.coeff(i * p), root_exp))
            .collect();
        let root = FPoly::new(f, coeffs);
        sqfree_rec(f, &root, outer_mult * p, out);
        return;
    }
    let mut c = FPoly::gcd(f, poly, &deriv);
    let mut w = FPoly::divrem(f, poly, &c).0;
    // w holds the product of factors of multiplicity not divisible by p;
    // peel them off one multiplicity layer at a time.
    let mut i = 1;
    while w.degree().map_or(false, |d| d >= 1) {
        let y = FPoly::gcd(f, &w, &c);
        let layer = FPoly::divrem(f, &w, &y).0;
        if layer.degree().map_or(false, |d| d >= 1) {
            out.push((layer, outer_mult * i));
        }
        w = y;
        c = FPoly::divrem(f, &c, &w).0;
        i += 1;
    }
    // Whatever remains in c consists of factors with multiplicity
    // divisible by p.
    if c.degree().map_or(false, |d| d >= 1) {
        sqfree_rec(f, &c, outer_mult, out);
    }
}

/// Split a squarefree monic polynomial into products of irreducibles of
/// equal degree: returns `(product, degree)` pairs.
fn distinct_degree_split(f: &SmallField, poly: &FPoly) -> Vec<(FPoly, usize)> {
    let mut out = Vec::new();
    let mut work = poly.clone();
    let mut xq = FPoly::rem(f, &FPoly::x(), &work);
    let mut d = 0usize;
    while work.degree().map_or(false, |deg| deg >= 1) {
        d += 1;
        if work.deg() < 2 * d {
            // The remainder must itself be irreducible.
            out.push((work.clone(), work.deg()));
            break;
        }
        xq = FPoly::powmod(f, &xq, f.q, &work);
        let diff = FPoly::sub(f, &xq, &FPoly::x());
        let g = FPoly::gcd(f, &diff, &work);
        if g.degree().map_or(false, |deg| deg >= 1) {
            out.push((g.clone(), d));
            work = FPoly::divrem(f, &work, &g).0;
            xq = FPoly::rem(f, &xq, &work);
        }
    }
    out
}

/// Split a monic squarefree product of degree-`d` irreducibles into the
/// individual factors (Cantor-Zassenhaus; the characteristic-2 variant
/// uses trace polynomials).  Deterministic: random choices come from a
/// generator seeded by the polynomial itself.
fn equal_degree_split(f: &SmallField, poly: &FPoly, d: usize) -> Vec<FPoly> {
    let deg = poly.degree().unwrap_or(0);
    if deg == d {
        return vec![poly.clone()];
    }
    let mut seed = 0x9e37u64 ^ (f.q << 16) ^ (d as u64);
    for c in poly.coeffs() {
        seed = seed.wrapping_mul(0x100000001b3).wrapping_add(c.0 as u64);
    }
    let mut rng = SplitMix64::new(seed);
    let mut stack = vec![poly.clone()];
    let mut out = Vec::new();
    while let Some(cur) = stack.pop() {
        let cd = cur.deg();
        if cd == d {
            out.push(cur);
            continue;
        }
        // Try random splitters until a proper factor appears.
        loop {
            let u = random_poly(f, &mut rng, cd);
            if u.degree().map_or(true, |ud| ud == 0) {
                continue;
            }
            let g1 = FPoly::gcd(f, &u, &cur);
            if g1.degree().map_or(false, |gd| gd >= 1 && gd < cd) {
                stack.push(FPoly::divrem(f, &cur, &g1).0);
                stack.push(g1);
                break;
            }
            let splitter = if f.p == 2 {
                // T(u) = u + u^2 + u^4 + ... over F_{2^(a*d)}.
                let mut acc = FPoly::zero();
                let mut term = FPoly::rem(f, &u, &cur);
                for _ in 0..(f.a as usize * d) {
                    acc = FPoly::add(f, &acc, &term);
                    acc = FPoly::rem(f, &acc, &cur);
                    term = FPoly::rem(f, &FPoly::mul(f, &term, &term), &cur);
                }
                acc
            } else {
                // u^((q^d - 1)/2) - 1.
                let e = (pow_u128(f.q, d as u32) - 1) / 2;
                let upow = powmod_u128(f, &u, e, &cur);
                FPoly::sub(f, &upow, &FPoly::one())
            };
            let g = FPoly::gcd(f, &splitter, &cur);
            if g.degree().map_or(false, |gd| gd >= 1 && gd < cd) {
                stack.push(FPoly::divrem(f, &cur, &g).0);
                stack.push(g);
                break;
            }
        }
    }
    out
}

fn pow_u128(base: u64, e: u32) -> u128 {
    (0..e).fold(1u128, |acc, _| acc * base as u128)
}

fn powmod_u128(f: &SmallField, base: &FPoly, mut e: u128, m: &FPoly) -> FPoly {
    let mut base = FPoly::rem(f, base, m);
    let mut acc = FPoly::one();
    while e > 0 {
        if e & 1 == 1 {
            acc = FPoly::rem(f, &FPoly::mul(f, &acc, &base), m);
        }
        base = FPoly::rem(f, &FPoly::mul(f, &base, &base), m);
        e >>= 1;
    }
    acc
}

fn random_poly(f: &SmallField, rng: &mut SplitMix64, below_deg: usize) -> FPoly {
    let deg = 1 + (rng.next_u64() as usize) % below_deg.max(1);
    let coeffs: Vec<Fe> = (0..=deg).map(|_| Fe(rng.below(f.q) as u32)).collect();
    FPoly::new(f, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(q: u64) -> SmallField {
        SmallField::new(q).unwrap()
    }

    #[test]
    fn field_axioms_sampled() {
        for q in [4u64, 8, 9, 16, 25, 27, 32, 49] {
            let f = field(q);
            let mut rng = SplitMix64::new(q);
            for _ in 0..200 {
                let x = Fe(rng.below(q) as u32);
                let y = Fe(rng.below(q) as u32);
                let z = Fe(rng.below(q) as u32);
                assert_eq!(f.add(x, y), f.add(y, x));
                assert_eq!(f.mul(x, y), f.mul(y, x));
                assert_eq!(f.add(f.add(x, y), z), f.add(x, f.add(y, z)));
                assert_eq!(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)));
                assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
                assert_eq!(f.add(x, f.neg(x)), Fe(0));
                if x.0 != 0 {
                    assert_eq!(f.mul(x, f.inv(x)), Fe(1));
                }
                assert_eq!(f.pow(x, q), x, "x^q = x in F_q");
            }
        }
    }

    #[test]
    fn pinned_f32_structure() {
        // In F_32 with modulus x^5 + x^2 + 1, the power-basis generator
        // t (index 2) satisfies t^5 = t^2 + 1 (indices: 4 + 1 = 5).
        let f = field(32);
        let t = Fe(2);
        assert_eq!(f.pow(t, 5), Fe(5));
        // Every nonzero element has order dividing 31 (prime), so all
        // non-identity elements generate.
        for x in f.elements().skip(2) {
            assert_eq!(f.order(x), 31);
        }
    }

    #[test]
    fn pinned_f27_structure() {
        // F_27 with modulus x^3 + 2x + 1: t^3 = -2t - 1 = t + 2
        // (indices: t = 3, t^3 = 3 + 2 = 5).
        let f = field(27);
        let t = Fe(3);
        assert_eq!(f.pow(t, 3), Fe(5));
        assert_eq!(f.trace(Fe(1)), Fe(0)); // 3 * 1 = 0 in F_3
    }

    #[test]
    fn traces_and_norms() {
        for q in [8u64, 9, 27, 32] {
            let f = field(q);
            // Trace is additive, surjective onto F_p, and has the right
            // number of zeros (q/p).
            let mut zero_count = 0;
            for x in f.elements() {
                let tx = f.trace(x);
                assert!(tx.0 < f.p as u32);
                if tx.0 == 0 {
                    zero_count += 1;
                }
                for y in f.elements().take(8) {
                    assert_eq!(f.trace(f.add(x, y)), f.add(f.trace(x), f.trace(y)));
                }
            }
            assert_eq!(zero_count as u64, q / f.p);
            // Norm is multiplicative on a sample.
            let g = f.generator();
            assert_eq!(
                f.norm(f.mul(g, g)),
                f.mul(f.norm(g), f.norm(g))
            );
        }
    }

    #[test]
    fn squares_and_roots() {
        for q in [9u64, 25, 27, 49] {
            let f = field(q);
            let squares = f.elements().filter(|&x| f.is_square(x)).count() as u64;
            assert_eq!(squares, (q + 1) / 2, "q = {q}");
            for x in f.elements() {
                match f.sqrt(x) {
                    Some(r) => assert_eq!(f.mul(r, r), x),
                    None => assert!(!f.is_square(x)),
                }
            }
        }
        // Characteristic 2: squaring is a bijection.
        let f = field(32);
        for x in f.elements() {
            let r = f.sqrt(x).unwrap();
            assert_eq!(f.mul(r, r), x);
        }
    }

    #[test]
    fn poly_division_and_gcd() {
        let f = field(27);
        let a = FPoly::from_ints(&f, &[1, 2, 0, 1, 1]);
        let b = FPoly::from_ints(&f, &[2, 1, 1]);
        let (q, r) = FPoly::divrem(&f, &a, &b);
        let back = FPoly::add(&f, &FPoly::mul(&f, &q, &b), &r);
        assert_eq!(back, a);
        assert!(r.degree().map_or(true, |d| d < 2));
        // gcd of multiples
        let m = FPoly::from_ints(&f, &[1, 1]);
        let am = FPoly::mul(&f, &a, &m);
        let bm = FPoly::mul(&f, &b, &m);
        let g = FPoly::gcd(&f, &am, &bm);
        assert_eq!(FPoly::rem(&f, &g, &m), FPoly::zero());
    }

    #[test]
    fn irreducibility() {
        let f2 = field(2);
        assert!(is_irreducible(&f2, &FPoly::from_ints(&f2, &[1, 1, 0, 0, 1]))); // x^4+x+1
        assert!(is_irreducible(&f2, &FPoly::from_ints(&f2, &[1, 1, 1, 1, 1]))); // x^4+x^3+x^2+x+1
        assert!(!is_irreducible(&f2, &FPoly::from_ints(&f2, &[1, 0, 0, 0, 1]))); // (x+1)^4
        assert!(!is_irreducible(&f2, &FPoly::from_ints(&f2, &[1, 1, 1, 0, 1]))); // root at 1
        let f3 = field(3);
        assert!(is_irreducible(&f3, &FPoly::from_ints(&f3, &[1, 2, 0, 1]))); // x^3+2x+1
        // All pinned moduli really are irreducible.
        for q in [4u64, 8, 16, 32, 128, 1024, 9, 27] {
            let (p, _) = prime_power(q).unwrap();
            let fp = field(p);
            let m = pinned_modulus(q).unwrap();
            let mp = FPoly::new(&fp, m.iter().map(|&c| Fe(c as u32)).collect());
            assert!(is_irreducible(&fp, &mp), "modulus for q = {q}");
        }
    }

    #[test]
    fn factor_product_of_all_linears() {
        // x^q - x factors as the product of all monic linear polynomials.
        for q in [7u64, 9, 8] {
            let f = field(q);
            let mut coeffs = vec![Fe(0); q as usize + 1];
            coeffs[1] = f.neg(Fe(1));
            coeffs[q as usize] = Fe(1);
            let poly = FPoly::new(&f, coeffs);
            let (lead, factors) = factor(&f, &poly);
            assert_eq!(lead, Fe(1));
            assert_eq!(factors.len(), q as usize);
            assert!(factors.iter().all(|(p, m)| p.deg() == 1 && *m == 1));
        }
    }

    #[test]
    fn factor_roundtrip_random() {
        for q in [4u64, 27, 32, 9] {
            let f = field(q);
            let mut rng = SplitMix64::new(1000 + q);
            for trial in 0..30 {
                // Build a product of random monic polynomials of small
                // degree (not necessarily irreducible) with a repeat.
                let mut prod = FPoly::one();
                let n = 1 + (trial % 3);
                for _ in 0..=n {
                    let d = 1 + rng.below(3) as usize;
                    let mut coeffs: Vec<Fe> =
                        (0..d).map(|_| Fe(rng.below(q) as u32)).collect();
                    coeffs.push(Fe(1));
                    let p = FPoly::new(&f, coeffs);
                    prod = FPoly::mul(&f, &prod, &p);
                    if trial % 2 == 0 {
                        prod = FPoly::mul(&f, &prod, &p); // force multiplicity
                    }
                }
                let (lead, factors) = factor(&f, &prod);
                // Reassemble and compare.
                let mut back = FPoly::constant(lead);
                for (p, m) in &factors {
                    assert!(is_irreducible(&f, p), "q={q} factor {p:?}");
                    for _ in 0..*m {
                        back = FPoly::mul(&f, &back, p);
                    }
                }
                assert_eq!(back, prod, "q = {q}, trial = {trial}");
            }
        }
    }

    #[test]
    fn roots_listing() {
        let f = field(27);
        // (x - 3)(x - 5) has roots {3, 5} (as indices).
        let poly = FPoly::mul(
            &f,
            &FPoly::x_minus(&f, Fe(3)),
            &FPoly::x_minus(&f, Fe(5)),
        );
        assert_eq!(roots(&f, &poly), vec![Fe(3), Fe(5)]);
    }

    #[test]
    fn subfield_embedding() {
        let f32 = field(32);
        let f1024 = field(1024);
        let table = f1024.embedding_from(&f32).unwrap();
        assert_eq!(table[0], Fe(0));
        assert_eq!(table[1], Fe(1));
        // Ring homomorphism on samples.
        let mut rng = SplitMix64::new(99);
        for _ in 0..100 {
            let x = Fe(rng.below(32) as u32);
            let y = Fe(rng.below(32) as u32);
            assert_eq!(
                table[f32.add(x, y).0 as usize],
                f1024.add(table[x.0 as usize], table[y.0 as usize])
            );
            assert_eq!(
                table[f32.mul(x, y).0 as usize],
                f1024.mul(table[x.0 as usize], table[y.0 as usize])
            );
        }
        // Image elements satisfy x^32 = x.
        for &im in &table {
            assert_eq!(f1024.pow(im, 32), im);
        }
        // Non-subfield pairs are rejected.
        assert!(field(27).embedding_from(&field(9)).is_err());
        assert!(field(16).embedding_from(&field(8)).is_err());
    }

    #[test]
    fn smallest_irreducible_for_unpinned() {
        // q = 25 is not pinned; the field must still work.
        let f = field(25);
        assert_eq!(f.p, 5);
        let g = f.generator();
        assert_eq!(f.order(g), 24);
        // q = 81, 121, 243 construct fine too.
        for q in [81u64, 121, 243, 343] {
            let f = field(q);
            assert_eq!(f.pow(f.generator(), q - 1), Fe(1));
        }
    }
}
