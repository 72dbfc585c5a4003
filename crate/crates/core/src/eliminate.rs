//! Elimination rules for candidate real Weil polynomials, whole-case
//! analyses, and the genus-by-genus upper-bound descent built on them.
//!
//! A candidate that passes every numerical test can still fail to come
//! from a curve.  The rules here exploit the factorization of the
//! candidate `h` into irreducibles: each way of splitting the factors
//! into two sets `h1 * h2 = h` decomposes a hypothetical Jacobian up to
//! isogeny as `A1 x A2`, glued along a group annihilated by `r(F) for
//! any `r` with `r(F+V)` killing the gluing; the resultant of the
//! radicals of `h1` and `h2` bounds that gluing.
//!
//! * resultant `+-1`: the Jacobian would be a product `A1 x A2`, and a
//!   product of positive-dimensional principally polarized varieties
//!   cannot be the Jacobian of a curve (its theta divisor is
//!   reducible).  The candidate is eliminated outright.
//! * resultant `+-2`: the curve would be a double cover of a curve `D`
//!   whose real Weil polynomial is `h1` or `h2`.  Each choice is tested
//!   against necessary conditions for a degree-2 map `C -> D`: place
//!   counts (`a_d(C) <= 2 b_d(D)`), the Riemann-Hurwitz bound with the
//!   forced ramification from odd place counts, known upper bounds on
//!   `#D(F_q)`, and, in characteristic 2, the wild-ramification count
//!   forced by the p-ranks.  If both choices fail, the candidate is
//!   eliminated.
//! * elliptic quotient: a splitting with one side a single elliptic
//!   factor `x + c` presents the Jacobian as `A x E` with gluing
//!   exponent dividing `s = |resultant|`; then `#C <= s * #E(F_q)`.
//! * very special type (square `q` only): `h = (x+m)^(g-1) (x+m-n)`
//!   with `n` squarefree and coprime to `p` forces a gluing that cannot
//!   exist, eliminating the candidate with no further conditions.
//!
//! On top of the per-candidate rules, [`analyze`] decides a whole
//! `(q, g, N)` case, and [`general_bound`] / [`table_bound`] walk `N`
//! downward from the best known starting point, excluding each value by
//! a closed-form criterion or by a full analysis, to produce an upper
//! bound on `N_q(g)` with a step-by-step provenance trail.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::{self, Candidate, Route, WorkBudget};
use crate::error::{Error, Result};
use crate::exact::IntPoly;
use crate::isogeny;
use crate::weil::{self, FieldParams};

/// Default work limit for the enumeration behind [`analyze`].
pub const DEFAULT_WORK_LIMIT: u64 = 200_000_000;

// ---------------------------------------------------------------------------
// Rule sets
// ---------------------------------------------------------------------------

/// Which elimination rules to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleSet {
    /// Baseline rules: coprime splittings (resultant `+-1`), double
    /// covers (resultant `+-2`) tested by degree-1 point counts and
    /// Riemann-Hurwitz, and elliptic quotient bounds.
    Paper,
    /// Baseline plus: place-count comparisons in every odd degree up to
    /// `g`, known genus bounds applied to double-cover quotients, the
    /// wild-ramification count in characteristic 2, and the very
    /// special type rule over square fields.
    Extended,
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleSet::Paper => write!(f, "paper"),
            RuleSet::Extended => write!(f, "extended"),
        }
    }
}

impl std::str::FromStr for RuleSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<RuleSet> {
        match s {
            "paper" => Ok(RuleSet::Paper),
            "extended" => Ok(RuleSet::Extended),
            other => Err(Error::invalid(format!(
                "unknown ruleset {other:?} (expected \"paper\" or \"extended\")"
            ))),
        }
    }
}

// ---------------------------------------------------------------------------
// Known bounds table
// ---------------------------------------------------------------------------

/// Built-in table of previously published upper bounds on `N_q(g)`.
const EMBEDDED_BOUNDS: &str = include_str!("data/known_bounds.csv");

/// Upper bounds on `N_q(g)` from outside sources, used as side
/// information when testing double-cover quotients and as the starting
/// point of the bound descent.  Lookups for pairs without a table row
/// fall back to the Weil-Serre bound.
#[derive(Clone, Debug, Default)]
pub struct BoundsTable {
    map: BTreeMap<(u64, usize), u64>,
}

impl BoundsTable {
    /// The built-in table.
    pub fn embedded() -> BoundsTable {
        BoundsTable::parse(EMBEDDED_BOUNDS).expect("built-in bounds table must parse")
    }

    /// An empty table: every lookup falls back to the Weil-Serre bound.
    pub fn empty() -> BoundsTable {
        BoundsTable::default()
    }

    /// Parse CSV text with lines `q,g,upper`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<BoundsTable> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(',').map(str::trim);
            let parse = |s: Option<&str>| -> Result<u64> {
                s.ok_or_else(|| Error::invalid(format!("bounds line {}: expected q,g,upper", lineno + 1)))?
                    .parse::<u64>()
                    .map_err(|e| Error::invalid(format!("bounds line {}: {e}", lineno + 1)))
            };
            let q = parse(parts.next())?;
            let g = parse(parts.next())? as usize;
            let upper = parse(parts.next())?;
            if parts.next().is_some() {
                return Err(Error::invalid(format!(
                    "bounds line {}: too many fields",
                    lineno + 1
                )));
            }
            map.insert((q, g), upper);
        }
        Ok(BoundsTable { map })
    }

    /// Merge `other` into `self`; rows in `other` win.
    pub fn merge(&mut self, other: &BoundsTable) {
        for (&k, &v) in &other.map {
            self.map.insert(k, v);
        }
    }

    /// The raw table row for `(q, g)`, if any.
    pub fn lookup(&self, q: u64, g: usize) -> Option<u64> {
        self.map.get(&(q, g)).copied()
    }

    /// Best available upper bound on `N_q(g)`: the table row capped by
    /// the Weil-Serre bound, the Weil-Serre bound when there is no row,
    /// and the exact maximum (largest admissible Frobenius trace) for
    /// genus 0 and 1.
    pub fn best_upper(&self, ctx: &FieldParams, g: usize) -> u64 {
        if g == 0 {
            return ctx.q + 1;
        }
        if g == 1 {
            let mut t = ctx.m as i64;
            while t > -(ctx.m as i64) && !isogeny::elliptic_trace_admissible(ctx, t) {
                t -= 1;
            }
            return (ctx.q as i64 + 1 + t) as u64;
        }
        let ws = ctx.ws_bound(g);
        match self.lookup(ctx.q, g) {
            Some(b) => b.min(ws),
            None => ws,
        }
    }
}

// ---------------------------------------------------------------------------
// Splittings
// ---------------------------------------------------------------------------

/// One way of separating the distinct irreducible factors of a
/// candidate into two non-empty sets.  `side` holds the 1-based indices
/// of the first set into the sorted factor list; `resultant` is the
/// resultant of the radical of the first side with the radical of the
/// complement.
#[derive(Clone, Debug)]
pub struct Splitting {
    pub side: Vec<usize>,
    pub resultant: BigInt,
}

/// All `2^(k-1) - 1` splittings of `k` distinct factors, in ascending
/// bitmask order over the first `k - 1` factors.  The last factor stays
/// on the complement side, so each unordered splitting appears exactly
/// once, and the scan order is deterministic.
pub fn splittings(factors: &[(IntPoly, usize)]) -> Vec<Splitting> {
    let k = factors.len();
    let mut out = Vec::new();
    if !(2..=32).contains(&k) {
        return out;
    }
    for mask in 1u32..(1u32 << (k - 1)) {
        let mut side = Vec::new();
        let mut rad1 = IntPoly::one();
        let mut rad2 = IntPoly::one();
        for (i, (f, _)) in factors.iter().enumerate() {
            if i < k - 1 && (mask >> i) & 1 == 1 {
                side.push(i + 1);
                rad1 = &rad1 * f;
            } else {
                rad2 = &rad2 * f;
            }
        }
        let resultant = rad1.resultant(&rad2);
        out.push(Splitting { side, resultant });
    }
    out
}

/// Product over the factors selected by the 1-based indices in `side`
/// (or by its complement), with multiplicities.
fn side_product(factors: &[(IntPoly, usize)], side: &[usize], complement: bool) -> IntPoly {
    let mut out = IntPoly::one();
    for (i, (f, c)) in factors.iter().enumerate() {
        let chosen = side.contains(&(i + 1));
        if chosen != complement {
            for _ in 0..*c {
                out = &out * f;
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Report types
// ---------------------------------------------------------------------------

/// One irreducible factor in a report: coefficient strings from the
/// constant term up, then the multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorRep(pub Vec<String>, pub usize);

impl FactorRep {
    pub fn new(f: &IntPoly, mult: usize) -> FactorRep {
        FactorRep(f.coeffs().iter().map(|c| c.to_string()).collect(), mult)
    }

    /// Reconstruct the polynomial.
    pub fn poly(&self) -> Result<IntPoly> {
        let coeffs = self
            .0
            .iter()
            .map(|s| {
                s.parse::<BigInt>()
                    .map_err(|e| Error::invalid(format!("bad coefficient {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IntPoly::new(coeffs))
    }
}

/// Why one of the two double-cover quotient choices is impossible.
/// `lhs`/`rhs` record the two sides of the violated comparison:
/// `lhs > rhs` for "point counts" (degree `degree`) and "known bound",
/// `lhs < rhs` for "Riemann-Hurwitz" (`2g` against `4 g_D - 2 + r`),
/// and for "Deuring-Shafarevich" `lhs` is the forced number of
/// ramification points and `rhs` the degree-2 part of Riemann-Hurwitz.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuotientFail {
    pub factors: Vec<FactorRep>,
    pub genus: usize,
    pub reason: String,
    pub lhs: String,
    pub rhs: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
}

/// Replayable evidence for an elimination.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Certificate {
    /// The candidate is not a Weil polynomial at all.
    NotWeil { message: String },
    /// A splitting with resultant `+-1`.
    Resultant1 {
        splitting: Vec<usize>,
        resultant: String,
    },
    /// A splitting with resultant `+-2` where both double-cover
    /// quotient choices fail.
    Resultant2 {
        splitting: Vec<usize>,
        resultant: String,
        quotients: Vec<QuotientFail>,
    },
    /// An elliptic factor `E` split off with resultant `s` and
    /// `N > s * #E(F_q)`.
    EllipticQuotient {
        splitting: Vec<usize>,
        resultant: String,
        elliptic: Vec<String>,
        elliptic_points: String,
        bound: String,
    },
    /// Square `q`, `h = (x+m)^(g-1) (x+m-n)` with `n` squarefree and
    /// coprime to the characteristic.
    VerySpecial { n: u64, elliptic: Vec<String> },
}

impl Certificate {
    /// Short method name used in the text report.
    pub fn method(&self) -> &'static str {
        match self {
            Certificate::NotWeil { .. } => "Not Weil polynomial",
            Certificate::Resultant1 { .. } => "resultant=1",
            Certificate::Resultant2 { .. } => "resultant=2",
            Certificate::EllipticQuotient { .. } => "elliptic quotient",
            Certificate::VerySpecial { .. } => "very special type",
        }
    }
}

/// Final status of one candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandStatus {
    NotWeil,
    Eliminated,
    Survivor,
    /// Some factor's validity could not be decided; the candidate is
    /// treated as a possible curve.
    UnknownValidity,
}

/// Outcome of the rules on one candidate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CandidateReport {
    pub factors: Vec<FactorRep>,
    pub place_counts: Vec<String>,
    pub status: CandStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splitting: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reasons: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    /// For survivors: signed resultants of each pair of distinct
    /// irreducible factors (diagonal 0).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resultant_matrix: Option<Vec<Vec<String>>>,
}

impl CandidateReport {
    /// Reconstruct the candidate polynomial from the factor list.
    pub fn poly(&self) -> Result<IntPoly> {
        let mut out = IntPoly::one();
        for f in &self.factors {
            let p = f.poly()?;
            for _ in 0..f.1 {
                out = &out * &p;
            }
        }
        Ok(out)
    }

    pub fn is_open(&self) -> bool {
        matches!(self.status, CandStatus::Survivor | CandStatus::UnknownValidity)
    }
}

/// Overall conclusion for a `(q, g, N)` case.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    /// Every candidate was eliminated: no such curve exists.
    Impossible,
    /// At least one candidate survived (or the search was cut short):
    /// existence is not decided by these rules.
    Undecided,
}

/// Full report for one `(q, g, N)` case.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub q: u64,
    pub g: usize,
    #[serde(rename = "N")]
    pub n: u64,
    pub ws_bound: u64,
    pub defect: i64,
    pub ruleset: RuleSet,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub prefilter: Vec<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub work_limited: bool,
    pub candidates: Vec<CandidateReport>,
    pub conclusion: Conclusion,
}

impl AnalysisReport {
    /// Indices of candidates still standing.
    pub fn survivors(&self) -> Vec<usize> {
        self.candidates
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_open())
            .map(|(i, _)| i)
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Rule engine
// ---------------------------------------------------------------------------

/// Options shared by [`apply_rules`] and [`analyze`].
#[derive(Clone, Debug)]
pub struct AnalyzeOptions {
    pub ruleset: RuleSet,
    pub route: Route,
    pub work_limit: u64,
    pub bounds: BoundsTable,
}

impl Default for AnalyzeOptions {
    fn default() -> AnalyzeOptions {
        AnalyzeOptions {
            ruleset: RuleSet::Paper,
            route: Route::Auto,
            work_limit: DEFAULT_WORK_LIMIT,
            bounds: BoundsTable::embedded(),
        }
    }
}

impl AnalyzeOptions {
    pub fn with_ruleset(ruleset: RuleSet) -> AnalyzeOptions {
        AnalyzeOptions { ruleset, ..AnalyzeOptions::default() }
    }
}

/// Forced ramification for a degree-2 cover: the sum of the odd degrees
/// `d <= g` whose place count `a_d` is odd (a place of odd degree with
/// an odd count cannot map 2-to-1 or split, so some place of that
/// degree ramifies, contributing `d` geometric points).
fn forced_ramification(place_counts: &[BigInt]) -> u64 {
    let mut r = 0u64;
    for (i, a) in place_counts.iter().enumerate() {
        let d = i + 1;
        if d % 2 == 1 && a.is_odd() {
            r += d as u64;
        }
    }
    r
}

/// Test one choice of double-cover quotient `D` (with real Weil
/// polynomial `d_poly`) against the necessary conditions for a
/// degree-2 map `C -> D`, returning the first failure.
fn quotient_failure(
    ctx: &FieldParams,
    g: usize,
    n: u64,
    place_counts_c: &[BigInt],
    r: u64,
    gamma_c: Option<usize>,
    d_poly: &IntPoly,
    d_factors: &[(IntPoly, usize)],
    opts: &AnalyzeOptions,
) -> Result<Option<QuotientFail>> {
    let g_d = d_poly.deg();
    let n1_d = weil::rational_points(d_poly, ctx);
    let fail = |reason: &str, lhs: String, rhs: String, degree: Option<usize>| {
        Some(QuotientFail {
            factors: d_factors.iter().map(|(f, c)| FactorRep::new(f, *c)).collect(),
            genus: g_d,
            reason: reason.to_string(),
            lhs,
            rhs,
            degree,
        })
    };

    // Point counts: a_d(C) <= 2 * b_d(D) for odd d (degree 1 only in
    // the baseline rule set).
    match opts.ruleset {
        RuleSet::Paper => {
            let two_n1 = BigInt::from(2u32) * &n1_d;
            if BigInt::from(n) > two_n1 {
                return Ok(fail(
                    "point counts",
                    n.to_string(),
                    (BigInt::from(2u32) * &n1_d).to_string(),
                    Some(1),
                ));
            }
        }
        RuleSet::Extended => {
            let b_d = weil::place_counts(d_poly, ctx, g)?;
            for d in (1..=g).step_by(2) {
                let bound = BigInt::from(2u32) * &b_d[d - 1];
                if place_counts_c[d - 1] > bound {
                    return Ok(fail(
                        "point counts",
                        place_counts_c[d - 1].to_string(),
                        bound.to_string(),
                        Some(d),
                    ));
                }
            }
        }
    }

    // Riemann-Hurwitz: 2g - 2 >= 2*(2g_D - 2) + r.
    let lhs = 2 * g as i64;
    let rhs = 4 * g_d as i64 - 2 + r as i64;
    if lhs < rhs {
        return Ok(fail("Riemann-Hurwitz", lhs.to_string(), rhs.to_string(), None));
    }

    if opts.ruleset == RuleSet::Extended {
        // Known upper bound on #D(F_q).
        let known = opts.bounds.best_upper(ctx, g_d);
        if n1_d > BigInt::from(known) {
            return Ok(fail(
                "known bound",
                n1_d.to_string(),
                known.to_string(),
                None,
            ));
        }

        // Wild ramification in characteristic 2: a degree-2 cover is an
        // Artin-Schreier extension, so the p-ranks force exactly
        // `ram = (gamma_C - 1) - 2*(gamma_D - 1)` ramification points,
        // each contributing at least 2 to the different.
        if ctx.p == 2 {
            let gamma_c = gamma_c.expect("p-rank computed for extended rule set");
            let gamma_d = isogeny::p_rank(d_poly, ctx)?;
            let ram = gamma_c as i64 - 1 - 2 * (gamma_d as i64 - 1);
            let delta = (2 * g as i64 - 2) - 2 * (2 * g_d as i64 - 2);
            if ram < 0 || delta < 2 * ram || (ram == 0 && delta != 0) {
                return Ok(fail(
                    "Deuring-Shafarevich",
                    ram.to_string(),
                    delta.to_string(),
                    None,
                ));
            }
        }
    }

    Ok(None)
}

/// Apply the elimination rules to one candidate.
pub fn apply_rules(
    ctx: &FieldParams,
    g: usize,
    n: u64,
    cand: &Candidate,
    opts: &AnalyzeOptions,
) -> Result<CandidateReport> {
    let factors: Vec<FactorRep> = cand
        .factors
        .iter()
        .map(|(f, c)| FactorRep::new(f, *c))
        .collect();
    let place_counts: Vec<String> = cand.place_counts.iter().map(|a| a.to_string()).collect();
    let base = CandidateReport {
        factors,
        place_counts,
        status: CandStatus::Survivor,
        rule: None,
        splitting: None,
        reasons: Vec::new(),
        notes: Vec::new(),
        certificate: None,
        resultant_matrix: None,
    };

    if let Some(msg) = &cand.not_weil {
        return Ok(CandidateReport {
            status: CandStatus::NotWeil,
            rule: Some("Not Weil polynomial".into()),
            certificate: Some(Certificate::NotWeil { message: msg.clone() }),
            ..base
        });
    }

    let spl = splittings(&cand.factors);

    // Coprime splitting: the Jacobian would be a product.
    for s in &spl {
        if s.resultant.abs().is_one() {
            return Ok(CandidateReport {
                status: CandStatus::Eliminated,
                rule: Some("resultant=1".into()),
                splitting: Some(s.side.clone()),
                certificate: Some(Certificate::Resultant1 {
                    splitting: s.side.clone(),
                    resultant: s.resultant.to_string(),
                }),
                ..base
            });
        }
    }

    // Double cover: resultant exactly +-2 makes C a degree-2 cover of a
    // curve with real Weil polynomial one of the two sides.
    let two = BigInt::from(2u32);
    let r = forced_ramification(&cand.place_counts);
    let gamma_c = if opts.ruleset == RuleSet::Extended && ctx.p == 2 {
        Some(isogeny::p_rank(&cand.poly, ctx)?)
    } else {
        None
    };
    for s in &spl {
        if s.resultant.abs() != two {
            continue;
        }
        let mut fails = Vec::new();
        let mut all_fail = true;
        for complement in [false, true] {
            let d_poly = side_product(&cand.factors, &s.side, complement);
            let d_factors: Vec<(IntPoly, usize)> = cand
                .factors
                .iter()
                .enumerate()
                .filter(|(i, _)| s.side.contains(&(i + 1)) != complement)
                .map(|(_, (f, c))| (f.clone(), *c))
                .collect();
            match quotient_failure(
                ctx,
                g,
                n,
                &cand.place_counts,
                r,
                gamma_c,
                &d_poly,
                &d_factors,
                opts,
            )? {
                Some(f) => fails.push(f),
                None => {
                    all_fail = false;
                    break;
                }
            }
        }
        if all_fail {
            let mut reasons = Vec::new();
            for f in &fails {
                if !reasons.contains(&f.reason) {
                    reasons.push(f.reason.clone());
                }
            }
            return Ok(CandidateReport {
                status: CandStatus::Eliminated,
                rule: Some("resultant=2".into()),
                splitting: Some(s.side.clone()),
                reasons,
                certificate: Some(Certificate::Resultant2 {
                    splitting: s.side.clone(),
                    resultant: s.resultant.to_string(),
                    quotients: fails,
                }),
                ..base
            });
        }
    }

    // Elliptic quotient: one side a single elliptic factor x + c with
    // multiplicity 1; the gluing exponent divides s = |resultant|, so
    // N <= s * #E(F_q).
    let mut notes = Vec::new();
    let k = cand.factors.len();
    for s in &spl {
        for complement in [false, true] {
            let part: Vec<usize> = if complement {
                (1..=k).filter(|i| !s.side.contains(i)).collect()
            } else {
                s.side.clone()
            };
            if part.len() != 1 {
                continue;
            }
            let (f, mult) = &cand.factors[part[0] - 1];
            if *mult != 1 || f.deg() != 1 {
                continue;
            }
            let c = f.coeff(0);
            let t = match (-&c).try_into() {
                Ok(t) => t,
                Err(_) => continue,
            };
            if !isogeny::elliptic_trace_admissible(ctx, t) {
                continue;
            }
            let s_upper = s.resultant.abs();
            let ne = BigInt::from(ctx.q) + BigInt::one() + &c;
            let bound = &s_upper * &ne;
            if BigInt::from(n) > bound {
                return Ok(CandidateReport {
                    status: CandStatus::Eliminated,
                    rule: Some("elliptic quotient".into()),
                    splitting: Some(part.clone()),
                    certificate: Some(Certificate::EllipticQuotient {
                        splitting: part,
                        resultant: s.resultant.to_string(),
                        elliptic: f.coeffs().iter().map(|x| x.to_string()).collect(),
                        elliptic_points: ne.to_string(),
                        bound: bound.to_string(),
                    }),
                    notes,
                    ..base
                });
            }
            notes.push(format!("#C <= {s_upper}*{ne} = {bound}, not violated"));
        }
    }

    // Very special type over a square field: (x+m)^(g-1) (x+m-n) with n
    // squarefree and coprime to p cannot occur at all.
    if opts.ruleset == RuleSet::Extended && ctx.is_square_q() && g >= 2 && cand.factors.len() == 2 {
        let xm = IntPoly::x_plus(ctx.m as i64);
        let (small, big) = (&cand.factors[0], &cand.factors[1]);
        if big.0 == xm && big.1 == g - 1 && small.0.deg() == 1 && small.1 == 1 {
            let c = small.0.coeff(0);
            let n_shift = BigInt::from(ctx.m) - &c;
            if let Ok(nv) = u64::try_from(&n_shift) {
                if nv >= 1 && nv % ctx.p != 0 && is_squarefree(nv) {
                    return Ok(CandidateReport {
                        status: CandStatus::Eliminated,
                        rule: Some("very special type".into()),
                        certificate: Some(Certificate::VerySpecial {
                            n: nv,
                            elliptic: small.0.coeffs().iter().map(|x| x.to_string()).collect(),
                        }),
                        notes,
                        ..base
                    });
                }
            }
        }
    }

    // Survivor: record pairwise factor resultants for the report.
    if cand.exponent_unknown {
        notes.push(
            "validity unknown: some factor's isogeny-class test was inconclusive".into(),
        );
    }
    let matrix: Vec<Vec<String>> = cand
        .factors
        .iter()
        .map(|(fi, _)| {
            cand.factors
                .iter()
                .map(|(fj, _)| {
                    if fi == fj {
                        "0".to_string()
                    } else {
                        fi.resultant(fj).to_string()
                    }
                })
                .collect()
        })
        .collect();
    Ok(CandidateReport {
        status: if cand.exponent_unknown {
            CandStatus::UnknownValidity
        } else {
            CandStatus::Survivor
        },
        notes,
        resultant_matrix: Some(matrix),
        ..base
    })
}

fn is_squarefree(mut n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return false;
            }
        }
        d += 1;
    }
    true
}

// ---------------------------------------------------------------------------
// Whole-case analysis
// ---------------------------------------------------------------------------

/// Decide whether a genus-`g` curve over `F_q` with exactly `n`
/// rational points can exist, as far as the chosen rules can tell:
/// enumerate every candidate real Weil polynomial, run the rules on
/// each, and report `Impossible` exactly when none survives.
pub fn analyze(ctx: &FieldParams, g: usize, n: u64, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    if g == 0 {
        return Err(Error::invalid("genus must be at least 1"));
    }
    let ws = ctx.ws_bound(g);
    let defect = ws as i64 - n as i64;
    let mut report = AnalysisReport {
        q: ctx.q,
        g,
        n,
        ws_bound: ws,
        defect,
        ruleset: opts.ruleset,
        prefilter: Vec::new(),
        work_limited: false,
        candidates: Vec::new(),
        conclusion: Conclusion::Impossible,
    };

    if n > ws {
        report
            .prefilter
            .push(format!("N = {n} exceeds the Weil-Serre bound {ws}"));
        return Ok(report);
    }
    let lower = ctx.q as i64 + 1 - (g as u64 * ctx.m) as i64;
    if lower > 0 && (n as i64) < lower {
        report
            .prefilter
            .push(format!("N = {n} is below the Weil-Serre lower bound {lower}"));
        return Ok(report);
    }
    let min_defect = isogeny::exceptional_defect_bound(ctx, g);
    if (defect as u64) < min_defect {
        report.prefilter.push(format!(
            "defect {defect} is below the minimum defect {min_defect} forced by q = {}",
            ctx.q
        ));
        return Ok(report);
    }

    let budget = WorkBudget::new(opts.work_limit);
    let cands = match enumerate::candidates_via(ctx, g, n, opts.route, &budget) {
        Ok(c) => c,
        Err(Error::WorkLimitExceeded(msg)) => {
            report.prefilter.push(format!("enumeration incomplete: {msg}"));
            report.work_limited = true;
            report.conclusion = Conclusion::Undecided;
            return Ok(report);
        }
        Err(e) => return Err(e),
    };

    report.candidates = cands
        .par_iter()
        .map(|c| apply_rules(ctx, g, n, c, opts))
        .collect::<Result<Vec<_>>>()?;
    report.conclusion = if report.candidates.iter().any(|c| c.is_open()) {
        Conclusion::Undecided
    } else {
        Conclusion::Impossible
    };
    Ok(report)
}

// ---------------------------------------------------------------------------
// Text rendering
// ---------------------------------------------------------------------------

fn push_candidate_text(out: &mut String, c: &CandidateReport) {
    out.push_str("[ ");
    out.push_str(&c.place_counts.join(", "));
    out.push_str(" ]\n[\n");
    for (i, FactorRep(coeffs, mult)) in c.factors.iter().enumerate() {
        let poly = FactorRep(coeffs.clone(), *mult)
            .poly()
            .map(|p| p.to_string())
            .unwrap_or_else(|_| "?".into());
        let sep = if i + 1 == c.factors.len() { "" } else { "," };
        out.push_str(&format!("    <{poly}, {mult}>{sep}\n"));
    }
    out.push_str("]\n");
    match c.status {
        CandStatus::NotWeil => out.push_str("ELIMINATED: Not Weil polynomial.\n"),
        CandStatus::Eliminated => {
            let rule = c.rule.as_deref().unwrap_or("?");
            out.push_str(&format!("ELIMINATED: {rule} method.\n"));
            if let Some(s) = &c.splitting {
                let idx: Vec<String> = s.iter().map(|i| i.to_string()).collect();
                out.push_str(&format!("Splitting = [ {} ]\n", idx.join(", ")));
            }
            if !c.reasons.is_empty() {
                out.push_str(&format!("Reasons: {}\n", c.reasons.join(", ")));
            }
            if let Some(Certificate::EllipticQuotient {
                resultant,
                elliptic_points,
                bound,
                ..
            }) = &c.certificate
            {
                let s = resultant.trim_start_matches('-');
                out.push_str(&format!(
                    "Bound violated: #C <= {s}*{elliptic_points} = {bound}.\n"
                ));
            }
        }
        CandStatus::Survivor => {
            out.push_str("SURVIVOR.\n");
            for note in &c.notes {
                out.push_str(&format!("Note: {note}\n"));
            }
            if let Some(m) = &c.resultant_matrix {
                out.push_str("Resultants:\n");
                for row in m {
                    out.push_str(&format!("[ {} ]\n", row.join(", ")));
                }
            }
        }
        CandStatus::UnknownValidity => {
            out.push_str("VALIDITY UNKNOWN: treated as a possible curve.\n");
            for note in &c.notes {
                out.push_str(&format!("Note: {note}\n"));
            }
        }
    }
}

/// Render an analysis in the same per-candidate block format the
/// reference implementation printed: place-count vector, factor list,
/// then the disposition.
pub fn render_text(report: &AnalysisReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "q = {}, g = {}, N = {}  (Weil-Serre bound {}, defect {}, ruleset {})\n\n",
        report.q, report.g, report.n, report.ws_bound, report.defect, report.ruleset
    ));
    for line in &report.prefilter {
        out.push_str(&format!("NOTE: {line}\n\n"));
    }
    for c in &report.candidates {
        push_candidate_text(&mut out, c);
        out.push('\n');
    }
    let survivors = report.survivors().len();
    match report.conclusion {
        Conclusion::Impossible => out.push_str("CONCLUSION: no such curve exists.\n"),
        Conclusion::Undecided => out.push_str(&format!(
            "CONCLUSION: undecided ({survivors} surviving candidate{}).\n",
            if survivors == 1 { "" } else { "s" }
        )),
    }
    out
}

// ---------------------------------------------------------------------------
// Bound descent
// ---------------------------------------------------------------------------

/// One step of the bound descent: the point count `n` was excluded by
/// `tag` (or `tag` explains the starting value).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundStep {
    pub n: u64,
    pub tag: String,
    pub detail: String,
}

/// Result of the bound descent for one `(q, g)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundReport {
    pub q: u64,
    pub g: usize,
    pub ws_bound: u64,
    /// Best upper bound on `N_q(g)` established by the descent.
    pub bound: u64,
    pub steps: Vec<BoundStep>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub work_limited: bool,
}

/// Closed-form exclusions for a given defect, independent of the
/// candidate list.  Returns `(tag, detail)` when no genus-`g` curve
/// over `F_q` can have this defect.
fn closed_form_exclusion(ctx: &FieldParams, g: usize, defect: u64) -> Option<(String, String)> {
    let min_defect = isogeny::exceptional_defect_bound(ctx, g);
    if defect < min_defect {
        return Some((
            "minimum defect".into(),
            format!("defect {defect} is below the minimum defect {min_defect} forced by q = {}", ctx.q),
        ));
    }
    let q = ctx.q;
    let m = ctx.m;
    let gm = g as u64 * m;
    if ctx.is_square_q() {
        match defect {
            2 if q != 4 && g > 2 => {
                return Some((
                    "square field: no defect 2".into(),
                    "no curve over a square field other than F_4 has defect 2 once g > 2".into(),
                ));
            }
            3 if q != 9 && g > 3 => {
                return Some((
                    "square field: no defect 3".into(),
                    "no curve over a square field other than F_9 has defect 3 once g > 3".into(),
                ));
            }
            4 => {
                if m * (g as u64) > 3 * q + 4 * m - 9 {
                    return Some((
                        "square field: no defect 4 (genus bound)".into(),
                        format!("g*m = {gm} exceeds 3q + 4m - 9 = {}", 3 * q + 4 * m - 9),
                    ));
                }
                if ctx.p == 2 && ctx.a % 2 == 0 {
                    let e = ctx.a / 2;
                    if e > 2 && (g as u64) > (1u64 << (e - 1)) + 2 {
                        return Some((
                            "square field: no defect 4 (characteristic 2)".into(),
                            format!("g = {g} exceeds 2^{} + 2 = {}", e - 1, (1u64 << (e - 1)) + 2),
                        ));
                    }
                }
            }
            _ => {}
        }
    }
    if defect == 2 && g > 5 && gm > q - 1 + 4 * m {
        return Some((
            "large genus: no defect 2".into(),
            format!("g*m = {gm} exceeds q - 1 + 4m = {}", q - 1 + 4 * m),
        ));
    }
    None
}

/// One-line summary of why every candidate at some N died.
fn summarize_analysis(report: &AnalysisReport) -> String {
    if report.candidates.is_empty() {
        return report
            .prefilter
            .first()
            .cloned()
            .unwrap_or_else(|| "no candidate shapes".into());
    }
    let mut parts = Vec::new();
    for c in &report.candidates {
        let shape: Vec<String> = c
            .factors
            .iter()
            .map(|f| {
                let p = f.poly().map(|p| p.to_string()).unwrap_or_else(|_| "?".into());
                if f.1 == 1 {
                    format!("({p})")
                } else {
                    format!("({p})^{}", f.1)
                }
            })
            .collect();
        let disposition = match c.status {
            CandStatus::NotWeil => "not a Weil polynomial".to_string(),
            CandStatus::Eliminated => {
                format!("{} method", c.rule.as_deref().unwrap_or("?"))
            }
            CandStatus::Survivor | CandStatus::UnknownValidity => "survives".to_string(),
        };
        parts.push(format!("{}: {disposition}", shape.join("")));
    }
    parts.join("; ")
}

fn descend(
    ctx: &FieldParams,
    g: usize,
    opts: &AnalyzeOptions,
    max_analyze_defect: Option<u64>,
) -> Result<BoundReport> {
    if g == 0 {
        return Err(Error::invalid("genus must be at least 1"));
    }
    let ws = ctx.ws_bound(g);
    let mut bound = ws;
    let mut steps = Vec::new();
    let mut work_limited = false;
    if let Some(row) = opts.bounds.lookup(ctx.q, g) {
        if row < ws {
            bound = row;
            steps.push(BoundStep {
                n: bound,
                tag: "known bound".into(),
                detail: format!("published upper bound {bound} (Weil-Serre gives {ws})"),
            });
        }
    }
    while bound > 0 {
        let defect = ws - bound;
        if let Some((tag, detail)) = closed_form_exclusion(ctx, g, defect) {
            steps.push(BoundStep { n: bound, tag, detail });
            bound -= 1;
            continue;
        }
        if let Some(maxd) = max_analyze_defect {
            if defect > maxd {
                break;
            }
        }
        let report = analyze(ctx, g, bound, opts)?;
        if report.work_limited {
            work_limited = true;
            break;
        }
        match report.conclusion {
            Conclusion::Impossible => {
                steps.push(BoundStep {
                    n: bound,
                    tag: "splitting analysis".into(),
                    detail: summarize_analysis(&report),
                });
                bound -= 1;
            }
            Conclusion::Undecided => break,
        }
    }
    Ok(BoundReport {
        q: ctx.q,
        g,
        ws_bound: ws,
        bound,
        steps,
        work_limited,
    })
}

/// Upper bound on `N_q(g)` from closed-form criteria plus baseline-rule
/// shape analysis at small defect (at most 6), starting from the best
/// previously published bound.  Each excluded value of `N` is recorded
/// with the criterion that excluded it.
pub fn general_bound(
    ctx: &FieldParams,
    g: usize,
    bounds: &BoundsTable,
    work_limit: u64,
) -> Result<BoundReport> {
    let opts = AnalyzeOptions {
        ruleset: RuleSet::Paper,
        route: Route::Table,
        work_limit,
        bounds: bounds.clone(),
    };
    descend(ctx, g, &opts, Some(6))
}

/// Best provable upper bound on `N_q(g)`: like [`general_bound`], but
/// with no defect cap on the full analyses, and honoring the configured
/// rule set and route.
pub fn table_bound(ctx: &FieldParams, g: usize, opts: &AnalyzeOptions) -> Result<BoundReport> {
    descend(ctx, g, opts, None)
}

/// Render a bound descent as text.
pub fn render_bound_text(report: &BoundReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "q = {}, g = {}: Weil-Serre bound {}\n",
        report.q, report.g, report.ws_bound
    ));
    for s in &report.steps {
        if s.n == report.ws_bound && s.tag == "known bound" {
            out.push_str(&format!("start at {}: {} ({})\n", s.n, s.tag, s.detail));
        } else if s.tag == "known bound" {
            out.push_str(&format!("start at {}: {}\n", s.n, s.detail));
        } else {
            out.push_str(&format!("N = {} excluded: {} ({})\n", s.n, s.tag, s.detail));
        }
    }
    if report.work_limited {
        out.push_str("descent stopped early: work limit exceeded\n");
    }
    out.push_str(&format!("upper bound: N <= {}\n", report.bound));
    out
}
