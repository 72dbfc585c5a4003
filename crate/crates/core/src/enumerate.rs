//! Enumeration of candidate real Weil polynomials.
//!
//! Everything here runs in the shifted variable `z = x + m + 1`
//! (`m = floor(2*sqrt(q))`): a monic `h` whose roots lie in
//! `[-2*sqrt(q), m]` becomes a totally positive polynomial `H`, and the
//! defect of `h` (the gap between `q + 1 + mg` and its point count)
//! equals the *deficiency* `trace(H) - deg(H)` of `H`.  Deficiency is
//! additive over factors and at least `deg/2` for every irreducible
//! except `z - 1`, so candidates can be enumerated either by assembling
//! small-deficiency table entries or by a direct coefficient search at
//! fixed trace; the two routes produce identical sets.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{
    fastchain, is_totally_real_coeffs, roots_admissible, roots_admissible_coeffs, IntPoly,
};
use crate::isogeny::{defect0, honda_tate_exponent, Exponent};
use crate::weil::{self, FieldParams};

/// Shared work limit for potentially explosive searches.  Each
/// enumeration node consumes one unit; exceeding the cap aborts with
/// `Error::WorkLimitExceeded` so callers can report a partial result.
pub struct WorkBudget {
    cap: u64,
    used: AtomicU64,
}

impl WorkBudget {
    pub fn new(cap: u64) -> WorkBudget {
        WorkBudget { cap, used: AtomicU64::new(0) }
    }

    pub fn unlimited() -> WorkBudget {
        WorkBudget::new(u64::MAX)
    }

    pub fn tick(&self, n: u64) -> Result<()> {
        let before = self.used.fetch_add(n, Ordering::Relaxed);
        if before.saturating_add(n) > self.cap {
            Err(Error::WorkLimitExceeded(format!(
                "enumeration exceeded {} nodes",
                self.cap
            )))
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }
}

impl Default for WorkBudget {
    /// Generous default for interactive use.
    fn default() -> WorkBudget {
        WorkBudget::new(200_000_000)
    }
}

/// Sort key shared by every factor listing: degree first, then the
/// coefficient vector from the constant term up.
pub fn poly_sort_key(p: &IntPoly) -> (usize, Vec<BigInt>) {
    (p.deg(), p.coeffs().to_vec())
}

// ---------------------------------------------------------------------------
// Totally positive polynomials of minimal trace (the deficiency table)
// ---------------------------------------------------------------------------

/// An irreducible monic integer polynomial with all roots real and
/// positive, recorded with its deficiency `trace - degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableEntry {
    pub deficiency: u32,
    pub poly: IntPoly,
}

static TABLE_CACHE: Lazy<Mutex<BTreeMap<(u32, usize), Vec<TableEntry>>>> =
    Lazy::new(|| Mutex::new(BTreeMap::new()));

/// Cache of raw search results, one cell per `(degree, deficiency)`:
/// every monic totally positive integer polynomial of that degree and
/// trace `degree + deficiency`, reducible ones included.
static CELL_CACHE: Lazy<Mutex<BTreeMap<(usize, u32), Vec<IntPoly>>>> =
    Lazy::new(|| Mutex::new(BTreeMap::new()));

/// Precomputed cells shipped with the crate.  High-degree cells are
/// expensive to search (minutes to hours), so they are generated once
/// and embedded; `totally_positive_cell` falls back to the live search
/// for anything not recorded here.
static EMBEDDED_CELLS: Lazy<BTreeMap<(usize, u32), Vec<IntPoly>>> = Lazy::new(|| {
    parse_cells(include_str!("data/totally_positive_cells.csv"))
        .expect("embedded cell data must parse")
});

/// Parse the cell file format: `cell;<deg>;<def>;<count>` headers, each
/// followed by `count` comma-separated coefficient lines (constant term
/// first).  Empty cells are recorded with `count` zero.
pub fn parse_cells(text: &str) -> Result<BTreeMap<(usize, u32), Vec<IntPoly>>> {
    let mut out = BTreeMap::new();
    let mut lines = text.lines();
    while let Some(line) = lines.next() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(';');
        let (tag, deg, def, count) =
            match (parts.next(), parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
                _ => return Err(Error::invalid(format!("malformed cell header: {line}"))),
            };
        if tag != "cell" {
            return Err(Error::invalid(format!("expected cell header, got: {line}")));
        }
        let deg: usize = deg
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad degree in: {line}")))?;
        let def: u32 = def
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad deficiency in: {line}")))?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad count in: {line}")))?;
        let mut polys = Vec::with_capacity(count);
        for _ in 0..count {
            let coeffs = lines
                .next()
                .ok_or_else(|| Error::invalid("truncated cell data"))?;
            let poly = weil::parse_poly(coeffs.trim())?;
            if poly.deg() != deg {
                return Err(Error::invalid(format!("degree mismatch in cell {deg};{def}")));
            }
            polys.push(poly);
        }
        out.insert((deg, def), polys);
    }
    Ok(out)
}

/// Render cells in the format read by [`parse_cells`].
pub fn write_cells(cells: &BTreeMap<(usize, u32), Vec<IntPoly>>) -> String {
    let mut out = String::new();
    out.push_str("# totally positive polynomials by (degree, deficiency) cell, format v1\n");
    out.push_str("# Each cell lists every monic totally positive integer polynomial of the\n");
    out.push_str("# given degree with trace = degree + deficiency (reducible ones\n");
    out.push_str("# included), as found by the exhaustive coefficient search.  Cells\n");
    out.push_str("# recorded here are trusted at load time; missing cells are recomputed\n");
    out.push_str("# on demand.  Regenerate with the `regen_cells` test in\n");
    out.push_str("# crates/core/tests/gen_cells.rs.\n");
    for (&(deg, def), polys) in cells {
        out.push_str(&format!("cell;{deg};{def};{}\n", polys.len()));
        for p in polys {
            let coeffs: Vec<String> = p.coeffs().iter().map(|c| c.to_string()).collect();
            out.push_str(&coeffs.join(","));
            out.push('\n');
        }
    }
    out
}

/// All irreducible totally positive monic integer polynomials with
/// deficiency at most `max_def`.  Apart from `z - 1` (deficiency 0),
/// every such polynomial has degree at most twice its deficiency, so
/// the table is finite.
pub fn deficiency_table(max_def: u32) -> Vec<TableEntry> {
    deficiency_table_budgeted(max_def, 2 * max_def as usize, &WorkBudget::unlimited())
        .expect("unlimited budget")
}

/// Search a single cell from scratch, ignoring caches.  Public so the
/// cell-data generator and verification tests can call it directly.
pub fn compute_cell(d: usize, def: u32, budget: &WorkBudget) -> Result<Vec<IntPoly>> {
    let trace = d as i64 + def as i64;
    dfs_totally_positive(d, trace, None, &totally_positive_check, budget)
}

/// The set of `(degree, deficiency)` cells recorded in the embedded
/// data file.
pub fn embedded_cell_keys() -> Vec<(usize, u32)> {
    EMBEDDED_CELLS.keys().copied().collect()
}

fn totally_positive_cell(d: usize, def: u32, budget: &WorkBudget) -> Result<Vec<IntPoly>> {
    if let Some(hit) = EMBEDDED_CELLS.get(&(d, def)) {
        return Ok(hit.clone());
    }
    if let Some(hit) = CELL_CACHE.lock().unwrap().get(&(d, def)) {
        return Ok(hit.clone());
    }
    let found = compute_cell(d, def, budget)?;
    CELL_CACHE
        .lock()
        .unwrap()
        .insert((d, def), found.clone());
    Ok(found)
}

/// Same table restricted to degrees `<= max_deg`, with unlimited work.
pub fn deficiency_table_capped(max_def: u32, max_deg: usize) -> Vec<TableEntry> {
    deficiency_table_budgeted(max_def, max_deg, &WorkBudget::unlimited())
        .expect("unlimited budget")
}

/// Same table restricted to degrees `<= max_deg`; cell searches beyond
/// the embedded data draw on `budget` and abort with
/// `Error::WorkLimitExceeded` when it runs out.
pub fn deficiency_table_budgeted(
    max_def: u32,
    max_deg: usize,
    budget: &WorkBudget,
) -> Result<Vec<TableEntry>> {
    let max_deg = max_deg.min(2 * max_def as usize).max(1);
    if let Some(hit) = TABLE_CACHE.lock().unwrap().get(&(max_def, max_deg)) {
        return Ok(hit.clone());
    }
    let mut entries: Vec<TableEntry> = Vec::new();
    for d in 1..=max_deg {
        let min_def = if d == 1 { 0 } else { d.div_ceil(2) as u32 };
        // Trace floor: a totally positive algebraic integer of degree
        // `d >= 2` other than conjugates of small exceptions has trace
        // at least `1.7836 d`, so irreducible entries of degree `d`
        // need deficiency >= ceil(1.7836 d) - d.  Cells below that
        // floor consist entirely of products of lower-degree entries
        // (verified exhaustively for d <= 10 by the embedded cells),
        // so the table can skip generating them.
        let min_def = if d >= 8 {
            min_def.max((trace_floor(d) - d as i64) as u32)
        } else {
            min_def
        };
        for def in min_def..=max_def {
            for h in totally_positive_cell(d, def, budget)? {
                let reducible = entries
                    .iter()
                    .any(|e| e.poly.deg() < d && divides(&e.poly, &h));
                if !reducible {
                    entries.push(TableEntry { deficiency: def, poly: h });
                }
            }
        }
    }
    entries.sort_by(|a, b| {
        (a.deficiency, poly_sort_key(&a.poly)).cmp(&(b.deficiency, poly_sort_key(&b.poly)))
    });
    TABLE_CACHE
        .lock()
        .unwrap()
        .insert((max_def, max_deg), entries.clone());
    Ok(entries)
}

fn divides(d: &IntPoly, f: &IntPoly) -> bool {
    f.div_exact(d).is_some()
}

/// Minimum trace of a totally positive algebraic integer of degree
/// `d >= 8`: the absolute-trace lower bound `1.7836836` (whose finitely
/// many exceptions all have degree below 5) rounded up.
fn trace_floor(d: usize) -> i64 {
    let n = 17_836_836i64 * d as i64;
    n / 10_000_000 + 1
}

/// Stage filter for the deficiency-table search.  Every stage
/// polynomial has strictly alternating coefficient signs (all the
/// `e_j` are at least `1`), so it cannot vanish on `(-inf, 0]`; being
/// totally real therefore already means totally positive.
fn totally_positive_check(_stage: usize, poly: &[i128]) -> bool {
    is_totally_real_coeffs(poly)
}

/// Serialize a deficiency table: one `deficiency;degree;coefficients`
/// line per entry, coefficients constant-first.
pub fn write_table(entries: &[TableEntry], max_def: u32) -> String {
    let mut out = String::new();
    out.push_str("# trace-minimal totally positive polynomials, format v1\n");
    out.push_str(&format!("# max-deficiency: {max_def}\n"));
    for e in entries {
        let coeffs: Vec<String> = e.poly.coeffs().iter().map(|c| c.to_string()).collect();
        out.push_str(&format!(
            "{};{};{}\n",
            e.deficiency,
            e.poly.deg(),
            coeffs.join(",")
        ));
    }
    out
}

/// Parse a table produced by [`write_table`]; returns the declared
/// maximum deficiency together with the entries.
pub fn read_table(text: &str) -> Result<(u32, Vec<TableEntry>)> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::invalid("empty table file"))?;
    if !header.contains("format v1") {
        return Err(Error::invalid("unrecognized table format"));
    }
    let decl = lines
        .next()
        .ok_or_else(|| Error::invalid("missing max-deficiency line"))?;
    let max_def: u32 = decl
        .rsplit(':')
        .next()
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::invalid("malformed max-deficiency line"))?;
    let mut entries = Vec::new();
    for line in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(';');
        let (def, deg, coeffs) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(Error::invalid(format!("malformed table line: {line}"))),
        };
        let def: u32 = def
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad deficiency in: {line}")))?;
        let deg: usize = deg
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad degree in: {line}")))?;
        let poly = weil::parse_poly(coeffs)?;
        if poly.deg() != deg {
            return Err(Error::invalid(format!("degree mismatch in: {line}")));
        }
        if def > max_def {
            return Err(Error::invalid(format!("deficiency above declared max: {line}")));
        }
        entries.push(TableEntry { deficiency: def, poly });
    }
    Ok((max_def, entries))
}

// ---------------------------------------------------------------------------
// Coefficient search at fixed trace
// ---------------------------------------------------------------------------

fn binom(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k.min(n - k) {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn binom_i128(n: usize, k: usize) -> Option<i128> {
    if k > n {
        return Some(0);
    }
    let mut acc: i128 = 1;
    for i in 0..k.min(n - k) {
        acc = acc.checked_mul((n - i) as i128)? / (i + 1) as i128;
    }
    Some(acc)
}

/// Stage polynomial: the `(d - k)`-th derivative of the partial
/// polynomial determined by `e[0..=k]`, scaled down by `(d - k)!`.
/// Its coefficient of `z^(k-j)` is `(-1)^j e_j C(d - j, d - k)`.
fn stage_poly(d: usize, evec: &[i64]) -> Result<Vec<i128>> {
    let k = evec.len() - 1;
    let mut coeffs = vec![0i128; k + 1];
    for (j, &e) in evec.iter().enumerate() {
        let c = binom_i128(d - j, d - k)
            .and_then(|b| b.checked_mul(e as i128))
            .and_then(|v| if j % 2 == 1 { v.checked_neg() } else { Some(v) })
            .ok_or_else(|| {
                Error::WorkLimitExceeded("stage polynomial coefficient overflow".into())
            })?;
        coeffs[k - j] = c;
    }
    Ok(coeffs)
}

fn intpoly_from_i128(c: &[i128]) -> IntPoly {
    IntPoly::new(c.iter().map(|&a| BigInt::from(a)).collect())
}

/// Evaluate a polynomial with ascending `f64` coefficients at `x`.
fn horner_f64(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Float image of exact stage-polynomial coefficients.
fn coeffs_f64(coeffs: &[i128]) -> Vec<f64> {
    coeffs.iter().map(|&c| c as f64).collect()
}

/// Bracketed roots of the current stage polynomial, for use as the
/// critical points of the next stage (`f_k' = (d-k+1) f_{k-1}`).  The
/// roots interlace the parent's critical points `crit`, so each lies in
/// one of the intervals cut out by `crit` inside `[lo, hi]`; bisection
/// pins each to float accuracy.  Where float noise hides a sign change
/// (a near-double root at an interval end) the closer endpoint is kept:
/// the estimates only steer the search window, which is padded and then
/// corrected by exact checks.
fn refine_roots(coeffs: &[f64], crit: &[f64], lo: f64, hi: f64) -> Option<Vec<f64>> {
    let k = coeffs.len() - 1;
    let mut pts = Vec::with_capacity(k + 1);
    pts.push(lo);
    pts.extend_from_slice(crit);
    pts.push(hi);
    let mut roots = Vec::with_capacity(k);
    for w in pts.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (fa, fb) = (horner_f64(coeffs, a), horner_f64(coeffs, b));
        if !fa.is_finite() || !fb.is_finite() {
            return None;
        }
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa.signum() == fb.signum() {
            roots.push(if fa.abs() <= fb.abs() { a } else { b });
            continue;
        }
        let neg_at_a = fa < 0.0;
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = horner_f64(coeffs, m);
            if (fm < 0.0) == neg_at_a {
                a = m;
            } else {
                b = m;
            }
        }
        roots.push(0.5 * (a + b));
    }
    Some(roots)
}

/// Estimated range of `e_k` keeping every root of the stage polynomial
/// real (and inside the window, when one is given), derived from the
/// parent's roots `crit`, which are the critical points of this stage.
/// Writing the stage polynomial as `base(z) + s` with `s = (-1)^k e_k`
/// (only the constant term depends on `e_k`), all roots are real in
/// `[lam, up]` iff the sign of `base + s` alternates along the critical
/// points and has the right sign at the endpoints; every condition is
/// linear in `s`, so the valid set is an interval.  Float evaluation is
/// padded well beyond its error; exact checks decide membership.
fn critical_range(
    base: &[f64],
    k: usize,
    crit: &[f64],
    win: Option<(f64, f64)>,
) -> Option<(i64, i64)> {
    let mut s_lo = f64::NEG_INFINITY;
    let mut s_hi = f64::INFINITY;
    let mut vmax = 0.0f64;
    let mut meet = |v: f64, lower: bool, s_lo: &mut f64, s_hi: &mut f64| -> bool {
        if !v.is_finite() {
            return false;
        }
        vmax = vmax.max(v.abs());
        if lower {
            *s_lo = s_lo.max(-v);
        } else {
            *s_hi = s_hi.min(-v);
        }
        true
    };
    for (i, &th) in crit.iter().enumerate() {
        // Sign condition at the i-th critical point (1-based from the
        // left): (-1)^(k-i) f(theta_i) >= 0.
        let lower = (k - (i + 1)) % 2 == 0;
        if !meet(horner_f64(base, th), lower, &mut s_lo, &mut s_hi) {
            return None;
        }
    }
    if let Some((lam, up)) = win {
        // All roots <= up: f(up) >= 0; all roots >= lam:
        // (-1)^k f(lam) >= 0.
        if !meet(horner_f64(base, up), true, &mut s_lo, &mut s_hi) {
            return None;
        }
        if !meet(horner_f64(base, lam), k % 2 == 0, &mut s_lo, &mut s_hi) {
            return None;
        }
    }
    let (e_lo, e_hi) = if k % 2 == 0 {
        (s_lo, s_hi)
    } else {
        (-s_hi, -s_lo)
    };
    let pad = 2.0 + 1e-12 * vmax;
    let lo = if e_lo == f64::NEG_INFINITY {
        i64::MIN
    } else {
        ((e_lo - pad).floor()).clamp(i64::MIN as f64, i64::MAX as f64) as i64
    };
    let hi = if e_hi == f64::INFINITY {
        i64::MAX
    } else {
        ((e_hi + pad).ceil()).clamp(i64::MIN as f64, i64::MAX as f64) as i64
    };
    Some((lo, hi))
}

/// Constraint that every root of the polynomial being built lies in
/// `[a - s, a + s]` with `s = sqrt(s2)`.  For the shifted real Weil
/// search `a = m + 1` and `s2 = 4q`, so the window is the image of
/// `[-2 sqrt q, 2 sqrt q]`.  Power sums over `d` roots confined to the
/// window satisfy `(a - s) p_{k-1} <= p_k <= (a + s) p_{k-1}`, which
/// combined with Newton's identities pins each new coefficient to a
/// short range.
#[derive(Clone, Copy, Debug)]
pub struct RootWindow {
    /// Centre of the window (an integer shift).
    pub a: i64,
    /// Square of the half-width.
    pub s2: i128,
    /// When enumerating candidates for a curve over `F_q` of genus `g`,
    /// the pair `(q, g)`: each prefix then pins the extension point
    /// counts `N_1..N_k` exactly, and `N_k` must stay inside the
    /// Weil-Serre range with a non-negative degree-`k` place count.
    /// This is by far the strongest prune when the defect is large.
    pub curve: Option<(i128, usize)>,
}

/// Enumerate all monic degree-`d` integer polynomials with positive
/// real roots and fixed trace `e1`, pruned by Maclaurin and Newton
/// inequalities, power-sum bounds, and a per-stage test on derivative
/// polynomials (`check(stage, poly)`; roots of derivatives interlace,
/// so any test that is inherited by derivatives is a sound filter).
/// Polynomials are returned in the shifted (totally positive) variable.
fn dfs_totally_positive<C>(
    d: usize,
    e1: i64,
    window: Option<&RootWindow>,
    check: &C,
    budget: &WorkBudget,
) -> Result<Vec<IntPoly>>
where
    C: Fn(usize, &[i128]) -> bool + Sync,
{
    if e1 < d as i64 {
        return Ok(Vec::new()); // trace >= degree for totally positive
    }
    let evec = vec![1i64, e1];
    let pvec = vec![d as i128, e1 as i128];
    if d == 1 {
        let h = stage_poly(d, &evec)?;
        return Ok(if check(1, &h) {
            vec![intpoly_from_i128(&h)]
        } else {
            Vec::new()
        });
    }
    if !check(1, &stage_poly(d, &evec)?) {
        return Ok(Vec::new());
    }
    let (lo, hi) = stage_range(d, 2, &evec, &pvec, window)?;
    let t2 = newton_partial(&evec, &pvec);
    let range: Vec<i64> = (lo..=hi).collect();
    let chunks: Result<Vec<Vec<IntPoly>>> = range
        .into_par_iter()
        .map(|e2| {
            budget.tick(1)?;
            let mut evec = evec.clone();
            evec.push(e2);
            let poly = stage_poly(d, &evec)?;
            let mut found = Vec::new();
            if check(2, &poly) {
                if d == 2 {
                    found.push(intpoly_from_i128(&poly));
                } else {
                    let mut pvec = pvec.clone();
                    if let Some(p2) = t2.and_then(|t| next_power_sum(t, 2, e2)) {
                        pvec.push(p2);
                    }
                    let (lo_b, hi_b) = root_span(&evec, window);
                    let crit = refine_roots(
                        &coeffs_f64(&poly),
                        &[e1 as f64 / d as f64],
                        lo_b,
                        hi_b,
                    );
                    dfs_stage(
                        d,
                        &mut evec,
                        &mut pvec,
                        crit.as_deref().unwrap_or(&[]),
                        window,
                        check,
                        budget,
                        &mut found,
                    )?;
                }
            }
            Ok(found)
        })
        .collect();
    let mut out: Vec<IntPoly> = chunks?.into_iter().flatten().collect();
    out.sort_by_key(poly_sort_key);
    Ok(out)
}

#[doc(hidden)]
pub static STAGE_SCANNED: Lazy<Vec<AtomicU64>> =
    Lazy::new(|| (0..32).map(|_| AtomicU64::new(0)).collect());
#[doc(hidden)]
pub static STAGE_VALID: Lazy<Vec<AtomicU64>> =
    Lazy::new(|| (0..32).map(|_| AtomicU64::new(0)).collect());

fn dfs_stage<C>(
    d: usize,
    evec: &mut Vec<i64>,
    pvec: &mut Vec<i128>,
    crit: &[f64],
    window: Option<&RootWindow>,
    check: &C,
    budget: &WorkBudget,
    out: &mut Vec<IntPoly>,
) -> Result<()>
where
    C: Fn(usize, &[i128]) -> bool + Sync,
{
    let k = evec.len(); // index of the coefficient chosen at this stage
    let (full_lo, full_hi) = stage_range(d, k, evec, pvec, window)?;
    let t = if pvec.len() == k {
        newton_partial(evec, pvec)
    } else {
        None
    };
    // Narrow the scan to the float estimate of the valid interval when
    // the parent's roots (this stage's critical points) are available.
    // Exact checks still decide membership, and valid runs reaching a
    // narrowed edge are pursued past it below, so the estimate can only
    // skip work, not change the result.
    let (mut lo, mut hi) = (full_lo, full_hi);
    if crit.len() + 1 == k {
        evec.push(0);
        let base = stage_poly(d, evec)?;
        evec.pop();
        if let Some((elo, ehi)) = critical_range(&coeffs_f64(&base), k, crit, win_f64(window)) {
            lo = lo.max(elo);
            hi = hi.min(ehi);
        }
    }
    let mut seen_valid = false;
    let mut first_valid = false;
    let mut closed = false;
    for e in lo..=hi {
        let ok = scan_step(d, k, e, t, evec, pvec, crit, window, check, budget, out)?;
        if ok {
            if e == lo {
                first_valid = true;
            }
            seen_valid = true;
        } else if seen_valid {
            // Only the constant term varies at this stage, and the set
            // of constants giving all-real roots inside the window is
            // an interval, so the first failure after a success closes
            // the range.
            closed = true;
            break;
        }
    }
    if seen_valid && !closed && hi < full_hi {
        // The last narrowed value was still valid: the interval
        // continues above the estimate.
        let mut e = hi + 1;
        while e <= full_hi && scan_step(d, k, e, t, evec, pvec, crit, window, check, budget, out)? {
            e += 1;
        }
    }
    if first_valid && lo > full_lo {
        // The first narrowed value was already valid: the interval may
        // continue below the estimate.
        let mut e = lo - 1;
        while e >= full_lo && scan_step(d, k, e, t, evec, pvec, crit, window, check, budget, out)? {
            e -= 1;
        }
    }
    Ok(())
}

/// Probe a single `e_k` value inside `dfs_stage`: run the exact stage
/// check and recurse on success.  Returns whether the value was valid.
#[allow(clippy::too_many_arguments)]
fn scan_step<C>(
    d: usize,
    k: usize,
    e: i64,
    t: Option<i128>,
    evec: &mut Vec<i64>,
    pvec: &mut Vec<i128>,
    crit: &[f64],
    window: Option<&RootWindow>,
    check: &C,
    budget: &WorkBudget,
    out: &mut Vec<IntPoly>,
) -> Result<bool>
where
    C: Fn(usize, &[i128]) -> bool + Sync,
{
    budget.tick(1)?;
    STAGE_SCANNED[k].fetch_add(1, Ordering::Relaxed);
    evec.push(e);
    let poly = stage_poly(d, evec)?;
    let ok = check(k, &poly);
    if ok {
        STAGE_VALID[k].fetch_add(1, Ordering::Relaxed);
        if k == d {
            out.push(intpoly_from_i128(&poly));
        } else {
            let pushed = match t.and_then(|t| next_power_sum(t, k, e)) {
                Some(p) => {
                    pvec.push(p);
                    true
                }
                None => false,
            };
            let child = if crit.len() + 1 == k {
                let (lo_b, hi_b) = root_span(evec, window);
                refine_roots(&coeffs_f64(&poly), crit, lo_b, hi_b)
            } else {
                None
            };
            dfs_stage(
                d,
                evec,
                pvec,
                child.as_deref().unwrap_or(&[]),
                window,
                check,
                budget,
                out,
            )?;
            if pushed {
                pvec.pop();
            }
        }
    }
    evec.pop();
    Ok(ok)
}

/// Window endpoints as floats, when a window is present.
fn win_f64(window: Option<&RootWindow>) -> Option<(f64, f64)> {
    window.map(|w| {
        let s = (w.s2 as f64).sqrt();
        (w.a as f64 - s, w.a as f64 + s)
    })
}

/// Outer bracket for all roots of the polynomial being built: the
/// window when one is given, else `(0, trace + 1)` (the roots are
/// positive and each is below their sum).
fn root_span(evec: &[i64], window: Option<&RootWindow>) -> (f64, f64) {
    win_f64(window).unwrap_or((0.0, evec[1] as f64 + 1.0))
}

/// Valid range for `e_k` given `e_1 .. e_{k-1}`, intersecting two
/// families of bounds:
/// * classic: lower `C(d,k)` (Maclaurin against `e_d >= 1`); upper
///   `C(d,k) (e_1/d)^k` (Maclaurin against the trace) and
///   `e_{k-1}^2 C(d,k) C(d,k-2) / (C(d,k-1)^2 e_{k-2})` (Newton);
/// * power sums: Newton's identity gives `p_k = T + k e_k` (`k` odd)
///   or `T - k e_k` (`k` even) with `T` fixed by the prefix, while
///   `p_k` itself is pinned below by Cauchy-Schwarz
///   (`p_{k-1}^2 <= p_k p_{k-2}`) and on both sides by the root window.
fn stage_range(
    d: usize,
    k: usize,
    evec: &[i64],
    pvec: &[i128],
    window: Option<&RootWindow>,
) -> Result<(i64, i64)> {
    let (mut lo, mut hi) = classic_stage_range(d, k, evec)?;
    if pvec.len() == k {
        if let (Some(t), Some((p_lo, p_hi))) =
            (newton_partial(evec, pvec), power_sum_bounds(pvec, window))
        {
            let ki = k as i128;
            let (w_lo, w_hi) = if k % 2 == 1 {
                (
                    p_lo.checked_sub(t).map(|v| div_ceil_i128(v, ki)),
                    p_hi.and_then(|ph| ph.checked_sub(t))
                        .map(|v| div_floor_i128(v, ki)),
                )
            } else {
                (
                    p_hi.and_then(|ph| t.checked_sub(ph))
                        .map(|v| div_ceil_i128(v, ki)),
                    t.checked_sub(p_lo).map(|v| div_floor_i128(v, ki)),
                )
            };
            if let Some(v) = w_lo {
                lo = lo.max(v.clamp(i64::MIN as i128, i64::MAX as i128) as i64);
            }
            if let Some(v) = w_hi {
                hi = hi.min(v.clamp(i64::MIN as i128, i64::MAX as i128) as i64);
            }
        }
    }
    Ok((lo, hi))
}

/// `T = sum_{j=1}^{k-1} (-1)^(j-1) e_j p_{k-j}`: the part of Newton's
/// identity for `p_k` that is already determined before `e_k` is
/// chosen (`p_k = T + (-1)^(k-1) k e_k`).
fn newton_partial(evec: &[i64], pvec: &[i128]) -> Option<i128> {
    let k = pvec.len();
    let mut t: i128 = 0;
    for j in 1..k {
        let term = (evec[j] as i128).checked_mul(pvec[k - j])?;
        t = if j % 2 == 1 {
            t.checked_add(term)?
        } else {
            t.checked_sub(term)?
        };
    }
    Some(t)
}

/// The power sum `p_k` once `e_k` is chosen, completing Newton's
/// identity from the prefix term `T`.
fn next_power_sum(t: i128, k: usize, e: i64) -> Option<i128> {
    let ke = (k as i128).checked_mul(e as i128)?;
    if k % 2 == 1 {
        t.checked_add(ke)
    } else {
        t.checked_sub(ke)
    }
}

/// Bounds `(p_lo, p_hi)` on the next power sum `p_k` given
/// `pvec = [p_0 .. p_{k-1}]`.  The lower bound is Cauchy-Schwarz
/// (`p_{k-1}^2 / p_{k-2}`, rounded up), sharpened by the window's left
/// edge; the upper bound (when a window is present) is the right edge:
/// `p_k <= (a + s) p_{k-1}`.  `None` entries mean "no usable bound".
fn power_sum_bounds(pvec: &[i128], window: Option<&RootWindow>) -> Option<(i128, Option<i128>)> {
    let k = pvec.len();
    if k < 2 {
        return None;
    }
    let prev = pvec[k - 1];
    let prev2 = pvec[k - 2];
    if prev <= 0 || prev2 <= 0 {
        return None;
    }
    let mut p_lo = match prev.checked_mul(prev) {
        Some(sq) => div_ceil_i128(sq, prev2),
        None => {
            let sq = BigInt::from(prev) * BigInt::from(prev);
            let ceilq = (sq + BigInt::from(prev2 - 1)) / BigInt::from(prev2);
            ceilq.to_i128().unwrap_or(i128::MAX)
        }
    };
    let mut p_hi = None;
    if let Some(w) = window {
        let root = floor_mul_sqrt(prev, w.s2);
        if let Some(ap) = (w.a as i128).checked_mul(prev) {
            // floor((a+s) p) = a p + floor(s p); ceil((a-s) p) = a p - floor(s p)
            p_hi = ap.checked_add(root);
            if let Some(low) = ap.checked_sub(root) {
                p_lo = p_lo.max(low);
            }
        }
        if let Some((q, g)) = w.curve {
            if let Some((c_lo, c_hi)) = curve_power_window(pvec, w.a as i128, q, g) {
                p_lo = p_lo.max(c_lo);
                p_hi = Some(match p_hi {
                    Some(h) => h.min(c_hi),
                    None => c_hi,
                });
            }
        }
    }
    Some((p_lo, p_hi))
}

/// `(-a)^e` with overflow checking.
fn neg_pow(a: i128, e: usize) -> Option<i128> {
    let p = a.checked_pow(u32::try_from(e).ok()?)?;
    if e % 2 == 1 {
        p.checked_neg()
    } else {
        Some(p)
    }
}

/// Coefficient of `x^(j-2i)` in the polynomial `V_j` satisfying
/// `alpha^j + (q/alpha)^j = V_j(alpha + q/alpha)` (a Dickson
/// polynomial): `(-q)^i (C(j-i,i) + C(j-i-1,i-1))`.
fn v_coeff(j: usize, i: usize, q: i128) -> Option<i128> {
    let c = binom_i128(j - i, i)?.checked_add(binom_i128(j - i - 1, i - 1)?)?;
    let v = c.checked_mul(q.checked_pow(u32::try_from(i).ok()?)?)?;
    if i % 2 == 1 {
        v.checked_neg()
    } else {
        Some(v)
    }
}

/// `sum_i alpha_i^j + (q/alpha_i)^j` from the shifted power sums
/// `s[t] = sum_i x_i^t` (where `x = alpha + q/alpha`).
fn frobenius_sum(j: usize, s: &[i128], q: i128) -> Option<i128> {
    let mut acc = s[j];
    for i in 1..=(j / 2) {
        acc = acc.checked_add(v_coeff(j, i, q)?.checked_mul(s[j - 2 * i])?)?;
    }
    Some(acc)
}

/// Bounds on the next power sum `p_k` (of the shifted polynomial,
/// `pvec = [p_0 .. p_{k-1}]`) coming from curve arithmetic over `F_q`:
/// with the prefix fixed, the extension point count `N_k` is
/// `q^k + 1 - kk - p_k` for a constant `kk`, and a curve needs
/// `|N_k - q^k - 1| <= g * floor(2 sqrt(q^k))` (Weil-Serre over the
/// degree-`k` extension) as well as a non-negative count of degree-`k`
/// places (`sum over d dividing k of mu(k/d) N_d >= 0`).  `None` means
/// the arithmetic overflowed and no bound is claimed.
fn curve_power_window(pvec: &[i128], a: i128, q: i128, g: usize) -> Option<(i128, i128)> {
    let k = pvec.len();
    if k < 2 {
        return None;
    }
    // Shifted power sums s_j = sum x_i^j (x = z - a) for j < k; for
    // j = k, the part not involving p_k.
    let mut s = vec![0i128; k + 1];
    for (j, out) in s.iter_mut().enumerate() {
        let top = j.min(k - 1);
        let mut acc: i128 = 0;
        for (t, &p) in pvec.iter().enumerate().take(top + 1) {
            let term = binom_i128(j, t)?
                .checked_mul(neg_pow(a, j - t)?)?
                .checked_mul(p)?;
            acc = acc.checked_add(term)?;
        }
        *out = acc;
    }
    let mut qpow = vec![1i128; k + 1];
    for j in 1..=k {
        qpow[j] = qpow[j - 1].checked_mul(q)?;
    }
    // N_j for j < k (npts[0] unused).
    let mut npts = vec![0i128; k];
    for j in 1..k {
        let c = frobenius_sum(j, &s, q)?;
        npts[j] = qpow[j].checked_add(1)?.checked_sub(c)?;
    }
    // c_k = p_k + kk.
    let kk = frobenius_sum(k, &s, q)?;
    let slack = (g as i128).checked_mul(qpow[k].checked_mul(4)?.sqrt())?;
    let center = qpow[k].checked_add(1)?;
    let mut n_lo = center.checked_sub(slack)?;
    let n_hi = center.checked_add(slack)?;
    // Non-negative degree-k place count: N_k >= -(rest of the Mobius sum).
    let mut rest: i128 = 0;
    for dd in crate::exact::util::divisors(k as u64) {
        let dd = dd as usize;
        if dd == k {
            continue;
        }
        let mu = crate::exact::util::moebius((k / dd) as u64);
        if mu != 0 {
            rest = rest.checked_add((mu as i128).checked_mul(npts[dd])?)?;
        }
    }
    n_lo = n_lo.max(rest.checked_neg()?);
    // p_k = q^k + 1 - kk - N_k, decreasing in N_k.
    let base = center.checked_sub(kk)?;
    Some((base.checked_sub(n_hi)?, base.checked_sub(n_lo)?))
}

/// Largest integer `<= c * sqrt(s2)` for `c, s2 >= 0`.
fn floor_mul_sqrt(c: i128, s2: i128) -> i128 {
    match c.checked_mul(c).and_then(|cc| cc.checked_mul(s2)) {
        Some(prod) => prod.sqrt(),
        None => (BigInt::from(c) * BigInt::from(c) * BigInt::from(s2))
            .sqrt()
            .to_i128()
            .unwrap_or(i128::MAX),
    }
}

fn div_floor_i128(a: i128, b: i128) -> i128 {
    Integer::div_floor(&a, &b)
}

fn div_ceil_i128(a: i128, b: i128) -> i128 {
    Integer::div_ceil(&a, &b)
}

/// Classic per-stage bounds (Maclaurin and Newton inequalities).
fn classic_stage_range(d: usize, k: usize, evec: &[i64]) -> Result<(i64, i64)> {
    if let Some(r) = stage_range_i128(d, k, evec) {
        return r;
    }
    let lo_big = binom(d, k);
    let e1 = BigInt::from(evec[1]);
    let mac = binom(d, k) * e1.pow(k as u32) / BigInt::from(d as i64).pow(k as u32);
    let prev = BigInt::from(evec[k - 1]);
    let newton = &prev * &prev * binom(d, k) * binom(d, k - 2)
        / (binom(d, k - 1).pow(2) * BigInt::from(evec[k - 2]));
    let hi_big = mac.min(newton);
    let lo: i64 = lo_big
        .try_into()
        .map_err(|_| Error::WorkLimitExceeded("coefficient range too large".into()))?;
    let hi: i64 = match hi_big.try_into() {
        Ok(v) => v,
        Err(_) => {
            return Err(Error::WorkLimitExceeded(
                "coefficient range too large".into(),
            ))
        }
    };
    Ok((lo, hi))
}

fn stage_range_i128(d: usize, k: usize, evec: &[i64]) -> Option<Result<(i64, i64)>> {
    let c_k = binom_i128(d, k)?;
    let mac = c_k
        .checked_mul((evec[1] as i128).checked_pow(k as u32)?)?
        .checked_div((d as i128).checked_pow(k as u32)?)?;
    let prev = evec[k - 1] as i128;
    let newton = prev
        .checked_mul(prev)?
        .checked_mul(c_k)?
        .checked_mul(binom_i128(d, k - 2)?)?
        .checked_div(binom_i128(d, k - 1)?.checked_pow(2)?.checked_mul(evec[k - 2] as i128)?)?;
    let hi_big = mac.min(newton);
    let lo = match i64::try_from(c_k) {
        Ok(v) => v,
        Err(_) => {
            return Some(Err(Error::WorkLimitExceeded(
                "coefficient range too large".into(),
            )))
        }
    };
    let hi = match i64::try_from(hi_big) {
        Ok(v) => v,
        Err(_) => {
            return Some(Err(Error::WorkLimitExceeded(
                "coefficient range too large".into(),
            )))
        }
    };
    Some(Ok((lo, hi)))
}

/// All valid real Weil polynomials over `F_q` of degree `g` with the
/// given trace (sum of roots, so the curve point count would be
/// `q + 1 - trace`).  Runs the shifted coefficient search with an
/// admissibility test at every stage.
pub fn enumerate_by_trace(
    ctx: &FieldParams,
    g: usize,
    trace: i64,
    budget: &WorkBudget,
) -> Result<Vec<IntPoly>> {
    if g == 0 {
        return Err(Error::invalid("degree must be at least 1"));
    }
    let defect = (ctx.m as i64) * (g as i64) + trace;
    if defect < 0 {
        return Ok(Vec::new());
    }
    let shift = ctx.m as i64 + 1;
    let q = ctx.q;
    let check = move |_stage: usize, poly: &[i128]| {
        // Shift back to the original variable and ask for roots in
        // [-2 sqrt q, 2 sqrt q]; derivative roots interlace, so every
        // stage of a valid polynomial passes.
        match fastchain::taylor_shift(poly, shift as i128) {
            Some(back) => roots_admissible_coeffs(&back, q),
            None => {
                let p = intpoly_from_i128(poly).shift(&BigInt::from(shift));
                roots_admissible(&p, q)
            }
        }
    };
    let e1 = g as i64 + defect;
    let window = RootWindow {
        a: shift,
        s2: 4 * q as i128,
        curve: Some((q as i128, g)),
    };
    let shifted = dfs_totally_positive(g, e1, Some(&window), &check, budget)?;
    let down = BigInt::from(shift);
    let mut out: Vec<IntPoly> = shifted.iter().map(|h| h.shift(&down)).collect();
    out.sort_by_key(poly_sort_key);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Atoms, minimal polynomials, shapes
// ---------------------------------------------------------------------------

/// An irreducible factor available over `F_q`: a shifted table entry
/// whose roots meet the admissibility bound, with its defect and its
/// minimal multiplicity data.
#[derive(Clone, Debug)]
pub struct Atom {
    pub poly: IntPoly,
    pub defect: u64,
    pub exponent: Exponent,
}

/// Admissible irreducible factors of defect `1..=max_defect` and degree
/// `<= max_deg` over `F_q`, sorted by (degree, coefficients).  The
/// defect-0 factor `x + m` is not listed; callers append it explicitly.
pub fn atoms(
    ctx: &FieldParams,
    max_defect: u64,
    max_deg: usize,
    budget: &WorkBudget,
) -> Result<Vec<Atom>> {
    let table = deficiency_table_budgeted(max_defect as u32, max_deg, budget)?;
    let shift = BigInt::from(ctx.m as i64 + 1);
    let mut out = Vec::new();
    for entry in &table {
        if entry.deficiency == 0 {
            continue;
        }
        let poly = entry.poly.shift(&shift);
        // shift(c) substitutes x + c, which moves roots DOWN by c.
        if !roots_admissible(&poly, ctx.q) {
            continue;
        }
        let exponent = honda_tate_exponent(&poly, ctx)?;
        out.push(Atom {
            poly,
            defect: entry.deficiency as u64,
            exponent,
        });
    }
    out.sort_by_key(|a| poly_sort_key(&a.poly));
    Ok(out)
}

/// A minimal real Weil polynomial: a product of admissible irreducible
/// factors, each with multiplicity a multiple of its exponent, with no
/// `x + m` part.
#[derive(Clone, Debug)]
pub struct MinimalEntry {
    pub factors: Vec<(IntPoly, usize)>,
    pub poly: IntPoly,
    pub defect: u64,
    pub degree: usize,
}

/// All minimal real Weil polynomials over `F_q` of defect at most
/// `max_defect`, including the empty product.  These are exactly the
/// polynomials that occur as the non-extremal part of a real Weil
/// polynomial of some abelian variety with small defect.
pub fn minimal_realweil(ctx: &FieldParams, max_defect: u64) -> Result<Vec<MinimalEntry>> {
    let atom_list = atoms(
        ctx,
        max_defect,
        (2 * max_defect as usize).max(1),
        &WorkBudget::unlimited(),
    )?;
    let mut out = Vec::new();
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    assemble_minimal(&atom_list, 0, max_defect, &mut chosen, &mut out);
    out.sort_by(|a, b| {
        (a.defect, a.degree, poly_sort_key(&a.poly))
            .cmp(&(b.defect, b.degree, poly_sort_key(&b.poly)))
    });
    Ok(out)
}

fn assemble_minimal(
    atom_list: &[Atom],
    idx: usize,
    defect_left: u64,
    chosen: &mut Vec<(usize, usize)>,
    out: &mut Vec<MinimalEntry>,
) {
    if idx == atom_list.len() {
        let factors: Vec<(IntPoly, usize)> = chosen
            .iter()
            .map(|&(i, c)| (atom_list[i].poly.clone(), c))
            .collect();
        let mut poly = IntPoly::one();
        for (f, c) in &factors {
            for _ in 0..*c {
                poly = &poly * f;
            }
        }
        let defect: u64 = chosen
            .iter()
            .map(|&(i, c)| atom_list[i].defect * c as u64)
            .sum();
        let degree = poly.deg();
        out.push(MinimalEntry { factors, poly, defect, degree });
        return;
    }
    let atom = &atom_list[idx];
    // Multiplicities run over multiples of the exponent; an undecided
    // exponent is conservatively treated as 1 so that no shape is
    // silently dropped.
    let step = match atom.exponent {
        Exponent::Known(e) => e as usize,
        Exponent::Unknown => 1,
    };
    let mut c = 0usize;
    loop {
        let used = atom.defect * c as u64;
        if used > defect_left {
            break;
        }
        if c > 0 {
            chosen.push((idx, c));
        }
        assemble_minimal(atom_list, idx + 1, defect_left - used, chosen, out);
        if c > 0 {
            chosen.pop();
        }
        c += step.max(1);
        if atom.defect == 0 {
            break; // defensive: defect-0 atoms are excluded upstream
        }
    }
}

/// Factor shapes of degree-`g` candidates with defect exactly `target`:
/// every product of admissible atoms with total defect `target` and
/// total degree at most `g`, padded with `x + m`.  No exponent
/// filtering happens here; impossible multiplicities are kept so the
/// caller can report them.
fn shapes_with_defect(
    ctx: &FieldParams,
    target: u64,
    g: usize,
    budget: &WorkBudget,
) -> Result<Vec<Vec<(IntPoly, usize)>>> {
    let atom_list = atoms(ctx, target, g.min(2 * target as usize).max(1), budget)?;
    let xm = IntPoly::x_plus(ctx.m as i64);
    let mut out = Vec::new();
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    fn rec(
        atom_list: &[Atom],
        xm: &IntPoly,
        idx: usize,
        defect_left: u64,
        degree_left: usize,
        chosen: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(IntPoly, usize)>>,
    ) {
        if idx == atom_list.len() {
            if defect_left == 0 {
                let mut factors: Vec<(IntPoly, usize)> = chosen
                    .iter()
                    .map(|&(i, c)| (atom_list[i].poly.clone(), c))
                    .collect();
                if degree_left > 0 {
                    factors.push((xm.clone(), degree_left));
                }
                factors.sort_by_key(|(p, _)| poly_sort_key(p));
                out.push(factors);
            }
            return;
        }
        let atom = &atom_list[idx];
        let mut c = 0usize;
        loop {
            let used_def = atom.defect * c as u64;
            let used_deg = atom.poly.deg() * c;
            if used_def > defect_left || used_deg > degree_left {
                break;
            }
            if c > 0 {
                chosen.push((idx, c));
            }
            rec(
                atom_list,
                xm,
                idx + 1,
                defect_left - used_def,
                degree_left - used_deg,
                chosen,
                out,
            );
            if c > 0 {
                chosen.pop();
            }
            c += 1;
        }
    }
    rec(&atom_list, &xm, 0, target, g, &mut chosen, &mut out);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Candidate lists
// ---------------------------------------------------------------------------

/// A candidate real Weil polynomial for a curve with `N` points,
/// annotated with its factorization, place counts `a_1..a_g`, and the
/// reason it fails to be a Weil polynomial, if any.  When the exponent
/// of some factor could not be determined, `exponent_unknown` is set:
/// the candidate may or may not be a genuine Weil polynomial, and any
/// conclusion drawn from the list must treat it as possibly valid.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub poly: IntPoly,
    pub factors: Vec<(IntPoly, usize)>,
    pub place_counts: Vec<BigInt>,
    pub not_weil: Option<String>,
    pub exponent_unknown: bool,
}

/// Which enumeration route to use; `Auto` picks the table route for
/// defect at most 6 and the trace search otherwise.  Both routes must
/// produce the same candidates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Auto,
    Table,
    Trace,
}

/// All candidate real Weil polynomials for a genus-`g` curve over `F_q`
/// with exactly `n` rational points, sorted by their vector of place
/// counts.  Shapes with a negative place count `a_d` (`d <= g`) cannot
/// belong to a curve and are dropped.  Candidates that are not Weil
/// polynomials (an irreducible factor appearing with multiplicity not
/// divisible by its exponent) are kept, with the reason recorded.
pub fn candidates(
    ctx: &FieldParams,
    g: usize,
    n: u64,
    budget: &WorkBudget,
) -> Result<Vec<Candidate>> {
    candidates_via(ctx, g, n, Route::Auto, budget)
}

pub fn candidates_via(
    ctx: &FieldParams,
    g: usize,
    n: u64,
    route: Route,
    budget: &WorkBudget,
) -> Result<Vec<Candidate>> {
    if g == 0 {
        return Err(Error::invalid("genus must be at least 1"));
    }
    let trace = ctx.q as i64 + 1 - n as i64;
    let defect = (ctx.m as i64) * (g as i64) + trace;
    if defect < 0 {
        return Ok(Vec::new());
    }
    let defect = defect as u64;
    let use_table = match route {
        Route::Auto => defect <= 6,
        Route::Table => true,
        Route::Trace => false,
    };
    let factored: Vec<Vec<(IntPoly, usize)>> = if use_table {
        shapes_with_defect(ctx, defect, g, budget)?
    } else {
        let polys = enumerate_by_trace(ctx, g, trace, budget)?;
        let table = deficiency_table_budgeted(
            defect.min(u32::MAX as u64) as u32,
            (g / 2).max(1),
            budget,
        )?;
        polys
            .iter()
            .map(|h| factor_with_table(h, ctx, &table))
            .collect::<Result<Vec<_>>>()?
    };
    let mut exponent_memo: BTreeMap<Vec<BigInt>, Exponent> = BTreeMap::new();
    let mut out = Vec::new();
    for factors in factored {
        let mut poly = IntPoly::one();
        for (f, c) in &factors {
            for _ in 0..*c {
                poly = &poly * f;
            }
        }
        let status = weil::validate(&poly, ctx.q);
        let mut not_weil = if status.is_valid() {
            None
        } else {
            Some(format!("{status:?}"))
        };
        let mut exponent_unknown = false;
        if not_weil.is_none() {
            for (f, c) in &factors {
                let e = if f == &IntPoly::x_plus(ctx.m as i64) {
                    Exponent::Known(defect0(ctx))
                } else {
                    match exponent_memo.get(f.coeffs()) {
                        Some(&e) => e,
                        None => {
                            let e = honda_tate_exponent(f, ctx)?;
                            exponent_memo.insert(f.coeffs().to_vec(), e);
                            e
                        }
                    }
                };
                match e {
                    Exponent::Known(e) => {
                        if e > 1 && c % e as usize != 0 {
                            not_weil = Some(format!(
                                "multiplicity of {f} must be a multiple of {e}"
                            ));
                            break;
                        }
                    }
                    Exponent::Unknown => exponent_unknown = true,
                }
            }
        }
        let place_counts = weil::place_counts(&poly, ctx, g)?;
        if place_counts.iter().any(|a| a.is_negative()) {
            continue;
        }
        if !extension_counts_in_range(&poly, ctx, g)? {
            continue;
        }
        out.push(Candidate {
            poly,
            factors,
            place_counts,
            not_weil,
            exponent_unknown,
        });
    }
    out.sort_by(|a, b| {
        (&a.place_counts, poly_sort_key(&a.poly))
            .cmp(&(&b.place_counts, poly_sort_key(&b.poly)))
    });
    Ok(out)
}

/// True when the extension point counts `N_1..N_g` determined by `h`
/// all lie in the Weil-Serre range
/// `|N_d - q^d - 1| <= g * floor(2*sqrt(q^d))`.  A shape outside the
/// range cannot belong to a curve, so such candidates are dropped.
fn extension_counts_in_range(h: &IntPoly, ctx: &FieldParams, g: usize) -> Result<bool> {
    let counts = weil::extension_point_counts(h, ctx, g)?;
    let mut qd = BigInt::one();
    for nd in &counts {
        qd *= ctx.q;
        let md = (BigInt::from(4u32) * &qd).sqrt();
        let slack = BigInt::from(g as u64) * md;
        if (nd - &qd - BigInt::one()).abs() > slack {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Factor a monic totally real polynomial with admissible roots into
/// irreducibles by trial division against the deficiency table: every
/// irreducible factor has defect at most the total defect and degree at
/// most twice its defect (or is `x + m`), so a table capped at half the
/// degree finds all proper factors and certifies the remainder
/// irreducible.
pub fn factor_totally_real(h: &IntPoly, ctx: &FieldParams) -> Result<Vec<(IntPoly, usize)>> {
    let defect = weil::defect(h, ctx);
    if defect.is_negative() {
        return Err(Error::invalid("polynomial has negative defect"));
    }
    let defect: u64 = defect
        .try_into()
        .map_err(|_| Error::invalid("defect out of range"))?;
    let table = deficiency_table_capped(
        defect.min(u32::MAX as u64) as u32,
        (h.deg() / 2).max(1),
    );
    factor_with_table(h, ctx, &table)
}

fn factor_with_table(
    h: &IntPoly,
    ctx: &FieldParams,
    table: &[TableEntry],
) -> Result<Vec<(IntPoly, usize)>> {
    if h.deg() == 0 {
        return Ok(Vec::new());
    }
    let shift = BigInt::from(ctx.m as i64 + 1);
    let mut rest = h.clone();
    let mut factors: Vec<(IntPoly, usize)> = Vec::new();
    for entry in table {
        if rest.deg() == 0 {
            break;
        }
        let factor = entry.poly.shift(&shift);
        let mut mult = 0usize;
        while let Some(quo) = rest.div_exact(&factor) {
            rest = quo;
            mult += 1;
        }
        if mult > 0 {
            factors.push((factor, mult));
        }
    }
    if rest.deg() > 0 {
        factors.push((rest, 1));
    }
    factors.sort_by_key(|(p, _)| poly_sort_key(p));
    Ok(factors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(coeffs: &[i64]) -> IntPoly {
        IntPoly::from_i64(coeffs)
    }

    fn ctx(q: u64) -> FieldParams {
        FieldParams::new(q).unwrap()
    }

    fn table_polys(max_def: u32, def: u32) -> Vec<IntPoly> {
        deficiency_table(max_def)
            .into_iter()
            .filter(|e| e.deficiency == def)
            .map(|e| e.poly)
            .collect()
    }

    #[test]
    fn deficiency_table_small() {
        // Verified by direct search over small coefficient boxes.
        assert_eq!(table_polys(2, 0), vec![p(&[-1, 1])]);
        assert_eq!(table_polys(2, 1), vec![p(&[-2, 1]), p(&[1, -3, 1])]);
        assert_eq!(
            table_polys(2, 2),
            vec![
                p(&[-3, 1]),
                p(&[1, -4, 1]),
                p(&[2, -4, 1]),
                p(&[-1, 6, -5, 1]),
            ]
        );
    }

    #[test]
    fn deficiency_table_brute_force_check() {
        // Independent enumeration for degrees <= 3 with crude bounds:
        // all roots lie in (0, trace), so |e_k| <= C(d,k) trace^k.
        let max_def = 2u32;
        let mut expected: Vec<(u32, IntPoly)> = Vec::new();
        for d in 1..=3usize {
            for def in 0..=max_def {
                let t = d as i64 + def as i64;
                let mut polys = Vec::new();
                match d {
                    1 => polys.push(p(&[-t, 1])),
                    2 => {
                        for c in 1..=(t * t) {
                            polys.push(p(&[c, -t, 1]));
                        }
                    }
                    3 => {
                        for e2 in 1..=(3 * t * t) {
                            for e3 in 1..=(t * t * t) {
                                polys.push(p(&[-e3, e2, -t, 1]));
                            }
                        }
                    }
                    _ => unreachable!(),
                }
                for h in polys {
                    let totally_positive = crate::exact::is_totally_real(&h)
                        && crate::exact::count_roots_above(
                            &h,
                            &num_rational::BigRational::from_integer(BigInt::zero()),
                        ) == h.deg();
                    if !totally_positive {
                        continue;
                    }
                    // Irreducibility by trial division against all
                    // lower-degree totally positive polynomials found
                    // so far.
                    if expected
                        .iter()
                        .any(|(_, e)| e.deg() < h.deg() && divides(e, &h))
                    {
                        continue;
                    }
                    expected.push((def, h));
                }
            }
        }
        let table: Vec<(u32, IntPoly)> = deficiency_table(max_def)
            .into_iter()
            .filter(|e| e.poly.deg() <= 3)
            .map(|e| (e.deficiency, e.poly))
            .collect();
        let mut expected_sorted = expected;
        expected_sorted
            .sort_by(|a, b| (a.0, poly_sort_key(&a.1)).cmp(&(b.0, poly_sort_key(&b.1))));
        assert_eq!(table, expected_sorted);
    }

    #[test]
    fn table_roundtrip() {
        let entries = deficiency_table(2);
        let text = write_table(&entries, 2);
        let (max_def, back) = read_table(&text).unwrap();
        assert_eq!(max_def, 2);
        assert_eq!(back, entries);
    }

    #[test]
    fn atoms_at_128() {
        let c = ctx(128);
        let got = atoms(&c, 2, 4, &WorkBudget::unlimited()).unwrap();
        let polys: Vec<String> = got.iter().map(|a| a.poly.to_string()).collect();
        // Deficiency-1: z - 2 and z^2 - 3z + 1 shift to x + 21 and
        // x^2 + 43x + 461.  Deficiency-2: x + 20 and x^2 + 42x + 439
        // survive the admissibility filter; z^2 - 4z + 1 and the cubic
        // have a root below -2 sqrt(128).
        assert_eq!(
            polys,
            vec![
                "x + 20".to_string(),
                "x + 21".to_string(),
                "x^2 + 42*x + 439".to_string(),
                "x^2 + 43*x + 461".to_string(),
            ]
        );
    }

    #[test]
    fn minimal_realweil_at_128() {
        let c = ctx(128);
        let entries = minimal_realweil(&c, 2).unwrap();
        // Empty product always present.
        assert!(entries.iter().any(|e| e.degree == 0 && e.defect == 0));
        let deg2_def2: Vec<String> = entries
            .iter()
            .filter(|e| e.degree == 2 && e.defect == 2)
            .map(|e| e.poly.to_string())
            .collect();
        assert_eq!(
            deg2_def2,
            vec![
                "x^2 + 42*x + 439".to_string(),
                "x^2 + 42*x + 441".to_string(), // (x + 21)^2
            ]
        );
        let d0 = minimal_realweil(&c, 0).unwrap();
        assert_eq!(d0.len(), 1);
        assert_eq!(d0[0].degree, 0);
    }

    #[test]
    fn minimal_realweil_at_4_includes_x_plus_2() {
        let c = ctx(4);
        let entries = minimal_realweil(&c, 2).unwrap();
        assert!(entries
            .iter()
            .any(|e| e.poly == p(&[2, 1]) && e.defect == 2));
    }

    #[test]
    fn enumerate_by_trace_forced_extremal() {
        // Defect 0 forces (x + m)^g.
        let c = ctx(8); // m = 5
        let budget = WorkBudget::unlimited();
        let got = enumerate_by_trace(&c, 3, -15, &budget).unwrap();
        let expect = &(&p(&[5, 1]) * &p(&[5, 1])) * &p(&[5, 1]);
        assert_eq!(got, vec![expect]);
    }

    #[test]
    fn routes_agree() {
        let budget = WorkBudget::unlimited();
        for (q, g, n) in [(4u64, 3usize, 14u64), (8, 2, 20), (4, 5, 18), (16, 4, 45)] {
            let c = ctx(q);
            let a = candidates_via(&c, g, n, Route::Table, &budget).unwrap();
            let b = candidates_via(&c, g, n, Route::Trace, &budget).unwrap();
            let pa: Vec<&IntPoly> = a.iter().map(|x| &x.poly).collect();
            let pb: Vec<&IntPoly> = b.iter().map(|x| &x.poly).collect();
            assert_eq!(pa, pb, "candidate sets differ at q={q} g={g} n={n}");
            for (x, y) in a.iter().zip(b.iter()) {
                assert_eq!(x.factors, y.factors);
                assert_eq!(x.not_weil, y.not_weil);
            }
        }
    }

    #[test]
    fn candidates_4_5_18_shapes() {
        let c = ctx(4);
        let budget = WorkBudget::unlimited();
        let cands = candidates(&c, 5, 18, &budget).unwrap();
        let got: Vec<(Vec<i64>, Vec<(String, usize)>, bool)> = cands
            .iter()
            .map(|cand| {
                (
                    cand.place_counts
                        .iter()
                        .map(|a| i64::try_from(a).unwrap())
                        .collect(),
                    cand.factors
                        .iter()
                        .map(|(f, m)| (f.to_string(), *m))
                        .collect(),
                    cand.not_weil.is_some(),
                )
            })
            .collect();
        let f = |s: &str, m: usize| (s.to_string(), m);
        let expected = vec![
            (
                vec![18, 0, 4, 81, 164],
                vec![f("x + 3", 3), f("x^2 + 4*x + 2", 1)],
                true, // x^2 + 4x + 2 requires even multiplicity
            ),
            (
                vec![18, 0, 5, 74, 187],
                vec![f("x + 3", 2), f("x^3 + 7*x^2 + 14*x + 7", 1)],
                false,
            ),
            (
                vec![18, 0, 6, 67, 210],
                vec![f("x + 1", 1), f("x + 2", 1), f("x + 3", 2), f("x + 4", 1)],
                false,
            ),
            (
                vec![18, 0, 6, 68, 200],
                vec![f("x + 3", 1), f("x^2 + 5*x + 5", 2)],
                false,
            ),
            (
                vec![18, 0, 7, 60, 232],
                vec![f("x + 2", 2), f("x + 4", 1), f("x^2 + 5*x + 5", 1)],
                false,
            ),
            (
                vec![18, 1, 0, 86, 168],
                vec![f("x + 1", 1), f("x + 3", 4)],
                false,
            ),
            (
                vec![18, 1, 1, 79, 190],
                vec![f("x + 2", 1), f("x + 3", 2), f("x^2 + 5*x + 5", 1)],
                false,
            ),
            (
                vec![18, 1, 2, 71, 222],
                vec![f("x + 2", 3), f("x + 3", 1), f("x + 4", 1)],
                false,
            ),
        ];
        assert_eq!(got, expected);
        assert!(cands
            .iter()
            .all(|cand| weil::rational_points(&cand.poly, &c) == BigInt::from(18)));
    }

    #[test]
    fn candidates_128_4_215_not_weil_screening() {
        // Defect 2 at q = 128: every shape involving x + 22 fails the
        // multiplicity-7 requirement; only (x^2+43x+461)^2 survives.
        let c = ctx(128);
        let budget = WorkBudget::unlimited();
        let cands = candidates(&c, 4, 215, &budget).unwrap();
        assert_eq!(cands.len(), 5);
        let survivors: Vec<&Candidate> =
            cands.iter().filter(|x| x.not_weil.is_none()).collect();
        assert_eq!(survivors.len(), 1);
        let sq = &survivors[0].factors;
        assert_eq!(sq.len(), 1);
        assert_eq!(sq[0].0, p(&[461, 43, 1]));
        assert_eq!(sq[0].1, 2);
    }

    #[test]
    fn factoring_candidates() {
        let c = ctx(4);
        let h = &(&p(&[1, 1]) * &p(&[3, 1])) * &(&p(&[3, 1]) * &p(&[5, 5, 1]));
        let factors = factor_totally_real(&h, &c).unwrap();
        assert_eq!(
            factors,
            vec![(p(&[1, 1]), 1), (p(&[3, 1]), 2), (p(&[5, 5, 1]), 1)]
        );
        // Irreducible cubic stays together.
        let cubic = p(&[-3, 1, 4, 1]);
        let c3 = ctx(3);
        let h2 = &(&p(&[2, 1]) * &p(&[2, 1])) * &cubic;
        let factors2 = factor_totally_real(&h2, &c3).unwrap();
        assert_eq!(factors2, vec![(p(&[2, 1]), 2), (cubic, 1)]);
    }

    #[test]
    fn work_limit_fires() {
        let c = ctx(32);
        let tiny = WorkBudget::new(5);
        let err = enumerate_by_trace(&c, 8, -50, &tiny).unwrap_err();
        assert!(matches!(err, Error::WorkLimitExceeded(_)));
    }
}
