//! Two-term multizeta relations: zeta(a, b) = F * zeta(a', b') with F a
//! monomial in the brackets [n] = t^(q^n) - t.
//!
//! A relation *family* is a parametrized recipe producing, for a given q,
//! the two depth-2 compositions and the predicted bracket factor. The
//! [`verify`] engine checks an instance three independent ways:
//!
//! 1. series level: Delta = zeta(L) - F * zeta(R) vanishes on a window
//!    extending `guard` coefficients past the factor's degree budget;
//! 2. term level (proved families): S_d(L) = F * S_d(R) for each degree
//!    d up to a small bound, which is the mechanism behind the proofs;
//! 3. continued fractions: the ratio zeta(L)/zeta(R) is expanded in
//!    K_infinity = F_q((1/t)) and must reconstruct exactly the reduced
//!    rational function predicted by the family.

pub mod classify;
pub mod closure;
pub mod search;
pub mod table;

use crate::error::{Error, Result};
use crate::laurent::{cf_expand, CfVerdict};
use crate::multizeta::{weight, zeta};
use crate::polyring::{PolyRing, RationalFunction};
use crate::powersum::brackets::BracketTerm;
use crate::powersum::PowerSumCtx;

/// A parametrized two-term relation family.
///
/// List parameters are multisets of exponents in `[0, k)`; where a split
/// position matters (`Thm3`) the list order up to the split is the data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    /// zeta(q^(n+k) - q^n, q^(n+k) - 1) vs the swapped composition.
    Thm1 { n: u32, k: u32 },
    /// Exponent lists ks, ls of equal length s with 1 <= s < q.
    Thm2 { k: u32, ks: Vec<u32>, ls: Vec<u32> },
    /// ks of length s1, ls of length s2, s1 <= s2 <= q, s1 < q; the first
    /// s1 entries of ls trade places with ks.
    Thm3 { k: u32, ks: Vec<u32>, ls: Vec<u32> },
    /// General exchange: sel is the sub-multiset of ks ++ ls that becomes
    /// the new first-part exponent list.
    Main { k: u32, ks: Vec<u32>, ls: Vec<u32>, sel: Vec<u32> },
    /// Characteristic 2: zeta(2, s q^2 - sum q^(k_i) - 1); ks has s-1
    /// entries, each 0 or 1.
    F1 { ks: Vec<u32> },
    /// Characteristic 2: zeta(2, 2q^2 - 3q + 1).
    F21,
    /// Characteristic 2: first parts q^2 - sum q^(k_i) with ls obtained
    /// from ks by lowering exactly one 1 to 0.
    F2 { ks: Vec<u32>, ls: Vec<u32> },
    /// Characteristic 2: zeta(4q - 2, b(i, j)).
    F3 { i: u32, j: u32 },
    /// Characteristic 2, q > 2: zeta(3q - 1, q^3 - (q-1) - q^i).
    F4 { i: u32 },
    /// Unproved shift family in characteristic 2 (same b(i, j) as F3).
    Conjecture { a: u64, i: u32, j: u32 },
}

/// A family evaluated at a specific q: compositions plus predicted factor.
#[derive(Debug, Clone)]
pub struct RelationInstance {
    pub family: Family,
    pub left: (u64, u64),
    pub right: (u64, u64),
    pub factor: BracketTerm,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Thm1 { .. } => "thm1",
            Family::Thm2 { .. } => "thm2",
            Family::Thm3 { .. } => "thm3",
            Family::Main { .. } => "main",
            Family::F1 { .. } => "f1",
            Family::F21 => "f21",
            Family::F2 { .. } => "f2",
            Family::F3 { .. } => "f3",
            Family::F4 { .. } => "f4",
            Family::Conjecture { .. } => "conjecture",
        }
    }

    /// Whether instances carry a proof (term-level identity) or are only
    /// conjectural.
    pub fn proved(&self) -> bool {
        !matches!(self, Family::Conjecture { .. })
    }

    /// Build the concrete instance over F_q[t], checking every parameter
    /// constraint (including characteristic restrictions).
    pub fn instantiate(&self, ring: &PolyRing) -> Result<RelationInstance> {
        let q = ring.q();
        let p = ring.p();
        let field = ring.field();
        let qp = |e: u32| -> u64 { q.pow(e) };
        let bad = |msg: String| Error::InvalidParams(msg);
        let char2 = |name: &str| -> Result<()> {
            if p != 2 {
                return Err(bad(format!("{name} requires characteristic 2, got p={p}")));
            }
            Ok(())
        };

        let (left, right, factor) = match self {
            Family::Thm1 { n, k } => {
                if *k < 1 {
                    return Err(bad("thm1 needs k >= 1".into()));
                }
                let big = qp(n + k);
                let l = (big - qp(*n), big - 1);
                let r = (big - 1, big - qp(*n));
                let f = BracketTerm::one(field)
                    .bracket(*k, qp(*n) as i64)
                    .bracket(n + k, -1);
                (l, r, f)
            }
            Family::Thm2 { k, ks, ls } => {
                let s = ks.len() as u64;
                if s == 0 || s != ls.len() as u64 || s >= q {
                    return Err(bad(format!("thm2 needs 1 <= s < q, got s={s}")));
                }
                check_range(ks, *k, "thm2 ks")?;
                check_range(ls, *k, "thm2 ls")?;
                let sum = |v: &[u32]| -> u64 { v.iter().map(|&e| qp(e)).sum() };
                let l = (qp(*k) - sum(ks), s * qp(*k) - sum(ls));
                let r = (qp(*k) - sum(ls), s * qp(*k) - sum(ks));
                (l, r, exchange_factor(field, *k, ks, ls)?)
            }
            Family::Thm3 { k, ks, ls } => {
                let s1 = ks.len() as u64;
                let s2 = ls.len() as u64;
                if s1 == 0 || s1 > s2 || s2 > q || s1 >= q {
                    return Err(bad(format!(
                        "thm3 needs 1 <= s1 <= s2 <= q with s1 < q, got s1={s1} s2={s2}"
                    )));
                }
                check_range(ks, *k, "thm3 ks")?;
                check_range(ls, *k, "thm3 ls")?;
                let head = &ls[..s1 as usize];
                let tail = &ls[s1 as usize..];
                let sum = |v: &[u32]| -> u64 { v.iter().map(|&e| qp(e)).sum() };
                let l = (qp(*k) - sum(ks), s2 * qp(*k) - sum(ls));
                let r = (
                    qp(*k) - sum(head),
                    s2 * qp(*k) - sum(ks) - sum(tail),
                );
                (l, r, exchange_factor(field, *k, ks, head)?)
            }
            Family::Main { k, ks, ls, sel } => {
                let s1 = ks.len() as u64;
                let s2 = ls.len() as u64;
                if s1 == 0 || s1 >= q || s2 == 0 || s2 > q {
                    return Err(bad(format!(
                        "main needs 1 <= s1 < q and 1 <= s2 <= q, got s1={s1} s2={s2}"
                    )));
                }
                if sel.len() != ks.len() {
                    return Err(bad("main selection must have s1 elements".into()));
                }
                check_range(ks, *k, "main ks")?;
                check_range(ls, *k, "main ls")?;
                let mut merged = [ks.clone(), ls.clone()].concat();
                merged.sort_unstable();
                let lrest = multiset_diff(&merged, sel)
                    .ok_or_else(|| bad("main selection not a sub-multiset of ks ++ ls".into()))?;
                let sum = |v: &[u32]| -> u64 { v.iter().map(|&e| qp(e)).sum() };
                let l = (qp(*k) - sum(ks), s2 * qp(*k) - sum(ls));
                let r = (qp(*k) - sum(sel), s2 * qp(*k) - sum(&lrest));
                let mut ks_sorted = ks.clone();
                ks_sorted.sort_unstable();
                let k_out = diff_clamped(&ks_sorted, sel);
                let l_in = diff_clamped(sel, &ks_sorted);
                let f = exchange_factor(field, *k, &k_out, &l_in)?;
                (l, r, f)
            }
            Family::F1 { ks } => {
                char2("f1")?;
                let s = ks.len() as u64 + 1;
                if s > q {
                    return Err(bad(format!("f1 needs s <= q, got s={s}")));
                }
                if ks.iter().any(|&e| e > 1) {
                    return Err(bad("f1 exponents must be 0 or 1".into()));
                }
                let shift: u64 = ks.iter().map(|&e| qp(e)).sum();
                let l = (2, s * q * q - shift - 1);
                let r = (q + 1, s * q * q - shift - q);
                let f = BracketTerm::one(field).bracket(1, q as i64).bracket(2, -1);
                (l, r, f)
            }
            Family::F21 => {
                char2("f21")?;
                let l = (2, 2 * q * q - 3 * q + 1);
                let r = (q + 1, 2 * q * q - 4 * q + 2);
                let f = BracketTerm::one(field).bracket(1, q as i64).bracket(2, -1);
                (l, r, f)
            }
            Family::F2 { ks, ls } => {
                char2("f2")?;
                let s = ks.len() as u64;
                if s == 0 || s >= q || ls.len() as u64 != s {
                    return Err(bad(format!("f2 needs 1 <= s < q, got s={s}")));
                }
                let mut strict = 0;
                for (a, b) in ks.iter().zip(ls.iter()) {
                    if *a > 1 || *b > *a {
                        return Err(bad("f2 needs 0 <= l_i <= k_i <= 1".into()));
                    }
                    strict += u32::from(*b < *a);
                }
                if strict != 1 {
                    return Err(bad("f2 needs exactly one strict drop".into()));
                }
                let sum = |v: &[u32]| -> u64 { v.iter().map(|&e| qp(e)).sum() };
                let l = (q * q - sum(ks), 2 * q * q - 3 * q + 1);
                let r = (q * q - sum(ls), 2 * q * q - 4 * q + 2);
                let f = BracketTerm::one(field).bracket(1, q as i64).bracket(2, -1);
                (l, r, f)
            }
            Family::F3 { i, j } => {
                char2("f3")?;
                let (b, shift) = f3_second_part(q, *i, *j)?;
                let l = (4 * q - 2, b);
                let r = (q * q + q, b - shift);
                (l, r, conj_factor(field, q)?)
            }
            Family::F4 { i } => {
                char2("f4")?;
                if q == 2 {
                    return Err(bad("f4 needs q > 2".into()));
                }
                if *i > 2 {
                    return Err(bad("f4 needs 0 <= i <= 2".into()));
                }
                let l = (3 * q - 1, q * q * q - (q - 1) - qp(*i));
                let r = (q * q + q, q * q * q - (q - 1) * q - qp(*i));
                let f = BracketTerm::one(field)
                    .bracket(1, ((q - 1) * q) as i64)
                    .bracket(2, -((q - 1) as i64));
                (l, r, f)
            }
            Family::Conjecture { a, i, j } => {
                char2("conjecture")?;
                let allowed = [
                    4 * q,
                    q * q + q - 1,
                    q * q + q,
                    q * q + 2 * q - 2,
                    q * q + 2 * q - 1,
                    q * q + 2 * q,
                ];
                if !allowed.contains(a) {
                    return Err(bad(format!("conjecture first part {a} outside its schema")));
                }
                let (b, shift) = f3_second_part(q, *i, *j)?;
                let l = (*a, b);
                let r = (*a + shift, b - shift);
                (l, r, conj_factor(field, q)?)
            }
        };

        if left.0 == 0 || left.1 == 0 || right.0 == 0 || right.1 == 0 {
            return Err(bad(format!(
                "{} instance has a non-positive part: {left:?} vs {right:?}",
                self.name()
            )));
        }
        debug_assert_eq!(left.0 + left.1, right.0 + right.1);
        Ok(RelationInstance { family: self.clone(), left, right, factor })
    }
}

fn check_range(v: &[u32], k: u32, what: &str) -> Result<()> {
    if k == 0 || v.iter().any(|&e| e >= k) {
        return Err(Error::InvalidParams(format!("{what} must lie in [0, {k})")));
    }
    Ok(())
}

/// prod_i [k - k_i]^(q^(k_i)) / prod_i [k - l_i]^(q^(l_i)); equal entries
/// cancel inside the bracket term.
fn exchange_factor(
    field: crate::field::FieldSpec,
    k: u32,
    ks: &[u32],
    ls: &[u32],
) -> Result<BracketTerm> {
    let q = field.q() as i64;
    let mut f = BracketTerm::one(field);
    for &ki in ks {
        f.mul_bracket(k - ki, q.pow(ki))?;
    }
    for &li in ls {
        f.mul_bracket(k - li, -q.pow(li))?;
    }
    Ok(f)
}

/// [1]^((q-2)q) / [2]^(q-2), the factor shared by F3 and the conjecture
/// (trivial at q = 2).
fn conj_factor(field: crate::field::FieldSpec, q: u64) -> Result<BracketTerm> {
    let mut f = BracketTerm::one(field);
    f.mul_bracket(1, ((q - 2) * q) as i64)?;
    f.mul_bracket(2, -((q - 2) as i64))?;
    Ok(f)
}

/// b(i, j) = q^3 - i q^2 - j q - (q - i - j) and the shift (q-2)(q-1),
/// with the parameter and positivity checks shared by F3 / Conjecture.
fn f3_second_part(q: u64, i: u32, j: u32) -> Result<(u64, u64)> {
    if i > 2 || j > 2 - i {
        return Err(Error::InvalidParams(format!(
            "need 0 <= i <= 2 and 0 <= j <= 2 - i, got i={i} j={j}"
        )));
    }
    let (i64v, j64v) = (i as u64, j as u64);
    if i64v + j64v > q {
        return Err(Error::InvalidParams("i + j exceeds q".into()));
    }
    let b = q * q * q - i64v * q * q - j64v * q - (q - i64v - j64v);
    let shift = (q - 2) * (q - 1);
    if b == 0 || b <= shift {
        return Err(Error::InvalidParams(format!(
            "composition part b={b} not positive after shift {shift}"
        )));
    }
    Ok((b, shift))
}

/// Multiset difference a - b over sorted slices; None if b is not
/// contained in a.
fn multiset_diff(a: &[u32], b: &[u32]) -> Option<Vec<u32>> {
    let mut out = Vec::with_capacity(a.len());
    let mut bs = b.to_vec();
    bs.sort_unstable();
    let mut it = bs.into_iter().peekable();
    for &x in a {
        match it.peek() {
            Some(&y) if y == x => {
                it.next();
            }
            _ => out.push(x),
        }
    }
    if it.peek().is_none() {
        Some(out)
    } else {
        None
    }
}

/// Multiset difference that drops unmatched removals instead of failing.
fn diff_clamped(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut counts = std::collections::BTreeMap::new();
    for &x in a {
        *counts.entry(x).or_insert(0i64) += 1;
    }
    for &x in b {
        *counts.entry(x).or_insert(0i64) -= 1;
    }
    let mut out = Vec::new();
    for (x, c) in counts {
        for _ in 0..c.max(0) {
            out.push(x);
        }
    }
    out
}

/// Nondecreasing lists of length s over 0..=hi.
pub(crate) fn nondecreasing_lists(s: u32, hi: u32) -> Vec<Vec<u32>> {
    if s == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; s as usize];
    loop {
        out.push(cur.clone());
        let mut i = s as usize;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < hi {
                let v = cur[i] + 1;
                for slot in cur.iter_mut().skip(i) {
                    *slot = v;
                }
                break;
            }
        }
    }
}

/// All size-`size` sub-multisets of a sorted multiset.
pub(crate) fn sub_multisets(sorted: &[u32], size: usize) -> Vec<Vec<u32>> {
    let mut groups: Vec<(u32, usize)> = Vec::new();
    for &x in sorted {
        match groups.last_mut() {
            Some((v, c)) if *v == x => *c += 1,
            _ => groups.push((x, 1)),
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        groups: &[(u32, usize)],
        remaining: usize,
        cur: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if remaining == 0 {
            out.push(cur.clone());
            return;
        }
        let Some(&(v, c)) = groups.first() else { return };
        let avail: usize = groups.iter().map(|&(_, c)| c).sum();
        if avail < remaining {
            return;
        }
        for take in (0..=c.min(remaining)).rev() {
            let len = cur.len();
            cur.extend(std::iter::repeat(v).take(take));
            rec(&groups[1..], remaining - take, cur, out);
            cur.truncate(len);
        }
    }
    rec(&groups, size, &mut cur, &mut out);
    out.sort();
    out.dedup();
    out
}

// ---------------------------------------------------------------------------
// instance grids

/// Thm1 instances with n <= nmax, 1 <= k <= kmax.
pub fn grid_thm1(nmax: u32, kmax: u32) -> Vec<Family> {
    let mut out = Vec::new();
    for n in 0..=nmax {
        for k in 1..=kmax {
            out.push(Family::Thm1 { n, k });
        }
    }
    out
}

/// Thm2 instances: all nondecreasing exponent lists for every valid s.
pub fn grid_thm2(q: u64, kmax: u32) -> Vec<Family> {
    let mut out = Vec::new();
    for k in 1..=kmax {
        // s < q, with list length capped at 3 to keep grids reviewable
        for s in 1..q.min(4) {
            for ks in nondecreasing_lists(s as u32, k - 1) {
                for ls in nondecreasing_lists(s as u32, k - 1) {
                    out.push(Family::Thm2 { k, ks: ks.clone(), ls });
                }
            }
        }
    }
    out
}

/// Thm3 instances: ls is a nondecreasing head of length s1 followed by a
/// nondecreasing tail, covering every multiset split.
pub fn grid_thm3(q: u64, kmax: u32) -> Vec<Family> {
    let mut out = Vec::new();
    for k in 1..=kmax {
        for s1 in 1..q {
            for s2 in s1..=q {
                for ks in nondecreasing_lists(s1 as u32, k - 1) {
                    for head in nondecreasing_lists(s1 as u32, k - 1) {
                        for tail in nondecreasing_lists((s2 - s1) as u32, k - 1) {
                            let ls = [head.clone(), tail].concat();
                            out.push(Family::Thm3 { k, ks: ks.clone(), ls });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Main-family instances: every (ks, ls) multiset pair and every
/// sub-multiset selection (distinct selections give distinct right sides).
pub fn grid_main(q: u64, kmax: u32) -> Vec<Family> {
    let mut out = Vec::new();
    for k in 1..=kmax {
        for s1 in 1..q {
            for s2 in 1..=q {
                for ks in nondecreasing_lists(s1 as u32, k - 1) {
                    for ls in nondecreasing_lists(s2 as u32, k - 1) {
                        let mut merged = [ks.clone(), ls.clone()].concat();
                        merged.sort_unstable();
                        for sel in sub_multisets(&merged, s1 as usize) {
                            out.push(Family::Main {
                                k,
                                ks: ks.clone(),
                                ls: ls.clone(),
                                sel,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

/// F1 instances for all 1 <= s <= q (characteristic 2).
pub fn grid_f1(q: u64) -> Vec<Family> {
    let mut out = Vec::new();
    for s in 1..=q {
        for ks in nondecreasing_lists(s as u32 - 1, 1) {
            out.push(Family::F1 { ks });
        }
    }
    out
}

/// F2 instances: ones-count c in 1..=s for each 1 <= s < q.
pub fn grid_f2(q: u64) -> Vec<Family> {
    let mut out = Vec::new();
    for s in 1..q {
        for c in 1..=s {
            let mut ks = vec![0u32; (s - c) as usize];
            ks.extend(std::iter::repeat(1).take(c as usize));
            let mut ls = ks.clone();
            let pos = ls.iter().position(|&e| e == 1).unwrap();
            ls[pos] = 0;
            ls.sort_unstable();
            out.push(Family::F2 { ks, ls });
        }
    }
    out
}

/// F3 instances over the (i, j) triangle, dropping degenerate ones.
pub fn grid_f3(q: u64) -> Vec<Family> {
    let mut out = Vec::new();
    for i in 0..=2u32 {
        for j in 0..=2 - i {
            if f3_second_part(q, i, j).is_ok() {
                out.push(Family::F3 { i, j });
            }
        }
    }
    out
}

/// F4 instances (empty unless q > 2).
pub fn grid_f4(q: u64) -> Vec<Family> {
    if q == 2 {
        return Vec::new();
    }
    (0..=2).map(|i| Family::F4 { i }).collect()
}

/// All conjecture instances: six first parts times the (i, j) triangle.
pub fn grid_conjecture(q: u64) -> Vec<Family> {
    let firsts = [
        4 * q,
        q * q + q - 1,
        q * q + q,
        q * q + 2 * q - 2,
        q * q + 2 * q - 1,
        q * q + 2 * q,
    ];
    let mut out = Vec::new();
    for &a in &firsts {
        for i in 0..=2u32 {
            for j in 0..=2 - i {
                if f3_second_part(q, i, j).is_ok() {
                    out.push(Family::Conjecture { a, i, j });
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// verification

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyStatus {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct VerifyOpts {
    /// Required precision surplus past the factor's degree budget.
    pub guard: i64,
    /// Check S_d(L) = F S_d(R) for d <= this (proved families only).
    pub term_level_dmax: Option<u32>,
    /// Reconstruct the factor from the ratio by continued fractions.
    pub cf_check: bool,
}

impl Default for VerifyOpts {
    fn default() -> Self {
        VerifyOpts { guard: 20, term_level_dmax: Some(5), cf_check: true }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub status: VerifyStatus,
    pub weight: u64,
    pub attained_precision: i64,
    /// Valuation of the nonzero residual, when the series check fails.
    pub residual_valuation: Option<i64>,
    /// The predicted factor as a reduced rational function of t.
    pub factor_reduced: RationalFunction,
    /// Whether continued fractions reproduced exactly that function.
    pub cf_match: Option<bool>,
    /// Largest degree d through which the term-level identity was checked.
    pub term_level_through: Option<u32>,
}

/// Verify one relation instance at absolute precision `n`.
pub fn verify(
    ctx: &PowerSumCtx,
    inst: &RelationInstance,
    n: i64,
    opts: &VerifyOpts,
) -> Result<VerifyReport> {
    let ring = ctx.ring();
    let comp_l = vec![inst.left.0, inst.left.1];
    let comp_r = vec![inst.right.0, inst.right.1];
    let w = weight(&comp_l);
    debug_assert_eq!(w, weight(&comp_r));

    let factor_reduced = inst.factor.to_rational(ring)?;
    let zl = zeta(ctx, &comp_l, n)?;
    let zr = zeta(ctx, &comp_r, n)?;
    // weight-preserving family factors are units (valuation 0); a wrong
    // factor may not be, and then the series check below must catch it
    let f_series = inst.factor.materialize(n);

    let delta = zl.series.sub(&zr.series.mul(&f_series));
    let attained = delta.precision();
    let series_zero = delta.is_zero_to_precision();
    let surplus = attained - factor_reduced.degree_budget() as i64;

    let mut status = if !series_zero {
        VerifyStatus::Fail
    } else if surplus < opts.guard {
        VerifyStatus::Inconclusive
    } else {
        VerifyStatus::Pass
    };
    let residual_valuation = (!series_zero).then(|| delta.valuation());

    // term-level confirmation for proved families
    let mut term_level_through = None;
    if let Some(dmax) = opts.term_level_dmax {
        if inst.family.proved() && series_zero {
            let mut through = None;
            for d in 0..=dmax {
                let ld = ctx.sd_iterated(d, &comp_l, n);
                let rd = ctx.sd_iterated(d, &comp_r, n).mul(&f_series);
                if ld.agree_to_common_precision(&rd).is_err() {
                    status = VerifyStatus::Fail;
                    break;
                }
                through = Some(d);
            }
            term_level_through = through;
        }
    }

    // continued-fraction reconstruction of the factor from the ratio
    let mut cf_match = None;
    if opts.cf_check {
        if zr.series.is_zero_to_precision() {
            status = VerifyStatus::Inconclusive;
        } else {
            let ratio = zl.series.div(&zr.series)?;
            let cf = cf_expand(ring, &ratio, opts.guard)?;
            match cf.verdict {
                CfVerdict::Rational => {
                    let ok = cf.reconstructed.as_ref() == Some(&factor_reduced);
                    cf_match = Some(ok);
                    if !ok {
                        status = VerifyStatus::Fail;
                    }
                }
                CfVerdict::Irrational | CfVerdict::Inconclusive => {
                    cf_match = Some(false);
                    if status == VerifyStatus::Pass {
                        status = VerifyStatus::Inconclusive;
                    }
                }
            }
        }
    }

    Ok(VerifyReport {
        status,
        weight: w,
        attained_precision: attained,
        residual_valuation,
        factor_reduced,
        cf_match,
        term_level_through,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    fn ctx(q: &str) -> PowerSumCtx {
        PowerSumCtx::new(PolyRing::new(FieldSpec::parse(q).unwrap()))
    }

    #[test]
    fn f1_rows_match_known_table_q4() {
        let ring = PolyRing::new(FieldSpec::parse("4").unwrap());
        let rows: Vec<((u64, u64), (u64, u64))> = grid_f1(4)
            .iter()
            .map(|f| {
                let i = f.instantiate(&ring).unwrap();
                (i.left, i.right)
            })
            .collect();
        assert_eq!(rows.len(), 10);
        assert!(rows.contains(&((2, 15), (5, 12))));
        assert!(rows.contains(&((2, 60), (5, 57))));
        assert!(rows.contains(&((2, 51), (5, 48))));
    }

    #[test]
    fn f2_rows_match_known_table_q4() {
        let ring = PolyRing::new(FieldSpec::parse("4").unwrap());
        let rows: Vec<((u64, u64), (u64, u64))> = grid_f2(4)
            .iter()
            .map(|f| {
                let i = f.instantiate(&ring).unwrap();
                (i.left, i.right)
            })
            .collect();
        assert_eq!(rows.len(), 6);
        for want in [
            ((12, 21), (15, 18)),
            ((11, 21), (14, 18)),
            ((8, 21), (11, 18)),
            ((10, 21), (13, 18)),
            ((7, 21), (10, 18)),
            ((4, 21), (7, 18)),
        ] {
            assert!(rows.contains(&want), "missing {want:?}");
        }
    }

    #[test]
    fn f3_f4_conjecture_shapes_q4() {
        let ring = PolyRing::new(FieldSpec::parse("4").unwrap());
        let f3: Vec<_> = grid_f3(4)
            .iter()
            .map(|f| f.instantiate(&ring).unwrap())
            .collect();
        assert_eq!(f3.len(), 6);
        assert!(f3.iter().any(|i| i.left == (14, 60) && i.right == (20, 54)));
        let f4: Vec<_> = grid_f4(4)
            .iter()
            .map(|f| f.instantiate(&ring).unwrap())
            .collect();
        assert_eq!(f4.len(), 3);
        assert!(f4.iter().any(|i| i.left == (11, 45) && i.right == (20, 36)));
        assert_eq!(grid_conjecture(4).len(), 36);
    }

    #[test]
    fn f3_degenerate_row_rejected_q2() {
        // at q = 2 the (i, j) = (2, 0) slot gives a zero part
        assert!(f3_second_part(2, 2, 0).is_err());
        assert_eq!(grid_f3(2).len(), 5);
    }

    #[test]
    fn thm1_smallest_instance_verifies_q2() {
        let c = ctx("2");
        let inst = Family::Thm1 { n: 1, k: 1 }.instantiate(c.ring()).unwrap();
        assert_eq!(inst.left, (2, 3));
        assert_eq!(inst.right, (3, 2));
        let rep = verify(&c, &inst, 200, &VerifyOpts::default()).unwrap();
        assert_eq!(rep.status, VerifyStatus::Pass, "{rep:?}");
        assert_eq!(rep.cf_match, Some(true));
        assert_eq!(rep.term_level_through, Some(5));
    }

    #[test]
    fn perturbed_factor_fails() {
        let c = ctx("2");
        let mut inst = Family::Thm1 { n: 1, k: 1 }.instantiate(c.ring()).unwrap();
        // wrong bracket exponent
        inst.factor = BracketTerm::one(c.ring().field()).bracket(1, 4).bracket(2, -1);
        let rep = verify(&c, &inst, 200, &VerifyOpts::default()).unwrap();
        assert_eq!(rep.status, VerifyStatus::Fail);
        assert!(rep.residual_valuation.is_some());
    }

    #[test]
    fn main_family_selection_reflexive_and_proper() {
        let ring = PolyRing::new(FieldSpec::parse("4").unwrap());
        let fam = Family::Main {
            k: 2,
            ks: vec![0, 1],
            ls: vec![0, 0, 0],
            sel: vec![0, 0],
        };
        let inst = fam.instantiate(&ring).unwrap();
        assert_eq!(inst.left, (16 - 1 - 4, 3 * 16 - 3));
        assert_eq!(inst.right, (16 - 2, 3 * 16 - 1 - 4 - 1));
        // reflexive selection gives the identity factor
        let refl = Family::Main {
            k: 2,
            ks: vec![0, 1],
            ls: vec![0, 0, 0],
            sel: vec![0, 1],
        };
        let inst2 = refl.instantiate(&ring).unwrap();
        assert_eq!(inst2.left, inst2.right);
        assert_eq!(
            inst2.factor.to_rational(&ring).unwrap(),
            RationalFunction::one(&ring)
        );
    }

    #[test]
    fn sub_multisets_enumerates_distinct_choices() {
        let out = sub_multisets(&[0, 0, 1, 1, 1], 2);
        assert_eq!(out, vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(sub_multisets(&[0, 1], 0), vec![Vec::<u32>::new()]);
        assert!(sub_multisets(&[0], 2).is_empty());
    }

    #[test]
    fn char2_families_rejected_in_odd_characteristic() {
        let ring = PolyRing::new(FieldSpec::parse("3").unwrap());
        assert!(Family::F21.instantiate(&ring).is_err());
        assert!(Family::F1 { ks: vec![] }.instantiate(&ring).is_err());
        assert!(Family::Conjecture { a: 12, i: 0, j: 0 }.instantiate(&ring).is_err());
    }
}
