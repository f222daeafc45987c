//! Self-contained verification suite for the power-sum closed forms.
//!
//! Every identity the fast dispatcher relies on is checked here against the
//! *definitional* evaluator ([`brute`]): each S_d / S_{<d} occurrence is
//! recomputed by explicit monic enumeration, and each closed form is
//! materialized exactly, so a pass certifies the identity on a concrete
//! coefficient window with no shared code path between the two sides.
//!
//! Window policy: an instance is compared on absolute precision
//! `A = max(200, v + extra)` where `v` is the predicted valuation of both
//! sides and `extra` is 200 unless the operation budget forces it down (the
//! report records the window actually attained past the valuation). The
//! absolute floor of 200 is always met.

use num_bigint::BigInt;
use rayon::prelude::*;

use super::brackets::{BracketExpr, BracketTerm};
use super::brute;
use super::{
    expr_sbelow_mt1, expr_sd_q_plus_b, term_sbelow_qj_minus_1, term_sd_qj_minus_1, term_sd_split,
};
use crate::polyring::PolyRing;

const MONIC_BUDGET: u64 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentityStatus {
    Pass,
    Fail,
    NotApplicable,
}

/// Outcome of one identity instance.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub id: &'static str,
    pub params: String,
    pub q: u64,
    pub d: u32,
    pub status: IdentityStatus,
    /// Absolute precision at which the two sides were compared.
    pub abs_precision: i64,
    /// How far past the (predicted) common valuation the window reached.
    pub window_past_valuation: Option<i64>,
    /// Exponent of the first disagreeing coefficient, for failures.
    pub first_mismatch: Option<i64>,
}

#[derive(Debug, Clone, Copy)]
enum SKind {
    Full,
    Below,
}

#[derive(Debug, Clone)]
struct SFactor {
    kind: SKind,
    d: u32,
    k: u64,
    v_pred: BigInt,
}

/// One side of an identity: an optional exact closed part times
/// definitionally-evaluated power-sum factors.
#[derive(Debug, Clone)]
struct Side {
    factors: Vec<SFactor>,
    closed: Option<BracketExpr>,
}

impl Side {
    fn of_factor(kind: SKind, d: u32, k: u64, v_pred: BigInt) -> Side {
        Side { factors: vec![SFactor { kind, d, k, v_pred }], closed: None }
    }

    fn of_expr(e: BracketExpr) -> Side {
        Side { factors: vec![], closed: Some(e) }
    }

    fn v_closed(&self) -> BigInt {
        self.closed
            .as_ref()
            .and_then(|e| e.min_valuation())
            .unwrap_or_else(|| BigInt::from(0))
    }

    fn v_side(&self) -> BigInt {
        let mut v = self.v_closed();
        for f in &self.factors {
            v += &f.v_pred;
        }
        v
    }

    /// Estimated field operations to evaluate at absolute precision `a`.
    fn cost(&self, q: u64, a: &BigInt) -> u128 {
        let v_side = self.v_side();
        let mut total: u128 = 0;
        for f in &self.factors {
            let a_f = a - (&v_side - &f.v_pred);
            let width = |start: i128| -> u128 {
                let w: BigInt = &a_f - BigInt::from(start);
                if w <= BigInt::from(0) {
                    0
                } else {
                    u128::try_from(w).unwrap_or(u128::MAX)
                }
            };
            match f.kind {
                SKind::Full => {
                    let monics = (q as u128).pow(f.d);
                    total = total
                        .saturating_add(monics * (f.d as u128 + 2)
                            * width(f.k as i128 * f.d as i128));
                }
                SKind::Below => {
                    for i in 0..f.d {
                        let monics = (q as u128).pow(i);
                        total = total.saturating_add(
                            monics * (i as u128 + 2) * width(f.k as i128 * i as i128),
                        );
                    }
                }
            }
        }
        total
    }

    fn evaluate(&self, ring: &PolyRing, a: i64) -> crate::laurent::LaurentSeries {
        let v_side = self.v_side();
        let mut acc = self.closed.as_ref().map(|e| {
            let a_c = clamp_i64(&(BigInt::from(a) - (&v_side - self.v_closed())));
            e.materialize(a_c)
        });
        for f in &self.factors {
            let a_f = clamp_i64(&(BigInt::from(a) - (&v_side - &f.v_pred)));
            let s = match f.kind {
                SKind::Full => brute::sd_brute(ring, f.d, f.k, a_f, MONIC_BUDGET),
                SKind::Below => brute::s_below_brute(ring, f.d, f.k, a_f, MONIC_BUDGET),
            }
            .expect("identity grid stays within the monic budget");
            acc = Some(match acc {
                None => s,
                Some(x) => x.mul(&s),
            });
        }
        acc.expect("side has at least one factor")
    }
}

fn clamp_i64(v: &BigInt) -> i64 {
    i64::try_from(v.clone()).expect("window bound fits i64")
}

/// One scheduled check.
struct Job {
    id: &'static str,
    params: String,
    d: u32,
    applicable: bool,
    lhs: Side,
    rhs: Side,
}

fn check(ring: &PolyRing, job: &Job, budget_ops: u128) -> IdentityReport {
    let q = ring.q();
    if !job.applicable {
        return IdentityReport {
            id: job.id,
            params: job.params.clone(),
            q,
            d: job.d,
            status: IdentityStatus::NotApplicable,
            abs_precision: 0,
            window_past_valuation: None,
            first_mismatch: None,
        };
    }
    let v_lhs = job.lhs.v_side();
    let v_rhs = job.rhs.v_side();
    let v_min = v_lhs.min(v_rhs);
    let floor = BigInt::from(200);

    let mut a_big: BigInt = (&v_min + BigInt::from(200)).max(floor.clone());
    for extra in [200i64, 100, 50, 20, 0] {
        a_big = (&v_min + BigInt::from(extra)).max(floor.clone());
        let cost = job.lhs.cost(q, &a_big) + job.rhs.cost(q, &a_big);
        if cost <= budget_ops {
            break;
        }
        if extra == 0 {
            // even the bare-valuation window is too wide: fall back to the
            // absolute floor (a zero-prefix check, reported as such)
            a_big = floor.clone();
        }
    }
    let a = clamp_i64(&a_big);

    let lhs = job.lhs.evaluate(ring, a);
    let rhs = job.rhs.evaluate(ring, a);
    let (status, attained, mismatch) = match lhs.agree_to_common_precision(&rhs) {
        Ok(n) => (IdentityStatus::Pass, n, None),
        Err(i) => (IdentityStatus::Fail, lhs.precision().min(rhs.precision()), Some(i)),
    };
    let past = attained - clamp_i64(&v_min);
    IdentityReport {
        id: job.id,
        params: job.params.clone(),
        q,
        d: job.d,
        status,
        abs_precision: attained,
        window_past_valuation: Some(past),
        first_mismatch: mismatch,
    }
}

/// Nondecreasing lists of length s over 0..=hi.
fn nondecreasing_lists(s: u32, hi: u32) -> Vec<Vec<u32>> {
    if s == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; s as usize];
    loop {
        out.push(cur.clone());
        // next nondecreasing list
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

fn jobs_for_degree(ring: &PolyRing, d: u32) -> Vec<Job> {
    let field = ring.field();
    let q = field.q();
    let p = field.p();
    let qi = q as i64;
    let mut jobs: Vec<Job> = Vec::new();

    // S_d digit splitting: S_d(q^K - sum q^{k_i}) = l_d^{(s-1)q^K} prod S_d(q^K - q^{k_i})
    let kmax_sd = if q == 2 { 3 } else { 2 };
    for kk in 1..=kmax_sd {
        for s in 1..=(q - 1).min(2) {
            for parts in nondecreasing_lists(s as u32, kk - 1) {
                let pw = q.pow(kk);
                let k = pw - parts.iter().map(|&e| q.pow(e)).sum::<u64>();
                let lhs = Side::of_factor(
                    SKind::Full,
                    d,
                    k,
                    term_sd_split(ring, d, kk, &parts).valuation().unwrap_or_default(),
                );
                let mut rhs_factors = Vec::new();
                for &ki in &parts {
                    rhs_factors.push(SFactor {
                        kind: SKind::Full,
                        d,
                        k: pw - q.pow(ki),
                        v_pred: term_sd_split(ring, d, kk, &[ki])
                            .valuation()
                            .unwrap_or_default(),
                    });
                }
                let mult = BracketTerm::one(field).ell(d, (s as i64 - 1) * qi.pow(kk));
                let rhs =
                    Side { factors: rhs_factors, closed: Some(BracketExpr::from_term(mult)) };
                jobs.push(Job {
                    id: "Sd",
                    params: format!("K={kk},s={s},parts={parts:?}"),
                    d,
                    applicable: true,
                    lhs,
                    rhs,
                });
            }
        }
    }

    if d >= 1 {
        // S_{<d} multiplicativity over digit splittings
        for kk in 1..=2u32 {
            for s in 1..=q.min(2) {
                for parts in nondecreasing_lists(s as u32, kk) {
                    if parts.iter().all(|&e| e == kk) {
                        continue; // k = 0
                    }
                    let pw = q.pow(kk);
                    let k = parts.iter().map(|&e| pw - q.pow(e)).sum::<u64>();
                    let lhs = Side::of_factor(SKind::Below, d, k, BigInt::from(0));
                    let rhs_factors: Vec<SFactor> = parts
                        .iter()
                        .filter(|&&e| e < kk)
                        .map(|&e| SFactor {
                            kind: SKind::Below,
                            d,
                            k: pw - q.pow(e),
                            v_pred: BigInt::from(0),
                        })
                        .collect();
                    jobs.push(Job {
                        id: "Sltd",
                        params: format!("K={kk},s={s},parts={parts:?}"),
                        d,
                        applicable: true,
                        lhs,
                        rhs: Side { factors: rhs_factors, closed: None },
                    });
                }
            }
        }

        // S_{<d}(m(q-1)) = [d]^{mq} / ([1]^m l_d^{m(q-1)})
        for m in 1..=q {
            let k = m * (q - 1);
            let t = BracketTerm::one(field)
                .bracket(d, (m * q) as i64)
                .bracket(1, -(m as i64))
                .ell(d, -(k as i64));
            jobs.push(Job {
                id: "Sltd1",
                params: format!("m={m}"),
                d,
                applicable: true,
                lhs: Side::of_factor(SKind::Below, d, k, BigInt::from(0)),
                rhs: Side::of_expr(BracketExpr::from_term(t)),
            });
        }
    }

    // S_d(q^j - 1) monomial form (valid at d = 0 as well)
    for j in 1..=3u32 {
        let k = q.pow(j) - 1;
        let t = term_sd_qj_minus_1(ring, d, j);
        let v = t.valuation().unwrap_or_default();
        jobs.push(Job {
            id: "Sdqjminus1",
            params: format!("j={j}"),
            d,
            applicable: true,
            lhs: Side::of_factor(SKind::Full, d, k, v),
            rhs: Side::of_expr(BracketExpr::from_term(t)),
        });
    }

    if d >= 1 {
        for j in 1..=3u32 {
            let k = q.pow(j) - 1;
            let t = term_sbelow_qj_minus_1(ring, d, j);
            jobs.push(Job {
                id: "Sltdqjminus1",
                params: format!("j={j}"),
                d,
                applicable: true,
                lhs: Side::of_factor(SKind::Below, d, k, BigInt::from(0)),
                rhs: Side::of_expr(BracketExpr::from_term(t)),
            });
            // S_d(q^j - 1) = ([j]/[d]^{q^j}) S_{<d}(q^j - 1)
            let v_lhs = term_sd_qj_minus_1(ring, d, j).valuation().unwrap_or_default();
            let factor = BracketTerm::one(field).bracket(j, 1).bracket(d, -qi.pow(j));
            jobs.push(Job {
                id: "rel1",
                params: format!("j={j}"),
                d,
                applicable: true,
                lhs: Side::of_factor(SKind::Full, d, k, v_lhs),
                rhs: Side {
                    factors: vec![SFactor {
                        kind: SKind::Below,
                        d,
                        k,
                        v_pred: BigInt::from(0),
                    }],
                    closed: Some(BracketExpr::from_term(factor)),
                },
            });
        }
    }

    // S_d(q + b) two-term form (d = 0 allowed)
    for b in 0..q {
        let k = q + b;
        let e = expr_sd_q_plus_b(ring, d, b);
        let v = e.min_valuation().unwrap_or_default();
        jobs.push(Job {
            id: "Sd-q-plus-b",
            params: format!("b={b}"),
            d,
            applicable: true,
            lhs: Side::of_factor(SKind::Full, d, k, v.clone()),
            rhs: Side::of_expr(e),
        });
        if (b == 1 || b == q - 1) && b > 0 {
            let applicable = p == 2;
            let t = BracketTerm::one(field).bracket(d + 1, 1).bracket(1, -1).ell(d, -(k as i64));
            let e2 = BracketExpr::from_term(t);
            let v2 = e2.min_valuation().unwrap_or_default();
            jobs.push(Job {
                id: "Sd-q-plus-b",
                params: format!("b={b},form=char2"),
                d,
                applicable,
                lhs: Side::of_factor(SKind::Full, d, k, v2),
                rhs: Side::of_expr(e2),
            });
        }
    }

    if d >= 1 {
        // S_{<d}((q+m)(q-1)) two-term form
        for m in 1..=q + 1 {
            let k = (q + m) * (q - 1);
            jobs.push(Job {
                id: "mt1",
                params: format!("m={m}"),
                d,
                applicable: true,
                lhs: Side::of_factor(SKind::Below, d, k, BigInt::from(0)),
                rhs: Side::of_expr(expr_sbelow_mt1(ring, d, m)),
            });
        }

        // the 2q^2 - 3q + 1 specialization, and its char-2 collapse
        let k0 = 2 * q * q - 3 * q + 1;
        jobs.push(Job {
            id: "mt1-1",
            params: "eq=1".into(),
            d,
            applicable: true,
            lhs: Side::of_factor(SKind::Below, d, k0, BigInt::from(0)),
            rhs: Side::of_expr(expr_sbelow_mt1(ring, d, q - 1)),
        });
        let t2 = BracketTerm::one(field)
            .bracket(d + 1, 1)
            .bracket(d, (2 * q * q - 2 * q) as i64)
            .bracket(1, -((q - 1) as i64))
            .bracket(2, -1)
            .ell(d, -(k0 as i64));
        jobs.push(Job {
            id: "mt1-1",
            params: "eq=2".into(),
            d,
            applicable: p == 2,
            lhs: Side::of_factor(SKind::Below, d, k0, BigInt::from(0)),
            rhs: Side::of_expr(BracketExpr::from_term(t2)),
        });
    }

    // auxiliary forms used by the two-term relation proofs
    {
        let k = q * q - 1;
        let t = BracketTerm::one(field).bracket(d + 1, 1).bracket(1, -1).ell(d, -(k as i64));
        let e = BracketExpr::from_term(t);
        let v = e.min_valuation().unwrap_or_default();
        jobs.push(Job {
            id: "proof-aux-1",
            params: String::new(),
            d,
            applicable: true,
            lhs: Side::of_factor(SKind::Full, d, k, v),
            rhs: Side::of_expr(e),
        });
    }
    if d >= 1 {
        let k = q * q - 1;
        let t = BracketTerm::one(field)
            .bracket(d + 1, 1)
            .bracket(d, (q * q) as i64)
            .bracket(1, -1)
            .bracket(2, -1)
            .ell(d, -(k as i64));
        jobs.push(Job {
            id: "proof-aux-2",
            params: String::new(),
            d,
            applicable: true,
            lhs: Side::of_factor(SKind::Below, d, k, BigInt::from(0)),
            rhs: Side::of_expr(BracketExpr::from_term(t)),
        });

        let t = BracketTerm::one(field)
            .bracket(d, q as i64)
            .bracket(1, -1)
            .ell(d, -((q - 1) as i64));
        jobs.push(Job {
            id: "proof-aux-3",
            params: String::new(),
            d,
            applicable: true,
            lhs: Side::of_factor(SKind::Below, d, q - 1, BigInt::from(0)),
            rhs: Side::of_expr(BracketExpr::from_term(t)),
        });

        let k4 = 2 * q * q - 4 * q + 2;
        let t = BracketTerm::one(field)
            .bracket(d, (2 * (q - 1) * q) as i64)
            .bracket(1, -(2 * (q - 1) as i64))
            .ell(d, -(k4 as i64));
        jobs.push(Job {
            id: "proof-aux-4",
            params: String::new(),
            d,
            applicable: p == 2,
            lhs: Side::of_factor(SKind::Below, d, k4, BigInt::from(0)),
            rhs: Side::of_expr(BracketExpr::from_term(t)),
        });

        let k5 = 2 * q * q - q - 1;
        let t = BracketTerm::one(field)
            .bracket(d + 1, 1)
            .bracket(d, (2 * q * q) as i64)
            .bracket(1, -((q + 1) as i64))
            .bracket(2, -1)
            .ell(d, -(k5 as i64));
        jobs.push(Job {
            id: "proof-aux-5",
            params: String::new(),
            d,
            applicable: true,
            lhs: Side::of_factor(SKind::Below, d, k5, BigInt::from(0)),
            rhs: Side::of_expr(BracketExpr::from_term(t)),
        });
    }

    jobs
}

/// Run the whole identity suite for degrees 0..=d_max.
///
/// `budget_ops` caps the estimated field-operation count per instance; the
/// window shrinks toward the valuation (and finally to the absolute floor of
/// 200) when an instance would exceed it.
pub fn run_suite(ring: &PolyRing, d_max: u32, budget_ops: u128) -> Vec<IdentityReport> {
    let mut jobs: Vec<Job> = Vec::new();
    for d in 0..=d_max {
        jobs.extend(jobs_for_degree(ring, d));
    }
    let mut reports: Vec<IdentityReport> =
        jobs.par_iter().map(|job| check(ring, job, budget_ops)).collect();
    reports.sort_by(|a, b| (a.id, &a.params, a.d).cmp(&(b.id, &b.params, b.d)));
    reports
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    #[test]
    fn suite_passes_shallow_q2_q3() {
        for qs in ["2", "3"] {
            let ring = PolyRing::new(FieldSpec::parse(qs).unwrap());
            let reports = run_suite(&ring, 2, 200_000_000);
            assert!(!reports.is_empty());
            for r in &reports {
                assert_ne!(
                    r.status,
                    IdentityStatus::Fail,
                    "q={qs} {} {} d={} first_mismatch={:?}",
                    r.id,
                    r.params,
                    r.d,
                    r.first_mismatch
                );
                if r.status == IdentityStatus::Pass {
                    assert!(r.abs_precision >= 200);
                }
            }
            // the char-2-only forms must be skipped exactly when p != 2
            let na: Vec<&IdentityReport> =
                reports.iter().filter(|r| r.status == IdentityStatus::NotApplicable).collect();
            if qs == "3" {
                assert!(na.iter().any(|r| r.id == "proof-aux-4"));
                assert!(na.iter().any(|r| r.id == "mt1-1" && r.params == "eq=2"));
            } else {
                assert!(na.is_empty());
            }
        }
    }

    #[test]
    fn nondecreasing_list_shapes() {
        assert_eq!(nondecreasing_lists(2, 1), vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(nondecreasing_lists(1, 2).len(), 3);
        assert_eq!(nondecreasing_lists(3, 0), vec![vec![0, 0, 0]]);
    }
}
