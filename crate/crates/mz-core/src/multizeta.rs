//! Multizeta values as truncated Laurent series in u = 1/t.
//!
//! For a composition s = (s_1, ..., s_r) of positive integers,
//!
//! ```text
//! zeta(s) = sum_{d >= 0} S_d(s_1, ..., s_r)
//! ```
//!
//! where `S_d` is the iterated power sum over monics ordered by strictly
//! decreasing degree (see [`crate::powersum`]). Since
//! `v(S_d(s)) >= s_1 * d`, summing degrees `d < n / s_1` determines the
//! series exactly through precision `n`; the tail lies beyond the window.
//!
//! Depth-r values vanish for d < r - 1, so `v(zeta(s)) > 0` whenever r > 1,
//! while depth-1 values start with the d = 0 term S_0 = 1.

use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::powersum::{Composition, PowerSumCtx};

/// A multizeta value truncated to a fixed absolute precision.
#[derive(Debug, Clone)]
pub struct ZetaValue {
    pub comp: Composition,
    pub series: LaurentSeries,
    /// Number of degrees d whose iterated power sum was accumulated.
    pub terms_summed: u32,
}

/// Weight of a composition: the sum of its parts.
pub fn weight(comp: &[u64]) -> u64 {
    comp.iter().sum()
}

/// Default absolute precision for relation work at a given weight.
pub fn default_precision(weight: u64) -> i64 {
    (8 * weight).max(160) as i64
}

fn validate(comp: &[u64]) -> Result<()> {
    if comp.is_empty() {
        return Err(Error::EmptyComposition);
    }
    if comp.contains(&0) {
        return Err(Error::InvalidParams(format!(
            "composition parts must be positive, got {comp:?}"
        )));
    }
    Ok(())
}

/// Compute zeta(comp) to absolute precision `n`.
pub fn zeta(ctx: &PowerSumCtx, comp: &[u64], n: i64) -> Result<ZetaValue> {
    validate(comp)?;
    let field = ctx.ring().field();
    let mut sum = LaurentSeries::zero(field, n.max(0));
    let mut terms = 0u32;
    let s1 = comp[0] as i64;
    let mut d = 0u32;
    while (s1 * d as i64) < n {
        let term = ctx.sd_iterated(d, comp, n);
        sum = sum.add(&term);
        terms += 1;
        d += 1;
    }
    Ok(ZetaValue { comp: comp.to_vec(), series: sum.truncate(n), terms_summed: terms })
}

/// Compute zeta(left) / zeta(right) to (roughly) absolute precision `n`.
///
/// Both compositions must have the same weight; the ratio of two
/// weight-preserving values then has valuation 0 when the right side is a
/// unit times the left. Fails if the right side vanishes to precision `n`.
pub fn zeta_ratio(ctx: &PowerSumCtx, left: &[u64], right: &[u64], n: i64) -> Result<LaurentSeries> {
    let (wl, wr) = (weight(left), weight(right));
    if wl != wr {
        return Err(Error::WeightMismatch { left: wl, right: wr });
    }
    let zl = zeta(ctx, left, n)?;
    let zr = zeta(ctx, right, n)?;
    if zr.series.is_zero_to_precision() {
        return Err(Error::DivisionByZero);
    }
    zl.series.div(&zr.series)
}

/// Apply the p^e-power Frobenius: comp scales by p^e, the series is the
/// exact p^e-th power (coefficient twist plus exponent stretch), and the
/// precision window widens by the same factor.
pub fn frobenius_twist(zv: &ZetaValue, e: u32) -> ZetaValue {
    let p = zv.series.field().p() as u64;
    let scale = p.pow(e);
    ZetaValue {
        comp: zv.comp.iter().map(|&k| k * scale).collect(),
        series: zv.series.frobenius_pow(e),
        terms_summed: zv.terms_summed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::polyring::PolyRing;

    fn ctx(q: &str) -> PowerSumCtx {
        PowerSumCtx::new(PolyRing::new(FieldSpec::parse(q).unwrap()))
    }

    #[test]
    fn depth_one_leads_with_one() {
        for qs in ["2", "3", "4"] {
            let c = ctx(qs);
            let z = zeta(&c, &[3], 120).unwrap();
            assert_eq!(z.series.valuation(), 0);
            assert_eq!(z.series.coeff_at(0), Some(c.ring().field().one()));
            assert!(z.terms_summed >= 40);
        }
    }

    #[test]
    fn depth_two_valuation_at_least_first_part() {
        let c = ctx("3");
        let z = zeta(&c, &[4, 2], 100).unwrap();
        assert!(!z.series.is_zero_to_precision());
        assert!(z.series.valuation() >= 4);
    }

    #[test]
    fn zeta_sums_iterated_power_sums_directly() {
        // independent accumulation at lower precision
        let c = ctx("2");
        let n = 64;
        let comp = [2u64, 3];
        let z = zeta(&c, &comp, n).unwrap();
        let mut acc = LaurentSeries::zero(c.ring().field(), n);
        for d in 0..32 {
            acc = acc.add(&c.sd_iterated(d, &comp, n));
        }
        assert_eq!(z.series.agree_to_common_precision(&acc), Ok(n));
    }

    #[test]
    fn ratio_requires_equal_weight() {
        let c = ctx("2");
        match zeta_ratio(&c, &[1, 3], &[2, 3], 80) {
            Err(Error::WeightMismatch { left: 4, right: 5 }) => {}
            other => panic!("expected weight mismatch, got {other:?}"),
        }
    }

    #[test]
    fn invalid_compositions_rejected() {
        let c = ctx("2");
        assert!(matches!(zeta(&c, &[], 40), Err(Error::EmptyComposition)));
        assert!(matches!(zeta(&c, &[2, 0], 40), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn frobenius_twist_matches_direct_computation() {
        let c = ctx("3");
        let z = zeta(&c, &[2, 1], 60).unwrap();
        let tw = frobenius_twist(&z, 1);
        assert_eq!(tw.comp, vec![6, 3]);
        let direct = zeta(&c, &[6, 3], 180).unwrap();
        let n = tw.series.agree_to_common_precision(&direct.series).unwrap();
        assert!(n >= 180);
    }
}
