//! Definitional power-sum evaluation by explicit monic enumeration.
//!
//! `sd_brute` computes S_d(k) = sum over monic m of degree d of m^(-k)
//! directly, with no recourse to any closed-form identity, which makes it the
//! independent referee for everything the fast dispatcher produces.
//!
//! The per-monic cost is kept linear in the output window by writing k in
//! *balanced* base-q digits (non-adjacent form for q = 2): k = sum s_i q^i
//! with small signed s_i, so that
//!
//! ```text
//! m^(-k) = prod_i (m^(q^i))^(-s_i),     m^(q^i) = m(t^(q^i))
//! ```
//!
//! splits into a sparse numerator (digits s_i < 0) and a sparse denominator
//! (digits s_i > 0). Each factor m(t^(q^i)) is monic of degree d q^i whose
//! unit part has at most d+1 terms at offsets (d-a) q^i; the quotient is
//! recovered by one power-series long division per monic, O(window * terms).

use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::polyring::PolyRing;

/// Balanced signed base-q digits of k (index i holds the coefficient of
/// q^i). For q = 2 this is the non-adjacent form; for q > 2 digits lie in
/// [-(q-1-floor(q/2)), floor(q/2)].
pub fn balanced_digits(mut k: u64, q: u64) -> Vec<i64> {
    let mut out = Vec::new();
    if q == 2 {
        while k > 0 {
            if k & 1 == 1 {
                if k % 4 == 1 {
                    out.push(1);
                    k -= 1;
                } else {
                    out.push(-1);
                    k += 1;
                }
            } else {
                out.push(0);
            }
            k /= 2;
        }
    } else {
        let half = (q / 2) as i64;
        while k > 0 {
            let mut digit = (k % q) as i64;
            k /= q;
            if digit > half {
                digit -= q as i64;
                k += 1;
            }
            out.push(digit);
        }
    }
    out
}

/// Multiply the dense window `acc` by the sparse unit `1 + sum_j c_j u^(off_j)`
/// (offsets strictly positive, ascending not required).
fn mul_sparse_unit(
    ring: &PolyRing,
    acc: &[crate::field::FieldElem],
    sparse: &[(usize, crate::field::FieldElem)],
) -> Vec<crate::field::FieldElem> {
    let field = ring.field();
    let w = acc.len();
    let mut out = acc.to_vec();
    for &(off, c) in sparse {
        if off == 0 || off >= w || c.is_zero() {
            continue;
        }
        for i in 0..w - off {
            if !acc[i].is_zero() {
                out[i + off] = field.add(out[i + off], field.mul(c, acc[i]));
            }
        }
    }
    out
}

/// S_d(k) evaluated definitionally, exact on the window [k*d, a).
///
/// `max_monics` bounds the enumeration size q^d; exceeding it returns
/// `Error::BudgetExceeded` rather than silently grinding.
pub fn sd_brute(ring: &PolyRing, d: u32, k: u64, a: i64, max_monics: u64) -> Result<LaurentSeries> {
    let field = ring.field();
    let q = field.q();
    if d == 0 {
        // the single monic of degree 0 is 1
        return Ok(if a <= 0 {
            LaurentSeries::zero(field, a)
        } else {
            LaurentSeries::one(field, a)
        });
    }
    if k == 0 {
        // q^d copies of 1 vanish in characteristic p
        return Ok(LaurentSeries::zero(field, a));
    }
    let count = q.checked_pow(d).filter(|&c| c <= max_monics).ok_or(Error::BudgetExceeded {
        what: "monic enumeration",
        needed: u64::MAX,
        budget: max_monics,
    })?;
    if count > max_monics {
        return Err(Error::BudgetExceeded { what: "monic enumeration", needed: count, budget: max_monics });
    }

    let v = (k as i128) * (d as i128);
    if v >= a as i128 {
        return Ok(LaurentSeries::zero(field, a));
    }
    let v = v as i64;
    let w = (a - v) as usize;

    let digits = balanced_digits(k, q);
    // offsets q^i per digit position; skip factors entirely out of window
    let mut acc = vec![field.zero(); w];
    let one = field.one();

    for m in ring.monics(d) {
        let coeffs = m.coeffs();
        // sparse unit factors of m(t^(q^i)): (d - a_idx) q^i -> c_a
        let mut num = vec![field.zero(); w];
        num[0] = one;
        let mut den: Option<Vec<crate::field::FieldElem>> = None;
        for (i, &s) in digits.iter().enumerate() {
            if s == 0 {
                continue;
            }
            let qi = match q.checked_pow(i as u32) {
                Some(x) => x,
                None => continue,
            };
            let mut sparse: Vec<(usize, crate::field::FieldElem)> = Vec::with_capacity(d as usize);
            for (a_idx, &c) in coeffs.iter().enumerate().take(d as usize) {
                if c.is_zero() {
                    continue;
                }
                let off = (d as u128 - a_idx as u128) * qi as u128;
                if off < w as u128 {
                    sparse.push((off as usize, c));
                }
            }
            let reps = s.unsigned_abs();
            for _ in 0..reps {
                if s < 0 {
                    num = mul_sparse_unit(ring, &num, &sparse);
                } else {
                    let cur = den.take().unwrap_or_else(|| {
                        let mut init = vec![field.zero(); w];
                        init[0] = one;
                        init
                    });
                    den = Some(mul_sparse_unit(ring, &cur, &sparse));
                }
            }
        }

        match den {
            None => {
                for (slot, val) in acc.iter_mut().zip(num.iter()) {
                    *slot = field.add(*slot, *val);
                }
            }
            Some(denv) => {
                // long division num / den with den[0] == 1, via the sparse
                // support of den
                let support: Vec<(usize, crate::field::FieldElem)> = denv
                    .iter()
                    .enumerate()
                    .skip(1)
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(i, &c)| (i, c))
                    .collect();
                let mut r = num;
                for j in 0..w {
                    let mut x = r[j];
                    for &(off, c) in &support {
                        if off > j {
                            break;
                        }
                        let prev = r[j - off];
                        if !prev.is_zero() {
                            x = field.sub(x, field.mul(c, prev));
                        }
                    }
                    r[j] = x;
                }
                for (slot, val) in acc.iter_mut().zip(r.iter()) {
                    *slot = field.add(*slot, *val);
                }
            }
        }
    }

    Ok(LaurentSeries::from_window(field, v, a, acc))
}

/// S_{<d}(k) = sum_{i<d} S_i(k), evaluated definitionally.
pub fn s_below_brute(
    ring: &PolyRing,
    d: u32,
    k: u64,
    a: i64,
    max_monics: u64,
) -> Result<LaurentSeries> {
    let mut acc = LaurentSeries::zero(ring.field(), a);
    for i in 0..d {
        acc = acc.add(&sd_brute(ring, i, k, a, max_monics)?);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::laurent::ls_from_rational;

    fn ring(q: &str) -> PolyRing {
        PolyRing::new(FieldSpec::parse(q).unwrap())
    }

    #[test]
    fn balanced_digit_forms() {
        // NAF of 31 = 32 - 1
        assert_eq!(balanced_digits(31, 2), vec![-1, 0, 0, 0, 0, 1]);
        assert_eq!(balanced_digits(7, 2), vec![-1, 0, 0, 1]);
        // q = 4: digit 3 becomes -1 with carry
        assert_eq!(balanced_digits(3, 4), vec![-1, 1]);
        assert_eq!(balanced_digits(63, 4), vec![-1, 0, 0, 1]);
        // reconstruction check over a range
        for q in [2u64, 3, 4, 5] {
            for k in 1..200u64 {
                let ds = balanced_digits(k, q);
                let mut acc: i128 = 0;
                for (i, &s) in ds.iter().enumerate() {
                    acc += (s as i128) * (q as i128).pow(i as u32);
                }
                assert_eq!(acc, k as i128, "q={q} k={k}");
            }
        }
    }

    #[test]
    fn degree_one_sum_matches_direct_rational_sum() {
        // S_1(k) = sum_{c in F_q} (t + c)^(-k): compare against summing the
        // expansions of each 1/(t+c)^k directly
        for qs in ["2", "3", "4"] {
            let r = ring(qs);
            let f = r.field();
            for k in 1..=9u64 {
                let a = (k as i64) + 40;
                let got = sd_brute(&r, 1, k, a, 1 << 20).unwrap();
                let mut want = LaurentSeries::zero(f, a);
                for c in f.elems() {
                    let lin = r.add(&r.t(), &r.constant(c));
                    let den = r.pow(&lin, k);
                    want = want.add(&ls_from_rational(&r, &r.one(), &den, a).unwrap());
                }
                assert!(
                    got.agree_to_common_precision(&want).is_ok(),
                    "q={qs} k={k}"
                );
            }
        }
    }

    #[test]
    fn carlitz_band_small_exponents() {
        // S_d(a) = 1/l_d^a for 1 <= a <= q
        for qs in ["2", "3", "4"] {
            let r = ring(qs);
            let q = r.q();
            for d in 1..=3u32 {
                for kk in 1..=q {
                    let n = (kk as i64) * (d as i64) + 30;
                    let got = sd_brute(&r, d, kk, n, 1 << 20).unwrap();
                    let want =
                        ls_from_rational(&r, &r.one(), &r.pow(&r.ell(d), kk), n).unwrap();
                    assert!(
                        got.agree_to_common_precision(&want).is_ok(),
                        "q={qs} d={d} k={kk}"
                    );
                }
            }
        }
    }

    #[test]
    fn zero_and_edge_conventions() {
        let r = ring("3");
        assert!(sd_brute(&r, 2, 0, 20, 1 << 20).unwrap().is_zero_to_precision());
        let s0 = sd_brute(&r, 0, 7, 20, 1 << 20).unwrap();
        assert_eq!(s0.valuation(), 0);
        assert_eq!(s0.coeff_at(0), Some(r.field().one()));
        // window entirely below the valuation collapses to zero
        assert!(sd_brute(&r, 3, 10, 5, 1 << 20).unwrap().is_zero_to_precision());
        let err = sd_brute(&r, 5, 1, 20, 10).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn below_sums_prefix() {
        let r = ring("2");
        let a = 40;
        let direct = s_below_brute(&r, 3, 5, a, 1 << 20).unwrap();
        let mut acc = LaurentSeries::zero(r.field(), a);
        for i in 0..3 {
            acc = acc.add(&sd_brute(&r, i, 5, a, 1 << 20).unwrap());
        }
        assert!(direct.agree_to_common_precision(&acc).is_ok());
        assert_eq!(direct.valuation(), 0); // S_0 contributes 1
    }
}
