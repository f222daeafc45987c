//! Truncated Laurent series in u = 1/t over F_q, with explicit precision.
//!
//! A series f is stored as its known coefficient window: the dense vector of
//! coefficients for exponents v, v+1, .., n-1 together with the promise that
//! every exponent below v has coefficient zero. `n` is the *absolute
//! precision*: nothing is known at exponents >= n. Invariants:
//!
//! * `coeffs.len() == n - v`;
//! * if the window is nonempty, `coeffs[0] != 0` (so `v` is the true
//!   valuation); a series that is zero through its precision has an empty
//!   window and `v == n`;
//! * trailing zeros inside the window are significant (they are known zeros).
//!
//! Precision algebra is tight, not pessimistic: `add` keeps min(n1, n2),
//! `mul` keeps min(v1 + n2, v2 + n1), and inversion of a unit-led series
//! keeps n - 2v. Char-p exactness: `frobenius_pow` raises to the p^e-th power
//! coefficientwise at stretched indices and *multiplies* the precision by
//! p^e.
//!
//! The module also hosts the continued-fraction expansion over F_q((1/t))
//! used for rationality detection, with a conservative certification rule.

use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldSpec};
use crate::polyring::{Poly, PolyRing, RationalFunction};

/// A truncated Laurent series in u = 1/t.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    field: FieldSpec,
    v: i64,
    n: i64,
    coeffs: Vec<FieldElem>,
}

impl LaurentSeries {
    /// The zero-to-precision series: nothing nonzero known below `n`.
    pub fn zero(field: FieldSpec, n: i64) -> LaurentSeries {
        LaurentSeries { field, v: n, n, coeffs: vec![] }
    }

    /// Constant one, known through precision `n` (requires n > 0).
    pub fn one(field: FieldSpec, n: i64) -> LaurentSeries {
        LaurentSeries::monomial(field, field.one(), 0, n)
    }

    /// c * u^k, known through precision `n`.
    pub fn monomial(field: FieldSpec, c: FieldElem, k: i64, n: i64) -> LaurentSeries {
        if n <= k || c.is_zero() {
            return LaurentSeries::zero(field, n);
        }
        let mut coeffs = vec![field.zero(); (n - k) as usize];
        coeffs[0] = c;
        LaurentSeries { field, v: k, n, coeffs }
    }

    /// Build from a dense window starting at `v` with precision `n`;
    /// normalizes leading zeros.
    pub fn from_window(field: FieldSpec, v: i64, n: i64, coeffs: Vec<FieldElem>) -> LaurentSeries {
        assert_eq!(coeffs.len() as i64, n - v, "window length must equal n - v");
        let mut s = LaurentSeries { field, v, n, coeffs };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => {
                self.v = self.n;
                self.coeffs.clear();
            }
            Some(k) => {
                self.coeffs.drain(..k);
                self.v += k as i64;
            }
        }
        debug_assert_eq!(self.coeffs.len() as i64, self.n - self.v);
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// Valuation (index of the first known-nonzero coefficient). For a series
    /// that is zero through its precision this equals `n` and is not a true
    /// valuation; check `is_zero_to_precision` first when it matters.
    pub fn valuation(&self) -> i64 {
        self.v
    }

    /// Absolute precision: coefficients are known for exponents < n.
    pub fn precision(&self) -> i64 {
        self.n
    }

    pub fn is_zero_to_precision(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient at exponent i: `Some(zero)` below the valuation, the
    /// stored value inside the window, `None` at or beyond the precision.
    pub fn coeff_at(&self, i: i64) -> Option<FieldElem> {
        if i >= self.n {
            None
        } else if i < self.v {
            Some(self.field.zero())
        } else {
            Some(self.coeffs[(i - self.v) as usize])
        }
    }

    /// Drop knowledge at exponents >= `to_n` (never increases precision).
    pub fn truncate(&self, to_n: i64) -> LaurentSeries {
        if to_n >= self.n {
            return self.clone();
        }
        if to_n <= self.v {
            return LaurentSeries::zero(self.field, to_n);
        }
        let mut out = LaurentSeries {
            field: self.field,
            v: self.v,
            n: to_n,
            coeffs: self.coeffs[..(to_n - self.v) as usize].to_vec(),
        };
        out.normalize();
        out
    }

    /// Multiply by u^k (exact).
    pub fn shift(&self, k: i64) -> LaurentSeries {
        LaurentSeries {
            field: self.field,
            v: self.v + k,
            n: self.n + k,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn scale(&self, c: FieldElem) -> LaurentSeries {
        if c.is_zero() {
            return LaurentSeries::zero(self.field, self.n);
        }
        let mut out = LaurentSeries {
            field: self.field,
            v: self.v,
            n: self.n,
            coeffs: self.coeffs.iter().map(|&x| self.field.mul(x, c)).collect(),
        };
        out.normalize(); // scaling by a unit keeps the lead nonzero, but stay safe
        out
    }

    pub fn add(&self, other: &LaurentSeries) -> LaurentSeries {
        assert_eq!(self.field, other.field, "mixed fields in series add");
        let n = self.n.min(other.n);
        let v = self.v.min(other.v).min(n);
        let mut coeffs = vec![self.field.zero(); (n - v) as usize];
        for i in v..n {
            let a = self.coeff_at(i).unwrap_or_else(|| self.field.zero());
            let b = other.coeff_at(i).unwrap_or_else(|| self.field.zero());
            coeffs[(i - v) as usize] = self.field.add(a, b);
        }
        LaurentSeries::from_window(self.field, v, n, coeffs)
    }

    pub fn neg(&self) -> LaurentSeries {
        LaurentSeries {
            field: self.field,
            v: self.v,
            n: self.n,
            coeffs: self.coeffs.iter().map(|&x| self.field.neg(x)).collect(),
        }
    }

    pub fn sub(&self, other: &LaurentSeries) -> LaurentSeries {
        self.add(&other.neg())
    }

    /// Product, with precision min(v1 + n2, v2 + n1).
    pub fn mul(&self, other: &LaurentSeries) -> LaurentSeries {
        assert_eq!(self.field, other.field, "mixed fields in series mul");
        let n = (self.v + other.n).min(other.v + self.n);
        let v = self.v + other.v;
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return LaurentSeries::zero(self.field, n);
        }
        let w = (n - v) as usize;
        let mut coeffs = vec![self.field.zero(); w];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= w {
                continue;
            }
            let lim = (w - i).min(other.coeffs.len());
            for (j, &b) in other.coeffs.iter().enumerate().take(lim) {
                coeffs[i + j] = self.field.add(coeffs[i + j], self.field.mul(a, b));
            }
        }
        LaurentSeries::from_window(self.field, v, n, coeffs)
    }

    /// Inverse of a series whose window is nonempty (true valuation known).
    /// Result precision: n - 2v.
    pub fn inv(&self) -> Result<LaurentSeries> {
        if self.coeffs.is_empty() {
            return Err(Error::DivisionByZero);
        }
        let w = self.coeffs.len();
        let lead_inv = self.field.inv(self.coeffs[0])?;
        let mut out = vec![self.field.zero(); w];
        out[0] = lead_inv;
        for k in 1..w {
            // sum_{j=1..k} g_j h_{k-j} with g the unit part of self
            let mut acc = self.field.zero();
            for j in 1..=k {
                let g = self.coeffs[j];
                if g.is_zero() {
                    continue;
                }
                acc = self.field.add(acc, self.field.mul(g, out[k - j]));
            }
            out[k] = self.field.neg(self.field.mul(acc, lead_inv));
        }
        Ok(LaurentSeries::from_window(self.field, -self.v, self.n - 2 * self.v, out))
    }

    pub fn div(&self, other: &LaurentSeries) -> Result<LaurentSeries> {
        Ok(self.mul(&other.inv()?))
    }

    /// Exact p^e-th power: coefficients are raised to the p^e, indices and
    /// precision stretch by p^e.
    pub fn frobenius_pow(&self, e: u32) -> LaurentSeries {
        if e == 0 {
            return self.clone();
        }
        let p = self.field.p();
        let step = (0..e).fold(1i64, |acc, _| {
            acc.checked_mul(p as i64).expect("p^e fits i64 for series stretching")
        });
        let v = self.v.checked_mul(step).expect("stretched valuation fits");
        let n = self.n.checked_mul(step).expect("stretched precision fits");
        if self.coeffs.is_empty() {
            return LaurentSeries::zero(self.field, n);
        }
        let mut coeffs = vec![self.field.zero(); (n - v) as usize];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                coeffs[i * step as usize] = self.field.frobenius_pow(c, e);
            }
        }
        LaurentSeries::from_window(self.field, v, n, coeffs)
    }

    /// Positive power by binary exponentiation (precision follows the mul
    /// rule at each step); e = 0 gives one at width n - v.
    pub fn pow(&self, e: u64) -> LaurentSeries {
        if e == 0 {
            return LaurentSeries::one(self.field, self.n - self.v);
        }
        let mut base = self.clone();
        let mut k = e;
        let mut acc: Option<LaurentSeries> = None;
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc.expect("e > 0")
    }

    /// Equality of the known parts: agree on every exponent below
    /// min(n1, n2) (implied zeros included). Returns the first disagreeing
    /// exponent otherwise.
    pub fn agree_to_common_precision(&self, other: &LaurentSeries) -> std::result::Result<i64, i64> {
        let n = self.n.min(other.n);
        let lo = self.v.min(other.v);
        for i in lo..n {
            let a = self.coeff_at(i).unwrap_or_else(|| self.field.zero());
            let b = other.coeff_at(i).unwrap_or_else(|| other.field.zero());
            if a != b {
                return Err(i);
            }
        }
        Ok(n)
    }

    /// JSON value {"v": .., "n": .., "coeffs": [encodings]}.
    pub fn to_json(&self) -> serde_json::Value {
        let coeffs: Vec<u64> = self.coeffs.iter().map(|&c| self.field.encoding(c)).collect();
        serde_json::json!({
            "v": self.v,
            "n": self.n,
            "coeffs": coeffs,
        })
    }

    /// Human form: "c*u^i + ... + O(u^n)", skipping zero coefficients.
    pub fn render(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.v + i as i64;
            let enc = self.field.encoding(c);
            let term = match (enc, e) {
                (_, 0) => enc.to_string(),
                (1, 1) => "u".to_string(),
                (1, _) => format!("u^{e}"),
                (_, 1) => format!("{enc}*u"),
                (_, _) => format!("{enc}*u^{e}"),
            };
            parts.push(term);
            if parts.len() >= 64 {
                parts.push("..".into());
                break;
            }
        }
        let body = if parts.is_empty() { "0".to_string() } else { parts.join(" + ") };
        format!("{body} + O(u^{})", self.n)
    }
}

/// Expand a polynomial in t as an exact series in u = 1/t, truncated at
/// absolute precision `n`: t^d becomes u^(-d).
pub fn ls_from_poly(ring: &PolyRing, a: &Poly, n: i64) -> LaurentSeries {
    let field = ring.field();
    match a.deg() {
        None => LaurentSeries::zero(field, n),
        Some(d) => {
            let v = -(d as i64);
            if n <= v {
                return LaurentSeries::zero(field, n);
            }
            let mut coeffs = vec![field.zero(); (n - v) as usize];
            for (i, &c) in a.coeffs().iter().enumerate() {
                // t^i = u^{-i} sits at window index (-i) - v = d - i
                let idx = d - i;
                if idx < coeffs.len() {
                    coeffs[idx] = c;
                }
            }
            LaurentSeries::from_window(field, v, n, coeffs)
        }
    }
}

/// Expand num/den as a series in u = 1/t to absolute precision `n`, by
/// power-series long division on the reversed coefficients. Exact to any
/// requested precision. The zero numerator gives the zero series.
pub fn ls_from_rational(ring: &PolyRing, num: &Poly, den: &Poly, n: i64) -> Result<LaurentSeries> {
    let field = ring.field();
    let dd = den.deg().ok_or(Error::ZeroDenominator)?;
    let dn = match num.deg() {
        None => return Ok(LaurentSeries::zero(field, n)),
        Some(d) => d,
    };
    let v = dd as i64 - dn as i64;
    if n <= v {
        return Ok(LaurentSeries::zero(field, n));
    }
    let w = (n - v) as usize;
    // reversed-coefficient units: num_u[i] = num[dn - i], den_u[i] = den[dd - i]
    let lead_inv = field.inv(den.lead().unwrap())?;
    let mut out = vec![field.zero(); w];
    for k in 0..w {
        let mut acc = if k <= dn { num.coeffs()[dn - k] } else { field.zero() };
        for j in 1..=k.min(dd) {
            let dj = den.coeffs()[dd - j];
            if dj.is_zero() {
                continue;
            }
            acc = field.sub(acc, field.mul(dj, out[k - j]));
        }
        out[k] = field.mul(acc, lead_inv);
    }
    Ok(LaurentSeries::from_window(field, v, n, out))
}

/// Verdict of a continued-fraction rationality probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfVerdict {
    /// The tail vanished to precision, the degree budget certified the
    /// convergent, and re-expansion reproduced every known coefficient.
    Rational,
    /// No rational function within the certifiable degree budget matches;
    /// with the guard margin this is strong numerical evidence of
    /// irrationality at this precision.
    Irrational,
    /// Precision ran out before anything could be certified.
    Inconclusive,
}

/// Outcome of [`cf_expand`].
#[derive(Debug, Clone)]
pub struct CfResult {
    pub verdict: CfVerdict,
    /// Partial quotients a_0, a_1, .. (polynomials in t) computed before the
    /// probe stopped.
    pub quotients: Vec<Poly>,
    /// For `Rational`: the certified P/Q in canonical form.
    pub reconstructed: Option<RationalFunction>,
    /// For `Rational`: the slack (n + v) - (deg P + deg Q) actually attained.
    pub guard_used: Option<i64>,
}

/// Extract the polynomial part (exponents <= 0, as a polynomial in t) and the
/// strictly-positive-exponent tail. Requires f.precision() >= 1 so the whole
/// polynomial part is inside the known window.
fn split_poly_part(ring: &PolyRing, f: &LaurentSeries) -> (Poly, LaurentSeries) {
    let field = ring.field();
    debug_assert!(f.precision() >= 1);
    let mut coeffs = vec![field.zero(); (-f.valuation()).max(0) as usize + 1];
    for e in f.valuation()..=0 {
        coeffs[(-e) as usize] = f.coeff_at(e).unwrap();
    }
    let poly = ring.from_coeffs(coeffs);
    let n = f.precision();
    let v_tail = f.valuation().max(1); // <= n since n >= 1
    let mut tail = vec![field.zero(); (n - v_tail) as usize];
    for e in v_tail..n {
        tail[(e - v_tail) as usize] = f.coeff_at(e).unwrap();
    }
    (poly, LaurentSeries::from_window(field, v_tail, n, tail))
}

/// Continued-fraction expansion of f over F_q((1/t)) with rationality
/// certification.
///
/// The expansion computes partial quotients a_i and convergents P_i/Q_i. It
/// declares `Rational` only when (1) the remainder vanished through its whole
/// precision window, (2) deg P + deg Q + guard <= n + v (the information
/// actually seen certifies a fraction of that size), and (3) re-expanding the
/// canonical P/Q reproduces f on every known coefficient. If precision runs
/// out mid-quotient the probe is `Inconclusive`; if the degree budget is
/// exhausted while the remainder is still nonzero it reports `Irrational`.
pub fn cf_expand(ring: &PolyRing, f: &LaurentSeries, guard: i64) -> Result<CfResult> {
    let n_input = f.precision();
    let v_input = f.valuation().min(n_input);
    let budget = n_input + v_input;
    let mut quotients: Vec<Poly> = Vec::new();

    // Knowing the complete polynomial part requires precision past u^0.
    if n_input < 1 {
        return Ok(CfResult {
            verdict: CfVerdict::Inconclusive,
            quotients,
            reconstructed: None,
            guard_used: None,
        });
    }

    let mut p_prev = ring.one(); // P_{-1}
    let mut p_prev2 = ring.zero(); // P_{-2}
    let mut q_prev = ring.zero(); // Q_{-1}
    let mut q_prev2 = ring.one(); // Q_{-2}

    let mut rem = f.clone();
    loop {
        // polynomial part of rem must be complete
        if rem.precision() < 1 {
            return Ok(CfResult {
                verdict: CfVerdict::Inconclusive,
                quotients,
                reconstructed: None,
                guard_used: None,
            });
        }
        let (a, tail) = split_poly_part(ring, &rem);
        if !quotients.is_empty() && a.deg().unwrap_or(0) < 1 {
            // partial quotients after a_0 have degree >= 1 in a valid
            // expansion; a constant here means the series was not reduced
            // (cannot happen with exact arithmetic) — treat as inconclusive
            return Ok(CfResult {
                verdict: CfVerdict::Inconclusive,
                quotients,
                reconstructed: None,
                guard_used: None,
            });
        }
        let p_cur = ring.add(&ring.mul(&a, &p_prev), &p_prev2);
        let q_cur = ring.add(&ring.mul(&a, &q_prev), &q_prev2);
        quotients.push(a);
        let deg_sum = p_cur.deg().unwrap_or(0) as i64 + q_cur.deg().unwrap_or(0) as i64;

        if tail.is_zero_to_precision() {
            // rational candidate
            if deg_sum + guard > budget {
                return Ok(CfResult {
                    verdict: CfVerdict::Inconclusive,
                    quotients,
                    reconstructed: None,
                    guard_used: None,
                });
            }
            let cand = RationalFunction::new(ring, p_cur, q_cur)?;
            // mandatory re-expansion check over the full known range
            let re = ls_from_rational(ring, cand.num(), cand.den(), n_input)?;
            let ok = re.agree_to_common_precision(f).is_ok();
            if !ok {
                return Ok(CfResult {
                    verdict: CfVerdict::Inconclusive,
                    quotients,
                    reconstructed: None,
                    guard_used: None,
                });
            }
            return Ok(CfResult {
                verdict: CfVerdict::Rational,
                quotients,
                reconstructed: Some(cand),
                guard_used: Some(budget - deg_sum),
            });
        }

        if deg_sum + guard > budget {
            // cannot certify anything this large; remainder is still nonzero
            return Ok(CfResult {
                verdict: CfVerdict::Irrational,
                quotients,
                reconstructed: None,
                guard_used: None,
            });
        }

        // invert the tail for the next quotient
        let inv = match tail.inv() {
            Ok(s) => s,
            Err(_) => {
                return Ok(CfResult {
                    verdict: CfVerdict::Inconclusive,
                    quotients,
                    reconstructed: None,
                    guard_used: None,
                })
            }
        };
        rem = inv;
        p_prev2 = std::mem::replace(&mut p_prev, p_cur);
        q_prev2 = std::mem::replace(&mut q_prev, q_cur);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    fn ring(q: &str) -> PolyRing {
        PolyRing::new(FieldSpec::parse(q).unwrap())
    }

    #[test]
    fn monomial_and_window() {
        let f = FieldSpec::parse("3").unwrap();
        let s = LaurentSeries::monomial(f, f.one(), -2, 5);
        assert_eq!(s.valuation(), -2);
        assert_eq!(s.precision(), 5);
        assert_eq!(s.coeff_at(-2), Some(f.one()));
        assert_eq!(s.coeff_at(-5), Some(f.zero()));
        assert_eq!(s.coeff_at(7), None);
    }

    #[test]
    fn add_mul_precision_rules() {
        let f = FieldSpec::parse("2").unwrap();
        let a = LaurentSeries::monomial(f, f.one(), 1, 10); // u, known to 10
        let b = LaurentSeries::monomial(f, f.one(), 3, 6); // u^3, known to 6
        let s = a.add(&b);
        assert_eq!(s.precision(), 6);
        assert_eq!(s.valuation(), 1);
        let m = a.mul(&b);
        // min(v_a + n_b, v_b + n_a) = min(1 + 6, 3 + 10) = 7
        assert_eq!(m.precision(), 7);
        assert_eq!(m.valuation(), 4);
    }

    #[test]
    fn zero_to_precision_mul() {
        let f = FieldSpec::parse("2").unwrap();
        let z = LaurentSeries::zero(f, 4);
        let a = LaurentSeries::monomial(f, f.one(), 2, 9);
        let m = z.mul(&a);
        assert!(m.is_zero_to_precision());
        assert_eq!(m.precision(), (4 + 2).min(9 + 4));
    }

    #[test]
    fn inversion_round_trip() {
        let r = ring("5");
        let f = r.field();
        // s = u^-1 + 2 + 3u (i.e. t + 2 + 3/t), to precision 8
        let s = LaurentSeries::from_window(
            f,
            -1,
            8,
            vec![
                f.from_u64(1),
                f.from_u64(2),
                f.from_u64(3),
                f.zero(),
                f.zero(),
                f.zero(),
                f.zero(),
                f.zero(),
                f.zero(),
            ],
        );
        let inv = s.inv().unwrap();
        assert_eq!(inv.valuation(), 1);
        assert_eq!(inv.precision(), 8 + 2);
        let prod = s.mul(&inv);
        let one = LaurentSeries::one(f, prod.precision());
        assert_eq!(prod.agree_to_common_precision(&one), Ok(prod.precision()));
    }

    #[test]
    fn rational_expansion_exact() {
        let r = ring("3");
        // (t^2 + 1) / (t^3 + 2t + 1): valuation 1
        let num = r.from_ints(&[1, 0, 1]);
        let den = r.from_ints(&[1, 2, 0, 1]);
        let s = ls_from_rational(&r, &num, &den, 40).unwrap();
        assert_eq!(s.valuation(), 1);
        // multiply back: s * den == num as series
        let den_s = ls_from_poly(&r, &den, 40);
        let num_s = ls_from_poly(&r, &num, 40);
        let back = s.mul(&den_s);
        assert!(back.agree_to_common_precision(&num_s).is_ok());
    }

    #[test]
    fn frobenius_pow_exact() {
        let r = ring("9");
        let f = r.field();
        let num = r.from_encodings(&[1, 4]).unwrap();
        let den = r.from_encodings(&[2, 0, 1]).unwrap();
        let s = ls_from_rational(&r, &num, &den, 11).unwrap();
        let cubed = s.frobenius_pow(1);
        assert_eq!(cubed.precision(), 33);
        // compare against direct multiplication
        let direct = s.mul(&s).mul(&s);
        assert!(cubed.agree_to_common_precision(&direct).is_ok());
        let _ = f;
    }

    #[test]
    fn cf_round_trip_certifies() {
        let r = ring("2");
        let num = r.from_ints(&[1, 1, 0, 1]); // 1 + t + t^3
        let den = r.from_ints(&[1, 0, 1, 1, 1]); // 1 + t^2 + t^3 + t^4
        let s = ls_from_rational(&r, &num, &den, 60).unwrap();
        let cf = cf_expand(&r, &s, 10).unwrap();
        assert_eq!(cf.verdict, CfVerdict::Rational);
        let rec = cf.reconstructed.unwrap();
        let expect = RationalFunction::new(&r, num, den).unwrap();
        assert_eq!(rec, expect);
        assert!(cf.guard_used.unwrap() >= 10);
    }

    #[test]
    fn cf_on_polynomial() {
        let r = ring("3");
        let poly = r.from_ints(&[2, 0, 1, 1]);
        let s = ls_from_rational(&r, &poly, &r.one(), 30).unwrap();
        let cf = cf_expand(&r, &s, 5).unwrap();
        assert_eq!(cf.verdict, CfVerdict::Rational);
        assert_eq!(cf.reconstructed.unwrap().num(), &poly);
        assert_eq!(cf.quotients.len(), 1);
    }

    #[test]
    fn cf_square_indicator_not_rational() {
        let r = ring("2");
        let f = r.field();
        // indicator of perfect squares: gap growth makes the sequence
        // aperiodic, hence the series is not a rational function
        let coeffs: Vec<FieldElem> = (0..80u64)
            .map(|i| {
                let s = (i as f64).sqrt() as u64;
                f.from_u64(u64::from(s * s == i || (s + 1) * (s + 1) == i))
            })
            .collect();
        let s = LaurentSeries::from_window(f, 0, 80, coeffs);
        let cf = cf_expand(&r, &s, 10).unwrap();
        assert_ne!(cf.verdict, CfVerdict::Rational);
    }

    #[test]
    fn render_and_json() {
        let f = FieldSpec::parse("4").unwrap();
        let s = LaurentSeries::from_window(
            f,
            -1,
            3,
            vec![f.from_encoding(2).unwrap(), f.zero(), f.from_encoding(3).unwrap(), f.one()],
        );
        assert_eq!(s.render(), "2*u^-1 + 3*u + u^2 + O(u^3)");
        let j = s.to_json();
        assert_eq!(j["v"], -1);
        assert_eq!(j["coeffs"][0], 2);
    }
}
