//! Products and sums of bracket powers with exact Laurent materialization.
//!
//! The bracket [n] = t^(q^n) - t (with [0] = 0) and the falling product
//! l_n = (-1)^n [n][n-1]..[1] generate every closed form this crate needs. A
//! [`BracketTerm`] is c * prod_n [n]^(e_n) with e_n in Z (negative exponents
//! denote division); a [`BracketExpr`] is a sum of such terms.
//!
//! Materialization uses the shape [n] = u^(-q^n) (1 - u^(q^n - 1)): the
//! valuation of a term is -sum e_n q^n and its unit part is a product of
//! binomial factors (1 - u^g)^e. Each factor is reduced modulo u^W through
//! the char-p identity (1 - u^g)^(p^L) = 1 - u^(g p^L): exponents collapse
//! mod p^L once g p^L >= W, which makes huge and negative exponents exactly
//! as cheap as small ones.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::field::{binom_mod_p, FieldElem, FieldSpec};
use crate::laurent::LaurentSeries;
use crate::polyring::{PolyRing, RationalFunction};

/// Hard cap on a materialization window, as a memory/runaway guard.
const MAX_WINDOW: i64 = 1 << 28;

/// c * prod [n]^(e_n), possibly annihilated by a positive power of [0].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketTerm {
    field: FieldSpec,
    coeff: FieldElem,
    exps: BTreeMap<u32, i64>,
    dead: bool,
}

impl BracketTerm {
    pub fn one(field: FieldSpec) -> BracketTerm {
        BracketTerm { field, coeff: field.one(), exps: BTreeMap::new(), dead: false }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn coeff(&self) -> FieldElem {
        self.coeff
    }

    pub fn exps(&self) -> &BTreeMap<u32, i64> {
        &self.exps
    }

    /// True when the term is annihilated (contains [0] to a positive power)
    /// or has zero coefficient.
    pub fn is_zero(&self) -> bool {
        self.dead || self.coeff.is_zero()
    }

    /// Multiply by a scalar.
    pub fn scale(&mut self, c: FieldElem) -> &mut Self {
        self.coeff = self.field.mul(self.coeff, c);
        self
    }

    /// Multiply by [n]^e. [0] to a positive power annihilates the term;
    /// [0] to a negative power is a division by zero.
    pub fn mul_bracket(&mut self, n: u32, e: i64) -> Result<&mut Self> {
        if e == 0 {
            return Ok(self);
        }
        if n == 0 {
            if e < 0 {
                return Err(Error::DivisionByZero);
            }
            self.dead = true;
            return Ok(self);
        }
        let slot = self.exps.entry(n).or_insert(0);
        *slot += e;
        if *slot == 0 {
            self.exps.remove(&n);
        }
        Ok(self)
    }

    /// Multiply by l_n^e = ((-1)^n [n][n-1]..[1])^e; l_0 = 1.
    pub fn mul_ell(&mut self, n: u32, e: i64) -> &mut Self {
        if e == 0 || n == 0 {
            return self;
        }
        for i in 1..=n {
            self.mul_bracket(i, e).expect("i >= 1");
        }
        if (n as i64 * e) & 1 == 1 {
            self.coeff = self.field.neg(self.coeff);
        }
        self
    }

    /// Chainable builder: multiply by [n]^e, panicking on [0]^negative.
    pub fn bracket(mut self, n: u32, e: i64) -> Self {
        self.mul_bracket(n, e).expect("bracket builder: [0] to a negative power");
        self
    }

    /// Chainable builder: multiply by l_n^e.
    pub fn ell(mut self, n: u32, e: i64) -> Self {
        self.mul_ell(n, e);
        self
    }

    /// Chainable builder: multiply the coefficient by the image of `c` in F_p.
    pub fn c(mut self, c: i64) -> Self {
        let elem = self.field.from_i64(c);
        self.scale(elem);
        self
    }

    /// Multiply by another term over the same field.
    pub fn mul_term(&mut self, other: &BracketTerm) -> &mut Self {
        assert_eq!(self.field, other.field, "mixed fields in bracket product");
        self.coeff = self.field.mul(self.coeff, other.coeff);
        self.dead |= other.dead;
        for (&n, &e) in &other.exps {
            self.mul_bracket(n, e).expect("n >= 1 in a stored term");
        }
        self
    }

    /// Raise to an integer power: the coefficient is powered (inverted
    /// first for negative e), bracket exponents scale by e.
    pub fn powi(&self, e: i64) -> Result<BracketTerm> {
        if self.dead {
            return Err(Error::DivisionByZero);
        }
        let base = if e < 0 { self.field.inv(self.coeff)? } else { self.coeff };
        let coeff = self.field.pow(base, e.unsigned_abs());
        let mut exps = BTreeMap::new();
        if e != 0 {
            for (&n, &ex) in &self.exps {
                let scaled = ex.checked_mul(e).ok_or_else(|| {
                    Error::InvalidParams("bracket exponent overflow in powi".into())
                })?;
                exps.insert(n, scaled);
            }
        }
        Ok(BracketTerm { field: self.field, coeff, exps, dead: false })
    }

    /// Raise to the p^e-th power: exponents scale, the coefficient is
    /// twisted by Frobenius.
    pub fn frobenius_pow(&mut self, e: u32) -> &mut Self {
        if e == 0 {
            return self;
        }
        let step = (self.field.p() as i64).pow(e);
        for v in self.exps.values_mut() {
            *v = v.checked_mul(step).expect("twisted bracket exponent fits i64");
        }
        self.coeff = self.field.frobenius_pow(self.coeff, e);
        self
    }

    /// u-adic valuation -sum e_n q^n; `None` for the zero term.
    pub fn valuation(&self) -> Option<BigInt> {
        if self.is_zero() {
            return None;
        }
        let q = BigInt::from(self.field.q());
        let mut v = BigInt::from(0);
        for (&n, &e) in &self.exps {
            v -= BigInt::from(e) * q.pow(n);
        }
        Some(v)
    }

    /// Exact Laurent window [v, a) of the term.
    ///
    /// Every coefficient below `a` becomes known: the result is the term's
    /// series truncated at absolute precision `a`, with nothing approximate.
    pub fn materialize(&self, a: i64) -> LaurentSeries {
        let field = self.field;
        let v_big = match self.valuation() {
            None => return LaurentSeries::zero(field, a),
            Some(v) => v,
        };
        if v_big >= BigInt::from(a) {
            return LaurentSeries::zero(field, a);
        }
        let v: i64 = (&v_big).try_into().expect("materialization valuation fits i64");
        let w_i64 = a - v;
        assert!(w_i64 <= MAX_WINDOW, "materialization window {w_i64} too large");
        let w = w_i64 as usize;
        let p = field.p();
        let q = field.q();

        let mut acc = vec![field.zero(); w];
        acc[0] = self.coeff;
        for (&n, &e) in &self.exps {
            // factor (1 - u^g)^e mod u^W with g = q^n - 1
            let g = match q.checked_pow(n) {
                Some(x) => x - 1,
                None => continue, // g >= W for any window we allow
            };
            if g == 0 || g >= w as u64 {
                continue;
            }
            // reduce e mod p^L where g p^L >= W
            let mut plg: u64 = 1;
            while (g as u128) * (plg as u128) < w as u128 {
                plg *= p;
            }
            let e_red = e.rem_euclid(plg as i64) as u64;
            // base-p digits of e_red act at stretched gaps g p^i
            let mut rest = e_red;
            let mut gap = g;
            while rest > 0 {
                let digit = rest % p;
                rest /= p;
                if digit > 0 && gap < w as u64 {
                    // sparse factor sum_{j<=digit} C(digit, j) (-u^gap)^j
                    let mut next = vec![field.zero(); w];
                    for j in 0..=digit {
                        let mut cj = field.from_u64(binom_mod_p(digit, j, p));
                        if j & 1 == 1 {
                            cj = field.neg(cj);
                        }
                        if cj.is_zero() {
                            continue;
                        }
                        let off = (gap * j) as usize;
                        if off >= w {
                            break;
                        }
                        for i in 0..w - off {
                            if !acc[i].is_zero() {
                                next[i + off] =
                                    field.add(next[i + off], field.mul(cj, acc[i]));
                            }
                        }
                    }
                    acc = next;
                }
                match gap.checked_mul(p) {
                    Some(x) => gap = x,
                    None => break,
                }
            }
        }
        LaurentSeries::from_window(field, v, a, acc)
    }

    /// The term as a reduced rational function of t.
    pub fn to_rational(&self, ring: &PolyRing) -> Result<RationalFunction> {
        assert_eq!(ring.field(), self.field);
        if self.is_zero() {
            return RationalFunction::new(ring, ring.zero(), ring.one());
        }
        let mut num = ring.constant(self.coeff);
        let mut den = ring.one();
        for (&n, &e) in &self.exps {
            let b = ring.bracket(n);
            if e > 0 {
                num = ring.mul(&num, &ring.pow(&b, e as u64));
            } else {
                den = ring.mul(&den, &ring.pow(&b, (-e) as u64));
            }
        }
        RationalFunction::new(ring, num, den)
    }
}

impl fmt::Display for BracketTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let enc = self.field.encoding(self.coeff);
        let pos: Vec<(u32, i64)> =
            self.exps.iter().filter(|&(_, &e)| e > 0).map(|(&n, &e)| (n, e)).collect();
        let neg: Vec<(u32, i64)> =
            self.exps.iter().filter(|&(_, &e)| e < 0).map(|(&n, &e)| (n, -e)).collect();
        let part = |list: &[(u32, i64)]| -> String {
            list.iter()
                .map(|&(n, e)| if e == 1 { format!("[{n}]") } else { format!("[{n}]^{e}") })
                .collect::<Vec<_>>()
                .join("")
        };
        let mut head = String::new();
        if enc != 1 || pos.is_empty() {
            head.push_str(&enc.to_string());
            if !pos.is_empty() {
                head.push('*');
            }
        }
        head.push_str(&part(&pos));
        if neg.is_empty() {
            write!(f, "{head}")
        } else if neg.len() == 1 {
            write!(f, "{head}/{}", part(&neg))
        } else {
            write!(f, "{head}/({})", part(&neg))
        }
    }
}

/// A sum of bracket terms; terms with equal exponent maps merge.
#[derive(Debug, Clone)]
pub struct BracketExpr {
    field: FieldSpec,
    terms: Vec<BracketTerm>,
}

impl BracketExpr {
    pub fn zero(field: FieldSpec) -> BracketExpr {
        BracketExpr { field, terms: vec![] }
    }

    pub fn from_term(term: BracketTerm) -> BracketExpr {
        let mut e = BracketExpr::zero(term.field);
        e.push_term(term);
        e
    }

    pub fn terms(&self) -> &[BracketTerm] {
        &self.terms
    }

    pub fn push_term(&mut self, term: BracketTerm) {
        assert_eq!(self.field, term.field, "mixed fields in bracket sum");
        if term.is_zero() {
            return;
        }
        for existing in &mut self.terms {
            if existing.exps == term.exps {
                existing.coeff = self.field.add(existing.coeff, term.coeff);
                if existing.coeff.is_zero() {
                    let keep: Vec<BracketTerm> =
                        self.terms.iter().filter(|t| !t.is_zero()).cloned().collect();
                    self.terms = keep;
                }
                return;
            }
        }
        self.terms.push(term);
    }

    /// Smallest term valuation (a lower bound for the sum's valuation;
    /// leading terms may cancel). `None` when the expression is zero.
    pub fn min_valuation(&self) -> Option<BigInt> {
        self.terms.iter().filter_map(|t| t.valuation()).min()
    }

    /// Exact evaluation: sum of the terms' windows at absolute precision `a`.
    pub fn materialize(&self, a: i64) -> LaurentSeries {
        let mut acc = LaurentSeries::zero(self.field, a);
        for t in &self.terms {
            acc = acc.add(&t.materialize(a));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::ls_from_rational;

    fn ring(q: &str) -> PolyRing {
        PolyRing::new(FieldSpec::parse(q).unwrap())
    }

    #[test]
    fn bracket_window_matches_polynomial_expansion() {
        for qs in ["2", "3", "4"] {
            let r = ring(qs);
            let f = r.field();
            // [2]^3 * [1] as a term vs direct polynomial expansion
            let term = BracketTerm::one(f).bracket(2, 3).bracket(1, 1);
            let a = 40;
            let got = term.materialize(a);
            let poly = r.mul(&r.pow(&r.bracket(2), 3), &r.bracket(1));
            let want = ls_from_rational(&r, &poly, &r.one(), a).unwrap();
            assert!(got.agree_to_common_precision(&want).is_ok());
            assert_eq!(got.valuation(), want.valuation());
        }
    }

    #[test]
    fn negative_exponents_match_series_division() {
        let r = ring("3");
        let f = r.field();
        // [1]/[2]^2
        let term = BracketTerm::one(f).bracket(1, 1).bracket(2, -2);
        let a = 60;
        let got = term.materialize(a);
        let num = r.bracket(1);
        let den = r.pow(&r.bracket(2), 2);
        let want = ls_from_rational(&r, &num, &den, a).unwrap();
        assert!(got.agree_to_common_precision(&want).is_ok());
    }

    #[test]
    fn ell_sign_and_content() {
        let r = ring("3");
        let f = r.field();
        let term = BracketTerm::one(f).ell(3, 1);
        let got = term.materialize(5);
        let want = ls_from_rational(&r, &r.ell(3), &r.one(), 5).unwrap();
        assert!(got.agree_to_common_precision(&want).is_ok());
        // and an inverse power: l_2^{-4} * l_2^{4} == 1
        let t2 = BracketTerm::one(f).ell(2, -4).ell(2, 4);
        assert!(t2.exps().is_empty());
        assert_eq!(t2.coeff(), f.one());
    }

    #[test]
    fn dead_terms_and_zero_division() {
        let f = FieldSpec::parse("2").unwrap();
        let mut t = BracketTerm::one(f);
        t.mul_bracket(0, 2).unwrap();
        assert!(t.is_zero());
        assert!(t.materialize(10).is_zero_to_precision());
        let mut t2 = BracketTerm::one(f);
        assert_eq!(t2.mul_bracket(0, -1).unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn expr_merges_and_cancels() {
        let f = FieldSpec::parse("2").unwrap();
        let mut e = BracketExpr::zero(f);
        e.push_term(BracketTerm::one(f).bracket(1, 2));
        e.push_term(BracketTerm::one(f).bracket(1, 2));
        // char 2: the two equal terms cancel
        assert!(e.terms().is_empty());
        assert!(e.min_valuation().is_none());
        e.push_term(BracketTerm::one(f).bracket(1, 1));
        e.push_term(BracketTerm::one(f).bracket(2, 1));
        assert_eq!(e.min_valuation(), Some(BigInt::from(-4)));
    }

    #[test]
    fn huge_exponent_reduction() {
        // (1 - u^g)^(p^L) telescopes: [1]^(q * 2^10) over F_2 must equal the
        // direct polynomial expansion of ([1]^2)^(2^10) within a small window
        let r = ring("2");
        let f = r.field();
        let e: i64 = 2i64.pow(11);
        let term = BracketTerm::one(f).bracket(1, e);
        let a = -2 * e + 30;
        let got = term.materialize(a);
        // [1]^(2^11) = (t^2 + t)^(2^11) = t^(2^12) + t^(2^11)  (char 2)
        let poly = r.add(&r.t_pow(2usize.pow(12)), &r.t_pow(2usize.pow(11)));
        let want = ls_from_rational(&r, &poly, &r.one(), a).unwrap();
        assert!(got.agree_to_common_precision(&want).is_ok());
    }

    #[test]
    fn display_forms() {
        let f = FieldSpec::parse("4").unwrap();
        let t = BracketTerm::one(f).bracket(1, 12).bracket(2, -3);
        assert_eq!(t.to_string(), "[1]^12/[2]^3");
        let t2 = BracketTerm::one(f).bracket(1, 1).bracket(2, -1).bracket(3, -1);
        assert_eq!(t2.to_string(), "[1]/([2][3])");
        let t3 = BracketTerm::one(f).c(3).bracket(2, 2);
        // 3 = -1 has encoding p-1 ... in F_4, -1 = 1, 3 stays 3? 3 mod 2 = 1
        assert_eq!(t3.to_string(), "[2]^2");
    }

    #[test]
    fn rational_form_reduces() {
        let r = ring("2");
        let f = r.field();
        let t = BracketTerm::one(f).bracket(1, 2).bracket(2, -1);
        let rf = t.to_rational(&r).unwrap();
        // ([1]^2)/[2] over F_2: num (t^2+t)^2, den t^4+t -> reduced by gcd t^2+t...
        // [2] = t^4 + t = t(t+1)(t^2+t+1), [1]^2 = t^2(t+1)^2
        // gcd = t(t+1) -> num t(t+1), den t^2+t+1
        let want_num = r.from_ints(&[0, 1, 1]);
        let want_den = r.from_ints(&[1, 1, 1]);
        assert_eq!(rf, RationalFunction::new(&r, want_num, want_den).unwrap());
    }
}
