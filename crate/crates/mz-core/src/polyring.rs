//! Dense univariate polynomials over F_q in the variable t, and the bracket
//! polynomials of Carlitz arithmetic.
//!
//! Conventions:
//! * coefficients are stored constant-first with no trailing zeros; the zero
//!   polynomial has an empty coefficient vector;
//! * `deg` returns `None` for the zero polynomial;
//! * [n] = t^(q^n) - t (so [0] = 0), ell_n = prod_{i=1..n} (t - t^(q^i)) =
//!   (-1)^n [n][n-1]..[1] with ell_0 = 1, and D_n = [n] D_{n-1}^q with
//!   D_0 = 1. deg ell_n = q + q^2 + .. + q^n.
//!
//! Multiplication switches from schoolbook to Karatsuba above degree 512.

use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldSpec};

/// Degree threshold above which multiplication uses Karatsuba splitting.
const KARATSUBA_MIN: usize = 512;

/// The ring F_q[t]; a copyable descriptor applying operations to [`Poly`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolyRing {
    field: FieldSpec,
}

/// A polynomial over F_q, constant-first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<FieldElem>,
}

impl Poly {
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    /// Coefficient of t^i (zero beyond the degree).
    pub fn coeff(&self, i: usize, ring: &PolyRing) -> FieldElem {
        self.coeffs.get(i).copied().unwrap_or_else(|| ring.field.zero())
    }

    /// Leading coefficient; `None` for zero.
    pub fn lead(&self) -> Option<FieldElem> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self, ring: &PolyRing) -> bool {
        self.lead() == Some(ring.field().one())
    }
}

impl PolyRing {
    pub fn new(field: FieldSpec) -> PolyRing {
        PolyRing { field }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn q(&self) -> u64 {
        self.field.q()
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    fn normalize(&self, mut coeffs: Vec<FieldElem>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero(&self) -> Poly {
        Poly { coeffs: vec![] }
    }

    pub fn one(&self) -> Poly {
        Poly { coeffs: vec![self.field.one()] }
    }

    /// The variable t.
    pub fn t(&self) -> Poly {
        Poly { coeffs: vec![self.field.zero(), self.field.one()] }
    }

    pub fn constant(&self, c: FieldElem) -> Poly {
        self.normalize(vec![c])
    }

    /// t^n.
    pub fn t_pow(&self, n: usize) -> Poly {
        let mut coeffs = vec![self.field.zero(); n + 1];
        coeffs[n] = self.field.one();
        Poly { coeffs }
    }

    pub fn from_coeffs(&self, coeffs: Vec<FieldElem>) -> Poly {
        for &c in &coeffs {
            self.field.check(c).expect("coefficient from a different field");
        }
        self.normalize(coeffs)
    }

    /// Build from integer coefficients (each embedded into F_q as a constant
    /// of the prime field).
    pub fn from_ints(&self, ints: &[i64]) -> Poly {
        self.normalize(ints.iter().map(|&n| self.field.from_i64(n)).collect())
    }

    /// Build from canonical element encodings.
    pub fn from_encodings(&self, encs: &[u64]) -> Result<Poly> {
        let coeffs: Result<Vec<FieldElem>> =
            encs.iter().map(|&e| self.field.from_encoding(e)).collect();
        Ok(self.normalize(coeffs?))
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.coeffs.len().max(b.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let x = a.coeffs.get(i).copied().unwrap_or_else(|| self.field.zero());
            let y = b.coeffs.get(i).copied().unwrap_or_else(|| self.field.zero());
            out.push(self.field.add(x, y));
        }
        self.normalize(out)
    }

    pub fn neg(&self, a: &Poly) -> Poly {
        Poly { coeffs: a.coeffs.iter().map(|&c| self.field.neg(c)).collect() }
    }

    pub fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &Poly, c: FieldElem) -> Poly {
        if c.is_zero() {
            return self.zero();
        }
        Poly { coeffs: a.coeffs.iter().map(|&x| self.field.mul(x, c)).collect() }
    }

    fn mul_schoolbook(&self, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![self.field.zero(); a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.field.add(out[i + j], self.field.mul(x, y));
            }
        }
        out
    }

    fn add_into(&self, acc: &mut Vec<FieldElem>, src: &[FieldElem], shift: usize) {
        if acc.len() < src.len() + shift {
            acc.resize(src.len() + shift, self.field.zero());
        }
        for (i, &c) in src.iter().enumerate() {
            acc[i + shift] = self.field.add(acc[i + shift], c);
        }
    }

    fn mul_slices(&self, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
        if a.len().min(b.len()) <= KARATSUBA_MIN {
            return self.mul_schoolbook(a, b);
        }
        // Karatsuba: a = a0 + a1 x^h, b = b0 + b1 x^h.
        let h = a.len().max(b.len()) / 2;
        let (a0, a1) = a.split_at(h.min(a.len()));
        let (b0, b1) = b.split_at(h.min(b.len()));
        let z0 = self.mul_slices(a0, b0);
        let z2 = self.mul_slices(a1, b1);
        let asum: Vec<FieldElem> = {
            let n = a0.len().max(a1.len());
            (0..n)
                .map(|i| {
                    self.field.add(
                        a0.get(i).copied().unwrap_or_else(|| self.field.zero()),
                        a1.get(i).copied().unwrap_or_else(|| self.field.zero()),
                    )
                })
                .collect()
        };
        let bsum: Vec<FieldElem> = {
            let n = b0.len().max(b1.len());
            (0..n)
                .map(|i| {
                    self.field.add(
                        b0.get(i).copied().unwrap_or_else(|| self.field.zero()),
                        b1.get(i).copied().unwrap_or_else(|| self.field.zero()),
                    )
                })
                .collect()
        };
        let mut z1 = self.mul_slices(&asum, &bsum);
        // z1 -= z0 + z2 (z1 is at least as long as both, by construction)
        for (i, &c) in z0.iter().enumerate() {
            z1[i] = self.field.sub(z1[i], c);
        }
        for (i, &c) in z2.iter().enumerate() {
            z1[i] = self.field.sub(z1[i], c);
        }
        let mut out = vec![self.field.zero(); a.len() + b.len() - 1];
        self.add_into(&mut out, &z0, 0);
        self.add_into(&mut out, &z1, h);
        self.add_into(&mut out, &z2, 2 * h);
        // The Karatsuba identity is exact, so anything past the product
        // degree is zero padding; drop it to keep the "exact convolution
        // length" invariant for recursive callers.
        out.truncate(a.len() + b.len() - 1);
        out
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        let coeffs = self.mul_slices(&a.coeffs, &b.coeffs);
        self.normalize(coeffs)
    }

    /// Binary exponentiation.
    pub fn pow(&self, a: &Poly, mut e: u64) -> Poly {
        let mut base = a.clone();
        let mut out = self.one();
        while e > 0 {
            if e & 1 == 1 {
                out = self.mul(&out, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        out
    }

    /// Quotient and remainder; errors on zero divisor.
    pub fn divrem(&self, num: &Poly, den: &Poly) -> Result<(Poly, Poly)> {
        let dd = den.deg().ok_or(Error::DivisionByZero)?;
        let lead_inv = self.field.inv(den.lead().unwrap())?;
        let mut rem = num.coeffs.clone();
        if rem.len() <= dd {
            return Ok((self.zero(), self.normalize(rem)));
        }
        let mut quot = vec![self.field.zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i];
            if c.is_zero() {
                continue;
            }
            let f = self.field.mul(c, lead_inv);
            quot[i - dd] = f;
            for (j, &dc) in den.coeffs.iter().enumerate() {
                rem[i - dd + j] = self.field.sub(rem[i - dd + j], self.field.mul(f, dc));
            }
        }
        Ok((self.normalize(quot), self.normalize(rem)))
    }

    pub fn rem(&self, num: &Poly, den: &Poly) -> Result<Poly> {
        Ok(self.divrem(num, den)?.1)
    }

    /// Make a nonzero polynomial monic.
    pub fn monic(&self, a: &Poly) -> Poly {
        match a.lead() {
            None => self.zero(),
            Some(l) => self.scale(a, self.field.inv(l).expect("nonzero lead")),
        }
    }

    /// Monic greatest common divisor; gcd(0, 0) = 0.
    pub fn gcd(&self, a: &Poly, b: &Poly) -> Poly {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let r = self.rem(&x, &y).expect("nonzero divisor");
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    pub fn eval(&self, a: &Poly, x: FieldElem) -> FieldElem {
        let mut out = self.field.zero();
        for &c in a.coeffs.iter().rev() {
            out = self.field.add(self.field.mul(out, x), c);
        }
        out
    }

    /// Substitute t -> t^(q^e); over F_q this equals the q^e-th power map on
    /// polynomials, since c^q = c for every coefficient.
    pub fn frobenius_substitute(&self, a: &Poly, e: u32) -> Poly {
        if a.is_zero() {
            return self.zero();
        }
        let step = self
            .q()
            .checked_pow(e)
            .and_then(|s| usize::try_from(s).ok())
            .expect("q^e fits usize");
        let mut coeffs = vec![self.field.zero(); (a.coeffs.len() - 1) * step + 1];
        for (i, &c) in a.coeffs.iter().enumerate() {
            coeffs[i * step] = c;
        }
        Poly { coeffs }
    }

    /// The bracket [n] = t^(q^n) - t; [0] = 0.
    pub fn bracket(&self, n: u32) -> Poly {
        if n == 0 {
            return self.zero();
        }
        let deg = self
            .q()
            .checked_pow(n)
            .and_then(|d| usize::try_from(d).ok())
            .expect("bracket degree fits usize");
        assert!(deg <= 1 << 26, "bracket [{n}] too large to materialize");
        let mut coeffs = vec![self.field.zero(); deg + 1];
        coeffs[deg] = self.field.one();
        coeffs[1] = self.field.neg(self.field.one());
        Poly { coeffs }
    }

    /// ell_n = prod_{i=1..n} (t - t^(q^i)) = (-1)^n [n][n-1]..[1]; ell_0 = 1.
    pub fn ell(&self, n: u32) -> Poly {
        let mut out = self.one();
        for i in 1..=n {
            out = self.mul(&out, &self.neg(&self.bracket(i)));
        }
        out
    }

    /// Carlitz factorial D_n = [n] D_{n-1}^q, D_0 = 1.
    pub fn d_n(&self, n: u32) -> Poly {
        let mut out = self.one();
        for i in 1..=n {
            out = self.mul(&self.bracket(i), &self.pow(&out, self.q()));
        }
        out
    }

    /// Iterator over all q^d monic polynomials of degree d, in encoding order
    /// of their coefficient vectors (deterministic).
    pub fn monics(&self, d: u32) -> Monics<'_> {
        let count = self
            .q()
            .checked_pow(d)
            .expect("q^d fits u64; keep enumeration degrees small");
        Monics { ring: self, d, idx: 0, count }
    }

    /// Textual form: comma-separated canonical encodings, constant first.
    /// The zero polynomial renders as "0".
    pub fn fmt_poly(&self, a: &Poly) -> String {
        if a.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> =
            a.coeffs.iter().map(|&c| self.field.encoding(c).to_string()).collect();
        parts.join(",")
    }
}

/// Iterator over monic polynomials of fixed degree.
pub struct Monics<'a> {
    ring: &'a PolyRing,
    d: u32,
    idx: u64,
    count: u64,
}

impl Iterator for Monics<'_> {
    type Item = Poly;

    fn next(&mut self) -> Option<Poly> {
        if self.idx >= self.count {
            return None;
        }
        let field = self.ring.field();
        let q = field.q();
        let mut coeffs = Vec::with_capacity(self.d as usize + 1);
        let mut rest = self.idx;
        for _ in 0..self.d {
            coeffs.push(field.from_encoding(rest % q).expect("in range"));
            rest /= q;
        }
        coeffs.push(field.one());
        self.idx += 1;
        Some(Poly { coeffs })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.count - self.idx) as usize;
        (left, Some(left))
    }
}

/// A quotient of polynomials in canonical form: gcd(num, den) = 1, den monic,
/// zero represented as 0/1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(ring: &PolyRing, num: Poly, den: Poly) -> Result<RationalFunction> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(RationalFunction { num, den: ring.one() });
        }
        let g = ring.gcd(&num, &den);
        let num = ring.divrem(&num, &g)?.0;
        let den = ring.divrem(&den, &g)?.0;
        // normalize: monic denominator
        let lead_inv = ring.field().inv(den.lead().unwrap())?;
        let num = ring.scale(&num, lead_inv);
        let den = ring.scale(&den, lead_inv);
        Ok(RationalFunction { num, den })
    }

    pub fn from_poly(ring: &PolyRing, num: Poly) -> RationalFunction {
        RationalFunction { num, den: ring.one() }
    }

    pub fn one(ring: &PolyRing) -> RationalFunction {
        RationalFunction { num: ring.one(), den: ring.one() }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn mul(&self, ring: &PolyRing, other: &RationalFunction) -> Result<RationalFunction> {
        RationalFunction::new(ring, ring.mul(&self.num, &other.num), ring.mul(&self.den, &other.den))
    }

    pub fn inv(&self, ring: &PolyRing) -> Result<RationalFunction> {
        RationalFunction::new(ring, self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, ring: &PolyRing, e: i64) -> Result<RationalFunction> {
        let base = if e < 0 { self.inv(ring)? } else { self.clone() };
        let mut out = RationalFunction::one(ring);
        for _ in 0..e.unsigned_abs() {
            out = out.mul(ring, &base)?;
        }
        Ok(out)
    }

    /// max(deg num, deg den): the degree budget a detector must certify.
    pub fn degree_budget(&self) -> usize {
        self.num.deg().unwrap_or(0).max(self.den.deg().unwrap_or(0))
    }

    pub fn fmt(&self, ring: &PolyRing) -> String {
        format!("({})/({})", ring.fmt_poly(&self.num), ring.fmt_poly(&self.den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(q: &str) -> PolyRing {
        PolyRing::new(FieldSpec::parse(q).unwrap())
    }

    #[test]
    fn basic_arithmetic() {
        let r = ring("3");
        let a = r.from_ints(&[1, 2, 1]); // 1 + 2t + t^2
        let b = r.from_ints(&[2, 1]); // 2 + t
        let prod = r.mul(&a, &b);
        assert_eq!(prod, r.from_ints(&[2, 5, 4, 1]));
        let (qt, rem) = r.divrem(&prod, &b).unwrap();
        assert_eq!(qt, a);
        assert!(rem.is_zero());
        assert_eq!(a.deg(), Some(2));
        assert!(r.zero().deg().is_none());
    }

    #[test]
    fn divrem_general() {
        let r = ring("5");
        let num = r.from_ints(&[3, 1, 4, 1, 2]);
        let den = r.from_ints(&[2, 0, 3]); // non-monic
        let (q, rem) = r.divrem(&num, &den).unwrap();
        let back = r.add(&r.mul(&q, &den), &rem);
        assert_eq!(back, num);
        assert!(rem.deg().unwrap_or(0) < den.deg().unwrap());
    }

    #[test]
    fn gcd_properties() {
        let r = ring("2");
        let a = r.from_ints(&[1, 1]); // t + 1
        let b = r.from_ints(&[1, 0, 1]); // t^2 + 1 = (t+1)^2 in char 2
        let g = r.gcd(&a, &b);
        assert_eq!(g, a);
        assert!(r.gcd(&r.zero(), &r.zero()).is_zero());
    }

    #[test]
    fn brackets_and_ell() {
        for qs in ["2", "3", "4"] {
            let r = ring(qs);
            let q = r.q();
            // [2] = [1]^q + [1]
            let b1 = r.bracket(1);
            let b2 = r.bracket(2);
            assert_eq!(b2, r.add(&r.pow(&b1, q), &b1));
            // ell recurrence: ell_{d+1} = -[d+1] ell_d
            for d in 0..3u32 {
                let lhs = r.ell(d + 1);
                let rhs = r.neg(&r.mul(&r.bracket(d + 1), &r.ell(d)));
                assert_eq!(lhs, rhs);
            }
            // deg ell_n = q + .. + q^n
            let expect: usize = (1..=3u32).map(|i| q.pow(i) as usize).sum();
            assert_eq!(r.ell(3).deg(), Some(expect));
            // brackets are squarefree: gcd([n], [n]') with [n]' = -1
            // equivalently gcd([1], [2]) = [1] since 1 | 2
            let g = r.gcd(&b1, &b2);
            assert_eq!(g, r.monic(&b1));
        }
    }

    #[test]
    fn frobenius_substitute_is_qth_power() {
        let r = ring("4");
        let m = r.from_encodings(&[2, 3, 1]).unwrap();
        assert_eq!(r.frobenius_substitute(&m, 1), r.pow(&m, 4));
        assert_eq!(r.frobenius_substitute(&m, 2), r.pow(&m, 16));
    }

    #[test]
    fn monics_enumeration() {
        for qs in ["2", "3", "4"] {
            let r = ring(qs);
            for d in 0..3u32 {
                let all: Vec<Poly> = r.monics(d).collect();
                assert_eq!(all.len() as u64, r.q().pow(d));
                for m in &all {
                    assert_eq!(m.deg(), Some(d as usize));
                    assert!(m.is_monic(&r));
                }
                // deterministic and duplicate-free
                let mut seen = std::collections::HashSet::new();
                for m in &all {
                    assert!(seen.insert(r.fmt_poly(m)));
                }
            }
        }
    }

    #[test]
    fn rational_function_canonical() {
        let r = ring("2");
        let b1 = r.bracket(1); // t^2 + t
        let b2 = r.bracket(2); // t^4 + t
        // [1]^2 / [2] reduces: gcd = t^2 + t
        let f = RationalFunction::new(&r, r.pow(&b1, 2), b2).unwrap();
        assert_eq!(f.num(), &b1);
        assert_eq!(f.den(), &r.from_ints(&[1, 1, 1])); // t^2 + t + 1
        assert_eq!(f.degree_budget(), 2);
        let g = f.mul(&r, &f.inv(&r).unwrap()).unwrap();
        assert_eq!(g, RationalFunction::one(&r));
    }

    #[test]
    fn karatsuba_matches_schoolbook() {
        let r = ring("3");
        // two polynomials big enough to cross the threshold
        let a: Vec<i64> = (0..1400).map(|i| (i * 7 + 3) % 3).collect();
        let b: Vec<i64> = (0..1300).map(|i| (i * 5 + 1) % 3).collect();
        let pa = r.from_ints(&a);
        let pb = r.from_ints(&b);
        let fast = r.mul(&pa, &pb);
        let slow = r.normalize(r.mul_schoolbook(&pa.coeffs, &pb.coeffs));
        assert_eq!(fast, slow);
    }
}
