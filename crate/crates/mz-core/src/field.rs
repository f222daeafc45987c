//! Finite fields F_q with q = p^m, p prime, m <= 4.
//!
//! A [`FieldSpec`] is a small, copyable descriptor that applies arithmetic to
//! [`FieldElem`] values; elements do not hold a reference to their field,
//! only a one-byte fingerprint that every operation checks, so accidental
//! mixing of two fields fails fast instead of corrupting data.
//!
//! Elements are polynomials c_0 + c_1 x + .. + c_{m-1} x^{m-1} over F_p
//! modulo a monic irreducible reduction polynomial of degree m. The canonical
//! integer encoding of an element is sum_i c_i p^i; it fixes iteration order,
//! comparison and printing. For prime q the encoding is just the usual
//! residue 0..q-1.

use crate::error::{Error, Result};

/// Largest supported extension degree m of F_q = F_{p^m}.
pub const MAX_EXT_DEGREE: u32 = 4;

/// Largest supported characteristic (digits are stored in a `u8`).
pub const MAX_PRIME: u64 = 251;

/// Descriptor of a finite field F_q, q = p^m. Copy-cheap; all arithmetic on
/// [`FieldElem`] values goes through methods on this type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u64,
    m: u32,
    q: u64,
    /// Monic reduction polynomial, constant-first: red[0..=m], red[m] == 1.
    /// Unused (all zero) for m == 1.
    red: [u8; MAX_EXT_DEGREE as usize + 1],
    fp: u8,
}

/// An element of F_q: digit vector (c_0, .., c_{m-1}) over F_p plus the
/// parent field's fingerprint. 5 bytes, `Copy`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElem {
    fp: u8,
    c: [u8; MAX_EXT_DEGREE as usize],
}

impl FieldElem {
    /// True iff this is the additive identity (fingerprint-independent).
    pub fn is_zero(self) -> bool {
        self.c == [0; MAX_EXT_DEGREE as usize]
    }
}

impl PartialOrd for FieldElem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElem {
    /// Encoding order: compare digit vectors most-significant-first, which
    /// equals comparing sum c_i p^i numerically (digits are < p).
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let a = [self.c[3], self.c[2], self.c[1], self.c[0]];
        let b = [other.c[3], other.c[2], other.c[1], other.c[0]];
        (self.fp, a).cmp(&(other.fp, b))
    }
}

/// Builtin reduction polynomials (constant-first, monic) for common (p, m).
const BUILTIN_REDUCTIONS: &[(u64, u32, [u8; 5])] = &[
    (2, 2, [1, 1, 1, 0, 0]), // x^2 + x + 1
    (2, 3, [1, 1, 0, 1, 0]), // x^3 + x + 1
    (2, 4, [1, 1, 0, 0, 1]), // x^4 + x + 1
    (3, 2, [1, 0, 1, 0, 0]), // x^2 + 1
    (3, 3, [2, 2, 0, 1, 0]), // x^3 - x - 1
    (5, 2, [2, 1, 1, 0, 0]), // x^2 + x + 2
    (7, 2, [1, 0, 1, 0, 0]), // x^2 + 1
];

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Remainder of f by monic g, both constant-first digit vectors over F_p.
fn poly_rem_mod_p(f: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = f.iter().map(|&x| x % p).collect();
    let dg = g.len() - 1;
    while r.len() > dg {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dg;
        if lead != 0 {
            for (j, &gj) in g.iter().enumerate().take(dg) {
                r[shift + j] = (r[shift + j] + p * p - (lead * (gj % p)) % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn fingerprint(p: u64, m: u32, red: &[u8; 5]) -> u8 {
    // FNV-1a over the defining data, folded to one byte.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut mix = |b: u8| {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    };
    for b in p.to_le_bytes() {
        mix(b);
    }
    mix(m as u8);
    for &b in red.iter() {
        mix(b);
    }
    let bytes = h.to_le_bytes();
    bytes.iter().fold(0u8, |acc, &b| acc ^ b)
}

impl FieldSpec {
    /// Build F_{p^m}. For m >= 2 a monic irreducible reduction polynomial of
    /// degree m over F_p is required: either the builtin one, or `red`
    /// (constant-first, length m+1, monic).
    pub fn new(p: u64, m: u32, red: Option<&[u64]>) -> Result<FieldSpec> {
        if !is_prime(p) || p > MAX_PRIME {
            return Err(Error::NonPrime(p));
        }
        if m == 0 || m > MAX_EXT_DEGREE {
            return Err(Error::InvalidParams(format!(
                "extension degree m={m} outside 1..={MAX_EXT_DEGREE}"
            )));
        }
        let q = (0..m).try_fold(1u64, |acc, _| acc.checked_mul(p)).ok_or(
            Error::InvalidParams("q = p^m overflows".into()),
        )?;
        let mut red_arr = [0u8; 5];
        if m >= 2 {
            let digits: Vec<u64> = match red {
                Some(r) => r.to_vec(),
                None => BUILTIN_REDUCTIONS
                    .iter()
                    .find(|&&(bp, bm, _)| bp == p && bm == m)
                    .map(|&(_, _, r)| r.iter().take(m as usize + 1).map(|&x| x as u64).collect())
                    .ok_or(Error::MissingReduction { p, m })?,
            };
            if digits.len() != m as usize + 1 {
                return Err(Error::InvalidParams(format!(
                    "reduction polynomial must have m+1={} coefficients",
                    m + 1
                )));
            }
            if digits.iter().any(|&d| d >= p) {
                return Err(Error::InvalidParams(
                    "reduction coefficients must be reduced mod p".into(),
                ));
            }
            if digits[m as usize] != 1 {
                return Err(Error::InvalidParams("reduction polynomial must be monic".into()));
            }
            // Irreducibility: no monic factor of degree 1..=m/2 (for m <= 4
            // this catches every factorization). Trial division is cheap at
            // these sizes (p <= 251, m <= 4).
            for deg in 1..=(m as usize / 2).max(1) {
                let mut div = vec![0u64; deg + 1];
                div[deg] = 1;
                let count = p.pow(deg as u32);
                for enc in 0..count {
                    let mut e = enc;
                    for slot in div.iter_mut().take(deg) {
                        *slot = e % p;
                        e /= p;
                    }
                    let r = poly_rem_mod_p(&digits, &div, p);
                    if r.iter().all(|&x| x == 0) {
                        return Err(Error::ReduciblePolynomial(format!(
                            "p={p}: {digits:?} divisible by {div:?}"
                        )));
                    }
                }
            }
            for (i, &d) in digits.iter().enumerate() {
                red_arr[i] = d as u8;
            }
        }
        let fp = fingerprint(p, m, &red_arr);
        Ok(FieldSpec { p, m, q, red: red_arr, fp })
    }

    /// Prime field F_p.
    pub fn prime(p: u64) -> Result<FieldSpec> {
        FieldSpec::new(p, 1, None)
    }

    /// Parse "q" or "q:c0,c1,..,cm" (custom monic reduction, constant-first).
    pub fn parse(s: &str) -> Result<FieldSpec> {
        let (qs, rs) = match s.split_once(':') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (s.trim(), None),
        };
        let q: u64 = qs
            .parse()
            .map_err(|_| Error::Parse(format!("bad field size {qs:?}")))?;
        if q < 2 {
            return Err(Error::Parse(format!("field size {q} too small")));
        }
        // Factor q = p^m with p the smallest prime factor.
        let mut p = q;
        let mut d = 2u64;
        while d * d <= q {
            if q % d == 0 {
                p = d;
                break;
            }
            d += 1;
        }
        let mut m = 0u32;
        let mut rest = q;
        while rest % p == 0 {
            rest /= p;
            m += 1;
        }
        if rest != 1 {
            return Err(Error::Parse(format!("{q} is not a prime power")));
        }
        let red: Option<Vec<u64>> = match rs {
            None => None,
            Some(r) => {
                if m == 1 {
                    return Err(Error::Parse(
                        "reduction polynomial only makes sense for extension fields".into(),
                    ));
                }
                let digits: std::result::Result<Vec<u64>, _> =
                    r.split(',').map(|x| x.trim().parse::<u64>()).collect();
                Some(digits.map_err(|_| Error::Parse(format!("bad reduction list {r:?}")))?)
            }
        };
        FieldSpec::new(p, m, red.as_deref())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Reduction polynomial digits (constant-first, length m+1); empty for m == 1.
    pub fn reduction(&self) -> Vec<u64> {
        if self.m == 1 {
            vec![]
        } else {
            self.red[..=self.m as usize].iter().map(|&x| x as u64).collect()
        }
    }

    #[inline]
    fn guard(&self, a: FieldElem) {
        assert_eq!(a.fp, self.fp, "field element used with a different field");
    }

    /// Check that an element belongs to this field, as a recoverable error.
    pub fn check(&self, a: FieldElem) -> Result<()> {
        if a.fp == self.fp {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem { fp: self.fp, c: [0; 4] }
    }

    pub fn one(&self) -> FieldElem {
        FieldElem { fp: self.fp, c: [1, 0, 0, 0] }
    }

    /// Embed an integer as a constant (reduced mod p).
    pub fn from_u64(&self, n: u64) -> FieldElem {
        FieldElem { fp: self.fp, c: [(n % self.p) as u8, 0, 0, 0] }
    }

    /// Embed a signed integer as a constant.
    pub fn from_i64(&self, n: i64) -> FieldElem {
        let r = n.rem_euclid(self.p as i64) as u64;
        self.from_u64(r)
    }

    /// Element from explicit digits (c_0, .., c_{m-1}), each reduced mod p.
    pub fn elem(&self, digits: &[u64]) -> Result<FieldElem> {
        if digits.len() > self.m as usize {
            return Err(Error::InvalidParams(format!(
                "{} digits for extension degree {}",
                digits.len(),
                self.m
            )));
        }
        let mut c = [0u8; 4];
        for (i, &d) in digits.iter().enumerate() {
            c[i] = (d % self.p) as u8;
        }
        Ok(FieldElem { fp: self.fp, c })
    }

    /// Element with canonical encoding e = sum c_i p^i (0 <= e < q).
    pub fn from_encoding(&self, e: u64) -> Result<FieldElem> {
        if e >= self.q {
            return Err(Error::InvalidParams(format!("encoding {e} >= q = {}", self.q)));
        }
        let mut c = [0u8; 4];
        let mut rest = e;
        for slot in c.iter_mut().take(self.m as usize) {
            *slot = (rest % self.p) as u8;
            rest /= self.p;
        }
        Ok(FieldElem { fp: self.fp, c })
    }

    /// Canonical encoding sum c_i p^i of an element.
    pub fn encoding(&self, a: FieldElem) -> u64 {
        self.guard(a);
        let mut e = 0u64;
        for i in (0..self.m as usize).rev() {
            e = e * self.p + a.c[i] as u64;
        }
        e
    }

    /// All q elements in encoding order.
    pub fn elems(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.q).map(move |e| self.from_encoding(e).expect("encoding in range"))
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.guard(a);
        self.guard(b);
        let mut c = [0u8; 4];
        for i in 0..self.m as usize {
            c[i] = ((a.c[i] as u64 + b.c[i] as u64) % self.p) as u8;
        }
        FieldElem { fp: self.fp, c }
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        self.guard(a);
        let mut c = [0u8; 4];
        for i in 0..self.m as usize {
            c[i] = ((self.p - a.c[i] as u64) % self.p) as u8;
        }
        FieldElem { fp: self.fp, c }
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.guard(a);
        self.guard(b);
        let m = self.m as usize;
        if m == 1 {
            return FieldElem {
                fp: self.fp,
                c: [((a.c[0] as u64 * b.c[0] as u64) % self.p) as u8, 0, 0, 0],
            };
        }
        // Schoolbook product, then fold x^i for i >= m using
        // x^m = -(red[0] + .. + red[m-1] x^{m-1}).
        let mut acc = [0u64; 2 * MAX_EXT_DEGREE as usize - 1];
        for i in 0..m {
            if a.c[i] == 0 {
                continue;
            }
            for j in 0..m {
                acc[i + j] += a.c[i] as u64 * b.c[j] as u64;
            }
        }
        for i in (m..acc.len()).rev() {
            let t = acc[i] % self.p;
            if t != 0 {
                for j in 0..m {
                    let neg = (self.p - self.red[j] as u64) % self.p;
                    acc[i - m + j] += t * neg;
                }
            }
            acc[i] = 0;
        }
        let mut c = [0u8; 4];
        for i in 0..m {
            c[i] = (acc[i] % self.p) as u8;
        }
        FieldElem { fp: self.fp, c }
    }

    /// a^e by binary exponentiation; 0^0 = 1.
    pub fn pow(&self, a: FieldElem, mut e: u64) -> FieldElem {
        self.guard(a);
        let mut base = a;
        let mut out = self.one();
        while e > 0 {
            if e & 1 == 1 {
                out = self.mul(out, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        out
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        self.guard(a);
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Frobenius endomorphism a -> a^p.
    pub fn frobenius(&self, a: FieldElem) -> FieldElem {
        self.pow(a, self.p)
    }

    /// e-fold Frobenius a -> a^(p^e), without forming p^e.
    pub fn frobenius_pow(&self, a: FieldElem, e: u32) -> FieldElem {
        let mut x = a;
        for _ in 0..e {
            x = self.frobenius(x);
        }
        x
    }

    /// Render an element as its canonical encoding.
    pub fn fmt_elem(&self, a: FieldElem) -> String {
        self.encoding(a).to_string()
    }
}

impl std::fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.m == 1 {
            write!(f, "F{}", self.q)
        } else {
            let red: Vec<String> =
                self.red[..=self.m as usize].iter().map(|c| c.to_string()).collect();
            write!(f, "F{} (p={}, reduction {})", self.q, self.p, red.join(","))
        }
    }
}

/// Binomial coefficient C(n, k) mod p (p prime), via Lucas' theorem.
pub fn binom_mod_p(n: u64, k: u64, p: u64) -> u64 {
    debug_assert!(is_prime(p));
    if k > n {
        return 0;
    }
    // C(a, b) mod p for a, b < p by a multiplicative loop.
    fn small_binom(a: u64, b: u64, p: u64) -> u64 {
        if b > a {
            return 0;
        }
        let b = b.min(a - b);
        let mut num = 1u64;
        let mut den = 1u64;
        for i in 0..b {
            num = num * ((a - i) % p) % p;
            den = den * ((i + 1) % p) % p;
        }
        // den^(p-2) mod p
        let mut inv = 1u64;
        let mut base = den % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                inv = inv * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        num * inv % p
    }
    let (mut n, mut k) = (n, k);
    let mut out = 1u64;
    while n > 0 || k > 0 {
        let c = small_binom(n % p, k % p, p);
        if c == 0 {
            return 0;
        }
        out = out * c % p;
        n /= p;
        k /= p;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_fields() -> Vec<FieldSpec> {
        vec![
            FieldSpec::parse("2").unwrap(),
            FieldSpec::parse("3").unwrap(),
            FieldSpec::parse("4").unwrap(),
            FieldSpec::parse("5").unwrap(),
            FieldSpec::parse("7").unwrap(),
            FieldSpec::parse("8").unwrap(),
            FieldSpec::parse("9").unwrap(),
        ]
    }

    #[test]
    fn parse_and_shape() {
        let f4 = FieldSpec::parse("4").unwrap();
        assert_eq!((f4.p(), f4.m(), f4.q()), (2, 2, 4));
        let f9 = FieldSpec::parse("9").unwrap();
        assert_eq!((f9.p(), f9.m(), f9.q()), (3, 2, 9));
        let custom = FieldSpec::parse("9:1,0,1").unwrap();
        assert_eq!(custom.q(), 9);
        assert!(FieldSpec::parse("6").is_err());
        assert!(FieldSpec::parse("1").is_err());
        // x^2 + x factors: rejected
        assert!(FieldSpec::parse("4:0,1,1").is_err());
        assert!(FieldSpec::parse("4:1,1").is_err());
    }

    #[test]
    fn field_axioms_exhaustive_small_q() {
        for f in all_fields() {
            let q = f.q();
            let elems: Vec<FieldElem> = f.elems().collect();
            assert_eq!(elems.len() as u64, q);
            // encoding round-trip and uniqueness
            for (i, &a) in elems.iter().enumerate() {
                assert_eq!(f.encoding(a), i as u64);
            }
            for &a in &elems {
                assert_eq!(f.add(a, f.zero()), a);
                assert_eq!(f.mul(a, f.one()), a);
                assert!(f.add(a, f.neg(a)).is_zero());
                // x^q = x
                assert_eq!(f.pow(a, q), a);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
                }
                for &b in &elems {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    // Frobenius is additive
                    assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
                    for &c in &elems {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn known_extension_products() {
        // F_4 with x^2 + x + 1: x * x = x + 1, i.e. enc 2 * 2 = 3.
        let f4 = FieldSpec::parse("4").unwrap();
        let x = f4.from_encoding(2).unwrap();
        assert_eq!(f4.encoding(f4.mul(x, x)), 3);
        // F_9 with x^2 + 1: (x+1)^2 = x^2 + 2x + 1 = 2x, i.e. enc 4^2 = 6.
        let f9 = FieldSpec::parse("9").unwrap();
        let xp1 = f9.from_encoding(4).unwrap();
        assert_eq!(f9.encoding(f9.mul(xp1, xp1)), 6);
    }

    #[test]
    fn power_sums_over_field_elements() {
        // sum over c in F_q of c^j is -1 if (q-1) | j and j > 0, else 0.
        for f in all_fields() {
            let q = f.q();
            for j in 0..=(2 * q as usize + 2) {
                let mut s = f.zero();
                for c in f.elems() {
                    s = f.add(s, f.pow(c, j as u64));
                }
                let expect = if j > 0 && j as u64 % (q - 1) == 0 {
                    f.neg(f.one())
                } else {
                    f.zero()
                };
                assert_eq!(s, expect, "q={q} j={j}");
            }
        }
    }

    #[test]
    fn mismatched_fields_are_rejected() {
        let f2 = FieldSpec::parse("2").unwrap();
        let f3 = FieldSpec::parse("3").unwrap();
        assert!(f2.check(f3.one()).is_err());
        assert!(f2.check(f2.one()).is_ok());
    }

    #[test]
    fn lucas_binomials() {
        // direct check against Pascal's triangle mod p
        for &p in &[2u64, 3, 5, 7] {
            let n_max = 40usize;
            let mut pascal = vec![vec![0u64; n_max + 1]; n_max + 1];
            for n in 0..=n_max {
                pascal[n][0] = 1;
                for k in 1..=n {
                    pascal[n][k] =
                        (pascal[n - 1][k - 1] + if k <= n - 1 { pascal[n - 1][k] } else { 0 }) % p;
                }
            }
            for n in 0..=n_max {
                for k in 0..=n {
                    assert_eq!(binom_mod_p(n as u64, k as u64, p), pascal[n][k], "p={p} {n} {k}");
                }
            }
        }
    }
}
