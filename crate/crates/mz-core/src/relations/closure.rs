//! Q-linear closure of two-term relations.
//!
//! Taking logarithms, a relation zeta(L) = F * zeta(R) with a monomial
//! bracket factor becomes log zeta(L) - log zeta(R) = log F. Since
//! zeta(p^e * s) = zeta(s)^(p^e), every composition is a p-power multiple
//! of a unique *primitive core* (not all parts divisible by p), and
//! compositions map into the Q-vector space spanned by core symbols via
//! comp = p^e * core  ->  p^e * e_core.
//!
//! A queried pair (A, B) follows from the knowns exactly when
//! vec(A) - vec(B) lies in the span of the known difference vectors; the
//! eliminator tracks combinations, so a solution comes with an explicit
//! certificate, and an integral certificate composes the known factors
//! into the predicted bracket factor for the query.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::powersum::brackets::BracketTerm;
use crate::powersum::Composition;

/// A relation fed into the span: zeta(left) = factor * zeta(right).
#[derive(Debug, Clone)]
pub struct Known {
    pub label: String,
    pub left: Composition,
    pub right: Composition,
    pub factor: BracketTerm,
}

/// Proof object for a solved query.
#[derive(Debug, Clone)]
pub struct Certificate {
    /// Nonzero coefficients c_i: vec(A) - vec(B) = sum c_i (vec(L_i) - vec(R_i)).
    pub combination: Vec<(String, BigRational)>,
    /// Whether every coefficient is an integer.
    pub integral: bool,
    /// prod factor_i^(c_i), available when the certificate is integral.
    pub factor: Option<BracketTerm>,
}

type Sparse = HashMap<usize, BigRational>;

/// Incremental Q-span of relation vectors with combination tracking.
pub struct Closure {
    p: u64,
    symbols: HashMap<Composition, usize>,
    knowns: Vec<Known>,
    /// Echelon rows: (pivot column, vector normalized to 1 at pivot,
    /// expression of the row in terms of knowns).
    rows: Vec<(usize, Sparse, Vec<BigRational>)>,
}

fn core_of(comp: &[u64], p: u64) -> (Composition, u32) {
    let mut core: Composition = comp.to_vec();
    let mut e = 0u32;
    while core.iter().all(|&k| k % p == 0) {
        for k in core.iter_mut() {
            *k /= p;
        }
        e += 1;
    }
    (core, e)
}

impl Closure {
    pub fn new(p: u64) -> Closure {
        assert!(p >= 2);
        Closure { p, symbols: HashMap::new(), knowns: Vec::new(), rows: Vec::new() }
    }

    fn symbol(&mut self, core: Composition) -> usize {
        let next = self.symbols.len();
        *self.symbols.entry(core).or_insert(next)
    }

    /// vec(left) - vec(right) over the symbol columns.
    fn pair_vector(&mut self, left: &[u64], right: &[u64]) -> Sparse {
        let mut v: Sparse = HashMap::new();
        for (comp, sign) in [(left, 1i64), (right, -1i64)] {
            let (core, e) = core_of(comp, self.p);
            let col = self.symbol(core);
            let scale = BigRational::from(BigInt::from(sign) * BigInt::from(self.p).pow(e));
            let entry = v.entry(col).or_insert_with(|| BigRational::from(BigInt::from(0)));
            *entry += scale;
        }
        v.retain(|_, c| *c != BigRational::from(BigInt::from(0)));
        v
    }

    /// Reduce `v` against the echelon rows, accumulating the combination.
    fn reduce(&self, v: &mut Sparse, combo: &mut Vec<BigRational>) {
        for (pivot, row, row_combo) in &self.rows {
            let Some(c) = v.get(pivot).cloned() else { continue };
            if c == BigRational::from(BigInt::from(0)) {
                continue;
            }
            for (col, coeff) in row {
                let entry =
                    v.entry(*col).or_insert_with(|| BigRational::from(BigInt::from(0)));
                *entry -= &c * coeff;
            }
            v.retain(|_, x| *x != BigRational::from(BigInt::from(0)));
            for (i, rc) in row_combo.iter().enumerate() {
                combo[i] += &c * rc;
            }
        }
    }

    /// Insert a known relation into the span.
    pub fn add_known(&mut self, known: Known) {
        let mut v = self.pair_vector(&known.left, &known.right);
        let idx = self.knowns.len();
        self.knowns.push(known);
        for row in self.rows.iter_mut() {
            row.2.push(BigRational::from(BigInt::from(0)));
        }
        let mut combo = vec![BigRational::from(BigInt::from(0)); self.knowns.len()];
        combo[idx] = BigRational::from(BigInt::from(1));
        self.reduce(&mut v, &mut combo);
        // `reduce` accumulates the expression of the *eliminated* part, so
        // the residual row equals known_idx - sum(combo_j * row_j); restate
        // it directly in knowns.
        if v.is_empty() {
            return; // dependent on earlier knowns
        }
        let pivot = *v.keys().min().unwrap();
        let lead = v[&pivot].clone();
        let mut row: Sparse = HashMap::new();
        for (col, coeff) in v {
            row.insert(col, coeff / &lead);
        }
        let mut expr = vec![BigRational::from(BigInt::from(0)); self.knowns.len()];
        expr[idx] = BigRational::from(BigInt::from(1));
        // expr(residual) = (e_idx - combo_elim) / lead, where combo holds the
        // eliminated prefix; recover it from the tracked combination.
        for (i, c) in combo.iter().enumerate() {
            if i == idx {
                continue;
            }
            expr[i] = -c / &lead;
        }
        expr[idx] = (BigRational::from(BigInt::from(1))) / &lead;
        self.rows.push((pivot, row, expr));
    }

    pub fn knowns(&self) -> &[Known] {
        &self.knowns
    }

    /// Decide whether zeta(left)/zeta(right) follows from the knowns; on
    /// success return the certificate (with composed factor when integral).
    pub fn solve(&mut self, left: &[u64], right: &[u64]) -> Result<Option<Certificate>> {
        let mut v = self.pair_vector(left, right);
        let mut combo = vec![BigRational::from(BigInt::from(0)); self.knowns.len()];
        self.reduce(&mut v, &mut combo);
        if !v.is_empty() {
            return Ok(None);
        }
        let mut combination = Vec::new();
        let mut integral = true;
        for (i, c) in combo.iter().enumerate() {
            if *c == BigRational::from(BigInt::from(0)) {
                continue;
            }
            integral &= c.is_integer();
            combination.push((self.knowns[i].label.clone(), c.clone()));
        }
        let factor = if integral && !combination.is_empty() {
            let field = self.knowns[0].factor.field();
            let mut f = BracketTerm::one(field);
            for (i, c) in combo.iter().enumerate() {
                if *c == BigRational::from(BigInt::from(0)) {
                    continue;
                }
                let e = i64::try_from(c.to_integer())
                    .map_err(|_| Error::InvalidParams("certificate exponent too large".into()))?;
                f.mul_term(&self.knowns[i].factor.powi(e)?);
            }
            Some(f)
        } else if combination.is_empty() {
            // reflexive query: factor is 1
            self.knowns
                .first()
                .map(|k| BracketTerm::one(k.factor.field()))
        } else {
            None
        };
        Ok(Some(Certificate { combination, integral, factor }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    fn term(q: &str) -> BracketTerm {
        BracketTerm::one(FieldSpec::parse(q).unwrap())
    }

    #[test]
    fn core_extraction() {
        assert_eq!(core_of(&[4, 6], 2), (vec![2, 3], 1));
        assert_eq!(core_of(&[2, 3], 2), (vec![2, 3], 0));
        assert_eq!(core_of(&[8, 8], 2), (vec![1, 1], 3));
        assert_eq!(core_of(&[9, 18], 3), (vec![1, 2], 2));
    }

    #[test]
    fn direct_known_is_solvable_with_unit_coefficient() {
        let mut cl = Closure::new(2);
        cl.add_known(Known {
            label: "r1".into(),
            left: vec![2, 3],
            right: vec![3, 2],
            factor: term("2").bracket(1, 2).bracket(2, -1),
        });
        let cert = cl.solve(&[2, 3], &[3, 2]).unwrap().unwrap();
        assert!(cert.integral);
        assert_eq!(cert.combination.len(), 1);
        assert_eq!(cert.combination[0].0, "r1");
        // twisted query follows with coefficient 2
        let cert2 = cl.solve(&[4, 6], &[6, 4]).unwrap().unwrap();
        assert!(cert2.integral);
        assert_eq!(
            cert2.combination[0].1,
            BigRational::from(BigInt::from(2))
        );
        assert!(cl.solve(&[2, 3], &[1, 4]).unwrap().is_none());
    }

    #[test]
    fn chains_compose_factors() {
        // a -> b with [1], b -> c with [2]: a -> c must be [1][2]
        let mut cl = Closure::new(2);
        cl.add_known(Known {
            label: "ab".into(),
            left: vec![1, 2],
            right: vec![2, 1],
            factor: term("2").bracket(1, 1),
        });
        cl.add_known(Known {
            label: "bc".into(),
            left: vec![2, 1],
            right: vec![1, 2, 1],
            factor: term("2").bracket(2, 1),
        });
        let cert = cl.solve(&[1, 2], &[1, 2, 1]).unwrap().unwrap();
        assert!(cert.integral);
        let f = cert.factor.unwrap();
        assert_eq!(f.exps().get(&1), Some(&1));
        assert_eq!(f.exps().get(&2), Some(&1));
    }

    #[test]
    fn dependent_knowns_are_absorbed() {
        let mut cl = Closure::new(2);
        for lab in ["x", "y"] {
            cl.add_known(Known {
                label: lab.into(),
                left: vec![2, 3],
                right: vec![3, 2],
                factor: term("2").bracket(1, 2).bracket(2, -1),
            });
        }
        assert!(cl.solve(&[2, 3], &[3, 2]).unwrap().is_some());
    }
}
