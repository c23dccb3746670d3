//! Truncated p-adic expansions over a field descriptor.
//!
//! A number is sum a_v p^v with labels a_v from the descriptor's
//! representative system, known for all exponents below its precision.

use std::fmt;

use super::field::{Field, RepLabel, RepSystem, DEFAULT_PRECISION};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PAdicNumber {
    field: Field,
    /// Exponent of the first listed coefficient. Meaningless when zero.
    v0: i64,
    /// Labels for exponents v0, v0+1, ...; empty iff the number is zero.
    /// Leading and trailing zero labels are stripped; unlisted positions
    /// below the precision are zero.
    coeffs: Vec<RepLabel>,
    /// Coefficients are known for all exponents < precision.
    precision: i64,
}

impl PAdicNumber {
    pub fn zero(field: Field) -> Self {
        PAdicNumber {
            field,
            v0: 0,
            coeffs: Vec::new(),
            precision: DEFAULT_PRECISION,
        }
    }

    pub fn one(field: Field) -> Self {
        let one = field.one_label();
        PAdicNumber {
            field,
            v0: 0,
            coeffs: vec![one],
            precision: DEFAULT_PRECISION,
        }
    }

    /// Builds a number from (exponent, label) terms. Zero labels are
    /// dropped; duplicate exponents are rejected.
    pub fn from_terms(field: Field, terms: &[(i64, RepLabel)], precision: i64) -> Result<Self> {
        let mut sorted: Vec<(i64, RepLabel)> = terms
            .iter()
            .filter(|(_, l)| !l.is_zero())
            .cloned()
            .collect();
        sorted.sort_by_key(|(e, _)| *e);
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidInput(format!(
                    "duplicate exponent {} in p-adic terms",
                    w[0].0
                )));
            }
        }
        for (_, l) in &sorted {
            if !field.label_is_valid(l) {
                return Err(Error::InvalidInput(
                    "label does not belong to the descriptor's representative system".into(),
                ));
            }
        }
        if sorted.is_empty() {
            let mut z = PAdicNumber::zero(field);
            z.precision = precision;
            return Ok(z);
        }
        let v0 = sorted[0].0;
        let top = sorted.last().unwrap().0;
        if top >= precision {
            return Err(Error::InvalidInput(format!(
                "term at exponent {top} exceeds precision {precision}"
            )));
        }
        let mut coeffs = vec![field.zero_label(); (top - v0 + 1) as usize];
        for (e, l) in sorted {
            coeffs[(e - v0) as usize] = l;
        }
        Ok(PAdicNumber {
            field,
            v0,
            coeffs,
            precision,
        })
    }

    /// The base-p expansion of a natural number, using the labels that
    /// represent the rational digits 0..p-1.
    pub fn from_integer(field: Field, mut n: u64) -> Result<Self> {
        let p = field.p();
        let mut terms = Vec::new();
        let mut exp = 0i64;
        while n > 0 {
            let d = n % p;
            if d != 0 {
                terms.push((exp, field.label_from_digit(d)?));
            }
            n /= p;
            exp += 1;
        }
        Self::from_terms(field, &terms, DEFAULT_PRECISION.max(exp))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn with_precision(mut self, precision: i64) -> Result<Self> {
        if !self.is_zero() && self.v0 + self.coeffs.len() as i64 > precision {
            return Err(Error::InvalidInput(
                "precision below the last listed coefficient".into(),
            ));
        }
        self.precision = precision;
        Ok(self)
    }

    /// +infinity for zero, else the exponent of the leading coefficient.
    pub fn valuation(&self) -> Valuation {
        if self.is_zero() {
            Valuation::Infinite
        } else {
            Valuation::Finite(self.v0)
        }
    }

    /// The norm |x| = p^(-v) as the exact symbolic pair (p, -v); `None`
    /// exponent means the norm is 0.
    pub fn norm(&self) -> (u64, Option<i64>) {
        match self.valuation() {
            Valuation::Finite(v) => (self.field.p(), Some(-v)),
            Valuation::Infinite => (self.field.p(), None),
        }
    }

    /// The label at a given exponent (zero outside the listed range).
    pub fn label_at(&self, exp: i64) -> RepLabel {
        if self.coeffs.is_empty() || exp < self.v0 {
            return self.field.zero_label();
        }
        let idx = exp - self.v0;
        if idx >= self.coeffs.len() as i64 {
            return self.field.zero_label();
        }
        self.coeffs[idx as usize].clone()
    }

    /// Terms (exponent, label) with nonzero labels, ascending.
    pub fn terms(&self) -> Vec<(i64, RepLabel)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, l)| !l.is_zero())
            .map(|(i, l)| (self.v0 + i as i64, l.clone()))
            .collect()
    }

    fn check_same_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::DescriptorMismatch);
        }
        Ok(())
    }

    /// Smallest exponent at which the coefficient labels differ. Distinct
    /// labels are distinct modulo the maximal ideal, so this equals the
    /// valuation of x - y whenever subtraction is defined. Indistinguishable
    /// inputs are signalled explicitly, never silently +infinity.
    pub fn difference_valuation(&self, other: &Self) -> Result<i64> {
        self.check_same_field(other)?;
        let min_prec = self.precision.min(other.precision);
        let lo = match (self.valuation(), other.valuation()) {
            (Valuation::Infinite, Valuation::Infinite) => {
                return Err(Error::Indistinguishable {
                    precision: min_prec,
                    labels: None,
                })
            }
            (Valuation::Finite(a), Valuation::Infinite) => a,
            (Valuation::Infinite, Valuation::Finite(b)) => b,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.min(b),
        };
        let hi = (self.v0 + self.coeffs.len() as i64)
            .max(other.v0 + other.coeffs.len() as i64)
            .min(min_prec);
        for exp in lo..hi {
            if self.label_at(exp) != other.label_at(exp) {
                return Ok(exp);
            }
        }
        Err(Error::Indistinguishable {
            precision: min_prec,
            labels: None,
        })
    }

    fn require_polynomial(&self) -> Result<()> {
        if self.field.rep_system() != RepSystem::Polynomial {
            return Err(Error::Unsupported(
                "ring operations require the polynomial representative system".into(),
            ));
        }
        Ok(())
    }

    /// Exact addition, truncated to the smaller precision. Carries run
    /// independently in each of the f coordinates of the zeta-basis.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.carry_op(other, false)
    }

    /// Exact subtraction, truncated to the smaller precision. Borrows may
    /// propagate past the top listed coefficient; digits below the precision
    /// stay exact.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.carry_op(other, true)
    }

    fn carry_op(&self, other: &Self, subtract: bool) -> Result<Self> {
        self.check_same_field(other)?;
        self.require_polynomial()?;
        let p = self.field.p();
        let f = self.field.f();
        let precision = self.precision.min(other.precision);
        let lo = match (self.valuation(), other.valuation()) {
            (Valuation::Infinite, Valuation::Infinite) => {
                let mut z = PAdicNumber::zero(self.field.clone());
                z.precision = precision;
                return Ok(z);
            }
            (Valuation::Finite(a), Valuation::Infinite) => a,
            (Valuation::Infinite, Valuation::Finite(b)) => b,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.min(b),
        };
        let lo = lo.min(precision);
        let digit = |x: &PAdicNumber, exp: i64, coord: usize| -> u64 {
            match x.label_at(exp) {
                RepLabel::Poly(r) => r.coeffs()[coord],
                RepLabel::Teich(_) => unreachable!(),
            }
        };
        let width = (precision - lo) as usize;
        let mut out = vec![vec![0u64; f]; width];
        for coord in 0..f {
            let mut carry = 0i64;
            for (i, slot) in out.iter_mut().enumerate() {
                let exp = lo + i as i64;
                let a = digit(self, exp, coord) as i64;
                let b = digit(other, exp, coord) as i64;
                let raw = if subtract { a - b + carry } else { a + b + carry };
                let mut d = raw % p as i64;
                carry = raw.div_euclid(p as i64);
                if d < 0 {
                    d += p as i64;
                    // div_euclid already accounted for the borrow
                }
                slot[coord] = d as u64;
            }
        }
        let terms: Vec<(i64, RepLabel)> = out
            .into_iter()
            .enumerate()
            .map(|(i, coords)| {
                (
                    lo + i as i64,
                    RepLabel::Poly(super::field::ResidueElement::new(coords)),
                )
            })
            .collect();
        Self::from_terms(self.field.clone(), &terms, precision)
    }

    /// Multiplication by p^k: shifts the expansion and the precision.
    pub fn shift(&self, k: i64) -> Self {
        let mut out = self.clone();
        if !out.is_zero() {
            out.v0 += k;
        }
        out.precision += k;
        out
    }
}

impl PartialEq for PAdicNumber {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.coeffs == other.coeffs
            && (self.is_zero() || self.v0 == other.v0)
            && self.precision == other.precision
    }
}
impl Eq for PAdicNumber {}

impl fmt::Display for PAdicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::text::format_padic(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::field::{FieldDescriptor, RepSystem};

    fn q2() -> Field {
        FieldDescriptor::unramified(2, 1, RepSystem::Polynomial).unwrap()
    }

    fn num(field: &Field, exps: &[i64]) -> PAdicNumber {
        let terms: Vec<_> = exps.iter().map(|&e| (e, field.one_label())).collect();
        PAdicNumber::from_terms(field.clone(), &terms, DEFAULT_PRECISION).unwrap()
    }

    #[test]
    fn valuation_examples() {
        let f = q2();
        assert_eq!(PAdicNumber::zero(f.clone()).valuation(), Valuation::Infinite);
        // x = 2^2 + 2^4 has valuation 2
        assert_eq!(num(&f, &[2, 4]).valuation(), Valuation::Finite(2));
        assert_eq!(PAdicNumber::one(f.clone()).valuation(), Valuation::Finite(0));
        assert_eq!(num(&f, &[2, 4]).norm(), (2, Some(-2)));
    }

    #[test]
    fn difference_valuation_examples() {
        let f = q2();
        // x = 2^6, y = 2^5 differ first at exponent 5
        assert_eq!(num(&f, &[6]).difference_valuation(&num(&f, &[5])).unwrap(), 5);
        // 1 + 2 vs 1 differ at exponent 1
        assert_eq!(num(&f, &[0, 1]).difference_valuation(&num(&f, &[0])).unwrap(), 1);
        // x = y is indistinguishable at the shared precision
        let x = num(&f, &[3]);
        match x.difference_valuation(&x) {
            Err(Error::Indistinguishable { precision, .. }) => {
                assert_eq!(precision, DEFAULT_PRECISION)
            }
            other => panic!("expected indistinguishable, got {other:?}"),
        }
    }

    #[test]
    fn add_sub_examples() {
        let f = q2();
        // (2^2 + 2^3) - 2^2 = 2^3
        let lhs = num(&f, &[2, 3]).sub(&num(&f, &[2])).unwrap();
        assert_eq!(lhs, num(&f, &[3]));
        // 1 + 1 = 2 with a carry
        let two = PAdicNumber::one(f.clone()).add(&PAdicNumber::one(f.clone())).unwrap();
        assert_eq!(two, num(&f, &[1]));
    }

    #[test]
    fn add_carries_each_zeta_coordinate() {
        // over Q_2(zeta), f = 2: (1 + zeta) + (1 + zeta) = (1 + zeta) * 2
        let f = FieldDescriptor::unramified(2, 2, RepSystem::Polynomial).unwrap();
        let one_plus_zeta = RepLabel::Poly(super::super::field::ResidueElement::new(vec![1, 1]));
        let x = PAdicNumber::from_terms(f.clone(), &[(0, one_plus_zeta.clone())], 64).unwrap();
        let sum = x.add(&x).unwrap();
        let expected =
            PAdicNumber::from_terms(f.clone(), &[(1, one_plus_zeta)], 64).unwrap();
        assert_eq!(sum, expected);
    }

    #[test]
    fn sub_borrows_past_the_top() {
        let f = q2();
        // 0 - 1 = ...1111 truncated at the precision
        let z = PAdicNumber::zero(f.clone()).with_precision(6).unwrap();
        let d = z.sub(&PAdicNumber::one(f.clone())).unwrap();
        assert_eq!(d.precision(), 6);
        assert_eq!(d.terms().len(), 6);
        assert!(d.terms().iter().all(|(_, l)| *l == f.one_label()));
    }

    #[test]
    fn shift_examples() {
        let f = q2();
        let one = PAdicNumber::one(f.clone());
        assert_eq!(one.shift(6), num(&f, &[6]).with_precision(DEFAULT_PRECISION + 6).unwrap());
        let x = num(&f, &[1, 4]);
        assert_eq!(x.shift(0), x);
        assert_eq!(x.shift(3).shift(-3), x);
    }

    #[test]
    fn teichmuller_ring_ops_rejected() {
        let f = FieldDescriptor::unramified(2, 2, RepSystem::Teichmuller).unwrap();
        let x = PAdicNumber::one(f.clone());
        assert!(matches!(x.add(&x), Err(Error::Unsupported(_))));
        assert!(matches!(x.sub(&x), Err(Error::Unsupported(_))));
    }
}
