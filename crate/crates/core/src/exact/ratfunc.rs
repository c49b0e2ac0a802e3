//! Normalized rational functions in a fixed variable set.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::mpoly::{MPoly, VarSet};
use super::AlgebraError;

/// A fraction of integer polynomials in canonical form:
/// `gcd(num, den) = 1` (polynomial and integer content), `den != 0`, and the
/// graded-lex leading coefficient of `den` is positive. Equality of values is
/// therefore structural equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    num: MPoly,
    den: MPoly,
}

impl RatFunc {
    pub fn new(num: MPoly, den: MPoly) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: MPoly, den: MPoly) -> Self {
        if num.is_zero() {
            return RatFunc { den: MPoly::one(num.vars()), num };
        }
        let g = MPoly::gcd(&num, &den);
        let mut num = num.divexact(&g).unwrap();
        let mut den = den.divexact(&g).unwrap();
        if !den.leading_coeff_sign_positive() {
            num = num.neg();
            den = den.neg();
        }
        RatFunc { num, den }
    }

    pub fn zero(vars: &VarSet) -> Self {
        RatFunc { num: MPoly::zero(vars), den: MPoly::one(vars) }
    }

    pub fn one(vars: &VarSet) -> Self {
        RatFunc { num: MPoly::one(vars), den: MPoly::one(vars) }
    }

    pub fn from_int(vars: &VarSet, c: impl Into<BigInt>) -> Self {
        RatFunc { num: MPoly::constant(vars, c), den: MPoly::one(vars) }
    }

    pub fn from_ratio(vars: &VarSet, r: &BigRational) -> Self {
        Self::normalized(
            MPoly::constant(vars, r.numer().clone()),
            MPoly::constant(vars, r.denom().clone()),
        )
    }

    pub fn from_poly(p: MPoly) -> Self {
        RatFunc { den: MPoly::one(p.vars()), num: p }
    }

    pub fn var(vars: &VarSet, name: &str) -> Result<Self, AlgebraError> {
        Ok(RatFunc::from_poly(MPoly::var(vars, name)?))
    }

    pub fn vars(&self) -> &VarSet {
        self.num.vars()
    }

    pub fn numer(&self) -> &MPoly {
        &self.num
    }

    pub fn denom(&self) -> &MPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// Henrici's scheme: with g = gcd(b, d), a/b + c/d =
    /// (a (d/g) + c (b/g)) / (b (d/g)), and the only common factor left
    /// between the new numerator and denominator divides g.
    fn add_signed(&self, other: &Self, negate: bool) -> Self {
        let g = MPoly::gcd(&self.den, &other.den);
        let (db, dd) = if g.is_one() {
            (self.den.clone(), other.den.clone())
        } else {
            (self.den.divexact(&g).unwrap(), other.den.divexact(&g).unwrap())
        };
        let rhs = other.num.mul(&db);
        let mut t = self.num.mul(&dd);
        t = if negate { t.sub(&rhs) } else { t.add(&rhs) };
        if t.is_zero() {
            return RatFunc::zero(self.vars());
        }
        let h = MPoly::gcd(&t, &g);
        let (mut num, mut den) = if h.is_one() {
            (t, self.den.mul(&dd))
        } else {
            (t.divexact(&h).unwrap(), self.den.divexact(&h).unwrap().mul(&dd))
        };
        if !den.leading_coeff_sign_positive() {
            num = num.neg();
            den = den.neg();
        }
        RatFunc { num, den }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_signed(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_signed(other, true)
    }

    pub fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    /// Cross-reduced product: remove gcd(a, d) and gcd(c, b) first; the
    /// result is then already in lowest terms.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero(self.vars());
        }
        let g1 = MPoly::gcd(&self.num, &other.den);
        let g2 = MPoly::gcd(&other.num, &self.den);
        let a = if g1.is_one() { self.num.clone() } else { self.num.divexact(&g1).unwrap() };
        let d = if g1.is_one() { other.den.clone() } else { other.den.divexact(&g1).unwrap() };
        let c = if g2.is_one() { other.num.clone() } else { other.num.divexact(&g2).unwrap() };
        let b = if g2.is_one() { self.den.clone() } else { self.den.divexact(&g2).unwrap() };
        let mut num = a.mul(&c);
        let mut den = b.mul(&d);
        if !den.leading_coeff_sign_positive() {
            num = num.neg();
            den = den.neg();
        }
        RatFunc { num, den }
    }

    pub fn div(&self, other: &Self) -> Result<Self, AlgebraError> {
        if other.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        // The reciprocal of a canonical fraction is canonical up to sign,
        // which the cross-reduced product fixes at the end.
        let flipped = RatFunc { num: other.den.clone(), den: other.num.clone() };
        Ok(self.mul(&flipped))
    }

    pub fn inv(&self) -> Result<Self, AlgebraError> {
        RatFunc::one(self.vars()).div(self)
    }

    pub fn pow(&self, e: i32) -> Result<Self, AlgebraError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let e = e.unsigned_abs();
        Ok(RatFunc {
            num: base.num.pow(e),
            den: base.den.pow(e),
        })
    }

    pub fn div_int(&self, c: impl Into<BigInt>) -> Result<Self, AlgebraError> {
        let c = c.into();
        if c.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Self::normalized(
            self.num.clone(),
            self.den.mul_int(&c),
        ))
    }

    pub fn mul_int(&self, c: impl Into<BigInt>) -> Self {
        Self::normalized(self.num.mul_int(&c.into()), self.den.clone())
    }

    /// Adams operation: every variable v is replaced by v^d.
    pub fn adams(&self, d: u32) -> Self {
        Self::normalized(self.num.adams(d), self.den.adams(d))
    }

    /// Succeeds iff the denominator is a unit after normalization.
    pub fn to_poly(&self) -> Result<MPoly, AlgebraError> {
        match self.den.as_constant() {
            Some(c) if c.is_one() => Ok(self.num.clone()),
            Some(c) if (-&c).is_one() => Ok(self.num.neg()),
            _ => Err(AlgebraError::NotAPolynomial(self.to_string())),
        }
    }

    /// Exact rational value at a point; the denominator must not vanish.
    pub fn eval(&self, point: &[BigRational]) -> Result<BigRational, AlgebraError> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(AlgebraError::Pole);
        }
        Ok(self.num.eval(point) / d)
    }

    /// Substitute each variable by a rational function over `target`.
    pub fn subst(&self, target: &VarSet, images: &[RatFunc]) -> Result<Self, AlgebraError> {
        assert_eq!(images.len(), self.vars().len());
        let eval_poly = |p: &MPoly| -> RatFunc {
            let mut acc = RatFunc::zero(target);
            for (k, c) in p.terms() {
                let mut t = RatFunc::from_int(target, c.clone());
                for (i, &e) in k.iter().enumerate() {
                    if e > 0 {
                        t = t.mul(&images[i].pow(e as i32).unwrap());
                    }
                }
                acc = acc.add(&t);
            }
            acc
        };
        eval_poly(&self.num).div(&eval_poly(&self.den))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else if self.den.print_leading_positive() {
            write!(f, "({}) / ({})", self.num, self.den)
        } else {
            // Display sign only; q/(1-t) is stored as (-q)/(t-1) but reads
            // better the other way around.
            write!(f, "({}) / ({})", self.num.neg(), self.den.neg())
        }
    }
}
