//! Rational functions `K = F_q(t)` as reduced fractions with monic denominator.

use super::field::{Fe, Field};
use super::poly::Poly;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    pub fn zero() -> RatFn {
        RatFn { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> RatFn {
        RatFn::from_poly(Poly::one())
    }

    pub fn from_poly(p: Poly) -> RatFn {
        RatFn { num: p, den: Poly::one() }
    }

    pub fn new(num: Poly, den: Poly, f: &Field) -> Result<RatFn> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFn::zero());
        }
        let g = num.gcd(&den, f);
        let num = num.div_exact(&g, f)?;
        let den = den.div_exact(&g, f)?;
        let c = f.inv(den.lc())?;
        Ok(RatFn { num: num.scale(c, f), den: den.scale(c, f) })
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

    pub fn as_poly(&self) -> Option<&Poly> {
        (self.den == Poly::one()).then_some(&self.num)
    }

    /// Degree at infinity, `deg num - deg den`; `None` for zero.
    pub fn deg(&self) -> Option<i64> {
        Some(self.num.ideg()? - self.den.ideg().unwrap())
    }

    /// Leading coefficient of the expansion in `1/t`.
    pub fn lc(&self) -> Fe {
        self.num.lc()
    }

    pub fn add(&self, o: &RatFn, f: &Field) -> RatFn {
        let n = self.num.mul(&o.den, f).add(&o.num.mul(&self.den, f), f);
        RatFn::new(n, self.den.mul(&o.den, f), f).unwrap()
    }

    pub fn sub(&self, o: &RatFn, f: &Field) -> RatFn {
        self.add(&o.neg(f), f)
    }

    pub fn neg(&self, f: &Field) -> RatFn {
        RatFn { num: self.num.neg(f), den: self.den.clone() }
    }

    pub fn mul(&self, o: &RatFn, f: &Field) -> RatFn {
        RatFn::new(self.num.mul(&o.num, f), self.den.mul(&o.den, f), f).unwrap()
    }

    pub fn inv(&self, f: &Field) -> Result<RatFn> {
        if self.is_zero() {
            return Err(Error::ZeroArgument);
        }
        RatFn::new(self.den.clone(), self.num.clone(), f)
    }

    pub fn div(&self, o: &RatFn, f: &Field) -> Result<RatFn> {
        Ok(self.mul(&o.inv(f)?, f))
    }

    pub fn scale(&self, c: Fe, f: &Field) -> RatFn {
        RatFn::new(self.num.scale(c, f), self.den.clone(), f).unwrap()
    }

    /// `pi`-adic valuation.
    pub fn valuation(&self, pi: &Poly, f: &Field) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::ZeroArgument);
        }
        let (a, _) = self.num.split_valuation(pi, f);
        let (b, _) = self.den.split_valuation(pi, f);
        Ok(a as i64 - b as i64)
    }

    /// Residue class of `self / pi^v` modulo `pi` (a nonzero polynomial of
    /// degree `< deg pi`), where `v` is the valuation.
    pub fn unit_residue(&self, pi: &Poly, f: &Field) -> Result<(i64, Poly)> {
        if self.is_zero() {
            return Err(Error::ZeroArgument);
        }
        let (a, nu) = self.num.split_valuation(pi, f);
        let (b, du) = self.den.split_valuation(pi, f);
        let r = nu.mul_mod(&du.inv_mod(pi, f)?, pi, f)?;
        Ok((a as i64 - b as i64, r))
    }

    pub fn render(&self) -> String {
        if self.den == Poly::one() {
            self.num.render()
        } else {
            format!("({}) / ({})", self.num.render(), self.den.render())
        }
    }
}
