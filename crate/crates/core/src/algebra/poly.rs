//! Polynomials over `F_q`.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::field::{Fe, Field};
use crate::error::{invalid, Error, Result};

/// Element of `A = F_q[t]`, coefficients ascending, no trailing zeros.
///
/// `deg` of the zero polynomial is `None`, which orders below every
/// `Some(d)`.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug, Serialize, Deserialize)]
#[serde(from = "Vec<u32>", into = "Vec<u32>")]
pub struct Poly {
    coeffs: Vec<Fe>,
}

/// Serialized as little-endian element indices; indices are not checked
/// against a field here.
impl From<Vec<u32>> for Poly {
    fn from(v: Vec<u32>) -> Poly {
        Poly::from_coeffs(v.into_iter().map(|i| Fe(i as u16)).collect())
    }
}

impl From<Poly> for Vec<u32> {
    fn from(p: Poly) -> Vec<u32> {
        p.to_indices()
    }
}

impl Ord for Poly {
    /// Degree first, then coefficients from the top down.
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly { coeffs: vec![Fe::ONE] }
    }

    pub fn constant(c: Fe) -> Poly {
        Poly::from_coeffs(vec![c])
    }

    /// `c t^k`
    pub fn monomial(c: Fe, k: usize) -> Poly {
        let mut v = vec![Fe::ZERO; k + 1];
        v[k] = c;
        Poly::from_coeffs(v)
    }

    pub fn t() -> Poly {
        Poly::monomial(Fe::ONE, 1)
    }

    pub fn from_coeffs(mut coeffs: Vec<Fe>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// From element indices, little-endian (`[2,0,1]` is `t^2 + 2` over `F_3`).
    pub fn from_indices(f: &Field, idx: &[u32]) -> Result<Poly> {
        Ok(Poly::from_coeffs(idx.iter().map(|&i| f.elem(i)).collect::<Result<_>>()?))
    }

    pub fn to_indices(&self) -> Vec<u32> {
        self.coeffs.iter().map(|c| c.index()).collect()
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn deg(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree as a signed integer; `None` for zero.
    pub fn ideg(&self) -> Option<i64> {
        self.deg().map(|d| d as i64)
    }

    pub fn lc(&self) -> Fe {
        self.coeffs.last().copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lc() == Fe::ONE
    }

    pub fn add(&self, o: &Poly, f: &Field) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| f.add(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Poly, f: &Field) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| f.sub(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn neg(&self, f: &Field) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect() }
    }

    pub fn scale(&self, c: Fe, f: &Field) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&x| f.mul(x, c)).collect())
    }

    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Fe::ZERO; k];
        v.extend_from_slice(&self.coeffs);
        Poly { coeffs: v }
    }

    pub fn mul(&self, o: &Poly, f: &Field) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Fe::ZERO; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                v[i + j] = f.add(v[i + j], f.mul(a, b));
            }
        }
        Poly::from_coeffs(v)
    }

    pub fn pow(&self, mut n: u64, f: &Field) -> Poly {
        let (mut base, mut acc) = (self.clone(), Poly::one());
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base, f);
            }
            base = base.mul(&base, f);
            n >>= 1;
        }
        acc
    }

    pub fn divmod(&self, b: &Poly, f: &Field) -> Result<(Poly, Poly)> {
        let db = b.deg().ok_or(Error::DivisionByZero)?;
        let inv_lc = f.inv(b.lc())?;
        let mut r = self.coeffs.clone();
        if r.len() <= db {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![Fe::ZERO; r.len() - db];
        for k in (db..r.len()).rev() {
            let c = r[k];
            if c.is_zero() {
                continue;
            }
            let m = f.mul(c, inv_lc);
            quot[k - db] = m;
            for (j, &bj) in b.coeffs.iter().enumerate() {
                let idx = k - db + j;
                r[idx] = f.sub(r[idx], f.mul(m, bj));
            }
        }
        r.truncate(db);
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(r)))
    }

    pub fn rem(&self, b: &Poly, f: &Field) -> Result<Poly> {
        Ok(self.divmod(b, f)?.1)
    }

    pub fn quot(&self, b: &Poly, f: &Field) -> Result<Poly> {
        Ok(self.divmod(b, f)?.0)
    }

    /// Exact division; errors if `b` does not divide `self`.
    pub fn div_exact(&self, b: &Poly, f: &Field) -> Result<Poly> {
        let (q, r) = self.divmod(b, f)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(invalid("inexact polynomial division"))
        }
    }

    pub fn divides(&self, other: &Poly, f: &Field) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.rem(self, f).map(|r| r.is_zero()).unwrap_or(false)
    }

    pub fn monic(&self, f: &Field) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(f.inv(self.lc()).unwrap(), f)
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, o: &Poly, f: &Field) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f).unwrap();
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// `(g, s, u)` with `g = s*self + u*o` monic.
    pub fn ext_gcd(&self, o: &Poly, f: &Field) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut u0, mut u1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (qt, r) = r0.divmod(&r1, f).unwrap();
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&qt.mul(&s1, f), f);
            s0 = std::mem::replace(&mut s1, s);
            let u = u0.sub(&qt.mul(&u1, f), f);
            u0 = std::mem::replace(&mut u1, u);
        }
        if r0.is_zero() {
            return (r0, s0, u0);
        }
        let c = f.inv(r0.lc()).unwrap();
        (r0.scale(c, f), s0.scale(c, f), u0.scale(c, f))
    }

    /// Inverse of `self` modulo `m`.
    pub fn inv_mod(&self, m: &Poly, f: &Field) -> Result<Poly> {
        let (g, s, _) = self.rem(m, f)?.ext_gcd(m, f);
        if g != Poly::one() {
            return Err(Error::ZeroArgument);
        }
        s.rem(m, f)
    }

    pub fn mul_mod(&self, o: &Poly, m: &Poly, f: &Field) -> Result<Poly> {
        self.mul(o, f).rem(m, f)
    }

    pub fn pow_mod(&self, mut n: u128, m: &Poly, f: &Field) -> Result<Poly> {
        let mut base = self.rem(m, f)?;
        let mut acc = Poly::one().rem(m, f)?;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_mod(&base, m, f)?;
            }
            base = base.mul_mod(&base, m, f)?;
            n >>= 1;
        }
        Ok(acc)
    }

    pub fn eval(&self, x: Fe, f: &Field) -> Fe {
        self.coeffs.iter().rev().fold(Fe::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn derivative(&self, f: &Field) -> Poly {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| f.mul(c, f.from_int(i as i64)))
                .collect(),
        )
    }

    /// Irreducibility via `gcd(self, t^{q^k} - t) = 1` for `k <= d/2`.
    pub fn is_irreducible(&self, f: &Field) -> bool {
        let Some(d) = self.deg() else { return false };
        if d == 0 {
            return false;
        }
        if d == 1 {
            return true;
        }
        let m = self.monic(f);
        let t = Poly::t();
        let mut x = t.clone();
        for _ in 1..=d / 2 {
            x = x.pow_mod(f.q() as u128, &m, f).unwrap();
            if x.sub(&t, f).gcd(&m, f) != Poly::one() {
                return false;
            }
        }
        true
    }

    /// `(v, u)` with `self = pi^v * u` and `pi` not dividing `u`.
    pub fn split_valuation(&self, pi: &Poly, f: &Field) -> (u32, Poly) {
        assert!(!self.is_zero(), "valuation of zero");
        let mut v = 0;
        let mut u = self.clone();
        loop {
            let (qt, r) = u.divmod(pi, f).unwrap();
            if !r.is_zero() {
                return (v, u);
            }
            u = qt;
            v += 1;
        }
    }

    /// Human-readable rendering with element indices as coefficients.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !s.is_empty() {
                s.push_str(" + ");
            }
            match (i, c.index()) {
                (0, k) => write!(s, "{k}").unwrap(),
                (1, 1) => s.push('t'),
                (1, k) => write!(s, "{k}t").unwrap(),
                (_, 1) => write!(s, "t^{i}").unwrap(),
                (_, k) => write!(s, "{k}t^{i}").unwrap(),
            }
        }
        s
    }

    /// Parses strings like `"t^2+1"`, `"2t^3 - t + 4"`, `"3*t^2"`.
    /// Coefficients are integers reduced into the prime subfield, or
    /// element indices written as `[k]`.
    pub fn parse(src: &str, f: &Field) -> Result<Poly> {
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(invalid("empty polynomial"));
        }
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for (i, ch) in s.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') {
                terms.push((neg, std::mem::take(&mut cur)));
                neg = ch == '-';
            } else if ch == '-' && i == 0 {
                neg = true;
            } else if ch == '+' && i == 0 {
            } else {
                cur.push(ch);
            }
        }
        terms.push((neg, cur));
        let mut acc = Poly::zero();
        for (neg, term) in terms {
            if term.is_empty() {
                return Err(invalid(format!("malformed polynomial {src:?}")));
            }
            let (coef_str, exp) = match term.find('t') {
                None => (term.as_str(), 0usize),
                Some(pos) => {
                    let rest = &term[pos + 1..];
                    let exp = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^')
                            .and_then(|e| e.parse::<usize>().ok())
                            .ok_or_else(|| invalid(format!("bad exponent in {term:?}")))?
                    };
                    (term[..pos].trim_end_matches('*'), exp)
                }
            };
            let c = if coef_str.is_empty() {
                Fe::ONE
            } else if let Some(idx) = coef_str.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
                f.elem(idx.parse().map_err(|_| invalid(format!("bad coefficient {coef_str:?}")))?)?
            } else {
                f.from_int(coef_str.parse::<i64>().map_err(|_| invalid(format!("bad coefficient {coef_str:?}")))?)
            };
            let c = if neg { f.neg(c) } else { c };
            acc = acc.add(&Poly::monomial(c, exp), f);
        }
        Ok(acc)
    }
}

/// All polynomials of degree `< n` (including zero), in index order of their
/// coefficient vectors.
pub fn all_polys_below(n: usize, f: &Field) -> impl Iterator<Item = Poly> + '_ {
    let q = f.q() as u64;
    let total = q.pow(n as u32);
    (0..total).map(move |mut k| {
        let mut v = Vec::with_capacity(n);
        for _ in 0..n {
            v.push(f.elem((k % q) as u32).unwrap());
            k /= q;
        }
        Poly::from_coeffs(v)
    })
}

/// Monic polynomials of exact degree `d`.
pub fn monic_polys(d: usize, f: &Field) -> impl Iterator<Item = Poly> + '_ {
    all_polys_below(d, f).map(move |p| p.add(&Poly::monomial(Fe::ONE, d), f))
}

/// Monic irreducible factors with multiplicity, by trial division.
pub fn factor(a: &Poly, f: &Field) -> Vec<(Poly, u32)> {
    assert!(!a.is_zero(), "factor of zero");
    let mut rest = a.monic(f);
    let mut out = Vec::new();
    let mut d = 1;
    while rest.deg().unwrap_or(0) >= 2 * d {
        for pi in monic_polys(d, f) {
            if !pi.is_irreducible(f) {
                continue;
            }
            let (v, u) = rest.split_valuation(&pi, f);
            if v > 0 {
                out.push((pi, v));
                rest = u;
            }
        }
        d += 1;
    }
    if rest.deg().unwrap_or(0) >= 1 {
        out.push((rest, 1));
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Field {
        Field::prime(3).unwrap()
    }

    fn p(s: &str, f: &Field) -> Poly {
        Poly::parse(s, f).unwrap()
    }

    #[test]
    fn divmod_examples() {
        let f = f3();
        let (q, r) = p("t^2+1", &f).divmod(&p("t", &f), &f).unwrap();
        assert_eq!((q, r), (p("t", &f), p("1", &f)));
        let (q, r) = Poly::zero().divmod(&p("t+2", &f), &f).unwrap();
        assert!(q.is_zero() && r.is_zero());
        let a = p("t^3+2t", &f);
        let b = p("t^2+1", &f);
        let (q, r) = a.divmod(&b, &f).unwrap();
        assert_eq!((q.clone(), r.clone()), (p("t", &f), p("t", &f)));
        assert_eq!(q.mul(&b, &f).add(&r, &f), a);
        assert_eq!(a.divmod(&Poly::zero(), &f), Err(Error::DivisionByZero));
    }

    #[test]
    fn zero_degree_is_below_everything() {
        assert!(Poly::zero().deg() < Some(0));
        assert!(Poly::zero() < Poly::one());
    }

    #[test]
    fn parse_and_render() {
        let f = f3();
        let a = p("t^2 + 2", &f);
        assert_eq!(a.to_indices(), vec![2, 0, 1]);
        assert_eq!(a.render(), "t^2 + 2");
        assert_eq!(p("-t", &f).to_indices(), vec![0, 2]);
        assert_eq!(p("2*t^3 - t + 4", &f).to_indices(), vec![1, 2, 0, 2]);
        assert!(Poly::parse("t^", &f).is_err());
    }

    #[test]
    fn irreducibility() {
        let f = f3();
        assert!(p("t^2+1", &f).is_irreducible(&f));
        assert!(!p("t^2+2", &f).is_irreducible(&f));
        assert!(p("t^3+2t+1", &f).is_irreducible(&f));
        assert!(!p("t^4+2t^2+1", &f).is_irreducible(&f)); // (t^2+1)^2
        // the number of monic irreducible quadratics over F_3 is (9-3)/2
        assert_eq!(monic_polys(2, &f).filter(|x| x.is_irreducible(&f)).count(), 3);
    }

    #[test]
    fn factoring() {
        let f = f3();
        let a = p("t^2+1", &f).pow(2, &f).mul(&p("t+1", &f), &f).mul(&p("t", &f), &f);
        let fac = factor(&a.scale(Fe(2), &f), &f);
        assert_eq!(fac, vec![(p("t", &f), 1), (p("t+1", &f), 1), (p("t^2+1", &f), 2)]);
    }
}
