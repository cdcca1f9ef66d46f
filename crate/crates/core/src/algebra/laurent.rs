//! Truncated Laurent series in `1/t`, i.e. elements of `K_inf = F_q((1/t))`.
//!
//! A series is stored from its top exponent downwards. Coefficients at
//! exponents `>= prec` are exact; reading below `prec` is an error. Exact
//! series (polynomials, Laurent polynomials) have `prec = None`.

use super::field::{Fe, Field};
use super::poly::Poly;
use super::ratfn::RatFn;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Laurent {
    /// Exponent of `coeffs[0]`. Meaningless when `coeffs` is empty.
    top: i64,
    /// `coeffs[i]` is the coefficient of `t^(top - i)`.
    coeffs: Vec<Fe>,
    prec: Option<i64>,
}

impl Laurent {
    pub fn zero() -> Laurent {
        Laurent { top: 0, coeffs: Vec::new(), prec: None }
    }

    /// `c t^k`, exact.
    pub fn monomial(c: Fe, k: i64) -> Laurent {
        Laurent::normalized(k, vec![c], None)
    }

    pub fn from_poly(p: &Poly) -> Laurent {
        let Some(d) = p.ideg() else { return Laurent::zero() };
        let coeffs = p.coeffs().iter().rev().copied().collect();
        Laurent::normalized(d, coeffs, None)
    }

    /// `t^shift * p`, exact.
    pub fn from_poly_shifted(p: &Poly, shift: i64) -> Laurent {
        let mut l = Laurent::from_poly(p);
        if !l.coeffs.is_empty() {
            l.top += shift;
        }
        l
    }

    /// Expansion of a rational function, correct down to `prec`.
    pub fn from_ratfn(r: &RatFn, prec: i64, f: &Field) -> Result<Laurent> {
        if let Some(p) = r.as_poly() {
            return Ok(Laurent::from_poly(p));
        }
        let inv = laurent_invert(&Laurent::from_poly(r.den()), prec - r.num().ideg().unwrap_or(0), f)?;
        Ok(Laurent::from_poly(r.num()).mul(&inv, f).truncate(prec))
    }

    fn normalized(top: i64, mut coeffs: Vec<Fe>, prec: Option<i64>) -> Laurent {
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        coeffs.drain(..lead);
        let top = top - lead as i64;
        match prec {
            None => {
                while coeffs.last().is_some_and(|c| c.is_zero()) {
                    coeffs.pop();
                }
            }
            Some(p) => {
                let keep = (top - p + 1).max(0) as usize;
                coeffs.truncate(keep);
            }
        }
        if coeffs.is_empty() {
            return Laurent { top: 0, coeffs, prec };
        }
        Laurent { top, coeffs, prec }
    }

    pub fn precision(&self) -> Option<i64> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// True when every known coefficient is zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree (top exponent with a nonzero coefficient).
    pub fn deg(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.top)
    }

    pub fn lc(&self) -> Fe {
        self.coeffs.first().copied().unwrap_or(Fe::ZERO)
    }

    pub fn coeff(&self, i: i64) -> Result<Fe> {
        if let Some(p) = self.prec {
            if i < p {
                return Err(Error::InsufficientPrecision { wanted: i, known: p });
            }
        }
        if self.coeffs.is_empty() || i > self.top {
            return Ok(Fe::ZERO);
        }
        Ok(self.coeffs.get((self.top - i) as usize).copied().unwrap_or(Fe::ZERO))
    }

    /// Drops knowledge below `p`.
    pub fn truncate(&self, p: i64) -> Laurent {
        let prec = Some(self.prec.map_or(p, |q| q.max(p)));
        Laurent::normalized(self.top, self.coeffs.clone(), prec)
    }

    fn lowest_stored(&self) -> i64 {
        self.top - self.coeffs.len() as i64 + 1
    }

    pub fn add(&self, o: &Laurent, f: &Field) -> Laurent {
        let prec = match (self.prec, o.prec) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(i64::MIN).max(b.unwrap_or(i64::MIN))),
        };
        if self.coeffs.is_empty() && o.coeffs.is_empty() {
            return Laurent { top: 0, coeffs: vec![], prec };
        }
        let top = match (self.deg(), o.deg()) {
            (Some(a), Some(b)) => a.max(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => unreachable!(),
        };
        let mut low = self.lowest_stored().min(o.lowest_stored());
        if self.coeffs.is_empty() {
            low = o.lowest_stored();
        } else if o.coeffs.is_empty() {
            low = self.lowest_stored();
        }
        if let Some(p) = prec {
            low = low.max(p);
        }
        let coeffs = (low..=top)
            .rev()
            .map(|i| f.add(self.coeff_or_zero(i), o.coeff_or_zero(i)))
            .collect();
        Laurent::normalized(top, coeffs, prec)
    }

    fn coeff_or_zero(&self, i: i64) -> Fe {
        if self.coeffs.is_empty() || i > self.top || i < self.lowest_stored() {
            Fe::ZERO
        } else {
            self.coeffs[(self.top - i) as usize]
        }
    }

    pub fn neg(&self, f: &Field) -> Laurent {
        Laurent { top: self.top, coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(), prec: self.prec }
    }

    pub fn sub(&self, o: &Laurent, f: &Field) -> Laurent {
        self.add(&o.neg(f), f)
    }

    pub fn scale(&self, c: Fe, f: &Field) -> Laurent {
        if c.is_zero() {
            return Laurent { top: 0, coeffs: vec![], prec: self.prec };
        }
        Laurent { top: self.top, coeffs: self.coeffs.iter().map(|&x| f.mul(x, c)).collect(), prec: self.prec }
    }

    /// Product; precision is the larger of `prec(a) + deg b` and
    /// `prec(b) + deg a`.
    pub fn mul(&self, o: &Laurent, f: &Field) -> Laurent {
        let prec = match (self.prec, o.prec) {
            (None, None) => None,
            (pa, pb) => {
                let from_a = pa.map(|p| p + o.deg().unwrap_or(i64::MIN / 4));
                let from_b = pb.map(|p| p + self.deg().unwrap_or(i64::MIN / 4));
                Some(from_a.unwrap_or(i64::MIN).max(from_b.unwrap_or(i64::MIN)))
            }
        };
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Laurent { top: 0, coeffs: vec![], prec };
        }
        let top = self.top + o.top;
        let mut out = vec![Fe::ZERO; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Laurent::normalized(top, out, prec)
    }

    /// Exact Laurent polynomial as `(shift, poly)` with `self = t^shift * poly`.
    pub fn as_laurent_poly(&self) -> Option<(i64, Poly)> {
        if !self.is_exact() {
            return None;
        }
        if self.coeffs.is_empty() {
            return Some((0, Poly::zero()));
        }
        let low = self.lowest_stored();
        let v: Vec<Fe> = self.coeffs.iter().rev().copied().collect();
        Some((low, Poly::from_coeffs(v)))
    }

    pub fn render(&self) -> String {
        if self.coeffs.is_empty() {
            return match self.prec {
                None => "0".into(),
                Some(p) => format!("O(t^{p})"),
            };
        }
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.top - k as i64;
            parts.push(match (e, c.index()) {
                (0, v) => format!("{v}"),
                (1, 1) => "t".into(),
                (_, 1) => format!("t^{e}"),
                (_, v) => format!("{v}t^{e}"),
            });
        }
        let mut s = parts.join(" + ");
        if let Some(p) = self.prec {
            s.push_str(&format!(" + O(t^{})", p - 1));
        }
        s
    }
}

/// Inverse of a nonzero series, correct down to exponent `target`.
pub fn laurent_invert(x: &Laurent, target: i64, f: &Field) -> Result<Laurent> {
    let d = x.deg().ok_or(Error::ZeroArgument)?;
    let lc_inv = f.inv(x.lc())?;
    if let Some(px) = x.prec {
        let supported = px - 2 * d;
        if target < supported {
            return Err(Error::InsufficientPrecision { wanted: target, known: supported });
        }
    }
    // 1/x = t^{-d} * Y(u), u = 1/t, where X(u) Y(u) = 1 and x = t^d X(u).
    let n = (-d - target + 1).max(0) as usize;
    let a: Vec<Fe> = (0..n).map(|i| x.coeff(d - i as i64).unwrap()).collect();
    let mut y = vec![Fe::ZERO; n];
    for k in 0..n {
        let mut s = if k == 0 { Fe::ONE } else { Fe::ZERO };
        for i in 1..=k {
            s = f.sub(s, f.mul(a[i], y[k - i]));
        }
        y[k] = f.mul(s, lc_inv);
    }
    Ok(Laurent::normalized(-d, y, Some(target)))
}
