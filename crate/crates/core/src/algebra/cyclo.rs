//! Exact arithmetic in `Z[zeta_p]`.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// `sum c_j zeta_p^j` in the power basis `zeta^0..zeta^{p-2}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycValue {
    p: u32,
    c: Vec<i64>,
}

impl fmt::Debug for CycValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl CycValue {
    pub fn zero(p: u32) -> CycValue {
        CycValue { p, c: vec![0; p as usize - 1] }
    }

    pub fn from_int(p: u32, n: i64) -> CycValue {
        let mut v = CycValue::zero(p);
        v.c[0] = n;
        v
    }

    /// `zeta_p^k`
    pub fn zeta(p: u32, k: i64) -> CycValue {
        let mut full = vec![0i64; p as usize];
        full[k.rem_euclid(p as i64) as usize] = 1;
        CycValue::from_full(p, full)
    }

    /// From coefficients on `zeta^0..zeta^{p-1}` (length `p`).
    pub fn from_full(p: u32, mut full: Vec<i64>) -> CycValue {
        debug_assert_eq!(full.len(), p as usize);
        let top = full.pop().unwrap();
        for x in full.iter_mut() {
            *x -= top;
        }
        CycValue { p, c: full }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    /// The value as an integer, if it lies in `Z`.
    pub fn as_int(&self) -> Option<i64> {
        self.c[1..].iter().all(|&x| x == 0).then_some(self.c[0])
    }

    fn check(&self, o: &CycValue) -> Result<()> {
        if self.p == o.p {
            Ok(())
        } else {
            Err(Error::MismatchedCharacteristic(self.p, o.p))
        }
    }

    pub fn try_add(&self, o: &CycValue) -> Result<CycValue> {
        self.check(o)?;
        Ok(CycValue { p: self.p, c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() })
    }

    pub fn try_mul(&self, o: &CycValue) -> Result<CycValue> {
        self.check(o)?;
        let p = self.p as usize;
        let mut full = vec![0i64; p];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                full[(i + j) % p] += a * b;
            }
        }
        Ok(CycValue::from_full(self.p, full))
    }

    pub fn add(&self, o: &CycValue) -> CycValue {
        self.try_add(o).expect("characteristic mismatch")
    }

    pub fn sub(&self, o: &CycValue) -> CycValue {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &CycValue) -> CycValue {
        self.try_mul(o).expect("characteristic mismatch")
    }

    pub fn neg(&self) -> CycValue {
        CycValue { p: self.p, c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn scale(&self, k: i64) -> CycValue {
        CycValue { p: self.p, c: self.c.iter().map(|x| x * k).collect() }
    }

    pub fn pow(&self, n: u32) -> CycValue {
        (0..n).fold(CycValue::from_int(self.p, 1), |acc, _| acc.mul(self))
    }

    /// Complex conjugation, `zeta -> zeta^{-1}`.
    pub fn conj(&self) -> CycValue {
        let p = self.p as usize;
        let mut full = vec![0i64; p];
        for (j, &a) in self.c.iter().enumerate() {
            full[(p - j) % p] += a;
        }
        CycValue::from_full(self.p, full)
    }

    /// Adds `zeta^k` in place.
    #[inline]
    pub fn add_zeta(&mut self, k: u32, times: i64) {
        let p = self.p;
        let k = k % p;
        if k == p - 1 {
            for x in self.c.iter_mut() {
                *x -= times;
            }
        } else {
            self.c[k as usize] += times;
        }
    }

    /// Embedding with `zeta_p = exp(2 pi i / p)`.
    pub fn to_complex(&self) -> Complex64 {
        self.c
            .iter()
            .enumerate()
            .map(|(j, &a)| Complex64::from_polar(a as f64, 2.0 * PI * j as f64 / self.p as f64))
            .sum()
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (j, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            parts.push(match j {
                0 => format!("{a}"),
                1 => format!("{a}*z"),
                _ => format!("{a}*z^{j}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Histogram of exponents `k mod p`, accumulated into a `CycValue` at the end.
#[derive(Clone, Debug)]
pub struct ZetaCounter {
    counts: Vec<i64>,
}

impl ZetaCounter {
    pub fn new(p: u32) -> Self {
        ZetaCounter { counts: vec![0; p as usize] }
    }

    #[inline]
    pub fn push(&mut self, k: u32, times: i64) {
        self.counts[k as usize] += times;
    }

    pub fn merge(mut self, o: &ZetaCounter) -> Self {
        for (a, b) in self.counts.iter_mut().zip(&o.counts) {
            *a += b;
        }
        self
    }

    pub fn value(&self) -> CycValue {
        CycValue::from_full(self.counts.len() as u32, self.counts.clone())
    }
}

/// A value `sum / q^{k/2}` with `sum` exact in `Z[zeta_p]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ScaledCycValue {
    pub sum: CycValue,
    pub q: u32,
    pub q_half_power: i64,
}

impl ScaledCycValue {
    pub fn exact(sum: CycValue, q: u32) -> Self {
        ScaledCycValue { sum, q, q_half_power: 0 }
    }

    pub fn one(p: u32, q: u32) -> Self {
        ScaledCycValue::exact(CycValue::from_int(p, 1), q)
    }

    pub fn mul(&self, o: &ScaledCycValue) -> ScaledCycValue {
        ScaledCycValue { sum: self.sum.mul(&o.sum), q: self.q, q_half_power: self.q_half_power + o.q_half_power }
    }

    pub fn to_complex(&self) -> Complex64 {
        self.sum.to_complex() / (self.q as f64).powf(self.q_half_power as f64 / 2.0)
    }

    pub fn abs(&self) -> f64 {
        self.to_complex().norm()
    }

    /// `log_q |value|`
    pub fn log_q_abs(&self) -> f64 {
        self.sum.to_complex().norm().ln() / (self.q as f64).ln() - self.q_half_power as f64 / 2.0
    }

    /// Equality: exact when the half-powers have equal parity, numeric (1e-9)
    /// otherwise.
    pub fn equals(&self, o: &ScaledCycValue) -> bool {
        let d = self.q_half_power - o.q_half_power;
        if d % 2 == 0 {
            let k = d.unsigned_abs() as u32 / 2;
            let f = CycValue::from_int(self.sum.p(), (self.q as i64).pow(k));
            if d >= 0 {
                self.sum == o.sum.mul(&f)
            } else {
                self.sum.mul(&f) == o.sum
            }
        } else {
            (self.to_complex() - o.to_complex()).norm() < 1e-9
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_polynomial_relations() {
        let z = CycValue::zeta(3, 1);
        let z2 = CycValue::zeta(3, 2);
        assert_eq!(z.add(&z2), CycValue::from_int(3, -1));
        assert_eq!(z.mul(&z2), CycValue::from_int(3, 1));
    }

    #[test]
    fn p5_product() {
        let one = CycValue::from_int(5, 1);
        let a = one.add(&CycValue::zeta(5, 1));
        let b = one.add(&CycValue::zeta(5, 4));
        let expect = CycValue::from_int(5, 2).add(&CycValue::zeta(5, 1)).add(&CycValue::zeta(5, 4));
        assert_eq!(a.mul(&b), expect);
        assert_eq!(a.conj(), b);
    }

    #[test]
    fn mismatched_p() {
        assert_eq!(
            CycValue::zero(3).try_add(&CycValue::zero(5)),
            Err(Error::MismatchedCharacteristic(3, 5))
        );
    }

    #[test]
    fn embedding_matches() {
        let g = CycValue::from_int(3, 1).add(&CycValue::zeta(3, 1).scale(2));
        let c = g.to_complex();
        assert!((c.re).abs() < 1e-12 && (c.im - 3f64.sqrt()).abs() < 1e-12);
    }
}
