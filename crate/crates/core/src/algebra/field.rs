//! Finite fields `F_q`, `q = p^e` with `p` odd.
//!
//! Elements are indices `0..q`. For an extension field the index of
//! `c_0 + c_1 X + ... + c_{e-1} X^{e-1}` (coefficients in `F_p`, reduced
//! modulo the configured monic irreducible) is `sum c_i p^i`, so the prime
//! subfield occupies indices `0..p` and the canonical order is the order of
//! indices. All arithmetic goes through precomputed tables.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{invalid, Error, Result};

/// Largest supported field order (table memory is `O(q^2)`).
pub const MAX_Q: u32 = 1024;

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fe(pub(crate) u16);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn index(self) -> u32 {
        self.0 as u32
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// JSON form of a field configuration: `{"p":3,"e":1,"modulus":null}`.
///
/// `modulus`, when given, lists the coefficients of the monic irreducible
/// of degree `e` over `F_p` in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldConfig {
    pub p: u32,
    pub e: u32,
    #[serde(default)]
    pub modulus: Option<Vec<u32>>,
}

impl FieldConfig {
    pub fn prime(p: u32) -> Self {
        FieldConfig { p, e: 1, modulus: None }
    }

    /// Config for a field of order `q` using the built-in modulus table.
    pub fn for_order(q: u32) -> Result<Self> {
        let (p, e) = prime_power(q).ok_or_else(|| invalid(format!("{q} is not an odd prime power")))?;
        Ok(FieldConfig { p, e, modulus: None })
    }
}

/// Built-in moduli (ascending coefficients) for the non-prime orders we ship.
fn builtin_modulus(p: u32, e: u32) -> Option<Vec<u32>> {
    match (p, e) {
        (3, 2) => Some(vec![1, 0, 1]),    // X^2 + 1
        (5, 2) => Some(vec![2, 0, 1]),    // X^2 + 2
        (3, 3) => Some(vec![1, 2, 0, 1]), // X^3 + 2X + 1
        (7, 2) => Some(vec![1, 0, 1]),    // X^2 + 1
        _ => None,
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `q = p^e` with `p` an odd prime.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 3 || q % 2 == 0 {
        return None;
    }
    let p = (3..=q).find(|d| q % d == 0)?;
    if !is_prime(p) {
        return None;
    }
    let (mut r, mut e) = (q, 0);
    while r % p == 0 {
        r /= p;
        e += 1;
    }
    (r == 1).then_some((p, e))
}

#[derive(Clone)]
pub struct Field {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    trace: Vec<u16>,
    psi: Vec<i8>,
    delta: Fe,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{} (p={}, e={}, modulus={:?})", self.q, self.p, self.e, self.modulus)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}

impl Eq for Field {}

impl Field {
    pub fn prime(p: u32) -> Result<Field> {
        Field::from_config(&FieldConfig::prime(p))
    }

    pub fn of_order(q: u32) -> Result<Field> {
        Field::from_config(&FieldConfig::for_order(q)?)
    }

    pub fn from_config(cfg: &FieldConfig) -> Result<Field> {
        let (p, e) = (cfg.p, cfg.e);
        if p == 2 || !is_prime(p) {
            return Err(invalid(format!("characteristic {p} is not an odd prime")));
        }
        if e == 0 {
            return Err(invalid("extension degree must be positive"));
        }
        let q = p.checked_pow(e).filter(|&q| q <= MAX_Q).ok_or_else(|| invalid("field too large"))?;
        let modulus = match (&cfg.modulus, e) {
            (Some(m), _) => m.clone(),
            (None, 1) => vec![0, 1],
            (None, _) => builtin_modulus(p, e)
                .ok_or_else(|| invalid(format!("no built-in modulus for q = {q}; supply one")))?,
        };
        if modulus.len() != e as usize + 1 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(invalid("modulus must be monic of degree e with coefficients in 0..p"));
        }
        Field::build(p, e, q, modulus)
    }

    fn build(p: u32, e: u32, q: u32, modulus: Vec<u32>) -> Result<Field> {
        let qs = q as usize;
        let digits = |mut x: usize| -> Vec<u32> {
            (0..e)
                .map(|_| {
                    let d = (x % p as usize) as u32;
                    x /= p as usize;
                    d
                })
                .collect()
        };
        let undigits = |v: &[u32]| -> u16 { v.iter().rev().fold(0u32, |acc, &d| acc * p + d) as u16 };
        let vecs: Vec<Vec<u32>> = (0..qs).map(digits).collect();

        let mut add = vec![0u16; qs * qs];
        let mut mul = vec![0u16; qs * qs];
        for a in 0..qs {
            for b in 0..qs {
                let s: Vec<u32> = vecs[a].iter().zip(&vecs[b]).map(|(x, y)| (x + y) % p).collect();
                add[a * qs + b] = undigits(&s);
                // schoolbook product then reduce by the monic modulus
                let mut prod = vec![0u32; 2 * e as usize];
                for (i, x) in vecs[a].iter().enumerate() {
                    for (j, y) in vecs[b].iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                for k in (e as usize..prod.len()).rev() {
                    let c = prod[k];
                    if c != 0 {
                        prod[k] = 0;
                        for (j, m) in modulus[..e as usize].iter().enumerate() {
                            let idx = k - e as usize + j;
                            prod[idx] = (prod[idx] + p - (c * m) % p) % p;
                        }
                    }
                }
                mul[a * qs + b] = undigits(&prod[..e as usize]);
            }
        }
        let mut neg = vec![0u16; qs];
        let mut inv = vec![0u16; qs];
        for a in 0..qs {
            neg[a] = (0..qs).find(|&b| add[a * qs + b] == 0).unwrap() as u16;
            if a != 0 {
                // a zero divisor means the modulus was reducible
                inv[a] = (1..qs).find(|&b| mul[a * qs + b] == 1).ok_or(Error::NotIrreducible)? as u16;
            }
        }
        let mut f = Field { p, e, q, modulus, add, mul, neg, inv, trace: vec![], psi: vec![], delta: Fe(0) };
        f.trace = (0..qs)
            .map(|a| {
                let mut acc = Fe(0);
                let mut x = Fe(a as u16);
                for _ in 0..e {
                    acc = f.add(acc, x);
                    x = f.pow(x, p as u64);
                }
                debug_assert!(acc.index() < p);
                acc.0
            })
            .collect();
        let half = ((q - 1) / 2) as u64;
        f.psi = (0..qs)
            .map(|a| match a {
                0 => 0,
                _ if f.pow(Fe(a as u16), half) == Fe::ONE => 1,
                _ => -1,
            })
            .collect();
        f.delta = Fe((1..qs).find(|&a| f.psi[a] == -1).unwrap() as u16);
        Ok(f)
    }

    pub fn config(&self) -> FieldConfig {
        FieldConfig {
            p: self.p,
            e: self.e,
            modulus: if self.e == 1 { None } else { Some(self.modulus.clone()) },
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// The least non-square in canonical order.
    pub fn delta(&self) -> Fe {
        self.delta
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> + Clone {
        (0..self.q as u16).map(Fe)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Fe> + Clone {
        (1..self.q as u16).map(Fe)
    }

    pub fn elem(&self, index: u32) -> Result<Fe> {
        if index < self.q {
            Ok(Fe(index as u16))
        } else {
            Err(invalid(format!("{index} is not an element index of F_{}", self.q)))
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.p as i64) as u16)
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        Fe(self.add[a.0 as usize * self.q as usize + b.0 as usize])
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        Fe(self.mul[a.0 as usize * self.q as usize + b.0 as usize])
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.is_zero() {
            Err(Error::ZeroArgument)
        } else {
            Ok(Fe(self.inv[a.0 as usize]))
        }
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, mut n: u64) -> Fe {
        let (mut base, mut acc) = (a, Fe::ONE);
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    /// Absolute trace to `F_p`, returned as an integer in `0..p`.
    #[inline]
    pub fn trace(&self, a: Fe) -> u32 {
        self.trace[a.0 as usize] as u32
    }

    /// Quadratic character: 1 on nonzero squares, -1 on non-squares, 0 at 0.
    #[inline]
    pub fn psi(&self, a: Fe) -> i8 {
        self.psi[a.0 as usize]
    }

    pub fn is_square(&self, a: Fe) -> bool {
        self.psi(a) >= 0
    }

    pub fn frobenius(&self, a: Fe) -> Fe {
        self.pow(a, self.p as u64)
    }

    pub fn sqrt(&self, a: Fe) -> Option<Fe> {
        self.elements().find(|&x| self.mul(x, x) == a)
    }
}
