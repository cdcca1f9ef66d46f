//! Theta series on `SL_2(K_inf) / SL_2(O_inf)`.
//!
//! A point is carried as the pair `(y, x)` of the upper-triangular
//! representative `[[y, x/y], [0, 1/y]]`. The series is
//! `theta_L(z) = sum_{w in L} Psi(t^2 y^2 Q(w)) e{t^2 x Q(w)}`, where `Psi` is
//! the indicator of `O_inf` and `e{x}` reads the coefficient of `t^1`.
//!
//! The summation set `{w : deg Q(w) <= -2 - 2 deg y}` is an `F_q`-space and
//! the phase is an `F_q`-quadratic form on it, so the sum is evaluated as a
//! Gauss sum.

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{chi, laurent_invert, CycValue, Fe, Field, Laurent, Poly, RatFn, ZetaCounter};
use crate::error::{invalid, Error, Result};
use crate::fieldsums::{gauss_value, FqQuadSpace};
use crate::localdata::{weil_gamma, Place};
use crate::qform::{adjoint, diagonalize_over_k, reduce, GramLattice};
use crate::spectrum::{enumerate_spectrum, DEFAULT_BUDGET};

/// Largest `F_q`-dimension of a summation space.
const MAX_THETA_DIM: usize = 400;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ThetaPoint {
    pub y: Laurent,
    pub x: Laurent,
}

impl ThetaPoint {
    /// `y = t^{-m}` with an exact `x`.
    pub fn canonical(m: i64, x: Laurent) -> ThetaPoint {
        ThetaPoint { y: Laurent::monomial(Fe::ONE, -m), x }
    }

    /// Coset representative `y = t^{-m}`, `x = t^{1-2m} c` for a polynomial `c`.
    pub fn in_chart(m: i64, c: &Poly) -> ThetaPoint {
        ThetaPoint::canonical(m, Laurent::from_poly_shifted(c, 1 - 2 * m))
    }

    pub fn deg_y(&self) -> Result<i64> {
        self.y.deg().ok_or(Error::ZeroArgument)
    }

    /// Lowest exponent of `x` that the series reads: `x` matters modulo
    /// `y^2 t O_inf`.
    pub fn required_precision(&self) -> Result<i64> {
        Ok(1 + 2 * self.deg_y()?)
    }

    /// Right action of `[[u, b], [0, 1/u]]` with `u in O_inf^x`, `b in O_inf`:
    /// `(y, x) -> (y u, x + y^2 u b)`.
    pub fn act_upper(&self, u: &Laurent, b: &Laurent, f: &Field) -> Result<ThetaPoint> {
        if u.deg() != Some(0) {
            return Err(invalid("u must be a unit at infinity"));
        }
        if b.deg().is_some_and(|d| d > 0) {
            return Err(invalid("b must be integral at infinity"));
        }
        let y = self.y.mul(u, f);
        let x = self.x.add(&self.y.mul(&self.y, f).mul(u, f).mul(b, f), f);
        Ok(ThetaPoint { y, x })
    }
}

/// `S z` for `S = [[0, -1], [1, 0]]`: `(y, x) -> (y / x, -1 / x)`, with `1/x`
/// expanded as far as the image point is read.
pub fn s_transform(z: &ThetaPoint, f: &Field) -> Result<ThetaPoint> {
    let dx = z.x.deg().ok_or(Error::ZeroArgument)?;
    let dy = z.deg_y()?;
    let target = 1 + 2 * (dy - dx);
    let inv = laurent_invert(&z.x, target.min(-dx), f)?;
    let y = z.y.mul(&inv, f);
    Ok(ThetaPoint { y, x: inv.truncate(target).neg(f) })
}

/// `t^{-1}`-coefficients `kappa` of `x / c`, so that the phase of a value
/// `a` is `sum_i a_i kappa[-1-i]`.
struct Phase {
    /// `kappa[i]` is the coefficient of `t^{-1-i}` in `x / c`.
    kappa: Vec<Fe>,
}

impl Phase {
    fn new(x: &Laurent, c: &Poly, max_deg: usize, f: &Field) -> Result<Phase> {
        let low = -1 - max_deg as i64;
        let inv_c = laurent_invert(&Laurent::from_poly(c), low - x.deg().unwrap_or(0), f)?;
        let q = x.mul(&inv_c, f);
        let kappa = (0..=max_deg).map(|i| q.coeff(-1 - i as i64)).collect::<Result<Vec<_>>>()?;
        Ok(Phase { kappa })
    }

    fn apply(&self, a: &Poly, f: &Field) -> Fe {
        a.coeffs().iter().zip(&self.kappa).fold(Fe::ZERO, |acc, (&ai, &k)| f.add(acc, f.mul(ai, k)))
    }

    /// `lambda(t^s a)`
    fn apply_shifted(&self, a: &Poly, s: usize, f: &Field) -> Fe {
        a.coeffs()
            .iter()
            .enumerate()
            .filter_map(|(i, &ai)| self.kappa.get(i + s).map(|&k| f.mul(ai, k)))
            .fold(Fe::ZERO, |acc, v| f.add(acc, v))
    }
}

/// `sum_{w in L} Psi(t^2 y^2 Q(w)/c) e{t^2 x Q(w)/c}` for a reduced definite
/// `L` whose form is divided by the polynomial `c`.
pub fn theta_scaled(l: &GramLattice, c: &Poly, z: &ThetaPoint, f: &Field) -> Result<CycValue> {
    let mins = l.minima().ok_or_else(|| invalid("lattice must be reduced"))?;
    let cutoff = c.ideg().ok_or(Error::ZeroArgument)? - 2 - 2 * z.deg_y()?;
    if cutoff < 0 {
        return Ok(CycValue::from_int(f.p(), 1));
    }
    let basis: Vec<(usize, usize)> = mins
        .iter()
        .enumerate()
        .filter(|&(_, &mu)| mu as i64 <= cutoff)
        .flat_map(|(i, &mu)| (0..=((cutoff - mu as i64) / 2) as usize).map(move |j| (i, j)))
        .collect();
    if basis.len() > MAX_THETA_DIM {
        return Err(Error::BudgetExceeded { needed: basis.len() as u128, budget: MAX_THETA_DIM as u128 });
    }
    let phase = Phase::new(&z.x, c, cutoff as usize, f)?;
    let dim = basis.len();
    let mut rows = vec![vec![Fe::ZERO; dim]; dim];
    for a in 0..dim {
        for b in a..dim {
            let (i, j) = basis[a];
            let (k, l2) = basis[b];
            let v = phase.apply_shifted(l.entry(i, k), j + l2, f);
            rows[a][b] = v;
            rows[b][a] = v;
        }
    }
    Ok(gauss_value(&FqQuadSpace::new(rows)?.classify(f), f))
}

/// `theta_L(z)` for a definite lattice.
pub fn theta_eval(l: &GramLattice, z: &ThetaPoint, f: &Field) -> Result<CycValue> {
    let (r, _) = reduce(l, f)?;
    theta_scaled(&r, &Poly::one(), z, f)
}

/// The same value as `sum_{deg a <= cutoff} R(L, a) e{t^2 x a}` from the
/// enumerated spectrum.
pub fn theta_from_spectrum(l: &GramLattice, z: &ThetaPoint, f: &Field) -> Result<CycValue> {
    let (r, _) = reduce(l, f)?;
    let cutoff = -2 - 2 * z.deg_y()?;
    if cutoff < 0 {
        return Ok(CycValue::from_int(f.p(), 1));
    }
    let s = enumerate_spectrum(&r, cutoff as u32, DEFAULT_BUDGET, f)?;
    let phase = Phase::new(&z.x, &Poly::one(), cutoff as usize, f)?;
    let mut acc = ZetaCounter::new(f.p());
    for (a, n) in &s.counts {
        acc.push(f.trace(phase.apply(a, f)), *n as i64);
    }
    Ok(acc.value())
}

/// `theta_{L#}(z)`: `L#` carries `Q = Q_ad / D` on the adjoint lattice.
pub fn theta_dual(l: &GramLattice, z: &ThetaPoint, f: &Field) -> Result<CycValue> {
    let d = l.det(f);
    let (ad, _) = reduce(&adjoint(l, f)?, f)?;
    theta_scaled(&ad, &d, z, f)
}

/// Both sides of `theta_L(z) = |D|^{-1/2} |x|^{-n/2} gamma_inf(x Q) theta_{L#}(S z)`.
#[derive(Clone, Debug, Serialize)]
pub struct FunctionalEquation {
    pub lhs: (f64, f64),
    pub rhs: (f64, f64),
    pub gamma: (f64, f64),
    pub residual: f64,
}

fn laurent_to_ratfn(x: &Laurent, f: &Field) -> Result<RatFn> {
    let (shift, p) = x.as_laurent_poly().ok_or_else(|| invalid("x must be a Laurent polynomial"))?;
    if shift >= 0 {
        Ok(RatFn::from_poly(p.shift(shift as usize)))
    } else {
        RatFn::new(p, Poly::monomial(Fe::ONE, (-shift) as usize), f)
    }
}

pub fn functional_equation(l: &GramLattice, z: &ThetaPoint, f: &Field) -> Result<FunctionalEquation> {
    if z.x.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let n = l.rank() as f64;
    let q = f.q() as f64;
    let lhs = theta_eval(l, z, f)?.to_complex();
    let dual = theta_dual(l, &s_transform(z, f)?, f)?.to_complex();
    let x = laurent_to_ratfn(&z.x, f)?;
    let scaled: Vec<RatFn> = diagonalize_over_k(l, f).iter().map(|d| d.mul(&x, f)).collect();
    let gamma = weil_gamma(&scaled, &Place::Infinity, f)?.to_complex();
    let deg_d = l.det(f).ideg().unwrap() as f64;
    let deg_x = z.x.deg().unwrap() as f64;
    let factor = q.powf(-deg_d / 2.0 - n * deg_x / 2.0);
    let rhs: Complex64 = gamma * dual * factor;
    Ok(FunctionalEquation {
        lhs: (lhs.re, lhs.im),
        rhs: (rhs.re, rhs.im),
        gamma: (gamma.re, gamma.im),
        residual: (lhs - rhs).norm(),
    })
}

/// `|LHS - RHS|` of the functional equation under `zeta_p = exp(2 pi i / p)`.
pub fn functional_equation_residual(l: &GramLattice, z: &ThetaPoint, f: &Field) -> Result<f64> {
    Ok(functional_equation(l, z, f)?.residual)
}

/// `e{x}` for an exact or sufficiently precise series.
pub fn e_char(x: &Laurent, f: &Field) -> Result<CycValue> {
    Ok(chi(f, x.coeff(1)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::all_polys_below;
    use crate::qform::GramLattice;

    fn p(s: &str, f: &Field) -> Poly {
        Poly::parse(s, f).unwrap()
    }

    fn diag(v: &[&str], f: &Field) -> GramLattice {
        GramLattice::diagonal(&v.iter().map(|s| p(s, f)).collect::<Vec<_>>(), f).unwrap()
    }

    /// Direct sum over all `w` with small coordinates.
    fn brute(l: &GramLattice, z: &ThetaPoint, f: &Field) -> CycValue {
        let cutoff = -2 - 2 * z.deg_y().unwrap();
        let polys: Vec<Poly> = all_polys_below((cutoff.max(0) / 2 + 2) as usize, f).collect();
        let n = l.rank();
        let mut acc = ZetaCounter::new(f.p());
        for mut k in 0..polys.len().pow(n as u32) {
            let w: Vec<Poly> = (0..n)
                .map(|_| {
                    let v = polys[k % polys.len()].clone();
                    k /= polys.len();
                    v
                })
                .collect();
            let a = l.value(&w, f);
            if a.ideg().unwrap_or(0) <= cutoff {
                let e = Laurent::from_poly_shifted(&a, 2).mul(&z.x, f);
                acc.push(f.trace(e.coeff(1).unwrap()), 1);
            }
        }
        acc.value()
    }

    #[test]
    fn theta_examples() {
        let f = Field::prime(3).unwrap();
        let l = diag(&["1", "1", "t"], &f);
        // x = 0: |L_{2m-2}|
        for m in 1..4 {
            let z = ThetaPoint::canonical(m, Laurent::zero());
            let dim: u32 = crate::spectrum::closed_form_dims(&[0, 0, 1], (2 * m - 2) as u32).last().copied().unwrap();
            assert_eq!(theta_eval(&l, &z, &f).unwrap(), CycValue::from_int(3, 3i64.pow(dim)));
        }
        // below the first minimum only w = 0 survives
        let z = ThetaPoint::canonical(0, Laurent::from_poly(&p("t", &f)));
        assert_eq!(theta_eval(&l, &z, &f).unwrap(), CycValue::from_int(3, 1));
        // m = 1, x = t^3: t^5 Q(w) has no t^1 term for constant Q(w)
        let z = ThetaPoint::canonical(1, Laurent::from_poly(&p("t^3", &f)));
        assert_eq!(theta_eval(&l, &z, &f).unwrap(), CycValue::from_int(3, 9));
    }

    #[test]
    fn gauss_path_matches_direct_sum() {
        let f = Field::prime(3).unwrap();
        let l = diag(&["1", "1", "t"], &f);
        for (m, x) in [(1, "t^3"), (2, "t^5+t^6"), (2, "2t^5"), (2, "t^5+2t^7"), (3, "t^7+t^8")] {
            let z = ThetaPoint::canonical(m, Laurent::from_poly(&p(x, &f)));
            let want = brute(&l, &z, &f);
            assert_eq!(theta_eval(&l, &z, &f).unwrap(), want, "m={m} x={x}");
            assert_eq!(theta_from_spectrum(&l, &z, &f).unwrap(), want, "m={m} x={x}");
        }
    }

    #[test]
    fn s_transform_examples() {
        let f = Field::prime(3).unwrap();
        let z = ThetaPoint::canonical(1, Laurent::from_poly(&p("t^3", &f)));
        let s = s_transform(&z, &f).unwrap();
        assert_eq!(s.y.deg(), Some(-4));
        assert_eq!(s.x.deg(), Some(-3));
        assert_eq!(s.x.lc(), f.from_int(-1));
        // unit multiple of t^{1-2m}: deg y' = -m - (1 - 2m)
        let z = ThetaPoint::in_chart(2, &p("2", &f));
        let s = s_transform(&z, &f).unwrap();
        assert_eq!(s.y.deg(), Some(1));
        assert_eq!(s_transform(&ThetaPoint::canonical(1, Laurent::zero()), &f), Err(Error::ZeroArgument));
    }

    #[test]
    fn functional_equation_examples() {
        for q in [3u32, 5] {
            let f = Field::prime(q).unwrap();
            let forms = if q == 3 {
                vec![diag(&["1", "1", "t"], &f), diag(&["1", "t", "t^2"], &f), diag(&["t"], &f), diag(&["1", "1"], &f)]
            } else {
                vec![diag(&["1", "2", "t"], &f), diag(&["1", "t", "2t^2"], &f), diag(&["1", "2", "t+1"], &f)]
            };
            for l in &forms {
                for m in 1..=3i64 {
                    for c in ["1", "2", "t+1", "t^2+2", "2t^3+t"] {
                        let z = ThetaPoint::in_chart(m, &p(c, &f));
                        let fe = functional_equation(l, &z, &f).unwrap();
                        assert!(fe.residual < 1e-6, "q={q} L={} m={m} c={c}: {fe:?}", l.render());
                    }
                }
            }
        }
    }

    #[test]
    fn coset_invariance() {
        let f = Field::prime(3).unwrap();
        let l = diag(&["1", "1", "t"], &f);
        let z = ThetaPoint::in_chart(2, &p("t+2", &f));
        let base = theta_eval(&l, &z, &f).unwrap();
        let u = laurent_invert(&Laurent::from_poly(&p("2t+1", &f)), -12, &f).unwrap().mul(&Laurent::from_poly(&p("t", &f)), &f);
        let b = laurent_invert(&Laurent::from_poly(&p("t^2+t+2", &f)), -12, &f).unwrap().mul(&Laurent::from_poly(&p("t^2", &f)), &f);
        let moved = z.act_upper(&u, &b, &f).unwrap();
        assert_ne!(moved.x, z.x);
        assert_eq!(theta_eval(&l, &moved, &f).unwrap(), base);
    }

    #[test]
    fn functional_equation_is_not_vacuous() {
        // the samples carry nontrivial phases, and dropping gamma breaks the identity
        let f = Field::prime(3).unwrap();
        let l = diag(&["1", "1", "t"], &f);
        let mut nonreal = 0;
        let mut gamma_matters = 0;
        for m in 1..=3i64 {
            for c in ["1", "t+1", "t^2+2t"] {
                let fe = functional_equation(&l, &ThetaPoint::in_chart(m, &p(c, &f)), &f).unwrap();
                assert!(fe.residual < 1e-6);
                let lhs = Complex64::new(fe.lhs.0, fe.lhs.1);
                let without = Complex64::new(fe.rhs.0, fe.rhs.1) / Complex64::new(fe.gamma.0, fe.gamma.1);
                nonreal += (lhs.im.abs() > 1e-6) as usize;
                gamma_matters += ((lhs - without).norm() > 1e-3) as usize;
            }
        }
        assert!(nonreal > 0 && gamma_matters > 0);
    }
}
