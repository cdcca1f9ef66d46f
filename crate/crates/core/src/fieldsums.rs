//! Quadratic spaces over `F_q`, their Gauss sums, the Carlitz criterion for
//! systems of quadratic forms, and two finite verifiers used by the
//! ternary classification.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{quadratic_gauss_sum, CycValue, Fe, Field, Poly, ZetaCounter};
use crate::error::{invalid, Error, Result};
use crate::isometry::automorphism_group;
use crate::qform::{GramLattice, UnitClass};

/// `phi(x) = x^T M x` on `F_q^n` with `M` symmetric.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FqQuadSpace {
    n: usize,
    m: Vec<Fe>,
}

/// Rank and the class of the determinant of the nondegenerate part.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct QuadClass {
    pub n: usize,
    pub rank: usize,
    /// Class of `det phi_0`; `Square` when the rank is zero.
    pub det_class: UnitClass,
}

impl QuadClass {
    pub fn radical_dim(&self) -> usize {
        self.n - self.rank
    }
}

impl FqQuadSpace {
    pub fn new(rows: Vec<Vec<Fe>>) -> Result<FqQuadSpace> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(invalid("quadratic space matrix must be square"));
        }
        for i in 0..n {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(invalid("quadratic space matrix must be symmetric"));
                }
            }
        }
        Ok(FqQuadSpace { n, m: rows.into_iter().flatten().collect() })
    }

    pub fn from_indices(rows: &[Vec<u32>], f: &Field) -> Result<FqQuadSpace> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&i| f.elem(i)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        FqQuadSpace::new(rows)
    }

    pub fn zero(n: usize) -> FqQuadSpace {
        FqQuadSpace { n, m: vec![Fe::ZERO; n * n] }
    }

    pub fn diagonal(d: &[Fe]) -> FqQuadSpace {
        let mut w = FqQuadSpace::zero(d.len());
        for (i, &x) in d.iter().enumerate() {
            w.m[i * d.len() + i] = x;
        }
        w
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Fe {
        self.m[i * self.n + j]
    }

    pub fn to_indices(&self) -> Vec<Vec<u32>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.at(i, j).index()).collect()).collect()
    }

    pub fn value(&self, x: &[Fe], f: &Field) -> Fe {
        let mut acc = Fe::ZERO;
        for i in 0..self.n {
            if x[i].is_zero() {
                continue;
            }
            let mut row = Fe::ZERO;
            for j in 0..self.n {
                row = f.add(row, f.mul(self.at(i, j), x[j]));
            }
            acc = f.add(acc, f.mul(x[i], row));
        }
        acc
    }

    pub fn add(&self, o: &FqQuadSpace, f: &Field) -> FqQuadSpace {
        assert_eq!(self.n, o.n);
        FqQuadSpace { n: self.n, m: self.m.iter().zip(&o.m).map(|(&a, &b)| f.add(a, b)).collect() }
    }

    pub fn scale(&self, c: Fe, f: &Field) -> FqQuadSpace {
        FqQuadSpace { n: self.n, m: self.m.iter().map(|&a| f.mul(a, c)).collect() }
    }

    pub fn orthogonal_sum(&self, o: &FqQuadSpace) -> FqQuadSpace {
        let n = self.n + o.n;
        let mut w = FqQuadSpace::zero(n);
        for i in 0..self.n {
            for j in 0..self.n {
                w.m[i * n + j] = self.at(i, j);
            }
        }
        for i in 0..o.n {
            for j in 0..o.n {
                w.m[(self.n + i) * n + self.n + j] = o.at(i, j);
            }
        }
        w
    }

    /// `U^T M U` for a square matrix `U` given row-major.
    pub fn transform(&self, u: &[Fe], f: &Field) -> FqQuadSpace {
        let n = self.n;
        let mut mu = vec![Fe::ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Fe::ZERO;
                for k in 0..n {
                    s = f.add(s, f.mul(self.at(i, k), u[k * n + j]));
                }
                mu[i * n + j] = s;
            }
        }
        let mut out = vec![Fe::ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Fe::ZERO;
                for k in 0..n {
                    s = f.add(s, f.mul(u[k * n + i], mu[k * n + j]));
                }
                out[i * n + j] = s;
            }
        }
        FqQuadSpace { n, m: out }
    }

    /// Diagonal entries after symmetric elimination; zeros span the radical.
    pub fn diagonalize(&self, f: &Field) -> Vec<Fe> {
        let n = self.n;
        let mut a: Vec<Vec<Fe>> = (0..n).map(|i| (0..n).map(|j| self.at(i, j)).collect()).collect();
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            if a[k][k].is_zero() {
                if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                    a.swap(k, j);
                    for r in a.iter_mut() {
                        r.swap(k, j);
                    }
                } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                    for c in 0..n {
                        a[k][c] = f.add(a[k][c], a[j][c]);
                    }
                    for r in 0..n {
                        a[r][k] = f.add(a[r][k], a[r][j]);
                    }
                } else {
                    out.push(Fe::ZERO);
                    continue;
                }
            }
            let inv = f.inv(a[k][k]).unwrap();
            for i in k + 1..n {
                if a[i][k].is_zero() {
                    continue;
                }
                let c = f.mul(a[i][k], inv);
                for j in k..n {
                    a[i][j] = f.sub(a[i][j], f.mul(c, a[k][j]));
                }
                for r in k..n {
                    a[r][i] = f.sub(a[r][i], f.mul(c, a[r][k]));
                }
            }
            out.push(a[k][k]);
        }
        out
    }

    pub fn classify(&self, f: &Field) -> QuadClass {
        let d = self.diagonalize(f);
        let nz: Vec<Fe> = d.into_iter().filter(|x| !x.is_zero()).collect();
        let det = nz.iter().fold(Fe::ONE, |acc, &x| f.mul(acc, x));
        QuadClass { n: self.n, rank: nz.len(), det_class: UnitClass::of(det, f) }
    }
}

/// `Gamma(W, phi) = sum_w chi(phi(w))` by direct enumeration.
pub fn gauss_sum(w: &FqQuadSpace, f: &Field) -> CycValue {
    let n = w.dim();
    let q = f.q() as usize;
    let mut x = vec![Fe::ZERO; n];
    let mut z = ZetaCounter::new(f.p());
    let total = q.pow(n as u32);
    for k in 0..total {
        let mut r = k;
        for xi in x.iter_mut() {
            *xi = f.elem((r % q) as u32).unwrap();
            r /= q;
        }
        z.push(f.trace(w.value(&x, f)), 1);
    }
    z.value()
}

/// `q^{n-r} psi(det phi_0) G^r`.
pub fn gauss_sum_closed_form(w: &FqQuadSpace, f: &Field) -> CycValue {
    gauss_value(&w.classify(f), f)
}

pub fn gauss_value(c: &QuadClass, f: &Field) -> CycValue {
    let g = quadratic_gauss_sum(f);
    let scale = (f.q() as i64).pow(c.radical_dim() as u32) * c.det_class.sign() as i64;
    g.pow(c.rank as u32).scale(scale)
}

/// A system `(phi_1, ..., phi_m)` of quadratic forms on a common `F_q^n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QFSystem {
    forms: Vec<FqQuadSpace>,
}

/// JSON shape: a list of symmetric matrices of element indices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SystemFile(pub Vec<Vec<Vec<u32>>>);

impl QFSystem {
    pub fn new(forms: Vec<FqQuadSpace>) -> Result<QFSystem> {
        let n = forms.first().map(|w| w.dim()).ok_or_else(|| invalid("empty system"))?;
        if forms.iter().any(|w| w.dim() != n) {
            return Err(invalid("forms in a system must share a dimension"));
        }
        Ok(QFSystem { forms })
    }

    pub fn from_file(file: &SystemFile, f: &Field) -> Result<QFSystem> {
        QFSystem::new(file.0.iter().map(|m| FqQuadSpace::from_indices(m, f)).collect::<Result<_>>()?)
    }

    pub fn to_file(&self) -> SystemFile {
        SystemFile(self.forms.iter().map(|w| w.to_indices()).collect())
    }

    pub fn dim(&self) -> usize {
        self.forms[0].dim()
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn forms(&self) -> &[FqQuadSpace] {
        &self.forms
    }

    /// Every system evaluated through a constant change of variables.
    pub fn transform(&self, u: &[Fe], f: &Field) -> QFSystem {
        QFSystem { forms: self.forms.iter().map(|w| w.transform(u, f)).collect() }
    }
}

/// `|Phi^{-1}(y)|` for every `y` in the image, by enumeration of `F_q^n`.
pub fn fiber_counts(s: &QFSystem, f: &Field) -> HashMap<Vec<Fe>, u64> {
    let n = s.dim();
    let q = f.q() as usize;
    let mut out = HashMap::new();
    let mut x = vec![Fe::ZERO; n];
    for k in 0..q.pow(n as u32) {
        let mut r = k;
        for xi in x.iter_mut() {
            *xi = f.elem((r % q) as u32).unwrap();
            r /= q;
        }
        let y: Vec<Fe> = s.forms.iter().map(|w| w.value(&x, f)).collect();
        *out.entry(y).or_insert(0) += 1;
    }
    out
}

pub fn brute_force_isospectral(a: &QFSystem, b: &QFSystem, f: &Field) -> bool {
    fiber_counts(a, f) == fiber_counts(b, f)
}

/// Compares `Gamma(sum x_i phi_i)` with `Gamma(sum x_i phi'_i)` for every
/// `x in F_q^m`. The combinations are visited in a modular Gray code over
/// the `F_p`-digits of `x`, so each step adds one `F_p`-basis multiple of a
/// single form.
pub fn carlitz_isospectral(a: &QFSystem, b: &QFSystem, budget: u128, f: &Field) -> Result<bool> {
    if a.dim() != b.dim() || a.len() != b.len() {
        return Err(invalid("systems must have equal dimension and length"));
    }
    let m = a.len();
    let (p, e) = (f.p() as usize, f.e() as usize);
    let digits = m * e;
    let total = (f.q() as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if total > budget {
        return Err(Error::BudgetExceeded { needed: total, budget });
    }
    // step[d] = (form index, F_p-basis element)
    let steps: Vec<(usize, Fe)> =
        (0..digits).map(|d| (d / e, f.elem((p as u32).pow((d % e) as u32)).unwrap())).collect();
    let step_a: Vec<FqQuadSpace> = steps.iter().map(|&(i, c)| a.forms[i].scale(c, f)).collect();
    let step_b: Vec<FqQuadSpace> = steps.iter().map(|&(i, c)| b.forms[i].scale(c, f)).collect();
    let mut ca = FqQuadSpace::zero(a.dim());
    let mut cb = FqQuadSpace::zero(b.dim());
    let mut counter = vec![0usize; digits];
    loop {
        if ca.classify(f) != cb.classify(f) {
            return Ok(false);
        }
        // increment the base-p counter; the Gray digit that moves is the
        // position where the carry stops, and it moves by +1
        let mut j = 0;
        while j < digits && counter[j] == p - 1 {
            counter[j] = 0;
            j += 1;
        }
        if j == digits {
            return Ok(true);
        }
        counter[j] += 1;
        ca = ca.add(&step_a[j], f);
        cb = cb.add(&step_b[j], f);
    }
}

/// Outcome of checking that `Aut(Q0)` (constant matrices) is transitive on
/// the constant solutions of `Q0(x, y) = a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransitivityReport {
    pub solutions: usize,
    pub group_order: usize,
    pub orbit_size: usize,
    pub transitive: bool,
}

pub fn verify_binary_transitivity(q0: &GramLattice, a: &Poly, f: &Field) -> Result<TransitivityReport> {
    if q0.rank() != 2 {
        return Err(Error::RankMismatch(q0.rank(), 2));
    }
    let mins = q0.minima().ok_or_else(|| invalid("binary form must be reduced"))?;
    if mins[0] != mins[1] {
        return Err(invalid("binary form must have equal minima"));
    }
    let mut sols = Vec::new();
    for x in f.elements() {
        for y in f.elements() {
            if q0.value(&[Poly::constant(x), Poly::constant(y)], f) == *a {
                sols.push([x, y]);
            }
        }
    }
    let group = automorphism_group(q0, f)?;
    let Some(&first) = sols.first() else {
        return Ok(TransitivityReport { solutions: 0, group_order: group.len(), orbit_size: 0, transitive: true });
    };
    let mut orbit: Vec<[Fe; 2]> = group
        .iter()
        .map(|w| {
            let u = w.constants();
            [
                f.add(f.mul(u[0], first[0]), f.mul(u[1], first[1])),
                f.add(f.mul(u[2], first[0]), f.mul(u[3], first[1])),
            ]
        })
        .collect();
    orbit.sort();
    orbit.dedup();
    let transitive = orbit.len() == sols.len() && sols.iter().all(|s| orbit.contains(s));
    Ok(TransitivityReport { solutions: sols.len(), group_order: group.len(), orbit_size: orbit.len(), transitive })
}

/// Square class in `F_q` with zero as its own class: `0`, `1` (square), `-1`.
fn class_with_zero(x: Fe, f: &Field) -> i8 {
    f.psi(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SquaresReport {
    /// `F(x)` and `G(x)` lie in the same class of `F_q / (F_q^x)^2` for all `x`.
    pub pointwise: bool,
    /// `F = u^2 G` for some `u` in `F_q^x`.
    pub proportional: bool,
}

impl SquaresReport {
    pub fn implication_holds(&self) -> bool {
        !self.pointwise || self.proportional
    }
}

pub fn verify_squares_proportional(fp: &Poly, gp: &Poly, f: &Field) -> Result<SquaresReport> {
    if fp.deg() != Some(2) || gp.deg() != Some(2) {
        return Err(invalid("both polynomials must have degree 2"));
    }
    let pointwise = f.elements().all(|x| class_with_zero(fp.eval(x, f), f) == class_with_zero(gp.eval(x, f), f));
    let proportional = f.nonzero().any(|u| gp.scale(f.mul(u, u), f) == *fp);
    Ok(SquaresReport { pointwise, proportional })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SquaresSweep {
    pub pairs: u64,
    pub pointwise_pairs: u64,
    pub counterexamples: u64,
}

/// All ordered pairs of degree-2 polynomials over `F_q`.
pub fn sweep_squares_proportional(f: &Field) -> SquaresSweep {
    let quads: Vec<Poly> = crate::algebra::poly::all_polys_below(3, f).filter(|p| p.deg() == Some(2)).collect();
    let mut s = SquaresSweep::default();
    for a in &quads {
        for b in &quads {
            let r = verify_squares_proportional(a, b, f).unwrap();
            s.pairs += 1;
            s.pointwise_pairs += r.pointwise as u64;
            s.counterexamples += !r.implication_holds() as u64;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(f: &Field, n: i64) -> Fe {
        f.from_int(n)
    }

    #[test]
    fn gauss_examples() {
        let f = Field::prime(3).unwrap();
        let g = gauss_sum(&FqQuadSpace::diagonal(&[Fe::ONE]), &f);
        assert_eq!(g, CycValue::from_int(3, 1).add(&CycValue::zeta(3, 1).scale(2)));
        assert_eq!(g.mul(&g), CycValue::from_int(3, -3));
        assert_eq!(gauss_sum(&FqQuadSpace::zero(3), &f), CycValue::from_int(3, 27));
        let w = FqQuadSpace::diagonal(&[Fe::ONE, f.delta()]);
        assert_eq!(gauss_sum(&w, &f), CycValue::from_int(3, 3));
        assert_eq!(gauss_sum_closed_form(&w, &f), CycValue::from_int(3, 3));
    }

    #[test]
    fn g_squared_is_psi_minus_one_q() {
        for q in [3, 5, 7, 9, 25] {
            let f = Field::of_order(q).unwrap();
            let g = quadratic_gauss_sum(&f);
            let expect = f.psi(f.from_int(-1)) as i64 * q as i64;
            assert_eq!(g.mul(&g), CycValue::from_int(f.p(), expect), "q={q}");
        }
    }

    #[test]
    fn carlitz_examples() {
        let f = Field::prime(3).unwrap();
        let d = f.delta();
        let a = QFSystem::new(vec![FqQuadSpace::diagonal(&[Fe::ONE, d])]).unwrap();
        let b = QFSystem::new(vec![FqQuadSpace::diagonal(&[d, Fe::ONE])]).unwrap();
        assert!(carlitz_isospectral(&a, &b, u128::MAX, &f).unwrap());
        assert!(brute_force_isospectral(&a, &b, &f));
        let x2 = FqQuadSpace::diagonal(&[Fe::ONE, Fe::ZERO]);
        let y2 = FqQuadSpace::diagonal(&[Fe::ZERO, Fe::ONE]);
        let dy2 = FqQuadSpace::diagonal(&[Fe::ZERO, d]);
        let a = QFSystem::new(vec![x2.clone(), y2]).unwrap();
        let b = QFSystem::new(vec![x2, dy2]).unwrap();
        assert!(!carlitz_isospectral(&a, &b, u128::MAX, &f).unwrap());
        let ca = fiber_counts(&a, &f);
        let cb = fiber_counts(&b, &f);
        let key = vec![Fe::ZERO, Fe::ONE];
        assert_eq!((ca.get(&key).copied(), cb.get(&key).copied()), (Some(2), None));
    }

    #[test]
    fn carlitz_over_extension_field() {
        let f = Field::of_order(9).unwrap();
        let w = FqQuadSpace::new(vec![vec![Fe::ONE, f.elem(3).unwrap()], vec![f.elem(3).unwrap(), fe(&f, 2)]]).unwrap();
        let a = QFSystem::new(vec![w.clone(), FqQuadSpace::diagonal(&[Fe::ONE, Fe::ZERO])]).unwrap();
        let u: Vec<Fe> = vec![Fe::ONE, f.elem(4).unwrap(), Fe::ZERO, Fe::ONE];
        let b = a.transform(&u, &f);
        assert!(carlitz_isospectral(&a, &b, u128::MAX, &f).unwrap());
    }

    #[test]
    fn squares_sweeps() {
        for q in [3, 5] {
            let f = Field::prime(q).unwrap();
            let s = sweep_squares_proportional(&f);
            assert_eq!(s.counterexamples, 0);
            assert_eq!(s.pairs, ((q - 1) * q * q).pow(2) as u64);
        }
        let f = Field::prime(3).unwrap();
        let s = sweep_squares_proportional(&f);
        assert_eq!(s.pointwise_pairs, 18);
    }

    #[test]
    fn transitivity_examples() {
        let f = Field::prime(3).unwrap();
        let l = GramLattice::parse(&[&["t", "0"], &["0", "t"]], &f).unwrap();
        let r = verify_binary_transitivity(&l, &Poly::t(), &f).unwrap();
        assert_eq!(r.solutions, 4);
        assert!(r.transitive);
        assert_eq!(r.group_order, 8);
    }
}
