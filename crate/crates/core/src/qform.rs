//! Quadratic lattices over `A = F_q[t]` given by Gram matrices.
//!
//! The Gram entries are `m_ij = B(v_i, v_j) / 2`, so `m_ii = Q(v_i)`.
//! A Gram matrix is *reduced* when `deg m_ii <= deg m_jj` and
//! `deg m_ij < deg m_ii` for all `i < j`.

use serde::{Deserialize, Serialize};

use crate::algebra::{Fe, Field, FieldConfig, Poly, PolyMatrix, RatFn};
use crate::error::{invalid, Error, Result};
use crate::localdata::{hilbert_symbol, Place};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GramLattice {
    gram: PolyMatrix,
    reduced: bool,
    minima: Option<Vec<u32>>,
}

/// Square class of an element of `F_q^x`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum UnitClass {
    Square,
    Nonsquare,
}

impl UnitClass {
    pub fn of(u: Fe, f: &Field) -> UnitClass {
        if f.is_square(u) {
            UnitClass::Square
        } else {
            UnitClass::Nonsquare
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            UnitClass::Square => 1,
            UnitClass::Nonsquare => -1,
        }
    }

    pub fn mul(self, o: UnitClass) -> UnitClass {
        if self == o {
            UnitClass::Square
        } else {
            UnitClass::Nonsquare
        }
    }
}

/// Class of an element of `K_inf^x / (K_inf^x)^2`: the parity of its degree
/// and the square class of its leading coefficient. Representatives are
/// `1, delta, 1/t, delta/t`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize, PartialOrd, Ord)]
pub struct SquareClassAtInfinity {
    pub odd: bool,
    pub unit: UnitClass,
}

impl SquareClassAtInfinity {
    pub fn of(a: &RatFn, f: &Field) -> Result<SquareClassAtInfinity> {
        let d = a.deg().ok_or(Error::ZeroArgument)?;
        Ok(SquareClassAtInfinity { odd: d.rem_euclid(2) == 1, unit: UnitClass::of(a.lc(), f) })
    }

    pub fn of_poly(a: &Poly, f: &Field) -> Result<SquareClassAtInfinity> {
        SquareClassAtInfinity::of(&RatFn::from_poly(a.clone()), f)
    }

    pub fn is_square(self) -> bool {
        !self.odd && self.unit == UnitClass::Square
    }

    pub fn mul(self, o: SquareClassAtInfinity) -> SquareClassAtInfinity {
        SquareClassAtInfinity { odd: self.odd ^ o.odd, unit: self.unit.mul(o.unit) }
    }

    /// A representative in `K`.
    pub fn representative(self, f: &Field) -> RatFn {
        let u = match self.unit {
            UnitClass::Square => Fe::ONE,
            UnitClass::Nonsquare => f.delta(),
        };
        let num = Poly::constant(u);
        if self.odd {
            RatFn::new(num, Poly::t(), f).unwrap()
        } else {
            RatFn::from_poly(num)
        }
    }
}

/// `det = u * monic` with `u` in `F_q^x`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct DeterminantClass {
    pub monic_det: Poly,
    pub unit_class: UnitClass,
}

/// Invariants of the form over `K_inf`: rank, discriminant class, Hasse invariant.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct InfinityInvariants {
    pub rank: usize,
    pub det: SquareClassAtInfinity,
    pub hasse: i8,
}

impl GramLattice {
    /// Checks that `gram` is square, symmetric and nonsingular.
    pub fn new(gram: PolyMatrix, f: &Field) -> Result<GramLattice> {
        if !gram.is_square() || gram.rows() == 0 {
            return Err(invalid("Gram matrix must be square and nonempty"));
        }
        if !gram.is_symmetric() {
            return Err(invalid("Gram matrix must be symmetric"));
        }
        if gram.det(f).is_zero() {
            return Err(Error::SingularForm);
        }
        Ok(GramLattice::new_unchecked(gram))
    }

    pub(crate) fn new_unchecked(gram: PolyMatrix) -> GramLattice {
        let mut l = GramLattice { gram, reduced: false, minima: None };
        if l.satisfies_reduced_condition() {
            l.reduced = true;
            l.minima = Some(l.diagonal_degrees());
        }
        l
    }

    pub fn diagonal(entries: &[Poly], f: &Field) -> Result<GramLattice> {
        GramLattice::new(PolyMatrix::diagonal(entries), f)
    }

    pub fn from_rows(rows: Vec<Vec<Poly>>, f: &Field) -> Result<GramLattice> {
        GramLattice::new(PolyMatrix::from_rows(rows)?, f)
    }

    /// Parses rows of human-readable polynomials, e.g. `[["1","t"],["t","t^2+t"]]`.
    pub fn parse(rows: &[&[&str]], f: &Field) -> Result<GramLattice> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|s| Poly::parse(s, f)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        GramLattice::from_rows(rows, f)
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &PolyMatrix {
        &self.gram
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        &self.gram[(i, j)]
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    /// Minima, populated for reduced Grams.
    pub fn minima(&self) -> Option<&[u32]> {
        self.minima.as_deref()
    }

    pub fn det(&self, f: &Field) -> Poly {
        self.gram.det(f)
    }

    fn diagonal_degrees(&self) -> Vec<u32> {
        (0..self.rank()).map(|i| self.gram[(i, i)].deg().map_or(0, |d| d as u32)).collect()
    }

    fn satisfies_reduced_condition(&self) -> bool {
        let n = self.rank();
        for i in 0..n {
            let dii = self.gram[(i, i)].deg();
            if dii.is_none() {
                return false;
            }
            for j in i + 1..n {
                if dii > self.gram[(j, j)].deg() || self.gram[(i, j)].deg() >= dii {
                    return false;
                }
            }
        }
        true
    }

    /// `Q(sum x_i v_i)`
    pub fn value(&self, x: &[Poly], f: &Field) -> Poly {
        self.bilinear(x, x, f)
    }

    /// `B(x, y) / 2`
    pub fn bilinear(&self, x: &[Poly], y: &[Poly], f: &Field) -> Poly {
        assert_eq!(x.len(), self.rank());
        assert_eq!(y.len(), self.rank());
        let mut acc = Poly::zero();
        for i in 0..self.rank() {
            if x[i].is_zero() {
                continue;
            }
            let mut row = Poly::zero();
            for j in 0..self.rank() {
                if !y[j].is_zero() && !self.gram[(i, j)].is_zero() {
                    row = row.add(&self.gram[(i, j)].mul(&y[j], f), f);
                }
            }
            acc = acc.add(&x[i].mul(&row, f), f);
        }
        acc
    }

    /// The lattice with basis `v U` (columns of `U` are new basis vectors).
    pub fn transform(&self, u: &PolyMatrix, f: &Field) -> Result<GramLattice> {
        if !u.is_unimodular(f) || u.rows() != self.rank() {
            return Err(invalid("change of basis must be unimodular of matching size"));
        }
        Ok(GramLattice::new_unchecked(self.gram.congruent(u, f)))
    }

    /// `c * Q`
    pub fn scaled(&self, c: &Poly, f: &Field) -> Result<GramLattice> {
        GramLattice::new(self.gram.scale(c, f), f)
    }

    /// Orthogonal sum.
    pub fn orthogonal_sum(&self, o: &GramLattice) -> GramLattice {
        let n = self.rank() + o.rank();
        let mut g = PolyMatrix::zeros(n, n);
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                g[(i, j)] = self.gram[(i, j)].clone();
            }
        }
        for i in 0..o.rank() {
            for j in 0..o.rank() {
                g[(self.rank() + i, self.rank() + j)] = o.gram[(i, j)].clone();
            }
        }
        GramLattice::new_unchecked(g)
    }

    pub fn render(&self) -> String {
        self.gram.render()
    }

    pub fn to_file(&self, f: &Field) -> LatticeFile {
        LatticeFile {
            field: f.config(),
            gram: self.gram.to_rows().iter().map(|r| r.iter().map(|p| p.to_indices()).collect()).collect(),
        }
    }

    pub fn to_json(&self, f: &Field) -> String {
        serde_json::to_string(&self.to_file(f)).expect("serializable")
    }
}

/// On-disk form: `{"field": {...}, "gram": [[[c0, c1, ...], ...], ...]}` with
/// little-endian coefficient lists.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LatticeFile {
    pub field: FieldConfig,
    pub gram: Vec<Vec<Vec<u32>>>,
}

impl LatticeFile {
    pub fn load(&self) -> Result<(Field, GramLattice)> {
        let f = Field::from_config(&self.field)?;
        let rows = self
            .gram
            .iter()
            .map(|r| r.iter().map(|c| Poly::from_indices(&f, c)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let l = GramLattice::from_rows(rows, &f)?;
        Ok((f, l))
    }

    pub fn from_json(s: &str) -> Result<LatticeFile> {
        serde_json::from_str(s).map_err(|e| invalid(format!("lattice JSON: {e}")))
    }
}

/// Diagonal entries of an orthogonal basis of `L (x) K`.
pub fn diagonalize_over_k(l: &GramLattice, f: &Field) -> Vec<RatFn> {
    let n = l.rank();
    let mut m: Vec<Vec<RatFn>> =
        (0..n).map(|i| (0..n).map(|j| RatFn::from_poly(l.gram[(i, j)].clone())).collect()).collect();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        if m[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !m[j][j].is_zero()) {
                m.swap(k, j);
                for row in m.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !m[k][j].is_zero()) {
                // v_k += v_j gives Q = 2 m_kj != 0
                for c in 0..n {
                    let v = m[k][c].add(&m[j][c], f);
                    m[k][c] = v;
                }
                for r in 0..n {
                    let v = m[r][k].add(&m[r][j], f);
                    m[r][k] = v;
                }
            } else {
                out.push(RatFn::zero());
                continue;
            }
        }
        let piv = m[k][k].clone();
        let inv = piv.inv(f).expect("nonzero pivot");
        for i in k + 1..n {
            if m[i][k].is_zero() {
                continue;
            }
            let c = m[i][k].mul(&inv, f);
            for j in k..n {
                let v = m[i][j].sub(&c.mul(&m[k][j], f), f);
                m[i][j] = v;
            }
            for r in k..n {
                let v = m[r][i].sub(&c.mul(&m[r][k], f), f);
                m[r][i] = v;
            }
        }
        out.push(piv);
    }
    out
}

pub fn infinity_invariants(l: &GramLattice, f: &Field) -> Result<InfinityInvariants> {
    let diag = diagonalize_over_k(l, f);
    if diag.iter().any(|d| d.is_zero()) {
        return Err(Error::SingularForm);
    }
    let classes: Vec<SquareClassAtInfinity> =
        diag.iter().map(|d| SquareClassAtInfinity::of(d, f)).collect::<Result<_>>()?;
    let mut det = SquareClassAtInfinity { odd: false, unit: UnitClass::Square };
    let mut hasse = 1i8;
    for i in 0..classes.len() {
        det = det.mul(classes[i]);
        for j in i + 1..classes.len() {
            hasse *= hilbert_symbol(&diag[i], &diag[j], &Place::Infinity, f)?;
        }
    }
    Ok(InfinityInvariants { rank: l.rank(), det, hasse })
}

/// Anisotropy over `K_inf`, from the rank, discriminant and Hasse invariant.
pub fn is_definite(l: &GramLattice, f: &Field) -> Result<bool> {
    let n = l.rank();
    if n > 4 {
        return Ok(false);
    }
    let inv = infinity_invariants(l, f)?;
    let minus_one = RatFn::from_poly(Poly::constant(f.from_int(-1)));
    let d = inv.det.representative(f);
    Ok(match n {
        1 => true,
        2 => !SquareClassAtInfinity::of(&d.neg(f), f)?.is_square(),
        3 => hilbert_symbol(&minus_one, &d.neg(f), &Place::Infinity, f)? != inv.hasse,
        4 => {
            let m1 = hilbert_symbol(&minus_one, &minus_one, &Place::Infinity, f)?;
            inv.det.is_square() && inv.hasse == -m1
        }
        _ => unreachable!(),
    })
}

/// Reduced Gram `U^T S U` and the change of basis `U`.
pub fn reduce(l: &GramLattice, f: &Field) -> Result<(GramLattice, PolyMatrix)> {
    if !is_definite(l, f)? {
        return Err(Error::NotDefinite);
    }
    let n = l.rank();
    let mut s = l.gram.clone();
    let mut u = PolyMatrix::identity(n);
    let maxdeg = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter_map(|(i, j)| s[(i, j)].deg()).max();
    let cap = 64 * n * maxdeg.unwrap_or(1).max(1);
    for _ in 0..=cap {
        let mut changed = sort_by_diagonal(&mut s, &mut u);
        for i in 0..n {
            for j in i + 1..n {
                if s[(i, j)].deg() < s[(i, i)].deg() {
                    continue;
                }
                let qt = s[(i, j)].quot(&s[(i, i)], f)?;
                if qt.is_zero() {
                    continue;
                }
                let neg = qt.neg(f);
                add_multiple(&mut s, &mut u, j, i, &neg, f);
                changed = true;
            }
        }
        if !changed {
            let red = GramLattice::new_unchecked(s);
            debug_assert!(red.reduced);
            return Ok((red, u));
        }
    }
    Err(Error::NotDefinite)
}

/// Stable sort of the basis by `m_ii` (degree, then coefficients).
fn sort_by_diagonal(s: &mut PolyMatrix, u: &mut PolyMatrix) -> bool {
    let n = s.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[(a, a)].cmp(&s[(b, b)]));
    if order.iter().enumerate().all(|(i, &o)| i == o) {
        return false;
    }
    let mut ns = PolyMatrix::zeros(n, n);
    let mut nu = PolyMatrix::zeros(n, n);
    for (a, &oa) in order.iter().enumerate() {
        for (b, &ob) in order.iter().enumerate() {
            ns[(a, b)] = s[(oa, ob)].clone();
        }
        for r in 0..n {
            nu[(r, a)] = u[(r, oa)].clone();
        }
    }
    *s = ns;
    *u = nu;
    true
}

/// `v_j <- v_j + c v_i`
fn add_multiple(s: &mut PolyMatrix, u: &mut PolyMatrix, j: usize, i: usize, c: &Poly, f: &Field) {
    let n = s.rows();
    // column j += c * column i, then row j += c * row i
    for r in 0..n {
        let v = s[(r, j)].add(&s[(r, i)].mul(c, f), f);
        s[(r, j)] = v;
        let w = u[(r, j)].add(&u[(r, i)].mul(c, f), f);
        u[(r, j)] = w;
    }
    for col in 0..n {
        let v = s[(j, col)].add(&s[(i, col)].mul(c, f), f);
        s[(j, col)] = v;
    }
}

pub fn successive_minima(l: &GramLattice, f: &Field) -> Result<Vec<u32>> {
    if let Some(m) = &l.minima {
        if !is_definite(l, f)? {
            return Err(Error::NotDefinite);
        }
        return Ok(m.clone());
    }
    let (r, _) = reduce(l, f)?;
    Ok(r.minima.expect("reduced"))
}

/// Reversed adjugate: the Gram of `(L#, D Q)` in the reversed dual basis.
pub fn adjoint(l: &GramLattice, f: &Field) -> Result<GramLattice> {
    if l.det(f).is_zero() {
        return Err(Error::SingularForm);
    }
    let adj = l.gram.adjugate(f);
    let n = l.rank();
    let mut g = PolyMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = adj[(n - 1 - i, n - 1 - j)].clone();
        }
    }
    Ok(GramLattice::new_unchecked(g))
}

pub fn determinant_class(l: &GramLattice, f: &Field) -> DeterminantClass {
    let d = l.det(f);
    DeterminantClass { unit_class: UnitClass::of(d.lc(), f), monic_det: d.monic(f) }
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

    fn f5() -> Field {
        Field::prime(5).unwrap()
    }

    fn diag(v: &[&str], f: &Field) -> GramLattice {
        GramLattice::diagonal(&v.iter().map(|s| p(s, f)).collect::<Vec<_>>(), f).unwrap()
    }

    #[test]
    fn reduce_examples() {
        // <1, delta, t> is definite over F_5; over F_3 the definite analogue is <1, -delta, t>
        for (f, l) in [(f5(), diag(&["1", "2", "t"], &f5())), (f3(), diag(&["1", "1", "t"], &f3()))] {
            let (r, u) = reduce(&l, &f).unwrap();
            assert_eq!(r.gram(), l.gram());
            assert_eq!(u, PolyMatrix::identity(3));
        }

        let f = f3();
        let l = GramLattice::parse(&[&["1", "t"], &["t", "t^2+t"]], &f).unwrap();
        let (r, u) = reduce(&l, &f).unwrap();
        assert_eq!(r.gram(), &PolyMatrix::diagonal(&[Poly::one(), Poly::t()]));
        let expect = PolyMatrix::from_rows(vec![vec![Poly::one(), p("2t", &f)], vec![Poly::zero(), Poly::one()]]).unwrap();
        assert_eq!(u, expect);
        assert_eq!(l.gram().congruent(&u, &f), *r.gram());
        assert_eq!(successive_minima(&l, &f).unwrap(), vec![0, 1]);

        let l = GramLattice::parse(&[&["t^2+1"]], &f).unwrap();
        assert_eq!(reduce(&l, &f).unwrap().0, l);
    }

    #[test]
    fn minima_examples() {
        let f = f5();
        assert_eq!(successive_minima(&diag(&["1", "2", "t"], &f), &f).unwrap(), vec![0, 0, 1]);
        assert_eq!(successive_minima(&diag(&["1", "t", "2t^2"], &f), &f).unwrap(), vec![0, 1, 2]);
        let f = f3();
        assert_eq!(successive_minima(&diag(&["1", "1", "t"], &f), &f).unwrap(), vec![0, 0, 1]);
        assert_eq!(successive_minima(&diag(&["1", "t", "t^2"], &f), &f).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn definiteness_examples() {
        let f = f3();
        // delta = -1 in F_3: <1, delta> is hyperbolic, the norm form is <1, -delta>
        assert!(!is_definite(&diag(&["1", "2"], &f), &f).unwrap());
        assert!(is_definite(&diag(&["1", "1"], &f), &f).unwrap());
        assert!(is_definite(&diag(&["1", "1", "t"], &f), &f).unwrap());
        assert!(!is_definite(&diag(&["1", "2", "t"], &f), &f).unwrap());
        assert!(!is_definite(&diag(&["1", "1", "1"], &f), &f).unwrap());
        assert!(!is_definite(&diag(&["1", "2", "t", "2t", "t^2"], &f), &f).unwrap());
        assert!(matches!(reduce(&diag(&["1", "2"], &f), &f), Err(Error::NotDefinite)));
        let hyp = GramLattice::parse(&[&["0", "1"], &["1", "0"]], &f).unwrap();
        assert!(!is_definite(&hyp, &f).unwrap());
        assert_eq!(GramLattice::parse(&[&["1", "1"], &["1", "1"]], &f).unwrap_err(), Error::SingularForm);

        let f = f5();
        assert!(is_definite(&diag(&["1", "2"], &f), &f).unwrap());
        assert!(!is_definite(&diag(&["1", "4"], &f), &f).unwrap());
        assert!(is_definite(&diag(&["1", "2", "t"], &f), &f).unwrap());
        // quaternary: <1, -delta> + t <1, -delta> style forms
        assert!(is_definite(&diag(&["1", "2", "t", "2t"], &f), &f).unwrap());
        assert!(!is_definite(&diag(&["1", "2", "t", "t"], &f), &f).unwrap());
    }

    /// Brute-force search for a zero of small degree.
    fn has_small_zero(l: &GramLattice, f: &Field, below: usize) -> bool {
        let polys: Vec<Poly> = crate::algebra::poly::all_polys_below(below, f).collect();
        let n = l.rank();
        let total = polys.len().pow(n as u32);
        (1..total).any(|mut k| {
            let x: Vec<Poly> = (0..n)
                .map(|_| {
                    let v = polys[k % polys.len()].clone();
                    k /= polys.len();
                    v
                })
                .collect();
            l.value(&x, f).is_zero()
        })
    }

    #[test]
    fn ternary_definite_matches_brute_force() {
        let f = f3();
        assert!(!has_small_zero(&diag(&["1", "1", "t"], &f), &f, 3));
        assert!(has_small_zero(&diag(&["1", "2", "t"], &f), &f, 3));
        let f = f5();
        for v in [["1", "2", "t"], ["1", "t", "2t^2"], ["1", "1", "t"], ["t", "2t", "t^2+1"]] {
            let l = diag(&v, &f);
            let def = is_definite(&l, &f).unwrap();
            if def {
                assert!(!has_small_zero(&l, &f, 2), "{v:?}");
            }
        }
        assert!(has_small_zero(&diag(&["1", "1", "t"], &f), &f, 2));
    }

    #[test]
    fn adjoint_examples() {
        let f = f3();
        let l = GramLattice::diagonal(&[p("1", &f), p("2", &f), p("t", &f)], &f).unwrap();
        let a = adjoint(&l, &f).unwrap();
        assert_eq!(a.gram(), &PolyMatrix::diagonal(&[p("2", &f), p("t", &f), p("2t", &f)]));
        assert_eq!(a.minima(), Some(&[0, 1, 1][..]));
        let aa = adjoint(&a, &f).unwrap();
        assert_eq!(aa.gram(), &l.gram().scale(&l.det(&f), &f));
    }

    #[test]
    fn determinant_class_examples() {
        let f = f3();
        let l = GramLattice::diagonal(&[p("1", &f), p("1", &f), p("t", &f)], &f).unwrap();
        assert_eq!(determinant_class(&l, &f), DeterminantClass { monic_det: Poly::t(), unit_class: UnitClass::Square });
        let l = GramLattice::diagonal(&[p("1", &f), p("2", &f), p("t", &f)], &f).unwrap();
        assert_eq!(determinant_class(&l, &f).unit_class, UnitClass::Nonsquare);
        let l = GramLattice::parse(&[&["1", "t"], &["t", "t^2+t"]], &f).unwrap();
        assert_eq!(determinant_class(&l, &f), DeterminantClass { monic_det: Poly::t(), unit_class: UnitClass::Square });
    }

    #[test]
    fn json_round_trip() {
        let f = Field::of_order(9).unwrap();
        let l = GramLattice::parse(&[&["1", "[3]"], &["[3]", "t^2+[5]"]], &f).unwrap();
        let s = l.to_json(&f);
        let (g, back) = LatticeFile::from_json(&s).unwrap().load().unwrap();
        assert_eq!(g, f);
        assert_eq!(back, l);
        let f3 = f3();
        let file = LatticeFile::from_json(r#"{"field":{"p":3,"e":1,"modulus":null},"gram":[[[2,0,1]]]}"#).unwrap();
        assert_eq!(file.load().unwrap().1.entry(0, 0), &p("t^2+2", &f3));
    }
}
