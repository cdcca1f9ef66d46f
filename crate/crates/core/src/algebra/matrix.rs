//! Dense matrices over `A = F_q[t]` and the Smith normal form.

use super::field::{Fe, Field};
use super::poly::Poly;
use crate::error::{invalid, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix { rows, cols, data: vec![Poly::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = PolyMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Poly::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Poly>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(invalid("ragged matrix"));
        }
        Ok(PolyMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn diagonal(d: &[Poly]) -> Self {
        let mut m = PolyMatrix::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    /// Constant matrix from field elements, row-major.
    pub fn from_constants(rows: usize, cols: usize, vals: &[Fe]) -> Self {
        PolyMatrix { rows, cols, data: vals.iter().map(|&c| Poly::constant(c)).collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Poly] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Poly>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut m = PolyMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn mul(&self, o: &PolyMatrix, f: &Field) -> PolyMatrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut m = PolyMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = Poly::zero();
                for k in 0..self.cols {
                    if !self[(i, k)].is_zero() && !o[(k, j)].is_zero() {
                        acc = acc.add(&self[(i, k)].mul(&o[(k, j)], f), f);
                    }
                }
                m[(i, j)] = acc;
            }
        }
        m
    }

    /// `U^T * self * U`
    pub fn congruent(&self, u: &PolyMatrix, f: &Field) -> PolyMatrix {
        u.transpose().mul(&self.mul(u, f), f)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    fn minor(&self, skip_r: usize, skip_c: usize) -> PolyMatrix {
        let mut data = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for i in (0..self.rows).filter(|&i| i != skip_r) {
            for j in (0..self.cols).filter(|&j| j != skip_c) {
                data.push(self[(i, j)].clone());
            }
        }
        PolyMatrix { rows: self.rows - 1, cols: self.cols - 1, data }
    }

    /// Determinant by cofactor expansion (matrices here are at most 4x4, or
    /// small Smith-form inputs).
    pub fn det(&self, f: &Field) -> Poly {
        assert!(self.is_square());
        match self.rows {
            0 => Poly::one(),
            1 => self[(0, 0)].clone(),
            2 => self[(0, 0)].mul(&self[(1, 1)], f).sub(&self[(0, 1)].mul(&self[(1, 0)], f), f),
            n => {
                let mut acc = Poly::zero();
                for j in 0..n {
                    if self[(0, j)].is_zero() {
                        continue;
                    }
                    let term = self[(0, j)].mul(&self.minor(0, j).det(f), f);
                    acc = if j % 2 == 0 { acc.add(&term, f) } else { acc.sub(&term, f) };
                }
                acc
            }
        }
    }

    /// Classical adjugate: `adj(M) * M = det(M) * I`.
    pub fn adjugate(&self, f: &Field) -> PolyMatrix {
        assert!(self.is_square());
        let n = self.rows;
        if n == 1 {
            return PolyMatrix::identity(1);
        }
        let mut m = PolyMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let c = self.minor(i, j).det(f);
                m[(j, i)] = if (i + j) % 2 == 0 { c } else { c.neg(f) };
            }
        }
        m
    }

    pub fn scale(&self, c: &Poly, f: &Field) -> PolyMatrix {
        PolyMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.mul(c, f)).collect() }
    }

    /// Unimodular over `A`: determinant is a nonzero constant.
    pub fn is_unimodular(&self, f: &Field) -> bool {
        self.is_square() && self.det(f).deg() == Some(0)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += c * row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: &Poly, f: &Field) {
        for j in 0..self.cols {
            let v = self[(dst, j)].add(&self[(src, j)].mul(c, f), f);
            self[(dst, j)] = v;
        }
    }

    /// col[dst] += c * col[src]
    fn add_col(&mut self, dst: usize, src: usize, c: &Poly, f: &Field) {
        for i in 0..self.rows {
            let v = self[(i, dst)].add(&self[(i, src)].mul(c, f), f);
            self[(i, dst)] = v;
        }
    }

    fn scale_row(&mut self, r: usize, c: Fe, f: &Field) {
        for j in 0..self.cols {
            let v = self[(r, j)].scale(c, f);
            self[(r, j)] = v;
        }
    }

    pub fn render(&self) -> String {
        self.to_rows()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|p| p.render()).collect::<Vec<_>>().join(", ")))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl std::ops::Index<(usize, usize)> for PolyMatrix {
    type Output = Poly;
    fn index(&self, (i, j): (usize, usize)) -> &Poly {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for PolyMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Poly {
        &mut self.data[i * self.cols + j]
    }
}

#[derive(Clone, Debug)]
pub struct SmithForm {
    pub d: PolyMatrix,
    pub u: PolyMatrix,
    pub v: PolyMatrix,
}

impl SmithForm {
    /// Nonzero diagonal entries `d_1 | d_2 | ...`.
    pub fn invariants(&self) -> Vec<Poly> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .filter(|p| !p.is_zero())
            .collect()
    }
}

/// `U M V = D` with `D` diagonal, `d_i | d_{i+1}`, monic nonzero entries,
/// and `U`, `V` unimodular.
pub fn smith_normal_form(m: &PolyMatrix, f: &Field) -> SmithForm {
    let (r, c) = (m.rows(), m.cols());
    let mut d = m.clone();
    let mut u = PolyMatrix::identity(r);
    let mut v = PolyMatrix::identity(c);
    for k in 0..r.min(c) {
        loop {
            // pivot: nonzero entry of least degree in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in k..r {
                for j in k..c {
                    if !d[(i, j)].is_zero() && best.map_or(true, |(bi, bj)| d[(i, j)].deg() < d[(bi, bj)].deg()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(d, u, v, f);
            };
            if pi != k {
                d.swap_rows(pi, k);
                u.swap_rows(pi, k);
            }
            if pj != k {
                d.swap_cols(pj, k);
                v.swap_cols(pj, k);
            }
            let piv = d[(k, k)].clone();
            let mut clean = true;
            for i in k + 1..r {
                if d[(i, k)].is_zero() {
                    continue;
                }
                let (qt, rem) = d[(i, k)].divmod(&piv, f).unwrap();
                let neg = qt.neg(f);
                d.add_row(i, k, &neg, f);
                u.add_row(i, k, &neg, f);
                clean &= rem.is_zero();
            }
            for j in k + 1..c {
                if d[(k, j)].is_zero() {
                    continue;
                }
                let (qt, rem) = d[(k, j)].divmod(&piv, f).unwrap();
                let neg = qt.neg(f);
                d.add_col(j, k, &neg, f);
                v.add_col(j, k, &neg, f);
                clean &= rem.is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility: fold any row not divisible by the pivot into row k
            let bad = (k + 1..r).find(|&i| (k + 1..c).any(|j| !piv.divides(&d[(i, j)], f)));
            match bad {
                Some(i) => {
                    d.add_row(k, i, &Poly::one(), f);
                    u.add_row(k, i, &Poly::one(), f);
                }
                None => break,
            }
        }
    }
    finish(d, u, v, f)
}

fn finish(mut d: PolyMatrix, mut u: PolyMatrix, v: PolyMatrix, f: &Field) -> SmithForm {
    for k in 0..d.rows().min(d.cols()) {
        let lc = d[(k, k)].lc();
        if !lc.is_zero() && lc != Fe::ONE {
            let inv = f.inv(lc).unwrap();
            d.scale_row(k, inv, f);
            u.scale_row(k, inv, f);
        }
    }
    SmithForm { d, u, v }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Field {
        Field::prime(3).unwrap()
    }

    fn m(rows: &[&[&str]], f: &Field) -> PolyMatrix {
        PolyMatrix::from_rows(
            rows.iter().map(|r| r.iter().map(|s| Poly::parse(s, f).unwrap()).collect()).collect(),
        )
        .unwrap()
    }

    fn check(mat: &PolyMatrix, f: &Field) -> SmithForm {
        let s = smith_normal_form(mat, f);
        assert_eq!(s.u.mul(mat, f).mul(&s.v, f), s.d);
        assert!(s.d.is_diagonal());
        assert!(s.u.is_unimodular(f) && s.v.is_unimodular(f));
        let inv = s.invariants();
        for w in inv.windows(2) {
            assert!(w[0].divides(&w[1], f));
        }
        assert!(inv.iter().all(|p| p.is_monic()));
        s
    }

    #[test]
    fn snf_examples() {
        let f = f3();
        let s = check(&PolyMatrix::identity(3), &f);
        assert_eq!(s.d, PolyMatrix::identity(3));
        let s = check(&m(&[&["t", "0"], &["0", "t^2"]], &f), &f);
        assert_eq!(s.invariants(), vec![Poly::t(), Poly::parse("t^2", &f).unwrap()]);
        let s = check(&m(&[&["t", "1"], &["0", "t"]], &f), &f);
        assert_eq!(s.invariants(), vec![Poly::one(), Poly::parse("t^2", &f).unwrap()]);
        let s = check(&PolyMatrix::zeros(2, 3), &f);
        assert!(s.invariants().is_empty());
    }

    #[test]
    fn snf_divisibility_fix() {
        let f = f3();
        // diag(t, t+1) is not in Smith form: invariants are 1, t(t+1)
        let s = check(&m(&[&["t", "0"], &["0", "t+1"]], &f), &f);
        assert_eq!(s.invariants(), vec![Poly::one(), Poly::parse("t^2+t", &f).unwrap()]);
    }

    #[test]
    fn adjugate_identity() {
        let f = f3();
        let a = m(&[&["1", "t", "2"], &["t", "t^2+1", "0"], &["2", "0", "t"]], &f);
        let det = a.det(&f);
        assert_eq!(a.adjugate(&f).mul(&a, &f), PolyMatrix::identity(3).scale(&det, &f));
    }
}
