//! Isometry testing, automorphism groups and canonical forms.
//!
//! Two reduced bases of one lattice differ by a matrix with entries in
//! `F_q`, so every search here runs over constant vectors only.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::algebra::{Fe, Field, Poly, PolyMatrix};
use crate::error::{Error, Result};
use crate::qform::{determinant_class, reduce, GramLattice};

/// A constant matrix `U` (row-major) with `U^T S U = S'` for reduced Grams.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IsometryWitness {
    n: usize,
    u: Vec<Fe>,
}

impl IsometryWitness {
    pub fn constants(&self) -> &[Fe] {
        &self.u
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> PolyMatrix {
        PolyMatrix::from_constants(self.n, self.n, &self.u)
    }

    pub fn to_indices(&self) -> Vec<Vec<u32>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.u[i * self.n + j].index()).collect()).collect()
    }

    fn from_columns(cols: &[Vec<Fe>]) -> IsometryWitness {
        let n = cols.len();
        let mut u = vec![Fe::ZERO; n * n];
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                u[i * n + j] = c[i];
            }
        }
        IsometryWitness { n, u }
    }
}

/// Result of a positive isometry decision.
#[derive(Clone, Debug)]
pub struct Isometry {
    /// Reduced Gram `S` of the first lattice.
    pub source: GramLattice,
    /// Reduced Gram `S'` of the second lattice.
    pub target: GramLattice,
    /// `U^T S U = S'`
    pub witness: IsometryWitness,
    /// `W^T A W = B` for the input Grams `A`, `B`.
    pub full: PolyMatrix,
}

/// Constant vectors of a reduced Gram, with `S w` and `Q(w)` cached.
struct ConstantVectors {
    n: usize,
    vecs: Vec<Vec<Fe>>,
    sw: Vec<Vec<Poly>>,
    by_value: HashMap<Poly, Vec<usize>>,
}

impl ConstantVectors {
    fn new(s: &GramLattice, f: &Field) -> ConstantVectors {
        let n = s.rank();
        let q = f.q() as usize;
        let mut vecs = Vec::new();
        let mut sw = Vec::new();
        let mut by_value: HashMap<Poly, Vec<usize>> = HashMap::new();
        for k in 1..q.pow(n as u32) {
            let mut r = k;
            let w: Vec<Fe> = (0..n)
                .map(|_| {
                    let x = f.elem((r % q) as u32).unwrap();
                    r /= q;
                    x
                })
                .collect();
            let col: Vec<Poly> = (0..n)
                .map(|i| {
                    (0..n).fold(Poly::zero(), |acc, j| acc.add(&s.entry(i, j).scale(w[j], f), f))
                })
                .collect();
            let val = dot(&w, &col, f);
            by_value.entry(val).or_default().push(vecs.len());
            vecs.push(w);
            sw.push(col);
        }
        ConstantVectors { n, vecs, sw, by_value }
    }

    /// `B(v_a, v_b) / 2`
    fn pair(&self, a: usize, b: usize, f: &Field) -> Poly {
        dot(&self.vecs[a], &self.sw[b], f)
    }
}

fn dot(w: &[Fe], col: &[Poly], f: &Field) -> Poly {
    w.iter().zip(col).fold(Poly::zero(), |acc, (&c, p)| if c.is_zero() { acc } else { acc.add(&p.scale(c, f), f) })
}

/// Backtracking over columns: column `j` of `U` is a constant `w` with
/// `Q(w) = S'_jj` and `B(w_i, w) / 2 = S'_ij` for `i < j`.
fn search(
    cv: &ConstantVectors,
    target: &GramLattice,
    chosen: &mut Vec<usize>,
    all: bool,
    out: &mut Vec<IsometryWitness>,
    f: &Field,
) {
    let j = chosen.len();
    if j == cv.n {
        let cols: Vec<Vec<Fe>> = chosen.iter().map(|&i| cv.vecs[i].clone()).collect();
        out.push(IsometryWitness::from_columns(&cols));
        return;
    }
    let Some(cands) = cv.by_value.get(target.entry(j, j)) else { return };
    for &c in cands {
        if chosen.iter().enumerate().all(|(i, &a)| cv.pair(a, c, f) == *target.entry(i, j)) {
            chosen.push(c);
            search(cv, target, chosen, all, out, f);
            chosen.pop();
            if !all && !out.is_empty() {
                return;
            }
        }
    }
}

fn verify(s: &GramLattice, t: &GramLattice, w: &IsometryWitness, f: &Field) {
    assert_eq!(s.gram().congruent(&w.matrix(), f), *t.gram(), "isometry witness failed verification");
}

/// Decides `L ~ L'`; on success returns a verified witness.
pub fn isometric(a: &GramLattice, b: &GramLattice, f: &Field) -> Result<Option<Isometry>> {
    if a.rank() != b.rank() {
        return Err(Error::RankMismatch(a.rank(), b.rank()));
    }
    let (sa, va) = reduce(a, f)?;
    let (sb, vb) = reduce(b, f)?;
    if sa.minima() != sb.minima() || determinant_class(&sa, f) != determinant_class(&sb, f) {
        return Ok(None);
    }
    let cv = ConstantVectors::new(&sa, f);
    let mut out = Vec::new();
    search(&cv, &sb, &mut Vec::new(), false, &mut out, f);
    let Some(w) = out.pop() else { return Ok(None) };
    verify(&sa, &sb, &w, f);
    // W = Va U Vb^{-1}
    let det = vb.det(f);
    let vb_inv = vb.adjugate(f).scale(&Poly::constant(f.inv(det.lc())?), f);
    let full = va.mul(&w.matrix(), f).mul(&vb_inv, f);
    assert_eq!(a.gram().congruent(&full, f), *b.gram(), "full isometry failed verification");
    Ok(Some(Isometry { source: sa, target: sb, witness: w, full }))
}

/// All constant `U` with `U^T S U = S` for the reduced Gram `S` of `L`.
pub fn automorphism_group(l: &GramLattice, f: &Field) -> Result<Vec<IsometryWitness>> {
    let s = if l.is_reduced() { l.clone() } else { reduce(l, f)?.0 };
    let cv = ConstantVectors::new(&s, f);
    let mut out = Vec::new();
    search(&cv, &s, &mut Vec::new(), true, &mut out, f);
    for w in &out {
        verify(&s, &s, w, f);
    }
    Ok(out)
}

/// Lexicographically least reduced Gram `U^T S U` over constant `U`, with
/// entries compared column by column as `(m_jj, m_1j, ..., m_{j-1,j})`.
pub fn canonical_form(l: &GramLattice, f: &Field) -> Result<GramLattice> {
    let s = if l.is_reduced() { l.clone() } else { reduce(l, f)?.0 };
    let mins = s.minima().expect("reduced").to_vec();
    let n = s.rank();
    let cv = ConstantVectors::new(&s, f);
    let mut best: Option<Vec<Vec<Poly>>> = None;
    let mut prefix: Vec<Vec<Poly>> = Vec::new();
    canon_search(&cv, &mins, &mut Vec::new(), &mut prefix, &mut best, f);
    let cols = best.expect("the reduced basis itself is a candidate");
    let mut g = PolyMatrix::zeros(n, n);
    for (j, col) in cols.iter().enumerate() {
        g[(j, j)] = col[0].clone();
        for i in 0..j {
            g[(i, j)] = col[i + 1].clone();
            g[(j, i)] = col[i + 1].clone();
        }
    }
    Ok(GramLattice::new(g, f)?)
}

fn cmp_cols(a: &[Vec<Poly>], b: &[Vec<Poly>]) -> Ordering {
    a.iter().flatten().cmp(b.iter().flatten())
}

/// Returns true once a completion has been recorded for this branch.
fn canon_search(
    cv: &ConstantVectors,
    mins: &[u32],
    chosen: &mut Vec<usize>,
    prefix: &mut Vec<Vec<Poly>>,
    best: &mut Option<Vec<Vec<Poly>>>,
    f: &Field,
) -> bool {
    let j = chosen.len();
    if j == cv.n {
        if best.as_ref().map_or(true, |b| cmp_cols(prefix, b) == Ordering::Less) {
            *best = Some(prefix.clone());
        }
        return true;
    }
    let mu = mins[j] as usize;
    let mut cands: Vec<(Vec<Poly>, usize)> = Vec::new();
    for (val, idxs) in &cv.by_value {
        if val.deg() != Some(mu) {
            continue;
        }
        'cand: for &c in idxs {
            let mut col = Vec::with_capacity(j + 1);
            col.push(val.clone());
            for (i, &a) in chosen.iter().enumerate() {
                let b = cv.pair(a, c, f);
                if b.deg() >= Some(mins[i] as usize) {
                    continue 'cand;
                }
                col.push(b);
            }
            cands.push((col, c));
        }
    }
    cands.sort();
    let mut k = 0;
    while k < cands.len() {
        let mut end = k;
        while end < cands.len() && cands[end].0 == cands[k].0 {
            end += 1;
        }
        prefix.push(cands[k].0.clone());
        if let Some(b) = best.as_ref() {
            // prune once this prefix is already worse than the best
            if cmp_cols(prefix, &b[..prefix.len()]) == Ordering::Greater {
                prefix.pop();
                return false;
            }
        }
        let mut done = false;
        for &(_, c) in &cands[k..end] {
            if chosen.contains(&c) {
                continue;
            }
            chosen.push(c);
            done |= canon_search(cv, mins, chosen, prefix, best, f);
            chosen.pop();
        }
        prefix.pop();
        if done {
            return true;
        }
        k = end;
    }
    false
}

/// `GL_n(F_q)` scan; a reference for small cases.
pub fn isometric_exhaustive(a: &GramLattice, b: &GramLattice, f: &Field) -> Result<bool> {
    let (sa, _) = reduce(a, f)?;
    let (sb, _) = reduce(b, f)?;
    let n = sa.rank();
    let q = f.q() as u64;
    let total = q.pow((n * n) as u32);
    for k in 0..total {
        let mut r = k;
        let u: Vec<Fe> = (0..n * n)
            .map(|_| {
                let x = f.elem((r % q) as u32).unwrap();
                r /= q;
                x
            })
            .collect();
        let m = PolyMatrix::from_constants(n, n, &u);
        if sa.gram().congruent(&m, f) == *sb.gram() {
            return Ok(true);
        }
    }
    Ok(false)
}
