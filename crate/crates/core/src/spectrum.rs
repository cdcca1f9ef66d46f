//! Representation numbers `R(L, a)`, the filtration `L_m = {v : deg Q(v) <= m}`
//! and its dimensions, and spectrum comparison.
//!
//! Enumeration relies on the degree law of reduced bases,
//! `deg Q(sum x_i v_i) = max_i (2 deg x_i + mu_i)`, so `L_m` is spanned by
//! `t^j v_i` with `2j + mu_i <= m`.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{Fe, Field, Poly};
use crate::error::{invalid, Error, Result};
use crate::qform::{is_definite, GramLattice};

/// Default cap on the number of lattice vectors visited by one enumeration.
pub const DEFAULT_BUDGET: u128 = 1 << 31;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Spectrum {
    pub rank: usize,
    pub bound: u32,
    /// Nonzero `R(L, a)` for `deg a <= bound`, sorted by `a`.
    pub counts: Vec<(Poly, u64)>,
    /// `dims[k] = dim L_k` for `0 <= k <= bound`.
    pub dims: Vec<u32>,
}

impl Spectrum {
    fn from_counts(rank: usize, bound: u32, mut counts: Vec<(Poly, u64)>, q: u32) -> Spectrum {
        counts.sort();
        let mut by_deg = vec![0u64; bound as usize + 1];
        for (a, c) in &counts {
            by_deg[a.deg().unwrap_or(0)] += c;
        }
        let mut dims = Vec::with_capacity(by_deg.len());
        let mut acc = 0u64;
        for c in by_deg {
            acc += c;
            dims.push(log_exact(acc, q as u64));
        }
        Spectrum { rank, bound, counts, dims }
    }

    pub fn count(&self, a: &Poly) -> u64 {
        self.counts.binary_search_by(|(b, _)| b.cmp(a)).map_or(0, |i| self.counts[i].1)
    }

    /// The spectrum cut down to `deg a <= m`.
    pub fn restrict(&self, m: u32) -> Result<Spectrum> {
        if m > self.bound {
            return Err(Error::InsufficientBound);
        }
        Ok(Spectrum {
            rank: self.rank,
            bound: m,
            counts: self.counts.iter().filter(|(a, _)| a.deg().unwrap_or(0) <= m as usize).cloned().collect(),
            dims: self.dims[..=m as usize].to_vec(),
        })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|(_, c)| c).sum()
    }
}

fn log_exact(mut n: u64, q: u64) -> u32 {
    let mut k = 0;
    while n > 1 {
        debug_assert_eq!(n % q, 0, "layer sizes are powers of q");
        n /= q;
        k += 1;
    }
    k
}

/// Incremental evaluator: tracks `Q(x)` and `(S x)_i` as dense coefficient
/// arrays of length `w = m + 1` while single digits of `x` change.
struct Engine<'a> {
    f: &'a Field,
    w: usize,
    /// Active coordinates (those with `mu_i <= m`).
    active: Vec<usize>,
    /// `gram[a][b]`, dense, indices into `active`.
    gram: Vec<Vec<Vec<Fe>>>,
    /// Digit `d` is `(active coordinate, power of t, F_p-basis element)`.
    digits: Vec<(usize, usize, Fe)>,
    /// Precomputed data for adding the digit's basis element.
    steps: Vec<Step>,
}

struct Step {
    coord: usize,
    shift: usize,
    two_g: Fe,
    /// `g^2 t^{2j} m_ii`
    diag: Vec<Fe>,
    /// `g t^j m_ki` for each active `k`
    cols: Vec<Vec<Fe>>,
}

#[derive(Clone)]
struct State {
    value: Vec<Fe>,
    sx: Vec<Vec<Fe>>,
}

impl<'a> Engine<'a> {
    fn new(l: &GramLattice, m: u32, f: &'a Field) -> Engine<'a> {
        let mins = l.minima().expect("reduced");
        let w = m as usize + 1;
        let active: Vec<usize> = (0..l.rank()).filter(|&i| mins[i] <= m).collect();
        let dense = |p: &Poly| -> Vec<Fe> {
            let mut v = vec![Fe::ZERO; w];
            for (i, &c) in p.coeffs().iter().enumerate() {
                assert!(i < w || c.is_zero(), "Gram entry exceeds the enumeration window");
                if i < w {
                    v[i] = c;
                }
            }
            v
        };
        let gram: Vec<Vec<Vec<Fe>>> =
            active.iter().map(|&i| active.iter().map(|&j| dense(l.entry(i, j))).collect()).collect();
        let mut digits = Vec::new();
        for (a, &i) in active.iter().enumerate() {
            for j in 0..=((m - mins[i]) / 2) as usize {
                for e in 0..f.e() {
                    digits.push((a, j, f.elem(f.p().pow(e)).unwrap()));
                }
            }
        }
        let mut eng = Engine { f, w, active, gram, digits, steps: Vec::new() };
        eng.steps = eng.digits.iter().map(|&(a, j, g)| eng.step_for(a, j, g)).collect();
        eng
    }

    fn step_for(&self, a: usize, j: usize, g: Fe) -> Step {
        let f = self.f;
        let mut diag = vec![Fe::ZERO; self.w];
        let g2 = f.mul(g, g);
        for (r, &c) in self.gram[a][a].iter().enumerate() {
            if !c.is_zero() {
                diag[r + 2 * j] = f.mul(g2, c);
            }
        }
        let cols = (0..self.active.len())
            .map(|k| {
                let mut col = vec![Fe::ZERO; self.w];
                for (r, &c) in self.gram[k][a].iter().enumerate() {
                    if !c.is_zero() {
                        col[r + j] = f.mul(g, c);
                    }
                }
                col
            })
            .collect();
        Step { coord: a, shift: j, two_g: f.mul(f.from_int(2), g), diag, cols }
    }

    fn zero_state(&self) -> State {
        State { value: vec![Fe::ZERO; self.w], sx: vec![vec![Fe::ZERO; self.w]; self.active.len()] }
    }

    /// `x <- x + g * digit` for an arbitrary scalar `g`.
    fn apply(&self, st: &mut State, d: usize, g: Fe) {
        let (a, j, b) = self.digits[d];
        let s = self.step_for(a, j, self.f.mul(g, b));
        self.apply_step(st, &s);
    }

    #[inline]
    fn apply_step(&self, st: &mut State, s: &Step) {
        let f = self.f;
        let bx = &st.sx[s.coord];
        for r in 0..self.w - s.shift {
            let c = bx[r];
            if !c.is_zero() {
                let v = &mut st.value[r + s.shift];
                *v = f.add(*v, f.mul(s.two_g, c));
            }
        }
        for r in 0..self.w {
            st.value[r] = f.add(st.value[r], s.diag[r]);
        }
        for (k, col) in s.cols.iter().enumerate() {
            for r in 0..self.w {
                st.sx[k][r] = f.add(st.sx[k][r], col[r]);
            }
        }
    }

    fn key(&self, st: &State) -> u64 {
        let q = self.f.q() as u64;
        st.value.iter().rev().fold(0u64, |acc, c| acc * q + c.index() as u64)
    }

    /// Visits all `p^len` settings of digits `first..first+len` (others held)
    /// and tallies the values.
    fn gray_run(&self, mut st: State, first: usize, len: usize, tally: &mut Tally) {
        let p = self.f.p() as usize;
        let mut counter = vec![0usize; len];
        loop {
            tally.add(self.key(&st));
            let mut j = 0;
            while j < len && counter[j] == p - 1 {
                counter[j] = 0;
                j += 1;
            }
            if j == len {
                return;
            }
            counter[j] += 1;
            self.apply_step(&mut st, &self.steps[first + j]);
        }
    }
}

enum Tally {
    Dense(Vec<u64>),
    Sparse(HashMap<u64, u64>),
}

const DENSE_LIMIT: u64 = 1 << 20;

impl Tally {
    fn new(space: Option<u64>) -> Tally {
        match space {
            Some(s) if s <= DENSE_LIMIT => Tally::Dense(vec![0; s as usize]),
            _ => Tally::Sparse(HashMap::new()),
        }
    }

    #[inline]
    fn add(&mut self, k: u64) {
        match self {
            Tally::Dense(v) => v[k as usize] += 1,
            Tally::Sparse(h) => *h.entry(k).or_insert(0) += 1,
        }
    }

    #[cfg(feature = "parallel")]
    fn merge(mut self, o: Tally) -> Tally {
        match (&mut self, o) {
            (Tally::Dense(a), Tally::Dense(b)) => a.iter_mut().zip(b).for_each(|(x, y)| *x += y),
            (Tally::Sparse(a), Tally::Sparse(b)) => b.into_iter().for_each(|(k, c)| *a.entry(k).or_insert(0) += c),
            _ => unreachable!("tallies share a layout"),
        }
        self
    }

    fn entries(self) -> Vec<(u64, u64)> {
        match self {
            Tally::Dense(v) => v.into_iter().enumerate().filter(|&(_, c)| c > 0).map(|(k, c)| (k as u64, c)).collect(),
            Tally::Sparse(h) => h.into_iter().collect(),
        }
    }
}

fn key_to_poly(mut k: u64, q: u64) -> Poly {
    let mut c = Vec::new();
    while k > 0 {
        c.push(Fe((k % q) as u16));
        k /= q;
    }
    Poly::from_coeffs(c)
}

/// `R(L, a)` for every `deg a <= m`. `L` must be reduced and definite; the
/// number of vectors visited is `q^{dim L_m} / 2`.
pub fn enumerate_spectrum(l: &GramLattice, m: u32, budget: u128, f: &Field) -> Result<Spectrum> {
    let mins = l.minima().ok_or_else(|| invalid("lattice must be reduced"))?;
    if !is_definite(l, f)? {
        return Err(Error::NotDefinite);
    }
    let dim = closed_form_dim(mins, m);
    let q = f.q() as u64;
    let size = (q as u128).checked_pow(dim).unwrap_or(u128::MAX);
    if size > budget {
        return Err(Error::BudgetExceeded { needed: size, budget });
    }
    if (m as f64 + 1.0) * (q as f64).log2() >= 63.0 {
        return Err(Error::BudgetExceeded { needed: u128::MAX, budget });
    }
    let eng = Engine::new(l, m, f);
    let space = q.checked_pow(m + 1);
    let nd = eng.digits.len();
    let p = f.p() as usize;
    // v and -v pair up: take vectors whose first nonzero F_p-digit lies in
    // 1..=(p-1)/2, then double.
    let mut tasks = Vec::new();
    for pos in 0..nd {
        let rest = nd - pos - 1;
        let fixed = rest.saturating_sub(10).min(4);
        for s in 1..=(p - 1) / 2 {
            for prefix in 0..p.pow(fixed as u32) {
                tasks.push((pos, s, fixed, prefix));
            }
        }
    }
    let work = |mut t: Tally, (pos, s, fixed, prefix): (usize, usize, usize, usize)| {
        let mut st = eng.zero_state();
        eng.apply(&mut st, pos, f.from_int(s as i64));
        let mut r = prefix;
        for d in pos + 1..pos + 1 + fixed {
            let c = r % p;
            r /= p;
            if c != 0 {
                eng.apply(&mut st, d, f.from_int(c as i64));
            }
        }
        eng.gray_run(st, pos + 1 + fixed, nd - pos - 1 - fixed, &mut t);
        t
    };
    #[cfg(feature = "parallel")]
    let half = tasks.into_par_iter().fold(|| Tally::new(space), work).reduce(|| Tally::new(space), Tally::merge);
    #[cfg(not(feature = "parallel"))]
    let half = tasks.into_iter().fold(Tally::new(space), work);
    let mut counts: Vec<(Poly, u64)> = half.entries().into_iter().map(|(k, c)| (key_to_poly(k, q), 2 * c)).collect();
    counts.push((Poly::zero(), 1));
    Ok(Spectrum::from_counts(l.rank(), m, counts, f.q()))
}

fn closed_form_dim(minima: &[u32], k: u32) -> u32 {
    minima.iter().filter(|&&mu| mu <= k).map(|&mu| (k - mu) / 2 + 1).sum()
}

/// `dim L_k` for `0 <= k <= m`, read off an enumerated spectrum.
pub fn dim_series(l: &GramLattice, m: u32, budget: u128, f: &Field) -> Result<Vec<u32>> {
    Ok(enumerate_spectrum(l, m, budget, f)?.dims)
}

/// Coefficients of `sum_i u^{mu_i} / ((1 - u^2)(1 - u))` up to `u^m`.
pub fn closed_form_dims(minima: &[u32], m: u32) -> Vec<u32> {
    (0..=m).map(|k| closed_form_dim(minima, k)).collect()
}

/// Successive minima recovered from the dimensions of the filtration.
pub fn minima_from_spectrum(s: &Spectrum) -> Result<Vec<u32>> {
    minima_from_dims(&s.dims, s.rank)
}

pub fn minima_from_dims(dims: &[u32], rank: usize) -> Result<Vec<u32>> {
    let at = |k: i64| if k < 0 { 0 } else { dims[k as usize] as i64 };
    // below(k) = dims[k] - dims[k-2] = #{i : mu_i <= k}
    let below = |k: i64| at(k) - at(k - 2);
    let mut minima = Vec::new();
    for k in 0..dims.len() as i64 {
        let c = below(k) - below(k - 1);
        if c < 0 {
            return Err(invalid("dimension sequence is not of the closed form"));
        }
        minima.extend(std::iter::repeat(k as u32).take(c as usize));
    }
    if minima.len() < rank {
        return Err(Error::InsufficientBound);
    }
    if minima.len() > rank || closed_form_dims(&minima, dims.len() as u32 - 1) != dims {
        return Err(invalid("dimension sequence is not of the closed form"));
    }
    Ok(minima)
}

/// Equal representation numbers for every `deg a <= m`.
pub fn isospectral_up_to(a: &GramLattice, b: &GramLattice, m: u32, budget: u128, f: &Field) -> Result<bool> {
    if a.rank() != b.rank() {
        return Ok(false);
    }
    if a.minima() != b.minima() {
        return Ok(false);
    }
    Ok(enumerate_spectrum(a, m, budget, f)? == enumerate_spectrum(b, m, budget, f)?)
}

/// Hex SHA-256 of the lattice's JSON form.
pub fn gram_hash(l: &GramLattice, f: &Field) -> String {
    hex::encode(Sha256::digest(l.to_json(f).as_bytes()))
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    gram_hash: String,
    rank: usize,
    bound: u32,
    counts: Vec<(Poly, u64)>,
}

/// Directory of spectra keyed by [`gram_hash`]. Writes go to a temporary file
/// that is renamed into place.
#[derive(Clone, Debug)]
pub struct SpectrumCache {
    dir: PathBuf,
}

impl SpectrumCache {
    pub fn open(dir: impl AsRef<Path>) -> Result<SpectrumCache> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(SpectrumCache { dir: dir.as_ref().to_path_buf() })
    }

    fn path(&self, hash: &str) -> PathBuf {
        self.dir.join(format!("{hash}.json"))
    }

    /// A cached spectrum covering `bound`, restricted to it.
    pub fn load(&self, l: &GramLattice, bound: u32, f: &Field) -> Result<Option<Spectrum>> {
        let hash = gram_hash(l, f);
        let Ok(text) = fs::read_to_string(self.path(&hash)) else { return Ok(None) };
        let file: CacheFile = serde_json::from_str(&text).map_err(|e| invalid(format!("corrupt cache entry: {e}")))?;
        if file.gram_hash != hash {
            return Err(invalid("cache entry hash mismatch"));
        }
        if file.bound < bound {
            return Ok(None);
        }
        Spectrum::from_counts(file.rank, file.bound, file.counts, f.q()).restrict(bound).map(Some)
    }

    pub fn store(&self, l: &GramLattice, s: &Spectrum, f: &Field) -> Result<()> {
        let hash = gram_hash(l, f);
        let target = self.path(&hash);
        if let Some(old) = self.load(l, 0, f)? {
            if old.bound >= s.bound {
                return Ok(());
            }
        }
        let file = CacheFile { gram_hash: hash, rank: s.rank, bound: s.bound, counts: s.counts.clone() };
        let tmp = target.with_extension(format!("json.tmp.{}.{:?}", std::process::id(), std::thread::current().id()));
        fs::write(&tmp, serde_json::to_vec(&file).expect("serializable"))?;
        fs::rename(&tmp, &target)?;
        Ok(())
    }

    pub fn get_or_compute(&self, l: &GramLattice, bound: u32, budget: u128, f: &Field) -> Result<Spectrum> {
        if let Some(s) = self.load(l, bound, f)? {
            return Ok(s);
        }
        let s = enumerate_spectrum(l, bound, budget, f)?;
        self.store(l, &s, f)?;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::all_polys_below;
    use crate::qform::reduce;
    use std::collections::BTreeMap;

    fn p(s: &str, f: &Field) -> Poly {
        Poly::parse(s, f).unwrap()
    }

    fn diag(v: &[&str], f: &Field) -> GramLattice {
        GramLattice::diagonal(&v.iter().map(|s| p(s, f)).collect::<Vec<_>>(), f).unwrap()
    }

    /// Oracle: all vectors with `deg x_i <= m` (well past the degree-law
    /// window), values kept when `deg Q <= m`.
    fn brute(l: &GramLattice, m: u32, f: &Field) -> BTreeMap<Poly, u64> {
        let polys: Vec<Poly> = all_polys_below(m as usize / 2 + 2, f).collect();
        let n = l.rank();
        let mut out = BTreeMap::new();
        for mut k in 0..polys.len().pow(n as u32) {
            let x: Vec<Poly> = (0..n)
                .map(|_| {
                    let v = polys[k % polys.len()].clone();
                    k /= polys.len();
                    v
                })
                .collect();
            let v = l.value(&x, f);
            if v.deg().unwrap_or(0) <= m as usize {
                *out.entry(v).or_insert(0) += 1;
            }
        }
        out
    }

    fn check_invariants(s: &Spectrum, q: u32) {
        assert_eq!(s.count(&Poly::zero()), 1);
        for (a, c) in &s.counts {
            if !a.is_zero() {
                assert_eq!(c % 2, 0);
            }
        }
        for k in 0..=s.bound {
            let tot: u64 = s.counts.iter().filter(|(a, _)| a.deg().unwrap_or(0) <= k as usize).map(|(_, c)| c).sum();
            assert_eq!(tot, (q as u64).pow(s.dims[k as usize]));
        }
    }

    #[test]
    fn matches_brute_force() {
        let f = Field::prime(3).unwrap();
        for l in [diag(&["1", "1", "t"], &f), diag(&["1", "t", "t^2"], &f)] {
            let s = enumerate_spectrum(&l, 3, DEFAULT_BUDGET, &f).unwrap();
            let b = brute(&l, 3, &f);
            assert_eq!(s.counts, b.into_iter().collect::<Vec<_>>());
            check_invariants(&s, 3);
        }
        let f = Field::prime(5).unwrap();
        let l = GramLattice::parse(&[&["1", "0", "0"], &["0", "2", "1"], &["1", "1", "t"]], &f);
        assert!(l.is_err(), "asymmetric");
        let l = GramLattice::parse(&[&["1", "0", "0"], &["0", "t", "1"], &["0", "1", "2t"]], &f).unwrap();
        let (r, _) = reduce(&l, &f).unwrap();
        let s = enumerate_spectrum(&r, 3, DEFAULT_BUDGET, &f).unwrap();
        assert_eq!(s.counts, brute(&r, 3, &f).into_iter().collect::<Vec<_>>());
        check_invariants(&s, 5);
    }

    #[test]
    fn representation_examples() {
        let f = Field::prime(5).unwrap();
        // x^2 + 2y^2 = 1 over F_5: (+-1, 0), (+-2, +-1)
        let s = enumerate_spectrum(&diag(&["1", "2", "t"], &f), 1, DEFAULT_BUDGET, &f).unwrap();
        assert_eq!(s.count(&Poly::one()), 6);
        let f = Field::prime(3).unwrap();
        let s = enumerate_spectrum(&diag(&["1", "1", "t"], &f), 1, DEFAULT_BUDGET, &f).unwrap();
        assert_eq!(s.count(&Poly::one()), 4);
        assert_eq!(s.count(&Poly::zero()), 1);
        let s = enumerate_spectrum(&diag(&["1"], &f), 2, DEFAULT_BUDGET, &f).unwrap();
        assert_eq!(s.count(&Poly::one()), 2);
        assert_eq!(s.count(&p("2", &f)), 0);
        assert_eq!(s.count(&p("t^2", &f)), 2);
        assert_eq!(s.count(&p("2t^2", &f)), 0);
    }

    #[test]
    fn extension_field_spectrum() {
        let f = Field::of_order(9).unwrap();
        let d = f.delta();
        let l = GramLattice::diagonal(&[Poly::one(), Poly::constant(d)], &f).unwrap();
        let s = enumerate_spectrum(&l, 2, DEFAULT_BUDGET, &f).unwrap();
        assert_eq!(s.counts, brute(&l, 2, &f).into_iter().collect::<Vec<_>>());
        check_invariants(&s, 9);
        // norm form of F_81/F_9: each nonzero constant has q + 1 preimages
        assert_eq!(s.count(&Poly::one()), 10);
    }

    #[test]
    fn dims_examples() {
        assert_eq!(closed_form_dims(&[0, 0, 1], 3), vec![2, 3, 5, 6]);
        assert_eq!(closed_form_dims(&[0, 1, 2], 2), vec![1, 2, 4]);
        assert_eq!(closed_form_dims(&[3, 4, 5], 2), vec![0, 0, 0]);
        let f = Field::prime(3).unwrap();
        let l = diag(&["1", "1", "t"], &f);
        assert_eq!(dim_series(&l, 5, DEFAULT_BUDGET, &f).unwrap(), closed_form_dims(&[0, 0, 1], 5));
    }

    #[test]
    fn minima_recovery() {
        assert_eq!(minima_from_dims(&[2, 3, 5, 6], 3).unwrap(), vec![0, 0, 1]);
        assert_eq!(minima_from_dims(&[0, 0, 1, 1, 3, 4], 3).unwrap(), vec![2, 4, 5]);
        assert_eq!(minima_from_dims(&[0, 0, 1], 3), Err(Error::InsufficientBound));
        assert!(minima_from_dims(&[2, 1], 3).is_err());
        let f = Field::prime(3).unwrap();
        let s = enumerate_spectrum(&diag(&["1", "1", "t"], &f), 3, DEFAULT_BUDGET, &f).unwrap();
        assert_eq!(minima_from_spectrum(&s).unwrap(), vec![0, 0, 1]);
    }

    #[test]
    fn isospectral_examples() {
        let f = Field::prime(5).unwrap();
        let a = diag(&["1", "2", "t"], &f);
        let b = diag(&["1", "2", "2t"], &f);
        assert!(isospectral_up_to(&a, &a, 4, DEFAULT_BUDGET, &f).unwrap());
        assert!(!isospectral_up_to(&a, &b, 1, DEFAULT_BUDGET, &f).unwrap());
        let u = crate::algebra::PolyMatrix::from_rows(vec![
            vec![Poly::one(), p("t", &f), Poly::zero()],
            vec![Poly::zero(), Poly::one(), Poly::zero()],
            vec![p("2", &f), p("t^2", &f), Poly::one()],
        ])
        .unwrap();
        let c = reduce(&a.transform(&u, &f).unwrap(), &f).unwrap().0;
        for m in 0..5 {
            assert!(isospectral_up_to(&a, &c, m, DEFAULT_BUDGET, &f).unwrap());
        }
    }

    #[test]
    fn budget_and_preconditions() {
        let f = Field::prime(3).unwrap();
        let l = diag(&["1", "1", "t"], &f);
        assert!(matches!(enumerate_spectrum(&l, 8, 100, &f), Err(Error::BudgetExceeded { .. })));
        let nr = GramLattice::parse(&[&["t", "1"], &["1", "1"]], &f).unwrap();
        assert!(enumerate_spectrum(&nr, 2, DEFAULT_BUDGET, &f).is_err());
    }

    #[test]
    fn cache_round_trip() {
        let dir = std::env::temp_dir().join(format!("ffqlat-spectrum-{}", std::process::id()));
        let cache = SpectrumCache::open(&dir).unwrap();
        let f = Field::prime(3).unwrap();
        let l = diag(&["1", "1", "t"], &f);
        let s = cache.get_or_compute(&l, 4, DEFAULT_BUDGET, &f).unwrap();
        assert_eq!(cache.load(&l, 2, &f).unwrap().unwrap(), s.restrict(2).unwrap());
        assert_eq!(cache.load(&l, 5, &f).unwrap(), None);
        assert_eq!(gram_hash(&l, &f).len(), 64);
        fs::remove_dir_all(dir).unwrap();
    }
}
