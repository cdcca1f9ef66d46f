//! Raw reduced coefficient vectors, one stratum (minima pattern) at a time.
//!
//! A reduced Gram with minima `mu` has `deg m_ii = mu_i` and
//! `deg m_ij < mu_i` for `i < j`. Scaling a basis vector by `c` multiplies
//! `m_ii` by `c^2`, so leading coefficients are normalized to `{1, delta}`.

use std::collections::BTreeSet;

use ffqlat_core::algebra::{Fe, Field, Poly, PolyMatrix};
use ffqlat_core::qform::{is_definite, GramLattice};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SearchConfig;
use crate::error::Result;

/// A definite form over `K_inf` has anisotropic residue forms on the even
/// and the odd minima, so at most two minima of each parity.
pub fn admissible_pattern(minima: &[u32]) -> bool {
    let even = minima.iter().filter(|m| *m % 2 == 0).count();
    minima.windows(2).all(|w| w[0] <= w[1]) && even <= 2 && minima.len() - even <= 2
}

/// Admissible nondecreasing patterns of length `n` with entries `<= max_mu`.
pub fn patterns(n: usize, max_mu: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, lo: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            if admissible_pattern(cur) {
                out.push(cur.clone());
            }
            return;
        }
        for m in lo..=max {
            cur.push(m);
            rec(n, m, max, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, 0, max_mu, &mut Vec::new(), &mut out);
    out
}

pub fn config_patterns(cfg: &SearchConfig) -> Vec<Vec<u32>> {
    patterns(cfg.rank, cfg.max_mu)
        .into_iter()
        .filter(|p| cfg.patterns.as_ref().map_or(true, |ps| ps.contains(p)))
        .collect()
}

#[derive(Clone, Debug)]
pub struct Stratum {
    pub minima: Vec<u32>,
    q: u64,
}

impl Stratum {
    pub fn new(minima: &[u32], f: &Field) -> Stratum {
        Stratum { minima: minima.to_vec(), q: f.q() as u64 }
    }

    pub fn rank(&self) -> usize {
        self.minima.len()
    }

    /// Choices for the diagonal: `prod 2 q^{mu_i}`.
    pub fn diag_count(&self) -> u128 {
        self.minima.iter().map(|&m| 2 * (self.q as u128).pow(m)).product()
    }

    /// Choices above the diagonal: `prod_{i<j} q^{mu_i}`.
    pub fn off_count(&self) -> u128 {
        let n = self.rank();
        (0..n).map(|i| (self.q as u128).pow(self.minima[i] * (n - 1 - i) as u32)).product()
    }

    pub fn raw_count(&self) -> u128 {
        self.diag_count().saturating_mul(self.off_count())
    }

    /// The Gram with the given diagonal and off-diagonal indices.
    pub fn form(&self, diag: u64, off: u64, f: &Field) -> Option<GramLattice> {
        let n = self.rank();
        let mut g = PolyMatrix::zeros(n, n);
        let mut r = diag;
        for i in 0..n {
            let lc = if r % 2 == 0 { Fe::ONE } else { f.delta() };
            r /= 2;
            let mut c = self.digits(&mut r, self.minima[i], f);
            c.push(lc);
            g[(i, i)] = Poly::from_coeffs(c);
        }
        let mut r = off;
        for i in 0..n {
            for j in i + 1..n {
                let p = Poly::from_coeffs(self.digits(&mut r, self.minima[i], f));
                g[(i, j)] = p.clone();
                g[(j, i)] = p;
            }
        }
        GramLattice::new(g, f).ok()
    }

    fn digits(&self, r: &mut u64, k: u32, f: &Field) -> Vec<Fe> {
        (0..k)
            .map(|_| {
                let d = (*r % self.q) as u32;
                *r /= self.q;
                f.elem(d).unwrap()
            })
            .collect()
    }

    fn definite(&self, diag: u64, off: u64, f: &Field) -> Option<GramLattice> {
        self.form(diag, off, f).filter(|l| is_definite(l, f).unwrap_or(false))
    }

    /// Every definite form of the stratum, in index order.
    pub fn all_forms(&self, f: &Field) -> Vec<GramLattice> {
        let offs = self.off_count() as u64;
        let total = self.raw_count() as u64;
        (0..total).into_par_iter().filter_map(|k| self.definite(k / offs, k % offs, f)).collect()
    }

    /// Definite forms over the given diagonals, each completed by every
    /// off-diagonal choice.
    pub fn forms_over_diagonals(&self, diags: &[u64], f: &Field) -> Vec<GramLattice> {
        let offs = self.off_count() as u64;
        let total = diags.len() as u64 * offs;
        (0..total)
            .into_par_iter()
            .filter_map(|k| self.definite(diags[(k / offs) as usize], k % offs, f))
            .collect()
    }

    /// `count` distinct diagonals with a definite leading part, drawn from
    /// a generator seeded by `seed` and the stratum.
    pub fn sample_diagonals(&self, count: usize, seed: u64, f: &Field) -> Vec<u64> {
        let mut h = seed;
        for x in std::iter::once(self.q).chain(self.minima.iter().map(|&m| m as u64)) {
            h = h.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(x + 1);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(h);
        let n = self.diag_count().min(u64::MAX as u128) as u64;
        let mut picked = BTreeSet::new();
        let mut tries = 0usize;
        while picked.len() < count && tries < 64 * count.max(1) {
            tries += 1;
            let d = rng.gen_range(0..n);
            if !picked.contains(&d) && self.definite(d, 0, f).is_some() {
                picked.insert(d);
            }
        }
        picked.into_iter().collect()
    }
}

/// How a stratum's forms were produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coverage {
    Exhaustive,
    Sampled { diagonals: usize },
}

/// Definite forms of one stratum under the config's budget: all of them
/// when the raw space fits, otherwise sampled diagonals.
pub fn stratum_forms(st: &Stratum, cfg: &SearchConfig, f: &Field) -> Result<(Coverage, Vec<GramLattice>)> {
    let raw = st.raw_count();
    if raw <= cfg.form_budget {
        return Ok((Coverage::Exhaustive, st.all_forms(f)));
    }
    let per_diag = st.off_count();
    let want = (cfg.form_budget / per_diag.max(1)).min(cfg.samples as u128) as usize;
    if want == 0 {
        return Err(ffqlat_core::Error::BudgetExceeded { needed: raw, budget: cfg.form_budget }.into());
    }
    let diags = st.sample_diagonals(want, cfg.seed, f);
    Ok((Coverage::Sampled { diagonals: diags.len() }, st.forms_over_diagonals(&diags, f)))
}

/// Every definite reduced form with `mu_n <= max_mu`, pattern by pattern.
/// Fails instead of sampling when a stratum exceeds the form budget.
pub fn enumerate_reduced_forms(cfg: &SearchConfig) -> Result<Vec<GramLattice>> {
    cfg.validate()?;
    let f = cfg.field()?;
    let mut out = Vec::new();
    for p in config_patterns(cfg) {
        let st = Stratum::new(&p, &f);
        let raw = st.raw_count();
        if raw > cfg.form_budget {
            return Err(ffqlat_core::Error::BudgetExceeded { needed: raw, budget: cfg.form_budget }.into());
        }
        out.extend(st.all_forms(&f));
    }
    Ok(out)
}
