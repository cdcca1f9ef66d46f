//! Local invariants: places, the canonical character at a finite prime,
//! Hilbert symbols, Jordan decompositions, averages of the character over
//! a lattice, Weil indices and genus comparison.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::poly::factor;
use crate::algebra::{laurent_invert, quadratic_gauss_sum, smith_normal_form, CycValue, Fe, Field, Laurent, Poly, RatFn, ScaledCycValue, ZetaCounter};
use crate::error::{invalid, Error, Result};
use crate::fieldsums::FqQuadSpace;
use crate::qform::{determinant_class, infinity_invariants, DeterminantClass, GramLattice, InfinityInvariants, SquareClassAtInfinity, UnitClass};

/// Largest `F_q`-dimension of a quotient handled by [`mu_average`].
pub const MAX_QUOTIENT_DIM: usize = 600;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Place {
    /// A monic irreducible `pi`.
    Finite(Poly),
    Infinity,
}

impl Place {
    pub fn finite(pi: &Poly, f: &Field) -> Result<Place> {
        if !pi.is_irreducible(f) {
            return Err(Error::NotIrreducible);
        }
        Ok(Place::Finite(pi.monic(f)))
    }

    pub fn parse(src: &str, f: &Field) -> Result<Place> {
        match src.trim() {
            "inf" | "infinity" | "oo" => Ok(Place::Infinity),
            s => Place::finite(&Poly::parse(s, f)?, f),
        }
    }

    /// Degree of the residue field over `F_q`.
    pub fn residue_degree(&self) -> u32 {
        match self {
            Place::Finite(pi) => pi.deg().unwrap() as u32,
            Place::Infinity => 1,
        }
    }

    pub fn prime(&self) -> Option<&Poly> {
        match self {
            Place::Finite(pi) => Some(pi),
            Place::Infinity => None,
        }
    }

    pub fn render(&self) -> String {
        match self {
            Place::Finite(pi) => pi.render(),
            Place::Infinity => "inf".into(),
        }
    }

    pub fn valuation(&self, a: &RatFn, f: &Field) -> Result<i64> {
        match self {
            Place::Finite(pi) => a.valuation(pi, f),
            Place::Infinity => Ok(-a.deg().ok_or(Error::ZeroArgument)?),
        }
    }

    /// `(v(a), eta(a pi^{-v(a)} mod m_v))` with `eta` the quadratic character
    /// of the residue field.
    pub fn split(&self, a: &RatFn, f: &Field) -> Result<(i64, i8)> {
        match self {
            Place::Finite(pi) => {
                let (v, r) = a.unit_residue(pi, f)?;
                Ok((v, residue_character(&r, pi, f)))
            }
            Place::Infinity => Ok((-a.deg().ok_or(Error::ZeroArgument)?, f.psi(a.lc()))),
        }
    }

    /// `eta(-1)` on the residue field.
    pub fn eta_minus_one(&self, f: &Field) -> i8 {
        let qf = (f.q() as u64).pow(self.residue_degree());
        if qf % 4 == 1 {
            1
        } else {
            -1
        }
    }
}

/// Quadratic character of `A / pi` at a nonzero residue.
pub fn residue_character(r: &Poly, pi: &Poly, f: &Field) -> i8 {
    let qf = (f.q() as u128).pow(pi.deg().unwrap() as u32);
    let x = r.pow_mod((qf - 1) / 2, pi, f).unwrap();
    if x == Poly::one() {
        1
    } else if x.is_zero() {
        0
    } else {
        -1
    }
}

/// `g -> coefficient of t^{-1} in g / pi^k`, an `F_q`-linear functional on
/// polynomials of degree `<= max_deg`.
#[derive(Clone, Debug)]
pub struct ResidueFunctional {
    lambda: Vec<Fe>,
}

impl ResidueFunctional {
    pub fn new(pi: &Poly, k: u32, max_deg: usize, f: &Field) -> ResidueFunctional {
        let pk = Laurent::from_poly(&pi.pow(k as u64, f));
        let target = -1 - max_deg as i64;
        let inv = laurent_invert(&pk, target, f).expect("nonzero");
        let lambda = (0..=max_deg).map(|i| inv.coeff(-1 - i as i64).unwrap()).collect();
        ResidueFunctional { lambda }
    }

    pub fn apply(&self, g: &Poly, f: &Field) -> Fe {
        assert!(g.coeffs().len() <= self.lambda.len(), "residue functional precision exceeded");
        g.coeffs().iter().zip(&self.lambda).fold(Fe::ZERO, |acc, (&a, &l)| f.add(acc, f.mul(a, l)))
    }
}

/// `chi_pi(g) = zeta_p^{Tr(Res_pi g)}` for `g` whose only finite pole is at `pi`.
pub fn chi_pi(g: &RatFn, place: &Place, f: &Field) -> Result<CycValue> {
    let Place::Finite(pi) = place else {
        return Err(invalid("chi_pi needs a finite place"));
    };
    let (k, rest) = g.den().split_valuation(pi, f);
    if rest.deg() != Some(0) {
        return Err(Error::PoleAtOtherPrime);
    }
    if k == 0 || g.is_zero() {
        return Ok(CycValue::from_int(f.p(), 1));
    }
    let num = g.num().scale(f.inv(rest.lc())?, f);
    let lam = ResidueFunctional::new(pi, k, num.deg().unwrap(), f);
    Ok(CycValue::zeta(f.p(), f.trace(lam.apply(&num, f)) as i64))
}

/// Tame symbol `(a, b)_v`.
pub fn hilbert_symbol(a: &RatFn, b: &RatFn, place: &Place, f: &Field) -> Result<i8> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let (va, ea) = place.split(a, f)?;
    let (vb, eb) = place.split(b, f)?;
    let mut s = 1i8;
    if (va * vb).rem_euclid(2) == 1 {
        s *= place.eta_minus_one(f);
    }
    if vb.rem_euclid(2) == 1 {
        s *= ea;
    }
    if va.rem_euclid(2) == 1 {
        s *= eb;
    }
    Ok(s)
}

/// Infinity and every prime dividing a numerator or denominator.
pub fn relevant_places(items: &[&RatFn], f: &Field) -> Vec<Place> {
    let mut primes: Vec<Poly> = Vec::new();
    for r in items {
        for p in [r.num(), r.den()] {
            if p.deg().unwrap_or(0) > 0 {
                primes.extend(factor(p, f).into_iter().map(|(pi, _)| pi));
            }
        }
    }
    primes.sort();
    primes.dedup();
    let mut out: Vec<Place> = primes.into_iter().map(Place::Finite).collect();
    out.push(Place::Infinity);
    out
}

/// `prod_v (a, b)_v` over all places where the symbol can be nontrivial.
pub fn hilbert_product(a: &RatFn, b: &RatFn, f: &Field) -> Result<i8> {
    relevant_places(&[a, b], f).iter().try_fold(1i8, |acc, v| Ok(acc * hilbert_symbol(a, b, v, f)?))
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct JordanComponent {
    pub scale: i64,
    pub rank: usize,
    pub det_class: UnitClass,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct JordanSymbol {
    pub prime: Poly,
    pub components: Vec<JordanComponent>,
}

impl JordanSymbol {
    pub fn max_scale(&self) -> i64 {
        self.components.last().map_or(0, |c| c.scale)
    }
}

/// Diagonal entries of an orthogonal basis of `L (x) A_(pi)`.
pub fn local_diagonal(l: &GramLattice, pi: &Poly, f: &Field) -> Result<Vec<RatFn>> {
    let n = l.rank();
    let mut m: Vec<Vec<RatFn>> =
        (0..n).map(|i| (0..n).map(|j| RatFn::from_poly(l.entry(i, j).clone())).collect()).collect();
    let val = |x: &RatFn| if x.is_zero() { None } else { Some(x.valuation(pi, f).unwrap()) };
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut best_d: Option<(i64, usize)> = None;
        let mut best_o: Option<(i64, usize, usize)> = None;
        for i in k..n {
            if let Some(v) = val(&m[i][i]) {
                if best_d.map_or(true, |(b, _)| v < b) {
                    best_d = Some((v, i));
                }
            }
            for j in i + 1..n {
                if let Some(v) = val(&m[i][j]) {
                    if best_o.map_or(true, |(b, _, _)| v < b) {
                        best_o = Some((v, i, j));
                    }
                }
            }
        }
        let piv = match (best_d, best_o) {
            (Some((vd, i)), Some((vo, _, _))) if vd <= vo => i,
            (Some((_, i)), None) => i,
            (_, Some((_, i, j))) => {
                // v_i += v_j: the new diagonal has the off-diagonal valuation
                for c in 0..n {
                    let v = m[i][c].add(&m[j][c], f);
                    m[i][c] = v;
                }
                for r in 0..n {
                    let v = m[r][i].add(&m[r][j], f);
                    m[r][i] = v;
                }
                i
            }
            (None, None) => return Err(Error::SingularForm),
        };
        m.swap(k, piv);
        for row in m.iter_mut() {
            row.swap(k, piv);
        }
        let inv = m[k][k].inv(f)?;
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
        out.push(m[k][k].clone());
    }
    Ok(out)
}

/// Group a local diagonalization by scale.
pub fn jordan_decompose(l: &GramLattice, place: &Place, f: &Field) -> Result<JordanSymbol> {
    let Place::Finite(pi) = place else {
        return Err(invalid("Jordan decomposition needs a finite place"));
    };
    let diag = local_diagonal(l, pi, f)?;
    let mut parts: Vec<(i64, i8)> = diag.iter().map(|d| place.split(d, f)).collect::<Result<_>>()?;
    parts.sort_by_key(|&(v, _)| v);
    let mut comps: Vec<JordanComponent> = Vec::new();
    for (v, e) in parts {
        let cls = if e > 0 { UnitClass::Square } else { UnitClass::Nonsquare };
        match comps.last_mut() {
            Some(c) if c.scale == v => {
                c.rank += 1;
                c.det_class = c.det_class.mul(cls);
            }
            _ => comps.push(JordanComponent { scale: v, rank: 1, det_class: cls }),
        }
    }
    Ok(JordanSymbol { prime: pi.clone(), components: comps })
}

/// `F_q`-quadratic form `c -> Res(Q(sum c_a x_a) / pi^k)` on the given
/// vectors.
fn linearized_form(l: &GramLattice, vecs: &[Vec<Poly>], pi: &Poly, k: u32, f: &Field) -> FqQuadSpace {
    let n = l.rank();
    let sx: Vec<Vec<Poly>> = vecs
        .iter()
        .map(|x| {
            (0..n).map(|i| (0..n).fold(Poly::zero(), |acc, j| acc.add(&l.entry(i, j).mul(&x[j], f), f))).collect()
        })
        .collect();
    let max_deg = vecs
        .iter()
        .zip(&sx)
        .flat_map(|(x, s)| x.iter().chain(s.iter()))
        .filter_map(|p| p.deg())
        .max()
        .unwrap_or(0);
    let lam = ResidueFunctional::new(pi, k, 2 * max_deg + 1, f);
    let dim = vecs.len();
    let mut rows = vec![vec![Fe::ZERO; dim]; dim];
    for a in 0..dim {
        for b in a..dim {
            let g = vecs[a].iter().zip(&sx[b]).fold(Poly::zero(), |acc, (x, y)| acc.add(&x.mul(y, f), f));
            let v = lam.apply(&g, f);
            rows[a][b] = v;
            rows[b][a] = v;
        }
    }
    FqQuadSpace::new(rows).expect("symmetric")
}

/// Representatives of `L / (L cap L#)` for the form `pi^{-k} Q`, as an
/// `F_q`-basis of polynomial vectors.
pub fn quotient_basis(l: &GramLattice, pi: &Poly, k: u32, f: &Field) -> Vec<Vec<Poly>> {
    let snf = smith_normal_form(l.gram(), f);
    let n = l.rank();
    let deg_pi = pi.deg().unwrap();
    let pk = pi.pow(k as u64, f);
    let mut basis = Vec::new();
    for i in 0..n {
        let d = &snf.d[(i, i)];
        let (v, _) = d.split_valuation(pi, f);
        let e = (k as i64 - v as i64).max(0) as usize;
        for j in 0..e * deg_pi {
            let col: Vec<Poly> = (0..n).map(|r| snf.v[(r, i)].shift(j).rem(&pk, f).unwrap()).collect();
            basis.push(col);
        }
    }
    basis
}

/// Exact average of `chi_pi(Q(x) / pi^k)` over `L / (L cap L#)`, evaluated
/// as a Gauss sum of the linearized `F_q`-form.
pub fn mu_average(l: &GramLattice, place: &Place, k: u32, f: &Field) -> Result<ScaledCycValue> {
    let Place::Finite(pi) = place else {
        return Err(invalid("mu_average needs a finite place"));
    };
    let basis = quotient_basis(l, pi, k, f);
    if basis.len() > MAX_QUOTIENT_DIM {
        return Err(Error::BudgetExceeded { needed: basis.len() as u128, budget: MAX_QUOTIENT_DIM as u128 });
    }
    let phi = linearized_form(l, &basis, pi, k, f);
    Ok(normalized_gauss(&phi, f))
}

/// `Gamma(phi) / q^dim` as a scaled cyclotomic value.
fn normalized_gauss(phi: &FqQuadSpace, f: &Field) -> ScaledCycValue {
    let c = phi.classify(f);
    let g = quadratic_gauss_sum(f).pow(c.rank as u32).scale(c.det_class.sign() as i64);
    ScaledCycValue { sum: g, q: f.q(), q_half_power: 2 * c.rank as i64 }
}

/// Same average by direct enumeration of the quotient.
pub fn mu_average_brute(l: &GramLattice, place: &Place, k: u32, budget: u128, f: &Field) -> Result<ScaledCycValue> {
    let Place::Finite(pi) = place else {
        return Err(invalid("mu_average needs a finite place"));
    };
    let basis = quotient_basis(l, pi, k, f);
    let size = (f.q() as u128).checked_pow(basis.len() as u32).unwrap_or(u128::MAX);
    if size > budget {
        return Err(Error::BudgetExceeded { needed: size, budget });
    }
    let n = l.rank();
    let pk = pi.pow(k as u64, f);
    let max_deg = 2 * basis.iter().flatten().filter_map(|p| p.deg()).max().unwrap_or(0)
        + (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter_map(|(i, j)| l.entry(i, j).deg()).max().unwrap_or(0);
    let lam = ResidueFunctional::new(pi, k, max_deg + 1, f);
    let q = f.q() as u128;
    let mut z = ZetaCounter::new(f.p());
    for idx in 0..size {
        let mut r = idx;
        let mut x = vec![Poly::zero(); n];
        for b in &basis {
            let c = f.elem((r % q) as u32).unwrap();
            r /= q;
            if c.is_zero() {
                continue;
            }
            for i in 0..n {
                x[i] = x[i].add(&b[i].scale(c, f), f);
            }
        }
        let x: Vec<Poly> = x.iter().map(|p| p.rem(&pk, f).unwrap()).collect();
        let v = l.value(&x, f);
        z.push(f.trace(lam.apply(&v, f)), 1);
    }
    Ok(ScaledCycValue { sum: z.value(), q: f.q(), q_half_power: 2 * basis.len() as i64 })
}

/// Degree bound after which the average over `L_m` equals the quotient average.
pub fn stabilization_bound(minima: &[u32], k: u32, deg_pi: u32) -> u32 {
    let top = *minima.iter().max().unwrap_or(&0);
    (2 * (k * deg_pi).saturating_sub(1) + top).max(top)
}

/// `(1 / |L_m|) sum_{x in L_m} chi_pi(Q(x) / pi^k)` for a reduced `L`.
pub fn mu_average_limit(l: &GramLattice, place: &Place, k: u32, m: u32, f: &Field) -> Result<ScaledCycValue> {
    let Place::Finite(pi) = place else {
        return Err(invalid("mu_average needs a finite place"));
    };
    let mins = l.minima().ok_or_else(|| invalid("lattice must be reduced"))?.to_vec();
    let n = l.rank();
    let mut basis = Vec::new();
    for (i, &mu) in mins.iter().enumerate() {
        if m < mu {
            continue;
        }
        for j in 0..=((m - mu) / 2) as usize {
            let mut v = vec![Poly::zero(); n];
            v[i] = Poly::monomial(Fe::ONE, j);
            basis.push(v);
        }
    }
    if basis.len() > MAX_QUOTIENT_DIM {
        return Err(Error::BudgetExceeded { needed: basis.len() as u128, budget: MAX_QUOTIENT_DIM as u128 });
    }
    let phi = linearized_form(l, &basis, pi, k, f);
    Ok(normalized_gauss(&phi, f))
}

/// `gamma_v(<a>)`: 1 for even valuation, otherwise the normalized Gauss sum
/// of the residue field.
pub fn gamma_one(a: &RatFn, place: &Place, f: &Field) -> Result<ScaledCycValue> {
    if a.is_zero() {
        return Err(Error::DegenerateForm);
    }
    match place {
        Place::Infinity => Ok(gamma_at_infinity(SquareClassAtInfinity::of(a, f)?, f)),
        Place::Finite(pi) => {
            let (v, u) = a.unit_residue(pi, f)?;
            if v.rem_euclid(2) == 0 {
                return Ok(ScaledCycValue::one(f.p(), f.q()));
            }
            let deg = pi.deg().unwrap();
            let lam = ResidueFunctional::new(pi, 1, deg, f);
            let mut z = ZetaCounter::new(f.p());
            for c in crate::algebra::poly::all_polys_below(deg, f) {
                let g = u.mul(&c.mul(&c, f), f).rem(pi, f)?;
                z.push(f.trace(lam.apply(&g, f)), 1);
            }
            Ok(ScaledCycValue { sum: z.value(), q: f.q(), q_half_power: deg as i64 })
        }
    }
}

pub fn gamma_at_infinity(c: SquareClassAtInfinity, f: &Field) -> ScaledCycValue {
    if !c.odd {
        return ScaledCycValue::one(f.p(), f.q());
    }
    ScaledCycValue { sum: quadratic_gauss_sum(f).scale(c.unit.sign() as i64), q: f.q(), q_half_power: 1 }
}

/// Weil index of a diagonal form, multiplicative over the entries.
pub fn weil_gamma(diag: &[RatFn], place: &Place, f: &Field) -> Result<ScaledCycValue> {
    diag.iter().try_fold(ScaledCycValue::one(f.p(), f.q()), |acc, a| Ok(acc.mul(&gamma_one(a, place, f)?)))
}

/// Complete set of local invariants: determinant class, invariants at
/// infinity, and the Jordan symbol at each prime dividing the determinant.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct GenusSymbol {
    pub det: DeterminantClass,
    pub infinity: InfinityInvariants,
    pub local: Vec<JordanSymbol>,
}

pub fn genus_symbol(l: &GramLattice, f: &Field) -> Result<GenusSymbol> {
    let det = determinant_class(l, f);
    let infinity = infinity_invariants(l, f)?;
    let local = factor(&det.monic_det, f)
        .into_iter()
        .map(|(pi, _)| jordan_decompose(l, &Place::Finite(pi), f))
        .collect::<Result<_>>()?;
    Ok(GenusSymbol { det, infinity, local })
}

/// Equal determinant classes, equal Jordan symbols at every prime dividing
/// either determinant, equal invariants over `K_inf`.
pub fn same_genus(a: &GramLattice, b: &GramLattice, f: &Field) -> Result<bool> {
    if a.rank() != b.rank() {
        return Err(Error::RankMismatch(a.rank(), b.rank()));
    }
    Ok(genus_symbol(a, f)? == genus_symbol(b, f)?)
}

/// `log_q |mu(L, pi^{-k} Q)|` predicted from a Jordan symbol.
pub fn predicted_log_abs_mu(sym: &JordanSymbol, k: u32) -> f64 {
    let deg = sym.prime.deg().unwrap() as f64;
    -sym.components.iter().map(|c| c.rank as f64 * deg / 2.0 * (k as i64 - c.scale).max(0) as f64).sum::<f64>()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AudibilityReport {
    pub prime: String,
    pub k_max: u32,
    pub measured_log_abs: Vec<f64>,
    pub predicted_log_abs: Vec<f64>,
    pub max_log_error: f64,
    /// Symbol read back from the measured averages alone.
    pub recovered: Vec<JordanComponent>,
    pub expected: Vec<JordanComponent>,
    /// `k_max` was large enough to see every scale.
    pub complete: bool,
    pub symbol_matches: bool,
}

/// Measures `mu(L, pi^{-k} Q)` for `k = 0..=k_max`, compares magnitudes with
/// the Jordan prediction, and recovers scales, ranks and determinant
/// classes from the measurements.
pub fn audibility_experiment(l: &GramLattice, place: &Place, k_max: u32, f: &Field) -> Result<AudibilityReport> {
    let Place::Finite(pi) = place else {
        return Err(invalid("audibility experiment needs a finite place"));
    };
    let sym = jordan_decompose(l, place, f)?;
    let deg = pi.deg().unwrap() as i64;
    let mus: Vec<Complex64> =
        (0..=k_max).map(|k| mu_average(l, place, k, f).map(|m| m.to_complex())).collect::<Result<_>>()?;
    let ln_q = (f.q() as f64).ln();
    let measured: Vec<f64> = mus.iter().map(|m| m.norm().ln() / ln_q).collect();
    let predicted: Vec<f64> = (0..=k_max).map(|k| predicted_log_abs_mu(&sym, k)).collect();
    let max_log_error = measured.iter().zip(&predicted).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    // g(k) = -2 log_{q_pi} |mu| = sum_i m_i max(0, k - nu_i)
    let g: Vec<i64> = measured.iter().map(|&x| (-2.0 * x / deg as f64).round() as i64).collect();
    let slope = |k: i64| if k < 0 { 0 } else { g[(k + 1) as usize] - g[k as usize] };
    let phase: Vec<Complex64> = mus.iter().map(|m| m / m.norm()).collect();
    let ph = |k: i64| if k < 0 { Complex64::new(1.0, 0.0) } else { phase[k as usize] };
    let g_pi = gamma_one(&RatFn::new(Poly::one(), pi.clone(), f)?, place, f)?.to_complex();
    let mut recovered = Vec::new();
    for nu in 0..k_max as i64 {
        let m = slope(nu) - slope(nu - 1);
        if m <= 0 {
            continue;
        }
        let r = ph(nu + 1) / ph(nu - 1);
        let eps = r / g_pi.powi(m as i32);
        let det_class = if eps.re > 0.0 { UnitClass::Square } else { UnitClass::Nonsquare };
        recovered.push(JordanComponent { scale: nu, rank: m as usize, det_class });
    }
    let complete = recovered.iter().map(|c| c.rank).sum::<usize>() == l.rank();
    let symbol_matches = complete && recovered == sym.components;
    Ok(AudibilityReport {
        prime: pi.render(),
        k_max,
        measured_log_abs: measured,
        predicted_log_abs: predicted,
        max_log_error,
        recovered,
        expected: sym.components,
        complete,
        symbol_matches,
    })
}
