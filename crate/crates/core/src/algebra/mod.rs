//! Exact arithmetic: finite fields, `F_q[t]`, `F_q(t)`, `F_q((1/t))`,
//! matrices over `F_q[t]`, and `Z[zeta_p]`.

pub mod cyclo;
pub mod field;
pub mod laurent;
pub mod matrix;
pub mod poly;
pub mod ratfn;

pub use cyclo::{CycValue, ScaledCycValue, ZetaCounter};
pub use field::{Fe, Field, FieldConfig};
pub use laurent::{laurent_invert, Laurent};
pub use matrix::{smith_normal_form, PolyMatrix, SmithForm};
pub use poly::Poly;
pub use ratfn::RatFn;

/// Additive character of `F_q`: `chi(u) = zeta_p^{Tr(u)}`.
pub fn chi(f: &Field, u: Fe) -> CycValue {
    CycValue::zeta(f.p(), f.trace(u) as i64)
}

/// `G = sum_{c in F_q} chi(c^2)`.
pub fn quadratic_gauss_sum(f: &Field) -> CycValue {
    let mut z = ZetaCounter::new(f.p());
    for c in f.elements() {
        z.push(f.trace(f.mul(c, c)), 1);
    }
    z.value()
}
