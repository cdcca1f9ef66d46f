//! Browser demo. Every export takes and returns JSON text, so the page
//! needs no bindings beyond strings; failures come back as `{"error": ...}`.

use ffqlat_core::algebra::Field;
use ffqlat_core::fieldsums::{gauss_sum, gauss_sum_closed_form, FqQuadSpace};
use ffqlat_core::qform::{determinant_class, is_definite, reduce, GramLattice};
use ffqlat_core::spectrum::{closed_form_dims, enumerate_spectrum};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Vectors one spectrum may visit in the browser.
const BUDGET: u128 = 1 << 20;

type Res = Result<Value, String>;

fn parse_form(q: u32, rows: &str) -> Result<(Field, GramLattice), String> {
    let f = Field::of_order(q).map_err(|e| e.to_string())?;
    let rows: Vec<Vec<String>> = serde_json::from_str(rows).map_err(|e| format!("rows: {e}"))?;
    let refs: Vec<Vec<&str>> = rows.iter().map(|r| r.iter().map(String::as_str).collect()).collect();
    let slices: Vec<&[&str]> = refs.iter().map(Vec::as_slice).collect();
    let l = GramLattice::parse(&slices, &f).map_err(|e| e.to_string())?;
    Ok((f, l))
}

fn render(l: &GramLattice) -> Vec<Vec<String>> {
    l.gram().to_rows().iter().map(|r| r.iter().map(|p| p.render()).collect()).collect()
}

fn finish(r: Res) -> String {
    r.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

pub fn reduce_value(q: u32, rows: &str) -> Res {
    let (f, l) = parse_form(q, rows)?;
    if !is_definite(&l, &f).map_err(|e| e.to_string())? {
        return Err("form is not definite: it has a nonzero vector of value 0 over F_q((1/t))".into());
    }
    let (r, _) = reduce(&l, &f).map_err(|e| e.to_string())?;
    Ok(json!({
        "reduced": render(&r),
        "minima": r.minima(),
        "det": r.det(&f).render(),
        "det_class": determinant_class(&r, &f).unit_class,
    }))
}

pub fn dims_value(q: u32, rows: &str, bound: u32) -> Res {
    let (f, l) = parse_form(q, rows)?;
    let (r, _) = reduce(&l, &f).map_err(|e| e.to_string())?;
    let mins = r.minima().unwrap().to_vec();
    let s = enumerate_spectrum(&r, bound, BUDGET, &f).map_err(|e| e.to_string())?;
    let closed = closed_form_dims(&mins, bound);
    let counts: Vec<(String, u64)> = s.counts.iter().take(40).map(|(a, c)| (a.render(), *c)).collect();
    Ok(json!({
        "minima": mins,
        "enumerated": s.dims,
        "closed_form": closed,
        "agree": s.dims == closed,
        "counts": counts,
        "distinct_values": s.counts.len(),
    }))
}

pub fn gauss_value(q: u32, matrix: &str) -> Res {
    let f = Field::of_order(q).map_err(|e| e.to_string())?;
    let rows: Vec<Vec<u32>> = serde_json::from_str(matrix).map_err(|e| format!("matrix: {e}"))?;
    let w = FqQuadSpace::from_indices(&rows, &f).map_err(|e| e.to_string())?;
    let (direct, closed) = (gauss_sum(&w, &f), gauss_sum_closed_form(&w, &f));
    let c = direct.to_complex();
    Ok(json!({
        "class": w.classify(&f),
        "direct": direct.render(),
        "closed_form": closed.render(),
        "equal": direct == closed,
        "complex": [c.re, c.im],
    }))
}

/// Reduced Gram, minima and determinant of a form given as rows of
/// polynomial strings, e.g. `[["1","t"],["t","t^2+2"]]`.
#[wasm_bindgen]
pub fn reduce_form(q: u32, rows: &str) -> String {
    finish(reduce_value(q, rows))
}

/// `dim L_k` from enumeration next to the closed form from the minima.
#[wasm_bindgen]
pub fn dims_vs_closed_form(q: u32, rows: &str, bound: u32) -> String {
    finish(dims_value(q, rows, bound))
}

/// Gauss sum of a symmetric matrix of element indices, both ways.
#[wasm_bindgen]
pub fn gauss(q: u32, matrix: &str) -> String {
    finish(gauss_value(q, matrix))
}
