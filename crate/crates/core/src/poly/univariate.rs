//! Dense univariate polynomials as coefficient slices, lowest power first.

use crate::field::{FieldElem, PrimeField};

pub fn trim(mut p: Vec<FieldElem>) -> Vec<FieldElem> {
    while p.last().is_some_and(FieldElem::is_zero) {
        p.pop();
    }
    p
}

pub fn eval(field: PrimeField, p: &[FieldElem], z: FieldElem) -> FieldElem {
    p.iter().rev().fold(field.zero(), |acc, c| acc * z + *c)
}

pub fn mul(field: PrimeField, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = field.zeros(a.len() + b.len() - 1);
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += *x * *y;
        }
    }
    trim(out)
}

/// Multiplies `p` by the monic linear factor `(z - root)`.
pub fn mul_linear(field: PrimeField, p: &[FieldElem], root: FieldElem) -> Vec<FieldElem> {
    let mut out = field.zeros(p.len() + 1);
    for (i, c) in p.iter().enumerate() {
        out[i + 1] += *c;
        out[i] -= *c * root;
    }
    trim(out)
}

/// Long division. `divisor` must be nonzero after trimming.
pub fn divrem(field: PrimeField, num: &[FieldElem], divisor: &[FieldElem]) -> (Vec<FieldElem>, Vec<FieldElem>) {
    let divisor = trim(divisor.to_vec());
    let lead = divisor.last().expect("division by the zero polynomial");
    let lead_inv = lead.inv().expect("leading coefficient is nonzero");
    let mut rem = trim(num.to_vec());
    if rem.len() < divisor.len() {
        return (Vec::new(), rem);
    }
    let mut quot = field.zeros(rem.len() - divisor.len() + 1);
    while rem.len() >= divisor.len() {
        let shift = rem.len() - divisor.len();
        let c = *rem.last().unwrap() * lead_inv;
        quot[shift] = c;
        for (i, d) in divisor.iter().enumerate() {
            rem[shift + i] -= c * *d;
        }
        rem = trim(rem);
    }
    (trim(quot), rem)
}
