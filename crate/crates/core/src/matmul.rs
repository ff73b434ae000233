//! Coded multiplication of two square `te x te` matrices.
//!
//! The polynomial code splits `A` into row blocks and `B` into column blocks
//! and recovers every block product from the `t^2` coefficients of
//! `pA(z) pB(z)`. MatDot splits along the inner dimension instead and needs
//! only the coefficient of `z^(t-1)`, at the price of larger worker products.

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldElem, PrimeField};
use crate::linalg::Matrix;
use crate::poly::interpolate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatmulScheme {
    Polynomial,
    #[serde(rename = "matdot")]
    MatDot,
}

impl std::str::FromStr for MatmulScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "polynomial" | "poly" => Ok(MatmulScheme::Polynomial),
            "matdot" => Ok(MatmulScheme::MatDot),
            other => Err(Error::usage(format!("unknown matrix multiplication scheme {other:?}"))),
        }
    }
}

/// Encoded shares for every worker and what decoding needs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatmulPlan {
    pub scheme: MatmulScheme,
    #[serde(skip)]
    field: PrimeField,
    pub t: usize,
    pub s: usize,
    /// Side length of the input matrices.
    pub n: usize,
    pub workers: usize,
    /// Degree of the product polynomial `pA(z) pB(z)`.
    pub degree: usize,
    pub anchors: Vec<FieldElem>,
    #[serde(skip)]
    a_shares: Vec<Matrix>,
    #[serde(skip)]
    b_shares: Vec<Matrix>,
}

fn check_shapes(a: &Matrix, b: &Matrix, t: usize) -> Result<usize> {
    let n = a.rows();
    if t == 0 || a.cols() != n || b.rows() != n || b.cols() != n {
        return Err(Error::usage("inputs must be square matrices of equal size and t >= 1"));
    }
    if n == 0 || !n.is_multiple_of(t) {
        return Err(Error::usage(format!("t = {t} does not divide the side length {n}")));
    }
    if a.field() != b.field() {
        return Err(Error::FieldMismatch(a.field().modulus(), b.field().modulus()));
    }
    Ok(n / t)
}

fn eval_matrix_poly(coeffs: &[(usize, Matrix)], z: FieldElem) -> Matrix {
    let (rows, cols) = (coeffs[0].1.rows(), coeffs[0].1.cols());
    coeffs
        .iter()
        .fold(Matrix::zeros(z.field(), rows, cols), |acc, (power, m)| {
            acc.add(&m.scale(z.pow(*power as u64))).expect("equal block shapes")
        })
}

#[allow(clippy::too_many_arguments)]
fn build(
    scheme: MatmulScheme,
    field: PrimeField,
    t: usize,
    s: usize,
    n: usize,
    degree: usize,
    a_poly: &[(usize, Matrix)],
    b_poly: &[(usize, Matrix)],
) -> Result<MatmulPlan> {
    let workers = degree + 1 + s;
    field.require_size(workers as u64)?;
    let anchors = field.enumerate(workers)?;
    Ok(MatmulPlan {
        scheme,
        field,
        t,
        s,
        n,
        workers,
        degree,
        a_shares: anchors.iter().map(|z| eval_matrix_poly(a_poly, *z)).collect(),
        b_shares: anchors.iter().map(|z| eval_matrix_poly(b_poly, *z)).collect(),
        anchors,
    })
}

/// `pA(z) = sum_i A_i z^(i-1)` over row blocks and
/// `pB(z) = sum_j B_j z^((j-1)t)` over column blocks: `w = t^2 + s`.
pub fn polynomial_code_plan(a: &Matrix, b: &Matrix, t: usize, s: usize) -> Result<MatmulPlan> {
    let e = check_shapes(a, b, t)?;
    let n = e * t;
    let a_poly: Vec<(usize, Matrix)> = (0..t).map(|i| (i, a.block(i * e, 0, e, n))).collect();
    let b_poly: Vec<(usize, Matrix)> = (0..t).map(|j| (j * t, b.block(0, j * e, n, e))).collect();
    build(
        MatmulScheme::Polynomial,
        a.field(),
        t,
        s,
        n,
        t * t - 1,
        &a_poly,
        &b_poly,
    )
}

/// `pA(z) = sum_i A_i z^(i-1)` over column blocks and
/// `pB(z) = sum_j B_j z^(t-j)` over row blocks: `w = 2t - 1 + s`.
pub fn matdot_plan(a: &Matrix, b: &Matrix, t: usize, s: usize) -> Result<MatmulPlan> {
    let e = check_shapes(a, b, t)?;
    let n = e * t;
    let a_poly: Vec<(usize, Matrix)> = (0..t).map(|i| (i, a.block(0, i * e, n, e))).collect();
    let b_poly: Vec<(usize, Matrix)> = (0..t).map(|j| (t - 1 - j, b.block(j * e, 0, e, n))).collect();
    build(MatmulScheme::MatDot, a.field(), t, s, n, 2 * t - 2, &a_poly, &b_poly)
}

impl MatmulPlan {
    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// Shapes `(rows, cols)` of the encoded `A` and `B` shares.
    pub fn share_shapes(&self) -> ((usize, usize), (usize, usize)) {
        let (a, b) = (&self.a_shares[0], &self.b_shares[0]);
        ((a.rows(), a.cols()), (b.rows(), b.cols()))
    }

    pub fn shares(&self, worker: usize) -> (&Matrix, &Matrix) {
        (&self.a_shares[worker], &self.b_shares[worker])
    }

    /// What worker `i` returns: the product of its two shares.
    pub fn worker_output(&self, worker: usize) -> Result<Matrix> {
        self.a_shares[worker].mul(&self.b_shares[worker])
    }

    /// Interpolates the product polynomial entry-wise from the responses and
    /// assembles `AB`. Surplus responses are checked for consistency.
    pub fn decode(&self, responses: &[(usize, Matrix)]) -> Result<Matrix> {
        self.decode_with_degree(responses, self.degree)
            .and_then(|coeffs| self.assemble(&coeffs))
    }

    /// Coefficients (as matrices) of the unique product polynomial of degree
    /// at most `degree` through the responses.
    pub fn decode_with_degree(&self, responses: &[(usize, Matrix)], degree: usize) -> Result<Vec<Matrix>> {
        if let Some((i, _)) = responses.iter().find(|(i, _)| *i >= self.workers) {
            return Err(Error::usage(format!("response from unknown worker {i}")));
        }
        let (rows, cols) = match responses.first() {
            Some((_, m)) => (m.rows(), m.cols()),
            None => {
                return Err(Error::InsufficientResponses {
                    needed: degree + 1,
                    got: 0,
                })
            }
        };
        let samples: Vec<(FieldElem, Vec<FieldElem>)> = responses
            .iter()
            .sorted_by_key(|r| r.0)
            .map(|(i, m)| (self.anchors[*i], m.entries().to_vec()))
            .collect();
        let curve = interpolate(self.field, &samples, degree)?;
        (0..=degree)
            .map(|p| {
                let entries = curve
                    .coeffs()
                    .get(p)
                    .cloned()
                    .unwrap_or_else(|| self.field.zeros(rows * cols));
                Matrix::from_entries(self.field, rows, cols, entries)
            })
            .collect()
    }

    fn assemble(&self, coeffs: &[Matrix]) -> Result<Matrix> {
        match self.scheme {
            MatmulScheme::Polynomial => {
                let (t, e) = (self.t, self.n / self.t);
                let mut out = Matrix::zeros(self.field, self.n, self.n);
                for (i, j) in (0..t).cartesian_product(0..t) {
                    out.set_block(i * e, j * e, &coeffs[i + j * t]);
                }
                Ok(out)
            }
            MatmulScheme::MatDot => Ok(coeffs[self.t - 1].clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatmulReport {
    pub scheme: MatmulScheme,
    pub modulus: PrimeField,
    pub n: usize,
    pub t: usize,
    pub s: usize,
    pub workers: usize,
    pub patterns_tested: usize,
    /// Straggler sets for which decoding failed or returned a wrong product.
    pub failures: Vec<Vec<usize>>,
    pub verified: bool,
}

/// Decodes under every straggler set of size at most `s` and compares with
/// the direct product.
pub fn verify_all_patterns(plan: &MatmulPlan, a: &Matrix, b: &Matrix) -> Result<MatmulReport> {
    let truth = a.mul(b)?;
    let outputs = (0..plan.workers)
        .into_par_iter()
        .map(|i| plan.worker_output(i))
        .collect::<Result<Vec<_>>>()?;
    let patterns: Vec<Vec<usize>> = (0..=plan.s).flat_map(|k| (0..plan.workers).combinations(k)).collect();
    let failures: Vec<Vec<usize>> = patterns
        .par_iter()
        .filter(|drops| {
            let got: Vec<(usize, Matrix)> = (0..plan.workers)
                .filter(|i| !drops.contains(i))
                .map(|i| (i, outputs[i].clone()))
                .collect();
            plan.decode(&got).map_or(true, |m| m != truth)
        })
        .cloned()
        .collect();
    Ok(MatmulReport {
        scheme: plan.scheme,
        modulus: plan.field,
        n: plan.n,
        t: plan.t,
        s: plan.s,
        workers: plan.workers,
        patterns_tested: patterns.len(),
        verified: failures.is_empty(),
        failures,
    })
}
