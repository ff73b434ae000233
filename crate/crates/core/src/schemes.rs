//! Query planners and decoders.
//!
//! Every planner returns a [`QueryPlan`]: one evaluation point per worker plus
//! the metadata [`decode`] needs to recover `f(X_1), ..., f(X_k)` from any
//! `w - s` responses of which at most `b` are wrong.
//!
//! All curve-based schemes share one decoding path. Worker `i` is tied to an
//! anchor `z_i` and a factor `c_i` such that `c_i * f(query_i) = h(z_i)` for a
//! univariate `h` of known degree; output `j` is `e_j * h(beta_j)`.

use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldElem, PrimeField};
use crate::poly::{berlekamp_welch, univariate, Curve, MultiPoly};
use crate::structure::{self, CurveFit, Dependency, LineStructure, Mode};
use crate::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeTag {
    Replication,
    Lcc,
    CurveDirect,
    Homogeneous,
    #[serde(rename = "nonhomogeneous")]
    NonHomogeneous,
    Intersecting,
    Composite,
}

impl fmt::Display for SchemeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SchemeTag::Replication => "replication",
            SchemeTag::Lcc => "lcc",
            SchemeTag::CurveDirect => "curve_direct",
            SchemeTag::Homogeneous => "homogeneous",
            SchemeTag::NonHomogeneous => "nonhomogeneous",
            SchemeTag::Intersecting => "intersecting",
            SchemeTag::Composite => "composite",
        };
        f.write_str(name)
    }
}

/// Decoding data for one curve: `query_factors[i] * response_i` is the sample
/// of `h` at `query_anchors[i]`, and input `outputs[j]` evaluates to
/// `output_factors[j] * h(output_anchors[j])`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveMeta {
    pub curve: Curve,
    pub degree_bound: usize,
    pub query_anchors: Vec<FieldElem>,
    pub query_factors: Vec<FieldElem>,
    pub output_anchors: Vec<FieldElem>,
    pub output_factors: Vec<FieldElem>,
    pub outputs: Vec<usize>,
}

/// One of the two query groups of the intersecting scheme. Queries
/// `first_query .. first_query + meta.query_anchors.len()` belong to it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveGroup {
    pub first_query: usize,
    pub meta: CurveMeta,
    /// Parameter of the crossing point on this group's curve.
    pub crossing: FieldElem,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubPlan {
    /// Input index (in the parent plan) of each sub-plan input.
    pub inputs: Vec<usize>,
    pub first_query: usize,
    pub plan: QueryPlan,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecodeMeta {
    Replication {
        group_size: usize,
    },
    Curve(CurveMeta),
    Homogeneous {
        curve: CurveMeta,
        dependency: Dependency,
        lambdas: Vec<FieldElem>,
    },
    #[serde(rename = "nonhomogeneous")]
    NonHomogeneous {
        curve: CurveMeta,
        dependency: Dependency,
        lambdas: Vec<FieldElem>,
        /// First coordinate of the homogenized query point behind each worker.
        r: Vec<FieldElem>,
    },
    Intersecting {
        first: CurveGroup,
        second: CurveGroup,
    },
    Composite {
        mode: Mode,
        parts: Vec<SubPlan>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QueryPlan {
    pub scheme: SchemeTag,
    pub modulus: PrimeField,
    pub k: usize,
    pub degree: u32,
    pub s: usize,
    pub b: usize,
    pub workers: usize,
    pub baseline_oblivious: usize,
    pub queries: Vec<Point>,
    pub meta: DecodeMeta,
}

impl QueryPlan {
    fn new(
        scheme: SchemeTag,
        f: &MultiPoly,
        k: usize,
        s: usize,
        b: usize,
        queries: Vec<Point>,
        meta: DecodeMeta,
    ) -> Self {
        let degree = f.total_degree();
        QueryPlan {
            scheme,
            modulus: f.field(),
            k,
            degree,
            s,
            b,
            workers: queries.len(),
            baseline_oblivious: baseline_oblivious(k, degree as usize, s, b),
            queries,
            meta,
        }
    }

    pub fn field(&self) -> PrimeField {
        self.modulus
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecodeResult {
    pub outputs: Vec<Point>,
    pub used_responses: Vec<usize>,
}

/// `min(k(s+2b+1), (k-1)d + s+2b+1)`, the best input-oblivious worker count.
pub fn baseline_oblivious(k: usize, d: usize, s: usize, b: usize) -> usize {
    let t = s + 2 * b + 1;
    (k * t).min(k.saturating_sub(1) * d + t)
}

fn check_inputs(f: &MultiPoly, x: &[Point]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::usage("at least one input point is required"));
    }
    for (i, p) in x.iter().enumerate() {
        if p.len() != f.m() {
            return Err(Error::usage(format!(
                "input {i} has dimension {}, the function takes {}",
                p.len(),
                f.m()
            )));
        }
        if let Some(v) = p.iter().find(|v| v.field() != f.field()) {
            return Err(Error::FieldMismatch(v.field().modulus(), f.field().modulus()));
        }
    }
    Ok(())
}

fn check_dependency(x: &[Point], dep: &Dependency, mode: Mode) -> Result<()> {
    if dep.len() < 2 || dep.indices.iter().copied().sorted().ne(0..x.len()) {
        return Err(Error::usage("the dependency must cover every input point exactly once"));
    }
    if !dep.verify(x, mode) {
        return Err(Error::usage("the dependency does not hold for these inputs"));
    }
    Ok(())
}

fn ones(field: PrimeField, n: usize) -> Vec<FieldElem> {
    vec![field.one(); n]
}

/// Each input queried `s + 2b + 1` times; decoded by majority per group.
pub fn plan_replication(f: &MultiPoly, x: &[Point], s: usize, b: usize) -> Result<QueryPlan> {
    check_inputs(f, x)?;
    let group_size = s + 2 * b + 1;
    let queries = x
        .iter()
        .flat_map(|p| std::iter::repeat_n(p.clone(), group_size))
        .collect();
    Ok(QueryPlan::new(
        SchemeTag::Replication,
        f,
        x.len(),
        s,
        b,
        queries,
        DecodeMeta::Replication { group_size },
    ))
}

/// Lagrange coded computing: a degree `k-1` curve through the inputs at
/// anchors `0..k`, queried at `0..w`. Falls back to replication when that is
/// strictly cheaper.
pub fn plan_lcc(f: &MultiPoly, x: &[Point], s: usize, b: usize) -> Result<QueryPlan> {
    check_inputs(f, x)?;
    let field = f.field();
    let (k, d, t) = (x.len(), f.total_degree() as usize, s + 2 * b + 1);
    let w = (k - 1) * d + t;
    if k * t < w {
        return plan_replication(f, x, s, b);
    }
    let n = w.max(k);
    field.require_size(n as u64)?;
    let anchors = field.enumerate(n)?;
    let curve = Curve::through(field, &anchors[..k], x)?;
    let queries = anchors[..w].iter().map(|z| curve.eval(*z)).collect();
    let meta = CurveMeta {
        curve,
        degree_bound: (k - 1) * d,
        query_anchors: anchors[..w].to_vec(),
        query_factors: ones(field, w),
        output_anchors: anchors[..k].to_vec(),
        output_factors: ones(field, k),
        outputs: (0..k).collect(),
    };
    Ok(QueryPlan::new(
        SchemeTag::Lcc,
        f,
        k,
        s,
        b,
        queries,
        DecodeMeta::Curve(meta),
    ))
}

/// Queries a given curve through all inputs: `w = d deg(curve) + s + 2b + 1`.
pub fn plan_curve_direct(f: &MultiPoly, x: &[Point], fit: &CurveFit, s: usize, b: usize) -> Result<QueryPlan> {
    check_inputs(f, x)?;
    let field = f.field();
    if fit.indices.iter().copied().sorted().ne(0..x.len()) || !fit.verify(x) {
        return Err(Error::usage(
            "the curve does not pass through every input at its anchor",
        ));
    }
    if fit.curve.dim() != f.m() {
        return Err(Error::usage("curve dimension differs from the function's input arity"));
    }
    let d = f.total_degree() as usize;
    let degree_bound = d * fit.curve.degree();
    let w = degree_bound + s + 2 * b + 1;
    field.require_size(w as u64)?;
    let anchors = field.enumerate(w)?;
    let queries = anchors.iter().map(|z| fit.curve.eval(*z)).collect();
    let meta = CurveMeta {
        curve: fit.curve.clone(),
        degree_bound,
        query_anchors: anchors,
        query_factors: ones(field, w),
        output_anchors: fit.anchors.clone(),
        output_factors: ones(field, fit.indices.len()),
        outputs: fit.indices.clone(),
    };
    Ok(QueryPlan::new(
        SchemeTag::CurveDirect,
        f,
        x.len(),
        s,
        b,
        queries,
        DecodeMeta::Curve(meta),
    ))
}

/// The curve `p*(z) = sum_{i<k} a_i X_i prod_{j<k, j != i} (z - b_j) / (b_k - b_j)`
/// of degree `k - 2`, which passes through `X_k` at `b_k` and through
/// `lambda_i X_i` at `b_i`. Returns the curve and `lambda_1, ..., lambda_k`
/// (with `lambda_k = 1`).
fn dependency_curve(
    field: PrimeField,
    points: &[Point],
    coeffs: &[FieldElem],
    anchors: &[FieldElem],
) -> Result<(Curve, Vec<FieldElem>)> {
    let k = points.len();
    let last = k - 1;
    let dim = points[0].len();
    let mut curve_coeffs = vec![field.zeros(dim); last.max(1)];
    let mut lambdas = Vec::with_capacity(k);
    for i in 0..last {
        let mut basis = vec![field.one()];
        let mut denom = field.one();
        let mut at_own_anchor = field.one();
        for j in (0..last).filter(|&j| j != i) {
            basis = univariate::mul_linear(field, &basis, anchors[j]);
            denom *= anchors[last] - anchors[j];
            at_own_anchor *= anchors[i] - anchors[j];
        }
        let scale = coeffs[i] * denom.inv()?;
        lambdas.push(scale * at_own_anchor);
        for (c, bc) in curve_coeffs.iter_mut().zip(&basis) {
            let w = scale * *bc;
            for (a, xi) in c.iter_mut().zip(&points[i]) {
                *a += w * *xi;
            }
        }
    }
    lambdas.push(field.one());
    let curve = Curve::from_coeffs(field, dim, curve_coeffs)?;
    debug_assert!((0..k).all(|i| {
        let expect: Point = points[i].iter().map(|v| lambdas[i] * *v).collect();
        curve.eval(anchors[i]) == expect
    }));
    Ok((curve, lambdas))
}

/// Homogeneous `f` and a minimal dependency `sum a_i X_i = X_k` over all
/// inputs: `w = (k-2) d + s + 2b + 1`. The first `k` queries are the inputs
/// themselves, in dependency order.
pub fn plan_homogeneous(f: &MultiPoly, x: &[Point], dep: &Dependency, s: usize, b: usize) -> Result<QueryPlan> {
    check_inputs(f, x)?;
    if !f.is_homogeneous() {
        return Err(Error::usage("the homogeneous scheme requires a homogeneous polynomial"));
    }
    if x.iter().any(|p| p.iter().all(FieldElem::is_zero)) {
        return Err(Error::usage("the homogeneous scheme requires nonzero input points"));
    }
    check_dependency(x, dep, Mode::Homogeneous)?;
    let field = f.field();
    let (k, d) = (dep.len(), f.total_degree() as usize);
    let w = (k - 2) * d + s + 2 * b + 1;
    let n = w.max(k);
    field.require_size(n as u64)?;
    let anchors = field.enumerate(n)?;
    let ordered: Vec<Point> = dep.indices.iter().map(|&i| x[i].clone()).collect();
    let (curve, lambdas) = dependency_curve(field, &ordered, &dep.coeffs, &anchors[..k])?;
    let queries = (0..w)
        .map(|j| {
            if j < k {
                ordered[j].clone()
            } else {
                curve.eval(anchors[j])
            }
        })
        .collect();
    let query_factors = (0..w)
        .map(|j| if j < k { lambdas[j].pow(d as u64) } else { field.one() })
        .collect();
    let output_factors = lambdas.iter().map(|l| l.pow(d as u64).inv()).collect::<Result<_>>()?;
    let meta = CurveMeta {
        curve,
        degree_bound: (k - 2) * d,
        query_anchors: anchors[..w].to_vec(),
        query_factors,
        output_anchors: anchors[..k].to_vec(),
        output_factors,
        outputs: dep.indices.clone(),
    };
    Ok(QueryPlan::new(
        SchemeTag::Homogeneous,
        f,
        k,
        s,
        b,
        queries,
        DecodeMeta::Homogeneous {
            curve: meta,
            dependency: dep.clone(),
            lambdas,
        },
    ))
}

/// Any `f` and a minimal dependency among the lifted points `(1, X_i)`.
///
/// The homogeneous construction runs on the homogenization `f'` with anchors
/// whose curve point `(r, X*)` has `r != 0`; the worker is asked for
/// `f(X* / r)` and the sample is `r^d f(X* / r) = f'(r, X*)`.
pub fn plan_nonhomogeneous(f: &MultiPoly, x: &[Point], dep: &Dependency, s: usize, b: usize) -> Result<QueryPlan> {
    check_inputs(f, x)?;
    check_dependency(x, dep, Mode::Affine)?;
    let field = f.field();
    let (k, d) = (dep.len(), f.total_degree() as usize);
    let w = (k - 2) * d + s + 2 * b + 1;
    let required = ((k - 2) * (d + 1) + s + 2 * b + 1).max(k);
    field.require_size(required as u64)?;
    let lifted: Vec<Point> = dep
        .indices
        .iter()
        .map(|&i| structure::lift(&x[i], Mode::Affine))
        .collect();
    let base = field.enumerate(k)?;
    let (curve, lambdas) = dependency_curve(field, &lifted, &dep.coeffs, &base)?;

    let mut query_anchors = base[..k.min(w)].to_vec();
    let mut z = k as u64;
    while query_anchors.len() < w {
        let anchor = field.elem(z);
        if !curve.eval(anchor)[0].is_zero() {
            query_anchors.push(anchor);
        }
        z += 1;
    }
    let mut queries = Vec::with_capacity(w);
    let mut r = Vec::with_capacity(w);
    let mut query_factors = Vec::with_capacity(w);
    for (j, anchor) in query_anchors.iter().enumerate() {
        if j < k {
            // The curve passes through lambda_j (1, X_j) here.
            queries.push(x[dep.indices[j]].clone());
            r.push(lambdas[j]);
        } else {
            let p = curve.eval(*anchor);
            let inv = p[0].inv()?;
            queries.push(p[1..].iter().map(|v| *v * inv).collect());
            r.push(p[0]);
        }
        query_factors.push(r[j].pow(d as u64));
    }
    let output_factors = lambdas.iter().map(|l| l.pow(d as u64).inv()).collect::<Result<_>>()?;
    let meta = CurveMeta {
        curve,
        degree_bound: (k - 2) * d,
        query_anchors,
        query_factors,
        output_anchors: base,
        output_factors,
        outputs: dep.indices.clone(),
    };
    Ok(QueryPlan::new(
        SchemeTag::NonHomogeneous,
        f,
        k,
        s,
        b,
        queries,
        DecodeMeta::NonHomogeneous {
            curve: meta,
            dependency: dep.clone(),
            lambdas,
            r,
        },
    ))
}

/// Two crossing lines through disjoint pairs of inputs.
pub fn plan_intersecting(f: &MultiPoly, x: &[Point], lines: &LineStructure, s: usize, b: usize) -> Result<QueryPlan> {
    match lines {
        LineStructure::Crossing {
            first,
            second,
            first_param,
            second_param,
        } => plan_crossing_curves(f, x, first, second, *first_param, *second_param, s, b),
        LineStructure::Collinear(_) => Err(Error::usage(
            "the intersecting scheme needs crossing lines; use the direct curve scheme for collinear inputs",
        )),
    }
}

/// Two curves covering all inputs that meet at `first(z1) = second(z2)`.
///
/// Group `j` gets `d deg_j + s + 2b` queries (one more for the first group
/// when `s = 0`). Whichever group decodes first supplies `f` at the crossing
/// as an extra sample for the other.
#[allow(clippy::too_many_arguments)]
pub fn plan_crossing_curves(
    f: &MultiPoly,
    x: &[Point],
    first: &CurveFit,
    second: &CurveFit,
    z1: FieldElem,
    z2: FieldElem,
    s: usize,
    b: usize,
) -> Result<QueryPlan> {
    check_inputs(f, x)?;
    let field = f.field();
    if first
        .indices
        .iter()
        .chain(&second.indices)
        .copied()
        .sorted()
        .ne(0..x.len())
    {
        return Err(Error::usage("the two curves must partition the inputs"));
    }
    if !first.verify(x) || !second.verify(x) {
        return Err(Error::usage("a curve does not pass through its inputs"));
    }
    if first.curve.eval(z1) != second.curve.eval(z2) {
        return Err(Error::usage("the curves do not meet at the stated parameters"));
    }
    if first.anchors.contains(&z1) || second.anchors.contains(&z2) {
        return Err(Error::usage("the crossing point must not be an input"));
    }
    let d = f.total_degree() as usize;
    let bounds = [d * first.curve.degree(), d * second.curve.degree()];
    let sizes = [bounds[0] + s + 2 * b + usize::from(s == 0), bounds[1] + s + 2 * b];
    field.require_size((sizes[0].max(sizes[1]) + 1) as u64)?;
    let mut queries = Vec::with_capacity(sizes[0] + sizes[1]);
    let mut groups = Vec::with_capacity(2);
    for (g, (fit, crossing)) in [(first, z1), (second, z2)].into_iter().enumerate() {
        let anchors: Vec<FieldElem> = field
            .enumerate(sizes[g] + 1)?
            .into_iter()
            .filter(|z| *z != crossing)
            .take(sizes[g])
            .collect();
        let first_query = queries.len();
        queries.extend(anchors.iter().map(|z| fit.curve.eval(*z)));
        groups.push(CurveGroup {
            first_query,
            crossing,
            meta: CurveMeta {
                curve: fit.curve.clone(),
                degree_bound: bounds[g],
                query_factors: ones(field, anchors.len()),
                query_anchors: anchors,
                output_anchors: fit.anchors.clone(),
                output_factors: ones(field, fit.indices.len()),
                outputs: fit.indices.clone(),
            },
        });
    }
    let second = groups.pop().unwrap();
    let first = groups.pop().unwrap();
    Ok(QueryPlan::new(
        SchemeTag::Intersecting,
        f,
        x.len(),
        s,
        b,
        queries,
        DecodeMeta::Intersecting { first, second },
    ))
}

/// Partitions the inputs into minimal dependent sets (among the points for
/// homogeneous `f`, among their lifts otherwise) and plans each set with the
/// matching dependency scheme, or with replication when that is strictly
/// cheaper. The remaining independent points are replicated. Every sub-plan
/// tolerates the full `(s, b)`.
pub fn plan_composite(f: &MultiPoly, x: &[Point], s: usize, b: usize) -> Result<QueryPlan> {
    check_inputs(f, x)?;
    let homogeneous = f.is_homogeneous();
    let mode = if homogeneous { Mode::Homogeneous } else { Mode::Affine };
    let eligible: Vec<usize> = (0..x.len())
        .filter(|&i| mode == Mode::Affine || x[i].iter().any(|v| !v.is_zero()))
        .collect();
    let sub: Vec<Point> = eligible.iter().map(|&i| x[i].clone()).collect();
    let partition = structure::partition_minimal_dependent(&sub, mode)?;
    let mut leftovers: Vec<usize> = partition.leftovers.iter().map(|&i| eligible[i]).collect();
    leftovers.extend((0..x.len()).filter(|i| !eligible.contains(i)));
    leftovers.sort_unstable();

    let (d, t) = (f.total_degree() as usize, s + 2 * b + 1);
    let mut parts = Vec::new();
    let mut queries = Vec::new();
    let mut push = |inputs: Vec<usize>, plan: QueryPlan, queries: &mut Vec<Point>| {
        let first_query = queries.len();
        queries.extend(plan.queries.iter().cloned());
        parts.push(SubPlan {
            inputs,
            first_query,
            plan,
        });
    };
    for dep in &partition.dependent_sets {
        let inputs: Vec<usize> = dep.indices.iter().map(|&i| eligible[i]).collect();
        let sub_x: Vec<Point> = inputs.iter().map(|&i| x[i].clone()).collect();
        let local = Dependency {
            indices: (0..inputs.len()).collect(),
            coeffs: dep.coeffs.clone(),
        };
        let dependency_w = (inputs.len() - 2) * d + t;
        let plan = if dependency_w <= inputs.len() * t {
            if homogeneous {
                plan_homogeneous(f, &sub_x, &local, s, b)?
            } else {
                plan_nonhomogeneous(f, &sub_x, &local, s, b)?
            }
        } else {
            plan_replication(f, &sub_x, s, b)?
        };
        push(inputs, plan, &mut queries);
    }
    if !leftovers.is_empty() {
        let sub_x: Vec<Point> = leftovers.iter().map(|&i| x[i].clone()).collect();
        let plan = plan_replication(f, &sub_x, s, b)?;
        push(leftovers, plan, &mut queries);
    }
    Ok(QueryPlan::new(
        SchemeTag::Composite,
        f,
        x.len(),
        s,
        b,
        queries,
        DecodeMeta::Composite { mode, parts },
    ))
}

/// Recovers `f(X_1), ..., f(X_k)` from `(worker index, response)` pairs.
pub fn decode(plan: &QueryPlan, responses: &[(usize, Point)]) -> Result<DecodeResult> {
    let mut sorted = responses.to_vec();
    sorted.sort_by_key(|r| r.0);
    if let Some((a, _)) = sorted.iter().tuple_windows().find(|(a, b)| a.0 == b.0) {
        return Err(Error::usage(format!("duplicate response from worker {}", a.0)));
    }
    if let Some((i, _)) = sorted.iter().find(|r| r.0 >= plan.workers) {
        return Err(Error::usage(format!("response from unknown worker {i}")));
    }
    let needed = plan.workers.saturating_sub(plan.s);
    if sorted.len() < needed {
        return Err(Error::InsufficientResponses {
            needed,
            got: sorted.len(),
        });
    }
    let field = plan.field();
    let placed = match &plan.meta {
        DecodeMeta::Replication { group_size } => decode_replication(plan.k, *group_size, &sorted)?,
        DecodeMeta::Curve(meta)
        | DecodeMeta::Homogeneous { curve: meta, .. }
        | DecodeMeta::NonHomogeneous { curve: meta, .. } => decode_curve(field, meta, &sorted, plan.b, None)?,
        DecodeMeta::Intersecting { first, second } => decode_intersecting(field, first, second, &sorted, plan.b)?,
        DecodeMeta::Composite { parts, .. } => {
            let mut out = Vec::with_capacity(plan.k);
            for part in parts {
                let end = part.first_query + part.plan.workers;
                let local: Vec<(usize, Point)> = sorted
                    .iter()
                    .filter(|(i, _)| (part.first_query..end).contains(i))
                    .map(|(i, y)| (i - part.first_query, y.clone()))
                    .collect();
                let res = decode(&part.plan, &local)?;
                out.extend(part.inputs.iter().copied().zip(res.outputs));
            }
            out
        }
    };
    let mut outputs: Vec<Option<Point>> = vec![None; plan.k];
    for (i, y) in placed {
        outputs[i] = Some(y);
    }
    let outputs = outputs
        .into_iter()
        .enumerate()
        .map(|(i, y)| y.ok_or_else(|| Error::decoding(format!("no output decoded for input {i}"))))
        .collect::<Result<_>>()?;
    Ok(DecodeResult {
        outputs,
        used_responses: sorted.iter().map(|r| r.0).collect(),
    })
}

fn decode_replication(k: usize, group_size: usize, responses: &[(usize, Point)]) -> Result<Vec<(usize, Point)>> {
    (0..k)
        .map(|g| {
            let range = g * group_size..(g + 1) * group_size;
            let votes = responses
                .iter()
                .filter(|(i, _)| range.contains(i))
                .map(|r| &r.1)
                .counts();
            let total: usize = votes.values().sum();
            if total == 0 {
                return Err(Error::InsufficientResponses { needed: 1, got: 0 });
            }
            votes
                .into_iter()
                .find(|(_, c)| 2 * c > total)
                .map(|(y, _)| (g, y.clone()))
                .ok_or_else(|| Error::decoding(format!("no strict majority among replicas of input {g}")))
        })
        .collect()
}

/// `responses` are indexed relative to the curve's first query; `extra` is a
/// sample of `h` known from elsewhere.
fn decode_curve(
    field: PrimeField,
    meta: &CurveMeta,
    responses: &[(usize, Point)],
    b: usize,
    extra: Option<(FieldElem, Point)>,
) -> Result<Vec<(usize, Point)>> {
    let h = curve_samples_decode(field, meta, responses, b, extra)?;
    Ok(curve_outputs(meta, &h))
}

fn curve_samples_decode(
    field: PrimeField,
    meta: &CurveMeta,
    responses: &[(usize, Point)],
    b: usize,
    extra: Option<(FieldElem, Point)>,
) -> Result<Curve> {
    let mut samples: Vec<(FieldElem, Point)> = responses
        .iter()
        .map(|(i, y)| {
            let c = meta.query_factors[*i];
            (meta.query_anchors[*i], y.iter().map(|v| c * *v).collect())
        })
        .collect();
    samples.extend(extra);
    berlekamp_welch(field, &samples, meta.degree_bound, b)
}

fn curve_outputs(meta: &CurveMeta, h: &Curve) -> Vec<(usize, Point)> {
    meta.outputs
        .iter()
        .zip(&meta.output_anchors)
        .zip(&meta.output_factors)
        .map(|((&i, z), e)| (i, h.eval(*z).into_iter().map(|v| *e * v).collect()))
        .collect()
}

fn decode_intersecting(
    field: PrimeField,
    first: &CurveGroup,
    second: &CurveGroup,
    responses: &[(usize, Point)],
    b: usize,
) -> Result<Vec<(usize, Point)>> {
    let split = |g: &CurveGroup| -> Vec<(usize, Point)> {
        let range = g.first_query..g.first_query + g.meta.query_anchors.len();
        responses
            .iter()
            .filter(|(i, _)| range.contains(i))
            .map(|(i, y)| (i - g.first_query, y.clone()))
            .collect()
    };
    let (r1, r2) = (split(first), split(second));
    let ready = |g: &CurveGroup, r: &[(usize, Point)]| r.len() > g.meta.degree_bound + 2 * b;
    let ((a, ra), (c, rc)) = if ready(first, &r1) {
        ((first, r1), (second, r2))
    } else if ready(second, &r2) {
        ((second, r2), (first, r1))
    } else {
        return Err(Error::InsufficientResponses {
            needed: (first.meta.degree_bound + 2 * b + 1).min(second.meta.degree_bound + 2 * b + 1),
            got: r1.len().max(r2.len()),
        });
    };
    let ha = curve_samples_decode(field, &a.meta, &ra, b, None)?;
    let meet = ha.eval(a.crossing);
    let hc = curve_samples_decode(field, &c.meta, &rc, b, Some((c.crossing, meet)))?;
    let mut out = curve_outputs(&a.meta, &ha);
    out.extend(curve_outputs(&c.meta, &hc));
    Ok(out)
}
