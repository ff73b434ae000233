//! Discovery of exploitable structure in a set of input points: minimal
//! linear dependencies, greedy partitions into dependent sets, sparse
//! dependencies in large point sets, and collinear or crossing lines.
//!
//! Ties are always broken towards the lowest input indices.

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldElem, PrimeField};
use crate::linalg;
use crate::poly::Curve;
use crate::Point;

/// Whether dependencies are sought among the points themselves or among
/// their homogenizing lifts `(1, X)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Homogeneous,
    Affine,
}

/// `sum_i coeffs[i] * X[indices[i]] = X[indices[last]]` (on lifted points in
/// affine mode), with every coefficient nonzero and no proper subset of the
/// points dependent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Dependency {
    pub indices: Vec<usize>,
    pub coeffs: Vec<FieldElem>,
}

impl Dependency {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Index of the point expressed by the others.
    pub fn target(&self) -> usize {
        *self.indices.last().expect("a dependency has at least two points")
    }

    /// Checks the linear identity exactly.
    pub fn verify(&self, points: &[Point], mode: Mode) -> bool {
        if self.indices.len() < 2
            || self.coeffs.len() + 1 != self.indices.len()
            || self.indices.iter().any(|&i| i >= points.len())
            || self.coeffs.iter().any(FieldElem::is_zero)
            || self.indices.iter().duplicates().next().is_some()
        {
            return false;
        }
        let lifted: Vec<Point> = self.indices.iter().map(|&i| lift(&points[i], mode)).collect();
        let field = self.coeffs[0].field();
        let mut acc = field.zeros(lifted[0].len());
        for (c, x) in self.coeffs.iter().zip(&lifted) {
            for (a, xi) in acc.iter_mut().zip(x) {
                *a += *c * *xi;
            }
        }
        acc == *lifted.last().unwrap()
    }

    fn reindex(self, map: &[usize]) -> Dependency {
        Dependency {
            indices: self.indices.into_iter().map(|i| map[i]).collect(),
            coeffs: self.coeffs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub dependent_sets: Vec<Dependency>,
    pub leftovers: Vec<usize>,
    pub mode: Mode,
}

/// `(1, X)` in affine mode, `X` otherwise.
pub fn lift(x: &[FieldElem], mode: Mode) -> Point {
    match mode {
        Mode::Homogeneous => x.to_vec(),
        Mode::Affine => {
            let field = x.first().map(FieldElem::field);
            let one = field.map(|f| f.one());
            let mut v = Vec::with_capacity(x.len() + 1);
            // A zero-dimensional point has no field to draw 1 from; callers
            // never construct one, but keep the lift total.
            if let Some(one) = one {
                v.push(one);
            }
            v.extend_from_slice(x);
            v
        }
    }
}

fn field_of(points: &[Point]) -> Result<PrimeField> {
    points
        .iter()
        .flat_map(|p| p.first())
        .map(FieldElem::field)
        .next()
        .ok_or_else(|| Error::usage("points must be non-empty vectors"))
}

fn check_dims(points: &[Point]) -> Result<usize> {
    let m = points.first().map_or(0, Vec::len);
    if m == 0 || points.iter().any(|p| p.len() != m) {
        return Err(Error::usage("all points must share a positive dimension"));
    }
    Ok(m)
}

fn reject_zero(points: &[Point]) -> Result<()> {
    if let Some(i) = points.iter().position(|p| p.iter().all(FieldElem::is_zero)) {
        return Err(Error::usage(format!("input point {i} is the zero vector")));
    }
    Ok(())
}

/// Inserts points in index order into an incrementally reduced basis and
/// stops at the first point that reduces to zero. Its expression over the
/// (independent) basis points is unique, so its support is a minimal
/// dependent set.
pub fn find_minimal_dependency(points: &[Point], mode: Mode) -> Result<Option<Dependency>> {
    if points.is_empty() {
        return Ok(None);
    }
    check_dims(points)?;
    if mode == Mode::Homogeneous {
        reject_zero(points)?;
    }
    let field = field_of(points)?;
    let k = points.len();
    // Each basis row: reduced vector with a unit pivot, and the combination
    // of original points that produces it.
    let mut basis: Vec<(usize, Point, Vec<FieldElem>)> = Vec::new();
    for (i, x) in points.iter().enumerate() {
        let mut v = lift(x, mode);
        let mut combo = field.zeros(k);
        combo[i] = field.one();
        for (pivot, row, row_combo) in &basis {
            let c = v[*pivot];
            if c.is_zero() {
                continue;
            }
            for (a, b) in v.iter_mut().zip(row) {
                *a -= c * *b;
            }
            for (a, b) in combo.iter_mut().zip(row_combo) {
                *a -= c * *b;
            }
        }
        match v.iter().position(|e| !e.is_zero()) {
            Some(pivot) => {
                let inv = v[pivot].inv()?;
                v.iter_mut().for_each(|e| *e *= inv);
                combo.iter_mut().for_each(|e| *e *= inv);
                basis.push((pivot, v, combo));
            }
            None => {
                // sum_j combo[j] X_j = 0 with combo[i] = 1.
                let (indices, coeffs): (Vec<usize>, Vec<FieldElem>) =
                    (0..i).filter(|&j| !combo[j].is_zero()).map(|j| (j, -combo[j])).unzip();
                let mut indices = indices;
                indices.push(i);
                return Ok(Some(Dependency { indices, coeffs }));
            }
        }
    }
    Ok(None)
}

/// Greedily peels minimal dependent sets off the remaining points until the
/// rest is independent.
pub fn partition_minimal_dependent(points: &[Point], mode: Mode) -> Result<Partition> {
    let mut remaining: Vec<usize> = (0..points.len()).collect();
    let mut dependent_sets = Vec::new();
    loop {
        let subset: Vec<Point> = remaining.iter().map(|&i| points[i].clone()).collect();
        match find_minimal_dependency(&subset, mode)? {
            Some(dep) => {
                let dep = dep.reindex(&remaining);
                let used: BTreeSet<usize> = dep.indices.iter().copied().collect();
                remaining.retain(|i| !used.contains(i));
                dependent_sets.push(dep);
            }
            None => break,
        }
    }
    Ok(Partition {
        dependent_sets,
        leftovers: remaining,
        mode,
    })
}

/// Work limit for the collision search in [`find_sparse_dependency`].
pub const SPARSE_SEARCH_BUDGET: u128 = 10_000_000;

/// Finds a linearly dependent subset of at most `2e` points.
///
/// Elimination is tried first. If the dependency it finds is too large, all
/// combinations of `e` points with nonzero coefficients are hashed; two equal
/// combinations over different subsets give a dependency over their union.
pub fn find_sparse_dependency(points: &[Point], e: usize) -> Result<Option<Dependency>> {
    if e < 2 {
        return Err(Error::usage("sparse dependency search needs e >= 2"));
    }
    if points.is_empty() {
        return Ok(None);
    }
    check_dims(points)?;
    reject_zero(points)?;
    let field = field_of(points)?;
    let Some(dep) = find_minimal_dependency(points, Mode::Homogeneous)? else {
        return Ok(None);
    };
    if dep.len() <= 2 * e {
        return Ok(Some(dep));
    }

    let k = points.len();
    let q = field.modulus() as u128;
    let work = binomial(k as u128, e as u128).saturating_mul((q - 1).saturating_pow(e as u32));
    if e > 3 || work > SPARSE_SEARCH_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "collision search over C({k},{e}) * {}^{e} combinations",
            q - 1
        )));
    }

    let nonzero: Vec<FieldElem> = (1..field.modulus()).map(|v| field.elem(v)).collect();
    let mut seen: HashMap<Point, (Vec<usize>, Vec<FieldElem>)> = HashMap::new();
    for subset in (0..k).combinations(e) {
        let sub_points: Vec<Point> = subset.iter().map(|&i| points[i].clone()).collect();
        if let Some(inner) = find_minimal_dependency(&sub_points, Mode::Homogeneous)? {
            return Ok(Some(inner.reindex(&subset)));
        }
        for coeffs in (0..e).map(|_| nonzero.iter().copied()).multi_cartesian_product() {
            let mut v = field.zeros(points[0].len());
            for (c, &i) in coeffs.iter().zip(&subset) {
                for (a, x) in v.iter_mut().zip(&points[i]) {
                    *a += *c * *x;
                }
            }
            if let Some((other, other_coeffs)) = seen.get(&v) {
                // sum_I a_i X_i - sum_J b_j X_j = 0 with I != J.
                let mut combined: HashMap<usize, FieldElem> = HashMap::new();
                for (c, &i) in coeffs.iter().zip(&subset) {
                    *combined.entry(i).or_insert(field.zero()) += *c;
                }
                for (c, &j) in other_coeffs.iter().zip(other) {
                    *combined.entry(j).or_insert(field.zero()) -= *c;
                }
                let support: Vec<usize> = combined
                    .into_iter()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(i, _)| i)
                    .sorted()
                    .collect();
                let sub: Vec<Point> = support.iter().map(|&i| points[i].clone()).collect();
                let inner = find_minimal_dependency(&sub, Mode::Homogeneous)?
                    .expect("a nontrivial vanishing combination exists on the support");
                return Ok(Some(inner.reindex(&support)));
            }
            seen.insert(v, (subset.clone(), coeffs));
        }
    }
    Ok(None)
}

fn binomial(n: u128, r: u128) -> u128 {
    if r > n {
        return 0;
    }
    (0..r).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Points of the input lying on one curve, with the parameter of each.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveFit {
    pub indices: Vec<usize>,
    pub curve: Curve,
    pub anchors: Vec<FieldElem>,
}

impl CurveFit {
    pub fn verify(&self, points: &[Point]) -> bool {
        self.indices.len() == self.anchors.len()
            && self.anchors.iter().map(FieldElem::value).all_unique()
            && self
                .indices
                .iter()
                .zip(&self.anchors)
                .all(|(&i, z)| i < points.len() && self.curve.eval(*z) == points[i])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LineStructure {
    /// Three input points on one line.
    Collinear(CurveFit),
    /// Two lines, each through two input points, meeting at a point that is
    /// not an input: `first.curve(first_param) == second.curve(second_param)`.
    Crossing {
        first: CurveFit,
        second: CurveFit,
        first_param: FieldElem,
        second_param: FieldElem,
    },
}

impl LineStructure {
    pub fn verify(&self, points: &[Point]) -> bool {
        match self {
            LineStructure::Collinear(fit) => fit.indices.len() >= 3 && fit.curve.degree() <= 1 && fit.verify(points),
            LineStructure::Crossing {
                first,
                second,
                first_param,
                second_param,
            } => {
                let meet = first.curve.eval(*first_param);
                first.verify(points)
                    && second.verify(points)
                    && first.indices.iter().chain(&second.indices).all_unique()
                    && meet == second.curve.eval(*second_param)
                    && first.indices.iter().chain(&second.indices).all(|&i| points[i] != meet)
            }
        }
    }
}

/// Limits on the crossing search. The incidence table holds
/// `C(k,2) * (q-2)` line points; the pairwise solver handles `C(C(k,2),2)`
/// line pairs.
pub const MAX_LINE_POINTS: usize = 512;
pub const INCIDENCE_BUDGET: u128 = 5_000_000;
pub const PAIRWISE_BUDGET: u128 = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum CrossingSearch {
    Incidence,
    Pairwise,
}

/// Looks for three collinear input points, and failing that for two lines
/// through disjoint pairs of inputs that cross away from the inputs.
pub fn find_intersecting_lines(points: &[Point]) -> Result<Option<LineStructure>> {
    if points.len() < 3 {
        return Ok(None);
    }
    let k = points.len();
    if k > MAX_LINE_POINTS {
        return Err(Error::BudgetExceeded(format!(
            "line search limited to {MAX_LINE_POINTS} points, got {k}"
        )));
    }
    check_dims(points)?;
    if !points.iter().all_unique() {
        return Err(Error::usage("line search requires distinct points"));
    }
    let field = field_of(points)?;
    if let Some(fit) = find_collinear(field, points)? {
        return Ok(Some(LineStructure::Collinear(fit)));
    }
    if k < 4 {
        return Ok(None);
    }
    let lines = binomial(k as u128, 2);
    let strategy = if lines * (field.modulus() as u128 - 2) <= INCIDENCE_BUDGET {
        CrossingSearch::Incidence
    } else if binomial(lines, 2) <= PAIRWISE_BUDGET {
        CrossingSearch::Pairwise
    } else {
        return Err(Error::BudgetExceeded(format!(
            "crossing search over {k} points in {field} exceeds the work limit"
        )));
    };
    find_crossing(field, points, strategy)
}

/// The line through all of `points`, parametrized so that `points[0]` sits
/// at 0 and `points[1]` at 1, if they are collinear and distinct.
pub fn fit_line(points: &[Point]) -> Result<Option<CurveFit>> {
    if points.len() < 2 {
        return Ok(None);
    }
    check_dims(points)?;
    if !points.iter().all_unique() {
        return Ok(None);
    }
    let field = field_of(points)?;
    let mut fit = pair_fit(field, points, 0, 1)?;
    for (i, c) in points.iter().enumerate().skip(2) {
        match line_param(&points[0], &points[1], c) {
            Some(t) => {
                fit.indices.push(i);
                fit.anchors.push(t);
            }
            None => return Ok(None),
        }
    }
    Ok(Some(fit))
}

type Pair = (usize, usize);

/// Direction normalized to a leading 1, and the line point whose coordinate
/// at that position is zero.
fn canonical_line(a: &[FieldElem], b: &[FieldElem]) -> (Point, Point) {
    let mut dir: Point = a.iter().zip(b).map(|(x, y)| *y - *x).collect();
    let pivot = dir.iter().position(|e| !e.is_zero()).expect("distinct points");
    let inv = dir[pivot].inv().expect("nonzero pivot");
    dir.iter_mut().for_each(|e| *e *= inv);
    let t = a[pivot];
    let base = a.iter().zip(&dir).map(|(x, d)| *x - t * *d).collect();
    (base, dir)
}

/// Parameter `t` with `a + t (b - a) = c`, if `c` is on that line.
fn line_param(a: &[FieldElem], b: &[FieldElem], c: &[FieldElem]) -> Option<FieldElem> {
    let j = a.iter().zip(b).position(|(x, y)| x != y)?;
    let t = (c[j] - a[j]) * (b[j] - a[j]).inv().ok()?;
    a.iter()
        .zip(b)
        .zip(c)
        .all(|((x, y), z)| *x + t * (*y - *x) == *z)
        .then_some(t)
}

fn pair_fit(field: PrimeField, points: &[Point], i: usize, j: usize) -> Result<CurveFit> {
    Ok(CurveFit {
        indices: vec![i, j],
        curve: Curve::line(field, &points[i], &points[j])?,
        anchors: vec![field.zero(), field.one()],
    })
}

fn find_collinear(field: PrimeField, points: &[Point]) -> Result<Option<CurveFit>> {
    let mut lines: HashMap<(Point, Point), BTreeSet<usize>> = HashMap::new();
    for (i, j) in (0..points.len()).tuple_combinations() {
        let entry = lines.entry(canonical_line(&points[i], &points[j])).or_default();
        entry.insert(i);
        entry.insert(j);
    }
    let best = lines
        .values()
        .filter(|s| s.len() >= 3)
        .map(|s| s.iter().copied().take(3).collect::<Vec<_>>())
        .min();
    let Some(triple) = best else {
        return Ok(None);
    };
    let (a, b, c) = (triple[0], triple[1], triple[2]);
    let mut fit = pair_fit(field, points, a, b)?;
    let t = line_param(&points[a], &points[b], &points[c]).expect("third point is on the line");
    fit.indices.push(c);
    fit.anchors.push(t);
    Ok(Some(fit))
}

type CrossingKey = ([usize; 4], (usize, usize), (usize, usize));

fn crossing_key(p: (usize, usize), q: (usize, usize)) -> CrossingKey {
    let (lo, hi) = if p < q { (p, q) } else { (q, p) };
    let mut quad = [p.0, p.1, q.0, q.1];
    quad.sort_unstable();
    (quad, lo, hi)
}

fn find_crossing(field: PrimeField, points: &[Point], strategy: CrossingSearch) -> Result<Option<LineStructure>> {
    let k = points.len();
    // (key, first pair, t on first, second pair, u on second)
    let mut best: Option<(CrossingKey, FieldElem, FieldElem)> = None;
    let mut consider = |p: (usize, usize), t: FieldElem, q: (usize, usize), u: FieldElem| {
        let key = crossing_key(p, q);
        let (t, u) = if key.1 == p { (t, u) } else { (u, t) };
        if best.as_ref().is_none_or(|(b, _, _)| key < *b) {
            best = Some((key, t, u));
        }
    };
    match strategy {
        CrossingSearch::Incidence => {
            let params: Vec<FieldElem> = (2..field.modulus()).map(|z| field.elem(z)).collect();
            let mut hits: HashMap<Point, Vec<(Pair, FieldElem)>> = HashMap::new();
            for (i, j) in (0..k).tuple_combinations() {
                let line = Curve::line(field, &points[i], &points[j])?;
                for &z in &params {
                    hits.entry(line.eval(z)).or_default().push(((i, j), z));
                }
            }
            for on_point in hits.values().filter(|v| v.len() >= 2) {
                for (a, b) in on_point.iter().tuple_combinations() {
                    consider(a.0, a.1, b.0, b.1);
                }
            }
        }
        CrossingSearch::Pairwise => {
            let pairs: Vec<(usize, usize)> = (0..k).tuple_combinations().collect();
            for (&p, &q) in pairs.iter().tuple_combinations() {
                if p.0 == q.0 || p.0 == q.1 || p.1 == q.0 || p.1 == q.1 {
                    continue;
                }
                if let Some((t, u)) = intersect_lines(field, points, p, q) {
                    consider(p, t, q, u);
                }
            }
        }
    }
    let Some(((_, p, q), t, u)) = best else {
        return Ok(None);
    };
    Ok(Some(LineStructure::Crossing {
        first: pair_fit(field, points, p.0, p.1)?,
        second: pair_fit(field, points, q.0, q.1)?,
        first_param: t,
        second_param: u,
    }))
}

/// Solves `X_p0 + t (X_p1 - X_p0) = X_q0 + u (X_q1 - X_q0)` for a unique
/// `(t, u)` with the meeting point away from all four inputs.
fn intersect_lines(
    field: PrimeField,
    points: &[Point],
    p: (usize, usize),
    q: (usize, usize),
) -> Option<(FieldElem, FieldElem)> {
    let (a, b, c, d) = (&points[p.0], &points[p.1], &points[q.0], &points[q.1]);
    let rows: Vec<Point> = (0..a.len()).map(|j| vec![b[j] - a[j], c[j] - d[j]]).collect();
    if linalg::rank(&rows) < 2 {
        return None;
    }
    let rhs: Point = c.iter().zip(a).map(|(x, y)| *x - *y).collect();
    let sol = linalg::solve(field, &rows, &rhs)?;
    let (t, u) = (sol[0], sol[1]);
    let outside = |z: FieldElem| !z.is_zero() && z != field.one();
    (outside(t) && outside(u)).then_some((t, u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn pts(field: PrimeField, xs: &[&[u64]]) -> Vec<Point> {
        xs.iter().map(|x| x.iter().map(|&v| field.elem(v)).collect()).collect()
    }

    fn random_distinct(field: PrimeField, n: usize, m: usize, nonzero: bool, rng: &mut ChaCha8Rng) -> Vec<Point> {
        let mut seen = HashSet::new();
        while seen.len() < n {
            let p: Point = (0..m).map(|_| field.random(rng)).collect();
            if nonzero && p.iter().all(FieldElem::is_zero) {
                continue;
            }
            seen.insert(p);
        }
        let mut v: Vec<Point> = seen.into_iter().collect();
        v.sort();
        v
    }

    fn assert_minimal(dep: &Dependency, points: &[Point], mode: Mode) {
        assert!(dep.verify(points, mode));
        let lifted: Vec<Point> = dep.indices.iter().map(|&i| lift(&points[i], mode)).collect();
        assert_eq!(linalg::rank(&lifted), lifted.len() - 1);
        for drop in 0..lifted.len() {
            let rest: Vec<Point> = lifted
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != drop)
                .map(|(_, p)| p.clone())
                .collect();
            assert_eq!(linalg::rank(&rest), rest.len(), "proper subset is dependent");
        }
    }

    #[test]
    fn minimal_dependency_examples() {
        let f = gf(97);
        let conic = pts(f, &[&[0, 1], &[2, 0], &[2, 1]]);
        let dep = find_minimal_dependency(&conic, Mode::Homogeneous).unwrap().unwrap();
        assert_eq!(dep.indices, vec![0, 1, 2]);
        assert_eq!(dep.coeffs, vec![f.one(), f.one()]);
        assert_minimal(&dep, &conic, Mode::Homogeneous);

        let indep = pts(f, &[&[1, 0], &[0, 1]]);
        assert_eq!(find_minimal_dependency(&indep, Mode::Homogeneous).unwrap(), None);

        let scaled = pts(f, &[&[3, 5], &[6, 10]]);
        let dep = find_minimal_dependency(&scaled, Mode::Homogeneous).unwrap().unwrap();
        assert_eq!(dep.indices, vec![0, 1]);
        assert_eq!(dep.coeffs, vec![f.elem(2)]);
    }

    #[test]
    fn zero_vector_rejected_in_homogeneous_mode() {
        let f = gf(7);
        let p = pts(f, &[&[1, 0], &[0, 0]]);
        assert!(matches!(
            find_minimal_dependency(&p, Mode::Homogeneous),
            Err(Error::Usage(_))
        ));
        // The lift of 0 is (1, 0, 0), which is fine.
        assert_eq!(find_minimal_dependency(&p, Mode::Affine).unwrap(), None);
    }

    #[test]
    fn dependencies_are_minimal_on_random_sets() {
        let f = gf(7);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for trial in 0..300 {
            let m = 2 + trial % 3;
            let n = 1 + rng.gen_range(0..m + 3);
            let mode = if trial % 2 == 0 {
                Mode::Homogeneous
            } else {
                Mode::Affine
            };
            let points = random_distinct(f, n, m, true, &mut rng);
            match find_minimal_dependency(&points, mode).unwrap() {
                Some(dep) => assert_minimal(&dep, &points, mode),
                None => {
                    let lifted: Vec<Point> = points.iter().map(|p| lift(p, mode)).collect();
                    assert_eq!(linalg::rank(&lifted), lifted.len());
                }
            }
        }
    }

    #[test]
    fn partition_generic_plane_points() {
        let f = gf(97);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let points = loop {
            let c = random_distinct(f, 6, 2, true, &mut rng);
            // generic: no two points parallel
            if c.iter()
                .tuple_combinations()
                .all(|(a, b)| linalg::rank(&[a.clone(), b.clone()]) == 2)
            {
                break c;
            }
        };
        let part = partition_minimal_dependent(&points, Mode::Homogeneous).unwrap();
        assert_eq!(part.dependent_sets.len(), 2);
        assert!(part.dependent_sets.iter().all(|d| d.len() == 3));
        assert!(part.leftovers.is_empty());
        for d in &part.dependent_sets {
            assert_minimal(d, &points, Mode::Homogeneous);
        }

        let two = pts(f, &[&[1, 0], &[0, 1]]);
        let part = partition_minimal_dependent(&two, Mode::Homogeneous).unwrap();
        assert!(part.dependent_sets.is_empty());
        assert_eq!(part.leftovers, vec![0, 1]);

        let four = loop {
            let c = random_distinct(f, 4, 2, false, &mut rng);
            let lifted: Vec<Point> = c.iter().map(|p| lift(p, Mode::Affine)).collect();
            if lifted
                .iter()
                .combinations(3)
                .all(|s| linalg::rank(&s.into_iter().cloned().collect::<Vec<_>>()) == 3)
            {
                break c;
            }
        };
        let part = partition_minimal_dependent(&four, Mode::Affine).unwrap();
        assert_eq!(part.dependent_sets.len(), 1);
        assert_eq!(part.dependent_sets[0].len(), 4);
        assert!(part.leftovers.is_empty());
        assert_minimal(&part.dependent_sets[0], &four, Mode::Affine);
    }

    #[test]
    fn partitions_are_exact_and_bounded() {
        let f = gf(11);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for trial in 0..100 {
            let m = 1 + trial % 3;
            let k = rng.gen_range(1..12).min(11usize.pow(m as u32) - 1);
            for mode in [Mode::Homogeneous, Mode::Affine] {
                let points = random_distinct(f, k, m, true, &mut rng);
                let part = partition_minimal_dependent(&points, mode).unwrap();
                let mut all: Vec<usize> = part.dependent_sets.iter().flat_map(|d| d.indices.clone()).collect();
                all.extend(&part.leftovers);
                all.sort_unstable();
                assert_eq!(all, (0..points.len()).collect::<Vec<_>>());
                let (max_set, max_left) = match mode {
                    Mode::Homogeneous => (m + 1, m),
                    Mode::Affine => (m + 2, m + 1),
                };
                assert!(part.leftovers.len() <= max_left);
                for d in &part.dependent_sets {
                    assert!(d.len() <= max_set);
                    assert_minimal(d, &points, mode);
                }
            }
        }
    }

    #[test]
    fn sparse_dependency_examples() {
        let f = gf(97);
        let p = pts(f, &[&[1, 2, 3], &[0, 1, 0], &[96, 95, 94]]);
        let dep = find_sparse_dependency(&p, 2).unwrap().unwrap();
        assert_eq!(dep.indices, vec![0, 2]);
        assert_eq!(dep.coeffs, vec![f.elem(96)]);

        let indep = pts(f, &[&[1, 0, 0], &[0, 1, 0]]);
        assert_eq!(find_sparse_dependency(&indep, 2).unwrap(), None);
        assert!(find_sparse_dependency(&indep, 1).is_err());
    }

    #[test]
    fn sparse_dependency_falls_back_to_collisions() {
        // Standard basis of GF(3)^4 plus their sum: the only dependency has 5
        // points, so elimination alone cannot satisfy e = 2. Adding x1 + x2
        // and x3 + x4 creates a 4-point dependency only the collision search sees.
        let f = gf(3);
        let p = pts(
            f,
            &[
                &[1, 0, 0, 0],
                &[0, 1, 0, 0],
                &[0, 0, 1, 0],
                &[0, 0, 0, 1],
                &[1, 1, 1, 1],
                &[1, 1, 0, 0],
                &[0, 0, 1, 1],
            ],
        );
        let ge = find_minimal_dependency(&p, Mode::Homogeneous).unwrap().unwrap();
        assert_eq!(ge.len(), 5);
        let dep = find_sparse_dependency(&p, 2).unwrap().unwrap();
        assert!(dep.len() <= 4);
        assert_minimal(&dep, &p, Mode::Homogeneous);
    }

    #[test]
    fn sparse_dependency_budget() {
        let f = gf(65537);
        // e1..e5 of F^5 plus their sum forces the collision search.
        let mut p: Vec<Point> = (0..5)
            .map(|i| (0..5).map(|j| if i == j { f.one() } else { f.zero() }).collect())
            .collect();
        p.push(vec![f.one(); 5]);
        assert!(matches!(find_sparse_dependency(&p, 2), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn sparse_dependency_threshold_instances() {
        // k = 13 > 2e q^(m/e - 1) = 12 for q = 3, m = 4, e = 2.
        let f = gf(3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let points = random_distinct(f, 13, 4, true, &mut rng);
            let dep = find_sparse_dependency(&points, 2)
                .unwrap()
                .expect("guaranteed by counting");
            assert!(dep.len() <= 4);
            assert_minimal(&dep, &points, Mode::Homogeneous);
        }
    }

    #[test]
    fn collinear_example() {
        let f = gf(7);
        let p = pts(f, &[&[0, 0], &[1, 1], &[2, 2]]);
        let s = find_intersecting_lines(&p).unwrap().unwrap();
        assert!(s.verify(&p));
        let LineStructure::Collinear(fit) = s else {
            panic!("expected collinear")
        };
        assert_eq!(fit.indices, vec![0, 1, 2]);
        assert_eq!(fit.anchors, vec![f.zero(), f.one(), f.elem(2)]);
    }

    #[test]
    fn crossing_example() {
        let f = gf(97);
        let p = pts(f, &[&[0, 0], &[0, 1], &[2, 0], &[2, 1]]);
        let s = find_intersecting_lines(&p).unwrap().unwrap();
        assert!(s.verify(&p));
        let LineStructure::Crossing {
            first,
            second,
            first_param,
            second_param,
        } = s
        else {
            panic!("expected crossing")
        };
        let sets: BTreeSet<Vec<usize>> = [first.indices.clone(), second.indices.clone()].into_iter().collect();
        assert_eq!(sets, [vec![0, 3], vec![1, 2]].into_iter().collect());
        let half = f.elem(2).inv().unwrap();
        assert_eq!(half, f.elem(49));
        assert_eq!(first.curve.eval(first_param), vec![f.one(), f.elem(49)]);
        assert_eq!(second.curve.eval(second_param), vec![f.one(), f.elem(49)]);
    }

    #[test]
    fn too_few_points() {
        let f = gf(7);
        let p = pts(f, &[&[0, 0], &[1, 1]]);
        assert_eq!(find_intersecting_lines(&p).unwrap(), None);
    }

    #[test]
    fn line_structure_guaranteed_above_threshold() {
        // k = 41 > 8 q^((m-1)/2) = 40 for q = 5, m = 3.
        let f = gf(5);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let points = random_distinct(f, 41, 3, false, &mut rng);
            let s = find_intersecting_lines(&points)
                .unwrap()
                .expect("guaranteed by counting");
            assert!(s.verify(&points));
        }
    }

    #[test]
    fn crossing_strategies_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (q, m, k) in [(7u64, 3usize, 6usize), (11, 3, 8), (13, 4, 9), (31, 2, 5)] {
            let f = gf(q);
            for _ in 0..20 {
                let points = random_distinct(f, k, m, false, &mut rng);
                if find_collinear(f, &points).unwrap().is_some() {
                    continue;
                }
                let a = find_crossing(f, &points, CrossingSearch::Incidence).unwrap();
                let b = find_crossing(f, &points, CrossingSearch::Pairwise).unwrap();
                assert_eq!(a, b);
                if let Some(s) = a {
                    assert!(s.verify(&points));
                }
            }
        }
    }

    #[test]
    fn fit_line_covers_all_or_nothing() {
        let f = PrimeField::new(97).unwrap();
        let pts =
            |rows: &[[u64; 2]]| -> Vec<Point> { rows.iter().map(|r| r.iter().map(|&v| f.elem(v)).collect()).collect() };
        let on = pts(&[[1, 1], [2, 3], [4, 7], [0, 96]]);
        let fit = fit_line(&on).unwrap().unwrap();
        assert_eq!(fit.indices, vec![0, 1, 2, 3]);
        assert!(fit.verify(&on));
        assert!(fit_line(&pts(&[[1, 1], [2, 3], [4, 8]])).unwrap().is_none());
        assert!(fit_line(&pts(&[[1, 1], [1, 1]])).unwrap().is_none());
    }
}
