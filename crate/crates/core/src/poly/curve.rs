use serde::Serialize;

use super::univariate;
use crate::error::{Error, Result};
use crate::field::{FieldElem, PrimeField};
use crate::linalg;
use crate::Point;

/// A vector-valued univariate polynomial `z -> F^dim`.
///
/// `coeffs[i]` is the coefficient vector of `z^i`. Trailing zero vectors are
/// trimmed; the zero curve keeps a single zero vector so that it has degree 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Curve {
    #[serde(skip)]
    field: PrimeField,
    dim: usize,
    coeffs: Vec<Point>,
}

impl Curve {
    pub fn from_coeffs(field: PrimeField, dim: usize, mut coeffs: Vec<Point>) -> Result<Self> {
        if coeffs.iter().any(|c| c.len() != dim) {
            return Err(Error::usage(
                "curve coefficient vectors must all have the curve's dimension",
            ));
        }
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.iter().all(FieldElem::is_zero)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(field.zeros(dim));
        }
        Ok(Curve { field, dim, coeffs })
    }

    pub fn constant(field: PrimeField, point: Point) -> Self {
        Curve {
            field,
            dim: point.len(),
            coeffs: vec![point],
        }
    }

    /// The line `a + (b - a) z`, passing through `a` at 0 and `b` at 1.
    pub fn line(field: PrimeField, a: &[FieldElem], b: &[FieldElem]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::usage("line endpoints differ in dimension"));
        }
        let dir: Point = a.iter().zip(b).map(|(x, y)| *y - *x).collect();
        Curve::from_coeffs(field, a.len(), vec![a.to_vec(), dir])
    }

    /// Curve of degree at most `n - 1` through `(anchors[i], points[i])`.
    pub fn through(field: PrimeField, anchors: &[FieldElem], points: &[Point]) -> Result<Self> {
        if anchors.len() != points.len() || anchors.is_empty() {
            return Err(Error::usage("need one anchor per point and at least one point"));
        }
        let samples: Vec<(FieldElem, Point)> = anchors.iter().copied().zip(points.iter().cloned()).collect();
        interpolate(field, &samples, anchors.len() - 1)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Point] {
        &self.coeffs
    }

    /// Horner evaluation, coordinate by coordinate.
    pub fn eval(&self, z: FieldElem) -> Point {
        let mut acc = self.field.zeros(self.dim);
        for c in self.coeffs.iter().rev() {
            for (a, ci) in acc.iter_mut().zip(c) {
                *a = *a * z + *ci;
            }
        }
        acc
    }

    /// Scalar polynomial of coordinate `j`.
    pub fn coordinate(&self, j: usize) -> Vec<FieldElem> {
        univariate::trim(self.coeffs.iter().map(|c| c[j]).collect())
    }

    fn from_coordinates(field: PrimeField, dim: usize, coords: &[Vec<FieldElem>]) -> Self {
        let len = coords.iter().map(Vec::len).max().unwrap_or(0).max(1);
        let coeffs = (0..len)
            .map(|i| {
                (0..dim)
                    .map(|j| coords[j].get(i).copied().unwrap_or(field.zero()))
                    .collect()
            })
            .collect();
        Curve::from_coeffs(field, dim, coeffs).expect("dimensions agree by construction")
    }
}

fn check_samples(samples: &[(FieldElem, Point)]) -> Result<usize> {
    let dim = samples.first().map_or(0, |s| s.1.len());
    if samples.iter().any(|s| s.1.len() != dim) {
        return Err(Error::usage("samples have differing dimensions"));
    }
    let mut zs: Vec<u64> = samples.iter().map(|s| s.0.value()).collect();
    zs.sort_unstable();
    if zs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::usage("duplicate evaluation point among samples"));
    }
    Ok(dim)
}

/// Lagrange interpolation of the unique curve of degree at most
/// `degree_bound` through the first `degree_bound + 1` samples. Any further
/// samples must agree with the result, otherwise `Error::Inconsistent`.
pub fn interpolate(field: PrimeField, samples: &[(FieldElem, Point)], degree_bound: usize) -> Result<Curve> {
    let dim = check_samples(samples)?;
    let needed = degree_bound + 1;
    if samples.len() < needed {
        return Err(Error::InsufficientResponses {
            needed,
            got: samples.len(),
        });
    }
    let base = &samples[..needed];
    let mut coords = vec![field.zeros(needed); dim];
    for (i, (zi, yi)) in base.iter().enumerate() {
        let mut basis = vec![field.one()];
        let mut denom = field.one();
        for (j, (zj, _)) in base.iter().enumerate() {
            if i != j {
                basis = univariate::mul_linear(field, &basis, *zj);
                denom *= *zi - *zj;
            }
        }
        let scale = denom.inv()?;
        for (coord, y) in coords.iter_mut().zip(yi) {
            let w = *y * scale;
            if w.is_zero() {
                continue;
            }
            for (c, b) in coord.iter_mut().zip(&basis) {
                *c += w * *b;
            }
        }
    }
    let curve = Curve::from_coordinates(field, dim, &coords);
    if samples[needed..].iter().any(|(z, y)| curve.eval(*z) != *y) {
        return Err(Error::Inconsistent { degree_bound });
    }
    Ok(curve)
}

/// Berlekamp-Welch decoding, one coordinate at a time.
///
/// Returns the curve of degree at most `degree_bound` that agrees with all but
/// at most `max_errors` of the samples. Needs at least
/// `degree_bound + 2 * max_errors + 1` samples.
pub fn berlekamp_welch(
    field: PrimeField,
    samples: &[(FieldElem, Point)],
    degree_bound: usize,
    max_errors: usize,
) -> Result<Curve> {
    if max_errors == 0 {
        return interpolate(field, samples, degree_bound).map_err(|e| match e {
            Error::Inconsistent { .. } => Error::decoding("samples do not fit the degree bound"),
            other => other,
        });
    }
    let dim = check_samples(samples)?;
    let needed = degree_bound + 2 * max_errors + 1;
    if samples.len() < needed {
        return Err(Error::InsufficientResponses {
            needed,
            got: samples.len(),
        });
    }
    let q_len = degree_bound + max_errors + 1;
    // Powers z^0 ..= z^(degree_bound + max_errors) for every sample.
    let powers: Vec<Vec<FieldElem>> = samples
        .iter()
        .map(|(z, _)| {
            let mut row = Vec::with_capacity(q_len);
            let mut acc = field.one();
            for _ in 0..q_len {
                row.push(acc);
                acc *= *z;
            }
            row
        })
        .collect();

    let mut coords = Vec::with_capacity(dim);
    for j in 0..dim {
        // Unknowns: Q_0..Q_{D+b}, E_0..E_{b-1}; E is monic of degree b.
        // Q(z_i) - y_i (E_0 + ... + E_{b-1} z_i^{b-1}) = y_i z_i^b
        let mut a = Vec::with_capacity(samples.len());
        let mut rhs = Vec::with_capacity(samples.len());
        for (i, (_, y)) in samples.iter().enumerate() {
            let yi = y[j];
            let mut row = powers[i].clone();
            row.extend(powers[i][..max_errors].iter().map(|p| -(yi * *p)));
            a.push(row);
            rhs.push(yi * powers[i][max_errors]);
        }
        let sol = linalg::solve(field, &a, &rhs)
            .ok_or_else(|| Error::decoding(format!("no error locator exists for coordinate {j}")))?;
        let q = &sol[..q_len];
        let mut e = sol[q_len..].to_vec();
        e.push(field.one());
        let (quot, rem) = univariate::divrem(field, q, &e);
        if !rem.is_empty() {
            return Err(Error::decoding(format!(
                "error locator does not divide for coordinate {j}"
            )));
        }
        if quot.len() > degree_bound + 1 {
            return Err(Error::decoding("decoded polynomial exceeds the degree bound"));
        }
        coords.push(quot);
    }
    let curve = Curve::from_coordinates(field, dim, &coords);
    let disagreements = samples.iter().filter(|(z, y)| curve.eval(*z) != *y).count();
    if disagreements > max_errors {
        return Err(Error::decoding(format!(
            "decoded curve disagrees with {disagreements} samples, more than {max_errors}"
        )));
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MultiPoly;
    use itertools::Itertools;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn pt(field: PrimeField, xs: &[u64]) -> Point {
        xs.iter().map(|&x| field.elem(x)).collect()
    }

    fn random_curve(field: PrimeField, dim: usize, degree: usize, rng: &mut ChaCha8Rng) -> Curve {
        let coeffs = (0..=degree)
            .map(|_| (0..dim).map(|_| field.random(rng)).collect())
            .collect();
        Curve::from_coeffs(field, dim, coeffs).unwrap()
    }

    fn samples_of(curve: &Curve, zs: &[FieldElem]) -> Vec<(FieldElem, Point)> {
        zs.iter().map(|z| (*z, curve.eval(*z))).collect()
    }

    // (z, 1 - 73 (z - 2)^2) over GF(97), expanded: (z, 24 z^2 + z).
    fn six_point_curve(f: PrimeField) -> Curve {
        Curve::from_coeffs(f, 2, vec![pt(f, &[0, 0]), pt(f, &[1, 1]), pt(f, &[0, 24])]).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        let f = gf(97);
        let half = f.elem(2).inv().unwrap();
        let c = Curve::from_coeffs(f, 2, vec![pt(f, &[0, 1]), vec![f.one(), -half]]).unwrap();
        assert_eq!(c.eval(f.zero()), pt(f, &[0, 1]));
        let k = Curve::constant(f, pt(f, &[5, 6, 7]));
        assert_eq!(k.eval(f.elem(42)), pt(f, &[5, 6, 7]));
        assert_eq!(k.degree(), 0);

        let p = six_point_curve(f);
        assert_eq!(p.degree(), 2);
        let inv4 = f.elem(4).inv().unwrap();
        assert_eq!(inv4, f.elem(73));
        for z in 0..97 {
            let z = f.elem(z);
            let d = z - f.elem(2);
            let direct = vec![z, f.one() - inv4 * d * d];
            assert_eq!(p.eval(z), direct);
        }
        assert_eq!(p.eval(f.elem(4)), pt(f, &[4, 0]));

        // f = x1 x2 at p(2) = (2, 1)
        let xy = MultiPoly::new(f, 2, vec![vec![(f.one(), vec![1, 1])]]).unwrap();
        assert_eq!(xy.eval(&p.eval(f.elem(2))).unwrap(), pt(f, &[2]));
    }

    #[test]
    fn line_through_two_samples() {
        let f = gf(97);
        let s = vec![(f.zero(), pt(f, &[3, 4])), (f.one(), pt(f, &[10, 1]))];
        let c = interpolate(f, &s, 1).unwrap();
        assert_eq!(c.eval(f.zero()), s[0].1);
        assert_eq!(c.eval(f.one()), s[1].1);
        assert_eq!(c, Curve::line(f, &s[0].1, &s[1].1).unwrap());
    }

    #[test]
    fn any_five_of_six_points() {
        let f = gf(97);
        let p = six_point_curve(f);
        let half_xy = MultiPoly::new(f, 2, vec![vec![(f.elem(49), vec![1, 1])]]).unwrap();
        let anchors = f.enumerate(6).unwrap();
        let all: Vec<_> = anchors
            .iter()
            .map(|z| (*z, half_xy.eval(&p.eval(*z)).unwrap()))
            .collect();
        for skip in 0..6 {
            let s: Vec<_> = all
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, s)| s.clone())
                .collect();
            let h = interpolate(f, &s, 4).unwrap();
            for (z, x) in [(0, [0u64, 0]), (2, [2, 1]), (4, [4, 0])] {
                let expect = half_xy.eval(&pt(f, &x)).unwrap();
                assert_eq!(h.eval(f.elem(z)), expect);
            }
        }
    }

    #[test]
    fn quadratic_over_gf7_predicts_fourth_point() {
        let f = gf(7);
        // 3 + 2z + 5z^2
        let scalar = |z: FieldElem| f.elem(3) + f.elem(2) * z + f.elem(5) * z * z;
        let s: Vec<_> = [1u64, 4, 6]
            .iter()
            .map(|&z| (f.elem(z), vec![scalar(f.elem(z))]))
            .collect();
        let c = interpolate(f, &s, 2).unwrap();
        assert_eq!(c.eval(f.elem(2)), vec![scalar(f.elem(2))]);
    }

    #[test]
    fn interpolate_rejects_bad_input() {
        let f = gf(7);
        let s = vec![(f.one(), pt(f, &[1])), (f.one(), pt(f, &[2]))];
        assert!(matches!(interpolate(f, &s, 1), Err(Error::Usage(_))));
        let s = vec![
            (f.zero(), pt(f, &[1])),
            (f.one(), pt(f, &[2])),
            (f.elem(2), pt(f, &[0])),
        ];
        assert_eq!(interpolate(f, &s, 1), Err(Error::Inconsistent { degree_bound: 1 }));
        assert!(matches!(
            interpolate(f, &s[..1], 1),
            Err(Error::InsufficientResponses { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn interpolation_round_trip_seeded() {
        let f = gf(65537);
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for case in 0..1000 {
            let degree = case % 9;
            let dim = 1 + case % 3;
            let c = random_curve(f, dim, degree, &mut rng);
            let mut zs: Vec<u64> = rand::seq::index::sample(&mut rng, 65537, degree + 1)
                .into_iter()
                .map(|z| z as u64)
                .collect();
            zs.sort_unstable();
            let zs: Vec<_> = zs.into_iter().map(|z| f.elem(z)).collect();
            let back = interpolate(f, &samples_of(&c, &zs), degree).unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn bw_without_errors_matches_interpolation() {
        let f = gf(97);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = random_curve(f, 2, 3, &mut rng);
        let s = samples_of(&c, &f.enumerate(6).unwrap());
        assert_eq!(berlekamp_welch(f, &s, 3, 0).unwrap(), interpolate(f, &s, 3).unwrap());
    }

    #[test]
    fn bw_corrects_single_error_every_position() {
        let f = gf(97);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let line = random_curve(f, 1, 1, &mut rng);
        let zs = f.enumerate(4).unwrap();
        for pos in 0..4 {
            for _ in 0..5 {
                let mut s = samples_of(&line, &zs);
                let offset = f.random_nonzero(&mut rng);
                s[pos].1[0] += offset;
                assert_eq!(berlekamp_welch(f, &s, 1, 1).unwrap(), line, "pos {pos}");
            }
        }
    }

    #[test]
    fn bw_every_corruption_subset_at_minimal_count() {
        let f = gf(97);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (degree, b) in [(0usize, 1usize), (2, 1), (2, 2), (4, 2), (3, 3)] {
            let c = random_curve(f, 2, degree, &mut rng);
            let n = degree + 2 * b + 1;
            let zs = f.enumerate(n).unwrap();
            for errs in 0..=b {
                for positions in (0..n).combinations(errs) {
                    let mut s = samples_of(&c, &zs);
                    for &p in &positions {
                        let j = rng.gen_range(0..2);
                        s[p].1[j] += f.random_nonzero(&mut rng);
                    }
                    assert_eq!(berlekamp_welch(f, &s, degree, b).unwrap(), c);
                }
            }
        }
    }

    use rand::Rng;

    #[test]
    fn bw_too_many_errors_is_detected_or_wrong() {
        let f = gf(97);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut failures = 0;
        for _ in 0..50 {
            let c = random_curve(f, 1, 2, &mut rng);
            let zs = f.enumerate(5).unwrap();
            let mut s = samples_of(&c, &zs);
            let picks = rand::seq::index::sample(&mut rng, 5, 2);
            for p in picks.iter() {
                s[p].1[0] += f.random_nonzero(&mut rng);
            }
            match berlekamp_welch(f, &s, 2, 1) {
                Err(Error::DecodingFailure(_)) => failures += 1,
                Ok(decoded) => {
                    // Any returned curve must still satisfy the agreement contract.
                    assert_ne!(decoded, c);
                    let bad = s.iter().filter(|(z, y)| decoded.eval(*z) != *y).count();
                    assert!(bad <= 1);
                }
                Err(e) => panic!("unexpected error {e}"),
            }
        }
        assert!(failures > 0);
    }

    #[test]
    fn bw_needs_enough_samples() {
        let f = gf(97);
        let s: Vec<_> = (0..4).map(|z| (f.elem(z), pt(f, &[z]))).collect();
        assert!(matches!(
            berlekamp_welch(f, &s, 2, 1),
            Err(Error::InsufficientResponses { needed: 5, got: 4 })
        ));
    }
}
