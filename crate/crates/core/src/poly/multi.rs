use std::collections::BTreeMap;

use itertools::Itertools;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldElem, PrimeField};
use crate::Point;

/// One monomial `coeff * x_1^exps[0] * ... * x_m^exps[m-1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Term {
    pub coeff: FieldElem,
    pub exps: Vec<u32>,
}

impl Term {
    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }
}

/// A sparse map `F^m -> F^u`, stored as `u` scalar polynomials.
///
/// Terms within a component are kept sorted by exponent vector, never repeat
/// an exponent vector, and never hold a zero coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiPoly {
    #[serde(rename = "modulus")]
    field: PrimeField,
    m: usize,
    components: Vec<Vec<Term>>,
}

impl MultiPoly {
    /// Builds a polynomial from raw `(coeff, exps)` pairs; duplicates are
    /// summed and zero terms dropped.
    pub fn new(field: PrimeField, m: usize, components: Vec<Vec<(FieldElem, Vec<u32>)>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::usage("a polynomial map needs at least one output component"));
        }
        let mut out = Vec::with_capacity(components.len());
        for comp in components {
            let mut merged: BTreeMap<Vec<u32>, FieldElem> = BTreeMap::new();
            for (coeff, exps) in comp {
                if exps.len() != m {
                    return Err(Error::usage(format!(
                        "exponent vector of length {} in a polynomial of {m} variables",
                        exps.len()
                    )));
                }
                if coeff.field() != field {
                    return Err(Error::FieldMismatch(coeff.field().modulus(), field.modulus()));
                }
                *merged.entry(exps).or_insert(field.zero()) += coeff;
            }
            out.push(
                merged
                    .into_iter()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(exps, coeff)| Term { coeff, exps })
                    .collect(),
            );
        }
        Ok(MultiPoly {
            field,
            m,
            components: out,
        })
    }

    /// The zero map `F^m -> F^u`.
    pub fn zero(field: PrimeField, m: usize, u: usize) -> Self {
        MultiPoly {
            field,
            m,
            components: vec![Vec::new(); u.max(1)],
        }
    }

    /// Random polynomial map whose first component has total degree exactly
    /// `degree`; every monomial of admissible degree gets a random coefficient.
    pub fn random<R: Rng + ?Sized>(
        field: PrimeField,
        m: usize,
        u: usize,
        degree: u32,
        homogeneous: bool,
        rng: &mut R,
    ) -> Self {
        let monos: Vec<Vec<u32>> = monomials(m, degree)
            .into_iter()
            .filter(|e| !homogeneous || e.iter().sum::<u32>() == degree)
            .collect();
        let top: Vec<usize> = (0..monos.len())
            .filter(|&i| monos[i].iter().sum::<u32>() == degree)
            .collect();
        let components = (0..u.max(1))
            .map(|c| {
                let mut terms: Vec<(FieldElem, Vec<u32>)> =
                    monos.iter().map(|e| (field.random(rng), e.clone())).collect();
                if c == 0 && !top.is_empty() {
                    let j = top[rng.gen_range(0..top.len())];
                    terms[j].0 = field.random_nonzero(rng);
                }
                terms
            })
            .collect();
        MultiPoly::new(field, m, components).expect("generated terms are well formed")
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// Input arity.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Output arity.
    pub fn u(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Vec<Term>] {
        &self.components
    }

    /// Maximum total degree over all terms of all components; 0 for the zero map.
    pub fn total_degree(&self) -> u32 {
        self.terms().map(Term::degree).max().unwrap_or(0)
    }

    fn terms(&self) -> impl Iterator<Item = &Term> {
        self.components.iter().flatten()
    }

    pub fn eval(&self, x: &[FieldElem]) -> Result<Point> {
        if x.len() != self.m {
            return Err(Error::usage(format!(
                "point of dimension {} passed to a polynomial of {} variables",
                x.len(),
                self.m
            )));
        }
        if let Some(bad) = x.iter().find(|v| v.field() != self.field) {
            return Err(Error::FieldMismatch(bad.field().modulus(), self.field.modulus()));
        }
        Ok(self
            .components
            .iter()
            .map(|comp| {
                comp.iter().fold(self.field.zero(), |acc, t| {
                    let mono = t
                        .exps
                        .iter()
                        .zip(x)
                        .fold(self.field.one(), |m, (&e, &xi)| m * xi.pow(e as u64));
                    acc + t.coeff * mono
                })
            })
            .collect())
    }

    /// True iff every term has total degree equal to `total_degree()`.
    pub fn is_homogeneous(&self) -> bool {
        let d = self.total_degree();
        self.terms().all(|t| t.degree() == d)
    }

    /// `f'(r, x) = r^deg(f) f(x / r)`, with `r` as the new first variable.
    pub fn homogenize(&self) -> MultiPoly {
        let d = self.total_degree();
        let components = self
            .components
            .iter()
            .map(|comp| {
                comp.iter()
                    .map(|t| {
                        let mut exps = Vec::with_capacity(self.m + 1);
                        exps.push(d - t.degree());
                        exps.extend_from_slice(&t.exps);
                        Term { coeff: t.coeff, exps }
                    })
                    .sorted_by(|a, b| a.exps.cmp(&b.exps))
                    .collect()
            })
            .collect();
        MultiPoly {
            field: self.field,
            m: self.m + 1,
            components,
        }
    }
}

/// All exponent vectors in `m` variables of total degree at most `max_degree`,
/// ordered by degree, then lexicographically.
pub fn monomials(m: usize, max_degree: u32) -> Vec<Vec<u32>> {
    fn fill(prefix: &mut Vec<u32>, m: usize, remaining: u32, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == m {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=remaining).rev() {
            prefix.push(e);
            fill(prefix, m, remaining - e, out);
            prefix.pop();
        }
    }
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for d in 0..=max_degree {
        fill(&mut Vec::with_capacity(m), m, d, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn poly(field: PrimeField, m: usize, terms: &[(i64, &[u32])]) -> MultiPoly {
        let comp = terms.iter().map(|(c, e)| (field.from_i64(*c), e.to_vec())).collect();
        MultiPoly::new(field, m, vec![comp]).unwrap()
    }

    fn pt(field: PrimeField, xs: &[u64]) -> Point {
        xs.iter().map(|&x| field.elem(x)).collect()
    }

    #[test]
    fn evaluates_product() {
        let f = gf(97);
        let xy = poly(f, 2, &[(1, &[1, 1])]);
        assert_eq!(xy.eval(&pt(f, &[2, 1])).unwrap(), pt(f, &[2]));
        assert_eq!(xy.eval(&pt(f, &[0, 0])).unwrap(), pt(f, &[0]));
        assert!(xy.eval(&pt(f, &[1])).is_err());
    }

    #[test]
    fn normalizes_terms() {
        let f = gf(7);
        let p = poly(f, 2, &[(3, &[1, 0]), (4, &[1, 0]), (2, &[0, 1]), (0, &[2, 0])]);
        assert_eq!(p.components()[0].len(), 1);
        assert_eq!(p.components()[0][0].exps, vec![0, 1]);
        assert_eq!(p.total_degree(), 1);
        assert!(MultiPoly::new(f, 2, vec![vec![(f.one(), vec![1])]]).is_err());
    }

    #[test]
    fn homogeneity_checks() {
        let f = gf(97);
        assert!(poly(f, 2, &[(1, &[1, 1])]).is_homogeneous());
        assert!(!poly(f, 1, &[(1, &[1]), (1, &[0])]).is_homogeneous());
        let zero = MultiPoly::zero(f, 3, 1);
        assert!(zero.is_homogeneous());
        assert_eq!(zero.total_degree(), 0);
    }

    #[test]
    fn homogenize_examples() {
        let f = gf(97);
        // x + 1  ->  x + r
        let h = poly(f, 1, &[(1, &[1]), (1, &[0])]).homogenize();
        assert_eq!(h, poly(f, 2, &[(1, &[0, 1]), (1, &[1, 0])]));
        // x1 x2 + x1  ->  x1 x2 + x1 r
        let h = poly(f, 2, &[(1, &[1, 1]), (1, &[1, 0])]).homogenize();
        assert_eq!(h, poly(f, 3, &[(1, &[0, 1, 1]), (1, &[1, 1, 0])]));
        // homogeneous input gains a zero r-exponent only
        let h = poly(f, 2, &[(5, &[2, 0]), (3, &[1, 1])]).homogenize();
        assert_eq!(h, poly(f, 3, &[(5, &[0, 2, 0]), (3, &[0, 1, 1])]));
    }

    #[test]
    fn homogenized_agrees_at_r_one() {
        let f = gf(97);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..20 {
            let p = MultiPoly::random(f, 3, 2, 1 + trial % 4, false, &mut rng);
            let h = p.homogenize();
            assert!(h.is_homogeneous());
            assert_eq!(h.total_degree(), p.total_degree());
            for _ in 0..100 {
                let x: Point = (0..3).map(|_| f.random(&mut rng)).collect();
                let mut lifted = vec![f.one()];
                lifted.extend_from_slice(&x);
                assert_eq!(h.eval(&lifted).unwrap(), p.eval(&x).unwrap());
            }
        }
    }

    #[test]
    fn homogeneity_law_exhaustive_scalars() {
        let f = gf(7);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 0..4 {
            let p = MultiPoly::random(f, 2, 2, d, true, &mut rng);
            assert!(p.is_homogeneous());
            for _ in 0..20 {
                let x: Point = (0..2).map(|_| f.random(&mut rng)).collect();
                let fx = p.eval(&x).unwrap();
                for a in 0..7 {
                    let alpha = f.elem(a);
                    let ax: Point = x.iter().map(|v| alpha * *v).collect();
                    let lhs = p.eval(&ax).unwrap();
                    let scale = alpha.pow(p.total_degree() as u64);
                    let rhs: Point = fx.iter().map(|v| scale * *v).collect();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn random_has_requested_degree() {
        let f = gf(97);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 0..5 {
            for homogeneous in [false, true] {
                let p = MultiPoly::random(f, 2, 1, d, homogeneous, &mut rng);
                assert_eq!(p.total_degree(), d);
                if homogeneous {
                    assert!(p.is_homogeneous());
                }
            }
        }
    }

    #[test]
    fn monomial_counts() {
        // C(m + d, d)
        assert_eq!(monomials(1, 2).len(), 3);
        assert_eq!(monomials(2, 2).len(), 6);
        assert_eq!(monomials(3, 3).len(), 20);
        assert_eq!(monomials(0, 3), vec![Vec::<u32>::new()]);
    }
}
