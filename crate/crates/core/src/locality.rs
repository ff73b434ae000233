//! Brute-force computational locality of tiny polynomial classes.
//!
//! The associated code of a class lists, for every function in it, the
//! function's values on all of `F_q^m` (in lexicographic order). The repeated
//! code copies each codeword `s + 1` times; symbol `(l - 1) n + i` carries
//! `(c_i, l)`.
//!
//! A symbol set `J` recovers the positions `I` against `s` erasures iff every
//! two codewords that differ on `I` differ on at least `s + 1` symbols of `J`.
//! Only the positions where two codewords differ matter, so the search works on
//! the distinct difference masks rather than on codeword pairs.

use std::collections::BTreeSet;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldElem, PrimeField};
use crate::poly::{monomials, MultiPoly};
use crate::Point;

/// Largest domain `q^m` the oracle enumerates.
pub const MAX_DOMAIN: usize = 32;
/// Largest number of functions in a class.
pub const MAX_CLASS: usize = 10_000;
/// Largest repeated-code length `(s + 1) n` searched over.
pub const MAX_REPEATED_LEN: usize = 14;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssociatedCode {
    #[serde(rename = "modulus")]
    field: PrimeField,
    m: usize,
    domain: Vec<Point>,
    codewords: Vec<Vec<FieldElem>>,
    /// Closed under subtraction, so differences of codewords are codewords.
    #[serde(skip)]
    linear: bool,
}

impl AssociatedCode {
    /// All polynomials `F_q^m -> F_q` of total degree at most `d`.
    pub fn reed_muller(field: PrimeField, m: usize, d: u32) -> Result<Self> {
        Self::from_monomials(field, m, monomials(m, d))
    }

    /// All homogeneous polynomials of degree exactly `d`, together with zero.
    pub fn homogeneous(field: PrimeField, m: usize, d: u32) -> Result<Self> {
        let monos = monomials(m, d)
            .into_iter()
            .filter(|e| e.iter().sum::<u32>() == d)
            .collect();
        Self::from_monomials(field, m, monos)
    }

    fn from_monomials(field: PrimeField, m: usize, monos: Vec<Vec<u32>>) -> Result<Self> {
        let domain = enumerate_domain(field, m)?;
        let q = field.modulus() as u128;
        let size = q.checked_pow(monos.len() as u32).unwrap_or(u128::MAX);
        if size > MAX_CLASS as u128 {
            return Err(Error::BudgetExceeded(format!(
                "class of {q}^{} polynomials exceeds {MAX_CLASS}",
                monos.len()
            )));
        }
        // Coefficient vectors in lexicographic order, one codeword each.
        let values = (0..monos.len())
            .map(|_| (0..field.modulus()).map(|v| field.elem(v)))
            .multi_cartesian_product();
        let codewords = if monos.is_empty() {
            vec![field.zeros(domain.len())]
        } else {
            values
                .map(|coeffs| {
                    let terms = coeffs.into_iter().zip(monos.iter().cloned()).collect();
                    let f = MultiPoly::new(field, m, vec![terms])?;
                    domain.iter().map(|x| Ok(f.eval(x)?[0])).collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?
        };
        Ok(AssociatedCode {
            field,
            m,
            domain,
            codewords,
            linear: true,
        })
    }

    /// An arbitrary code over the domain `F_q^m`; no structure is assumed.
    pub fn from_codewords(field: PrimeField, m: usize, codewords: Vec<Vec<FieldElem>>) -> Result<Self> {
        let domain = enumerate_domain(field, m)?;
        if codewords.iter().any(|c| c.len() != domain.len()) {
            return Err(Error::usage(format!("codewords must have length {}", domain.len())));
        }
        if codewords.len() > MAX_CLASS {
            return Err(Error::BudgetExceeded(format!("more than {MAX_CLASS} codewords")));
        }
        Ok(AssociatedCode {
            field,
            m,
            domain,
            codewords,
            linear: false,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Code length `n = q^m`.
    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn domain(&self) -> &[Point] {
        &self.domain
    }

    pub fn codewords(&self) -> &[Vec<FieldElem>] {
        &self.codewords
    }

    /// Position of a domain point.
    pub fn index_of(&self, x: &[FieldElem]) -> Option<usize> {
        self.domain.iter().position(|p| p == x)
    }

    pub fn repeated(&self, s: usize) -> RepeatedCode<'_> {
        RepeatedCode { base: self, s }
    }

    /// Distinct supports of `c - c'` over pairs that differ somewhere in `targets`.
    fn conflict_masks(&self, targets: &[usize]) -> Vec<u64> {
        let support = |a: &[FieldElem], b: &[FieldElem]| -> u64 {
            a.iter()
                .zip(b)
                .enumerate()
                .filter(|(_, (x, y))| x != y)
                .fold(0u64, |acc, (i, _)| acc | (1 << i))
        };
        let target_mask = targets.iter().fold(0u64, |acc, &i| acc | (1 << i));
        let masks: BTreeSet<u64> = if self.linear {
            let zero = self.field.zeros(self.len());
            self.codewords.iter().map(|c| support(c, &zero)).collect()
        } else {
            self.codewords
                .iter()
                .tuple_combinations()
                .map(|(a, b)| support(a, b))
                .collect()
        };
        masks.into_iter().filter(|m| m & target_mask != 0).collect()
    }
}

fn enumerate_domain(field: PrimeField, m: usize) -> Result<Vec<Point>> {
    let q = field.modulus() as u128;
    let n = q.checked_pow(m as u32).unwrap_or(u128::MAX);
    if n > MAX_DOMAIN as u128 {
        return Err(Error::BudgetExceeded(format!(
            "domain of {q}^{m} points exceeds {MAX_DOMAIN}"
        )));
    }
    if m == 0 {
        return Ok(vec![Vec::new()]);
    }
    Ok((0..m)
        .map(|_| (0..field.modulus()).map(|v| field.elem(v)))
        .multi_cartesian_product()
        .collect())
}

/// The `(s + 1)`-fold repetition of an associated code.
#[derive(Clone, Copy, Debug)]
pub struct RepeatedCode<'a> {
    base: &'a AssociatedCode,
    s: usize,
}

impl RepeatedCode<'_> {
    pub fn base(&self) -> &AssociatedCode {
        self.base
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn len(&self) -> usize {
        (self.s + 1) * self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Base position and label (from 1) of a repeated-code symbol.
    pub fn symbol(&self, j: usize) -> (usize, usize) {
        (j % self.base.len(), j / self.base.len() + 1)
    }

    pub fn codeword(&self, c: usize) -> Vec<(FieldElem, usize)> {
        (0..self.len())
            .map(|j| {
                let (i, label) = self.symbol(j);
                (self.base.codewords[c][i], label)
            })
            .collect()
    }
}

pub fn hamming_distance<T: PartialEq>(a: &[T], b: &[T]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::usage(format!(
            "words of length {} and {} compared",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter().zip(b).filter(|(x, y)| x != y).count())
}

/// `c` lies in the Hamming ball of radius `r` around `center`.
pub fn in_hamming_ball<T: PartialEq>(c: &[T], center: &[T], r: usize) -> Result<bool> {
    Ok(hamming_distance(c, center)? <= r)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymbolLocality {
    /// Target positions `I` in the base code.
    pub targets: Vec<usize>,
    pub locality: usize,
    /// Lexicographically first minimum witness, as repeated-code symbol indices.
    pub witness: Vec<usize>,
}

fn check_budget(code: &RepeatedCode<'_>) -> Result<()> {
    if code.len() > MAX_REPEATED_LEN {
        return Err(Error::BudgetExceeded(format!(
            "repeated code of length {} exceeds {MAX_REPEATED_LEN}",
            code.len()
        )));
    }
    Ok(())
}

fn check_targets(code: &RepeatedCode<'_>, targets: &[usize]) -> Result<()> {
    if targets.iter().any(|&i| i >= code.base.len()) || !targets.iter().all_unique() {
        return Err(Error::usage(
            "target positions must be distinct positions of the base code",
        ));
    }
    Ok(())
}

fn covers(code: &RepeatedCode<'_>, masks: &[u64], witness: &[usize]) -> bool {
    let mut copies = [0usize; 64];
    for &j in witness {
        copies[code.symbol(j).0] += 1;
    }
    masks.iter().all(|&mask| {
        let hits: usize = (0..code.base.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| copies[i])
            .sum();
        hits > code.s
    })
}

/// Minimum `|J|` such that `s` erasures among the symbols `J` never hide the
/// values at `targets`.
pub fn computational_locality_symbols(code: &RepeatedCode<'_>, targets: &[usize]) -> Result<SymbolLocality> {
    check_budget(code)?;
    check_targets(code, targets)?;
    let masks = code.base.conflict_masks(targets);
    let n = code.len();
    for size in 0..=n {
        let candidates: Vec<Vec<usize>> = (0..n).combinations(size).collect();
        if let Some(witness) = candidates.into_par_iter().find_first(|j| covers(code, &masks, j)) {
            return Ok(SymbolLocality {
                targets: targets.to_vec(),
                locality: size,
                witness,
            });
        }
    }
    unreachable!("the full symbol set always recovers every position")
}

/// Worst case of [`computational_locality_symbols`] over all `k`-sets of
/// positions; ties go to the lexicographically first target set.
pub fn computational_locality(code: &RepeatedCode<'_>, k: usize) -> Result<SymbolLocality> {
    check_budget(code)?;
    if k == 0 || k > code.base.len() {
        return Err(Error::usage(format!("k must lie in 1..={}", code.base.len())));
    }
    let sets: Vec<Vec<usize>> = (0..code.base.len()).combinations(k).collect();
    let results = sets
        .par_iter()
        .map(|targets| computational_locality_symbols(code, targets))
        .collect::<Result<Vec<_>>>()?;
    Ok(results
        .into_iter()
        .rev()
        .max_by_key(|r| r.locality)
        .expect("at least one target set"))
}

/// The defining implication checked literally on repeated codewords: any two
/// whose restrictions to `witness` are within distance `s` agree on `targets`.
pub fn satisfies_definition(code: &RepeatedCode<'_>, targets: &[usize], witness: &[usize]) -> bool {
    let words: Vec<Vec<(FieldElem, usize)>> = (0..code.base.codewords.len()).map(|c| code.codeword(c)).collect();
    let restrict = |w: &[(FieldElem, usize)], idx: &[usize]| idx.iter().map(|&j| w[j]).collect::<Vec<_>>();
    words.iter().tuple_combinations().all(|(c, d)| {
        let close = in_hamming_ball(&restrict(d, witness), &restrict(c, witness), code.s).expect("same length");
        !close || restrict(c, targets) == restrict(d, targets)
    })
}

/// Upper bound on the locality of degree-`d` polynomials over `GF(q)`:
/// `min(k(s+1), (k-1)d + s + 1)`, where the curve term needs
/// `(k-1)d + s + 1 <= q` distinct evaluation points.
pub fn reed_muller_bound(q: u64, k: usize, d: usize, s: usize) -> usize {
    let replication = k * (s + 1);
    let curve = (k - 1) * d + s + 1;
    if curve as u64 <= q {
        replication.min(curve)
    } else {
        replication
    }
}
