//! Exact arithmetic in prime fields GF(p).
//!
//! Elements carry their field so that mixing elements of different moduli is
//! caught. The `checked_*` methods report a mismatch as an error; the operator
//! impls panic on mismatch, which is a programming error inside this crate.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest modulus accepted: products of two residues must fit in `u128`
/// with room to spare, and values must round-trip through `i64` in scenarios.
pub const MAX_MODULUS: u64 = 1 << 61;

/// The prime field GF(p).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p >= MAX_MODULUS {
            return Err(Error::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Reduces `v` into the field.
    #[inline]
    pub fn elem(&self, v: u64) -> FieldElem {
        FieldElem {
            value: v % self.p,
            field: *self,
        }
    }

    pub fn from_i64(&self, v: i64) -> FieldElem {
        let p = self.p as i128;
        let r = (v as i128).rem_euclid(p);
        FieldElem {
            value: r as u64,
            field: *self,
        }
    }

    #[inline]
    pub fn zero(&self) -> FieldElem {
        self.elem(0)
    }

    #[inline]
    pub fn one(&self) -> FieldElem {
        self.elem(1)
    }

    /// The canonical anchors `0, 1, ..., n-1`.
    pub fn enumerate(&self, n: usize) -> Result<Vec<FieldElem>> {
        if n as u128 > self.p as u128 {
            return Err(Error::FieldTooSmall {
                required: n as u64,
                modulus: self.p,
            });
        }
        Ok((0..n as u64).map(|v| self.elem(v)).collect())
    }

    /// Fails with `FieldTooSmall` unless the field has at least `required` elements.
    pub fn require_size(&self, required: u64) -> Result<()> {
        if required > self.p {
            Err(Error::FieldTooSmall {
                required,
                modulus: self.p,
            })
        } else {
            Ok(())
        }
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        self.elem(rng.gen_range(0..self.p))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        self.elem(rng.gen_range(1..self.p))
    }

    pub fn zeros(&self, n: usize) -> Vec<FieldElem> {
        vec![self.zero(); n]
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

impl Serialize for PrimeField {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u64(self.p)
    }
}

/// An element of GF(p), always held as its canonical representative in `[0, p)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem {
    value: u64,
    field: PrimeField,
}

impl FieldElem {
    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &FieldElem) -> Result<()> {
        if self.field != other.field {
            Err(Error::FieldMismatch(self.field.p, other.field.p))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(self, rhs: FieldElem) -> Result<FieldElem> {
        self.same_field(&rhs)?;
        let p = self.field.p;
        // p < 2^61, so the sum cannot overflow u64.
        let mut v = self.value + rhs.value;
        if v >= p {
            v -= p;
        }
        Ok(FieldElem {
            value: v,
            field: self.field,
        })
    }

    pub fn checked_sub(self, rhs: FieldElem) -> Result<FieldElem> {
        self.same_field(&rhs)?;
        let p = self.field.p;
        let v = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            self.value + p - rhs.value
        };
        Ok(FieldElem {
            value: v,
            field: self.field,
        })
    }

    pub fn checked_mul(self, rhs: FieldElem) -> Result<FieldElem> {
        self.same_field(&rhs)?;
        let v = (self.value as u128 * rhs.value as u128) % self.field.p as u128;
        Ok(FieldElem {
            value: v as u64,
            field: self.field,
        })
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(self) -> Result<FieldElem> {
        if self.value == 0 {
            return Err(Error::DivisionByZero);
        }
        let p = self.field.p as i128;
        let (mut old_r, mut r) = (self.value as i128, p);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        debug_assert_eq!(old_r, 1);
        Ok(FieldElem {
            value: old_s.rem_euclid(p) as u64,
            field: self.field,
        })
    }

    /// Square-and-multiply. `0^0 = 1`.
    pub fn pow(self, mut e: u64) -> FieldElem {
        let mut base = self;
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn checked_div(self, rhs: FieldElem) -> Result<FieldElem> {
        self.same_field(&rhs)?;
        self.checked_mul(rhs.inv()?)
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Serialize for FieldElem {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u64(self.value)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident, $assign_trait:ident, $assign:ident) => {
        impl $trait for FieldElem {
            type Output = FieldElem;
            #[inline]
            fn $method(self, rhs: FieldElem) -> FieldElem {
                match self.$checked(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("{e}"),
                }
            }
        }

        impl $assign_trait for FieldElem {
            #[inline]
            fn $assign(&mut self, rhs: FieldElem) {
                *self = $trait::$method(*self, rhs);
            }
        }
    };
}

binop!(Add, add, checked_add, AddAssign, add_assign);
binop!(Sub, sub, checked_sub, SubAssign, sub_assign);
binop!(Mul, mul, checked_mul, MulAssign, mul_assign);

impl Neg for FieldElem {
    type Output = FieldElem;
    #[inline]
    fn neg(self) -> FieldElem {
        let v = if self.value == 0 { 0 } else { self.field.p - self.value };
        FieldElem {
            value: v,
            field: self.field,
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the first twelve primes as witnesses are
/// exact for every `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
