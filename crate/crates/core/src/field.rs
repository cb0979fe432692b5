//! Prime-field arithmetic and univariate polynomials over `F_q`.
//!
//! Only prime moduli are supported. Everything here is small-modulus
//! arithmetic: `q` stays well under `2^32`, so products fit in `u64`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// A validated prime modulus. Cheap to copy; use it to mint elements
/// without re-running the primality check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeField {
    q: u64,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        if q >= 1 << 31 {
            return Err(Error::OutOfRange(format!("modulus {q} too large")));
        }
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(Self { q })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Reduces `v` into the field.
    pub fn elem(&self, v: u64) -> FieldElement {
        FieldElement {
            value: v % self.q,
            modulus: self.q,
        }
    }

    /// Reduces a signed integer into the field.
    pub fn elem_signed(&self, v: i64) -> FieldElement {
        self.elem(v.rem_euclid(self.q as i64) as u64)
    }

    pub fn zero(&self) -> FieldElement {
        self.elem(0)
    }

    pub fn one(&self) -> FieldElement {
        self.elem(1)
    }

    /// All field elements in increasing order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(move |v| self.elem(v))
    }

    // Raw residue arithmetic for hot loops.
    #[inline]
    pub fn add_raw(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.q
    }

    #[inline]
    pub fn sub_raw(&self, a: u64, b: u64) -> u64 {
        (a + self.q - b % self.q) % self.q
    }

    #[inline]
    pub fn mul_raw(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.q
    }

    pub fn pow_raw(&self, base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.q;
        let mut b = base % self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_raw(acc, b);
            }
            b = self.mul_raw(b, b);
            exp >>= 1;
        }
        acc
    }
}

/// An element of `F_q` for prime `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElement {
    value: u64,
    modulus: u64,
}

impl FieldElement {
    /// Builds `value mod q`, checking that `q` is prime.
    pub fn new(value: u64, modulus: u64) -> Result<Self> {
        Ok(PrimeField::new(modulus)?.elem(value))
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn field(&self) -> PrimeField {
        PrimeField { q: self.modulus }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.field().elem(self.value + other.value))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.field().elem(self.value + self.modulus - other.value))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.field().elem(self.value * other.value))
    }

    pub fn neg(&self) -> Self {
        self.field().elem(self.modulus - self.value)
    }

    pub fn pow(&self, exp: u64) -> Self {
        let f = self.field();
        f.elem(f.pow_raw(self.value, exp))
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(&self) -> Result<Self> {
        if self.value == 0 {
            return Err(Error::DivisionByZero(self.modulus));
        }
        Ok(self.pow(self.modulus - 2))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

/// Dense univariate polynomial over `F_q`; `coefficients[i]` multiplies `x^i`.
///
/// Trailing zero coefficients are trimmed, so the zero polynomial has an
/// empty coefficient list and `degree()` returns `None` for it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FqPoly {
    coefficients: Vec<u64>,
    field: PrimeField,
}

impl FqPoly {
    pub fn new(field: PrimeField, coefficients: &[u64]) -> Self {
        let mut coefficients: Vec<u64> = coefficients.iter().map(|c| c % field.q).collect();
        while coefficients.last() == Some(&0) {
            coefficients.pop();
        }
        Self {
            coefficients,
            field,
        }
    }

    pub fn from_elements(coefficients: &[FieldElement]) -> Result<Self> {
        let Some(first) = coefficients.first() else {
            return Err(Error::Input(
                "cannot infer modulus from an empty coefficient list".into(),
            ));
        };
        let field = first.field();
        for c in coefficients {
            first.check(c)?;
        }
        let raw: Vec<u64> = coefficients.iter().map(|c| c.value).collect();
        Ok(Self::new(field, &raw))
    }

    pub fn zero(field: PrimeField) -> Self {
        Self::new(field, &[])
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn coefficients(&self) -> Vec<FieldElement> {
        self.coefficients.iter().map(|&c| self.field.elem(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    /// Horner evaluation at a raw residue.
    pub fn eval_raw(&self, x: u64) -> u64 {
        let f = &self.field;
        self.coefficients
            .iter()
            .rev()
            .fold(0, |acc, &c| f.add_raw(f.mul_raw(acc, x), c))
    }

    pub fn eval(&self, x: &FieldElement) -> Result<FieldElement> {
        if x.modulus != self.field.q {
            return Err(Error::ModulusMismatch(self.field.q, x.modulus));
        }
        Ok(self.field.elem(self.eval_raw(x.value)))
    }

    /// All roots in `F_q`, ascending, by exhaustive scan.
    pub fn roots(&self) -> Result<Vec<u64>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok((0..self.field.q).filter(|&x| self.eval_raw(x) == 0).collect())
    }

    pub fn count_roots(&self) -> Result<usize> {
        Ok(self.roots()?.len())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(self.field.q, other.field.q));
        }
        let len = self.coefficients.len().max(other.coefficients.len());
        let coeffs: Vec<u64> = (0..len)
            .map(|i| {
                let a = self.coefficients.get(i).copied().unwrap_or(0);
                let b = other.coefficients.get(i).copied().unwrap_or(0);
                self.field.add_raw(a, b)
            })
            .collect();
        Ok(Self::new(self.field, &coeffs))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(self.field.q - 1))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(self.field.q, other.field.q));
        }
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.field));
        }
        let mut out = vec![0u64; self.coefficients.len() + other.coefficients.len() - 1];
        for (i, &a) in self.coefficients.iter().enumerate() {
            for (j, &b) in other.coefficients.iter().enumerate() {
                out[i + j] = self.field.add_raw(out[i + j], self.field.mul_raw(a, b));
            }
        }
        Ok(Self::new(self.field, &out))
    }

    pub fn scale(&self, c: u64) -> Self {
        let coeffs: Vec<u64> = self
            .coefficients
            .iter()
            .map(|&a| self.field.mul_raw(a, c % self.field.q))
            .collect();
        Self::new(self.field, &coeffs)
    }

    /// `(x + shift)^k` expanded by the binomial theorem.
    pub fn shifted_power(field: PrimeField, shift: u64, k: usize) -> Self {
        let base = Self::new(field, &[shift, 1]);
        let mut acc = Self::new(field, &[1]);
        for _ in 0..k {
            acc = acc.mul(&base).expect("same field");
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(v: u64, q: u64) -> FieldElement {
        FieldElement::new(v, q).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(f(3, 7).add(&f(4, 7)).unwrap().value(), 0);
        assert_eq!(f(3, 7).inv().unwrap().value(), 5);
        assert_eq!(f(2, 5).pow(0).value(), 1);
    }

    #[test]
    fn inverse_by_exhaustive_search() {
        // 3x = 1 mod 7
        let found: Vec<u64> = (0..7).filter(|x| (3 * x) % 7 == 1).collect();
        assert_eq!(found, vec![f(3, 7).inv().unwrap().value()]);
    }

    #[test]
    fn errors() {
        assert_eq!(f(0, 7).inv(), Err(Error::DivisionByZero(7)));
        assert_eq!(f(1, 7).add(&f(1, 5)), Err(Error::ModulusMismatch(7, 5)));
        assert_eq!(FieldElement::new(1, 9), Err(Error::NotPrime(9)));
        assert!(FieldElement::new(1, 1).is_err());
    }

    #[test]
    fn inverse_exhaustive_small_primes() {
        for q in (2..=101).filter(|&q| is_prime(q)) {
            for a in 1..q {
                let a = f(a, q);
                assert_eq!(a.mul(&a.inv().unwrap()).unwrap().value(), 1, "q={q}");
            }
        }
    }

    #[test]
    fn eval_examples() {
        let f5 = PrimeField::new(5).unwrap();
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(FqPoly::new(f5, &[1, 0, 1]).eval(&f5.elem(2)).unwrap().value(), 0);
        assert_eq!(FqPoly::zero(f5).eval(&f5.elem(3)).unwrap().value(), 0);
        // 3x^3 + x at 2: 24 + 2 = 26 = 5 mod 7
        let p = FqPoly::new(f7, &[0, 1, 0, 3]);
        assert_eq!(p.eval(&f7.elem(2)).unwrap().value(), 5);
        assert_eq!((3 * 8 + 2) % 7, 5);
        assert!(p.eval(&f5.elem(2)).is_err());
    }

    #[test]
    fn root_examples() {
        let f7 = PrimeField::new(7).unwrap();
        let f5 = PrimeField::new(5).unwrap();
        let f11 = PrimeField::new(11).unwrap();
        let p = FqPoly::new(f7, &[6, 0, 1]);
        assert_eq!(p.roots().unwrap(), vec![1, 6]);
        assert_eq!(FqPoly::new(f5, &[0, 1]).count_roots().unwrap(), 1);
        assert_eq!(FqPoly::new(f11, &[4]).count_roots().unwrap(), 0);
        assert_eq!(FqPoly::zero(f11).count_roots(), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn trimming_and_degree() {
        let f5 = PrimeField::new(5).unwrap();
        let p = FqPoly::new(f5, &[1, 2, 5, 10]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(FqPoly::zero(f5).degree(), None);
    }

    #[test]
    fn shifted_power_matches_pointwise() {
        let f7 = PrimeField::new(7).unwrap();
        let p = FqPoly::shifted_power(f7, 3, 4);
        for x in 0..7 {
            assert_eq!(p.eval_raw(x), f7.pow_raw(x + 3, 4));
        }
    }

    fn prime_strategy() -> impl Strategy<Value = u64> {
        prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31])
    }

    proptest! {
        #[test]
        fn roots_bounded_by_degree(q in prime_strategy(), coeffs in prop::collection::vec(0u64..1000, 1..=9)) {
            let p = FqPoly::new(PrimeField::new(q).unwrap(), &coeffs);
            if let Some(deg) = p.degree() {
                prop_assert!(p.count_roots().unwrap() <= deg);
            }
        }

        #[test]
        fn horner_matches_power_sum(q in prime_strategy(), coeffs in prop::collection::vec(0u64..1000, 0..=9), x in 0u64..1000) {
            let field = PrimeField::new(q).unwrap();
            let p = FqPoly::new(field, &coeffs);
            let naive = coeffs.iter().enumerate().fold(0u64, |acc, (i, &c)| {
                (acc + (c % q) * field.pow_raw(x, i as u64)) % q
            });
            prop_assert_eq!(p.eval(&field.elem(x)).unwrap().value(), naive);
        }
    }
}
