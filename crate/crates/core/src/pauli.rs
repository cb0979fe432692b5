//! Generalized Pauli operators on `m` qudits of prime dimension `q`.
//!
//! `X^a|x⟩ = |x + a⟩`, `Z^b|x⟩ = ω^{bx}|x⟩` with `ω = e^{2πi/q}`. A label
//! `(x, z)` denotes `⊗_i X^{x_i} Z^{z_i}` (X to the left of Z inside each
//! register); global phases are not tracked.
//!
//! Basis ordering follows the Kronecker product: register 0 is the most
//! significant digit of the basis index.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::haar::Seed;
use crate::linalg::{ComplexMatrix, STRUCTURAL_TOL, ZERO};

pub const MAX_DIM: u64 = 4096;

/// `ω^k` for `k = 0..q`.
pub fn roots_of_unity(q: u64) -> Vec<Complex64> {
    (0..q)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / q as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliLabel {
    q: u64,
    m: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliLabel {
    pub fn new(q: u64, x: Vec<u64>, z: Vec<u64>) -> Result<Self> {
        PrimeField::new(q)?;
        if x.len() != z.len() {
            return Err(Error::DimMismatch(format!(
                "x has {} registers, z has {}",
                x.len(),
                z.len()
            )));
        }
        let m = x.len();
        let x = x.into_iter().map(|v| v % q).collect();
        let z = z.into_iter().map(|v| v % q).collect();
        Ok(Self { q, m, x, z })
    }

    pub fn identity(q: u64, m: usize) -> Result<Self> {
        Self::new(q, vec![0; m], vec![0; m])
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn registers(&self) -> usize {
        self.m
    }

    pub fn x(&self) -> &[u64] {
        &self.x
    }

    pub fn z(&self) -> &[u64] {
        &self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&v| v == 0)
    }

    /// `q^m`, or `None` on overflow.
    pub fn dim(&self) -> Option<u64> {
        self.q.checked_pow(self.m as u32)
    }

    pub(crate) fn checked_dim(&self) -> Result<usize> {
        match self.dim() {
            Some(d) if d <= MAX_DIM => Ok(d as usize),
            _ => Err(Error::OutOfRange(format!(
                "q^m = {}^{} exceeds {MAX_DIM}",
                self.q, self.m
            ))),
        }
    }

    /// Label of the product `self · other`, ignoring the phase.
    pub fn product_label(&self, other: &Self) -> Result<Self> {
        if self.q != other.q || self.m != other.m {
            return Err(Error::DimMismatch("Pauli labels of different shape".into()));
        }
        let add = |a: &[u64], b: &[u64]| a.iter().zip(b).map(|(u, v)| (u + v) % self.q).collect();
        Self::new(self.q, add(&self.x, &other.x), add(&self.z, &other.z))
    }

    /// Applies the operator to a state vector of length `q^m` without
    /// materializing the matrix.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let dim = self.checked_dim()?;
        if v.len() != dim {
            return Err(Error::DimMismatch(format!(
                "Pauli on dimension {dim} applied to length {}",
                v.len()
            )));
        }
        let omega = roots_of_unity(self.q);
        let mut out = vec![ZERO; dim];
        let mut digits = vec![0u64; self.m];
        for (idx, amp) in v.iter().enumerate() {
            let (target, phase) = self.image(idx, &mut digits);
            out[target] = omega[phase as usize] * amp;
        }
        Ok(out)
    }

    /// Basis index reached from `idx` and the phase exponent picked up.
    pub(crate) fn image(&self, idx: usize, digits: &mut [u64]) -> (usize, u64) {
        let q = self.q;
        let mut rest = idx as u64;
        for d in digits.iter_mut().rev() {
            *d = rest % q;
            rest /= q;
        }
        let mut phase = 0u64;
        let mut target = 0u64;
        for ((d, x), z) in digits.iter().zip(&self.x).zip(&self.z) {
            phase = (phase + z * d) % q;
            target = target * q + (d + x) % q;
        }
        (target as usize, phase)
    }

    /// Dense `q^m × q^m` matrix.
    pub fn matrix(&self) -> Result<ComplexMatrix> {
        let dim = self.checked_dim()?;
        let omega = roots_of_unity(self.q);
        let mut m = ComplexMatrix::zeros(dim, dim);
        let mut digits = vec![0u64; self.m];
        for col in 0..dim {
            let (row, phase) = self.image(col, &mut digits);
            m[(row, col)] = omega[phase as usize];
        }
        Ok(m)
    }

    /// Dense matrix built factor by factor with Kronecker products; an
    /// independent route to [`matrix`](Self::matrix).
    pub fn matrix_by_tensor(&self) -> Result<ComplexMatrix> {
        self.checked_dim()?;
        let mut acc = ComplexMatrix::identity(1);
        for (&a, &b) in self.x.iter().zip(&self.z) {
            let factor = shift_matrix(self.q, a).matmul(&clock_matrix(self.q, b))?;
            acc = acc.tensor(&factor);
        }
        Ok(acc)
    }

    /// Trace computed symbolically: `q^m` for the identity, else 0.
    pub fn trace(&self) -> Complex64 {
        if self.is_identity() {
            Complex64::new(self.q.pow(self.m as u32) as f64, 0.0)
        } else {
            ZERO
        }
    }
}

impl fmt::Display for PauliLabel {
    /// `q:x-digits:z-digits`, digits comma-separated when `q > 10`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.q > 10 { "," } else { "" };
        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(sep);
        write!(f, "{}:{}:{}", self.q, join(&self.x), join(&self.z))
    }
}

impl FromStr for PauliLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Input(format!("bad Pauli label {s:?}, expected q:x-digits:z-digits"));
        let mut parts = s.split(':');
        let (Some(q), Some(x), Some(z), None) = (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(bad());
        };
        let q: u64 = q.parse().map_err(|_| bad())?;
        let digits = |t: &str| -> Result<Vec<u64>> {
            if t.contains(',') {
                t.split(',').map(|d| d.trim().parse().map_err(|_| bad())).collect()
            } else {
                t.chars()
                    .map(|c| c.to_digit(10).map(u64::from).ok_or_else(bad))
                    .collect()
            }
        };
        let (x, z) = (digits(x)?, digits(z)?);
        if x.iter().chain(&z).any(|&d| d >= q) {
            return Err(bad());
        }
        Self::new(q, x, z)
    }
}

/// `X^a` on one qudit.
pub fn shift_matrix(q: u64, a: u64) -> ComplexMatrix {
    let d = q as usize;
    let mut m = ComplexMatrix::zeros(d, d);
    for x in 0..d {
        m[((x + a as usize) % d, x)] = Complex64::new(1.0, 0.0);
    }
    m
}

/// `Z^b` on one qudit.
pub fn clock_matrix(q: u64, b: u64) -> ComplexMatrix {
    let omega = roots_of_unity(q);
    let diag: Vec<Complex64> = (0..q).map(|x| omega[((b * x) % q) as usize]).collect();
    ComplexMatrix::diagonal(&diag)
}

/// If `a = λ·b` for a scalar `λ`, returns `λ`.
pub fn proportionality(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    let (row, col) = (0..b.rows())
        .flat_map(|r| (0..b.cols()).map(move |c| (r, c)))
        .max_by(|&x, &y| b[x].norm().total_cmp(&b[y].norm()))
        .ok_or(Error::NonScalarMismatch)?;
    if b[(row, col)].norm() < STRUCTURAL_TOL {
        return Err(Error::NonScalarMismatch);
    }
    let lambda = a[(row, col)] / b[(row, col)];
    if a.max_abs_diff(&b.scale(lambda))? > 1e-9 {
        return Err(Error::NonScalarMismatch);
    }
    Ok(lambda)
}

/// The scalar `λ` with `X^a Z^b = λ Z^b X^a`, measured on dense matrices.
/// Expected value: `ω^{−ab}`.
pub fn twisted_commutator(a: u64, b: u64, q: u64) -> Result<Complex64> {
    PrimeField::new(q)?;
    if q > MAX_DIM {
        return Err(Error::OutOfRange(format!("q = {q} exceeds {MAX_DIM}")));
    }
    let xz = shift_matrix(q, a).matmul(&clock_matrix(q, b))?;
    let zx = clock_matrix(q, b).matmul(&shift_matrix(q, a))?;
    proportionality(&xz, &zx)
}

/// `count` distinct non-identity labels on `m` registers, drawn uniformly
/// with a seeded stream and returned in draw order.
pub fn random_distinct_labels(q: u64, m: usize, count: usize, seed: Seed) -> Result<Vec<PauliLabel>> {
    let total = q
        .checked_pow(2 * m as u32)
        .ok_or_else(|| Error::OutOfRange("label space too large".into()))?;
    if count as u64 > total - 1 {
        return Err(Error::OutOfRange(format!(
            "only {} non-identity labels exist",
            total - 1
        )));
    }
    let mut rng = seed.rng();
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: Vec<u64> = (0..m).map(|_| rng.below(q)).collect();
        let z: Vec<u64> = (0..m).map(|_| rng.below(q)).collect();
        let label = PauliLabel::new(q, x, z)?;
        if label.is_identity() || !seen.insert(label.clone()) {
            continue;
        }
        out.push(label);
    }
    Ok(out)
}
