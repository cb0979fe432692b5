//! Reproducible Haar-random unitaries and encoding isometries.
//!
//! Sampler: fill an `N × N` complex Ginibre matrix, take its Householder QR
//! and multiply column `j` of `Q` by the phase `R_jj / |R_jj|`. The result is
//! Haar distributed.
//!
//! Random stream (generator version [`GENERATOR_VERSION`]):
//! * `ChaCha20Rng::seed_from_u64(seed)`,
//! * uniforms `u = ((x >> 11) + 1) · 2⁻⁵³ ∈ (0, 1]` from successive `next_u64`,
//! * one complex Gaussian per Box–Muller pair:
//!   `√(−ln u₁) · (cos 2πu₂ + i sin 2πu₂)`, so `E|z|² = 1`,
//! * the Ginibre matrix is filled column by column, top to bottom.
//!
//! Because columns are drawn in order and the QR reflectors for column `j`
//! only read columns `≤ j`, the first `K` columns of a unitary can be
//! produced without the rest, bit-identically.
//!
//! Child streams for Monte Carlo trial `k` use [`Seed::child`], which mixes
//! `(seed, k)` through the SplitMix64 finalizer.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{qr_thin, ComplexMatrix, StateVector};

pub const GENERATOR_VERSION: &str = "chacha20-boxmuller-splitmix/v1";
pub const MAX_DIM: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    pub fn value(self) -> u64 {
        self.0
    }

    /// Seed of the `k`-th child stream.
    pub fn child(self, k: u64) -> Seed {
        let mut z = self
            .0
            .wrapping_add(k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        Seed(z ^ (z >> 31))
    }

    pub fn rng(self) -> GaussianStream {
        GaussianStream::new(self)
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

/// Deterministic source of uniforms and complex Gaussians.
pub struct GaussianStream {
    rng: ChaCha20Rng,
}

impl GaussianStream {
    pub fn new(seed: Seed) -> Self {
        Self {
            rng: ChaCha20Rng::seed_from_u64(seed.0),
        }
    }

    /// Uniform on `(0, 1]`.
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform integer in `[0, bound)` by rejection.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let x = self.rng.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }

    /// Standard complex Gaussian with `E|z|² = 1`.
    pub fn complex_gaussian(&mut self) -> Complex64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        Complex64::new(r * c, r * s)
    }

    /// `rows × cols` Ginibre matrix filled column-major.
    pub fn ginibre(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(rows, cols);
        for c in 0..cols {
            for r in 0..rows {
                m[(r, c)] = self.complex_gaussian();
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseFix {
    Apply,
    /// Raw Householder `Q`; not Haar distributed. Exists for diagnostics.
    Skip,
}

fn sample_columns(n: usize, k: usize, seed: Seed, fix: PhaseFix) -> Result<ComplexMatrix> {
    let mut stream = seed.rng();
    let mut attempt = 0;
    loop {
        let a = stream.ginibre(n, k);
        match qr_thin(&a, k) {
            Ok((mut q, r)) => {
                if fix == PhaseFix::Apply {
                    for j in 0..k {
                        let d = r[(j, j)];
                        let phase = d / d.norm();
                        for i in 0..n {
                            q[(i, j)] *= phase;
                        }
                    }
                }
                return Ok(q);
            }
            // probability zero; draw once more from the same stream
            Err(e @ Error::RankDeficient { .. }) => {
                attempt += 1;
                if attempt > 1 {
                    return Err(e);
                }
            }
            Err(e) => return Err(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HaarUnitary {
    matrix: ComplexMatrix,
}

impl HaarUnitary {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

/// First `K` columns of a Haar unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    matrix: ComplexMatrix,
}

impl Isometry {
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let dev = matrix.isometry_deviation();
        if dev > crate::linalg::STRUCTURAL_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { matrix })
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn k(&self) -> usize {
        self.matrix.cols()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Codeword `|ψ_i⟩ = V|i⟩`.
    pub fn codeword(&self, i: usize) -> StateVector {
        StateVector::unnormalized(self.matrix.column(i))
    }

    /// `V|a⟩` for message amplitudes `a`.
    pub fn encode(&self, amplitudes: &[Complex64]) -> Result<Vec<Complex64>> {
        self.matrix.matvec(amplitudes)
    }
}

fn check_dim(n: usize) -> Result<()> {
    if !(2..=MAX_DIM).contains(&n) {
        return Err(Error::OutOfRange(format!("dimension {n} outside 2..={MAX_DIM}")));
    }
    Ok(())
}

pub fn sample_haar_unitary(n: usize, seed: Seed) -> Result<HaarUnitary> {
    check_dim(n)?;
    Ok(HaarUnitary {
        matrix: sample_columns(n, n, seed, PhaseFix::Apply)?,
    })
}

/// QR unitary with an explicit phase-fix choice.
pub fn sample_qr_unitary(n: usize, seed: Seed, fix: PhaseFix) -> Result<ComplexMatrix> {
    check_dim(n)?;
    sample_columns(n, n, seed, fix)
}

pub fn sample_encoding_isometry(n: usize, k: usize, seed: Seed) -> Result<Isometry> {
    check_dim(n)?;
    if k == 0 || k >= n {
        return Err(Error::OutOfRange(format!("need 1 ≤ K < N, got K = {k}, N = {n}")));
    }
    Ok(Isometry {
        matrix: sample_columns(n, k, seed, PhaseFix::Apply)?,
    })
}
