//! Dense complex vectors and matrices.
//!
//! Row-major storage, `Complex64` entries. Sized for the laboratory's needs
//! (dimension up to 4096), not for speed records.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for structural identities (unitarity, idempotence, ...).
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Pivot threshold for rank tests.
pub const RANK_TOL: f64 = 1e-12;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `⟨u|v⟩`, conjugate-linear in `u`.
pub fn inner_slices(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes without checking the norm.
    pub fn unnormalized(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    /// Wraps amplitudes that must already have unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = norm_sqr(&amplitudes).sqrt();
        if (norm - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amplitudes).sqrt()
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch(format!(
                "inner of dims {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(inner_slices(&self.amplitudes, &other.amplitudes))
    }

    /// `|self⟩⟨self|`.
    pub fn projector(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        m
    }
}

pub fn inner(u: &StateVector, v: &StateVector) -> Result<Complex64> {
    u.inner(v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimMismatch("ragged rows".into()));
        }
        Self::from_row_major(r, c, rows.concat())
    }

    /// Builds a matrix from its columns.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self> {
        let c = columns.len();
        let r = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|col| col.len() != r) {
            return Err(Error::DimMismatch("ragged columns".into()));
        }
        let mut m = Self::zeros(r, c);
        for (j, col) in columns.iter().enumerate() {
            for (i, &z) in col.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        Ok(m)
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimMismatch(format!(
                "matmul {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.cols != v.len() {
            return Err(Error::DimMismatch(format!(
                "matvec {}x{} by vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `v† M`, returned as a row.
    pub fn vecmat_adjoint(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.cols];
        for (r, vr) in v.iter().enumerate() {
            let c = vr.conj();
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                *o += c * a;
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::DimMismatch(format!(
                "trace of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    /// Kronecker product: `(A ⊗ B)[(i1,i2),(j1,j2)] = A[i1,j1]·B[i2,j2]`.
    pub fn tensor(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self[(i1, j1)];
                if a == ZERO {
                    continue;
                }
                for i2 in 0..other.rows {
                    for j2 in 0..other.cols {
                        out[(i1 * other.rows + i2, j1 * other.cols + j2)] = a * other[(i2, j2)];
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖M†M − 𝕀‖_max`; works for isometries too.
    pub fn isometry_deviation(&self) -> f64 {
        let gram = self.adjoint().matmul(self).expect("shapes agree");
        gram.max_abs_diff(&Self::identity(self.cols)).expect("square")
    }

    pub fn check_unitary(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::DimMismatch("unitary must be square".into()));
        }
        let dev = self.isometry_deviation();
        if dev > STRUCTURAL_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()).unwrap() <= tol
    }
}

/// Householder QR of a tall-or-square matrix: `A = Q R` with `Q` having
/// orthonormal columns (`rows × cols`) and `R` upper triangular (`cols × cols`).
///
/// The diagonal of `R` carries the phases `−e^{i arg x₀}` of the Householder
/// convention; callers that need a canonical phase (Haar sampling) fix it.
pub fn qr_decompose(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    qr_thin(a, a.cols())
}

/// QR restricted to the first `k` columns of `a`. The result is bit-identical
/// to the first `k` columns of `qr_decompose(a)`.
pub fn qr_thin(a: &ComplexMatrix, k: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let m = a.rows();
    if k > a.cols() || k > m {
        return Err(Error::DimMismatch(format!(
            "thin QR of {k} columns from a {}x{} matrix",
            m,
            a.cols()
        )));
    }
    let scale = a.max_abs().max(1.0);
    // Work column-major so each column is updated independently.
    let mut cols: Vec<Vec<Complex64>> = (0..k).map(|c| a.column(c)).collect();
    let mut reflectors: Vec<Vec<Complex64>> = Vec::with_capacity(k);
    let mut r = ComplexMatrix::zeros(k, k);

    for j in 0..k {
        let x = &cols[j][j..];
        let xnorm = norm_sqr(x).sqrt();
        if xnorm < RANK_TOL * scale {
            return Err(Error::RankDeficient {
                column: j,
                pivot: xnorm,
            });
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            ONE
        };
        let alpha = -phase * xnorm;
        let mut v: Vec<Complex64> = x.to_vec();
        v[0] -= alpha;
        let vnorm = norm_sqr(&v).sqrt();
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        r[(j, j)] = alpha;
        for c in (j + 1)..k {
            let tail = &mut cols[c][j..];
            let proj = inner_slices(&v, tail);
            for (t, vi) in tail.iter_mut().zip(&v) {
                *t -= 2.0 * vi * proj;
            }
            r[(j, c)] = cols[c][j];
        }
        reflectors.push(v);
    }

    // Q e_i = H_0 H_1 ⋯ H_i e_i; reflectors beyond i leave e_i untouched.
    let mut q = ComplexMatrix::zeros(m, k);
    for i in 0..k {
        let mut e = vec![ZERO; m];
        e[i] = ONE;
        for j in (0..=i).rev() {
            let v = &reflectors[j];
            let tail = &mut e[j..];
            let proj = inner_slices(v, tail);
            for (t, vi) in tail.iter_mut().zip(v) {
                *t -= 2.0 * vi * proj;
            }
        }
        for (row, z) in e.into_iter().enumerate() {
            q[(row, i)] = z;
        }
    }
    Ok((q, r))
}
