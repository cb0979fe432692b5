//! Tampering operators: dense unitaries or structured Pauli labels.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ZERO};
use crate::pauli::{roots_of_unity, PauliLabel};

#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    Dense(ComplexMatrix),
    /// Applied through its permutation-with-phases structure.
    Pauli(PauliLabel),
}

impl Operator {
    /// Wraps a dense matrix after checking unitarity.
    pub fn dense(m: ComplexMatrix) -> Result<Self> {
        m.check_unitary()?;
        Ok(Self::Dense(m))
    }

    pub fn pauli(label: PauliLabel) -> Result<Self> {
        label.checked_dim()?;
        Ok(Self::Pauli(label))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Dense(m) => m.rows(),
            Self::Pauli(l) => l.dim().expect("checked at construction") as usize,
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        match self {
            Self::Dense(m) => m.matvec(v),
            Self::Pauli(l) => l.apply(v),
        }
    }

    /// Row vector `⟨bra| U`, so that `⟨bra|U|v⟩ = Σ_c row_c v_c`.
    pub fn bra_apply(&self, bra: &[Complex64]) -> Result<Vec<Complex64>> {
        if bra.len() != self.dim() {
            return Err(Error::DimMismatch(format!(
                "operator on dimension {} applied to length {}",
                self.dim(),
                bra.len()
            )));
        }
        match self {
            Self::Dense(m) => Ok(m.vecmat_adjoint(bra)),
            Self::Pauli(l) => {
                let omega = roots_of_unity(l.q());
                let mut digits = vec![0; l.registers()];
                Ok((0..bra.len())
                    .map(|c| {
                        let (row, phase) = l.image(c, &mut digits);
                        bra[row].conj() * omega[phase as usize]
                    })
                    .collect())
            }
        }
    }

    pub fn trace(&self) -> Complex64 {
        match self {
            Self::Dense(m) => m.trace().expect("square"),
            Self::Pauli(l) => l.trace(),
        }
    }

    pub fn matrix(&self) -> Result<ComplexMatrix> {
        match self {
            Self::Dense(m) => Ok(m.clone()),
            Self::Pauli(l) => l.matrix(),
        }
    }

    pub fn check_unitary(&self) -> Result<()> {
        match self {
            Self::Dense(m) => m.check_unitary(),
            Self::Pauli(_) => Ok(()),
        }
    }

    /// `e^{iθ} U` as a dense operator.
    pub fn with_phase(&self, theta: f64) -> Result<Self> {
        Ok(Self::Dense(self.matrix()?.scale(Complex64::from_polar(1.0, theta))))
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Dense(m) => write!(f, "dense{}x{}", m.rows(), m.cols()),
            Self::Pauli(l) => write!(f, "pauli:{l}"),
        }
    }
}

/// `⟨u| U |v⟩`.
pub fn matrix_element(u: &[Complex64], op: &Operator, v: &[Complex64]) -> Result<Complex64> {
    let row = op.bra_apply(u)?;
    if row.len() != v.len() {
        return Err(Error::DimMismatch("vector length".into()));
    }
    Ok(row.iter().zip(v).fold(ZERO, |acc, (a, b)| acc + a * b))
}
