//! Parsing of unitary files, unitary specs, families, amplitudes and seeds.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use qtamper_core::haar::{sample_haar_unitary, Seed};
use qtamper_core::linalg::ComplexMatrix;
use qtamper_core::operator::Operator;
use qtamper_core::pauli::PauliLabel;
use qtamper_core::tamper::UnitaryFamily;
use qtamper_core::{Error, Result};

pub const SEED_ENV: &str = "QTAMPER_SEED";

/// Flag value, else `QTAMPER_SEED`, else 0.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Input(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

/// `A..B` (half-open), `A..=B`, a comma list, or a single seed.
pub fn parse_seed_list(text: &str) -> Result<Vec<u64>> {
    let bad = || Error::Input(format!("bad seed list {text:?}"));
    let num = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
    let seeds: Vec<u64> = if let Some((a, b)) = text.split_once("..=") {
        (num(a)?..=num(b)?).collect()
    } else if let Some((a, b)) = text.split_once("..") {
        (num(a)?..num(b)?).collect()
    } else {
        text.split(',').map(num).collect::<Result<_>>()?
    };
    if seeds.is_empty() {
        return Err(Error::Input(format!("seed list {text:?} is empty")));
    }
    Ok(seeds)
}

/// JSON array of rows, each a list of `[re, im]` pairs.
pub fn read_unitary_file(path: &Path) -> Result<ComplexMatrix> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(&text).map_err(|e| {
        Error::Input(format!(
            "{}: expected a JSON array of rows of [re, im] pairs ({e})",
            path.display()
        ))
    })?;
    let rows: Vec<Vec<Complex64>> = rows
        .into_iter()
        .map(|r| r.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
        .collect();
    let m = ComplexMatrix::from_rows(&rows)
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    if !m.is_square() {
        return Err(Error::Input(format!("{}: matrix is not square", path.display())));
    }
    Ok(m)
}

pub fn write_unitary_file(path: &Path, m: &ComplexMatrix) -> std::io::Result<()> {
    let rows: Vec<Vec<[f64; 2]>> = m
        .to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(|z| [z.re, z.im]).collect())
        .collect();
    fs::write(path, serde_json::to_string(&rows)?)
}

fn pauli_operator(label: &str, dim: Option<usize>) -> Result<Operator> {
    let label: PauliLabel = label.parse()?;
    let op = Operator::pauli(label)?;
    check_dim(&op, dim)?;
    Ok(op)
}

fn check_dim(op: &Operator, dim: Option<usize>) -> Result<()> {
    match dim {
        Some(n) if op.dim() != n => Err(Error::Input(format!(
            "unitary has dimension {}, expected {n}",
            op.dim()
        ))),
        _ => Ok(()),
    }
}

/// `pauli:<label>`, `file:<path>`, `random:<seed>` or `identity`.
pub fn parse_unitary_spec(spec: &str, dim: usize) -> Result<Operator> {
    if let Some(label) = spec.strip_prefix("pauli:") {
        pauli_operator(label, Some(dim))
    } else if let Some(path) = spec.strip_prefix("file:") {
        let op = Operator::dense(read_unitary_file(Path::new(path))?)?;
        check_dim(&op, Some(dim))?;
        Ok(op)
    } else if let Some(seed) = spec.strip_prefix("random:") {
        let seed: u64 = seed
            .parse()
            .map_err(|_| Error::Input(format!("bad seed in unitary spec {spec:?}")))?;
        Operator::dense(sample_haar_unitary(dim, Seed(seed))?.into_matrix())
    } else if spec == "identity" {
        Operator::dense(ComplexMatrix::identity(dim))
    } else {
        Err(Error::Input(format!(
            "unitary spec {spec:?} must be pauli:<label>, file:<path>, random:<seed> or identity"
        )))
    }
}

/// `uniform` or a comma list of complex numbers such as `0.6,0.8i`.
pub fn parse_amplitudes(text: &str, k: usize) -> Result<Vec<Complex64>> {
    if text == "uniform" {
        return Ok(vec![Complex64::new(1.0 / (k as f64).sqrt(), 0.0); k]);
    }
    let amps: Vec<Complex64> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<Complex64>()
                .map_err(|_| Error::Input(format!("bad amplitude {s:?}")))
        })
        .collect::<Result<_>>()?;
    if amps.len() != k {
        return Err(Error::Input(format!("{} amplitudes given for K = {k}", amps.len())));
    }
    Ok(amps)
}

/// `paulis:COUNT` or `file:PATH`.
pub fn parse_family(spec: &str, n: u32, family_seed: u64, phi: Option<f64>) -> Result<UnitaryFamily> {
    if let Some(count) = spec.strip_prefix("paulis:") {
        let count: usize = count
            .parse()
            .map_err(|_| Error::Input(format!("bad family size in {spec:?}")))?;
        UnitaryFamily::random_paulis(n, count, Seed(family_seed))
    } else if let Some(path) = spec.strip_prefix("file:") {
        read_family_file(Path::new(path), 1 << n, phi)
    } else {
        Err(Error::Input(format!("family {spec:?} must be paulis:COUNT or file:PATH")))
    }
}

/// JSON list of entries, each a Pauli label (optionally `pauli:`-prefixed)
/// or a unitary file path (optionally `file:`-prefixed) relative to the
/// family file.
pub fn read_family_file(path: &Path, dim: usize, phi: Option<f64>) -> Result<UnitaryFamily> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    let entries: Vec<String> = serde_json::from_str(&text).map_err(|e| {
        Error::Input(format!("{}: expected a JSON list of strings ({e})", path.display()))
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let members = entries
        .into_iter()
        .map(|entry| {
            let op = if let Some(label) = entry.strip_prefix("pauli:") {
                pauli_operator(label, Some(dim))?
            } else if let Ok(label) = entry.parse::<PauliLabel>() {
                let op = Operator::pauli(label)?;
                check_dim(&op, Some(dim))?;
                op
            } else {
                let rel = entry.strip_prefix("file:").unwrap_or(&entry);
                let file: PathBuf = base.join(rel);
                let op = Operator::dense(read_unitary_file(&file)?)?;
                check_dim(&op, Some(dim))?;
                op
            };
            Ok((entry, op))
        })
        .collect::<Result<_>>()?;
    UnitaryFamily::new(format!("file:{}", path.display()), members, phi)
}
