//! Haar-random encoding schemes under unitary tampering.
//!
//! A scheme encodes `K = 2^k` messages into `N = 2^n` dimensions with a Haar
//! isometry `V`. Decoding measures `{Π_1, …, Π_K, Π_⊥}` with `Π_i = |ψ_i⟩⟨ψ_i|`
//! (classical messages) or `{Π, Π_⊥}` followed by `V†` (quantum messages).
//!
//! Every decode returns a three-way split `P_same + P_diff + P_perp = 1`:
//! * classical and relaxed: the POVM outcomes for message `s`,
//! * quantum: `V|a⟩⟨a|V†`, `Π − V|a⟩⟨a|V†`, `Π_⊥` for message `a`,
//! * weak: the classical split averaged over the maximally mixed message.
//!
//! `P_perp` is always computed as the squared norm of the residual outside
//! the code space, independently of the in-code weights, so conservation is
//! a genuine check.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haar::{sample_encoding_isometry, Seed, GENERATOR_VERSION};
use crate::linalg::{inner_slices, norm_sqr, ComplexMatrix, ZERO};
use crate::operator::Operator;
use crate::pauli::random_distinct_labels;

pub const MAX_DIM: usize = 4096;
pub const MAX_FAMILY: usize = 10_000;
pub const CONSERVATION_TOL: f64 = 1e-9;
/// Below this pass probability the conditional fidelity is undefined.
pub const PASS_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct EncodingScheme {
    n: u32,
    k: u32,
    seed: Seed,
    /// Columns of the isometry.
    codewords: Vec<Vec<Complex64>>,
}

pub fn build_scheme(n: u32, k: u32, seed: Seed) -> Result<EncodingScheme> {
    if n == 0 || n > 12 {
        return Err(Error::OutOfRange(format!("need 1 ≤ n ≤ 12, got {n}")));
    }
    if k >= n {
        return Err(Error::OutOfRange(format!("need k < n, got k = {k}, n = {n}")));
    }
    let v = sample_encoding_isometry(1 << n, 1 << k, seed)?;
    let codewords = (0..v.k()).map(|c| v.matrix().column(c)).collect();
    Ok(EncodingScheme { n, k, seed, codewords })
}

impl EncodingScheme {
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn messages(&self) -> usize {
        1 << self.k
    }

    pub fn seed(&self) -> Seed {
        self.seed
    }

    pub fn codeword(&self, i: usize) -> &[Complex64] {
        &self.codewords[i]
    }

    pub fn isometry(&self) -> ComplexMatrix {
        ComplexMatrix::from_columns(&self.codewords).expect("equal lengths")
    }

    /// `Π_i = |ψ_i⟩⟨ψ_i|`.
    pub fn codeword_projector(&self, i: usize) -> Result<ComplexMatrix> {
        if i >= self.messages() {
            return Err(Error::OutOfRange(format!("message {i} outside [0, {})", self.messages())));
        }
        let v = ComplexMatrix::from_columns(&self.codewords[i..=i])?;
        v.matmul(&v.adjoint())
    }

    /// `Π = V V†`.
    pub fn subspace_projector(&self) -> ComplexMatrix {
        let v = self.isometry();
        v.matmul(&v.adjoint()).expect("shapes agree")
    }

    /// `Π_⊥ = 𝕀 − Π`.
    pub fn perp_projector(&self) -> ComplexMatrix {
        ComplexMatrix::identity(self.dim())
            .sub(&self.subspace_projector())
            .expect("same shape")
    }

    /// `(V†φ, ‖φ − VV†φ‖²)`.
    fn split(&self, phi: &[Complex64]) -> (Vec<Complex64>, f64) {
        let coeffs: Vec<Complex64> = self.codewords.iter().map(|c| inner_slices(c, phi)).collect();
        let mut residual = phi.to_vec();
        for (c, w) in coeffs.iter().zip(&self.codewords) {
            for (r, x) in residual.iter_mut().zip(w) {
                *r -= c * x;
            }
        }
        (coeffs, norm_sqr(&residual))
    }

    fn check_operator(&self, u: &Operator) -> Result<()> {
        if u.dim() != self.dim() {
            return Err(Error::DimMismatch(format!(
                "operator of dimension {} on a scheme of dimension {}",
                u.dim(),
                self.dim()
            )));
        }
        Ok(())
    }

    fn check_message(&self, s: usize) -> Result<()> {
        if s >= self.messages() {
            return Err(Error::OutOfRange(format!("message {s} outside [0, {})", self.messages())));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub p_same: f64,
    pub p_diff: f64,
    pub p_perp: f64,
}

impl Outcome {
    pub fn total(&self) -> f64 {
        self.p_same + self.p_diff + self.p_perp
    }

    pub fn conserves(&self) -> bool {
        (self.total() - 1.0).abs() <= CONSERVATION_TOL
    }
}

fn classical_unchecked(scheme: &EncodingScheme, u: &Operator, s: usize) -> Result<Outcome> {
    let phi = u.apply(scheme.codeword(s))?;
    let (coeffs, p_perp) = scheme.split(&phi);
    let p_same = coeffs[s].norm_sqr();
    let p_diff = coeffs
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != s)
        .map(|(_, c)| c.norm_sqr())
        .sum();
    Ok(Outcome { p_same, p_diff, p_perp })
}

/// Decoder statistics for classical message `s` under `U`.
pub fn detect_classical(scheme: &EncodingScheme, u: &Operator, s: usize) -> Result<Outcome> {
    scheme.check_operator(u)?;
    scheme.check_message(s)?;
    u.check_unitary()?;
    classical_unchecked(scheme, u, s)
}

/// `P_same + P_perp`: the decoder outputs `s` or rejects.
pub fn detect_relaxed(scheme: &EncodingScheme, u: &Operator, s: usize) -> Result<f64> {
    let o = detect_classical(scheme, u, s)?;
    Ok(o.p_same + o.p_perp)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumOutcome {
    pub outcome: Outcome,
    /// `Tr(Π U Enc(ψ) U†)`.
    pub p_pass: f64,
    /// Fidelity of the decoded state with `ψ` given the pass outcome;
    /// `None` when `p_pass` is below [`PASS_FLOOR`].
    pub fidelity_given_pass: Option<f64>,
}

fn quantum_unchecked(scheme: &EncodingScheme, u: &Operator, amplitudes: &[Complex64]) -> Result<QuantumOutcome> {
    let mut encoded = vec![ZERO; scheme.dim()];
    for (a, c) in amplitudes.iter().zip(&scheme.codewords) {
        for (e, x) in encoded.iter_mut().zip(c) {
            *e += a * x;
        }
    }
    let phi = u.apply(&encoded)?;
    let (coeffs, p_perp) = scheme.split(&phi);
    let p_pass = norm_sqr(&coeffs);
    // ⟨ψ|V† Π U Enc(ψ) U† Π V|ψ⟩ = |⟨a|V†φ⟩|²
    let overlap = inner_slices(amplitudes, &coeffs).norm_sqr();
    Ok(QuantumOutcome {
        outcome: Outcome {
            p_same: overlap,
            p_diff: p_pass - overlap,
            p_perp,
        },
        p_pass,
        fidelity_given_pass: (p_pass >= PASS_FLOOR).then(|| overlap / p_pass),
    })
}

/// Two-step quantum decoder for the message with amplitudes `a`.
pub fn detect_quantum(scheme: &EncodingScheme, u: &Operator, amplitudes: &[Complex64]) -> Result<QuantumOutcome> {
    scheme.check_operator(u)?;
    if amplitudes.len() != scheme.messages() {
        return Err(Error::DimMismatch(format!(
            "{} amplitudes for K = {}",
            amplitudes.len(),
            scheme.messages()
        )));
    }
    let norm = norm_sqr(amplitudes).sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    u.check_unitary()?;
    quantum_unchecked(scheme, u, amplitudes)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakOutcome {
    /// `Tr(Π U Enc(𝕀/K) U†)` from the code-space residuals.
    pub x: f64,
    /// `(1/K) Σ_{i,j} |⟨ψ_i|U|ψ_j⟩|²`.
    pub x_pairwise: f64,
    pub outcome: Outcome,
}

fn weak_unchecked(scheme: &EncodingScheme, u: &Operator) -> Result<WeakOutcome> {
    let kf = scheme.messages() as f64;
    let mut same = 0.0;
    let mut pairwise = 0.0;
    let mut perp = 0.0;
    for s in 0..scheme.messages() {
        let phi = u.apply(scheme.codeword(s))?;
        let (coeffs, residual) = scheme.split(&phi);
        same += coeffs[s].norm_sqr();
        pairwise += norm_sqr(&coeffs);
        perp += residual;
    }
    let x = 1.0 - perp / kf;
    let x_pairwise = pairwise / kf;
    if (x - x_pairwise).abs() > CONSERVATION_TOL {
        return Err(Error::Consistency(format!(
            "weak detection paths disagree: {x} vs {x_pairwise}"
        )));
    }
    Ok(WeakOutcome {
        x,
        x_pairwise,
        outcome: Outcome {
            p_same: same / kf,
            p_diff: (pairwise - same) / kf,
            p_perp: perp / kf,
        },
    })
}

/// Pass probability for the maximally mixed message; both computation
/// paths are evaluated and must agree.
pub fn detect_weak(scheme: &EncodingScheme, u: &Operator) -> Result<WeakOutcome> {
    scheme.check_operator(u)?;
    u.check_unitary()?;
    weak_unchecked(scheme, u)
}

#[derive(Debug, Clone)]
pub struct UnitaryFamily {
    members: Vec<(String, Operator)>,
    trace_bound_phi: Option<f64>,
    description: String,
}

impl UnitaryFamily {
    /// Validates unitarity, shape and the declared trace bound.
    pub fn new(description: impl Into<String>, members: Vec<(String, Operator)>, trace_bound_phi: Option<f64>) -> Result<Self> {
        let Some((_, first)) = members.first() else {
            return Err(Error::InvalidParams("empty unitary family".into()));
        };
        if members.len() > MAX_FAMILY {
            return Err(Error::OutOfRange(format!("family of {} exceeds {MAX_FAMILY}", members.len())));
        }
        let dim = first.dim();
        for (label, u) in &members {
            if u.dim() != dim {
                return Err(Error::DimMismatch(format!("member {label} has dimension {}", u.dim())));
            }
            u.check_unitary()?;
            if let Some(phi) = trace_bound_phi {
                let tr = u.trace().norm();
                if tr > phi * dim as f64 + 1e-9 {
                    return Err(Error::InvalidParams(format!(
                        "member {label} has |Tr U| = {tr} > φN = {}",
                        phi * dim as f64
                    )));
                }
            }
        }
        Ok(Self {
            members,
            trace_bound_phi,
            description: description.into(),
        })
    }

    /// `count` distinct non-identity qubit Paulis on `n` qubits, `φ = 0`.
    pub fn random_paulis(n: u32, count: usize, seed: Seed) -> Result<Self> {
        let members = random_distinct_labels(2, n as usize, count, seed)?
            .into_iter()
            .map(|l| Ok((l.to_string(), Operator::pauli(l)?)))
            .collect::<Result<_>>()?;
        Self::new(format!("paulis:{count}"), members, Some(0.0))
    }

    pub fn members(&self) -> &[(String, Operator)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].1.dim()
    }

    pub fn trace_bound_phi(&self) -> Option<f64> {
        self.trace_bound_phi
    }

    pub fn description(&self) -> &str {
        &self.description
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionMode {
    #[default]
    Classical,
    Relaxed,
    Weak,
    Quantum,
}

impl DetectionMode {
    /// Constant `c` in the advisory condition `n(β − α) ≥ k + λ + c`.
    fn slack(self) -> f64 {
        match self {
            Self::Relaxed => 1.0,
            _ => 5.0,
        }
    }

    fn needs_trace_bound(self) -> bool {
        self != Self::Relaxed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRow {
    pub seed: u64,
    pub member: String,
    /// Basis message index, or `None` for the uniform superposition
    /// (quantum) and the maximally mixed message (weak).
    pub message: Option<usize>,
    pub p_same: f64,
    pub p_diff: f64,
    pub p_perp: f64,
    /// Quantity compared with `1 − ε`.
    pub detection: f64,
    pub fidelity_given_pass: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub min_detection: f64,
    pub worst_member: String,
    pub worst_message: Option<usize>,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        values.fold(
            Range {
                min: f64::INFINITY,
                max: f64::NEG_INFINITY,
            },
            |r, v| Range {
                min: r.min.min(v),
                max: r.max.max(v),
            },
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub n: u32,
    pub k: u32,
    pub mode: DetectionMode,
    pub epsilon: f64,
    pub family: String,
    pub family_size: usize,
    pub trace_bound_phi: Option<f64>,
    pub seeds: Vec<u64>,
    pub generator_version: String,
    pub rows: Vec<CellRow>,
    pub per_seed: Vec<SeedSummary>,
    pub p_same: Range,
    pub p_diff: Range,
    pub p_perp: Range,
    pub mean_p_same: f64,
    pub stderr_p_same: f64,
    pub pass_fraction: f64,
    pub required_pass_fraction: f64,
    pub conservation_violations: usize,
    pub max_conservation_error: f64,
    pub warnings: Vec<String>,
    pub passed: bool,
}

/// Paper parameter inequalities, evaluated in the `α → 0` limit.
pub fn parameter_warnings(n: u32, k: u32, epsilon: f64, phi: Option<f64>, mode: DetectionMode) -> Vec<String> {
    let mut out = Vec::new();
    let lambda = -epsilon.log2();
    let lhs = n as f64 / 6.0;
    let rhs = k as f64 + lambda + mode.slack();
    if lhs < rhs {
        out.push(format!(
            "n(β − α) ≥ k + λ + {} fails even as α → 0: n/6 = {lhs:.4} < {rhs:.4}",
            mode.slack()
        ));
    }
    if mode.needs_trace_bound() {
        let limit = epsilon / (2.0 * (1u64 << k) as f64);
        match phi {
            Some(phi) if phi * phi > limit => {
                out.push(format!("φ² ≤ ε/2K fails: φ² = {} > {limit}", phi * phi));
            }
            None => out.push("no trace bound φ declared; φ² ≤ ε/2K unchecked".into()),
            _ => {}
        }
    }
    out
}

/// Builds one scheme per seed and decodes every (member, message) cell.
pub fn family_security_scan(
    n: u32,
    k: u32,
    family: &UnitaryFamily,
    epsilon: f64,
    seeds: &[Seed],
    mode: DetectionMode,
    required_pass_fraction: f64,
) -> Result<DetectionReport> {
    if seeds.is_empty() {
        return Err(Error::OutOfRange("need at least one seed".into()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParams(format!("ε = {epsilon} outside (0, 1)")));
    }
    if family.dim() != 1 << n {
        return Err(Error::DimMismatch(format!(
            "family dimension {} but N = 2^{n}",
            family.dim()
        )));
    }
    let per_seed_rows: Vec<Vec<CellRow>> = seeds
        .par_iter()
        .map(|&seed| -> Result<Vec<CellRow>> {
            let scheme = build_scheme(n, k, seed)?;
            let kk = scheme.messages();
            let mut rows = Vec::new();
            for (label, u) in family.members() {
                let mut push = |message: Option<usize>, o: Outcome, detection: f64, fid: Option<f64>| {
                    rows.push(CellRow {
                        seed: seed.0,
                        member: label.clone(),
                        message,
                        p_same: o.p_same,
                        p_diff: o.p_diff,
                        p_perp: o.p_perp,
                        detection,
                        fidelity_given_pass: fid,
                    })
                };
                match mode {
                    DetectionMode::Classical | DetectionMode::Relaxed => {
                        for s in 0..kk {
                            let o = classical_unchecked(&scheme, u, s)?;
                            let d = if mode == DetectionMode::Relaxed {
                                o.p_same + o.p_perp
                            } else {
                                o.p_perp
                            };
                            push(Some(s), o, d, None);
                        }
                    }
                    DetectionMode::Quantum => {
                        let amp = Complex64::new(1.0 / (kk as f64).sqrt(), 0.0);
                        let q = quantum_unchecked(&scheme, u, &vec![amp; kk])?;
                        push(None, q.outcome, q.outcome.p_perp, q.fidelity_given_pass);
                    }
                    DetectionMode::Weak => {
                        let w = weak_unchecked(&scheme, u)?;
                        push(None, w.outcome, w.outcome.p_perp, None);
                    }
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;

    let threshold = 1.0 - epsilon;
    let per_seed: Vec<SeedSummary> = seeds
        .iter()
        .zip(&per_seed_rows)
        .map(|(seed, rows)| {
            // first minimum in row order
            let worst = rows
                .iter()
                .fold(None::<&CellRow>, |best, r| match best {
                    Some(b) if b.detection <= r.detection => Some(b),
                    _ => Some(r),
                })
                .expect("family is nonempty");
            SeedSummary {
                seed: seed.0,
                min_detection: worst.detection,
                worst_member: worst.member.clone(),
                worst_message: worst.message,
                passed: worst.detection >= threshold,
            }
        })
        .collect();
    let rows: Vec<CellRow> = per_seed_rows.into_iter().flatten().collect();

    let count = rows.len() as f64;
    let mean_p_same = rows.iter().map(|r| r.p_same).sum::<f64>() / count;
    let var = if rows.len() > 1 {
        rows.iter().map(|r| (r.p_same - mean_p_same).powi(2)).sum::<f64>() / (count - 1.0)
    } else {
        0.0
    };
    let errors: Vec<f64> = rows
        .iter()
        .map(|r| (r.p_same + r.p_diff + r.p_perp - 1.0).abs())
        .collect();
    let conservation_violations = errors.iter().filter(|&&e| e > CONSERVATION_TOL).count();
    let pass_fraction = per_seed.iter().filter(|s| s.passed).count() as f64 / seeds.len() as f64;
    Ok(DetectionReport {
        n,
        k,
        mode,
        epsilon,
        family: family.description().to_string(),
        family_size: family.len(),
        trace_bound_phi: family.trace_bound_phi(),
        seeds: seeds.iter().map(|s| s.0).collect(),
        generator_version: GENERATOR_VERSION.to_string(),
        p_same: Range::of(rows.iter().map(|r| r.p_same)),
        p_diff: Range::of(rows.iter().map(|r| r.p_diff)),
        p_perp: Range::of(rows.iter().map(|r| r.p_perp)),
        mean_p_same,
        stderr_p_same: (var / count).sqrt(),
        pass_fraction,
        required_pass_fraction,
        conservation_violations,
        max_conservation_error: errors.iter().copied().fold(0.0, f64::max),
        warnings: parameter_warnings(n, k, epsilon, family.trace_bound_phi(), mode),
        passed: pass_fraction >= required_pass_fraction && conservation_violations == 0,
        per_seed,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::sample_haar_unitary;
    use crate::pauli::PauliLabel;

    fn identity(n: usize) -> Operator {
        Operator::dense(ComplexMatrix::identity(n)).unwrap()
    }

    fn pauli(s: &str) -> Operator {
        Operator::pauli(s.parse::<PauliLabel>().unwrap()).unwrap()
    }

    #[test]
    fn scheme_structure() {
        let s = build_scheme(3, 1, Seed(1)).unwrap();
        assert_eq!((s.dim(), s.messages()), (8, 2));
        let p0 = s.codeword_projector(0).unwrap();
        let p1 = s.codeword_projector(1).unwrap();
        assert!(p0.matmul(&p1).unwrap().max_abs() < 1e-10);
        let pi = s.subspace_projector();
        assert!(pi.matmul(&pi).unwrap().max_abs_diff(&pi).unwrap() < 1e-10);
        let perp = s.perp_projector();
        assert!((perp.trace().unwrap().re - 6.0).abs() < 1e-9);
        let again = build_scheme(3, 1, Seed(1)).unwrap();
        assert_eq!(again.codeword_projector(1).unwrap(), p1);
        assert!(build_scheme(3, 3, Seed(0)).is_err());
        assert!(build_scheme(13, 1, Seed(0)).is_err());
    }

    #[test]
    fn no_tampering() {
        let s = build_scheme(4, 1, Seed(2)).unwrap();
        for m in 0..2 {
            let o = detect_classical(&s, &identity(16), m).unwrap();
            assert!((o.p_same - 1.0).abs() < 1e-12 && o.p_perp < 1e-12);
            assert!((detect_relaxed(&s, &identity(16), m).unwrap() - 1.0).abs() < 1e-12);
        }
        let amps = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let q = detect_quantum(&s, &identity(16), &amps).unwrap();
        assert!(q.outcome.p_perp < 1e-12);
        assert!((q.fidelity_given_pass.unwrap() - 1.0).abs() < 1e-12);
        let w = detect_weak(&s, &identity(16)).unwrap();
        assert!((w.x - 1.0).abs() < 1e-12);
    }

    #[test]
    fn global_phase_and_consistency() {
        let s = build_scheme(4, 2, Seed(3)).unwrap();
        let u = Operator::dense(sample_haar_unitary(16, Seed(4)).unwrap().into_matrix()).unwrap();
        let phased = u.with_phase(0.7).unwrap();
        for m in 0..4 {
            let a = detect_classical(&s, &u, m).unwrap();
            let b = detect_classical(&s, &phased, m).unwrap();
            assert!((a.p_same - b.p_same).abs() < 1e-10);
            assert!((a.p_diff - b.p_diff).abs() < 1e-10);
            assert!((a.p_perp - b.p_perp).abs() < 1e-10);
            assert!(a.conserves());
            assert!(detect_relaxed(&s, &u, m).unwrap() >= a.p_perp);
            let mut e = vec![ZERO; 4];
            e[m] = Complex64::new(1.0, 0.0);
            let q = detect_quantum(&s, &u, &e).unwrap();
            assert!((q.outcome.p_perp - a.p_perp).abs() < 1e-10);
            assert!(q.outcome.conserves());
        }
        let w = detect_weak(&s, &u).unwrap();
        assert!((w.x - w.x_pairwise).abs() < 1e-9);
        assert!((w.x - detect_weak(&s, &phased).unwrap().x).abs() < 1e-10);
    }

    #[test]
    fn single_message_weak_is_x_ss() {
        let s = build_scheme(3, 0, Seed(8)).unwrap();
        let u = pauli("2:101:011");
        let w = detect_weak(&s, &u).unwrap();
        let o = detect_classical(&s, &u, 0).unwrap();
        assert!((w.x - o.p_same).abs() < 1e-12);
    }

    #[test]
    fn quantum_rejects_bad_amplitudes() {
        let s = build_scheme(3, 1, Seed(8)).unwrap();
        let u = identity(8);
        assert!(matches!(
            detect_quantum(&s, &u, &[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(detect_classical(&s, &u, 2), Err(Error::OutOfRange(_))));
        assert!(matches!(detect_classical(&s, &identity(4), 0), Err(Error::DimMismatch(_))));
    }

    #[test]
    fn family_rejects_identity_under_trace_bound() {
        let fam = UnitaryFamily::new("id", vec![("I".into(), identity(8))], Some(0.5));
        assert!(matches!(fam, Err(Error::InvalidParams(_))));
        assert!(UnitaryFamily::new("id", vec![("I".into(), identity(8))], None).is_ok());
    }

    #[test]
    fn small_family_scan() {
        let fam = UnitaryFamily::random_paulis(6, 20, Seed(1)).unwrap();
        let seeds: Vec<Seed> = (0..5).map(Seed).collect();
        let rep = family_security_scan(6, 1, &fam, 0.25, &seeds, DetectionMode::Classical, 0.9).unwrap();
        assert_eq!(rep.rows.len(), 5 * 20 * 2);
        assert_eq!(rep.conservation_violations, 0);
        assert!(!rep.warnings.is_empty());
        // adding members never raises the minimum
        let mut members = fam.members().to_vec();
        members.push(("extra".into(), pauli("2:111111:000000")));
        let bigger = UnitaryFamily::new("bigger", members, Some(0.0)).unwrap();
        let rep2 = family_security_scan(6, 1, &bigger, 0.25, &seeds, DetectionMode::Classical, 0.9).unwrap();
        for (a, b) in rep.per_seed.iter().zip(&rep2.per_seed) {
            assert!(b.min_detection <= a.min_detection);
        }
        for mode in [DetectionMode::Relaxed, DetectionMode::Weak, DetectionMode::Quantum] {
            let r = family_security_scan(6, 1, &fam, 0.25, &seeds, mode, 0.9).unwrap();
            assert_eq!(r.conservation_violations, 0, "{mode:?}");
        }
    }
}
