//! The explicit quantum AMD code.
//!
//! A message `s ∈ F_q^d` is encoded on `d + 2` qudits as
//! `|ψ_s⟩ = q^{-1/2} Σ_{r ∈ F_q} |s, r, f(s, r)⟩` with the tag polynomial
//! `f(s, r) = Σ_{i=1}^{d} s_i r^i + r^{d+2}`. Decoding measures the POVM
//! `{|ψ_s⟩⟨ψ_s|}_s ∪ {Π_⊥}`.
//!
//! Register order is `(s_1, …, s_d, r, tag)`; register 0 is the most
//! significant digit of the basis index, matching [`PauliLabel`]. Messages
//! are indexed the same way over their `d` registers.
//!
//! Under Pauli tampering `X^x Z^z` only `s' = s + x_{1:d}` can receive
//! weight, with amplitude `q^{-1} Σ_{r ∈ R} ω^{⟨z_{1:d}, s⟩ + z_{d+1} r + z_{d+2} f(s, r)}`
//! over the roots `R` of `f(s + x_{1:d}, r + x_{d+1}) − f(s, r) − x_{d+2}`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FqPoly, PrimeField};
use crate::haar::Seed;
use crate::linalg::{inner_slices, StateVector, ZERO};
use crate::pauli::{roots_of_unity, PauliLabel};

pub const MAX_DIM: u64 = 4096;
/// Exhaustive scans cover `q^{2(d+2)} · q^d` (message, tampering) pairs.
pub const EXHAUSTIVE_BUDGET: u64 = 100_000_000;
/// Tolerance between symbolic and dense probabilities.
pub const DENSE_TOL: f64 = 1e-9;
/// Rounding allowance when comparing a probability with the bound, which
/// the scan attains exactly in exact arithmetic.
pub const BOUND_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QamdParams {
    q: u64,
    d: usize,
}

impl QamdParams {
    pub fn new(q: u64, d: usize) -> Result<Self> {
        PrimeField::new(q).map_err(|e| Error::InvalidParams(e.to_string()))?;
        if d == 0 {
            return Err(Error::InvalidParams("d must be at least 1".into()));
        }
        if (d as u64 + 2) % q == 0 {
            return Err(Error::InvalidParams(format!(
                "d + 2 = {} is divisible by q = {q}",
                d + 2
            )));
        }
        match q.checked_pow(d as u32 + 2) {
            Some(dim) if dim <= MAX_DIM => Ok(Self { q, d }),
            _ => Err(Error::InvalidParams(format!(
                "q^(d+2) = {q}^{} exceeds {MAX_DIM}",
                d + 2
            ))),
        }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn field(&self) -> PrimeField {
        PrimeField::new(self.q).expect("validated")
    }

    /// Hilbert-space dimension `q^{d+2}`.
    pub fn dim(&self) -> usize {
        self.q.pow(self.d as u32 + 2) as usize
    }

    pub fn num_messages(&self) -> usize {
        self.q.pow(self.d as u32) as usize
    }

    /// `((d + 1) / q)²`.
    pub fn security_bound(&self) -> f64 {
        let d1 = self.d as f64 + 1.0;
        (d1 * d1) / (self.q * self.q) as f64
    }

    pub fn message_index(&self, s: &[u64]) -> usize {
        s.iter().fold(0u64, |acc, &v| acc * self.q + v) as usize
    }

    pub fn message_from_index(&self, mut idx: usize) -> Vec<u64> {
        let mut s = vec![0; self.d];
        for v in s.iter_mut().rev() {
            *v = idx as u64 % self.q;
            idx /= self.q as usize;
        }
        s
    }

    fn check_message(&self, s: &[u64]) -> Result<()> {
        if s.len() != self.d || s.iter().any(|&v| v >= self.q) {
            return Err(Error::Input(format!(
                "message {s:?} is not in F_{}^{}",
                self.q, self.d
            )));
        }
        Ok(())
    }

    fn check_tamper(&self, x: &[u64], z: &[u64]) -> Result<()> {
        let regs = self.d + 2;
        if x.len() != regs || z.len() != regs || x.iter().chain(z).any(|&v| v >= self.q) {
            return Err(Error::Input(format!(
                "tampering exponents must be {regs} digits in F_{}",
                self.q
            )));
        }
        if x.iter().chain(z).all(|&v| v == 0) {
            return Err(Error::IdentityTampering);
        }
        Ok(())
    }

    /// `f(s, r)`.
    pub fn tag(&self, s: &[u64], r: u64) -> u64 {
        let f = self.field();
        let mut acc = f.pow_raw(r, self.d as u64 + 2);
        let mut rp = 1;
        for &si in s {
            rp = f.mul_raw(rp, r);
            acc = f.add_raw(acc, f.mul_raw(si, rp));
        }
        acc
    }

    fn basis_index(&self, s: &[u64], r: u64, tag: u64) -> usize {
        let head = self.message_index(s) as u64;
        ((head * self.q + r) * self.q + tag) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QamdCodeword {
    pub params: QamdParams,
    pub message: Vec<u64>,
    pub state: StateVector,
}

impl QamdCodeword {
    /// Basis indices carrying amplitude `q^{-1/2}`, ordered by `r`.
    pub fn support(&self) -> Vec<usize> {
        (0..self.params.q)
            .map(|r| {
                self.params
                    .basis_index(&self.message, r, self.params.tag(&self.message, r))
            })
            .collect()
    }
}

pub fn qamd_encode(s: &[u64], params: &QamdParams) -> Result<QamdCodeword> {
    params.check_message(s)?;
    let amp = Complex64::new(1.0 / (params.q as f64).sqrt(), 0.0);
    let mut state = vec![ZERO; params.dim()];
    for r in 0..params.q {
        state[params.basis_index(s, r, params.tag(s, r))] = amp;
    }
    Ok(QamdCodeword {
        params: *params,
        message: s.to_vec(),
        state: StateVector::unnormalized(state),
    })
}

/// `f(s + x_{1:d}, r + x_{d+1}) − f(s, r) − x_{d+2}` as a polynomial in `r`.
pub fn difference_polynomial(params: &QamdParams, s: &[u64], x: &[u64]) -> FqPoly {
    let field = params.field();
    let d = params.d;
    let shift = x[d];
    let mut poly = FqPoly::shifted_power(field, shift, d + 2);
    let mut mono = vec![0u64; d + 3];
    mono[d + 2] = field.q_minus(1);
    mono[0] = field.q_minus(x[d + 1]);
    for i in 1..=d {
        let shifted = FqPoly::shifted_power(field, shift, i).scale(field.add_raw(s[i - 1], x[i - 1]));
        poly = poly.add(&shifted).expect("same field");
        mono[i] = field.q_minus(s[i - 1]);
    }
    poly.add(&FqPoly::new(field, &mono)).expect("same field")
}

trait Negate {
    fn q_minus(&self, v: u64) -> u64;
}

impl Negate for PrimeField {
    fn q_minus(&self, v: u64) -> u64 {
        self.sub_raw(0, v)
    }
}

/// Outcome of a tampered decode: the surviving message and its amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct TamperedOverlap {
    /// `s + x_{1:d}`, the only message that can be decoded.
    pub target: Vec<u64>,
    /// `⟨ψ_target| X^x Z^z |ψ_s⟩`.
    pub amplitude: Complex64,
    /// Roots of the difference polynomial (all of `F_q` when it vanishes).
    pub roots: Vec<u64>,
    pub polynomial_is_zero: bool,
}

/// Symbolic overlap under `X^x Z^z` via root counting.
pub fn tampered_overlap(params: &QamdParams, s: &[u64], x: &[u64], z: &[u64]) -> Result<TamperedOverlap> {
    params.check_message(s)?;
    params.check_tamper(x, z)?;
    let field = params.field();
    let d = params.d;
    let poly = difference_polynomial(params, s, x);
    let polynomial_is_zero = poly.is_zero();
    let roots = if polynomial_is_zero {
        (0..params.q).collect()
    } else {
        poly.roots()?
    };
    let omega = roots_of_unity(params.q);
    let base = s
        .iter()
        .zip(&z[..d])
        .fold(0, |acc, (&si, &zi)| field.add_raw(acc, field.mul_raw(si, zi)));
    let amplitude: Complex64 = roots
        .iter()
        .map(|&r| {
            let e = field.add_raw(
                field.add_raw(base, field.mul_raw(z[d], r)),
                field.mul_raw(z[d + 1], params.tag(s, r)),
            );
            omega[e as usize]
        })
        .sum::<Complex64>()
        / params.q as f64;
    let target = s.iter().zip(x).map(|(&a, &b)| field.add_raw(a, b)).collect();
    Ok(TamperedOverlap {
        target,
        amplitude,
        roots,
        polynomial_is_zero,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeTarget {
    Message(Vec<u64>),
    /// Total weight on every message other than the encoded one.
    AnyOther,
}

/// `|⟨ψ_{s'}| X^x Z^z |ψ_s⟩|²`, or its sum over `s' ≠ s`.
pub fn qamd_wrong_decode_prob_exact(
    params: &QamdParams,
    s: &[u64],
    target: &DecodeTarget,
    x: &[u64],
    z: &[u64],
) -> Result<f64> {
    let overlap = tampered_overlap(params, s, x, z)?;
    let p = overlap.amplitude.norm_sqr();
    Ok(match target {
        DecodeTarget::Message(t) => {
            params.check_message(t)?;
            if *t == overlap.target {
                p
            } else {
                0.0
            }
        }
        DecodeTarget::AnyOther => {
            if overlap.target != s {
                p
            } else {
                0.0
            }
        }
    })
}

/// Decoder outcome distribution: one probability per message plus `⊥`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub encoded: usize,
    pub messages: Vec<f64>,
    pub reject: f64,
}

impl OutcomeDistribution {
    pub fn p_same(&self) -> f64 {
        self.messages[self.encoded]
    }

    pub fn p_diff(&self) -> f64 {
        self.messages
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != self.encoded)
            .map(|(_, p)| p)
            .sum()
    }

    pub fn p_perp(&self) -> f64 {
        self.reject
    }

    pub fn total(&self) -> f64 {
        self.messages.iter().sum::<f64>() + self.reject
    }

    pub fn max_deviation(&self, other: &Self) -> f64 {
        self.messages
            .iter()
            .zip(&other.messages)
            .map(|(a, b)| (a - b).abs())
            .fold((self.reject - other.reject).abs(), f64::max)
    }
}

/// Symbolic outcome distribution of decoding `X^x Z^z |ψ_s⟩`.
pub fn qamd_tamper_experiment(
    params: &QamdParams,
    s: &[u64],
    x: &[u64],
    z: &[u64],
) -> Result<OutcomeDistribution> {
    let overlap = tampered_overlap(params, s, x, z)?;
    let mut messages = vec![0.0; params.num_messages()];
    let p = overlap.amplitude.norm_sqr();
    messages[params.message_index(&overlap.target)] = p;
    Ok(OutcomeDistribution {
        encoded: params.message_index(s),
        messages,
        reject: 1.0 - p,
    })
}

/// Dense state-vector simulator for the same experiment.
pub struct DenseSimulator {
    params: QamdParams,
    codewords: Vec<Vec<Complex64>>,
}

impl DenseSimulator {
    pub fn new(params: &QamdParams) -> Result<Self> {
        let codewords = (0..params.num_messages())
            .map(|i| {
                qamd_encode(&params.message_from_index(i), params)
                    .map(|c| c.state.into_amplitudes())
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            params: *params,
            codewords,
        })
    }

    pub fn codeword(&self, idx: usize) -> &[Complex64] {
        &self.codewords[idx]
    }

    pub fn distribution(&self, s: &[u64], x: &[u64], z: &[u64]) -> Result<OutcomeDistribution> {
        self.params.check_message(s)?;
        self.params.check_tamper(x, z)?;
        let label = PauliLabel::new(self.params.q, x.to_vec(), z.to_vec())?;
        let encoded = self.params.message_index(s);
        let tampered = label.apply(&self.codewords[encoded])?;
        let messages: Vec<f64> = self
            .codewords
            .iter()
            .map(|c| inner_slices(c, &tampered).norm_sqr())
            .collect();
        let reject = 1.0 - messages.iter().sum::<f64>();
        Ok(OutcomeDistribution {
            encoded,
            messages,
            reject,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    Exhaustive,
    Random { trials: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Witness {
    pub s: Vec<u64>,
    pub x: Vec<u64>,
    pub z: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub q: u64,
    pub d: usize,
    pub mode: ScanMode,
    pub bound: f64,
    pub max_prob: f64,
    pub witness: Option<Witness>,
    pub pairs_checked: u64,
    /// Largest |symbolic − dense| over all outcomes of all cells checked densely.
    pub max_dense_deviation: f64,
    pub dense_checked: u64,
    /// Cells with `x ≠ 0` whose difference polynomial vanished or exceeded degree `d + 1`.
    pub root_bound_violations: u64,
    /// Cells whose symbolic distribution failed to sum to one within 1e−9.
    pub conservation_violations: u64,
    pub passed: bool,
}

struct CellResult {
    prob: f64,
    witness: Witness,
    dense_dev: f64,
    root_violation: bool,
    conservation_violation: bool,
}

fn better(a: (f64, &Witness), b: (f64, &Witness)) -> bool {
    // larger probability wins; ties go to the lexicographically smaller witness
    a.0 > b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// Scans messages and Pauli tamperings for the largest aggregate
/// wrong-decode probability, checking every cell against the dense
/// simulator when `dense_check` is set.
pub fn qamd_security_scan(params: &QamdParams, mode: ScanMode, seed: Seed, dense_check: bool) -> Result<ScanReport> {
    let q = params.q;
    let regs = params.d as u32 + 2;
    let tamper_space = q.pow(2 * regs);
    let messages = params.num_messages() as u64;
    let cells: Vec<(usize, u64)> = match mode {
        ScanMode::Exhaustive => {
            let total = tamper_space.saturating_mul(messages);
            if total > EXHAUSTIVE_BUDGET {
                return Err(Error::BudgetExceeded(format!(
                    "{total} pairs exceed the exhaustive budget of {EXHAUSTIVE_BUDGET}"
                )));
            }
            (0..messages as usize)
                .flat_map(|s| (1..tamper_space).map(move |t| (s, t)))
                .collect()
        }
        ScanMode::Random { trials } => {
            if trials > EXHAUSTIVE_BUDGET {
                return Err(Error::BudgetExceeded(format!("{trials} random trials")));
            }
            let mut rng = seed.rng();
            (0..trials)
                .map(|_| {
                    let s = rng.below(messages) as usize;
                    let t = 1 + rng.below(tamper_space - 1);
                    (s, t)
                })
                .collect()
        }
    };
    let sim = if dense_check {
        Some(DenseSimulator::new(params)?)
    } else {
        None
    };
    let decode_tamper = |mut t: u64| {
        let mut digits = vec![0u64; 2 * regs as usize];
        for v in digits.iter_mut().rev() {
            *v = t % q;
            t /= q;
        }
        let z = digits.split_off(regs as usize);
        (digits, z)
    };

    let results: Vec<CellResult> = cells
        .par_iter()
        .map(|&(s_idx, t)| -> Result<CellResult> {
            let s = params.message_from_index(s_idx);
            let (x, z) = decode_tamper(t);
            let overlap = tampered_overlap(params, &s, &x, &z)?;
            let x_nonzero = x.iter().any(|&v| v != 0);
            let poly = difference_polynomial(params, &s, &x);
            let root_violation =
                x_nonzero && (overlap.polynomial_is_zero || poly.degree().unwrap_or(0) > params.d + 1);
            let dist = qamd_tamper_experiment(params, &s, &x, &z)?;
            let conservation_violation = (dist.total() - 1.0).abs() > DENSE_TOL;
            let dense_dev = match &sim {
                Some(sim) => sim.distribution(&s, &x, &z)?.max_deviation(&dist),
                None => 0.0,
            };
            Ok(CellResult {
                prob: dist.p_diff(),
                witness: Witness { s, x, z },
                dense_dev,
                root_violation,
                conservation_violation,
            })
        })
        .collect::<Result<_>>()?;

    let mut best: Option<&CellResult> = None;
    for r in &results {
        if best.map_or(true, |b| better((r.prob, &r.witness), (b.prob, &b.witness))) {
            best = Some(r);
        }
    }
    let bound = params.security_bound();
    let max_prob = best.map_or(0.0, |b| b.prob);
    let max_dense_deviation = results.iter().map(|r| r.dense_dev).fold(0.0, f64::max);
    let root_bound_violations = results.iter().filter(|r| r.root_violation).count() as u64;
    let conservation_violations = results.iter().filter(|r| r.conservation_violation).count() as u64;
    let passed = max_prob <= bound + BOUND_TOL
        && max_dense_deviation <= DENSE_TOL
        && root_bound_violations == 0
        && conservation_violations == 0;
    Ok(ScanReport {
        q,
        d: params.d,
        mode,
        bound,
        max_prob,
        witness: best.map(|b| b.witness.clone()),
        pairs_checked: results.len() as u64,
        max_dense_deviation,
        dense_checked: if dense_check { results.len() as u64 } else { 0 },
        root_bound_violations,
        conservation_violations,
        passed,
    })
}
