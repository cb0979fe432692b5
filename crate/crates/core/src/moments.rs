//! Moments of the overlap random variables of a Haar-random encoding.
//!
//! For an isometry `V` with codewords `ψ_i = V e_i` and a tampering unitary `U`:
//! * `X_js = |⟨ψ_j|U|ψ_s⟩|²` for `j ≠ s`,
//! * `X_ss = |⟨ψ_s|U|ψ_s⟩|²`,
//! * `X_m = |⟨ψ_m|U V a⟩|²` for a message with amplitudes `a`.
//!
//! Exact moments expand `X^t` into `2t` entries of `V` and `2t` of `V̄`:
//! unconjugated entry `a` sits in column `x_a`, conjugated entry `a` in
//! column `y_a`, and `W_a = U` for even 0-based `a`, `U†` for odd. Then
//!
//! `E[X^t] = Σ_{α,β ∈ S_{2t}} T(α) · w(β) · Wg(βα⁻¹, N)`
//!
//! where `T(α)` multiplies `Tr(W_c W_{α(c)} W_{α²(c)} ⋯)` over the cycles of
//! `α` (each read from its smallest point) and `w(β)` is the amplitude sum
//! left after imposing `x_a = y_{β(a)}`.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haar::{sample_encoding_isometry, Seed};
use crate::linalg::{norm_sqr, ComplexMatrix, ZERO};
use crate::operator::Operator;
use crate::perm::{all_permutations, Permutation};
use crate::weingarten::wg_table;

pub const MAX_T: usize = 3;
pub const MIN_TRIALS: u64 = 1000;
/// Largest imaginary part tolerated in a real expectation.
pub const IMAG_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Pattern {
    OffDiagonalJs,
    DiagonalSs,
    QuantumMessageM { m: usize },
}

#[derive(Debug, Clone)]
pub struct MomentSpec {
    pattern: Pattern,
    t: usize,
    unitary: Operator,
    k: usize,
    amplitudes: Option<Vec<Complex64>>,
}

impl MomentSpec {
    /// Spec for `X_js` or `X_ss`; `K` is fixed to 2.
    pub fn codeword(pattern: Pattern, t: usize, unitary: Operator) -> Result<Self> {
        if matches!(pattern, Pattern::QuantumMessageM { .. }) {
            return Err(Error::Input("pattern m needs message amplitudes".into()));
        }
        Self::check_common(t, &unitary)?;
        Ok(Self {
            pattern,
            t,
            unitary,
            k: 2,
            amplitudes: None,
        })
    }

    /// Spec for `X_m` with message amplitudes of length `K`.
    pub fn message(m: usize, t: usize, unitary: Operator, amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::check_common(t, &unitary)?;
        let k = amplitudes.len();
        if k == 0 || k >= unitary.dim() {
            return Err(Error::OutOfRange(format!(
                "need 1 ≤ K < N, got K = {k}, N = {}",
                unitary.dim()
            )));
        }
        if m >= k {
            return Err(Error::OutOfRange(format!("m = {m} outside [0, {k})")));
        }
        let norm = norm_sqr(&amplitudes).sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            pattern: Pattern::QuantumMessageM { m },
            t,
            unitary,
            k,
            amplitudes: Some(amplitudes),
        })
    }

    fn check_common(t: usize, unitary: &Operator) -> Result<()> {
        if !(1..=MAX_T).contains(&t) {
            return Err(Error::OutOfRange(format!("t = {t} outside 1..={MAX_T}")));
        }
        if unitary.dim() < 3 {
            return Err(Error::OutOfRange("need N ≥ 3 for two codewords and a complement".into()));
        }
        unitary.check_unitary()
    }

    pub fn pattern(&self) -> Pattern {
        self.pattern
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n(&self) -> usize {
        self.unitary.dim()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn unitary(&self) -> &Operator {
        &self.unitary
    }

    pub fn amplitudes(&self) -> Option<&[Complex64]> {
        self.amplitudes.as_deref()
    }
}

fn closed_form_inputs(u: &Operator) -> Result<(f64, f64)> {
    let n = u.dim();
    if n < 2 {
        return Err(Error::OutOfRange("need N ≥ 2".into()));
    }
    u.check_unitary()?;
    Ok((n as f64, u.trace().norm_sqr()))
}

/// `E[X_js] = (N² − |Tr U|²) / (N(N² − 1))`.
pub fn first_moment_js(u: &Operator) -> Result<f64> {
    let (n, tr2) = closed_form_inputs(u)?;
    Ok((n * n - tr2) / (n * (n * n - 1.0)))
}

/// `E[X_ss] = (N + |Tr U|²) / (N(N + 1))`.
pub fn first_moment_ss(u: &Operator) -> Result<f64> {
    let (n, tr2) = closed_form_inputs(u)?;
    Ok((n + tr2) / (n * (n + 1.0)))
}

/// A column index of a `V` entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Col {
    Fixed(u8),
    /// Summed index carrying `a_i`.
    Amp,
    /// Summed index carrying `ā_j`.
    AmpConj,
}

/// Column patterns `(x, y)` for unconjugated and conjugated entries.
fn column_pattern(pattern: Pattern, t: usize) -> (Vec<Col>, Vec<Col>) {
    const S: u8 = 0;
    const J: u8 = 1;
    const M: u8 = 2;
    (0..2 * t)
        .map(|a| {
            let even = a % 2 == 0;
            match pattern {
                Pattern::OffDiagonalJs if even => (Col::Fixed(S), Col::Fixed(J)),
                Pattern::OffDiagonalJs => (Col::Fixed(J), Col::Fixed(S)),
                Pattern::DiagonalSs => (Col::Fixed(S), Col::Fixed(S)),
                Pattern::QuantumMessageM { .. } if even => (Col::Amp, Col::Fixed(M)),
                Pattern::QuantumMessageM { .. } => (Col::Fixed(M), Col::AmpConj),
            }
        })
        .unzip()
}

/// `w(β) = a_m^{a_power} · ā_m^{a_conj_power} · (Σ_c |a_c|²)^{free_pairs}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BetaWeight {
    pub a_power: u32,
    pub a_conj_power: u32,
    pub free_pairs: u32,
}

/// Symbolic weight of `β`, or `None` when its delta constraints force two
/// distinct fixed columns to coincide.
fn beta_weight(beta: &Permutation, x: &[Col], y: &[Col]) -> Option<BetaWeight> {
    let mut w = BetaWeight {
        a_power: 0,
        a_conj_power: 0,
        free_pairs: 0,
    };
    for (a, xa) in x.iter().enumerate() {
        match (*xa, y[beta.apply(a)]) {
            (Col::Fixed(c), Col::Fixed(d)) if c != d => return None,
            (Col::Fixed(_), Col::Fixed(_)) => {}
            (Col::Amp, Col::Fixed(_)) => w.a_power += 1,
            (Col::Fixed(_), Col::AmpConj) => w.a_conj_power += 1,
            (Col::Amp, Col::AmpConj) => w.free_pairs += 1,
            // each column variable appears once on its own side
            (Col::AmpConj, _) | (_, Col::Amp) => unreachable!("malformed pattern"),
        }
    }
    Some(w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightClass {
    pub weight: BetaWeight,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactMoment {
    pub value: f64,
    pub imaginary_residue: f64,
    /// Distinct `β` weights with nonzero contribution and their multiplicity.
    pub weights: Vec<WeightClass>,
}

/// Traces of words in `U`, `U†`, memoized by word.
struct TraceCache {
    u: ComplexMatrix,
    u_dag: ComplexMatrix,
    memo: HashMap<Vec<bool>, Complex64>,
}

impl TraceCache {
    fn new(op: &Operator) -> Result<Self> {
        let u = op.matrix()?;
        let u_dag = u.adjoint();
        Ok(Self {
            u,
            u_dag,
            memo: HashMap::new(),
        })
    }

    /// `word[i]` true means `U†`.
    fn trace(&mut self, word: &[bool]) -> Complex64 {
        if let Some(&v) = self.memo.get(word) {
            return v;
        }
        let pick = |d: bool| if d { &self.u_dag } else { &self.u };
        let mut acc = pick(word[0]).clone();
        for &d in &word[1..] {
            acc = acc.matmul(pick(d)).expect("square");
        }
        let tr = acc.trace().expect("square");
        self.memo.insert(word.to_vec(), tr);
        tr
    }

    fn cycle_product(&mut self, alpha: &Permutation) -> Complex64 {
        alpha
            .cycles()
            .iter()
            .map(|c| {
                let word: Vec<bool> = c.iter().map(|&a| a % 2 == 1).collect();
                self.trace(&word)
            })
            .product()
    }
}

/// Exact `E[X^t]` over Haar-random encodings.
pub fn exact_moment(spec: &MomentSpec) -> Result<ExactMoment> {
    let p = 2 * spec.t;
    let n = spec.n();
    if n < p {
        return Err(Error::OutOfRange(format!("need N ≥ 2t, got N = {n}, t = {}", spec.t)));
    }
    let table = wg_table(p, n as u64)?;
    let wg = table.dense_f64();
    let perms = all_permutations(p)?;
    let (x, y) = column_pattern(spec.pattern, spec.t);

    let (a_m, a_norm) = match (spec.pattern, &spec.amplitudes) {
        (Pattern::QuantumMessageM { m }, Some(a)) => (a[m], norm_sqr(a)),
        _ => (ZERO, 1.0),
    };
    let mut classes: HashMap<BetaWeight, u64> = HashMap::new();
    let betas: Vec<(&Permutation, Complex64)> = perms
        .iter()
        .filter_map(|b| {
            let w = beta_weight(b, &x, &y)?;
            let value = a_m.powu(w.a_power) * a_m.conj().powu(w.a_conj_power) * a_norm.powi(w.free_pairs as i32);
            *classes.entry(w).or_default() += 1;
            Some((b, value))
        })
        .collect();

    let mut cache = TraceCache::new(&spec.unitary)?;
    let mut total = ZERO;
    for alpha in &perms {
        let tr = cache.cycle_product(alpha);
        let alpha_inv = alpha.inverse();
        let inner: Complex64 = betas
            .iter()
            .map(|(b, w)| w * wg[b.compose(&alpha_inv).lex_rank()])
            .sum();
        total += tr * inner;
    }
    let scale = total.re.abs().max(1.0);
    if total.im.abs() > IMAG_TOL * scale {
        return Err(Error::Consistency(format!(
            "moment has imaginary part {:e}",
            total.im
        )));
    }
    let mut weights: Vec<WeightClass> = classes
        .into_iter()
        .map(|(weight, count)| WeightClass { weight, count })
        .collect();
    weights.sort_by_key(|c| c.weight);
    Ok(ExactMoment {
        value: total.re,
        imaginary_residue: total.im,
        weights,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl McEstimate {
    fn from_samples(values: impl Iterator<Item = f64> + Clone, trials: u64) -> Self {
        let n = trials as f64;
        let mean = values.clone().sum::<f64>() / n;
        let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        Self {
            mean,
            stderr: (var / n).sqrt(),
            trials,
        }
    }

    /// `|value − mean| ≤ k · stderr`, treating a zero stderr as exact up to 1e−12.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (value - self.mean).abs() <= k * self.stderr + 1e-12
    }
}

pub fn mc_moment(spec: &MomentSpec, trials: u64, seed: Seed) -> Result<McEstimate> {
    Ok(mc_moment_battery(std::slice::from_ref(spec), trials, seed)?.remove(0))
}

/// Monte Carlo estimates for several specs sharing the isometry of each
/// trial. Trial `i` uses `seed.child(i)`; every spec sees the same first
/// columns as it would on its own, so results match [`mc_moment`].
pub fn mc_moment_battery(specs: &[MomentSpec], trials: u64, seed: Seed) -> Result<Vec<McEstimate>> {
    if trials < MIN_TRIALS {
        return Err(Error::OutOfRange(format!("need at least {MIN_TRIALS} trials")));
    }
    let Some(first) = specs.first() else {
        return Ok(Vec::new());
    };
    let n = first.n();
    if specs.iter().any(|s| s.n() != n) {
        return Err(Error::DimMismatch("specs in a battery must share N".into()));
    }
    let width = specs.iter().map(|s| s.k).max().expect("nonempty");

    // row ⟨ψ_bra| U is shared by specs with the same operator and bra column
    let bra_col = |s: &MomentSpec| match s.pattern {
        Pattern::QuantumMessageM { m } => m,
        _ => 0,
    };
    let mut keys: Vec<(usize, usize)> = Vec::new();
    let mut spec_key = Vec::with_capacity(specs.len());
    for (i, s) in specs.iter().enumerate() {
        let op_rep = specs[..i]
            .iter()
            .position(|o| o.unitary == s.unitary)
            .unwrap_or(i);
        let key = (op_rep, bra_col(s));
        let idx = keys.iter().position(|&k| k == key).unwrap_or_else(|| {
            keys.push(key);
            keys.len() - 1
        });
        spec_key.push(idx);
    }

    let samples: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<Vec<f64>> {
            let v = sample_encoding_isometry(n, width, seed.child(trial))?;
            let cols: Vec<Vec<Complex64>> = (0..width).map(|c| v.matrix().column(c)).collect();
            let rows: Vec<Vec<Complex64>> = keys
                .iter()
                .map(|&(op, bra)| specs[op].unitary.bra_apply(&cols[bra]))
                .collect::<Result<_>>()?;
            let dot = |r: &[Complex64], c: &[Complex64]| -> Complex64 {
                r.iter().zip(c).fold(ZERO, |acc, (a, b)| acc + a * b)
            };
            Ok(specs
                .iter()
                .zip(&spec_key)
                .map(|(s, &key)| {
                    let row = &rows[key];
                    let x = match s.pattern {
                        Pattern::OffDiagonalJs => dot(row, &cols[1]).norm_sqr(),
                        Pattern::DiagonalSs => dot(row, &cols[0]).norm_sqr(),
                        Pattern::QuantumMessageM { .. } => {
                            let a = s.amplitudes.as_ref().expect("pattern m has amplitudes");
                            a.iter()
                                .enumerate()
                                .fold(ZERO, |acc, (i, ai)| acc + ai * dot(row, &cols[i]))
                                .norm_sqr()
                        }
                    };
                    x.powi(s.t as i32)
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    Ok((0..specs.len())
        .map(|i| McEstimate::from_samples(samples.iter().map(|row| row[i]), trials))
        .collect())
}
