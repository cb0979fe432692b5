//! Exact unitary Weingarten calculus.
//!
//! `Wg(·, N)` is the inverse, in the group algebra of `S_p`, of the class
//! function `σ ↦ N^{|C(σ)|}`. Concretely, with the Gram matrix
//! `G[σ, τ] = N^{|C(στ⁻¹)|}`, `Wg(σ, N) = (G⁻¹)[e, σ]`.
//!
//! Two routes compute the table:
//! * [`wg_table_gram`] solves the full `p! × p!` Gram system (used for `p ≤ 5`),
//! * [`wg_table_class`] restricts the same system to class functions, one
//!   unknown per cycle type (used for `p = 6`, where the full system is
//!   `720 × 720`).
//!
//! Both are exact; tests check that they agree.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{all_permutations, partitions, CycleType, Permutation};
use crate::rational::{solve, Rational};

/// Largest moment order with a table.
pub const MAX_ORDER: usize = 6;
/// Largest order solved through the full Gram matrix.
pub const MAX_GRAM_ORDER: usize = 5;
/// Largest `p` accepted by [`haar_moment`].
pub const MAX_MOMENT_ORDER: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeingartenTable {
    p: usize,
    n: u64,
    values: BTreeMap<CycleType, Rational>,
    class_sizes: BTreeMap<CycleType, u64>,
}

impl WeingartenTable {
    pub fn order(&self) -> usize {
        self.p
    }

    pub fn dimension(&self) -> u64 {
        self.n
    }

    pub fn values(&self) -> &BTreeMap<CycleType, Rational> {
        &self.values
    }

    pub fn class_size(&self, ct: &CycleType) -> u64 {
        self.class_sizes[ct]
    }

    pub fn get(&self, ct: &CycleType) -> Option<&Rational> {
        self.values.get(ct)
    }

    pub fn value(&self, sigma: &Permutation) -> &Rational {
        assert_eq!(sigma.degree(), self.p);
        &self.values[&sigma.cycle_type()]
    }

    /// Values in `f64`, indexed by lexicographic rank of the permutation.
    pub fn dense_f64(&self) -> Vec<f64> {
        let as_f64: BTreeMap<&CycleType, f64> =
            self.values.iter().map(|(k, v)| (k, v.to_f64())).collect();
        all_permutations(self.p)
            .expect("p ≤ 6")
            .iter()
            .map(|s| as_f64[&s.cycle_type()])
            .collect()
    }

    pub fn sum(&self) -> Rational {
        self.values
            .iter()
            .map(|(ct, v)| v * &Rational::from_integer(self.class_sizes[ct] as i64))
            .sum()
    }

    pub fn abs_sum(&self) -> Rational {
        self.values
            .iter()
            .map(|(ct, v)| &v.abs() * &Rational::from_integer(self.class_sizes[ct] as i64))
            .sum()
    }
}

fn check_args(p: usize, n: u64) -> Result<()> {
    if p == 0 || p > MAX_ORDER {
        return Err(Error::OutOfRange(format!(
            "Weingarten order p = {p} outside 1..={MAX_ORDER}"
        )));
    }
    if n < p as u64 {
        return Err(Error::SingularGram { p, n });
    }
    Ok(())
}

fn big_pow(n: u64, e: usize) -> BigRational {
    BigRational::from_integer(num_traits::pow(BigInt::from(n), e))
}

/// Exact table `Wg(λ, N)` for every cycle type `λ ⊢ p`.
pub fn wg_table(p: usize, n: u64) -> Result<WeingartenTable> {
    if p <= MAX_GRAM_ORDER {
        wg_table_gram(p, n)
    } else {
        wg_table_class(p, n)
    }
}

/// Full Gram-matrix route. Solves `G x = e_e`; `G` is symmetric, so `x` is
/// the `e` row of `G⁻¹`. The per-permutation solution is collapsed to cycle
/// types, failing if two permutations of one type disagree.
pub fn wg_table_gram(p: usize, n: u64) -> Result<WeingartenTable> {
    check_args(p, n)?;
    if p > MAX_GRAM_ORDER {
        return Err(Error::OutOfRange(format!(
            "full Gram inversion limited to p ≤ {MAX_GRAM_ORDER}"
        )));
    }
    let perms = all_permutations(p)?;
    let inverses: Vec<Permutation> = perms.iter().map(Permutation::inverse).collect();
    let powers: Vec<BigRational> = (0..=p).map(|e| big_pow(n, e)).collect();
    let gram: Vec<Vec<BigRational>> = perms
        .iter()
        .map(|s| {
            inverses
                .iter()
                .map(|t_inv| powers[s.compose(t_inv).num_cycles()].clone())
                .collect()
        })
        .collect();
    let mut rhs = vec![BigRational::zero(); perms.len()];
    // identity has lexicographic rank 0
    rhs[0] = BigRational::one();
    let x = solve(gram, rhs).ok_or(Error::SingularGram { p, n })?;

    let mut values: BTreeMap<CycleType, Rational> = BTreeMap::new();
    let mut class_sizes: BTreeMap<CycleType, u64> = BTreeMap::new();
    for (s, v) in perms.iter().zip(x) {
        let ct = s.cycle_type();
        let v = Rational::from(v);
        match values.get(&ct) {
            Some(existing) if *existing != v => {
                return Err(Error::NotClassFunction(format!("{s} has type {ct}")));
            }
            Some(_) => {}
            None => {
                values.insert(ct.clone(), v);
            }
        }
        *class_sizes.entry(ct).or_default() += 1;
    }
    Ok(WeingartenTable {
        p,
        n,
        values,
        class_sizes,
    })
}

/// Class-function route: one unknown per cycle type. Row `λ` of the reduced
/// system is `Σ_μ (Σ_{τ ∈ μ} N^{|C(σ_λ τ⁻¹)|}) w_μ = [λ = 1^p]`.
pub fn wg_table_class(p: usize, n: u64) -> Result<WeingartenTable> {
    check_args(p, n)?;
    let types = partitions(p);
    let index: BTreeMap<&CycleType, usize> =
        types.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let reps: Vec<Permutation> = types.iter().map(representative).collect();
    let perms = all_permutations(p)?;

    let k = types.len();
    let mut counts = vec![vec![vec![0u64; p + 1]; k]; k];
    let mut class_sizes: BTreeMap<CycleType, u64> = BTreeMap::new();
    for tau in &perms {
        let ct = tau.cycle_type();
        let mu = index[&ct];
        let tau_inv = tau.inverse();
        for (lambda, rep) in reps.iter().enumerate() {
            counts[lambda][mu][rep.compose(&tau_inv).num_cycles()] += 1;
        }
        *class_sizes.entry(ct).or_default() += 1;
    }
    let powers: Vec<BigRational> = (0..=p).map(|e| big_pow(n, e)).collect();
    let a: Vec<Vec<BigRational>> = counts
        .iter()
        .map(|row| {
            row.iter()
                .map(|hist| {
                    hist.iter()
                        .zip(&powers)
                        .filter(|(c, _)| **c > 0)
                        .map(|(&c, pw)| pw * BigRational::from_integer(BigInt::from(c)))
                        .fold(BigRational::zero(), |acc, x| acc + x)
                })
                .collect()
        })
        .collect();
    let identity_type = CycleType::new(vec![1; p]);
    let mut rhs = vec![BigRational::zero(); k];
    rhs[index[&identity_type]] = BigRational::one();
    let w = solve(a, rhs).ok_or(Error::SingularGram { p, n })?;
    let values = types.into_iter().zip(w.into_iter().map(Rational::from)).collect();
    Ok(WeingartenTable {
        p,
        n,
        values,
        class_sizes,
    })
}

/// The permutation `(1 … λ₁)(λ₁+1 … λ₁+λ₂)⋯` of the given type.
fn representative(ct: &CycleType) -> Permutation {
    let p = ct.degree();
    let mut images = vec![0; p];
    let mut start = 0;
    for &len in ct.parts() {
        for k in 0..len {
            images[start + k] = start + (k + 1) % len;
        }
        start += len;
    }
    Permutation::from_images(images).expect("valid cycles")
}

/// `1 / (N (N+1) ⋯ (N+t−1))`.
pub fn rising_reciprocal(t: usize, n: u64) -> Rational {
    let prod: BigInt = (0..t as u64).map(|k| BigInt::from(n + k)).product();
    Rational::from_bigint(prod).recip()
}

/// `1 / (N (N−1) ⋯ (N−t+1))`.
pub fn falling_reciprocal(t: usize, n: u64) -> Rational {
    let prod: BigInt = (0..t as u64).map(|k| BigInt::from(n) - BigInt::from(k)).product();
    Rational::from_bigint(prod).recip()
}

/// `Σ_{σ ∈ S_t} Wg(σ, N)`.
pub fn wg_sum(t: usize, n: u64) -> Result<Rational> {
    Ok(wg_table(t, n)?.sum())
}

/// `Σ_{σ ∈ S_t} |Wg(σ, N)|`.
pub fn wg_abs_sum(t: usize, n: u64) -> Result<Rational> {
    Ok(wg_table(t, n)?.abs_sum())
}

/// Exact Haar moment
/// `E[U_{i₁j₁}⋯U_{i_p j_p} · conj(U_{i′₁j′₁})⋯conj(U_{i′_p′ j′_p′})]`
/// with 0-based indices, as
/// `Σ_{σ,τ} Π_a δ(i_a, i′_{σ(a)}) δ(j_a, j′_{τ(a)}) Wg(τσ⁻¹, N)`.
/// Unequal numbers of `U` and `Ū` factors give zero.
pub fn haar_moment(
    i: &[usize],
    i_conj: &[usize],
    j: &[usize],
    j_conj: &[usize],
    n: u64,
) -> Result<Rational> {
    if i.len() != j.len() || i_conj.len() != j_conj.len() {
        return Err(Error::Input(
            "row and column tuples must have equal length".into(),
        ));
    }
    if let Some(bad) = i
        .iter()
        .chain(i_conj)
        .chain(j)
        .chain(j_conj)
        .find(|&&x| x as u64 >= n)
    {
        return Err(Error::OutOfRange(format!("index {bad} outside [0, {n})")));
    }
    let p = i.len();
    if p != i_conj.len() || p == 0 {
        return Ok(Rational::zero());
    }
    if p > MAX_MOMENT_ORDER {
        return Err(Error::OutOfRange(format!(
            "moment order p = {p} exceeds {MAX_MOMENT_ORDER}"
        )));
    }
    let table = wg_table(p, n)?;
    let perms = all_permutations(p)?;
    let matches = |a: &[usize], b: &[usize], s: &Permutation| {
        (0..p).all(|k| a[k] == b[s.apply(k)])
    };
    let sigmas: Vec<&Permutation> = perms.iter().filter(|s| matches(i, i_conj, s)).collect();
    let taus: Vec<&Permutation> = perms.iter().filter(|t| matches(j, j_conj, t)).collect();
    let mut acc = Rational::zero();
    for s in &sigmas {
        let s_inv = s.inverse();
        for t in &taus {
            acc = acc + table.value(&t.compose(&s_inv)).clone();
        }
    }
    Ok(acc)
}
