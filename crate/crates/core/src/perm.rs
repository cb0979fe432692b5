//! Symmetric-group machinery: cycles, valuation, fixed points,
//! transposition distance and the parity-swapping set `B_{2t}`.
//!
//! Points are stored 0-based. Parity questions (valuation, `B_{2t}`) are
//! asked about the 1-based label `i + 1`, so internal point `0` is odd.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest degree for exhaustive enumeration of `S_n`.
pub const MAX_ENUM_DEGREE: usize = 9;
/// Largest `2t` for enumerating `B_{2t}`.
pub const MAX_SWAPPER_DEGREE: usize = 10;
/// Largest `n` for the exhaustive fixed-point lemma check.
pub const MAX_LEMMA_DEGREE: usize = 7;
/// Largest `2t` for the exhaustive `S_{2t} × B_{2t}` corollary check.
pub const MAX_COROLLARY_DEGREE: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    /// `images[i]` is the image of point `i` (0-based).
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::Input(format!("{images:?} is not a bijection")));
            }
            seen[x] = true;
        }
        Ok(Self { images })
    }

    /// Builds a permutation of degree `n` from disjoint cycles written with
    /// 1-based labels, e.g. `&[&[1, 2], &[3, 4, 5]]`.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                if x == 0 || x > n || touched[x - 1] {
                    return Err(Error::Input(format!("bad cycle {cycle:?} for degree {n}")));
                }
                touched[x - 1] = true;
                images[x - 1] = cycle[(k + 1) % cycle.len()] - 1;
            }
        }
        Ok(Self { images })
    }

    /// The transposition swapping 0-based points `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Self { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Self { images: inv }
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Self {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    /// Disjoint cycles including fixed points. Each cycle starts at its
    /// smallest point and follows `x → σ(x)`; cycles are ordered by that
    /// smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Same as [`cycles`](Self::cycles) with 1-based labels.
    pub fn cycles_one_based(&self) -> Vec<Vec<usize>> {
        self.cycles()
            .into_iter()
            .map(|c| c.into_iter().map(|x| x + 1).collect())
            .collect()
    }

    /// `|C(σ)|`.
    pub fn num_cycles(&self) -> usize {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut count = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x];
            }
        }
        count
    }

    pub fn cycle_type(&self) -> CycleType {
        CycleType::new(self.cycles().iter().map(Vec::len).collect())
    }

    /// `Σ_c |odd(c) − even(c)|` over cycles, parity of the 1-based label.
    pub fn valuation(&self) -> usize {
        self.cycles()
            .iter()
            .map(|c| {
                // 0-based even index ⇔ odd 1-based label
                let odd = c.iter().filter(|&&x| x % 2 == 0).count() as i64;
                let even = c.len() as i64 - odd;
                (odd - even).unsigned_abs() as usize
            })
            .sum()
    }

    /// Fixed and moved points (0-based), both ascending.
    pub fn fix_move(&self) -> (Vec<usize>, Vec<usize>) {
        (0..self.degree()).partition(|&i| self.images[i] == i)
    }

    /// `T(σ) = n − |C(σ)|`.
    pub fn min_transpositions(&self) -> usize {
        self.degree() - self.num_cycles()
    }

    /// True when every point changes 1-based parity.
    pub fn swaps_parity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| (i + x) % 2 == 1)
    }

    /// Position of this permutation in the lexicographic order of `S_n`.
    pub fn lex_rank(&self) -> usize {
        let n = self.degree();
        let mut rank = 0;
        let mut fact = factorial(n);
        let mut used = vec![false; n];
        for (i, &x) in self.images.iter().enumerate() {
            fact /= n - i;
            let smaller = (0..x).filter(|&y| !used[y]).count();
            rank += smaller * fact;
            used[x] = true;
        }
        rank
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation with 1-based labels, fixed points omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<_> = self
            .cycles_one_based()
            .into_iter()
            .filter(|c| c.len() > 1)
            .collect();
        if cycles.is_empty() {
            return write!(f, "e");
        }
        for c in cycles {
            let labels: Vec<String> = c.iter().map(ToString::to_string).collect();
            write!(f, "({})", labels.join(" "))?;
        }
        Ok(())
    }
}

/// A partition of `n` listing cycle lengths in descending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CycleType(Vec<usize>);

impl CycleType {
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn num_cycles(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// All partitions of `n` in descending lexicographic order.
pub fn partitions(n: usize) -> Vec<CycleType> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<CycleType>) {
        if rest == 0 {
            out.push(CycleType(cur.clone()));
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// All of `S_n` in lexicographic order of image vectors.
pub fn all_permutations(n: usize) -> Result<Vec<Permutation>> {
    if n > MAX_ENUM_DEGREE {
        return Err(Error::BudgetExceeded(format!(
            "S_{n} exceeds the S_{MAX_ENUM_DEGREE} enumeration budget"
        )));
    }
    let mut out = Vec::with_capacity(factorial(n));
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(Permutation {
            images: cur.clone(),
        });
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    Ok(out)
}

/// `|Σ_i| = |{σ ∈ S_n : T(σ) = i}|` by enumeration.
pub fn count_by_transpositions(n: usize, i: usize) -> Result<u64> {
    if n > MAX_ENUM_DEGREE {
        return Err(Error::BudgetExceeded(format!(
            "S_{n} exceeds the S_{MAX_ENUM_DEGREE} enumeration budget"
        )));
    }
    if n == 0 || i >= n {
        return Err(Error::OutOfRange(format!("need 0 ≤ i ≤ n−1, got i = {i}, n = {n}")));
    }
    Ok(all_permutations(n)?
        .par_iter()
        .filter(|s| s.min_transpositions() == i)
        .count() as u64)
}

/// `B_{2t}`: permutations of `[2t]` sending odd labels to even labels and
/// vice versa, in lexicographic order. Contains `(t!)²` elements.
pub fn enumerate_parity_swappers(t: usize) -> Result<Vec<Permutation>> {
    if 2 * t > MAX_SWAPPER_DEGREE {
        return Err(Error::BudgetExceeded(format!(
            "B_{} exceeds the B_{MAX_SWAPPER_DEGREE} budget",
            2 * t
        )));
    }
    // 0-based: even indices are odd labels.
    let odds: Vec<usize> = (0..t).map(|k| 2 * k).collect();
    let evens: Vec<usize> = (0..t).map(|k| 2 * k + 1).collect();
    let perms_t = all_permutations(t)?;
    let mut out = Vec::with_capacity(perms_t.len() * perms_t.len());
    for a in &perms_t {
        for b in &perms_t {
            let mut images = vec![0; 2 * t];
            for k in 0..t {
                images[odds[k]] = evens[a.apply(k)];
                images[evens[k]] = odds[b.apply(k)];
            }
            out.push(Permutation { images });
        }
    }
    out.sort();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma_name: String,
    pub n_or_t: usize,
    pub checked_count: u64,
    /// Offending permutations in 1-based cycle notation.
    pub counterexamples: Vec<String>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

pub const LEMMA_FIX: &str = "fix_lower_bound";
pub const LEMMA_CYCLES: &str = "cycle_sum_upper_bound";

/// Checks `|Fix(σ)| ≥ 2|C(σ)| − n` over all of `S_n`.
pub fn verify_fix_lemma(n: usize) -> Result<LemmaReport> {
    if n > MAX_LEMMA_DEGREE {
        return Err(Error::BudgetExceeded(format!(
            "fixed-point lemma limited to n ≤ {MAX_LEMMA_DEGREE}"
        )));
    }
    let perms = all_permutations(n)?;
    let counterexamples: Vec<String> = perms
        .par_iter()
        .filter(|s| {
            let fix = s.fix_move().0.len() as i64;
            fix < 2 * s.num_cycles() as i64 - n as i64
        })
        .map(ToString::to_string)
        .collect();
    Ok(LemmaReport {
        lemma_name: LEMMA_FIX.into(),
        n_or_t: n,
        checked_count: perms.len() as u64,
        counterexamples,
    })
}

/// Checks `|C(α)| + |C(βα⁻¹)| ≤ 3t` over `S_{2t} × B_{2t}`.
pub fn verify_cycle_corollary(t: usize) -> Result<LemmaReport> {
    if 2 * t > MAX_COROLLARY_DEGREE {
        return Err(Error::BudgetExceeded(format!(
            "cycle corollary limited to 2t ≤ {MAX_COROLLARY_DEGREE}"
        )));
    }
    let alphas = all_permutations(2 * t)?;
    let betas = enumerate_parity_swappers(t)?;
    let counterexamples: Vec<String> = alphas
        .par_iter()
        .flat_map_iter(|a| {
            let a_inv = a.inverse();
            let ca = a.num_cycles();
            betas
                .iter()
                .filter(move |b| ca + b.compose(&a_inv).num_cycles() > 3 * t)
                .map(move |b| format!("alpha={a}, beta={b}"))
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(LemmaReport {
        lemma_name: LEMMA_CYCLES.into(),
        n_or_t: t,
        checked_count: (alphas.len() * betas.len()) as u64,
        counterexamples,
    })
}

/// Runs the fixed-point lemma for `1 ≤ n ≤ n_max` and the cycle corollary
/// for every `t` with `2t ≤ min(n_max, 6)`.
pub fn verify_lemmas(n_max: usize) -> Result<Vec<LemmaReport>> {
    if n_max > MAX_LEMMA_DEGREE {
        return Err(Error::BudgetExceeded(format!(
            "lemma verification limited to n_max ≤ {MAX_LEMMA_DEGREE}"
        )));
    }
    let mut reports = Vec::new();
    for n in 1..=n_max {
        reports.push(verify_fix_lemma(n)?);
    }
    for t in 1..=(n_max.min(MAX_COROLLARY_DEGREE) / 2) {
        reports.push(verify_cycle_corollary(t)?);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{HashMap, VecDeque};

    fn p(n: usize, cycles: &[&[usize]]) -> Permutation {
        Permutation::from_cycles(n, cycles).unwrap()
    }

    /// Independent transposition distance: BFS from the identity over
    /// right-multiplication by transpositions.
    fn bfs_distances(n: usize) -> HashMap<Vec<usize>, usize> {
        let mut dist = HashMap::new();
        let id = Permutation::identity(n);
        dist.insert(id.images.clone(), 0);
        let mut queue = VecDeque::from([id]);
        while let Some(s) = queue.pop_front() {
            let d = dist[&s.images];
            for a in 0..n {
                for b in (a + 1)..n {
                    let next = s.compose(&Permutation::transposition(n, a, b));
                    if !dist.contains_key(&next.images) {
                        dist.insert(next.images.clone(), d + 1);
                        queue.push_back(next);
                    }
                }
            }
        }
        dist
    }

    #[test]
    fn cycle_examples() {
        assert_eq!(Permutation::identity(4).cycles().len(), 4);
        assert_eq!(p(3, &[&[1, 2, 3]]).cycles_one_based(), vec![vec![1, 2, 3]]);
        let s = p(6, &[&[1, 2], &[3, 4, 5]]);
        assert_eq!(
            s.cycles_one_based(),
            vec![vec![1, 2], vec![3, 4, 5], vec![6]]
        );
        assert_eq!(s.num_cycles(), 3);
        assert_eq!(s.cycle_type(), CycleType::new(vec![3, 2, 1]));
        assert_eq!(s.to_string(), "(1 2)(3 4 5)");
    }

    #[test]
    fn orbit_following_oracle() {
        // every cycle is closed under σ and consecutive entries are images
        for s in all_permutations(5).unwrap() {
            let cycles = s.cycles();
            let total: usize = cycles.iter().map(Vec::len).sum();
            assert_eq!(total, 5);
            for c in cycles {
                for k in 0..c.len() {
                    assert_eq!(s.apply(c[k]), c[(k + 1) % c.len()]);
                }
            }
        }
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(Permutation::identity(4).valuation(), 4);
        assert_eq!(p(2, &[&[1, 2]]).valuation(), 0);
        assert_eq!(p(4, &[&[1, 3], &[2, 4]]).valuation(), 4);
    }

    #[test]
    fn full_valuation_iff_parity_preserving() {
        for n in 1..=7 {
            for s in all_permutations(n).unwrap() {
                let preserves = s.images.iter().enumerate().all(|(i, &x)| i % 2 == x % 2);
                assert_eq!(s.valuation() == n, preserves, "{s}");
            }
        }
    }

    #[test]
    fn fix_move_examples() {
        let (fix, mov) = Permutation::identity(5).fix_move();
        assert_eq!((fix.len(), mov.len()), (5, 0));
        let (fix, mov) = p(5, &[&[1, 2]]).fix_move();
        assert_eq!(fix, vec![2, 3, 4]);
        assert_eq!(mov, vec![0, 1]);
        for s in all_permutations(5).unwrap() {
            let (f, m) = s.fix_move();
            assert_eq!(f.len() + m.len(), 5);
        }
    }

    #[test]
    fn transposition_examples() {
        assert_eq!(Permutation::identity(6).min_transpositions(), 0);
        assert_eq!(p(5, &[&[1, 2, 3, 4, 5]]).min_transpositions(), 4);
        assert_eq!(p(5, &[&[1, 2], &[3, 4]]).min_transpositions(), 2);
    }

    #[test]
    fn transposition_identity_matches_bfs() {
        for n in 1..=7 {
            let dist = bfs_distances(n);
            assert_eq!(dist.len(), factorial(n));
            for s in all_permutations(n).unwrap() {
                assert_eq!(s.min_transpositions(), dist[&s.images]);
                assert_eq!(dist[&s.images] + s.num_cycles(), n);
            }
        }
    }

    #[test]
    fn transposition_changes_cycle_count_by_one() {
        for n in 2..=6 {
            for s in all_permutations(n).unwrap() {
                for a in 0..n {
                    for b in (a + 1)..n {
                        let t = Permutation::transposition(n, a, b);
                        let before = s.num_cycles() as i64;
                        let after = s.compose(&t).num_cycles() as i64;
                        assert_eq!((after - before).abs(), 1);
                        assert_eq!(t.compose(&s).num_cycles() as i64, after);
                    }
                }
            }
        }
    }

    #[test]
    fn count_examples_and_bound() {
        assert_eq!(count_by_transpositions(4, 0).unwrap(), 1);
        assert_eq!(count_by_transpositions(3, 1).unwrap(), 3);
        assert_eq!(count_by_transpositions(4, 3).unwrap(), 6);
        for n in 1..=7u64 {
            let c2 = n * (n - 1) / 2;
            let mut total = 0;
            for i in 0..n as usize {
                let c = count_by_transpositions(n as usize, i).unwrap();
                assert!(c <= c2.pow(i as u32));
                total += c;
            }
            assert_eq!(total, factorial(n as usize) as u64);
        }
        assert!(matches!(
            count_by_transpositions(10, 1),
            Err(Error::BudgetExceeded(_))
        ));
        assert!(count_by_transpositions(4, 4).is_err());
    }

    #[test]
    fn parity_swapper_examples() {
        let b1 = enumerate_parity_swappers(1).unwrap();
        assert_eq!(b1, vec![p(2, &[&[1, 2]])]);
        assert_eq!(enumerate_parity_swappers(2).unwrap().len(), 4);
        for t in 1..=4 {
            let bs = enumerate_parity_swappers(t).unwrap();
            assert_eq!(bs.len(), factorial(t).pow(2));
            for b in &bs {
                assert!(b.fix_move().0.is_empty());
                assert!(b.swaps_parity());
            }
            // agrees with filtering S_{2t}
            let filtered: Vec<_> = all_permutations(2 * t)
                .unwrap()
                .into_iter()
                .filter(Permutation::swaps_parity)
                .collect();
            assert_eq!(filtered, bs);
        }
        assert!(enumerate_parity_swappers(6).is_err());
    }

    #[test]
    fn lemma_examples() {
        let reports = verify_lemmas(5).unwrap();
        let checked: u64 = reports
            .iter()
            .filter(|r| r.lemma_name == LEMMA_FIX)
            .map(|r| r.checked_count)
            .sum();
        assert_eq!(checked, 1 + 2 + 6 + 24 + 120);
        assert!(reports.iter().all(LemmaReport::passed));
        let c = verify_cycle_corollary(2).unwrap();
        assert_eq!(c.checked_count, 24 * 4);
        assert!(c.passed());
        for n in 1..=7 {
            let id = Permutation::identity(n);
            assert_eq!(id.fix_move().0.len(), 2 * id.num_cycles() - n);
        }
        assert!(verify_lemmas(8).is_err());
        assert!(verify_cycle_corollary(4).is_err());
    }

    #[test]
    fn lex_rank_enumerates() {
        for (k, s) in all_permutations(5).unwrap().iter().enumerate() {
            assert_eq!(s.lex_rank(), k);
        }
    }

    #[test]
    fn partitions_count() {
        let counts: Vec<usize> = (1..=7).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11, 15]);
    }

    #[test]
    fn invalid_inputs() {
        assert!(Permutation::from_images(vec![0, 0]).is_err());
        assert!(Permutation::from_cycles(3, &[&[1, 4]]).is_err());
        assert!(Permutation::from_cycles(3, &[&[1, 2], &[2, 3]]).is_err());
    }
}
