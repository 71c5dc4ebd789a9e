//! Exact pseudorandomness measures on finite binary prefixes.
//!
//! Sums run over `(−1)^{s(n)}`. For a fixed shape `0 < e_2 < … < e_k` the
//! correlation sums over all translates `D = (a, a+e_2, …, a+e_k)` and all
//! window lengths are differences of one prefix-sum array, so the inner
//! maximum over `(a, M)` is `max P − min P`.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::morphic::SequencePrefix;

/// Default cap on elementary steps for exact evaluation.
pub const DEFAULT_BUDGET: u128 = 1_000_000_000;

/// `D = (d_1, …, d_k)` with `0 ≤ d_1 < … < d_k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ShiftVector(Vec<usize>);

impl ShiftVector {
    pub fn new(d: Vec<usize>) -> Result<Self> {
        if d.is_empty() || d.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidShiftVector);
        }
        Ok(ShiftVector(d))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn last(&self) -> usize {
        *self.0.last().expect("non-empty")
    }

    /// Semicolon-joined, as in report files.
    pub fn joined(&self) -> String {
        self.0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(";")
    }
}

impl std::fmt::Display for ShiftVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({})",
            self.0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    /// Maximum over randomly drawn shapes only: a lower bound.
    Sampled,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Sampled => "sampled",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationOptions {
    pub budget: u128,
    /// `Some((samples, seed))` selects sampled mode.
    pub sampled: Option<(usize, u64)>,
}

impl Default for CorrelationOptions {
    fn default() -> Self {
        CorrelationOptions {
            budget: DEFAULT_BUDGET,
            sampled: None,
        }
    }
}

impl CorrelationOptions {
    pub fn exact(budget: u128) -> Self {
        CorrelationOptions { budget, sampled: None }
    }

    pub fn sampled(samples: usize, seed: u64) -> Self {
        CorrelationOptions {
            budget: DEFAULT_BUDGET,
            sampled: Some((samples, seed)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub n: usize,
    pub order: usize,
    pub value: u64,
    /// `V(s, M*, D*)`, equal to `±value`.
    pub signed_value: i64,
    pub m_star: usize,
    pub d_star: ShiftVector,
    pub mode: Mode,
    pub provenance: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WellDistReport {
    pub n: usize,
    pub value: u64,
    pub signed_value: i64,
    pub a_star: usize,
    pub b_star: usize,
    pub m_star: usize,
}

/// `U(s, M, a, b) = Σ_{j<M} (−1)^{s(a+jb)}`.
pub fn walk_sum(s: &SequencePrefix, m: usize, a: usize, b: usize) -> Result<i64> {
    if b == 0 {
        return Err(Error::OutOfRange("step b must be at least 1".into()));
    }
    if m == 0 {
        return Ok(0);
    }
    let last = a + (m - 1) * b;
    if last >= s.len() {
        return Err(Error::IndexOutOfPrefix {
            index: last,
            len: s.len(),
        });
    }
    let x = s.signs()?;
    Ok((0..m).map(|j| x[a + j * b] as i64).sum())
}

/// `V(s, M, D) = Σ_{n<M} (−1)^{s(n+d_1)+…+s(n+d_k)}`.
pub fn correlation_sum(s: &SequencePrefix, m: usize, d: &ShiftVector) -> Result<i64> {
    if m + d.last() > s.len() {
        return Err(Error::IndexOutOfPrefix {
            index: m + d.last(),
            len: s.len(),
        });
    }
    let x = s.signs()?;
    Ok((0..m)
        .map(|n| d.as_slice().iter().map(|&di| x[n + di] as i64).product::<i64>())
        .sum())
}

/// `c_M(d) = V(s, M, (0, d)) / M`.
pub fn mahler_correlation(s: &SequencePrefix, m: usize, d: usize) -> Result<Ratio<i64>> {
    if m == 0 {
        return Err(Error::OutOfRange("M must be at least 1".into()));
    }
    if m + d > s.len() {
        return Err(Error::IndexOutOfPrefix {
            index: m + d,
            len: s.len(),
        });
    }
    let v = if d == 0 {
        m as i64
    } else {
        correlation_sum(s, m, &ShiftVector(vec![0, d]))?
    };
    Ok(Ratio::new(v, m as i64))
}

/// Number of distinct length-`n` windows of the prefix (a lower bound for
/// the factor complexity of the infinite sequence).
pub fn factor_complexity(s: &SequencePrefix, n: usize) -> usize {
    if n > s.len() {
        return 0;
    }
    if n == 0 {
        return 1;
    }
    s.symbols().windows(n).collect::<HashSet<_>>().len()
}

fn check_binary_prefix(s: &SequencePrefix, n: usize) -> Result<Vec<i32>> {
    if n > s.len() {
        return Err(Error::IndexOutOfPrefix { index: n, len: s.len() });
    }
    Ok(s.truncated(n).signs()?.into_iter().map(i32::from).collect())
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// Elementary steps of an exact order-`k` evaluation up to `n`.
pub fn exact_cost(n: usize, k: usize) -> u128 {
    binomial(n as u128, k.saturating_sub(1) as u128).saturating_mul(n as u128)
}

#[derive(Debug, Clone)]
struct Best {
    value: u32,
    signed: i32,
    a: u32,
    m: u32,
    /// `(0, e_2, …, e_k)`
    shape: Vec<u32>,
}

impl Best {
    fn empty() -> Self {
        Best {
            value: 0,
            signed: 0,
            a: 0,
            m: 0,
            shape: Vec::new(),
        }
    }

    /// Larger value first, then smaller `D` lexicographically, then smaller `M`.
    fn beats(&self, other: &Best) -> bool {
        match self.value.cmp(&other.value) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => other.precedes_on_tie(self.a, &self.shape, self.m),
        }
    }

    /// Whether `(D, M)` built from `(a, shape, m)` is smaller than ours.
    fn precedes_on_tie(&self, a: u32, shape: &[u32], m: u32) -> bool {
        if self.shape.is_empty() {
            return true;
        }
        let d = shape.iter().map(|e| a + e);
        let ours = self.shape.iter().map(|e| self.a + e);
        match d.cmp(ours) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => m < self.m,
        }
    }
}

struct Table {
    best: Vec<Best>,
}

impl Table {
    fn new(n_max: usize) -> Self {
        Table {
            best: vec![Best::empty(); n_max + 1],
        }
    }

    fn merge(mut self, other: Table) -> Table {
        for (mine, theirs) in self.best.iter_mut().zip(other.best) {
            if theirs.beats(mine) {
                *mine = theirs;
            }
        }
        self
    }

    /// Runs the prefix-sum scan for one shape; `z[m] = Π_{i<k} x(m+e_i)`
    /// over all but the last shift `last`.
    fn scan(&mut self, x: &[i32], z: &[i32], shape: &[u32]) {
        let last = *shape.last().unwrap() as usize;
        let n_max = self.best.len() - 1;
        let (mut p, mut lo, mut hi) = (0i32, 0i32, 0i32);
        let (mut f_lo, mut f_hi) = (0usize, 0usize);
        for l in 1..=n_max - last {
            p += z[l - 1] * x[l - 1 + last];
            if p > hi {
                hi = p;
                f_hi = l;
            } else if p < lo {
                lo = p;
                f_lo = l;
            }
            let v = (hi - lo) as u32;
            let slot = &mut self.best[l + last];
            if v < slot.value {
                continue;
            }
            let (a, b) = if f_lo < f_hi { (f_lo, f_hi) } else { (f_hi, f_lo) };
            let (a, m) = (a as u32, (b - a) as u32);
            if v > slot.value || slot.precedes_on_tie(a, shape, m) {
                *slot = Best {
                    value: v,
                    signed: if f_lo < f_hi { v as i32 } else { -(v as i32) },
                    a,
                    m,
                    shape: shape.to_vec(),
                };
            }
        }
    }
}

/// Enumerates shapes `0 < e_j < … < e_k ≤ n_max − 1` extending `shape`.
fn enumerate(table: &mut Table, x: &[i32], z: &[i32], shape: &mut Vec<u32>, remaining: usize) {
    let n_max = table.best.len() - 1;
    let prev = *shape.last().unwrap() as usize;
    if remaining == 1 {
        for e in prev + 1..n_max {
            shape.push(e as u32);
            table.scan(x, z, shape);
            shape.pop();
        }
        return;
    }
    for e in prev + 1..n_max {
        let z2: Vec<i32> = (0..n_max - e).map(|m| z[m] * x[m + e]).collect();
        shape.push(e as u32);
        enumerate(table, x, &z2, shape, remaining - 1);
        shape.pop();
    }
}

fn exact_table(x: &[i32], k: usize) -> Table {
    let n_max = x.len();
    let ones = vec![1i32; n_max];
    if k == 1 {
        let mut t = Table::new(n_max);
        t.scan(&ones, x, &[0]);
        return t;
    }
    let first_shifts: Vec<usize> = (1..n_max).collect();
    first_shifts
        .into_par_iter()
        .fold(
            || Table::new(n_max),
            |mut t, e| {
                let mut shape = vec![0, e as u32];
                if k == 2 {
                    t.scan(x, x, &shape);
                } else {
                    let z: Vec<i32> = (0..n_max - e).map(|m| x[m] * x[m + e]).collect();
                    enumerate(&mut t, x, &z, &mut shape, k - 2);
                }
                t
            },
        )
        .reduce(|| Table::new(n_max), Table::merge)
}

fn sampled_table(x: &[i32], k: usize, samples: usize, seed: u64) -> Table {
    let n_max = x.len();
    let mut t = Table::new(n_max);
    if k == 1 || n_max < k {
        return if k == 1 { exact_table(x, 1) } else { t };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shapes: Vec<Vec<u32>> = (0..samples)
        .map(|_| {
            let mut e: Vec<u32> = sample(&mut rng, n_max - 1, k - 1)
                .into_iter()
                .map(|i| i as u32 + 1)
                .collect();
            e.sort_unstable();
            e.insert(0, 0);
            e
        })
        .collect();
    shapes.sort();
    shapes.dedup();
    for shape in &shapes {
        let last = *shape.last().unwrap() as usize;
        let z: Vec<i32> = (0..n_max - last)
            .map(|m| shape[..k - 1].iter().map(|&e| x[m + e as usize]).product())
            .collect();
        t.scan(x, &z, shape);
    }
    t
}

fn correlation_table(s: &SequencePrefix, n_max: usize, k: usize, opts: &CorrelationOptions) -> Result<(Table, Mode)> {
    if k == 0 {
        return Err(Error::OutOfRange("order must be at least 1".into()));
    }
    if n_max < k {
        return Err(Error::OrderExceedsLength { order: k, n: n_max });
    }
    let x = check_binary_prefix(s, n_max)?;
    match opts.sampled {
        Some((samples, seed)) => Ok((sampled_table(&x, k, samples, seed), Mode::Sampled)),
        None => {
            let needed = exact_cost(n_max, k);
            if needed > opts.budget {
                return Err(Error::BudgetExceeded {
                    needed,
                    budget: opts.budget,
                });
            }
            Ok((exact_table(&x, k), Mode::Exact))
        }
    }
}

fn report_from(
    best: &Best,
    n: usize,
    k: usize,
    mode: Mode,
    s: &SequencePrefix,
    elapsed: Duration,
) -> CorrelationReport {
    CorrelationReport {
        n,
        order: k,
        value: best.value as u64,
        signed_value: best.signed as i64,
        m_star: best.m as usize,
        d_star: ShiftVector(best.shape.iter().map(|&e| (best.a + e) as usize).collect()),
        mode,
        provenance: s.provenance().to_string(),
        elapsed,
    }
}

/// `C_k(s, N) = max_{M, D} |V(s, M, D)|` over `M ≥ 1`, `M + d_k ≤ N`.
pub fn correlation(s: &SequencePrefix, n: usize, k: usize, opts: &CorrelationOptions) -> Result<CorrelationReport> {
    let start = Instant::now();
    let (table, mode) = correlation_table(s, n, k, opts)?;
    if table.best[n].shape.is_empty() {
        return Err(Error::OrderExceedsLength { order: k, n });
    }
    Ok(report_from(&table.best[n], n, k, mode, s, start.elapsed()))
}

/// Reports for every `N` in `k..=n_max`, computed in one pass.
pub fn correlation_profile(
    s: &SequencePrefix,
    n_max: usize,
    k: usize,
    opts: &CorrelationOptions,
) -> Result<Vec<CorrelationReport>> {
    let start = Instant::now();
    let (table, mode) = correlation_table(s, n_max, k, opts)?;
    let elapsed = start.elapsed();
    Ok((k..=n_max)
        .filter(|&n| !table.best[n].shape.is_empty())
        .map(|n| report_from(&table.best[n], n, k, mode, s, elapsed))
        .collect())
}

/// `W(s, N)` for every `N` in `1..=n_max`.
pub fn well_distribution_profile(s: &SequencePrefix, n_max: usize, budget: u128) -> Result<Vec<WellDistReport>> {
    let needed = (n_max as u128) * (n_max as u128);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let x = check_binary_prefix(s, n_max)?;
    let mut at: Vec<Option<WellDistReport>> = vec![None; n_max + 1];
    for b in 1..n_max.max(2) {
        for r in 0..b.min(n_max) {
            let (mut p, mut lo, mut hi) = (0i64, 0i64, 0i64);
            let (mut f_lo, mut f_hi) = (0usize, 0usize);
            let mut j = 0;
            let mut i = r;
            while i < n_max {
                j += 1;
                p += x[i] as i64;
                if p > hi {
                    hi = p;
                    f_hi = j;
                } else if p < lo {
                    lo = p;
                    f_lo = j;
                }
                let v = (hi - lo) as u64;
                if at[i + 1].as_ref().is_none_or(|w| v > w.value) {
                    let (first, second) = (f_lo.min(f_hi), f_lo.max(f_hi));
                    at[i + 1] = Some(WellDistReport {
                        n: i + 1,
                        value: v,
                        signed_value: if f_lo < f_hi { v as i64 } else { -(v as i64) },
                        a_star: r + first * b,
                        b_star: b,
                        m_star: second - first,
                    });
                }
                i += b;
            }
        }
    }
    let mut out: Vec<WellDistReport> = Vec::with_capacity(n_max);
    for (n, here) in at.into_iter().enumerate().skip(1) {
        let here = here.expect("every N ends some progression");
        let keep_prev = out.last().is_some_and(|w: &WellDistReport| w.value >= here.value);
        let mut row = if keep_prev { out.last().unwrap().clone() } else { here };
        row.n = n;
        out.push(row);
    }
    Ok(out)
}

/// `W(s, N) = max |U(s, M, a, b)|` over `0 ≤ a ≤ a + (M−1)b < N`.
pub fn well_distribution(s: &SequencePrefix, n: usize, budget: u128) -> Result<WellDistReport> {
    if n == 0 {
        return Err(Error::OutOfRange("N must be at least 1".into()));
    }
    Ok(well_distribution_profile(s, n, budget)?.pop().expect("n ≥ 1"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MorseHedlundBound {
    /// Factor length, also the certified value.
    pub n: usize,
    /// Distinct length-`n` factors seen in the whole prefix.
    pub complexity: usize,
    pub d: ShiftVector,
    pub value: i64,
    /// `d_{2k} + n`: the length at which the bound is certified.
    pub certified_len: usize,
    /// Whether `certified_len ≤ 2k·p(n)`.
    pub within_window: bool,
}

/// A length-`n` factor with `2k` occurrences starting before `2k·p(n)`,
/// its occurrences as `D`, and `V(s, n, D) = n`.
pub fn morse_hedlund_bound(s: &SequencePrefix, k: usize, n: usize) -> Result<MorseHedlundBound> {
    if k == 0 || n == 0 {
        return Err(Error::OutOfRange("k and n must be positive".into()));
    }
    let p = factor_complexity(s, n);
    let window = (2 * k * p).min(s.len().saturating_sub(n - 1));
    let sym = s.symbols();
    let mut seen: HashMap<&[u8], Vec<usize>> = HashMap::new();
    for i in 0..window {
        let occ = seen.entry(&sym[i..i + n]).or_default();
        occ.push(i);
        if occ.len() == 2 * k {
            let d = ShiftVector::new(occ.clone())?;
            let value = correlation_sum(s, n, &d)?;
            return Ok(MorseHedlundBound {
                n,
                complexity: p,
                certified_len: d.last() + n,
                within_window: d.last() + n <= 2 * k * p,
                d,
                value,
            });
        }
    }
    Err(Error::NotEnoughOccurrences { len: n, needed: 2 * k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphic::SequencePrefix;

    fn bin(bits: &str) -> SequencePrefix {
        SequencePrefix::binary(bits.bytes().map(|b| b - b'0').collect(), "test").unwrap()
    }

    fn tm(n: usize) -> SequencePrefix {
        SequencePrefix::binary((0..n).map(|i| (i.count_ones() % 2) as u8).collect(), "tm").unwrap()
    }

    fn periodic(n: usize) -> SequencePrefix {
        SequencePrefix::binary((0..n).map(|i| (i % 2) as u8).collect(), "01").unwrap()
    }

    fn zeros(n: usize) -> SequencePrefix {
        SequencePrefix::binary(vec![0; n], "0").unwrap()
    }

    /// Every `D` with `d_k < N`, every `M ≤ N − d_k`.
    fn naive_correlation(s: &SequencePrefix, n: usize, k: usize) -> u64 {
        fn rec(s: &SequencePrefix, n: usize, k: usize, d: &mut Vec<usize>, best: &mut u64) {
            if d.len() == k {
                let sv = ShiftVector::new(d.clone()).unwrap();
                for m in 1..=n - sv.last() {
                    *best = (*best).max(correlation_sum(s, m, &sv).unwrap().unsigned_abs());
                }
                return;
            }
            let from = d.last().map_or(0, |&x| x + 1);
            for x in from..n {
                d.push(x);
                rec(s, n, k, d, best);
                d.pop();
            }
        }
        let mut best = 0;
        rec(s, n, k, &mut Vec::new(), &mut best);
        best
    }

    fn naive_well_distribution(s: &SequencePrefix, n: usize) -> u64 {
        let mut best = 0;
        for a in 0..n {
            for b in 1..=n {
                let mut m = 1;
                while a + (m - 1) * b < n {
                    best = best.max(walk_sum(s, m, a, b).unwrap().unsigned_abs());
                    m += 1;
                }
            }
        }
        best
    }

    #[test]
    fn walk_sum_examples() {
        assert_eq!(walk_sum(&zeros(8), 8, 0, 1).unwrap(), 8);
        assert_eq!(walk_sum(&bin("01010101"), 4, 0, 2).unwrap(), 4);
        assert_eq!(walk_sum(&tm(16), 5, 0, 3).unwrap(), 5);
        assert_eq!(walk_sum(&tm(16), 5, 1, 3).unwrap(), -3);
        assert_eq!(
            walk_sum(&tm(16), 7, 0, 3).unwrap_err(),
            Error::IndexOutOfPrefix { index: 18, len: 16 }
        );
        assert!(walk_sum(&tm(16), 1, 0, 0).is_err());
    }

    #[test]
    fn correlation_sum_examples() {
        let d = ShiftVector::new(vec![0, 1]).unwrap();
        assert_eq!(correlation_sum(&tm(16), 5, &d).unwrap(), -3);
        assert_eq!(
            correlation_sum(&zeros(10), 7, &ShiftVector::new(vec![1, 2, 3]).unwrap()).unwrap(),
            7
        );
        let s = bin("011011011011");
        assert_eq!(
            correlation_sum(&s, 9, &ShiftVector::new(vec![0, 3]).unwrap()).unwrap(),
            9
        );
        assert!(ShiftVector::new(vec![2, 2]).is_err());
        assert!(ShiftVector::new(vec![]).is_err());
        assert!(correlation_sum(&tm(16), 16, &d).is_err());
    }

    #[test]
    fn mahler_examples() {
        let s = tm(64);
        assert_eq!(mahler_correlation(&s, 10, 0).unwrap(), Ratio::from_integer(1));
        assert_eq!(mahler_correlation(&s, 5, 1).unwrap(), Ratio::new(-3, 5));
    }

    #[test]
    fn factor_complexity_examples() {
        let s = tm(1 << 14);
        let p: Vec<usize> = (1..=3).map(|n| factor_complexity(&s, n)).collect();
        assert_eq!(p, [2, 4, 6]);
        assert_eq!(factor_complexity(&zeros(50), 7), 1);
        assert_eq!(factor_complexity(&zeros(5), 6), 0);
        assert_eq!(factor_complexity(&zeros(5), 0), 1);
    }

    #[test]
    fn correlation_examples() {
        let o = CorrelationOptions::default();
        for n in [3, 10, 37] {
            assert_eq!(correlation(&periodic(n), n, 3, &o).unwrap().value, 1);
        }
        assert!(correlation(&tm(12), 12, 2, &o).unwrap().value >= 2);
        for k in 1..=4 {
            let r = correlation(&zeros(10), 10, k, &o).unwrap();
            assert_eq!(r.value, 11 - k as u64);
            assert_eq!(r.d_star.as_slice(), (0..k).collect::<Vec<_>>());
        }
        let r = correlation(&zeros(10), 10, 2, &o).unwrap();
        assert_eq!((r.m_star, r.d_star.joined()), (9, "0;1".to_string()));
        assert!(matches!(
            correlation(&tm(10), 2, 3, &o).unwrap_err(),
            Error::OrderExceedsLength { .. }
        ));
        assert!(matches!(
            correlation(&tm(400), 400, 4, &o).unwrap_err(),
            Error::BudgetExceeded { .. }
        ));
    }

    #[test]
    fn exact_matches_brute_force() {
        let seqs = [tm(14), periodic(13), bin("0010111011000101"), bin("1101001000")];
        for s in &seqs {
            for k in 1..=4 {
                for n in k..=s.len().min(12) {
                    let r = correlation(s, n, k, &CorrelationOptions::default()).unwrap();
                    assert_eq!(r.value, naive_correlation(s, n, k), "k={k}, n={n}");
                    assert_eq!(correlation_sum(s, r.m_star, &r.d_star).unwrap(), r.signed_value);
                }
            }
        }
    }

    #[test]
    fn witness_is_lexicographically_smallest() {
        let s = bin("0110100110010110");
        for k in 1..=3 {
            let n = 12;
            let r = correlation(&s, n, k, &CorrelationOptions::default()).unwrap();
            let mut first: Option<(Vec<usize>, usize)> = None;
            fn rec(
                s: &SequencePrefix,
                n: usize,
                k: usize,
                target: u64,
                d: &mut Vec<usize>,
                first: &mut Option<(Vec<usize>, usize)>,
            ) {
                if first.is_some() {
                    return;
                }
                if d.len() == k {
                    let sv = ShiftVector::new(d.clone()).unwrap();
                    for m in 1..=n - sv.last() {
                        if correlation_sum(s, m, &sv).unwrap().unsigned_abs() == target {
                            *first = Some((d.clone(), m));
                            return;
                        }
                    }
                    return;
                }
                let from = d.last().map_or(0, |&x| x + 1);
                for x in from..n {
                    d.push(x);
                    rec(s, n, k, target, d, first);
                    d.pop();
                }
            }
            rec(&s, n, k, r.value, &mut Vec::new(), &mut first);
            assert_eq!(first.unwrap(), (r.d_star.as_slice().to_vec(), r.m_star));
        }
    }

    #[test]
    fn profile_matches_single_evaluations() {
        let s = tm(40);
        let profile = correlation_profile(&s, 40, 3, &CorrelationOptions::default()).unwrap();
        assert_eq!(profile.len(), 38);
        for r in profile.iter().step_by(7) {
            let single = correlation(&s, r.n, 3, &CorrelationOptions::default()).unwrap();
            assert_eq!(
                (single.value, &single.d_star, single.m_star),
                (r.value, &r.d_star, r.m_star)
            );
        }
    }

    #[test]
    fn sampled_is_a_lower_bound() {
        let s = tm(60);
        let exact = correlation(&s, 60, 3, &CorrelationOptions::default()).unwrap();
        let sampled = correlation(&s, 60, 3, &CorrelationOptions::sampled(50, 7)).unwrap();
        assert_eq!(sampled.mode, Mode::Sampled);
        assert!(sampled.value <= exact.value);
        assert_eq!(
            correlation_sum(&s, sampled.m_star, &sampled.d_star).unwrap(),
            sampled.signed_value
        );
        let again = correlation(&s, 60, 3, &CorrelationOptions::sampled(50, 7)).unwrap();
        assert_eq!(again.d_star, sampled.d_star);
    }

    #[test]
    fn well_distribution_examples() {
        assert_eq!(well_distribution(&zeros(17), 17, DEFAULT_BUDGET).unwrap().value, 17);
        assert_eq!(well_distribution(&periodic(10), 10, DEFAULT_BUDGET).unwrap().value, 5);
        let s = tm(20);
        let w = well_distribution(&s, 20, DEFAULT_BUDGET).unwrap();
        assert_eq!(w.value, naive_well_distribution(&s, 20));
        assert_eq!(walk_sum(&s, w.m_star, w.a_star, w.b_star).unwrap(), w.signed_value);
        assert!(well_distribution(&s, 20, 10).is_err());
    }

    #[test]
    fn morse_hedlund_examples() {
        let r = morse_hedlund_bound(&tm(1 << 12), 1, 8).unwrap();
        assert_eq!(r.value, 8);
        let r = morse_hedlund_bound(&zeros(20), 1, 5).unwrap();
        assert_eq!((r.d.joined(), r.value), ("0;1".to_string(), 5));
        assert!(matches!(
            morse_hedlund_bound(&tm(8), 2, 6).unwrap_err(),
            Error::NotEnoughOccurrences { .. }
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn prefix() -> impl Strategy<Value = SequencePrefix> {
            proptest::collection::vec(0u8..2, 4..14).prop_map(|v| SequencePrefix::binary(v, "random").unwrap())
        }

        proptest! {
            #[test]
            fn correlation_agrees_with_naive(s in prefix(), k in 1usize..4) {
                prop_assume!(s.len() >= k);
                let r = correlation(&s, s.len(), k, &CorrelationOptions::default()).unwrap();
                prop_assert_eq!(r.value, naive_correlation(&s, s.len(), k));
                prop_assert!(r.m_star + r.d_star.last() <= s.len());
                prop_assert_eq!(correlation_sum(&s, r.m_star, &r.d_star).unwrap(), r.signed_value);
            }

            #[test]
            fn monotone_and_bounded(s in prefix(), k in 1usize..4) {
                prop_assume!(s.len() >= k);
                let p = correlation_profile(&s, s.len(), k, &CorrelationOptions::default()).unwrap();
                for w in p.windows(2) {
                    prop_assert!(w[0].value <= w[1].value);
                }
                for r in &p {
                    prop_assert!(r.value >= 1 && r.value <= r.n as u64);
                }
                let w = well_distribution_profile(&s, s.len(), DEFAULT_BUDGET).unwrap();
                for (i, r) in w.iter().enumerate() {
                    prop_assert!(r.value >= 1 && r.value <= r.n as u64);
                    prop_assert_eq!(r.value, naive_well_distribution(&s, i + 1));
                    prop_assert!(r.a_star + (r.m_star - 1) * r.b_star < r.n);
                    prop_assert_eq!(walk_sum(&s, r.m_star, r.a_star, r.b_star).unwrap(), r.signed_value);
                }
            }

            #[test]
            fn even_orders_ignore_complement(s in prefix(), k in 1usize..3) {
                let flipped = SequencePrefix::binary(s.symbols().iter().map(|b| 1 - b).collect(), "flip").unwrap();
                let o = CorrelationOptions::default();
                prop_assume!(s.len() >= 2 * k);
                prop_assert_eq!(
                    correlation(&s, s.len(), 2 * k, &o).unwrap().value,
                    correlation(&flipped, s.len(), 2 * k, &o).unwrap().value
                );
            }
        }
    }

    #[test]
    fn odd_orders_of_period_two() {
        let s = periodic(40);
        for k in [3, 5] {
            for r in correlation_profile(&s, 40, k, &CorrelationOptions::default()).unwrap() {
                assert_eq!(r.value, 1, "k={k} N={}", r.n);
            }
        }
    }
}
