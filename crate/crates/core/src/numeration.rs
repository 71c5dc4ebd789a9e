//! Greedy positional numeration and genealogical enumeration of regular
//! languages.

use std::sync::RwLock;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::automata::{Automaton, Dfa};
use crate::beta::{build_recurrence, BetaSpec, LinearRecurrence};
use crate::error::{Error, Result};
use crate::{Digit, Letter};

pub const DEFAULT_PROBE_DEPTH: usize = 64;

/// Linear positional numeration system: greedy representations over the
/// sequence `U`, with a growable table of values.
#[derive(Debug)]
pub struct PositionalSystem {
    recurrence: LinearRecurrence,
    cache: RwLock<Vec<BigUint>>,
    small: Vec<u64>,
    max_digit: Digit,
}

impl Clone for PositionalSystem {
    fn clone(&self) -> Self {
        PositionalSystem {
            recurrence: self.recurrence.clone(),
            cache: RwLock::new(self.cache.read().unwrap().clone()),
            small: self.small.clone(),
            max_digit: self.max_digit,
        }
    }
}

impl PositionalSystem {
    pub fn new(recurrence: LinearRecurrence) -> Result<Self> {
        Self::with_probe_depth(recurrence, DEFAULT_PROBE_DEPTH)
    }

    /// The digit alphabet is `0..=max_{i ≤ depth} ⌈U(i+1)/U(i)⌉ − 1`.
    pub fn with_probe_depth(recurrence: LinearRecurrence, depth: usize) -> Result<Self> {
        let mut table = Vec::new();
        recurrence.extend(&mut table, depth.max(1) + 2);
        let mut max_digit: u64 = 0;
        for i in 0..=depth {
            let (q, r) = num_integer::Integer::div_rem(&table[i + 1], &table[i]);
            let ceil = if r.is_zero() { q } else { q + 1u32 };
            let digit = (ceil - 1u32).to_u64().unwrap_or(u64::MAX);
            max_digit = max_digit.max(digit);
        }
        let max_digit =
            Digit::try_from(max_digit).map_err(|_| Error::InvalidRecurrence("digit alphabet too large".into()))?;
        recurrence.extend(&mut table, 128);
        let small: Vec<u64> = table.iter().map_while(|v| v.to_u64()).collect();
        Ok(PositionalSystem {
            recurrence,
            cache: RwLock::new(table),
            small,
            max_digit,
        })
    }

    pub fn from_beta(spec: &BetaSpec) -> Result<Self> {
        Self::new(build_recurrence(spec)?)
    }

    pub fn recurrence(&self) -> &LinearRecurrence {
        &self.recurrence
    }

    pub fn max_digit(&self) -> Digit {
        self.max_digit
    }

    /// `U(i)`.
    pub fn value(&self, i: usize) -> BigUint {
        if let Some(v) = self.cache.read().unwrap().get(i) {
            return v.clone();
        }
        let mut table = self.cache.write().unwrap();
        self.recurrence.extend(&mut table, i + 1);
        table[i].clone()
    }

    pub fn value_u64(&self, i: usize) -> Option<u64> {
        self.small.get(i).copied()
    }

    /// Greedy representation, most significant digit first; `rep(0) = ε`.
    pub fn rep(&self, n: &BigUint) -> Vec<Digit> {
        if let Some(n) = n.to_u64() {
            if self.small.last().is_some_and(|&top| n < top) {
                return self.rep_u64(n);
            }
        }
        let mut top = 0;
        while &self.value(top + 1) <= n {
            top += 1;
        }
        let mut rest = n.clone();
        let mut digits = Vec::with_capacity(top + 1);
        for i in (0..=top).rev() {
            let u = self.value(i);
            let (q, r) = num_integer::Integer::div_rem(&rest, &u);
            digits.push(q.to_u32().expect("greedy digit fits the alphabet"));
            rest = r;
        }
        digits
    }

    /// Greedy representation of a machine-word integer.
    pub fn rep_u64(&self, n: u64) -> Vec<Digit> {
        if n == 0 {
            return Vec::new();
        }
        let top = match self.small.iter().position(|&u| u > n) {
            Some(p) => p - 1,
            None => return self.rep(&BigUint::from(n)),
        };
        let mut rest = n;
        let mut digits = Vec::with_capacity(top + 1);
        for i in (0..=top).rev() {
            let u = self.small[i];
            digits.push((rest / u) as Digit);
            rest %= u;
        }
        digits
    }

    fn check_digits(&self, w: &[Digit]) -> Result<()> {
        match w.iter().find(|&&d| d > self.max_digit) {
            Some(&digit) => Err(Error::DigitOutOfRange {
                digit,
                max: self.max_digit,
            }),
            None => Ok(()),
        }
    }

    /// `Σ c_i U(i)` for any digit word, greedy or not.
    pub fn val(&self, w: &[Digit]) -> Result<BigUint> {
        self.check_digits(w)?;
        let len = w.len();
        let mut total = BigUint::zero();
        for (pos, &d) in w.iter().enumerate() {
            if d != 0 {
                total += self.value(len - 1 - pos) * d;
            }
        }
        Ok(total)
    }

    /// Whether `w` is the greedy representation of its value: no leading
    /// zero, and every suffix `c_j…c_0` is worth less than `U(j+1)`.
    pub fn is_greedy(&self, w: &[Digit]) -> Result<bool> {
        self.check_digits(w)?;
        if w.is_empty() {
            return Ok(true);
        }
        if w[0] == 0 {
            return Ok(false);
        }
        let len = w.len();
        if self.small.len() > len {
            let mut suffix: u64 = 0;
            for (j, &d) in w.iter().rev().enumerate() {
                suffix += d as u64 * self.small[j];
                if suffix >= self.small[j + 1] {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        let mut suffix = BigUint::zero();
        for (j, &d) in w.iter().rev().enumerate() {
            suffix += self.value(j) * d;
            if suffix >= self.value(j + 1) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Number of length-`n` words of `0*L`, which is `U(n)`.
    pub fn count_words_with_leading_zeros(&self, n: usize) -> BigUint {
        self.value(n)
    }

    /// Checks `w ∈ L ⇔ w0 ∈ L` for every nonempty `w` with `|w| ≤ max_len`.
    pub fn is_bertrand_up_to(&self, max_len: usize) -> Result<BertrandCheck> {
        let limit = self.value_u64(max_len + 1).ok_or(Error::Capacity {
            requested: max_len as u128 + 1,
            capacity: self.small.len() as u128,
        })?;
        let mut violations: Vec<Vec<Digit>> = Vec::new();
        for n in 1..limit {
            let x = self.rep_u64(n);
            if x.len() <= max_len {
                let mut x0 = x.clone();
                x0.push(0);
                if !self.is_greedy(&x0)? {
                    violations.push(x.clone());
                }
            }
            if x.len() >= 2 && x.last() == Some(&0) {
                let w = &x[..x.len() - 1];
                if !self.is_greedy(w)? {
                    violations.push(w.to_vec());
                }
            }
        }
        let counterexample = violations
            .into_iter()
            .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(BertrandCheck {
            holds: counterexample.is_none(),
            counterexample,
        })
    }
}

/// Brute-force count of length-`n` digit words whose leading-zero-stripped
/// form is greedy.
pub fn count_words_by_enumeration(sys: &PositionalSystem, n: usize) -> Result<u64> {
    let width = sys.max_digit() + 1;
    let mut word = vec![0 as Digit; n];
    let mut count = 0;
    loop {
        let start = word.iter().position(|&d| d != 0).unwrap_or(n);
        if sys.is_greedy(&word[start..])? {
            count += 1;
        }
        if !crate::automata::increment(&mut word, width) {
            return Ok(count);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BertrandCheck {
    pub holds: bool,
    pub counterexample: Option<Vec<Digit>>,
}

/// Genealogical (length, then lexicographic) indexing of the language of a
/// DFA, backed by per-length path counts.
#[derive(Debug)]
pub struct GenealogicalIndex<'a> {
    dfa: &'a Dfa,
    counts: RwLock<Vec<Vec<BigUint>>>,
    infinite: bool,
}

impl<'a> GenealogicalIndex<'a> {
    pub fn new(dfa: &'a Dfa) -> Self {
        GenealogicalIndex {
            dfa,
            counts: RwLock::new(dfa.count_table(0)),
            infinite: dfa.has_infinite_language(),
        }
    }

    pub fn dfa(&self) -> &Dfa {
        self.dfa
    }

    fn count(&self, len: usize, state: usize) -> BigUint {
        if let Some(row) = self.counts.read().unwrap().get(len) {
            return row[state].clone();
        }
        let mut table = self.counts.write().unwrap();
        if table.len() <= len {
            *table = self.dfa.count_table((len + 1).max(2 * table.len()));
        }
        table[len][state].clone()
    }

    /// Number of accepted words; `None` when the language is infinite.
    pub fn size(&self) -> Option<BigUint> {
        if self.infinite {
            return None;
        }
        let init = self.dfa.initial();
        Some((0..=self.dfa.num_states()).map(|l| self.count(l, init)).sum())
    }

    /// The `(n+1)`-st accepted word.
    pub fn nth_word(&self, n: &BigUint) -> Result<Vec<Letter>> {
        if let Some(size) = self.size() {
            if n >= &size {
                return Err(Error::FiniteLanguage {
                    requested: n.to_string(),
                    available: size.to_string(),
                });
            }
        }
        let init = self.dfa.initial();
        let mut rest = n.clone();
        let mut len = 0;
        loop {
            let c = self.count(len, init);
            if rest < c {
                break;
            }
            rest -= c;
            len += 1;
        }
        let mut word = Vec::with_capacity(len);
        let mut q = init;
        for pos in 0..len {
            let remaining = len - pos - 1;
            let mut chosen = None;
            for c in 0..self.dfa.alphabet_len() as Letter {
                if let Some(t) = self.dfa.step(q, c) {
                    let k = self.count(remaining, t);
                    if rest < k {
                        chosen = Some((c, t));
                        break;
                    }
                    rest -= k;
                }
            }
            let (c, t) = chosen.expect("counts are consistent");
            word.push(c);
            q = t;
        }
        Ok(word)
    }

    pub fn nth_word_u64(&self, n: u64) -> Result<Vec<Letter>> {
        self.nth_word(&BigUint::from(n))
    }

    /// Inverse of [`nth_word`](Self::nth_word).
    pub fn word_index(&self, w: &[Letter]) -> Result<BigUint> {
        if !self.dfa.accepts(w)? {
            return Err(Error::NotInLanguage);
        }
        let init = self.dfa.initial();
        let len = w.len();
        let mut index: BigUint = (0..len).map(|l| self.count(l, init)).sum();
        let mut q = init;
        for (pos, &letter) in w.iter().enumerate() {
            let remaining = len - pos - 1;
            for c in 0..letter {
                if let Some(t) = self.dfa.step(q, c) {
                    index += self.count(remaining, t);
                }
            }
            q = self.dfa.step(q, letter).expect("word is accepted");
        }
        Ok(index)
    }

    /// Accepted words in genealogical order.
    pub fn iter(&self) -> impl Iterator<Item = Vec<Letter>> + '_ {
        let size = self.size();
        (0u64..)
            .take_while(move |&n| size.as_ref().is_none_or(|s| &BigUint::from(n) < s))
            .map(move |n| self.nth_word_u64(n).expect("index within language"))
    }
}
