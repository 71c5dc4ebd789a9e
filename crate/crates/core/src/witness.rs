//! Collision witnesses in product automata and the correlation
//! certificates they yield, plus recurrence diagnostics.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::automata::{Automaton, ProductAutomaton};
use crate::error::{Error, Result};
use crate::measures::{correlation_profile, correlation_sum, CorrelationOptions, ShiftVector};
use crate::morphic::SequencePrefix;
use crate::numeration::{GenealogicalIndex, PositionalSystem};
use crate::{Digit, Letter};

/// `2k` distinct non-empty words of the numeration language reaching one
/// product state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollisionWitness {
    pub k: usize,
    /// Words in genealogical order, as found.
    pub words: Vec<Vec<Digit>>,
    /// `Δ((a₀, r₀), u_i)`.
    pub state: usize,
    /// Zeros appended to every word so that the common state reads all
    /// `U(n)` length-`n` continuations.
    pub zeros: usize,
    /// Non-empty words examined, and how many of them were eligible.
    pub scanned: usize,
    pub counted: usize,
    /// `(2k−1)·|Q|·|R|`.
    pub bound: usize,
}

impl CollisionWitness {
    /// `u_i·0^z`.
    pub fn padded_words(&self) -> Vec<Vec<Digit>> {
        self.words
            .iter()
            .map(|w| w.iter().copied().chain(std::iter::repeat_n(0, self.zeros)).collect())
            .collect()
    }
}

fn genealogical_lt(a: &[Digit], b: &[Digit]) -> bool {
    (a.len(), a) < (b.len(), b)
}

/// Per state, the number of zeros after which it becomes full, if ever.
fn zeros_to_full(p: &ProductAutomaton, sys: &PositionalSystem) -> Vec<Option<usize>> {
    let horizon = 2 * (p.num_states() + sys.recurrence().order()) + 2;
    let table = p.dfa().count_table(horizon);
    let full: Vec<bool> = (0..p.num_states())
        .map(|q| (0..=horizon).all(|n| table[n][q] == sys.value(n)))
        .collect();
    (0..p.num_states())
        .map(|q| {
            let mut cur = q;
            for z in 0..=p.num_states() {
                if full[cur] {
                    return Some(z);
                }
                cur = p.step(cur, 0)?;
            }
            None
        })
        .collect()
}

/// Scans `L` genealogically and returns the first state collecting `2k`
/// eligible non-empty words.
pub fn find_collisions(p: &ProductAutomaton, sys: &PositionalSystem, k: usize) -> Result<CollisionWitness> {
    if k == 0 {
        return Err(Error::OutOfRange("k must be at least 1".into()));
    }
    if p.alphabet_len() < sys.max_digit() as usize + 1 {
        return Err(Error::AlphabetMismatch {
            left: p.alphabet_len(),
            right: sys.max_digit() as usize + 1,
        });
    }
    let zeros = zeros_to_full(p, sys);
    let (q, r) = p.component_sizes();
    let bound = (2 * k - 1) * q * r;
    let index = GenealogicalIndex::new(p.dfa());
    let mut buckets: HashMap<usize, Vec<Vec<Digit>>> = HashMap::new();
    let (mut scanned, mut counted) = (0, 0);
    for word in index.iter().filter(|w| !w.is_empty()) {
        scanned += 1;
        let state = p.run(&word)?.expect("accepted word has a run");
        let Some(z) = zeros[state] else { continue };
        counted += 1;
        assert!(counted <= bound + 1, "pigeonhole bound {bound} exceeded");
        let bucket = buckets.entry(state).or_default();
        bucket.push(word);
        if bucket.len() == 2 * k {
            return Ok(CollisionWitness {
                k,
                words: std::mem::take(bucket),
                state,
                zeros: z,
                scanned,
                counted,
                bound,
            });
        }
    }
    Err(Error::PigeonholeExceeded { bound })
}

/// Validates user-chosen colliding words.
pub fn witness_from_words(
    p: &ProductAutomaton,
    sys: &PositionalSystem,
    words: Vec<Vec<Digit>>,
) -> Result<CollisionWitness> {
    if words.len() < 2 || words.len() % 2 == 1 {
        return Err(Error::OutOfRange(format!(
            "need an even number of words, got {}",
            words.len()
        )));
    }
    if words.windows(2).any(|w| !genealogical_lt(&w[0], &w[1])) {
        return Err(Error::OutOfRange(
            "words must be distinct and in genealogical order".into(),
        ));
    }
    let zeros = zeros_to_full(p, sys);
    let mut state = None;
    for (i, w) in words.iter().enumerate() {
        if w.is_empty() || !p.dfa().accepts(w)? {
            return Err(Error::NotInLanguage);
        }
        let q = p.run(w)?.expect("accepted");
        if state.is_some_and(|s| s != q) {
            return Err(Error::Mismatch {
                index: i,
                detail: "words reach different product states".into(),
            });
        }
        state = Some(q);
    }
    let state = state.expect("non-empty list");
    let z = zeros[state].ok_or_else(|| Error::Mismatch {
        index: 0,
        detail: "the common state never reads every continuation".into(),
    })?;
    let (q, r) = p.component_sizes();
    let k = words.len() / 2;
    Ok(CollisionWitness {
        k,
        words,
        state,
        zeros: z,
        scanned: 0,
        counted: 0,
        bound: (2 * k - 1) * q * r,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorrelationCertificate {
    pub order: usize,
    pub m: usize,
    /// `U(M)`.
    #[serde(serialize_with = "big_as_string")]
    pub block: BigUint,
    /// `u_i·0^z` with `z` from the witness.
    pub words: Vec<String>,
    /// `p_i = val(u_i·0^{z+M})`.
    #[serde(serialize_with = "bigs_as_strings")]
    pub positions: Vec<BigUint>,
    pub verified: bool,
}

fn big_as_string<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn bigs_as_strings<S: serde::Serializer>(xs: &[BigUint], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.to_string()))
}

impl CorrelationCertificate {
    /// The bound `C_{2k}(s, N) ≥ U(M)` holds for `N` at least this.
    pub fn implied_n(&self) -> BigUint {
        self.positions.last().expect("non-empty") + &self.block
    }

    pub fn shift_vector(&self) -> Result<ShiftVector> {
        let d = self
            .positions
            .iter()
            .map(|p| p.to_usize().ok_or_else(|| Error::OutOfRange(p.to_string())))
            .collect::<Result<Vec<_>>>()?;
        ShiftVector::new(d)
    }
}

fn padded_positions(w: &CollisionWitness, sys: &PositionalSystem, m: usize) -> Result<Vec<BigUint>> {
    w.padded_words()
        .iter()
        .map(|u| {
            let mut x = u.clone();
            x.resize(u.len() + m, 0);
            sys.val(&x)
        })
        .collect()
}

pub fn build_certificate(w: &CollisionWitness, sys: &PositionalSystem, m: usize) -> Result<CorrelationCertificate> {
    Ok(CorrelationCertificate {
        order: 2 * w.k,
        m,
        block: sys.value(m),
        words: w.padded_words().iter().map(|u| digits_to_string(u)).collect(),
        positions: padded_positions(w, sys, m)?,
        verified: false,
    })
}

/// Largest `M` with `p_{2k}(M) + U(M) ≤ bound`.
pub fn largest_m(w: &CollisionWitness, sys: &PositionalSystem, bound: usize) -> Result<Option<usize>> {
    let bound = BigUint::from(bound);
    let mut best = None;
    for m in 0.. {
        let last = padded_positions(w, sys, m)?.pop().expect("non-empty");
        if last + sys.value(m) > bound {
            break;
        }
        best = Some(m);
    }
    Ok(best)
}

/// Checks `s(p_i + n) = s(p_1 + n)` for `n < U(M)` and all `i`, then
/// `V(s, U(M), D) = U(M)`.
pub fn verify_certificate(s: &SequencePrefix, c: &CorrelationCertificate) -> Result<CorrelationCertificate> {
    let need = c.implied_n();
    if need > BigUint::from(s.len()) {
        return Err(Error::IndexOutOfPrefix {
            index: need.to_usize().unwrap_or(usize::MAX),
            len: s.len(),
        });
    }
    let d = c.shift_vector()?;
    let block = c.block.to_usize().expect("fits the prefix");
    let sym = s.symbols();
    let base = d.as_slice()[0];
    let bad = (0..block)
        .into_par_iter()
        .find_first(|&n| d.as_slice()[1..].iter().any(|&p| sym[p + n] != sym[base + n]));
    if let Some(index) = bad {
        return Err(Error::VerificationFailed { index });
    }
    let v = correlation_sum(s, block, &d)?;
    if v != block as i64 {
        return Err(Error::VerificationFailed { index: block });
    }
    Ok(CorrelationCertificate {
        verified: true,
        ..c.clone()
    })
}

/// `U(M)` for the largest `M` whose certificate fits in `n`, or `0`.
pub fn certified_bound_at(w: &CollisionWitness, sys: &PositionalSystem, n: usize) -> Result<BigUint> {
    Ok(largest_m(w, sys, n)?.map_or_else(BigUint::zero, |m| sys.value(m)))
}

fn digits_to_string(w: &[Digit]) -> String {
    crate::automata::format_word(
        &crate::automata::digit_alphabet(w.iter().copied().max().unwrap_or(0) as Letter),
        w,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalRow {
    pub n: usize,
    pub value: u64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalConstant {
    pub order: usize,
    pub rows: Vec<EmpiricalRow>,
    pub min_ratio: f64,
    /// `1/(b(m+1))` and the first `N = b(m+1)` it applies to.
    pub reference: Option<(f64, usize)>,
    /// Whether every row with `N ≥ b(m+1)` meets `C_2 ≥ N/(b(m+1))`.
    pub reference_holds: Option<bool>,
}

/// `C_{2k}(s, N)/N` over `N` in `range`. `integer_base` is `(b, m)` with
/// `m` the number of DFAO states, used for the integer-base reference line.
pub fn empirical_constant(
    s: &SequencePrefix,
    k: usize,
    range: std::ops::RangeInclusive<usize>,
    opts: &CorrelationOptions,
    integer_base: Option<(usize, usize)>,
) -> Result<EmpiricalConstant> {
    let order = 2 * k;
    let profile = correlation_profile(s, *range.end(), order, opts)?;
    let rows: Vec<EmpiricalRow> = profile
        .into_iter()
        .filter(|r| range.contains(&r.n))
        .map(|r| EmpiricalRow {
            n: r.n,
            value: r.value,
            ratio: r.value as f64 / r.n as f64,
        })
        .collect();
    let min_ratio = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let reference = integer_base.map(|(b, m)| (1.0 / (b * (m + 1)) as f64, b * (m + 1)));
    let reference_holds = reference.filter(|_| k == 1).map(|(_, from)| {
        rows.iter()
            .filter(|r| r.n >= from)
            .all(|r| r.value as usize * from >= r.n)
    });
    Ok(EmpiricalConstant {
        order,
        rows,
        min_ratio,
        reference,
        reference_holds,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinrecWitness {
    pub d: usize,
    pub shifts: ShiftVector,
    pub value: i64,
}

/// Smallest `d > 0` such that the length-`n` prefix recurs at `0, d, …,
/// (2k−1)d`.
pub fn linrec_witness(s: &SequencePrefix, n: usize, k: usize) -> Result<LinrecWitness> {
    if n == 0 || k == 0 {
        return Err(Error::OutOfRange("n and k must be positive".into()));
    }
    let steps = 2 * k - 1;
    let sym = s.symbols();
    let max_gap = s.len().saturating_sub(n) / steps;
    let head = &sym[..n.min(sym.len())];
    let d = (1..=max_gap)
        .find(|&d| (1..=steps).all(|j| &sym[j * d..j * d + n] == head))
        .ok_or(Error::NoRecurrenceFound { len: n, max_gap })?;
    let shifts = ShiftVector::new((0..=steps).map(|j| j * d).collect())?;
    let value = correlation_sum(s, n, &shifts)?;
    Ok(LinrecWitness { d, shifts, value })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceRow {
    pub n: usize,
    pub max_gap: usize,
    pub ratio: f64,
}

/// Largest distance between consecutive occurrences of any length-`n`
/// factor, for `n` in `1..=n_max`.
pub fn recurrence_constant_estimate(s: &SequencePrefix, n_max: usize) -> Vec<RecurrenceRow> {
    let sym = s.symbols();
    (1..=n_max.min(sym.len()))
        .into_par_iter()
        .map(|n| {
            let mut last: HashMap<&[u8], usize> = HashMap::new();
            let mut max_gap = 0;
            for (i, w) in sym.windows(n).enumerate() {
                if let Some(prev) = last.insert(w, i) {
                    max_gap = max_gap.max(i - prev);
                }
            }
            RecurrenceRow {
                n,
                max_gap,
                ratio: max_gap as f64 / n as f64,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{build_a_beta, build_l_beta_dfa, digit_alphabet, product, Dfa, Dfao};
    use crate::beta::{quasi_greedy_from_greedy, BetaSpec, LinearRecurrence};
    use crate::measures::correlation;
    use crate::morphic::automatic_prefix;

    fn w(s: &str) -> Vec<Digit> {
        s.bytes().map(|b| (b - b'0') as Digit).collect()
    }

    fn ex41() -> (ProductAutomaton, Dfao, PositionalSystem) {
        let dfa = Dfa::new(
            digit_alphabet(3),
            vec!["a0'".into(), "a0".into(), "a1".into()],
            0,
            vec![true; 3],
            &[
                (0, 1, 1),
                (0, 2, 1),
                (0, 3, 2),
                (1, 0, 1),
                (1, 1, 1),
                (1, 2, 1),
                (1, 3, 2),
                (2, 0, 2),
            ],
        )
        .unwrap();
        let dfao = Dfao::new(
            digit_alphabet(3),
            vec!["a".into(), "b".into()],
            0,
            vec![0, 1],
            &[
                (0, 0, 0),
                (0, 1, 0),
                (0, 2, 0),
                (0, 3, 1),
                (1, 0, 1),
                (1, 1, 1),
                (1, 2, 1),
                (1, 3, 1),
            ],
        )
        .unwrap();
        let rec = LinearRecurrence::new(vec![4, -3], vec![1u32.into(), 4u32.into()]).unwrap();
        (product(&dfa, &dfao).unwrap(), dfao, PositionalSystem::new(rec).unwrap())
    }

    fn binary_parity(spec: &BetaSpec) -> (ProductAutomaton, Dfao, PositionalSystem) {
        let l = build_l_beta_dfa(&build_a_beta(spec));
        let dfao = Dfao::new(
            digit_alphabet(1),
            vec!["0".into(), "1".into()],
            0,
            vec![0, 1],
            &[(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)],
        )
        .unwrap();
        (
            product(&l, &dfao).unwrap(),
            dfao,
            PositionalSystem::from_beta(spec).unwrap(),
        )
    }

    fn tm() -> (ProductAutomaton, Dfao, PositionalSystem) {
        binary_parity(&BetaSpec::integer_base(2).unwrap())
    }

    fn fib() -> (ProductAutomaton, Dfao, PositionalSystem) {
        binary_parity(&quasi_greedy_from_greedy(&[1, 1]).unwrap())
    }

    #[test]
    fn base2_with_one_state() {
        let spec = BetaSpec::integer_base(2).unwrap();
        let l = build_l_beta_dfa(&build_a_beta(&spec));
        let one = Dfao::new(digit_alphabet(1), vec!["z".into()], 0, vec![0], &[(0, 0, 0), (0, 1, 0)]).unwrap();
        let p = product(&l, &one).unwrap();
        let sys = PositionalSystem::from_beta(&spec).unwrap();
        let c = find_collisions(&p, &sys, 1).unwrap();
        assert_eq!(c.words, vec![w("1"), w("10")]);
        assert_eq!(c.zeros, 0);
    }

    #[test]
    fn ex41_collisions() {
        let (p, dfao, sys) = ex41();
        let c = find_collisions(&p, &sys, 1).unwrap();
        assert_eq!(c.words, vec![w("1"), w("2")]);
        assert_eq!(p.dfa().state_names()[c.state], "(a0,a)");
        let chosen = witness_from_words(&p, &sys, vec![w("10"), w("100")]).unwrap();
        assert_eq!(chosen.state, c.state);
        let cert = build_certificate(&chosen, &sys, 2).unwrap();
        assert_eq!(cert.positions, vec![BigUint::from(40u32), BigUint::from(121u32)]);
        let s = automatic_prefix(&dfao, &sys, 2000).unwrap();
        let v = verify_certificate(&s, &build_certificate(&chosen, &sys, 3).unwrap()).unwrap();
        assert!(v.verified);
        assert_eq!(v.block, BigUint::from(40u32));
        assert!(witness_from_words(&p, &sys, vec![w("10"), w("3")]).is_err());
        assert!(witness_from_words(&p, &sys, vec![w("100"), w("10")]).is_err());
        assert!(witness_from_words(&p, &sys, vec![w("30"), w("31")]).is_err());
    }

    #[test]
    fn certificate_positions() {
        let (p, _, sys) = fib();
        let c = find_collisions(&p, &sys, 1).unwrap();
        let m0 = build_certificate(&c, &sys, 0).unwrap();
        for (u, pos) in c.padded_words().iter().zip(&m0.positions) {
            assert_eq!(&sys.val(u).unwrap(), pos);
        }
        let one = CollisionWitness {
            k: 1,
            words: vec![w("1"), w("10")],
            state: 0,
            zeros: 0,
            scanned: 0,
            counted: 0,
            bound: 0,
        };
        assert_eq!(
            build_certificate(&one, &sys, 3).unwrap().positions[0],
            BigUint::from(5u32)
        );
    }

    #[test]
    fn fibonacci_order_four() {
        let (p, dfao, sys) = fib();
        let c = find_collisions(&p, &sys, 2).unwrap();
        assert_eq!(c.words.len(), 4);
        let (q, r) = p.component_sizes();
        assert!(c.counted <= 3 * q * r + 1);
        let s = automatic_prefix(&dfao, &sys, 1 << 14).unwrap();
        let m = largest_m(&c, &sys, s.len()).unwrap().unwrap();
        let cert = verify_certificate(&s, &build_certificate(&c, &sys, m).unwrap()).unwrap();
        assert!(cert.verified);
        let m6 = build_certificate(&find_collisions(&p, &sys, 1).unwrap(), &sys, 6).unwrap();
        assert!(verify_certificate(&s, &m6).unwrap().verified);
    }

    #[test]
    fn thue_morse_certificate_and_fault() {
        let (p, dfao, sys) = tm();
        let c = find_collisions(&p, &sys, 1).unwrap();
        let s = automatic_prefix(&dfao, &sys, 1 << 12).unwrap();
        let cert = build_certificate(&c, &sys, 5).unwrap();
        assert_eq!(cert.block, BigUint::from(32u32));
        assert!(verify_certificate(&s, &cert).unwrap().verified);
        let mut broken = cert.clone();
        broken.positions[1] += 1u32;
        assert!(matches!(
            verify_certificate(&s, &broken).unwrap_err(),
            Error::VerificationFailed { .. }
        ));
        let mut short = cert;
        short.m = 40;
        short.block = sys.value(40);
        assert!(matches!(
            verify_certificate(&s, &short).unwrap_err(),
            Error::IndexOutOfPrefix { .. }
        ));
    }

    #[test]
    fn certificates_bound_exact_correlation() {
        for (p, dfao, sys) in [tm(), fib(), ex41()] {
            let s = automatic_prefix(&dfao, &sys, 120).unwrap();
            let c = find_collisions(&p, &sys, 1).unwrap();
            let profile = correlation_profile(&s, 120, 2, &CorrelationOptions::default()).unwrap();
            for r in profile {
                assert!(BigUint::from(r.value) >= certified_bound_at(&c, &sys, r.n).unwrap());
            }
        }
    }

    #[test]
    fn growth_of_certified_bound() {
        let (_, _, sys) = fib();
        let ratios: Vec<f64> = (10..=20)
            .map(|m| crate::beta::big_ratio(&sys.value(m + 1), &sys.value(m)))
            .collect();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((ratios.last().unwrap() - golden).abs() < 1e-2);
    }

    #[test]
    fn thue_morse_empirical_constant() {
        let (_, dfao, sys) = tm();
        let s = automatic_prefix(&dfao, &sys, 64).unwrap();
        let e = empirical_constant(&s, 1, 6..=64, &CorrelationOptions::default(), Some((2, 2))).unwrap();
        assert!(e.rows.iter().all(|r| 6 * r.value as usize >= r.n));
        assert_eq!(e.reference_holds, Some(true));
        let e = empirical_constant(&s, 1, 5..=64, &CorrelationOptions::default(), None).unwrap();
        assert!(e.min_ratio >= 1.0 / 12.0);
    }

    #[test]
    fn period_two_even_and_odd() {
        let s = SequencePrefix::binary((0..64).map(|i| (i % 2) as u8).collect(), "01").unwrap();
        let e = empirical_constant(&s, 1, 4..=64, &CorrelationOptions::default(), None).unwrap();
        assert!(e.rows.iter().all(|r| r.value as usize == r.n - 1));
        let l = linrec_witness(&s, 6, 1).unwrap();
        assert_eq!((l.d, l.value), (2, 6));
        for n in 3..=30 {
            assert_eq!(correlation(&s, n, 3, &CorrelationOptions::default()).unwrap().value, 1);
        }
    }

    #[test]
    fn linrec_on_thue_morse_and_cantor() {
        let (_, dfao, sys) = tm();
        let s = automatic_prefix(&dfao, &sys, 1 << 12).unwrap();
        let l = linrec_witness(&s, 8, 1).unwrap();
        assert_eq!(l.value, 8);
        assert!(l.d <= 10 * 8);
        let cantor = SequencePrefix::binary(
            (0..3usize.pow(7))
                .map(|mut i| {
                    let mut one = false;
                    while i > 0 {
                        one |= i % 3 == 1;
                        i /= 3;
                    }
                    u8::from(one)
                })
                .collect(),
            "cantor",
        )
        .unwrap();
        assert!(matches!(
            linrec_witness(&cantor, 1, 2).unwrap_err(),
            Error::NoRecurrenceFound { .. }
        ));
        let rows = recurrence_constant_estimate(&cantor, 8);
        assert!(rows[0].ratio > 32.0);
    }

    #[test]
    fn recurrence_rows() {
        let s = SequencePrefix::binary((0..200).map(|i| (i % 2) as u8).collect(), "01").unwrap();
        assert!(recurrence_constant_estimate(&s, 10).iter().all(|r| r.max_gap == 2));
    }
}
