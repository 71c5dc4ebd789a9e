//! Parry numbers given combinatorially by the quasi-greedy expansion of 1,
//! and the canonical linear recurrence they induce.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Digit;

/// Eventually periodic digit word `preperiod · period^ω`, read as the
/// quasi-greedy expansion of 1 in base β.
///
/// Construction normalizes to the minimal `(m, k)` presentation. A word whose
/// period is `0` is a terminating expansion and is converted to its
/// quasi-greedy form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BetaSpec {
    preperiod: Vec<Digit>,
    period: Vec<Digit>,
}

impl BetaSpec {
    pub fn new(preperiod: Vec<Digit>, period: Vec<Digit>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        let (preperiod, period) = normalize(preperiod, period);
        if period == [0] {
            let mut finite = preperiod;
            while finite.last() == Some(&0) {
                finite.pop();
            }
            if finite.is_empty() {
                return Err(Error::LeadingZero);
            }
            return quasi_greedy_from_greedy(&finite);
        }
        let spec = BetaSpec { preperiod, period };
        validate_parry_expansion(&spec)?;
        Ok(spec)
    }

    /// Builds a `BetaSpec` from a terminating greedy expansion `d_β(1)`.
    pub fn from_greedy(greedy: &[Digit]) -> Result<Self> {
        quasi_greedy_from_greedy(greedy)
    }

    /// Integer base `b ≥ 2`, i.e. `(b−1)^ω`.
    pub fn integer_base(base: Digit) -> Result<Self> {
        if base < 2 {
            return Err(Error::OutOfRange(format!("integer base {base}")));
        }
        BetaSpec::new(Vec::new(), vec![base - 1])
    }

    pub fn preperiod(&self) -> &[Digit] {
        &self.preperiod
    }

    pub fn period(&self) -> &[Digit] {
        &self.period
    }

    /// `(m, k)`.
    pub fn lengths(&self) -> (usize, usize) {
        (self.preperiod.len(), self.period.len())
    }

    /// Digit `t(i)` for `i ≥ 1`.
    pub fn digit(&self, i: usize) -> Digit {
        assert!(i >= 1, "digits are indexed from 1");
        let m = self.preperiod.len();
        if i <= m {
            self.preperiod[i - 1]
        } else {
            self.period[(i - m - 1) % self.period.len()]
        }
    }

    /// Largest digit of the numeration alphabet, `⌈β⌉ − 1 = t(1)`.
    pub fn max_digit(&self) -> Digit {
        self.digit(1)
    }

    /// The greedy expansion `d_β(1)`: finite when the quasi-greedy word is
    /// purely periodic (simple Parry number), otherwise the word itself.
    pub fn greedy_expansion(&self) -> GreedyExpansion {
        if self.preperiod.is_empty() {
            let mut finite = self.period.clone();
            *finite.last_mut().expect("period is non-empty") += 1;
            GreedyExpansion::Finite(finite)
        } else {
            GreedyExpansion::Infinite {
                preperiod: self.preperiod.clone(),
                period: self.period.clone(),
            }
        }
    }
}

impl std::fmt::Display for BetaSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for d in &self.preperiod {
            write!(f, "{}", digit_str(*d))?;
        }
        f.write_str("(")?;
        for d in &self.period {
            write!(f, "{}", digit_str(*d))?;
        }
        f.write_str(")^ω")
    }
}

fn digit_str(d: Digit) -> String {
    if d < 10 {
        d.to_string()
    } else {
        format!("[{d}]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GreedyExpansion {
    Finite(Vec<Digit>),
    Infinite { preperiod: Vec<Digit>, period: Vec<Digit> },
}

fn normalize(mut preperiod: Vec<Digit>, period: Vec<Digit>) -> (Vec<Digit>, Vec<Digit>) {
    let k = period.len();
    let p = (1..=k)
        .find(|&p| k.is_multiple_of(p) && (p..k).all(|i| period[i] == period[i - p]))
        .unwrap_or(k);
    let mut period: Vec<Digit> = period[..p].to_vec();
    while let (Some(&a), Some(&b)) = (preperiod.last(), period.last()) {
        if a != b {
            break;
        }
        preperiod.pop();
        period.rotate_right(1);
    }
    (preperiod, period)
}

/// Checks that every shift of `preperiod · period^ω` is lexicographically at
/// most the word itself, and that the word starts with a nonzero digit.
pub fn validate_parry_expansion(spec: &BetaSpec) -> Result<()> {
    if spec.period.is_empty() {
        return Err(Error::EmptyPeriod);
    }
    let (m, k) = spec.lengths();
    let horizon = 2 * (m + k) + 1;
    for shift in 1..(m + k) {
        for i in 1..=horizon {
            let a = spec.digit(shift + i);
            let b = spec.digit(i);
            if a > b {
                return Err(Error::NotAdmissible { position: shift });
            }
            if a < b {
                break;
            }
        }
    }
    if spec.digit(1) == 0 {
        return Err(Error::LeadingZero);
    }
    Ok(())
}

/// `t(1)…t(m)` ↦ `(t(1)…t(m−1)(t(m)−1))^ω`, normalized.
pub fn quasi_greedy_from_greedy(greedy: &[Digit]) -> Result<BetaSpec> {
    match greedy.last() {
        None => Err(Error::EmptyPeriod),
        Some(0) => Err(Error::LastDigitZero),
        Some(_) => {
            let mut period = greedy.to_vec();
            *period.last_mut().unwrap() -= 1;
            BetaSpec::new(Vec::new(), period)
        }
    }
}

/// Homogeneous linear recurrence `U(n) = Σ c_j U(n−j)` with unbounded values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearRecurrence {
    coefficients: Vec<i64>,
    initial: Vec<BigUint>,
}

impl LinearRecurrence {
    /// `coefficients[j]` multiplies `U(n−1−j)`; one initial value per order.
    pub fn new(coefficients: Vec<i64>, initial: Vec<BigUint>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidRecurrence("order must be positive".into()));
        }
        if coefficients.len() != initial.len() {
            return Err(Error::InvalidRecurrence(format!(
                "order {} but {} initial values",
                coefficients.len(),
                initial.len()
            )));
        }
        if !initial[0].is_one() {
            return Err(Error::InvalidRecurrence("U(0) must be 1".into()));
        }
        let rec = LinearRecurrence { coefficients, initial };
        let probe = rec.try_values(64)?;
        if probe.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidRecurrence("sequence is not strictly increasing".into()));
        }
        Ok(rec)
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn initial_values(&self) -> &[BigUint] {
        &self.initial
    }

    fn try_values(&self, count: usize) -> Result<Vec<BigUint>> {
        let mut out: Vec<BigUint> = self.initial.iter().take(count).cloned().collect();
        let mut signed: Vec<BigInt> = out.iter().map(|v| BigInt::from(v.clone())).collect();
        while out.len() < count {
            let n = signed.len();
            let next: BigInt = self
                .coefficients
                .iter()
                .enumerate()
                .map(|(j, &c)| BigInt::from(c) * &signed[n - 1 - j])
                .sum();
            if next.sign() != Sign::Plus {
                return Err(Error::InvalidRecurrence(format!("U({n}) is not positive")));
            }
            out.push(next.to_biguint().expect("positive"));
            signed.push(next);
        }
        Ok(out)
    }

    /// `U(0), …, U(count−1)`.
    pub fn values(&self, count: usize) -> Vec<BigUint> {
        self.try_values(count).expect("recurrence validated at construction")
    }

    /// Extends `table` (a prefix of the sequence) to at least `len` entries.
    pub(crate) fn extend(&self, table: &mut Vec<BigUint>, len: usize) {
        while table.len() < len {
            let n = table.len();
            if n < self.initial.len() {
                table.push(self.initial[n].clone());
                continue;
            }
            let mut pos = BigUint::zero();
            let mut neg = BigUint::zero();
            for (j, &c) in self.coefficients.iter().enumerate() {
                let term = &table[n - 1 - j] * BigUint::from(c.unsigned_abs());
                if c >= 0 {
                    pos += term;
                } else {
                    neg += term;
                }
            }
            table.push(pos - neg);
        }
    }
}

impl std::fmt::Display for LinearRecurrence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let terms: Vec<String> = self
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(j, &c)| format!("{c}*U(n-{})", j + 1))
            .collect();
        let initial: Vec<String> = self.initial.iter().map(|v| v.to_string()).collect();
        write!(f, "U(n) = {}; initial {}", terms.join(" + "), initial.join(" "))
    }
}

/// The canonical recurrence of `U_β`: initial values
/// `U(i) = t(1)U(i−1) + … + t(i)U(0) + 1` for `i < m+k`, then an order
/// `m+k` recurrence with coefficients `t(j)`, plus one at lag `k`, minus
/// `t(j)` at lag `k+j`.
pub fn build_recurrence(spec: &BetaSpec) -> Result<LinearRecurrence> {
    validate_parry_expansion(spec)?;
    let (m, k) = spec.lengths();
    let order = m + k;
    let t = |i: usize| spec.digit(i) as i64;

    let mut initial = vec![BigUint::one()];
    for i in 1..order {
        let mut v = BigUint::one();
        for j in 1..=i {
            v += &initial[i - j] * BigUint::from(t(j) as u64);
        }
        initial.push(v);
    }

    let mut coefficients: Vec<i64> = (1..=order).map(t).collect();
    coefficients[k - 1] += 1;
    for j in 1..=m {
        coefficients[k + j - 1] -= t(j);
    }
    LinearRecurrence::new(coefficients, initial)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominantRoot {
    pub beta: f64,
    pub c: f64,
    pub index: usize,
}

pub const DEFAULT_ROOT_TOLERANCE: f64 = 1e-6;

/// Ratio `U(n)/U(n−1)` at the last computed index and the constant
/// `U(n)/β^n`. Diagnostic only.
pub fn dominant_root(rec: &LinearRecurrence, n_terms: usize, tolerance: f64) -> Result<DominantRoot> {
    let n_terms = n_terms.max(2 * rec.order()).max(3);
    let values = rec.values(n_terms);
    let n = n_terms - 1;
    let beta = big_ratio(&values[n], &values[n - 1]);
    let previous = big_ratio(&values[n - 1], &values[n - 2]);
    let delta = (beta - previous).abs();
    if delta > tolerance {
        return Err(Error::NonConvergent { delta, tolerance });
    }
    let c = (big_ln(&values[n]) - n as f64 * beta.ln()).exp();
    Ok(DominantRoot { beta, c, index: n })
}

pub(crate) fn big_ratio(a: &BigUint, b: &BigUint) -> f64 {
    let shift = a.bits().max(b.bits()).saturating_sub(64);
    let a = (a >> shift).to_f64().unwrap_or(f64::INFINITY);
    let b = (b >> shift).to_f64().unwrap_or(f64::INFINITY);
    a / b
}

fn big_ln(a: &BigUint) -> f64 {
    let shift = a.bits().saturating_sub(64);
    (a >> shift).to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Snap tolerance applied before taking the floor of `β·x`.
const GREEDY_SNAP: f64 = 1e-12;

/// First `len` digits of the greedy β-expansion of `x ∈ [0, 1)`, in floating
/// point. Digits may be off by one next to a digit boundary.
pub fn float_greedy_expansion(beta: f64, x: f64, len: usize) -> Result<Vec<Digit>> {
    if !(beta.is_finite() && beta > 1.0) {
        return Err(Error::OutOfRange(format!("beta = {beta}")));
    }
    if !(x.is_finite() && (0.0..1.0).contains(&x)) {
        return Err(Error::OutOfRange(format!("x = {x}")));
    }
    if len == 0 {
        return Err(Error::OutOfRange("len = 0".into()));
    }
    let max_digit = (beta.ceil() - 1.0) as Digit;
    let mut x = x;
    let mut digits = Vec::with_capacity(len);
    for _ in 0..len {
        let y = beta * x;
        let d = ((y + GREEDY_SNAP).floor() as Digit).min(max_digit);
        digits.push(d);
        x = (y - d as f64).max(0.0);
    }
    Ok(digits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    // Direct evaluation for a terminating expansion t(1)…t(m):
    // U(i) = Σ_{j≤i} t(j)U(i−j) + 1 for i < m, U(n) = Σ_{j≤m} t(j)U(n−j).
    fn terminating_oracle(t: &[u64], count: usize) -> Vec<BigUint> {
        let m = t.len();
        let mut u: Vec<BigUint> = Vec::new();
        for n in 0..count {
            let mut v = BigUint::zero();
            for j in 1..=m.min(n) {
                v += &u[n - j] * t[j - 1];
            }
            if n < m {
                v += 1u32;
            }
            u.push(v);
        }
        u
    }

    #[test]
    fn golden_ratio_and_square_are_admissible() {
        let phi = BetaSpec::new(vec![], vec![1, 0]).unwrap();
        assert_eq!(phi.lengths(), (0, 2));
        let phi2 = BetaSpec::new(vec![2], vec![1]).unwrap();
        assert_eq!(phi2.lengths(), (1, 1));
    }

    #[test]
    fn shift_dominating_word_is_rejected() {
        let err = BetaSpec::new(vec![], vec![0, 1]).unwrap_err();
        assert!(matches!(err, Error::NotAdmissible { .. }));
        assert_eq!(BetaSpec::new(vec![1], vec![]).unwrap_err(), Error::EmptyPeriod);
        assert_eq!(BetaSpec::new(vec![], vec![0]).unwrap_err(), Error::LeadingZero);
        // 1(2)^ω: the shift 2^ω beats the word.
        assert!(matches!(
            BetaSpec::new(vec![1], vec![2]).unwrap_err(),
            Error::NotAdmissible { position: 1 }
        ));
    }

    #[test]
    fn normalization_finds_minimal_presentation() {
        let s = BetaSpec::new(vec![2, 1], vec![1, 1, 1, 1]).unwrap();
        assert_eq!(s.preperiod(), &[2]);
        assert_eq!(s.period(), &[1]);
        let s = BetaSpec::new(vec![], vec![1, 0, 1, 0]).unwrap();
        assert_eq!(s.period(), &[1, 0]);
        // Terminating words 11·0^ω are turned into (10)^ω.
        let s = BetaSpec::new(vec![1, 1], vec![0]).unwrap();
        assert_eq!((s.preperiod(), s.period()), (&[][..], &[1, 0][..]));
    }

    #[test]
    fn quasi_greedy_examples() {
        let s = quasi_greedy_from_greedy(&[1, 1]).unwrap();
        assert_eq!(s.period(), &[1, 0]);
        let s = quasi_greedy_from_greedy(&[2]).unwrap();
        assert_eq!(s.period(), &[1]);
        let s = quasi_greedy_from_greedy(&[2, 1, 1]).unwrap();
        assert_eq!(s.period(), &[2, 1, 0]);
        assert_eq!(quasi_greedy_from_greedy(&[1, 0]).unwrap_err(), Error::LastDigitZero);
        assert_eq!(s.greedy_expansion(), GreedyExpansion::Finite(vec![2, 1, 1]));
    }

    #[test]
    fn recurrence_examples() {
        let phi = quasi_greedy_from_greedy(&[1, 1]).unwrap();
        let rec = build_recurrence(&phi).unwrap();
        assert_eq!(rec.coefficients(), &[1, 1]);
        assert_eq!(rec.initial_values(), big(&[1, 2]).as_slice());
        assert_eq!(rec.values(6), big(&[1, 2, 3, 5, 8, 13]));

        let phi2 = BetaSpec::new(vec![2], vec![1]).unwrap();
        let rec = build_recurrence(&phi2).unwrap();
        assert_eq!(rec.coefficients(), &[3, -1]);
        assert_eq!(rec.values(5), big(&[1, 3, 8, 21, 55]));

        let ten = BetaSpec::integer_base(10).unwrap();
        let rec = build_recurrence(&ten).unwrap();
        assert_eq!(rec.coefficients(), &[10]);
        let v = rec.values(31);
        for (n, x) in v.iter().enumerate() {
            assert_eq!(*x, BigUint::from(10u32).pow(n as u32));
        }
    }

    #[test]
    fn quasi_greedy_recurrence_matches_terminating_formula() {
        for t in [&[1u64, 1][..], &[2], &[2, 1, 1], &[3, 0, 1], &[1, 1, 1], &[5]] {
            let digits: Vec<Digit> = t.iter().map(|&d| d as Digit).collect();
            let spec = quasi_greedy_from_greedy(&digits).unwrap();
            let rec = build_recurrence(&spec).unwrap();
            assert_eq!(rec.values(40), terminating_oracle(t, 40), "d(1) = {t:?}");
        }
    }

    #[test]
    fn dominant_root_examples() {
        let fib = build_recurrence(&quasi_greedy_from_greedy(&[1, 1]).unwrap()).unwrap();
        let r = dominant_root(&fib, 60, DEFAULT_ROOT_TOLERANCE).unwrap();
        assert!((r.beta - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-8);

        let affine = LinearRecurrence::new(vec![4, -3], big(&[1, 4])).unwrap();
        let r = dominant_root(&affine, 80, DEFAULT_ROOT_TOLERANCE).unwrap();
        assert!((r.beta - 3.0).abs() < 1e-9);
        assert!((r.c - 1.5).abs() < 1e-6);

        let two = build_recurrence(&BetaSpec::integer_base(2).unwrap()).unwrap();
        let r = dominant_root(&two, 10, DEFAULT_ROOT_TOLERANCE).unwrap();
        assert_eq!(r.beta, 2.0);
        assert!((r.c - 1.0).abs() < 1e-12);

        assert!(matches!(
            dominant_root(&fib, 4, 1e-9).unwrap_err(),
            Error::NonConvergent { .. }
        ));
    }

    #[test]
    fn float_greedy_examples() {
        assert_eq!(float_greedy_expansion(2.0, 0.5, 4).unwrap(), vec![1, 0, 0, 0]);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert_eq!(float_greedy_expansion(phi, 1.0 / phi, 2).unwrap(), vec![1, 0]);
        assert_eq!(float_greedy_expansion(2.0, 0.0, 3).unwrap(), vec![0, 0, 0]);
        assert!(matches!(
            float_greedy_expansion(2.0, 1.0, 3).unwrap_err(),
            Error::OutOfRange(_)
        ));
    }

    #[test]
    fn invalid_recurrences_are_rejected() {
        assert!(LinearRecurrence::new(vec![], vec![]).is_err());
        assert!(LinearRecurrence::new(vec![1], big(&[2])).is_err());
        assert!(LinearRecurrence::new(vec![1], big(&[1])).is_err());
        assert!(LinearRecurrence::new(vec![1, -2], big(&[1, 2])).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn finite_greedy() -> impl Strategy<Value = BetaSpec> {
            proptest::collection::vec(0u32..4, 1..6).prop_filter_map("admissible", |mut t| {
                t[0] = t[0].max(1);
                let last = t.len() - 1;
                t[last] = t[last].max(1);
                quasi_greedy_from_greedy(&t).ok()
            })
        }

        fn eventually_periodic() -> impl Strategy<Value = BetaSpec> {
            (
                proptest::collection::vec(0u32..4, 0..4),
                proptest::collection::vec(0u32..4, 1..4),
            )
                .prop_filter_map("admissible", |(p, q)| BetaSpec::new(p, q).ok())
        }

        proptest! {
            #[test]
            fn quasi_greedy_output_validates(spec in finite_greedy()) {
                prop_assert!(validate_parry_expansion(&spec).is_ok());
            }

            #[test]
            fn recurrence_is_increasing_with_bounded_ratio(spec in prop_oneof![finite_greedy(), eventually_periodic()]) {
                let rec = build_recurrence(&spec).unwrap();
                let v = rec.values(201);
                let bound = BigUint::from(spec.max_digit() + 1);
                for w in v.windows(2) {
                    prop_assert!(w[1] > w[0]);
                    prop_assert!(w[1] <= &w[0] * &bound);
                }
            }
        }
    }
}
