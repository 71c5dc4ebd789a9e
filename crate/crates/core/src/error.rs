use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("expansion has an empty period")]
    EmptyPeriod,
    #[error("expansion starts with a zero digit")]
    LeadingZero,
    #[error("expansion is not admissible: the shift at position {position} exceeds the word")]
    NotAdmissible { position: usize },
    #[error("finite expansion must end with a nonzero digit")]
    LastDigitZero,
    #[error("recurrence is not a valid numeration sequence: {0}")]
    InvalidRecurrence(String),
    #[error("consecutive ratio estimates differ by {delta:e}, above tolerance {tolerance:e}")]
    NonConvergent { delta: f64, tolerance: f64 },
    #[error("value {0} is outside the admissible range")]
    OutOfRange(String),
    #[error("digit {digit} is outside the alphabet 0..={max}")]
    DigitOutOfRange { digit: u32, max: u32 },
    #[error("letter {letter} is outside an alphabet of size {size}")]
    LetterOutOfAlphabet { letter: u32, size: usize },
    #[error("language has only {available} words, index {requested} requested")]
    FiniteLanguage { requested: String, available: String },
    #[error("word is not in the language")]
    NotInLanguage,
    #[error("automata have different alphabets ({left} vs {right} letters)")]
    AlphabetMismatch { left: usize, right: usize },
    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("morphism is not prolongable on the seed letter")]
    NotProlongable,
    #[error("the coded fixed point is finite ({len} letters)")]
    FiniteImage { len: usize },
    #[error("output is not binary (state {state} outputs {output})")]
    NonBinaryOutput { state: usize, output: u8 },
    #[error("sequence is not binary (symbol {symbol} at index {index})")]
    NonBinarySequence { index: usize, symbol: u8 },
    #[error("requested {requested} symbols, capacity is {capacity}")]
    Capacity { requested: u128, capacity: u128 },
    #[error("index {index} is outside a prefix of length {len}")]
    IndexOutOfPrefix { index: usize, len: usize },
    #[error("shift vector must be strictly increasing and non-empty")]
    InvalidShiftVector,
    #[error("order {order} needs N >= {order}, got {n}")]
    OrderExceedsLength { order: usize, n: usize },
    #[error("exact evaluation needs about {needed} steps, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("no length-{len} factor occurs {needed} times in the scanned window")]
    NotEnoughOccurrences { len: usize, needed: usize },
    #[error("no aligned recurrence of the length-{len} prefix found within distance {max_gap}")]
    NoRecurrenceFound { len: usize, max_gap: usize },
    #[error("collision search exceeded the pigeonhole bound {bound}")]
    PigeonholeExceeded { bound: usize },
    #[error("certificate verification failed at offset {index}")]
    VerificationFailed { index: usize },
    #[error("construction mismatch at index {index}: {detail}")]
    Mismatch { index: usize, detail: String },
    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
