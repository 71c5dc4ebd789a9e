//! Deterministic automata over ordered alphabets: the path automaton of a
//! Parry number, the automaton of its numeration language, automata with
//! output, and their reachable product.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::beta::BetaSpec;
use crate::error::{Error, Result};
use crate::numeration::PositionalSystem;
use crate::Letter;

/// Walks a word through a deterministic machine.
pub trait Automaton {
    fn alphabet_len(&self) -> usize;
    fn initial(&self) -> usize;
    fn step(&self, state: usize, letter: Letter) -> Option<usize>;

    /// State reached from `from`, or `None` when a transition is missing.
    fn run_from(&self, from: usize, word: &[Letter]) -> Result<Option<usize>> {
        let mut q = from;
        for &c in word {
            if c as usize >= self.alphabet_len() {
                return Err(Error::LetterOutOfAlphabet {
                    letter: c,
                    size: self.alphabet_len(),
                });
            }
            match self.step(q, c) {
                Some(next) => q = next,
                None => return Ok(None),
            }
        }
        Ok(Some(q))
    }

    fn run(&self, word: &[Letter]) -> Result<Option<usize>> {
        self.run_from(self.initial(), word)
    }
}

/// Deterministic automaton with a partial transition function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Vec<String>,
    state_names: Vec<String>,
    initial: usize,
    delta: Vec<Vec<Option<usize>>>,
    finals: Vec<bool>,
}

impl Dfa {
    pub fn new(
        alphabet: Vec<String>,
        state_names: Vec<String>,
        initial: usize,
        finals: Vec<bool>,
        transitions: &[(usize, Letter, usize)],
    ) -> Result<Self> {
        let n = state_names.len();
        if n == 0 {
            return Err(Error::InvalidAutomaton("no states".into()));
        }
        if initial >= n {
            return Err(Error::InvalidAutomaton(format!("initial state {initial} out of range")));
        }
        if finals.len() != n {
            return Err(Error::InvalidAutomaton("final flags do not match states".into()));
        }
        if alphabet.is_empty() {
            return Err(Error::InvalidAutomaton("empty alphabet".into()));
        }
        let mut delta = vec![vec![None; alphabet.len()]; n];
        for &(from, letter, to) in transitions {
            if from >= n || to >= n {
                return Err(Error::InvalidAutomaton(format!(
                    "transition ({from}, {letter}, {to}) references a missing state"
                )));
            }
            let slot = delta[from].get_mut(letter as usize).ok_or(Error::LetterOutOfAlphabet {
                letter,
                size: alphabet.len(),
            })?;
            match *slot {
                Some(existing) if existing != to => {
                    return Err(Error::InvalidAutomaton(format!(
                        "state {from} has two transitions on letter {letter}"
                    )))
                }
                _ => *slot = Some(to),
            }
        }
        Ok(Dfa {
            alphabet,
            state_names,
            initial,
            delta,
            finals,
        })
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn is_final(&self, state: usize) -> bool {
        self.finals[state]
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, Letter, usize)> + '_ {
        self.delta.iter().enumerate().flat_map(|(q, row)| {
            row.iter()
                .enumerate()
                .filter_map(move |(c, t)| t.map(|t| (q, c as Letter, t)))
        })
    }

    pub fn accepts(&self, word: &[Letter]) -> Result<bool> {
        Ok(self.run(word)?.is_some_and(|q| self.finals[q]))
    }

    /// `table[len][q]` = number of accepted words of length `len` read from `q`.
    pub fn count_table(&self, max_len: usize) -> Vec<Vec<BigUint>> {
        let mut table = Vec::with_capacity(max_len + 1);
        table.push(
            self.finals
                .iter()
                .map(|&f| if f { BigUint::one() } else { BigUint::zero() })
                .collect::<Vec<_>>(),
        );
        for len in 1..=max_len {
            let prev: &Vec<BigUint> = &table[len - 1];
            let row = self
                .delta
                .iter()
                .map(|targets| targets.iter().flatten().map(|&t| &prev[t]).sum())
                .collect();
            table.push(row);
        }
        table
    }

    pub fn count_from(&self, state: usize, len: usize) -> BigUint {
        self.count_table(len)[len][state].clone()
    }

    /// Number of accepted words of length `len`.
    pub fn count_accepted(&self, len: usize) -> BigUint {
        self.count_from(self.initial, len)
    }

    /// `count_accepted(n+1) / count_accepted(n)`.
    pub fn growth_ratio(&self, n: usize) -> f64 {
        let table = self.count_table(n + 1);
        crate::beta::big_ratio(&table[n + 1][self.initial], &table[n][self.initial])
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(q) = stack.pop() {
            for &t in self.delta[q].iter().flatten() {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    fn coreachable(&self) -> Vec<bool> {
        let mut useful = self.finals.clone();
        loop {
            let mut changed = false;
            for q in 0..self.num_states() {
                if !useful[q] && self.delta[q].iter().flatten().any(|&t| useful[t]) {
                    useful[q] = true;
                    changed = true;
                }
            }
            if !changed {
                return useful;
            }
        }
    }

    /// Whether infinitely many words are accepted: some cycle runs through
    /// states that are both reachable and co-reachable.
    pub fn has_infinite_language(&self) -> bool {
        let reach = self.reachable();
        let co = self.coreachable();
        let trim: Vec<bool> = reach.iter().zip(&co).map(|(a, b)| *a && *b).collect();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut mark = vec![0u8; self.num_states()];
        fn dfs(dfa: &Dfa, q: usize, trim: &[bool], mark: &mut [u8]) -> bool {
            mark[q] = 1;
            for &t in dfa.delta[q].iter().flatten() {
                if !trim[t] {
                    continue;
                }
                if mark[t] == 1 || (mark[t] == 0 && dfs(dfa, t, trim, mark)) {
                    return true;
                }
            }
            mark[q] = 2;
            false
        }
        (0..self.num_states()).any(|q| trim[q] && mark[q] == 0 && dfs(self, q, &trim, &mut mark))
    }

    /// Renders a word using the alphabet's letter names.
    pub fn format_word(&self, word: &[Letter]) -> String {
        format_word(&self.alphabet, word)
    }

    pub fn to_table(&self) -> String {
        write_table(
            &self.alphabet,
            &self.state_names,
            self.initial,
            Some(&self.finals),
            None,
            self.transitions(),
        )
    }

    /// Parses the transition-table text format. A missing `final` line makes
    /// every state final.
    pub fn from_table(text: &str) -> Result<Self> {
        let t = parse_table(text)?;
        if !t.outputs.is_empty() {
            return Err(Error::Parse("DFA tables have no output lines".into()));
        }
        Dfa::new(t.alphabet, t.states, t.initial, t.finals, &t.transitions)
    }
}

impl Automaton for Dfa {
    fn alphabet_len(&self) -> usize {
        self.alphabet.len()
    }
    fn initial(&self) -> usize {
        self.initial
    }
    fn step(&self, state: usize, letter: Letter) -> Option<usize> {
        self.delta[state].get(letter as usize).copied().flatten()
    }
}

/// Deterministic automaton with output: every state is final and carries an
/// output letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfao {
    dfa: Dfa,
    outputs: Vec<u8>,
}

impl Dfao {
    pub fn new(
        alphabet: Vec<String>,
        state_names: Vec<String>,
        initial: usize,
        outputs: Vec<u8>,
        transitions: &[(usize, Letter, usize)],
    ) -> Result<Self> {
        if outputs.len() != state_names.len() {
            return Err(Error::InvalidAutomaton("one output per state is required".into()));
        }
        let finals = vec![true; state_names.len()];
        let dfa = Dfa::new(alphabet, state_names, initial, finals, transitions)?;
        Ok(Dfao { dfa, outputs })
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn output(&self, state: usize) -> u8 {
        self.outputs[state]
    }

    pub fn outputs(&self) -> &[u8] {
        &self.outputs
    }

    pub fn is_total(&self) -> bool {
        self.dfa.delta.iter().all(|row| row.iter().all(Option::is_some))
    }

    /// Reached state and its output.
    pub fn evaluate(&self, word: &[Letter]) -> Result<Option<(usize, u8)>> {
        Ok(self.run(word)?.map(|q| (q, self.outputs[q])))
    }

    pub fn to_table(&self) -> String {
        write_table(
            &self.dfa.alphabet,
            &self.dfa.state_names,
            self.dfa.initial,
            None,
            Some(&self.outputs),
            self.dfa.transitions(),
        )
    }

    pub fn from_table(text: &str) -> Result<Self> {
        let t = parse_table(text)?;
        if t.outputs.len() != t.states.len() {
            return Err(Error::Parse("every state needs an `output` line".into()));
        }
        let outputs = t.outputs.iter().map(|o| o.expect("checked")).collect();
        Dfao::new(t.alphabet, t.states, t.initial, outputs, &t.transitions)
    }
}

impl Automaton for Dfao {
    fn alphabet_len(&self) -> usize {
        self.dfa.alphabet_len()
    }
    fn initial(&self) -> usize {
        self.dfa.initial
    }
    fn step(&self, state: usize, letter: Letter) -> Option<usize> {
        self.dfa.step(state, letter)
    }
}

/// Reachable part of `A × B` for a DFA `A` and a DFAO `B`, with states
/// ordered lexicographically by `(A-state, B-state)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductAutomaton {
    dfa: Dfa,
    pairs: Vec<(usize, usize)>,
    outputs: Vec<u8>,
    component_sizes: (usize, usize),
}

impl ProductAutomaton {
    /// Product as a plain DFA with final set `F × R`.
    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn output(&self, state: usize) -> u8 {
        self.outputs[state]
    }

    pub fn num_states(&self) -> usize {
        self.pairs.len()
    }

    /// `(|Q|, |R|)` of the full components.
    pub fn component_sizes(&self) -> (usize, usize) {
        self.component_sizes
    }

    pub fn index_of(&self, pair: (usize, usize)) -> Option<usize> {
        self.pairs.binary_search(&pair).ok()
    }
}

impl Automaton for ProductAutomaton {
    fn alphabet_len(&self) -> usize {
        self.dfa.alphabet_len()
    }
    fn initial(&self) -> usize {
        self.dfa.initial
    }
    fn step(&self, state: usize, letter: Letter) -> Option<usize> {
        self.dfa.step(state, letter)
    }
}

/// The automaton whose path labels are the admissible digit words: states
/// `a_0 … a_{L−1}` (`L = m + k`), all final, with
/// `δ(a_{i−1}, t) = a_0` for `t < t(i)` and `1 ≤ i ≤ L`,
/// `δ(a_{i−1}, t(i)) = a_i` for `i < L`, and `δ(a_{L−1}, t(L)) = a_m`.
pub fn build_a_beta(spec: &BetaSpec) -> Dfa {
    let (m, k) = spec.lengths();
    let len = m + k;
    let alphabet = digit_alphabet(spec.max_digit());
    let states = (0..len).map(|i| format!("a{i}")).collect();
    let mut transitions = Vec::new();
    for i in 1..=len {
        let ti = spec.digit(i);
        for t in 0..ti {
            transitions.push((i - 1, t, 0));
        }
        let target = if i < len { i } else { m };
        transitions.push((i - 1, ti, target));
    }
    Dfa::new(alphabet, states, 0, vec![true; len], &transitions).expect("construction is deterministic")
}

/// Adds a fresh initial state `a0'` (index 0) that copies the nonzero
/// transitions of `a_0`, so words with leading zeros are rejected. Old
/// states move up by one index.
pub fn build_l_beta_dfa(a_beta: &Dfa) -> Dfa {
    let shift = |q: usize| q + 1;
    let mut states = vec!["a0'".to_string()];
    states.extend(a_beta.state_names.iter().cloned());
    let mut finals = vec![true];
    finals.extend(a_beta.finals.iter().copied());
    let mut transitions: Vec<(usize, Letter, usize)> =
        a_beta.transitions().map(|(q, c, t)| (shift(q), c, shift(t))).collect();
    for (c, t) in a_beta.delta[a_beta.initial].iter().enumerate().skip(1) {
        if let Some(t) = t {
            transitions.push((0, c as Letter, shift(*t)));
        }
    }
    Dfa::new(a_beta.alphabet.clone(), states, 0, finals, &transitions).expect("construction is deterministic")
}

pub fn product(dfa: &Dfa, dfao: &Dfao) -> Result<ProductAutomaton> {
    let width = dfa.alphabet_len();
    if width != dfao.alphabet_len() {
        return Err(Error::AlphabetMismatch {
            left: width,
            right: dfao.alphabet_len(),
        });
    }
    let start = (dfa.initial, dfao.initial());
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((q, r)) = queue.pop_front() {
        for c in 0..width as Letter {
            if let (Some(q2), Some(r2)) = (dfa.step(q, c), dfao.step(r, c)) {
                if seen.insert((q2, r2)) {
                    queue.push_back((q2, r2));
                }
            }
        }
    }
    let pairs: Vec<(usize, usize)> = seen.into_iter().collect();
    let index = |p: (usize, usize)| pairs.binary_search(&p).expect("reachable");
    let mut transitions = Vec::new();
    for (i, &(q, r)) in pairs.iter().enumerate() {
        for c in 0..width as Letter {
            if let (Some(q2), Some(r2)) = (dfa.step(q, c), dfao.step(r, c)) {
                transitions.push((i, c, index((q2, r2))));
            }
        }
    }
    let names = pairs
        .iter()
        .map(|&(q, r)| format!("({},{})", dfa.state_names[q], dfao.dfa.state_names[r]))
        .collect();
    let finals = pairs.iter().map(|&(q, _)| dfa.finals[q]).collect();
    let outputs = pairs.iter().map(|&(_, r)| dfao.output(r)).collect();
    let product_dfa = Dfa::new(dfa.alphabet.clone(), names, index(start), finals, &transitions)?;
    Ok(ProductAutomaton {
        dfa: product_dfa,
        pairs,
        outputs,
        component_sizes: (dfa.num_states(), dfao.dfa.num_states()),
    })
}

/// Compares acceptance with greedy membership on every word of length at
/// most `up_to_len`, in genealogical order. Returns the first disagreement.
pub fn check_language_equals_greedy(
    dfa: &Dfa,
    sys: &PositionalSystem,
    up_to_len: usize,
) -> Result<Option<Vec<Letter>>> {
    let width = sys.max_digit() as usize + 1;
    if dfa.alphabet_len() != width {
        return Err(Error::AlphabetMismatch {
            left: dfa.alphabet_len(),
            right: width,
        });
    }
    for len in 0..=up_to_len {
        let mut word = vec![0 as Letter; len];
        loop {
            if dfa.accepts(&word)? != sys.is_greedy(&word)? {
                return Ok(Some(word));
            }
            if !increment(&mut word, width as Letter) {
                break;
            }
        }
    }
    Ok(None)
}

/// Next word of the same length in lexicographic order.
pub(crate) fn increment(word: &mut [Letter], width: Letter) -> bool {
    for slot in word.iter_mut().rev() {
        *slot += 1;
        if *slot < width {
            return true;
        }
        *slot = 0;
    }
    false
}

pub fn digit_alphabet(max_digit: Letter) -> Vec<String> {
    (0..=max_digit).map(|d| d.to_string()).collect()
}

pub fn format_word(alphabet: &[String], word: &[Letter]) -> String {
    let single = alphabet.iter().all(|a| a.chars().count() == 1);
    let parts: Vec<&str> = word.iter().map(|&c| alphabet[c as usize].as_str()).collect();
    if single {
        parts.concat()
    } else {
        parts.join(" ")
    }
}

const TABLE_HEADER: &str = "#seqlab-automaton v1";

fn write_table(
    alphabet: &[String],
    states: &[String],
    initial: usize,
    finals: Option<&[bool]>,
    outputs: Option<&[u8]>,
    transitions: impl Iterator<Item = (usize, Letter, usize)>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{TABLE_HEADER}");
    let _ = writeln!(out, "alphabet {}", alphabet.join(" "));
    let _ = writeln!(out, "states {}", states.join(" "));
    let _ = writeln!(out, "initial {}", states[initial]);
    if let Some(finals) = finals {
        let names: Vec<&str> = states
            .iter()
            .zip(finals)
            .filter(|(_, &f)| f)
            .map(|(s, _)| s.as_str())
            .collect();
        let _ = writeln!(out, "final {}", names.join(" "));
    }
    if let Some(outputs) = outputs {
        for (s, o) in states.iter().zip(outputs) {
            let _ = writeln!(out, "output {s} {o}");
        }
    }
    for (q, c, t) in transitions {
        let _ = writeln!(out, "{} {} {}", states[q], alphabet[c as usize], states[t]);
    }
    out
}

struct ParsedTable {
    alphabet: Vec<String>,
    states: Vec<String>,
    initial: usize,
    finals: Vec<bool>,
    outputs: Vec<Option<u8>>,
    transitions: Vec<(usize, Letter, usize)>,
}

fn parse_table(text: &str) -> Result<ParsedTable> {
    let mut alphabet: Option<Vec<String>> = None;
    let mut states: Option<Vec<String>> = None;
    let mut initial: Option<String> = None;
    let mut finals: Option<Vec<String>> = None;
    let mut outputs: Vec<(String, u8, usize)> = Vec::new();
    let mut raw: Vec<(String, String, String, usize)> = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let owned = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        match fields[0] {
            "alphabet" => alphabet = Some(owned(&fields[1..])),
            "states" => states = Some(owned(&fields[1..])),
            "initial" if fields.len() == 2 => initial = Some(fields[1].to_string()),
            "final" => finals = Some(owned(&fields[1..])),
            "output" if fields.len() == 3 => {
                let o = fields[2]
                    .parse::<u8>()
                    .map_err(|_| Error::Parse(format!("line {lineno}: output must be a small integer")))?;
                outputs.push((fields[1].to_string(), o, lineno));
            }
            _ if fields.len() == 3 => raw.push((
                fields[0].to_string(),
                fields[1].to_string(),
                fields[2].to_string(),
                lineno,
            )),
            _ => return Err(Error::Parse(format!("line {lineno}: unrecognized `{line}`"))),
        }
    }
    let alphabet = alphabet.ok_or_else(|| Error::Parse("missing `alphabet` line".into()))?;
    let states = states.ok_or_else(|| Error::Parse("missing `states` line".into()))?;
    let state_index = |name: &str, lineno: usize| {
        states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::Parse(format!("line {lineno}: unknown state `{name}`")))
    };
    let initial = initial.ok_or_else(|| Error::Parse("missing `initial` line".into()))?;
    let initial = state_index(&initial, 0)?;
    let finals = match finals {
        None => vec![true; states.len()],
        Some(names) => {
            let mut f = vec![false; states.len()];
            for name in &names {
                f[state_index(name, 0)?] = true;
            }
            f
        }
    };
    let mut out = vec![None; if outputs.is_empty() { 0 } else { states.len() }];
    for (name, o, lineno) in &outputs {
        out[state_index(name, *lineno)?] = Some(*o);
    }
    if out.iter().any(Option::is_none) {
        return Err(Error::Parse("every state needs an `output` line".into()));
    }
    let mut transitions = Vec::new();
    for (from, letter, to, lineno) in &raw {
        let c = alphabet
            .iter()
            .position(|a| a == letter)
            .ok_or_else(|| Error::Parse(format!("line {lineno}: unknown letter `{letter}`")))?;
        transitions.push((state_index(from, *lineno)?, c as Letter, state_index(to, *lineno)?));
    }
    Ok(ParsedTable {
        alphabet,
        states,
        initial,
        finals,
        outputs: out,
        transitions,
    })
}
