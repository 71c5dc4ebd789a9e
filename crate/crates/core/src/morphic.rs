//! Morphisms, codings, fixed points, and the morphism pair built from a
//! product automaton.

use crate::automata::{Automaton, Dfao, ProductAutomaton};
use crate::error::{Error, Result};
use crate::numeration::PositionalSystem;
use crate::Letter;

/// Hard cap on raw letters produced while expanding a fixed point.
pub const DEFAULT_EXPANSION_CAP: usize = 1 << 26;

/// A morphism `A* → B*` given by the images of the letters of `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    domain: Vec<String>,
    codomain: Vec<String>,
    images: Vec<Vec<Letter>>,
}

impl Morphism {
    pub fn new(domain: Vec<String>, codomain: Vec<String>, images: Vec<Vec<Letter>>) -> Result<Self> {
        if images.len() != domain.len() {
            return Err(Error::InvalidMorphism(format!(
                "{} letters but {} images",
                domain.len(),
                images.len()
            )));
        }
        if let Some(&c) = images.iter().flatten().find(|&&c| c as usize >= codomain.len()) {
            return Err(Error::LetterOutOfAlphabet {
                letter: c,
                size: codomain.len(),
            });
        }
        Ok(Morphism {
            domain,
            codomain,
            images,
        })
    }

    /// Self-map on `alphabet`.
    pub fn endomorphism(alphabet: Vec<String>, images: Vec<Vec<Letter>>) -> Result<Self> {
        Self::new(alphabet.clone(), alphabet, images)
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn codomain(&self) -> &[String] {
        &self.codomain
    }

    pub fn image(&self, letter: Letter) -> &[Letter] {
        &self.images[letter as usize]
    }

    pub fn is_coding(&self) -> bool {
        self.images.iter().all(|img| img.len() == 1)
    }

    /// `Some(ℓ)` when every image has length `ℓ`.
    pub fn uniform_length(&self) -> Option<usize> {
        let first = self.images.first()?.len();
        self.images.iter().all(|i| i.len() == first).then_some(first)
    }

    pub fn apply(&self, word: &[Letter]) -> Result<Vec<Letter>> {
        let mut out = Vec::with_capacity(word.len());
        for &c in word {
            let img = self.images.get(c as usize).ok_or(Error::LetterOutOfAlphabet {
                letter: c,
                size: self.domain.len(),
            })?;
            out.extend_from_slice(img);
        }
        Ok(out)
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &Morphism) -> Result<Morphism> {
        if inner.codomain.len() != self.domain.len() {
            return Err(Error::AlphabetMismatch {
                left: self.domain.len(),
                right: inner.codomain.len(),
            });
        }
        let images = inner.images.iter().map(|img| self.apply(img)).collect::<Result<_>>()?;
        Morphism::new(inner.domain.clone(), self.codomain.clone(), images)
    }

    /// `self^times(word)`.
    pub fn iterate(&self, word: &[Letter], times: usize) -> Result<Vec<Letter>> {
        let mut w = word.to_vec();
        for _ in 0..times {
            w = self.apply(&w)?;
        }
        Ok(w)
    }

    pub fn format_word(&self, word: &[Letter]) -> String {
        crate::automata::format_word(&self.codomain, word)
    }

    /// Raw letters `f^ω(seed)[0..len]`.
    pub fn fixed_point(&self, seed: Letter, len: usize) -> Result<Vec<Letter>> {
        if self.domain.len() != self.codomain.len() {
            return Err(Error::InvalidMorphism("not an endomorphism".into()));
        }
        check_prolongable(self, seed)?;
        let mut raw = vec![seed];
        let mut i = 0;
        while raw.len() < len {
            if i >= raw.len() {
                return Err(Error::FiniteImage { len: raw.len() });
            }
            let skip = usize::from(i == 0);
            raw.extend_from_slice(&self.images[raw[i] as usize][skip..]);
            i += 1;
        }
        raw.truncate(len);
        Ok(raw)
    }
}

fn check_prolongable(f: &Morphism, seed: Letter) -> Result<()> {
    let img = f.images.get(seed as usize).ok_or(Error::LetterOutOfAlphabet {
        letter: seed,
        size: f.domain.len(),
    })?;
    if img.len() >= 2 && img[0] == seed {
        Ok(())
    } else {
        Err(Error::NotProlongable)
    }
}

/// `g(f^ω(a))` for a prolongable endomorphism `f`, seed `a`, and a possibly
/// erasing letter-to-letter-or-empty map `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphicSpec {
    morphism: Morphism,
    seed: Letter,
    coding: Morphism,
}

impl MorphicSpec {
    pub fn new(morphism: Morphism, seed: Letter, coding: Morphism) -> Result<Self> {
        if morphism.domain.len() != morphism.codomain.len() {
            return Err(Error::InvalidMorphism("not an endomorphism".into()));
        }
        if coding.domain.len() != morphism.domain.len() {
            return Err(Error::AlphabetMismatch {
                left: morphism.domain.len(),
                right: coding.domain.len(),
            });
        }
        if coding.images.iter().any(|img| img.len() > 1) {
            return Err(Error::InvalidMorphism("coding images must have length 0 or 1".into()));
        }
        if coding.codomain.len() > u8::MAX as usize + 1 {
            return Err(Error::InvalidMorphism("output alphabet too large".into()));
        }
        check_prolongable(&morphism, seed)?;
        Ok(MorphicSpec { morphism, seed, coding })
    }

    pub fn morphism(&self) -> &Morphism {
        &self.morphism
    }

    pub fn seed(&self) -> Letter {
        self.seed
    }

    pub fn coding(&self) -> &Morphism {
        &self.coding
    }
}

/// A finite prefix `s(0..N)` of a sequence, with symbols as indices into
/// `alphabet`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequencePrefix {
    symbols: Vec<u8>,
    alphabet: Vec<String>,
    provenance: String,
}

impl SequencePrefix {
    pub fn new(symbols: Vec<u8>, alphabet: Vec<String>, provenance: impl Into<String>) -> Result<Self> {
        if let Some(i) = symbols.iter().position(|&s| s as usize >= alphabet.len()) {
            return Err(Error::LetterOutOfAlphabet {
                letter: symbols[i] as Letter,
                size: alphabet.len(),
            });
        }
        Ok(SequencePrefix {
            symbols,
            alphabet,
            provenance: provenance.into(),
        })
    }

    /// Binary prefix over `{0, 1}`.
    pub fn binary(symbols: Vec<u8>, provenance: impl Into<String>) -> Result<Self> {
        Self::new(symbols, vec!["0".into(), "1".into()], provenance)
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn truncated(&self, len: usize) -> SequencePrefix {
        SequencePrefix {
            symbols: self.symbols[..len.min(self.symbols.len())].to_vec(),
            alphabet: self.alphabet.clone(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn is_binary(&self) -> bool {
        self.symbols.iter().all(|&s| s <= 1)
    }

    /// `(−1)^{s(n)}` for a binary prefix.
    pub fn signs(&self) -> Result<Vec<i8>> {
        self.symbols
            .iter()
            .enumerate()
            .map(|(index, &s)| match s {
                0 => Ok(1),
                1 => Ok(-1),
                symbol => Err(Error::NonBinarySequence { index, symbol }),
            })
            .collect()
    }

    /// Symbols rendered with their alphabet names.
    pub fn render(&self) -> String {
        let letters: Vec<Letter> = self.symbols.iter().map(|&s| s as Letter).collect();
        crate::automata::format_word(&self.alphabet, &letters)
    }
}

/// First `n` letters of `g(f^ω(a))`, expanding lazily with at most `cap`
/// raw letters.
pub fn fixed_point_prefix(spec: &MorphicSpec, n: usize, cap: usize) -> Result<SequencePrefix> {
    let f = &spec.morphism;
    let g = &spec.coding;
    let mut raw = vec![spec.seed];
    let mut out: Vec<u8> = g.images[spec.seed as usize].iter().map(|&c| c as u8).collect();
    let mut i = 0;
    while out.len() < n {
        if i >= raw.len() {
            return Err(Error::FiniteImage { len: out.len() });
        }
        if raw.len() > cap {
            return Err(Error::Capacity {
                requested: raw.len() as u128,
                capacity: cap as u128,
            });
        }
        let skip = usize::from(i == 0);
        let img = &f.images[raw[i] as usize][skip..];
        for &c in img {
            out.extend(g.images[c as usize].iter().map(|&x| x as u8));
        }
        raw.extend_from_slice(img);
        i += 1;
    }
    out.truncate(n);
    SequencePrefix::new(out, g.codomain.clone(), "morphic")
}

/// The morphism pair `(φ, ν)` of a product automaton over the numeration
/// alphabet `0..width`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiNu {
    pub phi: Morphism,
    pub nu: Morphism,
}

impl PhiNu {
    /// Letter `0` is the extra head symbol `α`.
    pub const ALPHA: Letter = 0;

    /// Letter of product state `s`.
    pub fn letter_of(state: usize) -> Letter {
        state as Letter + 1
    }

    pub fn spec(&self) -> MorphicSpec {
        MorphicSpec::new(self.phi.clone(), Self::ALPHA, self.nu.clone()).expect("φ is prolongable on α by construction")
    }
}

/// `φ(α) = α·(a₀,r₀)`, `φ(s) = Δ(s,0)⋯Δ(s,m)` skipping undefined
/// transitions, `ν(α) = ε`, `ν((q,r)) = τ(r)`.
pub fn build_phi_nu(p: &ProductAutomaton) -> Result<PhiNu> {
    let width = p.alphabet_len() as Letter;
    for s in 0..p.num_states() {
        if p.output(s) > 1 {
            return Err(Error::NonBinaryOutput {
                state: s,
                output: p.output(s),
            });
        }
    }
    let mut alphabet = vec!["α".to_string()];
    alphabet.extend(p.dfa().state_names().iter().cloned());
    let mut phi_images = vec![vec![PhiNu::ALPHA, PhiNu::letter_of(p.initial())]];
    let mut nu_images = vec![Vec::new()];
    for s in 0..p.num_states() {
        phi_images.push((0..width).filter_map(|c| p.step(s, c).map(PhiNu::letter_of)).collect());
        nu_images.push(vec![p.output(s) as Letter]);
    }
    let phi = Morphism::endomorphism(alphabet.clone(), phi_images)?;
    let nu = Morphism::new(alphabet, vec!["0".into(), "1".into()], nu_images)?;
    debug_assert!(nu.images[1..].iter().all(|img| img.len() == 1));
    Ok(PhiNu { phi, nu })
}

/// `s(n) = τ(B(rep(n)))` for `n < N`.
pub fn automatic_prefix(dfao: &Dfao, sys: &PositionalSystem, n: usize) -> Result<SequencePrefix> {
    if n > DEFAULT_EXPANSION_CAP {
        return Err(Error::Capacity {
            requested: n as u128,
            capacity: DEFAULT_EXPANSION_CAP as u128,
        });
    }
    let width = sys.max_digit() as usize + 1;
    if dfao.alphabet_len() < width {
        return Err(Error::AlphabetMismatch {
            left: dfao.alphabet_len(),
            right: width,
        });
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n as u64 {
        let rep = sys.rep_u64(i);
        let (_, o) = dfao
            .evaluate(&rep)?
            .ok_or_else(|| Error::InvalidAutomaton(format!("no transition along rep({i})")))?;
        out.push(o);
    }
    let top = out.iter().copied().max().unwrap_or(1).max(1);
    SequencePrefix::new(out, (0..=top).map(|d| d.to_string()).collect(), "automatic")
}

/// Checks `ν(φ^ω(α)) = s` on a length-`n` prefix, where `s` is produced by
/// `dfao` directly, and that `φ^ω(α)` shifted by one lists the product
/// states reached by `rep(0), rep(1), …`.
pub fn cross_check_morphic_vs_automatic(
    p: &ProductAutomaton,
    dfao: &Dfao,
    sys: &PositionalSystem,
    n: usize,
) -> Result<()> {
    cross_check_with(&build_phi_nu(p)?, p, dfao, sys, n)
}

pub fn cross_check_with(
    pair: &PhiNu,
    p: &ProductAutomaton,
    dfao: &Dfao,
    sys: &PositionalSystem,
    n: usize,
) -> Result<()> {
    let raw = pair.phi.fixed_point(PhiNu::ALPHA, n + 1)?;
    for i in 0..n {
        let rep = sys.rep_u64(i as u64);
        let expected = p.run(&rep)?.map(PhiNu::letter_of);
        if Some(raw[i + 1]) != expected {
            return Err(Error::Mismatch {
                index: i,
                detail: format!(
                    "fixed point has {} but rep({i}) reaches {:?}",
                    pair.phi.format_word(&raw[i + 1..i + 2]),
                    expected.map(|e| pair.phi.format_word(&[e]))
                ),
            });
        }
    }
    let morphic = fixed_point_prefix(&pair.spec(), n, DEFAULT_EXPANSION_CAP)?;
    let automatic = automatic_prefix(dfao, sys, n)?;
    if let Some(i) = (0..n).find(|&i| morphic.symbols()[i] != automatic.symbols()[i]) {
        return Err(Error::Mismatch {
            index: i,
            detail: format!(
                "ν(φ^ω(α)) gives {} but the automaton gives {}",
                morphic.symbols()[i],
                automatic.symbols()[i]
            ),
        });
    }
    Ok(())
}
