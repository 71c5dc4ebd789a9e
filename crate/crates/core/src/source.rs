//! Numeration systems and sequence generators, including the shipped
//! presets.

use num_bigint::BigUint;

use crate::automata::{
    build_a_beta, build_l_beta_dfa, digit_alphabet, product, Automaton, Dfa, Dfao, ProductAutomaton,
};
use crate::beta::{quasi_greedy_from_greedy, BetaSpec, LinearRecurrence};
use crate::error::{Error, Result};
use crate::morphic::{automatic_prefix, fixed_point_prefix, MorphicSpec, SequencePrefix, DEFAULT_EXPANSION_CAP};
use crate::numeration::PositionalSystem;
use crate::Digit;

pub const SYSTEM_PRESETS: &[&str] = &["base2", "base3", "base10", "fibonacci", "phi2", "ex41"];
pub const SEQUENCE_PRESETS: &[&str] = &[
    "thue_morse",
    "fib_sum_digits",
    "cantor",
    "ex41",
    "champernowne",
    "periodic:<pattern>",
    "constant[:<symbol>]",
];

/// A positional system with, when known, the automaton of its greedy
/// representations (no leading zeros).
#[derive(Debug, Clone)]
pub struct Numeration {
    pub name: String,
    pub system: PositionalSystem,
    pub language: Option<Dfa>,
    pub beta: Option<BetaSpec>,
}

impl Numeration {
    pub fn from_beta(name: impl Into<String>, beta: BetaSpec) -> Result<Self> {
        Ok(Numeration {
            name: name.into(),
            system: PositionalSystem::from_beta(&beta)?,
            language: Some(build_l_beta_dfa(&build_a_beta(&beta))),
            beta: Some(beta),
        })
    }

    pub fn from_recurrence(name: impl Into<String>, rec: LinearRecurrence, language: Option<Dfa>) -> Result<Self> {
        let system = PositionalSystem::new(rec)?;
        if let Some(l) = &language {
            if l.alphabet_len() != system.max_digit() as usize + 1 {
                return Err(Error::AlphabetMismatch {
                    left: l.alphabet_len(),
                    right: system.max_digit() as usize + 1,
                });
            }
        }
        Ok(Numeration {
            name: name.into(),
            system,
            language,
            beta: None,
        })
    }

    pub fn language(&self) -> Result<&Dfa> {
        self.language
            .as_ref()
            .ok_or_else(|| Error::InvalidAutomaton(format!("system {} has no language automaton", self.name)))
    }

    pub fn width(&self) -> usize {
        self.system.max_digit() as usize + 1
    }
}

fn ex41_language() -> Dfa {
    Dfa::new(
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
    .expect("valid table")
}

pub fn system_preset(name: &str) -> Result<Numeration> {
    match name {
        "base2" => Numeration::from_beta(name, BetaSpec::integer_base(2)?),
        "base3" => Numeration::from_beta(name, BetaSpec::integer_base(3)?),
        "base10" => Numeration::from_beta(name, BetaSpec::integer_base(10)?),
        "fibonacci" => Numeration::from_beta(name, quasi_greedy_from_greedy(&[1, 1])?),
        "phi2" => Numeration::from_beta(name, BetaSpec::new(vec![2], vec![1])?),
        "ex41" => {
            let rec = LinearRecurrence::new(vec![4, -3], vec![BigUint::from(1u32), BigUint::from(4u32)])?;
            Numeration::from_recurrence(name, rec, Some(ex41_language()))
        }
        _ => Err(Error::Parse(format!(
            "unknown system preset {name:?} (known: {})",
            SYSTEM_PRESETS.join(", ")
        ))),
    }
}

#[derive(Debug, Clone)]
pub enum Generator {
    Automatic { numeration: Numeration, dfao: Dfao },
    Morphic(MorphicSpec),
    Champernowne,
}

#[derive(Debug, Clone)]
pub struct SequenceSource {
    pub name: String,
    pub generator: Generator,
}

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// Parity of the digit sum over a binary digit alphabet.
fn parity_dfao() -> Dfao {
    Dfao::new(
        digit_alphabet(1),
        vec!["0".into(), "1".into()],
        0,
        vec![0, 1],
        &[(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)],
    )
    .expect("valid table")
}

fn cantor_dfao() -> Dfao {
    Dfao::new(
        digit_alphabet(2),
        vec!["a".into(), "b".into()],
        0,
        vec![0, 1],
        &[(0, 0, 0), (0, 1, 1), (0, 2, 0), (1, 0, 1), (1, 1, 1), (1, 2, 1)],
    )
    .expect("valid table")
}

fn ex41_dfao() -> Dfao {
    Dfao::new(
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
    .expect("valid table")
}

/// `n ↦ pattern[n mod p]` read in base 2: the state is the residue.
pub fn periodic_dfao(pattern: &[u8]) -> Result<Dfao> {
    let p = pattern.len();
    if p == 0 {
        return Err(Error::Parse("periodic pattern is empty".into()));
    }
    let transitions: Vec<_> = (0..p)
        .flat_map(|r| (0..2).map(move |d| (r, d as Digit, (2 * r + d) % p)))
        .collect();
    Dfao::new(digit_alphabet(1), names(p), 0, pattern.to_vec(), &transitions)
}

fn parse_symbols(text: &str) -> Result<Vec<u8>> {
    text.chars()
        .map(|c| {
            c.to_digit(10)
                .map(|d| d as u8)
                .ok_or_else(|| Error::Parse(format!("symbol {c:?} is not a decimal digit")))
        })
        .collect()
}

pub fn sequence_preset(name: &str) -> Result<SequenceSource> {
    let automatic = |system: &str, dfao: Dfao| -> Result<SequenceSource> {
        Ok(SequenceSource {
            name: name.to_string(),
            generator: Generator::Automatic {
                numeration: system_preset(system)?,
                dfao,
            },
        })
    };
    match name {
        "thue_morse" => automatic("base2", parity_dfao()),
        "fib_sum_digits" => automatic("fibonacci", parity_dfao()),
        "cantor" => automatic("base3", cantor_dfao()),
        "ex41" => automatic("ex41", ex41_dfao()),
        "champernowne" => Ok(SequenceSource {
            name: name.into(),
            generator: Generator::Champernowne,
        }),
        "constant" => automatic("base2", periodic_dfao(&[0])?),
        _ => {
            if let Some(pattern) = name.strip_prefix("periodic:") {
                automatic("base2", periodic_dfao(&parse_symbols(pattern)?)?)
            } else if let Some(symbol) = name.strip_prefix("constant:") {
                let s = parse_symbols(symbol)?;
                if s.len() != 1 {
                    return Err(Error::Parse("constant takes a single symbol".into()));
                }
                automatic("base2", periodic_dfao(&s)?)
            } else {
                Err(Error::Parse(format!(
                    "unknown sequence preset {name:?} (known: {})",
                    SEQUENCE_PRESETS.join(", ")
                )))
            }
        }
    }
}

/// `0 1 10 11 100 …`: binary representations of `0, 1, 2, …` concatenated.
pub fn champernowne_prefix(n: usize) -> SequencePrefix {
    let mut out = Vec::with_capacity(n);
    let mut i: u64 = 0;
    while out.len() < n {
        let bits = 64 - i.leading_zeros().min(63);
        out.extend((0..bits).rev().map(|b| ((i >> b) & 1) as u8));
        i += 1;
    }
    out.truncate(n);
    SequencePrefix::binary(out, "champernowne").expect("binary")
}

impl SequenceSource {
    pub fn generate(&self, n: usize) -> Result<SequencePrefix> {
        let prefix = match &self.generator {
            Generator::Automatic { numeration, dfao } => automatic_prefix(dfao, &numeration.system, n)?,
            Generator::Morphic(spec) => fixed_point_prefix(spec, n, DEFAULT_EXPANSION_CAP)?,
            Generator::Champernowne => champernowne_prefix(n),
        };
        SequencePrefix::new(prefix.symbols().to_vec(), prefix.alphabet().to_vec(), self.name.clone())
    }

    pub fn numeration(&self) -> Option<&Numeration> {
        match &self.generator {
            Generator::Automatic { numeration, .. } => Some(numeration),
            _ => None,
        }
    }

    pub fn dfao(&self) -> Option<&Dfao> {
        match &self.generator {
            Generator::Automatic { dfao, .. } => Some(dfao),
            _ => None,
        }
    }

    /// Product of the language automaton and the DFAO.
    pub fn product(&self) -> Result<ProductAutomaton> {
        match &self.generator {
            Generator::Automatic { numeration, dfao } => product(numeration.language()?, dfao),
            _ => Err(Error::InvalidAutomaton(format!("{} is not given by a DFAO", self.name))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphic::Morphism;

    #[test]
    fn system_values() {
        let v = |name: &str, n: usize| -> Vec<u64> {
            let s = system_preset(name).unwrap();
            (0..n).map(|i| s.system.value_u64(i).unwrap()).collect()
        };
        assert_eq!(v("fibonacci", 6), [1, 2, 3, 5, 8, 13]);
        assert_eq!(v("phi2", 5), [1, 3, 8, 21, 55]);
        assert_eq!(v("ex41", 5), [1, 4, 13, 40, 121]);
        assert_eq!(v("base10", 3), [1, 10, 100]);
        assert!(system_preset("base7").is_err());
    }

    #[test]
    fn generated_prefixes() {
        let g = |name: &str, n: usize| sequence_preset(name).unwrap().generate(n).unwrap().render();
        assert_eq!(g("thue_morse", 16), "0110100110010110");
        assert_eq!(g("periodic:01", 6), "010101");
        assert_eq!(g("periodic:011", 7), "0110110");
        assert_eq!(g("champernowne", 15), "011011100101110");
        assert_eq!(g("constant", 5), "00000");
        assert_eq!(g("constant:1", 3), "111");
        assert_eq!(g("cantor", 22), "0101110101111111110101");
        assert!(sequence_preset("periodic:").is_err());
        assert!(sequence_preset("periodic:0a").is_err());
    }

    #[test]
    fn cantor_matches_its_morphism() {
        let ab = vec!["a".to_string(), "b".to_string()];
        let f = Morphism::endomorphism(ab.clone(), vec![vec![0, 1, 0], vec![1, 1, 1]]).unwrap();
        let g = Morphism::new(ab, vec!["0".into(), "1".into()], vec![vec![0], vec![1]]).unwrap();
        let spec = MorphicSpec::new(f, 0, g).unwrap();
        let n = 3usize.pow(8);
        assert_eq!(
            fixed_point_prefix(&spec, n, DEFAULT_EXPANSION_CAP).unwrap().symbols(),
            sequence_preset("cantor").unwrap().generate(n).unwrap().symbols()
        );
    }

    #[test]
    fn products_of_presets() {
        for name in ["thue_morse", "fib_sum_digits", "cantor", "ex41", "periodic:0110"] {
            let src = sequence_preset(name).unwrap();
            let p = src.product().unwrap();
            assert!(p.num_states() <= p.component_sizes().0 * p.component_sizes().1);
        }
        assert!(sequence_preset("champernowne").unwrap().product().is_err());
    }
}
