//! Sequence spec files (TOML) and prefix files.
//!
//! A spec file has up to four tables: `system`, `automaton`, `morphism`
//! and `sequence`. Exactly one generator results: `sequence` alone, or
//! `morphism` alone, or `system` with `automaton`. A file with only
//! `system` describes a numeration system and no sequence.
//!
//! ```toml
//! [system]
//! preset = "fibonacci"          # or beta = { preperiod = [1, 1], period = [0] },
//!                               # greedy = [1, 1], or
//!                               # recurrence = { coefficients = [4, -3], initial = [1, 4] }
//!                               # plus language = { table = "..." } or { file = "..." }
//! [automaton]
//! file = "parity.txt"           # or table = """#seqlab-automaton v1 ..."""
//!
//! [morphism]
//! alphabet = ["a", "b"]
//! images = { a = "aba", b = "bbb" }
//! seed = "a"
//! coding = { a = "0", b = "1" } # optional; identity when absent
//!
//! [sequence]
//! preset = "thue_morse"         # or periodic = "01", constant = "0", champernowne = true
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use serde::Deserialize;

use crate::automata::{digit_alphabet, Automaton, Dfa, Dfao};
use crate::beta::{quasi_greedy_from_greedy, BetaSpec, LinearRecurrence};
use crate::error::{Error, Result};
use crate::morphic::{MorphicSpec, Morphism, SequencePrefix};
use crate::source::{sequence_preset, system_preset, Generator, Numeration, SequenceSource};
use crate::{Digit, Letter};

pub const PREFIX_HEADER: &str = "#seqlab v1";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    system: Option<RawSystem>,
    automaton: Option<RawTable>,
    morphism: Option<RawMorphism>,
    sequence: Option<RawSequence>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    name: Option<String>,
    preset: Option<String>,
    beta: Option<RawBeta>,
    greedy: Option<Vec<Digit>>,
    recurrence: Option<RawRecurrence>,
    language: Option<RawTable>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBeta {
    preperiod: Vec<Digit>,
    period: Vec<Digit>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecurrence {
    coefficients: Vec<i64>,
    initial: Vec<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    table: Option<String>,
    file: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawWord {
    Chars(String),
    Letters(Vec<String>),
}

impl RawWord {
    fn letters(&self) -> Vec<String> {
        match self {
            RawWord::Chars(s) => s.chars().map(String::from).collect(),
            RawWord::Letters(v) => v.clone(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMorphism {
    alphabet: Vec<String>,
    images: BTreeMap<String, RawWord>,
    seed: String,
    coding: Option<BTreeMap<String, RawWord>>,
    output_alphabet: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSequence {
    name: Option<String>,
    preset: Option<String>,
    periodic: Option<String>,
    constant: Option<String>,
    champernowne: Option<bool>,
}

/// What a spec file describes.
#[derive(Debug, Clone)]
pub struct LoadedSpec {
    pub numeration: Option<Numeration>,
    pub source: Option<SequenceSource>,
}

fn field_err(field: &str, e: impl std::fmt::Display) -> Error {
    Error::Parse(format!("field `{field}`: {e}"))
}

fn read_table(field: &str, raw: &RawTable, base: Option<&Path>) -> Result<String> {
    match (&raw.table, &raw.file) {
        (Some(t), None) => Ok(t.clone()),
        (None, Some(f)) => {
            let path = base.map_or_else(|| f.clone(), |b| b.join(f));
            std::fs::read_to_string(&path).map_err(|e| field_err(field, format!("{}: {e}", path.display())))
        }
        _ => Err(field_err(field, "give exactly one of `table` or `file`")),
    }
}

fn exactly_one(field: &str, present: &[(&str, bool)]) -> Result<usize> {
    let set: Vec<usize> = (0..present.len()).filter(|&i| present[i].1).collect();
    if set.len() != 1 {
        let names: Vec<&str> = present.iter().map(|p| p.0).collect();
        return Err(field_err(field, format!("give exactly one of {}", names.join(", "))));
    }
    Ok(set[0])
}

fn load_system(raw: &RawSystem, base: Option<&Path>) -> Result<Numeration> {
    let which = exactly_one(
        "system",
        &[
            ("preset", raw.preset.is_some()),
            ("beta", raw.beta.is_some()),
            ("greedy", raw.greedy.is_some()),
            ("recurrence", raw.recurrence.is_some()),
        ],
    )?;
    let name = raw.name.clone().unwrap_or_else(|| "system".into());
    let language = raw
        .language
        .as_ref()
        .map(|t| Dfa::from_table(&read_table("system.language", t, base)?).map_err(|e| field_err("system.language", e)))
        .transpose()?;
    let mut numeration = match which {
        0 => system_preset(raw.preset.as_deref().unwrap()).map_err(|e| field_err("system.preset", e))?,
        1 => {
            let b = raw.beta.as_ref().unwrap();
            let spec = BetaSpec::new(b.preperiod.clone(), b.period.clone()).map_err(|e| field_err("system.beta", e))?;
            Numeration::from_beta(name.clone(), spec).map_err(|e| field_err("system.beta", e))?
        }
        2 => {
            let spec =
                quasi_greedy_from_greedy(raw.greedy.as_ref().unwrap()).map_err(|e| field_err("system.greedy", e))?;
            Numeration::from_beta(name.clone(), spec).map_err(|e| field_err("system.greedy", e))?
        }
        _ => {
            let r = raw.recurrence.as_ref().unwrap();
            let rec = LinearRecurrence::new(
                r.coefficients.clone(),
                r.initial.iter().map(|&x| BigUint::from(x)).collect(),
            )
            .map_err(|e| field_err("system.recurrence", e))?;
            Numeration::from_recurrence(name.clone(), rec, None).map_err(|e| field_err("system.recurrence", e))?
        }
    };
    if let Some(l) = language {
        if l.alphabet() != digit_alphabet(numeration.system.max_digit()).as_slice() {
            return Err(field_err(
                "system.language",
                format!("alphabet must be the digits 0..={}", numeration.system.max_digit()),
            ));
        }
        numeration.language = Some(l);
    }
    if raw.name.is_some() {
        numeration.name = name;
    }
    Ok(numeration)
}

fn load_morphism(raw: &RawMorphism) -> Result<MorphicSpec> {
    let alphabet = raw.alphabet.clone();
    let index = |field: &str, letter: &str, within: &[String]| -> Result<Letter> {
        within
            .iter()
            .position(|a| a == letter)
            .map(|i| i as Letter)
            .ok_or_else(|| field_err(field, format!("letter {letter:?} is not in the alphabet")))
    };
    let word = |field: &str, w: &RawWord, within: &[String]| -> Result<Vec<Letter>> {
        w.letters().iter().map(|l| index(field, l, within)).collect()
    };
    for key in raw.images.keys() {
        index("morphism.images", key, &alphabet)?;
    }
    let images = alphabet
        .iter()
        .map(|a| {
            let w = raw
                .images
                .get(a)
                .ok_or_else(|| field_err("morphism.images", format!("no image for {a:?}")))?;
            word(&format!("morphism.images.{a}"), w, &alphabet)
        })
        .collect::<Result<Vec<_>>>()?;
    let f = Morphism::endomorphism(alphabet.clone(), images).map_err(|e| field_err("morphism.images", e))?;
    let seed = index("morphism.seed", &raw.seed, &alphabet)?;
    let g = match &raw.coding {
        None => Morphism::new(
            alphabet.clone(),
            alphabet.clone(),
            (0..alphabet.len() as Letter).map(|c| vec![c]).collect(),
        )?,
        Some(coding) => {
            let outputs = match &raw.output_alphabet {
                Some(o) => o.clone(),
                None => {
                    let mut o: Vec<String> = coding.values().flat_map(|w| w.letters()).collect();
                    o.sort();
                    o.dedup();
                    o
                }
            };
            let images = alphabet
                .iter()
                .map(|a| {
                    let w = coding
                        .get(a)
                        .ok_or_else(|| field_err("morphism.coding", format!("no image for {a:?}")))?;
                    word(&format!("morphism.coding.{a}"), w, &outputs)
                })
                .collect::<Result<Vec<_>>>()?;
            Morphism::new(alphabet.clone(), outputs, images).map_err(|e| field_err("morphism.coding", e))?
        }
    };
    MorphicSpec::new(f, seed, g).map_err(|e| field_err("morphism", e))
}

fn load_sequence(raw: &RawSequence) -> Result<SequenceSource> {
    let which = exactly_one(
        "sequence",
        &[
            ("preset", raw.preset.is_some()),
            ("periodic", raw.periodic.is_some()),
            ("constant", raw.constant.is_some()),
            ("champernowne", raw.champernowne == Some(true)),
        ],
    )?;
    let preset = match which {
        0 => raw.preset.clone().unwrap(),
        1 => format!("periodic:{}", raw.periodic.as_ref().unwrap()),
        2 => format!("constant:{}", raw.constant.as_ref().unwrap()),
        _ => "champernowne".into(),
    };
    let mut src = sequence_preset(&preset).map_err(|e| field_err("sequence", e))?;
    if let Some(name) = &raw.name {
        src.name = name.clone();
    }
    Ok(src)
}

/// Parses a spec file; relative `file` entries resolve against `base`.
pub fn parse_spec(text: &str, base: Option<&Path>) -> Result<LoadedSpec> {
    let raw: RawSpec = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let generators = [raw.sequence.is_some(), raw.morphism.is_some(), raw.automaton.is_some()];
    if generators.iter().filter(|&&g| g).count() > 1 {
        return Err(Error::Parse(
            "give only one of the tables `sequence`, `morphism`, `automaton`".into(),
        ));
    }
    let numeration = raw.system.as_ref().map(|s| load_system(s, base)).transpose()?;
    let source = if let Some(seq) = &raw.sequence {
        Some(load_sequence(seq)?)
    } else if let Some(m) = &raw.morphism {
        Some(SequenceSource {
            name: "morphic".into(),
            generator: Generator::Morphic(load_morphism(m)?),
        })
    } else if let Some(a) = &raw.automaton {
        let numeration = numeration
            .clone()
            .ok_or_else(|| field_err("automaton", "an automaton needs a `system` table"))?;
        let dfao = Dfao::from_table(&read_table("automaton", a, base)?).map_err(|e| field_err("automaton", e))?;
        if dfao.alphabet_len() != numeration.width()
            || dfao.dfa().alphabet() != digit_alphabet(numeration.system.max_digit()).as_slice()
        {
            return Err(field_err(
                "automaton",
                format!("alphabet must be the digits 0..={}", numeration.system.max_digit()),
            ));
        }
        Some(SequenceSource {
            name: format!("automatic:{}", numeration.name),
            generator: Generator::Automatic { numeration, dfao },
        })
    } else {
        None
    };
    if numeration.is_none() && source.is_none() {
        return Err(Error::Parse(
            "spec file describes neither a system nor a sequence".into(),
        ));
    }
    Ok(LoadedSpec { numeration, source })
}

pub fn load_spec(path: &Path) -> Result<LoadedSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_spec(&text, path.parent())
}

/// `#seqlab v1 alphabet=<letters>` and one line of symbols.
pub fn write_prefix(p: &SequencePrefix) -> Result<String> {
    if p.alphabet().iter().any(|a| a.chars().count() != 1) {
        return Err(Error::Parse("prefix files need single-character letters".into()));
    }
    Ok(format!(
        "{PREFIX_HEADER} alphabet={}\n{}\n",
        p.alphabet().concat(),
        p.render()
    ))
}

pub fn read_prefix(text: &str) -> Result<SequencePrefix> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty prefix file".into()))?;
    let letters = header
        .strip_prefix(PREFIX_HEADER)
        .and_then(|rest| rest.trim().strip_prefix("alphabet="))
        .ok_or_else(|| Error::Parse(format!("line 1: expected `{PREFIX_HEADER} alphabet=<letters>`")))?;
    let alphabet: Vec<char> = letters.chars().collect();
    if alphabet.is_empty() {
        return Err(Error::Parse("line 1: empty alphabet".into()));
    }
    let body = lines.next().unwrap_or("").trim_end();
    if lines.any(|l| !l.trim().is_empty()) {
        return Err(Error::Parse(
            "line 3: prefix files hold a single line of symbols".into(),
        ));
    }
    let symbols =
        body.chars()
            .enumerate()
            .map(|(i, c)| {
                alphabet.iter().position(|&a| a == c).map(|p| p as u8).ok_or_else(|| {
                    Error::Parse(format!("line 2, column {}: symbol {c:?} is not in the alphabet", i + 1))
                })
            })
            .collect::<Result<Vec<_>>>()?;
    SequencePrefix::new(symbols, alphabet.iter().map(|c| c.to_string()).collect(), "file")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generate(text: &str, n: usize) -> String {
        parse_spec(text, None)
            .unwrap()
            .source
            .unwrap()
            .generate(n)
            .unwrap()
            .render()
    }

    #[test]
    fn sequence_tables() {
        assert_eq!(generate("[sequence]\npreset = \"thue_morse\"\n", 8), "01101001");
        assert_eq!(generate("[sequence]\nperiodic = \"01\"\n", 6), "010101");
        assert_eq!(generate("[sequence]\nchampernowne = true\n", 7), "0110111");
    }

    #[test]
    fn morphism_table() {
        let text = r#"
[morphism]
alphabet = ["a", "b"]
images = { a = "aba", b = ["b", "b", "b"] }
seed = "a"
"#;
        assert_eq!(generate(text, 10), "ababbbabab");
        let coded = format!("{text}coding = {{ a = \"0\", b = \"1\" }}\n");
        assert_eq!(generate(&coded, 10), "0101110101");
    }

    #[test]
    fn automatic_table() {
        let dfao = crate::source::sequence_preset("fib_sum_digits")
            .unwrap()
            .dfao()
            .unwrap()
            .to_table();
        let text = format!("[system]\ngreedy = [1, 1]\n\n[automaton]\ntable = \"\"\"\n{dfao}\"\"\"\n");
        assert_eq!(generate(&text, 8), "01110100");
        let spec = parse_spec(&text, None).unwrap();
        assert_eq!(spec.numeration.unwrap().system.value_u64(4), Some(8));
    }

    #[test]
    fn system_only() {
        let spec = parse_spec(
            "[system]\nrecurrence = { coefficients = [4, -3], initial = [1, 4] }\n",
            None,
        )
        .unwrap();
        assert!(spec.source.is_none());
        assert_eq!(spec.numeration.unwrap().system.value_u64(3), Some(40));
        let spec = parse_spec("[system]\nbeta = { preperiod = [2], period = [1] }\n", None).unwrap();
        assert_eq!(spec.numeration.unwrap().system.value_u64(4), Some(55));
    }

    #[test]
    fn validation_errors_name_the_field() {
        let cases = [
            ("[system]\npreset = \"base2\"\ngreedy = [1, 1]\n", "system"),
            ("[system]\nbeta = { preperiod = [0], period = [1] }\n", "system.beta"),
            (
                "[morphism]\nalphabet = [\"a\"]\nimages = { a = \"ab\" }\nseed = \"a\"\n",
                "morphism.images.a",
            ),
            ("[automaton]\ntable = \"\"\n", "automaton"),
            ("[sequence]\npreset = \"nope\"\n", "sequence"),
        ];
        for (text, field) in cases {
            let msg = parse_spec(text, None).unwrap_err().to_string();
            assert!(msg.contains(&format!("`{field}`")), "{msg}");
        }
        let msg = parse_spec("[sequence]\npreset = 3\n", None).unwrap_err().to_string();
        assert!(msg.contains("line 2"), "{msg}");
        assert!(parse_spec(
            "[sequence]\npreset = \"thue_morse\"\n[morphism]\nalphabet=[]\nimages={}\nseed=\"a\"\n",
            None
        )
        .is_err());
        assert!(parse_spec("[extra]\n", None).is_err());
    }

    #[test]
    fn prefix_files_round_trip() {
        let p = crate::source::sequence_preset("thue_morse")
            .unwrap()
            .generate(20)
            .unwrap();
        let text = write_prefix(&p).unwrap();
        assert_eq!(text, "#seqlab v1 alphabet=01\n01101001100101101001\n");
        let back = read_prefix(&text).unwrap();
        assert_eq!(back.symbols(), p.symbols());
        assert!(read_prefix("#seqlab v1 alphabet=01\n0120\n")
            .unwrap_err()
            .to_string()
            .contains("column 3"));
        assert!(read_prefix("0101\n").is_err());
        let ab = read_prefix("#seqlab v1 alphabet=ab\nabba\n").unwrap();
        assert_eq!(ab.symbols(), &[0, 1, 1, 0]);
    }
}
