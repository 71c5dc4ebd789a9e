//! Parry–Bertrand numeration systems, automatic and morphic sequences, and
//! exact pseudorandomness measures on their prefixes.

pub mod automata;
pub mod beta;
pub mod error;
pub mod files;
pub mod measures;
pub mod morphic;
pub mod numeration;
pub mod report;
pub mod source;
pub mod witness;

pub use error::{Error, Result};

/// A digit of a positional numeration system.
pub type Digit = u32;
/// A letter of an automaton or morphism alphabet, as an index into the
/// ordered alphabet.
pub type Letter = u32;
