//! Finite words over a numbered alphabet and their letter counts.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Deref};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Index of a letter in the alphabet of the enclosing shift.
pub type Symbol = u32;

/// A finite, possibly empty, string of symbols. Admissibility is not
/// intrinsic; it is always checked against a particular shift.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Symbol> {
        self.0
    }

    pub fn push(&mut self, s: Symbol) {
        self.0.push(s);
    }

    pub fn concat(&self, other: &[Symbol]) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(other);
        Word(v)
    }

    /// Fails if any symbol is `>= alphabet`.
    pub fn check_alphabet(&self, alphabet: usize) -> Result<()> {
        match self.0.iter().find(|&&s| s as usize >= alphabet) {
            Some(&symbol) => Err(Error::SymbolOutOfRange { symbol, alphabet }),
            None => Ok(()),
        }
    }
}

impl Deref for Word {
    type Target = [Symbol];
    fn deref(&self) -> &[Symbol] {
        &self.0
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

impl From<&[Symbol]> for Word {
    fn from(v: &[Symbol]) -> Self {
        Word(v.to_vec())
    }
}

impl<const N: usize> From<[Symbol; N]> for Word {
    fn from(v: [Symbol; N]) -> Self {
        Word(v.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Comma-separated symbol list; the empty string is the empty word.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Word::empty());
        }
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<Symbol>()
                    .map_err(|_| Error::Parse(format!("bad symbol {t:?} in word")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

/// Letter counts of a word: a finitely supported map symbol → count.
/// Zero counts are never stored, so structural equality is value equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CountVector(BTreeMap<Symbol, u64>);

impl CountVector {
    pub fn zero() -> Self {
        CountVector(BTreeMap::new())
    }

    pub fn get(&self, s: Symbol) -> u64 {
        self.0.get(&s).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn add_symbol(&mut self, s: Symbol) {
        *self.0.entry(s).or_insert(0) += 1;
    }

    pub fn iter(&self) -> impl Iterator<Item = (Symbol, u64)> + '_ {
        self.0.iter().map(|(&s, &c)| (s, c))
    }

    /// Counts over `alphabet` with `reference` dropped, as used for the
    /// reduced group that omits one letter.
    pub fn reduced(&self, alphabet: usize, reference: Symbol) -> Vec<u64> {
        (0..alphabet as Symbol)
            .filter(|&s| s != reference)
            .map(|s| self.get(s))
            .collect()
    }
}

impl Add for &CountVector {
    type Output = CountVector;
    fn add(self, rhs: &CountVector) -> CountVector {
        let mut out = self.clone();
        for (s, c) in rhs.iter() {
            *out.0.entry(s).or_insert(0) += c;
        }
        out
    }
}

impl FromIterator<(Symbol, u64)> for CountVector {
    fn from_iter<I: IntoIterator<Item = (Symbol, u64)>>(iter: I) -> Self {
        CountVector(iter.into_iter().filter(|&(_, c)| c > 0).collect())
    }
}

/// Letter counts of `w`.
pub fn count_vector(w: &[Symbol]) -> CountVector {
    let mut cv = CountVector::zero();
    for &s in w {
        cv.add_symbol(s);
    }
    cv
}
