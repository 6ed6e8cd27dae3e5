//! Freely reduced words over a ranked alphabet `x_1, …, x_n`.
//!
//! Text syntax: lowercase `a`..`z` are `x_1`..`x_26`, uppercase letters are
//! their inverses, and `x<k>` / `X<k>` address any generator by index.
//! Whitespace between tokens is ignored and the empty string is the
//! identity. For alphabets of rank at most 3 the letters `x`, `y`, `z`
//! (and `X`, `Y`, `Z`) are also accepted as names for `x_1`, `x_2`, `x_3`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{same_rank, Error, Result};

/// Rank of the ambient free group `F_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Alphabet(usize);

impl Alphabet {
    pub fn new(rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidInput(
                "alphabet rank must be at least 1".into(),
            ));
        }
        if rank > u16::MAX as usize {
            return Err(Error::InvalidInput(format!(
                "alphabet rank {rank} is too large"
            )));
        }
        Ok(Alphabet(rank))
    }

    pub fn rank(self) -> usize {
        self.0
    }

    /// The generators `x_1, …, x_n` as words.
    pub fn generators(self) -> Vec<Word> {
        (1..=self.0).map(|g| Word::generator(self, g)).collect()
    }
}

impl TryFrom<usize> for Alphabet {
    type Error = Error;
    fn try_from(rank: usize) -> Result<Self> {
        Alphabet::new(rank)
    }
}

impl From<Alphabet> for usize {
    fn from(a: Alphabet) -> usize {
        a.0
    }
}

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    gen: u16,
    inverse: bool,
}

impl Letter {
    /// `x_gen`; panics on index 0.
    pub fn pos(gen: usize) -> Letter {
        assert!(
            gen >= 1 && gen <= u16::MAX as usize,
            "generator index {gen}"
        );
        Letter {
            gen: gen as u16,
            inverse: false,
        }
    }

    /// `x_gen^-1`.
    pub fn neg(gen: usize) -> Letter {
        Letter {
            inverse: true,
            ..Letter::pos(gen)
        }
    }

    pub fn new(gen: usize, sign: i8) -> Letter {
        if sign < 0 {
            Letter::neg(gen)
        } else {
            Letter::pos(gen)
        }
    }

    pub fn gen(self) -> usize {
        self.gen as usize
    }

    pub fn is_inverse(self) -> bool {
        self.inverse
    }

    pub fn sign(self) -> i8 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inverse(self) -> Letter {
        Letter {
            gen: self.gen,
            inverse: !self.inverse,
        }
    }

    /// Column of this letter in a `2n`-slot transition table: `(g,+)`, `(g,-)`, …
    pub(crate) fn slot(self) -> usize {
        2 * (self.gen as usize - 1) + self.inverse as usize
    }
}

/// Free reduction of a raw letter sequence.
pub fn free_reduce(raw: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(raw.len());
    for &l in raw {
        push_reduced(&mut out, l);
    }
    out
}

fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&l.inverse()) {
        out.pop();
    } else {
        out.push(l);
    }
}

/// A freely reduced word: an element of `F_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    alphabet: Alphabet,
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity(alphabet: Alphabet) -> Word {
        Word {
            alphabet,
            letters: Vec::new(),
        }
    }

    pub fn generator(alphabet: Alphabet, gen: usize) -> Word {
        assert!(
            gen >= 1 && gen <= alphabet.rank(),
            "generator {gen} outside alphabet"
        );
        Word {
            alphabet,
            letters: vec![Letter::pos(gen)],
        }
    }

    /// Reduces `letters`, rejecting generators outside the alphabet.
    pub fn new(alphabet: Alphabet, letters: &[Letter]) -> Result<Word> {
        if let Some(bad) = letters.iter().find(|l| l.gen() > alphabet.rank()) {
            return Err(Error::UnknownGenerator {
                token: format!("x{}", bad.gen()),
                rank: alphabet.rank(),
            });
        }
        Ok(Word {
            alphabet,
            letters: free_reduce(letters),
        })
    }

    pub fn parse(text: &str, alphabet: Alphabet) -> Result<Word> {
        let n = alphabet.rank();
        let unknown = |token: String| Error::UnknownGenerator { token, rank: n };
        let chars: Vec<char> = text.chars().collect();
        let mut raw = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if !c.is_ascii_alphabetic() {
                return Err(Error::Syntax(format!(
                    "unexpected character `{c}` at offset {i}"
                )));
            }
            let inverse = c.is_ascii_uppercase();
            let lower = c.to_ascii_lowercase();
            if lower == 'x' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                let start = i;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let token: String = chars[start..i].iter().collect();
                let gen: usize = token[1..].parse().map_err(|_| unknown(token.clone()))?;
                if gen == 0 || gen > n {
                    return Err(unknown(token));
                }
                raw.push(Letter::new(gen, if inverse { -1 } else { 1 }));
                continue;
            }
            let gen = match lower {
                'x' | 'y' | 'z' if n <= 3 => (lower as u8 - b'x') as usize + 1,
                _ => (lower as u8 - b'a') as usize + 1,
            };
            if gen > n {
                return Err(unknown(c.to_string()));
            }
            raw.push(Letter::new(gen, if inverse { -1 } else { 1 }));
            i += 1;
        }
        Ok(Word {
            alphabet,
            letters: free_reduce(&raw),
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn multiply(&self, other: &Word) -> Result<Word> {
        same_rank(self.alphabet.rank(), other.alphabet.rank())?;
        Ok(self.mul_same(other))
    }

    /// Product of two words already known to share an alphabet.
    pub(crate) fn mul_same(&self, other: &Word) -> Word {
        debug_assert_eq!(self.alphabet, other.alphabet);
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut letters, l);
        }
        Word {
            alphabet: self.alphabet,
            letters,
        }
    }

    pub fn inverse(&self) -> Word {
        Word {
            alphabet: self.alphabet,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// `self^k` for any integer `k`.
    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity(self.alphabet);
        for _ in 0..k.unsigned_abs() {
            out = out.mul_same(&base);
        }
        out
    }

    /// Splits the word as `conjugator · core · conjugator⁻¹` with `core`
    /// cyclically reduced.
    pub fn cyclically_reduce(&self) -> (Word, Word) {
        let l = &self.letters;
        let mut k = 0;
        while 2 * k + 1 < l.len() && l[k] == l[l.len() - 1 - k].inverse() {
            k += 1;
        }
        let conjugator = Word {
            alphabet: self.alphabet,
            letters: l[..k].to_vec(),
        };
        let core = Word {
            alphabet: self.alphabet,
            letters: l[k..l.len() - k].to_vec(),
        };
        (core, conjugator)
    }

    /// Largest generator index occurring in the word, 0 for the identity.
    /// The word lies in `F_i = ⟨x_1, …, x_i⟩` iff this is at most `i`.
    pub fn max_generator(&self) -> usize {
        self.letters.iter().map(|l| l.gen()).max().unwrap_or(0)
    }

    /// Smallest generator index occurring in the word, 0 for the identity.
    pub fn min_generator(&self) -> usize {
        self.letters.iter().map(|l| l.gen()).min().unwrap_or(0)
    }

    /// Same letters over a larger alphabet.
    pub fn widen(&self, alphabet: Alphabet) -> Result<Word> {
        Word::new(alphabet, &self.letters)
    }
}

impl fmt::Display for Word {
    /// Writes the word in the parse syntax; the identity is the empty string.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let indexed = self.alphabet.rank() > 26;
        for (i, l) in self.letters.iter().enumerate() {
            if indexed {
                if i > 0 {
                    f.write_str(" ")?;
                }
                let x = if l.is_inverse() { 'X' } else { 'x' };
                write!(f, "{x}{}", l.gen())?;
            } else {
                let c = (b'a' + (l.gen() - 1) as u8) as char;
                let c = if l.is_inverse() {
                    c.to_ascii_uppercase()
                } else {
                    c
                };
                write!(f, "{c}")?;
            }
        }
        Ok(())
    }
}

/// Parses a comma-separated word list such as `"y,x,z"`.
pub fn parse_word_list(text: &str, alphabet: Alphabet) -> Result<Vec<Word>> {
    text.split(',')
        .map(|part| Word::parse(part, alphabet))
        .collect()
}
