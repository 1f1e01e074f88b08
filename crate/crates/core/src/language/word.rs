use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite word `w_1 ⋯ w_n` over `{0, …, b−1}`. Membership in the language
/// is a separate question; a `Word` only promises its letters are integers.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn new(letters: Vec<u32>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// `0^n`.
    pub fn zeros(n: usize) -> Self {
        Word(vec![0; n])
    }

    /// Accepts `0,1,0`, `0 1 0`, `010` (one letter per character), and `ε`
    /// or the empty string for the empty word.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.is_empty() || t == "ε" || t.eq_ignore_ascii_case("eps") {
            return Ok(Word::empty());
        }
        let bad = |tok: &str| Error::Parse(format!("bad letter '{tok}' in word '{t}'"));
        let letters = if t.contains(',') || t.contains(char::is_whitespace) {
            t.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<u32>().map_err(|_| bad(s)))
                .collect::<Result<Vec<_>>>()?
        } else {
            t.chars()
                .map(|ch| ch.to_digit(10).ok_or_else(|| bad(&ch.to_string())))
                .collect::<Result<Vec<_>>>()?
        };
        Ok(Word(letters))
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<u32> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, a: u32) {
        self.0.push(a);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }

    /// Number of trailing letters equal to 0.
    pub fn trailing_zeros(&self) -> usize {
        self.0.iter().rev().take_while(|&&a| a == 0).count()
    }
}

impl From<Vec<u32>> for Word {
    fn from(v: Vec<u32>) -> Self {
        Word(v)
    }
}

impl From<&[u32]> for Word {
    fn from(v: &[u32]) -> Self {
        Word(v.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        let sep = if self.0.iter().any(|&a| a >= 10) { "," } else { "" };
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "{}", parts.join(sep))
    }
}
