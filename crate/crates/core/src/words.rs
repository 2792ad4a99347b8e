//! Free-monoid combinatorics.
//!
//! Words over the letters `1..=d` index every moment table and every matrix in
//! the crate. A [`WordIndex`] enumerates all words of length at most `N` in
//! graded lexicographic order, so that the degree-`N-1` block of any
//! word-indexed matrix is its leading principal submatrix.
//!
//! The only algebra needed on words is the reduction of `L^{α*} L^β` under
//! the row-isometry relation `L_k^* L_j = δ_{kj} I`, see [`reduce`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A word in the free monoid on `d` letters. Letters are stored 1-based.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<u8>);

impl Word {
    /// The unit word ∅.
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<u8>) -> Self {
        Word(letters)
    }

    /// Checked constructor: every letter must lie in `1..=d`.
    pub fn with_alphabet(letters: Vec<u8>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::EmptyAlphabet);
        }
        if let Some(&letter) = letters.iter().find(|&&l| l == 0 || l as usize > d) {
            return Err(Error::LetterOutOfRange { letter, d });
        }
        Ok(Word(letters))
    }

    /// `z^n` in one variable.
    pub fn power(n: usize) -> Self {
        Word(vec![1; n])
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// `kα`.
    pub fn prepend(&self, letter: u8) -> Word {
        let mut letters = Vec::with_capacity(self.len() + 1);
        letters.push(letter);
        letters.extend_from_slice(&self.0);
        Word(letters)
    }

    /// The transpose `α^t` (letters reversed).
    pub fn transpose(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn starts_with(&self, prefix: &Word) -> bool {
        self.0.starts_with(&prefix.0)
    }

    pub fn max_letter(&self) -> u8 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("∅");
        }
        f.write_str("(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str(")")
    }
}

impl From<&[u8]> for Word {
    fn from(letters: &[u8]) -> Self {
        Word(letters.to_vec())
    }
}

/// Result of reducing `L^{α*} L^β`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Reduction {
    Zero,
    /// `L^γ` with `β = αγ`.
    Right(Word),
    /// `L^{γ*}` with `α = βγ`.
    Left(Word),
}

impl Reduction {
    /// Swap `Right` and `Left`, keeping `Right(∅)` canonical.
    pub fn mirror(self) -> Reduction {
        match self {
            Reduction::Zero => Reduction::Zero,
            Reduction::Right(g) if g.is_empty() => Reduction::Right(g),
            Reduction::Right(g) => Reduction::Left(g),
            Reduction::Left(g) => Reduction::Right(g),
        }
    }
}

/// Reduce `L^{α*} L^β` using `L_k^* L_j = δ_{kj} I`.
pub fn reduce(alpha: &Word, beta: &Word) -> Reduction {
    if beta.starts_with(alpha) {
        Reduction::Right(Word(beta.0[alpha.len()..].to_vec()))
    } else if alpha.starts_with(beta) {
        Reduction::Left(Word(alpha.0[beta.len()..].to_vec()))
    } else {
        Reduction::Zero
    }
}

/// Reduction expressed through positions in a [`WordIndex`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexReduction {
    Zero,
    Right(usize),
    Left(usize),
}

/// Graded lexicographic enumeration of all words of length `<= degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordIndex {
    d: usize,
    degree: usize,
    /// `offsets[k]` = number of words of length `< k`, for `k = 0..=degree+1`.
    offsets: Vec<usize>,
    /// `powers[k] = d^k`.
    powers: Vec<usize>,
}

impl WordIndex {
    pub fn new(d: usize, degree: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::EmptyAlphabet);
        }
        let mut powers = Vec::with_capacity(degree + 1);
        let mut offsets = Vec::with_capacity(degree + 2);
        let mut p = 1usize;
        let mut off = 0usize;
        for _ in 0..=degree {
            powers.push(p);
            offsets.push(off);
            off = off.checked_add(p).ok_or_else(|| {
                Error::InvalidLadder(format!("word count overflows at degree {degree}"))
            })?;
            p = p.saturating_mul(d);
        }
        offsets.push(off);
        Ok(WordIndex {
            d,
            degree,
            offsets,
            powers,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of words of length `<= degree`.
    pub fn len(&self) -> usize {
        self.offsets[self.degree + 1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of words of length `< k`.
    pub fn count_below(&self, k: usize) -> usize {
        self.offsets[k.min(self.degree + 1)]
    }

    pub fn length_of(&self, index: usize) -> usize {
        // offsets is strictly increasing
        self.offsets.partition_point(|&o| o <= index) - 1
    }

    fn rank_of(&self, index: usize) -> (usize, usize) {
        let len = self.length_of(index);
        (len, index - self.offsets[len])
    }

    pub fn index_of(&self, word: &Word) -> Option<usize> {
        if word.len() > self.degree {
            return None;
        }
        let mut rank = 0usize;
        for &l in word.letters() {
            if l == 0 || l as usize > self.d {
                return None;
            }
            rank = rank * self.d + (l as usize - 1);
        }
        Some(self.offsets[word.len()] + rank)
    }

    pub fn word(&self, index: usize) -> Word {
        let (len, mut rank) = self.rank_of(index);
        let mut letters = vec![0u8; len];
        for slot in letters.iter_mut().rev() {
            *slot = (rank % self.d) as u8 + 1;
            rank /= self.d;
        }
        Word(letters)
    }

    pub fn words(&self) -> impl Iterator<Item = Word> + '_ {
        (0..self.len()).map(move |i| self.word(i))
    }

    /// Index of `kα`, if it still has length `<= degree`.
    pub fn prepend(&self, letter: usize, index: usize) -> Option<usize> {
        let (len, rank) = self.rank_of(index);
        if len >= self.degree || letter == 0 || letter > self.d {
            return None;
        }
        Some(self.offsets[len + 1] + (letter - 1) * self.powers[len] + rank)
    }

    /// Reduction of `L^{α*}L^β` with all words addressed by index.
    pub fn reduce(&self, alpha: usize, beta: usize) -> IndexReduction {
        let (la, ra) = self.rank_of(alpha);
        let (lb, rb) = self.rank_of(beta);
        if la <= lb {
            let shift = self.powers[lb - la];
            if rb / shift == ra {
                return IndexReduction::Right(self.offsets[lb - la] + rb % shift);
            }
        } else {
            let shift = self.powers[la - lb];
            if ra / shift == rb {
                return IndexReduction::Left(self.offsets[la - lb] + ra % shift);
            }
        }
        IndexReduction::Zero
    }
}

/// Convenience wrapper mirroring the free function form used in the docs.
pub fn enumerate(d: usize, degree: usize) -> Result<WordIndex> {
    WordIndex::new(d, degree)
}
