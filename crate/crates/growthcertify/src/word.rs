//! Freely reduced words in a free group `F_n`.
//!
//! Every [`Word`] is kept freely reduced at all times, so equality of group
//! elements is plain sequence equality.  The text format uses lowercase
//! letters for generators and uppercase for inverses (`abA` = `a b a^-1`);
//! ranks above 26 fall back to 1-based indexed tokens `x27` / `X27`.

use std::fmt;

use thiserror::Error;

/// Largest rank representable with single-character tokens.
pub const NAMED_ALPHABET: usize = 26;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("unknown generator `{token}` for rank {rank}")]
    UnknownGenerator { token: String, rank: usize },
    #[error("malformed token `{0}`")]
    MalformedToken(String),
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("the identity word has no primitive root")]
    IdentityHasNoRoot,
}

/// A single generator or inverse-generator symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub index: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(index: usize, inverse: bool) -> Self {
        Letter { index, inverse }
    }

    pub fn inverted(self) -> Self {
        Letter { index: self.index, inverse: !self.inverse }
    }

    fn cancels(self, other: Letter) -> bool {
        self.index == other.index && self.inverse != other.inverse
    }
}

/// A freely reduced word in the free group of the given rank.
///
/// The empty sequence represents the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    rank: usize,
    letters: Vec<Letter>,
}

fn reduce(letters: impl IntoIterator<Item = Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        match out.last() {
            Some(&t) if t.cancels(l) => {
                out.pop();
            }
            _ => out.push(l),
        }
    }
    out
}

impl Word {
    pub fn identity(rank: usize) -> Self {
        Word { rank, letters: Vec::new() }
    }

    pub fn generator(rank: usize, index: usize) -> Self {
        assert!(index < rank, "generator index {index} out of range for rank {rank}");
        Word { rank, letters: vec![Letter::new(index, false)] }
    }

    /// Builds a word from an arbitrary letter sequence, freely reducing it.
    ///
    /// Panics if a letter index is out of range; use [`Word::parse`] for
    /// untrusted input.
    pub fn from_letters(rank: usize, letters: impl IntoIterator<Item = Letter>) -> Self {
        let letters = reduce(letters);
        for l in &letters {
            assert!(l.index < rank, "letter index {} out of range for rank {rank}", l.index);
        }
        Word { rank, letters }
    }

    /// Parses the text word format.
    ///
    /// Whitespace-separated tokens; each token is either a run of letters
    /// (`abA`), an indexed generator `x3` / `X3` (1-based), or either of
    /// those with an integer exponent (`a^-1`, `x3^2`).
    pub fn parse(text: &str, rank: usize) -> Result<Self, WordError> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            let (base, exp) = match token.split_once('^') {
                Some((b, e)) => {
                    let exp: i64 = e
                        .parse()
                        .map_err(|_| WordError::MalformedToken(token.to_string()))?;
                    (b, exp)
                }
                None => (token, 1),
            };
            let base_letters = Self::parse_base(base, rank, token)?;
            let (seq, times): (Vec<Letter>, u64) = if exp >= 0 {
                (base_letters, exp as u64)
            } else {
                (
                    base_letters.iter().rev().map(|l| l.inverted()).collect(),
                    exp.unsigned_abs(),
                )
            };
            for _ in 0..times {
                letters.extend_from_slice(&seq);
            }
        }
        Ok(Word { rank, letters: reduce(letters) })
    }

    fn parse_base(base: &str, rank: usize, token: &str) -> Result<Vec<Letter>, WordError> {
        if base.is_empty() {
            return Err(WordError::MalformedToken(token.to_string()));
        }
        // Indexed form: x12 / X12, 1-based.
        if base.len() > 1
            && (base.starts_with('x') || base.starts_with('X'))
            && base[1..].bytes().all(|b| b.is_ascii_digit())
        {
            let n: usize = base[1..]
                .parse()
                .map_err(|_| WordError::MalformedToken(token.to_string()))?;
            if n == 0 {
                return Err(WordError::MalformedToken(token.to_string()));
            }
            if n > rank {
                return Err(WordError::UnknownGenerator { token: base.to_string(), rank });
            }
            return Ok(vec![Letter::new(n - 1, base.starts_with('X'))]);
        }
        let mut letters = Vec::with_capacity(base.len());
        for c in base.chars() {
            let (index, inverse) = match c {
                'a'..='z' => (c as usize - 'a' as usize, false),
                'A'..='Z' => (c as usize - 'A' as usize, true),
                _ => return Err(WordError::MalformedToken(token.to_string())),
            };
            if index >= rank {
                return Err(WordError::UnknownGenerator { token: c.to_string(), rank });
            }
            letters.push(Letter::new(index, inverse));
        }
        Ok(letters)
    }

    pub fn rank(&self) -> usize {
        self.rank
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

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    fn check_rank(&self, other: &Word) -> Result<(), WordError> {
        if self.rank != other.rank {
            return Err(WordError::RankMismatch(self.rank, other.rank));
        }
        Ok(())
    }

    /// Freely reduced concatenation.
    pub fn multiply(&self, other: &Word) -> Result<Word, WordError> {
        self.check_rank(other)?;
        Ok(Word {
            rank: self.rank,
            letters: reduce(self.letters.iter().chain(other.letters.iter()).copied()),
        })
    }

    pub fn invert(&self) -> Word {
        Word {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inverted()).collect(),
        }
    }

    /// Returns `g · self · g^-1`.
    pub fn conjugated_by(&self, g: &Word) -> Result<Word, WordError> {
        g.multiply(self)?.multiply(&g.invert())
    }

    /// Returns `self · other · self^-1 · other^-1`.
    pub fn commutator(&self, other: &Word) -> Result<Word, WordError> {
        self.multiply(other)?
            .multiply(&self.invert())?
            .multiply(&other.invert())
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n >= 0 { self.clone() } else { self.invert() };
        let mut out = Word::identity(self.rank);
        for _ in 0..n.unsigned_abs() {
            out = out.multiply(&base).expect("same rank");
        }
        out
    }

    /// Splits `self = c · core · c^-1` with `core` cyclically reduced.
    pub fn cyclic_reduction(&self) -> (Word, Word) {
        let mut letters = self.letters.clone();
        let mut conj = Vec::new();
        while letters.len() >= 2 && letters[0].cancels(*letters.last().unwrap()) {
            conj.push(letters.remove(0));
            letters.pop();
        }
        (
            Word { rank: self.rank, letters: conj },
            Word { rank: self.rank, letters },
        )
    }

    /// Maximal-exponent decomposition `self = c · root^e · c^-1` where `root`
    /// is cyclically reduced and not a proper power.
    pub fn primitive_root(&self) -> Result<RootDecomposition, WordError> {
        if self.is_identity() {
            return Err(WordError::IdentityHasNoRoot);
        }
        let (conjugator, core) = self.cyclic_reduction();
        let n = core.len();
        for period in 1..=n {
            if n % period != 0 {
                continue;
            }
            if (period..n).all(|i| core.letters[i] == core.letters[i - period]) {
                let root = Word {
                    rank: self.rank,
                    letters: core.letters[..period].to_vec(),
                };
                return Ok(RootDecomposition {
                    root,
                    exponent: (n / period) as u32,
                    conjugator,
                });
            }
        }
        unreachable!("period n always matches")
    }

    /// True iff the commutator `[self, other]` is trivial.
    pub fn commutes(&self, other: &Word) -> Result<bool, WordError> {
        Ok(self.commutator(other)?.is_identity())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rank <= NAMED_ALPHABET {
            for l in &self.letters {
                let base = if l.inverse { b'A' } else { b'a' };
                write!(f, "{}", (base + l.index as u8) as char)?;
            }
        } else {
            for (i, l) in self.letters.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                let x = if l.inverse { 'X' } else { 'x' };
                write!(f, "{}{}", x, l.index + 1)?;
            }
        }
        Ok(())
    }
}

/// Result of [`Word::primitive_root`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootDecomposition {
    pub root: Word,
    pub exponent: u32,
    pub conjugator: Word,
}

impl RootDecomposition {
    /// Reassembles `conjugator · root^exponent · conjugator^-1`.
    pub fn original(&self) -> Word {
        self.root
            .pow(self.exponent as i64)
            .conjugated_by(&self.conjugator)
            .expect("same rank")
    }
}
