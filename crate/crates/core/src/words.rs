//! Letters and words over the infinite alphabet `{ x_i, x_i^{-1} : i >= 0 }`,
//! free-group plumbing, and the small word statistics used by the builders.

use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Largest admissible generator subscript. Builders stay far below this; the
/// bound exists so subscript arithmetic can use plain `u32`s safely.
pub const MAX_INDEX: u32 = 1 << 31;

/// A single signed generator `x_i` or `x_i^{-1}`, packed into one word.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(u32);

impl Letter {
    pub fn new(index: u32, sign: i8) -> Letter {
        assert!(index < MAX_INDEX, "generator subscript out of range");
        match sign {
            1 => Letter(index << 1),
            -1 => Letter((index << 1) | 1),
            _ => panic!("letter sign must be +1 or -1"),
        }
    }

    pub fn pos(index: u32) -> Letter {
        Letter::new(index, 1)
    }

    pub fn neg(index: u32) -> Letter {
        Letter::new(index, -1)
    }

    pub fn index(self) -> u32 {
        self.0 >> 1
    }

    pub fn sign(self) -> i8 {
        if self.0 & 1 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    pub fn shifted(self, k: u32) -> Letter {
        Letter::new(self.index() + k, self.sign())
    }

    /// True when the two letters cancel in the free group.
    pub fn cancels(self, other: Letter) -> bool {
        self.0 ^ other.0 == 1
    }

    /// Position in the order `x_0 < x_1 < ... < x_n < ... < x_n^{-1} < ... < x_0^{-1}`.
    pub(crate) fn order_key(self) -> u64 {
        if self.is_positive() {
            self.index() as u64
        } else {
            (1u64 << 33) + (u32::MAX - self.index()) as u64
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "x{}", self.index())
        } else {
            write!(f, "x{}^-1", self.index())
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A word over the alphabet, possibly unreduced. Words are immutable values;
/// every operation returns a new word.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Word {
        Word::default()
    }

    pub fn one(l: Letter) -> Word {
        Word { letters: vec![l] }
    }

    pub fn from_letters(letters: Vec<Letter>) -> Word {
        Word { letters }
    }

    /// `x_index^e` as a word of `|e|` letters.
    pub fn power(index: u32, e: i64) -> Word {
        let letter = if e >= 0 {
            Letter::pos(index)
        } else {
            Letter::neg(index)
        };
        Word {
            letters: vec![letter; e.unsigned_abs() as usize],
        }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn push(&mut self, l: Letter) {
        self.letters.push(l);
    }

    pub fn concat(parts: &[&Word]) -> Word {
        let mut letters = Vec::with_capacity(parts.iter().map(|w| w.len()).sum());
        for w in parts {
            letters.extend_from_slice(&w.letters);
        }
        Word { letters }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// The shift `psi^k`: every subscript increased by `k`.
    pub fn shift(&self, k: u32) -> Word {
        Word {
            letters: self.letters.iter().map(|l| l.shifted(k)).collect(),
        }
    }

    /// Shift down by `k`; panics if some subscript is smaller than `k`.
    pub fn unshift(&self, k: u32) -> Word {
        Word {
            letters: self
                .letters
                .iter()
                .map(|l| {
                    assert!(l.index() >= k, "unshift below subscript zero");
                    Letter::new(l.index() - k, l.sign())
                })
                .collect(),
        }
    }

    /// Maximal subscript occurring in the word; 0 for the empty word.
    pub fn mu(&self) -> u32 {
        self.letters.iter().map(|l| l.index()).max().unwrap_or(0)
    }

    pub fn min_index(&self) -> Option<u32> {
        self.letters.iter().map(|l| l.index()).min()
    }

    /// The unique freely reduced word equal to this one in the free group.
    pub fn freely_reduced(&self) -> Word {
        let mut stack: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            match stack.last() {
                Some(&top) if top.cancels(l) => {
                    stack.pop();
                }
                _ => stack.push(l),
            }
        }
        Word { letters: stack }
    }

    pub fn is_freely_trivial(&self) -> bool {
        self.freely_reduced().is_empty()
    }

    /// Free equality: both sides reduce to the same word.
    pub fn freely_equal(&self, other: &Word) -> bool {
        self.freely_reduced() == other.freely_reduced()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseWordError {
    #[error("bad token {0:?}: expected xN or xN^-1")]
    BadToken(String),
    #[error("subscript out of range in token {0:?}")]
    Subscript(String),
}

impl FromStr for Word {
    type Err = ParseWordError;

    /// Grammar: `word := "1" | token (" " token)*` with `token := "x" DIGITS ["^-1"]`.
    /// An empty string is also accepted and denotes the empty word.
    fn from_str(s: &str) -> Result<Word, ParseWordError> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let (body, sign) = match tok.strip_suffix("^-1") {
                Some(b) => (b, -1),
                None => (tok, 1),
            };
            let digits = body
                .strip_prefix('x')
                .ok_or_else(|| ParseWordError::BadToken(tok.to_string()))?;
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(ParseWordError::BadToken(tok.to_string()));
            }
            let index: u32 = digits
                .parse()
                .map_err(|_| ParseWordError::Subscript(tok.to_string()))?;
            if index >= MAX_INDEX {
                return Err(ParseWordError::Subscript(tok.to_string()));
            }
            letters.push(Letter::new(index, sign));
        }
        Ok(Word { letters })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("not a monotone positive word: {0}")]
pub struct NotMpWord(pub Word);

/// Monotone positive word: all signs `+1`, subscripts non-decreasing.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MpWord {
    indices: Vec<u32>,
}

impl MpWord {
    pub fn empty() -> MpWord {
        MpWord::default()
    }

    pub fn from_indices(indices: Vec<u32>) -> Result<MpWord, NotMpWord> {
        if indices.windows(2).all(|w| w[0] <= w[1]) && indices.iter().all(|&i| i < MAX_INDEX) {
            Ok(MpWord { indices })
        } else {
            Err(NotMpWord(Word::from_letters(
                indices.into_iter().map(Letter::pos).collect(),
            )))
        }
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn first(&self) -> Option<u32> {
        self.indices.first().copied()
    }

    pub fn last(&self) -> Option<u32> {
        self.indices.last().copied()
    }

    pub fn word(&self) -> Word {
        Word::from_letters(self.indices.iter().map(|&i| Letter::pos(i)).collect())
    }

    pub fn shift(&self, k: u32) -> MpWord {
        MpWord {
            indices: self.indices.iter().map(|&i| i + k).collect(),
        }
    }

    pub fn unshift(&self, k: u32) -> MpWord {
        MpWord {
            indices: self
                .indices
                .iter()
                .map(|&i| {
                    assert!(i >= k, "unshift below subscript zero");
                    i - k
                })
                .collect(),
        }
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> MpWord {
        MpWord {
            indices: self.indices[range].to_vec(),
        }
    }

    /// Size `||w||`: length plus the spread between greatest and smallest
    /// subscript; zero for the empty word.
    pub fn size(&self) -> u64 {
        match (self.first(), self.last()) {
            (Some(a), Some(b)) => self.indices.len() as u64 + (b - a) as u64,
            _ => 0,
        }
    }

    pub fn mu(&self) -> u32 {
        self.last().unwrap_or(0)
    }
}

impl TryFrom<Word> for MpWord {
    type Error = NotMpWord;

    fn try_from(w: Word) -> Result<MpWord, NotMpWord> {
        if !w.letters().iter().all(|l| l.is_positive()) {
            return Err(NotMpWord(w));
        }
        let indices: Vec<u32> = w.letters().iter().map(|l| l.index()).collect();
        MpWord::from_indices(indices).map_err(|_| NotMpWord(w))
    }
}

impl fmt::Display for MpWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.word(), f)
    }
}

impl fmt::Debug for MpWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Successful conjugation test: for every `s` with `0 <= s < |p|` the
/// inequality `j_1 + s > i_{s+1}` must hold, where `j_1` is the first
/// subscript of `q` and `i_{s+1}` the `(s+1)`-th subscript of `p`.
///
/// Vacuously true for empty `p`; false for empty `q` with non-empty `p`
/// (no first subscript exists).
pub fn successful(q: &MpWord, p: &MpWord) -> bool {
    if p.is_empty() {
        return true;
    }
    let Some(j1) = q.first() else {
        return false;
    };
    p.indices()
        .iter()
        .enumerate()
        .all(|(s, &i)| j1 as u64 + s as u64 > i as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn mp(s: &str) -> MpWord {
        MpWord::try_from(w(s)).unwrap()
    }

    #[test]
    fn free_reduce_examples() {
        assert_eq!(w("x0 x0^-1").freely_reduced(), Word::empty());
        assert_eq!(Word::empty().freely_reduced(), Word::empty());
        // hand reduction: x1 x2 x2^-1 x1 -> x1 x1
        assert_eq!(w("x1 x2 x2^-1 x1").freely_reduced(), w("x1 x1"));
    }

    #[test]
    fn free_reduce_is_idempotent_and_kills_ww_inverse() {
        let v = w("x0 x1^-1 x1 x3 x2^-1");
        let r = v.freely_reduced();
        assert_eq!(r.freely_reduced(), r);
        assert!(r.len() <= v.len());
        let vv = Word::concat(&[&v, &v.inverse()]);
        assert!(vv.is_freely_trivial());
    }

    #[test]
    fn shift_examples() {
        assert_eq!(w("x0 x1^-1").shift(2), w("x2 x3^-1"));
        let v = w("x1 x5");
        assert_eq!(v.shift(0), v);
        assert_eq!(v.shift(1), w("x2 x6"));
        assert_eq!(v.shift(2).shift(3), v.shift(5));
    }

    #[test]
    fn mu_examples() {
        assert_eq!(Word::empty().mu(), 0);
        assert_eq!(w("x1 x5 x6 x8 x13").mu(), 13);
        assert_eq!(w("x0^-1").mu(), 0);
        assert_eq!(w("x2 x7").shift(3).mu(), 10);
    }

    #[test]
    fn size_examples() {
        // §3 example word: ||r|| = |r| + 13 - 1 = 23
        let r = mp("x1 x1 x3 x4 x5 x6 x8 x8 x10 x12 x13");
        assert_eq!(r.size(), 23);
        assert_eq!(MpWord::empty().size(), 0);
        assert_eq!(mp("x3").size(), 1);
    }

    #[test]
    fn size_subword_inequality() {
        // For a split w = w1 w2 w3 of an MP-word: ||w1|| + ||w3|| <= ||w||.
        let whole = mp("x1 x2 x2 x5 x7 x7 x9");
        for a in 0..=whole.len() {
            for b in a..=whole.len() {
                let w1 = whole.slice(0..a);
                let w3 = whole.slice(b..whole.len());
                assert!(w1.size() + w3.size() <= whole.size());
            }
        }
    }

    #[test]
    fn successful_examples() {
        assert!(successful(&mp("x2"), &mp("x0 x1 x2")));
        assert!(!successful(&mp("x1"), &mp("x1")));
        assert!(successful(&mp("x5 x6"), &MpWord::empty()));
        assert!(!successful(&MpWord::empty(), &mp("x0")));
        assert!(successful(&MpWord::empty(), &MpWord::empty()));
    }

    #[test]
    fn parse_and_display_roundtrip() {
        for s in ["1", "x0", "x0 x1^-1 x17", "x2 x2 x2"] {
            let v: Word = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        assert_eq!("".parse::<Word>().unwrap(), Word::empty());
        assert!("y0".parse::<Word>().is_err());
        assert!("x".parse::<Word>().is_err());
        assert!("x1^2".parse::<Word>().is_err());
    }

    #[test]
    fn mp_word_validation() {
        assert!(MpWord::try_from(w("x1 x0")).is_err());
        assert!(MpWord::try_from(w("x0^-1")).is_err());
        assert!(MpWord::try_from(w("x0 x0 x3")).is_ok());
    }
}
