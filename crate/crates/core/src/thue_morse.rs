//! Letter access to the Thue-Morse word and its base-`b` generalization.
//!
//! `t_n` is the parity of the number of ones in the binary expansion of `n`,
//! so any letter is one `count_ones` away. Runs of 64 letters are read with
//! the identity `t_{64q + r} = t_q xor t_r`: every 64-aligned word of the
//! infinite word is either [`TM64`] or its complement.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Index of a letter of the infinite word.
pub type LetterIndex = u64;

/// Largest word [`prefix`] and [`factor`] will materialize, in letters.
pub const MAX_WORD_LETTERS: u64 = 1 << 32;

/// `t_0 .. t_63`, least significant bit first.
pub const TM64: u64 = {
    let mut word = 0u64;
    let mut i = 0;
    while i < 64 {
        word |= ((i as u64).count_ones() as u64 & 1) << i;
        i += 1;
    }
    word
};

/// A letter of a binary word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Bit {
    Zero = 0,
    One = 1,
}

impl Bit {
    #[inline]
    pub fn from_parity(value: u64) -> Bit {
        if value & 1 == 0 {
            Bit::Zero
        } else {
            Bit::One
        }
    }

    #[inline]
    pub fn value(self) -> u8 {
        self as u8
    }

    #[inline]
    pub fn complement(self) -> Bit {
        match self {
            Bit::Zero => Bit::One,
            Bit::One => Bit::Zero,
        }
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// The letter `t_n`.
#[inline]
pub fn letter(n: LetterIndex) -> Bit {
    Bit::from_parity(n.count_ones() as u64)
}

/// `n ≡_t m`: the two positions carry the same letter.
#[inline]
pub fn equivalent(n: LetterIndex, m: LetterIndex) -> bool {
    (n ^ m).count_ones() & 1 == 0
}

/// Letter `n` of the word whose `i`-th letter is the base-`base` digit sum of
/// `i`, reduced mod `base`. Base 2 is the Thue-Morse word.
pub fn generalized_letter(base: u64, n: LetterIndex) -> Result<u64> {
    if base < 2 {
        return Err(Error::InvalidBase(base));
    }
    let mut rest = n;
    let mut sum = 0u64;
    while rest > 0 {
        sum = (sum + rest % base) % base;
        rest /= base;
    }
    Ok(sum)
}

#[inline]
fn aligned_word(q: u64) -> u64 {
    if q.count_ones() & 1 == 0 {
        TM64
    } else {
        !TM64
    }
}

/// Letters `t_pos .. t_{pos+63}`, least significant bit first.
#[inline]
pub(crate) fn window64(pos: u64) -> u64 {
    let q = pos >> 6;
    let r = (pos & 63) as u32;
    if r == 0 {
        aligned_word(q)
    } else {
        (aligned_word(q) >> r) | (aligned_word(q + 1) << (64 - r))
    }
}

/// Fills `buf` with the packed letters `t_start .. t_{start+len-1}`.
/// Bits past `len` in the last word are cleared. The caller guarantees the
/// range fits in 64-bit indices.
pub(crate) fn read_packed(start: u64, len: u64, buf: &mut Vec<u64>) {
    let words = len.div_ceil(64) as usize;
    buf.clear();
    buf.extend((0..words).map(|w| window64(start + 64 * w as u64)));
    let tail = (len % 64) as u32;
    if tail != 0 {
        if let Some(last) = buf.last_mut() {
            *last &= (1u64 << tail) - 1;
        }
    }
}

fn check_range(start: u64, len: u64) -> Result<()> {
    if len > MAX_WORD_LETTERS {
        return Err(Error::ResourceLimit {
            what: "letters",
            requested: len,
            limit: MAX_WORD_LETTERS,
        });
    }
    if len > 0 && start.checked_add(len - 1).is_none() {
        return Err(Error::IndexOverflow {
            context: "factor end",
        });
    }
    Ok(())
}

/// `t_0 .. t_{len-1}`.
pub fn prefix(len: u64) -> Result<FiniteWord> {
    factor(0, len)
}

/// `t_start .. t_{start+len-1}`.
pub fn factor(start: LetterIndex, len: u64) -> Result<FiniteWord> {
    check_range(start, len)?;
    let mut words = Vec::new();
    read_packed(start, len, &mut words);
    Ok(FiniteWord { words, len })
}

/// A finite binary word stored as packed 64-bit words, least significant bit
/// first. Bits beyond `len` are always zero, so derived equality is bitwise.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct FiniteWord {
    words: Vec<u64>,
    len: u64,
}

impl FiniteWord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits<I: IntoIterator<Item = Bit>>(bits: I) -> Self {
        let mut word = FiniteWord::new();
        for bit in bits {
            word.push(bit);
        }
        word
    }

    pub fn push(&mut self, bit: Bit) {
        let offset = (self.len % 64) as u32;
        if offset == 0 {
            self.words.push(0);
        }
        if bit == Bit::One {
            *self.words.last_mut().expect("word pushed above") |= 1u64 << offset;
        }
        self.len += 1;
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Packed storage, least significant bit first.
    pub fn as_words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: u64) -> Option<Bit> {
        (i < self.len).then(|| Bit::from_parity(self.words[(i / 64) as usize] >> (i % 64)))
    }

    pub fn iter(&self) -> impl Iterator<Item = Bit> + '_ {
        (0..self.len).map(move |i| Bit::from_parity(self.words[(i / 64) as usize] >> (i % 64)))
    }

    /// The subword of `len` letters starting at `start`.
    pub fn subword(&self, start: u64, len: u64) -> Option<FiniteWord> {
        let end = start.checked_add(len)?;
        if end > self.len {
            return None;
        }
        let mut out = FiniteWord {
            words: Vec::with_capacity(len.div_ceil(64) as usize),
            len,
        };
        let shift = (start % 64) as u32;
        let first = (start / 64) as usize;
        for w in 0..len.div_ceil(64) as usize {
            let lo = self.words[first + w] >> shift;
            let hi = if shift == 0 {
                0
            } else {
                self.words
                    .get(first + w + 1)
                    .map_or(0, |x| x << (64 - shift))
            };
            out.words.push(lo | hi);
        }
        let tail = (len % 64) as u32;
        if tail != 0 {
            if let Some(last) = out.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        Some(out)
    }

    /// Whether `needle` occurs as a factor.
    pub fn contains_factor(&self, needle: &FiniteWord) -> bool {
        if needle.len > self.len {
            return false;
        }
        (0..=self.len - needle.len).any(|s| self.subword(s, needle.len).as_ref() == Some(needle))
    }
}

impl fmt::Display for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in self.iter() {
            f.write_str(if bit == Bit::One { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteWord(\"{self}\")")
    }
}

impl FromStr for FiniteWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(Bit::Zero),
                '1' => Ok(Bit::One),
                other => Err(Error::InvalidArgument(format!(
                    "binary word contains {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(FiniteWord::from_bits)
    }
}

impl Serialize for FiniteWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FiniteWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `A_m` from the doubling rule, one byte per letter.
    fn doubling(m: u32) -> Vec<u8> {
        let mut a = vec![0u8];
        for _ in 0..m {
            let complement: Vec<u8> = a.iter().map(|x| 1 - x).collect();
            a.extend(complement);
        }
        a
    }

    #[test]
    fn letters_match_known_prefix() {
        assert_eq!(letter(0), Bit::Zero);
        assert_eq!(letter(5), Bit::Zero);
        assert_eq!(letter(1 << 40), Bit::One);
        assert_eq!(prefix(16).unwrap().to_string(), "0110100110010110");
        assert_eq!(prefix(1).unwrap().to_string(), "0");
        assert_eq!(prefix(4).unwrap().to_string(), "0110");
    }

    #[test]
    fn tm64_is_first_64_letters() {
        let a = doubling(6);
        for (i, &b) in a.iter().enumerate() {
            assert_eq!((TM64 >> i) & 1, b as u64);
        }
    }

    #[test]
    fn equivalence_examples() {
        assert!(equivalent(1, 2));
        assert!(equivalent(0, 3));
        assert!(!equivalent(0, 1));
        for n in 0..1000u64 {
            assert!(equivalent(n, 2 * n));
        }
    }

    #[test]
    fn factors() {
        assert_eq!(factor(6, 3).unwrap().to_string(), "011");
        assert!(factor(0, 0).unwrap().is_empty());
        assert_eq!(factor(10, 5).unwrap().to_string(), "01011");
    }

    #[test]
    fn factor_range_errors() {
        assert!(matches!(
            factor(u64::MAX, 2),
            Err(Error::IndexOverflow { .. })
        ));
        assert!(factor(u64::MAX, 1).is_ok());
        assert!(matches!(
            prefix(MAX_WORD_LETTERS + 1),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn unaligned_reads_match_letters() {
        for start in [0u64, 1, 63, 64, 65, 1000, (1 << 40) - 7, u64::MAX - 200] {
            let w = factor(start, 150).unwrap();
            for (i, bit) in w.iter().enumerate() {
                assert_eq!(bit, letter(start + i as u64), "start {start} offset {i}");
            }
        }
    }

    #[test]
    fn generalized_letters() {
        assert_eq!(generalized_letter(3, 5).unwrap(), 0);
        assert_eq!(generalized_letter(2, 7).unwrap(), 1);
        assert_eq!(generalized_letter(10, 19).unwrap(), 0);
        assert_eq!(generalized_letter(1, 7), Err(Error::InvalidBase(1)));
        for n in 0..4096 {
            assert_eq!(generalized_letter(2, n).unwrap(), letter(n).value() as u64);
        }
    }

    #[test]
    fn recurrence() {
        for n in 0..(1u64 << 16) {
            assert_eq!(letter(2 * n), letter(n));
            assert_eq!(letter(2 * n + 1), letter(n).complement());
        }
    }

    #[test]
    fn construction_consistency() {
        for m in 0..=20 {
            let expected = doubling(m);
            let got = prefix(1 << m).unwrap();
            assert!(
                got.iter().map(Bit::value).eq(expected.iter().copied()),
                "m = {m}"
            );
        }
    }

    #[test]
    fn equivalence_has_two_classes() {
        let class_of_zero: Vec<u64> = (0..64).filter(|&n| equivalent(n, 0)).collect();
        let class_of_one: Vec<u64> = (0..64).filter(|&n| equivalent(n, 1)).collect();
        assert_eq!(class_of_zero.len() + class_of_one.len(), 64);
        for &a in &class_of_zero {
            assert!(class_of_one.iter().all(|&b| !equivalent(a, b)));
        }
    }

    #[test]
    fn word_string_round_trip() {
        let w: FiniteWord = "0110100110010110011".parse().unwrap();
        assert_eq!(w.len(), 19);
        assert_eq!(w.to_string(), "0110100110010110011");
        assert!("01a".parse::<FiniteWord>().is_err());
        assert_eq!(w.subword(3, 4).unwrap().to_string(), "0100");
        assert!(w.subword(17, 3).is_none());
    }
}
