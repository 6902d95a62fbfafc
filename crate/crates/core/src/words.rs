//! Finite digit strings.
//!
//! A [`Word`] is a finite sequence of digits in a fixed base. It serializes
//! as a plain ASCII digit string (`"0110"`) for bases up to 10 and as
//! comma-separated decimal digits (`"1,0,12,3"`) above that.

use std::fmt;

use crate::error::{Error, Result};

/// Default ceiling on the number of digits any single operation may
/// materialize.
pub const DEFAULT_MAX_WORD_LEN: usize = 1 << 22;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    base: u8,
    digits: Vec<u8>,
}

impl Word {
    pub fn new(base: u8, digits: Vec<u8>) -> Result<Self> {
        check_base(base as u32)?;
        if let Some(&d) = digits.iter().find(|&&d| d >= base) {
            return Err(Error::DigitOutOfRange {
                digit: d as u32,
                base,
            });
        }
        Ok(Word { base, digits })
    }

    pub fn empty(base: u8) -> Self {
        Word {
            base,
            digits: Vec::new(),
        }
    }

    /// Binary word from an ASCII string; panics on anything but `0`/`1`.
    /// Meant for literals in tests and examples.
    pub fn bin(s: &str) -> Self {
        Word::parse(2, s).expect("binary literal")
    }

    /// Parses the textual form for the given base.
    pub fn parse(base: u8, s: &str) -> Result<Self> {
        check_base(base as u32)?;
        let s = s.trim();
        if s.is_empty() {
            return Ok(Word::empty(base));
        }
        let digits = if s.contains(',') || base > 10 {
            s.split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad digit {tok:?} in {s:?}")))
                })
                .collect::<Result<Vec<u32>>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .ok_or_else(|| Error::Parse(format!("bad digit {c:?} in {s:?}")))
                })
                .collect::<Result<Vec<u32>>>()?
        };
        let mut out = Vec::with_capacity(digits.len());
        for d in digits {
            if d >= base as u32 {
                return Err(Error::DigitOutOfRange { digit: d, base });
            }
            out.push(d as u8);
        }
        Ok(Word { base, digits: out })
    }

    /// `digit` repeated `n` times.
    pub fn repeat_digit(base: u8, digit: u8, n: usize) -> Result<Self> {
        Word::new(base, vec![digit; n])
    }

    pub fn base(&self) -> u8 {
        self.base
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn into_digits(self) -> Vec<u8> {
        self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<u8> {
        self.digits.get(i).copied()
    }

    /// The restriction `w↾n` (the first `n` digits, or all of them).
    pub fn prefix(&self, n: usize) -> Word {
        Word {
            base: self.base,
            digits: self.digits[..n.min(self.len())].to_vec(),
        }
    }

    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word {
            base: self.base,
            digits: self.digits[start..end].to_vec(),
        }
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        self.base == other.base && other.digits.starts_with(&self.digits)
    }

    pub fn push(&mut self, digit: u8) -> Result<()> {
        if digit >= self.base {
            return Err(Error::DigitOutOfRange {
                digit: digit as u32,
                base: self.base,
            });
        }
        self.digits.push(digit);
        Ok(())
    }

    pub fn append(&mut self, other: &Word) -> Result<()> {
        same_base(self, other)?;
        self.digits.extend_from_slice(&other.digits);
        Ok(())
    }

    /// `self ⌢ other`.
    pub fn concat(&self, other: &Word) -> Result<Word> {
        let mut out = self.clone();
        out.append(other)?;
        Ok(out)
    }

    /// `self^n`, refusing to build anything longer than `cap` digits.
    pub fn pow_capped(&self, n: usize, cap: usize) -> Result<Word> {
        let requested = self.len() as u128 * n as u128;
        if requested > cap as u128 {
            return Err(Error::ResourceCap {
                what: "word power".into(),
                requested,
                cap,
            });
        }
        let mut digits = Vec::with_capacity(requested as usize);
        for _ in 0..n {
            digits.extend_from_slice(&self.digits);
        }
        Ok(Word {
            base: self.base,
            digits,
        })
    }

    /// `self^n` under the default resource cap.
    pub fn pow(&self, n: usize) -> Result<Word> {
        self.pow_capped(n, DEFAULT_MAX_WORD_LEN)
    }

    /// Digit-wise index of this word read as a base-`b` numeral.
    pub fn code(&self) -> usize {
        self.digits
            .iter()
            .fold(0usize, |acc, &d| acc * self.base as usize + d as usize)
    }

    /// Inverse of [`Word::code`] for a fixed length.
    pub fn from_code(base: u8, len: usize, mut code: usize) -> Word {
        let mut digits = vec![0u8; len];
        for slot in digits.iter_mut().rev() {
            *slot = (code % base as usize) as u8;
            code /= base as usize;
        }
        Word { base, digits }
    }

    /// Whether `self` is a power of a strictly shorter word.
    pub fn is_primitive(&self) -> bool {
        let n = self.len();
        if n == 0 {
            return false;
        }
        (1..n)
            .filter(|&p| n.is_multiple_of(p))
            .all(|p| self.digits.chunks(p).any(|c| c != &self.digits[..p]))
    }

    /// The shortest word whose power is `self`.
    pub fn primitive_root(&self) -> Word {
        let n = self.len();
        for p in 1..=n {
            if n.is_multiple_of(p) && self.digits.chunks(p).all(|c| c == &self.digits[..p]) {
                return self.prefix(p);
            }
        }
        self.clone()
    }
}

/// All words of length `len` over `base`, in lexicographic order.
pub fn all_words(base: u8, len: usize) -> impl Iterator<Item = Word> {
    let count = (base as usize)
        .checked_pow(len as u32)
        .unwrap_or(usize::MAX);
    (0..count).map(move |c| Word::from_code(base, len, c))
}

/// All nonempty words of length at most `max_len`, shortest first.
pub fn all_words_up_to(base: u8, max_len: usize) -> impl Iterator<Item = Word> {
    (1..=max_len).flat_map(move |l| all_words(base, l))
}

pub(crate) fn check_base(base: u32) -> Result<()> {
    if (2..=255).contains(&base) {
        Ok(())
    } else {
        Err(Error::InvalidBase(base))
    }
}

pub(crate) fn same_base(a: &Word, b: &Word) -> Result<()> {
    if a.base == b.base {
        Ok(())
    } else {
        Err(Error::BaseMismatch {
            left: a.base,
            right: b.base,
        })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.base <= 10 {
            for &d in &self.digits {
                write!(f, "{}", d)?;
            }
        } else {
            for (i, &d) in self.digits.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", d)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word<{}>({:?})", self.base, self.to_string())
    }
}

impl serde::Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render() {
        let w = Word::parse(2, "0110").unwrap();
        assert_eq!(w.digits(), &[0, 1, 1, 0]);
        assert_eq!(w.to_string(), "0110");
        let big = Word::parse(16, "1,0,12,3").unwrap();
        assert_eq!(big.to_string(), "1,0,12,3");
        assert_eq!(Word::parse(2, "").unwrap().len(), 0);
    }

    #[test]
    fn rejects_bad_digits() {
        assert!(matches!(
            Word::parse(2, "012"),
            Err(Error::DigitOutOfRange { digit: 2, base: 2 })
        ));
        assert!(matches!(Word::parse(2, "0a"), Err(Error::Parse(_))));
        assert!(Word::new(1, vec![]).is_err());
    }

    #[test]
    fn powers_and_caps() {
        let w = Word::bin("01");
        assert_eq!(w.pow(3).unwrap(), Word::bin("010101"));
        assert_eq!(w.pow(0).unwrap(), Word::empty(2));
        assert!(matches!(
            w.pow_capped(10, 19),
            Err(Error::ResourceCap { requested: 20, .. })
        ));
    }

    #[test]
    fn codes_round_trip() {
        for w in all_words(3, 4) {
            assert_eq!(Word::from_code(3, 4, w.code()), w);
        }
        let listed: Vec<String> = all_words(2, 2).map(|w| w.to_string()).collect();
        assert_eq!(listed, ["00", "01", "10", "11"]);
    }

    #[test]
    fn primitivity() {
        assert!(Word::bin("011").is_primitive());
        assert!(!Word::bin("0101").is_primitive());
        assert_eq!(Word::bin("001001").primitive_root(), Word::bin("001"));
        assert!(!Word::bin("").is_primitive());
    }

    #[test]
    fn base_mismatch() {
        let a = Word::bin("0");
        let b = Word::parse(3, "2").unwrap();
        assert!(matches!(a.concat(&b), Err(Error::BaseMismatch { .. })));
    }
}
