//! Substring densities.
//!
//! `d_α(σ)` counts the start positions `i` with `i < |σ| − |α|` at which `α`
//! occurs in `σ`, divided by `|σ|`. The bound is strict, so an occurrence
//! that ends on the final digit of `σ` is not counted:
//!
//! ```
//! use nlab::{density, ratio, Word};
//! assert_eq!(density(&Word::bin("0"), &Word::bin("01")).unwrap(), ratio(1, 2));
//! assert_eq!(density(&Word::bin("1"), &Word::bin("01")).unwrap(), ratio(0, 1));
//! ```

use crate::error::{Error, Result};
use crate::rational::{ratio, Rational};
use crate::words::{check_base, same_base, Word};

/// Number of qualifying occurrences of `alpha` in `sigma` (strict bound).
pub fn count_occurrences(alpha: &[u8], sigma: &[u8]) -> usize {
    let (a, s) = (alpha.len(), sigma.len());
    if a >= s {
        return 0;
    }
    (0..s - a).filter(|&i| &sigma[i..i + a] == alpha).count()
}

/// `d_α(σ)` as an exact rational.
pub fn density(alpha: &Word, sigma: &Word) -> Result<Rational> {
    same_base(alpha, sigma)?;
    if sigma.is_empty() {
        return Err(Error::EmptyInput);
    }
    if alpha.len() > sigma.len() {
        return Err(Error::PatternTooLong {
            pattern: alpha.len(),
            text: sigma.len(),
        });
    }
    Ok(ratio(
        count_occurrences(alpha.digits(), sigma.digits()) as u64,
        sigma.len() as u64,
    ))
}

/// Streaming `d_α` over a growing prefix, O(1) per digit.
///
/// The occurrence ending at the newest digit is held back until one more
/// digit arrives, which is exactly the strict position bound.
#[derive(Clone, Debug)]
pub struct DensityTracker {
    pattern: Word,
    delta: Vec<u32>,
    state: usize,
    pending: bool,
    processed: u64,
    hits: u64,
}

impl DensityTracker {
    pub fn new(pattern: Word) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::InvalidArgument(
                "tracker pattern must be nonempty".into(),
            ));
        }
        let delta = kmp_automaton(&pattern);
        Ok(DensityTracker {
            pattern,
            delta,
            state: 0,
            pending: false,
            processed: 0,
            hits: 0,
        })
    }

    pub fn pattern(&self) -> &Word {
        &self.pattern
    }

    pub fn processed(&self) -> u64 {
        self.processed
    }

    pub fn hits(&self) -> u64 {
        self.hits
    }

    pub fn push(&mut self, digit: u8) -> Result<()> {
        let base = self.pattern.base();
        if digit >= base {
            return Err(Error::DigitOutOfRange {
                digit: digit as u32,
                base,
            });
        }
        self.push_unchecked(digit);
        Ok(())
    }

    #[inline]
    pub(crate) fn push_unchecked(&mut self, digit: u8) {
        if self.pending {
            self.hits += 1;
        }
        let base = self.pattern.base() as usize;
        self.state = self.delta[self.state * base + digit as usize] as usize;
        self.pending = self.state == self.pattern.len();
        self.processed += 1;
    }

    pub fn extend(&mut self, digits: &[u8]) -> Result<()> {
        for &d in digits {
            self.push(d)?;
        }
        Ok(())
    }

    /// Current density; an error before any digit has been seen.
    pub fn density(&self) -> Result<Rational> {
        if self.processed == 0 {
            return Err(Error::EmptyInput);
        }
        Ok(ratio(self.hits, self.processed))
    }

    /// `hits/processed >= num/den`, decided in integers.
    pub fn at_least(&self, num: u64, den: u64) -> bool {
        self.hits as u128 * den as u128 >= num as u128 * self.processed as u128
    }
}

fn kmp_automaton(pattern: &Word) -> Vec<u32> {
    let p = pattern.digits();
    let base = pattern.base() as usize;
    let n = p.len();
    let mut fail = vec![0usize; n + 1];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && p[i] != p[k] {
            k = fail[k];
        }
        if p[i] == p[k] {
            k += 1;
        }
        fail[i + 1] = k;
    }
    let mut delta = vec![0u32; (n + 1) * base];
    for state in 0..=n {
        for d in 0..base {
            delta[state * base + d] = if state < n && p[state] as usize == d {
                (state + 1) as u32
            } else if state == 0 {
                0
            } else {
                delta[fail[state] * base + d]
            };
        }
    }
    delta
}

/// Qualifying-occurrence counts for every word of one fixed length at once.
#[derive(Clone, Debug)]
pub struct WindowCounter {
    base: u8,
    len: usize,
    modulus: usize,
    counts: Vec<u64>,
    window: usize,
    filled: usize,
    pending: Option<usize>,
    processed: u64,
}

impl WindowCounter {
    pub fn new(base: u8, len: usize, cap: usize) -> Result<Self> {
        check_base(base as u32)?;
        if len == 0 {
            return Err(Error::InvalidArgument(
                "window length must be positive".into(),
            ));
        }
        let modulus = (base as usize)
            .checked_pow(len as u32)
            .filter(|&m| m <= cap)
            .ok_or_else(|| Error::ResourceCap {
                what: format!("window table for length {len}"),
                requested: (base as u128).saturating_pow(len as u32),
                cap,
            })?;
        Ok(WindowCounter {
            base,
            len,
            modulus,
            counts: vec![0; modulus],
            window: 0,
            filled: 0,
            pending: None,
            processed: 0,
        })
    }

    pub fn window_len(&self) -> usize {
        self.len
    }

    pub fn processed(&self) -> u64 {
        self.processed
    }

    #[inline]
    pub fn push(&mut self, digit: u8) {
        debug_assert!(digit < self.base);
        if let Some(code) = self.pending {
            self.counts[code] += 1;
        }
        self.window = (self.window * self.base as usize + digit as usize) % self.modulus;
        self.filled = (self.filled + 1).min(self.len);
        self.processed += 1;
        self.pending = (self.filled == self.len).then_some(self.window);
    }

    pub fn extend(&mut self, digits: &[u8]) {
        for &d in digits {
            self.push(d);
        }
    }

    pub fn count(&self, word: &Word) -> u64 {
        debug_assert_eq!(word.len(), self.len);
        self.counts[word.code()]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn density(&self, word: &Word) -> Result<Rational> {
        if word.len() != self.len || word.base() != self.base {
            return Err(Error::InvalidArgument(format!(
                "counter tracks base-{} words of length {}",
                self.base, self.len
            )));
        }
        if self.processed == 0 {
            return Err(Error::EmptyInput);
        }
        Ok(ratio(self.count(word), self.processed))
    }

    /// Largest `|d_w − b^{-len}|` over all words `w` of the tracked length,
    /// with the lexicographically least maximizer.
    pub fn max_deviation(&self) -> Result<(Rational, Word)> {
        if self.processed == 0 {
            return Err(Error::EmptyInput);
        }
        let n = self.processed as i128;
        let scale = self.modulus as i128;
        let (best, code) = self
            .counts
            .iter()
            .enumerate()
            .map(|(c, &h)| ((h as i128 * scale - n).abs(), c))
            .fold((-1i128, 0usize), |acc, x| if x.0 > acc.0 { x } else { acc });
        Ok((
            ratio(best, n * scale),
            Word::from_code(self.base, self.len, code),
        ))
    }
}

/// Finite-stage normality diagnostic: `max_{|α|=k} |d_α(σ) − b^{-k}|`.
pub fn max_deviation(sigma: &Word, k: usize) -> Result<Rational> {
    max_deviation_with_witness(sigma, k).map(|(d, _)| d)
}

pub fn max_deviation_with_witness(sigma: &Word, k: usize) -> Result<(Rational, Word)> {
    if k == 0 {
        return Err(Error::InvalidArgument("order must be at least 1".into()));
    }
    if sigma.len() < k {
        return Err(Error::PatternTooLong {
            pattern: k,
            text: sigma.len(),
        });
    }
    let mut counter = WindowCounter::new(sigma.base(), k, crate::words::DEFAULT_MAX_WORD_LEN)?;
    counter.extend(sigma.digits());
    counter.max_deviation()
}
