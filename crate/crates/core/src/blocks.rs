//! The block families spliced together by the reducers.
//!
//! * `η_i`: the lexicographically least de Bruijn word of order `i`
//!   (Good's normal recurring word), with `η_0 = "0"`.
//! * `α_k`: the least length-`k` word absent from `(η_{k-1})^∞`.
//! * `(0110)^n⌢10` and `(0110)^n⌢0` for the two-difference reduction, and
//!   their base-`b` counterparts `θ^n⌢μ`, `θ^n⌢0`.
//! * `τ_{k,m,n} = (η_{k+m})^i ⌢ (η_{k-1})^j`, searched over `i = 4, 8, …`
//!   with `j = i/4` and verified exactly before it is handed out.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::Pow;

use crate::error::{Error, Result};
use crate::pairing::triple;
use crate::periodic::cyclic_counts;
use crate::rational::{inv_pow, ratio, Rational};
use crate::words::{all_words, check_base, Word, DEFAULT_MAX_WORD_LEN};

/// Default upper bound on the `τ` repetition count `i`.
pub const DEFAULT_TAU_SEARCH_CAP: usize = 1 << 16;

/// How the ambiguous `η_{k,m}` subscript is read.
pub const ETA_KM_READING: &str = "eta_{k,m} is read as eta_{k+m}";

/// Lexicographically least cyclic de Bruijn word of the given order, built
/// by concatenating Lyndon words whose length divides the order. Order 0
/// yields `"0"`.
pub fn good_word(base: u8, order: usize) -> Result<Word> {
    good_word_capped(base, order, DEFAULT_MAX_WORD_LEN)
}

pub fn good_word_capped(base: u8, order: usize, cap: usize) -> Result<Word> {
    check_base(base as u32)?;
    if order == 0 {
        return Word::new(base, vec![0]);
    }
    let len = (base as u128)
        .checked_pow(order as u32)
        .unwrap_or(u128::MAX);
    if len > cap as u128 {
        return Err(Error::ResourceCap {
            what: format!("de Bruijn word of order {order} in base {base}"),
            requested: len,
            cap,
        });
    }
    let top = base - 1;
    let mut out = Vec::with_capacity(len as usize);
    let mut w: Vec<u8> = vec![0];
    loop {
        if order.is_multiple_of(w.len()) {
            out.extend_from_slice(&w);
        }
        let l = w.len();
        for i in l..order {
            w.push(w[i % l]);
        }
        while w.last() == Some(&top) {
            w.pop();
        }
        match w.last_mut() {
            Some(d) => *d += 1,
            None => break,
        }
    }
    Word::new(base, out)
}

/// The least length-`k` word that is not a factor of `(η_{k-1})^∞`.
pub fn absent_word(base: u8, k: usize) -> Result<Word> {
    if k == 0 {
        return Err(Error::InvalidArgument("absent words need k >= 1".into()));
    }
    let eta = good_word(base, k - 1)?;
    let counts = cyclic_counts(&eta, k);
    let code = counts
        .iter()
        .position(|&c| c == 0)
        .expect("a cyclic word of length b^(k-1) has fewer than b^k factors");
    Ok(Word::from_code(base, k, code))
}

/// `(0110)^n ⌢ 10`.
pub fn d2_alpha(n: usize) -> Result<Word> {
    Word::bin("0110").pow(n)?.concat(&Word::bin("10"))
}

/// `(0110)^n ⌢ 0`.
pub fn d2_beta(n: usize) -> Result<Word> {
    Word::bin("0110").pow(n)?.concat(&Word::bin("0"))
}

/// `(θ^n ⌢ μ, θ^n ⌢ 0)` with `θ = η_s`, `μ = η_r` in base `b`.
pub fn general_blocks(base: u8, r: usize, s: usize, n: usize) -> Result<(Word, Word)> {
    general_blocks_capped(base, r, s, n, DEFAULT_MAX_WORD_LEN)
}

pub fn general_blocks_capped(
    base: u8,
    r: usize,
    s: usize,
    n: usize,
    cap: usize,
) -> Result<(Word, Word)> {
    if r == 0 || r >= s {
        return Err(Error::InvalidArgument(format!(
            "general blocks need 1 <= r < s, got r={r}, s={s}"
        )));
    }
    let theta = good_word_capped(base, s, cap)?;
    let mu = good_word_capped(base, r, cap)?;
    let head = theta.pow_capped(n, cap)?;
    let alpha = head.concat(&mu)?;
    let beta = head.concat(&Word::new(base, vec![0])?)?;
    Ok((alpha, beta))
}

/// Upper bound on the limit deviation of `α_n = θ^n⌢μ` at word lengths
/// `<= r`: `2(s+r+2)·b^s / (n·b^s + b^r)`. Only the seams between copies
/// of `θ` and the tail `μ` can skew the counts.
pub fn general_seam_bound(base: u8, r: usize, s: usize, n: usize) -> Rational {
    let bs = BigInt::from(base).pow(s as u32);
    let br = BigInt::from(base).pow(r as u32);
    Rational::new(
        BigInt::from(2 * (s + r + 2)) * &bs,
        BigInt::from(n) * &bs + br,
    )
}

/// `r_{k,m} = 2^{-k}·(1 − 2^{-(m+5)})`.
pub fn r_bound(k: usize, m: usize) -> Rational {
    let num = (BigInt::from(1) << (m + 5)) - 1;
    let den = BigInt::from(1) << (k + m + 5);
    Rational::new(num, den)
}

/// Largest `|lim d_α − b^{-|α|}|` over `1 <= |α| <= max_len` on the cyclic
/// word `period`.
pub fn max_limit_deviation(period: &Word, max_len: usize) -> Rational {
    let p = period.len() as u64;
    let b = period.base() as u64;
    let mut best = ratio(0, 1);
    for l in 1..=max_len {
        let scale = b.pow(l as u32);
        let worst = cyclic_counts(period, l)
            .iter()
            .map(|&c| (c as i128 * scale as i128 - p as i128).unsigned_abs())
            .max()
            .unwrap_or(0);
        let dev = ratio(worst, p as u128 * scale as u128);
        if dev > best {
            best = dev;
        }
    }
    best
}

/// One period of `τ_{k,m,n}` together with the exact evidence for its
/// three defining inequalities.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct TauBlock {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    /// Repetitions of `η_{k+m}`.
    pub i: usize,
    /// Repetitions of `η_{k-1}`.
    pub j: usize,
    pub word: Word,
    pub absent: Word,
    pub bullets: TauBullets,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct TauBullets {
    /// Largest limit deviation over words of length `<= k+m`.
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub long_deviation: Rational,
    /// `2^{-(k+m)}`.
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub long_tolerance: Rational,
    /// Limit density of the absent word `α_k`.
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub absent_density: Rational,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub r_bound: Rational,
    /// Largest limit deviation over words of length `<= k-1`.
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub short_deviation: Rational,
    /// `2^{-⟨k-1,m,n⟩}`.
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub short_tolerance: Rational,
}

impl TauBullets {
    pub fn evaluate(word: &Word, k: usize, m: usize, n: usize, absent: &Word) -> Self {
        let counts = cyclic_counts(word, absent.len());
        let absent_density = ratio(counts[absent.code()], word.len() as u64);
        let t = triple(k as u64 - 1, m as u64, n as u64);
        TauBullets {
            long_deviation: max_limit_deviation(word, k + m),
            long_tolerance: inv_pow(2, (k + m) as u32),
            absent_density,
            r_bound: r_bound(k, m),
            short_deviation: max_limit_deviation(word, k - 1),
            short_tolerance: inv_pow(2, u32::try_from(t).unwrap_or(u32::MAX)),
        }
    }

    /// The first bullet that fails, if any.
    pub fn failing(&self) -> Option<&'static str> {
        if self.long_deviation >= self.long_tolerance {
            Some("tau bullet 1 (deviation on words of length <= k+m)")
        } else if self.absent_density >= self.r_bound {
            Some("tau bullet 2 (absent-word density below r_{k,m})")
        } else if self.short_deviation >= self.short_tolerance {
            Some("tau bullet 3 (deviation on words of length <= k-1)")
        } else {
            None
        }
    }
}

type Slot<T> = Arc<OnceLock<Result<Arc<T>>>>;

/// Caches for `η`, `α_k` and `τ`. Readers may share it across threads;
/// each missing entry is built once, by whichever caller gets there first.
pub struct BlockLibrary {
    base: u8,
    max_word_len: usize,
    tau_search_cap: usize,
    good: Mutex<HashMap<usize, Slot<Word>>>,
    absent: Mutex<HashMap<usize, Slot<Word>>>,
    tau: Mutex<HashMap<(usize, usize, usize), Slot<TauBlock>>>,
}

impl BlockLibrary {
    pub fn new(base: u8) -> Result<Self> {
        Self::with_limits(base, DEFAULT_MAX_WORD_LEN, DEFAULT_TAU_SEARCH_CAP)
    }

    pub fn with_limits(base: u8, max_word_len: usize, tau_search_cap: usize) -> Result<Self> {
        check_base(base as u32)?;
        Ok(BlockLibrary {
            base,
            max_word_len,
            tau_search_cap,
            good: Mutex::default(),
            absent: Mutex::default(),
            tau: Mutex::default(),
        })
    }

    pub fn base(&self) -> u8 {
        self.base
    }

    pub fn max_word_len(&self) -> usize {
        self.max_word_len
    }

    fn slot<K: std::hash::Hash + Eq, T>(map: &Mutex<HashMap<K, Slot<T>>>, key: K) -> Slot<T> {
        map.lock()
            .expect("block cache poisoned")
            .entry(key)
            .or_default()
            .clone()
    }

    /// `η_order`.
    pub fn good_word(&self, order: usize) -> Result<Arc<Word>> {
        Self::slot(&self.good, order)
            .get_or_init(|| good_word_capped(self.base, order, self.max_word_len).map(Arc::new))
            .clone()
    }

    /// `α_k`.
    pub fn absent_word(&self, k: usize) -> Result<Arc<Word>> {
        Self::slot(&self.absent, k)
            .get_or_init(|| absent_word(self.base, k).map(Arc::new))
            .clone()
    }

    /// `τ_{k,m,n}` (binary only).
    pub fn tau(&self, k: usize, m: usize, n: usize) -> Result<Arc<TauBlock>> {
        Self::slot(&self.tau, (k, m, n))
            .get_or_init(|| self.build_tau(k, m, n).map(Arc::new))
            .clone()
    }

    fn build_tau(&self, k: usize, m: usize, n: usize) -> Result<TauBlock> {
        if k == 0 {
            return Err(Error::InvalidArgument("tau needs k >= 1".into()));
        }
        if self.base != 2 {
            return Err(Error::InvalidArgument("tau blocks are binary".into()));
        }
        let long = self.good_word(k + m)?;
        let short = self.good_word(k - 1)?;
        let absent = self.absent_word(k)?;
        let mut failing = "none";
        let mut i = 4;
        while i <= self.tau_search_cap {
            let j = i / 4;
            let len = long.len() as u128 * i as u128 + short.len() as u128 * j as u128;
            if len > self.max_word_len as u128 {
                return Err(Error::ResourceCap {
                    what: format!("tau_({k},{m},{n}) with i={i}"),
                    requested: len,
                    cap: self.max_word_len,
                });
            }
            let word = long
                .pow_capped(i, self.max_word_len)?
                .concat(&short.pow_capped(j, self.max_word_len)?)?;
            let bullets = TauBullets::evaluate(&word, k, m, n, &absent);
            match bullets.failing() {
                None => {
                    return Ok(TauBlock {
                        k,
                        m,
                        n,
                        i,
                        j,
                        word,
                        absent: (*absent).clone(),
                        bullets,
                    })
                }
                Some(f) => failing = f,
            }
            i += 4;
        }
        Err(Error::SearchCap {
            what: format!(
                "searching tau_({k},{m},{n}) up to i={}",
                self.tau_search_cap
            ),
            condition: failing.into(),
        })
    }
}

/// Whether every word of length `order` occurs exactly once cyclically.
pub fn is_de_bruijn(word: &Word, order: usize) -> bool {
    let expected = (word.base() as usize).pow(order as u32);
    word.len() == expected && cyclic_counts(word, order).iter().all(|&c| c == 1)
}

/// Every length-`l` word, used by tests and diagnostics.
pub fn words_of_len(base: u8, l: usize) -> Vec<Word> {
    all_words(base, l).collect()
}
