//! Eventually periodic infinite words `pre ⌢ period^∞`, their exact limiting
//! densities, and the modulus of distribution.
//!
//! The modulus `μ(α, p)` is the least `q` such that every `q' ≥ q` has
//! `|d_α(w↾q') − lim d_α| < 2^{-p}`. Only prefixes on which `d_α` is defined
//! (`q' ≥ max(1, |α|)`) are inspected, so a pattern whose density never
//! strays gets modulus 0.
//!
//! Past the preperiod the occurrence count drifts from the linear trend by a
//! quantity that only depends on the residue of the position modulo the
//! period. That makes the tail of the scan a closed-form computation per
//! residue; only the preperiod needs to be walked, and even there the walk
//! jumps ahead whenever the current slack cannot be used up in fewer steps.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rational::{ratio, Rational};
use crate::words::{all_words, same_base, Word};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EventuallyPeriodicWord {
    preperiod: Word,
    period: Word,
}

impl EventuallyPeriodicWord {
    /// Builds and canonicalizes: the period becomes primitive and the
    /// preperiod as short as possible.
    pub fn new(preperiod: Word, period: Word) -> Result<Self> {
        same_base(&preperiod, &period)?;
        if period.is_empty() {
            return Err(Error::InvalidArgument("period must be nonempty".into()));
        }
        let mut period = period.primitive_root().into_digits();
        let base = preperiod.base();
        let mut pre = preperiod.into_digits();
        while let (Some(&a), Some(&b)) = (pre.last(), period.last()) {
            if a != b {
                break;
            }
            pre.pop();
            period.rotate_right(1);
        }
        Ok(EventuallyPeriodicWord {
            preperiod: Word::new(base, pre)?,
            period: Word::new(base, period)?,
        })
    }

    /// `period^∞`.
    pub fn purely_periodic(period: Word) -> Result<Self> {
        let base = period.base();
        Self::new(Word::empty(base), period)
    }

    /// Parses `"pre:period"` (`":0110"` for an empty preperiod).
    pub fn parse(base: u8, s: &str) -> Result<Self> {
        let (pre, per) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected \"pre:period\", got {s:?}")))?;
        Self::new(Word::parse(base, pre)?, Word::parse(base, per)?)
    }

    pub fn base(&self) -> u8 {
        self.period.base()
    }

    pub fn preperiod(&self) -> &Word {
        &self.preperiod
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    pub fn digit_at(&self, i: usize) -> u8 {
        let a = self.preperiod.len();
        if i < a {
            self.preperiod.digits()[i]
        } else {
            self.period.digits()[(i - a) % self.period.len()]
        }
    }

    /// `w↾n` as a finite word.
    pub fn prefix(&self, n: usize) -> Word {
        let digits = (0..n).map(|i| self.digit_at(i)).collect();
        Word::new(self.base(), digits).expect("digits come from valid words")
    }

    /// Infinite digit iterator.
    pub fn digits(&self) -> impl Iterator<Item = u8> + '_ {
        (0..).map(move |i| self.digit_at(i))
    }
}

impl fmt::Display for EventuallyPeriodicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.preperiod, self.period)
    }
}

impl fmt::Debug for EventuallyPeriodicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EventuallyPeriodic({self})")
    }
}

impl FromStr for EventuallyPeriodicWord {
    type Err = Error;

    /// Binary words only; use [`EventuallyPeriodicWord::parse`] for others.
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(2, s)
    }
}

/// Occurrences of `alpha` starting in one period of the cyclic word.
pub fn cyclic_count(alpha: &[u8], period: &[u8]) -> usize {
    let p = period.len();
    let l = alpha.len();
    if l == 0 {
        return p;
    }
    (0..p)
        .filter(|&i| (0..l).all(|j| period[(i + j) % p] == alpha[j]))
        .count()
}

/// Cyclic occurrence counts of every word of length `l` in `period`,
/// indexed by word code.
pub fn cyclic_counts(period: &Word, l: usize) -> Vec<u64> {
    let b = period.base() as usize;
    let size = b.pow(l as u32);
    let mut counts = vec![0u64; size];
    let d = period.digits();
    let p = d.len();
    let mut code = 0usize;
    for i in 0..p + l - 1 {
        code = (code * b + d[i % p] as usize) % size;
        if i + 1 >= l {
            counts[code] += 1;
        }
    }
    counts
}

/// `lim_s d_α(w↾s)`: cyclic occurrences per period over the period length.
pub fn limit_density(alpha: &Word, w: &EventuallyPeriodicWord) -> Result<Rational> {
    same_base(alpha, w.period())?;
    if alpha.is_empty() {
        return Err(Error::InvalidArgument("pattern must be nonempty".into()));
    }
    Ok(ratio(
        cyclic_count(alpha.digits(), w.period().digits()) as u64,
        w.period().len() as u64,
    ))
}

/// Least `q` after which `d_α` stays strictly within `2^{-p}` of its limit.
pub fn modulus(w: &EventuallyPeriodicWord, alpha: &Word, p: u32) -> Result<u64> {
    same_base(alpha, w.period())?;
    if alpha.is_empty() {
        return Err(Error::InvalidArgument("pattern must be nonempty".into()));
    }
    let engine = ModulusEngine::new(w, alpha.len(), usize::MAX)?;
    let occ = engine.occurrences(alpha.digits());
    Ok(engine.moduli(alpha.len(), &occ, p)[p as usize])
}

/// Shared materialization of `pre ⌢ period^*` long enough to see every
/// occurrence starting inside the preperiod or the first period.
pub(crate) struct ModulusEngine {
    base: u8,
    text: Vec<u8>,
    pre_len: usize,
    period_len: usize,
}

impl ModulusEngine {
    pub(crate) fn new(w: &EventuallyPeriodicWord, max_len: usize, cap: usize) -> Result<Self> {
        let pre_len = w.preperiod().len();
        let period_len = w.period().len();
        let total = pre_len + period_len + max_len;
        if total > cap {
            return Err(Error::ResourceCap {
                what: "modulus table".into(),
                requested: total as u128,
                cap,
            });
        }
        let text = (0..total).map(|i| w.digit_at(i)).collect();
        Ok(ModulusEngine {
            base: w.base(),
            text,
            pre_len,
            period_len,
        })
    }

    /// Start positions `< pre_len + period_len` of `alpha`.
    pub(crate) fn occurrences(&self, alpha: &[u8]) -> Vec<u32> {
        let l = alpha.len();
        (0..self.pre_len + self.period_len)
            .filter(|&i| &self.text[i..i + l] == alpha)
            .map(|i| i as u32)
            .collect()
    }

    /// Occurrence lists for every word of length `l`, indexed by word code.
    pub(crate) fn occurrences_by_code(&self, l: usize) -> Vec<Vec<u32>> {
        let b = self.base as usize;
        let size = b.pow(l as u32);
        let mut buckets = vec![Vec::new(); size];
        let starts = self.pre_len + self.period_len;
        let mut code = 0usize;
        for (i, &d) in self.text[..starts + l - 1].iter().enumerate() {
            code = (code * b + d as usize) % size;
            if i + 1 >= l {
                buckets[code].push((i + 1 - l) as u32);
            }
        }
        buckets
    }

    /// Moduli for precisions `0..=max_p` of a pattern of length `l` whose
    /// occurrence starts are `occ`.
    pub(crate) fn moduli(&self, l: usize, occ: &[u32], max_p: u32) -> Vec<u64> {
        let a = self.pre_len as i128;
        let per = self.period_len as i128;
        let ln = l as i128;
        let pre_count = occ.partition_point(|&i| (i as usize) < self.pre_len);
        let h = (occ.len() - pre_count) as i128;

        // Drift per residue r in the periodic regime q = A + l + r + jP.
        let mut drift = Vec::with_capacity(self.period_len);
        let mut g = 0i128;
        let mut idx = pre_count;
        for r in 0..self.period_len {
            while idx < occ.len() && (occ[idx] as usize) < self.pre_len + r {
                idx += 1;
                g += 1;
            }
            let e = per * (pre_count as i128 + g) - h * (a + ln + r as i128);
            drift.push(e.unsigned_abs());
        }
        let max_drift = drift.iter().copied().max().unwrap_or(0) as i128;

        let region_hi = (a + ln) as u64; // exclusive
        let q_lo = (l as u64).max(1);
        let mut out = Vec::with_capacity(max_p as usize + 1);
        for p in 0..=max_p {
            let two_p = 1i128 << p;
            let mut last: u64 = 0;
            // Periodic regime.
            if max_drift * two_p >= per * (a + ln) {
                for (r, &e) in drift.iter().enumerate() {
                    let q0 = a + ln + r as i128;
                    let lhs = e as i128 * two_p - per * q0;
                    if lhs >= 0 {
                        let j = lhs / (per * per);
                        last = last.max((q0 + j * per) as u64);
                    }
                }
            }
            if last == 0 {
                last = self.scan_region(occ, l, h, p, q_lo, region_hi);
            }
            out.push(if last == 0 { 0 } else { last + 1 });
        }
        out
    }

    /// Last violation in `[q_lo, q_hi)`, 0 if none.
    fn scan_region(&self, occ: &[u32], l: usize, h: i128, p: u32, q_lo: u64, q_hi: u64) -> u64 {
        let per = self.period_len as i128;
        let two_p = 1i128 << p;
        let step_drift = h.max(per - h);
        let rate = two_p * step_drift - per;
        let mut last = 0u64;
        let mut q = q_lo;
        let mut idx = 0usize;
        while q < q_hi {
            // count(q) = #{i : i < q - l}
            let bound = q as i128 - l as i128;
            while idx < occ.len() && (occ[idx] as i128) < bound {
                idx += 1;
            }
            let e = (idx as i128 * per - h * q as i128).abs();
            let slack = per * q as i128 - e * two_p;
            if slack <= 0 {
                last = q;
                q += 1;
            } else if rate <= 0 {
                break;
            } else {
                let jump = (slack + rate - 1) / rate;
                q = q.saturating_add(jump.max(1) as u64);
            }
        }
        last
    }
}

/// A rectangle `{words of length 1..=max_len} × {0..=max_precision}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Grid {
    pub max_len: usize,
    pub max_precision: u32,
}

impl Grid {
    pub fn new(max_len: usize, max_precision: u32) -> Self {
        Grid {
            max_len,
            max_precision,
        }
    }
}

/// `μ` restricted to a finite grid of (word, precision) pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModulusTable {
    base: u8,
    entries: BTreeMap<(Word, u32), u64>,
}

impl ModulusTable {
    /// Table over the union of the given grids.
    pub fn compute(w: &EventuallyPeriodicWord, grids: &[Grid], cap: usize) -> Result<Self> {
        let max_len = grids.iter().map(|g| g.max_len).max().unwrap_or(0);
        let mut entries = BTreeMap::new();
        if max_len == 0 {
            return Ok(ModulusTable {
                base: w.base(),
                entries,
            });
        }
        let engine = ModulusEngine::new(w, max_len, cap)?;
        for l in 1..=max_len {
            let max_p = grids
                .iter()
                .filter(|g| g.max_len >= l)
                .map(|g| g.max_precision)
                .max();
            let Some(max_p) = max_p else { continue };
            let buckets = engine.occurrences_by_code(l);
            for alpha in all_words(w.base(), l) {
                let moduli = engine.moduli(l, &buckets[alpha.code()], max_p);
                for (p, m) in moduli.into_iter().enumerate() {
                    entries.insert((alpha.clone(), p as u32), m);
                }
            }
        }
        Ok(ModulusTable {
            base: w.base(),
            entries,
        })
    }

    pub fn base(&self) -> u8 {
        self.base
    }

    pub fn get(&self, alpha: &Word, p: u32) -> Option<u64> {
        self.entries.get(&(alpha.clone(), p)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, u32, u64)> {
        self.entries.iter().map(|((w, p), m)| (w, *p, *m))
    }

    /// First grid point where the two tables differ (or where either lacks
    /// an entry), if any.
    pub fn first_mismatch(&self, other: &ModulusTable, grid: Grid) -> Option<(Word, u32)> {
        for l in 1..=grid.max_len {
            for alpha in all_words(self.base, l) {
                for p in 0..=grid.max_precision {
                    let a = self.get(&alpha, p);
                    if a.is_none() || a != other.get(&alpha, p) {
                        return Some((alpha, p));
                    }
                }
            }
        }
        None
    }
}

/// `μ` on `{words of length 1..=max_word_len} × {0..=max_precision}`.
/// Length-0 words are not part of any grid.
pub fn restrict_modulus(
    w: &EventuallyPeriodicWord,
    max_word_len: usize,
    max_precision: u32,
) -> Result<ModulusTable> {
    ModulusTable::compute(
        w,
        &[Grid::new(max_word_len, max_precision)],
        crate::words::DEFAULT_MAX_WORD_LEN,
    )
}
