//! The two-difference reduction.
//!
//! Stage `p = ⟨m,n⟩` appends `α_{i_p}^{a_p}` then `β_{j_p}^{b_p}`. In Case 1
//! the index advances and one copy is appended; in Case 2 the index drops
//! to `m` and copies are appended one at a time until the tracked density
//! reaches the stage threshold.

use std::collections::{HashMap, VecDeque};

use num_traits::ToPrimitive;
use serde::Serialize;

use super::{d2_classify, Case, InputPrefix};
use crate::blocks::good_word_capped;
use crate::density::{count_occurrences, WindowCounter};
use crate::error::{Error, Result};
use crate::pairing::unpair;
use crate::periodic::cyclic_counts;
use crate::pointclass::{interleave_intersection, monotonize, Arity, Pi03Family};
use crate::rational::{inv_pow, ratio, Rational};
use crate::words::{check_base, Word, DEFAULT_MAX_WORD_LEN};

/// Base value of the index recursion.
pub const INITIAL_INDEX_NOTE: &str = "i_{-1} = j_{-1} = 0";

/// Which blocks and thresholds a run uses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum D2Scheme {
    /// `α_n = (0110)^n⌢10`, `β_n = (0110)^n⌢0`.
    Binary,
    /// `α_n = θ^n⌢μ`, `β_n = θ^n⌢0` with `θ = η_s`, `μ = η_r` in base `b`.
    General { base: u8, r: usize, s: usize },
}

/// A stage threshold: `density(pattern) >= threshold` must hold at a
/// Case-2 boundary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub pattern: Word,
    /// Limit density of `pattern` along the repeated block.
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub limit: Rational,
    /// The value `pattern` would have in a normal sequence.
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub target: Rational,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub threshold: Rational,
    pub formula: &'static str,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Side {
    Alpha,
    Beta,
}

/// Block factory for a scheme: `head^n ⌢ tail`.
struct Blocks {
    scheme: D2Scheme,
    base: u8,
    head: Word,
    alpha_tail: Word,
    beta_tail: Word,
    alpha_pattern_len: usize,
    cap: usize,
}

impl Blocks {
    fn new(scheme: &D2Scheme, cap: usize) -> Result<Self> {
        match *scheme {
            D2Scheme::Binary => Ok(Blocks {
                scheme: scheme.clone(),
                base: 2,
                head: Word::bin("0110"),
                alpha_tail: Word::bin("10"),
                beta_tail: Word::bin("0"),
                alpha_pattern_len: 2,
                cap,
            }),
            D2Scheme::General { base, r, s } => {
                check_base(base as u32)?;
                if r == 0 || r >= s {
                    return Err(Error::InvalidArgument(format!(
                        "general blocks need 1 <= r < s, got r={r}, s={s}"
                    )));
                }
                Ok(Blocks {
                    scheme: scheme.clone(),
                    base,
                    head: good_word_capped(base, s, cap)?,
                    alpha_tail: good_word_capped(base, r, cap)?,
                    beta_tail: Word::new(base, vec![0])?,
                    alpha_pattern_len: s,
                    cap,
                })
            }
        }
    }

    fn block(&self, side: Side, index: u64) -> Result<Word> {
        let tail = match side {
            Side::Alpha => &self.alpha_tail,
            Side::Beta => &self.beta_tail,
        };
        let reps = usize::try_from(index).unwrap_or(usize::MAX);
        self.head.pow_capped(reps, self.cap)?.concat(tail)
    }

    fn witness(&self, side: Side, m: u64) -> Result<Witness> {
        let block = self.block(side, m)?;
        let len = block.len() as u64;
        let pattern = match (&self.scheme, side) {
            (_, Side::Beta) => self.beta_tail.clone(),
            (D2Scheme::Binary, Side::Alpha) => Word::bin("10"),
            // Most frequent length-s factor, least code on ties.
            (D2Scheme::General { .. }, Side::Alpha) => {
                let l = self.alpha_pattern_len;
                let counts = cyclic_counts(&block, l);
                let best = counts.iter().copied().max().unwrap_or(0);
                let code = counts.iter().position(|&c| c == best).unwrap_or(0);
                Word::from_code(self.base, l, code)
            }
        };
        let pattern_count = cyclic_counts(&block, pattern.len())[pattern.code()];
        let limit = ratio(pattern_count, len);
        let target = inv_pow(self.base as u32, pattern.len() as u32);
        let (threshold, formula) = match (&self.scheme, side) {
            (D2Scheme::Binary, Side::Alpha) => (ratio(4 * m + 3, 16 * m + 8), "(m+3/4)/(4m+2)"),
            (D2Scheme::Binary, Side::Beta) => (ratio(8 * m + 3, 16 * m + 4), "(2m+3/4)/(4m+1)"),
            (D2Scheme::General { .. }, _) => (
                (&limit + &target) / Rational::from_integer(2.into()),
                "(limit + target)/2",
            ),
        };
        if limit <= target || threshold >= limit || threshold <= target {
            return Err(Error::InvalidArgument(format!(
                "block for m={m} does not separate its witness from the normal value"
            )));
        }
        Ok(Witness {
            pattern,
            limit,
            target,
            threshold,
            formula,
        })
    }
}

/// One half of a stage: the `α` or the `β` append.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct D2Side {
    pub case: Case,
    /// `i_p` (or `j_p`).
    pub index: u64,
    pub block_len: u64,
    /// `a_p` (or `b_p`).
    pub copies: u64,
    pub start: u64,
    pub end: u64,
    /// Case 2 only.
    pub witness: Option<Witness>,
    /// Density of the witness pattern over the output up to `end`.
    #[serde(serialize_with = "crate::report::ser_opt_rational")]
    pub density: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct D2StageReport {
    pub stage: u64,
    pub m: u64,
    pub n: u64,
    pub scheme: D2Scheme,
    /// Input digits the stage depends on.
    pub consumed: u64,
    pub alpha: D2Side,
    pub beta: D2Side,
}

#[derive(Clone, Debug)]
pub struct D2Config {
    /// Output digits to produce.
    pub budget: u64,
    /// Replace `F` with `L ∩ F` before running.
    pub normalize: bool,
    /// Largest Case-2 repetition count before giving up.
    pub max_copies: u64,
    /// Ceiling on the length of any single block.
    pub max_block_len: usize,
}

impl D2Config {
    pub fn new(budget: u64) -> Self {
        D2Config {
            budget,
            normalize: false,
            max_copies: 1 << 20,
            max_block_len: DEFAULT_MAX_WORD_LEN,
        }
    }

    pub fn normalized(mut self, on: bool) -> Self {
        self.normalize = on;
        self
    }
}

/// Everything a finished run produced.
#[derive(Clone, Debug, Serialize)]
pub struct D2Run {
    pub scheme: D2Scheme,
    pub initial_index: &'static str,
    pub normalized: bool,
    pub budget: u64,
    #[serde(skip)]
    pub digits: Word,
    pub consumed: u64,
    pub stages: Vec<D2StageReport>,
}

/// Pull-based stream of output digits. Each `next` advances the stage
/// machinery only as far as needed to produce one more digit.
pub struct D2Reducer<X> {
    blocks: Blocks,
    l: Pi03Family,
    f: Pi03Family,
    input: InputPrefix<X>,
    config: D2Config,
    stage: u64,
    prev_i: u64,
    prev_j: u64,
    produced: u64,
    yielded: u64,
    alpha_counter: WindowCounter,
    beta_counter: WindowCounter,
    queue: VecDeque<u8>,
    reports: Vec<D2StageReport>,
    witnesses: HashMap<(Side, u64), Witness>,
    finished: bool,
}

/// Theorem-style reduction with the binary blocks `(0110)^n⌢10`, `(0110)^n⌢0`.
///
/// ```
/// use nlab::pointclass::{Arity, Pi03Family};
/// use nlab::reduce::{d2_reduce, D2Config};
///
/// let full = Pi03Family::full(Arity::Double);
/// let run = d2_reduce(&full, &full, std::iter::repeat(0), D2Config::new(21))
///     .unwrap()
///     .run()
///     .unwrap();
/// assert_eq!(run.digits.to_string(), "011010011000110011010");
/// ```
pub fn d2_reduce<I>(
    l: &Pi03Family,
    f: &Pi03Family,
    x: I,
    config: D2Config,
) -> Result<D2Reducer<I::IntoIter>>
where
    I: IntoIterator<Item = u8>,
{
    D2Reducer::new(D2Scheme::Binary, l, f, x.into_iter(), config)
}

/// The base-`b` variant separating order-`r` from order-`s` normality.
pub fn d2_reduce_general<I>(
    base: u8,
    r: usize,
    s: usize,
    l: &Pi03Family,
    f: &Pi03Family,
    x: I,
    config: D2Config,
) -> Result<D2Reducer<I::IntoIter>>
where
    I: IntoIterator<Item = u8>,
{
    D2Reducer::new(
        D2Scheme::General { base, r, s },
        l,
        f,
        x.into_iter(),
        config,
    )
}

fn threshold_parts(w: &Witness) -> (i128, i128) {
    (
        w.threshold.numer().to_i128().expect("small threshold"),
        w.threshold.denom().to_i128().expect("small threshold"),
    )
}

impl<X: Iterator<Item = u8>> D2Reducer<X> {
    fn new(
        scheme: D2Scheme,
        l: &Pi03Family,
        f: &Pi03Family,
        x: X,
        config: D2Config,
    ) -> Result<Self> {
        for fam in [l, f] {
            if fam.arity() != Arity::Double {
                return Err(Error::ArityMismatch {
                    expected: 2,
                    found: 3,
                });
            }
            if fam.base() != 2 {
                return Err(Error::InvalidArgument(
                    "families must live on the binary sequence space".into(),
                ));
            }
        }
        let f = if config.normalize {
            interleave_intersection(l, f)?
        } else {
            f.clone()
        };
        let blocks = Blocks::new(&scheme, config.max_block_len)?;
        let alpha_counter = WindowCounter::new(blocks.base, blocks.alpha_pattern_len, 1 << 24)?;
        let beta_counter = WindowCounter::new(blocks.base, 1, 1 << 24)?;
        Ok(D2Reducer {
            blocks,
            l: monotonize(l),
            f: monotonize(&f),
            input: InputPrefix::new(x),
            config,
            stage: 0,
            prev_i: 0,
            prev_j: 0,
            produced: 0,
            yielded: 0,
            alpha_counter,
            beta_counter,
            queue: VecDeque::new(),
            reports: Vec::new(),
            witnesses: HashMap::new(),
            finished: false,
        })
    }

    /// Reports of the stages completed so far.
    pub fn reports(&self) -> &[D2StageReport] {
        &self.reports
    }

    /// Input digits read so far.
    pub fn consumed(&self) -> u64 {
        self.reports.last().map_or(0, |r| r.consumed)
    }

    /// Drains the stream up to the budget.
    pub fn run(mut self) -> Result<D2Run> {
        let mut digits = Vec::with_capacity(self.config.budget.min(1 << 24) as usize);
        for d in self.by_ref() {
            digits.push(d?);
        }
        Ok(D2Run {
            scheme: self.blocks.scheme.clone(),
            initial_index: INITIAL_INDEX_NOTE,
            normalized: self.config.normalize,
            budget: self.config.budget,
            digits: Word::new(self.blocks.base, digits)?,
            consumed: self.consumed(),
            stages: self.reports,
        })
    }

    fn push_block(&mut self, block: &Word) {
        for &d in block.digits() {
            self.alpha_counter.push(d);
            self.beta_counter.push(d);
            if self.produced < self.config.budget {
                self.queue.push_back(d);
            }
            self.produced += 1;
        }
    }

    fn witness(&mut self, side: Side, m: u64) -> Result<Witness> {
        if let Some(w) = self.witnesses.get(&(side, m)) {
            return Ok(w.clone());
        }
        let w = self.blocks.witness(side, m)?;
        self.witnesses.insert((side, m), w.clone());
        Ok(w)
    }

    /// Appends one side of the stage; `None` if the budget ran out first.
    fn append(&mut self, side: Side, case: Case, m: u64) -> Result<Option<D2Side>> {
        let prev = match side {
            Side::Alpha => self.prev_i,
            Side::Beta => self.prev_j,
        };
        let index = match case {
            Case::Case1 => prev + 1,
            Case::Case2 => m,
        };
        let block = self.blocks.block(side, index)?;
        let start = self.produced;
        let (copies, witness, density) = match case {
            Case::Case1 => {
                self.push_block(&block);
                (1, None, None)
            }
            Case::Case2 => {
                let w = self.witness(side, m)?;
                let (num, den) = threshold_parts(&w);
                let code = w.pattern.code();
                let mut copies = 0u64;
                loop {
                    self.push_block(&block);
                    copies += 1;
                    let counter = match side {
                        Side::Alpha => &self.alpha_counter,
                        Side::Beta => &self.beta_counter,
                    };
                    let hits = counter.counts()[code] as i128;
                    if hits * den >= num * self.produced as i128 {
                        break;
                    }
                    if self.produced >= self.config.budget {
                        return Ok(None);
                    }
                    if copies >= self.config.max_copies {
                        return Err(Error::SearchCap {
                            what: format!(
                                "repeating block {index} at stage {} ({copies} copies)",
                                self.stage
                            ),
                            condition: format!("density threshold {}", w.formula),
                        });
                    }
                }
                let hits = match side {
                    Side::Alpha => self.alpha_counter.counts()[code],
                    Side::Beta => self.beta_counter.counts()[code],
                };
                (copies, Some(w), Some(ratio(hits, self.produced)))
            }
        };
        match side {
            Side::Alpha => self.prev_i = index,
            Side::Beta => self.prev_j = index,
        }
        Ok(Some(D2Side {
            case,
            index,
            block_len: block.len() as u64,
            copies,
            start,
            end: self.produced,
            witness,
            density,
        }))
    }

    fn run_stage(&mut self) -> Result<()> {
        let p = self.stage;
        let x = self.input.ensure(p as usize)?;
        let case_f = d2_classify(&self.f, x, p)?;
        let case_l = d2_classify(&self.l, x, p)?;
        let (m, n) = unpair(p);
        let Some(alpha) = self.append(Side::Alpha, case_f, m)? else {
            self.finished = true;
            return Ok(());
        };
        let Some(beta) = self.append(Side::Beta, case_l, m)? else {
            self.finished = true;
            return Ok(());
        };
        if beta.end > self.config.budget {
            self.finished = true;
            return Ok(());
        }
        self.reports.push(D2StageReport {
            stage: p,
            m,
            n,
            scheme: self.blocks.scheme.clone(),
            consumed: p,
            alpha,
            beta,
        });
        self.stage += 1;
        if self.produced >= self.config.budget {
            self.finished = true;
        }
        Ok(())
    }
}

impl<X: Iterator<Item = u8>> Iterator for D2Reducer<X> {
    type Item = Result<u8>;

    fn next(&mut self) -> Option<Result<u8>> {
        loop {
            if self.yielded >= self.config.budget {
                return None;
            }
            if let Some(d) = self.queue.pop_front() {
                self.yielded += 1;
                return Some(Ok(d));
            }
            if self.finished {
                return None;
            }
            if let Err(e) = self.run_stage() {
                self.finished = true;
                return Some(Err(e));
            }
        }
    }
}

fn verify_side(
    blocks: &Blocks,
    side_id: Side,
    side: &D2Side,
    m: u64,
    emitted: &[u8],
) -> Option<()> {
    let block = blocks.block(side_id, side.index).ok()?;
    let len = block.len() as u64;
    (side.block_len == len && side.copies >= 1).then_some(())?;
    (side.end.checked_sub(side.start)? == len.checked_mul(side.copies)?).then_some(())?;
    let body = emitted.get(side.start as usize..side.end as usize)?;
    body.chunks(len as usize)
        .all(|c| c == block.digits())
        .then_some(())?;
    match side.case {
        Case::Case1 => (side.copies == 1
            && side.index >= 1
            && side.witness.is_none()
            && side.density.is_none())
        .then_some(()),
        Case::Case2 => {
            (side.index == m).then_some(())?;
            let w = side.witness.as_ref()?;
            (blocks.witness(side_id, m).ok()? == *w).then_some(())?;
            let end = side.end as usize;
            let hits = count_occurrences(w.pattern.digits(), &emitted[..end]);
            let density = ratio(hits as u64, end as u64);
            (side.density.as_ref()? == &density && density >= w.threshold).then_some(())?;
            if side.copies > 1 {
                let before = end - len as usize;
                let hits = count_occurrences(w.pattern.digits(), &emitted[..before]);
                (ratio(hits as u64, before as u64) < w.threshold).then_some(())?;
            }
            Some(())
        }
    }
}

pub(super) fn verify(r: &D2StageReport, emitted: &Word) -> bool {
    let Ok(blocks) = Blocks::new(&r.scheme, DEFAULT_MAX_WORD_LEN) else {
        return false;
    };
    if emitted.base() != blocks.base
        || unpair(r.stage) != (r.m, r.n)
        || r.consumed != r.stage
        || r.alpha.end != r.beta.start
    {
        return false;
    }
    let digits = emitted.digits();
    verify_side(&blocks, Side::Alpha, &r.alpha, r.m, digits).is_some()
        && verify_side(&blocks, Side::Beta, &r.beta, r.m, digits).is_some()
}
