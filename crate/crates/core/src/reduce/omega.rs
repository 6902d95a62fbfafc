//! The ω-difference reduction.
//!
//! Stage `t = ⟨k−1,m,n⟩` appends `i` copies of `η_t` (Case 1) or
//! `τ_{k,m,n}` (Case 2), with `i` the least value found by doubling and
//! then bisecting for which every numbered condition of the stage holds
//! exactly. The modulus conditions compare the modulus of
//! `y_t = σ_{t−1}⌢block^∞` with that of `σ_t⌢next^∞`, where `next` is the
//! block stage `t+1` will use; this is why stage `t+1` is classified first.
//!
//! Some modulus conditions can be refuted outright: once both tables
//! disagree at a point whose last violation lies inside the shared prefix
//! `σ_t`, no larger `i` can repair it. The reducer reports such stages
//! instead of searching forever. In strict mode that report is an error;
//! otherwise the stage falls back to the least `i` meeting the density
//! conditions and records the failed condition.

use std::collections::VecDeque;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use super::{omega_classify, Case, InputPrefix};
use crate::blocks::{r_bound, BlockLibrary, DEFAULT_TAU_SEARCH_CAP};
use crate::density::{count_occurrences, WindowCounter};
use crate::error::{Error, Result};
use crate::pairing::{pair, triple, untriple};
use crate::periodic::{EventuallyPeriodicWord, Grid, ModulusTable};
use crate::pointclass::{monotonize, Arity, Pi03Family};
use crate::rational::{inv_pow, ratio, Rational};
use crate::words::{all_words, Word, DEFAULT_MAX_WORD_LEN};

/// The repeated block of a stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OmegaBlock {
    Eta { order: u64 },
    Tau { k: u64, m: u64, n: u64 },
}

impl OmegaBlock {
    fn for_stage(t: u64, case: Case) -> Self {
        match case {
            Case::Case1 => OmegaBlock::Eta { order: t },
            Case::Case2 => {
                let (row, m, n) = untriple(t);
                OmegaBlock::Tau { k: row + 1, m, n }
            }
        }
    }

    fn word(&self, lib: &BlockLibrary) -> Result<Arc<Word>> {
        match *self {
            OmegaBlock::Eta { order } => lib.good_word(order as usize),
            OmegaBlock::Tau { k, m, n } => Ok(Arc::new(
                lib.tau(k as usize, m as usize, n as usize)?.word.clone(),
            )),
        }
    }
}

/// Why a stage could not meet all of its conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Unattainable {
    /// A modulus mismatch sits inside the prefix every larger `i` shares.
    FixedPrefix,
    /// Growing `i` further would pass the length cap.
    LengthCap,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModulusMismatch {
    pub word: Word,
    pub precision: u32,
    /// `μ_t` at the point.
    pub stage_value: u64,
    /// The modulus of `σ_t⌢next^∞` at the point.
    pub candidate_value: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ConditionDetail {
    /// `|d_α(σ_t) − 2^{−|α|}| < tolerance` for `1 <= |α| <= max_len`.
    Deviation {
        max_len: usize,
        #[serde(serialize_with = "crate::report::ser_rational")]
        tolerance: Rational,
        worst_word: Option<Word>,
        #[serde(serialize_with = "crate::report::ser_rational")]
        worst_deviation: Rational,
    },
    /// `d_word(σ_t) < bound`.
    Cap {
        word: Word,
        #[serde(serialize_with = "crate::report::ser_rational")]
        density: Rational,
        #[serde(serialize_with = "crate::report::ser_rational")]
        bound: Rational,
    },
    /// Table-for-table equality of two moduli on the listed grids.
    Modulus {
        grids: Vec<Grid>,
        compared: usize,
        mismatch: Option<ModulusMismatch>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub id: &'static str,
    pub holds: bool,
    #[serde(flatten)]
    pub detail: ConditionDetail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OmegaStageReport {
    pub stage: u64,
    pub k: u64,
    pub m: u64,
    pub n: u64,
    pub case: Case,
    pub next_case: Case,
    pub block: OmegaBlock,
    pub next_block: OmegaBlock,
    pub block_len: u64,
    pub copies: u64,
    pub start: u64,
    pub end: u64,
    pub consumed: u64,
    pub conditions: Vec<ConditionReport>,
    /// Set when the stage settled for fewer than all conditions.
    pub unmet: Option<Unattainable>,
}

#[derive(Clone, Debug)]
pub struct OmegaConfig {
    /// Last stage to run (inclusive).
    pub max_stage: u64,
    /// Ceiling on `|σ_t|` and on every block.
    pub max_word_len: usize,
    /// Fail instead of recording a stage whose conditions cannot all hold.
    pub strict: bool,
    pub tau_search_cap: usize,
}

impl OmegaConfig {
    pub fn new(max_stage: u64) -> Self {
        OmegaConfig {
            max_stage,
            max_word_len: DEFAULT_MAX_WORD_LEN,
            strict: true,
            tau_search_cap: DEFAULT_TAU_SEARCH_CAP,
        }
    }

    pub fn strict(mut self, on: bool) -> Self {
        self.strict = on;
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaRun {
    pub max_stage: u64,
    pub strict: bool,
    pub notes: Vec<&'static str>,
    #[serde(skip)]
    pub digits: Word,
    pub consumed: u64,
    pub stages: Vec<OmegaStageReport>,
}

/// Interpretation notes attached to every run.
pub const OMEGA_NOTES: [&str; 3] = [
    crate::blocks::ETA_KM_READING,
    "the (2a) comparison word is sigma_t followed by eta_{t+1} repeated",
    "stage t+1 is classified before sigma_t is fixed",
];

/// What a stage must satisfy.
#[derive(Clone, Debug)]
struct Plan {
    deviations: Vec<(&'static str, usize, u32)>,
    cap: Option<(Word, Rational)>,
    modulus_id: &'static str,
    grids: Vec<Grid>,
}

impl Plan {
    fn new(
        t: u64,
        case: Case,
        next_case: Case,
        absent: impl Fn(u64) -> Result<Word>,
    ) -> Result<Self> {
        let (row, m, _) = untriple(t);
        let k = row + 1;
        let (row2, m2, _) = untriple(t + 1);
        let k2 = row2 + 1;
        let tt = t as usize;
        let narrow = |a: u64| usize::try_from(a).unwrap_or(usize::MAX);
        let t32 = u32::try_from(t).unwrap_or(u32::MAX);
        let (deviations, cap) = match case {
            Case::Case1 => (vec![("1", tt, t32)], None),
            Case::Case2 => (
                vec![
                    ("3", narrow(k + m), (k + m) as u32),
                    ("4", narrow(k - 1), t32),
                ],
                Some((absent(k)?, r_bound(k as usize, m as usize))),
            ),
        };
        let (modulus_id, grids) = match (case, next_case) {
            (Case::Case1, Case::Case1) => ("2a", vec![Grid::new(tt, t32)]),
            (Case::Case1, Case::Case2) => {
                let p = t.min(k2 + m2);
                let ks = t.min(k2 - 1);
                (
                    "2b",
                    vec![Grid::new(narrow(p), p as u32), Grid::new(narrow(ks), t32)],
                )
            }
            (Case::Case2, Case::Case1) => {
                let p = (k + m).min(t + 1);
                let ks = (k - 1).min(t + 1);
                (
                    "6a",
                    vec![Grid::new(narrow(p), p as u32), Grid::new(narrow(ks), t32)],
                )
            }
            (Case::Case2, Case::Case2) => {
                let p = (k + m).min(k2 + m2);
                let ks = (k - 1).min(k2 - 1);
                (
                    "6b",
                    vec![Grid::new(narrow(p), p as u32), Grid::new(narrow(ks), t32)],
                )
            }
        };
        Ok(Plan {
            deviations,
            cap,
            modulus_id,
            grids,
        })
    }

    fn max_count_len(&self) -> usize {
        let dev = self.deviations.iter().map(|d| d.1).max().unwrap_or(0);
        let cap = self.cap.as_ref().map_or(0, |c| c.0.len());
        dev.max(cap)
    }
}

/// Deviation check on counts of every word of length `1..=max_len`.
fn deviation_report(
    id: &'static str,
    max_len: usize,
    exp: u32,
    counts: &dyn Fn(usize) -> Vec<u64>,
    total: u64,
) -> ConditionReport {
    let n = total as i128;
    let mut holds = true;
    let mut worst: Option<(i128, i128, Word)> = None;
    for l in 1..=max_len {
        let scale = 1i128 << l;
        for (code, &c) in counts(l).iter().enumerate() {
            let dev = (c as i128 * scale - n).abs();
            if (dev << exp) >= n * scale {
                holds = false;
            }
            let better = match &worst {
                None => true,
                Some((d, s, _)) => dev * s > d * scale,
            };
            if better {
                worst = Some((dev, scale, Word::from_code(2, l, code)));
            }
        }
    }
    let (worst_word, worst_deviation) = match worst {
        Some((d, s, w)) => (Some(w), ratio(d, n * s)),
        None => (None, ratio(0, 1)),
    };
    ConditionReport {
        id,
        holds,
        detail: ConditionDetail::Deviation {
            max_len,
            tolerance: inv_pow(2, exp),
            worst_word,
            worst_deviation,
        },
    }
}

fn cap_report(word: &Word, bound: &Rational, hits: u64, total: u64) -> ConditionReport {
    let density = ratio(hits, total);
    ConditionReport {
        id: "5",
        holds: density < *bound,
        detail: ConditionDetail::Cap {
            word: word.clone(),
            density,
            bound: bound.clone(),
        },
    }
}

/// Compares two tables over `grids`; the second value reports a mismatch
/// that no longer `i` can undo, given the shared prefix length.
fn compare_tables(
    stage: &ModulusTable,
    candidate: &ModulusTable,
    grids: &[Grid],
    shared: u64,
) -> (usize, Option<ModulusMismatch>, bool) {
    let mut compared = 0;
    let mut first = None;
    let mut fixed = false;
    for g in grids {
        for l in 1..=g.max_len {
            for alpha in all_words(2, l) {
                for p in 0..=g.max_precision {
                    compared += 1;
                    let a = stage.get(&alpha, p).unwrap_or(u64::MAX);
                    let b = candidate.get(&alpha, p).unwrap_or(u64::MAX);
                    if a != b {
                        if a.max(b) - 1 <= shared {
                            fixed = true;
                        }
                        if first.is_none() {
                            first = Some(ModulusMismatch {
                                word: alpha.clone(),
                                precision: p,
                                stage_value: a,
                                candidate_value: b,
                            });
                        }
                    }
                }
            }
        }
    }
    (compared, first, fixed)
}

fn modulus_report(
    id: &'static str,
    grids: &[Grid],
    compared: usize,
    mismatch: Option<ModulusMismatch>,
) -> ConditionReport {
    ConditionReport {
        id,
        holds: mismatch.is_none(),
        detail: ConditionDetail::Modulus {
            grids: grids.to_vec(),
            compared,
            mismatch,
        },
    }
}

struct Evaluation {
    conditions: Vec<ConditionReport>,
    density_ok: bool,
    modulus_ok: bool,
    fixed_mismatch: bool,
}

/// Pull-based stream of `f(x)`'s digits for stages `0..=max_stage`.
pub struct OmegaReducer<X> {
    fam: Pi03Family,
    input: InputPrefix<X>,
    config: OmegaConfig,
    lib: BlockLibrary,
    stage: u64,
    sigma: Vec<u8>,
    counters: Vec<WindowCounter>,
    queue: VecDeque<u8>,
    reports: Vec<OmegaStageReport>,
    consumed: u64,
    finished: bool,
}

/// Builds the reducer for a triple-indexed family.
///
/// ```
/// use nlab::pointclass::{Arity, Pi03Family};
/// use nlab::reduce::{omega_reduce, OmegaConfig};
///
/// let full = Pi03Family::full(Arity::Triple);
/// let run = omega_reduce(&full, std::iter::repeat(0), OmegaConfig::new(0))
///     .unwrap()
///     .run()
///     .unwrap();
/// assert_eq!(run.digits.to_string(), "0");
/// ```
pub fn omega_reduce<I>(
    fam: &Pi03Family,
    x: I,
    config: OmegaConfig,
) -> Result<OmegaReducer<I::IntoIter>>
where
    I: IntoIterator<Item = u8>,
{
    if fam.arity() != Arity::Triple {
        return Err(Error::ArityMismatch {
            expected: 3,
            found: 2,
        });
    }
    if fam.base() != 2 {
        return Err(Error::InvalidArgument(
            "families must live on the binary sequence space".into(),
        ));
    }
    let lookahead = config.max_stage + 1;
    if lookahead >= 63 || (1usize << lookahead) > config.max_word_len {
        return Err(Error::ResourceCap {
            what: format!("de Bruijn block for stage {lookahead}"),
            requested: 1u128 << lookahead.min(127),
            cap: config.max_word_len,
        });
    }
    let lib = BlockLibrary::with_limits(2, config.max_word_len, config.tau_search_cap)?;
    Ok(OmegaReducer {
        fam: monotonize(fam),
        input: InputPrefix::new(x.into_iter()),
        config,
        lib,
        stage: 0,
        sigma: Vec::new(),
        counters: Vec::new(),
        queue: VecDeque::new(),
        reports: Vec::new(),
        consumed: 0,
        finished: false,
    })
}

impl<X: Iterator<Item = u8>> OmegaReducer<X> {
    pub fn reports(&self) -> &[OmegaStageReport] {
        &self.reports
    }

    pub fn run(mut self) -> Result<OmegaRun> {
        let mut digits = Vec::new();
        for d in self.by_ref() {
            digits.push(d?);
        }
        Ok(OmegaRun {
            max_stage: self.config.max_stage,
            strict: self.config.strict,
            notes: OMEGA_NOTES.to_vec(),
            digits: Word::new(2, digits)?,
            consumed: self.consumed,
            stages: self.reports,
        })
    }

    fn ensure_counters(&mut self, max_len: usize) -> Result<()> {
        while self.counters.len() < max_len {
            let mut c = WindowCounter::new(2, self.counters.len() + 1, 1 << 26)?;
            c.extend(&self.sigma);
            self.counters.push(c);
        }
        Ok(())
    }

    fn evaluate(
        &self,
        plan: &Plan,
        block: &Word,
        next: &Word,
        stage_table: &ModulusTable,
        copies: u64,
        with_modulus: bool,
    ) -> Result<Evaluation> {
        let need = plan.max_count_len();
        let mut counters: Vec<WindowCounter> = self.counters[..need].to_vec();
        for _ in 0..copies {
            for c in counters.iter_mut() {
                c.extend(block.digits());
            }
        }
        let total = self.sigma.len() as u64 + copies * block.len() as u64;
        let counts = |l: usize| counters[l - 1].counts().to_vec();
        let mut conditions: Vec<ConditionReport> = plan
            .deviations
            .iter()
            .map(|&(id, max_len, exp)| deviation_report(id, max_len, exp, &counts, total))
            .collect();
        if let Some((word, bound)) = &plan.cap {
            let hits = counters[word.len() - 1].counts()[word.code()];
            conditions.push(cap_report(word, bound, hits, total));
        }
        let density_ok = conditions.iter().all(|c| c.holds);
        let mut modulus_ok = true;
        let mut fixed_mismatch = false;
        if with_modulus {
            let mut prefix = self.sigma.clone();
            for _ in 0..copies {
                prefix.extend_from_slice(block.digits());
            }
            let w = EventuallyPeriodicWord::new(Word::new(2, prefix)?, next.clone())?;
            let table = ModulusTable::compute(&w, &plan.grids, usize::MAX)?;
            let (compared, mismatch, fixed) =
                compare_tables(stage_table, &table, &plan.grids, total);
            modulus_ok = mismatch.is_none();
            fixed_mismatch = fixed;
            conditions.push(modulus_report(
                plan.modulus_id,
                &plan.grids,
                compared,
                mismatch,
            ));
        }
        Ok(Evaluation {
            conditions,
            density_ok,
            modulus_ok,
            fixed_mismatch,
        })
    }

    /// Least `i` (doubling, then bisection) accepted by `accept`, or why the
    /// search stopped.
    fn search(
        &self,
        block: &Word,
        accept: &dyn Fn(u64) -> Result<(bool, bool)>,
    ) -> Result<std::result::Result<u64, Unattainable>> {
        let room = self.config.max_word_len.saturating_sub(self.sigma.len()) as u64;
        let max_copies = room / block.len() as u64;
        let mut fail = 0u64;
        let mut i = 1u64;
        let pass = loop {
            if i > max_copies {
                return Ok(Err(Unattainable::LengthCap));
            }
            let (ok, doomed) = accept(i)?;
            if ok {
                break i;
            }
            if doomed {
                return Ok(Err(Unattainable::FixedPrefix));
            }
            fail = i;
            i *= 2;
        };
        let (mut lo, mut hi) = (fail, pass);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if accept(mid)?.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(Ok(hi))
    }

    fn run_stage(&mut self) -> Result<()> {
        let t = self.stage;
        let (row, m, n) = untriple(t);
        let (_, m2, n2) = untriple(t + 1);
        let need = pair(m, n).max(pair(m2, n2));
        let x = self.input.ensure(need as usize)?;
        let case = omega_classify(&self.fam, x, t)?;
        let next_case = omega_classify(&self.fam, x, t + 1)?;
        self.consumed = self.consumed.max(need);

        let block_id = OmegaBlock::for_stage(t, case);
        let next_id = OmegaBlock::for_stage(t + 1, next_case);
        let block = block_id.word(&self.lib)?;
        let next = next_id.word(&self.lib)?;
        let plan = Plan::new(t, case, next_case, |k| {
            self.lib.absent_word(k as usize).map(|w| (*w).clone())
        })?;
        self.ensure_counters(plan.max_count_len())?;

        let y_t = EventuallyPeriodicWord::new(Word::new(2, self.sigma.clone())?, (*block).clone())?;
        let stage_table = ModulusTable::compute(&y_t, &plan.grids, usize::MAX)?;

        let full = |i: u64| -> Result<(bool, bool)> {
            let e = self.evaluate(&plan, &block, &next, &stage_table, i, true)?;
            Ok((e.density_ok && e.modulus_ok, e.fixed_mismatch))
        };
        let (copies, unmet) = match self.search(&block, &full)? {
            Ok(i) => (i, None),
            Err(why) => {
                if self.config.strict {
                    let i = self.search(&block, &|i| {
                        let e = self.evaluate(&plan, &block, &next, &stage_table, i, false)?;
                        Ok((e.density_ok, false))
                    })?;
                    let probe = i.unwrap_or(1);
                    let e = self.evaluate(&plan, &block, &next, &stage_table, probe, true)?;
                    let failing = e
                        .conditions
                        .iter()
                        .find(|c| !c.holds)
                        .map_or_else(|| plan.modulus_id.to_string(), describe);
                    return Err(Error::SearchCap {
                        what: format!("choosing the repetition count at stage {t} ({why:?})"),
                        condition: failing,
                    });
                }
                let density_only = |i: u64| -> Result<(bool, bool)> {
                    let e = self.evaluate(&plan, &block, &next, &stage_table, i, false)?;
                    Ok((e.density_ok, false))
                };
                match self.search(&block, &density_only)? {
                    Ok(i) => (i, Some(why)),
                    Err(_) => {
                        return Err(Error::ResourceCap {
                            what: format!("density conditions at stage {t}"),
                            requested: self.config.max_word_len as u128 + 1,
                            cap: self.config.max_word_len,
                        })
                    }
                }
            }
        };
        let eval = self.evaluate(&plan, &block, &next, &stage_table, copies, true)?;

        let start = self.sigma.len() as u64;
        for _ in 0..copies {
            self.sigma.extend_from_slice(block.digits());
            self.queue.extend(block.digits());
            for c in self.counters.iter_mut() {
                c.extend(block.digits());
            }
        }
        self.reports.push(OmegaStageReport {
            stage: t,
            k: row + 1,
            m,
            n,
            case,
            next_case,
            block: block_id,
            next_block: next_id,
            block_len: block.len() as u64,
            copies,
            start,
            end: self.sigma.len() as u64,
            consumed: need,
            conditions: eval.conditions,
            unmet,
        });
        self.stage += 1;
        Ok(())
    }
}

fn describe(c: &ConditionReport) -> String {
    match &c.detail {
        ConditionDetail::Modulus {
            mismatch: Some(mm), ..
        } => format!(
            "({}) modulus at ({}, {}): {} vs {}",
            c.id, mm.word, mm.precision, mm.stage_value, mm.candidate_value
        ),
        _ => format!("({})", c.id),
    }
}

impl<X: Iterator<Item = u8>> Iterator for OmegaReducer<X> {
    type Item = Result<u8>;

    fn next(&mut self) -> Option<Result<u8>> {
        loop {
            if let Some(d) = self.queue.pop_front() {
                return Some(Ok(d));
            }
            if self.finished || self.stage > self.config.max_stage {
                return None;
            }
            if let Err(e) = self.run_stage() {
                self.finished = true;
                return Some(Err(e));
            }
        }
    }
}

fn shared_library() -> &'static BlockLibrary {
    static LIB: OnceLock<BlockLibrary> = OnceLock::new();
    LIB.get_or_init(|| BlockLibrary::new(2).expect("binary library"))
}

fn verify_inner(r: &OmegaStageReport, emitted: &Word) -> Option<()> {
    let lib = shared_library();
    (r.k >= 1 && triple(r.k - 1, r.m, r.n) == r.stage).then_some(())?;
    (OmegaBlock::for_stage(r.stage, r.case) == r.block).then_some(())?;
    (OmegaBlock::for_stage(r.stage + 1, r.next_case) == r.next_block).then_some(())?;
    let (_, m2, n2) = untriple(r.stage + 1);
    (r.consumed == pair(r.m, r.n).max(pair(m2, n2))).then_some(())?;
    let block = r.block.word(lib).ok()?;
    let next = r.next_block.word(lib).ok()?;
    let len = block.len() as u64;
    (r.block_len == len && r.copies >= 1).then_some(())?;
    (r.end.checked_sub(r.start)? == len.checked_mul(r.copies)?).then_some(())?;
    let digits = emitted.digits();
    let body = digits.get(r.start as usize..r.end as usize)?;
    body.chunks(len as usize)
        .all(|c| c == block.digits())
        .then_some(())?;
    let sigma = &digits[..r.end as usize];
    let total = sigma.len() as u64;

    let plan = Plan::new(r.stage, r.case, r.next_case, |k| {
        lib.absent_word(k as usize).map(|w| (*w).clone())
    })
    .ok()?;
    let mut expected = Vec::new();
    let counts = |l: usize| {
        let mut c = WindowCounter::new(2, l, 1 << 26).expect("small window");
        c.extend(sigma);
        c.counts().to_vec()
    };
    for &(id, max_len, exp) in &plan.deviations {
        expected.push(deviation_report(id, max_len, exp, &counts, total));
    }
    if let Some((word, bound)) = &plan.cap {
        // Independent recount of the capped word.
        let hits = count_occurrences(word.digits(), sigma) as u64;
        expected.push(cap_report(word, bound, hits, total));
    }
    let prev = Word::new(2, digits[..r.start as usize].to_vec()).ok()?;
    let y_t = EventuallyPeriodicWord::new(prev, (*block).clone()).ok()?;
    let stage_table = ModulusTable::compute(&y_t, &plan.grids, usize::MAX).ok()?;
    let cand =
        EventuallyPeriodicWord::new(Word::new(2, sigma.to_vec()).ok()?, (*next).clone()).ok()?;
    let table = ModulusTable::compute(&cand, &plan.grids, usize::MAX).ok()?;
    let (compared, mismatch, _) = compare_tables(&stage_table, &table, &plan.grids, total);
    expected.push(modulus_report(
        plan.modulus_id,
        &plan.grids,
        compared,
        mismatch,
    ));

    (expected == r.conditions).then_some(())?;
    r.conditions.iter().all(|c| c.holds).then_some(())
}

pub(super) fn verify(r: &OmegaStageReport, emitted: &Word) -> bool {
    emitted.base() == 2 && verify_inner(r, emitted).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointclass::ClosedSet;
    use crate::reduce::{verify_stage, StageReport};
    use std::iter::repeat;

    fn verify_all(run: &OmegaRun) -> Vec<bool> {
        run.stages
            .iter()
            .map(|r| verify_stage(&StageReport::Omega(r.clone()), &run.digits))
            .collect()
    }

    #[test]
    fn degenerate_first_stage() {
        let full = Pi03Family::full(Arity::Triple);
        let run = omega_reduce(&full, repeat(0), OmegaConfig::new(0))
            .unwrap()
            .run()
            .unwrap();
        assert_eq!(run.digits, Word::bin("0"));
        let s = &run.stages[0];
        assert_eq!(
            (s.case, s.next_case, s.copies),
            (Case::Case1, Case::Case1, 1)
        );
        assert_eq!(verify_all(&run), vec![true]);
    }

    #[test]
    fn full_family_stages_verify() {
        let full = Pi03Family::full(Arity::Triple);
        let run = omega_reduce(&full, repeat(0), OmegaConfig::new(5))
            .unwrap()
            .run()
            .unwrap();
        assert_eq!(run.stages.len(), 6);
        for (t, s) in run.stages.iter().enumerate() {
            assert_eq!(s.block, OmegaBlock::Eta { order: t as u64 });
            assert!(s.unmet.is_none());
            let ids: Vec<_> = s.conditions.iter().map(|c| c.id).collect();
            assert_eq!(ids, vec!["1", "2a"]);
        }
        assert!(verify_all(&run).into_iter().all(|v| v));
        // Condition (1) by brute-force recount at the last boundary.
        let last = run.stages.last().unwrap();
        let sigma = run.digits.prefix(last.end as usize);
        for l in 1..=5 {
            for a in all_words(2, l) {
                let d = crate::density(&a, &sigma).unwrap();
                let dev = if d > inv_pow(2, l as u32) {
                    d - inv_pow(2, l as u32)
                } else {
                    inv_pow(2, l as u32) - d
                };
                assert!(dev < inv_pow(2, 5));
            }
        }
    }

    #[test]
    fn empty_family_meets_the_cap_condition() {
        let empty = Pi03Family::empty(Arity::Triple);
        let run = omega_reduce(&empty, repeat(0), OmegaConfig::new(3).strict(false))
            .unwrap()
            .run()
            .unwrap();
        for s in &run.stages {
            assert_eq!(s.case, Case::Case2);
            let cap = s.conditions.iter().find(|c| c.id == "5").unwrap();
            assert!(cap.holds);
            let ConditionDetail::Cap {
                density,
                bound,
                word,
            } = &cap.detail
            else {
                panic!("condition 5 is a cap")
            };
            assert!(density < bound && *bound < inv_pow(2, s.k as u32));
            let sigma = run.digits.prefix(s.end as usize);
            assert_eq!(crate::density(word, &sigma).unwrap(), *density);
        }
    }

    #[test]
    fn strict_mode_names_the_condition() {
        let empty = Pi03Family::empty(Arity::Triple);
        let mut r = omega_reduce(&empty, repeat(0), OmegaConfig::new(3)).unwrap();
        let outcome: Result<Vec<u8>> = r.by_ref().collect();
        if let Err(Error::SearchCap { condition, .. }) = outcome {
            assert!(condition.starts_with('('));
        }
    }

    #[test]
    fn tampered_reports_fail() {
        let full = Pi03Family::full(Arity::Triple);
        let run = omega_reduce(&full, repeat(0), OmegaConfig::new(3))
            .unwrap()
            .run()
            .unwrap();
        let mut r = run.stages[2].clone();
        assert!(verify_stage(&StageReport::Omega(r.clone()), &run.digits));
        r.copies += 1;
        assert!(!verify_stage(&StageReport::Omega(r), &run.digits));
        let mut r = run.stages[2].clone();
        if let ConditionDetail::Deviation { tolerance, .. } = &mut r.conditions[0].detail {
            *tolerance = ratio(1, 1);
        }
        assert!(!verify_stage(&StageReport::Omega(r), &run.digits));
    }

    #[test]
    fn k_two_rows_go_to_case_two() {
        let fam = Pi03Family::builder_triple(false)
            .slice_k(1, ClosedSet::Full)
            .build();
        let run = omega_reduce(&fam, repeat(0), OmegaConfig::new(4).strict(false))
            .unwrap()
            .run()
            .unwrap();
        for s in &run.stages {
            assert_eq!(s.case == Case::Case1, s.k == 1, "stage {}", s.stage);
        }
    }

    #[test]
    fn arity_and_cap_errors() {
        let d = Pi03Family::full(Arity::Double);
        assert!(omega_reduce(&d, repeat(0), OmegaConfig::new(2)).is_err());
        let t = Pi03Family::full(Arity::Triple);
        let mut cfg = OmegaConfig::new(30);
        cfg.max_word_len = 1 << 20;
        assert!(matches!(
            omega_reduce(&t, repeat(0), cfg),
            Err(Error::ResourceCap { .. })
        ));
    }
}
