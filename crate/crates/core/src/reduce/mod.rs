//! Continuous reductions as digit-stream transducers.
//!
//! [`d2_reduce`] and [`d2_reduce_general`] map a binary input `x` to the
//! expansion `α_{i_0}^{a_0} β_{j_0}^{b_0} α_{i_1}^{a_1} …`, and
//! [`omega_reduce`] builds `σ_0 ⪯ σ_1 ⪯ …` from de Bruijn and `τ` blocks.
//! Every stage leaves a report whose inequalities [`verify_stage`] can
//! recheck against the emitted digits.

mod d2;
mod omega;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pairing::{pair, unpair, untriple};
use crate::pointclass::{Arity, FamilyIndex, Pi03Family};
use crate::words::Word;

pub use d2::{
    d2_reduce, d2_reduce_general, D2Config, D2Reducer, D2Run, D2Scheme, D2Side, D2StageReport,
    Witness, INITIAL_INDEX_NOTE,
};
pub use omega::{
    omega_reduce, ConditionDetail, ConditionReport, ModulusMismatch, OmegaBlock, OmegaConfig,
    OmegaReducer, OmegaRun, OmegaStageReport, Unattainable,
};

/// Which branch of the stage definition applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Case {
    Case1,
    Case2,
}

/// Shared case test for row `m`, column `n`: Case 1 iff `[x↾⟨m,n⟩]` meets
/// the `n`-th set and no earlier set that met `[x↾⟨m,n−1⟩]` has since been
/// lost.
fn classify_row(
    query: impl Fn(u64, &Word) -> Result<bool>,
    x: &Word,
    m: u64,
    n: u64,
) -> Result<Case> {
    let p = pair(m, n) as usize;
    if x.len() < p {
        return Err(Error::InvalidArgument(format!(
            "classification at ({m},{n}) needs {p} input digits, got {}",
            x.len()
        )));
    }
    let now = x.prefix(p);
    if !query(n, &now)? {
        return Ok(Case::Case2);
    }
    if n > 0 {
        let before = x.prefix(pair(m, n - 1) as usize);
        for earlier in 0..n {
            if query(earlier, &before)? && !query(earlier, &now)? {
                return Ok(Case::Case2);
            }
        }
    }
    Ok(Case::Case1)
}

/// Case of stage `p = ⟨m,n⟩` for a double-indexed family.
pub fn d2_classify(fam: &Pi03Family, x_prefix: &Word, p: u64) -> Result<Case> {
    if fam.arity() != Arity::Double {
        return Err(Error::ArityMismatch {
            expected: 2,
            found: 3,
        });
    }
    let (m, n) = unpair(p);
    classify_row(
        |n, sigma| fam.query(FamilyIndex::double(m, n), sigma),
        x_prefix,
        m,
        n,
    )
}

/// Case of stage `t = ⟨k−1,m,n⟩` for a triple-indexed family (`k >= 1`).
pub fn omega_classify(fam: &Pi03Family, x_prefix: &Word, t: u64) -> Result<Case> {
    if fam.arity() != Arity::Triple {
        return Err(Error::ArityMismatch {
            expected: 3,
            found: 2,
        });
    }
    let (row, m, n) = untriple(t);
    classify_row(
        |n, sigma| fam.query(FamilyIndex::triple(row + 1, m, n), sigma),
        x_prefix,
        m,
        n,
    )
}

/// Input digits pulled so far, with on-demand extension.
pub(crate) struct InputPrefix<X> {
    source: X,
    seen: Word,
}

impl<X: Iterator<Item = u8>> InputPrefix<X> {
    pub(crate) fn new(source: X) -> Self {
        InputPrefix {
            source,
            seen: Word::empty(2),
        }
    }

    pub(crate) fn ensure(&mut self, n: usize) -> Result<&Word> {
        while self.seen.len() < n {
            let d = self.source.next().ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "input stream ended after {} digits",
                    self.seen.len()
                ))
            })?;
            self.seen.push(d)?;
        }
        Ok(&self.seen)
    }
}

/// A stage record from either reducer.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
#[allow(clippy::large_enum_variant)] // built on the fly and passed by reference
pub enum StageReport {
    D2(D2StageReport),
    Omega(OmegaStageReport),
}

/// Recomputes every inequality in `report` from `emitted` alone.
pub fn verify_stage(report: &StageReport, emitted: &Word) -> bool {
    match report {
        StageReport::D2(r) => d2::verify(r, emitted),
        StageReport::Omega(r) => omega::verify(r, emitted),
    }
}

const BITS_MAGIC: &[u8; 13] = b"NLAB-BITS v1\n";

/// Largest bit count the 24-bit length field can carry.
pub const MAX_PACKED_BITS: usize = (1 << 24) - 1;

/// Packs a binary word: the 13-byte magic, the bit count as a 3-byte
/// big-endian integer, then the bits most significant first.
pub fn pack_bits(word: &Word) -> Result<Vec<u8>> {
    if word.base() != 2 {
        return Err(Error::InvalidArgument(
            "packed output is only defined for base 2".into(),
        ));
    }
    let n = word.len();
    if n > MAX_PACKED_BITS {
        return Err(Error::ResourceCap {
            what: "packed bit stream".into(),
            requested: n as u128,
            cap: MAX_PACKED_BITS,
        });
    }
    let mut out = Vec::with_capacity(16 + n.div_ceil(8));
    out.extend_from_slice(BITS_MAGIC);
    out.extend_from_slice(&(n as u32).to_be_bytes()[1..]);
    for chunk in word.digits().chunks(8) {
        let byte = chunk
            .iter()
            .enumerate()
            .fold(0u8, |acc, (i, &b)| acc | (b << (7 - i)));
        out.push(byte);
    }
    Ok(out)
}

pub fn unpack_bits(bytes: &[u8]) -> Result<Word> {
    if bytes.len() < 16 || &bytes[..13] != BITS_MAGIC {
        return Err(Error::Parse("missing packed-bits header".into()));
    }
    let n = u32::from_be_bytes([0, bytes[13], bytes[14], bytes[15]]) as usize;
    let body = &bytes[16..];
    if body.len() != n.div_ceil(8) {
        return Err(Error::Parse(format!(
            "header declares {n} bits but the body has {} bytes",
            body.len()
        )));
    }
    let digits = (0..n).map(|i| (body[i / 8] >> (7 - i % 8)) & 1).collect();
    Word::new(2, digits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointclass::{ClosedSet, Pi03Family};
    use crate::words::all_words;
    use proptest::prelude::*;

    /// Both displayed case conditions, evaluated literally.
    fn displayed(query: impl Fn(u64, &Word) -> bool, x: &Word, m: u64, n: u64) -> (bool, bool) {
        let now = x.prefix(pair(m, n) as usize);
        let before = (n > 0).then(|| x.prefix(pair(m, n - 1) as usize));
        let kept = |e: u64| -> bool {
            match &before {
                Some(b) => !query(e, b) || query(e, &now),
                None => true,
            }
        };
        let lost = |e: u64| -> bool {
            match &before {
                Some(b) => query(e, b) && !query(e, &now),
                None => false,
            }
        };
        let case1 = query(n, &now) && (0..n).all(kept);
        let case2 = !query(n, &now) || (0..n).any(lost);
        (case1, case2)
    }

    fn coord_rows(default_full: bool) -> Pi03Family {
        let mut b = Pi03Family::builder_double(default_full);
        for m in 0..6 {
            b = b.at(
                FamilyIndex::double(m, m % 3),
                ClosedSet::Coord {
                    index: m as usize,
                    digit: 0,
                },
            );
            b = b.at(
                FamilyIndex::double(m, 2 + m % 2),
                ClosedSet::Coord {
                    index: (m + 1) as usize,
                    digit: 1,
                },
            );
        }
        b.build()
    }

    #[test]
    fn trivial_classification() {
        let full = Pi03Family::full(Arity::Double);
        let empty = Pi03Family::empty(Arity::Double);
        let x = Word::bin("0110100110010110");
        for p in 0..16 {
            assert_eq!(d2_classify(&full, &x, p).unwrap(), Case::Case1);
            assert_eq!(d2_classify(&empty, &x, p).unwrap(), Case::Case2);
        }
        let tfull = Pi03Family::full(Arity::Triple);
        let tempty = Pi03Family::empty(Arity::Triple);
        for t in 0..16 {
            assert_eq!(omega_classify(&tfull, &x, t).unwrap(), Case::Case1);
            assert_eq!(omega_classify(&tempty, &x, t).unwrap(), Case::Case2);
        }
        assert!(d2_classify(&tfull, &x, 0).is_err());
        assert!(omega_classify(&full, &x, 0).is_err());
        assert!(d2_classify(&full, &Word::bin("01"), 9).is_err());
    }

    #[test]
    fn coordinate_family_on_ones() {
        // F_{m,n} = {x : x(m) = 0}; on 1^∞ every query past position m fails.
        let mut b = Pi03Family::builder_double(true);
        for m in 0..4 {
            b = b.row(
                m,
                ClosedSet::Coord {
                    index: m as usize,
                    digit: 0,
                },
            );
        }
        let fam = crate::pointclass::monotonize(&b.build());
        let ones = Word::repeat_digit(2, 1, 64).unwrap();
        for n in 0..8 {
            let p = pair(1, n);
            let expect = if p as usize > 1 {
                Case::Case2
            } else {
                Case::Case1
            };
            assert_eq!(d2_classify(&fam, &ones, p).unwrap(), expect, "n = {n}");
        }
    }

    #[test]
    fn triple_coordinate_family() {
        let mut b = Pi03Family::builder_triple(true);
        for m in 0..4 {
            b = b.pattern(
                Some(2),
                Some(m),
                None,
                ClosedSet::Coord {
                    index: m as usize,
                    digit: 0,
                },
            );
        }
        let fam = b.build();
        let ones = Word::repeat_digit(2, 1, 256).unwrap();
        for t in 0..200u64 {
            let (row, m, n) = untriple(t);
            let case = omega_classify(&fam, &ones, t).unwrap();
            let (c1, c2) = displayed(
                |e, s| fam.query(FamilyIndex::triple(row + 1, m, e), s).unwrap(),
                &ones,
                m,
                n,
            );
            assert!(c1 ^ c2);
            assert_eq!(case == Case::Case2, c2);
            if row + 1 != 2 {
                assert_eq!(case, Case::Case1);
            } else if m < 4 && pair(m, n) as usize > m as usize {
                assert_eq!(case, Case::Case2);
            }
        }
    }

    proptest! {
        #[test]
        fn dichotomy_matches_displayed_conditions(
            bits in proptest::collection::vec(0u8..2, 64),
            p in 0u64..60,
            full_default in any::<bool>(),
            mono in any::<bool>(),
        ) {
            let base = coord_rows(full_default);
            let fam = if mono { crate::pointclass::monotonize(&base) } else { base };
            let x = Word::new(2, bits).unwrap();
            let (m, n) = unpair(p);
            let (c1, c2) = displayed(
                |e, s| fam.query(FamilyIndex::double(m, e), s).unwrap(),
                &x, m, n,
            );
            prop_assert!(c1 ^ c2, "conditions must be exclusive and exhaustive");
            let case = d2_classify(&fam, &x, p).unwrap();
            prop_assert_eq!(case == Case::Case2, c2);
        }
    }

    #[test]
    fn bit_packing_round_trips() {
        for l in 0..=10 {
            for w in all_words(2, l) {
                let packed = pack_bits(&w).unwrap();
                assert_eq!(packed.len(), 16 + l.div_ceil(8));
                assert_eq!(unpack_bits(&packed).unwrap(), w);
            }
        }
        let packed = pack_bits(&Word::bin("1000000011")).unwrap();
        assert_eq!(&packed[..13], b"NLAB-BITS v1\n");
        assert_eq!(&packed[13..], &[0, 0, 10, 0b1000_0000, 0b1100_0000]);
        assert!(pack_bits(&Word::parse(3, "012").unwrap()).is_err());
        assert!(unpack_bits(b"nope").is_err());
        let mut bad = packed.clone();
        bad.pop();
        assert!(unpack_bits(&bad).is_err());
    }
}
