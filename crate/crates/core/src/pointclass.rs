//! Finitely presented closed sets and the doubly/triply indexed families
//! built from them.
//!
//! A family is a finite table of closed sets plus a declared default
//! (`full` or `empty`). Table entries may leave any index unspecified, in
//! which case they cover every value of that index not matched by a more
//! specific entry. Lookup picks the matching entry with the most specified
//! indices; ties go to the entry listed first.
//!
//! ```
//! use nlab::pointclass::{ClosedSet, FamilyIndex, Pi03Family};
//! use nlab::{EventuallyPeriodicWord, Word};
//!
//! // F_{m,n} = {x : x(m) = 0} for m < 2, full elsewhere.
//! let fam = Pi03Family::builder_double(true)
//!     .row(0, ClosedSet::Coord { index: 0, digit: 0 })
//!     .row(1, ClosedSet::Coord { index: 1, digit: 0 })
//!     .build();
//! assert!(fam.query(FamilyIndex::double(1, 0), &Word::bin("0")).unwrap());
//! assert!(!fam.query(FamilyIndex::double(1, 0), &Word::bin("0110")).unwrap());
//! let zeros: EventuallyPeriodicWord = ":0".parse().unwrap();
//! assert!(fam.member(&zeros).unwrap());
//! ```

use std::collections::BTreeSet;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::periodic::EventuallyPeriodicWord;
use crate::words::Word;

/// A closed subset of the sequence space, answered through prefix queries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosedSet {
    Full,
    Empty,
    /// `{x : x↾depth ∈ allowed}`.
    Cylinders {
        depth: usize,
        allowed: BTreeSet<Vec<u8>>,
    },
    /// `{x : x(index) = digit}`.
    Coord {
        index: usize,
        digit: u8,
    },
    Singleton(EventuallyPeriodicWord),
    Union(Vec<ClosedSet>),
}

impl ClosedSet {
    /// Whether the cylinder `[σ]` meets the set.
    pub fn meets(&self, sigma: &[u8]) -> bool {
        match self {
            ClosedSet::Full => true,
            ClosedSet::Empty => false,
            ClosedSet::Cylinders { depth, allowed } => {
                if sigma.len() >= *depth {
                    allowed.contains(&sigma[..*depth])
                } else {
                    allowed
                        .range(sigma.to_vec()..)
                        .next()
                        .is_some_and(|w| w.starts_with(sigma))
                }
            }
            ClosedSet::Coord { index, digit } => sigma.get(*index).is_none_or(|d| d == digit),
            ClosedSet::Singleton(point) => sigma
                .iter()
                .enumerate()
                .all(|(i, &d)| point.digit_at(i) == d),
            ClosedSet::Union(parts) => parts.iter().any(|p| p.meets(sigma)),
        }
    }

    pub fn contains(&self, x: &EventuallyPeriodicWord) -> bool {
        match self {
            ClosedSet::Full => true,
            ClosedSet::Empty => false,
            ClosedSet::Cylinders { depth, allowed } => allowed.contains(x.prefix(*depth).digits()),
            ClosedSet::Coord { index, digit } => x.digit_at(*index) == *digit,
            ClosedSet::Singleton(point) => point == x,
            ClosedSet::Union(parts) => parts.iter().any(|p| p.contains(x)),
        }
    }

    pub fn is_empty_set(&self) -> bool {
        !self.meets(&[])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Arity {
    Double,
    Triple,
}

impl Arity {
    fn code(self) -> u8 {
        match self {
            Arity::Double => 2,
            Arity::Triple => 3,
        }
    }
}

/// `(m, n)` or `(k, m, n)` with `k >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum FamilyIndex {
    Double { m: u64, n: u64 },
    Triple { k: u64, m: u64, n: u64 },
}

impl FamilyIndex {
    pub fn double(m: u64, n: u64) -> Self {
        FamilyIndex::Double { m, n }
    }

    pub fn triple(k: u64, m: u64, n: u64) -> Self {
        FamilyIndex::Triple { k, m, n }
    }

    fn arity(self) -> Arity {
        match self {
            FamilyIndex::Double { .. } => Arity::Double,
            FamilyIndex::Triple { .. } => Arity::Triple,
        }
    }

    /// Internal `(row, m, n)` with the 1-based `k` shifted to 0-based.
    fn slots(self) -> (u64, u64, u64) {
        match self {
            FamilyIndex::Double { m, n } => (0, m, n),
            FamilyIndex::Triple { k, m, n } => (k - 1, m, n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Entry {
    k: Option<u64>,
    m: Option<u64>,
    n: Option<u64>,
    set: ClosedSet,
}

impl Entry {
    fn matches(&self, k: u64, m: u64, n: u64) -> bool {
        self.k.is_none_or(|v| v == k)
            && self.m.is_none_or(|v| v == m)
            && self.n.is_none_or(|v| v == n)
    }

    fn specificity(&self) -> usize {
        [self.k, self.m, self.n]
            .iter()
            .filter(|v| v.is_some())
            .count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Node {
    Table {
        entries: Vec<Entry>,
        default: ClosedSet,
    },
    Interleave(Box<Pi03Family>, Box<Pi03Family>),
}

/// `⋂_m ⋃_n F_{m,n}` (or, per `k`, `⋂_m ⋃_n F_{k,m,n}`) from a finite
/// presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pi03Family {
    arity: Arity,
    base: u8,
    monotone: bool,
    node: Node,
}

pub struct FamilyBuilder {
    arity: Arity,
    base: u8,
    default: ClosedSet,
    entries: Vec<Entry>,
}

impl FamilyBuilder {
    /// Entry at an exact `(m, n)` (double) or `(k, m, n)` (triple).
    pub fn at(mut self, index: FamilyIndex, set: ClosedSet) -> Self {
        let (k, m, n) = index.slots();
        self.entries.push(Entry {
            k: (self.arity == Arity::Triple).then_some(k),
            m: Some(m),
            n: Some(n),
            set,
        });
        self
    }

    /// Entry covering every `n` of row `m` (every `k`, for triple families).
    pub fn row(mut self, m: u64, set: ClosedSet) -> Self {
        self.entries.push(Entry {
            k: None,
            m: Some(m),
            n: None,
            set,
        });
        self
    }

    /// Entry covering every `(m, n)` for the given `k >= 1`.
    pub fn slice_k(mut self, k: u64, set: ClosedSet) -> Self {
        assert!(k >= 1, "k is 1-based");
        self.entries.push(Entry {
            k: Some(k - 1),
            m: None,
            n: None,
            set,
        });
        self
    }

    /// Entry with arbitrary wildcards (`k` is 1-based when given).
    pub fn pattern(
        mut self,
        k: Option<u64>,
        m: Option<u64>,
        n: Option<u64>,
        set: ClosedSet,
    ) -> Self {
        self.entries.push(Entry {
            k: k.map(|k| k - 1),
            m,
            n,
            set,
        });
        self
    }

    pub fn build(self) -> Pi03Family {
        Pi03Family {
            arity: self.arity,
            base: self.base,
            monotone: false,
            node: Node::Table {
                entries: self.entries,
                default: self.default,
            },
        }
    }
}

impl Pi03Family {
    pub fn builder(arity: Arity, default_full: bool) -> FamilyBuilder {
        FamilyBuilder {
            arity,
            base: 2,
            default: if default_full {
                ClosedSet::Full
            } else {
                ClosedSet::Empty
            },
            entries: Vec::new(),
        }
    }

    pub fn builder_double(default_full: bool) -> FamilyBuilder {
        Self::builder(Arity::Double, default_full)
    }

    pub fn builder_triple(default_full: bool) -> FamilyBuilder {
        Self::builder(Arity::Triple, default_full)
    }

    pub fn full(arity: Arity) -> Self {
        Self::builder(arity, true).build()
    }

    pub fn empty(arity: Arity) -> Self {
        Self::builder(arity, false).build()
    }

    pub fn arity(&self) -> Arity {
        self.arity
    }

    pub fn base(&self) -> u8 {
        self.base
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    fn check_arity(&self, index: FamilyIndex) -> Result<()> {
        if index.arity() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity.code(),
                found: index.arity().code(),
            });
        }
        if let FamilyIndex::Triple { k: 0, .. } = index {
            return Err(Error::InvalidArgument("k is 1-based".into()));
        }
        Ok(())
    }

    fn with_n(index: FamilyIndex, n: u64) -> FamilyIndex {
        match index {
            FamilyIndex::Double { m, .. } => FamilyIndex::Double { m, n },
            FamilyIndex::Triple { k, m, .. } => FamilyIndex::Triple { k, m, n },
        }
    }

    fn n_of(index: FamilyIndex) -> u64 {
        match index {
            FamilyIndex::Double { n, .. } | FamilyIndex::Triple { n, .. } => n,
        }
    }

    /// Evaluates `f` on the closed set at `index`, or-ed over `n' <= n` when
    /// the family is monotonized.
    fn any_at(&self, index: FamilyIndex, f: &dyn Fn(&ClosedSet) -> bool) -> bool {
        if self.monotone {
            (0..=Self::n_of(index)).any(|n| self.base_at(Self::with_n(index, n), f))
        } else {
            self.base_at(index, f)
        }
    }

    fn base_at(&self, index: FamilyIndex, f: &dyn Fn(&ClosedSet) -> bool) -> bool {
        match &self.node {
            Node::Table { entries, default } => {
                let (k, m, n) = index.slots();
                let mut best: Option<&Entry> = None;
                for e in entries.iter().filter(|e| e.matches(k, m, n)) {
                    if best.is_none_or(|b| e.specificity() > b.specificity()) {
                        best = Some(e);
                    }
                }
                f(best.map_or(default, |e| &e.set))
            }
            Node::Interleave(l, r) => {
                let FamilyIndex::Double { m, n } = index else {
                    unreachable!("interleaving is double-indexed")
                };
                if m % 2 == 0 {
                    l.any_at(FamilyIndex::double(m / 2, n), f)
                } else {
                    r.any_at(FamilyIndex::double(m / 2, n), f)
                }
            }
        }
    }

    /// `[σ] ∩ F_index ≠ ∅`.
    pub fn query(&self, index: FamilyIndex, sigma: &Word) -> Result<bool> {
        self.check_arity(index)?;
        if sigma.base() != self.base {
            return Err(Error::BaseMismatch {
                left: self.base,
                right: sigma.base(),
            });
        }
        Ok(self.any_at(index, &|s| s.meets(sigma.digits())))
    }

    /// `x ∈ F_index` for an eventually periodic point.
    pub fn contains(&self, index: FamilyIndex, x: &EventuallyPeriodicWord) -> Result<bool> {
        self.check_arity(index)?;
        Ok(self.any_at(index, &|s| s.contains(x)))
    }

    /// Representative `m` and `n` values: every value some entry names,
    /// plus one unnamed value standing for all the others.
    fn grid(&self, k: u64) -> (BTreeSet<u64>, BTreeSet<u64>) {
        match &self.node {
            Node::Table { entries, .. } => {
                let relevant = entries.iter().filter(|e| e.k.is_none_or(|v| v == k));
                let mut ms: BTreeSet<u64> = BTreeSet::new();
                let mut ns: BTreeSet<u64> = BTreeSet::new();
                for e in relevant {
                    ms.extend(e.m);
                    ns.extend(e.n);
                }
                let gm = ms.last().map_or(0, |v| v + 1);
                let gn = ns.last().map_or(0, |v| v + 1);
                ms.insert(gm);
                ns.insert(gn);
                (ms, ns)
            }
            Node::Interleave(l, r) => {
                let (lm, ln) = l.grid(k);
                let (rm, rn) = r.grid(k);
                let ms = lm
                    .iter()
                    .map(|m| 2 * m)
                    .chain(rm.iter().map(|m| 2 * m + 1))
                    .collect();
                (ms, ln.union(&rn).copied().collect())
            }
        }
    }

    fn member_row(&self, k: Option<u64>, x: &EventuallyPeriodicWord) -> bool {
        let (ms, ns) = self.grid(k.map_or(0, |k| k - 1));
        ms.iter().all(|&m| {
            ns.iter().any(|&n| {
                let idx = match k {
                    None => FamilyIndex::double(m, n),
                    Some(k) => FamilyIndex::triple(k, m, n),
                };
                self.any_at(idx, &|s| s.contains(x))
            })
        })
    }

    /// Ground truth `x ∈ ⋂_m ⋃_n F_{m,n}` for a double-indexed family.
    pub fn member(&self, x: &EventuallyPeriodicWord) -> Result<bool> {
        if self.arity != Arity::Double {
            return Err(Error::ArityMismatch {
                expected: 3,
                found: 2,
            });
        }
        Ok(self.member_row(None, x))
    }

    /// Ground truth `x ∈ F_k = ⋂_m ⋃_n F_{k,m,n}` for a triple-indexed family.
    pub fn member_at(&self, k: u64, x: &EventuallyPeriodicWord) -> Result<bool> {
        if self.arity != Arity::Triple {
            return Err(Error::ArityMismatch {
                expected: 2,
                found: 3,
            });
        }
        if k == 0 {
            return Err(Error::InvalidArgument("k is 1-based".into()));
        }
        Ok(self.member_row(Some(k), x))
    }
}

/// Replaces each `F_{m,n}` with `⋃_{n' <= n} F_{m,n'}`.
pub fn monotonize(fam: &Pi03Family) -> Pi03Family {
    Pi03Family {
        monotone: true,
        ..fam.clone()
    }
}

/// `G_{2m,n} = L_{m,n}`, `G_{2m+1,n} = F_{m,n}`, so that `G = L ∩ F`.
pub fn interleave_intersection(l: &Pi03Family, f: &Pi03Family) -> Result<Pi03Family> {
    for fam in [l, f] {
        if fam.arity != Arity::Double {
            return Err(Error::ArityMismatch {
                expected: 2,
                found: 3,
            });
        }
    }
    if l.base != f.base {
        return Err(Error::BaseMismatch {
            left: l.base,
            right: f.base,
        });
    }
    Ok(Pi03Family {
        arity: Arity::Double,
        base: l.base,
        monotone: false,
        node: Node::Interleave(Box::new(l.clone()), Box::new(f.clone())),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyDoc {
    arity: u8,
    #[serde(default = "default_base")]
    base: u8,
    default: String,
    #[serde(default)]
    monotonize: bool,
    #[serde(default)]
    entries: Vec<EntryDoc>,
}

fn default_base() -> u8 {
    2
}

#[derive(Deserialize)]
struct EntryDoc {
    k: Option<u64>,
    m: Option<u64>,
    n: Option<u64>,
    #[serde(default)]
    nonempty: bool,
    #[serde(flatten)]
    set: SetDoc,
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum SetDoc {
    Full,
    Empty,
    Cylinders { depth: usize, allowed: Vec<String> },
    Coord { i: usize, digit: u32 },
    Singleton { point: String },
    Union { members: Vec<SetDoc> },
}

fn build_set(doc: &SetDoc, base: u8) -> Result<ClosedSet> {
    Ok(match doc {
        SetDoc::Full => ClosedSet::Full,
        SetDoc::Empty => ClosedSet::Empty,
        SetDoc::Cylinders { depth, allowed } => {
            let mut set = BTreeSet::new();
            for w in allowed {
                let word = Word::parse(base, w).map_err(|e| Error::Schema(e.to_string()))?;
                if word.len() != *depth {
                    return Err(Error::Schema(format!(
                        "cylinder word {w:?} has length {}, expected depth {depth}",
                        word.len()
                    )));
                }
                set.insert(word.into_digits());
            }
            ClosedSet::Cylinders {
                depth: *depth,
                allowed: set,
            }
        }
        SetDoc::Coord { i, digit } => {
            if *digit >= base as u32 {
                return Err(Error::Schema(format!(
                    "coordinate digit {digit} out of range for base {base}"
                )));
            }
            ClosedSet::Coord {
                index: *i,
                digit: *digit as u8,
            }
        }
        SetDoc::Singleton { point } => ClosedSet::Singleton(
            EventuallyPeriodicWord::parse(base, point).map_err(|e| Error::Schema(e.to_string()))?,
        ),
        SetDoc::Union { members } => ClosedSet::Union(
            members
                .iter()
                .map(|m| build_set(m, base))
                .collect::<Result<_>>()?,
        ),
    })
}

/// Builds a family from its JSON document.
pub fn family_from_spec(document: &str) -> Result<Pi03Family> {
    let doc: FamilyDoc =
        serde_json::from_str(document).map_err(|e| Error::Schema(e.to_string()))?;
    let arity = match doc.arity {
        2 => Arity::Double,
        3 => Arity::Triple,
        a => return Err(Error::Schema(format!("arity must be 2 or 3, got {a}"))),
    };
    crate::words::check_base(doc.base as u32).map_err(|e| Error::Schema(e.to_string()))?;
    let default = match doc.default.as_str() {
        "full" => ClosedSet::Full,
        "empty" => ClosedSet::Empty,
        other => {
            return Err(Error::Schema(format!(
                "default must be \"full\" or \"empty\", got {other:?}"
            )))
        }
    };
    let mut entries = Vec::with_capacity(doc.entries.len());
    for (pos, e) in doc.entries.iter().enumerate() {
        let k = match (arity, e.k) {
            (Arity::Double, Some(_)) => {
                return Err(Error::Schema(format!(
                    "entry {pos}: \"k\" is only valid in triple-indexed families"
                )))
            }
            (Arity::Triple, Some(0)) => {
                return Err(Error::Schema(format!("entry {pos}: \"k\" is 1-based")))
            }
            (_, k) => k.map(|k| k - 1),
        };
        let set = build_set(&e.set, doc.base)?;
        if e.nonempty && set.is_empty_set() {
            return Err(Error::Schema(format!(
                "entry {pos} is marked nonempty but presents the empty set"
            )));
        }
        entries.push(Entry {
            k,
            m: e.m,
            n: e.n,
            set,
        });
    }
    let fam = Pi03Family {
        arity,
        base: doc.base,
        monotone: false,
        node: Node::Table { entries, default },
    };
    Ok(if doc.monotonize {
        monotonize(&fam)
    } else {
        fam
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::all_words;

    fn ep(s: &str) -> EventuallyPeriodicWord {
        s.parse().unwrap()
    }

    fn coord_family(rows: u64) -> Pi03Family {
        let mut b = Pi03Family::builder_double(true);
        for m in 0..rows {
            b = b.row(
                m,
                ClosedSet::Coord {
                    index: m as usize,
                    digit: 0,
                },
            );
        }
        b.build()
    }

    #[test]
    fn trivial_families() {
        let full = Pi03Family::full(Arity::Double);
        let empty = Pi03Family::empty(Arity::Double);
        for s in ["", "0", "0110"] {
            let w = Word::bin(s);
            assert!(full.query(FamilyIndex::double(3, 7), &w).unwrap());
            assert!(!empty.query(FamilyIndex::double(3, 7), &w).unwrap());
        }
        assert!(full.member(&ep(":01")).unwrap());
        assert!(!empty.member(&ep(":0")).unwrap());
    }

    #[test]
    fn coordinate_queries() {
        let fam = coord_family(4);
        let q = |m, s: &str| fam.query(FamilyIndex::double(m, 0), &Word::bin(s)).unwrap();
        assert!(q(1, "0"));
        assert!(q(1, "00"));
        assert!(!q(1, "01"));
        assert!(!q(1, "0110"));
        assert!(fam.member(&ep(":0")).unwrap());
        assert!(!fam.member(&ep(":01")).unwrap());
    }

    #[test]
    fn arity_mismatch() {
        let fam = Pi03Family::full(Arity::Double);
        assert!(matches!(
            fam.query(FamilyIndex::triple(1, 0, 0), &Word::bin("0")),
            Err(Error::ArityMismatch { .. })
        ));
        let tri = Pi03Family::full(Arity::Triple);
        assert!(tri
            .query(FamilyIndex::triple(0, 0, 0), &Word::bin("0"))
            .is_err());
        assert!(tri.member(&ep(":0")).is_err());
    }

    #[test]
    fn monotonize_unions_rows() {
        let fam = Pi03Family::builder_double(false)
            .at(
                FamilyIndex::double(0, 0),
                ClosedSet::Coord { index: 0, digit: 0 },
            )
            .at(
                FamilyIndex::double(0, 1),
                ClosedSet::Coord { index: 0, digit: 1 },
            )
            .build();
        let mono = monotonize(&fam);
        let at = |f: &Pi03Family, n, s| f.query(FamilyIndex::double(0, n), &Word::bin(s)).unwrap();
        assert!(!at(&fam, 1, "0"));
        assert!(at(&mono, 1, "0"));
        assert!(at(&mono, 1, "1"));
        assert_eq!(monotonize(&mono), mono);
        for s in ["0", "1", "01"] {
            assert_eq!(at(&fam, 0, s), at(&mono, 0, s));
        }
        let empty = Pi03Family::empty(Arity::Double);
        assert!(!monotonize(&empty)
            .query(FamilyIndex::double(0, 5), &Word::bin(""))
            .unwrap());
    }

    #[test]
    fn monotone_families_are_n_monotone() {
        let fam = monotonize(
            &Pi03Family::builder_double(false)
                .at(
                    FamilyIndex::double(0, 2),
                    ClosedSet::Coord { index: 1, digit: 1 },
                )
                .at(
                    FamilyIndex::double(0, 4),
                    ClosedSet::Coord { index: 0, digit: 0 },
                )
                .build(),
        );
        for l in 0..=4 {
            for s in all_words(2, l) {
                for n in 0..8 {
                    let a = fam.query(FamilyIndex::double(0, n), &s).unwrap();
                    let b = fam.query(FamilyIndex::double(0, n + 1), &s).unwrap();
                    assert!(!a || b);
                }
            }
        }
    }

    #[test]
    fn oracles_are_prefix_monotone_and_pruned() {
        let sets = [
            ClosedSet::Full,
            ClosedSet::Coord { index: 2, digit: 1 },
            ClosedSet::Singleton(ep("1:01")),
            ClosedSet::Cylinders {
                depth: 3,
                allowed: ["010", "011", "110"]
                    .iter()
                    .map(|s| Word::bin(s).into_digits())
                    .collect(),
            },
            ClosedSet::Union(vec![
                ClosedSet::Coord { index: 0, digit: 1 },
                ClosedSet::Singleton(ep(":0")),
            ]),
        ];
        for set in &sets {
            for l in 0..=7 {
                for s in all_words(2, l) {
                    let d = s.digits();
                    if set.meets(d) {
                        assert!((0..l).all(|p| set.meets(&d[..p])));
                        let mut ext = d.to_vec();
                        ext.push(0);
                        let zero = set.meets(&ext);
                        ext[l] = 1;
                        assert!(zero || set.meets(&ext), "{set:?} not pruned at {s}");
                    }
                }
            }
        }
    }

    #[test]
    fn interleaving_is_intersection() {
        let full = Pi03Family::full(Arity::Double);
        let empty = Pi03Family::empty(Arity::Double);
        let coords = coord_family(3);
        let ones = Pi03Family::builder_double(true)
            .row(0, ClosedSet::Coord { index: 1, digit: 1 })
            .build();
        let points = [":0", ":01", ":1", "0:1", "00:10", "1:0", "001:1"];
        let fams = [&full, &empty, &coords, &ones];
        let mut checked = 0;
        for l in fams {
            for f in fams {
                let g = interleave_intersection(l, f).unwrap();
                for s in points {
                    let x = ep(s);
                    let expect = l.member(&x).unwrap() && f.member(&x).unwrap();
                    assert_eq!(g.member(&x).unwrap(), expect, "point {s}");
                    checked += 1;
                }
            }
        }
        assert!(checked >= 20);
        // L full leaves F's queries intact on the odd rows.
        let g = interleave_intersection(&full, &coords).unwrap();
        for s in ["0", "01", "001", "111"] {
            for m in 0..4 {
                assert_eq!(
                    g.query(FamilyIndex::double(2 * m + 1, 0), &Word::bin(s))
                        .unwrap(),
                    coords
                        .query(FamilyIndex::double(m, 0), &Word::bin(s))
                        .unwrap()
                );
            }
        }
    }

    #[test]
    fn triple_families() {
        let fam = Pi03Family::builder_triple(true)
            .slice_k(2, ClosedSet::Empty)
            .build();
        let w = Word::bin("01");
        assert!(fam.query(FamilyIndex::triple(1, 3, 2), &w).unwrap());
        assert!(!fam.query(FamilyIndex::triple(2, 3, 2), &w).unwrap());
        assert!(fam.member_at(1, &ep(":0")).unwrap());
        assert!(!fam.member_at(2, &ep(":0")).unwrap());
        assert!(fam.member_at(3, &ep(":0")).unwrap());
    }

    #[test]
    fn documents() {
        let full = family_from_spec(r#"{"arity":2, "default":"full", "entries":[]}"#).unwrap();
        assert_eq!(full, Pi03Family::full(Arity::Double));

        let coord = family_from_spec(
            r#"{"arity":2, "base":2, "default":"full", "monotonize": true,
                "entries":[{"m":1,"n":0,"type":"coord","i":1,"digit":0}]}"#,
        )
        .unwrap();
        assert!(coord.is_monotone());
        assert!(coord
            .query(FamilyIndex::double(1, 0), &Word::bin("00"))
            .unwrap());
        assert!(!coord
            .query(FamilyIndex::double(1, 0), &Word::bin("01"))
            .unwrap());

        let tri = family_from_spec(
            r#"{"arity":3, "default":"full", "entries":[
                {"k":2, "type":"empty"},
                {"k":1, "m":0, "n":3, "type":"cylinders", "depth":2, "allowed":["01","11"]},
                {"k":1, "m":1, "type":"singleton", "point":"1:0"},
                {"k":3, "type":"union", "members":[{"type":"coord","i":0,"digit":1},{"type":"full"}]}
            ]}"#,
        )
        .unwrap();
        assert!(!tri
            .query(FamilyIndex::triple(2, 0, 0), &Word::bin(""))
            .unwrap());
        assert!(!tri
            .query(FamilyIndex::triple(1, 0, 3), &Word::bin("00"))
            .unwrap());
        assert!(tri
            .query(FamilyIndex::triple(1, 1, 9), &Word::bin("10"))
            .unwrap());
    }

    #[test]
    fn document_errors() {
        let bad = [
            r#"{"arity":4, "default":"full"}"#,
            r#"{"arity":2, "default":"maybe"}"#,
            r#"{"arity":2, "default":"full", "entries":[{"m":0,"n":0,"type":"coord","i":1,"digit":2}]}"#,
            r#"{"arity":2, "default":"full", "entries":[{"k":1,"type":"full"}]}"#,
            r#"{"arity":3, "default":"full", "entries":[{"k":0,"type":"full"}]}"#,
            r#"{"arity":2, "default":"full", "entries":[{"type":"cylinders","depth":2,"allowed":["0"]}]}"#,
            r#"{"arity":2, "default":"full", "entries":[{"type":"cylinders","depth":1,"allowed":[],"nonempty":true}]}"#,
            r#"{"arity":2, "default":"full", "entries":[{"type":"blob"}]}"#,
            r#"not json"#,
        ];
        for doc in bad {
            assert!(
                matches!(family_from_spec(doc), Err(Error::Schema(_))),
                "accepted {doc}"
            );
        }
        // An empty allowed set is fine when nothing claims otherwise.
        family_from_spec(
            r#"{"arity":2, "default":"full", "entries":[{"type":"cylinders","depth":1,"allowed":[]}]}"#,
        )
        .unwrap();
    }
}
