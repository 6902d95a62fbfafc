//! Cantor pairing and the triple function built on it.
//!
//! Every stage counter in the reducers is decoded through these, so the
//! enumeration order of stages is fixed by this choice.

/// `⟨m,n⟩ = (m+n)(m+n+1)/2 + n`. Strictly increasing in `n` for fixed `m`.
pub fn pair(m: u64, n: u64) -> u64 {
    let s = m + n;
    s * (s + 1) / 2 + n
}

/// Inverse of [`pair`].
pub fn unpair(p: u64) -> (u64, u64) {
    let w = ((8 * p as u128 + 1).isqrt() as u64 - 1) / 2;
    let t = w * (w + 1) / 2;
    let n = p - t;
    (w - n, n)
}

/// `⟨k,m,n⟩ = ⟨k, ⟨m,n⟩⟩`.
pub fn triple(k: u64, m: u64, n: u64) -> u64 {
    pair(k, pair(m, n))
}

pub fn untriple(t: u64) -> (u64, u64, u64) {
    let (k, q) = unpair(t);
    let (m, n) = unpair(q);
    (k, m, n)
}
