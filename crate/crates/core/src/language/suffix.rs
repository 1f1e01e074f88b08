use serde::{Deserialize, Serialize};

use super::automaton::{not_in_language, PrefixAutomaton, Walk};
use super::kmp;
use super::word::Word;
use crate::digits::{DigitSeq, Periodicity};
use crate::error::{Error, Result};

/// The decomposition `w = v · s(w)` together with `ŵ` and `z(w)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuffixInfo {
    pub word: Word,
    /// Longest suffix of `w` that is a prefix of `c`.
    pub s: Word,
    pub v: Word,
    /// Zeros of `c` right after the prefix `s`.
    pub z: usize,
    /// `v · ŝ` with the last nonzero letter of `s` lowered by one.
    pub hat: Word,
    /// End vertex index `q(w) = |s(w)|`.
    pub q: usize,
}

impl PrefixAutomaton {
    pub fn suffix_info(&self, w: &Word) -> Result<SuffixInfo> {
        let q = match self.walk(w)? {
            Walk::Accepted { matched, .. } => matched,
            Walk::Rejected { position } => return Err(not_in_language(w, position)),
        };
        let s_len = if w.len() <= self.depth() {
            kmp::longest_suffix_prefix(self.digits().digits(), self.failure_table(), w.letters())
        } else {
            let ext = self.digits().extended(w.len())?;
            let fail = kmp::failure_table(ext.digits());
            kmp::longest_suffix_prefix(ext.digits(), &fail, w.letters())
        };
        debug_assert_eq!(s_len, q, "end vertex and border scan disagree on {w}");
        let cut = w.len() - s_len;
        let v = w.slice(0, cut);
        let s = w.slice(cut, w.len());
        let z = z_after(self.digits(), s_len)?;
        let hat = v.concat(&hat_of_prefix(&s));
        Ok(SuffixInfo {
            word: w.clone(),
            s,
            v,
            z,
            hat,
            q,
        })
    }

    /// `ŵ` alone.
    pub fn hat(&self, w: &Word) -> Result<Word> {
        self.suffix_info(w).map(|info| info.hat)
    }
}

/// [`PrefixAutomaton::suffix_info`] without a prebuilt automaton.
pub fn suffix_info(digits: &DigitSeq, w: &Word) -> Result<SuffixInfo> {
    let digits = if w.len() > digits.depth() && digits.is_extendable() {
        digits.extended(w.len())?
    } else {
        digits.clone()
    };
    PrefixAutomaton::build(&digits)?.suffix_info(w)
}

/// `û`: lower the last nonzero letter of `u` by one; `ε̂ = ε`.
fn hat_of_prefix(u: &Word) -> Word {
    let mut letters = u.letters().to_vec();
    if let Some(i) = letters.iter().rposition(|&a| a != 0) {
        letters[i] -= 1;
    }
    Word::new(letters)
}

/// `z(c_1 ⋯ c_j)`: zeros of `c` immediately after position `j`; 0 for `j = 0`.
pub fn z_after(digits: &DigitSeq, j: usize) -> Result<usize> {
    if j == 0 {
        return Ok(0);
    }
    let mut k = 0;
    while digits.require(j + k)? == 0 {
        k += 1;
    }
    Ok(k)
}

/// `z(j)` for `j = 0..=n`, each resolved by scanning to the next nonzero digit.
fn z_values(digits: &DigitSeq, n: usize) -> Result<Vec<usize>> {
    // next nonzero at or after index n
    let mut end = n;
    while digits.require(end)? == 0 {
        end += 1;
    }
    let mut z = vec![0; n + 1];
    let mut run = 0;
    for idx in (0..end).rev() {
        run = if digits.require(idx)? == 0 { run + 1 } else { 0 };
        if idx <= n {
            z[idx] = run;
        }
    }
    z[0] = 0;
    Ok(z)
}

/// `z̄(n) = max { z(u) : u prefix of c, |u| ≤ n }`.
pub fn zbar(digits: &DigitSeq, n: usize) -> Result<usize> {
    Ok(z_values(digits, n)?.into_iter().max().unwrap_or(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZbarPoint {
    pub n: usize,
    pub zbar: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZbarVerdict {
    /// A periodicity certificate bounds `z̄` by a constant.
    CertifiedSublinear,
    /// A zero-run schedule forces `z̄(n)/n` to stay bounded away from 0.
    PositiveLimsupEvidence,
    Inconclusive,
}

/// `(n, z̄(n)/n)` for `1 ≤ n ≤ N` with a verdict on the growth of `z̄`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZbarProfile {
    pub points: Vec<ZbarPoint>,
    /// The `n` at which `z̄` jumps: `c_1 ⋯ c_n` is followed by a record zero run.
    pub checkpoints: Vec<ZbarPoint>,
    pub verdict: ZbarVerdict,
    /// `sup_n z̄(n)` when certified.
    pub bound: Option<usize>,
    /// `lim z(checkpoint)/checkpoint` implied by a schedule.
    pub limit_ratio: Option<f64>,
    /// Largest ratio over the second half of the range.
    pub tail_max_ratio: f64,
}

pub fn zbar_profile(digits: &DigitSeq, max_n: usize) -> Result<ZbarProfile> {
    if max_n == 0 {
        return Err(Error::DepthExceeded { needed: 1, available: 0 });
    }
    if !digits.is_extendable() && max_n > digits.depth() {
        return Err(Error::DepthExceeded {
            needed: max_n,
            available: digits.depth(),
        });
    }
    let z = z_values(digits, max_n)?;
    let mut points = Vec::with_capacity(max_n);
    let mut checkpoints = Vec::new();
    let mut best = 0;
    for n in 1..=max_n {
        let jumped = z[n] > best;
        best = best.max(z[n]);
        let p = ZbarPoint {
            n,
            zbar: best,
            ratio: best as f64 / n as f64,
        };
        if jumped {
            checkpoints.push(p);
        }
        points.push(p);
    }
    let tail_max_ratio = points[max_n / 2..].iter().map(|p| p.ratio).fold(0.0, f64::max);
    let (verdict, bound, limit_ratio) = if let Some(Periodicity { preperiod, period }) = digits.periodicity() {
        // z(j) is periodic in j past the preperiod, so one period bounds it
        let bound = zbar(digits, preperiod + period)?;
        (ZbarVerdict::CertifiedSublinear, Some(bound), Some(0.0))
    } else if let Some(schedule) = digits.schedule() {
        if schedule.ratio >= 2 {
            (ZbarVerdict::PositiveLimsupEvidence, None, Some(schedule.limit_ratio()))
        } else {
            (ZbarVerdict::CertifiedSublinear, Some(schedule.first as usize), Some(0.0))
        }
    } else {
        (ZbarVerdict::Inconclusive, None, None)
    };
    Ok(ZbarProfile {
        points,
        checkpoints,
        verdict,
        bound,
        limit_ratio,
        tail_max_ratio,
    })
}
