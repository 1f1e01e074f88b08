//! The quasi-greedy expansion `c = (c_1, c_2, …)` of 1 in base β.
//!
//! [`expand_one`] runs the digit recurrence on a [`CertifiedReal`] β,
//! [`beta_from_digits`] goes the other way, and [`validate_admissible`]
//! checks the shift condition `T^k c ≼ c` on a finite prefix.

mod expand;
mod quad;
mod real;
mod root;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use expand::{expand_one, expand_one_with, ExpandOptions, DEFAULT_MAX_BITS, PRECISION_ENV};
pub use quad::QuadNum;
pub use real::{CertifiedReal, ExactReal};
pub use root::beta_from_digits;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DigitSource {
    ComputedFromBeta,
    UserSupplied,
}

/// `c_{i+q} = c_i` for every `i > preperiod`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Periodicity {
    pub preperiod: usize,
    pub period: usize,
}

/// Digits of the form `m 0^{f} m 0^{f·r} m 0^{f·r²} …` where `m = c_1`,
/// `f = first` and `r = ratio`. The zero runs grow geometrically, which is
/// a generative certificate for linear growth of the longest zero run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZeroRunSchedule {
    pub first: u64,
    pub ratio: u64,
}

impl ZeroRunSchedule {
    /// 0-based indices of the nonzero digits up to (excluding) `limit`.
    pub fn marker_positions(&self, limit: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut pos: u128 = 0;
        let mut run = self.first as u128;
        while pos < limit as u128 {
            out.push(pos as usize);
            pos += 1 + run;
            run = run.saturating_mul(self.ratio as u128);
        }
        out
    }

    fn digit(&self, index: usize, marker: u32) -> u32 {
        let mut pos: u128 = 0;
        let mut run = self.first as u128;
        let i = index as u128;
        while pos < i {
            pos += 1 + run;
            run = run.saturating_mul(self.ratio as u128);
        }
        if pos == i {
            marker
        } else {
            0
        }
    }

    /// `lim z_k / P_k` along the marker positions, when it exists and is positive.
    pub fn limit_ratio(&self) -> f64 {
        if self.ratio >= 2 {
            (self.ratio - 1) as f64
        } else {
            0.0
        }
    }
}

/// A certified prefix `c_1 … c_N` of the expansion of 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitSeq {
    digits: Vec<u32>,
    alphabet: u32,
    source: DigitSource,
    periodicity: Option<Periodicity>,
    schedule: Option<ZeroRunSchedule>,
}

impl DigitSeq {
    /// Digits over `{0, …, alphabet − 1}` with `c_1 = alphabet − 1 ≥ 1`.
    pub fn new(digits: Vec<u32>, alphabet: u32) -> Result<Self> {
        Self::with_source(digits, alphabet, DigitSource::UserSupplied)
    }

    pub(crate) fn with_source(digits: Vec<u32>, alphabet: u32, source: DigitSource) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::MalformedDigits("empty digit sequence".into()));
        }
        if alphabet < 2 {
            return Err(Error::MalformedDigits(format!("alphabet size {alphabet} < 2")));
        }
        if let Some((i, d)) = digits.iter().enumerate().find(|(_, &d)| d >= alphabet) {
            return Err(Error::MalformedDigits(format!(
                "digit {d} at position {} outside alphabet 0..{}",
                i + 1,
                alphabet - 1
            )));
        }
        if digits[0] != alphabet - 1 {
            return Err(Error::MalformedDigits(format!(
                "first digit must be alphabet-1 = {} (got {})",
                alphabet - 1,
                digits[0]
            )));
        }
        Ok(DigitSeq {
            digits,
            alphabet,
            source,
            periodicity: None,
            schedule: None,
        })
    }

    /// Attaches a periodicity certificate, checked against the stored digits.
    pub fn with_periodicity(mut self, preperiod: usize, period: usize) -> Result<Self> {
        if period == 0 {
            return Err(Error::MalformedDigits("period must be positive".into()));
        }
        if preperiod + period > self.digits.len() {
            return Err(Error::MalformedDigits(format!(
                "period ({preperiod},{period}) needs at least {} digits, have {}",
                preperiod + period,
                self.digits.len()
            )));
        }
        for i in preperiod + period..self.digits.len() {
            if self.digits[i] != self.digits[i - period] {
                return Err(Error::MalformedDigits(format!(
                    "digit {} contradicts period ({preperiod},{period})",
                    i + 1
                )));
            }
        }
        if self.digits[preperiod..preperiod + period].iter().all(|&d| d == 0) {
            return Err(Error::MalformedDigits(
                "periodic part is all zeros; the expansion of 1 never ends in zeros".into(),
            ));
        }
        self.periodicity = Some(Periodicity { preperiod, period });
        Ok(self)
    }

    /// Attaches a zero-run schedule, checked against the stored digits.
    pub fn with_schedule(mut self, schedule: ZeroRunSchedule) -> Result<Self> {
        if schedule.first == 0 || schedule.ratio == 0 {
            return Err(Error::MalformedDigits("schedule needs first >= 1 and ratio >= 1".into()));
        }
        let marker = self.digits[0];
        for (i, &d) in self.digits.iter().enumerate() {
            if d != schedule.digit(i, marker) {
                return Err(Error::MalformedDigits(format!("digit {} contradicts the zero-run schedule", i + 1)));
            }
        }
        self.schedule = Some(schedule);
        Ok(self)
    }

    /// Generates `depth` digits from a zero-run schedule with marker digit `alphabet − 1`.
    pub fn from_schedule(schedule: ZeroRunSchedule, alphabet: u32, depth: usize) -> Result<Self> {
        let marker = alphabet.saturating_sub(1);
        let digits = (0..depth.max(1)).map(|i| schedule.digit(i, marker)).collect();
        DigitSeq::new(digits, alphabet)?.with_schedule(schedule)
    }

    pub(crate) fn set_periodicity_unchecked(&mut self, p: Periodicity) {
        self.periodicity = Some(p);
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn source(&self) -> DigitSource {
        self.source
    }

    pub fn periodicity(&self) -> Option<Periodicity> {
        self.periodicity
    }

    pub fn schedule(&self) -> Option<ZeroRunSchedule> {
        self.schedule
    }

    /// True when digits beyond the stored prefix are determined by a certificate.
    pub fn is_extendable(&self) -> bool {
        self.periodicity.is_some() || self.schedule.is_some()
    }

    /// `c_{index+1}` (0-based `index`), using a certificate past the stored prefix.
    pub fn digit(&self, index: usize) -> Option<u32> {
        if let Some(&d) = self.digits.get(index) {
            return Some(d);
        }
        if let Some(Periodicity { preperiod, period }) = self.periodicity {
            return Some(self.digits[preperiod + (index - preperiod) % period]);
        }
        self.schedule.map(|s| s.digit(index, self.digits[0]))
    }

    /// `c_{index+1}` or `DepthExceeded`.
    pub fn require(&self, index: usize) -> Result<u32> {
        self.digit(index).ok_or(Error::DepthExceeded {
            needed: index + 1,
            available: self.digits.len(),
        })
    }

    /// The same sequence with at least `depth` stored digits.
    pub fn extended(&self, depth: usize) -> Result<DigitSeq> {
        if depth <= self.digits.len() {
            return Ok(self.clone());
        }
        if !self.is_extendable() {
            return Err(Error::DepthExceeded {
                needed: depth,
                available: self.digits.len(),
            });
        }
        let mut out = self.clone();
        out.digits = (0..depth).map(|i| self.digit(i).unwrap()).collect();
        Ok(out)
    }

    /// Parses the digit-file format:
    ///
    /// ```text
    /// alphabet=2
    /// 1 0 1 0
    /// period=0,2
    /// ```
    ///
    /// An optional `schedule=<first>,<ratio>` line declares a zero-run schedule.
    /// `#` starts a comment.
    pub fn parse_file(text: &str) -> Result<Self> {
        let mut alphabet = None;
        let mut period = None;
        let mut schedule = None;
        let mut digits = Vec::new();
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some((key, value)) = line.split_once('=') {
                let value = value.trim();
                match key.trim() {
                    "alphabet" => {
                        alphabet = Some(value.parse::<u32>().map_err(|_| Error::MalformedDigits(format!("bad alphabet '{value}'")))?)
                    }
                    "period" => period = Some(parse_pair(value, "period")?),
                    "schedule" => schedule = Some(parse_pair(value, "schedule")?),
                    other => return Err(Error::MalformedDigits(format!("unknown key '{other}'"))),
                }
                continue;
            }
            for tok in line.split_whitespace() {
                let d = tok
                    .parse::<u32>()
                    .map_err(|_| Error::MalformedDigits(format!("bad digit '{tok}'")))?;
                digits.push(d);
            }
        }
        let alphabet = alphabet.ok_or_else(|| Error::MalformedDigits("missing 'alphabet=' line".into()))?;
        let mut seq = DigitSeq::new(digits, alphabet)?;
        if let Some((p, q)) = period {
            seq = seq.with_periodicity(p as usize, q as usize)?;
        }
        if let Some((first, ratio)) = schedule {
            seq = seq.with_schedule(ZeroRunSchedule { first, ratio })?;
        }
        Ok(seq)
    }

    /// Inverse of [`DigitSeq::parse_file`].
    pub fn to_file_string(&self) -> String {
        let mut out = format!("alphabet={}\n", self.alphabet);
        let body: Vec<String> = self.digits.iter().map(u32::to_string).collect();
        out.push_str(&body.join(" "));
        out.push('\n');
        if let Some(Periodicity { preperiod, period }) = self.periodicity {
            out.push_str(&format!("period={preperiod},{period}\n"));
        }
        if let Some(ZeroRunSchedule { first, ratio }) = self.schedule {
            out.push_str(&format!("schedule={first},{ratio}\n"));
        }
        out
    }
}

fn parse_pair(value: &str, what: &str) -> Result<(u64, u64)> {
    let bad = || Error::MalformedDigits(format!("bad {what} '{value}', expected <a>,<b>"));
    let (a, b) = value.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

impl fmt::Display for DigitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.alphabet > 10 { "," } else { "" };
        let body: Vec<String> = self.digits.iter().map(u32::to_string).collect();
        write!(f, "{}", body.join(sep))?;
        if let Some(Periodicity { preperiod, period }) = self.periodicity {
            write!(f, " (period {preperiod},{period})")?;
        }
        Ok(())
    }
}

/// A shift `k` at which `T^k c ≻ c`, first exceeding at 1-based `position`
/// of the shifted word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub shift: usize,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AdmissibilityWarning {
    /// The stored prefix ends with zeros from 1-based `start` on. A finite
    /// prefix cannot tell a long legal zero run from an illegal zero tail.
    TrailingZeros { start: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub checked_depth: usize,
    pub violation: Option<Violation>,
    pub warnings: Vec<AdmissibilityWarning>,
}

impl AdmissibilityReport {
    pub fn is_ok(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks `T^k c ≼ c` for every shift `1 ≤ k < N` on the known prefix.
///
/// With a periodicity certificate the check covers `preperiod + 2·period`
/// digits, which decides admissibility of the whole infinite sequence.
pub fn validate_admissible(digits: &DigitSeq) -> Result<AdmissibilityReport> {
    let depth = match digits.periodicity {
        Some(Periodicity { preperiod, period }) => digits.depth().max(preperiod + 2 * period),
        None => digits.depth(),
    };
    let c: Vec<u32> = (0..depth).map(|i| digits.require(i)).collect::<Result<_>>()?;
    let mut violation = None;
    'shifts: for k in 1..depth {
        for i in 0..depth - k {
            match c[k + i].cmp(&c[i]) {
                Ordering::Less => continue 'shifts,
                Ordering::Equal => {}
                Ordering::Greater => {
                    violation = Some(Violation { shift: k, position: i + 1 });
                    break 'shifts;
                }
            }
        }
    }
    let mut warnings = Vec::new();
    if !digits.is_extendable() && c.last() == Some(&0) {
        let start = c.iter().rposition(|&d| d != 0).map_or(1, |p| p + 2);
        warnings.push(AdmissibilityWarning::TrailingZeros { start });
    }
    Ok(AdmissibilityReport {
        checked_depth: depth,
        violation,
        warnings,
    })
}
