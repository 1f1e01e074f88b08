//! Named β values used as fixtures.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::digits::{beta_from_digits, expand_one, CertifiedReal, DigitSeq, ZeroRunSchedule};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// `(1+√5)/2`, `c = (10)^∞`.
    Golden,
    /// Root of `x³ = x² + x + 1`, `c = (110)^∞`.
    Tribonacci,
    /// `3/2`, whose expansion of 1 is not eventually periodic.
    ThreeHalves,
    /// `c = 1 0² 1 0⁴ 1 0⁸ ⋯`: zero runs doubling in length.
    DoublingZeros,
}

pub const DOUBLING_SCHEDULE: ZeroRunSchedule = ZeroRunSchedule { first: 2, ratio: 2 };

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Golden, Preset::Tribonacci, Preset::ThreeHalves, Preset::DoublingZeros];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Golden => "golden",
            Preset::Tribonacci => "tribonacci",
            Preset::ThreeHalves => "three-halves",
            Preset::DoublingZeros => "doubling-zeros",
        }
    }

    /// At least `depth` digits; periodic and scheduled presets also carry
    /// their certificate, so they extend past `depth` on demand.
    pub fn digits(self, depth: usize) -> Result<DigitSeq> {
        let depth = depth.max(1);
        match self {
            Preset::Golden => DigitSeq::new(vec![1, 0], 2)?.with_periodicity(0, 2)?.extended(depth),
            Preset::Tribonacci => DigitSeq::new(vec![1, 1, 0], 2)?.with_periodicity(0, 3)?.extended(depth),
            Preset::ThreeHalves => expand_one(&CertifiedReal::ratio(3, 2), depth),
            Preset::DoublingZeros => DigitSeq::from_schedule(DOUBLING_SCHEDULE, 2, depth),
        }
    }

    /// β itself, exact where possible, otherwise an enclosure of width `≤ 1e-12`.
    pub fn beta(self) -> Result<CertifiedReal> {
        match self {
            Preset::Golden => CertifiedReal::quadratic(1, 1, 5, 2),
            Preset::ThreeHalves => Ok(CertifiedReal::ratio(3, 2)),
            Preset::Tribonacci | Preset::DoublingZeros => beta_from_digits(&self.digits(8)?, 1e-12),
        }
    }

    pub fn log_beta(self) -> Result<f64> {
        Ok(self.beta()?.midpoint_f64().ln())
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown preset '{s}' (golden, tribonacci, three-halves, doubling-zeros)")))
    }
}
