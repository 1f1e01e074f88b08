use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::partition::{log_sum_exp, xi_full};
use super::potential::Potential;
use crate::digits::DigitSeq;
use crate::error::{Error, Result};
use crate::language::PrefixAutomaton;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PressureMode {
    /// `(1/(2n+1)) ln Ξ^n(φ)` over zero-padded configurations.
    Full,
    /// `(1/m) ln Σ_{w ∈ L_m, s(w)=ε} exp Σ_{j=1}^{m} φ(T^j w^♯)` with `m = 2n+1`.
    Loop,
    Both,
}

impl std::str::FromStr for PressureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(PressureMode::Full),
            "loop" | "loop-words" => Ok(PressureMode::Loop),
            "both" => Ok(PressureMode::Both),
            _ => Err(Error::Parse(format!("unknown pressure mode '{s}' (full, loop, both)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PressurePoint {
    pub n: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureCurve {
    pub mode: PressureMode,
    pub values: Vec<PressurePoint>,
    pub extrapolated: f64,
}

/// A pressure estimate from one or both finite-volume formulas.
///
/// With both modes, `values` is the full-mode curve, `extrapolated` is the
/// midpoint of the two extrapolations and `uncertainty` covers both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureEstimate {
    pub mode: PressureMode,
    pub values: Vec<PressurePoint>,
    pub curves: Vec<PressureCurve>,
    pub extrapolated: f64,
    pub uncertainty: f64,
}

impl PressureEstimate {
    pub fn curve(&self, mode: PressureMode) -> Option<&PressureCurve> {
        self.curves.iter().find(|c| c.mode == mode)
    }
}

pub fn pressure(aut: &PrefixAutomaton, phi: &Potential, n_max: usize, mode: PressureMode) -> Result<PressureEstimate> {
    if n_max == 0 {
        return Err(Error::DepthExceeded { needed: 1, available: 0 });
    }
    aut.check_length(2 * n_max + 1)?;
    let mut curves = Vec::new();
    if matches!(mode, PressureMode::Full | PressureMode::Both) {
        let values = (1..=n_max)
            .map(|n| {
                let xi = xi_full(aut, phi, n)?;
                Ok(PressurePoint {
                    n,
                    value: xi.ln / (2 * n + 1) as f64,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        curves.push(finish_curve(PressureMode::Full, values));
    }
    if matches!(mode, PressureMode::Loop | PressureMode::Both) {
        let values = (1..=n_max)
            .map(|n| {
                let m = 2 * n + 1;
                Ok(PressurePoint {
                    n,
                    value: loop_sum(aut.digits(), phi, m)? / m as f64,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        curves.push(finish_curve(PressureMode::Loop, values));
    }
    let step = |c: &PressureCurve| {
        let last = c.values.last().expect("n_max >= 1").value;
        (c.extrapolated - last).abs()
    };
    let (extrapolated, uncertainty) = match curves.as_slice() {
        [one] => (one.extrapolated, step(one)),
        [a, b] => {
            let mid = 0.5 * (a.extrapolated + b.extrapolated);
            let spread = 0.5 * (a.extrapolated - b.extrapolated).abs();
            (mid, spread + step(a).max(step(b)))
        }
        _ => unreachable!("one or two curves"),
    };
    Ok(PressureEstimate {
        mode,
        values: curves[0].values.clone(),
        curves,
        extrapolated,
        uncertainty,
    })
}

fn finish_curve(mode: PressureMode, values: Vec<PressurePoint>) -> PressureCurve {
    let seq: Vec<f64> = values.iter().map(|p| p.value).collect();
    PressureCurve {
        mode,
        extrapolated: aitken(&seq),
        values,
    }
}

/// Aitken's Δ² on the last three terms when they converge monotonically,
/// otherwise the last term.
pub fn aitken(seq: &[f64]) -> f64 {
    let n = seq.len();
    if n < 3 {
        return seq.last().copied().unwrap_or(f64::NAN);
    }
    let (a, b, c) = (seq[n - 3], seq[n - 2], seq[n - 1]);
    let d1 = b - a;
    let d2 = c - b;
    let den = d2 - d1;
    let monotone = d1 * d2 > 0.0 && d2.abs() < d1.abs();
    if !monotone || den.abs() < 1e-15 * c.abs().max(1.0) {
        return c;
    }
    c - d2 * d2 / den
}

/// `ln Σ_{w ∈ L_m, s(w) = ε} exp Σ_{j=1}^{m} φ(T^j w^♯)`.
///
/// Deliberately independent of the transfer sum used for `Ξ^n`: membership
/// is decided by comparing letters with the digits, configurations are keyed
/// by (matched prefix length, recent letters) in a hash map, and the weights
/// are combined with log-sum-exp.
pub(crate) fn loop_sum(digits: &DigitSeq, phi: &Potential, m: usize) -> Result<f64> {
    if digits.alphabet() != phi.alphabet() {
        return Err(Error::MalformedPotential(format!(
            "potential alphabet {} does not match digits alphabet {}",
            phi.alphabet(),
            digits.alphabet()
        )));
    }
    if !digits.is_extendable() && m > digits.depth() {
        return Err(Error::DepthExceeded {
            needed: m,
            available: digits.depth(),
        });
    }
    let (lo, hi) = phi.window();
    let mm = m as i64;
    let keep = phi.width() - 1;
    // w^♯ is zero left of 1 and right of m; scan every coordinate a term reads
    let first = 1 + lo.min(0);
    let last = mm + hi.max(0);
    let mut layer: HashMap<(usize, Vec<u32>), Vec<f64>> = HashMap::new();
    layer.insert((0, vec![0; keep]), vec![0.0]);
    for t in first..=last {
        let mut out: HashMap<(usize, Vec<u32>), Vec<f64>> = HashMap::new();
        let free = (1..=mm).contains(&t);
        let j = t - hi;
        let scored = (1..=mm).contains(&j);
        for ((matched, ctx), lns) in layer {
            let ln = log_sum_exp(&lns);
            let spine = if free { Some(digits.require(matched)?) } else { None };
            let letters: Vec<u32> = match spine {
                Some(c) => (0..=c).collect(),
                None => vec![0],
            };
            for a in letters {
                let next_matched = match spine {
                    Some(c) if a == c => matched + 1,
                    Some(_) => 0,
                    None => matched,
                };
                let mut window = ctx.clone();
                window.push(a);
                let gain = if scored { phi.eval(&window) } else { 0.0 };
                let next_ctx = window[1..].to_vec();
                out.entry((next_matched, next_ctx)).or_default().push(ln + gain);
            }
        }
        if t == mm {
            out.retain(|(matched, _), _| *matched == 0);
        }
        layer = out;
    }
    let finals: Vec<f64> = layer.values().map(|lns| log_sum_exp(lns)).collect();
    Ok(log_sum_exp(&finals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digits::{expand_one, CertifiedReal};
    use crate::language::{is_member_oracle, Word};

    fn golden() -> DigitSeq {
        DigitSeq::new(vec![1, 0], 2).unwrap().with_periodicity(0, 2).unwrap()
    }

    #[test]
    fn loop_sum_matches_enumeration() {
        let c = expand_one(&CertifiedReal::ratio(3, 2), 20).unwrap();
        let aut = PrefixAutomaton::build(&c).unwrap();
        let phi = Potential::from_fn("pair", 2, (-1, 1), |w| 0.3 * w[0] as f64 - 0.5 * (w[1] * w[2]) as f64 + 0.2).unwrap();
        for m in 1..=9usize {
            let mut terms = Vec::new();
            for mask in 0u64..(1 << m) {
                let w = Word::new((0..m).map(|i| ((mask >> i) & 1) as u32).collect());
                if is_member_oracle(&c, &w).unwrap() && aut.end_state(&w).unwrap() == 0 {
                    terms.push(phi.sharp_sum(&w, 1..=m as i64));
                }
            }
            let brute = log_sum_exp(&terms);
            let fast = loop_sum(&c, &phi, m).unwrap();
            assert!((fast - brute).abs() < 1e-12 * brute.abs().max(1.0), "m={m}");
        }
    }

    #[test]
    fn golden_pressure_both_modes() {
        let aut = PrefixAutomaton::build(&golden()).unwrap();
        let est = pressure(&aut, &Potential::zero(2), 15, PressureMode::Both).unwrap();
        let target = ((1.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((est.extrapolated - target).abs() <= est.uncertainty.max(1e-3));
        let full = est.curve(PressureMode::Full).unwrap().values.last().unwrap().value;
        let lp = est.curve(PressureMode::Loop).unwrap().values.last().unwrap().value;
        assert!(lp <= target && target <= full);
    }

    #[test]
    fn constants_shift_pressure() {
        let aut = PrefixAutomaton::build(&golden()).unwrap();
        let base = pressure(&aut, &Potential::zero(2), 6, PressureMode::Full).unwrap();
        let shifted = pressure(&aut, &Potential::constant(2, 0.75), 6, PressureMode::Full).unwrap();
        for (a, b) in base.values.iter().zip(&shifted.values) {
            assert!((b.value - a.value - 0.75).abs() < 1e-12);
        }
    }

    #[test]
    fn aitken_on_geometric_sequence() {
        let seq: Vec<f64> = (0..6).map(|k| 2.0 + 0.5f64.powi(k)).collect();
        assert!((aitken(&seq) - 2.0).abs() < 1e-12);
        assert_eq!(aitken(&[1.0, 2.0]), 2.0);
    }

    #[test]
    fn depth_is_checked() {
        let c = DigitSeq::new(vec![1, 0, 1, 0, 0], 2).unwrap();
        let aut = PrefixAutomaton::build(&c).unwrap();
        assert!(matches!(
            pressure(&aut, &Potential::zero(2), 3, PressureMode::Full),
            Err(Error::DepthExceeded { .. })
        ));
    }
}
