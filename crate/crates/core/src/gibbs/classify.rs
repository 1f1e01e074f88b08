use serde::{Deserialize, Serialize};

use super::cylinder::{cylinder_with_total, Windowing};
use super::defect::{defect_over, exact_pressure, DefectOptions, DefectReport, DefectSource};
use crate::digits::DigitSeq;
use crate::error::{Error, Result};
use crate::language::{z_after, zbar_profile, PrefixAutomaton, Word, ZbarProfile, ZbarVerdict};
use crate::thermo::{pressure, xi_full, PressureMode, Potential};

/// A prefix `w = c_1 ⋯ c_m` followed in `c` by a record zero run of length `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub m: usize,
    pub word: Word,
    pub z: usize,
    pub ratio: f64,
    /// `w 0^z`, which every configuration through `w` is forced to continue with.
    pub padded: Word,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessFamily {
    pub witnesses: Vec<Witness>,
    /// `lim z(w^k)/m_k` when a certificate pins it down.
    pub limit_ratio: Option<f64>,
    /// True when the family certifies a positive limit.
    pub positive: bool,
}

/// One witness per record of `z`, over prefixes of length `≤ max_m`.
pub fn make_witnesses(digits: &DigitSeq, max_m: usize) -> Result<WitnessFamily> {
    let profile = zbar_profile(digits, max_m)?;
    witnesses_from(digits, &profile)
}

fn witnesses_from(digits: &DigitSeq, profile: &ZbarProfile) -> Result<WitnessFamily> {
    let longest = profile.checkpoints.iter().map(|p| p.n + p.zbar).max().unwrap_or(1);
    let deep = if digits.is_extendable() { digits.extended(longest)? } else { digits.clone() };
    let aut = PrefixAutomaton::build(&deep)?;
    let mut witnesses = Vec::with_capacity(profile.checkpoints.len());
    for p in &profile.checkpoints {
        let word = Word::new((0..p.n).map(|i| deep.require(i)).collect::<Result<_>>()?);
        let z = z_after(&deep, p.n)?;
        let padded = word.concat(&Word::zeros(z));
        aut.require_member(&word)?;
        aut.require_member(&padded)?;
        witnesses.push(Witness {
            m: p.n,
            word,
            z,
            ratio: z as f64 / p.n as f64,
            padded,
        });
    }
    let positive = profile.verdict == ZbarVerdict::PositiveLimsupEvidence;
    Ok(WitnessFamily {
        witnesses,
        limit_ratio: profile.limit_ratio,
        positive,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    WeakGibbs,
    #[serde(rename = "NotWeakGibbs-evidence")]
    NotWeakGibbsEvidence,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::WeakGibbs => "WeakGibbs",
            Verdict::NotWeakGibbsEvidence => "NotWeakGibbs-evidence",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    /// Largest cylinder length examined.
    pub m_max: usize,
    /// Volume `[-n, n]` of the finite-volume estimates.
    pub n: usize,
    /// Largest `n` of the pressure estimate.
    pub n_pressure: usize,
    /// Length of the `z̄` profile.
    pub zbar_len: usize,
    pub windowing: Windowing,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            m_max: 12,
            n: 12,
            n_pressure: 15,
            zbar_len: 200,
            windowing: Windowing::Interior,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessDefect {
    pub m: usize,
    pub word: Word,
    pub z: usize,
    pub nu: f64,
    pub defect: f64,
    /// `0.1 · (p̂ − φ(0))`, the smallest defect counted as non-vanishing.
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectPoint {
    pub m: usize,
    pub defect: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Everything the classifier looked at, plus its verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsReport {
    pub verdict: Verdict,
    /// Whether the growth of `z̄` behind the verdict is certified rather than observed.
    pub certified: bool,
    pub reason: String,
    pub p_hat: f64,
    pub p_uncertainty: f64,
    pub phi_at_zero: f64,
    pub source: DefectSource,
    pub n: usize,
    pub defects: Vec<DefectPoint>,
    pub zbar: ZbarProfile,
    pub witnesses: Vec<Witness>,
    pub witness_defects: Vec<WitnessDefect>,
}

pub fn classify(digits: &DigitSeq, phi: &Potential, opts: &ClassifyOptions) -> Result<GibbsReport> {
    let need = (2 * opts.n.max(opts.n_pressure) + 1).max(opts.m_max);
    if !digits.is_extendable() && digits.depth() < need {
        return classify_shallow(digits, phi, opts, need);
    }
    let deep = if digits.is_extendable() { digits.extended(need)? } else { digits.clone() };
    let aut = PrefixAutomaton::build(&deep)?;

    // keep the z̄ profile within what the digits can resolve
    let zbar_len = if deep.is_extendable() {
        opts.zbar_len
    } else {
        let trailing = deep.digits().iter().rev().take_while(|&&d| d == 0).count();
        opts.zbar_len.min(deep.depth().saturating_sub(trailing + 1)).max(1)
    };
    let profile = zbar_profile(&deep, zbar_len)?;

    let exact = aut.is_folded() && exact_pressure(&aut, phi).is_ok();
    let (p_hat, p_uncertainty, source) = if exact {
        (exact_pressure(&aut, phi)?, 0.0, DefectSource::ExactOracle)
    } else {
        let est = pressure(&aut, phi, opts.n_pressure, PressureMode::Both)?;
        (est.extrapolated, est.uncertainty, DefectSource::Estimator)
    };
    let defect_opts = DefectOptions {
        source,
        windowing: opts.windowing,
        p_hat,
        p_uncertainty,
    };
    let mut defects = Vec::with_capacity(opts.m_max);
    for m in 1..=opts.m_max {
        let words: Vec<Word> = aut.enumerate_words(m)?.collect();
        let r: DefectReport = defect_over(&aut, phi, &words, m, opts.n, &defect_opts)?;
        defects.push(DefectPoint {
            m,
            defect: r.defect,
            lower: r.lower,
            upper: r.upper,
        });
    }

    let family = witnesses_from(&deep, &profile)?;
    let phi0 = phi.at_zero();
    let threshold = 0.1 * (p_hat - phi0);
    let total = xi_full(&aut, phi, opts.n)?;
    let mut witness_defects = Vec::new();
    for w in family.witnesses.iter().filter(|w| w.m <= opts.m_max) {
        let nu = cylinder_with_total(&aut, phi, &w.word, opts.n, opts.windowing, &total)?.value;
        let psi_sum = phi.sharp_sum(&w.word, 1..=w.m as i64) - w.m as f64 * p_hat;
        let defect = if nu > 0.0 { ((nu.ln() - psi_sum) / w.m as f64).abs() } else { f64::INFINITY };
        witness_defects.push(WitnessDefect {
            m: w.m,
            word: w.word.clone(),
            z: w.z,
            nu,
            defect,
            threshold,
        });
    }

    let (verdict, certified, reason) = match profile.verdict {
        ZbarVerdict::CertifiedSublinear => (
            Verdict::WeakGibbs,
            true,
            format!("periodic digits bound zbar by {}", profile.bound.unwrap_or(0)),
        ),
        ZbarVerdict::PositiveLimsupEvidence => {
            let enough = witness_defects.len() >= 2;
            let gap = p_hat - p_uncertainty > phi0;
            let all_large = witness_defects.iter().all(|w| w.defect >= w.threshold);
            if enough && gap && all_large {
                (
                    Verdict::NotWeakGibbsEvidence,
                    true,
                    format!(
                        "zero-run schedule forces zbar(n)/n -> {:.3}; p_hat {:.6} > phi(0) {:.6}; {} witness defects above threshold",
                        profile.limit_ratio.unwrap_or(0.0),
                        p_hat,
                        phi0,
                        witness_defects.len()
                    ),
                )
            } else {
                let why = if !enough {
                    "fewer than two witnesses fit in m_max"
                } else if !gap {
                    "pressure estimate does not clear phi(0)"
                } else {
                    "some witness defect falls below threshold"
                };
                (Verdict::Inconclusive, false, format!("linear zbar certified but {why}"))
            }
        }
        ZbarVerdict::Inconclusive => (
            Verdict::Inconclusive,
            false,
            format!(
                "no certificate on the digits; zbar(n)/n reaches {:.3} in the second half of n <= {zbar_len}",
                profile.tail_max_ratio
            ),
        ),
    };

    Ok(GibbsReport {
        verdict,
        certified,
        reason,
        p_hat,
        p_uncertainty,
        phi_at_zero: phi0,
        source,
        n: opts.n,
        defects,
        zbar: profile,
        witnesses: family.witnesses,
        witness_defects,
    })
}

/// A finite prefix too short for the requested volume: the evidence is
/// gathered at the largest volume it supports and the verdict is withheld.
fn classify_shallow(digits: &DigitSeq, phi: &Potential, opts: &ClassifyOptions, need: usize) -> Result<GibbsReport> {
    let depth = digits.depth();
    let why = format!("digit prefix of length {depth} is shorter than the {need} digits the requested volume needs");
    let n_eff = depth.saturating_sub(1) / 2;
    if n_eff >= 1 {
        let reduced = ClassifyOptions {
            n: opts.n.min(n_eff),
            n_pressure: opts.n_pressure.min(n_eff),
            m_max: opts.m_max.min(2 * n_eff + 1),
            ..*opts
        };
        let mut r = classify(digits, phi, &reduced)?;
        r.verdict = Verdict::Inconclusive;
        r.certified = false;
        r.reason = format!("{why}; evidence taken at n = {}", reduced.n);
        return Ok(r);
    }
    let aut = PrefixAutomaton::build(digits)?;
    let count = aut.count_words(depth)?.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let p_hat = count.ln() / depth as f64;
    let profile = zbar_profile(digits, 1)?;
    let family = witnesses_from(digits, &profile)?;
    Ok(GibbsReport {
        verdict: Verdict::Inconclusive,
        certified: false,
        reason: why,
        p_hat,
        p_uncertainty: p_hat.abs(),
        phi_at_zero: phi.at_zero(),
        source: DefectSource::Estimator,
        n: 0,
        defects: Vec::new(),
        zbar: profile,
        witnesses: family.witnesses,
        witness_defects: Vec::new(),
    })
}

impl GibbsReport {
    pub fn defect_at(&self, m: usize) -> Option<f64> {
        self.defects.iter().find(|d| d.m == m).map(|d| d.defect)
    }
}

/// The alphabet of the potential must match the digits.
pub fn check_alphabets(digits: &DigitSeq, phi: &Potential) -> Result<()> {
    if digits.alphabet() != phi.alphabet() {
        return Err(Error::MalformedPotential(format!(
            "potential alphabet {} does not match digits alphabet {}",
            phi.alphabet(),
            digits.alphabet()
        )));
    }
    Ok(())
}
