use serde::{Deserialize, Serialize};

use super::cylinder::{cylinder_with_total, mme_with, perron_data, Windowing};
use crate::error::{Error, Result};
use crate::language::{z_after, PrefixAutomaton, Word};
use crate::thermo::{osc_profile, xi_full, OscProfile, Potential};

/// Where the cylinder probabilities come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DefectSource {
    /// Finite-volume estimates `ν̂_n`.
    Estimator,
    /// Exact measure of maximal entropy; needs periodic digits and constant `φ`.
    ExactOracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectRow {
    pub word: Word,
    pub nu: f64,
    /// `Σ_{ℓ=0}^{m−1} ψ(T^ℓ ū^♯)`.
    pub psi_sum: f64,
    /// `|(1/m) ln ν − (1/m) Σ ψ|`.
    pub defect: f64,
}

/// `D_m = max_ū |(1/m) ln ν(ū) − (1/m) Σ_{ℓ<m} ψ(T^ℓ ū^♯)|`, `ψ = φ − p̂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub m: usize,
    pub n: usize,
    pub source: DefectSource,
    pub p_hat: f64,
    pub p_uncertainty: f64,
    pub defect: f64,
    /// The maximizing word.
    pub argmax: Word,
    /// `(1/m) Σ_ℓ Σ_{i: ℓ+i ∉ [0,m−1]} δ_i`: how far `Σψ` can move inside the cylinder.
    pub correction: f64,
    /// `D_m` widened by the correction and the pressure uncertainty.
    pub lower: f64,
    pub upper: f64,
    pub rows: Vec<DefectRow>,
    /// Words of the language whose estimate came out as 0.
    pub anomalies: Vec<Word>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectOptions {
    pub source: DefectSource,
    pub windowing: Windowing,
    /// Pressure estimate and its uncertainty; ignored by the exact oracle.
    pub p_hat: f64,
    pub p_uncertainty: f64,
}

/// `(1/m) Σ_{ℓ=0}^{m−1} Σ_{i: ℓ+i ∉ [0,m−1]} δ_i`.
pub fn cylinder_correction(profile: &OscProfile, m: usize) -> f64 {
    let mut total = 0.0;
    for l in 0..m as i64 {
        for o in &profile.deltas {
            let pos = l + o.i;
            if pos < 0 || pos >= m as i64 {
                total += o.delta;
            }
        }
    }
    total / m as f64
}

/// The pressure of a constant potential on eventually periodic digits:
/// `ln λ + κ`, exact up to the eigen-solver.
pub fn exact_pressure(aut: &PrefixAutomaton, phi: &Potential) -> Result<f64> {
    let kappa = constant_value(phi)
        .ok_or_else(|| Error::OracleUnavailable("the exact oracle only covers constant potentials".into()))?;
    Ok(perron_data(aut)?.lambda.ln() + kappa)
}

fn constant_value(phi: &Potential) -> Option<f64> {
    let first = phi.table()[0];
    phi.table().iter().all(|&v| v == first).then_some(first)
}

pub fn weak_gibbs_defect(
    aut: &PrefixAutomaton,
    phi: &Potential,
    m: usize,
    n: usize,
    opts: &DefectOptions,
) -> Result<DefectReport> {
    let words: Vec<Word> = aut.enumerate_words(m)?.collect();
    defect_over(aut, phi, &words, m, n, opts)
}

pub(crate) fn defect_over(
    aut: &PrefixAutomaton,
    phi: &Potential,
    words: &[Word],
    m: usize,
    n: usize,
    opts: &DefectOptions,
) -> Result<DefectReport> {
    if m == 0 {
        return Err(Error::WindowTooSmall { m, n });
    }
    let (p_hat, p_uncertainty, nus) = match opts.source {
        DefectSource::ExactOracle => {
            if !aut.is_folded() {
                return Err(Error::NotEventuallyPeriodic);
            }
            let p = exact_pressure(aut, phi)?;
            let perron = perron_data(aut)?;
            let nus = words.iter().map(|w| mme_with(aut, &perron, w)).collect::<Result<Vec<_>>>()?;
            (p, 0.0, nus)
        }
        DefectSource::Estimator => {
            let total = xi_full(aut, phi, n)?;
            let nus = words
                .iter()
                .map(|w| cylinder_with_total(aut, phi, w, n, opts.windowing, &total).map(|e| e.value))
                .collect::<Result<Vec<_>>>()?;
            (opts.p_hat, opts.p_uncertainty, nus)
        }
    };
    let mf = m as f64;
    let mut rows = Vec::with_capacity(words.len());
    let mut anomalies = Vec::new();
    let mut best: Option<(f64, Word)> = None;
    for (w, &nu) in words.iter().zip(&nus) {
        // ψ-sum over ℓ = 0..m−1 with ū on 0..m−1 equals the φ-sum over 1..m with ū on 1..m
        let psi_sum = phi.sharp_sum(w, 1..=m as i64) - mf * p_hat;
        if nu <= 0.0 {
            anomalies.push(w.clone());
            rows.push(DefectRow {
                word: w.clone(),
                nu,
                psi_sum,
                defect: f64::INFINITY,
            });
            continue;
        }
        let defect = ((nu.ln() - psi_sum) / mf).abs();
        if best.as_ref().is_none_or(|(d, _)| defect > *d) {
            best = Some((defect, w.clone()));
        }
        rows.push(DefectRow {
            word: w.clone(),
            nu,
            psi_sum,
            defect,
        });
    }
    let (defect, argmax) = best.unwrap_or((0.0, Word::empty()));
    let correction = cylinder_correction(&osc_profile(phi), m);
    Ok(DefectReport {
        m,
        n,
        source: opts.source,
        p_hat,
        p_uncertainty,
        defect,
        argmax,
        correction,
        lower: (defect - correction - p_uncertainty).max(0.0),
        upper: defect + correction + p_uncertainty,
        rows,
        anomalies,
    })
}

/// The constants of the upper and lower cylinder bounds and whether a
/// measured probability lies between `K⁻·G` and `K⁺·G`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub word: Word,
    pub m: usize,
    pub epsilon: f64,
    pub k_plus: f64,
    pub k_minus: f64,
    /// `exp(Σ_{j=1}^m φ(T^j ū^♯) − m p̂)`.
    pub g: f64,
    pub nu: f64,
    pub lower: f64,
    pub upper: f64,
    pub contained: bool,
}

/// `K⁺ = (z(c_1)+2) e^{3‖φ‖} e^{5mε}` and
/// `K⁻ = |A|^{-(z(ū)+1)} e^{-(z(ū)+2)‖φ‖} / ((z(c_1)+2)² e^{5mε+3‖φ‖})`.
pub fn k_envelope(aut: &PrefixAutomaton, phi: &Potential, u: &Word, epsilon: f64, p_hat: f64, nu: f64) -> Result<Envelope> {
    let m = u.len();
    let info = aut.suffix_info(u)?;
    let norm = osc_profile(phi).norm;
    let z_c1 = z_after(aut.digits(), 1)? as f64;
    let z_u = info.z as f64;
    let mf = m as f64;
    let b = aut.alphabet() as f64;
    let k_plus = (z_c1 + 2.0) * (3.0 * norm).exp() * (5.0 * mf * epsilon).exp();
    let k_minus = b.powf(-(z_u + 1.0)) * (-(z_u + 2.0) * norm).exp()
        / ((z_c1 + 2.0).powi(2) * (5.0 * mf * epsilon + 3.0 * norm).exp());
    let g = (phi.sharp_sum(u, 1..=m as i64) - mf * p_hat).exp();
    let (lower, upper) = (k_minus * g, k_plus * g);
    Ok(Envelope {
        word: u.clone(),
        m,
        epsilon,
        k_plus,
        k_minus,
        g,
        nu,
        lower,
        upper,
        contained: lower <= nu && nu <= upper,
    })
}
