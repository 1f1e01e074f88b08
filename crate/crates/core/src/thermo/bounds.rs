use serde::{Deserialize, Serialize};

use super::partition::xi_constrained;
use super::potential::{osc_profile, Potential};
use crate::error::Result;
use crate::language::{z_after, PrefixAutomaton, Word};

/// Room for rounding when two sides of an inequality coincide exactly.
const LN_TOLERANCE: f64 = 1e-9;

/// `Ξ*(v) ≤ Ξ(v) ≤ (z(c_1)+2) e^{2‖φ‖} Ξ*(v̂)`, all as natural logs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma3Report {
    pub n: usize,
    pub k: i64,
    pub v: Word,
    pub v_hat: Word,
    pub ln_xi_star: f64,
    pub ln_xi: f64,
    pub ln_xi_star_hat: f64,
    pub ln_factor: f64,
    /// `ln Ξ(v) − ln Ξ*(v)`, nonnegative when the lower inequality holds.
    pub lower_slack: f64,
    /// `ln((z(c_1)+2) e^{2‖φ‖} Ξ*(v̂)) − ln Ξ(v)`.
    pub upper_slack: f64,
    pub holds: bool,
}

/// `Ξ*(v) ≥ |A|^{-(z(v)+1)} e^{-(z(v)+2)‖φ‖} Ξ*(v̂)`, as natural logs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma4Report {
    pub n: usize,
    pub k: i64,
    pub v: Word,
    pub v_hat: Word,
    pub z: usize,
    pub ln_xi_star: f64,
    pub ln_xi_star_hat: f64,
    pub ln_factor: f64,
    /// `ln Ξ*(v) − ln(factor · Ξ*(v̂))`.
    pub slack: f64,
    pub holds: bool,
}

pub fn check_lemma3(aut: &PrefixAutomaton, phi: &Potential, n: usize, k: i64, v: &Word) -> Result<Lemma3Report> {
    let info = aut.suffix_info(v)?;
    let norm = osc_profile(phi).norm;
    let z_c1 = z_after(aut.digits(), 1)?;
    let ln_factor = ((z_c1 + 2) as f64).ln() + 2.0 * norm;
    let star = xi_constrained(aut, phi, n, k, v, true)?.ln;
    let plain = xi_constrained(aut, phi, n, k, v, false)?.ln;
    let star_hat = xi_constrained(aut, phi, n, k, &info.hat, true)?.ln;
    let lower_slack = plain - star;
    let upper_slack = ln_factor + star_hat - plain;
    let tol = LN_TOLERANCE * plain.abs().max(1.0);
    Ok(Lemma3Report {
        n,
        k,
        v: v.clone(),
        v_hat: info.hat,
        ln_xi_star: star,
        ln_xi: plain,
        ln_xi_star_hat: star_hat,
        ln_factor,
        lower_slack,
        upper_slack,
        holds: lower_slack >= -tol && upper_slack >= -tol,
    })
}

pub fn check_lemma4(aut: &PrefixAutomaton, phi: &Potential, n: usize, k: i64, v: &Word) -> Result<Lemma4Report> {
    let info = aut.suffix_info(v)?;
    let norm = osc_profile(phi).norm;
    let z = info.z;
    let b = aut.alphabet() as f64;
    let ln_factor = -((z + 1) as f64) * b.ln() - (z + 2) as f64 * norm;
    let star = xi_constrained(aut, phi, n, k, v, true)?.ln;
    let star_hat = xi_constrained(aut, phi, n, k, &info.hat, true)?.ln;
    let slack = star - (ln_factor + star_hat);
    let tol = LN_TOLERANCE * star.abs().max(1.0);
    Ok(Lemma4Report {
        n,
        k,
        v: v.clone(),
        v_hat: info.hat,
        z,
        ln_xi_star: star,
        ln_xi_star_hat: star_hat,
        ln_factor,
        slack,
        holds: slack >= -tol,
    })
}
