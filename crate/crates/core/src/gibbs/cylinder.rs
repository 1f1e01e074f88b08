use serde::{Deserialize, Serialize};

use crate::digits::DigitSeq;
use crate::error::{Error, Result};
use crate::language::{PrefixAutomaton, Word};
use crate::thermo::{transfer, xi_full, PartitionSum, Pin, Potential};

/// Which placements `[j, j+m−1]` of the cylinder are averaged.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Windowing {
    /// Only placements inside `[-n, n]`.
    #[default]
    Interior,
    /// Every `j ∈ [-n, n]`; coordinates past `n` are the padding zeros.
    Literal,
}

impl std::str::FromStr for Windowing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interior" => Ok(Windowing::Interior),
            "literal" => Ok(Windowing::Literal),
            _ => Err(Error::Parse(format!("unknown windowing '{s}' (interior, literal)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositionRatio {
    pub j: i64,
    pub ratio: f64,
}

/// `ν̂_n(I_ū)`: the average over placements `j` of `Ξ^n_{[j,j+m−1]}(ū) / Ξ^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderEstimate {
    pub word: Word,
    pub n: usize,
    pub windowing: Windowing,
    pub value: f64,
    pub ratios: Vec<PositionRatio>,
}

pub fn cylinder_estimate(
    aut: &PrefixAutomaton,
    phi: &Potential,
    u: &Word,
    n: usize,
    windowing: Windowing,
) -> Result<CylinderEstimate> {
    let total = xi_full(aut, phi, n)?;
    cylinder_with_total(aut, phi, u, n, windowing, &total)
}

/// [`cylinder_estimate`] reusing a precomputed `Ξ^n`.
pub(crate) fn cylinder_with_total(
    aut: &PrefixAutomaton,
    phi: &Potential,
    u: &Word,
    n: usize,
    windowing: Windowing,
    total: &PartitionSum,
) -> Result<CylinderEstimate> {
    let m = u.len();
    let nn = n as i64;
    if m == 0 || m > 2 * n + 1 {
        return Err(Error::WindowTooSmall { m, n });
    }
    let positions: Vec<i64> = match windowing {
        Windowing::Interior => (-nn..=nn - m as i64 + 1).collect(),
        Windowing::Literal => (-nn..=nn).collect(),
    };
    // a word outside the language pins no configuration at all
    if !aut.is_member(u)? {
        return Ok(CylinderEstimate {
            word: u.clone(),
            n,
            windowing,
            value: 0.0,
            ratios: positions.iter().map(|&j| PositionRatio { j, ratio: 0.0 }).collect(),
        });
    }
    let mut ratios = Vec::with_capacity(positions.len());
    for &j in &positions {
        let pinned = transfer(
            aut,
            phi,
            n,
            Some(Pin {
                start: j,
                letters: u.letters(),
                star: false,
            }),
        )?;
        ratios.push(PositionRatio {
            j,
            ratio: pinned.ratio(total),
        });
    }
    let value = ratios.iter().map(|r| r.ratio).sum::<f64>() / positions.len() as f64;
    Ok(CylinderEstimate {
        word: u.clone(),
        n,
        windowing,
        value,
        ratios,
    })
}

/// Perron data of the folded automaton: `λ`, left and right eigenvectors.
#[derive(Debug, Clone)]
pub struct PerronData {
    pub lambda: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

/// Power iteration on `A + I` (same eigenvectors, no periodicity trouble).
pub fn perron_data(aut: &PrefixAutomaton) -> Result<PerronData> {
    if !aut.is_folded() {
        return Err(Error::NotEventuallyPeriodic);
    }
    let states = aut.state_bound(0)?;
    let mut adj = vec![vec![0.0f64; states]; states];
    for s in 0..states {
        for a in 0..aut.alphabet() {
            if let Some(t) = aut.step(s, a)? {
                adj[s][t] += 1.0;
            }
        }
    }
    let iterate = |transpose: bool| -> Vec<f64> {
        let mut x = vec![1.0f64; states];
        for _ in 0..100_000 {
            let mut y = x.clone();
            for s in 0..states {
                for t in 0..states {
                    if transpose {
                        y[t] += adj[s][t] * x[s];
                    } else {
                        y[s] += adj[s][t] * x[t];
                    }
                }
            }
            let norm: f64 = y.iter().sum();
            y.iter_mut().for_each(|v| *v /= norm);
            let delta = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            x = y;
            if delta < 1e-16 {
                break;
            }
        }
        x
    };
    let right = iterate(false);
    let left = iterate(true);
    // λ from the Rayleigh-type ratio (A v)_s / v_s at the largest entry
    let s = (0..states).max_by(|&a, &b| right[a].total_cmp(&right[b])).unwrap();
    let av: f64 = (0..states).map(|t| adj[s][t] * right[t]).sum();
    Ok(PerronData {
        lambda: av / right[s],
        left,
        right,
    })
}

/// Measure of maximal entropy of the cylinder `[w]` for eventually periodic
/// digits, from the Perron eigendata of the folded automaton:
/// `ν[w] = Σ_s ℓ_s r_{δ(s,w)} / (λ^{|w|} ⟨ℓ, r⟩)`.
pub fn mme_oracle(digits: &DigitSeq, w: &Word) -> Result<f64> {
    if digits.periodicity().is_none() {
        return Err(Error::NotEventuallyPeriodic);
    }
    let aut = PrefixAutomaton::build(digits)?;
    mme_with(&aut, &perron_data(&aut)?, w)
}

pub(crate) fn mme_with(aut: &PrefixAutomaton, perron: &PerronData, w: &Word) -> Result<f64> {
    let states = perron.right.len();
    let norm: f64 = (0..states).map(|s| perron.left[s] * perron.right[s]).sum();
    let mut total = 0.0;
    for s in 0..states {
        let mut state = Some(s);
        for &a in w.letters() {
            state = match state {
                Some(q) => aut.step(q, a)?,
                None => break,
            };
        }
        if let Some(t) = state {
            total += perron.left[s] * perron.right[t];
        }
    }
    Ok(total / (perron.lambda.powi(w.len() as i32) * norm))
}
