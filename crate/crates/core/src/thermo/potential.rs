use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::language::{PrefixAutomaton, Word};

/// Largest table a potential may carry unless the caller raises it.
pub const DEFAULT_TABLE_BUDGET: u64 = 1 << 20;

/// A potential `φ(x) = table[x_{-a} ⋯ x_b]` depending on finitely many
/// coordinates. The table is dense, indexed by the window letters read as a
/// base-`b` number with the leftmost letter most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    name: String,
    alphabet: u32,
    lo: i64,
    hi: i64,
    table: Vec<f64>,
}

impl Potential {
    /// Builds the table by evaluating `f` on every window word.
    pub fn from_fn(name: &str, alphabet: u32, window: (i64, i64), f: impl Fn(&[u32]) -> f64) -> Result<Self> {
        Self::from_fn_with_budget(name, alphabet, window, DEFAULT_TABLE_BUDGET, f)
    }

    pub fn from_fn_with_budget(
        name: &str,
        alphabet: u32,
        (lo, hi): (i64, i64),
        budget: u64,
        f: impl Fn(&[u32]) -> f64,
    ) -> Result<Self> {
        if alphabet < 2 {
            return Err(Error::MalformedPotential(format!("alphabet size {alphabet} < 2")));
        }
        if lo > hi {
            return Err(Error::MalformedPotential(format!("empty window [{lo}, {hi}]")));
        }
        let width = (hi - lo + 1) as u32;
        let size = table_size(alphabet, width, budget)?;
        let mut letters = vec![0u32; width as usize];
        let mut table = Vec::with_capacity(size);
        for idx in 0..size {
            decode(idx, alphabet, &mut letters);
            let v = f(&letters);
            if !v.is_finite() {
                return Err(Error::MalformedPotential(format!("non-finite value at window {letters:?}")));
            }
            table.push(v);
        }
        Ok(Potential {
            name: name.to_string(),
            alphabet,
            lo,
            hi,
            table,
        })
    }

    pub fn zero(alphabet: u32) -> Self {
        Self::constant(alphabet, 0.0)
    }

    pub fn constant(alphabet: u32, kappa: f64) -> Self {
        let name = if kappa == 0.0 { "zero".to_string() } else { format!("constant {kappa}") };
        Self::from_fn(&name, alphabet, (0, 0), |_| kappa).expect("single-letter window")
    }

    /// `t · 1[x_0 = letter]`.
    pub fn indicator(alphabet: u32, letter: u32, t: f64) -> Self {
        Self::from_fn(&format!("{t}*[x0={letter}]"), alphabet, (0, 0), |w| if w[0] == letter { t } else { 0.0 })
            .expect("single-letter window")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    /// `[lo, hi]`: `φ(x)` reads `x_lo, …, x_hi`.
    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn width(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    /// `max(|lo|, |hi|)`.
    pub fn radius(&self) -> u64 {
        self.lo.unsigned_abs().max(self.hi.unsigned_abs())
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Table index of a window word.
    pub fn index(&self, window: &[u32]) -> usize {
        window.iter().fold(0usize, |acc, &a| acc * self.alphabet as usize + a as usize)
    }

    /// `φ` on a configuration whose window reads `window`.
    pub fn eval(&self, window: &[u32]) -> f64 {
        self.table[self.index(window)]
    }

    /// `φ(T^j x)` for a configuration given coordinatewise.
    pub fn at(&self, x: &dyn Fn(i64) -> u32, j: i64) -> f64 {
        let window: Vec<u32> = (j + self.lo..=j + self.hi).map(x).collect();
        self.eval(&window)
    }

    /// `Σ_{j ∈ js} φ(T^j x)`.
    pub fn birkhoff_sum(&self, x: &dyn Fn(i64) -> u32, js: RangeInclusive<i64>) -> f64 {
        js.map(|j| self.at(x, j)).sum()
    }

    /// `Σ_{j ∈ js} φ(T^j w^♯)` where `w^♯` carries `w` on `1..=|w|` and zeros elsewhere.
    pub fn sharp_sum(&self, w: &Word, js: RangeInclusive<i64>) -> f64 {
        let letters = w.letters();
        let x = |i: i64| {
            if i >= 1 && (i as usize) <= letters.len() {
                letters[i as usize - 1]
            } else {
                0
            }
        };
        self.birkhoff_sum(&x, js)
    }

    /// `φ(0^∞)`.
    pub fn at_zero(&self) -> f64 {
        self.table[0]
    }

    pub fn sup_norm(&self) -> f64 {
        self.table.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `φ + κ`.
    pub fn shifted(&self, kappa: f64) -> Potential {
        Potential {
            name: format!("{}+{kappa}", self.name),
            table: self.table.iter().map(|v| v + kappa).collect(),
            ..self.clone()
        }
    }

    /// For finite windows and `x`, `y` agreeing on `[1, m]`, only the terms
    /// whose window pokes out of `[1, m]` can differ: at most `2r` of them,
    /// each by at most `2 sup|φ|`.
    pub fn boundary_variation_bound(&self) -> f64 {
        2.0 * self.radius() as f64 * 2.0 * self.sup_norm()
    }

    /// Parses `{"window": [lo, hi], "alphabet": b, "table": {"<letters>": value}}`.
    /// Keys concatenate the window letters (comma-separated when `b > 10`);
    /// an optional `"default"` fills missing entries, otherwise the table must
    /// be total.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: PotentialFile =
            serde_json::from_str(text).map_err(|e| Error::MalformedPotential(e.to_string()))?;
        let (lo, hi) = (file.window[0], file.window[1]);
        if lo > hi {
            return Err(Error::MalformedPotential(format!("empty window [{lo}, {hi}]")));
        }
        let width = (hi - lo + 1) as usize;
        let size = table_size(file.alphabet, width as u32, DEFAULT_TABLE_BUDGET)?;
        let mut table: Vec<Option<f64>> = vec![file.default; size];
        for (key, value) in &file.table {
            let letters = parse_key(key, file.alphabet)?;
            if letters.len() != width {
                return Err(Error::MalformedPotential(format!(
                    "key '{key}' has {} letters, window needs {width}",
                    letters.len()
                )));
            }
            let idx = letters.iter().fold(0usize, |acc, &a| acc * file.alphabet as usize + a as usize);
            table[idx] = Some(*value);
        }
        let mut letters = vec![0u32; width];
        let mut dense = Vec::with_capacity(size);
        for (idx, v) in table.into_iter().enumerate() {
            match v {
                Some(v) if v.is_finite() => dense.push(v),
                Some(v) => return Err(Error::MalformedPotential(format!("non-finite value {v}"))),
                None => {
                    decode(idx, file.alphabet, &mut letters);
                    return Err(Error::MalformedPotential(format!(
                        "no value for window {} and no default",
                        key_of(&letters, file.alphabet)
                    )));
                }
            }
        }
        Ok(Potential {
            name: file.name.unwrap_or_else(|| "potential".into()),
            alphabet: file.alphabet,
            lo,
            hi,
            table: dense,
        })
    }

    /// Inverse of [`Potential::from_json`], listing every entry.
    pub fn to_json(&self) -> String {
        let mut letters = vec![0u32; self.width()];
        let mut table = BTreeMap::new();
        for (idx, &v) in self.table.iter().enumerate() {
            decode(idx, self.alphabet, &mut letters);
            table.insert(key_of(&letters, self.alphabet), v);
        }
        let file = PotentialFile {
            window: [self.lo, self.hi],
            alphabet: self.alphabet,
            table,
            default: None,
            name: Some(self.name.clone()),
        };
        serde_json::to_string_pretty(&file).expect("plain data serializes")
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PotentialFile {
    window: [i64; 2],
    alphabet: u32,
    #[serde(default)]
    table: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    default: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

fn table_size(alphabet: u32, width: u32, budget: u64) -> Result<usize> {
    let needed = (alphabet as u64).checked_pow(width).unwrap_or(u64::MAX);
    if needed > budget {
        return Err(Error::WindowTooLarge { needed, budget });
    }
    Ok(needed as usize)
}

fn decode(mut idx: usize, alphabet: u32, out: &mut [u32]) {
    for slot in out.iter_mut().rev() {
        *slot = (idx % alphabet as usize) as u32;
        idx /= alphabet as usize;
    }
}

fn key_of(letters: &[u32], alphabet: u32) -> String {
    let parts: Vec<String> = letters.iter().map(u32::to_string).collect();
    parts.join(if alphabet > 10 { "," } else { "" })
}

fn parse_key(key: &str, alphabet: u32) -> Result<Vec<u32>> {
    let bad = || Error::MalformedPotential(format!("bad table key '{key}'"));
    let letters: Vec<u32> = if key.contains(',') || alphabet > 10 {
        key.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?
    } else {
        key.chars().map(|c| c.to_digit(10).ok_or_else(bad)).collect::<Result<_>>()?
    };
    if letters.iter().any(|&a| a >= alphabet) {
        return Err(bad());
    }
    Ok(letters)
}

/// One entry `δ_i` of the oscillation profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Oscillation {
    pub i: i64,
    pub delta: f64,
}

/// `δ_i(φ)` for every coordinate of the window, their sum and `sup|φ|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscProfile {
    pub deltas: Vec<Oscillation>,
    pub norm: f64,
    pub sup_norm: f64,
}

impl OscProfile {
    pub fn delta(&self, i: i64) -> f64 {
        self.deltas.iter().find(|o| o.i == i).map_or(0.0, |o| o.delta)
    }
}

/// Oscillations over the full shift: `δ_i = max |φ(x) − φ(y)|` over pairs
/// differing only at coordinate `i`. Coordinates outside the window have
/// `δ_i = 0` and are not listed.
pub fn osc_profile(phi: &Potential) -> OscProfile {
    profile_over(phi, |_| true)
}

/// Oscillations over pairs whose window words both lie in the language.
pub fn osc_profile_within(phi: &Potential, aut: &PrefixAutomaton) -> Result<OscProfile> {
    if aut.alphabet() != phi.alphabet() {
        return Err(Error::MalformedPotential(format!(
            "potential alphabet {} does not match digits alphabet {}",
            phi.alphabet(),
            aut.alphabet()
        )));
    }
    let mut legal = vec![false; phi.table.len()];
    let mut letters = vec![0u32; phi.width()];
    for (idx, slot) in legal.iter_mut().enumerate() {
        decode(idx, phi.alphabet, &mut letters);
        *slot = aut.is_member(&Word::from(letters.as_slice()))?;
    }
    Ok(profile_over(phi, |idx| legal[idx]))
}

fn profile_over(phi: &Potential, allowed: impl Fn(usize) -> bool) -> OscProfile {
    let b = phi.alphabet as usize;
    let width = phi.width();
    let mut deltas = Vec::with_capacity(width);
    for pos in 0..width {
        // stride of coordinate `pos` in the table index
        let stride = b.pow((width - 1 - pos) as u32);
        let mut delta: f64 = 0.0;
        for idx in 0..phi.table.len() {
            if (idx / stride) % b != 0 {
                continue;
            }
            // idx has letter 0 at pos; scan the b variants
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for a in 0..b {
                let k = idx + a * stride;
                if allowed(k) {
                    lo = lo.min(phi.table[k]);
                    hi = hi.max(phi.table[k]);
                }
            }
            if hi >= lo {
                delta = delta.max(hi - lo);
            }
        }
        deltas.push(Oscillation {
            i: phi.lo + pos as i64,
            delta,
        });
    }
    OscProfile {
        norm: deltas.iter().map(|o| o.delta).sum(),
        deltas,
        sup_norm: phi.sup_norm(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digits::DigitSeq;

    #[test]
    fn zero_and_indicator_profiles() {
        let z = osc_profile(&Potential::zero(2));
        assert_eq!(z.norm, 0.0);
        assert!(z.deltas.iter().all(|o| o.delta == 0.0));
        let ind = osc_profile(&Potential::indicator(2, 1, 1.0));
        assert_eq!(ind.deltas, [Oscillation { i: 0, delta: 1.0 }]);
        assert_eq!(ind.norm, 1.0);
    }

    #[test]
    fn product_potential_profile() {
        let phi = Potential::from_fn("x0*x1", 2, (0, 1), |w| (w[0] * w[1]) as f64).unwrap();
        let p = osc_profile(&phi);
        assert_eq!(p.delta(0), 1.0);
        assert_eq!(p.delta(1), 1.0);
        assert_eq!(p.norm, 2.0);
        // inside the golden shift the word 11 is forbidden, so φ never varies
        let golden = DigitSeq::new(vec![1, 0], 2).unwrap().with_periodicity(0, 2).unwrap();
        let aut = PrefixAutomaton::build(&golden).unwrap();
        let strict = osc_profile_within(&phi, &aut).unwrap();
        assert_eq!(strict.norm, 0.0);
    }

    #[test]
    fn brute_force_deltas() {
        let phi = Potential::from_fn("mix", 3, (-1, 1), |w| (w[0] as f64) * 0.3 - (w[1] * w[2]) as f64 + 0.1 * (w[2] as f64)).unwrap();
        let p = osc_profile(&phi);
        // compare against a direct double loop over all pairs
        let all: Vec<Vec<u32>> = (0..27).map(|i| vec![i / 9, (i / 3) % 3, i % 3]).collect();
        for pos in 0..3 {
            let mut best: f64 = 0.0;
            for x in &all {
                for y in &all {
                    if (0..3).all(|k| k == pos || x[k] == y[k]) {
                        best = best.max((phi.eval(x) - phi.eval(y)).abs());
                    }
                }
            }
            assert!((p.delta(pos as i64 - 1) - best).abs() < 1e-15);
        }
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"window": [0, 1], "alphabet": 2, "table": {"00": 0.0, "01": 0.5, "10": -1.0, "11": 2.0}}"#;
        let phi = Potential::from_json(text).unwrap();
        assert_eq!(phi.eval(&[1, 0]), -1.0);
        assert_eq!(Potential::from_json(&phi.to_json()).unwrap().table(), phi.table());
        let partial = r#"{"window": [0, 0], "alphabet": 2, "table": {"1": 1.0}, "default": 0.25}"#;
        assert_eq!(Potential::from_json(partial).unwrap().table(), &[0.25, 1.0]);
        let missing = r#"{"window": [0, 0], "alphabet": 2, "table": {"1": 1.0}}"#;
        assert!(matches!(Potential::from_json(missing), Err(Error::MalformedPotential(_))));
        let bad_key = r#"{"window": [0, 0], "alphabet": 2, "table": {"2": 1.0}}"#;
        assert!(Potential::from_json(bad_key).is_err());
    }

    #[test]
    fn oversized_window_rejected() {
        let r = Potential::from_fn_with_budget("big", 2, (0, 20), 1 << 10, |_| 0.0);
        assert!(matches!(r, Err(Error::WindowTooLarge { needed: 2097152, budget: 1024 })));
    }

    #[test]
    fn boundary_bound_holds_for_shifted_windows() {
        let phi = Potential::from_fn("w", 2, (-2, 1), |w| w.iter().enumerate().map(|(i, &a)| (i as f64 + 1.0) * a as f64).sum()).unwrap();
        let m = 10i64;
        let bound = phi.boundary_variation_bound();
        for seed in 0u64..64 {
            let x = move |i: i64| ((seed.wrapping_mul(0x9E37_79B9) >> ((i + 8) as u64 % 31)) & 1) as u32;
            let y = move |i: i64| if (1..=m).contains(&i) { x(i) } else { 1 - x(i) };
            let diff: f64 = (1..=m).map(|j| (phi.at(&x, j) - phi.at(&y, j)).abs()).sum();
            assert!(diff <= bound + 1e-12);
        }
    }
}
