use serde::{Deserialize, Serialize};

use super::potential::Potential;
use crate::error::{Error, Result};
use crate::language::{PrefixAutomaton, Word};

/// A nonnegative sum kept as its natural logarithm (`-∞` for an empty sum).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionSum {
    pub ln: f64,
}

impl PartitionSum {
    pub fn value(&self) -> f64 {
        self.ln.exp()
    }

    pub fn is_zero(&self) -> bool {
        self.ln == f64::NEG_INFINITY
    }

    /// `self / other`, computed in the log domain.
    pub fn ratio(&self, other: &PartitionSum) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            (self.ln - other.ln).exp()
        }
    }
}

/// Letters pinned on `[start, start + |letters| − 1]`, and whether the word
/// read before `start` must end in the root (`s = ε`).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Pin<'a> {
    pub start: i64,
    pub letters: &'a [u32],
    pub star: bool,
}

/// `Ξ^n(φ)`: the sum over `w ∈ L_{2n+1}` of `exp Σ_{j=-n}^{n} φ(T^j x)`,
/// where `x` carries `w` on `[-n, n]` and zeros elsewhere.
pub fn xi_full(aut: &PrefixAutomaton, phi: &Potential, n: usize) -> Result<PartitionSum> {
    transfer(aut, phi, n, None)
}

/// `Ξ^n_{[k,l]}(v)`, or `Ξ^{*,n}_{[k,l]}(v)` when `star` is set: the same sum
/// restricted to `x_k ⋯ x_l = v` (and, for the starred sum, to words whose
/// part left of `k` ends in the root).
pub fn xi_constrained(
    aut: &PrefixAutomaton,
    phi: &Potential,
    n: usize,
    k: i64,
    v: &Word,
    star: bool,
) -> Result<PartitionSum> {
    let nn = n as i64;
    let l = k + v.len() as i64 - 1;
    if v.is_empty() || k < -nn || l > nn {
        return Err(Error::WindowTooSmall { m: v.len(), n });
    }
    aut.require_member(v)?;
    transfer(
        aut,
        phi,
        n,
        Some(Pin {
            start: k,
            letters: v.letters(),
            star,
        }),
    )
}

/// The transfer sum behind every `Ξ`. Positions are scanned left to right
/// from the first coordinate any term reads to the last; the state is the
/// automaton vertex together with the last `width − 1` letters. Pinned
/// letters outside `[-n, n]` must be zero, matching the padding.
pub(crate) fn transfer(aut: &PrefixAutomaton, phi: &Potential, n: usize, pin: Option<Pin<'_>>) -> Result<PartitionSum> {
    if aut.alphabet() != phi.alphabet() {
        return Err(Error::MalformedPotential(format!(
            "potential alphabet {} does not match digits alphabet {}",
            phi.alphabet(),
            aut.alphabet()
        )));
    }
    let nn = n as i64;
    let (lo, hi) = phi.window();
    let b = aut.alphabet() as usize;
    let states = aut.state_bound(2 * n + 1)?;
    let ctx_count = b.pow((phi.width() - 1) as u32);
    let weights: Vec<f64> = phi.table().iter().map(|v| v.exp()).collect();

    if let Some(p) = pin {
        for (i, &a) in p.letters.iter().enumerate() {
            let t = p.start + i as i64;
            if (t < -nn || t > nn) && a != 0 {
                return Ok(PartitionSum { ln: f64::NEG_INFINITY });
            }
        }
    }
    let pinned = |t: i64| -> Option<u32> {
        let p = pin?;
        let i = t - p.start;
        (i >= 0 && (i as usize) < p.letters.len()).then(|| p.letters[i as usize])
    };

    let first = -nn + lo.min(0);
    let last = nn + hi.max(0);
    let mut cur = vec![0.0f64; states * ctx_count];
    cur[0] = 1.0;
    let mut next = vec![0.0f64; states * ctx_count];
    let mut ln_scale = 0.0;
    for t in first..=last {
        if let Some(p) = pin {
            if p.star && t == p.start {
                for s in 1..states {
                    cur[s * ctx_count..(s + 1) * ctx_count].fill(0.0);
                }
            }
        }
        let inside = (-nn..=nn).contains(&t);
        let j = t - hi;
        let scored = (-nn..=nn).contains(&j);
        next.fill(0.0);
        for s in 0..states {
            for ctx in 0..ctx_count {
                let mass = cur[s * ctx_count + ctx];
                if mass == 0.0 {
                    continue;
                }
                let mut emit = |a: u32, to: usize| {
                    let window = ctx * b + a as usize;
                    let w = if scored { weights[window] } else { 1.0 };
                    next[to * ctx_count + window % ctx_count] += mass * w;
                };
                if inside {
                    let letters = match pinned(t) {
                        Some(a) => a..a + 1,
                        None => 0..b as u32,
                    };
                    for a in letters {
                        if let Some(to) = aut.step(s, a)? {
                            emit(a, to);
                        }
                    }
                } else {
                    emit(0, s);
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
        let peak = cur.iter().cloned().fold(0.0, f64::max);
        if peak == 0.0 {
            return Ok(PartitionSum { ln: f64::NEG_INFINITY });
        }
        for x in cur.iter_mut() {
            *x /= peak;
        }
        ln_scale += peak.ln();
    }
    Ok(PartitionSum {
        ln: ln_scale + compensated_sum(&cur).ln(),
    })
}

/// Neumaier's compensated summation.
pub(crate) fn compensated_sum(xs: &[f64]) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `ln Σ exp(x_i)` without overflow.
pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let peak = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return peak;
    }
    let scaled: Vec<f64> = xs.iter().map(|x| (x - peak).exp()).collect();
    peak + compensated_sum(&scaled).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digits::DigitSeq;
    use crate::language::is_member_oracle;

    fn golden() -> DigitSeq {
        DigitSeq::new(vec![1, 0], 2).unwrap().with_periodicity(0, 2).unwrap()
    }

    fn three_halves() -> DigitSeq {
        crate::digits::expand_one(&crate::digits::CertifiedReal::ratio(3, 2), 40).unwrap()
    }

    /// `ln Ξ` by listing every binary word of length 2n+1 and keeping members.
    fn naive(c: &DigitSeq, phi: &Potential, n: usize, pin: Option<(i64, &[u32], bool)>) -> f64 {
        let len = 2 * n + 1;
        let nn = n as i64;
        let mut terms = Vec::new();
        for mask in 0u64..(1 << len) {
            let w: Vec<u32> = (0..len).map(|i| ((mask >> (len - 1 - i)) & 1) as u32).collect();
            if !is_member_oracle(c, &Word::new(w.clone())).unwrap() {
                continue;
            }
            let x = |i: i64| if (-nn..=nn).contains(&i) { w[(i + nn) as usize] } else { 0 };
            if let Some((k, v, star)) = pin {
                if (0..v.len()).any(|i| x(k + i as i64) != v[i]) {
                    continue;
                }
                if star {
                    let left = Word::new(w[..(k + nn) as usize].to_vec());
                    let aut = PrefixAutomaton::build(c).unwrap();
                    if aut.end_state(&left).unwrap() != 0 {
                        continue;
                    }
                }
            }
            terms.push(phi.birkhoff_sum(&x, -nn..=nn));
        }
        log_sum_exp(&terms)
    }

    fn potentials() -> Vec<Potential> {
        vec![
            Potential::zero(2),
            Potential::indicator(2, 1, 0.7),
            Potential::from_fn("pair", 2, (0, 1), |w| 0.3 * w[0] as f64 - 0.5 * (w[0] * w[1]) as f64).unwrap(),
            Potential::from_fn("left", 2, (-2, 0), |w| 0.2 * w[0] as f64 + 0.1 * w[1] as f64 - 0.4 * w[2] as f64).unwrap(),
        ]
    }

    #[test]
    fn golden_counts() {
        let aut = PrefixAutomaton::build(&golden()).unwrap();
        let zero = Potential::zero(2);
        assert!((xi_full(&aut, &zero, 1).unwrap().value() - 5.0).abs() < 1e-12);
        assert!((xi_full(&aut, &zero, 0).unwrap().value() - 2.0).abs() < 1e-12);
        let one = xi_constrained(&aut, &zero, 1, -1, &Word::new(vec![1, 0, 1]), false).unwrap();
        assert!((one.value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn golden_indicator_small_case() {
        // L_3 = 000, 001, 010, 100, 101 with 0,1,1,1,2 ones
        let t = 0.9f64;
        let aut = PrefixAutomaton::build(&golden()).unwrap();
        let xi = xi_full(&aut, &Potential::indicator(2, 1, t), 1).unwrap();
        let expect = 1.0 + 3.0 * t.exp() + (2.0 * t).exp();
        assert!((xi.value() / expect - 1.0).abs() < 1e-13);
    }

    #[test]
    fn dp_matches_enumeration() {
        for c in [golden(), three_halves()] {
            let aut = PrefixAutomaton::build(&c).unwrap();
            for phi in potentials() {
                for n in 0..=5 {
                    let dp = xi_full(&aut, &phi, n).unwrap().ln;
                    let brute = naive(&c, &phi, n, None);
                    assert!(((dp - brute) / brute.abs().max(1.0)).abs() < 1e-12, "{} n={n}: {dp} vs {brute}", phi.name());
                }
            }
        }
    }

    #[test]
    fn constrained_dp_matches_enumeration() {
        let c = three_halves();
        let aut = PrefixAutomaton::build(&c).unwrap();
        let n = 4;
        for phi in potentials() {
            for v in [vec![1], vec![0, 1], vec![1, 0, 1], vec![1, 0, 0]] {
                for k in -4..=(5 - v.len() as i64) {
                    for star in [false, true] {
                        let dp = xi_constrained(&aut, &phi, n, k, &Word::new(v.clone()), star).unwrap().ln;
                        let brute = naive(&c, &phi, n, Some((k, &v, star)));
                        if brute == f64::NEG_INFINITY {
                            assert_eq!(dp, brute);
                        } else {
                            assert!((dp - brute).abs() < 1e-12 * brute.abs().max(1.0), "{v:?} k={k} star={star}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn windows_must_fit() {
        let aut = PrefixAutomaton::build(&golden()).unwrap();
        let zero = Potential::zero(2);
        assert!(matches!(
            xi_constrained(&aut, &zero, 2, 1, &Word::new(vec![1, 0, 1]), false),
            Err(Error::WindowTooSmall { .. })
        ));
        assert!(matches!(
            xi_constrained(&aut, &zero, 2, 0, &Word::new(vec![1, 1]), false),
            Err(Error::NotInLanguage { .. })
        ));
    }

    #[test]
    fn compensated_sum_beats_naive_sum() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(&xs), 2.0);
        assert!((log_sum_exp(&[1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
