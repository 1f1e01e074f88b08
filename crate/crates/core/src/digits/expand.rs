use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::quad::QuadNum;
use super::real::{round_dyadic, CertifiedReal, ExactReal, DEFAULT_START_BITS};
use super::{DigitSeq, DigitSource, Periodicity};
use crate::error::{Error, Result};

/// Environment variable capping the working precision in bits.
pub const PRECISION_ENV: &str = "BETATHERMO_PRECISION";
pub const DEFAULT_MAX_BITS: u64 = 4096;

/// Precision schedule for interval-mode expansion: start at `start_bits`,
/// double on an ambiguous ceiling, give up past `max_bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpandOptions {
    pub start_bits: u64,
    pub max_bits: u64,
}

impl Default for ExpandOptions {
    fn default() -> Self {
        ExpandOptions {
            start_bits: DEFAULT_START_BITS,
            max_bits: DEFAULT_MAX_BITS,
        }
    }
}

impl ExpandOptions {
    /// Defaults, with `max_bits` taken from `BETATHERMO_PRECISION` when set.
    pub fn from_env() -> Self {
        let mut opts = ExpandOptions::default();
        if let Some(bits) = std::env::var(PRECISION_ENV).ok().and_then(|v| v.trim().parse::<u64>().ok()) {
            opts.max_bits = bits.max(8);
            opts.start_bits = opts.start_bits.min(opts.max_bits);
        }
        opts
    }
}

/// First `depth` digits of the quasi-greedy expansion of 1 in base β:
/// `r_0 = 1`, `c_{i+1} = ⌈β r_i⌉ − 1`, `r_{i+1} = β r_i − c_{i+1}`.
pub fn expand_one(beta: &CertifiedReal, depth: usize) -> Result<DigitSeq> {
    expand_one_with(beta, depth, &ExpandOptions::from_env())
}

pub fn expand_one_with(beta: &CertifiedReal, depth: usize, opts: &ExpandOptions) -> Result<DigitSeq> {
    if depth == 0 {
        return Err(Error::MalformedDigits("depth must be at least 1".into()));
    }
    if beta.hi() <= &BigRational::one() {
        return Err(Error::InvalidBeta(beta.to_string()));
    }
    match beta.exact() {
        Some(ExactReal::Rational(r)) => {
            let b = beta.alphabet_size()?;
            if r <= &BigRational::one() {
                return Err(Error::InvalidBeta(r.to_string()));
            }
            let (digits, period) = run_exact(depth, BigRational::one(), |x| {
                let prod = r * x;
                let c = prod.ceil().to_integer() - BigInt::one();
                let next = prod - BigRational::from_integer(c.clone());
                (c, next)
            });
            finish(digits, b, period)
        }
        Some(ExactReal::Quadratic(q)) => {
            let b = beta.alphabet_size()?;
            if q.cmp_integer(&BigInt::one()) != std::cmp::Ordering::Greater {
                return Err(Error::InvalidBeta(q.to_string()));
            }
            let d = q.radicand().clone();
            let (digits, period) = run_exact(depth, QuadNum::one(d), |x| {
                let prod = q.mul(x);
                let c = prod.ceil() - BigInt::one();
                let next = prod.sub_integer(&c);
                (c, next)
            });
            finish(digits, b, period)
        }
        None => expand_interval(beta, depth, opts),
    }
}

fn run_exact<T: Clone + Eq + std::hash::Hash>(
    depth: usize,
    start: T,
    step: impl Fn(&T) -> (BigInt, T),
) -> (Vec<BigInt>, Option<Periodicity>) {
    let mut seen: HashMap<T, usize> = HashMap::new();
    let mut digits: Vec<BigInt> = Vec::with_capacity(depth);
    let mut r = start;
    for i in 0..depth {
        if let Some(&j) = seen.get(&r) {
            // r_i = r_j: the digits from j+1 on repeat with period i − j
            let p = Periodicity { preperiod: j, period: i - j };
            for k in i..depth {
                let d = digits[j + (k - j) % (i - j)].clone();
                digits.push(d);
            }
            return (digits, Some(p));
        }
        seen.insert(r.clone(), i);
        let (c, next) = step(&r);
        digits.push(c);
        r = next;
    }
    // the state after the last digit may still close a cycle
    let period = seen.get(&r).map(|&j| Periodicity {
        preperiod: j,
        period: depth - j,
    });
    (digits, period)
}

fn finish(digits: Vec<BigInt>, alphabet: u32, period: Option<Periodicity>) -> Result<DigitSeq> {
    let digits: Vec<u32> = digits
        .iter()
        .map(|d| d.to_u32().expect("digit below alphabet size"))
        .collect();
    let mut seq = DigitSeq::with_source(digits, alphabet, DigitSource::ComputedFromBeta)?;
    if let Some(p) = period {
        seq.set_periodicity_unchecked(p);
    }
    Ok(seq)
}

enum IntervalRun {
    Done(Vec<u32>),
    Ambiguous { index: usize, certified: Vec<u32> },
}

fn expand_interval(beta: &CertifiedReal, depth: usize, opts: &ExpandOptions) -> Result<DigitSeq> {
    let mut current = beta.clone();
    let mut bits = current.bits().max(opts.start_bits.min(opts.max_bits));
    if current.bits() < bits {
        if let Some(r) = current.refine(bits) {
            current = r;
        }
    }
    loop {
        let outcome = match current.alphabet_size() {
            Ok(b) => Some((b, run_interval(&current, depth, bits))),
            Err(Error::PrecisionExhausted { .. }) => None,
            Err(e) => return Err(e),
        };
        let (index, certified) = match outcome {
            Some((b, IntervalRun::Done(digits))) => {
                return DigitSeq::with_source(digits, b, DigitSource::ComputedFromBeta);
            }
            Some((_, IntervalRun::Ambiguous { index, certified })) => (index, certified),
            None => (0, Vec::new()),
        };
        let next_bits = bits.saturating_mul(2);
        let refined = if next_bits <= opts.max_bits {
            current.refine(next_bits)
        } else {
            None
        };
        match refined {
            Some(r) => {
                current = r;
                bits = next_bits;
            }
            None => {
                return Err(Error::PrecisionExhausted {
                    index: index + 1,
                    bits: bits.min(opts.max_bits),
                    certified,
                })
            }
        }
    }
}

fn run_interval(beta: &CertifiedReal, depth: usize, bits: u64) -> IntervalRun {
    let guard = bits + 8;
    let (blo, bhi) = (beta.lo(), beta.hi());
    let mut rlo = BigRational::one();
    let mut rhi = BigRational::one();
    let mut digits = Vec::with_capacity(depth);
    for i in 0..depth {
        let plo = blo * &rlo;
        let phi = bhi * &rhi;
        let clo = plo.ceil().to_integer() - BigInt::one();
        let chi = phi.ceil().to_integer() - BigInt::one();
        if clo != chi || clo < BigInt::from(0) {
            return IntervalRun::Ambiguous { index: i, certified: digits };
        }
        let c = BigRational::from_integer(clo.clone());
        rlo = round_dyadic(&(plo - &c), guard, false);
        rhi = round_dyadic(&(phi - &c), guard, true);
        digits.push(clo.to_u32().expect("digit fits in u32"));
    }
    IntervalRun::Done(digits)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent reference: the recurrence on exact rationals without cycle
    /// detection, returning digits and remainders.
    fn reference_rational(num: i64, den: i64, depth: usize) -> (Vec<u32>, Vec<BigRational>) {
        let beta = BigRational::new(num.into(), den.into());
        let mut r = BigRational::one();
        let mut cs = Vec::new();
        let mut rs = vec![r.clone()];
        for _ in 0..depth {
            let p = &beta * &r;
            let c = p.ceil() - BigRational::one();
            r = p - &c;
            cs.push(c.to_integer().to_u32().unwrap());
            rs.push(r.clone());
        }
        (cs, rs)
    }

    #[test]
    fn golden_ratio_digits() {
        let g = CertifiedReal::quadratic(1, 1, 5, 2).unwrap();
        let c = expand_one(&g, 10).unwrap();
        assert_eq!(c.digits(), &[1, 0, 1, 0, 1, 0, 1, 0, 1, 0]);
        assert_eq!(c.periodicity(), Some(Periodicity { preperiod: 0, period: 2 }));
        assert_eq!(c.source(), DigitSource::ComputedFromBeta);
    }

    #[test]
    fn three_halves_digits() {
        let c = expand_one(&CertifiedReal::ratio(3, 2), 9).unwrap();
        assert_eq!(c.digits(), &[1, 0, 1, 0, 0, 0, 0, 0, 1]);
        let (reference, rs) = reference_rational(3, 2, 9);
        assert_eq!(c.digits(), reference.as_slice());
        assert_eq!(rs[1], BigRational::new(1.into(), 2.into()));
        assert_eq!(rs[2], BigRational::new(3.into(), 4.into()));
        assert_eq!(rs[3], BigRational::new(1.into(), 8.into()));
    }

    #[test]
    fn integer_beta_rejected() {
        assert!(matches!(expand_one(&CertifiedReal::ratio(2, 1), 5), Err(Error::IntegerBeta(_))));
        assert!(matches!(expand_one(&CertifiedReal::ratio(1, 2), 5), Err(Error::InvalidBeta(_))));
    }

    #[test]
    fn rational_with_periodic_expansion() {
        // β = 5/2: r = 1, 1/2, 1/4, 5/8, ... reference comparison over 30 digits
        let c = expand_one(&CertifiedReal::ratio(5, 2), 30).unwrap();
        assert_eq!(c.digits(), reference_rational(5, 2, 30).0.as_slice());
        assert_eq!(c.alphabet(), 3);
        assert_eq!(c.digits()[0], 2);
    }

    #[test]
    fn interval_mode_matches_exact_mode() {
        // no exact form for √2 + √3 − 1; the f64 recurrence is good for ~20 digits
        let beta = CertifiedReal::parse("sqrt 2 + sqrt 3 - 1").unwrap();
        assert!(beta.exact().is_none());
        let c = expand_one_with(&beta, 60, &ExpandOptions::default()).unwrap();
        let x = 2f64.sqrt() + 3f64.sqrt() - 1.0;
        let mut r = 1.0f64;
        for &d in &c.digits()[..20] {
            let p = x * r;
            let cd = p.ceil() - 1.0;
            assert_eq!(cd as u32, d);
            r = p - cd;
        }
        assert_eq!(c.alphabet(), 3);
    }

    #[test]
    fn interval_mode_escalates_precision() {
        let beta = CertifiedReal::parse("sqrt 2 + sqrt 3 - 1").unwrap();
        let low = ExpandOptions { start_bits: 16, max_bits: 16 };
        match expand_one_with(&beta, 200, &low) {
            Err(Error::PrecisionExhausted { certified, .. }) => {
                let full = expand_one_with(&beta, 200, &ExpandOptions::default()).unwrap();
                assert!(!certified.is_empty());
                assert_eq!(&full.digits()[..certified.len()], certified.as_slice());
            }
            other => panic!("expected PrecisionExhausted, got {other:?}"),
        }
    }

    #[test]
    fn exact_integer_products_are_never_guessed() {
        // the golden ratio hits β r_1 = 1 exactly; an interval can't certify c_2
        let g = CertifiedReal::quadratic(1, 1, 5, 2).unwrap();
        let (lo, hi) = g.exact().unwrap().enclose(64);
        let iv = CertifiedReal::interval(lo, hi).unwrap();
        match expand_one(&iv, 5) {
            Err(Error::PrecisionExhausted { index, certified, .. }) => {
                assert_eq!(index, 2);
                assert_eq!(certified, vec![1]);
            }
            other => panic!("expected PrecisionExhausted, got {other:?}"),
        }
    }
}
