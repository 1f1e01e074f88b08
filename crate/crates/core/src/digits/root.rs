//! Recovering β from its digits: the unique root `x > 1` of `Σ c_i x^{-i} = 1`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::real::{rational_to_f64, CertifiedReal};
use super::{DigitSeq, Periodicity};
use crate::error::{Error, Result};

/// The equation whose root is β, in one of two forms.
#[derive(Debug, Clone)]
pub(crate) enum RootProblem {
    /// `c = prefix · block^∞`; the series has a closed form.
    Periodic { prefix: Vec<u32>, block: Vec<u32>, alphabet: u32 },
    /// Only `c_1 … c_N` known; the tail lies in `[0, (b−1)·x^{-N}/(x−1)]`.
    Truncated { digits: Vec<u32>, alphabet: u32 },
}

/// Unreduced fraction with positive denominator; the bisection only ever
/// compares against 1, so gcd reductions would be wasted work.
#[derive(Debug, Clone)]
struct Frac {
    num: BigInt,
    den: BigInt,
}

impl Frac {
    fn from_int(k: u32) -> Frac {
        Frac {
            num: BigInt::from(k),
            den: BigInt::one(),
        }
    }

    fn add(&self, o: &Frac) -> Frac {
        Frac {
            num: &self.num * &o.den + &o.num * &self.den,
            den: &self.den * &o.den,
        }
    }

    fn mul(&self, o: &Frac) -> Frac {
        Frac {
            num: &self.num * &o.num,
            den: &self.den * &o.den,
        }
    }

    fn div(&self, o: &Frac) -> Frac {
        // o > 0 throughout
        Frac {
            num: &self.num * &o.den,
            den: &self.den * &o.num,
        }
    }

    fn pow(&self, e: usize) -> Frac {
        Frac {
            num: num_traits::pow(self.num.clone(), e),
            den: num_traits::pow(self.den.clone(), e),
        }
    }

    fn ge_one(&self) -> bool {
        self.num >= self.den
    }

    fn le_one(&self) -> bool {
        self.num <= self.den
    }
}

fn frac_of(x: &BigRational) -> Frac {
    Frac {
        num: x.numer().clone(),
        den: x.denom().clone(),
    }
}

/// `Σ_{i=1}^{N} d_i y^i` by Horner's rule.
fn poly_in_recip(digits: &[u32], y: &Frac) -> Frac {
    let mut acc = Frac::from_int(0);
    for &d in digits.iter().rev() {
        acc = acc.add(&Frac::from_int(d)).mul(y);
    }
    acc
}

impl RootProblem {
    fn alphabet(&self) -> u32 {
        match self {
            RootProblem::Periodic { alphabet, .. } | RootProblem::Truncated { alphabet, .. } => *alphabet,
        }
    }

    /// Lower and upper bounds on `Σ c_i x^{-i}` at `x > 1`.
    fn series_bounds(&self, x: &BigRational) -> (Frac, Frac) {
        let xf = frac_of(x);
        let y = Frac {
            num: xf.den.clone(),
            den: xf.num.clone(),
        };
        match self {
            RootProblem::Periodic { prefix, block, .. } => {
                let head = poly_in_recip(prefix, &y);
                let yq = y.pow(block.len());
                let yp = y.pow(prefix.len());
                let one_minus_yq = Frac {
                    num: &yq.den - &yq.num,
                    den: yq.den.clone(),
                };
                let tail = yp.mul(&poly_in_recip(block, &y)).div(&one_minus_yq);
                let v = head.add(&tail);
                (v.clone(), v)
            }
            RootProblem::Truncated { digits, alphabet } => {
                let lo = poly_in_recip(digits, &y);
                let yn = y.pow(digits.len());
                let x_minus_one = Frac {
                    num: &xf.num - &xf.den,
                    den: xf.den.clone(),
                };
                let bound = Frac::from_int(alphabet - 1).mul(&yn).div(&x_minus_one);
                let hi = lo.add(&bound);
                (lo, hi)
            }
        }
    }

    /// Bisection for the root of a decreasing function `f(x) = 1` on `(1, b]`;
    /// `upper` selects which series bound to use. Returns `[lo, hi]` with
    /// `f(lo) ≥ 1 ≥ f(hi)` and `hi − lo ≤ 2^-bits`.
    fn bisect(&self, bits: u64, upper: bool) -> (BigRational, BigRational) {
        let one = BigRational::one();
        let mut lo = one.clone();
        let mut hi = BigRational::from_integer(self.alphabet().into());
        let target = BigRational::new(BigInt::one(), BigInt::one() << bits);
        let two = BigRational::from_integer(2.into());
        while &hi - &lo > target {
            let mid = (&lo + &hi) / &two;
            let (flo, fhi) = self.series_bounds(&mid);
            let f = if upper { fhi } else { flo };
            if f.ge_one() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, hi)
    }

    /// Enclosure of β at `bits` of precision. Truncation limits how tight it
    /// can get; the result is `None` only for degenerate input.
    pub(crate) fn enclose(&self, bits: u64) -> Option<(BigRational, BigRational)> {
        match self {
            RootProblem::Periodic { .. } => Some(self.bisect(bits, false)),
            RootProblem::Truncated { .. } => {
                // root of the lower series ≤ β ≤ root of the upper series
                let lo = self.bisect(bits, false).0;
                let hi = self.bisect(bits, true).1;
                Some((lo, hi))
            }
        }
    }

    fn equals_one_at(&self, x: &BigRational) -> bool {
        let (lo, hi) = self.series_bounds(x);
        lo.le_one() && hi.ge_one()
    }
}

fn bits_for(tol: f64) -> u64 {
    (-tol.log2()).ceil().max(1.0) as u64 + 8
}

/// An enclosure of width `≤ tol` of the β whose expansion of 1 starts with `digits`.
///
/// Periodic digits use the closed-form series. Digits backed by a zero-run
/// schedule are extended until the tail is small enough. Plain prefixes bound
/// the unknown tail by `(b−1)·x^{-N}/(x−1)`.
pub fn beta_from_digits(digits: &DigitSeq, tol: f64) -> Result<CertifiedReal> {
    if !(tol > 0.0) {
        return Err(Error::NoRoot(format!("tolerance must be positive, got {tol}")));
    }
    let c = digits.digits();
    if c[0] == 0 {
        return Err(Error::NoRoot("first digit is zero".into()));
    }
    let bits = bits_for(tol);
    let alphabet = digits.alphabet();
    let problem = match (digits.periodicity(), digits.schedule()) {
        (Some(Periodicity { preperiod, period }), _) => RootProblem::Periodic {
            prefix: c[..preperiod].to_vec(),
            block: c[preperiod..preperiod + period].to_vec(),
            alphabet,
        },
        (None, Some(_)) => {
            // grow the prefix until the truncation error fits inside tol
            let mut depth = c.len().max(32);
            loop {
                let ext = digits.extended(depth)?;
                let problem = RootProblem::Truncated {
                    digits: ext.digits().to_vec(),
                    alphabet,
                };
                let (lo, hi) = problem.enclose(bits).expect("truncated enclosure");
                if rational_to_f64(&(hi - lo)) <= tol || depth >= 1 << 16 {
                    break problem;
                }
                depth *= 2;
            }
        }
        (None, None) => RootProblem::Truncated {
            digits: c.to_vec(),
            alphabet,
        },
    };
    let (lo, hi) = problem
        .enclose(bits)
        .ok_or_else(|| Error::NoRoot("degenerate digit sequence".into()))?;
    if lo <= BigRational::one() {
        return Err(Error::NoRoot("the digits do not force beta > 1".into()));
    }
    // an integer inside the enclosure that solves the equation means β ∈ ℕ
    let mut k = lo.ceil().to_integer();
    while BigRational::from_integer(k.clone()) <= hi {
        if problem.equals_one_at(&BigRational::from_integer(k.clone())) {
            return Err(Error::NoRoot(format!("the digits describe the integer base {k}")));
        }
        k += 1;
    }
    let width = rational_to_f64(&(&hi - &lo));
    if width > tol {
        return Err(Error::InsufficientDepth { tol, width });
    }
    Ok(CertifiedReal::from_root(lo, hi, bits, Arc::new(problem)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digits::{expand_one, ZeroRunSchedule};

    #[test]
    fn golden_from_periodic_digits() {
        let c = DigitSeq::new(vec![1, 0], 2).unwrap().with_periodicity(0, 2).unwrap();
        let beta = beta_from_digits(&c, 1e-9).unwrap();
        let g = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(beta.width_f64() <= 1e-9);
        assert!(rational_to_f64(beta.lo()) <= g && g <= rational_to_f64(beta.hi()));
    }

    #[test]
    fn period_one_is_integer_base() {
        let c = DigitSeq::new(vec![1], 2).unwrap().with_periodicity(0, 1).unwrap();
        assert!(matches!(beta_from_digits(&c, 1e-9), Err(Error::NoRoot(_))));
    }

    #[test]
    fn three_halves_roundtrip() {
        let c = expand_one(&CertifiedReal::ratio(3, 2), 40).unwrap();
        let beta = beta_from_digits(&c, 1e-6).unwrap();
        assert!(beta.contains(&BigRational::new(3.into(), 2.into())));
        // not enough digits for 1e-12
        assert!(matches!(beta_from_digits(&c, 1e-12), Err(Error::InsufficientDepth { .. })));
        let deep = expand_one(&CertifiedReal::ratio(3, 2), 90).unwrap();
        let tight = beta_from_digits(&deep, 1e-12).unwrap();
        assert!(tight.contains(&BigRational::new(3.into(), 2.into())));
    }

    #[test]
    fn schedule_digits_reach_tolerance() {
        let c = DigitSeq::from_schedule(ZeroRunSchedule { first: 2, ratio: 2 }, 2, 10).unwrap();
        let beta = beta_from_digits(&c, 1e-9).unwrap();
        assert!(beta.width_f64() <= 1e-9);
        let x = beta.midpoint_f64();
        // the series at the midpoint is 1 to within the enclosure
        let s: f64 = [1, 4, 9, 18, 35, 68, 133].iter().map(|&i| x.powi(-i)).sum();
        assert!((s - 1.0).abs() < 1e-8, "series {s}");
    }

    #[test]
    fn refinement_tightens_periodic_roots() {
        let c = DigitSeq::new(vec![1, 1, 0], 2).unwrap().with_periodicity(0, 3).unwrap();
        let beta = beta_from_digits(&c, 1e-6).unwrap();
        let finer = beta.refine(120).unwrap();
        assert!(finer.width_f64() < 1e-30);
        let t = finer.midpoint_f64();
        assert!((t * t * t - t * t - t - 1.0).abs() < 1e-12);
    }
}
