//! Exact arithmetic in a real quadratic field `Q(√d)`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `a + b·√d` with rational `a`, `b` and a fixed positive non-square `d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadNum {
    a: BigRational,
    b: BigRational,
    d: BigInt,
}

impl QuadNum {
    /// Builds `a + b√d`. Returns `None` when `d` is not a positive non-square,
    /// since the representation would not be unique.
    pub fn new(a: BigRational, b: BigRational, d: BigInt) -> Option<Self> {
        if !d.is_positive() || is_square(&d) {
            return None;
        }
        Some(QuadNum { a, b, d })
    }

    /// `(p + q√d) / r`.
    pub fn from_parts(p: BigInt, q: BigInt, d: BigInt, r: BigInt) -> Option<Self> {
        if r.is_zero() {
            return None;
        }
        let a = BigRational::new(p, r.clone());
        let b = BigRational::new(q, r);
        QuadNum::new(a, b, d)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn from_rational(a: BigRational, d: BigInt) -> Self {
        QuadNum {
            a,
            b: BigRational::zero(),
            d,
        }
    }

    pub fn one(d: BigInt) -> Self {
        QuadNum::from_rational(BigRational::one(), d)
    }

    pub fn mul(&self, other: &QuadNum) -> QuadNum {
        debug_assert_eq!(self.d, other.d);
        let d = BigRational::from_integer(self.d.clone());
        QuadNum {
            a: &self.a * &other.a + &self.b * &other.b * d,
            b: &self.a * &other.b + &self.b * &other.a,
            d: self.d.clone(),
        }
    }

    pub fn add(&self, other: &QuadNum) -> QuadNum {
        debug_assert_eq!(self.d, other.d);
        QuadNum {
            a: &self.a + &other.a,
            b: &self.b + &other.b,
            d: self.d.clone(),
        }
    }

    pub fn neg(&self) -> QuadNum {
        QuadNum {
            a: -&self.a,
            b: -&self.b,
            d: self.d.clone(),
        }
    }

    pub fn sub(&self, other: &QuadNum) -> QuadNum {
        self.add(&other.neg())
    }

    pub fn recip(&self) -> Option<QuadNum> {
        // 1/(a + b√d) = (a − b√d)/(a² − b²d); the norm vanishes only at zero.
        let norm = &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(self.d.clone());
        if norm.is_zero() {
            return None;
        }
        Some(QuadNum {
            a: &self.a / &norm,
            b: -&self.b / &norm,
            d: self.d.clone(),
        })
    }

    pub fn sub_integer(&self, k: &BigInt) -> QuadNum {
        QuadNum {
            a: &self.a - BigRational::from_integer(k.clone()),
            b: self.b.clone(),
            d: self.d.clone(),
        }
    }

    /// Exact sign of `a + b√d`.
    pub fn signum(&self) -> Ordering {
        sign_of(&self.a, &self.b, &self.d)
    }

    /// Exact comparison with an integer.
    pub fn cmp_integer(&self, k: &BigInt) -> Ordering {
        self.sub_integer(k).signum()
    }

    /// `⌊a + b√d⌋`, exactly.
    pub fn floor(&self) -> BigInt {
        let fa = self.a.floor().to_integer();
        let fb = floor_b_sqrt_d(&self.b, &self.d);
        // ⌊x + y⌋ ∈ {⌊x⌋ + ⌊y⌋, ⌊x⌋ + ⌊y⌋ + 1}
        let candidate = &fa + &fb + BigInt::one();
        if self.cmp_integer(&candidate) != Ordering::Less {
            candidate
        } else {
            fa + fb
        }
    }

    /// `⌈a + b√d⌉`, exactly.
    pub fn ceil(&self) -> BigInt {
        let f = self.floor();
        if self.cmp_integer(&f) == Ordering::Equal {
            f
        } else {
            f + BigInt::one()
        }
    }

    /// Rational enclosure `[lo, hi]` of width at most `2^-bits`.
    pub fn enclose(&self, bits: u64) -> (BigRational, BigRational) {
        let (slo, shi) = sqrt_enclosure(&BigRational::from_integer(self.d.clone()), bits + self.b.abs().numer().bits() + 2);
        let lo_b = if self.b.is_negative() { &self.b * &shi } else { &self.b * &slo };
        let hi_b = if self.b.is_negative() { &self.b * &slo } else { &self.b * &shi };
        (&self.a + lo_b, &self.a + hi_b)
    }

    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.enclose(64);
        super::real::rational_to_f64(&((lo + hi) / BigRational::from_integer(2.into())))
    }
}

impl fmt::Display for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt({})", self.a, self.b, self.d)
    }
}

fn is_square(d: &BigInt) -> bool {
    if d.is_negative() {
        return false;
    }
    let s = d.sqrt();
    &s * &s == *d
}

/// Sign of `a + b√d` for non-square `d > 0`.
fn sign_of(a: &BigRational, b: &BigRational, d: &BigInt) -> Ordering {
    let sa = a.cmp(&BigRational::zero());
    let sb = b.cmp(&BigRational::zero());
    match (sa, sb) {
        (Ordering::Equal, s) | (s, Ordering::Equal) => s,
        (s, t) if s == t => s,
        // opposite signs: compare a² with b²d
        (sa, _) => {
            let a2 = a * a;
            let b2d = b * b * BigRational::from_integer(d.clone());
            match a2.cmp(&b2d) {
                Ordering::Greater => sa,
                Ordering::Less => sa.reverse(),
                Ordering::Equal => Ordering::Equal,
            }
        }
    }
}

/// `⌊b√d⌋` for non-square `d`.
fn floor_b_sqrt_d(b: &BigRational, d: &BigInt) -> BigInt {
    if b.is_zero() {
        return BigInt::zero();
    }
    // b√d = ±√(b²d); ⌊√y⌋ = isqrt(⌊y⌋) for y ≥ 0
    let y = b * b * BigRational::from_integer(d.clone());
    let root = y.floor().to_integer().sqrt();
    if b.is_positive() {
        root
    } else {
        // √y is irrational, so ⌈√y⌉ = ⌊√y⌋ + 1
        -(root + BigInt::one())
    }
}

/// Dyadic enclosure of `√x` for rational `x ≥ 0` with width `≤ 2^-bits`.
pub(crate) fn sqrt_enclosure(x: &BigRational, bits: u64) -> (BigRational, BigRational) {
    assert!(!x.is_negative(), "sqrt of a negative number");
    let scale = BigInt::one() << (2 * bits);
    // ⌊√(x·4^bits)⌋ / 2^bits ≤ √x
    let scaled = (x * BigRational::from_integer(scale)).floor().to_integer();
    let r = scaled.sqrt();
    let denom = BigInt::one() << bits;
    let lo = BigRational::new(r.clone(), denom.clone());
    let hi_num = if &r * &r == scaled && x * BigRational::from_integer(BigInt::one() << (2 * bits)) == BigRational::from_integer(scaled.clone()) {
        r
    } else {
        r + BigInt::one()
    };
    let hi = BigRational::new(hi_num, denom);
    (lo, hi)
}
