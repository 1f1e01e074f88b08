//! Certified real numbers for β: rational intervals with an optional exact value.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::quad::{sqrt_enclosure, QuadNum};
use super::root::RootProblem;
use crate::error::{Error, Result};

/// An exactly representable β.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactReal {
    Rational(BigRational),
    Quadratic(QuadNum),
}

impl ExactReal {
    pub fn enclose(&self, bits: u64) -> (BigRational, BigRational) {
        match self {
            ExactReal::Rational(r) => (r.clone(), r.clone()),
            ExactReal::Quadratic(q) => q.enclose(bits),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExactReal::Rational(r) => rational_to_f64(r),
            ExactReal::Quadratic(q) => q.to_f64(),
        }
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactReal::Rational(r) => write!(f, "{r}"),
            ExactReal::Quadratic(q) => write!(f, "{q}"),
        }
    }
}

#[derive(Debug, Clone)]
enum Source {
    Exact(ExactReal),
    Expr(Arc<Expr>),
    Root(Arc<RootProblem>),
    Fixed,
}

/// β as a rational enclosure `[lo, hi]`, optionally backed by an exact value
/// and by a source that can produce tighter enclosures on demand.
#[derive(Debug, Clone)]
pub struct CertifiedReal {
    lo: BigRational,
    hi: BigRational,
    bits: u64,
    source: Source,
}

pub const DEFAULT_START_BITS: u64 = 64;

impl CertifiedReal {
    pub fn rational(r: BigRational) -> Self {
        CertifiedReal {
            lo: r.clone(),
            hi: r.clone(),
            bits: u64::MAX,
            source: Source::Exact(ExactReal::Rational(r)),
        }
    }

    pub fn ratio(numer: i64, denom: i64) -> Self {
        CertifiedReal::rational(BigRational::new(numer.into(), denom.into()))
    }

    /// `(p + q√d)/r`; collapses to a rational when `d` is a perfect square.
    pub fn quadratic(p: i64, q: i64, d: i64, r: i64) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidBeta("zero denominator".into()));
        }
        if d < 0 {
            return Err(Error::InvalidBeta("negative radicand".into()));
        }
        match QuadNum::from_parts(p.into(), q.into(), d.into(), r.into()) {
            Some(qn) => Ok(CertifiedReal::from_exact(ExactReal::Quadratic(qn))),
            None => {
                let s = BigInt::from(d).sqrt();
                let r = BigRational::new(BigInt::from(p) + BigInt::from(q) * s, r.into());
                Ok(CertifiedReal::rational(r))
            }
        }
    }

    pub fn from_exact(exact: ExactReal) -> Self {
        match exact {
            ExactReal::Rational(r) => CertifiedReal::rational(r),
            ExactReal::Quadratic(q) => {
                let bits = DEFAULT_START_BITS;
                let (lo, hi) = q.enclose(bits);
                CertifiedReal {
                    lo,
                    hi,
                    bits,
                    source: Source::Exact(ExactReal::Quadratic(q)),
                }
            }
        }
    }

    /// A fixed enclosure with no way to refine it.
    pub fn interval(lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidBeta(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(CertifiedReal {
            lo,
            hi,
            bits: 0,
            source: Source::Fixed,
        })
    }

    pub(crate) fn from_root(lo: BigRational, hi: BigRational, bits: u64, problem: Arc<RootProblem>) -> Self {
        CertifiedReal {
            lo,
            hi,
            bits,
            source: Source::Root(problem),
        }
    }

    /// Parses an arithmetic expression such as `3/2`, `1.8`, `(1+sqrt 5)/2`
    /// or `sqrt(2) + 1/10`. Expressions that live in a single quadratic field
    /// are kept exact; anything else becomes a refinable interval.
    pub fn parse(text: &str) -> Result<Self> {
        let expr = Parser::new(text).parse()?;
        if let Some(exact) = expr.eval_exact() {
            return Ok(CertifiedReal::from_exact(exact));
        }
        let expr = Arc::new(expr);
        let bits = DEFAULT_START_BITS;
        let iv = expr.eval_interval(bits)?;
        Ok(CertifiedReal {
            lo: iv.lo,
            hi: iv.hi,
            bits,
            source: Source::Expr(expr),
        })
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn exact(&self) -> Option<&ExactReal> {
        match &self.source {
            Source::Exact(e) => Some(e),
            _ => None,
        }
    }

    /// Working precision in bits of the current enclosure (`u64::MAX` when exact and rational).
    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn width_f64(&self) -> f64 {
        rational_to_f64(&self.width())
    }

    pub fn midpoint_f64(&self) -> f64 {
        if let Some(e) = self.exact() {
            return e.to_f64();
        }
        rational_to_f64(&((&self.lo + &self.hi) / BigRational::from_integer(2.into())))
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn is_refinable(&self) -> bool {
        match &self.source {
            Source::Exact(ExactReal::Rational(_)) | Source::Fixed => false,
            Source::Exact(_) | Source::Expr(_) | Source::Root(_) => true,
        }
    }

    /// A tighter enclosure computed at `bits` of working precision, or `None`
    /// when the source cannot do better than the current one.
    pub fn refine(&self, bits: u64) -> Option<CertifiedReal> {
        if bits <= self.bits {
            return None;
        }
        let (lo, hi) = match &self.source {
            Source::Exact(e @ ExactReal::Quadratic(_)) => e.enclose(bits),
            Source::Expr(expr) => {
                let iv = expr.eval_interval(bits).ok()?;
                (iv.lo, iv.hi)
            }
            Source::Root(problem) => {
                let (lo, hi) = problem.enclose(bits)?;
                if &hi - &lo >= self.width() {
                    return None;
                }
                (lo, hi)
            }
            Source::Exact(ExactReal::Rational(_)) | Source::Fixed => return None,
        };
        Some(CertifiedReal {
            lo,
            hi,
            bits,
            source: self.source.clone(),
        })
    }

    /// `b = ⌈β⌉`, provided the enclosure determines it and β is not an integer.
    pub fn alphabet_size(&self) -> Result<u32> {
        if let Some(e) = self.exact() {
            let ceil = match e {
                ExactReal::Rational(r) => {
                    if r.is_integer() {
                        return Err(Error::IntegerBeta(r.to_string()));
                    }
                    r.ceil().to_integer()
                }
                ExactReal::Quadratic(q) => q.ceil(),
            };
            return ceil
                .to_u32()
                .ok_or_else(|| Error::InvalidBeta(format!("beta too large: {e}")));
        }
        let clo = self.lo.ceil().to_integer();
        let chi = self.hi.ceil().to_integer();
        if clo != chi || self.lo.is_integer() {
            return Err(Error::PrecisionExhausted {
                index: 0,
                bits: self.bits,
                certified: Vec::new(),
            });
        }
        clo.to_u32()
            .ok_or_else(|| Error::InvalidBeta(format!("beta too large: [{}, {}]", self.lo, self.hi)))
    }
}

impl fmt::Display for CertifiedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact() {
            Some(e) => write!(f, "{e}"),
            None => write!(f, "[{}, {}]", rational_to_f64(&self.lo), rational_to_f64(&self.hi)),
        }
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(x) = r.to_f64() {
        if x.is_finite() {
            return x;
        }
    }
    // fall back on scaled integer division for huge numerators/denominators
    let shift = r.numer().bits() as i64 - r.denom().bits() as i64;
    let scaled = if shift > 60 {
        r / BigRational::from_integer(BigInt::one() << (shift - 60) as usize)
    } else {
        r.clone()
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi((shift - 60).max(0) as i32)
}

/// Rounds `x` down (`up == false`) or up to a dyadic rational with `bits` fractional bits.
pub(crate) fn round_dyadic(x: &BigRational, bits: u64, up: bool) -> BigRational {
    if x.denom().bits() <= bits {
        return x.clone();
    }
    let scale = BigInt::one() << bits;
    let scaled = x * BigRational::from_integer(scale.clone());
    let n = if up { scaled.ceil() } else { scaled.floor() }.to_integer();
    BigRational::new(n, scale)
}

// ---------------------------------------------------------------------------
// expressions

#[derive(Debug, Clone)]
enum Expr {
    Num(BigRational),
    Neg(Box<Expr>),
    Sqrt(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone)]
enum Val {
    Rat(BigRational),
    Quad(QuadNum),
}

impl Val {
    fn radicand(&self) -> Option<&BigInt> {
        match self {
            Val::Rat(_) => None,
            Val::Quad(q) => Some(q.radicand()),
        }
    }

    fn lift(self, d: &BigInt) -> QuadNum {
        match self {
            Val::Rat(r) => QuadNum::from_rational(r, d.clone()),
            Val::Quad(q) => q,
        }
    }

    fn normalize(q: QuadNum) -> Val {
        if q.is_rational() {
            Val::Rat(q.rational_part().clone())
        } else {
            Val::Quad(q)
        }
    }
}

fn binary_exact(a: Val, b: Val, op: fn(&QuadNum, &QuadNum) -> Option<QuadNum>, rat: fn(&BigRational, &BigRational) -> Option<BigRational>) -> Option<Val> {
    match (a, b) {
        (Val::Rat(x), Val::Rat(y)) => rat(&x, &y).map(Val::Rat),
        (a, b) => {
            let d = match (a.radicand(), b.radicand()) {
                (Some(d1), Some(d2)) if d1 != d2 => return None,
                (Some(d), _) | (_, Some(d)) => d.clone(),
                (None, None) => unreachable!(),
            };
            op(&a.lift(&d), &b.lift(&d)).map(Val::normalize)
        }
    }
}

/// Splits `n > 0` as `k²·m` with `m` free of small square factors.
fn square_split(n: &BigInt) -> (BigInt, BigInt) {
    let mut m = n.clone();
    let mut k = BigInt::one();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(10_000);
    while p <= limit && &p * &p <= m {
        let p2 = &p * &p;
        while (&m % &p2).is_zero() {
            m /= &p2;
            k *= &p;
        }
        p += 1;
    }
    let s = m.sqrt();
    if &s * &s == m {
        k *= s;
        m = BigInt::one();
    }
    (k, m)
}

#[derive(Debug, Clone)]
struct Interval {
    lo: BigRational,
    hi: BigRational,
}

impl Interval {
    fn point(x: BigRational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    fn rounded(self, bits: u64) -> Self {
        Interval {
            lo: round_dyadic(&self.lo, bits, false),
            hi: round_dyadic(&self.hi, bits, true),
        }
    }

    fn mul(&self, o: &Interval) -> Interval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval { lo, hi }
    }
}

impl Expr {
    fn eval_exact(&self) -> Option<ExactReal> {
        match self.exact_val()? {
            Val::Rat(r) => Some(ExactReal::Rational(r)),
            Val::Quad(q) => Some(ExactReal::Quadratic(q)),
        }
    }

    fn exact_val(&self) -> Option<Val> {
        Some(match self {
            Expr::Num(r) => Val::Rat(r.clone()),
            Expr::Neg(e) => match e.exact_val()? {
                Val::Rat(r) => Val::Rat(-r),
                Val::Quad(q) => Val::Quad(q.neg()),
            },
            Expr::Sqrt(e) => match e.exact_val()? {
                Val::Rat(r) if !r.is_negative() => {
                    // √(p/q) = √(pq)/q = k√m / q
                    let pq = r.numer() * r.denom();
                    if pq.is_zero() {
                        return Some(Val::Rat(BigRational::zero()));
                    }
                    let (k, m) = square_split(&pq);
                    let coeff = BigRational::new(k, r.denom().clone());
                    if m.is_one() {
                        Val::Rat(coeff)
                    } else {
                        Val::Quad(QuadNum::new(BigRational::zero(), coeff, m)?)
                    }
                }
                _ => return None,
            },
            Expr::Add(a, b) => binary_exact(a.exact_val()?, b.exact_val()?, |x, y| Some(x.add(y)), |x, y| Some(x + y))?,
            Expr::Sub(a, b) => binary_exact(a.exact_val()?, b.exact_val()?, |x, y| Some(x.sub(y)), |x, y| Some(x - y))?,
            Expr::Mul(a, b) => binary_exact(a.exact_val()?, b.exact_val()?, |x, y| Some(x.mul(y)), |x, y| Some(x * y))?,
            Expr::Div(a, b) => binary_exact(
                a.exact_val()?,
                b.exact_val()?,
                |x, y| Some(x.mul(&y.recip()?)),
                |x, y| if y.is_zero() { None } else { Some(x / y) },
            )?,
        })
    }

    fn eval_interval(&self, bits: u64) -> Result<Interval> {
        let guard = bits + 16;
        let iv = match self {
            Expr::Num(r) => Interval::point(r.clone()),
            Expr::Neg(e) => {
                let i = e.eval_interval(bits)?;
                Interval { lo: -i.hi, hi: -i.lo }
            }
            Expr::Sqrt(e) => {
                let i = e.eval_interval(bits)?;
                if i.lo.is_negative() {
                    return Err(Error::Parse("square root of a possibly negative value".into()));
                }
                Interval {
                    lo: sqrt_enclosure(&i.lo, guard).0,
                    hi: sqrt_enclosure(&i.hi, guard).1,
                }
            }
            Expr::Add(a, b) => {
                let (x, y) = (a.eval_interval(bits)?, b.eval_interval(bits)?);
                Interval { lo: x.lo + y.lo, hi: x.hi + y.hi }
            }
            Expr::Sub(a, b) => {
                let (x, y) = (a.eval_interval(bits)?, b.eval_interval(bits)?);
                Interval { lo: x.lo - y.hi, hi: x.hi - y.lo }
            }
            Expr::Mul(a, b) => a.eval_interval(bits)?.mul(&b.eval_interval(bits)?),
            Expr::Div(a, b) => {
                let (x, y) = (a.eval_interval(bits)?, b.eval_interval(bits)?);
                if !y.lo.is_positive() && !y.hi.is_negative() {
                    return Err(Error::Parse("division by an interval containing zero".into()));
                }
                let inv = Interval {
                    lo: BigRational::one() / &y.hi,
                    hi: BigRational::one() / &y.lo,
                };
                x.mul(&inv)
            }
        };
        Ok(iv.rounded(guard))
    }
}

struct Parser<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    text: &'a str,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            chars: text.char_indices().peekable(),
            text,
        }
    }

    fn parse(mut self) -> Result<Expr> {
        let e = self.expr()?;
        self.skip_ws();
        if let Some((i, c)) = self.chars.peek() {
            return Err(Error::Parse(format!("unexpected '{c}' at offset {i} in '{}'", self.text)));
        }
        Ok(e)
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some((_, c)) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.peek().map(|&(_, c)| c)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.chars.next();
            let rhs = self.term()?;
            lhs = if c == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek() {
            self.chars.next();
            let rhs = self.unary()?;
            lhs = if c == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some('-') {
            self.chars.next();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some('(') => {
                self.chars.next();
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(Error::Parse(format!("missing ')' in '{}'", self.text)));
                }
                self.chars.next();
                Ok(e)
            }
            Some('√') => {
                self.chars.next();
                Ok(Expr::Sqrt(Box::new(self.primary()?)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                while let Some(&(_, c)) = self.chars.peek() {
                    if c.is_ascii_alphabetic() {
                        name.push(c);
                        self.chars.next();
                    } else {
                        break;
                    }
                }
                if name != "sqrt" {
                    return Err(Error::Parse(format!("unknown function '{name}'")));
                }
                Ok(Expr::Sqrt(Box::new(self.primary()?)))
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) => Err(Error::Parse(format!("unexpected '{c}' in '{}'", self.text))),
            None => Err(Error::Parse(format!("unexpected end of '{}'", self.text))),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let mut int_part = String::new();
        let mut frac_part = String::new();
        let mut seen_dot = false;
        while let Some(&(_, c)) = self.chars.peek() {
            if c.is_ascii_digit() {
                if seen_dot {
                    frac_part.push(c)
                } else {
                    int_part.push(c)
                }
            } else if c == '.' && !seen_dot {
                seen_dot = true;
            } else {
                break;
            }
            self.chars.next();
        }
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(Error::Parse(format!("bad number in '{}'", self.text)));
        }
        let digits = format!("{int_part}{frac_part}");
        let numer: BigInt = digits.parse().map_err(|_| Error::Parse(digits.clone()))?;
        let denom = num_traits::pow(BigInt::from(10), frac_part.len());
        Ok(Expr::Num(BigRational::new(numer, denom)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_golden_ratio_exactly() {
        let g = CertifiedReal::parse("(1+sqrt 5)/2").unwrap();
        match g.exact() {
            Some(ExactReal::Quadratic(q)) => {
                assert_eq!(q.radicand(), &BigInt::from(5));
                assert_eq!(q.rational_part(), &BigRational::new(1.into(), 2.into()));
                assert_eq!(q.irrational_part(), &BigRational::new(1.into(), 2.into()));
            }
            other => panic!("expected quadratic, got {other:?}"),
        }
        assert_eq!(g.alphabet_size().unwrap(), 2);
    }

    #[test]
    fn parses_rationals_and_decimals() {
        let x = CertifiedReal::parse("3/2").unwrap();
        assert_eq!(x.exact(), Some(&ExactReal::Rational(BigRational::new(3.into(), 2.into()))));
        let y = CertifiedReal::parse("1.25").unwrap();
        assert_eq!(y.exact(), Some(&ExactReal::Rational(BigRational::new(5.into(), 4.into()))));
        let z = CertifiedReal::parse("sqrt(16)/3 + 0").unwrap();
        assert_eq!(z.exact(), Some(&ExactReal::Rational(BigRational::new(4.into(), 3.into()))));
    }

    #[test]
    fn sqrt_normalizes_square_factors() {
        let a = CertifiedReal::parse("sqrt 20 - 2*sqrt 5 + 3/2").unwrap();
        assert_eq!(a.exact(), Some(&ExactReal::Rational(BigRational::new(3.into(), 2.into()))));
    }

    #[test]
    fn mixed_radicands_fall_back_to_intervals() {
        let x = CertifiedReal::parse("sqrt 2 + sqrt 3 - 1").unwrap();
        assert!(x.exact().is_none());
        let v = 2f64.sqrt() + 3f64.sqrt() - 1.0;
        assert!(rational_to_f64(x.lo()) <= v && v <= rational_to_f64(x.hi()));
        let finer = x.refine(256).unwrap();
        assert!(finer.width() < x.width());
        assert!(finer.width_f64() < 1e-70);
    }

    #[test]
    fn integer_beta_detected() {
        assert!(matches!(CertifiedReal::ratio(2, 1).alphabet_size(), Err(Error::IntegerBeta(_))));
    }

    #[test]
    fn parse_errors() {
        assert!(CertifiedReal::parse("1 +").is_err());
        assert!(CertifiedReal::parse("cos 3").is_err());
        assert!(CertifiedReal::parse("(1").is_err());
        assert!(CertifiedReal::parse("1/0").is_err());
    }
}
