//! Outward-rounded real intervals with arbitrary-precision dyadic endpoints.
//!
//! Every endpoint is a number `m * 2^e` with a big-integer mantissa. After
//! each operation the lower endpoint is rounded toward `-inf` and the upper
//! endpoint toward `+inf` at [`PRECISION`] significant bits, so an interval
//! always contains the exact real value of the expression it was built from.
//! Exponents are `i64`, which leaves room for quantities like
//! `C(2000,2)^2000 / 2000!` that overflow `f64`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Working precision of interval endpoints, in bits.
pub const PRECISION: u64 = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

impl Round {
    fn flip(self) -> Self {
        match self {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
        }
    }
}

/// A dyadic rational `mant * 2^exp`, kept with no trailing zero bits.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            mant: BigInt::one(),
            exp: 0,
        }
    }

    pub fn new(mant: BigInt, exp: i64) -> Self {
        Dyadic { mant, exp }.normalized()
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Dyadic::new(v.into(), 0)
    }

    fn normalized(mut self) -> Self {
        match self.mant.trailing_zeros() {
            None => Dyadic::zero(),
            Some(0) => self,
            Some(tz) => {
                self.mant >>= tz;
                self.exp += tz as i64;
                self
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// `floor(log2 |x|)`; meaningless for zero.
    pub fn log2_floor(&self) -> i64 {
        self.mant.bits() as i64 - 1 + self.exp
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as u64)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Directed rounding of an exact rational to `prec` significant bits.
    pub fn from_rational(q: &BigRational, prec: u64, round: Round) -> Self {
        div_round(q.numer(), q.denom(), prec, round)
    }

    pub fn round(&self, prec: u64, round: Round) -> Self {
        let bits = self.mant.bits();
        if bits <= prec {
            return self.clone();
        }
        let shift = bits - prec;
        let mant = match round {
            Round::Down => &self.mant >> shift,
            Round::Up => -((-&self.mant) >> shift),
        };
        Dyadic::new(mant, self.exp + shift as i64)
    }

    pub fn add_exact(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        Dyadic::new(a + b, e)
    }

    pub fn mul_exact(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mant * &other.mant, self.exp + other.exp)
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    /// Multiplication by `2^k`, exact.
    pub fn ldexp(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    pub fn cmp_rational(&self, q: &BigRational) -> Ordering {
        self.to_rational().cmp(q)
    }

    /// Nearest-ish `f64`; saturates to infinity or zero outside the `f64` range.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let (m, e) = if bits > 60 {
            let s = bits - 60;
            (&self.mant >> s, self.exp + s as i64)
        } else {
            (self.mant.clone(), self.exp)
        };
        let m = m.to_f64().unwrap_or(f64::NAN);
        if e > 2100 {
            return m.signum() * f64::INFINITY;
        }
        if e < -2200 {
            return 0.0 * m.signum();
        }
        let half = (e / 2) as i32;
        m * 2f64.powi(half) * 2f64.powi(e as i32 - half)
    }

    /// Scientific-notation decimal string with `digits` significant digits,
    /// rounded in the given direction.
    pub fn to_sci_string(&self, digits: usize, round: Round) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        if self.signum() < 0 {
            let s = self.abs().to_sci_string(digits, round.flip());
            return format!("-{s}");
        }
        let digits = digits.max(1);
        // Estimate the decimal exponent from the binary one, then correct it.
        let mut e10 = (self.log2_floor() as f64 * std::f64::consts::LOG10_2).floor() as i64;
        let ten = BigInt::from(10u32);
        let lower = ten.pow(digits as u32 - 1);
        let upper = ten.pow(digits as u32);
        if (digits as i64 - 1 - e10).abs() > 64 {
            if let Some((m, e)) = self.sci_digits_approx(digits, e10, &lower, &upper, round) {
                return sci_format(m, e);
            }
        }
        let q = self.to_rational();
        let scale = |e10: i64| -> BigRational {
            let shift = digits as i64 - 1 - e10;
            if shift >= 0 {
                &q * BigRational::from_integer(ten.pow(shift as u32))
            } else {
                &q / BigRational::from_integer(ten.pow((-shift) as u32))
            }
        };
        let mut scaled = scale(e10);
        loop {
            if scaled < BigRational::from_integer(lower.clone()) {
                e10 -= 1;
            } else if scaled >= BigRational::from_integer(upper.clone()) {
                e10 += 1;
            } else {
                break;
            }
            scaled = scale(e10);
        }
        let mut m = match round {
            Round::Down => scaled.floor().to_integer(),
            Round::Up => scaled.ceil().to_integer(),
        };
        if m == upper {
            m = lower;
            e10 += 1;
        }
        sci_format(m, e10)
    }

    /// Leading digits via a 128-bit enclosure of `self * 10^shift`; `None`
    /// when the enclosure straddles a digit boundary.
    fn sci_digits_approx(
        &self,
        digits: usize,
        mut e10: i64,
        lower: &BigInt,
        upper: &BigInt,
        round: Round,
    ) -> Option<(BigInt, i64)> {
        let x = RealInterval::point(self.clone());
        let ten = RealInterval::from_int(10);
        for _ in 0..3 {
            let shift = digits as i64 - 1 - e10;
            let p = ten.powu(shift.unsigned_abs());
            let s = if shift >= 0 { &x * &p } else { x.checked_div(&p)? };
            let (lo, hi) = (floor_int(s.lo()), ceil_int(s.hi()));
            if &hi < lower {
                e10 -= 1;
            } else if &lo >= upper {
                e10 += 1;
            } else {
                let m = match round {
                    Round::Down => (lo, floor_int(s.hi())),
                    Round::Up => (ceil_int(s.lo()), hi),
                };
                if m.0 != m.1 || &m.0 < lower || &m.0 > upper {
                    return None;
                }
                return Some(if &m.0 == upper {
                    (lower.clone(), e10 + 1)
                } else {
                    (m.0, e10)
                });
            }
        }
        None
    }
}

fn floor_int(d: &Dyadic) -> BigInt {
    if d.exp >= 0 {
        &d.mant << d.exp as u64
    } else {
        &d.mant >> (-d.exp) as u64
    }
}

fn ceil_int(d: &Dyadic) -> BigInt {
    -floor_int(&d.neg_exact())
}

fn sci_format(m: BigInt, e10: i64) -> String {
    let s = m.to_string();
    let (head, tail) = s.split_at(1);
    if tail.is_empty() {
        format!("{head}e{e10}")
    } else {
        format!("{head}.{tail}e{e10}")
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let diff = self.add_exact(&other.neg_exact());
        diff.signum().cmp(&0)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Dyadic {
    fn neg_exact(&self) -> Dyadic {
        Dyadic {
            mant: -&self.mant,
            exp: self.exp,
        }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci_string(20, Round::Down))
    }
}

/// `a / b` rounded to `prec` bits.
fn div_round(a: &BigInt, b: &BigInt, prec: u64, round: Round) -> Dyadic {
    assert!(!b.is_zero(), "division by zero");
    if a.is_zero() {
        return Dyadic::zero();
    }
    let (a, b) = if b.is_negative() {
        (-a, -b)
    } else {
        (a.clone(), b.clone())
    };
    let t = prec as i64 + b.bits() as i64 - a.bits() as i64 + 2;
    let (num, den) = if t >= 0 {
        (a << t as u64, b)
    } else {
        (a, b << (-t) as u64)
    };
    let q = match round {
        Round::Down => num.div_floor(&den),
        Round::Up => -((-num).div_floor(&den)),
    };
    Dyadic::new(q, -t).round(prec, round)
}

fn mul_round(a: &Dyadic, b: &Dyadic, prec: u64, round: Round) -> Dyadic {
    a.mul_exact(b).round(prec, round)
}

fn add_round(a: &Dyadic, b: &Dyadic, prec: u64, round: Round) -> Dyadic {
    a.add_exact(b).round(prec, round)
}

fn dyadic_div_round(a: &Dyadic, b: &Dyadic, prec: u64, round: Round) -> Dyadic {
    // (ma 2^ea) / (mb 2^eb) = (ma / mb) 2^(ea-eb)
    div_round(&a.mant, &b.mant, prec, round).ldexp(a.exp - b.exp)
}

fn sqrt_round(x: &Dyadic, prec: u64, round: Round) -> Dyadic {
    assert!(x.signum() >= 0, "square root of a negative number");
    if x.is_zero() {
        return Dyadic::zero();
    }
    let want = 2 * prec + 4;
    let mut sh = want.saturating_sub(x.mant.bits()) as i64;
    if (x.exp - sh).rem_euclid(2) != 0 {
        sh += 1;
    }
    let m = &x.mant << sh as u64;
    let e = x.exp - sh;
    let mut r = m.sqrt();
    if round == Round::Up && &r * &r != m {
        r += 1;
    }
    Dyadic::new(r, e / 2).round(prec, round)
}

/// A closed interval `[lo, hi]` guaranteed to contain the value it encloses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealInterval {
    lo: Dyadic,
    hi: Dyadic,
}

impl RealInterval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RealInterval { lo, hi }
    }

    pub fn point(x: Dyadic) -> Self {
        RealInterval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        RealInterval::point(Dyadic::zero())
    }

    pub fn one() -> Self {
        RealInterval::point(Dyadic::one())
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        let d = Dyadic::from_int(v);
        if d.mant.bits() <= PRECISION {
            RealInterval::point(d)
        } else {
            RealInterval {
                lo: d.round(PRECISION, Round::Down),
                hi: d.round(PRECISION, Round::Up),
            }
        }
    }

    pub fn from_rational(q: &BigRational) -> Self {
        RealInterval {
            lo: Dyadic::from_rational(q, PRECISION, Round::Down),
            hi: Dyadic::from_rational(q, PRECISION, Round::Up),
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64()
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64()
    }

    pub fn midpoint_f64(&self) -> f64 {
        0.5 * (self.lo.to_f64() + self.hi.to_f64())
    }

    pub fn width_f64(&self) -> f64 {
        self.hi.add_exact(&self.lo.neg_exact()).to_f64()
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        self.lo.cmp_rational(q) != Ordering::Greater && self.hi.cmp_rational(q) != Ordering::Less
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    /// Every point of the interval is `> 0`.
    pub fn is_positive(&self) -> bool {
        self.lo.signum() > 0
    }

    /// Every point is `<= q`.
    pub fn le_rational(&self, q: &BigRational) -> bool {
        self.hi.cmp_rational(q) != Ordering::Greater
    }

    /// Every point is `>= q`.
    pub fn ge_rational(&self, q: &BigRational) -> bool {
        self.lo.cmp_rational(q) != Ordering::Less
    }

    /// Every point of `self` is `<=` every point of `other`.
    pub fn le(&self, other: &RealInterval) -> bool {
        self.hi <= other.lo
    }

    pub fn lt(&self, other: &RealInterval) -> bool {
        self.hi < other.lo
    }

    pub fn abs(&self) -> RealInterval {
        if self.lo.signum() >= 0 {
            self.clone()
        } else if self.hi.signum() <= 0 {
            -self
        } else {
            let hi = self.lo.abs().max(self.hi.clone());
            RealInterval { lo: Dyadic::zero(), hi }
        }
    }

    pub fn recip(&self) -> RealInterval {
        assert!(!self.contains_zero(), "reciprocal of an interval containing zero");
        let one = Dyadic::one();
        RealInterval {
            lo: dyadic_div_round(&one, &self.hi, PRECISION, Round::Down),
            hi: dyadic_div_round(&one, &self.lo, PRECISION, Round::Up),
        }
    }

    /// `None` when the divisor contains zero.
    pub fn checked_div(&self, other: &RealInterval) -> Option<RealInterval> {
        if other.contains_zero() {
            return None;
        }
        let cands = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let lo = cands
            .iter()
            .map(|(a, b)| dyadic_div_round(a, b, PRECISION, Round::Down))
            .min()
            .unwrap();
        let hi = cands
            .iter()
            .map(|(a, b)| dyadic_div_round(a, b, PRECISION, Round::Up))
            .max()
            .unwrap();
        Some(RealInterval { lo, hi })
    }

    pub fn mul_rational(&self, q: &BigRational) -> RealInterval {
        self * &RealInterval::from_rational(q)
    }

    pub fn add_rational(&self, q: &BigRational) -> RealInterval {
        self + &RealInterval::from_rational(q)
    }

    /// Integer power.
    pub fn powu(&self, mut e: u64) -> RealInterval {
        if self.lo.signum() >= 0 {
            let mut base = self.clone();
            let mut acc = RealInterval::one();
            while e > 0 {
                if e & 1 == 1 {
                    acc = &acc * &base;
                }
                e >>= 1;
                if e > 0 {
                    base = &base * &base;
                }
            }
            acc
        } else if self.hi.signum() <= 0 {
            let p = (-self).powu(e);
            if e % 2 == 0 {
                p
            } else {
                -&p
            }
        } else {
            let a = self.abs().powu(e);
            if e % 2 == 0 {
                RealInterval {
                    lo: Dyadic::zero(),
                    hi: a.hi,
                }
            } else {
                let lo = -&RealInterval::point(self.lo.abs()).powu(e);
                let hi = RealInterval::point(self.hi.clone()).powu(e);
                RealInterval { lo: lo.lo, hi: hi.hi }
            }
        }
    }

    /// `None` if the interval contains negative numbers.
    pub fn sqrt(&self) -> Option<RealInterval> {
        if self.lo.signum() < 0 {
            return None;
        }
        Some(RealInterval {
            lo: sqrt_round(&self.lo, PRECISION, Round::Down),
            hi: sqrt_round(&self.hi, PRECISION, Round::Up),
        })
    }

    pub fn exp(&self) -> RealInterval {
        RealInterval {
            lo: exp_enclosure(&self.lo, PRECISION).lo,
            hi: exp_enclosure(&self.hi, PRECISION).hi,
        }
    }

    pub fn min_with(&self, other: &RealInterval) -> RealInterval {
        RealInterval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().min(other.hi.clone()),
        }
    }

    pub fn max_with(&self, other: &RealInterval) -> RealInterval {
        RealInterval {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }
}

/// Enclosure of `e^x` for a single dyadic point, at `prec` bits.
fn exp_enclosure(x: &Dyadic, prec: u64) -> RealInterval {
    if x.is_zero() {
        return RealInterval::one();
    }
    if x.signum() < 0 {
        let e = exp_enclosure(&x.abs(), prec + 8);
        let one = Dyadic::one();
        return RealInterval {
            lo: dyadic_div_round(&one, &e.hi, prec, Round::Down),
            hi: dyadic_div_round(&one, &e.lo, prec, Round::Up),
        };
    }
    // Argument halving: y = x / 2^s < 1/16, then square s times.
    let s = (x.log2_floor() + 5).max(0) as u64;
    let wp = prec + s + 32;
    let y = x.ldexp(-(s as i64));
    let stop = -(wp as i64) - 2;

    let mut sum_lo = Dyadic::one();
    let mut sum_hi = Dyadic::one();
    let mut term_lo = Dyadic::one();
    let mut term_hi = Dyadic::one();
    let mut k: u64 = 1;
    loop {
        let kk = Dyadic::from_int(k);
        term_lo = dyadic_div_round(&mul_round(&term_lo, &y, wp, Round::Down), &kk, wp, Round::Down);
        term_hi = dyadic_div_round(&mul_round(&term_hi, &y, wp, Round::Up), &kk, wp, Round::Up);
        sum_lo = add_round(&sum_lo, &term_lo, wp, Round::Down);
        sum_hi = add_round(&sum_hi, &term_hi, wp, Round::Up);
        if term_hi.is_zero() || term_hi.log2_floor() < stop {
            break;
        }
        k += 1;
    }
    // Tail after the last term is below term * y / (1 - y) < term.
    sum_hi = add_round(&sum_hi, &term_hi, wp, Round::Up);

    for _ in 0..s {
        sum_lo = mul_round(&sum_lo, &sum_lo, wp, Round::Down);
        sum_hi = mul_round(&sum_hi, &sum_hi, wp, Round::Up);
    }
    RealInterval {
        lo: sum_lo.round(prec, Round::Down),
        hi: sum_hi.round(prec, Round::Up),
    }
}

impl fmt::Display for RealInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            self.lo.to_sci_string(12, Round::Down),
            self.hi.to_sci_string(12, Round::Up)
        )
    }
}

impl Neg for &RealInterval {
    type Output = RealInterval;
    fn neg(self) -> RealInterval {
        RealInterval {
            lo: self.hi.neg_exact(),
            hi: self.lo.neg_exact(),
        }
    }
}

impl Neg for RealInterval {
    type Output = RealInterval;
    fn neg(self) -> RealInterval {
        -&self
    }
}

impl Add for &RealInterval {
    type Output = RealInterval;
    fn add(self, o: &RealInterval) -> RealInterval {
        RealInterval {
            lo: add_round(&self.lo, &o.lo, PRECISION, Round::Down),
            hi: add_round(&self.hi, &o.hi, PRECISION, Round::Up),
        }
    }
}

impl Sub for &RealInterval {
    type Output = RealInterval;
    fn sub(self, o: &RealInterval) -> RealInterval {
        self + &(-o)
    }
}

impl Mul for &RealInterval {
    type Output = RealInterval;
    fn mul(self, o: &RealInterval) -> RealInterval {
        let prods = [
            self.lo.mul_exact(&o.lo),
            self.lo.mul_exact(&o.hi),
            self.hi.mul_exact(&o.lo),
            self.hi.mul_exact(&o.hi),
        ];
        let lo = prods.iter().min().unwrap().round(PRECISION, Round::Down);
        let hi = prods.iter().max().unwrap().round(PRECISION, Round::Up);
        RealInterval { lo, hi }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RealInterval {
            type Output = RealInterval;
            fn $m(self, o: RealInterval) -> RealInterval {
                (&self).$m(&o)
            }
        }
        impl $tr<&RealInterval> for RealInterval {
            type Output = RealInterval;
            fn $m(self, o: &RealInterval) -> RealInterval {
                (&self).$m(o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
