//! Effective bounds for the rook coincidence process and Stirling numbers.
//!
//! Polynomial ingredients are exact rationals; anything involving `exp` or
//! `sqrt` is evaluated in [`RealInterval`] arithmetic, so every containment
//! check against an exact Stirling number is rigorous.
//!
//! Throughout, `N = C(n, 2)`, `r = n - k`, and `K = N^r / r!`, so that
//! `P(no attack) = Stirling / K`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::coincidence::PairProbabilities;
use crate::error::{Error, Result};
use crate::interval::{RealInterval, Round};
use crate::stirling::{diagonal, factorial};
use crate::{Kind, Model};

/// Largest `n` accepted by [`compare_table`].
pub const COMPARE_N_MAX: usize = 2000;

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn int(v: usize) -> BigRational {
    BigRational::from_integer(v.into())
}

fn choose2(r: usize) -> BigRational {
    int(r * r.saturating_sub(1) / 2)
}

fn choose3(r: usize) -> BigRational {
    int(r * r.saturating_sub(1) * r.saturating_sub(2) / 6)
}

/// `N^r / r!`.
pub fn scale_factor(n: usize, r: usize) -> BigRational {
    let nn = BigInt::from(n * (n - 1) / 2);
    BigRational::new(num_traits::pow(nn, r), factorial(r))
}

/// Chen-Stein quantities for `r` iid rooks on `B_n`.
///
/// `d` is the closed form of the total variation bound; `d_from_parts`
/// returns `4 (b1 + b2)` built from the part-wise terms. The two are
/// different rational functions of `(n, r)` for every `r >= 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub n: usize,
    pub r: usize,
    pub p: BigRational,
    pub q: BigRational,
    pub b1_a: BigRational,
    pub b1_l: BigRational,
    pub b1_al: BigRational,
    pub b1: BigRational,
    pub b2_a: BigRational,
    pub b2_l: BigRational,
    pub b2_al: BigRational,
    pub b2: BigRational,
    pub d: BigRational,
    pub lambda_r: BigRational,
    pub lambda_c: BigRational,
}

impl BoundReport {
    pub fn new(n: usize, r: usize) -> Result<Self> {
        let pp = PairProbabilities::new(n)?;
        let nf = int(n);
        let n2 = &nf * &nf;
        let nm1 = &nf - int(1);
        let nm1_sq = &nm1 * &nm1;
        let nh = &nf - rat(1, 2);
        let nm2 = &nf - int(2);
        let rf = int(r);
        // r(r-1)(r-3/2) and r(r-1)(r-2)
        let t = &rf * (&rf - int(1)) * (&rf - rat(3, 2));
        let u = &rf * (&rf - int(1)) * (&rf - int(2));

        let b1_a = &t * rat(64, 9) / &n2 * &nh * &nh / &nm1_sq;
        let b1_l = &t * rat(16, 9) / &n2 * &nm2 * &nm2 / &nm1_sq;
        let b1_al = &t * rat(32, 9) / &n2 * &nh * &nm2 / &nm1_sq;
        let b1 = &b1_a + &b1_l + &b1_al;

        let b2_a = &u * rat(16, 3) / &n2 * &nh * &nh / &nm1_sq;
        let b2_l = &u * (&nf * &nm1 + int(2)) / &n2 / &nm1_sq;
        let b2_al = &u * rat(4, 3) / &n2 * &nm2 / &nm1;
        let b2 = &b2_a + &b2_l + &b2_al;

        let d = &t * rat(362, 9) / &n2 * (&nf * (&nf - rat(301, 181)) + int(166)) / &nm1_sq;
        let lambda = choose2(r) * &pp.p;

        Ok(BoundReport {
            n,
            r,
            p: pp.p,
            q: pp.q,
            b1_a,
            b1_l,
            b1_al,
            b1,
            b2_a,
            b2_l,
            b2_al,
            b2,
            d,
            lambda_r: lambda.clone(),
            lambda_c: lambda,
        })
    }

    /// `4 (b1 + b2)` from the part-wise terms.
    pub fn d_from_parts(&self) -> BigRational {
        (&self.b1 + &self.b2) * int(4)
    }

    /// Whether the closed-form `d` equals `4 (b1 + b2)` exactly.
    pub fn cross_identity_holds(&self) -> bool {
        self.d == self.d_from_parts()
    }

    /// Named exact fields in display order.
    pub fn exact_fields(&self) -> Vec<(&'static str, &BigRational)> {
        vec![
            ("p", &self.p),
            ("q", &self.q),
            ("b1_a", &self.b1_a),
            ("b1_l", &self.b1_l),
            ("b1_al", &self.b1_al),
            ("b1", &self.b1),
            ("b2_a", &self.b2_a),
            ("b2_l", &self.b2_l),
            ("b2_al", &self.b2_al),
            ("b2", &self.b2),
            ("d", &self.d),
            ("lambda_r", &self.lambda_r),
            ("lambda_c", &self.lambda_c),
        ]
    }
}

/// Chen-Stein quantities for `r` rooks on `B_n`.
pub fn chen_stein_report(n: usize, r: usize) -> Result<BoundReport> {
    BoundReport::new(n, r)
}

/// Two-sided bound from the point-probability inequality at zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SandwichBound {
    pub lower: RealInterval,
    pub upper: RealInterval,
    /// The bracket `1 - e^lambda F` is positive, so `lower` is meaningful.
    pub valid: bool,
}

/// A one-sided bound; `value` carries no guarantee when `valid` is false.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LsBound {
    pub value: RealInterval,
    pub valid: bool,
}

fn check_nk(n: usize, k: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::domain("n", format!("need n >= 2, got {n}")));
    }
    if k == 0 || k > n {
        return Err(Error::domain("k", format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    Ok(n - k)
}

/// `c2^A(n, r) = r(r-1)(r-2) * 40/(3n^2) * (n(n - 17/5) + 17/5)/(n-1)^2`.
pub fn c2a(n: usize, r: usize) -> BigRational {
    let nf = int(n);
    let rf = int(r);
    let u = &rf * (&rf - int(1)) * (&rf - int(2));
    let nm1 = &nf - int(1);
    u * rat(40, 3) / (&nf * &nf) * (&nf * (&nf - rat(17, 5)) + rat(17, 5)) / (&nm1 * &nm1)
}

/// `c3^A(n, r) = r(r-1)(r-2) * (23*18)/(3n^2) * (n(n - 31/23) + 18/23)/(n-1)^2`,
/// evaluated as printed.
pub fn c3a(n: usize, r: usize) -> BigRational {
    let nf = int(n);
    let rf = int(r);
    let u = &rf * (&rf - int(1)) * (&rf - int(2));
    let nm1 = &nf - int(1);
    u * rat(23 * 18, 3) / (&nf * &nf) * (&nf * (&nf - rat(31, 23)) + rat(18, 23)) / (&nm1 * &nm1)
}

/// Sandwich bounds on `s(n, k)` (first kind) or `S(n, k)` (second kind).
///
/// First kind: `K e^{-lambda} (1 -/+ e^lambda (f1 + f2))` with
/// `lambda = C(r,2) p`, `f1 = C(r,2)(2r-3) p^2`, `f2 = C(r,2)(2r-3)/N`.
/// Second kind: `2 lambda` and `c1^A + c2^A` in their places. Evaluated as
/// `K (e^{-lambda} -/+ F)`, which is the same number.
pub fn sandwich(kind: Kind, n: usize, k: usize) -> Result<SandwichBound> {
    let r = check_nk(n, k)?;
    let report = BoundReport::new(n, r)?;
    let (rate, slack) = match kind {
        Kind::First => {
            let c = choose2(r) * int(2 * r) - choose2(r) * int(3);
            let nn = int(n * (n - 1) / 2);
            let slack = &c * &report.p * &report.p + &c / nn;
            (report.lambda_c.clone(), slack)
        }
        Kind::Second => (&report.lambda_c * int(2), &report.b1_a + c2a(n, r)),
    };
    let scale = RealInterval::from_rational(&scale_factor(n, r));
    let e = (-RealInterval::from_rational(&rate)).exp();
    let slack = RealInterval::from_rational(&slack);
    let inner_lo = &e - &slack;
    let inner_hi = &e + &slack;
    Ok(SandwichBound {
        valid: inner_lo.is_positive(),
        lower: &scale * &inner_lo,
        upper: &scale * &inner_hi,
    })
}

fn attack_probability(kind: Kind, n: usize) -> Result<BigRational> {
    let pp = PairProbabilities::new(n)?;
    Ok(match kind {
        Kind::First => pp.p,
        Kind::Second => pp.p2_paper,
    })
}

/// Local lemma lower bound `K (1 - p e^g)^{C(r,2)}` with
/// `g = (1 - p - sqrt(1 - (4m - 2) p + p^2)) / 2`, `m = 2r - 2`, and `p`
/// the column-attack probability (first kind) or the displayed two-rook
/// attack probability (second kind).
pub fn lll_lower(kind: Kind, n: usize, k: usize) -> Result<LsBound> {
    let r = check_nk(n, k)?;
    let pp = attack_probability(kind, n)?;
    let m = 2 * r as i64 - 2;
    let arg = BigRational::from_integer(1.into()) - BigRational::from_integer((4 * m - 2).into()) * &pp + &pp * &pp;
    let invalid = LsBound {
        value: RealInterval::zero(),
        valid: false,
    };
    if arg.is_negative() {
        return Ok(invalid);
    }
    let root = RealInterval::from_rational(&arg).sqrt().expect("non-negative argument");
    let g = (RealInterval::from_rational(&(BigRational::from_integer(1.into()) - &pp)) - root).mul_rational(&rat(1, 2));
    let x = g.exp().mul_rational(&pp);
    if !(x.is_positive() && x.lt(&RealInterval::one())) {
        return Ok(invalid);
    }
    let pairs = (r * r.saturating_sub(1) / 2) as u64;
    let value = (RealInterval::one() - x).powu(pairs) * RealInterval::from_rational(&scale_factor(n, r));
    Ok(LsBound { value, valid: true })
}

/// Exact inputs to the Suen inequality for the attack-indicator family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuenParameters {
    /// `sum_i E I_i`
    pub mu: BigRational,
    /// `sum over adjacent unordered pairs {i, j} of E I_i I_j`
    pub big_delta: BigRational,
    /// `max_i sum_{j ~ i} E I_j`
    pub small_delta: BigRational,
}

/// `X = sum_{i<j} (n - i)(j - 1) / N^3`: probability that, given rook `a`,
/// rook `b` shares its row and rook `c` shares its column.
pub fn row_col_triple_probability(n: usize) -> BigRational {
    // sum over a = n - i in 1..n-1 of a * sum_{j=i+1}^{n} (j - 1)
    //   = n sum a^2 - (sum a^3 + sum a^2) / 2.
    let m = BigInt::from(n - 1);
    let s2 = &m * (&m + 1) * (&m * 2 + 1) / 6;
    let s1 = &m * (&m + 1) / 2;
    let s3 = &s1 * &s1;
    let numer = BigInt::from(n) * &s2 - (s3 + &s2) / 2;
    let nn = BigInt::from(n * (n - 1) / 2);
    BigRational::new(numer, &nn * &nn * &nn)
}

/// First kind uses the `C(r,2)` column indicators; second kind uses the row
/// and column indicators of every pair. Two indicators are adjacent when
/// their pairs share a rook (including the row/column indicators of one pair).
pub fn suen_parameters(kind: Kind, n: usize, r: usize) -> Result<SuenParameters> {
    let pp = PairProbabilities::new(n)?;
    let nn = int(n * (n - 1) / 2);
    let pairs = choose2(r);
    let triples = choose3(r);
    let (mu, big_delta, small_delta) = match kind {
        Kind::First => {
            // Three rooks in one column: sum_c (c-1)^3 / N^3 = 1/N.
            let big_delta = &triples * int(3) / &nn;
            let small_delta = if r >= 2 {
                &pp.p * int(2 * (r - 2))
            } else {
                BigRational::zero()
            };
            (&pairs * &pp.p, big_delta, small_delta)
        }
        Kind::Second => {
            let x = row_col_triple_probability(n);
            let shared = (int(2) / &nn + x * int(2)) * int(3) * &triples;
            let big_delta = &pairs / &nn + shared;
            let small_delta = if r >= 2 {
                &pp.p * int(4 * r - 7)
            } else {
                BigRational::zero()
            };
            (&pairs * &pp.p * int(2), big_delta, small_delta)
        }
    };
    Ok(SuenParameters {
        mu,
        big_delta,
        small_delta,
    })
}

/// Suen upper bound `K exp(-mu + Delta e^{2 delta})`; always valid.
pub fn suen_upper(kind: Kind, n: usize, k: usize) -> Result<LsBound> {
    let r = check_nk(n, k)?;
    let s = suen_parameters(kind, n, r)?;
    let growth = RealInterval::from_rational(&(&s.small_delta * int(2))).exp();
    let exponent = growth.mul_rational(&s.big_delta) - RealInterval::from_rational(&s.mu);
    let value = exponent.exp() * RealInterval::from_rational(&scale_factor(n, r));
    Ok(LsBound { value, valid: true })
}

/// The closed-form upper displays `K e^{-lambda} exp(c exp(2 (2r-3) p))`,
/// evaluated with both candidate constants. Reported only, never trusted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisplayedSuen {
    pub with_c2a: RealInterval,
    pub with_c3a: RealInterval,
}

pub fn suen_displayed(kind: Kind, n: usize, k: usize) -> Result<DisplayedSuen> {
    let r = check_nk(n, k)?;
    let pp = attack_probability(kind, n)?;
    let lambda = choose2(r) * &pp;
    let inner = RealInterval::from_rational(&(&pp * (int(4 * r) - int(6)))).exp();
    let scale = RealInterval::from_rational(&scale_factor(n, r));
    let base = (-RealInterval::from_rational(&lambda)).exp() * scale;
    let eval = |c: BigRational| &base * &inner.mul_rational(&c).exp();
    Ok(DisplayedSuen {
        with_c2a: eval(c2a(n, r)),
        with_c3a: eval(c3a(n, r)),
    })
}

/// Bound on the probability that the decoded structure is not of the
/// "blocks of size at most 3, one per alignment" shape, given no attack.
///
/// Partition: `(r^3 / (3 n^2)) / (exp(-lambda_R - lambda_C) - d)`.
/// Permutation: `(d / 2) / (exp(-lambda_C) - d)`.
/// Valid only when the denominator is certainly positive; otherwise the
/// value is the trivial bound 1.
pub fn conditional_tail_bound(model: Model, n: usize, k: usize) -> Result<LsBound> {
    let r = check_nk(n, k)?;
    let report = BoundReport::new(n, r)?;
    let (numer, rate) = match model {
        Model::Partition => (
            int(r * r * r) / (int(3 * n) * int(n)),
            &report.lambda_r + &report.lambda_c,
        ),
        Model::Permutation => (&report.d / int(2), report.lambda_c.clone()),
    };
    let denom = (-RealInterval::from_rational(&rate)).exp() - RealInterval::from_rational(&report.d);
    if !denom.is_positive() {
        return Ok(LsBound {
            value: RealInterval::one(),
            valid: false,
        });
    }
    let value = RealInterval::from_rational(&numer)
        .checked_div(&denom)
        .expect("positive denominator");
    Ok(LsBound { value, valid: true })
}

/// One row of the method comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompareRow {
    pub kind: Kind,
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub exact: BigInt,
    pub sandwich: SandwichBound,
    pub lll: LsBound,
    pub suen: LsBound,
}

pub const COMPARE_CSV_HEADER: &str = "kind,n,k,r,exact,sandwich_lower,sandwich_upper,sandwich_valid,lll_lower,lll_valid,suen_upper,suen_valid,rel_err_sandwich_lo,rel_err_sandwich_hi,rel_err_lll,rel_err_suen";

/// Significant digits used when rendering interval endpoints.
pub const ENDPOINT_DIGITS: usize = 17;

impl CompareRow {
    /// `bound / exact - 1`, or `None` when the exact value is zero.
    fn rel_err(&self, endpoint: &crate::interval::Dyadic) -> Option<f64> {
        if self.exact.is_zero() {
            return None;
        }
        let ratio = RealInterval::point(endpoint.clone()).checked_div(&RealInterval::from_int(self.exact.clone()))?;
        Some((ratio - RealInterval::one()).midpoint_f64())
    }

    pub fn rel_err_sandwich_lo(&self) -> Option<f64> {
        self.sandwich
            .valid
            .then(|| self.rel_err(self.sandwich.lower.lo()))
            .flatten()
    }

    pub fn rel_err_sandwich_hi(&self) -> Option<f64> {
        self.rel_err(self.sandwich.upper.hi())
    }

    pub fn rel_err_lll(&self) -> Option<f64> {
        self.lll.valid.then(|| self.rel_err(self.lll.value.lo())).flatten()
    }

    pub fn rel_err_suen(&self) -> Option<f64> {
        self.suen.valid.then(|| self.rel_err(self.suen.value.hi())).flatten()
    }

    /// CSV record matching [`COMPARE_CSV_HEADER`]; bounds are written as
    /// their outward endpoints, relative errors are blank when undefined.
    pub fn csv_record(&self) -> String {
        let lo = |iv: &RealInterval| iv.lo().to_sci_string(ENDPOINT_DIGITS, Round::Down);
        let hi = |iv: &RealInterval| iv.hi().to_sci_string(ENDPOINT_DIGITS, Round::Up);
        let rel = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        [
            self.kind.to_string(),
            self.n.to_string(),
            self.k.to_string(),
            self.r.to_string(),
            self.exact.to_string(),
            lo(&self.sandwich.lower),
            hi(&self.sandwich.upper),
            self.sandwich.valid.to_string(),
            lo(&self.lll.value),
            self.lll.valid.to_string(),
            hi(&self.suen.value),
            self.suen.valid.to_string(),
            rel(self.rel_err_sandwich_lo()),
            rel(self.rel_err_sandwich_hi()),
            rel(self.rel_err_lll()),
            rel(self.rel_err_suen()),
        ]
        .join(",")
    }
}

/// Sandwich, local lemma and Suen bounds against the exact value for every
/// `k` in `k_min..=k_max`, rows ordered by increasing `r`.
pub fn compare_table(kind: Kind, n: usize, k_min: usize, k_max: usize) -> Result<Vec<CompareRow>> {
    if n > COMPARE_N_MAX {
        return Err(Error::domain(
            "n",
            format!("compare tables are limited to n <= {COMPARE_N_MAX}"),
        ));
    }
    if k_min > k_max {
        return Err(Error::domain("k-min", format!("k-min {k_min} exceeds k-max {k_max}")));
    }
    check_nk(n, k_min)?;
    check_nk(n, k_max)?;
    let exact = diagonal(kind, n, n - k_min);
    (k_min..=k_max)
        .rev()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|k| {
            let r = n - k;
            Ok(CompareRow {
                kind,
                n,
                k,
                r,
                exact: exact[r].clone(),
                sandwich: sandwich(kind, n, k)?,
                lll: lll_lower(kind, n, k)?,
                suen: suen_upper(kind, n, k)?,
            })
        })
        .collect()
}
