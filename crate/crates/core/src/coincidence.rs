//! The iid rook model: `r` labeled rooks dropped independently and uniformly
//! on the `N = C(n, 2)` squares of `B_n`, and their pairwise coincidences.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::distr::{Distribution, Uniform};
use rand::Rng;

use crate::error::{Error, Result};
use crate::law::FiniteLaw;
use crate::rook_board::{board_squares, classify_pair, Mark, RookPlacement, Square};
use crate::sampling::run_sharded;
use crate::stirling::{factorial, stirling};
use crate::Model;

/// Default cap on `C(n, 2)^r` for exhaustive enumeration.
pub const DEFAULT_EXHAUSTIVE_CAP: u128 = 10_000_000;

/// Coincidence counts over unordered rook pairs plus the overlap counts.
///
/// `r2` counts unordered pairs of alignment indicators (`RC` or `CR`) that
/// share a rook; `r1` additionally counts pairs made of an `RR` indicator and
/// an `RR`, `RC` or `CR` indicator sharing a rook.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoincidenceVector {
    pub w_rr: u64,
    pub w_cc: u64,
    pub w_rc: u64,
    pub w_cr: u64,
    pub r1: u64,
    pub r2: u64,
}

impl CoincidenceVector {
    /// `W_L = W_RC + W_CR`
    pub fn w_l(&self) -> u64 {
        self.w_rc + self.w_cr
    }

    /// `W_P = W_RC + W_CR + W_RR`
    pub fn w_p(&self) -> u64 {
        self.w_rc + self.w_cr + self.w_rr
    }

    /// `(W_RR, W_CC, W_RC, W_CR)`
    pub fn marks(&self) -> [u64; 4] {
        [self.w_rr, self.w_cc, self.w_rc, self.w_cr]
    }

    pub fn get(&self, mark: Mark) -> u64 {
        match mark {
            Mark::RR => self.w_rr,
            Mark::CC => self.w_cc,
            Mark::RC => self.w_rc,
            Mark::CR => self.w_cr,
        }
    }

    /// No attack in `model`.
    pub fn is_non_attacking(&self, model: Model) -> bool {
        match model {
            Model::Partition => self.w_rr + self.w_cc == 0,
            Model::Permutation => self.w_cc == 0,
        }
    }
}

/// Coincidence statistics of a placement, in `O(r^2)`.
pub fn coincidence_vector(placement: &RookPlacement) -> CoincidenceVector {
    let rooks = placement.rooks();
    let r = rooks.len();
    let mut v = CoincidenceVector::default();
    let mut align = vec![0u64; r];
    let mut same_row = vec![0u64; r];
    for a in 0..r {
        for b in a + 1..r {
            let marks = classify_pair(rooks[a], rooks[b]);
            if marks.is_empty() {
                continue;
            }
            if marks.contains(Mark::RR) {
                v.w_rr += 1;
                same_row[a] += 1;
                same_row[b] += 1;
            }
            if marks.contains(Mark::CC) {
                v.w_cc += 1;
            }
            if marks.contains(Mark::RC) {
                v.w_rc += 1;
            }
            if marks.contains(Mark::CR) {
                v.w_cr += 1;
            }
            if marks.contains(Mark::RC) || marks.contains(Mark::CR) {
                align[a] += 1;
                align[b] += 1;
            }
        }
    }
    // Two distinct pairs share at most one rook, so counting per rook counts
    // each overlapping pair of indicators once.
    for x in 0..r {
        let (a, m) = (align[x], same_row[x]);
        v.r2 += a * a.saturating_sub(1) / 2;
        v.r1 += m * m.saturating_sub(1) / 2 + m * a;
    }
    v.r1 += v.r2;
    v
}

/// Exact pairwise probabilities for two iid uniform rooks on `B_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairProbabilities {
    pub n: usize,
    /// Same row (equivalently, same column).
    pub p: BigRational,
    /// `col(a) = row(b)`.
    pub q: BigRational,
    /// `2 C(n,3) / C(N,2) + 1/N`, taken verbatim; the first term is 0 when `N = 1`.
    pub p2_paper: BigRational,
    /// Same row or column under iid sampling with replacement.
    pub p2_iid: BigRational,
}

impl PairProbabilities {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("n", format!("need n >= 2, got {n}")));
        }
        let big = |v: usize| BigInt::from(v);
        let nn = big(n * (n - 1) / 2);
        let n_sq = &nn * &nn;
        // Row i holds n - i squares; sum of squares of 1..n-1.
        let sum_sq = big((n - 1) * n * (2 * n - 1) / 6);
        let c3 = big(n * (n - 1) * (n - 2) / 6);
        let p = BigRational::new(sum_sq.clone(), n_sq.clone());
        let q = BigRational::new(c3.clone(), n_sq.clone());
        let pairs: BigInt = &nn * (&nn - 1u32) / 2u32;
        let distinct = if pairs.is_zero() {
            BigRational::zero()
        } else {
            BigRational::new(c3 * 2, pairs)
        };
        let p2_paper = distinct + BigRational::new(BigInt::one(), nn.clone());
        let p2_iid = BigRational::new(sum_sq * 2 - &nn, n_sq);
        Ok(PairProbabilities {
            n,
            p,
            q,
            p2_paper,
            p2_iid,
        })
    }
}

/// Uniform sampler over the squares of `B_n`.
#[derive(Clone, Debug)]
pub struct SquareSampler {
    n: usize,
    index: Uniform<u64>,
    /// `row_start[i]` is the row-major index of `(i + 1, i + 2)`.
    row_start: Vec<u64>,
}

impl SquareSampler {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("n", format!("need n >= 2, got {n}")));
        }
        let total = (n * (n - 1) / 2) as u64;
        let mut row_start = Vec::with_capacity(n - 1);
        let mut acc = 0u64;
        for i in 1..n {
            row_start.push(acc);
            acc += (n - i) as u64;
        }
        let index = Uniform::new(0, total).expect("board is non-empty");
        Ok(SquareSampler { n, index, row_start })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Square with row-major index `idx`.
    pub fn unrank(&self, idx: u64) -> Square {
        let i = self.row_start.partition_point(|&s| s <= idx);
        let offset = idx - self.row_start[i - 1];
        Square::new(i, i + 1 + offset as usize)
    }
}

impl Distribution<Square> for SquareSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Square {
        self.unrank(self.index.sample(rng))
    }
}

/// `r` squares drawn independently and uniformly from `B_n`.
pub fn sample_iid_placement<R: Rng + ?Sized>(n: usize, r: usize, rng: &mut R) -> Result<RookPlacement> {
    let sampler = SquareSampler::new(n)?;
    Ok(sample_with(&sampler, r, rng))
}

pub(crate) fn sample_with<R: Rng + ?Sized>(sampler: &SquareSampler, r: usize, rng: &mut R) -> RookPlacement {
    let rooks = (0..r).map(|_| sampler.sample(rng)).collect();
    RookPlacement::from_parts_unchecked(sampler.n(), rooks)
}

/// Exact law of the coincidence vector over all `C(n,2)^r` labeled placements.
pub fn exhaustive_coincidence_law(n: usize, r: usize, cap: u128) -> Result<FiniteLaw<CoincidenceVector>> {
    if n < 2 {
        return Err(Error::domain("n", format!("need n >= 2, got {n}")));
    }
    let squares = board_squares(n);
    let total = (squares.len() as u128).checked_pow(r as u32).unwrap_or(u128::MAX);
    if total > cap {
        return Err(Error::WorkCapExceeded {
            what: "C(n,2)^r",
            count: total,
            cap,
        });
    }
    let mut tally: HashMap<CoincidenceVector, u64> = HashMap::new();
    let mut digits = vec![0usize; r];
    let mut rooks = vec![squares[0]; r];
    loop {
        for (slot, &d) in rooks.iter_mut().zip(&digits) {
            *slot = squares[d];
        }
        let placement = RookPlacement::from_parts_unchecked(n, rooks.clone());
        *tally.entry(coincidence_vector(&placement)).or_default() += 1;
        let mut i = 0;
        loop {
            if i == r {
                return Ok(FiniteLaw::from_counts(tally));
            }
            digits[i] += 1;
            if digits[i] < squares.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// `P(no attack)` for `r` iid rooks: `r! S(n, n-r) / N^r` (partition) or
/// `r! s(n, n-r) / N^r` (permutation).
pub fn no_attack_probability(model: Model, n: usize, r: usize) -> Result<BigRational> {
    if n < 2 {
        return Err(Error::domain("n", format!("need n >= 2, got {n}")));
    }
    if r >= n {
        return Err(Error::domain("r", format!("need r < n, got r = {r}, n = {n}")));
    }
    let nn = BigInt::from(n * (n - 1) / 2);
    let num = factorial(r) * stirling(model.kind(), n, n - r);
    Ok(BigRational::new(num, num_traits::pow(nn, r)))
}

/// Monte Carlo sums of the four mark counts and of the no-attack events.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoincidenceMoments {
    pub samples: u64,
    /// Indexed as [`CoincidenceVector::marks`].
    pub sum: [u64; 4],
    pub sum_sq: [u64; 4],
    pub no_attack_partition: u64,
    pub no_attack_permutation: u64,
}

impl CoincidenceMoments {
    pub fn record(&mut self, v: &CoincidenceVector) {
        self.samples += 1;
        for (i, w) in v.marks().into_iter().enumerate() {
            self.sum[i] += w;
            self.sum_sq[i] += w * w;
        }
        self.no_attack_partition += u64::from(v.is_non_attacking(Model::Partition));
        self.no_attack_permutation += u64::from(v.is_non_attacking(Model::Permutation));
    }

    pub fn merge(&mut self, other: &CoincidenceMoments) {
        self.samples += other.samples;
        for i in 0..4 {
            self.sum[i] += other.sum[i];
            self.sum_sq[i] += other.sum_sq[i];
        }
        self.no_attack_partition += other.no_attack_partition;
        self.no_attack_permutation += other.no_attack_permutation;
    }

    pub fn mean(&self, mark: Mark) -> f64 {
        self.sum[mark as usize] as f64 / self.samples as f64
    }

    /// Standard error of [`Self::mean`] from the sample variance.
    pub fn std_err(&self, mark: Mark) -> f64 {
        let n = self.samples as f64;
        let m = self.mean(mark);
        let var = (self.sum_sq[mark as usize] as f64 / n - m * m) * n / (n - 1.0);
        (var.max(0.0) / n).sqrt()
    }

    pub fn no_attack_frequency(&self, model: Model) -> f64 {
        let hits = match model {
            Model::Partition => self.no_attack_partition,
            Model::Permutation => self.no_attack_permutation,
        };
        hits as f64 / self.samples as f64
    }
}

/// Samples `samples` iid placements across `shards` deterministic streams.
pub fn sample_coincidence_moments(
    n: usize,
    r: usize,
    samples: u64,
    seed: u64,
    shards: u64,
) -> Result<CoincidenceMoments> {
    let sampler = SquareSampler::new(n)?;
    let parts = run_sharded(seed, shards, samples, |rng, count| {
        let mut m = CoincidenceMoments::default();
        for _ in 0..count {
            m.record(&coincidence_vector(&sample_with(&sampler, r, rng)));
        }
        Ok(m)
    })?;
    let mut total = CoincidenceMoments::default();
    for p in &parts {
        total.merge(p);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rook_board::{decode, has_attack};
    use crate::sampling::shard_rng;
    use proptest::prelude::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn cv(w: [u64; 4]) -> CoincidenceVector {
        CoincidenceVector {
            w_rr: w[0],
            w_cc: w[1],
            w_rc: w[2],
            w_cr: w[3],
            r1: 0,
            r2: 0,
        }
    }

    #[test]
    fn pair_probabilities_examples() {
        let p6 = PairProbabilities::new(6).unwrap();
        assert_eq!(p6.p, q(11, 45));
        assert_eq!(p6.q, q(4, 45));
        let p2 = PairProbabilities::new(2).unwrap();
        assert_eq!(p2.p, q(1, 1));
        assert_eq!(p2.q, q(0, 1));
        assert_eq!(p2.p2_paper, q(1, 1));
        let p3 = PairProbabilities::new(3).unwrap();
        assert_eq!(p3.p2_paper, q(1, 1));
        assert_eq!(p3.p2_iid, q(7, 9));
    }

    #[test]
    fn pair_probabilities_match_closed_forms_and_brute_force() {
        for n in 2..=12usize {
            let pp = PairProbabilities::new(n).unwrap();
            let nf = BigRational::from_integer(n.into());
            let one = BigRational::one();
            let half = q(1, 2);
            let closed_p = q(4, 3) / &nf * (&nf - &half) / (&nf - &one);
            let closed_q = q(2, 3) / &nf * (&nf - BigRational::from_integer(2.into())) / (&nf - &one);
            assert_eq!(pp.p, closed_p);
            assert_eq!(pp.q, closed_q);
            // Ordered pairs of squares, with replacement.
            let squares = board_squares(n);
            let (mut rr, mut rc, mut attack) = (0i64, 0i64, 0i64);
            for &a in &squares {
                for &b in &squares {
                    let m = classify_pair(a, b);
                    rr += i64::from(m.contains(Mark::RR));
                    rc += i64::from(m.contains(Mark::RC));
                    attack += i64::from(m.contains(Mark::RR) || m.contains(Mark::CC));
                }
            }
            let total = (squares.len() * squares.len()) as i64;
            assert_eq!(pp.p, q(rr, total));
            assert_eq!(pp.q, q(rc, total));
            assert_eq!(pp.p2_iid, q(attack, total));
        }
    }

    #[test]
    fn exhaustive_examples() {
        let law = exhaustive_coincidence_law(2, 2, DEFAULT_EXHAUSTIVE_CAP).unwrap();
        assert_eq!(law.map(|v| v.marks()), FiniteLaw::point_mass([1, 1, 0, 0]));
        let law = exhaustive_coincidence_law(3, 2, DEFAULT_EXHAUSTIVE_CAP)
            .unwrap()
            .map(|v| cv(v.marks()));
        assert_eq!(law.get(&cv([1, 1, 0, 0])), q(3, 9));
        assert_eq!(law.get(&cv([1, 0, 0, 0])), q(2, 9));
        assert_eq!(law.get(&cv([0, 1, 0, 0])), q(2, 9));
        assert_eq!(law.get(&cv([0, 0, 1, 0])), q(1, 9));
        assert_eq!(law.get(&cv([0, 0, 0, 1])), q(1, 9));
        let law = exhaustive_coincidence_law(5, 2, DEFAULT_EXHAUSTIVE_CAP).unwrap();
        assert_eq!(law.probability(|v| v.is_non_attacking(Model::Partition)), q(1, 2));
        assert!(matches!(
            exhaustive_coincidence_law(10, 5, DEFAULT_EXHAUSTIVE_CAP),
            Err(Error::WorkCapExceeded { .. })
        ));
    }

    #[test]
    fn no_attack_examples() {
        assert_eq!(no_attack_probability(Model::Partition, 5, 2).unwrap(), q(1, 2));
        assert_eq!(no_attack_probability(Model::Permutation, 5, 2).unwrap(), q(7, 10));
        assert_eq!(no_attack_probability(Model::Permutation, 9, 0).unwrap(), q(1, 1));
        assert!(no_attack_probability(Model::Partition, 5, 5).is_err());
    }

    #[test]
    fn marginals_and_identities_small() {
        for n in 2..=7 {
            let pp = PairProbabilities::new(n).unwrap();
            for r in 0..=3usize {
                if r >= n {
                    continue;
                }
                let law = exhaustive_coincidence_law(n, r, DEFAULT_EXHAUSTIVE_CAP).unwrap();
                let pairs = BigRational::from_integer((r * r.saturating_sub(1) / 2).into());
                let mean = |m: Mark| law.expectation(|v| BigRational::from_integer(v.get(m).into()));
                assert_eq!(mean(Mark::RR), &pairs * &pp.p);
                assert_eq!(mean(Mark::CC), &pairs * &pp.p);
                assert_eq!(mean(Mark::RC), &pairs * &pp.q);
                assert_eq!(mean(Mark::CR), &pairs * &pp.q);
                for model in [Model::Partition, Model::Permutation] {
                    assert_eq!(
                        law.probability(|v| v.is_non_attacking(model)),
                        no_attack_probability(model, n, r).unwrap()
                    );
                }
                let bound = q((r * r * r) as i64, 3 * (n * n) as i64);
                assert!(law.expectation(|v| BigRational::from_integer(v.r2.into())) <= bound);
            }
        }
    }

    #[test]
    fn structure_equivalence_small() {
        // Non-attacking placements: all components have size <= 3 and the
        // size-3 count equals W_L / W_P exactly when R_2 / R_1 vanish.
        for n in 2..=7 {
            let squares = board_squares(n);
            for r in 0..=3usize.min(n - 1) {
                let total = squares.len().pow(r as u32);
                for mut idx in 0..total {
                    let mut rooks = Vec::with_capacity(r);
                    for _ in 0..r {
                        rooks.push(squares[idx % squares.len()]);
                        idx /= squares.len();
                    }
                    let p = RookPlacement::new(n, rooks).unwrap();
                    let v = coincidence_vector(&p);
                    for model in [Model::Partition, Model::Permutation] {
                        if has_attack(&p, model) {
                            continue;
                        }
                        let spec = decode(&p, model).unwrap().spectrum();
                        let (w, overlap) = match model {
                            Model::Partition => (v.w_l(), v.r2),
                            Model::Permutation => (v.w_p(), v.r1),
                        };
                        let small = spec.largest_component() <= 3 && spec.get(3) == w;
                        assert_eq!(small, overlap == 0, "{p} {model} {v:?} {spec}");
                    }
                }
            }
        }
    }

    #[test]
    fn sampler_reproducible_and_uniform() {
        let s = SquareSampler::new(6).unwrap();
        let draw = |seed| (0..2).map(|_| s.sample(&mut shard_rng(seed, 0))).collect::<Vec<_>>();
        assert_eq!(draw(3), draw(3));
        let all = board_squares(6);
        for (idx, sq) in all.iter().enumerate() {
            assert_eq!(s.unrank(idx as u64), *sq);
        }
        // Chi-square against uniform(15) over 1e5 draws, 4-sigma threshold.
        let mut rng = shard_rng(11, 0);
        let mut counts = [0u64; 15];
        let draws = 100_000u64;
        for _ in 0..draws {
            counts[s.sample(&mut rng).index(6)] += 1;
        }
        let expected = draws as f64 / 15.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 14 degrees of freedom: mean 14, sd sqrt(28).
        assert!(chi2 < 14.0 + 4.0 * 28f64.sqrt(), "chi2 = {chi2}");
    }

    #[test]
    fn sampler_small_boards() {
        let mut rng = shard_rng(5, 0);
        let p = sample_iid_placement(2, 3, &mut rng).unwrap();
        assert!(p.rooks().iter().all(|s| *s == Square::new(1, 2)));
        let s3 = SquareSampler::new(3).unwrap();
        let mut counts = [0u64; 3];
        let draws = 100_000;
        for _ in 0..draws {
            counts[s3.sample(&mut rng).index(3)] += 1;
        }
        let sd = (draws as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for c in counts {
            assert!((c as f64 - draws as f64 / 3.0).abs() < 4.0 * sd);
        }
    }

    #[test]
    fn moments_depend_only_on_seed_and_shards() {
        let a = sample_coincidence_moments(30, 5, 2_000, 9, 3).unwrap();
        let b = sample_coincidence_moments(30, 5, 2_000, 9, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.samples, 2_000);
    }

    proptest! {
        #[test]
        fn overlap_counts_are_ordered(n in 2usize..12, seed in any::<u64>(), r in 0usize..10) {
            let mut rng = shard_rng(seed, 0);
            let p = sample_iid_placement(n, r, &mut rng).unwrap();
            let v = coincidence_vector(&p);
            let pairs = (r * r.saturating_sub(1) / 2) as u64;
            prop_assert!(v.r2 <= v.r1);
            for w in v.marks() {
                prop_assert!(w <= pairs);
            }
            prop_assert_eq!(v.w_p(), v.w_l() + v.w_rr);
        }
    }
}
