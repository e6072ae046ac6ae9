//! Block/cycle spectra of uniform structures: the Poisson approximation,
//! exact total variation at small `n`, and rejection sampling at large `n`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::distr::Distribution;
use rand::Rng;

use crate::coincidence::SquareSampler;
use crate::error::{Error, Result};
use crate::interval::RealInterval;
use crate::law::FiniteLaw;
use crate::rook_board::{spectrum_of_placement, RookPlacement, Square};
use crate::sampling::run_sharded;
use crate::stirling::exact_spectrum_law;
use crate::structures::{SpectrumLaw, SpectrumVector};
use crate::Model;

/// Attempts allowed per accepted sample before giving up.
pub const DEFAULT_ATTEMPT_CAP: u64 = 1_000_000;

pub const SPECTRUM_CSV_HEADER: &str = "spectrum,probability";

/// How a Poisson count `Z` is turned into a spectrum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum VectorForm {
    /// `(2k - n + Z, n - k - 2Z, Z, 0, ...)`: keeps `sum D_i = k` and
    /// `sum i D_i = n`, each alignment merging two 2-blocks into a 3-block.
    #[default]
    Corrected,
    /// `(n - 2k + Z, k - 2Z, Z, 0, ...)` as printed; violates both
    /// conservation identities and is kept only for comparison.
    AsDisplayed,
}

/// Law of `vector_map(Z)` with `Z ~ Poisson(rate)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxSpectrumLaw {
    pub model: Model,
    pub n: usize,
    pub k: usize,
    /// `(2/3) r^2 / n` for partitions, `(4/3) r^2 / n` for permutations.
    pub rate: BigRational,
    pub form: VectorForm,
}

pub fn approx_law(model: Model, n: usize, k: usize) -> Result<ApproxSpectrumLaw> {
    if k == 0 || k > n {
        return Err(Error::domain("k", format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let r = n - k;
    let coef = match model {
        Model::Partition => 2,
        Model::Permutation => 4,
    };
    let rate = BigRational::new((coef * r * r).into(), (3 * n).into());
    Ok(ApproxSpectrumLaw {
        model,
        n,
        k,
        rate,
        form: VectorForm::Corrected,
    })
}

impl ApproxSpectrumLaw {
    pub fn with_form(mut self, form: VectorForm) -> Self {
        self.form = form;
        self
    }

    /// The first three coordinates for `Z = z`, possibly negative.
    pub fn coordinates(&self, z: u64) -> [i128; 3] {
        let (n, k, z) = (self.n as i128, self.k as i128, z as i128);
        match self.form {
            VectorForm::Corrected => [2 * k - n + z, n - k - 2 * z, z],
            VectorForm::AsDisplayed => [n - 2 * k + z, k - 2 * z, z],
        }
    }

    /// Spectrum for `Z = z`, or `None` if a coordinate is negative.
    pub fn vector_map(&self, z: u64) -> Option<SpectrumVector> {
        let c = self.coordinates(z);
        if c.iter().any(|&x| x < 0) {
            return None;
        }
        Some(SpectrumVector::from_counts(c.iter().map(|&x| x as u64).collect()))
    }

    /// Values of `z` whose image is a legal count vector, in increasing order.
    pub fn legal_range(&self) -> std::ops::RangeInclusive<u64> {
        // Coordinates are affine in z: the first grows, the second shrinks.
        let c0 = self.coordinates(0);
        let lo = (-c0[0]).max(0);
        let hi = c0[1].div_euclid(2);
        if hi < lo {
            #[allow(clippy::reversed_empty_ranges)]
            return 1..=0;
        }
        lo as u64..=hi as u64
    }

    pub fn poisson(&self) -> PoissonPmf {
        PoissonPmf::new(&self.rate)
    }
}

/// Rigorous Poisson point probabilities, computed incrementally.
#[derive(Clone, Debug)]
pub struct PoissonPmf {
    rate: RealInterval,
    z: u64,
    current: RealInterval,
}

impl PoissonPmf {
    pub fn new(rate: &BigRational) -> Self {
        let rate = RealInterval::from_rational(rate);
        let current = (-rate.clone()).exp();
        PoissonPmf { rate, z: 0, current }
    }

    /// `P(Z = z)`; `z` must not decrease between calls.
    pub fn at(&mut self, z: u64) -> RealInterval {
        assert!(z >= self.z, "Poisson pmf queried out of order");
        while self.z < z {
            self.z += 1;
            self.current = (&self.current * &self.rate)
                .checked_div(&RealInterval::from_int(self.z))
                .expect("positive divisor");
        }
        self.current.clone()
    }
}

/// Exact `d_TV` between the spectrum of a uniform structure and the
/// approximating law, with the full Poisson mass of unmatched `Z` values
/// counted as discrepancy.
pub fn tv_spectrum_exact(model: Model, n: usize, k: usize, cap: usize) -> Result<RealInterval> {
    tv_spectrum_exact_with(model, n, k, cap, VectorForm::Corrected)
}

pub fn tv_spectrum_exact_with(model: Model, n: usize, k: usize, cap: usize, form: VectorForm) -> Result<RealInterval> {
    let exact = exact_spectrum_law(model, n, k, cap)?;
    let approx = approx_law(model, n, k)?.with_form(form);
    Ok(tv_against_approx(&exact, &approx))
}

/// `d_TV(exact, approx)` for any finite law on spectra.
pub fn tv_against_approx(exact: &SpectrumLaw, approx: &ApproxSpectrumLaw) -> RealInterval {
    let mut pmf = approx.poisson();
    let mut matched = BTreeMap::new();
    let mut legal_mass = RealInterval::zero();
    for z in approx.legal_range() {
        let pz = pmf.at(z);
        legal_mass = &legal_mass + &pz;
        let v = approx.vector_map(z).expect("z in legal range");
        matched.insert(v, pz);
    }
    let mut acc = RealInterval::one() - legal_mass;
    for (v, pz) in &matched {
        let pe = RealInterval::from_rational(&exact.get(v));
        acc = &acc + &(&pe - pz).abs();
    }
    for (v, m) in exact.iter() {
        if !matched.contains_key(v) {
            acc = acc.add_rational(m);
        }
    }
    acc.mul_rational(&BigRational::new(1.into(), 2.into()))
}

/// `d_TV` between a finite law on counts and `Poisson(rate)`.
pub fn tv_to_poisson(law: &FiniteLaw<u64>, rate: &BigRational) -> RealInterval {
    let mut pmf = PoissonPmf::new(rate);
    let mut covered = RealInterval::zero();
    let mut acc = RealInterval::zero();
    for (&z, m) in law.iter() {
        let pz = pmf.at(z);
        covered = &covered + &pz;
        acc = &acc + &(RealInterval::from_rational(m) - pz).abs();
    }
    acc = &acc + &(RealInterval::one() - covered);
    acc.mul_rational(&BigRational::new(1.into(), 2.into()))
}

/// Draws iid placements of `r = n - k` rooks until one has no attack.
///
/// Squares are drawn one at a time and the attempt is abandoned at the
/// first attack, so a rejected attempt costs only as many draws as it took
/// to find the clash. Row and column marks are cleared by generation stamps.
#[derive(Clone, Debug)]
pub struct RejectionSampler {
    model: Model,
    n: usize,
    r: usize,
    squares: Option<SquareSampler>,
    row_stamp: Vec<u64>,
    col_stamp: Vec<u64>,
    generation: u64,
    attempt_cap: u64,
}

impl RejectionSampler {
    pub fn new(model: Model, n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::domain("k", format!("need 1 <= k <= n, got k = {k}, n = {n}")));
        }
        let squares = if n >= 2 { Some(SquareSampler::new(n)?) } else { None };
        Ok(RejectionSampler {
            model,
            n,
            r: n - k,
            squares,
            row_stamp: vec![0; n + 1],
            col_stamp: vec![0; n + 1],
            generation: 0,
            attempt_cap: DEFAULT_ATTEMPT_CAP,
        })
    }

    pub fn with_attempt_cap(mut self, cap: u64) -> Self {
        self.attempt_cap = cap;
        self
    }

    /// An accepted placement and the number of attempts it took.
    pub fn sample_placement<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(RookPlacement, u64)> {
        let Some(squares) = self.squares.as_ref() else {
            return Ok((RookPlacement::new(self.n, Vec::new())?, 1));
        };
        let mut rooks: Vec<Square> = Vec::with_capacity(self.r);
        for attempt in 1..=self.attempt_cap {
            self.generation += 1;
            let g = self.generation;
            rooks.clear();
            let mut ok = true;
            for _ in 0..self.r {
                let s = squares.sample(rng);
                if self.col_stamp[s.col] == g || (self.model == Model::Partition && self.row_stamp[s.row] == g) {
                    ok = false;
                    break;
                }
                self.col_stamp[s.col] = g;
                self.row_stamp[s.row] = g;
                rooks.push(s);
            }
            if ok {
                return Ok((RookPlacement::new(self.n, rooks)?, attempt));
            }
        }
        Err(Error::AttemptCapExceeded(self.attempt_cap))
    }

    /// Spectrum of a uniform structure and the number of attempts.
    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(SpectrumVector, u64)> {
        let (placement, attempts) = self.sample_placement(rng)?;
        Ok((spectrum_of_placement(&placement, self.model)?, attempts))
    }
}

/// One exactly uniform spectrum sample with `k` components.
pub fn rejection_sample<R: Rng + ?Sized>(
    model: Model,
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<(SpectrumVector, u64)> {
    RejectionSampler::new(model, n, k)?.sample(rng)
}

/// Tallied rejection samples.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EmpiricalSpectrum {
    pub sample_count: u64,
    pub attempts: u64,
    pub frequencies: BTreeMap<SpectrumVector, u64>,
}

impl EmpiricalSpectrum {
    pub fn record(&mut self, v: SpectrumVector, attempts: u64) {
        self.sample_count += 1;
        self.attempts += attempts;
        *self.frequencies.entry(v).or_default() += 1;
    }

    pub fn merge(&mut self, other: &EmpiricalSpectrum) {
        self.sample_count += other.sample_count;
        self.attempts += other.attempts;
        for (v, c) in &other.frequencies {
            *self.frequencies.entry(v.clone()).or_default() += c;
        }
    }

    /// Accepted over attempted.
    pub fn acceptance_rate(&self) -> BigRational {
        if self.attempts == 0 {
            return BigRational::zero();
        }
        BigRational::new(self.sample_count.into(), self.attempts.into())
    }

    pub fn law(&self) -> SpectrumLaw {
        SpectrumLaw::from_counts(self.frequencies.iter().map(|(v, &c)| (v.clone(), c)))
    }

    /// Empirical law of `D_size`.
    pub fn component_law(&self, size: usize) -> FiniteLaw<u64> {
        let mut tally: BTreeMap<u64, u64> = BTreeMap::new();
        for (v, &c) in &self.frequencies {
            *tally.entry(v.get(size)).or_default() += c;
        }
        FiniteLaw::from_counts(tally)
    }

    /// Fraction of samples with a component of size `>= size`.
    pub fn frequency_with_component_at_least(&self, size: usize) -> f64 {
        let hits: u64 = self
            .frequencies
            .iter()
            .filter(|(v, _)| v.largest_component() >= size)
            .map(|(_, &c)| c)
            .sum();
        hits as f64 / self.sample_count as f64
    }

    /// CSV rows (without header) in spectrum order.
    pub fn csv_rows(&self) -> Vec<String> {
        law_csv_rows(&self.law())
    }
}

/// Rejection samples spread over `shards` deterministic streams.
pub fn empirical_spectrum(
    model: Model,
    n: usize,
    k: usize,
    samples: u64,
    seed: u64,
    shards: u64,
) -> Result<EmpiricalSpectrum> {
    if samples == 0 {
        return Err(Error::domain("samples", "need at least one sample"));
    }
    let sampler = RejectionSampler::new(model, n, k)?;
    let parts = run_sharded(seed, shards, samples, |rng, count| {
        let mut local = sampler.clone();
        let mut out = EmpiricalSpectrum::default();
        for _ in 0..count {
            let (v, attempts) = local.sample(rng)?;
            out.record(v, attempts);
        }
        Ok(out)
    })?;
    let mut total = EmpiricalSpectrum::default();
    for p in &parts {
        total.merge(p);
    }
    Ok(total)
}

/// `spectrum,probability` rows; probabilities in shortest round-trip form.
pub fn law_csv_rows(law: &SpectrumLaw) -> Vec<String> {
    law.iter()
        .map(|(v, m)| format!("{v},{}", m.to_f64().unwrap_or(f64::NAN)))
        .collect()
}
