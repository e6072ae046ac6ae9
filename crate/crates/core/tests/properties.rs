//! Statistical and qualitative invariants at their stated scale.

use num_traits::ToPrimitive;

use rookstat_core::coincidence::{no_attack_probability, sample_coincidence_moments, PairProbabilities};
use rookstat_core::rook_board::Mark;
use rookstat_core::spectra::{empirical_spectrum, tv_spectrum_exact};
use rookstat_core::stirling::DEFAULT_ENUM_CAP;
use rookstat_core::Model;

#[test]
fn acceptance_rate_tracks_no_attack_probability() {
    for (n, k) in [(8usize, 5usize), (400, 380)] {
        let samples = 100_000u64;
        let e = empirical_spectrum(Model::Partition, n, k, samples, 11, 8).unwrap();
        let p = no_attack_probability(Model::Partition, n, n - k)
            .unwrap()
            .to_f64()
            .unwrap();
        let m = samples as f64;
        // Mean attempts per sample is geometric with mean 1/p and sd sqrt(1-p)/p.
        let mean_attempts = e.attempts as f64 / m;
        let se = (1.0 - p).sqrt() / p / m.sqrt();
        assert!(
            (mean_attempts - 1.0 / p).abs() < 4.0 * se,
            "({n},{k}): {mean_attempts} vs {}",
            1.0 / p
        );
    }
}

#[test]
fn four_statistic_means_at_scale() {
    let (n, r) = (400usize, 20usize);
    let m = sample_coincidence_moments(n, r, 100_000, 3, 8).unwrap();
    let pp = PairProbabilities::new(n).unwrap();
    let pairs = (r * (r - 1) / 2) as f64;
    let p = pp.p.to_f64().unwrap();
    let q = pp.q.to_f64().unwrap();
    for (mark, want) in [
        (Mark::RR, pairs * p),
        (Mark::CC, pairs * p),
        (Mark::RC, pairs * q),
        (Mark::CR, pairs * q),
    ] {
        let got = m.mean(mark);
        assert!((got - want).abs() <= 4.0 * m.std_err(mark), "{mark:?}: {got} vs {want}");
    }
}

#[test]
fn spectrum_tv_shrinks_along_sqrt_regime() {
    for model in [Model::Partition, Model::Permutation] {
        let tvs: Vec<f64> = [8usize, 10, 12]
            .iter()
            .map(|&n| {
                let r = (n as f64).sqrt().floor() as usize;
                tv_spectrum_exact(model, n, n - r, DEFAULT_ENUM_CAP)
                    .unwrap()
                    .midpoint_f64()
            })
            .collect();
        assert!(tvs.windows(2).all(|w| w[1] <= w[0]), "{model}: {tvs:?}");
    }
}
