mod common;

use common::*;
use driftwatch_core::{
    build_empirical_cdf, build_histogram, kl_divergence, ks_statistic, merge_supports, min_max_normalize,
    pearson_correlation, wasserstein1, DiscretePmf, EdgePolicy, HistogramSpec,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cdf(x: &[f64]) -> driftwatch_core::EmpiricalCdf {
    build_empirical_cdf(x).unwrap()
}

#[test]
fn wasserstein_matches_brute_force_transport() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let a = small_sample(&mut rng);
        let b = small_sample(&mut rng);
        let w = wasserstein1(&cdf(&a), &cdf(&b));
        let oracle = brute_force_ot(&a, &b);
        assert!((w - oracle).abs() <= 1e-9, "{a:?} {b:?}: {w} vs {oracle}");
    }
}

#[test]
fn ks_matches_exhaustive_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let a = small_sample(&mut rng);
        let b = small_sample(&mut rng);
        assert_eq!(ks_statistic(&cdf(&a), &cdf(&b)), ks_scan(&a, &b), "{a:?} {b:?}");
    }
}

#[test]
fn kl_matches_direct_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let n = 1 + (rand::Rng::random_range(&mut rng, 0..8));
        let support: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let p = positive_pmf(&mut rng, n);
        let q = positive_pmf(&mut rng, n);
        let d = kl_divergence(
            &DiscretePmf::new(support.clone(), p.clone()).unwrap(),
            &DiscretePmf::new(support, q.clone()).unwrap(),
            0.0,
        )
        .unwrap();
        assert!((d - kl_direct(&p, &q)).abs() <= 1e-12);
    }
}

#[test]
fn kl_is_asymmetric() {
    let s = vec![0.0, 1.0];
    let p = DiscretePmf::new(s.clone(), vec![0.5, 0.5]).unwrap();
    let q = DiscretePmf::new(s, vec![0.25, 0.75]).unwrap();
    let pq = kl_divergence(&p, &q, 0.0).unwrap();
    let qp = kl_divergence(&q, &p, 0.0).unwrap();
    assert!((pq - 0.143841).abs() < 1e-6);
    assert_ne!(pq, qp);
}

#[test]
fn smoothed_kl_on_histograms_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = normals(&mut rng, 500, 0.0);
    let b = normals(&mut rng, 500, 0.7);
    let lo = a.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spec = HistogramSpec::new(20, lo, hi, EdgePolicy::Clamp).unwrap();
    let pa = build_histogram(&a, &spec).unwrap();
    let pb = build_histogram(&b, &spec).unwrap();
    let oa = clamped_histogram(&a, lo, hi, 20);
    let ob = clamped_histogram(&b, lo, hi, 20);
    assert_eq!(pa.mass(), &oa[..]);
    assert_eq!(pb.mass(), &ob[..]);
    let d = kl_divergence(&pb, &pa, 1e-6).unwrap();
    assert!((d - kl_smoothed(&ob, &oa, 1e-6)).abs() < 1e-12);
}

#[test]
fn merged_supports_share_points() {
    let (p, q) = merge_supports(&cdf(&[0.0, 2.0]), &cdf(&[1.0]));
    assert_eq!(p.support(), &[0.0, 1.0, 2.0]);
    assert_eq!(q.support(), p.support());
    assert_eq!(p.cumulative(), &[0.5, 0.5, 1.0]);
    assert_eq!(q.cumulative(), &[0.0, 1.0, 1.0]);
}

#[test]
fn pearson_matches_two_pass() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = normals(&mut rng, 300, 1.0);
    let b: Vec<f64> = a.iter().zip(normals(&mut rng, 300, 0.0)).map(|(x, e)| 0.5 * x + e).collect();
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    let oracle = cov / (va * vb).sqrt();
    assert!((pearson_correlation(&a, &b).unwrap() - oracle).abs() < 1e-12);
}

fn samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, 1..40)
}

proptest! {
    #[test]
    fn distances_are_symmetric(a in samples(), b in samples()) {
        let (p, q) = (cdf(&a), cdf(&b));
        prop_assert_eq!(wasserstein1(&p, &q), wasserstein1(&q, &p));
        prop_assert_eq!(ks_statistic(&p, &q), ks_statistic(&q, &p));
    }

    #[test]
    fn identical_samples_have_zero_distance(a in samples(), seed in any::<u64>()) {
        let mut shuffled = a.clone();
        rand::seq::SliceRandom::shuffle(&mut shuffled[..], &mut ChaCha8Rng::seed_from_u64(seed));
        let (p, q) = (cdf(&a), cdf(&shuffled));
        prop_assert_eq!(wasserstein1(&p, &q), 0.0);
        prop_assert_eq!(ks_statistic(&p, &q), 0.0);
    }

    #[test]
    fn translation_moves_w1_by_delta(a in samples(), delta in 0.001f64..10.0) {
        let shifted: Vec<f64> = a.iter().map(|x| x + delta).collect();
        let w = wasserstein1(&cdf(&a), &cdf(&shifted));
        // the shift itself is subject to rounding at each sample
        let realised = a.iter().zip(&shifted).map(|(x, y)| y - x).sum::<f64>() / a.len() as f64;
        prop_assert!((w - realised).abs() <= 1e-9, "{} vs {}", w, delta);
        prop_assert!((w - delta).abs() <= 1e-9 * (1.0 + a.iter().fold(0.0f64, |m, x| m.max(x.abs()))));
    }

    #[test]
    fn scaling_scales_w1(a in prop::collection::vec(0.0f64..100.0, 1..40),
                         b in prop::collection::vec(0.0f64..100.0, 1..40),
                         c in 0.01f64..20.0) {
        let ca: Vec<f64> = a.iter().map(|x| c * x).collect();
        let cb: Vec<f64> = b.iter().map(|x| c * x).collect();
        let w = wasserstein1(&cdf(&a), &cdf(&b));
        let wc = wasserstein1(&cdf(&ca), &cdf(&cb));
        prop_assert!((wc - c * w).abs() <= 1e-9 * (1.0 + c * w));
    }

    #[test]
    fn w1_matches_counting_oracle(a in samples(), b in samples()) {
        let w = wasserstein1(&cdf(&a), &cdf(&b));
        prop_assert!((w - w1_by_counting(&a, &b)).abs() <= 1e-9);
    }

    #[test]
    fn ks_in_unit_interval(a in samples(), b in samples()) {
        let d = ks_statistic(&cdf(&a), &cdf(&b));
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d, ks_scan(&a, &b));
    }

    #[test]
    fn kl_nonnegative(raw_p in prop::collection::vec(0.0f64..1.0, 2..12),
                      raw_q in prop::collection::vec(0.01f64..1.0, 2..12),
                      eps in prop_oneof![Just(0.0), Just(1e-6), 1e-9f64..0.1]) {
        let n = raw_p.len().min(raw_q.len());
        let sp: f64 = raw_p[..n].iter().sum();
        prop_assume!(sp > 0.0);
        let sq: f64 = raw_q[..n].iter().sum();
        let support: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let p = DiscretePmf::new(support.clone(), raw_p[..n].iter().map(|x| x / sp).collect()).unwrap();
        let q = DiscretePmf::new(support, raw_q[..n].iter().map(|x| x / sq).collect()).unwrap();
        prop_assert!(kl_divergence(&p, &q, eps).unwrap() >= 0.0);
    }

    #[test]
    fn normalize_keeps_extremes(xs in prop::collection::vec(-1e6f64..1e6, 1..50)) {
        let ys = min_max_normalize(&xs).unwrap();
        let argmax = |v: &[f64]| v.iter().enumerate().fold(0, |best, (i, &x)| if x > v[best] { i } else { best });
        let argmin = |v: &[f64]| v.iter().enumerate().fold(0, |best, (i, &x)| if x < v[best] { i } else { best });
        prop_assert!(ys.iter().all(|y| (0.0..=1.0).contains(y)));
        let constant = xs.iter().all(|&x| x == xs[0]);
        if !constant {
            prop_assert_eq!(argmax(&ys), argmax(&xs));
            prop_assert_eq!(argmin(&ys), argmin(&xs));
            prop_assert_eq!(ys[argmin(&xs)], 0.0);
            prop_assert_eq!(ys[argmax(&xs)], 1.0);
            for i in 0..xs.len() {
                for j in 0..xs.len() {
                    if xs[i] < xs[j] {
                        prop_assert!(ys[i] <= ys[j]);
                    }
                }
            }
        } else {
            prop_assert!(ys.iter().all(|&y| y == 0.0));
        }
    }
}
