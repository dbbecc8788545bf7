//! Reference implementations used as test oracles. They favour obviousness
//! over speed and share no code with the library.
#![allow(dead_code)]

use rand::Rng;

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Minimal transport cost between two equal-weight empirical distributions.
/// Both are replicated to `lcm(|a|, |b|)` unit atoms and every one-to-one
/// matching is enumerated (depth-first, pruning partial matchings that
/// already cost more than the best complete one).
pub fn brute_force_ot(a: &[f64], b: &[f64]) -> f64 {
    let l = lcm(a.len(), b.len());
    let xs: Vec<f64> = a.iter().flat_map(|&x| std::iter::repeat_n(x, l / a.len())).collect();
    let ys: Vec<f64> = b.iter().flat_map(|&y| std::iter::repeat_n(y, l / b.len())).collect();
    let mut used = vec![false; l];
    let mut best = f64::INFINITY;
    fn search(i: usize, cost: f64, xs: &[f64], ys: &[f64], used: &mut [bool], best: &mut f64) {
        if cost >= *best {
            return;
        }
        if i == xs.len() {
            *best = cost;
            return;
        }
        for j in 0..ys.len() {
            if !used[j] {
                used[j] = true;
                search(i + 1, cost + (xs[i] - ys[j]).abs(), xs, ys, used, best);
                used[j] = false;
            }
        }
    }
    search(0, 0.0, &xs, &ys, &mut used, &mut best);
    best / l as f64
}

/// Fraction of `samples` at or below `x`.
pub fn ecdf_at(samples: &[f64], x: f64) -> f64 {
    samples.iter().filter(|&&v| v <= x).count() as f64 / samples.len() as f64
}

/// Largest CDF gap, scanning every sample point of either set.
pub fn ks_scan(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .chain(b)
        .map(|&x| (ecdf_at(a, x) - ecdf_at(b, x)).abs())
        .fold(0.0, f64::max)
}

/// `sum p ln(p / q)` for strictly positive PMFs.
pub fn kl_direct(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(&pi, &qi)| pi * (pi / qi).ln()).sum()
}

/// W1 by integrating `|F_a - F_b|` between consecutive points of the merged
/// support, evaluating the CDFs by counting.
pub fn w1_by_counting(a: &[f64], b: &[f64]) -> f64 {
    let mut s: Vec<f64> = a.iter().chain(b).copied().collect();
    s.sort_by(f64::total_cmp);
    s.dedup();
    s.windows(2)
        .map(|w| (ecdf_at(a, w[0]) - ecdf_at(b, w[0])).abs() * (w[1] - w[0]))
        .sum()
}

/// Histogram PMF over `bins` equal bins on `[lo, hi]`, values outside
/// clamped into the edge bins, last bin closed.
pub fn clamped_histogram(samples: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in samples {
        let mut k = 0;
        while k + 1 < bins && x >= lo + (k + 1) as f64 * width {
            k += 1;
        }
        counts[k] += 1;
    }
    counts.iter().map(|&c| c as f64 / samples.len() as f64).collect()
}

/// `D(p || q)` after adding `eps` to every bin and renormalizing.
pub fn kl_smoothed(p: &[f64], q: &[f64], eps: f64) -> f64 {
    let z = 1.0 + p.len() as f64 * eps;
    p.iter()
        .zip(q)
        .map(|(&pi, &qi)| {
            let (a, b) = ((pi + eps) / z, (qi + eps) / z);
            if a == 0.0 {
                0.0
            } else {
                a * (a / b).ln()
            }
        })
        .sum::<f64>()
        .max(0.0)
}

/// Equal error rate by evaluating FAR and FRR at every candidate threshold
/// (each distinct score, then +inf), taking the first threshold where
/// FAR <= FRR and interpolating linearly from the threshold before it.
/// A score is accepted as real when it is at or above the threshold.
pub fn eer_exhaustive(fake: &[f64], real: &[f64]) -> f64 {
    let mut thresholds: Vec<f64> = fake.iter().chain(real).copied().collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    thresholds.push(f64::INFINITY);
    let rates = |t: f64| {
        let far = fake.iter().filter(|&&s| s >= t).count() as f64 / fake.len() as f64;
        let frr = real.iter().filter(|&&s| s < t).count() as f64 / real.len() as f64;
        (far, frr)
    };
    let mut prev: Option<(f64, f64)> = None;
    for &t in &thresholds {
        let (far, frr) = rates(t);
        if far - frr <= 0.0 {
            return match prev {
                Some((pfar, pfrr)) if pfar - pfrr > 0.0 && far - frr < 0.0 => {
                    let (d0, d1) = (pfar - pfrr, far - frr);
                    pfar + d0 / (d0 - d1) * (far - pfar)
                }
                _ => far,
            };
        }
        prev = Some((far, frr));
    }
    unreachable!("the +inf threshold always has FAR 0 and FRR 1")
}

/// 1, 2, 4 or 8 values; drawn from a coarse grid half the time so ties occur.
pub fn small_sample<R: Rng>(rng: &mut R) -> Vec<f64> {
    let n = [1, 2, 4, 8][rng.random_range(0..4)];
    let grid = rng.random_bool(0.5);
    (0..n)
        .map(|_| {
            if grid {
                rng.random_range(-3i32..=3) as f64 * 0.5
            } else {
                rng.random_range(-5.0..5.0)
            }
        })
        .collect()
}

/// Strictly positive PMF of length `n`.
pub fn positive_pmf<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    raw.iter().map(|x| x / sum).collect()
}

pub fn normals<R: Rng>(rng: &mut R, n: usize, mean: f64) -> Vec<f64> {
    (0..n)
        .map(|_| mean + rng.sample::<f64, _>(rand_distr::StandardNormal))
        .collect()
}
