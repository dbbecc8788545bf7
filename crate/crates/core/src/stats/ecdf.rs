use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Right-continuous empirical CDF stored at its jump points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    support: Vec<f64>,
    cumulative: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(support: Vec<f64>, cumulative: Vec<f64>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::Empty("CDF support"));
        }
        if support.len() != cumulative.len() {
            return Err(Error::LengthMismatch {
                left: support.len(),
                right: cumulative.len(),
            });
        }
        if let Some((index, &value)) = support.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        if support.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidDistribution(
                "CDF support must be strictly increasing".into(),
            ));
        }
        if cumulative.iter().any(|c| !(0.0..=1.0).contains(c))
            || cumulative.windows(2).any(|w| w[0] > w[1])
        {
            return Err(Error::InvalidDistribution(
                "cumulative values must be nondecreasing within [0, 1]".into(),
            ));
        }
        let last = cumulative[cumulative.len() - 1];
        if (last - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "CDF must end at 1, ends at {last}"
            )));
        }
        Ok(Self {
            support,
            cumulative,
        })
    }

    /// Builds the CDF from samples already sorted ascending. `sorted` must
    /// be nonempty and free of NaN.
    pub(crate) fn from_sorted(sorted: &[f64]) -> Self {
        debug_assert!(!sorted.is_empty());
        debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
        let n = sorted.len() as f64;
        let mut support = Vec::new();
        let mut cumulative = Vec::new();
        for (i, &x) in sorted.iter().enumerate() {
            if support.last() == Some(&x) {
                *cumulative.last_mut().unwrap() = (i + 1) as f64 / n;
            } else {
                support.push(x);
                cumulative.push((i + 1) as f64 / n);
            }
        }
        Self {
            support,
            cumulative,
        }
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// F(x): the cumulative value at the last support point `<= x`, or 0.
    pub fn eval(&self, x: f64) -> f64 {
        match self.support.partition_point(|&s| s <= x) {
            0 => 0.0,
            k => self.cumulative[k - 1],
        }
    }
}

/// Empirical CDF of `samples`: the support is the sorted distinct values and
/// `cumulative[n]` is the fraction of samples `<= support[n]`.
pub fn build_empirical_cdf(samples: &[f64]) -> Result<EmpiricalCdf> {
    if samples.is_empty() {
        return Err(Error::Empty("CDF samples"));
    }
    if let Some((index, &value)) = samples.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { index, value });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(EmpiricalCdf::from_sorted(&sorted))
}

/// Walks the union of both supports in ascending order, yielding
/// `(s_n, F_p(s_n), F_q(s_n))`.
pub(crate) fn merged_steps<'a>(
    p: &'a EmpiricalCdf,
    q: &'a EmpiricalCdf,
) -> impl Iterator<Item = (f64, f64, f64)> + 'a {
    let (mut i, mut j) = (0usize, 0usize);
    let (mut fp, mut fq) = (0.0, 0.0);
    std::iter::from_fn(move || {
        let next_p = p.support.get(i).copied();
        let next_q = q.support.get(j).copied();
        let s = match (next_p, next_q) {
            (None, None) => return None,
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (Some(a), Some(b)) => a.min(b),
        };
        if next_p == Some(s) {
            fp = p.cumulative[i];
            i += 1;
        }
        if next_q == Some(s) {
            fq = q.cumulative[j];
            j += 1;
        }
        Some((s, fp, fq))
    })
}

/// Re-expresses both CDFs on the union of their supports.
pub fn merge_supports(p: &EmpiricalCdf, q: &EmpiricalCdf) -> (EmpiricalCdf, EmpiricalCdf) {
    let n = p.len() + q.len();
    let mut support = Vec::with_capacity(n);
    let mut fp = Vec::with_capacity(n);
    let mut fq = Vec::with_capacity(n);
    for (s, a, b) in merged_steps(p, q) {
        support.push(s);
        fp.push(a);
        fq.push(b);
    }
    (
        EmpiricalCdf {
            support: support.clone(),
            cumulative: fp,
        },
        EmpiricalCdf {
            support,
            cumulative: fq,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rank_fraction(samples: &[f64], x: f64) -> f64 {
        samples.iter().filter(|&&v| v <= x).count() as f64 / samples.len() as f64
    }

    #[test]
    fn single_sample() {
        let cdf = build_empirical_cdf(&[3.0]).unwrap();
        assert_eq!(cdf.support(), &[3.0]);
        assert_eq!(cdf.cumulative(), &[1.0]);
    }

    #[test]
    fn duplicates_collapse() {
        let cdf = build_empirical_cdf(&[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert_eq!(cdf.support(), &[1.0, 2.0, 4.0]);
        assert_eq!(cdf.cumulative(), &[0.25, 0.75, 1.0]);
    }

    #[test]
    fn matches_rank_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        // coarse grid so that ties occur
        let samples: Vec<f64> = (0..100)
            .map(|_| (rng.random::<f64>() * 40.0).round() / 4.0)
            .collect();
        let cdf = build_empirical_cdf(&samples).unwrap();
        for (&s, &c) in cdf.support().iter().zip(cdf.cumulative()) {
            assert_eq!(c, rank_fraction(&samples, s));
        }
        let mut distinct = samples.clone();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        assert_eq!(cdf.support(), distinct.as_slice());
    }

    #[test]
    fn eval_is_right_continuous() {
        let cdf = build_empirical_cdf(&[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert_eq!(cdf.eval(0.5), 0.0);
        assert_eq!(cdf.eval(1.0), 0.25);
        assert_eq!(cdf.eval(1.999), 0.25);
        assert_eq!(cdf.eval(2.0), 0.75);
        assert_eq!(cdf.eval(100.0), 1.0);
    }

    #[test]
    fn merge_disjoint_points() {
        let p = build_empirical_cdf(&[1.0]).unwrap();
        let q = build_empirical_cdf(&[2.0]).unwrap();
        let (mp, mq) = merge_supports(&p, &q);
        assert_eq!(mp.support(), &[1.0, 2.0]);
        assert_eq!(mq.support(), &[1.0, 2.0]);
        assert_eq!(mp.cumulative(), &[1.0, 1.0]);
        assert_eq!(mq.cumulative(), &[0.0, 1.0]);
    }

    #[test]
    fn merge_identity() {
        let p = build_empirical_cdf(&[0.5, 1.5, 1.5, 9.0]).unwrap();
        let (a, b) = merge_supports(&p, &p);
        assert_eq!(a, p);
        assert_eq!(b, p);
    }

    #[test]
    fn merge_matches_rank_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let xs: Vec<f64> = (0..60).map(|_| (rng.random::<f64>() * 20.0).floor()).collect();
        let ys: Vec<f64> = (0..45).map(|_| (rng.random::<f64>() * 30.0).floor()).collect();
        let p = build_empirical_cdf(&xs).unwrap();
        let q = build_empirical_cdf(&ys).unwrap();
        let (mp, mq) = merge_supports(&p, &q);
        for (i, &s) in mp.support().iter().enumerate() {
            assert_eq!(mp.cumulative()[i], rank_fraction(&xs, s));
            assert_eq!(mq.cumulative()[i], rank_fraction(&ys, s));
        }
        assert!(mp.support().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(build_empirical_cdf(&[]).is_err());
        assert!(build_empirical_cdf(&[1.0, f64::NAN]).is_err());
        assert!(EmpiricalCdf::new(vec![1.0, 2.0], vec![0.5, 0.9]).is_err());
        assert!(EmpiricalCdf::new(vec![1.0, 2.0], vec![0.7, 0.5]).is_err());
        assert!(EmpiricalCdf::new(vec![2.0, 1.0], vec![0.5, 1.0]).is_err());
        assert!(EmpiricalCdf::new(vec![1.0, 2.0], vec![0.5, 1.0]).is_ok());
    }
}
