//! Equal error rate of a fake-vs-real detector.
//!
//! Scores follow the convention "higher means more likely real". At a
//! threshold `t` a sample is accepted as real when `score >= t`, so
//!
//! * FAR(t) = fraction of fake scores `>= t`
//! * FRR(t) = fraction of real scores `< t`
//!
//! Thresholds sweep the distinct merged score values in ascending order plus
//! a final `+inf` (FAR = 0, FRR = 1). The EER is read off where FAR - FRR
//! first stops being positive, interpolating linearly between the two
//! operating points around the sign change.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSet {
    fake: Vec<f64>,
    real: Vec<f64>,
}

impl ScoreSet {
    pub fn new(fake: Vec<f64>, real: Vec<f64>) -> Result<Self> {
        if fake.is_empty() {
            return Err(Error::Empty("fake scores"));
        }
        if real.is_empty() {
            return Err(Error::Empty("real scores"));
        }
        for list in [&fake, &real] {
            if let Some((index, &value)) = list.iter().enumerate().find(|(_, v)| !v.is_finite()) {
                return Err(Error::NonFinite { index, value });
            }
        }
        Ok(Self { fake, real })
    }

    pub fn fake_scores(&self) -> &[f64] {
        &self.fake
    }

    pub fn real_scores(&self) -> &[f64] {
        &self.real
    }

    /// The same scores under the opposite polarity ("higher means fake").
    pub fn inverted(&self) -> Self {
        Self {
            fake: self.fake.iter().map(|x| -x).collect(),
            real: self.real.iter().map(|x| -x).collect(),
        }
    }
}

pub fn eer(scores: &ScoreSet) -> f64 {
    let mut fake = scores.fake.clone();
    let mut real = scores.real.clone();
    fake.sort_by(f64::total_cmp);
    real.sort_by(f64::total_cmp);
    let n_fake = fake.len() as f64;
    let n_real = real.len() as f64;

    // i, j: number of fake and real scores strictly below the threshold
    let (mut i, mut j) = (0usize, 0usize);
    let mut prev = (1.0, 0.0);
    loop {
        let threshold = match (fake.get(i), real.get(j)) {
            (None, None) => f64::INFINITY,
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (Some(&a), Some(&b)) => a.min(b),
        };
        let (far, frr) = if threshold == f64::INFINITY {
            (0.0, 1.0)
        } else {
            ((fake.len() - i) as f64 / n_fake, j as f64 / n_real)
        };
        let diff = far - frr;
        if diff <= 0.0 {
            let prev_diff = prev.0 - prev.1;
            if diff == 0.0 || prev_diff <= 0.0 {
                return far;
            }
            let alpha = prev_diff / (prev_diff - diff);
            return prev.0 + alpha * (far - prev.0);
        }
        prev = (far, frr);
        while i < fake.len() && fake[i] <= threshold {
            i += 1;
        }
        while j < real.len() && real[j] <= threshold {
            j += 1;
        }
    }
}

/// EER of all groups' fake and real scores pooled together.
pub fn pooled_eer(groups: &[ScoreSet]) -> Result<f64> {
    if groups.is_empty() {
        return Err(Error::Empty("score groups"));
    }
    let fake = groups.iter().flat_map(|g| g.fake.iter().copied()).collect();
    let real = groups.iter().flat_map(|g| g.real.iter().copied()).collect();
    Ok(eer(&ScoreSet::new(fake, real)?))
}
