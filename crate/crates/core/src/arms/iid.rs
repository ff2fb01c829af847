use rand::Rng;

use crate::error::{Error, Result};

const PROB_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum IidDistribution {
    Bernoulli(f64),
    /// Finite support in `[0, 1]` with matching probabilities.
    Discrete { values: Vec<f64>, probs: Vec<f64> },
}

/// Arm with i.i.d. rewards bounded in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IidArm {
    dist: IidDistribution,
    mean: f64,
}

impl IidArm {
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArm(format!("Bernoulli parameter {p} outside [0, 1]")));
        }
        Ok(IidArm { dist: IidDistribution::Bernoulli(p), mean: p })
    }

    pub fn discrete(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.len() != probs.len() {
            return Err(Error::InvalidArm(format!(
                "support has {} values but {} probabilities",
                values.len(),
                probs.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidArm(format!("reward value {v} outside [0, 1]")));
        }
        if probs.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::InvalidArm("negative probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidArm(format!("probabilities sum to {total}")));
        }
        let mean = values.iter().zip(&probs).map(|(v, p)| v * p).sum();
        Ok(IidArm { dist: IidDistribution::Discrete { values, probs }, mean })
    }

    /// Point mass at `value`.
    pub fn constant(value: f64) -> Result<Self> {
        Self::discrete(vec![value], vec![1.0])
    }

    pub fn distribution(&self) -> &IidDistribution {
        &self.dist
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.dist {
            IidDistribution::Bernoulli(p) => {
                if rng.random::<f64>() < *p {
                    1.0
                } else {
                    0.0
                }
            }
            IidDistribution::Discrete { values, probs } => {
                if values.len() == 1 {
                    return values[0];
                }
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (v, p) in values.iter().zip(probs) {
                    acc += p;
                    if u < acc {
                        return *v;
                    }
                }
                // rounding left a sliver above the last cumulative sum
                values[values.len() - 1]
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn degenerate_bernoulli_always_pays() {
        let arm = IidArm::bernoulli(1.0).unwrap();
        let mut rng = stream(3, 0);
        assert!((0..10_000).all(|_| arm.sample(&mut rng) == 1.0));
    }

    #[test]
    fn point_mass_returns_its_value() {
        let arm = IidArm::constant(0.5).unwrap();
        let mut rng = stream(3, 1);
        assert!((0..1000).all(|_| arm.sample(&mut rng) == 0.5));
        assert_eq!(arm.mean(), 0.5);
    }

    #[test]
    fn bernoulli_sample_mean() {
        // CLT: sd of the mean is sqrt(0.16 / 1e6) = 4e-4, tolerance is 5 sd.
        let arm = IidArm::bernoulli(0.8).unwrap();
        let mut rng = stream(11, 0);
        let n = 1_000_000;
        let mean = (0..n).map(|_| arm.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 0.8).abs() < 0.002, "mean {mean}");
    }

    #[test]
    fn rejects_bad_distributions() {
        assert!(IidArm::bernoulli(1.5).is_err());
        assert!(IidArm::discrete(vec![0.2, 1.2], vec![0.5, 0.5]).is_err());
        assert!(IidArm::discrete(vec![0.2, 0.4], vec![0.5, 0.4]).is_err());
        assert!(IidArm::discrete(vec![0.2, 0.4], vec![-0.5, 1.5]).is_err());
        assert!(IidArm::discrete(vec![], vec![]).is_err());
    }

    #[test]
    fn discrete_mean_is_analytic() {
        let arm = IidArm::discrete(vec![0.0, 0.25, 1.0], vec![0.5, 0.25, 0.25]).unwrap();
        assert!((arm.mean() - 0.3125).abs() < 1e-12);
    }
}
