use super::{PlayerStats, Schedule};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IndexKind {
    /// Exploration coefficient 2.
    Ucb1,
    /// Exploration coefficient 3.
    Ucb4,
    /// Coefficient `M + 2` for `M` players sharing the arms.
    Decentralized { players: usize },
    /// Coefficient kappa (Markovian rewards).
    MarkovKappa,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kappa {
    Constant(f64),
    Schedule(Schedule),
}

/// Index precision: indices closer than this cannot be told apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Precision {
    Exact,
    Fixed(f64),
    Schedule(Schedule),
}

impl Precision {
    pub fn at(&self, t: f64) -> f64 {
        match self {
            Precision::Exact => 0.0,
            Precision::Fixed(eps) => *eps,
            Precision::Schedule(s) => s.value(t),
        }
    }
}

/// Which clock feeds the `log` in the exploration term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeSource {
    GlobalTime,
    OwnPlays,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexSpec {
    pub kind: IndexKind,
    pub kappa: Kappa,
    pub precision: Precision,
    pub time_source: TimeSource,
}

impl IndexSpec {
    pub fn ucb1() -> Self {
        IndexSpec {
            kind: IndexKind::Ucb1,
            kappa: Kappa::Constant(2.0),
            precision: Precision::Exact,
            time_source: TimeSource::GlobalTime,
        }
    }

    pub fn ucb4() -> Self {
        IndexSpec { kind: IndexKind::Ucb4, kappa: Kappa::Constant(3.0), ..Self::ucb1() }
    }

    pub fn markov(kappa: Kappa) -> Self {
        IndexSpec { kind: IndexKind::MarkovKappa, kappa, ..Self::ucb1() }
    }

    pub fn decentralized(players: usize) -> Self {
        IndexSpec {
            kind: IndexKind::Decentralized { players },
            kappa: Kappa::Constant((players + 2) as f64),
            precision: Precision::Exact,
            time_source: TimeSource::OwnPlays,
        }
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    pub fn with_time_source(mut self, source: TimeSource) -> Self {
        self.time_source = source;
        self
    }

    pub fn coefficient(&self, t: f64) -> f64 {
        match self.kind {
            IndexKind::Ucb1 => 2.0,
            IndexKind::Ucb4 => 3.0,
            IndexKind::Decentralized { players } => (players + 2) as f64,
            IndexKind::MarkovKappa => match self.kappa {
                Kappa::Constant(k) => k,
                Kappa::Schedule(s) => s.value(t),
            },
        }
    }

    /// `log` argument and coefficient at global time `t`.
    fn exploration(&self, stats: &PlayerStats, t: f64) -> (f64, f64) {
        let clock = match self.time_source {
            TimeSource::GlobalTime => t,
            TimeSource::OwnPlays => stats.total() as f64,
        };
        (clock.ln(), self.coefficient(t))
    }

    /// Exact (unquantized) index of `arm`.
    pub fn raw_index(&self, stats: &PlayerStats, arm: usize, t: f64) -> Result<f64> {
        let n = stats.count(arm);
        if n == 0 {
            return Err(Error::Precondition(format!("arm {arm} has never been played")));
        }
        let (log_t, coef) = self.exploration(stats, t);
        Ok(index_value(stats.mean(arm), n, log_t, coef))
    }
}

/// `mean + sqrt(coef * log_t / n)`.
pub fn index_value(mean: f64, n: u64, log_t: f64, coef: f64) -> f64 {
    mean + (coef * log_t.max(0.0) / n as f64).sqrt()
}

/// Floor `value` to a multiple of `eps` (identity when `eps == 0`).
pub fn quantize(value: f64, eps: f64) -> f64 {
    if eps > 0.0 {
        (value / eps).floor() * eps
    } else {
        value
    }
}

/// Index of `arm` at global time `t`, floor-quantized to the precision in `spec`.
pub fn compute_index(stats: &PlayerStats, spec: &IndexSpec, arm: usize, t: f64) -> Result<f64> {
    let raw = spec.raw_index(stats, arm, t)?;
    Ok(quantize(raw, spec.precision.at(t)))
}

/// Lowest arm id whose index is within `eps` of the largest one.
///
/// With `eps == 0` this is the plain argmax with lowest-id tie-break.
pub fn epsilon_argmax(indices: &[f64], eps: f64) -> usize {
    assert!(!indices.is_empty(), "epsilon_argmax on an empty index vector");
    let max = indices.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    indices
        .iter()
        .position(|&g| g >= max - eps)
        .expect("max is attained")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn stats_with(mean: f64, n: u64) -> PlayerStats {
        PlayerStats::from_counts(vec![n], vec![mean * n as f64])
    }

    #[test]
    fn zero_exploration_at_t_one() {
        let s = stats_with(0.4, 3);
        let g = compute_index(&s, &IndexSpec::ucb4(), 0, 1.0).unwrap();
        assert!((g - 0.4).abs() < 1e-12);
    }

    #[test]
    fn ucb4_index_arithmetic() {
        let s = stats_with(0.5, 3);
        let g = compute_index(&s, &IndexSpec::ucb4(), 0, E).unwrap();
        assert!((g - 1.5).abs() < 1e-12);
    }

    #[test]
    fn markov_index_with_quantization() {
        let s = stats_with(0.5, 4);
        let spec = IndexSpec::markov(Kappa::Constant(16.0));
        assert!((compute_index(&s, &spec, 0, E).unwrap() - 2.5).abs() < 1e-12);
        let spec = spec.with_precision(Precision::Fixed(0.3));
        assert!((compute_index(&s, &spec, 0, E).unwrap() - 2.4).abs() < 1e-12);
    }

    #[test]
    fn unplayed_arm_is_an_error() {
        let s = PlayerStats::new(2);
        assert!(matches!(compute_index(&s, &IndexSpec::ucb1(), 1, 5.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn own_plays_clock() {
        let s = PlayerStats::from_counts(vec![2, 5], vec![1.0, 2.0]);
        let spec = IndexSpec::decentralized(2);
        let g = compute_index(&s, &spec, 0, 1e9).unwrap();
        assert!((g - (0.5 + (4.0 * 7f64.ln() / 2.0).sqrt())).abs() < 1e-12);
    }

    #[test]
    fn argmax_examples() {
        assert_eq!(epsilon_argmax(&[1.0, 0.5], 0.0), 0);
        assert_eq!(epsilon_argmax(&[1.00, 0.95], 0.1), 0);
        assert_eq!(epsilon_argmax(&[0.95, 1.00], 0.1), 0);
        assert_eq!(epsilon_argmax(&[0.5, 1.0, 1.0], 0.0), 1);
        assert_eq!(epsilon_argmax(&[0.5, 1.0, 0.95], 0.01), 1);
    }
}
