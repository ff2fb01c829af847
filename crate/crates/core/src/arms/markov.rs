use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

use crate::error::{Error, Result};

const ROW_TOL: f64 = 1e-12;
const REVERSIBILITY_TOL: f64 = 1e-10;

/// Which reward values a chain may carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewardDomain {
    /// Rewards in `(0, 1]`.
    Positive,
    /// Rewards in `[0, 1]`; used for on/off channel chains whose idle state pays nothing.
    ZeroAllowed,
}

/// Finite, irreducible, aperiodic, reversible Markov chain with rested
/// dynamics: the state only moves when [`MarkovArm::step`] is called.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovArm {
    rewards: Vec<f64>,
    transition: DMatrix<f64>,
    initial: Vec<f64>,
    stationary: Vec<f64>,
    mean: f64,
    state: Option<usize>,
}

/// Exact statistics of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainStats {
    pub pi: Vec<f64>,
    pub mean: f64,
    /// Second-largest eigenvalue of `P^2`.
    pub lambda2: f64,
    /// Eigenvalue gap `1 - lambda2`.
    pub rho: f64,
    pub pi_min: f64,
    pub x_max: f64,
    pub x_min: f64,
    /// `max(pi_x, 1 - pi_x)` per state.
    pub pi_hat: Vec<f64>,
    pub pi_hat_max: f64,
    pub cardinality: usize,
}

impl MarkovArm {
    /// Builds a chain whose rewards must lie in `(0, 1]`.
    ///
    /// `initial` defaults to the stationary distribution.
    pub fn new(rewards: Vec<f64>, transition: Vec<Vec<f64>>, initial: Option<Vec<f64>>) -> Result<Self> {
        Self::with_domain(rewards, transition, initial, RewardDomain::Positive)
    }

    pub fn with_domain(
        rewards: Vec<f64>,
        transition: Vec<Vec<f64>>,
        initial: Option<Vec<f64>>,
        domain: RewardDomain,
    ) -> Result<Self> {
        let n = rewards.len();
        if n == 0 {
            return Err(Error::InvalidArm("chain has no states".into()));
        }
        for &x in &rewards {
            let ok = match domain {
                RewardDomain::Positive => x > 0.0 && x <= 1.0,
                RewardDomain::ZeroAllowed => (0.0..=1.0).contains(&x),
            };
            if !ok {
                return Err(Error::InvalidArm(format!("reward {x} outside the {domain:?} domain")));
            }
        }
        if transition.len() != n || transition.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidArm(format!("transition matrix must be {n}x{n}")));
        }
        for (i, row) in transition.iter().enumerate() {
            if row.iter().any(|p| !(*p >= 0.0)) {
                return Err(Error::InvalidArm(format!("row {i} has a negative or NaN entry")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > ROW_TOL {
                return Err(Error::InvalidArm(format!("row {i} sums to {s}")));
            }
        }
        let p = DMatrix::from_fn(n, n, |i, j| transition[i][j]);
        if !is_primitive(&p) {
            return Err(Error::InvalidArm("chain is not irreducible and aperiodic".into()));
        }
        let stationary = stationary_distribution(&p)?;
        for x in 0..n {
            for y in 0..n {
                let lhs = stationary[x] * p[(x, y)];
                let rhs = stationary[y] * p[(y, x)];
                if (lhs - rhs).abs() > REVERSIBILITY_TOL {
                    return Err(Error::InvalidArm(format!(
                        "chain is not reversible: detailed balance fails for states {x}, {y}"
                    )));
                }
            }
        }
        let initial = match initial {
            Some(init) => {
                if init.len() != n || init.iter().any(|q| !(*q >= 0.0)) {
                    return Err(Error::InvalidArm("initial distribution is malformed".into()));
                }
                let s: f64 = init.iter().sum();
                if (s - 1.0).abs() > ROW_TOL {
                    return Err(Error::InvalidArm(format!("initial distribution sums to {s}")));
                }
                init
            }
            None => stationary.clone(),
        };
        let mean = rewards.iter().zip(&stationary).map(|(x, q)| x * q).sum();
        Ok(MarkovArm { rewards, transition: p, initial, stationary, mean, state: None })
    }

    /// On/off channel with states `{0, 1}` carrying rewards 0 and 1.
    pub fn two_state(p01: f64, p10: f64) -> Result<Self> {
        Self::with_domain(
            vec![0.0, 1.0],
            vec![vec![1.0 - p01, p01], vec![p10, 1.0 - p10]],
            None,
            RewardDomain::ZeroAllowed,
        )
    }

    pub fn with_initial_state(mut self, state: usize) -> Self {
        assert!(state < self.rewards.len());
        self.state = Some(state);
        self
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    pub fn transition(&self) -> &DMatrix<f64> {
        &self.transition
    }

    pub fn initial_distribution(&self) -> &[f64] {
        &self.initial
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn cardinality(&self) -> usize {
        self.rewards.len()
    }

    /// Current state, or `None` before the first play.
    pub fn current_state(&self) -> Option<usize> {
        self.state
    }

    /// Advance the chain one transition and return the reward of the new state.
    ///
    /// On the first call the starting state is drawn from the initial
    /// distribution using the same stream.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        let from = match self.state {
            Some(s) => s,
            None => draw(&self.initial, rng.random()),
        };
        let u: f64 = rng.random();
        let n = self.rewards.len();
        let mut acc = 0.0;
        let mut next = n - 1;
        for j in 0..n {
            acc += self.transition[(from, j)];
            if u < acc {
                next = j;
                break;
            }
        }
        self.state = Some(next);
        self.rewards[next]
    }

    /// Stationary law, mean and spectral gap of `P^2`.
    ///
    /// `P^2` is symmetrized as `D^{1/2} P^2 D^{-1/2}` with `D = diag(pi)`;
    /// reversibility makes the result symmetric with the same spectrum.
    pub fn chain_stats(&self) -> Result<ChainStats> {
        let n = self.rewards.len();
        let pi = self.stationary.clone();
        let p2 = &self.transition * &self.transition;
        let sqrt_pi: Vec<f64> = pi.iter().map(|q| q.sqrt()).collect();
        let s = DMatrix::from_fn(n, n, |i, j| sqrt_pi[i] * p2[(i, j)] / sqrt_pi[j]);
        let sym = (&s + s.transpose()) * 0.5;
        let eig = SymmetricEigen::try_new(sym, 1e-15, 10_000)
            .ok_or_else(|| Error::Eigen("symmetric eigensolver did not converge".into()))?;
        let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        values.sort_by(|a, b| b.total_cmp(a));
        let lambda2 = if n >= 2 { values[1].max(0.0) } else { 0.0 };
        let pi_hat: Vec<f64> = pi.iter().map(|q| q.max(1.0 - q)).collect();
        Ok(ChainStats {
            mean: self.mean,
            lambda2,
            rho: 1.0 - lambda2,
            pi_min: pi.iter().copied().fold(f64::INFINITY, f64::min),
            x_max: self.rewards.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            x_min: self.rewards.iter().copied().fold(f64::INFINITY, f64::min),
            pi_hat_max: pi_hat.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            pi_hat,
            cardinality: n,
            pi,
        })
    }
}

fn draw(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// `P^k > 0` entrywise for some `k <= n^2` (Wielandt).
fn is_primitive(p: &DMatrix<f64>) -> bool {
    let n = p.nrows();
    let adj: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| p[(i, j)] > 0.0).collect()).collect();
    let mut reach = adj.clone();
    for _ in 0..(n * n).max(1) {
        if reach.iter().all(|row| row.iter().all(|&b| b)) {
            return true;
        }
        let mut next = vec![vec![false; n]; n];
        for i in 0..n {
            for k in 0..n {
                if reach[i][k] {
                    for j in 0..n {
                        next[i][j] |= adj[k][j];
                    }
                }
            }
        }
        reach = next;
    }
    reach.iter().all(|row| row.iter().all(|&b| b))
}

/// Solves `pi P = pi`, `sum(pi) = 1` by replacing one balance equation with
/// the normalization.
fn stationary_distribution(p: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = p.nrows();
    let mut a = p.transpose() - DMatrix::identity(n, n);
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let pi = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Eigen("stationary system is singular".into()))?;
    if pi.iter().any(|q| !(*q > 0.0)) {
        return Err(Error::InvalidArm("stationary distribution is not strictly positive".into()));
    }
    Ok(pi.iter().copied().collect())
}
