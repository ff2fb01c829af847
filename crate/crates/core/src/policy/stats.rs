/// Running statistics of one player.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayerStats {
    counts: Vec<u64>,
    sums: Vec<f64>,
    total: u64,
    /// Epoch counter; recomputation happens when it is a power of two.
    pub eta: u64,
    pub last_arm: Option<usize>,
    /// Recomputations so far, m(t).
    pub computations: u64,
    /// Recomputations whose outcome was an optimal arm.
    pub optimal_computations: u64,
    /// Recomputations whose outcome was a suboptimal arm.
    pub suboptimal_computations: u64,
    pub indices: Vec<f64>,
}

impl PlayerStats {
    pub fn new(arms: usize) -> Self {
        PlayerStats {
            counts: vec![0; arms],
            sums: vec![0.0; arms],
            total: 0,
            eta: 1,
            last_arm: None,
            computations: 0,
            optimal_computations: 0,
            suboptimal_computations: 0,
            indices: vec![0.0; arms],
        }
    }

    pub fn arms(&self) -> usize {
        self.counts.len()
    }

    pub fn record(&mut self, arm: usize, reward: f64) {
        self.counts[arm] += 1;
        self.sums[arm] += reward;
        self.total += 1;
    }

    pub fn count(&self, arm: usize) -> u64 {
        self.counts[arm]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Plays that counted, n(t).
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn mean(&self, arm: usize) -> f64 {
        if self.counts[arm] == 0 {
            0.0
        } else {
            self.sums[arm] / self.counts[arm] as f64
        }
    }

    pub fn reward_sum(&self, arm: usize) -> f64 {
        self.sums[arm]
    }

    /// Constructs stats from raw counters (used when replaying histories).
    pub fn from_counts(counts: Vec<u64>, sums: Vec<f64>) -> Self {
        let mut s = PlayerStats::new(counts.len());
        s.total = counts.iter().sum();
        s.counts = counts;
        s.sums = sums;
        s
    }
}
