//! Per-run regret traces recorded on a sparse time grid.

/// Which regret definition a trace reports as its primary column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegretKind {
    /// `opt * t - sum of means of the arms played + cost` (i.i.d. single player).
    Expected,
    /// `opt * t - realized rewards + cost`.
    Realized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TracePoint {
    /// Slot index (1-based, inclusive).
    pub t: u64,
    /// Frames started so far (equals `t` for single-player runs).
    pub frame: u64,
    pub reward: f64,
    /// Sum of the means of the (player, arm) pairs that were successfully played.
    pub expected_reward: f64,
    pub cost: f64,
    pub computations: u64,
    pub collisions: u64,
    pub eta: u64,
    pub regret: f64,
    pub count_regret: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub kind: RegretKind,
    /// Optimal reward per slot (mu_1 or mu**).
    pub optimal_rate: f64,
    pub points: Vec<TracePoint>,
    /// Successful plays per (player, arm) at the end of the run.
    pub counts: Vec<Vec<u64>>,
}

impl RegretTrace {
    /// Regret of `p` rebuilt from its raw cumulative fields.
    pub fn recompute(&self, p: &TracePoint) -> f64 {
        let base = match self.kind {
            RegretKind::Expected => p.expected_reward,
            RegretKind::Realized => p.reward,
        };
        self.optimal_rate * p.t as f64 - base + p.cost
    }

    pub fn last(&self) -> Option<&TracePoint> {
        self.points.last()
    }

    pub fn at(&self, t: u64) -> Option<&TracePoint> {
        self.points.iter().find(|p| p.t == t)
    }
}

/// Recording times `round(ratio^k)` up to `horizon`, the powers of ten, and
/// `horizon` itself.
///
/// A ratio `<= 1` records every slot.
pub fn recording_grid(horizon: u64, ratio: f64) -> Vec<u64> {
    if horizon == 0 {
        return Vec::new();
    }
    if !(ratio > 1.0) {
        return (1..=horizon).collect();
    }
    let mut grid = Vec::new();
    let mut x = 1.0f64;
    loop {
        let t = x.round() as u64;
        if t > horizon {
            break;
        }
        if grid.last() != Some(&t) {
            grid.push(t);
        }
        x *= ratio;
    }
    let mut decade = 10u64;
    while decade <= horizon {
        grid.push(decade);
        decade = decade.saturating_mul(10);
    }
    grid.push(horizon);
    grid.sort_unstable();
    grid.dedup();
    grid
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Cumulative {
    pub reward: f64,
    pub expected: f64,
    pub cost: f64,
    pub computations: u64,
    pub collisions: u64,
    pub eta: u64,
    pub frame: u64,
}

pub(crate) struct Recorder {
    grid: Vec<u64>,
    next: usize,
    kind: RegretKind,
    optimal_rate: f64,
    points: Vec<TracePoint>,
}

impl Recorder {
    pub fn new(grid: Vec<u64>, kind: RegretKind, optimal_rate: f64) -> Self {
        Recorder { grid, next: 0, kind, optimal_rate, points: Vec::new() }
    }

    pub fn observe(&mut self, t: u64, c: &Cumulative) {
        if self.grid.get(self.next) != Some(&t) {
            return;
        }
        self.next += 1;
        let opt = self.optimal_rate * t as f64;
        let count_regret = opt - c.expected + c.cost;
        let realized = opt - c.reward + c.cost;
        self.points.push(TracePoint {
            t,
            frame: c.frame,
            reward: c.reward,
            expected_reward: c.expected,
            cost: c.cost,
            computations: c.computations,
            collisions: c.collisions,
            eta: c.eta,
            regret: match self.kind {
                RegretKind::Expected => count_regret,
                RegretKind::Realized => realized,
            },
            count_regret,
        });
    }

    pub fn finish(self, counts: Vec<Vec<u64>>) -> RegretTrace {
        RegretTrace { kind: self.kind, optimal_rate: self.optimal_rate, points: self.points, counts }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_hits_every_slot() {
        assert_eq!(recording_grid(10, 1.1), (1..=10).collect::<Vec<_>>());
        assert_eq!(recording_grid(3, 1.1), vec![1, 2, 3]);
    }

    #[test]
    fn grid_is_sparse_and_ends_at_horizon() {
        let g = recording_grid(100_000, 1.1);
        assert!(g.len() < 150);
        assert_eq!(*g.last().unwrap(), 100_000);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g.contains(&1000) && g.contains(&10_000));
    }

    #[test]
    fn every_slot_when_ratio_is_one() {
        assert_eq!(recording_grid(5, 1.0), vec![1, 2, 3, 4, 5]);
        assert!(recording_grid(0, 1.1).is_empty());
    }
}
