use super::index::{epsilon_argmax, quantize, IndexSpec};
use super::{CostModel, PlayerStats};
use crate::arms::{ArmModel, IidArm};
use crate::error::{Error, Result};
use crate::rng::{arm_stream, Stream};
use crate::trace::{recording_grid, Cumulative, Recorder, RegretKind, RegretTrace};

/// One index recomputation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    /// Slot about to be played with the outcome (1-based).
    pub tick: u64,
    pub arm: usize,
    pub changed: bool,
    pub precision: f64,
}

/// Output of a single-player run.
#[derive(Debug, Clone)]
pub struct SingleRun {
    pub trace: RegretTrace,
    pub stats: PlayerStats,
    pub decisions: Vec<Decision>,
    /// Arm played at every slot, when requested.
    pub plays: Option<Vec<usize>>,
}

struct Env {
    arms: Vec<ArmModel>,
    streams: Vec<Stream>,
    means: Vec<f64>,
    optimal: usize,
    stats: PlayerStats,
    cum: Cumulative,
    t: u64,
    recorder: Recorder,
    plays: Option<Vec<usize>>,
}

impl Env {
    fn new(arms: Vec<ArmModel>, horizon: u64, seed: u64, grid_ratio: f64, record_plays: bool) -> Self {
        let means: Vec<f64> = arms.iter().map(ArmModel::mean).collect();
        let optimal = epsilon_argmax(&means, 0.0);
        let kind = if arms.iter().any(ArmModel::is_markov) {
            RegretKind::Realized
        } else {
            RegretKind::Expected
        };
        let streams = (0..arms.len()).map(|j| arm_stream(seed, 0, j)).collect();
        let recorder = Recorder::new(recording_grid(horizon, grid_ratio), kind, means[optimal]);
        Env {
            stats: PlayerStats::new(arms.len()),
            arms,
            streams,
            optimal,
            means,
            cum: Cumulative::default(),
            t: 0,
            recorder,
            plays: record_plays.then(Vec::new),
        }
    }

    fn play(&mut self, arm: usize) {
        let reward = self.arms[arm].pull(&mut self.streams[arm]);
        self.stats.record(arm, reward);
        self.stats.last_arm = Some(arm);
        self.t += 1;
        self.cum.reward += reward;
        self.cum.expected += self.means[arm];
        self.cum.eta = self.stats.eta;
        self.cum.frame = self.t;
        self.cum.computations = self.stats.computations;
        if let Some(p) = self.plays.as_mut() {
            p.push(arm);
        }
        self.recorder.observe(self.t, &self.cum);
    }

    fn charge(&mut self, arm: usize, cost: f64) {
        self.stats.computations += 1;
        if arm == self.optimal {
            self.stats.optimal_computations += 1;
        } else {
            self.stats.suboptimal_computations += 1;
        }
        self.cum.cost += cost;
    }

    fn finish(self, decisions: Vec<Decision>) -> SingleRun {
        let trace = self.recorder.finish(vec![self.stats.counts().to_vec()]);
        SingleRun { trace, stats: self.stats, decisions, plays: self.plays }
    }
}

/// Recording/diagnostic switches shared by the single-player engines.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub grid_ratio: f64,
    pub record_plays: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { grid_ratio: 1.1, record_plays: false }
    }
}

/// UCB1 whose indices are recomputed once every `l` slots.
///
/// Each arm is played once, then the argmax of the UCB1 indices is played
/// for the next `l` slots.
pub fn run_ucb1_l(arms: &[IidArm], l: u64, horizon: u64, seed: u64, opts: RunOptions) -> Result<SingleRun> {
    let n = arms.len();
    if n < 2 {
        return Err(Error::Precondition(format!("need at least 2 arms, got {n}")));
    }
    if l == 0 {
        return Err(Error::param("recompute_every", "must be at least 1"));
    }
    if horizon < n as u64 * l {
        return Err(Error::Precondition(format!("horizon {horizon} is shorter than N*L = {}", n as u64 * l)));
    }
    let spec = IndexSpec::ucb1();
    let models = arms.iter().cloned().map(ArmModel::Iid).collect();
    let mut env = Env::new(models, horizon, seed, opts.grid_ratio, opts.record_plays);
    for j in 0..n {
        env.play(j);
    }
    let mut decisions = Vec::new();
    while env.t < horizon {
        let now = env.t as f64;
        let indices = (0..n)
            .map(|j| spec.raw_index(&env.stats, j, now))
            .collect::<Result<Vec<_>>>()?;
        let best = epsilon_argmax(&indices, 0.0);
        env.stats.indices = indices;
        let changed = env.stats.last_arm != Some(best);
        env.charge(best, 0.0);
        decisions.push(Decision { tick: env.t + 1, arm: best, changed, precision: 0.0 });
        for _ in 0..l.min(horizon - env.t) {
            env.play(best);
        }
    }
    Ok(env.finish(decisions))
}

/// UCB4: indices are recomputed only when the epoch counter is a power of
/// two; the counter restarts whenever the chosen arm changes.
pub fn run_ucb4(
    arms: Vec<ArmModel>,
    spec: &IndexSpec,
    cost: &CostModel,
    horizon: u64,
    seed: u64,
    opts: RunOptions,
) -> Result<SingleRun> {
    let n = arms.len();
    if n < 2 {
        return Err(Error::Precondition(format!("need at least 2 arms, got {n}")));
    }
    if horizon < n as u64 {
        return Err(Error::Precondition(format!("horizon {horizon} is shorter than N = {n}")));
    }
    let mut env = Env::new(arms, horizon, seed, opts.grid_ratio, opts.record_plays);
    for j in 0..n {
        env.play(j);
    }
    env.stats.eta = 1;
    let mut current = n - 1;
    let mut decisions = Vec::new();
    while env.t < horizon {
        if env.stats.eta.is_power_of_two() {
            let now = env.t as f64;
            let eps = spec.precision.at(now);
            let raw = (0..n)
                .map(|j| spec.raw_index(&env.stats, j, now))
                .collect::<Result<Vec<_>>>()?;
            let best = epsilon_argmax(&raw, eps);
            env.stats.indices = raw.iter().map(|&g| quantize(g, eps)).collect();
            let c = cost.cost(eps);
            if !c.is_finite() {
                return Err(Error::param("cost", "infinite computation cost at this precision"));
            }
            env.charge(best, c);
            let changed = best != current;
            decisions.push(Decision { tick: env.t + 1, arm: best, changed, precision: eps });
            if changed {
                env.stats.eta = 1;
                current = best;
            }
        }
        env.play(current);
        env.stats.eta += 1;
    }
    Ok(env.finish(decisions))
}
