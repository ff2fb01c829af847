use super::config::{Plan, Scenario, SimConfig};
use crate::arms::{ArmModel, MarkovArm};
use crate::bounds::{self, EpsilonMode, FrameMode, GapStats, MarkovConstants};
use crate::error::{Error, Result};
use crate::matching::ValueMatrix;
use crate::policy::{run_ucb1_l, run_ucb4, Kappa, Precision, RunOptions};
use crate::protocol::{default_precision, resolve_precisions, run_ducb4, FrameLength};
use crate::trace::{recording_grid, RegretTrace};

/// Environment variable consulted for the worker count when the config has none.
pub const WORKERS_ENV: &str = "DMAB_WORKERS";

/// Aggregate over seeds at one recorded time.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub t: u64,
    pub regret_mean: f64,
    pub regret_min: f64,
    pub regret_max: f64,
    /// Regret bound at `t`, NaN where none applies.
    pub bound: f64,
    pub m_t_mean: f64,
    pub collisions_mean: f64,
}

/// End-of-run figures of one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedSummary {
    pub seed: u64,
    pub regret: f64,
    /// Recomputations (single player) or decision frames.
    pub computations: u64,
    /// Successful plays per (player, arm).
    pub counts: Vec<Vec<u64>>,
    pub collisions: u64,
    pub exploitation_collisions: u64,
    /// Negotiations that ran out of subframes.
    pub exhausted: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchResult {
    pub rows: Vec<Row>,
    pub seeds: Vec<SeedSummary>,
    /// Which bound fills the `bound` column.
    pub bound_name: &'static str,
    /// Why the bound column is (partly) missing, if it is.
    pub bound_note: Option<String>,
}

/// Runs one seed of a validated plan.
pub fn run_seed(plan: &Plan, horizon: u64, stride: f64, seed: u64) -> Result<(RegretTrace, SeedSummary)> {
    let opts = RunOptions { grid_ratio: stride, record_plays: false };
    let (trace, computations, collisions, exploitation_collisions, exhausted) = match plan {
        Plan::Ucb1 { arms, l } => {
            let r = run_ucb1_l(arms, *l, horizon, seed, opts)?;
            (r.trace, r.stats.computations, 0, 0, 0)
        }
        Plan::Ucb4 { arms, spec, cost } => {
            let r = run_ucb4(arms.clone(), spec, cost, horizon, seed, opts)?;
            (r.trace, r.stats.computations, 0, 0, 0)
        }
        Plan::Ducb4 { arms, cfg } => {
            let r = run_ducb4(arms.clone(), cfg, horizon, seed)?;
            (r.trace, r.decision_frames, r.collisions, r.exploitation_collisions, r.exhausted)
        }
    };
    let summary = SeedSummary {
        seed,
        regret: trace.last().map_or(0.0, |p| p.regret),
        computations,
        counts: trace.counts.clone(),
        collisions,
        exploitation_collisions,
        exhausted,
    };
    Ok((trace, summary))
}

fn worker_count(config: &SimConfig) -> Option<usize> {
    config
        .workers
        .or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse().ok()))
        .filter(|&w| w > 0)
}

/// Sum of `values` taken in ascending order, so that the result does not
/// depend on the order of the seeds.
fn ordered_mean(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum::<f64>() / values.len() as f64
}

/// Runs every seed of `config` (in parallel), aggregates the traces and
/// attaches the applicable bound curve.
pub fn run_batch(config: &SimConfig) -> Result<BatchResult> {
    let plan = config.plan()?;
    let seeds = config.seed_list();
    let run = || {
        use rayon::prelude::*;
        seeds
            .par_iter()
            .map(|&s| run_seed(&plan, config.horizon, config.stride, s))
            .collect::<Vec<_>>()
    };
    let results = match worker_count(config) {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::config("workers", e.to_string()))?
            .install(run),
        None => run(),
    };
    let mut traces = Vec::with_capacity(results.len());
    let mut summaries = Vec::with_capacity(results.len());
    for (seed, r) in seeds.iter().zip(results) {
        let (t, s) = r.map_err(|e| Error::Seed { seed: *seed, source: Box::new(e) })?;
        traces.push(t);
        summaries.push(s);
    }

    let grid: Vec<u64> = traces[0].points.iter().map(|p| p.t).collect();
    if traces.iter().any(|tr| tr.points.len() != grid.len()) {
        return Err(Error::Precondition("seed traces were recorded on different grids".into()));
    }
    let curve = bound_curve(config, &plan, &grid);
    let mut rows = Vec::with_capacity(grid.len());
    for (k, &t) in grid.iter().enumerate() {
        let mut regret: Vec<f64> = traces.iter().map(|tr| tr.points[k].regret).collect();
        let mut m: Vec<f64> = traces.iter().map(|tr| tr.points[k].computations as f64).collect();
        let mut col: Vec<f64> = traces.iter().map(|tr| tr.points[k].collisions as f64).collect();
        let mean = ordered_mean(&mut regret);
        rows.push(Row {
            t,
            regret_mean: mean,
            regret_min: regret[0],
            regret_max: regret[regret.len() - 1],
            bound: curve.values[k],
            m_t_mean: ordered_mean(&mut m),
            collisions_mean: ordered_mean(&mut col),
        });
    }
    Ok(BatchResult { rows, seeds: summaries, bound_name: curve.name, bound_note: curve.note })
}

/// Bound values on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub name: &'static str,
    pub times: Vec<u64>,
    pub values: Vec<f64>,
    pub note: Option<String>,
}

/// Bound curve for `config` on its own recording grid.
pub fn bounds_only(config: &SimConfig) -> Result<BoundCurve> {
    let plan = config.plan()?;
    let grid = recording_grid(config.horizon, config.stride);
    Ok(bound_curve(config, &plan, &grid))
}

fn markov_rows(arms: &[Vec<ArmModel>]) -> Vec<Vec<MarkovArm>> {
    arms.iter()
        .map(|r| r.iter().filter_map(|a| a.as_markov().cloned()).collect())
        .collect()
}

fn means(arms: &[Vec<ArmModel>]) -> Vec<Vec<f64>> {
    arms.iter().map(|r| r.iter().map(ArmModel::mean).collect()).collect()
}

type Evaluator = Box<dyn Fn(f64) -> Result<f64>>;

fn bound_curve(config: &SimConfig, plan: &Plan, grid: &[u64]) -> BoundCurve {
    let (name, eval) = match evaluator(config, plan) {
        Ok(x) => x,
        Err(e) => {
            return BoundCurve {
                name: "none",
                times: grid.to_vec(),
                values: vec![f64::NAN; grid.len()],
                note: Some(e.to_string()),
            }
        }
    };
    let mut note = None;
    let values = grid
        .iter()
        .map(|&t| match eval(t as f64) {
            Ok(v) => v,
            Err(e) => {
                note.get_or_insert_with(|| e.to_string());
                f64::NAN
            }
        })
        .collect();
    BoundCurve { name, times: grid.to_vec(), values, note }
}

fn evaluator(config: &SimConfig, plan: &Plan) -> Result<(&'static str, Evaluator)> {
    let cost = config.cost();
    match plan {
        Plan::Ucb1 { arms, l } => {
            let g = bounds::gap_stats_single(&arms.iter().map(|a| a.mean()).collect::<Vec<_>>())?;
            let l = *l;
            Ok(("t1", Box::new(move |t| bounds::bound_t1(&g, l, t))))
        }
        Plan::Ucb4 { arms, spec, .. } => {
            let n = arms.len();
            let g = bounds::gap_stats_single(&arms.iter().map(ArmModel::mean).collect::<Vec<_>>())?;
            if config.scenario == Scenario::SingleMarkov {
                let chains: Vec<MarkovArm> = arms.iter().filter_map(|a| a.as_markov().cloned()).collect();
                let k = MarkovConstants::single(&chains)?;
                let kappa = match spec.kappa {
                    Kappa::Constant(v) => v,
                    Kappa::Schedule(_) => {
                        return Err(Error::UndefinedBound("growing kappa has no closed-form bound".into()))
                    }
                };
                match spec.precision {
                    Precision::Exact => Ok(("t4", Box::new(move |t| bounds::bound_t4(&g, &k, kappa, cost.cost(0.0), n, t)))),
                    Precision::Fixed(e) => {
                        Ok(("t5", Box::new(move |t| bounds::bound_t5(&g, &k, kappa, e, cost.cost(e), n, t))))
                    }
                    Precision::Schedule(_) => {
                        Err(Error::UndefinedBound("decreasing precision on Markov arms has no closed-form bound".into()))
                    }
                }
            } else {
                match spec.precision {
                    Precision::Exact => Ok(("t2", Box::new(move |t| bounds::bound_t2(&g, cost.cost(0.0), n, t)))),
                    Precision::Fixed(e) => {
                        Ok(("t3", Box::new(move |t| bounds::bound_t3(&g, &cost, EpsilonMode::Known(e), n, t))))
                    }
                    Precision::Schedule(s) => {
                        Ok(("t3", Box::new(move |t| bounds::bound_t3(&g, &cost, EpsilonMode::Unknown(s), n, t))))
                    }
                }
            }
        }
        Plan::Ducb4 { arms, cfg } => {
            let (m, n) = (arms.len(), arms[0].len());
            let g: GapStats = bounds::gap_stats_multi(&ValueMatrix::new(means(arms))?)?;
            let (signaling, eps1, eps2) = (cfg.signaling, cfg.eps1, cfg.eps2);
            let eps_at = move |l: u64| resolve_precisions(l, m, signaling, eps1, eps2).eps;
            match (config.scenario, cfg.frame) {
                (Scenario::DecentralIid, FrameLength::Fixed(l)) => {
                    let eps = eps_at(l);
                    Ok(("t6", Box::new(move |t| bounds::bound_t6(&g, m, n, FrameMode::Known { eps, l }, &cost, t))))
                }
                (Scenario::DecentralIid, FrameLength::Schedule(frame)) => {
                    if eps1.is_some() || eps2.is_some() {
                        return Err(Error::UndefinedBound(
                            "growing frames need the precision to follow the frame length".into(),
                        ));
                    }
                    let f = move |l: u64| default_precision(l, m);
                    Ok((
                        "t6",
                        Box::new(move |t| bounds::bound_t6(&g, m, n, FrameMode::Unknown { frame, f: &f }, &cost, t)),
                    ))
                }
                (_, FrameLength::Fixed(l)) => {
                    let k = MarkovConstants::multi(&markov_rows(arms))?;
                    let kappa = match cfg.kappa {
                        Some(Kappa::Constant(v)) => v,
                        _ => return Err(Error::UndefinedBound("growing kappa has no closed-form bound".into())),
                    };
                    let eps = eps_at(l);
                    Ok(("t7", Box::new(move |t| bounds::bound_t7(&g, m, n, eps, l, kappa, &k, &cost, t))))
                }
                (_, FrameLength::Schedule(_)) => {
                    Err(Error::UndefinedBound("growing frames on Markov arms have no closed-form bound".into()))
                }
            }
        }
    }
}
