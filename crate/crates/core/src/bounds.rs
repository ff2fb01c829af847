//! Closed-form regret upper bounds and the model constants they depend on.
//!
//! All logarithms are natural. Every evaluator refuses to return a number
//! when a denominator would vanish or a precondition on `kappa` fails.

use crate::arms::MarkovArm;
use crate::error::{Error, Result};
use crate::matching::{brute_force_matching, for_each_matching, ValueMatrix};
use crate::policy::{CostModel, Schedule};
use std::f64::consts::PI;

/// Suboptimality gaps of arms (one player) or matchings (several players).
#[derive(Debug, Clone, PartialEq)]
pub struct GapStats {
    /// Gaps of all suboptimal arms or matchings, in enumeration order.
    pub deltas: Vec<f64>,
    pub delta_min: f64,
    pub delta_max: f64,
    /// Best mean (single player) or optimal surplus.
    pub best: f64,
    /// Optimal arm, or optimal assignment.
    pub optimal: Vec<usize>,
}

impl GapStats {
    fn from_deltas(deltas: Vec<f64>, best: f64, optimal: Vec<usize>) -> Result<Self> {
        let delta_min = deltas.iter().copied().fold(f64::INFINITY, f64::min);
        let delta_max = deltas.iter().copied().fold(0.0, f64::max);
        if deltas.is_empty() {
            return Err(Error::UndefinedBound("no suboptimal alternative exists".into()));
        }
        if !(delta_min > 0.0) {
            return Err(Error::UndefinedBound("smallest gap is zero".into()));
        }
        Ok(GapStats { deltas, delta_min, delta_max, best, optimal })
    }
}

/// Gaps `mu_1 - mu_j` of a single player's arms.
pub fn gap_stats_single(means: &[f64]) -> Result<GapStats> {
    if means.len() < 2 {
        return Err(Error::param("means", "need at least two arms"));
    }
    let (best_arm, best) = means
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (j, v)| if v > acc.1 { (j, v) } else { acc });
    let deltas = means.iter().enumerate().filter(|&(j, _)| j != best_arm).map(|(_, &v)| best - v).collect();
    GapStats::from_deltas(deltas, best, vec![best_arm])
}

/// Gaps `mu** - surplus(k)` of every non-optimal matching.
pub fn gap_stats_multi(values: &ValueMatrix) -> Result<GapStats> {
    let (opt, best) = brute_force_matching(values)?;
    let mut deltas = Vec::new();
    for_each_matching(values.players(), values.arms(), |a| {
        if a != opt.assignment() {
            let s: f64 = a.iter().enumerate().map(|(i, &j)| values.get(i, j)).sum();
            deltas.push(best - s);
        }
    });
    GapStats::from_deltas(deltas, best, opt.assignment().to_vec())
}

/// Constants of a family of Markov arms.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovConstants {
    /// `sum_j sum_x x / pi^j_min` over every arm (or player-arm pair).
    pub k: f64,
    /// `|X|_max / pi_min`.
    pub d: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    /// Largest state-space size.
    pub states_max: usize,
    pub pi_min: f64,
    /// Smallest admissible exploration coefficient (exclusive).
    pub kappa_threshold: f64,
}

impl MarkovConstants {
    fn collect<'a>(arms: impl Iterator<Item = &'a MarkovArm>, factor: f64) -> Result<Self> {
        let mut k = 0.0;
        let mut pi_min = f64::INFINITY;
        let mut rho_min = f64::INFINITY;
        let mut rho_max = f64::NEG_INFINITY;
        let mut states_max = 0;
        let mut any = false;
        for arm in arms {
            any = true;
            let s = arm.chain_stats()?;
            k += arm.rewards().iter().sum::<f64>() / s.pi_min;
            pi_min = pi_min.min(s.pi_min);
            rho_min = rho_min.min(s.rho);
            rho_max = rho_max.max(s.rho);
            states_max = states_max.max(s.cardinality);
        }
        if !any {
            return Err(Error::param("arms", "need at least one chain"));
        }
        if !(rho_min > 0.0) {
            return Err(Error::UndefinedBound("a chain has zero eigenvalue gap".into()));
        }
        let x = states_max as f64;
        Ok(MarkovConstants {
            k,
            d: x / pi_min,
            rho_min,
            rho_max,
            states_max,
            pi_min,
            kappa_threshold: factor * x * x / rho_min,
        })
    }

    /// Constants for one player; threshold `168 |X|^2 / rho_min`.
    pub fn single(arms: &[MarkovArm]) -> Result<Self> {
        Self::collect(arms.iter(), 168.0)
    }

    /// Constants for `M` players; threshold `(112 + 56M) |X|^2 / rho_min`.
    pub fn multi(arms: &[Vec<MarkovArm>]) -> Result<Self> {
        let m = arms.len() as f64;
        Self::collect(arms.iter().flatten(), 112.0 + 56.0 * m)
    }
}

/// Precision of index computations: a known constant, or a decreasing schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonMode {
    Known(f64),
    Unknown(Schedule),
}

fn log_horizon(t: f64) -> Result<f64> {
    if !(t >= 1.0) {
        return Err(Error::UndefinedBound(format!("horizon {t} is below 1")));
    }
    Ok(t.ln())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::param("eps", "must be a finite non-negative number"));
    }
    Ok(())
}

fn check_kappa(kappa: f64, c: &MarkovConstants) -> Result<()> {
    if !(kappa > c.kappa_threshold) {
        return Err(Error::UndefinedBound(format!(
            "kappa {kappa} does not exceed the threshold {}",
            c.kappa_threshold
        )));
    }
    Ok(())
}

fn finite_cost(c: f64) -> Result<f64> {
    if c.is_finite() && c >= 0.0 {
        Ok(c)
    } else {
        Err(Error::UndefinedBound(format!("computation cost {c} is not finite")))
    }
}

/// Relative distance to a pole below which a denominator counts as zero.
const POLE_TOL: f64 = 1e-12;

/// `sum_j coef * ln T / (Delta_j - shift)^2`, refusing a vanishing denominator.
fn shifted_sum(gaps: &GapStats, coef: f64, log_t: f64, shift: f64) -> Result<f64> {
    let mut s = 0.0;
    for &d in &gaps.deltas {
        let g = d - shift;
        if !(g > POLE_TOL * d) {
            return Err(Error::UndefinedBound(format!("precision {shift} is not below the gap {d}")));
        }
        s += coef * log_t / (g * g);
    }
    Ok(s)
}

/// First `t >= 1` with `g(t) < target`, for nonincreasing `g`.
fn first_below(g: impl Fn(u64) -> f64, target: f64) -> Result<u64> {
    if g(1) < target {
        return Ok(1);
    }
    let mut hi = 2u64;
    while g(hi) >= target {
        if hi >= 1 << 62 {
            return Err(Error::UndefinedBound("schedule never drops below the required precision".into()));
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if g(mid) < target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// UCB1 recomputed every `L` slots:
/// `sum_j 8 L ln T / Delta_j + L (1 + pi^2/3) sum_j Delta_j`.
pub fn bound_t1(gaps: &GapStats, l: u64, t: f64) -> Result<f64> {
    let log_t = log_horizon(t)?;
    let l = l as f64;
    let a: f64 = gaps.deltas.iter().map(|d| 8.0 * l * log_t / d).sum();
    let b: f64 = gaps.deltas.iter().sum();
    Ok(a + l * (1.0 + PI * PI / 3.0) * b)
}

/// UCB4 with cost `C` per computation:
/// `(Delta_max + C (1 + ln T)) (sum_j 12 ln T / Delta_j^2 + 2N)`.
pub fn bound_t2(gaps: &GapStats, c: f64, n: usize, t: f64) -> Result<f64> {
    let log_t = log_horizon(t)?;
    let plays = shifted_sum(gaps, 12.0, log_t, 0.0)? + 2.0 * n as f64;
    Ok((gaps.delta_max + c * (1.0 + log_t)) * plays)
}

/// UCB4 with eps-precise indices. With an unknown precision the bound holds
/// only past `t0 = min{t : eps_t < Delta_min / 2}`.
pub fn bound_t3(gaps: &GapStats, cost: &CostModel, mode: EpsilonMode, n: usize, t: f64) -> Result<f64> {
    let log_t = log_horizon(t)?;
    match mode {
        EpsilonMode::Known(eps) => {
            check_eps(eps)?;
            let c = finite_cost(cost.cost(eps))?;
            let plays = shifted_sum(gaps, 12.0, log_t, eps)? + 2.0 * n as f64;
            Ok((gaps.delta_max + c * (1.0 + log_t)) * plays)
        }
        EpsilonMode::Unknown(schedule) => {
            let eps_min = gaps.delta_min / 2.0;
            let t0 = first_below(|s| schedule.value(s as f64), eps_min)?;
            if t <= t0 as f64 {
                return Err(Error::UndefinedBound(format!("horizon {t} does not exceed t0 = {t0}")));
            }
            let prefix = (gaps.delta_max + finite_cost(cost.cost(eps_min))?) * t0 as f64;
            let c_t = finite_cost(cost.cost(schedule.value(t)))?;
            let plays = shifted_sum(gaps, 12.0, log_t, eps_min)? + 2.0 * n as f64;
            Ok(prefix + (gaps.delta_max + c_t * (1.0 + log_t)) * plays)
        }
    }
}

/// UCB4 on Markov arms with coefficient `kappa`:
/// `(Delta_max + C (1 + ln T)) (sum_j 4 kappa ln T / Delta_j^2 + N (2D + 1)) + K`.
pub fn bound_t4(gaps: &GapStats, consts: &MarkovConstants, kappa: f64, c: f64, n: usize, t: f64) -> Result<f64> {
    bound_t5(gaps, consts, kappa, 0.0, c, n, t)
}

/// Markov arms with eps-precise indices and per-computation cost `c_eps = C(eps)`.
pub fn bound_t5(
    gaps: &GapStats,
    consts: &MarkovConstants,
    kappa: f64,
    eps: f64,
    c_eps: f64,
    n: usize,
    t: f64,
) -> Result<f64> {
    let log_t = log_horizon(t)?;
    check_eps(eps)?;
    check_kappa(kappa, consts)?;
    let c = finite_cost(c_eps)?;
    let plays = shifted_sum(gaps, 4.0 * kappa, log_t, eps)? + n as f64 * (2.0 * consts.d + 1.0);
    Ok((gaps.delta_max + c * (1.0 + log_t)) * plays + consts.k)
}

/// Frame length of a decentralized run: fixed with a known precision, or a
/// growing schedule with precision map `f(L)`.
#[derive(Clone, Copy)]
pub enum FrameMode<'a> {
    Known { eps: f64, l: u64 },
    Unknown { frame: Schedule, f: &'a dyn Fn(u64) -> f64 },
}

fn frame_at(s: &Schedule, t: f64) -> u64 {
    s.value(t).max(1.0) as u64
}

fn matching_pole(gaps: &GapStats, m: usize, eps: f64) -> Result<f64> {
    let g = gaps.delta_min - (m as f64 + 1.0) * eps;
    if !(g > POLE_TOL * gaps.delta_min) {
        return Err(Error::UndefinedBound(format!(
            "(M+1) eps = {} is not below Delta_min = {}",
            (m as f64 + 1.0) * eps,
            gaps.delta_min
        )));
    }
    Ok(g * g)
}

/// dUCB4 on i.i.d. arms:
/// `(L Delta_max + C (1 + ln T)) (4 M^3 (M+2) N ln T / (Delta_min - (M+1) eps)^2 + N M (2M + 1))`.
///
/// The unknown-precision form adds `(L_t0 Delta_max + C(f(L_t0))) t0` with
/// `t0 = min{t : f(L_t) < Delta_min / (2 (M + 1))}`.
pub fn bound_t6(gaps: &GapStats, m: usize, n: usize, mode: FrameMode<'_>, cost: &CostModel, t: f64) -> Result<f64> {
    let log_t = log_horizon(t)?;
    let (mf, nf) = (m as f64, n as f64);
    let lead = 4.0 * mf.powi(3) * (mf + 2.0) * nf * log_t;
    let tail = nf * mf * (2.0 * mf + 1.0);
    match mode {
        FrameMode::Known { eps, l } => {
            check_eps(eps)?;
            let den = matching_pole(gaps, m, eps)?;
            let c = finite_cost(cost.cost(eps))?;
            Ok((l as f64 * gaps.delta_max + c * (1.0 + log_t)) * (lead / den + tail))
        }
        FrameMode::Unknown { frame, f } => {
            let eps_min = gaps.delta_min / (2.0 * (mf + 1.0));
            let t0 = first_below(|s| f(frame_at(&frame, s as f64)), eps_min)?;
            if t <= t0 as f64 {
                return Err(Error::UndefinedBound(format!("horizon {t} does not exceed t0 = {t0}")));
            }
            let l0 = frame_at(&frame, t0 as f64);
            let prefix = (l0 as f64 * gaps.delta_max + finite_cost(cost.cost(f(l0)))?) * t0 as f64;
            let lt = frame_at(&frame, t);
            let c_t = finite_cost(cost.cost(f(lt)))?;
            let den = (gaps.delta_min - eps_min).powi(2);
            Ok(prefix + (lt as f64 * gaps.delta_max + c_t * (1.0 + log_t)) * (lead / den + tail))
        }
    }
}

/// dUCB4 on Markov arms:
/// `(L Delta_max + C (1 + ln T)) (4 M^3 kappa N ln T / (Delta_min - (M+1) eps)^2 + (2MD + 1) M N) + K~`.
#[allow(clippy::too_many_arguments)]
pub fn bound_t7(
    gaps: &GapStats,
    m: usize,
    n: usize,
    eps: f64,
    l: u64,
    kappa: f64,
    consts: &MarkovConstants,
    cost: &CostModel,
    t: f64,
) -> Result<f64> {
    let log_t = log_horizon(t)?;
    check_eps(eps)?;
    check_kappa(kappa, consts)?;
    let den = matching_pole(gaps, m, eps)?;
    let c = finite_cost(cost.cost(eps))?;
    let (mf, nf) = (m as f64, n as f64);
    let plays = 4.0 * mf.powi(3) * kappa * nf * log_t / den + (2.0 * mf * consts.d + 1.0) * mf * nf;
    Ok((l as f64 * gaps.delta_max + c * (1.0 + log_t)) * plays + consts.k)
}
