//! TOML experiment configuration.

use crate::arms::{ArmModel, IidArm, MarkovArm, RewardDomain};
use crate::error::{Error, Result};
use crate::policy::{CostModel, IndexSpec, Kappa, Precision, Schedule};
use crate::protocol::{DucbConfig, FrameLength, Signaling};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    SingleIid,
    SingleMarkov,
    DecentralIid,
    DecentralMarkov,
}

impl Scenario {
    pub fn is_markov(self) -> bool {
        matches!(self, Scenario::SingleMarkov | Scenario::DecentralMarkov)
    }

    pub fn is_decentralized(self) -> bool {
        matches!(self, Scenario::DecentralIid | Scenario::DecentralMarkov)
    }
}

/// A seed count (`base_seed .. base_seed + n`) or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    Count(u64),
    List(Vec<u64>),
}

/// One row of values (single player) or a player x arm matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Row(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

impl Grid {
    pub fn rows(&self) -> Vec<Vec<f64>> {
        match self {
            Grid::Row(r) => vec![r.clone()],
            Grid::Matrix(m) => m.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CellSpec {
    Bernoulli {
        p: f64,
    },
    Discrete {
        values: Vec<f64>,
        probs: Vec<f64>,
    },
    Markov {
        rewards: Vec<f64>,
        transition: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        initial: Option<Vec<f64>>,
    },
    TwoState {
        p01: f64,
        p10: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArmsSpec {
    /// Bernoulli arms given by their means.
    Bernoulli { means: Grid },
    /// Two-state chains on rewards {0, 1}.
    TwoState { p01: Grid, p10: Grid },
    /// Arbitrary arm per cell.
    Cells { cells: Vec<Vec<CellSpec>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Ucb1,
    Ucb4,
    Ducb4,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<Algorithm>,
    /// UCB1 recomputation period `L`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recompute_every: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame_length: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame_schedule: Option<Schedule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signaling: Option<Signaling>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_schedule: Option<Schedule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_schedule: Option<Schedule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<CostModel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub scenario: Scenario,
    /// Slots per run.
    pub horizon: u64,
    pub seeds: Seeds,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Ratio of the geometric recording grid (1 records every slot).
    #[serde(default = "default_stride")]
    pub stride: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    pub arms: ArmsSpec,
    #[serde(default)]
    pub policy: PolicySpec,
}

fn default_stride() -> f64 {
    1.1
}

/// A validated, ready-to-run configuration.
#[derive(Debug, Clone)]
pub enum Plan {
    Ucb1 { arms: Vec<IidArm>, l: u64 },
    Ucb4 { arms: Vec<ArmModel>, spec: IndexSpec, cost: CostModel },
    Ducb4 { arms: Vec<Vec<ArmModel>>, cfg: DucbConfig },
}

fn field_err(field: &str, e: Error) -> Error {
    match e {
        Error::Config { .. } => e,
        other => Error::config(field, other.to_string()),
    }
}

fn positive(field: &str, v: Option<f64>) -> Result<()> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(Error::config(field, "must be a positive number")),
        _ => Ok(()),
    }
}

fn cell(spec: &CellSpec) -> Result<ArmModel> {
    Ok(match spec {
        CellSpec::Bernoulli { p } => IidArm::bernoulli(*p)?.into(),
        CellSpec::Discrete { values, probs } => IidArm::discrete(values.clone(), probs.clone())?.into(),
        CellSpec::Markov { rewards, transition, initial } => {
            MarkovArm::with_domain(rewards.clone(), transition.clone(), initial.clone(), RewardDomain::ZeroAllowed)?.into()
        }
        CellSpec::TwoState { p01, p10 } => MarkovArm::two_state(*p01, *p10)?.into(),
    })
}

impl SimConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            let field = msg
                .split('`')
                .nth(1)
                .filter(|_| msg.contains("field"))
                .unwrap_or("<document>")
                .to_string();
            Error::config(field, e.to_string().trim_end())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("<document>", e.to_string()))
    }

    pub fn seed_list(&self) -> Vec<u64> {
        match &self.seeds {
            Seeds::Count(n) => (0..*n).map(|k| self.base_seed + k).collect(),
            Seeds::List(v) => v.clone(),
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        self.policy.algorithm.unwrap_or(if self.scenario.is_decentralized() {
            Algorithm::Ducb4
        } else {
            Algorithm::Ucb4
        })
    }

    pub fn cost(&self) -> CostModel {
        self.policy.cost.unwrap_or(CostModel { base: 0.0, per_bit: 0.0, accrue: true })
    }

    /// Player x arm grid of reward models.
    pub fn build_arms(&self) -> Result<Vec<Vec<ArmModel>>> {
        let grid: Vec<Vec<ArmModel>> = match &self.arms {
            ArmsSpec::Bernoulli { means } => means
                .rows()
                .iter()
                .map(|r| r.iter().map(|&p| IidArm::bernoulli(p).map(ArmModel::from)).collect())
                .collect::<Result<_>>()
                .map_err(|e| field_err("arms.means", e))?,
            ArmsSpec::TwoState { p01, p10 } => {
                let (a, b) = (p01.rows(), p10.rows());
                if a.len() != b.len() || a.iter().zip(&b).any(|(x, y)| x.len() != y.len()) {
                    return Err(Error::config("arms.p10", "must have the same shape as arms.p01"));
                }
                a.iter()
                    .zip(&b)
                    .map(|(x, y)| x.iter().zip(y).map(|(&u, &v)| MarkovArm::two_state(u, v).map(ArmModel::from)).collect())
                    .collect::<Result<_>>()
                    .map_err(|e| field_err("arms.p01", e))?
            }
            ArmsSpec::Cells { cells } => cells
                .iter()
                .map(|r| r.iter().map(cell).collect())
                .collect::<Result<_>>()
                .map_err(|e| field_err("arms.cells", e))?,
        };
        let n = grid.first().map_or(0, Vec::len);
        if grid.is_empty() || n == 0 || grid.iter().any(|r| r.len() != n) {
            return Err(Error::config("arms", "need a non-empty rectangular grid of arms"));
        }
        let markov = self.scenario.is_markov();
        if grid.iter().flatten().any(|a| a.is_markov() != markov) {
            let want = if markov { "Markov" } else { "i.i.d." };
            return Err(Error::config("arms", format!("scenario requires {want} arms only")));
        }
        if !self.scenario.is_decentralized() && grid.len() != 1 {
            return Err(Error::config("arms", "single-player scenarios take exactly one row of arms"));
        }
        if grid.len() > n {
            return Err(Error::config("arms", format!("{} players but only {n} arms", grid.len())));
        }
        Ok(grid)
    }

    fn kappa(&self) -> Result<Option<Kappa>> {
        let p = &self.policy;
        match (p.kappa, p.kappa_schedule) {
            (Some(_), Some(_)) => Err(Error::config("policy.kappa", "give either kappa or kappa_schedule, not both")),
            (Some(_), None) | (None, Some(_)) if !self.scenario.is_markov() => {
                Err(Error::config("policy.kappa", "only Markov scenarios take an exploration coefficient"))
            }
            (Some(k), None) => {
                positive("policy.kappa", Some(k))?;
                Ok(Some(Kappa::Constant(k)))
            }
            (None, Some(s)) => Ok(Some(Kappa::Schedule(s))),
            (None, None) if self.scenario.is_markov() => {
                Err(Error::config("policy.kappa", "Markov scenarios need kappa or kappa_schedule"))
            }
            (None, None) => Ok(None),
        }
    }

    /// Validates every field and resolves the run plan.
    pub fn plan(&self) -> Result<Plan> {
        if self.horizon == 0 {
            return Err(Error::config("horizon", "must be at least 1"));
        }
        if !(self.stride >= 1.0 && self.stride.is_finite()) {
            return Err(Error::config("stride", "must be a finite ratio >= 1"));
        }
        if self.seed_list().is_empty() {
            return Err(Error::config("seeds", "need at least one seed"));
        }
        if self.workers == Some(0) {
            return Err(Error::config("workers", "must be at least 1"));
        }
        let p = &self.policy;
        positive("policy.eps1", p.eps1)?;
        positive("policy.eps2", p.eps2)?;
        let cost = self.cost();
        if !(cost.base >= 0.0 && cost.per_bit >= 0.0 && cost.base.is_finite() && cost.per_bit.is_finite()) {
            return Err(Error::config("policy.cost", "base and per_bit must be finite and non-negative"));
        }
        let kappa = self.kappa()?;
        let arms = self.build_arms()?;
        let n = arms[0].len() as u64;
        let m = arms.len() as u64;
        match (self.algorithm(), self.scenario.is_decentralized()) {
            (Algorithm::Ducb4, false) => Err(Error::config("policy.algorithm", "ducb4 needs a decentralized scenario")),
            (Algorithm::Ucb1 | Algorithm::Ucb4, true) => {
                Err(Error::config("policy.algorithm", "decentralized scenarios run ducb4"))
            }
            (Algorithm::Ucb1, false) => {
                if self.scenario.is_markov() {
                    return Err(Error::config("policy.algorithm", "ucb1 is defined for i.i.d. arms only"));
                }
                let l = p.recompute_every.unwrap_or(1);
                if l == 0 {
                    return Err(Error::config("policy.recompute_every", "must be at least 1"));
                }
                if n < 2 {
                    return Err(Error::config("arms", "need at least two arms"));
                }
                if self.horizon < n * l {
                    return Err(Error::config("horizon", format!("must be at least N * L = {}", n * l)));
                }
                let arms = arms
                    .into_iter()
                    .flatten()
                    .map(|a| match a {
                        ArmModel::Iid(x) => x,
                        ArmModel::Markov(_) => unreachable!("checked by build_arms"),
                    })
                    .collect();
                Ok(Plan::Ucb1 { arms, l })
            }
            (Algorithm::Ucb4, false) => {
                if n < 2 {
                    return Err(Error::config("arms", "need at least two arms"));
                }
                if self.horizon < n {
                    return Err(Error::config("horizon", format!("must be at least N = {n}")));
                }
                let precision = match (p.eps2, p.eps_schedule) {
                    (Some(_), Some(_)) => {
                        return Err(Error::config("policy.eps2", "give either eps2 or eps_schedule, not both"))
                    }
                    (Some(e), None) => Precision::Fixed(e),
                    (None, Some(s)) => Precision::Schedule(s),
                    (None, None) => Precision::Exact,
                };
                if precision == Precision::Exact && !cost.cost(0.0).is_finite() {
                    return Err(Error::config("policy.cost", "exact indices have infinite cost when per_bit > 0"));
                }
                let base = match kappa {
                    Some(k) => IndexSpec::markov(k),
                    None => IndexSpec::ucb4(),
                };
                Ok(Plan::Ucb4 { arms: arms.into_iter().flatten().collect(), spec: base.with_precision(precision), cost })
            }
            (Algorithm::Ducb4, true) => {
                let frame = match (p.frame_length, p.frame_schedule) {
                    (Some(_), Some(_)) => {
                        return Err(Error::config("policy.frame_length", "give either frame_length or frame_schedule"))
                    }
                    (Some(l), None) => FrameLength::Fixed(l),
                    (None, Some(s)) => FrameLength::Schedule(s),
                    (None, None) => return Err(Error::config("policy.frame_length", "decentralized runs need a frame length")),
                };
                if frame.at(0) < m + 1 {
                    return Err(Error::config("policy.frame_length", format!("must be at least M + 1 = {}", m + 1)));
                }
                if self.horizon < n {
                    return Err(Error::config("horizon", format!("must cover the {n} initialization slots")));
                }
                if p.eps_schedule.is_some() {
                    return Err(Error::config("policy.eps_schedule", "decentralized precision follows the frame length"));
                }
                let signaling = p.signaling.unwrap_or(Signaling::Physical);
                if signaling == Signaling::Packetized && p.eps1.is_some() {
                    return Err(Error::config("policy.eps1", "packetized signaling sends exact bids"));
                }
                if p.eps1.is_some_and(|e| e >= 1.0) {
                    return Err(Error::config("policy.eps1", "bid quantum must be below 1"));
                }
                let cfg = DucbConfig {
                    frame,
                    signaling,
                    eps1: p.eps1,
                    eps2: p.eps2,
                    kappa,
                    cost,
                    grid_ratio: self.stride,
                    record_transcript: false,
                };
                Ok(Plan::Ducb4 { arms, cfg })
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.plan().map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG2: &str = r#"
scenario = "decentral_iid"
horizon = 1000
seeds = 3

[arms]
kind = "bernoulli"
means = [[0.8, 0.6], [0.6, 0.35]]

[policy]
frame_length = 14
cost = { base = 1.0 }
"#;

    #[test]
    fn parse_and_plan() {
        let c = SimConfig::from_toml(FIG2).unwrap();
        assert_eq!(c.seed_list(), vec![0, 1, 2]);
        assert_eq!(c.stride, 1.1);
        assert!(matches!(c.plan().unwrap(), Plan::Ducb4 { .. }));
    }

    #[test]
    fn round_trip() {
        let c = SimConfig::from_toml(FIG2).unwrap();
        let text = c.to_toml().unwrap();
        assert_eq!(SimConfig::from_toml(&text).unwrap(), c);
        let cells = r#"
scenario = "single_markov"
horizon = 50
seeds = [4, 9]
output = "x.csv"

[arms]
kind = "cells"
cells = [[{ type = "two_state", p01 = 0.3, p10 = 0.5 }, { type = "markov", rewards = [0.2, 0.9], transition = [[0.5, 0.5], [0.25, 0.75]] }]]

[policy]
kappa_schedule = { kind = "kappa_growth", kappa0 = 2.0 }
eps_schedule = { kind = "eps_decay" }
cost = { base = 0.5, per_bit = 0.1 }
"#;
        let c = SimConfig::from_toml(cells).unwrap();
        c.validate().unwrap();
        assert_eq!(SimConfig::from_toml(&c.to_toml().unwrap()).unwrap(), c);
    }

    #[test]
    fn errors_name_the_field() {
        let bad = FIG2.replace("frame_length = 14", "frame_lenght = 14");
        match SimConfig::from_toml(&bad) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "frame_lenght"),
            other => panic!("{other:?}"),
        }
        let c = SimConfig::from_toml(&FIG2.replace("frame_length = 14", "frame_length = 2")).unwrap();
        match c.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "policy.frame_length"),
            other => panic!("{other:?}"),
        }
        let c = SimConfig::from_toml(&FIG2.replace("0.35", "1.35")).unwrap();
        assert!(matches!(c.validate(), Err(Error::Config { field, .. }) if field == "arms.means"));
        let c = SimConfig::from_toml(&FIG2.replace("decentral_iid", "single_iid")).unwrap();
        assert!(matches!(c.validate(), Err(Error::Config { field, .. }) if field == "arms"));
        let c = SimConfig::from_toml(&FIG2.replace("decentral_iid", "decentral_markov")).unwrap();
        assert!(c.validate().is_err());
    }
}
