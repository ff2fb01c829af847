//! Reward-generating arm models.

mod iid;
mod markov;

pub use iid::{IidArm, IidDistribution};
pub use markov::{ChainStats, MarkovArm, RewardDomain};

use rand::Rng;

/// The reward process behind one (player, arm) pair.
#[derive(Debug, Clone, PartialEq)]
pub enum ArmModel {
    Iid(IidArm),
    Markov(MarkovArm),
}

impl ArmModel {
    /// Play the arm once and return the observed reward.
    ///
    /// Markov arms are rested: the chain moves only here.
    pub fn pull<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        match self {
            ArmModel::Iid(arm) => arm.sample(rng),
            ArmModel::Markov(arm) => arm.step(rng),
        }
    }

    /// Expected reward (stationary mean for Markov arms).
    pub fn mean(&self) -> f64 {
        match self {
            ArmModel::Iid(arm) => arm.mean(),
            ArmModel::Markov(arm) => arm.mean(),
        }
    }

    pub fn as_markov(&self) -> Option<&MarkovArm> {
        match self {
            ArmModel::Markov(arm) => Some(arm),
            ArmModel::Iid(_) => None,
        }
    }

    pub fn is_markov(&self) -> bool {
        matches!(self, ArmModel::Markov(_))
    }
}

impl From<IidArm> for ArmModel {
    fn from(arm: IidArm) -> Self {
        ArmModel::Iid(arm)
    }
}

impl From<MarkovArm> for ArmModel {
    fn from(arm: MarkovArm) -> Self {
        ArmModel::Markov(arm)
    }
}
