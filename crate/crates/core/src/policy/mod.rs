//! Single-player index policies with computation costs.

mod engine;
mod index;
mod stats;

pub use engine::{run_ucb1_l, run_ucb4, Decision, RunOptions, SingleRun};
pub use index::{compute_index, epsilon_argmax, index_value, quantize, IndexKind, IndexSpec, Kappa, Precision, TimeSource};
pub use stats::PlayerStats;

use serde::{Deserialize, Serialize};

/// Time-varying parameter for the unknown-constant variants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    Constant { value: f64 },
    /// `scale / ln(e + t)`, decreasing to 0.
    EpsDecay {
        #[serde(default = "one")]
        scale: f64,
    },
    /// `min(t, kappa0 * ln(e + t))`, increasing without bound and never above `t`.
    KappaGrowth {
        #[serde(default = "one")]
        kappa0: f64,
    },
    /// `ceil(l0 + ln(1 + t))`.
    FrameGrowth { l0: f64 },
}

fn one() -> f64 {
    1.0
}

impl Schedule {
    pub fn value(&self, t: f64) -> f64 {
        use std::f64::consts::E;
        match *self {
            Schedule::Constant { value } => value,
            Schedule::EpsDecay { scale } => scale / (E + t).ln(),
            Schedule::KappaGrowth { kappa0 } => t.min((E + t).ln() * kappa0),
            Schedule::FrameGrowth { l0 } => (l0 + (1.0 + t).ln()).ceil(),
        }
    }
}

/// Cost of one index recomputation (or one decision frame).
///
/// `C(eps) = base + per_bit * ceil(log2(1/eps))` for `eps > 0`. At `eps = 0`
/// the cost is `base` when `per_bit == 0` and infinite otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostModel {
    pub base: f64,
    #[serde(default)]
    pub per_bit: f64,
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub accrue: bool,
}

fn yes() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

impl CostModel {
    pub fn fixed(base: f64) -> Self {
        CostModel { base, per_bit: 0.0, accrue: true }
    }

    pub fn free() -> Self {
        CostModel { base: 0.0, per_bit: 0.0, accrue: false }
    }

    pub fn cost(&self, eps: f64) -> f64 {
        if !self.accrue {
            return 0.0;
        }
        if eps > 0.0 {
            self.base + self.per_bit * (1.0 / eps).log2().ceil().max(0.0)
        } else if self.per_bit == 0.0 {
            self.base
        } else {
            f64::INFINITY
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_decay_at_one() {
        let v = Schedule::EpsDecay { scale: 1.0 }.value(1.0);
        assert!((v - 1.0 / (std::f64::consts::E + 1.0).ln()).abs() < 1e-15);
        assert!((v - 0.7614).abs() < 1e-4);
    }

    #[test]
    fn kappa_growth_is_clamped_by_t() {
        assert_eq!(Schedule::KappaGrowth { kappa0: 1.0 }.value(1.0), 1.0);
        let s = Schedule::KappaGrowth { kappa0: 1.0 };
        for t in 1..10_000 {
            assert!(s.value(t as f64) <= t as f64);
            assert!(s.value(t as f64 + 1.0) >= s.value(t as f64));
        }
    }

    #[test]
    fn frame_growth_starts_at_l0() {
        assert_eq!(Schedule::FrameGrowth { l0: 5.0 }.value(0.0), 5.0);
        assert_eq!(Schedule::FrameGrowth { l0: 5.0 }.value(1.0), 6.0);
    }

    #[test]
    fn cost_is_monotone_and_blows_up() {
        let c = CostModel { base: 1.0, per_bit: 0.5, accrue: true };
        let mut last = 0.0;
        for k in 1..40 {
            let eps = 2f64.powi(-k);
            let v = c.cost(eps);
            assert!(v >= last);
            last = v;
        }
        assert_eq!(c.cost(0.0), f64::INFINITY);
        assert_eq!(CostModel::fixed(2.0).cost(0.0), 2.0);
        assert_eq!(c.cost(0.25), 2.0);
        assert_eq!(CostModel::free().cost(0.1), 0.0);
    }
}
