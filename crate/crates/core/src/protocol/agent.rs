use super::medium::{BidCodec, Observation, Payload};
use crate::error::{Error, Result};
use crate::matching::{compute_bid, AuctionState, Bid};
use crate::policy::{quantize, IndexSpec, PlayerStats};
use serde::{Deserialize, Serialize};

/// How bids travel over the signaling channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signaling {
    /// Exact bid values.
    Packetized,
    /// Fixed-point bid words.
    Physical,
}

/// One player running dUCB4. It sees only its own rewards and the channel.
#[derive(Debug, Clone)]
pub struct PlayerAgent {
    pub id: usize,
    pub players: usize,
    pub stats: PlayerStats,
    pub spec: IndexSpec,
    /// Arm currently played, k*_i.
    pub current: usize,
    /// Arm won in the negotiation of this decision frame.
    pub pending: Option<usize>,
    /// Quantized indices used as auction values.
    pub values: Vec<f64>,
    /// Local replica of the auction, rebuilt from the public transcript.
    pub view: AuctionState,
}

impl PlayerAgent {
    pub fn new(id: usize, players: usize, arms: usize, spec: IndexSpec) -> Self {
        PlayerAgent {
            id,
            players,
            stats: PlayerStats::new(arms),
            spec,
            current: id % arms,
            pending: None,
            values: vec![0.0; arms],
            view: AuctionState::new(players, arms),
        }
    }

    pub fn arms(&self) -> usize {
        self.stats.arms()
    }

    /// Recomputes own indices at global slot `t`, floor-quantized to `eps2`.
    pub fn update_values(&mut self, t: f64, eps2: f64) -> Result<()> {
        for j in 0..self.arms() {
            self.values[j] = quantize(self.spec.raw_index(&self.stats, j, t)?, eps2);
        }
        self.stats.indices = self.values.clone();
        Ok(())
    }

    pub fn reset_auction(&mut self) {
        self.view = AuctionState::new(self.players, self.arms());
        self.pending = None;
    }

    /// Packet to send in this player's negotiation slot, if it is unassigned.
    pub fn negotiation_packet(&self, eps: f64, signaling: Signaling, codec: Option<&BidCodec>) -> Option<Payload> {
        if self.view.assignment[self.id].is_some() {
            return None;
        }
        let (arm, bid) = compute_bid(&self.values, &self.view.prices, eps, self.players);
        Some(match (signaling, codec) {
            (Signaling::Physical, Some(c)) => Payload::Word(c.encode(arm, bid)),
            _ => Payload::Bid { arm, bid },
        })
    }

    /// Applies a completed subframe of observations (one per player slot).
    ///
    /// Decoded bids are raised to at least `eps / M`, so every round still
    /// moves prices.
    pub fn observe_subframe(&mut self, observed: &[Observation], eps: f64, codec: Option<&BidCodec>) -> Result<()> {
        let bids = decode_subframe(observed, eps, self.players, codec)?;
        self.view.apply_round(&bids);
        self.pending = self.view.assignment[self.id];
        Ok(())
    }
}

/// Public bids carried by a subframe, in slot (player id) order.
pub fn decode_subframe(observed: &[Observation], eps: f64, players: usize, codec: Option<&BidCodec>) -> Result<Vec<Bid>> {
    let floor = eps / players as f64;
    let mut bids = Vec::new();
    for (player, obs) in observed.iter().enumerate() {
        let (arm, bid) = match *obs {
            Observation::Idle => continue,
            Observation::Success(Payload::Bid { arm, bid }) => (arm, bid),
            Observation::Success(Payload::Word(w)) => {
                let c = codec.ok_or_else(|| Error::Precondition("bid word without a codec".into()))?;
                let (arm, v) = c.decode(w);
                (arm, v.max(floor))
            }
            Observation::Success(Payload::Interrupt(_)) | Observation::Collision => {
                return Err(Error::Precondition(format!("unexpected observation in negotiation slot {player}")));
            }
        };
        bids.push(Bid { player, arm, bid });
    }
    Ok(bids)
}
