use crate::error::{Error, Result};

/// What is physically sent in one signaling slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Payload {
    /// Packetized negotiation: exact bid.
    Bid { arm: usize, bid: f64 },
    /// Physical negotiation: fixed-point word produced by a [`BidCodec`].
    Word(u64),
    /// Interrupt bit.
    Interrupt(bool),
}

/// Channel state seen by every listener at the end of a slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observation {
    Idle,
    Success(Payload),
    Collision,
}

/// Fixed-point bid packet: `ceil(log2 N)` arm bits followed by
/// `ceil(log2(1/eps1))` bits holding `floor(bid / eps1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BidCodec {
    arm_bits: u32,
    bid_bits: u32,
    eps1: f64,
}

fn ceil_log2(x: f64) -> u32 {
    if x <= 1.0 {
        0
    } else {
        x.log2().ceil() as u32
    }
}

impl BidCodec {
    pub fn new(arms: usize, eps1: f64) -> Result<Self> {
        if !(eps1 > 0.0 && eps1 < 1.0) {
            return Err(Error::param("eps1", "bid quantum must lie in (0, 1)"));
        }
        let arm_bits = ceil_log2(arms as f64);
        let bid_bits = ceil_log2(1.0 / eps1).max(1);
        if arm_bits + bid_bits > 63 {
            return Err(Error::param("eps1", "packet would exceed 63 bits"));
        }
        Ok(BidCodec { arm_bits, bid_bits, eps1 })
    }

    pub fn arm_bits(&self) -> u32 {
        self.arm_bits
    }

    pub fn bid_bits(&self) -> u32 {
        self.bid_bits
    }

    pub fn eps1(&self) -> f64 {
        self.eps1
    }

    /// Encodes `(arm, bid)`; bids beyond the largest code saturate.
    pub fn encode(&self, arm: usize, bid: f64) -> u64 {
        let max_code = (1u64 << self.bid_bits) - 1;
        let code = (bid / self.eps1).floor().max(0.0);
        let code = if code >= max_code as f64 { max_code } else { code as u64 };
        ((arm as u64) << self.bid_bits) | code
    }

    pub fn decode(&self, word: u64) -> (usize, f64) {
        let code = word & ((1u64 << self.bid_bits) - 1);
        ((word >> self.bid_bits) as usize, code as f64 * self.eps1)
    }

    /// Bit string of a word, arm bits first.
    pub fn bits(&self, word: u64) -> String {
        let width = (self.arm_bits + self.bid_bits) as usize;
        format!("{word:0width$b}")
    }
}

/// Shared signaling channel. Every transmission is heard by all players.
#[derive(Debug, Default, Clone)]
pub struct BroadcastMedium {
    slots: u64,
    log: Option<Vec<String>>,
}

impl BroadcastMedium {
    pub fn new(record: bool) -> Self {
        BroadcastMedium { slots: 0, log: record.then(Vec::new) }
    }

    /// Resolves one slot: nothing sent is idle, one sender succeeds, two or
    /// more collide.
    pub fn slot(&mut self, sent: &[Payload]) -> Observation {
        self.slots += 1;
        match sent {
            [] => Observation::Idle,
            [p] => Observation::Success(*p),
            _ => Observation::Collision,
        }
    }

    /// Signaling slots used so far.
    pub fn slots_used(&self) -> u64 {
        self.slots
    }

    pub fn note(&mut self, line: impl FnOnce() -> String) {
        if let Some(log) = self.log.as_mut() {
            log.push(line());
        }
    }

    pub fn is_recording(&self) -> bool {
        self.log.is_some()
    }

    pub fn take_log(&mut self) -> Option<Vec<String>> {
        self.log.as_mut().map(std::mem::take)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantized_bid_is_floor() {
        let c = BidCodec::new(2, 2f64.powi(-8)).unwrap();
        assert_eq!(c.bid_bits(), 8);
        assert_eq!(c.arm_bits(), 1);
        for &b in &[0.205, 0.0039, 0.5, 0.123456] {
            let (arm, v) = c.decode(c.encode(1, b));
            assert_eq!(arm, 1);
            assert_eq!(v, (b * 256.0f64).floor() / 256.0);
        }
        let (_, v) = c.decode(c.encode(0, 7.0));
        assert_eq!(v, 255.0 / 256.0);
        assert_eq!(c.bits(c.encode(1, 0.5)), "110000000");
    }

    #[test]
    fn channel_outcomes() {
        let mut m = BroadcastMedium::new(false);
        assert_eq!(m.slot(&[]), Observation::Idle);
        assert_eq!(m.slot(&[Payload::Interrupt(true)]), Observation::Success(Payload::Interrupt(true)));
        assert_eq!(m.slot(&[Payload::Word(1), Payload::Word(2)]), Observation::Collision);
        assert_eq!(m.slots_used(), 3);
        assert!(m.take_log().is_none());
    }

    #[test]
    fn codec_rejects_bad_quantum() {
        assert!(BidCodec::new(2, 0.0).is_err());
        assert!(BidCodec::new(2, 1.5).is_err());
        assert_eq!(BidCodec::new(1, 0.5).unwrap().arm_bits(), 0);
    }
}
