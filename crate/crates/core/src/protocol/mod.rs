//! Decentralized dUCB4: frames, negotiation and interrupt phases over a
//! shared broadcast channel, and collisions between players.

mod agent;
mod medium;

pub use agent::{decode_subframe, PlayerAgent, Signaling};
pub use medium::{BidCodec, BroadcastMedium, Observation, Payload};

use crate::arms::ArmModel;
use crate::error::{Error, Result};
use crate::matching::{brute_force_matching, Matching, ValueMatrix};
use crate::policy::{CostModel, IndexSpec, Kappa, PlayerStats, Schedule, TimeSource};
use crate::rng::{arm_stream, Stream};
use crate::trace::{recording_grid, Cumulative, Recorder, RegretKind, RegretTrace};

/// Frame length: fixed, or a growing schedule evaluated at the frame's start slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrameLength {
    Fixed(u64),
    Schedule(Schedule),
}

impl FrameLength {
    pub fn at(&self, t: u64) -> u64 {
        match self {
            FrameLength::Fixed(l) => *l,
            FrameLength::Schedule(s) => s.value(t as f64).max(1.0) as u64,
        }
    }
}

/// Number of negotiation subframes in a frame of length `l`, `floor((L - M) / M)`.
pub fn negotiation_budget(l: u64, players: usize) -> u64 {
    l.saturating_sub(players as u64) / players as u64
}

/// Default precision reachable in a frame of length `l`: `2^-max(1, J)`.
pub fn default_precision(l: u64, players: usize) -> f64 {
    let j = negotiation_budget(l, players).clamp(1, 1000) as i32;
    2f64.powi(-j)
}

/// Bid quantum, index quantum and auction precision of one decision frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Precisions {
    /// Bid quantum (0 for exact bids).
    pub eps1: f64,
    /// Index quantum.
    pub eps2: f64,
    /// Auction precision, min of the two when both are positive.
    pub eps: f64,
}

pub fn resolve_precisions(
    l: u64,
    players: usize,
    signaling: Signaling,
    eps1: Option<f64>,
    eps2: Option<f64>,
) -> Precisions {
    let f = default_precision(l, players);
    match signaling {
        Signaling::Physical => {
            let e1 = eps1.unwrap_or(f);
            let e2 = eps2.unwrap_or(e1);
            Precisions { eps1: e1, eps2: e2, eps: e1.min(e2) }
        }
        Signaling::Packetized => {
            let e2 = eps2.unwrap_or(f);
            Precisions { eps1: 0.0, eps2: e2, eps: e2 }
        }
    }
}

/// `N` matchings; matching `r` sends player `i` to arm `(i + r) mod N`.
pub fn initialization_rotation(players: usize, arms: usize) -> Vec<Matching> {
    (0..arms)
        .map(|r| {
            let a = (0..players).map(|i| (i + r) % arms).collect();
            Matching::new(a, arms).expect("rotation is injective when M <= N")
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NegotiationOutcome {
    /// Common matching, or `None` when the subframe budget ran out.
    pub matching: Option<Matching>,
    pub rounds: u64,
}

/// Runs auction rounds, one subframe each, until every player holds an arm
/// or `budget` subframes are used. Player `i` transmits in slot `i`.
pub fn negotiate(
    agents: &mut [PlayerAgent],
    medium: &mut BroadcastMedium,
    signaling: Signaling,
    codec: Option<&BidCodec>,
    eps: f64,
    budget: u64,
) -> Result<NegotiationOutcome> {
    if budget == 0 {
        return Err(Error::param("budget", "need at least one subframe"));
    }
    if !(eps > 0.0) {
        return Err(Error::param("eps", "auction precision must be positive"));
    }
    for a in agents.iter_mut() {
        a.reset_auction();
    }
    let mut rounds = 0;
    while rounds < budget && !agents[0].view.is_complete() {
        let mut observed = Vec::with_capacity(agents.len());
        for (i, agent) in agents.iter().enumerate() {
            let packet = agent.negotiation_packet(eps, signaling, codec);
            let sent: Vec<Payload> = packet.into_iter().collect();
            let obs = medium.slot(&sent);
            if medium.is_recording() {
                if let Observation::Success(p) = obs {
                    let body = match p {
                        Payload::Word(w) => {
                            let c = codec.expect("physical mode has a codec");
                            let (arm, v) = c.decode(w);
                            format!("arm={} bid={v} bits={}", arm + 1, c.bits(w))
                        }
                        Payload::Bid { arm, bid } => format!("arm={} bid={bid}", arm + 1),
                        Payload::Interrupt(b) => format!("interrupt={}", u8::from(b)),
                    };
                    medium.note(|| format!("round={rounds} player={} {body}", i + 1));
                }
            }
            observed.push(obs);
        }
        for a in agents.iter_mut() {
            a.observe_subframe(&observed, eps, codec)?;
        }
        rounds += 1;
        debug_assert!(agents.windows(2).all(|w| w[0].view.prices == w[1].view.prices));
    }
    let views: Vec<Option<Matching>> = agents.iter().map(|a| a.view.matching()).collect();
    if views.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::Precondition("agents disagree on the negotiated matching".into()));
    }
    Ok(NegotiationOutcome { matching: views.into_iter().next().flatten(), rounds })
}

/// Player `i` sends 1 in slot `i` when its new arm differs from its current
/// one. Returns whether anyone sent 1.
pub fn interrupt_phase(agents: &[PlayerAgent], medium: &mut BroadcastMedium) -> bool {
    let mut flag = false;
    for a in agents {
        let changed = a.pending.is_some_and(|p| p != a.current);
        let obs = medium.slot(&[Payload::Interrupt(changed)]);
        if let Observation::Success(Payload::Interrupt(true)) = obs {
            medium.note(|| format!("interrupt player={}", a.id + 1));
            flag = true;
        }
    }
    flag
}

/// dUCB4 run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DucbConfig {
    pub frame: FrameLength,
    pub signaling: Signaling,
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    /// Exploration coefficient for Markov arms; `None` uses `M + 2`.
    pub kappa: Option<Kappa>,
    pub cost: CostModel,
    pub grid_ratio: f64,
    pub record_transcript: bool,
}

impl DucbConfig {
    pub fn new(frame_length: u64) -> Self {
        DucbConfig {
            frame: FrameLength::Fixed(frame_length),
            signaling: Signaling::Physical,
            eps1: None,
            eps2: None,
            kappa: None,
            cost: CostModel::fixed(1.0),
            grid_ratio: 1.1,
            record_transcript: false,
        }
    }
}

/// One decision frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameDecision {
    pub frame: u64,
    /// First slot of the frame (1-based).
    pub slot: u64,
    pub matching: Matching,
    pub interrupted: bool,
    pub rounds: u64,
    pub exhausted: bool,
    pub eps: f64,
}

#[derive(Debug, Clone)]
pub struct DucbRun {
    pub trace: RegretTrace,
    pub stats: Vec<PlayerStats>,
    pub decisions: Vec<FrameDecision>,
    /// Decision frames, m(T).
    pub decision_frames: u64,
    /// Negotiations that ran out of subframes.
    pub exhausted: u64,
    pub collisions: u64,
    pub exploitation_collisions: u64,
    pub optimal: Matching,
    pub transcript: Option<Vec<String>>,
}

struct Field {
    arms: Vec<ArmModel>,
    streams: Vec<Stream>,
    means: Vec<f64>,
    n: usize,
}

impl Field {
    /// Plays one slot. Players sharing an arm collide and get nothing.
    fn play(&mut self, agents: &mut [PlayerAgent], arms_played: &[usize], cum: &mut Cumulative) -> u64 {
        let mut load = vec![0u32; self.n];
        for &j in arms_played {
            load[j] += 1;
        }
        let mut collisions = 0;
        for (i, &j) in arms_played.iter().enumerate() {
            if load[j] > 1 {
                collisions += 1;
                continue;
            }
            let k = i * self.n + j;
            let r = self.arms[k].pull(&mut self.streams[k]);
            agents[i].stats.record(j, r);
            cum.reward += r;
            cum.expected += self.means[k];
        }
        collisions
    }
}

/// Runs dUCB4 on an `M x N` grid of arms (`arms[i][j]` is player `i` on arm `j`)
/// for `horizon` slots.
pub fn run_ducb4(arms: Vec<Vec<ArmModel>>, cfg: &DucbConfig, horizon: u64, seed: u64) -> Result<DucbRun> {
    let m = arms.len();
    let n = arms.first().map_or(0, Vec::len);
    if m == 0 || arms.iter().any(|r| r.len() != n) {
        return Err(Error::param("arms", "need a non-empty rectangular player x arm grid"));
    }
    if m > n {
        return Err(Error::Precondition(format!("{m} players but only {n} arms")));
    }
    if cfg.frame.at(0) < m as u64 + 1 {
        return Err(Error::param("frame_length", format!("must be at least M + 1 = {}", m + 1)));
    }
    if horizon < n as u64 {
        return Err(Error::Precondition(format!("horizon {horizon} is shorter than the {n} initialization slots")));
    }
    let markov = arms.iter().flatten().any(ArmModel::is_markov);
    let means: Vec<f64> = arms.iter().flatten().map(ArmModel::mean).collect();
    let value_matrix = ValueMatrix::from_flat(m, n, means.clone())?;
    let (optimal, best) = brute_force_matching(&value_matrix)?;
    let spec = match cfg.kappa {
        Some(k) => IndexSpec::markov(k).with_time_source(TimeSource::OwnPlays),
        None => IndexSpec::decentralized(m),
    };
    let mut agents: Vec<PlayerAgent> = (0..m).map(|i| PlayerAgent::new(i, m, n, spec)).collect();
    let mut field = Field {
        streams: (0..m).flat_map(|i| (0..n).map(move |j| arm_stream(seed, i, j))).collect(),
        arms: arms.into_iter().flatten().collect(),
        means,
        n,
    };
    let kind = if markov { RegretKind::Realized } else { RegretKind::Expected };
    let mut recorder = Recorder::new(recording_grid(horizon, cfg.grid_ratio), kind, best);
    let mut medium = BroadcastMedium::new(cfg.record_transcript);
    let mut cum = Cumulative::default();
    let mut t = 0u64;
    let mut collisions = 0u64;
    let mut exploitation_collisions = 0u64;

    for r in initialization_rotation(m, n) {
        collisions += field.play(&mut agents, r.assignment(), &mut cum);
        t += 1;
        cum.collisions = collisions;
        cum.eta = 1;
        recorder.observe(t, &cum);
        for (a, &j) in agents.iter_mut().zip(r.assignment()) {
            a.current = j;
            a.stats.last_arm = Some(j);
        }
    }

    let mut eta = 1u64;
    let mut frame = 0u64;
    let mut decisions = Vec::new();
    let mut exhausted = 0u64;
    while t < horizon {
        let l = cfg.frame.at(t).max(m as u64 + 1);
        frame += 1;
        cum.frame = frame;
        let decision = eta.is_power_of_two();
        if decision {
            let p = resolve_precisions(l, m, cfg.signaling, cfg.eps1, cfg.eps2);
            let c = cfg.cost.cost(p.eps);
            if !c.is_finite() {
                return Err(Error::param("cost", "infinite decision-frame cost at this precision"));
            }
            let codec = match cfg.signaling {
                Signaling::Physical => Some(BidCodec::new(n, p.eps1)?),
                Signaling::Packetized => None,
            };
            for a in agents.iter_mut() {
                a.update_values(t as f64, p.eps2)?;
            }
            medium.note(|| format!("frame={frame} slot={} decision L={l} eps={}", t + 1, p.eps));
            let outcome = negotiate(&mut agents, &mut medium, cfg.signaling, codec.as_ref(), p.eps, negotiation_budget(l, m))?;
            if outcome.matching.is_none() {
                exhausted += 1;
                medium.note(|| format!("frame={frame} budget exhausted after {} rounds", outcome.rounds));
                for a in agents.iter_mut() {
                    a.pending = None;
                }
            }
            let interrupted = interrupt_phase(&agents, &mut medium);
            for a in agents.iter_mut() {
                if let Some(p) = a.pending.take() {
                    a.current = p;
                }
                a.stats.computations += 1;
            }
            if interrupted {
                eta = 1;
            }
            cum.cost += c;
            cum.computations += 1;
            let current: Vec<usize> = agents.iter().map(|a| a.current).collect();
            let matching = Matching::new(current, n)?;
            if matching == optimal {
                agents.iter_mut().for_each(|a| a.stats.optimal_computations += 1);
            } else {
                agents.iter_mut().for_each(|a| a.stats.suboptimal_computations += 1);
            }
            decisions.push(FrameDecision {
                frame,
                slot: t + 1,
                matching,
                interrupted,
                rounds: outcome.rounds,
                exhausted: outcome.matching.is_none(),
                eps: p.eps,
            });
        }
        let played: Vec<usize> = agents.iter().map(|a| a.current).collect();
        for a in agents.iter_mut() {
            a.stats.eta = eta;
            a.stats.last_arm = Some(a.current);
        }
        cum.eta = eta;
        for _ in 0..l.min(horizon - t) {
            let c = field.play(&mut agents, &played, &mut cum);
            collisions += c;
            if !decision {
                exploitation_collisions += c;
            }
            t += 1;
            cum.collisions = collisions;
            recorder.observe(t, &cum);
        }
        eta += 1;
    }

    let counts = agents.iter().map(|a| a.stats.counts().to_vec()).collect();
    Ok(DucbRun {
        trace: recorder.finish(counts),
        decision_frames: cum.computations,
        stats: agents.into_iter().map(|a| a.stats).collect(),
        decisions,
        exhausted,
        collisions,
        exploitation_collisions,
        optimal,
        transcript: medium.take_log(),
    })
}
