//! Player-to-arm matchings: a Jacobi-round auction and an exact enumeration oracle.

use crate::error::{Error, Result};

/// Largest arm count accepted by [`brute_force_matching`].
pub const BRUTE_FORCE_MAX_ARMS: usize = 10;

/// `M x N` matrix of player values, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueMatrix {
    m: usize,
    n: usize,
    values: Vec<f64>,
}

impl ValueMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::param("values", "rows have different lengths"));
        }
        Self::from_flat(m, n, rows.into_iter().flatten().collect())
    }

    pub fn from_flat(m: usize, n: usize, values: Vec<f64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::param("values", "need at least one player"));
        }
        if m > n {
            return Err(Error::param("values", format!("{m} players but only {n} arms")));
        }
        if values.len() != m * n {
            return Err(Error::param("values", format!("expected {} entries, got {}", m * n, values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("values", "entries must be finite"));
        }
        Ok(ValueMatrix { m, n, values })
    }

    pub fn players(&self) -> usize {
        self.m
    }

    pub fn arms(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.m).map(|i| self.row(i).to_vec()).collect()
    }
}

/// Injective player-to-arm assignment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    assignment: Vec<usize>,
}

impl Matching {
    pub fn new(assignment: Vec<usize>, arms: usize) -> Result<Self> {
        let mut seen = vec![false; arms];
        for &j in &assignment {
            if j >= arms {
                return Err(Error::param("assignment", format!("arm {j} out of range")));
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(Error::param("assignment", format!("arm {j} assigned twice")));
            }
        }
        Ok(Matching { assignment })
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn arm_of(&self, player: usize) -> usize {
        self.assignment[player]
    }

    pub fn surplus(&self, values: &ValueMatrix) -> f64 {
        self.assignment.iter().enumerate().map(|(i, &j)| values.get(i, j)).sum()
    }
}

impl std::fmt::Display for Matching {
    /// `1->2, 2->1` with 1-based ids.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, j) in self.assignment.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}->{}", i + 1, j + 1)?;
        }
        Ok(())
    }
}

/// One auction packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bid {
    pub player: usize,
    pub arm: usize,
    /// Price increment requested on `arm`.
    pub bid: f64,
}

/// Preferred arm and bid increment of a bidder facing `prices`.
///
/// The bid is the gap between the best and second-best net values plus
/// `eps / m`; ties go to the lowest arm id. With a single arm the second-best
/// net value equals the best one.
pub fn compute_bid(values: &[f64], prices: &[f64], eps: f64, m: usize) -> (usize, f64) {
    assert!(!values.is_empty(), "compute_bid needs at least one arm");
    let mut best = 0;
    let mut best_net = values[0] - prices[0];
    let mut second_net = f64::NEG_INFINITY;
    for j in 1..values.len() {
        let net = values[j] - prices[j];
        if net > best_net {
            second_net = best_net;
            best_net = net;
            best = j;
        } else if net > second_net {
            second_net = net;
        }
    }
    if values.len() == 1 {
        second_net = best_net;
    }
    (best, best_net - second_net + eps / m as f64)
}

/// Prices, partial assignment and transcript of a running auction.
#[derive(Debug, Clone, PartialEq)]
pub struct AuctionState {
    pub prices: Vec<f64>,
    /// Arm held by each player, if any.
    pub assignment: Vec<Option<usize>>,
    /// Player holding each arm, if any.
    pub owner: Vec<Option<usize>>,
    pub rounds: u64,
    pub transcript: Vec<Vec<Bid>>,
}

impl AuctionState {
    pub fn new(players: usize, arms: usize) -> Self {
        AuctionState {
            prices: vec![0.0; arms],
            assignment: vec![None; players],
            owner: vec![None; arms],
            rounds: 0,
            transcript: Vec::new(),
        }
    }

    pub fn unassigned(&self) -> impl Iterator<Item = usize> + '_ {
        self.assignment.iter().enumerate().filter(|(_, a)| a.is_none()).map(|(i, _)| i)
    }

    pub fn is_complete(&self) -> bool {
        self.assignment.iter().all(Option::is_some)
    }

    /// Bids of every unassigned player at the current prices, in id order.
    pub fn collect_bids(&self, values: &ValueMatrix, eps: f64) -> Vec<Bid> {
        let m = values.players();
        self.unassigned()
            .map(|i| {
                let (arm, bid) = compute_bid(values.row(i), &self.prices, eps, m);
                Bid { player: i, arm, bid }
            })
            .collect()
    }

    /// Resolves one simultaneous round: the highest bid on each arm wins it
    /// (lowest player id on ties), displacing the previous holder, and the
    /// arm's price rises by the winning bid.
    pub fn apply_round(&mut self, bids: &[Bid]) {
        let mut winners: Vec<Option<Bid>> = vec![None; self.prices.len()];
        for b in bids {
            let slot = &mut winners[b.arm];
            let better = match slot {
                None => true,
                Some(w) => b.bid > w.bid || (b.bid == w.bid && b.player < w.player),
            };
            if better {
                *slot = Some(*b);
            }
        }
        for (arm, w) in winners.into_iter().enumerate() {
            let Some(w) = w else { continue };
            if let Some(prev) = self.owner[arm] {
                self.assignment[prev] = None;
            }
            self.owner[arm] = Some(w.player);
            self.assignment[w.player] = Some(arm);
            self.prices[arm] += w.bid;
        }
        self.rounds += 1;
        self.transcript.push(bids.to_vec());
    }

    pub fn matching(&self) -> Option<Matching> {
        let assignment: Option<Vec<usize>> = self.assignment.iter().copied().collect();
        assignment.map(|a| Matching { assignment: a })
    }
}

/// Round cap `ceil(M^2 * range / eps) + M`, where range is the largest value
/// measured from `min(0, smallest value)`.
pub fn round_cap(values: &ValueMatrix, eps: f64) -> u64 {
    let m = values.players() as f64;
    let range = values.max() - values.min().min(0.0);
    (m * m * range / eps).ceil().max(0.0) as u64 + values.players() as u64
}

/// Runs the auction to completion. The result is within `eps` of the
/// maximum surplus.
pub fn run_auction(values: &ValueMatrix, eps: f64) -> Result<(Matching, AuctionState)> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::param("eps", "must be positive and finite"));
    }
    let cap = round_cap(values, eps);
    let mut state = AuctionState::new(values.players(), values.arms());
    while !state.is_complete() {
        if state.rounds >= cap {
            return Err(Error::AuctionDiverged { cap });
        }
        let bids = state.collect_bids(values, eps);
        state.apply_round(&bids);
    }
    let matching = state.matching().expect("complete auction has a full assignment");
    Ok((matching, state))
}

/// Calls `visit` on every injective assignment of `m` players to `n` arms in
/// lexicographic order.
pub fn for_each_matching(m: usize, n: usize, mut visit: impl FnMut(&[usize])) {
    fn rec(depth: usize, n: usize, used: &mut [bool], cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if depth == cur.capacity() {
            visit(cur);
            return;
        }
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                rec(depth + 1, n, used, cur, visit);
                cur.pop();
                used[j] = false;
            }
        }
    }
    if m > n {
        return;
    }
    let mut cur = Vec::with_capacity(m);
    rec(0, n, &mut vec![false; n], &mut cur, &mut visit);
}

/// Exact maximum-surplus matching by enumeration. Among equal surpluses the
/// lexicographically first assignment wins.
pub fn brute_force_matching(values: &ValueMatrix) -> Result<(Matching, f64)> {
    if values.arms() > BRUTE_FORCE_MAX_ARMS {
        return Err(Error::UnsupportedSize { max: BRUTE_FORCE_MAX_ARMS, got: values.arms() });
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for_each_matching(values.players(), values.arms(), |a| {
        let s: f64 = a.iter().enumerate().map(|(i, &j)| values.get(i, j)).sum();
        if best.as_ref().is_none_or(|(_, b)| s > *b) {
            best = Some((a.to_vec(), s));
        }
    });
    let (assignment, surplus) = best.expect("at least one matching exists when M <= N");
    Ok((Matching { assignment }, surplus))
}
