//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use dmab::arms::MarkovArm;
use dmab::bounds::{self, EpsilonMode, FrameMode, MarkovConstants};
use dmab::harness::{run_batch, write_csv, BatchResult, SimConfig};
use dmab::matching::{run_auction, ValueMatrix};
use dmab::policy::CostModel;
use dmab::rng::stream;
use rand::Rng;
use std::path::PathBuf;
use std::time::Instant;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn config(name: &str) -> SimConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(format!("{name}.toml"));
    SimConfig::load(&path).unwrap_or_else(|e| panic!("cannot load {}: {e}", path.display()))
}

fn batch(name: &str) -> Result<BatchResult, String> {
    run_batch(&config(name)).map_err(|e| format!("{name}: {e}"))
}

fn csv_bytes(r: &BatchResult) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(&r.rows, &mut buf).expect("in-memory CSV");
    buf
}

/// Mean regret never exceeds the bound column; NaN bounds count as failures.
fn dominated(r: &BatchResult) -> Result<(), String> {
    for row in &r.rows {
        if !(row.regret_mean <= row.bound) {
            return Err(format!("t={} regret {} vs bound {} ({})", row.t, row.regret_mean, row.bound, r.bound_name));
        }
    }
    Ok(())
}

fn regret_at(r: &BatchResult, t: u64) -> Result<f64, String> {
    r.rows.iter().find(|row| row.t == t).map(|row| row.regret_mean).ok_or(format!("t={t} not recorded"))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let r = batch("fig2i")?;
    if r.bound_name != "t6" || r.seeds.len() != 50 {
        return Err(format!("bound {} with {} seeds", r.bound_name, r.seeds.len()));
    }
    dominated(&r)?;
    let early = regret_at(&r, 1_000)? / 1e3;
    let late = regret_at(&r, 100_000)? / 1e5;
    if !(late < 0.5 * early) {
        return Err(format!("regret/T {late} at 1e5 not below half of {early} at 1e3"));
    }
    Ok(format!("regret/T {early:.4} -> {late:.4}, {:.1}s", start.elapsed().as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let r = batch("fig2ii")?;
    if r.bound_name != "t7" || r.seeds.len() != 50 {
        return Err(format!("bound {} with {} seeds", r.bound_name, r.seeds.len()));
    }
    dominated(&r)?;
    let bad: u64 = r.seeds.iter().map(|s| s.exploitation_collisions).sum();
    if bad != 0 {
        return Err(format!("{bad} collisions in exploitation frames"));
    }
    let last = r.rows.last().unwrap();
    Ok(format!("final regret {:.1} <= {:.3e}, 0 exploitation collisions", last.regret_mean, last.bound))
}

fn criterion_3() -> Outcome {
    let cfg = config("single_ucb4");
    let r = batch("single_ucb4")?;
    if r.bound_name != "t2" || r.seeds.len() != 50 || cfg.cost().base != 1.0 {
        return Err(format!("bound {} with {} seeds", r.bound_name, r.seeds.len()));
    }
    dominated(&r)?;
    let log_t = (cfg.horizon as f64).ln();
    for s in &r.seeds {
        let counts = &s.counts[0];
        let best = counts.iter().enumerate().max_by_key(|(_, c)| **c).map(|(j, _)| j).unwrap_or(0);
        if best != 0 {
            return Err(format!("seed {} played arm {best} most", s.seed));
        }
        let limit: f64 = counts[1..].iter().map(|&n| n as f64 * (1.0 + log_t)).sum();
        if s.computations as f64 > limit {
            return Err(format!("seed {}: m(T) = {} exceeds {limit}", s.seed, s.computations));
        }
    }
    let worst = r
        .seeds
        .iter()
        .map(|s| s.computations as f64 / (s.counts[0][1] as f64 * (1.0 + log_t)))
        .fold(0.0, f64::max);
    Ok(format!("max m(T) / limit over seeds = {worst:.3}"))
}

/// Exhaustive maximum surplus, written independently of the library.
fn oracle(values: &[Vec<f64>]) -> f64 {
    fn rec(values: &[Vec<f64>], i: usize, used: &mut Vec<bool>) -> f64 {
        if i == values.len() {
            return 0.0;
        }
        let mut best = f64::NEG_INFINITY;
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                best = best.max(values[i][j] + rec(values, i + 1, used));
                used[j] = false;
            }
        }
        best
    }
    rec(values, 0, &mut vec![false; values[0].len()])
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let eps = 1e-3;
    let mut rng = stream(20_240_401, 4);
    let mut max_rounds_ratio = 0.0f64;
    for k in 0..1000 {
        let m = rng.random_range(2..=5);
        let n = rng.random_range(m..=7);
        let rows: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.random::<f64>()).collect()).collect();
        let vmax = rows.iter().flatten().copied().fold(0.0, f64::max);
        let values = ValueMatrix::new(rows.clone()).map_err(|e| e.to_string())?;
        let (matching, state) = run_auction(&values, eps).map_err(|e| format!("instance {k}: {e}"))?;
        let mut seen = vec![false; n];
        for &j in matching.assignment() {
            if seen[j] {
                return Err(format!("instance {k}: arm {j} assigned twice"));
            }
            seen[j] = true;
        }
        let surplus: f64 = matching.assignment().iter().enumerate().map(|(i, &j)| rows[i][j]).sum();
        let gap = oracle(&rows) - surplus;
        if gap > eps {
            return Err(format!("instance {k}: surplus gap {gap}"));
        }
        let cap = (m * m) as f64 * vmax / eps + m as f64;
        if state.rounds as f64 > cap {
            return Err(format!("instance {k}: {} rounds above {cap}", state.rounds));
        }
        max_rounds_ratio = max_rounds_ratio.max(state.rounds as f64 / cap);
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 30.0 {
        return Err(format!("took {secs:.1}s"));
    }
    Ok(format!("1000/1000 instances, max rounds/cap {max_rounds_ratio:.4}, {secs:.2}s"))
}

const TABLE1: [(f64, f64); 4] = [(0.3, 0.5), (0.2, 0.6), (0.6, 0.3), (0.7, 0.2)];

fn criterion_5() -> Outcome {
    let mut worst_freq = 0.0f64;
    for (c, &(p01, p10)) in TABLE1.iter().enumerate() {
        let arm = MarkovArm::two_state(p01, p10).map_err(|e| e.to_string())?;
        let stats = arm.chain_stats().map_err(|e| e.to_string())?;
        let on = p01 / (p01 + p10);
        let closed = [1.0 - on, on];
        for (s, (got, want)) in stats.pi.iter().zip(closed).enumerate() {
            if (got - want).abs() > 1e-12 {
                return Err(format!("chain {c}: pi[{s}] = {got} vs {want}"));
            }
        }
        let mut chain = arm.clone();
        let mut rng = stream(5, c as u64);
        let steps = 1_000_000;
        let mut ones = 0u64;
        for _ in 0..steps {
            if chain.step(&mut rng) == 1.0 {
                ones += 1;
            }
        }
        let freq = ones as f64 / steps as f64;
        let err = (freq - on).abs();
        if err > 0.002 {
            return Err(format!("chain {c}: frequency {freq} vs {on}"));
        }
        worst_freq = worst_freq.max(err);
    }
    Ok(format!("pi exact, max frequency error {worst_freq:.5}"))
}

fn criterion_6() -> Outcome {
    let trials = 10_000;
    let mut rng = stream(6, 0);
    let mut checks = 0;
    for &mu in &[0.3, 0.5, 0.8] {
        for &t in &[10usize, 100, 1000] {
            for &c in &[0.25, 0.5, 1.0] {
                let a = c * (t as f64).sqrt();
                let bound = (-2.0 * a * a / t as f64).exp();
                let hits = (0..trials)
                    .filter(|_| {
                        let s = (0..t).filter(|_| rng.random::<f64>() < mu).count() as f64;
                        s >= t as f64 * mu + a
                    })
                    .count();
                let freq = hits as f64 / trials as f64;
                if freq > bound {
                    return Err(format!("Hoeffding mu={mu} t={t} a={a}: {freq} > {bound}"));
                }
                checks += 1;
            }
        }
    }
    for (c, &(p01, p10)) in TABLE1.iter().enumerate() {
        let arm = MarkovArm::two_state(p01, p10).map_err(|e| e.to_string())?;
        let st = arm.chain_stats().map_err(|e| e.to_string())?;
        let lambda = arm.initial_distribution().to_vec();
        let n_lambda = lambda.iter().zip(&st.pi).map(|(l, p)| (l / p).powi(2)).sum::<f64>().sqrt();
        for s in 0..2 {
            let f = |x: usize| ((x == s) as u8 as f64 - st.pi[s]) / st.pi_hat[s];
            for &gamma in &[0.1, 0.2] {
                for &t in &[100usize, 1000] {
                    let bound = n_lambda * (-(t as f64) * st.rho * gamma * gamma / 28.0).exp();
                    let mut hits = 0;
                    for k in 0..trials {
                        let mut chain = arm.clone();
                        let mut r = stream(600 + c as u64, (s * 100_000 + k) as u64);
                        let mut sum = 0.0;
                        for _ in 0..t {
                            chain.step(&mut r);
                            sum += f(chain.current_state().unwrap());
                        }
                        if sum / t as f64 >= gamma {
                            hits += 1;
                        }
                    }
                    let freq = hits as f64 / trials as f64;
                    if freq > bound {
                        return Err(format!("chain {c} state {s} gamma={gamma} t={t}: {freq} > {bound}"));
                    }
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} Monte Carlo checks within their bounds"))
}

fn criterion_7() -> Outcome {
    let rel = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1.0);
    let mut rng = stream(7, 0);
    let table1: Vec<MarkovArm> = TABLE1.iter().map(|&(a, b)| MarkovArm::two_state(a, b).unwrap()).collect();
    let consts = MarkovConstants::single(&table1).map_err(|e| e.to_string())?;
    for k in 0..100 {
        let n = rng.random_range(2..=6);
        let mut means: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..0.95)).collect();
        means[0] = 0.99;
        let g = bounds::gap_stats_single(&means).map_err(|e| e.to_string())?;
        let c = rng.random_range(0.0..5.0);
        let t = rng.random_range(2.0..1e7);
        let cost = CostModel::fixed(c);
        let t2 = bounds::bound_t2(&g, c, n, t).map_err(|e| e.to_string())?;
        let t3 = bounds::bound_t3(&g, &cost, EpsilonMode::Known(0.0), n, t).map_err(|e| e.to_string())?;
        if !rel(t3, t2) {
            return Err(format!("point {k}: t3(0) = {t3} vs t2 = {t2}"));
        }
        let kappa = consts.kappa_threshold * rng.random_range(1.001..3.0);
        let t4 = bounds::bound_t4(&g, &consts, kappa, c, n, t).map_err(|e| e.to_string())?;
        let t5 = bounds::bound_t5(&g, &consts, kappa, 0.0, c, n, t).map_err(|e| e.to_string())?;
        if !rel(t5, t4) {
            return Err(format!("point {k}: t5(0) = {t5} vs t4 = {t4}"));
        }
    }

    let g = bounds::gap_stats_single(&[0.8, 0.6]).unwrap();
    let kappa = consts.kappa_threshold + 1.0;
    let cost = CostModel::fixed(1.0);
    let d = g.delta_min;
    let single_poles = [
        bounds::bound_t3(&g, &cost, EpsilonMode::Known(d), 2, 1e4).is_err(),
        bounds::bound_t3(&g, &cost, EpsilonMode::Known(2.0 * d), 2, 1e4).is_err(),
        bounds::bound_t5(&g, &consts, kappa, d, 1.0, 2, 1e4).is_err(),
        bounds::bound_t4(&g, &consts, consts.kappa_threshold, 1.0, 2, 1e4).is_err(),
    ];
    let fig2 = ValueMatrix::new(vec![vec![0.8, 0.6], vec![0.6, 0.35]]).unwrap();
    let gm = bounds::gap_stats_multi(&fig2).unwrap();
    let pole = gm.delta_min / 3.0;
    let table1_rows = vec![table1[..2].to_vec(), table1[2..].to_vec()];
    let mconsts = MarkovConstants::multi(&table1_rows).unwrap();
    let multi_poles = [
        bounds::bound_t6(&gm, 2, 2, FrameMode::Known { eps: pole, l: 14 }, &cost, 1e4).is_err(),
        bounds::bound_t7(&gm, 2, 2, pole, 14, mconsts.kappa_threshold + 1.0, &mconsts, &cost, 1e4).is_err(),
    ];
    if !single_poles.iter().chain(&multi_poles).all(|&e| e) {
        return Err(format!("pole guards single {single_poles:?} multi {multi_poles:?}"));
    }
    let near = bounds::bound_t6(&gm, 2, 2, FrameMode::Known { eps: pole * 0.999, l: 14 }, &cost, 1e4);
    if !near.as_ref().is_ok_and(|v| v.is_finite()) {
        return Err(format!("t6 just below the pole: {near:?}"));
    }
    Ok("100/100 points for t3 and t5, 6 pole guards raise".into())
}

fn criterion_8() -> Outcome {
    for name in ["fig2i", "fig2ii", "single_ucb4", "smoke"] {
        let mut cfg = config(name);
        cfg.workers = Some(1);
        let a = csv_bytes(&run_batch(&cfg).map_err(|e| e.to_string())?);
        cfg.workers = Some(4);
        let b = csv_bytes(&run_batch(&cfg).map_err(|e| e.to_string())?);
        if a != b {
            return Err(format!("{name}: CSV differs between reruns"));
        }
    }
    Ok("4 configs byte-identical across reruns with 1 and 4 workers".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 dUCB4 on i.i.d. arms below bound, sublinear", criterion_1),
        ("2 dUCB4 on Markov arms below bound, no exploitation collisions", criterion_2),
        ("3 single-player UCB4 below bound, computation count", criterion_3),
        ("4 auction within eps of optimum and round cap", criterion_4),
        ("5 Markov stationary law and empirical frequencies", criterion_5),
        ("6 concentration inequalities", criterion_6),
        ("7 bound reductions and pole guards", criterion_7),
        ("8 deterministic CSV output", criterion_8),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
