//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero when the failing set differs from `KNOWN_FAILURES`.

use std::process::ExitCode;
use std::time::Instant;

use pamcts_core::env::{CartPoleParams, CliffWalkParams, FrozenLakeParams};
use pamcts_core::harness::{
    evaluate_greedy, run_experiment, summarize, sweep_experiment, train_stale_q, AgentKind, AgentSpec,
    AlphaSetting, EnvSpec, EpisodeRecord, ExperimentSpec, NoiseSpec, RunSpec, StaleTable, SweepSpec, TrainingMethod,
    TrainingSpec,
};
use pamcts_core::mcts::UctConfig;
use pamcts_core::seed::{derive_seed, rng_for};
use pamcts_core::theory::{
    alpha_feasible_range, verify_selection_soundness, verify_theorem1_batch, verify_theorem3_batch,
};
use rand::Rng;

/// Criteria expected to fail; see the project notes for the analysis.
const KNOWN_FAILURES: &[u32] = &[6];

const SEED: u64 = 1;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn thirds() -> [f64; 3] {
    [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]
}

fn slip(p1: f64) -> [f64; 3] {
    let side = (1.0 - p1) / 2.0;
    [p1, side, side]
}

fn lake(time_t: [f64; 3]) -> EnvSpec {
    EnvSpec::FrozenLake {
        time0: FrozenLakeParams::small([1.0, 0.0, 0.0]),
        time_t: FrozenLakeParams::small(time_t),
    }
}

fn cliff(slip_factor: f64) -> EnvSpec {
    EnvSpec::CliffWalk {
        time0: CliffWalkParams::new(0.0),
        time_t: CliffWalkParams::new(slip_factor),
    }
}

fn cartpole(gravity: f64, noise: Option<NoiseSpec>) -> EnvSpec {
    EnvSpec::Cartpole {
        time0: CartPoleParams::default(),
        time_t: CartPoleParams::with_gravity(gravity),
        noise,
    }
}

fn spec(env: EnvSpec, kind: AgentKind, alpha: Option<AlphaSetting>, iterations: usize, episodes: usize) -> ExperimentSpec {
    ExperimentSpec {
        environment: env,
        agent: AgentSpec {
            kind,
            alpha,
            sweep: SweepSpec::default(),
        },
        search: UctConfig {
            iterations,
            exploration: 50.0,
            gamma: 0.99,
            ..UctConfig::default()
        },
        run: RunSpec {
            episodes,
            master_seed: SEED,
            output: None,
            run_id: None,
            parallel: true,
        },
        training: TrainingSpec {
            seed: SEED,
            ..TrainingSpec::default()
        },
    }
}

fn auto() -> Option<AlphaSetting> {
    Some(AlphaSetting::Named(AlphaSetting::AUTO.into()))
}

fn fixed(alpha: f64) -> Option<AlphaSetting> {
    Some(AlphaSetting::Fixed(alpha))
}

fn with_sweep(mut s: ExperimentSpec, iterations: usize, episodes: usize) -> ExperimentSpec {
    s.agent.sweep.iterations = iterations;
    s.agent.sweep.episodes = episodes;
    s
}

fn mean_of(records: &[EpisodeRecord], discounted: bool) -> f64 {
    let values: Vec<f64> = records
        .iter()
        .map(|r| if discounted { r.return_discounted } else { r.return_undiscounted })
        .collect();
    summarize(&values).expect("non-empty").mean
}

fn same_outcomes(a: &[EpisodeRecord], b: &[EpisodeRecord]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.outcome() == y.outcome())
}

fn run(s: &ExperimentSpec) -> Vec<EpisodeRecord> {
    run_experiment(s).expect("experiment runs").records
}

fn criterion1() -> Outcome {
    let env = || lake(thirds());
    let stale = mean_of(&run(&spec(env(), AgentKind::StalePolicy, None, 10_000, 100)), false);
    let mcts = mean_of(&run(&spec(env(), AgentKind::Mcts, None, 10_000, 100)), false);
    let pa_spec = with_sweep(spec(env(), AgentKind::Pamcts, auto(), 10_000, 100), 250, 100);
    let pa_run = run_experiment(&pa_spec).expect("experiment runs");
    let pa = mean_of(&pa_run.records, false);
    let ok = (stale - 0.12).abs() <= 0.10 && (mcts - 0.866).abs() <= 0.10 && pa >= mcts && (pa - 0.936).abs() <= 0.08;
    outcome(
        ok,
        format!(
            "stale {stale:.3}, mcts {mcts:.3}, pamcts {pa:.3} (alpha {})",
            pa_run.agent.alpha()
        ),
    )
}

fn criterion2() -> Outcome {
    let env = || lake([1.0, 0.0, 0.0]);
    let means = [
        mean_of(&run(&spec(env(), AgentKind::StalePolicy, None, 10_000, 100)), false),
        mean_of(&run(&spec(env(), AgentKind::Mcts, None, 10_000, 100)), false),
        mean_of(&run(&with_sweep(spec(env(), AgentKind::Pamcts, auto(), 10_000, 100), 250, 100)), false),
    ];
    outcome(
        means.iter().all(|&m| m == 1.0),
        format!("stale {}, mcts {}, pamcts {}", means[0], means[1], means[2]),
    )
}

fn criterion3() -> Outcome {
    let calm = mean_of(&run(&spec(cliff(0.0), AgentKind::StalePolicy, None, 0, 100)), true);
    let target = 0.99f64.powi(12);
    let pa_spec = with_sweep(spec(cliff(0.3), AgentKind::Pamcts, auto(), 10_000, 100), 5000, 100);
    let pa = run_experiment(&pa_spec).expect("experiment runs");
    let mcts = run(&spec(cliff(0.3), AgentKind::Mcts, None, 10_000, 100));
    let chosen = pa.agent.alpha();
    let ok = (calm - target).abs() <= 0.01 && chosen == 0.0 && same_outcomes(&pa.records, &mcts);
    outcome(
        ok,
        format!(
            "slip 0 stale {calm:.4} vs {target:.4}; slip 0.3 alpha {chosen}, pamcts {:.3}, mcts {:.3}, identical {}",
            mean_of(&pa.records, true),
            mean_of(&mcts, true),
            same_outcomes(&pa.records, &mcts)
        ),
    )
}

fn criterion4() -> Outcome {
    let artifact = train_stale_q(
        &cartpole(9.8, None),
        TrainingMethod::TabularQLearning,
        &TrainingSpec {
            seed: SEED,
            ..TrainingSpec::default()
        },
        0.99,
    )
    .expect("training runs");
    let StaleTable::Discretized { table } = &artifact.table else {
        return outcome(false, "unexpected table kind".into());
    };
    let calm = evaluate_greedy(table, &CartPoleParams::default(), 30, derive_seed(SEED, &[4])).expect("evaluation");
    let hard_stale = mean_of(&run(&spec(cartpole(500.0, None), AgentKind::StalePolicy, None, 100, 30)), false);
    let pa_spec = with_sweep(spec(cartpole(500.0, None), AgentKind::Pamcts, auto(), 100, 30), 100, 30);
    let pa = run_experiment(&pa_spec).expect("experiment runs");
    let pa_mean = mean_of(&pa.records, false);
    let ok = calm >= 2400.0 && hard_stale < 50.0 && pa_mean >= 5.0 * hard_stale;
    outcome(
        ok,
        format!(
            "g=9.8 stale {calm:.1}; g=500 stale {hard_stale:.2}, pamcts {pa_mean:.1} (alpha {}, ratio {:.1})",
            pa.agent.alpha(),
            pa_mean / hard_stale
        ),
    )
}

fn criterion5() -> Outcome {
    let r = verify_theorem1_batch(200, 6, 3, 0.2, 0.9, SEED).expect("batch runs");
    outcome(
        r.passed() && r.trials == 200,
        format!("{} trials, {} violations, max ratio {:.3}", r.trials, r.violations, r.max_ratio),
    )
}

fn criterion6() -> Outcome {
    let r = verify_selection_soundness(1000, SEED).expect("batch runs");
    outcome(
        r.current_gap.passed() && r.stale_gap.passed(),
        format!(
            "current-gap check {}/{} counterexamples; stale-gap check {}/{} counterexamples; {} ties skipped",
            r.current_gap.violations, r.current_gap_applicable, r.stale_gap.violations, r.stale_gap_applicable, r.skipped_ties
        ),
    )
}

fn criterion7() -> Outcome {
    let mut rng = rng_for(SEED, &[7]);
    let (mut disagreements, mut equal, mut empty) = (0usize, 0usize, 0usize);
    for i in 0..500 {
        let epsilon: f64 = rng.random_range(0.0..1.0);
        let delta: f64 = if i % 5 == 0 { epsilon } else { rng.random_range(0.0..1.0) };
        let psi_0: f64 = if i % 7 == 0 { -rng.random_range(0.0..2.0) } else { rng.random_range(0.0..2.0) };
        let range = alpha_feasible_range(epsilon, delta, psi_0).expect("finite inputs");
        equal += usize::from(epsilon == delta);
        let mut any = false;
        for k in 0..=1000 {
            let alpha = k as f64 / 1000.0;
            let direct = alpha * epsilon + (1.0 - alpha) * delta <= psi_0 / 2.0 + epsilon;
            any |= direct;
            disagreements += usize::from(direct != range.contains(alpha));
        }
        empty += usize::from(!any);
    }
    outcome(
        disagreements == 0,
        format!("{disagreements} disagreements; {equal} triples with eps = delta, {empty} empty"),
    )
}

fn criterion8() -> Outcome {
    let r = verify_theorem3_batch(500, 5, 0.9, SEED).expect("batch runs");
    outcome(
        r.passed() && r.trials == 500,
        format!("{} trials, {} violations, max ratio {:.3}", r.trials, r.violations, r.max_ratio),
    )
}

fn criterion9() -> Outcome {
    let envs = [
        ("frozen-lake", lake(thirds()), 500),
        ("cliff-walk", cliff(0.2), 500),
        ("cartpole", cartpole(50.0, None), 50),
    ];
    let mut details = Vec::new();
    let mut ok = true;
    for (name, env, iterations) in envs {
        let pa0 = run(&spec(env.clone(), AgentKind::Pamcts, fixed(0.0), iterations, 50));
        let mcts = run(&spec(env.clone(), AgentKind::Mcts, None, iterations, 50));
        let pa1 = run(&spec(env.clone(), AgentKind::Pamcts, fixed(1.0), iterations, 50));
        let stale = run(&spec(env, AgentKind::StalePolicy, None, iterations, 50));
        let (a, b) = (same_outcomes(&pa0, &mcts), same_outcomes(&pa1, &stale));
        ok &= a && b;
        details.push(format!("{name} alpha0={a} alpha1={b}"));
    }
    outcome(ok, details.join(", "))
}

fn criterion10() -> Outcome {
    let settings = [1.0, 0.833, 0.633, 0.433, 1.0 / 3.0];
    let mut agree = 0;
    let mut details = Vec::new();
    for p1 in settings {
        let base = spec(lake(slip(p1)), AgentKind::Pamcts, auto(), 25, 1);
        let small = sweep_experiment(&with_sweep(base.clone(), 25, 300)).expect("sweep runs").best_alpha;
        let large = sweep_experiment(&with_sweep(base, 100, 300)).expect("sweep runs").best_alpha;
        agree += usize::from(small == large);
        details.push(format!("{p1:.3}: {small}/{large}"));
    }
    outcome(agree >= 4, format!("{agree}/5 agree ({})", details.join(", ")))
}

fn criterion11() -> Outcome {
    let run_mean = |noise: Option<NoiseSpec>| {
        let s = with_sweep(spec(cartpole(50.0, noise), AgentKind::Pamcts, auto(), 100, 30), 100, 30);
        mean_of(&run(&s), false)
    };
    let clean = run_mean(None);
    let noisy: Vec<(f64, f64)> = [1.0, 10.0]
        .into_iter()
        .map(|sigma| {
            let m = run_mean(Some(NoiseSpec {
                gravity_sigma: sigma,
                pole_mass_sigma: 0.0,
            }));
            (sigma, m)
        })
        .collect();
    let ok = noisy.iter().all(|&(_, m)| m >= 0.5 * clean);
    let parts: Vec<String> = noisy.iter().map(|(s, m)| format!("sigma {s}: {m:.1}")).collect();
    outcome(ok, format!("noiseless {clean:.1}, {}", parts.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 11] = [
        (1, "frozen lake uniform slip", criterion1),
        (2, "frozen lake stationary", criterion2),
        (3, "cliff walking calibration", criterion3),
        (4, "cartpole gravity shift", criterion4),
        (5, "value drift bound", criterion5),
        (6, "selection soundness", criterion6),
        (7, "alpha interval", criterion7),
        (8, "blended value gap bound", criterion8),
        (9, "reduction equivalences", criterion9),
        (10, "alpha sweep consistency", criterion10),
        (11, "noisy model robustness", criterion11),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (id, name, f) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let o = f();
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!(
            "{status} criterion {id:>2} {name}: {} [{:.1}s]",
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.passed {
            failed.push(id);
        }
    }
    let expected: Vec<u32> = KNOWN_FAILURES
        .iter()
        .copied()
        .filter(|id| filter.is_empty() || filter.contains(id))
        .collect();
    if failed == expected {
        println!("acceptance: failing set matches known failures {expected:?}");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing set {failed:?}, expected {expected:?}");
        ExitCode::FAILURE
    }
}
