// SPDX-License-Identifier: Apache-2.0

//! Acceptance runner: each check prints one PASS/FAIL line with the measured
//! numbers, and the process exits non-zero if any check fails.

mod common;

use std::cell::Cell;
use std::collections::HashSet;
use std::process::ExitCode;
use std::time::Instant;

use arithgame::adder_search::{optimize_levels_observed, run_search, SearchConfig, SearchMode};
use arithgame::codesign::{run_codesign, CodesignConfig};
use arithgame::compressor_tree::CompressorState;
use arithgame::cost_eval::{
    pareto_front, proxy_eval_adder, proxy_eval_multiplier, select_top_fraction, AdderEvaluator,
    CacheStore, Cached, EvalError, EvalResult, EvalSource, MultiplierEvaluator,
    ProxyMultiplierEvaluator,
};
use arithgame::hdl_netlist::{verify, Design, VerifyMode};
use arithgame::ppo_agent::{
    clipped_surrogate, policy_loss, policy_loss_grad, save_checkpoint, softmax2, train, value_loss,
    value_loss_grad, AgentParams, PpoConfig, PpoLearner, Sample,
};
use arithgame::prefix_tree::{theory_size_bound, PrefixTree, SeedFamily};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type CheckFn = fn() -> Check;

fn ensure(cond: bool, detail: String) -> Check {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn seed_exactness() -> Check {
    let start = Instant::now();
    let m64 = PrefixTree::seed(SeedFamily::Sklansky, 64)
        .unwrap()
        .metrics()
        .unwrap();
    let m128 = PrefixTree::seed(SeedFamily::Sklansky, 128)
        .unwrap()
        .metrics()
        .unwrap();
    let secs = start.elapsed().as_secs_f64();
    let got = ((m64.level, m64.size), (m128.level, m128.size));
    ensure(
        got == ((6, 192), (7, 448)) && secs < 1.0,
        format!("64-bit {:?}, 128-bit {:?}, {secs:.3}s", got.0, got.1),
    )
}

fn bound_consistency() -> Check {
    let b64: Vec<usize> = (6..=10)
        .map(|l| theory_size_bound(64, l).unwrap())
        .collect();
    let b128: Vec<usize> = (7..=10)
        .map(|l| theory_size_bound(128, l).unwrap())
        .collect();
    ensure(
        b64 == [120, 119, 118, 117, 116] && b128 == [247, 246, 245, 244],
        format!("64-bit {b64:?}, 128-bit {b128:?}"),
    )
}

fn search_quality() -> Check {
    let start = Instant::now();
    let mut best = None;
    optimize_levels_observed(64, 10_000, 0, 0, |_, r| best = Some(r.best.size()))
        .map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let size = best.unwrap();
    ensure(
        (120..=182).contains(&size) && secs < 600.0,
        format!("64-bit L=6 best size {size} after 10^4 steps (Sklansky 192, bound 120, reference 167), {secs:.1}s"),
    )
}

/// Proxy multiplier evaluator that also verifies every distinct design it
/// is asked to score, exhaustively.
struct Verifying {
    seen: HashSet<String>,
    failures: usize,
    slowest: f64,
}

impl MultiplierEvaluator for Verifying {
    fn evaluate(
        &mut self,
        state: &CompressorState,
        tree: &PrefixTree,
    ) -> Result<EvalResult, EvalError> {
        if self
            .seen
            .insert(format!("{}{}", state.serialize(), tree.serialize()))
        {
            let start = Instant::now();
            let r = verify(Design::Multiplier(state, tree), VerifyMode::Exhaustive)?;
            self.slowest = self.slowest.max(start.elapsed().as_secs_f64());
            if !r.pass || r.vectors != 65_536 {
                self.failures += 1;
            }
        }
        proxy_eval_multiplier(state, tree)
    }
}

fn exhaustive_correctness() -> Check {
    let mut adders = HashSet::new();
    let mut adder_failures = 0;
    let mut slowest: f64 = 0.0;
    let mut check_adder = |t: &PrefixTree| {
        if adders.insert(t.serialize()) {
            let start = Instant::now();
            let r = verify(Design::Adder(t), VerifyMode::Exhaustive).unwrap();
            slowest = slowest.max(start.elapsed().as_secs_f64());
            if !r.pass || r.vectors != 65_536 {
                adder_failures += 1;
            }
        }
    };
    let mut theoretical = Vec::new();
    optimize_levels_observed(8, 2_000, 3, 0, |_, r| {
        theoretical.extend(r.designs.iter().map(|d| d.tree.clone()))
    })
    .map_err(|e| e.to_string())?;
    theoretical.iter().for_each(&mut check_adder);
    for family in SeedFamily::ALL {
        let config = SearchConfig {
            mode: SearchMode::Practical,
            step_budget: 300,
            rng_seed: 1,
            ..SearchConfig::default()
        };
        let mut proxy = proxy_eval_adder;
        let r = run_search(&PrefixTree::seed(family, 8).unwrap(), &config, &mut proxy)
            .map_err(|e| e.to_string())?;
        r.designs.iter().for_each(|d| check_adder(&d.tree));
    }

    let mut mult = Verifying {
        seen: HashSet::new(),
        failures: 0,
        slowest: 0.0,
    };
    run_codesign(&CodesignConfig::new(8), &mut mult).map_err(|e| e.to_string())?;
    let slowest = slowest.max(mult.slowest);
    ensure(
        adder_failures == 0 && mult.failures == 0 && slowest < 60.0 && !mult.seen.is_empty(),
        format!(
            "{} adders, {} multipliers verified exhaustively; failures {}/{}; slowest {slowest:.3}s",
            adders.len(),
            mult.seen.len(),
            adder_failures,
            mult.failures
        ),
    )
}

fn legality_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = Vec::new();
    for k in 0..10_000 {
        let width = [8, 16, 32][k % 3];
        let len = rng.gen_range(1..=30);
        if let Err(e) = common::random_sequence(width, len, &mut rng) {
            violations.push(format!("seq {k} width {width}: {e}"));
        }
    }
    ensure(
        violations.is_empty(),
        format!(
            "10000 sequences, {} violations {:?}",
            violations.len(),
            violations.first()
        ),
    )
}

fn compressor_invariants() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut violations = Vec::new();
    for width in [4, 8] {
        for k in 0..1_000 {
            if let Err(e) = common::random_episode(width, &mut rng) {
                violations.push(format!("width {width} episode {k}: {e}"));
            }
        }
    }
    ensure(
        violations.is_empty(),
        format!(
            "2000 episodes, {} violations {:?}",
            violations.len(),
            violations.first()
        ),
    )
}

fn ppo_correctness() -> Check {
    let mut worst: f64 = 0.0;
    for seed in 0..5 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = AgentParams::new(&mut rng);
        let batch: Vec<Sample> = (0..10)
            .map(|k| {
                let features = common::smooth_features(&params, &mut rng);
                let action = k % 2;
                let p = softmax2(&params.policy.forward(&features))[action];
                let v = params.value.forward(&features)[0];
                let shift = if k < 5 {
                    rng.gen_range(-0.05..0.05)
                } else {
                    [-0.6, 0.6][k % 2]
                };
                let gap = if k % 3 == 0 {
                    rng.gen_range(1.5..3.0)
                } else {
                    rng.gen_range(-0.7..0.7)
                };
                Sample {
                    features,
                    action,
                    old_log_prob: p.ln() + shift,
                    ret: v + gap,
                    value: v + rng.gen_range(-1.0..1.0),
                }
            })
            .collect();
        let (_, pg) = policy_loss_grad(&params.policy, &batch, 0.2);
        let mut net = params.policy.clone();
        let pe = common::gradient_error(
            &params.policy.params(),
            &pg,
            |p| {
                net.set_params(p);
                policy_loss(&net, &batch, 0.2)
            },
            1e-5,
        );
        worst = worst.max(pe);
        let (_, vg) = value_loss_grad(&params.value, &batch);
        let mut net = params.value.clone();
        worst = worst.max(common::gradient_error(
            &params.value.params(),
            &vg,
            |p| {
                net.set_params(p);
                value_loss(&net, &batch)
            },
            1e-5,
        ));
    }
    let a = clipped_surrogate(1.5, 2.0, 0.2);
    let b = clipped_surrogate(0.5, -1.0, 0.2);
    ensure(
        worst < 1e-4 && a == 2.4 && b == -0.8,
        format!("worst gradient relative error {worst:.2e}; surrogates {a}, {b}"),
    )
}

fn ppo_smoke() -> Check {
    let width = 8;
    let config = PpoConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut learner = PpoLearner::new(AgentParams::new(&mut rng), &config);
    let tree = PrefixTree::seed(SeedFamily::Sklansky, 2 * width).unwrap();
    let out = train(
        width,
        900,
        &config,
        &mut learner,
        |s: &CompressorState| proxy_eval_multiplier(s, &tree),
        &mut rng,
    )
    .map_err(|e| e.to_string())?;
    let r = &out.episode_returns;
    if r.is_empty() {
        return Err("no episode completed in 900 steps".into());
    }
    let window = r.len().min(50);
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let first = mean(&r[..window]);
    let last = mean(&r[r.len() - window..]);
    let best = out.best.as_ref().unwrap().1.delay;
    let all_fa = proxy_eval_multiplier(&CompressorState::all_full(width).unwrap(), &tree)
        .unwrap()
        .delay;
    ensure(
        last >= first && best <= all_fa,
        format!(
            "{} episodes (windows of {window} overlap when fewer than 100): first mean {first:.3}, last mean {last:.3}; best delay {best} vs all-FA {all_fa}",
            r.len()
        ),
    )
}

fn codesign_dominance() -> Check {
    let full = CodesignConfig::new(8);
    let mut eval = ProxyMultiplierEvaluator;
    let co = run_codesign(&full, &mut eval).map_err(|e| e.to_string())?;
    let ppo = run_codesign(&CodesignConfig::ppo_only(8), &mut eval).map_err(|e| e.to_string())?;
    let (s_co, s_ppo) = (full.score(&co.best.eval), full.score(&ppo.best.eval));
    ensure(
        s_co >= s_ppo && co.total_steps() == 3000 && full.total_steps() == 3000,
        format!(
            "co-design score {s_co:.4} vs PPO-only {s_ppo:.4}; steps {}",
            co.total_steps()
        ),
    )
}

fn cache_behaviour() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("cache.jsonl");
    let t = PrefixTree::seed(SeedFamily::BrentKung, 16).unwrap();
    let calls = Cell::new(0u64);
    let counting = |t: &PrefixTree| {
        calls.set(calls.get() + 1);
        proxy_eval_adder(t)
    };
    let (first, second, invocations) = {
        let store = CacheStore::open(&path).map_err(|e| e.to_string())?;
        let mut cached = Cached::new(counting, &store);
        let first = cached.evaluate(&t).map_err(|e| e.to_string())?;
        let before = cached.invocations();
        let second = cached.evaluate(&t).map_err(|e| e.to_string())?;
        (first, second, cached.invocations() - before)
    };
    let reopened = CacheStore::open(&path).map_err(|e| e.to_string())?;
    let mut cold = Cached::new(
        |_: &PrefixTree| -> Result<EvalResult, EvalError> { panic!("cache miss after replay") },
        &reopened,
    );
    let replayed = cold.evaluate(&t).map_err(|e| e.to_string())?;
    ensure(
        invocations == 0
            && calls.get() == 1
            && second.same_metrics(&first)
            && second.source == EvalSource::Cache
            && replayed.same_metrics(&first)
            && reopened.len() == 1,
        format!(
            "second lookup invoked evaluator {invocations} times; replayed {} entries; results equal {}",
            reopened.len(),
            replayed.same_metrics(&first)
        ),
    )
}

fn pareto_oracles() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut mismatches = 0;
    for _ in 0..100 {
        let pts = common::random_points(&mut rng);
        let fraction = rng.gen_range(0.05..=1.0);
        if pareto_front(&pts) != common::brute_front(&pts)
            || select_top_fraction(&pts, fraction).unwrap()
                != common::brute_top_fraction(&pts, fraction)
        {
            mismatches += 1;
        }
    }
    ensure(
        mismatches == 0,
        format!("100 point sets, {mismatches} mismatches"),
    )
}

fn run_everything(seed: u64) -> Vec<String> {
    let mut out = Vec::new();
    let config = SearchConfig {
        level_bound: Some(5),
        step_budget: 300,
        rng_seed: seed,
        ..SearchConfig::default()
    };
    let sk = PrefixTree::seed(SeedFamily::Sklansky, 32).unwrap();
    let mut unused = proxy_eval_adder;
    let r = run_search(&sk, &config, &mut unused).unwrap();
    out.push(r.best.serialize());
    out.extend(r.log_records().map(|l| serde_json::to_string(&l).unwrap()));
    let practical = SearchConfig {
        mode: SearchMode::Practical,
        level_bound: None,
        ..config
    };
    let r = run_search(
        &PrefixTree::seed(SeedFamily::Ripple, 16).unwrap(),
        &practical,
        &mut unused,
    )
    .unwrap();
    out.push(r.best.serialize());
    let co = run_codesign(
        &CodesignConfig {
            rng_seed: seed,
            ..CodesignConfig::new(4)
        },
        &mut ProxyMultiplierEvaluator,
    )
    .unwrap();
    out.push(co.best.to_bundle());
    out.push(save_checkpoint(&co.params));
    out
}

fn determinism() -> Check {
    let a = run_everything(9);
    let b = run_everything(9);
    let c = run_everything(10);
    ensure(
        a == b && a != c,
        format!(
            "{} artifacts byte-identical on rerun; a different seed changes them: {}",
            a.len(),
            a != c
        ),
    )
}

fn main() -> ExitCode {
    let checks: [(&str, CheckFn); 12] = [
        ("seed exactness", seed_exactness),
        ("size bound table", bound_consistency),
        ("theoretical search quality", search_quality),
        ("exhaustive functional correctness", exhaustive_correctness),
        ("prefix tree legality suite", legality_suite),
        ("compressor invariants", compressor_invariants),
        ("ppo gradients and surrogate", ppo_correctness),
        ("ppo learning smoke", ppo_smoke),
        ("co-design dominance", codesign_dominance),
        ("evaluation cache", cache_behaviour),
        ("pareto utilities", pareto_oracles),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "{tag} {:>2} {name}: {detail} [{:.1}s]",
            k + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "{} of {} acceptance checks passed",
        checks.len() - failed,
        checks.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
