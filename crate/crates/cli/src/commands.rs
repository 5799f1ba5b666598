// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context};
use arithgame::adder_search::{
    optimize_levels_observed, run_search, RunLogRecord, SearchConfig, SearchMode,
};
use arithgame::codesign::{baseline_wallace, run_codesign, CodesignConfig};
use arithgame::compressor_tree::CompressorState;
use arithgame::cost_eval::{
    pareto_front, proxy_eval_adder, proxy_eval_multiplier, theoretical_eval, AdderEvaluator,
    CacheStore, Cached, EvalError, EvalResult, ExternalAdderEvaluator, ExternalMultiplierEvaluator,
    MultiplierEvaluator,
};
use arithgame::hdl_netlist::{
    build_adder_netlist, build_multiplier_netlist, emit_verilog as to_verilog, verify as check,
    Design, VerifyMode,
};
use arithgame::ppo_agent::save_checkpoint;
use arithgame::prefix_tree::{theory_size_bound, PrefixTree, SeedFamily};
use serde::Serialize;
use serde_json::Value;

use crate::args::*;
use crate::design::{load, write_output, LoadedDesign, RunLog};

fn seed_family(f: Family) -> anyhow::Result<SeedFamily> {
    Ok(match f {
        Family::Sklansky => SeedFamily::Sklansky,
        Family::BrentKung => SeedFamily::BrentKung,
        Family::KoggeStone => SeedFamily::KoggeStone,
        Family::Ripple => SeedFamily::Ripple,
        Family::Wallace => bail!("wallace is a multiplier, not a prefix-adder family"),
    })
}

/// The proxy model or an external command, as chosen on the command line.
enum Evaluator {
    Proxy,
    ExternalAdder(ExternalAdderEvaluator),
    ExternalMultiplier(ExternalMultiplierEvaluator),
}

impl Evaluator {
    fn from_args(args: &EvaluatorArgs, multiplier: bool) -> anyhow::Result<Self> {
        let Some(cmd) = &args.external_cmd else {
            return Ok(Evaluator::Proxy);
        };
        let workdir = args
            .workdir
            .clone()
            .unwrap_or_else(|| std::env::temp_dir().join("arithgame"));
        let timeout = match args.timeout {
            Some(s) if !(s.is_finite() && s > 0.0) => {
                bail!("--timeout must be a positive number of seconds")
            }
            Some(s) => Some(Duration::from_secs_f64(s)),
            None => None,
        };
        Ok(if multiplier {
            let mut e = ExternalMultiplierEvaluator::new(cmd.clone(), workdir);
            e.timeout = timeout;
            Evaluator::ExternalMultiplier(e)
        } else {
            let mut e = ExternalAdderEvaluator::new(cmd.clone(), workdir);
            e.timeout = timeout;
            Evaluator::ExternalAdder(e)
        })
    }
}

impl AdderEvaluator for Evaluator {
    fn evaluate(&mut self, tree: &PrefixTree) -> Result<EvalResult, EvalError> {
        match self {
            Evaluator::ExternalAdder(e) => e.evaluate(tree),
            _ => proxy_eval_adder(tree),
        }
    }
}

impl MultiplierEvaluator for Evaluator {
    fn evaluate(
        &mut self,
        state: &CompressorState,
        tree: &PrefixTree,
    ) -> Result<EvalResult, EvalError> {
        match self {
            Evaluator::ExternalMultiplier(e) => e.evaluate(state, tree),
            _ => proxy_eval_multiplier(state, tree),
        }
    }
}

fn open_cache(path: &Option<PathBuf>) -> anyhow::Result<CacheStore> {
    Ok(match path {
        Some(p) => CacheStore::open(p).with_context(|| format!("opening cache {}", p.display()))?,
        None => CacheStore::in_memory(),
    })
}

pub fn gen(a: &GenArgs) -> anyhow::Result<ExitCode> {
    let text = match a.family {
        Family::Wallace => {
            let mut s = baseline_wallace(a.bits)?.to_bundle();
            s.push('\n');
            s
        }
        f => PrefixTree::seed(seed_family(f)?, a.bits)?.serialize(),
    };
    write_output(a.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct StagedRecord {
    level_bound: usize,
    #[serde(flatten)]
    record: RunLogRecord,
}

pub fn optimize_adder(a: &OptimizeAdderArgs) -> anyhow::Result<ExitCode> {
    let mut log = RunLog::new("optimize-adder", a)?;
    let out = match a.objective {
        Objective::Size => {
            let mut records = Vec::new();
            let table = optimize_levels_observed(
                a.bits,
                a.steps,
                a.extra_levels,
                a.seed,
                |level, result| {
                    for record in result.log_records() {
                        records.push(StagedRecord {
                            level_bound: level,
                            record,
                        });
                    }
                },
            )?;
            for r in &records {
                log.push(r)?;
            }
            let mut csv = String::from("level,size,bound,iterations\n");
            for row in &table {
                let bound = theory_size_bound(a.bits, row.level)?;
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    row.level, row.best_size, bound, row.iterations
                ));
            }
            csv
        }
        Objective::Delay => {
            let seed = PrefixTree::seed(seed_family(a.family)?, a.bits)?;
            let mut config = SearchConfig {
                mode: SearchMode::Practical,
                alpha: a.alpha,
                beta: a.beta,
                max_sim_steps: a.max_sim_steps,
                step_budget: a.steps,
                rng_seed: a.seed,
                ..SearchConfig::default()
            };
            if let Some(c) = a.c {
                config.c = c;
            }
            let cache = open_cache(&a.evaluator.cache)?;
            let mut inner = Evaluator::from_args(&a.evaluator, false)?;
            let mut eval = Cached::new(
                |t: &PrefixTree| AdderEvaluator::evaluate(&mut inner, t),
                &cache,
            );
            let result = run_search(&seed, &config, &mut eval)?;
            for record in result.log_records() {
                log.push(&record)?;
            }
            result.best.serialize()
        }
    };
    log.save(a.log.as_deref())?;
    write_output(a.out.as_deref(), &out)?;
    Ok(ExitCode::SUCCESS)
}

pub fn optimize_multiplier(a: &OptimizeMultiplierArgs) -> anyhow::Result<ExitCode> {
    let mut config = if a.ppo_only {
        CodesignConfig::ppo_only(a.bits)
    } else {
        CodesignConfig {
            rounds: a.rounds,
            prefix_steps: a.prefix_steps,
            ..CodesignConfig::new(a.bits)
        }
    };
    config.compressor_steps = a.compressor_steps;
    config.search.alpha = a.alpha;
    config.rng_seed = a.seed;

    let cache = open_cache(&a.evaluator.cache)?;
    let inner = Evaluator::from_args(&a.evaluator, true)?;
    let mut eval = Cached::new(inner, &cache);
    let outcome = run_codesign(&config, &mut eval)?;

    let mut log = RunLog::new("optimize-multiplier", a)?;
    for phase in &outcome.phases {
        log.push(phase)?;
    }
    log.save(a.log.as_deref())?;
    if let Some(p) = &a.checkpoint {
        std::fs::write(p, save_checkpoint(&outcome.params))
            .with_context(|| format!("writing {}", p.display()))?;
    }
    let mut bundle = outcome.best.to_bundle();
    bundle.push('\n');
    write_output(a.out.as_deref(), &bundle)?;
    Ok(ExitCode::SUCCESS)
}

pub fn emit_verilog(a: &EmitVerilogArgs) -> anyhow::Result<ExitCode> {
    let text = match load(&a.design)? {
        LoadedDesign::Adder(t) => to_verilog(
            &build_adder_netlist(&t)?,
            a.module.as_deref().unwrap_or("prefix_adder"),
        )?,
        LoadedDesign::Multiplier(d) => to_verilog(
            &build_multiplier_netlist(&d.state, &d.tree)?,
            a.module.as_deref().unwrap_or("multiplier"),
        )?,
    };
    write_output(a.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

pub fn verify(a: &VerifyArgs) -> anyhow::Result<ExitCode> {
    let mode = if a.exhaustive {
        VerifyMode::Exhaustive
    } else {
        VerifyMode::Random {
            count: a.vectors,
            seed: a.seed,
        }
    };
    let loaded = load(&a.design)?;
    let report = match &loaded {
        LoadedDesign::Adder(t) => check(Design::Adder(t), mode)?,
        LoadedDesign::Multiplier(d) => check(Design::Multiplier(&d.state, &d.tree), mode)?,
    };
    println!("{}", serde_json::to_string(&report)?);
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn eval(a: &EvalArgs) -> anyhow::Result<ExitCode> {
    let loaded = load(&a.design)?;
    let cache = open_cache(&a.evaluator.cache)?;
    let result = match &loaded {
        LoadedDesign::Adder(t) if a.theoretical => theoretical_eval(t)?,
        LoadedDesign::Adder(t) => {
            let mut inner = Evaluator::from_args(&a.evaluator, false)?;
            AdderEvaluator::evaluate(
                &mut Cached::new(
                    |t: &PrefixTree| AdderEvaluator::evaluate(&mut inner, t),
                    &cache,
                ),
                t,
            )?
        }
        LoadedDesign::Multiplier(_) if a.theoretical => {
            bail!("--theoretical applies to prefix adders only")
        }
        LoadedDesign::Multiplier(d) => {
            let inner = Evaluator::from_args(&a.evaluator, true)?;
            MultiplierEvaluator::evaluate(&mut Cached::new(inner, &cache), &d.state, &d.tree)?
        }
    };
    println!("{}", serde_json::to_string(&result)?);
    Ok(ExitCode::SUCCESS)
}

struct Point {
    delay: f64,
    area: f64,
    level: Option<u64>,
    size: Option<u64>,
}

fn read_points(text: &str) -> anyhow::Result<Vec<Point>> {
    let mut points = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let v: Value = serde_json::from_str(line)
            .with_context(|| format!("log line {} is not JSON", k + 1))?;
        let (Some(delay), Some(area)) = (
            v.get("delay").and_then(Value::as_f64),
            v.get("area").and_then(Value::as_f64),
        ) else {
            continue;
        };
        points.push(Point {
            delay,
            area,
            level: v.get("level").and_then(Value::as_u64),
            size: v.get("size").and_then(Value::as_u64),
        });
    }
    Ok(points)
}

fn csv_row(section: &str, index: usize, p: &Point) -> String {
    let opt = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_default();
    format!(
        "{section},{index},{},{},{},{}\n",
        p.delay,
        p.area,
        opt(p.level),
        opt(p.size)
    )
}

pub fn pareto(a: &ParetoArgs) -> anyhow::Result<ExitCode> {
    let text =
        std::fs::read_to_string(&a.log).with_context(|| format!("reading {}", a.log.display()))?;
    let points = read_points(&text)?;
    if points.is_empty() {
        return Err(anyhow!(
            "no records with delay and area in {}",
            a.log.display()
        ));
    }
    let pairs: Vec<(f64, f64)> = points.iter().map(|p| (p.delay, p.area)).collect();
    let front = pareto_front(&pairs);
    let mut csv = String::from("section,index,delay,area,level,size\n");
    // Stages of a run re-log their seed design; list each front point once.
    let mut seen = Vec::new();
    for &k in &front {
        let key = (points[k].delay.to_bits(), points[k].area.to_bits());
        if !seen.contains(&key) {
            seen.push(key);
            csv.push_str(&csv_row("front", k, &points[k]));
        }
    }
    for (k, p) in points.iter().enumerate() {
        csv.push_str(&csv_row("all", k, p));
    }
    write_output(a.out.as_deref(), &csv)?;
    Ok(ExitCode::SUCCESS)
}
