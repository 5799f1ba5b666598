// SPDX-License-Identifier: Apache-2.0

//! Alternating optimization of a multiplier's compressor tree (PPO, prefix
//! tree held fixed) and its final `2N`-bit prefix adder (MCTS, compressor
//! held fixed). The best verified design so far is kept as the incumbent.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::adder_search::{run_search, SearchConfig, SearchError, SearchMode};
use crate::compressor_tree::{parse_actions, Compressor, CompressorError, CompressorState};
use crate::cost_eval::{
    proxy_eval_multiplier, stable_hash, EvalError, EvalResult, MultiplierEvaluator,
};
use crate::hdl_netlist::{verify, Design, NetlistError, VerifyMode, VerifyReport};
use crate::ppo_agent::{train, AgentParams, PpoConfig, PpoError, PpoLearner};
use crate::prefix_tree::{PrefixError, PrefixTree, SeedFamily};

/// Widths up to this many operand bits are verified exhaustively.
const EXHAUSTIVE_OPERAND_BITS: usize = 13;
const RANDOM_VECTORS: u64 = 10_000;

#[derive(Debug, Error)]
pub enum CodesignError {
    #[error("invalid co-design config: {0}")]
    InvalidConfig(String),
    #[error("round {round}, compressor phase: {source}")]
    Ppo {
        round: usize,
        #[source]
        source: PpoError,
    },
    #[error("round {round}, prefix phase: {source}")]
    Search {
        round: usize,
        #[source]
        source: SearchError,
    },
    #[error("round {round}: design failed verification: {report:?}")]
    VerificationFailed {
        round: usize,
        report: Box<VerifyReport>,
    },
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error(transparent)]
    Compressor(#[from] CompressorError),
    #[error(transparent)]
    Prefix(#[from] PrefixError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("bad design bundle: {0}")]
    Bundle(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodesignConfig {
    pub width: usize,
    pub rounds: usize,
    /// Environment steps of PPO training per round.
    pub compressor_steps: usize,
    /// MCTS iterations on the prefix tree per round.
    pub prefix_steps: usize,
    pub ppo: PpoConfig,
    /// Template for the prefix phase; mode, budget and seed are overridden.
    pub search: SearchConfig,
    pub rng_seed: u64,
}

impl CodesignConfig {
    pub fn new(width: usize) -> Self {
        CodesignConfig {
            width,
            rounds: 3,
            compressor_steps: 900,
            prefix_steps: 100,
            ppo: PpoConfig::default(),
            search: SearchConfig {
                mode: SearchMode::Practical,
                ..SearchConfig::default()
            },
            rng_seed: 0,
        }
    }

    /// PPO with the prefix tree fixed to Sklansky, for comparison.
    pub fn ppo_only(width: usize) -> Self {
        CodesignConfig {
            rounds: 1,
            prefix_steps: 0,
            ..CodesignConfig::new(width)
        }
    }

    pub fn total_steps(&self) -> usize {
        self.rounds * (self.compressor_steps + self.prefix_steps)
    }

    fn validate(&self) -> Result<(), CodesignError> {
        if self.width < 2 {
            return Err(CodesignError::InvalidConfig(format!(
                "width must be at least 2, got {}",
                self.width
            )));
        }
        if self.rounds == 0 {
            return Err(CodesignError::InvalidConfig(
                "rounds must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Score used to rank whole multipliers.
    pub fn score(&self, eval: &EvalResult) -> f64 {
        eval.weighted_score(self.search.alpha)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub round: usize,
    pub phase: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierDesign {
    pub state: CompressorState,
    pub tree: PrefixTree,
    pub eval: EvalResult,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Bundle {
    width: usize,
    actions: String,
    prefixtree: String,
    eval: EvalResult,
    provenance: Provenance,
}

impl MultiplierDesign {
    pub fn width(&self) -> usize {
        self.state.width()
    }

    pub fn actions(&self) -> &[Compressor] {
        self.state.actions()
    }

    /// JSON with the width, the action string, the serialized prefix tree,
    /// the evaluation and the provenance.
    pub fn to_bundle(&self) -> String {
        let b = Bundle {
            width: self.width(),
            actions: self.state.action_string(),
            prefixtree: self.tree.serialize(),
            eval: self.eval,
            provenance: self.provenance.clone(),
        };
        serde_json::to_string_pretty(&b).expect("bundle serializes")
    }

    pub fn from_bundle(text: &str) -> Result<Self, CodesignError> {
        let b: Bundle =
            serde_json::from_str(text).map_err(|e| CodesignError::Bundle(e.to_string()))?;
        let state = CompressorState::replay(b.width, &parse_actions(&b.actions)?)?;
        if !state.is_terminal() {
            return Err(CompressorError::NotTerminal.into());
        }
        let tree = PrefixTree::deserialize(&b.prefixtree)?;
        if tree.width() != 2 * b.width {
            return Err(CodesignError::Bundle(format!(
                "prefix tree width {} does not match multiplier width {}",
                tree.width(),
                b.width
            )));
        }
        tree.check_legal()?;
        Ok(MultiplierDesign {
            state,
            tree,
            eval: b.eval,
            provenance: b.provenance,
        })
    }
}

/// Checks a multiplier against integer products: exhaustively for small
/// widths, otherwise on seeded random operands.
pub fn verify_multiplier(
    state: &CompressorState,
    tree: &PrefixTree,
    seed: u64,
) -> Result<VerifyReport, NetlistError> {
    let mode = if state.width() <= EXHAUSTIVE_OPERAND_BITS {
        VerifyMode::Exhaustive
    } else {
        VerifyMode::Random {
            count: RANDOM_VECTORS,
            seed,
        }
    };
    verify(Design::Multiplier(state, tree), mode)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseLog {
    pub round: usize,
    pub phase: String,
    pub steps: usize,
    /// Best design of this phase.
    pub delay: Option<f64>,
    pub area: Option<f64>,
    pub accepted: bool,
    /// Incumbent score after the phase.
    pub incumbent_score: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct CodesignOutcome {
    pub best: MultiplierDesign,
    pub params: AgentParams,
    pub phases: Vec<PhaseLog>,
}

impl CodesignOutcome {
    pub fn total_steps(&self) -> usize {
        self.phases.iter().map(|p| p.steps).sum()
    }
}

/// Independent stream seed per `(round, phase)`.
pub fn derive_seed(seed: u64, round: usize, phase: &str) -> u64 {
    stable_hash(format!("{seed}/{round}/{phase}").as_bytes())
}

struct Incumbent {
    design: Option<MultiplierDesign>,
    score: f64,
}

impl Incumbent {
    /// Verifies a candidate and keeps it if it scores strictly better.
    fn offer(
        &mut self,
        candidate: MultiplierDesign,
        score: f64,
        round: usize,
    ) -> Result<bool, CodesignError> {
        if self.design.is_some() && score <= self.score {
            return Ok(false);
        }
        let report =
            verify_multiplier(&candidate.state, &candidate.tree, candidate.provenance.seed)?;
        if !report.pass {
            return Err(CodesignError::VerificationFailed {
                round,
                report: Box::new(report),
            });
        }
        self.design = Some(candidate);
        self.score = score;
        Ok(true)
    }
}

/// Runs `config.rounds` rounds of compressor training then prefix search.
///
/// PPO parameters carry over between rounds. Each phase draws from its own
/// seeded stream, so round 1's compressor phase is identical to a
/// PPO-only run with the same seed.
pub fn run_codesign(
    config: &CodesignConfig,
    evaluator: &mut dyn MultiplierEvaluator,
) -> Result<CodesignOutcome, CodesignError> {
    config.validate()?;
    let n = config.width;
    let mut tree = PrefixTree::seed(SeedFamily::Sklansky, 2 * n)?;
    let mut init_rng = ChaCha8Rng::seed_from_u64(derive_seed(config.rng_seed, 0, "init"));
    let mut learner = PpoLearner::new(AgentParams::new(&mut init_rng), &config.ppo);
    let mut incumbent = Incumbent {
        design: None,
        score: f64::NEG_INFINITY,
    };
    let mut phases = Vec::new();

    for round in 1..=config.rounds {
        let seed = derive_seed(config.rng_seed, round, "compressor");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fixed = tree.clone();
        let outcome = train(
            n,
            config.compressor_steps,
            &config.ppo,
            &mut learner,
            |s: &CompressorState| evaluator.evaluate(s, &fixed),
            &mut rng,
        )
        .map_err(|source| CodesignError::Ppo { round, source })?;
        let mut log = PhaseLog {
            round,
            phase: "compressor".into(),
            steps: outcome.steps,
            delay: None,
            area: None,
            accepted: false,
            incumbent_score: None,
        };
        if let Some((state, eval)) = outcome.best {
            log.delay = Some(eval.delay);
            log.area = Some(eval.area);
            let candidate = MultiplierDesign {
                state,
                tree: fixed,
                eval,
                provenance: Provenance {
                    round,
                    phase: "compressor".into(),
                    seed,
                },
            };
            log.accepted = incumbent.offer(candidate, config.score(&eval), round)?;
        }
        log.incumbent_score = incumbent.design.as_ref().map(|_| incumbent.score);
        phases.push(log);

        if config.prefix_steps > 0 {
            // the compressor phase always finishes an episode unless its budget is tiny
            let state = match &incumbent.design {
                Some(d) => d.state.clone(),
                None => CompressorState::all_full(n)?,
            };
            let seed = derive_seed(config.rng_seed, round, "prefix");
            let search_cfg = SearchConfig {
                mode: SearchMode::Practical,
                step_budget: config.prefix_steps,
                rng_seed: seed,
                ..config.search
            };
            let mut adder_eval = |t: &PrefixTree| evaluator.evaluate(&state, t);
            let result = run_search(&tree, &search_cfg, &mut adder_eval)
                .map_err(|source| CodesignError::Search { round, source })?;
            let eval = result.best_eval;
            let candidate = MultiplierDesign {
                state,
                tree: result.best.clone(),
                eval,
                provenance: Provenance {
                    round,
                    phase: "prefix".into(),
                    seed,
                },
            };
            let accepted = incumbent.offer(candidate, config.score(&eval), round)?;
            phases.push(PhaseLog {
                round,
                phase: "prefix".into(),
                steps: result.trace.len(),
                delay: Some(eval.delay),
                area: Some(eval.area),
                accepted,
                incumbent_score: incumbent.design.as_ref().map(|_| incumbent.score),
            });
        }
        if let Some(d) = &incumbent.design {
            tree = d.tree.clone();
        }
    }

    let best = match incumbent.design {
        Some(d) => d,
        // budgets too small to finish a single episode
        None => {
            let state = CompressorState::all_full(n)?;
            let eval = evaluator.evaluate(&state, &tree)?;
            let candidate = MultiplierDesign {
                state,
                tree,
                eval,
                provenance: Provenance {
                    round: 0,
                    phase: "fallback".into(),
                    seed: config.rng_seed,
                },
            };
            incumbent.offer(candidate, config.score(&eval), 0)?;
            incumbent.design.expect("first offer is always accepted")
        }
    };
    Ok(CodesignOutcome {
        best,
        params: learner.params,
        phases,
    })
}

/// Wallace-style schedule: at the lowest column with more than two bits,
/// holding `k` bits, place `k / 3` full adders and one half adder when
/// `k % 3 == 2`, then move on. Paired with Sklansky for the final adder.
pub fn wallace_state(width: usize) -> Result<CompressorState, CompressorError> {
    let mut state = CompressorState::new(width)?;
    while let Some(digit) = state.action_digit() {
        let k = state.column_counts()[digit];
        let mut placed = 0;
        while placed < k / 3 && state.action_digit() == Some(digit) {
            state.step(Compressor::Full)?;
            placed += 1;
        }
        if k % 3 == 2 && state.action_digit() == Some(digit) {
            state.step(Compressor::Half)?;
        }
    }
    Ok(state)
}

pub fn baseline_wallace(width: usize) -> Result<MultiplierDesign, CodesignError> {
    let state = wallace_state(width)?;
    let tree = PrefixTree::seed(SeedFamily::Sklansky, 2 * width)?;
    let eval = proxy_eval_multiplier(&state, &tree)?;
    Ok(MultiplierDesign {
        state,
        tree,
        eval,
        provenance: Provenance {
            round: 0,
            phase: "wallace".into(),
            seed: 0,
        },
    })
}
