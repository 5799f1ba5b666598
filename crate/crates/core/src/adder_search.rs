// SPDX-License-Identifier: Apache-2.0

//! Monte-Carlo tree search over prefix-tree edits.
//!
//! Each iteration selects down the tree by [`node_score`], expands one
//! random untried action, evaluates the new state and the end of a random
//! rollout from it, and adds both scores to every ancestor. A node's value
//! blends the mean and the best score seen below it ([`action_value`]).

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost_eval::{pareto_front, theoretical_eval, AdderEvaluator, EvalError, EvalResult};
use crate::prefix_tree::{min_level, ActionMode, PrefixError, PrefixTree, SeedFamily, TreeAction};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Prefix(#[from] PrefixError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("node has no evaluations")]
    NoEvaluations,
    #[error("node has never been visited")]
    UnvisitedNode,
    #[error("invalid search config: {0}")]
    InvalidConfig(String),
    #[error("seed level {level} exceeds the bound {bound}")]
    SeedAboveBound { level: usize, bound: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchMode {
    /// Minimize size under a level bound, delete-only moves.
    Theoretical,
    /// Maximize `-delay - alpha * area` from an evaluator, add and delete moves.
    Practical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub beta: f64,
    pub c: f64,
    pub alpha: f64,
    /// Required level bound in theoretical mode (defaults to the seed's
    /// level); optional pruning bound in practical mode.
    pub level_bound: Option<usize>,
    pub mode: SearchMode,
    pub max_sim_steps: usize,
    pub step_budget: usize,
    pub rng_seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            beta: 0.01,
            c: 10.0 * std::f64::consts::SQRT_2,
            alpha: 0.001,
            level_bound: None,
            mode: SearchMode::Theoretical,
            max_sim_steps: 10,
            step_budget: 1000,
            rng_seed: 0,
        }
    }
}

impl SearchConfig {
    fn validate(&self) -> Result<(), SearchError> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(SearchError::InvalidConfig(format!(
                "beta {} outside [0, 1]",
                self.beta
            )));
        }
        if self.c.is_nan() || self.c <= 0.0 {
            return Err(SearchError::InvalidConfig(format!(
                "c must be positive, got {}",
                self.c
            )));
        }
        if self.mode == SearchMode::Practical && self.max_sim_steps == 0 {
            return Err(SearchError::InvalidConfig(
                "max_sim_steps must be positive".into(),
            ));
        }
        Ok(())
    }

    fn action_mode(&self) -> ActionMode {
        match self.mode {
            SearchMode::Theoretical => ActionMode::DeleteOnly,
            SearchMode::Practical => ActionMode::Full,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchNode {
    pub state: PrefixTree,
    pub parent: Option<usize>,
    pub action: Option<TreeAction>,
    pub visit_count: u64,
    pub score_sum: f64,
    pub score_max: f64,
    pub descendant_evals: u64,
    pub untried: Vec<TreeAction>,
    pub children: Vec<(TreeAction, usize)>,
    /// Scores recorded at this node itself, as opposed to below it.
    own_evals: u64,
    own_sum: f64,
    /// Nothing left to expand anywhere below.
    exhausted: bool,
}

/// `(1 - beta) * mean + beta * max` over the scores recorded below the node.
pub fn action_value(node: &SearchNode, beta: f64) -> Result<f64, SearchError> {
    if node.descendant_evals == 0 {
        return Err(SearchError::NoEvaluations);
    }
    let avg = node.score_sum / node.descendant_evals as f64;
    Ok((1.0 - beta) * avg + beta * node.score_max)
}

/// `sqrt(ln(parent_visits) / visits) + c * value`.
pub fn node_score(
    node: &SearchNode,
    parent_visits: u64,
    beta: f64,
    c: f64,
) -> Result<f64, SearchError> {
    if node.visit_count == 0 || parent_visits == 0 {
        return Err(SearchError::UnvisitedNode);
    }
    let explore = ((parent_visits as f64).ln() / node.visit_count as f64).sqrt();
    Ok(explore + c * action_value(node, beta)?)
}

/// `-size` in theoretical mode, `-delay - alpha * area` otherwise.
pub fn performance_score(eval: &EvalResult, config: &SearchConfig) -> f64 {
    match config.mode {
        SearchMode::Theoretical => -eval.area,
        SearchMode::Practical => eval.weighted_score(config.alpha),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedDesign {
    pub tree: PrefixTree,
    pub level: usize,
    pub size: usize,
    pub eval: EvalResult,
    /// Iteration that first produced the design; 0 is the seed.
    pub step: usize,
}

/// One line of the run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLogRecord {
    pub step: usize,
    pub tree: String,
    pub level: usize,
    pub size: usize,
    pub delay: f64,
    pub area: f64,
}

impl From<&EvaluatedDesign> for RunLogRecord {
    fn from(d: &EvaluatedDesign) -> Self {
        RunLogRecord {
            step: d.step,
            tree: d.tree.serialize(),
            level: d.level,
            size: d.size,
            delay: d.eval.delay,
            area: d.eval.area,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best: PrefixTree,
    pub best_eval: EvalResult,
    pub best_score: f64,
    /// Every distinct design evaluated, in evaluation order.
    pub designs: Vec<EvaluatedDesign>,
    /// Indices into `designs` of the (area, delay) Pareto front.
    pub pareto: Vec<usize>,
    /// Best score after each step of the budget.
    pub trace: Vec<f64>,
    /// Iterations actually run; smaller than the budget once the whole
    /// reachable space has been expanded.
    pub iterations: usize,
    pub exhausted: bool,
}

impl SearchResult {
    pub fn log_records(&self) -> impl Iterator<Item = RunLogRecord> + '_ {
        self.designs.iter().map(RunLogRecord::from)
    }

    pub fn pareto_designs(&self) -> impl Iterator<Item = &EvaluatedDesign> + '_ {
        self.pareto.iter().map(|&k| &self.designs[k])
    }
}

/// Search state; [`run_search`] drives it for a whole budget.
pub struct Mcts<'e> {
    config: SearchConfig,
    level_bound: Option<usize>,
    rng: ChaCha8Rng,
    nodes: Vec<SearchNode>,
    designs: Vec<EvaluatedDesign>,
    seen: HashMap<PrefixTree, usize>,
    best: usize,
    best_score: f64,
    iterations: usize,
    evaluator: &'e mut dyn AdderEvaluator,
}

impl<'e> Mcts<'e> {
    pub fn new(
        seed: &PrefixTree,
        config: SearchConfig,
        evaluator: &'e mut dyn AdderEvaluator,
    ) -> Result<Self, SearchError> {
        config.validate()?;
        let m = seed.metrics()?;
        let level_bound = match config.mode {
            SearchMode::Theoretical => Some(config.level_bound.unwrap_or(m.level)),
            SearchMode::Practical => config.level_bound,
        };
        if let Some(bound) = level_bound {
            if m.level > bound {
                return Err(SearchError::SeedAboveBound {
                    level: m.level,
                    bound,
                });
            }
        }
        let mut mcts = Mcts {
            config,
            level_bound,
            rng: ChaCha8Rng::seed_from_u64(config.rng_seed),
            nodes: Vec::new(),
            designs: Vec::new(),
            seen: HashMap::new(),
            best: 0,
            best_score: f64::NEG_INFINITY,
            iterations: 0,
            evaluator,
        };
        let score = mcts.evaluate(seed)?;
        let untried = seed.legal_actions(config.action_mode());
        mcts.nodes.push(SearchNode {
            state: seed.clone(),
            parent: None,
            action: None,
            visit_count: 1,
            score_sum: score,
            score_max: score,
            descendant_evals: 1,
            exhausted: untried.is_empty(),
            untried,
            children: Vec::new(),
            own_evals: 1,
            own_sum: score,
        });
        Ok(mcts)
    }

    pub fn nodes(&self) -> &[SearchNode] {
        &self.nodes
    }

    pub fn is_exhausted(&self) -> bool {
        self.nodes[0].exhausted
    }

    pub fn best_score(&self) -> f64 {
        self.best_score
    }

    fn admissible(&self, tree: &PrefixTree) -> bool {
        match self.level_bound {
            Some(bound) => tree.metrics_unchecked().level <= bound,
            None => true,
        }
    }

    /// Score of a design, evaluating it on first sight only.
    fn evaluate(&mut self, tree: &PrefixTree) -> Result<f64, SearchError> {
        let k = match self.seen.get(tree) {
            Some(&k) => k,
            None => {
                let eval = match self.config.mode {
                    SearchMode::Theoretical => theoretical_eval(tree)?,
                    SearchMode::Practical => self.evaluator.evaluate(tree)?,
                };
                let m = tree.metrics_unchecked();
                self.designs.push(EvaluatedDesign {
                    tree: tree.clone(),
                    level: m.level,
                    size: m.size,
                    eval,
                    step: self.iterations,
                });
                let k = self.designs.len() - 1;
                self.seen.insert(tree.clone(), k);
                let score = performance_score(&eval, &self.config);
                if score > self.best_score {
                    self.best_score = score;
                    self.best = k;
                }
                k
            }
        };
        Ok(performance_score(&self.designs[k].eval, &self.config))
    }

    /// Child maximizing [`node_score`] among those with work left; ties go
    /// to the lowest action.
    fn select_child(&self, id: usize) -> Option<usize> {
        let node = &self.nodes[id];
        let mut best: Option<(f64, TreeAction, usize)> = None;
        for &(action, child) in &node.children {
            let ch = &self.nodes[child];
            if ch.exhausted {
                continue;
            }
            let s = node_score(ch, node.visit_count, self.config.beta, self.config.c)
                .expect("children are visited");
            let better = match best {
                None => true,
                Some((bs, ba, _)) => s > bs || (s == bs && action < ba),
            };
            if better {
                best = Some((s, action, child));
            }
        }
        best.map(|(_, _, c)| c)
    }

    fn mark_exhausted(&mut self, mut id: usize) {
        loop {
            let node = &self.nodes[id];
            if !node.untried.is_empty()
                || node.children.iter().any(|&(_, c)| !self.nodes[c].exhausted)
            {
                return;
            }
            self.nodes[id].exhausted = true;
            match self.nodes[id].parent {
                Some(p) => id = p,
                None => return,
            }
        }
    }

    /// Random improving deletes (theoretical) or a bounded random walk
    /// (practical). Returns the final state.
    fn simulate(&mut self, start: &PrefixTree) -> Result<PrefixTree, SearchError> {
        let mut cur = start.clone();
        match self.config.mode {
            SearchMode::Theoretical => {
                // first success in a random order is uniform over successes
                'outer: loop {
                    let size = cur.size();
                    let mut actions = cur.legal_actions(ActionMode::DeleteOnly);
                    actions.shuffle(&mut self.rng);
                    for a in actions {
                        let next = cur.apply_action(a)?;
                        if next.size() < size && self.admissible(&next) {
                            cur = next;
                            continue 'outer;
                        }
                    }
                    break;
                }
            }
            SearchMode::Practical => {
                'steps: for _ in 0..self.config.max_sim_steps {
                    let mut actions = cur.legal_actions(ActionMode::Full);
                    actions.shuffle(&mut self.rng);
                    for a in actions {
                        let next = cur.apply_action(a)?;
                        if self.admissible(&next) {
                            cur = next;
                            continue 'steps;
                        }
                    }
                    break;
                }
            }
        }
        Ok(cur)
    }

    /// One selection/expansion/simulation/backpropagation round. Returns
    /// `false` without doing anything once the tree is exhausted.
    pub fn iterate(&mut self) -> Result<bool, SearchError> {
        if self.nodes[0].exhausted {
            return Ok(false);
        }
        self.iterations += 1;
        let (leaf, scores) = loop {
            if self.nodes[0].exhausted {
                return Ok(false);
            }
            let mut cur = 0;
            while self.nodes[cur].untried.is_empty() {
                match self.select_child(cur) {
                    Some(c) => cur = c,
                    None => break,
                }
            }
            let mut child_state = None;
            while !self.nodes[cur].untried.is_empty() {
                let k = self.rng.gen_range(0..self.nodes[cur].untried.len());
                let action = self.nodes[cur].untried.swap_remove(k);
                let next = self.nodes[cur].state.apply_action(action)?;
                if self.admissible(&next) {
                    child_state = Some((action, next));
                    break;
                }
            }
            let Some((action, state)) = child_state else {
                self.mark_exhausted(cur);
                continue;
            };

            let mut scores = vec![self.evaluate(&state)?];
            let end = self.simulate(&state)?;
            if end != state {
                scores.push(self.evaluate(&end)?);
            }
            let untried = state.legal_actions(self.config.action_mode());
            let id = self.nodes.len();
            let own_sum = scores.iter().sum();
            self.nodes.push(SearchNode {
                state,
                parent: Some(cur),
                action: Some(action),
                visit_count: 0,
                score_sum: 0.0,
                score_max: f64::NEG_INFINITY,
                descendant_evals: 0,
                exhausted: false,
                untried,
                children: Vec::new(),
                own_evals: scores.len() as u64,
                own_sum,
            });
            self.nodes[cur].children.push((action, id));
            break (id, scores);
        };

        let mut at = Some(leaf);
        while let Some(id) = at {
            let node = &mut self.nodes[id];
            node.visit_count += 1;
            for &s in &scores {
                node.score_sum += s;
                node.score_max = node.score_max.max(s);
                node.descendant_evals += 1;
            }
            at = node.parent;
        }
        self.mark_exhausted(leaf);
        Ok(true)
    }

    /// Consistency of the visit and score aggregates over the whole tree.
    pub fn audit(&self) -> Result<(), String> {
        for (id, node) in self.nodes.iter().enumerate() {
            let child_visits: u64 = node
                .children
                .iter()
                .map(|&(_, c)| self.nodes[c].visit_count)
                .sum();
            if node.visit_count != 1 + child_visits {
                return Err(format!(
                    "node {id}: visits {} != 1 + {child_visits}",
                    node.visit_count
                ));
            }
            let child_evals: u64 = node
                .children
                .iter()
                .map(|&(_, c)| self.nodes[c].descendant_evals)
                .sum();
            if node.descendant_evals != node.own_evals + child_evals {
                return Err(format!("node {id}: evaluation count mismatch"));
            }
            let child_sum: f64 = node
                .children
                .iter()
                .map(|&(_, c)| self.nodes[c].score_sum)
                .sum();
            let expect = node.own_sum + child_sum;
            if (node.score_sum - expect).abs() > 1e-6 * expect.abs().max(1.0) {
                return Err(format!(
                    "node {id}: score sum {} != {expect}",
                    node.score_sum
                ));
            }
            if node.score_max < node.score_sum / node.descendant_evals as f64 - 1e-9 {
                return Err(format!("node {id}: max below mean"));
            }
            if let Err(e) = node.state.check_legal() {
                return Err(format!("node {id}: {e}"));
            }
            if let Some(bound) = self.level_bound {
                let level = node.state.metrics_unchecked().level;
                if level > bound {
                    return Err(format!("node {id}: level {level} above bound {bound}"));
                }
            }
        }
        for d in &self.designs {
            if let Some(bound) = self.level_bound {
                if d.level > bound {
                    return Err(format!(
                        "evaluated design with level {} above bound {bound}",
                        d.level
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn into_result(self, trace: Vec<f64>) -> SearchResult {
        let points: Vec<(f64, f64)> = self
            .designs
            .iter()
            .map(|d| (d.eval.area, d.eval.delay))
            .collect();
        let best = &self.designs[self.best];
        SearchResult {
            best: best.tree.clone(),
            best_eval: best.eval,
            best_score: self.best_score,
            pareto: pareto_front(&points),
            trace,
            iterations: self.iterations,
            exhausted: self.nodes[0].exhausted,
            designs: self.designs,
        }
    }
}

/// Runs `config.step_budget` iterations from `seed`.
///
/// `evaluator` is used in practical mode only; theoretical mode scores the
/// tree's own level and size.
pub fn run_search(
    seed: &PrefixTree,
    config: &SearchConfig,
    evaluator: &mut dyn AdderEvaluator,
) -> Result<SearchResult, SearchError> {
    let mut mcts = Mcts::new(seed, *config, evaluator)?;
    let mut trace = Vec::with_capacity(config.step_budget);
    for _ in 0..config.step_budget {
        if !mcts.is_exhausted() {
            mcts.iterate()?;
        }
        trace.push(mcts.best_score());
    }
    Ok(mcts.into_result(trace))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelResult {
    pub level: usize,
    pub best_size: usize,
    pub tree: String,
    pub iterations: usize,
}

/// Theoretical search with the level bound raised one step at a time,
/// starting from Sklansky at the minimum level. Each stage is seeded with
/// the previous stage's smallest tree.
pub fn optimize_levels(
    width: usize,
    per_level_budget: usize,
    max_extra_levels: usize,
    rng_seed: u64,
) -> Result<Vec<LevelResult>, SearchError> {
    optimize_levels_observed(
        width,
        per_level_budget,
        max_extra_levels,
        rng_seed,
        |_, _| {},
    )
}

/// [`optimize_levels`], handing each stage's full result to `observe`.
pub fn optimize_levels_observed(
    width: usize,
    per_level_budget: usize,
    max_extra_levels: usize,
    rng_seed: u64,
    mut observe: impl FnMut(usize, &SearchResult),
) -> Result<Vec<LevelResult>, SearchError> {
    let mut seed = PrefixTree::seed(SeedFamily::Sklansky, width)?;
    let base = min_level(width);
    let mut table = Vec::new();
    let mut unused = crate::cost_eval::TheoreticalEvaluator;
    for level in base..=base + max_extra_levels {
        let config = SearchConfig {
            mode: SearchMode::Theoretical,
            level_bound: Some(level),
            step_budget: per_level_budget,
            rng_seed: rng_seed.wrapping_add(level as u64),
            ..SearchConfig::default()
        };
        let result = run_search(&seed, &config, &mut unused)?;
        observe(level, &result);
        table.push(LevelResult {
            level,
            best_size: result.best.size(),
            tree: result.best.serialize(),
            iterations: result.iterations,
        });
        seed = result.best;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost_eval::{EvalSource, ProxyAdderEvaluator, TheoreticalEvaluator};

    fn node_with(scores: &[f64]) -> SearchNode {
        let t = PrefixTree::seed(SeedFamily::Ripple, 2).unwrap();
        SearchNode {
            state: t,
            parent: None,
            action: None,
            visit_count: 1,
            score_sum: scores.iter().sum(),
            score_max: scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            descendant_evals: scores.len() as u64,
            untried: Vec::new(),
            children: Vec::new(),
            own_evals: scores.len() as u64,
            own_sum: scores.iter().sum(),
            exhausted: false,
        }
    }

    #[test]
    fn action_value_examples() {
        let v = action_value(&node_with(&[-10.0, -8.0]), 0.01).unwrap();
        assert!((v - -8.99).abs() < 1e-12);
        assert_eq!(action_value(&node_with(&[-5.0]), 0.3).unwrap(), -5.0);
        assert_eq!(action_value(&node_with(&[-10.0, -8.0]), 0.0).unwrap(), -9.0);
        assert!(matches!(
            action_value(&node_with(&[]), 0.01),
            Err(SearchError::NoEvaluations)
        ));
    }

    #[test]
    fn node_score_examples() {
        let c = 10.0 * std::f64::consts::SQRT_2;
        assert_eq!(node_score(&node_with(&[0.0]), 1, 0.01, c).unwrap(), 0.0);
        let n = node_with(&[0.0]);
        assert!((node_score(&n, 3, 0.01, 2.0).unwrap() - 3f64.ln().sqrt()).abs() < 1e-12);
        let v = node_score(&node_with(&[-2.0]), 1, 0.01, c).unwrap();
        assert!((v - -20.0 * std::f64::consts::SQRT_2).abs() < 1e-9);
        let mut unvisited = node_with(&[-1.0]);
        unvisited.visit_count = 0;
        assert!(matches!(
            node_score(&unvisited, 1, 0.01, c),
            Err(SearchError::UnvisitedNode)
        ));
    }

    #[test]
    fn performance_scores() {
        let mut cfg = SearchConfig::default();
        assert_eq!(
            performance_score(&EvalResult::new(6.0, 192.0, EvalSource::Theoretical), &cfg),
            -192.0
        );
        cfg.mode = SearchMode::Practical;
        cfg.alpha = 0.001;
        let s = performance_score(&EvalResult::new(0.7, 500.0, EvalSource::External), &cfg);
        assert!((s - -1.2).abs() < 1e-12);
        cfg.alpha = 0.0;
        assert_eq!(
            performance_score(&EvalResult::new(0.7, 500.0, EvalSource::External), &cfg),
            -0.7
        );
    }

    #[test]
    fn ripple_has_nothing_to_delete() {
        let seed = PrefixTree::seed(SeedFamily::Ripple, 8).unwrap();
        let cfg = SearchConfig {
            level_bound: Some(7),
            step_budget: 50,
            ..SearchConfig::default()
        };
        let r = run_search(&seed, &cfg, &mut TheoreticalEvaluator).unwrap();
        assert_eq!(r.best.size(), 7);
        assert!(r.exhausted);
        assert_eq!(r.iterations, 0);
        assert_eq!(r.trace.len(), 50);
    }

    #[test]
    fn invalid_configs() {
        let seed = PrefixTree::seed(SeedFamily::Sklansky, 8).unwrap();
        let bad_beta = SearchConfig {
            beta: 1.5,
            ..SearchConfig::default()
        };
        assert!(matches!(
            run_search(&seed, &bad_beta, &mut TheoreticalEvaluator),
            Err(SearchError::InvalidConfig(_))
        ));
        let bad_c = SearchConfig {
            c: 0.0,
            ..SearchConfig::default()
        };
        assert!(run_search(&seed, &bad_c, &mut TheoreticalEvaluator).is_err());
        let low = SearchConfig {
            level_bound: Some(2),
            ..SearchConfig::default()
        };
        assert!(matches!(
            run_search(&seed, &low, &mut TheoreticalEvaluator),
            Err(SearchError::SeedAboveBound { level: 3, bound: 2 })
        ));
    }

    #[test]
    fn audit_holds_during_search() {
        let seed = PrefixTree::seed(SeedFamily::Sklansky, 16).unwrap();
        let cfg = SearchConfig {
            level_bound: Some(5),
            ..SearchConfig::default()
        };
        let mut ev = TheoreticalEvaluator;
        let mut m = Mcts::new(&seed, cfg, &mut ev).unwrap();
        for k in 0..300 {
            m.iterate().unwrap();
            if k % 50 == 0 {
                m.audit().unwrap();
            }
        }
        m.audit().unwrap();
    }

    #[test]
    fn practical_mode_runs_and_is_monotone() {
        let seed = PrefixTree::seed(SeedFamily::KoggeStone, 16).unwrap();
        let cfg = SearchConfig {
            mode: SearchMode::Practical,
            alpha: 0.01,
            step_budget: 200,
            rng_seed: 3,
            ..SearchConfig::default()
        };
        let r = run_search(&seed, &cfg, &mut ProxyAdderEvaluator).unwrap();
        assert!(r.trace.windows(2).all(|w| w[0] <= w[1]));
        assert!(r.best_score >= -proxy_score(&seed, 0.01));
        assert!(!r.pareto.is_empty());
        let again = run_search(&seed, &cfg, &mut ProxyAdderEvaluator).unwrap();
        assert_eq!(again.best.serialize(), r.best.serialize());
    }

    fn proxy_score(t: &PrefixTree, alpha: f64) -> f64 {
        let e = crate::cost_eval::proxy_eval_adder(t).unwrap();
        e.delay + alpha * e.area
    }
}
