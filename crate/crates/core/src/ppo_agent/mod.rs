// SPDX-License-Identifier: Apache-2.0

//! Proximal policy optimization for compressor-tree construction.
//!
//! Policy network `8 -> 64 -> 16 -> 2` with a softmax head, value network
//! `8 -> 64 -> 8 -> 1`, both with ReLU hidden layers and gradients computed
//! by hand. The advantage is `G_t - V_t` with `V_t` recorded at collection
//! time; the policy ascends the clipped surrogate and the value network
//! descends the smooth-L1 loss.

mod adam;
mod checkpoint;
mod mlp;

use std::collections::VecDeque;

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compressor_tree::{Compressor, CompressorError, CompressorState, FEATURE_LEN};
use crate::cost_eval::{EvalError, EvalResult};

pub use adam::Adam;
pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use mlp::{Dense, ForwardCache, Mlp};

pub const POLICY_SIZES: [usize; 4] = [FEATURE_LEN, 64, 16, 2];
pub const VALUE_SIZES: [usize; 4] = [FEATURE_LEN, 64, 8, 1];

#[derive(Debug, Error)]
pub enum PpoError {
    #[error("non-finite network input")]
    NonFiniteInput,
    #[error("non-finite gradient; update discarded")]
    NonFiniteGradient,
    #[error("episode aborted: {0}")]
    EpisodeAborted(#[source] EvalError),
    #[error(transparent)]
    Compressor(#[from] CompressorError),
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PpoConfig {
    pub gamma: f64,
    pub clip_epsilon: f64,
    /// Subtracted from the reward following each half-adder action.
    pub ha_penalty: f64,
    pub batch_size: usize,
    /// Replay capacity is `buffer_factor * N²` samples.
    pub buffer_factor: usize,
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for PpoConfig {
    fn default() -> Self {
        PpoConfig {
            gamma: 0.8,
            clip_epsilon: 0.2,
            ha_penalty: 0.1,
            batch_size: 64,
            buffer_factor: 6,
            learning_rate: 1e-3,
            epochs: 4,
        }
    }
}

impl PpoConfig {
    pub fn buffer_capacity(&self, width: usize) -> usize {
        self.buffer_factor * width * width
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentParams {
    pub policy: Mlp,
    pub value: Mlp,
    /// Bumped by every successful update.
    pub version: u64,
}

impl AgentParams {
    pub fn new<R: Rng + ?Sized>(rng: &mut R) -> Self {
        AgentParams {
            policy: Mlp::new(&POLICY_SIZES, rng),
            value: Mlp::new(&VALUE_SIZES, rng),
            version: 0,
        }
    }

    pub fn zeros() -> Self {
        AgentParams {
            policy: Mlp::zeros(&POLICY_SIZES),
            value: Mlp::zeros(&VALUE_SIZES),
            version: 0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.policy
            .params()
            .iter()
            .chain(self.value.params().iter())
            .all(|v| v.is_finite())
    }
}

fn check_input(features: &[f64]) -> Result<(), PpoError> {
    if features.len() != FEATURE_LEN || features.iter().any(|v| !v.is_finite()) {
        return Err(PpoError::NonFiniteInput);
    }
    Ok(())
}

/// Numerically stable two-way softmax.
pub fn softmax2(logits: &[f64]) -> [f64; 2] {
    let m = logits[0].max(logits[1]);
    let e0 = (logits[0] - m).exp();
    let e1 = (logits[1] - m).exp();
    let s = e0 + e1;
    [e0 / s, e1 / s]
}

fn log_softmax2(logits: &[f64], action: usize) -> f64 {
    let m = logits[0].max(logits[1]);
    let lse = m + ((logits[0] - m).exp() + (logits[1] - m).exp()).ln();
    logits[action] - lse
}

/// Action probabilities `(full adder, half adder)`.
pub fn policy_forward(params: &AgentParams, features: &[f64]) -> Result<[f64; 2], PpoError> {
    check_input(features)?;
    Ok(softmax2(&params.policy.forward(features)))
}

pub fn value_forward(params: &AgentParams, features: &[f64]) -> Result<f64, PpoError> {
    check_input(features)?;
    Ok(params.value.forward(features)[0])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub features: [f64; FEATURE_LEN],
    pub action: Compressor,
    pub log_prob: f64,
    /// Penalty part of the reward that follows this action.
    pub reward: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub records: Vec<StepRecord>,
    /// `-delay` of the finished design, received after the last action.
    pub terminal_reward: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Reward received after each action, terminal reward folded into the last.
    pub fn rewards(&self) -> Vec<f64> {
        let mut r: Vec<f64> = self.records.iter().map(|s| s.reward).collect();
        if let Some(last) = r.last_mut() {
            *last += self.terminal_reward;
        }
        r
    }

    /// Undiscounted episode return.
    pub fn total_reward(&self) -> f64 {
        self.rewards().iter().sum()
    }

    pub fn returns(&self, gamma: f64) -> Vec<f64> {
        compute_returns(&self.rewards(), gamma)
    }
}

/// `G_t = r_{t+1} + gamma * G_{t+1}`, the last entry equal to the final reward.
pub fn compute_returns(rewards: &[f64], gamma: f64) -> Vec<f64> {
    let mut out = vec![0.0; rewards.len()];
    let mut acc = 0.0;
    for t in (0..rewards.len()).rev() {
        acc = rewards[t] + gamma * acc;
        out[t] = acc;
    }
    out
}

#[derive(Debug, Clone)]
pub struct Episode {
    pub trajectory: Trajectory,
    pub final_state: CompressorState,
    pub eval: EvalResult,
}

/// Plays one episode with actions sampled from the policy. Returns `None`
/// if `step_limit` runs out before the state becomes terminal; the number
/// of steps played is reported either way.
fn play_episode<R, E>(
    width: usize,
    params: &AgentParams,
    config: &PpoConfig,
    rng: &mut R,
    evaluator: &mut E,
    step_limit: usize,
) -> Result<(Option<Episode>, usize), PpoError>
where
    R: Rng + ?Sized,
    E: FnMut(&CompressorState) -> Result<EvalResult, EvalError>,
{
    let mut state = CompressorState::new(width)?;
    let mut records = Vec::new();
    while !state.is_terminal() {
        if records.len() == step_limit {
            return Ok((None, records.len()));
        }
        let features = state.features()?;
        let logits = params.policy.forward(&features);
        let probs = softmax2(&logits);
        let u: f64 = rng.gen();
        let action = if u < probs[0] { 0 } else { 1 };
        let kind = Compressor::from_index(action);
        let value = params.value.forward(&features)[0];
        state.step(kind)?;
        records.push(StepRecord {
            features,
            action: kind,
            log_prob: log_softmax2(&logits, action),
            reward: if kind == Compressor::Half {
                -config.ha_penalty
            } else {
                0.0
            },
            value,
        });
    }
    let eval = evaluator(&state).map_err(PpoError::EpisodeAborted)?;
    let steps = records.len();
    Ok((
        Some(Episode {
            trajectory: Trajectory {
                records,
                terminal_reward: -eval.delay,
            },
            final_state: state,
            eval,
        }),
        steps,
    ))
}

/// Plays one full episode.
pub fn collect_episode<R, E>(
    width: usize,
    params: &AgentParams,
    config: &PpoConfig,
    rng: &mut R,
    mut evaluator: E,
) -> Result<Episode, PpoError>
where
    R: Rng + ?Sized,
    E: FnMut(&CompressorState) -> Result<EvalResult, EvalError>,
{
    let (episode, _) = play_episode(width, params, config, rng, &mut evaluator, usize::MAX)?;
    Ok(episode.expect("unbounded episode always finishes"))
}

/// One training sample for the update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub features: [f64; FEATURE_LEN],
    pub action: usize,
    pub old_log_prob: f64,
    pub ret: f64,
    pub value: f64,
}

impl Sample {
    pub fn advantage(&self) -> f64 {
        self.ret - self.value
    }
}

pub fn samples_from(traj: &Trajectory, gamma: f64) -> Vec<Sample> {
    traj.records
        .iter()
        .zip(traj.returns(gamma))
        .map(|(r, ret)| Sample {
            features: r.features,
            action: r.action.index(),
            old_log_prob: r.log_prob,
            ret,
            value: r.value,
        })
        .collect()
}

/// `min(r * A, clip(r, 1 - eps, 1 + eps) * A)`.
pub fn clipped_surrogate(ratio: f64, advantage: f64, eps: f64) -> f64 {
    (ratio * advantage).min(ratio.clamp(1.0 - eps, 1.0 + eps) * advantage)
}

/// Huber loss with unit threshold.
pub fn smooth_l1(diff: f64) -> f64 {
    if diff.abs() < 1.0 {
        0.5 * diff * diff
    } else {
        diff.abs() - 0.5
    }
}

/// Negated mean clipped surrogate and its gradient w.r.t. policy params.
pub fn policy_loss_grad(policy: &Mlp, batch: &[Sample], eps: f64) -> (f64, Vec<f64>) {
    let mut grad = vec![0.0; policy.param_count()];
    let mut loss = 0.0;
    let scale = 1.0 / batch.len() as f64;
    for s in batch {
        let cache = policy.forward_cached(&s.features);
        let logits = cache.output();
        let logp = log_softmax2(logits, s.action);
        let ratio = (logp - s.old_log_prob).exp();
        let adv = s.advantage();
        let unclipped = ratio * adv;
        let clipped = ratio.clamp(1.0 - eps, 1.0 + eps) * adv;
        loss -= scale * unclipped.min(clipped);
        // only the unclipped branch depends on the parameters
        if unclipped <= clipped {
            let probs = softmax2(logits);
            let coef = -scale * adv * ratio;
            let d_logits: Vec<f64> = (0..2)
                .map(|k| coef * ((k == s.action) as u8 as f64 - probs[k]))
                .collect();
            policy.backward(&cache, &d_logits, &mut grad);
        }
    }
    (loss, grad)
}

pub fn policy_loss(policy: &Mlp, batch: &[Sample], eps: f64) -> f64 {
    let scale = 1.0 / batch.len() as f64;
    batch
        .iter()
        .map(|s| {
            let logp = log_softmax2(&policy.forward(&s.features), s.action);
            -scale * clipped_surrogate((logp - s.old_log_prob).exp(), s.advantage(), eps)
        })
        .sum()
}

/// Mean smooth-L1 between the value estimate and the return, with gradient.
pub fn value_loss_grad(value: &Mlp, batch: &[Sample]) -> (f64, Vec<f64>) {
    let mut grad = vec![0.0; value.param_count()];
    let mut loss = 0.0;
    let scale = 1.0 / batch.len() as f64;
    for s in batch {
        let cache = value.forward_cached(&s.features);
        let diff = cache.output()[0] - s.ret;
        loss += scale * smooth_l1(diff);
        value.backward(&cache, &[scale * diff.clamp(-1.0, 1.0)], &mut grad);
    }
    (loss, grad)
}

pub fn value_loss(value: &Mlp, batch: &[Sample]) -> f64 {
    let scale = 1.0 / batch.len() as f64;
    batch
        .iter()
        .map(|s| scale * smooth_l1(value.forward(&s.features)[0] - s.ret))
        .sum()
}

/// Parameters plus optimizer state.
#[derive(Debug, Clone)]
pub struct PpoLearner {
    pub params: AgentParams,
    pub policy_opt: Adam,
    pub value_opt: Adam,
}

impl PpoLearner {
    pub fn new(params: AgentParams, config: &PpoConfig) -> Self {
        let policy_opt = Adam::new(params.policy.param_count(), config.learning_rate);
        let value_opt = Adam::new(params.value.param_count(), config.learning_rate);
        PpoLearner {
            params,
            policy_opt,
            value_opt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateStats {
    pub policy_loss: f64,
    pub value_loss: f64,
}

/// Runs `config.epochs` full-batch optimizer steps on both networks. On a
/// non-finite gradient the learner is restored to its state before the call.
pub fn ppo_update(
    learner: &mut PpoLearner,
    batch: &[Sample],
    config: &PpoConfig,
) -> Result<UpdateStats, PpoError> {
    if batch.is_empty() {
        return Ok(UpdateStats {
            policy_loss: 0.0,
            value_loss: 0.0,
        });
    }
    let snapshot = learner.clone();
    let mut stats = UpdateStats {
        policy_loss: 0.0,
        value_loss: 0.0,
    };
    for _ in 0..config.epochs {
        let (pl, pg) = policy_loss_grad(&learner.params.policy, batch, config.clip_epsilon);
        let (vl, vg) = value_loss_grad(&learner.params.value, batch);
        if pg.iter().chain(vg.iter()).any(|g| !g.is_finite()) {
            *learner = snapshot;
            return Err(PpoError::NonFiniteGradient);
        }
        let mut p = learner.params.policy.params();
        learner.policy_opt.step(&mut p, &pg);
        learner.params.policy.set_params(&p);
        let mut v = learner.params.value.params();
        learner.value_opt.step(&mut v, &vg);
        learner.params.value.set_params(&v);
        stats = UpdateStats {
            policy_loss: pl,
            value_loss: vl,
        };
    }
    if !learner.params.is_finite() {
        *learner = snapshot;
        return Err(PpoError::NonFiniteGradient);
    }
    learner.params.version += 1;
    Ok(stats)
}

/// Bounded FIFO of samples; the oldest are evicted first.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    items: VecDeque<Sample>,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        ReplayBuffer {
            capacity,
            items: VecDeque::with_capacity(capacity),
        }
    }

    pub fn push(&mut self, s: Sample) {
        if self.capacity == 0 {
            return;
        }
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(s);
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn iter(&self) -> impl Iterator<Item = &Sample> {
        self.items.iter()
    }

    /// Up to `size` distinct samples chosen uniformly.
    pub fn sample<R: Rng + ?Sized>(&self, size: usize, rng: &mut R) -> Vec<Sample> {
        let take = size.min(self.items.len());
        let mut idx = sample_indices(rng, self.items.len(), take).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|k| self.items[k]).collect()
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Lowest-delay design seen (ties: smaller area, then first found).
    pub best: Option<(CompressorState, EvalResult)>,
    /// Undiscounted return of every completed episode, in order.
    pub episode_returns: Vec<f64>,
    /// Environment steps played, partial final episode included.
    pub steps: usize,
    pub updates: usize,
}

/// Trains for exactly `steps` environment steps. A final episode cut short
/// by the budget is dropped.
pub fn train<R, E>(
    width: usize,
    steps: usize,
    config: &PpoConfig,
    learner: &mut PpoLearner,
    mut evaluator: E,
    rng: &mut R,
) -> Result<TrainOutcome, PpoError>
where
    R: Rng + ?Sized,
    E: FnMut(&CompressorState) -> Result<EvalResult, EvalError>,
{
    let mut buffer = ReplayBuffer::new(config.buffer_capacity(width));
    let mut outcome = TrainOutcome {
        best: None,
        episode_returns: Vec::new(),
        steps: 0,
        updates: 0,
    };
    while outcome.steps < steps {
        let (episode, played) = play_episode(
            width,
            &learner.params,
            config,
            rng,
            &mut evaluator,
            steps - outcome.steps,
        )?;
        outcome.steps += played;
        let Some(ep) = episode else { break };
        outcome.episode_returns.push(ep.trajectory.total_reward());
        let better = match &outcome.best {
            None => true,
            Some((_, b)) => (ep.eval.delay, ep.eval.area) < (b.delay, b.area),
        };
        if better {
            outcome.best = Some((ep.final_state.clone(), ep.eval));
        }
        for s in samples_from(&ep.trajectory, config.gamma) {
            buffer.push(s);
        }
        let batch = buffer.sample(config.batch_size, rng);
        match ppo_update(learner, &batch, config) {
            Ok(_) => outcome.updates += 1,
            Err(PpoError::NonFiniteGradient) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(outcome)
}
