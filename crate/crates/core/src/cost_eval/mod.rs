// SPDX-License-Identifier: Apache-2.0

//! Design scoring.
//!
//! Three evaluation routes share one result type:
//! theoretical metrics (level as delay, size as area), a unit-gate proxy
//! that counts the gates the netlist builder instantiates, and an external
//! command that receives emitted Verilog and prints `delay=<f> area=<f>`.

mod cache;
mod external;
mod pareto;
mod retrieval;

use std::fmt;
use std::hash::Hasher;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compressor_tree::{CompressorError, CompressorState};
use crate::hdl_netlist::NetlistError;
use crate::prefix_tree::{PrefixError, PrefixTree};

pub use cache::{CacheRecord, CacheStats, CacheStore};
pub use external::{
    external_eval, parse_eval_line, ExternalAdderEvaluator, ExternalMultiplierEvaluator,
};
pub use pareto::{distances_to_front, pareto_front, select_top_fraction};
pub use retrieval::{two_level_retrieval, RetrievalRecord, DEFAULT_TOP_FRACTION};

/// Gate levels per prefix cell (AND then OR on the generate path).
pub const PROXY_CELL_DEPTH: f64 = 2.0;
/// Gates per prefix cell: two ANDs and one OR.
pub const PROXY_CELL_AREA: f64 = 3.0;
pub const PROXY_FA_AREA: f64 = 5.0;
pub const PROXY_HA_AREA: f64 = 2.0;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Prefix(#[from] PrefixError),
    #[error(transparent)]
    Compressor(#[from] CompressorError),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error("dimension mismatch: adder width {adder} but multiplier needs {expected}")]
    DimensionMismatch { adder: usize, expected: usize },
    #[error("evaluator command failed ({status}): {stderr}")]
    CommandFailed { status: String, stderr: String },
    #[error("could not parse evaluator output: {0}")]
    Parse(String),
    #[error("evaluator timed out after {0:?}")]
    Timeout(std::time::Duration),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache key {key:016x} already holds a different result")]
    ConflictingValue { key: u64 },
    #[error("cache key {key:016x} collides between two different designs")]
    KeyCollision { key: u64 },
    #[error("fraction must lie in (0, 1], got {0}")]
    InvalidFraction(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EvalSource {
    Theoretical,
    FastProxy,
    External,
    Cache,
}

impl fmt::Display for EvalSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EvalSource::Theoretical => "theoretical",
            EvalSource::FastProxy => "fast-proxy",
            EvalSource::External => "external",
            EvalSource::Cache => "cache",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub delay: f64,
    pub area: f64,
    pub source: EvalSource,
}

impl EvalResult {
    pub fn new(delay: f64, area: f64, source: EvalSource) -> Self {
        EvalResult {
            delay,
            area,
            source,
        }
    }

    /// Same delay and area, bit for bit, whatever the source.
    pub fn same_metrics(&self, other: &EvalResult) -> bool {
        self.delay.to_bits() == other.delay.to_bits() && self.area.to_bits() == other.area.to_bits()
    }

    pub fn with_source(self, source: EvalSource) -> Self {
        EvalResult { source, ..self }
    }

    /// `-delay - alpha * area`.
    pub fn weighted_score(&self, alpha: f64) -> f64 {
        -self.delay - alpha * self.area
    }
}

/// 64-bit FNV-1a, stable across platforms and releases.
pub fn stable_hash(bytes: &[u8]) -> u64 {
    let mut h = fnv::FnvHasher::default();
    h.write(bytes);
    h.finish()
}

/// Level reported as delay, size as area.
pub fn theoretical_eval(tree: &PrefixTree) -> Result<EvalResult, EvalError> {
    let m = tree.metrics()?;
    Ok(EvalResult::new(
        m.level as f64,
        m.size as f64,
        EvalSource::Theoretical,
    ))
}

/// Unit-gate proxy: one gate level for p/g, two per prefix level, one for
/// the sum XOR; area counts every gate of the lowered netlist.
pub fn proxy_eval_adder(tree: &PrefixTree) -> Result<EvalResult, EvalError> {
    let m = tree.metrics()?;
    let n = tree.width() as f64;
    let delay = 1.0 + PROXY_CELL_DEPTH * m.level as f64 + 1.0;
    let area = 2.0 * n + PROXY_CELL_AREA * m.size as f64 + n;
    Ok(EvalResult::new(delay, area, EvalSource::FastProxy))
}

/// Compressor delay estimate plus the proxy delay of the final adder; area
/// counts partial-product ANDs, adder cells and the final adder.
pub fn proxy_eval_multiplier(
    state: &CompressorState,
    tree: &PrefixTree,
) -> Result<EvalResult, EvalError> {
    let n = state.width();
    if tree.width() != 2 * n {
        return Err(EvalError::DimensionMismatch {
            adder: tree.width(),
            expected: 2 * n,
        });
    }
    let operands = state.finalize_operands()?;
    let adder = proxy_eval_adder(tree)?;
    let delay = operands.max_delay() as f64 + adder.delay;
    let area = PROXY_FA_AREA * state.full_adders() as f64
        + PROXY_HA_AREA * state.half_adders() as f64
        + (n * n) as f64
        + adder.area;
    Ok(EvalResult::new(delay, area, EvalSource::FastProxy))
}

/// Anything that can score a prefix adder.
pub trait AdderEvaluator {
    fn evaluate(&mut self, tree: &PrefixTree) -> Result<EvalResult, EvalError>;
}

/// Anything that can score a multiplier (compressor schedule + final adder).
pub trait MultiplierEvaluator {
    fn evaluate(
        &mut self,
        state: &CompressorState,
        tree: &PrefixTree,
    ) -> Result<EvalResult, EvalError>;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct TheoreticalEvaluator;

impl AdderEvaluator for TheoreticalEvaluator {
    fn evaluate(&mut self, tree: &PrefixTree) -> Result<EvalResult, EvalError> {
        theoretical_eval(tree)
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ProxyAdderEvaluator;

impl AdderEvaluator for ProxyAdderEvaluator {
    fn evaluate(&mut self, tree: &PrefixTree) -> Result<EvalResult, EvalError> {
        proxy_eval_adder(tree)
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ProxyMultiplierEvaluator;

impl MultiplierEvaluator for ProxyMultiplierEvaluator {
    fn evaluate(
        &mut self,
        state: &CompressorState,
        tree: &PrefixTree,
    ) -> Result<EvalResult, EvalError> {
        proxy_eval_multiplier(state, tree)
    }
}

impl<F> AdderEvaluator for F
where
    F: FnMut(&PrefixTree) -> Result<EvalResult, EvalError>,
{
    fn evaluate(&mut self, tree: &PrefixTree) -> Result<EvalResult, EvalError> {
        self(tree)
    }
}

/// Canonical serialization of a multiplier design, used as its cache key.
pub fn multiplier_key_text(state: &CompressorState, tree: &PrefixTree) -> String {
    format!("{}\n{}", state.serialize(), tree.serialize())
}

/// Wraps an evaluator with a shared cache; counts real invocations.
pub struct Cached<'a, E> {
    inner: E,
    cache: &'a CacheStore,
    invocations: u64,
}

impl<'a, E> Cached<'a, E> {
    pub fn new(inner: E, cache: &'a CacheStore) -> Self {
        Cached {
            inner,
            cache,
            invocations: 0,
        }
    }

    /// Number of calls that reached the wrapped evaluator.
    pub fn invocations(&self) -> u64 {
        self.invocations
    }

    pub fn into_inner(self) -> E {
        self.inner
    }

    fn lookup_or(
        &mut self,
        text: String,
        eval: impl FnOnce(&mut E) -> Result<EvalResult, EvalError>,
    ) -> Result<EvalResult, EvalError> {
        let key = stable_hash(text.as_bytes());
        if let Some(hit) = self.cache.get(key, &text)? {
            return Ok(hit.with_source(EvalSource::Cache));
        }
        self.invocations += 1;
        let result = eval(&mut self.inner)?;
        self.cache.put(key, &text, result)?;
        Ok(result)
    }
}

impl<E: AdderEvaluator> AdderEvaluator for Cached<'_, E> {
    fn evaluate(&mut self, tree: &PrefixTree) -> Result<EvalResult, EvalError> {
        self.lookup_or(tree.serialize(), |e| e.evaluate(tree))
    }
}

impl<E: MultiplierEvaluator> MultiplierEvaluator for Cached<'_, E> {
    fn evaluate(
        &mut self,
        state: &CompressorState,
        tree: &PrefixTree,
    ) -> Result<EvalResult, EvalError> {
        self.lookup_or(multiplier_key_text(state, tree), |e| {
            e.evaluate(state, tree)
        })
    }
}
