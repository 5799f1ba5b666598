// SPDX-License-Identifier: Apache-2.0

//! Compressor-tree environment for unsigned N x N multiplication.
//!
//! The N² partial-product bits are reduced column by column with full and
//! half adders. The agent only ever acts on the action digit, the lowest
//! column holding more than two bits, and only chooses the adder type; the
//! inputs are always the lowest-delay bits of that column.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Unit-gate delay from a full adder's addend inputs to its outputs.
pub const FA_ADDEND_DELAY: u32 = 3;
/// Unit-gate delay from a full adder's carry input to its outputs.
pub const FA_CARRY_IN_DELAY: u32 = 2;
pub const HA_DELAY: u32 = 1;
/// Delay of a partial-product bit (one AND gate).
pub const PARTIAL_PRODUCT_DELAY: u32 = 1;

pub const FEATURE_LEN: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompressorError {
    #[error("multiplier width must be at least 2, got {0}")]
    InvalidWidth(usize),
    #[error("state is terminal: every column holds at most two bits")]
    TerminalState,
    #[error("state is not terminal")]
    NotTerminal,
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Compressor {
    Full,
    Half,
}

impl Compressor {
    /// Network action index: 0 selects a full adder, 1 a half adder.
    pub fn index(self) -> usize {
        match self {
            Compressor::Full => 0,
            Compressor::Half => 1,
        }
    }

    pub fn from_index(index: usize) -> Self {
        if index == 0 {
            Compressor::Full
        } else {
            Compressor::Half
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Compressor::Full => 'F',
            Compressor::Half => 'H',
        }
    }

    fn inputs(self) -> usize {
        match self {
            Compressor::Full => 3,
            Compressor::Half => 2,
        }
    }
}

/// One bit waiting in a column: its estimated delay and a stable id.
///
/// Partial product `a_i & b_k` has id `i * N + k`; adder outputs get fresh
/// ids in creation order (sum first, then carry).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitRecord {
    pub delay: u32,
    pub id: u32,
}

/// What a single compression step consumed and produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressEvent {
    pub kind: Compressor,
    pub column: usize,
    /// Input bit ids, lowest delay first. For a full adder the last entry
    /// drives the carry input.
    pub inputs: Vec<u32>,
    pub sum: BitRecord,
    pub carry: BitRecord,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressorState {
    width: usize,
    columns: Vec<Vec<BitRecord>>,
    actions: Vec<Compressor>,
    ha_per_column: Vec<u32>,
    fa_count: usize,
    next_id: u32,
}

/// Which column bit goes to which final adder operand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinalOperands {
    /// `x[c]` / `y[c]`: bit bound to column `c` of each operand, if any.
    pub x: Vec<Option<BitRecord>>,
    pub y: Vec<Option<BitRecord>>,
}

impl FinalOperands {
    pub fn x_mask(&self) -> u128 {
        mask_of(&self.x)
    }

    pub fn y_mask(&self) -> u128 {
        mask_of(&self.y)
    }

    pub fn max_delay(&self) -> u32 {
        self.x
            .iter()
            .chain(self.y.iter())
            .flatten()
            .map(|b| b.delay)
            .max()
            .unwrap_or(0)
    }
}

fn mask_of(bits: &[Option<BitRecord>]) -> u128 {
    bits.iter()
        .enumerate()
        .filter(|(c, b)| b.is_some() && *c < 128)
        .fold(0u128, |m, (c, _)| m | (1u128 << c))
}

/// Indices of the `count` lowest-delay bits, ascending by delay with ties
/// kept in insertion order.
pub fn select_inputs(column: &[BitRecord], count: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..column.len()).collect();
    order.sort_by_key(|&k| column[k].delay);
    order.truncate(count);
    order
}

/// Normalization constant for delay features: `3 * ceil(log_1.5 N) + 4`.
pub fn delay_scale(width: usize) -> f64 {
    let mut levels = 0u32;
    let mut reach = 1.0f64;
    while reach < width as f64 {
        reach *= 1.5;
        levels += 1;
    }
    (3 * levels + 4) as f64
}

impl CompressorState {
    pub fn new(width: usize) -> Result<Self, CompressorError> {
        if width < 2 {
            return Err(CompressorError::InvalidWidth(width));
        }
        let mut columns = vec![Vec::new(); 2 * width];
        for (c, column) in columns.iter_mut().enumerate().take(2 * width - 1) {
            let lo = c.saturating_sub(width - 1);
            let hi = c.min(width - 1);
            for i in lo..=hi {
                let k = c - i;
                column.push(BitRecord {
                    delay: PARTIAL_PRODUCT_DELAY,
                    id: (i * width + k) as u32,
                });
            }
        }
        Ok(CompressorState {
            width,
            columns,
            actions: Vec::new(),
            ha_per_column: vec![0; 2 * width],
            fa_count: 0,
            next_id: (width * width) as u32,
        })
    }

    /// Replays an action sequence from the initial state.
    pub fn replay(width: usize, actions: &[Compressor]) -> Result<Self, CompressorError> {
        let mut state = Self::new(width)?;
        for &a in actions {
            state.step(a)?;
        }
        Ok(state)
    }

    /// Greedy schedule that always picks a full adder.
    pub fn all_full(width: usize) -> Result<Self, CompressorError> {
        let mut state = Self::new(width)?;
        while !state.is_terminal() {
            state.step(Compressor::Full)?;
        }
        Ok(state)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn columns(&self) -> &[Vec<BitRecord>] {
        &self.columns
    }

    pub fn column_counts(&self) -> Vec<usize> {
        self.columns.iter().map(Vec::len).collect()
    }

    pub fn actions(&self) -> &[Compressor] {
        &self.actions
    }

    pub fn steps(&self) -> usize {
        self.actions.len()
    }

    pub fn full_adders(&self) -> usize {
        self.fa_count
    }

    pub fn half_adders(&self) -> usize {
        self.actions.len() - self.fa_count
    }

    pub fn ha_per_column(&self) -> &[u32] {
        &self.ha_per_column
    }

    pub fn total_bits(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn max_delay(&self) -> u32 {
        self.columns
            .iter()
            .flatten()
            .map(|b| b.delay)
            .max()
            .unwrap_or(0)
    }

    /// Lowest column holding more than two bits, `None` when terminal.
    pub fn action_digit(&self) -> Option<usize> {
        self.columns.iter().position(|c| c.len() > 2)
    }

    pub fn is_terminal(&self) -> bool {
        self.action_digit().is_none()
    }

    pub fn apply_compress(&self, kind: Compressor) -> Result<Self, CompressorError> {
        let mut next = self.clone();
        next.step(kind)?;
        Ok(next)
    }

    /// Applies one compression in place and reports the bits it touched.
    pub fn step(&mut self, kind: Compressor) -> Result<CompressEvent, CompressorError> {
        let column = self.action_digit().ok_or(CompressorError::TerminalState)?;
        let picked = select_inputs(&self.columns[column], kind.inputs());
        let inputs: Vec<BitRecord> = picked.iter().map(|&k| self.columns[column][k]).collect();
        let out_delay = match kind {
            Compressor::Full => (inputs[0].delay + FA_ADDEND_DELAY)
                .max(inputs[1].delay + FA_ADDEND_DELAY)
                .max(inputs[2].delay + FA_CARRY_IN_DELAY),
            Compressor::Half => inputs[0].delay.max(inputs[1].delay) + HA_DELAY,
        };
        let mut drop = picked;
        drop.sort_unstable();
        for k in drop.into_iter().rev() {
            self.columns[column].remove(k);
        }
        let sum = BitRecord {
            delay: out_delay,
            id: self.next_id,
        };
        let carry = BitRecord {
            delay: out_delay,
            id: self.next_id + 1,
        };
        self.next_id += 2;
        self.columns[column].push(sum);
        if column + 1 >= self.columns.len() {
            self.columns.push(Vec::new());
            self.ha_per_column.push(0);
        }
        self.columns[column + 1].push(carry);
        match kind {
            Compressor::Full => self.fa_count += 1,
            Compressor::Half => self.ha_per_column[column] += 1,
        }
        self.actions.push(kind);
        Ok(CompressEvent {
            kind,
            column,
            inputs: inputs.iter().map(|b| b.id).collect(),
            sum,
            carry,
        })
    }

    /// Normalized state features fed to the policy and value networks:
    /// action digit, max delay, half adders at the digit, action mask (2),
    /// delays of the three lowest-delay bits at the digit.
    pub fn features(&self) -> Result<[f64; FEATURE_LEN], CompressorError> {
        let digit = self.action_digit().ok_or(CompressorError::TerminalState)?;
        let scale = delay_scale(self.width);
        let mut f = [0.0; FEATURE_LEN];
        f[0] = digit as f64 / (2 * self.width - 2) as f64;
        f[1] = self.max_delay() as f64 / scale;
        f[2] = self.ha_per_column[digit] as f64 / self.width as f64;
        f[3] = 1.0;
        f[4] = 1.0;
        let column = &self.columns[digit];
        for (slot, k) in select_inputs(column, 3).into_iter().enumerate() {
            f[5 + slot] = column[k].delay as f64 / scale;
        }
        Ok(f)
    }

    /// Binds the remaining bits of the first `2N` columns to the two
    /// operands of the final adder: first bit to X, second to Y.
    pub fn finalize_operands(&self) -> Result<FinalOperands, CompressorError> {
        if !self.is_terminal() {
            return Err(CompressorError::NotTerminal);
        }
        let n = 2 * self.width;
        let mut x = vec![None; n];
        let mut y = vec![None; n];
        for (c, column) in self.columns.iter().enumerate().take(n) {
            x[c] = column.first().copied();
            y[c] = column.get(1).copied();
        }
        Ok(FinalOperands { x, y })
    }

    pub fn action_string(&self) -> String {
        self.actions.iter().map(|a| a.symbol()).collect()
    }

    pub fn serialize(&self) -> String {
        format!(
            "compressor v1 width={} actions={}",
            self.width,
            self.action_string()
        )
    }

    pub fn deserialize(text: &str) -> Result<Self, CompressorError> {
        let text = text.trim();
        let rest = text
            .strip_prefix("compressor v1 width=")
            .ok_or_else(|| CompressorError::Parse(format!("bad header in '{text}'")))?;
        let (width, actions) = rest
            .split_once(" actions=")
            .map(|(w, a)| (w, a.trim()))
            .or_else(|| rest.strip_suffix(" actions=").map(|w| (w, "")))
            .ok_or_else(|| CompressorError::Parse("missing actions field".into()))?;
        let width: usize = width
            .parse()
            .map_err(|_| CompressorError::Parse(format!("bad width '{width}'")))?;
        let actions = parse_actions(actions)?;
        Self::replay(width, &actions)
    }
}

pub fn parse_actions(text: &str) -> Result<Vec<Compressor>, CompressorError> {
    text.chars()
        .map(|ch| match ch {
            'F' | 'f' => Ok(Compressor::Full),
            'H' | 'h' => Ok(Compressor::Half),
            other => Err(CompressorError::Parse(format!("bad action '{other}'"))),
        })
        .collect()
}

impl fmt::Display for CompressorState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl FromStr for CompressorState {
    type Err = CompressorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::deserialize(s)
    }
}
