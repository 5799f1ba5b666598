// SPDX-License-Identifier: Apache-2.0

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_adder_netlist, build_multiplier_netlist, Netlist, NetlistError};
use crate::compressor_tree::CompressorState;
use crate::prefix_tree::PrefixTree;

/// Exhaustive checks are limited to 2^26 input vectors.
pub const MAX_EXHAUSTIVE_VECTORS: u128 = 1 << 26;

#[derive(Debug, Clone, Copy)]
pub enum Design<'a> {
    Adder(&'a PrefixTree),
    Multiplier(&'a CompressorState, &'a PrefixTree),
}

impl Design<'_> {
    fn operand_width(&self) -> usize {
        match self {
            Design::Adder(t) => t.width(),
            Design::Multiplier(s, _) => s.width(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Design::Adder(t) => format!("adder width={}", t.width()),
            Design::Multiplier(s, t) => format!(
                "multiplier width={} actions={} adder_size={}",
                s.width(),
                s.action_string(),
                t.size()
            ),
        }
    }

    fn netlist(&self) -> Result<Netlist, NetlistError> {
        match self {
            Design::Adder(t) => build_adder_netlist(t),
            Design::Multiplier(s, t) => build_multiplier_netlist(s, t),
        }
    }

    fn reference(&self, a: u128, b: u128) -> u128 {
        match self {
            Design::Adder(_) => a + b,
            Design::Multiplier(..) => a * b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive,
    Random { count: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub a: u128,
    pub b: u128,
    pub expected: u128,
    pub got: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub design: String,
    pub mode: String,
    pub vectors: u64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

/// The operand pairs a seeded random check uses.
pub fn random_vectors(width: usize, count: u64, seed: u64) -> Vec<(u128, u128)> {
    let mask = operand_mask(width);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a = rng.gen::<u128>() & mask;
            let b = rng.gen::<u128>() & mask;
            (a, b)
        })
        .collect()
}

fn operand_mask(width: usize) -> u128 {
    if width >= 128 {
        u128::MAX
    } else {
        (1u128 << width) - 1
    }
}

/// Simulates one batch of at most 64 vectors; returns the first mismatch.
fn check_batch(
    net: &Netlist,
    design: &Design<'_>,
    vectors: &[(u128, u128)],
) -> Option<Counterexample> {
    let n = design.operand_width();
    let pack = |pick: fn(&(u128, u128)) -> u128| -> Vec<u64> {
        (0..n)
            .map(|bit| {
                vectors.iter().enumerate().fold(0u64, |acc, (lane, v)| {
                    acc | ((((pick(v) >> bit) & 1) as u64) << lane)
                })
            })
            .collect()
    };
    let out = net
        .simulate_packed(&[pack(|v| v.0), pack(|v| v.1)])
        .expect("ports match the design");
    // concatenate every output port, first port at the low bits
    vectors.iter().enumerate().find_map(|(lane, &(a, b))| {
        let mut got = 0u128;
        let mut shift = 0;
        for port in &out {
            for &word in port {
                if shift < 128 {
                    got |= (((word >> lane) & 1) as u128) << shift;
                }
                shift += 1;
            }
        }
        let expected = design.reference(a, b);
        (got != expected).then_some(Counterexample {
            a,
            b,
            expected,
            got,
        })
    })
}

/// Checks a design against integer arithmetic.
pub fn verify(design: Design<'_>, mode: VerifyMode) -> Result<VerifyReport, NetlistError> {
    let net = design.netlist()?;
    verify_netlist(&net, design, mode)
}

/// Same as [`verify`] for an already-built (possibly modified) netlist.
pub fn verify_netlist(
    net: &Netlist,
    design: Design<'_>,
    mode: VerifyMode,
) -> Result<VerifyReport, NetlistError> {
    let n = design.operand_width();
    if n > 64 {
        return Err(NetlistError::PortTooWide(n));
    }
    let (vectors, counterexample, label) = match mode {
        VerifyMode::Exhaustive => {
            let total = 1u128 << (2 * n);
            if total > MAX_EXHAUSTIVE_VECTORS {
                return Err(NetlistError::TooManyVectors {
                    vectors: total,
                    limit: MAX_EXHAUSTIVE_VECTORS,
                });
            }
            let total = total as u64;
            let mask = operand_mask(n);
            let batches = total.div_ceil(64);
            let cex = (0..batches).into_par_iter().find_map_first(|k| {
                let lo = k * 64;
                let hi = (lo + 64).min(total);
                let vs: Vec<(u128, u128)> = (lo..hi)
                    .map(|v| ((v as u128) & mask, (v as u128) >> n))
                    .collect();
                check_batch(net, &design, &vs)
            });
            (total, cex, "exhaustive".to_string())
        }
        VerifyMode::Random { count, seed } => {
            let vs = random_vectors(n, count, seed);
            let cex = vs
                .par_chunks(64)
                .find_map_first(|chunk| check_batch(net, &design, chunk));
            (count, cex, format!("random count={count} seed={seed}"))
        }
    };
    Ok(VerifyReport {
        design: design.describe(),
        mode: label,
        vectors,
        pass: counterexample.is_none(),
        counterexample,
    })
}
