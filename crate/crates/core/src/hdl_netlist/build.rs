// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;

use super::{Netlist, NetlistBuilder, NetlistError, WireId};
use crate::compressor_tree::{Compressor, CompressorState};
use crate::prefix_tree::PrefixTree;

/// Instantiates a prefix adder over existing operand wires.
///
/// Pre-processing `p_i = a_i ^ b_i`, `g_i = a_i & b_i`; each cell merges its
/// canonical parents with `P = P_lo & P_up`, `G = (G_lo & P_up) | G_up`;
/// `s_i = p_i ^ G_{1:i-1}` with `G_{1:0} = 0`. Carry-out is `G_{1:N}`.
/// Returns the sum wires (bit 0 first) and the carry-out wire.
pub fn prefix_adder_into(
    b: &mut NetlistBuilder,
    x: &[WireId],
    y: &[WireId],
    tree: &PrefixTree,
) -> Result<(Vec<WireId>, WireId), NetlistError> {
    tree.check_legal()?;
    let n = tree.width();
    if x.len() != n || y.len() != n {
        return Err(NetlistError::WidthMismatch {
            expected: n,
            found: x.len().min(y.len()),
        });
    }
    let mut p = Vec::with_capacity(n);
    let mut g = Vec::with_capacity(n);
    for k in 0..n {
        p.push(b.xor(x[k], y[k]));
        g.push(b.and(x[k], y[k]));
    }

    // (P, G) wires per cell, indexed [(j - 1) * n + (i - 1)]
    let mut pg: Vec<Option<(WireId, WireId)>> = vec![None; n * n];
    for i in 1..=n {
        pg[(i - 1) * n + (i - 1)] = Some((p[i - 1], g[i - 1]));
    }
    for j in 2..=n {
        let lsbs: Vec<usize> = tree.column(j).collect();
        for w in (0..lsbs.len() - 1).rev() {
            let (i, up) = (lsbs[w], lsbs[w + 1]);
            let (p_up, g_up) = pg[(j - 1) * n + (up - 1)].expect("upper parent built");
            let (p_lo, g_lo) = pg[(up - 2) * n + (i - 1)].expect("lower parent built");
            let p_new = b.and(p_lo, p_up);
            let t = b.and(g_lo, p_up);
            let g_new = b.or(t, g_up);
            pg[(j - 1) * n + (i - 1)] = Some((p_new, g_new));
        }
    }

    let zero = b.zero();
    let mut sum = Vec::with_capacity(n);
    for i in 1..=n {
        let carry_in = if i == 1 {
            zero
        } else {
            pg[(i - 2) * n].expect("row-1 cell").1
        };
        sum.push(b.xor(p[i - 1], carry_in));
    }
    let cout = pg[(n - 1) * n].expect("row-1 cell").1;
    Ok((sum, cout))
}

/// `N`-bit adder with ports `a`, `b`, `s` and `cout`.
pub fn build_adder_netlist(tree: &PrefixTree) -> Result<Netlist, NetlistError> {
    tree.check_legal()?;
    let n = tree.width();
    let mut b = NetlistBuilder::new();
    let a_in = b.input("a", n);
    let b_in = b.input("b", n);
    let (sum, cout) = prefix_adder_into(&mut b, &a_in, &b_in, tree)?;
    b.output("s", sum);
    b.output("cout", vec![cout]);
    Ok(b.finish())
}

/// `N x N` unsigned multiplier with ports `a`, `b` and the `2N`-bit `p`.
///
/// Partial products are ANDs, the compressor schedule is replayed with the
/// same input-selection rule as the environment, a full adder is two half
/// adders plus an OR, and the final `2N`-bit adder's carry-out is dropped
/// (the true product always fits in `2N` bits).
pub fn build_multiplier_netlist(
    state: &CompressorState,
    tree: &PrefixTree,
) -> Result<Netlist, NetlistError> {
    let n = state.width();
    if !state.is_terminal() {
        return Err(crate::compressor_tree::CompressorError::NotTerminal.into());
    }
    if tree.width() != 2 * n {
        return Err(NetlistError::WidthMismatch {
            expected: 2 * n,
            found: tree.width(),
        });
    }
    let mut b = NetlistBuilder::new();
    let a_in = b.input("a", n);
    let b_in = b.input("b", n);

    let mut wire_of: HashMap<u32, WireId> = HashMap::new();
    for i in 0..n {
        for k in 0..n {
            let w = b.and(a_in[i], b_in[k]);
            wire_of.insert((i * n + k) as u32, w);
        }
    }

    let mut replay = CompressorState::new(n)?;
    for &kind in state.actions() {
        let ev = replay.step(kind)?;
        let ins: Vec<WireId> = ev.inputs.iter().map(|id| wire_of[id]).collect();
        let (s, c) = match kind {
            Compressor::Half => (b.xor(ins[0], ins[1]), b.and(ins[0], ins[1])),
            Compressor::Full => {
                let s1 = b.xor(ins[0], ins[1]);
                let c1 = b.and(ins[0], ins[1]);
                let s = b.xor(s1, ins[2]);
                let c2 = b.and(s1, ins[2]);
                (s, b.or(c1, c2))
            }
        };
        wire_of.insert(ev.sum.id, s);
        wire_of.insert(ev.carry.id, c);
    }
    debug_assert_eq!(&replay, state);

    let ops = replay.finalize_operands()?;
    let zero = b.zero();
    let bind = |bits: &[Option<crate::compressor_tree::BitRecord>]| -> Vec<WireId> {
        bits.iter()
            .map(|bit| bit.map(|r| wire_of[&r.id]).unwrap_or(zero))
            .collect()
    };
    let x = bind(&ops.x);
    let y = bind(&ops.y);
    let (sum, _cout) = prefix_adder_into(&mut b, &x, &y, tree)?;
    b.output("p", sum);
    Ok(b.finish())
}
