// SPDX-License-Identifier: Apache-2.0

//! Invariant checkers and brute-force oracles shared by the property suite
//! and the acceptance runner.

#![allow(dead_code)]

use std::collections::HashMap;

use arithgame::compressor_tree::{Compressor, CompressorState, FEATURE_LEN};
use arithgame::ppo_agent::{AgentParams, Mlp};
use arithgame::prefix_tree::{min_level, ActionKind, ActionMode, PrefixTree, SeedFamily};
use rand::seq::SliceRandom;
use rand::Rng;

/// Every structural invariant a reachable tree must satisfy.
pub fn check_tree(t: &PrefixTree) -> Result<(), String> {
    let n = t.width();
    t.check_legal().map_err(|e| e.to_string())?;
    for (i, j) in t.cells() {
        if i == 0 || i > j || j > n {
            return Err(format!("cell ({i}, {j}) outside the triangle"));
        }
    }
    let size = t.cells().filter(|&(i, j)| i < j).count();
    if size != t.size() {
        return Err(format!("size {} but {size} non-input cells", t.size()));
    }
    let level = t.level().map_err(|e| e.to_string())?;
    if level < min_level(n) {
        return Err(format!("level {level} below log2 bound"));
    }
    if size + level < 2 * n - 2 {
        return Err(format!("size {size} + level {level} < 2N-2"));
    }
    let back = PrefixTree::deserialize(&t.serialize()).map_err(|e| e.to_string())?;
    if &back != t {
        return Err("serialization round trip changed the tree".into());
    }
    if t.legalize() != *t {
        return Err("legalizing a legal tree changed it".into());
    }
    Ok(())
}

pub fn random_seed_tree<R: Rng>(width: usize, rng: &mut R) -> PrefixTree {
    if rng.gen_bool(0.3) {
        // random cell set, legalized
        let mut cells = Vec::new();
        for i in 1..width {
            for j in (i + 1)..=width {
                if rng.gen_bool(0.1) {
                    cells.push((i, j));
                }
            }
        }
        PrefixTree::from_cells(width, cells).unwrap()
    } else {
        // not every family supports every width
        let family = *SeedFamily::ALL.choose(rng).unwrap();
        PrefixTree::seed(family, width)
            .or_else(|_| PrefixTree::seed(SeedFamily::Ripple, width))
            .unwrap()
    }
}

/// Applies up to `len` random legal actions, checking every intermediate
/// tree and that a delete never grows nor an add shrinks the tree.
pub fn random_sequence<R: Rng>(
    width: usize,
    len: usize,
    rng: &mut R,
) -> Result<PrefixTree, String> {
    let mut t = random_seed_tree(width, rng);
    check_tree(&t)?;
    for _ in 0..len {
        let actions = t.legal_actions(ActionMode::Full);
        let Some(&a) = actions.choose(rng) else { break };
        let next = t.apply_action(a).map_err(|e| format!("{a}: {e}"))?;
        match a.kind {
            ActionKind::DeleteCell => {
                // rerouted parents may be added back, nothing else may vanish
                if next.contains(a.i, a.j) {
                    return Err(format!("{a} left the cell in place"));
                }
                if t.cells()
                    .any(|(i, j)| (i, j) != (a.i, a.j) && !next.contains(i, j))
                {
                    return Err(format!("{a} removed more than its target"));
                }
            }
            ActionKind::AddCell => {
                if !next.contains(a.i, a.j) || next.size() <= t.size() {
                    return Err(format!("{a} did not add the cell"));
                }
                if t.cells().any(|(i, j)| !next.contains(i, j)) {
                    return Err(format!("{a} removed a cell while legalizing"));
                }
            }
        }
        check_tree(&next).map_err(|e| format!("after {a}: {e}"))?;
        t = next;
    }
    Ok(t)
}

/// Plays one uniformly random episode, checking the environment invariants
/// after every step. Returns the terminal state.
pub fn random_episode<R: Rng>(width: usize, rng: &mut R) -> Result<CompressorState, String> {
    let mut s = CompressorState::new(width).map_err(|e| e.to_string())?;
    let n2 = width * width;
    if s.total_bits() != n2 {
        return Err(format!("initial total {} != N^2", s.total_bits()));
    }
    // potential that every action strictly decreases; carries may open a
    // column past the initial 2N-1, so weights count down from 4N
    let base = 4 * width;
    let potential = |s: &CompressorState| -> usize {
        s.column_counts()
            .iter()
            .enumerate()
            .map(|(c, &k)| k * (base - c))
            .sum()
    };
    let limit = potential(&s);
    let mut steps = 0;
    while let Some(digit) = s.action_digit() {
        if s.columns().len() >= base {
            return Err(format!("{} columns", s.columns().len()));
        }
        if steps > limit {
            return Err("episode did not terminate within its potential bound".into());
        }
        let delays: HashMap<u32, u32> =
            s.columns()[digit].iter().map(|b| (b.id, b.delay)).collect();
        let before = potential(&s);
        let kind = if rng.gen_bool(0.5) {
            Compressor::Full
        } else {
            Compressor::Half
        };
        let ev = s.step(kind).map_err(|e| e.to_string())?;
        let max_in = ev.inputs.iter().map(|id| delays[id]).max().unwrap();
        if ev.sum.delay <= max_in || ev.carry.delay <= max_in {
            return Err(format!("adder output delay not above input delay {max_in}"));
        }
        if s.total_bits() != n2 - s.full_adders() {
            return Err(format!("bit conservation broken at step {steps}"));
        }
        if potential(&s) >= before {
            return Err("potential did not decrease".into());
        }
        steps += 1;
    }
    if s.column_counts().iter().any(|&k| k > 2) {
        return Err("terminal state has a column above two bits".into());
    }
    if s.actions().len() != s.full_adders() + s.half_adders() || s.steps() != steps {
        return Err("action count does not match adder count".into());
    }
    let replay = CompressorState::replay(width, s.actions()).map_err(|e| e.to_string())?;
    if replay != s {
        return Err("replaying the actions gave a different state".into());
    }
    Ok(s)
}

/// O(n^2) dominance check, both coordinates minimized.
pub fn brute_front(points: &[(f64, f64)]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| {
            !points.iter().any(|q| {
                let p = points[i];
                q.0 <= p.0 && q.1 <= p.1 && (q.0 < p.0 || q.1 < p.1)
            })
        })
        .collect()
}

fn point_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let q = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt()
}

/// Nearest `ceil(fraction * n)` points to the normalized frontier polyline,
/// ties by index, computed against every frontier segment.
pub fn brute_top_fraction(points: &[(f64, f64)], fraction: f64) -> Vec<usize> {
    let n = points.len();
    let lo = |f: fn(&(f64, f64)) -> f64| points.iter().map(f).fold(f64::INFINITY, f64::min);
    let hi = |f: fn(&(f64, f64)) -> f64| points.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    let (x0, x1, y0, y1) = (lo(|p| p.0), hi(|p| p.0), lo(|p| p.1), hi(|p| p.1));
    let norm = |v: f64, a: f64, b: f64| if b > a { (v - a) / (b - a) } else { 0.0 };
    let np: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (norm(p.0, x0, x1), norm(p.1, y0, y1)))
        .collect();
    let front = brute_front(points);
    let mut verts: Vec<(f64, f64)> = front.iter().map(|&k| np[k]).collect();
    verts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    verts.dedup();
    let dist: Vec<f64> = (0..n)
        .map(|k| {
            if front.contains(&k) {
                0.0
            } else if verts.len() == 1 {
                point_segment(np[k], verts[0], verts[0])
            } else {
                verts
                    .windows(2)
                    .map(|w| point_segment(np[k], w[0], w[1]))
                    .fold(f64::INFINITY, f64::min)
            }
        })
        .collect();
    let take = ((fraction * n as f64).ceil() as usize).min(n);
    let mut chosen = Vec::new();
    for _ in 0..take {
        let best = (0..n)
            .filter(|k| !chosen.contains(k))
            .min_by(|&a, &b| dist[a].partial_cmp(&dist[b]).unwrap().then(a.cmp(&b)))
            .unwrap();
        chosen.push(best);
    }
    chosen.sort_unstable();
    chosen
}

/// Random point set on a coarse grid so duplicates and ties occur.
pub fn random_points<R: Rng>(rng: &mut R) -> Vec<(f64, f64)> {
    let n = rng.gen_range(1..=40);
    (0..n)
        .map(|_| (rng.gen_range(0..15) as f64, rng.gen_range(0..15) as f64))
        .collect()
}

/// Largest relative error between an analytic gradient and central finite
/// differences of `f`, measured against the gradient norm.
pub fn gradient_error(
    params: &[f64],
    analytic: &[f64],
    mut f: impl FnMut(&[f64]) -> f64,
    h: f64,
) -> f64 {
    let mut p = params.to_vec();
    let mut numeric = vec![0.0; p.len()];
    for k in 0..p.len() {
        let orig = p[k];
        p[k] = orig + h;
        let up = f(&p);
        p[k] = orig - h;
        let down = f(&p);
        p[k] = orig;
        numeric[k] = (up - down) / (2.0 * h);
    }
    let diff: f64 = analytic
        .iter()
        .zip(&numeric)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let scale = analytic
        .iter()
        .map(|a| a * a)
        .sum::<f64>()
        .sqrt()
        .max(numeric.iter().map(|a| a * a).sum::<f64>().sqrt());
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

/// Smallest |pre-activation| over the hidden ReLU units for input `x`.
pub fn relu_margin(net: &Mlp, x: &[f64]) -> f64 {
    let sizes = net.sizes();
    let p = net.params();
    let mut x = x.to_vec();
    let mut off = 0;
    let mut margin = f64::INFINITY;
    for l in 0..sizes.len() - 2 {
        let (i, o) = (sizes[l], sizes[l + 1]);
        let (w, b) = (&p[off..off + i * o], &p[off + i * o..off + i * o + o]);
        off += i * o + o;
        let y: Vec<f64> = (0..o)
            .map(|r| b[r] + (0..i).map(|c| w[r * i + c] * x[c]).sum::<f64>())
            .collect();
        margin = y.iter().fold(margin, |m, v| m.min(v.abs()));
        x = y.iter().map(|v| v.max(0.0)).collect();
    }
    margin
}

/// Random features in [0, 1) drawn away from every ReLU kink of both
/// networks, where central differences would straddle a corner.
pub fn smooth_features<R: Rng>(params: &AgentParams, rng: &mut R) -> [f64; FEATURE_LEN] {
    loop {
        let mut f = [0.0; FEATURE_LEN];
        f.iter_mut().for_each(|x| *x = rng.gen_range(0.0..1.0));
        if relu_margin(&params.policy, &f) > 1e-3 && relu_margin(&params.value, &f) > 1e-3 {
            return f;
        }
    }
}
