// SPDX-License-Identifier: Apache-2.0

use super::EvalError;

/// Indices (ascending) of the points not dominated on `(area, delay)`,
/// both minimized. Identical points do not dominate each other.
pub fn pareto_front(points: &[(f64, f64)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .0
            .total_cmp(&points[b].0)
            .then(points[a].1.total_cmp(&points[b].1))
            .then(a.cmp(&b))
    });

    let mut front = Vec::new();
    let mut best_before = f64::INFINITY;
    let mut k = 0;
    while k < order.len() {
        // a run of identical points shares one verdict
        let p = points[order[k]];
        let mut end = k + 1;
        while end < order.len() && points[order[end]] == p {
            end += 1;
        }
        if p.1 < best_before {
            front.extend_from_slice(&order[k..end]);
        }
        best_before = best_before.min(p.1);
        k = end;
    }
    front.sort_unstable();
    front
}

fn normalize(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let axis = |sel: fn(&(f64, f64)) -> f64| {
        let lo = points.iter().map(sel).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(sel).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi - lo)
    };
    let (xa, xr) = axis(|p| p.0);
    let (ya, yr) = axis(|p| p.1);
    let scale = |v: f64, lo: f64, range: f64| if range > 0.0 { (v - lo) / range } else { 0.0 };
    points
        .iter()
        .map(|&(x, y)| (scale(x, xa, xr), scale(y, ya, yr)))
        .collect()
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        ((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2
    } else {
        0.0
    };
    let q = if t <= 0.0 {
        a
    } else if t >= 1.0 {
        b
    } else {
        (a.0 + t * dx, a.1 + t * dy)
    };
    ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt()
}

/// Distance of every point to the Pareto frontier polyline, computed on
/// axes min-max normalized to `[0, 1]`. Frontier points get exactly 0.
pub fn distances_to_front(points: &[(f64, f64)]) -> Vec<f64> {
    if points.is_empty() {
        return Vec::new();
    }
    let norm = normalize(points);
    let front = pareto_front(points);
    let mut vertices: Vec<(f64, f64)> = front.iter().map(|&k| norm[k]).collect();
    vertices.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    vertices.dedup();

    let mut on_front = vec![false; points.len()];
    for &k in &front {
        on_front[k] = true;
    }
    norm.iter()
        .enumerate()
        .map(|(k, &p)| {
            if on_front[k] {
                return 0.0;
            }
            if vertices.len() == 1 {
                return segment_distance(p, vertices[0], vertices[0]);
            }
            vertices
                .windows(2)
                .map(|w| segment_distance(p, w[0], w[1]))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// The `ceil(fraction * n)` points closest to the Pareto frontier, ties by
/// index; returned in ascending index order.
pub fn select_top_fraction(points: &[(f64, f64)], fraction: f64) -> Result<Vec<usize>, EvalError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(EvalError::InvalidFraction(fraction));
    }
    let dist = distances_to_front(points);
    let take = ((fraction * points.len() as f64).ceil() as usize).min(points.len());
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));
    order.truncate(take);
    order.sort_unstable();
    Ok(order)
}
