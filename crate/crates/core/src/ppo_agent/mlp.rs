// SPDX-License-Identifier: Apache-2.0

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Fully connected layer, row-major weights `[out][in]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Dense {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            bias: vec![0.0; outputs],
        }
    }

    /// Uniform in `±sqrt(6 / (fan_in + fan_out))`, zero bias.
    pub fn glorot<R: Rng + ?Sized>(inputs: usize, outputs: usize, rng: &mut R) -> Self {
        let limit = (6.0 / (inputs + outputs) as f64).sqrt();
        let weights = (0..inputs * outputs)
            .map(|_| rng.gen_range(-limit..=limit))
            .collect();
        Dense {
            inputs,
            outputs,
            weights,
            bias: vec![0.0; outputs],
        }
    }

    fn forward(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for o in 0..self.outputs {
            let row = &self.weights[o * self.inputs..(o + 1) * self.inputs];
            let dot: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum();
            out.push(dot + self.bias[o]);
        }
    }

    fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

/// Multi-layer perceptron with rectified-linear hidden layers and a linear
/// output layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub layers: Vec<Dense>,
}

/// Activations kept from a forward pass for backpropagation.
#[derive(Debug, Clone, Default)]
pub struct ForwardCache {
    /// `acts[0]` is the input, `acts[k + 1]` the output of layer `k` after
    /// its activation (ReLU for hidden layers, identity for the last).
    pub acts: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        self.acts.last().expect("forward pass ran")
    }
}

impl Mlp {
    pub fn new<R: Rng + ?Sized>(sizes: &[usize], rng: &mut R) -> Self {
        Mlp {
            layers: sizes
                .windows(2)
                .map(|w| Dense::glorot(w[0], w[1], rng))
                .collect(),
        }
    }

    pub fn zeros(sizes: &[usize]) -> Self {
        Mlp {
            layers: sizes.windows(2).map(|w| Dense::zeros(w[0], w[1])).collect(),
        }
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![self.layers[0].inputs];
        s.extend(self.layers.iter().map(|l| l.outputs));
        s
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Dense::param_count).sum()
    }

    pub fn forward_cached(&self, x: &[f64]) -> ForwardCache {
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(x.to_vec());
        let last = self.layers.len() - 1;
        for (k, layer) in self.layers.iter().enumerate() {
            let mut out = Vec::with_capacity(layer.outputs);
            layer.forward(&acts[k], &mut out);
            if k < last {
                for v in &mut out {
                    *v = v.max(0.0);
                }
            }
            acts.push(out);
        }
        ForwardCache { acts }
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.forward_cached(x).acts.pop().expect("nonempty")
    }

    /// Accumulates `d loss / d params` into `grad` (flat, same order as
    /// [`Mlp::params`]) given `d loss / d output`.
    pub fn backward(&self, cache: &ForwardCache, d_out: &[f64], grad: &mut [f64]) {
        let mut delta = d_out.to_vec();
        let offsets = self.offsets();
        for k in (0..self.layers.len()).rev() {
            let layer = &self.layers[k];
            let input = &cache.acts[k];
            let (w_off, b_off) = offsets[k];
            for o in 0..layer.outputs {
                let d = delta[o];
                if d == 0.0 {
                    continue;
                }
                let row = &mut grad[w_off + o * layer.inputs..w_off + (o + 1) * layer.inputs];
                for (g, x) in row.iter_mut().zip(input) {
                    *g += d * x;
                }
                grad[b_off + o] += d;
            }
            if k == 0 {
                break;
            }
            // propagate through the weights, then through the ReLU of layer k-1
            let mut prev = vec![0.0; layer.inputs];
            for o in 0..layer.outputs {
                let d = delta[o];
                if d == 0.0 {
                    continue;
                }
                let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                for (p, w) in prev.iter_mut().zip(row) {
                    *p += d * w;
                }
            }
            for (p, &a) in prev.iter_mut().zip(input) {
                if a <= 0.0 {
                    *p = 0.0;
                }
            }
            delta = prev;
        }
    }

    /// `(weight offset, bias offset)` of each layer in the flat layout.
    fn offsets(&self) -> Vec<(usize, usize)> {
        let mut off = 0;
        self.layers
            .iter()
            .map(|l| {
                let w = off;
                let b = off + l.weights.len();
                off = b + l.bias.len();
                (w, b)
            })
            .collect()
    }

    /// Flat parameter vector: per layer, weights then biases.
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for l in &self.layers {
            out.extend_from_slice(&l.weights);
            out.extend_from_slice(&l.bias);
        }
        out
    }

    pub fn set_params(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.param_count(), "parameter count mismatch");
        let mut off = 0;
        for l in &mut self.layers {
            let nw = l.weights.len();
            l.weights.copy_from_slice(&flat[off..off + nw]);
            off += nw;
            let nb = l.bias.len();
            l.bias.copy_from_slice(&flat[off..off + nb]);
            off += nb;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flat_params_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = Mlp::new(&[8, 64, 16, 2], &mut rng);
        assert_eq!(m.param_count(), 8 * 64 + 64 + 64 * 16 + 16 + 16 * 2 + 2);
        let mut z = Mlp::zeros(&[8, 64, 16, 2]);
        z.set_params(&m.params());
        assert_eq!(z, m);
    }

    #[test]
    fn backward_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut m = Mlp::new(&[3, 5, 2], &mut rng);
        for l in &mut m.layers {
            for b in &mut l.bias {
                *b = rng.gen_range(-0.5..0.5);
            }
        }
        let x = [0.3, -0.7, 0.9];
        // loss = 0.5 * |out|^2
        let loss = |m: &Mlp| m.forward(&x).iter().map(|v| 0.5 * v * v).sum::<f64>();
        let cache = m.forward_cached(&x);
        let mut grad = vec![0.0; m.param_count()];
        m.backward(&cache, cache.output(), &mut grad);
        let base = m.params();
        for k in 0..base.len() {
            let h = 1e-6;
            let mut p = base.clone();
            p[k] += h;
            let mut mp = m.clone();
            mp.set_params(&p);
            p[k] -= 2.0 * h;
            let mut mm = m.clone();
            mm.set_params(&p);
            let fd = (loss(&mp) - loss(&mm)) / (2.0 * h);
            assert!(
                (fd - grad[k]).abs() < 1e-6,
                "param {k}: fd {fd} vs {}",
                grad[k]
            );
        }
    }
}
