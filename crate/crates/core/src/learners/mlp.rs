use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::linalg::Mat;
use crate::rng;
use crate::scalar::Real;

const INIT_STREAM: u64 = 0x11;
const EPOCH_STREAM: u64 = 0x12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Layer<T> {
    /// out × in
    pub w: Mat<T>,
    pub b: Vec<T>,
}

/// Fully connected network: softplus hidden layers, identity output, trained on
/// standardized targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Mlp<T> {
    pub layers: Vec<Layer<T>>,
    pub alpha: T,
    pub y_mean: T,
    pub y_scale: T,
    /// mean training loss per epoch
    pub loss_curve: Vec<T>,
}

pub fn softplus<T: Real>(z: T) -> T {
    z.max(T::zero()) + (-z.abs()).exp().ln_1p()
}

fn sigmoid<T: Real>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

pub(crate) struct MlpParams<T> {
    pub layer_sizes: Vec<usize>,
    pub alpha: T,
    pub learning_rate: T,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl<T: Real> Mlp<T> {
    /// Glorot-uniform weights, zero biases.
    pub fn init(n_inputs: usize, hidden: &[usize], alpha: T, seed: u64) -> Self {
        let mut r = rng::stream(seed, rng::stream_id(&[INIT_STREAM]));
        let mut sizes = vec![n_inputs];
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        let layers = sizes
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let data = (0..fan_in * fan_out).map(|_| T::lit(r.random_range(-limit..limit))).collect();
                Layer { w: Mat::from_rows(fan_out, fan_in, data), b: vec![T::zero(); fan_out] }
            })
            .collect();
        Mlp { layers, alpha, y_mean: T::zero(), y_scale: T::one(), loss_curve: Vec::new() }
    }

    /// Output in standardized target units plus pre-activations and activations per layer.
    fn forward(&self, x: &[T]) -> (Vec<Vec<T>>, Vec<Vec<T>>) {
        let mut acts = vec![x.to_vec()];
        let mut pre = Vec::with_capacity(self.layers.len());
        let last = self.layers.len() - 1;
        for (li, layer) in self.layers.iter().enumerate() {
            let input = acts.last().unwrap();
            let z: Vec<T> = (0..layer.w.rows)
                .map(|o| layer.b[o] + layer.w.row(o).iter().zip(input).map(|(&w, &a)| w * a).sum::<T>())
                .collect();
            let a = if li == last { z.clone() } else { z.iter().map(|&v| softplus(v)).collect() };
            pre.push(z);
            acts.push(a);
        }
        (pre, acts)
    }

    fn raw(&self, x: &[T]) -> T {
        self.forward(x).1.last().unwrap()[0]
    }

    pub fn predict_row(&self, x: &[T]) -> T {
        self.y_mean + self.y_scale * self.raw(x)
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(|l| l.w.data.len() + l.b.len()).sum()
    }

    /// Flattened parameters: each layer's weights (row-major) then its biases.
    pub fn params(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.n_params());
        for l in &self.layers {
            out.extend_from_slice(&l.w.data);
            out.extend_from_slice(&l.b);
        }
        out
    }

    pub fn set_params(&mut self, p: &[T]) {
        assert_eq!(p.len(), self.n_params(), "parameter vector length");
        let mut k = 0;
        for l in &mut self.layers {
            let nw = l.w.data.len();
            l.w.data.copy_from_slice(&p[k..k + nw]);
            k += nw;
            let nb = l.b.len();
            l.b.copy_from_slice(&p[k..k + nb]);
            k += nb;
        }
    }

    /// Batch loss `Σ(ŷ−y)²/(2B) + alpha·Σ‖W‖²/(2B)` on targets already in network
    /// units, and its gradient in [`Mlp::params`] order.
    pub fn loss_and_gradient(&self, x: &Mat<T>, y: &[T]) -> (T, Vec<T>) {
        let bsz = T::from_usize_lossy(x.rows);
        let two = T::lit(2.0);
        let mut grads: Vec<Layer<T>> = self
            .layers
            .iter()
            .map(|l| Layer { w: Mat::zeros(l.w.rows, l.w.cols), b: vec![T::zero(); l.b.len()] })
            .collect();
        let mut loss = T::zero();
        for i in 0..x.rows {
            let (pre, acts) = self.forward(x.row(i));
            let err = acts.last().unwrap()[0] - y[i];
            loss += err * err / two;
            let mut delta = vec![err];
            for li in (0..self.layers.len()).rev() {
                let input = &acts[li];
                let g = &mut grads[li];
                for (o, &d) in delta.iter().enumerate() {
                    g.b[o] += d;
                    for (gw, &a) in g.w.data[o * input.len()..(o + 1) * input.len()].iter_mut().zip(input) {
                        *gw += d * a;
                    }
                }
                if li > 0 {
                    let w = &self.layers[li].w;
                    delta = (0..w.cols)
                        .map(|k| {
                            let back: T = delta.iter().enumerate().map(|(o, &d)| d * w[(o, k)]).sum();
                            back * sigmoid(pre[li - 1][k])
                        })
                        .collect();
                }
            }
        }
        let mut penalty = T::zero();
        let mut flat = Vec::with_capacity(self.n_params());
        for (l, g) in self.layers.iter().zip(&grads) {
            penalty += l.w.data.iter().map(|&w| w * w).sum::<T>();
            flat.extend(g.w.data.iter().zip(&l.w.data).map(|(&gw, &w)| (gw + self.alpha * w) / bsz));
            flat.extend(g.b.iter().map(|&gb| gb / bsz));
        }
        ((loss + self.alpha * penalty / two) / bsz, flat)
    }
}

/// Mini-batch Adam on standardized targets; the epoch order comes from a per-epoch stream.
pub(crate) fn fit_mlp<T: Real>(x: &Mat<T>, y: &[T], p: &MlpParams<T>) -> Mlp<T> {
    let n = x.rows;
    let nf = T::from_usize_lossy(n);
    let mut net = Mlp::init(x.cols, &p.layer_sizes, p.alpha, p.seed);
    net.y_mean = y.iter().copied().sum::<T>() / nf;
    let var = y.iter().map(|&v| (v - net.y_mean) * (v - net.y_mean)).sum::<T>() / nf;
    net.y_scale = if var > T::zero() { var.sqrt() } else { T::one() };
    let yt: Vec<T> = y.iter().map(|&v| (v - net.y_mean) / net.y_scale).collect();

    let (b1, b2, eps) = (T::lit(0.9), T::lit(0.999), T::lit(1e-8));
    let np = net.n_params();
    let mut m = vec![T::zero(); np];
    let mut v = vec![T::zero(); np];
    let mut params = net.params();
    let mut t = 0i32;
    let batch = p.batch_size.clamp(1, n);
    for epoch in 0..p.epochs {
        let mut r = rng::stream(p.seed, rng::stream_id(&[EPOCH_STREAM, epoch as u64]));
        let order = rng::permutation(n, &mut r);
        let mut epoch_loss = T::zero();
        for chunk in order.chunks(batch) {
            let mut data = Vec::with_capacity(chunk.len() * x.cols);
            for &i in chunk {
                data.extend_from_slice(x.row(i));
            }
            let xb = Mat::from_rows(chunk.len(), x.cols, data);
            let yb: Vec<T> = chunk.iter().map(|&i| yt[i]).collect();
            let (loss, grad) = net.loss_and_gradient(&xb, &yb);
            epoch_loss += loss * T::from_usize_lossy(chunk.len());
            t += 1;
            let c1 = T::one() - b1.powi(t);
            let c2 = T::one() - b2.powi(t);
            for k in 0..np {
                m[k] = b1 * m[k] + (T::one() - b1) * grad[k];
                v[k] = b2 * v[k] + (T::one() - b2) * grad[k] * grad[k];
                params[k] -= p.learning_rate * (m[k] / c1) / ((v[k] / c2).sqrt() + eps);
            }
            net.set_params(&params);
        }
        net.loss_curve.push(epoch_loss / nf);
    }
    net
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softplus_is_stable() {
        assert!((softplus(0.0f64) - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(softplus(1000.0f64), 1000.0);
        assert!(softplus(-1000.0f64) >= 0.0);
    }

    #[test]
    fn params_round_trip() {
        let mut net: Mlp<f64> = Mlp::init(3, &[4, 2], 0.01, 9);
        let p = net.params();
        assert_eq!(p.len(), 3 * 4 + 4 + 4 * 2 + 2 + 2 + 1);
        let doubled: Vec<f64> = p.iter().map(|v| v * 2.0).collect();
        net.set_params(&doubled);
        assert_eq!(net.params(), doubled);
    }
}
