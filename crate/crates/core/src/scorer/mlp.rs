use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::NnError;

pub const DEFAULT_LEARNING_RATE: f64 = 0.05;
pub const ADAGRAD_EPSILON: f64 = 1e-8;
pub const N_CLASSES: usize = 3;

/// A fully connected network with ReLU hidden layers and a softmax output,
/// trained on mean cross-entropy with minibatch AdaGrad.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    widths: Vec<usize>,
    /// `weights[l]` has shape `(widths[l + 1], widths[l])`.
    weights: Vec<Array2<f64>>,
    biases: Vec<Array1<f64>>,
    grad_sq_w: Vec<Array2<f64>>,
    grad_sq_b: Vec<Array1<f64>>,
    learning_rate: f64,
    seed: u64,
}

/// Gradients of the mean loss, laid out like the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { epochs: 200, batch_size: 32 }
    }
}

fn relu_in_place(z: &mut Array2<f64>) {
    z.mapv_inplace(|v| v.max(0.0));
}

fn softmax_rows(z: &Array2<f64>) -> Array2<f64> {
    let mut p = z.clone();
    for mut row in p.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
    p
}

/// Index of the largest value, the lowest index on ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

impl Mlp {
    /// Widths used for grading: three hidden layers as wide as the input and
    /// a three-way output.
    pub fn scorer_widths(input: usize) -> Vec<usize> {
        vec![input, input, input, input, N_CLASSES]
    }

    /// Weights uniform in `±sqrt(6 / (fan_in + fan_out))`, biases zero, drawn
    /// from a ChaCha8 stream seeded with `seed`.
    pub fn init(widths: &[usize], seed: u64) -> Self {
        assert!(widths.len() >= 2 && widths.iter().all(|&w| w > 0), "invalid layer widths {widths:?}");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for pair in widths.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            weights.push(Array2::from_shape_simple_fn((fan_out, fan_in), || rng.gen_range(-bound..=bound)));
            biases.push(Array1::zeros(fan_out));
        }
        let grad_sq_w = weights.iter().map(|w| Array2::zeros(w.raw_dim())).collect();
        let grad_sq_b = biases.iter().map(|b| Array1::zeros(b.raw_dim())).collect();
        Mlp {
            widths: widths.to_vec(),
            weights,
            biases,
            grad_sq_w,
            grad_sq_b,
            learning_rate: DEFAULT_LEARNING_RATE,
            seed,
        }
    }

    pub(crate) fn from_parts(
        widths: Vec<usize>,
        weights: Vec<Array2<f64>>,
        biases: Vec<Array1<f64>>,
        learning_rate: f64,
        seed: u64,
    ) -> Self {
        let grad_sq_w = weights.iter().map(|w| Array2::zeros(w.raw_dim())).collect();
        let grad_sq_b = biases.iter().map(|b| Array1::zeros(b.raw_dim())).collect();
        Mlp { widths, weights, biases, grad_sq_w, grad_sq_b, learning_rate, seed }
    }

    pub fn with_learning_rate(mut self, lr: f64) -> Self {
        self.learning_rate = lr;
        self
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn input_width(&self) -> usize {
        self.widths[0]
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    pub fn weights(&self) -> &[Array2<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[Array1<f64>] {
        &self.biases
    }

    pub fn weights_mut(&mut self) -> &mut [Array2<f64>] {
        &mut self.weights
    }

    pub fn biases_mut(&mut self) -> &mut [Array1<f64>] {
        &mut self.biases
    }

    fn check_width(&self, got: usize) -> Result<(), NnError> {
        if got != self.input_width() {
            return Err(NnError::DimensionMismatch { expected: self.input_width(), got });
        }
        Ok(())
    }

    /// Pre-activations of every layer for a batch (rows are samples).
    fn forward_batch(&self, x: ArrayView2<f64>) -> Vec<Array2<f64>> {
        let mut zs: Vec<Array2<f64>> = Vec::with_capacity(self.weights.len());
        let last = self.weights.len() - 1;
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let input = if l == 0 {
                x.to_owned()
            } else {
                let mut a = zs[l - 1].clone();
                relu_in_place(&mut a);
                a
            };
            let z = input.dot(&w.t()) + b;
            zs.push(z);
            debug_assert!(l <= last);
        }
        zs
    }

    /// Output logits for one input.
    pub fn logits(&self, x: &[f64]) -> Result<Vec<f64>, NnError> {
        self.check_width(x.len())?;
        let x = ArrayView2::from_shape((1, x.len()), x).expect("row vector");
        Ok(self.forward_batch(x).pop().expect("at least one layer").row(0).to_vec())
    }

    /// Class probabilities for one input.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, NnError> {
        let z = self.logits(x)?;
        let z = Array2::from_shape_vec((1, z.len()), z).expect("row vector");
        Ok(softmax_rows(&z).row(0).to_vec())
    }

    /// Most probable class, the lowest index on ties.
    pub fn predict(&self, x: &[f64]) -> Result<usize, NnError> {
        Ok(argmax(&self.forward(x)?))
    }

    /// Mean cross-entropy over the batch and its gradient.
    pub fn loss_and_gradients(&self, x: ArrayView2<f64>, labels: &[usize]) -> Result<(f64, Gradients), NnError> {
        self.check_width(x.ncols())?;
        let n_out = *self.widths.last().unwrap();
        if let Some(&bad) = labels.iter().find(|&&y| y >= n_out) {
            return Err(NnError::InvalidLabel(bad));
        }
        assert_eq!(x.nrows(), labels.len(), "one label per row");
        let batch = x.nrows() as f64;
        let zs = self.forward_batch(x);
        let probs = softmax_rows(zs.last().unwrap());

        let mut loss = 0.0;
        let mut delta = probs;
        for (i, &y) in labels.iter().enumerate() {
            loss -= delta[[i, y]].max(f64::MIN_POSITIVE).ln();
            delta[[i, y]] -= 1.0;
        }
        loss /= batch;
        delta /= batch;

        let n_layers = self.weights.len();
        let mut gw = vec![Array2::zeros((0, 0)); n_layers];
        let mut gb = vec![Array1::zeros(0); n_layers];
        for l in (0..n_layers).rev() {
            let input = if l == 0 {
                x.to_owned()
            } else {
                let mut a = zs[l - 1].clone();
                relu_in_place(&mut a);
                a
            };
            gw[l] = delta.t().dot(&input);
            gb[l] = delta.sum_axis(Axis(0));
            if l > 0 {
                let mut back = delta.dot(&self.weights[l]);
                Zip::from(&mut back).and(&zs[l - 1]).for_each(|d, &z| {
                    if z <= 0.0 {
                        *d = 0.0;
                    }
                });
                delta = back;
            }
        }
        Ok((loss, Gradients { weights: gw, biases: gb }))
    }

    /// Mean cross-entropy without gradients.
    pub fn loss(&self, x: ArrayView2<f64>, labels: &[usize]) -> Result<f64, NnError> {
        self.check_width(x.ncols())?;
        let zs = self.forward_batch(x);
        let probs = softmax_rows(zs.last().unwrap());
        let total: f64 = labels.iter().enumerate().map(|(i, &y)| -probs[[i, y]].max(f64::MIN_POSITIVE).ln()).sum();
        Ok(total / labels.len() as f64)
    }

    /// One AdaGrad step: `G += g^2; w -= lr * g / sqrt(G + eps)`.
    pub fn adagrad_step(&mut self, grads: &Gradients) {
        let lr = self.learning_rate;
        for l in 0..self.weights.len() {
            Zip::from(&mut self.weights[l])
                .and(&mut self.grad_sq_w[l])
                .and(&grads.weights[l])
                .for_each(|w, g2, &g| {
                    *g2 += g * g;
                    *w -= lr * g / (*g2 + ADAGRAD_EPSILON).sqrt();
                });
            Zip::from(&mut self.biases[l])
                .and(&mut self.grad_sq_b[l])
                .and(&grads.biases[l])
                .for_each(|b, g2, &g| {
                    *g2 += g * g;
                    *b -= lr * g / (*g2 + ADAGRAD_EPSILON).sqrt();
                });
        }
    }

    /// Minibatch training. Samples are reshuffled every epoch with a ChaCha8
    /// stream seeded from the model seed. Returns the mean batch loss of
    /// every epoch.
    pub fn train(&mut self, x: ArrayView2<f64>, labels: &[usize], config: TrainConfig) -> Result<Vec<f64>, NnError> {
        if x.nrows() == 0 {
            return Err(NnError::EmptyTrainingData);
        }
        self.check_width(x.ncols())?;
        let n_out = *self.widths.last().unwrap();
        if let Some(&bad) = labels.iter().find(|&&y| y >= n_out) {
            return Err(NnError::InvalidLabel(bad));
        }
        let batch_size = config.batch_size.max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x005e_ed0f_ba7c);
        let mut order: Vec<usize> = (0..x.nrows()).collect();
        let mut curve = Vec::with_capacity(config.epochs);
        for _ in 0..config.epochs {
            order.shuffle(&mut rng);
            let mut epoch_loss = 0.0;
            let mut n_batches = 0;
            for chunk in order.chunks(batch_size) {
                let xb = x.select(Axis(0), chunk);
                let yb: Vec<usize> = chunk.iter().map(|&i| labels[i]).collect();
                let (loss, grads) = self.loss_and_gradients(xb.view(), &yb)?;
                self.adagrad_step(&grads);
                epoch_loss += loss;
                n_batches += 1;
            }
            curve.push(epoch_loss / n_batches as f64);
        }
        Ok(curve)
    }

    pub fn parameters_finite(&self) -> bool {
        self.weights.iter().all(|w| w.iter().all(|v| v.is_finite()))
            && self.biases.iter().all(|b| b.iter().all(|v| v.is_finite()))
    }
}
