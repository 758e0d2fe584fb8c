use std::fmt::Write as _;

use rand::Rng;

pub const INPUTS: usize = 9;
pub const HIDDEN: usize = 6;
pub const OUTPUTS: usize = 2;
pub const PARAM_COUNT: usize = HIDDEN * INPUTS + HIDDEN + OUTPUTS * HIDDEN + OUTPUTS;

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Fully connected 9-6-2 network: sigmoid hidden layer, linear outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct QNetwork {
    pub w1: [[f64; INPUTS]; HIDDEN],
    pub b1: [f64; HIDDEN],
    pub w2: [[f64; HIDDEN]; OUTPUTS],
    pub b2: [f64; OUTPUTS],
    /// Apply the sigmoid to the raw inputs before the first weight layer.
    pub input_sigmoid: bool,
}

/// Intermediate activations of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub input: [f64; INPUTS],
    pub hidden: [f64; HIDDEN],
    pub q: [f64; OUTPUTS],
}

impl QNetwork {
    pub fn zeros(input_sigmoid: bool) -> Self {
        QNetwork {
            w1: [[0.0; INPUTS]; HIDDEN],
            b1: [0.0; HIDDEN],
            w2: [[0.0; HIDDEN]; OUTPUTS],
            b2: [0.0; OUTPUTS],
            input_sigmoid,
        }
    }

    /// Weights uniform in `[-0.5, 0.5]`, biases zero.
    pub fn random<R: Rng + ?Sized>(input_sigmoid: bool, rng: &mut R) -> Self {
        let mut net = QNetwork::zeros(input_sigmoid);
        for row in net.w1.iter_mut() {
            for w in row.iter_mut() {
                *w = rng.random_range(-0.5..=0.5);
            }
        }
        for row in net.w2.iter_mut() {
            for w in row.iter_mut() {
                *w = rng.random_range(-0.5..=0.5);
            }
        }
        net
    }

    pub fn trace(&self, state: &[f64; INPUTS]) -> Trace {
        let input = if self.input_sigmoid { state.map(sigmoid) } else { *state };
        let mut hidden = [0.0; HIDDEN];
        for (j, h) in hidden.iter_mut().enumerate() {
            let z: f64 = self.b1[j] + self.w1[j].iter().zip(&input).map(|(w, x)| w * x).sum::<f64>();
            *h = sigmoid(z);
        }
        let mut q = [0.0; OUTPUTS];
        for (k, out) in q.iter_mut().enumerate() {
            *out = self.b2[k] + self.w2[k].iter().zip(&hidden).map(|(w, h)| w * h).sum::<f64>();
        }
        Trace { input, hidden, q }
    }

    pub fn forward(&self, state: &[f64; INPUTS]) -> [f64; OUTPUTS] {
        self.trace(state).q
    }

    /// Sum of squared weights (biases excluded).
    pub fn weight_norm_sq(&self) -> f64 {
        let a: f64 = self.w1.iter().flatten().map(|w| w * w).sum();
        let b: f64 = self.w2.iter().flatten().map(|w| w * w).sum();
        a + b
    }

    /// Parameters layer-major, row-major: w1, b1, w2, b2.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(PARAM_COUNT);
        v.extend(self.w1.iter().flatten());
        v.extend(&self.b1);
        v.extend(self.w2.iter().flatten());
        v.extend(&self.b2);
        v
    }

    pub fn from_flat(values: &[f64], input_sigmoid: bool) -> Option<Self> {
        if values.len() != PARAM_COUNT {
            return None;
        }
        let mut net = QNetwork::zeros(input_sigmoid);
        let mut it = values.iter().copied();
        for row in net.w1.iter_mut() {
            for w in row.iter_mut() {
                *w = it.next()?;
            }
        }
        for b in net.b1.iter_mut() {
            *b = it.next()?;
        }
        for row in net.w2.iter_mut() {
            for w in row.iter_mut() {
                *w = it.next()?;
            }
        }
        for b in net.b2.iter_mut() {
            *b = it.next()?;
        }
        Some(net)
    }

    /// One parameter per line, in [`QNetwork::to_flat`] order.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for v in self.to_flat() {
            let _ = writeln!(s, "{v}");
        }
        s
    }

    pub fn is_finite(&self) -> bool {
        self.to_flat().iter().all(|v| v.is_finite())
    }

    /// `self -= rate * grad`, parameter by parameter.
    pub fn apply_gradient(&mut self, grad: &QNetwork, rate: f64) {
        for (row, g) in self.w1.iter_mut().zip(&grad.w1) {
            for (w, d) in row.iter_mut().zip(g) {
                *w -= rate * d;
            }
        }
        for (b, d) in self.b1.iter_mut().zip(&grad.b1) {
            *b -= rate * d;
        }
        for (row, g) in self.w2.iter_mut().zip(&grad.w2) {
            for (w, d) in row.iter_mut().zip(g) {
                *w -= rate * d;
            }
        }
        for (b, d) in self.b2.iter_mut().zip(&grad.b2) {
            *b -= rate * d;
        }
    }
}

/// A training sample with its target already fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub state: [f64; INPUTS],
    pub action: usize,
    pub target: f64,
}

/// Mean squared error over the batch plus `l2 * ‖W‖²`.
pub fn minibatch_loss(net: &QNetwork, batch: &[Sample], l2: f64) -> f64 {
    if batch.is_empty() {
        return l2 * net.weight_norm_sq();
    }
    let mse: f64 = batch
        .iter()
        .map(|s| {
            let e = s.target - net.forward(&s.state)[s.action];
            e * e
        })
        .sum::<f64>()
        / batch.len() as f64;
    mse + l2 * net.weight_norm_sq()
}

/// Analytic gradient of [`minibatch_loss`] by backpropagation, returned in
/// the shape of the network.
pub fn minibatch_gradient(net: &QNetwork, batch: &[Sample], l2: f64) -> QNetwork {
    let mut g = QNetwork::zeros(net.input_sigmoid);
    let scale = if batch.is_empty() { 0.0 } else { 1.0 / batch.len() as f64 };
    for s in batch {
        let t = net.trace(&s.state);
        let a = s.action;
        let dq = -2.0 * (s.target - t.q[a]) * scale;
        g.b2[a] += dq;
        for j in 0..HIDDEN {
            g.w2[a][j] += dq * t.hidden[j];
            let dz = dq * net.w2[a][j] * t.hidden[j] * (1.0 - t.hidden[j]);
            g.b1[j] += dz;
            for i in 0..INPUTS {
                g.w1[j][i] += dz * t.input[i];
            }
        }
    }
    for (row, w) in g.w1.iter_mut().zip(&net.w1) {
        for (d, w) in row.iter_mut().zip(w) {
            *d += 2.0 * l2 * w;
        }
    }
    for (row, w) in g.w2.iter_mut().zip(&net.w2) {
        for (d, w) in row.iter_mut().zip(w) {
            *d += 2.0 * l2 * w;
        }
    }
    g
}
