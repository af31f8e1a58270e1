//! Small fully-connected classifiers with exact backpropagation.
//!
//! Parameters are stored flat. For every dense layer, in order from the
//! input, the weight matrix comes first (row-major, `fan_out × fan_in`)
//! followed by the `fan_out` biases. [`EnnNet`] prepends its shared
//! equivariant layer in the same layout.

use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classifier::{Classifier, Prediction};
use crate::datasets::Point2;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};
use crate::symmetry::PointTransform;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Tanh,
    Sigmoid,
    Relu,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            Activation::Relu => z.max(0.0),
        }
    }

    /// Derivative expressed through the pre-activation `z` and output `a`.
    fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - a * a,
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Sigmoid => "sigmoid",
            Activation::Relu => "relu",
        }
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tanh" => Ok(Activation::Tanh),
            "sigmoid" => Ok(Activation::Sigmoid),
            "relu" => Ok(Activation::Relu),
            other => Err(Error::Parse(format!("unknown activation '{other}'"))),
        }
    }
}

/// Number of weights and biases of a dense stack with these layer sizes.
pub fn dense_param_count(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

/// A single output unit is the class-1 logit against a class-0 logit fixed
/// at zero, so the softmax reduces to the logistic sigmoid.
fn logit_pair(logits: &[f64]) -> [f64; 2] {
    match logits {
        [z] => [0.0, *z],
        [z0, z1] => [*z0, *z1],
        _ => unreachable!("one or two output units"),
    }
}

fn softmax2(logits: &[f64]) -> [f64; 2] {
    let [l0, l1] = logit_pair(logits);
    let m = l0.max(l1);
    let e0 = (l0 - m).exp();
    let e1 = (l1 - m).exp();
    let s = e0 + e1;
    [e0 / s, e1 / s]
}

/// `−log p_y` computed from logits via log-sum-exp.
fn bce_from_logits(logits: &[f64], y: u8) -> f64 {
    let l = logit_pair(logits);
    let m = l[0].max(l[1]);
    let lse = m + ((l[0] - m).exp() + (l[1] - m).exp()).ln();
    lse - l[usize::from(y)]
}

/// `dL/d(logits)` of the cross-entropy: `p − onehot(y)` per output unit.
fn output_delta(logits: &[f64], y: u8) -> Vec<f64> {
    let probs = softmax2(logits);
    let d = [probs[0] - f64::from(1 - y), probs[1] - f64::from(y)];
    if logits.len() == 1 {
        vec![d[1]]
    } else {
        d.to_vec()
    }
}

/// Activations of a dense stack; the last layer is linear (softmax is
/// applied by the caller).
struct DenseTrace {
    /// `acts[0]` is the input, `acts[l + 1]` the output of layer `l`.
    acts: Vec<Vec<f64>>,
    pre: Vec<Vec<f64>>,
}

fn dense_forward(sizes: &[usize], params: &[f64], act: Activation, input: &[f64]) -> DenseTrace {
    let n_layers = sizes.len() - 1;
    let mut acts = Vec::with_capacity(n_layers + 1);
    let mut pre = Vec::with_capacity(n_layers);
    acts.push(input.to_vec());
    let mut offset = 0;
    for l in 0..n_layers {
        let (fan_in, fan_out) = (sizes[l], sizes[l + 1]);
        let w = &params[offset..offset + fan_in * fan_out];
        let b = &params[offset + fan_in * fan_out..offset + fan_in * fan_out + fan_out];
        offset += fan_in * fan_out + fan_out;
        let x = &acts[l];
        let z: Vec<f64> = (0..fan_out)
            .map(|o| b[o] + (0..fan_in).map(|i| w[o * fan_in + i] * x[i]).sum::<f64>())
            .collect();
        let a = if l + 1 == n_layers {
            z.clone()
        } else {
            z.iter().map(|&v| act.apply(v)).collect()
        };
        pre.push(z);
        acts.push(a);
    }
    DenseTrace { acts, pre }
}

/// Accumulates parameter gradients into `grad` given `dL/d(output)` of the
/// last (linear) layer, and returns `dL/d(input)`.
fn dense_backward(
    sizes: &[usize],
    params: &[f64],
    act: Activation,
    trace: &DenseTrace,
    d_out: &[f64],
    grad: &mut [f64],
) -> Vec<f64> {
    let n_layers = sizes.len() - 1;
    let mut offsets = Vec::with_capacity(n_layers);
    let mut off = 0;
    for l in 0..n_layers {
        offsets.push(off);
        off += sizes[l] * sizes[l + 1] + sizes[l + 1];
    }
    let mut delta = d_out.to_vec();
    for l in (0..n_layers).rev() {
        let (fan_in, fan_out) = (sizes[l], sizes[l + 1]);
        let off = offsets[l];
        let x = &trace.acts[l];
        for o in 0..fan_out {
            for i in 0..fan_in {
                grad[off + o * fan_in + i] += delta[o] * x[i];
            }
            grad[off + fan_in * fan_out + o] += delta[o];
        }
        let w = &params[off..off + fan_in * fan_out];
        let mut d_in: Vec<f64> = (0..fan_in)
            .map(|i| (0..fan_out).map(|o| w[o * fan_in + i] * delta[o]).sum())
            .collect();
        if l > 0 {
            for (i, d) in d_in.iter_mut().enumerate() {
                *d *= act.derivative(trace.pre[l - 1][i], trace.acts[l][i]);
            }
        }
        delta = d_in;
    }
    delta
}

fn init_dense(sizes: &[usize], rng: &mut impl Rng, out: &mut Vec<f64>) {
    for w in sizes.windows(2) {
        let bound = 1.0 / (w[0] as f64).sqrt();
        for _ in 0..w[0] * w[1] + w[1] {
            out.push(rng.random_range(-bound..=bound));
        }
    }
}

/// Feed-forward net: `2 → hidden… → 2`, hidden activation configurable,
/// softmax output. A final layer of width 1 gives the logistic head
/// `p₁ = σ(z)`, i.e. the two-way softmax with the class-0 logit pinned at 0.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseNet {
    layer_sizes: Vec<usize>,
    activation: Activation,
    params: Vec<f64>,
}

impl DenseNet {
    pub fn new(layer_sizes: Vec<usize>, activation: Activation, seed: u64) -> Result<Self> {
        let mut rng = stream_rng(seed, Stream::Init);
        Self::validate_sizes(&layer_sizes)?;
        let mut params = Vec::with_capacity(dense_param_count(&layer_sizes));
        init_dense(&layer_sizes, &mut rng, &mut params);
        Ok(DenseNet {
            layer_sizes,
            activation,
            params,
        })
    }

    pub fn with_params(
        layer_sizes: Vec<usize>,
        activation: Activation,
        params: Vec<f64>,
    ) -> Result<Self> {
        Self::validate_sizes(&layer_sizes)?;
        let n = dense_param_count(&layer_sizes);
        if params.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: params.len(),
            });
        }
        Ok(DenseNet {
            layer_sizes,
            activation,
            params,
        })
    }

    fn validate_sizes(sizes: &[usize]) -> Result<()> {
        if sizes.len() < 2 || sizes.first() != Some(&2) || !matches!(sizes.last(), Some(1 | 2)) {
            return Err(Error::Config(format!(
                "dense net must map 2 inputs to 1 or 2 outputs, got sizes {sizes:?}"
            )));
        }
        if sizes.contains(&0) {
            return Err(Error::Config("layer widths must be positive".into()));
        }
        Ok(())
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn hidden_widths(&self) -> &[usize] {
        &self.layer_sizes[1..self.layer_sizes.len() - 1]
    }

    pub fn param_count(&self) -> usize {
        dense_param_count(&self.layer_sizes)
    }

    /// Class probabilities `(p₀, p₁)`.
    pub fn forward(&self, p: Point2) -> [f64; 2] {
        let trace = dense_forward(
            &self.layer_sizes,
            &self.params,
            self.activation,
            &[p.x1, p.x2],
        );
        softmax2(trace.acts.last().unwrap())
    }

    /// Gradient of `−log p_y` in the flat parameter order.
    pub fn backward(&self, p: Point2, y: u8) -> Vec<f64> {
        self.loss_and_gradient_impl(p, y).1
    }

    fn loss_and_gradient_impl(&self, p: Point2, y: u8) -> (f64, Vec<f64>) {
        let trace = dense_forward(
            &self.layer_sizes,
            &self.params,
            self.activation,
            &[p.x1, p.x2],
        );
        let logits = trace.acts.last().unwrap();
        let d_out = output_delta(logits, y);
        let mut grad = vec![0.0; self.params.len()];
        dense_backward(
            &self.layer_sizes,
            &self.params,
            self.activation,
            &trace,
            &d_out,
            &mut grad,
        );
        (bce_from_logits(logits, y), grad)
    }
}

impl Classifier for DenseNet {
    fn params(&self) -> &[f64] {
        &self.params
    }

    fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn loss(&self, p: Point2, y: u8) -> f64 {
        let trace = dense_forward(
            &self.layer_sizes,
            &self.params,
            self.activation,
            &[p.x1, p.x2],
        );
        bce_from_logits(trace.acts.last().unwrap(), y)
    }

    fn loss_and_gradient(&self, p: Point2, y: u8) -> (f64, Vec<f64>) {
        self.loss_and_gradient_impl(p, y)
    }

    fn predict(&self, p: Point2) -> Prediction {
        let [_, p1] = self.forward(p);
        Prediction {
            class: u8::from(p1 > 0.5),
            score: p1,
        }
    }

    fn describe(&self) -> String {
        let sizes: Vec<String> = self.layer_sizes.iter().map(|s| s.to_string()).collect();
        format!(
            "DNN layers={} activation={}",
            sizes.join("-"),
            self.activation.as_str()
        )
    }
}

/// Which group images an [`EnnNet`] averages over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orbit {
    /// All four Z₂×Z₂ images.
    Full,
    /// Identity and the diagonal swap only.
    DiagSwap,
}

impl Orbit {
    pub fn transforms(self) -> &'static [PointTransform] {
        const FULL: [PointTransform; 4] = [
            PointTransform::Identity,
            PointTransform::DiagSwap,
            PointTransform::AntiDiagNegSwap,
            PointTransform::Both,
        ];
        const SWAP: [PointTransform; 2] = [PointTransform::Identity, PointTransform::DiagSwap];
        match self {
            Orbit::Full => &FULL,
            Orbit::DiagSwap => &SWAP,
        }
    }

    pub fn images(self, p: Point2) -> Vec<Point2> {
        self.transforms().iter().map(|t| t.apply(p)).collect()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Orbit::Full => "full",
            Orbit::DiagSwap => "diag-swap",
        }
    }
}

/// Orbit-averaged invariant network: a shared `2 → k` layer is applied to
/// every group image of the input, the activations are mean-pooled, and a
/// dense head `k → hidden… → 2` with softmax produces the probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct EnnNet {
    orbit: Orbit,
    equivariant_width: usize,
    head_sizes: Vec<usize>,
    activation: Activation,
    params: Vec<f64>,
}

struct OrbitEncoding {
    images: Vec<Point2>,
    pre: Vec<Vec<f64>>,
    acts: Vec<Vec<f64>>,
    pooled: Vec<f64>,
}

impl EnnNet {
    pub fn new(
        orbit: Orbit,
        equivariant_width: usize,
        head_hidden: &[usize],
        activation: Activation,
        seed: u64,
    ) -> Result<Self> {
        let head_sizes = Self::head_sizes(equivariant_width, head_hidden)?;
        let mut rng = stream_rng(seed, Stream::Init);
        let mut params = Vec::new();
        init_dense(&[2, equivariant_width], &mut rng, &mut params);
        init_dense(&head_sizes, &mut rng, &mut params);
        Ok(EnnNet {
            orbit,
            equivariant_width,
            head_sizes,
            activation,
            params,
        })
    }

    pub fn with_params(
        orbit: Orbit,
        equivariant_width: usize,
        head_hidden: &[usize],
        activation: Activation,
        params: Vec<f64>,
    ) -> Result<Self> {
        let head_sizes = Self::head_sizes(equivariant_width, head_hidden)?;
        let n = Self::count(equivariant_width, &head_sizes);
        if params.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: params.len(),
            });
        }
        Ok(EnnNet {
            orbit,
            equivariant_width,
            head_sizes,
            activation,
            params,
        })
    }

    fn head_sizes(equivariant_width: usize, head_hidden: &[usize]) -> Result<Vec<usize>> {
        if equivariant_width == 0 || head_hidden.contains(&0) {
            return Err(Error::Config("layer widths must be positive".into()));
        }
        let mut sizes = vec![equivariant_width];
        sizes.extend_from_slice(head_hidden);
        sizes.push(2);
        Ok(sizes)
    }

    fn count(equivariant_width: usize, head_sizes: &[usize]) -> usize {
        dense_param_count(&[2, equivariant_width]) + dense_param_count(head_sizes)
    }

    pub fn param_count(&self) -> usize {
        Self::count(self.equivariant_width, &self.head_sizes)
    }

    pub fn orbit(&self) -> Orbit {
        self.orbit
    }

    fn split(&self) -> (&[f64], &[f64]) {
        self.params
            .split_at(dense_param_count(&[2, self.equivariant_width]))
    }

    /// Per-image pre-activations and activations of the equivariant layer,
    /// and their orbit mean.
    fn encode(&self, p: Point2) -> OrbitEncoding {
        let (eq, _) = self.split();
        let k = self.equivariant_width;
        let images = self.orbit.images(p);
        let mut pre = Vec::with_capacity(images.len());
        let mut acts = Vec::with_capacity(images.len());
        let mut pooled = vec![0.0; k];
        for q in &images {
            let z: Vec<f64> = (0..k)
                .map(|o| eq[2 * o] * q.x1 + eq[2 * o + 1] * q.x2 + eq[2 * k + o])
                .collect();
            let a: Vec<f64> = z.iter().map(|&v| self.activation.apply(v)).collect();
            for (acc, v) in pooled.iter_mut().zip(&a) {
                *acc += v;
            }
            pre.push(z);
            acts.push(a);
        }
        let n = images.len() as f64;
        pooled.iter_mut().for_each(|v| *v /= n);
        OrbitEncoding {
            images,
            pre,
            acts,
            pooled,
        }
    }

    fn head_input_trace(&self, pooled: &[f64]) -> DenseTrace {
        let (_, head) = self.split();
        // The pooled features are already activated; the head applies its
        // own activation between its layers.
        dense_forward(&self.head_sizes, head, self.activation, pooled)
    }

    pub fn forward(&self, p: Point2) -> [f64; 2] {
        let pooled = self.encode(p).pooled;
        softmax2(self.head_input_trace(&pooled).acts.last().unwrap())
    }

    pub fn backward(&self, p: Point2, y: u8) -> Vec<f64> {
        self.loss_and_gradient_impl(p, y).1
    }

    fn loss_and_gradient_impl(&self, p: Point2, y: u8) -> (f64, Vec<f64>) {
        let OrbitEncoding {
            images,
            pre,
            acts,
            pooled,
        } = self.encode(p);
        let trace = self.head_input_trace(&pooled);
        let logits = trace.acts.last().unwrap();
        let d_out = output_delta(logits, y);

        let k = self.equivariant_width;
        let n_eq = dense_param_count(&[2, k]);
        let mut grad = vec![0.0; self.params.len()];
        let (_, head) = self.split();
        let d_pooled = dense_backward(
            &self.head_sizes,
            head,
            self.activation,
            &trace,
            &d_out,
            &mut grad[n_eq..],
        );
        let n = images.len() as f64;
        for ((q, z), a) in images.iter().zip(&pre).zip(&acts) {
            for o in 0..k {
                let dz = d_pooled[o] / n * self.activation.derivative(z[o], a[o]);
                grad[2 * o] += dz * q.x1;
                grad[2 * o + 1] += dz * q.x2;
                grad[2 * k + o] += dz;
            }
        }
        (bce_from_logits(logits, y), grad)
    }
}

impl Classifier for EnnNet {
    fn params(&self) -> &[f64] {
        &self.params
    }

    fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn loss(&self, p: Point2, y: u8) -> f64 {
        let pooled = self.encode(p).pooled;
        bce_from_logits(self.head_input_trace(&pooled).acts.last().unwrap(), y)
    }

    fn loss_and_gradient(&self, p: Point2, y: u8) -> (f64, Vec<f64>) {
        self.loss_and_gradient_impl(p, y)
    }

    fn predict(&self, p: Point2) -> Prediction {
        let [_, p1] = self.forward(p);
        Prediction {
            class: u8::from(p1 > 0.5),
            score: p1,
        }
    }

    fn describe(&self) -> String {
        let head: Vec<String> = self.head_sizes.iter().map(|s| s.to_string()).collect();
        format!(
            "ENN orbit={} equivariant=2-{} head={} activation={}",
            self.orbit.as_str(),
            self.equivariant_width,
            head.join("-"),
            self.activation.as_str()
        )
    }
}

/// Preference order among candidate width vectors with the same count:
/// smaller spread between widest and narrowest layer first, then wider
/// earlier layers.
fn better_shape(a: &[usize], b: &[usize]) -> bool {
    let spread = |w: &[usize]| w.iter().max().unwrap() - w.iter().min().unwrap();
    match spread(a).cmp(&spread(b)) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => a > b,
    }
}

/// Hidden widths for a `2 → … → 2` net whose parameter count equals
/// `target` when possible, else is the largest count below it.
pub fn dnn_widths_for_budget(target: usize, hidden_layers: usize) -> Result<Vec<usize>> {
    if hidden_layers == 0 {
        return Err(Error::Config(
            "at least one hidden layer is required".into(),
        ));
    }
    let min_sizes: Vec<usize> = std::iter::once(2)
        .chain(std::iter::repeat_n(1, hidden_layers))
        .chain(std::iter::once(2))
        .collect();
    let min = dense_param_count(&min_sizes);
    if target < min {
        return Err(Error::BudgetTooSmall { target, min });
    }

    struct Search {
        target: usize,
        layers: usize,
        best: Option<(usize, Vec<usize>)>,
    }

    impl Search {
        // `cost` covers every layer feeding the widths in `prefix`.
        fn visit(&mut self, prefix: &mut Vec<usize>, cost: usize) {
            let prev = *prefix.last().unwrap_or(&2);
            if prefix.len() + 1 == self.layers {
                // Last hidden layer: count is linear in its width.
                let per_unit = prev + 1 + 2;
                if cost + per_unit + 2 > self.target {
                    return;
                }
                let w = (self.target - cost - 2) / per_unit;
                let count = cost + per_unit * w + 2;
                prefix.push(w);
                let replace = match &self.best {
                    None => true,
                    Some((c, widths)) => {
                        count > *c || (count == *c && better_shape(prefix, widths))
                    }
                };
                if replace {
                    self.best = Some((count, prefix.clone()));
                }
                prefix.pop();
                return;
            }
            let remaining = self.layers - prefix.len() - 1;
            let mut w = 1;
            loop {
                let layer_cost = (prev + 1) * w;
                // Cheapest completion: every later hidden layer of width 1,
                // then the 2-unit output layer.
                let tail = (w + 1) + 2 * (remaining - 1) + 4;
                if cost + layer_cost + tail > self.target {
                    break;
                }
                prefix.push(w);
                self.visit(prefix, cost + layer_cost);
                prefix.pop();
                w += 1;
            }
        }
    }

    let mut search = Search {
        target,
        layers: hidden_layers,
        best: None,
    };
    search.visit(&mut Vec::new(), 0);
    search
        .best
        .map(|(_, w)| w)
        .ok_or(Error::BudgetTooSmall { target, min })
}

/// Builds the [`DenseNet`] chosen by [`dnn_widths_for_budget`].
pub fn make_dnn_with_param_budget(
    target: usize,
    hidden_layers: usize,
    activation: Activation,
    seed: u64,
) -> Result<DenseNet> {
    let widths = dnn_widths_for_budget(target, hidden_layers)?;
    let mut sizes = vec![2];
    sizes.extend(widths);
    sizes.push(2);
    DenseNet::new(sizes, activation, seed)
}

/// Largest width `n` such that `2 → n → … → n → 1` (`hidden_layers` equal
/// hidden layers, logistic head) has at most `target` parameters. Two
/// layers give `n² + 5n + 1`: 37, 51, 67, 85, 105 for `n = 4..=8`.
pub fn equal_width_for_budget(target: usize, hidden_layers: usize) -> Result<usize> {
    if hidden_layers == 0 {
        return Err(Error::Config(
            "at least one hidden layer is required".into(),
        ));
    }
    let count = |n: usize| {
        let mut sizes = vec![2];
        sizes.extend(std::iter::repeat_n(n, hidden_layers));
        sizes.push(1);
        dense_param_count(&sizes)
    };
    if target < count(1) {
        return Err(Error::BudgetTooSmall {
            target,
            min: count(1),
        });
    }
    let mut n = 1;
    while count(n + 1) <= target {
        n += 1;
    }
    Ok(n)
}

/// `(equivariant width, head width)` for a one-hidden-layer-head ENN whose
/// count is closest to `target` from below.
pub fn enn_widths_for_budget(target: usize) -> Result<(usize, usize)> {
    let count = |k: usize, h: usize| dense_param_count(&[2, k]) + dense_param_count(&[k, h, 2]);
    let min = count(1, 1);
    if target < min {
        return Err(Error::BudgetTooSmall { target, min });
    }
    let mut best: Option<(usize, [usize; 2])> = None;
    let mut k = 1;
    while count(k, 1) <= target {
        // count(k, h) = 3k + (k + 3)h + 2
        let h = (target - 3 * k - 2) / (k + 3);
        let c = count(k, h);
        let cand = [k, h];
        let replace = match &best {
            None => true,
            Some((bc, bw)) => c > *bc || (c == *bc && better_shape(&cand, bw)),
        };
        if replace {
            best = Some((c, cand));
        }
        k += 1;
    }
    let (_, [k, h]) = best.expect("min budget checked");
    Ok((k, h))
}
