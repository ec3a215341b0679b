//! Small dense networks with hand-written reverse-mode gradients and Adam.
//!
//! Parameters live in one flat vector, layer by layer: the row-major
//! `outputs x inputs` weight matrix followed by the bias vector.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Identity,
    Tanh,
    Relu,
}

impl Activation {
    fn apply<T: Real>(self, x: T) -> T {
        match self {
            Activation::Identity => x,
            Activation::Tanh => fast_tanh(x),
            Activation::Relu => x.max(T::zero()),
        }
    }

    /// Derivative expressed through the activation's output.
    fn derivative_from_output<T: Real>(self, y: T) -> T {
        match self {
            Activation::Identity => T::one(),
            Activation::Tanh => T::one() - y * y,
            Activation::Relu => {
                if y > T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
        }
    }
}

/// `tanh` through a single `exp`; absolute error stays at rounding level.
#[inline]
fn fast_tanh<T: Real>(x: T) -> T {
    let limit = T::lit(20.0);
    if x > limit {
        return T::one();
    }
    if x < -limit {
        return -T::one();
    }
    let e = (x + x).exp();
    (e - T::one()) / (e + T::one())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerShape {
    pub inputs: usize,
    pub outputs: usize,
    pub activation: Activation,
}

impl LayerShape {
    fn n_params(&self) -> usize {
        self.outputs * (self.inputs + 1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseNet<T> {
    layers: Vec<LayerShape>,
    params: Vec<T>,
}

impl<T: Real> DenseNet<T> {
    /// Network with the given layer widths; hidden layers use `hidden`, the
    /// output layer is linear. Weights start uniform in `±1/sqrt(fan_in)`.
    pub fn new<R: Rng + ?Sized>(widths: &[usize], hidden: Activation, rng: &mut R) -> Self {
        assert!(widths.len() >= 2, "a network needs an input and an output width");
        let layers: Vec<LayerShape> = widths
            .windows(2)
            .enumerate()
            .map(|(i, w)| LayerShape {
                inputs: w[0],
                outputs: w[1],
                activation: if i + 2 == widths.len() {
                    Activation::Identity
                } else {
                    hidden
                },
            })
            .collect();
        let mut params = Vec::with_capacity(layers.iter().map(LayerShape::n_params).sum());
        for l in &layers {
            let bound = 1.0 / (l.inputs as f64).sqrt();
            for _ in 0..l.n_params() {
                params.push(T::lit(rng.random_range(-bound..bound)));
            }
        }
        Self { layers, params }
    }

    /// Two hidden layers of `hidden` units with tanh.
    pub fn mlp<R: Rng + ?Sized>(inputs: usize, hidden: usize, outputs: usize, rng: &mut R) -> Self {
        Self::new(&[inputs, hidden, hidden, outputs], Activation::Tanh, rng)
    }

    pub fn from_parts(layers: Vec<LayerShape>, params: Vec<T>) -> Result<Self> {
        for w in layers.windows(2) {
            if w[0].outputs != w[1].inputs {
                return Err(Error::DimensionMismatch {
                    expected: w[0].outputs,
                    got: w[1].inputs,
                });
            }
        }
        let expected: usize = layers.iter().map(LayerShape::n_params).sum();
        if params.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: params.len(),
            });
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter("non-finite network parameter".into()));
        }
        Ok(Self { layers, params })
    }

    /// Same network with parameters converted to another scalar type.
    pub fn cast<U: Real>(&self) -> DenseNet<U> {
        DenseNet {
            layers: self.layers.clone(),
            params: self.params.iter().map(|p| U::lit(p.as_f64())).collect(),
        }
    }

    pub fn layers(&self) -> &[LayerShape] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].outputs
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [T] {
        &mut self.params
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    /// Zeroes the output layer so the network starts at exactly zero.
    pub fn zero_output_layer(&mut self) {
        let last = self.layers[self.layers.len() - 1];
        let start = self.params.len() - last.n_params();
        self.params[start..].iter_mut().for_each(|p| *p = T::zero());
    }

    fn offsets(&self) -> Vec<usize> {
        self.layers
            .iter()
            .scan(0, |acc, l| {
                let o = *acc;
                *acc += l.n_params();
                Some(o)
            })
            .collect()
    }

    fn flatten_inputs(&self, inputs: &[Vec<T>]) -> Result<Vec<T>> {
        let d = self.input_dim();
        let mut flat = Vec::with_capacity(inputs.len() * d);
        for x in inputs {
            if x.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: x.len(),
                });
            }
            flat.extend_from_slice(x);
        }
        Ok(flat)
    }

    /// Row-major `rows x width` activations of every layer, the first entry
    /// being the input batch itself.
    fn activations(&self, flat_inputs: Vec<T>, rows: usize) -> Vec<Vec<T>> {
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(flat_inputs);
        let mut offset = 0;
        for l in &self.layers {
            let x = &acts[acts.len() - 1];
            let nw = l.outputs * l.inputs;
            let w = &self.params[offset..offset + nw];
            let b = &self.params[offset + nw..offset + l.n_params()];
            let mut y = vec![T::zero(); rows * l.outputs];
            for row in y.chunks_exact_mut(l.outputs) {
                row.copy_from_slice(b);
            }
            // Y = X W^T + 1 b^T
            T::gemm(
                rows,
                l.inputs,
                l.outputs,
                T::one(),
                (x, l.inputs as isize, 1),
                (w, 1, l.inputs as isize),
                T::one(),
                (&mut y, l.outputs as isize, 1),
            );
            if l.activation != Activation::Identity {
                y.iter_mut().for_each(|v| *v = l.activation.apply(*v));
            }
            offset += l.n_params();
            acts.push(y);
        }
        acts
    }

    pub fn forward(&self, input: &[T]) -> Result<Vec<T>> {
        if input.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: input.len(),
            });
        }
        Ok(self.activations(input.to_vec(), 1).pop().expect("at least one layer"))
    }

    /// Evaluates a batch of inputs at once.
    pub fn forward_batch(&self, inputs: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
        let flat = self.flatten_inputs(inputs)?;
        let out = self.activations(flat, inputs.len()).pop().expect("at least one layer");
        Ok(split_rows(&out, self.output_dim()))
    }

    /// `self <- tau * source + (1 - tau) * self`.
    pub fn polyak_from(&mut self, source: &DenseNet<T>, tau: T) {
        let keep = T::one() - tau;
        for (t, s) in self.params.iter_mut().zip(&source.params) {
            *t = tau * *s + keep * *t;
        }
    }
}

fn split_rows<T: Clone>(flat: &[T], width: usize) -> Vec<Vec<T>> {
    if width == 0 {
        return Vec::new();
    }
    flat.chunks(width).map(<[T]>::to_vec).collect()
}

/// Gradients of a scalar loss with respect to parameters and to each recorded input.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients<T> {
    pub params: Vec<T>,
    pub inputs: Vec<Vec<T>>,
}

#[derive(Clone, Debug)]
struct Record<T> {
    rows: usize,
    acts: Vec<Vec<T>>,
}

/// Records forward passes of one network so a loss can be back-propagated.
#[derive(Clone, Debug, Default)]
pub struct GradTape<T> {
    records: Vec<Record<T>>,
}

impl<T: Real> GradTape<T> {
    pub fn new() -> Self {
        Self { records: Vec::new() }
    }

    /// Number of recorded samples.
    pub fn len(&self) -> usize {
        self.records.iter().map(|r| r.rows).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Runs the network on `input`, keeps the intermediate values and returns the output.
    pub fn record(&mut self, net: &DenseNet<T>, input: &[T]) -> Result<Vec<T>> {
        let mut out = self.record_batch(net, &[input.to_vec()])?;
        Ok(out.pop().expect("one row"))
    }

    /// Batched [`GradTape::record`]; samples keep their order for the seeds of `backward`.
    pub fn record_batch(&mut self, net: &DenseNet<T>, inputs: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
        let flat = net.flatten_inputs(inputs)?;
        let acts = net.activations(flat, inputs.len());
        let out = split_rows(&acts[acts.len() - 1], net.output_dim());
        self.records.push(Record {
            rows: inputs.len(),
            acts,
        });
        Ok(out)
    }

    /// Back-propagates `dL/d(output)` for every recorded sample (one seed per
    /// sample, in recording order) and sums the parameter gradients.
    pub fn backward(&self, net: &DenseNet<T>, seeds: &[Vec<T>]) -> Result<Gradients<T>> {
        if self.records.is_empty() {
            return Err(Error::NoForwardPass);
        }
        if seeds.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: seeds.len(),
            });
        }
        let mut grads = vec![T::zero(); net.n_params()];
        let mut input_grads = Vec::with_capacity(seeds.len());
        let offsets = net.offsets();
        let out_dim = net.output_dim();

        let mut next_seed = 0;
        for rec in &self.records {
            let b = rec.rows;
            let mut delta = Vec::with_capacity(b * out_dim);
            for seed in &seeds[next_seed..next_seed + b] {
                if seed.len() != out_dim {
                    return Err(Error::DimensionMismatch {
                        expected: out_dim,
                        got: seed.len(),
                    });
                }
                delta.extend_from_slice(seed);
            }
            next_seed += b;

            for (li, l) in net.layers.iter().enumerate().rev() {
                if l.activation != Activation::Identity {
                    for (d, y) in delta.iter_mut().zip(&rec.acts[li + 1]) {
                        *d = *d * l.activation.derivative_from_output(*y);
                    }
                }
                let x = &rec.acts[li];
                let off = offsets[li];
                let nw = l.outputs * l.inputs;
                let (gw, gb) = grads[off..off + l.n_params()].split_at_mut(nw);
                // dW += delta^T X
                T::gemm(
                    l.outputs,
                    b,
                    l.inputs,
                    T::one(),
                    (&delta, 1, l.outputs as isize),
                    (x, l.inputs as isize, 1),
                    T::one(),
                    (gw, l.inputs as isize, 1),
                );
                for row in delta.chunks(l.outputs) {
                    for (g, d) in gb.iter_mut().zip(row) {
                        *g = *g + *d;
                    }
                }
                // dX = delta W
                let mut prev = vec![T::zero(); b * l.inputs];
                T::gemm(
                    b,
                    l.outputs,
                    l.inputs,
                    T::one(),
                    (&delta, l.outputs as isize, 1),
                    (&net.params[off..off + nw], l.inputs as isize, 1),
                    T::zero(),
                    (&mut prev, l.inputs as isize, 1),
                );
                delta = prev;
            }
            input_grads.extend(split_rows(&delta, net.input_dim()));
        }
        Ok(Gradients {
            params: grads,
            inputs: input_grads,
        })
    }
}

/// Adaptive moment estimation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Adam<T> {
    pub lr: T,
    pub beta1: T,
    pub beta2: T,
    pub eps: T,
    m: Vec<T>,
    v: Vec<T>,
    t: i32,
}

impl<T: Real> Adam<T> {
    pub fn new(n_params: usize, lr: T) -> Self {
        Self {
            lr,
            beta1: T::lit(0.9),
            beta2: T::lit(0.999),
            eps: T::lit(1e-8),
            m: vec![T::zero(); n_params],
            v: vec![T::zero(); n_params],
            t: 0,
        }
    }

    /// Descends along `grads`.
    pub fn step(&mut self, params: &mut [T], grads: &[T]) {
        debug_assert_eq!(params.len(), self.m.len());
        self.t += 1;
        let one = T::one();
        let c1 = one - self.beta1.powi(self.t);
        let c2 = one - self.beta2.powi(self.t);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = self.beta1 * self.m[i] + (one - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (one - self.beta2) * g * g;
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] = params[i] - self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_output_layer_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut net = DenseNet::<f64>::mlp(5, 16, 3, &mut rng);
        net.zero_output_layer();
        for k in 0..10 {
            let x: Vec<f64> = (0..5).map(|i| (i * k) as f64 * 0.37 - 1.0).collect();
            assert_eq!(net.forward(&x).unwrap(), vec![0.0; 3]);
        }
    }

    #[test]
    fn identity_layer_returns_activation() {
        let layers = vec![LayerShape {
            inputs: 3,
            outputs: 3,
            activation: Activation::Tanh,
        }];
        let params = vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
        let net = DenseNet::from_parts(layers, params).unwrap();
        let x = [0.3f64, -1.2, 2.0];
        let y = net.forward(&x).unwrap();
        for (a, b) in y.iter().zip(x) {
            assert!((*a - b.tanh()).abs() < 1e-15);
        }
    }

    #[test]
    fn fast_tanh_tracks_libm() {
        for i in -4000..=4000 {
            let x = i as f64 * 0.01;
            assert!((fast_tanh(x) - x.tanh()).abs() < 1e-15, "{x}");
        }
        assert_eq!(fast_tanh(50.0f64), 1.0);
        assert!((fast_tanh(0.3f32) - 0.3f32.tanh()).abs() < 1e-6);
    }

    #[test]
    fn dimension_mismatch() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let net = DenseNet::<f64>::mlp(4, 8, 2, &mut rng);
        assert!(net.forward(&[1.0; 3]).is_err());
    }

    #[test]
    fn backward_without_forward_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let net = DenseNet::<f64>::mlp(4, 8, 2, &mut rng);
        let tape = GradTape::new();
        assert!(matches!(tape.backward(&net, &[]), Err(Error::NoForwardPass)));
    }

    #[test]
    fn linear_squared_loss_gradient() {
        // y = w.x + b, L = (y - t)^2 => dL/dw = 2 err x, dL/db = 2 err.
        let layers = vec![LayerShape {
            inputs: 2,
            outputs: 1,
            activation: Activation::Identity,
        }];
        let net = DenseNet::from_parts(layers, vec![0.5, -1.0, 0.25]).unwrap();
        let x = [2.0, 3.0];
        let target = 1.0;
        let mut tape = GradTape::new();
        let y = tape.record(&net, &x).unwrap()[0];
        let err = y - target;
        let g = tape.backward(&net, &[vec![2.0 * err]]).unwrap();
        assert_eq!(g.params, vec![2.0 * err * 2.0, 2.0 * err * 3.0, 2.0 * err]);
        assert_eq!(g.inputs[0], vec![2.0 * err * 0.5, -2.0 * err]);
    }

    #[test]
    fn constant_loss_has_zero_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let net = DenseNet::<f64>::mlp(3, 8, 2, &mut rng);
        let mut tape = GradTape::new();
        tape.record(&net, &[0.1, 0.2, 0.3]).unwrap();
        let g = tape.backward(&net, &[vec![0.0, 0.0]]).unwrap();
        assert!(g.params.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn polyak_boundaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = DenseNet::<f64>::mlp(3, 8, 2, &mut rng);
        let mut b = DenseNet::<f64>::mlp(3, 8, 2, &mut rng);
        let before = b.clone();
        b.polyak_from(&a, 0.0);
        assert_eq!(b, before);
        b.polyak_from(&a, 1.0);
        assert_eq!(b, a);
    }

    #[test]
    fn adam_minimises_quadratic() {
        let mut p = vec![3.0f64, -2.0];
        let mut opt = Adam::new(2, 0.05);
        for _ in 0..2000 {
            let g = vec![2.0 * p[0], 2.0 * p[1]];
            opt.step(&mut p, &g);
        }
        assert!(p[0].abs() < 1e-3 && p[1].abs() < 1e-3);
    }
}
