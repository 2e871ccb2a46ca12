use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Number of parameters of a dense stack with the given layer sizes
/// (per layer: an out-by-in weight matrix followed by a bias vector).
pub fn param_count(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| w[1] * (w[0] + 1)).sum()
}

/// Forward pass of a dense stack with tanh hidden activations and a linear
/// output layer, reading parameters from a flat slice.
pub fn forward(sizes: &[usize], params: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    let (out, _) = forward_impl(sizes, params, x, false)?;
    Ok(out)
}

/// Forward pass that also keeps every layer activation for backprop.
pub fn forward_cached(sizes: &[usize], params: &[f64], x: &[f64]) -> Result<(Vec<f64>, Cache)> {
    let (out, cache) = forward_impl(sizes, params, x, true)?;
    Ok((out, cache.expect("cache requested")))
}

/// Layer activations captured during a forward pass: entry 0 is the input,
/// the last entry is the linear output.
#[derive(Debug, Clone)]
pub struct Cache {
    pub activations: Vec<Vec<f64>>,
}

fn forward_impl(
    sizes: &[usize],
    params: &[f64],
    x: &[f64],
    keep: bool,
) -> Result<(Vec<f64>, Option<Cache>)> {
    if sizes.len() < 2 {
        return Err(Error::Shape("network needs at least one layer".into()));
    }
    if x.len() != sizes[0] {
        return Err(Error::Shape(format!(
            "input has {} features, network expects {}",
            x.len(),
            sizes[0]
        )));
    }
    if params.len() < param_count(sizes) {
        return Err(Error::Shape(format!(
            "{} parameters for an architecture needing {}",
            params.len(),
            param_count(sizes)
        )));
    }
    let layers = sizes.len() - 1;
    let mut acts: Vec<Vec<f64>> = Vec::with_capacity(if keep { layers + 1 } else { 0 });
    if keep {
        acts.push(x.to_vec());
    }
    let mut a = x.to_vec();
    let mut offset = 0usize;
    for l in 0..layers {
        let (n_in, n_out) = (sizes[l], sizes[l + 1]);
        let w = &params[offset..offset + n_out * n_in];
        let b = &params[offset + n_out * n_in..offset + n_out * (n_in + 1)];
        offset += n_out * (n_in + 1);
        let mut z = vec![0.0; n_out];
        for i in 0..n_out {
            let row = &w[i * n_in..(i + 1) * n_in];
            let mut acc = b[i];
            for (rv, av) in row.iter().zip(a.iter()) {
                acc += rv * av;
            }
            z[i] = acc;
        }
        if l + 1 < layers {
            for v in z.iter_mut() {
                *v = v.tanh();
            }
        }
        if keep {
            acts.push(z.clone());
        }
        a = z;
    }
    let cache = if keep {
        Some(Cache { activations: acts })
    } else {
        None
    };
    Ok((a, cache))
}

/// Accumulate d(loss)/d(params) into `grads` given d(loss)/d(output).
/// `cache` must come from `forward_cached` on the same parameters.
pub fn backward(sizes: &[usize], params: &[f64], cache: &Cache, d_out: &[f64], grads: &mut [f64]) {
    let layers = sizes.len() - 1;
    debug_assert_eq!(cache.activations.len(), layers + 1);
    debug_assert_eq!(d_out.len(), sizes[layers]);
    debug_assert!(grads.len() >= param_count(sizes));

    // per-layer parameter offsets
    let mut offsets = Vec::with_capacity(layers);
    let mut off = 0usize;
    for l in 0..layers {
        offsets.push(off);
        off += sizes[l + 1] * (sizes[l] + 1);
    }

    let mut d = d_out.to_vec();
    for l in (0..layers).rev() {
        let (n_in, n_out) = (sizes[l], sizes[l + 1]);
        let a_in = &cache.activations[l];
        let base = offsets[l];
        let (gw, gb) = grads[base..base + n_out * (n_in + 1)].split_at_mut(n_out * n_in);
        for i in 0..n_out {
            let di = d[i];
            if di != 0.0 {
                let row = &mut gw[i * n_in..(i + 1) * n_in];
                for (g, av) in row.iter_mut().zip(a_in.iter()) {
                    *g += di * av;
                }
                gb[i] += di;
            }
        }
        if l > 0 {
            let w = &params[base..base + n_out * n_in];
            let mut dp = vec![0.0; n_in];
            for i in 0..n_out {
                let di = d[i];
                if di != 0.0 {
                    let row = &w[i * n_in..(i + 1) * n_in];
                    for (dpj, rv) in dp.iter_mut().zip(row.iter()) {
                        *dpj += di * rv;
                    }
                }
            }
            // a_in is the post-tanh activation of the previous layer
            for (dpj, av) in dp.iter_mut().zip(a_in.iter()) {
                *dpj *= 1.0 - av * av;
            }
            d = dp;
        }
    }
}

/// Dense network parameters stored flat, with the layer sizes alongside.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MlpParams {
    pub sizes: Vec<usize>,
    pub values: Vec<f64>,
}

impl MlpParams {
    /// Fan-in-scaled uniform weights, zero biases.
    pub fn new(sizes: &[usize], rng: &mut impl Rng) -> Self {
        let mut values = vec![0.0; param_count(sizes)];
        let mut offset = 0usize;
        for w in sizes.windows(2) {
            let (n_in, n_out) = (w[0], w[1]);
            let bound = 1.0 / (n_in as f64).sqrt();
            for slot in values[offset..offset + n_out * n_in].iter_mut() {
                *slot = rng.random_range(-bound..bound);
            }
            offset += n_out * (n_in + 1);
        }
        MlpParams {
            sizes: sizes.to_vec(),
            values,
        }
    }

    pub fn zeros(sizes: &[usize]) -> Self {
        MlpParams {
            sizes: sizes.to_vec(),
            values: vec![0.0; param_count(sizes)],
        }
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        forward(&self.sizes, &self.values, x)
    }

    pub fn forward_cached(&self, x: &[f64]) -> Result<(Vec<f64>, Cache)> {
        forward_cached(&self.sizes, &self.values, x)
    }

    pub fn backward(&self, cache: &Cache, d_out: &[f64], grads: &mut [f64]) {
        backward(&self.sizes, &self.values, cache, d_out, grads)
    }
}

#[cfg(test)]
pub(crate) fn finite_difference_check(
    loss: &mut dyn FnMut(&[f64]) -> f64,
    params: &[f64],
    analytic: &[f64],
    h: f64,
    rel_tol: f64,
) {
    let mut p = params.to_vec();
    for i in 0..p.len() {
        let orig = p[i];
        p[i] = orig + h;
        let up = loss(&p);
        p[i] = orig - h;
        let down = loss(&p);
        p[i] = orig;
        let numeric = (up - down) / (2.0 * h);
        let denom = analytic[i].abs().max(numeric.abs());
        if denom < 1e-7 {
            continue;
        }
        let rel = (analytic[i] - numeric).abs() / denom;
        assert!(
            rel < rel_tol,
            "param {i}: analytic {} vs numeric {} (rel {rel})",
            analytic[i],
            numeric
        );
    }
}
