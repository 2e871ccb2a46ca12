use serde::{Deserialize, Serialize};

/// Adam optimizer state for one flat parameter vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(n: usize) -> Self {
        AdamState {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    /// Bias-corrected moment update applied in place.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64], lr: f64) {
        debug_assert_eq!(params.len(), self.m.len());
        debug_assert_eq!(grads.len(), self.m.len());
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t as i32);
        let c2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_params() {
        let mut opt = AdamState::new(3);
        let mut p = vec![1.0, -2.0, 0.5];
        let orig = p.clone();
        for _ in 0..10 {
            opt.step(&mut p, &[0.0, 0.0, 0.0], 0.1);
        }
        assert_eq!(p, orig);
    }

    #[test]
    fn first_step_magnitude_is_learning_rate() {
        let mut opt = AdamState::new(2);
        let mut p = vec![0.0, 0.0];
        opt.step(&mut p, &[3.0, -0.2], 0.01);
        // bias correction makes the first update lr * sign(g) (up to eps)
        assert!((p[0] + 0.01).abs() < 1e-6, "{}", p[0]);
        assert!((p[1] - 0.01).abs() < 1e-6, "{}", p[1]);
    }

    #[test]
    fn converges_on_convex_quadratic() {
        // f(x) = sum (x - c)^2, analytic minimizer c
        let c = [3.0, -1.5, 0.25, 10.0];
        let mut p = vec![5.0, 5.0, 5.0, -5.0];
        let mut opt = AdamState::new(4);
        for _ in 0..10_000 {
            let grads: Vec<f64> = p.iter().zip(c.iter()).map(|(x, c)| 2.0 * (x - c)).collect();
            opt.step(&mut p, &grads, 0.05);
        }
        for (x, c) in p.iter().zip(c.iter()) {
            assert!((x - c).abs() < 1e-6, "{} vs {}", x, c);
        }
    }
}
