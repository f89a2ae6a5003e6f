use alloc::string::ToString;
use alloc::vec::Vec;

use super::NnError;
use crate::math;

/// Learning rate at a given epoch: `lr0 / (e/2 + 1)` with real division.
/// Strictly decreasing in `e`.
pub fn lr_at_epoch(epoch: usize, lr0: f64) -> f64 {
    lr0 / (epoch as f64 / 2.0 + 1.0)
}

/// Adam hyperparameters. The defaults enable the AMSGrad variant with
/// `beta1 = 0.90`, `beta2 = 0.999`, `epsilon = 1e-10` and `lr0 = 0.05`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub amsgrad: bool,
    pub lr0: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { beta1: 0.90, beta2: 0.999, epsilon: 1e-10, amsgrad: true, lr0: 0.05 }
    }
}

/// Per-parameter optimizer state: first moment, second moment, the running
/// maximum of the second moment (AMSGrad) and the step counter.
///
/// Updates are bias-corrected:
/// `theta -= lr * (m / (1 - beta1^t)) / (sqrt(vmax / (1 - beta2^t)) + eps)`.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    v_max: Vec<f64>,
    t: u64,
}

impl AdamState {
    pub fn new(n_params: usize) -> Self {
        AdamState {
            m: alloc::vec![0.0; n_params],
            v: alloc::vec![0.0; n_params],
            v_max: alloc::vec![0.0; n_params],
            t: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    pub fn second_moment_max(&self) -> &[f64] {
        &self.v_max
    }

    /// One dense update over all coordinates.
    pub fn step(
        &mut self,
        params: &mut [f64],
        grads: &[f64],
        cfg: &AdamConfig,
        lr: f64,
    ) -> Result<(), NnError> {
        if params.len() != grads.len() || params.len() != self.m.len() {
            return Err(NnError::ShapeMismatch {
                context: "adam step".to_string(),
                left: params.len(),
                right: grads.len().max(self.m.len()),
            });
        }
        self.t += 1;
        let (bc1, bc2) = self.bias_corrections(cfg);
        for i in 0..params.len() {
            params[i] -= self.update_coord(i, grads[i], cfg, lr, bc1, bc2);
        }
        Ok(())
    }

    /// One update touching only the given rows of a row-major table. Moments
    /// of untouched rows stay frozen, the way sparse embedding training
    /// usually handles per-example updates. A row listed twice has its
    /// gradients summed and is stepped once.
    pub fn step_rows(
        &mut self,
        table: &mut [f64],
        dim: usize,
        rows: &[usize],
        row_grads: &[f64],
        cfg: &AdamConfig,
        lr: f64,
    ) -> Result<(), NnError> {
        if rows.len() * dim != row_grads.len() || table.len() != self.m.len() {
            return Err(NnError::ShapeMismatch {
                context: "adam row step".to_string(),
                left: rows.len() * dim,
                right: row_grads.len(),
            });
        }
        self.t += 1;
        let (bc1, bc2) = self.bias_corrections(cfg);

        // Accumulate duplicate rows before updating any moments.
        let mut unique: Vec<usize> = rows.to_vec();
        unique.sort_unstable();
        unique.dedup();
        for &row in &unique {
            let base = row * dim;
            for k in 0..dim {
                let mut g = 0.0;
                for (j, &r) in rows.iter().enumerate() {
                    if r == row {
                        g += row_grads[j * dim + k];
                    }
                }
                table[base + k] -= self.update_coord(base + k, g, cfg, lr, bc1, bc2);
            }
        }
        Ok(())
    }

    fn bias_corrections(&self, cfg: &AdamConfig) -> (f64, f64) {
        (1.0 - math::powi(cfg.beta1, self.t), 1.0 - math::powi(cfg.beta2, self.t))
    }

    fn update_coord(
        &mut self,
        i: usize,
        g: f64,
        cfg: &AdamConfig,
        lr: f64,
        bc1: f64,
        bc2: f64,
    ) -> f64 {
        self.m[i] = cfg.beta1 * self.m[i] + (1.0 - cfg.beta1) * g;
        self.v[i] = cfg.beta2 * self.v[i] + (1.0 - cfg.beta2) * g * g;
        if self.v[i] > self.v_max[i] {
            self.v_max[i] = self.v[i];
        }
        let second = if cfg.amsgrad { self.v_max[i] } else { self.v[i] };
        let m_hat = self.m[i] / bc1;
        let v_hat = second / bc2;
        lr * m_hat / (math::sqrt(v_hat) + cfg.epsilon)
    }
}
