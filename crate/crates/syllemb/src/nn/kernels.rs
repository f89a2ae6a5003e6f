use alloc::string::ToString;
use alloc::vec::Vec;

use super::NnError;
use crate::math;

pub fn l2_norm(v: &[f64]) -> f64 {
    math::sqrt(v.iter().map(|x| x * x).sum())
}

/// Scale to unit L2 norm, preserving direction. A zero vector is an error;
/// callers decide how to treat it.
pub fn l2_normalize(v: &[f64]) -> Result<Vec<f64>, NnError> {
    let norm = l2_norm(v);
    if norm == 0.0 {
        return Err(NnError::ZeroNorm);
    }
    Ok(v.iter().map(|x| x / norm).collect())
}

/// Numerically stable softmax (max-subtracted). Output entries are positive
/// and sum to one.
pub fn softmax(v: &[f64]) -> Vec<f64> {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = v.iter().map(|&x| math::exp(x - max)).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|e| e / sum).collect()
}

/// Mean squared difference.
pub fn mse(a: &[f64], b: &[f64]) -> Result<f64, NnError> {
    if a.len() != b.len() {
        return Err(NnError::ShapeMismatch {
            context: "mse".to_string(),
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len() as f64;
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / n)
}

/// `-log softmax(logits)[target]`, computed without materializing the
/// softmax: `log-sum-exp(logits) - logits[target]`.
pub fn cross_entropy(logits: &[f64], target: usize) -> Result<f64, NnError> {
    if target >= logits.len() {
        return Err(NnError::IndexOutOfRange { index: target, len: logits.len() });
    }
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + math::ln(logits.iter().map(|&x| math::exp(x - max)).sum::<f64>());
    Ok(lse - logits[target])
}

/// `(v - mean) / sqrt(var + eps) * gain + bias` with population variance.
pub fn layer_norm(v: &[f64], gain: &[f64], bias: &[f64], eps: f64) -> Result<Vec<f64>, NnError> {
    if v.len() != gain.len() || v.len() != bias.len() {
        return Err(NnError::ShapeMismatch {
            context: "layer_norm".to_string(),
            left: v.len(),
            right: gain.len().max(bias.len()),
        });
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let denom = math::sqrt(var + eps);
    Ok(v.iter()
        .zip(gain.iter().zip(bias))
        .map(|(x, (g, b))| (x - mean) / denom * g + b)
        .collect())
}
