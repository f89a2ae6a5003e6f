use alloc::vec::Vec;

use super::kernels;
use super::tensor::Tensor;
use super::NnError;
use crate::math;

/// Handle to a node on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

enum Op {
    Leaf,
    Add(Var, Var),
    Sub(Var, Var),
    MulElem(Var, Var),
    Scale(Var, f64),
    AddRow(Var, Var),
    MatMul(Var, Var),
    MatMulNT(Var, Var),
    Relu(Var),
    RowSoftmax(Var),
    LayerNormRows { x: Var, gain: Var, bias: Var, eps: f64 },
    MeanRows(Var),
    SumRows(Var),
    L2NormalizeRow(Var),
    SliceCols { x: Var, start: usize, len: usize },
    ConcatCols(Vec<Var>),
    Mse(Var, Var),
    CrossEntropyRows { logits: Var, targets: Vec<usize> },
}

struct Node {
    value: Tensor,
    op: Op,
}

/// A single-use reverse-mode gradient tape. Values are computed eagerly as
/// operations are recorded; `backward` then fills one gradient tensor per
/// node. Nodes only ever reference earlier nodes, so one reverse sweep
/// suffices.
#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
    grads: Vec<Tensor>,
}

impl Tape {
    pub fn new() -> Self {
        Tape::default()
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    /// Gradient of the last `backward` loss with respect to `v`.
    pub fn grad(&self, v: Var) -> &Tensor {
        assert!(!self.grads.is_empty(), "call backward() before reading gradients");
        &self.grads[v.0]
    }

    fn push(&mut self, value: Tensor, op: Op) -> Var {
        self.nodes.push(Node { value, op });
        Var(self.nodes.len() - 1)
    }

    /// A differentiable input (parameter slice or constant; constants simply
    /// have their gradients ignored).
    pub fn leaf(&mut self, value: Tensor) -> Var {
        self.push(value, Op::Leaf)
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        let value = self.zip(a, b, "add", |x, y| x + y);
        self.push(value, Op::Add(a, b))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Var {
        let value = self.zip(a, b, "sub", |x, y| x - y);
        self.push(value, Op::Sub(a, b))
    }

    pub fn mul_elem(&mut self, a: Var, b: Var) -> Var {
        let value = self.zip(a, b, "mul_elem", |x, y| x * y);
        self.push(value, Op::MulElem(a, b))
    }

    pub fn scale(&mut self, a: Var, c: f64) -> Var {
        let mut value = self.value(a).clone();
        for x in value.data_mut() {
            *x *= c;
        }
        self.push(value, Op::Scale(a, c))
    }

    /// Broadcast-add a length-`n` row vector to every row of an `m x n`
    /// matrix.
    pub fn add_row(&mut self, a: Var, row: Var) -> Var {
        let (m, n) = self.value(a).dims2();
        let r = self.value(row);
        assert_eq!(r.len(), n, "add_row: row length must match columns");
        let mut data = self.value(a).data().to_vec();
        for i in 0..m {
            for j in 0..n {
                data[i * n + j] += r.data()[j];
            }
        }
        let value = like_shape(self.value(a), data);
        self.push(value, Op::AddRow(a, row))
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Var {
        let (m, k) = self.value(a).dims2();
        let (k2, n) = self.value(b).dims2();
        assert_eq!(k, k2, "matmul: inner dimensions must agree");
        let mut out = alloc::vec![0.0; m * n];
        matmul_acc(self.value(a).data(), m, k, self.value(b).data(), n, &mut out);
        self.push(Tensor::matrix(m, n, out), Op::MatMul(a, b))
    }

    /// `a * b^T` for `a: m x k`, `b: n x k`.
    pub fn matmul_nt(&mut self, a: Var, b: Var) -> Var {
        let (m, k) = self.value(a).dims2();
        let (n, k2) = self.value(b).dims2();
        assert_eq!(k, k2, "matmul_nt: shared dimension must agree");
        let mut out = alloc::vec![0.0; m * n];
        matmul_nt_acc(self.value(a).data(), m, k, self.value(b).data(), n, &mut out);
        self.push(Tensor::matrix(m, n, out), Op::MatMulNT(a, b))
    }

    pub fn relu(&mut self, a: Var) -> Var {
        let mut value = self.value(a).clone();
        for x in value.data_mut() {
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        self.push(value, Op::Relu(a))
    }

    /// Row-wise stable softmax.
    pub fn row_softmax(&mut self, a: Var) -> Var {
        let (m, n) = self.value(a).dims2();
        let mut data = Vec::with_capacity(m * n);
        for r in 0..m {
            data.extend(kernels::softmax(self.value(a).row(r)));
        }
        let value = like_shape(self.value(a), data);
        self.push(value, Op::RowSoftmax(a))
    }

    /// Row-wise layer normalization with shared gain and bias vectors.
    pub fn layer_norm_rows(&mut self, x: Var, gain: Var, bias: Var, eps: f64) -> Var {
        let (m, n) = self.value(x).dims2();
        assert_eq!(self.value(gain).len(), n, "layer_norm: gain length");
        assert_eq!(self.value(bias).len(), n, "layer_norm: bias length");
        let mut data = Vec::with_capacity(m * n);
        for r in 0..m {
            let out = kernels::layer_norm(
                self.value(x).row(r),
                self.value(gain).data(),
                self.value(bias).data(),
                eps,
            )
            .expect("lengths checked above");
            data.extend(out);
        }
        let value = like_shape(self.value(x), data);
        self.push(value, Op::LayerNormRows { x, gain, bias, eps })
    }

    pub fn mean_rows(&mut self, a: Var) -> Var {
        let (m, n) = self.value(a).dims2();
        let mut out = alloc::vec![0.0; n];
        for r in 0..m {
            for j in 0..n {
                out[j] += self.value(a).at(r, j);
            }
        }
        for x in &mut out {
            *x /= m as f64;
        }
        self.push(Tensor::vector(out), Op::MeanRows(a))
    }

    pub fn sum_rows(&mut self, a: Var) -> Var {
        let (m, n) = self.value(a).dims2();
        let mut out = alloc::vec![0.0; n];
        for r in 0..m {
            for j in 0..n {
                out[j] += self.value(a).at(r, j);
            }
        }
        self.push(Tensor::vector(out), Op::SumRows(a))
    }

    /// Normalize a single-row value to unit L2 norm.
    pub fn l2_normalize_row(&mut self, a: Var) -> Result<Var, NnError> {
        let (m, _) = self.value(a).dims2();
        assert_eq!(m, 1, "l2_normalize_row expects a single row");
        let out = kernels::l2_normalize(self.value(a).data())?;
        let value = like_shape(self.value(a), out);
        Ok(self.push(value, Op::L2NormalizeRow(a)))
    }

    pub fn slice_cols(&mut self, a: Var, start: usize, len: usize) -> Var {
        let (m, n) = self.value(a).dims2();
        assert!(start + len <= n, "slice_cols out of range");
        let mut data = Vec::with_capacity(m * len);
        for r in 0..m {
            data.extend_from_slice(&self.value(a).row(r)[start..start + len]);
        }
        self.push(Tensor::matrix(m, len, data), Op::SliceCols { x: a, start, len })
    }

    pub fn concat_cols(&mut self, parts: &[Var]) -> Var {
        assert!(!parts.is_empty(), "concat_cols needs at least one part");
        let m = self.value(parts[0]).dims2().0;
        let total: usize = parts.iter().map(|&p| self.value(p).dims2().1).sum();
        let mut data = Vec::with_capacity(m * total);
        for r in 0..m {
            for &p in parts {
                assert_eq!(self.value(p).dims2().0, m, "concat_cols: row counts must agree");
                data.extend_from_slice(self.value(p).row(r));
            }
        }
        self.push(Tensor::matrix(m, total, data), Op::ConcatCols(parts.to_vec()))
    }

    /// Mean squared error between two same-shape values; scalar output.
    pub fn mse(&mut self, a: Var, b: Var) -> Var {
        let loss = kernels::mse(self.value(a).data(), self.value(b).data())
            .expect("mse operands must have equal shapes");
        self.push(Tensor::scalar(loss), Op::Mse(a, b))
    }

    /// Summed token cross entropy: row `r` of `logits` is scored against
    /// `targets[r]`; the scalar output is the sum over rows.
    pub fn cross_entropy_rows(&mut self, logits: Var, targets: &[usize]) -> Var {
        let (m, _) = self.value(logits).dims2();
        assert_eq!(m, targets.len(), "cross_entropy_rows: one target per row");
        let mut loss = 0.0;
        for (r, &t) in targets.iter().enumerate() {
            loss += kernels::cross_entropy(self.value(logits).row(r), t)
                .expect("target indices must be in range");
        }
        self.push(
            Tensor::scalar(loss),
            Op::CrossEntropyRows { logits, targets: targets.to_vec() },
        )
    }

    fn zip(&self, a: Var, b: Var, what: &str, f: impl Fn(f64, f64) -> f64) -> Tensor {
        let va = self.value(a);
        let vb = self.value(b);
        assert_eq!(va.shape(), vb.shape(), "{what}: shapes must agree");
        let data = va.data().iter().zip(vb.data()).map(|(&x, &y)| f(x, y)).collect();
        like_shape(va, data)
    }

    /// Reverse sweep seeding the scalar `loss` with gradient one.
    pub fn backward(&mut self, loss: Var) {
        assert_eq!(self.nodes[loss.0].value.len(), 1, "backward expects a scalar loss");
        self.grads = self.nodes.iter().map(|n| Tensor::zeros_like(&n.value)).collect();
        self.grads[loss.0].data_mut()[0] = 1.0;

        for i in (0..self.nodes.len()).rev() {
            let (lower, upper) = self.grads.split_at_mut(i);
            let g = &upper[0];
            if g.data().iter().all(|&x| x == 0.0) {
                continue;
            }
            let node = &self.nodes[i];
            match &node.op {
                Op::Leaf => {}
                Op::Add(a, b) => {
                    acc(&mut lower[a.0], g.data());
                    acc(&mut lower[b.0], g.data());
                }
                Op::Sub(a, b) => {
                    acc(&mut lower[a.0], g.data());
                    acc_neg(&mut lower[b.0], g.data());
                }
                Op::MulElem(a, b) => {
                    let (a, b) = (*a, *b);
                    let gb: Vec<f64> = g
                        .data()
                        .iter()
                        .zip(self.nodes[b.0].value.data())
                        .map(|(&x, &y)| x * y)
                        .collect();
                    let ga: Vec<f64> = g
                        .data()
                        .iter()
                        .zip(self.nodes[a.0].value.data())
                        .map(|(&x, &y)| x * y)
                        .collect();
                    acc(&mut lower[a.0], &gb);
                    acc(&mut lower[b.0], &ga);
                }
                Op::Scale(a, c) => {
                    let scaled: Vec<f64> = g.data().iter().map(|&x| x * c).collect();
                    acc(&mut lower[a.0], &scaled);
                }
                Op::AddRow(a, row) => {
                    let (m, n) = g.dims2();
                    acc(&mut lower[a.0], g.data());
                    let dr = lower[row.0].data_mut();
                    for r in 0..m {
                        for j in 0..n {
                            dr[j] += g.data()[r * n + j];
                        }
                    }
                }
                Op::MatMul(a, b) => {
                    let (a, b) = (*a, *b);
                    let (m, n) = g.dims2();
                    let k = self.nodes[a.0].value.dims2().1;
                    // da += g * b^T; db += a^T * g
                    let gd = g.data().to_vec();
                    matmul_nt_acc(
                        &gd,
                        m,
                        n,
                        self.nodes[b.0].value.data(),
                        k,
                        lower[a.0].data_mut(),
                    );
                    matmul_tn_acc(
                        self.nodes[a.0].value.data(),
                        m,
                        k,
                        &gd,
                        n,
                        lower[b.0].data_mut(),
                    );
                }
                Op::MatMulNT(a, b) => {
                    let (a, b) = (*a, *b);
                    let (m, n) = g.dims2();
                    let k = self.nodes[a.0].value.dims2().1;
                    // da += g * b; db += g^T * a
                    let gd = g.data().to_vec();
                    matmul_acc(
                        &gd,
                        m,
                        n,
                        self.nodes[b.0].value.data(),
                        k,
                        lower[a.0].data_mut(),
                    );
                    matmul_tn_acc(
                        &gd,
                        m,
                        n,
                        self.nodes[a.0].value.data(),
                        k,
                        lower[b.0].data_mut(),
                    );
                }
                Op::Relu(a) => {
                    let a = *a;
                    let masked: Vec<f64> = g
                        .data()
                        .iter()
                        .zip(self.nodes[a.0].value.data())
                        .map(|(&gx, &x)| if x > 0.0 { gx } else { 0.0 })
                        .collect();
                    acc(&mut lower[a.0], &masked);
                }
                Op::RowSoftmax(a) => {
                    let a = *a;
                    let (m, n) = g.dims2();
                    let y = &node.value;
                    let da = lower[a.0].data_mut();
                    for r in 0..m {
                        let yr = y.row(r);
                        let gr = &g.data()[r * n..(r + 1) * n];
                        let dot: f64 = yr.iter().zip(gr).map(|(&a, &b)| a * b).sum();
                        for j in 0..n {
                            da[r * n + j] += yr[j] * (gr[j] - dot);
                        }
                    }
                }
                Op::LayerNormRows { x, gain, bias, eps } => {
                    let (x, gain, bias, eps) = (*x, *gain, *bias, *eps);
                    let (m, n) = g.dims2();
                    let nv = n as f64;
                    let xv = self.nodes[x.0].value.data().to_vec();
                    let gv = self.nodes[gain.0].value.data().to_vec();
                    for r in 0..m {
                        let xr = &xv[r * n..(r + 1) * n];
                        let gr = &g.data()[r * n..(r + 1) * n];
                        let mean = xr.iter().sum::<f64>() / nv;
                        let var = xr.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / nv;
                        let denom = math::sqrt(var + eps);
                        let xhat: Vec<f64> = xr.iter().map(|v| (v - mean) / denom).collect();
                        let u: Vec<f64> = gr.iter().zip(&gv).map(|(&a, &b)| a * b).collect();
                        let mu_u = u.iter().sum::<f64>() / nv;
                        let mu_ux =
                            u.iter().zip(&xhat).map(|(&a, &b)| a * b).sum::<f64>() / nv;
                        {
                            let dx = lower[x.0].data_mut();
                            for j in 0..n {
                                dx[r * n + j] += (u[j] - mu_u - xhat[j] * mu_ux) / denom;
                            }
                        }
                        {
                            let dgain = lower[gain.0].data_mut();
                            for j in 0..n {
                                dgain[j] += gr[j] * xhat[j];
                            }
                        }
                        {
                            let dbias = lower[bias.0].data_mut();
                            for j in 0..n {
                                dbias[j] += gr[j];
                            }
                        }
                    }
                }
                Op::MeanRows(a) => {
                    let a = *a;
                    let (m, n) = self.nodes[a.0].value.dims2();
                    let da = lower[a.0].data_mut();
                    for r in 0..m {
                        for j in 0..n {
                            da[r * n + j] += g.data()[j] / m as f64;
                        }
                    }
                }
                Op::SumRows(a) => {
                    let a = *a;
                    let (m, n) = self.nodes[a.0].value.dims2();
                    let da = lower[a.0].data_mut();
                    for r in 0..m {
                        for j in 0..n {
                            da[r * n + j] += g.data()[j];
                        }
                    }
                }
                Op::L2NormalizeRow(a) => {
                    let a = *a;
                    let y = node.value.data();
                    let norm = kernels::l2_norm(self.nodes[a.0].value.data());
                    let dot: f64 = y.iter().zip(g.data()).map(|(&a, &b)| a * b).sum();
                    let da = lower[a.0].data_mut();
                    for j in 0..y.len() {
                        da[j] += (g.data()[j] - y[j] * dot) / norm;
                    }
                }
                Op::SliceCols { x, start, len } => {
                    let (x, start, len) = (*x, *start, *len);
                    let (m, _) = g.dims2();
                    let n = self.nodes[x.0].value.dims2().1;
                    let dx = lower[x.0].data_mut();
                    for r in 0..m {
                        for j in 0..len {
                            dx[r * n + start + j] += g.data()[r * len + j];
                        }
                    }
                }
                Op::ConcatCols(parts) => {
                    let parts = parts.clone();
                    let (m, total) = g.dims2();
                    let mut offset = 0;
                    for p in parts {
                        let w = self.nodes[p.0].value.dims2().1;
                        let dp = lower[p.0].data_mut();
                        for r in 0..m {
                            for j in 0..w {
                                dp[r * w + j] += g.data()[r * total + offset + j];
                            }
                        }
                        offset += w;
                    }
                }
                Op::Mse(a, b) => {
                    let (a, b) = (*a, *b);
                    let g0 = g.data()[0];
                    let n = self.nodes[a.0].value.len() as f64;
                    let diff: Vec<f64> = self.nodes[a.0]
                        .value
                        .data()
                        .iter()
                        .zip(self.nodes[b.0].value.data())
                        .map(|(&x, &y)| g0 * 2.0 * (x - y) / n)
                        .collect();
                    acc(&mut lower[a.0], &diff);
                    acc_neg(&mut lower[b.0], &diff);
                }
                Op::CrossEntropyRows { logits, targets } => {
                    let logits = *logits;
                    let targets = targets.clone();
                    let g0 = g.data()[0];
                    let (_, n) = self.nodes[logits.0].value.dims2();
                    let rowsv: Vec<Vec<f64>> = targets
                        .iter()
                        .enumerate()
                        .map(|(r, _)| kernels::softmax(self.nodes[logits.0].value.row(r)))
                        .collect();
                    let dl = lower[logits.0].data_mut();
                    for (r, &t) in targets.iter().enumerate() {
                        for j in 0..n {
                            let onehot = if j == t { 1.0 } else { 0.0 };
                            dl[r * n + j] += g0 * (rowsv[r][j] - onehot);
                        }
                    }
                }
            }
        }
    }
}

fn like_shape(like: &Tensor, data: Vec<f64>) -> Tensor {
    match like.shape() {
        [_] => Tensor::vector(data),
        [r, c] => Tensor::matrix(*r, *c, data),
        s => panic!("unsupported shape {s:?}"),
    }
}

fn acc(t: &mut Tensor, src: &[f64]) {
    for (d, s) in t.data_mut().iter_mut().zip(src) {
        *d += s;
    }
}

fn acc_neg(t: &mut Tensor, src: &[f64]) {
    for (d, s) in t.data_mut().iter_mut().zip(src) {
        *d -= s;
    }
}

/// `out += a (m x k) * b (k x n)`.
fn matmul_acc(a: &[f64], m: usize, k: usize, b: &[f64], n: usize, out: &mut [f64]) {
    for i in 0..m {
        for p in 0..k {
            let aip = a[i * k + p];
            if aip == 0.0 {
                continue;
            }
            let brow = &b[p * n..(p + 1) * n];
            let orow = &mut out[i * n..(i + 1) * n];
            for j in 0..n {
                orow[j] += aip * brow[j];
            }
        }
    }
}

/// `out += a (m x k) * b^T (b: n x k)`.
fn matmul_nt_acc(a: &[f64], m: usize, k: usize, b: &[f64], n: usize, out: &mut [f64]) {
    for i in 0..m {
        let arow = &a[i * k..(i + 1) * k];
        for j in 0..n {
            let brow = &b[j * k..(j + 1) * k];
            let dot: f64 = arow.iter().zip(brow).map(|(&x, &y)| x * y).sum();
            out[i * n + j] += dot;
        }
    }
}

/// `out += a^T (a: m x k) * b (m x n)`, producing `k x n`.
fn matmul_tn_acc(a: &[f64], m: usize, k: usize, b: &[f64], n: usize, out: &mut [f64]) {
    for i in 0..m {
        for p in 0..k {
            let aip = a[i * k + p];
            if aip == 0.0 {
                continue;
            }
            let brow = &b[i * n..(i + 1) * n];
            let orow = &mut out[p * n..(p + 1) * n];
            for j in 0..n {
                orow[j] += aip * brow[j];
            }
        }
    }
}
