//! Plain recurrent cell, kept as a baseline next to the LSTM.
//!
//! `h_t = tanh(W h_{t-1} + U x_t + b)`, `y_t = σ(V h_t)`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{axpy, Matrix, Vector};

#[derive(Clone, Debug, PartialEq)]
pub struct RnnLayerParams<T> {
    /// Transition, hidden × hidden.
    pub w: Matrix<T>,
    /// Input, hidden × input.
    pub u: Matrix<T>,
    /// Output, out × hidden.
    pub v: Matrix<T>,
    pub bias: Vector<T>,
}

impl<T: Scalar> RnnLayerParams<T> {
    pub fn zeros(input_dim: usize, hidden_dim: usize, output_dim: usize) -> Self {
        Self {
            w: Matrix::zeros(hidden_dim, hidden_dim),
            u: Matrix::zeros(hidden_dim, input_dim),
            v: Matrix::zeros(output_dim, hidden_dim),
            bias: Vector::zeros(hidden_dim),
        }
    }

    pub fn hidden_dim(&self) -> usize {
        self.bias.len()
    }

    fn validate(&self) -> Result<()> {
        let h = self.hidden_dim();
        if self.w.shape() != (h, h) || self.u.rows() != h || self.v.cols() != h {
            return Err(Error::Shape {
                op: "RnnLayerParams",
                left: self.w.shape(),
                right: self.u.shape(),
            });
        }
        Ok(())
    }
}

/// Gradients of one cell step.
#[derive(Clone, Debug, PartialEq)]
pub struct RnnStepGrads<T> {
    pub w: Matrix<T>,
    pub u: Matrix<T>,
    pub bias: Vector<T>,
    pub d_x: Vector<T>,
    pub d_h_prev: Vector<T>,
}

pub fn rnn_cell_forward<T: Scalar>(x: &Vector<T>, h_prev: &Vector<T>, params: &RnnLayerParams<T>) -> Result<Vector<T>> {
    params.validate()?;
    let pre = params.w.matvec(h_prev)?.add(&params.u.matvec(x)?)?.add(&params.bias)?;
    Ok(pre.tanh())
}

pub fn rnn_output<T: Scalar>(h: &Vector<T>, params: &RnnLayerParams<T>) -> Result<Vector<T>> {
    Ok(params.v.matvec(h)?.sigmoid())
}

/// Backward through one cell step given dL/dh_t. `h` is the step's output.
pub fn rnn_cell_backward<T: Scalar>(
    x: &Vector<T>,
    h_prev: &Vector<T>,
    h: &Vector<T>,
    d_h: &Vector<T>,
    params: &RnnLayerParams<T>,
) -> Result<RnnStepGrads<T>> {
    params.validate()?;
    let hd = params.hidden_dim();
    if h.len() != hd || d_h.len() != hd || h_prev.len() != hd || x.len() != params.u.cols() {
        return Err(Error::Shape {
            op: "rnn_cell_backward",
            left: (hd, params.u.cols()),
            right: (h.len(), x.len()),
        });
    }
    let d_pre: Vec<T> = (0..hd).map(|k| d_h[k] * (T::one() - h[k] * h[k])).collect();
    let mut grads = RnnStepGrads {
        w: Matrix::zeros(hd, hd),
        u: Matrix::zeros(hd, x.len()),
        bias: Vector::from(d_pre.clone()),
        d_x: Vector::zeros(x.len()),
        d_h_prev: Vector::zeros(hd),
    };
    for (k, &a) in d_pre.iter().enumerate() {
        axpy(a, h_prev.as_slice(), grads.w.row_mut(k));
        axpy(a, x.as_slice(), grads.u.row_mut(k));
        axpy(a, params.w.row(k), grads.d_h_prev.as_mut_slice());
        axpy(a, params.u.row(k), grads.d_x.as_mut_slice());
    }
    Ok(grads)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_weights_give_tanh_of_bias() {
        let mut p = RnnLayerParams::<f64>::zeros(1, 2, 1);
        p.bias = Vector::from(vec![0.3, -1.0]);
        let h = rnn_cell_forward(&Vector::from(vec![5.0]), &Vector::from(vec![0.9, 0.1]), &p).unwrap();
        assert_eq!(h.as_slice(), &[0.3f64.tanh(), (-1.0f64).tanh()]);
    }

    #[test]
    fn scalar_unit_weights() {
        let mut p = RnnLayerParams::<f64>::zeros(1, 1, 1);
        p.w[(0, 0)] = 1.0;
        p.u[(0, 0)] = 1.0;
        let h = rnn_cell_forward(&Vector::from(vec![1.0]), &Vector::zeros(1), &p).unwrap();
        assert!((h[0] - 0.761594).abs() < 1e-6);
        assert_eq!(rnn_output(&h, &p).unwrap()[0], 0.5);
    }

    #[test]
    fn shape_errors() {
        let p = RnnLayerParams::<f64>::zeros(1, 2, 1);
        assert!(rnn_cell_forward(&Vector::zeros(3), &Vector::zeros(2), &p).is_err());
        assert!(rnn_cell_forward(&Vector::zeros(1), &Vector::zeros(3), &p).is_err());
        assert!(rnn_output(&Vector::zeros(3), &p).is_err());
    }

    #[test]
    fn backward_matches_finite_differences() {
        let mut p = RnnLayerParams::<f64>::zeros(2, 3, 1);
        let fill = |m: &mut [f64], seed: usize| {
            for (i, v) in m.iter_mut().enumerate() {
                *v = (((i + seed) * 37 % 17) as f64) / 17.0 - 0.5;
            }
        };
        fill(p.w.as_mut_slice(), 1);
        fill(p.u.as_mut_slice(), 2);
        fill(p.bias.as_mut_slice(), 3);
        let x = Vector::from(vec![0.4, -0.9]);
        let h_prev = Vector::from(vec![0.1, -0.2, 0.3]);
        // L = Σ c_k h_k
        let coef = Vector::from(vec![0.7, -1.3, 0.25]);
        let loss = |p: &RnnLayerParams<f64>, x: &Vector<f64>, hp: &Vector<f64>| {
            rnn_cell_forward(x, hp, p).unwrap().dot(&coef).unwrap()
        };
        let h = rnn_cell_forward(&x, &h_prev, &p).unwrap();
        let g = rnn_cell_backward(&x, &h_prev, &h, &coef, &p).unwrap();
        let eps = 1e-6;
        let check = |analytic: f64, plus: f64, minus: f64| {
            let numeric = (plus - minus) / (2.0 * eps);
            assert!((analytic - numeric).abs() < 1e-8, "{analytic} vs {numeric}");
        };
        for i in 0..9 {
            let (mut a, mut b) = (p.clone(), p.clone());
            a.w.as_mut_slice()[i] += eps;
            b.w.as_mut_slice()[i] -= eps;
            check(g.w.as_slice()[i], loss(&a, &x, &h_prev), loss(&b, &x, &h_prev));
        }
        for i in 0..6 {
            let (mut a, mut b) = (p.clone(), p.clone());
            a.u.as_mut_slice()[i] += eps;
            b.u.as_mut_slice()[i] -= eps;
            check(g.u.as_slice()[i], loss(&a, &x, &h_prev), loss(&b, &x, &h_prev));
        }
        for i in 0..2 {
            let (mut a, mut b) = (x.clone(), x.clone());
            a[i] += eps;
            b[i] -= eps;
            check(g.d_x[i], loss(&p, &a, &h_prev), loss(&p, &b, &h_prev));
        }
        for i in 0..3 {
            let (mut a, mut b) = (h_prev.clone(), h_prev.clone());
            a[i] += eps;
            b[i] -= eps;
            check(g.d_h_prev[i], loss(&p, &x, &a), loss(&p, &x, &b));
        }
    }
}
