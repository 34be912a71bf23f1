use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{dot, Matrix, Vector};

/// Single sigmoid output unit: `σ(w·h + b)`. `h + 1` parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseParams<T> {
    pub weights: Matrix<T>,
    pub bias: T,
}

impl<T: Scalar> DenseParams<T> {
    pub fn zeros(input_dim: usize) -> Self {
        Self {
            weights: Matrix::zeros(1, input_dim),
            bias: T::zero(),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn param_count(&self) -> usize {
        self.input_dim() + 1
    }

    pub fn logit(&self, h: &[T]) -> Result<T> {
        if h.len() != self.input_dim() {
            return Err(Error::Shape {
                op: "dense_sigmoid_forward",
                left: self.weights.shape(),
                right: (h.len(), 1),
            });
        }
        Ok(dot(self.weights.as_slice(), h) + self.bias)
    }

    /// Gradients for a given dL/dlogit: `(param grads, dL/dh)`.
    pub fn backward(&self, h: &[T], d_logit: T) -> (Self, Vec<T>) {
        let grads = Self {
            weights: Matrix::new(1, h.len(), h.iter().map(|&v| v * d_logit).collect()).expect("1 × len matches"),
            bias: d_logit,
        };
        let d_h = self.weights.as_slice().iter().map(|&w| w * d_logit).collect();
        (grads, d_h)
    }
}

/// Probability in (0, 1) for the feature vector `h`.
pub fn dense_sigmoid_forward<T: Scalar>(h: &Vector<T>, params: &DenseParams<T>) -> Result<T> {
    Ok(params.logit(h.as_slice())?.sigmoid())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        let p = DenseParams::<f64>::zeros(3);
        assert_eq!(
            dense_sigmoid_forward(&Vector::from(vec![1.0, 2.0, 3.0]), &p).unwrap(),
            0.5
        );
        let mut p = DenseParams::<f64>::zeros(1);
        p.weights[(0, 0)] = 1.0;
        let y = dense_sigmoid_forward(&Vector::from(vec![1.0]), &p).unwrap();
        assert!((y - 0.731059).abs() < 1e-6);
        assert_eq!(DenseParams::<f64>::zeros(64).param_count(), 65);
    }

    #[test]
    fn output_strictly_inside_unit_interval() {
        let mut p = DenseParams::<f64>::zeros(2);
        p.weights = Matrix::from_rows(&[&[3.0, -2.0]]);
        for x in [-5.0, -1.0, 0.0, 1.0, 5.0] {
            let y = dense_sigmoid_forward(&Vector::from(vec![x, -x]), &p).unwrap();
            assert!(y > 0.0 && y < 1.0);
        }
    }

    #[test]
    fn shape_mismatch() {
        let p = DenseParams::<f64>::zeros(2);
        assert!(matches!(
            dense_sigmoid_forward(&Vector::zeros(3), &p),
            Err(Error::Shape { .. })
        ));
    }
}
