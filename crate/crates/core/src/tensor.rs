//! Dense row-major matrices and vectors.
//!
//! Everything here is a pure function of its inputs. Binary operations check
//! shapes and report both operands on mismatch.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector<T> {
    data: Vec<T>,
}

#[inline]
pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// `y += alpha * x`
#[inline]
pub(crate) fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape {
                op: "Matrix::new",
                left: (rows, cols),
                right: (data.len(), 1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: &[&[T]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape {
                op: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let out_row = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for (k, &a) in self.row(r).iter().enumerate() {
                if a != T::zero() {
                    axpy(a, other.row(k), out_row);
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &Vector<T>) -> Result<Vector<T>> {
        if self.cols != v.len() {
            return Err(Error::Shape {
                op: "matvec",
                left: self.shape(),
                right: (v.len(), 1),
            });
        }
        Ok(Vector::from(
            (0..self.rows)
                .map(|r| dot(self.row(r), v.as_slice()))
                .collect::<Vec<_>>(),
        ))
    }

    fn zip_with(&self, other: &Self, op: &'static str, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Shape {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    /// Element-wise product.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "hadamard", |a, b| a * b)
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|x| x * s)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn sigmoid(&self) -> Self {
        self.map(Scalar::sigmoid)
    }

    pub fn tanh(&self) -> Self {
        self.map(T::tanh)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Orthonormal factor `Q` of the thin QR decomposition of a tall matrix,
    /// with the sign convention that `R` has a positive diagonal.
    ///
    /// Computed by Gram-Schmidt with one reorthogonalization pass per column.
    pub fn orthonormal_columns(&self) -> Result<Self> {
        if self.rows < self.cols {
            return Err(Error::argument(format!(
                "orthonormal_columns needs rows >= cols, got {:?}",
                self.shape()
            )));
        }
        let (m, n) = self.shape();
        // Work column-major: q[j] is column j.
        let mut q: Vec<Vec<T>> = (0..n).map(|j| (0..m).map(|i| self[(i, j)]).collect()).collect();
        for j in 0..n {
            let (done, rest) = q.split_at_mut(j);
            let col = &mut rest[0];
            for _pass in 0..2 {
                for prev in done.iter() {
                    let proj = dot(prev, col);
                    axpy(-proj, prev, col);
                }
            }
            let norm = dot(col, col).sqrt();
            if norm <= T::epsilon() {
                return Err(Error::argument("orthonormal_columns: rank-deficient input"));
            }
            col.iter_mut().for_each(|x| *x /= norm);
        }
        Ok(Self::from_fn(m, n, |i, j| q[j][i]))
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &T {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Scalar> Vector<T> {
    pub fn zeros(len: usize) -> Self {
        Self {
            data: vec![T::zero(); len],
        }
    }

    pub fn filled(len: usize, value: T) -> Self {
        Self { data: vec![value; len] }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn dot(&self, other: &Self) -> Result<T> {
        self.check_same(other, "dot")?;
        Ok(dot(&self.data, &other.data))
    }

    fn check_same(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::Shape {
                op,
                left: (self.len(), 1),
                right: (other.len(), 1),
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, op: &'static str, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.check_same(other, op)?;
        Ok(Self {
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "hadamard", |a, b| a * b)
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|x| x * s)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn sigmoid(&self) -> Self {
        self.map(Scalar::sigmoid)
    }

    pub fn tanh(&self) -> Self {
        self.map(T::tanh)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

impl<T> From<Vec<T>> for Vector<T> {
    fn from(data: Vec<T>) -> Self {
        Self { data }
    }
}

impl<T> Index<usize> for Vector<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.data[i]
    }
}

impl<T> IndexMut<usize> for Vector<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.data[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample(rows: usize, cols: usize, seed: u64) -> Matrix<f64> {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        Matrix::from_fn(rows, cols, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
    }

    #[test]
    fn identity_and_zero_products() {
        let m = sample(3, 4, 1);
        assert_eq!(Matrix::identity(3).matmul(&m).unwrap(), m);
        assert_eq!(Matrix::zeros(2, 3).matmul(&m).unwrap(), Matrix::zeros(2, 4));
    }

    #[test]
    fn hand_computed_product() {
        let a = Matrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = Matrix::from_rows(&[&[5.0], &[6.0]]);
        assert_eq!(a.matmul(&b).unwrap(), Matrix::from_rows(&[&[17.0], &[39.0]]));
        let v = a.matvec(&Vector::from(vec![5.0, 6.0])).unwrap();
        assert_eq!(v.as_slice(), &[17.0, 39.0]);
    }

    #[test]
    fn matmul_shape_error_names_both_shapes() {
        let err = Matrix::<f64>::zeros(2, 3).matmul(&Matrix::zeros(2, 3)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("(2, 3)") && msg.contains("matmul"), "{msg}");
    }

    #[test]
    fn elementwise_shape_errors() {
        let a = Matrix::<f64>::zeros(2, 2);
        let b = Matrix::<f64>::zeros(2, 3);
        assert!(a.add(&b).is_err());
        assert!(a.sub(&b).is_err());
        assert!(a.hadamard(&b).is_err());
        assert!(Vector::<f64>::zeros(2).add(&Vector::zeros(3)).is_err());
        assert!(Matrix::<f64>::new(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn activations_at_reference_points() {
        let v = Vector::from(vec![0.0f64, 1.0]);
        assert_eq!(v.sigmoid()[0], 0.5);
        assert!((v.sigmoid()[1] - 0.7310585786).abs() < 1e-10);
        assert_eq!(v.tanh()[0], 0.0);
    }

    #[test]
    fn arithmetic() {
        let a = Matrix::from_rows(&[&[1.0, -2.0]]);
        let b = Matrix::from_rows(&[&[3.0, 4.0]]);
        assert_eq!(a.add(&b).unwrap().as_slice(), &[4.0, 2.0]);
        assert_eq!(a.sub(&b).unwrap().as_slice(), &[-2.0, -6.0]);
        assert_eq!(a.hadamard(&b).unwrap().as_slice(), &[3.0, -8.0]);
        assert_eq!(a.scale(2.0).as_slice(), &[2.0, -4.0]);
        assert_eq!(a.transpose().shape(), (2, 1));
    }

    #[test]
    fn orthonormal_columns_is_orthonormal() {
        let a = sample(40, 10, 3);
        let q = a.orthonormal_columns().unwrap();
        let qtq = q.transpose().matmul(&q).unwrap();
        let eye = Matrix::identity(10);
        for (x, y) in qtq.as_slice().iter().zip(eye.as_slice()) {
            assert!((x - y).abs() < 1e-12);
        }
        // R = Q^T A must be upper triangular with a positive diagonal.
        let r = q.transpose().matmul(&a).unwrap();
        for i in 0..10 {
            assert!(r[(i, i)] > 0.0);
            for j in 0..i {
                assert!(r[(i, j)].abs() < 1e-12);
            }
        }
        assert!(sample(3, 4, 1).orthonormal_columns().is_err());
    }

    proptest! {
        #[test]
        fn matmul_is_associative(seed in any::<u64>(), n in 1usize..5, m in 1usize..5, p in 1usize..5, q in 1usize..5) {
            let a = sample(n, m, seed);
            let b = sample(m, p, seed ^ 0xABCD);
            let c = sample(p, q, seed ^ 0x1234);
            let left = a.matmul(&b).unwrap().matmul(&c).unwrap();
            let right = a.matmul(&b.matmul(&c).unwrap()).unwrap();
            for (x, y) in left.as_slice().iter().zip(right.as_slice()) {
                prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0));
            }
        }

        #[test]
        // tanh rounds to exactly ±1 in f64 beyond |x| ≈ 19.1.
        fn activations_stay_in_open_range(x in -18.0f64..18.0) {
            let s = x.sigmoid();
            let t = x.tanh();
            prop_assert!(s > 0.0 && s < 1.0);
            prop_assert!(t > -1.0 && t < 1.0);
        }

        #[test]
        fn ops_are_deterministic(seed in any::<u64>()) {
            let a = sample(4, 4, seed);
            let b = sample(4, 4, !seed);
            let x = a.matmul(&b).unwrap().sigmoid();
            let y = a.matmul(&b).unwrap().sigmoid();
            prop_assert_eq!(
                x.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                y.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
            );
        }
    }
}
