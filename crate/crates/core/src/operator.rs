//! Symmetric linear operators shared by the eigensolvers and norm routines.

use nalgebra::DMatrix;

/// A real symmetric matrix that can be applied to vectors and densified.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;

    /// `y <- A x`. `y` is overwritten.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    fn to_dense(&self) -> DMatrix<f64>;

    fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; self.dim()];
        self.apply(x, &mut y);
        dot(x, &y)
    }
}

impl SymmetricOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    fn to_dense(&self) -> DMatrix<f64> {
        self.clone()
    }
}

impl<T: SymmetricOperator + ?Sized> SymmetricOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (**self).apply(x, y)
    }

    fn to_dense(&self) -> DMatrix<f64> {
        (**self).to_dense()
    }
}

/// The operator `A - B`, evaluated lazily.
pub struct Difference<'a, A: ?Sized, B: ?Sized> {
    pub lhs: &'a A,
    pub rhs: &'a B,
}

impl<'a, A, B> Difference<'a, A, B>
where
    A: SymmetricOperator + ?Sized,
    B: SymmetricOperator + ?Sized,
{
    pub fn new(lhs: &'a A, rhs: &'a B) -> Self {
        Self { lhs, rhs }
    }
}

impl<A, B> SymmetricOperator for Difference<'_, A, B>
where
    A: SymmetricOperator + ?Sized,
    B: SymmetricOperator + ?Sized,
{
    fn dim(&self) -> usize {
        self.lhs.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut tmp = vec![0.0; y.len()];
        self.lhs.apply(x, y);
        self.rhs.apply(x, &mut tmp);
        for (a, b) in y.iter_mut().zip(&tmp) {
            *a -= b;
        }
    }

    fn to_dense(&self) -> DMatrix<f64> {
        self.lhs.to_dense() - self.rhs.to_dense()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
