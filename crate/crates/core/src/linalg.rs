//! Dense linear algebra over a field: determinants by Gaussian elimination,
//! linear solves, and the small matrix helpers the determinant lemmata need.

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{QuadExtScalar, Rational};

/// Field operations used by elimination. Exact fields pivot on the first
/// nonzero entry; inexact ones on the largest magnitude.
pub trait FieldScalar: Clone {
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;
    fn magnitude(&self) -> f64;
}

impl FieldScalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn magnitude(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).map_or(f64::INFINITY, f64::abs)
    }
}

impl FieldScalar for QuadExtScalar {
    const EXACT: bool = true;

    fn zero() -> Self {
        QuadExtScalar::zero()
    }
    fn one() -> Self {
        QuadExtScalar::one()
    }
    fn is_zero(&self) -> bool {
        QuadExtScalar::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        QuadExtScalar::conj(self)
    }
    fn magnitude(&self) -> f64 {
        self.to_float().norm()
    }
}

impl FieldScalar for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

fn pivot_row<T: FieldScalar>(m: &Matrix<T>, col: usize, from: usize) -> Option<usize> {
    if T::EXACT {
        (from..m.rows()).find(|&r| !m[(r, col)].is_zero())
    } else {
        (from..m.rows())
            .filter(|&r| !m[(r, col)].is_zero())
            .max_by(|&a, &b| m[(a, col)].magnitude().total_cmp(&m[(b, col)].magnitude()))
    }
}

fn swap_rows<T>(m: &mut Matrix<T>, a: usize, b: usize)
where
    T: Clone,
{
    if a == b {
        return;
    }
    for j in 0..m.cols() {
        let t = m[(a, j)].clone();
        m[(a, j)] = m[(b, j)].clone();
        m[(b, j)] = t;
    }
}

/// Determinant by Gaussian elimination. The empty matrix has determinant 1.
pub fn det<T: FieldScalar>(m: &Matrix<T>) -> T {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows();
    let mut a = m.clone();
    let mut acc = T::one();
    for k in 0..n {
        let Some(p) = pivot_row(&a, k, k) else {
            return T::zero();
        };
        if p != k {
            swap_rows(&mut a, p, k);
            acc = acc.neg();
        }
        let pivot = a[(k, k)].clone();
        acc = acc.mul(&pivot);
        for i in k + 1..n {
            if a[(i, k)].is_zero() {
                continue;
            }
            let factor = a[(i, k)].div(&pivot);
            for j in k + 1..n {
                let t = factor.mul(&a[(k, j)]);
                a[(i, j)] = a[(i, j)].sub(&t);
            }
        }
    }
    acc
}

/// Solves `A·X = B` by Gauss–Jordan elimination.
pub fn solve<T: FieldScalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    if !a.is_square() || a.rows() != b.rows() {
        return Err(Error::Dimension("solve needs square A with as many rows as B".into()));
    }
    let n = a.rows();
    let m = b.cols();
    let mut aug = Matrix::from_fn(n, n + m, |i, j| if j < n { a[(i, j)].clone() } else { b[(i, j - n)].clone() });
    for k in 0..n {
        let p = pivot_row(&aug, k, k).ok_or(Error::Singular)?;
        swap_rows(&mut aug, p, k);
        let inv = T::one().div(&aug[(k, k)]);
        for j in k..n + m {
            aug[(k, j)] = aug[(k, j)].mul(&inv);
        }
        for i in 0..n {
            if i == k || aug[(i, k)].is_zero() {
                continue;
            }
            let factor = aug[(i, k)].clone();
            for j in k..n + m {
                let t = factor.mul(&aug[(k, j)]);
                aug[(i, j)] = aug[(i, j)].sub(&t);
            }
        }
    }
    Ok(Matrix::from_fn(n, m, |i, j| aug[(i, n + j)].clone()))
}

pub fn mat_mul<T: FieldScalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    if a.cols() != b.rows() {
        return Err(Error::Dimension(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(Matrix::from_fn(a.rows(), b.cols(), |i, j| {
        (0..a.cols()).fold(T::zero(), |acc, t| acc.add(&a[(i, t)].mul(&b[(t, j)])))
    }))
}

pub fn mat_add<T: FieldScalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::Dimension("matrix sum of different shapes".into()));
    }
    Ok(Matrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)].add(&b[(i, j)])))
}

pub fn adjoint<T: FieldScalar>(a: &Matrix<T>) -> Matrix<T> {
    Matrix::from_fn(a.cols(), a.rows(), |i, j| a[(j, i)].conj())
}

pub fn identity<T: FieldScalar>(n: usize) -> Matrix<T> {
    Matrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    /// Leibniz expansion, independent of elimination.
    fn leibniz(m: &Matrix<Rational>) -> Rational {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let n = m.rows();
        perms(n)
            .into_iter()
            .map(|p| {
                let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
                let prod = (0..n).fold(int(1), |acc, i| acc * &m[(i, p[i])]);
                if inversions % 2 == 0 {
                    prod
                } else {
                    -prod
                }
            })
            .fold(int(0), |a, b| a + b)
    }

    #[test]
    fn exact_det_matches_leibniz() {
        let m = Matrix::from_fn(4, 4, |i, j| rat(((i * 7 + j * 3) % 5) as i64 - 2, (j + 1) as i64));
        assert_eq!(det(&m), leibniz(&m));
        let singular = Matrix::from_fn(3, 3, |i, j| int((i + j) as i64));
        assert_eq!(det(&singular), int(0));
        assert_eq!(det(&Matrix::<Rational>::from_vec(0, 0, vec![]).unwrap()), int(1));
    }

    #[test]
    fn solve_inverts() {
        let a = Matrix::from_rows(vec![vec![int(2), int(1)], vec![int(1), int(3)]]).unwrap();
        let x = solve(&a, &identity(2)).unwrap();
        assert_eq!(mat_mul(&a, &x).unwrap(), identity(2));
        let s = Matrix::from_rows(vec![vec![int(1), int(2)], vec![int(2), int(4)]]).unwrap();
        assert!(matches!(solve(&s, &identity(2)), Err(Error::Singular)));
    }

    #[test]
    fn float_det() {
        let m = Matrix::from_rows(vec![
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            vec![Complex64::new(0.0, 1.0), Complex64::new(2.0, 0.0)],
        ])
        .unwrap();
        assert!((det(&m) - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }
}
