//! Small dense linear algebra kit: square matrices, LU with partial pivoting,
//! inverses and a power-iteration conditioning estimate.
//!
//! Row-parallel loops never reduce across threads, so results are bitwise
//! independent of the thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Square row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T: Scalar> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> T + Sync) -> Self {
        let mut data = vec![T::zero(); n * n];
        data.par_chunks_mut(n.max(1)).enumerate().for_each(|(i, row)| {
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(i, j);
            }
        });
        Self { n, data }
    }

    pub fn from_rows(n: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::LengthMismatch { expected: n * n, found: data.len() });
        }
        Ok(Self { n, data })
    }

    /// `M_ij = column[(i - j) mod n]`.
    pub fn circulant(column: &[T]) -> Self {
        let n = column.len();
        Self::from_fn(n, |i, j| column[(i + n - j) % n])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows_mut(&mut self) -> impl IndexedParallelIterator<Item = &mut [T]> {
        let n = self.n.max(1);
        self.data.par_chunks_mut(n)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn map(&self, f: impl Fn(T) -> T + Sync) -> Self {
        Self { n: self.n, data: self.data.par_iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T + Sync) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let data = self.data.par_iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Self { n: self.n, data }
    }

    pub fn add_diagonal(&mut self, d: &[T]) {
        for (i, &v) in d.iter().enumerate() {
            self.data[i * self.n + i] = self.data[i * self.n + i] + v;
        }
    }

    /// `self * diag(d)`.
    pub fn scale_columns(&self, d: &[T]) -> Self {
        let mut out = self.clone();
        out.rows_mut().for_each(|row| {
            for (v, &s) in row.iter_mut().zip(d) {
                *v = *v * s;
            }
        });
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        out.rows_mut().enumerate().for_each(|(i, row)| {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == T::zero() {
                    continue;
                }
                for (o, &b) in row.iter_mut().zip(other.row(k)) {
                    *o = *o + a * b;
                }
            }
        });
        out
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        (0..self.n)
            .into_par_iter()
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn transpose_matvec(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.n];
        for (i, &xi) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + a * xi;
            }
        }
        out
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    /// `max |M - M^T|`.
    pub fn symmetry_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in i + 1..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// `PA = LU` with unit lower `L`; both factors stored in one matrix.
#[derive(Clone, Debug)]
pub struct LuFactors<T: Scalar> {
    lu: DenseMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> LuFactors<T> {
    /// Fails with `NearSingularOperator` only on an exactly zero pivot; use
    /// [`condition_ratio`] for the quantitative check.
    pub fn new(a: &DenseMatrix<T>) -> Result<Self> {
        let n = a.dim();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu.get(i, k).abs()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pivot > T::zero()) {
                return Err(Error::NearSingularOperator { ratio: 0.0 });
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let (head, tail) = lu.data.split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n..];
            let inv = T::one() / pivot_row[k];
            tail.par_chunks_mut(n).for_each(|row| {
                let f = row[k] * inv;
                row[k] = f;
                if f != T::zero() {
                    for j in k + 1..n {
                        row[j] = row[j] - f * pivot_row[j];
                    }
                }
            });
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.dim()
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: T = row[..i].iter().zip(&x[..i]).map(|(&a, &v)| a * v).sum();
            x[i] = x[i] - s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: T = row[i + 1..].iter().zip(&x[i + 1..]).map(|(&a, &v)| a * v).sum();
            x[i] = (x[i] - s) / row[i];
        }
        x
    }

    /// Solves `A^T x = b`.
    pub fn solve_transpose(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        // A^T = U^T L^T P
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s = s - self.lu.get(k, i) * y[k];
            }
            y[i] = s / self.lu.get(i, i);
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s = s - self.lu.get(k, i) * y[k];
            }
            y[i] = s;
        }
        let mut x = vec![T::zero(); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }

    pub fn inverse(&self) -> DenseMatrix<T> {
        let n = self.dim();
        let columns: Vec<Vec<T>> = (0..n)
            .into_par_iter()
            .map(|j| {
                let mut e = vec![T::zero(); n];
                e[j] = T::one();
                self.solve(&e)
            })
            .collect();
        DenseMatrix::from_fn(n, |i, j| columns[j][i])
    }
}

fn start_vector<T: Scalar>(n: usize) -> Vec<T> {
    (0..n).map(|i| T::one() + lit::<T>(0.37) * lit::<T>((i as f64 * 0.7313).sin())).collect()
}

fn normalize<T: Scalar>(v: &mut [T]) -> T {
    let norm = v.iter().map(|&x| x * x).sum::<T>().sqrt();
    if norm > T::zero() {
        for x in v.iter_mut() {
            *x = *x / norm;
        }
    }
    norm
}

/// Largest singular value by power iteration on `op^T op`, given the action
/// of `op^T op` on a vector. Stops when the Rayleigh quotient changes by less
/// than `rel_tol` relative.
pub fn power_iteration<T: Scalar>(
    n: usize,
    normal_op: impl Fn(&[T]) -> Vec<T>,
    max_iter: usize,
    rel_tol: T,
) -> T {
    let mut v = start_vector::<T>(n);
    normalize(&mut v);
    let mut last = T::zero();
    for _ in 0..max_iter {
        let mut w = normal_op(&v);
        let rayleigh: T = v.iter().zip(&w).map(|(&a, &b)| a * b).sum();
        let norm = normalize(&mut w);
        if !(norm > T::zero()) || !rayleigh.is_finite() {
            return if rayleigh.is_finite() { T::zero() } else { T::infinity() };
        }
        v = w;
        if (rayleigh - last).abs() <= rel_tol * rayleigh.abs() {
            return rayleigh.max(T::zero()).sqrt();
        }
        last = rayleigh;
    }
    last.max(T::zero()).sqrt()
}

/// Estimate of `sigma_min / sigma_max` for `a` with factors `lu`.
pub fn condition_ratio<T: Scalar>(a: &DenseMatrix<T>, lu: &LuFactors<T>) -> T {
    let n = a.dim();
    let tol = lit::<T>(1e-6);
    let big = power_iteration(n, |v| a.transpose_matvec(&a.matvec(v)), 200, tol);
    let inv = power_iteration(n, |v| lu.solve(&lu.solve_transpose(v)), 200, tol);
    if !inv.is_finite() || inv == T::zero() {
        return T::zero();
    }
    T::one() / (big * inv)
}
