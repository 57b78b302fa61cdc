//! Dense exact linear algebra over a field.
//!
//! Everything here is deterministic: pivots are chosen as the first nonzero
//! entry scanning top to bottom within the leftmost remaining column, so
//! kernels, quotient bases and particular solutions are reproducible.
//!
//! Matrices are dense, but elimination and multiplication skip zero entries,
//! which keeps the very sparse systems produced by bimodule computations cheap.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// An exact field usable as the scalar type of every computation in the crate.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + 'static
{
    fn from_rational(q: &BigRational) -> Self;
    fn to_rational(&self) -> BigRational;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self.clone() * rhs.clone()
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        *self = self.clone() + rhs.clone();
    }

    /// `self -= a * b`
    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        *self = self.clone() - a.clone() * b.clone();
    }

    fn inv(&self) -> Self {
        Self::one() / self.clone()
    }
}

impl Field for BigRational {
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn to_rational(&self) -> BigRational {
        self.clone()
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }

    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *self -= a * b;
    }

    fn inv(&self) -> Self {
        self.recip()
    }
}

/// Machine-word rationals. Fast, but overflow panics; only suitable for small inputs.
impl Field for Ratio<i64> {
    fn from_rational(q: &BigRational) -> Self {
        let n = q.numer().to_i64().expect("numerator exceeds i64");
        let d = q.denom().to_i64().expect("denominator exceeds i64");
        Ratio::new(n, d)
    }

    fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

#[derive(Clone, PartialEq)]
pub struct Mat<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, PartialEq)]
pub struct Rref<F> {
    pub matrix: Mat<F>,
    pub pivots: Vec<usize>,
}

impl<F: Field> Mat<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = F::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<F>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows * cols");
        Mat { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Builds a matrix from rows; every row must have length `cols`.
    pub fn from_rows(rows: Vec<Vec<F>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows");
            data.extend(row);
        }
        Mat { rows: r, cols, data }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| F::from_i64(x)).collect())
                .collect(),
            cols,
        )
    }

    /// Matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(columns: &[Vec<F>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                m.data[i * m.cols + j] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: F) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<F>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|x| !x.is_zero()).count()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, s: &F) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.mul_ref(s)).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.cols, "vector length must equal column count");
        (0..self.rows)
            .map(|i| {
                let mut acc = F::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc.add_assign_ref(&a.mul_ref(b));
                    }
                }
                acc
            })
            .collect()
    }

    /// Kronecker product; index `(i * rhs.rows + k, j * rhs.cols + l)` holds `a_ij * b_kl`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        let b = rhs.get(k, l);
                        if !b.is_zero() {
                            out.set(i * rhs.rows + k, j * rhs.cols + l, a.mul_ref(b));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn block_diag(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.rows + rhs.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..rhs.rows {
            for j in 0..rhs.cols {
                out.set(self.rows + i, self.cols + j, rhs.get(i, j).clone());
            }
        }
        out
    }

    pub fn hstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows, "hstack needs equal row counts");
        Self::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                rhs.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.cols, "vstack needs equal column counts");
        let mut data = self.data.clone();
        data.extend(rhs.data.iter().cloned());
        Mat {
            rows: self.rows + rhs.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), self.cols, |i, j| self.get(idx[i], j).clone())
    }

    /// Simultaneous conjugation `P · self · P⁻¹` expressed through an explicit inverse.
    pub fn conjugate(&self, p: &Self, p_inv: &Self) -> Self {
        &(p * self) * p_inv
    }

    pub fn rref(&self) -> Rref<F> {
        let mut rows = self.to_rows();
        let pivots = rref_in_place(&mut rows, self.cols);
        Rref {
            matrix: Mat::from_rows(rows, self.cols),
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.to_rows();
        rref_in_place(&mut rows, self.cols).len()
    }

    /// Basis of the null space, as the columns of the returned matrix.
    ///
    /// Free variables are taken in increasing order, each set to one in turn.
    pub fn kernel_basis(&self) -> Self {
        let mut rows = self.to_rows();
        let pivots = rref_in_place(&mut rows, self.cols);
        kernel_from_rref(&rows, &pivots, self.cols)
    }

    /// Kernel basis together with the free coordinates; the basis restricted
    /// to those rows is the identity, so they serve as coordinates on the kernel.
    pub fn kernel_with_free(&self) -> (Self, Vec<usize>) {
        let mut rows = self.to_rows();
        let pivots = rref_in_place(&mut rows, self.cols);
        let free = (0..self.cols).filter(|j| !pivots.contains(j)).collect();
        (kernel_from_rref(&rows, &pivots, self.cols), free)
    }

    /// Particular solution of `self · x = b` with every free variable zero.
    pub fn solve(&self, b: &[F]) -> Result<Option<Vec<F>>, LinalgError> {
        if b.len() != self.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "right-hand side has length {} but matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let mut rows: Vec<Vec<F>> = (0..self.rows)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.push(b[i].clone());
                r
            })
            .collect();
        let pivots = rref_in_place(&mut rows, self.cols + 1);
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![F::zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = rows[r][self.cols].clone();
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut rows: Vec<Vec<F>> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
                r
            })
            .collect();
        let pivots = rref_in_place(&mut rows, 2 * n);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Mat::from_rows(rows.into_iter().map(|r| r[n..].to_vec()).collect(), n))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Basis of the column space, taken from the pivot columns of `self`.
    pub fn column_space(&self) -> Self {
        let r = self.rref();
        self.select_columns(&r.pivots)
    }

    pub fn pow2(&self) -> Self {
        self * self
    }
}

impl<F: Field> fmt::Debug for Mat<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat {}x{} ", self.rows, self.cols)?;
        let rows = (0..self.rows).map(|i| {
            self.data[i * self.cols..(i + 1) * self.cols]
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
        });
        f.debug_list().entries(rows).finish()
    }
}

impl<F: Field> fmt::Debug for Rref<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Rref").field("matrix", &self.matrix).field("pivots", &self.pivots).finish()
    }
}

impl<F: Field> fmt::Debug for LinearQuotient<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearQuotient").field("kept", &self.kept).field("projection", &self.projection).finish()
    }
}

impl<F: Field> fmt::Display for Mat<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

impl<'a, F: Field> Mul<&'a Mat<F>> for &'a Mat<F> {
    type Output = Mat<F>;

    fn mul(self, rhs: &'a Mat<F>) -> Mat<F> {
        assert_eq!(
            self.cols, rhs.rows,
            "cannot multiply {}x{} by {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Mat::<F>::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j].add_assign_ref(&a.mul_ref(b));
                    }
                }
            }
        }
        out
    }
}

impl<'a, F: Field> Add<&'a Mat<F>> for &'a Mat<F> {
    type Output = Mat<F>;

    fn add(self, rhs: &'a Mat<F>) -> Mat<F> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

impl<'a, F: Field> Sub<&'a Mat<F>> for &'a Mat<F> {
    type Output = Mat<F>;

    fn sub(self, rhs: &'a Mat<F>) -> Mat<F> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }
}

impl<F: Field> Neg for &Mat<F> {
    type Output = Mat<F>;

    fn neg(self) -> Mat<F> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x.clone()).collect(),
        }
    }
}

/// Gauss-Jordan elimination on a row list; returns the pivot columns.
pub fn rref_in_place<F: Field>(rows: &mut [Vec<F>], ncols: usize) -> Vec<usize> {
    let nrows = rows.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let mut pivot_row = std::mem::take(&mut rows[r]);
        let support: Vec<usize> = (c..ncols).filter(|&j| !pivot_row[j].is_zero()).collect();
        if !pivot_row[c].is_one() {
            let inv = pivot_row[c].inv();
            for &j in &support {
                pivot_row[j] = pivot_row[j].mul_ref(&inv);
            }
        }
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for &j in &support {
                row[j].sub_mul_assign(&factor, &pivot_row[j]);
            }
        }
        rows[r] = pivot_row;
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn kernel_from_rref<F: Field>(rows: &[Vec<F>], pivots: &[usize], ncols: usize) -> Mat<F> {
    let mut is_pivot = vec![false; ncols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..ncols).filter(|&j| !is_pivot[j]).collect();
    let mut k = Mat::zeros(ncols, free.len());
    for (t, &f) in free.iter().enumerate() {
        k.set(f, t, F::one());
        for (r, &p) in pivots.iter().enumerate() {
            let x = &rows[r][f];
            if !x.is_zero() {
                k.set(p, t, -x.clone());
            }
        }
    }
    k
}

/// Kernel basis of the system given as a row list (consumed).
pub fn kernel_of_rows<F: Field>(mut rows: Vec<Vec<F>>, ncols: usize) -> Mat<F> {
    let pivots = rref_in_place(&mut rows, ncols);
    kernel_from_rref(&rows, &pivots, ncols)
}

/// Linear quotient `k^d / U`, with `U` spanned by the given row vectors.
///
/// The quotient basis is the image of the standard basis vectors at the
/// non-pivot coordinates of `rref(U)`, in increasing order.
#[derive(Clone)]
pub struct LinearQuotient<F> {
    /// `q × d` map sending a vector to its class.
    pub projection: Mat<F>,
    /// `d × q` map sending a class to its standard representative.
    pub section: Mat<F>,
    /// Ambient coordinates kept as quotient basis.
    pub kept: Vec<usize>,
}

impl<F: Field> LinearQuotient<F> {
    pub fn new(mut spanning_rows: Vec<Vec<F>>, ambient: usize) -> Self {
        let pivots = rref_in_place(&mut spanning_rows, ambient);
        let mut is_pivot = vec![false; ambient];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let kept: Vec<usize> = (0..ambient).filter(|&j| !is_pivot[j]).collect();
        let mut projection = Mat::zeros(kept.len(), ambient);
        let mut section = Mat::zeros(ambient, kept.len());
        for (t, &f) in kept.iter().enumerate() {
            projection.set(t, f, F::one());
            section.set(f, t, F::one());
            for (r, &p) in pivots.iter().enumerate() {
                let x = &spanning_rows[r][f];
                if !x.is_zero() {
                    projection.set(t, p, -x.clone());
                }
            }
        }
        LinearQuotient {
            projection,
            section,
            kept,
        }
    }

    pub fn dim(&self) -> usize {
        self.kept.len()
    }
}

/// Coefficients expressing `target` in the span of `vectors`, if it lies there.
pub fn express_in_span<F: Field>(vectors: &[Vec<F>], target: &[F]) -> Option<Vec<F>> {
    let n = target.len();
    let a = Mat::from_columns(vectors, n);
    a.solve(target).expect("lengths checked by from_columns")
}

pub fn vec_is_zero<F: Field>(v: &[F]) -> bool {
    v.iter().all(Zero::is_zero)
}
