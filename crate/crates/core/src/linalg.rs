//! Dense matrices over a [`Coeff`] field.
//!
//! Elimination routines take a tolerance that only matters for doubles;
//! over the rationals every decision is exact.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::field::Coeff;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<C> {
    rows: usize,
    cols: usize,
    data: Vec<C>,
}

impl<C: Coeff> Matrix<C> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![C::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<C>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
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

    pub fn row(&self, i: usize) -> &[C] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out[(i, j)].add_ref(&a.mul_ref(&other[(k, j)]));
                    out[(i, j)] = v;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.add_ref(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&C, &C) -> C) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("shape mismatch".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, c: &C) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v.mul_ref(c)).collect() }
    }

    pub fn trace(&self) -> C {
        (0..self.rows.min(self.cols)).fold(C::zero(), |acc, i| acc.add_ref(&self[(i, i)]))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.magnitude()).fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)].clone() - self[(j, i)].clone()).is_negligible(tol)))
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Matrix<D> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(|v| v.to_f64())
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> Result<C> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = C::one();
        for col in 0..n {
            let piv = (col..n)
                .filter(|&r| !a[(r, col)].is_zero())
                .max_by(|&x, &y| a[(x, col)].magnitude().total_cmp(&a[(y, col)].magnitude()));
            let piv = match piv {
                Some(p) => p,
                None => return Ok(C::zero()),
            };
            if piv != col {
                a.swap_rows(piv, col);
                det = -det;
            }
            let p = a[(col, col)].clone();
            det = det.mul_ref(&p);
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone() / p.clone();
                for c in col..n {
                    let v = a[(r, c)].clone() - f.mul_ref(&a[(col, c)]);
                    a[(r, c)] = v;
                }
            }
        }
        Ok(det)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    /// Coefficients `c_0, ..., c_n` (lowest first) of `det(tI - self)`,
    /// by the Faddeev–LeVerrier trace recursion.
    pub fn charpoly(&self) -> Result<Vec<C>> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut coeffs = vec![C::zero(); n + 1];
        coeffs[n] = C::one();
        let mut m = Self::zeros(n, n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            let mut next = self.mul(&m)?;
            for i in 0..n {
                next[(i, i)] = next[(i, i)].add_ref(&coeffs[n - k + 1]);
            }
            let am = self.mul(&next)?;
            coeffs[n - k] = -(am.trace() / C::from_i64(k as i64));
            m = next;
        }
        Ok(coeffs)
    }

    /// Rank under the relative tolerance `tol` (exact over the rationals).
    pub fn rank(&self, tol: f64) -> usize {
        let mut a = self.clone();
        a.row_reduce(self.cols, tol).len()
    }

    /// In-place reduced row echelon form on the first `ncols` columns.
    /// Returns the pivot columns.
    pub(crate) fn row_reduce(&mut self, ncols: usize, tol: f64) -> Vec<usize> {
        let thresh = tol * self.max_abs().max(1.0);
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..ncols {
            if row >= self.rows {
                break;
            }
            let piv = (row..self.rows)
                .max_by(|&x, &y| self[(x, col)].magnitude().total_cmp(&self[(y, col)].magnitude()))
                .unwrap();
            if self[(piv, col)].is_negligible(thresh) {
                if !C::EXACT {
                    for r in row..self.rows {
                        self[(r, col)] = C::zero();
                    }
                }
                continue;
            }
            self.swap_rows(piv, row);
            let p = self[(row, col)].clone();
            for c in col..self.cols {
                let v = self[(row, c)].clone() / p.clone();
                self[(row, c)] = v;
            }
            for r in 0..self.rows {
                if r == row || self[(r, col)].is_zero() {
                    continue;
                }
                let f = self[(r, col)].clone();
                for c in col..self.cols {
                    let v = self[(r, c)].clone() - f.mul_ref(&self[(row, c)]);
                    self[(r, c)] = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// Solves `self · u = rhs`.
    pub fn solve_system(&self, rhs: &[C], tol: f64) -> Result<LinearSolution<C>> {
        if rhs.len() != self.rows {
            return Err(Error::Dimension("right-hand side length".into()));
        }
        let n = self.cols;
        let mut aug =
            Matrix::from_fn(self.rows, n + 1, |i, j| if j < n { self[(i, j)].clone() } else { rhs[i].clone() });
        let rank_a = aug.clone().row_reduce(n, tol).len();
        let pivots = aug.row_reduce(n + 1, tol);
        let rank_ab = pivots.len();
        if pivots.last() == Some(&n) {
            return Ok(LinearSolution::Inconsistent { rank: rank_a, augmented_rank: rank_ab });
        }
        let mut particular = vec![C::zero(); n];
        for (r, &c) in pivots.iter().enumerate() {
            particular[c] = aug[(r, n)].clone();
        }
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let nullspace = free
            .iter()
            .map(|&f| {
                let mut v = vec![C::zero(); n];
                v[f] = C::one();
                for (r, &c) in pivots.iter().enumerate() {
                    v[c] = -aug[(r, f)].clone();
                }
                v
            })
            .collect();
        Ok(LinearSolution::Consistent { particular, nullspace })
    }
}

/// Factors a symmetric positive semidefinite `s` as `Σ v vᵀ`.
///
/// Outer-product Cholesky with diagonal pivoting. Over an exact field the
/// first pivot with a square root in the field is taken, so a matrix given
/// as `V Vᵀ` with `V` lower triangular factors back exactly; `Ok(None)`
/// means no such pivot exists. Over doubles the largest pivot is taken and
/// pivots at most `tol` end the factorization. Fails if `s` is not PSD.
pub fn psd_factor<C: Coeff>(s: &Matrix<C>, tol: f64) -> Result<Option<Vec<Vec<C>>>> {
    if !s.is_symmetric(tol) {
        return Err(Error::NotSymmetric);
    }
    let n = s.rows();
    let mut a = s.clone();
    let mut out = Vec::new();
    loop {
        if (0..n).any(|i| a[(i, i)].is_negative() && !a[(i, i)].is_negligible(tol)) {
            return Err(Error::Invalid("matrix is not positive semidefinite".into()));
        }
        let live: Vec<usize> = (0..n).filter(|&i| !a[(i, i)].is_negligible(tol)).collect();
        if live.is_empty() {
            let off =
                (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).any(|(i, j)| !a[(i, j)].is_negligible(tol.sqrt()));
            if off {
                return Err(Error::Invalid("matrix is not positive semidefinite".into()));
            }
            return Ok(Some(out));
        }
        let pivot = if C::EXACT {
            match live.iter().find(|&&i| a[(i, i)].sqrt_opt().is_some()) {
                Some(&i) => i,
                None => return Ok(None),
            }
        } else {
            // Ties go to the first index, so equal pivots keep their order.
            live.iter().copied().fold(live[0], |best, i| {
                if a[(i, i)].magnitude() > a[(best, best)].magnitude() {
                    i
                } else {
                    best
                }
            })
        };
        let root = a[(pivot, pivot)].sqrt_opt().expect("pivot has a square root");
        let v: Vec<C> = (0..n).map(|i| a[(i, pivot)].clone() / root.clone()).collect();
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = a[(i, j)].clone() - v[i].mul_ref(&v[j]);
            }
        }
        // The pivot row and column are eliminated exactly.
        for i in 0..n {
            a[(i, pivot)] = C::zero();
            a[(pivot, i)] = C::zero();
        }
        out.push(v);
    }
}

/// Outcome of [`Matrix::solve_system`].
#[derive(Clone, Debug)]
pub enum LinearSolution<C> {
    Consistent { particular: Vec<C>, nullspace: Vec<Vec<C>> },
    Inconsistent { rank: usize, augmented_rank: usize },
}

impl<C> std::ops::Index<(usize, usize)> for Matrix<C> {
    type Output = C;
    fn index(&self, (i, j): (usize, usize)) -> &C {
        &self.data[i * self.cols + j]
    }
}

impl<C> std::ops::IndexMut<(usize, usize)> for Matrix<C> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C {
        &mut self.data[i * self.cols + j]
    }
}

impl Matrix<f64> {
    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<f64>) -> Self {
        Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    /// Eigenvalues of the symmetric part, ascending.
    pub fn symmetric_eigenvalues(&self) -> Vec<f64> {
        let m = self.to_nalgebra();
        let s = (&m + m.transpose()) * 0.5;
        let mut ev: Vec<f64> = s.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Number of sign changes in a coefficient sequence, zeros skipped.
pub fn sign_variations<C: Coeff>(coeffs: &[C]) -> usize {
    let mut last: Option<bool> = None;
    let mut count = 0;
    for c in coeffs.iter().filter(|c| !c.is_zero()) {
        let neg = c.is_negative();
        if let Some(prev) = last {
            if prev != neg {
                count += 1;
            }
        }
        last = Some(neg);
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, Rational};

    fn qm(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect()).unwrap()
    }

    #[test]
    fn determinant_and_charpoly() {
        let a = qm(&[&[2, 3], &[3, 5]]);
        assert_eq!(a.det().unwrap(), rat(1));
        // t^2 - 7t + 1
        assert_eq!(a.charpoly().unwrap(), vec![rat(1), rat(-7), rat(1)]);
        let b = qm(&[&[0, 1, 2], &[1, 0, 3], &[2, 3, 0]]);
        let cp = b.charpoly().unwrap();
        assert_eq!(cp[0], -b.det().unwrap());
        assert_eq!(cp[2], rat(0));
    }

    #[test]
    fn rank_and_systems() {
        let a = qm(&[&[1, 2], &[2, 4]]);
        assert_eq!(a.rank(0.0), 1);
        match a.solve_system(&[rat(1), rat(3)], 0.0).unwrap() {
            LinearSolution::Inconsistent { rank, augmented_rank } => {
                assert_eq!((rank, augmented_rank), (1, 2))
            }
            other => panic!("{other:?}"),
        }
        match a.solve_system(&[rat(1), rat(2)], 0.0).unwrap() {
            LinearSolution::Consistent { particular, nullspace } => {
                assert_eq!(particular, vec![rat(1), rat(0)]);
                assert_eq!(nullspace, vec![vec![rat(-2), rat(1)]]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sign_changes() {
        assert_eq!(sign_variations(&[rat(2), rat(-3), rat(1)]), 2);
        assert_eq!(sign_variations(&[rat(1), rat(0), rat(1)]), 0);
        assert_eq!(sign_variations::<Rational>(&[]), 0);
    }
}
