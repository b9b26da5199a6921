//! Matrices with polynomial entries.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::field::Coeff;
use crate::linalg::Matrix;
use crate::poly::Polynomial;

/// Default size bound for symbolic determinants.
pub const DET_LIMIT: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix<C: Coeff> {
    rows: usize,
    cols: usize,
    nvars: usize,
    entries: Vec<Polynomial<C>>,
}

impl<C: Coeff> PolyMatrix<C> {
    pub fn zeros(rows: usize, cols: usize, nvars: usize) -> Self {
        PolyMatrix { rows, cols, nvars, entries: vec![Polynomial::zero(nvars); rows * cols] }
    }

    pub fn identity(n: usize, nvars: usize) -> Self {
        let mut m = Self::zeros(n, n, nvars);
        for i in 0..n {
            m[(i, i)] = Polynomial::one(nvars);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, nvars: usize, f: impl Fn(usize, usize) -> Polynomial<C>) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let e = f(i, j);
                assert_eq!(e.nvars(), nvars, "entry ({i},{j}) has the wrong variable count");
                entries.push(e);
            }
        }
        PolyMatrix { rows, cols, nvars, entries }
    }

    /// Builds from rows; entries are lifted to the largest variable count.
    pub fn from_rows(rows: Vec<Vec<Polynomial<C>>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let nvars = rows.iter().flatten().map(Polynomial::nvars).max().unwrap_or(0);
        let entries = rows.into_iter().flatten().map(|p| p.with_nvars(nvars)).collect();
        Ok(PolyMatrix { rows: r, cols: c, nvars, entries })
    }

    pub fn from_scalar(m: &Matrix<C>, nvars: usize) -> Self {
        Self::from_fn(m.rows(), m.cols(), nvars, |i, j| Polynomial::constant(nvars, m[(i, j)].clone()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> impl Iterator<Item = &Polynomial<C>> {
        self.entries.iter()
    }

    pub fn with_nvars(&self, n: usize) -> Self {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            nvars: n,
            entries: self.entries.iter().map(|p| p.with_nvars(n)).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.nvars, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        if self.nvars != other.nvars {
            return Err(Error::NvarsMismatch(self.nvars, other.nvars));
        }
        let mut out = Self::zeros(self.rows, other.cols, self.nvars);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let v = &out[(i, j)] + &(a * b);
                    out[(i, j)] = v;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Self, f: impl Fn(&Polynomial<C>, &Polynomial<C>) -> Polynomial<C>) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("shape mismatch".into()));
        }
        if self.nvars != other.nvars {
            return Err(Error::NvarsMismatch(self.nvars, other.nvars));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect();
        Ok(PolyMatrix { rows: self.rows, cols: self.cols, nvars: self.nvars, entries })
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map_entries(|p| p.scale(c))
    }

    pub fn scale_poly(&self, p: &Polynomial<C>) -> Self {
        self.map_entries(|e| e * p)
    }

    pub fn map_entries(&self, f: impl Fn(&Polynomial<C>) -> Polynomial<C>) -> Self {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D + Copy) -> PolyMatrix<D> {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            entries: self.entries.iter().map(|p| p.map_coeffs(f)).collect(),
        }
    }

    pub fn to_f64(&self) -> PolyMatrix<f64> {
        self.map_coeffs(|c| c.to_f64())
    }

    pub fn evaluate(&self, point: &[C]) -> Matrix<C> {
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].evaluate(point))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)].approx_eq(&self[(j, i)], tol)))
    }

    /// Entrywise [`Polynomial::approx_eq`].
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.entries.iter().zip(&other.entries).all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max)
    }

    pub fn det(&self) -> Result<Polynomial<C>> {
        self.det_with_limit(DET_LIMIT)
    }

    /// Cofactor expansion along rows with memoized minors: the minor on the
    /// first `|S|` rows and the column set `S` is computed once per `S`.
    pub fn det_with_limit(&self, limit: usize) -> Result<Polynomial<C>> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        if self.rows > limit {
            return Err(Error::TooLarge { size: self.rows, limit });
        }
        let cols: Vec<usize> = (0..self.cols).collect();
        Ok(minor_det(self, &cols, &mut HashMap::new()))
    }

    /// Matrix with row `skip_row` and column `skip_col` removed.
    fn minor(&self, skip_row: usize, skip_col: usize) -> Self {
        let rows: Vec<usize> = (0..self.rows).filter(|&r| r != skip_row).collect();
        let cols: Vec<usize> = (0..self.cols).filter(|&c| c != skip_col).collect();
        Self::from_fn(rows.len(), cols.len(), self.nvars, |i, j| self[(rows[i], cols[j])].clone())
    }

    /// `adj(m)` with `m · adj(m) = det(m) · I`.
    pub fn adjugate(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n > DET_LIMIT + 1 {
            return Err(Error::TooLarge { size: n, limit: DET_LIMIT + 1 });
        }
        let mut out = Self::zeros(n, n, self.nvars);
        if n == 1 {
            out[(0, 0)] = Polynomial::one(self.nvars);
            return Ok(out);
        }
        for i in 0..n {
            for j in 0..n {
                let d = self.minor(j, i).det_with_limit(DET_LIMIT)?;
                out[(i, j)] = if (i + j) % 2 == 0 { d } else { -&d };
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> Polynomial<C> {
        let mut acc = Polynomial::zero(self.nvars);
        for i in 0..self.rows.min(self.cols) {
            acc = &acc + &self[(i, i)];
        }
        acc
    }

    /// `self^k` for square matrices.
    pub fn pow(&self, k: u32) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let mut out = Self::identity(self.rows, self.nvars);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }
}

fn minor_det<C: Coeff>(m: &PolyMatrix<C>, cols: &[usize], memo: &mut HashMap<u32, Polynomial<C>>) -> Polynomial<C> {
    let k = cols.len();
    if k == 0 {
        return Polynomial::one(m.nvars);
    }
    let mask: u32 = cols.iter().map(|&c| 1u32 << c).sum();
    if let Some(v) = memo.get(&mask) {
        return v.clone();
    }
    let row = k - 1;
    let mut acc = Polynomial::zero(m.nvars);
    let mut rest = Vec::with_capacity(k - 1);
    for (pos, &c) in cols.iter().enumerate() {
        let a = &m[(row, c)];
        if a.is_zero() {
            continue;
        }
        rest.clear();
        rest.extend(cols.iter().copied().filter(|&x| x != c));
        let sub = minor_det(m, &rest, memo);
        let term = a * &sub;
        acc = if (row + pos).is_multiple_of(2) { &acc + &term } else { &acc - &term };
    }
    memo.insert(mask, acc.clone());
    acc
}

impl<C: Coeff> std::ops::Index<(usize, usize)> for PolyMatrix<C> {
    type Output = Polynomial<C>;
    fn index(&self, (i, j): (usize, usize)) -> &Polynomial<C> {
        &self.entries[i * self.cols + j]
    }
}

impl<C: Coeff> std::ops::IndexMut<(usize, usize)> for PolyMatrix<C> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Polynomial<C> {
        &mut self.entries[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::QPoly;

    fn pm(rows: &[&[&str]]) -> PolyMatrix<crate::field::Rational> {
        PolyMatrix::from_rows(rows.iter().map(|r| r.iter().map(|s| QPoly::parse(s).unwrap()).collect()).collect())
            .unwrap()
    }

    #[test]
    fn small_determinants() {
        assert_eq!(pm(&[&["1", "x1"], &["x1", "1"]]).det().unwrap(), QPoly::parse("1 - x1^2").unwrap());
        let m = pm(&[&["x1", "1", "0"], &["0", "x2", "1"], &["1", "0", "x1*x2"]]);
        // x1*(x2*x1*x2 - 0) - 1*(0 - 1) + 0
        assert_eq!(m.det().unwrap(), QPoly::parse("x1^2*x2^2 + 1").unwrap());
    }

    #[test]
    fn non_square_rejected() {
        let m = pm(&[&["1", "x1"]]);
        assert!(matches!(m.det(), Err(Error::NotSquare { .. })));
        assert!(matches!(m.adjugate(), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn size_bound() {
        let m = PolyMatrix::<f64>::identity(13, 1);
        assert!(matches!(m.det(), Err(Error::TooLarge { size: 13, limit: 12 })));
        assert_eq!(m.det_with_limit(13).unwrap(), Polynomial::one(1));
    }

    #[test]
    fn adjugate_closed_forms() {
        let i2 = PolyMatrix::<crate::field::Rational>::identity(2, 4);
        assert_eq!(i2.adjugate().unwrap(), i2);
        let m = pm(&[&["x1", "x2"], &["x3", "x4"]]);
        assert_eq!(m.adjugate().unwrap(), pm(&[&["x4", "-x2"], &["-x3", "x1"]]));
    }
}
