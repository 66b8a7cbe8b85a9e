//! Dense matrices over a [`DiffScalar`] with exact zero tests.
//!
//! Indices are 0-based. Matrices may have zero rows or columns; every matrix keeps
//! a zero element of its backend so that empty shapes still know their context.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::DiffScalar;

#[derive(Clone, Debug)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
    zero: E,
}

impl<E: PartialEq> PartialEq for Matrix<E> {
    fn eq(&self, o: &Self) -> bool {
        self.rows == o.rows && self.cols == o.cols && self.data == o.data
    }
}

/// Elimination strategy for [`Matrix::rank_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Elimination {
    /// Plain Gaussian elimination keeping entries as field elements.
    Fractions,
    /// Bareiss elimination: exact division by the previous pivot.
    FractionFree,
}

impl<E: DiffScalar> Matrix<E> {
    pub fn zeros(rows: usize, cols: usize, zero: &E) -> Self {
        let zero = zero.zero_like();
        Matrix { rows, cols, data: vec![zero.clone(); rows * cols], zero }
    }

    pub fn identity(size: usize, zero: &E) -> Self {
        let mut m = Matrix::zeros(size, size, zero);
        for i in 0..size {
            m.data[i * size + i] = zero.one_like();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<E>>, zero: &E) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect(), zero: zero.zero_like() }
    }

    pub fn from_fn(rows: usize, cols: usize, zero: &E, f: impl Fn(usize, usize) -> E) -> Self {
        let data = (0..rows * cols).map(|p| f(p / cols, p % cols)).collect();
        Matrix { rows, cols, data, zero: zero.zero_like() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn zero_element(&self) -> &E {
        &self.zero
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: E) {
        assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[E] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn map<F: DiffScalar>(&self, zero: &F, f: impl Fn(&E) -> F) -> Matrix<F> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect(), zero: zero.zero_like() }
    }

    pub fn try_map(&self, f: impl Fn(&E) -> Result<E> + Sync + Send) -> Result<Self> {
        let data = self.data.par_iter().map(f).collect::<Result<Vec<_>>>()?;
        let zero = self.data.first().map_or_else(|| self.zero.clone(), |e| e.zero_like());
        Ok(Matrix { rows: self.rows, cols: self.cols, data, zero })
    }

    /// Rows and columns picked by index lists (in the given order).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), &self.zero, |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, &self.zero, |i, j| self.get(j, i).clone())
    }

    fn check_shape(&self, o: &Self) -> Result<()> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::InvalidInput(format!(
                "shape mismatch {}x{} vs {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_shape(o)?;
        let data = self.data.par_iter().zip(&o.data).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, data, zero: self.zero.clone() })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check_shape(o)?;
        let data = self.data.par_iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect::<Result<_>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, data, zero: self.zero.clone() })
    }

    pub fn neg(&self) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|e| e.neg()).collect(), zero: self.zero.clone() }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::InvalidInput(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let data = (0..self.rows * o.cols)
            .into_par_iter()
            .map(|p| {
                let (i, j) = (p / o.cols, p % o.cols);
                let mut acc = self.zero.clone();
                for l in 0..self.cols {
                    let a = self.get(i, l);
                    if a.is_zero() {
                        continue;
                    }
                    let b = o.get(l, j);
                    if b.is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(b)?)?;
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        Ok(Matrix { rows: self.rows, cols: o.cols, data, zero: self.zero.clone() })
    }

    /// Entrywise derivative along coordinate `k` (0-based).
    pub fn entrywise_partial(&self, k: usize) -> Result<Self> {
        let data = self.data.par_iter().map(|e| e.partial(k)).collect::<Result<Vec<_>>>()?;
        let zero = match self.zero.partial(k) {
            Ok(z) => z,
            Err(_) => self.zero.clone(),
        };
        Ok(Matrix { rows: self.rows, cols: self.cols, data, zero })
    }

    pub fn rank(&self) -> usize {
        self.rank_with(Elimination::Fractions)
    }

    /// Rank over the fraction field; for jets, the rank at the base point.
    pub fn rank_with(&self, mode: Elimination) -> usize {
        let mut a: Vec<Vec<E>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        let mut prev: Option<E> = None;
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| a[i][c].is_unit()) else {
                continue;
            };
            a.swap(r, p);
            let (top, rest) = a.split_at_mut(r + 1);
            let pivot_row = &top[r];
            let piv = pivot_row[c].clone();
            let res: Result<()> = rest.par_iter_mut().try_for_each(|row| {
                match mode {
                    Elimination::Fractions => {
                        if row[c].is_zero() {
                            return Ok(());
                        }
                        let f = row[c].div(&piv)?;
                        for j in c..self.cols {
                            if !pivot_row[j].is_zero() {
                                row[j] = row[j].sub(&f.mul(&pivot_row[j])?)?;
                            }
                        }
                    }
                    Elimination::FractionFree => {
                        let f = row[c].clone();
                        for j in c..self.cols {
                            let mut v = row[j].mul(&piv)?.sub(&f.mul(&pivot_row[j])?)?;
                            if let Some(d) = &prev {
                                v = v.div(d)?;
                            }
                            row[j] = v;
                        }
                    }
                }
                Ok(())
            });
            res.expect("unit pivot division cannot fail");
            prev = Some(piv);
            r += 1;
        }
        r
    }

    /// Solves `self · X = b` for square invertible `self`.
    pub fn solve_square(&self, b: &Self) -> Result<Self> {
        if self.rows != self.cols || b.rows != self.rows {
            return Err(Error::InvalidInput("solve_square needs a square system".into()));
        }
        let n = self.rows;
        let m = b.cols;
        let mut a: Vec<Vec<E>> = (0..n).map(|i| self.row(i).iter().chain(b.row(i)).cloned().collect()).collect();
        for c in 0..n {
            let p = (c..n).find(|&i| a[i][c].is_unit()).ok_or(Error::SingularMatrix)?;
            a.swap(c, p);
            let inv = a[c][c].one_like().div(&a[c][c])?;
            let scaled: Vec<E> =
                a[c].iter().map(|e| if e.is_zero() { Ok(e.clone()) } else { e.mul(&inv) }).collect::<Result<_>>()?;
            a[c] = scaled;
            let pivot_row = a[c].clone();
            a.par_iter_mut().enumerate().try_for_each(|(i, row)| -> Result<()> {
                if i == c || row[c].is_zero() {
                    return Ok(());
                }
                let f = row[c].clone();
                for j in c..n + m {
                    if !pivot_row[j].is_zero() {
                        row[j] = row[j].sub(&f.mul(&pivot_row[j])?)?;
                    }
                }
                Ok(())
            })?;
        }
        Ok(Matrix::from_fn(n, m, &b.zero, |i, j| a[i][n + j].clone()))
    }

    /// Solves `self · X = b` for a matrix of full column rank with possibly more rows
    /// than columns. `Ok(Err(i))` reports the first row `i` whose equation is violated.
    pub fn solve_overdetermined(&self, b: &Self) -> Result<std::result::Result<Self, usize>> {
        if b.rows != self.rows {
            return Err(Error::InvalidInput("right-hand side has the wrong number of rows".into()));
        }
        let (n, m) = (self.cols, b.cols);
        let mut a: Vec<(usize, Vec<E>)> =
            (0..self.rows).map(|i| (i, self.row(i).iter().chain(b.row(i)).cloned().collect())).collect();
        for c in 0..n {
            let p = (c..a.len()).find(|&i| a[i].1[c].is_unit()).ok_or(Error::SingularMatrix)?;
            a.swap(c, p);
            let inv = a[c].1[c].one_like().div(&a[c].1[c])?;
            a[c].1 = a[c].1.iter().map(|e| e.mul(&inv)).collect::<Result<_>>()?;
            let pivot_row = a[c].1.clone();
            a.par_iter_mut().enumerate().try_for_each(|(i, (_, row))| -> Result<()> {
                if i == c || row[c].is_zero() {
                    return Ok(());
                }
                let f = row[c].clone();
                for j in c..n + m {
                    if !pivot_row[j].is_zero() {
                        row[j] = row[j].sub(&f.mul(&pivot_row[j])?)?;
                    }
                }
                Ok(())
            })?;
        }
        let bad = a[n..].iter().filter(|(_, row)| row[n..].iter().any(|e| !e.is_zero())).map(|(i, _)| *i).min();
        if let Some(i) = bad {
            return Ok(Err(i));
        }
        Ok(Ok(Matrix::from_fn(n, m, &b.zero, |i, j| a[i].1[n + j].clone())))
    }

    pub fn inverse(&self) -> Result<Self> {
        self.solve_square(&Matrix::identity(self.rows, &self.zero))
    }

    /// Kernel basis with prescribed pivot columns: column `j` of the result has a 1 in
    /// row `pivots[j]` and 0 in the other pivot rows.
    pub fn kernel_with_pivots(&self, pivots: &[usize]) -> Result<Self> {
        if pivots.iter().any(|&p| p >= self.cols) || self.cols < self.rows + pivots.len() {
            return Err(Error::BadPivots);
        }
        if self.cols != self.rows + pivots.len() {
            return Err(Error::BadPivots);
        }
        let mut is_pivot = vec![false; self.cols];
        for &p in pivots {
            if std::mem::replace(&mut is_pivot[p], true) {
                return Err(Error::BadPivots);
            }
        }
        let others: Vec<usize> = (0..self.cols).filter(|&j| !is_pivot[j]).collect();
        let all_rows: Vec<usize> = (0..self.rows).collect();
        let yyy = self.select(&all_rows, &others);
        let rhs = self.select(&all_rows, pivots).neg();
        let x = yyy.solve_square(&rhs).map_err(|e| match e {
            Error::SingularMatrix => Error::BadPivots,
            e => e,
        })?;
        let mut n = Matrix::zeros(self.cols, pivots.len(), &self.zero);
        for (j, &p) in pivots.iter().enumerate() {
            n.set(p, j, self.zero.one_like());
        }
        for (i, &o) in others.iter().enumerate() {
            for j in 0..pivots.len() {
                n.set(o, j, x.get(i, j).clone());
            }
        }
        Ok(n)
    }

    /// Renders every entry, row by row.
    pub fn render(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|e| e.render()).collect()).collect()
    }
}
