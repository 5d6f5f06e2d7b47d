//! Integer matrices and Smith normal form with exact verification.
//!
//! `L · M · R = D` with `L`, `R` unimodular; the inverses are tracked
//! alongside so unimodularity is checked by multiplication, not by
//! determinant. All arithmetic is checked `i128`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i128>]) -> Matrix {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    /// Columns given as vectors of length `rows`.
    pub fn from_cols(rows: usize, cols: &[Vec<i128>]) -> Matrix {
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "column of wrong length");
            for (i, &v) in c.iter().enumerate() {
                m.set(i, j, v);
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

    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i128) {
        self.data[i * self.cols + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<i128> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row(&self, i: usize) -> Vec<i128> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn to_rows(&self) -> Vec<Vec<i128>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Columns of `self` followed by the columns of `other`.
    pub fn hcat(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hcat of mismatched heights");
        let mut m = Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j));
            }
            for j in 0..other.cols {
                m.set(i, self.cols + j, other.get(i, j));
            }
        }
        m
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        assert_eq!(self.cols, other.rows, "product of mismatched shapes");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b == 0 {
                        continue;
                    }
                    let v = a.checked_mul(b).and_then(|p| p.checked_add(out.get(i, j))).ok_or(Error::Overflow)?;
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[i128]) -> Result<Vec<i128>> {
        let m = self.mul(&Matrix::from_cols(v.len(), &[v.to_vec()]))?;
        Ok(m.col(0))
    }

    fn row_axpy(&mut self, dst: usize, c: i128, src: usize) -> Result<()> {
        for j in 0..self.cols {
            let s = self.get(src, j);
            if s != 0 {
                let v = c.checked_mul(s).and_then(|p| p.checked_add(self.get(dst, j))).ok_or(Error::Overflow)?;
                self.set(dst, j, v);
            }
        }
        Ok(())
    }

    fn col_axpy(&mut self, dst: usize, c: i128, src: usize) -> Result<()> {
        for i in 0..self.rows {
            let s = self.get(i, src);
            if s != 0 {
                let v = c.checked_mul(s).and_then(|p| p.checked_add(self.get(i, dst))).ok_or(Error::Overflow)?;
                self.set(i, dst, v);
            }
        }
        Ok(())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self.data[i * self.cols + j] = -self.data[i * self.cols + j];
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            self.data[i * self.cols + j] = -self.data[i * self.cols + j];
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let r: Vec<String> = self.row(i).iter().map(i128::to_string).collect();
            write!(f, "{}", r.join(" "))?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Debug)]
pub struct Snf {
    /// Diagonal of `D`, length `min(rows, cols)`: positive divisors in
    /// divisibility order, then zeros.
    pub diag: Vec<i128>,
    pub rows: usize,
    pub cols: usize,
    pub left: Matrix,
    pub left_inv: Matrix,
    pub right: Matrix,
    pub right_inv: Matrix,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.diag.iter().take_while(|&&d| d != 0).count()
    }

    /// Nonunit divisors `d > 1`.
    pub fn invariant_factors(&self) -> Vec<u64> {
        self.diag.iter().filter(|&&d| d > 1).map(|&d| d as u64).collect()
    }

    pub fn coker_free_rank(&self) -> usize {
        self.rows - self.rank()
    }

    pub fn kernel_rank(&self) -> usize {
        self.cols - self.rank()
    }

    /// A ℤ-basis of the kernel: the columns of `R` past the rank.
    pub fn kernel_basis(&self) -> Vec<Vec<i128>> {
        (self.rank()..self.cols).map(|j| self.right.col(j)).collect()
    }

    pub fn d_matrix(&self) -> Matrix {
        let mut d = Matrix::zeros(self.rows, self.cols);
        for (i, &v) in self.diag.iter().enumerate() {
            d.set(i, i, v);
        }
        d
    }
}

/// Computes and verifies `L · M · R = D`, `L · L⁻¹ = I`, `R · R⁻¹ = I` and the
/// divisibility chain.
pub fn smith_normal_form(m: &Matrix) -> Result<Snf> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut l = Matrix::identity(rows);
    let mut li = Matrix::identity(rows);
    let mut r = Matrix::identity(cols);
    let mut ri = Matrix::identity(cols);

    // Each helper applies one elementary operation to `a` and its transforms.
    let row_add = |a: &mut Matrix, l: &mut Matrix, li: &mut Matrix, dst: usize, c: i128, src: usize| -> Result<()> {
        a.row_axpy(dst, c, src)?;
        l.row_axpy(dst, c, src)?;
        li.col_axpy(src, -c, dst)
    };
    let col_add = |a: &mut Matrix, r: &mut Matrix, ri: &mut Matrix, dst: usize, c: i128, src: usize| -> Result<()> {
        a.col_axpy(dst, c, src)?;
        r.col_axpy(dst, c, src)?;
        ri.row_axpy(src, -c, dst)
    };

    let n = rows.min(cols);
    for t in 0..n {
        let Some((pi, pj)) = min_nonzero(&a, t) else { break };
        if pi != t {
            a.swap_rows(pi, t);
            l.swap_rows(pi, t);
            li.swap_cols(pi, t);
        }
        if pj != t {
            a.swap_cols(pj, t);
            r.swap_cols(pj, t);
            ri.swap_rows(pj, t);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                let v = a.get(i, t);
                if v != 0 {
                    let q = v.div_euclid(a.get(t, t));
                    row_add(&mut a, &mut l, &mut li, i, -q, t)?;
                    if a.get(i, t) != 0 {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..cols {
                let v = a.get(t, j);
                if v != 0 {
                    let q = v.div_euclid(a.get(t, t));
                    col_add(&mut a, &mut r, &mut ri, j, -q, t)?;
                    if a.get(t, j) != 0 {
                        dirty = true;
                    }
                }
            }
            if dirty {
                let (pi, pj) = min_in_cross(&a, t);
                if pi != t {
                    a.swap_rows(pi, t);
                    l.swap_rows(pi, t);
                    li.swap_cols(pi, t);
                }
                if pj != t {
                    a.swap_cols(pj, t);
                    r.swap_cols(pj, t);
                    ri.swap_rows(pj, t);
                }
                continue;
            }
            let p = a.get(t, t);
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a.get(i, j) % p != 0));
            match bad {
                Some(i) => row_add(&mut a, &mut l, &mut li, t, 1, i)?,
                None => break,
            }
        }
        if a.get(t, t) < 0 {
            a.negate_row(t);
            l.negate_row(t);
            li.negate_col(t);
        }
    }

    let diag: Vec<i128> = (0..n).map(|i| a.get(i, i)).collect();
    let snf = Snf { diag, rows, cols, left: l, left_inv: li, right: r, right_inv: ri };
    verify(m, &snf)?;
    Ok(snf)
}

fn verify(m: &Matrix, s: &Snf) -> Result<()> {
    let d = s.d_matrix();
    let fail = |what: &str| Err(Error::Invalid(format!("Smith normal form check failed: {what}")));
    if s.left.mul(m)?.mul(&s.right)? != d {
        return fail("L·M·R ≠ D");
    }
    if s.left.mul(&s.left_inv)? != Matrix::identity(s.rows) {
        return fail("L not unimodular");
    }
    if s.right.mul(&s.right_inv)? != Matrix::identity(s.cols) {
        return fail("R not unimodular");
    }
    let rank = s.rank();
    if s.diag[rank..].iter().any(|&x| x != 0) || s.diag[..rank].iter().any(|&x| x <= 0) {
        return fail("diagonal out of order");
    }
    if s.diag[..rank].windows(2).any(|w| w[1] % w[0] != 0) {
        return fail("divisibility chain broken");
    }
    Ok(())
}

/// Position of a nonzero entry of least absolute value in `a[t.., t..]`.
fn min_nonzero(a: &Matrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(i128, usize, usize)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let v = a.get(i, j).abs();
            if v != 0 && best.is_none_or(|(b, _, _)| v < b) {
                best = Some((v, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

/// Least nonzero entry in row `t` or column `t` (the pivot included).
fn min_in_cross(a: &Matrix, t: usize) -> (usize, usize) {
    let mut best = (a.get(t, t).abs(), t, t);
    for i in t + 1..a.rows() {
        let v = a.get(i, t).abs();
        if v != 0 && (best.0 == 0 || v < best.0) {
            best = (v, i, t);
        }
    }
    for j in t + 1..a.cols() {
        let v = a.get(t, j).abs();
        if v != 0 && (best.0 == 0 || v < best.0) {
            best = (v, t, j);
        }
    }
    (best.1, best.2)
}

pub fn rank(m: &Matrix) -> Result<usize> {
    Ok(smith_normal_form(m)?.rank())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snf(rows: &[Vec<i128>]) -> Vec<i128> {
        smith_normal_form(&Matrix::from_rows(rows)).unwrap().diag
    }

    #[test]
    fn small_cases() {
        assert_eq!(snf(&[vec![1, -1], vec![-1, 1]]), vec![1, 0]);
        assert_eq!(snf(&[vec![-1]]), vec![1]);
        assert_eq!(snf(&[vec![2, 0], vec![0, 3]]), vec![1, 6]);
        assert_eq!(snf(&[vec![0]]), vec![0]);
        assert_eq!(snf(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]), vec![2, 6, 12]);
    }

    #[test]
    fn empty_shapes() {
        let s = smith_normal_form(&Matrix::zeros(3, 0)).unwrap();
        assert_eq!(s.rank(), 0);
        assert_eq!(s.coker_free_rank(), 3);
        let s = smith_normal_form(&Matrix::zeros(0, 2)).unwrap();
        assert_eq!(s.kernel_basis().len(), 2);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = Matrix::from_rows(&[vec![1, 2, 3], vec![2, 4, 6]]);
        let s = smith_normal_form(&m).unwrap();
        for v in s.kernel_basis() {
            assert!(m.mul_vec(&v).unwrap().iter().all(|&x| x == 0));
        }
        assert_eq!(s.kernel_basis().len(), 2);
    }
}
