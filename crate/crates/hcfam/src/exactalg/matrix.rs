//! Small dense matrices over an exact field.

use std::fmt;
use std::ops::{Div, Index, IndexMut, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact field arithmetic, implemented for `BigRational`, `GaussianRational`
/// and `RationalFunction`.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
}

impl<T> Field for T where
    T: Clone
        + PartialEq
        + fmt::Debug
        + Zero
        + One
        + Neg<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Div<Output = T>
{
}

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Matrix whose columns are the given vectors, all of length `len`.
    pub fn from_columns(len: usize, cols: &[Vec<F>]) -> Self {
        let mut m = Self::zeros(len, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), len);
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
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

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul_mat(&self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).fold(F::zero(), |acc, (a, x)| {
                    if a.is_zero() || x.is_zero() {
                        acc
                    } else {
                        acc + a.clone() * x.clone()
                    }
                })
            })
            .collect()
    }

    pub fn add_mat(&self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn sub_mat(&self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &F) -> Matrix<F> {
        self.map(|x| x.clone() * c.clone())
    }

    /// `self * rhs - rhs * self`.
    pub fn commutator(&self, rhs: &Matrix<F>) -> Matrix<F> {
        self.mul_mat(rhs).sub_mat(&rhs.mul_mat(self))
    }

    pub fn trace(&self) -> F {
        (0..self.rows.min(self.cols)).fold(F::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Matrix<F>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = F::one() / m[(r, c)].clone();
            for j in c..m.cols {
                if !m[(r, j)].is_zero() {
                    m[(r, j)] = m[(r, j)].clone() * inv.clone();
                }
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for j in c..m.cols {
                    if !m[(r, j)].is_zero() {
                        m[(i, j)] = m[(i, j)].clone() - factor.clone() * m[(r, j)].clone();
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of `{ x : M x = 0 }`; empty iff `M` is injective.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let basis: Vec<Vec<F>> = free
            .iter()
            .map(|&fcol| {
                let mut v = vec![F::zero(); self.cols];
                v[fcol] = F::one();
                for (row, &pcol) in pivots.iter().enumerate() {
                    v[pcol] = -r[(row, fcol)].clone();
                }
                v
            })
            .collect();
        debug_assert_eq!(pivots.len() + basis.len(), self.cols);
        basis
    }

    /// Some `x` with `M x = b`, if the system is consistent.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![F::zero(); self.cols];
        for (row, &pcol) in pivots.iter().enumerate() {
            x[pcol] = r[(row, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix<F>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = F::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }
}

impl<F> Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F> IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

impl<F: fmt::Debug> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for i in 0..self.rows {
            list.entry(&&self.data[i * self.cols..(i + 1) * self.cols]);
        }
        list.finish()
    }
}

/// Rank of a list of vectors of common length.
pub fn rank_of<F: Field>(vectors: &[Vec<F>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_rows(vectors.to_vec()).rank()
}

/// Whether two families of vectors span the same subspace.
pub fn same_span<F: Field>(a: &[Vec<F>], b: &[Vec<F>]) -> bool {
    let ra = rank_of(a);
    let rb = rank_of(b);
    let both: Vec<Vec<F>> = a.iter().chain(b).cloned().collect();
    ra == rb && rank_of(&both) == ra
}

/// Coordinates of `v` in the span of `basis`, if it lies there.
pub fn coordinates_in<F: Field>(basis: &[Vec<F>], v: &[F]) -> Option<Vec<F>> {
    if basis.is_empty() {
        return v.iter().all(Zero::is_zero).then(Vec::new);
    }
    Matrix::from_columns(v.len(), basis).solve(v)
}

/// Sylvester inertia `(n_plus, n_zero, n_minus)` of a symmetric rational
/// matrix, computed by exact congruence diagonalization.
pub fn inertia(sym: &Matrix<BigRational>) -> (usize, usize, usize) {
    assert_eq!(sym.rows(), sym.cols());
    let n = sym.rows();
    let mut m = sym.clone();
    let (mut pos, mut neg) = (0, 0);
    let mut k = 0;
    while k < n {
        // Bring a nonzero diagonal entry to position k.
        if let Some(p) = (k..n).find(|&i| !m[(i, i)].is_zero()) {
            swap_sym(&mut m, k, p);
        } else {
            let off = (k..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| !m[(i, j)].is_zero());
            let Some((i, j)) = off else {
                break;
            };
            // Row/column operation e_i += e_j makes the (i, i) entry 2 m_ij.
            add_sym(&mut m, i, j);
            swap_sym(&mut m, k, i);
        }
        let d = m[(k, k)].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            if m[(i, k)].is_zero() {
                continue;
            }
            let factor = m[(i, k)].clone() / d.clone();
            for j in k..n {
                let v = m[(i, j)].clone() - factor.clone() * m[(k, j)].clone();
                m[(i, j)] = v;
            }
            for j in k..n {
                let v = m[(j, i)].clone() - factor.clone() * m[(j, k)].clone();
                m[(j, i)] = v;
            }
        }
        k += 1;
    }
    (pos, n - pos - neg, neg)
}

fn swap_sym(m: &mut Matrix<BigRational>, a: usize, b: usize) {
    if a == b {
        return;
    }
    m.swap_rows(a, b);
    for i in 0..m.rows() {
        m.data.swap(i * m.cols + a, i * m.cols + b);
    }
}

fn add_sym(m: &mut Matrix<BigRational>, target: usize, src: usize) {
    let n = m.rows();
    for j in 0..n {
        let v = m[(target, j)].clone() + m[(src, j)].clone();
        m[(target, j)] = v;
    }
    for i in 0..n {
        let v = m[(i, target)].clone() + m[(i, src)].clone();
        m[(i, target)] = v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{GaussianRational, LaurentPoly, RationalFunction};
    use num_bigint::BigInt;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn kernel_over_function_field() {
        let z = RationalFunction::z();
        let z2 = &z * &z;
        let m = Matrix::from_rows(vec![vec![RationalFunction::one(), z.clone()], vec![z.clone(), z2]]);
        let ker = m.kernel();
        assert_eq!(ker.len(), 1);
        let expected = vec![z.clone(), -RationalFunction::one()];
        assert!(same_span(&ker, &[expected]));
    }

    #[test]
    fn kernel_of_identity_and_zero() {
        assert!(Matrix::<GaussianRational>::identity(3).kernel().is_empty());
        assert_eq!(Matrix::<GaussianRational>::zeros(2, 3).kernel().len(), 3);
    }

    #[test]
    fn solve_and_inverse() {
        let m = Matrix::from_rows(vec![vec![q(2), q(1)], vec![q(1), q(1)]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul_mat(&inv), Matrix::identity(2));
        assert_eq!(m.solve(&[q(3), q(2)]).unwrap(), vec![q(1), q(1)]);
        let singular = Matrix::from_rows(vec![vec![q(1), q(1)], vec![q(1), q(1)]]);
        assert!(singular.solve(&[q(1), q(0)]).is_none());
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn inertia_examples() {
        let m = Matrix::from_rows(vec![vec![q(0), q(1)], vec![q(1), q(0)]]);
        assert_eq!(inertia(&m), (1, 0, 1));
        let m = Matrix::from_rows(vec![
            vec![q(8), q(0), q(0)],
            vec![q(0), q(0), q(4)],
            vec![q(0), q(4), q(0)],
        ]);
        assert_eq!(inertia(&m), (2, 0, 1));
        let m = Matrix::from_rows(vec![vec![q(1), q(1)], vec![q(1), q(1)]]);
        assert_eq!(inertia(&m), (1, 1, 0));
    }

    #[test]
    fn rank_nullity_on_laurent_entries() {
        let p = |c: &[i64]| RationalFunction::from(LaurentPoly::from_ints(c));
        let m = Matrix::from_rows(vec![
            vec![p(&[1, 1]), p(&[0, 1]), p(&[1])],
            vec![p(&[2, 2]), p(&[0, 2]), p(&[2])],
        ]);
        assert_eq!(m.rank() + m.kernel().len(), 3);
        assert_eq!(m.rank(), 1);
    }
}
