//! Dense kernel: centering, divisor-n covariance, Cholesky with positive
//! diagonal, triangular inversion and the regressor transpositions used to
//! move any regressor into the last position.

use std::collections::HashSet;

use crate::error::{check_index, DiagError, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// `n x p` regressor measurements with column names.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix<T> {
    values: Matrix<T>,
    column_names: Vec<String>,
}

impl<T: Scalar> DataMatrix<T> {
    pub fn new(values: Matrix<T>, column_names: Vec<String>) -> Result<Self> {
        let (n, p) = (values.nrows(), values.ncols());
        if p == 0 {
            return Err(DiagError::NoColumns);
        }
        if n < 2 {
            return Err(DiagError::TooFewRows(n));
        }
        if column_names.len() != p {
            return Err(DiagError::NameCount {
                expected: p,
                got: column_names.len(),
            });
        }
        let mut seen = HashSet::new();
        for name in &column_names {
            if !seen.insert(name.as_str()) {
                return Err(DiagError::DuplicateColumnName(name.clone()));
            }
        }
        for r in 0..n {
            for (c, v) in values.row(r).iter().enumerate() {
                if !v.is_finite() {
                    return Err(DiagError::NonFinite { row: r, col: c });
                }
            }
        }
        Ok(Self {
            values,
            column_names,
        })
    }

    /// Names the columns `x0, x1, ...`.
    pub fn with_default_names(values: Matrix<T>) -> Result<Self> {
        let names = (0..values.ncols()).map(|i| format!("x{i}")).collect();
        Self::new(values, names)
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        Self::with_default_names(Matrix::from_rows(rows)?)
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn p(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &Matrix<T> {
        &self.values
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn row(&self, r: usize) -> &[T] {
        self.values.row(r)
    }

    /// Subset of columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        for &c in cols {
            check_index(c, self.p())?;
        }
        let names = cols.iter().map(|&c| self.column_names[c].clone()).collect();
        Self::new(self.values.select_columns(cols), names)
    }

    /// Drops one column.
    pub fn without_column(&self, j: usize) -> Result<Self> {
        check_index(j, self.p())?;
        let keep: Vec<usize> = (0..self.p()).filter(|&c| c != j).collect();
        self.select_columns(&keep)
    }

    pub fn into_parts(self) -> (Matrix<T>, Vec<String>) {
        (self.values, self.column_names)
    }
}

/// Column-centered data `X - 1 x̄ᵀ` with the mean and population standard
/// deviations (divisor n).
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredData<T> {
    tilde_x: Matrix<T>,
    mean: Vec<T>,
    std: Vec<T>,
}

impl<T: Scalar> CenteredData<T> {
    pub fn n(&self) -> usize {
        self.tilde_x.nrows()
    }

    pub fn p(&self) -> usize {
        self.tilde_x.ncols()
    }

    pub fn tilde_x(&self) -> &Matrix<T> {
        &self.tilde_x
    }

    pub fn mean(&self) -> &[T] {
        &self.mean
    }

    pub fn std(&self) -> &[T] {
        &self.std
    }

    /// `x_r - x̄`.
    pub fn deviation(&self, r: usize) -> Result<&[T]> {
        check_index(r, self.n())?;
        Ok(self.tilde_x.row(r))
    }

    /// `(x_ri - x̄_i) / s_i`.
    pub fn marginal_z(&self, r: usize, i: usize) -> Result<T> {
        check_index(i, self.p())?;
        Ok(self.deviation(r)?[i] / self.std[i])
    }
}

/// Centers every column. Fails with [`DiagError::ConstantColumn`] on a
/// column without spread.
pub fn center<T: Scalar>(data: &DataMatrix<T>) -> Result<CenteredData<T>> {
    let x = data.values();
    let (n, p) = (data.n(), data.p());
    let nf = T::of_usize(n);
    let mut tilde_x = x.clone();
    let mut mean = Vec::with_capacity(p);
    let mut std = Vec::with_capacity(p);
    for c in 0..p {
        let col = x.column(c);
        let first = col[0];
        let scale = col.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if col.iter().all(|&v| v == first) {
            return Err(DiagError::ConstantColumn(c));
        }
        // two-pass mean: the correction pass removes most of the rounding
        // left by the naive sum
        let mut m = col.iter().copied().sum::<T>() / nf;
        m += col.iter().map(|&v| v - m).sum::<T>() / nf;
        let mut ss = T::zero();
        for (r, &v) in col.iter().enumerate() {
            let d = v - m;
            tilde_x[(r, c)] = d;
            ss += d * d;
        }
        let s = (ss / nf).sqrt();
        if s <= T::lit(4.0) * T::epsilon() * scale {
            return Err(DiagError::ConstantColumn(c));
        }
        mean.push(m);
        std.push(s);
    }
    Ok(CenteredData { tilde_x, mean, std })
}

/// `S = (1/n) X̃ᵀX̃`, symmetric by construction.
pub fn covariance<T: Scalar>(c: &CenteredData<T>) -> Matrix<T> {
    let (n, p) = (c.n(), c.p());
    let nf = T::of_usize(n);
    let x = c.tilde_x();
    let mut s = Matrix::zeros(p, p);
    for i in 0..p {
        for j in i..p {
            let v = (0..n).map(|r| x[(r, i)] * x[(r, j)]).sum::<T>() / nf;
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    s
}

/// Lower Cholesky factor `A` (`AAᵀ = S`, positive diagonal) together with
/// `B = (A⁻¹)ᵀ`, which is upper triangular.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyPair<T> {
    a: Matrix<T>,
    b: Matrix<T>,
}

impl<T: Scalar> CholeskyPair<T> {
    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn b(&self) -> &Matrix<T> {
        &self.b
    }

    /// `A₁`, the leading `(p-1) x (p-1)` block of `A`.
    pub fn a_leading(&self) -> Matrix<T> {
        self.a.leading(self.dim() - 1)
    }

    /// `a₁`: the off-diagonal part of the last row of `A`.
    pub fn a1(&self) -> &[T] {
        let p = self.dim();
        &self.a.row(p - 1)[..p - 1]
    }

    pub fn a_pp(&self) -> T {
        let p = self.dim();
        self.a[(p - 1, p - 1)]
    }

    /// `b = (b_1p, ..., b_pp)`: last column of `B`.
    pub fn b_last(&self) -> Vec<T> {
        self.b.column(self.dim() - 1)
    }

    /// `b₁ = (b_1p, ..., b_{p-1,p})`.
    pub fn b1(&self) -> Vec<T> {
        let mut b = self.b_last();
        b.pop();
        b
    }

    pub fn b_pp(&self) -> T {
        let p = self.dim();
        self.b[(p - 1, p - 1)]
    }

    /// Solves `A w = v`.
    pub fn forward_solve(&self, v: &[T]) -> Vec<T> {
        forward_substitute(&self.a, v, self.dim())
    }

    /// `‖A⁻¹v‖²`, i.e. `vᵀ S⁻¹ v`.
    pub fn quadratic_form_inv(&self, v: &[T]) -> T {
        self.forward_solve(v).iter().map(|&w| w * w).sum()
    }

    /// `‖A₁⁻¹v₁‖²` on the leading `k` coordinates only. Zero when `k = 0`.
    pub fn leading_quadratic_form_inv(&self, v: &[T], k: usize) -> T {
        forward_substitute(&self.a, v, k).iter().map(|&w| w * w).sum()
    }
}

/// Solves the leading `k x k` lower-triangular system of `l`.
fn forward_substitute<T: Scalar>(l: &Matrix<T>, v: &[T], k: usize) -> Vec<T> {
    let mut w = Vec::with_capacity(k);
    for i in 0..k {
        let row = l.row(i);
        let acc = (0..i).map(|j| row[j] * w[j]).sum::<T>();
        w.push((v[i] - acc) / row[i]);
    }
    w
}

/// Inverse of a lower-triangular matrix with nonzero diagonal.
pub fn lower_triangular_inverse<T: Scalar>(l: &Matrix<T>) -> Matrix<T> {
    let p = l.nrows();
    let mut inv = Matrix::zeros(p, p);
    for col in 0..p {
        inv[(col, col)] = T::one() / l[(col, col)];
        for i in col + 1..p {
            let acc = (col..i).map(|j| l[(i, j)] * inv[(j, col)]).sum::<T>();
            inv[(i, col)] = -acc / l[(i, i)];
        }
    }
    inv
}

/// Unpivoted Cholesky factorization of a symmetric matrix.
///
/// Fails with `NotPositiveDefinite { pivot }` as soon as pivot `k` drops to
/// `PIVOT_EPS * s[k][k]` or below. For a covariance that ratio is
/// `1 - R²` of column `k` on the columns before it, so the test does not
/// depend on the units of the columns. The index is the column (in the
/// order given) that is linearly dependent on the ones before it.
pub fn cholesky<T: Scalar>(s: &Matrix<T>) -> Result<CholeskyPair<T>> {
    let p = s.nrows();
    assert_eq!(p, s.ncols(), "cholesky needs a square matrix");
    let eps = T::lit(T::PIVOT_EPS);
    let mut a = Matrix::zeros(p, p);
    for k in 0..p {
        let diag = s[(k, k)];
        let pivot = diag - (0..k).map(|j| a[(k, j)] * a[(k, j)]).sum::<T>();
        // negated comparisons so NaN fails too
        if !(diag > T::zero()) || !(pivot > eps * diag) {
            return Err(DiagError::NotPositiveDefinite { pivot: k });
        }
        let d = pivot.sqrt();
        a[(k, k)] = d;
        for i in k + 1..p {
            let acc = (0..k).map(|j| a[(i, j)] * a[(k, j)]).sum::<T>();
            a[(i, k)] = (s[(i, k)] - acc) / d;
        }
    }
    let b = lower_triangular_inverse(&a).transpose();
    Ok(CholeskyPair { a, b })
}

/// `P_(i)`: interchanges regressor `target` with the last one. For
/// `target = dim - 1` it is the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranspositionPerm {
    target: usize,
    dim: usize,
}

impl TranspositionPerm {
    pub fn new(target: usize, dim: usize) -> Result<Self> {
        check_index(target, dim)?;
        Ok(Self { target, dim })
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_identity(&self) -> bool {
        self.target + 1 == self.dim
    }

    /// Where original position `k` lands.
    pub fn map(&self, k: usize) -> usize {
        let last = self.dim - 1;
        if k == self.target {
            last
        } else if k == last {
            self.target
        } else {
            k
        }
    }

    /// `P S P` for a symmetric `dim x dim` matrix.
    pub fn conjugate<T: Scalar>(&self, s: &Matrix<T>) -> Matrix<T> {
        let mut out = s.clone();
        out.swap_rows(self.target, self.dim - 1);
        out.swap_columns(self.target, self.dim - 1);
        out
    }
}

/// `P_(i) v`.
pub fn apply_transposition<T: Copy>(perm: TranspositionPerm, v: &[T]) -> Result<Vec<T>> {
    if v.len() != perm.dim {
        return Err(DiagError::IndexOutOfRange {
            index: perm.dim,
            len: v.len(),
        });
    }
    let mut out = v.to_vec();
    out.swap(perm.target, perm.dim - 1);
    Ok(out)
}

/// `S⁻¹` by solving with `A` then `Aᵀ`. Used as an oracle and for the
/// condition estimate, never on the hot path.
pub fn direct_inverse<T: Scalar>(s: &Matrix<T>) -> Result<Matrix<T>> {
    let chol = cholesky(s)?;
    let p = chol.dim();
    let a = chol.a();
    let mut inv = Matrix::zeros(p, p);
    let mut e = vec![T::zero(); p];
    for col in 0..p {
        e.iter_mut().for_each(|x| *x = T::zero());
        e[col] = T::one();
        let w = chol.forward_solve(&e);
        // back substitution with Aᵀ
        let mut z = vec![T::zero(); p];
        for i in (0..p).rev() {
            let acc = (i + 1..p).map(|j| a[(j, i)] * z[j]).sum::<T>();
            z[i] = (w[i] - acc) / a[(i, i)];
        }
        for i in 0..p {
            inv[(i, col)] = z[i];
        }
    }
    // symmetrize the rounding
    for i in 0..p {
        for j in i + 1..p {
            let m = (inv[(i, j)] + inv[(j, i)]) / T::lit(2.0);
            inv[(i, j)] = m;
            inv[(j, i)] = m;
        }
    }
    Ok(inv)
}

/// 1-norm condition number of the correlation matrix built from `s`.
/// Scale-free, so it tracks the collinearity rather than the units.
/// Infinite when `s` is not positive definite.
pub fn correlation_condition<T: Scalar>(s: &Matrix<T>) -> T {
    let p = s.nrows();
    let d: Vec<T> = (0..p).map(|i| s[(i, i)].sqrt()).collect();
    if d.iter().any(|&x| !(x > T::zero())) {
        return T::infinity();
    }
    let r = Matrix::from_fn(p, p, |i, j| s[(i, j)] / (d[i] * d[j]));
    match direct_inverse(&r) {
        Ok(inv) => r.norm_one() * inv.norm_one(),
        Err(_) => T::infinity(),
    }
}

/// Columns among `0..k` that column `k` of `s` depends on, found by
/// regressing it on them. Used to name culprits after a Cholesky failure
/// at `pivot = k`.
pub fn dependence_partners<T: Scalar>(s: &Matrix<T>, k: usize) -> Vec<usize> {
    if k == 0 || k >= s.nrows() {
        return Vec::new();
    }
    let lead = s.leading(k);
    let Ok(inv) = direct_inverse(&lead) else {
        return Vec::new();
    };
    let rhs: Vec<T> = (0..k).map(|i| s[(i, k)]).collect();
    let coef = inv.matvec(&rhs);
    let sk = s[(k, k)].sqrt();
    coef.iter()
        .enumerate()
        .filter(|&(j, &c)| (c * s[(j, j)].sqrt()).abs() > T::lit(1e-6) * sk)
        .map(|(j, _)| j)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn col(v: &[f64]) -> DataMatrix<f64> {
        let rows: Vec<[f64; 1]> = v.iter().map(|&x| [x]).collect();
        DataMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn data_matrix_invariants() {
        let m = Matrix::from_rows(&[[1.0, 2.0], [3.0, f64::NAN]]).unwrap();
        assert_eq!(
            DataMatrix::with_default_names(m),
            Err(DiagError::NonFinite { row: 1, col: 1 })
        );
        let m = Matrix::from_rows(&[[1.0, 2.0]]).unwrap();
        assert_eq!(DataMatrix::with_default_names(m), Err(DiagError::TooFewRows(1)));
        let m = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert_eq!(
            DataMatrix::new(m, vec!["a".into(), "a".into()]),
            Err(DiagError::DuplicateColumnName("a".into()))
        );
    }

    #[test]
    fn center_simple_column() {
        let c = center(&col(&[1.0, 2.0, 3.0, 4.0, 5.0])).unwrap();
        assert_eq!(c.mean(), &[3.0]);
        assert_eq!(c.tilde_x().column(0), vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert_abs_diff_eq!(c.std()[0] * c.std()[0], 2.0, epsilon = 1e-15);
    }

    #[test]
    fn center_rejects_constant_column() {
        let d = DataMatrix::from_rows(&[[1.0, 0.1], [2.0, 0.1], [3.0, 0.1]]).unwrap();
        assert_eq!(center(&d), Err(DiagError::ConstantColumn(1)));
    }

    #[test]
    fn center_zero_mean_is_identity() {
        let d = DataMatrix::from_rows(&[[-1.0, 2.0], [0.0, -4.0], [1.0, 2.0]]).unwrap();
        let c = center(&d).unwrap();
        assert_eq!(c.mean(), &[0.0, 0.0]);
        assert_eq!(c.tilde_x(), d.values());
    }

    #[test]
    fn covariance_examples() {
        let c = center(&col(&[1.0, 2.0, 3.0, 4.0, 5.0])).unwrap();
        assert_eq!(covariance(&c).as_slice(), &[2.0]);

        // orthogonal columns with unit population variance
        let d = DataMatrix::from_rows(&[[1.0, 1.0], [-1.0, 1.0], [1.0, -1.0], [-1.0, -1.0]])
            .unwrap();
        assert_eq!(covariance(&center(&d).unwrap()), Matrix::identity(2));
    }

    #[test]
    fn cholesky_examples() {
        let id = cholesky(&Matrix::<f64>::identity(3)).unwrap();
        assert_eq!(id.a(), &Matrix::identity(3));
        assert_eq!(id.b(), &Matrix::identity(3));

        let s = Matrix::from_rows(&[[4.0, 2.0], [2.0, 5.0]]).unwrap();
        let ch = cholesky(&s).unwrap();
        assert_eq!(ch.a(), &Matrix::from_rows(&[[2.0, 0.0], [1.0, 2.0]]).unwrap());
        assert_eq!(ch.a().matmul(&ch.a().transpose()), s);
        // B = (A⁻¹)ᵀ = [[1/2, -1/4], [0, 1/2]]
        assert_eq!(ch.b(), &Matrix::from_rows(&[[0.5, -0.25], [0.0, 0.5]]).unwrap());
        assert_eq!(ch.b_pp(), 0.5);
        assert_eq!(ch.a1(), &[1.0]);
    }

    #[test]
    fn cholesky_rejects_duplicated_column() {
        let d = DataMatrix::from_rows(&[[1.0, 1.0], [2.0, 2.0], [4.0, 4.0], [3.0, 3.0]]).unwrap();
        let s = covariance(&center(&d).unwrap());
        assert_eq!(cholesky(&s), Err(DiagError::NotPositiveDefinite { pivot: 1 }));
        assert_eq!(dependence_partners(&s, 1), vec![0]);
        assert!(correlation_condition::<f64>(&s).is_infinite());
    }

    #[test]
    fn transposition_examples() {
        let p = TranspositionPerm::new(0, 3).unwrap();
        assert_eq!(apply_transposition(p, &['a', 'b', 'c']).unwrap(), vec!['c', 'b', 'a']);
        let last = TranspositionPerm::new(2, 3).unwrap();
        assert!(last.is_identity());
        assert_eq!(apply_transposition(last, &[1, 2, 3]).unwrap(), vec![1, 2, 3]);
        assert!(TranspositionPerm::new(3, 3).is_err());
        assert!(apply_transposition(p, &[1, 2]).is_err());
        assert_eq!((p.map(0), p.map(1), p.map(2)), (2, 1, 0));
    }

    #[test]
    fn direct_inverse_examples() {
        assert_eq!(
            direct_inverse(&Matrix::<f64>::identity(4)).unwrap(),
            Matrix::identity(4)
        );
        let d = Matrix::from_rows(&[[2.0, 0.0], [0.0, 4.0]]).unwrap();
        let want = Matrix::from_rows(&[[0.5, 0.0], [0.0, 0.25]]).unwrap();
        assert!(direct_inverse(&d).unwrap().max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn f32_path_works() {
        let s = Matrix::<f32>::from_rows(&[[4.0, 2.0], [2.0, 5.0]]).unwrap();
        let ch = cholesky(&s).unwrap();
        assert_eq!(ch.a()[(1, 0)], 1.0);
        let inv = direct_inverse(&s).unwrap();
        assert!(inv.matmul(&s).max_abs_diff(&Matrix::identity(2)) < 1e-6);
    }
}
