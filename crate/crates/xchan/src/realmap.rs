//! Complex↔real isomorphism and the small dense linear-algebra kernels the
//! rest of the crate is built on.
//!
//! A complex entry `h` becomes the 2×2 block `[[Re h, -Im h], [Im h, Re h]]`;
//! vectors are stacked interleaved, `[Re v1, Im v1, Re v2, Im v2, ...]`.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type RMatrix = DMatrix<f64>;
pub type RVector = DVector<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("realified vector has odd length {0}")]
    OddLength(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("system has no solution within tolerance (relative residual {residual:.3e})")]
    Unsolvable { residual: f64 },
}

/// Relative cutoffs used for every rank decision and residual check.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TolerancePolicy {
    pub rank_rel_tol: f64,
    pub residual_rel_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            rank_rel_tol: 1e-8,
            residual_rel_tol: 1e-9,
        }
    }
}

pub fn realify_matrix(h: &CMatrix) -> RMatrix {
    let mut out = RMatrix::zeros(2 * h.nrows(), 2 * h.ncols());
    for i in 0..h.nrows() {
        for j in 0..h.ncols() {
            let z = h[(i, j)];
            out[(2 * i, 2 * j)] = z.re;
            out[(2 * i, 2 * j + 1)] = -z.im;
            out[(2 * i + 1, 2 * j)] = z.im;
            out[(2 * i + 1, 2 * j + 1)] = z.re;
        }
    }
    out
}

pub fn realify_vector(v: &CVector) -> RVector {
    RVector::from_iterator(2 * v.len(), v.iter().flat_map(|z| [z.re, z.im]))
}

/// Inverse of [`realify_vector`].
pub fn derealify_vector(v: &RVector) -> Result<CVector, LinalgError> {
    if !v.len().is_multiple_of(2) {
        return Err(LinalgError::OddLength(v.len()));
    }
    Ok(CVector::from_iterator(
        v.len() / 2,
        v.as_slice().chunks(2).map(|p| Complex64::new(p[0], p[1])),
    ))
}

/// Multiplication by `j` in the realified domain: each `(a, b)` pair becomes `(-b, a)`.
pub fn jrotate(v: &RVector) -> Result<RVector, LinalgError> {
    if !v.len().is_multiple_of(2) {
        return Err(LinalgError::OddLength(v.len()));
    }
    let mut out = RVector::zeros(v.len());
    for i in (0..v.len()).step_by(2) {
        out[i] = -v[i + 1];
        out[i + 1] = v[i];
    }
    Ok(out)
}

/// Stack realified vectors as the columns of one real matrix.
pub fn realify_columns(vs: &[CVector], rows: usize) -> RMatrix {
    let cols: Vec<RVector> = vs.iter().map(realify_vector).collect();
    hstack(&cols, 2 * rows)
}

pub fn hstack(cols: &[RVector], rows: usize) -> RMatrix {
    let mut out = RMatrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

/// Singular values, largest first. Empty for a matrix with a zero dimension.
pub fn singular_values<T>(a: &DMatrix<T>) -> Vec<f64>
where
    T: ComplexField<RealField = f64>,
{
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

pub fn numeric_rank<T>(a: &DMatrix<T>, pol: &TolerancePolicy) -> usize
where
    T: ComplexField<RealField = f64>,
{
    rank_of(&singular_values(a), pol)
}

fn rank_of(s: &[f64], pol: &TolerancePolicy) -> usize {
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&x| x > pol.rank_rel_tol * top).count(),
        _ => 0,
    }
}

/// Smallest-to-largest singular value ratio; 0 for rank-deficient shapes
/// (more columns than rows) and for the zero matrix.
pub fn column_conditioning<T>(a: &DMatrix<T>) -> f64
where
    T: ComplexField<RealField = f64>,
{
    if a.ncols() == 0 {
        return 1.0;
    }
    if a.ncols() > a.nrows() {
        return 0.0;
    }
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&top), Some(&bot)) if top > 0.0 => bot / top,
        _ => 0.0,
    }
}

/// Orthonormal basis of the kernel of `a`, one basis vector per column.
pub fn null_space<T>(a: &DMatrix<T>, pol: &TolerancePolicy) -> DMatrix<T>
where
    T: ComplexField<RealField = f64>,
{
    let (n, m) = a.shape();
    if m == 0 {
        return DMatrix::zeros(0, 0);
    }
    // Zero-pad to square so the thin SVD hands back the full right basis.
    let mut sq = DMatrix::<T>::zeros(n.max(m), m);
    sq.view_mut((0, 0), (n, m)).copy_from(a);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let top = svd.singular_values.iter().copied().fold(0.0f64, f64::max);
    let keep: Vec<usize> = (0..m)
        .filter(|&i| top == 0.0 || svd.singular_values[i] <= pol.rank_rel_tol * top)
        .collect();
    let mut basis = DMatrix::<T>::zeros(m, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        basis.set_column(c, &vt.row(i).adjoint());
    }
    basis
}

/// Relative residual `‖A·X − B‖ / ‖B‖` (0 when `B` is zero).
pub fn relative_residual<T>(a: &DMatrix<T>, x: &DMatrix<T>, b: &DMatrix<T>) -> f64
where
    T: ComplexField<RealField = f64>,
{
    let bn = b.norm();
    if bn == 0.0 {
        return (a * x).norm();
    }
    (a * x - b).norm() / bn
}

/// Minimum-norm solution of `A·X = B`, rejected when the residual is not negligible.
pub fn solve_exact<T>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    pol: &TolerancePolicy,
) -> Result<DMatrix<T>, LinalgError>
where
    T: ComplexField<RealField = f64>,
{
    if a.nrows() != b.nrows() {
        return Err(LinalgError::Shape(format!(
            "A has {} rows, B has {}",
            a.nrows(),
            b.nrows()
        )));
    }
    let x = pseudo_solve(a, b, pol);
    let residual = relative_residual(a, &x, b);
    if residual > pol.residual_rel_tol {
        return Err(LinalgError::Unsolvable { residual });
    }
    Ok(x)
}

/// Least-squares minimum-norm solve with singular values below the rank cutoff dropped.
pub fn pseudo_solve<T>(a: &DMatrix<T>, b: &DMatrix<T>, pol: &TolerancePolicy) -> DMatrix<T>
where
    T: ComplexField<RealField = f64>,
{
    if a.nrows() == 0 || a.ncols() == 0 {
        return DMatrix::zeros(a.ncols(), b.ncols());
    }
    let svd = a.clone().svd(true, true);
    let top = svd.singular_values.iter().copied().fold(0.0f64, f64::max);
    if top == 0.0 {
        return DMatrix::zeros(a.ncols(), b.ncols());
    }
    let cut = pol.rank_rel_tol * top;
    let u = svd.u.as_ref().expect("requested U");
    let vt = svd.v_t.as_ref().expect("requested V^T");
    let mut uh_b = u.adjoint() * b;
    for (i, &s) in svd.singular_values.iter().enumerate() {
        let scale = if s > cut { 1.0 / s } else { 0.0 };
        uh_b.row_mut(i).scale_mut(scale);
    }
    vt.adjoint() * uh_b
}

/// How far `b` is from the line spanned by `a`, relative to `‖b‖`.
/// Zero vectors are treated as colinear with everything.
pub fn colinearity_residual(a: &RVector, b: &RVector) -> f64 {
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let proj = a * (a.dot(b) / (na * na));
    (b - proj).norm() / nb
}
