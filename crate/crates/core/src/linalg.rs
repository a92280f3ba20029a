//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::C64;

/// Singular values plus right singular vectors (as columns), sorted descending.
fn sorted_svd(a: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>, DMatrix<C64>) {
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let v = svd.v_t.expect("v_t requested").adjoint();
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sv = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u = DMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
    let v = DMatrix::from_fn(v.nrows(), order.len(), |r, c| v[(r, order[c])]);
    (sv, u, v)
}

/// Orthonormal basis (columns) of the null space of `a`, with singular values
/// below `rel_tol * sigma_max` treated as zero.
pub fn null_space(a: &DMatrix<C64>, rel_tol: f64) -> DMatrix<C64> {
    let cols = a.ncols();
    // pad wide matrices so the SVD returns a full set of right vectors
    let padded = if a.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let (sv, _, v) = sorted_svd(&padded);
    let smax = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > rel_tol * smax.max(f64::MIN_POSITIVE)).count();
    v.columns(rank, cols - rank).into_owned()
}

/// Orthonormal basis of the column space of `a` and its numerical rank.
pub fn column_basis(a: &DMatrix<C64>, rel_tol: f64) -> DMatrix<C64> {
    if a.ncols() == 0 {
        return DMatrix::zeros(a.nrows(), 0);
    }
    let padded = if a.nrows() < a.ncols() {
        let mut p = DMatrix::zeros(a.ncols(), a.ncols());
        p.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
        p
    } else {
        a.clone()
    };
    let (sv, u, _) = sorted_svd(&padded);
    let smax = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > rel_tol * smax.max(f64::MIN_POSITIVE)).count();
    u.view((0, 0), (a.nrows(), rank)).into_owned()
}

pub fn rank(a: &DMatrix<C64>, rel_tol: f64) -> usize {
    column_basis(a, rel_tol).ncols()
}

/// Orthonormal basis of `span(u) ∩ span(v)`.
pub fn intersect(u: &DMatrix<C64>, v: &DMatrix<C64>, rel_tol: f64) -> DMatrix<C64> {
    let mut stacked = DMatrix::zeros(u.nrows(), u.ncols() + v.ncols());
    stacked.view_mut((0, 0), u.shape()).copy_from(u);
    stacked
        .view_mut((0, u.ncols()), v.shape())
        .copy_from(&(-v));
    let kernel = null_space(&stacked, rel_tol);
    let coeffs = kernel.rows(0, u.ncols()).into_owned();
    column_basis(&(u * coeffs), rel_tol)
}

/// `|v - P v| / |v|` for orthogonal projection onto the orthonormal columns of `basis`.
pub fn projection_residual(basis: &DMatrix<C64>, v: &DVector<C64>) -> f64 {
    let norm = v.norm();
    if norm == 0.0 {
        return 0.0;
    }
    let proj = basis * (basis.adjoint() * v);
    (v - proj).norm() / norm
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Largest absolute entry of `m - m^H`.
pub fn hermitian_defect(m: &DMatrix<C64>) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Condition number from singular values; infinite for singular input.
pub fn condition_number(m: &DMatrix<C64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Matrix `E` with `E^T H conj(E) = I`: its columns form an `H`-orthonormal
/// frame for the Hermitian form `(xi, eta) -> xi^T H conj(eta)`.
pub fn orthonormal_frame(h: &DMatrix<C64>) -> Option<DMatrix<C64>> {
    let chol = h.clone().cholesky()?;
    let l = chol.l();
    let l_inv = l.try_inverse()?;
    Some(l_inv.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn null_space_of_wide_row() {
        let a = DMatrix::from_row_slice(1, 3, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let k = null_space(&a, 1e-12);
        assert_eq!(k.ncols(), 2);
        assert!(max_abs(&(&a * &k)) < 1e-14);
        let gram = k.adjoint() * &k;
        assert!(max_abs(&(gram - DMatrix::identity(2, 2))) < 1e-14);
    }

    #[test]
    fn intersection_of_planes() {
        // span{e0, e1} ∩ span{e1, e2} = span{e1}
        let e = |i: usize| DVector::from_fn(3, |r, _| if r == i { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let u = DMatrix::from_columns(&[e(0), e(1)]);
        let v = DMatrix::from_columns(&[e(1), e(2)]);
        let w = intersect(&u, &v, 1e-10);
        assert_eq!(w.ncols(), 1);
        assert!((w[(1, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn frame_orthonormalizes_hermitian_form() {
        let h = DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.3, 0.4), c(0.3, -0.4), c(1.0, 0.0)]);
        let e = orthonormal_frame(&h).unwrap();
        let gram = e.transpose() * &h * e.map(|z| z.conj());
        assert!(max_abs(&(gram - DMatrix::identity(2, 2))) < 1e-14);
    }
}
