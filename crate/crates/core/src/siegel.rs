//! Period matrix of the Lagrangian subspace `H^{3,0} ⊕ H^{1,2}` in the Siegel upper half space.
//!
//! The rows of `[A | B]` are `Ω(z)` followed by a basis of `H^{1,2}(z)`; at `z = 0` on the
//! quadratic slice they span the same space as `(1, 0, −i, 0)` and
//! `(0, e_k/√2, 0, −i e_k/√2)`. Since the row space is Lagrangian, `τ = σ A⁻¹ B`
//! is symmetric, and the Weil positivity of the two summands makes `Im τ` definite.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::linalg;
use crate::periods::{self, PeriodError, PeriodFrame};
use crate::C64;

/// Orientation fixed by requiring `Im τ ≻ 0` at the origin.
pub const SIEGEL_SIGN: f64 = -1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SiegelError {
    #[error(transparent)]
    Period(#[from] PeriodError),
    #[error("left block of the embedding matrix is singular")]
    Singular,
    #[error("Im tau is not positive definite (min eigenvalue {0:e}); point is outside the domain")]
    OutOfDomain(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SiegelPoint {
    pub tau: DMatrix<C64>,
    pub x: DMatrix<f64>,
    pub y: DMatrix<f64>,
}

impl SiegelPoint {
    pub fn from_tau(tau: DMatrix<C64>) -> SiegelPoint {
        SiegelPoint {
            x: tau.map(|z| z.re),
            y: tau.map(|z| z.im),
            tau,
        }
    }

    /// `max |τ − τᵀ|`.
    pub fn symmetry_defect(&self) -> f64 {
        linalg::max_abs(&(&self.tau - self.tau.transpose()))
    }

    pub fn min_eig_y(&self) -> f64 {
        let sym = (&self.y + self.y.transpose()) * 0.5;
        sym.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// The `(n+1) × (2n+2)` matrix whose rows span `H^{3,0} ⊕ H^{1,2}` at the frame's point.
pub fn embedding_matrix(frame: &PeriodFrame) -> Result<DMatrix<C64>, SiegelError> {
    let fil = periods::build_filtration(frame)?;
    let dec = periods::hodge_decomposition(&fil)?;
    let n = frame.n();
    let omega = frame.value();
    let mut m = DMatrix::zeros(n + 1, 2 * n + 2);
    m.row_mut(0).copy_from(&omega.transpose());
    for k in 0..n {
        m.row_mut(k + 1).copy_from(&dec.h12.column(k).transpose());
    }
    Ok(m)
}

/// `τ = σ A⁻¹ B` without the positivity check.
pub fn period_matrix(frame: &PeriodFrame) -> Result<SiegelPoint, SiegelError> {
    let m = embedding_matrix(frame)?;
    let half = frame.n() + 1;
    let a = m.columns(0, half).into_owned();
    let b = m.columns(half, half).into_owned();
    if linalg::condition_number(&a) > 1e12 {
        return Err(SiegelError::Singular);
    }
    let a_inv = a.try_inverse().ok_or(SiegelError::Singular)?;
    Ok(SiegelPoint::from_tau(a_inv * b * C64::new(SIEGEL_SIGN, 0.0)))
}

/// Embeds the point into the Siegel space, rejecting points where `Im τ` is not definite.
pub fn siegel_embed(frame: &PeriodFrame) -> Result<SiegelPoint, SiegelError> {
    let p = period_matrix(frame)?;
    let min = p.min_eig_y();
    if min > 0.0 {
        Ok(p)
    } else {
        Err(SiegelError::OutOfDomain(min))
    }
}
