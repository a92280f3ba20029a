//! Period vector in Bryant–Griffiths normal form, the symplectic pairing,
//! the Hodge filtration it spans, and the Hodge–Riemann checks.
//!
//! Coordinates on `H = C^(2n+2)` are split into two halves of length
//! `N = n + 1`. The pairing is `Q(ξ, η) = i Σ_a (ξ_a η_{N+a} − ξ_{N+a} η_a)`.
//! Because `Q` already carries the factor `i`, the real skew form of the
//! Hodge–Riemann relations is `−i Q`; positivity statements below use it.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::jets::{Jet, JetError};
use crate::linalg;
use crate::C64;

/// Relative singular-value threshold for rank decisions.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PeriodError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("vector length {got} does not match pairing dimension {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("pairing dimension {0} is not of the form 2n+2 with n >= 1")]
    BadDimension(usize),
    #[error("F2 is rank deficient at this point: rank {found}, expected {expected}")]
    RankDeficient { expected: usize, found: usize },
    #[error("recovered H^{{{p},{q}}} has dimension {found}, expected {expected}")]
    DecompositionDimension {
        p: u8,
        q: u8,
        expected: usize,
        found: usize,
    },
}

fn i() -> C64 {
    C64::new(0.0, 1.0)
}

/// The pairing `Q` on `C^(2n+2)`, matrix `i [[0, I], [−I, 0]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymplecticForm {
    n: usize,
}

impl SymplecticForm {
    pub fn new(n: usize) -> SymplecticForm {
        SymplecticForm { n }
    }

    /// Infers `n` from an ambient dimension `2n + 2`.
    pub fn for_dimension(dim: usize) -> Result<SymplecticForm, PeriodError> {
        if dim < 4 || !dim.is_multiple_of(2) {
            return Err(PeriodError::BadDimension(dim));
        }
        Ok(SymplecticForm { n: dim / 2 - 1 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 2
    }

    fn half(&self) -> usize {
        self.n + 1
    }

    pub fn matrix(&self) -> DMatrix<C64> {
        let big = self.half();
        DMatrix::from_fn(self.dim(), self.dim(), |r, c| {
            if c == r + big {
                i()
            } else if r == c + big {
                -i()
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn pair(&self, xi: &[C64], eta: &[C64]) -> Result<C64, PeriodError> {
        for v in [xi, eta] {
            if v.len() != self.dim() {
                return Err(PeriodError::LengthMismatch {
                    expected: self.dim(),
                    got: v.len(),
                });
            }
        }
        let big = self.half();
        let s: C64 = (0..big)
            .map(|a| xi[a] * eta[big + a] - xi[big + a] * eta[a])
            .sum();
        Ok(i() * s)
    }

    /// Covector `c` with `Q(xi, eta) = c · eta`.
    pub fn covector(&self, xi: &DVector<C64>) -> DVector<C64> {
        let big = self.half();
        DVector::from_fn(self.dim(), |r, _| {
            if r < big {
                -i() * xi[big + r]
            } else {
                i() * xi[r - big]
            }
        })
    }

    /// `[Q(u_a, v_b)]` for the columns of `u` and `v`.
    pub fn gram(&self, u: &DMatrix<C64>, v: &DMatrix<C64>) -> DMatrix<C64> {
        u.transpose() * self.matrix() * v
    }

    /// Pairing with the jet-valued vectors `a`, `b` (componentwise products).
    pub fn pair_jets(&self, a: &[Jet], b: &[Jet]) -> Result<Jet, PeriodError> {
        for v in [a, b] {
            if v.len() != self.dim() {
                return Err(PeriodError::LengthMismatch {
                    expected: self.dim(),
                    got: v.len(),
                });
            }
        }
        let big = self.half();
        let mut sum = Jet::zero(a[0].base_point(), a[0].order());
        for k in 0..big {
            let term = a[k].checked_mul(&b[big + k])?.checked_sub(&a[big + k].checked_mul(&b[k])?)?;
            sum = sum.checked_add(&term)?;
        }
        Ok(sum.scale(i()))
    }
}

/// `Q(xi, eta)` with the dimension inferred from the vector length.
pub fn symplectic_pair(xi: &[C64], eta: &[C64]) -> Result<C64, PeriodError> {
    SymplecticForm::for_dimension(xi.len())?.pair(xi, eta)
}

/// Holomorphic period vector `Ω(z)` as a vector of jets.
#[derive(Clone, Debug)]
pub struct PeriodFrame {
    n: usize,
    omega: Vec<Jet>,
}

/// `Ω = (1, z/√2, u − ½ Σ z_i u_i, ∇u/√2)` from a jet of the prepotential `u`.
///
/// The frame has order `order(u) − 1`.
pub fn build_period_frame(u: &Jet, n: usize) -> Result<PeriodFrame, PeriodError> {
    if u.nvars() != n {
        return Err(JetError::DimensionMismatch {
            expected: n,
            got: u.nvars(),
        }
        .into());
    }
    if u.order() < 1 {
        return Err(JetError::InsufficientOrder {
            needed: 1,
            have: u.order(),
        }
        .into());
    }
    let order = u.order() - 1;
    let base = u.base_point();
    let r = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let gradient: Vec<Jet> = (0..n).map(|v| u.derivative(v)).collect::<Result<_, _>>()?;
    let coords: Vec<Jet> = (0..n).map(|v| Jet::variable(base, order, v)).collect();

    let mut omega = Vec::with_capacity(2 * n + 2);
    omega.push(Jet::constant(base, order, C64::new(1.0, 0.0)));
    omega.extend(coords.iter().map(|z| z.scale(r)));
    let mut legendre = u.truncate(order)?;
    for (z, g) in coords.iter().zip(&gradient) {
        legendre = &legendre - &(z * g).scale(C64::new(0.5, 0.0));
    }
    omega.push(legendre);
    omega.extend(gradient.iter().map(|g| g.scale(r)));
    Ok(PeriodFrame { n, omega })
}

impl PeriodFrame {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 2
    }

    pub fn order(&self) -> usize {
        self.omega[0].order()
    }

    pub fn base_point(&self) -> &[C64] {
        self.omega[0].base_point()
    }

    pub fn components(&self) -> &[Jet] {
        &self.omega
    }

    pub fn form(&self) -> SymplecticForm {
        SymplecticForm::new(self.n)
    }

    pub fn value(&self) -> DVector<C64> {
        DVector::from_iterator(self.dim(), self.omega.iter().map(Jet::value))
    }

    /// Jets of `∂_{vars} Ω`; derivatives are applied in sorted variable order.
    pub fn derivative_jets(&self, vars: &[usize]) -> Result<Vec<Jet>, PeriodError> {
        Ok(self
            .omega
            .iter()
            .map(|c| c.derivatives(vars))
            .collect::<Result<_, _>>()?)
    }

    /// `∂_{vars} Ω` at the base point.
    pub fn derivative_vector(&self, vars: &[usize]) -> Result<DVector<C64>, PeriodError> {
        let mut beta = vec![0u32; self.n];
        for &v in vars {
            beta[v] += 1;
        }
        let values = self
            .omega
            .iter()
            .map(|c| c.partial(&beta))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DVector::from_vec(values))
    }

    /// `λ Ω` for a constant `λ`.
    pub fn scaled(&self, lambda: C64) -> PeriodFrame {
        PeriodFrame {
            n: self.n,
            omega: self.omega.iter().map(|c| c.scale(lambda)).collect(),
        }
    }

    /// Copy with two components exchanged; used as a negative control.
    pub fn with_swapped_components(&self, a: usize, b: usize) -> PeriodFrame {
        let mut omega = self.omega.clone();
        omega.swap(a, b);
        PeriodFrame { n: self.n, omega }
    }
}

/// Nested flag `F³ ⊂ F² ⊂ F¹` at a point, each as orthonormal columns.
#[derive(Clone, Debug)]
pub struct Filtration {
    n: usize,
    pub f3: DMatrix<C64>,
    pub f2: DMatrix<C64>,
    pub f1: DMatrix<C64>,
}

/// `F³ = span Ω`, `F² = span(Ω, ∂Ω)`, `F¹ = Q`-orthocomplement of `F³`.
pub fn build_filtration(frame: &PeriodFrame) -> Result<Filtration, PeriodError> {
    if frame.order() < 1 {
        return Err(JetError::InsufficientOrder {
            needed: 1,
            have: frame.order(),
        }
        .into());
    }
    let n = frame.n();
    let omega = frame.value();
    let mut f2_cols = vec![omega.clone()];
    for v in 0..n {
        f2_cols.push(frame.derivative_vector(&[v])?);
    }
    let f2 = linalg::column_basis(&DMatrix::from_columns(&f2_cols), RANK_TOL);
    if f2.ncols() != n + 1 {
        return Err(PeriodError::RankDeficient {
            expected: n + 1,
            found: f2.ncols(),
        });
    }
    let f3 = DMatrix::from_columns(&[omega.normalize()]);
    let covector = frame.form().covector(&omega);
    let f1 = linalg::null_space(&DMatrix::from_row_slice(1, covector.len(), covector.as_slice()), RANK_TOL);
    Ok(Filtration { n, f3, f2, f1 })
}

impl Filtration {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn form(&self) -> SymplecticForm {
        SymplecticForm::new(self.n)
    }

    /// Ranks of `F³`, `F²`, `F¹`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.f3.ncols(), self.f2.ncols(), self.f1.ncols())
    }

    /// Largest relative residual of `F³` in `F²` and of `F²` in `F¹`.
    pub fn nesting_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (inner, outer) in [(&self.f3, &self.f2), (&self.f2, &self.f1)] {
            for col in inner.column_iter() {
                worst = worst.max(linalg::projection_residual(outer, &col.into_owned()));
            }
        }
        worst
    }
}

/// `H = H^{3,0} ⊕ H^{2,1} ⊕ H^{1,2} ⊕ H^{0,3}`, each as orthonormal columns.
#[derive(Clone, Debug)]
pub struct HodgeDecomposition {
    pub h30: DMatrix<C64>,
    pub h21: DMatrix<C64>,
    pub h12: DMatrix<C64>,
    pub h03: DMatrix<C64>,
}

impl HodgeDecomposition {
    /// Weil operator eigenvalues `i^{p−q}` in the order `(3,0), (2,1), (1,2), (0,3)`.
    pub fn weil_signs() -> [C64; 4] {
        [-i(), i(), -i(), i()]
    }

    pub fn parts(&self) -> [&DMatrix<C64>; 4] {
        [&self.h30, &self.h21, &self.h12, &self.h03]
    }

    pub fn dims(&self) -> [usize; 4] {
        self.parts().map(|m| m.ncols())
    }

    /// Largest residual of `conj(H^{p,q})` in `H^{q,p}`.
    pub fn conjugation_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, b) in [(&self.h30, &self.h03), (&self.h21, &self.h12)] {
            for col in a.column_iter() {
                let conj = col.map(|z| z.conj());
                worst = worst.max(linalg::projection_residual(b, &conj));
            }
        }
        worst
    }

    /// Matrix of the Weil operator `C` in the standard basis.
    pub fn weil_operator(&self) -> Option<DMatrix<C64>> {
        let basis = DMatrix::from_columns(
            &self
                .parts()
                .iter()
                .flat_map(|m| m.column_iter().map(|c| c.into_owned()))
                .collect::<Vec<_>>(),
        );
        let signs: Vec<C64> = self
            .parts()
            .iter()
            .zip(Self::weil_signs())
            .flat_map(|(m, s)| std::iter::repeat_n(s, m.ncols()))
            .collect();
        let inv = basis.clone().try_inverse()?;
        Some(basis * DMatrix::from_diagonal(&DVector::from_vec(signs)) * inv)
    }
}

fn conj(m: &DMatrix<C64>) -> DMatrix<C64> {
    m.map(|z| z.conj())
}

/// Recovers the Hodge decomposition with `H^{p,q} = F^p ∩ conj(F^q)`.
pub fn hodge_decomposition(fil: &Filtration) -> Result<HodgeDecomposition, PeriodError> {
    let n = fil.n;
    let h30 = fil.f3.clone();
    let h21 = linalg::intersect(&fil.f2, &conj(&fil.f1), RANK_TOL);
    let h12 = linalg::intersect(&fil.f1, &conj(&fil.f2), RANK_TOL);
    let h03 = conj(&fil.f3);
    for (p, m, expected) in [(2u8, &h21, n), (1u8, &h12, n)] {
        if m.ncols() != expected {
            return Err(PeriodError::DecompositionDimension {
                p,
                q: 3 - p,
                expected,
                found: m.ncols(),
            });
        }
    }
    Ok(HodgeDecomposition {
        h30,
        h21,
        h12,
        h03,
    })
}

/// Outcome of the Hodge–Riemann relation checks at one point.
#[derive(Clone, Debug)]
pub struct HodgeRiemannReport {
    /// `max |Q(F³, F¹)|` over orthonormal bases.
    pub q_f3_f1: f64,
    /// `max |Q(F², F²)|` over orthonormal bases.
    pub q_f2_f2: f64,
    /// Minimum of `i^{p−q} (−i Q)(ψ, conj ψ)` over unit `ψ ∈ H^{p,q}`, per component.
    pub weil_minima: [f64; 4],
    /// Minimum of `(−i Q)(Cψ, conj ψ)` over unit `ψ ∈ H`.
    pub weil_form_min: f64,
    pub conjugation_defect: f64,
    pub decomposition: HodgeDecomposition,
    /// A vector violating positivity, if any.
    pub witness: Option<DVector<C64>>,
}

impl HodgeRiemannReport {
    pub fn min_positivity(&self) -> f64 {
        self.weil_minima
            .iter()
            .copied()
            .fold(self.weil_form_min, f64::min)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.q_f3_f1 <= tol && self.q_f2_f2 <= tol && self.min_positivity() > 0.0
    }
}

fn min_eigenpair(m: &DMatrix<C64>) -> (f64, DVector<C64>) {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let (idx, val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, v)| (k, *v))
        .expect("non-empty matrix");
    (val, eig.eigenvectors.column(idx).into_owned())
}

/// Checks `Q(F³,F¹) = 0`, `Q(F²,F²) = 0` and Weil positivity.
pub fn check_hodge_riemann(fil: &Filtration) -> Result<HodgeRiemannReport, PeriodError> {
    let form = fil.form();
    let q_f3_f1 = linalg::max_abs(&form.gram(&fil.f3, &fil.f1));
    let q_f2_f2 = linalg::max_abs(&form.gram(&fil.f2, &fil.f2));
    let decomposition = hodge_decomposition(fil)?;

    let mut witness = None;
    let mut weil_minima = [0.0; 4];
    for (slot, (part, sign)) in decomposition
        .parts()
        .iter()
        .zip(HodgeDecomposition::weil_signs())
        .enumerate()
    {
        // sign · (−i) is real because p − q is odd
        let s = form.gram(part, &conj(part)) * (sign * -i());
        let (min, y) = min_eigenpair(&s);
        weil_minima[slot] = min;
        if min <= 0.0 && witness.is_none() {
            witness = Some(*part * y.map(|z| z.conj()));
        }
    }

    let weil_form_min = match decomposition.weil_operator() {
        Some(c) => {
            let w = (c.transpose() * form.matrix()) * -i();
            let (min, y) = min_eigenpair(&w);
            if min <= 0.0 && witness.is_none() {
                witness = Some(y.map(|z| z.conj()));
            }
            min
        }
        None => f64::NEG_INFINITY,
    };

    Ok(HodgeRiemannReport {
        q_f3_f1,
        q_f2_f2,
        weil_minima,
        weil_form_min,
        conjugation_defect: decomposition.conjugation_defect(),
        decomposition,
        witness,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HorizontalityReport {
    /// Largest relative residual of `∂_i Ω` off `F²`.
    pub first_order_residual: f64,
    /// Largest relative residual of `∂_i ∂_j Ω` off `F¹`.
    pub second_order_residual: f64,
}

impl HorizontalityReport {
    pub fn max_residual(&self) -> f64 {
        self.first_order_residual.max(self.second_order_residual)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() < tol
    }
}

/// Verifies `∂Ω ∈ F²` and `∂∂Ω ∈ F¹` at the frame's base point.
pub fn check_horizontality(frame: &PeriodFrame) -> Result<HorizontalityReport, PeriodError> {
    if frame.order() < 2 {
        return Err(JetError::InsufficientOrder {
            needed: 2,
            have: frame.order(),
        }
        .into());
    }
    let fil = build_filtration(frame)?;
    let n = frame.n();
    let mut first: f64 = 0.0;
    let mut second: f64 = 0.0;
    for a in 0..n {
        first = first.max(linalg::projection_residual(&fil.f2, &frame.derivative_vector(&[a])?));
        for b in a..n {
            second = second.max(linalg::projection_residual(
                &fil.f1,
                &frame.derivative_vector(&[a, b])?,
            ));
        }
    }
    Ok(HorizontalityReport {
        first_order_residual: first,
        second_order_residual: second,
    })
}
