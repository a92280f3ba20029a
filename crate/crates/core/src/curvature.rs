//! Curvature of Kähler metrics given as coefficient-matrix jets.
//!
//! Two sign conventions are in play and every tensor carries its tag:
//!
//! * `Standard`: `R_{i\bar j k\bar l} = −∂_i∂_{\bar j} g_{k\bar l} + g^{p\bar q} ∂_i g_{k\bar q} ∂_{\bar j} g_{p\bar l}`.
//!   Holomorphic sectional curvature is `R(ξ,ξ̄,ξ,ξ̄)/|ξ|⁴` and is negative on the ball.
//! * `Strominger`: the negative of `Standard`, in which the Weil–Petersson curvature is
//!   `h h + h h − e^{2K} F F̄` and its Ricci contraction `Ric = −h^{k\bar l} R_{k\bar l ·}` equals
//!   `−(n+1)h + P`.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::geometry::{tensor_index, GeometryError, MetricBundle};
use crate::jets::{Jet, JetError, JetMatrix};
use crate::linalg;
use crate::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurvatureError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("metric is not positive definite")]
    NotPositive,
    #[error("direction vector is zero")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignConvention {
    Standard,
    Strominger,
}

/// `R_{i\bar j k\bar l}` at a point, stored at flat index `(i, j, k, l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTensor {
    n: usize,
    convention: SignConvention,
    data: Vec<C64>,
}

impl CurvatureTensor {
    pub fn new(n: usize, convention: SignConvention, data: Vec<C64>) -> CurvatureTensor {
        assert_eq!(data.len(), n.pow(4));
        CurvatureTensor {
            n,
            convention,
            data,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn convention(&self) -> SignConvention {
        self.convention
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        self.data[tensor_index(self.n, &[i, j, k, l])]
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn in_convention(&self, convention: SignConvention) -> CurvatureTensor {
        if convention == self.convention {
            return self.clone();
        }
        CurvatureTensor {
            n: self.n,
            convention,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    /// Largest entrywise difference after bringing `other` to this tensor's convention.
    pub fn max_difference(&self, other: &CurvatureTensor) -> f64 {
        let other = other.in_convention(self.convention);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Worst violation of the Kähler symmetries and of the reality condition.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.get(i, j, k, l);
                        worst = worst
                            .max((r - self.get(k, j, i, l)).norm())
                            .max((r - self.get(i, l, k, j)).norm())
                            .max((r - self.get(j, i, l, k).conj()).norm());
                    }
                }
            }
        }
        worst
    }

    /// `R(ξ, η̄, ζ, ω̄)`.
    pub fn evaluate(&self, xi: &[C64], eta: &[C64], zeta: &[C64], omega: &[C64]) -> C64 {
        let n = self.n;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let a = xi[i] * eta[j].conj();
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        acc += a * zeta[k] * omega[l].conj() * self.get(i, j, k, l);
                    }
                }
            }
        }
        acc
    }
}

/// Jets of the `Standard` curvature of a metric given by its jets and the jets of its inverse.
///
/// The result has order `metric.order() − 2`.
pub fn curvature_jets(metric: &JetMatrix, inverse: &JetMatrix) -> Result<Vec<Jet>, CurvatureError> {
    let n = metric.dim();
    if metric.order() < 2 {
        return Err(JetError::InsufficientOrder {
            needed: 2,
            have: metric.order(),
        }
        .into());
    }
    let o = metric.order() - 2;
    let inv = inverse.truncate(o)?;
    let base = metric.get(0, 0).base_point().to_vec();
    // d[i][k*n + q] = ∂_i g_{k\bar q}, db[j][p*n + l] = ∂_{\bar j} g_{p\bar l}
    let mut d = Vec::with_capacity(n);
    let mut db = Vec::with_capacity(n);
    for v in 0..n {
        let mut dv = Vec::with_capacity(n * n);
        let mut dbv = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                dv.push(metric.get(a, b).derivative(v)?.truncate(o)?);
                dbv.push(metric.get(a, b).derivative(n + v)?.truncate(o)?);
            }
        }
        d.push(dv);
        db.push(dbv);
    }
    let mut out = Vec::with_capacity(n.pow(4));
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut acc = -&metric.get(k, l).derivatives(&[i, n + j])?;
                    let mut quad = Jet::zero(&base, o);
                    for p in 0..n {
                        for q in 0..n {
                            let t = &d[i][k * n + q] * &db[j][p * n + l];
                            quad = &quad + &(inv.get(q, p) * &t);
                        }
                    }
                    acc = &acc + &quad;
                    out.push(acc);
                }
            }
        }
    }
    Ok(out)
}

fn values(jets: &[Jet]) -> Vec<C64> {
    jets.iter().map(Jet::value).collect()
}

/// Curvature of an arbitrary Kähler metric from its jets, in the `Standard` convention.
pub fn kahler_curvature_generic(metric: &JetMatrix, inverse: &JetMatrix) -> Result<CurvatureTensor, CurvatureError> {
    let jets = curvature_jets(metric, inverse)?;
    Ok(CurvatureTensor::new(
        metric.dim(),
        SignConvention::Standard,
        values(&jets),
    ))
}

/// Weil–Petersson curvature from the closed formula `h h + h h − e^{2K} h^{p\bar q} F_{ikp} conj F_{jlq}`.
pub fn strominger_curvature(bundle: &MetricBundle) -> Result<CurvatureTensor, CurvatureError> {
    let y = bundle.yukawa().ok_or(GeometryError::MissingYukawa)?;
    let n = bundle.n();
    let h = bundle.h();
    let weight = bundle.yukawa_weight().value().re;
    let mut data = Vec::with_capacity(n.pow(4));
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut ff = C64::new(0.0, 0.0);
                    for p in 0..n {
                        for q in 0..n {
                            ff += bundle.h_upper(p, q) * y.value(i, k, p) * y.value(j, l, q).conj();
                        }
                    }
                    data.push(h[(i, j)] * h[(k, l)] + h[(i, l)] * h[(k, j)] - ff * weight);
                }
            }
        }
    }
    Ok(CurvatureTensor::new(n, SignConvention::Strominger, data))
}

/// Generic-engine curvature jets of the Weil–Petersson metric.
pub fn weil_petersson_curvature_jets(bundle: &MetricBundle) -> Result<Vec<Jet>, CurvatureError> {
    curvature_jets(bundle.metric_jets(), bundle.inverse_jets())
}

/// Generic-engine curvature of the Hodge metric `2h + P`.
pub fn hodge_curvature(bundle: &MetricBundle) -> Result<CurvatureTensor, CurvatureError> {
    let hodge = bundle.hodge_jets().ok_or(GeometryError::MissingYukawa)?;
    let inverse = hodge.inverse()?;
    kahler_curvature_generic(hodge, &inverse)
}

/// `Ric_{i\bar j}` as a matrix; the usual Ricci form, negative on the ball.
#[derive(Clone, Debug, PartialEq)]
pub struct RicciTensor {
    pub matrix: DMatrix<C64>,
}

impl RicciTensor {
    pub fn hermitian_defect(&self) -> f64 {
        linalg::hermitian_defect(&self.matrix)
    }

    /// Eigenvalues of `Ric` relative to the metric `g`, ascending.
    pub fn eigenvalues_relative_to(&self, g: &DMatrix<C64>) -> Result<Vec<f64>, CurvatureError> {
        let e = linalg::orthonormal_frame(g).ok_or(CurvatureError::NotPositive)?;
        Ok(linalg::hermitian_eigenvalues(
            &(e.transpose() * &self.matrix * e.map(|z| z.conj())),
        ))
    }
}

/// `Ric_{a\bar i} = −h^{k\bar l} R_{k\bar l a\bar i}` with `R` in the `Strominger` convention.
pub fn ricci_from_curvature(r: &CurvatureTensor, h_inv: &DMatrix<C64>) -> RicciTensor {
    let n = r.n();
    let r = r.in_convention(SignConvention::Strominger);
    let matrix = DMatrix::from_fn(n, n, |a, i| {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..n {
            for l in 0..n {
                acc += h_inv[(l, k)] * r.get(k, l, a, i);
            }
        }
        -acc
    });
    RicciTensor { matrix }
}

/// `−(n+1) h + P`, the closed form of the Weil–Petersson Ricci tensor.
pub fn ricci_closed_form(bundle: &MetricBundle) -> Result<RicciTensor, CurvatureError> {
    let p = bundle.p().ok_or(GeometryError::MissingYukawa)?;
    let n = bundle.n() as f64;
    Ok(RicciTensor {
        matrix: p - bundle.h() * C64::new(n + 1.0, 0.0),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectionalCurvatures {
    pub holomorphic_sectional: f64,
    pub bisectional: f64,
}

/// `|ξ|²_g = ξ^i g_{i\bar j} conj ξ^j`.
pub fn hermitian_norm_sqr(g: &DMatrix<C64>, xi: &[C64]) -> f64 {
    let n = g.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += xi[i] * g[(i, j)] * xi[j].conj();
        }
    }
    acc.re
}

/// Holomorphic sectional curvature `H(ξ)` and bisectional curvature `B(ξ, η)`, in the standard sign.
pub fn sectional_evaluators(
    r: &CurvatureTensor,
    g: &DMatrix<C64>,
    xi: &[C64],
    eta: &[C64],
) -> Result<SectionalCurvatures, CurvatureError> {
    let n = r.n();
    for v in [xi, eta] {
        if v.len() != n {
            return Err(CurvatureError::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
    }
    let nx = hermitian_norm_sqr(g, xi);
    let ne = hermitian_norm_sqr(g, eta);
    if nx <= 0.0 || ne <= 0.0 || xi.iter().all(|z| z.norm() == 0.0) || eta.iter().all(|z| z.norm() == 0.0) {
        return Err(CurvatureError::ZeroVector);
    }
    let r = r.in_convention(SignConvention::Standard);
    Ok(SectionalCurvatures {
        holomorphic_sectional: r.evaluate(xi, xi, xi, xi).re / (nx * nx),
        bisectional: r.evaluate(xi, xi, eta, eta).re / (nx * ne),
    })
}

/// `∇_m R_{i\bar j k\bar l}` at a point, stored at `(m, i, j, k, l)`.
#[derive(Clone, Debug)]
pub struct CurvatureDerivative {
    pub components: Vec<C64>,
    /// Largest coordinate component.
    pub max_abs: f64,
    /// Norm in a metric-orthonormal frame.
    pub norm: f64,
}

/// Re-expresses a covariant tensor in the frame `E` (columns `g`-orthonormal);
/// slots flagged `true` are antiholomorphic and transform with `conj(E)`.
fn to_frame(t: &[C64], n: usize, barred: &[bool], e: &DMatrix<C64>) -> Vec<C64> {
    let rank = barred.len();
    let mut cur = t.to_vec();
    for (slot, &bar) in barred.iter().enumerate() {
        let stride = n.pow((rank - 1 - slot) as u32);
        let mut next = vec![C64::new(0.0, 0.0); cur.len()];
        for (flat, out) in next.iter_mut().enumerate() {
            let a = (flat / stride) % n;
            let stripped = flat - a * stride;
            for i in 0..n {
                let f = if bar { e[(i, a)].conj() } else { e[(i, a)] };
                *out += cur[stripped + i * stride] * f;
            }
        }
        cur = next;
    }
    cur
}

/// Covariant derivative of a curvature tensor from its jets (order ≥ 1) and the Christoffel values `Γ^p_{mi}`.
pub fn covariant_derivative_curvature(
    r_jets: &[Jet],
    christoffel: &[C64],
    g: &DMatrix<C64>,
) -> Result<CurvatureDerivative, CurvatureError> {
    let n = g.nrows();
    if r_jets.len() != n.pow(4) {
        return Err(CurvatureError::DimensionMismatch {
            expected: n.pow(4),
            got: r_jets.len(),
        });
    }
    if christoffel.len() != n.pow(3) {
        return Err(CurvatureError::DimensionMismatch {
            expected: n.pow(3),
            got: christoffel.len(),
        });
    }
    if r_jets[0].order() < 1 {
        return Err(JetError::InsufficientOrder {
            needed: 1,
            have: r_jets[0].order(),
        }
        .into());
    }
    let r: Vec<C64> = values(r_jets);
    let gamma = |p: usize, m: usize, i: usize| christoffel[tensor_index(n, &[p, m, i])];
    let mut beta = vec![0u32; 2 * n];
    let mut components = Vec::with_capacity(n.pow(5));
    for m in 0..n {
        beta[m] = 1;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut acc = r_jets[tensor_index(n, &[i, j, k, l])].coeff(&beta);
                        for p in 0..n {
                            acc -= gamma(p, m, i) * r[tensor_index(n, &[p, j, k, l])];
                            acc -= gamma(p, m, k) * r[tensor_index(n, &[i, j, p, l])];
                        }
                        components.push(acc);
                    }
                }
            }
        }
        beta[m] = 0;
    }
    let e = linalg::orthonormal_frame(g).ok_or(CurvatureError::NotPositive)?;
    let framed = to_frame(&components, n, &[false, false, true, false, true], &e);
    let norm = framed.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let max_abs = components.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(CurvatureDerivative {
        components,
        max_abs,
        norm,
    })
}

/// `∇R` of the Weil–Petersson metric of a bundle built from a frame of order ≥ 5.
pub fn weil_petersson_curvature_derivative(bundle: &MetricBundle) -> Result<CurvatureDerivative, CurvatureError> {
    let n = bundle.n();
    if bundle.christoffel_jets().is_empty() {
        return Err(JetError::InsufficientOrder {
            needed: 3,
            have: bundle.metric_jets().order(),
        }
        .into());
    }
    let jets = weil_petersson_curvature_jets(bundle)?;
    let gamma: Vec<C64> = (0..n.pow(3))
        .map(|f| bundle.christoffel_jets()[f].value())
        .collect();
    covariant_derivative_curvature(&jets, &gamma, bundle.h())
}
