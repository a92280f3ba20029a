//! Kähler potential, Weil–Petersson metric, Yukawa coupling, the tensor `P`,
//! the Hodge metric and covariant derivatives of the Yukawa coupling.
//!
//! Everything is computed as mixed jets in `(z, w = conj z)` at one base
//! point. Metrics are stored as coefficient matrices `h[i][j] = h_{i\bar j}`.
//! The inverse matrix is `h_inv = h^{-1}`, so the raised-index metric is
//! `h^{p\bar q} = h_inv[q][p]`.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::jets::{Jet, JetError, JetMatrix};
use crate::linalg;
use crate::periods::{PeriodError, PeriodFrame};
use crate::C64;

/// Largest accepted condition number of the metric.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Period(#[from] PeriodError),
    #[error("e^-K = {0} is not positive; point lies outside the polarized region")]
    NonPositivePotential(f64),
    #[error("metric is singular (condition number {0:e})")]
    SingularMetric(f64),
    #[error("Yukawa coupling has not been attached to this bundle")]
    MissingYukawa,
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Flat index of a rank-`indices.len()` tensor with all dimensions `n`.
pub fn tensor_index(n: usize, indices: &[usize]) -> usize {
    indices.iter().fold(0, |acc, &i| acc * n + i)
}

/// Totally symmetric Yukawa coupling `F_{ijk} = Q(∂_i∂_j∂_k Ω, Ω)`, as holomorphic jets.
#[derive(Clone, Debug)]
pub struct Yukawa {
    n: usize,
    components: Vec<Jet>,
}

impl Yukawa {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.components[0].order()
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Jet {
        &self.components[tensor_index(self.n, &[i, j, k])]
    }

    pub fn value(&self, i: usize, j: usize, k: usize) -> C64 {
        self.get(i, j, k).value()
    }

    pub fn components(&self) -> &[Jet] {
        &self.components
    }

    /// `max |F_{ijk} − F_{σ(ijk)}|` over all permutations, at the base point.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.value(i, j, k);
                    for (a, b, c) in [(j, i, k), (i, k, j), (k, j, i), (j, k, i), (k, i, j)] {
                        worst = worst.max((v - self.value(a, b, c)).norm());
                    }
                }
            }
        }
        worst
    }

    /// Adds `delta` to the constant term of one component (and its symmetric images).
    pub fn perturbed(&self, i: usize, j: usize, k: usize, delta: C64) -> Yukawa {
        let mut out = self.clone();
        let mut idx = [i, j, k];
        idx.sort_unstable();
        for a in 0..self.n {
            for b in 0..self.n {
                for c in 0..self.n {
                    let mut s = [a, b, c];
                    s.sort_unstable();
                    if s == idx {
                        let slot = tensor_index(self.n, &[a, b, c]);
                        let jet = &out.components[slot];
                        let bump = Jet::constant(jet.base_point(), jet.order(), delta);
                        out.components[slot] = jet + &bump;
                    }
                }
            }
        }
        out
    }
}

/// Yukawa coupling of a period frame; symmetric by construction.
pub fn yukawa(frame: &PeriodFrame) -> Result<Yukawa, GeometryError> {
    if frame.order() < 3 {
        return Err(JetError::InsufficientOrder {
            needed: 3,
            have: frame.order(),
        }
        .into());
    }
    let n = frame.n();
    let order = frame.order() - 3;
    let form = frame.form();
    let omega: Vec<Jet> = frame
        .components()
        .iter()
        .map(|c| c.truncate(order))
        .collect::<Result<_, _>>()?;
    let mut components = vec![Jet::zero(frame.base_point(), order); n * n * n];
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let d3 = frame.derivative_jets(&[i, j, k])?;
                let f = form.pair_jets(&d3, &omega)?;
                for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                    components[tensor_index(n, &[a, b, c])] = f.clone();
                }
            }
        }
    }
    Ok(Yukawa { n, components })
}

/// Pointwise geometry of the slice: potential, metric, connection, Yukawa, `P`, Hodge metric.
#[derive(Clone, Debug)]
pub struct MetricBundle {
    n: usize,
    point: Vec<C64>,
    potential: Jet,
    kahler: Jet,
    weight: Jet,
    metric: JetMatrix,
    inverse: JetMatrix,
    christoffel: Vec<Jet>,
    h: DMatrix<C64>,
    h_inv: DMatrix<C64>,
    yukawa: Option<Yukawa>,
    p: Option<JetMatrix>,
    hodge: Option<JetMatrix>,
}

/// Potential `K = −log(−Q(Ω, conj Ω))`, metric `h = ∂∂̄K`, its inverse and Christoffel symbols.
pub fn kahler_potential_and_metric(frame: &PeriodFrame) -> Result<MetricBundle, GeometryError> {
    if frame.order() < 2 {
        return Err(JetError::InsufficientOrder {
            needed: 2,
            have: frame.order(),
        }
        .into());
    }
    let n = frame.n();
    let order = frame.order();
    let holo: Vec<Jet> = frame.components().iter().map(Jet::to_mixed).collect();
    let anti: Vec<Jet> = frame.components().iter().map(Jet::conj_to_mixed).collect();
    let potential = -&frame.form().pair_jets(&holo, &anti)?;
    let e_minus_k = potential.value().re;
    if !(e_minus_k > 0.0) {
        return Err(GeometryError::NonPositivePotential(e_minus_k));
    }
    let kahler = -&potential.ln()?;
    let weight = potential.reciprocal()?.powi(2);

    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        let di = kahler.derivative(i)?;
        for j in 0..n {
            entries.push(di.derivative(n + j)?);
        }
    }
    let metric = JetMatrix::new(n, entries);
    let h = metric.value();
    let cond = linalg::condition_number(&h);
    if !(cond <= MAX_CONDITION) {
        return Err(GeometryError::SingularMetric(cond));
    }
    let inverse = metric.inverse()?;
    let h_inv = inverse.value();

    let mut christoffel = Vec::new();
    if order >= 3 {
        let o = order - 3;
        let inv_t = inverse.truncate(o)?;
        for p in 0..n {
            for l in 0..n {
                for i in 0..n {
                    let mut acc = Jet::zero(kahler.base_point(), o);
                    for q in 0..n {
                        let dh = metric.get(i, q).derivative(l)?;
                        acc = &acc + &(inv_t.get(q, p) * &dh);
                    }
                    christoffel.push(acc);
                }
            }
        }
    }

    Ok(MetricBundle {
        n,
        point: frame.base_point().to_vec(),
        potential,
        kahler,
        weight,
        metric,
        inverse,
        christoffel,
        h,
        h_inv,
        yukawa: None,
        p: None,
        hodge: None,
    })
}

/// `T'_{..b..} = Σ_a h^{a\bar b} T_{..a..}` on one slot of a rank-`rank` tensor.
fn raise_slot(t: &[Jet], n: usize, rank: usize, slot: usize, inverse: &JetMatrix) -> Vec<Jet> {
    let stride = n.pow((rank - 1 - slot) as u32);
    let order = t[0].order();
    let base = t[0].base_point().to_vec();
    (0..t.len())
        .map(|flat| {
            let b = (flat / stride) % n;
            let stripped = flat - b * stride;
            let mut acc = Jet::zero(&base, order);
            for a in 0..n {
                acc = &acc + &(inverse.get(b, a) * &t[stripped + a * stride]);
            }
            acc
        })
        .collect()
}

/// `Σ_{I,J} a_I conj(b_J) Π h^{i_k \bar j_k}` for mixed-jet tensors of equal rank.
fn hermitian_contraction(a: &[Jet], b: &[Jet], n: usize, rank: usize, inverse: &JetMatrix) -> Jet {
    let mut raised = a.to_vec();
    for slot in 0..rank {
        raised = raise_slot(&raised, n, rank, slot, inverse);
    }
    let mut acc = Jet::zero(a[0].base_point(), a[0].order());
    for (x, y) in raised.iter().zip(b) {
        acc = &acc + &(x * &y.mixed_conjugate());
    }
    acc
}

impl MetricBundle {
    /// Full construction: metric, Yukawa coupling (when the frame order allows), `P` and `h_H`.
    pub fn from_frame(frame: &PeriodFrame) -> Result<MetricBundle, GeometryError> {
        let mut bundle = kahler_potential_and_metric(frame)?;
        if frame.order() >= 3 {
            bundle.attach_yukawa(yukawa(frame)?);
            p_and_hodge_metric(&mut bundle)?;
        }
        Ok(bundle)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn point(&self) -> &[C64] {
        &self.point
    }

    /// Mixed jet of `e^{-K} = −Q(Ω, conj Ω)`.
    pub fn potential_weight(&self) -> &Jet {
        &self.potential
    }

    pub fn kahler_potential(&self) -> &Jet {
        &self.kahler
    }

    /// Mixed jet of `e^{2K}`.
    pub fn yukawa_weight(&self) -> &Jet {
        &self.weight
    }

    pub fn metric_jets(&self) -> &JetMatrix {
        &self.metric
    }

    pub fn inverse_jets(&self) -> &JetMatrix {
        &self.inverse
    }

    pub fn h(&self) -> &DMatrix<C64> {
        &self.h
    }

    pub fn h_inv(&self) -> &DMatrix<C64> {
        &self.h_inv
    }

    /// `h^{p\bar q}` at the base point.
    pub fn h_upper(&self, p: usize, q: usize) -> C64 {
        self.h_inv[(q, p)]
    }

    /// Christoffel jets `Γ^p_{li}`, empty if the frame order was below 3.
    pub fn christoffel_jets(&self) -> &[Jet] {
        &self.christoffel
    }

    pub fn christoffel(&self, p: usize, l: usize, i: usize) -> C64 {
        self.christoffel[tensor_index(self.n, &[p, l, i])].value()
    }

    pub fn attach_yukawa(&mut self, y: Yukawa) {
        self.yukawa = Some(y);
        self.p = None;
        self.hodge = None;
    }

    pub fn yukawa(&self) -> Option<&Yukawa> {
        self.yukawa.as_ref()
    }

    pub fn p_jets(&self) -> Option<&JetMatrix> {
        self.p.as_ref()
    }

    pub fn p(&self) -> Option<DMatrix<C64>> {
        self.p.as_ref().map(JetMatrix::value)
    }

    pub fn hodge_jets(&self) -> Option<&JetMatrix> {
        self.hodge.as_ref()
    }

    pub fn hodge(&self) -> Option<DMatrix<C64>> {
        self.hodge.as_ref().map(JetMatrix::value)
    }

    /// `h^{i\bar j} P_{i\bar j}`.
    pub fn trace_p(&self) -> Option<f64> {
        let p = self.p()?;
        let mut t = C64::new(0.0, 0.0);
        for i in 0..self.n {
            for j in 0..self.n {
                t += self.h_upper(i, j) * p[(i, j)];
            }
        }
        Some(t.re)
    }

    fn mixed_yukawa(&self, order: usize) -> Result<Vec<Jet>, GeometryError> {
        let y = self.yukawa.as_ref().ok_or(GeometryError::MissingYukawa)?;
        Ok(y.components()
            .iter()
            .map(|f| f.truncate(order).map(|t| t.to_mixed()))
            .collect::<Result<_, _>>()?)
    }

    /// `f₀ = e^{2K} |F|²` as a mixed jet of the order of the Yukawa jets (capped by the metric order).
    pub fn yukawa_norm_jet(&self) -> Result<Jet, GeometryError> {
        let y = self.yukawa.as_ref().ok_or(GeometryError::MissingYukawa)?;
        let order = y.order().min(self.metric.order());
        let f = self.mixed_yukawa(order)?;
        let inv = self.inverse.truncate(order)?;
        let weight = self.weight.truncate(order)?;
        Ok(&weight * &hermitian_contraction(&f, &f, self.n, 3, &inv))
    }
}

/// `P_{i\bar j} = e^{2K} h^{p\bar q} h^{r\bar s} F_{ipr} conj(F_{jqs})` and `h_H = 2h + P`.
pub fn p_and_hodge_metric(bundle: &mut MetricBundle) -> Result<(), GeometryError> {
    let y = bundle.yukawa.as_ref().ok_or(GeometryError::MissingYukawa)?;
    let n = bundle.n;
    let order = y.order().min(bundle.metric.order());
    let f = bundle.mixed_yukawa(order)?;
    let fbar: Vec<Jet> = f.iter().map(Jet::mixed_conjugate).collect();
    let inv = bundle.inverse.truncate(order)?;
    let weight = bundle.weight.truncate(order)?;
    let raised = raise_slot(&raise_slot(&f, n, 3, 1, &inv), n, 3, 2, &inv);
    let mut p_entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Jet::zero(weight.base_point(), order);
            for q in 0..n {
                for s in 0..n {
                    acc = &acc + &(&raised[tensor_index(n, &[i, q, s])] * &fbar[tensor_index(n, &[j, q, s])]);
                }
            }
            p_entries.push(&weight * &acc);
        }
    }
    let p = JetMatrix::new(n, p_entries);
    let metric = bundle.metric.truncate(order)?;
    let hodge = JetMatrix::new(
        n,
        (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                &metric.get(i, j).scale(real(2.0)) + p.get(i, j)
            })
            .collect(),
    );
    bundle.p = Some(p);
    bundle.hodge = Some(hodge);
    Ok(())
}

/// Covariant derivatives of the Yukawa coupling and their weighted norms.
#[derive(Clone, Debug)]
pub struct YukawaJet {
    n: usize,
    /// `∇_l F_{ijk}` at index `(l, i, j, k)`.
    pub nabla: Vec<Jet>,
    /// `∇_m ∇_l F_{ijk}` at index `(m, l, i, j, k)`.
    pub nabla2: Vec<Jet>,
    /// `f₀ = |F|²` as a mixed jet.
    pub f0: Jet,
    /// `f₁ = |∇F|²` as a mixed jet.
    pub f1: Jet,
    /// `f₂ = |∇²F|²` as a mixed jet.
    pub f2: Jet,
}

impl YukawaJet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn f0_value(&self) -> f64 {
        self.f0.value().re
    }

    pub fn f1_value(&self) -> f64 {
        self.f1.value().re
    }

    pub fn f2_value(&self) -> f64 {
        self.f2.value().re
    }
}

/// One covariant derivative of a tensor section of `(T*)^{⊗r} ⊗ L²`.
///
/// `t` has rank `rank`; the new derivative index goes first.
fn covariant_step(
    t: &[Jet],
    n: usize,
    rank: usize,
    dk: &[Jet],
    gamma: &[Jet],
) -> Result<Vec<Jet>, GeometryError> {
    let order = t[0].order() - 1;
    let t_low: Vec<Jet> = t.iter().map(|x| x.truncate(order)).collect::<Result<_, _>>()?;
    let dk: Vec<Jet> = dk.iter().map(|x| x.truncate(order)).collect::<Result<_, _>>()?;
    let gamma: Vec<Jet> = gamma.iter().map(|x| x.truncate(order)).collect::<Result<_, _>>()?;
    let size = n.pow(rank as u32);
    let mut out = Vec::with_capacity(n * size);
    let mut idx = vec![0usize; rank];
    for l in 0..n {
        for flat in 0..size {
            let mut rem = flat;
            for slot in (0..rank).rev() {
                idx[slot] = rem % n;
                rem /= n;
            }
            let mut acc = t[flat].derivative(l)?;
            acc = &acc + &(&dk[l] * &t_low[flat]).scale(real(2.0));
            for slot in 0..rank {
                let original = idx[slot];
                for p in 0..n {
                    idx[slot] = p;
                    let g = &gamma[tensor_index(n, &[p, l, original])];
                    acc = &acc - &(g * &t_low[tensor_index(n, &idx)]);
                }
                idx[slot] = original;
            }
            out.push(acc);
        }
    }
    Ok(out)
}

/// `∇F`, `∇²F` for the Chern connection on `Sym³T* ⊗ (F³)^{⊗2}` and the norms `f₀, f₁, f₂`.
pub fn covariant_derivative_yukawa(bundle: &MetricBundle) -> Result<YukawaJet, GeometryError> {
    let y = bundle.yukawa.as_ref().ok_or(GeometryError::MissingYukawa)?;
    let n = bundle.n;
    let order = y.order().min(bundle.christoffel.first().map_or(0, Jet::order));
    if order < 2 {
        return Err(JetError::InsufficientOrder { needed: 2, have: order }.into());
    }
    let f = bundle.mixed_yukawa(order)?;
    let dk: Vec<Jet> = (0..n)
        .map(|l| bundle.kahler.derivative(l))
        .collect::<Result<_, _>>()?;
    let gamma: Vec<Jet> = bundle
        .christoffel
        .iter()
        .map(|g| g.truncate(order))
        .collect::<Result<_, _>>()?;

    let nabla = covariant_step(&f, n, 3, &dk, &gamma)?;
    let nabla2 = covariant_step(&nabla, n, 4, &dk, &gamma)?;

    let norm = |t: &[Jet], rank: usize| -> Result<Jet, GeometryError> {
        let o = t[0].order();
        let inv = bundle.inverse.truncate(o)?;
        let w = bundle.weight.truncate(o)?;
        Ok(&w * &hermitian_contraction(t, t, n, rank, &inv))
    };
    let f0 = norm(&f, 3)?;
    let f1 = norm(&nabla, 4)?;
    let f2 = norm(&nabla2, 5)?;
    Ok(YukawaJet {
        n,
        nabla,
        nabla2,
        f0,
        f1,
        f2,
    })
}

/// Complex Laplacian `Δf = h^{i\bar j} ∂_i ∂_{\bar j} f` of a mixed jet at the base point.
pub fn complex_laplacian(f: &Jet, bundle: &MetricBundle) -> Result<f64, GeometryError> {
    let n = bundle.n;
    if f.nvars() != 2 * n {
        return Err(JetError::DimensionMismatch {
            expected: 2 * n,
            got: f.nvars(),
        }
        .into());
    }
    if f.order() < 2 {
        return Err(JetError::InsufficientOrder {
            needed: 2,
            have: f.order(),
        }
        .into());
    }
    let mut beta = vec![0u32; 2 * n];
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            beta[i] += 1;
            beta[n + j] += 1;
            acc += bundle.h_upper(i, j) * f.coeff(&beta);
            beta[i] -= 1;
            beta[n + j] -= 1;
        }
    }
    Ok(acc.re)
}

/// Riemannian gradient length `sqrt(2 h^{i\bar j} ∂_i f ∂_{\bar j} f)` of a real mixed jet.
pub fn gradient_norm(f: &Jet, bundle: &MetricBundle) -> Result<f64, GeometryError> {
    let n = bundle.n;
    if f.order() < 1 {
        return Err(JetError::InsufficientOrder {
            needed: 1,
            have: f.order(),
        }
        .into());
    }
    let mut beta = vec![0u32; 2 * n];
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        beta[i] = 1;
        let fi = f.coeff(&beta);
        beta[i] = 0;
        for j in 0..n {
            beta[n + j] = 1;
            let fj = f.coeff(&beta);
            beta[n + j] = 0;
            acc += bundle.h_upper(i, j) * fi * fj;
        }
    }
    Ok((2.0 * acc.re).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::Prepotential;
    use crate::periods::build_period_frame;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn quadratic(n: usize) -> Prepotential {
        let mut m = vec![(vec![0; n], c(0.0, -1.0))];
        for k in 0..n {
            let mut e = vec![0; n];
            e[k] = 2;
            m.push((e, c(0.0, 0.5)));
        }
        Prepotential::new(n, m).unwrap()
    }

    fn cubic(cc: f64) -> Prepotential {
        Prepotential::new(
            1,
            vec![
                (vec![0], c(0.0, -1.0)),
                (vec![2], c(0.0, 0.5)),
                (vec![3], c(cc, 0.0)),
            ],
        )
        .unwrap()
    }

    fn bundle(p: &Prepotential, z: &[C64]) -> MetricBundle {
        let frame = build_period_frame(&p.jet_at(z, 6).unwrap(), p.dimension()).unwrap();
        MetricBundle::from_frame(&frame).unwrap()
    }

    #[test]
    fn quadratic_metric_at_origin() {
        let b = bundle(&quadratic(2), &[c(0.0, 0.0); 2]);
        assert!((b.potential_weight().value() - c(2.0, 0.0)).norm() < 1e-15);
        let expected = DMatrix::<C64>::identity(2, 2) * c(0.5, 0.0);
        assert!(linalg::max_abs(&(b.h() - expected)) < 1e-15);
    }

    #[test]
    fn quadratic_metric_closed_form() {
        let z = [c(0.4, -0.3), c(0.2, 0.6)];
        let b = bundle(&quadratic(2), &z);
        let a = 2.0 - z.iter().map(|x| x.norm_sqr()).sum::<f64>();
        for i in 0..2 {
            for j in 0..2 {
                let delta = if i == j { 1.0 } else { 0.0 };
                let expected = c(delta / a, 0.0) + z[j] * z[i].conj() / (a * a);
                assert!((b.h()[(i, j)] - expected).norm() < 1e-13);
            }
        }
        assert!(linalg::hermitian_defect(b.h()) == 0.0);
    }

    #[test]
    fn non_positive_potential_rejected() {
        let p = quadratic(1);
        let frame = build_period_frame(&p.jet_at(&[c(2.0, 0.0)], 3).unwrap(), 1).unwrap();
        let err = kahler_potential_and_metric(&frame).unwrap_err();
        assert!(matches!(err, GeometryError::NonPositivePotential(v) if (v + 2.0).abs() < 1e-12));
    }

    #[test]
    fn yukawa_vanishes_for_quadratic() {
        let b = bundle(&quadratic(3), &[c(0.3, 0.1), c(-0.2, 0.4), c(0.5, -0.3)]);
        let y = b.yukawa().unwrap();
        assert!(y.components().iter().all(|f| f.coefficients().iter().all(|x| x.norm() < 1e-15)));
        assert!(linalg::max_abs(&b.p().unwrap()) < 1e-15);
        let hodge = b.hodge().unwrap();
        assert!(linalg::max_abs(&(hodge - b.h() * c(2.0, 0.0))) < 1e-15);
    }

    #[test]
    fn cubic_yukawa_is_constant() {
        let cc = 0.1;
        for z in [c(0.0, 0.0), c(0.4, -0.2), c(-0.5, 0.5)] {
            let b = bundle(&cubic(cc), &[z]);
            let f = b.yukawa().unwrap().value(0, 0, 0);
            assert!((f - c(0.0, 3.0 * cc)).norm() < 1e-14, "{f}");
        }
    }

    #[test]
    fn yukawa_symmetry_is_exact() {
        let p = Prepotential::new(
            2,
            vec![
                (vec![0, 0], c(0.0, -1.0)),
                (vec![2, 0], c(0.0, 0.5)),
                (vec![0, 2], c(0.0, 0.5)),
                (vec![2, 1], c(0.07, 0.02)),
                (vec![1, 3], c(-0.03, 0.01)),
            ],
        )
        .unwrap();
        let b = bundle(&p, &[c(0.3, -0.1), c(0.2, 0.2)]);
        assert_eq!(b.yukawa().unwrap().symmetry_defect(), 0.0);
    }

    #[test]
    fn trace_of_p_is_yukawa_norm() {
        let b = bundle(&cubic(0.1), &[c(0.0, 0.0)]);
        let f0 = b.yukawa_norm_jet().unwrap().value().re;
        assert!((b.trace_p().unwrap() - f0).abs() < 1e-10);
        assert!(f0 > 0.0);
    }

    #[test]
    fn laplacian_of_norm_squared_at_origin() {
        for n in 1..=3 {
            let b = bundle(&quadratic(n), &vec![c(0.0, 0.0); n]);
            let base: Vec<C64> = vec![c(0.0, 0.0); 2 * n];
            let mut f = Jet::zero(&base, 2);
            for i in 0..n {
                f = &f + &(&Jet::variable(&base, 2, i) * &Jet::variable(&base, 2, n + i));
            }
            let lap = complex_laplacian(&f, &b).unwrap();
            assert!((lap - 2.0 * n as f64).abs() < 1e-14);
            let constant = Jet::constant(&base, 2, c(3.0, 0.0));
            assert_eq!(complex_laplacian(&constant, &b).unwrap(), 0.0);
        }
    }

    #[test]
    fn covariant_derivatives_vanish_for_quadratic() {
        let b = bundle(&quadratic(2), &[c(0.5, 0.1), c(-0.2, 0.3)]);
        let yj = covariant_derivative_yukawa(&b).unwrap();
        assert!(yj.f0_value().abs() < 1e-20);
        assert!(yj.f1_value().abs() < 1e-20);
        assert!(yj.f2_value().abs() < 1e-20);
    }

    #[test]
    fn norms_are_scale_invariant() {
        let p = cubic(0.1);
        let z = [c(0.3, -0.4)];
        let frame = build_period_frame(&p.jet_at(&z, 6).unwrap(), 1).unwrap();
        let a = MetricBundle::from_frame(&frame).unwrap();
        let b = MetricBundle::from_frame(&frame.scaled(c(2.0, 1.0))).unwrap();
        assert!(linalg::max_abs(&(a.h() - b.h())) < 1e-12);
        let ya = covariant_derivative_yukawa(&a).unwrap();
        let yb = covariant_derivative_yukawa(&b).unwrap();
        for (x, y) in [
            (ya.f0_value(), yb.f0_value()),
            (ya.f1_value(), yb.f1_value()),
            (ya.f2_value(), yb.f2_value()),
        ] {
            assert!((x - y).abs() < 1e-10 * x.abs().max(1.0), "{x} vs {y}");
        }
    }

    #[test]
    fn missing_yukawa_is_an_error() {
        let p = quadratic(1);
        let frame = build_period_frame(&p.jet_at(&[c(0.0, 0.0)], 3).unwrap(), 1).unwrap();
        let mut b = kahler_potential_and_metric(&frame).unwrap();
        assert_eq!(p_and_hodge_metric(&mut b).unwrap_err(), GeometryError::MissingYukawa);
        assert!(covariant_derivative_yukawa(&b).is_err());
    }
}
