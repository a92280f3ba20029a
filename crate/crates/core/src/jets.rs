//! Truncated multivariate power series ("jets") over complex scalars.
//!
//! A [`Jet`] stores the Taylor coefficients of a function at a base point,
//! up to a fixed total degree. Coefficients live in a flat vector whose
//! ordering is shared through a cached [`Layout`]: monomials are sorted by
//! total degree first, so truncating to a lower order is a prefix slice.
//!
//! Real-analytic functions of `z` are handled as "mixed" jets in `2n`
//! variables `(z, w)` where `w` stands in for `conj(z)`. The first `n`
//! variables are holomorphic directions, the last `n` antiholomorphic.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("jets expanded at different base points")]
    BaseMismatch,
    #[error("jet orders differ ({left} vs {right})")]
    OrderMismatch { left: usize, right: usize },
    #[error("jet has zero constant term; not invertible")]
    NotInvertible,
    #[error("insufficient jet order: need {needed}, have {have}")]
    InsufficientOrder { needed: usize, have: usize },
    #[error("invalid finite-difference step {0}")]
    InvalidStep(f64),
}

/// Monomial bookkeeping shared by every jet with the same variable count and order.
pub struct Layout {
    nvars: usize,
    order: usize,
    monomials: Vec<Vec<u32>>,
    degrees: Vec<usize>,
    index: HashMap<Vec<u32>, usize>,
    /// `(a, b, c)`: monomial `a` times monomial `b` lands on `c`.
    products: Vec<(u32, u32, u32)>,
    /// `raise[v][i]`: index of monomial `i + e_v`, or `u32::MAX` past the order.
    raise: Vec<Vec<u32>>,
}

impl Layout {
    fn build(nvars: usize, order: usize) -> Layout {
        let mut monomials = Vec::new();
        for degree in 0..=order {
            let mut current = vec![0u32; nvars];
            push_degree(&mut monomials, &mut current, 0, degree as u32);
        }
        let degrees: Vec<usize> = monomials
            .iter()
            .map(|m| m.iter().map(|&e| e as usize).sum())
            .collect();
        let index: HashMap<Vec<u32>, usize> = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();

        let mut products = Vec::new();
        let mut sum = vec![0u32; nvars];
        for (a, ma) in monomials.iter().enumerate() {
            for (b, mb) in monomials.iter().enumerate() {
                if degrees[a] + degrees[b] > order {
                    // graded ordering: every later `b` has at least this degree
                    break;
                }
                for v in 0..nvars {
                    sum[v] = ma[v] + mb[v];
                }
                let c = index[&sum];
                products.push((a as u32, b as u32, c as u32));
            }
        }

        let raise = (0..nvars)
            .map(|v| {
                monomials
                    .iter()
                    .map(|m| {
                        let mut up = m.clone();
                        up[v] += 1;
                        index.get(&up).map_or(u32::MAX, |&i| i as u32)
                    })
                    .collect()
            })
            .collect();

        Layout {
            nvars,
            order,
            monomials,
            degrees,
            index,
            products,
            raise,
        }
    }

    fn get(nvars: usize, order: usize) -> Arc<Layout> {
        type Cache = Mutex<HashMap<(usize, usize), Arc<Layout>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("layout cache poisoned");
        guard
            .entry((nvars, order))
            .or_insert_with(|| Arc::new(Layout::build(nvars, order)))
            .clone()
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Number of monomials of total degree `<= order`.
    fn prefix_len(&self, order: usize) -> usize {
        self.degrees.partition_point(|&d| d <= order)
    }
}

fn push_degree(out: &mut Vec<Vec<u32>>, current: &mut [u32], var: usize, remaining: u32) {
    if var + 1 == current.len() {
        current[var] = remaining;
        out.push(current.to_vec());
        current[var] = 0;
        return;
    }
    if current.is_empty() {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for e in (0..=remaining).rev() {
        current[var] = e;
        push_degree(out, current, var + 1, remaining - e);
    }
    current[var] = 0;
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Product of `beta_v!` over all variables.
pub fn multi_factorial(beta: &[u32]) -> f64 {
    beta.iter().map(|&b| factorial(b)).product()
}

/// A truncated Taylor expansion at a base point.
#[derive(Clone)]
pub struct Jet {
    layout: Arc<Layout>,
    base: Arc<[C64]>,
    coeffs: Vec<C64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut map = f.debug_map();
        for (m, c) in self.iter() {
            if *c != C64::new(0.0, 0.0) {
                map.entry(&m, c);
            }
        }
        map.finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.layout.nvars == other.layout.nvars
            && self.layout.order == other.layout.order
            && self.base == other.base
            && self.coeffs == other.coeffs
    }
}

impl Jet {
    pub fn zero(base: &[C64], order: usize) -> Jet {
        let layout = Layout::get(base.len(), order);
        let coeffs = vec![C64::new(0.0, 0.0); layout.len()];
        Jet {
            layout,
            base: base.into(),
            coeffs,
        }
    }

    pub fn constant(base: &[C64], order: usize, value: C64) -> Jet {
        let mut jet = Jet::zero(base, order);
        jet.coeffs[0] = value;
        jet
    }

    /// The coordinate function `x_var`, i.e. `base[var] + dx_var`.
    pub fn variable(base: &[C64], order: usize, var: usize) -> Jet {
        assert!(var < base.len(), "variable {var} out of range");
        let mut jet = Jet::constant(base, order, base[var]);
        if order >= 1 {
            let mut m = vec![0u32; base.len()];
            m[var] = 1;
            let i = jet.layout.index[&m];
            jet.coeffs[i] = C64::new(1.0, 0.0);
        }
        jet
    }

    /// Builds a jet from explicit `(multi-index, coefficient)` pairs; indices above `order` are dropped.
    pub fn from_coefficients<'a>(
        base: &[C64],
        order: usize,
        terms: impl IntoIterator<Item = (&'a [u32], C64)>,
    ) -> Result<Jet, JetError> {
        let mut jet = Jet::zero(base, order);
        for (m, c) in terms {
            if m.len() != base.len() {
                return Err(JetError::DimensionMismatch {
                    expected: base.len(),
                    got: m.len(),
                });
            }
            if let Some(&i) = jet.layout.index.get(m) {
                jet.coeffs[i] += c;
            }
        }
        Ok(jet)
    }

    pub fn nvars(&self) -> usize {
        self.layout.nvars
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn base_point(&self) -> &[C64] {
        &self.base
    }

    /// Constant term, i.e. the value at the base point.
    pub fn value(&self) -> C64 {
        self.coeffs[0]
    }

    /// Taylor coefficient at `beta`.
    ///
    /// Panics if `beta` has the wrong length or exceeds the jet order.
    pub fn coeff(&self, beta: &[u32]) -> C64 {
        self.try_coeff(beta).unwrap_or_else(|| {
            panic!(
                "multi-index {beta:?} not available in a {}-variable jet of order {}",
                self.nvars(),
                self.order()
            )
        })
    }

    pub fn try_coeff(&self, beta: &[u32]) -> Option<C64> {
        self.layout.index.get(beta).map(|&i| self.coeffs[i])
    }

    /// Partial derivative `d^beta f` at the base point.
    pub fn partial(&self, beta: &[u32]) -> Result<C64, JetError> {
        if beta.len() != self.nvars() {
            return Err(JetError::DimensionMismatch {
                expected: self.nvars(),
                got: beta.len(),
            });
        }
        let degree: usize = beta.iter().map(|&b| b as usize).sum();
        match self.try_coeff(beta) {
            Some(c) => Ok(c * multi_factorial(beta)),
            None => Err(JetError::InsufficientOrder {
                needed: degree,
                have: self.order(),
            }),
        }
    }

    /// Iterates `(multi-index, coefficient)` in graded order.
    pub fn iter(&self) -> impl Iterator<Item = (&[u32], &C64)> {
        self.layout
            .monomials
            .iter()
            .map(Vec::as_slice)
            .zip(self.coeffs.iter())
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coeffs
    }

    fn check_compatible(&self, other: &Jet) -> Result<(), JetError> {
        if self.nvars() != other.nvars() {
            return Err(JetError::DimensionMismatch {
                expected: self.nvars(),
                got: other.nvars(),
            });
        }
        if self.base != other.base {
            return Err(JetError::BaseMismatch);
        }
        if self.order() != other.order() {
            return Err(JetError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    fn with_coeffs(&self, coeffs: Vec<C64>) -> Jet {
        Jet {
            layout: self.layout.clone(),
            base: self.base.clone(),
            coeffs,
        }
    }

    pub fn checked_add(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_compatible(other)?;
        Ok(self.with_coeffs(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    pub fn checked_sub(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_compatible(other)?;
        Ok(self.with_coeffs(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        ))
    }

    /// Truncated Cauchy product.
    pub fn checked_mul(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_compatible(other)?;
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len()];
        for &(a, b, c) in &self.layout.products {
            out[c as usize] += self.coeffs[a as usize] * other.coeffs[b as usize];
        }
        Ok(self.with_coeffs(out))
    }

    pub fn scale(&self, factor: C64) -> Jet {
        self.with_coeffs(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// `self * self * ...` (`k` factors); `powi(0)` is the constant one.
    pub fn powi(&self, k: u32) -> Jet {
        let mut acc = Jet::constant(&self.base, self.order(), C64::new(1.0, 0.0));
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Nilpotent part `self / self(0) - 1`, with the constant term.
    fn split_unit(&self) -> Result<(C64, Jet), JetError> {
        let a0 = self.value();
        if a0.norm() == 0.0 {
            return Err(JetError::NotInvertible);
        }
        let mut x = self.scale(a0.inv());
        x.coeffs[0] = C64::new(0.0, 0.0);
        Ok((a0, x))
    }

    /// Multiplicative inverse by formal geometric series.
    pub fn reciprocal(&self) -> Result<Jet, JetError> {
        let (a0, x) = self.split_unit()?;
        // 1/(1+x) = sum (-x)^k, exact after `order` terms since x is nilpotent
        let minus_x = -&x;
        let mut term = Jet::constant(&self.base, self.order(), C64::new(1.0, 0.0));
        let mut sum = term.clone();
        for _ in 0..self.order() {
            term = &term * &minus_x;
            sum = &sum + &term;
        }
        Ok(sum.scale(a0.inv()))
    }

    /// Principal-branch logarithm of a jet with nonzero constant term.
    pub fn ln(&self) -> Result<Jet, JetError> {
        let (a0, x) = self.split_unit()?;
        let mut term = Jet::constant(&self.base, self.order(), C64::new(1.0, 0.0));
        let mut sum = Jet::constant(&self.base, self.order(), a0.ln());
        for k in 1..=self.order() {
            term = &term * &x;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sum = &sum + &term.scale(C64::new(sign / k as f64, 0.0));
        }
        Ok(sum)
    }

    /// `d/dx_var`, lowering the order by one.
    pub fn derivative(&self, var: usize) -> Result<Jet, JetError> {
        if var >= self.nvars() {
            return Err(JetError::DimensionMismatch {
                expected: self.nvars(),
                got: var + 1,
            });
        }
        if self.order() == 0 {
            return Err(JetError::InsufficientOrder { needed: 1, have: 0 });
        }
        let order = self.order() - 1;
        let layout = Layout::get(self.nvars(), order);
        let raise = &self.layout.raise[var];
        let coeffs = (0..layout.len())
            .map(|i| {
                let up = raise[i] as usize;
                let e = self.layout.monomials[up][var];
                self.coeffs[up] * e as f64
            })
            .collect();
        Ok(Jet {
            layout,
            base: self.base.clone(),
            coeffs,
        })
    }

    /// Applies `derivative` once per entry of `vars`, in sorted order.
    pub fn derivatives(&self, vars: &[usize]) -> Result<Jet, JetError> {
        let mut sorted = vars.to_vec();
        sorted.sort_unstable();
        let mut jet = self.clone();
        for v in sorted {
            jet = jet.derivative(v)?;
        }
        Ok(jet)
    }

    pub fn truncate(&self, order: usize) -> Result<Jet, JetError> {
        if order > self.order() {
            return Err(JetError::InsufficientOrder {
                needed: order,
                have: self.order(),
            });
        }
        if order == self.order() {
            return Ok(self.clone());
        }
        let layout = Layout::get(self.nvars(), order);
        let len = self.layout.prefix_len(order);
        debug_assert_eq!(len, layout.len());
        Ok(Jet {
            layout,
            base: self.base.clone(),
            coeffs: self.coeffs[..len].to_vec(),
        })
    }

    /// Evaluates the truncated polynomial at `base + displacement`.
    pub fn evaluate(&self, displacement: &[C64]) -> C64 {
        assert_eq!(displacement.len(), self.nvars());
        self.iter()
            .map(|(m, c)| {
                m.iter()
                    .zip(displacement)
                    .fold(*c, |acc, (&e, d)| acc * d.powu(e))
            })
            .sum()
    }

    fn embed(&self, conjugate: bool) -> Jet {
        let n = self.nvars();
        let mut base: Vec<C64> = self.base.to_vec();
        base.extend(self.base.iter().map(|b| b.conj()));
        let mut jet = Jet::zero(&base, self.order());
        let mut m = vec![0u32; 2 * n];
        for (beta, c) in self.iter() {
            m.iter_mut().for_each(|e| *e = 0);
            let offset = if conjugate { n } else { 0 };
            m[offset..offset + n].copy_from_slice(beta);
            let i = jet.layout.index[&m];
            jet.coeffs[i] = if conjugate { c.conj() } else { *c };
        }
        jet
    }

    /// Lifts a holomorphic jet in `n` variables to a mixed jet in `(z, w)`.
    pub fn to_mixed(&self) -> Jet {
        self.embed(false)
    }

    /// Mixed jet of the conjugate function `conj(f(z))`, which depends on `w` only.
    pub fn conj_to_mixed(&self) -> Jet {
        self.embed(true)
    }

    /// For a mixed jet of `g(z, w)`, the mixed jet of `conj(g)`: swaps the
    /// holomorphic and antiholomorphic halves and conjugates the coefficients.
    pub fn mixed_conjugate(&self) -> Jet {
        let n2 = self.nvars();
        assert!(n2.is_multiple_of(2), "mixed jets have an even number of variables");
        let n = n2 / 2;
        let mut coeffs = vec![C64::new(0.0, 0.0); self.coeffs.len()];
        let mut swapped = vec![0u32; n2];
        for (i, m) in self.layout.monomials.iter().enumerate() {
            swapped[..n].copy_from_slice(&m[n..]);
            swapped[n..].copy_from_slice(&m[..n]);
            coeffs[self.layout.index[&swapped]] = self.coeffs[i].conj();
        }
        self.with_coeffs(coeffs)
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.checked_add(rhs).expect("jet addition")
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.checked_sub(rhs).expect("jet subtraction")
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.checked_mul(rhs).expect("jet multiplication")
    }
}

impl Mul<C64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: C64) -> Jet {
        self.scale(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        &self + &rhs
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        &self - &rhs
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        &self * &rhs
    }
}

/// Truncated Cauchy product; errors when the operands differ in shape.
pub fn jet_mul(a: &Jet, b: &Jet) -> Result<Jet, JetError> {
    a.checked_mul(b)
}

/// Square matrix with jet entries, stored row-major.
#[derive(Clone, Debug)]
pub struct JetMatrix {
    dim: usize,
    entries: Vec<Jet>,
}

impl JetMatrix {
    pub fn new(dim: usize, entries: Vec<Jet>) -> JetMatrix {
        assert_eq!(entries.len(), dim * dim);
        JetMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &Jet {
        &self.entries[row * self.dim + col]
    }

    pub fn order(&self) -> usize {
        self.entries[0].order()
    }

    pub fn value(&self) -> nalgebra::DMatrix<C64> {
        nalgebra::DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j).value())
    }

    pub fn map(&self, f: impl Fn(&Jet) -> Jet) -> JetMatrix {
        JetMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn truncate(&self, order: usize) -> Result<JetMatrix, JetError> {
        Ok(JetMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|e| e.truncate(order))
                .collect::<Result<_, _>>()?,
        })
    }

    /// Gauss-Jordan elimination over the jet ring, pivoting on constant-term magnitude.
    pub fn inverse(&self) -> Result<JetMatrix, JetError> {
        let n = self.dim;
        let base = self.entries[0].base_point().to_vec();
        let order = self.order();
        let mut a: Vec<Vec<Jet>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let mut inv: Vec<Vec<Jet>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let v = if i == j { 1.0 } else { 0.0 };
                        Jet::constant(&base, order, C64::new(v, 0.0))
                    })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| {
                    a[r][col]
                        .value()
                        .norm()
                        .total_cmp(&a[s][col].value().norm())
                })
                .expect("non-empty pivot range");
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col].reciprocal()?;
            for j in 0..n {
                a[col][j] = &a[col][j] * &p;
                inv[col][j] = &inv[col][j] * &p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r][col].clone();
                for j in 0..n {
                    a[r][j] = &a[r][j] - &(&factor * &a[col][j]);
                    inv[r][j] = &inv[r][j] - &(&factor * &inv[col][j]);
                }
            }
        }
        Ok(JetMatrix {
            dim: n,
            entries: inv.into_iter().flatten().collect(),
        })
    }
}

/// A sparse polynomial prepotential `u(z) = sum c_beta z^beta`.
#[derive(Clone, Debug, PartialEq)]
pub struct Prepotential {
    dimension: usize,
    monomials: Vec<(Vec<u32>, C64)>,
}

impl Prepotential {
    pub fn new(dimension: usize, monomials: Vec<(Vec<u32>, C64)>) -> Result<Prepotential, JetError> {
        for (m, _) in &monomials {
            if m.len() != dimension {
                return Err(JetError::DimensionMismatch {
                    expected: dimension,
                    got: m.len(),
                });
            }
        }
        Ok(Prepotential {
            dimension,
            monomials,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn monomials(&self) -> &[(Vec<u32>, C64)] {
        &self.monomials
    }

    pub fn degree(&self) -> usize {
        self.monomials
            .iter()
            .map(|(m, _)| m.iter().map(|&e| e as usize).sum())
            .max()
            .unwrap_or(0)
    }

    fn check_point(&self, point: &[C64]) -> Result<(), JetError> {
        if point.len() != self.dimension {
            return Err(JetError::DimensionMismatch {
                expected: self.dimension,
                got: point.len(),
            });
        }
        Ok(())
    }

    /// Direct pointwise evaluation.
    pub fn evaluate(&self, point: &[C64]) -> Result<C64, JetError> {
        self.check_point(point)?;
        Ok(self
            .monomials
            .iter()
            .map(|(m, c)| {
                m.iter()
                    .zip(point)
                    .fold(*c, |acc, (&e, z)| acc * z.powu(e))
            })
            .sum())
    }

    /// Term-by-term partial derivative in `var`.
    pub fn derivative(&self, var: usize) -> Prepotential {
        let monomials = self
            .monomials
            .iter()
            .filter(|(m, _)| m[var] > 0)
            .map(|(m, c)| {
                let mut d = m.clone();
                d[var] -= 1;
                (d, c * m[var] as f64)
            })
            .collect();
        Prepotential {
            dimension: self.dimension,
            monomials,
        }
    }

    pub fn jet_at(&self, point: &[C64], order: usize) -> Result<Jet, JetError> {
        jet_from_polynomial(self, point, order)
    }
}

/// Taylor re-expansion of a polynomial prepotential at `point`, truncated at `order`.
pub fn jet_from_polynomial(p: &Prepotential, point: &[C64], order: usize) -> Result<Jet, JetError> {
    p.check_point(point)?;
    let n = p.dimension;
    let max_exp = p
        .monomials
        .iter()
        .flat_map(|(m, _)| m.iter().copied())
        .max()
        .unwrap_or(0);
    // powers[v][e] = (x_v)^e as a jet
    let powers: Vec<Vec<Jet>> = (0..n)
        .map(|v| {
            let x = Jet::variable(point, order, v);
            let mut pw = vec![Jet::constant(point, order, C64::new(1.0, 0.0))];
            for e in 1..=max_exp as usize {
                let next = &pw[e - 1] * &x;
                pw.push(next);
            }
            pw
        })
        .collect();
    let mut sum = Jet::zero(point, order);
    for (m, c) in &p.monomials {
        let mut term = Jet::constant(point, order, *c);
        for (v, &e) in m.iter().enumerate() {
            if e > 0 {
                term = &term * &powers[v][e as usize];
            }
        }
        sum = &sum + &term;
    }
    Ok(sum)
}

/// Default spacing for first derivatives in [`finite_difference_jet`].
pub const DEFAULT_FD_STEP: f64 = 1e-3;

/// Spacing grows geometrically with derivative order to keep cancellation in check.
const FD_STEP_GROWTH: f64 = 4.0;

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Tensor-product central difference of `beta` with spacing `h`.
fn central_difference<F>(f: &F, point: &[C64], beta: &[u32], h: f64) -> C64
where
    F: Fn(&[C64]) -> C64 + ?Sized,
{
    fn recurse<F: Fn(&[C64]) -> C64 + ?Sized>(
        f: &F,
        point: &[C64],
        beta: &[u32],
        h: f64,
        var: usize,
        shifted: &mut Vec<C64>,
        weight: f64,
    ) -> C64 {
        if var == beta.len() {
            return f(shifted) * weight;
        }
        let k = beta[var];
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..=k {
            let offset = (f64::from(k) / 2.0 - f64::from(j)) * h;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            shifted[var] = point[var] + offset;
            acc += recurse(
                f,
                point,
                beta,
                h,
                var + 1,
                shifted,
                weight * sign * binomial(k, j),
            );
        }
        shifted[var] = point[var];
        acc
    }
    let degree: u32 = beta.iter().sum();
    let mut shifted = point.to_vec();
    recurse(f, point, beta, h, 0, &mut shifted, 1.0) / h.powi(degree as i32)
}

/// Finite-difference estimate of the Taylor jet of a holomorphic `evaluator`.
///
/// Each partial of total order `k` uses a central stencil along real
/// directions with spacing `step * 4^(k-1)` and one Richardson level
/// (`(4 D(h/2) - D(h)) / 3`). Intended as an independent test oracle.
pub fn finite_difference_jet<F>(
    evaluator: &F,
    point: &[C64],
    order: usize,
    step: f64,
) -> Result<Jet, JetError>
where
    F: Fn(&[C64]) -> C64 + ?Sized,
{
    if !(step.is_finite() && step > 0.0) {
        return Err(JetError::InvalidStep(step));
    }
    if step < 1e-5 {
        log::warn!("finite-difference step {step:e} is below 1e-5; expect cancellation error");
    }
    let mut jet = Jet::zero(point, order);
    let layout = jet.layout.clone();
    for (i, beta) in layout.monomials.iter().enumerate() {
        let degree = layout.degrees[i];
        if degree == 0 {
            jet.coeffs[i] = evaluator(point);
            continue;
        }
        let h = step * FD_STEP_GROWTH.powi(degree as i32 - 1);
        let coarse = central_difference(evaluator, point, beta, h);
        let fine = central_difference(evaluator, point, beta, h / 2.0);
        let extrapolated = (fine * 4.0 - coarse) / 3.0;
        jet.coeffs[i] = extrapolated / multi_factorial(beta);
    }
    Ok(jet)
}
