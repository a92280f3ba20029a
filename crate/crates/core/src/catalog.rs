//! Built-in prepotentials and loading of user-supplied ones.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jets::{JetError, Prepotential};
use crate::C64;

/// Tolerance of the normal-form conditions at the origin.
pub const NORMALIZATION_TOL: f64 = 1e-12;
pub const DEFAULT_CUBIC_PARAMETER: f64 = 0.1;
pub const MAX_QUARTIC_DIMENSION: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    Value,
    Gradient,
    Hessian,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Value => "u(0) = -i",
            Condition::Gradient => "grad u(0) = 0",
            Condition::Hessian => "Hess u(0) = i I",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalizationFailure {
    pub condition: Condition,
    pub deviation: f64,
}

impl fmt::Display for NormalizationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated by {:e}", self.condition, self.deviation)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("unknown catalog entry `{0}` (known: quadratic, cubic, quartic-perturbed)")]
    UnknownEntry(String),
    #[error("prepotential is not in normal form: {}", .0.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("; "))]
    Normalization(Vec<NormalizationFailure>),
    #[error("entry `{name}` does not support dimension {n}: {reason}")]
    Dimension {
        name: String,
        n: usize,
        reason: &'static str,
    },
    #[error("invalid monomial {exponent:?}: {reason}")]
    Monomial {
        exponent: Vec<u32>,
        reason: &'static str,
    },
    #[error("parameter `{0}` does not apply to entry `{1}`")]
    UnusedParameter(&'static str, String),
    #[error(transparent)]
    Jet(#[from] JetError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub exponent: Vec<u32>,
    pub coefficient: C64,
}

/// Where the prepotential comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum PrepotentialSource {
    Catalog {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        /// Cubic coefficient of the `cubic` entry.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<f64>,
        /// Replaces the default perturbation of `quartic-perturbed`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        extra: Option<Vec<Monomial>>,
    },
    Inline {
        n: usize,
        monomials: Vec<Monomial>,
        /// Radius of the ball the sampler stays in.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
    },
}

impl PrepotentialSource {
    pub fn catalog(name: &str) -> PrepotentialSource {
        PrepotentialSource::Catalog {
            name: name.to_string(),
            n: None,
            c: None,
            extra: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub prepotential: Prepotential,
    /// Declared, never inferred; true only for the quadratic entry.
    pub complete: bool,
    /// Sampling stays in the ball of this radius around the origin.
    pub validity_radius: f64,
    pub description: String,
}

impl CatalogEntry {
    pub fn n(&self) -> usize {
        self.prepotential.dimension()
    }

    pub fn is_quadratic(&self) -> bool {
        self.name == "quadratic"
    }
}

/// One line per built-in entry, for listings.
pub fn catalog_listing() -> Vec<(&'static str, &'static str)> {
    vec![
        (
            "quadratic",
            "u = -i + (i/2) sum z_k^2, any n (default 1); complete; region |z|^2 < 2",
        ),
        (
            "cubic",
            "u = -i + (i/2) z^2 + c z^3, n = 1, parameter c (default 0.1); region |z| < 1",
        ),
        (
            "quartic-perturbed",
            "quadratic plus cubic/quartic monomials, n <= 3 (default 2); region |z| < 1",
        ),
    ]
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn quadratic_monomials(n: usize) -> Vec<(Vec<u32>, C64)> {
    let mut m = vec![(vec![0; n], c(0.0, -1.0))];
    for k in 0..n {
        let mut e = vec![0; n];
        e[k] = 2;
        m.push((e, c(0.0, 0.5)));
    }
    m
}

pub fn quadratic(n: usize) -> Result<CatalogEntry, CatalogError> {
    if n == 0 {
        return Err(CatalogError::Dimension {
            name: "quadratic".into(),
            n,
            reason: "n must be at least 1",
        });
    }
    Ok(CatalogEntry {
        name: "quadratic".into(),
        prepotential: Prepotential::new(n, quadratic_monomials(n))?,
        complete: true,
        validity_radius: std::f64::consts::SQRT_2,
        description: format!("u = -i + (i/2) sum z_k^2, n = {n}"),
    })
}

pub fn cubic(param: f64) -> Result<CatalogEntry, CatalogError> {
    let mut m = quadratic_monomials(1);
    m.push((vec![3], c(param, 0.0)));
    Ok(CatalogEntry {
        name: "cubic".into(),
        prepotential: Prepotential::new(1, m)?,
        complete: false,
        validity_radius: 1.0,
        description: format!("u = -i + (i/2) z^2 + {param} z^3"),
    })
}

pub fn default_quartic_extras(n: usize) -> Vec<Monomial> {
    let mut cubic = vec![0; n];
    cubic[0] = 3;
    let mut quartic = vec![0; n];
    if n >= 2 {
        quartic[0] = 2;
        quartic[1] = 2;
    } else {
        quartic[0] = 4;
    }
    vec![
        Monomial {
            exponent: cubic,
            coefficient: c(0.05, 0.0),
        },
        Monomial {
            exponent: quartic,
            coefficient: c(0.02, 0.0),
        },
    ]
}

pub fn quartic_perturbed(n: usize, extras: &[Monomial]) -> Result<CatalogEntry, CatalogError> {
    if n == 0 || n > MAX_QUARTIC_DIMENSION {
        return Err(CatalogError::Dimension {
            name: "quartic-perturbed".into(),
            n,
            reason: "n must be between 1 and 3",
        });
    }
    let mut m = quadratic_monomials(n);
    for extra in extras {
        let degree: u32 = extra.exponent.iter().sum();
        if extra.exponent.len() != n {
            return Err(CatalogError::Monomial {
                exponent: extra.exponent.clone(),
                reason: "exponent length differs from n",
            });
        }
        if degree != 3 && degree != 4 {
            return Err(CatalogError::Monomial {
                exponent: extra.exponent.clone(),
                reason: "perturbations must be cubic or quartic",
            });
        }
        m.push((extra.exponent.clone(), extra.coefficient));
    }
    Ok(CatalogEntry {
        name: "quartic-perturbed".into(),
        prepotential: Prepotential::new(n, m)?,
        complete: false,
        validity_radius: 1.0,
        description: format!("quadratic plus {} perturbation monomials, n = {n}", extras.len()),
    })
}

/// Checks `u(0) = −i`, `∇u(0) = 0` and `∇²u(0) = i·I`, reporting every violated condition.
pub fn check_normalization(u: &Prepotential) -> Result<(), CatalogError> {
    let n = u.dimension();
    let jet = u.jet_at(&vec![c(0.0, 0.0); n], 2)?;
    let mut failures = Vec::new();
    let value = (jet.value() - c(0.0, -1.0)).norm();
    let mut beta = vec![0u32; n];
    let mut gradient: f64 = 0.0;
    let mut hessian: f64 = 0.0;
    for i in 0..n {
        beta[i] += 1;
        gradient = gradient.max(jet.partial(&beta)?.norm());
        for j in 0..n {
            beta[j] += 1;
            let target = if i == j { c(0.0, 1.0) } else { c(0.0, 0.0) };
            hessian = hessian.max((jet.partial(&beta)? - target).norm());
            beta[j] -= 1;
        }
        beta[i] -= 1;
    }
    for (condition, deviation) in [
        (Condition::Value, value),
        (Condition::Gradient, gradient),
        (Condition::Hessian, hessian),
    ] {
        if deviation > NORMALIZATION_TOL {
            failures.push(NormalizationFailure {
                condition,
                deviation,
            });
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CatalogError::Normalization(failures))
    }
}

fn build(source: &PrepotentialSource) -> Result<CatalogEntry, CatalogError> {
    match source {
        PrepotentialSource::Catalog { name, n, c: param, extra } => match name.as_str() {
            "quadratic" => {
                if param.is_some() {
                    return Err(CatalogError::UnusedParameter("c", name.clone()));
                }
                if extra.is_some() {
                    return Err(CatalogError::UnusedParameter("extra", name.clone()));
                }
                quadratic(n.unwrap_or(1))
            }
            "cubic" => {
                if extra.is_some() {
                    return Err(CatalogError::UnusedParameter("extra", name.clone()));
                }
                if let Some(n) = n.filter(|&n| n != 1) {
                    return Err(CatalogError::Dimension {
                        name: name.clone(),
                        n,
                        reason: "the cubic entry is one-dimensional",
                    });
                }
                cubic(param.unwrap_or(DEFAULT_CUBIC_PARAMETER))
            }
            "quartic-perturbed" => {
                if param.is_some() {
                    return Err(CatalogError::UnusedParameter("c", name.clone()));
                }
                let n = n.unwrap_or(2);
                match extra {
                    Some(e) => quartic_perturbed(n, e),
                    None => quartic_perturbed(n, &default_quartic_extras(n.max(1))),
                }
            }
            _ => Err(CatalogError::UnknownEntry(name.clone())),
        },
        PrepotentialSource::Inline {
            n,
            monomials,
            radius,
        } => {
            if *n == 0 {
                return Err(CatalogError::Dimension {
                    name: "inline".into(),
                    n: *n,
                    reason: "n must be at least 1",
                });
            }
            let m = monomials
                .iter()
                .map(|m| (m.exponent.clone(), m.coefficient))
                .collect();
            Ok(CatalogEntry {
                name: "inline".into(),
                prepotential: Prepotential::new(*n, m)?,
                complete: false,
                validity_radius: radius.unwrap_or(1.0),
                description: format!("inline prepotential with {} monomials, n = {n}", monomials.len()),
            })
        }
    }
}

/// Builds the entry and validates its normal form.
pub fn load_prepotential(source: &PrepotentialSource) -> Result<CatalogEntry, CatalogError> {
    let entry = build(source)?;
    check_normalization(&entry.prepotential)?;
    Ok(entry)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_monomials_for_two_variables() {
        let e = load_prepotential(&PrepotentialSource::Catalog {
            name: "quadratic".into(),
            n: Some(2),
            c: None,
            extra: None,
        })
        .unwrap();
        assert!(e.complete);
        assert_eq!(
            e.prepotential.monomials(),
            &[
                (vec![0, 0], c(0.0, -1.0)),
                (vec![2, 0], c(0.0, 0.5)),
                (vec![0, 2], c(0.0, 0.5)),
            ]
        );
    }

    #[test]
    fn inline_linear_term_is_rejected() {
        let source = PrepotentialSource::Inline {
            n: 1,
            monomials: vec![
                Monomial {
                    exponent: vec![0],
                    coefficient: c(0.0, -1.0),
                },
                Monomial {
                    exponent: vec![1],
                    coefficient: c(1.0, 0.0),
                },
            ],
            radius: None,
        };
        match load_prepotential(&source).unwrap_err() {
            CatalogError::Normalization(f) => {
                assert!(f.iter().any(|x| x.condition == Condition::Gradient && (x.deviation - 1.0).abs() < 1e-15));
                assert!(f.iter().any(|x| x.condition == Condition::Hessian));
                assert!(f.iter().all(|x| x.condition != Condition::Value));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn cubic_term_keeps_hessian() {
        let e = load_prepotential(&PrepotentialSource::Catalog {
            name: "cubic".into(),
            n: None,
            c: Some(0.1),
            extra: None,
        })
        .unwrap();
        assert!(!e.complete);
        let jet = e.prepotential.jet_at(&[c(0.0, 0.0)], 3).unwrap();
        assert_eq!(jet.partial(&[2]).unwrap(), c(0.0, 1.0));
    }

    #[test]
    fn unknown_entry_and_bad_extras() {
        assert_eq!(
            load_prepotential(&PrepotentialSource::catalog("sextic")).unwrap_err(),
            CatalogError::UnknownEntry("sextic".into())
        );
        let bad = quartic_perturbed(
            2,
            &[Monomial {
                exponent: vec![1, 0],
                coefficient: c(1.0, 0.0),
            }],
        );
        assert!(matches!(bad, Err(CatalogError::Monomial { .. })));
        assert!(matches!(quartic_perturbed(4, &[]), Err(CatalogError::Dimension { .. })));
    }

    #[test]
    fn quartic_default_is_normalized() {
        for n in 1..=3 {
            let e = load_prepotential(&PrepotentialSource::Catalog {
                name: "quartic-perturbed".into(),
                n: Some(n),
                c: None,
                extra: None,
            })
            .unwrap();
            assert_eq!(e.n(), n);
        }
    }
}
