//! Residuals of the defining relations on a truncated representation.
//!
//! Every relation is evaluated as `LHS − RHS` and reduced to the largest entry
//! magnitude on the interior block `Π_m (LHS − RHS) Π_m`, where `Π_m` keeps
//! basis states `0..D−1−m` and `m` is the relation's word length (the largest
//! number of ladder factors in any of its terms). Each ladder factor moves the
//! truncation artifact at most one state down, so masking `m` top states
//! removes it exactly.

use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::root_of_unity;
use crate::error::{Error, Result};
use crate::fock::{adjoint, interior_max, promote, real, CMatrix, TruncatedFockRep};
use crate::scalar::Real;

/// Default tolerance for relations with word length at most 2.
pub const DEFAULT_TOL: f64 = 1e-12;

pub const MARGIN_POLICY: &str = "mask word-length top states";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualEntry {
    pub relation: String,
    pub word_length: usize,
    #[serde(serialize_with = "crate::fmt::ser_f64")]
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub entries: Vec<ResidualEntry>,
    #[serde(serialize_with = "crate::fmt::ser_f64")]
    pub tolerance: f64,
    pub dim: usize,
    pub margin_policy: String,
}

impl ResidualReport {
    fn from_residuals(raw: Vec<(&str, usize, f64)>, tolerance: f64, dim: usize) -> Self {
        let entries = raw
            .into_iter()
            .map(|(relation, word_length, residual)| ResidualEntry {
                relation: relation.to_string(),
                word_length,
                residual,
                pass: residual <= tolerance,
            })
            .collect();
        Self { entries, tolerance, dim, margin_policy: MARGIN_POLICY.to_string() }
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn get(&self, relation: &str) -> Option<&ResidualEntry> {
        self.entries.iter().find(|e| e.relation == relation)
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.residual).fold(0.0, f64::max)
    }
}

/// 0/1 diagonal keeping basis states `0..dim−1−margin`.
pub fn interior_projector(dim: usize, margin: usize) -> Result<DMatrix<f64>> {
    if margin >= dim {
        return Err(Error::MarginTooLarge { margin, dim });
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| if i == j && i < dim - margin { 1.0 } else { 0.0 }))
}

type Check<'a> = (&'static str, usize, Box<dyn Fn() -> f64 + Send + Sync + 'a>);

fn evaluate(checks: Vec<Check<'_>>) -> Vec<(&'static str, usize, f64)> {
    // order of the returned entries is declaration order
    checks
        .par_iter()
        .map(|(id, m, f)| (*id, *m, f()))
        .collect()
}

fn power<T: Real>(m: &CMatrix<T>, k: usize) -> CMatrix<T> {
    let n = m.nrows();
    (0..k).fold(CMatrix::<T>::identity(n, n), |acc, _| acc * m)
}

fn commutator<T: Real>(x: &CMatrix<T>, y: &CMatrix<T>) -> CMatrix<T> {
    x * y - y * x
}

/// Checks both presentations of the algebra: the cyclic-generator form with
/// couplings κ and the projector form with couplings α, plus the Hermiticity
/// relations.
pub fn verify_defining_relations<T: Real>(rep: &TruncatedFockRep<T>, tol: f64) -> ResidualReport {
    let lambda = rep.lambda();
    let spec = rep.spec();
    let (a, ad, n, t) = (rep.a(), rep.adag(), rep.num(), rep.t());
    let one = rep.identity();
    let omega = promote::<T>(root_of_unity(1, lambda));
    let omega_bar = omega.conj();
    let max_over_sectors = |f: &dyn Fn(i64) -> f64| (0..lambda as i64).map(f).fold(0.0, f64::max);

    let checks: Vec<Check<'_>> = vec![
        ("t_commutator", 2, Box::new(|| {
            let mut rhs = one.clone();
            let mut tp = one.clone();
            for mu in 1..lambda {
                tp = &tp * t;
                rhs += &tp * promote::<T>(spec.kappa_at(mu as i64));
            }
            interior_max(&(commutator(a, ad) - rhs), 2)
        })),
        ("t_cyclic_order", 0, Box::new(|| interior_max(&(power(t, lambda) - &one), 0))),
        ("number_lowering", 1, Box::new(|| interior_max(&(commutator(n, a) + a), 1))),
        ("number_raising", 1, Box::new(|| interior_max(&(commutator(n, ad) - ad), 1))),
        ("t_number_commute", 0, Box::new(|| interior_max(&commutator(n, t), 0))),
        ("t_quommute_lowering", 1, Box::new(|| interior_max(&(a * t - (t * a) * omega), 1))),
        ("t_quommute_raising", 1, Box::new(|| interior_max(&(ad * t - (t * ad) * omega_bar), 1))),
        ("number_hermitian", 0, Box::new(|| interior_max(&(adjoint(n) - n), 0))),
        ("ladder_adjoint", 1, Box::new(|| interior_max(&(adjoint(ad) - a), 1))),
        ("t_unitary", 0, Box::new(|| interior_max(&(adjoint(t) - power(t, lambda - 1)), 0))),
        ("p_commutator", 2, Box::new(|| {
            let mut rhs = one.clone();
            for (mu, p) in rep.projectors().iter().enumerate() {
                rhs += p * real::<T>(spec.alpha()[mu]);
            }
            interior_max(&(commutator(a, ad) - rhs), 2)
        })),
        ("p_number_commute", 0, Box::new(|| {
            max_over_sectors(&|mu| interior_max(&commutator(n, rep.projector(mu)), 0))
        })),
        ("p_lowering_shift", 1, Box::new(|| {
            max_over_sectors(&|mu| interior_max(&(a * rep.projector(mu) - rep.projector(mu - 1) * a), 1))
        })),
        ("p_raising_shift", 1, Box::new(|| {
            max_over_sectors(&|mu| interior_max(&(ad * rep.projector(mu) - rep.projector(mu + 1) * ad), 1))
        })),
        ("p_orthogonality", 0, Box::new(|| orthogonality(rep))),
        ("p_hermitian", 0, Box::new(|| {
            max_over_sectors(&|mu| interior_max(&(adjoint(rep.projector(mu)) - rep.projector(mu)), 0))
        })),
        ("p_completeness", 0, Box::new(|| completeness(rep))),
    ];

    ResidualReport::from_residuals(evaluate(checks), tol, rep.dim())
}

fn orthogonality<T: Real>(rep: &TruncatedFockRep<T>) -> f64 {
    let lambda = rep.lambda() as i64;
    let zero = CMatrix::<T>::zeros(rep.dim(), rep.dim());
    let mut worst = 0.0f64;
    for mu in 0..lambda {
        for nu in 0..lambda {
            let pm = rep.projector(mu);
            let expect = if mu == nu { pm } else { &zero };
            worst = worst.max(interior_max(&(pm * rep.projector(nu) - expect), 0));
        }
    }
    worst
}

fn completeness<T: Real>(rep: &TruncatedFockRep<T>) -> f64 {
    let sum = rep.projectors().iter().fold(CMatrix::<T>::zeros(rep.dim(), rep.dim()), |acc, p| acc + p);
    interior_max(&(sum - rep.identity()), 0)
}

/// Checks the projector algebra and both directions of the Fourier relation
/// between `P_μ` and the powers of `T`. All matrices involved are diagonal, so
/// no margin is applied.
pub fn verify_projector_algebra<T: Real>(rep: &TruncatedFockRep<T>, tol: f64) -> ResidualReport {
    let lambda = rep.lambda();
    let dim = rep.dim();
    let powers: Vec<CMatrix<T>> = (0..lambda).map(|nu| power(rep.t(), nu)).collect();
    let powers = &powers;
    let inv = T::from_f64(1.0 / lambda as f64);

    let checks: Vec<Check<'_>> = vec![
        ("p_orthogonality", 0, Box::new(|| orthogonality(rep))),
        ("p_completeness", 0, Box::new(|| completeness(rep))),
        ("p_from_t", 0, Box::new(move || {
            (0..lambda)
                .map(|mu| {
                    let mut p = CMatrix::<T>::zeros(dim, dim);
                    for (nu, tn) in powers.iter().enumerate() {
                        p += tn * promote::<T>(root_of_unity(-((mu * nu) as i64), lambda));
                    }
                    p *= Complex::new(inv, T::zero());
                    interior_max(&(p - &rep.projectors()[mu]), 0)
                })
                .fold(0.0, f64::max)
        })),
        ("t_from_p", 0, Box::new(move || {
            (0..lambda)
                .map(|nu| {
                    let mut tn = CMatrix::<T>::zeros(dim, dim);
                    for (mu, p) in rep.projectors().iter().enumerate() {
                        tn += p * promote::<T>(root_of_unity((mu * nu) as i64, lambda));
                    }
                    interior_max(&(tn - &powers[nu]), 0)
                })
                .fold(0.0, f64::max)
        })),
    ];

    ResidualReport::from_residuals(evaluate(checks), tol, dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraSpec;
    use crate::fock::FockRep;

    #[test]
    fn projector_margins() {
        let id = interior_projector(6, 0).unwrap();
        assert_eq!(id, DMatrix::identity(6, 6));
        let p2 = interior_projector(10, 2).unwrap();
        assert_eq!(p2.trace(), 8.0);
        for m in 0..5 {
            for k in 0..5 {
                let lhs = interior_projector(10, m).unwrap() * interior_projector(10, k).unwrap();
                assert_eq!(lhs, interior_projector(10, m.max(k)).unwrap());
            }
        }
        assert_eq!(interior_projector(4, 4).unwrap_err(), Error::MarginTooLarge { margin: 4, dim: 4 });
    }

    #[test]
    fn interior_max_agrees_with_projector_sandwich() {
        let s = AlgebraSpec::from_alpha(3, &[1.0, -0.5, -0.5]).unwrap();
        let rep = FockRep::build(&s, 9).unwrap();
        let x = commutator(rep.a(), rep.adag());
        let pi = interior_projector(9, 2).unwrap().map(|v| Complex::new(v, 0.0));
        let sandwich = &pi * &x * &pi;
        let direct = sandwich.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert_eq!(interior_max(&x, 2), direct);
    }

    #[test]
    fn undeformed_passes() {
        let s = AlgebraSpec::from_alpha(2, &[0.0, 0.0]).unwrap();
        let rep = FockRep::build(&s, 16).unwrap();
        let report = verify_defining_relations(&rep, DEFAULT_TOL);
        assert!(report.all_pass(), "{report:?}");
        assert_eq!(report.entries.len(), 17);
    }

    #[test]
    fn worked_spec_passes() {
        let s = AlgebraSpec::from_alpha(3, &[1.0, -0.5, -0.5]).unwrap();
        let rep = FockRep::build(&s, 30).unwrap();
        let report = verify_defining_relations(&rep, DEFAULT_TOL);
        assert!(report.entries.iter().all(|e| e.residual < 1e-12), "{report:?}");
    }

    #[test]
    fn artifact_is_visible_without_margin() {
        let s = AlgebraSpec::from_alpha(3, &[1.0, -0.5, -0.5]).unwrap();
        let rep = FockRep::build(&s, 10).unwrap();
        let raw = commutator(rep.a(), rep.adag());
        // top diagonal entry of [a, a†] is −F(D−1) instead of 1 + α
        assert!(interior_max(&(raw - rep.identity()), 0) > 1.0);
    }

    #[test]
    fn tampered_alpha_fails_commutator() {
        let s = AlgebraSpec::from_alpha(3, &[1.0, -0.5, -0.5]).unwrap();
        let rep = FockRep::build(&s, 12)
            .unwrap()
            .with_spec_unchecked(AlgebraSpec::from_alpha_unchecked(&[1.0, -0.5, -0.4]));
        let report = verify_defining_relations(&rep, DEFAULT_TOL);
        let entry = report.get("p_commutator").unwrap();
        assert!(!entry.pass);
        assert!((entry.residual - 0.1).abs() < 1e-12);
        assert!(!report.all_pass());
    }

    #[test]
    fn fourier_reconstruction() {
        let s = AlgebraSpec::from_alpha(4, &[0.3, -0.2, 0.5, -0.6]).unwrap();
        let rep = FockRep::build(&s, 20).unwrap();
        let report = verify_projector_algebra(&rep, DEFAULT_TOL);
        assert!(report.get("p_from_t").unwrap().residual < 1e-13);
        assert!(report.get("t_from_p").unwrap().residual < 1e-13);
        assert_eq!(report.get("p_completeness").unwrap().residual, 0.0);
    }

    #[test]
    fn klein_operator() {
        let s = AlgebraSpec::from_alpha(2, &[0.4, -0.4]).unwrap();
        let rep = FockRep::build(&s, 10).unwrap();
        let k = rep.projector(0) - rep.projector(1);
        assert!(interior_max(&(rep.t() - k), 0) < 1e-15);
    }
}
