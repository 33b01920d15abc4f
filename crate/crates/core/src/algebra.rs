//! Parameters of a C_λ-extended oscillator algebra and the closed-form scalar
//! quantities derived from them.
//!
//! The algebra is fixed either by the λ−1 complex couplings `κ_1..κ_{λ−1}` of
//! the cyclic-generator form `[a, a†] = 1 + Σ κ_μ T^μ`, or equivalently by the
//! λ real couplings `α_0..α_{λ−1}` of the projector form
//! `[a, a†] = 1 + Σ α_μ P_μ`. The two are related by a discrete Fourier
//! transform over λ-th roots of unity:
//!
//! ```text
//! α_μ = Σ_{ν=1}^{λ−1} exp(i2πμν/λ) κ_ν
//! κ_ν = (1/λ) Σ_{μ=0}^{λ−1} exp(−i2πμν/λ) α_μ
//! ```
//!
//! All parameter subscripts are taken mod λ.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance for every parameter constraint check.
pub const CONSTRAINT_TOL: f64 = 1e-12;

/// `exp(i2πk/λ)` with the exponent reduced mod λ before evaluation.
pub fn root_of_unity(k: i64, lambda: usize) -> Complex64 {
    let l = lambda as i64;
    let k = k.rem_euclid(l);
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let theta = std::f64::consts::TAU * (k as f64) / (lambda as f64);
    Complex64::new(theta.cos(), theta.sin())
}

/// One C_λ-extended oscillator algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraSpec {
    lambda: usize,
    kappa: Vec<Complex64>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    gamma: Vec<f64>,
}

impl AlgebraSpec {
    /// Builds the algebra from the couplings `κ_1..κ_{λ−1}`.
    pub fn from_kappa(lambda: usize, kappa: &[Complex64]) -> Result<Self> {
        check_lambda(lambda)?;
        if kappa.len() != lambda - 1 {
            return Err(Error::LengthMismatch {
                what: "kappa",
                expected: lambda - 1,
                found: kappa.len(),
            });
        }
        // kappa[mu - 1] holds κ_μ
        for mu in 1..lambda {
            let partner = lambda - mu;
            let deviation = (kappa[mu - 1].conj() - kappa[partner - 1]).norm();
            if deviation > CONSTRAINT_TOL {
                return Err(Error::ConjugationViolation { index: mu, partner, deviation });
            }
        }
        let alpha: Vec<f64> = (0..lambda)
            .map(|mu| {
                (1..lambda)
                    .map(|nu| root_of_unity((mu * nu) as i64, lambda) * kappa[nu - 1])
                    .sum::<Complex64>()
                    .re
            })
            .collect();
        check_sum(&alpha)?;
        Ok(Self::assemble(lambda, kappa.to_vec(), alpha))
    }

    /// Builds the algebra from the projector couplings `α_0..α_{λ−1}`.
    pub fn from_alpha(lambda: usize, alpha: &[f64]) -> Result<Self> {
        check_lambda(lambda)?;
        if alpha.len() != lambda {
            return Err(Error::LengthMismatch {
                what: "alpha",
                expected: lambda,
                found: alpha.len(),
            });
        }
        check_sum(alpha)?;
        Ok(Self::from_alpha_unchecked(alpha))
    }

    /// Like [`from_alpha`](Self::from_alpha) but skips the zero-sum check.
    ///
    /// Only meant for negative controls: a representation built from a valid
    /// spec and then paired with a perturbed one must fail verification.
    pub fn from_alpha_unchecked(alpha: &[f64]) -> Self {
        let lambda = alpha.len();
        let scale = 1.0 / lambda as f64;
        let kappa = (1..lambda)
            .map(|nu| {
                scale
                    * alpha
                        .iter()
                        .enumerate()
                        .map(|(mu, &a)| root_of_unity(-((mu * nu) as i64), lambda) * a)
                        .sum::<Complex64>()
            })
            .collect();
        Self::assemble(lambda, kappa, alpha.to_vec())
    }

    fn assemble(lambda: usize, kappa: Vec<Complex64>, alpha: Vec<f64>) -> Self {
        let mut beta = Vec::with_capacity(lambda);
        let mut acc = 0.0;
        for &a in &alpha {
            beta.push(acc);
            acc += a;
        }
        let gamma = beta.iter().zip(&alpha).map(|(b, a)| b + a / 2.0).collect();
        Self { lambda, kappa, alpha, beta, gamma }
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    /// `κ_1..κ_{λ−1}`; entry `i` is `κ_{i+1}`.
    pub fn kappa(&self) -> &[Complex64] {
        &self.kappa
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Partial sums `β_μ = Σ_{ν<μ} α_ν`.
    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// `γ_μ = β_μ + α_μ/2`.
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// Reduces any integer subscript mod λ.
    #[inline]
    pub fn index(&self, i: i64) -> usize {
        i.rem_euclid(self.lambda as i64) as usize
    }

    /// `α_i` with the subscript taken mod λ.
    #[inline]
    pub fn alpha_at(&self, i: i64) -> f64 {
        self.alpha[self.index(i)]
    }

    /// κ_μ for μ in 1..λ, with κ_0 = 0 by convention.
    pub fn kappa_at(&self, mu: i64) -> Complex64 {
        match self.index(mu) {
            0 => Complex64::new(0.0, 0.0),
            k => self.kappa[k - 1],
        }
    }

    /// Structure function `F(n) = n + β_{n mod λ}`, so that `a†a = F(N)`.
    #[inline]
    pub fn structure_function(&self, n: usize) -> f64 {
        n as f64 + self.beta[n % self.lambda]
    }

    /// Eigenvalue `E_n = n + 1/2 + γ_{n mod λ}` of `H₀ = ½{a†, a}`.
    #[inline]
    pub fn energy_level(&self, n: usize) -> f64 {
        n as f64 + 0.5 + self.gamma[n % self.lambda]
    }

    /// Decides which kind of unitary Fock representation the parameters admit.
    pub fn classify(&self) -> Result<RepClass> {
        let witnesses: Vec<f64> = (1..self.lambda).map(|mu| self.structure_function(mu)).collect();
        for (i, &f) in witnesses.iter().enumerate() {
            let mu = i + 1;
            if f.abs() <= CONSTRAINT_TOL {
                return Ok(RepClass { kind: RepKind::FiniteDim { dim: mu }, witnesses });
            }
            if f < 0.0 {
                return Err(Error::NonUnitary { index: mu, value: f });
            }
        }
        Ok(RepClass { kind: RepKind::BoundedFromBelow, witnesses })
    }

    pub fn is_bounded_from_below(&self) -> bool {
        matches!(self.classify(), Ok(RepClass { kind: RepKind::BoundedFromBelow, .. }))
    }
}

fn check_lambda(lambda: usize) -> Result<()> {
    if lambda < 2 {
        Err(Error::InvalidLambda(lambda))
    } else {
        Ok(())
    }
}

fn check_sum(alpha: &[f64]) -> Result<()> {
    let sum: f64 = alpha.iter().sum();
    if sum.abs() > CONSTRAINT_TOL {
        Err(Error::SumNotZero { sum })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RepKind {
    /// Unitary irreducible representation of dimension `dim < λ`.
    FiniteDim { dim: usize },
    /// Infinite-dimensional representation bounded from below.
    BoundedFromBelow,
}

/// Outcome of [`AlgebraSpec::classify`] with the values `F(1)..F(λ−1)` it was decided on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepClass {
    #[serde(flatten)]
    pub kind: RepKind,
    #[serde(serialize_with = "crate::fmt::ser_vec")]
    pub witnesses: Vec<f64>,
}

/// Normalization `N_n = Π_{m=1}^{n} F(m)` of `(a†)^n |0⟩`.
pub fn norm_coefficient(spec: &AlgebraSpec, n: usize) -> f64 {
    (1..=n).map(|m| spec.structure_function(m)).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kappa_to_alpha_lambda2() {
        let s = AlgebraSpec::from_kappa(2, &[c(0.5, 0.0)]).unwrap();
        assert_abs_diff_eq!(s.alpha()[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.alpha()[1], -0.5, epsilon = 1e-15);
    }

    #[test]
    fn kappa_to_alpha_lambda3_complex() {
        // direct oracle: for λ=3 with κ_2 = κ_1*, α_μ = 2 Re(ω^μ κ_1)
        let k1 = c(0.25, 0.25);
        let expect: Vec<f64> = (0..3)
            .map(|mu| {
                let th = 2.0 * std::f64::consts::PI * mu as f64 / 3.0;
                2.0 * (th.cos() * k1.re - th.sin() * k1.im)
            })
            .collect();
        let s = AlgebraSpec::from_kappa(3, &[k1, k1.conj()]).unwrap();
        for (got, want) in s.alpha().iter().zip(&expect) {
            assert_abs_diff_eq!(got, want, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(s.alpha()[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.alpha()[1], -0.6830127018922193, epsilon = 1e-12);
        assert_abs_diff_eq!(s.alpha()[2], 0.1830127018922193, epsilon = 1e-12);
        assert!(s.alpha().iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn zero_kappa() {
        let s = AlgebraSpec::from_kappa(3, &[c(0.0, 0.0); 2]).unwrap();
        assert_eq!(s.alpha(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_kappa() {
        assert!(matches!(
            AlgebraSpec::from_kappa(3, &[c(0.25, 0.25), c(0.25, 0.25)]),
            Err(Error::ConjugationViolation { .. })
        ));
        assert!(matches!(
            AlgebraSpec::from_kappa(3, &[c(0.25, 0.0)]),
            Err(Error::LengthMismatch { expected: 2, found: 1, .. })
        ));
        assert_eq!(AlgebraSpec::from_kappa(1, &[]), Err(Error::InvalidLambda(1)));
    }

    #[test]
    fn alpha_to_kappa() {
        let s = AlgebraSpec::from_alpha(2, &[1.0, -1.0]).unwrap();
        assert_abs_diff_eq!(s.kappa()[0].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.kappa()[0].im, 0.0, epsilon = 1e-15);

        let z = AlgebraSpec::from_alpha(5, &[0.0; 5]).unwrap();
        assert!(z.kappa().iter().all(|k| k.norm() == 0.0));

        assert!(matches!(
            AlgebraSpec::from_alpha(3, &[1.0, -0.5, -0.4]),
            Err(Error::SumNotZero { .. })
        ));
    }

    #[test]
    fn structure_function_examples() {
        let s = AlgebraSpec::from_alpha(3, &[1.0, -0.5, -0.5]).unwrap();
        assert_eq!(s.beta(), &[0.0, 1.0, 0.5]);
        assert_eq!(s.structure_function(0), 0.0);
        assert_eq!(s.structure_function(1), 2.0);
        assert_eq!(s.structure_function(2), 2.5);
        assert_eq!(s.structure_function(3), 3.0);

        let f = AlgebraSpec::from_alpha(2, &[-1.0, 1.0]).unwrap();
        assert_eq!(f.structure_function(1), 0.0);
    }

    #[test]
    fn classification() {
        let bfb = AlgebraSpec::from_alpha(3, &[1.0, -0.5, -0.5]).unwrap();
        let class = bfb.classify().unwrap();
        assert_eq!(class.kind, RepKind::BoundedFromBelow);
        assert_eq!(class.witnesses, vec![2.0, 2.5]);

        let fin = AlgebraSpec::from_alpha(2, &[-1.0, 1.0]).unwrap();
        assert_eq!(fin.classify().unwrap().kind, RepKind::FiniteDim { dim: 1 });

        let free = AlgebraSpec::from_alpha(2, &[0.0, 0.0]).unwrap();
        assert_eq!(free.classify().unwrap().kind, RepKind::BoundedFromBelow);

        // F(1) = 0.5 > 0, F(2) = 2 + β_2 = 2 - 3 < 0 without an earlier zero
        let bad = AlgebraSpec::from_alpha(3, &[-0.5, -2.5, 3.0]).unwrap();
        assert!(matches!(bad.classify(), Err(Error::NonUnitary { index: 2, .. })));

        // λ=3 finite representation of dimension 2: F(1) > 0, F(2) = 0
        let d2 = AlgebraSpec::from_alpha(3, &[0.0, -2.0, 2.0]).unwrap();
        assert_eq!(d2.classify().unwrap().kind, RepKind::FiniteDim { dim: 2 });
    }

    #[test]
    fn energy_examples() {
        let s = AlgebraSpec::from_alpha(3, &[1.0, -0.5, -0.5]).unwrap();
        assert_eq!(s.gamma(), &[0.5, 0.75, 0.25]);
        let e: Vec<f64> = (0..4).map(|n| s.energy_level(n)).collect();
        assert_eq!(e, vec![1.0, 2.25, 2.75, 4.0]);

        let free = AlgebraSpec::from_alpha(4, &[0.0; 4]).unwrap();
        for n in 0..10 {
            assert_eq!(free.energy_level(n), n as f64 + 0.5);
        }

        let nu = 0.3;
        let cv = AlgebraSpec::from_alpha(2, &[nu, -nu]).unwrap();
        for n in 0..10 {
            assert_abs_diff_eq!(cv.energy_level(n), n as f64 + 0.5 + nu / 2.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn norm_coefficients() {
        let s = AlgebraSpec::from_alpha(3, &[1.0, -0.5, -0.5]).unwrap();
        assert_eq!(norm_coefficient(&s, 0), 1.0);
        assert_eq!(norm_coefficient(&s, 3), 15.0);
        let free = AlgebraSpec::from_alpha(2, &[0.0, 0.0]).unwrap();
        assert_eq!(norm_coefficient(&free, 5), 120.0);
    }

    #[test]
    fn subscripts_wrap() {
        let s = AlgebraSpec::from_alpha(3, &[1.0, -0.5, -0.5]).unwrap();
        assert_eq!(s.alpha_at(-1), -0.5);
        assert_eq!(s.alpha_at(3), 1.0);
        assert_eq!(s.kappa_at(0), Complex64::new(0.0, 0.0));
        assert_eq!(s.kappa_at(4), s.kappa()[0]);
    }
}
