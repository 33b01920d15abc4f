//! Bosonized (para)supersymmetric quantum mechanics.
//!
//! For order `p` the algebra has λ = p + 1. Fixing a distinguished sector μ,
//! the parasupercharge is
//!
//! ```text
//! Q = Σ_{ν=1}^{p} η_{μ+ν} a† P_{μ+ν}
//! ```
//!
//! which annihilates sector μ, and the Hamiltonian is `H₀ + ½ Σ_ν r_ν P_ν`.
//! `[H, Q] = 0` forces the chain
//!
//! ```text
//! r_{μ+ν} = 2 + α_{μ+ν} + α_{μ+ν+1} + r_{μ+ν+1},   ν = 1..p
//! ```
//!
//! and the multilinear Khare relation
//! `Σ_{k=0}^{p} Q^{p−k} Q† Q^k = 2p Q^{p−1} H` holds on every state iff
//!
//! ```text
//! Σ_{ν=0}^{p−1} |η_{μ+ν+1}|² = 2p
//! Σ_{ν=1}^{p−1} |η_{μ+ν+1}|² (ν + Σ_{ρ=0}^{ν−1} α_{μ+ρ+2}) = p (1 + α_{μ+2} + r_{μ+2})
//! ```
//!
//! The second line fixes `r_{μ+2}`; the chain then fixes the rest.
//!
//! `η` vectors are stored as `[η_{μ+1}, ..., η_{μ+p}]` and `r` vectors by
//! absolute sector, `[r_0, ..., r_p]`.

use nalgebra::DVector;
use num_complex::{Complex, Complex64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{AlgebraSpec, CONSTRAINT_TOL};
use crate::error::{Error, Result};
use crate::fock::{adjoint, diag_matrix, interior_max, promote, CMatrix, TruncatedFockRep};
use crate::sampling::{sample_alpha_slice, scan_points};
use crate::scalar::Real;
use crate::spectrum::{default_cutoff, shifted_diagonal, to_f64_vec, SpectrumReport, DEFAULT_CLUSTER_TOL};

/// Tolerance for the order-p residual checks.
pub const KHARE_TOL: f64 = 1e-10;

/// `η_{μ+ν} = √2` for ν = 1..p.
pub fn default_eta(p: usize) -> Vec<Complex64> {
    vec![Complex64::new(std::f64::consts::SQRT_2, 0.0); p]
}

fn order_of(spec: &AlgebraSpec, eta: &[Complex64]) -> Result<usize> {
    let lambda = spec.lambda();
    if eta.len() + 1 != lambda {
        return Err(Error::OrderMismatch { p: eta.len(), lambda });
    }
    Ok(eta.len())
}

fn check_sector(mu: usize, lambda: usize) -> Result<()> {
    if mu >= lambda {
        Err(Error::InvalidSector { mu, lambda })
    } else {
        Ok(())
    }
}

/// Validates that all η are nonzero and `Σ|η|² = 2p`.
pub fn check_eta(eta: &[Complex64]) -> Result<()> {
    if let Some(index) = eta.iter().position(|z| z.norm_sqr() == 0.0) {
        return Err(Error::ZeroEta { index });
    }
    let p = eta.len() as f64;
    let norm: f64 = eta.iter().map(|z| z.norm_sqr()).sum();
    if (norm - 2.0 * p).abs() > CONSTRAINT_TOL {
        return Err(Error::EtaNormViolation { norm, expected: 2.0 * p });
    }
    Ok(())
}

/// Solves for the sector shifts `r_0..r_p` given μ and η.
pub fn solve_r(spec: &AlgebraSpec, mu: usize, eta: &[Complex64]) -> Result<Vec<f64>> {
    let p = order_of(spec, eta)?;
    let lambda = spec.lambda();
    check_sector(mu, lambda)?;
    check_eta(eta)?;
    if !spec.is_bounded_from_below() {
        return Err(Error::NotBoundedFromBelow);
    }
    let m = mu as i64;
    let al = |i: i64| spec.alpha_at(i);
    let idx = |i: i64| spec.index(i);

    let lhs: f64 = (1..p)
        .map(|nu| {
            let partial: f64 = (0..nu as i64).map(|rho| al(m + rho + 2)).sum();
            eta[nu].norm_sqr() * (nu as f64 + partial)
        })
        .sum();

    let mut r = vec![0.0; lambda];
    r[idx(m + 2)] = lhs / p as f64 - 1.0 - al(m + 2);
    r[idx(m + 1)] = 2.0 + al(m + 1) + al(m + 2) + r[idx(m + 2)];
    // upward through r_{μ+3}..r_{μ+p} and closing on r_{μ+p+1} = r_μ
    for nu in 2..=p as i64 {
        r[idx(m + nu + 1)] = r[idx(m + nu)] - 2.0 - al(m + nu) - al(m + nu + 1);
    }
    Ok(r)
}

/// Largest violation of the commutation chain over ν = 1..p.
pub fn recursion_residual(spec: &AlgebraSpec, mu: usize, r: &[f64]) -> f64 {
    let p = spec.lambda() as i64 - 1;
    let m = mu as i64;
    let rr = |i: i64| r[spec.index(i)];
    (1..=p)
        .map(|nu| {
            let expect = 2.0 + spec.alpha_at(m + nu) + spec.alpha_at(m + nu + 1) + rr(m + nu + 1);
            (rr(m + nu) - expect).abs()
        })
        .fold(0.0, f64::max)
}

/// Violation of the constraint that fixes `r_{μ+2}`.
pub fn nonlinear_residual(spec: &AlgebraSpec, mu: usize, eta: &[Complex64], r: &[f64]) -> f64 {
    let p = eta.len();
    let m = mu as i64;
    let lhs: f64 = (1..p)
        .map(|nu| {
            let partial: f64 = (0..nu as i64).map(|rho| spec.alpha_at(m + rho + 2)).sum();
            eta[nu].norm_sqr() * (nu as f64 + partial)
        })
        .sum();
    let rhs = p as f64 * (1.0 + spec.alpha_at(m + 2) + r[spec.index(m + 2)]);
    (lhs - rhs).abs()
}

/// A validated parasupersymmetric configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PssqmConfig {
    pub p: usize,
    pub mu: usize,
    #[serde(serialize_with = "crate::fmt::ser_complex_vec")]
    pub eta: Vec<Complex64>,
    #[serde(serialize_with = "crate::fmt::ser_vec")]
    pub r: Vec<f64>,
}

impl PssqmConfig {
    /// Solves for `r`; `eta` defaults to [`default_eta`].
    pub fn solve(spec: &AlgebraSpec, mu: usize, eta: Option<Vec<Complex64>>) -> Result<Self> {
        let eta = eta.unwrap_or_else(|| default_eta(spec.lambda() - 1));
        let r = solve_r(spec, mu, &eta)?;
        Ok(Self { p: eta.len(), mu, eta, r })
    }

    /// Wraps user-supplied shifts after checking the commutation chain.
    pub fn new(spec: &AlgebraSpec, mu: usize, eta: Vec<Complex64>, r: Vec<f64>) -> Result<Self> {
        let p = order_of(spec, &eta)?;
        check_sector(mu, spec.lambda())?;
        check_eta(&eta)?;
        if r.len() != spec.lambda() {
            return Err(Error::LengthMismatch { what: "r", expected: spec.lambda(), found: r.len() });
        }
        let residual = recursion_residual(spec, mu, &r);
        if residual > CONSTRAINT_TOL {
            return Err(Error::RecursionViolation { residual });
        }
        Ok(Self { p, mu, eta, r })
    }
}

/// Parasupercharge `Q = Σ_{ν=1}^{p} η_{μ+ν} a† P_{μ+ν}`.
pub fn build_supercharge<T: Real>(rep: &TruncatedFockRep<T>, mu: usize, eta: &[Complex64]) -> Result<CMatrix<T>> {
    let p = order_of(rep.spec(), eta)?;
    check_sector(mu, rep.lambda())?;
    let mut q = CMatrix::<T>::zeros(rep.dim(), rep.dim());
    for nu in 1..=p {
        q += (rep.adag() * rep.projector((mu + nu) as i64)) * promote::<T>(eta[nu - 1]);
    }
    Ok(q)
}

fn powers<T: Real>(q: &CMatrix<T>, up_to: usize) -> Vec<CMatrix<T>> {
    let n = q.nrows();
    let mut out = Vec::with_capacity(up_to + 1);
    out.push(CMatrix::<T>::identity(n, n));
    for k in 1..=up_to {
        let next = &out[k - 1] * q;
        out.push(next);
    }
    out
}

fn diagonal_of<T: Real>(h: &DVector<T>) -> CMatrix<T> {
    diag_matrix(h.iter().map(|&x| Complex::new(x, T::zero())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Breaking {
    Unbroken,
    Broken { ground_multiplicity: usize },
}

impl Breaking {
    pub fn from_ground_multiplicity(m: usize) -> Self {
        if m == 1 {
            Breaking::Unbroken
        } else {
            Breaking::Broken { ground_multiplicity: m }
        }
    }

    /// Expected pattern for distinguished sector μ.
    pub fn expected_for(mu: usize) -> Self {
        Self::from_ground_multiplicity(mu + 1)
    }
}

/// Residuals of the three Khare relations on the interior (margin p + 1),
/// plus the symmetry-breaking pattern read off the Hamiltonian's clusters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PssqmReport {
    #[serde(serialize_with = "crate::fmt::ser_f64")]
    pub residual_nilpotency: f64,
    /// `min_{1 ≤ n ≤ p} max|Q^n|` on the interior; must be positive.
    #[serde(serialize_with = "crate::fmt::ser_f64")]
    pub nonvanishing_witness: f64,
    #[serde(serialize_with = "crate::fmt::ser_f64")]
    pub residual_commutator: f64,
    #[serde(serialize_with = "crate::fmt::ser_f64")]
    pub residual_multilinear: f64,
    pub breaking: Option<Breaking>,
    #[serde(serialize_with = "crate::fmt::ser_opt_f64")]
    pub ground_energy: Option<f64>,
    pub margin: usize,
    #[serde(serialize_with = "crate::fmt::ser_f64")]
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks `Q^{p+1} = 0`, `Q^n ≠ 0` (n ≤ p), `[H, Q] = 0` and the multilinear
/// relation, with `h` the diagonal of `H`.
pub fn khare_check<T: Real>(rep: &TruncatedFockRep<T>, q: &CMatrix<T>, h: &DVector<T>, tol: f64) -> PssqmReport {
    let lambda = rep.lambda();
    let p = lambda - 1;
    let margin = p + 1;
    let pw = powers(q, p + 1);
    let qd = adjoint(q);
    let hm = diagonal_of(h);

    let residual_nilpotency = interior_max(&pw[p + 1], margin);
    let nonvanishing_witness = (1..=p).map(|n| interior_max(&pw[n], margin)).fold(f64::INFINITY, f64::min);
    let residual_commutator = interior_max(&(&hm * q - q * &hm), margin);

    let mut lhs = CMatrix::<T>::zeros(rep.dim(), rep.dim());
    for k in 0..=p {
        lhs += &pw[p - k] * &qd * &pw[k];
    }
    let two_p = Complex::new(T::from_f64(2.0 * p as f64), T::zero());
    let rhs = &pw[p - 1] * &hm * two_p;
    let residual_multilinear = interior_max(&(lhs - rhs), margin);

    let diag = to_f64_vec(h);
    let spectrum = SpectrumReport::new(&diag, lambda, default_cutoff(lambda, p), DEFAULT_CLUSTER_TOL);
    let ground = spectrum.ground;

    let pass = residual_nilpotency <= tol
        && residual_commutator <= tol
        && residual_multilinear <= tol
        && nonvanishing_witness > tol;
    PssqmReport {
        residual_nilpotency,
        nonvanishing_witness,
        residual_commutator,
        residual_multilinear,
        breaking: ground.map(|g| Breaking::from_ground_multiplicity(g.multiplicity)),
        ground_energy: ground.map(|g| g.energy),
        margin,
        tolerance: tol,
        pass,
    }
}

/// Ground and excited structure of a solved configuration, compared against
/// the expected pattern: unbroken for μ = 0, otherwise a (μ+1)-fold ground
/// state, with every excited level (p+1)-fold degenerate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BreakingReport {
    pub breaking: Option<Breaking>,
    pub expected: Breaking,
    #[serde(serialize_with = "crate::fmt::ser_opt_f64")]
    pub ground_energy: Option<f64>,
    pub ground_multiplicity: Option<usize>,
    pub excited_multiplicities: Vec<usize>,
    pub excited_uniform: bool,
    pub matches_expected: bool,
}

pub fn classify_breaking(diag: &[f64], mu: usize, p: usize, cluster_tol: f64) -> BreakingReport {
    let lambda = p + 1;
    let spectrum = SpectrumReport::new(diag, lambda, default_cutoff(lambda, p), cluster_tol);
    let excited = spectrum.excited_multiplicities();
    let breaking = spectrum.ground.map(|g| Breaking::from_ground_multiplicity(g.multiplicity));
    let expected = Breaking::expected_for(mu);
    let excited_uniform = !excited.is_empty() && excited.iter().all(|&m| m == p + 1);
    BreakingReport {
        matches_expected: breaking == Some(expected) && excited_uniform,
        breaking,
        expected,
        ground_energy: spectrum.ground.map(|g| g.energy),
        ground_multiplicity: spectrum.ground.map(|g| g.multiplicity),
        excited_multiplicities: excited,
        excited_uniform,
    }
}

/// The two supersymmetric bosonizations available at λ = 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SsqmVariant {
    /// `Q = a† P_1`, `H = a†a P_0 + a a† P_1`.
    Unbroken,
    /// `Q = a† P_0`, `H = a a† P_0 + a†a P_1`.
    Broken,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SsqmReport {
    pub variant: SsqmVariant,
    #[serde(serialize_with = "crate::fmt::ser_f64")]
    pub residual_nilpotency: f64,
    #[serde(serialize_with = "crate::fmt::ser_f64")]
    pub residual_anticommutator: f64,
    #[serde(serialize_with = "crate::fmt::ser_f64")]
    pub residual_commutator: f64,
    /// Closed-form diagonal of H against the operator products defining it.
    #[serde(serialize_with = "crate::fmt::ser_f64")]
    pub residual_closed_form: f64,
    pub spectrum: SpectrumReport,
    #[serde(serialize_with = "crate::fmt::ser_f64")]
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks `Q² = 0`, `{Q†, Q} = H` and `[H, Q] = 0` on the interior (margin 2).
pub fn ssqm_check<T: Real>(rep: &TruncatedFockRep<T>, variant: SsqmVariant, tol: f64) -> Result<SsqmReport> {
    if rep.lambda() != 2 {
        return Err(Error::WrongLambda { expected: 2, found: rep.lambda() });
    }
    let spec = rep.spec();
    let (charged, neutral) = match variant {
        SsqmVariant::Unbroken => (1, 0),
        SsqmVariant::Broken => (0, 1),
    };
    let q = rep.adag() * rep.projector(charged as i64);
    let qd = adjoint(&q);

    // a†a = F(n) on the neutral sector, a a† = F(n+1) on the charged one
    let diag: Vec<f64> = (0..rep.dim())
        .map(|n| if n % 2 == neutral { spec.structure_function(n) } else { spec.structure_function(n + 1) })
        .collect();
    let h = diag_matrix(diag.iter().map(|&x| Complex::new(T::from_f64(x), T::zero())));
    let from_products = rep.adag() * rep.a() * rep.projector(neutral as i64) + rep.a() * rep.adag() * rep.projector(charged as i64);

    let margin = 2;
    let residual_nilpotency = interior_max(&(&q * &q), margin);
    let residual_anticommutator = interior_max(&(&qd * &q + &q * &qd - &h), margin);
    let residual_commutator = interior_max(&(&h * &q - &q * &h), margin);
    let residual_closed_form = interior_max(&(from_products - &h), margin);
    let spectrum = SpectrumReport::new(&diag, 2, default_cutoff(2, 1), DEFAULT_CLUSTER_TOL);

    let pass = [residual_nilpotency, residual_anticommutator, residual_commutator, residual_closed_form]
        .iter()
        .all(|&r| r <= tol);
    Ok(SsqmReport {
        variant,
        residual_nilpotency,
        residual_anticommutator,
        residual_commutator,
        residual_closed_form,
        spectrum,
        tolerance: tol,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BdReport {
    #[serde(serialize_with = "crate::fmt::ser_f64")]
    pub residual_nilpotency: f64,
    #[serde(serialize_with = "crate::fmt::ser_f64")]
    pub residual_double_commutator: f64,
    pub compatible: bool,
    #[serde(serialize_with = "crate::fmt::ser_f64")]
    pub tolerance: f64,
}

/// Order-2 Beckers–Debergh relations `Q³ = 0` and `[Q, [Q†, Q]] = 2 Q H`,
/// evaluated on the interior with margin 3.
pub fn beckers_debergh_check<T: Real>(
    rep: &TruncatedFockRep<T>,
    mu: usize,
    eta: &[Complex64],
    r: &[f64],
    tol: f64,
) -> Result<BdReport> {
    if rep.lambda() != 3 {
        return Err(Error::WrongOrder { expected: 2, found: rep.lambda() - 1 });
    }
    let q = build_supercharge(rep, mu, eta)?;
    let h = diagonal_of(&shifted_diagonal::<T>(rep.spec(), rep.dim(), r)?);
    let qd = adjoint(&q);
    let margin = 3;
    let inner = &qd * &q - &q * &qd;
    let outer = &q * &inner - &inner * &q;
    let two = Complex::new(T::from_f64(2.0), T::zero());
    let residual_nilpotency = interior_max(&(&q * &q * &q), margin);
    let residual_double_commutator = interior_max(&(outer - &q * &h * two), margin);
    Ok(BdReport {
        residual_nilpotency,
        residual_double_commutator,
        compatible: residual_nilpotency <= tol && residual_double_commutator <= tol,
        tolerance: tol,
    })
}

/// Moves `α_{μ+2}` to `value` and spreads the difference evenly over the
/// other components so that `Σα` stays zero.
pub fn alpha_with_component(base: &[f64], component: usize, value: f64) -> Vec<f64> {
    let shift = (value - base[component]) / (base.len() - 1) as f64;
    base.iter()
        .enumerate()
        .map(|(i, &a)| if i == component { value } else { a - shift })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    #[serde(serialize_with = "crate::fmt::ser_f64")]
    pub parameter: f64,
    #[serde(serialize_with = "crate::fmt::ser_vec")]
    pub alpha: Vec<f64>,
    /// NaN (serialized as null) when the point has no bounded-from-below representation.
    #[serde(serialize_with = "crate::fmt::ser_f64")]
    pub residual: f64,
    pub admissible: bool,
    pub compatible: bool,
}

/// Scans `α_{μ+2}` over `points` values in `[from, to]` and records the
/// Beckers–Debergh residual of the Khare-solved configuration at each.
/// Rows come back in parameter order.
pub fn bd_scan<T: Real>(
    base_alpha: &[f64],
    mu: usize,
    from: f64,
    to: f64,
    points: usize,
    dim: usize,
    tol: f64,
) -> Result<Vec<ScanRow>> {
    if base_alpha.len() != 3 {
        return Err(Error::WrongOrder { expected: 2, found: base_alpha.len().saturating_sub(1) });
    }
    check_sector(mu, 3)?;
    let component = (mu + 2) % 3;
    scan_points(from, to, points)
        .into_par_iter()
        .map(|t| {
            let alpha = alpha_with_component(base_alpha, component, t);
            let spec = AlgebraSpec::from_alpha(3, &alpha)?;
            if !spec.is_bounded_from_below() {
                return Ok(ScanRow { parameter: t, alpha, residual: f64::NAN, admissible: false, compatible: false });
            }
            let eta = default_eta(2);
            let r = solve_r(&spec, mu, &eta)?;
            let rep = TruncatedFockRep::<T>::build(&spec, dim)?;
            let bd = beckers_debergh_check(&rep, mu, &eta, &r, tol)?;
            Ok(ScanRow {
                parameter: t,
                alpha,
                residual: bd.residual_double_commutator,
                admissible: true,
                compatible: bd.compatible,
            })
        })
        .collect()
}

/// Ground energy of the solved configuration with default η, read from the
/// lowest complete cluster of its spectrum.
pub fn solved_ground_energy(spec: &AlgebraSpec, mu: usize) -> Result<f64> {
    let lambda = spec.lambda();
    let p = lambda - 1;
    let r = solve_r(spec, mu, &default_eta(p))?;
    let dim = default_cutoff(lambda, p) + 3 * lambda;
    let diag = to_f64_vec(&shifted_diagonal::<f64>(spec, dim, &r)?);
    let report = classify_breaking(&diag, mu, p, DEFAULT_CLUSTER_TOL);
    report.ground_energy.ok_or(Error::NotBoundedFromBelow)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundSample {
    #[serde(serialize_with = "crate::fmt::ser_vec")]
    pub alpha: Vec<f64>,
    #[serde(serialize_with = "crate::fmt::ser_f64")]
    pub ground_energy: f64,
}

/// Ground-energy signs over admissible α drawn uniformly from
/// `[lo, hi]^λ ∩ {Σα = 0}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignSampling {
    pub p: usize,
    pub mu: usize,
    #[serde(serialize_with = "crate::fmt::ser_f64")]
    pub lo: f64,
    #[serde(serialize_with = "crate::fmt::ser_f64")]
    pub hi: f64,
    pub seed: u64,
    pub samples: Vec<GroundSample>,
    pub positive: usize,
    pub negative: usize,
    /// A zero-energy point on the segment between the first positive and the
    /// first negative sample. The ground energy is affine in α and the
    /// admissible region is convex, so the interpolated point is admissible.
    pub zero: Option<GroundSample>,
}

impl SignSampling {
    pub fn all_positive(&self) -> bool {
        self.positive == self.samples.len()
    }
}

pub fn sample_ground_energies(p: usize, mu: usize, lo: f64, hi: f64, samples: usize, seed: u64) -> Result<SignSampling> {
    let lambda = p + 1;
    check_sector(mu, lambda)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws = (0..samples)
        .map(|_| sample_alpha_slice(&mut rng, lambda, lo, hi))
        .collect::<Result<Vec<_>>>()?;
    let samples: Vec<GroundSample> = draws
        .into_par_iter()
        .map(|alpha| {
            let spec = AlgebraSpec::from_alpha(lambda, &alpha)?;
            Ok(GroundSample { ground_energy: solved_ground_energy(&spec, mu)?, alpha })
        })
        .collect::<Result<_>>()?;

    let positive = samples.iter().filter(|s| s.ground_energy > 0.0).count();
    let negative = samples.iter().filter(|s| s.ground_energy < 0.0).count();
    let pos = samples.iter().find(|s| s.ground_energy > 0.0);
    let neg = samples.iter().find(|s| s.ground_energy < 0.0);
    let zero = match (pos, neg) {
        (Some(a), Some(b)) => {
            let t = a.ground_energy / (a.ground_energy - b.ground_energy);
            let alpha: Vec<f64> = a.alpha.iter().zip(&b.alpha).map(|(x, y)| x + t * (y - x)).collect();
            let spec = AlgebraSpec::from_alpha(lambda, &alpha)?;
            Some(GroundSample { ground_energy: solved_ground_energy(&spec, mu)?, alpha })
        }
        _ => None,
    };
    Ok(SignSampling { p, mu, lo, hi, seed, samples, positive, negative, zero })
}
