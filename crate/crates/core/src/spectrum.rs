//! Bosonic Hamiltonian `H₀ = ½{a†, a}`, its sector-shifted variants and
//! degeneracy clustering.
//!
//! Diagonals come from the closed form `E_n = n + 1/2 + γ_{n mod λ}` rather
//! than from the truncated product `a a†`, which is wrong on the top state.

use std::io::{self, Write};

use nalgebra::DVector;
use serde::Serialize;

use crate::algebra::AlgebraSpec;
use crate::error::{Error, Result};
use crate::fmt::format_float;
use crate::fock::TruncatedFockRep;
use crate::scalar::Real;

pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

/// Number of top states excluded from cluster statistics for order `p`.
pub fn default_cutoff(lambda: usize, p: usize) -> usize {
    lambda * (p + 1)
}

/// Diagonal of `H₀` in the number basis.
pub fn hamiltonian_h0<T: Real>(rep: &TruncatedFockRep<T>) -> DVector<T> {
    h0_diagonal(rep.spec(), rep.dim())
}

/// Diagonal of `H₀ + ½ Σ_ν r_ν P_ν`.
pub fn shifted_hamiltonian<T: Real>(rep: &TruncatedFockRep<T>, r: &[f64]) -> Result<DVector<T>> {
    shifted_diagonal(rep.spec(), rep.dim(), r)
}

/// First `dim` energies `E_n`, without building any matrices.
pub fn h0_diagonal<T: Real>(spec: &AlgebraSpec, dim: usize) -> DVector<T> {
    let half = T::from_f64(0.5);
    DVector::from_iterator(
        dim,
        (0..dim).map(|n| {
            let e = T::from_f64(n as f64) + half + T::from_f64(spec.gamma()[n % spec.lambda()]);
            debug_assert!({
                let f = 0.5 * (spec.structure_function(n) + spec.structure_function(n + 1));
                (e.to_f64() - f).abs() <= 1e-12 * (1.0 + n as f64)
            });
            e
        }),
    )
}

pub fn shifted_diagonal<T: Real>(spec: &AlgebraSpec, dim: usize, r: &[f64]) -> Result<DVector<T>> {
    let lambda = spec.lambda();
    if r.len() != lambda {
        return Err(Error::LengthMismatch { what: "r", expected: lambda, found: r.len() });
    }
    let mut h = h0_diagonal::<T>(spec, dim);
    for (n, e) in h.iter_mut().enumerate() {
        *e += T::from_f64(0.5 * r[n % lambda]);
    }
    Ok(h)
}

pub fn to_f64_vec<T: Real>(v: &DVector<T>) -> Vec<f64> {
    v.iter().map(|x| x.to_f64()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    #[serde(serialize_with = "crate::fmt::ser_f64")]
    pub energy: f64,
    pub multiplicity: usize,
    pub members: Vec<usize>,
}

/// Single-linkage clustering: sorted values are split wherever consecutive
/// entries differ by more than `cluster_tol`. Cluster energy is the member mean.
pub fn degeneracy_profile(diag: &[f64], cluster_tol: f64) -> Vec<Cluster> {
    let mut order: Vec<usize> = (0..diag.len()).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]).then(i.cmp(&j)));

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (k, &i) in order.iter().enumerate() {
        let split = k == 0 || diag[i] - diag[order[k - 1]] > cluster_tol;
        if split {
            clusters.push(vec![i]);
        } else {
            clusters.last_mut().unwrap().push(i);
        }
    }
    clusters
        .into_iter()
        .map(|mut members| {
            members.sort_unstable();
            let energy = members.iter().map(|&i| diag[i]).sum::<f64>() / members.len() as f64;
            Cluster { energy, multiplicity: members.len(), members }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Level {
    pub n: usize,
    #[serde(serialize_with = "crate::fmt::ser_f64")]
    pub energy: f64,
    pub sector: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ground {
    #[serde(serialize_with = "crate::fmt::ser_f64")]
    pub energy: f64,
    pub multiplicity: usize,
}

/// Levels of a diagonal Hamiltonian plus the clusters that are complete.
///
/// Clusters with any member among the top `cutoff` states may have lost
/// partners to the truncation; they are dropped from `clusters` and counted
/// in `excluded_clusters`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub levels: Vec<Level>,
    pub clusters: Vec<Cluster>,
    pub ground: Option<Ground>,
    pub cutoff: usize,
    pub excluded_clusters: usize,
    #[serde(serialize_with = "crate::fmt::ser_f64")]
    pub cluster_tol: f64,
}

impl SpectrumReport {
    pub fn new(diag: &[f64], lambda: usize, cutoff: usize, cluster_tol: f64) -> Self {
        let levels = diag
            .iter()
            .enumerate()
            .map(|(n, &energy)| Level { n, energy, sector: n % lambda })
            .collect();
        let limit = diag.len().saturating_sub(cutoff);
        let all = degeneracy_profile(diag, cluster_tol);
        let total = all.len();
        let clusters: Vec<Cluster> = all.into_iter().filter(|c| c.members.iter().all(|&i| i < limit)).collect();
        let ground = clusters.first().map(|c| Ground { energy: c.energy, multiplicity: c.multiplicity });
        Self { levels, excluded_clusters: total - clusters.len(), clusters, ground, cutoff, cluster_tol }
    }

    /// Multiplicities of the retained clusters above the ground cluster.
    pub fn excited_multiplicities(&self) -> Vec<usize> {
        self.clusters.iter().skip(1).map(|c| c.multiplicity).collect()
    }

    /// Writes `n,energy,sector` rows with the given delimiter.
    pub fn write_levels<W: Write>(&self, mut w: W, delim: char) -> io::Result<()> {
        writeln!(w, "n{delim}energy{delim}sector")?;
        for l in &self.levels {
            writeln!(w, "{}{delim}{}{delim}{}", l.n, format_float(l.energy), l.sector)?;
        }
        Ok(())
    }
}
