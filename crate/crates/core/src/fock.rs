//! Truncated number-basis representation of `{1, a, a†, N, T, P_μ}`.
//!
//! The carrier space is spanned by `|n⟩ = |kλ + μ⟩`, n = 0..D−1, and the
//! generators act as
//!
//! ```text
//! N |n⟩   = n |n⟩
//! T |n⟩   = exp(i2πn/λ) |n⟩
//! P_ν |n⟩ = δ_{ν, n mod λ} |n⟩
//! a |n⟩   = sqrt(F(n)) |n−1⟩
//! a† |n⟩  = sqrt(F(n+1)) |n+1⟩
//! ```
//!
//! with all ladder matrix elements real and non-negative. Truncation only
//! affects words where `a a†` reaches the top state `|D−1⟩`: there `a a†` gives
//! 0 instead of `F(D)`.

use std::io::{self, Write};

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::algebra::{root_of_unity, AlgebraSpec, RepKind, CONSTRAINT_TOL};
use crate::error::{Error, Result};
use crate::fmt::format_float;
use crate::scalar::{DoubleF64, Real};

pub use crate::algebra::norm_coefficient;

/// Dense complex matrix over the scalar `T`.
pub type CMatrix<T> = DMatrix<Complex<T>>;

pub(crate) fn real<T: Real>(x: f64) -> Complex<T> {
    Complex::new(T::from_f64(x), T::zero())
}

pub(crate) fn promote<T: Real>(z: num_complex::Complex64) -> Complex<T> {
    Complex::new(T::from_f64(z.re), T::from_f64(z.im))
}

pub(crate) fn cmag<T: Real>(z: &Complex<T>) -> T {
    (z.re * z.re + z.im * z.im).sqrt()
}

/// Conjugate transpose.
pub fn adjoint<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    m.transpose().map(|z| z.conj())
}

/// Diagonal matrix with the given entries.
pub(crate) fn diag_matrix<T: Real>(entries: impl IntoIterator<Item = Complex<T>>) -> CMatrix<T> {
    let entries: Vec<_> = entries.into_iter().collect();
    let n = entries.len();
    let mut m = CMatrix::<T>::zeros(n, n);
    for (i, e) in entries.into_iter().enumerate() {
        m[(i, i)] = e;
    }
    m
}

#[derive(Debug, Clone)]
pub struct TruncatedFockRep<T: Real = f64> {
    spec: AlgebraSpec,
    dim: usize,
    a: CMatrix<T>,
    adag: CMatrix<T>,
    num: CMatrix<T>,
    t: CMatrix<T>,
    projectors: Vec<CMatrix<T>>,
}

/// Representation in plain double precision.
pub type FockRep = TruncatedFockRep<f64>;
/// Representation in double-double precision.
pub type FockRepDd = TruncatedFockRep<DoubleF64>;

impl<T: Real> TruncatedFockRep<T> {
    /// Builds the `dim`-state truncation of the Fock representation of `spec`.
    pub fn build(spec: &AlgebraSpec, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyTruncation);
        }
        match spec.classify() {
            Ok(class) => {
                if let RepKind::FiniteDim { dim: d } = class.kind {
                    if dim > d {
                        return Err(Error::DimensionTooLarge { dim, max: d });
                    }
                }
            }
            Err(Error::NonUnitary { index, value }) => {
                return Err(Error::NonUnitaryTruncation { index, value })
            }
            Err(e) => return Err(e),
        }

        let lambda = spec.lambda();
        let mut a = CMatrix::<T>::zeros(dim, dim);
        for n in 1..dim {
            let f = structure_value::<T>(spec, n);
            if f.to_f64() < -CONSTRAINT_TOL {
                return Err(Error::NonUnitaryTruncation { index: n, value: f.to_f64() });
            }
            let f = if f < T::zero() { T::zero() } else { f };
            a[(n - 1, n)] = Complex::new(f.sqrt(), T::zero());
        }
        let adag = adjoint(&a);
        let num = diag_matrix((0..dim).map(|n| real::<T>(n as f64)));
        let t = diag_matrix((0..dim).map(|n| promote::<T>(root_of_unity(n as i64, lambda))));
        let projectors = (0..lambda)
            .map(|mu| diag_matrix((0..dim).map(|n| real::<T>(if n % lambda == mu { 1.0 } else { 0.0 }))))
            .collect();

        Ok(Self { spec: spec.clone(), dim, a, adag, num, t, projectors })
    }

    /// Keeps the matrices but swaps in different parameters. Negative controls
    /// use this to confirm that a mismatched spec fails verification.
    pub fn with_spec_unchecked(mut self, spec: AlgebraSpec) -> Self {
        assert_eq!(spec.lambda(), self.spec.lambda(), "cyclic order must not change");
        self.spec = spec;
        self
    }

    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    pub fn lambda(&self) -> usize {
        self.spec.lambda()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a(&self) -> &CMatrix<T> {
        &self.a
    }

    pub fn adag(&self) -> &CMatrix<T> {
        &self.adag
    }

    /// Number operator `N` (real diagonal, stored as complex).
    pub fn num(&self) -> &CMatrix<T> {
        &self.num
    }

    /// Cyclic generator `T = exp(i2πN/λ)`.
    pub fn t(&self) -> &CMatrix<T> {
        &self.t
    }

    /// Projector `P_μ`, subscript taken mod λ.
    pub fn projector(&self, mu: i64) -> &CMatrix<T> {
        &self.projectors[self.spec.index(mu)]
    }

    pub fn projectors(&self) -> &[CMatrix<T>] {
        &self.projectors
    }

    pub fn identity(&self) -> CMatrix<T> {
        CMatrix::<T>::identity(self.dim, self.dim)
    }

    /// `F(N)` as a diagonal matrix.
    pub fn structure_matrix(&self) -> CMatrix<T> {
        diag_matrix((0..self.dim).map(|n| Complex::new(structure_value::<T>(&self.spec, n), T::zero())))
    }

    /// Casimir `C = F(N) − a†a` (q = 1); vanishes on the Fock representation.
    pub fn casimir(&self) -> CMatrix<T> {
        self.structure_matrix() - &self.adag * &self.a
    }

    /// Basis indices of the grading sector `F_μ = {|kλ + μ⟩}`.
    pub fn grading_sector(&self, mu: usize) -> Result<Vec<usize>> {
        let lambda = self.lambda();
        if mu >= lambda {
            return Err(Error::InvalidSector { mu, lambda });
        }
        Ok((mu..self.dim).step_by(lambda).collect())
    }

    /// Writes every operator as column-major text, one `re<delim>im` pair per
    /// line, each block preceded by a `# name rows cols` header.
    pub fn write_dump<W: Write>(&self, mut w: W, delim: char) -> io::Result<()> {
        let mut blocks: Vec<(String, &CMatrix<T>)> = vec![
            ("a".into(), &self.a),
            ("adag".into(), &self.adag),
            ("N".into(), &self.num),
            ("T".into(), &self.t),
        ];
        for (mu, p) in self.projectors.iter().enumerate() {
            blocks.push((format!("P{mu}"), p));
        }
        for (name, m) in blocks {
            writeln!(w, "# {name} {} {}", m.nrows(), m.ncols())?;
            // nalgebra storage is column-major
            for z in m.iter() {
                writeln!(w, "{}{delim}{}", format_float(z.re.to_f64()), format_float(z.im.to_f64()))?;
            }
        }
        Ok(())
    }
}

/// `F(n)` evaluated in `T`; the integer part is exact in either precision.
pub(crate) fn structure_value<T: Real>(spec: &AlgebraSpec, n: usize) -> T {
    T::from_f64(n as f64) + T::from_f64(spec.beta()[n % spec.lambda()])
}

/// Largest entry magnitude of `m` restricted to rows and columns `0..dim−margin`.
pub fn interior_max<T: Real>(m: &CMatrix<T>, margin: usize) -> f64 {
    let k = m.nrows().saturating_sub(margin).min(m.ncols().saturating_sub(margin));
    let mut worst = 0.0f64;
    for j in 0..k {
        for i in 0..k {
            let v = cmag(&m[(i, j)]).to_f64();
            if v > worst || v.is_nan() {
                worst = v;
            }
        }
    }
    worst
}
