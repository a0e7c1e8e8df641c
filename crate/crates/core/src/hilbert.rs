//! Operators and states on (3-level emitter) ⊗ (truncated Fock space).
//!
//! Composite basis ordering is emitter-major:
//! `index = level_index * (n_max + 1) + photon_number`, with levels ordered
//! `g, 1, 2`. Every CSV/state dump in this crate follows that convention.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const EMITTER_LEVELS: usize = 3;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Dimensions of the truncated composite space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HilbertDims {
    n_max: usize,
}

impl HilbertDims {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidDimension(format!(
                "photon cutoff n_max must be >= 1, got {n_max}"
            )));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Number of Fock states kept, `n_max + 1`.
    pub fn cavity(&self) -> usize {
        self.n_max + 1
    }

    pub fn total(&self) -> usize {
        EMITTER_LEVELS * self.cavity()
    }

    pub fn index(&self, level: Level, photons: usize) -> usize {
        debug_assert!(photons <= self.n_max);
        level.index() * self.cavity() + photons
    }
}

/// Emitter level of the cascade `g -> 1 -> 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    G,
    One,
    Two,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::G, Level::One, Level::Two];

    pub fn index(self) -> usize {
        match self {
            Level::G => 0,
            Level::One => 1,
            Level::Two => 2,
        }
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "g" | "G" | "0" => Ok(Level::G),
            "1" => Ok(Level::One),
            "2" => Ok(Level::Two),
            other => Err(Error::InvalidLevel(other.to_string())),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::G => write!(f, "g"),
            Level::One => write!(f, "1"),
            Level::Two => write!(f, "2"),
        }
    }
}

/// The space an operator or state lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    Emitter,
    /// Cavity Fock space with the given cutoff `n_max`.
    Cavity(usize),
    Composite(HilbertDims),
}

impl Space {
    pub fn dim(&self) -> usize {
        match self {
            Space::Emitter => EMITTER_LEVELS,
            Space::Cavity(n_max) => n_max + 1,
            Space::Composite(dims) => dims.total(),
        }
    }
}

/// Dense complex operator tagged with the space it acts on.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: Space,
    matrix: CMatrix,
}

impl Operator {
    pub fn from_matrix(space: Space, matrix: CMatrix) -> Result<Self> {
        let n = space.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { space, matrix })
    }

    pub fn zeros(space: Space) -> Self {
        let n = space.dim();
        Self {
            space,
            matrix: CMatrix::zeros(n, n),
        }
    }

    pub fn identity(space: Space) -> Self {
        let n = space.dim();
        Self {
            space,
            matrix: CMatrix::identity(n, n),
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dag(&self) -> Self {
        Self {
            space: self.space,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            space: self.space,
            matrix: &self.matrix * C64::new(factor, 0.0),
        }
    }

    pub fn scale_complex(&self, factor: C64) -> Self {
        Self {
            space: self.space,
            matrix: &self.matrix * factor,
        }
    }

    fn check_same(&self, other: &Operator) -> Result<()> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            space: self.space,
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &Operator) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            space: self.space,
            matrix: &self.matrix - &other.matrix,
        })
    }

    pub fn mul(&self, other: &Operator) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            space: self.space,
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn commutator(&self, other: &Operator) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Elementwise max |O - O†|.
    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.matrix)
    }

    /// Elementwise max |O|.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Cavity annihilation operator `a` on `n_max + 1` Fock states.
pub fn annihilation_operator(n_max: usize) -> Result<Operator> {
    if n_max < 1 {
        return Err(Error::InvalidDimension(format!(
            "photon cutoff n_max must be >= 1, got {n_max}"
        )));
    }
    let mut m = CMatrix::zeros(n_max + 1, n_max + 1);
    for n in 0..n_max {
        m[(n, n + 1)] = C64::new(((n + 1) as f64).sqrt(), 0.0);
    }
    Ok(Operator {
        space: Space::Cavity(n_max),
        matrix: m,
    })
}

/// Emitter operator `|alpha><beta|` (basis order g, 1, 2).
pub fn emitter_transition(alpha: Level, beta: Level) -> Operator {
    let mut m = CMatrix::zeros(EMITTER_LEVELS, EMITTER_LEVELS);
    m[(alpha.index(), beta.index())] = ONE;
    Operator {
        space: Space::Emitter,
        matrix: m,
    }
}

/// Kronecker product `emitter ⊗ cavity`; `None` stands for the identity on
/// that factor.
pub fn tensor_embed(
    emitter_op: Option<&Operator>,
    cavity_op: Option<&Operator>,
    dims: HilbertDims,
) -> Result<Operator> {
    let emitter = match emitter_op {
        Some(op) => {
            if op.space != Space::Emitter {
                return Err(Error::DimensionMismatch {
                    expected: EMITTER_LEVELS,
                    got: op.dim(),
                });
            }
            op.matrix.clone()
        }
        None => CMatrix::identity(EMITTER_LEVELS, EMITTER_LEVELS),
    };
    let cavity = match cavity_op {
        Some(op) => {
            if op.space != Space::Cavity(dims.n_max()) {
                return Err(Error::DimensionMismatch {
                    expected: dims.cavity(),
                    got: op.dim(),
                });
            }
            op.matrix.clone()
        }
        None => CMatrix::identity(dims.cavity(), dims.cavity()),
    };
    Ok(Operator {
        space: Space::Composite(dims),
        matrix: emitter.kronecker(&cavity),
    })
}

/// `a ⊗`-embedded helpers used throughout the model.
pub fn cavity_annihilation(dims: HilbertDims) -> Operator {
    let a = annihilation_operator(dims.n_max()).expect("dims guarantee n_max >= 1");
    tensor_embed(None, Some(&a), dims).expect("matching dims")
}

pub fn number_operator(dims: HilbertDims) -> Operator {
    let a = cavity_annihilation(dims);
    a.dag().mul(&a).expect("same space")
}

pub fn emitter_embedded(alpha: Level, beta: Level, dims: HilbertDims) -> Operator {
    tensor_embed(Some(&emitter_transition(alpha, beta)), None, dims).expect("matching dims")
}

/// Validity report for a density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateCheck {
    pub hermiticity_error: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl StateCheck {
    pub const HERMITICITY_TOL: f64 = 1e-10;
    pub const TRACE_TOL: f64 = 1e-8;
    pub const EIGEN_TOL: f64 = 1e-8;

    pub fn is_valid(&self) -> bool {
        self.hermiticity_error <= Self::HERMITICITY_TOL
            && self.trace_error <= Self::TRACE_TOL
            && self.min_eigenvalue >= -Self::EIGEN_TOL
    }
}

/// Density operator of the emitter-cavity system (or of one factor).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    space: Space,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Builds and validates a density matrix.
    pub fn from_matrix(space: Space, matrix: CMatrix) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(space, matrix)?;
        let check = rho.check();
        if !check.is_valid() {
            return Err(Error::param(
                "density matrix",
                format!(
                    "not a valid state (hermiticity {:.3e}, trace error {:.3e}, min eigenvalue {:.3e})",
                    check.hermiticity_error, check.trace_error, check.min_eigenvalue
                ),
            ));
        }
        Ok(rho)
    }

    /// Shape check only; used for intermediate integrator states.
    pub fn from_matrix_unchecked(space: Space, matrix: CMatrix) -> Result<Self> {
        let n = space.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { space, matrix })
    }

    pub fn from_ket(ket: &KetState) -> Self {
        let v = ket.amplitudes();
        Self {
            space: ket.space(),
            matrix: v * v.adjoint(),
        }
    }

    /// `|photons, level><photons, level|`.
    pub fn basis(dims: HilbertDims, photons: usize, level: Level) -> Result<Self> {
        Ok(Self::from_ket(&KetState::basis(dims, photons, level)?))
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dims(&self) -> Option<HilbertDims> {
        match self.space {
            Space::Composite(d) => Some(d),
            _ => None,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ_ij ρ_ij ρ_ji = Σ_ij |ρ_ij|² for Hermitian ρ.
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_hermitian_eigenvalue(&self.matrix)
    }

    pub fn check(&self) -> StateCheck {
        StateCheck {
            hermiticity_error: hermiticity_error(&self.matrix),
            trace_error: (self.trace() - ONE).norm(),
            min_eigenvalue: self.min_eigenvalue(),
        }
    }
}

/// Pure state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct KetState {
    space: Space,
    amplitudes: CVector,
}

impl KetState {
    pub fn from_amplitudes(space: Space, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: amplitudes.len(),
            });
        }
        Ok(Self { space, amplitudes })
    }

    pub fn basis(dims: HilbertDims, photons: usize, level: Level) -> Result<Self> {
        if photons > dims.n_max() {
            return Err(Error::InvalidDimension(format!(
                "photon number {photons} exceeds cutoff {}",
                dims.n_max()
            )));
        }
        let mut v = CVector::zeros(dims.total());
        v[dims.index(level, photons)] = ONE;
        Ok(Self {
            space: Space::Composite(dims),
            amplitudes: v,
        })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::param("ket", "cannot normalize a zero vector"));
        }
        Ok(Self {
            space: self.space,
            amplitudes: &self.amplitudes / C64::new(n, 0.0),
        })
    }

    /// `<psi|O|psi>`.
    pub fn expectation(&self, op: &Operator) -> Result<C64> {
        if op.space() != self.space {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                got: op.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&(op.matrix() * &self.amplitudes)))
    }
}

/// `Tr(ρ O)`.
pub fn expectation(rho: &DensityMatrix, op: &Operator) -> Result<C64> {
    if rho.space() != op.space() {
        return Err(Error::DimensionMismatch {
            expected: rho.space().dim(),
            got: op.dim(),
        });
    }
    Ok(trace_product(rho.matrix(), op.matrix()))
}

/// `Tr(A B)` without forming the product.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Reduced cavity state `Tr_emitter ρ`.
pub fn partial_trace_emitter(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let dims = rho.dims().ok_or_else(|| {
        Error::param("density matrix", "partial trace needs a composite state")
    })?;
    let nc = dims.cavity();
    let mut out = CMatrix::zeros(nc, nc);
    for e in 0..EMITTER_LEVELS {
        let block = rho.matrix().view((e * nc, e * nc), (nc, nc));
        out += block;
    }
    DensityMatrix::from_matrix_unchecked(Space::Cavity(dims.n_max()), out)
}

pub(crate) fn hermiticity_error(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub(crate) fn min_hermitian_eigenvalue(m: &CMatrix) -> f64 {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    h.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// All eigenvalues of the Hermitian part of `m`.
pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().collect()
}
