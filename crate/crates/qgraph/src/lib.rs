//! Laplace operators on metric graphs.
//!
//! A metric graph is a combinatorial graph whose internal edges carry finite
//! lengths and whose external edges are half-lines. A self-adjoint Laplacian
//! on such a graph is fixed by a pair of square matrices `(A, B)` imposing
//! `A ψ + B ψ' = 0` on the vector of edge-endpoint traces. This crate
//! provides:
//!
//! - validated graph and boundary-condition data ([`graph`], [`boundary`]),
//!   including the Kuchment canonical form `(P_ker B, L)`, vertex scattering
//!   matrices `S(k) = -(A + ikB)^{-1}(A - ikB)` and inertia indices of `AB†`;
//! - spectral solvers ([`spectral`]): positive eigenvalues through singular
//!   value scans of the secular matrix `Z(k) = AX + ikBY`, negative
//!   eigenvalues through `det(A - κB) = 0` and `I - S(iκ)T(iκ)`, zero modes,
//!   and two certificates (the negative-eigenvalue count bound `n₊` and the
//!   spectral lower bound `-s(‖L₊‖)²`);
//! - Green's functions ([`green`]) in two closed forms with symmetry and
//!   entrywise-positivity diagnostics;
//! - walk expansions ([`walks`]): enumeration of walks between edges, weights
//!   from local scattering blocks, and the resulting series representation of
//!   Green's matrix entries with a computable tail bound;
//! - closed-form heat kernels on star graphs ([`heat`]), including the
//!   Robin family built from the complementary error function, plus
//!   quadrature application of the semigroup;
//! - an independent finite-element oracle ([`fem`]) discretizing the
//!   quadratic form `Σ∫|ψ'|² - ⟨ψ, Lψ⟩` for cross-checking eigenvalues and
//!   heat evolution;
//! - a batch front end ([`cli`]) reading graph+bc JSON and writing JSON/CSV
//!   reports, including a `verify` mode that machine-checks the bound and
//!   positivity statements on a given input.
//!
//! Runnable demonstrations for each capability live in `examples/`.

use std::path::PathBuf;

use thiserror::Error;

pub mod boundary;
pub mod cli;
pub mod fem;
pub mod graph;
pub mod green;
pub mod heat;
pub(crate) mod linalg;
pub mod report;
pub mod spectral;
pub mod walks;

pub use boundary::{BcSpec, BoundaryConditions, CanonicalForm, Inertia, PositivityClass};
pub use linalg::{C64, CMat, CVec};
pub use graph::{EndpointIndex, GraphSpec, MetricGraph, Slot};


/// Errors produced by graph validation, boundary-condition checks and the
/// numerical guards of the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("edge `{edge}` references unknown vertex `{vertex}`")]
    DanglingEndpoint { edge: String, vertex: String },
    #[error("internal edge `{edge}` has nonpositive length {length}")]
    NonpositiveLength { edge: String, length: f64 },
    #[error("graph is not connected")]
    Disconnected,
    #[error("vertex `{0}` is isolated (degree 0)")]
    IsolatedVertex(String),
    #[error("unknown edge id `{0}`")]
    UnknownEdge(String),
    #[error("unknown vertex id `{0}`")]
    UnknownVertex(String),

    #[error("boundary matrices must be square of dimension {expected}, got {rows}x{cols}")]
    BcDimension { expected: usize, rows: usize, cols: usize },
    #[error("(A,B) is rank deficient: rank {rank} < {dim}")]
    BcRankDeficient { rank: usize, dim: usize },
    #[error("A·B† is not Hermitian (residual {residual:.3e})")]
    BcNonHermitian { residual: f64 },
    #[error("local block at vertex `{vertex}` has dimension {got}, expected deg(v) = {expected}")]
    BlockDimension { vertex: String, got: usize, expected: usize },
    #[error("local block at vertex `{vertex}` is invalid: {source}")]
    BlockInvalid { vertex: String, source: Box<Error> },
    #[error("boundary conditions carry no per-vertex block witness (non-local or assembled globally)")]
    NotLocal,

    #[error("A + ikB is singular at k = {k_re}+{k_im}i; κ = {kappa:.12e} is a negative-spectrum candidate")]
    ScatteringSingular { k_re: f64, k_im: f64, kappa: f64 },
    #[error("k must be nonzero")]
    ZeroSpectralParameter,
    #[error("κ grid point {kappa} lies within {dist:.3e} of the spectrum of L")]
    GridHitsSpectrumOfL { kappa: f64, dist: f64 },
    #[error("scan window must be positive, got {0}")]
    BadScanWindow(f64),
    #[error("k² = {lambda:.12e} is within the near-eigenvalue guard: σ_min(Z)/‖Z‖ = {rel:.3e}")]
    NearEigenvalue { lambda: f64, rel: f64 },
    #[error("coordinate {x} is outside the domain of edge `{edge}`")]
    PointOutsideEdge { edge: String, x: f64 },
    #[error("Im k must be positive for resolvent kernels, got k = {0}+{1}i")]
    KernelHalfPlane(f64, f64),

    #[error("walk enumeration exceeded the cap of {cap} walks at metric cutoff {cutoff}")]
    WalkCapExceeded { cap: usize, cutoff: f64 },
    #[error("walk series diverges at κ = {kappa}: ‖S(iκ)T(iκ)‖ = {q:.6} ≥ 1")]
    SeriesDiverges { kappa: f64, q: f64 },

    #[error("time must be positive, got {0}")]
    NonpositiveTime(f64),
    #[error("matrix is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),
    #[error("closed-form heat kernels require a star graph without internal edges")]
    NotStar,
    #[error("Robin heat evolution needs a real symmetric matrix; use the finite-element oracle for complex ones")]
    ComplexHeatKernel,

    #[error("mesh size {h} is too coarse; need h ≤ {bound} (min internal length / 4)")]
    MeshTooCoarse { h: f64, bound: f64 },
    #[error("mesh would have {nodes} nodes, above the dense-solver cap {cap}")]
    MeshTooLarge { nodes: usize, cap: usize },
    #[error("requested {n} eigenvalues but the constrained space has dimension {dim}")]
    TooManyEigenvalues { n: usize, dim: usize },

    #[error("failed to access `{path}`: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid JSON in `{path}`: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    InvalidConfig(String),
}

impl Error {
    /// Process exit code for the batch front end: 2 for input problems,
    /// 3 for tripped numeric guards.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            ScatteringSingular { .. }
            | GridHitsSpectrumOfL { .. }
            | NearEigenvalue { .. }
            | WalkCapExceeded { .. }
            | SeriesDiverges { .. }
            | MeshTooLarge { .. }
            | TooManyEigenvalues { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
