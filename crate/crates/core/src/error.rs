use alloc::string::String;
use alloc::vec::Vec;

/// Everything that can go wrong inside the core crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid group table: {0}")]
    InvalidGroup(String),
    #[error("cohomological degree {0} outside the supported range 1..=3")]
    DegreeOutOfRange(usize),
    #[error("modulus {modulus} is not a multiple of the group order {order}")]
    BadModulus { modulus: u64, order: usize },
    #[error("cochain moduli {0} and {1} are incompatible")]
    ModulusMismatch(u64, u64),
    #[error("not a cocycle: d(c){args:?} = {value} (mod {modulus})")]
    NotCocycle { args: Vec<usize>, value: u64, modulus: u64 },
    #[error("cocycle is not a coboundary")]
    NoSolution,
    #[error("objects are defined over different groups")]
    GroupMismatch,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("phase at (g={g}, h={h}) is {distance:.3e} away from every {modulus}-th root of unity")]
    PhaseNotRoot {
        g: usize,
        h: usize,
        distance: f64,
        modulus: u64,
    },
    #[error("no intertwiner after {tries} tries (cocycle mismatch {cocycle_mismatch:.3e}, character mismatch {character_mismatch:.3e})")]
    NoIntertwiner {
        tries: usize,
        cocycle_mismatch: f64,
        character_mismatch: f64,
    },
    #[error("{what} is not unitary (residual {residual:.3e})")]
    NotUnitary { what: String, residual: f64 },
    #[error("gates in layer {layer} overlap on wire {wire}")]
    Overlap { layer: usize, wire: usize },
    #[error("dense dimension {dim} exceeds the cap {cap}")]
    CapExceeded { dim: usize, cap: usize },
    #[error("geometry mismatch")]
    GeometryMismatch,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("circuit is not equivariant (residual {0:.3e})")]
    NotEquivariant(f64),
    #[error("symmetry does not preserve the boundary algebra (leakage {0:.3e})")]
    NotInvariant(f64),
    #[error("on-site symmetry is not linear at site {site} (residual {residual:.3e})")]
    NotLinear { site: usize, residual: f64 },
    #[error("ambiguous class fit: candidates {0:?}")]
    AmbiguousClass(Vec<Vec<u64>>),
    #[error("no cohomology class fits the extracted cocycle (best residual {0:.3e})")]
    NoClassFit(f64),
    #[error("intersection dimension {found} differs from the strip dimension {expected}")]
    IntersectionDimension { expected: String, found: String },
    #[error("beta_g(v) v^* is not scalar (residual {0:.3e})")]
    NotScalar(f64),
    #[error("charges differ: {0:?} vs {1:?}")]
    ChargeMismatch(Vec<u64>, Vec<u64>),
    #[error("index is nontrivial: {0:?}")]
    NontrivialIndex(Vec<u64>),
    #[error("invariant factors differ: {0:?} vs {1:?}")]
    FactorMismatch(Vec<u64>, Vec<u64>),
    #[error("operator escaped its light cone: {0}")]
    SupportEscape(String),
    #[error("verification failed: {what} residual {residual:.3e} above {tol:.1e}")]
    Verification { what: String, residual: f64, tol: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = core::result::Result<T, Error>;
