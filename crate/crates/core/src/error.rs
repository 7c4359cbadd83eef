use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed fan file: {0}")]
    Syntax(String),

    #[error("invalid rational literal {0:?}")]
    RationalLiteral(String),

    #[error("ray {index} has dimension {found}, expected {expected}")]
    RayDimension {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("ray {index} is not primitive: {ray:?}")]
    NonPrimitiveRay { index: usize, ray: Vec<i64> },

    #[error("fan needs more rays than its dimension (rays: {rays}, dimension: {dim})")]
    TooFewRays { rays: usize, dim: usize },

    #[error("cone {cone} has {found} rays, expected {expected}")]
    ConeRayCount {
        cone: usize,
        expected: usize,
        found: usize,
    },

    #[error("cone {cone} references ray {ray}, but only {rays} rays exist")]
    ConeIndexOutOfRange { cone: usize, ray: usize, rays: usize },

    #[error("cone {cone} repeats a ray index")]
    ConeRepeatedRay { cone: usize },

    #[error("cone {cone} is not unimodular (determinant {det})")]
    NotUnimodular { cone: usize, det: String },

    #[error("wall {wall:?} is shared by {count} maximal cones, expected 2")]
    WallSharing { wall: Vec<usize>, count: usize },

    #[error("rays on the two sides of wall {wall:?} do not form a wall relation")]
    BadWall { wall: Vec<usize> },

    #[error("nef basis has wrong shape: {0}")]
    NefBasisShape(String),

    #[error("nef basis is not a lattice basis of the divisor class group")]
    NefBasisNotLattice,

    #[error("nef basis element {index} pairs negatively with wall curve {curve:?}")]
    NefBasisNotNef { index: usize, curve: Vec<i64> },

    #[error(
        "nef cone is not simplicial ({extremal} extremal curves for Picard rank {rank}); \
         supply nef_basis spanning a simplicial subcone"
    )]
    NefConeNotSimplicial { extremal: usize, rank: usize },

    #[error("extremal curves do not form a lattice basis; supply nef_basis explicitly")]
    MoriNotLatticeBasis,

    #[error("charge matrix does not match the fan: {0}")]
    ChargeMismatch(String),

    #[error("generator {curve} has c1-degree {c1} <= 0; degree enumeration needs a Fano fan")]
    NotFano { curve: String, c1: i64 },

    #[error("cohomology ring construction failed: {0}")]
    Ring(String),

    #[error("inconsistent point-class normalization across maximal cones")]
    InconsistentNormalization,

    #[error("Poincare pairing is singular")]
    SingularPairing,

    #[error(
        "degree {degree} pairs negatively with divisor {divisor}; \
         enable general-sign mode to evaluate it"
    )]
    NegativePairing { degree: String, divisor: usize },

    #[error("degree {degree} is not in the Mori cone")]
    NotEffective { degree: String },

    #[error("operator support exceeds truncation: validity window is empty")]
    EmptyWindow,

    #[error("index {index} out of range (size {size})")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("critical component {degree} is absent at N = {modes}; needs N >= {required}")]
    ComponentAbsent {
        degree: String,
        modes: usize,
        required: usize,
    },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
