//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by geometric constructions and mesh builders.
#[derive(Debug, Error)]
pub enum Error {
    /// Asked for the translation length of a map that does not translate.
    #[error("no positive translation length: map is {kind}")]
    NoTranslationLength { kind: &'static str },

    /// Asked for the angle of two circles that do not meet.
    #[error("no intersection: inversive distance {delta} exceeds 1")]
    NoIntersection { delta: f64 },

    /// Nearest-point projection to a plane is undefined on its boundary circle.
    #[error("projection undefined on boundary circle")]
    ProjectionOnBoundary,

    /// A degenerate Moebius map (determinant too close to zero).
    #[error("singular matrix: |det| = {det}")]
    SingularMatrix { det: f64 },

    /// Three-point maps need three distinct points.
    #[error("coincident points: {which}")]
    CoincidentPoints { which: &'static str },

    /// Fenchel-Nielsen lengths must be positive.
    #[error("curve length must be positive, got {value}")]
    NonPositiveLength { value: f64 },

    /// Grafting weights must be positive on every listed curve.
    #[error("graft weight must be positive, got {value}")]
    NonPositiveWeight { value: f64 },

    /// A multicurve referenced a curve index outside the decomposition.
    #[error("curve index {index} out of range: decomposition has {count} curves")]
    CurveIndexOutOfRange { index: usize, count: usize },

    /// The operation supports only curves of the standard decomposition.
    #[error("unsupported curve: change marking out of scope")]
    UnsupportedCurve,

    /// Two-disc density evaluated at the origin or outside its sector.
    #[error("point outside two-disc sector: r = {radius}, arg = {angle}")]
    OutsideTwoDisc { radius: f64, angle: f64 },

    /// Asked for a cylinder bound on a curve that was not grafted.
    #[error("curve {curve} is not grafted: no cylinder to bound")]
    CurveNotGrafted { curve: usize },

    /// The energy lower bound divides by an extremal-length bound.
    #[error("extremal-length bound must be positive, got {value}")]
    NonPositiveExtremalLength { value: f64 },

    /// Mesh resolution too coarse to resolve a grafted cylinder.
    #[error("resolution {resolution} too coarse for cylinder of height {height}")]
    ResolutionTooCoarse { resolution: f64, height: f64 },

    /// The sandwich report handles a single grafted curve.
    #[error("sandwich report needs exactly one grafted curve, got {count}")]
    SandwichNeedsOneCurve { count: usize },

    /// Internal consistency check of a built mesh failed.
    #[error("mesh validation failed: {detail}")]
    MeshValidation { detail: String },

    /// The harmonic flow targets Fuchsian representations only.
    #[error("flow target is not Fuchsian: max |Im tr| = {max_imag}")]
    TargetNotFuchsian { max_imag: f64 },

    /// The flow produced a non-finite energy.
    #[error("flow diverged at sweep {iteration}")]
    FlowDiverged { iteration: usize },

    /// Config or CSV I/O problems (CLI side funnels through here too).
    #[error("config error at line {line}: {detail}")]
    Config { line: usize, detail: String },
}

/// Convenient result alias.
pub type Result<T> = std::result::Result<T, Error>;
