//! Grafting hyperbolic surfaces along weighted multicurves.
//!
//! The crate builds Fuchsian surface-group representations from
//! Fenchel-Nielsen coordinates, deforms them by quakebends (complexified
//! twists, the holonomy of grafted projective structures), realizes the
//! grafted surface as a metric object with flat cylinders, and verifies
//! two quantitative facts numerically:
//!
//! * trace reality of the quakebend holonomy exactly at full-turn grafting
//!   weights (multiples of 2 pi), and
//! * the harmonic-map energy sandwich
//!   `L/2 <= L^2 / (2 E) <= energy(harmonic) <= L/2 + 4 pi (g - 1)`
//!   via a triangulated grafted surface, a collapsing map, and an
//!   energy-decreasing equivariant flow.
//!
//! Everything is generic over the scalar ([`scalar::Real`], implemented for
//! `f32` and `f64`); the aliases at the crate root fix `f64`, which all
//! acceptance tolerances assume.

pub mod error;
pub mod extremal;
pub mod fuchsian;
pub mod grafting;
pub mod kv;
pub mod mesh;
pub mod moebius;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// Moebius transformation over `f64`.
pub type MoebiusMap = moebius::MoebiusMap<f64>;
/// Point of the Riemann sphere over `f64`.
pub type SpherePoint = moebius::SpherePoint<f64>;
/// Circle or line on the sphere over `f64`.
pub type Circle = moebius::Circle<f64>;
/// Disc on the sphere over `f64`.
pub type Disc = moebius::Disc<f64>;
/// Geodesic of hyperbolic 3-space over `f64`.
pub type GeodesicH3 = moebius::GeodesicH3<f64>;
/// Point of upper half-space over `f64`.
pub type H3Point = moebius::H3Point<f64>;
/// Fenchel-Nielsen coordinates over `f64`.
pub type FNCoords = fuchsian::FNCoords<f64>;
/// Weighted multicurve over `f64`.
pub type WeightedMulticurve = fuchsian::WeightedMulticurve<f64>;
/// Glued surface-group representation over `f64`.
pub type SurfaceGroupRep = fuchsian::SurfaceGroupRep<f64>;
/// Placed pants assembly over `f64`.
pub type Assembly = fuchsian::Assembly<f64>;
/// Grafted surface over `f64`.
pub type GraftedSurface = grafting::GraftedSurface<f64>;

/// Grafted-surface triangle mesh over `f64`.
pub type MetricMesh = mesh::MetricMesh<f64>;

/// Vertexwise map of a mesh into the hyperbolic plane over `f64`.
pub type EquivariantMap = mesh::EquivariantMap<f64>;

/// Discrete Dirichlet energy breakdown over `f64`.
pub type EnergyReport = mesh::EnergyReport<f64>;

/// Energy sandwich verdict for a grafted surface over `f64`.
pub type SandwichReport = mesh::SandwichReport<f64>;
/// Two-half-plane grafting domain over `f64`.
pub type TwoDiscDomain = grafting::TwoDiscDomain<f64>;
