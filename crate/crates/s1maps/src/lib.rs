//! Maps from planar domains into the unit circle, classified by their
//! topological singularities.
//!
//! A map u: Ω → S¹ with isolated singularities of integer degree carries a
//! singular energy Σ(u) — the least W^{1,1} energy within its equivalence
//! class (two maps are equivalent when they differ by a continuous phase).
//! This crate computes Σ(u) by three independent routes and uses them to
//! probe sharp distance bounds between classes:
//!
//! * **geometric**: Σ = 2π × the minimal-connection length `L(a⃗, d⃗)`, a
//!   minimum-cost matching of positive to negative singularities under the
//!   boundary-collapsed semi-metric d_Ω ([`matching`]);
//! * **dual**: the same value certified by a 1-Lipschitz potential
//!   (Kantorovich duality, [`matching::kantorovich_dual`]);
//! * **variational**: direct minimization of the discrete functional
//!   ∫|u∧∇u − ∇φ| over nodal phases φ ([`sigma`]).
//!
//! Grid-sampled fields, winding-number extraction, W^{1,p} energies and the
//! distance experiments live in [`fields`] and [`sigma`]; Lipschitz
//! self-maps of the circle used to build witnesses live in [`circlemaps`].
//! The [`scenario`] module runs declarative experiment files; each major
//! capability also has a runnable example under `examples/`.

pub mod circlemaps;
pub mod fields;
pub mod geometry;
pub mod matching;
pub mod scenario;
pub mod sigma;

pub use circlemaps::CircleMap;
pub use fields::{EdgeField, EnergyReport, S1Field};
pub use geometry::{Domain, Grid, Location, Point};
pub use matching::{Configuration, DualPotential, Matching, SignedMultiset};
pub use sigma::{DipoleSequence, DistanceBounds, SigmaEstimate, SolverSettings};

/// Errors shared by every module.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("point ({0}, {1}) is outside the closure of the domain")]
    OutsideDomain(f64, f64),
    #[error("grid has no interior node at spacing {0}")]
    Resolution(f64),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("singular point ({0}, {1}) coincides with a grid node; use an offset grid")]
    NodeCoincidence(f64, f64),
    #[error("instance too large: {0}")]
    Size(String),
    #[error("grid under-resolved: |Δangle| > π/2 on an edge away from declared singularities")]
    UnderResolved,
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("consistency assertion failed: {0}")]
    Assertion(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
