//! Exact-rational computations on complete simplicial toric varieties:
//! fans and their flips, intersection numbers of invariant divisors, and
//! slope stability of torus-equivariant reflexive sheaves given by
//! families of filtrations.
//!
//! Everything is computed over arbitrary-precision rationals; there is no
//! floating point anywhere in the crate.

pub mod epspoly;
pub mod error;
pub mod family;
pub mod fan;
pub mod flip;
pub mod geom;
pub mod intersection;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod rat;
pub mod sheaf;
pub mod stability;
pub mod subspace;

pub use epspoly::EpsPoly;
pub use error::Error;
pub use family::{
    AmpleRangeSup, ClassifierReport, FlipCase, PolarisationFamily, Side, SmallEpsVerdict,
};
pub use fan::{Cone, Fan, FanReport, QuotientMap};
pub use flip::{ExceptionalData, FlipData, FlippingCone};
pub use intersection::{
    cartier_and_ample, degree, divisor_of_character, intersection_number, CartierAmple,
    CartierData, IntersectionEngine, InvariantDivisor, ReductionStrategy,
};
pub use lattice::LatticeVector;
pub use rat::{Int, Rat};
pub use sheaf::{Filtration, ToricSheaf};
pub use stability::{
    candidate_subspaces, polystable_decomposition, stability_verdict, Decomposition,
    StabilityStatus, StabilityVerdict, DEFAULT_CANDIDATE_CAP,
};
pub use subspace::Subspace;

pub type Result<T> = std::result::Result<T, Error>;
