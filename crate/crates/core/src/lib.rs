//! Casimir energy and momentum of uniformly moving cavities.
//!
//! A massless scalar field confined between Dirichlet walls is expanded in
//! modes of the moving cavity under three treatments of the boost
//! ([`Scheme`]). Per-mode stress integrals are evaluated by quadrature and the
//! divergent mode sums are regularized by zeta assignment, an exponential
//! cutoff with fitted divergent powers, or the Abel–Plana formula. Natural
//! units `ħ = c = 1` are used throughout.

pub mod error;
pub mod modes;
pub mod observables;
pub mod quadrature;
pub mod rect2d;
pub mod regsum;
pub mod stress;
pub mod verify;

pub use error::{Error, Result};
pub use modes::{Cavity1D, Cavity2D, GramMatrix, InnerProduct, Mode2D, Scheme, SpacetimeMode};
pub use observables::{EnergyMomentum, NonRelFit, Route, RouteComparison, SweepRow, SweepTable};
pub use rect2d::{FiniteParts2D, Rect2DResult, Route2D, SubtractionSolution};
pub use regsum::{FinitePart, RegConfig, RegMethod};
pub use stress::{Coefficients, PerModeEM, PrefactorFrequency, StressConvention};
pub use verify::{CheckResult, VerifyOptions};
