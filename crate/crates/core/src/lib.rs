//! Epidemics on configuration-model networks.
//!
//! Two analytic routes to the final size of an SIR outbreak: bond percolation
//! on the contact network ([`percolation`]) and the edge-based ODE system
//! ([`ebcm`]). Both are driven by degree generating functions ([`pgf`],
//! [`degree`]) and checked against concrete networks ([`netgen`]) and exact
//! stochastic simulation ([`simulate`]).
//!
//! The analytic modules are generic over the scalar through [`Real`]; the
//! aliases below fix it to `f64`.

pub mod compare;
pub mod degree;
pub mod ebcm;
pub mod error;
pub mod io;
pub mod netgen;
pub mod num;
pub mod percolation;
pub mod pgf;
pub mod simulate;

pub use degree::{DegreeDistribution, DegreeSequence, DistributionSpec, Family, FamilyKind};
pub use error::{Error, Result};
pub use netgen::{components, ComponentReport, ConfigurationModel, MatchingMode, Network};
pub use num::Real;
pub use simulate::{EnsembleSummary, SimConfig, SimOutcome};

pub type PowerSeries = pgf::PowerSeries<f64>;
pub type EpidemicParams = percolation::EpidemicParams<f64>;
pub type PercolationReport = percolation::PercolationReport<f64>;
pub type TransmissibilityModel = percolation::TransmissibilityModel<f64>;
pub type Trajectory = ebcm::Trajectory<f64>;
pub type FinalSizeReport = ebcm::FinalSizeReport<f64>;
