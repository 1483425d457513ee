pub mod algebroid;
pub mod chart_change;
pub mod connection;
pub mod courant;
pub mod derivation;
pub mod dirac;
pub mod error;
pub mod graded;
pub mod ktensors;
pub mod linalg;
pub mod model;
pub mod parse;
pub mod random;
pub mod ricci;
pub mod rational;
pub mod suite;

pub use error::{Error, Result};
pub use rational::{Poly, RationalFunction};
pub use graded::{Chart, Generator, GradedPoly, Role, Var};
pub use derivation::Derivation;
pub use chart_change::ChartChange;
pub use courant::{CourantModel, GenSection};
pub use connection::{Block, BundleChart, GenConnection};
pub use ktensors::KConnection;
pub use algebroid::{AlgebroidConnection, AlgebroidModel};
pub use dirac::DiracStructure;
pub use ricci::{CanonicalD, GeneralizedMetric};
pub use model::ModelFile;
