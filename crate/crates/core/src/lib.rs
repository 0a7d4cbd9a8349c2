//! Exact arithmetic for hyperelliptic curves z^2 = f(x, y) via pairs of
//! symmetric matrices: binary forms, the rings R_f and their ideals, the
//! point-to-orbit construction, finite-field orbit statistics, local
//! density estimates, local solubility and point search.

pub mod arith;
pub mod densities;
pub mod forms;
pub mod error;
pub mod finite_fields;
pub mod gf;
pub mod local;
pub mod json;
pub mod orbits;
pub mod poly;
pub mod rings;
pub mod search;
pub mod sturm;

pub use error::{Error, Result};
pub use forms::{BinaryForm, FactorizationType, Unimodular};
pub use rings::{AlgebraElement, BasedIdeal, EtaleAlgebra, RankNRing, SquareClassVerdict};
pub use orbits::{CurvePoint, SymmetricPair};
pub use finite_fields::OrbitStats;
pub use densities::DensityReport;
pub use local::{Place, PlaceVerdict};
pub use search::{SurveyAggregate, SurveyRecord};
