//! Exact-arithmetic metrics and ultrametrics valued in linearly ordered
//! Abelian groups.
//!
//! Everything is computed with arbitrary-precision rationals; no floating
//! point appears anywhere. The crate provides:
//!
//! - finite linearly ordered sets with duals, bottom extensions,
//!   characteristic subsets and Dedekind cuts ([`order`]);
//! - finite-support Hahn groups and fields with the indicator, coinitial and
//!   ambient-field embeddings ([`hahn`]);
//! - a tagged value domain of rationals, lexicographic tuples and Hahn
//!   series, with absolute value, structural Archimedean comparison, the
//!   natural covaluation and the two distance tables they generate
//!   ([`group`]);
//! - finite point spaces with axiom-validated distance tables, balls,
//!   isotone transport, and the distance between ultrametrics ([`space`]);
//! - tau^2-Lipschitz retractions onto distinguished subsets, nonexpansive
//!   remetrization, and an exhaustive nonexpansive-retraction search
//!   ([`retract`]);
//! - the simultaneous extension pipeline with gauge-chain rounding, and the
//!   cross-check that runs it again inside the ambient Hahn field
//!   ([`extend`]);
//! - seeded instance generators ([`gen`]) and JSON codecs ([`json`]).

pub mod error;
pub mod extend;
pub mod gen;
pub mod group;
pub mod hahn;
pub mod json;
pub mod order;
pub mod rat;
pub mod retract;
pub mod space;

pub use error::{Error, Result};
pub use extend::{CrosscheckReport, ExtensionReport, GaugeChain};
pub use group::{ArchClass, ArchOrder, Covaluation, GroupElement, ValueDomain};
pub use hahn::{Exp, ExpDomain, HahnSeries};
pub use order::{BottomedOrderedSet, FiniteOrderedSet, Label};
pub use rat::Rat;
pub use retract::Retraction;
pub use space::{
    Flavor, MetricTable, PointSpace, PseudoTable, Report, TableDomain, UdValue, Value, Violation,
};
