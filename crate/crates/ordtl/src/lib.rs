//! Temporal logic over linear orders with Dedekind gaps.
//!
//! The crate has three layers:
//!
//! * syntax and models — first-order and temporal formulas over a shared atom
//!   alphabet ([`logic`]), and finitely presented linear orders built from
//!   point, dense and gap segments ([`models`]);
//! * evaluators — first-order satisfaction, region-based temporal
//!   satisfaction with direct gap semantics, and interval partition matching
//!   ([`semantics`]);
//! * the constructive pipeline — partition-formula algebra ([`partition`]),
//!   negation of simple formulas ([`negation`]), and the translation of any
//!   one-free-variable first-order formula into a temporal formula over
//!   strict Until/Since plus the gap modalities ([`translate`]).
//!
//! [`oracle`] holds independent brute-force evaluators, random generators and
//! the semantic law runners that validate every transformation.

pub mod logic;
pub mod models;
pub mod negation;
pub mod oracle;
pub mod partition;
pub mod semantics;
pub mod translate;
