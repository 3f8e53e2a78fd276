//! Decision-diagram construction of the full unitary of quantum circuits.
//!
//! The [`Package`] holds canonical edge-weighted decision diagrams for
//! 2^n×2^n matrices. Circuits are turned into a single diagram by one of the
//! strategies in [`strategies`]: gate-by-gate, pairwise grouping, or
//! square-and-multiply for circuits made of a repeated block.

pub mod circuit;
pub mod error;
pub mod gates;
pub mod generators;
pub mod numerics;
pub mod ops;
pub mod oracle;
pub mod package;
pub mod qasm;
pub mod strategies;

pub use circuit::{Circuit, Gate, GateKind, RepeatedCircuit};
pub use error::{Error, Result};
pub use numerics::{ComplexRef, ComplexTable, ComplexValue};
pub use oracle::DenseMatrix;
pub use package::{Edge, NodeId, Package, PackageConfig, PackageStats};
pub use strategies::{
    build_pairwise, build_repeated, build_sequential, BuildOptions, BuildStats, Step,
};
