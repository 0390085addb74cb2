//! Executable certificates for Perron vectors of principal submatrices of the
//! normalized adjacency matrix, closed random walk support, and eigenvalue
//! multiplicity near the second eigenvalue.

pub mod certificate;
pub mod cli;
pub mod electric;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod par;
pub mod perron_lab;
pub mod spectral;
pub mod walks;

pub use certificate::{CertifiedCheck, Relation, Verdict};
pub use error::{Error, Result};
pub use graph::{GeneratorSpec, Multigraph, VertexSet};
pub use spectral::{Interval, MatrixKind, SpectralResult};
