//! Geometric measures of view manifolds.
//!
//! A *view manifold* is the set of feature vectors one object produces as it
//! is seen from a circle of viewpoints. This crate measures how such
//! manifolds look in an arbitrary feature space:
//!
//! * spread and dimensionality of each manifold ([`manifold`]),
//! * alignment of its neighborhood kernel with that of an ideal circle ([`kernel`]),
//! * how well that ideal kernel can be regressed from it ([`kpls`]),
//! * conditioning of a thin-plate-spline map from the circle onto it ([`tps`]),
//! * and, across many objects, KNN, linear SVM and pose-regression probes ([`global`]).
//!
//! Inputs arrive as feature bundles ([`io`]) or from the synthetic families
//! in [`synth`]; results are written as JSON reports with tidy plot rows
//! ([`measure`], [`report`]).

pub mod cli;
pub mod error;
pub mod global;
pub mod io;
pub mod kernel;
pub mod kpls;
pub mod linalg;
pub mod manifold;
pub mod measure;
pub mod report;
pub mod synth;
pub mod tps;

pub use error::{Error, Result};
pub use manifold::{center_and_rebase, effective_p, nuclear_norm, CenteredBasis, ManifoldSlice};
