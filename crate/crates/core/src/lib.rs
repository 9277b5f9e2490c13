//! Vietoris–Rips persistent homology and the three standard views of its output:
//! the persistence barcode, the conventional (birth, death) persistence diagram,
//! and the flat persistence diagram, which plots (birth, death − birth).
//!
//! The crate is `no_std` and only needs `alloc`. File formats, IO and the
//! command-line tool live in the `flatdiag` crate.
//!
//! A typical pipeline:
//!
//! ```
//! use flatdiag_core::{pointcloud, rips, persistence, diagram, render};
//!
//! let cloud = pointcloud::sample_circle(40, 1.0, 0.05, 42).unwrap();
//! let dm = pointcloud::DistanceMatrix::from_cloud(&cloud);
//! let filtration = rips::build_rips_filtration(&dm, 2, rips::Threshold::Auto).unwrap();
//! let diag = persistence::compute_persistence(&filtration, 1).unwrap();
//!
//! let flat = diagram::to_flat(&diag);
//! assert_eq!(flat.len(), diag.features.len());
//!
//! let svg = render::render_flat(&diag, &render::PlotSpec::default());
//! assert!(svg.as_str().starts_with("<?xml"));
//! ```

#![no_std]
#![deny(missing_docs)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;

pub mod diagram;
pub mod oracle;
pub mod persistence;
pub mod pointcloud;
pub mod render;
pub mod rips;

pub use self::error::{Error, Result};
