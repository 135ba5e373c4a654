//! Exact arithmetic in valued fields: truncated generalized power series over
//! prime fields, ramified p-adic extensions, Newton polygons and root
//! lifting, explicit extension towers with defect bookkeeping, cut
//! classification of degree-p defect extensions, and a catalog of scripted,
//! machine-checked defect computations behind the `defekt` CLI.

pub mod catalog;
pub mod cli;
pub mod cuts;
pub mod error;
pub mod hahn;
pub mod mixedchar;
pub mod poly;
pub mod scalars;
pub mod towers;
pub mod valuation;

pub use error::{Error, Result};
pub use hahn::HahnSeries;
pub use mixedchar::RamifiedPadic;
pub use scalars::{Prime, PrimeFieldElt, Rational};
pub use valuation::{Precision, Valuation};
