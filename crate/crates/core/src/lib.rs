//! Exact quasi-homogeneous normal forms and integrability tests for planar
//! vector fields with a nilpotent singularity at the origin.

pub mod algebra;
pub mod curves;
pub mod error;
pub mod homological;
pub mod leading;
pub mod linalg;
pub mod normal_form;
pub mod preform;
pub mod subspace;
pub mod transform;
pub mod vectorfield;

pub use error::{QhError, Result};
