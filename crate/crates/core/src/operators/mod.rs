//! Extension, sampling recovery, the derivative approximation operator and
//! the rate experiments built on them.

pub mod experiments;
pub mod extension;
pub mod recovery;
pub mod stechkin;

pub use experiments::{rate_experiment, verify_domain, Check, DomainReport, Report, Row, DEGENERATE};
pub use extension::{extend, first_interior_level, ExtensionResult};
pub use recovery::{interpolation_residual, recovery, sample_points, SampleSet};
pub use stechkin::{DerivativeField, StechkinOperator};
