//! Norms, moduli of smoothness, class norms and rate fitting.

pub mod classes;
pub mod functions;
pub mod moduli;
pub mod norms;
pub mod quadrature;

pub use classes::{class_norm, fit_rate, l_of, measure_smoothness, RateFit, SmoothnessClass};
pub use functions::{affine_pullback, affine_pullback_inverse, Factor, Side, TestFunction};
pub use moduli::{modulus_avg, modulus_profile, modulus_sup, ModulusPoint};
pub use norms::{difference, lp_norm, sobolev_norm};
pub use quadrature::{NodeSet, QuadratureSpec};
