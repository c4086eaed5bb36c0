//! Multiscale B-spline approximation on dyadic decompositions of bounded domains.
//!
//! The crate is organised bottom-up:
//!
//! * [`polynomials`] : multivariate polynomials in the monomial basis and the
//!   lattice interpolation isomorphism.
//! * [`bsplines`] : cardinal B-splines, their tensor products and two-scale
//!   refinement weights.
//! * [`geometry`] : domains, dyadic cells, active/interior index families,
//!   cube chains and the domain-regularity probe.
//! * [`projection`] : local L2 polynomial projectors on boxes.
//! * [`multiscale`] : spline fields, the quasi-interpolant, the two-scale
//!   prolongation and detail operators.
//! * [`analysis`] : quadrature, norms, moduli of smoothness, class norms and
//!   rate fitting.
//! * [`operators`] : extension, sampling recovery, the derivative
//!   approximation operator and rate experiments.

pub mod analysis;
pub mod bsplines;
pub mod config;
mod error;
pub mod field;
pub mod geometry;
pub mod multiscale;
pub mod operators;
pub mod polynomials;
pub mod projection;
pub mod selftest;

pub use error::{Error, Result};
pub use field::{FnField, ScalarField};
pub use geometry::{Domain, DomainSpec, Shift};
pub use multiscale::{Scheme, SplineField};
pub use polynomials::{MultiIndex, Polynomial};
