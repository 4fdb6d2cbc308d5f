//! Resonances of three-dimensional Schrödinger operators with finitely many
//! point interactions.
//!
//! The resonances of `H_Y` are the zeros of the characteristic determinant
//! `det Γ_Y(z)` ([`chardet`]). Its Leibniz expansion is an exponential
//! polynomial whose frequencies and degrees fix the asymptotic structure of
//! the zero set ([`exppoly`]); [`rootfind`] locates the zeros numerically and
//! measures their counting functions; [`sampler`] and [`experiments`] draw
//! random configurations and test the probabilistic statements about them.

pub mod assignment;
pub mod chardet;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod exppoly;
pub mod geometry;
pub mod linalg;
pub mod rootfind;
pub mod sampler;

pub use error::{Error, Result};
pub use geometry::{Configuration, Point3};
pub use num_complex::Complex64;
