//! Exact-arithmetic presymplectic mechanics.
//!
//! Polynomials over the rationals ([`symexpr`]), exterior calculus on a
//! chart ([`cartan`]), exact linear algebra of degenerate forms
//! ([`linred`]), presymplectic Hamiltonian structure ([`presymp`]), the
//! constraint stabilization algorithm ([`gotay`]) and momentum maps with
//! presymplectic reduction ([`momred`]). [`model`] reads model files and
//! ships the built-in examples; [`cli`] drives the `presym` binary.

pub mod cartan;
pub mod cli;
pub mod error;
pub mod gotay;
pub mod linred;
pub mod model;
pub mod momred;
pub mod presymp;
pub mod sample;
pub mod symexpr;

pub use error::{Error, Result};
