//! Kernels, integral Q- and Λ-operators and two-particle wave functions of
//! the hyperbolic Sutherland and Ruijsenaars models, with a suite of
//! numerical identity checks.

#![allow(non_snake_case)]

mod cheb;
pub mod error;
pub mod identity_suite;
pub mod kernels;
pub mod operators;
pub mod quad;
pub mod special_fn;
pub mod wavefn;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

// The guide's chapters are compiled as doctests so its snippets cannot rot.
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
pub mod book_introduction {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/special-functions.md")]
pub mod book_special_functions {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/quadrature.md")]
pub mod book_quadrature {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/kernels-and-operators.md")]
pub mod book_kernels_and_operators {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/wave-functions.md")]
pub mod book_wave_functions {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/identity-suite.md")]
pub mod book_identity_suite {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/command-line.md")]
pub mod book_command_line {}
#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
pub mod readme {}
