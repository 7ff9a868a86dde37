//! Independent oracles for testing: brute-force counts, forms and isogeny
//! graphs over small fields, and Hilbert class polynomials over `Z` from
//! complex-analytic values of `j`.
//!
//! Nothing here shares code with the library under test.

pub mod brute;
pub mod fixed;
pub mod hilbert;

pub use hilbert::{hilbert_class_poly, j_of_form, j_tau};
