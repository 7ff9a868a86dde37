//! Hilbert class polynomials modulo an arbitrary integer via the CRT method,
//! and elliptic curves with a prescribed number of points via the CM method.
//!
//! The computation of `H_D mod P` runs in space roughly proportional to
//! `h(D) * (lg P + lg |D|)`: each prime `p` in the CRT basis yields `H_D mod p`
//! by walking isogeny volcanoes, and the results are folded into an explicit
//! CRT accumulator modulo `P` as soon as they are available.

pub mod arith;
pub mod classgroup;
pub mod crt;
pub mod curves;
pub mod error;
pub mod pipeline;
pub mod polyring;
pub mod primeselect;
pub mod volcano;

pub use error::{Error, Result};
