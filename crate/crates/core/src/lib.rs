//! Exact construction and verification of closed rational forms for
//! multivariate Chebyshev generating functions, Chebyshev Kibble–Slepian
//! sums and their q-Hermite generalization.

pub mod chebyshev;
pub mod denominator;
pub mod error;
pub mod genfun;
pub mod kibble;
pub mod par;
pub mod poly;
pub mod qseries;
pub mod ratfn;
pub mod rational;
pub mod verify;

pub use error::{Error, Result};
pub use par::Exec;
pub use poly::{Poly, Var};
pub use rational::Rational;
