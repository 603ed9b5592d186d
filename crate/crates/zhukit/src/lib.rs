//! Exact Laurent-polynomial calculus for generalized Zhu algebras
//! `A^T_m(V)` and bimodules `A^T_{n,m}(V)`, together with a truncated
//! rank-1 free-boson vertex algebra on which the whole construction is
//! exercised with exact rational arithmetic.

pub mod error;
pub mod rational;
pub mod laurent;
pub mod ospace;
pub mod matrix;
pub mod zhu;
pub mod fock;
pub mod vertex;
pub mod formal;
pub mod checks;

pub use error::{Error, Result};
pub use laurent::LaurentPoly;
pub use rational::Rational;
