//! Exact symbolic checks for the associativity (WDVV) equations, flat
//! torsionless submanifolds and nonlocal Hamiltonian operators of
//! hydrodynamic type, plus numeric realization and flow simulation.
//!
//! Indices are zero-based throughout the API; the text format and reports use
//! the one-based names `u1..uN`.

pub mod algebra;
pub mod exprlang;
pub mod frobenius;
pub mod submanifold;
pub mod hamop;
pub mod hierarchy;
pub mod realization;
pub mod hydrosim;
