//! Exact computation with rooted cluster algebras of geometric type.
//!
//! The crate is layered bottom-up: [`laurent`] provides exact Laurent
//! arithmetic, [`seed`] mutation and exploration, [`morphism`] rooted
//! cluster morphisms and their depth-bounded verification, [`glue`]
//! amalgamated sums and cuttings, and [`surface`] polygon triangulations.

pub mod laurent;
pub mod seed;
pub mod morphism;
pub mod glue;
pub mod surface;
pub mod cli;
