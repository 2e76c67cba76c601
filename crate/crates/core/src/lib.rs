//! Exact solvers for Chinese Postman problems on mixed graphs.
//!
//! The main entry point is [`karc::solve_karc`], which handles mixed graphs
//! with few arcs by guessing arc traversal counts and solving the resulting
//! balanced problems with [`dp::solve_bcpp`]. Classical polynomial solvers and
//! exhaustive oracles live in [`classical`] and [`oracle`].

pub mod classical;
pub mod decomp;
pub mod dp;
pub mod error;
pub mod flow;
pub mod gen;
pub mod graph;
pub mod io;
pub mod join;
pub mod karc;
pub mod matching;
pub mod oracle;
pub mod simplify;
pub mod troad;

pub use error::{Error, Result};
