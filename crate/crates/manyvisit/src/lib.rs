//! Approximation algorithms for multi-visit traveling salesman problems.
//!
//! The crate solves five related problems on semi-metric costs (symmetric,
//! triangle inequality, loop costs dominated by round trips): the
//! multi-visit TSP, its multi-depot and single-depot salesman variants, a
//! vertex-disjoint single-depot variant, and an unrestricted multi-salesman
//! variant. Visit requirements may be as large as 10^12; running time
//! depends on their bit length, not their magnitude, through an edge-fixing
//! reduction that pre-books most traversals of heavy edges and hands a
//! polynomially small remainder to classical inner algorithms
//! (Christofides-style tours, degree-constrained trees, forest covers).
//!
//! Every solve returns a certificate tying the solution cost to a linear
//! relaxation value, and small instances can be checked against exact
//! enumeration oracles.

pub mod dyadic;
pub mod error;
pub mod fileio;
pub mod generate;
pub mod instance;
pub mod walk;

pub use error::{Error, Result};
pub use instance::{CostMatrix, ProblemInstance, Variant};
pub use walk::{evaluate_solution, Evaluation, Walk, WalkSolution, WalkStep};
