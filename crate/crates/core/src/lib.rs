//! Exact geometry of two-dimensional modular lattices and Kronecker point sets.
//!
//! A modular lattice `L_{N,a,b}` is the point set `{(n*a mod N, n*b mod N) : 0 <= n < N}`
//! inside `[0, N-1]^2`. The crate computes, with exact integer arithmetic wherever a
//! comparison matters:
//!
//! * shortest vectors of the ambient lattice generated by `(a,b)`, `(N,0)`, `(0,N)`
//!   ([`exactint`]), both by Gauss-Lagrange reduction and by an `O(N)` brute-force oracle;
//! * the normalized constant `f(N,a,b) = lambda / sqrt(N)`, parallel-line decompositions,
//!   and the explicit lattice families with long shortest vectors ([`modlattice`]);
//! * closed-tour constructions and two-sided tour-length bounds, plus exact small-instance
//!   TSP solvers used as oracles ([`tsp`]);
//! * Jacobi-Perron convergents `(q_i, p_i, r_i)` of a pair of irrationals, computed with
//!   certified fixed-point interval arithmetic ([`jacobiperron`]);
//! * Kronecker point sets `K_{alpha,beta}(N)` and the tour-length sandwich linking them
//!   to the modular lattice of a convergent ([`kronecker`]).

pub mod error;
pub mod exactint;
pub mod jacobiperron;
pub mod kronecker;
pub mod modlattice;
pub mod tsp;

pub use error::{Error, Result};
