//! Computational laboratory for the monomer-dimer entropy `lambda_d(p)` of the
//! lattice `Z^d` at dimer density `p`.
//!
//! The crate has five working parts:
//!
//! * [`lattice`] — exact matching counts on finite boxes, tori, and punctured
//!   boxes, by brute-force enumeration and by a broken-profile transfer scan,
//!   plus entropy estimates and dimer-profile censuses derived from them;
//! * [`closed_forms`] — the scalar functions with closed expressions: the 1-D
//!   entropy curve, the mean-field term, the `1/d`-expansion partial sums, the
//!   regular-graph (matching-conjecture) curve, factorial bounds, and the
//!   occupancy exponent `H(p, j)`;
//! * [`bounds`] — certified lower bounds and two flavors of upper bound for
//!   `lambda_d`, each consuming a curve for `lambda_{d-1}`, together with the
//!   chaining driver that climbs from `d = 1` upward;
//! * [`cluster`] — exact rational cluster coefficients `Jbar_s`, obtained by
//!   enumerating overlap-connected tile diagrams in the infinite-volume limit;
//! * [`series`] — exact polynomial/series algebra over rationals: the
//!   `1/d`-expansion extracted from the cluster data by a formal saddle-point
//!   iteration, its rearrangement into a power series in `p`, and the residual
//!   of the dimension-recursion ansatz.
//!
//! The `mdent` binary exposes all of it on the command line.

pub mod bounds;
pub mod cli;
pub mod closed_forms;
pub mod cluster;
pub mod lattice;
pub mod series;
pub mod xlog;
