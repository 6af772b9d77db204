//! A verification workbench for small-cancellation group theory.
//!
//! The library builds a family of group presentations with staircase-shaped
//! relators and machine-checks, at desk scale, the chain of facts behind a
//! hyperbolic group `G` with a free rank-3 subgroup `H = <b, d1, d2>` whose
//! inclusion admits no continuous boundary extension (no Cannon–Thurston
//! map):
//!
//! * [`words`] — run-length-encoded free-group word arithmetic.
//! * [`rips`] — the parameterized word families and presentations.
//! * [`smallcancel`] — symmetrized relator sets, piece analysis, `C'(λ)`
//!   certification, Dehn's algorithm, geodesic certificates.
//! * [`stallings`] — folded subgroup graphs with membership and basis
//!   rewriting, plus the Nielsen free-basis conditions.
//! * [`hnn`] — Britton reduction for the free-ambient HNN levels, an exact
//!   word-problem oracle independent of Dehn's algorithm.
//! * [`growth`] — letter-count matrices, straight-line programs, and the
//!   distortion table for the witness words `w_n`.
//! * [`experiment`] — the boundary-map experiment driver: geodesic
//!   certification of the witness paths, tree distances, and the bounded
//!   Mitra-criterion table.

pub mod experiment;
pub mod growth;
pub mod hnn;
pub mod rips;
pub mod sampling;
pub mod smallcancel;
pub mod stallings;
pub mod words;
