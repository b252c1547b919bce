//! Causal tapestries of informons, a token game that grows them slice by
//! slice into a discretized Schrödinger evolution, sinc interpolation,
//! combinatorial game values, and exact non-additive probability demos.

pub mod cgt;
pub mod interp;
pub mod lattice;
pub mod measurement;
pub mod nk_prob;
pub mod oracle;
pub mod tapestry;
pub mod propagation;
pub mod scenarios;
