//! Numerical laboratory for Wigner-matrix spectral statistics.
//!
//! The crate samples Wigner ensembles W = X/√n from standardized entry laws,
//! computes spectra and the exact Kolmogorov distance to the semicircle law,
//! evaluates Stieltjes transforms and resolvents with their ε/η correction
//! terms, verifies a battery of exact resolvent identities and inequalities,
//! and runs seeded Monte Carlo experiments for the n⁻¹log⁴n convergence-rate
//! and eigenvalue-rigidity statistics.
//!
//! Everything is deterministic: samples are pure functions of
//! (law, n, seed) via counter-based per-entry RNG streams, and Monte Carlo
//! reductions run in fixed replica order regardless of parallelism.

pub mod bounds;
pub mod ensemble;
pub mod exec;
pub mod linalg;
pub mod quad;
pub mod resolvent;
pub mod rng;
pub mod semicircle;
pub mod spectral;
pub mod stieltjes;
