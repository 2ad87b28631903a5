//! Desk-scale laboratory for return-time statistics and measure geometry of
//! conformal iterated function systems.
//!
//! The crate is organised around a pipeline:
//!
//! * [`symbolic`] — finite-alphabet word and cylinder combinatorics over an
//!   incidence matrix (the substrate every measure and system lives on);
//! * [`thermo`] — potentials, topological pressure, Gibbs and Markov states
//!   on finite subshifts, with certified Gibbs constants;
//! * [`geometry`] — contraction families on an ambient interval/box, cylinder
//!   hulls and diameters, the coding map, and certified two-sided bounds on
//!   projected measures of balls and annuli;
//! * [`annuli`] — thin-annuli ratios, doubling diagnostics, bad-radii scans
//!   and good-radii densities;
//! * [`returns`] — exact Markov survival oracles, the a_N/b_N/c(U)/d(U)
//!   error budget for the exponential law, empirical entry/return-time
//!   experiments and Kolmogorov–Smirnov distances;
//! * [`gallery`] — ready-made example systems (Bernoulli and Markov shifts,
//!   Cantor-type systems, truncated Gauss system, parabolic pair with its
//!   inducing scheme).
//!
//! Everything here is pure computation over immutable values: no IO, no
//! global state, and all randomised routines take explicit seeds and derive
//! per-stream generators so that reruns are bit-identical.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod annuli;
pub mod gallery;
pub mod geometry;
pub mod math;
pub mod returns;
pub mod rng;
pub mod symbolic;
pub mod thermo;
