//! Sparse and movable antenna array synthesis for multiuser MIMO uplinks.
//!
//! This crate holds the numerical core and is `no_std` (it needs `alloc`):
//!
//! - [`geometry`]: array constructors, validation and spacing (co-array) analysis.
//! - [`mra`]: branch-and-bound search for minimum-redundancy rulers.
//! - [`wavefield`]: steering vectors, beampatterns and lobe classification.
//! - [`channel`]: user drops plus LOS, iid Rayleigh and wideband Rician channels.
//! - [`mimo`]: MMSE/RZF combining, SINR, sum rate and the interference-free bound.
//! - [`optim`]: greedy thinning and particle-swarm placement (PIA and movable antennas).
//!
//! File formats, configuration, the Monte Carlo harness and the CLI live in the
//! `sparsemimo` companion crate.
#![no_std]

extern crate alloc;

pub mod channel;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod mimo;
pub mod mra;
pub mod optim;
pub mod rng;
pub mod wavefield;

pub use error::{Error, Result};
pub use geometry::{ApertureBox, ArrayGeometry, Position, SpacingMultiset};
pub use num_complex::Complex64;
