//! Minimal networks (Steiner trees) spanning probability measures in the
//! quadratic Wasserstein space over R^n, with verification harnesses for
//! the structural properties of such networks: the boundary maximum
//! principle for convex energies, the 2*pi/3 meeting angles, the Steiner
//! ratio lower bound, the star/multi-marginal equivalence with its
//! T-tensor uniqueness criterion, and L-infinity barycenter bounds.

pub mod analysis;
pub mod corpus;
pub mod error;
pub mod io;
pub mod lp;
pub mod measures;
pub mod multimarginal;
pub mod network;
pub mod transport;
pub mod uniqueness;

pub use error::{Result, W2Error};
