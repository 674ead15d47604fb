//! Pilot-wave simulator for relativistic scattering at potential steps and
//! barriers: analytic Dirac mode solutions, Gaussian packet synthesis by
//! energy quadrature, Bohmian trajectories guided by the Dirac current with
//! Feynman-Stueckelberg bookkeeping, conservation accounting, and the
//! multiple-scattering expansion of barrier transmission.

pub mod accounting;
pub mod dirac_modes;
pub mod error;
pub mod export;
pub mod guidance;
pub mod multiscattering;
pub mod quadrature;
pub mod scenario;
pub mod spinor;
pub mod trajectories;
pub mod wavepacket;

pub use error::{Error, Result};
